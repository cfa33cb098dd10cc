//! Canonical SVG 1.1 subset: emitter and strict parser.
//!
//! Canonical form: XML declaration, one `<svg>` root carrying width/height/
//! viewBox, one element per line, children ordered by (z, id), fixed
//! attribute order (id, data-label, x/cx/points, y/cy, width/rx, height/ry,
//! fill, font-size, text-anchor), coordinates with exactly two decimals,
//! palette colors as uppercase hex. The parser accepts exactly this subset
//! and assigns z by document order, so emit -> parse -> emit is a fixed point.

use super::{escape_attr, escape_text, sort_nodes, unescape, CanvasIR, CanvasNode, NodeKind};
use crate::color::Color;
use crate::geom::{Point, Rect};
use crate::scene::{Alignment, TextSizeClass};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SvgError {
    #[error("unsupported element '{0}'")]
    UnsupportedElement(String),
    #[error("element '{id}': bad attribute '{attr}'")]
    MalformedAttribute { id: String, attr: String },
    #[error("malformed document: {0}")]
    MalformedDocument(String),
}

pub fn emit_svg(ir: &CanvasIR) -> Vec<u8> {
    let mut nodes = ir.nodes.clone();
    sort_nodes(&mut nodes);
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = ir.width,
        h = ir.height,
    ));
    for node in &nodes {
        emit_node(node, &mut out);
    }
    out.push_str("</svg>\n");
    out.into_bytes()
}

fn emit_node(node: &CanvasNode, out: &mut String) {
    let id = escape_attr(&node.id);
    let label = node
        .label
        .as_ref()
        .map(|l| format!(" data-label=\"{}\"", escape_attr(l)))
        .unwrap_or_default();
    let fill = node
        .color
        .map(|c| format!(" fill=\"{}\"", c.hex()))
        .unwrap_or_default();
    match &node.kind {
        NodeKind::Rect { bbox } => {
            out.push_str(&format!(
                "<rect id=\"{id}\"{label} x=\"{:.2}\" y=\"{:.2}\" \
                 width=\"{:.2}\" height=\"{:.2}\"{fill}/>\n",
                bbox.x, bbox.y, bbox.w, bbox.h,
            ));
        }
        NodeKind::Ellipse { bbox } => {
            let c = bbox.center();
            out.push_str(&format!(
                "<ellipse id=\"{id}\"{label} cx=\"{:.2}\" cy=\"{:.2}\" \
                 rx=\"{:.2}\" ry=\"{:.2}\"{fill}/>\n",
                c.x,
                c.y,
                bbox.w / 2.0,
                bbox.h / 2.0,
            ));
        }
        NodeKind::Polygon { points } => {
            let pts = points
                .iter()
                .map(|p| format!("{:.2},{:.2}", p.x, p.y))
                .collect::<Vec<_>>()
                .join(" ");
            out.push_str(&format!(
                "<polygon id=\"{id}\"{label} points=\"{pts}\"{fill}/>\n"
            ));
        }
        NodeKind::Text { anchor, size_class, alignment, content } => {
            out.push_str(&format!(
                "<text id=\"{id}\"{label} x=\"{:.2}\" y=\"{:.2}\"{fill} \
                 font-size=\"{}\" text-anchor=\"{}\">{}</text>\n",
                anchor.x,
                anchor.y,
                size_class.font_px(),
                anchor_name(*alignment),
                escape_text(content),
            ));
        }
        NodeKind::Group { children } => {
            out.push_str(&format!("<g id=\"{id}\"{label}>\n"));
            for child in children {
                emit_node(child, out);
            }
            out.push_str("</g>\n");
        }
    }
}

fn anchor_name(alignment: Alignment) -> &'static str {
    match alignment {
        Alignment::Left => "start",
        Alignment::Center => "middle",
        Alignment::Right => "end",
    }
}

fn alignment_from_anchor(s: &str) -> Option<Alignment> {
    match s {
        "start" => Some(Alignment::Left),
        "middle" => Some(Alignment::Center),
        "end" => Some(Alignment::Right),
        _ => None,
    }
}

fn size_class_from_font_px(px: &str) -> Option<TextSizeClass> {
    match px {
        "64" => Some(TextSizeClass::Title),
        "40" => Some(TextSizeClass::Subtitle),
        "24" => Some(TextSizeClass::Body),
        "16" => Some(TextSizeClass::Caption),
        _ => None,
    }
}

/// Parse the emitted subset back into IR. z is assigned by document order,
/// which makes re-emission reproduce the document byte for byte.
pub fn parse_svg_subset(input: &[u8]) -> Result<CanvasIR, SvgError> {
    let text = std::str::from_utf8(input)
        .map_err(|_| SvgError::MalformedDocument("not valid UTF-8".to_string()))?;
    let mut parser = Parser { rest: text, next_z: 0 };
    parser.skip_ws();
    parser.skip_xml_decl()?;
    parser.skip_ws();

    let tag = parser.open_tag()?;
    if tag.name != "svg" {
        return Err(SvgError::UnsupportedElement(tag.name));
    }
    if tag.self_closing {
        return Err(SvgError::MalformedDocument("empty svg root".to_string()));
    }
    let mut width = None;
    let mut height = None;
    let mut view_box = None;
    for (name, value) in &tag.attrs {
        match name.as_str() {
            "xmlns" => {
                if value != "http://www.w3.org/2000/svg" {
                    return Err(bad("svg", "xmlns"));
                }
            }
            "version" => {
                if value != "1.1" {
                    return Err(bad("svg", "version"));
                }
            }
            "width" => width = value.parse::<u32>().ok(),
            "height" => height = value.parse::<u32>().ok(),
            "viewBox" => view_box = Some(value.clone()),
            _ => return Err(bad("svg", name)),
        }
    }
    let width = width.ok_or_else(|| bad("svg", "width"))?;
    let height = height.ok_or_else(|| bad("svg", "height"))?;
    if let Some(vb) = view_box {
        if vb != format!("0 0 {width} {height}") {
            return Err(bad("svg", "viewBox"));
        }
    }

    let nodes = parser.children("svg")?;
    parser.skip_ws();
    if !parser.rest.is_empty() {
        return Err(SvgError::MalformedDocument(
            "content after closing svg tag".to_string(),
        ));
    }
    Ok(CanvasIR::new(width, height, nodes))
}

fn bad(id: &str, attr: &str) -> SvgError {
    SvgError::MalformedAttribute { id: id.to_string(), attr: attr.to_string() }
}

struct Tag {
    name: String,
    attrs: Vec<(String, String)>,
    self_closing: bool,
}

struct Parser<'a> {
    rest: &'a str,
    next_z: i64,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches(['\n', '\r', '\t', ' ']);
    }

    fn skip_xml_decl(&mut self) -> Result<(), SvgError> {
        if let Some(rest) = self.rest.strip_prefix("<?xml") {
            let end = rest
                .find("?>")
                .ok_or_else(|| SvgError::MalformedDocument("unterminated XML declaration".to_string()))?;
            self.rest = &rest[end + 2..];
        }
        Ok(())
    }

    fn expect(&mut self, token: &str) -> Result<(), SvgError> {
        self.rest = self.rest.strip_prefix(token).ok_or_else(|| {
            SvgError::MalformedDocument(format!(
                "expected '{token}' near '{}'",
                self.rest.chars().take(24).collect::<String>()
            ))
        })?;
        Ok(())
    }

    fn read_name(&mut self) -> Result<String, SvgError> {
        let end = self
            .rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == ':'))
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(SvgError::MalformedDocument(format!(
                "expected a name near '{}'",
                self.rest.chars().take(24).collect::<String>()
            )));
        }
        let name = self.rest[..end].to_string();
        self.rest = &self.rest[end..];
        Ok(name)
    }

    fn open_tag(&mut self) -> Result<Tag, SvgError> {
        self.expect("<")?;
        let name = self.read_name()?;
        let mut attrs = Vec::new();
        loop {
            let ws = self.rest.len();
            self.skip_ws();
            if let Some(rest) = self.rest.strip_prefix("/>") {
                self.rest = rest;
                return Ok(Tag { name, attrs, self_closing: true });
            }
            if let Some(rest) = self.rest.strip_prefix('>') {
                self.rest = rest;
                return Ok(Tag { name, attrs, self_closing: false });
            }
            if ws == self.rest.len() {
                return Err(SvgError::MalformedDocument(format!(
                    "junk in tag '{name}'"
                )));
            }
            let attr = self.read_name()?;
            self.expect("=")?;
            self.expect("\"")?;
            let end = self.rest.find('"').ok_or_else(|| {
                SvgError::MalformedDocument(format!("unterminated attribute '{attr}'"))
            })?;
            let raw = &self.rest[..end];
            self.rest = &self.rest[end + 1..];
            let value = unescape(raw).map_err(|_| bad(&name, &attr))?;
            attrs.push((attr, value));
        }
    }

    fn close_tag(&mut self, name: &str) -> Result<(), SvgError> {
        self.expect("</")?;
        let got = self.read_name()?;
        if got != name {
            return Err(SvgError::MalformedDocument(format!(
                "expected </{name}>, found </{got}>"
            )));
        }
        self.skip_ws();
        self.expect(">")
    }

    fn children(&mut self, parent: &str) -> Result<Vec<CanvasNode>, SvgError> {
        let mut nodes = Vec::new();
        loop {
            self.skip_ws();
            if self.rest.starts_with("</") {
                self.close_tag(parent)?;
                return Ok(nodes);
            }
            if self.rest.is_empty() {
                return Err(SvgError::MalformedDocument(format!(
                    "missing </{parent}>"
                )));
            }
            nodes.push(self.element()?);
        }
    }

    fn element(&mut self) -> Result<CanvasNode, SvgError> {
        let tag = self.open_tag()?;
        match tag.name.as_str() {
            "rect" => self.shape(tag, Shape::Rect),
            "ellipse" => self.shape(tag, Shape::Ellipse),
            "polygon" => self.shape(tag, Shape::Polygon),
            "text" => self.text(tag),
            "g" => self.group(tag),
            other => Err(SvgError::UnsupportedElement(other.to_string())),
        }
    }

    fn take_z(&mut self) -> i64 {
        let z = self.next_z;
        self.next_z += 1;
        z
    }

    fn shape(&mut self, tag: Tag, shape: Shape) -> Result<CanvasNode, SvgError> {
        if !tag.self_closing {
            return Err(SvgError::MalformedDocument(format!(
                "<{}> must be self-closing",
                tag.name
            )));
        }
        let mut fields = Fields::new(&tag)?;
        let kind = match shape {
            Shape::Rect => NodeKind::Rect {
                bbox: Rect::new(
                    fields.number("x")?,
                    fields.number("y")?,
                    fields.number("width")?,
                    fields.number("height")?,
                ),
            },
            Shape::Ellipse => {
                let (cx, cy) = (fields.number("cx")?, fields.number("cy")?);
                let (rx, ry) = (fields.number("rx")?, fields.number("ry")?);
                NodeKind::Ellipse {
                    bbox: Rect::new(cx - rx, cy - ry, rx * 2.0, ry * 2.0),
                }
            }
            Shape::Polygon => {
                let raw = fields.string("points")?;
                let mut points = Vec::new();
                for pair in raw.split_whitespace() {
                    let (x, y) = pair
                        .split_once(',')
                        .ok_or_else(|| bad(&fields.id, "points"))?;
                    points.push(Point::new(
                        x.parse().map_err(|_| bad(&fields.id, "points"))?,
                        y.parse().map_err(|_| bad(&fields.id, "points"))?,
                    ));
                }
                if points.len() < 3 {
                    return Err(bad(&fields.id, "points"));
                }
                NodeKind::Polygon { points }
            }
        };
        fields.finish(kind, self.take_z())
    }

    fn text(&mut self, tag: Tag) -> Result<CanvasNode, SvgError> {
        if tag.self_closing {
            return Err(SvgError::MalformedDocument(
                "<text> must carry content".to_string(),
            ));
        }
        let mut fields = Fields::new(&tag)?;
        let anchor = Point::new(fields.number("x")?, fields.number("y")?);
        let size_class = size_class_from_font_px(&fields.string("font-size")?)
            .ok_or_else(|| bad(&fields.id, "font-size"))?;
        let alignment = alignment_from_anchor(&fields.string("text-anchor")?)
            .ok_or_else(|| bad(&fields.id, "text-anchor"))?;
        let end = self.rest.find('<').ok_or_else(|| {
            SvgError::MalformedDocument("unterminated <text>".to_string())
        })?;
        let content = unescape(&self.rest[..end])
            .map_err(SvgError::MalformedDocument)?;
        self.rest = &self.rest[end..];
        self.close_tag("text")?;
        fields.finish(
            NodeKind::Text { anchor, size_class, alignment, content },
            self.take_z(),
        )
    }

    fn group(&mut self, tag: Tag) -> Result<CanvasNode, SvgError> {
        if tag.self_closing {
            return Err(SvgError::MalformedDocument(
                "<g> must not be self-closing".to_string(),
            ));
        }
        let fields = Fields::new(&tag)?;
        let z = self.take_z();
        let children = self.children("g")?;
        fields.finish(NodeKind::Group { children }, z)
    }
}

enum Shape {
    Rect,
    Ellipse,
    Polygon,
}

/// Per-element attribute map enforcing the emitted attribute set exactly.
struct Fields {
    id: String,
    label: Option<String>,
    color: Option<Color>,
    attrs: Vec<(String, String)>,
}

impl Fields {
    fn new(tag: &Tag) -> Result<Self, SvgError> {
        let allowed: &[&str] = match tag.name.as_str() {
            "rect" => &["id", "data-label", "x", "y", "width", "height", "fill"],
            "ellipse" => &["id", "data-label", "cx", "cy", "rx", "ry", "fill"],
            "polygon" => &["id", "data-label", "points", "fill"],
            "text" => &["id", "data-label", "x", "y", "fill", "font-size", "text-anchor"],
            "g" => &["id", "data-label"],
            _ => &[],
        };
        let mut id = None;
        let mut label = None;
        let mut color = None;
        let mut attrs = Vec::new();
        for (name, value) in &tag.attrs {
            if !allowed.contains(&name.as_str()) {
                return Err(bad(id.as_deref().unwrap_or(&tag.name), name));
            }
            match name.as_str() {
                "id" => id = Some(value.clone()),
                "data-label" => label = Some(value.clone()),
                "fill" => {
                    color = Some(
                        Color::from_hex(value)
                            .ok_or_else(|| bad(id.as_deref().unwrap_or(&tag.name), "fill"))?,
                    )
                }
                _ => attrs.push((name.clone(), value.clone())),
            }
        }
        let id = id.ok_or_else(|| bad(&tag.name, "id"))?;
        Ok(Self { id, label, color, attrs })
    }

    fn string(&mut self, name: &str) -> Result<String, SvgError> {
        let pos = self
            .attrs
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| bad(&self.id, name))?;
        Ok(self.attrs.remove(pos).1)
    }

    fn number(&mut self, name: &str) -> Result<f64, SvgError> {
        let value = self.string(name)?;
        let parsed: f64 = value.parse().map_err(|_| bad(&self.id, name))?;
        if parsed.is_finite() {
            Ok(parsed)
        } else {
            Err(bad(&self.id, name))
        }
    }

    fn finish(self, kind: NodeKind, z: i64) -> Result<CanvasNode, SvgError> {
        if let Some((name, _)) = self.attrs.first() {
            return Err(bad(&self.id, name));
        }
        Ok(CanvasNode { id: self.id, kind, label: self.label, color: self.color, z })
    }
}

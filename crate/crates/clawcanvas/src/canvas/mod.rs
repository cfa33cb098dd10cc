//! The executable canvas: a node tree compiled from a record plus its
//! layout, serializable to a canonical SVG subset and an HTML text layer.

mod compile;
mod html;
mod svg;

pub use compile::{compile, CompileError};
pub use html::{emit_html_text_layer, HtmlError};
pub use svg::{emit_svg, parse_svg_subset, SvgError};

use crate::color::Color;
use crate::geom::{Point, Rect};
use crate::scene::{Alignment, TextSizeClass};

#[derive(Debug, Clone, PartialEq)]
pub struct CanvasIR {
    pub width: u32,
    pub height: u32,
    /// Kept sorted by (z, id); document order == paint order.
    pub nodes: Vec<CanvasNode>,
}

impl CanvasIR {
    pub fn new(width: u32, height: u32, mut nodes: Vec<CanvasNode>) -> Self {
        sort_nodes(&mut nodes);
        Self { width, height, nodes }
    }

    /// Depth-first iteration, groups flattened away.
    pub fn flat_nodes(&self) -> Vec<&CanvasNode> {
        fn walk<'a>(nodes: &'a [CanvasNode], out: &mut Vec<&'a CanvasNode>) {
            for node in nodes {
                out.push(node);
                if let NodeKind::Group { children } = &node.kind {
                    walk(children, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.nodes, &mut out);
        out
    }

    pub fn node(&self, id: &str) -> Option<&CanvasNode> {
        self.flat_nodes().into_iter().find(|n| n.id == id)
    }
}

pub(crate) fn sort_nodes(nodes: &mut [CanvasNode]) {
    nodes.sort_by(|a, b| (a.z, &a.id).cmp(&(b.z, &b.id)));
    for node in nodes.iter_mut() {
        if let NodeKind::Group { children } = &mut node.kind {
            sort_nodes(children);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanvasNode {
    pub id: String,
    pub kind: NodeKind,
    /// Class label carried as `data-label`; what the verifier tallies.
    pub label: Option<String>,
    pub color: Option<Color>,
    pub z: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Rect {
        bbox: Rect,
    },
    Ellipse {
        bbox: Rect,
    },
    Polygon {
        points: Vec<Point>,
    },
    Text {
        anchor: Point,
        size_class: TextSizeClass,
        alignment: Alignment,
        content: String,
    },
    Group {
        children: Vec<CanvasNode>,
    },
}

impl CanvasNode {
    /// Bounding box for geometry nodes; None for text and groups.
    pub fn bbox(&self) -> Option<Rect> {
        match &self.kind {
            NodeKind::Rect { bbox } | NodeKind::Ellipse { bbox } => Some(*bbox),
            NodeKind::Polygon { points } => {
                let first = points.first()?;
                let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x, first.y);
                for p in points {
                    x0 = x0.min(p.x);
                    y0 = y0.min(p.y);
                    x1 = x1.max(p.x);
                    y1 = y1.max(p.y);
                }
                Some(Rect::new(x0, y0, x1 - x0, y1 - y0))
            }
            NodeKind::Text { .. } | NodeKind::Group { .. } => None,
        }
    }

    pub fn text_content(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::Text { content, .. } => Some(content),
            _ => None,
        }
    }
}

/// Document formats [`extract_text`] understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocFormat {
    Svg,
    Html,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractError {
    #[error(transparent)]
    Svg(#[from] SvgError),
    #[error("malformed text layer: {0}")]
    MalformedHtml(String),
}

/// All text contents in document order, unescaped. Only documents produced
/// by this module's emitters are in contract.
pub fn extract_text(document: &[u8], format: DocFormat) -> Result<Vec<String>, ExtractError> {
    match format {
        DocFormat::Svg => {
            let ir = parse_svg_subset(document)?;
            Ok(ir
                .flat_nodes()
                .into_iter()
                .filter_map(|n| n.text_content().map(str::to_string))
                .collect())
        }
        DocFormat::Html => html::extract_html_text(document),
    }
}

pub(crate) fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Resolve the five XML entities; anything else is an error.
pub(crate) fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(pos) = rest.find('&') {
        out.push_str(&rest[..pos]);
        rest = &rest[pos..];
        let semi = rest
            .find(';')
            .ok_or_else(|| format!("unterminated entity near '{rest}'"))?;
        let entity = &rest[..=semi];
        out.push(match entity {
            "&amp;" => '&',
            "&lt;" => '<',
            "&gt;" => '>',
            "&quot;" => '"',
            "&apos;" => '\'',
            other => return Err(format!("unknown entity '{other}'")),
        });
        rest = &rest[semi + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

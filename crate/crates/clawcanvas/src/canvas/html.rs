//! HTML text layer: deterministic, absolutely positioned text blocks.
//!
//! The document exists so text reaches the canvas through code rather than
//! through an image model: content is written character for character and can
//! be extracted back with fidelity 1.0.

use super::{escape_attr, escape_text, unescape, ExtractError};
use crate::scene::SceneRecord;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HtmlError {
    #[error("record has no text content")]
    NoTextContent,
}

/// Standalone HTML document with one absolutely positioned block per text
/// spec: region mapped to pixel offsets, size class to a fixed pixel font
/// size, alignment to `text-align`, hierarchy level to a `data-level`
/// annotation. Blocks appear in record (id) order.
pub fn emit_html_text_layer(record: &SceneRecord) -> Result<Vec<u8>, HtmlError> {
    if record.texts.is_empty() {
        return Err(HtmlError::NoTextContent);
    }
    let width = record.canvas.width;
    let height = record.canvas.height;
    let mut out = String::from("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\"/>\n");
    out.push_str("<title>text layer</title>\n<style>\n");
    out.push_str(&format!(
        "body{{margin:0;position:relative;width:{width}px;height:{height}px}}\n"
    ));
    out.push_str(".txt{position:absolute;margin:0;white-space:pre-wrap}\n");
    out.push_str("</style>\n</head>\n<body>\n");
    for text in &record.texts {
        let px = |v: f64| v.round() as i64;
        out.push_str(&format!(
            "<div id=\"{}\" class=\"txt\" data-level=\"{}\" style=\"left:{}px;top:{}px;\
             width:{}px;height:{}px;font-size:{}px;text-align:{}\">{}</div>\n",
            escape_attr(&text.id),
            text.level,
            px(text.region.x * f64::from(width)),
            px(text.region.y * f64::from(height)),
            px(text.region.w * f64::from(width)),
            px(text.region.h * f64::from(height)),
            text.size_class.font_px(),
            text.alignment.name(),
            escape_text(&text.content),
        ));
    }
    out.push_str("</body>\n</html>\n");
    Ok(out.into_bytes())
}

/// Contents of every text block in document order, unescaped.
pub(super) fn extract_html_text(document: &[u8]) -> Result<Vec<String>, ExtractError> {
    let text = std::str::from_utf8(document)
        .map_err(|_| ExtractError::MalformedHtml("not valid UTF-8".to_string()))?;
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find("<div ") {
        let block = &rest[start..];
        let open_end = block
            .find('>')
            .ok_or_else(|| ExtractError::MalformedHtml("unterminated <div>".to_string()))?;
        let close = block
            .find("</div>")
            .ok_or_else(|| ExtractError::MalformedHtml("missing </div>".to_string()))?;
        if close < open_end {
            return Err(ExtractError::MalformedHtml("misnested <div>".to_string()));
        }
        let content = unescape(&block[open_end + 1..close]).map_err(ExtractError::MalformedHtml)?;
        out.push(content);
        rest = &block[close + "</div>".len()..];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{extract_text, DocFormat};
    use super::*;
    use crate::scene::parse_records;

    fn record(lines: &str) -> SceneRecord {
        parse_records(lines.as_bytes()).unwrap()
    }

    #[test]
    fn content_round_trips_exactly() {
        let r = record(concat!(
            "{\"kind\":\"text\",\"id\":\"t1\",\"content\":\"2026 World Cup\",",
            "\"size_class\":\"title\",\"alignment\":\"center\",\"region\":[0.0,0.0,1.0,0.2]}\n",
        ));
        let html = emit_html_text_layer(&r).unwrap();
        let texts = extract_text(&html, DocFormat::Html).unwrap();
        assert_eq!(texts, vec!["2026 World Cup".to_string()]);
    }

    #[test]
    fn cjk_bytes_survive() {
        let r = record(
            "{\"kind\":\"text\",\"id\":\"t1\",\"content\":\"滕王阁序\"}\n",
        );
        let html = emit_html_text_layer(&r).unwrap();
        let doc = String::from_utf8(html.clone()).unwrap();
        assert!(doc.contains("滕王阁序"));
        assert_eq!(
            extract_text(&html, DocFormat::Html).unwrap(),
            vec!["滕王阁序".to_string()]
        );
    }

    #[test]
    fn markup_characters_are_escaped_and_recovered() {
        let r = record(
            "{\"kind\":\"text\",\"id\":\"t\",\"content\":\"a<b & </div> c\"}\n",
        );
        let html = emit_html_text_layer(&r).unwrap();
        assert_eq!(
            extract_text(&html, DocFormat::Html).unwrap(),
            vec!["a<b & </div> c".to_string()]
        );
    }

    #[test]
    fn textless_record_is_an_error() {
        let r = record("{\"kind\":\"object\",\"id\":\"a\"}\n");
        assert_eq!(emit_html_text_layer(&r), Err(HtmlError::NoTextContent));
    }

    #[test]
    fn region_maps_to_pixel_offsets() {
        let r = record(concat!(
            "{\"kind\":\"config\",\"width\":1000,\"height\":500}\n",
            "{\"kind\":\"text\",\"id\":\"t\",\"content\":\"x\",\"size_class\":\"caption\",",
            "\"region\":[0.25,0.5,0.5,0.1],\"level\":2}\n",
        ));
        let html = String::from_utf8(emit_html_text_layer(&r).unwrap()).unwrap();
        assert!(html.contains(
            "style=\"left:250px;top:250px;width:500px;height:50px;font-size:16px;text-align:left\""
        ));
        assert!(html.contains("data-level=\"2\""));
    }

    #[test]
    fn blocks_follow_id_order() {
        let r = record(concat!(
            "{\"kind\":\"text\",\"id\":\"b\",\"content\":\"second\"}\n",
            "{\"kind\":\"text\",\"id\":\"a\",\"content\":\"first\"}\n",
        ));
        let html = emit_html_text_layer(&r).unwrap();
        assert_eq!(
            extract_text(&html, DocFormat::Html).unwrap(),
            vec!["first".to_string(), "second".to_string()]
        );
    }
}

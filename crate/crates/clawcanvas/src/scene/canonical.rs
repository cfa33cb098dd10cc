//! Canonical JSONL emission: sorted lines, alphabetical keys, UTF-8, LF.

use serde_json::{Map, Value};

use super::{KnowledgeFact, ObjectSpec, RelationConstraint, SceneRecord, TextSpec};

/// Serialize to the canonical `*.scene.jsonl` byte form.
///
/// Lines are ordered config, objects by id, texts by id, relations by
/// (kind, subject, object), facts by (claim, source, timestamp); keys are
/// alphabetical within each line. `parse_records` of the output equals the
/// input record, and records equal up to line order serialize identically.
pub fn canonical_serialize(record: &SceneRecord) -> Vec<u8> {
    let mut out = String::new();

    let push = |map: Map<String, Value>, out: &mut String| {
        out.push_str(&Value::Object(map).to_string());
        out.push('\n');
    };

    let mut cfg = record.canvas.extra.clone().into_iter().collect::<Map<_, _>>();
    cfg.insert("kind".into(), "config".into());
    cfg.insert("width".into(), record.canvas.width.into());
    cfg.insert("height".into(), record.canvas.height.into());
    cfg.insert("seed".into(), record.canvas.seed.into());
    if let Some(color) = record.canvas.background {
        cfg.insert("background".into(), color.name().into());
    }
    cfg.insert("request_digest".into(), record.request_digest.clone().into());
    push(cfg, &mut out);

    let mut objects: Vec<&ObjectSpec> = record.objects.iter().collect();
    objects.sort_by(|a, b| a.id.cmp(&b.id));
    for o in objects {
        let mut m = o.extra.clone().into_iter().collect::<Map<_, _>>();
        m.insert("kind".into(), "object".into());
        m.insert("id".into(), o.id.clone().into());
        m.insert("class_label".into(), o.class_label.clone().into());
        m.insert("count".into(), o.count.into());
        if let Some(color) = o.color {
            m.insert("color".into(), color.name().into());
        }
        if let Some(size) = o.size_class {
            m.insert("size_class".into(), size.name().into());
        }
        if let Some(shape) = o.shape_hint {
            m.insert("shape_hint".into(), shape.name().into());
        }
        if let Some((x, y)) = o.explicit_position {
            m.insert("explicit_position".into(), serde_json::json!([x, y]));
        }
        push(m, &mut out);
    }

    let mut texts: Vec<&TextSpec> = record.texts.iter().collect();
    texts.sort_by(|a, b| a.id.cmp(&b.id));
    for t in texts {
        let mut m = t.extra.clone().into_iter().collect::<Map<_, _>>();
        m.insert("kind".into(), "text".into());
        m.insert("id".into(), t.id.clone().into());
        m.insert("content".into(), t.content.clone().into());
        m.insert("size_class".into(), t.size_class.name().into());
        m.insert("alignment".into(), t.alignment.name().into());
        m.insert(
            "region".into(),
            serde_json::json!([t.region.x, t.region.y, t.region.w, t.region.h]),
        );
        m.insert("level".into(), t.level.into());
        push(m, &mut out);
    }

    let mut relations: Vec<&RelationConstraint> = record.relations.iter().collect();
    relations.sort_by(|a, b| {
        (a.kind.name(), &a.subject, &a.object).cmp(&(b.kind.name(), &b.subject, &b.object))
    });
    for r in relations {
        let mut m = r.extra.clone().into_iter().collect::<Map<_, _>>();
        m.insert("kind".into(), "relation".into());
        m.insert("rel".into(), r.kind.name().into());
        m.insert("subject".into(), r.subject.clone().into());
        m.insert("object".into(), r.object.clone().into());
        push(m, &mut out);
    }

    let mut facts: Vec<&KnowledgeFact> = record.facts.iter().collect();
    facts.sort_by(|a, b| {
        (&a.claim, &a.source_uri, &a.retrieved_at).cmp(&(
            &b.claim,
            &b.source_uri,
            &b.retrieved_at,
        ))
    });
    for f in facts {
        let mut m = f.extra.clone().into_iter().collect::<Map<_, _>>();
        m.insert("kind".into(), "fact".into());
        m.insert("claim".into(), f.claim.clone().into());
        m.insert("source_uri".into(), f.source_uri.clone().into());
        m.insert("retrieved_at".into(), f.retrieved_at.clone().into());
        push(m, &mut out);
    }

    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::super::parse_records;
    use super::*;

    const RICH: &str = concat!(
        "{\"kind\":\"config\",\"width\":800,\"height\":600,\"seed\":7,",
        "\"background\":\"white\",\"request_digest\":\"abc123\"}\n",
        "{\"kind\":\"object\",\"id\":\"apple\",\"class_label\":\"apple\",\"count\":3,",
        "\"color\":\"red\",\"size_class\":\"small\",\"shape_hint\":\"ellipse\"}\n",
        "{\"kind\":\"object\",\"id\":\"table\",\"color\":\"brown\",\"size_class\":\"large\",",
        "\"explicit_position\":[0.5,0.75]}\n",
        "{\"kind\":\"text\",\"id\":\"caption\",\"content\":\"Still life\",",
        "\"size_class\":\"caption\",\"alignment\":\"center\",\"region\":[0.25,0.9,0.5,0.08],",
        "\"level\":1}\n",
        "{\"kind\":\"relation\",\"rel\":\"above\",\"subject\":\"apple\",\"object\":\"table\"}\n",
        "{\"kind\":\"fact\",\"claim\":\"apples are red\",\"source_uri\":\"file:///enc\",",
        "\"retrieved_at\":\"2026-01-01T00:00:00Z\"}\n",
    );

    #[test]
    fn round_trip_preserves_record() {
        let record = parse_records(RICH.as_bytes()).unwrap();
        let bytes = canonical_serialize(&record);
        let again = parse_records(&bytes).unwrap();
        assert_eq!(record, again);
    }

    #[test]
    fn serialization_is_idempotent() {
        let record = parse_records(RICH.as_bytes()).unwrap();
        let once = canonical_serialize(&record);
        let twice = canonical_serialize(&parse_records(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn line_order_does_not_matter() {
        let shuffled = concat!(
            "{\"kind\":\"relation\",\"rel\":\"above\",\"subject\":\"apple\",\"object\":\"table\"}\n",
            "{\"kind\":\"object\",\"id\":\"table\",\"color\":\"brown\",\"size_class\":\"large\",",
            "\"explicit_position\":[0.5,0.75]}\n",
            "{\"kind\":\"fact\",\"claim\":\"apples are red\",\"source_uri\":\"file:///enc\",",
            "\"retrieved_at\":\"2026-01-01T00:00:00Z\"}\n",
            "{\"kind\":\"text\",\"id\":\"caption\",\"content\":\"Still life\",",
            "\"size_class\":\"caption\",\"alignment\":\"center\",\"region\":[0.25,0.9,0.5,0.08],",
            "\"level\":1}\n",
            "{\"kind\":\"config\",\"width\":800,\"height\":600,\"seed\":7,",
            "\"background\":\"white\",\"request_digest\":\"abc123\"}\n",
            "{\"kind\":\"object\",\"id\":\"apple\",\"class_label\":\"apple\",\"count\":3,",
            "\"color\":\"red\",\"size_class\":\"small\",\"shape_hint\":\"ellipse\"}\n",
        );
        let a = canonical_serialize(&parse_records(RICH.as_bytes()).unwrap());
        let b = canonical_serialize(&parse_records(shuffled.as_bytes()).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn cjk_content_survives_byte_for_byte() {
        let input = concat!(
            "{\"kind\":\"text\",\"id\":\"t1\",\"content\":\"滕王阁序\",",
            "\"size_class\":\"title\",\"alignment\":\"center\",\"region\":[0.1,0.1,0.8,0.2]}\n",
        );
        let record = parse_records(input.as_bytes()).unwrap();
        assert_eq!(record.texts[0].content, "滕王阁序");
        let expected = concat!(
            "{\"height\":1024,\"kind\":\"config\",\"request_digest\":\"\",\"seed\":0,",
            "\"width\":1024}\n",
            "{\"alignment\":\"center\",\"content\":\"滕王阁序\",\"id\":\"t1\",\"kind\":\"text\",",
            "\"level\":0,\"region\":[0.1,0.1,0.8,0.2],\"size_class\":\"title\"}\n",
        );
        assert_eq!(canonical_serialize(&record), expected.as_bytes());
    }

    #[test]
    fn unknown_fields_round_trip() {
        let input = "{\"kind\":\"object\",\"id\":\"a\",\"mood\":\"ripe\",\"rank\":4}\n";
        let record = parse_records(input.as_bytes()).unwrap();
        let bytes = canonical_serialize(&record);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("\"mood\":\"ripe\""));
        assert!(text.contains("\"rank\":4"));
        assert_eq!(parse_records(&bytes).unwrap(), record);
    }
}

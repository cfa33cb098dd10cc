//! Property tests: serialization round trips, emitter fixed points, and
//! numeric invariants over randomized inputs.

use clawcanvas::canvas::{emit_html_text_layer, emit_svg, extract_text, parse_svg_subset, DocFormat};
use clawcanvas::color::{Color, PALETTE};
use clawcanvas::geom::{Line, Point};
use clawcanvas::physics::{buoyant_fraction, mirror_reflect};
use clawcanvas::scene::parse_records;
use clawcanvas::testkit::{random_ir, random_record, random_text_record};
use proptest::prelude::*;

proptest! {
    /// Canonical serialization is a fixed point of parse∘serialize.
    #[test]
    fn scene_record_round_trips(seed in any::<u64>()) {
        let record = random_record(seed);
        let bytes = record.canonical_bytes();
        let reparsed = parse_records(&bytes).unwrap();
        prop_assert_eq!(&reparsed, &record);
        prop_assert_eq!(reparsed.canonical_bytes(), bytes);
    }

    /// Fields the schema does not know survive a parse/serialize cycle.
    #[test]
    fn unknown_fields_are_preserved(
        key in "x_[a-z]{1,8}",
        value in "[a-zA-Z0-9 ]{0,12}",
    ) {
        let line = format!(
            "{{\"kind\":\"object\",\"id\":\"a\",\"{key}\":\"{value}\"}}\n"
        );
        let record = parse_records(line.as_bytes()).unwrap();
        let bytes = record.canonical_bytes();
        let text = String::from_utf8(bytes).unwrap();
        prop_assert!(
            text.contains(&format!("\"{key}\":\"{value}\"")),
            "lost {key} in {text}"
        );
    }

    /// Emitting, parsing, and emitting again reproduces the exact bytes.
    #[test]
    fn svg_emit_is_a_fixed_point(seed in any::<u64>()) {
        let ir = random_ir(seed);
        let first = emit_svg(&ir);
        let second = emit_svg(&parse_svg_subset(&first).unwrap());
        prop_assert_eq!(first, second);
    }

    /// The HTML text layer never alters content, whatever the script.
    #[test]
    fn html_text_extraction_is_lossless(seed in any::<u64>()) {
        let record = random_text_record(seed);
        let html = emit_html_text_layer(&record).unwrap();
        let extracted = extract_text(&html, DocFormat::Html).unwrap();
        let expected: Vec<String> =
            record.texts.iter().map(|t| t.content.clone()).collect();
        prop_assert_eq!(extracted, expected);
    }

    #[test]
    fn palette_hex_round_trips(index in 0usize..10) {
        let color = PALETTE[index];
        prop_assert_eq!(Color::from_hex(&color.hex()), Some(color));
    }

    #[test]
    fn reflection_is_an_involution(
        px in -100.0f64..100.0, py in -100.0f64..100.0,
        ox in -50.0f64..50.0, oy in -50.0f64..50.0,
        dx in -2.0f64..2.0, dy in -2.0f64..2.0,
    ) {
        prop_assume!(dx.abs() + dy.abs() > 0.1);
        let line = Line { point: Point { x: ox, y: oy }, direction: Point { x: dx, y: dy } };
        let p = Point { x: px, y: py };
        let back = mirror_reflect(mirror_reflect(p, &line).unwrap(), &line).unwrap();
        prop_assert!((back.x - p.x).abs() <= 1e-9 && (back.y - p.y).abs() <= 1e-9);
    }

    #[test]
    fn buoyant_fraction_stays_physical(
        rho_o in 1e-3f64..5e3, rho_f in 1e-3f64..5e3,
    ) {
        let (fraction, floats) = buoyant_fraction(rho_o, rho_f).unwrap();
        prop_assert!((0.0..=1.0).contains(&fraction));
        prop_assert_eq!(floats, rho_o <= rho_f);
    }
}

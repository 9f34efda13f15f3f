//! SVG route plots: depots in red, task vertices in green, the walk as a
//! polyline with leg-order labels. Output is deterministic for a fixed
//! input.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::walk::Walk;

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;

/// Render an instance (and optionally a walk over it) as an SVG document.
pub fn render_svg(instance: &Instance, walk: Option<&Walk>) -> Result<String> {
    let coords = instance
        .coords()
        .ok_or_else(|| Error::Invalid("instance has no coordinates to plot".into()))?;
    if let Some(w) = walk {
        for step in w.steps() {
            if step.node >= instance.n_total() {
                return Err(Error::UnknownNode(step.node));
            }
        }
    }

    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in coords {
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let scale = (CANVAS - 2.0 * MARGIN) / span_x.max(span_y);
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN + (x - min_x) * scale,
            // SVG y grows downward.
            CANVAS - MARGIN - (y - min_y) * scale,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS}\" height=\"{CANVAS}\" viewBox=\"0 0 {CANVAS} {CANVAS}\">"
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{CANVAS}\" height=\"{CANVAS}\" fill=\"white\"/>"
    );
    let _ = writeln!(svg, "  <!-- {} -->", instance.name);

    if let Some(w) = walk {
        if w.steps().len() >= 2 {
            let points: Vec<String> = w
                .steps()
                .iter()
                .map(|s| {
                    let (x, y) = coords[s.node];
                    let (px, py) = to_px(x, y);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            let _ = writeln!(
                svg,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"#3465a4\" stroke-width=\"1.5\"/>",
                points.join(" ")
            );
            let steps = w.steps();
            for (i, pair) in steps.windows(2).enumerate() {
                let (x1, y1) = coords[pair[0].node];
                let (x2, y2) = coords[pair[1].node];
                let (px1, py1) = to_px(x1, y1);
                let (px2, py2) = to_px(x2, y2);
                let (mx, my) = ((px1 + px2) / 2.0, (py1 + py2) / 2.0);
                let _ = writeln!(
                    svg,
                    "  <text x=\"{mx:.2}\" y=\"{my:.2}\" font-size=\"8\" fill=\"#777777\">{}</text>",
                    i + 1
                );
            }
        }
    }

    for &v in instance.tasks() {
        let (x, y) = coords[v];
        let (px, py) = to_px(x, y);
        let _ = writeln!(
            svg,
            "  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"#2e9b2e\"/>"
        );
    }
    for &q in instance.depots() {
        let (x, y) = coords[q];
        let (px, py) = to_px(x, y);
        let _ = writeln!(
            svg,
            "  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"6\" fill=\"#d0342c\"/>"
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_from_points, DepotSelection, WeightMode};
    use crate::walk::Walk;

    fn demo_instance() -> Instance {
        build_from_points(
            "demo",
            &[(0.0, 0.0), (10.0, 0.0), (5.0, 5.0)],
            &DepotSelection::Explicit(vec![1]),
            30.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap()
    }

    #[test]
    fn renders_depots_and_vertices_without_walk() {
        let inst = demo_instance();
        let svg = render_svg(&inst, None).unwrap();
        assert!(svg.contains("#d0342c"));
        assert!(svg.contains("#2e9b2e"));
        assert!(!svg.contains("polyline"));
    }

    #[test]
    fn renders_walk_polyline_with_leg_labels() {
        let inst = demo_instance();
        let walk = Walk::from_nodes(&inst, vec![0, 1, 2, 0]);
        let svg = render_svg(&inst, Some(&walk)).unwrap();
        assert!(svg.contains("polyline"));
        assert!(svg.contains(">1</text>"));
        assert!(svg.contains(">3</text>"));
    }

    #[test]
    fn output_is_deterministic() {
        let inst = demo_instance();
        let walk = Walk::from_nodes(&inst, vec![0, 2, 0, 1, 0]);
        let a = render_svg(&inst, Some(&walk)).unwrap();
        let b = render_svg(&inst, Some(&walk)).unwrap();
        assert_eq!(a, b);
    }
}

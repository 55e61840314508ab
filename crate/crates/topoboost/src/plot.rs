//! Persistence diagram plots as standalone SVG documents.
//!
//! Text-based output keeps plots diffable in tests. Finite pairs get one
//! marker per point above the y = x diagonal; essential classes are drawn
//! as capped markers at the top edge and annotated as infinite.

use crate::ph::PersistenceDiagram;

/// Plot geometry. `axis_max` fixes the data range; when None the range
/// covers all plotted points with 10% headroom.
#[derive(Clone, Copy, Debug)]
pub struct PlotSpec {
    pub width: usize,
    pub height: usize,
    pub axis_max: Option<f64>,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec { width: 480, height: 480, axis_max: None }
    }
}

const MARGIN: f64 = 48.0;
const DIM_COLORS: [&str; 2] = ["#1f77b4", "#ff7f0e"];

fn dim_color(dim: usize) -> &'static str {
    DIM_COLORS[dim % DIM_COLORS.len()]
}

/// Render diagrams into one SVG scatter with diagonal and legend.
pub fn emit_persistence_svg(diags: &[PersistenceDiagram], spec: &PlotSpec) -> String {
    assert!(spec.width > 0 && spec.height > 0);
    let data_max = spec.axis_max.unwrap_or_else(|| {
        let mut m = 0.0f64;
        for d in diags {
            for p in &d.pairs {
                m = m.max(p.birth);
                if p.death.is_finite() {
                    m = m.max(p.death);
                }
            }
        }
        if m == 0.0 {
            1.0
        } else {
            m * 1.1
        }
    });
    let w = spec.width as f64;
    let h = spec.height as f64;
    let plot_w = w - 2.0 * MARGIN;
    let plot_h = h - 2.0 * MARGIN;
    let to_x = |v: f64| MARGIN + v / data_max * plot_w;
    let to_y = |v: f64| h - MARGIN - v / data_max * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        spec.width, spec.height, spec.width, spec.height
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        spec.width, spec.height
    ));
    // axes
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        to_x(0.0), to_y(0.0), to_x(data_max), to_y(0.0)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        to_x(0.0), to_y(0.0), to_x(0.0), to_y(data_max)
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">birth</text>\n",
        to_x(data_max / 2.0), h - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"12\" y=\"{:.2}\" font-size=\"12\" transform=\"rotate(-90 12 {:.2})\">death</text>\n",
        to_y(data_max / 2.0), to_y(data_max / 2.0)
    ));
    // diagonal y = x
    svg.push_str(&format!(
        "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n",
        to_x(0.0), to_y(0.0), to_x(data_max), to_y(data_max)
    ));

    for d in diags {
        let color = dim_color(d.dim);
        for p in &d.pairs {
            if p.death.is_finite() {
                svg.push_str(&format!(
                    "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{}\" fill-opacity=\"0.8\"/>\n",
                    to_x(p.birth), to_y(p.death), color
                ));
            } else {
                // essential class: capped at the top edge
                svg.push_str(&format!(
                    "  <path d=\"M {:.2} {:.2} l -5 9 l 10 0 z\" fill=\"{}\"><title>H{} ({}, inf)</title></path>\n",
                    to_x(p.birth), to_y(data_max), color, d.dim, p.birth
                ));
            }
        }
    }

    // legend
    for (i, d) in diags.iter().enumerate() {
        let y = MARGIN + 18.0 * i as f64;
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"5\" fill=\"{}\"/>\n",
            w - MARGIN - 56.0, y, dim_color(d.dim)
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">H{}</text>\n",
            w - MARGIN - 44.0, y + 4.0, d.dim
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ph::PersistencePair;

    fn h0(pairs: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram {
            dim: 0,
            pairs: pairs
                .iter()
                .map(|&(birth, death)| PersistencePair { dim: 0, birth, death })
                .collect(),
        }
    }

    #[test]
    fn empty_diagrams_still_draw_diagonal_and_legend() {
        let svg = emit_persistence_svg(&[h0(&[])], &PlotSpec::default());
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains(">H0</text>"));
        // no data markers, only the legend dot
        assert!(!svg.contains("r=\"4\""));
    }

    #[test]
    fn one_finite_pair_one_marker() {
        let svg = emit_persistence_svg(&[h0(&[(0.0, 5.0)])], &PlotSpec::default());
        assert_eq!(svg.matches("r=\"4\"").count(), 1);
    }

    #[test]
    fn essential_pairs_are_annotated() {
        let svg = emit_persistence_svg(&[h0(&[(0.0, f64::INFINITY)])], &PlotSpec::default());
        assert!(svg.contains("inf"));
    }

    #[test]
    fn output_is_byte_stable() {
        let diags = [h0(&[(0.0, 2.0), (0.5, f64::INFINITY)])];
        let a = emit_persistence_svg(&diags, &PlotSpec::default());
        let b = emit_persistence_svg(&diags, &PlotSpec::default());
        assert_eq!(a, b);
    }
}

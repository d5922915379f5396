//! Static SVG biplots: one point cloud per mode, overlaid, with equal aspect
//! and axes symmetric about the origin.

use std::fmt::Write;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 48.0;
const PADDING: f64 = 0.05;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One mode's cloud in the plotted plane.
#[derive(Clone, Debug)]
pub struct Cloud {
    pub name: String,
    pub labels: Vec<String>,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn glyph(out: &mut String, kind: usize, x: f64, y: f64, color: &str) {
    let r = 4.5;
    let _ = match kind % 5 {
        0 => writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{color}"/>"#),
        1 => writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}"/>"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        2 => writeln!(
            out,
            r#"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="{color}"/>"#,
            x,
            y - r,
            x - r,
            y + r,
            x + r,
            y + r
        ),
        3 => writeln!(
            out,
            r#"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="{color}"/>"#,
            x,
            y - r,
            x + r,
            y,
            x,
            y + r,
            x - r,
            y
        ),
        _ => writeln!(
            out,
            r#"<path d="M{:.3},{:.3}L{:.3},{:.3}M{:.3},{:.3}L{:.3},{:.3}" stroke="{color}" stroke-width="2"/>"#,
            x - r,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r,
            x + r,
            y - r
        ),
    };
}

/// Half-width of the plotted square: the largest coordinate magnitude plus
/// 5% padding.
pub fn extent(clouds: &[Cloud]) -> f64 {
    let m = clouds
        .iter()
        .flat_map(|c| c.points.iter())
        .fold(0.0f64, |m, &(x, y)| m.max(x.abs()).max(y.abs()));
    if m > 0.0 {
        m * (1.0 + PADDING)
    } else {
        1.0
    }
}

pub fn biplot_svg(clouds: &[Cloud], x_title: &str, y_title: &str) -> String {
    let half = extent(clouds);
    let inner = SIZE - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x + half) / (2.0 * half) * inner;
    let sy = |y: f64| MARGIN + (half - y) / (2.0 * half) * inner;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="#999"/>"##
    );
    let (ox, oy) = (sx(0.0), sy(0.0));
    let _ = writeln!(
        out,
        r##"<line x1="{MARGIN}" y1="{oy:.3}" x2="{:.3}" y2="{oy:.3}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
        SIZE - MARGIN
    );
    let _ = writeln!(
        out,
        r##"<line x1="{ox:.3}" y1="{MARGIN}" x2="{ox:.3}" y2="{:.3}" stroke="#bbb" stroke-dasharray="4 3"/>"##,
        SIZE - MARGIN
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        SIZE - 14.0,
        escape(x_title)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.3}" text-anchor="middle" transform="rotate(-90 14 {:.3})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y_title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="end">±{:.4}</text>"#,
        SIZE - MARGIN,
        MARGIN - 6.0,
        half
    );
    for (k, cloud) in clouds.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(out, r#"<g class="mode" id="mode-{}">"#, escape(&cloud.name));
        for (label, &(x, y)) in cloud.labels.iter().zip(&cloud.points) {
            let (px, py) = (sx(x), sy(y));
            glyph(&mut out, k, px, py, color);
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" fill="{color}">{}</text>"#,
                px + 6.0,
                py - 6.0,
                escape(label)
            );
        }
        let _ = writeln!(out, "</g>");
        // legend
        let ly = MARGIN + 14.0 + 16.0 * k as f64;
        glyph(&mut out, k, MARGIN + 12.0, ly - 4.0, color);
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{ly:.3}">{}</text>"#,
            MARGIN + 22.0,
            escape(&cloud.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud() -> Vec<Cloud> {
        vec![
            Cloud {
                name: "a".into(),
                labels: vec!["x<1".into(), "y".into()],
                points: vec![(1.0, -2.0), (0.5, 0.5)],
            },
            Cloud {
                name: "b".into(),
                labels: vec!["z".into()],
                points: vec![(-0.25, 0.0)],
            },
        ]
    }

    #[test]
    fn extent_is_symmetric_with_padding() {
        assert!((extent(&cloud()) - 2.1).abs() < 1e-15);
        assert_eq!(extent(&[]), 1.0);
    }

    #[test]
    fn svg_structure() {
        let svg = biplot_svg(&cloud(), "comp 2", "comp 3");
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches(r#"class="mode""#).count(), 2);
        assert!(svg.contains("x&lt;1"));
        assert_eq!(svg, biplot_svg(&cloud(), "comp 2", "comp 3"));
        // origin sits at the centre
        assert!(svg.contains(r#"y1="320.000""#));
    }
}

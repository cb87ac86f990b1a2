//! Log-log scatter plots as plain SVG 1.1 text.

use std::fmt::Write;

use shapelab_core::experiments::slope_fit;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Log-log scatter of each series with its least-squares line, plus dashed
/// guide lines of the given slopes through the centre of the first series.
///
/// Points with a nonpositive coordinate cannot be drawn and are skipped.
/// Labels are optional; missing ones are simply not drawn. The output only
/// depends on the input, byte for byte.
pub fn emit_svg(series: &[Vec<(f64, f64)>], labels: &[String], reference_slopes: &[f64]) -> String {
    let logs: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect()
        })
        .collect();
    let all: Vec<(f64, f64)> = logs.iter().flatten().copied().collect();
    let bounds = |f: fn(&(f64, f64)) -> f64| {
        let lo = all.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            let pad = 0.05 * (hi - lo);
            (lo - pad, hi + pad)
        }
    };
    let (x0, x1) = bounds(|p| p.0);
    let (y0, y1) = bounds(|p| p.1);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    // decade ticks
    for e in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let x = px(e as f64);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/><text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">1e{e}</text>",
            HEIGHT - MARGIN,
            HEIGHT - MARGIN + 5.0,
            HEIGHT - MARGIN + 20.0
        );
    }
    for e in (y0.ceil() as i64)..=(y1.floor() as i64) {
        let y = py(e as f64);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{MARGIN}\" y2=\"{y:.2}\" stroke=\"black\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">1e{e}</text>",
            MARGIN - 5.0,
            MARGIN - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        "<defs><clipPath id=\"plot\"><rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\"/></clipPath></defs>",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(s, "<g clip-path=\"url(#plot)\">");
    let segment = |s: &mut String, slope: f64, intercept: f64, style: &str| {
        let (ya, yb) = (intercept + slope * x0, intercept + slope * x1);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" {style}/>",
            px(x0),
            py(ya),
            px(x1),
            py(yb)
        );
    };
    for (i, pts) in logs.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        for &(x, y) in pts {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                px(x),
                py(y)
            );
        }
        let raw: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(x, y)| (10f64.powf(x), 10f64.powf(y)))
            .collect();
        if let Ok(fit) = slope_fit(&raw) {
            segment(
                &mut s,
                fit.slope,
                fit.intercept / std::f64::consts::LN_10,
                &format!("stroke=\"{color}\""),
            );
        }
    }
    if let Some(first) = logs.first().filter(|p| !p.is_empty()) {
        let n = first.len() as f64;
        let cx = first.iter().map(|p| p.0).sum::<f64>() / n;
        let cy = first.iter().map(|p| p.1).sum::<f64>() / n;
        for &slope in reference_slopes {
            segment(
                &mut s,
                slope,
                cy - slope * cx,
                "stroke=\"gray\" stroke-dasharray=\"6,4\"",
            );
        }
    }
    let _ = writeln!(s, "</g>");
    if logs.first().is_some_and(|p| !p.is_empty()) {
        for (j, slope) in reference_slopes.iter().enumerate() {
            let _ = writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"gray\">slope {slope}</text>",
                WIDTH - MARGIN - 90.0,
                MARGIN + 16.0 * (labels.len().min(logs.len()) + j + 1) as f64
            );
        }
    }
    for (i, label) in labels.iter().take(logs.len()).enumerate() {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{}\">{}</text>",
            WIDTH - MARGIN - 90.0,
            MARGIN + 16.0 * (i + 1) as f64,
            COLORS[i % COLORS.len()],
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_law() -> Vec<(f64, f64)> {
        (1..=6).map(|i| (i as f64, (i as f64).sqrt())).collect()
    }

    #[test]
    fn single_series_with_guide() {
        let svg = emit_svg(&[power_law()], &["F".into()], &[0.5]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("slope 0.5"));
        assert_eq!(svg.matches("<circle").count(), 6);
    }

    #[test]
    fn labels_are_optional() {
        let svg = emit_svg(&[power_law()], &[], &[]);
        assert!(svg.starts_with("<svg"));
        assert!(!svg.contains("fill=\"#1f77b4\">"));
    }

    #[test]
    fn deterministic_bytes() {
        let a = emit_svg(
            &[power_law(), vec![(2.0, 3.0)]],
            &["a".into(), "<b>".into()],
            &[1.0, -2.0],
        );
        let b = emit_svg(
            &[power_law(), vec![(2.0, 3.0)]],
            &["a".into(), "<b>".into()],
            &[1.0, -2.0],
        );
        assert_eq!(a, b);
        assert!(a.contains("&lt;b&gt;"));
    }
}

//! Minimal deterministic SVG line plots: polylines, axes with ticks, and a
//! legend. No timestamps, no randomness; identical inputs give identical
//! bytes.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 76.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 58.0;
const PALETTE: [&str; 6] = [
    "#1a6fb5", "#c23b22", "#2e8540", "#7a51a1", "#b07f00", "#5a5a5a",
];

/// One curve: points in data coordinates, drawn solid or dotted.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dotted: bool,
}

fn nice_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.3e}", x).parse().unwrap_or(x);
    format!("{rounded}")
}

/// Render a line plot of the given series.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (0.0f64, f64::NEG_INFINITY);
    for s in series {
        for &(x, y) in &s.points {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    if !x_lo.is_finite() || x_lo == x_hi {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    if !y_hi.is_finite() || y_lo == y_hi {
        y_hi = y_lo + 1.0;
    }
    y_hi += 0.05 * (y_hi - y_lo);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = move |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = move |y: f64| MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // axes
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{:.3}" y2="{y0:.3}" stroke="black"/>"#,
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{MARGIN_TOP:.3}" stroke="black"/>"#
    );

    // ticks
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = x_lo + t * (x_hi - x_lo);
        let xp = sx(xv);
        let _ = writeln!(
            out,
            r#"<line x1="{xp:.3}" y1="{y0:.3}" x2="{xp:.3}" y2="{:.3}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{xp:.3}" y="{:.3}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            y0 + 18.0,
            nice_number(xv)
        );
        let yv = y_lo + t * (y_hi - y_lo);
        let yp = sy(yv);
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{yp:.3}" x2="{x0:.3}" y2="{yp:.3}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            x0 - 8.0,
            yp + 4.0,
            nice_number(yv)
        );
    }

    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.3}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 20 {:.3})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(y_label)
    );

    // curves
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let dash = if s.dotted {
            r#" stroke-dasharray="5 4""#
        } else {
            ""
        };
        let mut path = String::new();
        for (j, &(x, y)) in s.points.iter().enumerate() {
            let cmd = if j == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.3},{:.3}", sx(x), sy(y));
        }
        let _ = writeln!(
            out,
            r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>"#
        );
    }

    // legend, top right
    let lx = MARGIN_LEFT + plot_w - 170.0;
    let mut ly = MARGIN_TOP + 10.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if s.dotted {
            r#" stroke-dasharray="5 4""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.3}" y1="{ly:.3}" x2="{:.3}" y2="{ly:.3}" stroke="{color}" stroke-width="1.6"{dash}/>"#,
            lx + 28.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 34.0,
            ly + 4.0,
            escape(&s.label)
        );
        ly += 18.0;
    }

    out.push_str("</svg>\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

//! Minimal SVG line plots and heatmaps.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 360.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Line plot of several series sharing the x axis. NaN samples break the
/// line.
pub fn line_plot(title: &str, x_label: &str, x: &[f64], series: &[(&str, &[f64])]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (x0, x1) = finite_range(x.iter().copied());
    let (y0, y1) = finite_range(series.iter().flat_map(|s| s.1.iter().copied()));
    let (pw, ph) = (W - 2.0 * MARGIN, H - 2.0 * MARGIN);
    let sx = |v: f64| MARGIN + (v - x0) / (x1 - x0) * pw;
    let sy = |v: f64| H - MARGIN - (v - y0) / (y1 - y0) * ph;
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );
    for (v, anchor_y) in [(y0, H - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            anchor_y + 4.0,
            fmt_tick(v)
        );
    }
    for (v, anchor_x) in [(x0, MARGIN), (x1, W - MARGIN)] {
        let _ = writeln!(
            out,
            r#"<text x="{anchor_x}" y="{}" text-anchor="middle">{}</text>"#,
            H - MARGIN + 16.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 12.0,
        escape(x_label)
    );
    for (i, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for (xv, yv) in x.iter().zip(ys.iter()) {
            if !xv.is_finite() || !yv.is_finite() {
                pen_down = false;
                continue;
            }
            let _ = write!(
                d,
                "{}{:.2},{:.2} ",
                if pen_down { "L" } else { "M" },
                sx(*xv),
                sy(*yv)
            );
            pen_down = true;
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
            d.trim_end()
        );
        let ly = MARGIN + 14.0 * (i as f64 + 1.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
            MARGIN + 8.0,
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Heatmap of `values[i][j]` over `xs[i]` (horizontal) and `ys[j]`
/// (vertical). Non-finite cells are drawn grey.
pub fn heatmap(title: &str, xs: &[f64], ys: &[f64], values: &[Vec<f64>]) -> String {
    let mut out = String::new();
    header(&mut out, title);
    let (lo, hi) = finite_range(values.iter().flatten().copied());
    let (pw, ph) = (W - 2.0 * MARGIN - 60.0, H - 2.0 * MARGIN);
    let (cw, ch) = (pw / xs.len() as f64, ph / ys.len() as f64);
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let fill = if v.is_finite() {
                ramp((v - lo) / (hi - lo))
            } else {
                "#999999".to_string()
            };
            let x = MARGIN + i as f64 * cw;
            let y = H - MARGIN - (j as f64 + 1.0) * ch;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{fill}"><title>{} {} {}</title></rect>"#,
                cw + 0.3,
                ch + 0.3,
                xs[i],
                ys[j],
                v
            );
        }
    }
    for (i, x) in xs.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN + (i as f64 + 0.5) * cw,
            H - MARGIN + 14.0,
            x
        );
    }
    for (j, y) in ys.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            H - MARGIN - (j as f64 + 0.5) * ch + 4.0,
            y
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">lambda11</text>"#,
        MARGIN + pw / 2.0,
        H - 14.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">lambda22</text>"#,
        H / 2.0,
        H / 2.0
    );
    let bx = W - MARGIN - 30.0;
    for k in 0..50 {
        let f = k as f64 / 49.0;
        let y = H - MARGIN - (k as f64 + 1.0) * ph / 50.0;
        let _ = writeln!(
            out,
            r#"<rect x="{bx}" y="{y:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            ph / 50.0 + 0.3,
            ramp(f)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        bx + 18.0,
        H - MARGIN,
        fmt_tick(lo)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}">{}</text>"#,
        bx + 18.0,
        MARGIN + 8.0,
        fmt_tick(hi)
    );
    out.push_str("</svg>\n");
    out
}

/// Blue to yellow colour ramp for `f` in `[0, 1]`.
fn ramp(f: f64) -> String {
    let f = if f.is_finite() {
        f.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let stops = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let pos = f * (stops.len() - 1) as f64;
    let i = (pos.floor() as usize).min(stops.len() - 2);
    let t = pos - i as f64;
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    let (a, b) = (stops[i], stops[i + 1]);
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_breaks_on_nan() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let s = line_plot("t", "time", &x, &[("y", &[0.0, 1.0, f64::NAN, 2.0])]);
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches('M').count(), 2);
        assert!(s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn heatmap_cells() {
        let s = heatmap("J", &[0.1, 0.2], &[0.3], &[vec![1.0], vec![f64::INFINITY]]);
        assert_eq!(s.matches("<title>").count(), 2);
        assert!(s.contains("#999999"));
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp(0.0), "#440154");
        assert_eq!(ramp(1.0), "#fde725");
    }
}

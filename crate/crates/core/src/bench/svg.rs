use std::fmt::Write;

use super::SweepRecord;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 320.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22",
];

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && *v > 0.0) {
            lo = lo.min(v.log10());
            hi = hi.max(v.log10());
        }
        if !lo.is_finite() {
            return Axis { lo: 0.0, hi: 1.0 };
        }
        Axis { lo: lo.floor(), hi: hi.ceil().max(lo.floor() + 1.0) }
    }

    fn frac(&self, v: f64) -> f64 {
        (v.log10() - self.lo) / (self.hi - self.lo)
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Error against step size (left) and against stepping time (right), on
/// log-log axes. Lines break at unstable points.
pub fn render_svg(records: &[SweepRecord], title: &str) -> String {
    let mut schemes: Vec<&str> = Vec::new();
    for r in records {
        if !schemes.contains(&r.scheme.as_str()) {
            schemes.push(&r.scheme);
        }
    }
    let width = 2.0 * (PANEL_W + MARGIN) + 160.0;
    let height = PANEL_H + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, width / 2.0, esc(title));

    let ey = Axis::fit(records.iter().filter_map(|r| r.error));
    let panels: [(&str, Box<dyn Fn(&SweepRecord) -> f64>); 2] = [
        ("step size h", Box::new(|r: &SweepRecord| r.h)),
        ("stepping time (s)", Box::new(|r: &SweepRecord| r.seconds)),
    ];
    for (p, (xlabel, xof)) in panels.iter().enumerate() {
        let ox = MARGIN + p as f64 * (PANEL_W + MARGIN);
        let oy = MARGIN;
        let ex = Axis::fit(records.iter().filter(|r| r.stable).map(|r| xof(r)));
        let px = |v: f64| ox + ex.frac(v) * PANEL_W;
        let py = |v: f64| oy + (1.0 - ey.frac(v)) * PANEL_H;
        let _ = writeln!(
            s,
            r#"<rect x="{ox}" y="{oy}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="black"/>"#
        );
        for d in ex.lo as i32..=ex.hi as i32 {
            let x = px(10f64.powi(d));
            let _ = writeln!(
                s,
                r##"<line x1="{x}" y1="{oy}" x2="{x}" y2="{}" stroke="#ddd"/><text x="{x}" y="{}" text-anchor="middle">1e{d}</text>"##,
                oy + PANEL_H,
                oy + PANEL_H + 15.0
            );
        }
        for d in ey.lo as i32..=ey.hi as i32 {
            let y = py(10f64.powi(d));
            let _ = writeln!(
                s,
                r##"<line x1="{ox}" y1="{y}" x2="{}" y2="{y}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end">1e{d}</text>"##,
                ox + PANEL_W,
                ox - 4.0,
                y + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
            ox + PANEL_W / 2.0,
            oy + PANEL_H + 35.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">relative L2 error</text>"#,
            ox - 45.0,
            oy + PANEL_H / 2.0,
            ox - 45.0,
            oy + PANEL_H / 2.0
        );

        for (k, name) in schemes.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let mut rows: Vec<&SweepRecord> = records.iter().filter(|r| r.scheme == *name).collect();
            if p == 0 {
                rows.sort_by(|a, b| b.h.total_cmp(&a.h));
            }
            let mut segment: Vec<(f64, f64)> = Vec::new();
            let mut segments = Vec::new();
            for r in rows {
                match r.error.filter(|e| r.stable && *e > 0.0 && e.is_finite()) {
                    Some(e) if xof(r) > 0.0 => segment.push((px(xof(r)), py(e))),
                    _ => segments.push(std::mem::take(&mut segment)),
                }
            }
            segments.push(segment);
            for seg in segments.iter().filter(|s| !s.is_empty()) {
                let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    pts.join(" ")
                );
                for (x, y) in seg {
                    let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.5" fill="{color}"/>"#);
                }
            }
        }
    }
    let lx = 2.0 * (PANEL_W + MARGIN) + 10.0;
    for (k, name) in schemes.iter().enumerate() {
        let y = MARGIN + 10.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            COLORS[k % COLORS.len()],
            lx + 25.0,
            y + 4.0,
            esc(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

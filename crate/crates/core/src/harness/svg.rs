//! Line chart of `log10(error)` against `n`.

use std::fmt::Write as _;

use super::study::StudyReport;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 70.0;
const FLOOR: f64 = 1e-16;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polyline per `(arch_id, family)` series in first-appearance order.
pub fn render_svg(report: &StudyReport, title: &str) -> String {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in &report.rows {
        let k = (r.arch_id.clone(), r.family.clone());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let pts: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.n as f64, r.sup_error.max(FLOOR).log10())).collect();
    let (mut x0, mut x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (mut y0, mut y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, -1.0, 0.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    y0 = y0.floor();
    y1 = y1.ceil();
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="18">{}</text>"#, WIDTH / 2.0, escape(title));
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>"#);
    let mut e = y0 as i64;
    while e as f64 <= y1 {
        let y = sy(e as f64);
        let _ = writeln!(s, r#"<line x1="{left}" y1="{y}" x2="{right}" y2="{y}" stroke="lightgray"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="12">1e{e}</text>"#, left - 6.0, y + 4.0);
        e += 1;
    }
    let mut ns: Vec<usize> = report.rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    for n in ns {
        let x = sx(n as f64);
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{n}</text>"#, bottom + 18.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">n</text>"#, WIDTH / 2.0, HEIGHT - 20.0);
    let _ = writeln!(s, r#"<text x="20" y="{}" transform="rotate(-90 20 {})" text-anchor="middle" font-family="sans-serif" font-size="14">sup error (log10)</text>"#, HEIGHT / 2.0, HEIGHT / 2.0);

    for (i, (arch, fam)) in keys.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let line: Vec<String> = report
            .rows
            .iter()
            .filter(|r| &r.arch_id == arch && &r.family == fam)
            .map(|r| format!("{:.2},{:.2}", sx(r.n as f64), sy(r.sup_error.max(FLOOR).log10())))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, line.join(" "));
        for p in &line {
            let (x, y) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
        }
        let ly = top + 18.0 * i as f64;
        let _ = writeln!(s, r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="12" fill="{color}">{} / {}</text>"#, right - 220.0, escape(arch), escape(fam));
    }
    s.push_str("</svg>\n");
    s
}

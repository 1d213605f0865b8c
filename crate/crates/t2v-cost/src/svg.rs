//! Minimal SVG charts: stacked areas per operator for sweeps and a log-scale
//! bar chart for model comparisons.

use std::fmt::Write;

use t2v_cost_core::{ComparisonReport, Operator, SweepAxis, SweepPoint};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

fn color(op: Operator) -> &'static str {
    match op {
        Operator::Text => "#8c564b",
        Operator::VaeConv => "#9467bd",
        Operator::VaeMidAttn => "#e377c2",
        Operator::SelfAttn => "#1f77b4",
        Operator::CrossAttn => "#ff7f0e",
        Operator::Mlp => "#2ca02c",
        Operator::Timestep => "#d62728",
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<path d="M{MARGIN} {MARGIN} V{y} H{x}" stroke="black" fill="none"/>"#,
        y = HEIGHT - MARGIN,
        x = WIDTH - MARGIN
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Stacked latency per operator along the sweep axis.
pub fn stacked_sweep(axis: SweepAxis, points: &[SweepPoint]) -> String {
    let mut out = String::new();
    header(
        &mut out,
        &format!("Predicted latency by operator vs {}", axis.as_str()),
    );
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let max_latency = points
        .iter()
        .map(|p| p.estimate.latency_s)
        .fold(0.0, f64::max);
    if points.is_empty() || max_latency <= 0.0 {
        out.push_str("</svg>\n");
        return out;
    }
    let x = |i: usize| {
        if points.len() == 1 {
            MARGIN + plot_w / 2.0
        } else {
            MARGIN + plot_w * i as f64 / (points.len() - 1) as f64
        }
    };
    let y = |v: f64| HEIGHT - MARGIN - plot_h * v / max_latency;

    let mut lower = vec![0.0; points.len()];
    for op in Operator::ALL {
        let upper: Vec<f64> = points
            .iter()
            .zip(&lower)
            .map(|(p, base)| base + p.estimate.operator_latency_s[&op])
            .collect();
        let mut d = String::new();
        for (i, v) in upper.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2} {:.2} ",
                if i == 0 { "M" } else { "L" },
                x(i),
                y(*v)
            );
        }
        for (i, v) in lower.iter().enumerate().rev() {
            let _ = write!(d, "L{:.2} {:.2} ", x(i), y(*v));
        }
        let _ = writeln!(
            out,
            r#"<path d="{}Z" fill="{}" fill-opacity="0.85"><title>{}</title></path>"#,
            d,
            color(op),
            op
        );
        lower = upper;
    }
    for (i, p) in points.iter().enumerate() {
        if points.len() <= 12 || i % (points.len() / 10).max(1) == 0 {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{}</text>"#,
                x(i),
                HEIGHT - MARGIN + 16.0,
                p.value
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10">{:.1} s</text>"#,
        4.0, MARGIN, max_latency
    );
    for (k, op) in Operator::ALL.iter().enumerate() {
        let ly = MARGIN + 14.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{}" font-family="sans-serif" font-size="10">{}</text>"#,
            MARGIN + 10.0,
            ly,
            color(*op),
            MARGIN + 24.0,
            ly + 9.0,
            op
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Total energy per model on a log10 axis.
pub fn comparison_bars(report: &ComparisonReport) -> String {
    let mut out = String::new();
    header(&mut out, "Energy per video (Wh, log scale)");
    let values: Vec<f64> = report
        .rows
        .iter()
        .map(|r| r.total_wh)
        .filter(|v| *v > 0.0)
        .collect();
    if values.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let lo = values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .log10()
        .floor();
    let hi = values
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .log10()
        .ceil()
        .max(lo + 1.0);
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let slot = plot_w / report.rows.len() as f64;
    for (i, row) in report.rows.iter().enumerate() {
        let frac = if row.total_wh > 0.0 {
            (row.total_wh.log10() - lo) / (hi - lo)
        } else {
            0.0
        };
        let h = plot_h * frac;
        let x = MARGIN + slot * i as f64 + slot * 0.15;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#1f77b4"><title>{}: {} Wh</title></rect>"##,
            x,
            HEIGHT - MARGIN - h,
            slot * 0.7,
            h,
            escape(&row.model_id),
            row.total_wh
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="9">{}</text>"#,
            x + slot * 0.35,
            HEIGHT - MARGIN + 14.0,
            escape(&row.model_id)
        );
    }
    let decades = (hi - lo) as i32;
    for k in 0..=decades {
        let yy = HEIGHT - MARGIN - plot_h * f64::from(k) / f64::from(decades);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="10">1e{}</text>"#,
            MARGIN - 4.0,
            yy,
            lo as i32 + k
        );
    }
    out.push_str("</svg>\n");
    out
}

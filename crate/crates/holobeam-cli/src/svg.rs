//! Deterministic SVG line charts for sweep results: one polyline per
//! (policy, power, distance) group with 95% confidence whiskers. No
//! timestamps or random ids, so identical input yields identical bytes.

use holobeam::harness::{CellOutcome, ExperimentResult};

use crate::Metric;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 630.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 470.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct Series {
    label: String,
    /// (n, value, ci) sorted by n
    points: Vec<(f64, f64, f64)>,
}

fn collect_series(result: &ExperimentResult, metric: Metric) -> Vec<Series> {
    let mut groups: Vec<((String, u64, u64), Series)> = Vec::new();
    for (key, outcome) in &result.cells {
        let stats = match outcome {
            CellOutcome::Valid(s) => s,
            CellOutcome::Invalid { .. } => continue,
        };
        let (value, ci) = match metric {
            Metric::Error => (stats.error_rate, stats.error_ci95),
            Metric::Rate => (stats.mean_rate, stats.rate_ci95),
        };
        let id = (
            key.policy.name().to_string(),
            key.power_dbm.to_bits(),
            key.distance_m.to_bits(),
        );
        let entry = groups.iter_mut().find(|(gid, _)| *gid == id);
        let series = match entry {
            Some((_, s)) => s,
            None => {
                groups.push((
                    id,
                    Series {
                        label: format!(
                            "{} P={}dBm d={}m",
                            key.policy.name(),
                            key.power_dbm,
                            key.distance_m
                        ),
                        points: Vec::new(),
                    },
                ));
                &mut groups.last_mut().unwrap().1
            }
        };
        series.points.push((key.n as f64, value, ci));
    }
    let mut series: Vec<Series> = groups.into_iter().map(|(_, s)| s).collect();
    series.sort_by(|a, b| a.label.cmp(&b.label));
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    series
}

/// Evenly spaced round-valued ticks covering [0, max].
fn linear_ticks(max: f64) -> Vec<f64> {
    if max <= 0.0 {
        return vec![0.0, 1.0];
    }
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(mag * 10.0);
    let mut ticks = Vec::new();
    let mut t = 0.0;
    while t <= max * 1.0001 {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (0.001..100_000.0).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.1e}")
    }
}

pub fn render_chart(result: &ExperimentResult, metric: Metric, log_y: bool) -> String {
    let series = collect_series(result, metric);

    let x_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(0.0, f64::max)
        .max(1.0);
    let y_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1 + p.2))
        .fold(0.0, f64::max)
        .max(if log_y { 0.0 } else { 1e-12 });
    let y_min_pos = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);

    // scales
    let x_of = |n: f64| LEFT + (RIGHT - LEFT) * n / x_max;
    let (y_lo, y_hi) = if log_y {
        let lo = if y_min_pos.is_finite() {
            y_min_pos * 0.5
        } else {
            0.1
        };
        (lo.log10(), (y_max.max(lo * 10.0) * 1.2).log10())
    } else {
        (0.0, y_max * 1.05)
    };
    let y_of = move |v: f64| {
        let v = if log_y {
            v.max(10f64.powf(y_lo)).log10()
        } else {
            v
        };
        BOTTOM - (BOTTOM - TOP) * (v - y_lo) / (y_hi - y_lo)
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));

    // x ticks
    for t in linear_ticks(x_max) {
        let x = x_of(t);
        out.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{BOTTOM}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            BOTTOM + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            BOTTOM + 20.0,
            fmt_tick(t)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">pilot budget n</text>\n",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    ));

    // y ticks
    let y_ticks: Vec<f64> = if log_y {
        let lo = y_lo.floor() as i32;
        let hi = y_hi.ceil() as i32;
        (lo..=hi).map(|e| 10f64.powi(e)).collect()
    } else {
        linear_ticks(y_hi)
    };
    for t in y_ticks {
        let y = y_of(t);
        if !(TOP - 1.0..=BOTTOM + 1.0).contains(&y) {
            continue;
        }
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{LEFT}\" y2=\"{y:.2}\" stroke=\"black\"/>\n",
            LEFT - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
            LEFT - 8.0,
            fmt_tick(t)
        ));
    }
    let y_label = match metric {
        Metric::Error => "error probability",
        Metric::Rate => "rate (bit/s/Hz)",
    };
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{y_label}</text>\n",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    ));

    // series
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(n, v, _)| format!("{:.2},{:.2}", x_of(n), y_of(v)))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        for &(n, v, ci) in &s.points {
            let x = x_of(n);
            let (y0, y1) = (y_of((v - ci).max(0.0)), y_of(v + ci));
            out.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{y0:.2}\" x2=\"{x:.2}\" y2=\"{y1:.2}\" stroke=\"{color}\" stroke-width=\"1\"/>\n"
            ));
            out.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                y_of(v)
            ));
        }
        // legend entry
        let ly = TOP + 18.0 * i as f64;
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            RIGHT + 16.0,
            RIGHT + 40.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            RIGHT + 46.0,
            ly + 4.0,
            s.label
        ));
    }

    out.push_str("</svg>\n");
    out
}

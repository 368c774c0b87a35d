//! Standalone SVG bar charts: node-count histograms and grouped error bars.
//!
//! Bars are the only `<rect>` elements; legend markers are circles, so a
//! chart's bar count equals its `<rect` count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Node-count histograms, one series per method.
pub type CountsByMethod = BTreeMap<String, BTreeMap<usize, usize>>;

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn axes(s: &mut String, x_label: &str, y_label: &str, y_max: f64, ticks: usize) {
    let (x0, y0) = (LEFT, HEIGHT - BOTTOM);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{:.1}" y2="{y0}" stroke="black"/>"#, WIDTH - RIGHT);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{TOP}" stroke="black"/>"#);
    for t in 0..=ticks {
        let value = y_max * t as f64 / ticks as f64;
        let y = y0 - (y0 - TOP) * t as f64 / ticks as f64;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0}" y2="{y:.1}" stroke="black"/>"#, x0 - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, x0 - 6.0, y + 4.0, trim(value));
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.1}" text-anchor="middle" transform="rotate(-90 15 {:.1})">{}</text>"#,
        (TOP + y0) / 2.0,
        (TOP + y0) / 2.0,
        escape(y_label)
    );
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn legend(s: &mut String, names: &[&str]) {
    for (k, name) in names.iter().enumerate() {
        let x = WIDTH - RIGHT - 130.0;
        let y = TOP + 10.0 + 18.0 * k as f64;
        let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="5" fill="{}"/>"#, PALETTE[k % PALETTE.len()]);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x + 10.0, y + 4.0, escape(name));
    }
}

/// Side-by-side bars per node count, one color per method.
pub fn render_histogram(counts: &CountsByMethod, title: &str) -> Result<String> {
    if counts.is_empty() || counts.values().all(BTreeMap::is_empty) {
        return Err(Error::InvalidArgument("histogram needs at least one count".into()));
    }
    let keys: Vec<usize> = {
        let mut k: Vec<usize> = counts.values().flat_map(|m| m.keys().copied()).collect();
        k.sort_unstable();
        k.dedup();
        k
    };
    let y_max = counts.values().flat_map(|m| m.values().copied()).max().unwrap_or(1).max(1) as f64;
    let methods: Vec<&str> = counts.keys().map(String::as_str).collect();
    let slot = (WIDTH - LEFT - RIGHT) / keys.len() as f64;
    let bar = slot * 0.8 / methods.len() as f64;
    let plot_h = HEIGHT - BOTTOM - TOP;

    let mut s = header(title);
    axes(&mut s, "number of hidden nodes", "count", y_max, 4);
    for (ki, key) in keys.iter().enumerate() {
        let x_slot = LEFT + slot * ki as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{key}</text>"#,
            x_slot + slot / 2.0,
            HEIGHT - BOTTOM + 16.0
        );
        for (mi, method) in methods.iter().enumerate() {
            let Some(&c) = counts[*method].get(key) else { continue };
            if c == 0 {
                continue;
            }
            let h = plot_h * c as f64 / y_max;
            let _ = writeln!(
                s,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"><title>{}: {key} nodes, {c}</title></rect>"#,
                x_slot + slot * 0.1 + bar * mi as f64,
                HEIGHT - BOTTOM - h,
                bar,
                h,
                PALETTE[mi % PALETTE.len()],
                escape(method)
            );
        }
    }
    legend(&mut s, &methods);
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_histogram_svg(counts: &CountsByMethod, title: &str, out_path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(out_path, render_histogram(counts, title)?)?;
    Ok(())
}

/// Grouped bars: one group per method, one bar per series (e.g. train/test error).
pub fn render_grouped_bars(
    groups: &[(String, Vec<f64>)],
    series: &[&str],
    title: &str,
    y_label: &str,
) -> Result<String> {
    if groups.is_empty() || series.is_empty() {
        return Err(Error::InvalidArgument("grouped bar chart needs groups and series".into()));
    }
    if let Some((name, _)) = groups.iter().find(|(_, v)| v.len() != series.len()) {
        return Err(Error::Shape(format!("group {name} does not have {} values", series.len())));
    }
    let y_max = groups.iter().flat_map(|(_, v)| v.iter().copied()).filter(|v| v.is_finite()).fold(0.0, f64::max);
    let y_max = if y_max > 0.0 { y_max * 1.1 } else { 1.0 };
    let slot = (WIDTH - LEFT - RIGHT) / groups.len() as f64;
    let bar = slot * 0.6 / series.len() as f64;
    let plot_h = HEIGHT - BOTTOM - TOP;

    let mut s = header(title);
    axes(&mut s, "method", y_label, y_max, 4);
    for (gi, (name, values)) in groups.iter().enumerate() {
        let x_slot = LEFT + slot * gi as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            x_slot + slot / 2.0,
            HEIGHT - BOTTOM + 16.0,
            escape(name)
        );
        for (si, v) in values.iter().enumerate() {
            let h = if v.is_finite() { plot_h * v.max(0.0) / y_max } else { 0.0 };
            let _ = writeln!(
                s,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}"><title>{} {}: {}</title></rect>"#,
                x_slot + slot * 0.2 + bar * si as f64,
                HEIGHT - BOTTOM - h,
                bar,
                h,
                PALETTE[si % PALETTE.len()],
                escape(name),
                escape(series[si]),
                trim(*v)
            );
        }
    }
    legend(&mut s, series);
    s.push_str("</svg>\n");
    Ok(s)
}

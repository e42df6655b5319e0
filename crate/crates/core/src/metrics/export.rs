//! CSV tables and simple SVG plots.
//!
//! Numbers are written with fixed precision so that files are byte-stable
//! for a given configuration and seed.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::ledger::{LossCause, MetricsLedger, SignalKind};

/// Fixed six-decimal rendering; non-finite values become `nan`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "nan".to_owned()
    }
}

/// A CSV table with a header row and stable column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(headers: &[S]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.as_ref().to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.headers.len(), "row width matches header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }
}

/// Per-run tables for one ledger, keyed by file name.
pub fn ledger_tables(l: &MetricsLedger) -> Vec<(&'static str, Table)> {
    let mut summary = Table::new(&["metric", "value"]);
    let mut kv = |k: &str, v: String| summary.push(vec![k.to_owned(), v]);
    kv("duration_s", num(l.duration.as_secs_f64()));
    kv("issued", l.issued.to_string());
    kv("delivered", l.delivered.to_string());
    kv("lost", l.lost_total().to_string());
    kv("in_flight_at_end", l.in_flight_at_end.to_string());
    kv("loss_rate", num(l.loss_rate()));
    kv("mean_delay_ms", num(l.mean_delay_ms()));
    kv("mean_hops", num(l.mean_hops()));
    kv("handovers", l.handovers.to_string());
    kv("signaling_total", l.signal_total().to_string());
    kv("protocol_errors", l.protocol_errors.to_string());
    kv("give_ups", l.give_ups.to_string());
    kv("reachability_violations", l.reachability_violations.to_string());

    let mut losses = Table::new(&["cause", "count"]);
    for c in LossCause::ALL {
        losses.push(vec![c.key().to_owned(), l.lost_by(c).to_string()]);
    }

    let mut signaling = Table::new(&["kind", "sink", "count"]);
    for ((k, s), n) in &l.signaling {
        signaling.push(vec![k.key().to_owned(), s.key().to_owned(), n.to_string()]);
    }

    let mut handoffs = Table::new(&["station", "at_s", "latency_ms", "censored"]);
    for h in &l.handoffs {
        handoffs.push(vec![
            h.station.0.to_string(),
            num(h.at.as_secs_f64()),
            h.latency.map_or("nan".to_owned(), |d| num(d.as_millis_f64())),
            h.censored.to_string(),
        ]);
    }

    let mut links = Table::new(&["link", "bytes_ab", "bytes_ba"]);
    for (id, [ab, ba]) in &l.link_bytes {
        links.push(vec![id.0.to_string(), ab.to_string(), ba.to_string()]);
    }

    let mut stretch = Table::new(&["k", "stretch"]);
    for s in &l.stretch {
        stretch.push(vec![s.k.to_string(), num(s.value)]);
    }

    let mut playout = Table::new(&["station", "failures"]);
    for (s, n) in &l.playout_failures {
        playout.push(vec![s.0.to_string(), n.to_string()]);
    }

    vec![
        ("summary.csv", summary),
        ("losses.csv", losses),
        ("signaling.csv", signaling),
        ("handoffs.csv", handoffs),
        ("links.csv", links),
        ("stretch.csv", stretch),
        ("playout.csv", playout),
    ]
}

/// Writes one CSV per metric family of `ledger` into `dir`.
pub fn export_csv(l: &MetricsLedger, dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut names = Vec::new();
    for (name, t) in ledger_tables(l) {
        t.write(&dir.join(name))?;
        names.push(name.to_owned());
    }
    Ok(names)
}

/// Signal counts per handover for each kind.
pub fn per_handover(l: &MetricsLedger, kind: SignalKind) -> f64 {
    if l.handovers == 0 {
        return f64::NAN;
    }
    l.signal_count(kind) as f64 / l.handovers as f64
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Line plot of `series` as a standalone SVG document.
pub fn svg_lines(title: &str, xlabel: &str, ylabel: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let pts = series.iter().flat_map(|(_, v)| v.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 10.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(ylabel)
    );
    for (i, v) in [(x0, y0), (x1, y1)].iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{:.3}</text>"#,
            sx(v.0),
            h - m + 15.0,
            v.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            m - 4.0,
            sy(v.1) + if i == 0 { 0.0 } else { 10.0 },
            v.1
        );
    }
    for (i, (label, v)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let d: Vec<String> = v
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .enumerate()
            .map(|(j, &(x, y))| format!("{}{:.1} {:.1}", if j == 0 { 'M' } else { 'L' }, sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}"/>"#, d.join(" "));
        let ly = m + 15.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
            w - m - 100.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_ledger_gives_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        export_csv(&MetricsLedger::default(), dir.path()).unwrap();
        let h = std::fs::read_to_string(dir.path().join("handoffs.csv")).unwrap();
        assert_eq!(h, "station,at_s,latency_ms,censored\n");
        let s = std::fs::read_to_string(dir.path().join("stretch.csv")).unwrap();
        assert_eq!(s, "k,stretch\n");
    }

    #[test]
    fn numbers_are_fixed_precision() {
        assert_eq!(num(1.0), "1.000000");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(2.0 / 3.0), "0.666667");
    }

    #[test]
    fn svg_contains_series() {
        let s = svg_lines("t", "x", "y", &[("a<b".into(), vec![(0.0, 1.0), (1.0, 2.0)])]);
        assert!(s.starts_with("<svg"));
        assert!(s.contains("a&lt;b"));
        assert!(s.contains("M50.0 350.0 L590.0 50.0"));
    }
}

//! Minimal SVG 1.1 charts from the tool's own CSV and JSON tables.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use durrmeyer_core::exactnum::{parse_rational, to_f64};
use serde_json::Value;

use crate::args::ConfigError;
use crate::output::num;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Named numeric columns; cells that are not numbers are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<Option<f64>>>,
}

fn cell(s: &str) -> Option<f64> {
    let s = s.trim();
    s.parse::<f64>()
        .ok()
        .or_else(|| parse_rational(s).ok().map(|r| to_f64(&r)))
}

impl Table {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with(['{', '[']);
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_csv(&text)
        }
    }

    pub fn from_csv(text: &str) -> anyhow::Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .from_reader(text.as_bytes());
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut columns = vec![Vec::new(); headers.len()];
        for record in reader.records() {
            let record = record?;
            for (i, col) in columns.iter_mut().enumerate() {
                col.push(record.get(i).and_then(cell));
            }
        }
        Ok(Self { headers, columns })
    }

    /// Rows come from a top-level array, a `rows` array, or the object itself.
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let rows: Vec<&Value> = match &value {
            Value::Array(items) => items.iter().collect(),
            Value::Object(map) => match map.get("rows") {
                Some(Value::Array(items)) => items.iter().collect(),
                _ => vec![&value],
            },
            _ => return Err(ConfigError("JSON input holds no table".into()).into()),
        };
        let mut headers: Vec<String> = Vec::new();
        for row in &rows {
            if let Value::Object(map) = row {
                for (k, v) in map {
                    if (v.is_number() || v.is_null()) && !headers.contains(k) {
                        headers.push(k.clone());
                    }
                }
            }
        }
        let columns = headers
            .iter()
            .map(|h| {
                rows.iter()
                    .map(|r| r.get(h).and_then(Value::as_f64))
                    .collect()
            })
            .collect();
        Ok(Self { headers, columns })
    }

    fn column(&self, name: &str) -> anyhow::Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            ConfigError(format!(
                "no column `{name}` (have: {})",
                self.headers.join(", ")
            ))
            .into()
        })
    }

    fn numeric(&self, i: usize) -> bool {
        self.columns[i].iter().any(Option::is_some)
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values
            .map(|v| if log { v.log10() } else { v })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        if hi - lo < 1e-300 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let decades: Vec<f64> = (self.lo.ceil() as i64..=self.hi.floor() as i64)
                .map(|e| 10f64.powi(e as i32))
                .collect();
            if decades.len() >= 2 {
                return decades;
            }
            return vec![10f64.powf(self.lo), 10f64.powf(self.hi)];
        }
        (0..TICKS)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
            .collect()
    }
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.to_string()
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// A chart of `y_columns` against `x_column`; each data point carries its
/// exact values in a `<title>` element.
pub fn render(
    table: &Table,
    x_column: Option<&str>,
    y_columns: &[String],
    log_log: bool,
    title: &str,
) -> anyhow::Result<String> {
    let xi = match x_column {
        Some(name) => table.column(name)?,
        None => (0..table.headers.len())
            .find(|&i| table.numeric(i))
            .ok_or_else(|| ConfigError("table has no numeric column".into()))?,
    };
    let yis: Vec<usize> = if y_columns.is_empty() {
        (0..table.headers.len())
            .filter(|&i| i != xi && table.numeric(i))
            .collect()
    } else {
        y_columns
            .iter()
            .map(|c| table.column(c))
            .collect::<anyhow::Result<_>>()?
    };
    let keep = |v: f64| v.is_finite() && (!log_log || v > 0.0);
    let series: Vec<(&str, Vec<(f64, f64)>)> = yis
        .iter()
        .map(|&yi| {
            let pts = table.columns[xi]
                .iter()
                .zip(&table.columns[yi])
                .filter_map(|(x, y)| Some((x.filter(|&v| keep(v))?, y.filter(|&v| keep(v))?)))
                .collect();
            (table.headers[yi].as_str(), pts)
        })
        .filter(|(_, pts): &(&str, Vec<(f64, f64)>)| !pts.is_empty())
        .collect();
    if series.is_empty() {
        return Err(ConfigError("nothing to plot: no column has drawable values".into()).into());
    }
    let all = || series.iter().flat_map(|(_, p)| p.iter());
    let xa = Axis::fit(all().map(|p| p.0), log_log);
    let ya = Axis::fit(all().map(|p| p.1), log_log);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |v: f64| LEFT + xa.unit(v) * pw;
    let sy = |v: f64| TOP + (1.0 - ya.unit(v)) * ph;

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    )?;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    )?;
    writeln!(w, "<title>{}</title>", escape(title))?;
    writeln!(
        w,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )?;
    writeln!(
        w,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )?;
    writeln!(
        w,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    )?;
    for t in xa.ticks() {
        let x = sx(t);
        writeln!(
            w,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##,
            TOP + ph
        )?;
        writeln!(
            w,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            label(t)
        )?;
    }
    for t in ya.ticks() {
        let y = sy(t);
        writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            LEFT + pw
        )?;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            label(t)
        )?;
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        escape(&table.headers[xi])
    )?;
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        writeln!(w, r#"<g id="series-{k}">"#)?;
        writeln!(w, "<title>{}</title>", escape(name))?;
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        )?;
        for &(x, y) in pts {
            writeln!(
                w,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}"><title>{},{}</title></circle>"#,
                sx(x),
                sy(y),
                num(x),
                num(y)
            )?;
        }
        writeln!(w, "</g>")?;
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = LEFT + pw + 14.0;
        writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        )?;
        writeln!(
            w,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        )?;
    }
    writeln!(w, "</svg>")?;
    Ok(svg)
}

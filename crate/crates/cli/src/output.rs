//! Deterministic CSV / manifest / summary writers.
//!
//! Floats print at 17 significant digits so every value round-trips
//! bit-exactly through the text form. Timing information never enters a
//! CSV; it lives only in the run manifest.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN-robust axis guards

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};

/// 17-significant-digit float formatting (round-trip safe).
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.16e}")
}

/// Row-oriented CSV assembly with a fixed header.
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: ToString>(header: &[S]) -> Csv {
        Csv {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "CSV row arity mismatch");
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())
            .with_context(|| format!("writing {}", path.display()))
    }
}

/// Cell helpers.
pub fn c_f(v: f64) -> String {
    fmt_f64(v)
}

pub fn c_s(v: impl ToString) -> String {
    v.to_string()
}

/// One assertion line of a command summary.
#[derive(Debug, Clone)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub threshold: String,
    pub pass: bool,
}

/// Collected pass/flag assertions of one command run.
#[derive(Debug, Default)]
pub struct Summary {
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
}

impl Summary {
    pub fn check(&mut self, name: &str, value: f64, threshold: &str, pass: bool) {
        self.assertions.push(Assertion {
            name: name.to_string(),
            value,
            threshold: threshold.to_string(),
            pass,
        });
    }

    pub fn note(&mut self, msg: impl ToString) {
        self.notes.push(msg.to_string());
    }

    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn write(&self, dir: &Path, command: &str) -> Result<()> {
        let mut csv = Csv::new(&["assertion", "value", "threshold", "status"]);
        for a in &self.assertions {
            csv.row(vec![
                a.name.clone(),
                c_f(a.value),
                a.threshold.clone(),
                if a.pass { "pass" } else { "flag" }.to_string(),
            ]);
        }
        csv.write(&dir.join(format!("{command}.summary.csv")))?;
        if !self.notes.is_empty() {
            std::fs::write(
                dir.join(format!("{command}.notes.txt")),
                self.notes.join("\n") + "\n",
            )?;
        }
        Ok(())
    }

    pub fn print(&self, command: &str) {
        for a in &self.assertions {
            println!(
                "[{}] {} {}: value = {} (threshold {})",
                if a.pass { "pass" } else { "FLAG" },
                command,
                a.name,
                fmt_f64(a.value),
                a.threshold
            );
        }
        for n in &self.notes {
            println!("note: {n}");
        }
    }
}

/// Run manifest: provenance of every output in the directory. Wall-clock
/// timings appear only here.
pub struct Manifest {
    command: String,
    config_echo: String,
    seed: Option<u64>,
    started: Instant,
    lines: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config_echo: String, seed: Option<u64>) -> Manifest {
        Manifest {
            command: command.to_string(),
            config_echo,
            seed,
            started: Instant::now(),
            lines: Vec::new(),
        }
    }

    pub fn line(&mut self, msg: impl ToString) {
        self.lines.push(msg.to_string());
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let mut out = String::new();
        let _ = writeln!(out, "tool = jmgt {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "command = {}", self.command);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed = {seed}");
        }
        let _ = writeln!(out, "wall_clock_s = {:.3}", self.started.elapsed().as_secs_f64());
        for l in &self.lines {
            let _ = writeln!(out, "{l}");
        }
        let _ = writeln!(out, "--- config ---");
        out.push_str(&self.config_echo);
        let path = dir.join(format!("{}.manifest.txt", self.command));
        std::fs::write(&path, out).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Minimal SVG polyline plot of one or more series on shared axes.
pub fn svg_lines(
    path: &Path,
    title: &str,
    series: &[(&str, &[f64], &[f64])],
    log_x: bool,
    log_y: bool,
) -> Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 50.0;
    let map = |v: f64, log: bool| if log { v.max(1e-300).log10() } else { v };
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for (_, xs, ys) in series {
        for (&x, &y) in xs.iter().zip(ys.iter()) {
            if log_y && y <= 0.0 {
                continue;
            }
            xmin = xmin.min(map(x, log_x));
            xmax = xmax.max(map(x, log_x));
            ymin = ymin.min(map(y, log_y));
            ymax = ymax.max(map(y, log_y));
        }
    }
    if !(xmax > xmin) || !(ymax > ymin) {
        xmax = xmin + 1.0;
        ymax = ymin + 1.0;
    }
    let colors = ["#00589c", "#c02020", "#2a8a2a", "#8040c0", "#c08000"];
    let mut body = String::new();
    let _ = write!(
        body,
        "<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}' viewBox='0 0 {W} {H}'>\
         <rect width='{W}' height='{H}' fill='white'/>\
         <text x='{}' y='20' font-size='14' text-anchor='middle'>{title}</text>",
        W / 2.0
    );
    for (i, (name, xs, ys)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let mut pts = String::new();
        for (&x, &y) in xs.iter().zip(ys.iter()) {
            if log_y && y <= 0.0 {
                continue;
            }
            let px = M + (map(x, log_x) - xmin) / (xmax - xmin) * (W - 2.0 * M);
            let py = H - M - (map(y, log_y) - ymin) / (ymax - ymin) * (H - 2.0 * M);
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
        let _ = write!(
            body,
            "<polyline fill='none' stroke='{color}' stroke-width='1.5' points='{}'/>\
             <text x='{}' y='{}' font-size='12' fill='{color}'>{name}</text>",
            pts.trim_end(),
            W - M - 120.0,
            30.0 + 14.0 * i as f64
        );
    }
    let _ = write!(
        body,
        "<rect x='{M}' y='{M}' width='{}' height='{}' fill='none' stroke='#888'/></svg>",
        W - 2.0 * M,
        H - 2.0 * M
    );
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

//! Run outputs: CSV tables (shortest round-trip decimals via the standard
//! float formatter), JSON reports and manifests, and self-contained SVG
//! line charts. The manifest echoes the configuration and seed ranges and
//! never contains a timestamp, so replays are byte-identical; wall-clock
//! information goes to a separate `run_info.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::AnyError;

/// Table serialisation format; reports and manifests are always JSON.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

pub struct RunDir {
    pub dir: PathBuf,
}

impl RunDir {
    pub fn create(dir: &Path) -> Result<Self, AnyError> {
        fs::create_dir_all(dir)?;
        Ok(RunDir { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf, AnyError> {
        let path = self.path(name);
        let mut out = fs::File::create(&path)?;
        writeln!(out, "{}", header.join(","))?;
        for row in rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(path)
    }

    /// Numeric table in the configured format: `<base>.csv` or `<base>.json`
    /// (an array of column-keyed records).
    pub fn write_table(
        &self,
        base: &str,
        header: &[&str],
        rows: &[Vec<f64>],
        format: TableFormat,
    ) -> Result<PathBuf, AnyError> {
        match format {
            TableFormat::Csv => self.write_csv(&format!("{base}.csv"), header, rows),
            TableFormat::Json => {
                let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
                    .iter()
                    .map(|row| {
                        header
                            .iter()
                            .zip(row)
                            .map(|(k, v)| ((*k).to_string(), serde_json::json!(v)))
                            .collect()
                    })
                    .collect();
                self.write_json(&format!("{base}.json"), &records)
            }
        }
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, AnyError> {
        let path = self.path(name);
        let mut out = fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        Ok(path)
    }

    /// Manifest: command, config echo, seed and stream ranges, crate
    /// version. Deterministic — no clock data.
    pub fn write_manifest<T: Serialize>(
        &self,
        command: &str,
        config: &T,
        seed: u64,
        streams: (u64, u64),
    ) -> Result<(), AnyError> {
        #[derive(Serialize)]
        struct Manifest<'a, T> {
            command: &'a str,
            version: &'a str,
            seed: u64,
            stream_lo: u64,
            stream_hi: u64,
            config: &'a T,
        }
        self.write_json(
            "manifest.json",
            &Manifest {
                command,
                version: env!("CARGO_PKG_VERSION"),
                seed,
                stream_lo: streams.0,
                stream_hi: streams.1,
                config,
            },
        )?;
        #[derive(Serialize)]
        struct RunInfo {
            unix_time_secs: u64,
        }
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.write_json("run_info.json", &RunInfo { unix_time_secs: now })?;
        Ok(())
    }

    /// Single-file SVG line chart; one polyline per series.
    pub fn write_svg(
        &self,
        name: &str,
        title: &str,
        xs: &[f64],
        series: &[(&str, &[f64])],
    ) -> Result<PathBuf, AnyError> {
        let path = self.path(name);
        let (w, h, pad) = (720.0, 420.0, 48.0);
        let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for (_, ys) in series {
            for &y in *ys {
                if y.is_finite() {
                    y_min = y_min.min(y);
                    y_max = y_max.max(y);
                }
            }
        }
        if !(y_min.is_finite() && y_max.is_finite()) {
            y_min = 0.0;
            y_max = 1.0;
        }
        if y_max - y_min < 1e-12 {
            y_max = y_min + 1.0;
        }
        let sx = |x: f64| pad + (x - x_min) / (x_max - x_min).max(1e-300) * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - (y - y_min) / (y_max - y_min) * (h - 2.0 * pad);
        let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
        ));
        svg.push_str(&format!(
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">{title}</text>\n",
            pad
        ));
        svg.push_str(&format!(
            "<line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888\"/>\n<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"#888\"/>\n",
            h - pad,
            w - pad,
            h - pad,
            h - pad
        ));
        for (i, (label, ys)) in series.iter().enumerate() {
            let color = palette[i % palette.len()];
            let pts: Vec<String> = xs
                .iter()
                .zip(*ys)
                .filter(|(_, y)| y.is_finite())
                .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{label}</text>\n",
                w - pad - 120.0,
                pad + 16.0 * (i as f64 + 1.0)
            ));
        }
        svg.push_str("</svg>\n");
        fs::write(&path, svg)?;
        Ok(path)
    }
}

//! Spectrum tables, metadata sidecars and SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Files written by one run, in order.
#[derive(Debug, Default)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

impl Written {
    pub fn write(&mut self, path: PathBuf, contents: &str) -> std::io::Result<()> {
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Plain-text table: `#` header lines, a column line, then rows in
/// 17-significant-digit scientific notation.
pub fn table(title: &str, metadata_hash: &str, columns: &[String], p: &[f64], series: &[&[f64]]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(out, "# metadata-sha256 {metadata_hash}");
    let _ = writeln!(out, "# {}", columns.join(" "));
    for (i, x) in p.iter().enumerate() {
        let _ = write!(out, "{x:.16e}");
        for s in series {
            let _ = write!(out, " {:.16e}", s[i]);
        }
        out.push('\n');
    }
    out
}

pub fn spectrum_table(title: &str, metadata_hash: &str, p: &[f64], density: &[f64]) -> String {
    table(title, metadata_hash, &["p".into(), "density".into()], p, &[density])
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#5d6d7e"];

/// Line plot of one or more curves sharing the momentum axis.
pub fn svg_plot(title: &str, y_label: &str, p: &[f64], series: &[(&str, &[f64])]) -> String {
    let (x_lo, x_hi) = (p[0], p[p.len() - 1]);
    let y_hi = series
        .iter()
        .flat_map(|(_, s)| s.iter())
        .cloned()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE)
        * 1.05;
    let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * w;
    let sy = |y: f64| HEIGHT - MARGIN - y / y_hi * h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(out, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{h}" fill="none" stroke="black"/>"#);
    for t in ticks(x_lo, x_hi) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{0:.2}" x2="{x:.2}" y2="{1:.2}" stroke="black"/><text x="{x:.2}" y="{2:.2}" text-anchor="middle">{t}</text>"#,
            HEIGHT - MARGIN,
            HEIGHT - MARGIN + 5.0,
            HEIGHT - MARGIN + 18.0
        );
    }
    for t in ticks(0.0, y_hi) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{y:.2}" x2="{MARGIN}" y2="{y:.2}" stroke="black"/><text x="{1:.2}" y="{2:.2}" text-anchor="end">{t}</text>"#,
            MARGIN - 5.0,
            MARGIN - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">p / ħk0</text>"#, WIDTH / 2.0, HEIGHT - 15.0);
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, (label, s)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = p.iter().zip(s.iter()).map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, points.join(" "));
        if series.len() > 1 {
            let y = MARGIN + 16.0 + 14.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" fill="{color}">{}</text>"#,
                WIDTH - MARGIN - 8.0,
                escape(label)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| (i as f64 * step * 1e9).round() / 1e9).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn ensure_dir(dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    // Probe writability up front so a run fails before any computation.
    let probe = dir.join(".ewi-write-probe");
    fs::write(&probe, b"")?;
    fs::remove_file(probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_uses_seventeen_significant_digits() {
        let t = spectrum_table("test", "abc", &[0.1, 0.2], &[1.0 / 3.0, 2.0]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "# test");
        assert_eq!(lines[1], "# metadata-sha256 abc");
        assert_eq!(lines[2], "# p density");
        assert_eq!(lines[3], "1.0000000000000001e-1 3.3333333333333331e-1");
        let back: f64 = lines[3].split(' ').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.8, 3.3), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
    }

    #[test]
    fn plot_is_svg() {
        let p = [1.0, 2.0, 3.0];
        let s = svg_plot("t", "density", &p, &[("a", &[0.0, 1.0, 0.5])]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("polyline"));
    }
}

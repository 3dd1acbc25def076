//! CSV, SVG and run-manifest output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{BoundResult, ProblemConfig};
use crate::experiment::PropertyCheck;
use crate::lifting::{enclosing_rectangle, map_to_lifted, LiftedDomainSample};
use crate::slepian::SlepianSpectrum;
use crate::spectra::SpectrumResult;
use crate::Error;

/// dB value written for exactly-zero entries of a spectrum.
pub const DB_FLOOR: f64 = -400.0;

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn spectrum_csv(spectrum: &SpectrumResult) -> String {
    let mut out = String::from("index,value,value_db,flag_complex\n");
    for (i, v) in spectrum.values.iter().enumerate() {
        let db = spectrum.db(i).unwrap_or(DB_FLOOR).max(DB_FLOOR);
        let flag = spectrum.complex_eig_flags.contains(&i) as u8;
        writeln!(out, "{},{},{},{}", i + 1, v, db, flag).unwrap();
    }
    out
}

pub fn slepian_csv(spectrum: &SlepianSpectrum) -> String {
    let mut out = String::from("index,normalized_eigenvalue\n");
    for (i, v) in spectrum.eigenvalues.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, v).unwrap();
    }
    out
}

/// Rows are tagged `sample`, `corner_image` (the images `(±2a, 0)` of the
/// source-square corners `(∓a, ±a)`) and `rect_corner` (the enclosing
/// rectangle).
pub fn domain_csv(sample: &LiftedDomainSample, config: &ProblemConfig) -> String {
    let mut out = String::from("kind,x1,x2\n");
    for (x1, x2) in &sample.points {
        writeln!(out, "sample,{x1},{x2}").unwrap();
    }
    for (x, xb) in [(config.a, -config.a), (-config.a, config.a)] {
        let p = map_to_lifted(x, xb, config.r_max);
        writeln!(out, "corner_image,{},{}", p.x1, p.x2).unwrap();
    }
    let b = enclosing_rectangle(config);
    for (x1, x2) in [
        (b.x1.0, b.x2.0),
        (b.x1.1, b.x2.0),
        (b.x1.1, b.x2.1),
        (b.x1.0, b.x2.1),
    ] {
        writeln!(out, "rect_corner,{x1},{x2}").unwrap();
    }
    out
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;
const MARGIN: f64 = 56.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (SVG_W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        SVG_H - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (SVG_H - 2.0 * MARGIN)
    }

    fn open(&self, title: &str, xlabel: &str, ylabel: &str) -> String {
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        );
        let (l, r, t, b) = (MARGIN, SVG_W - MARGIN, MARGIN, SVG_H - MARGIN);
        writeln!(
            s,
            "<rect x=\"{l}\" y=\"{t}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            r - l,
            b - t
        )
        .unwrap();
        writeln!(
            s,
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\">{title}</text>",
            SVG_W / 2.0
        )
        .unwrap();
        writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{xlabel}</text>",
            SVG_W / 2.0,
            SVG_H - 12.0
        )
        .unwrap();
        writeln!(
            s,
            "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{ylabel}</text>",
            SVG_H / 2.0,
            SVG_H / 2.0
        )
        .unwrap();
        for (v, anchor) in [(self.x.0, "start"), (self.x.1, "end")] {
            writeln!(
                s,
                "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"{anchor}\">{v}</text>",
                self.px(v),
                b + 16.0
            )
            .unwrap();
        }
        for v in [self.y.0, self.y.1] {
            writeln!(
                s,
                "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">{v}</text>",
                l - 4.0,
                self.py(v) + 4.0
            )
            .unwrap();
        }
        s
    }
}

/// Line plot of a spectrum in dB relative to its maximum, with the
/// threshold and critical index marked.
pub fn spectrum_svg(spectrum: &SpectrumResult) -> String {
    let n = spectrum.len().max(2) as f64;
    let lowest = (0..spectrum.len())
        .filter_map(|i| spectrum.db(i))
        .filter(|d| d.is_finite())
        .fold(spectrum.threshold_db, f64::min);
    let frame = Frame {
        x: (1.0, n),
        y: ((lowest / 20.0).floor() * 20.0, 0.0),
    };
    let mut s = frame.open(spectrum.kind.label(), "index", "dB");
    let points: Vec<String> = (0..spectrum.len())
        .filter_map(|i| spectrum.db(i).filter(|d| d.is_finite()).map(|d| (i, d)))
        .map(|(i, d)| format!("{:.1},{:.1}", frame.px((i + 1) as f64), frame.py(d)))
        .collect();
    writeln!(
        s,
        "<polyline fill=\"none\" stroke=\"steelblue\" points=\"{}\"/>",
        points.join(" ")
    )
    .unwrap();
    let ty = frame.py(spectrum.threshold_db);
    writeln!(
        s,
        "<line x1=\"{MARGIN}\" y1=\"{ty:.1}\" x2=\"{}\" y2=\"{ty:.1}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
        SVG_W - MARGIN
    )
    .unwrap();
    let cx = frame.px(spectrum.critical_index as f64);
    writeln!(
        s,
        "<line x1=\"{cx:.1}\" y1=\"{MARGIN}\" x2=\"{cx:.1}\" y2=\"{}\" stroke=\"firebrick\" stroke-dasharray=\"4 3\"/>",
        SVG_H - MARGIN
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

pub fn slepian_svg(spectrum: &SlepianSpectrum, title: &str) -> String {
    let frame = Frame {
        x: (1.0, spectrum.eigenvalues.len().max(2) as f64),
        y: (0.0, 1.0),
    };
    let mut s = frame.open(title, "index", "normalized eigenvalue");
    for (i, v) in spectrum.eigenvalues.iter().enumerate() {
        writeln!(
            s,
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2\" fill=\"steelblue\"/>",
            frame.px((i + 1) as f64),
            frame.py(v.clamp(0.0, 1.0))
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

pub fn domain_svg(sample: &LiftedDomainSample, config: &ProblemConfig) -> String {
    let b = enclosing_rectangle(config);
    let frame = Frame {
        x: (b.x1.0, b.x1.1),
        y: (b.x2.0, b.x2.1),
    };
    let mut s = frame.open("lifted domain", "X1", "X2");
    for &(x1, x2) in &sample.points {
        writeln!(
            s,
            "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"1\" fill=\"steelblue\"/>",
            frame.px(x1),
            frame.py(x2)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

/// Record of one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: ProblemConfig,
    pub artifacts: Vec<Artifact>,
    pub timings: Vec<Timing>,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shannon_number: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count_above_half: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<PropertyCheck>,
}

impl RunManifest {
    pub fn new(command: &str, config: &ProblemConfig) -> Self {
        Self {
            command: command.to_string(),
            config: *config,
            artifacts: Vec::new(),
            timings: Vec::new(),
            warnings: Vec::new(),
            seed: None,
            bounds: None,
            critical_index: None,
            shannon_number: None,
            count_above_half: None,
            checks: Vec::new(),
        }
    }

    /// Write `text` to `path` and list it.
    pub fn emit(&mut self, path: &Path, kind: &str, text: &str) -> Result<(), Error> {
        write_text(path, text)?;
        self.artifacts.push(Artifact {
            path: path.to_path_buf(),
            kind: kind.to_string(),
        });
        Ok(())
    }

    pub fn time(&mut self, stage: &str, seconds: f64) {
        self.timings.push(Timing {
            stage: stage.to_string(),
            seconds,
        });
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_text(path, &(json + "\n"))
    }

    pub fn read(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        serde_json::from_str(&text).map_err(|e| io_error(path, std::io::Error::other(e)))
    }
}

/// `foo.csv` → `foo.svg`.
pub fn svg_path(csv: &Path) -> PathBuf {
    csv.with_extension("svg")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::sample_lifted_domain;
    use crate::spectra::SpectrumKind;

    #[test]
    fn spectrum_rows_are_one_based_and_floored() {
        let s = SpectrumResult::from_eigenvalues(
            SpectrumKind::SqrtEigAAdag,
            vec![4.0, 1.0, 0.0],
            -40.0,
            vec![1],
        )
        .unwrap();
        let csv = spectrum_csv(&s);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "index,value,value_db,flag_complex");
        assert_eq!(lines[1], "1,2,0,0");
        assert!(lines[2].starts_with("2,1,-6.0205999132796"));
        assert!(lines[2].ends_with(",1"));
        assert_eq!(lines[3], "3,0,-400,0");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn domain_corners_are_listed() {
        let cfg = ProblemConfig::reference_case();
        let csv = domain_csv(&sample_lifted_domain(&cfg, 8), &cfg);
        assert!(csv.contains("corner_image,-20,0\n"));
        assert!(csv.contains("corner_image,20,0\n"));
        assert!(csv.contains("rect_corner,-20,-1\n"));
        assert!(csv.contains("rect_corner,20,1\n"));
        assert!(!csv.contains("sample,0,0\n"));
    }

    #[test]
    fn manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("bounds", &ProblemConfig::reference_case());
        m.emit(&dir.path().join("a.csv"), "csv", "x\n1\n").unwrap();
        m.time("total", 0.5);
        m.critical_index = Some(3);
        let path = dir.path().join("m.json");
        m.write(&path).unwrap();
        assert_eq!(RunManifest::read(&path).unwrap(), m);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let s = SpectrumResult::from_eigenvalues(
            SpectrumKind::SqrtEigAAdag,
            vec![1.0, 1e-3, 1e-9],
            -40.0,
            vec![],
        )
        .unwrap();
        let svg = spectrum_svg(&s);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("<polyline"));
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{ensure, Error, Result};

/// Coordinate along which a pattern row is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Transverse detector position (m).
    X,
    /// Distance along the mirror (m).
    Z,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::X => "x_m",
            Axis::Z => "z_m",
        }
    }
}

/// Flux sampled on (velocity, coordinate); `values[j][i]` belongs to `velocities[j]` and
/// `coords[i]`. The coordinate grid is uniform and shared by every row.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferencePattern {
    pub axis: Axis,
    pub coords: Vec<f64>,
    pub velocities: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub convolved: bool,
    pub metadata: BTreeMap<String, String>,
}

impl InterferencePattern {
    pub fn new(axis: Axis, coords: Vec<f64>, velocities: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        ensure(coords.len() >= 2, || "pattern needs at least two coordinates".into())?;
        ensure(values.len() == velocities.len(), || "one row per velocity required".into())?;
        ensure(values.iter().all(|r| r.len() == coords.len()), || "row length differs from coordinate count".into())?;
        for r in &values {
            for &f in r {
                ensure(f >= 0.0 && f.is_finite(), || format!("flux must be finite and >= 0, got {f}"))?;
            }
        }
        Ok(Self { axis, coords, velocities, values, convolved: false, metadata: BTreeMap::new() })
    }

    pub fn spacing(&self) -> f64 {
        self.coords[1] - self.coords[0]
    }

    /// Sum over rows of the coordinate integral (rectangle rule on the uniform grid).
    pub fn row_integrals(&self) -> Vec<f64> {
        let d = self.spacing();
        self.values.iter().map(|r| r.iter().sum::<f64>() * d).collect()
    }

    pub fn total(&self) -> f64 {
        self.row_integrals().iter().sum()
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    /// CSV with `# key = value` header lines (sorted), a column header, then one row per sample.
    /// Floats use the shortest round-trip representation, so equal inputs give equal bytes.
    pub fn to_csv(&self) -> String {
        let mut meta = self.metadata.clone();
        meta.insert("axis".into(), self.axis.column().into());
        meta.insert("convolved".into(), self.convolved.to_string());
        meta.insert("units".into(), "v_mps=m/s; x_m=m; z_m=m; flux=arb".into());
        let mut out = String::new();
        for (k, v) in &meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "v_mps,{},flux", self.axis.column());
        for (v, row) in self.velocities.iter().zip(&self.values) {
            for (c, f) in self.coords.iter().zip(row) {
                let _ = writeln!(out, "{v:e},{c:e},{f:e}");
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Reads back the dialect written by `to_csv`.
    pub fn parse_csv(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
        let mut meta = BTreeMap::new();
        let mut axis = None;
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            if let Some(c) = raw.strip_prefix('#') {
                if let Some((k, v)) = c.split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
                continue;
            }
            if raw.starts_with("v_mps,") {
                axis = Some(match raw.split(',').nth(1) {
                    Some("x_m") => Axis::X,
                    Some("z_m") => Axis::Z,
                    other => return Err(err(line_no, format!("unknown axis column {other:?}"))),
                });
                continue;
            }
            if raw.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = raw
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| err(line_no, format!("not a number: `{s}`"))))
                .collect::<Result<_>>()?;
            if cols.len() != 3 {
                return Err(err(line_no, format!("expected 3 columns, found {}", cols.len())));
            }
            rows.push((cols[0], cols[1], cols[2]));
        }
        let axis = axis.ok_or_else(|| err(0, "missing column header".into()))?;
        let mut velocities: Vec<f64> = Vec::new();
        let mut coords: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for &(v, c, f) in &rows {
            if velocities.last() != Some(&v) {
                velocities.push(v);
                values.push(Vec::new());
            }
            if velocities.len() == 1 {
                coords.push(c);
            }
            values.last_mut().unwrap().push(f);
        }
        let convolved = meta.remove("convolved").as_deref() == Some("true");
        meta.remove("axis");
        meta.remove("units");
        let mut p = Self::new(axis, coords, velocities, values)?;
        p.convolved = convolved;
        p.metadata = meta;
        Ok(p)
    }
}

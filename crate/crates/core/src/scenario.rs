//! Scene files: one TOML document fully determines a pipeline run. Keys carry their unit.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::G_STANDARD;
use crate::error::{Error, Result};
use crate::particle::Catalog;
use crate::qr::{QrModel, QrTable};

/// A scalar or a list of scalars; lists expand into separate runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Reflecting surface faces up: gravity pushes the particle onto the mirror.
    Up,
    /// Reflecting surface faces down: gravity pulls the particle away from it.
    Down,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Up => 1.0,
            Orientation::Down => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mirror {
    pub length_m: f64,
    /// Cylinder radius; absent for a flat mirror.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_m: Option<f64>,
    #[serde(default = "default_orientation")]
    pub orientation: Orientation,
    /// `hard`, a shipped table name (`silica_h`, `silica_hbar`, `silica_mu`), `table` with
    /// `wall_table`, or `scattering-length` with `wall_scattering_length_m`.
    #[serde(default = "default_wall")]
    pub wall: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_table: Option<PathBuf>,
    /// [Re a, Im a] with Im a <= 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_scattering_length_m: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Absorber {
    pub length_m: f64,
    pub height_m: OneOrMany,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Accelerations {
    #[serde(default = "yes")]
    pub gravity: bool,
    /// Gravity component normal to the mirror (reduced for a tilted setup).
    #[serde(default = "default_g")]
    pub gravity_mps2: f64,
    /// Additional acceleration acting during the free flight to the detector.
    #[serde(default = "zero_many")]
    pub extra_mps2: OneOrMany,
}

impl Default for Accelerations {
    fn default() -> Self {
        Self { gravity: true, gravity_mps2: G_STANDARD, extra_mps2: OneOrMany::One(0.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Beam {
    /// Explicit velocity list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocities_mps: Option<Vec<f64>>,
    /// Uniform velocity grid [start, stop, count].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_grid_mps: Option<[f64; 3]>,
    /// Gaussian flux spectrum [mean, sigma]; default is a flat spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_gaussian_mps: Option<[f64; 2]>,
    /// Two-column (v in m/s, weight) file, linearly interpolated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_file: Option<PathBuf>,
    /// Transverse wavenumber of the incoming plane wave.
    #[serde(default)]
    pub k_perp_per_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detector {
    pub distance_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tof_distance_m: Option<f64>,
    #[serde(default)]
    pub x_resolution_m: f64,
    #[serde(default)]
    pub time_resolution_s: f64,
    /// Free-flight acceleration; default is the signed mirror gravity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fall_mps2: Option<f64>,
    /// [x_min, x_max].
    pub x_range_m: [f64; 2],
    pub x_points: usize,
    /// Use the stationary-phase map even where z/z0 < 20.
    #[serde(default)]
    pub force_far_field: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "yes")]
    pub pattern: bool,
    #[serde(default)]
    pub surface_current: bool,
    #[serde(default = "default_z_points")]
    pub z_points: usize,
    /// Also emit the spectrum-weighted sum over velocities.
    #[serde(default)]
    pub integrate_velocities: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self { pattern: true, surface_current: false, z_points: default_z_points(), integrate_velocities: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensitivityParameter {
    /// Mirror gravity, together with the free-fall acceleration when that follows gravity.
    Gravity,
    /// The extra free-flight acceleration.
    Extra,
}

/// Event count from the phase-space element of the populated states and a source density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpaceEvents {
    /// Source density (1/m^3), spread uniformly over a velocity sphere of radius v_max.
    pub density_per_m3: f64,
    pub v_max_mps: f64,
    pub beam_width_m: f64,
    /// Accepted spread of the longitudinal velocity.
    pub longitudinal_window_mps: f64,
    /// Accepted spread of the velocity along the mirror axis.
    pub lateral_window_mps: f64,
    pub duration_s: f64,
    #[serde(default)]
    pub collimation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sensitivity {
    pub parameter: SensitivityParameter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_space: Option<PhaseSpaceEvents>,
    /// Finite-difference step; chosen automatically when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_mps2: Option<f64>,
    /// Build P from the resolution-convolved flux.
    #[serde(default = "yes")]
    pub convolved: bool,
    /// Electric field for the charge bound (V/m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_v_per_m: Option<f64>,
    /// Extra acceleration the bound is quoted relative to (defaults to the largest extra value).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_mps2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_oversample")]
    pub oversample: f64,
    /// Downstream basis is enlarged until it captures this fraction of the incoming norm.
    #[serde(default = "default_capture")]
    pub capture_target: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { oversample: default_oversample(), capture_target: default_capture() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub particle: String,
    #[serde(default)]
    pub seed: u64,
    pub mirror: Mirror,
    pub absorber: Absorber,
    #[serde(default)]
    pub accelerations: Accelerations,
    pub beam: Beam,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<Detector>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<Sensitivity>,
    #[serde(default)]
    pub solver: SolverSettings,
    /// Directory relative paths are resolved against; not part of the content.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_orientation() -> Orientation {
    Orientation::Up
}
fn default_wall() -> String {
    "hard".into()
}
fn yes() -> bool {
    true
}
fn default_g() -> f64 {
    G_STANDARD
}
fn zero_many() -> OneOrMany {
    OneOrMany::One(0.0)
}
fn default_z_points() -> usize {
    2001
}
fn default_oversample() -> f64 {
    2.0
}
fn default_capture() -> f64 {
    0.999
}

/// One point of the absorber-height x extra-acceleration product.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub index: usize,
    pub absorber_height: f64,
    pub extra_accel: f64,
    /// Empty for single-variant scenes.
    pub label: String,
}

const SHIPPED: [(&str, &str); 7] = [
    ("vcn-gqs", include_str!("../data/scenes/vcn-gqs.toml")),
    ("h-gqs", include_str!("../data/scenes/h-gqs.toml")),
    ("h-wgs", include_str!("../data/scenes/h-wgs.toml")),
    ("ucn-reduced", include_str!("../data/scenes/ucn-reduced.toml")),
    ("hbar-wgs", include_str!("../data/scenes/hbar-wgs.toml")),
    ("mu-wgs", include_str!("../data/scenes/mu-wgs.toml")),
    ("ps-wgs", include_str!("../data/scenes/ps-wgs.toml")),
];

const SHIPPED_TABLES: [(&str, &str); 3] = [
    ("silica_h", include_str!("../data/qr/silica_h.dat")),
    ("silica_hbar", include_str!("../data/qr/silica_hbar.dat")),
    ("silica_mu", include_str!("../data/qr/silica_mu.dat")),
];

/// Names of the scenes compiled into the library.
pub fn shipped_names() -> impl Iterator<Item = &'static str> {
    SHIPPED.iter().map(|(n, _)| *n)
}

/// Source text of a shipped scene.
pub fn shipped_text(name: &str) -> Option<&'static str> {
    SHIPPED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// A shipped QR table by name.
pub fn shipped_table(name: &str) -> Option<Result<QrTable>> {
    SHIPPED_TABLES.iter().find(|(n, _)| *n == name).map(|(n, t)| QrTable::parse(t, n))
}

/// Two whitespace-separated columns (v in m/s, weight >= 0), `#` comments, increasing v.
fn parse_spectrum(text: &str, origin: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
    let (mut vs, mut ws) = (Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|c| c.parse::<f64>().map_err(|_| err(i + 1, format!("not a number: `{c}`"))))
            .collect::<Result<_>>()?;
        if cols.len() != 2 || cols[1] < 0.0 || vs.last().is_some_and(|&p| cols[0] <= p) {
            return Err(err(i + 1, "expected increasing v and a weight >= 0".into()));
        }
        vs.push(cols[0]);
        ws.push(cols[1]);
    }
    if vs.len() < 2 {
        return Err(err(0, "spectrum needs at least two rows".into()));
    }
    Ok((vs, ws))
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Result<f64> {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return Err(Error::Validation(format!("velocity {x} m/s outside the spectrum file range")));
    }
    let i = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    Ok(ys[i - 1] + t * (ys[i] - ys[i - 1]))
}

fn parse_error(text: &str, origin: &str, e: toml::de::Error) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line: e.span().map_or(0, |s| 1 + text[..s.start.min(text.len())].matches('\n').count()),
        msg: e.message().to_string(),
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Validation(format!("{field}: {msg}"))
}

fn require(cond: bool, field: &str, msg: impl std::fmt::Display) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(field, msg))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    require(v > 0.0 && v.is_finite(), field, format!("must be positive and finite, got {v}"))
}

impl Scenario {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| parse_error(text, origin, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut s = Self::parse(&text, &path.display().to_string())?;
        s.base_dir = path.parent().map(Path::to_path_buf);
        Ok(s)
    }

    pub fn shipped(name: &str) -> Result<Self> {
        let text = shipped_text(name).ok_or_else(|| {
            Error::Validation(format!("unknown scene `{name}`; shipped: {}", shipped_names().collect::<Vec<_>>().join(", ")))
        })?;
        Self::parse(text, name)
    }

    /// A shipped scene name or a path to a scene file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if shipped_text(name_or_path).is_some() {
            Self::shipped(name_or_path)
        } else {
            Self::load(Path::new(name_or_path))
        }
    }

    /// Canonical TOML of the parsed content.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// SHA-256 of the canonical form: equal content gives an equal hash regardless of layout.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path_of(&self, p: &Path) -> PathBuf {
        match (&self.base_dir, p.is_relative()) {
            (Some(d), true) => d.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Sets a dotted key (`detector.distance_m`) from a TOML literal and re-validates types.
    pub fn set_key(&mut self, key: &str, literal: &str) -> Result<()> {
        let parsed: toml::Value = toml::from_str(&format!("v = {literal}"))
            .map(|t: toml::Table| t["v"].clone())
            .or_else(|_| Ok::<_, Error>(toml::Value::String(literal.to_string())))?;
        let mut root = toml::Value::try_from(&*self).map_err(|e| Error::Validation(e.to_string()))?;
        let parts: Vec<&str> = key.split('.').collect();
        let mut node = &mut root;
        for (i, part) in parts.iter().enumerate() {
            let table = node.as_table_mut().ok_or_else(|| invalid(key, "not a table path"))?;
            if i + 1 == parts.len() {
                table.insert(part.to_string(), parsed.clone());
                break;
            }
            node = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let base = self.base_dir.clone();
        let text = toml::to_string(&root).map_err(|e| Error::Validation(e.to_string()))?;
        *self = Self::parse(&text, key)?;
        self.base_dir = base;
        Ok(())
    }

    pub fn velocities(&self) -> Result<Vec<f64>> {
        match (&self.beam.velocities_mps, &self.beam.velocity_grid_mps) {
            (Some(v), None) => Ok(v.clone()),
            (None, Some([a, b, n])) => {
                let n = *n as usize;
                if n == 1 {
                    return Ok(vec![*a]);
                }
                Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
            }
            _ => Err(invalid("beam", "set exactly one of velocities_mps or velocity_grid_mps")),
        }
    }

    /// Flux weight n(v) of every velocity (1 for a flat spectrum).
    pub fn weights(&self, velocities: &[f64]) -> Result<Vec<f64>> {
        if let Some([mean, sigma]) = self.beam.spectrum_gaussian_mps {
            return Ok(velocities.iter().map(|v| (-(v - mean).powi(2) / (2.0 * sigma * sigma)).exp()).collect());
        }
        if let Some(p) = &self.beam.spectrum_file {
            let path = self.path_of(p);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
            let (vs, ws) = parse_spectrum(&text, &path.display().to_string())?;
            return velocities.iter().map(|&v| interpolate(&vs, &ws, v)).collect();
        }
        Ok(vec![1.0; velocities.len()])
    }

    pub fn variants(&self) -> Vec<Variant> {
        let hs = self.absorber.height_m.values();
        let es = self.accelerations.extra_mps2.values();
        let mut out = Vec::new();
        for (i, &h) in hs.iter().enumerate() {
            for (j, &e) in es.iter().enumerate() {
                let mut parts = Vec::new();
                if hs.len() > 1 {
                    parts.push(format!("h{i}"));
                }
                if es.len() > 1 {
                    parts.push(format!("a{j}"));
                }
                out.push(Variant { index: out.len(), absorber_height: h, extra_accel: e, label: parts.join("-") });
            }
        }
        out
    }

    /// Signed gravity component normal to the mirror.
    pub fn mirror_gravity(&self) -> f64 {
        if self.accelerations.gravity {
            self.mirror.orientation.sign() * self.accelerations.gravity_mps2
        } else {
            0.0
        }
    }

    /// Total normal acceleration on the mirror at velocity v.
    pub fn mirror_accel(&self, v: f64) -> f64 {
        let centrifugal = self.mirror.radius_m.map_or(0.0, |r| v * v / r);
        centrifugal + self.mirror_gravity()
    }

    pub fn wall_model(&self) -> Result<QrModel> {
        let m = &self.mirror;
        match m.wall.as_str() {
            "hard" => Ok(QrModel::HardWall),
            "table" => {
                let p = m.wall_table.as_ref().ok_or_else(|| invalid("mirror.wall_table", "required for wall = \"table\""))?;
                Ok(QrModel::Tabulated(QrTable::load(&self.path_of(p))?))
            }
            "scattering-length" => {
                let [re, im] = m
                    .wall_scattering_length_m
                    .ok_or_else(|| invalid("mirror.wall_scattering_length_m", "required for wall = \"scattering-length\""))?;
                QrModel::scattering_length(num_complex::Complex64::new(re, im))
                    .map_err(|e| invalid("mirror.wall_scattering_length_m", e))
            }
            name => match shipped_table(name) {
                Some(t) => Ok(QrModel::Tabulated(t?)),
                None => Err(invalid("mirror.wall", format!("unknown wall model `{name}`"))),
            },
        }
    }

    /// Checks values, cross-field consistency and referenced files.
    pub fn validate(&self, catalog: &Catalog) -> Result<()> {
        require(!self.name.is_empty(), "name", "must not be empty")?;
        catalog.get(&self.particle).map_err(|e| invalid("particle", e))?;
        positive("mirror.length_m", self.mirror.length_m)?;
        if let Some(r) = self.mirror.radius_m {
            positive("mirror.radius_m", r)?;
        }
        self.wall_model()?;
        require(
            self.absorber.length_m >= 0.0 && self.absorber.length_m <= self.mirror.length_m,
            "absorber.length_m",
            "must lie in [0, mirror.length_m]",
        )?;
        let hs = self.absorber.height_m.values();
        require(!hs.is_empty(), "absorber.height_m", "needs at least one value")?;
        for h in hs {
            positive("absorber.height_m", h)?;
        }
        positive("accelerations.gravity_mps2", self.accelerations.gravity_mps2)?;
        for e in self.accelerations.extra_mps2.values() {
            require(e.is_finite(), "accelerations.extra_mps2", "must be finite")?;
        }
        let vs = self.velocities()?;
        require(!vs.is_empty(), "beam", "needs at least one velocity")?;
        for &v in &vs {
            positive("beam.velocities_mps", v)?;
            require(self.mirror_accel(v) > 0.0, "mirror", format!("net normal acceleration at v = {v} m/s is not positive"))?;
        }
        if vs.len() > 1 {
            let d = vs[1] - vs[0];
            require(
                vs.windows(2).all(|w| ((w[1] - w[0]) / d - 1.0).abs() < 1e-9 && d > 0.0),
                "beam.velocities_mps",
                "must be increasing and uniformly spaced",
            )?;
        }
        if let Some([_, n]) = self.beam.velocity_grid_mps.map(|g| [g[0], g[2]]) {
            require(n >= 1.0 && n.fract() == 0.0, "beam.velocity_grid_mps", "count must be a positive integer")?;
        }
        if let Some([m, s]) = self.beam.spectrum_gaussian_mps {
            positive("beam.spectrum_gaussian_mps[0]", m)?;
            positive("beam.spectrum_gaussian_mps[1]", s)?;
        }
        require(
            !(self.beam.spectrum_gaussian_mps.is_some() && self.beam.spectrum_file.is_some()),
            "beam",
            "spectrum_gaussian_mps and spectrum_file are exclusive",
        )?;
        if let Some(p) = &self.beam.spectrum_file {
            require(self.path_of(p).exists(), "beam.spectrum_file", format!("{} does not exist", p.display()))?;
        }
        if let Some(p) = &self.mirror.wall_table {
            require(self.path_of(p).exists(), "mirror.wall_table", format!("{} does not exist", p.display()))?;
        }
        require(self.beam.k_perp_per_m.is_finite(), "beam.k_perp_per_m", "must be finite")?;
        require(self.outputs.pattern || self.outputs.surface_current, "outputs", "nothing to compute")?;
        if self.outputs.pattern {
            let d = self.detector.as_ref().ok_or_else(|| invalid("detector", "required when outputs.pattern = true"))?;
            positive("detector.distance_m", d.distance_m)?;
            if let Some(t) = d.tof_distance_m {
                positive("detector.tof_distance_m", t)?;
            }
            require(d.x_resolution_m >= 0.0, "detector.x_resolution_m", "must be >= 0")?;
            require(d.time_resolution_s >= 0.0, "detector.time_resolution_s", "must be >= 0")?;
            require(d.x_range_m[1] > d.x_range_m[0], "detector.x_range_m", "must be increasing")?;
            require(d.x_points >= 3, "detector.x_points", "must be >= 3")?;
        }
        if self.outputs.surface_current {
            require(self.outputs.z_points >= 3, "outputs.z_points", "must be >= 3")?;
            require(
                self.absorber.length_m < self.mirror.length_m,
                "absorber.length_m",
                "surface current needs mirror beyond the absorber",
            )?;
        }
        if let Some(s) = &self.sensitivity {
            require(self.outputs.pattern, "sensitivity", "needs outputs.pattern = true")?;
            require(s.events.is_some() != s.phase_space.is_some(), "sensitivity", "set exactly one of events or phase_space")?;
            if let Some(n) = s.events {
                require(n >= 1.0, "sensitivity.events", "must be >= 1")?;
            }
            if let Some(p) = &s.phase_space {
                for (f, v) in [
                    ("density_per_m3", p.density_per_m3),
                    ("v_max_mps", p.v_max_mps),
                    ("beam_width_m", p.beam_width_m),
                    ("longitudinal_window_mps", p.longitudinal_window_mps),
                    ("lateral_window_mps", p.lateral_window_mps),
                    ("duration_s", p.duration_s),
                ] {
                    positive(&format!("sensitivity.phase_space.{f}"), v)?;
                }
            }
            if let Some(st) = s.step_mps2 {
                positive("sensitivity.step_mps2", st)?;
            }
            if let Some(f) = s.field_v_per_m {
                positive("sensitivity.field_v_per_m", f)?;
            }
            if s.parameter == SensitivityParameter::Gravity {
                require(self.accelerations.gravity, "sensitivity.parameter", "gravity is switched off")?;
            }
        }
        require(self.solver.oversample >= 1.0, "solver.oversample", "must be >= 1")?;
        require(
            self.solver.capture_target > 0.0 && self.solver.capture_target < 1.0,
            "solver.capture_target",
            "must lie in (0, 1)",
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenes_parse_and_validate() {
        let cat = Catalog::default();
        for name in shipped_names() {
            let s = Scenario::shipped(name).unwrap();
            assert_eq!(s.name, name);
            s.validate(&cat).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn hash_ignores_layout_but_not_content() {
        let text = shipped_text("vcn-gqs").unwrap();
        let a = Scenario::parse(text, "a").unwrap();
        let b = Scenario::parse(&format!("# comment\n{text}\n\n"), "b").unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.set_key("detector.distance_m", "7.5").unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(c.detector.unwrap().distance_m, 7.5);
    }

    #[test]
    fn validation_names_the_field() {
        let mut s = Scenario::shipped("vcn-gqs").unwrap();
        s.set_key("absorber.length_m", "2.0").unwrap();
        let e = s.validate(&Catalog::default()).unwrap_err().to_string();
        assert!(e.contains("absorber.length_m"), "{e}");
        let e = Scenario::parse("name = 1", "x").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
    }

    #[test]
    fn orientation_flips_gravity() {
        let mut s = Scenario::shipped("h-wgs").unwrap();
        let up = s.mirror_accel(120.0);
        s.set_key("mirror.orientation", "\"down\"").unwrap();
        let down = s.mirror_accel(120.0);
        assert!((up - down - 2.0 * G_STANDARD).abs() < 1e-9);
    }
}

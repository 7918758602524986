use crate::error::{ensure, Result};
use crate::numerics::simpson_weights;

/// Uniform height grid x_i = i dx, i = 0..n (n odd), with Simpson weights.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightGrid {
    dx: f64,
    n: usize,
    weights: Vec<f64>,
}

/// Minimum samples per local de Broglie wavelength of the highest retained state.
pub const POINTS_PER_WAVELENGTH: f64 = 16.0;
/// Extra height beyond the highest turning point, in characteristic lengths.
pub const TAIL_LENGTHS: f64 = 8.0;
/// Default oversampling relative to the minimum rule.
pub const DEFAULT_OVERSAMPLE: f64 = 2.0;

impl HeightGrid {
    pub fn new(dx: f64, n_points: usize) -> Result<Self> {
        ensure(dx > 0.0 && dx.is_finite(), || format!("grid spacing must be positive, got {dx}"))?;
        ensure(n_points >= 3 && n_points % 2 == 1, || {
            format!("grid needs an odd number (>= 3) of points, got {n_points}")
        })?;
        Ok(Self { dx, n: n_points, weights: simpson_weights(n_points, dx) })
    }

    /// Grid reaching at least `x_max` with spacing at most `dx_max`. When `node` is given the
    /// spacing is chosen so that `node` falls on an even grid index (a Simpson panel edge).
    pub fn covering(x_max: f64, dx_max: f64, node: Option<f64>) -> Result<Self> {
        ensure(x_max > 0.0 && dx_max > 0.0, || "grid extent and spacing must be positive".into())?;
        let dx = match node {
            Some(h) => {
                ensure(h > 0.0 && h <= x_max * (1.0 + 1e-12), || format!("node {h} outside grid"))?;
                let panels = (h / (2.0 * dx_max)).ceil().max(1.0);
                h / (2.0 * panels)
            }
            None => dx_max,
        };
        let mut n = (x_max / dx).ceil() as usize + 1;
        if n.is_multiple_of(2) {
            n += 1;
        }
        Self::new(dx, n.max(3))
    }

    /// Grid satisfying the resolution rule for states up to scaled energy `lambda_max`
    /// (turning point lambda_max * l). Covers `min_extent` as well.
    pub fn for_states(char_length: f64, lambda_max: f64, min_extent: f64, node: Option<f64>, oversample: f64) -> Result<Self> {
        ensure(char_length > 0.0 && lambda_max > 0.0, || "need positive length scale and energy".into())?;
        let x_max = ((lambda_max + TAIL_LENGTHS) * char_length).max(min_extent);
        let wavelength = std::f64::consts::TAU * char_length / lambda_max.sqrt();
        let dx = (wavelength / (POINTS_PER_WAVELENGTH * oversample.max(1.0))).min(char_length / 20.0);
        Self::covering(x_max, dx, node)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }
    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }
    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.n);
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
    /// Index of the node at x (nearest).
    pub fn index_of(&self, x: f64) -> usize {
        ((x / self.dx).round() as usize).min(self.n - 1)
    }

    /// Same spacing, extended to at least `x_max`.
    pub fn extended(&self, x_max: f64) -> Result<Self> {
        if x_max <= self.x_max() {
            return Ok(self.clone());
        }
        Self::covering(x_max, self.dx, None)
    }

    /// Checks that this grid resolves states up to `lambda_max`.
    pub fn check_resolves(&self, char_length: f64, lambda_max: f64) -> Result<()> {
        let need = (lambda_max + TAIL_LENGTHS) * char_length;
        ensure(self.x_max() >= need * (1.0 - 1e-12), || {
            format!("grid ends at {:.3e} m but states need {:.3e} m", self.x_max(), need)
        })?;
        let wavelength = std::f64::consts::TAU * char_length / lambda_max.sqrt();
        ensure(self.dx <= wavelength / POINTS_PER_WAVELENGTH, || {
            format!("grid spacing {:.3e} m coarser than wavelength/16 = {:.3e} m", self.dx, wavelength / 16.0)
        })
    }
}

//! One-photon spectral densities and the temporal envelopes they produce.
//!
//! Frequencies are angular offsets `Ω` (rad/s) from half the pump frequency.
//! Densities integrate to one over `Ω`. All integrals over a
//! [`FrequencyGrid`] use composite Simpson weights; a rectangular passband
//! whose edges sit on even grid indices is sampled at half height there,
//! which makes the rule exact for that density.

use crate::error::{Error, Result};

/// Points on the default working grid.
pub const DEFAULT_SPECTRAL_POINTS: usize = 1025;

/// Uniform grid of frequency offsets, symmetric about `Ω = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    half_width: f64,
    point_count: usize,
}

impl FrequencyGrid {
    pub fn new(half_width: f64, point_count: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if point_count < 3 || point_count.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "point count must be odd and at least 3, got {point_count}"
            )));
        }
        Ok(Self {
            half_width,
            point_count,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.point_count - 1) as f64
    }

    pub fn center_index(&self) -> usize {
        (self.point_count - 1) / 2
    }

    /// Offset of grid point `k`. Computed from the center so that
    /// `point(mirror(k)) == -point(k)` holds bit for bit.
    pub fn point(&self, k: usize) -> f64 {
        let c = self.center_index() as f64;
        (k as f64 - c) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.point_count).map(|k| self.point(k)).collect()
    }

    /// Index of `-Ω_k`.
    pub fn mirror(&self, k: usize) -> usize {
        self.point_count - 1 - k
    }

    /// Composite Simpson weights `h/3 · [1, 4, 2, 4, …, 2, 4, 1]`.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.point_count;
        let h3 = self.spacing() / 3.0;
        (0..n)
            .map(|k| {
                if k == 0 || k == n - 1 {
                    h3
                } else if k % 2 == 1 {
                    4.0 * h3
                } else {
                    2.0 * h3
                }
            })
            .collect()
    }

    /// Same extent with half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            point_count: 2 * self.point_count - 1,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.point_count).all(|k| self.point(self.mirror(k)) == -self.point(k))
    }
}

/// Shape of `|ψ(Ω)|²`, all centered at `Ω = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralShape {
    /// Flat passband of the given full width (rad/s).
    Rectangular { full_width: f64 },
    /// Normal density with the given rms width (rad/s).
    Gaussian { rms_width: f64 },
    /// Samples `(Ω, density)` sorted by `Ω`, linearly interpolated and zero
    /// outside the table.
    Tabulated(Vec<(f64, f64)>),
}

/// Spectral density `|ψ(Ω)|²` of one down-converted photon: a shape times a
/// scale factor. The analytic shapes have unit integral at scale 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    shape: SpectralShape,
    scale: f64,
}

impl SpectralDensity {
    pub fn rectangular(full_width: f64) -> Result<Self> {
        if !(full_width.is_finite() && full_width > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "rectangular full width must be positive, got {full_width}"
            )));
        }
        Ok(Self {
            shape: SpectralShape::Rectangular { full_width },
            scale: 1.0,
        })
    }

    pub fn gaussian(rms_width: f64) -> Result<Self> {
        if !(rms_width.is_finite() && rms_width > 0.0) {
            return Err(Error::InvalidDensity(format!(
                "gaussian rms width must be positive, got {rms_width}"
            )));
        }
        Ok(Self {
            shape: SpectralShape::Gaussian { rms_width },
            scale: 1.0,
        })
    }

    pub fn tabulated(mut table: Vec<(f64, f64)>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::InvalidDensity(
                "tabulated density needs at least two samples".into(),
            ));
        }
        if table
            .iter()
            .any(|&(w, d)| !w.is_finite() || !d.is_finite() || d < 0.0)
        {
            return Err(Error::InvalidDensity(
                "tabulated samples must be finite with nonnegative density".into(),
            ));
        }
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        if table.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDensity(
                "tabulated frequencies must be distinct".into(),
            ));
        }
        Ok(Self {
            shape: SpectralShape::Tabulated(table),
            scale: 1.0,
        })
    }

    /// Returns a copy multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            scale: self.scale * factor,
        }
    }

    pub fn shape(&self) -> &SpectralShape {
        &self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Half width of the region where the density is appreciable. The
    /// default working grid extends four times past it; for the Gaussian
    /// the support is taken as 2σ so the grid reaches 8σ.
    pub fn support_half_width(&self) -> f64 {
        match &self.shape {
            SpectralShape::Rectangular { full_width } => 0.5 * full_width,
            SpectralShape::Gaussian { rms_width } => 2.0 * rms_width,
            SpectralShape::Tabulated(t) => {
                let support = t
                    .iter()
                    .filter(|(_, d)| *d > 0.0)
                    .map(|(w, _)| w.abs())
                    .fold(0.0, f64::max);
                if support > 0.0 {
                    support
                } else {
                    t[0].0
                        .abs()
                        .max(t[t.len() - 1].0.abs())
                        .max(f64::MIN_POSITIVE)
                }
            }
        }
    }

    pub fn default_grid(&self) -> FrequencyGrid {
        FrequencyGrid::new(4.0 * self.support_half_width(), DEFAULT_SPECTRAL_POINTS)
            .expect("support half width is positive")
    }

    /// Density at one offset, as sampled onto grids. Passband edges of the
    /// rectangle take half height.
    pub fn density(&self, omega: f64) -> f64 {
        let base = match &self.shape {
            SpectralShape::Rectangular { full_width } => {
                let edge = 0.5 * full_width;
                let d = omega.abs() - edge;
                if d.abs() <= 1e-9 * edge {
                    0.5 / full_width
                } else if d < 0.0 {
                    1.0 / full_width
                } else {
                    0.0
                }
            }
            SpectralShape::Gaussian { rms_width } => {
                let z = omega / rms_width;
                (-0.5 * z * z).exp() / (rms_width * (2.0 * std::f64::consts::PI).sqrt())
            }
            SpectralShape::Tabulated(t) => interpolate(t, omega),
        };
        self.scale * base
    }

    pub fn sample(&self, grid: &FrequencyGrid) -> Vec<f64> {
        grid.points().into_iter().map(|w| self.density(w)).collect()
    }

    /// Probability carried by each grid mode: density times quadrature weight.
    pub fn mode_weights(&self, grid: &FrequencyGrid) -> Vec<f64> {
        self.sample(grid)
            .into_iter()
            .zip(grid.weights())
            .map(|(d, w)| d * w)
            .collect()
    }

    pub fn integral(&self, grid: &FrequencyGrid) -> f64 {
        self.mode_weights(grid).iter().sum()
    }

    /// True when `|ψ(-Ω)|² = |ψ(Ω)|²` at every grid point, to 1e-12 of the
    /// peak density.
    pub fn is_even(&self, grid: &FrequencyGrid) -> bool {
        let s = self.sample(grid);
        let peak = s.iter().cloned().fold(0.0, f64::max);
        let tol = 1e-12 * peak.max(f64::MIN_POSITIVE);
        (0..s.len()).all(|k| (s[k] - s[grid.mirror(k)]).abs() <= tol)
    }

    pub fn normalized(&self, grid: &FrequencyGrid) -> Result<Self> {
        normalize(self, grid)
    }
}

fn interpolate(table: &[(f64, f64)], x: f64) -> f64 {
    let first = table[0];
    let last = table[table.len() - 1];
    if x < first.0 || x > last.0 {
        return 0.0;
    }
    // The table drops to zero past its ends; sample that step at half height.
    let tol = 1e-9 * (last.0 - first.0);
    if (x - first.0).abs() <= tol {
        return 0.5 * first.1;
    }
    if (x - last.0).abs() <= tol {
        return 0.5 * last.1;
    }
    let j = table.partition_point(|p| p.0 <= x);
    if j == 0 {
        return first.1;
    }
    if j == table.len() {
        return last.1;
    }
    let (x0, y0) = table[j - 1];
    let (x1, y1) = table[j];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Rescales `sd` so that it integrates to one on `grid`.
pub fn normalize(sd: &SpectralDensity, grid: &FrequencyGrid) -> Result<SpectralDensity> {
    let total = sd.integral(grid);
    if !(total > 1e-300) {
        return Err(Error::ZeroDensity(total));
    }
    Ok(sd.scaled(1.0 / total))
}

/// Frequency modes `(Ω_k, p_k)` with nonzero probability, precomputed for
/// repeated envelope evaluation.
#[derive(Debug, Clone)]
pub struct SpectralEnvelope {
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralEnvelope {
    pub fn new(sd: &SpectralDensity, grid: &FrequencyGrid) -> Self {
        Self::from_mode_weights(grid, &sd.mode_weights(grid))
    }

    /// Builds from per-mode probabilities already on `grid`.
    pub fn from_mode_weights(grid: &FrequencyGrid, weights: &[f64]) -> Self {
        let (offsets, weights) = grid
            .points()
            .into_iter()
            .zip(weights.iter().copied())
            .filter(|&(_, p)| p != 0.0)
            .unzip();
        Self { offsets, weights }
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `E₁(τ) = ∫ dΩ |ψ(Ω)|² cos(Ωτ)`.
    pub fn first_order(&self, tau: f64) -> f64 {
        self.offsets
            .iter()
            .zip(&self.weights)
            .map(|(w, p)| p * (w * tau).cos())
            .sum()
    }

    /// `E₂(τ) = ∫ dΩ |ψ(Ω)|² cos(2Ωτ)`, evaluated as `E₁(2τ)`.
    pub fn second_order(&self, tau: f64) -> f64 {
        self.first_order(2.0 * tau)
    }

    /// Smallest positive `τ` with `E₁(τ) = 0`, searched up to `limit`.
    pub fn first_zero(&self, limit: f64) -> Option<f64> {
        const STEPS: usize = 20_000;
        let dt = limit / STEPS as f64;
        let mut prev = self.first_order(0.0);
        for j in 1..=STEPS {
            let t = j as f64 * dt;
            let cur = self.first_order(t);
            if cur == 0.0 {
                return Some(t);
            }
            // Sign flips in a vanishing tail are round-off, not zeros.
            if prev.signum() != cur.signum() && prev.abs().max(cur.abs()) > 1e-9 {
                let (mut lo, mut hi) = (t - dt, t);
                let flo = prev;
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let fm = self.first_order(mid);
                    if fm.signum() == flo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            prev = cur;
        }
        None
    }
}

pub fn envelope_first_order(sd: &SpectralDensity, grid: &FrequencyGrid, tau: f64) -> f64 {
    SpectralEnvelope::new(sd, grid).first_order(tau)
}

pub fn envelope_second_order(sd: &SpectralDensity, grid: &FrequencyGrid, tau: f64) -> f64 {
    SpectralEnvelope::new(sd, grid).second_order(tau)
}

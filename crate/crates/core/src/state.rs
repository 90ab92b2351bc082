//! Biphoton states and their one-photon reductions.
//!
//! A [`TwoPhotonState`] is a product of a spatial sector and a spectral
//! sector; the type has no way to express correlations between the two.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spatial::{SpatialAmplitude, SpatialDensityOperator, SpatialGrid};
use crate::spectral::{normalize, FrequencyGrid, SpectralDensity};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_PUMP_WAVELENGTH: f64 = 405e-9;
pub const DEFAULT_FILTER_CENTER: f64 = 810e-9;
pub const DEFAULT_FILTER_BANDWIDTH: f64 = 10e-9;
pub const DEFAULT_PUMP_WAIST: f64 = 1e-3;

/// `2πc/λ`.
pub fn angular_frequency(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

/// Angular bandwidth of a passband `Δλ` wide centered at `λ`: `2πcΔλ/λ²`.
pub fn angular_bandwidth(center: f64, width: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * width / (center * center)
}

/// Two-argument spatial amplitude `φ(x, x')` sampled on grid², normalized so
/// that `Σ |φ|² Δx² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpatialAmplitude {
    grid: SpatialGrid,
    values: DMatrix<Complex64>,
}

impl JointSpatialAmplitude {
    pub fn new(grid: SpatialGrid, values: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.point_count();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::InvalidState(format!(
                "joint spatial amplitude must be {n}x{n}"
            )));
        }
        let dx = grid.spacing();
        let n2 = values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx * dx;
        if !(n2 > 1e-300) {
            return Err(Error::InvalidState(
                "joint spatial amplitude is zero".into(),
            ));
        }
        Ok(Self {
            grid,
            values: values / Complex64::new(n2.sqrt(), 0.0),
        })
    }

    /// Unentangled `φ₁(x) φ₂(x')`.
    pub fn product(a: &SpatialAmplitude, b: &SpatialAmplitude) -> Result<Self> {
        if a.grid() != b.grid() {
            return Err(Error::InvalidState(
                "amplitudes live on different grids".into(),
            ));
        }
        let n = a.values().len();
        let m = DMatrix::from_fn(n, n, |i, j| a.values()[i] * b.values()[j]);
        Self::new(*a.grid(), m)
    }

    /// Symmetrized two-mode amplitude `(a(x)b(x') + b(x)a(x')) / √2`.
    pub fn symmetric_pair(a: &SpatialAmplitude, b: &SpatialAmplitude) -> Result<Self> {
        if a.grid() != b.grid() {
            return Err(Error::InvalidState(
                "amplitudes live on different grids".into(),
            ));
        }
        let n = a.values().len();
        let (u, v) = (a.values(), b.values());
        let m = DMatrix::from_fn(n, n, |i, j| u[i] * v[j] + v[i] * u[j]);
        Self::new(*a.grid(), m)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    /// Amplitudes with the `Δx` weights absorbed: unit Frobenius norm.
    pub fn discrete(&self) -> DMatrix<Complex64> {
        &self.values * Complex64::new(self.grid.spacing(), 0.0)
    }
}

/// Two-argument spectral amplitude `ψ(Ω, Ω')` on a frequency grid, normalized
/// with the grid's quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralAmplitude {
    grid: FrequencyGrid,
    values: DMatrix<Complex64>,
}

impl JointSpectralAmplitude {
    pub fn new(grid: FrequencyGrid, values: DMatrix<Complex64>) -> Result<Self> {
        let m = grid.point_count();
        if values.nrows() != m || values.ncols() != m {
            return Err(Error::InvalidState(format!(
                "joint spectral amplitude must be {m}x{m}"
            )));
        }
        let w = grid.weights();
        let mut n2 = 0.0;
        for k in 0..m {
            for l in 0..m {
                n2 += values[(k, l)].norm_sqr() * w[k] * w[l];
            }
        }
        if !(n2 > 1e-300) {
            return Err(Error::InvalidState(
                "joint spectral amplitude is zero".into(),
            ));
        }
        Ok(Self {
            grid,
            values: values / Complex64::new(n2.sqrt(), 0.0),
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    /// Amplitudes times `√(w_k w_l)`: unit Frobenius norm.
    pub fn discrete(&self) -> DMatrix<Complex64> {
        let w: Vec<f64> = self.grid.weights().into_iter().map(f64::sqrt).collect();
        DMatrix::from_fn(self.values.nrows(), self.values.ncols(), |k, l| {
            self.values[(k, l)] * (w[k] * w[l])
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpatialSector {
    /// `φ(x, x') = φ(x) δ(x - x')` with `φ` the pump profile.
    CorrelatedPump(SpatialAmplitude),
    GeneralSpatial(JointSpatialAmplitude),
}

impl SpatialSector {
    pub fn grid(&self) -> &SpatialGrid {
        match self {
            SpatialSector::CorrelatedPump(p) => p.grid(),
            SpatialSector::GeneralSpatial(j) => j.grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralSector {
    /// `ψ(Ω, Ω') = ψ(Ω) δ(Ω + Ω')` with `ψ = √density` (zero spectral phase).
    AntiCorrelated {
        density: SpectralDensity,
        grid: FrequencyGrid,
    },
    GeneralSpectral(JointSpectralAmplitude),
}

impl SpectralSector {
    /// Normalizes `density` on `grid`.
    pub fn anti_correlated(density: &SpectralDensity, grid: FrequencyGrid) -> Result<Self> {
        Ok(SpectralSector::AntiCorrelated {
            density: normalize(density, &grid)?,
            grid,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        match self {
            SpectralSector::AntiCorrelated { grid, .. } => grid,
            SpectralSector::GeneralSpectral(j) => j.grid(),
        }
    }
}

/// Separable biphoton state with pump frequency `ω_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    pub spatial: SpatialSector,
    pub spectral: SpectralSector,
    pub pump_frequency: f64,
}

impl TwoPhotonState {
    pub fn new(
        spatial: SpatialSector,
        spectral: SpectralSector,
        pump_frequency: f64,
    ) -> Result<Self> {
        if !(pump_frequency.is_finite() && pump_frequency > 0.0) {
            return Err(Error::InvalidState(format!(
                "pump frequency must be positive, got {pump_frequency}"
            )));
        }
        Ok(Self {
            spatial,
            spectral,
            pump_frequency,
        })
    }

    pub fn spatial_grid(&self) -> &SpatialGrid {
        self.spatial.grid()
    }

    pub fn frequency_grid(&self) -> &FrequencyGrid {
        self.spectral.grid()
    }

    /// Same spectral sector, different spatial sector.
    pub fn with_spatial(&self, spatial: SpatialSector) -> Self {
        Self {
            spatial,
            spectral: self.spectral.clone(),
            pump_frequency: self.pump_frequency,
        }
    }

    /// Pump profile, when the spatial sector is a correlated pump.
    pub fn pump(&self) -> Option<&SpatialAmplitude> {
        match &self.spatial {
            SpatialSector::CorrelatedPump(p) => Some(p),
            SpatialSector::GeneralSpatial(_) => None,
        }
    }
}

/// One-photon spectral density operator.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensityOperator {
    /// `|ψ(Ω)|² δ(Ω - Ω')`.
    Diagonal {
        density: SpectralDensity,
        grid: FrequencyGrid,
    },
    /// Matrix with quadrature weights absorbed (unit trace).
    General {
        grid: FrequencyGrid,
        matrix: DMatrix<Complex64>,
    },
}

impl SpectralDensityOperator {
    pub fn grid(&self) -> &FrequencyGrid {
        match self {
            SpectralDensityOperator::Diagonal { grid, .. } => grid,
            SpectralDensityOperator::General { grid, .. } => grid,
        }
    }

    /// Probability of each frequency mode (the diagonal).
    pub fn mode_weights(&self) -> Vec<f64> {
        match self {
            SpectralDensityOperator::Diagonal { density, grid } => density.mode_weights(grid),
            SpectralDensityOperator::General { matrix, .. } => {
                (0..matrix.nrows()).map(|k| matrix[(k, k)].re).collect()
            }
        }
    }

    pub fn trace(&self) -> f64 {
        self.mode_weights().iter().sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        match self {
            SpectralDensityOperator::Diagonal { .. } => true,
            SpectralDensityOperator::General { matrix, .. } => {
                let n = matrix.nrows();
                (0..n)
                    .all(|i| (0..n).all(|j| (matrix[(i, j)] - matrix[(j, i)].conj()).norm() <= tol))
            }
        }
    }
}

/// Reduced state of either photon.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePhotonState {
    pub spatial: SpatialDensityOperator,
    pub spectral: SpectralDensityOperator,
    pub central_frequency: f64,
}

/// Traces out the partner photon.
pub fn reduce_to_one_photon(state: &TwoPhotonState) -> Result<OnePhotonState> {
    let spatial = match &state.spatial {
        SpatialSector::CorrelatedPump(phi) => SpatialDensityOperator::incoherent(phi),
        SpatialSector::GeneralSpatial(joint) => {
            let c = joint.discrete();
            let rho = &c * c.adjoint();
            SpatialDensityOperator::general(*joint.grid(), rho)?
        }
    };
    let spectral = match &state.spectral {
        SpectralSector::AntiCorrelated { density, grid } => SpectralDensityOperator::Diagonal {
            density: density.clone(),
            grid: *grid,
        },
        SpectralSector::GeneralSpectral(joint) => {
            let f = joint.discrete();
            SpectralDensityOperator::General {
                grid: *joint.grid(),
                matrix: &f * f.adjoint(),
            }
        }
    };
    Ok(OnePhotonState {
        spatial,
        spectral,
        central_frequency: 0.5 * state.pump_frequency,
    })
}

/// 405 nm pump, 10 nm rectangular filter at 810 nm, even 1 mm Gaussian pump
/// profile, default grids.
pub fn default_spdc_state() -> TwoPhotonState {
    spdc_state(
        DEFAULT_PUMP_WAVELENGTH,
        &SpectralDensity::rectangular(angular_bandwidth(
            DEFAULT_FILTER_CENTER,
            DEFAULT_FILTER_BANDWIDTH,
        ))
        .expect("positive bandwidth"),
        SpatialAmplitude::gaussian(SpatialGrid::default(), DEFAULT_PUMP_WAIST)
            .expect("positive waist"),
    )
    .expect("default state is valid")
}

/// Correlated-pump, anti-correlated-spectrum state on the density's default
/// frequency grid.
pub fn spdc_state(
    pump_wavelength: f64,
    density: &SpectralDensity,
    pump: SpatialAmplitude,
) -> Result<TwoPhotonState> {
    TwoPhotonState::new(
        SpatialSector::CorrelatedPump(pump),
        SpectralSector::anti_correlated(density, density.default_grid())?,
        angular_frequency(pump_wavelength),
    )
}

//! Transverse amplitudes, one-photon spatial density operators, and the two
//! parity functionals that decide what a spatial flip does to interference.
//!
//! Positions live on a [`SpatialGrid`] symmetric about `x = 0`, so the flip
//! `x → -x` is an index reversal. Amplitudes are normalized with
//! `Σ |φ(xᵢ)|² Δx = 1`. Density operators store `ρ(xᵢ, xⱼ) Δx`, which gives
//! them unit trace and makes `δ(x - x')` a Kronecker delta.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_SPATIAL_HALF_WIDTH: f64 = 3e-3;
pub const DEFAULT_SPATIAL_POINTS: usize = 257;

const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    half_width: f64,
    point_count: usize,
}

impl Default for SpatialGrid {
    fn default() -> Self {
        Self {
            half_width: DEFAULT_SPATIAL_HALF_WIDTH,
            point_count: DEFAULT_SPATIAL_POINTS,
        }
    }
}

impl SpatialGrid {
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

    pub fn point(&self, i: usize) -> f64 {
        (i as f64 - self.center_index() as f64) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.point_count).map(|i| self.point(i)).collect()
    }

    /// Index of `-xᵢ`.
    pub fn mirror(&self, i: usize) -> usize {
        self.point_count - 1 - i
    }

    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            point_count: 2 * self.point_count - 1,
        }
    }
}

fn squared_norm(grid: &SpatialGrid, values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.spacing()
}

/// Normalized transverse amplitude `φ(x)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialAmplitude {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl SpatialAmplitude {
    /// Normalizes `values` to unit norm on `grid`.
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.point_count() {
            return Err(Error::InvalidState(format!(
                "amplitude has {} samples, grid has {}",
                values.len(),
                grid.point_count()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidState(
                "amplitude has non-finite samples".into(),
            ));
        }
        let n2 = squared_norm(&grid, &values);
        if !(n2 > 1e-300) {
            return Err(Error::InvalidState("amplitude is zero on the grid".into()));
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self {
            grid,
            values: values.into_iter().map(|v| v * s).collect(),
        })
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    /// Fundamental Gaussian `exp(-x²/w²)` with `w` the 1/e² intensity radius.
    pub fn gaussian(grid: SpatialGrid, waist: f64) -> Result<Self> {
        Self::shifted_gaussian(grid, waist, 0.0)
    }

    pub fn shifted_gaussian(grid: SpatialGrid, waist: f64, offset: f64) -> Result<Self> {
        check_waist(waist)?;
        Self::from_fn(grid, |x| {
            let z = (x - offset) / waist;
            Complex64::new((-z * z).exp(), 0.0)
        })
    }

    /// First-order Hermite–Gauss mode `x exp(-x²/w²)`, odd under the flip.
    pub fn hermite_gauss1(grid: SpatialGrid, waist: f64) -> Result<Self> {
        check_waist(waist)?;
        Self::from_fn(grid, |x| {
            let z = x / waist;
            Complex64::new(z * (-z * z).exp(), 0.0)
        })
    }

    /// Linear interpolation of `(x, value)` samples, zero outside the table.
    pub fn from_table(grid: SpatialGrid, mut table: Vec<(f64, Complex64)>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::InvalidState(
                "tabulated profile needs at least two samples".into(),
            ));
        }
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::from_fn(grid, |x| {
            let (first, last) = (table[0], table[table.len() - 1]);
            if x < first.0 || x > last.0 {
                return Complex64::new(0.0, 0.0);
            }
            let j = table
                .partition_point(|p| p.0 <= x)
                .clamp(1, table.len() - 1);
            let (x0, y0) = table[j - 1];
            let (x1, y1) = table[j];
            if x1 == x0 {
                y0
            } else {
                y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
            }
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        squared_norm(&self.grid, &self.values)
    }

    /// `φ(-x)`.
    pub fn flipped(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn with_global_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * p).collect(),
        }
    }

    /// `Σ conj(self) · other · Δx`.
    pub fn inner(&self, other: &SpatialAmplitude) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.spacing()
    }

    /// Samples scaled by `√Δx`; unit Euclidean norm.
    pub fn discrete(&self) -> Vec<Complex64> {
        let s = self.grid.spacing().sqrt();
        self.values.iter().map(|v| v * s).collect()
    }
}

fn check_waist(waist: f64) -> Result<()> {
    if waist.is_finite() && waist > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidState(format!(
            "beam waist must be positive, got {waist}"
        )))
    }
}

/// A complex overlap in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityOverlap {
    pub magnitude: f64,
    pub phase: f64,
}

impl ParityOverlap {
    pub fn from_complex(z: Complex64) -> Self {
        Self {
            magnitude: z.norm(),
            phase: z.arg(),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// How a density operator was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    Coherent,
    Incoherent,
    General,
}

/// One-photon transverse density operator `ρₓ(x, x') Δx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialDensityOperator {
    grid: SpatialGrid,
    matrix: DMatrix<Complex64>,
    kind: DensityKind,
}

impl SpatialDensityOperator {
    /// Pure state `|φ⟩⟨φ|`.
    pub fn coherent(phi: &SpatialAmplitude) -> Self {
        let v = phi.discrete();
        let n = v.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj());
        Self {
            grid: phi.grid,
            matrix,
            kind: DensityKind::Coherent,
        }
    }

    /// Delta-correlated state `|φ(x)|² δ(x - x')`.
    pub fn incoherent(phi: &SpatialAmplitude) -> Self {
        let dx = phi.grid.spacing();
        let n = phi.values.len();
        let mut matrix = DMatrix::zeros(n, n);
        for (i, v) in phi.values.iter().enumerate() {
            matrix[(i, i)] = Complex64::new(v.norm_sqr() * dx, 0.0);
        }
        Self {
            grid: phi.grid,
            matrix,
            kind: DensityKind::Incoherent,
        }
    }

    /// Validates and Hermitian-symmetrizes an arbitrary matrix in the
    /// unit-trace convention.
    pub fn general(grid: SpatialGrid, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.point_count();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidState(format!(
                "density matrix is {}x{}, grid has {n} points",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let mut herm_err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                herm_err = herm_err.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        if herm_err > 1e-9 * scale {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (max deviation {herm_err:e})"
            )));
        }
        let matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        let min_eig = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOLERANCE {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self {
            grid,
            matrix,
            kind: DensityKind::General,
        })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    fn is_diagonal(&self) -> bool {
        let n = self.matrix.nrows();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == Complex64::new(0.0, 0.0)))
    }
}

/// `α = ∫ dx ρₓ(-x, x)`, the weight of one-photon fringes behind a flip.
pub fn flip_overlap(rho: &SpatialDensityOperator) -> ParityOverlap {
    let n = rho.matrix.nrows();
    let z: Complex64 = (0..n).map(|i| rho.matrix[(n - 1 - i, i)]).sum();
    ParityOverlap::from_complex(z)
}

/// `β = ∫ dx φ*(x) φ(-x)`. Always real for a normalized amplitude; ±1 for
/// even and odd pumps.
pub fn pump_parity_overlap(phi: &SpatialAmplitude) -> ParityOverlap {
    let n = phi.values.len();
    let z: Complex64 = (0..n)
        .map(|i| phi.values[i].conj() * phi.values[n - 1 - i])
        .sum::<Complex64>()
        * phi.grid.spacing();
    ParityOverlap::from_complex(z)
}

/// Even and odd parts of an amplitude. Neither part is normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityParts {
    pub grid: SpatialGrid,
    pub even: Vec<Complex64>,
    pub odd: Vec<Complex64>,
}

impl ParityParts {
    pub fn even_norm_sqr(&self) -> f64 {
        squared_norm(&self.grid, &self.even)
    }

    pub fn odd_norm_sqr(&self) -> f64 {
        squared_norm(&self.grid, &self.odd)
    }
}

pub fn parity_decompose(phi: &SpatialAmplitude) -> ParityParts {
    parity_decompose_values(phi.grid, &phi.values)
}

pub fn parity_decompose_values(grid: SpatialGrid, values: &[Complex64]) -> ParityParts {
    let n = values.len();
    let even = (0..n)
        .map(|i| (values[i] + values[n - 1 - i]) * 0.5)
        .collect();
    let odd = (0..n)
        .map(|i| (values[i] - values[n - 1 - i]) * 0.5)
        .collect();
    ParityParts { grid, even, odd }
}

/// One term of a coherent-mode expansion `ρ = Σ λⱼ |uⱼ⟩⟨uⱼ|`.
#[derive(Debug, Clone)]
pub struct CoherentMode {
    pub weight: f64,
    pub mode: SpatialAmplitude,
}

/// Coherent-mode decomposition. Diagonal operators keep grid order (mode `i`
/// is the delta at `xᵢ`); otherwise modes come in decreasing weight.
pub fn eigendecompose(rho: &SpatialDensityOperator) -> Result<Vec<CoherentMode>> {
    let grid = rho.grid;
    let n = grid.point_count();
    let inv_sqrt_dx = 1.0 / grid.spacing().sqrt();
    if rho.is_diagonal() {
        let mut modes = Vec::with_capacity(n);
        for i in 0..n {
            let w = rho.matrix[(i, i)].re;
            if w < -PSD_TOLERANCE {
                return Err(Error::NotPositive(w));
            }
            let mut values = vec![Complex64::new(0.0, 0.0); n];
            values[i] = Complex64::new(inv_sqrt_dx, 0.0);
            modes.push(CoherentMode {
                weight: w.max(0.0),
                mode: SpatialAmplitude { grid, values },
            });
        }
        return Ok(modes);
    }
    let eig = rho.matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut modes = Vec::with_capacity(n);
    for j in order {
        let w = eig.eigenvalues[j];
        if w < -PSD_TOLERANCE {
            return Err(Error::NotPositive(w));
        }
        let col = eig.eigenvectors.column(j);
        let values = col.iter().map(|v| v * inv_sqrt_dx).collect();
        modes.push(CoherentMode {
            weight: w.max(0.0),
            mode: SpatialAmplitude { grid, values },
        });
    }
    Ok(modes)
}

/// Reads a density matrix stored as rows of `re,im` pairs.
pub fn read_density_csv(
    path: impl AsRef<Path>,
    grid: SpatialGrid,
) -> Result<SpatialDensityOperator> {
    let n = grid.point_count();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut matrix = DMatrix::zeros(n, n);
    let mut row = 0;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if row >= n {
            return Err(Error::Parse(format!("line {line}: more than {n} rows")));
        }
        let nums = record
            .iter()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        if nums.len() != 2 * n {
            return Err(Error::Parse(format!(
                "line {line}: expected {} numbers, found {}",
                2 * n,
                nums.len()
            )));
        }
        for j in 0..n {
            matrix[(row, j)] = Complex64::new(nums[2 * j], nums[2 * j + 1]);
        }
        row += 1;
    }
    if row != n {
        return Err(Error::Parse(format!("expected {n} rows, found {row}")));
    }
    SpatialDensityOperator::general(grid, matrix)
}

pub fn write_density_csv(path: impl AsRef<Path>, rho: &SpatialDensityOperator) -> Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    for row in rho.matrix.row_iter() {
        out.write_record(
            row.iter()
                .flat_map(|z| [format!("{:e}", z.re), format!("{:e}", z.im)]),
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Normalization constant of the fundamental Gaussian, `(2/(πw²))^¼`.
pub fn gaussian_peak_amplitude(waist: f64) -> f64 {
    (2.0 / (PI * waist * waist)).powf(0.25)
}

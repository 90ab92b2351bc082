use num_complex::Complex64;

use super::branch::{
    initial_factors, symmetric_mode_weights, BeamSplitterConvention, BranchSumState, Element, Path,
    Port,
};
use crate::error::{Error, Result};
use crate::interferometer::Arm;
use crate::state::{SpatialSector, SpectralSector, TwoPhotonState};

/// Default memory cap for dense expansions: 1 GiB.
pub const DEFAULT_DENSE_BUDGET: u128 = 1 << 30;

const AMPLITUDE_BYTES: u128 = 16;

/// Full two-photon amplitude over `(path, position, frequency)²`, indexed
/// `(p·N + i)·M + k` per photon.
#[derive(Debug, Clone)]
pub struct DenseTensorState {
    n: usize,
    m: usize,
    amps: Vec<Complex64>,
    offsets: Vec<f64>,
    pump_frequency: f64,
    convention: BeamSplitterConvention,
    relabeled: bool,
}

fn check_budget(n: usize, m: usize, budget: u128) -> Result<()> {
    let d = 2 * n as u128 * m as u128;
    let required = d * d * AMPLITUDE_BYTES;
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

impl DenseTensorState {
    /// Builds the amplitude straight from the state's sectors.
    pub fn initial(
        state: &TwoPhotonState,
        convention: BeamSplitterConvention,
        budget: u128,
    ) -> Result<Self> {
        let n = state.spatial_grid().point_count();
        let m = state.frequency_grid().point_count();
        check_budget(n, m, budget)?;
        let (sf, ff) = initial_factors(state)?;
        let spatial = match &state.spatial {
            SpatialSector::CorrelatedPump(phi) => {
                let v = phi.discrete();
                let mut s = vec![Complex64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    s[i * n + i] = v[i];
                }
                s
            }
            SpatialSector::GeneralSpatial(_) => sf.to_matrix().transpose().as_slice().to_vec(),
        };
        let spectral = match &state.spectral {
            SpectralSector::AntiCorrelated { density, grid } => {
                let q = symmetric_mode_weights(density, grid);
                let mut f = vec![Complex64::new(0.0, 0.0); m * m];
                for k in 0..m {
                    f[k * m + (m - 1 - k)] = Complex64::new(q[k].sqrt(), 0.0);
                }
                f
            }
            SpectralSector::GeneralSpectral(_) => ff.to_matrix().transpose().as_slice().to_vec(),
        };
        let mut s = Self::zeros(
            n,
            m,
            state.frequency_grid().points(),
            state.pump_frequency,
            convention,
        );
        for i in 0..n {
            for j in 0..n {
                let a = spatial[i * n + j];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        let b = spectral[k * m + l];
                        if b.norm_sqr() != 0.0 {
                            let (x, y, d) = (s.index(0, i, k), s.index(0, j, l), s.dim());
                            s.amps[x * d + y] = a * b;
                        }
                    }
                }
            }
        }
        Ok(s)
    }

    /// Expands a branch sum.
    pub fn from_branches(state: &BranchSumState, n: usize, m: usize, budget: u128) -> Result<Self> {
        check_budget(n, m, budget)?;
        let mut s = Self::zeros(
            n,
            m,
            state.offsets().to_vec(),
            state.pump_frequency(),
            state.convention(),
        );
        s.relabeled = state.is_relabeled();
        let d = s.dim();
        for b in state.branches() {
            let (p0, p1) = (b.paths[0].index(), b.paths[1].index());
            let sp = b.spatial.entries();
            let fr = b.spectral.entries();
            for &(i, j, a) in &sp {
                for &(k, l, c) in &fr {
                    let x = s.index(p0, i, k);
                    let y = s.index(p1, j, l);
                    s.amps[x * d + y] += b.weight * a * c;
                }
            }
        }
        Ok(s)
    }

    fn zeros(
        n: usize,
        m: usize,
        offsets: Vec<f64>,
        pump_frequency: f64,
        convention: BeamSplitterConvention,
    ) -> Self {
        let d = 2 * n * m;
        Self {
            n,
            m,
            amps: vec![Complex64::new(0.0, 0.0); d * d],
            offsets,
            pump_frequency,
            convention,
            relabeled: false,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.n * self.m
    }

    fn index(&self, p: usize, i: usize, k: usize) -> usize {
        (p * self.n + i) * self.m + k
    }

    fn split(&self, x: usize) -> (usize, usize, usize) {
        (x / (self.n * self.m), (x / self.m) % self.n, x % self.m)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest `|ψ(x, y) - ψ(y, x)|`.
    pub fn exchange_asymmetry(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|x| (0..d).map(move |y| (x, y)))
            .map(|(x, y)| (self.amps[x * d + y] - self.amps[y * d + x]).norm())
            .fold(0.0, f64::max)
    }

    /// Applies a per-photon map `x → Σ c·y` to both slots.
    fn map_photons(&mut self, f: impl Fn(usize) -> Vec<(usize, Complex64)>) {
        let d = self.dim();
        let table: Vec<Vec<(usize, Complex64)>> = (0..d).map(&f).collect();
        let mut first = vec![Complex64::new(0.0, 0.0); d * d];
        for (x, row) in table.iter().enumerate() {
            for &(x2, c) in row {
                for y in 0..d {
                    first[x2 * d + y] += c * self.amps[x * d + y];
                }
            }
        }
        let mut second = vec![Complex64::new(0.0, 0.0); d * d];
        for y in 0..d {
            for &(y2, c) in &table[y] {
                for x in 0..d {
                    second[x * d + y2] += c * first[x * d + y];
                }
            }
        }
        self.amps = second;
    }

    pub fn apply(&mut self, element: &Element) -> Result<()> {
        if self.relabeled {
            return Err(Error::InvalidElement(format!(
                "{element:?} after the outputs were relabeled"
            )));
        }
        let arm_index = |a: Arm| match a {
            Arm::A => 0,
            Arm::B => 1,
        };
        match *element {
            Element::BeamSplitter => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                // u[out][in]
                let u = match self.convention {
                    BeamSplitterConvention::Symmetric => [
                        [Complex64::new(r, 0.0), Complex64::new(0.0, r)],
                        [Complex64::new(0.0, r), Complex64::new(r, 0.0)],
                    ],
                    BeamSplitterConvention::Rotation => [
                        [Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
                        [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                    ],
                };
                let (n, m) = (self.n, self.m);
                self.map_photons(|x| {
                    let (p, i, k) = (x / (n * m), (x / m) % n, x % m);
                    (0..2).map(|q| (((q * n + i) * m + k), u[q][p])).collect()
                });
            }
            Element::Delay { arm, tau } => {
                let pa = arm_index(arm);
                let phase: Vec<Complex64> = (0..self.dim())
                    .map(|x| {
                        let (p, _, k) = self.split(x);
                        if p == pa {
                            Complex64::from_polar(
                                1.0,
                                -(0.5 * self.pump_frequency + self.offsets[k]) * tau,
                            )
                        } else {
                            Complex64::new(1.0, 0.0)
                        }
                    })
                    .collect();
                let d = self.dim();
                for x in 0..d {
                    for y in 0..d {
                        self.amps[x * d + y] *= phase[x] * phase[y];
                    }
                }
            }
            Element::SpatialFlip { arm } => {
                let pa = arm_index(arm);
                let (n, m) = (self.n, self.m);
                self.map_photons(|x| {
                    let (p, i, k) = (x / (n * m), (x / m) % n, x % m);
                    let i2 = if p == pa { n - 1 - i } else { i };
                    vec![((p * n + i2) * m + k, Complex64::new(1.0, 0.0))]
                });
            }
            Element::RelabelOutputs => self.relabeled = true,
        }
        Ok(())
    }

    fn pair_probability(&self, q1: Path, q2: Path) -> f64 {
        let (p1, p2) = (q1.index(), q2.index());
        let nm = self.n * self.m;
        let d = self.dim();
        let mut total = 0.0;
        for x in p1 * nm..(p1 + 1) * nm {
            for y in p2 * nm..(p2 + 1) * nm {
                total += self.amps[x * d + y].norm_sqr();
            }
        }
        total
    }

    pub fn coincidence_rate(&self) -> Result<f64> {
        if !self.relabeled {
            return Err(Error::IncompletePipeline);
        }
        Ok(2.0
            * (self.pair_probability(Path::C, Path::D) + self.pair_probability(Path::D, Path::C)))
    }

    pub fn singles_rate(&self, port: Port) -> Result<f64> {
        if !self.relabeled {
            return Err(Error::IncompletePipeline);
        }
        let (q, o) = match port {
            Port::C => (Path::C, Path::D),
            Port::D => (Path::D, Path::C),
        };
        Ok(2.0 * self.pair_probability(q, q)
            + self.pair_probability(q, o)
            + self.pair_probability(o, q))
    }

    /// Largest amplitude difference against another expansion.
    pub fn max_difference(&self, other: &DenseTensorState) -> Result<f64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Dense expansion of a branch sum, sized from the state the branches came from.
pub fn to_dense(
    s: &BranchSumState,
    state: &TwoPhotonState,
    budget: u128,
) -> Result<DenseTensorState> {
    DenseTensorState::from_branches(
        s,
        state.spatial_grid().point_count(),
        state.frequency_grid().point_count(),
        budget,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::{SpatialAmplitude, SpatialGrid};
    use crate::spectral::{FrequencyGrid, SpectralDensity};
    use crate::state::{angular_bandwidth, default_spdc_state};

    fn small_state() -> TwoPhotonState {
        let sg = SpatialGrid::new(3e-3, 9).unwrap();
        let sd = SpectralDensity::rectangular(angular_bandwidth(810e-9, 10e-9)).unwrap();
        let fg = FrequencyGrid::new(sd.support_half_width() * 4.0, 17).unwrap();
        TwoPhotonState::new(
            SpatialSector::CorrelatedPump(SpatialAmplitude::gaussian(sg, 1e-3).unwrap()),
            SpectralSector::anti_correlated(&sd, fg).unwrap(),
            default_spdc_state().pump_frequency,
        )
        .unwrap()
    }

    #[test]
    fn dense_initial_matches_branch_expansion() {
        let st = small_state();
        let dense =
            DenseTensorState::initial(&st, Default::default(), DEFAULT_DENSE_BUDGET).unwrap();
        let b = BranchSumState::initial(&st, Default::default()).unwrap();
        let expanded = to_dense(&b, &st, DEFAULT_DENSE_BUDGET).unwrap();
        assert!(dense.max_difference(&expanded).unwrap() <= 1e-12);
        assert!((dense.norm_sqr() - 1.0).abs() <= 1e-12);
        assert!(dense.exchange_asymmetry() <= 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            check_budget(65, 129, DEFAULT_DENSE_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(check_budget(9, 17, DEFAULT_DENSE_BUDGET).is_ok());
    }
}

//! Element-by-element two-photon simulation over discrete
//! (path, position, frequency) modes. It shares no formulas with the closed
//! forms and serves as their check; it also covers pumps of mixed parity.

mod branch;
mod dense;
mod factor;
mod mixture;

use num_complex::Complex64;

pub use branch::{pipeline, BeamSplitterConvention, Branch, BranchSumState, Element, Path, Port};
pub use dense::{to_dense, DenseTensorState, DEFAULT_DENSE_BUDGET};
pub use factor::{PairFactor, Slot};
pub use mixture::{mixture_singles, one_photon_port_probability};

use crate::error::Result;
use crate::interferometer::{EngineTag, InterferometerConfig, RateEngine, Rates};
use crate::spatial::{eigendecompose, SpatialDensityOperator};
use crate::state::{SpatialSector, TwoPhotonState};

/// Oracle rate engine: coincidences from the propagated pure pair state,
/// singles from coherent-mode averaging of the reduced one-photon state.
#[derive(Debug, Clone)]
pub struct ModeOracle {
    config: InterferometerConfig,
    initial: BranchSumState,
    modes: Vec<(f64, Vec<Complex64>)>,
    spectral_weights: Vec<f64>,
}

impl ModeOracle {
    pub fn new(state: &TwoPhotonState, config: InterferometerConfig) -> Result<Self> {
        Self::with_convention(state, config, BeamSplitterConvention::default())
    }

    pub fn with_convention(
        state: &TwoPhotonState,
        config: InterferometerConfig,
        convention: BeamSplitterConvention,
    ) -> Result<Self> {
        let initial = BranchSumState::initial(state, convention)?;
        let root = &initial.branches()[0];
        let rho = match (&state.spatial, root.spatial.as_ref()) {
            (SpatialSector::CorrelatedPump(phi), _) => SpatialDensityOperator::incoherent(phi),
            (_, s) => {
                let m = s.to_matrix();
                SpatialDensityOperator::general(*state.spatial_grid(), &m * m.adjoint())?
            }
        };
        let modes = eigendecompose(&rho)?
            .into_iter()
            .filter(|m| m.weight > 1e-12)
            .map(|m| (m.weight, m.mode.discrete()))
            .collect();
        let f = root.spectral.row_weights();
        Ok(Self {
            config,
            modes,
            spectral_weights: f,
            initial,
        })
    }

    pub fn initial_state(&self) -> &BranchSumState {
        &self.initial
    }

    /// Pair state after the interferometer at delay `tau`.
    pub fn propagate(&self, tau: f64) -> Result<BranchSumState> {
        self.initial.apply_all(&pipeline(&self.config, tau))
    }

    pub fn coincidence(&self, tau: f64) -> Result<f64> {
        self.propagate(tau)?.coincidence_rate()
    }

    /// Singles at ports (c, d) by coherent-mode averaging.
    pub fn mixture_singles(&self, tau: f64) -> Result<[f64; 2]> {
        mixture_singles(
            &self.modes,
            &self.spectral_weights,
            self.initial.offsets(),
            self.initial.pump_frequency(),
            self.initial.convention(),
            &pipeline(&self.config, tau),
        )
    }

    /// Singles at ports (c, d) read directly off the pair state.
    pub fn pure_state_singles(&self, tau: f64) -> Result<[f64; 2]> {
        let s = self.propagate(tau)?;
        Ok([s.singles_rate(Port::C)?, s.singles_rate(Port::D)?])
    }

    pub fn coherent_modes(&self) -> &[(f64, Vec<Complex64>)] {
        &self.modes
    }
}

impl RateEngine for ModeOracle {
    fn rates(&self, tau: f64) -> Result<Rates> {
        let [c, d] = self.mixture_singles(tau)?;
        Ok(Rates {
            singles_port1: c,
            singles_port2: d,
            coincidence: self.coincidence(tau)?,
        })
    }

    fn config(&self) -> &InterferometerConfig {
        &self.config
    }

    fn tag(&self) -> EngineTag {
        EngineTag::Oracle
    }
}

/// Rates at one delay: coincidences from the pure pair state, singles
/// averaged over the coherent modes of the reduced spatial state.
pub fn simulate_mixture(
    state: &TwoPhotonState,
    config: &InterferometerConfig,
    tau: f64,
) -> Result<Rates> {
    ModeOracle::new(state, *config)?.rates(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::{Arm, ClosedForm, InterferometerKind};
    use crate::spatial::{SpatialAmplitude, SpatialGrid};
    use crate::state::{default_spdc_state, JointSpatialAmplitude};

    fn taus() -> Vec<f64> {
        (0..40).map(|j| -300e-15 + j as f64 * 15.37e-15).collect()
    }

    #[test]
    fn default_mzi_matches_closed_form() {
        let s = default_spdc_state();
        let cfg = InterferometerConfig::mzi(s.pump_frequency).unwrap();
        let o = ModeOracle::new(&s, cfg).unwrap();
        let c = ClosedForm::new(&s, cfg).unwrap();
        for t in taus() {
            let a = o.rates(t).unwrap();
            let b = c.rates(t).unwrap();
            assert!((a.coincidence - b.coincidence).abs() <= 1e-6);
            assert!((a.singles_port1 - b.singles_port1).abs() <= 1e-6);
            assert!((a.singles_port2 - b.singles_port2).abs() <= 1e-6);
        }
        assert!(o.coincidence(0.0).unwrap().abs() <= 1e-6);
    }

    #[test]
    fn mixture_and_pure_state_singles_agree() {
        let s = default_spdc_state();
        for kind in [InterferometerKind::Mzi, InterferometerKind::Mzim] {
            let cfg = InterferometerConfig::for_state(kind, &s).unwrap();
            let o = ModeOracle::new(&s, cfg).unwrap();
            for t in [0.0, 1.1e-15, 90e-15] {
                let a = o.mixture_singles(t).unwrap();
                let b = o.pure_state_singles(t).unwrap();
                assert!((a[0] - b[0]).abs() <= 1e-12 && (a[1] - b[1]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn rank_one_mixture_equals_pure_run() {
        let s = default_spdc_state();
        let g = *s.spatial_grid();
        let phi = SpatialAmplitude::gaussian(g, 1e-3).unwrap();
        let coh = s.with_spatial(SpatialSector::GeneralSpatial(
            JointSpatialAmplitude::product(&phi, &phi).unwrap(),
        ));
        let cfg = InterferometerConfig::mzim(s.pump_frequency).unwrap();
        let o = ModeOracle::new(&coh, cfg).unwrap();
        assert_eq!(o.coherent_modes().len(), 1);
        let a = o.mixture_singles(3e-15).unwrap();
        let b = o.pure_state_singles(3e-15).unwrap();
        assert!((a[0] - b[0]).abs() <= 1e-9);
    }

    #[test]
    fn arm_assignment_does_not_matter_for_even_pump() {
        let s = default_spdc_state();
        let base = InterferometerConfig::mzim(s.pump_frequency).unwrap();
        let o = ModeOracle::new(&s, base).unwrap();
        for arms in [(Arm::A, Arm::B), (Arm::B, Arm::A), (Arm::A, Arm::A)] {
            let m = ModeOracle::new(&s, base.with_arms(arms.0, arms.1)).unwrap();
            for t in [0.0, 0.7e-15, 55e-15] {
                let a = o.rates(t).unwrap();
                let b = m.rates(t).unwrap();
                assert!((a.coincidence - b.coincidence).abs() <= 1e-9);
                assert!((a.singles_port1 - b.singles_port1).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn beam_splitter_convention_does_not_matter() {
        let s = default_spdc_state();
        let g = *s.spatial_grid();
        let odd = s.with_spatial(SpatialSector::CorrelatedPump(
            SpatialAmplitude::hermite_gauss1(g, 1e-3).unwrap(),
        ));
        for st in [s.clone(), odd] {
            let cfg = InterferometerConfig::mzim(st.pump_frequency).unwrap();
            let a = ModeOracle::new(&st, cfg).unwrap();
            let b =
                ModeOracle::with_convention(&st, cfg, BeamSplitterConvention::Rotation).unwrap();
            for t in [0.0, 0.9e-15, 120e-15] {
                let x = a.rates(t).unwrap();
                let y = b.rates(t).unwrap();
                assert!((x.coincidence - y.coincidence).abs() <= 1e-9);
                assert!((x.singles_port1 - y.singles_port1).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn even_odd_mixture_washes_out_singles_fringe() {
        let s = default_spdc_state();
        let g: SpatialGrid = *s.spatial_grid();
        let e = SpatialAmplitude::gaussian(g, 1e-3).unwrap();
        let o = SpatialAmplitude::hermite_gauss1(g, 1e-3).unwrap();
        let entangled = s.with_spatial(SpatialSector::GeneralSpatial(
            JointSpatialAmplitude::symmetric_pair(&e, &o).unwrap(),
        ));
        let cfg = InterferometerConfig::mzim(s.pump_frequency).unwrap();
        let oracle = ModeOracle::new(&entangled, cfg).unwrap();
        for t in [0.0, 1.35e-15, 20e-15] {
            let [c, d] = oracle.mixture_singles(t).unwrap();
            assert!((c - 1.0).abs() <= 1e-9 && (d - 1.0).abs() <= 1e-9);
        }
    }
}

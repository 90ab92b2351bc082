//! Closed-form singles and coincidence interferograms for the balanced
//! interferometer (MZI) and the one with a spatial flip in one arm (MZIM).
//!
//! Rates are normalized so the incoherent background is 1. Port 1 is the
//! output that is dark at zero delay; port 2 carries the rest, so the two
//! singles rates always sum to 2.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::{flip_overlap, pump_parity_overlap, ParityOverlap};
use crate::spectral::SpectralEnvelope;
use crate::state::{reduce_to_one_photon, OnePhotonState, SpectralSector, TwoPhotonState};

/// Pump parity magnitudes within this of 1 count as pure even or odd.
pub const PARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterferometerKind {
    Mzi,
    Mzim,
}

impl InterferometerKind {
    pub fn name(self) -> &'static str {
        match self {
            InterferometerKind::Mzi => "MZI",
            InterferometerKind::Mzim => "MZIM",
        }
    }
}

/// Interferometer layout. The kind follows from mirror-count parity: equal
/// parity in both arms is an MZI, unequal parity flips the field in one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub kind: InterferometerKind,
    pub pump_frequency: f64,
    pub mirror_counts: (u32, u32),
    /// Arm holding the delay line. Only the mode oracle reads this.
    pub delay_arm: Arm,
    /// Arm holding the odd reflection count. Only the mode oracle reads this.
    pub flip_arm: Arm,
}

impl InterferometerConfig {
    pub fn new(
        kind: InterferometerKind,
        pump_frequency: f64,
        mirror_counts: (u32, u32),
    ) -> Result<Self> {
        if !(pump_frequency.is_finite() && pump_frequency > 0.0) {
            return Err(Error::InvalidInterferometer(format!(
                "pump frequency must be positive, got {pump_frequency}"
            )));
        }
        let same_parity = mirror_counts.0 % 2 == mirror_counts.1 % 2;
        let expected = if same_parity {
            InterferometerKind::Mzi
        } else {
            InterferometerKind::Mzim
        };
        if kind != expected {
            return Err(Error::InvalidInterferometer(format!(
                "mirror counts {mirror_counts:?} describe an {}, not an {}",
                expected.name(),
                kind.name()
            )));
        }
        Ok(Self {
            kind,
            pump_frequency,
            mirror_counts,
            delay_arm: Arm::B,
            flip_arm: Arm::B,
        })
    }

    /// Three mirrors per arm.
    pub fn mzi(pump_frequency: f64) -> Result<Self> {
        Self::new(InterferometerKind::Mzi, pump_frequency, (3, 3))
    }

    /// One mirror removed from the second arm.
    pub fn mzim(pump_frequency: f64) -> Result<Self> {
        Self::new(InterferometerKind::Mzim, pump_frequency, (3, 2))
    }

    pub fn for_state(kind: InterferometerKind, state: &TwoPhotonState) -> Result<Self> {
        match kind {
            InterferometerKind::Mzi => Self::mzi(state.pump_frequency),
            InterferometerKind::Mzim => Self::mzim(state.pump_frequency),
        }
    }

    pub fn with_arms(mut self, delay_arm: Arm, flip_arm: Arm) -> Self {
        self.delay_arm = delay_arm;
        self.flip_arm = flip_arm;
        self
    }

    /// Largest delay step that still puts five samples in a pump period.
    pub fn max_scan_step(&self) -> f64 {
        0.2 * 2.0 * PI / self.pump_frequency
    }
}

/// Normalized rates at one delay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub singles_port1: f64,
    pub singles_port2: f64,
    pub coincidence: f64,
}

/// Anything that produces rates as a function of delay.
pub trait RateEngine: Sync {
    fn rates(&self, tau: f64) -> Result<Rates>;
    fn config(&self) -> &InterferometerConfig;
    fn tag(&self) -> EngineTag;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineTag {
    Closed,
    Oracle,
}

impl EngineTag {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineTag::Closed => "closed",
            EngineTag::Oracle => "oracle",
        }
    }
}

/// Closed-form evaluator with the state-dependent pieces precomputed.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    config: InterferometerConfig,
    envelope: SpectralEnvelope,
    alpha: ParityOverlap,
    pump_parity: Option<ParityOverlap>,
    anti_correlated: bool,
    even_spectrum: bool,
}

impl ClosedForm {
    pub fn new(state: &TwoPhotonState, config: InterferometerConfig) -> Result<Self> {
        check_frequency(state, &config)?;
        let one = reduce_to_one_photon(state)?;
        let (anti_correlated, even_spectrum) = match &state.spectral {
            SpectralSector::AntiCorrelated { density, grid } => (true, density.is_even(grid)),
            SpectralSector::GeneralSpectral(_) => (false, false),
        };
        Ok(Self {
            config,
            envelope: envelope_of(&one),
            alpha: flip_overlap(&one.spatial),
            pump_parity: state.pump().map(pump_parity_overlap),
            anti_correlated,
            even_spectrum,
        })
    }

    pub fn alpha(&self) -> ParityOverlap {
        self.alpha
    }

    pub fn pump_parity(&self) -> Option<ParityOverlap> {
        self.pump_parity
    }

    pub fn envelope(&self) -> &SpectralEnvelope {
        &self.envelope
    }

    /// Port-1 singles. MZI: `1 - cos(ω_p τ/2) E₁(τ)`; MZIM: the same with the
    /// fringe weighted by `|α|` and shifted by `arg α`.
    pub fn singles(&self, tau: f64) -> f64 {
        let half = 0.5 * self.config.pump_frequency * tau;
        let e1 = self.envelope.first_order(tau);
        match self.config.kind {
            InterferometerKind::Mzi => 1.0 - half.cos() * e1,
            InterferometerKind::Mzim => {
                1.0 - self.alpha.magnitude * (half - self.alpha.phase).cos() * e1
            }
        }
    }

    /// Coincidences: `1 - ½cos(ω_p τ) - ½E₂(τ)` for the MZI and for an even
    /// pump behind the flip; an odd pump flips the sign of both interference
    /// terms.
    pub fn coincidence(&self, tau: f64) -> Result<f64> {
        if !self.anti_correlated {
            return Err(Error::UnsupportedState(
                "closed-form coincidences need an anti-correlated spectrum".into(),
            ));
        }
        if !self.even_spectrum {
            return Err(Error::AsymmetricSpectrum);
        }
        let sign = match self.config.kind {
            InterferometerKind::Mzi => 1.0,
            InterferometerKind::Mzim => {
                let beta = self.pump_parity.ok_or_else(|| {
                    Error::UnsupportedState(
                        "closed-form MZIM coincidences need a correlated pump".into(),
                    )
                })?;
                if beta.magnitude < 1.0 - PARITY_TOLERANCE {
                    return Err(Error::NonParityPump(beta.magnitude));
                }
                beta.phase.cos().signum()
            }
        };
        let wp = self.config.pump_frequency;
        Ok(1.0 - sign * 0.5 * (wp * tau).cos() - sign * 0.5 * self.envelope.second_order(tau))
    }
}

impl RateEngine for ClosedForm {
    fn rates(&self, tau: f64) -> Result<Rates> {
        let s = self.singles(tau);
        Ok(Rates {
            singles_port1: s,
            singles_port2: 2.0 - s,
            coincidence: self.coincidence(tau)?,
        })
    }

    fn config(&self) -> &InterferometerConfig {
        &self.config
    }

    fn tag(&self) -> EngineTag {
        EngineTag::Closed
    }
}

pub(crate) fn envelope_of(one: &OnePhotonState) -> SpectralEnvelope {
    SpectralEnvelope::from_mode_weights(one.spectral.grid(), &one.spectral.mode_weights())
}

fn check_frequency(state: &TwoPhotonState, config: &InterferometerConfig) -> Result<()> {
    let (a, b) = (state.pump_frequency, config.pump_frequency);
    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
        return Err(Error::InvalidInterferometer(format!(
            "state pump frequency {a:e} differs from interferometer pump frequency {b:e}"
        )));
    }
    Ok(())
}

fn require(cfg: &InterferometerConfig, kind: InterferometerKind) -> Result<()> {
    if cfg.kind == kind {
        Ok(())
    } else {
        Err(Error::WrongInterferometer {
            expected: kind.name(),
            found: cfg.kind.name(),
        })
    }
}

/// Closed-form MZI coincidence rate.
pub fn g2_mzi(state: &TwoPhotonState, cfg: &InterferometerConfig, tau: f64) -> Result<f64> {
    require(cfg, InterferometerKind::Mzi)?;
    ClosedForm::new(state, *cfg)?.coincidence(tau)
}

/// Closed-form MZI singles rate (port 1). Does not depend on the spatial sector.
pub fn intensity_mzi(state: &TwoPhotonState, cfg: &InterferometerConfig, tau: f64) -> Result<f64> {
    require(cfg, InterferometerKind::Mzi)?;
    Ok(ClosedForm::new(state, *cfg)?.singles(tau))
}

/// Closed-form MZIM singles rate (port 1).
pub fn intensity_mzim(state: &TwoPhotonState, cfg: &InterferometerConfig, tau: f64) -> Result<f64> {
    require(cfg, InterferometerKind::Mzim)?;
    Ok(ClosedForm::new(state, *cfg)?.singles(tau))
}

/// MZIM singles for a one-photon state given directly, e.g. a density matrix
/// read from disk.
pub fn intensity_mzim_one_photon(
    one: &OnePhotonState,
    cfg: &InterferometerConfig,
    tau: f64,
) -> Result<f64> {
    require(cfg, InterferometerKind::Mzim)?;
    let alpha = flip_overlap(&one.spatial);
    let e1 = envelope_of(one).first_order(tau);
    Ok(1.0 - alpha.magnitude * (0.5 * cfg.pump_frequency * tau - alpha.phase).cos() * e1)
}

/// Closed-form MZIM coincidence rate; pure-parity pumps only.
pub fn g2_mzim(state: &TwoPhotonState, cfg: &InterferometerConfig, tau: f64) -> Result<f64> {
    require(cfg, InterferometerKind::Mzim)?;
    ClosedForm::new(state, *cfg)?.coincidence(tau)
}

/// Sampled delay scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interferogram {
    pub tau: Vec<f64>,
    pub singles: Vec<f64>,
    pub singles_port2: Vec<f64>,
    pub coincidences: Vec<f64>,
    pub config: InterferometerConfig,
    pub engine: EngineTag,
    pub state_label: String,
}

impl Interferogram {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }
}

/// Delays `start, start + step, …` up to `stop`.
pub fn tau_grid(start: f64, stop: f64, step: f64, max_step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::InvalidScan("scan bounds must be finite".into()));
    }
    if stop < start {
        return Err(Error::InvalidScan(format!(
            "stop {stop:e} is before start {start:e}"
        )));
    }
    if !(step > 0.0) || step > max_step * (1.0 + 1e-12) {
        return Err(Error::UnderSampled {
            step,
            limit: max_step,
        });
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|j| start + j as f64 * step).collect())
}

/// Evaluates an engine on a delay grid. Points run in parallel and are
/// assembled in delay order.
pub fn scan_engine<E: RateEngine + ?Sized>(
    engine: &E,
    taus: &[f64],
    state_label: &str,
) -> Result<Interferogram> {
    let rates: Vec<Rates> = taus
        .par_iter()
        .map(|&t| engine.rates(t))
        .collect::<Result<_>>()?;
    Ok(Interferogram {
        tau: taus.to_vec(),
        singles: rates.iter().map(|r| r.singles_port1).collect(),
        singles_port2: rates.iter().map(|r| r.singles_port2).collect(),
        coincidences: rates.iter().map(|r| r.coincidence).collect(),
        config: *engine.config(),
        engine: engine.tag(),
        state_label: state_label.to_string(),
    })
}

/// Closed-form scan over `[start, stop]`.
pub fn scan(
    state: &TwoPhotonState,
    cfg: &InterferometerConfig,
    start: f64,
    stop: f64,
    step: f64,
) -> Result<Interferogram> {
    let taus = tau_grid(start, stop, step, cfg.max_scan_step())?;
    let engine = ClosedForm::new(state, *cfg)?;
    scan_engine(&engine, &taus, "closed-form")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::{SpatialAmplitude, SpatialGrid};
    use crate::state::{default_spdc_state, JointSpatialAmplitude, SpatialSector};
    use approx::assert_abs_diff_eq;

    fn sinc(x: f64) -> f64 {
        if x == 0.0 {
            1.0
        } else {
            x.sin() / x
        }
    }

    fn bandwidth() -> f64 {
        crate::state::angular_bandwidth(810e-9, 10e-9)
    }

    #[test]
    fn mirror_parity_decides_kind() {
        assert!(InterferometerConfig::new(InterferometerKind::Mzi, 1.0, (3, 2)).is_err());
        assert!(InterferometerConfig::new(InterferometerKind::Mzim, 1.0, (2, 2)).is_err());
        assert!(InterferometerConfig::new(InterferometerKind::Mzim, 1.0, (1, 2)).is_ok());
    }

    #[test]
    fn g2_mzi_values() {
        let s = default_spdc_state();
        let cfg = InterferometerConfig::mzi(s.pump_frequency).unwrap();
        assert_eq!(g2_mzi(&s, &cfg, 0.0).unwrap(), 0.0);
        let tau = 50e-15;
        let expected = 1.0 - 0.5 * (s.pump_frequency * tau).cos() - 0.5 * sinc(bandwidth() * tau);
        assert_abs_diff_eq!(g2_mzi(&s, &cfg, tau).unwrap(), expected, epsilon = 1e-8);
        // Envelope dead, pump phase at π.
        let far = (2.0 * 400.0 + 1.0) * PI / s.pump_frequency;
        let e2 = sinc(bandwidth() * far);
        assert_abs_diff_eq!(
            g2_mzi(&s, &cfg, far).unwrap(),
            1.5 - 0.5 * e2,
            epsilon = 1e-8
        );
    }

    #[test]
    fn intensity_mzi_values() {
        let s = default_spdc_state();
        let cfg = InterferometerConfig::mzi(s.pump_frequency).unwrap();
        assert_abs_diff_eq!(intensity_mzi(&s, &cfg, 0.0).unwrap(), 0.0, epsilon = 1e-9);
        // First bright fringe: ω_p τ / 2 = π.
        let t = 2.0 * PI / s.pump_frequency;
        let i = intensity_mzi(&s, &cfg, t).unwrap();
        assert!(i > 1.99, "{i}");
        // Past the first envelope zero the envelope is negative.
        let t = 300e-15;
        let e1 = sinc(bandwidth() * t / 2.0);
        assert!(e1 < 0.0);
        let i = intensity_mzi(&s, &cfg, t).unwrap();
        let expected = 1.0 - (0.5 * s.pump_frequency * t).cos() * e1;
        assert_abs_diff_eq!(i, expected, epsilon = 1e-8);
        assert!((1.0 - i).abs() <= e1.abs() + 1e-12);
    }

    #[test]
    fn mzi_is_blind_to_spatial_sector() {
        let s = default_spdc_state();
        let cfg = InterferometerConfig::mzi(s.pump_frequency).unwrap();
        let g = *s.spatial_grid();
        let even = SpatialAmplitude::gaussian(g, 1e-3).unwrap();
        let odd = SpatialAmplitude::hermite_gauss1(g, 1e-3).unwrap();
        let variants = [
            s.clone(),
            s.with_spatial(SpatialSector::CorrelatedPump(odd)),
            s.with_spatial(SpatialSector::GeneralSpatial(
                JointSpatialAmplitude::product(&even, &even).unwrap(),
            )),
        ];
        for tau in [0.0, 1.3e-15, 77e-15, 250e-15] {
            let base = ClosedForm::new(&variants[0], cfg)
                .unwrap()
                .rates(tau)
                .unwrap();
            for v in &variants[1..] {
                let r = ClosedForm::new(v, cfg).unwrap().rates(tau).unwrap();
                assert_eq!(r, base);
            }
        }
    }

    #[test]
    fn mzim_singles_by_spatial_coherence() {
        let s = default_spdc_state();
        let mzi = InterferometerConfig::mzi(s.pump_frequency).unwrap();
        let mzim = InterferometerConfig::mzim(s.pump_frequency).unwrap();
        let g = *s.spatial_grid();
        // Incoherent: nearly flat.
        for j in 0..200 {
            let t = -100e-15 + j as f64 * 1e-15;
            let i = intensity_mzim(&s, &mzim, t).unwrap();
            assert!((i - 1.0).abs() <= 0.02);
        }
        // Coherent even: same as MZI.
        let even = SpatialAmplitude::gaussian(g, 1e-3).unwrap();
        let coh = s.with_spatial(SpatialSector::GeneralSpatial(
            JointSpatialAmplitude::product(&even, &even).unwrap(),
        ));
        let odd = SpatialAmplitude::hermite_gauss1(g, 1e-3).unwrap();
        let coh_odd = s.with_spatial(SpatialSector::GeneralSpatial(
            JointSpatialAmplitude::product(&odd, &odd).unwrap(),
        ));
        for t in [0.0, 0.4e-15, 3e-15, 120e-15] {
            let a = intensity_mzim(&coh, &mzim, t).unwrap();
            let b = intensity_mzi(&coh, &mzi, t).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            // Odd: inverted fringe, same envelope.
            let c = intensity_mzim(&coh_odd, &mzim, t).unwrap();
            assert_abs_diff_eq!(c - 1.0, -(b - 1.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn g2_mzim_parity_cases() {
        let s = default_spdc_state();
        let mzi = InterferometerConfig::mzi(s.pump_frequency).unwrap();
        let mzim = InterferometerConfig::mzim(s.pump_frequency).unwrap();
        for t in [0.0, 0.3e-15, 40e-15, 260e-15] {
            assert_eq!(g2_mzim(&s, &mzim, t).unwrap(), g2_mzi(&s, &mzi, t).unwrap());
        }
        assert_eq!(g2_mzim(&s, &mzim, 0.0).unwrap(), 0.0);
        let g = *s.spatial_grid();
        let shifted = s.with_spatial(SpatialSector::CorrelatedPump(
            SpatialAmplitude::shifted_gaussian(g, 1e-3, 1e-3).unwrap(),
        ));
        assert!(matches!(
            g2_mzim(&shifted, &mzim, 0.0),
            Err(Error::NonParityPump(_))
        ));
    }

    #[test]
    fn wrong_kind_and_asymmetric_spectrum_are_errors() {
        let s = default_spdc_state();
        let mzim = InterferometerConfig::mzim(s.pump_frequency).unwrap();
        assert!(matches!(
            g2_mzi(&s, &mzim, 0.0),
            Err(Error::WrongInterferometer { .. })
        ));
        let skew = crate::spectral::SpectralDensity::tabulated(vec![
            (-1e13, 1.0),
            (0.0, 2.0),
            (1e13, 0.5),
        ])
        .unwrap();
        let g = SpatialGrid::default();
        let st =
            crate::state::spdc_state(405e-9, &skew, SpatialAmplitude::gaussian(g, 1e-3).unwrap())
                .unwrap();
        let cfg = InterferometerConfig::mzi(st.pump_frequency).unwrap();
        assert!(matches!(
            g2_mzi(&st, &cfg, 0.0),
            Err(Error::AsymmetricSpectrum)
        ));
        assert!(intensity_mzi(&st, &cfg, 0.0).is_ok());
    }

    #[test]
    fn scan_shapes() {
        let s = default_spdc_state();
        let mzi = InterferometerConfig::mzi(s.pump_frequency).unwrap();
        let mzim = InterferometerConfig::mzim(s.pump_frequency).unwrap();
        let a = scan(&s, &mzi, -500e-15, 500e-15, 0.2e-15).unwrap();
        assert_eq!(a.len(), 5001);
        let b = scan(&s, &mzim, -500e-15, 500e-15, 0.2e-15).unwrap();
        let d = a
            .coincidences
            .iter()
            .zip(&b.coincidences)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(d <= 1e-9);
        assert!(b.singles.iter().all(|v| (v - 1.0).abs() <= 0.02));
        for j in 0..a.len() {
            assert!(a.singles[j] >= -1e-9 && a.singles[j] <= 2.0 + 1e-9);
            // The sinc sidelobe of E₂ dips to -0.2172, lifting the ceiling above 1.5.
            assert!(a.coincidences[j] >= -1e-9 && a.coincidences[j] <= 1.5 + 0.5 * 0.2173);
            assert_abs_diff_eq!(a.singles[j] + a.singles_port2[j], 2.0, epsilon = 1e-12);
        }
        let one = scan(&s, &mzi, 3e-15, 3e-15, 0.2e-15).unwrap();
        assert_eq!(one.len(), 1);
        assert!(matches!(
            scan(&s, &mzi, 0.0, 1e-15, 1e-15),
            Err(Error::UnderSampled { .. })
        ));
    }
}

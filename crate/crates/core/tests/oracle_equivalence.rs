//! Closed forms against the mode oracle on states the unit tests skip.

use biphoton::interferometer::{
    scan_engine, Arm, ClosedForm, InterferometerConfig, InterferometerKind,
};
use biphoton::oracle::{
    pipeline, to_dense, BeamSplitterConvention, BranchSumState, DenseTensorState, ModeOracle, Port,
    DEFAULT_DENSE_BUDGET,
};
use biphoton::spatial::{SpatialAmplitude, SpatialGrid};
use biphoton::spectral::{FrequencyGrid, SpectralDensity};
use biphoton::state::{
    angular_bandwidth, default_spdc_state, spdc_state, SpatialSector, SpectralSector,
    TwoPhotonState,
};
use biphoton::Error;

const FS: f64 = 1e-15;

fn with_pump(pump: SpatialAmplitude) -> TwoPhotonState {
    default_spdc_state().with_spatial(SpatialSector::CorrelatedPump(pump))
}

fn taus() -> Vec<f64> {
    [-250.0, -61.3, -2.0, -0.35, 0.0, 0.4, 1.1, 7.9, 120.0]
        .iter()
        .map(|t| t * FS)
        .collect()
}

fn assert_engines_agree(state: &TwoPhotonState, kind: InterferometerKind) {
    let cfg = InterferometerConfig::for_state(kind, state).unwrap();
    let c = scan_engine(&ClosedForm::new(state, cfg).unwrap(), &taus(), "c").unwrap();
    let o = scan_engine(&ModeOracle::new(state, cfg).unwrap(), &taus(), "o").unwrap();
    for j in 0..taus().len() {
        assert!(
            (c.singles[j] - o.singles[j]).abs() <= 1e-9,
            "singles at {}",
            taus()[j]
        );
        assert!((c.singles_port2[j] - o.singles_port2[j]).abs() <= 1e-9);
        assert!(
            (c.coincidences[j] - o.coincidences[j]).abs() <= 1e-9,
            "G2 at {}",
            taus()[j]
        );
    }
}

#[test]
fn mzim_even_pump() {
    assert_engines_agree(&default_spdc_state(), InterferometerKind::Mzim);
}

#[test]
fn mzim_odd_pump() {
    let hg1 = SpatialAmplitude::hermite_gauss1(SpatialGrid::default(), 1e-3).unwrap();
    assert_engines_agree(&with_pump(hg1), InterferometerKind::Mzim);
}

#[test]
fn odd_pump_mzim_coincidence_peaks_at_zero_delay() {
    let hg1 = SpatialAmplitude::hermite_gauss1(SpatialGrid::default(), 1e-3).unwrap();
    let st = with_pump(hg1);
    let cfg = InterferometerConfig::for_state(InterferometerKind::Mzim, &st).unwrap();
    let g = ModeOracle::new(&st, cfg).unwrap().coincidence(0.0).unwrap();
    assert!((g - 2.0).abs() <= 1e-9, "{g}");
}

#[test]
fn shifted_pump_lies_between_even_pump_and_flat() {
    let grid = SpatialGrid::default();
    let st = with_pump(SpatialAmplitude::shifted_gaussian(grid, 1e-3, 0.5e-3).unwrap());
    let cfg = InterferometerConfig::for_state(InterferometerKind::Mzim, &st).unwrap();
    assert!(matches!(
        ClosedForm::new(&st, cfg).unwrap().coincidence(0.0),
        Err(Error::NonParityPump(_))
    ));
    let oracle = ModeOracle::new(&st, cfg).unwrap();
    let even = ClosedForm::new(&default_spdc_state(), cfg).unwrap();
    let beta = (-0.5f64).exp();
    for tau in taus() {
        let g = oracle.coincidence(tau).unwrap();
        let e = even.coincidence(tau).unwrap();
        // G2 = 1 - |β|·(1 - G2_even) for a real pump overlap.
        assert!(
            (g - (1.0 - beta * (1.0 - e))).abs() <= 1e-6,
            "{tau}: {g} vs {e}"
        );
        assert!((g - 1.0).abs() <= (e - 1.0).abs() + 1e-12);
    }
}

#[test]
fn arm_assignment_does_not_matter() {
    let st = default_spdc_state();
    let base = InterferometerConfig::for_state(InterferometerKind::Mzim, &st).unwrap();
    let reference = ModeOracle::new(&st, base).unwrap();
    for (d, f) in [(Arm::A, Arm::A), (Arm::A, Arm::B), (Arm::B, Arm::A)] {
        let o = ModeOracle::new(&st, base.with_arms(d, f)).unwrap();
        for tau in taus() {
            let (a, b) = (
                reference.coincidence(tau).unwrap(),
                o.coincidence(tau).unwrap(),
            );
            assert!((a - b).abs() <= 1e-12);
            let (a, b) = (
                reference.mixture_singles(tau).unwrap(),
                o.mixture_singles(tau).unwrap(),
            );
            assert!((a[0] - b[0]).abs() <= 1e-12);
        }
    }
}

fn small_state(pump: impl Fn(SpatialGrid) -> SpatialAmplitude) -> TwoPhotonState {
    let sg = SpatialGrid::new(3e-3, 9).unwrap();
    let sd = SpectralDensity::rectangular(angular_bandwidth(810e-9, 10e-9)).unwrap();
    let fg = FrequencyGrid::new(sd.support_half_width() * 4.0, 17).unwrap();
    TwoPhotonState::new(
        SpatialSector::CorrelatedPump(pump(sg)),
        SpectralSector::anti_correlated(&sd, fg).unwrap(),
        default_spdc_state().pump_frequency,
    )
    .unwrap()
}

#[test]
fn dense_tensor_matches_branch_sum_after_pipeline() {
    let pumps: [fn(SpatialGrid) -> SpatialAmplitude; 3] = [
        |g| SpatialAmplitude::gaussian(g, 1e-3).unwrap(),
        |g| SpatialAmplitude::hermite_gauss1(g, 1e-3).unwrap(),
        |g| SpatialAmplitude::shifted_gaussian(g, 1e-3, 0.7e-3).unwrap(),
    ];
    for pump in pumps {
        let st = small_state(pump);
        for conv in [
            BeamSplitterConvention::Symmetric,
            BeamSplitterConvention::Rotation,
        ] {
            for kind in [InterferometerKind::Mzi, InterferometerKind::Mzim] {
                let cfg = InterferometerConfig::for_state(kind, &st).unwrap();
                for tau in [0.0, 0.9 * FS, 31.0 * FS] {
                    let els = pipeline(&cfg, tau);
                    let b = BranchSumState::initial(&st, conv)
                        .unwrap()
                        .apply_all(&els)
                        .unwrap();
                    let mut d = DenseTensorState::initial(&st, conv, DEFAULT_DENSE_BUDGET).unwrap();
                    for e in &els {
                        d.apply(e).unwrap();
                    }
                    let expanded = to_dense(&b, &st, DEFAULT_DENSE_BUDGET).unwrap();
                    assert!(d.max_difference(&expanded).unwrap() <= 1e-12);
                    assert!((d.norm_sqr() - 1.0).abs() <= 1e-12);
                    assert!(d.exchange_asymmetry() <= 1e-12);
                    let total = d.singles_rate(Port::C).unwrap() + d.singles_rate(Port::D).unwrap();
                    assert!((total - 2.0).abs() <= 1e-12);
                    assert!(
                        (d.coincidence_rate().unwrap() - b.coincidence_rate().unwrap()).abs()
                            <= 1e-12
                    );
                }
            }
        }
    }
}

#[test]
fn gaussian_spectrum_matches() {
    let sd = SpectralDensity::gaussian(0.4 * angular_bandwidth(810e-9, 10e-9)).unwrap();
    let pump = SpatialAmplitude::gaussian(SpatialGrid::default(), 1e-3).unwrap();
    let st = spdc_state(405e-9, &sd, pump).unwrap();
    assert_engines_agree(&st, InterferometerKind::Mzi);
    assert_engines_agree(&st, InterferometerKind::Mzim);
}

//! Steps the pair state through the interferometer element by element and
//! checks it against the closed form and a dense expansion.

use biphoton::interferometer::{ClosedForm, InterferometerConfig, InterferometerKind};
use biphoton::oracle::{
    pipeline, to_dense, BranchSumState, DenseTensorState, ModeOracle, Port, DEFAULT_DENSE_BUDGET,
};
use biphoton::spatial::{SpatialAmplitude, SpatialGrid};
use biphoton::spectral::{FrequencyGrid, SpectralDensity};
use biphoton::state::{
    angular_bandwidth, default_spdc_state, SpatialSector, SpectralSector, TwoPhotonState,
};

fn main() -> biphoton::Result<()> {
    let state = default_spdc_state();
    let cfg = InterferometerConfig::for_state(InterferometerKind::Mzim, &state)?;
    let tau = 0.9e-15;

    let mut s = BranchSumState::initial(&state, Default::default())?;
    for e in pipeline(&cfg, tau) {
        s = s.apply(&e)?;
        println!(
            "{:<36} branches {:>2}  norm {:.12}",
            format!("{e:?}"),
            s.branch_count(),
            s.norm_sqr()
        );
    }
    let closed = ClosedForm::new(&state, cfg)?;
    let oracle = ModeOracle::new(&state, cfg)?;
    let singles = oracle.mixture_singles(tau)?;
    println!(
        "coincidence: oracle {:.12}, closed {:.12}",
        s.coincidence_rate()?,
        closed.coincidence(tau)?
    );
    println!(
        "singles:     oracle {:.12}, closed {:.12}",
        singles[0],
        closed.singles(tau)
    );
    println!(
        "pure-pair singles at port c {:.12}",
        s.singles_rate(Port::C)?
    );

    let sg = SpatialGrid::new(3e-3, 9)?;
    let sd = SpectralDensity::rectangular(angular_bandwidth(810e-9, 10e-9))?;
    let small = TwoPhotonState::new(
        SpatialSector::CorrelatedPump(SpatialAmplitude::gaussian(sg, 1e-3)?),
        SpectralSector::anti_correlated(
            &sd,
            FrequencyGrid::new(4.0 * sd.support_half_width(), 17)?,
        )?,
        state.pump_frequency,
    )?;
    let els = pipeline(&cfg, tau);
    let branch = BranchSumState::initial(&small, Default::default())?.apply_all(&els)?;
    let mut dense = DenseTensorState::initial(&small, Default::default(), DEFAULT_DENSE_BUDGET)?;
    for e in &els {
        dense.apply(e)?;
    }
    let diff = dense.max_difference(&to_dense(&branch, &small, DEFAULT_DENSE_BUDGET)?)?;
    println!(
        "dense tensor ({0}x{0}) vs branch sum: max |delta| {diff:.2e}",
        dense.dim()
    );
    Ok(())
}

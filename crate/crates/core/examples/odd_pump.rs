//! Even, odd and mixed-parity pumps in the flipped-arm interferometer.

use biphoton::analysis::sinusoid_component;
use biphoton::interferometer::{
    scan_engine, ClosedForm, InterferometerConfig, InterferometerKind, RateEngine,
};
use biphoton::oracle::ModeOracle;
use biphoton::spatial::{SpatialAmplitude, SpatialGrid};
use biphoton::state::{default_spdc_state, SpatialSector};

fn main() -> biphoton::Result<()> {
    let g = SpatialGrid::default();
    let base = default_spdc_state();
    let wp = base.pump_frequency;
    let taus: Vec<f64> = (-100..=100).map(|j| j as f64 * 0.2e-15).collect();
    let pumps = [
        ("gaussian", SpatialAmplitude::gaussian(g, 1e-3)?),
        ("hg1", SpatialAmplitude::hermite_gauss1(g, 1e-3)?),
        (
            "shifted",
            SpatialAmplitude::shifted_gaussian(g, 1e-3, 0.5e-3)?,
        ),
    ];
    for (name, pump) in pumps {
        let st = base.with_spatial(SpatialSector::CorrelatedPump(pump));
        let mut fits = Vec::new();
        for kind in [InterferometerKind::Mzi, InterferometerKind::Mzim] {
            let cfg = InterferometerConfig::for_state(kind, &st)?;
            // Mixed parity has no closed form in the flipped arm.
            let engine: Box<dyn RateEngine> = match ClosedForm::new(&st, cfg) {
                Ok(c) if c.coincidence(0.0).is_ok() => Box::new(c),
                _ => Box::new(ModeOracle::new(&st, cfg)?),
            };
            let ig = scan_engine(engine.as_ref(), &taus, name)?;
            fits.push((
                sinusoid_component(&ig.tau, &ig.coincidences, wp)?,
                ig.coincidences[100],
                engine.tag(),
            ));
        }
        let ((am, pm), g0m, _) = fits[0];
        let ((bm, pb), g0b, tag) = fits[1];
        println!(
            "{name:<9} MZIM engine {:<7} G2(0) {g0m:.4} / {g0b:.4}  amplitude ratio {:.4}  phase shift {:.4} rad",
            tag.as_str(),
            bm / am,
            (pb - pm).rem_euclid(2.0 * std::f64::consts::PI)
        );
    }
    Ok(())
}

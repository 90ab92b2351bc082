//! Closed-form scans of both interferometers on the default state, with
//! the analysis report for each.

use biphoton::analysis::report_interferogram;
use biphoton::interferometer::{scan, InterferometerConfig, InterferometerKind};
use biphoton::state::default_spdc_state;

fn main() -> biphoton::Result<()> {
    let state = default_spdc_state();
    for kind in [InterferometerKind::Mzi, InterferometerKind::Mzim] {
        let cfg = InterferometerConfig::for_state(kind, &state)?;
        let ig = scan(&state, &cfg, -200e-15, 200e-15, 0.2e-15)?;
        let r = report_interferogram(&ig, None)?;
        println!("{}", kind.name());
        println!(
            "  V1 {:.5}  V12 {:.5}  V1^2+V12^2 {:.4}",
            r.v1, r.v12, r.complementarity_sum
        );
        let fs = |p: Option<f64>| p.map_or("none".to_string(), |p| format!("{:.4} fs", p * 1e15));
        println!(
            "  periods: singles {}, coincidence {}",
            fs(r.fringe_period_singles),
            fs(r.fringe_period_coincidence)
        );
        println!("  HOM dip FWHM {}", fs(r.hom_fwhm));
    }
    Ok(())
}

//! HOM-dip width and singles coherence time against filter bandwidth.

use biphoton::analysis::report_interferogram;
use biphoton::interferometer::{scan, InterferometerConfig, InterferometerKind};
use biphoton::spatial::{SpatialAmplitude, SpatialGrid};
use biphoton::spectral::{SpectralDensity, SpectralEnvelope};
use biphoton::state::{angular_bandwidth, spdc_state};

fn main() -> biphoton::Result<()> {
    println!(
        "{:>8} {:>12} {:>14} {:>16}",
        "bw_nm", "dip_fwhm_fs", "E1_zero_fs", "fwhm*bw (fs nm)"
    );
    for nm in [5.0, 10.0, 20.0, 40.0] {
        let sd = SpectralDensity::rectangular(angular_bandwidth(810e-9, nm * 1e-9))?;
        let pump = SpatialAmplitude::gaussian(SpatialGrid::default(), 1e-3)?;
        let st = spdc_state(405e-9, &sd, pump)?;
        let cfg = InterferometerConfig::for_state(InterferometerKind::Mzi, &st)?;
        let ig = scan(&st, &cfg, -400e-15, 400e-15, 0.2e-15)?;
        let fwhm = report_interferogram(&ig, None)?
            .hom_fwhm
            .unwrap_or(f64::NAN)
            * 1e15;
        let zero = SpectralEnvelope::new(&sd, &sd.default_grid())
            .first_zero(2e-12)
            .unwrap_or(f64::NAN)
            * 1e15;
        println!("{nm:>8.1} {fwhm:>12.2} {zero:>14.2} {:>16.1}", fwhm * nm);
    }
    Ok(())
}

//! Writes a spatial density operator to CSV, reads it back and uses it for
//! flipped-arm singles.

use biphoton::interferometer::{
    intensity_mzim_one_photon, InterferometerConfig, InterferometerKind,
};
use biphoton::spatial::{
    flip_overlap, read_density_csv, write_density_csv, SpatialAmplitude, SpatialDensityOperator,
    SpatialGrid,
};
use biphoton::state::{default_spdc_state, reduce_to_one_photon};

fn main() -> biphoton::Result<()> {
    let grid = SpatialGrid::new(3e-3, 65)?;
    let a = SpatialAmplitude::gaussian(grid, 1e-3)?;
    let b = SpatialAmplitude::hermite_gauss1(grid, 1e-3)?;
    // Equal mixture of an even and an odd mode: the flip overlaps cancel.
    let matrix = (SpatialDensityOperator::coherent(&a).matrix()
        + SpatialDensityOperator::coherent(&b).matrix())
    .map(|z| z * 0.5);
    let rho = SpatialDensityOperator::general(grid, matrix)?;

    let path = std::env::temp_dir().join("biphoton_density.csv");
    write_density_csv(&path, &rho)?;
    let back = read_density_csv(&path, grid)?;
    println!("wrote {} ({} rows)", path.display(), grid.point_count());
    println!(
        "|alpha| written {:.3e}, read {:.3e}",
        flip_overlap(&rho).magnitude,
        flip_overlap(&back).magnitude
    );

    let state = default_spdc_state();
    let mut one = reduce_to_one_photon(&state)?;
    let cfg = InterferometerConfig::for_state(InterferometerKind::Mzim, &state)?;
    for (label, spatial) in [
        ("coherent gaussian", SpatialDensityOperator::coherent(&a)),
        ("mixture", back),
    ] {
        one.spatial = spatial;
        let s: Vec<String> = [0.0, 0.675e-15, 1.35e-15]
            .iter()
            .map(|&t| intensity_mzim_one_photon(&one, &cfg, t).map(|v| format!("{v:.4}")))
            .collect::<biphoton::Result<_>>()?;
        println!(
            "{label:<18} singles at 0, 1/4, 1/2 period: {}",
            s.join(", ")
        );
    }
    Ok(())
}

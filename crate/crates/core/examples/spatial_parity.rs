//! Flip overlap α and pump parity β for a few transverse profiles.

use biphoton::spatial::{
    eigendecompose, flip_overlap, parity_decompose, pump_parity_overlap, SpatialAmplitude,
    SpatialDensityOperator, SpatialGrid,
};

fn main() -> biphoton::Result<()> {
    let g = SpatialGrid::default();
    let pumps = [
        ("gaussian", SpatialAmplitude::gaussian(g, 1e-3)?),
        ("hg1", SpatialAmplitude::hermite_gauss1(g, 1e-3)?),
        (
            "shifted 0.5 mm",
            SpatialAmplitude::shifted_gaussian(g, 1e-3, 0.5e-3)?,
        ),
    ];
    println!(
        "{:<16} {:>8} {:>8} {:>12} {:>12}",
        "pump", "|beta|", "arg", "|alpha| coh", "|alpha| inc"
    );
    for (name, phi) in &pumps {
        let beta = pump_parity_overlap(phi);
        let coh = flip_overlap(&SpatialDensityOperator::coherent(phi));
        let inc = flip_overlap(&SpatialDensityOperator::incoherent(phi));
        println!(
            "{name:<16} {:>8.5} {:>8.4} {:>12.5} {:>12.5}",
            beta.magnitude, beta.phase, coh.magnitude, inc.magnitude
        );
    }

    let parts = parity_decompose(&pumps[2].1);
    println!(
        "\nshifted pump: even weight {:.5}, odd weight {:.5}",
        parts.even_norm_sqr(),
        parts.odd_norm_sqr()
    );

    // The incoherent overlap is a single grid point, so it halves with the spacing.
    for points in [129, 257, 513, 1025] {
        let phi = SpatialAmplitude::gaussian(SpatialGrid::new(3e-3, points)?, 1e-3)?;
        let a = flip_overlap(&SpatialDensityOperator::incoherent(&phi)).magnitude;
        println!("{points:>5} points: |alpha| = {a:.6}");
    }

    let modes = eigendecompose(&SpatialDensityOperator::coherent(&pumps[0].1))?;
    println!(
        "\ncoherent gaussian: leading mode weight {:.12}",
        modes[0].weight
    );
    Ok(())
}

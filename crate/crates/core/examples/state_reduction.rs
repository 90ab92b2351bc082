//! Builds the default down-converted pair and traces out one photon.

use biphoton::spatial::{flip_overlap, DensityKind};
use biphoton::state::{default_spdc_state, reduce_to_one_photon};

fn main() -> biphoton::Result<()> {
    let state = default_spdc_state();
    println!("pump frequency {:.6e} rad/s", state.pump_frequency);
    println!(
        "grids: {} spatial points over ±{} mm, {} spectral points",
        state.spatial_grid().point_count(),
        state.spatial_grid().half_width() * 1e3,
        state.frequency_grid().point_count()
    );

    let one = reduce_to_one_photon(&state)?;
    let kind = one.spatial.kind();
    println!("one-photon spatial state: {kind:?}");
    assert_eq!(kind, DensityKind::Incoherent);
    println!("spatial trace {:.12}", one.spatial.trace().re);
    println!("spectral trace {:.12}", one.spectral.trace());
    println!("central frequency {:.6e} rad/s", one.central_frequency);
    println!(
        "flip overlap |alpha| = {:.6}",
        flip_overlap(&one.spatial).magnitude
    );
    Ok(())
}

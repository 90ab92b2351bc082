//! First- and second-order coherence envelopes of a filtered spectrum.

use biphoton::spectral::{SpectralDensity, SpectralEnvelope};
use biphoton::state::angular_bandwidth;

fn main() -> biphoton::Result<()> {
    let dw = angular_bandwidth(810e-9, 10e-9);
    let shapes = [
        ("rectangular", SpectralDensity::rectangular(dw)?),
        (
            "gaussian",
            SpectralDensity::gaussian(dw / (2.0 * (2.0 * 2f64.ln()).sqrt()))?,
        ),
    ];
    println!("filter bandwidth {dw:.4e} rad/s");
    for (name, sd) in &shapes {
        let env = SpectralEnvelope::new(sd, &sd.default_grid());
        println!("\n{name}");
        println!("{:>8} {:>10} {:>10}", "tau_fs", "E1", "E2");
        for tau_fs in [0.0, 25.0, 50.0, 100.0, 150.0, 220.0] {
            let t = tau_fs * 1e-15;
            println!(
                "{tau_fs:>8.1} {:>10.6} {:>10.6}",
                env.first_order(t),
                env.second_order(t)
            );
        }
        match env.first_zero(1e-12) {
            Some(z) => println!("first zero of E1 at {:.2} fs", z * 1e15),
            None => println!("E1 has no zero below 1 ps"),
        }
    }
    Ok(())
}

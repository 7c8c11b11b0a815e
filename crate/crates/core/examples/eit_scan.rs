//! Three-level lambda system: steady state on two-photon resonance and the
//! probe transmission scan, for a dilute and a dense vapor.

use qodesign::experiments::eit::{self, EitParams};

fn main() {
    for density in [16_030.0, 1e11] {
        let p = EitParams {
            atomic_density_per_cm3: density,
            ..Default::default()
        };
        let m = eit::simulate(&p).expect("valid parameters");
        println!("density {density:e} cm^-3");
        for name in ["dark_state_fidelity", "rho12_abs", "excited_population", "od_resonant", "transmission_on", "transmission_off", "transparency_contrast", "max_residual"] {
            println!("  {name:<22} {:.6e}", m.get(name));
        }
    }
    let no_dephasing = eit::simulate(&EitParams {
        gamma_deph_mhz: 0.0,
        ..Default::default()
    })
    .expect("valid parameters");
    println!("without ground-state dephasing: fidelity {:.9}", no_dephasing.get("dark_state_fidelity"));
}

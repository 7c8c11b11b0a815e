//! BB84 with and without an intercept-resend eavesdropper, over a few fiber
//! lengths.

use qodesign::experiments::bb84::{self, Bb84Params};

fn main() {
    for km in [1.0, 10.0, 25.0, 50.0] {
        for eavesdropper in [false, true] {
            let p = Bb84Params {
                fiber_length_km: km,
                eavesdropper,
                pulses: 50_000,
                ..Default::default()
            };
            let m = bb84::simulate(&p, 1).expect("valid parameters");
            println!(
                "{km:>4} km eve={eavesdropper:<5} T={:.3} sifted={:>6} QBER={:.4} key={:>7.0}",
                m.get("transmission"),
                m.get("sifted_bits"),
                m.get("qber"),
                m.get("secure_key_bits")
            );
        }
    }
}

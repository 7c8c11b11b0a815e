//! Per-pulse Monte Carlo of polarization BB84 over a lossy fiber, optionally
//! with an intercept-resend eavesdropper.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_range, label_has, Binder, MetricSet, SimError, SimResult};
use crate::rng::trial_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bb84Params {
    pub pulses: u64,
    pub fiber_length_km: f64,
    pub attenuation_db_per_km: f64,
    pub detector_efficiency: f64,
    pub dark_count_rate_hz: f64,
    pub gate_window_ps: f64,
    pub eavesdropper: bool,
}

impl Default for Bb84Params {
    fn default() -> Self {
        Bb84Params {
            pulses: 10_000,
            fiber_length_km: 10.0,
            attenuation_db_per_km: 0.2,
            detector_efficiency: 0.7,
            dark_count_rate_hz: 100.0,
            gate_window_ps: 1000.0,
            eavesdropper: false,
        }
    }
}

impl Bb84Params {
    pub fn transmission(&self) -> f64 {
        10f64.powf(-self.attenuation_db_per_km * self.fiber_length_km / 10.0)
    }
}

/// h(q) = −q log₂ q − (1−q) log₂(1−q).
pub fn binary_entropy(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        0.0
    } else {
        -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Tally {
    pub detected: u64,
    pub sifted: u64,
    pub sifted_errors: u64,
    pub mismatched: u64,
    pub mismatched_errors: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            detected: self.detected + o.detected,
            sifted: self.sifted + o.sifted,
            sifted_errors: self.sifted_errors + o.sifted_errors,
            mismatched: self.mismatched + o.mismatched,
            mismatched_errors: self.mismatched_errors + o.mismatched_errors,
        }
    }
}

/// Measuring a state prepared in `prep_basis` with value `bit` in
/// `meas_basis`: deterministic if the bases agree, a fair coin otherwise.
fn measure(rng: &mut impl Rng, prep_basis: bool, bit: bool, meas_basis: bool) -> bool {
    if prep_basis == meas_basis {
        bit
    } else {
        rng.random()
    }
}

fn pulse(p: &Bb84Params, transmission: f64, p_dark: f64, seed: u64, index: u64) -> Tally {
    let mut rng = trial_rng(seed, index);
    let alice_bit: bool = rng.random();
    let alice_basis: bool = rng.random();
    let bob_basis: bool = rng.random();
    let (mut sent_basis, mut sent_bit) = (alice_basis, alice_bit);
    if p.eavesdropper {
        let eve_basis: bool = rng.random();
        sent_bit = measure(&mut rng, sent_basis, sent_bit, eve_basis);
        sent_basis = eve_basis;
    }
    let arrives = rng.random::<f64>() < transmission * p.detector_efficiency;
    let bob_bit = if arrives {
        measure(&mut rng, sent_basis, sent_bit, bob_basis)
    } else if rng.random::<f64>() < p_dark {
        rng.random()
    } else {
        return Tally::default();
    };
    let error = bob_bit != alice_bit;
    let mut t = Tally {
        detected: 1,
        ..Default::default()
    };
    if alice_basis == bob_basis {
        t.sifted = 1;
        t.sifted_errors = error as u64;
    } else {
        t.mismatched = 1;
        t.mismatched_errors = error as u64;
    }
    t
}

pub fn tally(p: &Bb84Params, seed: u64) -> Tally {
    let transmission = p.transmission();
    // two detectors can fire per gate
    let p_dark = 2.0 * p.dark_count_rate_hz * p.gate_window_ps * 1e-12;
    (0..p.pulses)
        .into_par_iter()
        .map(|i| pulse(p, transmission, p_dark, seed, i))
        .reduce(Tally::default, |a, b| a + b)
}

pub fn simulate(p: &Bb84Params, seed: u64) -> SimResult<MetricSet> {
    if p.pulses == 0 {
        return Err(SimError::Precondition("at least one pulse is required".into()));
    }
    check_range("fiber_length_km", p.fiber_length_km, 0.0, f64::MAX, "[0, inf)")?;
    check_range("attenuation_db_per_km", p.attenuation_db_per_km, 0.0, f64::MAX, "[0, inf)")?;
    check_range("detector_efficiency", p.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
    check_range("dark_count_rate_hz", p.dark_count_rate_hz, 0.0, f64::MAX, "[0, inf)")?;
    let t = tally(p, seed);
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let qber = ratio(t.sifted_errors, t.sifted);

    let mut m = MetricSet::default();
    m.set("transmission", p.transmission());
    m.set("detection_fraction", ratio(t.detected, p.pulses));
    m.set("sifted_fraction", ratio(t.sifted, p.pulses));
    m.set("sifted_bits", t.sifted as f64);
    m.set("qber", qber);
    m.set("mismatched_error_rate", ratio(t.mismatched_errors, t.mismatched));
    m.set("secure_key_bits", t.sifted as f64 * f64::max(0.0, 1.0 - 2.0 * binary_entropy(qber)));
    m.input("pulses", p.pulses as f64);
    m.input("fiber_length_km", p.fiber_length_km);
    m.input("attenuation_db_per_km", p.attenuation_db_per_km);
    m.input("detector_efficiency", p.detector_efficiency);
    m.input("dark_count_rate_hz", p.dark_count_rate_hz);
    m.input("eavesdropper", if p.eavesdropper { 1.0 } else { 0.0 });
    m.note("secure key = sifted * max(0, 1 - 2 h(QBER))");
    Ok(m)
}

pub(super) fn bind(b: &mut Binder) -> Bb84Params {
    let mut p = Bb84Params::default();
    b.bind("fiber_length_km", "length_m", |_| true, |v| v / 1000.0, &mut p.fiber_length_km);
    b.bind("attenuation_db_per_km", "attenuation_db_per_km", |_| true, |v| v, &mut p.attenuation_db_per_km);
    b.detector_efficiency(&mut p.detector_efficiency);
    b.dark_counts(&mut p.dark_count_rate_hz);
    if b.setup().components.iter().any(|c| label_has(c, "eve") || label_has(c, "eavesdrop")) {
        p.eavesdropper = true;
    }
    p
}

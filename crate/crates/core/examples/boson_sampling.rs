//! Four photons through a beam-splitter network: output distribution from
//! permanents checked against full Fock-space evolution.

use qodesign::experiments::boson_sampling::{self, BosonParams, NetworkElement};

fn main() {
    let mut p = BosonParams::default();
    p.elements.push(NetworkElement::PhaseShifter { mode: 2, phase_rad: 0.7 });
    p.elements.push(NetworkElement::BeamSplitter {
        modes: [1, 2],
        transmittance: 0.4,
    });
    let m = boson_sampling::simulate(&p).expect("valid network");
    for name in ["tv_distance", "probability_sum", "bunching_probability", "shannon_entropy_bits", "effective_dimension", "num_outcomes"] {
        println!("{name:<22} {}", m.get(name));
    }
    let dist = &m.series["output_distribution"];
    let mut top: Vec<(f64, f64)> = dist.axis.iter().copied().zip(dist.values.iter().copied()).collect();
    top.sort_by(|a, b| b.1.total_cmp(&a.1));
    println!("most likely outcomes (index, probability):");
    for (k, q) in top.iter().take(5) {
        println!("  {k:>3} {q:.5}");
    }
}

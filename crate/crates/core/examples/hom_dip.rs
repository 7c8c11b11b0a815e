//! Hong-Ou-Mandel dip: noiseless expectation against a Poisson-sampled scan
//! with realistic imperfections.

use qodesign::experiments::hom::{self, HomParams};

fn main() {
    let ideal = hom::simulate(&HomParams::noiseless(), 0).expect("valid parameters");
    let real = HomParams::default();
    println!("noiseless V = {:.4}, FWHM = {:.1} fs", ideal.get("visibility"), ideal.get("fwhm_fs"));
    println!("V_eff = {:.4}", real.effective_visibility());
    for seed in 0..5 {
        let m = hom::simulate(&real, seed).expect("valid parameters");
        println!("seed {seed}: V = {:.4}, baseline {:.0}, min {:.0}", m.get("visibility"), m.get("baseline_counts"), m.get("min_counts"));
    }
    let scan = &ideal.series["coincidence_vs_delay"];
    for (tau, n) in scan.axis.iter().zip(&scan.values).step_by(10) {
        println!("{tau:>9.1} fs  {n:>8.1}");
    }
}

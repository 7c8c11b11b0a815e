use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qcore::linalg::{c, CVector};
use qcore::{chsh_value, ghz_witness, QuantumState, Structure};
use qodesign::bundled;
use qodesign::experiments::bb84::{self, Bb84Params};
use qodesign::experiments::bell_spdc::{self, BellParams, PSI_PLUS_SETTINGS};
use qodesign::experiments::boson_sampling::{self, BosonParams, NetworkElement};
use qodesign::experiments::eit::{self, EitParams};
use qodesign::experiments::franson::{self, FransonParams};
use qodesign::experiments::frequency_conversion::{self, ConversionParams};
use qodesign::experiments::ghz_fusion::{self, GhzParams};
use qodesign::experiments::hom::{self, HomParams};
use qodesign::experiments::hyperentanglement::{self, HyperParams};
use qodesign::experiments::mach_zehnder::{self, MachZehnderParams};
use qodesign::experiments::michelson::{self, MichelsonParams};
use qodesign::experiments::quantum_eraser::{self, EraserParams};
use qodesign::experiments::teleportation::{self, TeleportationParams};
use qodesign::experiments::{self, bind_setup, ExperimentKey, ExperimentParams, NoiseParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn mach_zehnder_matches_cosine_fringes() {
    let p = MachZehnderParams {
        detector_efficiency: 1.0,
        ..Default::default()
    };
    for k in 0..50 {
        let phi = k as f64 * 0.13;
        let (d1, d2) = mach_zehnder::output_probabilities(&p, phi);
        assert_abs_diff_eq!(d1, (1.0 + phi.cos()) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d2, (1.0 - phi.cos()) / 2.0, epsilon = 1e-12);
    }
    let m = mach_zehnder::simulate(&p).unwrap();
    assert!(m.get("visibility_d1") >= 0.999);
    assert!(m.get("visibility_d2") >= 0.999);
    assert!(m.get("intensity_sum_deviation") <= 1e-12);
}

#[test]
fn mach_zehnder_arm_loss_lowers_visibility() {
    let p = MachZehnderParams {
        upper_arm_transmission: 0.25,
        ..Default::default()
    };
    let m = mach_zehnder::simulate(&p).unwrap();
    // |a|² = 1/8, |b|² = 1/2 → V = 2|a||b| / (|a|² + |b|²)
    let (a, b) = (0.125f64, 0.5f64);
    assert_abs_diff_eq!(m.get("visibility_d1"), 2.0 * (a * b).sqrt() / (a + b), epsilon = 1e-3);
}

#[test]
fn michelson_period_flux_and_contrast() {
    let m = michelson::simulate(&MichelsonParams::default()).unwrap();
    assert!((m.get("fringe_period_nm") - 316.4).abs() / 316.4 < 1e-3);
    let flux = 5e-3 * 632.8e-9 / (6.626_070_15e-34 * 299_792_458.0);
    assert_abs_diff_eq!(m.get("photon_flux"), flux, epsilon = flux * 1e-12);
    assert!((flux - 1.59e16).abs() / 1.59e16 < 5e-3);
    assert_eq!(m.get("visibility"), m.get("contrast"));

    let unequal = MichelsonParams {
        reflectivity_m1: 0.9,
        reflectivity_m2: 0.1,
        ..Default::default()
    };
    let m = michelson::simulate(&unequal).unwrap();
    assert_abs_diff_eq!(m.get("contrast"), 2.0 * 0.09f64.sqrt() / 1.0, epsilon = 1e-3);
}

#[test]
fn hom_noiseless_visibility_is_configured() {
    for v in [1.0, 0.9, 0.5] {
        let p = HomParams {
            base_visibility: v,
            ..HomParams::noiseless()
        };
        let m = hom::simulate(&p, 1).unwrap();
        assert_abs_diff_eq!(m.get("visibility"), p.effective_visibility(), epsilon = 1e-9);
        assert_abs_diff_eq!(m.get("visibility"), v, epsilon = 1e-9);
    }
    assert_eq!(hom::expected_coincidences(&HomParams::noiseless(), 0.0), 0.0);
}

#[test]
fn hom_effective_visibility_formula() {
    let p = HomParams::default();
    let n = NoiseParams::default();
    assert_abs_diff_eq!(p.effective_visibility(), n.mode_matching.powi(2) * (1.0 - n.distinguishability), epsilon = 1e-15);
}

#[test]
fn hom_poisson_is_seeded() {
    let p = HomParams::default();
    assert_eq!(hom::simulate(&p, 9).unwrap(), hom::simulate(&p, 9).unwrap());
    assert_ne!(hom::simulate(&p, 9).unwrap().get("visibility"), hom::simulate(&p, 10).unwrap().get("visibility"));
}

proptest! {
    #[test]
    fn psi_plus_coincidences(a in -PI..PI, b in -PI..PI) {
        let rho = bell_spdc::state(&BellParams::default()).unwrap();
        let got = bell_spdc::coincidence_probability(&rho, a, b).unwrap();
        prop_assert!((got - (a + b).sin().powi(2) / 2.0).abs() < 1e-12);
    }
}

#[test]
fn bell_metrics() {
    let m = bell_spdc::simulate(&BellParams::default()).unwrap();
    assert_abs_diff_eq!(m.get("fidelity"), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(m.get("entanglement_entropy"), 2f64.ln(), epsilon = 1e-9);
    assert_abs_diff_eq!(m.get("coincidence_efficiency"), 0.4225, epsilon = 1e-12);
    assert_abs_diff_eq!(m.get("coincidence_both_zero"), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(m.get("chsh"), 2.0 * SQRT_2, epsilon = 1e-9);

    let rho = bell_spdc::state(&BellParams::default()).unwrap();
    assert_abs_diff_eq!(chsh_value(&rho, &PSI_PLUS_SETTINGS).unwrap(), 2.0 * SQRT_2, epsilon = 1e-12);
}

#[test]
fn bell_white_noise_scales_chsh() {
    let p = BellParams {
        state_visibility: 0.6,
        ..Default::default()
    };
    let m = bell_spdc::simulate(&p).unwrap();
    assert_abs_diff_eq!(m.get("chsh"), 0.6 * 2.0 * SQRT_2, epsilon = 1e-9);
}

#[test]
fn eraser_which_path_and_erased_channels() {
    let m = quantum_eraser::simulate(&EraserParams::default(), 0).unwrap();
    assert_eq!(m.get("visibility_d1"), 0.0);
    assert_eq!(m.get("visibility_d2"), 0.0);
    assert!(m.get("visibility_d3") >= 0.95);
    assert!(m.get("visibility_d4") >= 0.95);
    assert_abs_diff_eq!(m.get("fringe_phase_offset"), PI, epsilon = 1e-9);
    assert_abs_diff_eq!(m.get("fringe_spacing_mm"), 810e-6 * 200.0 / 0.5, epsilon = 1e-12);

    // erased patterns are complementary: they sum to the which-path total
    let d3 = &m.series["pattern_d3"].values;
    let d4 = &m.series["pattern_d4"].values;
    let d1 = &m.series["pattern_d1"].values;
    let d2 = &m.series["pattern_d2"].values;
    for i in 0..d1.len() {
        assert_abs_diff_eq!(d3[i] + d4[i], d1[i] + d2[i], epsilon = 1e-9 * (d1[i] + d2[i]).max(1.0));
    }
}

#[test]
fn eraser_sampled_mode_is_seeded() {
    let p = EraserParams {
        analytic: false,
        pairs: 20_000,
        ..Default::default()
    };
    let a = quantum_eraser::simulate(&p, 3).unwrap();
    assert_eq!(a, quantum_eraser::simulate(&p, 3).unwrap());
    assert!(a.get("visibility_d3") > 0.8);
}

#[test]
fn bb84_statistics() {
    let clean = Bb84Params::default();
    assert_abs_diff_eq!(clean.transmission(), 10f64.powf(-0.2), epsilon = 1e-15);
    let eve = Bb84Params {
        eavesdropper: true,
        ..Default::default()
    };
    let p_det = clean.transmission() * clean.detector_efficiency;
    let p_dark = 2.0 * 100.0 * 1000e-12;
    let expected_sifted = 0.5 * (p_det + (1.0 - p_det) * p_dark);
    let sigma = (expected_sifted * (1.0 - expected_sifted) / 1e4).sqrt();
    for seed in 0..5 {
        let m = bb84::simulate(&clean, seed).unwrap();
        assert!((m.get("sifted_fraction") - expected_sifted).abs() < 3.0 * sigma);
        assert!(m.get("qber") < 0.005);
        assert!((0.47..=0.53).contains(&m.get("mismatched_error_rate")));
        let m = bb84::simulate(&eve, seed).unwrap();
        assert!((0.23..=0.27).contains(&m.get("qber")), "eve qber {}", m.get("qber"));
    }
}

#[test]
fn bb84_tally_independent_of_thread_count() {
    let p = Bb84Params::default();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bb84::tally(&p, 77))
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn binary_entropy_oracle() {
    assert_eq!(bb84::binary_entropy(0.0), 0.0);
    assert_abs_diff_eq!(bb84::binary_entropy(0.5), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(bb84::binary_entropy(0.11), bb84::binary_entropy(0.89), epsilon = 1e-15);
}

#[test]
fn franson_chsh_scales_with_visibility() {
    for v in [FRAC_1_SQRT_2, 0.8, 1.0] {
        let m = franson::simulate(&FransonParams {
            visibility: v,
            ..Default::default()
        })
        .unwrap();
        assert_abs_diff_eq!(m.get("chsh"), 2.0 * SQRT_2 * v, epsilon = 1e-9);
        assert!(m.get("single_visibility").abs() < 1e-12);
        assert_abs_diff_eq!(m.get("coincidence_visibility"), v, epsilon = 1e-9);
    }
}

#[test]
fn franson_condition_is_enforced() {
    let short = FransonParams {
        delay_ps: 0.5,
        ..Default::default()
    };
    assert!(franson::simulate(&short).unwrap_err().to_string().contains("Franson condition"));
    let long = FransonParams {
        delay_ps: 2e9,
        ..Default::default()
    };
    assert!(franson::simulate(&long).is_err());
}

#[test]
fn teleportation_paper_angles() {
    let m = teleportation::simulate(&TeleportationParams::default()).unwrap();
    for deg in ["0", "30", "45", "60", "90"] {
        assert_abs_diff_eq!(m.get(&format!("fidelity_{deg}deg")), 1.0, epsilon = 1e-9);
    }
    for name in ["phi_plus", "phi_minus", "psi_plus", "psi_minus"] {
        assert_abs_diff_eq!(m.get(&format!("bell_probability_{name}")), 0.25, epsilon = 1e-9);
    }
    assert_abs_diff_eq!(m.get("coincidence_efficiency"), 0.49, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn teleportation_random_bloch_states(theta in 0.0..PI, phi in 0.0..(2.0 * PI)) {
        let psi = QuantumState::normalized(
            CVector::from_vec(vec![c((theta / 2.0).cos(), 0.0), c(0.0, phi).exp() * (theta / 2.0).sin()]),
            Structure::Qubits(1),
        ).unwrap();
        let branches = teleportation::teleport(&psi).unwrap();
        prop_assert_eq!(branches.len(), 4);
        for b in &branches {
            prop_assert!((b.probability - 0.25).abs() < 1e-9);
            prop_assert!((b.fidelity - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn ghz_ideal_distributions_and_mermin() {
    let m = ghz_fusion::simulate(&GhzParams {
        hom_visibility: 1.0,
        mode_overlap: 1.0,
        ..Default::default()
    })
    .unwrap();
    assert_abs_diff_eq!(m.get("fidelity"), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(m.get("p_zzz_110"), 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(m.get("p_zzz_001"), 0.5, epsilon = 1e-12);
    let xxx: Vec<f64> = (0..8).map(|k| m.get(&format!("p_xxx_{k:03b}"))).collect();
    // |110⟩ + |001⟩ has ⟨XXX⟩ = +1: even-parity outcomes only
    for (k, p) in xxx.iter().enumerate() {
        let want = if (k as u32).count_ones() % 2 == 0 { 0.25 } else { 0.0 };
        assert_abs_diff_eq!(*p, want, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(m.get("mermin"), 4.0, epsilon = 1e-4);
}

#[test]
fn ghz_witness_is_half_minus_fidelity() {
    for p in [0.0, 0.3, 0.746, 1.0] {
        let rho = ghz_fusion::state(p).unwrap();
        let f = (1.0 + p) / 2.0;
        assert_abs_diff_eq!(ghz_witness(&rho, &ghz_fusion::target()).unwrap(), 0.5 - f, epsilon = 1e-12);
    }
    let rho = ghz_fusion::state(0.746).unwrap();
    assert_abs_diff_eq!(ghz_witness(&rho, &ghz_fusion::target()).unwrap(), -0.373, epsilon = 1e-12);
}

#[test]
fn hyperentanglement_per_dof() {
    let m = hyperentanglement::simulate(&HyperParams::default()).unwrap();
    for dof in ["pol", "oam"] {
        assert_abs_diff_eq!(m.get(&format!("concurrence_{dof}")), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.get(&format!("chsh_{dof}")), 2.0 * SQRT_2, epsilon = 1e-9);
    }
    assert_eq!(m.get("schmidt_number"), 4.0);
    assert_abs_diff_eq!(m.get("marginal_purity_a"), 0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(m.get("fourfold_efficiency"), 0.7f64.powi(4), epsilon = 1e-15);

    let noisy = hyperentanglement::simulate(&HyperParams {
        visibility_pol: 0.5,
        ..Default::default()
    })
    .unwrap();
    // Werner state: C = max(0, (3p − 1)/2)
    assert_abs_diff_eq!(noisy.get("concurrence_pol"), 0.25, epsilon = 1e-9);
}

fn random_network(rng: &mut ChaCha8Rng) -> Vec<NetworkElement> {
    (0..rng.random_range(3..10))
        .map(|_| {
            if rng.random_bool(0.6) {
                let i = rng.random_range(0..3);
                NetworkElement::BeamSplitter {
                    modes: [i, i + 1],
                    transmittance: rng.random(),
                }
            } else {
                NetworkElement::PhaseShifter {
                    mode: rng.random_range(0..4),
                    phase_rad: rng.random_range(0.0..2.0 * PI),
                }
            }
        })
        .collect()
}

#[test]
fn boson_sampling_routes_agree_on_random_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let p = BosonParams {
            elements: random_network(&mut rng),
            ..Default::default()
        };
        let m = boson_sampling::simulate(&p).unwrap();
        assert!(m.get("tv_distance") < 1e-9);
        assert_abs_diff_eq!(m.get("purity"), 1.0, epsilon = 1e-9);
        assert!(m.get("photon_number_deviation") < 1e-9);
        assert_abs_diff_eq!(m.get("probability_sum"), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.get("effective_dimension"), 1.0 / m.get("collision_probability"), epsilon = 1e-9);
    }
}

#[test]
fn boson_two_photon_bunching() {
    let p = BosonParams {
        modes: 2,
        elements: vec![NetworkElement::BeamSplitter {
            modes: [0, 1],
            transmittance: 0.5,
        }],
        input: vec![1, 1],
        ..Default::default()
    };
    let m = boson_sampling::simulate(&p).unwrap();
    let probs = &m.series["output_distribution"].values;
    assert_eq!(m.get("num_outcomes"), 3.0);
    assert_abs_diff_eq!(m.get("bunching_probability"), 1.0, epsilon = 1e-12);
    assert!(probs.iter().any(|&q| q.abs() < 1e-12));
}

#[test]
fn boson_fourfold_efficiency() {
    let m = boson_sampling::simulate(&BosonParams::default()).unwrap();
    assert_abs_diff_eq!(m.get("detection_fourfold"), 0.85f64.powi(4), epsilon = 1e-15);
}

#[test]
fn eit_steady_state_oracles() {
    let p = EitParams::default();
    let m = eit::simulate(&p).unwrap();
    assert!(m.get("max_residual") < 1e-9);
    assert_abs_diff_eq!(m.get("trace"), 1.0, epsilon = 1e-12);
    assert!((m.get("rho12_abs") - 0.099).abs() <= 0.003);
    // dark state coherence Ωp Ωc / (Ωp² + Ωc²)
    let (wp, wc) = (p.omega_p_mhz, p.omega_c_mhz);
    assert_abs_diff_eq!(m.get("rho12_abs"), wp * wc / (wp * wp + wc * wc), epsilon = 2e-3);
    assert!((m.get("od_resonant") - 3.5e-4).abs() <= 3.5e-5);
}

#[test]
fn eit_without_dephasing_is_dark() {
    let p = EitParams {
        gamma_deph_mhz: 0.0,
        ..Default::default()
    };
    let m = eit::simulate(&p).unwrap();
    assert!(m.get("dark_state_fidelity") > 1.0 - 1e-6);
    assert!(m.get("excited_population") < 1e-9);
}

#[test]
fn eit_dense_cell_shows_transparency() {
    let p = EitParams {
        atomic_density_per_cm3: 1e11,
        ..Default::default()
    };
    let m = eit::simulate(&p).unwrap();
    assert!(m.get("transparency_contrast") >= 0.5);
    assert!(m.get("transmission_on") > m.get("transmission_off"));
}

#[test]
fn frequency_conversion_oracles() {
    assert_abs_diff_eq!(frequency_conversion::output_wavelength(1550.0, 980.0), 1.0 / (1.0 / 1550.0 + 1.0 / 980.0), epsilon = 1e-9);
    let p = ConversionParams {
        interaction_time: PI / 2.0 / 3.0,
        ..Default::default()
    };
    let m = frequency_conversion::simulate(&p).unwrap();
    assert_abs_diff_eq!(m.get("conversion_efficiency"), 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(m.get("g2_zero"), 0.0, epsilon = 1e-9);
    assert!(m.get("photon_conservation_residual").abs() < 1e-9);
    for k in 0..20 {
        let t = k as f64 * 0.05;
        let e = frequency_conversion::evolve(&p, t).unwrap();
        assert_abs_diff_eq!(e.conversion, (3.0 * t).sin().powi(2), epsilon = 1e-9);
        assert_abs_diff_eq!(e.total_photons, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn every_bundled_setup_binds_and_runs() {
    for (key, setup) in bundled::setups() {
        let (params, bindings) = bind_setup(key, &setup);
        assert_eq!(params.key(), key);
        assert!(bindings.iter().all(|b| b.setup_value.is_finite()), "{key}");
        let m = experiments::run(&params, 42).unwrap();
        m.check_finite().unwrap();
        assert!(!m.scalars.is_empty(), "{key}");
    }
}

#[test]
fn params_json_round_trip() {
    for key in ExperimentKey::ALL {
        let p = ExperimentParams::default_for(key);
        let bytes = serde_json::to_vec(&p.to_json_value()).unwrap();
        assert_eq!(ExperimentParams::from_json(key, &bytes).unwrap(), p);
    }
    assert!(ExperimentParams::from_json(ExperimentKey::Hom, br#"{"no_such_field": 1}"#).is_err());
}

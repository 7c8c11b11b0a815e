use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use proptest::prelude::*;
use qodesign::bundled;
use qodesign::experiments::{self, bind_setup, ExperimentKey, ExperimentParams, MetricSet, PhysicsDomain, SimError, SimResult};
use qodesign::optical_model::{Component, ComponentKind, OpticalSetup, Unit};
use qodesign::pipeline::{
    classify_domain, classify_intent_fallback, infer_key, lint_design, run_pipeline, score_alignment, Executor, Generator, Intent, PipelineConfig, Refiner,
    RunPlan, RunRecord, RunStatus, Stages, MAX_ITERATIONS,
};

#[test]
fn intent_routing() {
    let design = [
        "Design a Mach-Zehnder interferometer with a 50:50 splitter",
        "Add a second detector after the PBS",
        "please replace the BBO crystal with PPKTP",
        "Create an HOM setup",
    ];
    let chat = [
        "What is a Bell state?",
        "How does SPDC work",
        "Can you add a detector?",
        "thanks, that looks great",
        "",
        "Explain the delayed-choice eraser.",
    ];
    for t in design {
        assert_eq!(classify_intent_fallback(t), Intent::Design, "{t}");
    }
    for t in chat {
        assert_eq!(classify_intent_fallback(t), Intent::Chat, "{t}");
    }
}

#[test]
fn bundled_keys_and_domains() {
    for (key, setup) in bundled::setups() {
        assert_eq!(infer_key(&setup), Some(key), "{}", setup.title);
        assert_eq!(classify_domain(&setup), key.domain(), "{key}");
    }
}

fn with_component(mut setup: OpticalSetup, c: Component) -> OpticalSetup {
    let id = c.id.clone();
    let det = setup.of_kind(ComponentKind::Detector).next().unwrap().id.clone();
    let src = setup.of_kind(ComponentKind::Source).next().unwrap().id.clone();
    setup.components.push(c);
    setup.connect(&[&src, &id, &det]);
    setup
}

#[test]
fn domain_rules() {
    let base = bundled::setup(ExperimentKey::MachZehnder);
    let atomic = with_component(
        base.clone(),
        Component::new("cell", ComponentKind::Measurement, "Rb Vapor Cell", 5.0, 5.0).with("atomic_density", 1e11, Unit::Dimensionless),
    );
    assert_eq!(classify_domain(&atomic), PhysicsDomain::Atomic);
    let cv = with_component(
        base,
        Component::new("opo", ComponentKind::Crystal, "OPO", 5.0, 5.0).with("squeezing_db", 6.0, Unit::DB),
    );
    assert_eq!(classify_domain(&cv), PhysicsDomain::ContinuousVariable);
}

#[test]
fn lint_flags_out_of_range_values() {
    let hom = bundled::setup(ExperimentKey::Hom);
    let squeezed = with_component(
        hom.clone(),
        Component::new("opo", ComponentKind::Crystal, "Squeezer", 5.0, 5.0).with("squeezing_db", 68.0, Unit::DB),
    );
    let v = lint_design(&squeezed);
    assert!(!v.approved);
    assert!(v.concerns.iter().any(|c| c.contains("68")));

    let uv = with_component(hom, Component::new("lamp", ComponentKind::Source, "Lamp", 5.0, 5.0).with("wavelength_nm", 10.0, Unit::Nm));
    assert!(!lint_design(&uv).approved);
    for (key, setup) in bundled::setups() {
        let v = lint_design(&setup);
        assert!(v.approved, "{key}: {:?}", v.concerns);
        assert_eq!(v.confidence, 1.0);
    }
}

proptest! {
    #[test]
    fn lint_ignores_component_order(k in 0usize..13, perm in Just((0..64).collect::<Vec<usize>>()).prop_shuffle()) {
        let mut setup = bundled::setup(ExperimentKey::ALL[k]);
        let baseline = lint_design(&setup);
        let n = setup.components.len();
        let order: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
        setup.components = order.iter().map(|&i| setup.components[i].clone()).collect();
        prop_assert_eq!(lint_design(&setup), baseline);
    }
}

struct Fixed(ExperimentKey);

impl Generator for Fixed {
    fn plan(&self, setup: &OpticalSetup, seed: u64) -> Result<RunPlan, String> {
        Ok(RunPlan {
            key: self.0,
            params: bind_setup(self.0, setup).0,
            seed,
        })
    }
}

#[test]
fn wrong_simulator_is_reported_as_formalism_error() {
    let setup = bundled::setup(ExperimentKey::Hom);
    let params = bind_setup(ExperimentKey::MachZehnder, &setup).0;
    let metrics = experiments::run(&params, 1).unwrap();
    let report = score_alignment(&setup, ExperimentKey::MachZehnder, &metrics);
    assert!(f64::from(report.score) <= 7.5);
    assert!(report.wrong_in_code.iter().any(|i| i.blocking && i.description.contains("formalism")));
}

#[test]
fn matched_simulators_score_high() {
    for (key, setup) in bundled::setups() {
        let out = run_pipeline(&setup, &Stages::default(), &PipelineConfig::default());
        assert_eq!(out.best().key, Some(key));
        assert!(out.score() >= 8, "{key}: {}", out.score());
        assert_eq!(out.executions, 1);
    }
}

#[test]
fn targeted_refiner_recovers_from_a_wrong_simulator() {
    let setup = bundled::setup(ExperimentKey::Hom);
    let stages = Stages {
        generator: Box::new(Fixed(ExperimentKey::MachZehnder)),
        ..Default::default()
    };
    let out = run_pipeline(&setup, &stages, &PipelineConfig::default());
    assert_eq!(out.history.len(), 2);
    assert_eq!(out.best().key, Some(ExperimentKey::Hom));
    assert!(out.history[0].score() <= 5);
    assert!(out.score() >= 8);
}

#[test]
fn rejected_designs_never_execute() {
    let squeezed = with_component(
        bundled::setup(ExperimentKey::Hom),
        Component::new("opo", ComponentKind::Crystal, "Squeezer", 5.0, 5.0).with("squeezing_db", 68.0, Unit::DB),
    );
    let calls = Arc::new(AtomicUsize::new(0));
    let stages = Stages {
        executor: Arc::new(Counting {
            calls: calls.clone(),
            fail_after: usize::MAX,
        }),
        ..Default::default()
    };
    let out = run_pipeline(&squeezed, &stages, &PipelineConfig::default());
    assert_eq!(out.executions, 0);
    assert_eq!(calls.load(Ordering::SeqCst), 0);
    assert_eq!(out.best().status, RunStatus::RejectedPreRun);
}

struct Counting {
    calls: Arc<AtomicUsize>,
    fail_after: usize,
}

impl Executor for Counting {
    fn execute(&self, params: &ExperimentParams, seed: u64) -> SimResult<MetricSet> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        if n >= self.fail_after {
            return Err(SimError::Precondition("injected failure".into()));
        }
        experiments::run(params, seed)
    }
}

/// Never gives up: always proposes another wrong-simulator run.
struct Relentless;

impl Refiner for Relentless {
    fn refine(&self, _: &OpticalSetup, plan: &RunPlan, _: &RunRecord) -> Option<RunPlan> {
        Some(RunPlan {
            seed: plan.seed + 1,
            ..plan.clone()
        })
    }
}

/// Swaps in a different wrong simulator each time.
struct Wandering;

impl Refiner for Wandering {
    fn refine(&self, setup: &OpticalSetup, plan: &RunPlan, _: &RunRecord) -> Option<RunPlan> {
        let next = ExperimentKey::ALL[(ExperimentKey::ALL.iter().position(|k| *k == plan.key).unwrap() + 5) % 13];
        Some(RunPlan {
            key: next,
            params: bind_setup(next, setup).0,
            seed: plan.seed,
        })
    }
}

#[test]
fn adversarial_refiners_are_bounded() {
    for key in ExperimentKey::ALL {
        let setup = bundled::setup(key);
        let wrong = ExperimentKey::ALL[(ExperimentKey::ALL.iter().position(|k| *k == key).unwrap() + 3) % 13];
        for refiner in [Box::new(Relentless) as Box<dyn Refiner>, Box::new(Wandering)] {
            let calls = Arc::new(AtomicUsize::new(0));
            let stages = Stages {
                generator: Box::new(Fixed(wrong)),
                executor: Arc::new(Counting {
                    calls: calls.clone(),
                    fail_after: usize::MAX,
                }),
                refiner,
                ..Default::default()
            };
            let config = PipelineConfig {
                max_iterations: 50,
                ..Default::default()
            };
            let out = run_pipeline(&setup, &stages, &config);
            assert!(out.executions <= MAX_ITERATIONS);
            assert_eq!(calls.load(Ordering::SeqCst), out.executions);
            let max = out.history.iter().map(RunRecord::score).max().unwrap();
            assert_eq!(out.score(), max);
        }
    }
}

#[test]
fn best_record_survives_a_worse_refinement() {
    let setup = bundled::setup(ExperimentKey::Hom);
    let stages = Stages {
        generator: Box::new(Fixed(ExperimentKey::MachZehnder)),
        executor: Arc::new(Counting {
            calls: Arc::new(AtomicUsize::new(0)),
            fail_after: 1,
        }),
        refiner: Box::new(Relentless),
        ..Default::default()
    };
    let out = run_pipeline(&setup, &stages, &PipelineConfig::default());
    assert_eq!(out.history.len(), 3);
    assert_eq!(out.history[1].status, RunStatus::RunFailed);
    assert_eq!(out.best, 0);
    assert!(out.score() > 0);
    assert!(out.best().metrics.is_some());
}

struct Stalled;

impl Executor for Stalled {
    fn execute(&self, params: &ExperimentParams, seed: u64) -> SimResult<MetricSet> {
        std::thread::sleep(Duration::from_secs(5));
        experiments::run(params, seed)
    }
}

#[test]
fn overrunning_simulations_time_out() {
    let stages = Stages {
        executor: Arc::new(Stalled),
        ..Default::default()
    };
    let config = PipelineConfig {
        timeout: Duration::from_millis(50),
        max_iterations: 1,
        ..Default::default()
    };
    let started = std::time::Instant::now();
    let out = run_pipeline(&bundled::setup(ExperimentKey::Michelson), &stages, &config);
    assert!(started.elapsed() < Duration::from_secs(2));
    assert_eq!(out.best().status, RunStatus::RunFailed);
    assert!(out.best().concerns.iter().any(|c| c.contains("exceeded")));
}

#[test]
fn unmatched_setups_fail_without_running() {
    let mut setup = bundled::setup(ExperimentKey::MachZehnder);
    setup.title = "Tabletop optics".into();
    setup.description = "Some lenses and a camera.".into();
    for c in &mut setup.components {
        c.label = "Part".into();
    }
    let out = run_pipeline(&setup, &Stages::default(), &PipelineConfig::default());
    assert_eq!(out.executions, 0);
    assert_eq!(out.best().status, RunStatus::RunFailed);
}

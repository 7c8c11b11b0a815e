//! Design validation loop: intent routing, domain classification, parameter
//! lint, watchdog-guarded simulation, alignment scoring and bounded
//! refinement with revert-to-best.
//!
//! The generator, reviewer, executor and refiner stages are traits with
//! deterministic defaults, so any of them can be replaced without touching
//! the loop.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::mpsc;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::experiments::{self, bind_setup, label_has, ExperimentKey, ExperimentParams, MetricSet, PhysicsDomain, SimResult};
use crate::optical_model::{validate_structure, ComponentKind, OpticalSetup, Unit};

pub const MAX_ITERATIONS: usize = 3;
pub const REFINE_BELOW: u8 = 6;
pub const RUN_TIMEOUT: Duration = Duration::from_secs(30);
/// Score ceiling while a blocking issue remains.
pub const BLOCKED_SCORE_CAP: u8 = 5;

pub const WAVELENGTH_RANGE_NM: (f64, f64) = (200.0, 2000.0);
pub const MAX_SQUEEZING_DB: f64 = 15.0;
pub const DETECTOR_EFFICIENCY_RANGE: (f64, f64) = (0.1, 0.95);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intent {
    Chat,
    Design,
}

const DESIGN_VERBS: [&str; 7] = ["create", "design", "add", "remove", "modify", "use", "replace"];
const INTERROGATIVES: [&str; 18] = [
    "can", "could", "should", "would", "will", "what", "how", "why", "which", "where", "when", "who", "is", "are",
    "does", "do", "did", "may",
];

/// Keyword router: a design verb outside a question means a design request;
/// anything else, including empty or unrecognised text, is chat.
pub fn classify_intent_fallback(text: &str) -> Intent {
    let lower = text.to_lowercase();
    let words: Vec<&str> = lower.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).collect();
    let Some(first) = words.first() else {
        return Intent::Chat;
    };
    if INTERROGATIVES.contains(first) || lower.trim_end().ends_with('?') {
        return Intent::Chat;
    }
    if words.iter().any(|w| DESIGN_VERBS.contains(w)) {
        Intent::Design
    } else {
        Intent::Chat
    }
}

const KEY_RULES: [(&[&str], ExperimentKey); 13] = [
    (&["teleport*"], ExperimentKey::Teleportation),
    (&["hyperentangle*"], ExperimentKey::Hyperentanglement),
    (&["ghz"], ExperimentKey::GhzFusion),
    (&["franson"], ExperimentKey::Franson),
    (&["eraser"], ExperimentKey::QuantumEraser),
    (&["bb84", "qkd", "key distribution"], ExperimentKey::Bb84),
    (&["boson sampling"], ExperimentKey::BosonSampling),
    (&["eit", "electromagnetically induced"], ExperimentKey::Eit),
    (&["frequency conversion", "upconversion", "sum-frequency"], ExperimentKey::FrequencyConversion),
    (&["hong-ou-mandel", "hom"], ExperimentKey::Hom),
    (&["michelson"], ExperimentKey::Michelson),
    (&["mach-zehnder", "mach zehnder"], ExperimentKey::MachZehnder),
    (&["bell"], ExperimentKey::BellSpdc),
];

/// Whole-word match; a trailing `*` matches any word with that prefix, and
/// needles containing punctuation or spaces match as substrings.
fn has_word(text: &str, needle: &str) -> bool {
    let mut words = text.split(|c: char| !c.is_alphanumeric());
    if let Some(stem) = needle.strip_suffix('*') {
        return words.any(|w| w.starts_with(stem));
    }
    if needle.contains(|c: char| !c.is_alphanumeric()) {
        return text.contains(needle);
    }
    words.any(|w| w == needle)
}

/// Simulator named by the setup's title, falling back to its description.
pub fn infer_key(setup: &OpticalSetup) -> Option<ExperimentKey> {
    [&setup.title, &setup.description].into_iter().find_map(|text| {
        let text = text.to_lowercase();
        KEY_RULES
            .iter()
            .find(|(needles, _)| needles.iter().any(|n| has_word(&text, n)))
            .map(|(_, key)| *key)
    })
}

pub fn classify_domain(setup: &OpticalSetup) -> PhysicsDomain {
    let any_label = |needle: &str| setup.components.iter().any(|c| label_has(c, needle));
    let any_param = |needle: &str| setup.components.iter().any(|c| c.params.keys().any(|k| k.to_lowercase().contains(needle)));
    if any_label("vapor cell") || any_param("atomic_density") {
        PhysicsDomain::Atomic
    } else if any_param("squeezing") || any_label("squeez") || any_label("homodyne") {
        PhysicsDomain::ContinuousVariable
    } else if any_label("delay") && any_label("coincidence") {
        PhysicsDomain::Temporal
    } else {
        infer_key(setup).map_or(PhysicsDomain::DiscretePhotonic, |k| k.domain())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewVerdict {
    pub approved: bool,
    pub confidence: f64,
    pub concerns: Vec<String>,
}

fn wavelength_nm(value: f64, unit: Unit) -> Option<f64> {
    match unit {
        Unit::Nm => Some(value),
        Unit::Mm => Some(value * 1e6),
        Unit::M => Some(value * 1e9),
        _ => None,
    }
}

/// Physical-range and structural checks, run before any simulation.
pub fn lint_design(setup: &OpticalSetup) -> ReviewVerdict {
    let mut checks = 1usize;
    let mut concerns = Vec::new();
    for c in &setup.components {
        for (name, q) in &c.params {
            let lname = name.to_lowercase();
            if lname.contains("wavelength") {
                checks += 1;
                let nm = wavelength_nm(q.value, q.unit);
                if !nm.is_some_and(|v| (WAVELENGTH_RANGE_NM.0..=WAVELENGTH_RANGE_NM.1).contains(&v)) {
                    concerns.push(format!(
                        "wavelength: {}.{} = {} {:?} is outside {}-{} nm",
                        c.id, name, q.value, q.unit, WAVELENGTH_RANGE_NM.0, WAVELENGTH_RANGE_NM.1
                    ));
                }
            }
            if lname.contains("squeezing") {
                checks += 1;
                if !(q.value < MAX_SQUEEZING_DB) {
                    concerns.push(format!(
                        "squeezing: {}.{} = {} dB is not below {} dB",
                        c.id, name, q.value, MAX_SQUEEZING_DB
                    ));
                }
            }
        }
        if c.kind == ComponentKind::Detector {
            if let Some(eta) = c.param("efficiency") {
                checks += 1;
                if !(DETECTOR_EFFICIENCY_RANGE.0..=DETECTOR_EFFICIENCY_RANGE.1).contains(&eta) {
                    concerns.push(format!(
                        "detector efficiency: {}.efficiency = {} is outside {}-{}",
                        c.id, eta, DETECTOR_EFFICIENCY_RANGE.0, DETECTOR_EFFICIENCY_RANGE.1
                    ));
                }
            }
        }
    }
    let findings = validate_structure(setup);
    let violations = concerns.len() + findings.len();
    concerns.extend(findings.iter().map(|f| format!("structure: {f}")));
    concerns.sort();
    ReviewVerdict {
        approved: violations == 0,
        confidence: (1.0 - violations as f64 / checks as f64).clamp(0.0, 1.0),
        concerns,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentIssue {
    pub description: String,
    pub blocking: bool,
}

impl AlignmentIssue {
    fn new(description: String, blocking: bool) -> Self {
        AlignmentIssue { description, blocking }
    }
}

/// Four criteria of 2.5 points each: (a) formalism, (b) component coverage,
/// (c) parameter fidelity, (d) observable coverage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub score: u8,
    pub formalism: f64,
    pub components: f64,
    pub parameters: f64,
    pub observables: f64,
    pub missing_from_code: Vec<AlignmentIssue>,
    pub wrong_in_code: Vec<AlignmentIssue>,
}

impl AlignmentReport {
    pub fn has_blocking(&self) -> bool {
        self.missing_from_code.iter().chain(&self.wrong_in_code).any(|i| i.blocking)
    }

    pub fn criteria_sum(&self) -> f64 {
        self.formalism + self.components + self.parameters + self.observables
    }
}

const ENTANGLEMENT_CLAIMS: [&str; 6] = ["entangle", "bell", "chsh", "ghz", "mermin", "concurrence"];
/// Scalar-name fragments that count as an entanglement measure.
const ENTANGLEMENT_METRICS: [&str; 7] = ["fidelity", "concurrence", "chsh", "witness", "mermin", "entanglement_entropy", "schmidt_number"];

fn claims_entanglement(setup: &OpticalSetup) -> bool {
    let text = format!("{} {} {}", setup.title, setup.description, setup.expected_outcomes.join(" ")).to_lowercase();
    ENTANGLEMENT_CLAIMS.iter().any(|k| text.contains(k))
}

fn round_half_up(x: f64) -> u8 {
    (x + 0.5).floor().clamp(0.0, 10.0) as u8
}

pub fn score_alignment(setup: &OpticalSetup, key: ExperimentKey, metrics: &MetricSet) -> AlignmentReport {
    let mut missing = Vec::new();
    let mut wrong = Vec::new();

    let domain = classify_domain(setup);
    let intended = infer_key(setup);
    let mut formalism = 0.0;
    if domain == key.domain() {
        formalism += 1.25;
    }
    if intended.is_none_or(|k| k == key) {
        formalism += 1.25;
    }
    if formalism < 2.5 {
        wrong.push(AlignmentIssue::new(
            format!(
                "formalism mismatch: setup is {} ({}), simulator {} models {}",
                intended.map_or("unrecognised", |k| k.as_str()),
                domain,
                key,
                key.domain()
            ),
            true,
        ));
    }

    let kinds: BTreeSet<ComponentKind> = setup.components.iter().map(|c| c.kind).collect();
    let modeled = key.modeled_kinds();
    let covered = kinds.iter().filter(|k| modeled.contains(k)).count();
    for kind in kinds.iter().filter(|k| !modeled.contains(k)) {
        let ids: Vec<&str> = setup.components.iter().filter(|c| c.kind == *kind).map(|c| c.id.as_str()).collect();
        missing.push(AlignmentIssue::new(
            format!("no modeled effect for {} components: {}", kind, ids.join(", ")),
            false,
        ));
    }
    let components = if kinds.is_empty() { 2.5 } else { 2.5 * covered as f64 / kinds.len() as f64 };

    let (_, bindings) = bind_setup(key, setup);
    let mut matched = 0usize;
    for b in &bindings {
        match metrics.inputs.get(&b.param) {
            Some(&used) if b.matches(used) => matched += 1,
            Some(&used) => wrong.push(AlignmentIssue::new(
                format!("{} = {} but {} specifies {}", b.param, used, b.source, b.setup_value),
                false,
            )),
            None => missing.push(AlignmentIssue::new(
                format!("{} from {} is not used by the simulation", b.param, b.source),
                false,
            )),
        }
    }
    let parameters = if bindings.is_empty() { 2.5 } else { 2.5 * matched as f64 / bindings.len() as f64 };

    let mut obs_checks = setup.expected_outcomes.len();
    let mut obs_met = 0usize;
    for outcome in &setup.expected_outcomes {
        if metrics.covers(outcome) {
            obs_met += 1;
        } else {
            missing.push(AlignmentIssue::new(format!("expected outcome {outcome} is not computed"), false));
        }
    }
    if claims_entanglement(setup) {
        obs_checks += 1;
        if metrics.scalars.keys().any(|name| ENTANGLEMENT_METRICS.iter().any(|m| name.contains(m) && !name.starts_with("distribution"))) {
            obs_met += 1;
        } else {
            missing.push(AlignmentIssue::new(
                "entanglement is claimed but no entanglement metric is computed; photon counts alone are insufficient".into(),
                true,
            ));
        }
    }
    let observables = if obs_checks == 0 { 2.5 } else { 2.5 * obs_met as f64 / obs_checks as f64 };

    let mut report = AlignmentReport {
        score: 0,
        formalism,
        components,
        parameters,
        observables,
        missing_from_code: missing,
        wrong_in_code: wrong,
    };
    report.score = round_half_up(report.criteria_sum());
    if report.has_blocking() {
        report.score = report.score.min(BLOCKED_SCORE_CAP);
    }
    report
}

/// What to run: a simulator, its parameters and a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub key: ExperimentKey,
    pub params: ExperimentParams,
    pub seed: u64,
}

pub trait Generator {
    fn plan(&self, setup: &OpticalSetup, seed: u64) -> Result<RunPlan, String>;
}

pub trait Reviewer {
    fn review(&self, setup: &OpticalSetup) -> ReviewVerdict;
}

pub trait Executor: Send + Sync {
    fn execute(&self, params: &ExperimentParams, seed: u64) -> SimResult<MetricSet>;
}

pub trait Refiner {
    /// Next plan after a run that scored too low, or `None` to stop.
    fn refine(&self, setup: &OpticalSetup, plan: &RunPlan, record: &RunRecord) -> Option<RunPlan>;
}

/// Picks the simulator named by the setup, else one for its domain, and
/// binds its parameters from the setup.
#[derive(Debug, Default, Clone, Copy)]
pub struct DefaultGenerator;

fn key_for(setup: &OpticalSetup) -> Option<ExperimentKey> {
    infer_key(setup).or(match classify_domain(setup) {
        PhysicsDomain::Atomic => Some(ExperimentKey::Eit),
        PhysicsDomain::Temporal => Some(ExperimentKey::Hom),
        _ => None,
    })
}

impl Generator for DefaultGenerator {
    fn plan(&self, setup: &OpticalSetup, seed: u64) -> Result<RunPlan, String> {
        let key = key_for(setup).ok_or_else(|| {
            format!("no simulator matches setup '{}' (domain {})", setup.title, classify_domain(setup))
        })?;
        Ok(RunPlan {
            key,
            params: bind_setup(key, setup).0,
            seed,
        })
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct LintReviewer;

impl Reviewer for LintReviewer {
    fn review(&self, setup: &OpticalSetup) -> ReviewVerdict {
        lint_design(setup)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SimulatorExecutor;

impl Executor for SimulatorExecutor {
    fn execute(&self, params: &ExperimentParams, seed: u64) -> SimResult<MetricSet> {
        experiments::run(params, seed)
    }
}

/// Edits only the simulator choice and its parameters: switches to the
/// setup's own simulator on a formalism mismatch, and rebinds parameters the
/// report flags as wrong or unused.
#[derive(Debug, Default, Clone, Copy)]
pub struct TargetedRefiner;

impl Refiner for TargetedRefiner {
    fn refine(&self, setup: &OpticalSetup, plan: &RunPlan, record: &RunRecord) -> Option<RunPlan> {
        let mut key = plan.key;
        if let Some(report) = &record.alignment {
            if report.formalism < 2.5 {
                key = key_for(setup).unwrap_or(key);
            }
        }
        let params = bind_setup(key, setup).0;
        let next = RunPlan {
            key,
            params,
            seed: plan.seed,
        };
        (next != *plan).then_some(next)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    RejectedPreRun,
    RunFailed,
    Scored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub iteration: usize,
    pub key: Option<ExperimentKey>,
    pub domain: PhysicsDomain,
    pub verdict: ReviewVerdict,
    pub status: RunStatus,
    pub alignment: Option<AlignmentReport>,
    pub scalars: BTreeMap<String, f64>,
    pub concerns: Vec<String>,
    #[serde(skip)]
    pub metrics: Option<MetricSet>,
    #[serde(skip)]
    pub params: Option<ExperimentParams>,
}

impl RunRecord {
    pub fn score(&self) -> u8 {
        self.alignment.as_ref().map_or(0, |a| a.score)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub max_iterations: usize,
    pub timeout: Duration,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_iterations: MAX_ITERATIONS,
            timeout: RUN_TIMEOUT,
            seed: 42,
        }
    }
}

pub struct Stages {
    pub generator: Box<dyn Generator>,
    pub reviewer: Box<dyn Reviewer>,
    pub executor: Arc<dyn Executor>,
    pub refiner: Box<dyn Refiner>,
}

impl Default for Stages {
    fn default() -> Self {
        Stages {
            generator: Box::new(DefaultGenerator),
            reviewer: Box::new(LintReviewer),
            executor: Arc::new(SimulatorExecutor),
            refiner: Box::new(TargetedRefiner),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub history: Vec<RunRecord>,
    /// Index into `history` of the kept record.
    pub best: usize,
    pub executions: usize,
}

impl PipelineOutcome {
    pub fn best(&self) -> &RunRecord {
        &self.history[self.best]
    }

    pub fn score(&self) -> u8 {
        self.best().score()
    }
}

/// Runs the executor on its own thread and gives up after `timeout`. A run
/// that overruns is abandoned; it owns its inputs, so nothing shared is left
/// half-written.
fn run_with_watchdog(executor: &Arc<dyn Executor>, params: &ExperimentParams, seed: u64, timeout: Duration) -> Result<MetricSet, String> {
    let (tx, rx) = mpsc::channel();
    let executor = Arc::clone(executor);
    let params = params.clone();
    std::thread::Builder::new()
        .name("simulation".into())
        .spawn(move || {
            let _ = tx.send(executor.execute(&params, seed));
        })
        .map_err(|e| format!("could not start simulation: {e}"))?;
    match rx.recv_timeout(timeout) {
        Ok(Ok(m)) => Ok(m),
        Ok(Err(e)) => Err(e.to_string()),
        Err(mpsc::RecvTimeoutError::Timeout) => Err(format!("simulation exceeded {} s", timeout.as_secs_f64())),
        Err(mpsc::RecvTimeoutError::Disconnected) => Err("simulation panicked".into()),
    }
}

pub fn run_pipeline(setup: &OpticalSetup, stages: &Stages, config: &PipelineConfig) -> PipelineOutcome {
    let domain = classify_domain(setup);
    let verdict = stages.reviewer.review(setup);
    let record = |iteration: usize, key: Option<ExperimentKey>, status: RunStatus, concerns: Vec<String>| RunRecord {
        iteration,
        key,
        domain,
        verdict: verdict.clone(),
        status,
        alignment: None,
        scalars: BTreeMap::new(),
        concerns,
        metrics: None,
        params: None,
    };

    let mut plan = match stages.generator.plan(setup, config.seed) {
        Ok(p) => p,
        Err(e) => {
            let mut concerns = verdict.concerns.clone();
            concerns.push(e);
            return PipelineOutcome {
                history: vec![record(1, None, RunStatus::RunFailed, concerns)],
                best: 0,
                executions: 0,
            };
        }
    };
    if !verdict.approved {
        return PipelineOutcome {
            history: vec![record(1, Some(plan.key), RunStatus::RejectedPreRun, verdict.concerns.clone())],
            best: 0,
            executions: 0,
        };
    }

    let mut history: Vec<RunRecord> = Vec::new();
    let mut executions = 0;
    for iteration in 1..=config.max_iterations.min(MAX_ITERATIONS) {
        executions += 1;
        let mut rec = record(iteration, Some(plan.key), RunStatus::RunFailed, Vec::new());
        rec.params = Some(plan.params.clone());
        match run_with_watchdog(&stages.executor, &plan.params, plan.seed, config.timeout) {
            Ok(metrics) => {
                let report = score_alignment(setup, plan.key, &metrics);
                rec.status = RunStatus::Scored;
                rec.concerns = report
                    .missing_from_code
                    .iter()
                    .chain(&report.wrong_in_code)
                    .map(|i| i.description.clone())
                    .collect();
                rec.scalars = metrics.scalars.clone();
                rec.alignment = Some(report);
                rec.metrics = Some(metrics);
            }
            Err(e) => {
                let mut concerns: Vec<String> = history.iter().flat_map(|r: &RunRecord| r.concerns.clone()).collect();
                concerns.push(e);
                rec.concerns = concerns;
            }
        }
        let done = rec.score() >= REFINE_BELOW;
        history.push(rec);
        if done || iteration == config.max_iterations.min(MAX_ITERATIONS) {
            break;
        }
        match stages.refiner.refine(setup, &plan, history.last().expect("just pushed")) {
            Some(next) => plan = next,
            None => break,
        }
    }
    // earliest record with the highest score
    let best = history
        .iter()
        .enumerate()
        .fold(0, |best, (i, r)| if r.score() > history[best].score() { i } else { best });
    PipelineOutcome {
        history,
        best,
        executions,
    }
}

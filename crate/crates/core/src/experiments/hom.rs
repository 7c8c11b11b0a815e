//! Two-photon interference on a balanced beam splitter versus relative delay.

use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_positive, check_range, label_has, Binder, MetricSet, NoiseParams, SimError, SimResult, LIGHT_SPEED};
use crate::optical_model::ComponentKind;
use crate::rng::labelled_rng;

/// FWHM of the dip per unit photon coherence time (437 fs / 729 fs).
pub const FWHM_PER_COHERENCE: f64 = 437.0 / 729.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HomParams {
    /// Single-photon coherence time λ²/(cΔλ).
    pub coherence_time_fs: f64,
    /// Two-photon visibility before imperfections.
    pub base_visibility: f64,
    pub noise: NoiseParams,
    pub pair_rate_hz: f64,
    pub integration_time_s: f64,
    pub coincidence_window_ps: f64,
    /// Scan half-width in units of the Gaussian width σ.
    pub scan_half_width_sigma: f64,
    pub scan_points: usize,
    /// Draw Poisson counts instead of reporting expectations.
    pub poisson: bool,
}

impl Default for HomParams {
    fn default() -> Self {
        HomParams {
            coherence_time_fs: 729.0,
            base_visibility: 1.0,
            noise: NoiseParams::default(),
            pair_rate_hz: 100_000.0,
            integration_time_s: 0.5,
            coincidence_window_ps: 1000.0,
            scan_half_width_sigma: 6.0,
            scan_points: 121,
            poisson: true,
        }
    }
}

impl HomParams {
    /// Noise-free expectation values.
    pub fn noiseless() -> Self {
        HomParams {
            noise: NoiseParams::IDEAL,
            poisson: false,
            ..Default::default()
        }
    }

    /// Gaussian width σ in exp(−τ²/σ²).
    pub fn sigma_fs(&self) -> f64 {
        self.coherence_time_fs * FWHM_PER_COHERENCE / (2.0 * f64::ln(2.0).sqrt())
    }

    pub fn effective_visibility(&self) -> f64 {
        self.base_visibility * self.noise.mode_matching.powi(2) * (1.0 - self.noise.distinguishability)
    }

    /// Mean number of detected pairs N over the integration time.
    pub fn detected_pairs(&self) -> f64 {
        self.pair_rate_hz * self.noise.detector_efficiency.powi(2) * self.integration_time_s
    }
}

/// Expected coincidences at delay τ, N·0.5·(1 − V_eff·exp(−τ²/σ²)), plus
/// accidentals involving dark counts.
pub fn expected_coincidences(p: &HomParams, tau_fs: f64) -> f64 {
    let sigma = p.sigma_fs();
    let n = p.detected_pairs();
    let singles = p.pair_rate_hz * p.noise.detector_efficiency;
    let dark = p.noise.dark_count_rate_hz;
    let accidentals = (2.0 * singles * dark + dark * dark) * p.coincidence_window_ps * 1e-12 * p.integration_time_s;
    n * 0.5 * (1.0 - p.effective_visibility() * (-(tau_fs / sigma).powi(2)).exp()) + accidentals
}

pub fn simulate(p: &HomParams, seed: u64) -> SimResult<MetricSet> {
    check_positive("coherence_time_fs", p.coherence_time_fs)?;
    check_range("base_visibility", p.base_visibility, 0.0, 1.0, "[0, 1]")?;
    check_range("pair_rate_hz", p.pair_rate_hz, 0.0, f64::MAX, "[0, inf)")?;
    check_range("integration_time_s", p.integration_time_s, 0.0, f64::MAX, "[0, inf)")?;
    check_positive("scan_half_width_sigma", p.scan_half_width_sigma)?;
    p.noise.validate()?;
    if p.scan_points == 0 {
        return Err(SimError::EmptyScan("delay"));
    }
    // an odd count puts a point exactly on τ = 0
    let points = p.scan_points | 1;
    let sigma = p.sigma_fs();
    let half = p.scan_half_width_sigma * sigma;
    let step = 2.0 * half / (points - 1).max(1) as f64;
    let mid = (points / 2) as f64;
    let taus: Vec<f64> = (0..points).map(|k| (k as f64 - mid) * step).collect();

    let counts: Vec<f64> = taus
        .par_iter()
        .enumerate()
        .map(|(k, &tau)| {
            let mean = expected_coincidences(p, tau);
            if p.poisson && mean > 0.0 {
                let mut rng = labelled_rng(seed, "hom", k as u64);
                Poisson::new(mean).expect("positive mean").sample(&mut rng)
            } else {
                mean
            }
        })
        .collect();

    // baseline: mean over the wings where the overlap is below e^−25
    let wings: Vec<f64> = taus
        .iter()
        .zip(&counts)
        .filter(|(t, _)| t.abs() >= 5.0 * sigma)
        .map(|(_, &c)| c)
        .collect();
    let baseline = if wings.is_empty() {
        counts.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        wings.iter().sum::<f64>() / wings.len() as f64
    };
    let (imin, &cmin) = counts
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty scan");
    let visibility = if baseline > 0.0 { 1.0 - cmin / baseline } else { 0.0 };
    let fwhm = measure_fwhm(&taus, &counts, imin, baseline, cmin);
    let half_n = 0.5 * p.detected_pairs();

    let mut m = MetricSet::default();
    m.set("visibility", visibility);
    m.set("fwhm_fs", fwhm);
    m.set("snr", if baseline > 0.0 { (baseline - cmin) / baseline.sqrt() } else { 0.0 });
    m.set("bunching_factor", if half_n > 0.0 { cmin / half_n } else { 0.0 });
    m.set("v_eff", p.effective_visibility());
    m.set("coherence_time_fs", p.coherence_time_fs);
    m.set("sigma_fs", sigma);
    m.set("baseline_counts", baseline);
    m.set("min_counts", cmin);
    m.series("coincidence_vs_delay", "delay_fs", taus, counts);
    m.input("coherence_time_fs", p.coherence_time_fs);
    m.input("base_visibility", p.base_visibility);
    m.input("pair_rate_hz", p.pair_rate_hz);
    m.input("integration_time_s", p.integration_time_s);
    m.input("coincidence_window_ps", p.coincidence_window_ps);
    p.noise.record(&mut m);
    m.note(format!(
        "overlap exp(-tau^2/sigma^2) with sigma = coherence_time * {FWHM_PER_COHERENCE:.6} / (2 sqrt(ln 2))"
    ));
    if p.poisson {
        m.note("counts are Poisson samples keyed by (seed, scan index)");
    }
    Ok(m)
}

/// Width at half depth between baseline and minimum, by linear interpolation
/// on each flank.
fn measure_fwhm(taus: &[f64], counts: &[f64], imin: usize, baseline: f64, cmin: f64) -> f64 {
    let level = 0.5 * (baseline + cmin);
    let cross = |range: Box<dyn Iterator<Item = usize>>| -> Option<f64> {
        let mut prev = imin;
        for k in range {
            if counts[k] >= level {
                let (c0, c1) = (counts[prev], counts[k]);
                let f = if c1 == c0 { 0.0 } else { (level - c0) / (c1 - c0) };
                return Some(taus[prev] + f * (taus[k] - taus[prev]));
            }
            prev = k;
        }
        None
    };
    let right = cross(Box::new(imin + 1..taus.len()));
    let left = cross(Box::new((0..imin).rev()));
    match (left, right) {
        (Some(l), Some(r)) => r - l,
        _ => 0.0,
    }
}

pub(super) fn bind(b: &mut Binder) -> HomParams {
    let mut p = HomParams::default();
    let filter = b.find("bandwidth_nm", |c| c.kind == ComponentKind::PassiveOptics).and_then(|(c, bw)| c.param("wavelength_nm").map(|wl| (c, wl, bw)));
    if let Some((c, wl, bw)) = filter {
        let tc = (wl * 1e-9).powi(2) / (LIGHT_SPEED * bw * 1e-9) * 1e15;
        p.coherence_time_fs = tc;
        b.push("coherence_time_fs", tc, &c.id);
    }
    b.bind("pair_rate_hz", "pair_rate", |c| c.kind == ComponentKind::Crystal, |v| v, &mut p.pair_rate_hz);
    b.detector_efficiency(&mut p.noise.detector_efficiency);
    b.dark_counts(&mut p.noise.dark_count_rate_hz);
    b.bind("mode_matching", "mode_matching", |_| true, |v| v, &mut p.noise.mode_matching);
    b.bind("distinguishability", "distinguishability", |_| true, |v| v, &mut p.noise.distinguishability);
    b.bind("coincidence_window_ps", "window_ps", |c| label_has(c, "coincidence"), |v| v, &mut p.coincidence_window_ps);
    p
}


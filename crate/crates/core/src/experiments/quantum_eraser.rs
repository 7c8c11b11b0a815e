//! Double-slit signal photon with which-path or erased idler detection.
//!
//! The pair state is (|A⟩_s|A⟩_i + |B⟩_s|B⟩_i)/√2. Each idler detector k sees
//! slit A with amplitude a_k and slit B with b_k, so the D0 pattern
//! conditioned on k is |a_k ψ_A(x) + b_k ψ_B(x)|². With the `qcore` splitter
//! convention (transmit 1/√2, reflect i/√2):
//!
//! | detector | a_k        | b_k        |
//! |----------|------------|------------|
//! | D1       | i/2        | 0          |
//! | D2       | 0          | i/2        |
//! | D3       | 1/(2√2)    | i/(2√2)    |
//! | D4       | i/(2√2)    | 1/(2√2)    |

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metric_set::linspace;
use super::{check_positive, check_range, Binder, MetricSet, SimError, SimResult};
use crate::optical_model::ComponentKind;
use crate::rng::trial_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EraserParams {
    pub wavelength_nm: f64,
    pub slit_spacing_mm: f64,
    pub slit_width_mm: f64,
    pub focal_length_mm: f64,
    pub screen_half_width_mm: f64,
    pub screen_bins: usize,
    /// Exact probabilities instead of sampled pairs.
    pub analytic: bool,
    pub pairs: u64,
    pub detector_efficiency: f64,
}

impl Default for EraserParams {
    fn default() -> Self {
        EraserParams {
            wavelength_nm: 810.0,
            slit_spacing_mm: 0.5,
            slit_width_mm: 0.05,
            focal_length_mm: 200.0,
            screen_half_width_mm: 3.0,
            screen_bins: 301,
            analytic: true,
            pairs: 100_000,
            detector_efficiency: 0.65,
        }
    }
}

pub const DETECTORS: [&str; 4] = ["d1", "d2", "d3", "d4"];

/// Slit amplitudes (a_k, b_k) for each idler detector.
pub fn channel_amplitudes() -> [(Complex64, Complex64); 4] {
    let t = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let r = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let zero = Complex64::new(0.0, 0.0);
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    // path A: BS_A reflects to D1, transmits to the eraser input 0
    // path B: BS_B reflects to D2, transmits to the eraser input 1
    // eraser: input 0 → D3 (t), D4 (r); input 1 → D3 (r), D4 (t)
    [
        (s * r, zero),
        (zero, s * r),
        (s * t * t, s * t * r),
        (s * t * r, s * t * t),
    ]
}

/// Two-path visibility 2|a b|/(|a|² + |b|²) and fringe phase arg(a b*).
pub fn channel_visibility(a: Complex64, b: Complex64) -> (f64, f64) {
    let norm = a.norm_sqr() + b.norm_sqr();
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    let cross = a * b.conj();
    (2.0 * cross.norm() / norm, cross.arg())
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Far-field slit amplitudes at screen position x (mm).
fn slit_amplitudes(p: &EraserParams, x: f64) -> (Complex64, Complex64) {
    let lf = p.wavelength_nm * 1e-6 * p.focal_length_mm;
    let env = sinc(std::f64::consts::PI * p.slit_width_mm * x / lf);
    let u = std::f64::consts::PI * p.slit_spacing_mm * x / lf;
    (Complex64::from_polar(env, u), Complex64::from_polar(env, -u))
}

/// Joint probability of (bin, detector), normalized over the screen.
fn joint_table(p: &EraserParams, xs: &[f64]) -> Vec<[f64; 4]> {
    let amps = channel_amplitudes();
    let raw: Vec<[f64; 4]> = xs
        .iter()
        .map(|&x| {
            let (pa, pb) = slit_amplitudes(p, x);
            let mut row = [0.0; 4];
            for (k, (a, b)) in amps.iter().enumerate() {
                row[k] = (a * pa + b * pb).norm_sqr();
            }
            row
        })
        .collect();
    let total: f64 = raw.iter().flat_map(|r| r.iter()).sum();
    raw.into_iter().map(|r| r.map(|v| v / total)).collect()
}

/// Least-squares fit of n(x) = E(x)(α + β cos 2u + γ sin 2u); returns
/// √(β² + γ²)/α.
fn fitted_visibility(p: &EraserParams, xs: &[f64], counts: &[f64]) -> f64 {
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    let lf = p.wavelength_nm * 1e-6 * p.focal_length_mm;
    for (&x, &n) in xs.iter().zip(counts) {
        let env = sinc(std::f64::consts::PI * p.slit_width_mm * x / lf).powi(2);
        let u = std::f64::consts::PI * p.slit_spacing_mm * x / lf;
        let row = [env, env * (2.0 * u).cos(), env * (2.0 * u).sin()];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * n;
        }
    }
    let m = nalgebra::Matrix3::from_fn(|i, j| ata[i][j]);
    let v = nalgebra::Vector3::from(atb);
    match m.lu().solve(&v) {
        Some(s) if s[0] > 0.0 => (s[1].hypot(s[2]) / s[0]).min(1.0),
        _ => 0.0,
    }
}

pub fn simulate(p: &EraserParams, seed: u64) -> SimResult<MetricSet> {
    for (name, v) in [
        ("wavelength_nm", p.wavelength_nm),
        ("slit_spacing_mm", p.slit_spacing_mm),
        ("slit_width_mm", p.slit_width_mm),
        ("focal_length_mm", p.focal_length_mm),
        ("screen_half_width_mm", p.screen_half_width_mm),
    ] {
        check_positive(name, v)?;
    }
    check_range("detector_efficiency", p.detector_efficiency, 0.0, 1.0, "[0, 1]")?;
    if p.screen_bins < 3 {
        return Err(SimError::EmptyScan("screen"));
    }
    if !p.analytic && p.pairs < 1000 {
        return Err(SimError::Precondition(format!("Monte Carlo needs at least 1000 pairs, got {}", p.pairs)));
    }
    let xs = linspace(-p.screen_half_width_mm, p.screen_half_width_mm, p.screen_bins);
    let table = joint_table(p, &xs);
    let amps = channel_amplitudes();

    let mut m = MetricSet::default();
    let patterns: Vec<Vec<f64>> = if p.analytic {
        (0..4).map(|k| table.iter().map(|r| r[k]).collect()).collect()
    } else {
        sample_patterns(p, &table, seed)
    };

    let mut phases = [0.0; 4];
    for k in 0..4 {
        let (v, phi) = channel_visibility(amps[k].0, amps[k].1);
        phases[k] = phi;
        let measured = if p.analytic { v } else { fitted_visibility(p, &xs, &patterns[k]) };
        m.set(format!("visibility_{}", DETECTORS[k]), measured);
    }
    let total: Vec<f64> = (0..xs.len()).map(|i| patterns.iter().map(|pat| pat[i]).sum()).collect();
    let total_visibility = if p.analytic {
        let cross: Complex64 = amps.iter().map(|(a, b)| a * b.conj()).sum();
        let norm: f64 = amps.iter().map(|(a, b)| a.norm_sqr() + b.norm_sqr()).sum();
        2.0 * cross.norm() / norm
    } else {
        fitted_visibility(p, &xs, &total)
    };
    m.set("visibility_total", total_visibility);
    m.set("fringe_phase_offset", (phases[3] - phases[2]).rem_euclid(2.0 * std::f64::consts::PI));
    // signal slit and idler path form the two qubits of (|AA⟩ + |BB⟩)/√2
    m.set("path_concurrence", qcore::concurrence(&qcore::Bell::PhiPlus.state().density())?);
    m.set("fringe_spacing_mm", p.wavelength_nm * 1e-6 * p.focal_length_mm / p.slit_spacing_mm);
    for k in 0..4 {
        m.series(format!("pattern_{}", DETECTORS[k]), "x_mm", xs.clone(), patterns[k].clone());
    }
    m.series("pattern_total", "x_mm", xs, total);
    m.input("wavelength_nm", p.wavelength_nm);
    m.input("slit_spacing_mm", p.slit_spacing_mm);
    m.input("slit_width_mm", p.slit_width_mm);
    m.input("focal_length_mm", p.focal_length_mm);
    m.input("detector_efficiency", p.detector_efficiency);
    if p.analytic {
        m.note("analytic mode: patterns are exact joint probabilities; visibilities from slit amplitudes");
    } else {
        m.note("Monte Carlo mode: visibilities from a least-squares fringe fit to sampled counts");
    }
    Ok(m)
}

/// Histograms of detected pairs per idler channel; each pair draws from its
/// own stream keyed by its index.
fn sample_patterns(p: &EraserParams, table: &[[f64; 4]], seed: u64) -> Vec<Vec<f64>> {
    let cdf: Vec<f64> = table
        .iter()
        .flat_map(|r| r.iter())
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    let bins = table.len();
    let eta2 = p.detector_efficiency * p.detector_efficiency;
    let counts = (0..p.pairs)
        .into_par_iter()
        .fold(
            || vec![0u64; bins * 4],
            |mut acc, trial| {
                let mut rng = trial_rng(seed, trial);
                let detected = rng.random::<f64>() < eta2;
                let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
                if detected {
                    let idx = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
                    acc[idx] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; bins * 4],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    (0..4).map(|k| (0..bins).map(|i| counts[i * 4 + k] as f64).collect()).collect()
}

pub(super) fn bind(b: &mut Binder) -> EraserParams {
    let mut p = EraserParams::default();
    b.bind("wavelength_nm", "wavelength_nm", |c| c.kind == ComponentKind::Crystal, |v| v, &mut p.wavelength_nm);
    b.bind("slit_spacing_mm", "slit_spacing_mm", |_| true, |v| v, &mut p.slit_spacing_mm);
    b.bind("slit_width_mm", "slit_width_mm", |_| true, |v| v, &mut p.slit_width_mm);
    b.bind("focal_length_mm", "focal_length_mm", |c| super::label_has(c, "imaging"), |v| v, &mut p.focal_length_mm);
    b.detector_efficiency(&mut p.detector_efficiency);
    p
}

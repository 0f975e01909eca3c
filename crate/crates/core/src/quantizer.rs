//! Fixed-point iteration `E -> E'` where `E'_k` solves
//! `Arg f_E(omega^{-2} E'_k) = pi (k - 1/2) + phi`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::product::{fit_tail, fit_tail_shift, EntireProduct, ZeroTail};
use crate::rotation::RotationParams;
use crate::special::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSpec {
    /// `scale * (k - 1/2)^exponent`.
    PowerLaw { scale: f64, exponent: f64 },
    Explicit(Vec<f64>),
}

/// How the zeros beyond the stored levels are modeled while iterating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailPolicy {
    None,
    /// Amplitude, exponent and shift all fitted to the trailing window.
    Fitted { window: usize },
    /// Exponent and amplitude fixed by the asymptotic law for `alpha`; only the
    /// index shift is fitted. This pins the overall scale, which the
    /// quantization condition alone leaves free.
    Anchored { window: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationProblem {
    pub rot: RotationParams,
    pub level_count: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub initial: InitialSpec,
    /// Under-relaxation factor in (0, 1]; 1 is the plain iteration.
    pub relaxation: f64,
    pub tail: TailPolicy,
}

/// Asymptotic growth exponent `2 - 2 alpha / pi` of a fixed point.
pub fn weyl_exponent(alpha: f64) -> f64 {
    2.0 - 2.0 * alpha / PI
}

/// Amplitude `A` of `E_k ~ A (k - 1/4)^p` for the half-line Dirichlet problem
/// of `-y'' + x^m y` with `m = 2 pi / alpha - 2` (Bohr-Sommerfeld).
pub fn weyl_amplitude(alpha: f64) -> f64 {
    let m = 2.0 * PI / alpha - 2.0;
    let ln_i = ln_gamma(1.0 + 1.0 / m) + ln_gamma(1.5) - ln_gamma(1.5 + 1.0 / m);
    ((PI.ln() - ln_i) * weyl_exponent(alpha)).exp()
}

impl QuantizationProblem {
    /// Defaults: power-law start at the Bohr-Sommerfeld scale, anchored tail
    /// on a 16-level window, plain iteration.
    pub fn new(rot: RotationParams, level_count: usize, tolerance: f64) -> Result<Self> {
        let problem = Self {
            rot,
            level_count,
            tolerance,
            max_iterations: 200,
            initial: InitialSpec::PowerLaw {
                scale: weyl_amplitude(rot.alpha()),
                exponent: weyl_exponent(rot.alpha()),
            },
            relaxation: 1.0,
            tail: if level_count >= 3 {
                TailPolicy::Anchored {
                    window: 16.min(level_count),
                }
            } else {
                TailPolicy::None
            },
        };
        problem.validate()?;
        Ok(problem)
    }

    /// `alpha = 2 pi / (m + 2)` with `phi = alpha / 2`.
    pub fn ode_mode(m: f64, level_count: usize, tolerance: f64) -> Result<Self> {
        Self::new(RotationParams::for_exponent(m)?, level_count, tolerance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.level_count == 0 {
            return Err(Error::Domain("level count must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::Domain("relaxation must lie in (0, 1]".into()));
        }
        match self.tail {
            TailPolicy::Fitted { window } | TailPolicy::Anchored { window }
                if window < 3 || window > self.level_count =>
            {
                Err(Error::Domain(format!(
                    "tail window {window} must be between 3 and the level count"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn rhs_offset(&self) -> f64 {
        self.rot.phase_offset()
    }

    fn tail_for(&self, levels: &[f64]) -> Result<Option<ZeroTail>> {
        match self.tail {
            TailPolicy::None => Ok(None),
            TailPolicy::Fitted { window } => fit_tail(levels, window).map(Some),
            TailPolicy::Anchored { window } => {
                let alpha = self.rot.alpha();
                fit_tail_shift(levels, window, weyl_amplitude(alpha), weyl_exponent(alpha)).map(Some)
            }
        }
    }

    /// The product whose zeros are `levels`, with the tail this problem prescribes.
    pub fn product_for(&self, levels: &[f64]) -> Result<EntireProduct> {
        let tail = self.tail_for(levels)?;
        EntireProduct::new(levels.to_vec(), tail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub iterations: usize,
    /// Max relative level change, one entry per sweep.
    pub residual_history: Vec<f64>,
    pub quantization_residual: f64,
    pub converged: bool,
    /// Whether the starting sequence grows with the fixed-point exponent, so
    /// that its phases are `pi k + O(1)`.
    pub initial_rhs_compatible: bool,
}

pub fn initial_sequence(problem: &QuantizationProblem) -> Result<Vec<f64>> {
    let n = problem.level_count;
    let levels: Vec<f64> = match &problem.initial {
        InitialSpec::PowerLaw { scale, exponent } => {
            if !(*scale > 0.0 && *exponent > 0.0) {
                return Err(Error::Domain("power-law scale and exponent must be positive".into()));
            }
            (1..=n).map(|k| scale * (k as f64 - 0.5).powf(*exponent)).collect()
        }
        InitialSpec::Explicit(list) => {
            if list.len() != n {
                return Err(Error::validation(
                    list.len().min(n) + 1,
                    format!("explicit list has {} entries, expected {n}", list.len()),
                ));
            }
            list.clone()
        }
    };
    EntireProduct::new(levels.clone(), None)?;
    Ok(levels)
}

fn rhs_compatible(problem: &QuantizationProblem, levels: &[f64]) -> bool {
    let target = weyl_exponent(problem.rot.alpha());
    match &problem.initial {
        InitialSpec::PowerLaw { exponent, .. } => (exponent - target).abs() < 1e-6,
        InitialSpec::Explicit(_) => {
            let window = levels.len().min(16);
            window >= 3
                && fit_tail(levels, window)
                    .map(|t| ((t.exponent - target) / target).abs() < 0.05)
                    .unwrap_or(false)
        }
    }
}

const BISECTION_REL: f64 = 1e-3;
const BRACKET_LIMIT: f64 = 1e300;

/// Solves `phase_on_ray(P, t) = pi (k - 1/2) + phi` for `t`, starting the
/// bracket search at `guess` (any positive number).
pub fn solve_level_from(
    product: &EntireProduct,
    rot: &RotationParams,
    phi: f64,
    k: usize,
    guess: f64,
) -> Result<f64> {
    let target = PI * (k as f64 - 0.5) + phi;
    if !(target > 0.0) {
        return Err(Error::Domain(format!("target phase {target} for level {k} is not positive")));
    }
    let g = |t: f64| product.phase_on_ray(rot, t) - target;

    let mut hi = if guess > 0.0 && guess.is_finite() { guess } else { 1.0 };
    let mut lo = 0.0;
    if g(hi) < 0.0 {
        lo = hi;
        loop {
            hi *= 2.0;
            if hi > BRACKET_LIMIT {
                return Err(Error::Range {
                    what: format!("bracket for level {k}: phase never reaches {target}"),
                    log_magnitude: hi.ln(),
                });
            }
            if g(hi) >= 0.0 {
                break;
            }
            lo = hi;
        }
    } else {
        let mut probe = hi;
        for _ in 0..2000 {
            probe *= 0.5;
            if g(probe) < 0.0 {
                lo = probe;
                break;
            }
            hi = probe;
        }
    }

    while hi - lo > BISECTION_REL * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton inside the bracket; fall back to bisection if a step leaves it.
    let mut t = 0.5 * (lo + hi);
    for _ in 0..100 {
        let r = g(t);
        if r == 0.0 {
            return Ok(t);
        }
        if r < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = product.phase_derivative(rot, t);
        let mut next = t - r / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - t).abs();
        t = next;
        if step <= 4.0 * f64::EPSILON * t || hi - lo <= 4.0 * f64::EPSILON * t {
            return Ok(t);
        }
    }
    Ok(t)
}

/// [`solve_level_from`] seeded with the stored zero `E_k` when it exists.
pub fn solve_level(product: &EntireProduct, rot: &RotationParams, phi: f64, k: usize) -> Result<f64> {
    let guess = product.zeros().get(k.wrapping_sub(1)).copied().unwrap_or(1.0);
    solve_level_from(product, rot, phi, k, guess)
}

/// One sweep of the map `E -> E'`, with the product and tail frozen at `E`.
pub fn voros_step(levels: &[f64], problem: &QuantizationProblem) -> Result<Vec<f64>> {
    if levels.len() != problem.level_count {
        return Err(Error::Domain(format!(
            "got {} levels, problem has {}",
            levels.len(),
            problem.level_count
        )));
    }
    let product = problem.product_for(levels)?;
    let rot = problem.rot;
    let phi = problem.rhs_offset();
    let w = problem.relaxation;
    let next: Vec<f64> = (1..=levels.len())
        .into_par_iter()
        .map(|k| {
            let e = solve_level_from(&product, &rot, phi, k, levels[k - 1])?;
            Ok((1.0 - w) * levels[k - 1] + w * e)
        })
        .collect::<Result<_>>()?;
    for i in 1..next.len() {
        if next[i] <= next[i - 1] {
            return Err(Error::validation(i + 1, "sweep produced a non-increasing sequence"));
        }
    }
    Ok(next)
}

/// `max_k |Arg f(omega^{-2} E_k) - pi (k - 1/2) - phi|` over the stored zeros.
pub fn quantization_residual(product: &EntireProduct, rot: &RotationParams, phi: f64) -> f64 {
    product
        .zeros()
        .iter()
        .enumerate()
        .map(|(i, &e)| (product.phase_on_ray(rot, e) - PI * (i as f64 + 0.5) - phi).abs())
        .fold(0.0, f64::max)
}

fn max_relative_change(old: &[f64], new: &[f64]) -> f64 {
    old.iter()
        .zip(new)
        .map(|(a, b)| ((b - a) / a).abs())
        .fold(0.0, f64::max)
}

/// Iterates [`voros_step`] until the max relative change drops to the
/// tolerance. Non-convergence is reported, not raised.
pub fn run_scheme(problem: &QuantizationProblem) -> Result<(EntireProduct, ConvergenceReport)> {
    problem.validate()?;
    let mut levels = initial_sequence(problem)?;
    let initial_rhs_compatible = rhs_compatible(problem, &levels);
    let mut history = Vec::new();
    let mut converged = false;
    while history.len() < problem.max_iterations {
        let next = voros_step(&levels, problem)?;
        let change = max_relative_change(&levels, &next);
        history.push(change);
        levels = next;
        if change <= problem.tolerance {
            converged = true;
            break;
        }
    }
    let product = problem.product_for(&levels)?;
    let report = ConvergenceReport {
        iterations: history.len(),
        residual_history: history,
        quantization_residual: quantization_residual(&product, &problem.rot, problem.rhs_offset()),
        converged,
        initial_rhs_compatible,
    };
    Ok((product, report))
}

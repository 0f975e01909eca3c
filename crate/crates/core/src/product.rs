//! Genus-zero real entire functions with positive zeros,
//! `f(x) = prod_j (1 - x / E_j)`, truncated to a stored list of zeros plus an
//! optional power-law model of the remaining ones.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::RotationParams;
use crate::special::hurwitz_zeta;

/// Explicit tail terms are summed until the modeled zero exceeds this
/// multiple of `|x|`; the remainder is a convergent Hurwitz-zeta series.
const TAIL_SERIES_MARGIN: f64 = 4.0;
const MAX_EXPLICIT_TAIL_TERMS: usize = 20_000_000;

/// Power-law model `E_j = A (j + shift)^p` for the zeros with index
/// `j >= start_index` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroTail {
    pub amplitude: f64,
    pub exponent: f64,
    pub index_shift: f64,
    pub start_index: usize,
}

impl ZeroTail {
    pub fn new(amplitude: f64, exponent: f64, index_shift: f64, start_index: usize) -> Result<Self> {
        let tail = Self {
            amplitude,
            exponent,
            index_shift,
            start_index,
        };
        tail.validate()?;
        Ok(tail)
    }

    fn validate(&self) -> Result<()> {
        let idx = self.start_index;
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::validation(idx, "tail amplitude must be positive"));
        }
        if !(self.exponent > 1.0 && self.exponent.is_finite()) {
            return Err(Error::validation(idx, "tail exponent must exceed 1"));
        }
        if self.start_index == 0 || !self.index_shift.is_finite() {
            return Err(Error::validation(idx, "tail start index must be >= 1"));
        }
        if self.start_index as f64 + self.index_shift <= 0.0 {
            return Err(Error::validation(idx, "tail zeros must be positive"));
        }
        Ok(())
    }

    /// Modeled zero with 1-based index `j`.
    pub fn zero(&self, j: usize) -> f64 {
        self.amplitude * (j as f64 + self.index_shift).powf(self.exponent)
    }

    /// First index `J >= start` whose modeled zero is at least `margin |w|`.
    fn series_start(&self, w: Complex64) -> usize {
        let needed = TAIL_SERIES_MARGIN * w.norm();
        if self.zero(self.start_index) >= needed {
            return self.start_index;
        }
        let j = (needed / self.amplitude).powf(1.0 / self.exponent) - self.index_shift;
        (j.ceil().max(self.start_index as f64) as usize).max(self.start_index)
    }

    /// `sum_{j >= start} ln(1 - w / E_j)` with principal logarithms.
    fn log_sum(&self, w: Complex64) -> Result<Complex64> {
        let big_j = self.series_start(w);
        if big_j - self.start_index > MAX_EXPLICIT_TAIL_TERMS {
            return Err(Error::Range {
                what: "tail of the infinite product".into(),
                log_magnitude: w.norm().ln(),
            });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for j in self.start_index..big_j {
            sum += (Complex64::new(1.0, 0.0) - w / self.zero(j)).ln();
        }
        let ratio = w / self.amplitude;
        let a = big_j as f64 + self.index_shift;
        let mut power = Complex64::new(1.0, 0.0);
        let mut first = 0.0;
        for n in 1..400 {
            power *= ratio;
            let term = power * hurwitz_zeta(self.exponent * n as f64, a) / n as f64;
            sum -= term;
            let size = term.norm();
            if n == 1 {
                first = size;
            }
            if size <= 1e-18 * first || size == 0.0 {
                break;
            }
        }
        Ok(sum)
    }

    /// Derivative of [`Self::log_sum`] with respect to `w`.
    fn dlog_sum(&self, w: Complex64) -> Result<Complex64> {
        let big_j = self.series_start(w);
        if big_j - self.start_index > MAX_EXPLICIT_TAIL_TERMS {
            return Err(Error::Range {
                what: "tail of the infinite product".into(),
                log_magnitude: w.norm().ln(),
            });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for j in self.start_index..big_j {
            sum -= 1.0 / (self.zero(j) - w);
        }
        let a = big_j as f64 + self.index_shift;
        let inv_amp = 1.0 / self.amplitude;
        let mut power = Complex64::new(inv_amp, 0.0);
        let mut first = 0.0;
        for n in 1..400 {
            let term = power * hurwitz_zeta(self.exponent * n as f64, a);
            sum -= term;
            let size = term.norm();
            if n == 1 {
                first = size;
            }
            if size <= 1e-18 * first || size == 0.0 {
                break;
            }
            power *= w * inv_amp;
        }
        Ok(sum)
    }
}

/// `f(x) = prod_j (1 - x / E_j)` with `0 < E_1 < E_2 < ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntireProduct {
    zeros: Vec<f64>,
    tail: Option<ZeroTail>,
}

impl EntireProduct {
    pub fn new(zeros: Vec<f64>, tail: Option<ZeroTail>) -> Result<Self> {
        for (i, &e) in zeros.iter().enumerate() {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::validation(i + 1, format!("zero {e} is not positive")));
            }
            if i > 0 && e <= zeros[i - 1] {
                return Err(Error::validation(
                    i + 1,
                    format!("zero {e} does not exceed its predecessor {}", zeros[i - 1]),
                ));
            }
        }
        if let Some(tail) = &tail {
            tail.validate()?;
            if tail.start_index != zeros.len() + 1 {
                return Err(Error::validation(
                    tail.start_index,
                    format!("tail must start right after the {} stored zeros", zeros.len()),
                ));
            }
            if let Some(&last) = zeros.last() {
                if tail.zero(tail.start_index) <= last {
                    return Err(Error::validation(
                        tail.start_index,
                        format!(
                            "first modeled zero {} does not exceed the last stored zero {last}",
                            tail.zero(tail.start_index)
                        ),
                    ));
                }
            }
        }
        Ok(Self { zeros, tail })
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn tail(&self) -> Option<&ZeroTail> {
        self.tail.as_ref()
    }

    /// Principal-branch sum of logarithms of all factors.
    pub fn ln_eval(&self, x: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let mut sum: Complex64 = self.zeros.iter().map(|&e| (one - x / e).ln()).sum();
        if let Some(tail) = &self.tail {
            sum += tail.log_sum(x)?;
        }
        Ok(sum)
    }

    pub fn eval(&self, x: Complex64) -> Result<Complex64> {
        if x.im == 0.0 && self.zeros.contains(&x.re) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let ln = self.ln_eval(x)?;
        if ln.re > 709.0 {
            return Err(Error::Range {
                what: format!("product at {x}"),
                log_magnitude: ln.re,
            });
        }
        let mut value = ln.exp();
        if x.im == 0.0 {
            value.im = 0.0;
        }
        Ok(value)
    }

    /// Product with the stored factor `skip` (0-based) removed.
    fn eval_without(&self, skip: usize, x: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let mut sum: Complex64 = self
            .zeros
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, &e)| (one - x / e).ln())
            .sum();
        if let Some(tail) = &self.tail {
            sum += tail.log_sum(x)?;
        }
        Ok(sum.exp())
    }

    /// `f'(x)`; exact at (and near) stored zeros.
    pub fn derivative(&self, x: Complex64) -> Result<Complex64> {
        let nearest = self
            .zeros
            .iter()
            .enumerate()
            .map(|(i, &e)| (i, (Complex64::new(1.0, 0.0) - x / e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((i, gap)) = nearest {
            if gap < 1e-6 {
                // f = (1 - x/E_i) g  =>  f' = -g/E_i + (1 - x/E_i) g'
                let e = self.zeros[i];
                let g = self.eval_without(i, x)?;
                let mut dlog_g: Complex64 = self
                    .zeros
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &ej)| 1.0 / (x - ej))
                    .sum();
                if let Some(tail) = &self.tail {
                    dlog_g += tail.dlog_sum(x)?;
                }
                let factor = Complex64::new(1.0, 0.0) - x / e;
                return Ok(-g / e + factor * g * dlog_g);
            }
        }
        let f = self.eval(x)?;
        let mut dlog: Complex64 = self.zeros.iter().map(|&e| 1.0 / (x - e)).sum();
        if let Some(tail) = &self.tail {
            dlog += tail.dlog_sum(x)?;
        }
        Ok(f * dlog)
    }

    /// Continuous argument of `f(omega^{-2} t)` for `t >= 0`, zero at `t = 0`.
    ///
    /// Each factor contributes `atan2((t/E) sin 2a, 1 - (t/E) cos 2a)`, which lies in `(0, pi)`
    /// for `t > 0`, so no winding bookkeeping is needed.
    pub fn phase_on_ray(&self, rot: &RotationParams, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let (s2, c2) = (2.0 * rot.alpha()).sin_cos();
        let stored: f64 = self
            .zeros
            .iter()
            .map(|&e| {
                let r = t / e;
                (r * s2).atan2(1.0 - r * c2)
            })
            .sum();
        stored + self.tail_phase(rot, t)
    }

    /// Contribution of the modeled tail to [`Self::phase_on_ray`].
    pub fn tail_phase(&self, rot: &RotationParams, t: f64) -> f64 {
        match &self.tail {
            Some(tail) if t > 0.0 => {
                let w = rot.omega_pow(-2.0) * t;
                tail.log_sum(w).map(|l| l.im).unwrap_or(f64::INFINITY)
            }
            _ => 0.0,
        }
    }

    /// `d/dt` of [`Self::phase_on_ray`]; strictly positive.
    pub fn phase_derivative(&self, rot: &RotationParams, t: f64) -> f64 {
        let (s2, c2) = (2.0 * rot.alpha()).sin_cos();
        let stored: f64 = self
            .zeros
            .iter()
            .map(|&e| s2 * e / (e * e - 2.0 * e * t * c2 + t * t))
            .sum();
        let tail = match &self.tail {
            Some(tail) => {
                let w = rot.omega_pow(-2.0);
                tail.dlog_sum(w * t).map(|d| (w * d).im).unwrap_or(0.0)
            }
            None => 0.0,
        };
        stored + tail
    }

    /// `|f(r e^{i theta})|`.
    pub fn modulus_profile(&self, r: f64, theta: f64) -> f64 {
        match self.ln_eval(Complex64::from_polar(r, theta)) {
            Ok(ln) => ln.re.exp(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Largest relative deviation `|ln(E_j / model_j)|` over the last `window` stored zeros.
    pub fn tail_misfit(&self, window: usize) -> f64 {
        let Some(tail) = &self.tail else {
            return 0.0;
        };
        let n = self.zeros.len();
        let from = n.saturating_sub(window);
        (from..n)
            .map(|i| (self.zeros[i] / tail.zero(i + 1)).ln().abs())
            .fold(0.0, f64::max)
    }

    /// Estimate of the phase error caused by the tail model.
    ///
    /// The same window is refitted after dropping the last `window / 2` stored
    /// zeros, extended over the same tail indices, and the difference of the two
    /// tail phases (times 4) is taken as the extrapolation uncertainty. The window
    /// misfit adds the local model error. Falls back to the whole tail phase when
    /// too few zeros are stored for the second fit.
    pub fn tail_phase_bound(&self, rot: &RotationParams, t: f64, window: usize) -> f64 {
        let Some(tail) = &self.tail else {
            return 0.0;
        };
        let phase = self.tail_phase(rot, t);
        let local = 2.0 * self.tail_misfit(window) * phase.abs();
        let drop = (window / 2).max(1);
        let n = self.zeros.len();
        if n < window + drop {
            return phase.abs() + 1e-12;
        }
        let spread = fit_tail(&self.zeros[..n - drop], window)
            .ok()
            .map(|alt| ZeroTail {
                start_index: tail.start_index,
                ..alt
            })
            .and_then(|alt| {
                let w = rot.omega_pow(-2.0) * t;
                alt.log_sum(w).ok().map(|l| (l.im - phase).abs())
            });
        match spread {
            Some(d) => 4.0 * d + local + 1e-12,
            None => phase.abs() + 1e-12,
        }
    }
}

fn check_fit_input(zeros: &[f64], window: usize) -> Result<()> {
    if window < 3 || window > zeros.len() {
        return Err(Error::Fit(format!(
            "window {window} must be between 3 and the number of zeros ({})",
            zeros.len()
        )));
    }
    let from = zeros.len() - window;
    for i in from..zeros.len() {
        if !(zeros[i] > 0.0) {
            return Err(Error::Fit(format!("zero {} at index {} is not positive", zeros[i], i + 1)));
        }
        if i > from && zeros[i] <= zeros[i - 1] {
            return Err(Error::Fit(format!("zeros are not increasing at index {}", i + 1)));
        }
    }
    Ok(())
}

struct LineFit {
    intercept: f64,
    slope: f64,
    ssr: f64,
    gradient: f64,
}

/// Least squares of `ln E_j` against `ln(j + shift)` for fixed shift; `gradient`
/// is proportional to `d ssr / d shift` (envelope theorem).
fn line_fit(indices: &[f64], logs: &[f64], shift: f64) -> LineFit {
    let n = indices.len() as f64;
    let x: Vec<f64> = indices.iter().map(|&j| (j + shift).ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = logs.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(logs).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ssr = 0.0;
    let mut gradient = 0.0;
    for ((xi, yi), j) in x.iter().zip(logs).zip(indices) {
        let r = yi - intercept - slope * xi;
        ssr += r * r;
        gradient += r / (j + shift);
    }
    LineFit {
        intercept,
        slope,
        ssr,
        gradient,
    }
}

/// Fits `E_j ~ A (j + shift)^p` to the trailing `window` zeros; the tail starts
/// right after the list.
pub fn fit_tail(zeros: &[f64], window: usize) -> Result<ZeroTail> {
    check_fit_input(zeros, window)?;
    let n = zeros.len();
    let indices: Vec<f64> = (n - window + 1..=n).map(|j| j as f64).collect();
    let logs: Vec<f64> = zeros[n - window..].iter().map(|e| e.ln()).collect();

    let lo = (-indices[0] + 1e-3).max(-20.0);
    let hi = 20.0;
    let grid = 800;
    let shift_at = |i: usize| lo + (hi - lo) * i as f64 / grid as f64;

    let mut best = (lo, line_fit(&indices, &logs, lo));
    let consider = |shift: f64, best: &mut (f64, LineFit)| {
        let fit = line_fit(&indices, &logs, shift);
        if fit.ssr < best.1.ssr {
            *best = (shift, fit);
        }
    };
    consider(hi, &mut best);
    let mut prev = (lo, line_fit(&indices, &logs, lo).gradient);
    for i in 1..=grid {
        let s = shift_at(i);
        let g = line_fit(&indices, &logs, s).gradient;
        if g == 0.0 {
            consider(s, &mut best);
        } else if prev.1 != 0.0 && g.signum() != prev.1.signum() {
            let (mut a, mut b) = (prev.0, s);
            let ga = prev.1;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let gm = line_fit(&indices, &logs, mid).gradient;
                if gm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if gm.signum() == ga.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            consider(0.5 * (a + b), &mut best);
        }
        prev = (s, g);
    }

    let (shift, fit) = best;
    if !(fit.slope > 1.0) {
        return Err(Error::Fit(format!(
            "fitted exponent {} does not exceed 1 (product would not have genus zero)",
            fit.slope
        )));
    }
    let tail = ZeroTail::new(fit.intercept.exp(), fit.slope, shift, n + 1)?;
    check_reproduces_last(zeros, &tail)?;
    Ok(tail)
}

/// Fits only the index shift of a tail whose amplitude and exponent are fixed.
pub fn fit_tail_shift(zeros: &[f64], window: usize, amplitude: f64, exponent: f64) -> Result<ZeroTail> {
    check_fit_input(zeros, window)?;
    let n = zeros.len();
    let first = n - window + 1;
    // u_j = ln(E_j/A)/p should equal ln(j + shift)
    let targets: Vec<(f64, f64)> = (first..=n)
        .map(|j| (j as f64, (zeros[j - 1] / amplitude).ln() / exponent))
        .collect();
    let gradient = |shift: f64| -> f64 {
        targets
            .iter()
            .map(|&(j, u)| (u - (j + shift).ln()) / (j + shift))
            .sum()
    };
    let guess = targets.iter().map(|&(j, u)| u.exp() - j).sum::<f64>() / targets.len() as f64;
    let floor = -(first as f64) + 1e-9;
    let mut lo = (guess - 1.0).max(floor);
    let mut hi = guess + 1.0;
    let mut expand = 0;
    while gradient(lo) < 0.0 && lo > floor {
        lo = (lo - 2.0 * (hi - lo)).max(floor);
        expand += 1;
        if expand > 60 {
            break;
        }
    }
    while gradient(hi) > 0.0 {
        hi += 2.0 * (hi - lo);
        expand += 1;
        if expand > 120 {
            return Err(Error::Fit("could not bracket the tail shift".into()));
        }
    }
    let shift = crate::special::brent::<_, Error>(|s| Ok(gradient(s)), lo, hi, 1e-15)?;
    let tail = ZeroTail::new(amplitude, exponent, shift, n + 1)?;
    check_reproduces_last(zeros, &tail)?;
    Ok(tail)
}

fn check_reproduces_last(zeros: &[f64], tail: &ZeroTail) -> Result<()> {
    let n = zeros.len();
    let last = zeros[n - 1];
    let model = tail.zero(n);
    if ((model - last) / last).abs() > 0.01 {
        return Err(Error::Fit(format!(
            "tail reproduces the last zero {last} as {model} (more than 1% off)"
        )));
    }
    if tail.zero(n + 1) <= last {
        return Err(Error::Fit("modeled zeros do not exceed the last stored zero".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_validates_ordering_and_sign() {
        assert!(EntireProduct::new(vec![1.0, 2.0, 3.0], None).is_ok());
        match EntireProduct::new(vec![2.0, 1.0], None) {
            Err(Error::Validation { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected validation error, got {other:?}"),
        }
        match EntireProduct::new(vec![1.0, -3.0], None) {
            Err(Error::Validation { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected validation error, got {other:?}"),
        }
        let tail = ZeroTail::new(1.0, 2.0, 0.0, 2).unwrap();
        assert!(EntireProduct::new(vec![1.0], Some(tail)).is_ok());
        // 4 is not above 5
        assert!(EntireProduct::new(vec![5.0], Some(tail)).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let p = EntireProduct::new(vec![1.0], None).unwrap();
        assert_eq!(p.eval(c(-1.0, 0.0)).unwrap(), c(2.0, 0.0));
        let empty = EntireProduct::new(vec![], None).unwrap();
        assert_eq!(empty.eval(c(5.0, 2.0)).unwrap(), c(1.0, 0.0));
        let p = EntireProduct::new(vec![1.0, 2.0], None).unwrap();
        let v = p.eval(c(3.0, 0.0)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p.eval(c(2.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_ne!(p.eval(c(2.0 + 1e-12, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn overflow_is_reported() {
        let zeros: Vec<f64> = (1..=2000).map(|j| j as f64 * 1e-3).collect();
        let p = EntireProduct::new(zeros, None).unwrap();
        assert!(matches!(p.eval(c(-1e3, 0.0)), Err(Error::Range { .. })));
    }

    #[test]
    fn tail_matches_explicit_product() {
        // zeros j^2 for j = 1..; store 5, model the rest, compare to a long explicit product
        let stored: Vec<f64> = (1..=5).map(|j| (j * j) as f64).collect();
        let tail = ZeroTail::new(1.0, 2.0, 0.0, 6).unwrap();
        let p = EntireProduct::new(stored, Some(tail)).unwrap();
        // prod (1 - x/j^2) = sin(pi sqrt x)/(pi sqrt x)
        for &x in &[c(-3.0, 0.0), c(2.5, 1.0), c(10.0, -7.0), c(30.0, 0.5), c(0.3, 0.0)] {
            let s = x.sqrt() * PI;
            let exact = s.sin() / s;
            let got = p.eval(x).unwrap();
            assert!((got - exact).norm() < 1e-12 * exact.norm().max(1.0), "{x}: {got} vs {exact}");
        }
        let exact_d = |x: Complex64| {
            let s = x.sqrt() * PI;
            // d/dx [sin s / s] with s = pi sqrt x
            (s.cos() * s - s.sin()) / (s * s) * (PI * PI / (2.0 * s))
        };
        for &x in &[c(2.5, 1.0), c(-4.0, 0.0), c(16.0, 0.0)] {
            let got = p.derivative(x).unwrap();
            let want = exact_d(x);
            assert!((got - want).norm() < 1e-11 * want.norm(), "{x}: {got} vs {want}");
        }
    }

    #[test]
    fn phase_examples() {
        let p = EntireProduct::new(vec![1.0], None).unwrap();
        let rot = RotationParams::pure(PI / 3.0).unwrap();
        assert_eq!(p.phase_on_ray(&rot, 0.0), 0.0);
        assert!((p.phase_on_ray(&rot, 1.0) - PI / 6.0).abs() < 1e-15);
        let rot6 = RotationParams::pure(PI / 6.0).unwrap();
        let far = p.phase_on_ray(&rot6, 1e12);
        assert!((far - 2.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn phase_derivative_examples() {
        let rot = RotationParams::pure(0.4).unwrap();
        let one = EntireProduct::new(vec![1.0], None).unwrap();
        assert!((one.phase_derivative(&rot, 1e-12) - (0.8f64).sin()).abs() < 1e-10);
        let two = EntireProduct::new(vec![2.0], None).unwrap();
        let both = EntireProduct::new(vec![1.0, 2.0], None).unwrap();
        for &t in &[0.3, 1.7, 9.0] {
            let sum = one.phase_derivative(&rot, t) + two.phase_derivative(&rot, t);
            assert!((both.phase_derivative(&rot, t) - sum).abs() < 1e-15);
        }
    }

    #[test]
    fn phase_derivative_matches_finite_differences() {
        let zeros: Vec<f64> = (1..=20).map(|j| 1.3 * (j as f64 - 0.25).powf(4.0 / 3.0)).collect();
        let tail = fit_tail(&zeros, 6).unwrap();
        let p = EntireProduct::new(zeros, Some(tail)).unwrap();
        let rot = RotationParams::new(PI / 3.0, PI / 6.0).unwrap();
        for &t in &[0.05, 1.0, 7.5, 40.0, 150.0] {
            let h = 1e-5 * t;
            let fd = (p.phase_on_ray(&rot, t + h) - p.phase_on_ray(&rot, t - h)) / (2.0 * h);
            let d = p.phase_derivative(&rot, t);
            assert!(((fd - d) / d).abs() < 1e-6, "t={t}: {fd} vs {d}");
        }
    }

    #[test]
    fn phase_is_continuous_argument_of_value() {
        let zeros = vec![0.7, 2.0, 3.1, 6.0, 11.0];
        let p = EntireProduct::new(zeros, None).unwrap();
        let rot = RotationParams::pure(0.9).unwrap();
        let w = rot.omega_pow(-2.0);
        let mut accumulated = 0.0;
        let mut prev = Complex64::new(1.0, 0.0);
        let steps = 20_000;
        for i in 1..=steps {
            let t = 30.0 * i as f64 / steps as f64;
            let v = p.eval(w * t).unwrap();
            accumulated += (v / prev).arg();
            prev = v;
            if i % 1000 == 0 {
                assert!((accumulated - p.phase_on_ray(&rot, t)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn modulus_profile_examples() {
        let p = EntireProduct::new(vec![1.0], None).unwrap();
        assert!((p.modulus_profile(1.0, PI) - 2.0).abs() < 1e-15);
        assert_eq!(p.modulus_profile(1.0, 0.0), 0.0);

        let p = EntireProduct::new(vec![1.0, 2.0, 5.0], None).unwrap();
        let mut prev = p.modulus_profile(3.0, 0.0);
        for i in 1..1000 {
            let theta = PI * i as f64 / 1000.0;
            let v = p.modulus_profile(3.0, theta);
            // sampled directly from |prod (1 - r e^{i theta}/E)|
            let direct: f64 = [1.0, 2.0, 5.0]
                .iter()
                .map(|e| (Complex64::new(1.0, 0.0) - Complex64::from_polar(3.0, theta) / e).norm())
                .product();
            assert!((v - direct).abs() < 1e-12 * direct);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn exact_power_laws_are_recovered() {
        let squares: Vec<f64> = (1..=12).map(|j| (j * j) as f64).collect();
        let t = fit_tail(&squares, 5).unwrap();
        assert!((t.exponent - 2.0).abs() < 1e-9);
        assert!((t.amplitude - 1.0).abs() < 1e-9);
        assert!(t.index_shift.abs() < 1e-9);
        assert_eq!(t.start_index, 13);

        let weyl: Vec<f64> = (1..=10).map(|j| 3.0 * (j as f64).powf(4.0 / 3.0)).collect();
        let t = fit_tail(&weyl, 6).unwrap();
        assert!((t.exponent - 4.0 / 3.0).abs() < 1e-6);
        assert!((t.amplitude - 3.0).abs() < 1e-6);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_tail(&[1.0, 2.0, 3.0], 2).is_err());
        assert!(fit_tail(&[1.0, 2.0, 3.0], 4).is_err());
        assert!(matches!(fit_tail(&[1.0, 3.0, 2.0, 5.0], 4), Err(Error::Fit(_))));
        // linear growth: exponent 1 is not genus zero
        let lin: Vec<f64> = (1..=8).map(|j| j as f64).collect();
        assert!(matches!(fit_tail(&lin, 5), Err(Error::Fit(_))));
    }

    #[test]
    fn anchored_shift_fit() {
        let zeros: Vec<f64> = (1..=30).map(|j| 2.0 * (j as f64 - 0.25).powf(1.5)).collect();
        let t = fit_tail_shift(&zeros, 8, 2.0, 1.5).unwrap();
        assert!((t.index_shift + 0.25).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_covers_doubling() {
        let law = |j: usize| {
            let x = j as f64 - 0.25;
            1.7 * x.powf(4.0 / 3.0) * (1.0 + 0.05 / (x * x))
        };
        let rot = RotationParams::new(PI / 3.0, PI / 6.0).unwrap();
        let build = |n: usize| {
            let zeros: Vec<f64> = (1..=n).map(law).collect();
            let tail = fit_tail(&zeros, 8).unwrap();
            EntireProduct::new(zeros, Some(tail)).unwrap()
        };
        let small = build(32);
        let large = build(64);
        for &t in &[1.0, 10.0, 50.0] {
            let diff = (small.phase_on_ray(&rot, t) - large.phase_on_ray(&rot, t)).abs();
            let bound = small.tail_phase_bound(&rot, t, 8);
            assert!(diff < bound, "t={t}: change {diff} exceeds bound {bound}");
        }
    }
}

//! Shooting oracle for `-y'' + (z^m + λ) y = 0` and its rotated relatives.
//!
//! Everything reduces to origin data of the solution `y_0` that decays along
//! the positive real axis. The rotated solutions
//! `y_k(z, λ) = ω^{k/2} y_0(ω^{-k} z, ω^{2k} λ)` only need `y_0` at a rotated
//! `λ`, integrated along the real axis, so no path ever approaches the
//! branch cut of `z^m`.
//!
//! Public evaluators take `λ` in the convention of the equation above.
//! The internal spectral variable is `s = -λ`; see [`convention_map`].

pub mod integrate;
pub mod wkb;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{complex_roots, winding_count, Rect};
use crate::special::{brent, ln_gamma};
use crate::specfun::{EigenvalueSet, Method};
use integrate::{integrate_segment, IntegratorOptions, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub rtol: f64,
    pub wkb_order: usize,
    /// Seed radius is the larger of the value where
    /// `2/(m+2) R^{(m+2)/2}` reaches this and `(lambda_ratio |λ|)^{1/m}`.
    pub decay_exponent: f64,
    pub lambda_ratio: f64,
    /// Multiplies the seed radius (2.0 for the refinement check).
    pub radius_factor: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-13,
            wkb_order: wkb::ORDER,
            decay_exponent: 60.0,
            lambda_ratio: 4.0,
            radius_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeProblem {
    m: f64,
    ell: u8,
    opts: OracleOptions,
    /// `y_0` at `λ = 0`; normalizes `f` and the spectral Wronskians.
    at_zero: SolutionRecord,
}

/// Origin data of `y_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub k: f64,
    pub value: Complex64,
    pub derivative: Complex64,
    pub seed_radius: f64,
    /// Relative size of the first neglected seed correction plus the
    /// integrator tolerance.
    pub error_estimate: f64,
}

impl SolutionRecord {
    fn state(&self) -> State {
        [self.value, self.derivative]
    }
}

pub fn wronskian(a: &SolutionRecord, b: &SolutionRecord) -> Complex64 {
    a.value * b.derivative - a.derivative * b.value
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum D0Route {
    /// `C_0(ω^{-1}λ) C_0(ωλ) - 1`.
    Composite,
    /// `W(y_{-3/2}, y_{3/2}) / W(y_{1/2}, y_{3/2})`.
    Wronskian,
    /// From the determinant at the rotated points `ω^{±1}λ`, `ω^{±3}λ`.
    /// Free of the cancellation that ruins both other routes where `D_0` is
    /// exponentially small (large positive λ). Needs `m > 2`.
    Determinant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    LambdaToInternal,
    InternalToLambda,
}

/// `s = -λ` both ways.
pub fn convention_map(value: Complex64, _direction: Direction) -> Complex64 {
    -value
}

impl OdeProblem {
    pub fn new(m: f64, ell: u8) -> Result<Self> {
        Self::with_options(m, ell, OracleOptions::default())
    }

    pub fn with_options(m: f64, ell: u8, opts: OracleOptions) -> Result<Self> {
        if !m.is_finite() || m < 2.0 {
            return Err(Error::Domain(format!("exponent m = {m} must be at least 2")));
        }
        if ell != 1 && ell != 2 {
            return Err(Error::Domain(format!("ell = {ell} must be 1 or 2")));
        }
        if !(opts.rtol > 0.0 && opts.rtol < 1e-3) || opts.wkb_order < 2 || !(opts.lambda_ratio >= 2.0) || !(opts.radius_factor >= 1.0) {
            return Err(Error::Domain("bad oracle options".into()));
        }
        let mut prob = Self {
            m,
            ell,
            opts,
            at_zero: SolutionRecord {
                k: 0.0,
                value: Complex64::new(1.0, 0.0),
                derivative: Complex64::new(0.0, 0.0),
                seed_radius: 0.0,
                error_estimate: 0.0,
            },
        };
        prob.at_zero = prob.origin_data(Complex64::new(0.0, 0.0))?;
        Ok(prob)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn ell(&self) -> u8 {
        self.ell
    }

    pub fn options(&self) -> OracleOptions {
        self.opts
    }

    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI / (self.m + 2.0))
    }

    /// Directions `π/2 ± (ℓ+1)π/(m+2)` of the decay rays in the `w` picture.
    pub fn boundary_rays(&self) -> [f64; 2] {
        let d = (self.ell as f64 + 1.0) * PI / (self.m + 2.0);
        [PI / 2.0 - d, PI / 2.0 + d]
    }

    /// `ω^{k/2}` with `ω^{1/2} = e^{iπ/(m+2)}`.
    fn omega_half_pow(&self, k: f64) -> Complex64 {
        Complex64::from_polar(1.0, PI * k / (self.m + 2.0))
    }

    pub fn seed_radius(&self, lambda: Complex64) -> f64 {
        let m = self.m;
        let r0 = (self.opts.decay_exponent * (m + 2.0) / 2.0).powf(2.0 / (m + 2.0));
        let r1 = (self.opts.lambda_ratio * lambda.norm()).powf(1.0 / m);
        r0.max(r1) * self.opts.radius_factor
    }

    /// `y_0` and `y_0'` at the origin, unnormalized.
    pub fn origin_data(&self, lambda: Complex64) -> Result<SolutionRecord> {
        let m = self.m;
        let radius = self.seed_radius(lambda);
        let seed = wkb::seed(m, -lambda, radius, self.opts.wkb_order);
        let q = |z: Complex64| Complex64::new(z.re.max(0.0).powf(m), 0.0) + lambda;
        let iopts = IntegratorOptions {
            rtol: self.opts.rtol,
            ..IntegratorOptions::default()
        };
        let out = integrate_segment(
            &q,
            Complex64::new(radius, 0.0),
            Complex64::new(0.0, 0.0),
            [Complex64::new(1.0, 0.0), seed.log_derivative],
            seed.log_value,
            &iopts,
        )?;
        let [value, derivative] = out.value();
        if !(value.is_finite() && derivative.is_finite()) {
            return Err(Error::Range {
                what: format!("y_0(0) at λ = {lambda}"),
                log_magnitude: (out.log_scale + out.state[0].ln()).re,
            });
        }
        Ok(SolutionRecord {
            k: 0.0,
            value,
            derivative,
            seed_radius: radius,
            error_estimate: seed.truncation + 100.0 * self.opts.rtol,
        })
    }

    /// Origin data of `y_k` for integer or half-odd-integer `k`.
    pub fn subdominant_solution(&self, lambda: Complex64, k: f64) -> Result<SolutionRecord> {
        if (2.0 * k).fract() != 0.0 || k.abs() > 3.0 {
            return Err(Error::Domain(format!("ray index {k} must be a multiple of 1/2 with |k| ≤ 3")));
        }
        // y_k is defined by decay along arg z = 2πk/(m+2) in this picture
        if 2.0 * PI * k.abs() / (self.m + 2.0) >= PI {
            return Err(Error::Domain(format!("ray of y_{k} meets the branch cut")));
        }
        let base = self.origin_data(self.omega_half_pow(4.0 * k) * lambda)?;
        Ok(self.rotate(&base, k))
    }

    fn rotate(&self, base: &SolutionRecord, k: f64) -> SolutionRecord {
        let pre = self.omega_half_pow(k);
        SolutionRecord {
            k,
            value: pre * base.value,
            derivative: pre * self.omega_half_pow(-2.0 * k) * base.derivative,
            ..*base
        }
    }

    /// `f(λ) = y_0(0, λ) / y_0(0, 0)`.
    pub fn determinant_f(&self, lambda: Complex64) -> Result<Complex64> {
        Ok(self.origin_data(lambda)?.value / self.at_zero.value)
    }

    fn solutions(&self, lambda: Complex64, ks: &[f64]) -> Result<Vec<SolutionRecord>> {
        ks.par_iter().map(|&k| self.subdominant_solution(lambda, k)).collect()
    }

    fn ratio(num: Complex64, den: Complex64, scale: f64) -> Result<Complex64> {
        if den.norm() <= 1e-12 * scale {
            return Err(Error::Conditioning(format!("Wronskian denominator {den} is nearly zero")));
        }
        Ok(num / den)
    }

    pub fn stokes_c0(&self, lambda: Complex64) -> Result<Complex64> {
        let y = self.solutions(lambda, &[0.0, 1.0, -1.0])?;
        let scale = y[0].value.norm().max(y[0].derivative.norm()) * y[2].value.norm().max(y[2].derivative.norm());
        Self::ratio(wronskian(&y[1], &y[2]), wronskian(&y[0], &y[2]), scale)
    }

    pub fn stokes_d0(&self, lambda: Complex64, route: D0Route) -> Result<Complex64> {
        match route {
            D0Route::Composite => {
                let w = self.omega();
                Ok(self.stokes_c0(lambda / w)? * self.stokes_c0(lambda * w)? - 1.0)
            }
            D0Route::Determinant => {
                self.require_power_normalization()?;
                let f = |j: i32| self.origin_data(lambda * self.omega().powi(j)).map(|r| r.value);
                let k2 = self.omega();
                let (fm3, fm1, f1, f3) = (f(-3)?, f(-1)?, f(1)?, f(3)?);
                Ok((fm3 * fm1 / k2 + f3 * f1 * k2 + fm3 * f3) / (fm1 * f1))
            }
            D0Route::Wronskian => {
                let y = self.solutions(lambda, &[-1.5, 1.5, 0.5])?;
                let scale =
                    y[1].value.norm().max(y[1].derivative.norm()) * y[2].value.norm().max(y[2].derivative.norm());
                Self::ratio(wronskian(&y[0], &y[1]), wronskian(&y[2], &y[1]), scale)
            }
        }
    }

    /// `C_0` from the determinant, `(ω^{-1/2} f(ω^{-2}λ) + ω^{1/2} f(ω^2λ)) / f(λ)`.
    /// Needs `m > 2`.
    pub fn c0_from_determinant(&self, lambda: Complex64) -> Result<Complex64> {
        self.require_power_normalization()?;
        let f = |j: i32| self.origin_data(lambda * self.omega().powi(j)).map(|r| r.value);
        let k = self.omega_half_pow(1.0);
        Ok((f(-2)? / k + f(2)? * k) / f(0)?)
    }

    /// The determinant identities assume `y_0 ~ z^{-m/4} exp(..)` with no
    /// λ-dependent factor, which fails at `m = 2`.
    fn require_power_normalization(&self) -> Result<()> {
        if self.m == 2.0 {
            return Err(Error::Domain("determinant route needs m > 2".into()));
        }
        Ok(())
    }

    /// The function whose zeros are the PT eigenvalues for this `ℓ`.
    /// For `m > 2` this is `C_0` or `D_0` through the determinant.
    ///
    /// At `m = 2` it is
    /// `W(y_1, y_{-1})` or `W(y_{-3/2}, y_{3/2})` divided by the matching
    /// denominator Wronskian taken at `λ = 0`. The logarithmic normalization
    /// gives the denominators a λ-dependent phase there, and freezing it keeps
    /// the function real on the real axis.
    pub fn spectral_function(&self, lambda: Complex64) -> Result<Complex64> {
        if self.m != 2.0 {
            return match self.ell {
                1 => self.c0_from_determinant(lambda),
                _ => self.stokes_d0(lambda, D0Route::Determinant),
            };
        }
        let (ks, den) = match self.ell {
            1 => ([1.0, -1.0], [0.0, -1.0]),
            _ => ([-1.5, 1.5], [0.5, 1.5]),
        };
        let y = self.solutions(lambda, &ks)?;
        let d0 = wronskian(&self.rotate(&self.at_zero, den[0]), &self.rotate(&self.at_zero, den[1]));
        Ok(wronskian(&y[0], &y[1]) / d0)
    }

    /// Typical spacing of half-line levels near internal value `s`.
    fn halfline_spacing(&self, s: f64) -> f64 {
        let m = self.m;
        let im = (ln_gamma(1.0 + 1.0 / m) + ln_gamma(1.5) - ln_gamma(1.5 + 1.0 / m)).exp();
        PI / (im * (0.5 + 1.0 / m)) * s.max(1.0).powf(0.5 - 1.0 / m)
    }

    /// First `count` zeros of `f` on the positive internal axis.
    pub fn halfline_dirichlet_spectrum(&self, count: usize) -> Result<EigenvalueSet> {
        if count == 0 {
            return Err(Error::Domain("count must be at least 1".into()));
        }
        let g = |s: f64| self.determinant_f(Complex64::new(-s, 0.0)).map(|v| v.re);
        let (zeros, partial) = self.scan(&g, count, 1e6)?;
        let mut set = EigenvalueSet::new(zeros.into_iter().map(|s| Complex64::new(s, 0.0)).collect(), Method::Oracle);
        set.partial = partial;
        Ok(set)
    }

    /// First `count` real zeros in `(0, upper]` of `C_0` (ℓ = 1) or `D_0`
    /// (ℓ = 2), reported in the equation's λ convention. A thin rectangle
    /// around the located zeros is audited by the argument principle.
    pub fn pt_eigenvalues(&self, upper: f64, count: usize) -> Result<EigenvalueSet> {
        if count == 0 || !(upper > 0.0) {
            return Err(Error::Domain("need count ≥ 1 and a positive upper bound".into()));
        }
        let g = |x: f64| self.spectral_function(Complex64::new(x, 0.0)).map(|v| v.re);
        let (zeros, partial) = self.scan(&g, count, upper)?;
        let mut set = EigenvalueSet::new(zeros.into_iter().map(|x| Complex64::new(x, 0.0)).collect(), Method::Oracle);
        set.partial = partial;
        if let Some(top) = set.values.last() {
            let hi = top.re + 0.37 * self.halfline_spacing(top.re);
            let rect = Rect::new(0.0, hi, -0.25 * self.halfline_spacing(hi), 0.25 * self.halfline_spacing(hi))?;
            let f = |z: Complex64| self.spectral_function(z);
            set.audit_count = Some(winding_count(&f, &rect)?);
            set.window = Some(rect);
        }
        Ok(set)
    }

    /// All zeros of the ℓ-spectral function in `rect` (λ convention), real or not.
    pub fn pt_complex_eigenvalues(&self, rect: &Rect, depth: usize) -> Result<EigenvalueSet> {
        let f = |z: Complex64| self.spectral_function(z);
        let found = complex_roots(&f, rect, depth)?;
        let mut set = EigenvalueSet::new(found.roots, Method::Oracle);
        set.window = Some(*rect);
        set.audit_count = Some(found.count);
        set.partial = !found.unresolved.is_empty();
        set.unresolved = found.unresolved;
        Ok(set)
    }

    /// Sign-change scan on `(0, limit]` until `count` zeros are found.
    /// Returns the zeros and whether it stopped short.
    fn scan<G>(&self, g: &G, count: usize, limit: f64) -> Result<(Vec<f64>, bool)>
    where
        G: Fn(f64) -> Result<f64> + Sync,
    {
        let mut zeros = Vec::new();
        let mut x0 = 0.0;
        let mut g0 = g(0.0)?;
        while zeros.len() < count {
            if x0 >= limit {
                return Ok((zeros, true));
            }
            // a batch of grid points, evaluated in parallel
            let mut xs = Vec::with_capacity(32);
            let mut x = x0;
            for _ in 0..32 {
                x = (x + 0.1 * self.halfline_spacing(x)).min(limit);
                xs.push(x);
                if x == limit {
                    break;
                }
            }
            let vals: Vec<f64> = xs.par_iter().map(|&x| g(x)).collect::<Result<_>>()?;
            for (&x1, &g1) in xs.iter().zip(&vals) {
                if g0 != 0.0 && g1 != 0.0 && g0.signum() != g1.signum() {
                    zeros.push(brent(&g, x0, x1, 1e-14)?);
                    if zeros.len() == count {
                        break;
                    }
                } else if g1 == 0.0 {
                    zeros.push(x1);
                }
                x0 = x1;
                g0 = g1;
            }
        }
        zeros.truncate(count);
        Ok((zeros, false))
    }

    /// Carries origin data of a solution at `λ` out to `z` along a straight
    /// path. Used to check Wronskian constancy away from the origin.
    pub fn propagate(&self, lambda: Complex64, record: &SolutionRecord, z: Complex64) -> Result<State> {
        if z.re <= 0.0 && z.im == 0.0 {
            return Err(Error::Domain("target lies on the branch cut".into()));
        }
        let m = self.m;
        let q = |w: Complex64| {
            let p = if w.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { w.powf(m) };
            p + lambda
        };
        let iopts = IntegratorOptions {
            rtol: self.opts.rtol,
            ..IntegratorOptions::default()
        };
        let out = integrate_segment(&q, Complex64::new(0.0, 0.0), z, record.state(), Complex64::new(0.0, 0.0), &iopts)?;
        Ok(out.value())
    }
}

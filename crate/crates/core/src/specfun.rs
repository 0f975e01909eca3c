//! Stokes functions built from a product `f`:
//! `C(x) = (k f(omega^2 x) + k^{-1} f(omega^{-2} x)) / f(x)` and
//! `D(x) = C(omega^{-1} x) C(omega x) - 1`, their zeros, and the checks that
//! go with them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::product::EntireProduct;
use crate::roots::{complex_roots, real_roots, winding_count, Rect, UnresolvedBox};
use crate::rotation::RotationParams;

/// Relative distance to a stored zero below which the ratio formulas are refused.
pub const POLE_GUARD: f64 = 1e-12;
/// A zero counts as real when `|Im| <= REALITY_TOL * max(1, |Re|)`.
pub const REALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StokesKind {
    C,
    D,
}

/// Route used to evaluate `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DRoute {
    /// Product of two rotated `C` values.
    Composite,
    /// Directly from six values of `f`.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `f(w^-3 x) = D(x) f(w x) - C(w^-1 x) f(w^3 x)`, the `k = 1` relation.
    UnitPhase,
    /// `k^{-3/2} f(w^-3 x) + C(w^-1 x) k^{3/2} f(w^3 x) = D(x) k^{1/2} f(w x)`.
    PhaseWeighted,
}

fn near_zero_of(base: &EntireProduct, z: Complex64) -> Option<f64> {
    base.zeros()
        .iter()
        .copied()
        .find(|&e| (Complex64::new(1.0, 0.0) - z / e).norm() < POLE_GUARD)
}

fn guard(base: &EntireProduct, z: Complex64, route: &str) -> Result<()> {
    match near_zero_of(base, z) {
        Some(_) => Err(Error::PoleGuard {
            route: route.into(),
            point: z.to_string(),
        }),
        None => Ok(()),
    }
}

fn realify(x: Complex64, v: Complex64) -> Complex64 {
    if x.im == 0.0 {
        Complex64::new(v.re, 0.0)
    } else {
        v
    }
}

/// `C(x)`. With `limit` set, points at a stored zero of `f` use the ratio of
/// derivatives instead of failing.
pub fn stokes_c(base: &EntireProduct, rot: &RotationParams, x: Complex64, limit: bool) -> Result<Complex64> {
    let k = rot.phase_factor();
    let (w2, wm2) = (rot.omega_pow(2.0), rot.omega_pow(-2.0));
    if near_zero_of(base, x).is_some() {
        if !limit {
            return Err(Error::PoleGuard {
                route: "C".into(),
                point: x.to_string(),
            });
        }
        let num = k * w2 * base.derivative(w2 * x)? + wm2 / k * base.derivative(wm2 * x)?;
        return Ok(realify(x, num / base.derivative(x)?));
    }
    let num = k * base.eval(w2 * x)? + base.eval(wm2 * x)? / k;
    Ok(realify(x, num / base.eval(x)?))
}

pub fn stokes_d(base: &EntireProduct, rot: &RotationParams, x: Complex64, route: DRoute) -> Result<Complex64> {
    let (w, wm) = (rot.omega(), rot.omega_pow(-1.0));
    match route {
        DRoute::Composite => {
            guard(base, wm * x, "composite")?;
            guard(base, w * x, "composite")?;
            let value = stokes_c(base, rot, wm * x, false)? * stokes_c(base, rot, w * x, false)? - 1.0;
            Ok(realify(x, value))
        }
        DRoute::Direct => {
            guard(base, wm * x, "direct")?;
            guard(base, w * x, "direct")?;
            let k2 = rot.phase_factor_pow(2.0);
            let f = |n: f64| base.eval(rot.omega_pow(n) * x);
            let (fm3, fm1, f1, f3) = (f(-3.0)?, f(-1.0)?, f(1.0)?, f(3.0)?);
            let value = (fm3 * fm1 / k2 + k2 * f3 * f1 + fm3 * f3) / (fm1 * f1);
            Ok(realify(x, value))
        }
    }
}

/// `|LHS - RHS| / (1 + max |term|)` for the selected identity.
///
/// `D` comes from the direct route. Where `D` is exponentially small the
/// composite `C C - 1` only has absolute accuracy, and the identity multiplies
/// it by an exponentially large `f(w x)`.
pub fn identity_residual(base: &EntireProduct, rot: &RotationParams, x: Complex64, which: Identity) -> Result<f64> {
    let f = |n: f64| base.eval(rot.omega_pow(n) * x);
    let c = stokes_c(base, rot, rot.omega_pow(-1.0) * x, true)?;
    let d = stokes_d(base, rot, x, DRoute::Direct)?;
    let (fm3, f1, f3) = (f(-3.0)?, f(1.0)?, f(3.0)?);
    let terms: [Complex64; 3] = match which {
        Identity::UnitPhase => [fm3, -(d * f1), c * f3],
        Identity::PhaseWeighted => [
            rot.phase_factor_pow(-1.5) * fm3,
            c * rot.phase_factor_pow(1.5) * f3,
            -(d * rot.phase_factor_pow(0.5) * f1),
        ],
    };
    let sum: Complex64 = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    Ok(sum.norm() / (1.0 + scale))
}

/// `C` or `D` of a fixed product, as a single evaluator.
#[derive(Debug, Clone, Copy)]
pub struct SpectralFunction<'a> {
    pub base: &'a EntireProduct,
    pub rot: RotationParams,
    pub kind: StokesKind,
    pub route: DRoute,
}

impl<'a> SpectralFunction<'a> {
    pub fn c(base: &'a EntireProduct, rot: RotationParams) -> Self {
        Self {
            base,
            rot,
            kind: StokesKind::C,
            route: DRoute::Composite,
        }
    }

    pub fn d(base: &'a EntireProduct, rot: RotationParams, route: DRoute) -> Self {
        Self {
            base,
            rot,
            kind: StokesKind::D,
            route,
        }
    }

    pub fn eval(&self, x: Complex64) -> Result<Complex64> {
        match self.kind {
            StokesKind::C => stokes_c(self.base, &self.rot, x, false),
            StokesKind::D => stokes_d(self.base, &self.rot, x, self.route),
        }
    }

    /// A rectangle `[-width, b] x [-height, height]` that holds no pole of the
    /// ratio formulas for this function.
    pub fn pole_free_rect(&self, width: f64, height: f64) -> Result<Rect> {
        let e1 = self.base.zeros().first().copied().unwrap_or(1.0);
        let right = match self.kind {
            StokesKind::C => 0.5 * e1,
            StokesKind::D => 0.5 * e1 * self.rot.alpha().cos(),
        };
        Rect::new(-width, right, -height, height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Scheme,
    Specfun,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueSet {
    /// Sorted by real part.
    pub values: Vec<Complex64>,
    pub method: Method,
    pub real: Vec<bool>,
    /// Zeros where the derivative also (nearly) vanishes.
    pub suspect_multiple: Vec<bool>,
    /// Multiplicity per value, where the search established it.
    #[serde(default)]
    pub multiplicity: Vec<usize>,
    pub reality_tol: f64,
    pub window: Option<Rect>,
    /// Zeros counted by the argument principle in the search region, when audited.
    pub audit_count: Option<i64>,
    pub unresolved: Vec<UnresolvedBox>,
    /// True when a search stopped before reaching its target count.
    pub partial: bool,
}

pub fn is_real(z: Complex64, tol: f64) -> bool {
    z.im.abs() <= tol * z.re.abs().max(1.0)
}

impl EigenvalueSet {
    pub fn new(mut values: Vec<Complex64>, method: Method) -> Self {
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let real = values.iter().map(|&z| is_real(z, REALITY_TOL)).collect();
        let n = values.len();
        Self {
            values,
            method,
            real,
            suspect_multiple: vec![false; n],
            multiplicity: vec![1; n],
            reality_tol: REALITY_TOL,
            window: None,
            audit_count: None,
            unresolved: Vec::new(),
            partial: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of zeros counted with multiplicity.
    pub fn counted_len(&self) -> usize {
        if self.multiplicity.len() == self.values.len() {
            self.multiplicity.iter().sum()
        } else {
            self.values.len()
        }
    }

    pub fn all_real(&self) -> bool {
        self.real.iter().all(|&r| r)
    }

    pub fn reals(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

/// Real zeros of `C` or `D` on `[a, b]`. Sign changes caused by poles of the
/// ratio formulas are discarded.
pub fn real_zeros(func: &SpectralFunction, a: f64, b: f64, grid: usize) -> Result<EigenvalueSet> {
    for probe in [a + 0.37 * (b - a), a + 0.81 * (b - a)] {
        let z = Complex64::new(probe, 0.731 * (b - a).abs().max(1.0) * 1e-3);
        let (v, vc) = (func.eval(z)?, func.eval(z.conj())?);
        if (v - vc.conj()).norm() > 1e-8 * v.norm().max(1e-300) {
            return Err(Error::Domain("function is not real on the real axis".into()));
        }
    }
    let eval = |x: f64| func.eval(Complex64::new(x, 0.0)).map(|v| v.re);
    // C carries removable-in-theory poles at the stored zeros; scan between them
    let mut cuts = vec![a];
    if func.kind == StokesKind::C {
        cuts.extend(func.base.zeros().iter().copied().filter(|&e| e > a && e < b));
    }
    cuts.push(b);
    let mut candidates = Vec::new();
    for pair in cuts.windows(2) {
        let pad = 1e-9 * pair[0].abs().max(pair[1].abs()).max(1.0);
        let lo = if pair[0] == a { a } else { pair[0] + pad };
        let hi = if pair[1] == b { b } else { pair[1] - pad };
        if lo >= hi {
            continue;
        }
        let cells = ((grid as f64 * (hi - lo) / (b - a)).ceil() as usize).max(4);
        candidates.extend(real_roots(eval, lo, hi, cells, 1e-13)?);
    }
    let h = (b - a) / grid as f64;
    let mut roots = Vec::new();
    let mut multiple = Vec::new();
    for x in candidates {
        let left = eval(x - 0.5 * h)?.abs();
        let right = eval(x + 0.5 * h)?.abs();
        let at = eval(x)?.abs();
        // at a pole the refined point is larger than its neighbours
        if at > 1e-6 * left.max(right) {
            continue;
        }
        let dx = 1e-6 * x.abs().max(1e-3);
        let slope = (eval(x + dx)? - eval(x - dx)?).abs() / (2.0 * dx);
        multiple.push(slope * h < 1e-8 * left.max(right));
        roots.push(Complex64::new(x, 0.0));
    }
    let mut set = EigenvalueSet::new(roots, Method::Specfun);
    set.suspect_multiple = multiple;
    set.window = Rect::new(a, b, 0.0, 1e-300).ok();
    Ok(set)
}

/// Thin-rectangle argument-principle count around `[a, b]`; compare with the
/// number of real zeros to rule out near-axis complex pairs.
pub fn reality_audit(func: &SpectralFunction, a: f64, b: f64, half_height: f64) -> Result<i64> {
    let f = |z: Complex64| func.eval(z);
    winding_count(&f, &Rect::new(a, b, -half_height, half_height)?)
}

pub fn complex_zeros(func: &SpectralFunction, rect: &Rect, depth: usize) -> Result<EigenvalueSet> {
    let f = |z: Complex64| func.eval(z);
    let found = complex_roots(&f, rect, depth)?;
    // roots arrive sorted the same way EigenvalueSet sorts them
    let mut set = EigenvalueSet::new(found.roots, Method::Specfun);
    set.suspect_multiple = found.multiplicity.iter().map(|&k| k > 1).collect();
    set.multiplicity = found.multiplicity;
    set.window = Some(*rect);
    set.audit_count = Some(found.count);
    set.partial = !found.unresolved.is_empty();
    set.unresolved = found.unresolved;
    Ok(set)
}

/// Nearest of the rays `arg z = j alpha`, `j in {-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayClassification {
    pub point: Complex64,
    pub ray: i32,
    pub deviation: f64,
}

impl RayClassification {
    pub fn classify(point: Complex64, alpha: f64) -> Self {
        let arg = point.arg();
        let (ray, deviation) = [-1, 0, 1]
            .into_iter()
            .map(|j| (j, (arg - j as f64 * alpha).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        Self { point, ray, deviation }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClauseStatus {
    Pass,
    Fail { witness: Option<Complex64> },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub status: ClauseStatus,
    /// Worst observed value of the checked quantity.
    pub margin: f64,
    pub threshold: f64,
    pub checked: usize,
}

impl Clause {
    pub fn judged(name: &str, margin: f64, threshold: f64, checked: usize, witness: Option<Complex64>, ok: bool) -> Self {
        Self {
            name: name.into(),
            status: if ok {
                ClauseStatus::Pass
            } else {
                ClauseStatus::Fail { witness }
            },
            margin,
            threshold,
            checked,
        }
    }

    pub fn skipped(name: &str, reason: &str) -> Self {
        Self {
            name: name.into(),
            status: ClauseStatus::Skipped { reason: reason.into() },
            margin: 0.0,
            threshold: 0.0,
            checked: 0,
        }
    }

    pub fn passed(&self) -> bool {
        !matches!(self.status, ClauseStatus::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub clauses: Vec<Clause>,
    pub c_zeros: EigenvalueSet,
    pub d_zeros: Option<EigenvalueSet>,
}

impl PropositionReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(Clause::passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    /// Zeros are searched for with `|Re| <= radius`.
    pub radius: f64,
    pub depth: usize,
}

impl SearchWindow {
    /// About `E_{N/2}`, where the truncation error is under control. The edge
    /// sits a quarter gap past `E_{N/2}` because `D` vanishes at `-E_j` itself
    /// in ODE mode, and a contour through a zero has no winding number.
    pub fn for_product(base: &EntireProduct) -> Self {
        let zeros = base.zeros();
        let radius = match zeros.len() {
            0 => 10.0,
            1 => 1.5 * zeros[0],
            n => {
                let j = (n / 2).max(1) - 1;
                zeros[j] + 0.25 * (zeros[j + 1] - zeros[j])
            }
        };
        Self { radius, depth: 24 }
    }
}

fn worst<I: Iterator<Item = (Complex64, f64)>>(items: I) -> (f64, Option<Complex64>) {
    items.fold((0.0, None), |acc, (z, v)| if v > acc.0 || acc.1.is_none() { (v.max(acc.0), Some(z)) } else { acc })
}

/// Numerical check of the reality and interlacing clauses on one product.
pub fn verify_proposition(base: &EntireProduct, rot: &RotationParams, window: &SearchWindow) -> Result<PropositionReport> {
    let mut clauses = Vec::new();
    let w = window.radius;
    let cfun = SpectralFunction::c(base, *rot);
    let c_rect = cfun.pole_free_rect(w, 0.25 * w + 1.0)?;
    let c_zeros = complex_zeros(&cfun, &c_rect, window.depth)?;

    let (m1, wit1) = worst(c_zeros.values.iter().map(|&z| (z, z.im.abs() / z.re.abs().max(1.0))));
    let negative = c_zeros.values.iter().all(|z| z.re < 0.0);
    let resolved = c_zeros.unresolved.is_empty() && c_zeros.audit_count == Some(c_zeros.counted_len() as i64);
    clauses.push(Clause::judged(
        "c_zeros_real_negative",
        m1,
        REALITY_TOL,
        c_zeros.len(),
        wit1,
        m1 <= REALITY_TOL && negative && resolved,
    ));

    let (w2, wm2) = (rot.omega_pow(2.0), rot.omega_pow(-2.0));
    let mut mod_gap = Vec::new();
    for &z in &c_zeros.values {
        let (a, b) = (base.eval(w2 * z)?.norm(), base.eval(wm2 * z)?.norm());
        mod_gap.push((z, (a - b).abs() / a.max(b)));
    }
    let (m2, wit2) = worst(mod_gap.into_iter());
    clauses.push(Clause::judged("rotated_moduli_equal_at_c_zeros", m2, 1e-7, c_zeros.len(), wit2, m2 <= 1e-7));

    let mut d_zeros = None;
    if rot.alpha() > PI / 3.0 + 1e-12 {
        clauses.push(Clause::skipped("d_zeros_unimodular_c", "alpha outside (0,π/3]"));
    } else {
        // the composite route cancels to zero where D is tiny (left half-plane)
        let dfun = SpectralFunction::d(base, *rot, DRoute::Direct);
        let d_rect = dfun.pole_free_rect(w, 0.25 * w + 1.0)?;
        let found = complex_zeros(&dfun, &d_rect, window.depth)?;
        let (wm, w1) = (rot.omega_pow(-1.0), rot.omega());
        let mut gaps = Vec::new();
        for &tau in &found.values {
            let c_minus = stokes_c(base, rot, wm * tau, true)?;
            let c_plus = stokes_c(base, rot, w1 * tau, true)?;
            let gap = (c_minus.norm() - 1.0).abs().max(((c_minus * c_plus).norm() - 1.0).abs());
            gaps.push((tau, gap));
        }
        let (m3, wit3) = worst(gaps.into_iter());
        let real_negative = found.values.iter().all(|z| z.re < 0.0 && is_real(*z, REALITY_TOL));
        let resolved = found.unresolved.is_empty() && found.audit_count == Some(found.counted_len() as i64);
        clauses.push(Clause::judged(
            "d_zeros_unimodular_c",
            m3,
            1e-6,
            found.len(),
            wit3,
            m3 <= 1e-6 && real_negative && resolved,
        ));
        d_zeros = Some(found);
    }

    // |f(r e^{i theta})| nondecreasing on (0, pi) at a few radii
    let zeros = base.zeros();
    let mut radii = vec![0.5 * zeros.first().copied().unwrap_or(1.0)];
    for frac in [4, 2] {
        if let Some(&e) = zeros.get(zeros.len() / frac) {
            radii.push(e * 1.013);
        }
    }
    radii.push(w);
    let mut worst_drop: f64 = 0.0;
    let mut drop_at = None;
    let samples = 400;
    for &r in &radii {
        let mut prev = base.modulus_profile(r, 0.0);
        for i in 1..samples {
            let theta = PI * i as f64 / samples as f64;
            let v = base.modulus_profile(r, theta);
            let drop = (prev - v) / prev.max(1e-300);
            if drop > worst_drop {
                worst_drop = drop;
                drop_at = Some(Complex64::from_polar(r, theta));
            }
            prev = v;
        }
    }
    clauses.push(Clause::judged(
        "modulus_monotone_in_angle",
        worst_drop,
        0.0,
        radii.len() * (samples - 1),
        drop_at,
        worst_drop <= 0.0,
    ));

    // D(x) + 1 = |C(omega x)|^2 > C(0)^2 for x > 0; C(0)^2 = 4 when k = 1
    let bound = rot.c_at_origin().powi(2);
    let mut lowest = f64::INFINITY;
    let mut lowest_at = None;
    let count = 200;
    for i in 1..=count {
        let x = w * (i as f64 / count as f64).powi(2);
        let v = stokes_d(base, rot, Complex64::new(x, 0.0), DRoute::Composite)?.re + 1.0 - bound;
        if v < lowest {
            lowest = v;
            lowest_at = Some(Complex64::new(x, 0.0));
        }
    }
    clauses.push(Clause::judged(
        "d_plus_one_exceeds_c0_squared",
        lowest,
        bound,
        count,
        lowest_at,
        lowest > 0.0,
    ));

    Ok(PropositionReport {
        clauses,
        c_zeros,
        d_zeros,
    })
}

/// The witness `g(x) = 1 - C(-omega x) C(-omega^{-1} x)`, which equals `-D(-x)`.
pub fn witness_g(base: &EntireProduct, rot: &RotationParams, x: Complex64) -> Result<Complex64> {
    let c1 = stokes_c(base, rot, -rot.omega() * x, false)?;
    let c2 = stokes_c(base, rot, -rot.omega_pow(-1.0) * x, false)?;
    Ok(Complex64::new(1.0, 0.0) - c1 * c2)
}

/// The witness through `g(x) = -D(-x)` with the direct route for `D`. Same
/// function, but free of the cancellation in `1 - C C` where `g` is small.
pub fn witness_g_stable(base: &EntireProduct, rot: &RotationParams, x: Complex64) -> Result<Complex64> {
    Ok(-stokes_d(base, rot, -x, DRoute::Direct)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub zeros: Vec<RayClassification>,
    pub one_points: Vec<RayClassification>,
    pub window: Rect,
    pub unresolved: Vec<UnresolvedBox>,
}

/// Locates zeros and 1-points of the witness in `[-b, radius] x [-radius, radius]`
/// (`b` keeps the poles in the left half-plane outside) and classifies them by ray.
pub fn theorem1_witness(base: &EntireProduct, rot: &RotationParams, window: &SearchWindow) -> Result<WitnessReport> {
    if rot.alpha() > PI / 3.0 + 1e-12 {
        return Err(Error::Domain(format!("alpha = {} lies outside (0, pi/3]", rot.alpha())));
    }
    let e1 = base.zeros().first().copied().unwrap_or(1.0);
    let left = -0.5 * e1 * rot.alpha().cos();
    let r = window.radius;
    let rect = Rect::new(left, r, -r, r)?;
    let g = |x: Complex64| witness_g_stable(base, rot, x);
    let h = |x: Complex64| witness_g(base, rot, x).map(|v| v - 1.0);
    let zeros = complex_roots(&g, &rect, window.depth)?;
    let ones = complex_roots(&h, &rect, window.depth)?;
    let classify = |v: Vec<Complex64>| {
        let mut out: Vec<RayClassification> =
            v.into_iter().map(|z| RayClassification::classify(z, rot.alpha())).collect();
        out.sort_by(|a, b| a.point.norm().total_cmp(&b.point.norm()));
        out
    };
    let mut unresolved = zeros.unresolved;
    unresolved.extend(ones.unresolved);
    Ok(WitnessReport {
        zeros: classify(zeros.roots),
        one_points: classify(ones.roots),
        window: rect,
        unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn toy() -> EntireProduct {
        EntireProduct::new(vec![1.0, 4.0, 9.0], None).unwrap()
    }

    #[test]
    fn constants_at_origin() {
        let rot = RotationParams::pure(PI / 3.0).unwrap();
        let p = toy();
        assert_eq!(stokes_c(&p, &rot, c(0.0, 0.0), false).unwrap(), c(2.0, 0.0));
        let d = stokes_d(&p, &rot, c(0.0, 0.0), DRoute::Composite).unwrap();
        assert!((d - c(3.0, 0.0)).norm() < 1e-15);
        let g = witness_g(&p, &rot, c(0.0, 0.0)).unwrap();
        assert!((g - c(-3.0, 0.0)).norm() < 1e-15);

        let ode = RotationParams::for_exponent(4.0).unwrap();
        let c0 = stokes_c(&p, &ode, c(0.0, 0.0), false).unwrap();
        assert!((c0.re - 3f64.sqrt()).abs() < 1e-15 && c0.im == 0.0);
    }

    #[test]
    fn pole_guard_and_limit() {
        let rot = RotationParams::pure(0.7).unwrap();
        let p = toy();
        assert!(matches!(stokes_c(&p, &rot, c(4.0, 0.0), false), Err(Error::PoleGuard { .. })));
        let lim = stokes_c(&p, &rot, c(4.0, 0.0), true).unwrap();
        // the limit of a true pole is infinite; here we only check it is finite and real
        assert!(lim.re.is_finite() && lim.im == 0.0);
        let w = rot.omega_pow(-1.0);
        assert!(matches!(
            stokes_d(&p, &rot, w.conj() * 0.0 + rot.omega_pow(-1.0) * 9.0, DRoute::Direct),
            Err(Error::PoleGuard { .. })
        ));
    }

    #[test]
    fn routes_agree_and_identities_hold() {
        let p = EntireProduct::new(vec![0.9, 2.3, 4.1, 7.7, 12.0], None).unwrap();
        for rot in [RotationParams::pure(0.8).unwrap(), RotationParams::new(0.6, 0.3).unwrap()] {
            for &z in &[c(-3.0, 0.4), c(1.1, -2.0), c(0.2, 0.0), c(-6.5, 0.0), c(5.0, 5.0)] {
                let a = stokes_d(&p, &rot, z, DRoute::Composite).unwrap();
                let b = stokes_d(&p, &rot, z, DRoute::Direct).unwrap();
                assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
                let r = identity_residual(&p, &rot, z, Identity::PhaseWeighted).unwrap();
                assert!(r < 1e-12, "{r}");
            }
        }
        let pure = RotationParams::pure(0.8).unwrap();
        assert!(identity_residual(&p, &pure, c(-2.0, 1.0), Identity::UnitPhase).unwrap() < 1e-12);
        assert!(identity_residual(&p, &pure, c(0.0, 0.0), Identity::UnitPhase).unwrap() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry() {
        let p = toy();
        let rot = RotationParams::new(0.9, 0.2).unwrap();
        for &z in &[c(-2.0, 0.7), c(3.3, -1.2)] {
            let cz = stokes_c(&p, &rot, z, false).unwrap();
            assert!((stokes_c(&p, &rot, z.conj(), false).unwrap() - cz.conj()).norm() < 1e-12 * cz.norm());
            let dz = stokes_d(&p, &rot, z, DRoute::Direct).unwrap();
            assert!((stokes_d(&p, &rot, z.conj(), DRoute::Direct).unwrap() - dz.conj()).norm() < 1e-12 * dz.norm());
        }
    }

    #[test]
    fn toy_c_positive_zeros_match_grid_oracle() {
        // For a product that is not a fixed point, C may vanish on the positive
        // axis: here 2 Re f(w^2 x) is a cubic with the single positive root below.
        let p = toy();
        let rot = RotationParams::pure(PI / 3.0).unwrap();
        let f = SpectralFunction::c(&p, rot);
        let set = real_zeros(&f, 0.01, 20.0, 4000).unwrap();
        assert_eq!(set.len(), 1, "{:?}", set.values);
        assert!((set.values[0].re - 3.383_931_519_146_685).abs() < 1e-12);
    }

    #[test]
    fn toy_zero_clauses_run() {
        let p = toy();
        let rot = RotationParams::pure(PI / 3.0).unwrap();
        let report = verify_proposition(&p, &rot, &SearchWindow { radius: 10.0, depth: 16 }).unwrap();
        assert_eq!(report.clauses.len(), 5);
        for clause in &report.clauses {
            assert!(clause.margin.is_finite());
        }
        let wide = RotationParams::pure(2.0 * PI / 5.0).unwrap();
        let report = verify_proposition(&p, &wide, &SearchWindow { radius: 10.0, depth: 16 }).unwrap();
        assert!(matches!(&report.clauses[2].status, ClauseStatus::Skipped { reason } if reason == "alpha outside (0,π/3]"));
    }

    #[test]
    fn ray_classification() {
        let alpha = PI / 3.0;
        let r = RayClassification::classify(Complex64::from_polar(2.0, alpha + 1e-3), alpha);
        assert_eq!(r.ray, 1);
        assert!((r.deviation - 1e-3).abs() < 1e-12);
        assert_eq!(RayClassification::classify(c(5.0, -1e-9), alpha).ray, 0);
        assert_eq!(RayClassification::classify(Complex64::from_polar(1.0, -1.0), alpha).ray, -1);
    }
}

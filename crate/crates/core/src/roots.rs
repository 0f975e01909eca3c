//! Root location: sign-change scans on the real line and an argument-principle
//! search in rectangles of the complex plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::brent;

/// Zeros of a real function on `[a, b]` found by a uniform sign-change scan
/// with `grid` cells and Brent refinement to `rel_tol`.
pub fn real_roots<F>(mut f: F, a: f64, b: f64, grid: usize, rel_tol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a < b) || grid == 0 {
        return Err(Error::Domain(format!("bad scan interval [{a}, {b}] with {grid} cells")));
    }
    let h = (b - a) / grid as f64;
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a)?;
    if f0 == 0.0 {
        roots.push(a);
    }
    for i in 1..=grid {
        let x1 = if i == grid { b } else { a + h * i as f64 };
        let f1 = f(x1)?;
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            roots.push(brent(&mut f, x0, x1, rel_tol)?);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::Domain(format!(
                "degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn scale(&self) -> f64 {
        self.re_min
            .abs()
            .max(self.re_max.abs())
            .max(self.im_min.abs())
            .max(self.im_max.abs())
            .max(self.width())
            .max(self.height())
    }

    fn grown(&self, by: f64) -> Rect {
        Rect {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
        }
    }
}

/// A box the search could not reduce to a single simple zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedBox {
    pub rect: Rect,
    pub count: i64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexRoots {
    pub roots: Vec<Complex64>,
    /// Multiplicity of each entry of `roots`.
    pub multiplicity: Vec<usize>,
    /// Winding number of the (possibly nudged) outer contour.
    pub count: i64,
    pub unresolved: Vec<UnresolvedBox>,
}

const MAX_ARG_STEP: f64 = PI / 3.0;
const INITIAL_EDGE_SEGMENTS: usize = 64;
const MIN_EDGE_SEGMENTS: usize = 8;
const MAX_EDGE_REFINEMENTS: usize = 40;

/// Change of `arg f` along the segment `[a, b]`. A step is accepted once it
/// turns by less than pi/3 and its two halves agree with it, which guards
/// against steps that silently skip a full turn.
fn arg_change<F>(f: &F, a: Complex64, fa: Complex64, b: Complex64, fb: Complex64, depth: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mid = 0.5 * (a + b);
    let fm = f(mid)?;
    if fm.norm() == 0.0 || !fm.norm().is_finite() {
        return Err(Error::Root(format!("contour passes through a zero at {mid}")));
    }
    // log f is analytic, so a fast phase turn also shows up in the modulus;
    // bounding the whole complex log step catches turns the phase alone hides
    let (whole, first, second) = ((fb / fa).ln(), (fm / fa).ln(), (fb / fm).ln());
    if whole.norm() < MAX_ARG_STEP && first.norm() < MAX_ARG_STEP && second.norm() < MAX_ARG_STEP {
        return Ok(first.im + second.im);
    }
    if depth >= MAX_EDGE_REFINEMENTS {
        return Err(Error::Root(format!("argument does not settle near {a}")));
    }
    Ok(arg_change(f, a, fa, mid, fm, depth + 1)? + arg_change(f, mid, fm, b, fb, depth + 1)?)
}

/// Number of zeros (minus poles) of `f` inside `rect`.
pub fn winding_count<F>(f: &F, rect: &Rect) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    winding_count_at(f, rect, INITIAL_EDGE_SEGMENTS as f64 / rect.width().max(rect.height()))
}

/// Winding count with initial sample points `density` per unit length.
fn winding_count_at<F>(f: &F, rect: &Rect, density: f64) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let corners = rect.corners();
    let mut total = 0.0;
    for side in 0..4 {
        let (p, q) = (corners[side], corners[(side + 1) % 4]);
        let segments = ((q - p).norm() * density).ceil().max(MIN_EDGE_SEGMENTS as f64) as usize;
        let mut z0 = p;
        let mut f0 = f(z0)?;
        for i in 1..=segments {
            let z1 = p + (q - p) * (i as f64 / segments as f64);
            let f1 = f(z1)?;
            if f0.norm() == 0.0 || f1.norm() == 0.0 || !f1.norm().is_finite() {
                return Err(Error::Root(format!("contour passes through a zero near {z1}")));
            }
            total += arg_change(f, z0, f0, z1, f1, 0)?;
            z0 = z1;
            f0 = f1;
        }
    }
    let turns = total / (2.0 * PI);
    let count = turns.round();
    if (turns - count).abs() > 0.05 {
        return Err(Error::Root(format!("winding number {turns} is not close to an integer")));
    }
    Ok(count as i64)
}

/// Winding count with the rectangle nudged outward when its boundary runs
/// through (or too close to) a zero.
fn nudged_count<F>(f: &F, rect: &Rect) -> Result<(Rect, i64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut r = *rect;
    let mut last = None;
    for attempt in 0..6 {
        match winding_count(f, &r) {
            Ok(n) => return Ok((r, n)),
            Err(e) => {
                last = Some(e);
                let by = 1e-3 * (attempt as f64 + 1.0) * rect.width().min(rect.height());
                r = rect.grown(by * (1.0 + 0.37 * attempt as f64));
            }
        }
    }
    Err(last.unwrap())
}

/// Newton iteration with the step scaled by `k`, which restores quadratic
/// convergence at a zero of multiplicity `k`.
fn newton<F>(f: &F, start: Complex64, scale: f64, k: f64) -> Option<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut z = start;
    let h = 1e-7 * scale.max(1e-300);
    let mut last_step = f64::INFINITY;
    for _ in 0..60 {
        let fz = f(z).ok()?;
        if fz.norm() == 0.0 {
            return Some(z);
        }
        let d = (f(z + h).ok()? - f(z - h).ok()?) / (2.0 * h);
        if d.norm() == 0.0 || !d.norm().is_finite() {
            return None;
        }
        let step = k * fz / d;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-14 * z.norm().max(scale * 1e-3) {
            // one more step to use the derivative at the converged point
            let fz = f(z).ok()?;
            let d = (f(z + h * 1e-2).ok()? - f(z - h * 1e-2).ok()?) / (2.0 * h * 1e-2);
            if d.norm() > 0.0 {
                z -= k * fz / d;
            }
            return Some(z);
        }
        // steps no longer shrink: the evaluation noise floor, far inside the box
        if step.norm() > 0.5 * last_step && step.norm() <= 1e-6 * scale {
            return Some(z);
        }
        last_step = step.norm();
    }
    None
}

/// A `k`-fold zero of `f` is a `(k - 1)`-fold zero of `f'`, which is far less
/// sensitive to evaluation noise. Newton on `f'` with central differences;
/// for `k = 2` each step jumps to the vertex of the local parabola.
fn refine_multiple<F>(f: &F, start: Complex64, side: f64, k: f64) -> Option<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let h = 0.05 * side;
    let mut z = start;
    for _ in 0..30 {
        let (fm, f0, fp) = (f(z - h).ok()?, f(z).ok()?, f(z + h).ok()?);
        let d1 = (fp - fm) / (2.0 * h);
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        if d2.norm() == 0.0 || !d2.norm().is_finite() {
            return None;
        }
        let step = (k - 1.0) * d1 / d2;
        z -= step;
        if step.norm() <= 1e-4 * h {
            return Some(z);
        }
    }
    None
}

/// All zeros of `f` in `rect`: winding counts, recursive quadrisection (at
/// most `depth` levels) until each box holds one zero, then Newton polish.
/// Results are sorted by real part.
pub fn complex_roots<F>(f: &F, rect: &Rect, depth: usize) -> Result<ComplexRoots>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut out = ComplexRoots::default();
    let (start, count) = nudged_count(f, rect)?;
    out.count = count;
    let ctx = Ctx {
        scale: rect.scale(),
        density: INITIAL_EDGE_SEGMENTS as f64 / rect.width().max(rect.height()),
    };
    search(f, &start, count, depth, &ctx, &mut out)?;
    let mut found: Vec<(Complex64, usize)> = out.roots.drain(..).zip(out.multiplicity.drain(..)).collect();
    found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    // a nudged box can pick up a zero twice
    found.dedup_by(|a, b| (a.0 - b.0).norm() <= 1e-9 * a.0.norm().max(1e-9));
    (out.roots, out.multiplicity) = found.into_iter().unzip();
    Ok(out)
}

/// Fixed for one search: size of the outer box and edge sampling density.
struct Ctx {
    scale: f64,
    density: f64,
}

fn search<F>(f: &F, rect: &Rect, count: i64, depth: usize, ctx: &Ctx, out: &mut ComplexRoots) -> Result<()>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let scale = ctx.scale;
    if count == 0 {
        return Ok(());
    }
    if count < 0 {
        out.unresolved.push(UnresolvedBox {
            rect: *rect,
            count,
            reason: "negative winding number (pole inside)".into(),
        });
        return Ok(());
    }
    let side = rect.width().max(rect.height());
    if count == 1 {
        if let Some(z) = newton(f, rect.center(), side, 1.0) {
            if rect.grown(1e-9 * scale).contains(z) {
                out.roots.push(z);
                out.multiplicity.push(1);
                return Ok(());
            }
        }
        if side < 1e-13 * scale {
            out.roots.push(rect.center());
            out.multiplicity.push(1);
            return Ok(());
        }
    }
    if depth == 0 && count > 1 && side < 1e-6 * scale {
        // `count` zeros within a box this small: report one zero of that
        // multiplicity. Noise limits a k-fold zero to about eps^(1/k), so
        // Newton only refines the position when it stays inside the box.
        let z = refine_multiple(f, rect.center(), side, count as f64)
            .filter(|&z| rect.grown(side).contains(z))
            .unwrap_or_else(|| rect.center());
        out.roots.push(z);
        out.multiplicity.push(count as usize);
        return Ok(());
    }
    if depth == 0 {
        out.unresolved.push(UnresolvedBox {
            rect: *rect,
            count,
            reason: "depth exhausted".into(),
        });
        return Ok(());
    }
    // off-center split so that symmetric zero sets do not land on the cut lines
    let xs = rect.re_min + 0.5123 * rect.width();
    let ys = rect.im_min + 0.4871 * rect.height();
    let children = [
        Rect { re_max: xs, im_max: ys, ..*rect },
        Rect { re_min: xs, im_max: ys, ..*rect },
        Rect { re_max: xs, im_min: ys, ..*rect },
        Rect { re_min: xs, im_min: ys, ..*rect },
    ];
    let mut counted = Vec::with_capacity(4);
    for child in &children {
        match winding_count_at(f, child, ctx.density) {
            Ok(n) => counted.push((*child, n)),
            Err(_) => {
                // a zero sits on an internal cut line; retry with a shifted split
                return split_shifted(f, rect, count, depth, ctx, out);
            }
        }
    }
    for (child, n) in counted {
        search(f, &child, n, depth - 1, ctx, out)?;
    }
    Ok(())
}

fn split_shifted<F>(f: &F, rect: &Rect, count: i64, depth: usize, ctx: &Ctx, out: &mut ComplexRoots) -> Result<()>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    for frac in [0.4377, 0.5619, 0.3911] {
        let xs = rect.re_min + frac * rect.width();
        let ys = rect.im_min + (1.0 - frac) * rect.height();
        let children = [
            Rect { re_max: xs, im_max: ys, ..*rect },
            Rect { re_min: xs, im_max: ys, ..*rect },
            Rect { re_max: xs, im_min: ys, ..*rect },
            Rect { re_min: xs, im_min: ys, ..*rect },
        ];
        let counts: Result<Vec<i64>> = children.iter().map(|c| winding_count_at(f, c, ctx.density)).collect();
        if let Ok(counts) = counts {
            for (child, n) in children.iter().zip(counts) {
                search(f, child, n, depth - 1, ctx, out)?;
            }
            return Ok(());
        }
    }
    out.unresolved.push(UnresolvedBox {
        rect: *rect,
        count,
        reason: "could not split without cutting through a zero".into(),
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_scan_finds_sine_zeros() {
        let roots = real_roots(|x| Ok(x.sin()), 0.5, 10.0, 100, 1e-14).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, k) in roots.iter().zip(1..) {
            assert!((r - PI * k as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_function() {
        let f = |z: Complex64| Ok(z - c(2.0, 1.0));
        let rect = Rect::new(0.0, 4.0, 0.0, 2.0).unwrap();
        let r = complex_roots(&f, &rect, 12).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - c(2.0, 1.0)).norm() < 1e-13);
        assert!(r.unresolved.is_empty());
    }

    #[test]
    fn plus_minus_i() {
        let f = |z: Complex64| Ok(z * z + 1.0);
        let rect = Rect::new(-1.0, 1.0, -2.0, 2.0).unwrap();
        assert_eq!(winding_count(&f, &rect).unwrap(), 2);
        let r = complex_roots(&f, &rect, 12).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!((r.roots[0] - c(0.0, -1.0)).norm() < 1e-13);
        assert!((r.roots[1] - c(0.0, 1.0)).norm() < 1e-13);
    }

    #[test]
    fn many_zeros_and_a_pole() {
        // zeros of sin on the real axis inside the box, no others
        let f = |z: Complex64| Ok(z.sin());
        let rect = Rect::new(0.3, 13.0, -1.0, 1.0).unwrap();
        let r = complex_roots(&f, &rect, 16).unwrap();
        assert_eq!(r.roots.len(), 4);
        for (z, k) in r.roots.iter().zip(1..) {
            assert!((z - c(PI * k as f64, 0.0)).norm() < 1e-12);
        }
        let g = |z: Complex64| Ok(1.0 / (z - c(0.5, 0.2)));
        let rect = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(winding_count(&g, &rect).unwrap(), -1);
    }

    #[test]
    fn zero_on_the_boundary_is_nudged() {
        let f = |z: Complex64| Ok(z - c(1.0, 0.0));
        let rect = Rect::new(1.0, 2.0, -1.0, 1.0).unwrap();
        let r = complex_roots(&f, &rect, 10).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn double_root_has_multiplicity_two() {
        let z0 = c(0.3, 0.1);
        let f = |z: Complex64| Ok((z - z0) * (z - z0) * (z + c(0.0, 0.5)));
        let rect = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let r = complex_roots(&f, &rect, 24).unwrap();
        assert!(r.unresolved.is_empty(), "{:?}", r.unresolved);
        assert_eq!(r.count, 3);
        assert_eq!(r.multiplicity, vec![1, 2]);
        assert!((r.roots[1] - z0).norm() < 1e-12);
        // too shallow to reach the small boxes
        let r = complex_roots(&f, &rect, 6).unwrap();
        assert!(!r.unresolved.is_empty());
    }

    #[test]
    fn close_pair_stays_two_simple_zeros() {
        let (a, b) = (c(0.3, 0.1), c(0.3 + 1e-5, 0.1));
        let f = |z: Complex64| Ok((z - a) * (z - b));
        let rect = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let r = complex_roots(&f, &rect, 30).unwrap();
        assert!(r.unresolved.is_empty(), "{:?}", r.unresolved);
        assert_eq!(r.multiplicity, vec![1, 1]);
        assert!((r.roots[0] - a).norm() < 1e-12 && (r.roots[1] - b).norm() < 1e-12);
    }
}

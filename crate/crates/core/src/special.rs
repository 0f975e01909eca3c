//! Small numerical building blocks shared by the other modules.

use crate::error::Error;

/// B_{2j} / (2j)! for j = 1..=8.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
];

/// Hurwitz zeta function `sum_{k>=0} (a + k)^{-s}` for real `s > 1`, `a > 0`.
///
/// Euler–Maclaurin summation; the direct part is long enough that the
/// remainder series converges to roughly machine precision for the ranges
/// used by the tail model (`s` up to a few hundred).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    let target = s.max(12.0);
    let direct = if a >= target {
        0
    } else {
        (target - a).ceil() as usize
    };
    let mut sum = 0.0;
    for k in 0..direct {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + direct as f64;
    let x_pow = x.powf(-s);
    sum += x * x_pow / (s - 1.0) + 0.5 * x_pow;
    // rising factorial s (s+1) ... (s + 2j - 2) times x^{-s-2j+1}
    let mut rising = s;
    let mut term_pow = x_pow / x;
    let inv_x2 = 1.0 / (x * x);
    for (j, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if j > 0 {
            let base = s + (2 * j) as f64;
            rising *= (base - 1.0) * base;
            term_pow *= inv_x2;
        }
        let term = coeff * rising * term_pow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Brent's method on a sign-changing bracket.
pub fn brent<F, E>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64) -> std::result::Result<f64, E>
where
    F: FnMut(f64) -> std::result::Result<f64, E>,
    E: From<Error>,
{
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Root(format!("no sign change on [{a}, {b}]")).into());
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs().max(1e-300);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::Root("Brent iteration limit reached".into()).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_matches_riemann_zeta() {
        // zeta(2) = pi^2/6, zeta(4) = pi^4/90
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta(2.0, 1.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        // zeta(2, 1/2) = (2^2 - 1) zeta(2)
        assert!((hurwitz_zeta(2.0, 0.5) - 3.0 * pi * pi / 6.0).abs() < 1e-13);
    }

    #[test]
    fn hurwitz_against_direct_sum() {
        for &(s, a) in &[(1.5_f64, 64.75_f64), (40.0, 3.2), (133.0, 65.0), (2.6667, 10.0)] {
            // direct sum with an integral remainder, long enough to be exact here
            let n = 200_000usize;
            let mut direct: f64 = (0..n).map(|k| (a + k as f64).powf(-s)).sum();
            let x = a + n as f64;
            direct += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
            let got = hurwitz_zeta(s, a);
            assert!(((got - direct) / direct).abs() < 1e-10, "s={s} a={a}: {got} vs {direct}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(20);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((integral - 2.0 / 39.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn brent_finds_cubic_root() {
        let r: std::result::Result<f64, Error> =
            brent(|x| Ok(x * x * x - 2.0), 0.0, 2.0, 1e-15);
        assert!((r.unwrap() - 2f64.cbrt()).abs() < 1e-14);
    }
}

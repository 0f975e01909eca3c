//! Large-|z| data for the solution of `y'' = (z^m - s) y` that decays along
//! the positive real axis, normalized so that
//! `y ~ z^{-m/4} exp(-2/(m+2) z^{(m+2)/2})`.
//!
//! Writing `y = exp(∫u)`, the Riccati equation `u' + u^2 = Q` is solved
//! order by order. Derivatives of each correction come from truncated
//! Taylor jets of `Q` about the evaluation point.

use num_complex::Complex64;

use crate::special::gauss_legendre;

type Jet = Vec<Complex64>;

fn mul(a: &[Complex64], b: &[Complex64], len: usize) -> Jet {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn recip(a: &[Complex64], len: usize) -> Jet {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    out[0] = a[0].inv();
    for n in 1..len {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n.min(a.len() - 1) {
            acc += a[k] * out[n - k];
        }
        out[n] = -acc * out[0];
    }
    out
}

fn sqrt(a: &[Complex64], len: usize) -> Jet {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    out[0] = a[0].sqrt();
    let two_r0 = out[0] * 2.0;
    for n in 1..len {
        let mut acc = if n < a.len() { a[n] } else { Complex64::new(0.0, 0.0) };
        for k in 1..n {
            acc -= out[k] * out[n - k];
        }
        out[n] = acc / two_r0;
    }
    out
}

fn derivative(a: &[Complex64]) -> Jet {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Riccati corrections `phi_0 .. phi_order` at `z`.
fn riccati_terms(m: f64, s: Complex64, z: Complex64, order: usize) -> Vec<Complex64> {
    let len = order + 1;
    // Taylor coefficients of (z + h)^m - s in h
    let mut q = Vec::with_capacity(len);
    let zm = z.powf(m);
    let mut binom = 1.0;
    for j in 0..len {
        q.push(zm * binom / z.powi(j as i32));
        binom *= (m - j as f64) / (j as f64 + 1.0);
    }
    q[0] -= s;

    let mut phis: Vec<Jet> = Vec::with_capacity(len);
    let phi0: Jet = sqrt(&q, len).into_iter().map(|c| -c).collect();
    let inv_two_phi0 = recip(&phi0.iter().map(|c| c * 2.0).collect::<Vec<_>>(), len);
    phis.push(phi0);
    for n in 1..len {
        let l = len - n;
        let mut rhs = derivative(&phis[n - 1]);
        rhs.truncate(l);
        for i in 1..n {
            let p = mul(&phis[i], &phis[n - i], l);
            for (r, v) in rhs.iter_mut().zip(p) {
                *r += v;
            }
        }
        let phi: Jet = mul(&rhs, &inv_two_phi0, l).into_iter().map(|c| -c).collect();
        phis.push(phi);
    }
    phis.iter().map(|p| p[0]).collect()
}

/// `y'/y` and `ln y` at `R` on the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub radius: f64,
    pub log_value: Complex64,
    pub log_derivative: Complex64,
    /// Size of the last correction kept, as a rough error indicator.
    pub truncation: f64,
}

/// Default number of Riccati corrections.
pub const ORDER: usize = 12;

pub fn seed(m: f64, s: Complex64, radius: f64, order: usize) -> Seed {
    let r = Complex64::new(radius, 0.0);
    let terms = riccati_terms(m, s, r, order);
    let log_derivative: Complex64 = terms.iter().sum();

    // exact antiderivative of sqrt(z^m - s), zero-normalized at infinity
    let mut leading = Complex64::new(0.0, 0.0);
    let mut coeff = 1.0;
    let mut power = Complex64::new(1.0, 0.0);
    for j in 0..200 {
        let e = 1.0 + m / 2.0 - j as f64 * m;
        let term = if e.abs() < 1e-12 {
            power * coeff * radius.ln()
        } else {
            power * coeff * radius.powf(e) / e
        };
        leading += term;
        if j > 0 && term.norm() < 1e-18 * leading.norm().max(1.0) {
            break;
        }
        coeff *= (0.5 - j as f64) / (j as f64 + 1.0);
        power *= -s;
    }
    let amplitude = -(m / 4.0) * radius.ln() - 0.25 * (Complex64::new(1.0, 0.0) - s * radius.powf(-m)).ln();

    // ∫_R^∞ of the higher corrections, via z = R / t^2
    let (nodes, weights) = gauss_legendre(48);
    let mut tail = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(&weights) {
        let t = 0.5 * (x + 1.0);
        let z = radius / (t * t);
        let rest: Complex64 = riccati_terms(m, s, Complex64::new(z, 0.0), order)[2..].iter().sum();
        tail += rest * (0.5 * w * 2.0 * radius / (t * t * t));
    }

    Seed {
        radius,
        log_value: -leading + amplitude - tail,
        log_derivative,
        truncation: terms[order].norm() * radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_ground_state_is_exact() {
        // m = 2, s = 1: y = exp(-z^2/2) exactly, and the normalization
        // carries z^{(s-1)/2} = 1
        let sd = seed(2.0, Complex64::new(1.0, 0.0), 9.0, ORDER);
        assert!((sd.log_derivative - Complex64::new(-9.0, 0.0)).norm() < 1e-12);
        assert!((sd.log_value - Complex64::new(-40.5, 0.0)).norm() < 1e-12, "{}", sd.log_value);
        assert!(sd.truncation < 1e-12);
    }

    #[test]
    fn riccati_terms_shrink() {
        let t = riccati_terms(4.0, Complex64::new(3.0, 1.0), Complex64::new(5.0, 0.0), ORDER);
        for n in 2..ORDER {
            assert!(t[n + 1].norm() < t[n].norm(), "{t:?}");
        }
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;
use voros_core::oracle::{convention_map, wronskian, D0Route, Direction, OdeProblem, OracleOptions};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn harmonic_halfline_levels_are_4k_minus_1() {
    let p = OdeProblem::new(2.0, 1).unwrap();
    let set = p.halfline_dirichlet_spectrum(5).unwrap();
    assert!(!set.partial);
    for (k, v) in set.reals().iter().enumerate() {
        let exact = 4.0 * (k as f64 + 1.0) - 1.0;
        assert!(rel(*v, exact) < 1e-7, "level {k}: {v}");
    }
}

#[test]
fn harmonic_pt_levels_are_2k_minus_1() {
    let p = OdeProblem::new(2.0, 1).unwrap();
    let set = p.pt_eigenvalues(100.0, 4).unwrap();
    for (k, v) in set.reals().iter().enumerate() {
        let exact = 2.0 * (k as f64 + 1.0) - 1.0;
        assert!(rel(*v, exact) < 1e-7, "level {k}: {v}");
    }
    assert_eq!(set.audit_count, Some(4));
}

#[test]
fn values_at_the_origin() {
    for m in [2.0, 3.0, 4.0, 5.5] {
        let p = OdeProblem::new(m, 1).unwrap();
        let c0 = 2.0 * (PI / (m + 2.0)).cos();
        assert!((p.stokes_c0(c(0.0, 0.0)).unwrap() - c0).norm() < 1e-10, "m = {m}");
        for route in [D0Route::Composite, D0Route::Wronskian] {
            let d0 = p.stokes_d0(c(0.0, 0.0), route).unwrap();
            assert!((d0 - (c0 * c0 - 1.0)).norm() < 1e-10, "m = {m} {route:?}");
        }
        assert!((p.determinant_f(c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
    }
}

#[test]
fn wronskian_is_the_same_away_from_the_origin() {
    let p = OdeProblem::new(4.0, 1).unwrap();
    let lambda = c(1.3, 0.4);
    let y0 = p.subdominant_solution(lambda, 0.0).unwrap();
    let ym = p.subdominant_solution(lambda, -1.0).unwrap();
    let w_origin = wronskian(&y0, &ym);
    for z in [c(0.7, 0.2), c(1.1, -0.5)] {
        let a = p.propagate(lambda, &y0, z).unwrap();
        let b = p.propagate(lambda, &ym, z).unwrap();
        let w = a[0] * b[1] - a[1] * b[0];
        assert!((w - w_origin).norm() < 1e-9 * w_origin.norm(), "{w} vs {w_origin}");
    }
}

#[test]
fn doubling_the_seed_radius_leaves_origin_data_fixed() {
    let p = OdeProblem::new(4.0, 1).unwrap();
    let wide = OdeProblem::with_options(
        4.0,
        1,
        OracleOptions {
            radius_factor: 2.0,
            ..OracleOptions::default()
        },
    )
    .unwrap();
    for lambda in [c(1.0, 0.0), c(-7.5, 2.0), c(20.0, -3.0), c(-60.0, 0.0), c(300.0, 40.0)] {
        let a = p.subdominant_solution(lambda, 0.0).unwrap();
        let b = wide.subdominant_solution(lambda, 0.0).unwrap();
        let d = (a.value - b.value).norm() / a.value.norm();
        assert!(d < 1e-8, "λ = {lambda}: {d}");
        assert!(d <= a.error_estimate.max(1e-10), "λ = {lambda}: {d} > {}", a.error_estimate);
        assert_eq!(b.seed_radius, 2.0 * a.seed_radius);
    }
}

#[test]
fn neighbouring_solutions_are_linearly_related() {
    // y_1 + y_{-1} - C_0 y_0 = 0
    let p = OdeProblem::new(4.0, 1).unwrap();
    for lambda in [c(0.5, 0.0), c(-3.0, 1.5), c(6.0, -2.0)] {
        let c0 = p.stokes_c0(lambda).unwrap();
        let y: Vec<_> = [0.0, 1.0, -1.0].iter().map(|&k| p.subdominant_solution(lambda, k).unwrap()).collect();
        let rv = y[1].value + y[2].value - c0 * y[0].value;
        let rd = y[1].derivative + y[2].derivative - c0 * y[0].derivative;
        let scale = y[1].value.norm() + y[1].derivative.norm();
        assert!(rv.norm().max(rd.norm()) < 1e-7 * scale, "λ = {lambda}");
    }
}

#[test]
fn determinant_is_real_on_the_real_axis() {
    let p = OdeProblem::new(3.0, 1).unwrap();
    for lambda in [c(0.7, 0.3), c(-4.0, 2.0), c(2.5, -1.0)] {
        let a = p.determinant_f(lambda.conj()).unwrap();
        let b = p.determinant_f(lambda).unwrap().conj();
        assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
    }
}

#[test]
fn two_d0_routes_agree() {
    let p = OdeProblem::new(4.0, 2).unwrap();
    for j in 0..20 {
        let t = j as f64;
        let lambda = c(-5.0 + 1.3 * t, 4.0 * (0.7 * t).sin());
        let a = p.stokes_d0(lambda, D0Route::Composite).unwrap();
        let b = p.stokes_d0(lambda, D0Route::Wronskian).unwrap();
        assert!((a - b).norm() < 1e-6 * b.norm().max(1.0), "λ = {lambda}: {a} vs {b}");
    }
}

#[test]
fn quartic_spectra() {
    let half = OdeProblem::new(4.0, 1).unwrap().halfline_dirichlet_spectrum(12).unwrap();
    let levels = half.reals();
    assert!(levels.windows(2).all(|w| w[0] < w[1] && w[0] > 0.0));
    assert!(rel(levels[0], 3.799_673_029_801_394) < 1e-9, "{}", levels[0]);
    // Weyl growth E_k ~ A k^p with p = 2m/(m+2)
    let (x, y): (Vec<f64>, Vec<f64>) =
        levels.iter().enumerate().skip(4).map(|(k, e)| (((k + 1) as f64).ln(), e.ln())).unzip();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
        / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
    assert!(rel(slope, 4.0 / 3.0) < 0.05, "slope {slope}");

    let p2 = OdeProblem::new(4.0, 2).unwrap();
    let even = p2.pt_eigenvalues(100.0, 5).unwrap();
    assert!(rel(even.values[0].re, 1.060_362_090_5) < 1e-8, "{}", even.values[0]);
    assert!(even.all_real() && even.reals().iter().all(|&v| v > 0.0));
    assert_eq!(even.audit_count, Some(5));
    // odd full-line levels are the half-line Dirichlet ones
    assert!(rel(even.values[1].re, levels[0]) < 1e-9);
    // D_0 zeros through the composite route
    for v in even.reals() {
        let d = p2.stokes_d0(c(v, 0.0), D0Route::Composite).unwrap();
        assert!(d.norm() < 1e-6, "{v}: {d}");
    }

    let odd = OdeProblem::new(4.0, 1).unwrap().pt_eigenvalues(100.0, 4).unwrap();
    for (v, r) in odd.reals().iter().zip([1.477_149_754, 6.003_386_082, 11.802_433_59, 18.458_818_70]) {
        assert!(rel(*v, r) < 1e-8, "{v} vs {r}");
    }
}

#[test]
fn pt_levels_are_positive_for_several_exponents() {
    for m in [3.0, 4.0, 5.0] {
        let set = OdeProblem::new(m, 1).unwrap().pt_eigenvalues(100.0, 4).unwrap();
        assert!(set.all_real() && set.reals().iter().all(|&v| v > 0.0), "m = {m}");
        assert_eq!(set.audit_count, Some(4), "m = {m}");
        let f = OdeProblem::new(m, 1).unwrap().halfline_dirichlet_spectrum(4).unwrap();
        assert!(f.reals().iter().all(|&v| v > 0.0));
    }
    // the cubic ground state; 1.1562670719881 is the textbook value
    let cubic = OdeProblem::new(3.0, 1).unwrap().pt_eigenvalues(100.0, 1).unwrap();
    assert!(rel(cubic.values[0].re, 1.156_267_071_988) < 1e-8, "{}", cubic.values[0]);
}

#[test]
fn sign_convention() {
    let p = OdeProblem::new(2.0, 1).unwrap();
    let s = p.halfline_dirichlet_spectrum(1).unwrap().values[0];
    let lambda = convention_map(s, Direction::InternalToLambda);
    assert!((lambda - c(-3.0, 0.0)).norm() < 1e-7);
    assert!(p.determinant_f(lambda).unwrap().norm() < 1e-7);
}

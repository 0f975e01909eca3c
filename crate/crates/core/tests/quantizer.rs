use std::f64::consts::PI;
use std::time::Instant;

use voros_core::quantizer::{run_scheme, solve_level, QuantizationProblem};

// odd levels of -y'' + x^4 y, i.e. the Dirichlet problem on the half line
const QUARTIC_HALF_LINE: [f64; 3] = [3.799_673_029_801_394, 11.644_745_511_378_162, 21.238_372_918_235_995];

#[test]
fn quartic_ode_mode_converges_to_half_line_levels() {
    let start = Instant::now();
    let problem = QuantizationProblem::ode_mode(4.0, 64, 1e-10).unwrap();
    let (product, report) = run_scheme(&problem).unwrap();
    eprintln!("{:?} in {:?}", report, start.elapsed());
    assert!(report.converged);
    assert!(report.quantization_residual <= 1e-9);
    for (e, want) in product.zeros().iter().zip(QUARTIC_HALF_LINE) {
        assert!(((e - want) / want).abs() < 1e-5, "{e} vs {want}");
    }
    for k in 1..=10 {
        let e = solve_level(&product, &problem.rot, PI / 6.0, k).unwrap();
        let stored = product.zeros()[k - 1];
        assert!(((e - stored) / stored).abs() < 1e-9);
    }
}

#[test]
fn doubling_level_count_leaves_low_levels_fixed() {
    let run = |n| run_scheme(&QuantizationProblem::ode_mode(4.0, n, 1e-10).unwrap()).unwrap().0;
    let small = run(64);
    let large = run(128);
    let worst = (0..16)
        .map(|i| ((small.zeros()[i] - large.zeros()[i]) / large.zeros()[i]).abs())
        .fold(0.0, f64::max);
    eprintln!("max change of first 16 levels: {worst:e}");
    for (e, want) in large.zeros().iter().zip(QUARTIC_HALF_LINE) {
        eprintln!("N=128: {e} vs {want}: {:e}", (e - want) / want);
    }
    assert!(worst < 1e-6);
}

#[test]
fn cubic_mode_converges() {
    let problem = QuantizationProblem::ode_mode(3.0, 48, 1e-10).unwrap();
    let (product, report) = run_scheme(&problem).unwrap();
    assert!(report.converged, "{report:?}");
    assert!(product.zeros().windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn fixed_point_characterizations_agree() {
    use voros_core::quantizer::{quantization_residual, voros_step};
    let problem = QuantizationProblem::ode_mode(4.0, 64, 1e-10).unwrap();
    let (product, _) = run_scheme(&problem).unwrap();
    let phi = problem.rhs_offset();
    let step = voros_step(product.zeros(), &problem).unwrap();
    let moved = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| ((x - y) / x).abs()).fold(0.0, f64::max);
    assert!(quantization_residual(&product, &problem.rot, phi) <= 1e-9);
    assert!(moved(product.zeros(), &step) <= 1e-9);

    // and the converse: a perturbed sequence is neither
    let mut bent = product.zeros().to_vec();
    bent[2] *= 1.001;
    let bent_product = problem.product_for(&bent).unwrap();
    assert!(quantization_residual(&bent_product, &problem.rot, phi) > 1e-6);
    assert!(moved(&bent, &voros_step(&bent, &problem).unwrap()) > 1e-6);
}

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::files::{
    Provenance, SpectrumFile, TailRecord, VerificationReport, WitnessSummary, SCHEMA_VERSION, SIGN_CONVENTION,
};
use super::*;
use crate::oracle::{convention_map, D0Route, Direction, OdeProblem};
use crate::product::EntireProduct;
use crate::quantizer::{run_scheme, QuantizationProblem};
use crate::rotation::RotationParams;
use crate::specfun::*;

/// Seed of the random sample points used by `verify`.
const SAMPLE_SEED: u64 = 20_240_917;
const SAMPLE_POINTS: usize = 100;
/// Largest ray deviation still counted as "on the ray".
const RAY_TOL: f64 = 1e-6;
const ALPHA_MATCH: f64 = 1e-12;

type Outcome = Result<i32, CliError>;

pub(super) fn dispatch(command: Command, command_line: Vec<String>) -> Outcome {
    match command {
        Command::Quantize {
            m,
            alpha,
            levels,
            tol,
            max_iter,
            mode,
            out,
        } => quantize(m, alpha, levels, tol, max_iter, mode, &out, command_line),
        Command::Verify { input, window, report } => verify(&input, window, report.as_deref(), command_line),
        Command::Oracle {
            m,
            ell,
            count,
            lambda,
            what,
            internal,
        } => oracle(m, ell, count, lambda.as_deref(), what, internal),
        Command::Crosscheck { input, m, count, rtol } => crosscheck(&input, m, count, rtol),
        Command::Theorem1 {
            input,
            alpha,
            points,
            radius,
            out_csv,
        } => theorem1(&input, alpha, points, radius, out_csv),
    }
}

fn alpha_for(m: f64) -> Result<f64, CliError> {
    if !(m >= 2.0 && m.is_finite()) {
        return Err(CliError::Domain(format!("m = {m} must be at least 2")));
    }
    Ok(2.0 * PI / (m + 2.0))
}

#[allow(clippy::too_many_arguments)]
fn quantize(
    m: Option<f64>,
    alpha: Option<f64>,
    levels: usize,
    tol: f64,
    max_iter: usize,
    mode: Mode,
    out: &Path,
    command_line: Vec<String>,
) -> Outcome {
    let alpha = match (m, alpha) {
        (Some(m), None) => alpha_for(m)?,
        (None, Some(a)) => a,
        _ => return Err(CliError::Usage("give exactly one of --m and --alpha".into())),
    };
    let offset = match mode {
        Mode::Voros => 0.0,
        Mode::Ode => 0.5 * alpha,
    };
    let rot = RotationParams::new(alpha, offset)?;
    let mut problem = QuantizationProblem::new(rot, levels, tol)?;
    problem.max_iterations = max_iter;
    problem.validate()?;
    let (product, report) = run_scheme(&problem)?;
    let file = SpectrumFile {
        schema_version: SCHEMA_VERSION,
        alpha,
        phase_offset: offset,
        m,
        levels: product.zeros().to_vec(),
        tail: product.tail().map(TailRecord::from),
        residual: report.quantization_residual,
        iterations: report.iterations,
        converged: report.converged,
        provenance: Provenance::now(command_line),
    };
    file.save(out)?;
    println!(
        "{} after {} sweeps, quantization residual {:.3e}, E_1 = {}",
        if report.converged { "converged" } else { "NOT converged" },
        report.iterations,
        report.quantization_residual,
        file.levels[0]
    );
    Ok(if report.converged { EXIT_PASS } else { EXIT_NOT_CONVERGED })
}

fn random_points(radius: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..SAMPLE_POINTS)
        .map(|_| Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI)))
        .collect()
}

fn identity_clause(product: &EntireProduct, rot: &RotationParams, points: &[Complex64], which: Identity) -> Clause {
    let name = match which {
        Identity::UnitPhase => "identity_unit_phase",
        Identity::PhaseWeighted => "identity_phase_weighted",
    };
    let mut worst = (0.0, None);
    for &z in points {
        match identity_residual(product, rot, z, which) {
            Ok(r) if r > worst.0 || worst.1.is_none() => worst = (r.max(worst.0), Some(z)),
            Ok(_) => {}
            Err(_) => return Clause::judged(name, f64::INFINITY, 1e-8, points.len(), Some(z), false),
        }
    }
    Clause::judged(name, worst.0, 1e-8, points.len(), worst.1, worst.0 < 1e-8)
}

/// The two `D` routes compared where the composite one is well-conditioned,
/// i.e. `|C C| < 10 |D|`; elsewhere it only has absolute accuracy.
fn route_clause(product: &EntireProduct, rot: &RotationParams, points: &[Complex64]) -> Clause {
    let name = "d_routes_agree";
    let mut worst = (0.0, None);
    let mut checked = 0;
    for &z in points {
        let pair = (|| -> crate::Result<(Complex64, Complex64, Complex64)> {
            let a = stokes_d(product, rot, z, DRoute::Composite)?;
            let b = stokes_d(product, rot, z, DRoute::Direct)?;
            let cc = stokes_c(product, rot, rot.omega_pow(-1.0) * z, false)? * stokes_c(product, rot, rot.omega() * z, false)?;
            Ok((a, b, cc))
        })();
        let Ok((a, b, cc)) = pair else { continue };
        if cc.norm() < 10.0 * b.norm() {
            checked += 1;
            let gap = (a - b).norm() / b.norm();
            if gap > worst.0 || worst.1.is_none() {
                worst = (gap.max(worst.0), Some(z));
            }
        }
    }
    Clause::judged(name, worst.0, 1e-8, checked, worst.1, checked > 0 && worst.0 < 1e-8)
}

fn witness_radius(levels: &[f64], points: usize) -> f64 {
    // D vanishes at every level and once more in each gap
    let j = points.div_ceil(2).min(levels.len() - 1);
    match levels.get(j + 1) {
        Some(next) => levels[j] + 0.25 * (next - levels[j]),
        None => 1.05 * levels[j],
    }
}

fn witness_clause(w: &WitnessSummary) -> Clause {
    let mut worst = (0.0, None);
    let mut ok = !w.zeros.is_empty() && !w.one_points.is_empty();
    let zeros = w.zeros.iter().map(|r| (r, r.ray == 0));
    let ones = w.one_points.iter().map(|r| (r, r.ray != 0));
    for (r, right_ray) in zeros.chain(ones) {
        ok &= right_ray && r.deviation < RAY_TOL;
        if r.deviation > worst.0 || worst.1.is_none() {
            worst = (r.deviation.max(worst.0), Some(r.point));
        }
    }
    Clause::judged("witness_on_rays", worst.0, RAY_TOL, w.zeros.len() + w.one_points.len(), worst.1, ok)
}

fn verify(input: &Path, window: Option<f64>, report_path: Option<&Path>, command_line: Vec<String>) -> Outcome {
    let file = SpectrumFile::load(input)?;
    let product = file.product()?;
    let rot = file.rotation()?;
    let mut search = SearchWindow::for_product(&product);
    if let Some(r) = window {
        if !(r > 0.0 && r.is_finite()) {
            return Err(CliError::Domain(format!("window {r} must be positive")));
        }
        search.radius = r;
    }
    let proposition = verify_proposition(&product, &rot, &search)?;
    let mut clauses = proposition.clauses.clone();

    let c0 = stokes_c(&product, &rot, Complex64::new(0.0, 0.0), false)?;
    let exact = 2.0 * rot.phase_offset().cos();
    let gap = (c0 - exact).norm();
    clauses.push(Clause::judged("c_at_origin", gap, 1e-12, 1, Some(Complex64::new(0.0, 0.0)), gap <= 1e-12));

    let levels = product.zeros();
    let points = random_points(levels[7.min(levels.len() - 1)]);
    if rot.phase_offset() == 0.0 {
        clauses.push(identity_clause(&product, &rot, &points, Identity::UnitPhase));
    } else {
        clauses.push(Clause::skipped("identity_unit_phase", "needs a zero phase offset"));
    }
    clauses.push(identity_clause(&product, &rot, &points, Identity::PhaseWeighted));
    clauses.push(route_clause(&product, &rot, &points));

    let witness = if rot.alpha() <= PI / 3.0 + ALPHA_MATCH {
        let radius = witness_radius(levels, 10);
        let w = theorem1_witness(&product, &rot, &SearchWindow { radius, depth: 24 })?;
        let summary = WitnessSummary {
            radius,
            zeros: w.zeros,
            one_points: w.one_points,
        };
        clauses.push(witness_clause(&summary));
        Some(summary)
    } else {
        clauses.push(Clause::skipped("witness_on_rays", "alpha outside (0,π/3]"));
        None
    };

    let verdict = clauses.iter().all(Clause::passed);
    for c in &clauses {
        let tag = match &c.status {
            ClauseStatus::Pass => "PASS",
            ClauseStatus::Fail { .. } => "FAIL",
            ClauseStatus::Skipped { reason } => {
                println!("SKIP {:<32} {reason}", c.name);
                continue;
            }
        };
        println!("{tag} {:<32} worst {:.3e} (threshold {:.1e}, {} checked)", c.name, c.margin, c.threshold, c.checked);
    }
    println!("verdict: {}", if verdict { "pass" } else { "fail" });

    if let Some(path) = report_path {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            input: input.display().to_string(),
            sign_convention: SIGN_CONVENTION.into(),
            provenance: Provenance::now(command_line),
            window_radius: search.radius,
            sample_seed: SAMPLE_SEED,
            clauses,
            proposition,
            witness,
            verdict,
        }
        .save(path)?;
    }
    Ok(if verdict { EXIT_PASS } else { EXIT_TOLERANCE })
}

fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("cannot read '{text}' as re or re,im"));
    let mut parts = text.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(p) => p.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Shortest round-trip decimal, in exponent form when very large or small.
fn num(v: f64) -> String {
    // adding 0.0 turns the -0 left by sign flips into 0
    let v = v + 0.0;
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn write_spectrum(values: &[Complex64]) -> Result<(), CliError> {
    let mut w = csv_writer(std::io::stdout().lock());
    let io = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(["index", "re", "im", "method"]).map_err(io)?;
    for (i, z) in values.iter().enumerate() {
        w.write_record([(i + 1).to_string(), num(z.re), num(z.im), "oracle".into()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}

fn oracle(m: f64, ell: u8, count: Option<usize>, lambda: Option<&str>, what: What, internal: bool) -> Outcome {
    let problem = OdeProblem::new(m, ell)?;
    let to_shown = |z: Complex64, in_lambda: bool| {
        // print lambda values unless --internal asks for s
        if in_lambda == internal {
            convention_map(z, if in_lambda { Direction::LambdaToInternal } else { Direction::InternalToLambda })
        } else {
            z
        }
    };
    match what {
        What::Spectrum | What::Halfline => {
            let count = count.ok_or_else(|| CliError::Usage(format!("--what {what:?} needs --count")))?;
            if count == 0 {
                return Err(CliError::Domain("--count must be at least 1".into()));
            }
            let (set, in_lambda) = match what {
                What::Spectrum => (problem.pt_eigenvalues(1e5, count)?, true),
                _ => (problem.halfline_dirichlet_spectrum(count)?, false),
            };
            let shown: Vec<Complex64> = set.values.iter().map(|&z| to_shown(z, in_lambda)).collect();
            write_spectrum(&shown)?;
            if set.len() < count {
                eprintln!("voros: only {} of {count} values found", set.len());
                return Ok(EXIT_PARTIAL);
            }
            Ok(EXIT_PASS)
        }
        What::C0 | What::D0 | What::F => {
            let text = lambda.ok_or_else(|| CliError::Usage(format!("--what {what:?} needs --lambda")))?;
            let given = parse_complex(text)?;
            let lam = if internal {
                convention_map(given, Direction::InternalToLambda)
            } else {
                given
            };
            let value = match what {
                What::C0 => problem.stokes_c0(lam)?,
                What::D0 => {
                    let route = if m > 2.0 { D0Route::Determinant } else { D0Route::Wronskian };
                    problem.stokes_d0(lam, route)?
                }
                _ => problem.determinant_f(lam)?,
            };
            println!("{},{}", num(value.re), num(value.im));
            Ok(EXIT_PASS)
        }
    }
}

struct Comparison {
    name: &'static str,
    scheme: Vec<f64>,
    oracle: Vec<f64>,
}

/// Magnitudes of the first `count` real zeros of `func` on the negative axis.
fn negative_zeros(func: &SpectralFunction, radius: f64, count: usize) -> Result<Vec<f64>, CliError> {
    let set = real_zeros(func, -radius, 0.0, 20_000)?;
    let mut out: Vec<f64> = set.values.iter().map(|&z| convention_map(z, Direction::InternalToLambda).re).collect();
    out.sort_by(f64::total_cmp);
    out.truncate(count);
    Ok(out)
}

fn crosscheck(input: &Path, m: f64, count: usize, rtol: f64) -> Outcome {
    if count == 0 || !(rtol > 0.0) {
        return Err(CliError::Domain("--count must be at least 1 and --rtol positive".into()));
    }
    let alpha = alpha_for(m)?;
    let file = SpectrumFile::load(input)?;
    if (file.alpha - alpha).abs() > ALPHA_MATCH {
        return Err(CliError::Domain(format!("file alpha {} does not match m = {m} (alpha {alpha})", file.alpha)));
    }
    if (file.phase_offset - 0.5 * alpha).abs() > ALPHA_MATCH {
        return Err(CliError::Domain("file was not produced in ode mode".into()));
    }
    let product = file.product()?;
    let rot = file.rotation()?;
    let radius = SearchWindow::for_product(&product).radius;

    // the upper half of the levels is distorted by truncation
    let trusted = (file.levels.len() / 2).max(1);
    let half = count.min(trusted);
    let halfline = OdeProblem::new(m, 1)?.halfline_dirichlet_spectrum(half)?;
    let d_scheme = negative_zeros(&SpectralFunction::d(&product, rot, DRoute::Direct), radius, count)?;
    let c_scheme = negative_zeros(&SpectralFunction::c(&product, rot), radius, count)?;
    let comparisons = [
        Comparison {
            name: "levels_vs_halfline",
            scheme: file.levels[..half].to_vec(),
            oracle: halfline.reals(),
        },
        Comparison {
            name: "d_zeros_vs_ell2",
            scheme: d_scheme,
            oracle: OdeProblem::new(m, 2)?.pt_eigenvalues(radius, count)?.reals(),
        },
        Comparison {
            name: "c_zeros_vs_ell1",
            scheme: c_scheme,
            oracle: OdeProblem::new(m, 1)?.pt_eigenvalues(radius, count)?.reals(),
        },
    ];

    let mut w = csv_writer(std::io::stdout().lock());
    let io = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(["comparison", "index", "scheme", "oracle", "rel_delta"]).map_err(io)?;
    let (mut worst, mut partial) = (0.0f64, false);
    for c in &comparisons {
        let n = c.scheme.len().min(c.oracle.len());
        partial |= n < count;
        for i in 0..n {
            let delta = ((c.scheme[i] - c.oracle[i]) / c.oracle[i]).abs();
            worst = worst.max(delta);
            w.write_record([c.name.to_string(), (i + 1).to_string(), num(c.scheme[i]), num(c.oracle[i]), num(delta)])
                .map_err(io)?;
        }
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    eprintln!("worst relative delta {worst:.3e} (rtol {rtol:e}){}", if partial { ", partial comparison" } else { "" });
    Ok(if worst > rtol {
        EXIT_TOLERANCE
    } else if partial {
        EXIT_PARTIAL
    } else {
        EXIT_PASS
    })
}

fn theorem1(input: &Path, alpha: Option<f64>, points: usize, radius: Option<f64>, out_csv: Option<PathBuf>) -> Outcome {
    if points == 0 {
        return Err(CliError::Domain("--points must be at least 1".into()));
    }
    if let Some(r) = radius {
        if !(r > 0.0 && r.is_finite()) {
            return Err(CliError::Domain(format!("radius {r} must be positive")));
        }
    }
    let in_range = |a: f64| a > 0.0 && a <= PI / 3.0 + ALPHA_MATCH;
    if let Some(a) = alpha {
        if !in_range(a) {
            return Err(CliError::Domain(format!("alpha = {a} lies outside (0, pi/3]")));
        }
    }
    let file = SpectrumFile::load(input)?;
    if let Some(a) = alpha {
        if (a - file.alpha).abs() > ALPHA_MATCH {
            return Err(CliError::Domain(format!("alpha = {a} does not match the file's {}", file.alpha)));
        }
    }
    if !in_range(file.alpha) {
        return Err(CliError::Domain(format!("file alpha {} lies outside (0, pi/3]", file.alpha)));
    }
    let product = file.product()?;
    let rot = file.rotation()?;
    let radius = radius.unwrap_or_else(|| witness_radius(product.zeros(), points));
    let w = theorem1_witness(&product, &rot, &SearchWindow { radius, depth: 24 })?;

    let out: Box<dyn Write> = match &out_csv {
        Some(path) => Box::new(
            std::fs::File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut csv = csv_writer(out);
    let io = |e: csv::Error| CliError::Output(e.to_string());
    csv.write_record(["index", "kind", "re", "im", "ray", "deviation"]).map_err(io)?;
    let rows = w.zeros.iter().map(|r| ("zero", r)).chain(w.one_points.iter().map(|r| ("one", r)));
    for (i, (kind, r)) in rows.enumerate() {
        csv.write_record([
            (i + 1).to_string(),
            kind.to_string(),
            num(r.point.re),
            num(r.point.im),
            r.ray.to_string(),
            num(r.deviation),
        ])
        .map_err(io)?;
    }
    csv.flush().map_err(|e| CliError::Output(e.to_string()))?;

    let summary = WitnessSummary {
        radius,
        zeros: w.zeros,
        one_points: w.one_points,
    };
    if summary.zeros.is_empty() && summary.one_points.is_empty() {
        eprintln!("voros: warning: no zeros or 1-points within radius {radius}");
        return Ok(EXIT_PARTIAL);
    }
    let clause = witness_clause(&summary);
    eprintln!(
        "{} zeros, {} one-points within radius {radius:.4}; worst ray deviation {:.3e}",
        summary.zeros.len(),
        summary.one_points.len(),
        clause.margin
    );
    if !w.unresolved.is_empty() {
        eprintln!("voros: {} search boxes unresolved", w.unresolved.len());
        return Ok(EXIT_PARTIAL);
    }
    Ok(if clause.passed() { EXIT_PASS } else { EXIT_TOLERANCE })
}

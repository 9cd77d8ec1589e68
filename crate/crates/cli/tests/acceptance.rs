//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qschur::aed::{aed_step, AedConfig};
use qschur::eigvec::{full_eigenvectors, triangular_eigenvectors};
use qschur::oracle::{match_spectra, reference_quaternion_spectrum};
use qschur::qmat::{random_standardized_triangular, random_unit_quaternion};
use qschur::sylvester::{oracle_scalar, solve_scalar};
use qschur::{reorder_selected, schur_decompose, swap_adjacent, Error, MatrixClass, QMatrix, Quaternion, SchurOptions};
use qschur_cli::bench::{median, run_bench, BenchConfig, Strategy, CSV_HEADER, TIMING_COLUMNS};

const EPS: f64 = f64::EPSILON;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
    Quaternion::new(w, x, y, z)
}

fn worked_example() -> QMatrix {
    QMatrix::from_rows(&[
        vec![q(2.0, -1.0, -2.0, 0.0), q(-1.0, 1.0, 2.0, 0.0)],
        vec![q(2.0, -2.0, -2.0, 0.0), q(-1.0, 2.0, 2.0, 0.0)],
    ])
    .unwrap()
}

fn similarity_residual(t0: &QMatrix, q: &QMatrix, t: &QMatrix) -> f64 {
    q.adjoint_matmul(&t0.matmul(q).unwrap()).unwrap().sub(t).unwrap().frob_norm()
}

fn stability() -> Outcome {
    let tol = 1e-13;
    let cfg = BenchConfig {
        classes: vec![MatrixClass::FullRand, MatrixClass::HessRand],
        sizes: vec![32, 64, 128],
        strategies: vec![Strategy::Qr, Strategy::QrAed],
        trials: 5,
        seed: 1,
        ..BenchConfig::default()
    };
    let rows = run_bench(&cfg).expect("bench grid");
    let mut worst = [0.0f64; 3];
    let mut failures = 0;
    for r in &rows {
        let e = [r.e1, r.e2, r.e3].map(|x| x.unwrap_or(f64::INFINITY));
        for (w, v) in worst.iter_mut().zip(e) {
            *w = w.max(v);
        }
        if r.status.name() != "ok" || e.iter().any(|v| *v > tol) {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!(
            "{} cells, max e1 = {:.2e}, e2 = {:.2e}, e3 = {:.2e} (limit {tol:.0e}), {failures} failing",
            rows.len(),
            worst[0],
            worst[1],
            worst[2]
        ),
    )
}

fn aed_effectiveness() -> Outcome {
    let ratio = |n: usize| -> f64 {
        let cfg = BenchConfig {
            sizes: vec![n],
            trials: 5,
            seed: 1,
            eigvec: false,
            ..BenchConfig::default()
        };
        let rows = run_bench(&cfg).expect("bench grid");
        let sweeps = |s: Strategy| median(&rows.iter().filter(|r| r.strategy == s).map(|r| r.sweeps as f64).collect::<Vec<_>>()).unwrap();
        sweeps(Strategy::QrAed) / sweeps(Strategy::Qr)
    };
    let (r256, r128) = (ratio(256), ratio(128));
    outcome(
        r256 <= 0.75 && r128 <= 0.85,
        format!("median sweep ratio AED/QR: n=256 {r256:.3} (limit 0.75), n=128 {r128:.3} (limit 0.85)"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for i in 0..100u64 {
        let class = if i % 2 == 0 { MatrixClass::FullRand } else { MatrixClass::HessRand };
        let n = 1 + (i as usize / 2) % 8;
        let a = class.generate(n, 1000 + i).unwrap();
        let s = schur_decompose(&a, &SchurOptions::default());
        let r = reference_quaternion_spectrum(&a);
        match (s, r) {
            (Ok(s), Ok(r)) => worst = worst.max(match_spectra(&s.eigenvalues(), &r.values).unwrap().max_distance),
            _ => errors += 1,
        }
    }
    outcome(
        errors == 0 && worst <= 1e-10,
        format!("100 matrices n<=8, max assignment distance {worst:.2e} (limit 1e-10), {errors} solver errors"),
    )
}

fn sylvester_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 10_000 {
        let a = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let b = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let g = random_unit_quaternion(&mut rng) * rng.random_range(0.1..3.0);
        let Ok(x) = solve_scalar(a, b, g) else { continue };
        let o = oracle_scalar(Quaternion::from_complex(a), Quaternion::from_complex(b), g).expect("oracle");
        worst = worst.max((x - o).abs() / x.abs());
        count += 1;
    }
    let deg = [
        (Complex64::new(1.0, 2.0), Complex64::new(1.0, 2.0)),
        (Complex64::new(1.0, 2.0), Complex64::new(1.0, -2.0)),
        (Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)),
        (Complex64::new(-3.0, 0.0), Complex64::new(-3.0, 0.0)),
    ];
    let degenerate_ok = deg.iter().all(|&(a, b)| {
        matches!(solve_scalar(a, b, Quaternion::J), Err(Error::SameSimilarityClass { .. }))
            && matches!(
                oracle_scalar(Quaternion::from_complex(a), Quaternion::from_complex(b), Quaternion::J),
                Err(Error::SameSimilarityClass { .. })
            )
    });
    outcome(
        worst <= 1e-13 && degenerate_ok,
        format!("10^4 pairs, max relative difference {worst:.2e} (limit 1e-13); degenerate inputs rejected on both paths: {degenerate_ok}"),
    )
}

fn sorted_diag(t: &QMatrix) -> Vec<[u64; 4]> {
    let mut d: Vec<[u64; 4]> = t.diagonal().iter().map(|x| x.components().map(f64::to_bits)).collect();
    d.sort();
    d
}

fn reorder_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    let (mut worst_sim, mut worst_orth): (f64, f64) = (0.0, 0.0);
    for trial in 0..1000u64 {
        let n = rng.random_range(2..=16usize);
        let mut t0 = random_standardized_triangular(n, trial);
        if trial % 10 == 0 {
            // repeated eigenvalue
            let d = t0[(0, 0)];
            t0[(n - 1, n - 1)] = d;
        }
        let mask: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let mut t = t0.clone();
        let mut qm = QMatrix::identity(n);
        let ok = reorder_selected(&mut t, &mut qm, &mask).is_ok();
        let nf = n as f64;
        let sim = similarity_residual(&t0, &qm, &t) / (nf * EPS * t0.frob_norm());
        let orth = qm.orthogonality_defect() / (nf * EPS);
        worst_sim = worst_sim.max(sim);
        worst_orth = worst_orth.max(orth);
        if !ok || sorted_diag(&t) != sorted_diag(&t0) || !t.is_upper_triangular() || sim > 100.0 || orth > 100.0 {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!(
            "1000 trials, max similarity residual {worst_sim:.1}·nε‖T‖ and orthogonality drift {worst_orth:.1}·nε (limit 100), {failures} failing"
        ),
    )
}

fn eigenvector_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for trial in 0..200u64 {
        let n = 1 + (trial as usize * 13) % 64;
        let t = random_standardized_triangular(n, 9000 + trial);
        match triangular_eigenvectors(&t).and_then(|es| es.residual_bound_ratio(&t)) {
            Ok(r) => {
                worst = worst.max(r);
                if r > 1.0 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let a = worked_example();
    let s = schur_decompose(&a, &SchurOptions::default()).unwrap();
    let es = triangular_eigenvectors(&s.t).unwrap();
    let x = full_eigenvectors(&s.u, &es).unwrap();
    let mut pair_res: f64 = 0.0;
    for k in 0..2 {
        let l = Quaternion::from_complex(es.lambdas[k]);
        let xk = x.col(k);
        let r: Vec<Quaternion> = (0..2)
            .map(|i| (0..2).map(|j| a[(i, j)] * xk[j]).sum::<Quaternion>() - xk[i] * l)
            .collect();
        pair_res = pair_res.max(qschur::quat::vec_norm(&r) / qschur::quat::vec_norm(xk));
    }
    let spectrum_ok = match_spectra(&es.lambdas, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)])
        .map(|m| m.max_distance <= 1e-13)
        .unwrap_or(false);
    outcome(
        failures == 0 && pair_res <= 1e-14 && spectrum_ok,
        format!(
            "200 triangular T (n<=64), worst residual/bound {worst:.3} (limit 1); 2x2 example λ = {{1, i}}: {spectrum_ok}, residual {pair_res:.1e} (limit 1e-14)"
        ),
    )
}

fn strip_timing(csv_text: &str) -> Vec<Vec<String>> {
    let drop: Vec<usize> = TIMING_COLUMNS.iter().map(|c| CSV_HEADER.iter().position(|h| h == c).unwrap()).collect();
    csv_text
        .lines()
        .map(|l| l.split(',').enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, f)| f.to_string()).collect())
        .collect()
}

fn determinism() -> Outcome {
    let run = || -> Option<String> {
        let out = Command::new(env!("CARGO_BIN_EXE_qschur"))
            .args([
                "bench", "--class", "fullrand,hessrand", "--sizes", "16,40", "--strategies", "qr,qr+aed", "--trials", "2", "--seed", "77",
            ])
            .output()
            .ok()?;
        out.status.success().then(|| String::from_utf8(out.stdout).ok()).flatten()
    };
    match (run(), run()) {
        (Some(a), Some(b)) => {
            let (ra, rb) = (strip_timing(&a), strip_timing(&b));
            let same = ra == rb && ra.len() == 17;
            outcome(same, format!("two CLI runs, {} data rows, non-timing columns identical: {same}", ra.len().saturating_sub(1)))
        }
        _ => outcome(false, "CLI run failed".into()),
    }
}

fn check_schur(a: &QMatrix, opts: &SchurOptions) -> Result<(), String> {
    let s = schur_decompose(a, opts).map_err(|e| e.to_string())?;
    let n = a.nrows() as f64;
    let standardized = s.t.diagonal().iter().all(|d| d.is_complex() && d.x >= 0.0);
    let e1 = s.u.orthogonality_defect() / n.sqrt();
    let e2 = similarity_residual(a, &s.u, &s.t) / a.frob_norm().max(f64::MIN_POSITIVE);
    if !s.t.is_upper_triangular() || !standardized || e1 > 100.0 * n * EPS || e2 > 100.0 * n * EPS {
        return Err(format!("invariants violated (e1 {e1:.1e}, e2 {e2:.1e})"));
    }
    Ok(())
}

fn degenerate_inputs() -> Outcome {
    let mut problems: Vec<String> = Vec::new();
    let mut cases: Vec<(&str, QMatrix)> = vec![
        ("n=1 real", QMatrix::diag(&[Quaternion::real(3.0)])),
        ("n=1 quaternion", QMatrix::diag(&[q(1.0, -2.0, 0.5, 1.0)])),
        ("n=2 example", worked_example()),
        ("n=2 zero", QMatrix::zeros(2, 2)),
        ("n=2 random", MatrixClass::FullRand.generate(2, 3).unwrap()),
    ];
    let mut tri = random_standardized_triangular(14, 1);
    tri[(3, 3)] = q(0.5, 0.0, 1.0, 2.0);
    cases.push(("triangular n=14", tri));
    let d = q(1.0, 0.5, -0.5, 0.25);
    let mut eq = MatrixClass::HessRand.generate(13, 2).unwrap();
    for k in 0..13 {
        eq[(k, k)] = d;
    }
    cases.push(("equal diagonal n=13", eq));
    cases.push(("identity n=20", QMatrix::identity(20)));
    cases.push(("scalar multiple n=16", QMatrix::diag(&vec![d; 16])));

    for (name, a) in &cases {
        for opts in [SchurOptions::default(), SchurOptions::with_aed()] {
            if let Err(e) = check_schur(a, &opts) {
                problems.push(format!("schur {name} (aed {}): {e}", opts.use_aed));
            }
        }
        let n = a.nrows();
        let s = schur_decompose(a, &SchurOptions::default()).unwrap();
        let (mut t, mut u) = (s.t.clone(), s.u.clone());
        for k in 0..n.saturating_sub(1) {
            if let Err(e) = swap_adjacent(&mut t, &mut u, k) {
                problems.push(format!("swap {name} k={k}: {e}"));
            }
        }
        if !t.is_upper_triangular() || sorted_diag(&t) != sorted_diag(&s.t) {
            problems.push(format!("swap {name}: structure"));
        }
        let (h, _) = qschur::hessenberg_reduce(a).unwrap();
        let mut h2 = h.clone();
        let mut u2 = QMatrix::identity(n);
        match aed_step(&mut h2, &mut u2, 0, n - 1, &AedConfig::default()) {
            Ok(out) => {
                let r = similarity_residual(&h, &u2, &h2) / h.frob_norm().max(f64::MIN_POSITIVE);
                if !h2.is_upper_hessenberg() || out.n_deflated + out.n_undeflatable != out.n_win || r > 100.0 * n as f64 * EPS {
                    problems.push(format!("aed {name}: invariants"));
                }
            }
            Err(e) => problems.push(format!("aed {name}: {e}")),
        }
    }
    let pass = problems.is_empty();
    let detail = if pass {
        format!("{} degenerate inputs through schur (QR and AED), swap_adjacent and aed_step", cases.len())
    } else {
        problems.join("; ")
    };
    outcome(pass, detail)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("stability", stability),
        ("aed effectiveness", aed_effectiveness),
        ("oracle spectrum equivalence", oracle_equivalence),
        ("sylvester cross-validation", sylvester_cross_validation),
        ("swap/reorder properties", reorder_suite),
        ("eigenvectors", eigenvector_suite),
        ("determinism", determinism),
        ("degenerate inputs", degenerate_inputs),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {} ({secs:.1}s)", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

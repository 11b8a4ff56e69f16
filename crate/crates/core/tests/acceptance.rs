//! Acceptance suite. Runs every criterion at its pinned tolerance and prints
//! one PASS/FAIL line each. Criterion 1 is a known failure (see
//! `KNOWN_FAILURES`); the binary exits nonzero if any other criterion fails or
//! if criterion 1 fails for a reason other than the characterized one.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use exclusion_core::cfs::cfs_lhs;
use exclusion_core::experiments::{
    run_2d_gap, run_equivalence_3x3, run_family_theorem_scan, trine, write_report,
    EquivalenceReport, ExperimentConfig, GridSpec,
};
use exclusion_core::family::{
    build_family_povm, excluded_state_b, excluded_state_c, j3_worst_case, verify_square_identity,
    FamilyParams,
};
use exclusion_core::linalg::random::ginibre;
use exclusion_core::linalg::{
    haar_random_state_with, haar_random_unitary, qr_orthonormalize, seeded_rng, CMatrix,
    HermitianOperator, PureState,
};
use exclusion_core::qcqp::{
    enumerate_assignments, frame_gradient, frame_objective, min_over_assignments, FrameAssignment,
    QcqpConfig,
};
use exclusion_core::sdp::{
    dual_residual, solve_exclusion_sdp, validate_povm, ExclusionInstance, SolverConfig, StateSpec,
};
use exclusion_core::EPS_ZERO;

const SEED: u64 = 2024;
const KNOWN_FAILURES: &[u32] = &[1];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &str, pass: bool, detail: String) -> Outcome {
    println!(
        "{} criterion {id} ({name}): {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    Outcome { id, pass, detail }
}

fn criterion_1() -> (Outcome, bool) {
    let start = Instant::now();
    let r =
        run_equivalence_3x3(10_000, SEED, &ExperimentConfig::default()).expect("equivalence run");
    let n = r.disagreements.len();
    let detail = format!(
        "{} trials, agree {}, boundary band {} (|lhs - 1| <= {:e}), disagreements {n}, {:.0?}",
        r.trials,
        r.agree,
        r.boundary_band,
        r.band_halfwidth,
        start.elapsed()
    );
    let out = report(1, "three-way equivalence in C^3", n == 0, detail);
    if n > 0 {
        print_disagreements(&r);
    }
    (out, characterized(&r))
}

fn print_disagreements(r: &EquivalenceReport) {
    let d = &r.diagnostics;
    println!(
        "    |lhs - 1| over disagreements in [{:.3e}, {:.3e}]; SDP and QCQP agree against CFS in {}; \
         sdp_not_optimal {}, sdp_undecided {}, proj_not_converged {}",
        d.min_disagreement_distance.unwrap_or(0.0),
        d.max_disagreement_distance,
        d.solvers_agree_against_cfs,
        d.sdp_not_optimal,
        d.sdp_undecided,
        d.proj_not_converged
    );
    for t in &r.disagreements {
        let sdp = t.sdp.as_ref();
        let proj = t.proj.as_ref();
        println!(
            "    trial {:>5}: lhs - 1 = {:.3e}, cfs {}, sdp {:?} (primal {:.2e}), proj {:?} (min {:.2e})",
            t.trial,
            t.cfs.lhs - 1.0,
            t.cfs.excludable,
            sdp.and_then(|s| s.verdict),
            sdp.map_or(f64::NAN, |s| s.primal_value),
            proj.and_then(|p| p.verdict),
            proj.map_or(f64::NAN, |p| p.value),
        );
    }
    // The exclusion value grows only quadratically in the distance to the CFS
    // surface, so a band scaled to sqrt(eps_zero) absorbs every disagreement.
    let wide = (r.config.eps_zero).sqrt() * 10.0;
    let outside = r
        .disagreements
        .iter()
        .filter(|t| (t.cfs.lhs - 1.0).abs() > wide)
        .count();
    println!("    info: disagreements outside |lhs - 1| <= {wide:.2e}: {outside}");
}

/// True when every disagreement is a triple just outside the CFS surface that
/// the SDP nevertheless excludes below eps_zero, with all solvers decided.
fn characterized(r: &EquivalenceReport) -> bool {
    r.diagnostics.sdp_undecided == 0
        && r.disagreements.iter().all(|t| {
            let sdp = t.sdp.as_ref().expect("sdp ran");
            !t.cfs.excludable
                && t.cfs.lhs - 1.0 < 1e-2
                && sdp.verdict == Some(true)
                && sdp.primal_value <= r.config.eps_zero
                && t.proj.as_ref().is_some_and(|p| p.verdict.is_some())
        })
}

fn criterion_2() -> Outcome {
    let lhs = cfs_lhs(0.5, 0.5, 0.5).unwrap();
    let excludable = exclusion_core::cfs::cfs_from_overlaps(
        exclusion_core::linalg::Overlaps {
            j1: 0.5,
            j2: 0.5,
            j3: 0.5,
        },
        EPS_ZERO,
    )
    .unwrap()
    .excludable;
    let strict = exclusion_core::cfs::cfs_from_overlaps(
        exclusion_core::linalg::Overlaps {
            j1: 0.5,
            j2: 0.5,
            j3: 0.5,
        },
        0.0,
    )
    .unwrap()
    .excludable;
    report(
        2,
        "CFS boundary semantics",
        lhs == 1.0 && excludable && strict,
        format!("lhs(1/2, 1/2, 1/2) = {lhs:?}, excludable {excludable} (at eps 0: {strict})"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = seeded_rng(SEED ^ 3);
    let cfg = SolverConfig::default();
    let (mut worst_gap, mut worst_res, mut failures) = (f64::NEG_INFINITY, 0.0f64, 0);
    for _ in 0..1000 {
        let n = rng.random_range(2..=4usize);
        let dim = rng.random_range(2..=4usize);
        let states: Vec<StateSpec> = (0..n)
            .map(|_| StateSpec::Pure(haar_random_state_with(dim, &mut rng).unwrap()))
            .collect();
        let weights = if rng.random_bool(0.5) {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
            let s: f64 = w.iter().sum();
            Some(w.iter().map(|x| x / s).collect())
        } else {
            None
        };
        let instance = ExclusionInstance::new(states, weights).unwrap();
        let sol = solve_exclusion_sdp(&instance, &cfg).unwrap();
        let gap = sol.dual_value - sol.primal_value;
        let res = dual_residual(&sol.dual_certificate, &instance.costs());
        let trace_ok = (sol.dual_certificate.trace() - sol.dual_value).abs() <= 1e-12;
        worst_gap = worst_gap.max(gap);
        worst_res = worst_res.max(res);
        failures += usize::from(gap > 1e-9 || res > 1e-8 || !trace_ok);
    }

    // Trine: solver value plus an independent check of the anti-trine POVM.
    let states = trine();
    let sol = solve_exclusion_sdp(&ExclusionInstance::pure(states.clone()).unwrap(), &cfg).unwrap();
    let (completeness, min_eig, objective) = anti_trine_check();
    let pass = failures == 0
        && sol.primal_value <= 1e-8
        && completeness <= 1e-15
        && min_eig >= -1e-15
        && objective.abs() <= 1e-15;
    report(
        3,
        "SDP certificate soundness",
        pass,
        format!(
            "1000 instances: max (dual - primal) {worst_gap:.2e}, max dual residual {worst_res:.2e}, failures {failures}; \
             trine primal {:.2e}; anti-trine completeness {completeness:.1e}, min eig {min_eig:.1e}, objective {objective:.1e}",
            sol.primal_value
        ),
    )
}

/// Anti-trine POVM Mₖ = (2/3)|ψₖ⊥⟩⟨ψₖ⊥| in plain real 2×2 arithmetic.
fn anti_trine_check() -> (f64, f64, f64) {
    let mut sum = [[0.0f64; 2]; 2];
    let (mut min_eig, mut objective) = (f64::INFINITY, 0.0);
    for k in 0..3 {
        let t = 2.0 * PI * k as f64 / 3.0;
        let psi = [t.cos(), t.sin()];
        let perp = [-t.sin(), t.cos()];
        let m = [
            [perp[0] * perp[0], perp[0] * perp[1]],
            [perp[1] * perp[0], perp[1] * perp[1]],
        ]
        .map(|row| row.map(|v| v * 2.0 / 3.0));
        // Eigenvalues of a symmetric 2×2 matrix.
        let (tr, det) = (m[0][0] + m[1][1], m[0][0] * m[1][1] - m[0][1] * m[1][0]);
        min_eig = min_eig.min(0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt()));
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += m[i][j];
                objective += psi[i] * m[i][j] * psi[j] / 3.0;
            }
        }
    }
    let completeness = (sum[0][0] - 1.0)
        .abs()
        .max((sum[1][1] - 1.0).abs())
        .max(sum[0][1].abs())
        .max(sum[1][0].abs());
    (completeness, min_eig, objective)
}

fn criterion_4() -> Outcome {
    let count = enumerate_assignments(3, 3).unwrap().len();

    let mut rng = seeded_rng(SEED ^ 4);
    let h = 1e-5;
    let (mut worst_rel, mut worst_const, mut n_const) = (0.0f64, 0.0f64, 0);
    let mut n_rel = 0;
    while n_rel < 100 {
        let states: Vec<PureState> = (0..3)
            .map(|_| haar_random_state_with(3, &mut rng).unwrap())
            .collect();
        let mut ix: Vec<usize> = (0..3).map(|_| rng.random_range(0..3)).collect();
        ix.sort_unstable();
        // One state in every slot makes the objective identically 1 and the
        // derivative exactly zero; those draws are checked absolutely.
        let constant = ix.iter().all(|&i| i == ix[0]);
        if constant {
            n_const += 1;
        } else {
            n_rel += 1;
        }
        let a = FrameAssignment::new(ix, 3).unwrap();
        let v = haar_random_unitary(3, &mut rng);
        let grad =
            CMatrix::from_columns(&frame_gradient(&states, &a, &v.columns()).unwrap()).unwrap();
        let g = ginibre(3, 3, &mut rng);
        let omega = (&g - &g.adjoint()).scale(0.5);
        // Central difference along t ↦ qr(V(I + tΩ)), whose velocity at 0 is VΩ.
        let curve = |t: f64| {
            let q = qr_orthonormalize(&(&v * &(&CMatrix::identity(3) + &omega.scale(t)))).unwrap();
            frame_objective(&states, &a, &q.columns()).unwrap()
        };
        let fd = (curve(h) - curve(-h)) / (2.0 * h);
        let analytic = grad.real_inner(&(&v * &omega));
        if constant {
            worst_const = worst_const.max(fd.abs()).max(analytic.abs());
        } else {
            worst_rel = worst_rel.max((fd - analytic).abs() / analytic.abs());
        }
    }

    let psi = haar_random_state_with(3, &mut rng).unwrap();
    let same = vec![psi.clone(), psi.clone(), psi];
    let identical = min_over_assignments(
        &same,
        &QcqpConfig {
            analytic_shortcut: false,
            ..QcqpConfig::default()
        },
    )
    .unwrap()
    .value;

    report(
        4,
        "QCQP machinery",
        count == 10 && worst_rel <= 1e-5 && worst_const <= 1e-9 && (identical - 1.0).abs() <= 1e-8,
        format!(
            "enumerate_assignments(3, 3) = {count}; max relative FD error {worst_rel:.2e} over 100 triples \
             (plus {n_const} constant-objective draws, max |derivative| {worst_const:.1e}); \
             identical triple minimum {identical:.12}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let scan = run_family_theorem_scan(&GridSpec::default()).unwrap();
    let scan_ok = scan.max_f <= 1.0 + 1e-9 && scan.nan_count == 0;

    let mut rng = seeded_rng(SEED ^ 5);
    let mut worst_residual = 0.0f64;
    for _ in 0..10_000 {
        let x = rng.random_range(0.01..0.99);
        let r = 10f64.powf(rng.random_range(-2.0..2.0));
        let p = FamilyParams::new(x, r, 0.0).unwrap();
        let b1 = rng.random_range(0.001..0.999) * p.b1_bound();
        let c1 = rng.random_range(0.001..0.999) * p.c1_bound();
        worst_residual =
            worst_residual.max(verify_square_identity(x, r, b1, c1).unwrap().residual());
    }

    // The x = 0.3 bounds are the tighter ones, so the samples are valid at both x.
    let (mut worst_square, mut x_dependent) = (0.0f64, 0);
    let samples = 10_000;
    for _ in 0..samples {
        let r = 10f64.powf(rng.random_range(-2.0..2.0));
        let p = FamilyParams::new(0.3, r, 0.0).unwrap();
        let b1 = rng.random_range(0.001..0.999) * p.b1_bound();
        let c1 = rng.random_range(0.001..0.999) * p.c1_bound();
        let lo = verify_square_identity(0.3, r, b1, c1).unwrap();
        let hi = verify_square_identity(0.7, r, b1, c1).unwrap();
        worst_square = worst_square.max(
            (lo.square - hi.square).abs()
                / lo.square.abs().max(hi.square.abs()).max(f64::MIN_POSITIVE),
        );
        x_dependent += usize::from((lo.gap() - hi.gap()).abs() > 1e-3);
    }
    let fraction = x_dependent as f64 / samples as f64;

    report(
        5,
        "family theorem scan",
        scan_ok && worst_residual <= 1e-9 && worst_square <= 1e-9 && fraction >= 0.9,
        format!(
            "{} grid points, max f {:.16} at x={:.3}, r={:.3}, violations {}, NaN {} ({:.1?}); \
             max square-identity residual {worst_residual:.2e}; x = 0.3 vs 0.7: square rel diff {worst_square:.2e}, \
             gap differs by > 1e-3 on {:.1}%",
            scan.points,
            scan.max_f,
            scan.argmax.x,
            scan.argmax.r,
            scan.violations,
            scan.nan_count,
            start.elapsed(),
            100.0 * fraction
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = seeded_rng(SEED ^ 6);
    let (mut worst_complete, mut worst_min_eig, mut worst_kernel, mut worst_excess) =
        (0.0f64, f64::INFINITY, 0.0f64, f64::NEG_INFINITY);
    let mut bad_ranks = 0;
    for _ in 0..1000 {
        let p = FamilyParams::new(
            rng.random_range(0.001..0.999),
            10f64.powf(rng.random_range(-2.0..2.0)),
            rng.random_range(0.0..TAU),
        )
        .unwrap();
        let povm = build_family_povm(&p);
        let v = validate_povm(&povm);
        worst_complete = worst_complete.max(v.completeness_residual);
        worst_min_eig = v
            .min_eigenvalues
            .iter()
            .copied()
            .fold(worst_min_eig, f64::min);
        bad_ranks += usize::from(!v.valid || v.ranks != [2, 1, 1]);

        let b1 = rng.random_range(0.0..1.0) * p.b1_bound();
        let c1 = rng.random_range(0.0..1.0) * p.c1_bound();
        let j3 = j3_worst_case(&p, b1, c1).unwrap();
        for k in 0..100 {
            let b = excluded_state_b(&p, b1, rng.random_range(0.0..TAU)).unwrap();
            let c = excluded_state_c(&p, c1, rng.random_range(0.0..TAU)).unwrap();
            if k == 0 {
                worst_kernel = worst_kernel
                    .max(kernel(&povm.elements[1], &b))
                    .max(kernel(&povm.elements[2], &c));
            }
            worst_excess = worst_excess.max(b.inner(&c).norm() - j3);
        }
    }
    report(
        6,
        "family construction",
        worst_complete <= 1e-9 && worst_min_eig >= -1e-9 && bad_ranks == 0 && worst_kernel <= 1e-10 && worst_excess <= 1e-12,
        format!(
            "1000 members: max completeness residual {worst_complete:.2e}, min eigenvalue {worst_min_eig:.2e}, \
             rank pattern failures {bad_ranks}, max kernel residual {worst_kernel:.2e}, max |<b|c>| - j3 {worst_excess:.2e}"
        ),
    )
}

fn kernel(m: &HermitianOperator, s: &PureState) -> f64 {
    m.matrix().mul_vec(s.vec()).norm()
}

fn criterion_7() -> Outcome {
    let cfg = ExperimentConfig::default();
    let r = run_2d_gap(1000, SEED, &cfg).unwrap();
    let proj_min = r
        .trine
        .proj
        .per_assignment
        .iter()
        .map(|a| a.objective)
        .fold(f64::INFINITY, f64::min);
    report(
        7,
        "2D separation",
        r.trine.sdp.primal_value <= 1e-8 && proj_min > 0.1 && r.pair_agree == r.pair_trials && r.pair_trials == 1000,
        format!(
            "trine SDP {:.2e}, trine projective min {proj_min:.6} over {} assignments; pairs agree {}/{} ({} excludable); \
             triples povm_only {}, both {}, neither {}, projection_only {}",
            r.trine.sdp.primal_value,
            r.trine.proj.per_assignment.len(),
            r.pair_agree,
            r.pair_trials,
            r.pair_excludable,
            r.povm_only,
            r.both,
            r.neither,
            r.projection_only
        ),
    )
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::default();
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let e = run_equivalence_3x3(40, 9, &cfg).unwrap();
            write_report(
                &dir.path().join(format!("equiv3x3-{threads}")),
                &e,
                &e.records,
            )
            .unwrap();
            let g = run_2d_gap(20, 9, &cfg).unwrap();
            write_report(&dir.path().join(format!("gap2d-{threads}")), &g, &g.records).unwrap();
            let f = run_family_theorem_scan(&GridSpec::with_points(8)).unwrap();
            write_report(
                &dir.path().join(format!("familyscan-{threads}")),
                &f,
                &f.records,
            )
            .unwrap();
        });
    }
    for name in ["equiv3x3", "gap2d", "familyscan"] {
        for file in ["summary.json", "instances.jsonl"] {
            let a = fs::read(dir.path().join(format!("{name}-1")).join(file)).unwrap();
            let b = fs::read(dir.path().join(format!("{name}-3")).join(file)).unwrap();
            compared += 1;
            if a != b {
                mismatched.push(format!("{name}/{file}"));
            }
        }
    }
    report(
        8,
        "determinism",
        mismatched.is_empty(),
        format!("{compared} report files rerun on 1 and 3 threads, mismatched {mismatched:?}"),
    )
}

fn main() -> ExitCode {
    let (first, characterized) = criterion_1();
    let outcomes = vec![
        first,
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());

    let mut ok = true;
    for o in outcomes.iter().filter(|o| !o.pass) {
        if KNOWN_FAILURES.contains(&o.id) && characterized {
            println!("known failure: criterion {} ({})", o.id, o.detail);
        } else {
            println!("unexpected failure: criterion {}", o.id);
            ok = false;
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

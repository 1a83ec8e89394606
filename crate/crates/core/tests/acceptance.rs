//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p bellman-riesz --test acceptance -- --nocapture`.

use std::fmt::Write as _;
use std::time::Instant;

use bellman_riesz::bellman::{critical_a, eval_component, AuxValues, Component, CriticalA, QContext};
use bellman_riesz::estimates::{
    embedding_with_q2, representation_check, riesz_norm_with_q2, sweep_report, WeightFamily, TRUNCATION_LADDER,
};
use bellman_riesz::gauss::inequalities::{
    default_test_forms, default_test_functions, default_test_weights, semigroup_suite, validate_heat_spectrum,
    validate_poisson_spectrum,
};
use bellman_riesz::gauss::{
    q2_characteristic, truncate_weight, FlowGrid, HermiteFunction, MehlerKernel, OneForm, WeightSpec,
};
use bellman_riesz::report::VerificationReport;
use bellman_riesz::verify::{run_suite, sample_domain, SuiteConfig, VerdictRecording};

const QS: [f64; 4] = [1.0, 2.0, 10.0, 100.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bellman_report() -> VerificationReport {
    let cfg = SuiteConfig {
        q_list: QS.to_vec(),
        samples_per_q: 100_000,
        directions_per_point: 64,
        pi_exclusion: 1e-3,
        aux_grid: 200,
        mollify_points: 0,
        record_verdicts: VerdictRecording::FailuresOnly,
        ..SuiteConfig::default()
    };
    run_suite(&cfg).expect("suite runs")
}

fn per_q(report: &VerificationReport, names: &[&str], min_count: u64) -> Outcome {
    let mut pass = true;
    let mut detail = String::new();
    for q in QS {
        for name in names {
            let c = report.check_at(name, q).expect("check present");
            let evaluated = c.count - c.skipped;
            pass &= c.failures == 0 && c.count >= min_count;
            let _ = write!(
                detail,
                "Q={q} {name}: {} checked, {} skipped, {} violations, worst margin {:.3e}; ",
                evaluated,
                c.skipped,
                c.failures,
                c.worst_margin.unwrap_or(f64::NAN)
            );
        }
    }
    outcome(pass, detail)
}

/// `β(a) = ζ²/(r + aK/Q) + ν²/(s + K/(aQ))`.
fn beta(log_a: f64, zeta: f64, nu: f64, r: f64, s: f64, kq: f64) -> f64 {
    let a = log_a.exp();
    zeta * zeta / (r + a * kq) + nu * nu / (s + kq / a)
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2).max(f(lo)).max(f(hi))
}

fn criterion_5() -> Outcome {
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    let mut seed = 500u64;
    while checked < 10_000 {
        for q in [2.0, 10.0, 100.0] {
            let ctx = QContext::scalar(q).unwrap();
            for p in sample_domain(&ctx, 1000, seed).unwrap() {
                if !matches!(critical_a(&p, &ctx).unwrap(), CriticalA::Finite(_)) || checked >= 10_000 {
                    continue;
                }
                let kq = AuxValues::at(p.r, p.s, q).k / q;
                let zeta = p.zeta.abs();
                let nu = p.nu();
                let best = golden_max(-16.0 * std::f64::consts::LN_10, 16.0 * std::f64::consts::LN_10, |la| {
                    beta(la, zeta, nu, p.r, p.s, kq)
                });
                let oracle = p.z + p.h - best;
                let closed = eval_component(Component::B43, &p, &ctx).unwrap();
                worst = worst.max((oracle - closed).abs());
                checked += 1;
            }
            seed += 1;
        }
    }
    outcome(
        worst <= 1e-8,
        format!("{checked} points with finite a_m, max |closed form - golden section| = {worst:.3e}"),
    )
}

fn criterion_6() -> Outcome {
    let kernel = MehlerKernel::new(40, 343).unwrap();
    let heat = validate_heat_spectrum(&kernel, 12, &[0.1, 1.0], 1e-8).unwrap();
    let poisson = validate_poisson_spectrum(&kernel, 12, &[0.25, 1.0, 4.0], 1e-6).unwrap();
    let err = |c: &bellman_riesz::report::Check, tol: f64| tol - c.worst_margin.unwrap_or(f64::NAN);
    outcome(
        heat.passed() && poisson.passed(),
        format!(
            "heat n<=12: max coefficient error {:.3e} (tol 1e-8); Poisson n<=12: max error {:.3e} (tol 1e-6)",
            err(&heat, 1e-8),
            err(&poisson, 1e-6)
        ),
    )
}

fn criterion_7() -> Outcome {
    let kernel = MehlerKernel::new(40, 343).unwrap();
    let grid = FlowGrid::default();
    let checks =
        semigroup_suite(&kernel, &grid, &default_test_weights(), &default_test_functions(), &default_test_forms())
            .unwrap();
    let mut detail = String::new();
    for c in &checks {
        let _ = write!(
            detail,
            "{}: {} instances, {} violations, worst slack {:.3e}; ",
            c.name,
            c.count,
            c.failures,
            c.worst_margin.unwrap_or(f64::NAN)
        );
    }
    outcome(checks.iter().all(|c| c.passed() && c.count > 0), detail)
}

fn criterion_8() -> Outcome {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for n in [1, 2, 4, 9] {
        let r = representation_check(n).unwrap();
        worst = worst.max(r.abs_gap);
        let _ = write!(detail, "n={n}: lhs {:.12}, rhs {:.12}; ", r.lhs, r.rhs);
    }
    let _ = write!(detail, "max gap {worst:.3e}");
    outcome(worst <= 1e-6, detail)
}

fn criterion_9() -> Outcome {
    let grid = FlowGrid::default();
    let fs =
        [HermiteFunction::basis(1), HermiteFunction::basis(2), HermiteFunction::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap()];
    let gs = [OneForm::basis(0), OneForm::basis(2)];
    let ws = [
        WeightSpec::Constant(1.0),
        WeightSpec::ExpLinear(0.5),
        WeightSpec::ExpLinear(1.0),
        truncate_weight(&WeightSpec::ExpLinear(1.0), 4).unwrap(),
    ];
    let mut worst = 0.0f64;
    let mut count = 0;
    for w in &ws {
        let q2 = q2_characteristic(w, &grid).unwrap().q2_lower;
        for f in &fs {
            for g in &gs {
                worst = worst.max(embedding_with_q2(f, g, w, q2).unwrap().ratio);
                count += 1;
            }
        }
    }
    outcome(worst <= 1.0, format!("{count} triples, max lhs/(20 q2 |f| |g|) = {worst:.4e}"))
}

fn criterion_10() -> Outcome {
    let grid = FlowGrid::default();
    let mut pass = true;
    let mut detail = String::new();
    for a in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let w = WeightSpec::ExpLinear(a);
        let q2 = q2_characteristic(&w, &grid).unwrap().q2_lower;
        let r = riesz_norm_with_q2(&w, 32, q2).unwrap();
        pass &= r.weighted_norm <= 80.0 * q2 + 1e-6;
        let _ = write!(detail, "a={a}: norm {:.6}, q2 {:.6}, ratio {:.4e}; ", r.weighted_norm, q2, r.bound_ratio);
    }
    let c = riesz_norm_with_q2(&WeightSpec::Constant(1.0), 32, 1.0).unwrap();
    let iso = (c.weighted_norm - 1.0).abs();
    pass &= iso <= 1e-10;
    let _ = write!(detail, "constant weight |norm - 1| = {iso:.3e}");
    outcome(pass, detail)
}

fn criterion_11() -> Outcome {
    let grid = FlowGrid::default();
    let w = WeightSpec::ExpLinear(1.0);
    let full = q2_characteristic(&w, &grid).unwrap().q2_lower;
    let ladder: Vec<f64> = TRUNCATION_LADDER
        .iter()
        .map(|&n| q2_characteristic(&truncate_weight(&w, n).unwrap(), &grid).unwrap().q2_lower)
        .collect();
    let monotone = ladder.windows(2).all(|p| p[1] >= p[0]);
    let gap = (ladder[ladder.len() - 1] - full).abs();
    let values: Vec<String> = TRUNCATION_LADDER.iter().zip(&ladder).map(|(n, v)| format!("n={n}: {v:.4}")).collect();
    outcome(
        monotone && gap <= 1e-3,
        format!(
            "{}; untruncated {full:.4}; monotone {monotone}; |q2(n=32) - q2| = {gap:.4e} (tol 1e-3)",
            values.join(", ")
        ),
    )
}

fn criterion_12() -> Outcome {
    let cfg = SuiteConfig {
        q_list: vec![1.0, 2.0, 10.0],
        samples_per_q: 300,
        aux_grid: 20,
        mollify_points: 8,
        mc_samples: 128,
        ..SuiteConfig::default()
    };
    let a = run_suite(&cfg).unwrap().without_timestamp();
    let b = run_suite(&cfg).unwrap().without_timestamp();
    let ja = serde_json::to_string(&a).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    let grid = FlowGrid::regular(4.0, 0.5, 1e-2, 8.0, 8, 200).unwrap();
    let s1 = sweep_report(WeightFamily::ExpLinear, &[0.0, 1.0], 8, &grid, &TRUNCATION_LADDER, 1e-3).unwrap();
    let s2 = sweep_report(WeightFamily::ExpLinear, &[0.0, 1.0], 8, &grid, &TRUNCATION_LADDER, 1e-3).unwrap();
    outcome(
        ja == jb && s1.to_csv() == s2.to_csv(),
        format!(
            "suite report {} bytes identical: {}; sweep CSV identical: {}",
            ja.len(),
            ja == jb,
            s1.to_csv() == s2.to_csv()
        ),
    )
}

#[test]
fn primary_criteria() {
    let started = Instant::now();
    let report = bellman_report();
    let suite_time = started.elapsed().as_secs_f64();
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "size", per_q(&report, &["size"], 100_000)),
        (2, "concavity", per_q(&report, &["deriv"], 100_000)),
        (3, "monotonicity in nu", per_q(&report, &["sign"], 100_000)),
        (4, "auxiliary certificates", per_q(&report, &["aux_size", "aux_hessian"], 1)),
    ];
    results.push((5, "B43 closed form vs golden section", criterion_5()));
    results.push((6, "spectral validation", criterion_6()));
    results.push((7, "pointwise semigroup inequalities", criterion_7()));
    results.push((8, "representation formula", criterion_8()));
    results.push((9, "bilinear embedding", criterion_9()));
    results.push((10, "weighted Riesz bound", criterion_10()));
    results.push((11, "truncation ladder", criterion_11()));
    results.push((12, "determinism", criterion_12()));

    println!("Bellman suite over {} points took {suite_time:.1}s", 4 * 100_000);
    let mut failed = Vec::new();
    for (id, name, o) in &results {
        println!("criterion {id:>2} [{name}]: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(*id);
        }
    }
    println!("total time {:.1}s", started.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

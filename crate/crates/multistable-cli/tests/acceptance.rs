//! Acceptance gate: ten numbered criteria, each printing one PASS/FAIL
//! line with its runtime and enforcing a budget. Run with
//! `cargo test -p multistable-cli --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use multistable::function_spaces::{
    luxemburg_norm, norm_p, IndexFunction, RealFunction, SupportSpec,
};
use multistable::multistable_core::{cf_joint, scaled_cf, CfSpec, IntervalUnion};
use multistable::processes::{make_kernel, KernelParams, ProcessKernel};
use multistable::quad::{self, QuadratureSpec};
use multistable::stable_rng::{sample_stable_many, RngStream, StableParams};
use multistable::verify::{
    additivity_check, cf_convergence_check, dyadic_discretized_alpha, ecf, ecf_joint,
    independence_check, localisability_condition_check, localize_cf_check, measure_scaling_check,
    moment_bound_check, sample_joint_integrals, tail_bound_check, tail_bound_check_with_constant,
    DEFAULT_R_SEQ, THETA_PROBE_GRID,
};

fn quadspec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn ca(v: f64) -> IndexFunction {
    IndexFunction::constant(v).unwrap()
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn run(&mut self, number: u32, title: &str, budget_s: f64, body: impl FnOnce()) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(body));
        let elapsed = start.elapsed().as_secs_f64();
        let in_budget = elapsed <= budget_s;
        let pass = result.is_ok() && in_budget;
        println!(
            "criterion {number:2} ({title}): {} [{elapsed:.2}s / budget {budget_s:.0}s]",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            let why = match result {
                Ok(()) => format!("exceeded budget: {elapsed:.2}s > {budget_s:.0}s"),
                Err(p) => p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into()),
            };
            self.failures.push(format!("criterion {number} ({title}): {why}"));
        }
    }
}

#[test]
fn acceptance() {
    let mut gate = Gate { failures: Vec::new() };

    gate.run(1, "norm oracle", 1.0, criterion_1_norm_oracle);
    gate.run(2, "stable sampler law", 30.0, criterion_2_sampler_law);
    gate.run(3, "simulator matches exact CF", 60.0, criterion_3_simulator_vs_cf);
    gate.run(4, "independence + additivity", 120.0, criterion_4_scattering);
    gate.run(5, "fdd convergence", 10.0, criterion_5_fdd_convergence);
    gate.run(6, "tail and moment bounds", 120.0, criterion_6_tail_moment);
    gate.run(7, "localisability", 120.0, criterion_7_localisability);
    gate.run(8, "tangent measure scaling", 30.0, criterion_8_scaling);
    gate.run(9, "parameter gates", 1.0, criterion_9_gates);
    gate.run(10, "CLI reproducibility", 60.0, criterion_10_cli_reproducibility);

    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}

// -- 1 ----------------------------------------------------------------------

fn criterion_1_norm_oracle() {
    let quad = quadspec();
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs();

    let f1 = RealFunction::indicator(0.0, 1.0).unwrap();
    assert!(rel(luxemburg_norm(&f1, &ca(1.37), &quad).unwrap(), 1.0) <= 1e-8);

    let f2 = RealFunction::indicator(0.0, 2.0).unwrap();
    assert!(rel(luxemburg_norm(&f2, &ca(1.0), &quad).unwrap(), 2.0) <= 1e-8);

    let f3 = RealFunction::scaled_indicator(2.0, 0.0, 2.0).unwrap();
    let two_piece =
        IndexFunction::piecewise_constant(vec![1.0], vec![1.0, 2.0], 1.0, 2.0).unwrap();
    let golden = 1.0 + 5.0f64.sqrt();
    assert!(rel(luxemburg_norm(&f3, &two_piece, &quad).unwrap(), golden) <= 1e-8);

    // Randomized family: homogeneity and constant-index reduction.
    let mut st = RngStream::from_seed(20_260_819);
    for _ in 0..20 {
        let (u1, u2) = st.uniform_pair();
        let (u3, u4) = st.uniform_pair();
        let c = 0.25 + 3.75 * u1;
        let x0 = -1.0 + u2;
        let w = 0.5 + 1.5 * u3;
        let p = 0.6 + 1.4 * u4;
        let f = RealFunction::scaled_indicator(c, x0, x0 + w).unwrap();
        let alpha = IndexFunction::sinusoidal(1.4, 0.3, 1.0 + u3, 1.05, 1.75).unwrap();
        let base = luxemburg_norm(&f, &alpha, &quad).unwrap();
        let scaled = luxemburg_norm(&f.scale(-2.5), &alpha, &quad).unwrap();
        assert!(
            (scaled - 2.5 * base).abs() <= 1e-8 * 2.5 * base,
            "homogeneity: {scaled} vs {}",
            2.5 * base
        );
        let lux = luxemburg_norm(&f, &ca(p), &quad).unwrap();
        let classical = norm_p(&f, p, &quad).unwrap();
        assert!(
            (lux - classical).abs() <= 1e-8 * classical,
            "constant-index reduction: {lux} vs {classical}"
        );
    }
}

// -- 2 ----------------------------------------------------------------------

fn criterion_2_sampler_law() {
    let n = 100_000usize;
    let grid: Vec<f64> = (0..41).map(|k| -5.0 + 0.25 * k as f64).collect();
    for (i, &alpha) in [0.6f64, 1.0, 1.4, 1.8, 2.0].iter().enumerate() {
        for (j, &sigma) in [0.5f64, 1.0, 2.0].iter().enumerate() {
            let params = StableParams::new(alpha, sigma).unwrap();
            let mut st = RngStream::from_seed(777).derive(50, (10 * i + j) as u64);
            let xs = sample_stable_many(params, &mut st, n);
            let est = ecf(&xs, &grid).unwrap();
            for (k, &theta) in grid.iter().enumerate() {
                let target = (-(sigma.powf(alpha)) * theta.abs().powf(alpha)).exp();
                assert!(
                    (est.re[k] - target).abs() <= est.band && est.im[k].abs() <= est.band,
                    "alpha={alpha} sigma={sigma} theta={theta}: re={} im={} target={target}",
                    est.re[k],
                    est.im[k]
                );
            }
            if alpha == 2.0 {
                let mean = xs.iter().sum::<f64>() / n as f64;
                let var =
                    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
                let want = 2.0 * sigma * sigma;
                assert!(
                    (var - want).abs() <= 0.02 * want,
                    "variance {var} vs {want}"
                );
            }
            if alpha == 1.0 {
                let mut sorted = xs.clone();
                sorted.sort_by(f64::total_cmp);
                let iqr = sorted[3 * n / 4] - sorted[n / 4];
                let want = 2.0 * sigma;
                assert!((iqr - want).abs() <= 0.02 * want, "IQR {iqr} vs {want}");
            }
        }
    }
}

// -- 3 ----------------------------------------------------------------------

fn criterion_3_simulator_vs_cf() {
    let quad = quadspec();
    let alpha =
        IndexFunction::piecewise_constant(vec![0.5], vec![1.3, 1.7], 1.3, 1.7).unwrap();
    let f1 = RealFunction::indicator(0.0, 0.5).unwrap();
    let f2 = RealFunction::indicator(0.5, 1.0).unwrap();
    let functions = vec![f1, f2];
    let rows =
        sample_joint_integrals(&functions, &alpha, 8, (0.0, 1.0), 100_000, 31, &quad).unwrap();

    // 21 theta pairs: three radii by seven directions.
    let mut theta_grid = Vec::new();
    for &rho in &[0.5f64, 1.0, 1.5] {
        for k in 0..7 {
            let psi = std::f64::consts::PI * k as f64 / 6.0;
            theta_grid.push(vec![rho * psi.cos(), rho * psi.sin()]);
        }
    }
    assert_eq!(theta_grid.len(), 21);
    let est = ecf_joint(&rows, &theta_grid).unwrap();
    for (k, theta) in theta_grid.iter().enumerate() {
        let target = cf_joint(
            &CfSpec {
                functions: functions.clone(),
                thetas: theta.clone(),
                alpha: alpha.clone(),
            },
            &quad,
        )
        .unwrap();
        let dev = est.deviation_from(k, target);
        assert!(
            dev <= est.band,
            "theta = {theta:?}: deviation {dev} > band {}",
            est.band
        );
    }
}

// -- 4 ----------------------------------------------------------------------

fn criterion_4_scattering() {
    let quad = quadspec();
    let alpha =
        IndexFunction::piecewise_constant(vec![0.5], vec![1.4, 1.8], 1.4, 1.8).unwrap();
    let sets = vec![
        IntervalUnion::new(vec![(0.0, 0.5)]).unwrap(),
        IntervalUnion::new(vec![(0.5, 1.0)]).unwrap(),
    ];
    let mut passed = 0;
    for seed in 0..100u64 {
        let report = independence_check(&alpha, &sets, 6, 2000, 1000 + seed, &quad).unwrap();
        if report.pass {
            passed += 1;
        }
    }
    assert!(passed >= 99, "independence passed on {passed}/100 seeds");

    let sets = vec![
        IntervalUnion::new(vec![(0.0, 0.25), (0.25, 0.5)]).unwrap(),
        IntervalUnion::new(vec![(0.5, 0.75)]).unwrap(),
        IntervalUnion::new(vec![(0.75, 1.0)]).unwrap(),
    ];
    let report = additivity_check(&alpha, &sets, 8, 7).unwrap();
    assert!(report.pass);
    for m in &report.statistics {
        assert!(m.value == 0.0, "{} must be bitwise zero, got {}", m.name, m.value);
    }
}

// -- 5 ----------------------------------------------------------------------

fn criterion_5_fdd_convergence() {
    let quad = quadspec();
    let alpha = IndexFunction::sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8).unwrap();
    let f = RealFunction::indicator(0.0, 1.0).unwrap();
    let seq: Vec<IndexFunction> = [2u32, 4, 6, 8]
        .iter()
        .map(|&l| dyadic_discretized_alpha(&alpha, l, (0.0, 1.0)).unwrap())
        .collect();
    let theta_list: Vec<Vec<f64>> = THETA_PROBE_GRID.iter().map(|&t| vec![t]).collect();
    let report =
        cf_convergence_check(&seq, &alpha, std::slice::from_ref(&f), &theta_list, &quad).unwrap();
    assert!(report.pass, "{}", report.to_json());
    let devs: Vec<f64> = report.statistics.iter().map(|m| m.value).collect();
    assert!(
        devs.windows(2).all(|w| w[1] < w[0]),
        "deviations must decrease strictly: {devs:?}"
    );
    assert!(devs[devs.len() - 1] < 1e-3);
}

// -- 6 ----------------------------------------------------------------------

fn criterion_6_tail_moment() {
    let quad = quadspec();

    // Cauchy oracle: alpha = 1 on [0,1] gives an exact Cauchy(1) integral.
    let g = RealFunction::indicator(0.0, 1.0).unwrap();
    let report = tail_bound_check(&g, &ca(1.0), &[2.0, 5.0, 10.0], 2, 2000, 5, &quad).unwrap();
    assert!(report.pass, "{}", report.to_json());
    let control = tail_bound_check_with_constant(
        &g,
        &ca(1.0),
        &[2.0, 5.0, 10.0],
        2,
        2000,
        5,
        &quad,
        tail_bound_cauchy_c1() / 10.0,
    )
    .unwrap();
    assert!(!control.pass, "c1/10 control must fail: {}", control.to_json());

    // Gaussian oracle: alpha = 2 gives N(0, 2); E|X| = 2/sqrt(pi).
    let report = moment_bound_check(&g, &ca(2.0), 1.0, 2, 2000, 3, &quad).unwrap();
    assert!(report.pass, "{}", report.to_json());
    let empirical = report.statistics[0].value;
    assert!((empirical - 2.0 / std::f64::consts::PI.sqrt()).abs() < 0.1);

    // Ten randomized (g, alpha) cases with the derived constants.
    let mut st = RngStream::from_seed(2026);
    for case in 0..10u64 {
        let (u1, u2) = st.uniform_pair();
        let (u3, u4) = st.uniform_pair();
        let (u5, _) = st.uniform_pair();
        let c = 0.5 + 1.5 * u1;
        let x0 = -u2;
        let w = 0.5 + u3;
        let mid = 1.1 + 0.5 * u4;
        let amp = 0.05 + 0.2 * u5;
        let g = RealFunction::scaled_indicator(c, x0, x0 + w).unwrap();
        let alpha = IndexFunction::sinusoidal(
            mid,
            amp,
            2.0,
            mid - amp - 0.02,
            (mid + amp + 0.02).min(2.0),
        )
        .unwrap();
        let tails =
            tail_bound_check(&g, &alpha, &[2.0, 5.0], 6, 1000, 40 + case, &quad).unwrap();
        assert!(tails.pass, "case {case}: {}", tails.to_json());
        let p = 0.4 * alpha.lower();
        let moments = moment_bound_check(&g, &alpha, p, 6, 1000, 40 + case, &quad).unwrap();
        assert!(moments.pass, "case {case}: {}", moments.to_json());
    }
}

fn tail_bound_cauchy_c1() -> f64 {
    // max of 2^{p+1}/(p+1) at p = a = b = 1.
    2.0
}

// -- 7 ----------------------------------------------------------------------

fn strictly_decreasing_to(values: &[f64], tol: f64) -> bool {
    values.windows(2).all(|w| w[1] < w[0]) && *values.last().unwrap() < tol
}

fn weighted_levy_kernel(alpha: IndexFunction) -> ProcessKernel {
    let weight = RealFunction::from_parts(
        |x| 1.0 + 0.25 * x,
        SupportSpec::bounded(-1e6, 1e6),
        Vec::new(),
        Vec::new(),
    )
    .unwrap();
    make_kernel(KernelParams::WeightedLevy { weight }, alpha).unwrap()
}

fn criterion_7_localisability() {
    let quad = quadspec();

    // (i) Constant-index LFMM is exactly self-similar: the zoomed CF
    // equals the tangent CF at machine-level accuracy for every r.
    let lfmm = make_kernel(
        KernelParams::Lfmm {
            h: 0.7,
            b_plus: 1.0,
            b_minus: 0.0,
        },
        ca(1.5),
    )
    .unwrap();
    let local = lfmm.local_form(0.0).unwrap();
    let report = localize_cf_check(
        &lfmm,
        0.0,
        &local,
        &[1.0],
        &[vec![0.9], vec![-1.4]],
        &DEFAULT_R_SEQ,
        &quad,
    )
    .unwrap();
    assert!(report.pass, "{}", report.to_json());
    for m in &report.statistics {
        assert!(m.value <= 1e-8, "{} = {} exceeds 1e-8", m.name, m.value);
    }

    // (ii) Weighted Levy and reverse OU under sinusoidal log-continuous
    // indices: condition integral and CF deviation both fall strictly
    // along r, ending below 1e-3.
    let wl_alpha = IndexFunction::sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8).unwrap();
    let wl = weighted_levy_kernel(wl_alpha);
    let wl_local = wl.local_form(0.3).unwrap();
    let report = localisability_condition_check(
        &wl,
        0.3,
        &wl_local,
        &[0.5, 1.0],
        &DEFAULT_R_SEQ,
        &quad,
    )
    .unwrap();
    assert!(report.pass, "{}", report.to_json());
    let values: Vec<f64> = report.statistics.iter().map(|m| m.value).collect();
    assert!(strictly_decreasing_to(&values, 1e-3), "weighted Levy condition: {values:?}");
    let report = localize_cf_check(
        &wl,
        0.3,
        &wl_local,
        &[1.0],
        &[vec![0.9], vec![-1.4]],
        &DEFAULT_R_SEQ,
        &quad,
    )
    .unwrap();
    assert!(report.pass, "{}", report.to_json());
    let values: Vec<f64> = report.statistics.iter().map(|m| m.value).collect();
    assert!(strictly_decreasing_to(&values, 1e-3), "weighted Levy CF: {values:?}");

    let ou_alpha = IndexFunction::sinusoidal(1.675, 0.225, 2.0, 1.44, 1.91).unwrap();
    let ou = make_kernel(KernelParams::ReverseOu { rate: 4.0 }, ou_alpha).unwrap();
    let ou_local = ou.local_form(0.3).unwrap();
    let report = localisability_condition_check(
        &ou,
        0.3,
        &ou_local,
        &[0.025, 0.05],
        &DEFAULT_R_SEQ,
        &quad,
    )
    .unwrap();
    assert!(report.pass, "{}", report.to_json());
    let values: Vec<f64> = report.statistics.iter().map(|m| m.value).collect();
    assert!(strictly_decreasing_to(&values, 1e-3), "reverse OU condition: {values:?}");
    let report = localize_cf_check(
        &ou,
        0.3,
        &ou_local,
        &[0.05],
        &[vec![0.9], vec![-1.4]],
        &DEFAULT_R_SEQ,
        &quad,
    )
    .unwrap();
    assert!(report.pass, "{}", report.to_json());
    let values: Vec<f64> = report.statistics.iter().map(|m| m.value).collect();
    assert!(strictly_decreasing_to(&values, 1e-3), "reverse OU CF: {values:?}");

    // (iii) Wrong localisation exponent must be rejected.
    let wrong = wl_local.with_h_exponent(wl_local.h_exponent + 0.1);
    let report = localisability_condition_check(
        &wl,
        0.3,
        &wrong,
        &[1.0],
        &DEFAULT_R_SEQ,
        &quad,
    )
    .unwrap();
    assert!(!report.pass, "wrong-h control must fail: {}", report.to_json());
}

// -- 8 ----------------------------------------------------------------------

fn criterion_8_scaling() {
    let quad = quadspec();
    let alpha = IndexFunction::sinusoidal(1.5, 0.3, 2.0, 1.2, 1.8).unwrap();
    let f = RealFunction::indicator(-0.5, 0.5).unwrap();
    let theta_list: Vec<Vec<f64>> = THETA_PROBE_GRID.iter().map(|&t| vec![t]).collect();
    for &u in &[0.0, 0.3] {
        let report = measure_scaling_check(
            &alpha,
            u,
            std::slice::from_ref(&f),
            &theta_list,
            &DEFAULT_R_SEQ,
            &quad,
        )
        .unwrap();
        assert!(report.pass, "u = {u}: {}", report.to_json());
    }

    // Identity case r = 1: no zoom at u = 0 reproduces the joint CF;
    // at u = 0.3 it matches a directly computed translated-index CF.
    let spec = CfSpec {
        functions: vec![f.clone()],
        thetas: vec![1.1],
        alpha: alpha.clone(),
    };
    let plain = cf_joint(&spec, &quad).unwrap();
    let zoomed = scaled_cf(&spec, 0.0, 1.0, &quad).unwrap();
    assert!(
        (zoomed - plain).abs() <= 1e-9,
        "identity at u = 0: {zoomed} vs {plain}"
    );
    let zoomed = scaled_cf(&spec, 0.3, 1.0, &quad).unwrap();
    let g = f.scale(1.1);
    let dom = g.composed_domain(&[], alpha.lower(), alpha.upper()).unwrap();
    let a2 = alpha.clone();
    let g2 = g.clone();
    let integral = quad::integrate(
        move |z| g2.eval(z).abs().powf(a2.eval(z + 0.3)),
        &dom,
        &quad,
    )
    .unwrap()
    .value;
    let reference = (-integral).exp();
    assert!(
        (zoomed - reference).abs() <= 1e-9,
        "identity at u = 0.3: {zoomed} vs {reference}"
    );
}

// -- 9 ----------------------------------------------------------------------

fn criterion_9_gates() {
    // Reverse OU requires 1 < sqrt(b) < a.
    let bad = IndexFunction::sinusoidal(1.35, 0.15, 1.0, 1.2, 1.5).unwrap();
    let err = make_kernel(KernelParams::ReverseOu { rate: 1.0 }, bad).unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("1 < sqrt(b) < a"),
        "gate message must cite the inequality, got: {msg}"
    );
    let good = IndexFunction::sinusoidal(1.7, 0.1, 1.0, 1.55, 1.85).unwrap();
    assert!(make_kernel(KernelParams::ReverseOu { rate: 1.0 }, good).is_ok());

    // LFMM requires 1/a - 1/b < h < 1 + 1/b - 1/a.
    let alpha = IndexFunction::sinusoidal(1.5, 0.3, 1.0, 1.2, 1.8).unwrap();
    for h in [0.2, 1.5] {
        let err = make_kernel(
            KernelParams::Lfmm {
                h,
                b_plus: 1.0,
                b_minus: 0.0,
            },
            alpha.clone(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("1/a - 1/b < h < 1 + 1/b - 1/a"),
            "gate message must cite the inequality, got: {msg}"
        );
    }
    assert!(make_kernel(
        KernelParams::Lfmm {
            h: 0.5,
            b_plus: 1.0,
            b_minus: 0.0
        },
        alpha
    )
    .is_ok());
}

// -- 10 ---------------------------------------------------------------------

fn run_cli(dir: &std::path::Path, args: &[&str]) -> (String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_multistable"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn criterion_10_cli_reproducibility() {
    let dir = std::env::temp_dir().join(format!("multistable-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let cases: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (
            vec![
                "sample-path",
                "--process",
                "lfmm",
                "--h",
                "0.7",
                "--alpha",
                "const:1.5",
                "--t",
                "0:1:64",
                "--level",
                "9",
                "--seed",
                "42",
                "--out",
                "p.csv",
            ],
            vec!["p.csv", "p.json"],
        ),
        (
            vec![
                "cf",
                "--alpha",
                "const:2",
                "--func",
                "indicator:0,1",
                "--theta",
                "-3:3:13",
                "--out",
                "cf.csv",
            ],
            vec!["cf.csv"],
        ),
        (
            vec![
                "verify",
                "--suite",
                "additivity",
                "--alpha",
                "const:1.4",
                "--seed",
                "7",
                "--out",
                "add.json",
            ],
            vec!["add.json"],
        ),
        (
            vec![
                "localize",
                "--process",
                "lfmm",
                "--h",
                "0.7",
                "--alpha",
                "const:1.5",
                "--r-seq",
                "0.1,0.01",
                "--out",
                "loc.json",
            ],
            vec!["loc.json"],
        ),
    ];
    for (args, files) in &cases {
        let (stdout_a, _) = run_cli(&dir, args);
        let first: Vec<Vec<u8>> = files
            .iter()
            .map(|f| std::fs::read(dir.join(f)).unwrap())
            .collect();
        let (stdout_b, _) = run_cli(&dir, args);
        for (f, bytes) in files.iter().zip(&first) {
            let again = std::fs::read(dir.join(f)).unwrap();
            assert_eq!(&again, bytes, "{f} changed across identical reruns");
        }
        assert_eq!(stdout_a, stdout_b, "stdout changed across reruns of {args:?}");
    }

    // norm writes to stdout only; the printed digits must be identical.
    let args = ["norm", "--func", "indicator:0,2", "--alpha", "const:1"];
    let (a, _) = run_cli(&dir, &args);
    let (b, _) = run_cli(&dir, &args);
    assert_eq!(a, b);
    assert!(a.contains("luxemburg_norm = 2.0000000000"), "got: {a}");

    // Different seed must change the sampled output.
    run_cli(
        &dir,
        &[
            "sample-path",
            "--process",
            "lfmm",
            "--h",
            "0.7",
            "--alpha",
            "const:1.5",
            "--t",
            "0:1:64",
            "--level",
            "9",
            "--seed",
            "43",
            "--out",
            "q.csv",
        ],
    );
    let p = std::fs::read_to_string(dir.join("p.csv")).unwrap();
    let q = std::fs::read_to_string(dir.join("q.csv")).unwrap();
    let strip = |s: &str| {
        s.lines()
            .skip(1)
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_ne!(strip(&p), strip(&q), "different seeds must differ");

    std::fs::remove_dir_all(&dir).ok();
}

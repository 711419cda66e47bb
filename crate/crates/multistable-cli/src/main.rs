//! Command-line front door: generate sample paths of multistable
//! processes, evaluate characteristic functions and norms, and run the
//! verification suites, emitting CSV/JSON for offline plotting.
//!
//! Every command is deterministic given (config, seed); the SHA-256
//! config fingerprint is recorded in every output. Exit codes: 0 pass,
//! 1 suite failure, 2 validation error, 3 resource cap, 4 numeric.

mod config;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use multistable::error::{Error, Result};
use multistable::function_spaces::{luxemburg_norm, norm_p};
use multistable::multistable_core::{cf_joint, CfSpec, DEFAULT_CELL_CAP};
use multistable::processes::PathConfig;
use multistable::stable_rng::RngStream;
use multistable::verify::{
    self, additivity_check, cf_convergence_check, dyadic_discretized_alpha, independence_check,
    localisability_condition_check, localize_cf_check, measure_scaling_check, moment_bound_check,
    strong_localisability_diagnostic, tail_bound_check, VerifyReport,
};

use config::{canonical_json, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "multistable",
    version,
    about = "Simulate multistable measures and processes and verify their laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate process sample paths (CSV per path + JSON sidecar)
    SamplePath(CommonArgs),
    /// Evaluate the exact characteristic function over a theta grid (CSV)
    Cf(CommonArgs),
    /// Run a verification suite and write its report (JSON)
    Verify(CommonArgs),
    /// Print the Luxemburg norm and/or p-norm of a function
    Norm(CommonArgs),
    /// Run the localisability checks (same as verify --suite localize)
    Localize(CommonArgs),
}

/// Flags mirror JSON config keys one-to-one (kebab-case flag ↔
/// snake_case key); `--config file.json` supplies defaults and explicit
/// flags win key by key.
#[derive(Args)]
struct CommonArgs {
    /// JSON config file; explicit flags override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    /// Index function: const:1.5 | affine:i,s | sin:mid=..,amp=..,period=.. | table:f.json
    #[arg(long)]
    alpha: Option<String>,
    /// Index bounds 'a,b' (required for non-constant alpha families)
    #[arg(long, allow_hyphen_values = true)]
    bounds: Option<String>,
    /// Process kernel: levy | rou | lfmm
    #[arg(long)]
    process: Option<String>,
    /// Self-similarity exponent (lfmm)
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    /// Kernel coefficient b+ (lfmm)
    #[arg(long, allow_negative_numbers = true)]
    b_plus: Option<f64>,
    /// Kernel coefficient b- (lfmm)
    #[arg(long, allow_negative_numbers = true)]
    b_minus: Option<f64>,
    /// Decay rate (rou)
    #[arg(long)]
    rate: Option<f64>,
    /// Weight for the levy kernel: const:c | affine:c0,c1
    #[arg(long)]
    weight: Option<String>,
    /// Time grid start:end:count
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Theta grid start:end:count
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Dyadic resolution level
    #[arg(long)]
    level: Option<u32>,
    /// Root seed (64-bit)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo paths / samples
    #[arg(long)]
    samples: Option<usize>,
    /// Output file path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature tolerance (sets both absolute and relative)
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Suite: independence | additivity | convergence | tails | moments | localize | scaling | strong
    #[arg(long)]
    suite: Option<String>,
    /// Succeed (exit 0) iff the suite FAILS — for negative controls
    #[arg(long)]
    expect_fail: bool,
    /// Localisation point u
    #[arg(long, allow_negative_numbers = true)]
    u: Option<f64>,
    /// Zoom sequence, comma separated, strictly decreasing in (0,1)
    #[arg(long, allow_hyphen_values = true)]
    r_seq: Option<String>,
    /// Interval sets, e.g. '0:0.25+0.25:0.5,0.5:1'
    #[arg(long, allow_hyphen_values = true)]
    sets: Option<String>,
    /// Moment order (moments suite)
    #[arg(long)]
    p: Option<f64>,
    /// Tail thresholds, comma separated (tails suite)
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Modulus probe exponent (strong suite)
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Integrand: indicator:lo,hi | scaled:c,lo,hi | power:c,x0,e,lo,hi | expdecay:c,r,lo
    #[arg(long)]
    func: Option<String>,
    /// Discretization levels, comma separated (convergence suite)
    #[arg(long, allow_hyphen_values = true)]
    levels: Option<String>,
}

impl CommonArgs {
    fn to_flag_map(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put_str = |key: &str, v: &Option<String>| {
            if let Some(s) = v {
                m.insert(key.to_string(), Value::from(s.clone()));
            }
        };
        put_str("alpha", &self.alpha);
        put_str("bounds", &self.bounds);
        put_str("process", &self.process);
        put_str("weight", &self.weight);
        put_str("t", &self.t);
        put_str("theta", &self.theta);
        put_str("suite", &self.suite);
        put_str("r_seq", &self.r_seq);
        put_str("sets", &self.sets);
        put_str("lambda", &self.lambda);
        put_str("func", &self.func);
        put_str("levels", &self.levels);
        let mut put_f64 = |key: &str, v: &Option<f64>| {
            if let Some(x) = v {
                m.insert(key.to_string(), Value::from(*x));
            }
        };
        put_f64("h", &self.h);
        put_f64("b_plus", &self.b_plus);
        put_f64("b_minus", &self.b_minus);
        put_f64("rate", &self.rate);
        put_f64("quad_tol", &self.quad_tol);
        put_f64("u", &self.u);
        put_f64("p", &self.p);
        put_f64("eta", &self.eta);
        if let Some(level) = self.level {
            m.insert("level".into(), Value::from(level));
        }
        if let Some(seed) = self.seed {
            m.insert("seed".into(), Value::from(seed));
        }
        if let Some(samples) = self.samples {
            m.insert("samples".into(), Value::from(samples as u64));
        }
        if let Some(out) = &self.out {
            m.insert("out".into(), Value::from(out.to_string_lossy().into_owned()));
        }
        if self.expect_fail {
            m.insert("expect_fail".into(), Value::from(true));
        }
        m
    }
}

fn main() {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::SamplePath(a) => ("sample-path", a),
        Command::Cf(a) => ("cf", a),
        Command::Verify(a) => ("verify", a),
        Command::Norm(a) => ("norm", a),
        Command::Localize(a) => ("localize", a),
    };
    match run(name, args) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(name: &str, args: &CommonArgs) -> Result<i32> {
    let file = match &args.config {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Some(serde_json::from_str(&text).map_err(|e| {
                Error::InvalidArgument(format!("config file {} is not valid JSON: {e}", path.display()))
            })?)
        }
    };
    let cfg = ExperimentConfig::new(name, file, args.to_flag_map())?;
    match name {
        "sample-path" => cmd_sample_path(&cfg),
        "cf" => cmd_cf(&cfg),
        "verify" => cmd_verify(&cfg, None),
        "localize" => cmd_verify(&cfg, Some("localize")),
        "norm" => cmd_norm(&cfg),
        _ => unreachable!("dispatch covers every subcommand"),
    }
}

/// 17 significant digits: round-trips every f64 exactly.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write via a temp file in the same directory plus an atomic rename.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// File name for path i out of n: unchanged when n = 1, numbered
/// (`stem_0003.csv`) otherwise.
fn numbered(base: &Path, i: usize, n: usize) -> PathBuf {
    if n == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().unwrap_or_default().to_string_lossy();
    let ext = base
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}_{i:04}{ext}"))
}

fn cmd_sample_path(cfg: &ExperimentConfig) -> Result<i32> {
    let kernel = cfg.kernel()?;
    let times = cfg.grid_or("t", "0:1:256")?;
    let level = cfg.u64_or("level", 12)? as u32;
    let seed = cfg.u64_or("seed", 0)?;
    let samples = cfg.usize_or("samples", 1)?.max(1);
    let quad = cfg.quad()?;
    let out = cfg.out_or("sample_path.csv");
    let hash = cfg.config_hash();
    let path_cfg = PathConfig {
        level,
        window_epsilon: None,
        cell_cap: DEFAULT_CELL_CAP,
    };
    let root = RngStream::from_seed(seed);
    let mut files = Vec::with_capacity(samples);
    for i in 0..samples {
        let stream = root.derive(verify::PATH_STREAM_DOMAIN, i as u64);
        let sample = kernel.sample_path(&times, &path_cfg, &stream, &quad)?;
        let mut csv = format!("# config_hash={hash}\nt,value\n");
        for (t, v) in sample.times.iter().zip(&sample.values) {
            csv.push_str(&format!("{},{}\n", fmt17(*t), fmt17(*v)));
        }
        let file = numbered(&out, i, samples);
        write_atomic(&file, &csv)?;
        files.push(file.to_string_lossy().into_owned());
    }
    let sidecar = out.with_extension("json");
    let meta = serde_json::json!({
        "command": "sample-path",
        "config_hash": hash,
        "seed": seed,
        "level": level,
        "samples": samples,
        "points_per_path": times.len(),
        "files": files,
    });
    write_atomic(&sidecar, &canonical_json(&meta))?;
    println!(
        "wrote {} path file(s) + {}; config_hash = {hash}",
        files.len(),
        sidecar.display()
    );
    Ok(0)
}

fn cmd_cf(cfg: &ExperimentConfig) -> Result<i32> {
    let alpha = cfg.alpha()?;
    let thetas = cfg.grid_or("theta", "-3:3:25")?;
    let quad = cfg.quad()?;
    let f = if cfg.str_opt("process")?.is_some() {
        let kernel = cfg.kernel()?;
        let t_grid = cfg.grid_or("t", "1:1:1")?;
        if t_grid.len() != 1 {
            return Err(Error::InvalidArgument(
                "cf with a process kernel takes a single time (e.g. --t 1:1:1)".into(),
            ));
        }
        kernel.slice(t_grid[0])?
    } else {
        cfg.str_opt("func")?
            .ok_or_else(|| Error::InvalidArgument("cf needs --func or --process".into()))
            .and_then(config::parse_func)?
    };
    let hash = cfg.config_hash();
    let mut csv = format!("# config_hash={hash}\ntheta,cf\n");
    for &theta in &thetas {
        let value = cf_joint(
            &CfSpec {
                functions: vec![f.clone()],
                thetas: vec![theta],
                alpha: alpha.clone(),
            },
            &quad,
        )?;
        csv.push_str(&format!("{},{}\n", fmt17(theta), fmt17(value)));
    }
    let out = cfg.out_or("cf.csv");
    write_atomic(&out, &csv)?;
    println!("wrote {}; config_hash = {hash}", out.display());
    Ok(0)
}

fn cmd_norm(cfg: &ExperimentConfig) -> Result<i32> {
    let f = cfg
        .str_opt("func")?
        .ok_or_else(|| Error::InvalidArgument("norm needs --func".into()))
        .and_then(config::parse_func)?;
    let quad = cfg.quad()?;
    let p = cfg.f64_opt("p")?;
    let has_alpha = cfg.str_opt("alpha")?.is_some();
    if p.is_none() && !has_alpha {
        return Err(Error::InvalidArgument(
            "norm needs --alpha (Luxemburg norm) and/or --p (classical p-norm)".into(),
        ));
    }
    if has_alpha {
        let alpha = cfg.alpha()?;
        println!("luxemburg_norm = {}", fmt17(luxemburg_norm(&f, &alpha, &quad)?));
    }
    if let Some(p) = p {
        println!("norm_p({p}) = {}", fmt17(norm_p(&f, p, &quad)?));
    }
    println!("config_hash = {}", cfg.config_hash());
    Ok(0)
}

fn suite_reports(cfg: &ExperimentConfig, suite: &str) -> Result<Vec<VerifyReport>> {
    let quad = cfg.quad()?;
    let seed = cfg.u64_or("seed", 1)?;
    match suite {
        "independence" => {
            let sets = cfg.sets_or("0:0.5,0.5:1")?;
            let level = cfg.u64_or("level", 6)? as u32;
            let samples = cfg.usize_or("samples", 2000)?;
            Ok(vec![independence_check(
                &cfg.alpha()?,
                &sets,
                level,
                samples,
                seed,
                &quad,
            )?])
        }
        "additivity" => {
            let sets = cfg.sets_or("0:0.5,0.5:1")?;
            let level = cfg.u64_or("level", 8)? as u32;
            Ok(vec![additivity_check(&cfg.alpha()?, &sets, level, seed)?])
        }
        "convergence" => {
            let alpha = cfg.alpha()?;
            let f = cfg.func_or("indicator:0,1")?;
            let levels: Vec<u32> = cfg
                .f64_list_opt("levels")?
                .unwrap_or_else(|| vec![2.0, 4.0, 6.0, 8.0])
                .into_iter()
                .map(|l| l as u32)
                .collect();
            let sup = f.support();
            let seq: Vec<_> = levels
                .iter()
                .map(|&l| dyadic_discretized_alpha(&alpha, l, (sup.lo, sup.hi)))
                .collect::<Result<_>>()?;
            let theta_list: Vec<Vec<f64>> = match cfg.f64_list_opt("theta")? {
                Some(ts) => ts.into_iter().map(|t| vec![t]).collect(),
                None => verify::THETA_PROBE_GRID.iter().map(|&t| vec![t]).collect(),
            };
            Ok(vec![cf_convergence_check(
                &seq,
                &alpha,
                std::slice::from_ref(&f),
                &theta_list,
                &quad,
            )?])
        }
        "tails" => {
            let g = cfg.func_or("indicator:0,1")?;
            let lambda = cfg
                .f64_list_opt("lambda")?
                .unwrap_or_else(|| vec![2.0, 5.0, 10.0]);
            let level = cfg.u64_or("level", 4)? as u32;
            let samples = cfg.usize_or("samples", 2000)?;
            Ok(vec![tail_bound_check(
                &g,
                &cfg.alpha()?,
                &lambda,
                level,
                samples,
                seed,
                &quad,
            )?])
        }
        "moments" => {
            let g = cfg.func_or("indicator:0,1")?;
            let alpha = cfg.alpha()?;
            let p = cfg.f64_or("p", alpha.lower() / 2.0)?;
            let level = cfg.u64_or("level", 4)? as u32;
            let samples = cfg.usize_or("samples", 2000)?;
            Ok(vec![moment_bound_check(
                &g, &alpha, p, level, samples, seed, &quad,
            )?])
        }
        "localize" => {
            let kernel = cfg.kernel()?;
            let u = cfg.f64_or("u", 0.0)?;
            let local = kernel.local_form(u)?;
            let r_seq = cfg.r_seq()?;
            let t_probes = cfg.grid_or("t", "0.5:1:2")?;
            let thetas = cfg.grid_or("theta", "-1.4:0.9:2")?;
            let theta_list: Vec<Vec<f64>> = thetas.into_iter().map(|t| vec![t]).collect();
            let t_last = *t_probes.last().expect("grid is nonempty");
            Ok(vec![
                localisability_condition_check(&kernel, u, &local, &t_probes, &r_seq, &quad)?,
                localize_cf_check(&kernel, u, &local, &[t_last], &theta_list, &r_seq, &quad)?,
            ])
        }
        "scaling" => {
            let alpha = cfg.alpha()?;
            let u = cfg.f64_or("u", 0.0)?;
            let f = cfg.func_or("indicator:-1,1")?;
            let thetas = cfg.grid_or("theta", "-1.4:0.9:2")?;
            let theta_list: Vec<Vec<f64>> = thetas.into_iter().map(|t| vec![t]).collect();
            Ok(vec![measure_scaling_check(
                &alpha,
                u,
                std::slice::from_ref(&f),
                &theta_list,
                &cfg.r_seq()?,
                &quad,
            )?])
        }
        "strong" => {
            let kernel = cfg.kernel()?;
            let u = cfg.f64_or("u", 0.0)?;
            let local = kernel.local_form(u)?;
            let a = kernel.alpha().lower();
            let default_eta = {
                let mid = (1.0 / a + local.h_exponent) / 2.0;
                if mid > 1.0 / a {
                    mid
                } else {
                    1.0 / a + 0.05
                }
            };
            let eta = cfg.f64_or("eta", default_eta)?;
            Ok(vec![strong_localisability_diagnostic(
                &kernel,
                u,
                local.h_exponent,
                eta,
                &cfg.r_seq()?,
                &quad,
            )?])
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown suite '{other}' (independence | additivity | convergence | tails | \
             moments | localize | scaling | strong)"
        ))),
    }
}

fn cmd_verify(cfg: &ExperimentConfig, suite_override: Option<&str>) -> Result<i32> {
    let suite = match suite_override {
        Some(s) => s.to_string(),
        None => cfg
            .str_opt("suite")?
            .ok_or_else(|| Error::InvalidArgument("verify needs --suite <name>".into()))?
            .to_string(),
    };
    let mut reports = suite_reports(cfg, &suite)?;
    let hash = cfg.config_hash();
    for r in &mut reports {
        r.config_hash = hash.clone();
    }
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0]).expect("report serializes")
    } else {
        serde_json::to_string_pretty(&reports).expect("reports serialize")
    };
    let out = cfg.out_or("verify_report.json");
    write_atomic(&out, &json)?;
    let all_pass = reports.iter().all(|r| r.pass);
    for r in &reports {
        println!("{}: {}", r.check, if r.pass { "PASS" } else { "FAIL" });
    }
    println!(
        "suite {suite}: {}; wrote {}; config_hash = {hash}",
        if all_pass { "PASS" } else { "FAIL" },
        out.display()
    );
    let expect_fail = cfg.bool_or("expect_fail", false)?;
    let pass = if expect_fail { !all_pass } else { all_pass };
    Ok(if pass { 0 } else { 1 })
}

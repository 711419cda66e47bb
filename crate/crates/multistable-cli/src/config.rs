//! Experiment configuration: merged from a JSON config file and
//! command-line flags (flags win, key by key), with typed accessors
//! that validate before any computation, plus the canonical-JSON
//! fingerprint recorded in every output.

use std::path::PathBuf;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use multistable::error::{Error, Result};
use multistable::function_spaces::{IndexFunction, RealFunction, SupportSpec};
use multistable::multistable_core::IntervalUnion;
use multistable::processes::{make_kernel, KernelParams, ProcessKernel};
use multistable::quad::QuadratureSpec;

/// Hull used for weight functions given by unbounded formulas; process
/// windows are always intersected with slice supports, so the hull only
/// needs to be wide, not tight.
const WEIGHT_HULL: f64 = 1e6;

/// One command's effective parameters: the config-file object with the
/// explicitly-set flags merged on top.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: String,
    params: Map<String, Value>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl ExperimentConfig {
    pub fn new(command: &str, file: Option<Value>, flags: Map<String, Value>) -> Result<Self> {
        let mut params = match file {
            None => Map::new(),
            Some(Value::Object(m)) => m,
            Some(other) => {
                return Err(bad(format!(
                    "config file must hold a JSON object, got {other}"
                )))
            }
        };
        for (k, v) in flags {
            params.insert(k, v);
        }
        Ok(ExperimentConfig {
            command: command.to_string(),
            params,
        })
    }

    /// SHA-256 of the command name plus the canonically ordered
    /// parameters; identical configs hash identically regardless of the
    /// flag-vs-file split or key order.
    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.command.as_bytes());
        hasher.update(b"\n");
        hasher.update(canonical_json(&Value::Object(self.params.clone())).as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.params.get(key)
    }

    pub fn str_opt(&self, key: &str) -> Result<Option<&str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(bad(format!("key '{key}' must be a string, got {other}"))),
        }
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => n
                .as_f64()
                .map(Some)
                .ok_or_else(|| bad(format!("key '{key}' is not representable as f64"))),
            Some(other) => Err(bad(format!("key '{key}' must be a number, got {other}"))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Number(n)) => n
                .as_u64()
                .ok_or_else(|| bad(format!("key '{key}' must be a non-negative integer"))),
            Some(other) => Err(bad(format!("key '{key}' must be an integer, got {other}"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(other) => Err(bad(format!("key '{key}' must be a boolean, got {other}"))),
        }
    }

    pub fn out_or(&self, default: &str) -> PathBuf {
        match self.get("out") {
            Some(Value::String(s)) => PathBuf::from(s),
            _ => PathBuf::from(default),
        }
    }

    /// A list of numbers: either a JSON array or a comma-separated string.
    pub fn f64_list_opt(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => parse_f64_list(s).map(Some),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| bad(format!("key '{key}' must hold numbers")))
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some),
            Some(other) => Err(bad(format!(
                "key '{key}' must be an array or comma-separated string, got {other}"
            ))),
        }
    }

    /// A sampling grid: `start:end:count` or an explicit array.
    pub fn grid_or(&self, key: &str, default: &str) -> Result<Vec<f64>> {
        match self.get(key) {
            None => parse_grid(default),
            Some(Value::String(s)) => parse_grid(s),
            Some(Value::Array(_)) => Ok(self.f64_list_opt(key)?.expect("array present")),
            Some(other) => Err(bad(format!(
                "key '{key}' must be 'start:end:count' or an array, got {other}"
            ))),
        }
    }

    pub fn bounds_opt(&self) -> Result<Option<(f64, f64)>> {
        match self.get("bounds") {
            None => Ok(None),
            Some(Value::String(s)) => {
                let v = parse_f64_list(s)?;
                if v.len() != 2 {
                    return Err(bad(format!("bounds must be 'a,b', got '{s}'")));
                }
                Ok(Some((v[0], v[1])))
            }
            Some(Value::Array(items)) if items.len() == 2 => {
                let a = items[0].as_f64().ok_or_else(|| bad("bounds must be numbers"))?;
                let b = items[1].as_f64().ok_or_else(|| bad("bounds must be numbers"))?;
                Ok(Some((a, b)))
            }
            Some(other) => Err(bad(format!("bounds must be [a, b], got {other}"))),
        }
    }

    /// The index function from the `alpha` mini-language plus `bounds`.
    pub fn alpha(&self) -> Result<IndexFunction> {
        let spec = self
            .str_opt("alpha")?
            .ok_or_else(|| bad("missing required key 'alpha' (e.g. --alpha const:1.5)"))?;
        parse_alpha(spec, self.bounds_opt()?)
    }

    /// The process kernel from `process` plus its parameter keys.
    pub fn kernel(&self) -> Result<ProcessKernel> {
        let name = self
            .str_opt("process")?
            .ok_or_else(|| bad("missing required key 'process' (levy | rou | lfmm)"))?;
        let alpha = self.alpha()?;
        let params = match name {
            "levy" | "wlevy" | "weighted-levy" => {
                let weight = match self.str_opt("weight")? {
                    None => RealFunction::indicator(-WEIGHT_HULL, WEIGHT_HULL)?,
                    Some(spec) => parse_weight(spec)?,
                };
                KernelParams::WeightedLevy { weight }
            }
            "rou" | "ou" | "reverse-ou" => KernelParams::ReverseOu {
                rate: self.f64_or("rate", 1.0)?,
            },
            "lfmm" => KernelParams::Lfmm {
                h: self
                    .f64_opt("h")?
                    .ok_or_else(|| bad("lfmm requires key 'h' (the self-similarity exponent)"))?,
                b_plus: self.f64_or("b_plus", 1.0)?,
                b_minus: self.f64_or("b_minus", 0.0)?,
            },
            other => {
                return Err(bad(format!(
                    "unknown process '{other}' (expected levy | rou | lfmm)"
                )))
            }
        };
        make_kernel(params, alpha)
    }

    /// An integrand from the `func` mini-language, or the given default.
    pub fn func_or(&self, default: &str) -> Result<RealFunction> {
        parse_func(self.str_opt("func")?.unwrap_or(default))
    }

    /// Interval-union sets for the independence/additivity suites.
    /// Flag form: sets separated by commas, intervals inside a set
    /// joined with '+', endpoints as lo:hi — e.g. `0:0.25+0.25:0.5,0.5:1`.
    /// JSON form: [[[lo, hi], ...], ...].
    pub fn sets_or(&self, default: &str) -> Result<Vec<IntervalUnion>> {
        match self.get("sets") {
            None => parse_sets(default),
            Some(Value::String(s)) => parse_sets(s),
            Some(Value::Array(sets)) => sets
                .iter()
                .map(|set| {
                    let intervals = set
                        .as_array()
                        .ok_or_else(|| bad("each set must be an array of [lo, hi] pairs"))?
                        .iter()
                        .map(|pair| {
                            let p = pair
                                .as_array()
                                .filter(|p| p.len() == 2)
                                .ok_or_else(|| bad("each interval must be [lo, hi]"))?;
                            let lo = p[0].as_f64().ok_or_else(|| bad("interval endpoints"))?;
                            let hi = p[1].as_f64().ok_or_else(|| bad("interval endpoints"))?;
                            Ok((lo, hi))
                        })
                        .collect::<Result<Vec<(f64, f64)>>>()?;
                    IntervalUnion::new(intervals)
                })
                .collect(),
            Some(other) => Err(bad(format!("key 'sets' has unsupported shape: {other}"))),
        }
    }

    /// Quadrature settings; `quad_tol` tightens/loosens both tolerances.
    pub fn quad(&self) -> Result<QuadratureSpec> {
        let mut spec = QuadratureSpec::default();
        if let Some(tol) = self.f64_opt("quad_tol")? {
            spec.abs_tol = tol;
            spec.rel_tol = tol;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn r_seq(&self) -> Result<Vec<f64>> {
        Ok(self
            .f64_list_opt("r_seq")?
            .unwrap_or_else(|| multistable::verify::DEFAULT_R_SEQ.to_vec()))
    }
}

/// Compact JSON with every object's keys emitted in sorted order.
pub fn canonical_json(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            let body: Vec<String> = keys
                .iter()
                .map(|k| {
                    format!(
                        "{}:{}",
                        serde_json::to_string(k).expect("string serializes"),
                        canonical_json(&map[*k])
                    )
                })
                .collect();
            format!("{{{}}}", body.join(","))
        }
        Value::Array(items) => {
            let body: Vec<String> = items.iter().map(canonical_json).collect();
            format!("[{}]", body.join(","))
        }
        other => serde_json::to_string(other).expect("scalar serializes"),
    }
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("'{part}' is not a number")))
        })
        .collect()
}

/// `start:end:count` → `count` equally spaced points from start to end.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad(format!("grid must be 'start:end:count', got '{s}'")));
    }
    let start: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| bad(format!("grid start '{}' is not a number", parts[0])))?;
    let end: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| bad(format!("grid end '{}' is not a number", parts[1])))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| bad(format!("grid count '{}' is not an integer", parts[2])))?;
    if count == 0 {
        return Err(bad("grid count must be at least 1"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (end - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Index-function mini-language:
/// `const:1.5` | `affine:1.2,0.3` | `sin:mid=1.5,amp=0.3,period=2` |
/// `table:file.json` (file holds {"xs": [...], "alphas": [...]}).
/// Non-constant families require explicit bounds (a, b).
pub fn parse_alpha(spec: &str, bounds: Option<(f64, f64)>) -> Result<IndexFunction> {
    let (family, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("alpha spec '{spec}' must look like 'family:params'")))?;
    let need_bounds = || {
        bounds.ok_or_else(|| {
            bad(format!(
                "alpha family '{family}' requires explicit bounds: pass --bounds a,b"
            ))
        })
    };
    match family {
        "const" => {
            let v: f64 = rest
                .trim()
                .parse()
                .map_err(|_| bad(format!("const alpha '{rest}' is not a number")))?;
            IndexFunction::constant(v)
        }
        "affine" => {
            let v = parse_f64_list(rest)?;
            if v.len() != 2 {
                return Err(bad(format!(
                    "affine alpha needs 'intercept,slope', got '{rest}'"
                )));
            }
            let (a, b) = need_bounds()?;
            IndexFunction::affine(v[0], v[1], a, b)
        }
        "sin" => {
            let mut mid = None;
            let mut amp = None;
            let mut period = None;
            for part in rest.split(',') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| bad(format!("sin alpha part '{part}' must be key=value")))?;
                let value: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("sin alpha value '{v}' is not a number")))?;
                match k.trim() {
                    "mid" => mid = Some(value),
                    "amp" => amp = Some(value),
                    "period" => period = Some(value),
                    other => return Err(bad(format!("unknown sin alpha key '{other}'"))),
                }
            }
            let (mid, amp, period) = (
                mid.ok_or_else(|| bad("sin alpha needs mid="))?,
                amp.ok_or_else(|| bad("sin alpha needs amp="))?,
                period.ok_or_else(|| bad("sin alpha needs period="))?,
            );
            let (a, b) = need_bounds()?;
            IndexFunction::sinusoidal(mid, amp, period, a, b)
        }
        "table" => {
            let text = std::fs::read_to_string(rest.trim())?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| bad(format!("table file '{rest}' is not valid JSON: {e}")))?;
            let pull = |key: &str| -> Result<Vec<f64>> {
                v.get(key)
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad(format!("table file needs array key '{key}'")))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| bad(format!("'{key}' holds numbers"))))
                    .collect()
            };
            let xs = pull("xs")?;
            let alphas = pull("alphas")?;
            let (a, b) = need_bounds()?;
            IndexFunction::tabulated(xs, alphas, a, b)
        }
        other => Err(bad(format!(
            "unknown alpha family '{other}' (expected const | affine | sin | table)"
        ))),
    }
}

/// Integrand mini-language:
/// `indicator:lo,hi` | `scaled:c,lo,hi` | `power:coeff,center,exponent,lo,hi`
/// | `expdecay:coeff,rate,lo`.
pub fn parse_func(spec: &str) -> Result<RealFunction> {
    let (family, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("function spec '{spec}' must look like 'family:params'")))?;
    let v = parse_f64_list(rest)?;
    let arity = |n: usize| -> Result<()> {
        if v.len() == n {
            Ok(())
        } else {
            Err(bad(format!(
                "function family '{family}' takes {n} numbers, got {}",
                v.len()
            )))
        }
    };
    match family {
        "indicator" => {
            arity(2)?;
            RealFunction::indicator(v[0], v[1])
        }
        "scaled" => {
            arity(3)?;
            RealFunction::scaled_indicator(v[0], v[1], v[2])
        }
        "power" => {
            arity(5)?;
            RealFunction::power(v[0], v[1], v[2], v[3], v[4])
        }
        "expdecay" => {
            arity(3)?;
            RealFunction::exp_decay(v[0], v[1], v[2])
        }
        other => Err(bad(format!(
            "unknown function family '{other}' (expected indicator | scaled | power | expdecay)"
        ))),
    }
}

/// Weight mini-language for the weighted Lévy kernel:
/// `const:c` | `affine:c0,c1` (as a function of x, on a wide hull).
pub fn parse_weight(spec: &str) -> Result<RealFunction> {
    let (family, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("weight spec '{spec}' must look like 'family:params'")))?;
    let v = parse_f64_list(rest)?;
    match family {
        "const" if v.len() == 1 => RealFunction::scaled_indicator(v[0], -WEIGHT_HULL, WEIGHT_HULL),
        "affine" if v.len() == 2 => {
            let (c0, c1) = (v[0], v[1]);
            RealFunction::from_parts(
                move |x| c0 + c1 * x,
                SupportSpec::bounded(-WEIGHT_HULL, WEIGHT_HULL),
                Vec::new(),
                Vec::new(),
            )
        }
        _ => Err(bad(format!(
            "unknown weight '{spec}' (expected const:c | affine:c0,c1)"
        ))),
    }
}

/// Flag form of interval-union sets; see [`ExperimentConfig::sets_or`].
pub fn parse_sets(s: &str) -> Result<Vec<IntervalUnion>> {
    s.split(',')
        .map(|set| {
            let intervals = set
                .split('+')
                .map(|pair| {
                    let (lo, hi) = pair
                        .split_once(':')
                        .ok_or_else(|| bad(format!("interval '{pair}' must be lo:hi")))?;
                    let lo: f64 = lo
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("interval endpoint '{lo}' is not a number")))?;
                    let hi: f64 = hi
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("interval endpoint '{hi}' is not a number")))?;
                    Ok((lo, hi))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            IntervalUnion::new(intervals)
        })
        .collect()
}

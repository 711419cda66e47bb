//! Processes Y(t) = ∫ f(t, x) dM_α(x) driven by a kernel: the standard
//! kernel families (weighted Lévy-type, reverse Ornstein–Uhlenbeck,
//! linear multifractional stable motion), pathwise simulation of Y on a
//! single shared realization of the dyadic measure, exact marginal
//! characteristic functions, a Hölder-continuity diagnostic, and the
//! frozen-index tangent ("local form") data used by localisability
//! checks.
//!
//! Sign convention for kernels built from indicators: for t < 0 the
//! defining indicator 1_[0,t] is read as −1_[t,0], so increments
//! Y(t₂) − Y(t₁) always integrate the kernel over [t₁, t₂] with a
//! consistent orientation.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function_spaces::{integrate_alpha_power, IndexFunction, RealFunction, SupportSpec};
use crate::multistable_core::{cf_joint, integrate_sample, simulate_increments, CfSpec, DEFAULT_CELL_CAP};
use crate::quad::{QuadratureSpec, Singularity, Tail};
use crate::stable_rng::RngStream;

/// Number of sample-path slices above which integration parallelizes.
const PARALLEL_TIMES: usize = 32;

/// x₊^k with the convention 0^k = 0 for every k (including k = 0), so a
/// vanishing exponent turns each positive-part power into the indicator
/// of {x > 0}.
fn pos_pow(base: f64, exponent: f64) -> f64 {
    if base > 0.0 {
        base.powf(exponent)
    } else {
        0.0
    }
}

/// The kernel families with dedicated slice metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// f(t, x) = w(x)·1_[0,t](x).
    WeightedLevy,
    /// f(t, x) = e^{−λ(x−t)}·1_[t,∞)(x).
    ReverseOu,
    /// Linear multifractional stable motion kernel
    /// f(t, x) = b⁺[(t−x)₊^{κ(x)} − (−x)₊^{κ(x)}]
    ///         + b⁻[(t−x)₋^{κ(x)} − (−x)₋^{κ(x)}],  κ(x) = h − 1/α(x).
    Lfmm,
    /// User-supplied slice family t ↦ f(t, ·).
    Custom,
}

/// Construction parameters for the built-in kernel families.
pub enum KernelParams {
    WeightedLevy { weight: RealFunction },
    ReverseOu { rate: f64 },
    Lfmm { h: f64, b_plus: f64, b_minus: f64 },
}

#[derive(Clone)]
enum KernelInner {
    WeightedLevy {
        weight: RealFunction,
    },
    ReverseOu {
        rate: f64,
    },
    Lfmm {
        h: f64,
        b_plus: f64,
        b_minus: f64,
    },
    Custom {
        slices: Arc<dyn Fn(f64) -> Result<RealFunction> + Send + Sync>,
    },
}

/// A two-argument kernel f(t, x), presented through its time slices
/// f(t, ·) with tight support/singularity metadata, plus the index
/// function α of the driving measure.
#[derive(Clone)]
pub struct ProcessKernel {
    kind: KernelKind,
    alpha: IndexFunction,
    inner: KernelInner,
}

impl fmt::Debug for ProcessKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProcessKernel")
            .field("kind", &self.kind)
            .field("alpha", &self.alpha)
            .finish_non_exhaustive()
    }
}

/// Build one of the standard kernels, enforcing the hypotheses that make
/// the resulting process well defined:
///
/// * reverse Ornstein–Uhlenbeck: 1 < √b < a ≤ b ≤ 2 where [a, b] is the
///   range of α;
/// * linear multifractional stable motion: 1/a − 1/b < h < 1 + 1/b − 1/a
///   (the lower bound keeps every singular cell integrable after raising
///   to the worst exponent, the upper bound keeps the power tails
///   integrable).
pub fn make_kernel(params: KernelParams, alpha: IndexFunction) -> Result<ProcessKernel> {
    let (a, b) = (alpha.lower(), alpha.upper());
    match params {
        KernelParams::WeightedLevy { weight } => Ok(ProcessKernel {
            kind: KernelKind::WeightedLevy,
            alpha,
            inner: KernelInner::WeightedLevy { weight },
        }),
        KernelParams::ReverseOu { rate } => {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "reverse Ornstein-Uhlenbeck kernel needs a finite decay rate > 0, got {rate}"
                )));
            }
            let sqrt_b = b.sqrt();
            if !(1.0 < sqrt_b && sqrt_b < a) {
                return Err(Error::Hypothesis(format!(
                    "reverse Ornstein-Uhlenbeck process requires 1 < sqrt(b) < a <= b <= 2; \
                     got a = {a}, b = {b}, sqrt(b) = {sqrt_b:.6}"
                )));
            }
            Ok(ProcessKernel {
                kind: KernelKind::ReverseOu,
                alpha,
                inner: KernelInner::ReverseOu { rate },
            })
        }
        KernelParams::Lfmm { h, b_plus, b_minus } => {
            if !(h.is_finite() && b_plus.is_finite() && b_minus.is_finite()) {
                return Err(Error::InvalidArgument(
                    "linear multifractional stable motion needs finite h, b_plus, b_minus".into(),
                ));
            }
            if b_plus == 0.0 && b_minus == 0.0 {
                return Err(Error::InvalidArgument(
                    "linear multifractional stable motion needs b_plus, b_minus not both zero"
                        .into(),
                ));
            }
            let lo_gate = 1.0 / a - 1.0 / b;
            let hi_gate = 1.0 + 1.0 / b - 1.0 / a;
            if !(lo_gate < h && h < hi_gate) {
                return Err(Error::Hypothesis(format!(
                    "linear multifractional stable motion requires 1/a - 1/b < h < 1 + 1/b - 1/a; \
                     got h = {h}, 1/a - 1/b = {lo_gate:.6}, 1 + 1/b - 1/a = {hi_gate:.6}"
                )));
            }
            Ok(ProcessKernel {
                kind: KernelKind::Lfmm,
                alpha,
                inner: KernelInner::Lfmm { h, b_plus, b_minus },
            })
        }
    }
}

impl ProcessKernel {
    /// Kernel defined directly by its slice family t ↦ f(t, ·). The
    /// closure owns all support/singularity metadata; no tangent local
    /// form is available.
    pub fn custom(
        slices: impl Fn(f64) -> Result<RealFunction> + Send + Sync + 'static,
        alpha: IndexFunction,
    ) -> ProcessKernel {
        ProcessKernel {
            kind: KernelKind::Custom,
            alpha,
            inner: KernelInner::Custom {
                slices: Arc::new(slices),
            },
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn alpha(&self) -> &IndexFunction {
        &self.alpha
    }

    /// f(t, x). For custom kernels this builds the slice at t; an invalid
    /// t yields NaN there (use `slice` for the error).
    pub fn evaluate(&self, t: f64, x: f64) -> f64 {
        match &self.inner {
            KernelInner::WeightedLevy { weight } => {
                if t == 0.0 {
                    return 0.0;
                }
                let (lo, hi, sign) = if t > 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
                if x >= lo && x <= hi {
                    sign * weight.eval(x)
                } else {
                    0.0
                }
            }
            KernelInner::ReverseOu { rate } => {
                if x >= t {
                    (-rate * (x - t)).exp()
                } else {
                    0.0
                }
            }
            KernelInner::Lfmm { h, b_plus, b_minus } => {
                let k = h - 1.0 / self.alpha.eval(x);
                b_plus * (pos_pow(t - x, k) - pos_pow(-x, k))
                    + b_minus * (pos_pow(x - t, k) - pos_pow(x, k))
            }
            KernelInner::Custom { slices } => match slices(t) {
                Ok(s) => s.eval(x),
                Err(_) => f64::NAN,
            },
        }
    }

    /// The slice f(t, ·) with tight metadata.
    pub fn slice(&self, t: f64) -> Result<RealFunction> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kernel slice needs a finite time, got t = {t}"
            )));
        }
        match &self.inner {
            KernelInner::WeightedLevy { weight } => {
                if t == 0.0 {
                    return Ok(RealFunction::zero());
                }
                let (lo, hi, sign) = if t > 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
                weighted_window(weight, lo, hi, sign)
            }
            KernelInner::ReverseOu { rate } => RealFunction::exp_decay(1.0, *rate, t),
            KernelInner::Lfmm { h, b_plus, b_minus } => {
                if t == 0.0 {
                    return Ok(RealFunction::zero());
                }
                self.lfmm_pair_slice(t, 0.0, *h, *b_plus, *b_minus)
            }
            KernelInner::Custom { slices } => slices(t),
        }
    }

    /// f(t₁, ·) − f(t₂, ·) with metadata tight for the built-in kernels
    /// (for the indicator-built kernels the static parts cancel exactly,
    /// so the difference lives on [min(t₁,t₂), max(t₁,t₂)] plus tails).
    pub fn difference_slice(&self, t1: f64, t2: f64) -> Result<RealFunction> {
        if !(t1.is_finite() && t2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "difference slice needs finite times, got t1 = {t1}, t2 = {t2}"
            )));
        }
        if t1 == t2 {
            return Ok(RealFunction::zero());
        }
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        match &self.inner {
            KernelInner::WeightedLevy { weight } => {
                let sign = if t1 > t2 { 1.0 } else { -1.0 };
                weighted_window(weight, lo, hi, sign)
            }
            KernelInner::ReverseOu { rate } => {
                let r = *rate;
                Ok(RealFunction::from_parts(
                    move |x| {
                        let s1 = if x >= t1 { (-r * (x - t1)).exp() } else { 0.0 };
                        let s2 = if x >= t2 { (-r * (x - t2)).exp() } else { 0.0 };
                        s1 - s2
                    },
                    SupportSpec {
                        lo,
                        hi: hi + 1.0 / r,
                        left_tail: Tail::None,
                        right_tail: Tail::Exponential { rate: r },
                    },
                    Vec::new(),
                    vec![hi],
                )?)
            }
            KernelInner::Lfmm { h, b_plus, b_minus } => {
                self.lfmm_pair_slice(t1, t2, *h, *b_plus, *b_minus)
            }
            KernelInner::Custom { slices } => {
                RealFunction::combine(&[(1.0, slices(t1)?), (-1.0, slices(t2)?)])
            }
        }
    }

    /// b⁺[(t₁−x)₊^{κ(x)} − (t₂−x)₊^{κ(x)}] + b⁻[(x−t₁)₊^{κ(x)} − (x−t₂)₊^{κ(x)}]
    /// — the (−x)₊ / x₊ terms of the full kernel cancel identically in
    /// the difference, leaving power singularities only at t₁ and t₂ and
    /// power-law tails of exponent κ_max − 1 = h − 1/b − 1 on the sides
    /// where b⁺ (left) or b⁻ (right) is active.
    fn lfmm_pair_slice(
        &self,
        t1: f64,
        t2: f64,
        h: f64,
        b_plus: f64,
        b_minus: f64,
    ) -> Result<RealFunction> {
        let alpha = self.alpha.clone();
        let (lo, hi) = (t1.min(t2), t1.max(t2));
        let mut singularities = Vec::new();
        for loc in [t1, t2] {
            let e = h - 1.0 / alpha.eval(loc);
            if e != 0.0 {
                singularities.push(Singularity {
                    location: loc,
                    exponent: e,
                });
            }
        }
        let tail = Tail::PowerLaw {
            exponent: h - 1.0 / alpha.upper() - 1.0,
        };
        let support = SupportSpec {
            lo,
            hi,
            left_tail: if b_plus != 0.0 { tail } else { Tail::None },
            right_tail: if b_minus != 0.0 { tail } else { Tail::None },
        };
        RealFunction::from_parts(
            move |x| {
                let k = h - 1.0 / alpha.eval(x);
                b_plus * (pos_pow(t1 - x, k) - pos_pow(t2 - x, k))
                    + b_minus * (pos_pow(x - t1, k) - pos_pow(x - t2, k))
            },
            support,
            singularities,
            Vec::new(),
        )
    }

    /// Tangent (local-form) data at u: the self-similarity exponent, the
    /// frozen index α(u), and the tangent slice family h(t, ·).
    ///
    /// * weighted Lévy-type: h(t, z) = w(u)·1_[0,t](z), exponent 1/α(u);
    /// * reverse Ornstein–Uhlenbeck: h(t, z) = −1_(0,t)(z), exponent 1/α(u);
    /// * linear multifractional stable motion: the kernel with κ frozen
    ///   at κ_u = h − 1/α(u), exponent h.
    pub fn local_form(&self, u: f64) -> Result<LocalFormSpec> {
        if !u.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "local form needs a finite base point, got u = {u}"
            )));
        }
        let frozen_alpha = self.alpha.eval(u);
        match &self.inner {
            KernelInner::WeightedLevy { weight } => {
                let w_u = weight.eval(u);
                Ok(LocalFormSpec {
                    h_exponent: 1.0 / frozen_alpha,
                    frozen_alpha,
                    tangent: Arc::new(move |t: f64| {
                        if !t.is_finite() {
                            return Err(Error::InvalidArgument(format!(
                                "tangent slice needs a finite time, got t = {t}"
                            )));
                        }
                        let (lo, hi, sign) = if t >= 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
                        RealFunction::scaled_indicator(sign * w_u, lo, hi)
                    }),
                })
            }
            KernelInner::ReverseOu { .. } => Ok(LocalFormSpec {
                h_exponent: 1.0 / frozen_alpha,
                frozen_alpha,
                tangent: Arc::new(move |t: f64| {
                    if !t.is_finite() {
                        return Err(Error::InvalidArgument(format!(
                            "tangent slice needs a finite time, got t = {t}"
                        )));
                    }
                    let (lo, hi, sign) = if t >= 0.0 { (0.0, t, -1.0) } else { (t, 0.0, 1.0) };
                    RealFunction::scaled_indicator(sign, lo, hi)
                }),
            }),
            KernelInner::Lfmm { h, b_plus, b_minus } => {
                let (h, b_plus, b_minus) = (*h, *b_plus, *b_minus);
                let k_u = h - 1.0 / frozen_alpha;
                Ok(LocalFormSpec {
                    h_exponent: h,
                    frozen_alpha,
                    tangent: Arc::new(move |t: f64| {
                        if !t.is_finite() {
                            return Err(Error::InvalidArgument(format!(
                                "tangent slice needs a finite time, got t = {t}"
                            )));
                        }
                        if t == 0.0 {
                            return Ok(RealFunction::zero());
                        }
                        let (lo, hi) = (t.min(0.0), t.max(0.0));
                        let mut singularities = Vec::new();
                        if k_u != 0.0 {
                            singularities.push(Singularity {
                                location: 0.0,
                                exponent: k_u,
                            });
                            singularities.push(Singularity {
                                location: t,
                                exponent: k_u,
                            });
                        }
                        let tail = Tail::PowerLaw { exponent: k_u - 1.0 };
                        RealFunction::from_parts(
                            move |z| {
                                b_plus * (pos_pow(t - z, k_u) - pos_pow(-z, k_u))
                                    + b_minus * (pos_pow(z - t, k_u) - pos_pow(z, k_u))
                            },
                            SupportSpec {
                                lo,
                                hi,
                                left_tail: if b_plus != 0.0 { tail } else { Tail::None },
                                right_tail: if b_minus != 0.0 { tail } else { Tail::None },
                            },
                            singularities,
                            Vec::new(),
                        )
                    }),
                })
            }
            KernelInner::Custom { .. } => Err(Error::InvalidArgument(
                "custom kernels do not carry a tangent local form".into(),
            )),
        }
    }

    /// Truncation level at which simulation windows cut the slice tails:
    /// 10⁻¹² for exponentially decaying kernels (a few units of 1/rate),
    /// 10⁻³ for power-law tails, whose 10⁻¹² reach would be astronomically
    /// wide. Override through `PathConfig::window_epsilon`.
    pub fn default_window_epsilon(&self) -> f64 {
        match self.kind {
            KernelKind::Lfmm => 1e-3,
            _ => 1e-12,
        }
    }

    /// Smallest window [lo, hi] outside which every listed slice's
    /// envelope has decayed below `epsilon` (bounded supports are kept
    /// whole; exponential tails reach ln(1/ε)/rate past the hull;
    /// power-law tails |x|^e reach ε^{1/e} from the origin).
    pub fn window_for(&self, times: &[f64], epsilon: f64) -> Result<(f64, f64)> {
        if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(
                "window needs a nonempty list of finite times".into(),
            ));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "window truncation level must lie in (0, 1), got {epsilon}"
            )));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &t in times {
            let s = self.slice(t)?;
            if s.is_zero() {
                continue;
            }
            let sup = s.support();
            lo = lo.min(match sup.left_tail {
                Tail::None => sup.lo,
                Tail::Exponential { rate } => sup.lo - (1.0 / epsilon).ln() / rate,
                Tail::PowerLaw { exponent } => sup.lo.min(-epsilon.powf(1.0 / exponent)),
            });
            hi = hi.max(match sup.right_tail {
                Tail::None => sup.hi,
                Tail::Exponential { rate } => sup.hi + (1.0 / epsilon).ln() / rate,
                Tail::PowerLaw { exponent } => sup.hi.max(epsilon.powf(1.0 / exponent)),
            });
        }
        if !(lo.is_finite() && hi.is_finite()) {
            // Every slice was zero; any window integrates to zero.
            return Ok((-0.5, 0.5));
        }
        if lo == hi {
            return Ok((lo - 0.5, hi + 0.5));
        }
        Ok((lo, hi))
    }

    /// Simulate Y on the listed (strictly increasing) times: one shared
    /// realization of the dyadic measure at `config.level` over the
    /// ε-window of all slices, then the pathwise integral of each slice
    /// against it. Identical stream + config reproduce the path exactly.
    pub fn sample_path(
        &self,
        times: &[f64],
        config: &PathConfig,
        stream: &RngStream,
        quad: &QuadratureSpec,
    ) -> Result<PathSample> {
        if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(
                "sample path needs a nonempty list of finite times".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument(
                "sampling times must be strictly increasing".into(),
            ));
        }
        let epsilon = config
            .window_epsilon
            .unwrap_or_else(|| self.default_window_epsilon());
        let window = self.window_for(times, epsilon)?;
        let inc = simulate_increments(&self.alpha, config.level, window, stream, config.cell_cap)?;
        let slices: Vec<RealFunction> = times.iter().map(|&t| self.slice(t)).collect::<Result<_>>()?;
        let values: Vec<f64> = if slices.len() > PARALLEL_TIMES {
            slices
                .par_iter()
                .map(|s| integrate_sample(s, &inc, quad))
                .collect::<Result<_>>()?
        } else {
            slices
                .iter()
                .map(|s| integrate_sample(s, &inc, quad))
                .collect::<Result<_>>()?
        };
        Ok(PathSample {
            times: times.to_vec(),
            values,
            level: config.level,
            stream: *stream,
        })
    }

    /// Exact joint characteristic function E exp(i Σ_j θ_j Y(t_j))
    /// computed from the slices (no sampling):
    /// exp(−∫|Σ_j θ_j f(t_j, x)|^{α(x)} dx).
    pub fn marginal_cf(&self, times: &[f64], thetas: &[f64], quad: &QuadratureSpec) -> Result<f64> {
        let functions: Vec<RealFunction> =
            times.iter().map(|&t| self.slice(t)).collect::<Result<_>>()?;
        let spec = CfSpec {
            functions,
            thetas: thetas.to_vec(),
            alpha: self.alpha.clone(),
        };
        cf_joint(&spec, quad)
    }

    /// Kolmogorov-type continuity diagnostic on [interval.0, interval.1]:
    /// requires a = inf α > 1 and a probe exponent 1/a < η < 1, computes
    /// D(t, u) = ∫|f(t, x) − f(u, x)|^{α(x)} dx on a grid of pairs and
    /// fits the smallest c₁ with D(t, u) ≤ c₁·|t − u|^{aη} (aη > 1, which
    /// is what yields a continuous version).
    pub fn continuity_modulus_check(
        &self,
        interval: (f64, f64),
        eta: f64,
        quad: &QuadratureSpec,
    ) -> Result<ContinuityReport> {
        let a = self.alpha.lower();
        if !(a > 1.0) {
            return Err(Error::Hypothesis(format!(
                "continuity criterion requires inf alpha > 1, got a = {a}"
            )));
        }
        if !(1.0 / a < eta && eta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "continuity probe exponent must satisfy 1/a < eta < 1, got eta = {eta}, 1/a = {}",
                1.0 / a
            )));
        }
        let (lo, hi) = interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "continuity check needs a finite interval with lo < hi, got [{lo}, {hi}]"
            )));
        }
        const GRID: usize = 7;
        let ts: Vec<f64> = (0..GRID)
            .map(|i| lo + (hi - lo) * i as f64 / (GRID - 1) as f64)
            .collect();
        let exponent = a * eta;
        let mut c1 = 0.0f64;
        let mut worst_pair = (ts[0], ts[1]);
        let mut pairs_checked = 0usize;
        for i in 0..GRID {
            for j in (i + 1)..GRID {
                let diff = self.difference_slice(ts[j], ts[i])?;
                let dist = integrate_alpha_power(&diff, &self.alpha, quad)?;
                let ratio = dist / (ts[j] - ts[i]).powf(exponent);
                if ratio > c1 {
                    c1 = ratio;
                    worst_pair = (ts[i], ts[j]);
                }
                pairs_checked += 1;
            }
        }
        Ok(ContinuityReport {
            exponent,
            c1,
            worst_pair,
            pairs_checked,
            pass: c1.is_finite(),
        })
    }
}

/// Builds `f(x) = sign·w(x)` on [lo, hi] (zero outside), carrying over
/// w's singularities inside the window and its breakpoints/support edges
/// strictly inside as breakpoints.
fn weighted_window(weight: &RealFunction, lo: f64, hi: f64, sign: f64) -> Result<RealFunction> {
    let singularities: Vec<Singularity> = weight
        .singularities()
        .iter()
        .filter(|s| s.location >= lo && s.location <= hi)
        .copied()
        .collect();
    let mut breakpoints: Vec<f64> = weight
        .breakpoints()
        .iter()
        .copied()
        .filter(|p| *p > lo && *p < hi)
        .collect();
    for edge in [weight.support().lo, weight.support().hi] {
        if edge > lo && edge < hi {
            breakpoints.push(edge);
        }
    }
    let w = weight.clone();
    RealFunction::from_parts(
        move |x| sign * w.eval(x),
        SupportSpec::bounded(lo, hi),
        singularities,
        breakpoints,
    )
}

/// Frozen-index tangent data at a base point u: the process
/// r^{−h}(Y(u + r·t) − Y(u)) converges in finite-dimensional
/// distribution, as r ↓ 0, to ∫ h(t, z) dM_{α(u)}(z) with the tangent
/// slices h(t, ·) below.
#[derive(Clone)]
pub struct LocalFormSpec {
    /// Self-similarity exponent of the tangent process.
    pub h_exponent: f64,
    /// α(u): the tangent process is driven by a constant-index measure.
    pub frozen_alpha: f64,
    tangent: Arc<dyn Fn(f64) -> Result<RealFunction> + Send + Sync>,
}

impl fmt::Debug for LocalFormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalFormSpec")
            .field("h_exponent", &self.h_exponent)
            .field("frozen_alpha", &self.frozen_alpha)
            .finish_non_exhaustive()
    }
}

impl LocalFormSpec {
    /// Assemble tangent data directly from a slice builder.
    pub fn new(
        h_exponent: f64,
        frozen_alpha: f64,
        tangent: impl Fn(f64) -> Result<RealFunction> + Send + Sync + 'static,
    ) -> LocalFormSpec {
        LocalFormSpec {
            h_exponent,
            frozen_alpha,
            tangent: Arc::new(tangent),
        }
    }

    /// Same tangent slices under a different claimed exponent (the
    /// deliberately-wrong variant used by negative controls).
    pub fn with_h_exponent(&self, h_exponent: f64) -> LocalFormSpec {
        LocalFormSpec {
            h_exponent,
            frozen_alpha: self.frozen_alpha,
            tangent: self.tangent.clone(),
        }
    }

    /// The tangent slice h(t, ·).
    pub fn tangent_slice(&self, t: f64) -> Result<RealFunction> {
        (self.tangent)(t)
    }

    /// h(t, z); NaN if the slice cannot be built at t.
    pub fn eval(&self, t: f64, z: f64) -> f64 {
        match self.tangent_slice(t) {
            Ok(s) => s.eval(z),
            Err(_) => f64::NAN,
        }
    }
}

/// Result of the Hölder-continuity diagnostic.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ContinuityReport {
    /// The modulus exponent a·η (> 1 by the precondition on η).
    pub exponent: f64,
    /// Smallest constant with D(t, u) ≤ c₁·|t − u|^{exponent} over the grid.
    pub c1: f64,
    /// Pair attaining the fitted constant.
    pub worst_pair: (f64, f64),
    pub pairs_checked: usize,
    pub pass: bool,
}

/// Path-simulation controls.
#[derive(Debug, Clone, Copy)]
pub struct PathConfig {
    /// Dyadic resolution: cells of width 2^{−level}.
    pub level: u32,
    /// Tail truncation level for the simulation window; `None` uses the
    /// kernel's default (see `default_window_epsilon`).
    pub window_epsilon: Option<f64>,
    /// Refusal threshold on the number of simulated cells.
    pub cell_cap: u64,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            level: 12,
            window_epsilon: None,
            cell_cap: DEFAULT_CELL_CAP,
        }
    }
}

/// One simulated trajectory. All values integrate the same realization
/// of the dyadic measure, so their joint law is the discretized process
/// law, not independent marginals.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Dyadic resolution the measure was simulated at.
    pub level: u32,
    /// Stream the cell draws were derived from (seed provenance).
    pub stream: RngStream,
}

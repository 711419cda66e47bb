//! Index functions α(x) with range [a, b] ⊆ (0, 2], the function classes
//! they induce, and the norms built from them.
//!
//! The central objects are the exponent integral ∫|f(x)|^{α(x)} dx, the
//! classical p-norm ‖f‖_p = (∫|f|^p)^{1/p}, the envelope integral
//! ∫ sup_{p∈[a,b]} |f|^p dx = ∫ max(|f|^a, |f|^b) dx, and the gauge norm
//! ‖f‖_α defined as the unique λ > 0 with ∫|f(x)/λ|^{α(x)} dx = 1.
//! All of them reduce to quadrature over a [`Domain`] assembled from the
//! declared support, tails, breakpoints and singular exponents of `f`
//! composed with the pointwise exponent range.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{self, Domain, QuadratureSpec, Singularity, Tail};

const PROBE_POINTS: usize = 4096;

/// A deterministic stability-index function x ↦ α(x) with certified
/// bounds a ≤ α(x) ≤ b, 0 < a ≤ b ≤ 2.
#[derive(Debug, Clone)]
pub struct IndexFunction {
    repr: IndexRepr,
    a: f64,
    b: f64,
}

#[derive(Debug, Clone)]
enum IndexRepr {
    Constant { value: f64 },
    AffineClamped { intercept: f64, slope: f64 },
    Sinusoidal { mid: f64, amp: f64, period: f64 },
    PiecewiseConstant { cuts: Vec<f64>, values: Vec<f64> },
    Tabulated { xs: Vec<f64>, alphas: Vec<f64> },
}

fn check_bounds(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a <= b && b <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "index bounds must satisfy 0 < a <= b <= 2, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

impl IndexFunction {
    pub fn constant(value: f64) -> Result<IndexFunction> {
        check_bounds(value, value)?;
        Ok(IndexFunction {
            repr: IndexRepr::Constant { value },
            a: value,
            b: value,
        })
    }

    /// α(x) = clamp(intercept + slope·x, a, b).
    pub fn affine(intercept: f64, slope: f64, a: f64, b: f64) -> Result<IndexFunction> {
        check_bounds(a, b)?;
        if !intercept.is_finite() || !slope.is_finite() {
            return Err(Error::InvalidArgument(
                "affine index parameters must be finite".into(),
            ));
        }
        Ok(IndexFunction {
            repr: IndexRepr::AffineClamped { intercept, slope },
            a,
            b,
        })
    }

    /// α(x) = mid + amp·sin(2πx / period); the range [mid−|amp|, mid+|amp|]
    /// must sit inside [a, b].
    pub fn sinusoidal(mid: f64, amp: f64, period: f64, a: f64, b: f64) -> Result<IndexFunction> {
        check_bounds(a, b)?;
        if !(period.is_finite() && period != 0.0) || !mid.is_finite() || !amp.is_finite() {
            return Err(Error::InvalidArgument(
                "sinusoidal index needs finite mid/amp and nonzero period".into(),
            ));
        }
        if mid - amp.abs() < a || mid + amp.abs() > b {
            return Err(Error::InvalidArgument(format!(
                "sinusoidal range [{}, {}] exceeds declared bounds [{a}, {b}]",
                mid - amp.abs(),
                mid + amp.abs()
            )));
        }
        let out = IndexFunction {
            repr: IndexRepr::Sinusoidal { mid, amp, period },
            a,
            b,
        };
        out.probe(0.0, period.abs())?;
        Ok(out)
    }

    /// α(x) = values[i] on [cuts[i−1], cuts[i]), extended by the end
    /// values outside the cut range; values.len() == cuts.len() + 1.
    pub fn piecewise_constant(cuts: Vec<f64>, values: Vec<f64>, a: f64, b: f64) -> Result<IndexFunction> {
        check_bounds(a, b)?;
        if values.len() != cuts.len() + 1 || values.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "piecewise-constant index needs len(values) == len(cuts) + 1, got {} cuts and {} values",
                cuts.len(),
                values.len()
            )));
        }
        if cuts.windows(2).any(|w| !(w[0] < w[1])) || cuts.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "piecewise-constant cuts must be finite and strictly increasing".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= a && **v <= b)) {
            return Err(Error::InvalidArgument(format!(
                "piecewise-constant value {v} outside declared bounds [{a}, {b}]"
            )));
        }
        Ok(IndexFunction {
            repr: IndexRepr::PiecewiseConstant { cuts, values },
            a,
            b,
        })
    }

    /// Linear interpolation through (xs[i], alphas[i]), constant beyond the
    /// first and last knots.
    pub fn tabulated(xs: Vec<f64>, alphas: Vec<f64>, a: f64, b: f64) -> Result<IndexFunction> {
        check_bounds(a, b)?;
        if xs.len() != alphas.len() || xs.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "tabulated index needs matching xs/alphas with at least 2 knots, got {} and {}",
                xs.len(),
                alphas.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "tabulated knots must be finite and strictly increasing".into(),
            ));
        }
        if let Some(v) = alphas.iter().find(|v| !(**v >= a && **v <= b)) {
            return Err(Error::InvalidArgument(format!(
                "tabulated value {v} outside declared bounds [{a}, {b}]"
            )));
        }
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        let out = IndexFunction {
            repr: IndexRepr::Tabulated { xs, alphas },
            a,
            b,
        };
        out.probe(lo, hi)?;
        Ok(out)
    }

    /// Dense-grid check that evaluation stays within [a, b].
    fn probe(&self, lo: f64, hi: f64) -> Result<()> {
        for i in 0..PROBE_POINTS {
            let x = lo + (hi - lo) * i as f64 / (PROBE_POINTS - 1) as f64;
            let v = self.raw_eval(x);
            if !(v >= self.a - 1e-12 && v <= self.b + 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "index function leaves [{}, {}]: value {v} at x = {x}",
                    self.a, self.b
                )));
            }
        }
        Ok(())
    }

    fn raw_eval(&self, x: f64) -> f64 {
        match &self.repr {
            IndexRepr::Constant { value } => *value,
            IndexRepr::AffineClamped { intercept, slope } => {
                (intercept + slope * x).clamp(self.a, self.b)
            }
            IndexRepr::Sinusoidal { mid, amp, period } => {
                mid + amp * (2.0 * std::f64::consts::PI * x / period).sin()
            }
            IndexRepr::PiecewiseConstant { cuts, values } => {
                let idx = cuts.partition_point(|c| *c <= x);
                values[idx]
            }
            IndexRepr::Tabulated { xs, alphas } => {
                if x <= xs[0] {
                    alphas[0]
                } else if x >= xs[xs.len() - 1] {
                    alphas[alphas.len() - 1]
                } else {
                    let j = xs.partition_point(|k| *k <= x);
                    let (x0, x1) = (xs[j - 1], xs[j]);
                    let t = (x - x0) / (x1 - x0);
                    alphas[j - 1] + t * (alphas[j] - alphas[j - 1])
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let v = self.raw_eval(x);
        assert!(
            v >= self.a - 1e-9 && v <= self.b + 1e-9,
            "index function invariant violated: value {v} outside [{}, {}] at x = {x}",
            self.a,
            self.b
        );
        v.clamp(self.a, self.b)
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.repr, IndexRepr::Constant { .. }) || self.a == self.b
    }

    /// Points in (lo, hi) where α is not smooth: jump locations, knots,
    /// and clamp crossings.
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out: Vec<f64> = match &self.repr {
            IndexRepr::Constant { .. } | IndexRepr::Sinusoidal { .. } => Vec::new(),
            IndexRepr::AffineClamped { intercept, slope } => {
                if *slope == 0.0 {
                    Vec::new()
                } else {
                    [(self.a - intercept) / slope, (self.b - intercept) / slope].to_vec()
                }
            }
            IndexRepr::PiecewiseConstant { cuts, .. } => cuts.clone(),
            IndexRepr::Tabulated { xs, .. } => xs.clone(),
        };
        out.retain(|x| *x > lo && *x < hi);
        out.sort_by(|p, q| p.partial_cmp(q).unwrap());
        out
    }
}

/// Declared support of a real function: a bounded hull plus optional
/// decay tails beyond each edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportSpec {
    pub lo: f64,
    pub hi: f64,
    pub left_tail: Tail,
    pub right_tail: Tail,
}

impl SupportSpec {
    pub fn bounded(lo: f64, hi: f64) -> SupportSpec {
        SupportSpec {
            lo,
            hi,
            left_tail: Tail::None,
            right_tail: Tail::None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.left_tail.is_none() && self.right_tail.is_none()
    }
}

/// A real-valued integrand with declared support, decay tails, jump
/// points, and power-law singular exponents.
#[derive(Clone)]
pub struct RealFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support: SupportSpec,
    singularities: Vec<Singularity>,
    breakpoints: Vec<f64>,
}

impl std::fmt::Debug for RealFunction {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("RealFunction")
            .field("support", &self.support)
            .field("singularities", &self.singularities)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl RealFunction {
    /// The zero function.
    pub fn zero() -> RealFunction {
        RealFunction {
            f: Arc::new(|_| 0.0),
            support: SupportSpec::bounded(0.0, 0.0),
            singularities: Vec::new(),
            breakpoints: Vec::new(),
        }
    }

    /// 1 on [lo, hi], 0 elsewhere.
    pub fn indicator(lo: f64, hi: f64) -> Result<RealFunction> {
        Self::scaled_indicator(1.0, lo, hi)
    }

    /// c on [lo, hi], 0 elsewhere.
    pub fn scaled_indicator(c: f64, lo: f64, hi: f64) -> Result<RealFunction> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "indicator needs finite lo <= hi and finite scale, got c = {c} on [{lo}, {hi}]"
            )));
        }
        if c == 0.0 || lo == hi {
            return Ok(RealFunction::zero());
        }
        Ok(RealFunction {
            f: Arc::new(move |x| if x >= lo && x <= hi { c } else { 0.0 }),
            support: SupportSpec::bounded(lo, hi),
            singularities: Vec::new(),
            breakpoints: Vec::new(),
        })
    }

    /// values[i] on [edges[i], edges[i+1]), 0 outside [edges[0], edges[n]].
    pub fn step(edges: Vec<f64>, values: Vec<f64>) -> Result<RealFunction> {
        if edges.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "step function needs len(edges) == len(values) + 1, got {} edges and {} values",
                edges.len(),
                values.len()
            )));
        }
        if edges.windows(2).any(|w| !(w[0] < w[1]))
            || edges.iter().any(|e| !e.is_finite())
            || values.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "step function needs finite strictly increasing edges and finite values".into(),
            ));
        }
        let support = SupportSpec::bounded(edges[0], edges[edges.len() - 1]);
        let breakpoints = edges[1..edges.len() - 1].to_vec();
        let (e, v) = (edges, values);
        Ok(RealFunction {
            f: Arc::new(move |x| {
                if x < e[0] || x > e[e.len() - 1] {
                    0.0
                } else {
                    let idx = e.partition_point(|k| *k <= x).min(v.len());
                    v[idx.saturating_sub(1).min(v.len() - 1)]
                }
            }),
            support,
            singularities: Vec::new(),
            breakpoints,
        })
    }

    /// coeff·|x − center|^exponent on [lo, hi], 0 elsewhere; the power-law
    /// behaviour at `center` is declared when it lies inside the support.
    pub fn power(coeff: f64, center: f64, exponent: f64, lo: f64, hi: f64) -> Result<RealFunction> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi)
            || !coeff.is_finite()
            || !center.is_finite()
            || !exponent.is_finite()
        {
            return Err(Error::InvalidArgument(
                "power function needs finite parameters and lo <= hi".into(),
            ));
        }
        if coeff == 0.0 || lo == hi {
            return Ok(RealFunction::zero());
        }
        let mut singularities = Vec::new();
        let mut breakpoints = Vec::new();
        if exponent != 0.0 && center >= lo && center <= hi {
            singularities.push(Singularity {
                location: center,
                exponent,
            });
            if center > lo && center < hi {
                breakpoints.push(center);
            }
        }
        Ok(RealFunction {
            f: Arc::new(move |x| {
                if x >= lo && x <= hi {
                    coeff * (x - center).abs().powf(exponent)
                } else {
                    0.0
                }
            }),
            support: SupportSpec::bounded(lo, hi),
            singularities,
            breakpoints,
        })
    }

    /// coeff·exp(−rate·(x − lo)) on [lo, ∞), 0 below lo.
    pub fn exp_decay(coeff: f64, rate: f64, lo: f64) -> Result<RealFunction> {
        if !(rate > 0.0 && rate.is_finite()) || !coeff.is_finite() || !lo.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "exponential decay needs finite parameters and rate > 0, got rate = {rate}"
            )));
        }
        if coeff == 0.0 {
            return Ok(RealFunction::zero());
        }
        Ok(RealFunction {
            f: Arc::new(move |x| if x >= lo { coeff * (-rate * (x - lo)).exp() } else { 0.0 }),
            support: SupportSpec {
                lo,
                hi: lo + 1.0 / rate,
                left_tail: Tail::None,
                right_tail: Tail::Exponential { rate },
            },
            singularities: Vec::new(),
            breakpoints: Vec::new(),
        })
    }

    /// Wrap an arbitrary evaluator with explicit support metadata. The
    /// evaluator is still masked to the declared support.
    pub fn from_parts(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: SupportSpec,
        singularities: Vec<Singularity>,
        breakpoints: Vec<f64>,
    ) -> Result<RealFunction> {
        if !(support.lo.is_finite() && support.hi.is_finite() && support.lo <= support.hi) {
            return Err(Error::InvalidArgument(format!(
                "support hull must be finite with lo <= hi, got [{}, {}]",
                support.lo, support.hi
            )));
        }
        if singularities
            .iter()
            .any(|s| !s.location.is_finite() || !s.exponent.is_finite())
            || breakpoints.iter().any(|b| !b.is_finite())
        {
            return Err(Error::InvalidArgument(
                "singularities and breakpoints must be finite".into(),
            ));
        }
        Ok(RealFunction {
            f: Arc::new(f),
            support,
            singularities,
            breakpoints,
        })
    }

    /// f(x), forced to 0 outside the declared support.
    pub fn eval(&self, x: f64) -> f64 {
        if (x < self.support.lo && self.support.left_tail.is_none())
            || (x > self.support.hi && self.support.right_tail.is_none())
        {
            return 0.0;
        }
        (self.f)(x)
    }

    pub fn support(&self) -> SupportSpec {
        self.support
    }

    pub fn singularities(&self) -> &[Singularity] {
        &self.singularities
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// True only for the canonical zero function (empty support, no tails).
    pub fn is_zero(&self) -> bool {
        self.support.is_bounded() && self.support.lo == self.support.hi
    }

    /// c·f with unchanged support metadata.
    pub fn scale(&self, c: f64) -> RealFunction {
        if c == 0.0 {
            return RealFunction::zero();
        }
        let inner = self.clone();
        RealFunction {
            f: Arc::new(move |x| c * inner.eval(x)),
            support: self.support,
            singularities: self.singularities.clone(),
            breakpoints: self.breakpoints.clone(),
        }
    }

    /// Pointwise linear combination Σ cᵢ·fᵢ with merged support metadata:
    /// the hull is the union hull, each side keeps the slowest declared
    /// decay, singular exponents at shared locations keep the most
    /// singular one, and every part's support edge becomes a breakpoint.
    pub fn combine(parts: &[(f64, RealFunction)]) -> Result<RealFunction> {
        let live: Vec<(f64, RealFunction)> = parts
            .iter()
            .filter(|(c, f)| *c != 0.0 && !f.is_zero())
            .cloned()
            .collect();
        if live.is_empty() {
            return Ok(RealFunction::zero());
        }
        if live.iter().any(|(c, _)| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "combination coefficients must be finite".into(),
            ));
        }
        let lo = live.iter().map(|(_, f)| f.support.lo).fold(f64::INFINITY, f64::min);
        let hi = live.iter().map(|(_, f)| f.support.hi).fold(f64::NEG_INFINITY, f64::max);
        let left_tail = merge_tails(live.iter().map(|(_, f)| f.support.left_tail));
        let right_tail = merge_tails(live.iter().map(|(_, f)| f.support.right_tail));

        let mut breakpoints: Vec<f64> = Vec::new();
        for (_, f) in &live {
            breakpoints.extend_from_slice(&f.breakpoints);
            breakpoints.push(f.support.lo);
            breakpoints.push(f.support.hi);
        }
        breakpoints.sort_by(|p, q| p.partial_cmp(q).unwrap());
        breakpoints.dedup_by(|p, q| (*p - *q).abs() <= 1e-12 * (1.0 + p.abs().max(q.abs())));

        let mut singularities: Vec<Singularity> = Vec::new();
        for (_, f) in &live {
            for s in &f.singularities {
                match singularities.iter_mut().find(|t| {
                    (t.location - s.location).abs() <= 1e-12 * (1.0 + s.location.abs())
                }) {
                    Some(t) => t.exponent = t.exponent.min(s.exponent),
                    None => singularities.push(*s),
                }
            }
        }

        let fs = live;
        Ok(RealFunction {
            f: Arc::new(move |x| {
                let terms: Vec<f64> = fs.iter().map(|(c, f)| c * f.eval(x)).collect();
                quad::pairwise_sum(&terms)
            }),
            support: SupportSpec {
                lo,
                hi,
                left_tail,
                right_tail,
            },
            singularities,
            breakpoints,
        })
    }

    /// g(z) = f(u + r·z) for r > 0, with support metadata mapped through
    /// the same affine change of variables: locations move by
    /// x ↦ (x − u)/r, exponential tail rates multiply by r, and power-law
    /// tail exponents are unchanged.
    pub fn precompose_affine(&self, u: f64, r: f64) -> Result<RealFunction> {
        if !(r > 0.0 && r.is_finite()) || !u.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "affine precompose needs finite u and r > 0, got u = {u}, r = {r}"
            )));
        }
        let map_tail = |t: Tail| match t {
            Tail::Exponential { rate } => Tail::Exponential { rate: rate * r },
            other => other,
        };
        let inner = self.clone();
        Ok(RealFunction {
            f: Arc::new(move |z| inner.eval(u + r * z)),
            support: SupportSpec {
                lo: (self.support.lo - u) / r,
                hi: (self.support.hi - u) / r,
                left_tail: map_tail(self.support.left_tail),
                right_tail: map_tail(self.support.right_tail),
            },
            singularities: self
                .singularities
                .iter()
                .map(|s| Singularity {
                    location: (s.location - u) / r,
                    exponent: s.exponent,
                })
                .collect(),
            breakpoints: self.breakpoints.iter().map(|p| (p - u) / r).collect(),
        })
    }

    /// Quadrature domain for ∫ φ(|f(x)|) dx where φ raises |f| to powers
    /// ranging over [exp_lo, exp_hi]: singular exponents compose with the
    /// worst exponent in the range, tails with the slowest one.
    pub fn composed_domain(
        &self,
        alpha_breaks: &[f64],
        exp_lo: f64,
        exp_hi: f64,
    ) -> Result<Domain> {
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.extend_from_slice(alpha_breaks);
        let mut singularities = Vec::with_capacity(self.singularities.len());
        for s in &self.singularities {
            let composed = if s.exponent < 0.0 {
                let ce = s.exponent * exp_hi;
                if ce <= -1.0 {
                    return Err(Error::NonIntegrableSingularity {
                        location: s.location,
                        exponent: s.exponent,
                        alpha_lo: exp_lo,
                        alpha_hi: exp_hi,
                    });
                }
                ce
            } else {
                s.exponent * exp_lo
            };
            singularities.push(Singularity {
                location: s.location,
                exponent: composed,
            });
        }
        let compose_tail = |tail: Tail| -> Result<Tail> {
            match tail {
                Tail::None => Ok(Tail::None),
                Tail::Exponential { rate } => Ok(Tail::Exponential {
                    rate: rate * exp_lo,
                }),
                Tail::PowerLaw { exponent } => {
                    let ce = exponent * exp_lo;
                    if ce >= -1.0 {
                        return Err(Error::NonIntegrableTail { exponent: ce });
                    }
                    Ok(Tail::PowerLaw { exponent: ce })
                }
            }
        };
        Ok(Domain {
            lo: self.support.lo,
            hi: self.support.hi,
            left_tail: compose_tail(self.support.left_tail)?,
            right_tail: compose_tail(self.support.right_tail)?,
            breakpoints,
            singularities,
        })
    }
}

fn merge_tails(tails: impl Iterator<Item = Tail>) -> Tail {
    let mut merged = Tail::None;
    for t in tails {
        merged = match (merged, t) {
            (m, Tail::None) => m,
            (Tail::None, t) => t,
            (Tail::Exponential { rate: r1 }, Tail::Exponential { rate: r2 }) => {
                Tail::Exponential { rate: r1.min(r2) }
            }
            (Tail::PowerLaw { exponent: e1 }, Tail::PowerLaw { exponent: e2 }) => {
                Tail::PowerLaw {
                    exponent: e1.max(e2),
                }
            }
            // A power law decays slower than any exponential.
            (Tail::PowerLaw { exponent }, Tail::Exponential { .. })
            | (Tail::Exponential { .. }, Tail::PowerLaw { exponent }) => {
                Tail::PowerLaw { exponent }
            }
        };
    }
    merged
}

/// ∫ |f(x)|^{α(x)} dx.
pub fn integrate_alpha_power(
    f: &RealFunction,
    alpha: &IndexFunction,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let breaks = alpha.breakpoints_in(-1e15, 1e15);
    let dom = f.composed_domain(&breaks, alpha.lower(), alpha.upper())?;
    let alpha = alpha.clone();
    let g = f.clone();
    let r = quad::integrate(move |x| g.eval(x).abs().powf(alpha.eval(x)), &dom, quad)?;
    Ok(r.value.max(0.0))
}

/// ∫ max(|f(x)|^a, |f(x)|^b) dx, the pointwise envelope of |f|^p over
/// p ∈ [a, b].
pub fn integrate_exponent_envelope(
    f: &RealFunction,
    a: f64,
    b: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(a > 0.0 && a <= b) {
        return Err(Error::InvalidArgument(format!(
            "envelope exponents must satisfy 0 < a <= b, got a = {a}, b = {b}"
        )));
    }
    let dom = f.composed_domain(&[], a, b)?;
    let g = f.clone();
    let r = quad::integrate(
        move |x| {
            let y = g.eval(x).abs();
            if y <= 1.0 {
                y.powf(a)
            } else {
                y.powf(b)
            }
        },
        &dom,
        quad,
    )?;
    Ok(r.value.max(0.0))
}

/// ‖f‖_p = (∫|f|^p dx)^{1/p}.
pub fn norm_p(f: &RealFunction, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "norm exponent must be positive and finite, got {p}"
        )));
    }
    let dom = f.composed_domain(&[], p, p)?;
    let g = f.clone();
    let r = quad::integrate(move |x| g.eval(x).abs().powf(p), &dom, quad)?;
    Ok(r.value.max(0.0).powf(1.0 / p))
}

const BRACKET_LIMIT: f64 = 1.8446744073709552e19; // 2^64

/// The gauge norm ‖f‖_α: the unique λ > 0 with ∫|f(x)/λ|^{α(x)} dx = 1,
/// found by doubling/halving from λ = 1 and then bisection to relative
/// width 1e-10. Returns 0 for the zero function.
pub fn luxemburg_norm(
    f: &RealFunction,
    alpha: &IndexFunction,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let breaks = alpha.breakpoints_in(-1e15, 1e15);
    let dom = f.composed_domain(&breaks, alpha.lower(), alpha.upper())?;
    let rho = |lambda: f64| -> Result<f64> {
        let g = f.clone();
        let al = alpha.clone();
        let r = quad::integrate(
            move |x| (g.eval(x).abs() / lambda).powf(al.eval(x)),
            &dom,
            quad,
        )?;
        Ok(r.value.max(0.0))
    };

    let r1 = rho(1.0)?;
    if r1 == 0.0 {
        return Ok(0.0);
    }
    // rho is continuous and strictly decreasing in lambda for nonzero f,
    // so a sign change brackets the unique root.
    let (mut lo, mut hi) = if r1 == 1.0 {
        return Ok(1.0);
    } else if r1 > 1.0 {
        let mut lo = 1.0;
        let mut hi = 2.0;
        loop {
            let r = rho(hi)?;
            if r <= 1.0 {
                break (lo, hi);
            }
            lo = hi;
            hi *= 2.0;
            if hi > BRACKET_LIMIT {
                return Err(Error::BracketFailure { lambda: hi, rho: r });
            }
        }
    } else {
        let mut hi = 1.0;
        let mut lo = 0.5;
        loop {
            let r = rho(lo)?;
            if r >= 1.0 {
                break (lo, hi);
            }
            hi = lo;
            lo *= 0.5;
            if lo < 1.0 / BRACKET_LIMIT {
                return Err(Error::BracketFailure { lambda: lo, rho: r });
            }
        }
    };

    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if rho(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Modulus report for the index-regularity diagnostic: m(r) is the probe
/// supremum of |α(x+r) − α(x)|·|ln r| over the interval.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LogContinuityReport {
    pub r_values: Vec<f64>,
    pub m_values: Vec<f64>,
    /// True when m(r) both never increases along the sequence and ends
    /// noticeably below where it started (or is negligible throughout).
    /// A grid diagnostic, not a proof.
    pub plausibly_satisfied: bool,
}

/// Probe whether sup |α(x+r) − α(x)| shrinks faster than 1/|ln r| on the
/// interval, the regularity under which localisation arguments operate.
pub fn log_continuity_diagnostic(
    alpha: &IndexFunction,
    interval: (f64, f64),
    r_values: &[f64],
) -> Result<LogContinuityReport> {
    let (lo, hi) = interval;
    if r_values.is_empty() {
        return Err(Error::InvalidArgument(
            "log-continuity diagnostic needs at least one r value".into(),
        ));
    }
    if r_values.windows(2).any(|w| !(w[0] > w[1]))
        || r_values.iter().any(|r| !(*r > 0.0 && *r < 1.0))
    {
        return Err(Error::InvalidArgument(
            "r values must be strictly decreasing and inside (0, 1)".into(),
        ));
    }
    if !(lo.is_finite() && hi.is_finite() && hi - lo > r_values[0]) {
        return Err(Error::InvalidArgument(format!(
            "interval [{lo}, {hi}] must be finite and longer than the largest r"
        )));
    }

    let mut m_values = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let window_hi = hi - r;
        let mut probes: Vec<f64> = (0..PROBE_POINTS)
            .map(|i| lo + (window_hi - lo) * i as f64 / (PROBE_POINTS - 1) as f64)
            .collect();
        // The grid alone can miss structure concentrated at knots or
        // jumps, so probe those points and their r-shifted preimages too.
        for b in alpha.breakpoints_in(lo - r, hi + r) {
            for cand in [b, b - r] {
                if cand >= lo && cand <= window_hi {
                    probes.push(cand);
                }
            }
        }
        let log_factor = r.ln().abs();
        let m = probes
            .iter()
            .map(|&x| (alpha.eval(x + r) - alpha.eval(x)).abs() * log_factor)
            .fold(0.0, f64::max);
        m_values.push(m);
    }

    let non_increasing = m_values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let shrinks = m_values[m_values.len() - 1] <= 0.9 * m_values[0] + 1e-12;
    Ok(LogContinuityReport {
        r_values: r_values.to_vec(),
        m_values,
        plausibly_satisfied: non_increasing && shrinks,
    })
}

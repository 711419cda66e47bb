//! Composite Gauss–Legendre quadrature on graded meshes.
//!
//! An integrand is described by a [`Domain`]: a bounded hull, optional
//! decay tails beyond the hull, interior breakpoints where smoothness is
//! lost, and power singularities with known exponents. Tails are folded
//! onto bounded reference segments by an exact change of variables
//! (logarithmic for exponential decay, reciprocal for power decay), the
//! mesh is graded toward declared singular points, and the cell budget is
//! doubled until two successive estimates agree to tolerance.
//!
//! Cells and segments are always reduced with a fixed pairwise tree, so a
//! result depends only on the inputs, never on evaluation order.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes per quadrature cell.
pub const GL_ORDER: usize = 16;

const MAX_REFINEMENTS: usize = 14;

/// Tolerances and mesh controls for the quadrature engine.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Baseline number of cells distributed over the bounded hull (>= 16).
    pub base_cells: usize,
    /// Minimum mesh grading exponent toward declared singular points (>= 1).
    /// The engine raises it automatically when a declared exponent needs
    /// stronger clustering to reach tolerance.
    pub grading_exponent: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Envelope threshold used when truncating simulation windows on
    /// unbounded supports. Analytic integrals do not truncate (tails are
    /// mapped onto bounded segments instead).
    pub truncation_epsilon: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            base_cells: 64,
            grading_exponent: 2.0,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            truncation_epsilon: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_cells < 16 {
            return Err(Error::InvalidArgument(format!(
                "base_cells must be >= 16, got {}",
                self.base_cells
            )));
        }
        if !(self.grading_exponent >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "grading_exponent must be >= 1, got {}",
                self.grading_exponent
            )));
        }
        for (name, v) in [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("truncation_epsilon", self.truncation_epsilon),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Decay envelope beyond a bounded hull edge.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Tail {
    None,
    /// |g(x)| <= C exp(-rate * dist(x, hull)) beyond the hull edge.
    Exponential { rate: f64 },
    /// |g(x)| <= C |x|^exponent for large |x|.
    PowerLaw { exponent: f64 },
}

impl Tail {
    pub fn is_none(&self) -> bool {
        matches!(self, Tail::None)
    }
}

/// Power behaviour |g(x)| ~ c |x - location|^exponent at a point.
/// Exponents in (-1, 0) are integrable singularities; exponent >= 0 marks
/// a kink that only needs a mesh break and mild grading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub location: f64,
    pub exponent: f64,
}

/// Full description of where and how an integrand lives.
#[derive(Debug, Clone)]
pub struct Domain {
    /// Bounded hull. Tails, when present, extend beyond these edges.
    pub lo: f64,
    pub hi: f64,
    pub left_tail: Tail,
    pub right_tail: Tail,
    /// Points where the integrand jumps or loses smoothness; the mesh
    /// never straddles them. Points outside the hull split tail segments.
    pub breakpoints: Vec<f64>,
    pub singularities: Vec<Singularity>,
}

impl Domain {
    pub fn bounded(lo: f64, hi: f64) -> Domain {
        Domain {
            lo,
            hi,
            left_tail: Tail::None,
            right_tail: Tail::None,
            breakpoints: Vec::new(),
            singularities: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi) {
            return Err(Error::InvalidArgument(format!(
                "domain hull must satisfy lo <= hi and be finite, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        for s in &self.singularities {
            if !s.location.is_finite() || !s.exponent.is_finite() {
                return Err(Error::InvalidArgument(
                    "non-finite singularity description".into(),
                ));
            }
            if s.exponent <= -1.0 {
                return Err(Error::InvalidArgument(format!(
                    "singularity at {} has non-integrable exponent {}",
                    s.location, s.exponent
                )));
            }
        }
        for tail in [&self.left_tail, &self.right_tail] {
            match tail {
                Tail::Exponential { rate } if !(*rate > 0.0 && rate.is_finite()) => {
                    return Err(Error::InvalidArgument(format!(
                        "exponential tail rate must be positive, got {rate}"
                    )));
                }
                Tail::PowerLaw { exponent } if !(*exponent < -1.0) => {
                    return Err(Error::NonIntegrableTail {
                        exponent: *exponent,
                    });
                }
                _ => {}
            }
        }
        if self.breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("non-finite breakpoint".into()));
        }
        Ok(())
    }
}

/// Converged integral value together with the last refinement delta.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Sum a slice with a fixed pairwise reduction tree. Deterministic for a
/// given input order and more accurate than a running sum.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        acc
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

fn legendre_p_dp(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// 16-point Gauss–Legendre rule on [-1, 1], computed once by Newton
/// iteration on P_16 (exact for polynomials of degree <= 31).
pub fn gl_nodes() -> &'static [(f64, f64); GL_ORDER] {
    static TABLE: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = GL_ORDER;
        let mut out = [(0.0, 0.0); GL_ORDER];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..64 {
                let (p, dp) = legendre_p_dp(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_p_dp(n, x);
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

#[derive(Debug, Clone, Copy)]
enum SegMap {
    Identity,
    /// x = edge - ln(v)/rate maps v in (0,1] onto [edge, +inf).
    ExpRight { edge: f64, rate: f64 },
    /// x = edge + ln(v)/rate maps v in (0,1] onto (-inf, edge].
    ExpLeft { edge: f64, rate: f64 },
    /// x = edge/v, edge >= 1, maps v in (0,1] onto [edge, +inf).
    PowRight { edge: f64 },
    /// x = edge/v, edge <= -1, maps v in (0,1] onto (-inf, edge].
    PowLeft { edge: f64 },
}

impl SegMap {
    #[inline]
    fn apply(self, v: f64) -> (f64, f64) {
        match self {
            SegMap::Identity => (v, 1.0),
            SegMap::ExpRight { edge, rate } => (edge - v.ln() / rate, 1.0 / (rate * v)),
            SegMap::ExpLeft { edge, rate } => (edge + v.ln() / rate, 1.0 / (rate * v)),
            SegMap::PowRight { edge } => (edge / v, edge / (v * v)),
            SegMap::PowLeft { edge } => (edge / v, -edge / (v * v)),
        }
    }

    fn is_tail(self) -> bool {
        !matches!(self, SegMap::Identity)
    }
}

#[derive(Debug, Clone)]
struct Segment {
    lo: f64,
    hi: f64,
    map: SegMap,
    sing_lo: Option<f64>,
    sing_hi: Option<f64>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn sing_at(dom: &Domain, x: f64) -> Option<f64> {
    dom.singularities
        .iter()
        .find(|s| close(s.location, x))
        .map(|s| s.exponent)
}

/// Split segments whose both endpoints are singular so that grading always
/// targets a single end.
fn normalize(mut segs: Vec<Segment>) -> Vec<Segment> {
    let mut out = Vec::with_capacity(segs.len());
    for seg in segs.drain(..) {
        if seg.sing_lo.is_some() && seg.sing_hi.is_some() {
            let mid = 0.5 * (seg.lo + seg.hi);
            out.push(Segment {
                hi: mid,
                sing_hi: None,
                ..seg.clone()
            });
            out.push(Segment {
                lo: mid,
                sing_lo: None,
                ..seg
            });
        } else {
            out.push(seg);
        }
    }
    out
}

fn build_segments(dom: &Domain) -> Result<Vec<Segment>> {
    dom.validate()?;
    let mut segs = Vec::new();

    // Bounded hull, cut at breakpoints and singular locations.
    let mut cuts: Vec<f64> = dom
        .breakpoints
        .iter()
        .chain(dom.singularities.iter().map(|s| &s.location))
        .copied()
        .filter(|&x| x > dom.lo && x < dom.hi)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| close(*a, *b));
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(dom.lo);
    edges.extend(cuts);
    edges.push(dom.hi);
    for w in edges.windows(2) {
        let (p, q) = (w[0], w[1]);
        if q - p > 0.0 {
            segs.push(Segment {
                lo: p,
                hi: q,
                map: SegMap::Identity,
                sing_lo: sing_at(dom, p),
                sing_hi: sing_at(dom, q),
            });
        }
    }

    // Tails: map onto (0, 1], splitting at breakpoints that fall inside
    // the tail region so jumps in the original variable stay on the mesh.
    let add_tail = |segs: &mut Vec<Segment>, right: bool| -> Result<()> {
        let tail = if right { dom.right_tail } else { dom.left_tail };
        let hull_edge = if right { dom.hi } else { dom.lo };
        let (map, edge, v_sing) = match tail {
            Tail::None => return Ok(()),
            Tail::Exponential { rate } => {
                let map = if right {
                    SegMap::ExpRight {
                        edge: hull_edge,
                        rate,
                    }
                } else {
                    SegMap::ExpLeft {
                        edge: hull_edge,
                        rate,
                    }
                };
                // Transformed integrand behaves like v^(s-1) with s >= 1
                // when `rate` under-states the true decay, i.e. a kink.
                (map, hull_edge, 0.0)
            }
            Tail::PowerLaw { exponent } => {
                let edge = if right {
                    hull_edge.max(1.0)
                } else {
                    hull_edge.min(-1.0)
                };
                // Bounded extension covering the gap between the hull and
                // the tail onset |edge| >= 1.
                if right && edge > dom.hi {
                    segs.push(Segment {
                        lo: dom.hi,
                        hi: edge,
                        map: SegMap::Identity,
                        sing_lo: None,
                        sing_hi: None,
                    });
                } else if !right && edge < dom.lo {
                    segs.push(Segment {
                        lo: edge,
                        hi: dom.lo,
                        map: SegMap::Identity,
                        sing_lo: None,
                        sing_hi: None,
                    });
                }
                let map = if right {
                    SegMap::PowRight { edge }
                } else {
                    SegMap::PowLeft { edge }
                };
                // x^e dx becomes v^(-e-2) dv near v = 0.
                ((map), edge, (-exponent - 2.0).min(0.0))
            }
        };

        // Breakpoints beyond the hull split the reference interval.
        let mut vs: Vec<f64> = dom
            .breakpoints
            .iter()
            .filter(|&&x| if right { x > edge } else { x < edge })
            .map(|&x| match tail {
                Tail::Exponential { rate } => (-(rate * (x - edge).abs())).exp(),
                Tail::PowerLaw { .. } => edge / x,
                Tail::None => unreachable!(),
            })
            .filter(|&v| v > 0.0 && v < 1.0)
            .collect();
        vs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vs.dedup_by(|a, b| close(*a, *b));
        let mut v_edges = Vec::with_capacity(vs.len() + 2);
        v_edges.push(0.0);
        v_edges.extend(vs);
        v_edges.push(1.0);
        for w in v_edges.windows(2) {
            segs.push(Segment {
                lo: w[0],
                hi: w[1],
                map,
                sing_lo: if w[0] == 0.0 { Some(v_sing) } else { None },
                sing_hi: None,
            });
        }
        Ok(())
    };
    add_tail(&mut segs, false)?;
    add_tail(&mut segs, true)?;

    Ok(normalize(segs))
}

/// Grading exponent strong enough to resolve an endpoint exponent `e`:
/// the singular-cell contribution scales like (first cell width)^(1+e).
fn grading_for(e: f64, spec: &QuadratureSpec) -> f64 {
    if e >= 0.0 {
        spec.grading_exponent.max(2.0)
    } else {
        (9.0 / (1.0 + e)).clamp(spec.grading_exponent.max(2.0), 40.0)
    }
}

fn integrate_segment<F: Fn(f64) -> f64>(
    g: &F,
    seg: &Segment,
    cells: usize,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let nodes = gl_nodes();
    let m = cells.max(1);
    let len = seg.hi - seg.lo;
    let boundary = |i: usize| -> f64 {
        let t = i as f64 / m as f64;
        match (seg.sing_lo, seg.sing_hi) {
            (Some(e), None) => seg.lo + len * t.powf(grading_for(e, spec)),
            (None, Some(e)) => seg.hi - len * (1.0 - t).powf(grading_for(e, spec)),
            _ => seg.lo + len * t,
        }
    };
    let mut cell_vals = Vec::with_capacity(m);
    let mut prev = boundary(0);
    for i in 1..=m {
        let next = boundary(i);
        let (c0, c1) = (prev, next);
        prev = next;
        let h = c1 - c0;
        if h <= 0.0 {
            cell_vals.push(0.0);
            continue;
        }
        let mid = 0.5 * (c0 + c1);
        let half = 0.5 * h;
        let mut node_vals = [0.0_f64; GL_ORDER];
        for (k, &(xi, wk)) in nodes.iter().enumerate() {
            let v = mid + half * xi;
            let (x, jac) = seg.map.apply(v);
            let val = g(x) * jac;
            if !val.is_finite() {
                return Err(Error::NonFiniteIntegrand { x });
            }
            node_vals[k] = wk * val;
        }
        cell_vals.push(half * pairwise_sum(&node_vals));
    }
    Ok(pairwise_sum(&cell_vals))
}

/// Integrate `g` over `dom`, refining until two successive estimates agree
/// within `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    g: F,
    dom: &Domain,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    let segs = build_segments(dom)?;
    if segs.is_empty() {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let bounded_len: f64 = segs
        .iter()
        .filter(|s| !s.map.is_tail())
        .map(|s| s.hi - s.lo)
        .sum();

    let mut prev: Option<f64> = None;
    let mut last_pair = (0.0, 0.0);
    for k in 0..=MAX_REFINEMENTS {
        let m_total = spec.base_cells << k;
        let mut seg_vals = Vec::with_capacity(segs.len());
        for seg in &segs {
            let cells = if seg.map.is_tail() {
                // Must grow strictly with every refinement, otherwise two
                // successive estimates could coincide and stop the loop
                // before the tail is resolved.
                (m_total / 4).max(16)
            } else if bounded_len > 0.0 {
                let share = (m_total as f64 * (seg.hi - seg.lo) / bounded_len).round() as usize;
                share.max(4)
            } else {
                4
            };
            seg_vals.push(integrate_segment(&g, seg, cells, spec)?);
        }
        let value = pairwise_sum(&seg_vals);
        if let Some(p) = prev {
            let delta = (value - p).abs();
            if delta <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
                return Ok(QuadResult {
                    value,
                    error_estimate: delta,
                });
            }
            last_pair = (value, p);
        }
        prev = Some(value);
    }
    Err(Error::QuadratureNonConvergence {
        last: last_pair.0,
        previous: last_pair.1,
    })
}

//! The multistable random measure M_α and its integrals: the joint
//! characteristic function exp(−∫|Σθ_j f_j(x)|^{α(x)} dx), a dyadic-grid
//! simulator that draws each cell [r2^{−n}, (r+1)2^{−n}) from the stable
//! law with index α(r2^{−n}) and scale (2^{−n})^{1/α(r2^{−n})}, pathwise
//! integration of functions against a realization, and the zoom
//! characteristic function of the rescaled measure r^{−1/α(u)}·T_{u,r}^#M_α.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function_spaces::{
    integrate_alpha_power, integrate_exponent_envelope, IndexFunction, RealFunction,
};
use crate::quad::{self, Domain, QuadratureSpec, Tail};
use crate::stable_rng::{sample_stable, RngStream, StableParams};

/// Default guard on cells per realization (2^24).
pub const DEFAULT_CELL_CAP: u64 = 1 << 24;

/// Cell count above which the simulator parallelizes across cells.
const PARALLEL_THRESHOLD: usize = 4096;

/// A finite family (f_1..f_d, θ_1..θ_d) plus the index function: the
/// argument of the joint characteristic function of (∫f_j dM_α)_j.
#[derive(Debug, Clone)]
pub struct CfSpec {
    pub functions: Vec<RealFunction>,
    pub thetas: Vec<f64>,
    pub alpha: IndexFunction,
}

impl CfSpec {
    pub fn validate(&self) -> Result<()> {
        if self.functions.is_empty() || self.functions.len() != self.thetas.len() {
            return Err(Error::InvalidArgument(format!(
                "need matching nonempty function/theta lists, got {} and {}",
                self.functions.len(),
                self.thetas.len()
            )));
        }
        if self.thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("thetas must be finite".into()));
        }
        Ok(())
    }

    fn combined(&self) -> Result<RealFunction> {
        let parts: Vec<(f64, RealFunction)> = self
            .thetas
            .iter()
            .copied()
            .zip(self.functions.iter().cloned())
            .collect();
        RealFunction::combine(&parts)
    }
}

/// φ(θ_1..θ_d) = exp(−∫|Σ_j θ_j f_j(x)|^{α(x)} dx) ∈ (0, 1].
pub fn cf_joint(spec: &CfSpec, quad: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let g = spec.combined()?;
    if g.is_zero() {
        return Ok(1.0);
    }
    let exponent = integrate_alpha_power(&g, &spec.alpha, quad)?;
    Ok((-exponent).exp())
}

/// One realization of every cell increment of the dyadic approximation
/// M_{α_n} over an aligned window at resolution 2^{−level}.
#[derive(Debug, Clone)]
pub struct MeasureIncrements {
    level: u32,
    /// Index of the first cell: the window starts at cell_lo·2^{−level}.
    cell_lo: i64,
    draws: Vec<f64>,
    alphas: Vec<f64>,
}

impl MeasureIncrements {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cell width 2^{−level}, exact in floating point.
    pub fn cell_width(&self) -> f64 {
        (0.5f64).powi(self.level as i32)
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Left endpoint of cell i (exact dyadic product).
    pub fn x_left(&self, i: usize) -> f64 {
        (self.cell_lo + i as i64) as f64 * self.cell_width()
    }

    /// Covered window [lo, hi).
    pub fn window(&self) -> (f64, f64) {
        (self.x_left(0), self.x_left(self.draws.len()))
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// CSV rows (level, cell_index, x_left, alpha_used, draw) at full
    /// round-trip precision, plus the header line.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "level,cell_index,x_left,alpha_used,draw")?;
        for i in 0..self.draws.len() {
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{:.16e}",
                self.level,
                self.cell_lo + i as i64,
                self.x_left(i),
                self.alphas[i],
                self.draws[i]
            )?;
        }
        Ok(())
    }
}

/// Simulate all cell increments covering `domain` at the given level.
/// The window is expanded outward to the dyadic grid. Each cell r draws
/// stable(α(r2^{−n}), (2^{−n})^{1/α(r2^{−n})}) from the substream derived
/// for (level, r), so results are independent of evaluation order.
pub fn simulate_increments(
    alpha: &IndexFunction,
    level: u32,
    domain: (f64, f64),
    stream: &RngStream,
    cell_cap: u64,
) -> Result<MeasureIncrements> {
    let (lo, hi) = domain;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "simulation window must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    if level > 40 {
        return Err(Error::InvalidArgument(format!(
            "dyadic level {level} too fine for f64 cell arithmetic (max 40)"
        )));
    }
    let scale = (2.0f64).powi(level as i32);
    let cell_lo = (lo * scale).floor() as i64;
    let cell_hi = (hi * scale).ceil() as i64;
    let n_cells = (cell_hi - cell_lo).max(1) as u64;
    if n_cells > cell_cap {
        return Err(Error::ResourceCap {
            needed: n_cells,
            cap: cell_cap,
        });
    }

    let w = (0.5f64).powi(level as i32);
    let n = n_cells as usize;
    let draw_cell = |i: usize| -> (f64, f64) {
        let r = cell_lo + i as i64;
        let x_left = r as f64 * w;
        let a = alpha.eval(x_left);
        // scale (2^{−n})^{1/α}; alpha ∈ (0,2] keeps this positive/finite.
        let params = StableParams {
            alpha: a,
            scale: w.powf(1.0 / a),
        };
        let mut cell_stream = stream.derive(level as u64, r as u64);
        (a, sample_stable(params, &mut cell_stream))
    };

    let cells: Vec<(f64, f64)> = if n > PARALLEL_THRESHOLD {
        (0..n).into_par_iter().map(draw_cell).collect()
    } else {
        (0..n).map(draw_cell).collect()
    };
    let (alphas, draws) = cells.into_iter().unzip();
    Ok(MeasureIncrements {
        level,
        cell_lo,
        draws,
        alphas,
    })
}

/// Pathwise discretized integral Σ_r f(x_r°)·draw_r with x_r° the cell
/// midpoint; cells whose closure contains a declared singular point of f
/// with negative exponent use the cell average of f (local graded
/// quadrature) instead, since the midpoint value misstates the mass of an
/// integrable blow-up.
pub fn integrate_sample(
    f: &RealFunction,
    inc: &MeasureIncrements,
    quad_spec: &QuadratureSpec,
) -> Result<f64> {
    if inc.is_empty() || f.is_zero() {
        return Ok(0.0);
    }
    let w = inc.cell_width();
    let singular_locs: Vec<f64> = f
        .singularities()
        .iter()
        .filter(|s| s.exponent < 0.0)
        .map(|s| s.location)
        .collect();
    let mut terms = Vec::with_capacity(inc.len());
    for i in 0..inc.len() {
        let c0 = inc.x_left(i);
        let c1 = inc.x_left(i + 1);
        let sing_here: Vec<f64> = singular_locs
            .iter()
            .copied()
            .filter(|s| *s >= c0 && *s <= c1)
            .collect();
        let weight = if sing_here.is_empty() {
            f.eval(0.5 * (c0 + c1))
        } else {
            let mut dom = Domain::bounded(c0, c1);
            for s in f.singularities() {
                if sing_here.contains(&s.location) {
                    dom.singularities.push(*s);
                }
            }
            dom.breakpoints = f
                .breakpoints()
                .iter()
                .copied()
                .filter(|b| *b > c0 && *b < c1)
                .collect();
            let g = f.clone();
            quad::integrate(move |x| g.eval(x), &dom, quad_spec)?.value / w
        };
        terms.push(weight * inc.draws()[i]);
    }
    Ok(quad::pairwise_sum(&terms))
}

/// Envelope mass ∫ max(|f|^a, |f|^b) dx of the part of f's support that
/// the realization window does not cover — the truncation error proxy a
/// caller should check when integrating against a finite window.
pub fn uncovered_envelope_mass(
    f: &RealFunction,
    inc: &MeasureIncrements,
    a: f64,
    b: f64,
    quad_spec: &QuadratureSpec,
) -> Result<f64> {
    let (win_lo, win_hi) = inc.window();
    let sup = f.support();
    let mut total = 0.0;
    // Left overhang.
    if sup.lo < win_lo || !sup.left_tail.is_none() {
        let piece = RealFunction::from_parts(
            {
                let g = f.clone();
                move |x| if x < win_lo { g.eval(x) } else { 0.0 }
            },
            crate::function_spaces::SupportSpec {
                lo: sup.lo.min(win_lo),
                hi: win_lo,
                left_tail: sup.left_tail,
                right_tail: Tail::None,
            },
            f.singularities()
                .iter()
                .copied()
                .filter(|s| s.location < win_lo)
                .collect(),
            f.breakpoints()
                .iter()
                .copied()
                .filter(|p| *p < win_lo)
                .collect(),
        )?;
        total += integrate_exponent_envelope(&piece, a, b, quad_spec)?;
    }
    // Right overhang.
    if sup.hi > win_hi || !sup.right_tail.is_none() {
        let piece = RealFunction::from_parts(
            {
                let g = f.clone();
                move |x| if x > win_hi { g.eval(x) } else { 0.0 }
            },
            crate::function_spaces::SupportSpec {
                lo: win_hi,
                hi: sup.hi.max(win_hi),
                left_tail: Tail::None,
                right_tail: sup.right_tail,
            },
            f.singularities()
                .iter()
                .copied()
                .filter(|s| s.location > win_hi)
                .collect(),
            f.breakpoints()
                .iter()
                .copied()
                .filter(|p| *p > win_hi)
                .collect(),
        )?;
        total += integrate_exponent_envelope(&piece, a, b, quad_spec)?;
    }
    Ok(total)
}

/// A formal list of closed intervals. The list is never merged or
/// reordered: the measure of the union is the left-to-right fold of the
/// per-interval measures, which is what makes pathwise additivity exact
/// in floating point when a union is split into consecutive runs.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<IntervalUnion> {
        for &(lo, hi) in &intervals {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidArgument(format!(
                    "interval [{lo}, {hi}] must be finite with lo <= hi"
                )));
            }
        }
        Ok(IntervalUnion { intervals })
    }

    pub fn empty() -> IntervalUnion {
        IntervalUnion {
            intervals: Vec::new(),
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// True when no two intervals overlap on a set of positive length.
    pub fn pairwise_disjoint(&self) -> bool {
        let mut sorted = self.intervals.clone();
        sorted.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        sorted.windows(2).all(|w| w[0].1 <= w[1].0)
    }

    /// Concatenation (no merging).
    pub fn concat(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut intervals = self.intervals.clone();
        intervals.extend_from_slice(&other.intervals);
        IntervalUnion { intervals }
    }
}

/// Measure of one interval under the realization: cells fully inside
/// contribute their whole draw, boundary cells contribute the overlap
/// fraction of their draw.
fn interval_measure(lo: f64, hi: f64, inc: &MeasureIncrements) -> f64 {
    if hi <= lo || inc.is_empty() {
        return 0.0;
    }
    let w = inc.cell_width();
    let (win_lo, win_hi) = inc.window();
    let lo = lo.max(win_lo);
    let hi = hi.min(win_hi);
    if hi <= lo {
        return 0.0;
    }
    let first = ((lo - win_lo) / w).floor() as usize;
    let last = (((hi - win_lo) / w).ceil() as usize).min(inc.len());
    let mut terms = Vec::with_capacity(last.saturating_sub(first));
    for i in first..last {
        let c0 = inc.x_left(i);
        let c1 = inc.x_left(i + 1);
        let overlap = (hi.min(c1) - lo.max(c0)).max(0.0);
        // Interior cells hit fraction exactly 1.0 because dyadic cell
        // arithmetic is exact.
        let frac = overlap / w;
        terms.push(frac * inc.draws()[i]);
    }
    quad::pairwise_sum(&terms)
}

/// M(A) for a union of intervals: the left fold of per-interval measures.
/// Splitting the list into consecutive runs and summing the parts
/// reproduces the same floating-point value bit for bit.
pub fn measure_of_set(set: &IntervalUnion, inc: &MeasureIncrements) -> f64 {
    let mut acc = 0.0;
    for &(lo, hi) in &set.intervals {
        acc += interval_measure(lo, hi, inc);
    }
    acc
}

/// CF of the rescaled zoomed family r^{−1/α(u)}(∫f_j d(T_{u,r}^# M_α))_j
/// evaluated at (θ_j): exp(−∫|Σθ_j f_j(z)|^{α(rz+u)} r^{1−α(rz+u)/α(u)} dz).
/// All f_j must be compactly supported. At r = 1, u = 0 this reduces to
/// the plain joint CF.
pub fn scaled_cf(spec: &CfSpec, u: f64, r: f64, quad_spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "zoom factor must be positive and finite, got {r}"
        )));
    }
    if spec
        .functions
        .iter()
        .any(|f| !f.support().is_bounded())
    {
        return Err(Error::InvalidArgument(
            "zoom CF requires compactly supported functions".into(),
        ));
    }
    let g = spec.combined()?;
    if g.is_zero() {
        return Ok(1.0);
    }
    let alpha = &spec.alpha;
    let alpha_u = alpha.eval(u);
    // α(rz + u) is non-smooth at z = (p − u)/r for each breakpoint p.
    let alpha_breaks: Vec<f64> = alpha
        .breakpoints_in(-1e15, 1e15)
        .into_iter()
        .map(|p| (p - u) / r)
        .collect();
    let dom = g.composed_domain(&alpha_breaks, alpha.lower(), alpha.upper())?;
    let al = alpha.clone();
    let integrand = move |z: f64| {
        let az = al.eval(r * z + u);
        g.eval(z).abs().powf(az) * r.powf(1.0 - az / alpha_u)
    };
    let exponent = quad::integrate(integrand, &dom, quad_spec)?.value.max(0.0);
    Ok((-exponent).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Singularity;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn unit_indicator() -> RealFunction {
        RealFunction::indicator(0.0, 1.0).unwrap()
    }

    #[test]
    fn joint_cf_matches_closed_forms() {
        // Zero thetas: phi(0) = 1 exactly.
        let spec = CfSpec {
            functions: vec![unit_indicator()],
            thetas: vec![0.0],
            alpha: IndexFunction::constant(1.5).unwrap(),
        };
        assert_eq!(cf_joint(&spec, &q()).unwrap(), 1.0);

        // d = 1, alpha = 2, theta = 1: exp(-1).
        let spec = CfSpec {
            functions: vec![unit_indicator()],
            thetas: vec![1.0],
            alpha: IndexFunction::constant(2.0).unwrap(),
        };
        let v = cf_joint(&spec, &q()).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-12, "{v}");

        // Disjoint indicators, piecewise alpha: exp(-(|1|^1 + |2|^2)).
        let spec = CfSpec {
            functions: vec![unit_indicator(), RealFunction::indicator(1.0, 2.0).unwrap()],
            thetas: vec![1.0, 2.0],
            alpha: IndexFunction::piecewise_constant(vec![1.0], vec![1.0, 2.0], 1.0, 2.0)
                .unwrap(),
        };
        let v = cf_joint(&spec, &q()).unwrap();
        assert!((v - (-5.0f64).exp()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn joint_cf_is_symmetric_bounded_and_decreasing() {
        let alpha = IndexFunction::sinusoidal(1.5, 0.3, 2.0, 1.1, 1.9).unwrap();
        let f = unit_indicator();
        let mut prev = 1.0;
        for k in 0..6 {
            let theta = 0.5 * k as f64;
            let plus = cf_joint(
                &CfSpec {
                    functions: vec![f.clone()],
                    thetas: vec![theta],
                    alpha: alpha.clone(),
                },
                &q(),
            )
            .unwrap();
            let minus = cf_joint(
                &CfSpec {
                    functions: vec![f.clone()],
                    thetas: vec![-theta],
                    alpha: alpha.clone(),
                },
                &q(),
            )
            .unwrap();
            assert!((plus - minus).abs() < 1e-12, "symmetry at theta {theta}");
            assert!(plus > 0.0 && plus <= 1.0);
            if k > 0 {
                assert!(plus < prev, "strictly decreasing in |theta|");
            }
            prev = plus;
        }
    }

    #[test]
    fn single_cell_draw_is_unit_scale_stable() {
        let alpha = IndexFunction::constant(1.3).unwrap();
        let stream = RngStream::from_seed(9);
        let inc = simulate_increments(&alpha, 0, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(inc.len(), 1);
        assert_eq!(inc.alphas()[0], 1.3);
        // Same substream, same params, drawn manually.
        let mut s = stream.derive(0, 0);
        let expect = sample_stable(StableParams { alpha: 1.3, scale: 1.0 }, &mut s);
        assert_eq!(inc.draws()[0], expect);
    }

    #[test]
    fn increments_use_left_endpoint_index() {
        let alpha =
            IndexFunction::piecewise_constant(vec![0.5], vec![1.0, 2.0], 1.0, 2.0).unwrap();
        let stream = RngStream::from_seed(1);
        let inc = simulate_increments(&alpha, 1, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(inc.len(), 2);
        // Cell [0.5, 1) has left endpoint 0.5, where the index jumps to 2.
        assert_eq!(inc.alphas(), &[1.0, 2.0]);
    }

    #[test]
    fn window_alignment_expands_outward() {
        let alpha = IndexFunction::constant(1.5).unwrap();
        let stream = RngStream::from_seed(2);
        let inc =
            simulate_increments(&alpha, 2, (0.1, 0.9), &stream, DEFAULT_CELL_CAP).unwrap();
        let (lo, hi) = inc.window();
        assert_eq!((lo, hi), (0.0, 1.0));
        assert_eq!(inc.len(), 4);
    }

    #[test]
    fn cell_cap_is_enforced() {
        let alpha = IndexFunction::constant(1.5).unwrap();
        let stream = RngStream::from_seed(3);
        let err = simulate_increments(&alpha, 12, (0.0, 1.0), &stream, 1024).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { needed: 4096, cap: 1024 }), "{err}");
    }

    #[test]
    fn simulation_is_deterministic_and_schedule_independent() {
        let alpha = IndexFunction::sinusoidal(1.5, 0.3, 2.0, 1.1, 1.9).unwrap();
        let stream = RngStream::from_seed(4);
        // 8192 cells crosses the parallel threshold; a serial re-draw of
        // one cell must agree bitwise.
        let inc =
            simulate_increments(&alpha, 13, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(inc.len(), 8192);
        let inc2 =
            simulate_increments(&alpha, 13, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(inc.draws(), inc2.draws());
        let i = 2026;
        let x_left = inc.x_left(i);
        let a = alpha.eval(x_left);
        let mut s = stream.derive(13, i as u64);
        let manual = sample_stable(
            StableParams {
                alpha: a,
                scale: inc.cell_width().powf(1.0 / a),
            },
            &mut s,
        );
        assert_eq!(inc.draws()[i], manual);
    }

    #[test]
    fn integrating_unit_indicator_sums_covered_draws() {
        let alpha = IndexFunction::constant(1.5).unwrap();
        let stream = RngStream::from_seed(5);
        let inc = simulate_increments(&alpha, 6, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        let v = integrate_sample(&unit_indicator(), &inc, &q()).unwrap();
        let plain = quad::pairwise_sum(inc.draws());
        assert_eq!(v, plain, "indicator weights are exactly 1");

        let z = integrate_sample(&RealFunction::zero(), &inc, &q()).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn integrate_sample_uses_cell_average_on_singular_cells() {
        // f(x) = x^{-1/2} on [0, 1]: the first cell's average is
        // 2/sqrt(w)/w·... = 2·w^{-1/2}, twice the value a midpoint rule
        // would see at w/2 times sqrt(2).
        let f = RealFunction::power(1.0, 0.0, -0.5, 0.0, 1.0).unwrap();
        let alpha = IndexFunction::constant(1.2).unwrap();
        let stream = RngStream::from_seed(6);
        let inc = simulate_increments(&alpha, 3, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        let v = integrate_sample(&f, &inc, &q()).unwrap();
        let w = inc.cell_width();
        // Expected: first cell weight = (1/w)∫_0^w x^{-1/2} = 2/sqrt(w),
        // remaining cells at midpoints.
        let mut expect_terms = vec![(2.0 / w.sqrt()) * inc.draws()[0]];
        for i in 1..inc.len() {
            let mid = 0.5 * (inc.x_left(i) + inc.x_left(i + 1));
            expect_terms.push(mid.powf(-0.5) * inc.draws()[i]);
        }
        let expect = quad::pairwise_sum(&expect_terms);
        assert!(
            (v - expect).abs() <= 1e-9 * expect.abs().max(1.0),
            "{v} vs {expect}"
        );
    }

    #[test]
    fn pathwise_linearity_holds_to_rounding() {
        // Exact in real arithmetic; floating point does not distribute
        // multiplication over addition, so compare at 1e-14 relative.
        let alpha = IndexFunction::constant(1.5).unwrap();
        let stream = RngStream::from_seed(7);
        let inc = simulate_increments(&alpha, 8, (0.0, 2.0), &stream, DEFAULT_CELL_CAP).unwrap();
        let f1 = RealFunction::step(vec![0.0, 0.7, 1.3], vec![1.0, -2.0]).unwrap();
        let f2 = RealFunction::step(vec![0.4, 1.1, 2.0], vec![0.5, 3.0]).unwrap();
        let combo = RealFunction::combine(&[(2.0, f1.clone()), (-1.5, f2.clone())]).unwrap();
        let lhs = integrate_sample(&combo, &inc, &q()).unwrap();
        let rhs = 2.0 * integrate_sample(&f1, &inc, &q()).unwrap()
            - 1.5 * integrate_sample(&f2, &inc, &q()).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        assert!((lhs - rhs).abs() <= 1e-14 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn measure_additivity_is_bitwise_on_interval_splits() {
        let alpha = IndexFunction::sinusoidal(1.5, 0.3, 2.0, 1.1, 1.9).unwrap();
        let stream = RngStream::from_seed(8);
        let inc = simulate_increments(&alpha, 7, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();

        let parts = [
            (0.0, 0.125),
            (0.125, 0.3),
            (0.3, 0.55),
            (0.55, 0.8),
            (0.8, 1.0),
        ];
        let whole = IntervalUnion::new(parts.to_vec()).unwrap();
        let total = measure_of_set(&whole, &inc);

        // Left fold of the individual interval measures reproduces the
        // union bitwise.
        let mut acc = 0.0;
        for &p in &parts {
            acc += measure_of_set(&IntervalUnion::new(vec![p]).unwrap(), &inc);
        }
        assert_eq!(total, acc, "per-interval fold differs");

        // Splitting into a consecutive prefix and the next interval is
        // exactly additive too.
        for k in 1..parts.len() {
            let prefix = IntervalUnion::new(parts[..k].to_vec()).unwrap();
            let next = IntervalUnion::new(vec![parts[k]]).unwrap();
            let merged = prefix.concat(&next);
            assert_eq!(
                measure_of_set(&merged, &inc),
                measure_of_set(&prefix, &inc) + measure_of_set(&next, &inc),
                "prefix split at {k}"
            );
        }
    }

    #[test]
    fn measure_of_whole_window_is_sum_of_draws() {
        let alpha = IndexFunction::constant(1.1).unwrap();
        let stream = RngStream::from_seed(10);
        let inc = simulate_increments(&alpha, 5, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        let all = IntervalUnion::new(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(
            measure_of_set(&all, &inc),
            quad::pairwise_sum(inc.draws())
        );
        assert_eq!(measure_of_set(&IntervalUnion::empty(), &inc), 0.0);
    }

    #[test]
    fn straddling_cells_contribute_proportionally() {
        let alpha = IndexFunction::constant(1.5).unwrap();
        let stream = RngStream::from_seed(11);
        // Level 0 on [0,1]: a single cell; measure of [0, 0.25] must be a
        // quarter of the draw.
        let inc = simulate_increments(&alpha, 0, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        let quarter = IntervalUnion::new(vec![(0.0, 0.25)]).unwrap();
        assert_eq!(measure_of_set(&quarter, &inc), 0.25 * inc.draws()[0]);
    }

    #[test]
    fn zoom_cf_at_identity_equals_joint_cf() {
        let alpha = IndexFunction::sinusoidal(1.5, 0.3, 2.0, 1.1, 1.9).unwrap();
        let spec = CfSpec {
            functions: vec![unit_indicator(), RealFunction::indicator(0.25, 0.75).unwrap()],
            thetas: vec![0.8, -1.3],
            alpha,
        };
        let plain = cf_joint(&spec, &q()).unwrap();
        let zoomed = scaled_cf(&spec, 0.0, 1.0, &q()).unwrap();
        assert_eq!(zoomed, plain, "r = 1, u = 0 must be the identity");
    }

    #[test]
    fn zoom_cf_with_constant_index_is_scale_free() {
        let alpha = IndexFunction::constant(1.4).unwrap();
        let spec = CfSpec {
            functions: vec![unit_indicator()],
            thetas: vec![1.0],
            alpha,
        };
        let plain = cf_joint(&spec, &q()).unwrap();
        for r in [1e-1, 1e-2, 1e-3] {
            let zoomed = scaled_cf(&spec, 0.3, r, &q()).unwrap();
            assert!(
                (zoomed - plain).abs() < 1e-9,
                "constant index cancels the zoom exactly: {zoomed} vs {plain} at r = {r}"
            );
        }
    }

    #[test]
    fn zoom_cf_requires_compact_support() {
        let spec = CfSpec {
            functions: vec![RealFunction::exp_decay(1.0, 1.0, 0.0).unwrap()],
            thetas: vec![1.0],
            alpha: IndexFunction::constant(1.5).unwrap(),
        };
        assert!(scaled_cf(&spec, 0.0, 0.5, &q()).is_err());
    }

    #[test]
    fn csv_serialization_round_trips_draw_values() {
        let alpha = IndexFunction::constant(1.5).unwrap();
        let stream = RngStream::from_seed(12);
        let inc = simulate_increments(&alpha, 2, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        let mut buf = Vec::new();
        inc.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "level,cell_index,x_left,alpha_used,draw");
        for (i, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').collect();
            assert_eq!(cols.len(), 5);
            assert_eq!(cols[0].parse::<u32>().unwrap(), 2);
            assert_eq!(cols[1].parse::<i64>().unwrap(), i as i64);
            assert_eq!(cols[2].parse::<f64>().unwrap(), inc.x_left(i));
            assert_eq!(cols[4].parse::<f64>().unwrap(), inc.draws()[i]);
        }
    }

    #[test]
    fn uncovered_mass_reports_tail_truncation() {
        let alpha = IndexFunction::constant(1.5).unwrap();
        let stream = RngStream::from_seed(13);
        let inc = simulate_increments(&alpha, 4, (0.0, 4.0), &stream, DEFAULT_CELL_CAP).unwrap();
        // Fully covered bounded support: zero uncovered mass.
        let f = unit_indicator();
        let m = uncovered_envelope_mass(&f, &inc, 1.2, 1.8, &q()).unwrap();
        assert_eq!(m, 0.0);
        // Exponential tail beyond the window: int_4^inf e^{-1.2 x} dx.
        let g = RealFunction::exp_decay(1.0, 1.0, 0.0).unwrap();
        let m = uncovered_envelope_mass(&g, &inc, 1.2, 1.8, &q()).unwrap();
        let exact = (-1.2f64 * 4.0).exp() / 1.2;
        assert!((m - exact).abs() < 1e-10, "{m} vs {exact}");
        // Support wider than the window on the left.
        let h = RealFunction::indicator(-1.0, 0.5).unwrap();
        let m = uncovered_envelope_mass(&h, &inc, 1.0, 1.0, &q()).unwrap();
        assert!((m - 1.0).abs() < 1e-12, "{m}");
    }

    #[test]
    fn singular_metadata_survives_domain_composition() {
        // Regression guard: a singular function integrated against the
        // sampler's cells must declare the singularity to the local
        // quadrature, not hit it with a node.
        let f = RealFunction::from_parts(
            |x| if x > 0.0 && x <= 1.0 { x.powf(-0.3) } else { 0.0 },
            crate::function_spaces::SupportSpec::bounded(0.0, 1.0),
            vec![Singularity {
                location: 0.0,
                exponent: -0.3,
            }],
            vec![],
        )
        .unwrap();
        let alpha = IndexFunction::constant(1.5).unwrap();
        let stream = RngStream::from_seed(14);
        let inc = simulate_increments(&alpha, 2, (0.0, 1.0), &stream, DEFAULT_CELL_CAP).unwrap();
        let v = integrate_sample(&f, &inc, &q()).unwrap();
        assert!(v.is_finite());
    }
}

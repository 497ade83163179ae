//! Vector dynamics on the probability simplex: the plurality-gate map, the
//! ternary denoiser map and its xy normal form, the ternary ENAND map, their
//! fixed points and stability, basin bound checks, a Lyapunov function for
//! the denoiser, and stream-field grid export.

use crate::coeffs::coeffs_countvector;
use crate::error::{Error, Result};
use crate::gates::{builtin_gate, pushforward, GateKind};
use crate::simplex::{from_xy, to_xy, DecodeResult, Dist, XYPoint};
use crate::thresholds::{m_eps, Stability};
use crate::weight::{float_tolerance, one_minus, Weight};

/// Iteration stop: successive points closer than this (sup norm) end the
/// orbit.
const ITERATION_STOP: f64 = 1e-13;
/// Hard cap on orbit length.
const ITERATION_CAP: usize = 100_000;
/// Central-difference step for numerical Jacobians.
const JACOBIAN_H: f64 = 1e-6;
/// Spectral radius within this of 1 is classified marginal.
const JACOBIAN_MARGIN: f64 = 1e-6;

/// One-step map on the simplex.
#[derive(Debug, Clone)]
pub struct MapSpec {
    pub kind: MapKind,
    pub eps: f64,
}

#[derive(Debug, Clone)]
pub enum MapKind {
    Maj { q: usize, k: usize },
    Den,
    /// ENAND with the second operand held fixed.
    Enand { partner: Dist<f64> },
}

impl MapSpec {
    pub fn q(&self) -> usize {
        match &self.kind {
            MapKind::Maj { q, .. } => *q,
            MapKind::Den | MapKind::Enand { .. } => 3,
        }
    }

    pub fn apply(&self, d: &Dist<f64>) -> Result<Dist<f64>> {
        match &self.kind {
            MapKind::Maj { q, k } => maj_map(*q, *k, &self.eps, d),
            MapKind::Den => den_map(&self.eps, d),
            MapKind::Enand { partner } => enand_map(&self.eps, d, partner),
        }
    }
}

/// Pushforward of k i.i.d. copies of `d` through the noisy plurality gate.
pub fn maj_map<W: Weight>(q: usize, k: usize, eps: &W, d: &Dist<W>) -> Result<Dist<W>> {
    let gate = builtin_gate(&GateKind::Maj, q, k)?;
    let inputs = vec![d.clone(); k];
    pushforward(&gate, &inputs, eps)
}

/// Closed form of the noisy ternary denoiser on the logical weights:
/// `p0' = (1 - 3e/2)(2 - p0 - 2 p1) p0 + e/2` and symmetrically for `p1'`.
pub fn den_map_components<W: Weight>(p0: &W, p1: &W, eps: &W) -> Result<(W, W)> {
    let p2 = W::one() - p0.clone() - p1.clone();
    Dist::new(vec![p0.clone(), p1.clone(), p2])?;
    let scale = W::one() - W::from_ratio(3, 2) * eps.clone();
    if *eps < W::zero() || scale < W::zero() {
        return Err(Error::invalid(format!(
            "noise rate must lie in [0, 2/3], got {:?}",
            eps
        )));
    }
    let half_eps = W::from_ratio(1, 2) * eps.clone();
    let two = W::from_int(2);
    let p0p = scale.clone() * (two.clone() - p0.clone() - two.clone() * p1.clone()) * p0.clone()
        + half_eps.clone();
    let p1p = scale * (two.clone() - p1.clone() - two * p0.clone()) * p1.clone() + half_eps;
    Ok((p0p, p1p))
}

// unvalidated form used for finite-difference probes slightly off the simplex
fn den_formula_raw(p0: f64, p1: f64, eps: f64) -> (f64, f64) {
    let s = 1.0 - 1.5 * eps;
    (
        s * (2.0 - p0 - 2.0 * p1) * p0 + 0.5 * eps,
        s * (2.0 - p1 - 2.0 * p0) * p1 + 0.5 * eps,
    )
}

/// Noisy ternary denoiser on a full distribution (q=3 only).
pub fn den_map<W: Weight>(eps: &W, d: &Dist<W>) -> Result<Dist<W>> {
    if d.q() != 3 {
        return Err(Error::UnsupportedAlphabet {
            q: d.q(),
            reason: "the denoiser acts on a ternary alphabet".into(),
        });
    }
    let (p0, p1) = den_map_components(d.weight(0), d.weight(1), eps)?;
    let p2 = W::one() - p0.clone() - p1.clone();
    Dist::new(vec![p0, p1, p2])
}

/// `xi = 1 - 6 eps`, the parameter of the xy normal form.
pub fn xi_from_eps(eps: f64) -> f64 {
    1.0 - 6.0 * eps
}

/// Denoiser in xy coordinates: `(x, y) -> (xi+3) (x(1-y)/3, (x^2-y^2)/2)`.
/// Conjugate to [`den_map`] through the chart.
pub fn den_map_xy(eps: f64, pt: XYPoint) -> Result<XYPoint> {
    // validates the point lies in the chart triangle
    let _ = from_xy(pt)?;
    let front = xi_from_eps(eps) + 3.0;
    Ok(XYPoint {
        x: front * pt.x * (1.0 - pt.y) / 3.0,
        y: front * (pt.x * pt.x - pt.y * pt.y) / 2.0,
    })
}

/// Where a simplex fixed point sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPointRegion {
    /// Decodes to the given symbol.
    Symbol(usize),
    /// The maximally mixed point.
    Center,
}

/// A fixed point of a simplex map with its numerically classified stability.
#[derive(Debug, Clone)]
pub struct SimplexFixedPoint {
    pub dist: Dist<f64>,
    pub region: FixedPointRegion,
    pub stability: Stability,
    /// Spectral radius of the (p0, p1) Jacobian at the point.
    pub spectral_radius: f64,
}

/// Fixed points of the noisy denoiser. Below eps = 1/6 there are three: two
/// logical points at `((1-3e+D)/(2-3e), (1-3e-D)/(2-3e))` and its swap,
/// with `D = sqrt((1-6e)(1-2e))`, plus the center; they coincide at
/// eps = 1/6, and above it only the center remains.
pub fn den_fixed_points(eps: f64) -> Result<Vec<SimplexFixedPoint>> {
    if !(0.0..=2.0 / 3.0).contains(&eps) {
        return Err(Error::invalid(format!(
            "noise rate must lie in [0, 2/3], got {eps}"
        )));
    }
    let mut out = Vec::new();
    if eps <= 1.0 / 6.0 + 1e-12 {
        let delta_sq = ((1.0 - 6.0 * eps) * (1.0 - 2.0 * eps)).max(0.0);
        let delta = delta_sq.sqrt();
        let den = 2.0 - 3.0 * eps;
        let p_plus = (1.0 - 3.0 * eps + delta) / den;
        let p_minus = (1.0 - 3.0 * eps - delta) / den;
        for (major, region) in [(0usize, 0usize), (1, 1)] {
            let mut w = vec![0.0; 3];
            w[major] = p_plus;
            w[1 - major] = p_minus;
            w[2] = 1.0 - p_plus - p_minus;
            let dist = Dist::new(w)?;
            out.push(classify_den_point(dist, FixedPointRegion::Symbol(region), eps));
        }
    }
    let center = Dist::uniform(3)?;
    out.push(classify_den_point(center, FixedPointRegion::Center, eps));
    Ok(out)
}

fn classify_den_point(dist: Dist<f64>, region: FixedPointRegion, eps: f64) -> SimplexFixedPoint {
    let map = |p0: f64, p1: f64| den_formula_raw(p0, p1, eps);
    let radius = spectral_radius_2x2(jacobian2(map, *dist.weight(0), *dist.weight(1)));
    SimplexFixedPoint {
        dist,
        region,
        stability: classify_radius(radius),
        spectral_radius: radius,
    }
}

fn classify_radius(radius: f64) -> Stability {
    if radius < 1.0 - JACOBIAN_MARGIN {
        Stability::Stable
    } else if radius > 1.0 + JACOBIAN_MARGIN {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

// central differences, step 1e-6
fn jacobian2(map: impl Fn(f64, f64) -> (f64, f64), p0: f64, p1: f64) -> [[f64; 2]; 2] {
    let h = JACOBIAN_H;
    let (xp, yp) = map(p0 + h, p1);
    let (xm, ym) = map(p0 - h, p1);
    let (xq, yq) = map(p0, p1 + h);
    let (xn, yn) = map(p0, p1 - h);
    [
        [(xp - xm) / (2.0 * h), (xq - xn) / (2.0 * h)],
        [(yp - ym) / (2.0 * h), (yq - yn) / (2.0 * h)],
    ]
}

fn spectral_radius_2x2(j: [[f64; 2]; 2]) -> f64 {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        (0.5 * (tr + root)).abs().max((0.5 * (tr - root)).abs())
    } else {
        // complex pair, modulus sqrt(det)
        det.abs().sqrt()
    }
}

/// Lyapunov function of the xy-form denoiser:
/// `V = ((xi+3)^2 x^2 - (xi+2)(xi+3) y)^2 + ((xi+3)^2 x^2 - xi(xi+2))^2`.
/// Vanishes at the logical fixed point and does not increase along orbits
/// in the decode-to-1 region.
pub fn lyapunov_v(xi: f64, pt: XYPoint) -> f64 {
    let f = xi + 3.0;
    let xx = f * f * pt.x * pt.x;
    let t1 = xx - (xi + 2.0) * f * pt.y;
    let t2 = xx - xi * (xi + 2.0);
    t1 * t1 + t2 * t2
}

/// Pushforward of two independent operands through the noisy ternary ENAND.
pub fn enand_map<W: Weight>(eps: &W, da: &Dist<W>, db: &Dist<W>) -> Result<Dist<W>> {
    let gate = builtin_gate(&GateKind::Enand, 3, 2)?;
    pushforward(&gate, &[da.clone(), db.clone()], eps)
}

/// Closed-form logical weights (w0, w1) of the noisy ENAND applied to the
/// denoiser fixed points `P_u, P_v`. Requires eps <= 1/6 so the fixed
/// points exist.
pub fn enand_closed_form(eps: f64, u: usize, v: usize) -> Result<(f64, f64)> {
    if u > 1 || v > 1 {
        return Err(Error::invalid("logical operands must be 0 or 1"));
    }
    if !(0.0..=1.0 / 6.0 + 1e-12).contains(&eps) {
        return Err(Error::invalid(format!(
            "closed form needs logical fixed points, so eps in [0, 1/6], got {eps}"
        )));
    }
    let delta = ((1.0 - 6.0 * eps) * (1.0 - 2.0 * eps)).max(0.0).sqrt();
    let den = 2.0 - 3.0 * eps;
    Ok(match (u, v) {
        (0, 0) => (
            (1.0 - 3.0 * eps - delta) / den,
            (1.0 + delta + eps * (-4.0 + 6.0 * eps - 3.0 * delta)) / den,
        ),
        (1, 1) => (
            (1.0 - 3.0 * eps + delta) / den,
            (1.0 - delta + eps * (-4.0 + 6.0 * eps + 3.0 * delta)) / den,
        ),
        _ => {
            let inv = 1.0 / (1.0 - 1.5 * eps);
            (1.0 + 4.0 * eps - inv, inv - 6.0 * eps)
        }
    })
}

/// Outcome of checking that the noisy ENAND implements NAND on the
/// denoiser fixed points.
#[derive(Debug, Clone)]
pub struct EnandVerification {
    pub ok: bool,
    /// Set when the check could not even be posed.
    pub reason: Option<String>,
    /// Margins of the four decode inequalities, in input order
    /// (P0,P0), (P0,P1), (P1,P0), (P1,P1); positive means satisfied.
    pub margins: Vec<f64>,
}

/// Check the four NAND-decoding inequalities of the noisy ENAND on the
/// denoiser fixed points: outputs for (0,0), (0,1), (1,0) must decode to 1
/// (w0 < w1) and for (1,1) to 0 (w0 > w1), all via exact pushforward.
pub fn enand_verify(eps: f64) -> Result<EnandVerification> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::invalid(format!(
            "noise rate must lie in [0, 1/2), got {eps}"
        )));
    }
    if eps >= 1.0 / 6.0 {
        return Ok(EnandVerification {
            ok: false,
            reason: Some("no distinct logical fixed points".into()),
            margins: Vec::new(),
        });
    }
    let fps = den_fixed_points(eps)?;
    let p0 = &fps[0].dist;
    let p1 = &fps[1].dist;
    let mut margins = Vec::with_capacity(4);
    for (a, b, want) in [(p0, p0, 1usize), (p0, p1, 1), (p1, p0, 1), (p1, p1, 0)] {
        let out = enand_map(&eps, a, b)?;
        let margin = out.weight(want) - out.weight(1 - want);
        margins.push(margin);
    }
    Ok(EnandVerification {
        ok: margins.iter().all(|&m| m > 0.0),
        reason: None,
        margins,
    })
}

/// Bounds on the error of one plurality-denoising step from an arbitrary
/// decodable input, compared against the symmetric-noise scalar map.
#[derive(Debug, Clone)]
pub struct BasinBoundsReport<W: Weight> {
    /// Output error weight 1 - p0'.
    pub alpha_prime: W,
    /// Symmetric-input value m_eps(1 - p0); the output error is never
    /// below it.
    pub lower_bound: W,
    /// Gap-based complement: m + m/(q-1) - p1'. Tight at symmetric inputs
    /// but not a pointwise guarantee: skewed inputs shrink the output gap
    /// below the symmetric value, so this is diagnostic only.
    pub upper_bound: W,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// Check the one-step error bounds for an input decoding to symbol 0.
/// Wrong-symbol weights are sorted descending first (the plurality gate is
/// relabeling-equivariant, so this only fixes a convention for p1').
/// Only the lower bound is a theorem; the upper bound is reported as a
/// diagnostic and holds with equality exactly at symmetric inputs.
pub fn basin_bounds_check<W: Weight>(
    d: &Dist<W>,
    eps: &W,
    k: usize,
) -> Result<BasinBoundsReport<W>> {
    match d.decode() {
        DecodeResult::Decoded(0) => {}
        DecodeResult::Decoded(s) => {
            return Err(Error::invalid(format!(
                "input must decode to symbol 0, decodes to {s}; relabel first"
            )));
        }
        DecodeResult::Tie(_) => {
            return Err(Error::invalid("input must decode uniquely, got a tie"));
        }
    }
    let q = d.q();
    let mut weights = d.weights().to_vec();
    weights[1..].sort_by(|a, b| b.partial_cmp(a).expect("weights are ordered"));
    let sorted = Dist::new(weights)?;

    let out = maj_map(q, k, eps, &sorted)?;
    let alpha_prime = one_minus(out.weight(0));
    let coeffs = coeffs_countvector(q, k)?;
    let m = m_eps(&coeffs, eps, &one_minus(sorted.weight(0)))?;
    let upper =
        m.clone() + m.clone() / W::from_int(q as i64 - 1) - out.weight(1).clone();
    let (lower_holds, upper_holds) = if W::EXACT {
        (alpha_prime >= m, alpha_prime <= upper)
    } else {
        let tol = float_tolerance();
        (
            alpha_prime.to_f64() >= m.to_f64() - tol,
            alpha_prime.to_f64() <= upper.to_f64() + tol,
        )
    };
    Ok(BasinBoundsReport {
        alpha_prime,
        lower_bound: m,
        upper_bound: upper,
        lower_holds,
        upper_holds,
    })
}

/// Orbit summary of a simplex map.
#[derive(Debug, Clone)]
pub struct SimplexTrajectory {
    pub final_dist: Dist<f64>,
    pub iterations: usize,
    /// True when the sup-norm step dropped below 1e-13 before the cap.
    pub converged: bool,
}

/// Iterate a simplex map until the step size drops below 1e-13 (sup norm)
/// or 1e5 steps elapse; non-convergence is reported, not hidden.
pub fn iterate_map(spec: &MapSpec, d0: &Dist<f64>) -> Result<SimplexTrajectory> {
    let mut current = d0.clone();
    for n in 0..ITERATION_CAP {
        // renormalize each iterate: per-step float drift is a few ulps but
        // compounds past the simplex validation tolerance over long orbits
        let raw = spec.apply(&current)?;
        let total: f64 = raw.weights().iter().sum();
        let next = Dist::new(raw.weights().iter().map(|w| w / total).collect())?;
        let step = current
            .weights()
            .iter()
            .zip(next.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        current = next;
        if step < ITERATION_STOP {
            return Ok(SimplexTrajectory {
                final_dist: current,
                iterations: n + 1,
                converged: true,
            });
        }
    }
    Ok(SimplexTrajectory {
        final_dist: current,
        iterations: ITERATION_CAP,
        converged: false,
    })
}

/// One displacement-field sample in chart coordinates.
#[derive(Debug, Clone, Copy)]
pub struct FieldRow {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
}

/// Sample `map(p) - p` on a barycentric lattice of side `resolution`,
/// reported in chart coordinates. Only strictly interior lattice points
/// (margin 1e-9) are emitted, in lexicographic lattice order.
pub fn field_grid(spec: &MapSpec, resolution: usize) -> Result<Vec<FieldRow>> {
    if spec.q() != 3 {
        return Err(Error::UnsupportedAlphabet {
            q: spec.q(),
            reason: "field export uses the ternary chart".into(),
        });
    }
    if resolution < 3 {
        return Err(Error::invalid("resolution must be at least 3"));
    }
    let mut rows = Vec::new();
    for i in 0..=resolution {
        for j in 0..=(resolution - i) {
            let l = resolution - i - j;
            let p = [
                i as f64 / resolution as f64,
                j as f64 / resolution as f64,
                l as f64 / resolution as f64,
            ];
            if p.iter().any(|&w| w < 1e-9) {
                continue;
            }
            let d = Dist::new(p.to_vec())?;
            let here = to_xy(&d)?;
            let image = to_xy(&spec.apply(&d)?)?;
            rows.push(FieldRow {
                x: here.x,
                y: here.y,
                dx: image.x - here.x,
                dy: image.y - here.y,
            });
        }
    }
    Ok(rows)
}

/// Count the distinct attracting endpoints seen from a barycentric lattice
/// of side `resolution`, skipping the boundary and the three tie lines
/// p_i = p_j. The tie lines are invariant under every ternary map here and
/// contain within-line attractors that are saddles of the full map, so
/// including them would inflate the census. Needs a fine enough lattice
/// that each basin holds an off-line point; the central basin near its
/// birth only spans max-weight deviations of about saddle - 1/3, while
/// off-line lattice points deviate at least 1/resolution.
pub fn sink_census(spec: &MapSpec, resolution: usize) -> Result<Vec<Dist<f64>>> {
    if spec.q() != 3 {
        return Err(Error::UnsupportedAlphabet {
            q: spec.q(),
            reason: "the census walks the ternary lattice".into(),
        });
    }
    if resolution < 3 {
        return Err(Error::invalid("resolution must be at least 3"));
    }
    let mut sinks: Vec<Dist<f64>> = Vec::new();
    for i in 0..=resolution {
        for j in 0..=(resolution - i) {
            let l = resolution - i - j;
            if i == 0 || j == 0 || l == 0 || i == j || j == l || i == l {
                continue;
            }
            let d = Dist::new(vec![
                i as f64 / resolution as f64,
                j as f64 / resolution as f64,
                l as f64 / resolution as f64,
            ])?;
            let t = iterate_map(spec, &d)?;
            if !t.converged {
                continue;
            }
            let w = t.final_dist.weights();
            if !sinks.iter().any(|s| {
                s.weights()
                    .iter()
                    .zip(w)
                    .all(|(a, b)| (a - b).abs() < 1e-6)
            }) {
                sinks.push(t.final_dist);
            }
        }
    }
    Ok(sinks)
}

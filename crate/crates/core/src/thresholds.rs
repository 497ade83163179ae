//! Scalar error dynamics of plurality gates and their denoising thresholds.
//!
//! Under symmetric noise the full simplex dynamics of a k-input plurality
//! gate collapses to a one-dimensional map on the total error weight `a`.
//! This module builds that map from a coefficient table, extracts the
//! restoration coefficient `C`, locates the two bifurcation points of the
//! noisy map (the transcritical point, where the balanced state changes
//! stability, and the saddle-node point, where the low-error fixed point
//! disappears), and classifies all scalar fixed points.

use crate::coeffs::{binomial, coeffs_countvector, CoeffTable};
use crate::error::{Error, Result};
use crate::weight::{in_unit_interval, ratio_string, Weight};
use num::rational::BigRational;
use num::traits::{One, Zero};
use num::BigInt;

/// Iteration stop: successive values closer than this end the orbit.
const ITERATION_STOP: f64 = 1e-13;
/// Hard cap on orbit length.
const ITERATION_CAP: usize = 100_000;
/// Width target for the saddle-node bisection.
const SADDLE_TOL: f64 = 1e-10;
/// Half-width of the marginal band when classifying |m'| against 1.
const STABILITY_MARGIN: f64 = 1e-9;
/// Two roots closer than this are reported as one.
const ROOT_SEPARATION: f64 = 1e-9;
/// Relative tangency tolerance for the polynomial root scan.
const TANGENCY_REL: f64 = 1e-12;

/// The balance point (q-1)/q, exactly.
pub fn balance_rational(q: usize) -> BigRational {
    BigRational::new(BigInt::from(q as i64 - 1), BigInt::from(q as i64))
}

/// Noiseless error map: output error weight of a plurality gate whose k
/// inputs independently carry error weight `a` spread uniformly over the
/// q-1 wrong symbols.
pub fn m0<W: Weight>(coeffs: &CoeffTable, a: &W) -> Result<W> {
    if !in_unit_interval(a) {
        return Err(Error::invalid(format!(
            "error weight must lie in [0,1], got {:?}",
            a
        )));
    }
    let k = coeffs.k();
    let correct = W::one() - a.clone();
    // powers[l] = (1-a)^l * a^(k-l)
    let mut out = W::zero();
    for l in 0..=k {
        let cl = coeffs.c(l);
        if cl.is_zero() {
            continue;
        }
        let mut term = W::from_rational(&(cl * BigRational::from_integer(binomial(k, l))));
        for _ in 0..l {
            term = term * correct.clone();
        }
        for _ in 0..(k - l) {
            term = term * a.clone();
        }
        out = out + term;
    }
    Ok(out)
}

fn channel_scale<W: Weight>(q: usize, eps: &W) -> Result<W> {
    let scale = W::one() - W::from_ratio(q as i64, q as i64 - 1) * eps.clone();
    if *eps < W::zero() || scale < W::zero() {
        return Err(Error::invalid(format!(
            "noise rate must lie in [0, (q-1)/q], got {:?}",
            eps
        )));
    }
    Ok(scale)
}

/// Noisy error map: the noiseless map followed by a symmetric channel at
/// rate `eps`, i.e. `(1 - q eps/(q-1)) m0(a) + eps`.
pub fn m_eps<W: Weight>(coeffs: &CoeffTable, eps: &W, a: &W) -> Result<W> {
    let scale = channel_scale(coeffs.q(), eps)?;
    Ok(scale * m0(coeffs, a)? + eps.clone())
}

/// Derivative of the noisy error map at `a`, from the expanded polynomial.
pub fn m_eps_derivative(coeffs: &CoeffTable, eps: f64, a: f64) -> Result<f64> {
    let poly = m_eps_poly(coeffs, eps)?;
    Ok(poly_eval(&poly_derive(&poly), a))
}

/// Restoration coefficient of a plurality gate. Equals the slope of the
/// noiseless error map at the balanced point (q-1)/q; denoising requires
/// C > 1. Defined for odd k only (even vote counts tie).
pub fn c_coefficient(coeffs: &CoeffTable) -> Result<BigRational> {
    let (q, k) = (coeffs.q(), coeffs.k());
    if k % 2 == 0 {
        return Err(Error::invalid(format!(
            "restoration coefficient requires an odd number of inputs, got k={k}"
        )));
    }
    let qm1 = BigInt::from(q as i64 - 1);
    let mut sum = BigRational::zero();
    for l in 0..=(k / 2) {
        let diff = coeffs.c(l) - coeffs.c(l + 1);
        if diff.is_zero() {
            continue;
        }
        let weight = binomial(k - 1, l) * qm1.pow((k - l - 1) as u32);
        sum += diff * BigRational::from_integer(weight);
    }
    let front = BigRational::new(
        BigInt::from(k as i64),
        BigInt::from(q as i64).pow((k - 1) as u32),
    );
    Ok(front * sum)
}

/// Noise rate at which the balanced state changes stability: the slope of
/// the noisy map at (q-1)/q crosses 1 when `eps = ((q-1)/q) (C-1)/C`.
/// Errors with [`Error::NoThreshold`] when C <= 1.
pub fn transcritical_eps(coeffs: &CoeffTable) -> Result<BigRational> {
    let c = c_coefficient(coeffs)?;
    if c <= BigRational::one() {
        return Err(Error::NoThreshold {
            c: ratio_string(&c),
        });
    }
    let ratio = (&c - BigRational::one()) / &c;
    Ok(balance_rational(coeffs.q()) * ratio)
}

/// Closed form of the transcritical point for the binary alphabet:
/// `1/2 - 2^(k-2) / (k * binom(k-1, (k-1)/2))`, odd k >= 3.
pub fn binary_transcritical_closed_form(k: usize) -> Result<BigRational> {
    if k % 2 == 0 || k < 3 {
        return Err(Error::invalid(format!(
            "binary closed form requires odd k >= 3, got k={k}"
        )));
    }
    let num = BigInt::from(2).pow((k - 2) as u32);
    let den = BigInt::from(k as i64) * binomial(k - 1, (k - 1) / 2);
    Ok(BigRational::from_ratio(1, 2) - BigRational::new(num, den))
}

/// Saddle-node location of the noisy scalar map.
#[derive(Debug, Clone)]
pub struct SaddleNode {
    /// Bisection estimate, accurate to the bisection width.
    pub eps: f64,
    /// Exact value `(q-1)/(5q-4)` available for k = 3.
    pub exact_k3: Option<BigRational>,
}

/// Noise rate at which the low-error fixed point of the noisy map collides
/// with the unstable fixed point and disappears. Located by bisection on the
/// sign of the deepest dip of `m_eps(a) - a` strictly below the balanced
/// point: the dip is negative exactly while the low-error pair exists, and
/// is strictly increasing in eps.
pub fn saddle_node_eps(coeffs: &CoeffTable) -> Result<SaddleNode> {
    // reuses the C > 1 and odd-k screens
    let _ = transcritical_eps(coeffs)?;
    let q = coeffs.q();
    let balance = Weight::to_f64(&balance_rational(q));

    let dip = |eps: f64| -> Result<f64> {
        let g = g_poly(coeffs, eps)?;
        let crit = roots_01(&poly_derive(&g));
        Ok(crit
            .into_iter()
            .filter(|&c| c > 0.0 && c < balance - ROOT_SEPARATION)
            .map(|c| poly_eval(&g, c))
            .fold(f64::INFINITY, f64::min))
    };

    let (mut lo, mut hi) = (0.0f64, balance);
    if dip(lo)? >= 0.0 {
        return Err(Error::NoThreshold {
            c: ratio_string(&c_coefficient(coeffs)?),
        });
    }
    while hi - lo > SADDLE_TOL {
        let mid = 0.5 * (lo + hi);
        if dip(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let exact_k3 = if coeffs.k() == 3 {
        Some(BigRational::new(
            BigInt::from(q as i64 - 1),
            BigInt::from(5 * q as i64 - 4),
        ))
    } else {
        None
    };
    Ok(SaddleNode {
        eps: 0.5 * (lo + hi),
        exact_k3,
    })
}

/// Stability of a scalar fixed point, judged by |m'| against 1 with a
/// marginal band of half-width 1e-9.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

/// A fixed point of the noisy scalar map.
#[derive(Debug, Clone)]
pub struct ScalarFixedPoint {
    pub a: f64,
    /// Slope of the map at the fixed point.
    pub derivative: f64,
    pub stability: Stability,
    /// Set when the point is recognized as the balanced state (q-1)/q,
    /// which is a fixed point at every noise rate.
    pub exact: Option<BigRational>,
}

/// All fixed points of the noisy scalar map in [0,1], ascending.
pub fn scalar_fixed_points(coeffs: &CoeffTable, eps: f64) -> Result<Vec<ScalarFixedPoint>> {
    let g = g_poly(coeffs, eps)?;
    let m_prime = {
        let m = m_eps_poly(coeffs, eps)?;
        poly_derive(&m)
    };
    let balance = balance_rational(coeffs.q());
    let balance_f = Weight::to_f64(&balance);
    let mut out = Vec::new();
    for a in roots_01(&g) {
        let derivative = poly_eval(&m_prime, a);
        let stability = if derivative.abs() < 1.0 - STABILITY_MARGIN {
            Stability::Stable
        } else if derivative.abs() > 1.0 + STABILITY_MARGIN {
            Stability::Unstable
        } else {
            Stability::Marginal
        };
        let exact = if (a - balance_f).abs() < ROOT_SEPARATION {
            Some(balance.clone())
        } else {
            None
        };
        out.push(ScalarFixedPoint {
            a,
            derivative,
            stability,
            exact,
        });
    }
    Ok(out)
}

/// Orbit of the noisy scalar map.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Visited values, starting with the initial point.
    pub values: Vec<f64>,
    /// True when successive values got closer than the stop width before
    /// the iteration cap.
    pub converged: bool,
}

impl Trajectory {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("orbit is never empty")
    }
}

/// Iterate the noisy scalar map from `a0` until the step size drops below
/// 1e-13 or 1e5 steps elapse.
pub fn iterate_m(coeffs: &CoeffTable, eps: f64, a0: f64) -> Result<Trajectory> {
    if !(0.0..=1.0).contains(&a0) {
        return Err(Error::invalid(format!(
            "initial error weight must lie in [0,1], got {a0}"
        )));
    }
    let poly = m_eps_poly(coeffs, eps)?;
    let mut values = vec![a0];
    let mut a = a0;
    let mut converged = false;
    for _ in 0..ITERATION_CAP {
        let next = poly_eval(&poly, a).clamp(0.0, 1.0);
        values.push(next);
        if (next - a).abs() < ITERATION_STOP {
            converged = true;
            break;
        }
        a = next;
    }
    Ok(Trajectory { values, converged })
}

/// Summary of the scalar threshold picture for one (q, k) pair.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub coeffs: CoeffTable,
    pub c_coefficient: BigRational,
    pub transcritical: BigRational,
    pub saddle_node: SaddleNode,
}

/// Compute coefficients (count-vector route), restoration coefficient and
/// both thresholds for a plurality gate with odd k.
pub fn threshold_report(q: usize, k: usize) -> Result<ThresholdReport> {
    let coeffs = coeffs_countvector(q, k)?;
    let c = c_coefficient(&coeffs)?;
    let transcritical = transcritical_eps(&coeffs)?;
    let saddle_node = saddle_node_eps(&coeffs)?;
    Ok(ThresholdReport {
        coeffs,
        c_coefficient: c,
        transcritical,
        saddle_node,
    })
}

// ---- polynomial plumbing ----
//
// The noisy map is a degree-k polynomial in a; all scans below expand it
// exactly in rationals first and convert the coefficients to f64 once.

fn m0_poly_rational(coeffs: &CoeffTable) -> Vec<BigRational> {
    let k = coeffs.k();
    let mut poly = vec![BigRational::zero(); k + 1];
    for l in 0..=k {
        let cl = coeffs.c(l);
        if cl.is_zero() {
            continue;
        }
        let lead = cl * BigRational::from_integer(binomial(k, l));
        // (1-a)^l a^(k-l) contributes binom(l,j)(-1)^j to degree k-l+j
        for j in 0..=l {
            let mut term = &lead * BigRational::from_integer(binomial(l, j));
            if j % 2 == 1 {
                term = -term;
            }
            poly[k - l + j] += term;
        }
    }
    poly
}

fn m_eps_poly(coeffs: &CoeffTable, eps: f64) -> Result<Vec<f64>> {
    let scale = channel_scale(coeffs.q(), &eps)?;
    let mut poly: Vec<f64> = m0_poly_rational(coeffs)
        .iter()
        .map(|c| scale * Weight::to_f64(c))
        .collect();
    poly[0] += eps;
    Ok(poly)
}

// m_eps(a) - a; fixed points are its roots
fn g_poly(coeffs: &CoeffTable, eps: f64) -> Result<Vec<f64>> {
    let mut poly = m_eps_poly(coeffs, eps)?;
    if poly.len() < 2 {
        poly.resize(2, 0.0);
    }
    poly[1] -= 1.0;
    Ok(poly)
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derive(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

/// All real roots of `p` in [0,1], ascending, merged to 1e-9 separation.
///
/// Recursion on the derivative: between consecutive critical points the
/// polynomial is monotone, so each cell holds at most one root, found by
/// bisection on a sign change. A critical point where |p| falls below a
/// scale-relative tangency tolerance is itself recorded as a (double) root.
fn roots_01(p: &[f64]) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |m, &c| m.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let deg = p.iter().rposition(|&c| c != 0.0).unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    if deg == 1 {
        let r = -p[0] / p[1];
        return if (0.0..=1.0).contains(&r) {
            vec![r]
        } else {
            Vec::new()
        };
    }

    let tangency = scale * TANGENCY_REL;
    let mut cuts = vec![0.0];
    cuts.extend(roots_01(&poly_derive(&p[..=deg])));
    cuts.push(1.0);

    let mut roots = Vec::new();
    for &c in &cuts {
        if poly_eval(p, c).abs() <= tangency {
            roots.push(c);
        }
    }
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (poly_eval(p, lo), poly_eval(p, hi));
        if flo.abs() <= tangency || fhi.abs() <= tangency {
            continue; // endpoint already recorded; cell is monotone
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if poly_eval(p, mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }

    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|b, a| (*b - *a).abs() < ROOT_SEPARATION);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::coeffs_enumerate;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn restoration_coefficient_small_cases() {
        let c23 = c_coefficient(&coeffs_enumerate(2, 3).unwrap()).unwrap();
        assert_eq!(c23, rat(3, 2));
        let c33 = c_coefficient(&coeffs_enumerate(3, 3).unwrap()).unwrap();
        assert_eq!(c33, rat(4, 3));
        // k=3 closed form (q+1)/q for a spread of alphabets
        for q in 2..=12 {
            let c = c_coefficient(&CoeffTable::closed_form_k3(q).unwrap()).unwrap();
            assert_eq!(c, rat(q as i64 + 1, q as i64));
        }
    }

    #[test]
    fn transcritical_small_cases() {
        let t = transcritical_eps(&coeffs_enumerate(2, 3).unwrap()).unwrap();
        assert_eq!(t, rat(1, 6));
        let t = transcritical_eps(&coeffs_enumerate(3, 3).unwrap()).unwrap();
        assert_eq!(t, rat(1, 6));
        let t = transcritical_eps(&coeffs_enumerate(2, 5).unwrap()).unwrap();
        assert_eq!(t, rat(7, 30));
        // k=3 closed form (q-1)/(q(q+1))
        for q in 2..=12i64 {
            let t =
                transcritical_eps(&CoeffTable::closed_form_k3(q as usize).unwrap()).unwrap();
            assert_eq!(t, rat(q - 1, q * (q + 1)));
        }
    }

    #[test]
    fn binary_closed_form_matches_coefficient_route() {
        for k in [3usize, 5, 7, 9] {
            let route = transcritical_eps(&coeffs_countvector(2, k).unwrap()).unwrap();
            let closed = binary_transcritical_closed_form(k).unwrap();
            assert_eq!(route, closed, "k={k}");
        }
        // frozen values
        assert_eq!(binary_transcritical_closed_form(3).unwrap(), rat(1, 6));
        assert_eq!(binary_transcritical_closed_form(5).unwrap(), rat(7, 30));
        assert_eq!(binary_transcritical_closed_form(7).unwrap(), rat(19, 70));
        assert_eq!(
            binary_transcritical_closed_form(9).unwrap(),
            rat(187, 630)
        );
    }

    #[test]
    fn single_input_gate_has_no_threshold() {
        let coeffs = coeffs_enumerate(3, 1).unwrap();
        assert_eq!(c_coefficient(&coeffs).unwrap(), BigRational::one());
        assert!(matches!(
            transcritical_eps(&coeffs),
            Err(Error::NoThreshold { .. })
        ));
        assert!(matches!(
            saddle_node_eps(&coeffs),
            Err(Error::NoThreshold { .. })
        ));
    }

    #[test]
    fn even_vote_counts_are_rejected() {
        let coeffs = coeffs_enumerate(3, 4).unwrap();
        assert!(c_coefficient(&coeffs).is_err());
        assert!(transcritical_eps(&coeffs).is_err());
        assert!(saddle_node_eps(&coeffs).is_err());
    }

    #[test]
    fn saddle_node_k3_matches_closed_form() {
        for q in [2usize, 3, 5, 7] {
            let sn = saddle_node_eps(&CoeffTable::closed_form_k3(q).unwrap()).unwrap();
            let exact = sn.exact_k3.clone().unwrap();
            assert_eq!(exact, rat(q as i64 - 1, 5 * q as i64 - 4));
            let exact_f = Weight::to_f64(&exact);
            assert!(
                (sn.eps - exact_f).abs() < 1e-10,
                "q={q}: bisection {} vs exact {}",
                sn.eps,
                exact_f
            );
        }
    }

    #[test]
    fn saddle_node_frozen_values() {
        // q=3,k=3: 2/11; q=2,k=3: 1/6 (coincides with the transcritical
        // point because the binary map is symmetric); q=5,k=3: 4/21
        let sn = saddle_node_eps(&coeffs_enumerate(3, 3).unwrap()).unwrap();
        assert!((sn.eps - 2.0 / 11.0).abs() < 1e-10);
        let sn = saddle_node_eps(&coeffs_enumerate(2, 3).unwrap()).unwrap();
        assert!((sn.eps - 1.0 / 6.0).abs() < 1e-10);
        let sn = saddle_node_eps(&coeffs_enumerate(5, 3).unwrap()).unwrap();
        assert!((sn.eps - 4.0 / 21.0).abs() < 1e-10);
    }

    #[test]
    fn saddle_node_sits_at_or_above_transcritical() {
        for (q, k) in [(2, 3), (2, 5), (3, 3), (3, 5), (4, 3), (5, 3), (5, 5)] {
            let coeffs = coeffs_countvector(q, k).unwrap();
            let trans = Weight::to_f64(&transcritical_eps(&coeffs).unwrap());
            let sn = saddle_node_eps(&coeffs).unwrap().eps;
            assert!(
                sn >= trans - 1e-9,
                "(q,k)=({q},{k}): saddle {sn} below transcritical {trans}"
            );
        }
    }

    #[test]
    fn fixed_point_structure_across_noise_regimes() {
        let coeffs = coeffs_enumerate(3, 3).unwrap();

        // noiseless: 0 and 1 are absorbing, balance unstable between them
        let fps = scalar_fixed_points(&coeffs, 0.0).unwrap();
        assert_eq!(fps.len(), 3);
        assert!(fps[0].a.abs() < 1e-12);
        assert_eq!(fps[0].stability, Stability::Stable);
        assert!((fps[1].a - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(fps[1].stability, Stability::Unstable);
        assert!(fps[1].exact.is_some());
        assert!((fps[2].a - 1.0).abs() < 1e-12);
        assert_eq!(fps[2].stability, Stability::Stable);

        // at the transcritical point the crossing root sits at the balanced
        // state, which is marginal; the low-error point is exactly 1/3
        let fps = scalar_fixed_points(&coeffs, 1.0 / 6.0).unwrap();
        assert_eq!(fps.len(), 2);
        assert!((fps[0].a - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(fps[0].stability, Stability::Stable);
        assert!((fps[1].a - 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(fps[1].stability, Stability::Marginal);

        // between the two bifurcations: low-error stable, middle unstable,
        // balance stable
        let fps = scalar_fixed_points(&coeffs, 0.17).unwrap();
        assert_eq!(fps.len(), 3);
        assert_eq!(fps[0].stability, Stability::Stable);
        assert!(fps[0].a < 0.4);
        assert_eq!(fps[1].stability, Stability::Unstable);
        assert_eq!(fps[2].stability, Stability::Stable);
        assert!(fps[2].exact.is_some());

        // beyond the saddle-node only the balanced state survives
        let fps = scalar_fixed_points(&coeffs, 0.19).unwrap();
        assert_eq!(fps.len(), 1);
        assert!((fps[0].a - 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(fps[0].stability, Stability::Stable);
    }

    #[test]
    fn balanced_state_is_always_fixed_exactly() {
        for (q, k) in [(2usize, 3usize), (3, 3), (3, 5), (5, 3), (7, 5)] {
            let coeffs = coeffs_countvector(q, k).unwrap();
            let balance = balance_rational(q);
            assert_eq!(m0(&coeffs, &balance).unwrap(), balance, "(q,k)=({q},{k})");
            for eps in [rat(1, 7), rat(1, 12), rat(2, 13)] {
                assert_eq!(
                    m_eps(&coeffs, &eps, &balance).unwrap(),
                    balance,
                    "(q,k)=({q},{k}), eps={eps}"
                );
            }
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let coeffs = coeffs_enumerate(3, 3).unwrap();
        for eps in [0.0, 0.05, 1.0 / 6.0, 0.2] {
            for a in [0.1, 0.3, 0.5, 2.0 / 3.0, 0.9] {
                let d = m_eps_derivative(&coeffs, eps, a).unwrap();
                let h = 1e-6;
                let up: f64 = m_eps(&coeffs, &eps, &(a + h)).unwrap();
                let dn: f64 = m_eps(&coeffs, &eps, &(a - h)).unwrap();
                let fd = (up - dn) / (2.0 * h);
                assert!((d - fd).abs() < 1e-8, "eps={eps} a={a}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn iteration_converges_to_the_expected_attractor() {
        let coeffs = coeffs_enumerate(3, 3).unwrap();

        // below both thresholds, small error contracts to the low point
        let t = iterate_m(&coeffs, 0.1, 0.2).unwrap();
        assert!(t.converged);
        let fps = scalar_fixed_points(&coeffs, 0.1).unwrap();
        assert!((t.final_value() - fps[0].a).abs() < 1e-9);

        // beyond the saddle-node everything lands on the balanced state
        let t = iterate_m(&coeffs, 0.2, 0.01).unwrap();
        assert!(t.converged);
        assert!((t.final_value() - 2.0 / 3.0).abs() < 1e-9);

        // starting at a fixed point stays there
        let t = iterate_m(&coeffs, 0.1, fps[0].a).unwrap();
        assert!(t.converged);
        assert!(t.values.len() <= 3);
    }

    #[test]
    fn report_bundles_consistent_numbers() {
        let r = threshold_report(3, 3).unwrap();
        assert_eq!(r.c_coefficient, rat(4, 3));
        assert_eq!(r.transcritical, rat(1, 6));
        assert_eq!(r.saddle_node.exact_k3.clone().unwrap(), rat(2, 11));
        assert!((r.saddle_node.eps - 2.0 / 11.0).abs() < 1e-10);
        assert_eq!(r.coeffs.c(1), &rat(5, 6));
    }

    #[test]
    fn rejects_out_of_range_arguments() {
        let coeffs = coeffs_enumerate(3, 3).unwrap();
        assert!(m0(&coeffs, &1.5f64).is_err());
        assert!(m_eps(&coeffs, &0.9f64, &0.5f64).is_err());
        assert!(iterate_m(&coeffs, 0.1, -0.2).is_err());
        assert!(binary_transcritical_closed_form(4).is_err());
        assert!(binary_transcritical_closed_form(1).is_err());
    }

    proptest! {
        // the noiseless map is monotone in the input error weight
        #[test]
        fn m0_is_monotone(
            q in 2usize..6,
            k in 1usize..6,
            n1 in 0i64..=60,
            n2 in 0i64..=60,
        ) {
            let coeffs = coeffs_countvector(q, k).unwrap();
            let (lo, hi) = (n1.min(n2), n1.max(n2));
            let a1 = rat(lo, 60);
            let a2 = rat(hi, 60);
            let v1 = m0(&coeffs, &a1).unwrap();
            let v2 = m0(&coeffs, &a2).unwrap();
            prop_assert!(v1 <= v2);
        }

        // the noisy map sends [0,1] into [0,1] for any admissible rate
        #[test]
        fn m_eps_stays_in_unit_interval(
            q in 2usize..6,
            k in 1usize..6,
            an in 0i64..=40,
            en in 0i64..=40,
        ) {
            let coeffs = coeffs_countvector(q, k).unwrap();
            let a = rat(an, 40);
            // eps spans [0, (q-1)/q]
            let eps = balance_rational(q) * rat(en, 40);
            let v = m_eps(&coeffs, &eps, &a).unwrap();
            prop_assert!(v >= BigRational::zero() && v <= BigRational::one());
        }
    }
}

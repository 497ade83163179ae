//! A fast self-contained invariant suite, exercising one load-bearing
//! property per module. The command line exposes it as `selftest`; it is
//! deliberately much smaller than the test suite and finishes in seconds.

use crate::coeffs::{coeffs_countvector, coeffs_enumerate, CoeffTable};
use crate::dynamics::{
    basin_bounds_check, den_fixed_points, den_map, den_map_xy, enand_closed_form,
    enand_map, enand_verify, lyapunov_v, xi_from_eps,
};
use crate::error::Result;
use crate::gates::{builtin_gate, FormulaNode, GateKind};
use crate::montecarlo::run_formula;
use crate::simplex::{from_xy, symmetric_encode, to_xy, Dist, XYPoint};
use crate::snp::{mul_distinguishability, prop_add, snp_output_check};
use crate::thresholds::{
    balance_rational, m_eps, saddle_node_eps, threshold_report,
};
use crate::weight::Weight;
use num::rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Short human-readable evidence (value compared, tolerance, ...).
    pub detail: String,
}

fn rat(n: i64, d: i64) -> BigRational {
    <BigRational as Weight>::from_ratio(n, d)
}

fn check(
    out: &mut Vec<CheckResult>,
    name: &'static str,
    body: impl FnOnce() -> Result<(bool, String)>,
) {
    let (passed, detail) = match body() {
        Ok(pair) => pair,
        Err(e) => (false, format!("error: {e}")),
    };
    out.push(CheckResult {
        name,
        passed,
        detail,
    });
}

/// Run the whole suite; every entry must pass on a healthy build.
pub fn run_selftest() -> Vec<CheckResult> {
    let mut results = Vec::new();

    check(&mut results, "coefficient routes agree", || {
        for (q, k) in [(2usize, 5usize), (3, 3), (3, 5), (5, 3)] {
            if coeffs_enumerate(q, k)?.coeffs() != coeffs_countvector(q, k)?.coeffs() {
                return Ok((false, format!("mismatch at q={q}, k={k}")));
            }
        }
        Ok((true, "enumeration = count-vector on 4 tables".into()))
    });

    check(&mut results, "k=3 coefficient closed form", || {
        for q in 2..=7usize {
            if CoeffTable::closed_form_k3(q)?.coeffs()
                != coeffs_countvector(q, 3)?.coeffs()
            {
                return Ok((false, format!("mismatch at q={q}")));
            }
        }
        Ok((true, "closed form matches enumeration for q=2..7".into()))
    });

    check(&mut results, "balanced state is a fixed point", || {
        for q in [2usize, 3, 5] {
            let coeffs = coeffs_countvector(q, 3)?;
            let b = balance_rational(q);
            for eps in [rat(0, 1), rat(1, 6), rat(1, 5)] {
                if m_eps(&coeffs, &eps, &b)? != b {
                    return Ok((false, format!("drift at q={q}")));
                }
            }
        }
        Ok((true, "m_eps((q-1)/q) = (q-1)/q exactly".into()))
    });

    check(&mut results, "ternary thresholds", || {
        let report = threshold_report(3, 3)?;
        let trans_ok = report.transcritical == rat(1, 6);
        let saddle = saddle_node_eps(&coeffs_countvector(3, 3)?)?;
        let saddle_ok = (saddle.eps - 2.0 / 11.0).abs() < 1e-9
            && saddle.exact_k3 == Some(rat(2, 11));
        Ok((
            trans_ok && saddle_ok,
            format!("transcritical 1/6, saddle-node {:.12}", saddle.eps),
        ))
    });

    check(&mut results, "denoiser fixed points", || {
        for eps in [0.0f64, 0.1] {
            for fp in den_fixed_points(eps)? {
                let image = den_map(&eps, &fp.dist)?;
                let residual = image
                    .weights()
                    .iter()
                    .zip(fp.dist.weights())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                if residual > 1e-12 {
                    return Ok((false, format!("residual {residual:.2e} at eps={eps}")));
                }
            }
        }
        Ok((true, "residuals < 1e-12 at eps = 0 and 0.1".into()))
    });

    check(&mut results, "energy function descends", || {
        let eps = 0.1;
        let xi = xi_from_eps(eps);
        let fps = den_fixed_points(eps)?;
        let at_fp = lyapunov_v(xi, to_xy(&fps[1].dist)?);
        if at_fp > 1e-12 {
            return Ok((false, format!("V at fixed point {at_fp:.2e}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            // random point decoding to 1
            let p1: f64 = rng.random_range(0.4..0.9);
            let rest = 1.0 - p1;
            let p0 = rng.random_range(0.0..rest.min(p1 - 1e-6));
            let d = Dist::new(vec![p0, p1, 1.0 - p0 - p1])?;
            let here = to_xy(&d)?;
            let image = den_map_xy(eps, here)?;
            if lyapunov_v(xi, image) > lyapunov_v(xi, here) + 1e-12 {
                return Ok((false, format!("ascent at ({:.3}, {:.3})", here.x, here.y)));
            }
        }
        Ok((true, "V = 0 at the fixed point, descent on 100 points".into()))
    });

    check(&mut results, "error-signaling NAND", || {
        let v = enand_verify(0.1)?;
        if !v.ok {
            return Ok((false, "inequalities failed at eps=0.1".into()));
        }
        let fps = den_fixed_points(0.1)?;
        let out = enand_map(&0.1, &fps[0].dist, &fps[1].dist)?;
        let (w0, w1) = enand_closed_form(0.1, 0, 1)?;
        let ok = (out.weight(0) - w0).abs() < 1e-12 && (out.weight(1) - w1).abs() < 1e-12;
        Ok((ok, "closed form matches pushforward at eps=0.1".into()))
    });

    check(&mut results, "one-step error lower bound", || {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let mut parts: Vec<i64> = (0..3).map(|_| rng.random_range(1..50i64)).collect();
            parts.sort_unstable_by(|a, b| b.cmp(a));
            if parts[0] == parts[1] {
                parts[0] += 1;
            }
            let total: i64 = parts.iter().sum();
            let d = Dist::new(parts.iter().map(|&p| rat(p, total)).collect::<Vec<_>>())?;
            let report = basin_bounds_check(&d, &rat(1, 20), 3)?;
            if !report.lower_holds {
                return Ok((false, format!("violated at {:?}", d.weights())));
            }
        }
        Ok((true, "holds on 50 random rational inputs".into()))
    });

    check(&mut results, "sum-gate noise propagation", || {
        let gate = builtin_gate(&GateKind::Add, 5, 2)?;
        for i in 0..8i64 {
            for j in 0..8i64 {
                let (a1, a2, eps) = (rat(i, 8), rat(j, 8), rat(i + j, 16));
                let got = snp_output_check(&gate, &[(1, a1.clone()), (3, a2.clone())], &eps)?;
                if !got.symmetric || got.b != prop_add(&a1, &a2, &eps, 5)? {
                    return Ok((false, format!("mismatch at i={i}, j={j}")));
                }
            }
        }
        Ok((true, "closed form = pushforward on an 8x8 grid".into()))
    });

    check(&mut results, "product margin threshold", || {
        let expected = 1.0 - 1.0 / 3f64.sqrt();
        let just_below = mul_distinguishability::<f64>(3, &(expected - 1e-6))?;
        let just_above = mul_distinguishability::<f64>(3, &(expected + 1e-6))?;
        let ok = just_below.margin > 0.0 && just_above.margin < 0.0;
        Ok((ok, format!("sign change at {expected:.6}")))
    });

    check(&mut results, "chart round trip", || {
        let d = symmetric_encode(3, 0, &0.2f64)?;
        let back = from_xy(to_xy(&d)?)?;
        let err = d
            .weights()
            .iter()
            .zip(back.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let origin = to_xy(&Dist::uniform(3)?)?;
        let ok = err < 1e-14 && origin.x.abs() < 1e-15 && origin.y.abs() < 1e-15;
        Ok((ok, format!("round-trip error {err:.2e}")))
    });

    check(&mut results, "seeded sampling reproduces", || {
        let den = builtin_gate(&GateKind::Den, 3, 2)?;
        let f = FormulaNode::gate(den, vec![FormulaNode::leaf(0), FormulaNode::leaf(1)])?;
        let enc = symmetric_encode(3, 0, &0.2f64)?;
        let leaves: HashMap<usize, Dist<f64>> =
            [(0, enc.clone()), (1, enc)].into();
        let a = run_formula(&f, &leaves, 0.05, 20_000, 99)?;
        let b = run_formula(&f, &leaves, 0.05, 20_000, 99)?;
        let exact_err = {
            let d = den_map(&0.05f64, &symmetric_encode(3, 0, &0.2f64)?)?;
            1.0 - d.weight(0)
        };
        let ok = a.histogram == b.histogram
            && (a.error_rate - exact_err).abs() < 4.0 * (0.25 / 20_000f64).sqrt();
        Ok((ok, "bit-identical histograms, 4-sigma accuracy".into()))
    });

    check(&mut results, "chart sanity at the corner", || {
        // the logical-0 point at eps=0 maps to itself under the denoiser
        let corner = Dist::point_mass(3, 0)?;
        let image = den_map(&0.0f64, &corner)?;
        let ok = image.weights() == corner.weights();
        Ok((ok, "point mass is fixed at zero noise".into()))
    });

    check(&mut results, "chart rejects outside points", || {
        let ok = from_xy(XYPoint { x: 2.0, y: 2.0 }).is_err();
        Ok((ok, "far exterior point rejected".into()))
    });

    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn every_selftest_check_passes() {
        let results = run_selftest();
        assert!(results.len() >= 10);
        for r in &results {
            assert!(r.passed, "check '{}' failed: {}", r.name, r.detail);
        }
    }

    #[test]
    fn check_names_are_unique() {
        let results = run_selftest();
        let names: HashSet<&str> = results.iter().map(|r| r.name).collect();
        assert_eq!(names.len(), results.len());
    }
}

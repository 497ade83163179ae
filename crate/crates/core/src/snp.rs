//! Closed-form noise propagation through the additive gate family, and the
//! distinguishability analysis for the modular product gate.
//!
//! A unary permutation gate and the modular sum gate map symmetric-noise
//! encodings to symmetric-noise encodings, so their output error rates have
//! closed forms in the input error rates alone. The product gate does not:
//! it piles error weight onto the zero symbol, and stays usable only while
//! the correct product outweighs that pile. `snp_output_check` tests the
//! output-symmetry property itself by exact pushforward, independently of
//! the structural restriction check in [`crate::gates`].

use crate::error::{Error, Result};
use crate::gates::{pushforward, GateTable, Symbol};
use crate::simplex::symmetric_encode;
use crate::weight::{float_tolerance, in_unit_interval, one_minus, Weight};

/// Outcome of pushing symmetric encodings through a gate: the output error
/// rate, and whether the output is itself a symmetric encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult<W: Weight> {
    /// Error rate 1 - (weight on the intended output symbol).
    pub b: W,
    /// True when every off-target output weight is equal, i.e. the output
    /// is a b-noisy encoding of the intended symbol.
    pub symmetric: bool,
}

fn check_rate<W: Weight>(name: &str, v: &W) -> Result<()> {
    if !in_unit_interval(v) {
        return Err(Error::invalid(format!("{name} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_q(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::UnsupportedAlphabet {
            q,
            reason: "propagation formulas need at least two symbols".into(),
        });
    }
    Ok(())
}

/// Output error rate of a unary permutation gate with gate noise `eps` on an
/// `a`-noisy input: b = eps + (1 - q*eps/(q-1)) * a. Which permutation is
/// irrelevant; relabeling both ends cancels.
pub fn prop_perm<W: Weight>(a: &W, eps: &W, q: usize) -> Result<W> {
    check_q(q)?;
    check_rate("a", a)?;
    check_rate("eps", eps)?;
    let scale = W::one() - W::from_int(q as i64) * eps.clone() / W::from_int(q as i64 - 1);
    Ok(eps.clone() + scale * a.clone())
}

/// Output error rate of the modular sum gate with gate noise `eps` on
/// independent a1- and a2-noisy inputs:
/// b' = eps + (a1(q-1) + (1-a1) a2 q - a2) (q(1-eps) - 1) / (q-1)^2.
/// The bracket is (q-1) times the noiseless sum error
/// a1 + a2 - q a1 a2/(q-1); the second factor is the channel contraction.
pub fn prop_add<W: Weight>(a1: &W, a2: &W, eps: &W, q: usize) -> Result<W> {
    check_q(q)?;
    check_rate("a1", a1)?;
    check_rate("a2", a2)?;
    check_rate("eps", eps)?;
    let qq = W::from_int(q as i64);
    let qm1 = W::from_int(q as i64 - 1);
    let bracket = a1.clone() * qm1.clone() + one_minus(a1) * a2.clone() * qq.clone()
        - a2.clone();
    let contraction = (qq * one_minus(eps) - W::one()) / (qm1.clone() * qm1);
    Ok(eps.clone() + bracket * contraction)
}

/// Distinguishability of a nonzero modular product computed from two
/// a-noisy nonzero inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct MulReport<W: Weight> {
    /// Weight on the correct (nonzero) product.
    pub p_correct: W,
    /// Weight on the zero symbol, the dominant confusion.
    pub p_0: W,
    /// p_correct - p_0; the product is decodable against zero while
    /// positive.
    pub margin: W,
    /// Input error rate 1 - 1/sqrt(q) where the margin changes sign.
    pub threshold: f64,
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Weights relevant to decoding a product of two nonzero symbols from
/// a-noisy inputs over a prime alphabet:
/// p_correct = (1-a)^2 + (q-2) (a/(q-1))^2 and
/// p_0 = 2 (a/(q-1)) - (a/(q-1))^2. The margin vanishes at a = 1 - 1/sqrt(q).
///
/// A prime q keeps every nonzero symbol invertible, which is what makes the
/// wrong-wrong collision count exactly q-2. The zero-product case has no
/// threshold claim and is out of scope here.
pub fn mul_distinguishability<W: Weight>(q: usize, a: &W) -> Result<MulReport<W>> {
    if !is_prime(q) {
        return Err(Error::UnsupportedAlphabet {
            q,
            reason: "the product analysis needs every nonzero symbol invertible".into(),
        });
    }
    check_rate("a", a)?;
    let z = a.clone() / W::from_int(q as i64 - 1);
    let p_correct =
        one_minus(a) * one_minus(a) + W::from_int(q as i64 - 2) * z.clone() * z.clone();
    let p_0 = W::from_int(2) * z.clone() - z.clone() * z;
    let margin = p_correct.clone() - p_0.clone();
    Ok(MulReport {
        p_correct,
        p_0,
        margin,
        threshold: 1.0 - 1.0 / (q as f64).sqrt(),
    })
}

/// Push independent symmetric encodings `(target, error rate)` through `g`
/// with gate noise `eps` and report whether the output is itself a
/// symmetric encoding of the noiseless gate value. Exact weights compare
/// exactly; floats compare to the global tolerance.
pub fn snp_output_check<W: Weight>(
    g: &GateTable,
    inputs: &[(Symbol, W)],
    eps: &W,
) -> Result<PropagationResult<W>> {
    if inputs.len() != g.k() {
        return Err(Error::invalid(format!(
            "gate {} takes {} inputs, got {}",
            g.name(),
            g.k(),
            inputs.len()
        )));
    }
    let dists = inputs
        .iter()
        .map(|(s, a)| symmetric_encode(g.q(), *s as usize, a))
        .collect::<Result<Vec<_>>>()?;
    let targets: Vec<Symbol> = inputs.iter().map(|(s, _)| *s).collect();
    let intended = g.eval(&targets) as usize;
    let out = pushforward(g, &dists, eps)?;
    let off: Vec<&W> = (0..g.q())
        .filter(|&i| i != intended)
        .map(|i| out.weight(i))
        .collect();
    let symmetric = off.windows(2).all(|w| {
        if W::EXACT {
            w[0] == w[1]
        } else {
            (w[0].to_f64() - w[1].to_f64()).abs() <= float_tolerance()
        }
    });
    Ok(PropagationResult {
        b: one_minus(out.weight(intended)),
        symmetric,
    })
}

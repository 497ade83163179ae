//! Probability vectors over a q-ary alphabet and the standard operations on
//! them: symmetric encodings, the symmetric noise channel, maximum-likelihood
//! decoding, and the planar chart used for the q=3 dynamics.

use crate::error::{Error, Result};
use crate::weight::{in_unit_interval, one_minus, Weight};

pub const MAX_ALPHABET: usize = 64;

/// A point of the probability simplex over symbols `0..q`.
///
/// Weights are validated at construction: every coordinate in [0,1] and the
/// total equal to 1 (exactly in rational mode, within the global tolerance in
/// float mode). Nothing is silently renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist<W: Weight> {
    weights: Vec<W>,
}

/// Outcome of maximum-likelihood decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeResult {
    Decoded(usize),
    /// All symbols sharing the maximal weight, ascending.
    Tie(Vec<usize>),
}

impl DecodeResult {
    pub fn symbol(&self) -> Option<usize> {
        match self {
            DecodeResult::Decoded(s) => Some(*s),
            DecodeResult::Tie(_) => None,
        }
    }
}

fn check_q(q: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::UnsupportedAlphabet {
            q,
            reason: "need at least two symbols".into(),
        });
    }
    if q > MAX_ALPHABET {
        return Err(Error::UnsupportedAlphabet {
            q,
            reason: format!("alphabets larger than {MAX_ALPHABET} are out of scope"),
        });
    }
    Ok(())
}

impl<W: Weight> Dist<W> {
    pub fn new(weights: Vec<W>) -> Result<Self> {
        check_q(weights.len())?;
        for w in &weights {
            if !in_unit_interval(w) {
                return Err(Error::invalid(format!(
                    "weight {:?} outside [0, 1]",
                    w
                )));
            }
        }
        let mut sum = W::zero();
        for w in &weights {
            sum = sum + w.clone();
        }
        if !sum.close(&W::one()) {
            return Err(Error::invalid(format!(
                "weights sum to {:?}, expected 1",
                sum
            )));
        }
        Ok(Dist { weights })
    }

    pub fn point_mass(q: usize, symbol: usize) -> Result<Self> {
        check_q(q)?;
        if symbol >= q {
            return Err(Error::invalid(format!("symbol {symbol} not in [0, {q})")));
        }
        let mut weights = vec![W::zero(); q];
        weights[symbol] = W::one();
        Ok(Dist { weights })
    }

    pub fn uniform(q: usize) -> Result<Self> {
        check_q(q)?;
        let w = W::one() / W::from_int(q as i64);
        Ok(Dist {
            weights: vec![w; q],
        })
    }

    pub fn q(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, symbol: usize) -> &W {
        &self.weights[symbol]
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    /// Largest-weight symbol; ties are reported, not broken.
    pub fn decode(&self) -> DecodeResult {
        let mut best = 0usize;
        for i in 1..self.weights.len() {
            if self.weights[i] > self.weights[best] {
                best = i;
            }
        }
        let ties: Vec<usize> = (0..self.weights.len())
            .filter(|&i| self.weights[i] == self.weights[best])
            .collect();
        if ties.len() == 1 {
            DecodeResult::Decoded(best)
        } else {
            DecodeResult::Tie(ties)
        }
    }

    /// Bridge into float mode (one-way; there is no implicit path back).
    pub fn to_f64(&self) -> Dist<f64> {
        Dist {
            weights: self.weights.iter().map(|w| w.to_f64()).collect(),
        }
    }

    /// Probability of drawing anything other than `symbol`.
    pub fn error_weight(&self, symbol: usize) -> W {
        one_minus(&self.weights[symbol])
    }
}

/// Weight 1-a at `target` and a/(q-1) on each other symbol.
pub fn symmetric_encode<W: Weight>(q: usize, target: usize, a: &W) -> Result<Dist<W>> {
    check_q(q)?;
    if target >= q {
        return Err(Error::invalid(format!("symbol {target} not in [0, {q})")));
    }
    if !in_unit_interval(a) {
        return Err(Error::invalid("noise level outside [0, 1]".to_string()));
    }
    let off = a.clone() / W::from_int((q - 1) as i64);
    let mut weights = vec![off; q];
    weights[target] = one_minus(a);
    Ok(Dist { weights })
}

/// Push a distribution through the q-ary symmetric channel with flip
/// probability eps: each coordinate maps to (1 - q*eps/(q-1))*d_i + eps/(q-1).
pub fn apply_channel<W: Weight>(d: &Dist<W>, eps: &W) -> Result<Dist<W>> {
    if !in_unit_interval(eps) {
        return Err(Error::invalid("channel noise outside [0, 1]".to_string()));
    }
    let q = d.q();
    let qm1 = W::from_int((q - 1) as i64);
    let shift = eps.clone() / qm1.clone();
    let scale = W::one() - eps.clone() * W::from_int(q as i64) / qm1;
    let weights = d
        .weights
        .iter()
        .map(|w| scale.clone() * w.clone() + shift.clone())
        .collect();
    Ok(Dist { weights })
}

/// Planar coordinates for q=3 distributions:
/// x = (sqrt(3)/4)(p1 - p0), y = (3/4)(p0 + p1 - 2/3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XYPoint {
    pub x: f64,
    pub y: f64,
}

pub const SQRT3: f64 = 1.7320508075688772;

pub fn to_xy(d: &Dist<f64>) -> Result<XYPoint> {
    if d.q() != 3 {
        return Err(Error::UnsupportedAlphabet {
            q: d.q(),
            reason: "planar chart is defined for q=3 only".into(),
        });
    }
    let p0 = d.weights[0];
    let p1 = d.weights[1];
    Ok(XYPoint {
        x: SQRT3 / 4.0 * (p1 - p0),
        y: 0.75 * (p0 + p1 - 2.0 / 3.0),
    })
}

/// Inverse chart. Errors when the preimage is not a valid distribution.
pub fn from_xy(pt: XYPoint) -> Result<Dist<f64>> {
    let p0 = 1.0 / 3.0 + 2.0 * pt.y / 3.0 - 2.0 * pt.x / SQRT3;
    let p1 = 1.0 / 3.0 + 2.0 * pt.y / 3.0 + 2.0 * pt.x / SQRT3;
    let p2 = 1.0 / 3.0 - 4.0 * pt.y / 3.0;
    Dist::new(vec![p0, p1, p2])
}

/// True when `d` lies within `tol` of some valid distribution boundary-wise;
/// used by grid generators to stay strictly interior.
pub fn strictly_interior(d: &Dist<f64>, margin: f64) -> bool {
    d.weights().iter().all(|&w| w > margin)
}

//! Error coefficients of the plurality gate: for each number of correct
//! inputs l, the fraction c_l of input assignments the gate still gets wrong.
//! Two independent routes compute them: brute-force enumeration of all q^k
//! assignments, and a count-vector sum that only walks compositions of k.

use crate::error::{Error, Result};
use crate::gates::maj_symbol;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};

/// Default cap on q^k for the enumeration route.
pub const DEFAULT_ENUM_BUDGET: u128 = 100_000_000;

/// The coefficients c_0..c_k for a fixed (q, k), exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    q: usize,
    k: usize,
    c: Vec<BigRational>,
}

impl CoeffTable {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// c_l for l in 0..=k.
    pub fn c(&self, l: usize) -> &BigRational {
        &self.c[l]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    /// Closed form at k=3: (1, 1 - (q-2)/(3(q-1)), 0, 0).
    pub fn closed_form_k3(q: usize) -> Result<CoeffTable> {
        check_params(q, 3)?;
        let c1 = BigRational::one()
            - BigRational::new(BigInt::from(q as i64 - 2), BigInt::from(3 * (q as i64 - 1)));
        Ok(CoeffTable {
            q,
            k: 3,
            c: vec![
                BigRational::one(),
                c1,
                BigRational::zero(),
                BigRational::zero(),
            ],
        })
    }
}

fn check_params(q: usize, k: usize) -> Result<()> {
    if q < 2 || q > crate::simplex::MAX_ALPHABET {
        return Err(Error::UnsupportedAlphabet {
            q,
            reason: "coefficients are defined for 2 <= q <= 64".into(),
        });
    }
    if k == 0 {
        return Err(Error::invalid("fan-in k must be at least 1".to_string()));
    }
    Ok(())
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn pow_big(base: usize, exp: usize) -> BigInt {
    num::pow::pow(BigInt::from(base), exp)
}

/// Number of assignments of the k-l wrong positions: binom(k,l)*(q-1)^(k-l).
fn stratum_size(q: usize, k: usize, l: usize) -> BigInt {
    binomial(k, l) * pow_big(q - 1, k - l)
}

/// Enumeration route: walk all q^k assignments with the correct value pinned
/// to symbol 0 and count, per number of zeros, how often the vote is wrong.
pub fn coeffs_enumerate(q: usize, k: usize) -> Result<CoeffTable> {
    coeffs_enumerate_budgeted(q, k, DEFAULT_ENUM_BUDGET)
}

pub fn coeffs_enumerate_budgeted(q: usize, k: usize, budget: u128) -> Result<CoeffTable> {
    check_params(q, k)?;
    let total = (q as u128)
        .checked_pow(k as u32)
        .ok_or_else(|| overflow_err(q, k))?;
    if total > budget {
        return Err(overflow_err(q, k));
    }
    let mut wrong = vec![0u64; k + 1];
    let mut tuple = vec![0u8; k];
    let mut zeros = k;
    loop {
        if maj_symbol(q, &tuple) != 0 {
            wrong[zeros] += 1;
        }
        // odometer increment, tracking the number of zero entries
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(finish(q, k, &wrong));
            }
            pos -= 1;
            if tuple[pos] == 0 {
                zeros -= 1;
            }
            if (tuple[pos] as usize) + 1 < q {
                tuple[pos] += 1;
                break;
            }
            tuple[pos] = 0;
            zeros += 1;
        }
    }
}

fn overflow_err(q: usize, k: usize) -> Error {
    Error::ResourceLimit(format!(
        "enumeration over q^k assignments (q={q}, k={k}) exceeds the budget; \
         use the count-vector route"
    ))
}

fn finish(q: usize, k: usize, wrong: &[u64]) -> CoeffTable {
    let c = (0..=k)
        .map(|l| BigRational::new(BigInt::from(wrong[l]), stratum_size(q, k, l)))
        .collect();
    CoeffTable { q, k, c }
}

/// Count-vector route: group assignments by their symbol histogram
/// (n_0..n_{q-1}), weight each group by its multinomial size, and resolve
/// ties combinatorially. When t symbols share the top count, permuting the
/// position sets of two tied symbols bijects the group's orderings, so each
/// tied symbol wins the earliest-occurrence rule in exactly 1/t of them; the
/// correct symbol therefore loses a (t-1)/t fraction.
pub fn coeffs_countvector(q: usize, k: usize) -> Result<CoeffTable> {
    check_params(q, k)?;
    let mut wrong = vec![BigRational::zero(); k + 1];
    let mut counts = vec![0usize; q];
    fill(q, k, 0, k, &mut counts, &mut wrong);
    let c = (0..=k)
        .map(|l| wrong[l].clone() / BigRational::from_integer(stratum_size(q, k, l)))
        .collect();
    Ok(CoeffTable { q, k, c })
}

fn fill(
    q: usize,
    k: usize,
    pos: usize,
    remaining: usize,
    counts: &mut Vec<usize>,
    wrong: &mut [BigRational],
) {
    if pos == q - 1 {
        counts[pos] = remaining;
        tally(k, counts, wrong);
        return;
    }
    for n in 0..=remaining {
        counts[pos] = n;
        fill(q, k, pos + 1, remaining - n, counts, wrong);
    }
}

fn tally(k: usize, counts: &[usize], wrong: &mut [BigRational]) {
    let top = *counts.iter().max().unwrap();
    let tied = counts.iter().filter(|&&n| n == top).count();
    let lose_fraction = if counts[0] < top {
        BigRational::one()
    } else if tied == 1 {
        return;
    } else {
        BigRational::new(BigInt::from(tied as i64 - 1), BigInt::from(tied as i64))
    };
    let mut orderings = BigInt::one();
    let mut left = k;
    for &n in counts {
        orderings *= binomial(left, n);
        left -= n;
    }
    wrong[counts[0]] = wrong[counts[0]].clone() + lose_fraction * BigRational::from_integer(orderings);
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn binary_three_votes() {
        let t = coeffs_enumerate(2, 3).unwrap();
        assert_eq!(t.coeffs(), &[rat(1, 1), rat(1, 1), rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn binary_five_votes() {
        let t = coeffs_countvector(2, 5).unwrap();
        assert_eq!(
            t.coeffs(),
            &[rat(1, 1), rat(1, 1), rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]
        );
    }

    #[test]
    fn ternary_three_votes() {
        // c_1 = 5/6: of the 12 assignments with one zero, the ten with a
        // repeated nonzero or an all-distinct tie lose 3+3+4 orderings.
        for t in [
            coeffs_enumerate(3, 3).unwrap(),
            coeffs_countvector(3, 3).unwrap(),
        ] {
            assert_eq!(t.coeffs(), &[rat(1, 1), rat(5, 6), rat(0, 1), rat(0, 1)]);
        }
    }

    #[test]
    fn five_symbols_three_votes() {
        let t = coeffs_countvector(5, 3).unwrap();
        assert_eq!(t.c(1), &rat(3, 4));
    }

    #[test]
    fn closed_form_matches_both_routes_for_k3() {
        for q in 2..=11usize {
            let cf = CoeffTable::closed_form_k3(q).unwrap();
            assert_eq!(cf, coeffs_enumerate(q, 3).unwrap(), "enumerate at q={q}");
            assert_eq!(cf, coeffs_countvector(q, 3).unwrap(), "countvector at q={q}");
        }
    }

    #[test]
    fn routes_agree_on_grid() {
        for q in [2usize, 3, 4] {
            for k in [1usize, 2, 3, 4, 5, 6, 7] {
                let a = coeffs_enumerate(q, k).unwrap();
                let b = coeffs_countvector(q, k).unwrap();
                assert_eq!(a, b, "mismatch at q={q}, k={k}");
            }
        }
        assert_eq!(
            coeffs_enumerate(5, 5).unwrap(),
            coeffs_countvector(5, 5).unwrap()
        );
    }

    #[test]
    fn structural_properties() {
        // c_l = 0 above k/2; c_l = 1 below k/q; c nonincreasing; and the
        // balance identity sum_l binom(k,l) c_l (q-1)^(k-l) / q^k = (q-1)/q.
        for q in [2usize, 3, 4, 5] {
            for k in [1usize, 3, 5] {
                let t = coeffs_countvector(q, k).unwrap();
                for l in 0..=k {
                    let c = t.c(l);
                    assert!(c >= &BigRational::zero() && c <= &BigRational::one());
                    if l > k / 2 {
                        assert!(c.is_zero(), "c_{l} nonzero at q={q}, k={k}");
                    }
                    if (l as f64) < k as f64 / q as f64 {
                        assert!(c.is_one(), "c_{l} != 1 at q={q}, k={k}");
                    }
                    if l < k {
                        assert!(t.c(l + 1) <= c, "c not monotone at q={q}, k={k}");
                    }
                }
                let mut sum = BigRational::zero();
                for l in 0..=k {
                    sum += BigRational::from_integer(stratum_size(q, k, l)) * t.c(l);
                }
                let total = BigRational::from_integer(pow_big(q, k));
                assert_eq!(sum / total, rat(q as i64 - 1, q as i64));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = coeffs_enumerate_budgeted(3, 40, DEFAULT_ENUM_BUDGET).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("count-vector"), "unexpected message: {msg}");
        // the count-vector route handles the same parameters
        let t = coeffs_countvector(3, 40).unwrap();
        assert!(t.c(20).to_f64().unwrap() > 0.0);
        assert!(t.c(21).is_zero());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(coeffs_enumerate(1, 3).is_err());
        assert!(coeffs_enumerate(65, 3).is_err());
        assert!(coeffs_enumerate(3, 0).is_err());
    }
}

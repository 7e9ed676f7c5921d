//! Field-size requirements for k x r super-regular Vandermonde matrices.
//!
//! Two necessary conditions (a divisor condition on q - 1 and, in
//! characteristic 2, q >= 2^r) and one sufficient condition (q above a
//! binomial threshold of order k^r).

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::galois::{FieldCtx, FieldElem};
use crate::matrix::{ScalarVector, SubmatrixSelector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u64),
    #[error("zero-sum subsets are only defined here for characteristic 2")]
    NotCharacteristicTwo,
    #[error("no nonempty subset of the scalars sums to zero")]
    NoZeroSumSubset,
    #[error("the witness needs {needed} rows but the matrix has {k}")]
    TooFewRows { needed: usize, k: usize },
    #[error("k and r must be at least 1")]
    BadParameters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// For every divisor m of q - 1 with m < k: q >= r m + 1.
    Divisor,
    /// In characteristic 2 with k > r: q >= 2^r.
    Char2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// The offending divisor, for [`Rule::Divisor`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisor: Option<u64>,
    /// Smallest field size the rule would accept.
    pub required_q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub q: u64,
    pub k: usize,
    pub r: usize,
    pub feasible: bool,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SubmatrixSelector>,
}

impl FeasibilityVerdict {
    fn from_violations(q: u64, k: usize, r: usize, violations: Vec<Violation>) -> Self {
        FeasibilityVerdict { q, k, r, feasible: violations.is_empty(), violations, witness: None }
    }
}

fn check_params(k: usize, r: usize) -> Result<(), BoundsError> {
    if k == 0 || r == 0 {
        Err(BoundsError::BadParameters)
    } else {
        Ok(())
    }
}

/// Divisor condition: every divisor m of q - 1 with m < k needs q >= r m + 1.
/// Reports every failing divisor.
pub fn divisor_bound_check(q: u64, k: usize, r: usize) -> Result<FeasibilityVerdict, BoundsError> {
    check_params(k, r)?;
    arith::prime_power(q).ok_or(BoundsError::NotPrimePower(q))?;
    let violations = arith::divisors(q - 1)
        .into_iter()
        .filter(|&m| m < k as u64)
        .filter_map(|m| {
            let required = (r as u64).saturating_mul(m).saturating_add(1);
            (q < required).then_some(Violation {
                rule: Rule::Divisor,
                divisor: Some(m),
                required_q: required,
            })
        })
        .collect();
    Ok(FeasibilityVerdict::from_violations(q, k, r, violations))
}

/// Characteristic-2 condition: with k > r and distinct nonzero scalars, q >= 2^r.
pub fn char2_bound_check(q: u64, k: usize, r: usize) -> Result<FeasibilityVerdict, BoundsError> {
    check_params(k, r)?;
    if q < 2 || !q.is_power_of_two() {
        return Err(BoundsError::NotPowerOfTwo(q));
    }
    let required = 1u64.checked_shl(r as u32).filter(|_| r < 64).unwrap_or(u64::MAX);
    let mut violations = Vec::new();
    if k > r && q < required {
        violations.push(Violation { rule: Rule::Char2, divisor: None, required_q: required });
    }
    Ok(FeasibilityVerdict::from_violations(q, k, r, violations))
}

/// Every applicable necessary condition for (q, k, r) in one verdict.
pub fn check_all(q: u64, k: usize, r: usize) -> Result<FeasibilityVerdict, BoundsError> {
    let mut verdict = divisor_bound_check(q, k, r)?;
    if q.is_power_of_two() {
        let c2 = char2_bound_check(q, k, r)?;
        verdict.violations.extend(c2.violations);
        verdict.feasible = verdict.violations.is_empty();
    }
    Ok(verdict)
}

/// Smallest (size, then lexicographic) nonempty set of 1-based indices whose
/// elements sum to zero in a characteristic-2 field.
pub fn zero_sum_subset(
    field: &FieldCtx,
    elems: &[FieldElem],
) -> Result<Option<Vec<usize>>, BoundsError> {
    if field.p() != 2 {
        return Err(BoundsError::NotCharacteristicTwo);
    }
    if elems.is_empty() {
        return Ok(None);
    }
    // a zero-sum subset exists iff the elements are linearly dependent over GF(2)
    let rank = gf2_rank(elems);
    if rank == elems.len() {
        return Ok(None);
    }
    let n = elems.len();
    for size in 1..=rank + 1 {
        let Some(mut idx) = arith::first_combination(size, 1, n) else { break };
        loop {
            let sum = idx.iter().fold(0u32, |acc, &i| acc ^ elems[i - 1].0);
            if sum == 0 {
                return Ok(Some(idx));
            }
            if !arith::next_combination(&mut idx, n) {
                break;
            }
        }
    }
    unreachable!("dependent vectors always have a zero-sum subset of size at most rank + 1")
}

fn gf2_rank(elems: &[FieldElem]) -> usize {
    let mut basis: Vec<u32> = Vec::new();
    for e in elems {
        let mut v = e.0;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// A singular square submatrix of V_k(xi) in characteristic 2.
///
/// Take the smallest zero-sum subset I of the scalars, l = |I|. The monic
/// polynomial prod_{i in I}(x - xi_i) has a zero x^(l-1) coefficient (it is
/// the sum of the roots), so it gives a dependency among rows
/// {1, ..., l + 1} \ {l} restricted to the columns I.
pub fn char2_singular_witness(
    field: &FieldCtx,
    xi: &ScalarVector,
    k: usize,
) -> Result<SubmatrixSelector, BoundsError> {
    let subset = zero_sum_subset(field, xi.as_slice())?.ok_or(BoundsError::NoZeroSumSubset)?;
    let l = subset.len();
    if l + 1 > k {
        return Err(BoundsError::TooFewRows { needed: l + 1, k });
    }
    let rows = (1..=l + 1).filter(|&i| i != l).collect();
    Ok(SubmatrixSelector::new(rows, subset))
}

/// B(k, r) = 1 + C(k,2) * sum_{l=2..r} C(r,l) C(k-2,l-2). Any prime power
/// q > B(k, r) admits a k x r super-regular Vandermonde matrix.
pub fn existence_threshold(k: usize, r: usize) -> BigUint {
    let (k, r) = (k as u64, r as u64);
    if k < 2 {
        return BigUint::one();
    }
    let mut sum = BigUint::zero();
    for l in 2..=r {
        sum += arith::binomial_big(r, l) * arith::binomial_big(k - 2, l - 2);
    }
    BigUint::one() + arith::binomial_big(k, 2) * sum
}

/// Smallest prime power strictly greater than `b`, if it fits in a u64.
pub fn smallest_prime_power_above(b: &BigUint) -> Option<u64> {
    let start = b.to_u64()?.checked_add(1)?;
    (start..).find(|&q| arith::prime_power(q).is_some())
}

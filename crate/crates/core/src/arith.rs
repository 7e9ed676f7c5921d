//! Small integer helpers: primality, factorisation, divisors, binomials.
//!
//! Everything here is trial-division based and sized for fields up to 2^32.

use num_bigint::BigUint;
use num_traits::One;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation as `(prime, multiplicity)` pairs in increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n`, sorted ascending. `divisors(0)` is empty.
pub fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut divs = vec![1u64];
    for (prime, mult) in factorize(n) {
        let current = divs.len();
        let mut pk = 1u64;
        for _ in 0..mult {
            pk *= prime;
            for i in 0..current {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Decomposes `q = p^w` with `p` prime, or returns `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = factorize(q);
    match f.as_slice() {
        [(p, w)] => Some((*p, *w)),
        _ => None,
    }
}

/// Binomial coefficient saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Advances `idx` to the next combination (values at most `hi`) in
/// lexicographic order. Returns `false` once the last combination is passed.
pub(crate) fn next_combination(idx: &mut [usize], hi: usize) -> bool {
    let t = idx.len();
    if t == 0 {
        return false;
    }
    let mut i = t;
    while i > 0 {
        i -= 1;
        // largest value allowed at position i
        let cap = hi - (t - 1 - i);
        if idx[i] < cap {
            idx[i] += 1;
            for j in i + 1..t {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// First `t`-combination of `lo..=hi`, if one exists.
pub(crate) fn first_combination(t: usize, lo: usize, hi: usize) -> Option<Vec<usize>> {
    if t == 0 {
        return Some(Vec::new());
    }
    if hi < lo || hi - lo + 1 < t {
        return None;
    }
    Some((lo..lo + t).collect())
}

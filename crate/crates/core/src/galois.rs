//! Arithmetic in prime and prime-power fields GF(p^w).
//!
//! Elements are packed integers: the polynomial `c_0 + c_1 x + ... + c_{w-1} x^{w-1}`
//! over GF(p) is stored as `c_0 + c_1 p + ... + c_{w-1} p^{w-1}`. For p = 2 this
//! is the usual bit packing, so `0x02` is the element `x`.
//!
//! Fields with at most 2^16 elements get exp/log tables keyed by the canonical
//! primitive element; larger fields (up to 2^32) fall back to polynomial
//! multiplication with reduction by the modulus.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u64 = 1 << 32;
/// Fields up to this size get exp/log tables.
pub const TABLE_LIMIT: u64 = 1 << 16;

/// Modulus used for GF(256): x^8 + x^4 + x^3 + x^2 + 1, under which `x` is primitive.
pub const GF256_MODULUS: [u32; 9] = [1, 0, 1, 1, 1, 0, 0, 0, 1];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{w} exceeds 2^32")]
    FieldTooLarge { p: u64, w: u32 },
    #[error("modulus must be a monic degree-{w} polynomial with coefficients below {p}")]
    MalformedModulus { p: u64, w: u32 },
    #[error("modulus is reducible: divisible by {factor:?} (ascending coefficients)")]
    ReducibleModulus { factor: Vec<u32> },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("the order of zero is undefined")]
    ZeroElement,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("automorphism exponent {e} must be below the extension degree {w}")]
    BadExponent { e: u32, w: u32 },
    #[error("{value} is not an element of a field of size {q}")]
    OutOfRange { value: u64, q: u64 },
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// A field element in packed base-p encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Characteristic, degree and modulus of GF(p^w).
///
/// `modulus` lists coefficients in ascending degree order and includes the
/// leading 1, so x^3 + x + 1 is `[1, 1, 0, 1]`. An empty modulus means "use
/// the default for (p, w)"; it is ignored for prime fields.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub w: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn new(p: u64, w: u32, modulus: Vec<u32>) -> Self {
        FieldSpec { p, w, modulus }
    }

    /// Spec with the default modulus left implicit.
    pub fn of(p: u64, w: u32) -> Self {
        FieldSpec { p, w, modulus: Vec::new() }
    }

    pub fn size(&self) -> Option<u64> {
        let mut q: u64 = 1;
        for _ in 0..self.w {
            q = q.checked_mul(self.p)?;
        }
        Some(q)
    }
}

/// Default modulus for GF(p^w): 0x11D for GF(256), otherwise the monic
/// irreducible polynomial with the smallest packed encoding.
pub fn default_modulus(p: u64, w: u32) -> Result<Vec<u32>, FieldError> {
    if !arith::is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if w == 0 {
        return Err(FieldError::ZeroDegree);
    }
    if w == 1 {
        return Ok(vec![0, 1]);
    }
    if p == 2 && w == 8 {
        return Ok(GF256_MODULUS.to_vec());
    }
    let q = checked_size(p, w)?;
    // lower coefficients enumerated in packed order; the leading 1 is implicit
    for low in 0..q {
        let mut poly = unpack(low, p, w as usize);
        poly.push(1);
        if poly[0] == 0 {
            continue;
        }
        if find_factor(&poly, p).is_none() {
            return Ok(poly.into_iter().map(|c| c as u32).collect());
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn checked_size(p: u64, w: u32) -> Result<u64, FieldError> {
    FieldSpec::of(p, w)
        .size()
        .filter(|&q| q <= MAX_FIELD_SIZE)
        .ok_or(FieldError::FieldTooLarge { p, w })
}

fn unpack(mut v: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len + 1);
    for _ in 0..len {
        out.push(v % p);
        v /= p;
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `b` over GF(p).
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let sub = lead * bc % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

/// Smallest monic factor of degree in `1..=deg/2`, found by trial division.
fn find_factor(poly: &[u64], p: u64) -> Option<Vec<u64>> {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.checked_pow(d as u32)?;
        for low in 0..count {
            let mut cand = unpack(low, p, d);
            cand.push(1);
            if poly_rem(poly, &cand, p).iter().all(|&c| c == 0) {
                return Some(cand);
            }
        }
    }
    None
}

#[derive(Debug, Clone)]
struct Tables {
    /// exp[i] = g^i for i in 0..2(q-1)
    exp: Vec<u32>,
    /// log[a] for a != 0; log[0] unused
    log: Vec<u32>,
}

/// An immutable finite field GF(p^w).
#[derive(Debug, Clone)]
pub struct FieldCtx {
    spec: FieldSpec,
    q: u64,
    modulus: Vec<u64>,
    tables: Option<Tables>,
    primitive: FieldElem,
    /// distinct prime factors of q - 1
    group_primes: Vec<u64>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for FieldCtx {}

/// Validates `spec` and builds the field.
pub fn make_field(spec: FieldSpec) -> Result<FieldCtx, FieldError> {
    FieldCtx::new(spec)
}

impl FieldCtx {
    pub fn new(spec: FieldSpec) -> Result<Self, FieldError> {
        let FieldSpec { p, w, modulus } = spec;
        if !arith::is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if w == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = checked_size(p, w)?;
        let modulus: Vec<u32> = if w == 1 {
            Vec::new()
        } else if modulus.is_empty() {
            default_modulus(p, w)?
        } else {
            modulus
        };
        let modulus_wide: Vec<u64> = modulus.iter().map(|&c| c as u64).collect();
        if w > 1 {
            if modulus_wide.len() != w as usize + 1
                || modulus_wide[w as usize] != 1
                || modulus_wide.iter().any(|&c| c >= p)
            {
                return Err(FieldError::MalformedModulus { p, w });
            }
            if let Some(f) = find_factor(&modulus_wide, p) {
                return Err(FieldError::ReducibleModulus {
                    factor: f.into_iter().map(|c| c as u32).collect(),
                });
            }
        }
        let group_primes = arith::factorize(q - 1).into_iter().map(|(f, _)| f).collect();
        let mut ctx = FieldCtx {
            spec: FieldSpec { p, w, modulus },
            q,
            modulus: modulus_wide,
            tables: None,
            primitive: FieldElem::ONE,
            group_primes,
        };
        ctx.primitive = (1..q)
            .map(|v| FieldElem(v as u32))
            .find(|&a| ctx.order_unchecked(a) == q - 1)
            .expect("multiplicative group is cyclic");
        if q <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    /// GF(p^w) with the default modulus.
    pub fn with_default(p: u64, w: u32) -> Result<Self, FieldError> {
        Self::new(FieldSpec::of(p, w))
    }

    fn build_tables(&self) -> Tables {
        let order = (self.q - 1) as usize;
        let mut exp = vec![0u32; 2 * order.max(1)];
        let mut log = vec![0u32; self.q as usize];
        let mut x = FieldElem::ONE;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_poly(x, self.primitive);
        }
        exp.copy_within(0..order, order);
        Tables { exp, log }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.spec.p
    }

    #[inline]
    pub fn w(&self) -> u32 {
        self.spec.w
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// Validated element from an integer encoding.
    pub fn elem(&self, value: u64) -> Result<FieldElem, FieldError> {
        if value < self.q {
            Ok(FieldElem(value as u32))
        } else {
            Err(FieldError::OutOfRange { value, q: self.q })
        }
    }

    pub fn contains(&self, a: FieldElem) -> bool {
        (a.0 as u64) < self.q
    }

    /// Parses a decimal encoding, or `0x`-prefixed hex when p = 2.
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem, FieldError> {
        let t = s.trim();
        let v = if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            if self.p() != 2 {
                return Err(FieldError::Parse(s.to_string()));
            }
            u64::from_str_radix(hex, 16)
        } else {
            t.parse::<u64>()
        }
        .map_err(|_| FieldError::Parse(s.to_string()))?;
        self.elem(v)
    }

    /// Hex rendering for p = 2, decimal otherwise.
    pub fn render(&self, a: FieldElem) -> String {
        if self.p() == 2 {
            format!("0x{:x}", a.0)
        } else {
            a.0.to_string()
        }
    }

    /// Coefficients of `a` as a polynomial over GF(p), ascending.
    pub fn coefficients(&self, a: FieldElem) -> Vec<u64> {
        unpack(a.0 as u64, self.p(), self.w() as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(|v| FieldElem(v as u32))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(|v| FieldElem(v as u32))
    }

    /// Embeds an integer from the prime subfield (taken mod p).
    pub fn from_prime_field(&self, c: u64) -> FieldElem {
        FieldElem((c % self.p()) as u32)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p();
        if p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        if self.w() == 1 {
            return FieldElem(((a.0 as u64 + b.0 as u64) % p) as u32);
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.w() {
            out += (x % p + y % p) % p * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElem(out as u32)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.p();
        if p == 2 {
            return a;
        }
        if self.w() == 1 {
            return FieldElem(((p - a.0 as u64) % p) as u32);
        }
        let mut x = a.0 as u64;
        let (mut out, mut place) = (0u64, 1u64);
        for _ in 0..self.w() {
            out += (p - x % p) % p * place;
            x /= p;
            place *= p;
        }
        FieldElem(out as u32)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        match &self.tables {
            Some(t) => {
                FieldElem(t.exp[t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize])
            }
            None => self.mul_poly(a, b),
        }
    }

    /// Multiplication without tables.
    fn mul_poly(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p();
        let w = self.w() as usize;
        if w == 1 {
            return FieldElem((a.0 as u64 * b.0 as u64 % p) as u32);
        }
        if p == 2 {
            let full: u64 = self
                .modulus
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &c)| acc | (c << i));
            let (mut x, mut y, mut r) = (a.0 as u64, b.0 as u64, 0u64);
            while y != 0 {
                if y & 1 == 1 {
                    r ^= x;
                }
                y >>= 1;
                x <<= 1;
                if (x >> w) & 1 == 1 {
                    x ^= full;
                }
            }
            return FieldElem(r as u32);
        }
        let da = unpack(a.0 as u64, p, w);
        let db = unpack(b.0 as u64, p, w);
        let mut prod = vec![0u64; 2 * w - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y % p) % p;
            }
        }
        let r = poly_rem(&prod, &self.modulus, p);
        let mut out = 0u64;
        for &c in r.iter().rev() {
            out = out * p + c;
        }
        FieldElem(out as u32)
    }

    /// a^e for a non-negative exponent; 0^0 = 1.
    pub fn pow_u(&self, a: FieldElem, e: u64) -> FieldElem {
        if a.0 == 0 {
            return if e == 0 { FieldElem::ONE } else { FieldElem::ZERO };
        }
        let order = self.q - 1;
        let e = e % order;
        if let Some(t) = &self.tables {
            let l = (t.log[a.0 as usize] as u128 * e as u128 % order as u128) as usize;
            return FieldElem(t.exp[l]);
        }
        let (mut base, mut e, mut acc) = (a, e, FieldElem::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    /// a^e; negative exponents invert first.
    pub fn pow(&self, a: FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        if e >= 0 {
            return Ok(self.pow_u(a, e as u64));
        }
        let inv = self.inv(a)?;
        Ok(self.pow_u(inv, e.unsigned_abs()))
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let order = self.q - 1;
        if let Some(t) = &self.tables {
            let l = t.log[a.0 as usize] as u64;
            return Ok(FieldElem(t.exp[((order - l) % order) as usize]));
        }
        Ok(self.pow_u(a, order - 1))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElem) -> Result<u64, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroElement);
        }
        Ok(self.order_unchecked(a))
    }

    fn order_unchecked(&self, a: FieldElem) -> u64 {
        let mut d = self.q - 1;
        for &f in &self.group_primes {
            while d.is_multiple_of(f) && self.pow_slow(a, d / f) == FieldElem::ONE {
                d /= f;
            }
        }
        d
    }

    // square-and-multiply that does not depend on the tables being built
    fn pow_slow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let (mut base, mut acc) = (a, FieldElem::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    /// The smallest-encoded element of order q - 1.
    pub fn find_primitive(&self) -> FieldElem {
        self.primitive
    }

    pub fn is_primitive(&self, a: FieldElem) -> bool {
        a.0 != 0 && self.order_unchecked(a) == self.q - 1
    }

    /// Discrete log to the canonical primitive base, when tables exist.
    pub fn log(&self, a: FieldElem) -> Option<u32> {
        if a.0 == 0 {
            return None;
        }
        self.tables.as_ref().map(|t| t.log[a.0 as usize])
    }

    /// The automorphism a -> a^(p^e).
    pub fn frobenius(&self, a: FieldElem, e: u32) -> Result<FieldElem, FieldError> {
        if e >= self.w() {
            return Err(FieldError::BadExponent { e, w: self.w() });
        }
        let mut x = a;
        for _ in 0..e {
            x = self.pow_u(x, self.p());
        }
        Ok(x)
    }

    /// Degree over GF(p) of the fixed field of a -> a^(p^e), i.e. gcd(e, w).
    pub fn fixed_subfield_degree(&self, e: u32) -> Result<u32, FieldError> {
        if e >= self.w() {
            return Err(FieldError::BadExponent { e, w: self.w() });
        }
        Ok(arith::gcd(e as u64, self.w() as u64) as u32)
    }
}

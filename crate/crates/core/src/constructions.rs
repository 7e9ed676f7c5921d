//! Explicit scalar choices for k x 3 super-regular Vandermonde matrices.
//!
//! The main construction is V_k(1, theta, sigma(theta)) where theta is the
//! canonical primitive element and sigma(x) = x^(p^e) is an automorphism
//! whose fixed field is GF(p), i.e. gcd(e, w) = 1. It is proven
//! super-regular for k <= w over any GF(p^w), and for every k < q when
//! p = 2. Fewer than three parities use a prefix of the same scalars.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::galois::{FieldCtx, FieldElem, FieldError, FieldSpec};
use crate::matrix::{vandermonde, Field, MatrixError, MatrixF, ScalarVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("{requested} distinct nonzero scalars requested but the field has only {available}")]
    TooManyScalars { requested: usize, available: u64 },
    #[error("exponent {e} fails coprimality: gcd({value}, q - 1) = {gcd}")]
    CoprimalityViolation { e: u64, value: u64, gcd: u64 },
    #[error("exponent {e} outside 2..=q-1")]
    ExponentOutOfRange { e: u64 },
    #[error("the automorphism x -> x^(p^0) is the identity")]
    TrivialAutomorphism,
    #[error("x -> x^(p^{e}) fixes GF(p^{degree}), not GF(p)")]
    FixedFieldTooLarge { e: u32, degree: u32 },
    #[error("k = {k} must be below the field size {q}")]
    KTooLarge { k: usize, q: u64 },
    #[error("this construction provides 1 to 3 parity columns, not {r}")]
    UnsupportedWidth { r: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Which scalar vector a recipe produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "variant", content = "e", rename_all = "snake_case")]
pub enum Variant {
    /// (1, theta, ..., theta^(r-1))
    ConsecutivePowers,
    /// (1, theta, theta^e) with e and e - 1 coprime to q - 1
    CoprimeExponent(u64),
    /// (1, theta, theta^(p^e)) with gcd(e, w) = 1
    Automorphism(u32),
}

/// Range in which a construction is proven super-regular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofRange {
    /// any characteristic, k <= w
    KAtMostDegree,
    /// characteristic 2, k < q
    Char2KBelowQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    ProvenSuperRegular(ProofRange),
    Unverified,
}

impl Guarantee {
    pub fn is_proven(self) -> bool {
        matches!(self, Guarantee::ProvenSuperRegular(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionRecipe {
    pub variant: Variant,
    pub field: FieldSpec,
    pub k: usize,
    pub r: usize,
}

/// Recipe wire form: `{"variant": "automorphism", "e": 1, "p": 2, "w": 8, "k": 200, "r": 3}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeJson {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<u64>,
    pub p: u64,
    pub w: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modulus: Vec<u32>,
    pub k: usize,
    pub r: usize,
}

impl TryFrom<RecipeJson> for ConstructionRecipe {
    type Error = ConstructionError;

    fn try_from(j: RecipeJson) -> Result<Self, Self::Error> {
        let need_e = || {
            j.e.ok_or_else(|| {
                ConstructionError::PreconditionViolated(format!("variant {:?} needs \"e\"", j.variant))
            })
        };
        let variant = match j.variant.as_str() {
            "consecutive_powers" => Variant::ConsecutivePowers,
            "coprime_exponent" => Variant::CoprimeExponent(need_e()?),
            "automorphism" => {
                let e = need_e()?;
                Variant::Automorphism(u32::try_from(e).map_err(|_| FieldError::BadExponent {
                    e: u32::MAX,
                    w: j.w,
                })?)
            }
            other => {
                return Err(ConstructionError::PreconditionViolated(format!("unknown variant {other:?}")))
            }
        };
        Ok(ConstructionRecipe { variant, field: FieldSpec::new(j.p, j.w, j.modulus), k: j.k, r: j.r })
    }
}

impl From<&ConstructionRecipe> for RecipeJson {
    fn from(r: &ConstructionRecipe) -> Self {
        let (variant, e) = match r.variant {
            Variant::ConsecutivePowers => ("consecutive_powers", None),
            Variant::CoprimeExponent(e) => ("coprime_exponent", Some(e)),
            Variant::Automorphism(e) => ("automorphism", Some(e as u64)),
        };
        RecipeJson {
            variant: variant.to_string(),
            e,
            p: r.field.p,
            w: r.field.w,
            modulus: r.field.modulus.clone(),
            k: r.k,
            r: r.r,
        }
    }
}

/// (1, theta, theta^2, ..., theta^(r-1)) for the canonical primitive theta.
pub fn scalars_consecutive_powers(field: &FieldCtx, r: usize) -> Result<ScalarVector, ConstructionError> {
    if r as u64 >= field.q() {
        return Err(ConstructionError::TooManyScalars { requested: r, available: field.q() - 1 });
    }
    let theta = field.find_primitive();
    let mut xi = Vec::with_capacity(r);
    let mut x = FieldElem::ONE;
    for _ in 0..r {
        xi.push(x);
        x = field.mul(x, theta);
    }
    Ok(ScalarVector(xi))
}

/// (1, theta, theta^e). Requires gcd(e, q-1) = gcd(e-1, q-1) = 1, which rules
/// out singular 2x2 submatrices for every k < q.
pub fn scalars_coprime_exponent(field: &FieldCtx, e: u64) -> Result<ScalarVector, ConstructionError> {
    let order = field.q() - 1;
    if e < 2 || e > order {
        return Err(ConstructionError::ExponentOutOfRange { e });
    }
    for value in [e, e - 1] {
        let g = arith::gcd(value, order);
        if g != 1 {
            return Err(ConstructionError::CoprimalityViolation { e, value, gcd: g });
        }
    }
    let theta = field.find_primitive();
    Ok(ScalarVector(vec![FieldElem::ONE, theta, field.pow_u(theta, e)]))
}

/// (1, theta, theta^(p^e)) for an automorphism with fixed field GF(p).
pub fn scalars_automorphism(field: &FieldCtx, e: u32) -> Result<ScalarVector, ConstructionError> {
    if e == 0 {
        return Err(ConstructionError::TrivialAutomorphism);
    }
    let degree = field.fixed_subfield_degree(e)?;
    if degree != 1 {
        return Err(ConstructionError::FixedFieldTooLarge { e, degree });
    }
    let theta = field.find_primitive();
    Ok(ScalarVector(vec![FieldElem::ONE, theta, field.frobenius(theta, e)?]))
}

/// Exponents e in 1..w with gcd(e, w) = 1.
pub fn valid_automorphism_exponents(w: u32) -> Vec<u32> {
    (1..w).filter(|&e| arith::gcd(e as u64, w as u64) == 1).collect()
}

/// What the automorphism construction guarantees for a k x r matrix.
pub fn automorphism_guarantee(field: &FieldCtx, k: usize, r: usize) -> Guarantee {
    if r == 0 || r > 3 {
        return Guarantee::Unverified;
    }
    if k as u64 <= field.w() as u64 {
        Guarantee::ProvenSuperRegular(ProofRange::KAtMostDegree)
    } else if field.p() == 2 && (k as u64) < field.q() {
        Guarantee::ProvenSuperRegular(ProofRange::Char2KBelowQ)
    } else {
        Guarantee::Unverified
    }
}

/// The guarantee that applies to `xi` if it is a prefix of an automorphism
/// scalar vector over `field`; `Unverified` otherwise.
pub fn recognize_scalars(field: &FieldCtx, xi: &ScalarVector, k: usize) -> Guarantee {
    let r = xi.len();
    if r == 0 || r > 3 {
        return Guarantee::Unverified;
    }
    let matches = valid_automorphism_exponents(field.w()).into_iter().any(|e| {
        scalars_automorphism(field, e).map(|s| s.prefix(r) == *xi).unwrap_or(false)
    });
    if matches {
        automorphism_guarantee(field, k, r)
    } else {
        Guarantee::Unverified
    }
}

/// A materialised parity matrix with its provenance.
#[derive(Debug, Clone)]
pub struct Construction {
    pub field: Field,
    pub scalars: ScalarVector,
    pub matrix: MatrixF,
    pub guarantee: Guarantee,
}

/// Builds V_k(xi) for the recipe's scalars and tags it with what is proven.
pub fn build_parity(recipe: &ConstructionRecipe) -> Result<Construction, ConstructionError> {
    let field = Arc::new(FieldCtx::new(recipe.field.clone())?);
    build_parity_in(&field, recipe.variant, recipe.k, recipe.r)
}

pub fn build_parity_in(
    field: &Field,
    variant: Variant,
    k: usize,
    r: usize,
) -> Result<Construction, ConstructionError> {
    if k == 0 {
        return Err(ConstructionError::PreconditionViolated("k must be at least 1".into()));
    }
    let (scalars, guarantee) = match variant {
        Variant::ConsecutivePowers => (scalars_consecutive_powers(field, r)?, Guarantee::Unverified),
        Variant::CoprimeExponent(e) => {
            check_width(r)?;
            (scalars_coprime_exponent(field, e)?.prefix(r), Guarantee::Unverified)
        }
        Variant::Automorphism(e) => {
            check_width(r)?;
            let xi = scalars_automorphism(field, e)?.prefix(r);
            if k as u64 >= field.q() {
                return Err(ConstructionError::KTooLarge { k, q: field.q() });
            }
            (xi, automorphism_guarantee(field, k, r))
        }
    };
    let matrix = vandermonde(field, k, &scalars)?;
    Ok(Construction { field: field.clone(), scalars, matrix, guarantee })
}

fn check_width(r: usize) -> Result<(), ConstructionError> {
    if (1..=3).contains(&r) {
        Ok(())
    } else {
        Err(ConstructionError::UnsupportedWidth { r })
    }
}

/// A trinomial c1 + c2 x^e1 + x^e2 over GF(p) vanishing at 1, theta and sigma(theta).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrinomialWitness {
    pub e1: usize,
    pub e2: usize,
    pub c1: u64,
    pub c2: u64,
}

/// Searches 1 <= e1 < e2 <= k-1 and c1, c2 in GF(p)^x (lexicographically) for
/// a trinomial with roots 1, theta and sigma(theta).
///
/// For theta primitive and sigma an automorphism with fixed field GF(p),
/// such a trinomial exists iff V_k(1, theta, sigma(theta)) has a singular
/// 3x3 submatrix, so `None` certifies that no 3x3 minor vanishes.
pub fn trinomial_singularity_scan(
    field: &FieldCtx,
    k: usize,
    theta: FieldElem,
    sigma_theta: FieldElem,
) -> Result<Option<TrinomialWitness>, ConstructionError> {
    if k == 0 || k as u64 >= field.q() {
        return Err(ConstructionError::PreconditionViolated(format!(
            "k = {k} must satisfy 1 <= k < q = {}",
            field.q()
        )));
    }
    if !field.is_primitive(theta) {
        return Err(ConstructionError::PreconditionViolated(format!(
            "{theta} is not a primitive element"
        )));
    }
    let is_valid_image = valid_automorphism_exponents(field.w())
        .into_iter()
        .any(|e| field.frobenius(theta, e).map(|s| s == sigma_theta).unwrap_or(false));
    if !is_valid_image {
        return Err(ConstructionError::PreconditionViolated(format!(
            "{sigma_theta} is not the image of {theta} under an automorphism fixing only GF(p)"
        )));
    }
    let mut tp = Vec::with_capacity(k);
    let mut sp = Vec::with_capacity(k);
    let (mut a, mut b) = (FieldElem::ONE, FieldElem::ONE);
    for _ in 0..k {
        tp.push(a);
        sp.push(b);
        a = field.mul(a, theta);
        b = field.mul(b, sigma_theta);
    }
    let p = field.p();
    for e1 in 1..k {
        for e2 in e1 + 1..k {
            for c1 in 1..p {
                for c2 in 1..p {
                    // f(1) = c1 + c2 + 1
                    if (c1 + c2 + 1) % p != 0 {
                        continue;
                    }
                    let (c1e, c2e) = (field.from_prime_field(c1), field.from_prime_field(c2));
                    let at = |pw: &[FieldElem]| {
                        field.add(field.add(c1e, field.mul(c2e, pw[e1])), pw[e2])
                    };
                    if at(&tp).is_zero() && at(&sp).is_zero() {
                        return Ok(Some(TrinomialWitness { e1, e2, c1, c2 }));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::is_super_regular;

    fn field(p: u64, w: u32) -> Field {
        Arc::new(FieldCtx::with_default(p, w).unwrap())
    }

    #[test]
    fn consecutive_powers() {
        let f = field(2, 8);
        let t = f.find_primitive();
        assert_eq!(scalars_consecutive_powers(&f, 1).unwrap().0, vec![FieldElem::ONE]);
        assert_eq!(
            scalars_consecutive_powers(&f, 3).unwrap().0,
            vec![FieldElem::ONE, t, f.mul(t, t)]
        );
        assert_eq!(
            scalars_consecutive_powers(&field(2, 2), 4),
            Err(ConstructionError::TooManyScalars { requested: 4, available: 3 })
        );
    }

    #[test]
    fn coprime_exponent_checks() {
        let f8 = field(2, 3);
        let t = f8.find_primitive();
        assert_eq!(
            scalars_coprime_exponent(&f8, 2).unwrap().0,
            vec![FieldElem::ONE, t, f8.mul(t, t)]
        );
        assert_eq!(
            scalars_coprime_exponent(&field(2, 4), 6),
            Err(ConstructionError::CoprimalityViolation { e: 6, value: 6, gcd: 3 })
        );
        // e - 1 = 3 shares 3 with 15
        assert_eq!(
            scalars_coprime_exponent(&field(2, 4), 4),
            Err(ConstructionError::CoprimalityViolation { e: 4, value: 3, gcd: 3 })
        );
    }

    #[test]
    fn coprime_exponent_has_no_singular_2x2_over_gf8() {
        let f8 = field(2, 3);
        let xi = scalars_coprime_exponent(&f8, 2).unwrap();
        let v = vandermonde(&f8, 7, &xi).unwrap();
        for i in 1..=7 {
            for j in i + 1..=7 {
                for a in 1..=3 {
                    for b in a + 1..=3 {
                        let s = crate::matrix::SubmatrixSelector::new(vec![i, j], vec![a, b]);
                        assert!(!v.submatrix(&s).unwrap().determinant().unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn automorphism_scalars() {
        let f = field(2, 8);
        let t = f.find_primitive();
        assert_eq!(scalars_automorphism(&f, 1).unwrap().0, vec![FieldElem::ONE, t, f.mul(t, t)]);
        assert_eq!(
            scalars_automorphism(&f, 2),
            Err(ConstructionError::FixedFieldTooLarge { e: 2, degree: 2 })
        );
        assert_eq!(scalars_automorphism(&f, 0), Err(ConstructionError::TrivialAutomorphism));
        let f243 = field(3, 5);
        let t3 = f243.find_primitive();
        assert_eq!(
            scalars_automorphism(&f243, 1).unwrap().0,
            vec![FieldElem::ONE, t3, f243.pow_u(t3, 3)]
        );
    }

    #[test]
    fn build_parity_guarantees() {
        let recipe = |p, w, k| ConstructionRecipe {
            variant: Variant::Automorphism(1),
            field: FieldSpec::of(p, w),
            k,
            r: 3,
        };
        let c = build_parity(&recipe(2, 8, 255)).unwrap();
        assert_eq!(c.guarantee, Guarantee::ProvenSuperRegular(ProofRange::Char2KBelowQ));
        assert_eq!((c.matrix.rows(), c.matrix.cols()), (255, 3));
        let c = build_parity(&recipe(3, 5, 5)).unwrap();
        assert_eq!(c.guarantee, Guarantee::ProvenSuperRegular(ProofRange::KAtMostDegree));
        assert!(is_super_regular(&c.matrix, false).super_regular);
        let c = build_parity(&recipe(3, 5, 6)).unwrap();
        assert_eq!(c.guarantee, Guarantee::Unverified);
        assert_eq!(
            build_parity(&recipe(2, 3, 8)).unwrap_err(),
            ConstructionError::KTooLarge { k: 8, q: 8 }
        );
    }

    #[test]
    fn narrow_requests_are_prefixes() {
        let f = field(2, 8);
        let c2 = build_parity_in(&f, Variant::Automorphism(3), 10, 2).unwrap();
        let c3 = build_parity_in(&f, Variant::Automorphism(3), 10, 3).unwrap();
        assert_eq!(c2.scalars.0[..], c3.scalars.0[..2]);
        assert_eq!(
            build_parity_in(&f, Variant::Automorphism(1), 10, 4).unwrap_err(),
            ConstructionError::UnsupportedWidth { r: 4 }
        );
    }

    #[test]
    fn recipe_json_round_trip() {
        let j: RecipeJson = serde_json::from_str(
            r#"{"variant": "automorphism", "e": 1, "p": 2, "w": 8, "k": 200, "r": 3}"#,
        )
        .unwrap();
        let recipe = ConstructionRecipe::try_from(j.clone()).unwrap();
        assert_eq!(recipe.variant, Variant::Automorphism(1));
        assert_eq!(RecipeJson::from(&recipe), j);
    }

    #[test]
    fn trinomial_scan_char2_is_always_empty() {
        for w in 2..=6 {
            let f = field(2, w);
            let t = f.find_primitive();
            for e in valid_automorphism_exponents(w) {
                let s = f.frobenius(t, e).unwrap();
                let k = ((1u64 << w) - 1) as usize;
                assert_eq!(trinomial_singularity_scan(&f, k, t, s).unwrap(), None);
            }
        }
    }

    #[test]
    fn trinomial_scan_within_degree_is_empty() {
        let f = field(3, 5);
        let t = f.find_primitive();
        let s = f.frobenius(t, 1).unwrap();
        for k in 1..=5 {
            assert_eq!(trinomial_singularity_scan(&f, k, t, s).unwrap(), None);
        }
    }

    #[test]
    fn trinomial_scan_rejects_bad_inputs() {
        let f = field(2, 4);
        let t = f.find_primitive();
        assert!(matches!(
            trinomial_singularity_scan(&f, 16, t, f.frobenius(t, 1).unwrap()),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        // e = 2 has fixed field GF(4)
        assert!(matches!(
            trinomial_singularity_scan(&f, 5, t, f.frobenius(t, 2).unwrap()),
            Err(ConstructionError::PreconditionViolated(_))
        ));
        assert!(matches!(
            trinomial_singularity_scan(&f, 5, FieldElem::ONE, FieldElem::ONE),
            Err(ConstructionError::PreconditionViolated(_))
        ));
    }
}

mod common;

use std::sync::Arc;

use common::{leibniz_det, subsets};
use svcodes::arith::gcd;
use svcodes::constructions::{
    build_parity, build_parity_in, scalars_automorphism, scalars_coprime_exponent,
    scalars_consecutive_powers, trinomial_singularity_scan, valid_automorphism_exponents,
    ConstructionError, ProofRange, RecipeJson,
};
use svcodes::search::prime_power_fields;
use svcodes::{is_super_regular, vandermonde, ConstructionRecipe, Field, FieldCtx, FieldElem, Guarantee, Variant};

fn gf(p: u64, w: u32) -> Field {
    Arc::new(FieldCtx::with_default(p, w).unwrap())
}

/// First singular 3x3 submatrix of V_k over three columns, by the Leibniz formula.
fn singular_triple(f: &FieldCtx, k: usize, xi: &[FieldElem]) -> Option<Vec<usize>> {
    subsets(k, 3).into_iter().find(|rows| {
        let m: Vec<Vec<FieldElem>> =
            rows.iter().map(|&i| xi.iter().map(|&x| f.pow_u(x, (i - 1) as u64)).collect()).collect();
        leibniz_det(f, &m).is_zero()
    })
}

/// (i, j) with 1 <= i < j <= k and columns a, b such that the 2x2 minor vanishes.
fn singular_pair(f: &FieldCtx, k: usize, xi: &[FieldElem]) -> Option<(usize, usize)> {
    for a in 0..xi.len() {
        for b in a + 1..xi.len() {
            let pa: Vec<FieldElem> = (0..k).map(|i| f.pow_u(xi[a], i as u64)).collect();
            let pb: Vec<FieldElem> = (0..k).map(|i| f.pow_u(xi[b], i as u64)).collect();
            for i in 0..k {
                for j in i + 1..k {
                    if f.mul(pa[i], pb[j]) == f.mul(pa[j], pb[i]) {
                        return Some((i + 1, j + 1));
                    }
                }
            }
        }
    }
    None
}

#[test]
fn trinomial_criterion_matches_brute_force() {
    for f in prime_power_fields(1024).into_iter().filter(|f| f.w() > 1) {
        let theta = f.find_primitive();
        for e in valid_automorphism_exponents(f.w()) {
            let xi = scalars_automorphism(&f, e).unwrap();
            let top = (f.q() - 1).min(12) as usize;
            for k in 3..=top {
                let scan = trinomial_singularity_scan(&f, k, theta, xi.0[2]).unwrap();
                let brute = singular_triple(&f, k, &xi.0);
                assert_eq!(scan.is_some(), brute.is_some(), "q={} e={e} k={k}", f.q());
                if let Some(wit) = scan {
                    assert!(wit.e1 < wit.e2 && wit.e2 < k);
                    let c1 = f.from_prime_field(wit.c1);
                    let c2 = f.from_prime_field(wit.c2);
                    for x in &xi.0 {
                        let v = f.add(f.add(c1, f.mul(c2, f.pow_u(*x, wit.e1 as u64))), f.pow_u(*x, wit.e2 as u64));
                        assert!(v.is_zero());
                    }
                }
            }
        }
    }
}

#[test]
fn trinomial_scan_never_fires_in_characteristic_two() {
    for w in 2..=10 {
        let f = gf(2, w);
        let theta = f.find_primitive();
        for e in valid_automorphism_exponents(w) {
            let s = f.frobenius(theta, e).unwrap();
            let k = (f.q() - 1) as usize;
            assert_eq!(trinomial_singularity_scan(&f, k.min(40), theta, s).unwrap(), None);
        }
    }
}

#[test]
fn trinomial_scan_checks_preconditions() {
    let f = gf(3, 5);
    let theta = f.find_primitive();
    let s = f.frobenius(theta, 1).unwrap();
    assert!(trinomial_singularity_scan(&f, 243, theta, s).is_err());
    assert!(trinomial_singularity_scan(&f, 5, FieldElem(1), s).is_err());
    assert!(trinomial_singularity_scan(&f, 5, theta, f.mul(theta, theta)).is_err());
    for k in 3..=5 {
        assert_eq!(trinomial_singularity_scan(&f, k, theta, s).unwrap(), None);
    }
}

#[test]
fn automorphism_scalars_small_minors() {
    // theta^(p-1) has order (q-1)/(p-1), so rows 1 and 1 + (q-1)/(p-1) over
    // the columns theta, sigma(theta) vanish once k exceeds that order; in
    // characteristic 2 it never happens below q
    for f in prime_power_fields(256).into_iter().filter(|f| f.w() > 1) {
        for e in valid_automorphism_exponents(f.w()) {
            let xi = scalars_automorphism(&f, e).unwrap();
            assert!(xi.0.iter().all(|x| !x.is_zero()));
            // gcd(p^e - 1, q - 1) = p - 1 because gcd(e, w) = 1
            let span = ((f.q() - 1) / (f.p() - 1)) as usize;
            assert_eq!(singular_pair(&f, span, &xi.0), None, "q={} e={e}", f.q());
            if f.p() > 2 {
                assert_eq!(singular_pair(&f, span + 1, &xi.0), Some((1, span + 1)), "q={} e={e}", f.q());
            }
        }
    }
}

#[test]
fn coprime_exponent_scalars_have_no_singular_small_minors() {
    for f in prime_power_fields(128).into_iter().filter(|f| f.q() > 3) {
        let order = f.q() - 1;
        for e in (2..=order).filter(|&e| gcd(e, order) == 1 && gcd(e - 1, order) == 1) {
            let xi = scalars_coprime_exponent(&f, e).unwrap();
            assert_eq!(singular_pair(&f, order as usize, &xi.0), None, "q={} e={e}", f.q());
        }
    }
}

#[test]
fn coprime_exponent_examples() {
    let f8 = gf(2, 3);
    let theta = f8.find_primitive();
    let xi = scalars_coprime_exponent(&f8, 2).unwrap();
    assert_eq!(xi.0, vec![FieldElem::ONE, theta, f8.mul(theta, theta)]);
    let err = scalars_coprime_exponent(&gf(2, 4), 6).unwrap_err();
    assert!(matches!(err, ConstructionError::CoprimalityViolation { e: 6, value: 6, gcd: 3 }));
}

#[test]
fn automorphism_examples() {
    let f = gf(2, 8);
    let theta = f.find_primitive();
    assert_eq!(theta, FieldElem(2));
    assert_eq!(scalars_automorphism(&f, 1).unwrap().0, vec![FieldElem(1), theta, f.pow_u(theta, 2)]);
    for (e, power) in [(3, 8), (5, 32), (7, 128)] {
        assert_eq!(scalars_automorphism(&f, e).unwrap().0[2], f.pow_u(theta, power));
    }
    assert!(matches!(
        scalars_automorphism(&f, 2),
        Err(ConstructionError::FixedFieldTooLarge { e: 2, degree: 2 })
    ));
    assert!(matches!(scalars_automorphism(&f, 0), Err(ConstructionError::TrivialAutomorphism)));
    let f243 = gf(3, 5);
    let t = f243.find_primitive();
    assert_eq!(scalars_automorphism(&f243, 1).unwrap().0, vec![FieldElem(1), t, f243.pow_u(t, 3)]);
}

#[test]
fn consecutive_powers_examples() {
    assert_eq!(scalars_consecutive_powers(&gf(2, 8), 1).unwrap().0, vec![FieldElem::ONE]);
    assert_eq!(scalars_consecutive_powers(&gf(2, 8), 3).unwrap().0, vec![FieldElem(1), FieldElem(2), FieldElem(4)]);
    assert!(matches!(
        scalars_consecutive_powers(&gf(2, 2), 4),
        Err(ConstructionError::TooManyScalars { .. })
    ));
}

#[test]
fn guarantees_follow_proven_ranges() {
    let f256 = gf(2, 8);
    let c = build_parity_in(&f256, Variant::Automorphism(1), 255, 3).unwrap();
    assert_eq!(c.guarantee, Guarantee::ProvenSuperRegular(ProofRange::Char2KBelowQ));
    let f243 = gf(3, 5);
    let c = build_parity_in(&f243, Variant::Automorphism(1), 5, 3).unwrap();
    assert_eq!(c.guarantee, Guarantee::ProvenSuperRegular(ProofRange::KAtMostDegree));
    let c = build_parity_in(&f243, Variant::Automorphism(1), 6, 3).unwrap();
    assert_eq!(c.guarantee, Guarantee::Unverified);
    assert!(matches!(
        build_parity_in(&f256, Variant::Automorphism(1), 256, 3),
        Err(ConstructionError::KTooLarge { k: 256, q: 256 })
    ));
    assert!(matches!(
        build_parity_in(&f256, Variant::Automorphism(1), 10, 4),
        Err(ConstructionError::UnsupportedWidth { r: 4 })
    ));
}

#[test]
fn narrower_recipes_are_prefixes() {
    let f = gf(2, 6);
    let full = build_parity_in(&f, Variant::Automorphism(1), 20, 3).unwrap();
    for r in 1..=2 {
        let c = build_parity_in(&f, Variant::Automorphism(1), 20, r).unwrap();
        assert_eq!(c.scalars, full.scalars.prefix(r));
        assert!(c.guarantee.is_proven());
    }
}

#[test]
fn proven_guarantees_survive_full_scans_on_small_fields() {
    for f in prime_power_fields(64).into_iter().filter(|f| f.w() > 1) {
        for e in valid_automorphism_exponents(f.w()) {
            for k in 1..f.q() as usize {
                let c = build_parity_in(&f, Variant::Automorphism(e), k, 3).unwrap();
                if c.guarantee.is_proven() {
                    assert!(is_super_regular(&c.matrix, false).super_regular, "q={} e={e} k={k}", f.q());
                }
            }
        }
    }
}

#[test]
fn recipe_json_round_trip() {
    let text = r#"{"variant": "automorphism", "e": 1, "p": 2, "w": 8, "k": 200, "r": 3}"#;
    let json: RecipeJson = serde_json::from_str(text).unwrap();
    let recipe = ConstructionRecipe::try_from(json.clone()).unwrap();
    assert_eq!(recipe.variant, Variant::Automorphism(1));
    assert_eq!((recipe.k, recipe.r), (200, 3));
    let c = build_parity(&recipe).unwrap();
    assert_eq!((c.matrix.rows(), c.matrix.cols()), (200, 3));
    assert_eq!(c.matrix, vandermonde(&c.field, 200, &c.scalars).unwrap());
    let back = RecipeJson::from(&recipe);
    assert_eq!(ConstructionRecipe::try_from(back).unwrap(), recipe);
}

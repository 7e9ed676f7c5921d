mod common;

use std::sync::Arc;

use common::subsets;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svcodes::codes::CodeError;
use svcodes::constructions::scalars_automorphism;
use svcodes::search::{exhaustive_search, DEFAULT_BUDGET};
use svcodes::{vandermonde, Codeword, Field, FieldCtx, FieldElem, ScalarVector, SystematicCode};

fn gf(p: u64, w: u32) -> Field {
    Arc::new(FieldCtx::with_default(p, w).unwrap())
}

fn random_message(f: &Field, k: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElem> {
    (0..k).map(|_| FieldElem(rng.gen_range(0..f.q()) as u32)).collect()
}

/// Every erasure pattern of size up to r decodes to `msg`.
fn assert_all_patterns_decode(code: &SystematicCode, msg: &[FieldElem]) {
    let cw = code.encode(msg).unwrap();
    for lost in 0..=code.r() {
        for pattern in subsets(code.n(), lost) {
            let mut received = cw.clone();
            received.erase(&pattern);
            assert_eq!(code.decode(&received).unwrap(), msg, "erased {pattern:?}");
        }
    }
}

#[test]
fn automorphism_codes_decode_every_pattern() {
    let f = gf(2, 8);
    let xi = scalars_automorphism(&f, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for r in 1..=3 {
        for k in 1..=(12 - r) {
            let code = SystematicCode::new(vandermonde(&f, k, &xi.prefix(r)).unwrap()).unwrap();
            assert!(code.is_mds());
            let msg = random_message(&f, k, &mut rng);
            assert_all_patterns_decode(&code, &msg);
        }
    }
}

#[test]
fn searched_codes_over_small_fields_decode_every_pattern() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (p, w, k, r) in [(7, 1, 3, 3), (11, 1, 5, 4), (3, 2, 4, 2), (2, 4, 4, 3), (13, 1, 4, 3)] {
        let f = gf(p, w);
        let rep = exhaustive_search(&f, k, r, DEFAULT_BUDGET).unwrap();
        let xi = rep.first_witness.unwrap_or_else(|| panic!("none for {:?}", (p, w, k, r)));
        let code = SystematicCode::new(vandermonde(&f, k, &xi).unwrap()).unwrap();
        for _ in 0..3 {
            let msg = random_message(&f, k, &mut rng);
            assert_all_patterns_decode(&code, &msg);
        }
    }
}

#[test]
fn is_mds_iff_every_survivor_set_decodes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, w) in [(5, 1), (7, 1), (2, 3), (3, 2), (2, 4)] {
        let f = gf(p, w);
        let top = (f.q() - 1) as usize;
        for _ in 0..15 {
            let r = rng.gen_range(1..=3usize.min(top));
            let k = rng.gen_range(1..=(10 - r));
            let set: Vec<FieldElem> = rand::seq::index::sample(&mut rng, top, r)
                .into_iter()
                .map(|v| FieldElem(v as u32 + 1))
                .collect();
            let code = SystematicCode::new(vandermonde(&f, k, &ScalarVector(set)).unwrap()).unwrap();
            let msg = random_message(&f, k, &mut rng);
            let cw = code.encode(&msg).unwrap();
            let all_decode = subsets(code.n(), code.r()).into_iter().all(|pattern| {
                let mut received = cw.clone();
                received.erase(&pattern);
                match code.decode(&received) {
                    Ok(m) => {
                        assert_eq!(m, msg);
                        true
                    }
                    Err(CodeError::SingularSubsystem { .. }) => false,
                    Err(e) => panic!("unexpected {e}"),
                }
            });
            assert_eq!(code.is_mds(), all_decode, "q={} k={k} r={r}", f.q());
        }
    }
}

#[test]
fn encoding_example_over_f5() {
    let f = gf(5, 1);
    let code = SystematicCode::new(vandermonde(&f, 2, &ScalarVector(vec![FieldElem(1), FieldElem(2)])).unwrap())
        .unwrap();
    let cw = code.encode(&[FieldElem(1), FieldElem(1)]).unwrap();
    assert_eq!(cw, Codeword::full([1, 1, 2, 3].map(FieldElem).to_vec()));
    let g = code.generator();
    assert_eq!((g.rows(), g.cols()), (2, 4));
    assert_eq!(g.row(0), [1, 0, 1, 1].map(FieldElem));
}

#[test]
fn codeword_json_uses_null_for_erasures() {
    let mut cw = Codeword::full(vec![FieldElem(3), FieldElem(9), FieldElem(0)]);
    cw.erase(&[2]);
    assert_eq!(serde_json::to_string(&cw).unwrap(), "[3,null,0]");
    let back: Codeword = serde_json::from_str("[3,null,0]").unwrap();
    assert_eq!(back, cw);
}

#[test]
fn out_of_range_symbols_are_rejected() {
    let f = gf(5, 1);
    let code = SystematicCode::new(vandermonde(&f, 2, &ScalarVector(vec![FieldElem(1), FieldElem(2)])).unwrap())
        .unwrap();
    assert!(code.encode(&[FieldElem(5), FieldElem(0)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn encoding_is_linear(seed in any::<u64>(), k in 1usize..10, r in 1usize..4) {
        let f = gf(2, 8);
        let xi = scalars_automorphism(&f, 3).unwrap().prefix(r);
        let code = SystematicCode::new(vandermonde(&f, k, &xi).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = FieldElem(rng.gen_range(0..256));
        let m1 = random_message(&f, k, &mut rng);
        let m2 = random_message(&f, k, &mut rng);
        let combo: Vec<FieldElem> = m1.iter().zip(&m2).map(|(&x, &y)| f.add(f.mul(a, x), y)).collect();
        let c1 = code.encode(&m1).unwrap().symbols().unwrap();
        let c2 = code.encode(&m2).unwrap().symbols().unwrap();
        let expected: Vec<FieldElem> = c1.iter().zip(&c2).map(|(&x, &y)| f.add(f.mul(a, x), y)).collect();
        prop_assert_eq!(code.encode(&combo).unwrap().symbols().unwrap(), expected);
    }

    #[test]
    fn byte_mode_round_trips(data in prop::collection::vec(any::<u8>(), 0..200), lost in 0usize..=3) {
        let f = gf(2, 8);
        let code = SystematicCode::new(vandermonde(&f, 5, &scalars_automorphism(&f, 1).unwrap()).unwrap()).unwrap();
        let enc = code.encode_bytes(&data).unwrap();
        prop_assert_eq!(enc.len() % 8, 0);
        let erased: Vec<usize> = (1..=lost).map(|i| i * 2).collect();
        let dec = code.decode_bytes(&enc, &erased).unwrap();
        prop_assert_eq!(&dec[..data.len()], &data[..]);
    }
}

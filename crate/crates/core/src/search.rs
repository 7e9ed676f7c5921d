//! Exhaustive and randomised search for super-regular Vandermonde scalar sets.
//!
//! Column order does not affect super-regularity, so candidates are sorted
//! sets of distinct nonzero scalars. Work is bounded by a budget counted in
//! determinant evaluations, which keeps reports independent of the machine
//! and the thread count.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, first_combination, next_combination};
use crate::bounds::{char2_bound_check, divisor_bound_check, existence_threshold};
use crate::galois::{FieldCtx, FieldElem, FieldSpec};
use crate::matrix::{is_super_regular, vandermonde, Field, ScalarVector};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

const CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("determinant budget of {budget} exhausted after {sets_examined} scalar sets")]
    BudgetExceeded { budget: u64, sets_examined: u64 },
    #[error("k and r must be at least 1")]
    BadParameters,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub field: FieldSpec,
    pub q: u64,
    pub k: usize,
    pub r: usize,
    pub exists: bool,
    pub first_witness: Option<ScalarVector>,
    pub sets_examined: u64,
    pub determinants: u64,
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SearchReport {
    pub fn csv_header() -> &'static str {
        "q,k,r,exists,witness"
    }

    /// `q,k,r,exists,witness` with the witness as space-separated encodings.
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.q, self.k, self.r, self.exists, witness_str(&self.first_witness))
    }
}

fn witness_str(w: &Option<ScalarVector>) -> String {
    w.as_ref()
        .map(|s| s.0.iter().map(|x| x.0.to_string()).collect::<Vec<_>>().join(" "))
        .unwrap_or_default()
}

fn test_set(field: &Field, k: usize, set: &[usize]) -> (bool, u64) {
    let xi = ScalarVector(set.iter().map(|&v| FieldElem(v as u32)).collect());
    let m = vandermonde(field, k, &xi).expect("candidate scalars are nonzero");
    let verdict = is_super_regular(&m, true);
    (verdict.super_regular, verdict.determinants)
}

/// Tests every r-subset of the nonzero elements in lexicographic order and
/// reports the first one whose k x r Vandermonde matrix is super-regular.
pub fn exhaustive_search(
    field: &Field,
    k: usize,
    r: usize,
    budget: u64,
) -> Result<SearchReport, SearchError> {
    if k == 0 || r == 0 {
        return Err(SearchError::BadParameters);
    }
    let top = (field.q() - 1) as usize;
    let mut report = SearchReport {
        field: field.spec().clone(),
        q: field.q(),
        k,
        r,
        exists: false,
        first_witness: None,
        sets_examined: 0,
        determinants: 0,
        exhaustive: true,
        seed: None,
    };
    let Some(mut current) = first_combination(r, 1, top) else {
        return Ok(report);
    };
    let mut more = true;
    while more {
        let mut chunk = Vec::with_capacity(CHUNK);
        while more && chunk.len() < CHUNK {
            chunk.push(current.clone());
            more = next_combination(&mut current, top);
        }
        let results: Vec<(bool, u64)> = chunk.par_iter().map(|set| test_set(field, k, set)).collect();
        for (set, (ok, dets)) in chunk.iter().zip(results) {
            report.sets_examined += 1;
            report.determinants += dets;
            if report.determinants > budget {
                return Err(SearchError::BudgetExceeded {
                    budget,
                    sets_examined: report.sets_examined,
                });
            }
            if ok {
                report.exists = true;
                report.first_witness =
                    Some(ScalarVector(set.iter().map(|&v| FieldElem(v as u32)).collect()));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Draws up to `trials` distinct scalar sets uniformly at random (without
/// replacement) and stops at the first super-regular one. Deterministic for
/// a given seed.
pub fn random_search(
    field: &Field,
    k: usize,
    r: usize,
    trials: u64,
    seed: u64,
) -> Result<SearchReport, SearchError> {
    if k == 0 || r == 0 {
        return Err(SearchError::BadParameters);
    }
    let top = (field.q() - 1) as usize;
    let mut report = SearchReport {
        field: field.spec().clone(),
        q: field.q(),
        k,
        r,
        exists: false,
        first_witness: None,
        sets_examined: 0,
        determinants: 0,
        exhaustive: false,
        seed: Some(seed),
    };
    if r > top {
        return Ok(report);
    }
    let total = arith::binomial(top as u64, r as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tried: HashSet<Vec<usize>> = HashSet::new();
    while report.sets_examined < trials && (tried.len() as u64) < total {
        let set = loop {
            let mut s: Vec<usize> =
                rand::seq::index::sample(&mut rng, top, r).into_iter().map(|v| v + 1).collect();
            s.sort_unstable();
            if !tried.contains(&s) {
                break s;
            }
        };
        tried.insert(set.clone());
        report.sets_examined += 1;
        let (ok, dets) = test_set(field, k, &set);
        report.determinants += dets;
        if ok {
            report.exists = true;
            report.first_witness =
                Some(ScalarVector(set.into_iter().map(|v| FieldElem(v as u32)).collect()));
            break;
        }
    }
    Ok(report)
}

/// Prime-power fields up to `max_q` with default moduli, ordered by size.
pub fn prime_power_fields(max_q: u64) -> Vec<Field> {
    (2..=max_q)
        .filter_map(arith::prime_power)
        .map(|(p, w)| Arc::new(FieldCtx::with_default(p, w).expect("default modulus exists")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub q: u64,
    pub p: u64,
    pub w: u32,
    /// `None` when the search ran out of budget.
    pub exists: Option<bool>,
    pub witness: Option<ScalarVector>,
    pub divisor_feasible: bool,
    /// Only evaluated in characteristic 2.
    pub char2_feasible: Option<bool>,
    pub above_threshold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierTable {
    pub k: usize,
    pub r: usize,
    /// Decimal rendering of the existence threshold B(k, r).
    pub threshold: String,
    pub rows: Vec<FrontierRow>,
    /// Smallest q in the family from which every row reports existence.
    pub frontier: Option<u64>,
    /// Rows that contradict a bound, as human-readable notes.
    pub inconsistencies: Vec<String>,
}

impl FrontierTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SearchReport::csv_header());
        out.push('\n');
        for row in &self.rows {
            let exists = row.exists.map_or("unknown".to_string(), |e| e.to_string());
            let _ = writeln!(out, "{},{},{},{},{}", row.q, self.k, self.r, exists, witness_str(&row.witness));
        }
        out
    }
}

/// Runs an exhaustive search on each field and cross-checks the outcome
/// against the necessary conditions and the existence threshold.
pub fn empirical_min_q(k: usize, r: usize, family: &[Field], budget: u64) -> FrontierTable {
    let threshold: BigUint = existence_threshold(k, r);
    let mut rows = Vec::with_capacity(family.len());
    let mut inconsistencies = Vec::new();
    for field in family {
        let q = field.q();
        let (exists, witness) = match exhaustive_search(field, k, r, budget) {
            Ok(rep) => (Some(rep.exists), rep.first_witness),
            Err(_) => (None, None),
        };
        let divisor_feasible = divisor_bound_check(q, k, r).map(|v| v.feasible).unwrap_or(true);
        let char2_feasible = (field.p() == 2)
            .then(|| char2_bound_check(q, k, r).map(|v| v.feasible).unwrap_or(true));
        let above_threshold = BigUint::from(q) > threshold;
        if exists == Some(true) && !divisor_feasible {
            inconsistencies.push(format!("q={q}: exists but the divisor condition fails"));
        }
        if exists == Some(true) && char2_feasible == Some(false) {
            inconsistencies.push(format!("q={q}: exists but the characteristic-2 condition fails"));
        }
        if exists == Some(false) && above_threshold {
            inconsistencies.push(format!("q={q}: none found although q > {threshold}"));
        }
        rows.push(FrontierRow {
            q,
            p: field.p(),
            w: field.w(),
            exists,
            witness,
            divisor_feasible,
            char2_feasible,
            above_threshold,
        });
    }
    let frontier = rows
        .iter()
        .rposition(|row| row.exists != Some(true))
        .map_or(rows.first().map(|r| r.q), |i| rows.get(i + 1).map(|r| r.q));
    FrontierTable { k, r, threshold: threshold.to_string(), rows, frontier, inconsistencies }
}

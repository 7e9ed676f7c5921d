//! Merge-regime code conversion between Vandermonde codes sharing scalars.
//!
//! lambda codewords of an [k + r, k] code are merged into one codeword of a
//! [lambda k + r, lambda k] code. Both parity matrices are V_(.)(xi) over the
//! same scalars, so rows (t-1)k+1 ..= tk of the final parity matrix equal the
//! initial parity matrix with column j scaled by xi_j^((t-1)k). Each final
//! parity is therefore a combination of the matching initial parities and
//! the data symbols never need to be read.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{CodeError, Codeword, SystematicCode};
use crate::constructions::{recognize_scalars, Guarantee};
use crate::galois::{FieldCtx, FieldElem, FieldError, FieldSpec};
use crate::matrix::{
    is_super_regular, vandermonde, Field, MatrixError, MatrixF, ScalarVector, SubmatrixSelector,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("merge factor lambda = {0} must be at least 2")]
    BadLambda(usize),
    #[error("k^I and r must be at least 1")]
    BadParameters,
    #[error("r = {r} but {len} scalars were given")]
    ScalarCountMismatch { r: usize, len: usize },
    #[error("final parity matrix is not super-regular; singular selector {witness:?}")]
    NotSuperRegular { witness: SubmatrixSelector },
    #[error("expected {expected} initial codewords, got {got}")]
    WrongCodewordCount { expected: usize, got: usize },
    #[error("initial codeword {codeword} has length {got}, expected {expected}")]
    LengthMismatch { codeword: usize, expected: usize, got: usize },
    #[error("initial codeword {codeword} is missing symbol {symbol}")]
    MissingSymbol { codeword: usize, symbol: usize },
    #[error("initial codeword {codeword} fails the parity check")]
    InvalidInitialCodeword { codeword: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// How the final parity matrix was shown to be super-regular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVerification {
    Proven(Guarantee),
    Scanned { determinants: u64 },
    /// Built with [`ConvertiblePair::new_unverified`]; the final code may not be MDS.
    Unverified,
}

#[derive(Debug, Clone)]
pub struct ConvertiblePair {
    field: Field,
    k_initial: usize,
    lambda: usize,
    xi: ScalarVector,
    initial: SystematicCode,
    final_code: SystematicCode,
    /// coefficients[t][j] = xi_j^(t k^I)
    coefficients: Vec<Vec<FieldElem>>,
    verification: PairVerification,
}

impl ConvertiblePair {
    /// Builds the pair and checks that V_(lambda k^I)(xi) is super-regular,
    /// by a construction guarantee when `xi` is recognised, otherwise by a
    /// full scan.
    pub fn new(
        field: &Field,
        k_initial: usize,
        r: usize,
        lambda: usize,
        xi: ScalarVector,
    ) -> Result<Self, ConvertError> {
        Self::check_shape(k_initial, r, lambda, &xi)?;
        let k_final = lambda * k_initial;
        let final_parity = vandermonde(field, k_final, &xi)?;
        let verification = match recognize_scalars(field, &xi, k_final) {
            g @ Guarantee::ProvenSuperRegular(_) => PairVerification::Proven(g),
            Guarantee::Unverified => {
                let verdict = is_super_regular(&final_parity, true);
                if let Some(witness) = verdict.witness {
                    return Err(ConvertError::NotSuperRegular { witness });
                }
                PairVerification::Scanned { determinants: verdict.determinants }
            }
        };
        Self::assemble(field, k_initial, lambda, xi, final_parity, verification)
    }

    /// Same layout as [`ConvertiblePair::new`] without the super-regularity
    /// requirement. The merge identity holds for any shared scalars, so this
    /// is useful for exercising conversion over fields too small for an MDS
    /// final code.
    pub fn new_unverified(
        field: &Field,
        k_initial: usize,
        r: usize,
        lambda: usize,
        xi: ScalarVector,
    ) -> Result<Self, ConvertError> {
        Self::check_shape(k_initial, r, lambda, &xi)?;
        let final_parity = vandermonde(field, lambda * k_initial, &xi)?;
        Self::assemble(field, k_initial, lambda, xi, final_parity, PairVerification::Unverified)
    }

    fn check_shape(k_initial: usize, r: usize, lambda: usize, xi: &ScalarVector) -> Result<(), ConvertError> {
        if lambda < 2 {
            return Err(ConvertError::BadLambda(lambda));
        }
        if k_initial == 0 || r == 0 {
            return Err(ConvertError::BadParameters);
        }
        if xi.len() != r {
            return Err(ConvertError::ScalarCountMismatch { r, len: xi.len() });
        }
        xi.validate()?;
        Ok(())
    }

    fn assemble(
        field: &Field,
        k_initial: usize,
        lambda: usize,
        xi: ScalarVector,
        final_parity: MatrixF,
        verification: PairVerification,
    ) -> Result<Self, ConvertError> {
        let r = xi.len();
        let initial = SystematicCode::new(vandermonde(field, k_initial, &xi)?)?;
        let final_code = SystematicCode::new(final_parity)?;
        let step: Vec<FieldElem> = xi.0.iter().map(|&x| field.pow_u(x, k_initial as u64)).collect();
        let mut coefficients = Vec::with_capacity(lambda);
        let mut row = vec![FieldElem::ONE; r];
        for _ in 0..lambda {
            coefficients.push(row.clone());
            for (c, &s) in row.iter_mut().zip(&step) {
                *c = field.mul(*c, s);
            }
        }
        Ok(ConvertiblePair {
            field: field.clone(),
            k_initial,
            lambda,
            xi,
            initial,
            final_code,
            coefficients,
            verification,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn k_initial(&self) -> usize {
        self.k_initial
    }

    pub fn k_final(&self) -> usize {
        self.lambda * self.k_initial
    }

    pub fn r(&self) -> usize {
        self.xi.len()
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn n_initial(&self) -> usize {
        self.k_initial + self.r()
    }

    pub fn n_final(&self) -> usize {
        self.k_final() + self.r()
    }

    pub fn scalars(&self) -> &ScalarVector {
        &self.xi
    }

    pub fn initial_code(&self) -> &SystematicCode {
        &self.initial
    }

    pub fn final_code(&self) -> &SystematicCode {
        &self.final_code
    }

    pub fn verification(&self) -> PairVerification {
        self.verification
    }

    /// Merge coefficient applied to parity `j` of initial codeword `t` (0-indexed).
    pub fn coefficient(&self, t: usize, j: usize) -> FieldElem {
        self.coefficients[t][j]
    }

    /// Splits a k^F-symbol message into consecutive blocks and encodes each
    /// under the initial code.
    pub fn encode_initial(&self, message: &[FieldElem]) -> Result<Vec<Codeword>, ConvertError> {
        if message.len() != self.k_final() {
            return Err(CodeError::LengthMismatch { expected: self.k_final(), got: message.len() }.into());
        }
        message
            .chunks(self.k_initial)
            .map(|block| Ok(self.initial.encode(block)?))
            .collect()
    }

    fn check_inputs(&self, inputs: &[Codeword]) -> Result<(), ConvertError> {
        if inputs.len() != self.lambda {
            return Err(ConvertError::WrongCodewordCount { expected: self.lambda, got: inputs.len() });
        }
        for (t, cw) in inputs.iter().enumerate() {
            if cw.len() != self.n_initial() {
                return Err(ConvertError::LengthMismatch {
                    codeword: t + 1,
                    expected: self.n_initial(),
                    got: cw.len(),
                });
            }
            if let Some(i) = cw.0.iter().position(Option::is_none) {
                return Err(ConvertError::MissingSymbol { codeword: t + 1, symbol: i + 1 });
            }
        }
        Ok(())
    }

    fn systematic_concat(&self, inputs: &[Codeword]) -> Vec<FieldElem> {
        inputs
            .iter()
            .flat_map(|cw| cw.0[..self.k_initial].iter().map(|s| s.expect("checked")))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodewordRef {
    /// 1-indexed initial codeword
    Initial(usize),
    Final,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessOp {
    Read,
    Write,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AccessEvent {
    pub codeword: CodewordRef,
    /// 1-indexed symbol position within that codeword
    pub symbol: usize,
    pub op: AccessOp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AccessStats {
    pub symbols_read: usize,
    pub symbols_written: usize,
}

impl AccessStats {
    pub fn total(&self) -> usize {
        self.symbols_read + self.symbols_written
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessLog(pub Vec<AccessEvent>);

impl AccessLog {
    fn record(&mut self, codeword: CodewordRef, symbol: usize, op: AccessOp) {
        self.0.push(AccessEvent { codeword, symbol, op });
    }

    pub fn stats(&self) -> AccessStats {
        let reads = self.0.iter().filter(|e| e.op == AccessOp::Read).count();
        AccessStats { symbols_read: reads, symbols_written: self.0.len() - reads }
    }
}

#[derive(Debug, Clone)]
pub struct ConversionOutput {
    pub codeword: Codeword,
    pub log: AccessLog,
}

impl ConversionOutput {
    pub fn stats(&self) -> AccessStats {
        self.log.stats()
    }
}

/// Parity-only conversion: reads the lambda r initial parities, writes the
/// r final parities. Data symbols stay in place and are not accessed. With
/// `recheck`, each initial codeword is first re-encoded to confirm it is
/// valid (that check is not counted as conversion access).
pub fn convert_merge(
    pair: &ConvertiblePair,
    inputs: &[Codeword],
    recheck: bool,
) -> Result<ConversionOutput, ConvertError> {
    pair.check_inputs(inputs)?;
    if recheck {
        for (t, cw) in inputs.iter().enumerate() {
            let symbols = cw.symbols().expect("checked");
            if pair.initial.encode(&symbols[..pair.k_initial])? != *cw {
                return Err(ConvertError::InvalidInitialCodeword { codeword: t + 1 });
            }
        }
    }
    let f = &pair.field;
    let (k_i, r) = (pair.k_initial, pair.r());
    let mut log = AccessLog::default();
    let mut parities = vec![FieldElem::ZERO; r];
    for (j, parity) in parities.iter_mut().enumerate() {
        for (t, cw) in inputs.iter().enumerate() {
            log.record(CodewordRef::Initial(t + 1), k_i + j + 1, AccessOp::Read);
            let p = cw.0[k_i + j].expect("checked");
            *parity = f.add(*parity, f.mul(pair.coefficients[t][j], p));
        }
    }
    let mut symbols = pair.systematic_concat(inputs);
    for (j, &p) in parities.iter().enumerate() {
        log.record(CodewordRef::Final, pair.k_final() + j + 1, AccessOp::Write);
        symbols.push(p);
    }
    Ok(ConversionOutput { codeword: Codeword::full(symbols), log })
}

/// Re-encoding conversion: reads every data symbol and encodes afresh.
pub fn default_convert(
    pair: &ConvertiblePair,
    inputs: &[Codeword],
) -> Result<ConversionOutput, ConvertError> {
    pair.check_inputs(inputs)?;
    let mut log = AccessLog::default();
    for t in 0..inputs.len() {
        for i in 0..pair.k_initial {
            log.record(CodewordRef::Initial(t + 1), i + 1, AccessOp::Read);
        }
    }
    let message = pair.systematic_concat(inputs);
    let codeword = pair.final_code.encode(&message)?;
    for j in 0..pair.r() {
        log.record(CodewordRef::Final, pair.k_final() + j + 1, AccessOp::Write);
    }
    Ok(ConversionOutput { codeword, log })
}

/// Encodes `message` into initial codewords, merges them, and compares with
/// encoding `message` directly under the final code.
pub fn verify_conversion_correctness(pair: &ConvertiblePair, message: &[FieldElem]) -> bool {
    let Ok(inputs) = pair.encode_initial(message) else {
        return false;
    };
    let Ok(direct) = pair.final_code.encode(message) else {
        return false;
    };
    convert_merge(pair, &inputs, false).is_ok_and(|out| out.codeword == direct)
}

/// Pair wire form: `{"p": 2, "w": 8, "kI": 4, "r": 3, "lambda": 2, "xi": [1, 2, 4]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub p: u64,
    pub w: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modulus: Vec<u32>,
    #[serde(rename = "kI")]
    pub k_initial: usize,
    pub r: usize,
    pub lambda: usize,
    pub xi: Vec<u32>,
}

impl PairJson {
    pub fn build(&self) -> Result<ConvertiblePair, ConvertError> {
        let field = Arc::new(FieldCtx::new(FieldSpec::new(self.p, self.w, self.modulus.clone()))?);
        let xi = self
            .xi
            .iter()
            .map(|&v| field.elem(v as u64))
            .collect::<Result<Vec<_>, _>>()?;
        ConvertiblePair::new(&field, self.k_initial, self.r, self.lambda, ScalarVector(xi))
    }

    pub fn from_pair(pair: &ConvertiblePair) -> Self {
        let spec = pair.field.spec();
        PairJson {
            p: spec.p,
            w: spec.w,
            modulus: spec.modulus.clone(),
            k_initial: pair.k_initial,
            r: pair.r(),
            lambda: pair.lambda,
            xi: pair.xi.0.iter().map(|x| x.0).collect(),
        }
    }
}

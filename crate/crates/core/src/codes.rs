//! Systematic linear codes with generator [I_k | P].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{FieldElem, FieldError};
use crate::matrix::{is_super_regular, Field, MatrixError, MatrixF};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("a systematic code needs k >= 1 and at least one parity column")]
    BadParameters,
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{present} symbols present, {needed} needed to decode")]
    TooFewSymbols { present: usize, needed: usize },
    #[error("survivor set {survivors:?} gives a singular system; the parity matrix is not super-regular")]
    SingularSubsystem { survivors: Vec<usize> },
    #[error("byte mode needs p = 2 and w <= 8")]
    ByteModeUnsupported,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// n symbols, each present or erased. JSON form is an array with `null`
/// for erasures.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Codeword(pub Vec<Option<FieldElem>>);

impl Codeword {
    pub fn full(symbols: Vec<FieldElem>) -> Self {
        Codeword(symbols.into_iter().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn present(&self) -> usize {
        self.0.iter().filter(|s| s.is_some()).count()
    }

    /// All symbols, if none are erased.
    pub fn symbols(&self) -> Option<Vec<FieldElem>> {
        self.0.iter().copied().collect()
    }

    /// Erases the given 1-indexed positions.
    pub fn erase(&mut self, positions: &[usize]) {
        for &i in positions {
            if let Some(s) = self.0.get_mut(i.wrapping_sub(1)) {
                *s = None;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicCode {
    field: Field,
    n: usize,
    k: usize,
    parity: MatrixF,
}

impl SystematicCode {
    /// The [k + r, k] code with parity matrix `parity` (k x r).
    pub fn new(parity: MatrixF) -> Result<Self, CodeError> {
        let (k, r) = (parity.rows(), parity.cols());
        if k == 0 || r == 0 {
            return Err(CodeError::BadParameters);
        }
        Ok(SystematicCode { field: parity.field().clone(), n: k + r, k, parity })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.n - self.k
    }

    pub fn parity(&self) -> &MatrixF {
        &self.parity
    }

    /// The k x n generator [I_k | P].
    pub fn generator(&self) -> MatrixF {
        let mut g = MatrixF::zeros(self.field.clone(), self.k, self.n);
        for i in 0..self.k {
            g.set(i, i, FieldElem::ONE);
            for j in 0..self.r() {
                g.set(i, self.k + j, self.parity.get(i, j));
            }
        }
        g
    }

    /// Parity symbols of `message`.
    pub fn parities(&self, message: &[FieldElem]) -> Result<Vec<FieldElem>, CodeError> {
        if message.len() != self.k {
            return Err(CodeError::LengthMismatch { expected: self.k, got: message.len() });
        }
        for &m in message {
            self.field.elem(m.0 as u64)?;
        }
        Ok(self.parity.left_mul_vec(message)?)
    }

    pub fn encode(&self, message: &[FieldElem]) -> Result<Codeword, CodeError> {
        let parities = self.parities(message)?;
        let mut symbols = message.to_vec();
        symbols.extend(parities);
        Ok(Codeword::full(symbols))
    }

    /// Recovers the message from any k surviving symbols.
    ///
    /// Present systematic symbols are taken as-is; erased ones are solved
    /// from the first surviving parities, which is the same as solving the
    /// k x k system on the first k surviving generator columns.
    pub fn decode(&self, received: &Codeword) -> Result<Vec<FieldElem>, CodeError> {
        if received.len() != self.n {
            return Err(CodeError::LengthMismatch { expected: self.n, got: received.len() });
        }
        let present = received.present();
        if present < self.k {
            return Err(CodeError::TooFewSymbols { present, needed: self.k });
        }
        let f = &self.field;
        let erased: Vec<usize> = (0..self.k).filter(|&i| received.0[i].is_none()).collect();
        let mut message: Vec<FieldElem> =
            received.0[..self.k].iter().map(|s| s.unwrap_or(FieldElem::ZERO)).collect();
        if erased.is_empty() {
            return Ok(message);
        }
        let parity_rows: Vec<usize> = (0..self.r())
            .filter(|&j| received.0[self.k + j].is_some())
            .take(erased.len())
            .collect();
        // parity j: sum_{u erased} m_u P[u][j] = c_{k+j} - sum_{i known} m_i P[i][j]
        let mut a = Vec::with_capacity(erased.len() * erased.len());
        let mut rhs = Vec::with_capacity(erased.len());
        for &j in &parity_rows {
            for &u in &erased {
                a.push(self.parity.get(u, j));
            }
            let mut acc = received.0[self.k + j].expect("selected parity is present");
            for i in (0..self.k).filter(|i| !erased.contains(i)) {
                acc = f.sub(acc, f.mul(message[i], self.parity.get(i, j)));
            }
            rhs.push(acc);
        }
        let system = MatrixF::new(f.clone(), erased.len(), erased.len(), a)?;
        let solution = system.solve(&rhs).map_err(|e| match e {
            MatrixError::Singular => {
                let mut survivors: Vec<usize> =
                    (0..self.k).filter(|i| !erased.contains(i)).map(|i| i + 1).collect();
                survivors.extend(parity_rows.iter().map(|j| self.k + j + 1));
                CodeError::SingularSubsystem { survivors }
            }
            other => other.into(),
        })?;
        for (&u, v) in erased.iter().zip(solution) {
            message[u] = v;
        }
        Ok(message)
    }

    pub fn is_mds(&self) -> bool {
        is_super_regular(&self.parity, true).super_regular
    }

    fn check_byte_mode(&self) -> Result<(), CodeError> {
        if self.field.p() == 2 && self.field.w() <= 8 {
            Ok(())
        } else {
            Err(CodeError::ByteModeUnsupported)
        }
    }

    /// Encodes a raw byte stream, one byte per symbol, k bytes per stripe.
    /// A short final stripe is zero-padded.
    pub fn encode_bytes(&self, data: &[u8]) -> Result<Vec<u8>, CodeError> {
        self.check_byte_mode()?;
        let mut out = Vec::with_capacity(data.len().div_ceil(self.k) * self.n);
        for chunk in data.chunks(self.k) {
            let mut msg: Vec<FieldElem> = chunk.iter().map(|&b| FieldElem(b as u32)).collect();
            msg.resize(self.k, FieldElem::ZERO);
            let cw = self.encode(&msg)?;
            out.extend(cw.0.iter().map(|s| s.expect("fresh codeword").0 as u8));
        }
        Ok(out)
    }

    /// Decodes n-byte stripes, treating the 1-indexed positions in `erased`
    /// as lost in every stripe.
    pub fn decode_bytes(&self, data: &[u8], erased: &[usize]) -> Result<Vec<u8>, CodeError> {
        self.check_byte_mode()?;
        if !data.len().is_multiple_of(self.n) {
            return Err(CodeError::LengthMismatch {
                expected: data.len().div_ceil(self.n) * self.n,
                got: data.len(),
            });
        }
        let mut out = Vec::with_capacity(data.len() / self.n * self.k);
        for stripe in data.chunks(self.n) {
            let symbols = stripe
                .iter()
                .map(|&b| self.field.elem(b as u64).map(Some))
                .collect::<Result<Vec<_>, _>>()?;
            let mut cw = Codeword(symbols);
            cw.erase(erased);
            out.extend(self.decode(&cw)?.into_iter().map(|s| s.0 as u8));
        }
        Ok(out)
    }
}

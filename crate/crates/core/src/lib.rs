//! Systematic MDS erasure codes with super-regular Vandermonde parity
//! matrices, and access-efficient conversion between them in the merge
//! regime.
//!
//! * [`galois`]: arithmetic in GF(p^w), orders, primitive elements, Frobenius maps.
//! * [`matrix`]: dense matrices, Vandermonde matrices, super-regularity scans.
//! * [`bounds`]: necessary and sufficient field-size conditions.
//! * [`constructions`]: explicit low-field-size scalar choices for up to three parities.
//! * [`codes`]: encoding and erasure decoding of systematic codes.
//! * [`convert`]: merging lambda codewords by touching only parities.
//! * [`search`]: exhaustive and random scalar search, empirical frontiers.

pub mod arith;
pub mod bounds;
pub mod codes;
pub mod constructions;
pub mod convert;
pub mod galois;
pub mod matrix;
pub mod search;

pub use codes::{Codeword, SystematicCode};
pub use constructions::{ConstructionRecipe, Guarantee, Variant};
pub use convert::{AccessStats, ConvertiblePair};
pub use galois::{make_field, FieldCtx, FieldElem, FieldSpec};
pub use matrix::{is_super_regular, vandermonde, Field, MatrixF, ScalarVector, SubmatrixSelector};

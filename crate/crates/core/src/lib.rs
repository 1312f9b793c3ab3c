//! Random pool designs for non-adaptive group testing.
//!
//! Four random models are supported: random incidence (RID), random r-size
//! rows (RrSD), random s-set columns (RsSD) and uniform transversal designs
//! over a q-ary alphabet (UTDq). The crate sizes each model for a target
//! failure probability, generates seeded matrices, decodes test outcomes by
//! elimination, and checks the sizing guarantees by Monte Carlo.

pub mod bitmat;
pub mod cli;
pub mod decode;
pub mod designs;
pub mod error;
pub mod rng;
pub mod sim;
pub mod theory;

pub use bitmat::{or_columns, AnswerVector, BitMatrix, DefectiveSet, Matrix, QaryMatrix};
pub use decode::{decode_eliminate, good_row_count, is_disjunct, is_separable};
pub use designs::{
    lower_bound_m, optimal_param, upper_bound_m, upper_bound_m_with, DesignParam, DesignSpec,
    Model, SizingMethod, SizingOptions, SizingResult,
};
pub use error::{Error, Result};

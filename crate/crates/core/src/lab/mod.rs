//! Exact equal-characteristic oracle over finite fields.

pub mod bruhat;
pub mod bt1;
pub mod field;
pub mod lift;
pub mod matrix;
pub mod poly;
pub mod shtuka;
pub mod sigma;

pub use bruhat::{iwahori_class_of, iwahori_index_length, random_iwahori, LaurentMatrix};
pub use bt1::{eo_classify, graded_bt1_from_beginning, Bt1Module, CanonicalFlag, GradedBt1, Signature};
pub use field::{Elem, Field, FieldConfig};
pub use lift::{lift_from_filtration, FiltrationData, Lift};
pub use matrix::{FqMatrix, PolyMatrix, Subspace};
pub use poly::Poly;
pub use shtuka::{sample_shtuka, sample_shtuka_trial, LocalShtuka, Witness};
pub use sigma::sigma_conjugate_sample;

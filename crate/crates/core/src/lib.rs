//! Algebraic lattices from cyclic number fields of odd prime degree.
//!
//! A field is given by its degree `p` and conductor `n`. Elements are integer
//! coordinate vectors over an integral basis, and every lattice quantity
//! (Gram matrices, minima, densities) is computed exactly from the trace form.
//! Floating point is used only for Gaussian periods and a few cross-checks.

pub mod arith;
pub mod density;
pub mod error;
pub mod field;
pub mod intmat;
pub mod modules;
pub mod number_field;
pub mod periods;
pub mod real;
pub mod svp;

pub use error::{Error, Result};
pub use field::{validate_field, Element, FieldSpec, TraceTable};
pub use modules::{Family, GramMatrix, ModuleBasis};
pub use number_field::NumberField;
pub use real::Precision;
pub use svp::ShortVectorReport;

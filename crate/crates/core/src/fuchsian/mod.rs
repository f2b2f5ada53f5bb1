//! Genus-0 numerics: Fuchsian systems, monodromy, and monic scalar operators.

pub mod integrate;
pub mod linalg;
pub mod operator;
pub mod poly;
pub mod system;

pub use operator::{
    companion, indicial_polynomial, indicial_roots, oper_exponent_consistency, subprincipal_form,
    symmetric_square, Exponent, ExponentReport, LocalResidue, MonicOperator, OpPoint,
};
pub use poly::{Polynomial, RationalFunction};
pub use system::{
    build_fuchsian, irreducibility_check, monodromy_atlas, monodromy_spectrum_check,
    numerical_monodromy, FuchsianSystem, IrreducibilityReport, Monodromy, MonodromyAtlas, Puncture,
    SpectrumReport,
};

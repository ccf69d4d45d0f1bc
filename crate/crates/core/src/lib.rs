//! Finite-dimensional C*-algebras as a semantics for probabilistic and
//! quantum computation.
//!
//! Algebras are direct sums of matrix blocks `M_{n₁} ⊕ … ⊕ M_{n_k}`. On top
//! of the dense complex linear algebra in [`linalg`] the crate provides
//! elements and effects ([`algebra`]), linear maps with MIU/PU/CP
//! classification ([`maps`]), the finite distribution monad and its Kleisli
//! maps ([`monads`]), states and effect-module maps ([`states`]) and the
//! state-and-effect triangle checks ([`triangle`], [`verify`]).

pub mod algebra;
pub mod error;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod monads;
pub mod random;
pub mod report;
pub mod states;
pub mod tol;
pub mod triangle;
pub mod verify;

pub use num_complex::Complex64;

pub use algebra::{element_arith, AlgebraSignature, ArithOp, Effect, Element};
pub use error::{Error, Result};
pub use linalg::{herm_eig, is_psd, operator_norm, psd_sqrt, ComplexMatrix, EigenDecomposition};
pub use maps::{
    apply_map, choi_matrix, choi_min_eigenvalue, classify, classify_map, compose_maps, transpose_map,
    CompletePositivity, LinMap, MapClass, Positivity,
};
pub use monads::{
    dist_mult, dist_to_state, dist_unit, from_pu, function_to_miu, kleisli_compose, miu_to_function, state_to_dist,
    to_pu, Dist, FinDist, FunctionMap, KleisliMap,
};
pub use report::{Check, VerificationReport};
pub use states::{
    barycentre, dirac_state, emod_check, emod_to_state, is_extreme, spanning_states, xi_eval, xi_inverse, FinMeasure,
    State,
};
pub use triangle::{pred_of_map, stat_of_map, verify_stat_full_faithful, verify_triangle, TriangleReport};

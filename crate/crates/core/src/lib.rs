//! Exact symbolic construction of Lax operators for finite W-algebras.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere. The main pipeline goes:
//!
//! 1. [`liealg`] — models of the classical Lie algebras gl, sl, so, sp with
//!    their standard representations, trace forms, dual bases, and
//!    sl2-triples/gradings attached to a nilpotent orbit (partition).
//! 2. [`uea`] — sparse arithmetic in the universal enveloping algebra via
//!    PBW normal ordering, Kazhdan weights, and reduction modulo the left
//!    ideal defining the module M.
//! 3. [`series`] — truncated Laurent series (half-integer exponents) and
//!    matrices thereof with explicit precision floors, Neumann-series
//!    inversion, generalized quasideterminants and Dirac reduction.
//! 4. [`laxop`] — the operator-valued matrices U, A(z), A^rho(z), the shift
//!    matrix D, the quasideterminant L~(z) and its image L(z) in M, together
//!    with the W-algebra membership and consistency checks.
//! 5. [`yangian`] — tensor-square operators Omega / Omega^dagger, adjoints,
//!    and evaluation of the generalized (alpha,beta,gamma)-Yangian identity.
//! 6. [`rect`] — an independent closed-form construction of L(z) for
//!    rectangular nilpotents in so_N / sp_N, used as an end-to-end oracle.

pub mod error;
pub mod fxhash;
pub mod jsonio;
pub mod laxop;
pub mod liealg;
pub mod matrix;
pub mod rect;
pub mod scalar;
pub mod series;
pub mod uea;
pub mod yangian;

pub use error::{Error, Result};
pub use scalar::Rat;

//! Numerical contraction of `SL(n,R)` onto its Cartan motion group `K ⋉ p`.
//!
//! The crate realizes the family of groups `G_t` on the fixed set `K × p`,
//! the Iwasawa maps of the deformed groups and their `t → 0` limits, and
//! follows concrete representations of `SL(2,R)` (spherical and non-spherical
//! principal series, the weight-`m` discrete series, the fine-type sections of
//! the reducible `λ = 0` principal series) as they contract onto their
//! motion-group counterparts.
//!
//! Conventions used throughout:
//! - `K = SO(n)`, `p` = symmetric traceless matrices, `a` = traceless diagonals.
//! - `B(U, V) = tr(UV)` on `p`, so `B(H, H) = 2` for `H = diag(1, -1)`.
//! - Coordinates on `p` are taken in the `B`-orthonormal basis of [`matgroup::p_basis`];
//!   for `n = 2` the point `(x, y)` is `(x·H + y·X)/√2` with `X = [[0,1],[1,0]]`.
//! - `N` is upper unitriangular and `ρ(H) = 1` for `SL(2,R)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compact_picture;
pub mod deformation;
pub mod discrete_series;
pub mod error;
pub mod field;
pub mod iwasawa_limits;
pub mod matgroup;
pub mod quasisplit_fine;
pub mod report;
pub mod waves;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense real matrix used for group and algebra elements.
pub type Mat = nalgebra::DMatrix<f64>;

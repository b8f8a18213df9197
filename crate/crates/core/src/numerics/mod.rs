//! Quadrature, special functions, root finding and the dense symmetric
//! eigensolver used throughout the crate.

pub mod eigen;
pub mod matrix;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use eigen::{jacobi_eigen, sym_eigen, EigenDecomposition};
pub use matrix::SymmetricMatrix;
pub use quadrature::{composite_gauss, gauss_legendre, integrate_adaptive, QuadratureRule};
pub use roots::brent_root;
pub use special::{
    elliptic_e, erf, erfc, laguerre_assoc, ln_factorial, ln_gamma, phi_inverse, regularized_lower_gamma,
    regularized_upper_gamma,
};

//! Polynomials, monomial orders and the dual algebra of truncated functionals.

mod dual;
mod monomial;
mod polynomial;

pub use dual::{
    convolve, evaluation_functional, hankel_matrix, sigma_inner_product, HankelMatrix,
    MomentSequence, MonomialBasis,
};
pub use monomial::{count_up_to, monomials_of_degree, monomials_up_to, Monomial, MonomialOrder};
pub use polynomial::{Coeff, CoeffFormat, Polynomial, RationalPoly, RealPoly};

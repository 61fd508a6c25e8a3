//! Exact multivariate polynomial arithmetic over the rationals.

mod groebner;
mod modular;
mod monomial;
mod polynomial;
mod reduction;

pub use groebner::{
    buchberger, buchberger_with_stats, is_groebner_basis, is_unit_basis, reduce, reduce_basis,
    reduce_basis_unchecked, reduced_groebner_basis, s_polynomial, BuchbergerStats,
};
pub use modular::{is_unit_mod, modular_groebner, modular_groebner_traced, ModPoly, UnitDerivation, PRIME};
pub use monomial::{Monomial, MonomialOrder};
pub use polynomial::{parse_polynomial, Coeff, Polynomial};

/// Compares two monomials, failing when their ring dimensions differ.
pub fn compare(
    a: &Monomial,
    b: &Monomial,
    order: MonomialOrder,
) -> crate::error::Result<std::cmp::Ordering> {
    if a.nvars() != b.nvars() {
        return Err(crate::error::Error::DimensionMismatch(a.nvars(), b.nvars()));
    }
    Ok(order.compare(a, b))
}

//! ℤ₂-graded polynomial algebra over ℝ^{p|q} with exact rational
//! coefficients.

mod number;
mod parse;
mod random;
mod space;

pub use number::{int, rat, sign, Monomial, Parity, Rational, Side, Supernumber};
pub(crate) use number::{format_rational, same_space};
pub use parse::{parse, parse_rational};
pub(crate) use random::coefficient as random_coefficient;
pub use random::{monomials, random_homogeneous, random_homogeneous_with, rng_from_seed, TestRng};
pub use space::{Coord, CoordKind, GradedSpace};

/// Canonical text form; `parse(&format(s), s.space()) == s`.
pub fn format(s: &Supernumber) -> String {
    s.to_string()
}

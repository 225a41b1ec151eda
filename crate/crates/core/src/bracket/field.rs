use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{same_space, sign, GradedSpace, Parity, Side, Supernumber};

use super::eval::eval_bracket;
use super::spec::BracketSpec;

/// A vector field `Σ_i (∂_r/∂z_i) X^i`, acting on functions from the right:
/// `f ↦ Σ_i (∂_r f/∂z_i)·X^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub space: Arc<GradedSpace>,
    /// One component per coordinate, in declaration order.
    pub components: Vec<Supernumber>,
}

impl VectorField {
    pub fn zero(space: &Arc<GradedSpace>) -> Self {
        VectorField { space: space.clone(), components: vec![Supernumber::zero(space); space.dim()] }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Supernumber::is_zero)
    }

    /// Degree of the field: `|X^i| - |z_i|`, which must agree across
    /// nonzero components.
    pub fn parity(&self) -> Parity {
        let mut out = Parity::ZeroAny;
        for (c, z) in self.components.iter().zip(self.space.coords()) {
            let shifted = match c.parity() {
                Parity::ZeroAny => continue,
                Parity::Mixed => return Parity::Mixed,
                Parity::Even => Parity::from_bit(z.kind.parity()),
                Parity::Odd => Parity::from_bit(1 + z.kind.parity()),
            };
            if out == Parity::ZeroAny {
                out = shifted;
            } else if out != shifted {
                return Parity::Mixed;
            }
        }
        out
    }

    pub fn scale_right(&self, g: &Supernumber) -> Self {
        VectorField { space: self.space.clone(), components: self.components.iter().map(|c| c * g).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        VectorField {
            space: self.space.clone(),
            components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Nambu-Hamiltonian field of `args`: `X^i = {z_i, args…}`.
pub fn nh_field(spec: &BracketSpec, args: &[Supernumber]) -> Result<VectorField> {
    if args.len() + 1 != spec.arity {
        return Err(Error::Arity { expected: spec.arity - 1, got: args.len() });
    }
    let mut full = Vec::with_capacity(spec.arity);
    full.push(Supernumber::zero(&spec.space));
    full.extend_from_slice(args);
    let mut components = Vec::with_capacity(spec.space.dim());
    for i in 0..spec.space.dim() {
        full[0] = Supernumber::coordinate_at(&spec.space, i);
        components.push(eval_bracket(spec, &full)?);
    }
    Ok(VectorField { space: spec.space.clone(), components })
}

/// `Σ_i (∂_r f/∂z_i)·X^i`.
pub fn apply_field(x: &VectorField, f: &Supernumber) -> Result<Supernumber> {
    if !same_space(&x.space, f.space()) {
        return Err(Error::SpaceMismatch);
    }
    let mut acc = Supernumber::zero(&x.space);
    for (i, comp) in x.components.iter().enumerate() {
        if comp.is_zero() {
            continue;
        }
        let d = f.deriv_at(i, Side::Right);
        if !d.is_zero() {
            acc = &acc + &(&d * comp);
        }
    }
    Ok(acc)
}

/// Composition order for the graded commutator of two fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `[X,Y]^i = X(Y^i) - (-1)^{|X||Y|} Y(X^i)`
    Ab,
    /// `[X,Y]^i = Y(X^i) - (-1)^{|X||Y|} X(Y^i)`, i.e. apply X first.
    Ba,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ab" => Ok(Convention::Ab),
            "ba" => Ok(Convention::Ba),
            other => Err(Error::Precondition(format!("unknown convention `{other}`"))),
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::Ab => "ab",
            Convention::Ba => "ba",
        })
    }
}

pub fn field_commutator(x: &VectorField, y: &VectorField, convention: Convention) -> Result<VectorField> {
    if !same_space(&x.space, &y.space) {
        return Err(Error::SpaceMismatch);
    }
    let px = x.parity().is_homogeneous().then(|| x.parity()).ok_or(Error::MixedParity(0))?;
    let py = y.parity().is_homogeneous().then(|| y.parity()).ok_or(Error::MixedParity(1))?;
    let bit = |p: Parity| u32::from(p == Parity::Odd);
    let koszul = sign(bit(px) * bit(py));
    let (first, second) = match convention {
        Convention::Ab => (x, y),
        Convention::Ba => (y, x),
    };
    let mut components = Vec::with_capacity(x.space.dim());
    for (xc, yc) in x.components.iter().zip(&y.components) {
        let (fc, sc) = match convention {
            Convention::Ab => (yc, xc),
            Convention::Ba => (xc, yc),
        };
        let a = apply_field(first, fc)?;
        let b = apply_field(second, sc)?;
        components.push(&a - &b.scale(&koszul));
    }
    Ok(VectorField { space: x.space.clone(), components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::spec::builtin;
    use crate::graded::{int, parse};

    fn field(spec: &BracketSpec, args: &[&str]) -> VectorField {
        let a: Vec<_> = args.iter().map(|s| parse(s, &spec.space).unwrap()).collect();
        nh_field(spec, &a).unwrap()
    }

    #[test]
    fn odd_r21_coordinate_fields() {
        let spec = builtin("odd_r21").unwrap();
        let x = field(&spec, &["x2", "th"]);
        let consts: Vec<_> = x.components.iter().map(|c| c.as_constant().unwrap()).collect();
        assert_eq!(consts, vec![int(1), int(0), int(0)]);
        let y = field(&spec, &["x1", "th"]);
        let consts: Vec<_> = y.components.iter().map(|c| c.as_constant().unwrap()).collect();
        assert_eq!(consts, vec![int(0), int(-1), int(0)]);
        assert!(field(&spec, &["1", "th"]).is_zero());
    }

    #[test]
    fn field_action() {
        let spec = builtin("odd_r21").unwrap();
        let x = field(&spec, &["x2", "th"]);
        let x1 = parse("x1", &spec.space).unwrap();
        assert_eq!(apply_field(&x, &x1).unwrap().as_constant(), Some(int(1)));
        assert!(apply_field(&x, &parse("7", &spec.space).unwrap()).unwrap().is_zero());
        assert!(apply_field(&VectorField::zero(&spec.space), &x1).unwrap().is_zero());
    }

    #[test]
    fn commutator_trivial_cases() {
        let spec = builtin("even_r12").unwrap();
        let x = field(&spec, &["x^2", "x*th1*th2"]);
        assert_eq!(x.parity(), Parity::Even);
        for c in [Convention::Ab, Convention::Ba] {
            assert!(field_commutator(&x, &x, c).unwrap().is_zero());
            let k = field(&spec, &["2", "3"]);
            assert!(field_commutator(&k, &k, c).unwrap().is_zero());
        }
    }

    #[test]
    fn field_degree_is_epsilon_plus_argument_parities() {
        let spec = builtin("odd_r21").unwrap();
        assert_eq!(field(&spec, &["x2", "th"]).parity(), Parity::Even);
        assert_eq!(field(&spec, &["x2^2", "x1"]).parity(), Parity::Odd);
    }

    #[test]
    fn arity_error() {
        let spec = builtin("odd_r21").unwrap();
        let x1 = parse("x1", &spec.space).unwrap();
        assert_eq!(nh_field(&spec, &[x1]), Err(Error::Arity { expected: 2, got: 1 }));
    }
}

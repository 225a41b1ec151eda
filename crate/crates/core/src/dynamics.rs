//! Nambu-Hamilton time evolution `df/dt = {f, h₁, …, h_{n−1}}` as exact
//! truncated Taylor series in t.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::bracket::{eval_bracket, BracketSpec};
use crate::error::{Error, Result};
use crate::graded::{rat, same_space, Supernumber};

#[derive(Debug, Clone)]
pub struct NHSystem {
    pub spec: BracketSpec,
    pub hamiltonians: Vec<Supernumber>,
}

impl NHSystem {
    pub fn new(spec: BracketSpec, hamiltonians: Vec<Supernumber>) -> Result<Self> {
        if hamiltonians.len() + 1 != spec.arity {
            return Err(Error::Arity { expected: spec.arity - 1, got: hamiltonians.len() });
        }
        if hamiltonians.iter().any(|h| !same_space(h.space(), &spec.space)) {
            return Err(Error::SpaceMismatch);
        }
        Ok(NHSystem { spec, hamiltonians })
    }

    /// `{f, h₁, …, h_{n−1}}`
    pub fn eom_rhs(&self, f: &Supernumber) -> Result<Supernumber> {
        let mut args = Vec::with_capacity(self.spec.arity);
        args.push(f.clone());
        args.extend(self.hamiltonians.iter().cloned());
        eval_bracket(&self.spec, &args)
    }
}

pub const DEFAULT_ORDER: usize = 8;
pub const DEFAULT_DEGREE_CAP: u32 = 32;

/// Truncated series `Σ_k c_k t^k` for every coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSeries {
    pub names: Vec<String>,
    pub coefficients: Vec<Vec<Supernumber>>,
}

impl FlowSeries {
    pub fn order(&self) -> usize {
        self.coefficients.first().map_or(0, |c| c.len() - 1)
    }

    pub fn series(&self, name: &str) -> Option<&[Supernumber]> {
        self.names.iter().position(|n| n == name).map(|i| self.coefficients[i].as_slice())
    }

    /// Series of `f(z(t))`, obtained by substituting the coordinate series
    /// into `f` and truncating at the same order.
    pub fn compose(&self, f: &Supernumber) -> Result<Vec<Supernumber>> {
        let space = f.space();
        let k = self.order();
        let one = {
            let mut s = vec![Supernumber::zero(space); k + 1];
            s[0] = Supernumber::one(space);
            s
        };
        let mut out = vec![Supernumber::zero(space); k + 1];
        for (mono, c) in f.terms() {
            let mut acc = one.clone();
            for (b, &e) in mono.exps().iter().enumerate() {
                let idx = space.index_of(space.boson_name(b)).expect("boson exists");
                for _ in 0..e {
                    acc = series_mul(&acc, &self.coefficients[idx]);
                }
            }
            for f_idx in mono.odd_indices() {
                let idx = space.index_of(space.fermion_name(f_idx)).expect("fermion exists");
                acc = series_mul(&acc, &self.coefficients[idx]);
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o = &*o + &a.scale(c);
            }
        }
        Ok(out)
    }
}

fn series_mul(a: &[Supernumber], b: &[Supernumber]) -> Vec<Supernumber> {
    let space = a[0].space();
    (0..a.len())
        .map(|m| {
            (0..=m).fold(Supernumber::zero(space), |acc, i| {
                if a[i].is_zero() || b[m - i].is_zero() {
                    acc
                } else {
                    &acc + &(&a[i] * &b[m - i])
                }
            })
        })
        .collect()
}

impl Serialize for FlowSeries {
    /// `{coordinate: [c₀, c₁, …]}` in coordinate order.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.names.len()))?;
        for (n, cs) in self.names.iter().zip(&self.coefficients) {
            let strs: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
            map.serialize_entry(n, &strs)?;
        }
        map.end()
    }
}

/// Lie series of `f`: `c₀ = f`, `c_{k+1} = {c_k, h…}/(k+1)`.
pub fn lie_series(sys: &NHSystem, f: &Supernumber, order: usize, degree_cap: u32) -> Result<Vec<Supernumber>> {
    let mut cs = vec![f.clone()];
    for k in 0..order {
        let next = sys.eom_rhs(&cs[k])?.scale(&rat(1, k as i64 + 1));
        let degree = next.max_bosonic_degree();
        if degree > degree_cap {
            return Err(Error::DegreeCap { degree, cap: degree_cap });
        }
        cs.push(next);
    }
    Ok(cs)
}

/// Coordinate flow up to `t^order`.
pub fn evolve(sys: &NHSystem, order: usize, degree_cap: u32) -> Result<FlowSeries> {
    if order == 0 {
        return Err(Error::Precondition("order must be at least 1".into()));
    }
    let space = &sys.spec.space;
    let mut names = Vec::new();
    let mut coefficients = Vec::new();
    for (i, c) in space.coords().iter().enumerate() {
        names.push(c.name.clone());
        coefficients.push(lie_series(sys, &Supernumber::coordinate_at(space, i), order, degree_cap)?);
    }
    Ok(FlowSeries { names, coefficients })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conservation {
    pub quantity: String,
    pub rate: String,
    pub conserved: bool,
}

/// Rate `{q, h₁, …}` of a quantity under the flow.
pub fn conserved_check(sys: &NHSystem, quantity: &Supernumber) -> Result<Conservation> {
    let rate = sys.eom_rhs(quantity)?;
    Ok(Conservation { quantity: quantity.to_string(), conserved: rate.is_zero(), rate: rate.to_string() })
}

/// The free system on the odd ternary bracket: `h₁ = x2²/2`, `h₂ = th`.
pub fn free_system() -> NHSystem {
    let spec = crate::bracket::builtin("odd_r21").expect("builtin");
    let h1 = crate::graded::parse("x2^2/2", &spec.space).expect("valid");
    let h2 = Supernumber::coordinate(&spec.space, "th").expect("valid");
    NHSystem::new(spec, vec![h1, h2]).expect("arity matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::parse;

    #[test]
    fn free_equations_of_motion() {
        let sys = free_system();
        let s = &sys.spec.space;
        let c = |n| Supernumber::coordinate(s, n).unwrap();
        assert_eq!(sys.eom_rhs(&c("x1")).unwrap(), c("x2"));
        assert!(sys.eom_rhs(&c("x2")).unwrap().is_zero());
        assert!(sys.eom_rhs(&c("th")).unwrap().is_zero());
    }

    #[test]
    fn free_flow_is_linear() {
        let sys = free_system();
        let s = sys.spec.space.clone();
        let flow = evolve(&sys, 3, DEFAULT_DEGREE_CAP).unwrap();
        let p = |t: &str| parse(t, &s).unwrap();
        let z = Supernumber::zero(&s);
        assert_eq!(flow.series("x1").unwrap(), &[p("x1"), p("x2"), z.clone(), z.clone()]);
        assert_eq!(flow.series("x2").unwrap(), &[p("x2"), z.clone(), z.clone(), z.clone()]);
        assert_eq!(flow.series("th").unwrap(), &[p("th"), z.clone(), z.clone(), z]);
    }

    #[test]
    fn zero_hamiltonians_give_identity_flow() {
        let spec = crate::bracket::builtin("odd_r21").unwrap();
        let z = Supernumber::zero(&spec.space);
        let sys = NHSystem::new(spec, vec![z.clone(), z]).unwrap();
        let flow = evolve(&sys, 4, DEFAULT_DEGREE_CAP).unwrap();
        for (i, cs) in flow.coefficients.iter().enumerate() {
            assert_eq!(cs[0], Supernumber::coordinate_at(&sys.spec.space, i));
            assert!(cs[1..].iter().all(Supernumber::is_zero));
        }
    }

    #[test]
    fn conservation() {
        let sys = free_system();
        for h in sys.hamiltonians.clone() {
            assert!(conserved_check(&sys, &h).unwrap().conserved);
        }
        let x1 = Supernumber::coordinate(&sys.spec.space, "x1").unwrap();
        let r = conserved_check(&sys, &x1).unwrap();
        assert!(!r.conserved);
        assert_eq!(r.rate, "x2");
    }

    #[test]
    fn truncation_consistency_and_composition() {
        let spec = crate::bracket::builtin("odd_r21").unwrap();
        let s = spec.space.clone();
        let sys = NHSystem::new(spec, vec![parse("x1*x2 + x2^2", &s).unwrap(), parse("th*x1", &s).unwrap()]).unwrap();
        let k4 = evolve(&sys, 4, DEFAULT_DEGREE_CAP).unwrap();
        let k5 = evolve(&sys, 5, DEFAULT_DEGREE_CAP).unwrap();
        for (a, b) in k4.coefficients.iter().zip(&k5.coefficients) {
            assert_eq!(a[..], b[..5]);
        }
        let f = parse("x1*th", &s).unwrap();
        assert_eq!(k4.compose(&f).unwrap(), lie_series(&sys, &f, 4, DEFAULT_DEGREE_CAP).unwrap());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let spec = crate::bracket::builtin("odd_r21").unwrap();
        let s = spec.space.clone();
        let sys = NHSystem::new(spec, vec![parse("x1^3 + x2^3", &s).unwrap(), parse("th", &s).unwrap()]).unwrap();
        assert!(matches!(evolve(&sys, 8, 4), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn arity_is_checked() {
        let spec = crate::bracket::builtin("odd_r21").unwrap();
        let z = Supernumber::zero(&spec.space);
        assert!(matches!(NHSystem::new(spec, vec![z]), Err(Error::Arity { .. })));
    }
}

use crate::error::{Error, Result};
use crate::graded::{same_space, sign, Parity, Supernumber};

use super::spec::BracketSpec;

fn check_args(spec: &BracketSpec, args: &[Supernumber]) -> Result<()> {
    if args.len() != spec.arity {
        return Err(Error::Arity { expected: spec.arity, got: args.len() });
    }
    if args.iter().any(|a| !same_space(a.space(), &spec.space)) {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// Bracket on homogeneous arguments with known parities.
fn eval_homogeneous(spec: &BracketSpec, args: &[&Supernumber], parities: &[u8]) -> Supernumber {
    let mut acc = Supernumber::zero(&spec.space);
    'terms: for term in &spec.terms {
        let mut prod: Option<Supernumber> = None;
        for (slot, d) in term.derivs.iter().enumerate() {
            let factor = args[slot].deriv_at(d.coord, d.side);
            if factor.is_zero() {
                continue 'terms;
            }
            prod = Some(match prod {
                None => factor,
                Some(p) => &p * &factor,
            });
            if prod.as_ref().is_some_and(Supernumber::is_zero) {
                continue 'terms;
            }
        }
        let Some(prod) = prod else { continue };
        let c = &term.coefficient * sign(term.sign.exponent(parities));
        acc = &acc + &prod.scale(&c);
    }
    acc
}

/// Evaluates the bracket, extending multilinearly over the even and odd
/// parts of each argument.
pub fn eval_bracket(spec: &BracketSpec, args: &[Supernumber]) -> Result<Supernumber> {
    check_args(spec, args)?;
    let parts: Vec<[Supernumber; 2]> = args
        .iter()
        .map(|a| {
            let (e, o) = a.parity_decompose();
            [e, o]
        })
        .collect();
    let mut acc = Supernumber::zero(&spec.space);
    let n = spec.arity;
    let mut chosen: Vec<&Supernumber> = Vec::with_capacity(n);
    let mut parities = vec![0u8; n];
    'patterns: for pattern in 0u32..(1 << n) {
        chosen.clear();
        for (slot, p) in parts.iter().enumerate() {
            let bit = ((pattern >> slot) & 1) as u8;
            if p[bit as usize].is_zero() {
                continue 'patterns;
            }
            parities[slot] = bit;
            chosen.push(&p[bit as usize]);
        }
        acc = &acc + &eval_homogeneous(spec, &chosen, &parities);
    }
    Ok(acc)
}

/// Degree of the bracket value: `(ε + Σ|f_i|) mod 2`.
pub fn bracket_parity(spec: &BracketSpec, args: &[Supernumber]) -> Result<Parity> {
    check_args(spec, args)?;
    let mut total = spec.epsilon as u32;
    for (i, a) in args.iter().enumerate() {
        total += a.parity_bit().ok_or(Error::MixedParity(i))? as u32;
    }
    Ok(Parity::from_bit((total % 2) as u8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::spec::builtin;
    use crate::graded::{int, parse};

    fn eval(name: &str, args: &[&str]) -> Supernumber {
        let spec = builtin(name).unwrap();
        let args: Vec<_> = args.iter().map(|a| parse(a, &spec.space).unwrap()).collect();
        eval_bracket(&spec, &args).unwrap()
    }

    #[test]
    fn odd_r21_coordinate_values() {
        assert_eq!(eval("odd_r21", &["x1", "x2", "th"]).as_constant(), Some(int(1)));
        assert_eq!(eval("odd_r21", &["x1", "th", "x2"]).as_constant(), Some(int(-1)));
        assert!(eval("odd_r21", &["x1", "x2", "1"]).is_zero());
    }

    #[test]
    fn even_r12_and_antibracket_values() {
        assert_eq!(eval("even_r12", &["x", "th1", "th2"]).as_constant(), Some(int(1)));
        assert_eq!(eval("antibracket_r11", &["x", "xi"]).as_constant(), Some(int(1)));
    }

    #[test]
    fn parity_of_values() {
        let spec = builtin("odd_r21").unwrap();
        let p = |a: &[&str]| {
            let v: Vec<_> = a.iter().map(|s| parse(s, &spec.space).unwrap()).collect();
            bracket_parity(&spec, &v)
        };
        assert_eq!(p(&["x1", "x2", "th"]).unwrap(), Parity::Even);
        assert_eq!(p(&["x1", "x2", "x1"]).unwrap(), Parity::Odd);
        assert_eq!(p(&["x1", "x2+th", "x1"]), Err(Error::MixedParity(1)));
        let even = builtin("even_r12").unwrap();
        let v: Vec<_> = ["x", "th1", "th2"].iter().map(|s| parse(s, &even.space).unwrap()).collect();
        assert_eq!(bracket_parity(&even, &v).unwrap(), Parity::Even);
    }

    #[test]
    fn arity_and_space_errors() {
        let spec = builtin("odd_r21").unwrap();
        let x1 = parse("x1", &spec.space).unwrap();
        assert_eq!(
            eval_bracket(&spec, &[x1.clone(), x1.clone()]),
            Err(Error::Arity { expected: 3, got: 2 })
        );
        let other = builtin("even_r12").unwrap();
        let x = parse("x", &other.space).unwrap();
        assert_eq!(eval_bracket(&spec, &[x1.clone(), x1, x]), Err(Error::SpaceMismatch));
    }
}

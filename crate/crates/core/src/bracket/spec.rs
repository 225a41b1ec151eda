use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{format_rational, int, parse_rational, GradedSpace, Rational, Side};

/// Affine sign exponent: `(-1)^(constant + Σ slots[i]·|f_i|)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignRule {
    #[serde(rename = "const")]
    pub constant: u8,
    #[serde(rename = "slots")]
    pub slot_coeffs: Vec<u8>,
}

impl SignRule {
    pub fn plus(arity: usize) -> Self {
        SignRule { constant: 0, slot_coeffs: vec![0; arity] }
    }

    pub fn exponent(&self, parities: &[u8]) -> u32 {
        let s: u32 = self
            .slot_coeffs
            .iter()
            .zip(parities)
            .map(|(&c, &p)| (c as u32) * (p as u32))
            .sum();
        (self.constant as u32 + s) % 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotDeriv {
    /// Coordinate index in the space.
    pub coord: usize,
    pub side: Side,
}

/// One summand: `(-1)^sign · coefficient · (D₁f₁)(D₂f₂)⋯(D_nf_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTerm {
    pub coefficient: Rational,
    pub derivs: Vec<SlotDeriv>,
    pub sign: SignRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketSpec {
    pub name: String,
    pub space: Arc<GradedSpace>,
    pub arity: usize,
    pub epsilon: u8,
    pub terms: Vec<BracketTerm>,
}

impl BracketSpec {
    /// Validates arities, coordinate references and the declared degree.
    ///
    /// A term shifts parity by the number of fermionic derivatives it takes;
    /// every term must shift by `epsilon`.
    pub fn new(
        name: impl Into<String>,
        space: Arc<GradedSpace>,
        arity: usize,
        epsilon: u8,
        terms: Vec<BracketTerm>,
    ) -> Result<Self> {
        let name = name.into();
        if arity < 2 {
            return Err(Error::InvalidSpec(format!("arity must be at least 2, got {arity}")));
        }
        if epsilon > 1 {
            return Err(Error::InvalidSpec(format!("epsilon must be 0 or 1, got {epsilon}")));
        }
        for (t, term) in terms.iter().enumerate() {
            if term.derivs.len() != arity {
                return Err(Error::InvalidSpec(format!(
                    "term {t} has {} derivatives for arity {arity}",
                    term.derivs.len()
                )));
            }
            if term.sign.slot_coeffs.len() != arity {
                return Err(Error::InvalidSpec(format!(
                    "term {t} sign rule has {} slot coefficients for arity {arity}",
                    term.sign.slot_coeffs.len()
                )));
            }
            if term.sign.constant > 1 || term.sign.slot_coeffs.iter().any(|&c| c > 1) {
                return Err(Error::InvalidSpec(format!("term {t} sign rule entries must be 0 or 1")));
            }
            if let Some(d) = term.derivs.iter().find(|d| d.coord >= space.dim()) {
                return Err(Error::InvalidSpec(format!("term {t} references coordinate #{}", d.coord)));
            }
            let shift: u32 = term.derivs.iter().map(|d| space.coords()[d.coord].kind.parity() as u32).sum();
            if shift % 2 != epsilon as u32 {
                return Err(Error::InvalidSpec(format!(
                    "term {t} shifts parity by {} but epsilon is {epsilon}",
                    shift % 2
                )));
            }
        }
        Ok(BracketSpec { name, space, arity, epsilon, terms })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpecDocument = serde_json::from_str(text)?;
        doc.into_spec()
    }

    pub fn to_document(&self) -> SpecDocument {
        SpecDocument {
            name: self.name.clone(),
            space: self.space.to_string(),
            arity: self.arity,
            epsilon: self.epsilon,
            terms: self
                .terms
                .iter()
                .map(|t| TermDocument {
                    coeff: format_rational(&t.coefficient),
                    derivs: t
                        .derivs
                        .iter()
                        .map(|d| DerivDocument { coord: self.space.coords()[d.coord].name.clone(), side: d.side })
                        .collect(),
                    sign: t.sign.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("spec serializes")
    }

    /// Copy with the coefficient of term `t` negated.
    pub fn with_flipped_term(&self, t: usize) -> Self {
        let mut out = self.clone();
        out.name = format!("{}#flip{t}", self.name);
        out.terms[t].coefficient = -out.terms[t].coefficient.clone();
        out
    }

    /// The bracket with no terms, identically zero.
    pub fn zero(space: Arc<GradedSpace>, arity: usize, epsilon: u8) -> Self {
        BracketSpec { name: "zero".into(), space, arity, epsilon, terms: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub name: String,
    pub space: String,
    pub arity: usize,
    pub epsilon: u8,
    pub terms: Vec<TermDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub coeff: String,
    pub derivs: Vec<DerivDocument>,
    pub sign: SignRule,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivDocument {
    pub coord: String,
    pub side: Side,
}

impl SpecDocument {
    pub fn into_spec(self) -> Result<BracketSpec> {
        let space: Arc<GradedSpace> = Arc::new(self.space.parse()?);
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, doc) in self.terms.into_iter().enumerate() {
            let coefficient = parse_rational(&doc.coeff)
                .map_err(|_| Error::InvalidSpec(format!("term {t}: bad coefficient `{}`", doc.coeff)))?;
            let derivs = doc
                .derivs
                .iter()
                .map(|d| {
                    space
                        .index_of(&d.coord)
                        .map(|coord| SlotDeriv { coord, side: d.side })
                        .ok_or_else(|| Error::InvalidSpec(format!("term {t}: undeclared coordinate `{}`", d.coord)))
                })
                .collect::<Result<Vec<_>>>()?;
            terms.push(BracketTerm { coefficient, derivs, sign: doc.sign });
        }
        BracketSpec::new(self.name, space, self.arity, self.epsilon, terms)
    }
}

pub const BUILTIN_NAMES: [&str; 3] = ["odd_r21", "even_r12", "antibracket_r11"];

fn term(space: &GradedSpace, coeff: i64, derivs: &[(&str, Side)], constant: u8, slots: &[u8]) -> BracketTerm {
    BracketTerm {
        coefficient: if coeff == 1 { Rational::one() } else { int(coeff) },
        derivs: derivs
            .iter()
            .map(|(n, side)| SlotDeriv { coord: space.index_of(n).expect("builtin coordinate"), side: *side })
            .collect(),
        sign: SignRule { constant, slot_coeffs: slots.to_vec() },
    }
}

/// Built-in brackets:
///
/// * `odd_r21` on ℝ^{2|1} `(x1, x2, th)`, ε = 1:
///   `(-1)^|g| (f_x1 g_θ h_x2 − f_x2 g_θ h_x1) + (f_θ g_x1 h_x2 − f_θ g_x2 h_x1)
///    + (-1)^(|g|+|h|) (f_x2 g_x1 h_θ − f_x1 g_x2 h_θ)`
/// * `even_r12` on ℝ^{1|2} `(x, th1, th2)`, ε = 0:
///   `(-1)^(1+|g|) f_x (g_θ1 h_θ2 + g_θ2 h_θ1)
///    + (-1)^(|g|+|h|) f_θ1 (g_x h_θ2 − (-1)^|h| g_θ2 h_x)
///    + (-1)^(|g|+|h|) f_θ2 (g_x h_θ1 − (-1)^|h| g_θ1 h_x)`
/// * `antibracket_r11` on ℝ^{1|1} `(x, xi)`, ε = 1:
///   `{f, g} = f_x·∂_l g/∂ξ − f_ξ·g_x`
///
/// All fermionic derivatives are right derivatives except the left
/// derivative in the second slot of the antibracket.
pub fn builtin(name: &str) -> Result<BracketSpec> {
    use Side::{Left as L, Right as R};
    match name {
        "odd_r21" => {
            let s: Arc<GradedSpace> = Arc::new("x1:b,x2:b,th:f".parse()?);
            let terms = vec![
                term(&s, 1, &[("x1", L), ("th", R), ("x2", L)], 0, &[0, 1, 0]),
                term(&s, -1, &[("x2", L), ("th", R), ("x1", L)], 0, &[0, 1, 0]),
                term(&s, 1, &[("th", R), ("x1", L), ("x2", L)], 0, &[0, 0, 0]),
                term(&s, -1, &[("th", R), ("x2", L), ("x1", L)], 0, &[0, 0, 0]),
                term(&s, 1, &[("x2", L), ("x1", L), ("th", R)], 0, &[0, 1, 1]),
                term(&s, -1, &[("x1", L), ("x2", L), ("th", R)], 0, &[0, 1, 1]),
            ];
            BracketSpec::new("odd_r21", s, 3, 1, terms)
        }
        "even_r12" => {
            let s: Arc<GradedSpace> = Arc::new("x:b,th1:f,th2:f".parse()?);
            let terms = vec![
                term(&s, 1, &[("x", L), ("th1", R), ("th2", R)], 1, &[0, 1, 0]),
                term(&s, 1, &[("x", L), ("th2", R), ("th1", R)], 1, &[0, 1, 0]),
                term(&s, 1, &[("th1", R), ("x", L), ("th2", R)], 0, &[0, 1, 1]),
                // (-1)^(|g|+|h|) · (-(-1)^|h|) = -(-1)^|g|
                term(&s, -1, &[("th1", R), ("th2", R), ("x", L)], 0, &[0, 1, 0]),
                term(&s, 1, &[("th2", R), ("x", L), ("th1", R)], 0, &[0, 1, 1]),
                term(&s, -1, &[("th2", R), ("th1", R), ("x", L)], 0, &[0, 1, 0]),
            ];
            BracketSpec::new("even_r12", s, 3, 0, terms)
        }
        "antibracket_r11" => {
            let s: Arc<GradedSpace> = Arc::new("x:b,xi:f".parse()?);
            let terms = vec![
                term(&s, 1, &[("x", R), ("xi", L)], 0, &[0, 0]),
                term(&s, -1, &[("xi", R), ("x", L)], 0, &[0, 0]),
            ];
            BracketSpec::new("antibracket_r11", s, 2, 1, terms)
        }
        other => Err(Error::InvalidSpec(format!("unknown builtin bracket `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_have_six_or_two_terms() {
        assert_eq!(builtin("odd_r21").unwrap().terms.len(), 6);
        assert_eq!(builtin("even_r12").unwrap().terms.len(), 6);
        let ab = builtin("antibracket_r11").unwrap();
        assert_eq!((ab.arity, ab.epsilon, ab.terms.len()), (2, 1, 2));
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn json_round_trip() {
        for name in BUILTIN_NAMES {
            let spec = builtin(name).unwrap();
            let back = BracketSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn rejects_inconsistent_epsilon() {
        let mut doc = builtin("odd_r21").unwrap().to_document();
        doc.epsilon = 0;
        let err = doc.into_spec().unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(m) if m.contains("epsilon")));
    }

    #[test]
    fn rejects_schema_violations() {
        let mut doc = builtin("odd_r21").unwrap().to_document();
        doc.terms[0].derivs[0].coord = "y".into();
        assert!(matches!(doc.into_spec(), Err(Error::InvalidSpec(m)) if m.contains("undeclared")));

        let mut doc = builtin("odd_r21").unwrap().to_document();
        doc.terms[2].derivs.pop();
        assert!(matches!(doc.into_spec(), Err(Error::InvalidSpec(m)) if m.contains("derivatives")));

        let mut doc = builtin("odd_r21").unwrap().to_document();
        doc.terms[1].coeff = "0.5".into();
        assert!(doc.into_spec().is_err());

        assert!(matches!(BracketSpec::from_json("{\"name\": 1}"), Err(Error::Json(_))));
        let extra = builtin("odd_r21").unwrap().to_json().replacen("\"name\"", "\"bogus\": 1, \"name\"", 1);
        assert!(BracketSpec::from_json(&extra).is_err());
    }
}

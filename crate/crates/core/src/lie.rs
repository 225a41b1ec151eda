//! Nambu brackets built from a finite-dimensional super Lie algebra and an
//! invariant skew map τ: `{a₁,…,a_n} := [a₁, τ(a₂,…,a_n)]`.
//!
//! Algebras are given by structure constants `[e_i,e_j] = Σ_k c_{ij}^k e_k`,
//! so every check over basis tuples is exhaustive and exact.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{format_rational, parse_rational, random_coefficient, Rational, TestRng};
use crate::laws::{fi_sides, genskew_sides, psum, GradedValue};
use crate::report::{parity_patterns_for, trial_rng, CheckParams, CheckReport, Failure};

/// Coefficient vector over the basis of an algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    coeffs: Vec<Rational>,
}

impl AlgebraElement {
    pub fn zero(dim: usize) -> Self {
        AlgebraElement { coeffs: vec![Rational::zero(); dim] }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut e = Self::zero(dim);
        e.coeffs[i] = Rational::one();
        e
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        AlgebraElement { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    fn add_scaled(&mut self, other: &AlgebraElement, c: &Rational) {
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !y.is_zero() {
                *x += y * c;
            }
        }
    }

    fn support(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

impl GradedValue for AlgebraElement {
    fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }
    fn negated(&self) -> Self {
        self.scale(&-Rational::one())
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.dim())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisElement {
    pub name: String,
    pub parity: u8,
}

/// Finite-dimensional super Lie algebra whose bracket has degree ε,
/// optionally carrying an associative product for the cyclic condition.
#[derive(Debug, Clone, PartialEq)]
pub struct LieSuperAlgebra {
    pub name: String,
    pub basis: Vec<BasisElement>,
    pub epsilon: u8,
    /// `[e_i,e_j]` at `i * dim + j`.
    brackets: Vec<AlgebraElement>,
    products: Option<Vec<AlgebraElement>>,
}

/// Sparse constant `(i, j, k, c)`: the product of `e_i` and `e_j` has `c` on `e_k`.
pub type Triple = (usize, usize, usize, Rational);

impl LieSuperAlgebra {
    pub fn new(
        name: &str,
        basis: Vec<BasisElement>,
        epsilon: u8,
        structure: &[Triple],
        product: Option<&[Triple]>,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidAlgebra(m);
        if basis.is_empty() {
            return Err(bad("empty basis".into()));
        }
        if epsilon > 1 {
            return Err(bad(format!("degree must be 0 or 1, got {epsilon}")));
        }
        let mut seen = HashSet::new();
        for b in &basis {
            if b.parity > 1 {
                return Err(bad(format!("parity of `{}` must be 0 or 1", b.name)));
            }
            if b.name.is_empty() || !seen.insert(b.name.as_str()) {
                return Err(bad(format!("duplicate or empty basis name `{}`", b.name)));
            }
        }
        let dim = basis.len();
        let table = |triples: &[Triple], shift: u8, what: &str| -> Result<Vec<AlgebraElement>> {
            let mut t = vec![AlgebraElement::zero(dim); dim * dim];
            let mut keys = HashSet::new();
            for (i, j, k, c) in triples {
                if *i >= dim || *j >= dim || *k >= dim {
                    return Err(bad(format!("{what} index out of range")));
                }
                if !keys.insert((*i, *j, *k)) {
                    return Err(bad(format!(
                        "{what} constant for ({}, {}, {}) given twice",
                        basis[*i].name, basis[*j].name, basis[*k].name
                    )));
                }
                if c.is_zero() {
                    continue;
                }
                if (basis[*i].parity + basis[*j].parity + shift) % 2 != basis[*k].parity {
                    return Err(bad(format!(
                        "{what} constant ({}, {}, {}) violates the grading",
                        basis[*i].name, basis[*j].name, basis[*k].name
                    )));
                }
                t[i * dim + j].coeffs[*k] = c.clone();
            }
            Ok(t)
        };
        let brackets = table(structure, epsilon, "structure")?;
        let products = product.map(|p| table(p, 0, "product")).transpose()?;
        Ok(LieSuperAlgebra { name: name.to_string(), basis, epsilon, brackets, products })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn has_product(&self) -> bool {
        self.products.is_some()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    pub fn element(&self, name: &str) -> Result<AlgebraElement> {
        let i = self.index_of(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        Ok(AlgebraElement::basis(self.dim(), i))
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        AlgebraElement::basis(self.dim(), i)
    }

    pub fn parity_of(&self, a: &AlgebraElement) -> Option<u8> {
        let mut ps = a.support().map(|(i, _)| self.basis[i].parity);
        let first = ps.next().unwrap_or(0);
        ps.all(|p| p == first).then_some(first)
    }

    fn bilinear(&self, table: &[AlgebraElement], a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        let dim = self.dim();
        let mut out = AlgebraElement::zero(dim);
        for (i, ai) in a.support() {
            for (j, bj) in b.support() {
                out.add_scaled(&table[i * dim + j], &(ai * bj));
            }
        }
        out
    }

    pub fn bracket(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        self.bilinear(&self.brackets, a, b)
    }

    pub fn product(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        let p = self.products.as_ref().ok_or_else(product_required)?;
        Ok(self.bilinear(p, a, b))
    }

    /// `e1 - 1/2*e3`; the zero element prints as `0`.
    pub fn format(&self, a: &AlgebraElement) -> String {
        format_combination(a.support().map(|(i, c)| (self.basis[i].name.as_str(), c)))
    }

    /// Parses a rational combination of basis names such as `2*e1 - e3/2`.
    pub fn parse(&self, text: &str) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(self.dim());
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "0" {
            return Ok(out);
        }
        let syntax = |msg: String| Error::Syntax { pos: 0, msg };
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, ch) in t.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !t[..i].ends_with(['*', '/']) {
                pieces.push(&t[start..i]);
                start = i;
            }
        }
        pieces.push(&t[start..]);
        for piece in pieces {
            let (neg, body) = match piece.as_bytes().first() {
                Some(b'-') => (true, &piece[1..]),
                Some(b'+') => (false, &piece[1..]),
                _ => (false, piece),
            };
            let (coef, name) = match body.split_once('*') {
                Some((c, n)) => (parse_rational(c)?, n.to_string()),
                None => match body.split_once('/') {
                    Some((n, d)) => (parse_rational(&format!("1/{d}"))?, n.to_string()),
                    None => (Rational::one(), body.to_string()),
                },
            };
            let (name, coef) = match name.split_once('/') {
                Some((n, d)) => (n.to_string(), coef / parse_rational(d)?),
                None => (name, coef),
            };
            let i = self.index_of(&name).ok_or_else(|| {
                if name.is_empty() {
                    syntax(format!("empty term in `{text}`"))
                } else {
                    Error::UnknownCoordinate(name.clone())
                }
            })?;
            let c = if neg { -coef } else { coef };
            out.coeffs[i] += c;
        }
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlgebraDocument = serde_json::from_str(text)?;
        doc.into_algebra()
    }

    pub fn to_json(&self) -> String {
        let dim = self.dim();
        let triples = |t: &[AlgebraElement]| {
            let mut out = Vec::new();
            for i in 0..dim {
                for j in 0..dim {
                    for (k, c) in t[i * dim + j].support() {
                        out.push(format!(
                            "{} {} {} {}",
                            self.basis[i].name,
                            self.basis[j].name,
                            self.basis[k].name,
                            format_rational(c)
                        ));
                    }
                }
            }
            out
        };
        let doc = AlgebraDocument {
            name: self.name.clone(),
            epsilon: self.epsilon,
            basis: self.basis.clone(),
            structure: triples(&self.brackets),
            product: self.products.as_deref().map(triples),
        };
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }
}

fn product_required() -> Error {
    Error::Precondition("product structure required".into())
}

fn format_combination<'a>(terms: impl Iterator<Item = (&'a str, &'a Rational)>) -> String {
    let mut s = String::new();
    for (name, c) in terms {
        let neg = c < &Rational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !abs.is_one() {
            s.push_str(&format_rational(&abs));
            s.push('*');
        }
        s.push_str(name);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDocument {
    name: String,
    epsilon: u8,
    basis: Vec<BasisElement>,
    /// `"e1 e2 e3 1"`: `[e1,e2]` has coefficient 1 on `e3`.
    structure: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    product: Option<Vec<String>>,
}

fn parse_line(line: &str, inputs: usize, index: &dyn Fn(&str) -> Result<usize>) -> Result<(Vec<usize>, usize, Rational)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != inputs + 2 {
        return Err(Error::InvalidAlgebra(format!(
            "`{line}`: expected {} basis names and a coefficient",
            inputs + 1
        )));
    }
    let ins = toks[..inputs].iter().map(|t| index(t)).collect::<Result<Vec<_>>>()?;
    Ok((ins, index(toks[inputs])?, parse_rational(toks[inputs + 1])?))
}

impl AlgebraDocument {
    fn into_algebra(self) -> Result<LieSuperAlgebra> {
        let names: Vec<String> = self.basis.iter().map(|b| b.name.clone()).collect();
        let index = |t: &str| {
            names
                .iter()
                .position(|n| n == t)
                .ok_or_else(|| Error::InvalidAlgebra(format!("unknown basis element `{t}`")))
        };
        let triples = |lines: &[String]| -> Result<Vec<Triple>> {
            lines
                .iter()
                .map(|l| parse_line(l, 2, &index).map(|(ins, k, c)| (ins[0], ins[1], k, c)))
                .collect()
        };
        let structure = triples(&self.structure)?;
        let product = self.product.as_deref().map(triples).transpose()?;
        LieSuperAlgebra::new(&self.name, self.basis, self.epsilon, &structure, product.as_deref())
    }
}

/// Degree-0 multilinear map `τ: 𝔤^{⊗k} → 𝔤`, stored on basis tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMap {
    pub name: String,
    pub arity: usize,
    components: BTreeMap<Vec<usize>, AlgebraElement>,
}

impl TauMap {
    pub fn new(alg: &LieSuperAlgebra, name: &str, arity: usize, components: &[(Vec<usize>, usize, Rational)]) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidAlgebra("τ needs at least one argument".into()));
        }
        let dim = alg.dim();
        let mut map: BTreeMap<Vec<usize>, AlgebraElement> = BTreeMap::new();
        let mut keys = HashSet::new();
        for (ins, k, c) in components {
            if ins.len() != arity || ins.iter().chain([k]).any(|&i| i >= dim) {
                return Err(Error::InvalidAlgebra("τ component has the wrong shape".into()));
            }
            if !keys.insert((ins.clone(), *k)) {
                return Err(Error::InvalidAlgebra("τ component given twice".into()));
            }
            if c.is_zero() {
                continue;
            }
            let p: u32 = ins.iter().map(|&i| alg.basis[i].parity as u32).sum();
            if p % 2 != alg.basis[*k].parity as u32 {
                return Err(Error::InvalidAlgebra("τ must have degree 0".into()));
            }
            map.entry(ins.clone()).or_insert_with(|| AlgebraElement::zero(dim)).coeffs[*k] = c.clone();
        }
        Ok(TauMap { name: name.to_string(), arity, components: map })
    }

    /// `τ(a,b) = [a,b]`; requires a degree-0 bracket.
    pub fn lie_bracket(alg: &LieSuperAlgebra) -> Result<Self> {
        if alg.epsilon != 0 {
            return Err(Error::InvalidAlgebra("the bracket of an odd algebra is not degree 0".into()));
        }
        let dim = alg.dim();
        let mut comps = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                for (k, c) in alg.brackets[i * dim + j].support() {
                    comps.push((vec![i, j], k, c.clone()));
                }
            }
        }
        Self::new(alg, "bracket", 2, &comps)
    }

    pub fn identity(alg: &LieSuperAlgebra) -> Self {
        let comps: Vec<_> = (0..alg.dim()).map(|i| (vec![i], i, Rational::one())).collect();
        Self::new(alg, "identity", 1, &comps).expect("identity is degree 0")
    }

    pub fn eval(&self, alg: &LieSuperAlgebra, args: &[AlgebraElement]) -> Result<AlgebraElement> {
        if args.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: args.len() });
        }
        let mut out = AlgebraElement::zero(alg.dim());
        for (key, value) in &self.components {
            let mut c = Rational::one();
            for (a, &i) in args.iter().zip(key) {
                c *= &a.coeffs[i];
                if c.is_zero() {
                    break;
                }
            }
            if !c.is_zero() {
                out.add_scaled(value, &c);
            }
        }
        Ok(out)
    }

    pub fn from_json(alg: &LieSuperAlgebra, text: &str) -> Result<Self> {
        let doc: TauDocument = serde_json::from_str(text)?;
        let index = |t: &str| {
            alg.index_of(t)
                .ok_or_else(|| Error::InvalidAlgebra(format!("unknown basis element `{t}`")))
        };
        let comps = doc
            .components
            .iter()
            .map(|l| parse_line(l, doc.arity, &index))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alg, &doc.name, doc.arity, &comps)
    }

    pub fn to_json(&self, alg: &LieSuperAlgebra) -> String {
        let mut lines = Vec::new();
        for (key, value) in &self.components {
            for (k, c) in value.support() {
                let ins: Vec<&str> = key.iter().map(|&i| alg.basis[i].name.as_str()).collect();
                lines.push(format!("{} {} {}", ins.join(" "), alg.basis[k].name, format_rational(c)));
            }
        }
        let doc = TauDocument { name: self.name.clone(), arity: self.arity, components: lines };
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TauDocument {
    name: String,
    arity: usize,
    /// `"e2 e3 e1 1"`: `τ(e2,e3)` has coefficient 1 on `e1`.
    components: Vec<String>,
}

/// `{a₁,…,a_n} := [a₁, τ(a₂,…,a_n)]`
#[derive(Debug, Clone)]
pub struct AlgebraBracket<'a> {
    pub alg: &'a LieSuperAlgebra,
    pub tau: &'a TauMap,
}

impl AlgebraBracket<'_> {
    pub fn arity(&self) -> usize {
        self.tau.arity + 1
    }

    pub fn eval(&self, args: &[AlgebraElement]) -> Result<AlgebraElement> {
        if args.len() != self.arity() {
            return Err(Error::Arity { expected: self.arity(), got: args.len() });
        }
        Ok(self.alg.bracket(&args[0], &self.tau.eval(self.alg, &args[1..])?))
    }
}

pub fn build_bracket<'a>(alg: &'a LieSuperAlgebra, tau: &'a TauMap) -> AlgebraBracket<'a> {
    AlgebraBracket { alg, tau }
}

/// Every tuple of basis indices of length `n`, in lexicographic order.
fn basis_tuples(dim: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.checked_pow(n as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut m| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = m % dim;
            m /= dim;
        }
        t
    })
}

struct Recorder<'a> {
    alg: &'a LieSuperAlgebra,
    report: CheckReport,
}

impl<'a> Recorder<'a> {
    fn new(alg: &'a LieSuperAlgebra, suite: &str, spec: &str, params: CheckParams) -> Self {
        Recorder { alg, report: CheckReport::new(suite, spec, params) }
    }

    fn compare(&mut self, args: &[AlgebraElement], case: &str, lhs: &AlgebraElement, rhs: &AlgebraElement) -> bool {
        if lhs == rhs {
            return true;
        }
        let alg = self.alg;
        self.report.push_failure(Failure {
            args: args.iter().map(|a| alg.format(a)).collect(),
            case: Some(case.to_string()),
            lhs: alg.format(lhs),
            rhs: alg.format(rhs),
        });
        false
    }
}

fn basis_args(alg: &LieSuperAlgebra, t: &[usize]) -> (Vec<AlgebraElement>, Vec<u8>) {
    (t.iter().map(|&i| alg.basis_element(i)).collect(), t.iter().map(|&i| alg.basis[i].parity).collect())
}

/// Graded antisymmetry `[a,b] = -(-1)^{(|a|+ε)(|b|+ε)}[b,a]` and the graded
/// Jacobi identity `[a,[b,c]] = [[a,b],c] + (-1)^{(|a|+ε)(|b|+ε)}[b,[a,c]]`
/// on all basis pairs and triples.
pub fn validate_algebra(alg: &LieSuperAlgebra) -> CheckReport {
    let mut rec = Recorder::new(alg, "validate_algebra", &alg.name, CheckParams::default());
    let eps = alg.epsilon as u32;
    let shifted = |p: u8| p as u32 + eps;
    for t in basis_tuples(alg.dim(), 2) {
        let (a, p) = basis_args(alg, &t);
        rec.report.trials += 1;
        let lhs = alg.bracket(&a[0], &a[1]);
        let rhs = alg.bracket(&a[1], &a[0]).signed(1 + shifted(p[0]) * shifted(p[1]));
        rec.compare(&a, "antisymmetry", &lhs, &rhs);
    }
    for t in basis_tuples(alg.dim(), 3) {
        let (a, p) = basis_args(alg, &t);
        rec.report.trials += 1;
        let lhs = alg.bracket(&a[0], &alg.bracket(&a[1], &a[2]));
        let rhs = alg.bracket(&alg.bracket(&a[0], &a[1]), &a[2]).plus(
            &alg.bracket(&a[1], &alg.bracket(&a[0], &a[2])).signed(shifted(p[0]) * shifted(p[1])),
        );
        rec.compare(&a, "jacobi", &lhs, &rhs);
    }
    rec.report
}

/// Which Koszul exponent multiplies the i-th summand of the invariance
/// condition `[a,τ(b₁…b_k)] = Σ_i (±) τ(b₁,…,[a,b_i],…,b_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvarianceReading {
    /// `(|a|+ε) Σ_{j>i} |b_j|`
    After,
    /// `(|a|+ε) Σ_{j<i} |b_j|`
    Before,
}

impl InvarianceReading {
    pub fn label(self) -> &'static str {
        match self {
            InvarianceReading::After => "after",
            InvarianceReading::Before => "before",
        }
    }
}

impl std::str::FromStr for InvarianceReading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "after" => Ok(InvarianceReading::After),
            "before" => Ok(InvarianceReading::Before),
            _ => Err(Error::Precondition(format!("unknown invariance reading `{s}` (after|before)"))),
        }
    }
}

fn invariance_sides(
    alg: &LieSuperAlgebra,
    tau: &TauMap,
    a: &AlgebraElement,
    pa: u8,
    b: &[AlgebraElement],
    pb: &[u8],
    reading: InvarianceReading,
) -> Result<(AlgebraElement, AlgebraElement)> {
    let lhs = alg.bracket(a, &tau.eval(alg, b)?);
    let mut rhs = AlgebraElement::zero(alg.dim());
    let shift = pa as u32 + alg.epsilon as u32;
    for i in 0..b.len() {
        let mut v = b.to_vec();
        v[i] = alg.bracket(a, &b[i]);
        let others = match reading {
            InvarianceReading::After => psum(&pb[i + 1..]),
            InvarianceReading::Before => psum(&pb[..i]),
        };
        rhs = rhs.plus(&tau.eval(alg, &v)?.signed(shift * others));
    }
    Ok((lhs, rhs))
}

/// Skew-symmetry of τ and the invariance condition on all basis tuples,
/// with the exponent `(|a|+ε) Σ_{j>i}|b_j|` inside the sum.
///
/// The `Σ_{j<i}` variant is also evaluated; `diagnostics` records whether
/// each reading held and flags inputs where only the `Σ_{j<i}` one does.
pub fn validate_tau(alg: &LieSuperAlgebra, tau: &TauMap) -> Result<CheckReport> {
    validate_tau_with(alg, tau, InvarianceReading::After)
}

/// As [`validate_tau`], asserting the given reading.
pub fn validate_tau_with(alg: &LieSuperAlgebra, tau: &TauMap, reading: InvarianceReading) -> Result<CheckReport> {
    let mut rec = Recorder::new(alg, "validate_tau", &format!("{} / {}", alg.name, tau.name), CheckParams::default());
    rec.report.note("reading", reading.label());
    let k = tau.arity;
    for t in basis_tuples(alg.dim(), k) {
        let (b, p) = basis_args(alg, &t);
        rec.report.trials += 1;
        let lhs = tau.eval(alg, &b)?;
        for i in 0..k.saturating_sub(1) {
            let mut sw = b.clone();
            sw.swap(i, i + 1);
            let rhs = tau.eval(alg, &sw)?.signed(1 + p[i] as u32 * p[i + 1] as u32);
            rec.compare(&b, &format!("skew slots {},{}", i + 1, i + 2), &lhs, &rhs);
        }
    }
    let mut held = [true, true];
    for t in basis_tuples(alg.dim(), k + 1) {
        let (all, p) = basis_args(alg, &t);
        rec.report.trials += 1;
        for (slot, r) in [InvarianceReading::After, InvarianceReading::Before].into_iter().enumerate() {
            let (lhs, rhs) = invariance_sides(alg, tau, &all[0], p[0], &all[1..], &p[1..], r)?;
            held[slot] &= if r == reading {
                rec.compare(&all, "invariance", &lhs, &rhs)
            } else {
                lhs == rhs
            };
        }
    }
    rec.report.note("invariance_after_index_holds", held[0]);
    rec.report.note("invariance_before_index_holds", held[1]);
    rec.report.note("only_before_index_reading_holds", held[1] && !held[0]);
    Ok(rec.report)
}

/// Random homogeneous element: each basis vector of the requested parity
/// is kept with probability 1/2 (at least one), coefficients as for
/// polynomial test inputs.
pub fn random_element(alg: &LieSuperAlgebra, parity: u8, rng: &mut TestRng) -> Option<AlgebraElement> {
    let idx: Vec<usize> = (0..alg.dim()).filter(|&i| alg.basis[i].parity == parity).collect();
    if idx.is_empty() {
        return None;
    }
    let forced = idx[rng.gen_range(0..idx.len())];
    let mut out = AlgebraElement::zero(alg.dim());
    for &i in &idx {
        if i == forced || rng.gen_bool(0.5) {
            out.coeffs[i] = random_coefficient(rng);
        }
    }
    Some(out)
}

/// Basis tuples beyond this count are sampled rather than enumerated.
pub const EXHAUSTIVE_LIMIT: usize = 200_000;

/// Skew-symmetry in slots 2..n and the fundamental identity for the built
/// bracket, on every basis tuple and on random homogeneous combinations.
///
/// Requires `validate_algebra` and `validate_tau` to pass. With a product
/// and n = 3, the exchange identity is measured as a diagnostic; so is
/// symmetry under swapping the first two slots.
pub fn check_theorem1(alg: &LieSuperAlgebra, tau: &TauMap, params: &CheckParams) -> Result<CheckReport> {
    check_theorem1_with(alg, tau, params, InvarianceReading::After)
}

/// As [`check_theorem1`], with τ validated under the given reading.
pub fn check_theorem1_with(
    alg: &LieSuperAlgebra,
    tau: &TauMap,
    params: &CheckParams,
    reading: InvarianceReading,
) -> Result<CheckReport> {
    if params.samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    let va = validate_algebra(alg);
    if !va.passed() {
        return Err(Error::Precondition(format!("`{}` is not a super Lie algebra", alg.name)));
    }
    if !validate_tau_with(alg, tau, reading)?.passed() {
        return Err(Error::Precondition(format!("`{}` is not an invariant skew map", tau.name)));
    }
    let br = build_bracket(alg, tau);
    let n = br.arity();
    let eps = alg.epsilon;
    let bracket = |x: &[AlgebraElement]| br.eval(x).expect("arity checked");
    let mut rec = Recorder::new(alg, "theorem1", &format!("{} / {}", alg.name, tau.name), *params);
    let mut first_swap = (0usize, 0usize);
    let mut exchange = (0usize, 0usize);

    let mut run = |rec: &mut Recorder, a: &[AlgebraElement], p: &[u8]| {
        rec.report.trials += 1;
        let head = &a[..n];
        for i in 1..n - 1 {
            let mut sw = head.to_vec();
            sw.swap(i, i + 1);
            let rhs = bracket(&sw).signed(1 + p[i] as u32 * p[i + 1] as u32);
            rec.compare(head, &format!("skew slots {},{}", i + 1, i + 2), &bracket(head), &rhs);
        }
        let mut sw = head.to_vec();
        sw.swap(0, 1);
        first_swap.1 += 1;
        first_swap.0 += usize::from(bracket(head) == bracket(&sw).signed(1 + p[0] as u32 * p[1] as u32));
        let (g, f) = a.split_at(n);
        let (lhs, rhs) = fi_sides(&bracket, eps, g, &p[..n], f, &p[n..]);
        rec.compare(a, "fundamental identity", &lhs, &rhs);
        if n == 3 && alg.has_product() {
            let six: Vec<AlgebraElement> = a.iter().chain(a.iter()).take(6).cloned().collect();
            let p6: Vec<u8> = p.iter().chain(p.iter()).take(6).copied().collect();
            let mul = |u: &AlgebraElement, v: &AlgebraElement| alg.product(u, v).expect("product present");
            let (l, r) = genskew_sides(&bracket, &mul, &six, &p6);
            exchange.1 += 1;
            exchange.0 += usize::from(l == r);
        }
    };

    let m = 2 * n - 1;
    let exhaustive = alg.dim().checked_pow(m as u32).is_some_and(|c| c <= EXHAUSTIVE_LIMIT);
    if exhaustive {
        for t in basis_tuples(alg.dim(), m) {
            let (a, p) = basis_args(alg, &t);
            run(&mut rec, &a, &p);
        }
    }
    let available: Vec<u8> = (0..2).filter(|&q| alg.basis.iter().any(|b| b.parity == q)).collect();
    let mut trial = 0u64;
    for pattern in parity_patterns_for(&available, m) {
        for _ in 0..params.samples {
            let mut rng = trial_rng(params.seed, trial);
            trial += 1;
            let a: Vec<AlgebraElement> = pattern
                .iter()
                .map(|&q| random_element(alg, q, &mut rng).expect("parity available"))
                .collect();
            run(&mut rec, &a, &pattern);
        }
    }
    rec.report.note("exhaustive", exhaustive);
    rec.report.note("reading", reading.label());
    rec.report.note("first_slot_swap_holds", serde_json::json!({ "held": first_swap.0, "total": first_swap.1 }));
    if exchange.1 > 0 {
        rec.report.note("generalized_skew_holds", serde_json::json!({ "held": exchange.0, "total": exchange.1 }));
    }
    Ok(rec.report)
}

/// Row-reduced basis of the span of all τ values on basis tuples.
pub fn tau_span(alg: &LieSuperAlgebra, tau: &TauMap) -> Result<Vec<AlgebraElement>> {
    let mut rows: Vec<AlgebraElement> = Vec::new();
    for t in basis_tuples(alg.dim(), tau.arity) {
        let (b, _) = basis_args(alg, &t);
        let v = tau.eval(alg, &b)?;
        if let Some(r) = reduce(&rows, &v) {
            insert_row(&mut rows, r);
        }
    }
    Ok(rows)
}

fn pivot(v: &AlgebraElement) -> Option<usize> {
    v.coeffs.iter().position(|c| !c.is_zero())
}

/// Remainder of `v` modulo a reduced row basis, or `None` if it is in the span.
fn reduce(rows: &[AlgebraElement], v: &AlgebraElement) -> Option<AlgebraElement> {
    let mut r = v.clone();
    for row in rows {
        let p = pivot(row).expect("rows are nonzero");
        let c = r.coeffs[p].clone();
        if !c.is_zero() {
            r.add_scaled(row, &-c);
        }
    }
    (!r.is_zero()).then_some(r)
}

fn insert_row(rows: &mut Vec<AlgebraElement>, r: AlgebraElement) {
    let p = pivot(&r).expect("nonzero");
    let r = r.scale(&(Rational::one() / &r.coeffs[p]));
    for row in rows.iter_mut() {
        let c = row.coeffs[p].clone();
        if !c.is_zero() {
            row.add_scaled(&r, &-c);
        }
    }
    rows.push(r);
    rows.sort_by_key(|x| pivot(x));
}

/// Checks that `[u,v]` lies in the span of τ values for all pairs of
/// spanning vectors.
pub fn check_span_closure(alg: &LieSuperAlgebra, tau: &TauMap) -> Result<CheckReport> {
    let rows = tau_span(alg, tau)?;
    let mut rec = Recorder::new(alg, "span_closure", &format!("{} / {}", alg.name, tau.name), CheckParams::default());
    rec.report.note("span_dimension", rows.len());
    for u in &rows {
        for v in &rows {
            rec.report.trials += 1;
            let w = alg.bracket(u, v);
            if let Some(rest) = reduce(&rows, &w) {
                let zero = AlgebraElement::zero(alg.dim());
                rec.compare(&[u.clone(), v.clone()], "closure remainder", &rest, &zero);
            }
        }
    }
    Ok(rec.report)
}

/// Per-tuple outcome of the cyclic condition on τ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauCyclicEntry {
    pub args: Vec<String>,
    /// Wrap-around term carries `(-1)^{n+|a_n|Σ|a_i|}`.
    pub literal_holds: bool,
    /// Wrap-around term carries `(-1)^{n+1+|a_n|Σ|a_i|}`.
    pub alternating_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauCyclicProbe {
    pub algebra: String,
    pub tau: String,
    pub tuples: usize,
    pub literal_held: usize,
    pub alternating_held: usize,
    pub entries: Vec<TauCyclicEntry>,
}

/// Evaluates
/// `Σ_{i<n} (-1)^{i+1} τ(a₁,…,a_i a_{i+1},…,a_n) ± τ(a_n a₁, a₂,…,a_{n−1})`
/// on every basis tuple for both wrap-around signs. Nothing is asserted.
pub fn check_tau_cyclic(alg: &LieSuperAlgebra, tau: &TauMap) -> Result<TauCyclicProbe> {
    if !alg.has_product() {
        return Err(product_required());
    }
    let n = tau.arity + 1;
    let mut probe = TauCyclicProbe {
        algebra: alg.name.clone(),
        tau: tau.name.clone(),
        tuples: 0,
        literal_held: 0,
        alternating_held: 0,
        entries: Vec::new(),
    };
    for t in basis_tuples(alg.dim(), n) {
        let (a, p) = basis_args(alg, &t);
        let mut sum = AlgebraElement::zero(alg.dim());
        for i in 0..n - 1 {
            let mut v: Vec<AlgebraElement> = a[..i].to_vec();
            v.push(alg.product(&a[i], &a[i + 1])?);
            v.extend_from_slice(&a[i + 2..]);
            // 1-based index i+1 gives (-1)^{i+2} = (-1)^i
            sum = sum.plus(&tau.eval(alg, &v)?.signed(i as u32));
        }
        let mut w = vec![alg.product(&a[n - 1], &a[0])?];
        w.extend_from_slice(&a[1..n - 1]);
        let wrap = tau.eval(alg, &w)?;
        let e = n as u32 + p[n - 1] as u32 * psum(&p[..n - 1]);
        let literal = sum.plus(&wrap.signed(e)).is_zero();
        let alternating = sum.plus(&wrap.signed(e + 1)).is_zero();
        probe.tuples += 1;
        probe.literal_held += usize::from(literal);
        probe.alternating_held += usize::from(alternating);
        probe.entries.push(TauCyclicEntry {
            args: a.iter().map(|x| alg.format(x)).collect(),
            literal_holds: literal,
            alternating_holds: alternating,
        });
    }
    Ok(probe)
}

pub const BUILTIN_ALGEBRAS: [&str; 5] = ["abelian3", "so3", "heisenberg3", "super21", "gl2"];

fn basis(spec: &[(&str, u8)]) -> Vec<BasisElement> {
    spec.iter().map(|&(n, p)| BasisElement { name: n.to_string(), parity: p }).collect()
}

fn antisymmetric(alg_basis: &[(&str, u8)], pairs: &[(usize, usize, usize, i64)]) -> Vec<Triple> {
    let mut out = Vec::new();
    for &(i, j, k, c) in pairs {
        out.push((i, j, k, Rational::from_integer(c.into())));
        if i != j {
            // bosonic partner: [e_j,e_i] = -[e_i,e_j]; odd-odd pairs are symmetric
            let sym = alg_basis[i].1 == 1 && alg_basis[j].1 == 1;
            out.push((j, i, k, Rational::from_integer((if sym { c } else { -c }).into())));
        }
    }
    out
}

/// Shipped example algebras (all with ε = 0).
///
/// * `abelian3`: three even generators, zero bracket.
/// * `so3`: `[e_i,e_j] = ε_{ijk} e_k`.
/// * `heisenberg3`: `[x,y] = z`.
/// * `super21`: even `h, z`, odd `q`; `[h,q] = q`, `[h,z] = 2z`, `[q,q] = 2z`.
/// * `gl2`: 2×2 matrix units with the commutator and the matrix product.
pub fn builtin_algebra(name: &str) -> Result<LieSuperAlgebra> {
    match name {
        "abelian3" => LieSuperAlgebra::new(name, basis(&[("a1", 0), ("a2", 0), ("a3", 0)]), 0, &[], None),
        "so3" => {
            let b = [("e1", 0), ("e2", 0), ("e3", 0)];
            let s = antisymmetric(&b, &[(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)]);
            LieSuperAlgebra::new(name, basis(&b), 0, &s, None)
        }
        "heisenberg3" => {
            let b = [("x", 0), ("y", 0), ("z", 0)];
            LieSuperAlgebra::new(name, basis(&b), 0, &antisymmetric(&b, &[(0, 1, 2, 1)]), None)
        }
        "super21" => {
            let b = [("h", 0), ("z", 0), ("q", 1)];
            let s = antisymmetric(&b, &[(0, 2, 2, 1), (0, 1, 1, 2), (2, 2, 1, 2)]);
            LieSuperAlgebra::new(name, basis(&b), 0, &s, None)
        }
        "gl2" => {
            // E_{ab} at index 2a+b; E_{ab}E_{cd} = δ_{bc}E_{ad}
            let b = [("E11", 0), ("E12", 0), ("E21", 0), ("E22", 0)];
            let mut product = Vec::new();
            let mut structure: BTreeMap<(usize, usize, usize), i64> = BTreeMap::new();
            for x in 0..4 {
                for y in 0..4 {
                    let (a, bb, c, d) = (x / 2, x % 2, y / 2, y % 2);
                    if bb == c {
                        let k = 2 * a + d;
                        product.push((x, y, k, Rational::one()));
                        *structure.entry((x, y, k)).or_default() += 1;
                        *structure.entry((y, x, k)).or_default() -= 1;
                    }
                }
            }
            let s: Vec<Triple> = structure
                .into_iter()
                .map(|((i, j, k), c)| (i, j, k, Rational::from_integer(c.into())))
                .collect();
            LieSuperAlgebra::new(name, basis(&b), 0, &s, Some(&product))
        }
        _ => Err(Error::InvalidAlgebra(format!(
            "unknown algebra `{name}` (builtins: {})",
            BUILTIN_ALGEBRAS.join(", ")
        ))),
    }
}

/// Builtin name or path to an algebra JSON document.
pub fn load_algebra(name_or_path: &str) -> Result<LieSuperAlgebra> {
    if BUILTIN_ALGEBRAS.contains(&name_or_path) {
        return builtin_algebra(name_or_path);
    }
    let text = std::fs::read_to_string(Path::new(name_or_path))
        .map_err(|e| Error::InvalidAlgebra(format!("cannot read `{name_or_path}`: {e}")))?;
    LieSuperAlgebra::from_json(&text)
}

/// `bracket`, `identity`, or a path to a τ JSON document.
pub fn load_tau(alg: &LieSuperAlgebra, name_or_path: &str) -> Result<TauMap> {
    match name_or_path {
        "bracket" => TauMap::lie_bracket(alg),
        "identity" => Ok(TauMap::identity(alg)),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidAlgebra(format!("cannot read `{path}`: {e}")))?;
            TauMap::from_json(alg, &text)
        }
    }
}

impl fmt::Display for LieSuperAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self
            .basis
            .iter()
            .map(|b| format!("{}:{}", b.name, if b.parity == 0 { "b" } else { "f" }))
            .collect();
        write!(f, "{} [{}] degree {}", self.name, names.join(","), self.epsilon)
    }
}

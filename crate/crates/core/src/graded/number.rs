use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::space::{CoordKind, GradedSpace};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `(-1)^e` as a rational.
pub fn sign(e: u32) -> Rational {
    if e % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Which side a fermionic derivative removes its variable from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
    /// The zero polynomial, homogeneous of every parity.
    ZeroAny,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
            Parity::ZeroAny => "zero",
        })
    }
}

impl Parity {
    pub fn from_bit(b: u8) -> Parity {
        if b % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_homogeneous(self) -> bool {
        self != Parity::Mixed
    }

    /// Does a value of this parity fit into slot parity `bit`?
    pub fn admits(self, bit: u8) -> bool {
        match self {
            Parity::ZeroAny => true,
            Parity::Mixed => false,
            p => p == Parity::from_bit(bit),
        }
    }
}

/// A monomial θ_{a₁}⋯θ_{a_k} · x^e with a₁ < ⋯ < a_k.
///
/// Fermionic factors are stored as a bitmask over fermion slots, bosonic
/// factors as an exponent vector. Ordering: Grassmann subset first
/// (lexicographic on the ascending index list), then exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    odd: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn unit(n_bosons: usize) -> Self {
        Monomial { odd: 0, exps: vec![0; n_bosons] }
    }

    pub fn new(odd_indices: &[usize], exps: Vec<u32>) -> Option<Self> {
        let mut mask = 0u32;
        for &i in odd_indices {
            if mask & (1 << i) != 0 {
                return None;
            }
            mask |= 1 << i;
        }
        Some(Monomial { odd: mask, exps })
    }

    pub fn odd_mask(&self) -> u32 {
        self.odd
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn odd_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.odd;
        (0..32).filter(move |i| m & (1 << i) != 0)
    }

    pub fn parity(&self) -> u8 {
        (self.odd.count_ones() % 2) as u8
    }

    pub fn bosonic_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Product with its sign, or `None` if a fermion repeats.
    fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        if self.odd & other.odd != 0 {
            return None;
        }
        // Sorting θ_A θ_B: one transposition per pair a ∈ A, b ∈ B with a > b.
        let mut inversions = 0u32;
        let mut b = other.odd;
        while b != 0 {
            let j = b.trailing_zeros();
            let above = if j >= 31 { 0 } else { !((1u32 << (j + 1)) - 1) };
            inversions += (self.odd & above).count_ones();
            b &= b - 1;
        }
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Some((inversions % 2 == 1, Monomial { odd: self.odd | other.odd, exps }))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.odd_indices()
            .cmp(other.odd_indices())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in commuting and anticommuting coordinates with exact
/// rational coefficients, kept in canonical form (no zero coefficients).
#[derive(Clone, Debug)]
pub struct Supernumber {
    space: Arc<GradedSpace>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Supernumber {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.terms == other.terms
    }
}

impl Eq for Supernumber {}

pub(crate) fn same_space(a: &Arc<GradedSpace>, b: &Arc<GradedSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Supernumber {
    pub fn zero(space: &Arc<GradedSpace>) -> Self {
        Supernumber { space: space.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(space: &Arc<GradedSpace>, c: Rational) -> Self {
        let mut s = Self::zero(space);
        if !c.is_zero() {
            s.terms.insert(Monomial::unit(space.n_bosons()), c);
        }
        s
    }

    pub fn one(space: &Arc<GradedSpace>) -> Self {
        Self::constant(space, Rational::one())
    }

    pub fn coordinate(space: &Arc<GradedSpace>, name: &str) -> Result<Self> {
        let idx = space.index_of(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        Ok(Self::coordinate_at(space, idx))
    }

    /// The coordinate function z_i, by declaration index.
    pub fn coordinate_at(space: &Arc<GradedSpace>, idx: usize) -> Self {
        let c = &space.coords()[idx];
        let mut m = Monomial::unit(space.n_bosons());
        match c.kind {
            CoordKind::Bosonic => m.exps[c.slot] = 1,
            CoordKind::Fermionic => m.odd = 1 << c.slot,
        }
        let mut s = Self::zero(space);
        s.terms.insert(m, Rational::one());
        s
    }

    /// Builds from arbitrary (monomial, coefficient) pairs, merging and
    /// dropping zeros.
    pub fn from_terms(space: &Arc<GradedSpace>, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut s = Self::zero(space);
        for (m, c) in terms {
            assert_eq!(m.exps.len(), space.n_bosons(), "monomial does not fit the space");
            s.add_term(m, c);
        }
        s
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant term, if the value is a pure constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.odd == 0 && m.bosonic_degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn max_bosonic_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::bosonic_degree).max().unwrap_or(0)
    }

    pub fn parity(&self) -> Parity {
        let mut seen = [false; 2];
        for m in self.terms.keys() {
            seen[m.parity() as usize] = true;
        }
        match seen {
            [false, false] => Parity::ZeroAny,
            [true, false] => Parity::Even,
            [false, true] => Parity::Odd,
            [true, true] => Parity::Mixed,
        }
    }

    /// Parity bit of a homogeneous value; zero counts as even.
    pub fn parity_bit(&self) -> Option<u8> {
        match self.parity() {
            Parity::Even | Parity::ZeroAny => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }

    pub fn parity_decompose(&self) -> (Supernumber, Supernumber) {
        let mut even = Self::zero(&self.space);
        let mut odd = Self::zero(&self.space);
        for (m, c) in &self.terms {
            let part = if m.parity() == 0 { &mut even } else { &mut odd };
            part.terms.insert(m.clone(), c.clone());
        }
        (even, odd)
    }

    pub fn scale(&self, c: &Rational) -> Supernumber {
        if c.is_zero() {
            return Self::zero(&self.space);
        }
        Supernumber {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn check_space(&self, other: &Supernumber) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn checked_add(&self, other: &Supernumber) -> Result<Supernumber> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Supernumber) -> Result<Supernumber> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    /// Graded product: θ factors are sorted with one sign per transposition.
    pub fn checked_mul(&self, other: &Supernumber) -> Result<Supernumber> {
        self.check_space(other)?;
        let mut out = Self::zero(&self.space);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((neg, m)) = ma.mul(mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Supernumber {
        let mut acc = Self::one(&self.space);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative by coordinate name.
    pub fn deriv(&self, coord: &str, side: Side) -> Result<Supernumber> {
        let idx = self.space.index_of(coord).ok_or_else(|| Error::UnknownCoordinate(coord.to_string()))?;
        Ok(self.deriv_at(idx, side))
    }

    /// Partial derivative by coordinate index. Bosonic derivatives ignore
    /// `side`. For θ_j at position p among k factors, Left carries (-1)^p
    /// and Right carries (-1)^(k-1-p).
    pub fn deriv_at(&self, idx: usize, side: Side) -> Supernumber {
        let c = &self.space.coords()[idx];
        let mut out = Self::zero(&self.space);
        match c.kind {
            CoordKind::Bosonic => {
                for (m, v) in &self.terms {
                    let e = m.exps[c.slot];
                    if e == 0 {
                        continue;
                    }
                    let mut dm = m.clone();
                    dm.exps[c.slot] -= 1;
                    out.terms.insert(dm, v * Rational::from_integer(BigInt::from(e)));
                }
            }
            CoordKind::Fermionic => {
                let bit = 1u32 << c.slot;
                for (m, v) in &self.terms {
                    if m.odd & bit == 0 {
                        continue;
                    }
                    let p = (m.odd & (bit - 1)).count_ones();
                    let k = m.odd.count_ones();
                    let flips = match side {
                        Side::Left => p,
                        Side::Right => k - 1 - p,
                    };
                    let mut dm = m.clone();
                    dm.odd &= !bit;
                    out.terms.insert(dm, if flips % 2 == 1 { -v } else { v.clone() });
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a Supernumber> for &'a Supernumber {
    type Output = Supernumber;
    fn add(self, rhs: &'a Supernumber) -> Supernumber {
        self.checked_add(rhs).expect("space mismatch in add")
    }
}

impl<'a> Sub<&'a Supernumber> for &'a Supernumber {
    type Output = Supernumber;
    fn sub(self, rhs: &'a Supernumber) -> Supernumber {
        self.checked_sub(rhs).expect("space mismatch in sub")
    }
}

impl<'a> Mul<&'a Supernumber> for &'a Supernumber {
    type Output = Supernumber;
    fn mul(self, rhs: &'a Supernumber) -> Supernumber {
        self.checked_mul(rhs).expect("space mismatch in mul")
    }
}

impl Add for Supernumber {
    type Output = Supernumber;
    fn add(self, rhs: Supernumber) -> Supernumber {
        &self + &rhs
    }
}

impl Sub for Supernumber {
    type Output = Supernumber;
    fn sub(self, rhs: Supernumber) -> Supernumber {
        &self - &rhs
    }
}

impl Mul for Supernumber {
    type Output = Supernumber;
    fn mul(self, rhs: Supernumber) -> Supernumber {
        &self * &rhs
    }
}

impl Neg for &Supernumber {
    type Output = Supernumber;
    fn neg(self) -> Supernumber {
        Supernumber {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Supernumber {
    type Output = Supernumber;
    fn neg(self) -> Supernumber {
        -&self
    }
}

pub(crate) fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Supernumber {
    /// Canonical text: terms in monomial order, bosonic factors before
    /// fermionic ones, `*` between factors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for (slot, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.space.boson_name(slot).to_string()),
                    _ => factors.push(format!("{}^{}", self.space.boson_name(slot), e)),
                }
            }
            factors.extend(m.odd_indices().map(|j| self.space.fermion_name(j).to_string()));
            let mag = c.abs();
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if factors.is_empty() {
                f.write_str(&format_rational(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", format_rational(&mag))?;
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(decl: &str) -> Arc<GradedSpace> {
        Arc::new(decl.parse().unwrap())
    }

    fn z(s: &Arc<GradedSpace>, n: &str) -> Supernumber {
        Supernumber::coordinate(s, n).unwrap()
    }

    #[test]
    fn anticommutation_and_nilpotency() {
        let s = space("x1:b,x2:b,th1:f,th2:f");
        let (t1, t2) = (z(&s, "th1"), z(&s, "th2"));
        let t12 = &t1 * &t2;
        assert_eq!(&t2 * &t1, -&t12);
        assert!((&t1 * &t1).is_zero());
        assert_eq!(t12.to_string(), "th1*th2");
    }

    #[test]
    fn product_with_nilpotent_square() {
        // (x1 + θ₁θ₂)(x1 − θ₁θ₂) = x1²
        let s = space("x1:b,x2:b,th1:f,th2:f");
        let x1 = z(&s, "x1");
        let t12 = &z(&s, "th1") * &z(&s, "th2");
        let lhs = &(&x1 + &t12) * &(&x1 - &t12);
        assert_eq!(lhs, &x1 * &x1);
    }

    #[test]
    fn rational_addition_and_cancellation() {
        let s = space("x1:b,x2:b");
        let x1 = z(&s, "x1");
        assert!((&x1 + &(-&x1)).is_zero());
        let sq = &x1 * &x1;
        let sum = &sq.scale(&rat(1, 2)) + &sq.scale(&rat(1, 3));
        assert_eq!(sum, sq.scale(&rat(5, 6)));
    }

    #[test]
    fn parity_classification() {
        let s = space("x1:b,x2:b,th1:f,th2:f");
        let x1 = z(&s, "x1");
        let t1 = z(&s, "th1");
        assert_eq!((&(&x1 * &x1) * &t1).parity(), Parity::Odd);
        assert_eq!((&x1 + &t1).parity(), Parity::Mixed);
        assert_eq!(Supernumber::zero(&s).parity(), Parity::ZeroAny);
        let (e, o) = (&x1 + &t1).parity_decompose();
        assert_eq!((e, o), (x1.clone(), t1.clone()));
        let t12 = &t1 * &z(&s, "th2");
        assert_eq!(t12.parity_decompose(), (t12.clone(), Supernumber::zero(&s)));
    }

    #[test]
    fn fermionic_derivative_signs() {
        let s = space("x1:b,x2:b,th1:f,th2:f");
        let (t1, t2) = (z(&s, "th1"), z(&s, "th2"));
        let t12 = &t1 * &t2;
        assert_eq!(t12.deriv("th2", Side::Left).unwrap(), -&t1);
        assert_eq!(t12.deriv("th2", Side::Right).unwrap(), t1);
        assert_eq!(t12.deriv("th1", Side::Left).unwrap(), t2);
        assert_eq!(t12.deriv("th1", Side::Right).unwrap(), -&t2);
        let x1 = z(&s, "x1");
        let f = &(&x1 * &x1) * &t1;
        assert_eq!(f.deriv("x1", Side::Left).unwrap(), (&x1 * &t1).scale(&int(2)));
        assert!(f.deriv("nope", Side::Left).is_err());
    }

    /// Sign-count oracle: write the monomial as an explicit list of factors
    /// and move θ_j to the front (left) or back (right) one swap at a time.
    #[test]
    fn derivative_sign_oracle_over_two_factor_monomials() {
        let s = space("a:f,b:f,c:f");
        let names = ["a", "b", "c"];
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let factors = [i, j];
                let mono = &z(&s, names[i]) * &z(&s, names[j]);
                for target in 0..3 {
                    for side in [Side::Left, Side::Right] {
                        let expected = match factors.iter().position(|&f| f == target) {
                            None => Supernumber::zero(&s),
                            Some(p) => {
                                let swaps = match side {
                                    Side::Left => p,
                                    Side::Right => 1 - p,
                                };
                                let rest = z(&s, names[factors[1 - p]]);
                                if swaps % 2 == 1 { -&rest } else { rest }
                            }
                        };
                        assert_eq!(mono.deriv(names[target], side).unwrap(), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn monomial_order_is_lexicographic_on_index_lists() {
        let m = |odd: &[usize]| Monomial::new(odd, vec![]).unwrap();
        assert!(m(&[]) < m(&[0]));
        assert!(m(&[0]) < m(&[0, 1]));
        assert!(m(&[0, 1]) < m(&[1]));
        assert!(m(&[0, 2]) < m(&[1, 2]));
        assert!(Monomial::new(&[0, 0], vec![]).is_none());
    }

    #[test]
    fn display_forms() {
        let s = space("x1:b,x2:b,th1:f,th2:f");
        assert_eq!(Supernumber::zero(&s).to_string(), "0");
        assert_eq!(z(&s, "x1").to_string(), "x1");
        let t12 = &z(&s, "th1") * &z(&s, "th2");
        assert_eq!(t12.scale(&rat(-1, 2)).to_string(), "-1/2*th1*th2");
        let x1 = z(&s, "x1");
        let v = &(&(&x1 * &x1) + &t12.scale(&int(3))) - &Supernumber::one(&s);
        assert_eq!(v.to_string(), "-1 + x1^2 + 3*th1*th2");
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let a = Supernumber::one(&space("x:b"));
        let b = Supernumber::one(&space("y:b"));
        assert_eq!(a.checked_add(&b), Err(Error::SpaceMismatch));
        assert_eq!(a.checked_mul(&b), Err(Error::SpaceMismatch));
    }
}

//! Sign-dressed identities written once over any graded value type, so the
//! polynomial brackets and the structure-constant brackets share them.

use crate::graded::Supernumber;

pub trait GradedValue: Clone + PartialEq {
    fn plus(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn zero_like(&self) -> Self;

    /// `(-1)^e · self`
    fn signed(&self, e: u32) -> Self {
        if e % 2 == 0 {
            self.clone()
        } else {
            self.negated()
        }
    }
}

impl GradedValue for Supernumber {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn zero_like(&self) -> Self {
        Supernumber::zero(self.space())
    }
}

pub(crate) fn psum(p: &[u8]) -> u32 {
    p.iter().map(|&b| b as u32).sum()
}

/// Skew property in slots `i, i+1` (0-based):
/// `{…,a,b,…} = -(-1)^{|a||b|} {…,b,a,…}`. Returns `(lhs, rhs)`.
pub fn skew_sides<T: GradedValue>(bracket: &dyn Fn(&[T]) -> T, args: &[T], p: &[u8], i: usize) -> (T, T) {
    let lhs = bracket(args);
    let mut swapped = args.to_vec();
    swapped.swap(i, i + 1);
    let rhs = bracket(&swapped).signed(1 + p[i] as u32 * p[i + 1] as u32);
    (lhs, rhs)
}

/// Graded fundamental identity for an n-ary bracket of degree ε, with the
/// bracket acting as a right derivation:
///
/// ```text
/// {{g₁,…,g_n},f₁,…,f_{n−1}}
///   = Σ_{i=2}^{n} (-1)^{(ε+|F|)(Σ_{k>i}|g_k|)} {g₁,…,{g_i,f…},…,g_n}
///   + (-1)^{(ε+|F|)(ε+Σ_{k≥2}|g_k|)} {{g₁,f…},g₂,…,g_n}
/// ```
///
/// Returns `(lhs, rhs)`.
pub fn fi_sides<T: GradedValue>(
    bracket: &dyn Fn(&[T]) -> T,
    epsilon: u8,
    g: &[T],
    pg: &[u8],
    f: &[T],
    pf: &[u8],
) -> (T, T) {
    let n = g.len();
    let deg_f = epsilon as u32 + psum(pf);
    let with_f = |x: &T| {
        let mut v = Vec::with_capacity(n);
        v.push(x.clone());
        v.extend_from_slice(f);
        bracket(&v)
    };
    let lhs = with_f(&bracket(g));
    let mut rhs = lhs.zero_like();
    for i in 1..n {
        let mut v = g.to_vec();
        v[i] = with_f(&g[i]);
        let e = deg_f * psum(&pg[i + 1..]);
        rhs = rhs.plus(&bracket(&v).signed(e));
    }
    let mut v = g.to_vec();
    v[0] = with_f(&g[0]);
    let e = deg_f * (epsilon as u32 + psum(&pg[1..]));
    rhs = rhs.plus(&bracket(&v).signed(e));
    (lhs, rhs)
}

/// Exchange identity for a ternary bracket with a product:
///
/// ```text
/// {f₁,G}{f₂,H} − (-1)^{|f₁||f₂|}{f₂,G}{f₁,H}
///   = −(-1)^{(|f₁|+|f₂|)(|g₁|+|g₂|)} [{g₁,F}{g₂,H} − (-1)^{|g₁||g₂|}{g₂,F}{g₁,H}]
/// ```
///
/// where `{u,V}` means `{u,v₁,v₂}`. `args` holds f₁ f₂ g₁ g₂ h₁ h₂.
/// Returns `(lhs, rhs)`.
pub fn genskew_sides<T: GradedValue>(
    bracket: &dyn Fn(&[T]) -> T,
    mul: &dyn Fn(&T, &T) -> T,
    args: &[T],
    p: &[u8],
) -> (T, T) {
    let b = |x: &T, pair: &[T]| bracket(&[x.clone(), pair[0].clone(), pair[1].clone()]);
    let (f, g, h) = (&args[0..2], &args[2..4], &args[4..6]);
    let side = |u: &[T], pu: &[u8], v: &[T]| {
        let t1 = mul(&b(&u[0], v), &b(&u[1], h));
        let t2 = mul(&b(&u[1], v), &b(&u[0], h));
        t1.plus(&t2.signed(1 + pu[0] as u32 * pu[1] as u32))
    };
    let lhs = side(f, &p[0..2], g);
    let rhs = side(g, &p[2..4], f).signed(1 + psum(&p[0..2]) * psum(&p[2..4]));
    (lhs, rhs)
}

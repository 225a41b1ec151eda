//! Divergence of Nambu-Hamiltonian fields and the generalized
//! Batalin-Vilkovisky operator Δ.
//!
//! The volume density is carried as a log-density σ with ρ = e^σ, so
//! `ρ⁻¹ ∂_l(ρ X^i)/∂z_i = ∂_l X^i/∂z_i + (∂_l σ/∂z_i) X^i` stays polynomial.

use std::sync::Arc;

use serde::Serialize;

use crate::bracket::{eval_bracket, field_commutator, nh_field, BracketSpec, Convention, VectorField};
use crate::error::{Error, Result};
use crate::graded::{random_homogeneous, rat, same_space, sign, GradedSpace, Parity, Side, Supernumber};
use crate::laws::{psum, GradedValue};
use crate::report::{draw_args, parity_patterns, run_trials, trial_rng, CheckParams, CheckReport, Comparison, TrialOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct LogDensity {
    sigma: Supernumber,
}

impl LogDensity {
    pub fn new(sigma: Supernumber) -> Result<Self> {
        match sigma.parity() {
            Parity::Even | Parity::ZeroAny => Ok(LogDensity { sigma }),
            _ => Err(Error::Precondition(format!("log-density must be even, got `{sigma}`"))),
        }
    }

    /// ρ = 1.
    pub fn flat(space: &Arc<GradedSpace>) -> Self {
        LogDensity { sigma: Supernumber::zero(space) }
    }

    pub fn sigma(&self) -> &Supernumber {
        &self.sigma
    }

    /// A random even σ of bosonic degree ≤ `max_degree` with at least one
    /// nonzero partial derivative; seeds `seed, seed+1, …` are tried in turn.
    pub fn random(space: &Arc<GradedSpace>, max_degree: u32, seed: u64) -> Result<Self> {
        if max_degree == 0 && space.n_fermions() < 2 {
            return Err(Error::Precondition("no non-constant even function of this degree".into()));
        }
        let mut s = seed;
        loop {
            let sigma = random_homogeneous(space, 0, max_degree, s)?;
            if sigma.as_constant().is_none() {
                return Ok(LogDensity { sigma });
            }
            s = s.wrapping_add(1);
        }
    }
}

/// `Σ_i (-1)^{|z_i|} [∂_l X^i/∂z_i + (∂_l σ/∂z_i)·X^i]`
pub fn divergence(x: &VectorField, density: &LogDensity) -> Result<Supernumber> {
    if !same_space(&x.space, density.sigma.space()) {
        return Err(Error::SpaceMismatch);
    }
    let mut acc = Supernumber::zero(&x.space);
    for (i, (comp, z)) in x.components.iter().zip(x.space.coords()).enumerate() {
        if comp.is_zero() {
            continue;
        }
        let mut term = comp.deriv_at(i, Side::Left);
        let ds = density.sigma.deriv_at(i, Side::Left);
        if !ds.is_zero() {
            term = &term + &(&ds * comp);
        }
        acc = &acc + &term.signed(z.kind.parity() as u32);
    }
    Ok(acc)
}

/// Δ(H₁,…,H_{n−1}) := ½ div_ρ X_{H₁…H_{n−1}}; an (n−1)-ary map of degree ε.
#[derive(Debug, Clone)]
pub struct DeltaOperator {
    pub spec: BracketSpec,
    pub density: LogDensity,
}

impl DeltaOperator {
    pub fn new(spec: BracketSpec, density: LogDensity) -> Result<Self> {
        if !same_space(&spec.space, density.sigma.space()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(DeltaOperator { spec, density })
    }

    pub fn flat(spec: BracketSpec) -> Self {
        let density = LogDensity::flat(&spec.space);
        DeltaOperator { spec, density }
    }

    pub fn arity(&self) -> usize {
        self.spec.arity - 1
    }

    pub fn epsilon(&self) -> u8 {
        self.spec.epsilon
    }

    fn label(&self) -> String {
        if self.density.sigma.is_zero() {
            self.spec.name.clone()
        } else {
            format!("{} (sigma = {})", self.spec.name, self.density.sigma)
        }
    }
}

pub fn delta(op: &DeltaOperator, args: &[Supernumber]) -> Result<Supernumber> {
    let x = nh_field(&op.spec, args)?;
    Ok(divergence(&x, &op.density)?.scale(&rat(1, 2)))
}

fn validate(params: &CheckParams) -> Result<()> {
    if params.samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    Ok(())
}

fn br(spec: &BracketSpec, args: &[Supernumber]) -> Supernumber {
    eval_bracket(spec, args).expect("harness arguments live in the spec space")
}

fn dl(op: &DeltaOperator, args: &[Supernumber]) -> Supernumber {
    delta(op, args).expect("harness arguments live in the spec space")
}

fn require_binary(op: &DeltaOperator) -> Result<()> {
    if op.spec.arity != 2 {
        return Err(Error::Precondition(format!(
            "this relation needs a binary bracket, `{}` has arity {}",
            op.spec.name, op.spec.arity
        )));
    }
    Ok(())
}

/// `Δ(…,f,g,…) = -(-1)^{|f||g|} Δ(…,g,f,…)` for all adjacent slots.
pub fn check_delta_skew(op: &DeltaOperator, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("delta_skew", &op.label(), *params);
    let m = op.arity();
    run_trials(&mut report, &op.spec.space, m, params, |args, p| {
        let lhs = dl(op, args);
        let mut out = Vec::new();
        for i in 0..m.saturating_sub(1) {
            let mut sw = args.to_vec();
            sw.swap(i, i + 1);
            let rhs = dl(op, &sw).signed(1 + p[i] as u32 * p[i + 1] as u32);
            out.push(Comparison::labeled(format!("slots {},{}", i + 1, i + 2), lhs.clone(), rhs));
        }
        Ok(out.into())
    })?;
    Ok(report)
}

/// `(-1)^{|f|}{f,g} = Δ(fg) - Δ(f)g - (-1)^{|f|} fΔ(g)` for a binary bracket.
pub fn check_bv_n2(op: &DeltaOperator, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    require_binary(op)?;
    let mut report = CheckReport::new("bv_n2", &op.label(), *params);
    run_trials(&mut report, &op.spec.space, 2, params, |a, p| {
        let (f, g) = (&a[0], &a[1]);
        let pf = p[0] as u32;
        let lhs = br(&op.spec, a).signed(pf);
        let rhs = &(&dl(op, &[f * g]) - &(&dl(op, &[f.clone()]) * g)) - &(f * &dl(op, &[g.clone()])).signed(pf);
        Ok(vec![Comparison::new(lhs, rhs)].into())
    })?;
    Ok(report)
}

/// `Δ({f,g}) = {Δf,g} + (-1)^{|f|+1}{f,Δg}` for a binary bracket.
pub fn check_delta_leibniz_n2(op: &DeltaOperator, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    require_binary(op)?;
    let mut report = CheckReport::new("delta_leibniz_n2", &op.label(), *params);
    run_trials(&mut report, &op.spec.space, 2, params, |a, p| {
        let (f, g) = (&a[0], &a[1]);
        let lhs = dl(op, &[br(&op.spec, a)]);
        let rhs = &br(&op.spec, &[dl(op, &[f.clone()]), g.clone()])
            + &br(&op.spec, &[f.clone(), dl(op, &[g.clone()])]).signed(p[0] as u32 + 1);
        Ok(vec![Comparison::new(lhs, rhs)].into())
    })?;
    Ok(report)
}

/// ```text
/// ½[(-1)^{|f|ε}{f,g,f₂,…} − (-1)^{(|f|+ε)|g|+1}{g,f,f₂,…}]
///   = Δ(fg,f₂,…) − (-1)^{|g||F|}Δ(f,f₂,…)g − (-1)^{|f|ε} fΔ(g,f₂,…)
/// ```
/// with `|F| = Σ_{i≥2}|f_i|`.
pub fn check_delta_product(op: &DeltaOperator, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("delta_product", &op.label(), *params);
    let n = op.spec.arity;
    let eps = op.epsilon() as u32;
    // args: f, g, f₂ … f_{n−1}
    run_trials(&mut report, &op.spec.space, n, params, |a, p| {
        let (f, g) = (&a[0], &a[1]);
        let tail = &a[2..];
        let (pf, pg) = (p[0] as u32, p[1] as u32);
        let pt = psum(&p[2..]);
        let with = |head: Vec<Supernumber>| {
            let mut v = head;
            v.extend_from_slice(tail);
            v
        };
        let b1 = br(&op.spec, &with(vec![f.clone(), g.clone()])).signed(pf * eps);
        let b2 = br(&op.spec, &with(vec![g.clone(), f.clone()])).signed((pf + eps) * pg + 1);
        let lhs = (&b1 - &b2).scale(&rat(1, 2));
        let rhs = &(&dl(op, &with(vec![f * g])) - &(&dl(op, &with(vec![f.clone()])) * g).signed(pg * pt))
            - &(f * &dl(op, &with(vec![g.clone()]))).signed(pf * eps);
        Ok(vec![Comparison::new(lhs, rhs)].into())
    })?;
    Ok(report)
}

/// ```text
/// [X_{g₁…g_{n−1}}, X_{f₁…f_{n−1}}]
///   = Σ_i (-1)^{(ε+|F|)(Σ_{k>i}|g_k|)+1} X_{g₁,…,{g_i,f₁,…,f_{n−1}},…,g_{n−1}}
/// ```
/// compared component by component under the given composition order.
pub fn check_field_commutator(op: &DeltaOperator, convention: Convention, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new(&format!("field_commutator[{convention}]"), &op.spec.name, *params);
    report.note("convention", convention.to_string());
    let spec = &op.spec;
    let m = spec.arity - 1;
    let eps = spec.epsilon as u32;
    // args: g₁ … g_m, f₁ … f_m
    run_trials(&mut report, &spec.space, 2 * m, params, |a, p| {
        let (g, f) = (&a[..m], &a[m..]);
        let deg_f = eps + psum(&p[m..]);
        let xg = nh_field(spec, g)?;
        let xf = nh_field(spec, f)?;
        let lhs = field_commutator(&xg, &xf, convention)?;
        let mut rhs = VectorField::zero(&spec.space);
        for i in 0..m {
            let mut v = g.to_vec();
            let mut inner = vec![g[i].clone()];
            inner.extend_from_slice(f);
            v[i] = br(spec, &inner);
            let e = deg_f * psum(&p[i + 1..m]) + 1;
            let xi = nh_field(spec, &v)?;
            rhs = rhs.add(&VectorField {
                space: xi.space.clone(),
                components: xi.components.iter().map(|c| c.signed(e)).collect(),
            });
        }
        Ok(lhs
            .components
            .into_iter()
            .zip(rhs.components)
            .zip(spec.space.coords())
            .map(|((l, r), z)| Comparison::labeled(format!("component {}", z.name), l, r))
            .collect::<Vec<_>>()
            .into())
    })?;
    Ok(report)
}

/// ```text
/// {Δ(f₁…f_{n−1}), g₁…g_{n−1}}
///   = Σ_i (-1)^{(ε+|F|)(ε+Σ_{j>i}|g_j|)+1} Δ(g₁,…,{g_i,f…},…,g_{n−1})
///   + (-1)^{(ε+|F|)(ε+|G|)} {Δ(g₁…g_{n−1}), f₁…f_{n−1}}
/// ```
pub fn check_delta_fi(op: &DeltaOperator, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("delta_fi", &op.label(), *params);
    let spec = &op.spec;
    let m = spec.arity - 1;
    let eps = spec.epsilon as u32;
    // args: f₁ … f_m, g₁ … g_m
    run_trials(&mut report, &spec.space, 2 * m, params, |a, p| {
        let (f, g) = (&a[..m], &a[m..]);
        let (pf, pg) = (&p[..m], &p[m..]);
        let deg_f = eps + psum(pf);
        let prepend = |x: Supernumber, rest: &[Supernumber]| {
            let mut v = vec![x];
            v.extend_from_slice(rest);
            v
        };
        let lhs = br(spec, &prepend(dl(op, f), g));
        let mut rhs = br(spec, &prepend(dl(op, g), f)).signed(deg_f * (eps + psum(pg)));
        for i in 0..m {
            let mut v = g.to_vec();
            v[i] = br(spec, &prepend(g[i].clone(), f));
            let e = deg_f * (eps + psum(&pg[i + 1..])) + 1;
            rhs = &rhs + &dl(op, &v).signed(e);
        }
        Ok(vec![Comparison::new(lhs, rhs)].into())
    })?;
    Ok(report)
}

/// Outcome of the nilpotency probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NilpotencyProbe {
    pub spec: String,
    pub composite: String,
    /// True when the composite was asserted to vanish (binary case).
    pub asserted: bool,
    pub trials: usize,
    pub nonzero: usize,
    pub witness: Option<NilpotencyWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NilpotencyWitness {
    pub args: Vec<String>,
    pub value: String,
}

impl NilpotencyProbe {
    /// A binary probe passes when Δ∘Δ vanished on every sample; higher
    /// arities are exploratory and always pass.
    pub fn passed(&self) -> bool {
        !self.asserted || self.nonzero == 0
    }
}

/// Binary bracket: Δ(Δ(f)) on random samples, asserted to vanish.
///
/// Higher arity (n−1 ≥ 2): evaluates the composite `Δ(Δ(f₁,…,f_{n−1}), f_n, …)`,
/// i.e. Δ fed back into its own first slot, and reports the first nonzero
/// value as a witness. Nothing is asserted there.
pub fn probe_nilpotency(op: &DeltaOperator, params: &CheckParams) -> Result<NilpotencyProbe> {
    validate(params)?;
    let spec = &op.spec;
    let m = op.arity();
    let n_args = if m == 1 { 1 } else { 2 * m - 1 };
    let composite = if m == 1 {
        "Δ(Δ(f))".to_string()
    } else {
        "Δ(Δ(f₁,…,f_{n−1}), f_n, …)".to_string()
    };
    let mut probe = NilpotencyProbe {
        spec: op.label(),
        composite,
        asserted: m == 1,
        trials: 0,
        nonzero: 0,
        witness: None,
    };
    let patterns = parity_patterns(&spec.space, n_args);
    let mut t = 0u64;
    for pattern in &patterns {
        for _ in 0..params.samples {
            let mut rng = trial_rng(params.seed, t);
            t += 1;
            let a = draw_args(&spec.space, pattern, params.max_degree, &mut rng)?;
            let inner = delta(op, &a[..m])?;
            let mut outer_args = vec![inner];
            outer_args.extend_from_slice(&a[m..]);
            let value = delta(op, &outer_args)?;
            probe.trials += 1;
            if !value.is_zero() {
                probe.nonzero += 1;
                if probe.witness.is_none() {
                    probe.witness = Some(NilpotencyWitness {
                        args: a.iter().map(|x| x.to_string()).collect(),
                        value: value.to_string(),
                    });
                }
            }
        }
    }
    Ok(probe)
}

/// Transcription of the closed-form divergence for the even bracket on
/// ℝ^{1|2} `(x, th1, th2)`, all derivatives right derivatives:
///
/// ```text
/// Δ(f,g) = (-1)^{|g|+1} ( f_{xθ1} g_{θ2} + f_{θ1} g_{xθ2} + f_{xθ2} g_{θ1} + f_{θ2} g_{xθ1} )
/// ```
///
/// The second summand's unbound index is read as θ1.
pub fn even_r12_closed_form_delta(f: &Supernumber, g: &Supernumber) -> Result<Supernumber> {
    let s = f.space();
    let (x, t1, t2) = (s.index_of("x"), s.index_of("th1"), s.index_of("th2"));
    let (Some(x), Some(t1), Some(t2)) = (x, t1, t2) else {
        return Err(Error::Precondition("closed form needs coordinates x, th1, th2".into()));
    };
    let pg = g.parity_bit().ok_or(Error::MixedParity(1))?;
    f.parity_bit().ok_or(Error::MixedParity(0))?;
    let d = |h: &Supernumber, i: usize| h.deriv_at(i, Side::Right);
    let dd = |h: &Supernumber, i: usize| d(&d(h, i), x);
    let sum = &(&(&dd(f, t1) * &d(g, t2)) + &(&d(f, t1) * &dd(g, t2)))
        + &(&(&dd(f, t2) * &d(g, t1)) + &(&d(f, t2) * &dd(g, t1)));
    Ok(sum.scale(&sign(pg as u32 + 1)))
}

/// Compares Δ computed from the divergence with the closed form above on
/// random homogeneous pairs. Disagreements are reported per sample.
pub fn cross_check_div_formula(params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let op = DeltaOperator::flat(crate::bracket::builtin("even_r12")?);
    let mut report = CheckReport::new("cross_check_div_formula", &op.spec.name, *params);
    report.note("unbound_index_read_as", "th1");
    run_trials(&mut report, &op.spec.space, 2, params, |a, _| {
        let general = dl(&op, a);
        let closed = even_r12_closed_form_delta(&a[0], &a[1])?;
        let observations = vec![
            ("negated_closed_form_agrees", general == -&closed),
            ("general_vanishes", general.is_zero()),
            ("closed_form_vanishes", closed.is_zero()),
        ];
        Ok(TrialOutcome { comparisons: vec![Comparison::new(general, closed)], observations })
    })?;
    Ok(report)
}

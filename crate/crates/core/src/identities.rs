//! Exact randomized checks of the graded Nambu-Poisson axioms for a
//! [`BracketSpec`].


use serde::Serialize;

use crate::bracket::{eval_bracket, BracketSpec};
use crate::error::{Error, Result};
use crate::graded::Supernumber;
use crate::laws::{fi_sides, genskew_sides, psum, skew_sides, GradedValue};
use crate::report::{draw_args, run_trials, trial_rng, CheckParams, CheckReport, Comparison, TrialOutcome};

pub use crate::report::Failure;

fn validate(params: &CheckParams) -> Result<()> {
    if params.samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    Ok(())
}

fn br(spec: &BracketSpec, args: &[Supernumber]) -> Supernumber {
    eval_bracket(spec, args).expect("harness arguments live in the spec space")
}

/// `{…,f_i,f_{i+1},…} = -(-1)^{|f_i||f_{i+1}|}{…,f_{i+1},f_i,…}` for slot
/// pairs starting at the second slot. The first-slot swap is only measured.
pub fn check_skew(spec: &BracketSpec, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("skew", &spec.name, *params);
    let bracket = |a: &[Supernumber]| br(spec, a);
    run_trials(&mut report, &spec.space, spec.arity, params, |args, p| {
        let mut out = TrialOutcome::default();
        for i in 1..spec.arity - 1 {
            let (lhs, rhs) = skew_sides(&bracket, args, p, i);
            out.comparisons.push(Comparison::labeled(format!("slots {},{}", i + 1, i + 2), lhs, rhs));
        }
        let (lhs, rhs) = skew_sides(&bracket, args, p, 0);
        out.observations.push(("first_slot_swap_holds", lhs == rhs));
        Ok(out)
    })?;
    Ok(report)
}

/// `{gh,f₂,…,f_n} = g{h,f₂,…} + (-1)^{(ε+Σ_{i≥2}|f_i|)|h|}{g,f₂,…}h`.
pub fn check_leibniz_first(spec: &BracketSpec, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("leibniz_first", &spec.name, *params);
    let n = spec.arity;
    // args: g, h, f₂ … f_n
    run_trials(&mut report, &spec.space, n + 1, params, |args, p| {
        let (g, h) = (&args[0], &args[1]);
        let tail = &args[2..];
        let with = |x: Supernumber| {
            let mut v = vec![x];
            v.extend_from_slice(tail);
            br(spec, &v)
        };
        let lhs = with(g * h);
        let e = (spec.epsilon as u32 + psum(&p[2..])) * p[1] as u32;
        let rhs = &(g * &with(h.clone())) + &(&with(g.clone()) * h).signed(e);
        Ok(vec![Comparison::new(lhs, rhs)].into())
    })?;
    Ok(report)
}

/// Product rule in slot i ≥ 2:
/// `{…,gh,…} = (-1)^{(Σ_{j>i}|f_j|)|h|}{…,g,…}h + (-1)^{(|h|+Σ_{j>i}|f_j|)|g|}{…,h,…}g`.
pub fn check_leibniz_inner(spec: &BracketSpec, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("leibniz_inner", &spec.name, *params);
    let n = spec.arity;
    // args: f₁ … f_n, h; slot i holds g = f_i.
    run_trials(&mut report, &spec.space, n + 1, params, |args, p| {
        let h = &args[n];
        let ph = p[n] as u32;
        let mut cmps = Vec::new();
        for i in 1..n {
            let g = &args[i];
            let pg = p[i] as u32;
            let after = psum(&p[i + 1..n]);
            let at = |x: Supernumber| {
                let mut v = args[..n].to_vec();
                v[i] = x;
                br(spec, &v)
            };
            let lhs = at(g * h);
            let rhs = &(&at(g.clone()) * h).signed(after * ph) + &(&at(h.clone()) * g).signed((ph + after) * pg);
            cmps.push(Comparison::labeled(format!("slot {}", i + 1), lhs, rhs));
        }
        Ok(cmps.into())
    })?;
    Ok(report)
}

/// `Σ_{i=1}^{n−1}(-1)^{i+1}{f,f₁,…,f_if_{i+1},…,f_n} + s·{f,f_nf₁,f₂,…,f_{n−1}} = 0`
/// with the alternating sign `s = (-1)^{n+1+|f_n|Σ_{j<n}|f_j|}` asserted.
/// The variant `s = (-1)^{n+|f_n|Σ_{j<n}|f_j|}` is tallied as the
/// `literal_sign_holds` diagnostic.
pub fn check_cyclic(spec: &BracketSpec, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("cyclic", &spec.name, *params);
    let n = spec.arity;
    // args: f, f₁ … f_n
    run_trials(&mut report, &spec.space, n + 1, params, |args, p| {
        let f = &args[0];
        let fs = &args[1..];
        let pf = &p[1..];
        let mut chain = f.zero_like();
        for i in 0..n - 1 {
            let mut v = vec![f.clone()];
            v.extend_from_slice(&fs[..i]);
            v.push(&fs[i] * &fs[i + 1]);
            v.extend_from_slice(&fs[i + 2..]);
            chain = chain.plus(&br(spec, &v).signed(i as u32));
        }
        let mut v = vec![f.clone(), &fs[n - 1] * &fs[0]];
        v.extend_from_slice(&fs[1..n - 1]);
        let wrap = br(spec, &v);
        let koszul = pf[n - 1] as u32 * psum(&pf[..n - 1]);
        let alternating = chain.plus(&wrap.signed(n as u32 + 1 + koszul));
        let literal = chain.plus(&wrap.signed(n as u32 + koszul));
        Ok(TrialOutcome {
            comparisons: vec![Comparison::new(alternating.clone(), alternating.zero_like())],
            observations: vec![("literal_sign_holds", literal.is_zero())],
        })
    })?;
    Ok(report)
}

/// Graded fundamental identity; see [`fi_sides`] for the sign factors.
pub fn check_fi(spec: &BracketSpec, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("fi", &spec.name, *params);
    let n = spec.arity;
    let bracket = |a: &[Supernumber]| br(spec, a);
    run_trials(&mut report, &spec.space, 2 * n - 1, params, |args, p| {
        let (lhs, rhs) = fi_sides(&bracket, spec.epsilon, &args[..n], &p[..n], &args[n..], &p[n..]);
        Ok(vec![Comparison::new(lhs, rhs)].into())
    })?;
    Ok(report)
}

/// Exchange identity for products of ternary brackets. With `{a,B}` the
/// bracket with first slot `a` and slots 2–3 from the pair `B`:
///
/// ```text
/// {f₁,G}{f₂,H} − (-1)^{|f₁||f₂|}{f₂,G}{f₁,H}
///   = −(-1)^{(|f₁|+|f₂|)(|g₁|+|g₂|)} [{g₁,F}{g₂,H} − (-1)^{|g₁||g₂|}{g₂,F}{g₁,H}]
/// ```
///
/// Only defined for arity 3; other arities yield an empty report.
pub fn check_generalized_skew(spec: &BracketSpec, params: &CheckParams) -> Result<CheckReport> {
    validate(params)?;
    let mut report = CheckReport::new("generalized_skew", &spec.name, *params);
    if spec.arity != 3 {
        report.note("applicable", false);
        return Ok(report);
    }
    // args: f₁ f₂ g₁ g₂ h₁ h₂
    run_trials(&mut report, &spec.space, 6, params, |a, p| {
        let (lhs, rhs) = genskew_sides(&|x: &[Supernumber]| br(spec, x), &|u, v| u * v, a, p);
        Ok(vec![Comparison::new(lhs, rhs)].into())
    })?;
    Ok(report)
}

/// Runs skew, both Leibniz rules, cyclic, FI and the exchange identity.
pub fn check_all(spec: &BracketSpec, params: &CheckParams) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_skew(spec, params)?,
        check_leibniz_first(spec, params)?,
        check_leibniz_inner(spec, params)?,
        check_cyclic(spec, params)?,
        check_fi(spec, params)?,
        check_generalized_skew(spec, params)?,
    ])
}

/// A witness that a bracket with frozen trailing slots breaks the FI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedFiWitness {
    pub trial: usize,
    pub g: Vec<String>,
    pub f: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestrictedFiSearch {
    pub spec: String,
    pub tail: Vec<String>,
    pub arity: usize,
    pub epsilon: u8,
    pub seed: u64,
    pub trials: usize,
    pub witness: Option<RestrictedFiWitness>,
}

/// Searches for an FI violation of `{f₁..f_p}' := {f₁..f_p, tail…}`.
///
/// The restricted bracket has degree `ε + Σ|tail|`; trials cycle through
/// all parity patterns and stop at the first violation.
pub fn find_restricted_fi_failure(
    spec: &BracketSpec,
    tail: &[Supernumber],
    params: &CheckParams,
) -> Result<RestrictedFiSearch> {
    validate(params)?;
    if tail.is_empty() || tail.len() >= spec.arity - 1 {
        return Err(Error::Precondition(format!(
            "tail length must be between 1 and {} for arity {}",
            spec.arity - 2,
            spec.arity
        )));
    }
    let p_ar = spec.arity - tail.len();
    let mut eps = spec.epsilon as u32;
    for (i, t) in tail.iter().enumerate() {
        if !crate::graded::same_space(t.space(), &spec.space) {
            return Err(Error::SpaceMismatch);
        }
        eps += t.parity_bit().ok_or(Error::MixedParity(i))? as u32;
    }
    let eps = (eps % 2) as u8;
    let restricted = |a: &[Supernumber]| {
        let mut v = a.to_vec();
        v.extend_from_slice(tail);
        br(spec, &v)
    };
    let n_args = 2 * p_ar - 1;
    let patterns = crate::report::parity_patterns(&spec.space, n_args);
    let mut search = RestrictedFiSearch {
        spec: spec.name.clone(),
        tail: tail.iter().map(|t| t.to_string()).collect(),
        arity: p_ar,
        epsilon: eps,
        seed: params.seed,
        trials: 0,
        witness: None,
    };
    let mut t = 0u64;
    for _ in 0..params.samples {
        for pattern in &patterns {
            let mut rng = trial_rng(params.seed, t);
            t += 1;
            let args = draw_args(&spec.space, pattern, params.max_degree, &mut rng)?;
            search.trials += 1;
            let (lhs, rhs) = fi_sides(&restricted, eps, &args[..p_ar], &pattern[..p_ar], &args[p_ar..], &pattern[p_ar..]);
            if lhs != rhs {
                search.witness = Some(RestrictedFiWitness {
                    trial: search.trials,
                    g: args[..p_ar].iter().map(|a| a.to_string()).collect(),
                    f: args[p_ar..].iter().map(|a| a.to_string()).collect(),
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
                return Ok(search);
            }
        }
    }
    Ok(search)
}

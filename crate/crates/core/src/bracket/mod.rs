//! n-ary super Nambu brackets defined by term lists, and the
//! Nambu-Hamiltonian vector fields they generate.

mod eval;
mod field;
mod spec;

pub use eval::{bracket_parity, eval_bracket};
pub use field::{apply_field, field_commutator, nh_field, Convention, VectorField};
pub use spec::{
    builtin, BracketSpec, BracketTerm, DerivDocument, SignRule, SlotDeriv, SpecDocument, TermDocument, BUILTIN_NAMES,
};

/// Loads a builtin by name, or a JSON spec document from a path.
pub fn load_spec(name_or_path: &str) -> crate::Result<BracketSpec> {
    if BUILTIN_NAMES.contains(&name_or_path) {
        return builtin(name_or_path);
    }
    let text = std::fs::read_to_string(name_or_path)
        .map_err(|e| crate::Error::InvalidSpec(format!("cannot read `{name_or_path}`: {e}")))?;
    BracketSpec::from_json(&text)
}

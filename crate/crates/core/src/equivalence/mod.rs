//! Elimination contexts, parallel disjunction equivalence and computational
//! equivalence, plus the term enumerators the harnesses run on.

mod context;
mod enumerate;

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

pub use context::{
    enumerate_elim_contexts, ContextBounds, ElimContext, Frame, DEFAULT_SLOT_BUDGET, MAX_TARGET_CONNECTIVES,
};
pub use enumerate::{enumerate_any, enumerate_terms, enumerate_terms_in, for_each_term, Sampler};

use crate::rewrite::{normal_form, squig_reachable, Rel, RewriteError, DEFAULT_FUSE};
use crate::syntax::{Mode, Prop, Term};
use crate::typing::{check, typable, Context, TypeError};

#[derive(Clone, Debug, Error)]
pub enum EquivError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("`{term}` has type {prop}, not a disjunction")]
    NotDisjunction { term: Term, prop: Prop },
    #[error("in context {context}: {error}")]
    Rewrite { context: String, error: RewriteError },
    #[error(transparent)]
    Fuse(#[from] RewriteError),
}

/// `t ≡∨ u`: the two terms share a `⇝`-reduct. Reducible input is accepted
/// and simply reduced along the way.
pub fn par_disj_equiv(t: &Term, u: &Term, mode: &Mode) -> Result<bool, EquivError> {
    for x in [t, u] {
        let j = typable(&Context::new(), x, mode)?;
        if !matches!(j.prop, Prop::Or(..)) {
            return Err(EquivError::NotDisjunction {
                term: x.clone(),
                prop: j.prop,
            });
        }
    }
    Ok(common_reduct(t, u, mode, DEFAULT_FUSE)?)
}

/// Whether the `⇝`-closures of `t` and `u` intersect.
pub fn common_reduct(t: &Term, u: &Term, mode: &Mode, fuse: usize) -> Result<bool, RewriteError> {
    if t == u {
        return Ok(true);
    }
    let a = squig_reachable(t, mode, fuse)?;
    let b = squig_reachable(u, mode, fuse)?;
    let (small, large) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    Ok(small.iter().any(|x| large.contains(x)))
}

#[derive(Clone, Debug)]
pub struct EquivOptions {
    pub bounds: ContextBounds,
    pub fuse: usize,
}

impl EquivOptions {
    pub fn new(max_context_size: usize) -> EquivOptions {
        EquivOptions {
            bounds: ContextBounds::new(max_context_size),
            fuse: DEFAULT_FUSE,
        }
    }
}

/// The outcome of one context: `K[t] →* v`, `K[u] →* w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextOutcome {
    pub context: ElimContext,
    pub v: Term,
    pub w: Term,
    pub equivalent: bool,
}

impl fmt::Display for ContextOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}",
            self.context,
            self.v,
            self.w,
            if self.equivalent { "equivalent" } else { "distinct" }
        )
    }
}

#[derive(Clone, Debug)]
pub struct EquivReport {
    pub verdict: bool,
    pub contexts_tried: usize,
    pub max_context_size: usize,
    pub slot_budget: usize,
    pub result: Prop,
    /// Outcomes in enumeration order.
    pub outcomes: Vec<ContextOutcome>,
}

impl EquivReport {
    /// The first distinguishing context in enumeration order.
    pub fn witness(&self) -> Option<&ContextOutcome> {
        self.outcomes.iter().find(|o| !o.equivalent)
    }
}

impl fmt::Display for EquivReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        write!(
            f,
            "verdict: {} ({} contexts, size <= {}, slots <= {}, result {})",
            if self.verdict { "equivalent" } else { "distinguished" },
            self.contexts_tried,
            self.max_context_size,
            self.slot_budget,
            self.result
        )
    }
}

/// `t ∼ u` at `A`, checked against every enumerated elimination context.
pub fn comp_equiv(t: &Term, u: &Term, a: &Prop, mode: &Mode, opts: &EquivOptions) -> Result<EquivReport, EquivError> {
    check(&Context::new(), t, a, mode)?;
    check(&Context::new(), u, a, mode)?;
    let contexts = enumerate_elim_contexts(a, &opts.bounds, mode);
    comp_equiv_in(t, u, &contexts, mode, opts)
}

/// As [`comp_equiv`], over a precomputed list of contexts.
pub fn comp_equiv_in(
    t: &Term,
    u: &Term,
    contexts: &[ElimContext],
    mode: &Mode,
    opts: &EquivOptions,
) -> Result<EquivReport, EquivError> {
    let outcomes = contexts
        .par_iter()
        .map(|k| {
            let wrap = |error| EquivError::Rewrite {
                context: k.to_string(),
                error,
            };
            let v = normal_form(&k.plug(t), Rel::Arrow, mode, opts.fuse).map_err(wrap)?;
            let w = normal_form(&k.plug(u), Rel::Arrow, mode, opts.fuse).map_err(wrap)?;
            let equivalent = common_reduct(&v, &w, mode, opts.fuse).map_err(wrap)?;
            Ok(ContextOutcome {
                context: k.clone(),
                v,
                w,
                equivalent,
            })
        })
        .collect::<Result<Vec<_>, EquivError>>()?;
    Ok(EquivReport {
        verdict: outcomes.iter().all(|o| o.equivalent),
        contexts_tried: outcomes.len(),
        max_context_size: opts.bounds.max_size,
        slot_budget: opts.bounds.slot_budget,
        result: opts.bounds.result.clone(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_prop, parse_term};

    fn pt(s: &str) -> Term {
        parse_term(s, &Mode::Plain).unwrap()
    }

    #[test]
    fn par_disj_examples() {
        let m = Mode::Plain;
        assert!(!par_disj_equiv(&pt("inl(*)"), &pt("inr(*)"), &m).unwrap());
        assert!(par_disj_equiv(&pt("inl(*)"), &pt("inl(*)"), &m).unwrap());
        assert!(par_disj_equiv(&pt("inr(*) || inl(*)"), &pt("inl(*) || inr(*)"), &m).unwrap());
        assert!(matches!(
            par_disj_equiv(&pt("*"), &pt("*"), &m),
            Err(EquivError::NotDisjunction { .. })
        ));
    }

    #[test]
    fn comp_equiv_examples() {
        let m = Mode::Plain;
        let o = EquivOptions::new(6);
        let or = parse_prop("Top \\/ Top").unwrap();
        let r = comp_equiv(&pt("inl(*) || inr(*)"), &pt("inr(*) || inl(*)"), &or, &m, &o).unwrap();
        assert!(r.verdict);
        let r = comp_equiv(&pt("\\x. x"), &pt("\\x. x || x"), &parse_prop("Top -> Top").unwrap(), &m, &o).unwrap();
        assert!(r.verdict);
        let r = comp_equiv(&pt("inl(*)"), &pt("inr(*)"), &or, &m, &o).unwrap();
        assert!(!r.verdict);
        assert!(r.witness().unwrap().context.frames.is_empty());
    }
}

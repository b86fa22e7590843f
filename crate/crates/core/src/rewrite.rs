//! Reduction `→`, the reshuffling rules `↪`, and the scheduled relation `⇝`.

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::syntax::{fresh_name, Mode, Path, Prop, Term};

pub const DEFAULT_FUSE: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Arrow,
    Squig,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rel::Arrow => "arrow",
            Rel::Squig => "squig",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: &'static str,
    pub path: Path,
    pub term: Term,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{} @ {} : {}", s.rule, s.path, s.term)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("fuse exhausted after {steps} steps, last term {last}")]
    Fuse { steps: usize, last: Term },
}

/// `\x. t || \y. u` contracts to one lambda; rename both bodies to a shared binder.
fn merge_lams(x: &crate::syntax::Name, t: &Term, y: &crate::syntax::Name, u: &Term) -> Term {
    if x == y {
        return Term::Lam(x.clone(), Box::new(Term::par(t.clone(), u.clone())));
    }
    let fu = u.free_vars();
    if !fu.contains(x) {
        return Term::Lam(
            x.clone(),
            Box::new(Term::par(t.clone(), u.subst(y, &Term::Var(x.clone())))),
        );
    }
    let mut avoid: HashSet<_> = t.free_vars();
    avoid.extend(fu);
    avoid.insert(x.clone());
    avoid.insert(y.clone());
    let z = fresh_name(x, &avoid);
    let zv = Term::Var(z.clone());
    Term::Lam(z, Box::new(Term::par(t.subst(x, &zv), u.subst(y, &zv))))
}

/// Root contraction by `→`.
pub fn arrow_root(t: &Term, mode: &Mode) -> Option<(&'static str, Term)> {
    let scal = mode.scalars();
    let idx = |s: &str| scal.and_then(|m| m.index_of(s));
    match t {
        Term::ElimTop(a, b) => match (&**a, scal) {
            (Term::Star, _) => Some(("dTop", (**b).clone())),
            (Term::SStar(s), Some(_)) => Some(("dTop-s", Term::SMul(s.clone(), b.clone()))),
            _ => None,
        },
        Term::App(f, u) => match &**f {
            Term::Lam(x, body) => Some(("beta", body.subst(x, u))),
            _ => None,
        },
        Term::Proj1(p) => match &**p {
            Term::Pair(a, _) => Some(("fst", (**a).clone())),
            _ => None,
        },
        Term::Proj2(p) => match &**p {
            Term::Pair(_, b) => Some(("snd", (**b).clone())),
            _ => None,
        },
        Term::ElimOr(s, x, u, y, v) => match &**s {
            Term::Inl(a) => Some(("dOr-inl", u.subst(x, a))),
            Term::Inr(b) => Some(("dOr-inr", v.subst(y, b))),
            Term::Par(a, b) => {
                let mk = |w: &Term| {
                    Term::ElimOr(Box::new(w.clone()), x.clone(), u.clone(), y.clone(), v.clone())
                };
                Some(("dOr-par", Term::par(mk(a), mk(b))))
            }
            _ => None,
        },
        Term::Par(a, b) => match (&**a, &**b) {
            (Term::Star, Term::Star) => Some(("par-star", Term::Star)),
            (Term::SStar(s1), Term::SStar(s2)) => {
                let (i, j) = (idx(s1)?, idx(s2)?);
                let m = scal?;
                Some(("par-sstar", Term::sstar(m.name(m.add(i, j)))))
            }
            (Term::Lam(x, t1), Term::Lam(y, u1)) => Some(("par-lam", merge_lams(x, t1, y, u1))),
            (Term::Pair(t1, v1), Term::Pair(u1, w1)) => Some((
                "par-pair",
                Term::pair(
                    Term::par((**t1).clone(), (**u1).clone()),
                    Term::par((**v1).clone(), (**w1).clone()),
                ),
            )),
            _ => None,
        },
        Term::SMul(s, a) => {
            scal?;
            let sm = |w: &Term| Term::SMul(s.clone(), Box::new(w.clone()));
            match &**a {
                Term::SStar(r) => {
                    let m = scal?;
                    let k = m.mul(idx(s)?, idx(r)?);
                    Some(("smul-sstar", Term::sstar(m.name(k))))
                }
                Term::Lam(x, b) => Some(("smul-lam", Term::Lam(x.clone(), Box::new(sm(b))))),
                Term::Pair(p, q) => Some(("smul-pair", Term::pair(sm(p), sm(q)))),
                Term::Inl(b) => Some(("smul-inl", Term::inl(sm(b)))),
                Term::Inr(b) => Some(("smul-inr", Term::inr(sm(b)))),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Root contraction by one of the eight `↪` rules.
pub fn hook_root(t: &Term) -> Option<(&'static str, Term)> {
    use Term::{Inl, Inr, Par};
    let (a, b) = match t {
        Par(a, b) => (&**a, &**b),
        _ => return None,
    };
    let p = |x: &Term, y: &Term| Term::par(x.clone(), y.clone());
    let l = |x: Term| Term::inl(x);
    let r = |x: Term| Term::inr(x);
    match (a, b) {
        (Inl(t1), Inl(t2)) => Some(("hook-l-l", l(p(t1, t2)))),
        (Inl(t1), Par(c, d)) => match (&**c, &**d) {
            (Inl(t2), Inr(u)) => Some(("hook-l-lr", p(&l(p(t1, t2)), &r((**u).clone())))),
            _ => None,
        },
        (Inr(u), Inl(t1)) => Some(("hook-r-l", p(&l((**t1).clone()), &r((**u).clone())))),
        (Inr(u1), Inr(u2)) => Some(("hook-r-r", r(p(u1, u2)))),
        (Inr(u1), Par(c, d)) => match (&**c, &**d) {
            (Inl(t1), Inr(u2)) => Some(("hook-r-lr", p(&l((**t1).clone()), &r(p(u1, u2))))),
            _ => None,
        },
        (Par(c, d), e) => {
            let (t1, u1) = match (&**c, &**d) {
                (Inl(t1), Inr(u1)) => (t1, u1),
                _ => return None,
            };
            match e {
                Inl(t2) => Some(("hook-lr-l", p(&l(p(t1, t2)), &r((**u1).clone())))),
                Inr(u2) => Some(("hook-lr-r", p(&l((**t1).clone()), &r(p(u1, u2))))),
                Par(f, g) => match (&**f, &**g) {
                    (Inl(t2), Inr(u2)) => Some(("hook-lr-lr", p(&l(p(t1, t2)), &r(p(u1, u2))))),
                    _ => None,
                },
                _ => None,
            }
        }
        _ => None,
    }
}

type RootFn<'a> = dyn Fn(&Term) -> Option<(&'static str, Term)> + 'a;

fn first_redex(t: &Term, root: &RootFn, path: &mut Vec<usize>) -> Option<(&'static str, Path, Term)> {
    if let Some((rule, c)) = root(t) {
        return Some((rule, Path(path.clone()), c));
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        let r = first_redex(c, root, path);
        path.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

fn all_redexes(t: &Term, root: &RootFn, path: &mut Vec<usize>, out: &mut Vec<(&'static str, Path, Term)>) {
    if let Some((rule, c)) = root(t) {
        out.push((rule, Path(path.clone()), c));
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        all_redexes(c, root, path, out);
        path.pop();
    }
}

fn apply(t: &Term, (rule, path, c): (&'static str, Path, Term)) -> Step {
    let term = t.replace_at(&path, c).expect("redex path is valid");
    Step { rule, path, term }
}

/// One `→` step at the leftmost-outermost redex.
pub fn arrow_step(t: &Term, mode: &Mode) -> Option<Step> {
    let root = |s: &Term| arrow_root(s, mode);
    first_redex(t, &root, &mut Vec::new()).map(|r| apply(t, r))
}

/// One `↪` step at the leftmost-outermost redex, ignoring the `→` guard.
pub fn hook_step(t: &Term) -> Option<Step> {
    first_redex(t, &hook_root, &mut Vec::new()).map(|r| apply(t, r))
}

/// One step of `rel`; `⇝` only uses `↪` once no `→` redex remains anywhere.
pub fn step(t: &Term, rel: Rel, mode: &Mode) -> Option<Step> {
    match rel {
        Rel::Arrow => arrow_step(t, mode),
        Rel::Squig => arrow_step(t, mode).or_else(|| hook_step(t)),
    }
}

pub fn arrow_successors(t: &Term, mode: &Mode) -> Vec<Step> {
    let root = |s: &Term| arrow_root(s, mode);
    let mut out = Vec::new();
    all_redexes(t, &root, &mut Vec::new(), &mut out);
    out.into_iter().map(|r| apply(t, r)).collect()
}

pub fn hook_successors(t: &Term) -> Vec<Step> {
    let mut out = Vec::new();
    all_redexes(t, &hook_root, &mut Vec::new(), &mut out);
    out.into_iter().map(|r| apply(t, r)).collect()
}

/// Every one-step reduct of `t` under `rel`, in pre-order of redex position.
pub fn successors(t: &Term, rel: Rel, mode: &Mode) -> Vec<Step> {
    let arrow = arrow_successors(t, mode);
    match rel {
        Rel::Squig if arrow.is_empty() => hook_successors(t),
        _ => arrow,
    }
}

/// `→ ∪ ↪` with no scheduling. This relation is not confluent and exists only
/// to exhibit that.
pub fn unscheduled_successors(t: &Term, mode: &Mode) -> Vec<Step> {
    let mut out = arrow_successors(t, mode);
    out.extend(hook_successors(t));
    out
}

pub fn normalize(t: &Term, rel: Rel, mode: &Mode, fuse: usize) -> Result<(Term, Trace), RewriteError> {
    let mut cur = t.erase_annotations();
    let mut trace = Trace::default();
    while let Some(s) = step(&cur, rel, mode) {
        if trace.steps.len() >= fuse {
            return Err(RewriteError::Fuse {
                steps: trace.steps.len(),
                last: cur,
            });
        }
        cur = s.term.clone();
        trace.steps.push(s);
    }
    Ok((cur, trace))
}

/// Normal form without keeping a trace.
pub fn normal_form(t: &Term, rel: Rel, mode: &Mode, fuse: usize) -> Result<Term, RewriteError> {
    let mut cur = t.erase_annotations();
    let mut n = 0;
    while let Some(s) = step(&cur, rel, mode) {
        if n >= fuse {
            return Err(RewriteError::Fuse { steps: n, last: cur });
        }
        n += 1;
        cur = s.term;
    }
    Ok(cur)
}

pub fn is_normal(t: &Term, rel: Rel, mode: &Mode) -> bool {
    step(t, rel, mode).is_none()
}

/// The partial measure on terms built from `inl`, `inr` and `||`.
pub fn measure(t: &Term) -> Option<u64> {
    match t {
        Term::Inl(_) | Term::Inr(_) => Some(1),
        Term::Par(a, b) => match &**a {
            Term::Inl(_) => Some(1 + measure(b)?),
            Term::Inr(_) => Some(2 + measure(b)?),
            _ => Some(measure(a)? + measure(b)?),
        },
        _ => None,
    }
}

/// Every term reachable from `t` by `⇝`, including `t`, in breadth-first order.
pub fn squig_reachable(t: &Term, mode: &Mode, fuse: usize) -> Result<IndexSet<Term>, RewriteError> {
    let start = t.erase_annotations();
    let mut seen = IndexSet::new();
    seen.insert(start);
    let mut i = 0;
    while i < seen.len() {
        if seen.len() > fuse {
            return Err(RewriteError::Fuse {
                steps: seen.len(),
                last: seen[i].clone(),
            });
        }
        let cur = seen[i].clone();
        for s in successors(&cur, Rel::Squig, mode) {
            seen.insert(s.term);
        }
        i += 1;
    }
    Ok(seen)
}

/// The `⇝`-normal members of the reachable set.
pub fn squig_terminals(t: &Term, mode: &Mode, fuse: usize) -> Result<Vec<Term>, RewriteError> {
    Ok(squig_reachable(t, mode, fuse)?
        .into_iter()
        .filter(|u| is_normal(u, Rel::Squig, mode))
        .collect())
}

/// Which clause of the introduction property a closed normal form satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntroClass {
    Star,
    Lam,
    Pair,
    /// Built from `inl`, `inr` and `||`.
    OrTree,
    Inl,
    Inr,
    InlInr,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no introduction clause for {term} at {prop} ({rel})")]
pub struct IpViolation {
    pub term: Term,
    pub prop: Prop,
    pub rel: Rel,
}

fn or_tree(t: &Term) -> bool {
    match t {
        Term::Inl(_) | Term::Inr(_) => true,
        Term::Par(a, b) => or_tree(a) && or_tree(b),
        _ => false,
    }
}

pub fn classify_normal(t: &Term, a: &Prop, rel: Rel, mode: &Mode) -> Result<IntroClass, IpViolation> {
    let class = match (a, t) {
        (Prop::Top, Term::Star) if !mode.is_algebraic() => Some(IntroClass::Star),
        (Prop::Top, Term::SStar(_)) if mode.is_algebraic() => Some(IntroClass::Star),
        (Prop::Imp(..), Term::Lam(..)) => Some(IntroClass::Lam),
        (Prop::And(..), Term::Pair(..)) => Some(IntroClass::Pair),
        (Prop::Or(..), _) => match (rel, t) {
            (Rel::Arrow, _) if or_tree(t) => Some(IntroClass::OrTree),
            (Rel::Squig, Term::Inl(_)) => Some(IntroClass::Inl),
            (Rel::Squig, Term::Inr(_)) => Some(IntroClass::Inr),
            (Rel::Squig, Term::Par(l, r))
                if matches!(**l, Term::Inl(_)) && matches!(**r, Term::Inr(_)) =>
            {
                Some(IntroClass::InlInr)
            }
            _ => None,
        },
        _ => None,
    };
    class.ok_or_else(|| IpViolation {
        term: t.clone(),
        prop: a.clone(),
        rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, BiMagma};

    fn pt(s: &str) -> Term {
        parse_term(s, &Mode::Plain).unwrap()
    }

    fn one(s: &str, rel: Rel) -> (String, Term) {
        let st = step(&pt(s), rel, &Mode::Plain).unwrap();
        (st.rule.to_string(), st.term)
    }

    #[test]
    fn root_rules() {
        assert_eq!(one("dTop(*, t)", Rel::Arrow).1, pt("t"));
        assert_eq!(one("(\\x. <x,x>) u", Rel::Arrow).1, pt("<u,u>"));
        assert_eq!(
            one("dOr(t||u, x.v, y.w)", Rel::Arrow).1,
            pt("dOr(t, x.v, y.w) || dOr(u, x.v, y.w)")
        );
        assert_eq!(one("(\\x. x) || (\\y. *)", Rel::Arrow).1, pt("\\z. z || *"));
        assert_eq!(one("(\\x. y) || (\\y. x)", Rel::Arrow).1, pt("\\z. y || x"));
        assert_eq!(one("inr(u) || inl(t)", Rel::Squig).1, pt("inl(t) || inr(u)"));
        assert!(step(&pt("inr(u) || inl(t)"), Rel::Arrow, &Mode::Plain).is_none());
    }

    #[test]
    fn scalar_rules() {
        let m = Mode::algebraic(BiMagma::z4());
        let t = parse_term("sstar(3) || sstar(2)", &m).unwrap();
        assert_eq!(step(&t, Rel::Arrow, &m).unwrap().term, Term::sstar("1"));
        let t = parse_term("smul(2, inl(x))", &m).unwrap();
        assert_eq!(step(&t, Rel::Arrow, &m).unwrap().term, parse_term("inl(smul(2, x))", &m).unwrap());
        let t = parse_term("smul(2, (\\x. sstar(1)) sstar(3))", &m).unwrap();
        assert_eq!(normalize(&t, Rel::Arrow, &m, 100).unwrap().0, Term::sstar("2"));
        let t = parse_term("(\\x. sstar(1)) smul(2, sstar(3))", &m).unwrap();
        assert_eq!(normalize(&t, Rel::Arrow, &m, 100).unwrap().0, Term::sstar("1"));
    }

    #[test]
    fn normalization_and_trace() {
        let (nf, tr) = normalize(&pt("* || *"), Rel::Arrow, &Mode::Plain, 10).unwrap();
        assert_eq!(nf, Term::Star);
        assert_eq!(tr.to_string(), "par-star @ root : *\n");
        let (nf, _) = normalize(&pt("<a,b> || <c,d>"), Rel::Arrow, &Mode::Plain, 10).unwrap();
        assert_eq!(nf, pt("<a || c,b || d>"));
        let omega = pt("(\\x. x x) (\\x. x x)");
        assert!(matches!(
            normalize(&omega, Rel::Arrow, &Mode::Plain, 50),
            Err(RewriteError::Fuse { .. })
        ));
    }

    #[test]
    fn leftmost_outermost_paths() {
        let st = step(&pt("<* || *, * || *>"), Rel::Arrow, &Mode::Plain).unwrap();
        assert_eq!(st.path, Path(vec![0]));
        let st = step(&pt("inl(inl(a) || inl(b)) || inr(c)"), Rel::Squig, &Mode::Plain).unwrap();
        assert_eq!(st.path, Path(vec![0, 0]));
    }

    #[test]
    fn measures() {
        assert_eq!(measure(&pt("inl(*)")), Some(1));
        assert_eq!(measure(&pt("inr(*) || inl(*)")), Some(3));
        assert_eq!(measure(&pt("inl(*) || inr(*)")), Some(2));
        assert_eq!(measure(&pt("*")), None);
    }

    #[test]
    fn reachable_sets() {
        let r = squig_reachable(&pt("inr(*) || inl(*)"), &Mode::Plain, 100).unwrap();
        let want: IndexSet<Term> = [pt("inr(*) || inl(*)"), pt("inl(*) || inr(*)")].into_iter().collect();
        assert_eq!(r, want);
        assert_eq!(squig_reachable(&Term::Star, &Mode::Plain, 100).unwrap().len(), 1);
    }

    #[test]
    fn intro_classes() {
        let m = Mode::Plain;
        let oo = Prop::or(Prop::Top, Prop::Top);
        assert_eq!(classify_normal(&Term::Star, &Prop::Top, Rel::Arrow, &m), Ok(IntroClass::Star));
        assert_eq!(
            classify_normal(&pt("inl(*) || inr(*)"), &oo, Rel::Squig, &m),
            Ok(IntroClass::InlInr)
        );
        assert_eq!(
            classify_normal(&pt("inr(*) || inr(*)"), &oo, Rel::Arrow, &m),
            Ok(IntroClass::OrTree)
        );
        assert!(classify_normal(&pt("inr(*) || inl(*)"), &oo, Rel::Squig, &m).is_err());
    }
}

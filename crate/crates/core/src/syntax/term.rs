use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::Prop;

pub type Name = Arc<str>;

/// Proof-terms. Equality and hashing ignore the choice of bound names.
#[derive(Clone, Debug)]
pub enum Term {
    Var(Name),
    Par(Box<Term>, Box<Term>),
    Star,
    SStar(Name),
    SMul(Name, Box<Term>),
    ElimTop(Box<Term>, Box<Term>),
    ElimBot(Box<Term>),
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj1(Box<Term>),
    Proj2(Box<Term>),
    Inl(Box<Term>),
    Inr(Box<Term>),
    ElimOr(Box<Term>, Name, Box<Term>, Name, Box<Term>),
    /// Type ascription `(t : A)`.
    Ann(Box<Term>, Prop),
}

/// Child-index path from the root of a term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<usize>);

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.into())
    }
    pub fn par(a: Term, b: Term) -> Term {
        Term::Par(Box::new(a), Box::new(b))
    }
    pub fn sstar(s: &str) -> Term {
        Term::SStar(s.into())
    }
    pub fn smul(s: &str, t: Term) -> Term {
        Term::SMul(s.into(), Box::new(t))
    }
    pub fn elim_top(a: Term, b: Term) -> Term {
        Term::ElimTop(Box::new(a), Box::new(b))
    }
    pub fn elim_bot(a: Term) -> Term {
        Term::ElimBot(Box::new(a))
    }
    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(x.into(), Box::new(body))
    }
    pub fn app(a: Term, b: Term) -> Term {
        Term::App(Box::new(a), Box::new(b))
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }
    pub fn fst(a: Term) -> Term {
        Term::Proj1(Box::new(a))
    }
    pub fn snd(a: Term) -> Term {
        Term::Proj2(Box::new(a))
    }
    pub fn inl(a: Term) -> Term {
        Term::Inl(Box::new(a))
    }
    pub fn inr(a: Term) -> Term {
        Term::Inr(Box::new(a))
    }
    pub fn elim_or(t: Term, x: &str, u: Term, y: &str, v: Term) -> Term {
        Term::ElimOr(Box::new(t), x.into(), Box::new(u), y.into(), Box::new(v))
    }
    pub fn ann(t: Term, a: Prop) -> Term {
        Term::Ann(Box::new(t), a)
    }

    /// Number of nodes; ascriptions are transparent.
    pub fn size(&self) -> usize {
        match self {
            Term::Ann(t, _) => t.size(),
            _ => 1 + self.children().iter().map(|c| c.size()).sum::<usize>(),
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Star | Term::SStar(_) => vec![],
            Term::SMul(_, t)
            | Term::ElimBot(t)
            | Term::Lam(_, t)
            | Term::Proj1(t)
            | Term::Proj2(t)
            | Term::Inl(t)
            | Term::Inr(t)
            | Term::Ann(t, _) => vec![t],
            Term::Par(a, b) | Term::ElimTop(a, b) | Term::App(a, b) | Term::Pair(a, b) => {
                vec![a, b]
            }
            Term::ElimOr(t, _, u, _, v) => vec![t, u, v],
        }
    }

    pub fn child_mut(&mut self, i: usize) -> Option<&mut Term> {
        match (self, i) {
            (
                Term::SMul(_, t)
                | Term::ElimBot(t)
                | Term::Lam(_, t)
                | Term::Proj1(t)
                | Term::Proj2(t)
                | Term::Inl(t)
                | Term::Inr(t)
                | Term::Ann(t, _),
                0,
            ) => Some(t),
            (Term::Par(a, _) | Term::ElimTop(a, _) | Term::App(a, _) | Term::Pair(a, _), 0) => {
                Some(a)
            }
            (Term::Par(_, b) | Term::ElimTop(_, b) | Term::App(_, b) | Term::Pair(_, b), 1) => {
                Some(b)
            }
            (Term::ElimOr(t, ..), 0) => Some(t),
            (Term::ElimOr(_, _, u, _, _), 1) => Some(u),
            (Term::ElimOr(_, _, _, _, v), 2) => Some(v),
            _ => None,
        }
    }

    pub fn at(&self, path: &Path) -> Option<&Term> {
        let mut cur = self;
        for &i in &path.0 {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Copy of `self` with the subterm at `path` replaced.
    pub fn replace_at(&self, path: &Path, new: Term) -> Option<Term> {
        let mut out = self.clone();
        let mut cur = &mut out;
        for &i in &path.0 {
            cur = cur.child_mut(i)?;
        }
        *cur = new;
        Some(out)
    }

    pub fn erase_annotations(&self) -> Term {
        let mut t = self.clone();
        t.erase_in_place();
        t
    }

    fn erase_in_place(&mut self) {
        while let Term::Ann(inner, _) = self {
            let inner = std::mem::replace(inner.as_mut(), Term::Star);
            *self = inner;
        }
        let mut i = 0;
        while let Some(c) = self.child_mut(i) {
            c.erase_in_place();
            i += 1;
        }
    }

    pub fn has_annotations(&self) -> bool {
        matches!(self, Term::Ann(..)) || self.children().iter().any(|c| c.has_annotations())
    }

    pub fn free_vars(&self) -> HashSet<Name> {
        let mut out = HashSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut HashSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::ElimOr(t, x, u, y, v) => {
                t.collect_free(bound, out);
                bound.push(x.clone());
                u.collect_free(bound, out);
                bound.pop();
                bound.push(y.clone());
                v.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Capture-avoiding substitution `(u/x)self`.
    pub fn subst(&self, x: &str, u: &Term) -> Term {
        let fv = u.free_vars();
        self.subst_with(x, u, &fv)
    }

    fn subst_with(&self, x: &str, u: &Term, fv_u: &HashSet<Name>) -> Term {
        let go = |t: &Term| Box::new(t.subst_with(x, u, fv_u));
        match self {
            Term::Var(y) => {
                if &**y == x {
                    u.clone()
                } else {
                    self.clone()
                }
            }
            Term::Star | Term::SStar(_) => self.clone(),
            Term::Lam(y, b) => {
                let (y, b) = subst_binder(y, b, x, u, fv_u);
                Term::Lam(y, Box::new(b))
            }
            Term::ElimOr(t, y, a, z, b) => {
                let (y, a) = subst_binder(y, a, x, u, fv_u);
                let (z, b) = subst_binder(z, b, x, u, fv_u);
                Term::ElimOr(go(t), y, Box::new(a), z, Box::new(b))
            }
            Term::Par(a, b) => Term::Par(go(a), go(b)),
            Term::SMul(s, a) => Term::SMul(s.clone(), go(a)),
            Term::ElimTop(a, b) => Term::ElimTop(go(a), go(b)),
            Term::ElimBot(a) => Term::ElimBot(go(a)),
            Term::App(a, b) => Term::App(go(a), go(b)),
            Term::Pair(a, b) => Term::Pair(go(a), go(b)),
            Term::Proj1(a) => Term::Proj1(go(a)),
            Term::Proj2(a) => Term::Proj2(go(a)),
            Term::Inl(a) => Term::Inl(go(a)),
            Term::Inr(a) => Term::Inr(go(a)),
            Term::Ann(a, p) => Term::Ann(go(a), p.clone()),
        }
    }

    fn eq_in(&self, other: &Term, la: &mut Vec<Name>, lb: &mut Vec<Name>) -> bool {
        fn bind<R>(
            la: &mut Vec<Name>,
            lb: &mut Vec<Name>,
            x: &Name,
            y: &Name,
            f: impl FnOnce(&mut Vec<Name>, &mut Vec<Name>) -> R,
        ) -> R {
            la.push(x.clone());
            lb.push(y.clone());
            let r = f(la, lb);
            la.pop();
            lb.pop();
            r
        }
        match (self, other) {
            (Term::Var(x), Term::Var(y)) => {
                let i = la.iter().rposition(|n| n == x);
                let j = lb.iter().rposition(|n| n == y);
                match (i, j) {
                    (Some(i), Some(j)) => la.len() - i == lb.len() - j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Star, Term::Star) => true,
            (Term::SStar(s), Term::SStar(r)) => s == r,
            (Term::SMul(s, a), Term::SMul(r, b)) => s == r && a.eq_in(b, la, lb),
            (Term::Lam(x, a), Term::Lam(y, b)) => bind(la, lb, x, y, |la, lb| a.eq_in(b, la, lb)),
            (Term::ElimOr(t, x, u, y, v), Term::ElimOr(t2, x2, u2, y2, v2)) => {
                t.eq_in(t2, la, lb)
                    && bind(la, lb, x, x2, |la, lb| u.eq_in(u2, la, lb))
                    && bind(la, lb, y, y2, |la, lb| v.eq_in(v2, la, lb))
            }
            (Term::Par(a, b), Term::Par(c, d))
            | (Term::ElimTop(a, b), Term::ElimTop(c, d))
            | (Term::App(a, b), Term::App(c, d))
            | (Term::Pair(a, b), Term::Pair(c, d)) => a.eq_in(c, la, lb) && b.eq_in(d, la, lb),
            (Term::ElimBot(a), Term::ElimBot(b))
            | (Term::Proj1(a), Term::Proj1(b))
            | (Term::Proj2(a), Term::Proj2(b))
            | (Term::Inl(a), Term::Inl(b))
            | (Term::Inr(a), Term::Inr(b)) => a.eq_in(b, la, lb),
            (Term::Ann(a, p), Term::Ann(b, q)) => p == q && a.eq_in(b, la, lb),
            _ => false,
        }
    }

    fn hash_in<H: Hasher>(&self, bound: &mut Vec<Name>, h: &mut H) {
        std::mem::discriminant(self).hash(h);
        match self {
            Term::Var(x) => match bound.iter().rposition(|n| n == x) {
                Some(i) => (0u8, bound.len() - i).hash(h),
                None => (1u8, x).hash(h),
            },
            Term::Star => {}
            Term::SStar(s) => s.hash(h),
            Term::SMul(s, a) => {
                s.hash(h);
                a.hash_in(bound, h);
            }
            Term::Lam(x, a) => {
                bound.push(x.clone());
                a.hash_in(bound, h);
                bound.pop();
            }
            Term::ElimOr(t, x, u, y, v) => {
                t.hash_in(bound, h);
                bound.push(x.clone());
                u.hash_in(bound, h);
                bound.pop();
                bound.push(y.clone());
                v.hash_in(bound, h);
                bound.pop();
            }
            Term::Ann(a, p) => {
                p.hash(h);
                a.hash_in(bound, h);
            }
            _ => {
                for c in self.children() {
                    c.hash_in(bound, h);
                }
            }
        }
    }
}

fn subst_binder(
    y: &Name,
    body: &Term,
    x: &str,
    u: &Term,
    fv_u: &HashSet<Name>,
) -> (Name, Term) {
    if &**y == x {
        return (y.clone(), body.clone());
    }
    if fv_u.contains(y) && body.free_vars().iter().any(|n| &**n == x) {
        let mut avoid = fv_u.clone();
        avoid.extend(body.free_vars());
        avoid.insert(x.into());
        let y2 = fresh_name(y, &avoid);
        let renamed = body.subst(y, &Term::Var(y2.clone()));
        return (y2.clone(), renamed.subst_with(x, u, fv_u));
    }
    (y.clone(), body.subst_with(x, u, fv_u))
}

/// `base` with primes appended until it avoids every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &HashSet<Name>) -> Name {
    let mut cand = format!("{base}'");
    while avoid.contains(cand.as_str()) {
        cand.push('\'');
    }
    cand.into()
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.eq_in(other, &mut Vec::new(), &mut Vec::new())
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.hash_in(&mut Vec::new(), state)
    }
}

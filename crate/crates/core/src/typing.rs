//! Type checking and inference for the deduction rules, by unification.
//!
//! Lambdas carry no domain annotation, so both `infer` and `check` work over
//! metavariables. `infer` insists that the resulting proposition is fully
//! determined; metavariables that only occur in cut positions (an argument
//! type, a discarded branch) are defaulted to ⊤.

use std::fmt;

use thiserror::Error;

use crate::syntax::{Mode, Name, Path, Prop, Term};

/// Ordered typing context. Index 0 is the head, so `x:A, Γ` puts `x` first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    entries: Vec<(Name, Prop)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    /// Fails if a name repeats.
    pub fn from_entries(entries: Vec<(Name, Prop)>) -> Option<Context> {
        for (i, (x, _)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(y, _)| y == x) {
                return None;
            }
        }
        Some(Context { entries })
    }

    /// `x:A, self`, or `None` if `x` is already bound.
    pub fn extend(&self, x: &str, a: Prop) -> Option<Context> {
        if self.lookup(x).is_some() {
            return None;
        }
        let mut entries = vec![(x.into(), a)];
        entries.extend(self.entries.iter().cloned());
        Some(Context { entries })
    }

    /// Depth and proposition of `x`.
    pub fn lookup(&self, x: &str) -> Option<(usize, &Prop)> {
        self.entries
            .iter()
            .position(|(y, _)| &**y == x)
            .map(|i| (i, &self.entries[i].1))
    }

    pub fn entries(&self) -> &[(Name, Prop)] {
        &self.entries
    }

    pub fn props(&self) -> Vec<Prop> {
        self.entries.iter().map(|(_, p)| p.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, p)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} : {p}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Ax,
    Par,
    TopI,
    TopE,
    BotE,
    ImpI,
    ImpE,
    AndI,
    AndE1,
    AndE2,
    OrI1,
    OrI2,
    OrE,
    TopIS,
    ProdS,
    Ann,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "ax",
            Rule::Par => "par",
            Rule::TopI => "top-i",
            Rule::TopE => "top-e",
            Rule::BotE => "bot-e",
            Rule::ImpI => "imp-i",
            Rule::ImpE => "imp-e",
            Rule::AndI => "and-i",
            Rule::AndE1 => "and-e1",
            Rule::AndE2 => "and-e2",
            Rule::OrI1 => "or-i1",
            Rule::OrI2 => "or-i2",
            Rule::OrE => "or-e",
            Rule::TopIS => "top-i(s)",
            Rule::ProdS => "prod(s)",
            Rule::Ann => "ann",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("{rule} at {path}: unbound variable `{name}`")]
    Unbound { rule: Rule, path: Path, name: String },
    #[error("{rule} at {path}: expected {expected}, found {found}")]
    Mismatch {
        rule: Rule,
        path: Path,
        expected: String,
        found: String,
    },
    #[error("{rule} at {path}: branch types differ ({left} vs {right})")]
    BranchMismatch {
        rule: Rule,
        path: Path,
        left: String,
        right: String,
    },
    #[error("{rule} at {path}: missing annotation, the proposition is not determined")]
    MissingAnnotation { rule: Rule, path: Path },
    #[error("{rule} at {path}: {what} is not available in {mode} mode")]
    WrongMode {
        rule: Rule,
        path: Path,
        what: &'static str,
        mode: &'static str,
    },
    #[error("{rule} at {path}: unknown scalar `{name}`")]
    UnknownScalar { rule: Rule, path: Path, name: String },
}

impl TypeError {
    pub fn rule(&self) -> Rule {
        match self {
            TypeError::Unbound { rule, .. }
            | TypeError::Mismatch { rule, .. }
            | TypeError::BranchMismatch { rule, .. }
            | TypeError::MissingAnnotation { rule, .. }
            | TypeError::WrongMode { rule, .. }
            | TypeError::UnknownScalar { rule, .. } => *rule,
        }
    }

    pub fn path(&self) -> &Path {
        match self {
            TypeError::Unbound { path, .. }
            | TypeError::Mismatch { path, .. }
            | TypeError::BranchMismatch { path, .. }
            | TypeError::MissingAnnotation { path, .. }
            | TypeError::WrongMode { path, .. }
            | TypeError::UnknownScalar { path, .. } => path,
        }
    }
}

/// Derivation tree; premises follow the term's children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub prop: Prop,
    pub premises: Vec<Derivation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub ctx: Context,
    pub term: Term,
    pub prop: Prop,
    pub derivation: Derivation,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ctx.is_empty() {
            write!(f, "{} ", self.ctx)?;
        }
        write!(f, "|- {} : {}", self.term, self.prop)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    Top,
    Bot,
    Meta(usize),
    Imp(Box<Ty>, Box<Ty>),
    And(Box<Ty>, Box<Ty>),
    Or(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn of(p: &Prop) -> Ty {
        match p {
            Prop::Top => Ty::Top,
            Prop::Bot => Ty::Bot,
            Prop::Imp(a, b) => Ty::Imp(Box::new(Ty::of(a)), Box::new(Ty::of(b))),
            Prop::And(a, b) => Ty::And(Box::new(Ty::of(a)), Box::new(Ty::of(b))),
            Prop::Or(a, b) => Ty::Or(Box::new(Ty::of(a)), Box::new(Ty::of(b))),
        }
    }

    fn imp(a: Ty, b: Ty) -> Ty {
        Ty::Imp(Box::new(a), Box::new(b))
    }
    fn and(a: Ty, b: Ty) -> Ty {
        Ty::And(Box::new(a), Box::new(b))
    }
    fn or(a: Ty, b: Ty) -> Ty {
        Ty::Or(Box::new(a), Box::new(b))
    }

    fn first_meta(&self) -> Option<usize> {
        match self {
            Ty::Top | Ty::Bot => None,
            Ty::Meta(m) => Some(*m),
            Ty::Imp(a, b) | Ty::And(a, b) | Ty::Or(a, b) => a.first_meta().or_else(|| b.first_meta()),
        }
    }

    fn ground(&self) -> Prop {
        match self {
            Ty::Top | Ty::Meta(_) => Prop::Top,
            Ty::Bot => Prop::Bot,
            Ty::Imp(a, b) => Prop::imp(a.ground(), b.ground()),
            Ty::And(a, b) => Prop::and(a.ground(), b.ground()),
            Ty::Or(a, b) => Prop::or(a.ground(), b.ground()),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Ty, level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let own = match t {
                Ty::Top | Ty::Bot | Ty::Meta(_) => 3,
                Ty::Imp(..) => 0,
                Ty::Or(..) => 1,
                Ty::And(..) => 2,
            };
            if own < level {
                f.write_str("(")?;
            }
            match t {
                Ty::Top => f.write_str("Top")?,
                Ty::Bot => f.write_str("Bot")?,
                Ty::Meta(_) => f.write_str("_")?,
                Ty::Imp(a, b) => {
                    go(a, 1, f)?;
                    f.write_str(" -> ")?;
                    go(b, 0, f)?;
                }
                Ty::Or(a, b) => {
                    go(a, 1, f)?;
                    f.write_str(" \\/ ")?;
                    go(b, 2, f)?;
                }
                Ty::And(a, b) => {
                    go(a, 2, f)?;
                    f.write_str(" /\\ ")?;
                    go(b, 3, f)?;
                }
            }
            if own < level {
                f.write_str(")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

struct Node {
    rule: Rule,
    ty: Ty,
    kids: Vec<Node>,
}

struct Elab<'m> {
    mode: &'m Mode,
    sol: Vec<Option<Ty>>,
    origin: Vec<(Rule, Path)>,
    path: Vec<usize>,
}

impl<'m> Elab<'m> {
    fn new(mode: &'m Mode) -> Self {
        Elab {
            mode,
            sol: Vec::new(),
            origin: Vec::new(),
            path: Vec::new(),
        }
    }

    fn here(&self) -> Path {
        Path(self.path.clone())
    }

    fn fresh(&mut self, rule: Rule) -> Ty {
        self.sol.push(None);
        self.origin.push((rule, self.here()));
        Ty::Meta(self.sol.len() - 1)
    }

    fn walk(&self, t: &Ty) -> Ty {
        let mut cur = t.clone();
        while let Ty::Meta(m) = cur {
            match &self.sol[m] {
                Some(s) => cur = s.clone(),
                None => break,
            }
        }
        cur
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match self.walk(t) {
            Ty::Imp(a, b) => Ty::imp(self.resolve(&a), self.resolve(&b)),
            Ty::And(a, b) => Ty::and(self.resolve(&a), self.resolve(&b)),
            Ty::Or(a, b) => Ty::or(self.resolve(&a), self.resolve(&b)),
            other => other,
        }
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.walk(t) {
            Ty::Meta(n) => n == m,
            Ty::Imp(a, b) | Ty::And(a, b) | Ty::Or(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        let (a, b) = (self.walk(a), self.walk(b));
        match (&a, &b) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => true,
            (Ty::Meta(m), other) | (other, Ty::Meta(m)) => {
                if self.occurs(*m, other) {
                    return false;
                }
                self.sol[*m] = Some(other.clone());
                true
            }
            (Ty::Top, Ty::Top) | (Ty::Bot, Ty::Bot) => true,
            (Ty::Imp(a1, b1), Ty::Imp(a2, b2))
            | (Ty::And(a1, b1), Ty::And(a2, b2))
            | (Ty::Or(a1, b1), Ty::Or(a2, b2)) => self.unify(a1, a2) && self.unify(b1, b2),
            _ => false,
        }
    }

    fn expect(&mut self, rule: Rule, expected: &Ty, found: &Ty) -> Result<(), TypeError> {
        if self.unify(expected, found) {
            Ok(())
        } else {
            Err(TypeError::Mismatch {
                rule,
                path: self.here(),
                expected: self.resolve(expected).to_string(),
                found: self.resolve(found).to_string(),
            })
        }
    }

    fn same(&mut self, rule: Rule, left: &Ty, right: &Ty) -> Result<(), TypeError> {
        if self.unify(left, right) {
            Ok(())
        } else {
            Err(TypeError::BranchMismatch {
                rule,
                path: self.here(),
                left: self.resolve(left).to_string(),
                right: self.resolve(right).to_string(),
            })
        }
    }

    fn child(
        &mut self,
        i: usize,
        env: &mut Vec<(Name, Ty)>,
        t: &Term,
    ) -> Result<Node, TypeError> {
        self.path.push(i);
        let r = self.elab(env, t);
        self.path.pop();
        r
    }

    fn bound_child(
        &mut self,
        i: usize,
        env: &mut Vec<(Name, Ty)>,
        x: &Name,
        a: Ty,
        t: &Term,
    ) -> Result<Node, TypeError> {
        env.push((x.clone(), a));
        let r = self.child(i, env, t);
        env.pop();
        r
    }

    fn check_scalar(&self, rule: Rule, s: &str) -> Result<(), TypeError> {
        match self.mode.scalars() {
            None => Err(TypeError::WrongMode {
                rule,
                path: self.here(),
                what: "a scalar",
                mode: "plain",
            }),
            Some(m) if m.index_of(s).is_none() => Err(TypeError::UnknownScalar {
                rule,
                path: self.here(),
                name: s.to_string(),
            }),
            _ => Ok(()),
        }
    }

    /// `env` is innermost-last.
    fn elab(&mut self, env: &mut Vec<(Name, Ty)>, t: &Term) -> Result<Node, TypeError> {
        let node = |rule, ty, kids| Ok(Node { rule, ty, kids });
        match t {
            Term::Var(x) => match env.iter().rev().find(|(y, _)| y == x) {
                Some((_, a)) => node(Rule::Ax, a.clone(), vec![]),
                None => Err(TypeError::Unbound {
                    rule: Rule::Ax,
                    path: self.here(),
                    name: x.to_string(),
                }),
            },
            Term::Star => {
                if self.mode.is_algebraic() {
                    return Err(TypeError::WrongMode {
                        rule: Rule::TopI,
                        path: self.here(),
                        what: "`*`",
                        mode: "algebraic",
                    });
                }
                node(Rule::TopI, Ty::Top, vec![])
            }
            Term::SStar(s) => {
                self.check_scalar(Rule::TopIS, s)?;
                node(Rule::TopIS, Ty::Top, vec![])
            }
            Term::SMul(s, a) => {
                self.check_scalar(Rule::ProdS, s)?;
                let k = self.child(0, env, a)?;
                node(Rule::ProdS, k.ty.clone(), vec![k])
            }
            Term::Par(a, b) => {
                let ka = self.child(0, env, a)?;
                let kb = self.child(1, env, b)?;
                self.same(Rule::Par, &ka.ty, &kb.ty)?;
                node(Rule::Par, ka.ty.clone(), vec![ka, kb])
            }
            Term::ElimTop(a, b) => {
                let ka = self.child(0, env, a)?;
                self.expect(Rule::TopE, &Ty::Top, &ka.ty)?;
                let kb = self.child(1, env, b)?;
                node(Rule::TopE, kb.ty.clone(), vec![ka, kb])
            }
            Term::ElimBot(a) => {
                let ka = self.child(0, env, a)?;
                self.expect(Rule::BotE, &Ty::Bot, &ka.ty)?;
                let c = self.fresh(Rule::BotE);
                node(Rule::BotE, c, vec![ka])
            }
            Term::Lam(x, b) => {
                let a = self.fresh(Rule::ImpI);
                let kb = self.bound_child(0, env, x, a.clone(), b)?;
                node(Rule::ImpI, Ty::imp(a, kb.ty.clone()), vec![kb])
            }
            Term::App(f, a) => {
                let kf = self.child(0, env, f)?;
                let dom = self.fresh(Rule::ImpE);
                let cod = self.fresh(Rule::ImpE);
                self.expect(Rule::ImpE, &Ty::imp(dom.clone(), cod.clone()), &kf.ty)?;
                let ka = self.child(1, env, a)?;
                self.path.push(1);
                let r = self.expect(Rule::ImpE, &dom, &ka.ty);
                self.path.pop();
                r?;
                node(Rule::ImpE, cod, vec![kf, ka])
            }
            Term::Pair(a, b) => {
                let ka = self.child(0, env, a)?;
                let kb = self.child(1, env, b)?;
                node(Rule::AndI, Ty::and(ka.ty.clone(), kb.ty.clone()), vec![ka, kb])
            }
            Term::Proj1(a) | Term::Proj2(a) => {
                let rule = if matches!(t, Term::Proj1(_)) {
                    Rule::AndE1
                } else {
                    Rule::AndE2
                };
                let ka = self.child(0, env, a)?;
                let l = self.fresh(rule);
                let r = self.fresh(rule);
                self.expect(rule, &Ty::and(l.clone(), r.clone()), &ka.ty)?;
                let out = if rule == Rule::AndE1 { l } else { r };
                node(rule, out, vec![ka])
            }
            Term::Inl(a) => {
                let ka = self.child(0, env, a)?;
                let r = self.fresh(Rule::OrI1);
                node(Rule::OrI1, Ty::or(ka.ty.clone(), r), vec![ka])
            }
            Term::Inr(a) => {
                let ka = self.child(0, env, a)?;
                let l = self.fresh(Rule::OrI2);
                node(Rule::OrI2, Ty::or(l, ka.ty.clone()), vec![ka])
            }
            Term::ElimOr(s, x, u, y, v) => {
                let ks = self.child(0, env, s)?;
                let l = self.fresh(Rule::OrE);
                let r = self.fresh(Rule::OrE);
                self.expect(Rule::OrE, &Ty::or(l.clone(), r.clone()), &ks.ty)?;
                let ku = self.bound_child(1, env, x, l, u)?;
                let kv = self.bound_child(2, env, y, r, v)?;
                self.same(Rule::OrE, &ku.ty, &kv.ty)?;
                node(Rule::OrE, ku.ty.clone(), vec![ks, ku, kv])
            }
            Term::Ann(a, p) => {
                let ka = self.child(0, env, a)?;
                let want = Ty::of(p);
                self.expect(Rule::Ann, &want, &ka.ty)?;
                node(Rule::Ann, want, vec![ka])
            }
        }
    }

    fn finish(&self, n: &Node) -> Derivation {
        Derivation {
            rule: n.rule,
            prop: self.resolve(&n.ty).ground(),
            premises: n.kids.iter().map(|k| self.finish(k)).collect(),
        }
    }
}

fn env_of(ctx: &Context) -> Vec<(Name, Ty)> {
    ctx.entries
        .iter()
        .rev()
        .map(|(x, p)| (x.clone(), Ty::of(p)))
        .collect()
}

fn judgment(ctx: &Context, t: &Term, e: &Elab, n: &Node) -> Judgment {
    let derivation = e.finish(n);
    Judgment {
        ctx: ctx.clone(),
        term: t.clone(),
        prop: derivation.prop.clone(),
        derivation,
    }
}

/// The proposition of `t`, which must be fully determined by the term.
pub fn infer(ctx: &Context, t: &Term, mode: &Mode) -> Result<Prop, TypeError> {
    infer_judgment(ctx, t, mode).map(|j| j.prop)
}

pub fn infer_judgment(ctx: &Context, t: &Term, mode: &Mode) -> Result<Judgment, TypeError> {
    let mut e = Elab::new(mode);
    let n = e.elab(&mut env_of(ctx), t)?;
    if let Some(m) = e.resolve(&n.ty).first_meta() {
        let (rule, path) = e.origin[m].clone();
        return Err(TypeError::MissingAnnotation { rule, path });
    }
    Ok(judgment(ctx, t, &e, &n))
}

pub fn check(ctx: &Context, t: &Term, a: &Prop, mode: &Mode) -> Result<Judgment, TypeError> {
    let mut e = Elab::new(mode);
    let n = e.elab(&mut env_of(ctx), t)?;
    e.expect(Rule::Ann, &Ty::of(a), &n.ty)?;
    Ok(judgment(ctx, t, &e, &n))
}

/// Some typing of `t`, with undetermined parts of the result read as ⊤.
pub fn typable(ctx: &Context, t: &Term, mode: &Mode) -> Result<Judgment, TypeError> {
    let mut e = Elab::new(mode);
    let n = e.elab(&mut env_of(ctx), t)?;
    Ok(judgment(ctx, t, &e, &n))
}

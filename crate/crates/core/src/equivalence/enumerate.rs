//! Type-directed enumeration and random sampling of closed proofs.
//!
//! Terms are produced by structure, with unification for the types that an
//! elimination leaves open, so every term appears once. Binders are named
//! by depth (`x0`, `x1`, ...).

use std::collections::HashSet;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{fresh_name, Mode, Name, Prop, Term};
use crate::typing::Context;

#[derive(Clone, Debug)]
enum Ty {
    Top,
    Bot,
    Meta(usize),
    Imp(Rc<Ty>, Rc<Ty>),
    And(Rc<Ty>, Rc<Ty>),
    Or(Rc<Ty>, Rc<Ty>),
}

impl Ty {
    fn of(p: &Prop) -> Ty {
        match p {
            Prop::Top => Ty::Top,
            Prop::Bot => Ty::Bot,
            Prop::Imp(a, b) => Ty::Imp(Rc::new(Ty::of(a)), Rc::new(Ty::of(b))),
            Prop::And(a, b) => Ty::And(Rc::new(Ty::of(a)), Rc::new(Ty::of(b))),
            Prop::Or(a, b) => Ty::Or(Rc::new(Ty::of(a)), Rc::new(Ty::of(b))),
        }
    }
}

#[derive(Default)]
struct Unifier {
    sol: Vec<Option<Ty>>,
    trail: Vec<usize>,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.sol.push(None);
        Ty::Meta(self.sol.len() - 1)
    }

    fn mark(&self) -> (usize, usize) {
        (self.trail.len(), self.sol.len())
    }

    fn undo(&mut self, (trail, sol): (usize, usize)) {
        while self.trail.len() > trail {
            let m = self.trail.pop().expect("trail");
            self.sol[m] = None;
        }
        self.sol.truncate(sol);
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
                self.trail.push(*m);
                true
            }
            (Ty::Top, Ty::Top) | (Ty::Bot, Ty::Bot) => true,
            (Ty::Imp(a1, b1), Ty::Imp(a2, b2))
            | (Ty::And(a1, b1), Ty::And(a2, b2))
            | (Ty::Or(a1, b1), Ty::Or(a2, b2)) => self.unify(a1, a2) && self.unify(b1, b2),
            _ => false,
        }
    }

    /// Leftover metavariables default to `⊤`.
    fn ground(&self, t: &Ty) -> Prop {
        match self.walk(t) {
            Ty::Top | Ty::Meta(_) => Prop::Top,
            Ty::Bot => Prop::Bot,
            Ty::Imp(a, b) => Prop::imp(self.ground(&a), self.ground(&b)),
            Ty::And(a, b) => Prop::and(self.ground(&a), self.ground(&b)),
            Ty::Or(a, b) => Prop::or(self.ground(&a), self.ground(&b)),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Alt {
    Star,
    SStar(usize),
    Var(usize),
    Par(usize),
    SMul(usize),
    ElimTop(usize),
    ElimBot,
    Lam,
    App(usize),
    Pair(usize),
    Fst,
    Snd,
    Inl,
    Inr,
    ElimOr(usize, usize),
}

type Cont<'k> = &'k mut dyn FnMut(&mut Gen, Term);

struct Gen {
    u: Unifier,
    env: Vec<(Name, Ty)>,
    scalars: Vec<Name>,
    avoid: HashSet<Name>,
    rng: Option<ChaCha8Rng>,
    budget: Option<u64>,
    stopped: bool,
}

impl Gen {
    fn new(ctx: &Context, mode: &Mode) -> Gen {
        Gen {
            u: Unifier::default(),
            env: ctx
                .entries()
                .iter()
                .rev()
                .map(|(x, p)| (x.clone(), Ty::of(p)))
                .collect(),
            scalars: mode
                .scalars()
                .map(|s| s.names().iter().map(|n| Name::from(n.as_str())).collect())
                .unwrap_or_default(),
            avoid: ctx.entries().iter().map(|(x, _)| x.clone()).collect(),
            rng: None,
            budget: None,
            stopped: false,
        }
    }

    fn binder(&self) -> Name {
        let base = format!("x{}", self.env.len());
        if self.avoid.contains(base.as_str()) {
            fresh_name(&base, &self.avoid)
        } else {
            base.into()
        }
    }

    fn alternatives(&self, n: usize) -> Vec<Alt> {
        let mut alts = Vec::new();
        let algebraic = !self.scalars.is_empty();
        if n == 1 {
            for i in (0..self.env.len()).rev() {
                alts.push(Alt::Var(i));
            }
            if algebraic {
                alts.extend((0..self.scalars.len()).map(Alt::SStar));
            } else {
                alts.push(Alt::Star);
            }
            return alts;
        }
        alts.extend([Alt::Lam, Alt::Inl, Alt::Inr, Alt::Fst, Alt::Snd, Alt::ElimBot]);
        if algebraic {
            alts.extend((0..self.scalars.len()).map(Alt::SMul));
        }
        if n >= 3 {
            for n1 in 1..n - 1 {
                alts.extend([Alt::Pair(n1), Alt::App(n1), Alt::Par(n1), Alt::ElimTop(n1)]);
            }
            for n1 in 1..n - 1 {
                for n2 in 1..n - 1 - n1 {
                    alts.push(Alt::ElimOr(n1, n2));
                }
            }
        }
        alts
    }

    fn go(&mut self, goal: &Ty, n: usize, k: Cont) {
        if self.stopped || n == 0 {
            return;
        }
        if let Some(b) = &mut self.budget {
            if *b == 0 {
                self.stopped = true;
                return;
            }
            *b -= 1;
        }
        let mut alts = self.alternatives(n);
        if let Some(rng) = &mut self.rng {
            alts.shuffle(rng);
        }
        for alt in alts {
            if self.stopped {
                return;
            }
            let m = self.u.mark();
            self.run(alt, goal, n, k);
            self.u.undo(m);
        }
    }

    fn run(&mut self, alt: Alt, goal: &Ty, n: usize, k: Cont) {
        match alt {
            Alt::Star => {
                if self.u.unify(goal, &Ty::Top) {
                    k(self, Term::Star);
                }
            }
            Alt::SStar(i) => {
                if self.u.unify(goal, &Ty::Top) {
                    let s = self.scalars[i].clone();
                    k(self, Term::SStar(s));
                }
            }
            Alt::Var(i) => {
                let (x, t) = self.env[i].clone();
                // Skip variables shadowed by an inner binder of the same name.
                if self.env[i + 1..].iter().any(|(y, _)| *y == x) {
                    return;
                }
                if self.u.unify(goal, &t) {
                    k(self, Term::Var(x));
                }
            }
            Alt::Par(n1) => self.go(goal, n1, &mut |g, a| {
                g.go(goal, n - 1 - n1, &mut |g, b| k(g, Term::par(a.clone(), b)))
            }),
            Alt::SMul(i) => {
                let s = self.scalars[i].clone();
                self.go(goal, n - 1, &mut |g, a| k(g, Term::SMul(s.clone(), Box::new(a))))
            }
            Alt::ElimTop(n1) => self.go(&Ty::Top, n1, &mut |g, a| {
                g.go(goal, n - 1 - n1, &mut |g, b| k(g, Term::elim_top(a.clone(), b)))
            }),
            Alt::ElimBot => self.go(&Ty::Bot, n - 1, &mut |g, a| k(g, Term::elim_bot(a))),
            Alt::Lam => {
                let (a, b) = (self.u.fresh(), self.u.fresh());
                if !self.u.unify(goal, &Ty::Imp(Rc::new(a.clone()), Rc::new(b.clone()))) {
                    return;
                }
                let x = self.binder();
                self.env.push((x.clone(), a));
                self.go(&b, n - 1, &mut |g, body| {
                    let saved = g.env.pop().expect("binder");
                    k(g, Term::Lam(x.clone(), Box::new(body)));
                    g.env.push(saved);
                });
                self.env.pop();
            }
            Alt::App(n1) => {
                let a = self.u.fresh();
                let f = Ty::Imp(Rc::new(a.clone()), Rc::new(goal.clone()));
                self.go(&f, n1, &mut |g, tf| {
                    g.go(&a, n - 1 - n1, &mut |g, ta| k(g, Term::app(tf.clone(), ta)))
                })
            }
            Alt::Pair(n1) => {
                let (a, b) = (self.u.fresh(), self.u.fresh());
                if !self.u.unify(goal, &Ty::And(Rc::new(a.clone()), Rc::new(b.clone()))) {
                    return;
                }
                self.go(&a, n1, &mut |g, ta| {
                    g.go(&b, n - 1 - n1, &mut |g, tb| k(g, Term::pair(ta.clone(), tb)))
                })
            }
            Alt::Fst | Alt::Snd => {
                let other = Rc::new(self.u.fresh());
                let me = Rc::new(goal.clone());
                let first = matches!(alt, Alt::Fst);
                let p = if first {
                    Ty::And(me, other)
                } else {
                    Ty::And(other, me)
                };
                self.go(&p, n - 1, &mut |g, t| {
                    k(g, if first { Term::fst(t) } else { Term::snd(t) })
                })
            }
            Alt::Inl | Alt::Inr => {
                let (a, b) = (self.u.fresh(), self.u.fresh());
                if !self.u.unify(goal, &Ty::Or(Rc::new(a.clone()), Rc::new(b.clone()))) {
                    return;
                }
                let left = matches!(alt, Alt::Inl);
                let inner = if left { a } else { b };
                self.go(&inner, n - 1, &mut |g, t| {
                    k(g, if left { Term::inl(t) } else { Term::inr(t) })
                })
            }
            Alt::ElimOr(n1, n2) => {
                let n3 = n - 1 - n1 - n2;
                let (a, b) = (self.u.fresh(), self.u.fresh());
                let scrut = Ty::Or(Rc::new(a.clone()), Rc::new(b.clone()));
                let x = self.binder();
                self.go(&scrut, n1, &mut |g, ts| {
                    g.env.push((x.clone(), a.clone()));
                    g.go(goal, n2, &mut |g, tu| {
                        let bx = g.env.pop().expect("binder");
                        g.env.push((x.clone(), b.clone()));
                        g.go(goal, n3, &mut |g, tv| {
                            let by = g.env.pop().expect("binder");
                            k(g, Term::elim_or(ts.clone(), &x, tu.clone(), &x, tv));
                            g.env.push(by);
                        });
                        g.env.pop();
                        g.env.push(bx);
                    });
                    g.env.pop();
                })
            }
        }
    }
}

/// Calls `f` on every term `t` with `Γ ⊢ t : A` and `size(t) <= max`,
/// smallest first, in a fixed order.
pub fn for_each_term(ctx: &Context, a: &Prop, max: usize, mode: &Mode, mut f: impl FnMut(&Term)) {
    let mut g = Gen::new(ctx, mode);
    let goal = Ty::of(a);
    for n in 1..=max {
        g.go(&goal, n, &mut |_, t| f(&t));
    }
}

pub fn enumerate_terms_in(ctx: &Context, a: &Prop, max: usize, mode: &Mode) -> Vec<Term> {
    let mut out = Vec::new();
    for_each_term(ctx, a, max, mode, |t| out.push(t.clone()));
    out
}

/// All closed proofs of `A` up to the given size.
pub fn enumerate_terms(a: &Prop, max: usize, mode: &Mode) -> Vec<Term> {
    enumerate_terms_in(&Context::new(), a, max, mode)
}

/// Closed terms of exactly size `n` at any type, each with its principal
/// type (leftover variables read as `⊤`).
pub fn enumerate_any(n: usize, mode: &Mode) -> Vec<(Term, Prop)> {
    let mut g = Gen::new(&Context::new(), mode);
    let goal = g.u.fresh();
    let mut out = Vec::new();
    g.go(&goal.clone(), n, &mut |g, t| out.push((t, g.u.ground(&goal))));
    out
}

/// Seeded random generator over the same space as the enumerator.
#[derive(Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    mode: Mode,
    budget: u64,
}

impl Sampler {
    pub const DEFAULT_BUDGET: u64 = 4_000;

    pub fn new(seed: u64, mode: &Mode) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            mode: mode.clone(),
            budget: Self::DEFAULT_BUDGET,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// One closed term of exactly `size` nodes, at `a` or at any type when
    /// `a` is `None`. Gives up after a fixed search budget.
    pub fn sample(&mut self, a: Option<&Prop>, size: usize) -> Option<(Term, Prop)> {
        self.sample_in(&Context::new(), a, size)
    }

    /// As [`Sampler::sample`], for terms over `ctx`.
    pub fn sample_in(&mut self, ctx: &Context, a: Option<&Prop>, size: usize) -> Option<(Term, Prop)> {
        let mut g = Gen::new(ctx, &self.mode);
        let seed = self.rng.gen::<u64>();
        g.rng = Some(ChaCha8Rng::seed_from_u64(seed));
        g.budget = Some(self.budget);
        let goal = match a {
            Some(p) => Ty::of(p),
            None => g.u.fresh(),
        };
        let mut found = None;
        g.go(&goal.clone(), size, &mut |g, t| {
            found = Some((t, g.u.ground(&goal)));
            g.stopped = true;
        });
        found
    }

    /// Retries with fresh random choices until a term of size in
    /// `1..=max` is found.
    pub fn sample_up_to(&mut self, a: Option<&Prop>, max: usize, attempts: usize) -> Option<(Term, Prop)> {
        self.sample_up_to_in(&Context::new(), a, max, attempts)
    }

    pub fn sample_up_to_in(
        &mut self,
        ctx: &Context,
        a: Option<&Prop>,
        max: usize,
        attempts: usize,
    ) -> Option<(Term, Prop)> {
        for _ in 0..attempts {
            let n = self.rng.gen_range(1..=max.max(1));
            if let Some(r) = self.sample_in(ctx, a, n) {
                return Some(r);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_prop, parse_term, BiMagma};
    use crate::typing::check;

    fn p(s: &str) -> Prop {
        parse_prop(s).unwrap()
    }

    #[test]
    fn small_inhabitants() {
        let m = Mode::Plain;
        let top = enumerate_terms(&Prop::Top, 3, &m);
        assert_eq!(top[0], Term::Star);
        assert!(top.contains(&parse_term("* || *", &m).unwrap()));
        let or = enumerate_terms(&p("Top \\/ Top"), 4, &m);
        for s in ["inl(*)", "inr(*)"] {
            assert!(or.contains(&parse_term(s, &m).unwrap()), "{s}");
        }
        // `inl(*) || inr(*)` has five nodes.
        let or5 = enumerate_terms(&p("Top \\/ Top"), 5, &m);
        assert!(or5.contains(&parse_term("inl(*) || inr(*)", &m).unwrap()));
        assert!(enumerate_terms(&Prop::Bot, 7, &m).is_empty());
    }

    #[test]
    fn enumerated_terms_are_typed_and_distinct() {
        let m = Mode::Plain;
        for ty in ["Top", "Top \\/ Top", "Top -> Top", "Top /\\ Top", "(Top \\/ Top) -> Top"] {
            let a = p(ty);
            let ts = enumerate_terms(&a, 6, &m);
            let set: HashSet<&Term> = ts.iter().collect();
            assert_eq!(set.len(), ts.len(), "duplicates at {ty}");
            for t in &ts {
                assert!(t.size() <= 6);
                assert!(t.is_closed(), "{t}");
                check(&Context::new(), t, &a, &m).unwrap_or_else(|e| panic!("{t}: {e}"));
            }
        }
    }

    #[test]
    fn open_context_and_algebraic_mode() {
        let m = Mode::Plain;
        let ctx = Context::new().extend("x0", p("Top \\/ Top")).unwrap();
        let ts = enumerate_terms_in(&ctx, &p("Top \\/ Top"), 3, &m);
        assert!(ts.contains(&Term::var("x0")));
        for t in &ts {
            check(&ctx, t, &p("Top \\/ Top"), &m).unwrap_or_else(|e| panic!("{t}: {e}"));
        }
        let alg = Mode::algebraic(BiMagma::z4());
        let ts = enumerate_terms(&Prop::Top, 2, &alg);
        assert_eq!(ts.len(), 4 + 16);
    }

    #[test]
    fn sampler_is_seeded() {
        let m = Mode::Plain;
        let run = |seed| {
            let mut s = Sampler::new(seed, &m);
            (0..50)
                .filter_map(|_| s.sample_up_to(None, 12, 20))
                .map(|(t, a)| format!("{t} : {a}"))
                .collect::<Vec<_>>()
        };
        let a = run(7);
        assert_eq!(a, run(7));
        assert_eq!(a.len(), 50);
        let mut s = Sampler::new(1, &m);
        for _ in 0..200 {
            if let Some((t, a)) = s.sample_up_to(None, 12, 20) {
                check(&Context::new(), &t, &a, &m).unwrap_or_else(|e| panic!("{t}: {e}"));
            }
        }
    }
}

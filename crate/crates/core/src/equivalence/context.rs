use std::collections::HashMap;
use std::fmt;

use super::enumerate::enumerate_terms_in;
use crate::syntax::{Mode, Name, Prop, Term};
use crate::typing::Context;

/// Per-slot size budget for applied arguments and branch bodies.
pub const DEFAULT_SLOT_BUDGET: usize = 4;

/// Case targets `D` are drawn from propositions with at most this many connectives.
pub const MAX_TARGET_CONNECTIVES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Apply(Term),
    Fst,
    Snd,
    Case(Name, Term, Name, Term),
}

/// A one-hole elimination context; `frames[0]` is applied to the hole first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElimContext {
    pub frames: Vec<Frame>,
    pub hole: Prop,
    pub result: Prop,
}

impl ElimContext {
    pub fn hole(a: &Prop) -> ElimContext {
        ElimContext {
            frames: Vec::new(),
            hole: a.clone(),
            result: a.clone(),
        }
    }

    pub fn plug(&self, t: &Term) -> Term {
        self.frames.iter().fold(t.clone(), |acc, f| match f {
            Frame::Apply(u) => Term::app(acc, u.clone()),
            Frame::Fst => Term::fst(acc),
            Frame::Snd => Term::snd(acc),
            Frame::Case(x, u, y, v) => Term::elim_or(acc, x, u.clone(), y, v.clone()),
        })
    }

    /// Term size with the hole counted as one node.
    pub fn size(&self) -> usize {
        self.plug(&Term::Star).size()
    }
}

impl fmt::Display for ElimContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.plug(&Term::var("[.]")))
    }
}

/// Bounds for context enumeration.
#[derive(Clone, Debug)]
pub struct ContextBounds {
    pub max_size: usize,
    pub slot_budget: usize,
    pub result: Prop,
}

impl ContextBounds {
    pub fn new(max_size: usize) -> ContextBounds {
        ContextBounds {
            max_size,
            slot_budget: DEFAULT_SLOT_BUDGET,
            result: Prop::or(Prop::Top, Prop::Top),
        }
    }
}

/// Whether some chain of eliminations leads from `a` to `r`.
fn reaches(a: &Prop, r: &Prop) -> bool {
    if a == r {
        return true;
    }
    match a {
        Prop::Imp(_, b) => reaches(b, r),
        Prop::And(x, y) => reaches(x, r) || reaches(y, r),
        Prop::Or(..) => r.size() < a.size(),
        _ => false,
    }
}

struct CtxGen<'a> {
    mode: &'a Mode,
    bounds: &'a ContextBounds,
    terms: HashMap<(Vec<Prop>, Prop, usize), Vec<Term>>,
    targets: HashMap<usize, Vec<Prop>>,
    out: Vec<ElimContext>,
}

impl CtxGen<'_> {
    fn terms(&mut self, ctx: &[(Name, Prop)], a: &Prop, max: usize) -> Vec<Term> {
        let key = (ctx.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>(), a.clone(), max);
        if let Some(ts) = self.terms.get(&key) {
            return ts.clone();
        }
        let c = Context::from_entries(ctx.to_vec()).expect("distinct names");
        let ts = enumerate_terms_in(&c, a, max, self.mode);
        self.terms.insert(key, ts.clone());
        ts
    }

    fn targets(&mut self, max_conn: usize) -> Vec<Prop> {
        let r = &self.bounds.result;
        self.targets
            .entry(max_conn)
            .or_insert_with(|| Prop::all_up_to(max_conn).into_iter().filter(|d| reaches(d, r)).collect())
            .clone()
    }

    fn go(&mut self, hole: &Prop, frames: &mut Vec<Frame>, cur: &Prop, size: usize) {
        let r = self.bounds.result.clone();
        if *cur == r {
            self.out.push(ElimContext {
                frames: frames.clone(),
                hole: hole.clone(),
                result: r.clone(),
            });
        }
        let room = self.bounds.max_size.saturating_sub(size);
        if room < 2 {
            return;
        }
        match cur {
            Prop::Imp(a, b) if reaches(b, &r) => {
                let budget = self.bounds.slot_budget.min(room - 1);
                for t in self.terms(&[], a, budget) {
                    let n = t.size();
                    frames.push(Frame::Apply(t));
                    self.go(hole, frames, b, size + 1 + n);
                    frames.pop();
                }
            }
            Prop::And(a, b) => {
                for (frame, next) in [(Frame::Fst, a), (Frame::Snd, b)] {
                    if reaches(next, &r) {
                        frames.push(frame);
                        self.go(hole, frames, next, size + 1);
                        frames.pop();
                    }
                }
            }
            Prop::Or(a, b) if room >= 3 => {
                let budget = self.bounds.slot_budget.min(room - 2);
                let x: Name = "x".into();
                let y: Name = "y".into();
                let max_conn = ((cur.size() - 1) / 2).saturating_sub(1).min(MAX_TARGET_CONNECTIVES);
                for d in self.targets(max_conn) {
                    if d.size() >= cur.size() || !reaches(&d, &r) {
                        continue;
                    }
                    let us = self.terms(&[(x.clone(), (**a).clone())], &d, budget);
                    if us.is_empty() {
                        continue;
                    }
                    let vs = self.terms(&[(y.clone(), (**b).clone())], &d, budget);
                    for u in &us {
                        for v in &vs {
                            let n = 1 + u.size() + v.size();
                            if n > room {
                                continue;
                            }
                            frames.push(Frame::Case(x.clone(), u.clone(), y.clone(), v.clone()));
                            self.go(hole, frames, &d, size + n);
                            frames.pop();
                        }
                    }
                }
            }
            _ => {}
        }
    }
}

/// All contexts `[·]:C ⊢ K : R` within the bounds, in a fixed order
/// (`R` is `⊤∨⊤` unless the bounds say otherwise).
pub fn enumerate_elim_contexts(c: &Prop, bounds: &ContextBounds, mode: &Mode) -> Vec<ElimContext> {
    let mut g = CtxGen {
        mode,
        bounds,
        terms: HashMap::new(),
        targets: HashMap::new(),
        out: Vec::new(),
    };
    if bounds.max_size >= 1 {
        g.go(c, &mut Vec::new(), c, 1);
    }
    g.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_prop, parse_term};
    use crate::typing::check;

    fn p(s: &str) -> Prop {
        parse_prop(s).unwrap()
    }

    #[test]
    fn plug_examples() {
        let m = Mode::Plain;
        let k = ElimContext {
            frames: vec![Frame::Apply(Term::Star)],
            hole: p("Top -> Top"),
            result: Prop::Top,
        };
        let t = parse_term("\\x. x", &m).unwrap();
        assert_eq!(k.plug(&t), parse_term("(\\x. x) *", &m).unwrap());
        assert_eq!(k.to_string(), "[.] *");
        let k = ElimContext {
            frames: vec![Frame::Fst],
            hole: p("Top /\\ Top"),
            result: Prop::Top,
        };
        assert_eq!(k.plug(&parse_term("<*,*>", &m).unwrap()), parse_term("fst(<*,*>)", &m).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let m = Mode::Plain;
        let b = ContextBounds::new(4);
        let ks = enumerate_elim_contexts(&p("Top \\/ Top"), &b, &m);
        assert_eq!(ks[0].frames, vec![]);
        let ks = enumerate_elim_contexts(&p("Top -> Top \\/ Top"), &b, &m);
        assert!(ks.iter().any(|k| k.frames == vec![Frame::Apply(Term::Star)]));
        let ks = enumerate_elim_contexts(&p("(Top \\/ Top) /\\ Top"), &b, &m);
        assert!(ks.iter().any(|k| k.frames == vec![Frame::Fst]));
        assert!(enumerate_elim_contexts(&Prop::Top, &b, &m).is_empty());
    }

    #[test]
    fn contexts_are_typed_and_bounded() {
        let m = Mode::Plain;
        let b = ContextBounds::new(6);
        for c in ["(Top \\/ Top) \\/ Top", "Top -> Top \\/ Top", "(Top -> Top) -> Top \\/ Top"] {
            let c = p(c);
            let ks = enumerate_elim_contexts(&c, &b, &m);
            assert!(!ks.is_empty());
            for k in &ks {
                assert!(k.size() <= 6, "{k}");
                let ctx = Context::new().extend("hole", c.clone()).unwrap();
                let t = k.plug(&Term::var("hole"));
                check(&ctx, &t, &b.result, &m).unwrap_or_else(|e| panic!("{k}: {e}"));
            }
        }
    }
}

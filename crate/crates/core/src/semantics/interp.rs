use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::arrow::{Arrow, Morph};
use super::object::{SemError, SemObject, DEFAULT_SIZE_CAP};
use crate::syntax::{Mode, Name, Prop, Term};
use crate::typing::{Derivation, Judgment};

/// Interpretation of propositions, contexts and judgments in one mode.
/// Objects are memoized so that carriers are built once.
#[derive(Debug)]
pub struct Semantics {
    mode: Mode,
    cap: u64,
    scalars: Option<SemObject>,
    props: RwLock<HashMap<Prop, SemObject>>,
    contexts: RwLock<HashMap<Vec<Prop>, SemObject>>,
}

impl Semantics {
    pub fn new(mode: &Mode, cap: u64) -> Semantics {
        Semantics {
            scalars: mode.scalars().map(|s| SemObject::scalars(Arc::new(s.clone()))),
            mode: mode.clone(),
            cap,
            props: RwLock::new(HashMap::new()),
            contexts: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_default_cap(mode: &Mode) -> Semantics {
        Semantics::new(mode, DEFAULT_SIZE_CAP)
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// The scalar object `S`, in algebraic mode.
    pub fn scalar_object(&self) -> Option<&SemObject> {
        self.scalars.as_ref()
    }

    pub fn denote_prop(&self, a: &Prop) -> Result<SemObject, SemError> {
        if let Some(o) = self.props.read().expect("cache lock").get(a) {
            return Ok(o.clone());
        }
        let o = match a {
            Prop::Top => match &self.scalars {
                Some(s) => s.clone(),
                None => SemObject::unit(),
            },
            Prop::Bot => SemObject::empty(),
            Prop::Imp(x, y) => SemObject::hom(&self.denote_prop(x)?, &self.denote_prop(y)?),
            Prop::And(x, y) => SemObject::prod(&self.denote_prop(x)?, &self.denote_prop(y)?),
            Prop::Or(x, y) => SemObject::cp(&self.denote_prop(x)?, &self.denote_prop(y)?),
        };
        if let Err(SemError::SizeCap { size, cap, .. }) = o.check_cap(self.cap) {
            return Err(SemError::SizeCap {
                what: format!("`{a}`"),
                size,
                cap,
            });
        }
        self.props
            .write()
            .expect("cache lock")
            .insert(a.clone(), o.clone());
        Ok(o)
    }

    /// `⟦x1:A1, ..., xn:An⟧ = A1 × (... × (An × 1))`; the head comes first.
    pub fn denote_context(&self, props: &[Prop]) -> Result<SemObject, SemError> {
        if let Some(o) = self.contexts.read().expect("cache lock").get(props) {
            return Ok(o.clone());
        }
        let mut o = SemObject::unit();
        for p in props.iter().rev() {
            o = SemObject::prod(&self.denote_prop(p)?, &o);
        }
        if let Err(SemError::SizeCap { size, cap, .. }) = o.check_cap(self.cap) {
            let shown: Vec<String> = props.iter().map(|p| p.to_string()).collect();
            return Err(SemError::SizeCap {
                what: format!("context [{}]", shown.join(", ")),
                size,
                cap,
            });
        }
        self.contexts
            .write()
            .expect("cache lock")
            .insert(props.to_vec(), o.clone());
        Ok(o)
    }

    /// The arrow `⟦Γ⟧ → ⟦A⟧` of a judgment, built rule by rule.
    pub fn denote_term(&self, j: &Judgment) -> Result<Arrow, SemError> {
        let mut env: Vec<(Name, Prop)> = j.ctx.entries().iter().rev().cloned().collect();
        self.go(&j.term, &j.derivation, &mut env)
    }

    fn go(&self, t: &Term, d: &Derivation, env: &mut Vec<(Name, Prop)>) -> Result<Arrow, SemError> {
        let head_first: Vec<Prop> = env.iter().rev().map(|(_, p)| p.clone()).collect();
        let gamma = self.denote_context(&head_first)?;
        let cod = self.denote_prop(&d.prop)?;
        let prem = |i: usize| &d.premises[i];
        let tab = |a: Arrow| Morph::Tab(a);
        let morph = match t {
            Term::Var(x) => {
                let pos = env
                    .iter()
                    .rposition(|(y, _)| y == x)
                    .ok_or_else(|| SemError::Undefined(format!("unbound variable `{x}`")))?;
                let depth = env.len() - 1 - pos;
                let mut stages = vec![Morph::Proj2; depth];
                stages.push(Morph::Proj1);
                Morph::pipeline(stages)
            }
            Term::Par(a, b) => {
                let ta = self.go(a, prem(0), env)?;
                let tb = self.go(b, prem(1), env)?;
                Morph::pipeline(vec![
                    Morph::Diag,
                    Morph::product(tab(ta), tab(tb)),
                    Morph::Op(cod.clone()),
                ])
            }
            Term::Star => Morph::Bang,
            Term::SStar(s) => Morph::pipeline(vec![Morph::Bang, Morph::ScalarPoint(self.scalar(s)?)]),
            Term::SMul(s, a) => {
                let ta = self.go(a, prem(0), env)?;
                Morph::pipeline(vec![
                    tab(ta),
                    Morph::Rho,
                    Morph::product(Morph::ScalarPoint(self.scalar(s)?), Morph::Id),
                    Morph::Act(cod.clone()),
                ])
            }
            Term::ElimTop(a, b) => {
                let ta = self.go(a, prem(0), env)?;
                let tb = self.go(b, prem(1), env)?;
                let last = if self.mode.is_algebraic() {
                    Morph::Act(cod.clone())
                } else {
                    Morph::Proj2
                };
                Morph::pipeline(vec![Morph::Diag, Morph::product(tab(ta), tab(tb)), last])
            }
            Term::ElimBot(a) => {
                let ta = self.go(a, prem(0), env)?;
                Morph::pipeline(vec![tab(ta), Morph::Absurd])
            }
            Term::Lam(x, b) => {
                let (dom_prop, _) = split(&d.prop, "an implication")?;
                let dom = self.denote_prop(dom_prop)?;
                env.push((x.clone(), dom_prop.clone()));
                let body = self.go(b, prem(0), env);
                env.pop();
                Morph::pipeline(vec![
                    Morph::Eta(dom.carrier(self.cap)?),
                    Morph::HomPost(Box::new(tab(body?))),
                ])
            }
            Term::App(f, a) => {
                let (dom_prop, _) = split(&prem(0).prop, "an implication")?;
                let dom = self.denote_prop(dom_prop)?;
                let tf = self.go(f, prem(0), env)?;
                let ta = self.go(a, prem(1), env)?;
                Morph::pipeline(vec![Morph::Diag, Morph::product(tab(tf), tab(ta)), Morph::Eval(dom)])
            }
            Term::Pair(a, b) => {
                let ta = self.go(a, prem(0), env)?;
                let tb = self.go(b, prem(1), env)?;
                Morph::pipeline(vec![Morph::Diag, Morph::product(tab(ta), tab(tb))])
            }
            Term::Proj1(a) | Term::Proj2(a) => {
                let ta = self.go(a, prem(0), env)?;
                let p = if matches!(t, Term::Proj1(_)) {
                    Morph::Proj1
                } else {
                    Morph::Proj2
                };
                Morph::pipeline(vec![tab(ta), p])
            }
            Term::Inl(a) | Term::Inr(a) => {
                let ta = self.go(a, prem(0), env)?;
                let i = if matches!(t, Term::Inl(_)) {
                    Morph::Inj1
                } else {
                    Morph::Inj2
                };
                Morph::pipeline(vec![tab(ta), i])
            }
            Term::ElimOr(s, x, u, y, v) => {
                let (pa, pb) = split(&prem(0).prop, "a disjunction")?;
                let ts = self.go(s, prem(0), env)?;
                env.push((x.clone(), pa.clone()));
                let tu = self.go(u, prem(1), env);
                env.pop();
                env.push((y.clone(), pb.clone()));
                let tv = self.go(v, prem(2), env);
                env.pop();
                Morph::pipeline(vec![
                    Morph::Diag,
                    Morph::product(tab(ts), Morph::Id),
                    Morph::D,
                    Morph::Mediate(Box::new(tab(tu?)), Box::new(tab(tv?)), cod.clone()),
                ])
            }
            Term::Ann(a, _) => return self.go(a, prem(0), env),
        };
        morph.tabulate(&gamma, &cod, self.cap)
    }

    fn scalar(&self, s: &str) -> Result<u16, SemError> {
        self.mode
            .scalars()
            .and_then(|m| m.index_of(s))
            .ok_or_else(|| SemError::Undefined(format!("unknown scalar `{s}`")))
    }
}

fn split<'a>(p: &'a Prop, what: &str) -> Result<(&'a Prop, &'a Prop), SemError> {
    match p {
        Prop::Imp(a, b) | Prop::Or(a, b) | Prop::And(a, b) => Ok((a, b)),
        other => Err(super::object::mismatch(what, other)),
    }
}

pub fn denote_prop(a: &Prop, mode: &Mode) -> Result<SemObject, SemError> {
    Semantics::with_default_cap(mode).denote_prop(a)
}

pub fn denote_term(j: &Judgment, mode: &Mode) -> Result<Arrow, SemError> {
    Semantics::with_default_cap(mode).denote_term(j)
}

use std::sync::Arc;

use super::object::{mismatch, Elem, SemError, SemObject, Shape};

/// A total function between finite objects, stored as its output table over
/// the canonical enumeration of the domain.
#[derive(Clone, Debug)]
pub struct Arrow {
    dom: SemObject,
    cod: SemObject,
    table: Arc<[Elem]>,
}

impl Arrow {
    pub fn dom(&self) -> &SemObject {
        &self.dom
    }

    pub fn cod(&self) -> &SemObject {
        &self.cod
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    pub fn apply(&self, x: &Elem) -> Result<Elem, SemError> {
        let i = self.dom.rank(x)? as usize;
        self.table
            .get(i)
            .cloned()
            .ok_or_else(|| mismatch(format!("an element of {}", self.dom), format!("{x:?}")))
    }

    /// Tabulates `f` over the domain; every output must lie in `cod`.
    pub fn from_fn(
        dom: &SemObject,
        cod: &SemObject,
        cap: u64,
        f: impl Fn(&Elem) -> Result<Elem, SemError>,
    ) -> Result<Arrow, SemError> {
        let car = dom.carrier(cap)?;
        let table = car.iter().map(&f).collect::<Result<Vec<_>, _>>()?;
        Ok(Arrow {
            dom: dom.clone(),
            cod: cod.clone(),
            table: table.into(),
        })
    }

    pub fn from_table(dom: &SemObject, cod: &SemObject, table: Vec<Elem>) -> Result<Arrow, SemError> {
        if Some(table.len() as u64) != dom.size() {
            return Err(mismatch(
                format!("{} outputs", dom.size().unwrap_or(0)),
                format!("{} outputs", table.len()),
            ));
        }
        for e in &table {
            cod.rank(e)?;
        }
        Ok(Arrow {
            dom: dom.clone(),
            cod: cod.clone(),
            table: table.into(),
        })
    }

    /// Extensional equality; the shapes must agree.
    pub fn equals(&self, other: &Arrow) -> Result<bool, SemError> {
        if !self.dom.same_shape(&other.dom) || !self.cod.same_shape(&other.cod) {
            return Err(mismatch(
                format!("{} -> {}", self.dom, self.cod),
                format!("{} -> {}", other.dom, other.cod),
            ));
        }
        Ok(self.table == other.table)
    }

    /// First domain element where the two arrows differ.
    pub fn first_difference(&self, other: &Arrow) -> Option<(Elem, Elem, Elem)> {
        let car = self.dom.carrier(u64::MAX).ok()?;
        car.iter()
            .zip(self.table.iter().zip(other.table.iter()))
            .find(|(_, (a, b))| a != b)
            .map(|(x, (a, b))| (x.clone(), a.clone(), b.clone()))
    }

    /// One `<elem> |-> <elem>` line per domain element.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if let Ok(car) = self.dom.carrier(u64::MAX) {
            for (x, y) in car.iter().zip(self.table.iter()) {
                out.push_str(&format!("{} |-> {}\n", self.dom.render(x), self.cod.render(y)));
            }
        }
        out
    }
}

pub fn arrows_equal(f: &Arrow, g: &Arrow) -> Result<bool, SemError> {
    f.equals(g)
}

/// Element-level maps, composed lazily and tabulated once over a domain.
#[derive(Clone, Debug)]
pub(crate) enum Morph {
    Tab(Arrow),
    Id,
    /// `Compose(g, f)` is `g ∘ f`.
    Compose(Box<Morph>, Box<Morph>),
    Product(Box<Morph>, Box<Morph>),
    Diag,
    Proj1,
    Proj2,
    Bang,
    Op(SemObject),
    /// `S × A → A`.
    Act(SemObject),
    Inj1,
    Inj2,
    Inclusion,
    CpMap(Box<Morph>, Box<Morph>),
    /// `[f, g]` into the given codomain.
    Mediate(Box<Morph>, Box<Morph>, SemObject),
    D,
    Delta,
    /// `Γ → [A, A × Γ]`, carrying the carrier of `A`.
    Eta(Arc<[Elem]>),
    /// `[A, f]`.
    HomPost(Box<Morph>),
    /// `[A, B] × A → B`, carrying `A`.
    Eval(SemObject),
    ScalarPoint(u16),
    Rho,
    Alpha,
    Sigma,
    /// The unique map out of `0`.
    Absurd,
}

impl Morph {
    pub(crate) fn compose(g: Morph, f: Morph) -> Morph {
        Morph::Compose(Box::new(g), Box::new(f))
    }

    pub(crate) fn product(f: Morph, g: Morph) -> Morph {
        Morph::Product(Box::new(f), Box::new(g))
    }

    /// `g ∘ f ∘ ...` from a left-to-right pipeline.
    pub(crate) fn pipeline(stages: Vec<Morph>) -> Morph {
        let mut it = stages.into_iter();
        let mut acc = it.next().unwrap_or(Morph::Id);
        for s in it {
            acc = Morph::compose(s, acc);
        }
        acc
    }

    pub(crate) fn apply(&self, x: &Elem) -> Result<Elem, SemError> {
        let bad = |what: &str| mismatch(what, format!("{x:?}"));
        match self {
            Morph::Tab(a) => a.apply(x),
            Morph::Id => Ok(x.clone()),
            Morph::Compose(g, f) => g.apply(&f.apply(x)?),
            Morph::Product(f, g) => match x {
                Elem::Pair(a, b) => Ok(Elem::pair(f.apply(a)?, g.apply(b)?)),
                _ => Err(bad("a pair")),
            },
            Morph::Diag => Ok(Elem::pair(x.clone(), x.clone())),
            Morph::Proj1 => match x {
                Elem::Pair(a, _) => Ok((**a).clone()),
                _ => Err(bad("a pair")),
            },
            Morph::Proj2 => match x {
                Elem::Pair(_, b) => Ok((**b).clone()),
                _ => Err(bad("a pair")),
            },
            Morph::Bang => Ok(Elem::Star),
            Morph::Op(a) => match x {
                Elem::Pair(p, q) => a.op(p, q),
                _ => Err(bad("a pair")),
            },
            Morph::Act(a) => match x {
                Elem::Pair(s, q) => match &**s {
                    Elem::Scal(s) => a.act(*s, q),
                    _ => Err(bad("a scalar")),
                },
                _ => Err(bad("a pair")),
            },
            Morph::Inj1 => Ok(Elem::l(x.clone())),
            Morph::Inj2 => Ok(Elem::r(x.clone())),
            Morph::Inclusion => match x {
                Elem::Pair(a, b) => Ok(Elem::B(a.clone(), b.clone())),
                _ => Err(bad("a pair")),
            },
            Morph::CpMap(f, g) => match x {
                Elem::L(a) => Ok(Elem::l(f.apply(a)?)),
                Elem::R(b) => Ok(Elem::r(g.apply(b)?)),
                Elem::B(a, b) => Ok(Elem::b(f.apply(a)?, g.apply(b)?)),
                _ => Err(bad("a disjunction element")),
            },
            Morph::Mediate(f, g, c) => match x {
                Elem::L(a) => f.apply(a),
                Elem::R(b) => g.apply(b),
                Elem::B(a, b) => c.op(&f.apply(a)?, &g.apply(b)?),
                _ => Err(bad("a disjunction element")),
            },
            Morph::D => match x {
                Elem::Pair(e, c) => match &**e {
                    Elem::L(a) => Ok(Elem::l(Elem::Pair(a.clone(), c.clone()))),
                    Elem::R(b) => Ok(Elem::r(Elem::Pair(b.clone(), c.clone()))),
                    Elem::B(a, b) => Ok(Elem::b(
                        Elem::Pair(a.clone(), c.clone()),
                        Elem::Pair(b.clone(), c.clone()),
                    )),
                    _ => Err(bad("a disjunction element paired with a context")),
                },
                _ => Err(bad("a pair")),
            },
            Morph::Delta => match x {
                Elem::Pair(ab, c) => match &**ab {
                    Elem::Pair(a, b) => Ok(Elem::pair(
                        Elem::Pair(a.clone(), c.clone()),
                        Elem::Pair(b.clone(), c.clone()),
                    )),
                    _ => Err(bad("a nested pair")),
                },
                _ => Err(bad("a pair")),
            },
            Morph::Eta(car) => {
                let g = Arc::new(x.clone());
                Ok(Elem::Fn(
                    car.iter()
                        .map(|a| Elem::Pair(Arc::new(a.clone()), g.clone()))
                        .collect(),
                ))
            }
            Morph::HomPost(f) => match x {
                Elem::Fn(h) => Ok(Elem::Fn(
                    h.iter()
                        .map(|o| f.apply(o))
                        .collect::<Result<Vec<_>, _>>()?
                        .into(),
                )),
                _ => Err(bad("a function")),
            },
            Morph::Eval(a) => match x {
                Elem::Pair(h, arg) => match &**h {
                    Elem::Fn(g) => {
                        let i = a.rank(arg)? as usize;
                        g.get(i).cloned().ok_or_else(|| bad("an argument in range"))
                    }
                    _ => Err(bad("a function")),
                },
                _ => Err(bad("a pair")),
            },
            Morph::ScalarPoint(s) => Ok(Elem::Scal(*s)),
            Morph::Rho => Ok(Elem::pair(Elem::Star, x.clone())),
            Morph::Alpha => match x {
                Elem::Pair(ab, c) => match &**ab {
                    Elem::Pair(a, b) => Ok(Elem::Pair(a.clone(), Arc::new(Elem::Pair(b.clone(), c.clone())))),
                    _ => Err(bad("a nested pair")),
                },
                _ => Err(bad("a pair")),
            },
            Morph::Sigma => match x {
                Elem::Pair(a, b) => Ok(Elem::Pair(b.clone(), a.clone())),
                _ => Err(bad("a pair")),
            },
            Morph::Absurd => Err(bad("no element (domain is empty)")),
        }
    }

    pub(crate) fn tabulate(&self, dom: &SemObject, cod: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Arrow::from_fn(dom, cod, cap, |x| self.apply(x))
    }
}

fn expect_prod(o: &SemObject) -> Result<(SemObject, SemObject), SemError> {
    match o.shape() {
        Shape::Prod(a, b) => Ok((a.clone(), b.clone())),
        _ => Err(mismatch("a product object", o)),
    }
}

fn expect_cp(o: &SemObject) -> Result<(SemObject, SemObject), SemError> {
    match o.shape() {
        Shape::Cp(a, b) => Ok((a.clone(), b.clone())),
        _ => Err(mismatch("a disjunction object", o)),
    }
}

fn expect_hom(o: &SemObject) -> Result<(SemObject, SemObject), SemError> {
    match o.shape() {
        Shape::Hom(a, b) => Ok((a.clone(), b.clone())),
        _ => Err(mismatch("a function object", o)),
    }
}

fn expect_same(expected: &SemObject, actual: &SemObject) -> Result<(), SemError> {
    if expected.same_shape(actual) {
        Ok(())
    } else {
        Err(mismatch(expected, actual))
    }
}

/// Table-backed constructors for the standard arrows.
pub mod arrows {
    use super::*;

    pub fn identity(a: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Id.tabulate(a, a, cap)
    }

    pub fn compose(g: &Arrow, f: &Arrow, cap: u64) -> Result<Arrow, SemError> {
        expect_same(g.dom(), f.cod())?;
        Morph::compose(Morph::Tab(g.clone()), Morph::Tab(f.clone())).tabulate(f.dom(), g.cod(), cap)
    }

    pub fn product_map(f: &Arrow, g: &Arrow, cap: u64) -> Result<Arrow, SemError> {
        let dom = SemObject::prod(f.dom(), g.dom());
        let cod = SemObject::prod(f.cod(), g.cod());
        Morph::product(Morph::Tab(f.clone()), Morph::Tab(g.clone())).tabulate(&dom, &cod, cap)
    }

    pub fn proj1(a: &SemObject, b: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Proj1.tabulate(&SemObject::prod(a, b), a, cap)
    }

    pub fn proj2(a: &SemObject, b: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Proj2.tabulate(&SemObject::prod(a, b), b, cap)
    }

    pub fn diag(a: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Diag.tabulate(a, &SemObject::prod(a, a), cap)
    }

    pub fn bang(a: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Bang.tabulate(a, &SemObject::unit(), cap)
    }

    /// `δ : (A × B) × C → (A × C) × (B × C)`.
    pub fn delta_dist(a: &SemObject, b: &SemObject, c: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        let dom = SemObject::prod(&SemObject::prod(a, b), c);
        let cod = SemObject::prod(&SemObject::prod(a, c), &SemObject::prod(b, c));
        Morph::Delta.tabulate(&dom, &cod, cap)
    }

    /// `d : (A ⊕ B) × C → (A × C) ⊕ (B × C)`.
    pub fn d_dist(a: &SemObject, b: &SemObject, c: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        let dom = SemObject::prod(&SemObject::cp(a, b), c);
        let cod = SemObject::cp(&SemObject::prod(a, c), &SemObject::prod(b, c));
        Morph::D.tabulate(&dom, &cod, cap)
    }

    pub fn op_arrow(a: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Op(a.clone()).tabulate(&SemObject::prod(a, a), a, cap)
    }

    pub fn inj1(a: &SemObject, b: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Inj1.tabulate(a, &SemObject::cp(a, b), cap)
    }

    pub fn inj2(a: &SemObject, b: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Inj2.tabulate(b, &SemObject::cp(a, b), cap)
    }

    pub fn inclusion(a: &SemObject, b: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Inclusion.tabulate(&SemObject::prod(a, b), &SemObject::cp(a, b), cap)
    }

    /// `f ⊕ g`.
    pub fn cp_map(f: &Arrow, g: &Arrow, cap: u64) -> Result<Arrow, SemError> {
        let dom = SemObject::cp(f.dom(), g.dom());
        let cod = SemObject::cp(f.cod(), g.cod());
        Morph::CpMap(Box::new(Morph::Tab(f.clone())), Box::new(Morph::Tab(g.clone()))).tabulate(&dom, &cod, cap)
    }

    /// `[f, g]`.
    pub fn mediate(f: &Arrow, g: &Arrow, cap: u64) -> Result<Arrow, SemError> {
        expect_same(f.cod(), g.cod())?;
        let dom = SemObject::cp(f.dom(), g.dom());
        Morph::Mediate(
            Box::new(Morph::Tab(f.clone())),
            Box::new(Morph::Tab(g.clone())),
            f.cod().clone(),
        )
        .tabulate(&dom, f.cod(), cap)
    }

    /// `η : Γ → [A, A × Γ]`.
    pub fn eta(a: &SemObject, gamma: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        let cod = SemObject::hom(a, &SemObject::prod(a, gamma));
        cod.check_cap(cap)?;
        Morph::Eta(a.carrier(cap)?).tabulate(gamma, &cod, cap)
    }

    /// `f : A × Γ → B` curried to `Γ → [A, B]`, as `[A, f] ∘ η`.
    pub fn curry(f: &Arrow, cap: u64) -> Result<Arrow, SemError> {
        let (a, gamma) = expect_prod(f.dom())?;
        let cod = SemObject::hom(&a, f.cod());
        cod.check_cap(cap)?;
        Morph::compose(
            Morph::HomPost(Box::new(Morph::Tab(f.clone()))),
            Morph::Eta(a.carrier(cap)?),
        )
        .tabulate(&gamma, &cod, cap)
    }

    /// `[A, f] : [A, B] → [A, C]`.
    pub fn hom_post(a: &SemObject, f: &Arrow, cap: u64) -> Result<Arrow, SemError> {
        let dom = SemObject::hom(a, f.dom());
        let cod = SemObject::hom(a, f.cod());
        Morph::HomPost(Box::new(Morph::Tab(f.clone()))).tabulate(&dom, &cod, cap)
    }

    /// `ε : [A, B] × A → B`.
    pub fn eval(a: &SemObject, b: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        let dom = SemObject::prod(&SemObject::hom(a, b), a);
        Morph::Eval(a.clone()).tabulate(&dom, b, cap)
    }

    /// `⊙̂ : S × A → A`.
    pub fn action_arrow(s: &SemObject, a: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        if !matches!(s.shape(), Shape::Scalars(_)) {
            return Err(mismatch("the scalar object", s));
        }
        Morph::Act(a.clone()).tabulate(&SemObject::prod(s, a), a, cap)
    }

    /// `s : {⋆} → S`.
    pub fn scalar_point(s_obj: &SemObject, s: u16, cap: u64) -> Result<Arrow, SemError> {
        Morph::ScalarPoint(s).tabulate(&SemObject::unit(), s_obj, cap)
    }

    /// `ŝ = ⊙̂ ∘ (s × Id) ∘ ρ`.
    pub fn s_hat(s_obj: &SemObject, s: u16, a: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::pipeline(vec![
            Morph::Rho,
            Morph::product(Morph::ScalarPoint(s), Morph::Id),
            Morph::Act(a.clone()),
        ])
        .tabulate(a, a, cap)
        .and_then(|r| {
            if matches!(s_obj.shape(), Shape::Scalars(_)) {
                Ok(r)
            } else {
                Err(mismatch("the scalar object", s_obj))
            }
        })
    }

    /// `ρ : A → {⋆} × A`.
    pub fn rho(a: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Rho.tabulate(a, &SemObject::prod(&SemObject::unit(), a), cap)
    }

    /// `α : (A × B) × C → A × (B × C)`.
    pub fn alpha(a: &SemObject, b: &SemObject, c: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        let dom = SemObject::prod(&SemObject::prod(a, b), c);
        let cod = SemObject::prod(a, &SemObject::prod(b, c));
        Morph::Alpha.tabulate(&dom, &cod, cap)
    }

    /// `σ : A × B → B × A`.
    pub fn sigma(a: &SemObject, b: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        Morph::Sigma.tabulate(&SemObject::prod(a, b), &SemObject::prod(b, a), cap)
    }

    /// `∔` as an arrow `(A ⊕ B) × (A ⊕ B) → A ⊕ B`.
    pub fn sumcp_arrow(c: &SemObject, cap: u64) -> Result<Arrow, SemError> {
        expect_cp(c)?;
        op_arrow(c, cap)
    }

    pub fn hom_parts(o: &SemObject) -> Result<(SemObject, SemObject), SemError> {
        expect_hom(o)
    }
}

#[cfg(test)]
mod tests {
    use super::arrows::*;
    use super::*;
    use crate::syntax::BiMagma;

    const CAP: u64 = 1 << 16;

    fn s() -> SemObject {
        SemObject::scalars(Arc::new(BiMagma::z4()))
    }

    #[test]
    fn inclusion_lemma() {
        let (a, b) = (s(), SemObject::cp(&SemObject::unit(), &SemObject::unit()));
        let c = SemObject::cp(&a, &b);
        let lhs = compose(
            &sumcp_arrow(&c, CAP).unwrap(),
            &product_map(&inj1(&a, &b, CAP).unwrap(), &inj2(&a, &b, CAP).unwrap(), CAP).unwrap(),
            CAP,
        )
        .unwrap();
        assert!(lhs.equals(&inclusion(&a, &b, CAP).unwrap()).unwrap());
    }

    #[test]
    fn d_and_delta() {
        let u = SemObject::unit();
        let sc = s();
        let d = d_dist(&sc, &sc, &u, CAP).unwrap();
        let x = Elem::pair(Elem::b(Elem::Scal(1), Elem::Scal(2)), Elem::Star);
        assert_eq!(
            d.apply(&x).unwrap(),
            Elem::b(Elem::pair(Elem::Scal(1), Elem::Star), Elem::pair(Elem::Scal(2), Elem::Star))
        );
        let dl = delta_dist(&sc, &u, &sc, CAP).unwrap();
        let y = Elem::pair(Elem::pair(Elem::Scal(3), Elem::Star), Elem::Scal(0));
        assert_eq!(
            dl.apply(&y).unwrap(),
            Elem::pair(Elem::pair(Elem::Scal(3), Elem::Scal(0)), Elem::pair(Elem::Star, Elem::Scal(0)))
        );
    }

    #[test]
    fn mediate_third_clause() {
        let sc = s();
        let id = identity(&sc, CAP).unwrap();
        let two = s_hat(&sc, 2, &sc, CAP).unwrap();
        let m = mediate(&id, &two, CAP).unwrap();
        let x = Elem::b(Elem::Scal(1), Elem::Scal(3));
        assert_eq!(m.apply(&x).unwrap(), Elem::Scal(3));
        assert!(mediate(&id, &bang(&sc, CAP).unwrap(), CAP).is_err());
    }

    #[test]
    fn ccc_triangles() {
        let sc = s();
        let u = SemObject::cp(&SemObject::unit(), &SemObject::unit());
        let dom = SemObject::prod(&sc, &u);
        let f = Arrow::from_fn(&dom, &sc, CAP, |x| match x {
            Elem::Pair(a, g) => Ok(Elem::Scal(match &**a {
                Elem::Scal(i) => (*i + u.rank(g)? as u16) % 4,
                _ => 0,
            })),
            _ => Ok(Elem::Scal(0)),
        })
        .unwrap();
        let uncurried = |h: &Arrow| {
            compose(
                &eval(&sc, &sc, CAP).unwrap(),
                &compose(
                    &product_map(h, &identity(&sc, CAP).unwrap(), CAP).unwrap(),
                    &sigma(&sc, &u, CAP).unwrap(),
                    CAP,
                )
                .unwrap(),
                CAP,
            )
            .unwrap()
        };
        let h = curry(&f, CAP).unwrap();
        assert!(uncurried(&h).equals(&f).unwrap());
        assert!(curry(&uncurried(&h), CAP).unwrap().equals(&h).unwrap());
    }
}

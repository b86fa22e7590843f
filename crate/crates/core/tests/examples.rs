use std::collections::HashSet;
use std::sync::Arc;

use parlam::equivalence::{
    comp_equiv, common_reduct, enumerate_elim_contexts, enumerate_terms, par_disj_equiv, ContextBounds, ElimContext,
    EquivOptions, Frame,
};
use parlam::harness::worked_example;
use parlam::rewrite::{
    classify_normal, measure, normal_form, normalize, squig_reachable, step, unscheduled_successors, IntroClass, Rel,
    DEFAULT_FUSE,
};
use parlam::semantics::{arrows, denote_prop, prodcp, sumcp, Elem, SemObject, Semantics, DEFAULT_SIZE_CAP};
use parlam::syntax::{parse_prop, parse_term, BiMagma, Mode, Prop, Term};
use parlam::typing::{check, infer, Context};

fn plain() -> Mode {
    Mode::Plain
}

fn z4() -> Mode {
    Mode::algebraic(BiMagma::z4())
}

fn t(src: &str) -> Term {
    parse_term(src, &plain()).unwrap()
}

fn ta(src: &str) -> Term {
    parse_term(src, &z4()).unwrap()
}

fn p(src: &str) -> Prop {
    parse_prop(src).unwrap()
}

fn nf(src: &str, mode: &Mode) -> Term {
    let t = parse_term(src, mode).unwrap();
    normal_form(&t, Rel::Arrow, mode, DEFAULT_FUSE).unwrap()
}

fn table(src: &str, ty: &str, mode: &Mode) -> Vec<Elem> {
    let j = check(&Context::new(), &parse_term(src, mode).unwrap(), &p(ty), mode).unwrap();
    Semantics::with_default_cap(mode).denote_term(&j).unwrap().table().to_vec()
}

#[test]
fn props_parse_with_precedence() {
    assert_eq!(p("Top -> Top"), Prop::imp(Prop::Top, Prop::Top));
    assert_eq!(p("Top \\/ Top \\/ Bot"), Prop::or(Prop::or(Prop::Top, Prop::Top), Prop::Bot));
    assert_eq!(p("Top -> Top -> Bot"), Prop::imp(Prop::Top, Prop::imp(Prop::Top, Prop::Bot)));
    let a = Prop::imp(Prop::Top, Prop::or(Prop::Top, Prop::Bot));
    assert_eq!(p(&a.to_string()), a);
}

#[test]
fn terms_parse_and_print() {
    assert_eq!(t("inl(*) || inr(*)"), Term::par(Term::inl(Term::Star), Term::inr(Term::Star)));
    assert_eq!(t("\\x. x y"), Term::lam("x", Term::app(Term::var("x"), Term::var("y"))));
    assert_eq!(ta("sstar(2)"), Term::sstar("2"));
    assert_eq!(Term::par(Term::Star, Term::Star).to_string(), "* || *");
    let e = Term::elim_or(Term::var("t"), "x", Term::var("x"), "y", Term::var("y"));
    assert_eq!(e.to_string(), "dOr(t, x. x, y. y)");
    assert!(parse_term("sstar(7)", &z4()).is_err());
    assert!(parse_term("inl(*", &plain()).is_err());
}

#[test]
fn typing_examples() {
    let m = plain();
    let ctx = Context::new();
    assert_eq!(infer(&ctx, &t("(\\x. x : Top -> Top)"), &m).unwrap(), p("Top -> Top"));
    assert_eq!(infer(&ctx, &t("(inl(*) || inr(*) : Top \\/ Top)"), &m).unwrap(), p("Top \\/ Top"));
    assert_eq!(infer(&ctx, &ta("smul(2, (\\x. sstar(1)) sstar(3))"), &z4()).unwrap(), Prop::Top);
    assert!(check(&ctx, &t("inl(*)"), &p("Top \\/ Bot"), &m).is_ok());
    let z = ctx.extend("z", Prop::Bot).unwrap();
    assert!(check(&z, &t("dBot(z)"), &Prop::Top, &m).is_ok());
    assert!(check(&ctx, &t("* || inl(*)"), &Prop::Top, &m).is_err());
    assert!(infer(&ctx, &t("inl(*)"), &m).is_err());
}

#[test]
fn substitution_examples() {
    assert_eq!(t("x x").subst("x", &Term::Star), t("* *"));
    assert_eq!(t("z").subst("x", &Term::Star), t("z"));
    match t("\\y. x").subst("x", &Term::var("y")) {
        Term::Lam(b, body) => {
            assert_ne!(&*b, "y");
            assert_eq!(*body, Term::var("y"));
        }
        other => panic!("expected a lambda, got {other}"),
    }
}

#[test]
fn single_steps() {
    let m = plain();
    let one = |src: &str| step(&t(src), Rel::Arrow, &m).unwrap();
    let s = one("dTop(*, <*, *>)");
    assert_eq!((s.rule, s.term), ("dTop", t("<*, *>")));
    assert_eq!(one("(\\x. <x, x>) *").term, t("<*, *>"));
    assert_eq!(
        one("dOr(inl(*) || inr(*), x. x, y. y)").term,
        t("dOr(inl(*), x. x, y. y) || dOr(inr(*), x. x, y. y)")
    );
    let a = z4();
    let s = step(&ta("sstar(1) || sstar(2)"), Rel::Arrow, &a).unwrap();
    assert_eq!(s.term, ta("sstar(3)"));
    let s = step(&ta("smul(2, inl(sstar(1)))"), Rel::Arrow, &a).unwrap();
    assert_eq!(s.term, ta("inl(smul(2, sstar(1)))"));
    assert!(step(&t("inr(*) || inl(*)"), Rel::Arrow, &m).is_none());
    let s = step(&t("inr(*) || inl(*)"), Rel::Squig, &m).unwrap();
    assert_eq!(s.term, t("inl(*) || inr(*)"));
}

#[test]
fn normal_forms() {
    let m = plain();
    assert_eq!(nf("* || *", &m), Term::Star);
    let (n, trace) = normalize(&t("<*, inl(*)> || <*, inr(*)>"), Rel::Arrow, &m, DEFAULT_FUSE).unwrap();
    assert_eq!(trace.steps[0].rule, "par-pair");
    assert_eq!(trace.steps[0].term, t("<* || *, inl(*) || inr(*)>"));
    assert_eq!(n, t("<*, inl(*) || inr(*)>"));
}

#[test]
fn measure_examples() {
    assert_eq!(measure(&t("inl(*)")), Some(1));
    assert_eq!(measure(&t("inr(*) || inl(*)")), Some(3));
    assert_eq!(measure(&t("inl(*) || inr(*)")), Some(2));
    assert_eq!(measure(&t("*")), None);
}

#[test]
fn introduction_classes() {
    let m = plain();
    assert_eq!(classify_normal(&Term::Star, &Prop::Top, Rel::Arrow, &m), Ok(IntroClass::Star));
    let tt = p("Top \\/ Top");
    assert_eq!(classify_normal(&t("inl(*) || inr(*)"), &tt, Rel::Squig, &m), Ok(IntroClass::InlInr));
    assert_eq!(classify_normal(&t("inr(*) || inl(*)"), &tt, Rel::Arrow, &m), Ok(IntroClass::OrTree));
    assert!(classify_normal(&t("inr(*) || inl(*)"), &tt, Rel::Squig, &m).is_err());
}

#[test]
fn squig_closures() {
    let m = plain();
    let r: HashSet<Term> = squig_reachable(&t("inr(*) || inl(*)"), &m, DEFAULT_FUSE).unwrap().into_iter().collect();
    let expected: HashSet<Term> = [t("inr(*) || inl(*)"), t("inl(*) || inr(*)")].into_iter().collect();
    assert_eq!(r, expected);
    assert_eq!(squig_reachable(&Term::Star, &m, DEFAULT_FUSE).unwrap().len(), 1);

    let (_, [p1, _, p3]) = worked_example(&m);
    let target = normal_form(&p1, Rel::Squig, &m, DEFAULT_FUSE).unwrap();
    assert!(squig_reachable(&p3, &m, DEFAULT_FUSE).unwrap().contains(&target));
}

#[test]
fn prop_objects() {
    let m = plain();
    let c = denote_prop(&p("Top \\/ Top"), &m).unwrap();
    let car = c.carrier(DEFAULT_SIZE_CAP).unwrap();
    let expected = [Elem::l(Elem::Star), Elem::r(Elem::Star), Elem::b(Elem::Star, Elem::Star)];
    assert_eq!(car.len(), 3);
    assert!(expected.iter().all(|e| car.contains(e)));
    let c = denote_prop(&p("Bot \\/ Top"), &m).unwrap();
    assert_eq!(&*c.carrier(DEFAULT_SIZE_CAP).unwrap(), &[Elem::r(Elem::Star)]);
    assert_eq!(denote_prop(&p("Top -> Top \\/ Top"), &m).unwrap().size(), Some(3));
}

#[test]
fn sum_and_action_tables() {
    let s = Arc::new(BiMagma::z4());
    let (sa, sb) = (SemObject::scalars(s.clone()), SemObject::scalars(s.clone()));
    let (a, b) = (Elem::Scal(1), Elem::Scal(3));
    let l = |x: &Elem| Elem::l(x.clone());
    let r = |x: &Elem| Elem::r(x.clone());
    assert_eq!(sumcp(&sa, &sb, &l(&a), &r(&b)).unwrap(), Elem::b(a.clone(), b.clone()));
    assert_eq!(sumcp(&sa, &sb, &r(&b), &l(&a)).unwrap(), Elem::b(a.clone(), b.clone()));
    // Z4 addition by hand: 2+2 = 0, 3+3 = 2, 1+2 = 3.
    let ab = Elem::b(Elem::Scal(2), Elem::Scal(3));
    assert_eq!(sumcp(&sa, &sb, &ab, &ab).unwrap(), Elem::b(Elem::Scal(0), Elem::Scal(2)));
    assert_eq!(
        sumcp(&sa, &sb, &l(&a), &Elem::b(Elem::Scal(2), b.clone())).unwrap(),
        Elem::b(Elem::Scal(3), b.clone())
    );
    // 2 * 1 = 2 and 2 * 3 = 2 in Z4.
    assert_eq!(prodcp(&sa, &sb, 2, &l(&a)).unwrap(), Elem::l(Elem::Scal(2)));
    assert_eq!(prodcp(&sa, &sb, 2, &Elem::b(a.clone(), b.clone())).unwrap(), Elem::b(Elem::Scal(2), Elem::Scal(2)));
    assert_eq!(prodcp(&sa, &SemObject::unit(), 2, &l(&a)).unwrap(), Elem::l(Elem::Scal(2)));
}

#[test]
fn standard_arrows() {
    let cap = DEFAULT_SIZE_CAP;
    let u = SemObject::unit();
    let tt = SemObject::cp(&u, &u);
    let i1 = arrows::inj1(&u, &u, cap).unwrap();
    let i2 = arrows::inj2(&u, &u, cap).unwrap();
    let id = arrows::identity(&tt, cap).unwrap();
    let med = arrows::mediate(&i1, &i2, cap).unwrap();
    assert!(med.equals(&id).unwrap());
    assert!(arrows::compose(&id, &i1, cap).unwrap().equals(&i1).unwrap());
    let d = arrows::d_dist(&u, &u, &u, cap).unwrap();
    let x = Elem::pair(Elem::b(Elem::Star, Elem::Star), Elem::Star);
    let pr = Elem::pair(Elem::Star, Elem::Star);
    assert_eq!(d.apply(&x).unwrap(), Elem::b(pr.clone(), pr));
}

#[test]
fn denotations() {
    let m = plain();
    assert_eq!(table("* || *", "Top", &m), vec![Elem::Star]);
    assert_eq!(table("inl(*) || inr(*)", "Top \\/ Top", &m), vec![Elem::b(Elem::Star, Elem::Star)]);
    assert_eq!(table("inr(*) || inl(*)", "Top \\/ Top", &m), vec![Elem::b(Elem::Star, Elem::Star)]);

    // Both sides of the worked example land on (inl(*), inl(*)) in the
    // outer pair component: inl(*) joined with inl(*) is inl(*) in Top \/ Top.
    let (a, ps) = worked_example(&m);
    let ll = Elem::l(Elem::Star);
    let expected = vec![Elem::b(ll.clone(), ll)];
    for q in &ps {
        let j = check(&Context::new(), q, &a, &m).unwrap();
        assert_eq!(Semantics::with_default_cap(&m).denote_term(&j).unwrap().table(), &expected[..]);
    }

    let a = z4();
    assert_eq!(table("sstar(1) || sstar(2)", "Top", &a), vec![Elem::Scal(3)]);
    assert_eq!(table("sstar(3)", "Top", &a), vec![Elem::Scal(3)]);
    assert_ne!(
        table("(\\x. sstar(1)) smul(2, sstar(3))", "Top", &a),
        table("smul(2, (\\x. sstar(1)) sstar(3))", "Top", &a)
    );
}

#[test]
fn scalar_counterexample_regression() {
    let a = z4();
    assert_eq!(nf("smul(2, (\\x. sstar(1)) sstar(3))", &a), ta("sstar(2)"));
    assert_eq!(nf("(\\x. sstar(1)) smul(2, sstar(3))", &a), ta("sstar(1)"));
    // 2 * 1 = 2 while the argument is thrown away.
    assert_eq!(table("smul(2, (\\x. sstar(1)) sstar(3))", "Top", &a), vec![Elem::Scal(2)]);
    assert_eq!(table("(\\x. sstar(1)) smul(2, sstar(3))", "Top", &a), vec![Elem::Scal(1)]);
}

#[test]
fn unscheduled_rewriting_is_not_confluent() {
    let m = plain();
    let start = t("dOr(inr(u) || inl(t), x. x, y. y)");
    let mut seen = vec![start];
    let mut i = 0;
    while i < seen.len() {
        for s in unscheduled_successors(&seen[i].clone(), &m) {
            if !seen.contains(&s.term) {
                seen.push(s.term);
            }
        }
        i += 1;
    }
    let normal: Vec<&Term> = seen.iter().filter(|x| unscheduled_successors(x, &m).is_empty()).collect();
    assert!(normal.contains(&&t("u || t")));
    assert!(normal.contains(&&t("t || u")));
    assert_eq!(normal.len(), 2);
    assert_eq!(nf("dOr(inr(u) || inl(t), x. x, y. y)", &m), t("u || t"));
    let squig = normal_form(&seen[0], Rel::Squig, &m, DEFAULT_FUSE).unwrap();
    assert_eq!(squig, t("u || t"));
}

#[test]
fn contexts_plug_and_enumerate() {
    let app = ElimContext {
        frames: vec![Frame::Apply(Term::Star)],
        hole: p("Top -> Top"),
        result: Prop::Top,
    };
    assert_eq!(app.plug(&t("\\x. x")), t("(\\x. x) *"));
    let fst = ElimContext {
        frames: vec![Frame::Fst],
        hole: p("Top /\\ Top"),
        result: Prop::Top,
    };
    assert_eq!(fst.plug(&t("<*, *>")), t("fst(<*, *>)"));

    let m = plain();
    let b = ContextBounds::new(3);
    let ks = enumerate_elim_contexts(&p("Top \\/ Top"), &b, &m);
    assert!(ks.iter().any(|k| k.frames.is_empty()));
    let ks = enumerate_elim_contexts(&p("Top -> Top \\/ Top"), &b, &m);
    assert!(ks.iter().any(|k| k.plug(&Term::var("h")) == t("h *")));
    let ks = enumerate_elim_contexts(&p("(Top \\/ Top) /\\ Top"), &b, &m);
    assert!(ks.iter().any(|k| k.plug(&Term::var("h")) == t("fst(h)")));
}

#[test]
fn parallel_disjunction_equivalence() {
    let m = plain();
    let (_, [p1, p2, p3]) = worked_example(&m);
    for (x, y) in [(&p1, &p2), (&p2, &p3), (&p1, &p3)] {
        assert!(par_disj_equiv(x, y, &m).unwrap());
        assert!(par_disj_equiv(y, x, &m).unwrap());
    }
    assert!(!par_disj_equiv(&t("inl(*)"), &t("inr(*)"), &m).unwrap());
    assert!(par_disj_equiv(&p1, &p1, &m).unwrap());
    assert!(par_disj_equiv(&Term::Star, &Term::Star, &m).is_err());
}

#[test]
fn computational_equivalence() {
    let m = plain();
    let opts = EquivOptions::new(6);
    let tt = p("Top \\/ Top");
    let r = comp_equiv(&t("inl(*) || inr(*)"), &t("inr(*) || inl(*)"), &tt, &m, &opts).unwrap();
    assert!(r.verdict);
    let r = comp_equiv(&t("\\x. x"), &t("\\x. x || x"), &p("Top -> Top"), &m, &opts).unwrap();
    assert!(r.verdict);
    let r = comp_equiv(&t("inl(*)"), &t("inr(*)"), &tt, &m, &opts).unwrap();
    assert!(!r.verdict);
    assert!(r.witness().unwrap().context.frames.is_empty());
}

#[test]
fn worked_example_end_to_end() {
    let m = plain();
    let (a, ps) = worked_example(&m);
    let k = t("dOr(h, x1. dOr(x1, y1. inl(y1), y2. inr(y2)), x2. dOr(x2, y3. inr(y3), y4. y4))");
    let plugged: Vec<Term> = ps.iter().map(|q| k.subst("h", q)).collect();
    for q in &plugged {
        assert_eq!(infer(&Context::new(), &Term::ann(q.clone(), p("Top \\/ Top")), &m).unwrap(), p("Top \\/ Top"));
    }
    let n: Vec<Term> = plugged
        .iter()
        .map(|q| normal_form(q, Rel::Arrow, &m, DEFAULT_FUSE).unwrap())
        .collect();
    assert_eq!(n[0], t("inl(*) || inr(*)"));
    assert_eq!(n[1], t("(inl(*) || inl(*)) || inr(*)"));
    assert_eq!(n[2], t("inr(*) || (inl(*) || inl(*))"));
    for i in 0..3 {
        for j in 0..3 {
            assert!(par_disj_equiv(&n[i], &n[j], &m).unwrap());
        }
    }
    assert!(common_reduct(&plugged[0], &plugged[1], &m, DEFAULT_FUSE).unwrap());
    let opts = EquivOptions::new(5);
    assert!(comp_equiv(&ps[0], &ps[2], &a, &m, &opts).unwrap().verdict);
}

#[test]
fn enumeration_examples() {
    let m = plain();
    let top = enumerate_terms(&Prop::Top, 3, &m);
    assert!(top.contains(&Term::Star));
    assert!(top.contains(&t("* || *")));
    assert!(enumerate_terms(&Prop::Bot, 6, &m).is_empty());
    let tt = enumerate_terms(&p("Top \\/ Top"), 5, &m);
    for want in ["inl(*)", "inr(*)", "inl(*) || inr(*)"] {
        assert!(tt.contains(&t(want)), "{want}");
    }
}

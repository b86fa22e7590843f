use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{shell_quote, HarnessConfig, HarnessReport, Tally};
use crate::equivalence::{common_reduct, enumerate_terms, Sampler};
use crate::rewrite::{arrow_successors, classify_normal, measure, normal_form, step, Rel};
use crate::syntax::{Mode, Prop, Term};
use crate::typing::{check, Context};

/// Sample attempts before a draw is given up.
const ATTEMPTS: usize = 64;

/// Subject reduction, normalisation, confluence of `→`, the introduction
/// property and the decrease of the measure, on seeded random samples.
pub fn metatheory(cfg: &HarnessConfig) -> HarnessReport {
    let start = Instant::now();
    let mut sampler = Sampler::new(cfg.seed, &cfg.mode);
    let max = 2 * cfg.max_term_size;
    let samples: Vec<(Term, Prop)> = (0..cfg.samples)
        .filter_map(|_| sampler.sample_up_to(None, max, ATTEMPTS))
        .collect();
    let mut notes = vec![format!("{} samples of size <= {max}", samples.len())];
    if samples.len() < cfg.samples {
        notes.push(format!("{} draws gave up", cfg.samples - samples.len()));
    }
    let parts: Vec<Tally> = samples
        .par_iter()
        .enumerate()
        .map(|(i, (t, a))| check_sample(i as u64, t, a, cfg))
        .collect();
    let mut tally = Tally::default();
    for p in parts {
        tally.merge(p);
    }
    tally.merge(fixed_checks(cfg));
    HarnessReport::new("metatheory", cfg, tally, notes, start.elapsed())
}

fn rerun(t: &Term, a: &Prop, rel: Rel, cfg: &HarnessConfig) -> String {
    format!(
        "parlam normalize {} --type {} --rel {} --trace{}",
        shell_quote(&t.to_string()),
        shell_quote(&a.to_string()),
        rel,
        cfg.cli_flags()
    )
}

/// Follows uniformly random `→` redexes to a normal form.
fn random_normal_form(t: &Term, mode: &Mode, rng: &mut ChaCha8Rng, fuse: usize) -> Option<Term> {
    let mut cur = t.clone();
    for _ in 0..fuse {
        let succ = arrow_successors(&cur, mode);
        if succ.is_empty() {
            return Some(cur);
        }
        let k = rng.gen_range(0..succ.len());
        cur = succ.into_iter().nth(k).expect("index in range").term;
    }
    None
}

fn check_sample(i: u64, t: &Term, a: &Prop, cfg: &HarnessConfig) -> Tally {
    let mode = &cfg.mode;
    let mut tally = Tally::default();
    let empty = Context::new();
    let mut normals = Vec::new();
    for rel in [Rel::Arrow, Rel::Squig] {
        // Subject reduction and, on hook steps, the measure.
        let mut cur = t.clone();
        let mut done = false;
        for _ in 0..cfg.fuse {
            let Some(st) = step(&cur, rel, mode) else {
                done = true;
                break;
            };
            tally.checks += 1;
            if let Err(e) = check(&empty, &st.term, a, mode) {
                tally.fail(
                    "subject-reduction",
                    format!("{t} : {a}\n{rel} step {} @ {} gives {}: {e}", st.rule, st.path, st.term),
                    rerun(t, a, rel, cfg),
                );
            }
            if st.rule.starts_with("hook") {
                tally.checks += 1;
                let before = cur.at(&st.path).and_then(measure);
                let after = st.term.at(&st.path).and_then(measure);
                if !matches!((before, after), (Some(b), Some(af)) if b > af) {
                    tally.fail(
                        "measure",
                        format!("{t}\n{} @ {}: |{}| = {before:?}, after {after:?}", st.rule, st.path, cur),
                        rerun(t, a, rel, cfg),
                    );
                }
            }
            cur = st.term;
        }
        tally.checks += 1;
        if !done {
            tally.fail(
                "normalisation",
                format!("{t} : {a} has no {rel}-normal form within {} steps", cfg.fuse),
                rerun(t, a, rel, cfg),
            );
            return tally;
        }
        tally.checks += 1;
        if let Err(v) = classify_normal(&cur, a, rel, mode) {
            tally.fail("introduction", format!("{t} : {a}\n{v}"), rerun(t, a, rel, cfg));
        }
        normals.push(cur);
    }
    // Two random strategies against the leftmost-outermost one.
    for k in 0..2u64 {
        tally.checks += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (i.wrapping_mul(0x9e37_79b9_7f4a_7c15)).wrapping_add(k));
        match random_normal_form(t, mode, &mut rng, cfg.fuse) {
            Some(nf) if nf == normals[0] => {}
            other => {
                let got = other.map_or("no normal form".to_string(), |n| n.to_string());
                tally.fail(
                    "confluence",
                    format!("{t} : {a}\nleftmost-outermost: {}\nrandom strategy {k}: {got}", normals[0]),
                    rerun(t, a, Rel::Arrow, cfg),
                );
            }
        }
    }
    tally
}

/// Closed proofs of the worked example, with every atom read as `⊤` and
/// every leaf proof as `*` (or the first scalar).
pub fn worked_example(mode: &Mode) -> (Prop, [Term; 3]) {
    let unit = match mode.scalars() {
        Some(s) => Term::sstar(s.name(0)),
        None => Term::Star,
    };
    let (inl, inr, par) = (Term::inl, Term::inr, Term::par);
    let u = || unit.clone();
    let p1 = par(inl(inl(par(u(), u()))), inr(inl(u())));
    let p2 = par(par(inl(inl(u())), inl(inl(u()))), inr(inl(u())));
    let p3 = par(inr(inl(u())), inl(par(inl(u()), inl(u()))));
    let top = || Prop::Top;
    let a = Prop::or(Prop::or(top(), top()), Prop::or(top(), Prop::or(top(), top())));
    (a, [p1, p2, p3])
}

fn fixed_checks(cfg: &HarnessConfig) -> Tally {
    let mode = &cfg.mode;
    let mut tally = Tally::default();
    let (a, ps) = worked_example(mode);
    for p in &ps[1..] {
        tally.checks += 1;
        if !matches!(common_reduct(p, &ps[0], mode, cfg.fuse), Ok(true)) {
            tally.fail(
                "worked-example",
                format!("{p} does not reach the closure of {}", ps[0]),
                rerun(p, &a, Rel::Squig, cfg),
            );
        }
    }
    for t in enumerate_terms(&Prop::Top, cfg.max_term_size.min(6), mode) {
        tally.checks += 1;
        match normal_form(&t, Rel::Arrow, mode, cfg.fuse) {
            Ok(Term::Star) if !mode.is_algebraic() => {}
            Ok(Term::SStar(_)) if mode.is_algebraic() => {}
            other => {
                let got = other.map_or_else(|e| e.to_string(), |n| n.to_string());
                tally.fail(
                    "top-normal-forms",
                    format!("{t} : Top normalises to {got}"),
                    rerun(&t, &Prop::Top, Rel::Arrow, cfg),
                );
            }
        }
    }
    tally
}

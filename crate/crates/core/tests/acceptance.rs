//! One line per acceptance criterion. Run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use parlam::equivalence::{common_reduct, par_disj_equiv};
use parlam::harness::{self, worked_example, HarnessConfig, HarnessReport};
use parlam::rewrite::{normal_form, unscheduled_successors, Rel, DEFAULT_FUSE};
use parlam::semantics::Semantics;
use parlam::syntax::{parse_term, BiMagma, Mode, Prop, Term};
use parlam::typing::{check, Context};

const MAX_TERM_SIZE: usize = 7;
const MAX_CONNECTIVES: usize = 3;
const SAMPLES: usize = 10_000;
const ADEQUACY_TERM_SIZE: usize = 6;
const ADEQUACY_CONTEXT_SIZE: usize = 6;
/// Every criterion allows zero failures.
const ALLOWED_FAILURES: usize = 0;
const SOUNDNESS_BUDGET: Duration = Duration::from_secs(120);
const ADEQUACY_BUDGET: Duration = Duration::from_secs(600);

/// Algebraic soundness does not hold for the scalar rules on disjunctions;
/// the sweep finds counterexamples with both fixtures.
const KNOWN_FAILING: &[u32] = &[2];

struct Line {
    n: u32,
    what: &'static str,
    pass: bool,
    detail: String,
}

fn config(mode: Mode) -> HarnessConfig {
    HarnessConfig {
        mode,
        max_term_size: MAX_TERM_SIZE,
        max_connectives: MAX_CONNECTIVES,
        samples: SAMPLES,
        ..HarnessConfig::default()
    }
}

fn summary(r: &HarnessReport) -> String {
    let mut s = format!(
        "{} checks, {} skipped, {} failures, {:.1?}",
        r.checks_run,
        r.skipped,
        r.failures.len(),
        r.elapsed
    );
    if let Some(f) = r.failures.first() {
        s.push_str(&format!("; first: [{}] {}", f.check, f.detail.lines().next().unwrap_or("")));
    }
    s
}

fn harness_line(n: u32, what: &'static str, r: &HarnessReport, budget: Option<Duration>) -> Line {
    let in_time = budget.map_or(true, |b| r.elapsed < b);
    Line {
        n,
        what,
        pass: r.failures.len() <= ALLOWED_FAILURES && in_time,
        detail: summary(r),
    }
}

fn worked(mode: &Mode) -> (bool, String) {
    let (_, ps) = worked_example(mode);
    let k = parse_term(
        "dOr(h, x1. dOr(x1, y1. inl(y1), y2. inr(y2)), x2. dOr(x2, y3. inr(y3), y4. y4))",
        mode,
    )
    .unwrap();
    let mut ok = true;
    for i in 0..3 {
        for j in 0..3 {
            ok &= par_disj_equiv(&ps[i], &ps[j], mode).unwrap_or(false);
        }
    }
    let plugged: Vec<Term> = ps.iter().map(|p| k.subst("h", p)).collect();
    let nfs: Vec<Term> = plugged
        .iter()
        .map(|p| normal_form(p, Rel::Arrow, mode, DEFAULT_FUSE).unwrap())
        .collect();
    for i in 0..3 {
        for j in 0..3 {
            ok &= par_disj_equiv(&nfs[i], &nfs[j], mode).unwrap_or(false);
        }
    }
    ok &= common_reduct(&plugged[0], &plugged[1], mode, DEFAULT_FUSE).unwrap_or(false);
    let shown: Vec<String> = nfs.iter().map(|t| t.to_string()).collect();
    (ok, format!("K[p1], K[p2], K[p3] -> {}", shown.join(" ; ")))
}

fn counterexample() -> (bool, String) {
    let m = Mode::algebraic(BiMagma::z4());
    let t = parse_term("smul(2, (\\x. sstar(1)) sstar(3))", &m).unwrap();
    let u = parse_term("(\\x. sstar(1)) smul(2, sstar(3))", &m).unwrap();
    let nt = normal_form(&t, Rel::Arrow, &m, DEFAULT_FUSE).unwrap();
    let nu = normal_form(&u, Rel::Arrow, &m, DEFAULT_FUSE).unwrap();
    let sem = Semantics::with_default_cap(&m);
    let dt = sem.denote_term(&check(&Context::new(), &t, &Prop::Top, &m).unwrap()).unwrap();
    let du = sem.denote_term(&check(&Context::new(), &u, &Prop::Top, &m).unwrap()).unwrap();
    let ok = nt == Term::sstar("2") && nu == Term::sstar("1") && !dt.equals(&du).unwrap();
    (ok, format!("{nt} vs {nu}, tables {:?} vs {:?}", dt.table(), du.table()))
}

fn non_confluence() -> (bool, String) {
    let m = Mode::Plain;
    let start = parse_term("dOr(inr(u) || inl(t), x. x, y. y)", &m).unwrap();
    let (ut, tu) = (parse_term("u || t", &m).unwrap(), parse_term("t || u", &m).unwrap());
    let mut seen = vec![start.clone()];
    let mut i = 0;
    while i < seen.len() {
        for s in unscheduled_successors(&seen[i].clone(), &m) {
            if !seen.contains(&s.term) {
                seen.push(s.term);
            }
        }
        i += 1;
    }
    let both = seen.contains(&ut) && seen.contains(&tu);
    let runs: Vec<Term> = (0..3)
        .map(|_| normal_form(&start, Rel::Squig, &m, DEFAULT_FUSE).unwrap())
        .collect();
    let det = runs.iter().all(|r| *r == ut);
    (both && det, format!("unscheduled reaches both: {both}; scheduled gives {}", runs[0]))
}

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let plain = Mode::Plain;

    let c1 = harness::soundness(&config(plain.clone()));
    lines.push(harness_line(1, "soundness sweep (plain)", &c1, Some(SOUNDNESS_BUDGET)));

    let mut c2 = Vec::new();
    for s in [BiMagma::z4(), BiMagma::rnd()] {
        let cfg = HarnessConfig {
            stop_at_first_failure: true,
            ..config(Mode::algebraic(s))
        };
        c2.push(harness::soundness(&cfg));
    }
    lines.push(Line {
        n: 2,
        what: "algebraic soundness sweep (z4, rnd)",
        pass: c2.iter().all(|r| r.failures.len() <= ALLOWED_FAILURES),
        detail: c2.iter().map(summary).collect::<Vec<_>>().join(" | "),
    });

    let c3 = harness::metatheory(&config(plain.clone()));
    lines.push(harness_line(3, "metatheory sweep", &c3, None));

    let c4 = harness::category(&config(plain.clone()));
    lines.push(harness_line(4, "category suite", &c4, None));

    let (ok, detail) = worked(&plain);
    lines.push(Line { n: 5, what: "worked example", pass: ok, detail });

    let (ok, detail) = counterexample();
    lines.push(Line { n: 6, what: "scalar counterexample", pass: ok, detail });

    let (ok, detail) = non_confluence();
    lines.push(Line { n: 7, what: "non-confluence witness", pass: ok, detail });

    let acfg = HarnessConfig {
        max_term_size: ADEQUACY_TERM_SIZE,
        max_context_size: ADEQUACY_CONTEXT_SIZE,
        ..config(plain.clone())
    };
    let c8 = harness::adequacy(&acfg);
    lines.push(harness_line(8, "adequacy sweep", &c8, Some(ADEQUACY_BUDGET)));

    let start = Instant::now();
    let again = [
        (&c1, harness::soundness(&config(plain.clone()))),
        (&c3, harness::metatheory(&config(plain.clone()))),
        (&c4, harness::category(&config(plain.clone()))),
        (&c8, harness::adequacy(&acfg)),
    ];
    let same = again.iter().all(|(a, b)| a.render() == b.render());
    lines.push(Line {
        n: 9,
        what: "determinism",
        pass: same,
        detail: format!("4 harnesses rerun with seed 0, identical: {same}, {:.1?}", start.elapsed()),
    });

    for l in &lines {
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {}: {} ({})", l.n, verdict, l.what, l.detail);
    }
    let failing: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.n).collect();
    println!("failing: {failing:?}, known failing: {KNOWN_FAILING:?}");
    assert_eq!(failing, KNOWN_FAILING);
}

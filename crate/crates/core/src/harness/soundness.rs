use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use super::{shell_quote, HarnessConfig, HarnessReport, Tally};
use crate::equivalence::for_each_term;
use crate::rewrite::{step, Rel};
use crate::semantics::{Arrow, SemError, Semantics};
use crate::syntax::{Prop, Term};
use crate::typing::{check, Context};

/// Types are swept in blocks of this many; a block runs in parallel.
const BLOCK: usize = 32;
/// Tables longer than this are not printed in failure reports.
const MAX_TABLE_LINES: usize = 16;

/// For every enumerated closed term and every step on its `→` and `⇝`
/// reduction paths, the denotations before and after agree.
pub fn soundness(cfg: &HarnessConfig) -> HarnessReport {
    let start = Instant::now();
    let sem = Semantics::new(&cfg.mode, cfg.size_cap);
    let props = Prop::all_up_to(cfg.max_connectives);
    let mut tally = Tally::default();
    let mut notes = Vec::new();
    for (i, block) in props.chunks(BLOCK).enumerate() {
        let parts: Vec<Tally> = block.par_iter().map(|a| sweep_type(a, cfg, &sem)).collect();
        for p in parts {
            tally.merge(p);
        }
        if cfg.stop_at_first_failure && !tally.failures.is_empty() {
            let done = (i * BLOCK + block.len()).min(props.len());
            notes.push(format!("stopped after {done} of {} types", props.len()));
            break;
        }
    }
    HarnessReport::new("soundness", cfg, tally, notes, start.elapsed())
}

fn sweep_type(a: &Prop, cfg: &HarnessConfig, sem: &Semantics) -> Tally {
    let mut tally = Tally::default();
    for_each_term(&Context::new(), a, cfg.max_term_size, &cfg.mode, |t| {
        if cfg.stop_at_first_failure && !tally.failures.is_empty() {
            return;
        }
        check_paths(t, a, cfg, sem, &mut tally);
    });
    tally
}

type Denotation = Result<Arrow, String>;

/// Checks every step on the `→` and `⇝` paths of one closed term.
pub(crate) fn check_paths(t: &Term, a: &Prop, cfg: &HarnessConfig, sem: &Semantics, tally: &mut Tally) {
    let mode = &cfg.mode;
    let mut memo: HashMap<Term, Option<Denotation>> = HashMap::new();
    let mut denote = |u: &Term, tally: &mut Tally| -> Option<Denotation> {
        if let Some(d) = memo.get(u) {
            return d.clone();
        }
        let d = match check(&Context::new(), u, a, mode) {
            Err(e) => Some(Err(format!("ill-typed: {e}"))),
            Ok(j) => match sem.denote_term(&j) {
                Ok(arr) => Some(Ok(arr)),
                Err(SemError::SizeCap { .. }) => None,
                Err(e) => Some(Err(e.to_string())),
            },
        };
        if d.is_none() {
            tally.skipped += 1;
        }
        memo.insert(u.clone(), d.clone());
        d
    };
    let mut seen_steps: HashMap<(Term, Term), ()> = HashMap::new();
    for rel in [Rel::Arrow, Rel::Squig] {
        let mut cur = t.clone();
        for _ in 0..cfg.fuse {
            let Some(st) = step(&cur, rel, mode) else { break };
            if seen_steps.insert((cur.clone(), st.term.clone()), ()).is_none() {
                tally.checks += 1;
                let before = denote(&cur, tally);
                let after = denote(&st.term, tally);
                if let (Some(b), Some(af)) = (before, after) {
                    if let Some(detail) = compare(&b, &af) {
                        let rerun = format!(
                            "parlam equal-denot {} {} --type {}{}",
                            shell_quote(&cur.to_string()),
                            shell_quote(&st.term.to_string()),
                            shell_quote(&a.to_string()),
                            cfg.cli_flags()
                        );
                        tally.fail(
                            "soundness",
                            format!(
                                "{t} : {a}\n{rel} step {} @ {}\nbefore: {cur}\nafter:  {}\n{detail}",
                                st.rule, st.path, st.term
                            ),
                            rerun,
                        );
                        return;
                    }
                }
            }
            cur = st.term;
        }
    }
}

fn compare(before: &Denotation, after: &Denotation) -> Option<String> {
    match (before, after) {
        (Err(e), _) => Some(format!("before: {e}")),
        (_, Err(e)) => Some(format!("after: {e}")),
        (Ok(b), Ok(a)) => match b.first_difference(a) {
            None => None,
            Some((x, l, r)) => {
                let mut s = format!(
                    "differ at {}: {} vs {}",
                    b.dom().render(&x),
                    b.cod().render(&l),
                    b.cod().render(&r)
                );
                if b.table().len() <= MAX_TABLE_LINES {
                    s.push_str(&format!(
                        "\nbefore table:\n{}after table:\n{}",
                        b.render_table(),
                        a.render_table()
                    ));
                }
                Some(s)
            }
        },
    }
}

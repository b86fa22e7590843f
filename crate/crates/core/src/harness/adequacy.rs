use std::collections::HashMap;
use std::time::Instant;

use indexmap::IndexMap;
use rayon::prelude::*;

use super::{shell_quote, HarnessConfig, HarnessReport, Tally};
use crate::equivalence::{enumerate_elim_contexts, enumerate_terms, ContextBounds, ElimContext};
use crate::rewrite::{normal_form, squig_reachable, Rel};
use crate::semantics::{Elem, SemError, Semantics};
use crate::syntax::{parse_prop, Prop, Term};
use crate::typing::{check, Context};

/// The types swept by the adequacy harness.
pub const ADEQUACY_TYPES: [&str; 6] = [
    "Top",
    "Top \\/ Top",
    "Top /\\ Top",
    "Top -> Top",
    "Top -> Top \\/ Top",
    "(Top \\/ Top) \\/ Top",
];

/// Closed terms with equal denotations are computationally equivalent.
pub fn adequacy(cfg: &HarnessConfig) -> HarnessReport {
    let start = Instant::now();
    let sem = Semantics::new(&cfg.mode, cfg.size_cap);
    let mut tally = Tally::default();
    let mut notes = Vec::new();
    for src in ADEQUACY_TYPES {
        let a = parse_prop(src).expect("fixed type");
        let (t, note) = sweep(&a, cfg, &sem);
        tally.merge(t);
        notes.push(note);
    }
    HarnessReport::new("adequacy", cfg, tally, notes, start.elapsed())
}

fn sweep(a: &Prop, cfg: &HarnessConfig, sem: &Semantics) -> (Tally, String) {
    let mode = &cfg.mode;
    let mut tally = Tally::default();
    let terms = enumerate_terms(a, cfg.max_term_size, mode);
    let tables: Vec<Result<Vec<Elem>, SemError>> = terms
        .par_iter()
        .map(|t| {
            let j = check(&Context::new(), t, a, mode).expect("enumerated terms are typed");
            sem.denote_term(&j).map(|arr| arr.table().to_vec())
        })
        .collect();
    let mut groups: IndexMap<Vec<Elem>, Vec<usize>> = IndexMap::new();
    for (i, r) in tables.into_iter().enumerate() {
        match r {
            Ok(table) => groups.entry(table).or_default().push(i),
            Err(SemError::SizeCap { .. }) => tally.skipped += 1,
            Err(e) => tally.fail("adequacy", format!("{} : {a}: {e}", terms[i]), String::new()),
        }
    }
    let contexts = enumerate_elim_contexts(a, &ContextBounds::new(cfg.max_context_size), mode);
    let members: Vec<usize> = groups.values().filter(|g| g.len() > 1).flatten().copied().collect();
    // Normal forms of every plugged member, as indices into `distinct`.
    let plugged: Vec<(usize, Vec<Result<Term, String>>)> = members
        .par_iter()
        .map(|&i| {
            let row = contexts
                .iter()
                .map(|k| normal_form(&k.plug(&terms[i]), Rel::Arrow, mode, cfg.fuse).map_err(|e| e.to_string()))
                .collect();
            (i, row)
        })
        .collect();
    let mut distinct: IndexMap<Term, ()> = IndexMap::new();
    let mut rows: HashMap<usize, Vec<Result<usize, String>>> = HashMap::new();
    for (i, row) in plugged {
        let ids = row
            .into_iter()
            .map(|r| r.map(|v| distinct.insert_full(v, ()).0))
            .collect();
        rows.insert(i, ids);
    }
    let reach: Vec<Result<Vec<Term>, String>> = distinct
        .keys()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|v| {
            squig_reachable(v, mode, cfg.fuse)
                .map(|s| s.into_iter().collect())
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    let mut equiv = |x: usize, y: usize| -> Result<bool, String> {
        if x == y {
            return Ok(true);
        }
        let key = (x.min(y), x.max(y));
        if let Some(&b) = memo.get(&key) {
            return Ok(b);
        }
        let (rx, ry) = (reach[x].as_ref().map_err(|e| e.clone())?, reach[y].as_ref().map_err(|e| e.clone())?);
        let b = rx.iter().any(|u| ry.contains(u));
        memo.insert(key, b);
        Ok(b)
    };
    let mut pairs = 0u64;
    let mut largest = 0;
    for group in groups.values().filter(|g| g.len() > 1) {
        largest = largest.max(group.len());
        for (p, &i) in group.iter().enumerate() {
            for &j in &group[p + 1..] {
                pairs += 1;
                tally.checks += 1;
                let verdict = (0..contexts.len()).try_for_each(|c| {
                    let vi = rows[&i][c].clone().map_err(|e| (c, e))?;
                    let vj = rows[&j][c].clone().map_err(|e| (c, e))?;
                    match equiv(vi, vj) {
                        Ok(true) => Ok(()),
                        Ok(false) => Err((c, format!("{} and {} share no ⇝-reduct", distinct_at(&distinct, vi), distinct_at(&distinct, vj)))),
                        Err(e) => Err((c, e)),
                    }
                });
                if let Err((c, why)) = verdict {
                    tally.fail(
                        "adequacy",
                        failure_detail(&terms[i], &terms[j], a, &contexts[c], &why),
                        format!(
                            "parlam comp-equiv {} {} --type {} --max-context-size {}{}",
                            shell_quote(&terms[i].to_string()),
                            shell_quote(&terms[j].to_string()),
                            shell_quote(&a.to_string()),
                            cfg.max_context_size,
                            cfg.cli_flags()
                        ),
                    );
                }
            }
        }
    }
    let note = format!(
        "{a}: {} terms, {} denotations, {} contexts, {pairs} equal-denotation pairs (largest group {largest})",
        terms.len(),
        groups.len(),
        contexts.len()
    );
    (tally, note)
}

fn distinct_at(d: &IndexMap<Term, ()>, i: usize) -> String {
    d.get_index(i).map(|(t, _)| t.to_string()).unwrap_or_default()
}

fn failure_detail(t: &Term, u: &Term, a: &Prop, k: &ElimContext, why: &str) -> String {
    format!("{t} and {u} : {a} have equal denotations\ncontext {k}: {why}")
}

//! Desk-scale experiments tying the other modules together.
//!
//! Every harness is a pure function of its [`HarnessConfig`]; the rendered
//! report leaves out wall-clock time so identical configurations give
//! identical text.

mod adequacy;
mod category;
mod metatheory;
mod soundness;

use std::fmt::Write as _;
use std::time::Duration;

pub use adequacy::{adequacy, ADEQUACY_TYPES};
pub use category::{category, comm_semigroups};
pub use metatheory::{metatheory, worked_example};
pub use soundness::soundness;

use crate::rewrite::DEFAULT_FUSE;
use crate::semantics::DEFAULT_SIZE_CAP;
use crate::syntax::Mode;

#[derive(Clone, Debug)]
pub struct HarnessConfig {
    pub mode: Mode,
    pub max_term_size: usize,
    pub max_context_size: usize,
    pub samples: usize,
    pub seed: u64,
    pub size_cap: u64,
    pub fuse: usize,
    /// Types are drawn from propositions with at most this many connectives.
    pub max_connectives: usize,
    /// Stop a sweep at the first block of work that produced a failure.
    pub stop_at_first_failure: bool,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            mode: Mode::Plain,
            max_term_size: 7,
            max_context_size: 6,
            samples: 10_000,
            seed: 0,
            size_cap: DEFAULT_SIZE_CAP,
            fuse: DEFAULT_FUSE,
            max_connectives: 3,
            stop_at_first_failure: false,
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<(), String> {
        let bounds = [
            ("max-size", self.max_term_size as u64),
            ("max-context-size", self.max_context_size as u64),
            ("samples", self.samples as u64),
            ("size-cap", self.size_cap),
            ("fuse", self.fuse as u64),
        ];
        for (name, v) in bounds {
            if v == 0 {
                return Err(format!("--{name} must be at least 1"));
            }
        }
        Ok(())
    }

    fn describe(&self) -> String {
        let mode = match &self.mode {
            Mode::Plain => "plain".to_string(),
            Mode::Algebraic(s) => format!("algebraic/{}", s.label()),
        };
        format!(
            "mode {mode}, max-size {}, max-context-size {}, samples {}, seed {}, size-cap {}, fuse {}",
            self.max_term_size, self.max_context_size, self.samples, self.seed, self.size_cap, self.fuse
        )
    }

    /// Flags that reproduce the semantic setting on the command line.
    pub fn cli_flags(&self) -> String {
        let mut s = self.mode.cli_flags();
        if self.size_cap != DEFAULT_SIZE_CAP {
            let _ = write!(s, " --size-cap {}", self.size_cap);
        }
        if self.fuse != DEFAULT_FUSE {
            let _ = write!(s, " --fuse {}", self.fuse);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub check: String,
    pub detail: String,
    /// A single command that reproduces the failure.
    pub rerun: String,
}

/// Counters and failures of a block of work; merged in a fixed order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    pub checks: u64,
    pub skipped: u64,
    pub failures: Vec<Failure>,
}

impl Tally {
    pub fn fail(&mut self, check: &str, detail: String, rerun: String) {
        self.failures.push(Failure {
            check: check.to_string(),
            detail,
            rerun,
        });
    }

    pub fn merge(&mut self, other: Tally) {
        self.checks += other.checks;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
    }
}

#[derive(Clone, Debug)]
pub struct HarnessReport {
    pub harness: String,
    pub config: String,
    pub checks_run: u64,
    /// Checks not run because an object exceeded the size cap.
    pub skipped: u64,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl HarnessReport {
    pub(crate) fn new(harness: &str, cfg: &HarnessConfig, tally: Tally, notes: Vec<String>, elapsed: Duration) -> Self {
        HarnessReport {
            harness: harness.to_string(),
            config: cfg.describe(),
            checks_run: tally.checks,
            skipped: tally.skipped,
            failures: tally.failures,
            notes,
            elapsed,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Deterministic rendering (no timings).
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "harness {} ({})", self.harness, self.config);
        let _ = writeln!(s, "checks run: {}", self.checks_run);
        let _ = writeln!(s, "skipped (size cap): {}", self.skipped);
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "failures: {}", self.failures.len());
        for f in &self.failures {
            let _ = writeln!(s, "FAIL [{}] {}", f.check, f.detail.trim_end().replace('\n', "\n    "));
            let _ = writeln!(s, "  rerun: {}", f.rerun);
        }
        let _ = writeln!(s, "result: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

/// Single-quotes a string for a POSIX shell.
pub fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "'\\''"))
}

pub const HARNESSES: [&str; 4] = ["soundness", "metatheory", "category", "adequacy"];

pub fn run(name: &str, cfg: &HarnessConfig) -> Option<HarnessReport> {
    match name {
        "soundness" => Some(soundness(cfg)),
        "metatheory" => Some(metatheory(cfg)),
        "category" => Some(category(cfg)),
        "adequacy" => Some(adequacy(cfg)),
        _ => None,
    }
}

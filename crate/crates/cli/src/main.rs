use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use parlam::equivalence::{comp_equiv, EquivOptions};
use parlam::harness::{self, HarnessConfig};
use parlam::rewrite::{normalize, Rel, DEFAULT_FUSE};
use parlam::semantics::{Semantics, DEFAULT_SIZE_CAP};
use parlam::syntax::{parse_prop, parse_term, BiMagma, Mode, Prop, Term};
use parlam::typing::{check, infer_judgment, Context, Judgment};

#[derive(Parser, Debug)]
#[command(name = "parlam", version, about = "Workbench for the parallel lambda calculus")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum, default_value_t = ModeArg::Plain, global = true)]
    mode: ModeArg,
    /// Bi-magma of scalars (TOML); `z4.bimagma` and `rnd.bimagma` are built in.
    #[arg(long, global = true)]
    scalars: Option<PathBuf>,
    /// Expected type of the term(s).
    #[arg(long = "type", global = true)]
    ty: Option<String>,
    #[arg(long, value_enum, default_value_t = RelArg::Arrow, global = true)]
    rel: RelArg,
    /// Print every reduction step.
    #[arg(long, global = true)]
    trace: bool,
    #[arg(long, default_value_t = 7, global = true)]
    max_size: usize,
    #[arg(long, default_value_t = 6, global = true)]
    max_context_size: usize,
    #[arg(long, default_value_t = 10_000, global = true)]
    samples: usize,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP, global = true)]
    size_cap: u64,
    #[arg(long, default_value_t = DEFAULT_FUSE, global = true)]
    fuse: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Plain,
    Algebraic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RelArg {
    Arrow,
    Squig,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ResultArg {
    /// `Top \/ Top`, as in the definition.
    Or,
    /// `Top`.
    Top,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Type-check a closed term.
    Check { term: String },
    /// Normalise a term.
    Normalize { term: String },
    /// Print the denotation of a closed term as a table.
    Denote { term: String },
    /// Compare the denotations of two closed terms.
    EqualDenot { left: String, right: String },
    /// Test computational equivalence against elimination contexts.
    CompEquiv {
        left: String,
        right: String,
        /// Result type of the contexts.
        #[arg(long, value_enum, default_value_t = ResultArg::Or)]
        result: ResultArg,
    },
    /// Run one of the harnesses.
    Harness {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(harness::HARNESSES))]
        name: String,
        /// Stop a sweep at the first block of work that fails.
        #[arg(long)]
        stop_at_first_failure: bool,
    },
}

/// A failed command: usage problems exit 2, counterexamples exit 1.
enum Fail {
    Usage(String),
    Check(String),
}

type Outcome = Result<bool, Fail>;

fn usage<E: std::fmt::Display>(e: E) -> Fail {
    Fail::Usage(e.to_string())
}

fn checked<E: std::fmt::Display>(e: E) -> Fail {
    Fail::Check(e.to_string())
}

impl Common {
    fn mode(&self) -> Result<Mode, Fail> {
        match (self.mode, &self.scalars) {
            (ModeArg::Plain, None) => Ok(Mode::Plain),
            (ModeArg::Plain, Some(_)) => Err(usage("--scalars needs --mode algebraic")),
            (ModeArg::Algebraic, None) => Err(usage("--mode algebraic needs --scalars <file>")),
            (ModeArg::Algebraic, Some(p)) => {
                let b = if p.exists() {
                    BiMagma::load(p).map_err(usage)?
                } else {
                    match p.to_str() {
                        Some("z4.bimagma") => BiMagma::z4(),
                        Some("rnd.bimagma") => BiMagma::rnd(),
                        _ => return Err(usage(format!("cannot read {}", p.display()))),
                    }
                };
                Ok(Mode::algebraic(b))
            }
        }
    }

    fn prop(&self) -> Result<Option<Prop>, Fail> {
        self.ty.as_deref().map(|s| parse_prop(s).map_err(usage)).transpose()
    }

    fn needs_type(&self) -> Result<Prop, Fail> {
        self.prop()?.ok_or_else(|| usage("--type is required"))
    }

    fn rel(&self) -> Rel {
        match self.rel {
            RelArg::Arrow => Rel::Arrow,
            RelArg::Squig => Rel::Squig,
        }
    }

    fn judgment(&self, t: &Term, mode: &Mode) -> Result<Judgment, Fail> {
        match self.prop()? {
            Some(a) => check(&Context::new(), t, &a, mode).map_err(checked),
            None => infer_judgment(&Context::new(), t, mode).map_err(checked),
        }
    }
}

fn term(src: &str, mode: &Mode) -> Result<Term, Fail> {
    parse_term(src, mode).map_err(|e| usage(format!("{e}\n  {src}")))
}

fn run(cli: &Cli) -> Outcome {
    let c = &cli.common;
    let mode = c.mode()?;
    match &cli.cmd {
        Cmd::Check { term: src } => {
            let t = term(src, &mode)?;
            println!("{}", c.judgment(&t, &mode)?);
            Ok(true)
        }
        Cmd::Normalize { term: src } => {
            let t = term(src, &mode)?;
            if c.ty.is_some() {
                c.judgment(&t, &mode)?;
            }
            let (nf, trace) = normalize(&t, c.rel(), &mode, c.fuse).map_err(checked)?;
            if c.trace {
                print!("{trace}");
            }
            println!("{nf}");
            Ok(true)
        }
        Cmd::Denote { term: src } => {
            let t = term(src, &mode)?;
            let j = c.judgment(&t, &mode)?;
            let sem = Semantics::new(&mode, c.size_cap);
            let arr = sem.denote_term(&j).map_err(checked)?;
            let size = |o: &parlam::semantics::SemObject| o.size().map_or("?".to_string(), |n| n.to_string());
            println!("dom={} cod={}", size(arr.dom()), size(arr.cod()));
            print!("{}", arr.render_table());
            Ok(true)
        }
        Cmd::EqualDenot { left, right } => {
            let a = c.needs_type()?;
            let (t, u) = (term(left, &mode)?, term(right, &mode)?);
            let sem = Semantics::new(&mode, c.size_cap);
            let jt = check(&Context::new(), &t, &a, &mode).map_err(checked)?;
            let ju = check(&Context::new(), &u, &a, &mode).map_err(checked)?;
            let dt = sem.denote_term(&jt).map_err(checked)?;
            let du = sem.denote_term(&ju).map_err(checked)?;
            match dt.first_difference(&du) {
                None => {
                    println!("equal");
                    Ok(true)
                }
                Some((x, l, r)) => {
                    println!(
                        "different at {}: {} vs {}",
                        dt.dom().render(&x),
                        dt.cod().render(&l),
                        dt.cod().render(&r)
                    );
                    if c.trace {
                        print!("left:\n{}right:\n{}", dt.render_table(), du.render_table());
                    }
                    Ok(false)
                }
            }
        }
        Cmd::CompEquiv { left, right, result } => {
            let a = c.needs_type()?;
            let (t, u) = (term(left, &mode)?, term(right, &mode)?);
            let mut opts = EquivOptions::new(c.max_context_size);
            opts.fuse = c.fuse;
            if *result == ResultArg::Top {
                opts.bounds.result = Prop::Top;
            }
            let report = comp_equiv(&t, &u, &a, &mode, &opts).map_err(checked)?;
            println!("{report}");
            Ok(report.verdict)
        }
        Cmd::Harness {
            name,
            stop_at_first_failure,
        } => {
            let cfg = HarnessConfig {
                mode,
                max_term_size: c.max_size,
                max_context_size: c.max_context_size,
                samples: c.samples,
                seed: c.seed,
                size_cap: c.size_cap,
                fuse: c.fuse,
                stop_at_first_failure: *stop_at_first_failure,
                ..HarnessConfig::default()
            };
            cfg.validate().map_err(usage)?;
            let report = harness::run(name, &cfg).ok_or_else(|| usage(format!("unknown harness {name}")))?;
            print!("{}", report.render());
            eprintln!("elapsed: {:.2?}", report.elapsed);
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
    }
}

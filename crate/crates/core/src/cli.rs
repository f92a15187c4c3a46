//! The `ccskit` command-line front end.
//!
//! Exit codes: 0 related/pass, 1 unrelated/fail, 2 usage or parse error,
//! 3 state-space cap reached.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::congruence::congruence_check;
use crate::equivalence::{check, RelationKind};
use crate::error::{Error, Result};
use crate::klop::{self, coarsest_congr_crosscheck, coarsest_congr_decide};
use crate::laws::{self, Binding, Bindings, LawReport};
use crate::parser::{parse_term, parse_workspace, print_term, print_workspace};
use crate::semantics::{explore, Limits, Lts};
use crate::syntax::{Environment, LabelId, ProcessTerm};
use crate::weak::saturate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ccskit", version, about = "CCS terms, transition systems and bisimilarity checking")]
pub struct Cli {
    #[command(flatten)]
    pub config: WorkspaceConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct WorkspaceConfig {
    /// `.ccs` workspace files with constant definitions
    #[arg(long = "file", short = 'f', global = true)]
    pub files: Vec<PathBuf>,
    #[arg(long, global = true, env = "CCSKIT_MAX_STATES", default_value_t = 10_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_states: u64,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_steps: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl WorkspaceConfig {
    pub fn limits(&self) -> Limits {
        Limits { max_states: self.max_states as usize, max_steps: self.max_steps as usize }
    }

    /// Merges every workspace file into one environment.
    pub fn environment(&self) -> Result<Environment> {
        let mut alphabet = Vec::new();
        let mut defs = Vec::new();
        for path in &self.files {
            let src = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidIdentifier(format!("{}: {e}", path.display())))?;
            let env = parse_workspace(&src)?;
            alphabet.extend(env.alphabet().cloned());
            defs.extend(env.definitions().map(|(n, t)| (n.clone(), t.clone())));
        }
        Environment::new(alphabet, defs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Strong,
    Weak,
    Obscongr,
}

impl From<KindArg> for RelationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Strong => RelationKind::Strong,
            KindArg::Weak => RelationKind::Weak,
            KindArg::Obscongr => RelationKind::ObsCongr,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a term (or the loaded workspace) and print it canonically
    Parse {
        term: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build the transition system of a term
    Lts {
        term: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Include ε-closures and weak transitions (json only)
        #[arg(long)]
        saturated: bool,
    },
    /// Decide strong, weak or observation congruence between two terms
    Check {
        #[arg(value_enum)]
        kind: KindArg,
        lhs: String,
        rhs: String,
    },
    /// Check law instances from the catalog
    Laws {
        #[arg(long)]
        law: Option<String>,
        /// Metavariable binding, e.g. `E=a.0` or `u='b`
        #[arg(long = "bind")]
        binds: Vec<String>,
        /// Number of random instances per law
        #[arg(long)]
        corpus: Option<usize>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Print the law identifiers and exit
        #[arg(long)]
        list: bool,
    },
    /// Check that a pair stays related under all contexts up to a depth
    Congr {
        lhs: String,
        rhs: String,
        #[arg(long, value_enum, default_value = "weak")]
        kind: KindArg,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Terms used for the non-hole slots of contexts
        #[arg(long = "fill", num_args = 1..)]
        fill: Vec<String>,
    },
    /// Classify a weakly bisimilar pair by the Deng lemma cases
    Deng { p: String, q: String },
    /// Evaluate the Hennessy lemma on a pair
    Hennessy { p: String, q: String },
    /// Print the Klop process KLOP(a, n)
    Klop {
        #[arg(long, default_value = "a")]
        action: String,
        #[arg(long)]
        index: usize,
    },
    /// Decide observation congruence through a Klop summand and cross-check it
    Coarsest {
        p: String,
        q: String,
        #[arg(long, default_value_t = 25)]
        samples: usize,
    },
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ExceedsCap { .. } | Error::IncompleteLts => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn term_in(env: &Environment, src: &str) -> Result<(Environment, ProcessTerm)> {
    let p = parse_term(src)?;
    let env = env.extended_for([&p]);
    env.check_term(&p)?;
    Ok((env, p))
}

fn pair_in(env: &Environment, p: &str, q: &str) -> Result<(Environment, ProcessTerm, ProcessTerm)> {
    let (p, q) = (parse_term(p)?, parse_term(q)?);
    let env = env.extended_for([&p, &q]);
    Ok((env, p, q))
}

fn emit(out: &mut dyn Write, v: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?).ok();
    Ok(())
}

fn pass(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn lts_text(lts: &Lts) -> String {
    let mut s = format!("{} states, {} edges\n", lts.len(), lts.edges().len());
    for (i, p) in lts.states().enumerate() {
        s.push_str(&format!("s{i} = {}\n", print_term(p)));
    }
    for e in lts.edges() {
        s.push_str(&format!("s{} --{}-> s{}\n", e.source, e.action, e.target));
    }
    if !lts.is_complete() {
        s.push_str("incomplete\n");
    }
    s
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = &cli.config;
    let env = cfg.environment()?;
    let limits = cfg.limits();
    match &cli.command {
        Command::Parse { term, format } => {
            match term {
                Some(src) => {
                    let (_, p) = term_in(&env, src)?;
                    match format {
                        Format::Json => writeln!(out, "{}", p.to_json()).ok(),
                        _ => writeln!(out, "{}", print_term(&p)).ok(),
                    };
                }
                None => {
                    write!(out, "{}", print_workspace(&env)).ok();
                }
            }
            Ok(EXIT_OK)
        }
        Command::Lts { term, format, saturated } => {
            let (env, p) = term_in(&env, term)?;
            let lts = explore(&env, &[p], limits)?;
            let complete = lts.is_complete();
            match format {
                Format::Dot => {
                    write!(out, "{}", lts.to_dot()).ok();
                }
                Format::Text => {
                    write!(out, "{}", lts_text(&lts)).ok();
                }
                Format::Json => {
                    let mut v = lts.to_json();
                    if *saturated && complete {
                        v["saturated"] = saturate(lts)?.to_json();
                    }
                    emit(out, &v)?;
                }
            }
            Ok(if complete { EXIT_OK } else { EXIT_CAP })
        }
        Command::Check { kind, lhs, rhs } => {
            let (env, p, q) = pair_in(&env, lhs, rhs)?;
            let v = check(&env, (*kind).into(), &p, &q, limits)?;
            emit(out, &v.to_json())?;
            Ok(pass(v.related))
        }
        Command::Laws { law, binds, corpus, depth, list } => {
            if *list {
                for l in laws::catalog() {
                    writeln!(out, "{}", l.id).ok();
                }
                return Ok(EXIT_OK);
            }
            let reports = run_laws(&env, law.as_deref(), binds, *corpus, *depth, cfg.seed, limits)?;
            let mut ok = true;
            for r in &reports {
                ok &= r.passed;
                writeln!(out, "{}", serde_json::to_string(&r.to_json())?).ok();
            }
            Ok(pass(ok))
        }
        Command::Congr { lhs, rhs, kind, depth, fill } => {
            let (env, p, q) = pair_in(&env, lhs, rhs)?;
            let mut fill_terms = fill.iter().map(|s| parse_term(s)).collect::<Result<Vec<_>>>()?;
            if fill_terms.is_empty() {
                fill_terms.push(ProcessTerm::Nil);
                fill_terms.extend(env.alphabet().map(|a| ProcessTerm::prefix(crate::Action::name(a.clone()), ProcessTerm::Nil)));
            }
            let r = congruence_check(&env, (*kind).into(), &[(p, q)], *depth, &fill_terms, limits)?;
            emit(out, &r.to_json())?;
            Ok(pass(r.all_contexts_pass))
        }
        Command::Deng { p, q } => {
            let (env, p, q) = pair_in(&env, p, q)?;
            match laws::deng_classify(&env, &p, &q, limits) {
                Ok(o) => {
                    emit(out, &o.to_json())?;
                    Ok(pass(o.any()))
                }
                Err(Error::NotWeaklyEquivalent) => {
                    emit(out, &json!({ "weak_equiv": false }))?;
                    Ok(EXIT_FAIL)
                }
                Err(e) => Err(e),
            }
        }
        Command::Hennessy { p, q } => {
            let (env, p, q) = pair_in(&env, p, q)?;
            let o = laws::hennessy_classify(&env, &p, &q, limits)?;
            emit(out, &o.to_json())?;
            Ok(pass(o.consistent()))
        }
        Command::Klop { action, index } => {
            let a = LabelId::new(action)?;
            writeln!(out, "{}", print_term(&klop::klop(&a, *index)?)).ok();
            Ok(EXIT_OK)
        }
        Command::Coarsest { p, q, samples } => {
            let (env, p, q) = pair_in(&env, p, q)?;
            let decide = coarsest_congr_decide(&env, &p, &q, limits)?;
            let cross = coarsest_congr_crosscheck(&env, &p, &q, *samples, cfg.seed, limits)?;
            emit(out, &json!({ "decide": decide.to_json(), "crosscheck": cross.to_json() }))?;
            Ok(pass(cross.consistent()))
        }
    }
}

fn run_laws(
    env: &Environment,
    law: Option<&str>,
    binds: &[String],
    corpus: Option<usize>,
    depth: usize,
    seed: u64,
    limits: Limits,
) -> Result<Vec<LawReport>> {
    let mut alphabet: Vec<LabelId> = env.alphabet().cloned().collect();
    if alphabet.is_empty() {
        alphabet = vec![LabelId::new("a")?, LabelId::new("b")?];
    }
    let env = Environment::new(alphabet.clone(), env.definitions().map(|(n, t)| (n.clone(), t.clone())))?;
    match (law, corpus) {
        (Some(id), None) => {
            let law = laws::law(id)?;
            let mut b = Bindings::new();
            for kv in binds {
                let (name, src) = kv.split_once('=').ok_or_else(|| Error::Binding {
                    law: law.id.to_owned(),
                    message: format!("binding `{kv}` is not of the form NAME=VALUE"),
                })?;
                let name = name.trim();
                let kind = law.metavar_kind(name).ok_or_else(|| Error::Binding {
                    law: law.id.to_owned(),
                    message: format!("`{name}` is not a metavariable of this law"),
                })?;
                b.insert(name, Binding::parse(kind, src)?);
            }
            Ok(vec![laws::check_law_with(&env, &law, &b, limits)?])
        }
        (Some(id), Some(n)) => {
            let law = laws::law(id)?;
            let mut gen = laws::generate_terms(&alphabet, depth, seed);
            (0..n).map(|_| laws::check_law_with(&env, &law, &law.random_bindings(&mut gen), limits)).collect()
        }
        (None, n) => laws::run_corpus(&env, &alphabet, depth, n.unwrap_or(10), seed, limits),
    }
}

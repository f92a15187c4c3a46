//! Executable catalog of the algebraic laws of weak bisimilarity and
//! observation congruence, with Deng and Hennessy case classification.
//!
//! A law is a conclusion `lhs R rhs` (or a stability claim) guarded by zero
//! or more premises. Laws without premises must hold on every instance;
//! implications pass vacuously when a premise fails.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde_json::json;

use crate::equivalence::{check, RelationKind, Verdict, WeakAnalysis};
use crate::error::{Error, Result};
use crate::generate::TermGenerator;
use crate::parser::{parse_action, parse_label_set, parse_relabeling, parse_term, print_term};
use crate::semantics::{stable, Limits};
use crate::syntax::{Action, Environment, LabelId, ProcessTerm, Relabeling};

pub use crate::generate::generate_terms;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetaKind {
    Term,
    Action,
    Labels,
    Relabeling,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Term(ProcessTerm),
    Action(Action),
    Labels(Vec<LabelId>),
    Relabeling(Relabeling),
}

impl Binding {
    fn kind(&self) -> MetaKind {
        match self {
            Binding::Term(_) => MetaKind::Term,
            Binding::Action(_) => MetaKind::Action,
            Binding::Labels(_) => MetaKind::Labels,
            Binding::Relabeling(_) => MetaKind::Relabeling,
        }
    }

    /// Parses the textual form of a binding of the given kind.
    pub fn parse(kind: MetaKind, src: &str) -> Result<Self> {
        Ok(match kind {
            MetaKind::Term => Binding::Term(parse_term(src)?),
            MetaKind::Action => Binding::Action(parse_action(src)?),
            MetaKind::Labels => Binding::Labels(parse_label_set(src)?),
            MetaKind::Relabeling => Binding::Relabeling(parse_relabeling(src)?),
        })
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Term(p) => f.write_str(&print_term(p)),
            Binding::Action(u) => u.fmt(f),
            Binding::Labels(ls) => {
                let names: Vec<_> = ls.iter().map(LabelId::as_str).collect();
                write!(f, "{{{}}}", names.join(", "))
            }
            Binding::Relabeling(rf) => {
                let pairs: Vec<_> = rf.map().iter().map(|(a, b)| format!("{a}->{b}")).collect();
                write!(f, "[{}]", pairs.join(", "))
            }
        }
    }
}

/// Metavariable assignment for one law instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<String, Binding>);

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn insert(&mut self, name: &str, b: Binding) -> &mut Self {
        self.0.insert(name.to_owned(), b);
        self
    }

    pub fn with(mut self, name: &str, b: Binding) -> Self {
        self.insert(name, b);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Binding)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    // The accessors below are only called after `Law::validate`.

    pub fn term(&self, name: &str) -> ProcessTerm {
        match self.0.get(name) {
            Some(Binding::Term(p)) => p.clone(),
            _ => panic!("metavariable {name} is not a bound term"),
        }
    }

    pub fn action(&self, name: &str) -> Action {
        match self.0.get(name) {
            Some(Binding::Action(u)) => u.clone(),
            _ => panic!("metavariable {name} is not a bound action"),
        }
    }

    pub fn labels(&self, name: &str) -> Vec<LabelId> {
        match self.0.get(name) {
            Some(Binding::Labels(l)) => l.clone(),
            _ => panic!("metavariable {name} is not a bound label set"),
        }
    }

    pub fn relabeling(&self, name: &str) -> Relabeling {
        match self.0.get(name) {
            Some(Binding::Relabeling(rf)) => rf.clone(),
            _ => panic!("metavariable {name} is not a bound relabelling"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    Related(RelationKind, ProcessTerm, ProcessTerm),
    Stable(ProcessTerm),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Holds,
    ImplicationHolds,
}

impl Expectation {
    pub fn as_str(self) -> &'static str {
        match self {
            Expectation::Holds => "holds",
            Expectation::ImplicationHolds => "implication_holds",
        }
    }
}

/// A law schema over named metavariables.
#[derive(Clone, Debug)]
pub struct Law {
    pub id: &'static str,
    pub metavars: &'static [(&'static str, MetaKind)],
    premises: fn(&Bindings) -> Vec<Claim>,
    conclusion: fn(&Bindings) -> Claim,
    /// Term metavariable pairs that random instantiation should try to
    /// relate so implication premises are not almost always vacuous.
    related_pairs: &'static [(&'static str, &'static str, RelationKind)],
}

impl Law {
    pub const fn new(
        id: &'static str,
        metavars: &'static [(&'static str, MetaKind)],
        premises: fn(&Bindings) -> Vec<Claim>,
        conclusion: fn(&Bindings) -> Claim,
    ) -> Self {
        Law { id, metavars, premises, conclusion, related_pairs: &[] }
    }

    const fn relating(mut self, pairs: &'static [(&'static str, &'static str, RelationKind)]) -> Self {
        self.related_pairs = pairs;
        self
    }

    pub fn expectation(&self) -> Expectation {
        if (self.premises)(&self.dummy_bindings()).is_empty() {
            Expectation::Holds
        } else {
            Expectation::ImplicationHolds
        }
    }

    fn dummy_bindings(&self) -> Bindings {
        let mut b = Bindings::new();
        for &(name, kind) in self.metavars {
            let v = match kind {
                MetaKind::Term => Binding::Term(ProcessTerm::Nil),
                MetaKind::Action => Binding::Action(Action::Tau),
                MetaKind::Labels => Binding::Labels(Vec::new()),
                MetaKind::Relabeling => Binding::Relabeling(Relabeling::default()),
            };
            b.insert(name, v);
        }
        b
    }

    pub fn metavar_kind(&self, name: &str) -> Option<MetaKind> {
        self.metavars.iter().find(|(n, _)| *n == name).map(|&(_, k)| k)
    }

    pub fn validate(&self, b: &Bindings) -> Result<()> {
        for &(name, kind) in self.metavars {
            match b.get(name) {
                None => return Err(self.binding_error(format!("metavariable {name} is unbound"))),
                Some(v) if v.kind() != kind => {
                    return Err(self.binding_error(format!("metavariable {name} expects a {kind:?}")))
                }
                _ => {}
            }
        }
        if let Some((extra, _)) = b.iter().find(|(n, _)| self.metavar_kind(n).is_none()) {
            return Err(self.binding_error(format!("`{extra}` is not a metavariable of this law")));
        }
        Ok(())
    }

    fn binding_error(&self, message: String) -> Error {
        Error::Binding { law: self.id.to_owned(), message }
    }

    /// Random bindings. Term metavariables named in `related_pairs` are,
    /// most of the time, instantiated as related rewrites of each other.
    pub fn random_bindings(&self, gen: &mut TermGenerator) -> Bindings {
        let mut b = Bindings::new();
        for &(name, kind) in self.metavars {
            let v = match kind {
                MetaKind::Term => Binding::Term(gen.term()),
                MetaKind::Action => Binding::Action(gen.action()),
                MetaKind::Labels => Binding::Labels(gen.labels()),
                MetaKind::Relabeling => Binding::Relabeling(gen.relabeling()),
            };
            b.insert(name, v);
        }
        for &(from, to, kind) in self.related_pairs {
            if gen.rng().random_ratio(3, 4) {
                let base = b.term(from);
                let variant = related_variant(gen, &base, kind);
                b.insert(to, Binding::Term(variant));
            }
        }
        b
    }
}

/// Rewrites `p` into a term related to it under `kind`, using only sound
/// rewrites: sum idempotence and units, commutativity, `| 0`, and (for the
/// weak relations) τ insertion after a prefix, plus a top-level τ for ≈.
pub fn related_variant(gen: &mut TermGenerator, p: &ProcessTerm, kind: RelationKind) -> ProcessTerm {
    let rounds = gen.rng().random_range(1..=2);
    let mut out = p.clone();
    for _ in 0..rounds {
        out = rewrite_somewhere(gen, &out, kind);
    }
    if kind == RelationKind::Weak && gen.rng().random_ratio(1, 3) {
        out = ProcessTerm::tau(out);
    }
    out
}

fn rewrite_somewhere(gen: &mut TermGenerator, p: &ProcessTerm, kind: RelationKind) -> ProcessTerm {
    let descend = gen.rng().random_ratio(1, 2);
    if descend {
        let rebuilt = match p {
            ProcessTerm::Prefix { action, body } => {
                Some(ProcessTerm::prefix(action.clone(), rewrite_somewhere(gen, body, kind)))
            }
            ProcessTerm::Sum { left, right } => Some(if gen.rng().random_bool(0.5) {
                ProcessTerm::sum(rewrite_somewhere(gen, left, kind), (**right).clone())
            } else {
                ProcessTerm::sum((**left).clone(), rewrite_somewhere(gen, right, kind))
            }),
            ProcessTerm::Par { left, right } => Some(if gen.rng().random_bool(0.5) {
                ProcessTerm::par(rewrite_somewhere(gen, left, kind), (**right).clone())
            } else {
                ProcessTerm::par((**left).clone(), rewrite_somewhere(gen, right, kind))
            }),
            ProcessTerm::Restr { hidden, body } => {
                Some(ProcessTerm::restr(hidden.iter().cloned(), rewrite_somewhere(gen, body, kind)))
            }
            ProcessTerm::Relab { body, map } => {
                Some(ProcessTerm::relab(rewrite_somewhere(gen, body, kind), map.clone()))
            }
            ProcessTerm::Nil | ProcessTerm::Const { .. } => None,
        };
        if let Some(r) = rebuilt {
            return r;
        }
    }
    let choices = if kind == RelationKind::Strong { 5 } else { 6 };
    match gen.rng().random_range(0..choices) {
        0 => ProcessTerm::sum(p.clone(), p.clone()),
        1 => ProcessTerm::sum(p.clone(), ProcessTerm::Nil),
        2 => ProcessTerm::sum(ProcessTerm::Nil, p.clone()),
        3 => ProcessTerm::par(p.clone(), ProcessTerm::Nil),
        4 => match p {
            ProcessTerm::Sum { left, right } => ProcessTerm::Sum { left: right.clone(), right: left.clone() },
            ProcessTerm::Par { left, right } => ProcessTerm::Par { left: right.clone(), right: left.clone() },
            _ => ProcessTerm::sum(p.clone(), p.clone()),
        },
        _ => match p {
            ProcessTerm::Prefix { action, body } => {
                ProcessTerm::prefix(action.clone(), ProcessTerm::tau((**body).clone()))
            }
            _ => ProcessTerm::sum(p.clone(), p.clone()),
        },
    }
}

fn tau(p: ProcessTerm) -> ProcessTerm {
    ProcessTerm::tau(p)
}

fn pre(u: Action, p: ProcessTerm) -> ProcessTerm {
    ProcessTerm::prefix(u, p)
}

fn sum(p: ProcessTerm, q: ProcessTerm) -> ProcessTerm {
    ProcessTerm::sum(p, q)
}

fn par(p: ProcessTerm, q: ProcessTerm) -> ProcessTerm {
    ProcessTerm::par(p, q)
}

use MetaKind as K;
use RelationKind::{ObsCongr, Strong, Weak};

const E: (&str, MetaKind) = ("E", K::Term);
const E1: (&str, MetaKind) = ("E'", K::Term);
const E2: (&str, MetaKind) = ("E''", K::Term);
const U: (&str, MetaKind) = ("u", K::Action);

fn none(_: &Bindings) -> Vec<Claim> {
    Vec::new()
}

fn rel(kind: RelationKind, p: ProcessTerm, q: ProcessTerm) -> Claim {
    Claim::Related(kind, p, q)
}

fn e_e1(kind: RelationKind, b: &Bindings) -> Claim {
    rel(kind, b.term("E"), b.term("E'"))
}

macro_rules! premise {
    ($kind:expr) => {
        |b: &Bindings| vec![e_e1($kind, b)]
    };
}

macro_rules! conclude {
    ($kind:expr) => {
        |b: &Bindings| e_e1($kind, b)
    };
}

/// The built-in law catalog.
pub fn catalog() -> Vec<Law> {
    vec![
        Law::new("TAU_WEAK", &[E], none, |b| rel(Weak, tau(b.term("E")), b.term("E"))),
        Law::new("TAU1", &[U, E], none, |b| {
            let (u, e) = (b.action("u"), b.term("E"));
            rel(ObsCongr, pre(u.clone(), tau(e.clone())), pre(u, e))
        }),
        Law::new("TAU2", &[E], none, |b| {
            let e = b.term("E");
            rel(ObsCongr, sum(e.clone(), tau(e.clone())), tau(e))
        }),
        Law::new("TAU3", &[U, E, E1], none, |b| {
            let (u, e, e1) = (b.action("u"), b.term("E"), b.term("E'"));
            let inner = pre(u.clone(), sum(e, tau(e1.clone())));
            rel(ObsCongr, sum(inner.clone(), pre(u, e1)), inner)
        }),
        Law::new("TAU_STRAT", &[E, E1], none, |b| {
            let (e, e1) = (b.term("E"), b.term("E'"));
            let t = tau(sum(e1, e.clone()));
            rel(ObsCongr, sum(e, t.clone()), t)
        }),
        Law::new("WEAK_EQUIV_REFL", &[E], none, |b| rel(Weak, b.term("E"), b.term("E"))),
        Law::new("OBS_CONGR_REFL", &[E], none, |b| rel(ObsCongr, b.term("E"), b.term("E"))),
        Law::new("STRONG_IMP_WEAK_EQUIV", &[E, E1], premise!(Strong), conclude!(Weak))
            .relating(&[("E", "E'", Strong)]),
        Law::new("STRONG_IMP_OBS_CONGR", &[E, E1], premise!(Strong), conclude!(ObsCongr))
            .relating(&[("E", "E'", Strong)]),
        Law::new("OBS_CONGR_IMP_WEAK_EQUIV", &[E, E1], premise!(ObsCongr), conclude!(Weak))
            .relating(&[("E", "E'", ObsCongr)]),
        Law::new(
            "WEAK_EQUIV_STABLE_IMP_CONGR",
            &[E, E1],
            |b| vec![e_e1(Weak, b), Claim::Stable(b.term("E")), Claim::Stable(b.term("E'"))],
            conclude!(ObsCongr),
        )
        .relating(&[("E", "E'", ObsCongr)]),
        Law::new("WEAK_EQUIV_SYM", &[E, E1], premise!(Weak), |b| rel(Weak, b.term("E'"), b.term("E")))
            .relating(&[("E", "E'", Weak)]),
        Law::new("OBS_CONGR_SYM", &[E, E1], premise!(ObsCongr), |b| rel(ObsCongr, b.term("E'"), b.term("E")))
            .relating(&[("E", "E'", ObsCongr)]),
        Law::new(
            "WEAK_EQUIV_TRANS",
            &[E, E1, E2],
            |b| vec![e_e1(Weak, b), rel(Weak, b.term("E'"), b.term("E''"))],
            |b| rel(Weak, b.term("E"), b.term("E''")),
        )
        .relating(&[("E", "E'", Weak), ("E'", "E''", Weak)]),
        Law::new(
            "OBS_CONGR_TRANS",
            &[E, E1, E2],
            |b| vec![e_e1(ObsCongr, b), rel(ObsCongr, b.term("E'"), b.term("E''"))],
            |b| rel(ObsCongr, b.term("E"), b.term("E''")),
        )
        .relating(&[("E", "E'", ObsCongr), ("E'", "E''", ObsCongr)]),
        Law::new("WEAK_EQUIV_SUBST_PREFIX", &[U, E, E1], premise!(Weak), |b| {
            let u = b.action("u");
            rel(Weak, pre(u.clone(), b.term("E")), pre(u, b.term("E'")))
        })
        .relating(&[("E", "E'", Weak)]),
        Law::new("OBS_CONGR_SUBST_PREFIX", &[U, E, E1], premise!(ObsCongr), |b| {
            let u = b.action("u");
            rel(ObsCongr, pre(u.clone(), b.term("E")), pre(u, b.term("E'")))
        })
        .relating(&[("E", "E'", ObsCongr)]),
        Law::new("WEAK_EQUIV_SUBST_RESTR", &[("L", K::Labels), E, E1], premise!(Weak), |b| {
            let l = b.labels("L");
            rel(Weak, ProcessTerm::restr(l.clone(), b.term("E")), ProcessTerm::restr(l, b.term("E'")))
        })
        .relating(&[("E", "E'", Weak)]),
        Law::new("OBS_CONGR_SUBST_RESTR", &[("L", K::Labels), E, E1], premise!(ObsCongr), |b| {
            let l = b.labels("L");
            rel(ObsCongr, ProcessTerm::restr(l.clone(), b.term("E")), ProcessTerm::restr(l, b.term("E'")))
        })
        .relating(&[("E", "E'", ObsCongr)]),
        Law::new("WEAK_EQUIV_SUBST_RELAB", &[("rf", K::Relabeling), E, E1], premise!(Weak), |b| {
            let rf = b.relabeling("rf");
            rel(Weak, ProcessTerm::relab(b.term("E"), rf.clone()), ProcessTerm::relab(b.term("E'"), rf))
        })
        .relating(&[("E", "E'", Weak)]),
        Law::new("OBS_CONGR_SUBST_RELAB", &[("rf", K::Relabeling), E, E1], premise!(ObsCongr), |b| {
            let rf = b.relabeling("rf");
            rel(ObsCongr, ProcessTerm::relab(b.term("E"), rf.clone()), ProcessTerm::relab(b.term("E'"), rf))
        })
        .relating(&[("E", "E'", ObsCongr)]),
        Law::new(
            "WEAK_EQUIV_PRESD_BY_PAR",
            &[("E1", K::Term), ("E1'", K::Term), ("E2", K::Term), ("E2'", K::Term)],
            |b| vec![rel(Weak, b.term("E1"), b.term("E1'")), rel(Weak, b.term("E2"), b.term("E2'"))],
            |b| rel(Weak, par(b.term("E1"), b.term("E2")), par(b.term("E1'"), b.term("E2'"))),
        )
        .relating(&[("E1", "E1'", Weak), ("E2", "E2'", Weak)]),
        Law::new(
            "OBS_CONGR_PRESD_BY_PAR",
            &[("E1", K::Term), ("E1'", K::Term), ("E2", K::Term), ("E2'", K::Term)],
            |b| vec![rel(ObsCongr, b.term("E1"), b.term("E1'")), rel(ObsCongr, b.term("E2"), b.term("E2'"))],
            |b| rel(ObsCongr, par(b.term("E1"), b.term("E2")), par(b.term("E1'"), b.term("E2'"))),
        )
        .relating(&[("E1", "E1'", ObsCongr), ("E2", "E2'", ObsCongr)]),
        Law::new(
            "WEAK_EQUIV_PRESD_BY_SUM",
            &[("E1", K::Term), ("E1'", K::Term), ("E2", K::Term), ("E2'", K::Term)],
            |b| {
                vec![
                    rel(Weak, b.term("E1"), b.term("E1'")),
                    Claim::Stable(b.term("E1")),
                    Claim::Stable(b.term("E1'")),
                    rel(Weak, b.term("E2"), b.term("E2'")),
                    Claim::Stable(b.term("E2")),
                    Claim::Stable(b.term("E2'")),
                ]
            },
            |b| rel(Weak, sum(b.term("E1"), b.term("E2")), sum(b.term("E1'"), b.term("E2'"))),
        )
        .relating(&[("E1", "E1'", ObsCongr), ("E2", "E2'", ObsCongr)]),
        Law::new(
            "OBS_CONGR_PRESD_BY_SUM",
            &[("p", K::Term), ("q", K::Term), ("r", K::Term), ("s", K::Term)],
            |b| vec![rel(ObsCongr, b.term("p"), b.term("q")), rel(ObsCongr, b.term("r"), b.term("s"))],
            |b| rel(ObsCongr, sum(b.term("p"), b.term("r")), sum(b.term("q"), b.term("s"))),
        )
        .relating(&[("p", "q", ObsCongr), ("r", "s", ObsCongr)]),
    ]
}

pub fn law(id: &str) -> Result<Law> {
    catalog().into_iter().find(|l| l.id == id).ok_or_else(|| Error::UnknownLaw(id.to_owned()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawInstance {
    pub law_id: String,
    pub bindings: Bindings,
    pub expected: Expectation,
}

#[derive(Clone, Debug)]
pub struct ClaimOutcome {
    pub claim: Claim,
    pub holds: bool,
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub law_id: String,
    pub bindings: Bindings,
    pub expected: Expectation,
    pub premises: Vec<ClaimOutcome>,
    /// `None` when a premise failed and the conclusion was not evaluated.
    pub conclusion: Option<ClaimOutcome>,
    pub passed: bool,
}

impl LawReport {
    pub fn premises_hold(&self) -> bool {
        self.premises.iter().all(|c| c.holds)
    }

    pub fn vacuous(&self) -> bool {
        !self.premises_hold()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let claim_json = |c: &ClaimOutcome| match &c.claim {
            Claim::Related(kind, p, q) => json!({
                "relation": kind.as_str(),
                "lhs": print_term(p),
                "rhs": print_term(q),
                "holds": c.holds,
                "verdict": c.verdict.as_ref().map(Verdict::to_json),
            }),
            Claim::Stable(p) => json!({ "stable": print_term(p), "holds": c.holds }),
        };
        let bindings: serde_json::Map<String, serde_json::Value> =
            self.bindings.iter().map(|(k, v)| (k.to_owned(), json!(v.to_string()))).collect();
        json!({
            "law": self.law_id,
            "bindings": bindings,
            "expected": self.expected.as_str(),
            "premises": self.premises.iter().map(claim_json).collect::<Vec<_>>(),
            "conclusion": self.conclusion.as_ref().map(claim_json),
            "vacuous": self.vacuous(),
            "passed": self.passed,
        })
    }
}

fn evaluate(env: &Environment, claim: Claim, limits: Limits) -> Result<ClaimOutcome> {
    match &claim {
        Claim::Related(kind, p, q) => {
            let v = check(env, *kind, p, q, limits)?;
            Ok(ClaimOutcome { holds: v.related, verdict: Some(v), claim })
        }
        Claim::Stable(p) => Ok(ClaimOutcome { holds: stable(env, p)?, verdict: None, claim }),
    }
}

/// Checks one instance of `law`. The environment's alphabet is widened to
/// cover the instantiated terms.
pub fn check_law_with(env: &Environment, law: &Law, bindings: &Bindings, limits: Limits) -> Result<LawReport> {
    law.validate(bindings)?;
    let premises_claims = (law.premises)(bindings);
    let conclusion_claim = (law.conclusion)(bindings);
    let mut terms: Vec<&ProcessTerm> = Vec::new();
    for c in premises_claims.iter().chain(std::iter::once(&conclusion_claim)) {
        match c {
            Claim::Related(_, p, q) => terms.extend([p, q]),
            Claim::Stable(p) => terms.push(p),
        }
    }
    let env = env.extended_for(terms);

    let mut premises = Vec::with_capacity(premises_claims.len());
    let mut all_hold = true;
    for c in premises_claims {
        let out = evaluate(&env, c, limits)?;
        all_hold &= out.holds;
        premises.push(out);
        if !all_hold {
            break;
        }
    }
    let conclusion = if all_hold { Some(evaluate(&env, conclusion_claim, limits)?) } else { None };
    let passed = conclusion.as_ref().is_none_or(|c| c.holds);
    let expected = if premises.is_empty() && all_hold { Expectation::Holds } else { law.expectation() };
    Ok(LawReport { law_id: law.id.to_owned(), bindings: bindings.clone(), expected, premises, conclusion, passed })
}

pub fn check_law(env: &Environment, inst: &LawInstance, limits: Limits) -> Result<LawReport> {
    let law = law(&inst.law_id)?;
    check_law_with(env, &law, &inst.bindings, limits)
}

/// Runs `instances` random instantiations of every law in the catalog.
pub fn run_corpus(
    env: &Environment,
    alphabet: &[LabelId],
    max_depth: usize,
    instances: usize,
    seed: u64,
    limits: Limits,
) -> Result<Vec<LawReport>> {
    let mut reports = Vec::new();
    for (i, law) in catalog().iter().enumerate() {
        let mut gen = TermGenerator::new(alphabet, max_depth, seed.wrapping_add(i as u64));
        for _ in 0..instances {
            let b = law.random_bindings(&mut gen);
            reports.push(check_law_with(env, law, &b, limits)?);
        }
    }
    Ok(reports)
}

/// Which disjuncts of the Deng lemma hold for a weakly bisimilar pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DengOutcome {
    /// Some `p'` with `p --τ-> p'` and `p' ≈ q`.
    pub case1_witness: Option<ProcessTerm>,
    /// Some `q'` with `q --τ-> q'` and `p ≈ q'`.
    pub case2_witness: Option<ProcessTerm>,
    /// `p ≈c q`.
    pub case3: bool,
}

impl DengOutcome {
    pub fn any(&self) -> bool {
        self.case1_witness.is_some() || self.case2_witness.is_some() || self.case3
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "case1": self.case1_witness.as_ref().map(print_term),
            "case2": self.case2_witness.as_ref().map(print_term),
            "case3": self.case3,
            "any": self.any(),
        })
    }
}

/// Classifies a pair `p ≈ q` into every Deng case that holds. Fails with
/// `NotWeaklyEquivalent` when the hypothesis is false.
pub fn deng_classify(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<DengOutcome> {
    let a = WeakAnalysis::new(env, &[p.clone(), q.clone()], limits)?;
    let (sp, sq) = (a.root(0), a.root(1));
    if !a.weakly_equivalent(sp, sq) {
        return Err(Error::NotWeaklyEquivalent);
    }
    let tau_match = |from: usize, other: usize| {
        a.lts()
            .out_edges(from)
            .find(|e| e.action.is_tau() && a.weakly_equivalent(e.target, other))
            .map(|e| a.lts().state(e.target).clone())
    };
    Ok(DengOutcome {
        case1_witness: tau_match(sp, sq),
        case2_witness: tau_match(sq, sp),
        case3: a.obs_congruent(sp, sq),
    })
}

/// The three observation-congruence tests of the Hennessy lemma together
/// with the weak bisimilarity they characterize.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HennessyOutcome {
    /// `p ≈c q`
    pub congr: bool,
    /// `p ≈c τ.q`
    pub congr_tau_right: bool,
    /// `τ.p ≈c q`
    pub congr_tau_left: bool,
    pub weak_equiv: bool,
}

impl HennessyOutcome {
    pub fn disjunction(&self) -> bool {
        self.congr || self.congr_tau_right || self.congr_tau_left
    }

    /// The lemma: the disjunction holds exactly when `p ≈ q`.
    pub fn consistent(&self) -> bool {
        self.disjunction() == self.weak_equiv
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p ~c q": self.congr,
            "p ~c tau.q": self.congr_tau_right,
            "tau.p ~c q": self.congr_tau_left,
            "weak_equiv": self.weak_equiv,
            "consistent": self.consistent(),
        })
    }
}

pub fn hennessy_classify(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<HennessyOutcome> {
    let (tp, tq) = (tau(p.clone()), tau(q.clone()));
    let a = WeakAnalysis::new(env, &[p.clone(), q.clone(), tq, tp], limits)?;
    let (sp, sq, stq, stp) = (a.root(0), a.root(1), a.root(2), a.root(3));
    Ok(HennessyOutcome {
        congr: a.obs_congruent(sp, sq),
        congr_tau_right: a.obs_congruent(sp, stq),
        congr_tau_left: a.obs_congruent(stp, sq),
        weak_equiv: a.weakly_equivalent(sp, sq),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> ProcessTerm {
        parse_term(s).unwrap()
    }

    fn env() -> Environment {
        crate::parser::parse_workspace("alphabet a, b;").unwrap()
    }

    #[test]
    fn tau_weak_instance() {
        let b = Bindings::new().with("E", Binding::Term(t("b.0")));
        let inst = LawInstance { law_id: "TAU_WEAK".into(), bindings: b, expected: Expectation::Holds };
        let r = check_law(&env(), &inst, Limits::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.expected, Expectation::Holds);
    }

    #[test]
    fn tau2_instance() {
        let b = Bindings::new().with("E", Binding::Term(t("a.0")));
        let r = check_law_with(&env(), &law("TAU2").unwrap(), &b, Limits::default()).unwrap();
        assert!(r.passed);
        let c = r.conclusion.unwrap();
        assert_eq!(c.claim, Claim::Related(ObsCongr, t("a.0 + tau.a.0"), t("tau.a.0")));
    }

    #[test]
    fn fabricated_non_law_fails() {
        let bogus = Law::new("TAU_CONGR_BOGUS", &[E], none, |b| rel(ObsCongr, tau(b.term("E")), b.term("E")));
        let b = Bindings::new().with("E", Binding::Term(t("a.0")));
        let r = check_law_with(&env(), &bogus, &b, Limits::default()).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn unknown_law_and_bad_bindings() {
        let inst = LawInstance { law_id: "NOPE".into(), bindings: Bindings::new(), expected: Expectation::Holds };
        assert!(matches!(check_law(&env(), &inst, Limits::default()), Err(Error::UnknownLaw(_))));
        let tau1 = law("TAU1").unwrap();
        let missing = Bindings::new().with("E", Binding::Term(t("0")));
        assert!(matches!(check_law_with(&env(), &tau1, &missing, Limits::default()), Err(Error::Binding { .. })));
        let wrong = missing.clone().with("u", Binding::Term(t("0")));
        assert!(matches!(check_law_with(&env(), &tau1, &wrong, Limits::default()), Err(Error::Binding { .. })));
        let extra = missing.with("u", Binding::Action(Action::Tau)).with("Z", Binding::Term(t("0")));
        assert!(matches!(check_law_with(&env(), &tau1, &extra, Limits::default()), Err(Error::Binding { .. })));
    }

    #[test]
    fn implication_is_vacuous_when_premise_fails() {
        let b = Bindings::new()
            .with("u", Binding::Action(Action::Tau))
            .with("E", Binding::Term(t("a.0")))
            .with("E'", Binding::Term(t("b.0")));
        let r = check_law_with(&env(), &law("WEAK_EQUIV_SUBST_PREFIX").unwrap(), &b, Limits::default()).unwrap();
        assert!(r.passed && r.vacuous());
        assert_eq!(r.expected, Expectation::ImplicationHolds);
        assert!(r.conclusion.is_none());
    }

    #[test]
    fn binding_parse_by_kind() {
        assert_eq!(Binding::parse(K::Action, "'a").unwrap(), Binding::Action(Action::coname(LabelId::new("a").unwrap())));
        assert_eq!(Binding::parse(K::Labels, "{a,b}").unwrap().to_string(), "{a, b}");
        assert_eq!(Binding::parse(K::Relabeling, "a->b").unwrap().to_string(), "[a->b]");
    }

    #[test]
    fn catalog_ids_are_unique() {
        let ids: std::collections::BTreeSet<_> = catalog().iter().map(|l| l.id).collect();
        assert_eq!(ids.len(), catalog().len());
    }

    #[test]
    fn deng_examples() {
        let e = env();
        let o = deng_classify(&e, &t("tau.a.0"), &t("a.0"), Limits::default()).unwrap();
        assert_eq!(o.case1_witness, Some(t("a.0")));
        let o = deng_classify(&e, &t("a.0"), &t("a.0"), Limits::default()).unwrap();
        assert!(o.case3);
        let o = deng_classify(&e, &t("a.0"), &t("a.0 + tau.a.0"), Limits::default()).unwrap();
        assert_eq!(o.case2_witness, Some(t("a.0")));
        assert!(matches!(
            deng_classify(&e, &t("a.0"), &t("b.0"), Limits::default()),
            Err(Error::NotWeaklyEquivalent)
        ));
    }

    #[test]
    fn hennessy_examples() {
        let e = env();
        let o = hennessy_classify(&e, &t("tau.a.0"), &t("a.0"), Limits::default()).unwrap();
        assert_eq!((o.congr, o.congr_tau_right, o.congr_tau_left), (false, true, false));
        assert!(o.consistent());
        let o = hennessy_classify(&e, &t("0"), &t("0"), Limits::default()).unwrap();
        assert!(o.congr && o.consistent());
        let o = hennessy_classify(&e, &t("a.0"), &t("b.0"), Limits::default()).unwrap();
        assert!(!o.disjunction() && !o.weak_equiv);
    }

    #[test]
    fn related_variants_are_related() {
        let ab = [LabelId::new("a").unwrap(), LabelId::new("b").unwrap()];
        let mut gen = TermGenerator::new(&ab, 3, 11);
        let e = env();
        for kind in [Strong, Weak, ObsCongr] {
            for _ in 0..40 {
                let p = gen.term();
                let q = related_variant(&mut gen, &p, kind);
                assert!(check(&e, kind, &p, &q, Limits::default()).unwrap().related, "{kind}: {p} vs {q}");
            }
        }
    }
}

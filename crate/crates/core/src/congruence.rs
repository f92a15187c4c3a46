//! One-hole contexts and bounded-depth congruence checking.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexSet;
use serde_json::json;

use crate::equivalence::{check, RelationKind, Verdict};
use crate::error::Result;
use crate::generate::TermGenerator;
use crate::parser::print_term;
use crate::semantics::Limits;
use crate::syntax::{Action, Environment, LabelId, ProcessTerm, Relabeling};

/// A term with exactly one hole.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Context {
    Hole,
    PrefixC(Action, Box<Context>),
    SumL(Box<Context>, ProcessTerm),
    SumR(ProcessTerm, Box<Context>),
    ParL(Box<Context>, ProcessTerm),
    ParR(ProcessTerm, Box<Context>),
    RestrC(BTreeSet<LabelId>, Box<Context>),
    RelabC(Box<Context>, Relabeling),
}

impl Context {
    /// Number of constructors between the root and the hole.
    pub fn depth(&self) -> usize {
        match self.inner() {
            None => 0,
            Some(c) => 1 + c.depth(),
        }
    }

    fn inner(&self) -> Option<&Context> {
        match self {
            Context::Hole => None,
            Context::PrefixC(_, c)
            | Context::SumL(c, _)
            | Context::SumR(_, c)
            | Context::ParL(c, _)
            | Context::ParR(_, c)
            | Context::RestrC(_, c)
            | Context::RelabC(c, _) => Some(c),
        }
    }

    pub fn apply(&self, p: &ProcessTerm) -> ProcessTerm {
        apply_context(self, p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self.to_string())
    }
}

fn slot(p: &ProcessTerm) -> String {
    match p {
        ProcessTerm::Sum { .. } | ProcessTerm::Par { .. } | ProcessTerm::Restr { .. } => {
            format!("({})", print_term(p))
        }
        _ => print_term(p),
    }
}

struct Nested<'a>(&'a Context);

impl fmt::Display for Nested<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Context::Hole | Context::PrefixC(..) | Context::RelabC(..) => self.0.fmt(f),
            c => write!(f, "({c})"),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Context::Hole => f.write_str("[]"),
            Context::PrefixC(u, c) => write!(f, "{u}.{}", Nested(c)),
            Context::SumL(c, p) => write!(f, "{} + {}", Nested(c), slot(p)),
            Context::SumR(p, c) => write!(f, "{} + {}", slot(p), Nested(c)),
            Context::ParL(c, p) => write!(f, "{} | {}", Nested(c), slot(p)),
            Context::ParR(p, c) => write!(f, "{} | {}", slot(p), Nested(c)),
            Context::RestrC(ls, c) => {
                let names: Vec<_> = ls.iter().map(LabelId::as_str).collect();
                write!(f, "new {{{}}} {}", names.join(", "), Nested(c))
            }
            Context::RelabC(c, rf) => {
                let pairs: Vec<_> = rf.map().iter().map(|(a, b)| format!("{a}->{b}")).collect();
                write!(f, "{}[{}]", Nested(c), pairs.join(", "))
            }
        }
    }
}

pub fn apply_context(c: &Context, p: &ProcessTerm) -> ProcessTerm {
    match c {
        Context::Hole => p.clone(),
        Context::PrefixC(u, c) => ProcessTerm::prefix(u.clone(), apply_context(c, p)),
        Context::SumL(c, r) => ProcessTerm::sum(apply_context(c, p), r.clone()),
        Context::SumR(r, c) => ProcessTerm::sum(r.clone(), apply_context(c, p)),
        Context::ParL(c, r) => ProcessTerm::par(apply_context(c, p), r.clone()),
        Context::ParR(r, c) => ProcessTerm::par(r.clone(), apply_context(c, p)),
        Context::RestrC(ls, c) => ProcessTerm::restr(ls.iter().cloned(), apply_context(c, p)),
        Context::RelabC(c, rf) => ProcessTerm::relab(apply_context(c, p), rf.clone()),
    }
}

/// Grafts `c2` into the hole of `c1`.
pub fn compose_contexts(c1: &Context, c2: &Context) -> Context {
    let graft = |c: &Context| Box::new(compose_contexts(c, c2));
    match c1 {
        Context::Hole => c2.clone(),
        Context::PrefixC(u, c) => Context::PrefixC(u.clone(), graft(c)),
        Context::SumL(c, r) => Context::SumL(graft(c), r.clone()),
        Context::SumR(r, c) => Context::SumR(r.clone(), graft(c)),
        Context::ParL(c, r) => Context::ParL(graft(c), r.clone()),
        Context::ParR(r, c) => Context::ParR(r.clone(), graft(c)),
        Context::RestrC(ls, c) => Context::RestrC(ls.clone(), graft(c)),
        Context::RelabC(c, rf) => Context::RelabC(graft(c), rf.clone()),
    }
}

/// The single-constructor contexts over `alphabet` and `fill_terms`, in
/// enumeration order.
pub fn unit_contexts(alphabet: &[LabelId], fill_terms: &[ProcessTerm]) -> Vec<Context> {
    let hole = || Box::new(Context::Hole);
    let mut out = vec![Context::PrefixC(Action::Tau, hole())];
    for a in alphabet {
        out.push(Context::PrefixC(Action::name(a.clone()), hole()));
        out.push(Context::PrefixC(Action::coname(a.clone()), hole()));
    }
    for r in fill_terms {
        out.push(Context::SumL(hole(), r.clone()));
        out.push(Context::SumR(r.clone(), hole()));
        out.push(Context::ParL(hole(), r.clone()));
        out.push(Context::ParR(r.clone(), hole()));
    }
    for a in alphabet {
        out.push(Context::RestrC(BTreeSet::from([a.clone()]), hole()));
    }
    for x in alphabet {
        for y in alphabet {
            out.push(Context::RelabC(hole(), Relabeling::single(x.clone(), y.clone())));
        }
    }
    out
}

/// All contexts of depth at most `max_depth`, shallowest first, built by
/// wrapping shallower contexts in one more constructor.
pub fn enumerate_contexts(alphabet: &[LabelId], max_depth: usize, fill_terms: &[ProcessTerm]) -> Vec<Context> {
    let units = unit_contexts(alphabet, fill_terms);
    let mut all: IndexSet<Context> = IndexSet::new();
    all.insert(Context::Hole);
    let mut frontier = vec![Context::Hole];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for c in &frontier {
            for u in &units {
                let wrapped = compose_contexts(u, c);
                if all.insert(wrapped.clone()) {
                    next.push(wrapped);
                }
            }
        }
        frontier = next;
    }
    all.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct CongruenceReport {
    pub kind: RelationKind,
    pub depth: usize,
    pub pairs_checked: usize,
    pub contexts: usize,
    pub all_contexts_pass: bool,
    pub counterexample: Option<(Context, Verdict)>,
}

impl CongruenceReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind.as_str(),
            "depth": self.depth,
            "contexts": self.contexts,
            "pairs_checked": self.pairs_checked,
            "all_contexts_pass": self.all_contexts_pass,
            "counterexample": self.counterexample.as_ref().map(|(c, v)| json!({
                "context": c.to_string(),
                "verdict": v.to_json(),
            })),
        })
    }
}

/// Checks `R(c[x], c[y])` for every pair and every context up to
/// `max_depth`, stopping at the first failure. Pairs are used as given;
/// callers pick pairs they believe related.
pub fn congruence_check(
    env: &Environment,
    kind: RelationKind,
    pairs: &[(ProcessTerm, ProcessTerm)],
    max_depth: usize,
    fill_terms: &[ProcessTerm],
    limits: Limits,
) -> Result<CongruenceReport> {
    let alphabet: Vec<LabelId> = env.alphabet().cloned().collect();
    let contexts = enumerate_contexts(&alphabet, max_depth, fill_terms);
    let env = env.extended_for(pairs.iter().flat_map(|(x, y)| [x, y]).chain(fill_terms));
    let mut report = CongruenceReport {
        kind,
        depth: max_depth,
        pairs_checked: 0,
        contexts: contexts.len(),
        all_contexts_pass: true,
        counterexample: None,
    };
    for (x, y) in pairs {
        for c in &contexts {
            report.pairs_checked += 1;
            let v = check(&env, kind, &c.apply(x), &c.apply(y), limits)?;
            if !v.related {
                report.all_contexts_pass = false;
                report.counterexample = Some((c.clone(), v));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Samples `samples` random summands `r` and returns the first one with
/// `p + r ≉ q + r`, if any.
pub fn sum_equiv_counterexample(
    env: &Environment,
    p: &ProcessTerm,
    q: &ProcessTerm,
    gen: &mut TermGenerator,
    samples: usize,
    limits: Limits,
) -> Result<Option<ProcessTerm>> {
    for _ in 0..samples {
        let r = gen.term();
        let lhs = ProcessTerm::sum(p.clone(), r.clone());
        let rhs = ProcessTerm::sum(q.clone(), r.clone());
        let env = env.extended_for([&lhs, &rhs]);
        if !check(&env, RelationKind::Weak, &lhs, &rhs, limits)?.related {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

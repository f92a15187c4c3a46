//! Strong bisimilarity, weak bisimilarity and observation congruence.
//!
//! Both bisimilarities are computed by signature refinement: starting from
//! a single block, states are repeatedly split by the set of
//! `(action, block)` pairs they can reach until nothing changes. For weak
//! bisimilarity a τ signature entry is reached through ε (zero or more τ
//! steps) and a visible one through a weak transition.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde_json::json;

use crate::error::Result;
use crate::parser::print_term;
use crate::semantics::{explore_complete, Limits, Lts};
use crate::syntax::{Action, Environment, ProcessTerm};
use crate::weak::{saturate, SaturatedLts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    Strong,
    Weak,
    ObsCongr,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Strong => "strong",
            RelationKind::Weak => "weak",
            RelationKind::ObsCongr => "obscongr",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strong" => Ok(RelationKind::Strong),
            "weak" => Ok(RelationKind::Weak),
            "obscongr" => Ok(RelationKind::ObsCongr),
            other => Err(format!("unknown relation kind `{other}` (expected strong, weak or obscongr)")),
        }
    }
}

/// An assignment of LTS states to equivalence classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Partition {
    fn from_assignment(class_of: Vec<usize>) -> Self {
        let n = class_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); n];
        for (s, &c) in class_of.iter().enumerate() {
            classes[c].push(s);
        }
        Partition { class_of, classes }
    }

    pub fn class_of(&self, s: usize) -> usize {
        self.class_of[s]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn same_class(&self, s: usize, t: usize) -> bool {
        self.class_of[s] == self.class_of[t]
    }
}

/// Splits blocks by signature until stable. New block ids are handed out
/// in order of the lowest state that carries them, so the result does not
/// depend on hashing.
fn refine<F>(n: usize, mut signature: F) -> Partition
where
    F: FnMut(usize, &[usize]) -> Vec<(Action, usize)>,
{
    let mut class_of = vec![0usize; n];
    let mut count = usize::from(n > 0);
    loop {
        let mut ids: HashMap<(usize, Vec<(Action, usize)>), usize> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for s in 0..n {
            let mut sig = signature(s, &class_of);
            sig.sort_unstable();
            sig.dedup();
            let fresh = ids.len();
            next.push(*ids.entry((class_of[s], sig)).or_insert(fresh));
        }
        let new_count = ids.len();
        class_of = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    Partition::from_assignment(class_of)
}

/// The strong bisimilarity quotient of a complete LTS.
pub fn strong_bisim_partition(lts: &Lts) -> Result<Partition> {
    lts.require_complete()?;
    Ok(refine(lts.len(), |s, class_of| {
        lts.out_edges(s).map(|e| (e.action.clone(), class_of[e.target])).collect()
    }))
}

/// The weak bisimilarity quotient of a saturated LTS.
pub fn weak_bisim_partition(sat: &SaturatedLts) -> Partition {
    refine(sat.len(), |s, class_of| {
        let mut sig: Vec<(Action, usize)> = sat.eps(s).iter().map(|&t| (Action::Tau, class_of[t])).collect();
        for (u, targets) in sat.weak_moves(s).filter(|(u, _)| !u.is_tau()) {
            sig.extend(targets.iter().map(|&t| (u.clone(), class_of[t])));
        }
        sig
    })
}

/// Checks the four clauses of the weak bisimulation definition literally:
/// visible strong challenges are answered by weak transitions, τ
/// challenges by ε moves, in both directions.
pub fn is_weak_bisimulation(sat: &SaturatedLts, rel: &BTreeSet<(usize, usize)>) -> bool {
    let lts = sat.base();
    let answered = |challenger: usize, responder: usize, flip: bool| {
        lts.out_edges(challenger).all(|e| {
            sat.response(responder, &e.action).iter().any(|&r| {
                let pair = if flip { (r, e.target) } else { (e.target, r) };
                rel.contains(&pair)
            })
        })
    };
    rel.iter().all(|&(p, q)| answered(p, q, false) && answered(q, p, true))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
        }
    }
}

/// A first move that the other side cannot answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub side: Side,
    pub state: ProcessTerm,
    pub action: Action,
    pub target: ProcessTerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub related: bool,
    pub kind: RelationKind,
    pub witness: Option<Witness>,
    pub states: usize,
    pub classes: usize,
}

impl Verdict {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "related": self.related,
            "kind": self.kind.as_str(),
            "witness": self.witness.as_ref().map(|w| json!({
                "side": w.side.as_str(),
                "state": print_term(&w.state),
                "action": w.action.to_string(),
                "target": print_term(&w.target),
            })),
            "states": self.states,
            "classes": self.classes,
        })
    }
}

/// Weak bisimilarity over a jointly explored, saturated LTS. Handy when
/// several checks need the same state space.
#[derive(Clone, Debug)]
pub struct WeakAnalysis {
    sat: SaturatedLts,
    partition: Partition,
}

impl WeakAnalysis {
    pub fn new(env: &Environment, roots: &[ProcessTerm], limits: Limits) -> Result<Self> {
        Self::from_lts(explore_complete(env, roots, limits)?)
    }

    pub fn from_lts(lts: Lts) -> Result<Self> {
        let sat = saturate(lts)?;
        let partition = weak_bisim_partition(&sat);
        Ok(WeakAnalysis { sat, partition })
    }

    pub fn lts(&self) -> &Lts {
        self.sat.base()
    }

    pub fn saturated(&self) -> &SaturatedLts {
        &self.sat
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn root(&self, i: usize) -> usize {
        self.lts().roots()[i]
    }

    pub fn index_of(&self, p: &ProcessTerm) -> Option<usize> {
        self.lts().index_of(p)
    }

    pub fn weakly_equivalent(&self, s: usize, t: usize) -> bool {
        self.partition.same_class(s, t)
    }

    /// First strong move of `challenger` with no weak answer from
    /// `responder` into the same ≈ class. τ answers need at least one τ.
    fn rooted_failure(&self, challenger: usize, responder: usize) -> Option<(Action, usize)> {
        self.lts()
            .out_edges(challenger)
            .find(|e| {
                !self
                    .sat
                    .weak_successors(responder, &e.action)
                    .iter()
                    .any(|&r| self.partition.same_class(e.target, r))
            })
            .map(|e| (e.action.clone(), e.target))
    }

    /// Observation congruence between two states of the analysed LTS.
    pub fn obs_congruent(&self, s: usize, t: usize) -> bool {
        self.rooted_failure(s, t).is_none() && self.rooted_failure(t, s).is_none()
    }

    fn weak_failure(&self, challenger: usize, responder: usize) -> Option<(Action, usize)> {
        self.lts()
            .out_edges(challenger)
            .find(|e| {
                !self
                    .sat
                    .response(responder, &e.action)
                    .iter()
                    .any(|&r| self.partition.same_class(e.target, r))
            })
            .map(|e| (e.action.clone(), e.target))
    }

    fn witness(&self, s: usize, t: usize, rooted: bool) -> Option<Witness> {
        let find = |a, b| if rooted { self.rooted_failure(a, b) } else { self.weak_failure(a, b) };
        let (side, from, (action, target)) = find(s, t)
            .map(|f| (Side::Lhs, s, f))
            .or_else(|| find(t, s).map(|f| (Side::Rhs, t, f)))?;
        Some(Witness {
            side,
            state: self.lts().state(from).clone(),
            action,
            target: self.lts().state(target).clone(),
        })
    }

    pub fn weak_verdict(&self, s: usize, t: usize) -> Verdict {
        let related = self.weakly_equivalent(s, t);
        Verdict {
            related,
            kind: RelationKind::Weak,
            witness: if related { None } else { self.witness(s, t, false) },
            states: self.lts().len(),
            classes: self.partition.len(),
        }
    }

    pub fn obs_congr_verdict(&self, s: usize, t: usize) -> Verdict {
        let related = self.obs_congruent(s, t);
        Verdict {
            related,
            kind: RelationKind::ObsCongr,
            witness: if related { None } else { self.witness(s, t, true) },
            states: self.lts().len(),
            classes: self.partition.len(),
        }
    }
}

fn two_roots(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<Lts> {
    explore_complete(env, &[p.clone(), q.clone()], limits)
}

pub fn strong_equiv(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<Verdict> {
    let lts = two_roots(env, p, q, limits)?;
    let partition = strong_bisim_partition(&lts)?;
    let (s, t) = (lts.roots()[0], lts.roots()[1]);
    let related = partition.same_class(s, t);
    let failure = |a: usize, b: usize| {
        lts.out_edges(a)
            .find(|e| !lts.out_edges(b).any(|f| f.action == e.action && partition.same_class(e.target, f.target)))
            .map(|e| (e.action.clone(), e.target))
    };
    let witness = if related {
        None
    } else {
        failure(s, t)
            .map(|f| (Side::Lhs, s, f))
            .or_else(|| failure(t, s).map(|f| (Side::Rhs, t, f)))
            .map(|(side, from, (action, target))| Witness {
                side,
                state: lts.state(from).clone(),
                action,
                target: lts.state(target).clone(),
            })
    };
    Ok(Verdict { related, kind: RelationKind::Strong, witness, states: lts.len(), classes: partition.len() })
}

pub fn weak_equiv(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<Verdict> {
    let a = WeakAnalysis::from_lts(two_roots(env, p, q, limits)?)?;
    Ok(a.weak_verdict(a.root(0), a.root(1)))
}

pub fn obs_congr(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<Verdict> {
    let a = WeakAnalysis::from_lts(two_roots(env, p, q, limits)?)?;
    Ok(a.obs_congr_verdict(a.root(0), a.root(1)))
}

pub fn check(
    env: &Environment,
    kind: RelationKind,
    p: &ProcessTerm,
    q: &ProcessTerm,
    limits: Limits,
) -> Result<Verdict> {
    match kind {
        RelationKind::Strong => strong_equiv(env, p, q, limits),
        RelationKind::Weak => weak_equiv(env, p, q, limits),
        RelationKind::ObsCongr => obs_congr(env, p, q, limits),
    }
}

/// Convenience for callers that only need the boolean answer.
pub fn related(env: &Environment, kind: RelationKind, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<bool> {
    check(env, kind, p, q, limits).map(|v| v.related)
}

//! Klop processes, free actions, and the finite-state coarsest congruence
//! decision `p ≈c q ⇔ p + a.k ≈ q + a.k`.

use serde_json::json;

use crate::congruence::sum_equiv_counterexample;
use crate::equivalence::{obs_congr, weak_equiv, Verdict, WeakAnalysis};
use crate::error::{Error, Result};
use crate::generate::TermGenerator;
use crate::parser::print_term;
use crate::semantics::{explore_complete, Limits};
use crate::syntax::{Action, Environment, LabelId, ProcessTerm};
use crate::weak::saturate;

pub const MAX_KLOP_INDEX: usize = 12;

/// `KLOP(a, 0) = 0`, `KLOP(a, n+1) = KLOP(a, n) + a.KLOP(a, n)`.
pub fn klop(a: &LabelId, n: usize) -> Result<ProcessTerm> {
    if n > MAX_KLOP_INDEX {
        return Err(Error::KlopIndexTooLarge(n));
    }
    let mut k = ProcessTerm::Nil;
    for _ in 0..n {
        k = ProcessTerm::sum(k.clone(), ProcessTerm::prefix(Action::name(a.clone()), k));
    }
    Ok(k)
}

/// First alphabet label `a` such that `p` has no weak `a` transition.
pub fn free_action(env: &Environment, p: &ProcessTerm, limits: Limits) -> Result<Option<LabelId>> {
    let sat = saturate(explore_complete(env, std::slice::from_ref(p), limits)?)?;
    let root = sat.base().roots()[0];
    Ok(env
        .alphabet()
        .find(|a| sat.weak_successors(root, &Action::name((*a).clone())).is_empty())
        .cloned())
}

/// First alphabet label free for both `p` and `q`.
pub fn common_free_action(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<Option<LabelId>> {
    let sp = saturate(explore_complete(env, std::slice::from_ref(p), limits)?)?;
    let sq = saturate(explore_complete(env, std::slice::from_ref(q), limits)?)?;
    let free = |a: &LabelId| {
        let u = Action::name(a.clone());
        sp.weak_successors(sp.base().roots()[0], &u).is_empty() && sq.weak_successors(sq.base().roots()[0], &u).is_empty()
    };
    Ok(env.alphabet().find(|a| free(a)).cloned())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlopWitness {
    pub action: LabelId,
    pub index: usize,
    pub term: ProcessTerm,
    pub excluded_nodes: usize,
}

impl KlopWitness {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "action": self.action.as_str(),
            "index": self.index,
            "term": print_term(&self.term),
            "excluded_nodes": self.excluded_nodes,
        })
    }
}

/// Smallest `n` such that `KLOP(a, n)` is weakly bisimilar to no state
/// reachable from `p` or `q`.
pub fn klop_witness(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, a: &LabelId, limits: Limits) -> Result<KlopWitness> {
    let base = explore_complete(env, &[p.clone(), q.clone()], limits)?;
    let nodes = base.len();
    for n in 0..=nodes {
        let k = klop(a, n)?;
        let env = env.extended_for([&k]);
        let analysis = WeakAnalysis::new(&env, &[p.clone(), q.clone(), k.clone()], limits)?;
        let lts = analysis.lts();
        let (sp, sq, sk) = (analysis.root(0), analysis.root(1), analysis.root(2));
        let mut reach = lts.reachable_from(sp);
        reach.extend(lts.reachable_from(sq));
        if !reach.iter().any(|&s| analysis.weakly_equivalent(s, sk)) {
            return Ok(KlopWitness { action: a.clone(), index: n, term: k, excluded_nodes: nodes });
        }
    }
    unreachable!("Klop processes up to the node count are pairwise non-bisimilar")
}

/// The label used to build the distinguishing summand: the first declared
/// label, or `a` when the alphabet is empty.
pub fn distinguishing_label(env: &Environment) -> LabelId {
    env.alphabet().next().cloned().unwrap_or_else(|| LabelId::new("a").expect("valid label"))
}

/// The summand `a.k` with `k` a Klop witness for `p` and `q`.
pub fn klop_summand(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<(KlopWitness, ProcessTerm)> {
    let a = distinguishing_label(env);
    let w = klop_witness(env, p, q, &a, limits)?;
    let r = ProcessTerm::prefix(Action::name(a), w.term.clone());
    Ok((w, r))
}

/// Decides `p ≈c q` as `p + a.k ≈ q + a.k`. The returned verdict is the
/// weak bisimilarity check on the two sums.
pub fn coarsest_congr_decide(env: &Environment, p: &ProcessTerm, q: &ProcessTerm, limits: Limits) -> Result<Verdict> {
    let (_, r) = klop_summand(env, p, q, limits)?;
    let lhs = ProcessTerm::sum(p.clone(), r.clone());
    let rhs = ProcessTerm::sum(q.clone(), r);
    weak_equiv(&env.extended_for([&lhs, &rhs]), &lhs, &rhs, limits)
}

#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub obs_congr: bool,
    pub decide: bool,
    pub witness: KlopWitness,
    pub samples: usize,
    /// First sampled `r` with `p + r ≉ q + r`.
    pub failing_summand: Option<ProcessTerm>,
}

impl CrosscheckReport {
    /// Decision agrees with ≈c, and sampled failures only occur when ≈c fails.
    pub fn consistent(&self) -> bool {
        self.decide == self.obs_congr && !(self.obs_congr && self.failing_summand.is_some())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "obs_congr": self.obs_congr,
            "decide": self.decide,
            "witness": self.witness.to_json(),
            "samples": self.samples,
            "failing_summand": self.failing_summand.as_ref().map(print_term),
            "consistent": self.consistent(),
        })
    }
}

pub fn coarsest_congr_crosscheck(
    env: &Environment,
    p: &ProcessTerm,
    q: &ProcessTerm,
    samples: usize,
    seed: u64,
    limits: Limits,
) -> Result<CrosscheckReport> {
    let oc = obs_congr(env, p, q, limits)?.related;
    let (witness, r) = klop_summand(env, p, q, limits)?;
    let lhs = ProcessTerm::sum(p.clone(), r.clone());
    let rhs = ProcessTerm::sum(q.clone(), r);
    let decide = weak_equiv(&env.extended_for([&lhs, &rhs]), &lhs, &rhs, limits)?.related;
    let mut alphabet: Vec<LabelId> = env.alphabet().cloned().collect();
    if alphabet.is_empty() {
        alphabet.push(distinguishing_label(env));
    }
    let mut gen = TermGenerator::new(&alphabet, 2, seed);
    let failing_summand = sum_equiv_counterexample(env, p, q, &mut gen, samples, limits)?;
    Ok(CrosscheckReport { obs_congr: oc, decide, witness, samples, failing_summand })
}

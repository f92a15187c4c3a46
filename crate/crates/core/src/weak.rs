//! ε-closure and weak transitions over a finite LTS.
//!
//! Two τ relations are kept apart: `eps` (zero or more τ steps) is what a
//! weak bisimulation answers a τ challenge with, while the weak τ
//! transition requires at least one τ.

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::Result;
use crate::semantics::Lts;
use crate::syntax::Action;

/// Reflexive-transitive closure of τ edges from `s`, sorted.
pub fn eps_closure(lts: &Lts, s: usize) -> Result<Vec<usize>> {
    lts.require_complete()?;
    let mut mark = vec![false; lts.len()];
    Ok(tau_closure(lts, s, &mut mark))
}

fn tau_closure(lts: &Lts, s: usize, mark: &mut [bool]) -> Vec<usize> {
    let mut out = vec![s];
    mark[s] = true;
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        i += 1;
        for e in lts.out_edges(x).filter(|e| e.action.is_tau()) {
            if !mark[e.target] {
                mark[e.target] = true;
                out.push(e.target);
            }
        }
    }
    for &x in &out {
        mark[x] = false;
    }
    out.sort_unstable();
    out
}

/// An LTS together with its fully materialized ε-closure and weak
/// transition relation.
#[derive(Clone, Debug)]
pub struct SaturatedLts {
    base: Lts,
    eps: Vec<Vec<usize>>,
    weak: Vec<BTreeMap<Action, Vec<usize>>>,
}

const NONE: &[usize] = &[];

impl SaturatedLts {
    pub fn base(&self) -> &Lts {
        &self.base
    }

    pub fn into_base(self) -> Lts {
        self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn eps(&self, s: usize) -> &[usize] {
        &self.eps[s]
    }

    /// Targets of `s ==u=>> t`. For τ at least one τ step is taken.
    pub fn weak_successors(&self, s: usize, u: &Action) -> &[usize] {
        self.weak[s].get(u).map_or(NONE, Vec::as_slice)
    }

    /// Weak moves from `s` grouped by action.
    pub fn weak_moves(&self, s: usize) -> impl Iterator<Item = (&Action, &[usize])> {
        self.weak[s].iter().map(|(u, ts)| (u, ts.as_slice()))
    }

    /// The answer set for a challenge `u` in a weak bisimulation game:
    /// ε-reachable states for τ, weak `u`-successors otherwise.
    pub fn response(&self, s: usize, u: &Action) -> &[usize] {
        if u.is_tau() {
            self.eps(s)
        } else {
            self.weak_successors(s, u)
        }
    }

    pub fn is_eps(&self, s: usize, t: usize) -> bool {
        self.eps[s].binary_search(&t).is_ok()
    }

    pub fn is_weak(&self, s: usize, u: &Action, t: usize) -> bool {
        self.weak_successors(s, u).binary_search(&t).is_ok()
    }

    pub fn weak_edge_count(&self) -> usize {
        self.weak.iter().flat_map(|m| m.values()).map(Vec::len).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let weak_edges: Vec<_> = self
            .weak
            .iter()
            .enumerate()
            .flat_map(|(s, m)| {
                m.iter().flat_map(move |(u, ts)| {
                    ts.iter().map(move |t| json!({"source": s, "action": u.to_string(), "target": t}))
                })
            })
            .collect();
        json!({ "eps": self.eps, "weak_edges": weak_edges })
    }
}

/// Materializes ε-closures and weak transitions of a complete LTS.
pub fn saturate(lts: Lts) -> Result<SaturatedLts> {
    lts.require_complete()?;
    let n = lts.len();
    let mut mark = vec![false; n];
    let eps: Vec<Vec<usize>> = (0..n).map(|s| tau_closure(&lts, s, &mut mark)).collect();

    let mut weak = Vec::with_capacity(n);
    for s in 0..n {
        let mut by_action: BTreeMap<Action, Vec<usize>> = BTreeMap::new();
        for &s1 in &eps[s] {
            for e in lts.out_edges(s1) {
                by_action.entry(e.action.clone()).or_default().extend_from_slice(&eps[e.target]);
            }
        }
        for ts in by_action.values_mut() {
            ts.sort_unstable();
            ts.dedup();
        }
        weak.push(by_action);
    }
    Ok(SaturatedLts { base: lts, eps, weak })
}

pub fn weak_successors<'a>(sat: &'a SaturatedLts, s: usize, u: &Action) -> &'a [usize] {
    sat.weak_successors(s, u)
}

//! Single-step transitions of CCS terms and bounded state-space
//! exploration.

use std::collections::VecDeque;
use std::fmt::Write as _;

use indexmap::IndexSet;
use serde_json::json;

use crate::error::{Error, Result};
use crate::parser::print_term;
use crate::syntax::{Action, ConstName, Environment, ProcessTerm};

pub const DEFAULT_MAX_STATES: usize = 10_000;
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

/// Exploration caps. Hitting either cap yields an incomplete LTS rather
/// than an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: DEFAULT_MAX_STATES, max_steps: DEFAULT_MAX_STEPS }
    }
}

impl Limits {
    pub fn states(max_states: usize) -> Self {
        Limits { max_states, ..Limits::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: ProcessTerm,
    pub action: Action,
    pub target: ProcessTerm,
}

pub type Successors = IndexSet<(Action, ProcessTerm)>;

/// All `(u, p')` with `p --u-> p'`, in rule order and without duplicates.
///
/// Constants unfold through their definition. Reaching the same constant
/// again without passing a prefix is unguarded recursion and is reported
/// as an error.
pub fn successors(env: &Environment, p: &ProcessTerm) -> Result<Successors> {
    let mut unfolding = Vec::new();
    step(env, p, &mut unfolding)
}

fn step(env: &Environment, p: &ProcessTerm, unfolding: &mut Vec<ConstName>) -> Result<Successors> {
    let mut out = Successors::new();
    match p {
        ProcessTerm::Nil => {}
        ProcessTerm::Prefix { action, body } => {
            out.insert((action.clone(), (**body).clone()));
        }
        ProcessTerm::Sum { left, right } => {
            out = step(env, left, unfolding)?;
            out.extend(step(env, right, unfolding)?);
        }
        ProcessTerm::Par { left, right } => {
            let ls = step(env, left, unfolding)?;
            let rs = step(env, right, unfolding)?;
            for (u, l1) in &ls {
                out.insert((u.clone(), ProcessTerm::par(l1.clone(), (**right).clone())));
            }
            for (u, r1) in &rs {
                out.insert((u.clone(), ProcessTerm::par((**left).clone(), r1.clone())));
            }
            for (u, l1) in &ls {
                let Some(lab) = u.label() else { continue };
                let co = Action::Visible(lab.complement());
                for (v, r1) in &rs {
                    if *v == co {
                        out.insert((Action::Tau, ProcessTerm::par(l1.clone(), r1.clone())));
                    }
                }
            }
        }
        ProcessTerm::Restr { hidden, body } => {
            for (u, b1) in step(env, body, unfolding)? {
                let blocked = u.label().is_some_and(|l| hidden.contains(&l.base));
                if !blocked {
                    out.insert((u, ProcessTerm::Restr { hidden: hidden.clone(), body: b1.into() }));
                }
            }
        }
        ProcessTerm::Relab { body, map } => {
            for (u, b1) in step(env, body, unfolding)? {
                out.insert((map.apply(&u), ProcessTerm::Relab { body: b1.into(), map: map.clone() }));
            }
        }
        ProcessTerm::Const { name } => {
            if unfolding.contains(name) {
                return Err(Error::UnguardedRecursion(name.to_string()));
            }
            let def = env.lookup(name)?;
            unfolding.push(name.clone());
            out = step(env, def, unfolding)?;
            unfolding.pop();
        }
    }
    Ok(out)
}

/// True iff `p` has no τ-transition as its first step.
pub fn stable(env: &Environment, p: &ProcessTerm) -> Result<bool> {
    Ok(successors(env, p)?.iter().all(|(u, _)| !u.is_tau()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub action: Action,
    pub target: usize,
}

/// A finite labelled transition system over process terms. State indices
/// follow BFS discovery order from the roots.
#[derive(Clone, Debug)]
pub struct Lts {
    states: IndexSet<ProcessTerm>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    roots: Vec<usize>,
    complete: bool,
}

impl Lts {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> &ProcessTerm {
        &self.states[i]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &ProcessTerm> {
        self.states.iter()
    }

    pub fn index_of(&self, p: &ProcessTerm) -> Option<usize> {
        self.states.get_index_of(p)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, s: usize) -> impl Iterator<Item = &Edge> {
        self.out[s].iter().map(move |&e| &self.edges[e])
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::IncompleteLts)
        }
    }

    /// States reachable from `s` (including `s`) along any edges.
    pub fn reachable_from(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![s];
        seen[s] = true;
        let mut out = Vec::new();
        while let Some(x) = stack.pop() {
            out.push(x);
            for e in self.out_edges(x) {
                if !seen[e.target] {
                    seen[e.target] = true;
                    stack.push(e.target);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "states": self.states.iter().enumerate()
                .map(|(i, p)| json!({"id": i, "term": print_term(p)}))
                .collect::<Vec<_>>(),
            "edges": self.edges.iter()
                .map(|e| json!({"source": e.source, "action": e.action.to_string(), "target": e.target}))
                .collect::<Vec<_>>(),
            "roots": self.roots,
            "complete": self.complete,
        })
    }

    /// Graphviz rendering. τ edges are dashed, roots are double circles.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n");
        for (i, p) in self.states.iter().enumerate() {
            let label = print_term(p).replace('\\', "\\\\").replace('"', "\\\"");
            let extra = if self.roots.contains(&i) { ", peripheries=2" } else { "" };
            let _ = writeln!(out, "  s{i} [label=\"{label}\"{extra}];");
        }
        for e in &self.edges {
            let style = if e.action.is_tau() { ", style=dashed" } else { "" };
            let _ = writeln!(out, "  s{} -> s{} [label=\"{}\"{style}];", e.source, e.target, e.action);
        }
        out.push_str("}\n");
        out
    }
}

/// Breadth-first exploration from `roots`, deduplicating states by
/// structural equality. The result is complete iff the frontier was
/// exhausted within both caps.
pub fn explore(env: &Environment, roots: &[ProcessTerm], limits: Limits) -> Result<Lts> {
    let max_states = limits.max_states.max(1);
    let mut states: IndexSet<ProcessTerm> = IndexSet::new();
    let mut root_ids = Vec::with_capacity(roots.len());
    let mut complete = true;
    for r in roots {
        env.check_term(r)?;
        match states.get_index_of(r) {
            Some(i) => root_ids.push(i),
            None if states.len() < max_states => root_ids.push(states.insert_full(r.clone()).0),
            None => {
                complete = false;
                break;
            }
        }
    }

    let mut edges = Vec::new();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    let mut queue: VecDeque<usize> = (0..states.len()).collect();
    let mut steps = 0usize;
    'bfs: while let Some(s) = queue.pop_front() {
        let succ = successors(env, &states[s])?;
        steps += succ.len();
        if steps > limits.max_steps {
            complete = false;
            break;
        }
        for (action, target) in succ {
            let t = match states.get_index_of(&target) {
                Some(t) => t,
                None => {
                    if states.len() >= max_states {
                        complete = false;
                        break 'bfs;
                    }
                    let t = states.insert_full(target).0;
                    out.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            out[s].push(edges.len());
            edges.push(Edge { source: s, action, target: t });
        }
    }
    Ok(Lts { states, edges, out, roots: root_ids, complete })
}

/// Explores and fails with `ExceedsCap` unless the LTS is complete.
pub fn explore_complete(env: &Environment, roots: &[ProcessTerm], limits: Limits) -> Result<Lts> {
    let lts = explore(env, roots, limits)?;
    if lts.is_complete() {
        Ok(lts)
    } else {
        Err(Error::ExceedsCap { cap: limits.max_states })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiniteState {
    Finite(usize),
    ExceedsCap,
}

/// Semi-decides finite-stateness: the number of reachable states when
/// exploration completes within `cap` states.
pub fn is_finite_state(env: &Environment, p: &ProcessTerm, cap: usize) -> Result<FiniteState> {
    let lts = explore(env, std::slice::from_ref(p), Limits::states(cap))?;
    Ok(if lts.is_complete() { FiniteState::Finite(lts.len()) } else { FiniteState::ExceedsCap })
}

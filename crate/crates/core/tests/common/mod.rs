//! Naive reference implementations used as test oracles. They only read
//! the raw edge list of an LTS and recompute everything by brute force.

#![allow(dead_code, clippy::needless_range_loop)]

use ccs_core::semantics::Lts;
use ccs_core::{Action, LabelId, ProcessTerm};

pub fn label(s: &str) -> LabelId {
    LabelId::new(s).unwrap()
}

pub fn ab() -> Vec<LabelId> {
    vec![label("a"), label("b")]
}

pub fn t(s: &str) -> ProcessTerm {
    ccs_core::parse_term(s).unwrap()
}

pub struct Oracle {
    pub n: usize,
    edges: Vec<(usize, Action, usize)>,
    /// eps[x][y]: x reaches y by zero or more τ edges
    pub eps: Vec<Vec<bool>>,
    /// weak[s] lists every (u, t) with `s ==u=>> t`
    weak: Vec<Vec<(Action, usize)>>,
}

impl Oracle {
    pub fn new(lts: &Lts) -> Self {
        assert!(lts.is_complete());
        let n = lts.len();
        let edges: Vec<_> = lts.edges().iter().map(|e| (e.source, e.action.clone(), e.target)).collect();
        let mut eps = vec![vec![false; n]; n];
        for (i, row) in eps.iter_mut().enumerate() {
            row[i] = true;
        }
        loop {
            let mut changed = false;
            for (s, u, t) in &edges {
                if !u.is_tau() {
                    continue;
                }
                for x in 0..n {
                    if eps[x][*s] {
                        for y in 0..n {
                            if eps[*t][y] && !eps[x][y] {
                                eps[x][y] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut weak = vec![Vec::new(); n];
        for (s, out) in weak.iter_mut().enumerate() {
            for (x, u, y) in &edges {
                if eps[s][*x] {
                    for t in 0..n {
                        if eps[*y][t] && !out.contains(&(u.clone(), t)) {
                            out.push((u.clone(), t));
                        }
                    }
                }
            }
        }
        Oracle { n, edges, eps, weak }
    }

    pub fn strong_moves(&self, s: usize) -> impl Iterator<Item = (&Action, usize)> {
        self.edges.iter().filter(move |e| e.0 == s).map(|e| (&e.1, e.2))
    }

    /// `s ==u=>> t`: eps, one `u` edge, eps. For τ this needs one τ edge.
    pub fn weak(&self, s: usize, u: &Action, t: usize) -> bool {
        self.edges.iter().any(|(x, v, y)| v == u && self.eps[s][*x] && self.eps[*y][t])
    }

    fn weak_targets<'a>(&'a self, s: usize, u: &'a Action) -> impl Iterator<Item = usize> + 'a {
        self.weak[s].iter().filter(move |(v, _)| v == u).map(|&(_, t)| t)
    }

    fn answered(&self, rel: &[Vec<bool>], q: usize, u: &Action, p1: usize) -> bool {
        if u.is_tau() {
            (0..self.n).any(|q1| self.eps[q][q1] && rel[p1][q1])
        } else {
            self.weak_targets(q, u).any(|q1| rel[p1][q1])
        }
    }

    fn gfp(&self, answers: impl Fn(&[Vec<bool>], usize, usize) -> bool) -> Vec<Vec<bool>> {
        let mut rel = vec![vec![true; self.n]; self.n];
        loop {
            let mut changed = false;
            let tr = transpose(&rel);
            for p in 0..self.n {
                for q in 0..self.n {
                    if rel[p][q] && !(answers(&rel, p, q) && answers(&tr, q, p)) {
                        rel[p][q] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                return rel;
            }
        }
    }

    /// Largest strong bisimulation.
    pub fn strong(&self) -> Vec<Vec<bool>> {
        self.gfp(|rel, p, q| {
            self.strong_moves(p)
                .all(|(u, p1)| self.strong_moves(q).any(|(v, q1)| u == v && rel[p1][q1]))
        })
    }

    /// Largest weak bisimulation: strong challenges, weak answers.
    pub fn weak_bisim(&self) -> Vec<Vec<bool>> {
        self.gfp(|rel, p, q| {
            self.strong_moves(p).all(|(u, p1)| self.answered(rel, q, u, p1))
        })
    }

    /// Observation congruence given the weak bisimilarity `wb`.
    pub fn obs_congr(&self, wb: &[Vec<bool>], p: usize, q: usize) -> bool {
        let rooted = |p: usize, q: usize, flip: bool| {
            self.strong_moves(p).all(|(u, p1)| {
                self.weak_targets(q, u).any(|q1| if flip { wb[q1][p1] } else { wb[p1][q1] })
            })
        };
        rooted(p, q, false) && rooted(q, p, true)
    }
}

fn transpose(m: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

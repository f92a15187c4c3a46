//! Deterministic pseudo-random CCS terms for randomized law checking.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Action, ConstName, Environment, LabelId, ProcessTerm, Relabeling};

/// An endless stream of closed, constant-free terms of bounded depth.
/// Two generators built from the same arguments yield the same stream.
#[derive(Clone, Debug)]
pub struct TermGenerator {
    rng: ChaCha8Rng,
    alphabet: Vec<LabelId>,
    max_depth: usize,
}

impl TermGenerator {
    pub fn new(alphabet: &[LabelId], max_depth: usize, seed: u64) -> Self {
        TermGenerator { rng: ChaCha8Rng::seed_from_u64(seed), alphabet: alphabet.to_vec(), max_depth }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn term(&mut self) -> ProcessTerm {
        random_term(&mut self.rng, &self.alphabet, self.max_depth)
    }

    pub fn term_of_depth(&mut self, depth: usize) -> ProcessTerm {
        random_term(&mut self.rng, &self.alphabet, depth)
    }

    pub fn action(&mut self) -> Action {
        random_action(&mut self.rng, &self.alphabet)
    }

    pub fn visible_action(&mut self) -> Option<Action> {
        random_visible(&mut self.rng, &self.alphabet)
    }

    pub fn labels(&mut self) -> Vec<LabelId> {
        random_labels(&mut self.rng, &self.alphabet)
    }

    pub fn relabeling(&mut self) -> Relabeling {
        random_relabeling(&mut self.rng, &self.alphabet)
    }
}

impl Iterator for TermGenerator {
    type Item = ProcessTerm;
    fn next(&mut self) -> Option<ProcessTerm> {
        Some(self.term())
    }
}

pub fn generate_terms(alphabet: &[LabelId], max_depth: usize, seed: u64) -> TermGenerator {
    TermGenerator::new(alphabet, max_depth, seed)
}

pub fn random_visible<R: Rng>(rng: &mut R, alphabet: &[LabelId]) -> Option<Action> {
    let base = alphabet.choose(rng)?.clone();
    Some(if rng.random_bool(0.5) { Action::name(base) } else { Action::coname(base) })
}

pub fn random_action<R: Rng>(rng: &mut R, alphabet: &[LabelId]) -> Action {
    if alphabet.is_empty() || rng.random_ratio(1, 3) {
        Action::Tau
    } else {
        random_visible(rng, alphabet).expect("alphabet is non-empty")
    }
}

pub fn random_labels<R: Rng>(rng: &mut R, alphabet: &[LabelId]) -> Vec<LabelId> {
    let mut out: Vec<LabelId> = alphabet.iter().filter(|_| rng.random_ratio(1, 3)).cloned().collect();
    if out.is_empty() {
        out.extend(alphabet.choose(rng).cloned());
    }
    out
}

pub fn random_relabeling<R: Rng>(rng: &mut R, alphabet: &[LabelId]) -> Relabeling {
    match (alphabet.choose(rng), alphabet.choose(rng)) {
        (Some(from), Some(to)) => Relabeling::single(from.clone(), to.clone()),
        _ => Relabeling::default(),
    }
}

/// A random term of depth at most `depth`.
pub fn random_term<R: Rng>(rng: &mut R, alphabet: &[LabelId], depth: usize) -> ProcessTerm {
    if depth == 0 {
        return ProcessTerm::Nil;
    }
    let d = depth - 1;
    // weights: nil 1, prefix 5, sum 3, par 1, restr 1, relab 1
    let mut pick = rng.random_range(0..12);
    if alphabet.is_empty() && pick >= 10 {
        pick = 1;
    }
    match pick {
        0 => ProcessTerm::Nil,
        1..=5 => {
            let u = random_action(rng, alphabet);
            ProcessTerm::prefix(u, random_term(rng, alphabet, d))
        }
        6..=8 => ProcessTerm::sum(random_term(rng, alphabet, d), random_term(rng, alphabet, d)),
        9 => ProcessTerm::par(random_term(rng, alphabet, d), random_term(rng, alphabet, d)),
        10 => {
            let hidden = random_labels(rng, alphabet);
            ProcessTerm::restr(hidden, random_term(rng, alphabet, d))
        }
        _ => {
            let rf = random_relabeling(rng, alphabet);
            ProcessTerm::relab(random_term(rng, alphabet, d), rf)
        }
    }
}

/// A random finite transition graph encoded as guarded constants
/// `S0 .. S{n-1}`, each a sum of prefixes into other constants. Returns the
/// environment and the root `S0`. Every LTS explored from it has at most
/// `states` states.
pub fn random_graph<R: Rng>(rng: &mut R, alphabet: &[LabelId], states: usize, max_out: usize) -> (Environment, ProcessTerm) {
    let states = states.max(1);
    let names: Vec<ConstName> = (0..states).map(|i| ConstName::new(&format!("S{i}")).expect("valid name")).collect();
    let mut defs = Vec::with_capacity(states);
    for name in &names {
        let fanout = rng.random_range(0..=max_out);
        let mut body: Option<ProcessTerm> = None;
        for _ in 0..fanout {
            let u = random_action(rng, alphabet);
            let target = ProcessTerm::constant(names[rng.random_range(0..states)].clone());
            let branch = ProcessTerm::prefix(u, target);
            body = Some(match body {
                None => branch,
                Some(b) => ProcessTerm::sum(b, branch),
            });
        }
        defs.push((name.clone(), body.unwrap_or(ProcessTerm::Nil)));
    }
    let env = Environment::new(alphabet.iter().cloned(), defs).expect("generated environment is closed");
    (env, ProcessTerm::constant(names[0].clone()))
}

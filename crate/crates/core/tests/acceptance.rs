//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits nonzero if any failed.

#![allow(clippy::needless_range_loop)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ccs_core::congruence::enumerate_contexts;
use ccs_core::equivalence::{check, RelationKind, WeakAnalysis};
use ccs_core::generate::{random_graph, TermGenerator};
use ccs_core::klop::{coarsest_congr_crosscheck, coarsest_congr_decide, klop};
use ccs_core::laws::{check_law_with, deng_classify, hennessy_classify, law, related_variant};
use ccs_core::semantics::{explore, explore_complete, stable, successors, Limits};
use ccs_core::weak::saturate;
use ccs_core::{parse_term, parse_workspace, print_term, print_workspace, Action, Environment, Error, ProcessTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{ab, label, t, Oracle};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const L: Limits = Limits { max_states: 10_000, max_steps: 1_000_000 };

fn env_ab() -> Environment {
    Environment::new(ab(), []).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The relation decided by the naive oracle on the joint LTS of `p` and `q`.
fn oracle_related(kind: RelationKind, p: &ProcessTerm, q: &ProcessTerm) -> bool {
    let env = Environment::for_terms([p, q]);
    let lts = explore_complete(&env, &[p.clone(), q.clone()], L).unwrap();
    let o = Oracle::new(&lts);
    let (s, u) = (lts.roots()[0], lts.roots()[1]);
    match kind {
        RelationKind::Strong => o.strong()[s][u],
        RelationKind::Weak => o.weak_bisim()[s][u],
        RelationKind::ObsCongr => o.obs_congr(&o.weak_bisim(), s, u),
    }
}

/// A pair that is related by construction in three cases out of four.
fn mixed_pair(gen: &mut TermGenerator, i: usize) -> (ProcessTerm, ProcessTerm) {
    let p = gen.term();
    let q = match i % 4 {
        0 => related_variant(gen, &p, RelationKind::Strong),
        1 => related_variant(gen, &p, RelationKind::ObsCongr),
        2 => related_variant(gen, &p, RelationKind::Weak),
        _ => gen.term(),
    };
    (p, q)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pairs = 0usize;
    for i in 0..500 {
        let states = rng.random_range(1..=40);
        let (env, root) = random_graph(&mut rng, &ab(), states, 3);
        let lts = explore(&env, &[root], L).unwrap();
        ensure(lts.is_complete() && lts.len() <= 40, || format!("graph {i} not a small complete LTS"))?;
        let o = Oracle::new(&lts);
        let wb = o.weak_bisim();
        let a = WeakAnalysis::from_lts(lts).unwrap();
        for s in 0..o.n {
            for u in 0..o.n {
                pairs += 1;
                ensure(a.weakly_equivalent(s, u) == wb[s][u], || format!("graph {i}: states {s},{u} disagree"))?;
            }
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("500 LTSs, {pairs} state pairs agree, {:.1}s", took.as_secs_f64()))
}

fn tau_laws() -> Outcome {
    let env = env_ab();
    for (i, id) in ["TAU_WEAK", "TAU1", "TAU2", "TAU3", "TAU_STRAT"].iter().enumerate() {
        let law = law(id).unwrap();
        let mut gen = TermGenerator::new(&ab(), 3, 100 + i as u64);
        for _ in 0..100 {
            let b = law.random_bindings(&mut gen);
            let r = check_law_with(&env, &law, &b, L).unwrap();
            ensure(r.passed, || format!("{id} failed: {}", r.to_json()))?;
            if let Some(c) = &r.conclusion {
                if let ccs_core::laws::Claim::Related(kind, p, q) = &c.claim {
                    ensure(oracle_related(*kind, p, q), || format!("{id}: oracle rejects {p} vs {q}"))?;
                }
            }
        }
    }
    Ok("5 laws x 100 instances".into())
}

fn deng() -> Outcome {
    let env = env_ab();
    let mut gen = TermGenerator::new(&ab(), 3, 3);
    let (mut related, mut unrelated, mut i) = (0, 0, 0);
    while related < 200 || unrelated < 200 {
        let (p, q) = mixed_pair(&mut gen, i);
        i += 1;
        let weak = oracle_related(RelationKind::Weak, &p, &q);
        match deng_classify(&env, &p, &q, L) {
            Ok(o) if weak && related < 200 => {
                related += 1;
                ensure(o.any(), || format!("no Deng case for {p} vs {q}"))?;
                if let Some(w) = &o.case1_witness {
                    ensure(successors(&env, &p).unwrap().contains(&(Action::Tau, w.clone())), || "bad case1".into())?;
                    ensure(oracle_related(RelationKind::Weak, w, &q), || "case1 witness not ≈ q".into())?;
                }
                if let Some(w) = &o.case2_witness {
                    ensure(successors(&env, &q).unwrap().contains(&(Action::Tau, w.clone())), || "bad case2".into())?;
                    ensure(oracle_related(RelationKind::Weak, &p, w), || "case2 witness not ≈ p".into())?;
                }
                ensure(o.case3 == oracle_related(RelationKind::ObsCongr, &p, &q), || "case3 disagrees".into())?;
            }
            Err(Error::NotWeaklyEquivalent) if !weak && unrelated < 200 => unrelated += 1,
            Ok(_) if weak => {}
            Err(Error::NotWeaklyEquivalent) if !weak => {}
            other => return Err(format!("{p} vs {q}: oracle weak={weak}, got {other:?}")),
        }
    }
    Ok(format!("200 related classified, 200 unrelated rejected ({i} pairs drawn)"))
}

fn hennessy() -> Outcome {
    let env = env_ab();
    let mut gen = TermGenerator::new(&ab(), 3, 4);
    let mut equiv = 0;
    for i in 0..200 {
        let (p, q) = mixed_pair(&mut gen, i);
        let o = hennessy_classify(&env, &p, &q, L).unwrap();
        let weak = oracle_related(RelationKind::Weak, &p, &q);
        equiv += weak as usize;
        ensure(o.disjunction() == weak && o.weak_equiv == weak, || format!("{p} vs {q}: {}", o.to_json()))?;
    }
    Ok(format!("200 pairs ({equiv} weakly bisimilar), zero mismatches"))
}

fn implication_chain() -> Outcome {
    let env = env_ab();
    let mut gen = TermGenerator::new(&ab(), 3, 5);
    let mut counts = [0usize; 3];
    for i in 0..300 {
        let (p, q) = mixed_pair(&mut gen, i);
        let v: Vec<bool> = [RelationKind::Strong, RelationKind::ObsCongr, RelationKind::Weak]
            .iter()
            .map(|&k| check(&env, k, &p, &q, L).unwrap().related)
            .collect();
        for (c, &b) in counts.iter_mut().zip(&v) {
            *c += b as usize;
        }
        ensure((!v[0] || v[1]) && (!v[1] || v[2]), || format!("{p} vs {q}: {v:?}"))?;
        ensure(v[2] == oracle_related(RelationKind::Weak, &p, &q), || format!("{p} vs {q}: weak disagrees"))?;
    }
    Ok(format!("300 pairs, strong/obscongr/weak = {}/{}/{}", counts[0], counts[1], counts[2]))
}

fn klop_properties() -> Outcome {
    let start = Instant::now();
    let a = label("a");
    let env = Environment::new([a.clone()], []).unwrap();
    let ks: Vec<ProcessTerm> = (0..=8).map(|n| klop(&a, n).unwrap()).collect();
    for (n, k) in ks.iter().enumerate() {
        ensure(stable(&env, k).unwrap(), || format!("KLOP {n} not stable"))?;
    }
    for n in 0..=6 {
        let want: std::collections::BTreeSet<_> = (0..n).map(|m| (Action::name(a.clone()), ks[m].clone())).collect();
        let got: std::collections::BTreeSet<_> = successors(&env, &ks[n]).unwrap().into_iter().collect();
        ensure(got == want, || format!("strong successors of KLOP {n}"))?;
        let sat = saturate(explore_complete(&env, &[ks[n].clone()], L).unwrap()).unwrap();
        let root = sat.base().roots()[0];
        let weak: std::collections::BTreeSet<_> = sat
            .weak_successors(root, &Action::name(a.clone()))
            .iter()
            .map(|&s| sat.base().state(s).clone())
            .collect();
        let want: std::collections::BTreeSet<_> = (0..n).map(|m| ks[m].clone()).collect();
        ensure(weak == want, || format!("weak successors of KLOP {n}"))?;
        for m in 0..n {
            ensure(ks[m] != ks[n], || "KLOP not one-one".into())?;
            for kind in [RelationKind::Strong, RelationKind::Weak] {
                ensure(!check(&env, kind, &ks[m], &ks[n], L).unwrap().related, || format!("{kind}: KLOP {m} ~ KLOP {n}"))?;
            }
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("took {took:?}"))?;
    Ok(format!("indices <= 6 (stability <= 8), {:.2}s", took.as_secs_f64()))
}

fn coarsest() -> Outcome {
    let env = env_ab();
    let mut gen = TermGenerator::new(&ab(), 3, 7);
    let mut congruent = 0;
    for i in 0..150 {
        let (p, q) = mixed_pair(&mut gen, i);
        let oc = check(&env, RelationKind::ObsCongr, &p, &q, L).unwrap().related;
        ensure(oc == oracle_related(RelationKind::ObsCongr, &p, &q), || format!("{p} vs {q}: oracle"))?;
        let decide = coarsest_congr_decide(&env, &p, &q, L).unwrap().related;
        ensure(decide == oc, || format!("{p} vs {q}: decide={decide}, obscongr={oc}"))?;
        let r = coarsest_congr_crosscheck(&env, &p, &q, 25, i as u64, L).unwrap();
        ensure(r.consistent(), || format!("{p} vs {q}: {}", r.to_json()))?;
        congruent += oc as usize;
    }
    Ok(format!("150 pairs ({congruent} congruent), 25 summands each"))
}

fn eps_weak_properties() -> Outcome {
    let env = env_ab();
    let mut gen = TermGenerator::new(&ab(), 3, 8);
    let mut transitions = 0;
    for i in 0..300 {
        let (e, f) = (gen.term(), gen.term());
        let roots = [e.clone(), ProcessTerm::tau(e.clone()), ProcessTerm::sum(e.clone(), f.clone()), ProcessTerm::sum(f, e)];
        let lts = explore_complete(&env, &roots, L).unwrap();
        let o = Oracle::new(&lts);
        let sat = saturate(lts).unwrap();
        let lts = sat.base();
        let n = lts.len();
        let edges = lts.edges();
        transitions += edges.len();
        let eps = |x: usize, y: usize| sat.is_eps(x, y);
        let weak = |x: usize, u: &Action, y: usize| sat.is_weak(x, u, y);
        let fail = |item: &str| format!("sample {i}: {item}");
        let actions: Vec<Action> = std::iter::once(Action::Tau)
            .chain(ab().into_iter().flat_map(|a| [Action::name(a.clone()), Action::coname(a)]))
            .collect();

        for x in 0..n {
            for y in 0..n {
                ensure(eps(x, y) == o.eps[x][y], || fail("eps matches oracle"))?;
                for u in &actions {
                    ensure(weak(x, u, y) == o.weak(x, u, y), || fail("weak matches oracle"))?;
                }
                let cases1 = x == y || edges.iter().any(|e| e.source == x && e.action.is_tau() && eps(e.target, y));
                let cases2 = x == y || edges.iter().any(|e| e.target == y && e.action.is_tau() && eps(x, e.source));
                ensure(eps(x, y) == cases1 && eps(x, y) == cases2, || fail("EPS_cases1/2"))?;
                // EPS_IMP_WEAK_TRANS
                ensure(!eps(x, y) || x == y || weak(x, &Action::Tau, y), || fail("EPS_IMP_WEAK_TRANS"))?;
                // WEAK_TRANS_TAU, WEAK_TRANS_TAU_IMP_TRANS_TAU
                if weak(x, &Action::Tau, y) {
                    ensure(eps(x, y), || fail("WEAK_TRANS_TAU"))?;
                    ensure(
                        edges.iter().any(|e| e.source == x && e.action.is_tau() && eps(e.target, y)),
                        || fail("WEAK_TRANS_TAU_IMP_TRANS_TAU"),
                    )?;
                }
                for u in &actions {
                    if !weak(x, u, y) {
                        continue;
                    }
                    // WEAK_TRANS_cases1
                    let via_tau = edges.iter().any(|e| e.source == x && e.action.is_tau() && weak(e.target, u, y));
                    let via_u = edges.iter().any(|e| e.source == x && e.action == *u && eps(e.target, y));
                    ensure(via_tau || via_u, || fail("WEAK_TRANS_cases1"))?;
                    // EPS_AND_WEAK
                    for w in 0..n {
                        if eps(w, x) {
                            for z in sat.eps(y) {
                                ensure(weak(w, u, *z), || fail("EPS_AND_WEAK"))?;
                            }
                        }
                    }
                }
            }
        }
        for e in edges {
            // TRANS_IMP_WEAK_TRANS, TRANS_TAU_IMP_EPS, TRANS_AND_EPS
            ensure(weak(e.source, &e.action, e.target), || fail("TRANS_IMP_WEAK_TRANS"))?;
            ensure(!e.action.is_tau() || eps(e.source, e.target), || fail("TRANS_TAU_IMP_EPS"))?;
            for &y in sat.eps(e.target) {
                ensure(weak(e.source, &e.action, y), || fail("TRANS_AND_EPS"))?;
            }
            // TRANS_TAU_AND_WEAK
            if e.action.is_tau() {
                for (u, ys) in sat.weak_moves(e.target) {
                    ensure(ys.iter().all(|&y| weak(e.source, u, y)), || fail("TRANS_TAU_AND_WEAK"))?;
                }
            }
        }
        let [re, rte, ref_, rfe] = [lts.roots()[0], lts.roots()[1], lts.roots()[2], lts.roots()[3]];
        for y in 0..n {
            // TAU_PREFIX_EPS
            ensure(!eps(re, y) || eps(rte, y), || fail("TAU_PREFIX_EPS"))?;
        }
        for (u, ys) in sat.weak_moves(re) {
            for &y in ys {
                ensure(weak(rte, u, y), || fail("TAU_PREFIX_WEAK_TRANS"))?;
                ensure(weak(ref_, u, y) && weak(rfe, u, y), || fail("WEAK_SUM1/2"))?;
            }
        }
    }
    Ok(format!("300 samples, {transitions} transitions"))
}

fn stable_pairs() -> Outcome {
    let env = env_ab();
    let mut gen = TermGenerator::new(&ab(), 3, 9);
    let (mut found, mut drawn) = (0, 0);
    while found < 100 {
        drawn += 1;
        ensure(drawn < 100_000, || format!("only {found} stable pairs found"))?;
        let p = gen.term();
        let q = if drawn % 2 == 0 { related_variant(&mut gen, &p, RelationKind::Weak) } else { gen.term() };
        if !stable(&env, &p).unwrap() || !stable(&env, &q).unwrap() || !oracle_related(RelationKind::Weak, &p, &q) {
            continue;
        }
        found += 1;
        ensure(check(&env, RelationKind::ObsCongr, &p, &q, L).unwrap().related, || format!("{p} vs {q}"))?;
        ensure(oracle_related(RelationKind::ObsCongr, &p, &q), || format!("oracle: {p} vs {q}"))?;
    }
    Ok(format!("100 stable weakly bisimilar pairs are congruent ({drawn} drawn)"))
}

fn round_trip() -> Outcome {
    let abc = vec![label("a"), label("b"), label("c")];
    for (i, p) in TermGenerator::new(&abc, 4, 10).take(1000).enumerate() {
        let printed = print_term(&p);
        let back = parse_term(&printed).map_err(|e| format!("term {i} `{printed}`: {e}"))?;
        ensure(back == p, || format!("term {i} `{printed}` changed"))?;
    }
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/vending.ccs");
    let golden = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let env = parse_workspace(&golden).map_err(|e| e.to_string())?;
    ensure(print_workspace(&env) == golden, || "fixture does not reprint byte for byte".into())?;
    Ok(format!("1000 terms, fixture with {} definitions", env.definitions().count()))
}

fn regressions() -> Outcome {
    let env = env_ab();
    let cases = [
        (RelationKind::Weak, "tau.a.0", "a.0", true),
        (RelationKind::ObsCongr, "tau.a.0", "a.0", false),
        (RelationKind::Weak, "tau.a.0 + b.0", "a.0 + b.0", false),
    ];
    for (kind, p, q, want) in cases {
        let (p, q) = (t(p), t(q));
        ensure(oracle_related(kind, &p, &q) == want, || format!("oracle: {kind} {p} {q}"))?;
        ensure(check(&env, kind, &p, &q, L).unwrap().related == want, || format!("{kind} {p} {q}"))?;
    }
    // the failure is a context failure: SumL([], b.0) is among depth-1 contexts
    ensure(enumerate_contexts(&ab(), 1, &[t("b.0")]).len() > 1, || "contexts".into())?;
    Ok("classic triple pinned".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("tau-law suite", tau_laws),
        ("Deng lemma", deng),
        ("Hennessy lemma", hennessy),
        ("implication chain", implication_chain),
        ("Klop properties", klop_properties),
        ("coarsest congruence", coarsest),
        ("eps/weak transition properties", eps_weak_properties),
        ("stability theorem", stable_pairs),
        ("parser round-trip", round_trip),
        ("known-instance regressions", regressions),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Nondeterministic-probabilistic tests, interaction systems, success
//! probabilities, and the suite-relative testing equivalences PTe-⊔⊓,
//! PTe-∀∃ and PTe-tbt, plus a bounded distinguishing-test search.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::Zero;

use crate::events::{event_prob, EventQuery};
use crate::model::{Nplts, RawNplts, StateId, TAU};
use crate::rat::{rat, Rat};
use crate::resolution::{enumerate_resolutions, ResKind};
use crate::trace_equiv::{Verdict, Witness};

/// Checks the NPT invariants: acyclic, and ω states terminal.
pub fn validate_test(test: &Nplts, o: StateId) -> Result<(), String> {
    if test.has_cycle_from(o) {
        return Err(format!("test '{}' has a cycle reachable from its start", test.name));
    }
    for &w in &test.success {
        if !test.is_terminal(w) {
            return Err(format!(
                "success state '{}' of test '{}' has outgoing transitions",
                test.state_names[w], test.name
            ));
        }
    }
    Ok(())
}

/// Builds the interaction system of a τ-free process state with a test:
/// visible actions synchronize with product distributions, τ moves the test
/// alone. Returns the interaction and the start configuration.
pub fn interact(model: &Nplts, s: StateId, test: &Nplts, o: StateId) -> (Nplts, StateId) {
    let mut index: BTreeMap<(StateId, StateId), usize> = BTreeMap::new();
    let mut configs: Vec<(StateId, StateId)> = Vec::new();
    let mut raw_transitions: Vec<(usize, String, Vec<((StateId, StateId), Rat)>)> = Vec::new();
    let mut queue = vec![(s, o)];
    index.insert((s, o), 0);
    configs.push((s, o));
    while let Some((p, t)) = queue.pop() {
        let here = index[&(p, t)];
        if test.success.contains(&t) {
            continue; // ω states are terminal; nothing synchronizes further
        }
        for tt in test.transitions_from(t) {
            if tt.label == TAU {
                let support: Vec<((StateId, StateId), Rat)> = tt
                    .target
                    .support
                    .iter()
                    .map(|(&t2, q)| ((p, t2), q.clone()))
                    .collect();
                raw_transitions.push((here, TAU.to_string(), support));
            } else {
                for pt in model.transitions_from(p).filter(|x| x.label == tt.label) {
                    let mut support = Vec::new();
                    for (&p2, pp) in &pt.target.support {
                        for (&t2, tp) in &tt.target.support {
                            support.push(((p2, t2), pp * tp));
                        }
                    }
                    raw_transitions.push((here, tt.label.clone(), support));
                }
            }
        }
        for (_, _, support) in raw_transitions.iter().skip_while(|(h, _, _)| *h != here) {
            for (cfg, _) in support {
                if !index.contains_key(cfg) {
                    index.insert(*cfg, configs.len());
                    configs.push(*cfg);
                    queue.push(*cfg);
                }
            }
        }
    }
    let name_of = |&(p, t): &(StateId, StateId)| -> String {
        format!("{}__{}", model.state_names[p], test.state_names[t])
    };
    let raw = RawNplts {
        name: format!("{}_x_{}", model.name, test.name),
        states: configs.iter().map(name_of).collect(),
        designated: vec![name_of(&(s, o))],
        success: configs
            .iter()
            .filter(|(_, t)| test.success.contains(t))
            .map(name_of)
            .collect(),
        transitions: raw_transitions
            .into_iter()
            .map(|(from, label, support)| {
                // Merge duplicate product targets before validation.
                let mut merged: BTreeMap<String, Rat> = BTreeMap::new();
                for (cfg, p) in support {
                    *merged.entry(name_of(&cfg)).or_insert_with(Rat::zero) += p;
                }
                (
                    configs[from].clone(),
                    label,
                    merged.into_iter().collect::<Vec<_>>(),
                )
            })
            .map(|(cfg, label, support)| (name_of(&cfg), label, support))
            .collect(),
    };
    let interaction = Nplts::validate(&raw).expect("interaction is well-formed by construction");
    let start = interaction
        .state_by_name(&name_of(&(s, o)))
        .expect("start present");
    (interaction, start)
}

/// Extremal success probabilities over maximal deterministic resolutions.
pub fn success_envelope(interaction: &Nplts, start: StateId) -> (Rat, Rat) {
    let res = enumerate_resolutions(interaction, start, ResKind::Maximal, None)
        .expect("interaction is acyclic");
    let mut vals = res
        .items
        .iter()
        .map(|z| event_prob(interaction, z, &EventQuery::Success));
    let first = vals.next().expect("Res_max nonempty");
    vals.fold((first.clone(), first), |(sup, inf), v| {
        (sup.max(v.clone()), inf.min(v))
    })
}

/// All success probabilities over maximal resolutions (the ∀∃ observation).
fn success_values(interaction: &Nplts, start: StateId) -> BTreeSet<Rat> {
    let res = enumerate_resolutions(interaction, start, ResKind::Maximal, None)
        .expect("interaction is acyclic");
    res.items
        .iter()
        .map(|z| event_prob(interaction, z, &EventQuery::Success))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PteVariant {
    SupInf,
    ForallExists,
    Tbt,
}

/// Suite-relative testing check. `equivalent = true` means "not distinguished
/// by this suite" — inconclusive, never a proof of equivalence.
pub fn check_pte(
    variant: PteVariant,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    suite: &[(Nplts, StateId)],
) -> Verdict {
    assert!(!suite.is_empty(), "check_pte needs a non-empty suite");
    for (test, o) in suite {
        let (i1, start1) = interact(model, s1, test, *o);
        let (i2, start2) = interact(model, s2, test, *o);
        match variant {
            PteVariant::SupInf => {
                let (sup1, inf1) = success_envelope(&i1, start1);
                let (sup2, inf2) = success_envelope(&i2, start2);
                if sup1 != sup2 || inf1 != inf2 {
                    return Verdict::distinct(
                        Witness::ExtremumMismatch {
                            query: EventQuery::Success,
                            sup: (sup1, sup2),
                            inf: (inf1, inf2),
                        },
                        false,
                    );
                }
            }
            PteVariant::ForallExists => {
                let v1 = success_values(&i1, start1);
                let v2 = success_values(&i2, start2);
                if v1 != v2 {
                    let (side, value) = match v1.difference(&v2).next() {
                        Some(v) => (1, v.clone()),
                        None => (2, v2.difference(&v1).next().unwrap().clone()),
                    };
                    return Verdict::distinct(
                        Witness::UnmatchedValue { side, query: EventQuery::Success, value },
                        false,
                    );
                }
            }
            PteVariant::Tbt => {
                // Per success-trace α, the attained SCC probabilities must
                // coincide resolution-set-wise.
                let depth1 = i1.longest_path_from(start1).unwrap_or(0);
                let depth2 = i2.longest_path_from(start2).unwrap_or(0);
                let mut alphas: BTreeSet<Vec<String>> =
                    i1.traces_from(start1, depth1.max(depth2));
                alphas.extend(i2.traces_from(start2, depth1.max(depth2)));
                let res1 = enumerate_resolutions(&i1, start1, ResKind::Maximal, None).unwrap();
                let res2 = enumerate_resolutions(&i2, start2, ResKind::Maximal, None).unwrap();
                for alpha in alphas {
                    let q = EventQuery::SuccessTrace(alpha);
                    let v1: BTreeSet<Rat> =
                        res1.items.iter().map(|z| event_prob(&i1, z, &q)).collect();
                    let v2: BTreeSet<Rat> =
                        res2.items.iter().map(|z| event_prob(&i2, z, &q)).collect();
                    if v1 != v2 {
                        let (side, value) = match v1.difference(&v2).next() {
                            Some(v) => (1, v.clone()),
                            None => (2, v2.difference(&v1).next().unwrap().clone()),
                        };
                        return Verdict::distinct(
                            Witness::UnmatchedValue { side, query: q, value },
                            false,
                        );
                    }
                }
            }
        }
    }
    Verdict::equal(false)
}

/// Canonical deterministic test tree: a leaf (ω or dead) or one action with a
/// Dirac or 1/2–1/2 fan.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum TestTree {
    Omega,
    Dead,
    Node(String, Vec<TestTree>),
}

impl TestTree {
    fn has_omega(&self) -> bool {
        match self {
            TestTree::Omega => true,
            TestTree::Dead => false,
            TestTree::Node(_, kids) => kids.iter().any(TestTree::has_omega),
        }
    }
}

/// Subtrees realizable against the process-state set `p`, memoized.
fn enumerate_trees(
    model: &Nplts,
    p: &BTreeSet<StateId>,
    depth: usize,
    allow_fan: bool,
    memo: &mut HashMap<(Vec<StateId>, usize), Vec<TestTree>>,
) -> Vec<TestTree> {
    let key = (p.iter().copied().collect::<Vec<_>>(), depth);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut out = vec![TestTree::Omega, TestTree::Dead];
    if depth > 0 {
        // Only actions some reachable process state enables: an unrealizable
        // action yields a dead branch in both interactions, already covered.
        let actions: BTreeSet<String> = p.iter().flat_map(|&s| model.init(s)).collect();
        for a in actions {
            let next: BTreeSet<StateId> = p
                .iter()
                .flat_map(|&s| model.transitions_from(s))
                .filter(|t| t.label == a)
                .flat_map(|t| t.target.support.keys().copied())
                .collect();
            let subs = enumerate_trees(model, &next, depth - 1, allow_fan, memo);
            for sub in &subs {
                out.push(TestTree::Node(a.clone(), vec![sub.clone()]));
            }
            if allow_fan {
                for (i, s1) in subs.iter().enumerate() {
                    for s2 in &subs[i..] {
                        out.push(TestTree::Node(a.clone(), vec![s1.clone(), s2.clone()]));
                    }
                }
            }
        }
    }
    memo.insert(key, out.clone());
    out
}

fn tree_to_test(tree: &TestTree) -> (Nplts, StateId) {
    fn build(
        tree: &TestTree,
        states: &mut Vec<String>,
        success: &mut Vec<String>,
        transitions: &mut Vec<(String, String, Vec<(String, Rat)>)>,
    ) -> String {
        let name = format!("n{}", states.len());
        states.push(name.clone());
        match tree {
            TestTree::Omega => success.push(name.clone()),
            TestTree::Dead => {}
            TestTree::Node(a, kids) => {
                let prob = rat(1, kids.len() as i64);
                let support: Vec<(String, Rat)> = kids
                    .iter()
                    .map(|k| (build(k, states, success, transitions), prob.clone()))
                    .collect();
                // Merge equal children (1/2 + 1/2 on identical subtrees keeps
                // distinct states, which is fine for validation).
                transitions.push((name.clone(), a.clone(), support));
            }
        }
        name
    }
    let mut states = Vec::new();
    let mut success = Vec::new();
    let mut transitions = Vec::new();
    let root = build(tree, &mut states, &mut success, &mut transitions);
    let raw = RawNplts {
        name: "search_test".into(),
        designated: vec![root],
        states,
        success,
        transitions,
    };
    let test = Nplts::validate(&raw).expect("generated test is well-formed");
    (test, 0)
}

/// Bounded semi-decision: enumerates canonical deterministic tests (depth,
/// then shape), optionally preceded by an initial τ fan, and returns the
/// first one whose `check_pte` verdict distinguishes. `None` is inconclusive.
pub fn search_distinguishing_test(
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    variant: PteVariant,
    depth_bound: usize,
    branching_bound: usize,
) -> Option<(Nplts, StateId)> {
    assert!(depth_bound >= 1 && branching_bound >= 1);
    let allow_fan = branching_bound >= 2;
    let roots: BTreeSet<StateId> = [s1, s2].into_iter().collect();
    for depth in 1..=depth_bound {
        let mut memo = HashMap::new();
        let base = enumerate_trees(model, &roots, depth, allow_fan, &mut memo);
        let mut candidates: Vec<TestTree> = base.clone();
        if allow_fan && depth >= 2 {
            // Initial τ fan over depth-1 base trees: an internal coin flip
            // between two sub-tests, needed to mix success probabilities.
            let inner = enumerate_trees(model, &roots, depth - 1, allow_fan, &mut memo);
            for (i, t1) in inner.iter().enumerate() {
                for t2 in &inner[i..] {
                    candidates.push(TestTree::Node(TAU.into(), vec![t1.clone(), t2.clone()]));
                }
            }
        }
        for tree in candidates {
            if !tree.has_omega() {
                continue; // success probability 0 on both sides
            }
            let (test, o) = tree_to_test(&tree);
            let suite = [(test, o)];
            if !check_pte(variant, model, s1, s2, &suite).equivalent {
                let [(test, o)] = suite;
                return Some((test, o));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_dsl;

    fn anomaly_pair() -> (Nplts, StateId, StateId) {
        let m = parse_dsl(
            "nplts anomaly_pair { designated s1, s2;
               state s1 { a -> { d1: 1 }; }
               state d1 { b -> { e1: 1 }; b -> { e2: 1 }; }
               state e1 { c -> { z1: 1 }; } state e2 { d -> { z2: 1 }; }
               state z1 { } state z2 { }
               state s2 { a -> { f1: 1 }; a -> { f2: 1 }; }
               state f1 { b -> { g1: 1 }; } state g1 { c -> { z3: 1 }; }
               state f2 { b -> { g2: 1 }; } state g2 { d -> { z4: 1 }; }
               state z3 { } state z4 { } }",
        )
        .unwrap();
        (m.clone(), m.state_by_name("s1").unwrap(), m.state_by_name("s2").unwrap())
    }

    fn fan_test() -> (Nplts, StateId) {
        let t = parse_dsl(
            "nplts o { designated o; success w1, w2;
               state o { a -> { h1: 1/2, h2: 1/2 }; }
               state h1 { b -> { i1: 1 }; } state i1 { c -> { w1: 1 }; }
               state h2 { b -> { i2: 1 }; } state i2 { d -> { w2: 1 }; }
               state w1 { } state w2 { } }",
        )
        .unwrap();
        (t.clone(), 0)
    }

    #[test]
    fn trivial_success_test() {
        let (m, s1, _) = anomaly_pair();
        let t = parse_dsl("nplts t { designated o; success o; state o { } }").unwrap();
        validate_test(&t, 0).unwrap();
        let (i, start) = interact(&m, s1, &t, 0);
        assert_eq!(i.num_states(), 1);
        assert_eq!(success_envelope(&i, start), (rat(1, 1), rat(1, 1)));
    }

    #[test]
    fn unreachable_omega_gives_zero() {
        let (m, s1, _) = anomaly_pair();
        let t = parse_dsl(
            "nplts t { designated o; success w; state o { x -> { w: 1 }; } state w { } }",
        )
        .unwrap();
        let (i, start) = interact(&m, s1, &t, 0);
        assert_eq!(success_envelope(&i, start), (rat(0, 1), rat(0, 1)));
    }

    #[test]
    fn anomaly_pair_envelopes() {
        let (m, s1, s2) = anomaly_pair();
        let (t, o) = fan_test();
        validate_test(&t, o).unwrap();
        let (i1, st1) = interact(&m, s1, &t, o);
        let (i2, st2) = interact(&m, s2, &t, o);
        // s1's scheduler controls d1's b-choice under the whole fan: both
        // branches can be steered to succeed or both to fail.
        assert_eq!(success_envelope(&i1, st1), (rat(1, 1), rat(0, 1)));
        // s2 commits at the a-choice; exactly one fan half succeeds.
        assert_eq!(success_envelope(&i2, st2), (rat(1, 2), rat(1, 2)));
    }

    #[test]
    fn anomaly_pair_pte_supinf_distinguishes() {
        let (m, s1, s2) = anomaly_pair();
        let suite = [fan_test()];
        let v = check_pte(PteVariant::SupInf, &m, s1, s2, &suite);
        assert!(!v.equivalent);
    }

    #[test]
    fn identical_states_never_distinguished() {
        let (m, s1, _) = anomaly_pair();
        let suite = [fan_test()];
        for variant in [PteVariant::SupInf, PteVariant::ForallExists, PteVariant::Tbt] {
            assert!(check_pte(variant, &m, s1, s1, &suite).equivalent);
        }
        assert!(search_distinguishing_test(&m, s1, s1, PteVariant::SupInf, 2, 2).is_none());
    }

    #[test]
    fn search_finds_fan_test() {
        let (m, s1, s2) = anomaly_pair();
        let found = search_distinguishing_test(&m, s1, s2, PteVariant::SupInf, 3, 3);
        let (test, o) = found.expect("a distinguishing test exists at depth 3");
        // Self-certifying: re-check with the returned test.
        let v = check_pte(PteVariant::SupInf, &m, s1, s2, &[(test, o)]);
        assert!(!v.equivalent);
    }

    fn tbt_pair() -> (Nplts, StateId, StateId) {
        let m = parse_dsl(
            "nplts tbt_pair { designated s1, s2;
               state s1 { a -> { mm: 1 }; }
               state mm { b -> { z1: 1 }; c -> { z2: 1 }; }
               state z1 { } state z2 { }
               state s2 { a -> { n1: 1 }; a -> { n2: 1 }; }
               state n1 { b -> { z3: 1 }; } state n2 { c -> { z4: 1 }; }
               state z3 { } state z4 { } }",
        )
        .unwrap();
        (m.clone(), m.state_by_name("s1").unwrap(), m.state_by_name("s2").unwrap())
    }

    #[test]
    fn tbt_pair_tbt_distinguishes() {
        let (m, s1, s2) = tbt_pair();
        let t = parse_dsl(
            "nplts o { designated o; success w1, w2;
               state o { a -> { o1: 1/2, o2: 1/2 }; }
               state o1 { b -> { w1: 1 }; } state o2 { c -> { w2: 1 }; }
               state w1 { } state w2 { } }",
        )
        .unwrap();
        let suite = [(t, 0)];
        // s2 admits a maximal resolution succeeding on one fan half only:
        // SCC(ab) attains 0 there, which s1 cannot attain.
        let v = check_pte(PteVariant::Tbt, &m, s1, s2, &suite);
        assert!(!v.equivalent);
        // The envelopes differ too (inf 1 vs 1/2), caught by ∀∃ as well.
        let v = check_pte(PteVariant::ForallExists, &m, s1, s2, &suite);
        assert!(!v.equivalent);
    }
}

//! Simulation and bisimulation equivalences: the four simulation
//! families PS/PCS/PFS/PRS in dis/plain/⊔ variants, the three bisimulations,
//! and the randomized-scheduler (ct) variants decided through the known
//! coincidences or an LP-augmented fixpoint.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;
use thiserror::Error;

use crate::lp::{ConstraintOp, LinearFeasibilityProblem, lp_feasible};
use crate::model::{Distribution, Nplts, StateId};
use crate::rat::Rat;
use crate::resolution::ResError;
use crate::trace_equiv::{check_supinf, Schema, TraceFamily, Verdict, Witness};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("model has {states} states, above the closed-set cap {cap} (set NPEQUIV_STATE_CAP to raise)")]
    TooManyStates { states: usize, cap: usize },
    #[error("dis-flavored relations have no randomized-scheduler decision procedure")]
    CtDisUnsupported,
    #[error(transparent)]
    Res(#[from] ResError),
}

/// Simulation family: plain, completed, failure, ready.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SimFamily {
    PS,
    PCS,
    PFS,
    PRS,
}

/// Simulation matching variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SimVariant {
    Dis,
    Plain,
    Sup,
}

/// Bisimulation variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BisimVariant {
    Dis,
    Plain,
    SupInf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationFlavor {
    Preorder,
    Equivalence,
}

/// A binary relation over states, tagged with its flavor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub pairs: BTreeSet<(StateId, StateId)>,
    pub flavor: RelationFlavor,
}

impl Relation {
    pub fn contains(&self, s: StateId, t: StateId) -> bool {
        self.pairs.contains(&(s, t))
    }
}

/// A set S' with S(S') ⊆ S'.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClosedSet {
    pub members: BTreeSet<StateId>,
}

fn state_cap() -> usize {
    std::env::var("NPEQUIV_STATE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(20)
}

/// All relation-closed subsets of `states`, by literal subset scan.
pub fn closed_sets(
    relation: &BTreeSet<(StateId, StateId)>,
    states: &[StateId],
) -> Result<Vec<ClosedSet>, SimError> {
    let cap = state_cap();
    if states.len() > cap {
        return Err(SimError::TooManyStates { states: states.len(), cap });
    }
    let domain: BTreeSet<StateId> = states.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << states.len()) {
        let members: BTreeSet<StateId> = states
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &s)| s)
            .collect();
        let closed = relation
            .iter()
            .filter(|(a, b)| domain.contains(a) && domain.contains(b))
            .all(|(a, b)| !members.contains(a) || members.contains(b));
        if closed {
            out.push(ClosedSet { members });
        }
    }
    Ok(out)
}

/// Variant-specific initial constraint on a pair: PCS
/// preserves termination, PFS preserves refusals (⟺ init(s2) ⊆ init(s1)),
/// PRS preserves ready sets.
fn init_constraint_ok(family: SimFamily, model: &Nplts, s1: StateId, s2: StateId) -> bool {
    let (i1, i2) = (model.init(s1), model.init(s2));
    match family {
        SimFamily::PS => true,
        SimFamily::PCS => !i1.is_empty() || i2.is_empty(),
        SimFamily::PFS => i2.is_subset(&i1),
        SimFamily::PRS => i1 == i2,
    }
}

fn succ_map(n: usize, r: &BTreeSet<(StateId, StateId)>) -> Vec<Vec<StateId>> {
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in r {
        succ[a].push(b);
    }
    succ
}

fn mass_in(d: &Distribution, set: &BTreeSet<StateId>) -> Rat {
    d.support
        .iter()
        .filter(|(s, _)| set.contains(s))
        .fold(Rat::zero(), |acc, (_, p)| acc + p)
}

/// The subsets U of the joint support T that arise as S' ∩ T for some
/// R-closed S'. D(S') depends only on S' ∩ T, so quantifying over these is
/// equivalent to quantifying over all closed sets without the 2^|S| scan.
fn realizable_projections(
    support: &BTreeSet<StateId>,
    succ: &[Vec<StateId>],
) -> Vec<BTreeSet<StateId>> {
    let t: Vec<StateId> = support.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << t.len()) {
        let u: BTreeSet<StateId> = t
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &s)| s)
            .collect();
        // Minimal closed superset of U: closure under R-successors. U is
        // realizable iff that closure adds nothing new inside T.
        let mut closure: BTreeSet<StateId> = u.clone();
        let mut frontier: Vec<StateId> = u.iter().copied().collect();
        let mut ok = true;
        'bfs: while let Some(s) = frontier.pop() {
            for &nxt in &succ[s] {
                if closure.insert(nxt) {
                    if support.contains(&nxt) && !u.contains(&nxt) {
                        ok = false;
                        break 'bfs;
                    }
                    frontier.push(nxt);
                }
            }
        }
        if ok {
            out.push(u);
        }
    }
    out
}

/// One simulation step condition for the pair (s1, s2) under the current
/// relation. Plain and Sup coincide pointwise: for a
/// fixed closed set, "each D1 is bounded by some D2" is exactly
/// "max D1 ≤ max D2" (∼π = ∼π,⊔ pointwise).
fn sim_step_ok(
    variant: SimVariant,
    model: &Nplts,
    succ: &[Vec<StateId>],
    s1: StateId,
    s2: StateId,
) -> bool {
    for a in model.init(s1) {
        let d1s: Vec<&Distribution> = model
            .transitions_from(s1)
            .filter(|t| t.label == a)
            .map(|t| &t.target)
            .collect();
        let d2s: Vec<&Distribution> = model
            .transitions_from(s2)
            .filter(|t| t.label == a)
            .map(|t| &t.target)
            .collect();
        if d2s.is_empty() {
            return false;
        }
        let mut support: BTreeSet<StateId> = BTreeSet::new();
        for d in d1s.iter().chain(&d2s) {
            support.extend(d.support.keys().copied());
        }
        let projections = realizable_projections(&support, succ);
        match variant {
            SimVariant::Dis => {
                for d1 in &d1s {
                    let matched = d2s.iter().any(|d2| {
                        projections
                            .iter()
                            .all(|u| mass_in(d1, u) <= mass_in(d2, u))
                    });
                    if !matched {
                        return false;
                    }
                }
            }
            SimVariant::Plain | SimVariant::Sup => {
                for u in &projections {
                    let max1 = d1s.iter().map(|d| mass_in(d, u)).max().expect("nonempty");
                    let max2 = d2s.iter().map(|d| mass_in(d, u)).max().expect("nonempty");
                    if max1 > max2 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Greatest simulation preorder of the given variant: Jacobi-style deletion
/// from the constraint-filtered full relation.
pub fn largest_simulation(
    family: SimFamily,
    variant: SimVariant,
    model: &Nplts,
) -> Relation {
    let n = model.num_states();
    let mut r: BTreeSet<(StateId, StateId)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| init_constraint_ok(family, model, a, b))
        .collect();
    loop {
        let succ = succ_map(n, &r);
        let bad: Vec<(StateId, StateId)> = r
            .iter()
            .filter(|&&(a, b)| !sim_step_ok(variant, model, &succ, a, b))
            .copied()
            .collect();
        if bad.is_empty() {
            break;
        }
        for p in bad {
            r.remove(&p);
        }
    }
    // Post-fixpoint verification: the result must itself be a simulation
    // preorder.
    let succ = succ_map(n, &r);
    debug_assert!(r.iter().all(|&(a, b)| sim_step_ok(variant, model, &succ, a, b)));
    debug_assert!((0..n).all(|s| r.contains(&(s, s))));
    debug_assert!(r.iter().all(|&(a, b)| r
        .iter()
        .filter(|&&(x, _)| x == b)
        .all(|&(_, c)| r.contains(&(a, c)))));
    Relation { pairs: r, flavor: RelationFlavor::Preorder }
}

/// Kernel check: (s1, s2) and (s2, s1) in the largest simulation preorder.
pub fn check_simulation(
    family: SimFamily,
    variant: SimVariant,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
) -> (Verdict, Relation) {
    let rel = largest_simulation(family, variant, model);
    let verdict = kernel_verdict(&rel.pairs, s1, s2);
    (verdict, rel)
}

fn kernel_verdict(pairs: &BTreeSet<(StateId, StateId)>, s1: StateId, s2: StateId) -> Verdict {
    if !pairs.contains(&(s1, s2)) {
        Verdict::distinct(Witness::KernelFailure { missing: (s1, s2) }, false)
    } else if !pairs.contains(&(s2, s1)) {
        Verdict::distinct(Witness::KernelFailure { missing: (s2, s1) }, false)
    } else {
        Verdict::equal(false)
    }
}

/// Pairwise block-compatibility predicates for bisimulation refinement. All
/// quantifications over class-groups G range over subsets of the blocks
/// touched by either state's transitions; masses outside are zero on both
/// sides, so this loses nothing.
fn bisim_compatible(
    variant: BisimVariant,
    ct: bool,
    model: &Nplts,
    block: &[usize],
    s: StateId,
    t: StateId,
) -> bool {
    let actions: BTreeSet<String> = model.init(s).union(&model.init(t)).cloned().collect();
    for a in actions {
        let ds: Vec<&Distribution> = model
            .transitions_from(s)
            .filter(|tr| tr.label == a)
            .map(|tr| &tr.target)
            .collect();
        let dt: Vec<&Distribution> = model
            .transitions_from(t)
            .filter(|tr| tr.label == a)
            .map(|tr| &tr.target)
            .collect();
        if ds.is_empty() != dt.is_empty() {
            return false;
        }
        if ds.is_empty() {
            continue;
        }
        // Blocks touched by either side's a-transitions.
        let blocks: BTreeSet<usize> = ds
            .iter()
            .chain(&dt)
            .flat_map(|d| d.support.keys().map(|&x| block[x]))
            .collect();
        let blocks: Vec<usize> = blocks.into_iter().collect();
        let class_mass = |d: &Distribution, b: usize| -> Rat {
            d.support
                .iter()
                .filter(|(x, _)| block[**x] == b)
                .fold(Rat::zero(), |acc, (_, p)| acc + p)
        };
        if ct {
            // PB^ct: each ordinary transition matched by a convex combination
            // of the other side's basis, exactly per block (hence per group,
            // by additivity).
            for (mine, basis) in [(&ds, &dt), (&dt, &ds)] {
                for d in mine.iter() {
                    let mut lp = LinearFeasibilityProblem::convex_combination(basis.len());
                    for &b in &blocks {
                        let coeffs: Vec<Rat> = basis.iter().map(|e| class_mass(e, b)).collect();
                        lp.push(coeffs, ConstraintOp::Eq, class_mass(d, b));
                    }
                    if lp_feasible(&lp).is_none() {
                        return false;
                    }
                }
            }
            continue;
        }
        match variant {
            BisimVariant::Dis => {
                // Per-transition matching with equal mass on every block
                // (equality on all groups follows by additivity).
                let sig = |dd: &[&Distribution]| -> BTreeSet<Vec<Rat>> {
                    dd.iter()
                        .map(|d| blocks.iter().map(|&b| class_mass(d, b)).collect())
                        .collect()
                };
                if sig(&ds) != sig(&dt) {
                    return false;
                }
            }
            BisimVariant::Plain | BisimVariant::SupInf => {
                // Sup of a sum is not the sum of sups: iterate over groups.
                for mask in 0u64..(1u64 << blocks.len()) {
                    let group: BTreeSet<usize> = blocks
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &b)| b)
                        .collect();
                    let mass = |d: &Distribution| -> Rat {
                        d.support
                            .iter()
                            .filter(|(x, _)| group.contains(&block[**x]))
                            .fold(Rat::zero(), |acc, (_, p)| acc + p)
                    };
                    let vs: BTreeSet<Rat> = ds.iter().map(|d| mass(d)).collect();
                    let vt: BTreeSet<Rat> = dt.iter().map(|d| mass(d)).collect();
                    let ok = match variant {
                        BisimVariant::Plain => vs == vt,
                        BisimVariant::SupInf => {
                            vs.iter().max() == vt.iter().max()
                                && vs.iter().min() == vt.iter().min()
                        }
                        BisimVariant::Dis => unreachable!(),
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn bisim_partition(variant: BisimVariant, ct: bool, model: &Nplts) -> Vec<usize> {
    let n = model.num_states();
    let mut block = vec![0usize; n];
    loop {
        // Refine every block by pairwise compatibility (an equivalence for
        // each of these conditions, so greedy grouping is sound).
        let mut next = vec![usize::MAX; n];
        let mut reps: Vec<StateId> = Vec::new();
        for s in 0..n {
            let found = reps.iter().position(|&r| {
                block[r] == block[s] && bisim_compatible(variant, ct, model, &block, r, s)
            });
            match found {
                Some(g) => next[s] = g,
                None => {
                    reps.push(s);
                    next[s] = reps.len() - 1;
                }
            }
        }
        if next == block {
            return block;
        }
        block = next;
    }
}

/// Greatest-fixpoint bisimulation of the given variant; verdict is
/// same-block membership.
pub fn check_bisimulation(
    variant: BisimVariant,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
) -> (Verdict, Relation) {
    check_bisim_inner(variant, false, model, s1, s2)
}

fn check_bisim_inner(
    variant: BisimVariant,
    ct: bool,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
) -> (Verdict, Relation) {
    let block = bisim_partition(variant, ct, model);
    let n = model.num_states();
    // Post-fixpoint verification on the kernel pair's blocks.
    debug_assert!((0..n).all(|a| (0..n)
        .filter(|&b| block[a] == block[b])
        .all(|b| bisim_compatible(variant, ct, model, &block, a, b))));
    let pairs: BTreeSet<(StateId, StateId)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| block[a] == block[b])
        .collect();
    let verdict = if block[s1] == block[s2] {
        Verdict::equal(false)
    } else {
        Verdict::distinct(Witness::KernelFailure { missing: (s1, s2) }, false)
    };
    (verdict, Relation { pairs, flavor: RelationFlavor::Equivalence })
}

/// A relation id for ct (randomized-scheduler) checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtRelation {
    Trace(TraceFamily, Schema),
    Sim(SimFamily, SimVariant),
    Bisim(BisimVariant),
}

/// Decides the ct variant of a relation. Known collapses reduce every plain/⊔⊓ ct
/// relation onto a deterministic one except PB^ct, which gets the
/// LP-augmented fixpoint; dis flavors are refused.
pub fn check_ct_variant(
    relation: CtRelation,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    depth: Option<usize>,
) -> Result<Verdict, SimError> {
    match relation {
        CtRelation::Trace(_, Schema::FullyMatching) => Err(SimError::CtDisUnsupported),
        CtRelation::Sim(_, SimVariant::Dis) => Err(SimError::CtDisUnsupported),
        CtRelation::Bisim(BisimVariant::Dis) => Err(SimError::CtDisUnsupported),
        // ∼π^ct = ∼π,⊔⊓^ct = ∼π,⊔⊓.
        CtRelation::Trace(family, _) => Ok(check_supinf(family, model, s1, s2, depth)?),
        // ∼π,⊔^ct = ∼π,⊔ and ∼π^ct = ∼π,⊔ for simulations.
        CtRelation::Sim(family, _) => {
            Ok(check_simulation(family, SimVariant::Sup, model, s1, s2).0)
        }
        // PB,⊔⊓^ct = PB,⊔⊓.
        CtRelation::Bisim(BisimVariant::SupInf) => {
            Ok(check_bisimulation(BisimVariant::SupInf, model, s1, s2).0)
        }
        // Genuine LP-augmented fixpoint for PB^ct.
        CtRelation::Bisim(BisimVariant::Plain) => {
            Ok(check_bisim_inner(BisimVariant::Plain, true, model, s1, s2).0)
        }
    }
}

/// Naive reference fixpoint for testing: same deletion loop but quantifying
/// over *all* closed sets of the full state space (cap-limited).
pub fn largest_simulation_bruteforce(
    family: SimFamily,
    variant: SimVariant,
    model: &Nplts,
) -> Result<Relation, SimError> {
    let n = model.num_states();
    let states: Vec<StateId> = (0..n).collect();
    let mut r: BTreeSet<(StateId, StateId)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| init_constraint_ok(family, model, a, b))
        .collect();
    loop {
        let closed = closed_sets(&r, &states)?;
        let ok = |a: StateId, b: StateId| -> bool {
            for act in model.init(a) {
                let d1s: Vec<&Distribution> = model
                    .transitions_from(a)
                    .filter(|t| t.label == act)
                    .map(|t| &t.target)
                    .collect();
                let d2s: Vec<&Distribution> = model
                    .transitions_from(b)
                    .filter(|t| t.label == act)
                    .map(|t| &t.target)
                    .collect();
                if d2s.is_empty() {
                    return false;
                }
                let holds = match variant {
                    SimVariant::Dis => d1s.iter().all(|d1| {
                        d2s.iter().any(|d2| {
                            closed
                                .iter()
                                .all(|c| mass_in(d1, &c.members) <= mass_in(d2, &c.members))
                        })
                    }),
                    SimVariant::Plain | SimVariant::Sup => closed.iter().all(|c| {
                        let m1 = d1s.iter().map(|d| mass_in(d, &c.members)).max().unwrap();
                        let m2 = d2s.iter().map(|d| mass_in(d, &c.members)).max().unwrap();
                        m1 <= m2
                    }),
                };
                if !holds {
                    return false;
                }
            }
            true
        };
        let bad: Vec<(StateId, StateId)> =
            r.iter().filter(|&&(a, b)| !ok(a, b)).copied().collect();
        if bad.is_empty() {
            return Ok(Relation { pairs: r, flavor: RelationFlavor::Preorder });
        }
        for p in bad {
            r.remove(&p);
        }
    }
}

/// Quotient view of an equivalence relation, for JSON output.
pub fn equivalence_classes(rel: &Relation, n: usize) -> Vec<Vec<StateId>> {
    let mut seen: BTreeMap<StateId, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<StateId>> = Vec::new();
    for s in 0..n {
        let rep = (0..n).find(|&t| rel.contains(s, t) && rel.contains(t, s)).unwrap_or(s);
        let entry = seen.entry(rep).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[*entry].push(s);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_dsl;

    fn anomaly_pair() -> (Nplts, StateId, StateId) {
        let m = parse_dsl(
            "nplts anomaly_pair { designated s1, s2;
               state s1 { a -> { u: 1 }; a -> { v: 1 }; }
               state u { b -> { x1: 1 }; }
               state v { } state x1 { }
               state s2 { a -> { w: 1 }; }
               state w { b -> { x2: 1 }; } state x2 { } }",
        )
        .unwrap();
        (m.clone(), m.state_by_name("s1").unwrap(), m.state_by_name("s2").unwrap())
    }

    #[test]
    fn closed_sets_identity_and_total() {
        let states: Vec<StateId> = (0..3).collect();
        let identity: BTreeSet<_> = (0..3).map(|s| (s, s)).collect();
        assert_eq!(closed_sets(&identity, &states).unwrap().len(), 8);
        let total: BTreeSet<_> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        let cs = closed_sets(&total, &states).unwrap();
        assert_eq!(cs.len(), 2); // ∅ and everything
    }

    #[test]
    fn closed_sets_cap() {
        let states: Vec<StateId> = (0..25).collect();
        let identity: BTreeSet<_> = (0..25).map(|s| (s, s)).collect();
        assert!(matches!(
            closed_sets(&identity, &states),
            Err(SimError::TooManyStates { states: 25, cap: 20 })
        ));
    }

    #[test]
    fn identity_in_kernel_everywhere() {
        let (m, s1, _) = anomaly_pair();
        for family in [SimFamily::PS, SimFamily::PCS, SimFamily::PFS, SimFamily::PRS] {
            for variant in [SimVariant::Dis, SimVariant::Plain, SimVariant::Sup] {
                assert!(check_simulation(family, variant, &m, s1, s1).0.equivalent);
            }
        }
        for variant in [BisimVariant::Dis, BisimVariant::Plain, BisimVariant::SupInf] {
            assert!(check_bisimulation(variant, &m, s1, s1).0.equivalent);
        }
    }

    #[test]
    fn anomaly_pair_ps_dis_holds_pcs_fails() {
        let (m, s1, s2) = anomaly_pair();
        assert!(check_simulation(SimFamily::PS, SimVariant::Dis, &m, s1, s2).0.equivalent);
        for variant in [SimVariant::Dis, SimVariant::Plain, SimVariant::Sup] {
            let v = check_simulation(SimFamily::PCS, variant, &m, s1, s2).0;
            assert!(!v.equivalent, "{variant:?}");
        }
    }

    #[test]
    fn branch_pair_pcs_dis_holds_pfs_sup_fails() {
        let m = parse_dsl(
            "nplts branch_pair { designated s1, s2;
               state s1 { a -> { t1: 1 }; a -> { t2: 1 }; }
               state t1 { b -> { e1: 1 }; }
               state t2 { b -> { e2: 1 }; c -> { e3: 1 }; }
               state e1 { } state e2 { } state e3 { }
               state s2 { a -> { u: 1 }; }
               state u { b -> { e4: 1 }; c -> { e5: 1 }; }
               state e4 { } state e5 { } }",
        )
        .unwrap();
        let (s1, s2) = (m.state_by_name("s1").unwrap(), m.state_by_name("s2").unwrap());
        assert!(check_simulation(SimFamily::PCS, SimVariant::Dis, &m, s1, s2).0.equivalent);
        assert!(!check_simulation(SimFamily::PFS, SimVariant::Sup, &m, s1, s2).0.equivalent);
    }

    fn sim_pair() -> (Nplts, StateId, StateId) {
        let m = parse_dsl(
            "nplts sim_pair { designated s1, s2;
               state s1 { a -> { A: 1 }; a -> { B: 1 }; }
               state A { b -> { C: 1 }; }
               state B { b -> { D: 1 }; b -> { E: 1 }; }
               state C { c -> { z1: 1 }; }
               state D { c -> { z2: 1 }; }
               state E { } state z1 { } state z2 { }
               state s2 { a -> { B2: 1 }; }
               state B2 { b -> { D2: 1 }; b -> { E2: 1 }; }
               state D2 { c -> { z3: 1 }; }
               state E2 { } state z3 { } }",
        )
        .unwrap();
        (m.clone(), m.state_by_name("s1").unwrap(), m.state_by_name("s2").unwrap())
    }

    #[test]
    fn sim_pair_prs_dis_holds_pb_fails() {
        let (m, s1, s2) = sim_pair();
        for variant in [SimVariant::Dis, SimVariant::Plain, SimVariant::Sup] {
            assert!(
                check_simulation(SimFamily::PRS, variant, &m, s1, s2).0.equivalent,
                "{variant:?}"
            );
        }
        for variant in [BisimVariant::Dis, BisimVariant::Plain, BisimVariant::SupInf] {
            assert!(!check_bisimulation(variant, &m, s1, s2).0.equivalent, "{variant:?}");
        }
    }

    fn lottery_pair() -> (Nplts, StateId, StateId) {
        let m = parse_dsl(
            "nplts lottery_pair { designated s1, s2;
               state s1 { offer -> { w1a: 7/10, w2a: 3/10 };
                          offer -> { w1b: 1/2, w2b: 1/2 };
                          offer -> { w1c: 3/10, w2c: 7/10 }; }
               state w1a { win1 -> { d1: 1 }; } state w2a { win2 -> { d2: 1 }; }
               state w1b { win1 -> { d3: 1 }; } state w2b { win2 -> { d4: 1 }; }
               state w1c { win1 -> { d5: 1 }; } state w2c { win2 -> { d6: 1 }; }
               state d1 { } state d2 { } state d3 { } state d4 { } state d5 { } state d6 { }
               state s2 { offer -> { v1a: 7/10, v2a: 3/10 };
                          offer -> { v1c: 3/10, v2c: 7/10 }; }
               state v1a { win1 -> { e1: 1 }; } state v2a { win2 -> { e2: 1 }; }
               state v1c { win1 -> { e3: 1 }; } state v2c { win2 -> { e4: 1 }; }
               state e1 { } state e2 { } state e3 { } state e4 { } }",
        )
        .unwrap();
        (m.clone(), m.state_by_name("s1").unwrap(), m.state_by_name("s2").unwrap())
    }

    #[test]
    fn lottery_pair_pb_fails_but_ct_bisim_holds() {
        let (m, s1, s2) = lottery_pair();
        assert!(!check_bisimulation(BisimVariant::Plain, &m, s1, s2).0.equivalent);
        let v = check_ct_variant(CtRelation::Bisim(BisimVariant::Plain), &m, s1, s2, None)
            .unwrap();
        assert!(v.equivalent);
    }

    #[test]
    fn ct_dis_flavors_are_refused() {
        let (m, s1, s2) = anomaly_pair();
        for rel in [
            CtRelation::Trace(TraceFamily::Tr, Schema::FullyMatching),
            CtRelation::Sim(SimFamily::PS, SimVariant::Dis),
            CtRelation::Bisim(BisimVariant::Dis),
        ] {
            assert_eq!(
                check_ct_variant(rel, &m, s1, s2, None).unwrap_err(),
                SimError::CtDisUnsupported
            );
        }
    }

    #[test]
    fn ct_trace_supinf_delegates() {
        let (m, s1, s2) = anomaly_pair();
        let ct = check_ct_variant(
            CtRelation::Trace(TraceFamily::Tr, Schema::Extremal),
            &m,
            s1,
            s2,
            None,
        )
        .unwrap();
        let det = check_supinf(TraceFamily::Tr, &m, s1, s2, None).unwrap();
        assert_eq!(ct.equivalent, det.equivalent);
        assert!(ct.equivalent);
    }

    #[test]
    fn projection_matches_bruteforce() {
        for (m, s1, s2) in [anomaly_pair(), sim_pair()] {
            for family in [SimFamily::PS, SimFamily::PCS, SimFamily::PFS, SimFamily::PRS] {
                for variant in [SimVariant::Dis, SimVariant::Plain] {
                    let fast = largest_simulation(family, variant, &m);
                    let slow = largest_simulation_bruteforce(family, variant, &m).unwrap();
                    assert_eq!(fast.pairs, slow.pairs, "{family:?}/{variant:?} {}", m.name);
                    let _ = (s1, s2);
                }
            }
        }
    }
}

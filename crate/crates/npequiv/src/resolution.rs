//! Deterministic-scheduler resolutions, computation probabilities, and the
//! combined-transition basis of randomized schedulers.

use std::collections::BTreeMap;

use num::{One, Zero};
use thiserror::Error;

use crate::model::{Nplts, StateId, Transition};
use crate::rat::Rat;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ResError {
    #[error("model has a cycle reachable from the start state; supply a depth bound")]
    CyclicNeedsBound,
    #[error("depth bound {bound} is smaller than |α| = {alpha_len}")]
    BoundTooSmall { bound: usize, alpha_len: usize },
    #[error("computation set is not prefix-free")]
    NotPrefixFree,
}

/// The scheduler's move at one node of the unfolding: the chosen transition's
/// label and the child nodes with their probabilities (pointwise equal to the
/// model distribution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResStep {
    pub label: String,
    pub children: Vec<(usize, Rat)>,
}

/// One node of a resolution tree; `corr` maps it back to a model state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResNode {
    pub corr: StateId,
    pub step: Option<ResStep>,
}

/// A resolution: tree-shaped fully probabilistic unfolding with at most one
/// transition per node. Node 0 is the root z_s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub nodes: Vec<ResNode>,
}

/// Which resolutions to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResKind {
    All,
    Maximal,
}

/// Result of an enumeration; `bounded` is set when a depth bound truncated a
/// cyclic model (sound for distinguishing only).
#[derive(Debug, Clone)]
pub struct ResolutionSet {
    pub items: Vec<Resolution>,
    pub bounded: bool,
}

/// Canonical tree term used during enumeration; ordering gives canonical
/// deduplication of isomorphic scheduler outcomes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Tree {
    Stop(StateId),
    Step(StateId, String, Vec<(Rat, Tree)>),
}

fn tree_to_resolution(t: &Tree) -> Resolution {
    fn go(t: &Tree, nodes: &mut Vec<ResNode>) -> usize {
        match t {
            Tree::Stop(s) => {
                nodes.push(ResNode { corr: *s, step: None });
                nodes.len() - 1
            }
            Tree::Step(s, label, children) => {
                let idx = nodes.len();
                nodes.push(ResNode { corr: *s, step: None });
                let mut kids = Vec::new();
                for (p, sub) in children {
                    let c = go(sub, nodes);
                    kids.push((c, p.clone()));
                }
                nodes[idx].step = Some(ResStep { label: label.clone(), children: kids });
                idx
            }
        }
    }
    let mut nodes = Vec::new();
    go(t, &mut nodes);
    Resolution { nodes }
}

fn subtrees(model: &Nplts, s: StateId, depth: usize, kind: ResKind) -> Vec<Tree> {
    let mut out = Vec::new();
    let stop_allowed = match kind {
        ResKind::All => true,
        // A maximal resolution may only stop where the model is stuck — or
        // where the bound cuts enumeration off.
        ResKind::Maximal => model.is_terminal(s) || depth == 0,
    };
    if stop_allowed {
        out.push(Tree::Stop(s));
    }
    if depth == 0 {
        return out;
    }
    for t in model.transitions_from(s) {
        // Cartesian product of sub-choices over the distribution's support.
        let mut combos: Vec<Vec<(Rat, Tree)>> = vec![Vec::new()];
        for (&child, p) in &t.target.support {
            let subs = subtrees(model, child, depth - 1, kind);
            let mut next = Vec::with_capacity(combos.len() * subs.len());
            for combo in &combos {
                for sub in &subs {
                    let mut c2 = combo.clone();
                    c2.push((p.clone(), sub.clone()));
                    next.push(c2);
                }
            }
            combos = next;
        }
        for combo in combos {
            out.push(Tree::Step(s, t.label.clone(), combo));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Enumerates the deterministic resolutions of `s`, duplicate-free
/// up to tree isomorphism. Acyclic models need no depth bound; cyclic models
/// refuse to enumerate without one.
pub fn enumerate_resolutions(
    model: &Nplts,
    s: StateId,
    kind: ResKind,
    depth: Option<usize>,
) -> Result<ResolutionSet, ResError> {
    let (depth, bounded) = match model.longest_path_from(s) {
        Some(d) => match depth {
            Some(b) if b < d => (b, true),
            _ => (d, false),
        },
        None => match depth {
            Some(b) => (b, true),
            None => return Err(ResError::CyclicNeedsBound),
        },
    };
    let items = subtrees(model, s, depth, kind)
        .iter()
        .map(tree_to_resolution)
        .collect();
    Ok(ResolutionSet { items, bounded })
}

impl Resolution {
    pub fn root_corr(&self) -> StateId {
        self.nodes[0].corr
    }

    /// Leaves (nodes without a chosen transition) paired with the action trace
    /// and probability of the maximal computation reaching them.
    pub fn maximal_computations(&self) -> Vec<(usize, Vec<String>, Rat)> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, Vec::new(), Rat::one())];
        while let Some((n, trace, p)) = stack.pop() {
            match &self.nodes[n].step {
                None => out.push((n, trace, p)),
                Some(step) => {
                    for (child, cp) in &step.children {
                        let mut t2 = trace.clone();
                        t2.push(step.label.clone());
                        stack.push((*child, t2, &p * cp));
                    }
                }
            }
        }
        out
    }

    /// Sum of the probabilities of all maximal computations; 1 for any
    /// resolution (conservation).
    pub fn total_mass(&self) -> Rat {
        self.maximal_computations()
            .into_iter()
            .fold(Rat::zero(), |acc, (_, _, p)| acc + p)
    }

    /// Checks the projection invariant: every node's chosen step
    /// projects via corr onto a model transition with pointwise-equal
    /// probabilities.
    pub fn projects_onto(&self, model: &Nplts) -> bool {
        self.nodes.iter().all(|n| match &n.step {
            None => true,
            Some(step) => {
                let mut induced: BTreeMap<StateId, Rat> = BTreeMap::new();
                for (child, p) in &step.children {
                    *induced
                        .entry(self.nodes[*child].corr)
                        .or_insert_with(Rat::zero) += p;
                }
                model
                    .transitions_from(n.corr)
                    .any(|t| t.label == step.label && t.target.support == induced)
            }
        })
    }
}

/// A computation inside a resolution: a chain of `(node, action, node)` steps
/// starting at the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Computation {
    pub steps: Vec<(usize, String, usize)>,
}

impl Computation {
    /// prob(c) — the product of the per-step probabilities.
    pub fn prob(&self, z: &Resolution) -> Rat {
        let mut p = Rat::one();
        for (from, _, to) in &self.steps {
            let step = z.nodes[*from].step.as_ref().expect("step exists");
            let cp = step
                .children
                .iter()
                .find(|(c, _)| c == to)
                .map(|(_, p)| p.clone())
                .expect("child exists");
            p *= cp;
        }
        p
    }

    fn is_prefix_of(&self, other: &Computation) -> bool {
        self.steps.len() < other.steps.len() && other.steps[..self.steps.len()] == self.steps[..]
    }
}

/// prob(C) = Σ_{c∈C} prob(c) for a prefix-free set of computations of one
/// resolution.
pub fn prob_of(computations: &[Computation], z: &Resolution) -> Result<Rat, ResError> {
    for (i, a) in computations.iter().enumerate() {
        for b in &computations[i + 1..] {
            if a.is_prefix_of(b) || b.is_prefix_of(a) || a == b {
                return Err(ResError::NotPrefixFree);
            }
        }
    }
    Ok(computations
        .iter()
        .fold(Rat::zero(), |acc, c| acc + c.prob(z)))
}

/// Keeps the resolutions with no maximal computation stranded on a proper
/// prefix of α while the model realizes α from the root (see
/// the design note on the chosen reading).
pub fn alpha_restrict(set: &ResolutionSet, model: &Nplts, alpha: &[String]) -> ResolutionSet {
    let items = set
        .items
        .iter()
        .filter(|z| {
            if alpha.is_empty() || !model.realizes_trace(z.root_corr(), alpha) {
                return true;
            }
            !z.maximal_computations().iter().any(|(_, trace, _)| {
                trace.len() < alpha.len()
                    && trace
                        .iter()
                        .zip(alpha)
                        .all(|(x, y)| x == y)
            })
        })
        .cloned()
        .collect();
    ResolutionSet { items, bounded: set.bounded }
}

/// The generator set of combined a-transitions of `s`: all ordinary
/// a-transitions; every combined transition is a convex combination of these.
pub fn combined_transitions_basis<'m>(
    model: &'m Nplts,
    s: StateId,
    a: &str,
) -> Vec<&'m Transition> {
    model.transitions_from(s).filter(|t| t.label == a).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_dsl;
    use crate::rat::rat;

    fn two_a_choices() -> Nplts {
        // s1 with a→t1 (t1: b) and a→t2 (t2: b, c).
        parse_dsl(
            "nplts two_a_choices { designated s1;
               state s1 { a -> { t1: 1 }; a -> { t2: 1 }; }
               state t1 { b -> { e1: 1 }; }
               state t2 { b -> { e2: 1 }; c -> { e3: 1 }; }
               state e1 { } state e2 { } state e3 { } }",
        )
        .unwrap()
    }

    #[test]
    fn one_state_model_has_one_resolution() {
        let m = parse_dsl("nplts T { designated s; state s { } }").unwrap();
        let rs = enumerate_resolutions(&m, 0, ResKind::All, None).unwrap();
        assert_eq!(rs.items.len(), 1);
        assert!(rs.items[0].nodes[0].step.is_none());
    }

    #[test]
    fn two_a_choices_has_three_maximal_resolutions() {
        let m = two_a_choices();
        let rs = enumerate_resolutions(&m, 0, ResKind::Maximal, None).unwrap();
        assert_eq!(rs.items.len(), 3);
        for z in &rs.items {
            assert!(z.projects_onto(&m));
            assert_eq!(z.total_mass(), rat(1, 1));
        }
    }

    #[test]
    fn fully_probabilistic_model_has_one_maximal_resolution() {
        let m = parse_dsl(
            "nplts fp { designated s; state s { a -> { t: 1/2, u: 1/2 }; }
              state t { b -> { v: 1 }; } state u { } state v { } }",
        )
        .unwrap();
        let rs = enumerate_resolutions(&m, 0, ResKind::Maximal, None).unwrap();
        assert_eq!(rs.items.len(), 1);
    }

    #[test]
    fn cyclic_model_needs_bound() {
        let m = parse_dsl(
            "nplts cyc { designated s; state s { a -> { s: 1 }; } }",
        )
        .unwrap();
        assert_eq!(
            enumerate_resolutions(&m, 0, ResKind::All, None).unwrap_err(),
            ResError::CyclicNeedsBound
        );
        let rs = enumerate_resolutions(&m, 0, ResKind::Maximal, Some(2)).unwrap();
        assert!(rs.bounded);
        assert_eq!(rs.items.len(), 1);
    }

    fn dead_end_pair() -> Nplts {
        // a→u (u: b→x), a→v (v terminal)
        parse_dsl(
            "nplts dead_end { designated s1;
               state s1 { a -> { u: 1 }; a -> { v: 1 }; }
               state u { b -> { x: 1 }; }
               state v { } state x { } }",
        )
        .unwrap()
    }

    #[test]
    fn alpha_restrict_drops_dead_end() {
        let m = dead_end_pair();
        let max = enumerate_resolutions(&m, 0, ResKind::Maximal, None).unwrap();
        assert_eq!(max.items.len(), 2);
        let ab = vec!["a".to_string(), "b".to_string()];
        let restricted = alpha_restrict(&max, &m, &ab);
        // The resolution choosing the right-hand a (terminal child) is
        // excluded; only the left one remains.
        assert_eq!(restricted.items.len(), 1);
        let kept = &restricted.items[0];
        assert!(kept
            .maximal_computations()
            .iter()
            .any(|(_, t, _)| t == &ab));

        let a = vec!["a".to_string()];
        let restricted_a = alpha_restrict(&max, &m, &a);
        assert_eq!(restricted_a.items.len(), 2);

        let eps: Vec<String> = Vec::new();
        assert_eq!(alpha_restrict(&max, &m, &eps).items.len(), 2);
    }

    #[test]
    fn prob_of_checks_prefix_freeness() {
        let m = dead_end_pair();
        let rs = enumerate_resolutions(&m, 0, ResKind::Maximal, None).unwrap();
        let full = rs
            .items
            .iter()
            .find(|z| z.maximal_computations().iter().any(|(_, t, _)| t.len() == 2))
            .unwrap();
        let empty = Computation { steps: vec![] };
        assert_eq!(prob_of(&[empty.clone()], full).unwrap(), rat(1, 1));

        // Reconstruct the two-step computation and its one-step prefix.
        let step1 = full.nodes[0].step.as_ref().unwrap();
        let mid = step1.children[0].0;
        let step2 = full.nodes[mid].step.as_ref().unwrap();
        let leaf = step2.children[0].0;
        let c1 = Computation { steps: vec![(0, "a".into(), mid)] };
        let c2 = Computation {
            steps: vec![(0, "a".into(), mid), (mid, "b".into(), leaf)],
        };
        assert_eq!(prob_of(&[c2.clone()], full).unwrap(), rat(1, 1));
        assert_eq!(prob_of(&[c1, c2], full).unwrap_err(), ResError::NotPrefixFree);
    }

    #[test]
    fn basis_is_the_ordinary_transitions() {
        let m = two_a_choices();
        assert_eq!(combined_transitions_basis(&m, 0, "a").len(), 2);
        assert_eq!(combined_transitions_basis(&m, 0, "b").len(), 0);
        assert!(combined_transitions_basis(&m, 2, "b").len() == 1);
    }

    #[test]
    fn all_resolutions_include_partial_ones() {
        let m = two_a_choices();
        let all = enumerate_resolutions(&m, 0, ResKind::All, None).unwrap();
        // stop; a→t1 {stop | b}; a→t2 {stop | b | c}: 1 + 2 + 3 = 6.
        assert_eq!(all.items.len(), 6);
    }
}

//! Exact-rational NPLTS data model with validation, disjoint union,
//! and DOT export.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num::{One, Zero};
use thiserror::Error;

use crate::rat::{fmt_exact, Rat};

/// Index of a state inside its [`Nplts`].
pub type StateId = usize;

/// The reserved internal action, only legal in test models.
pub const TAU: &str = "tau";

/// Kind of an action label: ordinary visible action, or the internal test
/// action τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ActionKind {
    Visible,
    Internal,
}

/// An action label. Kind is derived from the name: `tau` is internal,
/// everything else visible.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Action {
    pub name: String,
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        if self.name == TAU {
            ActionKind::Internal
        } else {
            ActionKind::Visible
        }
    }
}

/// A discrete probability distribution over states: positive rational weights
/// summing to exactly one, non-empty support.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Distribution {
    pub support: BTreeMap<StateId, Rat>,
}

impl Distribution {
    /// Probability mass the distribution assigns to a set of states.
    pub fn mass<'a>(&self, states: impl IntoIterator<Item = &'a StateId>) -> Rat {
        let mut total = Rat::zero();
        for s in states {
            if let Some(p) = self.support.get(s) {
                total += p;
            }
        }
        total
    }
}

/// One transition `source –label→ target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: StateId,
    pub label: String,
    pub target: Distribution,
}

/// Raw, unvalidated model description as produced by the parser or built in
/// code; state references are by name.
#[derive(Debug, Clone, Default)]
pub struct RawNplts {
    pub name: String,
    /// Declaration order of states; names must be unique.
    pub states: Vec<String>,
    pub designated: Vec<String>,
    /// `(source, label, [(target, prob)])`
    pub transitions: Vec<(String, String, Vec<(String, Rat)>)>,
    /// Success-marked states (ω) — only meaningful for test models.
    pub success: Vec<String>,
}

/// Validation errors. `validate` reports the complete list, not just the
/// first.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("state `{state}`, action `{label}`: distribution sums to {sum}, expected 1")]
    DistributionSum {
        state: String,
        label: String,
        sum: String,
    },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state `{state}`, action `{label}`: empty or non-positive distribution support")]
    EmptySupport { state: String, label: String },
    #[error("duplicate state id `{0}`")]
    DuplicateId(String),
}

/// A validated NPLTS: finite, image-finite by construction.
#[derive(Debug, Clone)]
pub struct Nplts {
    pub name: String,
    pub state_names: Vec<String>,
    pub transitions: Vec<Transition>,
    /// Designated entry points, in declaration order.
    pub designated: Vec<StateId>,
    /// Success-marked (ω) states; empty for process models.
    pub success: BTreeSet<StateId>,
    /// Per-state indices into `transitions`.
    outgoing: Vec<Vec<usize>>,
}

impl Nplts {
    /// Validates a raw description; on failure returns every violation found.
    pub fn validate(raw: &RawNplts) -> Result<Nplts, Vec<ModelError>> {
        let mut errors = Vec::new();
        let mut index: BTreeMap<&str, StateId> = BTreeMap::new();
        for (i, name) in raw.states.iter().enumerate() {
            if index.insert(name, i).is_some() {
                errors.push(ModelError::DuplicateId(name.clone()));
            }
        }
        let lookup = |name: &str, errors: &mut Vec<ModelError>| -> Option<StateId> {
            match index.get(name) {
                Some(&i) => Some(i),
                None => {
                    errors.push(ModelError::UnknownState(name.to_string()));
                    None
                }
            }
        };

        let mut transitions = Vec::new();
        for (source, label, target) in &raw.transitions {
            let src = lookup(source, &mut errors);
            let mut support: BTreeMap<StateId, Rat> = BTreeMap::new();
            let mut sum = Rat::zero();
            let mut ok = true;
            for (state, p) in target {
                sum += p;
                if *p <= Rat::zero() {
                    ok = false;
                    continue;
                }
                match lookup(state, &mut errors) {
                    Some(t) => {
                        *support.entry(t).or_insert_with(Rat::zero) += p;
                    }
                    None => ok = false,
                }
            }
            if support.is_empty() || !ok {
                errors.push(ModelError::EmptySupport {
                    state: source.clone(),
                    label: label.clone(),
                });
                continue;
            }
            if !sum.is_one() {
                errors.push(ModelError::DistributionSum {
                    state: source.clone(),
                    label: label.clone(),
                    sum: fmt_exact(&sum),
                });
                continue;
            }
            if let Some(src) = src {
                transitions.push(Transition {
                    source: src,
                    label: label.clone(),
                    target: Distribution { support },
                });
            }
        }

        let mut designated = Vec::new();
        for d in &raw.designated {
            if let Some(i) = lookup(d, &mut errors) {
                designated.push(i);
            }
        }
        let mut success = BTreeSet::new();
        for s in &raw.success {
            if let Some(i) = lookup(s, &mut errors) {
                success.insert(i);
            }
        }

        if !errors.is_empty() {
            return Err(errors);
        }
        let mut outgoing = vec![Vec::new(); raw.states.len()];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.source].push(i);
        }
        Ok(Nplts {
            name: raw.name.clone(),
            state_names: raw.states.clone(),
            transitions,
            designated,
            success,
            outgoing,
        })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    /// Transitions leaving `s`, in declaration order.
    pub fn transitions_from(&self, s: StateId) -> impl Iterator<Item = &Transition> {
        self.outgoing[s].iter().map(|&i| &self.transitions[i])
    }

    /// `init(s)` — the set of actions labeling s's outgoing transitions.
    pub fn init(&self, s: StateId) -> BTreeSet<String> {
        self.transitions_from(s).map(|t| t.label.clone()).collect()
    }

    /// True iff `s` has no outgoing transitions.
    pub fn is_terminal(&self, s: StateId) -> bool {
        self.outgoing[s].is_empty()
    }

    /// The alphabet: all action labels occurring in transitions, sorted.
    pub fn alphabet(&self) -> BTreeSet<String> {
        self.transitions.iter().map(|t| t.label.clone()).collect()
    }

    /// Resolves a state name.
    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name)
    }

    /// True iff some cycle is reachable from `s`.
    pub fn has_cycle_from(&self, s: StateId) -> bool {
        // Iterative DFS with colors: 0 unvisited, 1 on stack, 2 done.
        let mut color = vec![0u8; self.num_states()];
        let mut stack = vec![(s, 0usize)];
        color[s] = 1;
        while let Some(&mut (ref v, ref mut next)) = stack.last_mut() {
            let succs: Vec<StateId> = self
                .transitions_from(*v)
                .flat_map(|t| t.target.support.keys().copied())
                .collect();
            if *next < succs.len() {
                let w = succs[*next];
                *next += 1;
                match color[w] {
                    0 => {
                        color[w] = 1;
                        stack.push((w, 0));
                    }
                    1 => return true,
                    _ => {}
                }
            } else {
                color[*v] = 2;
                stack.pop();
            }
        }
        false
    }

    /// Length of the longest path from `s`; `None` if a cycle is reachable.
    pub fn longest_path_from(&self, s: StateId) -> Option<usize> {
        if self.has_cycle_from(s) {
            return None;
        }
        fn go(m: &Nplts, s: StateId, memo: &mut BTreeMap<StateId, usize>) -> usize {
            if let Some(&d) = memo.get(&s) {
                return d;
            }
            let d = m
                .transitions_from(s)
                .flat_map(|t| t.target.support.keys())
                .map(|&t| 1 + go(m, t, memo))
                .max()
                .unwrap_or(0);
            memo.insert(s, d);
            d
        }
        Some(go(self, s, &mut BTreeMap::new()))
    }

    /// The sets of states reachable after each prefix of `α` from `start`
    /// (index 0 = {start}, index i = states reached by the first i actions).
    pub fn states_along(&self, start: StateId, alpha: &[String]) -> Vec<BTreeSet<StateId>> {
        let mut layers = vec![BTreeSet::from([start])];
        for a in alpha {
            let prev = layers.last().unwrap();
            let next: BTreeSet<StateId> = prev
                .iter()
                .flat_map(|&s| self.transitions_from(s))
                .filter(|t| &t.label == a)
                .flat_map(|t| t.target.support.keys().copied())
                .collect();
            layers.push(next);
        }
        layers
    }

    /// True iff the model has at least one full α-computation from `start`.
    pub fn realizes_trace(&self, start: StateId, alpha: &[String]) -> bool {
        !self.states_along(start, alpha).last().unwrap().is_empty()
    }

    /// All traces of length ≤ depth realizable from `start` (includes ε).
    pub fn traces_from(&self, start: StateId, depth: usize) -> BTreeSet<Vec<String>> {
        let mut acc = BTreeSet::new();
        let mut frontier: HashSet<StateId> = HashSet::from([start]);
        acc.insert(Vec::new());
        let mut traces: Vec<(Vec<String>, HashSet<StateId>)> =
            vec![(Vec::new(), frontier.drain().collect())];
        for _ in 0..depth {
            let mut next_level = Vec::new();
            for (trace, states) in &traces {
                let labels: BTreeSet<&str> = states
                    .iter()
                    .flat_map(|&s| self.transitions_from(s))
                    .map(|t| t.label.as_str())
                    .collect();
                for a in labels {
                    let succ: HashSet<StateId> = states
                        .iter()
                        .flat_map(|&s| self.transitions_from(s))
                        .filter(|t| t.label == a)
                        .flat_map(|t| t.target.support.keys().copied())
                        .collect();
                    let mut t2 = trace.clone();
                    t2.push(a.to_string());
                    acc.insert(t2.clone());
                    next_level.push((t2, succ));
                }
            }
            if next_level.is_empty() {
                break;
            }
            traces = next_level;
        }
        acc
    }

    /// Disjoint union: states renamed to avoid clashes; returns the union and
    /// the injection maps for both sides.
    pub fn disjoint_union(m1: &Nplts, m2: &Nplts) -> (Nplts, Vec<StateId>, Vec<StateId>) {
        let clash: HashSet<&String> = m1
            .state_names
            .iter()
            .filter(|n| m2.state_names.contains(n))
            .collect();
        let rename = |side: &str, n: &String| -> String {
            if clash.contains(n) {
                format!("{side}_{n}")
            } else {
                n.clone()
            }
        };
        let mut raw = RawNplts {
            name: format!("{}+{}", m1.name, m2.name),
            ..Default::default()
        };
        let map1: Vec<StateId> = (0..m1.num_states()).collect();
        let offset = m1.num_states();
        let map2: Vec<StateId> = (0..m2.num_states()).map(|i| i + offset).collect();
        for n in &m1.state_names {
            raw.states.push(rename("l", n));
        }
        for n in &m2.state_names {
            raw.states.push(rename("r", n));
        }
        for (m, side) in [(m1, "l"), (m2, "r")] {
            let name_of = |s: StateId| {
                let base = &m.state_names[s];
                rename(side, base)
            };
            for t in &m.transitions {
                raw.transitions.push((
                    name_of(t.source),
                    t.label.clone(),
                    t.target
                        .support
                        .iter()
                        .map(|(&s, p)| (name_of(s), p.clone()))
                        .collect(),
                ));
            }
            for &d in &m.designated {
                raw.designated.push(name_of(d));
            }
            for &s in &m.success {
                raw.success.push(name_of(s));
            }
        }
        let union = Nplts::validate(&raw).expect("union of valid models is valid");
        (union, map1, map2)
    }

    /// Re-exports the model as raw input, optionally dropping one transition
    /// (by index) and/or one state together with every transition touching
    /// it; used by shrinking.
    pub fn to_raw_without(
        &self,
        skip_transition: Option<usize>,
        skip_state: Option<StateId>,
    ) -> RawNplts {
        let keep_state = |s: StateId| Some(s) != skip_state;
        RawNplts {
            name: self.name.clone(),
            states: self
                .state_names
                .iter()
                .enumerate()
                .filter(|&(i, _)| keep_state(i))
                .map(|(_, n)| n.clone())
                .collect(),
            designated: self
                .designated
                .iter()
                .filter(|&&d| keep_state(d))
                .map(|&d| self.state_names[d].clone())
                .collect(),
            transitions: self
                .transitions
                .iter()
                .enumerate()
                .filter(|&(i, t)| {
                    Some(i) != skip_transition
                        && keep_state(t.source)
                        && t.target.support.keys().all(|&s| keep_state(s))
                })
                .map(|(_, t)| {
                    (
                        self.state_names[t.source].clone(),
                        t.label.clone(),
                        t.target
                            .support
                            .iter()
                            .map(|(&s, p)| (self.state_names[s].clone(), p.clone()))
                            .collect(),
                    )
                })
                .collect(),
            success: self
                .success
                .iter()
                .filter(|&&s| keep_state(s))
                .map(|&s| self.state_names[s].clone())
                .collect(),
        }
    }

    /// Deterministic DOT export: distribution fans drawn through a point
    /// node, sibling targets joined by a dashed edge.
    pub fn export_dot(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("digraph \"{}\" {{\n", self.name));
        out.push_str("  node [shape=point];\n");
        for (i, n) in self.state_names.iter().enumerate() {
            let deco = if self.success.contains(&i) {
                ", xlabel=\"ω\", shape=doublecircle, width=0.08"
            } else {
                ""
            };
            out.push_str(&format!("  s{i} [label=\"\", xlabel=\"{n}\"{deco}];\n"));
        }
        let mut by_source: Vec<usize> = (0..self.transitions.len()).collect();
        by_source.sort_by_key(|&i| {
            let t = &self.transitions[i];
            (t.source, t.label.clone(), format!("{:?}", t.target))
        });
        for (k, &i) in by_source.iter().enumerate() {
            let t = &self.transitions[i];
            if t.target.support.len() == 1 {
                let (&tgt, _) = t.target.support.first_key_value().unwrap();
                out.push_str(&format!(
                    "  s{} -> s{} [label=\"{}\"];\n",
                    t.source, tgt, t.label
                ));
            } else {
                out.push_str(&format!("  d{k} [shape=none, label=\"\", width=0];\n"));
                out.push_str(&format!(
                    "  s{} -> d{k} [label=\"{}\", arrowhead=none];\n",
                    t.source, t.label
                ));
                let targets: Vec<_> = t.target.support.iter().collect();
                for (&tgt, p) in &targets {
                    out.push_str(&format!(
                        "  d{k} -> s{} [label=\"{}\"];\n",
                        tgt,
                        fmt_exact(p)
                    ));
                }
                for pair in targets.windows(2) {
                    out.push_str(&format!(
                        "  s{} -> s{} [style=dashed, dir=none, constraint=false];\n",
                        pair[0].0, pair[1].0
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

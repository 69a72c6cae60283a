//! Decorated-trace event families: trace, completed-trace,
//! failure/ready pairs, failure/ready traces, and the success events used by
//! testing semantics. All decorations are checked against the *model* through
//! the corr map of the resolution.

use std::collections::BTreeSet;

use num::{One, Zero};
use thiserror::Error;

use crate::model::{Nplts, StateId};
use crate::rat::Rat;
use crate::resolution::{Computation, Resolution};

/// A refusal decoration: either a concrete finite set F (refused iff the
/// ready set is disjoint from F) or the co-finite set A∖U (refused iff the
/// ready set is contained in U). `AllBut(∅)` is the symbolic full action set
/// A, which encodes completedness as a failure pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DecorSet {
    Finite(BTreeSet<String>),
    AllBut(BTreeSet<String>),
}

impl DecorSet {
    pub fn refused_by(&self, ready: &BTreeSet<String>) -> bool {
        match self {
            DecorSet::Finite(f) => ready.is_disjoint(f),
            DecorSet::AllBut(u) => ready.is_subset(u),
        }
    }
}

/// One observable event whose probability is measured inside a resolution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventQuery {
    Trace(Vec<String>),
    CompletedTrace(Vec<String>),
    FailurePair(Vec<String>, DecorSet),
    ReadyPair(Vec<String>, BTreeSet<String>),
    FailureTrace(Vec<(String, DecorSet)>),
    ReadyTrace(Vec<(String, BTreeSet<String>)>),
    Success,
    SuccessTrace(Vec<String>),
}

impl std::fmt::Display for DecorSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecorSet::Finite(s) => {
                write!(f, "{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))
            }
            DecorSet::AllBut(u) if u.is_empty() => write!(f, "{{*}}"),
            DecorSet::AllBut(u) => {
                write!(f, "{{* minus {}}}", u.iter().cloned().collect::<Vec<_>>().join(","))
            }
        }
    }
}

fn fmt_trace(alpha: &[String]) -> String {
    if alpha.is_empty() {
        "ε".to_string()
    } else {
        alpha.join(" ")
    }
}

impl std::fmt::Display for EventQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let steps = |decorated: Vec<(String, String)>| {
            decorated
                .into_iter()
                .map(|(a, d)| format!("({a},{d})"))
                .collect::<Vec<_>>()
                .join("")
        };
        match self {
            EventQuery::Trace(a) => write!(f, "trace {}", fmt_trace(a)),
            EventQuery::CompletedTrace(a) => write!(f, "completed trace {}", fmt_trace(a)),
            EventQuery::FailurePair(a, fs) => {
                write!(f, "failure pair ({}, {fs})", fmt_trace(a))
            }
            EventQuery::ReadyPair(a, r) => write!(
                f,
                "ready pair ({}, {{{}}})",
                fmt_trace(a),
                r.iter().cloned().collect::<Vec<_>>().join(",")
            ),
            EventQuery::FailureTrace(phi) => write!(
                f,
                "failure trace {}",
                steps(phi.iter().map(|(a, d)| (a.clone(), d.to_string())).collect())
            ),
            EventQuery::ReadyTrace(rho) => write!(
                f,
                "ready trace {}",
                steps(
                    rho.iter()
                        .map(|(a, r)| (
                            a.clone(),
                            format!("{{{}}}", r.iter().cloned().collect::<Vec<_>>().join(","))
                        ))
                        .collect()
                )
            ),
            EventQuery::Success => write!(f, "success"),
            EventQuery::SuccessTrace(a) => write!(f, "successful trace {}", fmt_trace(a)),
        }
    }
}

impl EventQuery {
    /// The plain action trace underlying the event; drives Res_α restriction.
    pub fn trace(&self) -> Vec<String> {
        match self {
            EventQuery::Trace(a)
            | EventQuery::CompletedTrace(a)
            | EventQuery::FailurePair(a, _)
            | EventQuery::ReadyPair(a, _)
            | EventQuery::SuccessTrace(a) => a.clone(),
            EventQuery::FailureTrace(phi) => phi.iter().map(|(a, _)| a.clone()).collect(),
            EventQuery::ReadyTrace(rho) => rho.iter().map(|(a, _)| a.clone()).collect(),
            EventQuery::Success => Vec::new(),
        }
    }
}

/// Exact probability of the event's compatible-computation set within `z`.
pub fn event_prob(model: &Nplts, z: &Resolution, q: &EventQuery) -> Rat {
    go(model, z, q, 0, 0)
}

fn action_at(q: &EventQuery, i: usize) -> Option<&str> {
    match q {
        EventQuery::Trace(a)
        | EventQuery::CompletedTrace(a)
        | EventQuery::FailurePair(a, _)
        | EventQuery::ReadyPair(a, _)
        | EventQuery::SuccessTrace(a) => a.get(i).map(|s| s.as_str()),
        EventQuery::FailureTrace(phi) => phi.get(i).map(|(a, _)| a.as_str()),
        EventQuery::ReadyTrace(rho) => rho.get(i).map(|(a, _)| a.as_str()),
        EventQuery::Success => None,
    }
}

fn len_of(q: &EventQuery) -> usize {
    match q {
        EventQuery::Trace(a)
        | EventQuery::CompletedTrace(a)
        | EventQuery::FailurePair(a, _)
        | EventQuery::ReadyPair(a, _)
        | EventQuery::SuccessTrace(a) => a.len(),
        EventQuery::FailureTrace(phi) => phi.len(),
        EventQuery::ReadyTrace(rho) => rho.len(),
        EventQuery::Success => 0,
    }
}

/// Indicator that a computation may *end* at this node for the query.
fn terminal_ok(model: &Nplts, q: &EventQuery, corr: StateId) -> bool {
    match q {
        EventQuery::Trace(_) | EventQuery::FailureTrace(_) | EventQuery::ReadyTrace(_) => true,
        // Completedness is a model property: corr has no outgoing transitions.
        EventQuery::CompletedTrace(_) => model.is_terminal(corr),
        EventQuery::FailurePair(_, f) => f.refused_by(&model.init(corr)),
        EventQuery::ReadyPair(_, r) => &model.init(corr) == r,
        EventQuery::Success | EventQuery::SuccessTrace(_) => model.success.contains(&corr),
    }
}

/// Indicator that a state reached after step `i+1` satisfies the stepwise
/// decoration, if the family has one.
fn decoration_ok(model: &Nplts, q: &EventQuery, i: usize, corr: StateId) -> bool {
    match q {
        EventQuery::FailureTrace(phi) => phi[i].1.refused_by(&model.init(corr)),
        EventQuery::ReadyTrace(rho) => model.init(corr) == rho[i].1,
        _ => true,
    }
}

fn go(model: &Nplts, z: &Resolution, q: &EventQuery, node: usize, i: usize) -> Rat {
    let corr = z.nodes[node].corr;
    // Success events are prefix-free at the first success state: the
    // computation stops there regardless of remaining trace.
    if matches!(q, EventQuery::Success | EventQuery::SuccessTrace(_))
        && model.success.contains(&corr)
    {
        return if i == len_of(q) { Rat::one() } else { Rat::zero() };
    }
    if matches!(q, EventQuery::Success) {
        // Not yet successful: follow every step of the resolution.
        return match &z.nodes[node].step {
            None => Rat::zero(),
            Some(step) => step
                .children
                .iter()
                .fold(Rat::zero(), |acc, (c, p)| acc + p * go(model, z, q, *c, i)),
        };
    }
    if i == len_of(q) {
        return if terminal_ok(model, q, corr) {
            Rat::one()
        } else {
            Rat::zero()
        };
    }
    let want = action_at(q, i).expect("i < len");
    match &z.nodes[node].step {
        Some(step) if step.label == want => step.children.iter().fold(Rat::zero(), |acc, (c, p)| {
            if decoration_ok(model, q, i, z.nodes[*c].corr) {
                acc + p * go(model, z, q, *c, i + 1)
            } else {
                acc
            }
        }),
        _ => Rat::zero(),
    }
}

/// Collects the compatible computations themselves (the witness set); always
/// prefix-free, and `prob_of` over it equals `event_prob`.
pub fn compatible_computations(model: &Nplts, z: &Resolution, q: &EventQuery) -> Vec<Computation> {
    let mut out = Vec::new();
    collect(model, z, q, 0, 0, &mut Vec::new(), &mut out);
    out
}

fn collect(
    model: &Nplts,
    z: &Resolution,
    q: &EventQuery,
    node: usize,
    i: usize,
    path: &mut Vec<(usize, String, usize)>,
    out: &mut Vec<Computation>,
) {
    let corr = z.nodes[node].corr;
    if matches!(q, EventQuery::Success | EventQuery::SuccessTrace(_))
        && model.success.contains(&corr)
    {
        if i == len_of(q) {
            out.push(Computation { steps: path.clone() });
        }
        return;
    }
    if matches!(q, EventQuery::Success) {
        if let Some(step) = &z.nodes[node].step {
            for (c, _) in &step.children {
                path.push((node, step.label.clone(), *c));
                collect(model, z, q, *c, i, path, out);
                path.pop();
            }
        }
        return;
    }
    if i == len_of(q) {
        if terminal_ok(model, q, corr) {
            out.push(Computation { steps: path.clone() });
        }
        return;
    }
    let want = action_at(q, i).expect("i < len");
    if let Some(step) = &z.nodes[node].step {
        if step.label == want {
            for (c, _) in &step.children {
                if decoration_ok(model, q, i, z.nodes[*c].corr) {
                    path.push((node, step.label.clone(), *c));
                    collect(model, z, q, *c, i + 1, path, out);
                    path.pop();
                }
            }
        }
    }
}

/// Decorated event family selector for universe generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFamily {
    Trace,
    CompletedTrace,
    FailurePair,
    ReadyPair,
    FailureTrace,
    ReadyTrace,
}

fn subsets(items: &BTreeSet<String>) -> Vec<BTreeSet<String>> {
    let v: Vec<&String> = items.iter().collect();
    (0..(1u64 << v.len()))
        .map(|mask| {
            v.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, s)| (*s).clone())
                .collect()
        })
        .collect()
}

/// Union-closure of a family of sets, including the empty union.
fn union_closure(sets: &[BTreeSet<String>]) -> Vec<BTreeSet<String>> {
    let mut out: BTreeSet<BTreeSet<String>> = BTreeSet::new();
    out.insert(BTreeSet::new());
    for s in sets {
        let additions: Vec<BTreeSet<String>> = out
            .iter()
            .map(|u| u.union(s).cloned().collect())
            .collect();
        out.extend(additions);
    }
    out.into_iter().collect()
}

/// All traces realized from any of the roots, up to `depth`, shortest first.
fn realized_traces(model: &Nplts, roots: &[StateId], depth: usize) -> Vec<Vec<String>> {
    let mut out: BTreeSet<Vec<String>> = BTreeSet::new();
    for &r in roots {
        out.extend(model.traces_from(r, depth));
    }
    let mut v: Vec<Vec<String>> = out.into_iter().collect();
    v.sort_by_key(|t| (t.len(), t.clone()));
    v
}

/// Per-position ready-set data along a trace: the init sets of the states
/// reachable (from any root) after each step.
fn inits_along(model: &Nplts, roots: &[StateId], alpha: &[String]) -> Vec<Vec<BTreeSet<String>>> {
    let mut per_pos: Vec<BTreeSet<BTreeSet<String>>> = vec![BTreeSet::new(); alpha.len()];
    for &r in roots {
        let along = model.states_along(r, alpha);
        // states_along yields positions 0..=n; decorations apply after steps.
        for (i, states) in along.iter().enumerate().skip(1) {
            for &s in states {
                per_pos[i - 1].insert(model.init(s));
            }
        }
    }
    per_pos
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect()
}

fn cartesian<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for prefix in &acc {
            for o in opts {
                let mut p2 = prefix.clone();
                p2.push(o.clone());
                next.push(p2);
            }
        }
        acc = next;
    }
    acc
}

/// Finite universe of events sufficient to decide the family's equivalence on
/// the given model (typically a disjoint union) between the listed roots.
///
/// Pair families use the literal subsets of the model alphabet plus the
/// symbolic full set A. Stepwise families use reduced per-position universes:
/// failure decorations range over complements of unions of realized ready
/// sets (every concrete refusal set induces the same indicator as one of
/// these), ready decorations over the realized ready sets themselves.
pub fn event_universe(
    model: &Nplts,
    roots: &[StateId],
    family: EventFamily,
    depth: usize,
) -> Vec<EventQuery> {
    let traces = realized_traces(model, roots, depth);
    let alphabet = model.alphabet();
    let mut out = Vec::new();
    for alpha in &traces {
        match family {
            EventFamily::Trace => out.push(EventQuery::Trace(alpha.clone())),
            EventFamily::CompletedTrace => out.push(EventQuery::CompletedTrace(alpha.clone())),
            EventFamily::FailurePair => {
                for f in subsets(&alphabet) {
                    out.push(EventQuery::FailurePair(alpha.clone(), DecorSet::Finite(f)));
                }
                out.push(EventQuery::FailurePair(
                    alpha.clone(),
                    DecorSet::AllBut(BTreeSet::new()),
                ));
            }
            EventFamily::ReadyPair => {
                for r in subsets(&alphabet) {
                    out.push(EventQuery::ReadyPair(alpha.clone(), r));
                }
            }
            EventFamily::FailureTrace => {
                let per_pos = inits_along(model, roots, alpha);
                let options: Vec<Vec<DecorSet>> = per_pos
                    .iter()
                    .map(|inits| union_closure(inits).into_iter().map(DecorSet::AllBut).collect())
                    .collect();
                for decs in cartesian(&options) {
                    out.push(EventQuery::FailureTrace(
                        alpha.iter().cloned().zip(decs).collect(),
                    ));
                }
            }
            EventFamily::ReadyTrace => {
                let per_pos = inits_along(model, roots, alpha);
                for decs in cartesian(&per_pos) {
                    out.push(EventQuery::ReadyTrace(
                        alpha.iter().cloned().zip(decs).collect(),
                    ));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("bad event query: {0}")]
pub struct QueryParseError(pub String);

/// Parses the CLI query grammar:
///   `trace a b` | `ctrace a b` | `fpair a b {c,d}` | `rpair a b {c}` |
///   `ftrace (a,{b,c})(c,{})` | `rtrace (a,{b})` | `success` | `strace a b`
/// `{*}` denotes the symbolic full refusal set A.
pub fn parse_query(text: &str) -> Result<EventQuery, QueryParseError> {
    let text = text.trim();
    let (kind, rest) = match text.find(char::is_whitespace) {
        Some(i) => (&text[..i], text[i..].trim()),
        None => (text, ""),
    };
    let words = |s: &str| -> Vec<String> { s.split_whitespace().map(str::to_string).collect() };
    match kind {
        "trace" => Ok(EventQuery::Trace(words(rest))),
        "ctrace" => Ok(EventQuery::CompletedTrace(words(rest))),
        "strace" => Ok(EventQuery::SuccessTrace(words(rest))),
        "success" if rest.is_empty() => Ok(EventQuery::Success),
        "fpair" | "rpair" => {
            let open = rest
                .find('{')
                .ok_or_else(|| QueryParseError(format!("{kind} needs a {{...}} set")))?;
            let close = rest
                .rfind('}')
                .ok_or_else(|| QueryParseError("unclosed {".into()))?;
            let alpha = words(&rest[..open]);
            let set_src = &rest[open + 1..close];
            if kind == "fpair" {
                Ok(EventQuery::FailurePair(alpha, parse_decor(set_src)?))
            } else {
                match parse_decor(set_src)? {
                    DecorSet::Finite(r) => Ok(EventQuery::ReadyPair(alpha, r)),
                    DecorSet::AllBut(_) => {
                        Err(QueryParseError("ready sets must be concrete".into()))
                    }
                }
            }
        }
        "ftrace" | "rtrace" => {
            let mut items = Vec::new();
            let mut s = rest;
            while !s.is_empty() {
                let close = s
                    .find(')')
                    .ok_or_else(|| QueryParseError("expected (action,{set})".into()))?;
                let inner = s[..close]
                    .trim()
                    .strip_prefix('(')
                    .ok_or_else(|| QueryParseError("expected (".into()))?;
                let comma = inner
                    .find(',')
                    .ok_or_else(|| QueryParseError("expected comma".into()))?;
                let action = inner[..comma].trim().to_string();
                let set_part = inner[comma + 1..].trim();
                let set_src = set_part
                    .strip_prefix('{')
                    .and_then(|x| x.strip_suffix('}'))
                    .ok_or_else(|| QueryParseError("expected {set}".into()))?;
                items.push((action, parse_decor(set_src)?));
                s = s[close + 1..].trim_start();
            }
            if kind == "ftrace" {
                Ok(EventQuery::FailureTrace(items))
            } else {
                let mut out = Vec::new();
                for (a, d) in items {
                    match d {
                        DecorSet::Finite(r) => out.push((a, r)),
                        DecorSet::AllBut(_) => {
                            return Err(QueryParseError("ready sets must be concrete".into()))
                        }
                    }
                }
                Ok(EventQuery::ReadyTrace(out))
            }
        }
        other => Err(QueryParseError(format!("unknown event kind '{other}'"))),
    }
}

fn parse_decor(src: &str) -> Result<DecorSet, QueryParseError> {
    let src = src.trim();
    if src == "*" {
        return Ok(DecorSet::AllBut(BTreeSet::new()));
    }
    let mut set = BTreeSet::new();
    for part in src.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if !part.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(QueryParseError(format!("bad action name '{part}'")));
        }
        set.insert(part.to_string());
    }
    Ok(DecorSet::Finite(set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_dsl;
    use crate::rat::rat;
    use crate::resolution::{enumerate_resolutions, prob_of, ResKind};

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn tr(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn trace_of_empty_is_one() {
        let m = parse_dsl("nplts T { designated s; state s { a -> { t: 1 }; } state t { } }")
            .unwrap();
        let rs = enumerate_resolutions(&m, 0, ResKind::All, None).unwrap();
        for z in &rs.items {
            assert_eq!(event_prob(&m, z, &EventQuery::Trace(vec![])), rat(1, 1));
        }
    }

    #[test]
    fn completedness_is_a_model_property() {
        let m = parse_dsl(
            "nplts T { designated s; state s { a -> { t: 1 }; } state t { b -> { u: 1 }; } state u { } }",
        )
        .unwrap();
        let all = enumerate_resolutions(&m, 0, ResKind::All, None).unwrap();
        // The resolution that does `a` then stops at t: trace(a)=1 but t is
        // not terminal in the model, so ctrace(a)=0.
        let stopper = all
            .items
            .iter()
            .find(|z| {
                z.maximal_computations().len() == 1
                    && z.maximal_computations()[0].1 == tr(&["a"])
            })
            .unwrap();
        assert_eq!(event_prob(&m, stopper, &EventQuery::Trace(tr(&["a"]))), rat(1, 1));
        assert_eq!(
            event_prob(&m, stopper, &EventQuery::CompletedTrace(tr(&["a"]))),
            rat(0, 1)
        );
    }

    #[test]
    fn failure_pair_with_empty_set_equals_trace() {
        let m = parse_dsl(
            "nplts T { designated s;
               state s { a -> { t: 1/4, u: 3/4 }; a -> { u: 1 }; }
               state t { b -> { v: 1 }; } state u { } state v { } }",
        )
        .unwrap();
        let rs = enumerate_resolutions(&m, 0, ResKind::All, None).unwrap();
        for z in &rs.items {
            for alpha in [tr(&[]), tr(&["a"]), tr(&["a", "b"])] {
                let t = event_prob(&m, z, &EventQuery::Trace(alpha.clone()));
                let f = event_prob(
                    &m,
                    z,
                    &EventQuery::FailurePair(alpha, DecorSet::Finite(BTreeSet::new())),
                );
                assert_eq!(t, f);
            }
        }
    }

    #[test]
    fn full_set_failure_pair_equals_completed_trace() {
        let m = parse_dsl(
            "nplts T { designated s;
               state s { a -> { t: 1/2, u: 1/2 }; }
               state t { b -> { v: 1 }; } state u { } state v { } }",
        )
        .unwrap();
        let rs = enumerate_resolutions(&m, 0, ResKind::All, None).unwrap();
        for z in &rs.items {
            for alpha in [tr(&[]), tr(&["a"]), tr(&["a", "b"])] {
                let c = event_prob(&m, z, &EventQuery::CompletedTrace(alpha.clone()));
                let f = event_prob(
                    &m,
                    z,
                    &EventQuery::FailurePair(alpha, DecorSet::AllBut(BTreeSet::new())),
                );
                assert_eq!(c, f);
            }
        }
    }

    #[test]
    fn ready_pair_and_traces() {
        // s –a→ {1/2 t (b,c), 1/2 u (b)}
        let m = parse_dsl(
            "nplts T { designated s;
               state s { a -> { t: 1/2, u: 1/2 }; }
               state t { b -> { v: 1 }; c -> { v: 1 }; }
               state u { b -> { v: 1 }; } state v { } }",
        )
        .unwrap();
        let rs = enumerate_resolutions(&m, 0, ResKind::Maximal, None).unwrap();
        // Ready pair (a, {b,c}) has probability 1/2 in every maximal resolution.
        for z in &rs.items {
            assert_eq!(
                event_prob(&m, z, &EventQuery::ReadyPair(tr(&["a"]), set(&["b", "c"]))),
                rat(1, 2)
            );
            assert_eq!(
                event_prob(
                    &m,
                    z,
                    &EventQuery::ReadyTrace(vec![("a".into(), set(&["b"]))])
                ),
                rat(1, 2)
            );
            // Refusing {c} keeps only the u-branch.
            assert_eq!(
                event_prob(
                    &m,
                    z,
                    &EventQuery::FailureTrace(vec![("a".into(), DecorSet::Finite(set(&["c"])))])
                ),
                rat(1, 2)
            );
        }
    }

    #[test]
    fn witness_computations_match_event_prob() {
        let m = parse_dsl(
            "nplts T { designated s;
               state s { a -> { t: 1/3, u: 2/3 }; }
               state t { b -> { v: 1 }; } state u { } state v { } }",
        )
        .unwrap();
        let rs = enumerate_resolutions(&m, 0, ResKind::All, None).unwrap();
        let queries = vec![
            EventQuery::Trace(tr(&["a", "b"])),
            EventQuery::CompletedTrace(tr(&["a"])),
            EventQuery::FailurePair(tr(&["a"]), DecorSet::Finite(set(&["b"]))),
            EventQuery::ReadyPair(tr(&["a"]), set(&["b"])),
        ];
        for z in &rs.items {
            for q in &queries {
                let w = compatible_computations(&m, z, q);
                assert_eq!(prob_of(&w, z).unwrap(), event_prob(&m, z, q));
            }
        }
    }

    #[test]
    fn success_events() {
        let m = parse_dsl(
            "nplts T { designated s; success w;
               state s { a -> { t: 1/2, u: 1/2 }; }
               state t { b -> { w: 1 }; } state u { } state w { } }",
        )
        .unwrap();
        let rs = enumerate_resolutions(&m, 0, ResKind::Maximal, None).unwrap();
        assert_eq!(rs.items.len(), 1);
        let z = &rs.items[0];
        assert_eq!(event_prob(&m, z, &EventQuery::Success), rat(1, 2));
        assert_eq!(
            event_prob(&m, z, &EventQuery::SuccessTrace(tr(&["a", "b"]))),
            rat(1, 2)
        );
        assert_eq!(event_prob(&m, z, &EventQuery::SuccessTrace(tr(&["a"]))), rat(0, 1));
    }

    #[test]
    fn universe_contains_realized_traces_and_full_set() {
        let m = parse_dsl(
            "nplts T { designated s; state s { a -> { t: 1 }; } state t { b -> { u: 1 }; } state u { } }",
        )
        .unwrap();
        let u = event_universe(&m, &[0], EventFamily::Trace, 2);
        assert!(u.contains(&EventQuery::Trace(tr(&[]))));
        assert!(u.contains(&EventQuery::Trace(tr(&["a", "b"]))));
        let f = event_universe(&m, &[0], EventFamily::FailurePair, 2);
        assert!(f.contains(&EventQuery::FailurePair(
            tr(&["a"]),
            DecorSet::AllBut(BTreeSet::new())
        )));
    }

    #[test]
    fn query_grammar_roundtrip() {
        assert_eq!(parse_query("trace a b").unwrap(), EventQuery::Trace(tr(&["a", "b"])));
        assert_eq!(parse_query("trace").unwrap(), EventQuery::Trace(vec![]));
        assert_eq!(
            parse_query("ctrace a").unwrap(),
            EventQuery::CompletedTrace(tr(&["a"]))
        );
        assert_eq!(
            parse_query("fpair a b {c,d}").unwrap(),
            EventQuery::FailurePair(tr(&["a", "b"]), DecorSet::Finite(set(&["c", "d"])))
        );
        assert_eq!(
            parse_query("fpair a {*}").unwrap(),
            EventQuery::FailurePair(tr(&["a"]), DecorSet::AllBut(BTreeSet::new()))
        );
        assert_eq!(
            parse_query("rpair a {}").unwrap(),
            EventQuery::ReadyPair(tr(&["a"]), BTreeSet::new())
        );
        assert_eq!(
            parse_query("ftrace (a,{b,c})(c,{})").unwrap(),
            EventQuery::FailureTrace(vec![
                ("a".into(), DecorSet::Finite(set(&["b", "c"]))),
                ("c".into(), DecorSet::Finite(BTreeSet::new())),
            ])
        );
        assert_eq!(
            parse_query("rtrace (a,{b})").unwrap(),
            EventQuery::ReadyTrace(vec![("a".into(), set(&["b"]))])
        );
        assert_eq!(parse_query("success").unwrap(), EventQuery::Success);
        assert!(parse_query("bogus a").is_err());
        assert!(parse_query("rtrace (a,{*})").is_err());
    }
}

//! The 18 trace-based equivalences: six event families (Tr, CTr, F, FTr, R,
//! RTr) under the three matching schemas — fully matching resolutions
//! (dis), partially matching resolutions (trace-by-trace), and max–min
//! matching resolution sets (⊔⊓).

use std::collections::BTreeSet;
use std::fmt;

use num::Zero;

use crate::events::{event_prob, event_universe, EventFamily, EventQuery};
use crate::model::{Nplts, StateId};
use crate::rat::{fmt_approx, Rat};
use crate::resolution::{
    enumerate_resolutions, ResError, ResKind, ResolutionSet,
};

/// One of the six decorated-trace event families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TraceFamily {
    Tr,
    CTr,
    F,
    FTr,
    R,
    RTr,
}

/// Matching schema: dis / plain / ⊔⊓.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Schema {
    FullyMatching,
    PartiallyMatching,
    Extremal,
}

/// Evidence of a distinction, re-checkable with `event_prob` alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A resolution of `side` whose whole event-probability map no resolution
    /// of the other side reproduces; `query`/`value` is one sample entry.
    UnmatchedResolution {
        side: u8,
        resolution_index: usize,
        query: EventQuery,
        value: Rat,
    },
    /// A probability attained for `query` on `side` but not on the other.
    UnmatchedValue { side: u8, query: EventQuery, value: Rat },
    /// Extremal probabilities disagree for `query`.
    ExtremumMismatch {
        query: EventQuery,
        sup: (Rat, Rat),
        inf: (Rat, Rat),
    },
    /// Res_α is empty on `side` only.
    EmptyRestriction { side: u8, query: EventQuery },
    /// A pair missing from the largest (bi)simulation's kernel.
    KernelFailure { missing: (crate::model::StateId, crate::model::StateId) },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::UnmatchedResolution { side, resolution_index, query, value } => write!(
                f,
                "resolution #{resolution_index} of side {side} is unmatched; e.g. {query} = {}",
                fmt_approx(value)
            ),
            Witness::UnmatchedValue { side, query, value } => write!(
                f,
                "probability {} for {query} attained on side {side} only",
                fmt_approx(value)
            ),
            Witness::ExtremumMismatch { query, sup, inf } => {
                if inf.0 == inf.1 {
                    write!(
                        f,
                        "{query}: {} vs {}",
                        fmt_approx(&sup.0),
                        fmt_approx(&sup.1)
                    )
                } else {
                    write!(
                        f,
                        "{query}: sup {} vs {}, inf {} vs {}",
                        fmt_approx(&sup.0),
                        fmt_approx(&sup.1),
                        fmt_approx(&inf.0),
                        fmt_approx(&inf.1)
                    )
                }
            }
            Witness::EmptyRestriction { side, query } => {
                write!(f, "Res_α empty on side {side} only for {query}")
            }
            Witness::KernelFailure { missing } => {
                write!(f, "pair ({}, {}) not in the largest relation", missing.0, missing.1)
            }
        }
    }
}

/// Outcome of an equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub equivalent: bool,
    pub witness: Option<Witness>,
    pub bounded: bool,
}

impl Verdict {
    pub fn equal(bounded: bool) -> Self {
        Verdict { equivalent: true, witness: None, bounded }
    }

    pub fn distinct(witness: Witness, bounded: bool) -> Self {
        Verdict { equivalent: false, witness: Some(witness), bounded }
    }
}

/// The event-query groups of a family. dis compares one whole map per group
/// (CTr has two independent maps); the other schemas flatten.
fn universe_groups(
    model: &Nplts,
    roots: &[StateId],
    family: TraceFamily,
    depth: usize,
) -> Vec<Vec<EventQuery>> {
    match family {
        TraceFamily::Tr => vec![event_universe(model, roots, EventFamily::Trace, depth)],
        TraceFamily::CTr => vec![
            event_universe(model, roots, EventFamily::Trace, depth),
            event_universe(model, roots, EventFamily::CompletedTrace, depth),
        ],
        TraceFamily::F => vec![event_universe(model, roots, EventFamily::FailurePair, depth)],
        TraceFamily::FTr => vec![event_universe(model, roots, EventFamily::FailureTrace, depth)],
        TraceFamily::R => vec![event_universe(model, roots, EventFamily::ReadyPair, depth)],
        TraceFamily::RTr => vec![event_universe(model, roots, EventFamily::ReadyTrace, depth)],
    }
}

struct Prep {
    res1: ResolutionSet,
    res2: ResolutionSet,
    groups: Vec<Vec<EventQuery>>,
    bounded: bool,
}

fn prepare(
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    family: TraceFamily,
    depth: Option<usize>,
) -> Result<Prep, ResError> {
    let res1 = enumerate_resolutions(model, s1, ResKind::All, depth)?;
    let res2 = enumerate_resolutions(model, s2, ResKind::All, depth)?;
    let bounded = res1.bounded || res2.bounded;
    let udepth = [s1, s2]
        .iter()
        .map(|&s| model.longest_path_from(s).or(depth).unwrap_or(0))
        .max()
        .unwrap();
    let udepth = match depth {
        Some(b) => udepth.min(b),
        None => udepth,
    };
    let groups = universe_groups(model, &[s1, s2], family, udepth);
    Ok(Prep { res1, res2, groups, bounded })
}

fn value_map(model: &Nplts, set: &ResolutionSet, queries: &[EventQuery]) -> Vec<Vec<Rat>> {
    set.items
        .iter()
        .map(|z| queries.iter().map(|q| event_prob(model, z, q)).collect())
        .collect()
}

/// ∼_dis: each side's resolutions are matched by whole event-probability
/// maps on the other side.
pub fn check_dis(
    family: TraceFamily,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    depth: Option<usize>,
) -> Result<Verdict, ResError> {
    let prep = prepare(model, s1, s2, family, depth)?;
    for queries in &prep.groups {
        let maps1 = value_map(model, &prep.res1, queries);
        let maps2 = value_map(model, &prep.res2, queries);
        let set1: BTreeSet<&Vec<Rat>> = maps1.iter().collect();
        let set2: BTreeSet<&Vec<Rat>> = maps2.iter().collect();
        for (side, mine, theirs) in [(1u8, &maps1, &set2), (2u8, &maps2, &set1)] {
            if let Some((idx, map)) = mine.iter().enumerate().find(|(_, m)| !theirs.contains(m)) {
                // Pick a sample entry that actually differs from some map on
                // the other side (first nonzero, else first).
                let j = map.iter().position(|v| !v.is_zero()).unwrap_or(0);
                return Ok(Verdict::distinct(
                    Witness::UnmatchedResolution {
                        side,
                        resolution_index: idx,
                        query: queries[j].clone(),
                        value: map[j].clone(),
                    },
                    prep.bounded,
                ));
            }
        }
    }
    Ok(Verdict::equal(prep.bounded))
}

/// Plain (trace-by-trace) schema: for each single event, the attained value
/// sets coincide.
pub fn check_tbt(
    family: TraceFamily,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    depth: Option<usize>,
) -> Result<Verdict, ResError> {
    let prep = prepare(model, s1, s2, family, depth)?;
    for queries in &prep.groups {
        for q in queries {
            let vals1: BTreeSet<Rat> = prep
                .res1
                .items
                .iter()
                .map(|z| event_prob(model, z, q))
                .collect();
            let vals2: BTreeSet<Rat> = prep
                .res2
                .items
                .iter()
                .map(|z| event_prob(model, z, q))
                .collect();
            if vals1 != vals2 {
                let (side, value) = match vals1.difference(&vals2).next() {
                    Some(v) => (1, v.clone()),
                    None => (2, vals2.difference(&vals1).next().unwrap().clone()),
                };
                return Ok(Verdict::distinct(
                    Witness::UnmatchedValue { side, query: q.clone(), value },
                    prep.bounded,
                ));
            }
        }
    }
    Ok(Verdict::equal(prep.bounded))
}

/// ⊔⊓ schema: suprema and infima over the resolution sets agree for every
/// event.
pub fn check_supinf(
    family: TraceFamily,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    depth: Option<usize>,
) -> Result<Verdict, ResError> {
    let prep = prepare(model, s1, s2, family, depth)?;
    // Extrema are taken over the full resolution sets: the trivial stopped
    // resolution makes every infimum 0 on both sides, so the suprema carry
    // the discriminating power. Quantifying instead over α-restricted sets
    // breaks known identifications (a dead-end branch would drag one side's
    // infimum down while the other side's stopped resolutions are filtered
    // away).
    for queries in &prep.groups {
        for q in queries {
            let extrema = |set: &ResolutionSet| {
                let mut vals = set.items.iter().map(|z| event_prob(model, z, q));
                let first = vals.next().expect("nonempty");
                vals.fold((first.clone(), first), |(sup, inf), v| {
                    (sup.max(v.clone()), inf.min(v))
                })
            };
            let (sup1, inf1) = extrema(&prep.res1);
            let (sup2, inf2) = extrema(&prep.res2);
            if sup1 != sup2 || inf1 != inf2 {
                return Ok(Verdict::distinct(
                    Witness::ExtremumMismatch {
                        query: q.clone(),
                        sup: (sup1, sup2),
                        inf: (inf1, inf2),
                    },
                    prep.bounded,
                ));
            }
        }
    }
    Ok(Verdict::equal(prep.bounded))
}

/// Dispatch by schema.
pub fn check_trace_equiv(
    family: TraceFamily,
    schema: Schema,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    depth: Option<usize>,
) -> Result<Verdict, ResError> {
    match schema {
        Schema::FullyMatching => check_dis(family, model, s1, s2, depth),
        Schema::PartiallyMatching => check_tbt(family, model, s1, s2, depth),
        Schema::Extremal => check_supinf(family, model, s1, s2, depth),
    }
}

//! Spectrum runner, bundled corpus expectations, and the random-model
//! generator driving the theorem property harness.

use std::collections::BTreeMap;
use std::path::Path;

use crate::dsl::parse_dsl;
use crate::model::{Nplts, RawNplts, StateId};
use crate::rat::{rat, Rat};
use crate::sim_equiv::{
    check_bisimulation, check_ct_variant, check_simulation, BisimVariant, CtRelation, SimError,
    SimFamily, SimVariant,
};
use crate::testing::{check_pte, search_distinguishing_test, PteVariant};
use crate::trace_equiv::{check_trace_equiv, Schema, TraceFamily, Verdict};

/// One of the 33 deterministic-scheduler relations, by CLI id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EquivalenceId {
    Trace(TraceFamily, Schema),
    Sim(SimFamily, SimVariant),
    Bisim(BisimVariant),
}

impl EquivalenceId {
    pub fn all() -> Vec<EquivalenceId> {
        let mut out = Vec::new();
        for family in [
            TraceFamily::Tr,
            TraceFamily::CTr,
            TraceFamily::F,
            TraceFamily::FTr,
            TraceFamily::R,
            TraceFamily::RTr,
        ] {
            for schema in [Schema::FullyMatching, Schema::PartiallyMatching, Schema::Extremal] {
                out.push(EquivalenceId::Trace(family, schema));
            }
        }
        for family in [SimFamily::PS, SimFamily::PCS, SimFamily::PFS, SimFamily::PRS] {
            for variant in [SimVariant::Dis, SimVariant::Plain, SimVariant::Sup] {
                out.push(EquivalenceId::Sim(family, variant));
            }
        }
        for variant in [BisimVariant::Dis, BisimVariant::Plain, BisimVariant::SupInf] {
            out.push(EquivalenceId::Bisim(variant));
        }
        out
    }

    pub fn name(&self) -> String {
        match self {
            EquivalenceId::Trace(family, schema) => {
                let base = match family {
                    TraceFamily::Tr => "ptr",
                    TraceFamily::CTr => "pctr",
                    TraceFamily::F => "pf",
                    TraceFamily::FTr => "pftr",
                    TraceFamily::R => "pr",
                    TraceFamily::RTr => "prtr",
                };
                match schema {
                    Schema::FullyMatching => format!("{base}-dis"),
                    Schema::PartiallyMatching => base.to_string(),
                    Schema::Extremal => format!("{base}-supinf"),
                }
            }
            EquivalenceId::Sim(family, variant) => {
                let base = match family {
                    SimFamily::PS => "ps",
                    SimFamily::PCS => "pcs",
                    SimFamily::PFS => "pfs",
                    SimFamily::PRS => "prs",
                };
                match variant {
                    SimVariant::Dis => format!("{base}-dis"),
                    SimVariant::Plain => base.to_string(),
                    SimVariant::Sup => format!("{base}-sup"),
                }
            }
            EquivalenceId::Bisim(variant) => match variant {
                BisimVariant::Dis => "pb-dis".into(),
                BisimVariant::Plain => "pb".into(),
                BisimVariant::SupInf => "pb-supinf".into(),
            },
        }
    }

    pub fn parse(s: &str) -> Option<EquivalenceId> {
        EquivalenceId::all().into_iter().find(|id| id.name() == s)
    }

    fn ct_relation(&self) -> CtRelation {
        match *self {
            EquivalenceId::Trace(f, s) => CtRelation::Trace(f, s),
            EquivalenceId::Sim(f, v) => CtRelation::Sim(f, v),
            EquivalenceId::Bisim(v) => CtRelation::Bisim(v),
        }
    }
}

/// Runs one relation check; `ct` switches to the randomized-scheduler
/// variant.
pub fn run_check(
    id: EquivalenceId,
    ct: bool,
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    depth: Option<usize>,
) -> Result<Verdict, SimError> {
    if ct {
        return check_ct_variant(id.ct_relation(), model, s1, s2, depth);
    }
    match id {
        EquivalenceId::Trace(family, schema) => {
            Ok(check_trace_equiv(family, schema, model, s1, s2, depth)?)
        }
        EquivalenceId::Sim(family, variant) => {
            Ok(check_simulation(family, variant, model, s1, s2).0)
        }
        EquivalenceId::Bisim(variant) => Ok(check_bisimulation(variant, model, s1, s2).0),
    }
}

/// Per-relation verdicts plus which implication arrows were exercised.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub rows: Vec<(String, Verdict)>,
    /// (finer, coarser) arrows confirmed on this pair.
    pub exercised_arrows: Vec<(String, String)>,
}

const TRACE_FAMS: [TraceFamily; 6] = [
    TraceFamily::Tr,
    TraceFamily::CTr,
    TraceFamily::F,
    TraceFamily::FTr,
    TraceFamily::R,
    TraceFamily::RTr,
];
const SIM_FAMS: [SimFamily; 4] =
    [SimFamily::PS, SimFamily::PCS, SimFamily::PFS, SimFamily::PRS];

/// Implication arrows (finer ⟹ coarser) across the spectrum.
pub fn spectrum_arrows() -> Vec<(EquivalenceId, EquivalenceId)> {
    use EquivalenceId::*;
    let mut arrows = Vec::new();
    for f in TRACE_FAMS {
        arrows.push((Trace(f, Schema::FullyMatching), Trace(f, Schema::PartiallyMatching)));
        arrows.push((Trace(f, Schema::PartiallyMatching), Trace(f, Schema::Extremal)));
    }
    for s in [Schema::FullyMatching, Schema::PartiallyMatching, Schema::Extremal] {
        arrows.push((Trace(TraceFamily::F, s), Trace(TraceFamily::CTr, s)));
        arrows.push((Trace(TraceFamily::CTr, s), Trace(TraceFamily::Tr, s)));
        arrows.push((Trace(TraceFamily::FTr, s), Trace(TraceFamily::F, s)));
    }
    for f in SIM_FAMS {
        arrows.push((Sim(f, SimVariant::Dis), Sim(f, SimVariant::Plain)));
    }
    for v in [SimVariant::Dis, SimVariant::Plain, SimVariant::Sup] {
        arrows.push((Sim(SimFamily::PRS, v), Sim(SimFamily::PCS, v)));
        arrows.push((Sim(SimFamily::PCS, v), Sim(SimFamily::PS, v)));
    }
    arrows.push((Bisim(BisimVariant::Dis), Bisim(BisimVariant::Plain)));
    arrows.push((Bisim(BisimVariant::Plain), Bisim(BisimVariant::SupInf)));
    arrows.push((Bisim(BisimVariant::Dis), Sim(SimFamily::PRS, SimVariant::Dis)));
    arrows.push((Bisim(BisimVariant::Plain), Sim(SimFamily::PRS, SimVariant::Plain)));
    arrows.push((Bisim(BisimVariant::SupInf), Sim(SimFamily::PRS, SimVariant::Sup)));
    // Bridges to the trace module.
    arrows.push((
        Sim(SimFamily::PS, SimVariant::Dis),
        Trace(TraceFamily::Tr, Schema::FullyMatching),
    ));
    arrows.push((
        Sim(SimFamily::PCS, SimVariant::Dis),
        Trace(TraceFamily::CTr, Schema::FullyMatching),
    ));
    arrows
}

/// Verdict coincidences: plain = sup per simulation family, PRS,σ = PFS,σ,
/// and RTr,dis = FTr,dis / R,dis = F,dis on finitely-branching models.
pub fn spectrum_coincidences() -> Vec<(EquivalenceId, EquivalenceId)> {
    use EquivalenceId::*;
    let mut out = Vec::new();
    for f in SIM_FAMS {
        out.push((Sim(f, SimVariant::Plain), Sim(f, SimVariant::Sup)));
    }
    for v in [SimVariant::Dis, SimVariant::Plain, SimVariant::Sup] {
        out.push((Sim(SimFamily::PRS, v), Sim(SimFamily::PFS, v)));
    }
    out.push((
        Trace(TraceFamily::RTr, Schema::FullyMatching),
        Trace(TraceFamily::FTr, Schema::FullyMatching),
    ));
    out.push((
        Trace(TraceFamily::R, Schema::FullyMatching),
        Trace(TraceFamily::F, Schema::FullyMatching),
    ));
    out
}

/// Runs every deterministic relation on the pair and cross-checks the
/// verdicts against the spectrum's implication arrows and coincidences; a
/// violation is an implementation bug and aborts with a diagnostic.
pub fn run_spectrum(
    model: &Nplts,
    s1: StateId,
    s2: StateId,
    depth: Option<usize>,
) -> Result<SpectrumReport, String> {
    let mut verdicts: BTreeMap<String, Verdict> = BTreeMap::new();
    let mut rows = Vec::new();
    for id in EquivalenceId::all() {
        let v = run_check(id, false, model, s1, s2, depth).map_err(|e| e.to_string())?;
        verdicts.insert(id.name(), v.clone());
        rows.push((id.name(), v));
    }
    let bounded = rows.iter().any(|(_, v)| v.bounded);
    let mut exercised = Vec::new();
    if !bounded {
        for (finer, coarser) in spectrum_arrows() {
            let vf = &verdicts[&finer.name()];
            let vc = &verdicts[&coarser.name()];
            if vf.equivalent && !vc.equivalent {
                return Err(format!(
                    "spectrum violation: {} holds but {} does not on ({}, {}) of '{}'",
                    finer.name(),
                    coarser.name(),
                    model.state_names[s1],
                    model.state_names[s2],
                    model.name
                ));
            }
            if vf.equivalent {
                exercised.push((finer.name(), coarser.name()));
            }
        }
        for (a, b) in spectrum_coincidences() {
            if verdicts[&a.name()].equivalent != verdicts[&b.name()].equivalent {
                return Err(format!(
                    "coincidence violation: {} and {} disagree on ({}, {}) of '{}'",
                    a.name(),
                    b.name(),
                    model.state_names[s1],
                    model.state_names[s2],
                    model.name
                ));
            }
        }
    }
    Ok(SpectrumReport { rows, exercised_arrows: exercised })
}

/// Expected corpus outcome for one relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Equal,
    Distinct,
}

/// A testing-equivalence expectation bundled with a corpus entry.
#[derive(Debug, Clone)]
pub struct PteExpectation {
    pub test_file: &'static str,
    pub variant: PteVariant,
    pub expect: Expect,
}

/// A bounded distinguishing-test search expectation.
#[derive(Debug, Clone)]
pub struct SearchExpectation {
    pub variant: PteVariant,
    pub depth: usize,
    pub branch: usize,
    pub expect_found: bool,
}

/// One bundled corpus model with its asserted expectations.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: &'static str,
    pub file: &'static str,
    pub s1: &'static str,
    pub s2: &'static str,
    /// (relation id, ct flag, expected outcome)
    pub expected: Vec<(&'static str, bool, Expect)>,
    pub pte: Vec<PteExpectation>,
    pub searches: Vec<SearchExpectation>,
    pub note: &'static str,
}

fn ids(names: &[&'static str], e: Expect) -> Vec<(&'static str, bool, Expect)> {
    names.iter().map(|&n| (n, false, e)).collect()
}

const ALL_DIS: [&str; 11] = [
    "ptr-dis", "pctr-dis", "pf-dis", "pftr-dis", "pr-dis", "prtr-dis", "ps-dis", "pcs-dis",
    "pfs-dis", "prs-dis", "pb-dis",
];
const TRACE_DIS: [&str; 6] = ["ptr-dis", "pctr-dis", "pf-dis", "pftr-dis", "pr-dis", "prtr-dis"];
const TRACE_PLAIN: [&str; 6] = ["ptr", "pctr", "pf", "pftr", "pr", "prtr"];
const TRACE_SUPINF: [&str; 6] =
    ["ptr-supinf", "pctr-supinf", "pf-supinf", "pftr-supinf", "pr-supinf", "prtr-supinf"];
const SIM_PLAIN_SUP: [&str; 8] = ["ps", "pcs", "pfs", "prs", "ps-sup", "pcs-sup", "pfs-sup", "prs-sup"];
const SIM_ALL: [&str; 12] = [
    "ps-dis", "pcs-dis", "pfs-dis", "prs-dis", "ps", "pcs", "pfs", "prs", "ps-sup", "pcs-sup",
    "pfs-sup", "prs-sup",
];
const BISIM_ALL: [&str; 3] = ["pb-dis", "pb", "pb-supinf"];

/// The bundled expectation table: only relationships asserted for each
/// corpus model, everything else left unasserted.
pub fn corpus_table() -> Vec<CorpusEntry> {
    let mut entries = Vec::new();

    entries.push(CorpusEntry {
        id: "nplts_example",
        file: "nplts_example.nplts",
        s1: "s1",
        s2: "s2",
        expected: vec![],
        pte: vec![],
        searches: vec![],
        note: "running example; no asserted relationships",
    });

    let mut expected = ids(&ALL_DIS, Expect::Distinct);
    expected.extend(ids(&TRACE_PLAIN, Expect::Equal));
    expected.extend(ids(&TRACE_SUPINF, Expect::Equal));
    expected.extend(ids(&SIM_PLAIN_SUP, Expect::Equal));
    expected.extend(ids(&["pb", "pb-supinf"], Expect::Equal));
    entries.push(CorpusEntry {
        id: "dis_vs_by",
        file: "dis_vs_by.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![],
        searches: vec![],
        note: "distinguished by every dis relation, identified by every plain and extremal one",
    });

    let mut expected = ids(&TRACE_DIS, Expect::Distinct);
    expected.extend(ids(&TRACE_PLAIN, Expect::Distinct));
    expected.extend(ids(&TRACE_SUPINF, Expect::Equal));
    expected.push(("pb", true, Expect::Equal)); // ct-bisimilar
    entries.push(CorpusEntry {
        id: "by_vs_supinf",
        file: "by_vs_supinf.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![],
        searches: vec![],
        note: "middle 1/2-1/2 resolution unmatched trace-by-trace; extremal relations and ct-bisimilarity identify",
    });

    let mut expected = Vec::new();
    for base in ["pf", "pftr", "pr", "prtr"] {
        expected.extend(ids(
            &[
                Box::leak(format!("{base}-dis").into_boxed_str()) as &'static str,
                Box::leak(base.to_string().into_boxed_str()),
                Box::leak(format!("{base}-supinf").into_boxed_str()),
            ],
            Expect::Distinct,
        ));
    }
    expected.extend(ids(&["pfs-dis", "pfs", "pfs-sup", "prs-dis", "prs", "prs-sup"], Expect::Distinct));
    expected.extend(ids(
        &["ptr-dis", "ptr", "ptr-supinf", "pctr-dis", "pctr", "pctr-supinf"],
        Expect::Equal,
    ));
    expected.extend(ids(&["ps-dis", "ps", "ps-sup", "pcs-dis", "pcs", "pcs-sup"], Expect::Equal));
    entries.push(CorpusEntry {
        id: "pf_vs_ptr",
        file: "pf_vs_ptr.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![PteExpectation {
            test_file: "pf_vs_ptr_test.nplts",
            variant: PteVariant::SupInf,
            expect: Expect::Distinct,
        }],
        searches: vec![],
        note: "failure pair (a, {c}) separates; plain traces and plain simulations identify",
    });

    let mut expected = Vec::new();
    for base in ["pctr", "pf", "pftr", "pr", "prtr"] {
        expected.extend(ids(
            &[
                Box::leak(format!("{base}-dis").into_boxed_str()) as &'static str,
                Box::leak(base.to_string().into_boxed_str()),
                Box::leak(format!("{base}-supinf").into_boxed_str()),
            ],
            Expect::Distinct,
        ));
    }
    expected.extend(ids(
        &["pcs-dis", "pcs", "pcs-sup", "pfs-dis", "pfs", "pfs-sup", "prs-dis", "prs", "prs-sup"],
        Expect::Distinct,
    ));
    expected.extend(ids(&["ptr-dis", "ptr", "ptr-supinf", "ps-dis", "ps", "ps-sup"], Expect::Equal));
    entries.push(CorpusEntry {
        id: "ptrsupinf_anomaly_maxres",
        file: "ptrsupinf_anomaly_maxres.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![PteExpectation {
            test_file: "ptrsupinf_anomaly_maxres_test.nplts",
            variant: PteVariant::SupInf,
            expect: Expect::Distinct,
        }],
        searches: vec![],
        note: "completed trace a: 1 vs 0; plain traces and plain simulation identify",
    });

    let mut expected = ids(&TRACE_DIS, Expect::Distinct);
    expected.extend(ids(&TRACE_PLAIN, Expect::Distinct));
    expected.extend(ids(&TRACE_SUPINF, Expect::Distinct));
    expected.extend(ids(&SIM_PLAIN_SUP, Expect::Equal));
    expected.extend(ids(&["pb", "pb-supinf"], Expect::Equal));
    entries.push(CorpusEntry {
        id: "pb_pbsupinf_vs_others",
        file: "pb_pbsupinf_vs_others.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![],
        searches: vec![],
        note: "max probability of trace a b c: 17/25 vs 61/100; bisimilar nonetheless",
    });

    let mut expected = ids(&TRACE_DIS, Expect::Equal);
    expected.extend(ids(&TRACE_PLAIN, Expect::Equal));
    expected.extend(ids(&TRACE_SUPINF, Expect::Equal));
    expected.extend(ids(&SIM_ALL, Expect::Distinct));
    expected.extend(ids(&BISIM_ALL, Expect::Distinct));
    entries.push(CorpusEntry {
        id: "pbdis_vs_ptetbtdis",
        file: "pbdis_vs_ptetbtdis.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![],
        searches: vec![],
        note: "probabilistic choice moved across the b-step: trace relations blind, branching relations not",
    });

    entries.push(CorpusEntry {
        id: "ptesupinf_anomaly",
        file: "ptesupinf_anomaly.nplts",
        s1: "s1",
        s2: "s2",
        expected: ids(
            &[
                "ptr-dis", "ptr", "pctr-dis", "pctr", "pf-dis", "pftr-dis", "pr-dis", "prtr-dis",
                "pftr", "pr", "prtr",
            ],
            Expect::Equal,
        ),
        pte: vec![PteExpectation {
            test_file: "ptesupinf_anomaly_test.nplts",
            variant: PteVariant::SupInf,
            expect: Expect::Distinct,
        }],
        searches: vec![SearchExpectation {
            variant: PteVariant::SupInf,
            depth: 3,
            branch: 3,
            expect_found: true,
        }],
        note: "success envelopes (1,0) vs (1/2,1/2) under the bundled fan test",
    });

    let mut expected = Vec::new();
    for base in ["pctr", "pf", "pftr", "pr", "prtr"] {
        expected.extend(ids(
            &[
                Box::leak(format!("{base}-dis").into_boxed_str()) as &'static str,
                Box::leak(base.to_string().into_boxed_str()),
                Box::leak(format!("{base}-supinf").into_boxed_str()),
            ],
            Expect::Distinct,
        ));
    }
    entries.push(CorpusEntry {
        id: "pfsupinf_vs_ptesupinf",
        file: "pfsupinf_vs_ptesupinf.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![],
        searches: vec![SearchExpectation {
            variant: PteVariant::SupInf,
            depth: 3,
            branch: 3,
            expect_found: false,
        }],
        note: "completed trace a b: max 6/25 vs 21/100; no bounded test separates the envelopes",
    });

    entries.push(CorpusEntry {
        id: "ptetbtsupinf_vs_ptrsupinf",
        file: "ptetbtsupinf_vs_ptrsupinf.nplts",
        s1: "s1",
        s2: "s2",
        expected: ids(
            &["ptr-dis", "ptr", "ptr-supinf", "pctr-dis", "pctr", "pctr-supinf"],
            Expect::Equal,
        ),
        pte: vec![PteExpectation {
            test_file: "ptetbtsupinf_vs_ptrsupinf_test.nplts",
            variant: PteVariant::Tbt,
            expect: Expect::Distinct,
        }],
        searches: vec![],
        note: "success-trace a b value sets {1/2} vs {0, 1/2} under the bundled fan test",
    });

    let mut expected = Vec::new();
    for base in ["pctr", "pf", "pftr"] {
        expected.extend(ids(
            &[
                Box::leak(format!("{base}-dis").into_boxed_str()) as &'static str,
                Box::leak(base.to_string().into_boxed_str()),
                Box::leak(format!("{base}-supinf").into_boxed_str()),
            ],
            Expect::Distinct,
        ));
    }
    entries.push(CorpusEntry {
        id: "pfsupinf_vs_ptetbtsupinf",
        file: "pfsupinf_vs_ptetbtsupinf.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![],
        searches: vec![],
        note: "dead halves distributed differently across the fans",
    });

    entries.push(CorpusEntry {
        id: "prtrdis_vs_prdis",
        file: "prtrdis_vs_prdis.nplts",
        s1: "s1",
        s2: "s2",
        expected: vec![
            ("prtr-dis", false, Expect::Distinct),
            ("pftr-dis", false, Expect::Distinct),
            ("pr-dis", false, Expect::Equal),
            ("pf-dis", false, Expect::Equal),
        ],
        pte: vec![],
        searches: vec![],
        note: "decorated traces see which ready set carries which split; pairs do not",
    });

    entries.push(CorpusEntry {
        id: "pftr_vs_pf",
        file: "pftr_vs_pf.nplts",
        s1: "s1",
        s2: "s2",
        expected: vec![
            ("pftr-dis", false, Expect::Distinct),
            ("pftr", false, Expect::Distinct),
            ("pftr-supinf", false, Expect::Distinct),
            ("prtr-dis", false, Expect::Distinct),
            ("prtr", false, Expect::Distinct),
            ("prtr-supinf", false, Expect::Distinct),
            ("pf", false, Expect::Equal),
            ("pf-supinf", false, Expect::Equal),
            ("pr", false, Expect::Equal),
            ("pr-supinf", false, Expect::Equal),
        ],
        pte: vec![],
        searches: vec![],
        note: "deep e/f continuations swapped between branches",
    });

    let mut expected = Vec::new();
    for base in ["ptr", "pctr", "pf", "pftr"] {
        expected.extend(ids(
            &[
                Box::leak(format!("{base}-dis").into_boxed_str()) as &'static str,
                Box::leak(base.to_string().into_boxed_str()),
                Box::leak(format!("{base}-supinf").into_boxed_str()),
            ],
            Expect::Distinct,
        ));
    }
    expected.push(("pr-dis", false, Expect::Distinct));
    expected.push(("prtr-dis", false, Expect::Distinct));
    expected.extend(ids(&["pr", "pr-supinf", "prtr", "prtr-supinf"], Expect::Equal));
    entries.push(CorpusEntry {
        id: "pctrdis_vs_prtr",
        file: "pctrdis_vs_prtr.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![],
        searches: vec![],
        note: "max probability of trace a b: 1 vs 1/2; plain/extremal ready relations identify",
    });

    entries.push(CorpusEntry {
        id: "prtr_vs_pctrdis",
        file: "prtr_vs_pctrdis.nplts",
        s1: "s1",
        s2: "s2",
        expected: vec![
            ("pr", false, Expect::Distinct),
            ("pr-supinf", false, Expect::Distinct),
            ("prtr", false, Expect::Distinct),
            ("prtr-supinf", false, Expect::Distinct),
            ("ptr", false, Expect::Equal),
            ("ptr-supinf", false, Expect::Equal),
            ("pctr-dis", false, Expect::Equal),
            ("pctr", false, Expect::Equal),
            ("pctr-supinf", false, Expect::Equal),
            ("pf", false, Expect::Equal),
            ("pf-supinf", false, Expect::Equal),
            ("pftr", false, Expect::Equal),
            ("pftr-supinf", false, Expect::Equal),
        ],
        pte: vec![],
        searches: vec![],
        note: "ready pair (a, {b,c}) attainable on the right only",
    });

    entries.push(CorpusEntry {
        id: "pr_vs_prtr",
        file: "pr_vs_prtr.nplts",
        s1: "s1",
        s2: "s2",
        expected: vec![
            ("pr-dis", false, Expect::Distinct),
            ("pr", false, Expect::Distinct),
            ("pr-supinf", false, Expect::Distinct),
            ("prtr-dis", false, Expect::Distinct),
            ("prtr", false, Expect::Equal),
            ("prtr-supinf", false, Expect::Equal),
        ],
        pte: vec![],
        searches: vec![],
        note: "ready pair (a b f, {}) with max probability 1 vs 1/2",
    });

    let mut expected = ids(&SIM_ALL, Expect::Equal);
    expected.extend(ids(&BISIM_ALL, Expect::Distinct));
    entries.push(CorpusEntry {
        id: "pbdis_vs_prsdis",
        file: "pbdis_vs_prsdis.nplts",
        s1: "s1",
        s2: "s2",
        expected,
        pte: vec![],
        searches: vec![],
        note: "extra deterministic a-branch simulable but not bisimulable",
    });

    entries
}

/// One checked expectation.
#[derive(Debug, Clone)]
pub struct CorpusRow {
    pub entry: &'static str,
    pub check: String,
    pub expected: Expect,
    pub got: Expect,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Runs every bundled expectation against the fixtures in `dir`; entries
/// whose file is absent are skipped (an empty dir yields an empty table).
pub fn run_corpus(dir: &Path, filter: Option<&str>) -> Result<Vec<CorpusRow>, String> {
    let mut rows = Vec::new();
    for entry in corpus_table() {
        if let Some(f) = filter {
            if !entry.id.contains(f) {
                continue;
            }
        }
        let path = dir.join(entry.file);
        if !path.exists() {
            continue;
        }
        let src = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", entry.file))?;
        let model = parse_dsl(&src).map_err(|e| format!("{}: {e}", entry.file))?;
        let s1 = model
            .state_by_name(entry.s1)
            .ok_or_else(|| format!("{}: no state {}", entry.file, entry.s1))?;
        let s2 = model
            .state_by_name(entry.s2)
            .ok_or_else(|| format!("{}: no state {}", entry.file, entry.s2))?;
        for (name, ct, expect) in &entry.expected {
            let id = EquivalenceId::parse(name)
                .ok_or_else(|| format!("bad relation id {name} in table"))?;
            let v = run_check(id, *ct, &model, s1, s2, None).map_err(|e| e.to_string())?;
            let got = if v.equivalent { Expect::Equal } else { Expect::Distinct };
            rows.push(CorpusRow {
                entry: entry.id,
                check: if *ct { format!("{name} (ct)") } else { name.to_string() },
                expected: *expect,
                got,
                pass: got == *expect,
                witness: v.witness.map(|w| w.to_string()),
            });
        }
        for pte in &entry.pte {
            let tpath = dir.join(pte.test_file);
            let tsrc =
                std::fs::read_to_string(&tpath).map_err(|e| format!("{}: {e}", pte.test_file))?;
            let test = parse_dsl(&tsrc).map_err(|e| format!("{}: {e}", pte.test_file))?;
            let o = test.designated.first().copied().unwrap_or(0);
            let v = check_pte(pte.variant, &model, s1, s2, &[(test, o)]);
            let got = if v.equivalent { Expect::Equal } else { Expect::Distinct };
            rows.push(CorpusRow {
                entry: entry.id,
                check: format!("pte-{:?} with {}", pte.variant, pte.test_file),
                expected: pte.expect,
                got,
                pass: got == pte.expect,
                witness: v.witness.map(|w| w.to_string()),
            });
        }
        for search in &entry.searches {
            let found = search_distinguishing_test(
                &model,
                s1,
                s2,
                search.variant,
                search.depth,
                search.branch,
            )
            .is_some();
            rows.push(CorpusRow {
                entry: entry.id,
                check: format!(
                    "search pte-{:?} depth {} branch {}",
                    search.variant, search.depth, search.branch
                ),
                expected: if search.expect_found { Expect::Distinct } else { Expect::Equal },
                got: if found { Expect::Distinct } else { Expect::Equal },
                pass: found == search.expect_found,
                witness: None,
            });
        }
    }
    Ok(rows)
}

/// SplitMix64: tiny deterministic PRNG, adequate for reproducible fixtures.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Reproducible random model: ≤ `max_states` states, ≤ `max_branch`
/// transitions per state, probabilities with denominators ≤ 12; acyclic
/// (transitions point to higher-numbered states) when requested.
pub fn random_model(seed: u64, max_states: usize, max_branch: usize, acyclic: bool) -> Nplts {
    assert!(max_states >= 1 && max_branch >= 1);
    let mut rng = SplitMix64(seed.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(1));
    let n = 1 + rng.below(max_states as u64) as usize;
    let actions = ["a", "b", "c"];
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut transitions = Vec::new();
    for s in 0..n {
        let candidates: Vec<usize> = if acyclic { (s + 1..n).collect() } else { (0..n).collect() };
        if candidates.is_empty() {
            continue;
        }
        let k = rng.below(max_branch as u64 + 1) as usize;
        for _ in 0..k {
            let label = actions[rng.below(actions.len() as u64) as usize];
            let width = 1 + rng.below(2.min(candidates.len() as u64)) as usize;
            let mut targets: Vec<usize> = Vec::new();
            while targets.len() < width {
                let t = candidates[rng.below(candidates.len() as u64) as usize];
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
            targets.sort_unstable();
            let support: Vec<(String, Rat)> = if width == 1 {
                vec![(states[targets[0]].clone(), rat(1, 1))]
            } else {
                let den = 2 + rng.below(11) as i64; // 2..=12
                let num = 1 + rng.below(den as u64 - 1) as i64; // 1..den
                vec![
                    (states[targets[0]].clone(), rat(num, den)),
                    (states[targets[1]].clone(), rat(den - num, den)),
                ]
            };
            transitions.push((states[s].clone(), label.to_string(), support));
        }
    }
    let raw = RawNplts {
        name: format!("rand_{seed}"),
        designated: vec![states[0].clone()],
        states,
        success: vec![],
        transitions,
    };
    Nplts::validate(&raw).expect("generated model is well-formed")
}

/// Greedy deterministic shrinking: drop transitions, then non-designated
/// states, as long as `violates` still holds.
pub fn shrink_model(model: &Nplts, violates: impl Fn(&Nplts) -> bool) -> Nplts {
    let mut current = model.clone();
    loop {
        let mut shrunk = false;
        // Try dropping each transition.
        for skip in 0..current.transitions.len() {
            let raw = current.to_raw_without(Some(skip), None);
            if let Ok(m) = Nplts::validate(&raw) {
                if violates(&m) {
                    current = m;
                    shrunk = true;
                    break;
                }
            }
        }
        if shrunk {
            continue;
        }
        for state in 0..current.num_states() {
            if current.designated.contains(&state) {
                continue;
            }
            let raw = current.to_raw_without(None, Some(state));
            if let Ok(m) = Nplts::validate(&raw) {
                if violates(&m) {
                    current = m;
                    shrunk = true;
                    break;
                }
            }
        }
        if !shrunk {
            return current;
        }
    }
}

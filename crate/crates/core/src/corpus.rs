//! Bundled example instances with their expected verdicts.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{PinnedGraph, VertexId};
use crate::io::GraphDocument;
use crate::report::AnalysisReport;

pub struct Instance {
    pub name: &'static str,
    pub description: &'static str,
    pub graph_json: &'static str,
    pub expected_json: &'static str,
}

macro_rules! instance {
    ($name:literal, $description:literal) => {
        Instance {
            name: $name,
            description: $description,
            graph_json: include_str!(concat!("../corpus/", $name, ".json")),
            expected_json: include_str!(concat!("../corpus/", $name, ".expected.json")),
        }
    };
}

pub const INSTANCES: &[Instance] = &[
    instance!("dyad2", "single inner vertex on two pins in the plane"),
    instance!("stacked_dyads", "a dyad resting on another dyad; two components in a chain"),
    instance!("triad2", "triangle with one pin bar per vertex; plane Assur"),
    instance!(
        "multi_component2",
        "four plane components: triad, dyad on it, dyad on both, and an independent pinned 4-cycle"
    ),
    instance!("overcounted2", "top count holds but an inner K4 is overbraced; not isostatic"),
    instance!("triplet3", "single inner vertex on three pins in space"),
    instance!("strong3_assur", "triangle, two pins per vertex; removing any bar moves every vertex"),
    instance!(
        "weak3_assur",
        "space Assur graph where removing the bar q1-p4 moves only the triangle q1 q2 q3"
    ),
    instance!(
        "vertex_removal3",
        "space Assur graph where deleting E moves B, C and D but not A"
    ),
    instance!(
        "banana_decomposable3",
        "counts pass and the graph decomposes, but the top component is a hinged banana"
    ),
    instance!(
        "double_banana_pinned",
        "pinned double banana: every necessary count passes, rank is deficient"
    ),
    instance!("overcounted3", "inner K5 with one pin bar per vertex; fails the unpinned count"),
];

pub fn instance(name: &str) -> Result<&'static Instance> {
    INSTANCES
        .iter()
        .find(|i| i.name == name)
        .ok_or_else(|| Error::UnknownInstance(name.to_owned()))
}

impl Instance {
    pub fn document(&self) -> GraphDocument {
        GraphDocument::parse(self.graph_json).expect("bundled instance parses")
    }

    pub fn graph(&self) -> PinnedGraph {
        self.document().graph
    }

    pub fn expected(&self) -> ExpectedVerdict {
        serde_json::from_str(self.expected_json).expect("bundled sidecar parses")
    }
}

/// Verdicts recorded for a corpus instance with default flags and seed 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedVerdict {
    pub name: String,
    pub counts_pass: bool,
    pub violations: usize,
    pub isostatic: bool,
    pub generic_rank: usize,
    pub rank_deficit: usize,
    /// Inner vertex sets of the decomposition; absent without an orientation.
    pub components: Option<Vec<BTreeSet<VertexId>>>,
    pub assur: bool,
    pub strongly_assur: bool,
}

impl ExpectedVerdict {
    pub fn from_report(name: &str, report: &AnalysisReport) -> Self {
        ExpectedVerdict {
            name: name.to_owned(),
            counts_pass: report.counts.pass.unwrap_or(false),
            violations: report.counts.violations.as_ref().map_or(0, Vec::len),
            isostatic: report.certificate.isostatic,
            generic_rank: report.rank.rank,
            rank_deficit: report.rank.deficit(),
            components: report.decomposition.as_ref().map(|d| d.partition()),
            assur: report.verdict.is_assur,
            strongly_assur: report.verdict.is_strongly_assur,
        }
    }

    /// Field-by-field differences against a report; empty when it matches.
    pub fn mismatches(&self, report: &AnalysisReport) -> Vec<String> {
        let got = ExpectedVerdict::from_report(&self.name, report);
        let mut out = Vec::new();
        macro_rules! cmp {
            ($f:ident) => {
                if got.$f != self.$f {
                    out.push(format!("{}: expected {:?}, got {:?}", stringify!($f), self.$f, got.$f));
                }
            };
        }
        cmp!(counts_pass);
        cmp!(violations);
        cmp!(isostatic);
        cmp!(generic_rank);
        cmp!(rank_deficit);
        cmp!(components);
        cmp!(assur);
        cmp!(strongly_assur);
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("verdict serializes");
        s.push('\n');
        s
    }
}

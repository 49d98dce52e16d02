//! The full analysis pipeline behind `assur-kit analyze`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::assur::{classify_drivers, is_d_assur, route_counts, AssurVerdict, DriverClassification, RouteCounts};
use crate::counts::{pinned_laman_check_2d, subgraph_counts_bruteforce, top_count, CountViolation, BRUTE_FORCE_COUNTS_CAP};
use crate::decomposition::{scc_decompose, Decomposition};
use crate::error::Result;
use crate::field::{PrimeField, ScalarMode};
use crate::graph::{Orientation, PinnedGraph, VertexId};
use crate::io::FORMAT;
use crate::orientation::{find_d_orientation, Infeasible};
use crate::rigidity::{
    block_triangular_verify, generic_rank_report, is_pinned_isostatic, sample_generic_configuration, seeded_rng,
    trial_seed, IsostaticCertificate, RankReport,
};

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub seed: u64,
    pub trials: usize,
    /// Arithmetic for moving-set decisions. Rank decisions are always exact.
    pub motion_mode: ScalarMode,
    /// Skip per-edge driver classification.
    pub skip_drivers: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            seed: 0,
            trials: crate::rigidity::DEFAULT_TRIALS,
            motion_mode: ScalarMode::PrimeField,
            skip_drivers: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub inner: usize,
    pub pinned: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsReport {
    pub top_count: bool,
    /// `None` when the graph is above the brute-force cap.
    pub violations: Option<Vec<CountViolation>>,
    /// Exact plane test, dimension 2 only.
    pub pinned_laman: Option<bool>,
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentVerdict {
    pub inner_vertices: BTreeSet<VertexId>,
    pub verdict: AssurVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format: String,
    pub graph: GraphSummary,
    pub counts: CountsReport,
    pub orientation: Option<Orientation>,
    pub infeasible: Option<Infeasible>,
    pub decomposition: Option<Decomposition>,
    pub rank: RankReport,
    pub certificate: IsostaticCertificate,
    pub route_counts: Option<RouteCounts>,
    pub verdict: AssurVerdict,
    pub components: Vec<ComponentVerdict>,
    pub drivers: Option<DriverClassification>,
    /// Disagreements between routes that must agree. Nonempty means a bug.
    pub inconsistencies: Vec<String>,
}

impl AnalysisReport {
    pub fn is_consistent(&self) -> bool {
        self.inconsistencies.is_empty()
    }
}

pub fn analyze(graph: &PinnedGraph, name: Option<String>, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    graph.ensure_valid()?;
    let mut issues = Vec::new();

    let violations = if graph.inner.len() <= BRUTE_FORCE_COUNTS_CAP {
        Some(subgraph_counts_bruteforce(graph)?)
    } else {
        None
    };
    let pinned_laman = if graph.dimension == 2 {
        Some(pinned_laman_check_2d(graph)?)
    } else {
        None
    };
    let top = top_count(graph);
    let pass = violations.as_ref().map(|v| top && v.is_empty()).or(pinned_laman);
    if let (Some(a), Some(b)) = (violations.as_ref().map(|v| top && v.is_empty()), pinned_laman) {
        if a != b {
            issues.push(format!("plane count test says {b}, subgraph enumeration says {a}"));
        }
    }

    let (orientation, infeasible) = match find_d_orientation(graph) {
        Ok(o) => (Some(o), None),
        Err(inf) => (None, Some(inf)),
    };
    if pass == Some(true) && orientation.is_none() {
        issues.push("counts pass but no d-directed orientation was found".to_owned());
    }
    let decomposition = orientation.as_ref().map(|o| scc_decompose(graph, o)).transpose()?;

    let rank = generic_rank_report(graph, opts.trials, opts.seed);
    let certificate = is_pinned_isostatic(graph, opts.seed);
    if certificate.isostatic && pass == Some(false) {
        issues.push("isostatic although a necessary count fails".to_owned());
    }
    if graph.dimension == 2 && pinned_laman.is_some() && pinned_laman != Some(certificate.isostatic) {
        issues.push("plane count test disagrees with the exact rank".to_owned());
    }

    let verdict = is_d_assur(graph, opts.seed)?;
    if !verdict.route_agreement.agree() {
        issues.push(format!("Assur routes disagree: {:?}", verdict.route_agreement));
    }

    let mut route = None;
    let mut components = Vec::new();
    let mut drivers = None;
    if certificate.isostatic {
        let decomp = decomposition.as_ref().expect("isostatic graphs have an orientation");
        let counts = route_counts(graph, opts.seed)?;
        if !counts.agree() {
            issues.push(format!("component counts disagree: {counts:?}"));
        }
        route = Some(counts);

        let s = trial_seed(opts.seed, 0);
        let config = sample_generic_configuration(graph, s, ScalarMode::PrimeField);
        let prime = PrimeField::random(&mut seeded_rng(s, 0x6274));
        let view = block_triangular_verify(graph, &config, decomp, &prime)?;
        if !view.is_block_triangular {
            issues.push("permuted rigidity matrix is not block triangular".to_owned());
        }

        for comp in &decomp.components {
            let sub = graph.component_graph(&comp.inner_vertices, &comp.edges);
            let v = is_d_assur(&sub, opts.seed)?;
            if !v.is_assur {
                issues.push(format!("component {:?} is not Assur", comp.inner_vertices));
            }
            if !v.route_agreement.agree() {
                issues.push(format!("Assur routes disagree on component {:?}", comp.inner_vertices));
            }
            if graph.dimension == 2 && v.is_assur && !v.is_strongly_assur {
                issues.push(format!("plane Assur component {:?} is not strongly Assur", comp.inner_vertices));
            }
            components.push(ComponentVerdict {
                inner_vertices: comp.inner_vertices.clone(),
                verdict: v,
            });
        }
        if !opts.skip_drivers {
            drivers = Some(classify_drivers(graph, opts.trials, opts.seed, opts.motion_mode)?);
        }
    } else if let Some(decomp) = &decomposition {
        // report per-component isostaticity even when the whole graph fails
        for comp in &decomp.components {
            let sub = graph.component_graph(&comp.inner_vertices, &comp.edges);
            components.push(ComponentVerdict {
                inner_vertices: comp.inner_vertices.clone(),
                verdict: is_d_assur(&sub, opts.seed)?,
            });
        }
    }

    Ok(AnalysisReport {
        format: FORMAT.to_owned(),
        graph: GraphSummary {
            name,
            dimension: graph.dimension,
            inner: graph.inner.len(),
            pinned: graph.pinned.len(),
            edges: graph.edges.len(),
        },
        counts: CountsReport {
            top_count: top,
            violations,
            pinned_laman,
            pass,
        },
        orientation,
        infeasible,
        decomposition,
        rank,
        certificate,
        route_counts: route,
        verdict,
        components,
        drivers,
        inconsistencies: issues,
    })
}

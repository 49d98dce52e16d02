//! JSON documents for graphs and orientations.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Orientation, PinnedGraph, VertexId};
use crate::rigidity::Configuration;

/// Version tag carried by every document.
pub const FORMAT: &str = "assur-kit/1";

/// A pinned graph with optional coordinates.
///
/// ```json
/// {"format": "assur-kit/1", "name": "dyad2", "dimension": 2,
///  "inner": ["v"], "pinned": ["p1", "p2"],
///  "edges": [{"id": "e1", "u": "v", "v": "p1"}, {"id": "e2", "u": "v", "v": "p2"}],
///  "coordinates": {"v": [0, 0], "p1": [1, 0], "p2": [0, 1]}}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub graph: PinnedGraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<BTreeMap<VertexId, Vec<f64>>>,
}

impl GraphDocument {
    pub fn new(graph: PinnedGraph) -> Self {
        GraphDocument {
            format: FORMAT.to_owned(),
            name: None,
            graph,
            coordinates: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        check_format(&doc.format)?;
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Pretty JSON with a trailing newline. Sets and maps are sorted, edges
    /// keep their order, so parse → emit is stable.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    /// Given coordinates as a configuration; all vertices must be covered.
    pub fn configuration(&self) -> Result<Option<Configuration>> {
        let Some(coords) = &self.coordinates else {
            return Ok(None);
        };
        let config = Configuration::from_f64(
            self.graph.dimension,
            coords.iter().map(|(v, p)| (v.clone(), p.clone())),
        )?;
        config.covers(&self.graph)?;
        Ok(Some(config))
    }
}

fn check_format(format: &str) -> Result<()> {
    if format == FORMAT {
        Ok(())
    } else {
        Err(Error::Parse(format!("unsupported format `{format}`, expected `{FORMAT}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationDocument {
    pub format: String,
    pub tails: Orientation,
}

impl OrientationDocument {
    pub fn new(tails: Orientation) -> Self {
        OrientationDocument {
            format: FORMAT.to_owned(),
            tails,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: OrientationDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        check_format(&doc.format)?;
        Ok(doc)
    }
}

//! JSON graph format with canonical serialization.
//!
//! ```text
//! {"vertices":["a","b"],"edges":[["a","b"]],"boundary":{"vertices":["b"],"edges":[]}}
//! ```
//! Cobordisms carry `"in"` and `"out"` markings in the same shape as `"boundary"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BoundaryMarking, Cobordism, Graph};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MarkingDocument {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<MarkingDocument>,
    #[serde(default, rename = "in", skip_serializing_if = "Option::is_none")]
    pub input: Option<MarkingDocument>,
    #[serde(default, rename = "out", skip_serializing_if = "Option::is_none")]
    pub output: Option<MarkingDocument>,
}

/// A graph together with whichever markings its document carried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Graph,
    pub boundary: Option<BoundaryMarking>,
    pub input: Option<BoundaryMarking>,
    pub output: Option<BoundaryMarking>,
}

impl GraphFile {
    pub fn plain(graph: Graph) -> GraphFile {
        GraphFile {
            graph,
            boundary: None,
            input: None,
            output: None,
        }
    }

    /// The cobordism described by the `in` and `out` markings, if both are present.
    pub fn cobordism(&self) -> Result<Cobordism> {
        match (&self.input, &self.output) {
            (Some(i), Some(o)) => Cobordism::new(self.graph.clone(), i.clone(), o.clone()),
            _ => Err(Error::InvalidMarking(
                "document lacks `in` or `out` marking".into(),
            )),
        }
    }
}

fn marking(g: &Graph, doc: &MarkingDocument) -> Result<BoundaryMarking> {
    BoundaryMarking::new(g, &doc.vertices, doc.edges.iter().map(|[a, b]| (a, b)))
}

fn marking_doc(g: &Graph, m: &BoundaryMarking) -> MarkingDocument {
    MarkingDocument {
        vertices: m.ids(g).into_iter().map(String::from).collect(),
        edges: m
            .edge_ids(g)
            .into_iter()
            .map(|(a, b)| [a.to_string(), b.to_string()])
            .collect(),
    }
}

/// Parses a graph document.
pub fn parse(json: &str) -> Result<GraphFile> {
    let doc: GraphDocument = serde_json::from_str(json).map_err(|e| Error::Json(e.to_string()))?;
    from_document(&doc)
}

pub fn from_document(doc: &GraphDocument) -> Result<GraphFile> {
    let graph = Graph::new(
        doc.vertices.iter().cloned(),
        doc.edges.iter().map(|[a, b]| (a, b)),
    )?;
    let boundary = doc
        .boundary
        .as_ref()
        .map(|m| marking(&graph, m))
        .transpose()?;
    let input = doc.input.as_ref().map(|m| marking(&graph, m)).transpose()?;
    let output = doc
        .output
        .as_ref()
        .map(|m| marking(&graph, m))
        .transpose()?;
    Ok(GraphFile {
        graph,
        boundary,
        input,
        output,
    })
}

pub fn to_document(file: &GraphFile) -> GraphDocument {
    let g = &file.graph;
    GraphDocument {
        vertices: g.vertex_ids().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|&(a, b)| [g.id(a).to_string(), g.id(b).to_string()])
            .collect(),
        boundary: file.boundary.as_ref().map(|m| marking_doc(g, m)),
        input: file.input.as_ref().map(|m| marking_doc(g, m)),
        output: file.output.as_ref().map(|m| marking_doc(g, m)),
    }
}

/// Canonical compact serialization: sorted vertices, sorted edges, fixed key order.
pub fn dump(file: &GraphFile) -> String {
    serde_json::to_string(&to_document(file)).expect("document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let text = r#"{"vertices":["c","a","b"],"edges":[["b","a"],["c","b"],["a","a"]],
            "boundary":{"vertices":["c"]}}"#;
        let first = dump(&parse(text).unwrap());
        assert_eq!(
            first,
            r#"{"vertices":["a","b","c"],"edges":[["a","a"],["a","b"],["b","c"]],"boundary":{"vertices":["c"],"edges":[]}}"#
        );
        assert_eq!(dump(&parse(&first).unwrap()), first);
    }

    #[test]
    fn cobordism_markings() {
        let text = r#"{"vertices":["1","2","3"],"edges":[["1","2"],["2","3"]],
            "in":{"vertices":["1"]},"out":{"vertices":["3"]}}"#;
        let f = parse(text).unwrap();
        let c = f.cobordism().unwrap();
        assert_eq!(c.input.vertices(), &[0]);
        assert_eq!(c.output.vertices(), &[2]);
    }

    #[test]
    fn rejects_unknown_endpoint() {
        assert!(parse(r#"{"vertices":["a"],"edges":[["a","b"]]}"#).is_err());
        assert!(matches!(parse("{"), Err(Error::Json(_))));
    }
}

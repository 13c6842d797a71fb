//! Graph files.
//!
//! Text form:
//!
//! ```text
//! # comment
//! n 6 k 3
//! names v1 v2 v3 v4 v5 v6
//! sigma 1 2 1 2 3 1
//! v1 v2
//! v1 v4
//! ```
//!
//! The header is mandatory (`k` is optional); `names` and `sigma` lines are
//! optional and must precede the edges. Endpoints are names or 0-based
//! indices. The structured form is JSON:
//! `{"n": 6, "k": 3, "edges": [[0, 1], ["v1", "v4"]], "names": {"v1": 0}, "sigma": [..]}`.
//! Both forms reject self-loops and duplicate edges.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, GraphError};
use crate::game::{payoff, Color, Coloring};
use crate::graph::Graph;

/// A graph plus the optional metadata a file may carry.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphDocument {
    pub graph: Graph,
    pub k: Option<usize>,
    /// `names[i]` is the display name of vertex `i`.
    pub names: Option<Vec<String>>,
    pub sigma: Option<Vec<Color>>,
}

impl GraphDocument {
    pub fn bare(graph: Graph) -> Self {
        GraphDocument { graph, k: None, names: None, sigma: None }
    }

    /// The embedded coloring, using `k` from the argument or the document.
    pub fn coloring(&self, k: Option<usize>) -> Result<Option<Coloring>, GameError> {
        let Some(sigma) = &self.sigma else {
            return Ok(None);
        };
        let k = k.or(self.k).unwrap_or_else(|| sigma.iter().copied().max().unwrap_or(1) as usize);
        let coloring = Coloring::new(sigma.clone(), k)?;
        if coloring.len() != self.graph.n() {
            return Err(GameError::SizeMismatch { coloring: coloring.len(), graph: self.graph.n() });
        }
        Ok(Some(coloring))
    }

    pub fn vertex_name(&self, v: usize) -> String {
        match &self.names {
            Some(names) => names[v].clone(),
            None => v.to_string(),
        }
    }
}

fn perr(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn check_names(names: &[String], n: usize, line: usize) -> Result<HashMap<String, usize>, GraphError> {
    if names.len() != n {
        return Err(perr(line, format!("{} names for {n} vertices", names.len())));
    }
    let mut index = HashMap::with_capacity(n);
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(perr(line, format!("invalid vertex name `{name}`")));
        }
        if index.insert(name.clone(), i).is_some() {
            return Err(perr(line, format!("duplicate vertex name `{name}`")));
        }
    }
    Ok(index)
}

fn resolve(token: &str, names: &HashMap<String, usize>) -> Result<usize, GraphError> {
    if let Some(&v) = names.get(token) {
        return Ok(v);
    }
    token.parse().map_err(|_| GraphError::UnknownName(token.to_string()))
}

/// Parses either form; input starting with `{` is treated as JSON.
pub fn parse_graph(text: &str) -> Result<GraphDocument, GraphError> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

fn parse_text(text: &str) -> Result<GraphDocument, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (n, k) = match tokens.as_slice() {
        ["n", n] => (n.parse::<usize>().map_err(|_| perr(hline, "bad vertex count"))?, None),
        ["n", n, "k", k] => (
            n.parse::<usize>().map_err(|_| perr(hline, "bad vertex count"))?,
            Some(k.parse::<usize>().map_err(|_| perr(hline, "bad color count"))?),
        ),
        _ => return Err(perr(hline, "expected `n <count> [k <colors>]`")),
    };

    let mut names = None;
    let mut index = HashMap::new();
    let mut sigma = None;
    let mut edges = Vec::new();
    for (line, content) in lines {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            ["names", rest @ ..] => {
                if !edges.is_empty() || names.is_some() {
                    return Err(perr(line, "`names` must appear once, before the edges"));
                }
                let list: Vec<String> = rest.iter().map(|s| s.to_string()).collect();
                index = check_names(&list, n, line)?;
                names = Some(list);
            }
            ["sigma", rest @ ..] => {
                if !edges.is_empty() || sigma.is_some() {
                    return Err(perr(line, "`sigma` must appear once, before the edges"));
                }
                let colors = rest
                    .iter()
                    .map(|t| t.parse::<Color>().map_err(|_| perr(line, format!("bad color `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                sigma = Some(colors);
            }
            [u, v] => edges.push((resolve(u, &index)?, resolve(v, &index)?)),
            _ => return Err(perr(line, "expected an edge `u v`")),
        }
    }
    let graph = Graph::from_edges(n, edges)?;
    Ok(GraphDocument { graph, k, names, sigma })
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Index(usize),
    Name(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    edges: Vec<[Endpoint; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<Vec<Color>>,
}

fn parse_json(text: &str) -> Result<GraphDocument, GraphError> {
    let raw: JsonGraph = serde_json::from_str(text).map_err(|e| perr(e.line(), e.to_string()))?;
    let (names, index) = match raw.names {
        None => (None, HashMap::new()),
        Some(map) => {
            let mut list = vec![String::new(); raw.n];
            for (name, v) in map {
                if v >= raw.n {
                    return Err(GraphError::VertexOutOfRange { v, n: raw.n });
                }
                list[v] = name;
            }
            let index = check_names(&list, raw.n, 0)?;
            (Some(list), index)
        }
    };
    let endpoint = |e: &Endpoint| match e {
        Endpoint::Index(v) => Ok(*v),
        Endpoint::Name(s) => index.get(s).copied().ok_or_else(|| GraphError::UnknownName(s.clone())),
    };
    let edges = raw
        .edges
        .iter()
        .map(|[u, v]| Ok((endpoint(u)?, endpoint(v)?)))
        .collect::<Result<Vec<_>, GraphError>>()?;
    Ok(GraphDocument { graph: Graph::from_edges(raw.n, edges)?, k: raw.k, names, sigma: raw.sigma })
}

pub fn serialize_text(doc: &GraphDocument) -> String {
    let mut out = format!("n {}", doc.graph.n());
    if let Some(k) = doc.k {
        out.push_str(&format!(" k {k}"));
    }
    out.push('\n');
    if let Some(names) = &doc.names {
        out.push_str(&format!("names {}\n", names.join(" ")));
    }
    if let Some(sigma) = &doc.sigma {
        let colors: Vec<String> = sigma.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("sigma {}\n", colors.join(" ")));
    }
    for (u, v) in doc.graph.edges() {
        out.push_str(&format!("{} {}\n", doc.vertex_name(u), doc.vertex_name(v)));
    }
    out
}

pub fn serialize_json(doc: &GraphDocument) -> String {
    let raw = JsonGraph {
        n: doc.graph.n(),
        k: doc.k,
        edges: doc.graph.edges().map(|(u, v)| [Endpoint::Index(u), Endpoint::Index(v)]).collect(),
        names: doc
            .names
            .as_ref()
            .map(|names| names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()),
        sigma: doc.sigma.clone(),
    };
    serde_json::to_string_pretty(&raw).expect("graph documents always serialize")
}

/// One CSV row per vertex: `vertex,name,color,degree,payoff`.
pub fn write_payoffs_csv<W: Write>(doc: &GraphDocument, sigma: &Coloring, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vertex", "name", "color", "degree", "payoff"])?;
    for v in 0..doc.graph.n() {
        let degree = doc.graph.neighbors(v).len();
        let pay = payoff(&doc.graph, sigma, v).map_err(|e| std::io::Error::other(e.to_string()))?;
        w.write_record([
            v.to_string(),
            doc.vertex_name(v),
            sigma.color(v).to_string(),
            degree.to_string(),
            pay.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{figure1, Reconstruction};
    use crate::graph::{generate_er, RandomGraphSpec};
    use proptest::prelude::*;

    #[test]
    fn figure1_text_round_trip() {
        let doc = figure1(Reconstruction::V1V3).document();
        let text = serialize_text(&doc);
        assert!(text.starts_with("n 6 k 3\nnames v1 v2 v3 v4 v5 v6\nsigma 1 2 1 2 3 1\nv1 v2\nv1 v3\n"));
        assert_eq!(parse_graph(&text).unwrap(), doc);
        assert_eq!(parse_graph(&serialize_json(&doc)).unwrap(), doc);
    }

    #[test]
    fn mixed_endpoints_and_comments() {
        let text = "# triangle\nn 3\nnames a b c\na b # first\n1 2\nc a\n";
        let doc = parse_graph(text).unwrap();
        assert_eq!(doc.graph, Graph::complete(3).unwrap());
        let json = r#"{"n": 3, "edges": [[0, 1], ["b", "c"]], "names": {"a": 0, "b": 1, "c": 2}}"#;
        assert_eq!(parse_graph(json).unwrap().graph.m(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_graph("n 3\n0 0\n"), Err(GraphError::SelfLoop(0))));
        assert!(matches!(parse_graph("n 3\n0 1\n1 0\n"), Err(GraphError::DuplicateEdge(0, 1))));
        assert!(matches!(parse_graph(r#"{"n":3,"edges":[[0,1],[1,0]]}"#), Err(GraphError::DuplicateEdge(0, 1))));
        assert!(matches!(parse_graph(r#"{"n":3,"edges":[[2,2]]}"#), Err(GraphError::SelfLoop(2))));
        assert!(matches!(parse_graph("n 3\nx y\n"), Err(GraphError::UnknownName(_))));
        assert!(matches!(parse_graph("edges\n"), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(parse_graph(""), Err(GraphError::Parse { .. })));
        assert!(matches!(parse_graph("n 2\nnames a a\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("n 2\n0 1 2\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(parse_graph("n 2\n0 5\n").is_err());
    }

    #[test]
    fn embedded_coloring() {
        let doc = parse_graph("n 3 k 3\nsigma 1 2 3\n0 1\n").unwrap();
        assert_eq!(doc.coloring(None).unwrap().unwrap().as_slice(), &[1, 2, 3]);
        assert!(doc.coloring(Some(2)).is_err());
        let short = parse_graph("n 3\nsigma 1 2\n").unwrap();
        assert!(short.coloring(None).is_err());
    }

    #[test]
    fn payoff_csv() {
        let fig = figure1(Reconstruction::V1V3);
        let mut buf = Vec::new();
        write_payoffs_csv(&fig.document(), &fig.sigma, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "vertex,name,color,degree,payoff");
        assert_eq!(lines[4], "3,v4,2,4,4");
        assert_eq!(lines.len(), 7);
    }

    proptest! {
        #[test]
        fn round_trip_generated(n in 0usize..20, deg in 0.0f64..6.0, seed in any::<u64>(), json in any::<bool>()) {
            let avg = if n <= 1 { 0.0 } else { deg.min((n - 1) as f64) };
            let graph = generate_er(&RandomGraphSpec { n, avg_degree: avg, seed }).unwrap();
            let doc = GraphDocument::bare(graph);
            let text = if json { serialize_json(&doc) } else { serialize_text(&doc) };
            prop_assert_eq!(parse_graph(&text).unwrap(), doc);
        }
    }
}

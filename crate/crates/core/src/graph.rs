//! Simple undirected input graphs and their text formats.
//!
//! Vertices are numbered `1..=n`. Three formats are accepted: a plain edge
//! list (`u v` per line, `#` comments), DIMACS `.col`, and a JSON document
//! `{"n": .., "edges": [[u, v], ..]}`.

use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

pub type Vertex = u32;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("self-loop at vertex {0}")]
    Loop(Vertex),
    #[error("edge ({u}, {v}) references a vertex outside 1..={n}")]
    VertexOutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("invalid JSON graph: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Dimacs,
    Json,
}

impl GraphFormat {
    /// Guesses the format from a file extension, falling back to content.
    pub fn detect(path: Option<&Path>, text: &str) -> Self {
        match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("col") | Some("dimacs") => return GraphFormat::Dimacs,
            Some("json") => return GraphFormat::Json,
            Some("edges") | Some("txt") => return GraphFormat::EdgeList,
            _ => {}
        }
        let head = text.trim_start();
        if head.starts_with('{') {
            GraphFormat::Json
        } else if head
            .lines()
            .any(|l| l.starts_with("p ") || l.starts_with("e "))
        {
            GraphFormat::Dimacs
        } else {
            GraphFormat::EdgeList
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputGraph {
    n: usize,
    edges: BTreeSet<(Vertex, Vertex)>,
    names: Option<Vec<String>>,
    adjacency: Vec<BTreeSet<Vertex>>,
}

impl InputGraph {
    /// Builds a simple graph on `1..=n`; duplicate edges collapse.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, ParseError> {
        let mut set = BTreeSet::new();
        let mut adjacency = vec![BTreeSet::new(); n + 1];
        for (u, v) in edges {
            if u == v {
                return Err(ParseError::Loop(u));
            }
            if u == 0 || v == 0 || u as usize > n || v as usize > n {
                return Err(ParseError::VertexOutOfRange { u, v, n });
            }
            set.insert((u.min(v), u.max(v)));
            adjacency[u as usize].insert(v);
            adjacency[v as usize].insert(u);
        }
        Ok(Self {
            n,
            edges: set,
            names: None,
            adjacency,
        })
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (1..=n as Vertex).map(|v| (v, v % n as Vertex + 1));
        Self::new(n, edges).expect("cycle edges are in range")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n as Vertex).flat_map(|u| (u + 1..=n as Vertex).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph edges are in range")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n as Vertex).map(|v| (v, v + 1))).expect("path edges are in range")
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.names = Some(names);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n as Vertex
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// `Γ(v)`, sorted.
    pub fn neighbors(&self, v: Vertex) -> &BTreeSet<Vertex> {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn name(&self, v: Vertex) -> String {
        self.names
            .as_ref()
            .and_then(|names| names.get(v as usize - 1).cloned())
            .unwrap_or_else(|| v.to_string())
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n + 1];
        let mut stack = vec![1];
        seen[1] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    pub fn parse(text: &str, format: GraphFormat) -> Result<Self, ParseError> {
        match format {
            GraphFormat::EdgeList => parse_edge_list(text),
            GraphFormat::Dimacs => parse_dimacs(text),
            GraphFormat::Json => parse_json(text),
        }
    }

    pub fn read(path: &Path) -> Result<Self, ParseError> {
        let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, GraphFormat::detect(Some(path), &text))
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "edges": self.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        })
    }
}

fn parse_vertex(token: &str, line: usize) -> Result<Vertex, ParseError> {
    token.parse::<Vertex>().map_err(|_| ParseError::Syntax {
        line,
        msg: format!("expected a vertex number, found {token:?}"),
    })
}

fn parse_edge_list(text: &str) -> Result<InputGraph, ParseError> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        // An optional `n <count>` header declares isolated trailing vertices.
        if tokens.len() == 2 && tokens[0] == "n" {
            n = n.max(parse_vertex(tokens[1], k + 1)? as usize);
            continue;
        }
        if tokens.len() != 2 {
            return Err(ParseError::Syntax {
                line: k + 1,
                msg: format!("expected `u v`, found {line:?}"),
            });
        }
        let u = parse_vertex(tokens[0], k + 1)?;
        let v = parse_vertex(tokens[1], k + 1)?;
        if u == 0 || v == 0 {
            return Err(ParseError::Syntax {
                line: k + 1,
                msg: "vertices are numbered from 1".into(),
            });
        }
        n = n.max(u as usize).max(v as usize);
        edges.push((u, v));
    }
    InputGraph::new(n, edges)
}

fn parse_dimacs(text: &str) -> Result<InputGraph, ParseError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first() {
            None | Some(&"c") => {}
            Some(&"p") => {
                if tokens.len() < 4 {
                    return Err(ParseError::Syntax {
                        line: k + 1,
                        msg: "expected `p edge <n> <m>`".into(),
                    });
                }
                n = Some(parse_vertex(tokens[2], k + 1)? as usize);
            }
            Some(&"e") if tokens.len() == 3 => {
                edges.push((parse_vertex(tokens[1], k + 1)?, parse_vertex(tokens[2], k + 1)?));
            }
            Some(other) => {
                return Err(ParseError::Syntax {
                    line: k + 1,
                    msg: format!("unexpected DIMACS line starting with {other:?}"),
                })
            }
        }
    }
    let n = n.ok_or(ParseError::Syntax {
        line: 0,
        msg: "missing `p edge` header".into(),
    })?;
    InputGraph::new(n, edges)
}

fn parse_json(text: &str) -> Result<InputGraph, ParseError> {
    #[derive(Deserialize)]
    struct Raw {
        n: usize,
        edges: Vec<(Vertex, Vertex)>,
        #[serde(default)]
        names: Option<Vec<String>>,
    }
    let raw: Raw = serde_json::from_str(text)?;
    let graph = InputGraph::new(raw.n, raw.edges)?;
    Ok(match raw.names {
        Some(names) => graph.with_names(names),
        None => graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_agree() {
        let a = InputGraph::parse("# triangle\n1 2\n2 3\n3 1\n", GraphFormat::EdgeList).unwrap();
        let b = InputGraph::parse("c tri\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n", GraphFormat::Dimacs)
            .unwrap();
        let c = InputGraph::parse(r#"{"n": 3, "edges": [[1,2],[3,2],[1,3]]}"#, GraphFormat::Json)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, InputGraph::complete(3));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            InputGraph::parse("1 1\n", GraphFormat::EdgeList),
            Err(ParseError::Loop(1))
        ));
        assert!(matches!(
            InputGraph::parse("1 x\n", GraphFormat::EdgeList),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            InputGraph::parse("p edge 2 1\ne 1 3\n", GraphFormat::Dimacs),
            Err(ParseError::VertexOutOfRange { .. })
        ));
        assert!(InputGraph::parse("{", GraphFormat::Json).is_err());
    }

    #[test]
    fn detection() {
        assert_eq!(GraphFormat::detect(None, "p edge 1 0"), GraphFormat::Dimacs);
        assert_eq!(GraphFormat::detect(None, " {\"n\":1}"), GraphFormat::Json);
        assert_eq!(GraphFormat::detect(None, "1 2"), GraphFormat::EdgeList);
        assert_eq!(
            GraphFormat::detect(Some(Path::new("g.col")), "1 2"),
            GraphFormat::Dimacs
        );
    }

    #[test]
    fn header_declares_isolated_vertices() {
        let g = InputGraph::parse("n 5\n1 2\n", GraphFormat::EdgeList).unwrap();
        assert_eq!(g.n(), 5);
        assert!(!g.is_connected());
    }
}

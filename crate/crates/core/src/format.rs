//! Line-oriented instance text format.
//!
//! ```text
//! # comment
//! p mrc <n> <m> <q>
//! variant <edge|vertex> <edge|vertex>
//! e <a> <b> <cost>        (m lines; no cost field for vertex removal)
//! v <id> <cost>           (n lines, vertex removal only)
//! q <u> <v> <k>           (q lines)
//! ```
//!
//! The first token of `variant` is the removal variant, the second the
//! connectivity semantics. Pairs with infinite threshold are omitted.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError};
use crate::instance::{Demand, Instance, InstanceError, Removal, Semantics};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: unknown variant token `{token}`")]
    UnknownVariant { line: usize, token: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: InstanceError,
    },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("expected {expected} `{kind}` lines, found {found}")]
    Count { kind: char, expected: usize, found: usize },
    #[error("cannot serialize directed or capacitated edge {0}; the text format holds plain undirected edges")]
    NotSerializable(usize),
}

fn malformed(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Malformed { line, msg: msg.into() }
}

struct Tokens<'a> {
    line: usize,
    iter: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn next_str(&mut self, what: &str) -> Result<&'a str, FormatError> {
        self.iter.next().ok_or_else(|| malformed(self.line, format!("missing {what}")))
    }

    fn next<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, FormatError> {
        let tok = self.next_str(what)?;
        tok.parse().map_err(|_| malformed(self.line, format!("bad {what} `{tok}`")))
    }

    fn end(mut self) -> Result<(), FormatError> {
        match self.iter.next() {
            None => Ok(()),
            Some(tok) => Err(malformed(self.line, format!("unexpected trailing token `{tok}`"))),
        }
    }
}

fn parse_cost(t: &mut Tokens<'_>) -> Result<f64, FormatError> {
    let line = t.line;
    let c: f64 = t.next("cost")?;
    if !c.is_finite() || c < 0.0 {
        return Err(FormatError::Invalid { line, source: InstanceError::BadCost { index: 0, value: c } });
    }
    Ok(c)
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut variant: Option<(Removal, Semantics)> = None;
    let mut edges = Vec::new();
    let mut edge_costs = Vec::new();
    let mut vertex_costs: Vec<Option<f64>> = Vec::new();
    let mut demands = Vec::new();
    let mut demand_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut t = Tokens { line, iter: content.split_whitespace() };
        let tag = t.next_str("tag")?;
        match (tag, header.is_some(), variant.is_some()) {
            ("p", false, _) => {
                if t.next_str("format")? != "mrc" {
                    return Err(malformed(line, "expected `p mrc`"));
                }
                let n = t.next("vertex count")?;
                let m = t.next("edge count")?;
                let q = t.next("demand count")?;
                t.end()?;
                header = Some((n, m, q));
                vertex_costs = vec![None; n];
            }
            ("p", true, _) => return Err(malformed(line, "duplicate `p` line")),
            (_, false, _) => return Err(malformed(line, "first line must be `p mrc <n> <m> <q>`")),
            ("variant", true, false) => {
                let removal = match t.next_str("removal variant")? {
                    "edge" => Removal::Edge,
                    "vertex" => Removal::Vertex,
                    other => return Err(FormatError::UnknownVariant { line, token: other.into() }),
                };
                let semantics = match t.next_str("connectivity semantics")? {
                    "edge" => Semantics::EdgeDisjoint,
                    "vertex" => Semantics::VertexDisjoint,
                    other => return Err(FormatError::UnknownVariant { line, token: other.into() }),
                };
                t.end()?;
                variant = Some((removal, semantics));
            }
            ("variant", true, true) => return Err(malformed(line, "duplicate `variant` line")),
            (_, true, false) => return Err(malformed(line, "second line must be `variant <removal> <semantics>`")),
            ("e", true, true) => {
                let (n, ..) = header.unwrap();
                let a: usize = t.next("endpoint")?;
                let b: usize = t.next("endpoint")?;
                for x in [a, b] {
                    if x >= n {
                        return Err(FormatError::Invalid {
                            line,
                            source: InstanceError::Graph(GraphError::VertexOutOfRange { vertex: x, n }),
                        });
                    }
                }
                if a == b {
                    return Err(FormatError::Invalid {
                        line,
                        source: InstanceError::Graph(GraphError::SelfLoop(edges.len())),
                    });
                }
                if variant.unwrap().0 == Removal::Edge {
                    edge_costs.push(parse_cost(&mut t)?);
                }
                t.end()?;
                edges.push(Edge::undirected(a, b));
            }
            ("v", true, true) => {
                if variant.unwrap().0 != Removal::Vertex {
                    return Err(malformed(line, "`v` lines are only valid for vertex removal"));
                }
                let id: usize = t.next("vertex id")?;
                let cost = parse_cost(&mut t)?;
                t.end()?;
                let n = vertex_costs.len();
                let slot = vertex_costs.get_mut(id).ok_or(FormatError::Invalid {
                    line,
                    source: InstanceError::Graph(GraphError::VertexOutOfRange { vertex: id, n }),
                })?;
                if slot.is_some() {
                    return Err(malformed(line, format!("duplicate cost for vertex {id}")));
                }
                *slot = Some(cost);
            }
            ("q", true, true) => {
                let u = t.next("demand endpoint")?;
                let v = t.next("demand endpoint")?;
                let k = t.next("threshold")?;
                t.end()?;
                let (n, ..) = header.unwrap();
                if let Some(&x) = [u, v].iter().find(|&&x| x >= n) {
                    return Err(FormatError::Invalid {
                        line,
                        source: InstanceError::Graph(GraphError::VertexOutOfRange { vertex: x, n }),
                    });
                }
                demands.push(Demand::new(u, v, k));
                demand_lines.push(line);
            }
            (other, ..) => return Err(malformed(line, format!("unknown line tag `{other}`"))),
        }
    }

    let (n, m, q) = header.ok_or(FormatError::Missing("p"))?;
    let (removal, semantics) = variant.ok_or(FormatError::Missing("variant"))?;
    if edges.len() != m {
        return Err(FormatError::Count { kind: 'e', expected: m, found: edges.len() });
    }
    if demands.len() != q {
        return Err(FormatError::Count { kind: 'q', expected: q, found: demands.len() });
    }
    let costs = match removal {
        Removal::Edge => edge_costs,
        Removal::Vertex => {
            let found = vertex_costs.iter().filter(|c| c.is_some()).count();
            if found != n {
                return Err(FormatError::Count { kind: 'v', expected: n, found });
            }
            vertex_costs.into_iter().map(Option::unwrap).collect()
        }
    };
    let graph = Graph::new(n, edges).map_err(|e| FormatError::Invalid { line: 0, source: e.into() })?;
    Instance::new(graph, costs, demands, removal, semantics).map_err(|source| {
        let line = match &source {
            InstanceError::DemandLoop { index, .. }
            | InstanceError::ZeroThreshold { index }
            | InstanceError::DuplicateDemand { index, .. } => demand_lines[*index],
            _ => 0,
        };
        FormatError::Invalid { line, source }
    })
}

/// Renders an instance in the text format. Fails only for graphs carrying
/// arcs or capacities, which exist solely inside split instances.
pub fn serialize_instance(instance: &Instance) -> Result<String, FormatError> {
    let g = instance.graph();
    if let Some(id) = g.edges().iter().position(|e| e.directed || e.capacity != 1) {
        return Err(FormatError::NotSerializable(id));
    }
    let mut out = String::new();
    let removal = match instance.removal() {
        Removal::Edge => "edge",
        Removal::Vertex => "vertex",
    };
    let semantics = match instance.semantics() {
        Semantics::EdgeDisjoint => "edge",
        Semantics::VertexDisjoint => "vertex",
    };
    // writing to a String cannot fail
    let _ = writeln!(out, "p mrc {} {} {}", g.vertex_count(), g.edge_count(), instance.demands().len());
    let _ = writeln!(out, "variant {removal} {semantics}");
    for (id, e) in g.edges().iter().enumerate() {
        match instance.removal() {
            Removal::Edge => {
                let _ = writeln!(out, "e {} {} {}", e.a, e.b, instance.costs()[id]);
            }
            Removal::Vertex => {
                let _ = writeln!(out, "e {} {}", e.a, e.b);
            }
        }
    }
    if instance.removal() == Removal::Vertex {
        for (v, c) in instance.costs().iter().enumerate() {
            let _ = writeln!(out, "v {v} {c}");
        }
    }
    for d in instance.demands() {
        let _ = writeln!(out, "q {} {} {}", d.u, d.v, d.k);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "p mrc 3 3 1\nvariant edge edge\ne 0 1 3\ne 0 2 1\ne 2 1 1\nq 0 1 2\n";

    #[test]
    fn parses_triangle() {
        let inst = parse_instance(TRIANGLE).unwrap();
        assert_eq!(inst.graph().vertex_count(), 3);
        assert_eq!(inst.graph().edge_count(), 3);
        assert_eq!(inst.costs(), &[3.0, 1.0, 1.0]);
        assert_eq!(inst.demands(), &[Demand::new(0, 1, 2)]);
        assert_eq!(inst.removal(), Removal::Edge);
        assert_eq!(inst.semantics(), Semantics::EdgeDisjoint);
        assert_eq!(serialize_instance(&inst).unwrap(), TRIANGLE);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\np mrc 2 1 1 # trailing\n\nvariant edge vertex\ne 0 1 2.5\nq 0 1 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.costs(), &[2.5]);
        assert_eq!(inst.semantics(), Semantics::VertexDisjoint);
    }

    #[test]
    fn equal_demand_endpoints() {
        let text = TRIANGLE.replace("q 0 1 2", "q 0 0 2");
        match parse_instance(&text) {
            Err(FormatError::Invalid { line: 6, source: InstanceError::DemandLoop { .. } }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_lines() {
        let cases = [
            (TRIANGLE.replace("variant edge edge", "variant edge both"), 2),
            (TRIANGLE.replace("e 0 2 1", "e 0 5 1"), 4),
            (TRIANGLE.replace("e 0 2 1", "e 0 2 -1"), 4),
            (TRIANGLE.replace("e 0 2 1", "e 0 2"), 4),
            (TRIANGLE.replace("e 0 2 1", "x 0 2 1"), 4),
        ];
        for (text, want) in cases {
            let err = parse_instance(&text).unwrap_err();
            let line = match &err {
                FormatError::Malformed { line, .. }
                | FormatError::UnknownVariant { line, .. }
                | FormatError::Invalid { line, .. } => *line,
                other => panic!("unexpected {other:?}"),
            };
            assert_eq!(line, want, "{err}");
        }
    }

    #[test]
    fn duplicate_demand_reports_line() {
        let text = "p mrc 3 3 2\nvariant edge edge\ne 0 1 3\ne 0 2 1\ne 2 1 1\nq 0 1 2\nq 1 0 1\n";
        match parse_instance(text) {
            Err(FormatError::Invalid { line: 7, source: InstanceError::DuplicateDemand { .. } }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vertex_variant() {
        let text = "p mrc 3 2 1\nvariant vertex vertex\ne 0 1\ne 1 2\nv 0 5\nv 1 2\nv 2 5\nq 0 2 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.costs(), &[5.0, 2.0, 5.0]);
        assert_eq!(serialize_instance(&inst).unwrap(), text);
        let missing = text.replace("v 1 2\n", "");
        assert!(matches!(parse_instance(&missing), Err(FormatError::Count { kind: 'v', .. })));
    }

    #[test]
    fn split_instances_do_not_serialize() {
        let text = "p mrc 2 1 1\nvariant vertex edge\ne 0 1\nv 0 1\nv 1 1\nq 0 1 1\n";
        let inst = parse_instance(text).unwrap();
        let (split, _) = crate::instance::vertex_split_transform(&inst).unwrap();
        assert!(matches!(serialize_instance(&split), Err(FormatError::NotSerializable(0))));
    }
}

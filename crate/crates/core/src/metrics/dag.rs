use std::collections::BTreeMap;
use std::fmt::Write as _;

use petgraph::algo::{is_isomorphic_matching, toposort};
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pretty::quote;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("trace graph has a cycle")]
    CyclicDag,
    #[error("no latency configured for effect `{name}`")]
    UnknownEffect { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagNode {
    pub name: String,
    pub arg: String,
}

/// Effects performed by a run and the dependencies between them. An edge
/// `(a, b)` means `b` depends on `a`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dag {
    pub nodes: Vec<DagNode>,
    pub edges: Vec<(usize, usize)>,
}

impl Dag {
    pub fn empty() -> Dag {
        Dag::default()
    }

    pub fn single(name: impl Into<String>, arg: impl Into<String>) -> Dag {
        Dag {
            nodes: vec![DagNode {
                name: name.into(),
                arg: arg.into(),
            }],
            edges: vec![],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn shifted_edges(&self, by: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(move |&(a, b)| (a + by, b + by))
    }

    /// Both traces, independent of each other.
    pub fn par(&self, other: &Dag) -> Dag {
        let n = self.nodes.len();
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().cloned());
        let mut edges = self.edges.clone();
        edges.extend(other.shifted_edges(n));
        Dag { nodes, edges }
    }

    /// `other` after `self`: every source of `other` depends on every sink
    /// of `self`.
    pub fn seq(&self, other: &Dag) -> Dag {
        let mut d = self.par(other);
        let n = self.nodes.len();
        for s in self.sinks() {
            for t in other.sources() {
                d.edges.push((s, t + n));
            }
        }
        d
    }

    pub fn sources(&self) -> Vec<usize> {
        let mut has_in = vec![false; self.nodes.len()];
        for &(_, b) in &self.edges {
            has_in[b] = true;
        }
        (0..self.nodes.len()).filter(|&i| !has_in[i]).collect()
    }

    pub fn sinks(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.nodes.len()];
        for &(a, _) in &self.edges {
            has_out[a] = true;
        }
        (0..self.nodes.len()).filter(|&i| !has_out[i]).collect()
    }

    fn graph(&self) -> DiGraph<&DagNode, ()> {
        let mut g = DiGraph::new();
        let ids: Vec<NodeIndex> = self.nodes.iter().map(|n| g.add_node(n)).collect();
        for &(a, b) in &self.edges {
            g.add_edge(ids[a], ids[b], ());
        }
        g
    }

    fn topo(&self) -> Result<Vec<usize>, MetricsError> {
        toposort(&self.graph(), None)
            .map(|v| v.into_iter().map(|i| i.index()).collect())
            .map_err(|_| MetricsError::CyclicDag)
    }

    fn longest(&self, cost: impl Fn(&DagNode) -> f64) -> Result<f64, MetricsError> {
        let order = self.topo()?;
        let mut preds: Vec<Vec<usize>> = vec![vec![]; self.nodes.len()];
        for &(a, b) in &self.edges {
            preds[b].push(a);
        }
        let mut finish = vec![0.0f64; self.nodes.len()];
        for i in order {
            let start = preds[i].iter().map(|&p| finish[p]).fold(0.0, f64::max);
            finish[i] = start + cost(&self.nodes[i]);
        }
        Ok(finish.into_iter().fold(0.0, f64::max))
    }

    /// Number of nodes on the longest dependency path.
    pub fn dyn_span(&self) -> Result<u64, MetricsError> {
        self.longest(|_| 1.0).map(|x| x as u64)
    }

    pub fn dyn_work(&self) -> u64 {
        self.nodes.len() as u64
    }

    /// Critical-path time with unboundedly many workers.
    pub fn simulate_latency(&self, latencies: &BTreeMap<String, f64>) -> Result<f64, MetricsError> {
        for n in &self.nodes {
            if !latencies.contains_key(&n.name) {
                return Err(MetricsError::UnknownEffect {
                    name: n.name.clone(),
                });
            }
        }
        self.longest(|n| latencies[&n.name])
    }

    /// Label-respecting graph isomorphism.
    pub fn isomorphic(&self, other: &Dag) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.edges.len() == other.edges.len()
            && is_isomorphic_matching(&self.graph(), &other.graph(), |a, b| a == b, |_, _| true)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph trace {\n  v=\"1\";\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let label = format!("{}({})", n.name, n.arg);
            let _ = writeln!(s, "  n{i} [label={}];", quote(&label));
        }
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges.dedup();
        for (a, b) in edges {
            let _ = writeln!(s, "  n{a} -> n{b};");
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(arg: &str) -> Dag {
        Dag::single("fetch", arg)
    }

    fn lat(ms: f64) -> BTreeMap<String, f64> {
        BTreeMap::from([("fetch".to_string(), ms)])
    }

    #[test]
    fn empty() {
        let d = Dag::empty();
        assert_eq!((d.dyn_span().unwrap(), d.dyn_work()), (0, 0));
        assert_eq!(d.simulate_latency(&lat(100.0)).unwrap(), 0.0);
    }

    #[test]
    fn parallel_and_sequential() {
        let p = f("a").par(&f("b"));
        assert_eq!((p.dyn_span().unwrap(), p.dyn_work()), (1, 2));
        assert_eq!(p.simulate_latency(&lat(100.0)).unwrap(), 100.0);
        let s = f("a").seq(&f("b"));
        assert_eq!((s.dyn_span().unwrap(), s.dyn_work()), (2, 2));
        assert_eq!(s.simulate_latency(&lat(100.0)).unwrap(), 200.0);
    }

    #[test]
    fn chain_of_four() {
        let d = f("a").seq(&f("b")).seq(&f("c")).seq(&f("d"));
        assert_eq!((d.dyn_span().unwrap(), d.dyn_work()), (4, 4));
    }

    #[test]
    fn seq_is_associative_up_to_iso() {
        let (a, b, c) = (f("a").par(&f("x")), f("b"), f("c").par(&f("y")));
        assert!(a.seq(&b).seq(&c).isomorphic(&a.seq(&b.seq(&c))));
        assert!(a.par(&b).isomorphic(&b.par(&a)));
        assert!(!a.seq(&b).isomorphic(&a.par(&b)));
        assert!(!f("a").isomorphic(&f("b")));
    }

    #[test]
    fn errors() {
        let d = Dag::single("ask", "");
        assert_eq!(
            d.simulate_latency(&lat(1.0)),
            Err(MetricsError::UnknownEffect { name: "ask".into() })
        );
        let cyc = Dag {
            nodes: f("a").par(&f("b")).nodes,
            edges: vec![(0, 1), (1, 0)],
        };
        assert_eq!(cyc.dyn_span(), Err(MetricsError::CyclicDag));
    }

    #[test]
    fn dot_is_versioned() {
        let dot = f("u").seq(&f("v")).to_dot();
        assert!(dot.contains("v=\"1\""));
        assert!(dot.contains("label=\"fetch(u)\""));
        assert!(dot.contains("n0 -> n1;"));
    }
}

//! Lazily generated labeled graphs and the BFS primitives everything else
//! builds on.
//!
//! A [`Graph`] only has to answer "who are the neighbors of this point"; the
//! point domain may be infinite. Loops (a generator fixing a point) are
//! reported by `neighbors` so exports can show them, but they are ignored by
//! every distance computation.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Edge label: which factor and which generator index produced the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeLabel {
    pub factor: u32,
    pub generator: u32,
}

impl std::fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "f{}.s{}", self.factor, self.generator)
    }
}

/// A graph with lazily enumerable neighbors.
pub trait Graph {
    type Point: Clone + Eq + Hash + Ord;

    /// All generator images of `p`, loops included.
    fn neighbors(&self, p: &Self::Point) -> Vec<(EdgeLabel, Self::Point)>;

    /// Canonical serialized key of a point, stable across runs.
    fn key(&self, p: &Self::Point) -> String;

    /// Full vertex list when the domain is finite, `None` otherwise.
    fn vertices(&self) -> Option<Vec<Self::Point>> {
        None
    }
}

impl<G: Graph> Graph for &G {
    type Point = G::Point;
    fn neighbors(&self, p: &Self::Point) -> Vec<(EdgeLabel, Self::Point)> {
        (*self).neighbors(p)
    }
    fn key(&self, p: &Self::Point) -> String {
        (*self).key(p)
    }
    fn vertices(&self) -> Option<Vec<Self::Point>> {
        (*self).vertices()
    }
}

/// Exact BFS ball of radius `n` around `x`: every reached point with its
/// distance. Loops never contribute; other connected components never appear.
pub fn ball<G: Graph>(graph: &G, x: &G::Point, n: u32) -> HashMap<G::Point, u32> {
    let mut dist: HashMap<G::Point, u32> = HashMap::new();
    dist.insert(x.clone(), 0);
    let mut queue = VecDeque::new();
    queue.push_back(x.clone());
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        if d == n {
            continue;
        }
        for (_, q) in graph.neighbors(&p) {
            if q != p && !dist.contains_key(&q) {
                dist.insert(q.clone(), d + 1);
                queue.push_back(q);
            }
        }
    }
    dist
}

/// Cumulative ball sizes `|B(x, k)|` for `k = 0..=n`.
pub fn ball_sizes<G: Graph>(graph: &G, x: &G::Point, n: u32) -> Vec<usize> {
    let dist = ball(graph, x, n);
    let mut per_layer = vec![0usize; n as usize + 1];
    for d in dist.values() {
        per_layer[*d as usize] += 1;
    }
    let mut sizes = Vec::with_capacity(n as usize + 1);
    let mut total = 0;
    for c in per_layer {
        total += c;
        sizes.push(total);
    }
    sizes
}

/// Exact distance between two points, exploring at most `cap` points.
///
/// `Ok(None)` means the component of `x` was exhausted without meeting `y`
/// (the "unreachable" sentinel for points in distinct orbits).
pub fn distance<G: Graph>(
    graph: &G,
    x: &G::Point,
    y: &G::Point,
    cap: usize,
) -> Result<Option<u32>> {
    if x == y {
        return Ok(Some(0));
    }
    let mut dist: HashMap<G::Point, u32> = HashMap::new();
    dist.insert(x.clone(), 0);
    let mut queue = VecDeque::new();
    queue.push_back(x.clone());
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        for (_, q) in graph.neighbors(&p) {
            if q == p || dist.contains_key(&q) {
                continue;
            }
            if q == *y {
                return Ok(Some(d + 1));
            }
            dist.insert(q.clone(), d + 1);
            queue.push_back(q);
            if dist.len() > cap {
                return Err(Error::CapExceeded {
                    cap,
                    context: "computing a distance".into(),
                });
            }
        }
    }
    Ok(None)
}

/// Distance like [`distance`] but giving up (with `Ok(None)`) beyond radius
/// `radius`. Useful when "further than R" is all the caller needs to know.
pub fn distance_within<G: Graph>(
    graph: &G,
    x: &G::Point,
    y: &G::Point,
    radius: u32,
) -> Option<u32> {
    ball(graph, x, radius).get(y).copied()
}

/// The connected component of `x`, failing once more than `cap` points appear.
pub fn component<G: Graph>(graph: &G, x: &G::Point, cap: usize) -> Result<Vec<G::Point>> {
    let mut seen: HashMap<G::Point, ()> = HashMap::new();
    seen.insert(x.clone(), ());
    let mut queue = VecDeque::new();
    queue.push_back(x.clone());
    let mut out = vec![x.clone()];
    while let Some(p) = queue.pop_front() {
        for (_, q) in graph.neighbors(&p) {
            if q != p && !seen.contains_key(&q) {
                seen.insert(q.clone(), ());
                out.push(q.clone());
                queue.push_back(q);
                if out.len() > cap {
                    return Err(Error::CapExceeded {
                        cap,
                        context: format!("enumerating the component of {}", graph.key(x)),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Exact diameter of the (finite) component of `x`: all-pairs BFS.
pub fn component_diameter<G: Graph>(graph: &G, x: &G::Point, cap: usize) -> Result<u32> {
    let comp = component(graph, x, cap)?;
    let mut diam = 0;
    for v in &comp {
        let dist = ball(graph, v, u32::MAX);
        let ecc = dist.values().copied().max().unwrap_or(0);
        diam = diam.max(ecc);
    }
    Ok(diam)
}

/// Eccentricity of `x` within its finite component.
pub fn eccentricity<G: Graph>(graph: &G, x: &G::Point, cap: usize) -> Result<u32> {
    let mut dist: HashMap<G::Point, u32> = HashMap::new();
    dist.insert(x.clone(), 0);
    let mut queue = VecDeque::new();
    queue.push_back(x.clone());
    let mut ecc = 0;
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        ecc = ecc.max(d);
        for (_, q) in graph.neighbors(&p) {
            if q != p && !dist.contains_key(&q) {
                dist.insert(q.clone(), d + 1);
                queue.push_back(q);
                if dist.len() > cap {
                    return Err(Error::CapExceeded {
                        cap,
                        context: "computing an eccentricity".into(),
                    });
                }
            }
        }
    }
    Ok(ecc)
}

/// DOT export of a finite graph. Vertex labels are canonical keys, edge
/// labels are generator indices. Undirected edges are emitted once; loops
/// only when `include_loops` is set.
pub fn to_dot<G: Graph>(graph: &G, include_loops: bool) -> Result<String> {
    let vertices = graph.vertices().ok_or_else(|| {
        Error::InvalidArgument("DOT export needs a finite vertex enumeration".into())
    })?;
    let mut keys: Vec<String> = vertices.iter().map(|v| graph.key(v)).collect();
    keys.sort();
    let mut edges: std::collections::BTreeSet<(String, String, String)> =
        std::collections::BTreeSet::new();
    for v in &vertices {
        let kv = graph.key(v);
        for (label, w) in graph.neighbors(v) {
            let kw = graph.key(&w);
            if kv == kw {
                if include_loops {
                    edges.insert((kv.clone(), kw, label.to_string()));
                }
                continue;
            }
            let (a, b) = if kv <= kw {
                (kv.clone(), kw)
            } else {
                (kw, kv.clone())
            };
            edges.insert((a, b, label.to_string()));
        }
    }
    let mut out = String::from("graph schreier {\n");
    for k in &keys {
        writeln!(out, "  \"{k}\";").unwrap();
    }
    for (a, b, label) in &edges {
        writeln!(out, "  \"{a}\" -- \"{b}\" [label=\"{label}\"];").unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

/// An explicit finite graph, mostly used as a test oracle.
#[derive(Debug, Clone, Default)]
pub struct ExplicitGraph {
    adjacency: Vec<Vec<(EdgeLabel, usize)>>,
    names: Vec<String>,
}

impl ExplicitGraph {
    pub fn with_vertices(names: Vec<String>) -> Self {
        ExplicitGraph {
            adjacency: vec![Vec::new(); names.len()],
            names,
        }
    }

    /// Cycle of length `n` on vertices `0..n`.
    pub fn cycle(n: usize) -> Self {
        let mut g = ExplicitGraph::with_vertices((0..n).map(|i| i.to_string()).collect());
        for i in 0..n {
            g.add_edge(i, (i + 1) % n, EdgeLabel { factor: 0, generator: 0 });
        }
        g
    }

    /// Path on `n` vertices.
    pub fn path(n: usize) -> Self {
        let mut g = ExplicitGraph::with_vertices((0..n).map(|i| i.to_string()).collect());
        for i in 0..n.saturating_sub(1) {
            g.add_edge(i, i + 1, EdgeLabel { factor: 0, generator: 0 });
        }
        g
    }

    /// Adds the edge in both directions.
    pub fn add_edge(&mut self, a: usize, b: usize, label: EdgeLabel) {
        self.adjacency[a].push((label, b));
        if a != b {
            self.adjacency[b].push((label, a));
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl Graph for ExplicitGraph {
    type Point = usize;

    fn neighbors(&self, p: &usize) -> Vec<(EdgeLabel, usize)> {
        self.adjacency[*p].clone()
    }

    fn key(&self, p: &usize) -> String {
        self.names.get(*p).cloned().unwrap_or_else(|| format!("#{p}"))
    }

    fn vertices(&self) -> Option<Vec<usize>> {
        Some((0..self.names.len()).collect())
    }
}

/// The line graph of `Z` with generators `±1`; the simplest infinite domain.
#[derive(Debug, Clone, Copy)]
pub struct IntLineGraph;

impl Graph for IntLineGraph {
    type Point = i64;

    fn neighbors(&self, p: &i64) -> Vec<(EdgeLabel, i64)> {
        vec![
            (EdgeLabel { factor: 0, generator: 0 }, p + 1),
            (EdgeLabel { factor: 0, generator: 1 }, p - 1),
        ]
    }

    fn key(&self, p: &i64) -> String {
        p.to_string()
    }
}

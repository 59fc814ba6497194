//! Incidence graph of a hypertree and the census of its rooted
//! neighborhoods.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::binom::binom;
use crate::canon::{canonical_code, Graph};
use crate::sampler::HypertreeSample;
use crate::simplicial::hypertree_boundary;
use crate::{Error, Result};

/// Largest census radius.
pub const MAX_RADIUS: usize = 6;

/// Bipartite graph between all `(d-1)`-faces and the `d`-faces of a
/// hypertree. Vertices `0..C(n,d)` are the `(d-1)`-faces in rank order; the
/// `d`-faces follow in the order of `faces`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGraph {
    n: u32,
    d: usize,
    faces: Vec<usize>,
    graph: Graph,
}

impl IncidenceGraph {
    pub fn new(sample: &HypertreeSample) -> Result<Self> {
        Self::from_faces(sample.n, sample.d, &sample.faces)
    }

    pub fn from_faces(n: u32, d: usize, faces: &[usize]) -> Result<Self> {
        let b = hypertree_boundary(n, d, faces)?;
        let low = b.rows();
        let mut graph = Graph::new(low + b.cols());
        for (row, col, _) in b.triplets() {
            graph.add_edge(row, low + col)?;
        }
        Ok(IncidenceGraph { n, d, faces: b.column_faces().to_vec(), graph })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of `(d-1)`-face vertices, `C(n,d)`.
    pub fn low_count(&self) -> usize {
        binom(self.n as usize, self.d)
    }

    /// Number of `d`-face vertices.
    pub fn high_count(&self) -> usize {
        self.faces.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Degrees of the `d`-face vertices.
    pub fn high_degrees(&self) -> Vec<usize> {
        let low = self.low_count();
        (0..self.high_count()).map(|i| self.graph.neighbors(low + i).len()).collect()
    }

    /// Degrees of the `(d-1)`-face vertices.
    pub fn low_degrees(&self) -> Vec<usize> {
        (0..self.low_count()).map(|i| self.graph.neighbors(i).len()).collect()
    }

    /// `B_r(o)`: the subgraph induced by vertices within distance `r` of
    /// `root`, with the root relabeled to 0. The graph is bipartite, so two
    /// vertices at distance exactly `r` are never adjacent and the induced
    /// ball has no edges beyond those met by the search.
    pub fn ball(&self, root: usize, radius: usize) -> Graph {
        let nv = self.graph.vertex_count();
        let mut local = vec![usize::MAX; nv];
        let mut members = vec![root];
        local[root] = 0;
        let mut q = VecDeque::from([(root, 0usize)]);
        while let Some((v, dv)) = q.pop_front() {
            if dv == radius {
                continue;
            }
            for &u in self.graph.neighbors(v) {
                if local[u] == usize::MAX {
                    local[u] = members.len();
                    members.push(u);
                    q.push_back((u, dv + 1));
                }
            }
        }
        let mut ball = Graph::new(members.len());
        for (i, &v) in members.iter().enumerate() {
            for &u in self.graph.neighbors(v) {
                let j = local[u];
                if j != usize::MAX && i < j {
                    ball.add_edge(i, j).expect("distinct in-range vertices");
                }
            }
        }
        ball
    }
}

/// Counts of rooted-neighborhood classes over all `(d-1)`-face roots,
/// possibly pooled across several hypertrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodCensus {
    pub radius: usize,
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl NeighborhoodCensus {
    pub fn empty(radius: usize) -> Self {
        NeighborhoodCensus { radius, counts: BTreeMap::new(), total: 0 }
    }

    pub fn frequency(&self, code: &str) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        *self.counts.get(code).unwrap_or(&0) as f64 / self.total as f64
    }

    pub fn frequencies(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        let t = self.total as f64;
        self.counts.iter().map(move |(k, &c)| (k.as_str(), c as f64 / t))
    }

    /// Pools another census of the same radius.
    pub fn merge(&mut self, other: &NeighborhoodCensus) -> Result<()> {
        if self.radius != other.radius {
            return Err(Error::InvalidParameters(format!(
                "census radii differ: {} vs {}",
                self.radius, other.radius
            )));
        }
        for (k, &c) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += c;
        }
        self.total += other.total;
        Ok(())
    }
}

fn check_radius(radius: usize) -> Result<()> {
    if radius > MAX_RADIUS {
        return Err(Error::EnvelopeExceeded {
            what: "census radius",
            count: radius as u128,
            limit: MAX_RADIUS as u128,
        });
    }
    Ok(())
}

/// Census of `B_r(o)` over every `(d-1)`-face root `o`.
pub fn neighborhood_census(g: &IncidenceGraph, radius: usize) -> Result<NeighborhoodCensus> {
    neighborhood_census_range(g, radius, 0, g.low_count())
}

/// Census over the roots `start..end`; partial censuses merge exactly.
pub fn neighborhood_census_range(
    g: &IncidenceGraph,
    radius: usize,
    start: usize,
    end: usize,
) -> Result<NeighborhoodCensus> {
    check_radius(radius)?;
    let mut census = NeighborhoodCensus::empty(radius);
    for root in start..end.min(g.low_count()) {
        let code = canonical_code(&g.ball(root, radius), 0)?;
        *census.counts.entry(code).or_insert(0) += 1;
        census.total += 1;
    }
    Ok(census)
}

/// Total variation distance `½ Σ |p - q|` over the union of codes.
pub fn census_distance(a: &NeighborhoodCensus, b: &NeighborhoodCensus) -> Result<f64> {
    if a.radius != b.radius {
        return Err(Error::InvalidParameters(format!(
            "census radii differ: {} vs {}",
            a.radius, b.radius
        )));
    }
    let mut sum = 0.0;
    for k in a.counts.keys() {
        sum += (a.frequency(k) - b.frequency(k)).abs();
    }
    for (k, _) in b.counts.iter().filter(|(k, _)| !a.counts.contains_key(*k)) {
        sum += b.frequency(k);
    }
    Ok((0.5 * sum).min(1.0))
}

/// Mean degree of the roots as an exact fraction `(Σ deg, #roots)`, read off
/// a radius-1 census of star codes.
pub fn census_mean_degree(c: &NeighborhoodCensus) -> Result<(u64, u64)> {
    if c.radius != 1 {
        return Err(Error::InvalidParameters("mean degree needs a radius-1 census".into()));
    }
    let mut sum = 0u64;
    for (code, &count) in &c.counts {
        let k = star_leaves(code)
            .ok_or_else(|| Error::Parse(format!("{code} is not a star code")))?;
        sum += k as u64 * count;
    }
    Ok((sum, c.total))
}

/// Number of leaves if `code` is the code of a star rooted at its center.
pub fn star_leaves(code: &str) -> Option<usize> {
    let inner = code.strip_prefix("T(")?.strip_suffix(')')?;
    if inner.len() % 2 != 0 || inner.as_bytes().chunks(2).any(|c| c != b"()") {
        return None;
    }
    Some(inner.len() / 2)
}

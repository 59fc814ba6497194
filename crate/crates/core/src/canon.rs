//! Canonical codes of finite rooted graphs.
//!
//! Trees get AHU parenthesis codes. For other graphs, pendant trees are first
//! stripped and folded into vertex labels, then the remaining core is
//! labeled canonically by color refinement with exhaustive individualization.
//! Two graphs get equal codes exactly when they are rooted-isomorphic.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::{Error, Result};

/// Largest graph accepted by [`canonical_code`].
pub const MAX_VERTICES: usize = 10_000;

/// A simple undirected graph as adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(vertices: usize) -> Self {
        Graph { adj: vec![Vec::new(); vertices] }
    }

    pub fn from_edges(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(vertices);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b || a >= self.adj.len() || b >= self.adj.len() {
            return Err(Error::InvalidParameters(alloc::format!("bad edge ({a}, {b})")));
        }
        if !self.adj[a].contains(&b) {
            self.adj[a].push(b);
            self.adj[b].push(a);
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::new(self.adj.len());
        for (v, ns) in self.adj.iter().enumerate() {
            g.adj[perm[v]] = ns.iter().map(|&u| perm[u]).collect();
        }
        g
    }
}

/// AHU code of a single vertex.
pub fn star_code(leaves: usize) -> String {
    let mut s = String::from("T(");
    for _ in 0..leaves {
        s.push_str("()");
    }
    s.push(')');
    s
}

/// Code of the one-vertex graph.
pub fn point_code() -> String {
    star_code(0)
}

/// Canonical code of `g` rooted at `root`. Tree codes start with `T`,
/// others with `G`.
pub fn canonical_code(g: &Graph, root: usize) -> Result<String> {
    let nv = g.vertex_count();
    if root >= nv {
        return Err(Error::InvalidParameters(alloc::format!("root {root} not in graph")));
    }
    if nv > MAX_VERTICES {
        return Err(Error::EnvelopeExceeded {
            what: "graph vertices",
            count: nv as u128,
            limit: MAX_VERTICES as u128,
        });
    }
    let dist = bfs(g, root);
    if dist.iter().any(|d| d.is_none()) {
        return Err(Error::InvalidParameters("graph is disconnected".into()));
    }
    let dist: Vec<usize> = dist.into_iter().map(|d| d.unwrap_or(0)).collect();

    // peel non-root leaves; each peeled vertex hangs off one survivor
    let mut degree: Vec<usize> = (0..nv).map(|v| g.adj[v].len()).collect();
    let mut removed = vec![false; nv];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut order = Vec::new();
    let mut queue: VecDeque<usize> = (0..nv).filter(|&v| v != root && degree[v] <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if removed[v] {
            continue;
        }
        removed[v] = true;
        order.push(v);
        for &u in &g.adj[v] {
            if !removed[u] {
                children[u].push(v);
                degree[u] -= 1;
                if u != root && degree[u] == 1 {
                    queue.push_back(u);
                }
            }
        }
    }
    // hanging codes, bottom-up in peel order
    let mut hang: Vec<String> = vec![String::new(); nv];
    for &v in &order {
        hang[v] = ahu(&children[v], &hang);
    }
    let core: Vec<usize> = (0..nv).filter(|&v| !removed[v]).collect();
    if core.len() == 1 {
        let mut s = String::from("T");
        s.push_str(&ahu(&children[root], &hang));
        return Ok(s);
    }

    let index: BTreeMap<usize, usize> = core.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = core
        .iter()
        .map(|&v| g.adj[v].iter().filter_map(|u| index.get(u).copied()).collect())
        .collect();
    let labels: Vec<(usize, String)> = core
        .iter()
        .map(|&v| (dist[v], ahu(&children[v], &hang)))
        .collect();
    let root_idx = index[&root];
    let cert = canonical_core(&adj, &labels, root_idx);

    let mut s = String::from("G");
    for (i, &v) in cert.order.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{}:{}", labels[v].0, labels[v].1);
    }
    s.push('|');
    for (i, (a, b)) in cert.edges.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{a}-{b}");
    }
    Ok(s)
}

fn bfs(g: &Graph, root: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    dist[root] = Some(0);
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        let dv = dist[v].unwrap_or(0);
        for &u in &g.adj[v] {
            if dist[u].is_none() {
                dist[u] = Some(dv + 1);
                q.push_back(u);
            }
        }
    }
    dist
}

fn ahu(children: &[usize], hang: &[String]) -> String {
    let mut codes: Vec<&str> = children.iter().map(|&c| hang[c].as_str()).collect();
    codes.sort_unstable();
    let mut s = String::with_capacity(2 + codes.iter().map(|c| c.len()).sum::<usize>());
    s.push('(');
    codes.into_iter().for_each(|c| s.push_str(c));
    s.push(')');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Certificate {
    // edges in canonical positions, sorted; compared first
    edges: Vec<(usize, usize)>,
    // vertex at each canonical position
    order: Vec<usize>,
}

fn canonical_core(adj: &[Vec<usize>], labels: &[(usize, String)], root: usize) -> Certificate {
    // initial colors: root first, then by (distance, hanging code)
    let mut keys: Vec<(bool, &(usize, String))> =
        labels.iter().enumerate().map(|(v, l)| (v != root, l)).collect();
    keys.sort();
    keys.dedup();
    let colors: Vec<usize> = labels
        .iter()
        .enumerate()
        .map(|(v, l)| keys.binary_search(&(v != root, l)).unwrap_or(0))
        .collect();
    let colors = refine(adj, colors);
    let mut best = None;
    search(adj, colors, &mut best);
    best.expect("search visits at least one leaf")
}

// equitable refinement; colors stay ordered consistently with the input
fn refine(adj: &[Vec<usize>], mut colors: Vec<usize>) -> Vec<usize> {
    let mut classes = count_classes(&colors);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..adj.len())
            .map(|v| {
                let mut ns: Vec<usize> = adj[v].iter().map(|&u| colors[u]).collect();
                ns.sort_unstable();
                (colors[v], ns)
            })
            .collect();
        let mut uniq: Vec<&(usize, Vec<usize>)> = sigs.iter().collect();
        uniq.sort();
        uniq.dedup();
        let next: Vec<usize> = sigs.iter().map(|s| uniq.binary_search(&s).unwrap_or(0)).collect();
        let next_classes = uniq.len();
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}

fn count_classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn search(adj: &[Vec<usize>], colors: Vec<usize>, best: &mut Option<Certificate>) {
    let mut counts = BTreeMap::new();
    for &c in &colors {
        *counts.entry(c).or_insert(0usize) += 1;
    }
    let Some((&target, _)) = counts.iter().find(|(_, &k)| k > 1) else {
        let cert = certificate(adj, &colors);
        if best.as_ref().is_none_or(|b| cert < *b) {
            *best = Some(cert);
        }
        return;
    };
    let cell: Vec<usize> = (0..adj.len()).filter(|&v| colors[v] == target).collect();
    for &v in &cell {
        let split: Vec<usize> = colors
            .iter()
            .enumerate()
            .map(|(u, &c)| 2 * c + usize::from(c == target && u != v))
            .collect();
        search(adj, refine(adj, split), best);
    }
}

fn certificate(adj: &[Vec<usize>], colors: &[usize]) -> Certificate {
    // discrete coloring: rank of each vertex's color is its position
    let mut order: Vec<usize> = (0..adj.len()).collect();
    order.sort_by_key(|&v| colors[v]);
    let mut pos = vec![0; adj.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (v, ns) in adj.iter().enumerate() {
        for &u in ns {
            if pos[v] < pos[u] {
                edges.push((pos[v], pos[u]));
            }
        }
    }
    edges.sort_unstable();
    Certificate { edges, order }
}

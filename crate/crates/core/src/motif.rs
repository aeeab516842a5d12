//! Pattern graphs ("motifs") and their combinatorial profile.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest pattern accepted by [`aut_count`].
pub const AUT_MAX_VERTICES: usize = 8;
/// Largest pattern accepted by [`motif_profile`].
pub const MOTIF_MAX_VERTICES: usize = 6;

/// Names of the built-in motifs, in registry order.
pub const REGISTRY: [&str; 6] = ["edge", "path2", "triangle", "c4", "c5", "k4"];

/// Exact edges-per-vertex ratio `edges / vertices`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Density {
    pub edges: u32,
    pub vertices: u32,
}

impl Density {
    pub fn new(edges: u32, vertices: u32) -> Self {
        assert!(vertices > 0);
        Self { edges, vertices }
    }

    pub fn as_f64(self) -> f64 {
        self.edges as f64 / self.vertices as f64
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Density {}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.edges as u64 * other.vertices as u64).cmp(&(other.edges as u64 * self.vertices as u64))
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.edges, self.vertices)
    }
}

/// Density profile of an arbitrary pattern, connected or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BalanceProfile {
    /// `d(H) = e(H) / v(H)`.
    pub density: Density,
    /// `k(H)`: largest density over vertex subsets spanning at least one edge.
    pub max_subgraph_density: Density,
    pub balanced: bool,
    pub strictly_balanced: bool,
}

/// Computes `d(H)`, `k(H)` and the balance flags by enumerating vertex subsets.
///
/// Edge-subgraphs on a fixed vertex set are never denser than the induced
/// one, so induced subgraphs suffice.
pub fn balance_profile(pattern: &Graph) -> Result<BalanceProfile> {
    let v = pattern.vertex_count();
    if v > AUT_MAX_VERTICES {
        return Err(Error::SizeLimit { what: "pattern vertices", limit: AUT_MAX_VERTICES, got: v });
    }
    let e = pattern.edge_count();
    if e == 0 {
        return Err(Error::UnsupportedMotif("pattern has no edges".into()));
    }
    let density = Density::new(e as u32, v as u32);
    let full: u64 = (1u64 << v) - 1;
    let mut k = density;
    let mut proper_max: Option<Density> = None;
    for mask in 1..full {
        let sub = pattern.induced(mask);
        let se = sub.edge_count();
        if se == 0 {
            continue;
        }
        let d = Density::new(se as u32, mask.count_ones());
        k = k.max(d);
        proper_max = Some(proper_max.map_or(d, |p| p.max(d)));
    }
    let balanced = k == density;
    let strictly_balanced = proper_max.is_none_or(|p| p < density);
    Ok(BalanceProfile { density, max_subgraph_density: k, balanced, strictly_balanced })
}

/// Number of vertex permutations preserving adjacency, by exhaustive search
/// over permutations (pruned as soon as a partial map breaks adjacency).
pub fn aut_count(pattern: &Graph) -> Result<u64> {
    let v = pattern.vertex_count();
    if v > AUT_MAX_VERTICES {
        return Err(Error::SizeLimit { what: "pattern vertices", limit: AUT_MAX_VERTICES, got: v });
    }
    let mut image = [usize::MAX; AUT_MAX_VERTICES];
    let mut used = [false; AUT_MAX_VERTICES];
    Ok(extend_permutation(pattern, 0, &mut image, &mut used))
}

fn extend_permutation(p: &Graph, pos: usize, image: &mut [usize], used: &mut [bool]) -> u64 {
    let v = p.vertex_count();
    if pos == v {
        return 1;
    }
    let mut total = 0;
    for cand in 0..v {
        if used[cand] {
            continue;
        }
        if (0..pos).all(|q| p.has_edge(q, pos) == p.has_edge(image[q], cand)) {
            image[pos] = cand;
            used[cand] = true;
            total += extend_permutation(p, pos + 1, image, used);
            used[cand] = false;
        }
    }
    total
}

/// A small connected pattern graph together with its derived invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Motif {
    name: String,
    pattern: Graph,
    aut: u64,
    k: Density,
    strictly_balanced: bool,
}

/// Builds a [`Motif`] from a connected pattern on at most six vertices.
pub fn motif_profile(name: &str, pattern: Graph) -> Result<Motif> {
    let v = pattern.vertex_count();
    if v > MOTIF_MAX_VERTICES {
        return Err(Error::SizeLimit { what: "motif vertices", limit: MOTIF_MAX_VERTICES, got: v });
    }
    if pattern.edge_count() == 0 {
        return Err(Error::UnsupportedMotif(format!("{name}: pattern has no edges")));
    }
    if !pattern.is_connected() {
        return Err(Error::UnsupportedMotif(format!("{name}: pattern is disconnected")));
    }
    let profile = balance_profile(&pattern)?;
    let aut = aut_count(&pattern)?;
    Ok(Motif {
        name: name.to_string(),
        pattern,
        aut,
        k: profile.max_subgraph_density,
        strictly_balanced: profile.strictly_balanced,
    })
}

impl Motif {
    pub fn edge() -> Self {
        Self::builtin("edge", Graph::complete(2))
    }

    /// Path with two edges (a "cherry").
    pub fn path2() -> Self {
        Self::builtin("path2", Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap())
    }

    pub fn triangle() -> Self {
        Self::builtin("triangle", Graph::complete(3))
    }

    pub fn cycle(k: usize) -> Self {
        Self::builtin(&format!("c{k}"), Graph::cycle(k))
    }

    pub fn clique(k: usize) -> Self {
        Self::builtin(&format!("k{k}"), Graph::complete(k))
    }

    fn builtin(name: &str, g: Graph) -> Self {
        motif_profile(name, g).expect("built-in motif")
    }

    /// Looks up a built-in motif by name (see [`REGISTRY`]).
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "edge" => Ok(Self::edge()),
            "path2" => Ok(Self::path2()),
            "triangle" | "c3" | "k3" => Ok(Self::triangle()),
            "c4" => Ok(Self::cycle(4)),
            "c5" => Ok(Self::cycle(5)),
            "k4" => Ok(Self::clique(4)),
            _ => Err(Error::UnsupportedMotif(format!("unknown motif name {name:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pattern(&self) -> &Graph {
        &self.pattern
    }

    pub fn vertex_count(&self) -> usize {
        self.pattern.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.pattern.edge_count()
    }

    /// `|Aut(H)|`.
    pub fn aut(&self) -> u64 {
        self.aut
    }

    /// `k(H)`, the maximum subgraph density.
    pub fn max_subgraph_density(&self) -> Density {
        self.k
    }

    pub fn is_balanced(&self) -> bool {
        self.k == Density::new(self.edge_count() as u32, self.vertex_count() as u32)
    }

    pub fn is_strictly_balanced(&self) -> bool {
        self.strictly_balanced
    }

    /// True when the pattern is a cycle (connected, every vertex of degree 2).
    pub fn is_cycle(&self) -> bool {
        self.vertex_count() >= 3 && self.pattern.degrees().iter().all(|&d| d == 2)
    }

    /// True when the pattern is a star with two leaves.
    pub fn is_path2(&self) -> bool {
        self.vertex_count() == 3 && self.edge_count() == 2
    }

    /// Embedding plan: vertices in BFS order; for each position after the
    /// first, the earlier position it hangs off and the mask of all earlier
    /// positions adjacent to it.
    pub(crate) fn plan(&self) -> EmbeddingPlan {
        let v = self.vertex_count();
        let degs = self.pattern.degrees();
        let root = (0..v).max_by_key(|&x| degs[x]).unwrap_or(0);
        let mut order = Vec::with_capacity(v);
        let mut seen = [false; AUT_MAX_VERTICES];
        order.push(root);
        seen[root] = true;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            for y in 0..v {
                if !seen[y] && self.pattern.has_edge(x, y) {
                    seen[y] = true;
                    order.push(y);
                }
            }
        }
        let mut parent = Vec::with_capacity(v);
        let mut back = Vec::with_capacity(v);
        for (pos, &x) in order.iter().enumerate() {
            let mut mask = 0u32;
            let mut par = usize::MAX;
            for (q, &y) in order[..pos].iter().enumerate() {
                if self.pattern.has_edge(x, y) {
                    mask |= 1 << q;
                    if par == usize::MAX {
                        par = q;
                    }
                }
            }
            parent.push(par);
            back.push(mask);
        }
        EmbeddingPlan { parent, back }
    }
}

impl fmt::Display for Motif {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct EmbeddingPlan {
    pub parent: Vec<usize>,
    pub back: Vec<u32>,
}

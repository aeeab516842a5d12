//! Simple undirected graphs on a fixed vertex set.
//!
//! Edges are stored as a bit vector of length `m(m-1)/2`, one bit per
//! unordered pair `i < j`, laid out in lexicographic pair order.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of unordered vertex pairs on `m` vertices.
#[inline]
pub const fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `(i, j)`, `i < j < m`.
pub fn edge_index(i: usize, j: usize, m: usize) -> Result<usize> {
    if i >= j || j >= m {
        return Err(Error::InvalidPair { i, j, m });
    }
    Ok(pair_index_unchecked(i, j, m))
}

#[inline]
pub(crate) fn pair_index_unchecked(i: usize, j: usize, m: usize) -> usize {
    debug_assert!(i < j && j < m);
    // Σ_{a<i} (m-1-a) = i(2m-i-1)/2
    i * (2 * m - i - 1) / 2 + (j - i - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    m: usize,
    bits: Vec<u64>,
}

impl Graph {
    /// Graph on `m` vertices with no edges.
    ///
    /// Panics if `m == 0`.
    pub fn empty(m: usize) -> Self {
        assert!(m > 0, "a graph needs at least one vertex");
        Self { m, bits: vec![0; pair_count(m).div_ceil(64)] }
    }

    pub fn complete(m: usize) -> Self {
        let mut g = Self::empty(m);
        let n = pair_count(m);
        for (w, word) in g.bits.iter_mut().enumerate() {
            let lo = w * 64;
            let used = (n - lo).min(64);
            *word = if used == 64 { u64::MAX } else { (1u64 << used) - 1 };
        }
        g
    }

    /// Builds a graph from a list of pairs. Each pair must satisfy `i < j < m`
    /// and appear at most once.
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("vertex count must be positive".into()));
        }
        let mut g = Self::empty(m);
        for &(i, j) in edges {
            let idx = edge_index(i, j, m)?;
            if g.bit(idx) {
                return Err(Error::InvalidParameter(alloc::format!("duplicate edge ({i}, {j})")));
            }
            g.set_bit(idx, true);
        }
        Ok(g)
    }

    /// Cycle `0-1-...-(m-1)-0`. Requires `m >= 3`.
    pub fn cycle(m: usize) -> Self {
        assert!(m >= 3);
        let mut g = Self::empty(m);
        for i in 0..m {
            g.add_edge(i.min((i + 1) % m), i.max((i + 1) % m));
        }
        g
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn pair_count(&self) -> usize {
        pair_count(self.m)
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Raw edge bits, little-endian within each word.
    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub fn bit(&self, idx: usize) -> bool {
        self.bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    #[inline]
    pub fn set_bit(&mut self, idx: usize, on: bool) {
        let mask = 1u64 << (idx % 64);
        if on {
            self.bits[idx / 64] |= mask;
        } else {
            self.bits[idx / 64] &= !mask;
        }
    }

    /// Adjacency test for any two vertices (order-insensitive, false on the diagonal).
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a != b && b < self.m && self.bit(pair_index_unchecked(a, b, self.m))
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.set_edge(i, j, true);
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.set_edge(i, j, false);
    }

    /// Panics on a self-loop or an out-of-range vertex.
    pub fn set_edge(&mut self, i: usize, j: usize, on: bool) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        assert!(a != b && b < self.m, "invalid pair ({i}, {j})");
        let idx = pair_index_unchecked(a, b, self.m);
        self.set_bit(idx, on);
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> Edges<'_> {
        Edges { g: self, word: 0, cur: self.bits.first().copied().unwrap_or(0), row: 0, row_start: 0 }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.m];
        for (i, j) in self.edges() {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        let adj = Adjacency::new(self);
        let mut seen = vec![false; self.m];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in adj.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    reached += 1;
                    stack.push(w as usize);
                }
            }
        }
        reached == self.m
    }

    /// Subgraph induced by the vertices whose bits are set in `mask`
    /// (vertex order preserved). Only for `m <= 64`.
    pub fn induced(&self, mask: u64) -> Graph {
        let verts: Vec<usize> = (0..self.m).filter(|v| mask >> v & 1 == 1).collect();
        let mut g = Graph::empty(verts.len().max(1));
        for (a, &u) in verts.iter().enumerate() {
            for (b, &w) in verts.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, w) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }
}

pub struct Edges<'a> {
    g: &'a Graph,
    word: usize,
    cur: u64,
    row: usize,
    row_start: usize,
}

impl Iterator for Edges<'_> {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<(usize, usize)> {
        while self.cur == 0 {
            self.word += 1;
            if self.word >= self.g.bits.len() {
                return None;
            }
            self.cur = self.g.bits[self.word];
        }
        let idx = self.word * 64 + self.cur.trailing_zeros() as usize;
        self.cur &= self.cur - 1;
        let m = self.g.m;
        // rows have length m-1-row; indices arrive in increasing order
        while idx >= self.row_start + (m - 1 - self.row) {
            self.row_start += m - 1 - self.row;
            self.row += 1;
        }
        Some((self.row, self.row + 1 + idx - self.row_start))
    }
}

/// Read-only adjacency structure: bitset rows plus CSR neighbor lists.
#[derive(Debug, Clone)]
pub struct Adjacency {
    m: usize,
    words: usize,
    rows: Vec<u64>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    pub fn new(g: &Graph) -> Self {
        let m = g.m;
        let words = m.div_ceil(64);
        let mut rows = vec![0u64; m * words];
        let mut deg = vec![0usize; m];
        let edges: Vec<(usize, usize)> = g.edges().collect();
        for &(i, j) in &edges {
            rows[i * words + j / 64] |= 1 << (j % 64);
            rows[j * words + i / 64] |= 1 << (i % 64);
            deg[i] += 1;
            deg[j] += 1;
        }
        let mut offsets = Vec::with_capacity(m + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[m]];
        for &(i, j) in &edges {
            targets[fill[i]] = j as u32;
            fill[i] += 1;
            targets[fill[j]] = i as u32;
            fill[j] += 1;
        }
        Self { m, words, rows, offsets, targets }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Number of common neighbors of `i` and `j`.
    pub fn codegree(&self, i: usize, j: usize) -> usize {
        let a = &self.rows[i * self.words..(i + 1) * self.words];
        let b = &self.rows[j * self.words..(j + 1) * self.words];
        a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, on: bool) {
        // rows only; CSR lists are not maintained by incremental updates
        let (wi, wj) = (i * self.words + j / 64, j * self.words + i / 64);
        if on {
            self.rows[wi] |= 1 << (j % 64);
            self.rows[wj] |= 1 << (i % 64);
        } else {
            self.rows[wi] &= !(1 << (j % 64));
            self.rows[wj] &= !(1 << (i % 64));
        }
    }
}

//! Exact motif counts: unlabelled copies, homomorphism counts and densities,
//! and the Erdős–Rényi expected copy count.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph};
use crate::motif::{EmbeddingPlan, Motif};

/// Largest host graph for which homomorphisms are enumerated by backtracking.
pub const HOM_BACKTRACK_MAX_VERTICES: usize = 200;

/// Number of unlabelled copies `inj(H, G) / |Aut(H)|` of `motif` in `g`.
///
/// Returns zero when the motif has more vertices than the graph.
pub fn count_motif(g: &Graph, motif: &Motif) -> Result<u64> {
    if motif.vertex_count() > g.vertex_count() {
        return Ok(0);
    }
    let inj = injective_count(&Adjacency::new(g), motif)?;
    debug_assert_eq!(inj % motif.aut(), 0);
    Ok(inj / motif.aut())
}

/// `inj(H, G)`: labelled injective embeddings of the pattern.
pub fn injective_count(adj: &Adjacency, motif: &Motif) -> Result<u64> {
    let plan = motif.plan();
    let mut mapped = [0usize; 8];
    let mut total = 0u64;
    for root in 0..adj.vertex_count() {
        mapped[0] = root;
        let c = extend(adj, &plan, 1, &mut mapped, true)?;
        total = total.checked_add(c).ok_or(Error::CountOverflow)?;
    }
    Ok(total)
}

fn extend(adj: &Adjacency, plan: &EmbeddingPlan, pos: usize, mapped: &mut [usize; 8], injective: bool) -> Result<u64> {
    if pos == plan.parent.len() {
        return Ok(1);
    }
    let back = plan.back[pos];
    let anchor = mapped[plan.parent[pos]];
    let mut total = 0u64;
    'cand: for &w in adj.neighbors(anchor) {
        let w = w as usize;
        for q in 0..pos {
            if injective && mapped[q] == w {
                continue 'cand;
            }
            if back >> q & 1 == 1 && !adj.adjacent(mapped[q], w) {
                continue 'cand;
            }
        }
        mapped[pos] = w;
        let c = extend(adj, plan, pos + 1, mapped, injective)?;
        total = total.checked_add(c).ok_or(Error::CountOverflow)?;
    }
    Ok(total)
}

/// `hom(H, G)`: number of edge-preserving maps `V(H) -> V(G)`.
///
/// Edges, two-edge paths and cycles use closed forms (`2e`, `Σ deg²`,
/// `trace(A^k)`); other motifs are enumerated by backtracking over
/// homomorphisms, gated to `v(G) <= 200`.
pub fn hom_count(g: &Graph, motif: &Motif) -> Result<u64> {
    if motif.edge_count() == 1 {
        return Ok(2 * g.edge_count() as u64);
    }
    if motif.is_path2() {
        return g
            .degrees()
            .iter()
            .try_fold(0u64, |acc, &d| acc.checked_add((d as u64).checked_mul(d as u64)?))
            .ok_or(Error::CountOverflow);
    }
    if motif.is_cycle() {
        return cycle_trace(g, motif.vertex_count());
    }
    let m = g.vertex_count();
    if m > HOM_BACKTRACK_MAX_VERTICES {
        return Err(Error::SizeLimit { what: "hom enumeration host vertices", limit: HOM_BACKTRACK_MAX_VERTICES, got: m });
    }
    let adj = Adjacency::new(g);
    let plan = motif.plan();
    let mut mapped = [0usize; 8];
    let mut total = 0u64;
    for root in 0..m {
        mapped[0] = root;
        let c = extend(&adj, &plan, 1, &mut mapped, false)?;
        total = total.checked_add(c).ok_or(Error::CountOverflow)?;
    }
    Ok(total)
}

/// `trace(A^k)` for `k` in 3..=6 via integer matrix products; this counts
/// closed walks of length `k`, degenerate walks included.
fn cycle_trace(g: &Graph, k: usize) -> Result<u64> {
    let m = g.vertex_count();
    let adj = Adjacency::new(g);
    let a: Vec<u64> = (0..m * m).map(|x| adj.adjacent(x / m, x % m) as u64).collect();
    let a2 = mat_mul(&a, &a, m)?;
    // trace(XY) = Σ_ij X_ij Y_ji, and all powers of A are symmetric
    let (x, y) = match k {
        3 => (a2, a),
        4 => (a2.clone(), a2),
        5 => (mat_mul(&a2, &a, m)?, a2),
        6 => {
            let a3 = mat_mul(&a2, &a, m)?;
            (a3.clone(), a3)
        }
        _ => return Err(Error::UnsupportedMotif(alloc::format!("cycle of length {k}"))),
    };
    x.iter()
        .zip(&y)
        .try_fold(0u64, |acc, (p, q)| acc.checked_add(p.checked_mul(*q)?))
        .ok_or(Error::CountOverflow)
}

fn mat_mul(x: &[u64], y: &[u64], m: usize) -> Result<Vec<u64>> {
    let mut out = vec![0u64; m * m];
    for i in 0..m {
        for l in 0..m {
            let xil = x[i * m + l];
            if xil == 0 {
                continue;
            }
            for j in 0..m {
                let t = xil.checked_mul(y[l * m + j]).ok_or(Error::CountOverflow)?;
                out[i * m + j] = out[i * m + j].checked_add(t).ok_or(Error::CountOverflow)?;
            }
        }
    }
    Ok(out)
}

/// Homomorphism density `t(H, G) = hom(H, G) / v(G)^{v(H)}`.
pub fn hom_density(g: &Graph, motif: &Motif) -> Result<f64> {
    let hom = hom_count(g, motif)?;
    Ok(hom as f64 / (g.vertex_count() as f64).powi(motif.vertex_count() as i32))
}

/// Falling factorial `(m)_k = m (m-1) ... (m-k+1)` as a float.
pub fn falling_factorial(m: usize, k: usize) -> f64 {
    (0..k).map(|i| m.saturating_sub(i) as f64).product()
}

/// Expected number of copies of `motif` in `G(m, p)`.
///
/// `exact` gives `(m)_v p^e / |Aut|`; otherwise the large-`m` form
/// `m^v p^e / |Aut|`.
pub fn expected_count_er(m: usize, p: f64, motif: &Motif, exact: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain { value: p, domain: "[0, 1]" });
    }
    let v = motif.vertex_count();
    let lead = if exact { falling_factorial(m, v) } else { (m as f64).powi(v as i32) };
    Ok(lead * p.powi(motif.edge_count() as i32) / motif.aut() as f64)
}

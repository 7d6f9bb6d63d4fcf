//! The 3-uniform hypergraph H(A) whose edges are the nontrivial 3-APs of
//! A, with the degree statistics (d, Δ₂, Δ₃) and the container control
//! function Δ(H, τ) = 4Δ₂/(dτ) + 2Δ₃/(dτ²).

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::progressions::collect_3ap_sets;
use std::collections::HashMap;

/// Hard cap on materialized edge lists.
pub const EDGE_LIMIT: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct APHypergraph {
    vertex_count: usize,
    /// Sorted vertex-position triples in lexicographic order.
    edges: Vec<[u32; 3]>,
    degree: Vec<u32>,
    delta2: u32,
    delta3: u32,
}

impl APHypergraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn edges(&self) -> &[[u32; 3]] {
        &self.edges
    }
    pub fn degree(&self) -> &[u32] {
        &self.degree
    }
    /// Average vertex degree 3|E|/|V|.
    pub fn d_avg(&self) -> f64 {
        3.0 * self.edges.len() as f64 / self.vertex_count as f64
    }
    /// Max co-degree over vertex pairs; at most 3 for AP hypergraphs.
    pub fn delta2(&self) -> u32 {
        self.delta2
    }
    /// Max co-degree over vertex triples; 1 whenever an edge exists.
    pub fn delta3(&self) -> u32 {
        self.delta3
    }
}

/// Build H(A) with vertices indexed by position in `a.members()`.
pub fn build_hypergraph(a: &GroundSet) -> Result<APHypergraph> {
    let sets = collect_3ap_sets(a, EDGE_LIMIT)?;
    // positions of elements within the member list
    let pos: HashMap<u64, u32> = a
        .members()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let mut edges: Vec<[u32; 3]> = sets
        .iter()
        .map(|t| {
            let mut e = [pos[&t[0]], pos[&t[1]], pos[&t[2]]];
            e.sort_unstable();
            e
        })
        .collect();
    edges.sort_unstable();

    let mut degree = vec![0u32; a.len()];
    let mut pair_codegree: HashMap<(u32, u32), u32> = HashMap::new();
    for e in &edges {
        for &v in e {
            degree[v as usize] += 1;
        }
        for (x, y) in [(e[0], e[1]), (e[0], e[2]), (e[1], e[2])] {
            *pair_codegree.entry((x, y)).or_insert(0) += 1;
        }
    }
    let delta2 = pair_codegree.values().copied().max().unwrap_or(0);
    let delta3 = if edges.is_empty() { 0 } else { 1 };
    Ok(APHypergraph {
        vertex_count: a.len(),
        edges,
        degree,
        delta2,
        delta3,
    })
}

/// The container control function Δ(H, τ) for 3-uniform hypergraphs.
pub fn delta_function(h: &APHypergraph, tau: f64) -> Result<f64> {
    if h.edge_count() == 0 {
        return Err(Error::EmptyHypergraph);
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::DomainError(format!("tau = {} not in (0,1)", tau)));
    }
    let d = h.d_avg();
    Ok(4.0 * h.delta2() as f64 / (d * tau) + 2.0 * h.delta3() as f64 / (d * tau * tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fq::FieldSpace;
    use crate::ground::{Ambient, GroundSet};
    use crate::rng::{domain, SeqRng};

    #[test]
    fn f3_squared_statistics() {
        let space = FieldSpace::make(3, 2).unwrap();
        let h = build_hypergraph(&GroundSet::full(Ambient::Field(space))).unwrap();
        assert_eq!(h.edge_count(), 12);
        assert_eq!(h.d_avg(), 4.0);
        assert_eq!(h.delta2(), 1); // two points of AG(2,3) span one line
        assert_eq!(h.delta3(), 1);
        let v = delta_function(&h, 0.1).unwrap();
        assert!((v - 60.0).abs() < 1e-12, "got {}", v);
    }

    #[test]
    fn tiny_interval() {
        let a = GroundSet::from_members(Ambient::Interval { n: 3 }, vec![1, 2, 3]).unwrap();
        let h = build_hypergraph(&a).unwrap();
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.degree(), &[1, 1, 1]);
    }

    #[test]
    fn ap_free_set_has_no_edges() {
        let a = GroundSet::from_members(Ambient::Interval { n: 10 }, vec![1, 2, 4, 5, 10])
            .unwrap();
        let h = build_hypergraph(&a).unwrap();
        assert_eq!(h.edge_count(), 0);
        assert_eq!(h.delta3(), 0);
        assert!(matches!(
            delta_function(&h, 0.5),
            Err(Error::EmptyHypergraph)
        ));
    }

    #[test]
    fn delta_formula_direct() {
        // Δ₂ = 3, Δ₃ = 1, d = 10^6, τ = 10^-2 -> 0.0212
        let d: f64 = 1e6;
        let tau: f64 = 1e-2;
        let v = 4.0 * 3.0 / (d * tau) + 2.0 * 1.0 / (d * tau * tau);
        assert!((v - 0.0212).abs() < 1e-12);
    }

    #[test]
    fn delta_scaling_identity() {
        // Δ(H,τ)·dτ² = 4Δ₂τ + 2Δ₃ for every built hypergraph
        let mut rng = SeqRng::new(9, domain::TRIAL);
        for _ in 0..20 {
            let members: Vec<u64> = (1..=50).filter(|_| rng.next_u64() % 2 == 0).collect();
            let a = GroundSet::from_members(Ambient::Interval { n: 50 }, members).unwrap();
            let h = build_hypergraph(&a).unwrap();
            if h.edge_count() == 0 {
                continue;
            }
            for tau in [0.01, 0.1, 0.9] {
                let lhs = delta_function(&h, tau).unwrap() * h.d_avg() * tau * tau;
                let rhs = 4.0 * h.delta2() as f64 * tau + 2.0 * h.delta3() as f64;
                assert!((lhs - rhs).abs() < 1e-9 * rhs.max(1.0));
            }
        }
    }

    #[test]
    fn codegree_bounds_fuzzed() {
        let mut rng = SeqRng::new(31, domain::TRIAL);
        for trial in 0..60 {
            let set = if trial % 2 == 0 {
                let members: Vec<u64> = (1..=60).filter(|_| rng.next_u64() % 3 != 0).collect();
                GroundSet::from_members(Ambient::Interval { n: 60 }, members).unwrap()
            } else {
                let space = FieldSpace::make(3, 3).unwrap();
                let members: Vec<u64> = (0..27).filter(|_| rng.next_u64() % 3 != 0).collect();
                GroundSet::from_members(Ambient::Field(space), members).unwrap()
            };
            let h = build_hypergraph(&set).unwrap();
            assert!(h.delta2() <= 3, "delta2 = {}", h.delta2());
            assert!(h.delta3() <= 1);
        }
    }
}

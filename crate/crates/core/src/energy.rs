//! Additive energy machinery: E(A), the representation counts r_{A+A},
//! and the ordered progression count T(A) = Σ_{b∈A} r_{A+A}(2b).
//!
//! T(A) follows the convention of the Cauchy–Schwarz chain
//! T(A)² <= |A| Σ r² = |A| E(A): ordered pairs, trivial x = y included.
//! The nontrivial-unordered count is carried alongside so the two
//! conventions never get mixed up; they relate by
//! `t_ordered = |A| + ordered_nontrivial`.

use crate::error::{Error, Result};
use crate::ground::{Ambient, GroundSet};
use crate::progressions::count_3aps;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::HashMap;

/// Sets larger than this could push E(A) past 64 bits (E <= |A|³).
const MAX_ENERGY_CARD: usize = 2_000_000;
/// Dense representation-count array cap.
const DENSE_RANGE_LIMIT: u64 = 20_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct EnergyProfile {
    pub cardinality: usize,
    /// Number of quadruples (a,b,c,d) ∈ A⁴ with a + b = c + d.
    pub energy: u64,
    /// Σ_{b∈A} r_{A+A}(2b): ordered pairs summing to twice a member.
    pub t_ordered: u64,
    /// Unordered nontrivial 3-AP count, `None` when the ambient forbids
    /// 3-APs (characteristic 2).
    pub t_nontrivial_unordered: Option<u64>,
    pub max_rep: u64,
    /// Nonzero representation counts, sorted by sum.
    #[serde(skip)]
    pub rep_counts: Vec<(u64, u64)>,
}

enum RepCounts {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl RepCounts {
    fn bump(&mut self, s: u64) {
        match self {
            RepCounts::Dense(v) => v[s as usize] += 1,
            RepCounts::Sparse(m) => *m.entry(s).or_insert(0) += 1,
        }
    }

    fn get(&self, s: u64) -> u64 {
        match self {
            RepCounts::Dense(v) => v.get(s as usize).copied().unwrap_or(0) as u64,
            RepCounts::Sparse(m) => m.get(&s).copied().unwrap_or(0) as u64,
        }
    }

    fn nonzero(self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = match self {
            RepCounts::Dense(v) => v
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c > 0)
                .map(|(s, c)| (s as u64, c as u64))
                .collect(),
            RepCounts::Sparse(m) => m.into_iter().map(|(s, c)| (s, c as u64)).collect(),
        };
        out.sort_unstable();
        out
    }
}

/// Exact additive-energy profile of `a`, by O(|A|²) pair iteration.
pub fn energy_profile(a: &GroundSet) -> Result<EnergyProfile> {
    let m = a.len();
    if m > MAX_ENERGY_CARD {
        return Err(Error::EnergyOverflow { cardinality: m });
    }
    let members = a.members();
    let (sum_of, double_of): (Box<dyn Fn(u64, u64) -> u64>, Box<dyn Fn(u64) -> u64>) =
        match a.ambient() {
            Ambient::Interval { .. } => (Box::new(|x, y| x + y), Box::new(|x| 2 * x)),
            Ambient::Field(s) => {
                let s1 = s.clone();
                let s2 = s.clone();
                (
                    Box::new(move |x, y| s1.add_idx(x, y)),
                    Box::new(move |x| s2.add_idx(x, x)),
                )
            }
        };
    let range = match a.ambient() {
        Ambient::Interval { n } => 2 * n + 1,
        Ambient::Field(s) => s.size(),
    };
    let mut rep = if range <= DENSE_RANGE_LIMIT {
        RepCounts::Dense(vec![0u32; range as usize])
    } else {
        RepCounts::Sparse(HashMap::new())
    };
    for &x in members {
        for &y in members {
            rep.bump(sum_of(x, y));
        }
    }
    let t_ordered: u64 = members.iter().map(|&b| rep.get(double_of(b))).sum();
    let rep_counts = rep.nonzero();
    let energy: u64 = rep_counts.iter().map(|&(_, c)| c * c).sum();
    let max_rep = rep_counts.iter().map(|&(_, c)| c).max().unwrap_or(0);
    let t_nontrivial_unordered = match a.ambient() {
        Ambient::Field(s) if s.p_char() < 3 => None,
        _ => Some(count_3aps(a)?.unordered_nontrivial),
    };
    Ok(EnergyProfile {
        cardinality: m,
        energy,
        t_ordered,
        t_nontrivial_unordered,
        max_rep,
        rep_counts,
    })
}

/// Both sides of T(A)² <= |A|·E(A), plus their ratio.
#[derive(Clone, Debug)]
pub struct CauchySchwarzReport {
    pub lhs: u128,
    pub rhs: u128,
    pub slack_ratio: f64,
}

impl Serialize for CauchySchwarzReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CauchySchwarzReport", 3)?;
        // the exact integers can exceed 64 bits, so they travel as strings
        st.serialize_field("lhs", &self.lhs.to_string())?;
        st.serialize_field("rhs", &self.rhs.to_string())?;
        st.serialize_field("slack_ratio", &self.slack_ratio)?;
        st.end()
    }
}

pub fn cauchy_schwarz_report(a: &GroundSet) -> Result<CauchySchwarzReport> {
    let p = energy_profile(a)?;
    Ok(cauchy_schwarz_of(&p))
}

pub fn cauchy_schwarz_of(p: &EnergyProfile) -> CauchySchwarzReport {
    let lhs = (p.t_ordered as u128) * (p.t_ordered as u128);
    let rhs = (p.cardinality as u128) * (p.energy as u128);
    CauchySchwarzReport {
        lhs,
        rhs,
        slack_ratio: if rhs == 0 {
            f64::NAN
        } else {
            lhs as f64 / rhs as f64
        },
    }
}

/// Empirical energy exponent ε̂ = log E(A) / log |A| - 2.
pub fn energy_exponent(p: &EnergyProfile) -> Result<f64> {
    if p.cardinality < 2 {
        return Err(Error::DomainError(
            "energy exponent needs |A| >= 2".into(),
        ));
    }
    Ok((p.energy as f64).ln() / (p.cardinality as f64).ln() - 2.0)
}

/// E([1..N]) in closed form, (2N³ + N)/3.
pub fn interval_energy_closed_form(n: u64) -> u64 {
    (2 * n * n * n + n) / 3
}

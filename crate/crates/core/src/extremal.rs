//! Largest k-AP-free subset: exact branch-and-bound over the k-AP
//! hypergraph, a subset-enumeration oracle for tiny instances, and a
//! seeded randomized-greedy heuristic for lower-bound witnesses.
//!
//! Every returned witness is re-certified by exhaustive progression
//! counting, which is a separate code path from the search itself.

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::progressions::{collect_3ap_sets, collect_4ap_sets, count_3aps, count_4aps};
use crate::rng::{domain, splitmix64, SeqRng};
use serde::Serialize;

/// Hard vertex cap for the exact solver (positions live in a u128 mask).
pub const EXACT_LIMIT: usize = 128;
/// Vertex cap for the full subset-enumeration oracle.
pub const ORACLE_LIMIT: usize = 25;
/// Default node budget for the exact solver.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Oracle,
    Heuristic,
}

/// Vertex selection on degree ties; the alternative order exists so exact
/// results can be cross-checked by a search that explores differently.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    SmallestIndex,
    LargestIndex,
}

#[derive(Clone, Debug)]
pub struct ExtremalResult {
    pub mode: SearchMode,
    pub k: u8,
    pub size: u64,
    pub witness: GroundSet,
    pub optimal: bool,
    pub nodes_explored: u64,
}

fn progression_masks(a: &GroundSet, k: u8) -> Result<Vec<u128>> {
    let pos = |v: u64| a.members().binary_search(&v).expect("member") as u32;
    let mask = |vs: &[u64]| vs.iter().fold(0u128, |m, &v| m | (1u128 << pos(v)));
    Ok(match k {
        3 => collect_3ap_sets(a, 1 << 24)?
            .iter()
            .map(|t| mask(t))
            .collect(),
        4 => collect_4ap_sets(a, 1 << 24)?
            .iter()
            .map(|t| mask(t))
            .collect(),
        _ => return Err(Error::DomainError(format!("unsupported k = {}", k))),
    })
}

fn mask_to_witness(a: &GroundSet, mask: u128) -> GroundSet {
    let members: Vec<u64> = a
        .members()
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask >> i & 1 == 1)
        .map(|(_, &v)| v)
        .collect();
    GroundSet::from_members(a.ambient().clone(), members).expect("witness members are valid")
}

/// Exhaustive re-count on the witness; panics on an internal invariant
/// violation rather than returning a wrong certificate.
fn certify_witness(w: &GroundSet, k: u8) {
    let c = match k {
        3 => count_3aps(w).expect("witness ambient supports 3-APs"),
        _ => count_4aps(w).expect("witness ambient supports 4-APs"),
    };
    assert_eq!(
        c.unordered_nontrivial, 0,
        "internal error: witness contains a {}-AP",
        k
    );
}

/// Ground truth by decreasing-popcount subset enumeration; first k-AP-free
/// subset found is a maximum one.
pub fn fk_oracle(a: &GroundSet, k: u8) -> Result<ExtremalResult> {
    let m = a.len();
    if m > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            size: m,
            limit: ORACLE_LIMIT,
        });
    }
    let edges: Vec<u32> = progression_masks(a, k)?
        .iter()
        .map(|&e| e as u32)
        .collect();
    let full: u32 = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let mut nodes = 0u64;
    for size in (0..=m).rev() {
        if size == 0 {
            // the empty set is always progression-free
            let witness = mask_to_witness(a, 0);
            return Ok(ExtremalResult {
                mode: SearchMode::Oracle,
                k,
                size: 0,
                witness,
                optimal: true,
                nodes_explored: nodes,
            });
        }
        // Gosper's hack: all masks of the given popcount in increasing order
        let mut mask: u32 = (1u32 << size) - 1;
        while mask <= full {
            nodes += 1;
            if edges.iter().all(|&e| e & mask != e) {
                let witness = mask_to_witness(a, mask as u128);
                certify_witness(&witness, k);
                return Ok(ExtremalResult {
                    mode: SearchMode::Oracle,
                    k,
                    size: size as u64,
                    witness,
                    optimal: true,
                    nodes_explored: nodes,
                });
            }
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            if r == 0 {
                break;
            }
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    unreachable!("the empty subset always terminates the loop")
}

struct BranchState {
    edges: Vec<u128>,
    all: u128,
    budget: u64,
    nodes: u64,
    best_mask: u128,
    best_size: u32,
    tie: TieBreak,
    exhausted: bool,
}

impl BranchState {
    /// Returns false when the budget ran out and the search must unwind.
    fn recurse(&mut self, included: u128, mut excluded: u128) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return false;
        }

        // propagate: an edge with a single undecided vertex forces its exclusion
        loop {
            let mut forced = 0u128;
            for &e in &self.edges {
                if e & excluded != 0 {
                    continue;
                }
                let rem = e & !included;
                if rem == 0 {
                    return true; // progression fully included: dead branch
                }
                if rem.count_ones() == 1 {
                    forced |= rem;
                }
            }
            if forced == 0 {
                break;
            }
            excluded |= forced;
        }

        let free = self.all & !included & !excluded;
        let mut live_any = false;
        let mut disjoint = 0u32;
        let mut used = 0u128;
        for &e in &self.edges {
            if e & excluded != 0 {
                continue;
            }
            live_any = true;
            let f = e & free;
            if f & used == 0 {
                used |= f;
                disjoint += 1;
            }
        }
        if !live_any {
            let candidate = included | free;
            let size = candidate.count_ones();
            if size > self.best_size {
                self.best_size = size;
                self.best_mask = candidate;
            }
            return true;
        }

        // each vertex-disjoint live edge forces at least one exclusion
        let ub = included.count_ones() + free.count_ones() - disjoint;
        if ub <= self.best_size {
            return true;
        }

        // branch on the max-degree free vertex among live edges
        let mut best_v = u32::MAX;
        let mut best_deg = 0u32;
        let mut scan = free;
        while scan != 0 {
            let v = scan.trailing_zeros();
            let bit = 1u128 << v;
            scan &= !bit;
            let deg = self
                .edges
                .iter()
                .filter(|&&e| e & excluded == 0 && e & bit != 0)
                .count() as u32;
            let better = match self.tie {
                TieBreak::SmallestIndex => deg > best_deg,
                TieBreak::LargestIndex => deg >= best_deg,
            };
            if deg > 0 && (best_v == u32::MAX || better) {
                best_deg = deg;
                best_v = v;
            }
        }
        debug_assert_ne!(best_v, u32::MAX, "live edges imply a branch vertex");
        let bit = 1u128 << best_v;
        self.recurse(included | bit, excluded) && self.recurse(included, excluded | bit)
    }
}

/// Greedy seed: insert positions in ascending order, keep when feasible.
fn greedy_mask(m: usize, edges: &[u128]) -> u128 {
    let mut cur = 0u128;
    for v in 0..m {
        let cand = cur | (1u128 << v);
        if edges.iter().all(|&e| e & cand != e) {
            cur = cand;
        }
    }
    cur
}

/// Maximum independent set in the k-AP hypergraph by branch-and-bound.
pub fn fk_exact(a: &GroundSet, k: u8, budget: u64, tie: TieBreak) -> Result<ExtremalResult> {
    let m = a.len();
    if m > EXACT_LIMIT {
        return Err(Error::TooLarge {
            size: m,
            limit: EXACT_LIMIT,
        });
    }
    let edges = progression_masks(a, k)?;
    let all: u128 = if m == 128 {
        u128::MAX
    } else {
        (1u128 << m) - 1
    };
    let seed_mask = greedy_mask(m, &edges);
    let mut state = BranchState {
        edges,
        all,
        budget,
        nodes: 0,
        best_mask: seed_mask,
        best_size: seed_mask.count_ones(),
        tie,
        exhausted: false,
    };
    state.recurse(0, 0);
    let witness = mask_to_witness(a, state.best_mask);
    certify_witness(&witness, k);
    Ok(ExtremalResult {
        mode: SearchMode::Exact,
        k,
        size: state.best_size as u64,
        witness,
        optimal: !state.exhausted,
        nodes_explored: state.nodes,
    })
}

/// Would adding `x` to the set held in `present` complete a k-AP?
/// `present` must answer membership for current picks; `others` lists them.
fn completes_kap(a: &GroundSet, others: &[u64], present: &dyn Fn(u64) -> bool, x: u64, k: u8) -> bool {
    match a.ambient() {
        crate::ground::Ambient::Interval { n } => {
            let ub = *n as i64;
            let xi = x as i64;
            let inside = |v: i64| v >= 1 && v <= ub && present(v as u64);
            for &s in others {
                let si = s as i64;
                let d = si - xi;
                if d == 0 {
                    continue;
                }
                if k == 3 {
                    // x endpoint (2s - x) or x midpoint (2x - s)
                    if inside(2 * si - xi) || inside(2 * xi - si) {
                        return true;
                    }
                } else {
                    // x adjacent to s at offset d: three slot patterns
                    if (inside(xi + 2 * d) && inside(xi + 3 * d))
                        || (inside(xi - d) && inside(xi + 2 * d))
                        || (inside(xi - 2 * d) && inside(xi - d))
                    {
                        return true;
                    }
                }
            }
            false
        }
        crate::ground::Ambient::Field(space) => {
            for &s in others {
                if s == x {
                    continue;
                }
                if k == 3 {
                    let e1 = space.sub_idx(space.add_idx(s, s), x);
                    let e2 = space.sub_idx(space.add_idx(x, x), s);
                    if present(e1) || present(e2) {
                        return true;
                    }
                } else {
                    let d = space.sub_idx(s, x);
                    let x2 = space.add_idx(s, d);
                    let x3 = space.add_idx(x2, d);
                    let xm1 = space.sub_idx(x, d);
                    let xm2 = space.sub_idx(xm1, d);
                    if (present(x2) && present(x3))
                        || (present(xm1) && present(x2))
                        || (present(xm2) && present(xm1))
                    {
                        return true;
                    }
                }
            }
            false
        }
    }
}

/// Seeded randomized greedy with restarts plus a 1-swap local search.
pub fn fk_heuristic(a: &GroundSet, k: u8, iters: u64, seed: u64) -> Result<ExtremalResult> {
    if let crate::ground::Ambient::Field(space) = a.ambient() {
        space.require_char_for_ap(k)?;
    }
    if k != 3 && k != 4 {
        return Err(Error::DomainError(format!("unsupported k = {}", k)));
    }
    let mut best: Option<Vec<u64>> = None;
    for iter in 0..iters.max(1) {
        let mut rng = SeqRng::new(splitmix64(seed ^ splitmix64(iter)), domain::HEURISTIC);
        let mut order: Vec<u64> = a.members().to_vec();
        rng.shuffle(&mut order);

        let mut bits = crate::ground::BitSet::new(match a.ambient() {
            crate::ground::Ambient::Interval { n } => n + 1,
            crate::ground::Ambient::Field(s) => s.size(),
        });
        let mut picks: Vec<u64> = Vec::new();
        {
            let try_add = |x: u64, picks: &mut Vec<u64>, bits: &mut crate::ground::BitSet| {
                let ok = {
                    let present = |v: u64| bits.get(v);
                    !completes_kap(a, picks, &present, x, k)
                };
                if ok {
                    picks.push(x);
                    bits.set(x);
                }
            };
            for &x in &order {
                try_add(x, &mut picks, &mut bits);
            }
        }

        // local improvement: free adds, then 1-out-many-in swaps
        loop {
            let mut improved = false;
            for &x in a.members() {
                if bits.get(x) {
                    continue;
                }
                let present = |v: u64| bits.get(v);
                if !completes_kap(a, &picks, &present, x, k) {
                    picks.push(x);
                    bits.set(x);
                    improved = true;
                }
            }
            if !improved {
                let snapshot = picks.clone();
                'swap: for &out in &snapshot {
                    bits.clear(out);
                    let mut trial: Vec<u64> = picks.iter().copied().filter(|&v| v != out).collect();
                    let mut gained = 0usize;
                    for &x in a.members() {
                        if bits.get(x) || x == out {
                            continue;
                        }
                        let present = |v: u64| bits.get(v);
                        if !completes_kap(a, &trial, &present, x, k) {
                            trial.push(x);
                            bits.set(x);
                            gained += 1;
                        }
                    }
                    if gained >= 2 {
                        picks = trial;
                        improved = true;
                        break 'swap;
                    }
                    // revert
                    for &x in &trial {
                        if !picks.contains(&x) {
                            bits.clear(x);
                        }
                    }
                    bits.set(out);
                }
            }
            if !improved {
                break;
            }
        }

        picks.sort_unstable();
        let better = match &best {
            None => true,
            Some(b) => picks.len() > b.len(),
        };
        if better {
            best = Some(picks);
        }
    }
    let members = best.unwrap_or_default();
    let witness = GroundSet::from_members(a.ambient().clone(), members).expect("picks are members");
    certify_witness(&witness, k);
    Ok(ExtremalResult {
        mode: SearchMode::Heuristic,
        k,
        size: witness.len() as u64,
        witness,
        optimal: false,
        nodes_explored: iters,
    })
}

/// Minimum deletions to destroy every k-AP: |A| - f_k(A).
pub fn min_deletion(a: &GroundSet, k: u8, budget: u64) -> Result<u64> {
    let r = fk_exact(a, k, budget, TieBreak::SmallestIndex)?;
    if !r.optimal {
        return Err(Error::BudgetExhausted {
            best_size: r.size,
            nodes: r.nodes_explored,
        });
    }
    Ok(a.len() as u64 - r.size)
}

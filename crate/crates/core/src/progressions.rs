//! Exact enumeration of k-term arithmetic progressions (k = 3, 4) and of
//! triangles (x + y + z = 0) in subsets of `{1..N}` and of F_q^n.
//!
//! All kernels iterate ordered pairs `(a, b)` with `d = b - a != 0` and
//! membership-test the remaining progression points against the set's
//! bitmap, so counts are exact. A 3-AP in a field ambient is the midpoint
//! relation `a + c = 2b` on distinct elements. Pair loops are partitioned
//! across threads with an order-independent sum reduction.

use crate::error::{Error, Result};
use crate::fq::FieldSpace;
use crate::ground::{Ambient, GroundSet};
use rayon::prelude::*;

/// Progression tallies in both conventions.
///
/// `ordered_nontrivial` counts parametrizations `(x, d)` with `d != 0`;
/// `unordered_nontrivial` counts distinct element sets. The ratio between
/// the two is fixed by the ambient: 2 over the integers, 2 in fields of
/// characteristic >= 5 (k = 3) or >= 7 (k = 4), 6 for 3-APs in
/// characteristic 3 (a full line), and 4 for 4-APs in characteristic 5
/// (every 4-subset of a 5-point line is a progression four ways).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct APCounts {
    pub k: u8,
    pub ordered_nontrivial: u64,
    pub unordered_nontrivial: u64,
}

/// (x, d)-parametrizations per element set, by ambient and k.
fn orbit_size(ambient: &Ambient, k: u8) -> u64 {
    match (ambient, k) {
        (Ambient::Interval { .. }, _) => 2,
        (Ambient::Field(s), 3) => {
            if s.p_char() == 3 {
                6
            } else {
                2
            }
        }
        (Ambient::Field(s), 4) => {
            if s.p_char() == 5 {
                4
            } else {
                2
            }
        }
        _ => unreachable!("k is 3 or 4"),
    }
}

fn par_sum(m: usize, per_i: impl Fn(usize) -> u64 + Sync + Send) -> u64 {
    if m >= 512 {
        (0..m).into_par_iter().map(per_i).sum()
    } else {
        (0..m).map(per_i).sum()
    }
}

/// Cap on block-table size (entries per table).
const BLOCK_TABLE_LIMIT: u64 = 30_000_000;

/// `kb·x` in the ambient group, for a small nonnegative integer kb.
fn int_scale(space: &FieldSpace, kb: u32, x: u64) -> u64 {
    let mut acc = 0u64;
    for _ in 0..kb {
        acc = space.add_idx(acc, x);
    }
    acc
}

/// Pair-indexed lookup of the linear form `cb·b - ca·a` on a digit block.
///
/// Splitting indices as `v = v1 + Q1·v2` makes the form blockwise:
/// `f(b, a) = T1[b1, a1] + Q1·T2[b2, a2]`, so the hot pair loop needs two
/// L1-resident row lookups and one bitmap probe per pair instead of a
/// per-digit reduction.
struct BlockForm {
    q1: u64,
    q2: u64,
    t1: Vec<u32>,
    t2: Vec<u32>,
}

impl BlockForm {
    fn build(space: &FieldSpace, cb: u32, ca: u32) -> Option<BlockForm> {
        let q = space.q();
        let n = space.n();
        let n1 = n.div_ceil(2);
        let q1 = q.checked_pow(n1)?;
        if q1.checked_mul(q1)? > BLOCK_TABLE_LIMIT {
            return None;
        }
        // blocks behave like smaller spaces over the same field
        let block_table = |dim: u32| -> Vec<u32> {
            if dim == 0 {
                return vec![0u32];
            }
            let sub = FieldSpace::make(q, dim).expect("block of a valid space");
            let qd = sub.size();
            let mut t = vec![0u32; (qd * qd) as usize];
            for b in 0..qd {
                let vb = int_scale(&sub, cb, b);
                for a in 0..qd {
                    let va = int_scale(&sub, ca, a);
                    t[(b * qd + a) as usize] = sub.sub_idx(vb, va) as u32;
                }
            }
            t
        };
        let n2 = n - n1;
        Some(BlockForm {
            q1,
            q2: if n2 == 0 { 1 } else { q.pow(n2) },
            t1: block_table(n1),
            t2: block_table(n2),
        })
    }
}

/// Build block tables only when the pair loop outweighs the build cost;
/// tiny subsets of big spaces go through the per-pair fallback instead.
fn block_forms_if_worthwhile(
    space: &FieldSpace,
    m: usize,
    coefs: &[(u32, u32)],
) -> Option<Vec<BlockForm>> {
    let n1 = space.n().div_ceil(2);
    let table_cost = space.q().checked_pow(2 * n1)?;
    if (m as u64).checked_mul(m as u64)? < table_cost {
        return None;
    }
    coefs
        .iter()
        .map(|&(cb, ca)| BlockForm::build(space, cb, ca))
        .collect()
}

/// Ordered-pair count of the diagonal-inclusive form hits, over one or two
/// linear forms; the caller corrects for the diagonal.
fn block_pair_count(a: &GroundSet, forms: &[BlockForm]) -> u64 {
    let members = a.members();
    let m = members.len();
    let bits = a.bits();
    let q1 = forms[0].q1;
    let q2 = forms[0].q2;
    let blk1: Vec<u32> = members.iter().map(|&v| (v % q1) as u32).collect();
    let blk2: Vec<u32> = members.iter().map(|&v| (v / q1) as u32).collect();
    match forms {
        [f] => par_sum(m, |j| {
            let row1 = &f.t1[(blk1[j] as u64 * q1) as usize..][..q1 as usize];
            let row2 = &f.t2[(blk2[j] as u64 * q2) as usize..][..q2 as usize];
            let mut cnt = 0u64;
            for (&a1, &a2) in blk1.iter().zip(&blk2) {
                let c = row1[a1 as usize] as u64 + q1 * row2[a2 as usize] as u64;
                cnt += bits.get(c) as u64;
            }
            cnt
        }),
        [f, g] => par_sum(m, |j| {
            let frow1 = &f.t1[(blk1[j] as u64 * q1) as usize..][..q1 as usize];
            let frow2 = &f.t2[(blk2[j] as u64 * q2) as usize..][..q2 as usize];
            let grow1 = &g.t1[(blk1[j] as u64 * q1) as usize..][..q1 as usize];
            let grow2 = &g.t2[(blk2[j] as u64 * q2) as usize..][..q2 as usize];
            let mut cnt = 0u64;
            for (&a1, &a2) in blk1.iter().zip(&blk2) {
                let c = frow1[a1 as usize] as u64 + q1 * frow2[a2 as usize] as u64;
                if bits.get(c) {
                    let e = grow1[a1 as usize] as u64 + q1 * grow2[a2 as usize] as u64;
                    cnt += bits.get(e) as u64;
                }
            }
            cnt
        }),
        _ => unreachable!("one or two forms"),
    }
}

/// Generic fallback for untabled (large prime q) spaces.
fn field_pair_count_generic(space: &FieldSpace, a: &GroundSet, k: u8) -> u64 {
    let members = a.members();
    let m = members.len();
    par_sum(m, |i| {
        let ai = members[i];
        let mut cnt = 0u64;
        for (j, &bj) in members.iter().enumerate() {
            if j == i {
                continue;
            }
            let two_b = space.add_idx(bj, bj);
            let c = space.sub_idx(two_b, ai);
            if !a.contains(c) {
                continue;
            }
            if k == 4 {
                let d = space.sub_idx(bj, ai);
                let e = space.add_idx(c, d);
                if !a.contains(e) {
                    continue;
                }
            }
            cnt += 1;
        }
        cnt
    })
}

/// Exact nontrivial 3-AP counts of `a`.
pub fn count_3aps(a: &GroundSet) -> Result<APCounts> {
    let ordered = match a.ambient() {
        Ambient::Interval { n } => {
            let members = a.members();
            let ub = *n as i64;
            let bits = a.bits();
            par_sum(members.len(), |i| {
                let ai = members[i] as i64;
                let mut cnt = 0u64;
                for (j, &bj) in members.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let c = 2 * bj as i64 - ai;
                    if c >= 1 && c <= ub && bits.get(c as u64) {
                        cnt += 1;
                    }
                }
                cnt
            })
        }
        Ambient::Field(space) => {
            space.require_char_for_ap(3)?;
            match block_forms_if_worthwhile(space, a.len(), &[(2, 1)]) {
                // diagonal pairs hit c = b, one spurious count per member
                Some(forms) => block_pair_count(a, &forms) - a.len() as u64,
                None => field_pair_count_generic(space, a, 3),
            }
        }
    };
    let orbit = orbit_size(a.ambient(), 3);
    debug_assert_eq!(ordered % orbit, 0);
    Ok(APCounts {
        k: 3,
        ordered_nontrivial: ordered,
        unordered_nontrivial: ordered / orbit,
    })
}

/// Exact nontrivial 4-AP counts of `a`.
pub fn count_4aps(a: &GroundSet) -> Result<APCounts> {
    let ordered = match a.ambient() {
        Ambient::Interval { n } => {
            let members = a.members();
            let ub = *n as i64;
            let bits = a.bits();
            par_sum(members.len(), |i| {
                let ai = members[i] as i64;
                let mut cnt = 0u64;
                for (j, &bj) in members.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let b = bj as i64;
                    let c = 2 * b - ai;
                    if c < 1 || c > ub || !bits.get(c as u64) {
                        continue;
                    }
                    let e = 3 * b - 2 * ai;
                    if e >= 1 && e <= ub && bits.get(e as u64) {
                        cnt += 1;
                    }
                }
                cnt
            })
        }
        Ambient::Field(space) => {
            space.require_char_for_ap(4)?;
            // c = 2b - a and e = 3b - 2a; diagonal pairs hit both
            match block_forms_if_worthwhile(space, a.len(), &[(2, 1), (3, 2)]) {
                Some(forms) => block_pair_count(a, &forms) - a.len() as u64,
                None => field_pair_count_generic(space, a, 4),
            }
        }
    };
    let orbit = orbit_size(a.ambient(), 4);
    debug_assert_eq!(ordered % orbit, 0);
    Ok(APCounts {
        k: 4,
        ordered_nontrivial: ordered,
        unordered_nontrivial: ordered / orbit,
    })
}

/// Exact count of triples `(x, y, z)` in `X x Y x Z` with `x + y + z = 0`.
pub fn count_triangles(x: &GroundSet, y: &GroundSet, z: &GroundSet) -> Result<u64> {
    let space = match (x.ambient(), y.ambient(), z.ambient()) {
        (Ambient::Field(a), Ambient::Field(b), Ambient::Field(c)) if a == b && b == c => a,
        _ => return Err(Error::AmbientMismatch),
    };
    let xs = x.members();
    let ys = y.members();
    Ok(par_sum(xs.len(), |i| {
        let xi = xs[i];
        let mut cnt = 0u64;
        for &yj in ys {
            let s = space.neg_idx(space.add_idx(xi, yj));
            if z.contains(s) {
                cnt += 1;
            }
        }
        cnt
    }))
}

/// All nontrivial 3-APs of `a` as sorted element triples, deduplicated and
/// in lexicographic order. Fails fast when the estimated list is too big.
pub fn collect_3ap_sets(a: &GroundSet, limit: u64) -> Result<Vec<[u64; 3]>> {
    let counts = count_3aps(a)?;
    if counts.unordered_nontrivial > limit {
        return Err(Error::EdgeListTooLarge {
            estimated: counts.unordered_nontrivial,
            limit,
        });
    }
    let members = a.members();
    let mut triples: Vec<[u64; 3]> = Vec::with_capacity(counts.unordered_nontrivial as usize);
    match a.ambient() {
        Ambient::Interval { n } => {
            let ub = *n as i64;
            let bits = a.bits();
            for (i, &ai) in members.iter().enumerate() {
                for (j, &bj) in members.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let c = 2 * bj as i64 - ai as i64;
                    // emit each set from its increasing traversal only
                    if c as u64 > ai && c >= 1 && c <= ub && bits.get(c as u64) {
                        let mut t = [ai, bj, c as u64];
                        t.sort_unstable();
                        triples.push(t);
                    }
                }
            }
        }
        Ambient::Field(space) => {
            space.require_char_for_ap(3)?;
            for (i, &ai) in members.iter().enumerate() {
                for (j, &bj) in members.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let c = space.sub_idx(space.add_idx(bj, bj), ai);
                    if c > ai && a.contains(c) {
                        let mut t = [ai, bj, c];
                        t.sort_unstable();
                        triples.push(t);
                    }
                }
            }
        }
    }
    triples.sort_unstable();
    triples.dedup();
    debug_assert_eq!(triples.len() as u64, counts.unordered_nontrivial);
    Ok(triples)
}

/// All nontrivial 4-APs of `a` as sorted element quadruples, deduplicated
/// and in lexicographic order.
pub fn collect_4ap_sets(a: &GroundSet, limit: u64) -> Result<Vec<[u64; 4]>> {
    let counts = count_4aps(a)?;
    if counts.unordered_nontrivial > limit {
        return Err(Error::EdgeListTooLarge {
            estimated: counts.unordered_nontrivial,
            limit,
        });
    }
    let members = a.members();
    let mut quads: Vec<[u64; 4]> = Vec::new();
    match a.ambient() {
        Ambient::Interval { n } => {
            let ub = *n as i64;
            let bits = a.bits();
            for &ai in members {
                let ai = ai as i64;
                for &bj in members {
                    let b = bj as i64;
                    if b <= ai {
                        continue;
                    }
                    let (c, e) = (2 * b - ai, 3 * b - 2 * ai);
                    if c <= ub && e <= ub && bits.get(c as u64) && bits.get(e as u64) {
                        quads.push([ai as u64, bj, c as u64, e as u64]);
                    }
                }
            }
        }
        Ambient::Field(space) => {
            space.require_char_for_ap(4)?;
            for (i, &ai) in members.iter().enumerate() {
                for (j, &bj) in members.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let c = space.sub_idx(space.add_idx(bj, bj), ai);
                    if !a.contains(c) {
                        continue;
                    }
                    let e = space.add_idx(c, space.sub_idx(bj, ai));
                    if e > ai && a.contains(e) {
                        let mut t = [ai, bj, c, e];
                        t.sort_unstable();
                        quads.push(t);
                    }
                }
            }
        }
    }
    quads.sort_unstable();
    quads.dedup();
    debug_assert_eq!(quads.len() as u64, counts.unordered_nontrivial);
    Ok(quads)
}

/// Closed form: unordered nontrivial 3-APs of the full interval `{1..N}`.
pub fn interval_full_3ap_count(n: u64) -> u64 {
    // sum over d >= 1 of max(0, N - 2d)
    (1..=n / 2).map(|d| n - 2 * d).sum()
}

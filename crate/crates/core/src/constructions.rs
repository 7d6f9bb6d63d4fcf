//! Seeded set constructions: Bernoulli random subsets, the
//! construct-then-delete pipelines (sample sparsely, destroy every 4-AP,
//! certify), the low-energy random construction, and the base-6 digits
//! set. Every certificate in a report was established by exhaustive
//! re-counting on the final set, never by sampling.

use crate::energy::{energy_exponent, energy_profile};
use crate::error::{Error, Result};
use crate::fq::FieldSpace;
use crate::ground::{Ambient, GroundSet};
use crate::progressions::{collect_3ap_sets, collect_4ap_sets, count_4aps};
use crate::rng::{bernoulli_threshold, domain, Stream};
use std::collections::BTreeMap;
use std::time::Instant;

/// Bernoulli inclusion model; all randomness comes from the crate's
/// counter-based generator (`rng::GENERATOR_ID`).
#[derive(Clone, Copy, Debug)]
pub struct RandomModel {
    pub p: f64,
    pub seed: u64,
}

/// Deletion order when destroying progressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeletionStrategy {
    /// Scan progressions in lexicographic order; delete the largest element
    /// of each progression not already broken.
    Canonical,
    /// Repeatedly delete the element covering the most surviving
    /// progressions, ties to the smallest element.
    Greedy,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Certificate {
    pub free: bool,
    pub method: String,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct Certificates {
    pub three_ap_free: Option<Certificate>,
    pub four_ap_free: Option<Certificate>,
}

/// Everything a pipeline run produces. Wall-clock timings are carried for
/// the manifest but are not part of the deterministic report payload.
#[derive(Clone, Debug)]
pub struct ConstructionReport {
    pub kind: &'static str,
    pub seed: Option<u64>,
    /// (stage name, cardinality) per pipeline stage, in order.
    pub stage_sizes: Vec<(String, u64)>,
    pub deleted_count: u64,
    pub certificates: Certificates,
    pub extras: BTreeMap<String, f64>,
    pub annulus: Option<crate::annulus::AnnulusDetails>,
    pub output: GroundSet,
    pub timings_ms: Vec<(String, f64)>,
}

fn exhaustive_cert(free: bool) -> Certificate {
    Certificate {
        free,
        method: "exhaustive-recount".into(),
    }
}

/// Each universe element joins independently with probability `p`; the draw
/// for element `e` is keyed by `e`'s position in canonical order, so the
/// result is identical however the loop is scheduled.
pub fn random_subset(ambient: &Ambient, model: &RandomModel) -> GroundSet {
    let stream = Stream::new(model.seed, domain::SUBSET);
    let threshold = bernoulli_threshold(model.p);
    let members: Vec<u64> = ambient
        .iter_universe()
        .enumerate()
        .filter(|&(i, _)| (stream.value(i as u64) as u128) < threshold)
        .map(|(_, e)| e)
        .collect();
    GroundSet::from_members(ambient.clone(), members).expect("universe members are valid")
}

/// Destroy every nontrivial k-AP of `a` by deletion; returns the surviving
/// set and the deleted elements in deletion order.
pub fn remove_kaps(
    a: &GroundSet,
    k: u8,
    strategy: DeletionStrategy,
) -> Result<(GroundSet, Vec<u64>)> {
    let sets3;
    let sets4;
    let sets: Vec<&[u64]> = match k {
        3 => {
            sets3 = collect_3ap_sets(a, crate::hypergraph::EDGE_LIMIT)?;
            sets3.iter().map(|t| &t[..]).collect()
        }
        4 => {
            sets4 = collect_4ap_sets(a, crate::hypergraph::EDGE_LIMIT)?;
            sets4.iter().map(|t| &t[..]).collect()
        }
        _ => return Err(Error::DomainError(format!("unsupported k = {}", k))),
    };
    let mut deleted: Vec<u64> = Vec::new();
    let mut dead = std::collections::HashSet::new();
    match strategy {
        DeletionStrategy::Canonical => {
            for t in &sets {
                if t.iter().all(|v| !dead.contains(v)) {
                    let victim = *t.last().unwrap();
                    dead.insert(victim);
                    deleted.push(victim);
                }
            }
        }
        DeletionStrategy::Greedy => loop {
            let mut coverage: BTreeMap<u64, u64> = BTreeMap::new();
            for t in &sets {
                if t.iter().all(|v| !dead.contains(v)) {
                    for &v in *t {
                        *coverage.entry(v).or_insert(0) += 1;
                    }
                }
            }
            // max coverage, ties to the smallest element
            let Some((&victim, _)) = coverage.iter().max_by_key(|&(&v, &c)| (c, std::cmp::Reverse(v)))
            else {
                break;
            };
            dead.insert(victim);
            deleted.push(victim);
        },
    }
    let survivor = a.without(&deleted);
    Ok((survivor, deleted))
}

/// Sample F_q^n at p = q^{-n/3}/100, delete one element from each 4-AP,
/// certify the survivor 4-AP-free.
pub fn pipeline_thm11(space: &FieldSpace, seed: u64) -> Result<ConstructionReport> {
    pipeline_thm11_with(space, seed, DeletionStrategy::Canonical)
}

pub fn pipeline_thm11_with(
    space: &FieldSpace,
    seed: u64,
    strategy: DeletionStrategy,
) -> Result<ConstructionReport> {
    space.require_char_for_ap(4)?;
    let q = space.q() as f64;
    let nf = space.n() as f64;
    let p = q.powf(-nf / 3.0) / 100.0;
    let expected_size = p * q.powf(nf);
    if expected_size < 50.0 {
        return Err(Error::TooSmall(format!(
            "expected sample size {:.2} < 50; pick a larger space",
            expected_size
        )));
    }
    let ambient = Ambient::Field(space.clone());
    let t0 = Instant::now();
    let sampled = random_subset(&ambient, &RandomModel { p, seed });
    let t_sample = t0.elapsed().as_secs_f64() * 1e3;

    let t0 = Instant::now();
    let before = count_4aps(&sampled)?;
    let (survivor, deleted) = remove_kaps(&sampled, 4, strategy)?;
    let after = count_4aps(&survivor)?;
    let t_delete = t0.elapsed().as_secs_f64() * 1e3;

    let mut extras = BTreeMap::new();
    extras.insert("p".into(), p);
    extras.insert("expected_size".into(), expected_size);
    extras.insert("four_aps_before".into(), before.unordered_nontrivial as f64);
    extras.insert(
        "expected_four_aps_bound".into(),
        p.powi(4) * q.powf(2.0 * nf),
    );
    Ok(ConstructionReport {
        kind: "thm11",
        seed: Some(seed),
        stage_sizes: vec![
            ("sampled".into(), sampled.len() as u64),
            ("deleted".into(), survivor.len() as u64),
        ],
        deleted_count: deleted.len() as u64,
        certificates: Certificates {
            three_ap_free: None,
            four_ap_free: Some(exhaustive_cert(after.unordered_nontrivial == 0)),
        },
        extras,
        annulus: None,
        output: survivor,
        timings_ms: vec![("sample".into(), t_sample), ("delete".into(), t_delete)],
    })
}

/// Sample F_q^n at p = q^{n(-1/2 + ε/(4-2ε))} and report the measured
/// additive energy against its high-probability envelope.
pub fn pipeline_lowenergy(space: &FieldSpace, eps: f64, seed: u64) -> Result<ConstructionReport> {
    space.require_char_for_ap(3)?;
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::RangeError(format!("eps = {} not in (0, 2)", eps)));
    }
    let q = space.q() as f64;
    let nf = space.n() as f64;
    let exponent = -0.5 + eps / (4.0 - 2.0 * eps);
    let p = q.powf(nf * exponent);
    let expected_size = p * q.powf(nf);
    if expected_size < 50.0 {
        return Err(Error::TooSmall(format!(
            "expected sample size {:.2} < 50",
            expected_size
        )));
    }
    let ambient = Ambient::Field(space.clone());
    let t0 = Instant::now();
    let sampled = random_subset(&ambient, &RandomModel { p, seed });
    let t_sample = t0.elapsed().as_secs_f64() * 1e3;

    let t0 = Instant::now();
    let profile = energy_profile(&sampled)?;
    let t_energy = t0.elapsed().as_secs_f64() * 1e3;

    let mut extras = BTreeMap::new();
    extras.insert("p".into(), p);
    extras.insert("eps".into(), eps);
    extras.insert("energy".into(), profile.energy as f64);
    extras.insert(
        "energy_envelope".into(),
        100.0 * q.powf(nf * (1.0 + 4.0 * eps / (4.0 - 2.0 * eps))),
    );
    extras.insert("size_floor".into(), expected_size / 100.0);
    extras.insert("t_ordered".into(), profile.t_ordered as f64);
    if sampled.len() >= 2 {
        extras.insert("epsilon_hat".into(), energy_exponent(&profile)?);
    }
    Ok(ConstructionReport {
        kind: "lowenergy",
        seed: Some(seed),
        stage_sizes: vec![("sampled".into(), sampled.len() as u64)],
        deleted_count: 0,
        certificates: Certificates::default(),
        extras,
        annulus: None,
        output: sampled,
        timings_ms: vec![("sample".into(), t_sample), ("energy".into(), t_energy)],
    })
}

/// Integers in `[1, N]` whose base-6 digits are all 0, 1 or 2, certified
/// 4-AP-free by exhaustive counting.
pub fn digits_base6(n: u64) -> Result<ConstructionReport> {
    let t0 = Instant::now();
    let members: Vec<u64> = (1..=n)
        .filter(|&m| {
            let mut v = m;
            while v > 0 {
                if v % 6 > 2 {
                    return false;
                }
                v /= 6;
            }
            true
        })
        .collect();
    let output = GroundSet::from_members(Ambient::Interval { n }, members)?;
    let t_build = t0.elapsed().as_secs_f64() * 1e3;
    let t0 = Instant::now();
    let c4 = count_4aps(&output)?;
    let t_cert = t0.elapsed().as_secs_f64() * 1e3;
    Ok(ConstructionReport {
        kind: "digits6",
        seed: None,
        stage_sizes: vec![("built".into(), output.len() as u64)],
        deleted_count: 0,
        certificates: Certificates {
            three_ap_free: None,
            four_ap_free: Some(exhaustive_cert(c4.unordered_nontrivial == 0)),
        },
        extras: BTreeMap::new(),
        annulus: None,
        output,
        timings_ms: vec![("build".into(), t_build), ("certify".into(), t_cert)],
    })
}

/// Bernoulli sample of a universe, reported with its deterministic model.
pub fn random_construct(ambient: &Ambient, model: &RandomModel) -> ConstructionReport {
    let t0 = Instant::now();
    let output = random_subset(ambient, model);
    let t_sample = t0.elapsed().as_secs_f64() * 1e3;
    let mut extras = BTreeMap::new();
    extras.insert("p".into(), model.p);
    ConstructionReport {
        kind: "random",
        seed: Some(model.seed),
        stage_sizes: vec![("sampled".into(), output.len() as u64)],
        deleted_count: 0,
        certificates: Certificates::default(),
        extras,
        annulus: None,
        output,
        timings_ms: vec![("sample".into(), t_sample)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{min_deletion, DEFAULT_BUDGET};
    use crate::progressions::count_3aps;
    use crate::ground::interval_set;

    #[test]
    fn random_subset_full_and_deterministic() {
        let amb = Ambient::Interval { n: 1000 };
        let full = random_subset(&amb, &RandomModel { p: 1.0, seed: 7 });
        assert_eq!(full.len(), 1000);
        let a = random_subset(&amb, &RandomModel { p: 0.3, seed: 11 });
        let b = random_subset(&amb, &RandomModel { p: 0.3, seed: 11 });
        assert_eq!(a.members(), b.members());
        let c = random_subset(&amb, &RandomModel { p: 0.3, seed: 12 });
        assert_ne!(a.members(), c.members());
    }

    #[test]
    fn random_subset_concentrates() {
        let amb = Ambient::Interval { n: 10_000 };
        let mut within = 0;
        for seed in 0..100 {
            let s = random_subset(&amb, &RandomModel { p: 0.5, seed });
            let dev = (s.len() as f64 - 5000.0).abs();
            if dev <= 150.0 {
                within += 1;
            }
        }
        assert!(within >= 99, "only {} of 100 seeds within 3 sigma", within);
    }

    #[test]
    fn canonical_deletion_examples() {
        let a = GroundSet::from_members(Ambient::Interval { n: 4 }, vec![1, 2, 3, 4]).unwrap();
        let (out, deleted) = remove_kaps(&a, 4, DeletionStrategy::Canonical).unwrap();
        assert_eq!(deleted, vec![4]);
        assert_eq!(out.members(), &[1, 2, 3]);

        let free = GroundSet::from_members(Ambient::Interval { n: 20 }, vec![1, 2, 4, 8, 16])
            .unwrap();
        let (out, deleted) = remove_kaps(&free, 4, DeletionStrategy::Canonical).unwrap();
        assert!(deleted.is_empty());
        assert_eq!(out.members(), free.members());
    }

    #[test]
    fn deletion_destroys_all_4aps_on_interval() {
        let a = interval_set(20);
        for strategy in [DeletionStrategy::Canonical, DeletionStrategy::Greedy] {
            let (out, deleted) = remove_kaps(&a, 4, strategy).unwrap();
            assert_eq!(count_4aps(&out).unwrap().unordered_nontrivial, 0);
            assert!(!deleted.is_empty());
            // at least the exact minimum number of deletions is needed
            let floor = min_deletion(&a, 4, DEFAULT_BUDGET).unwrap();
            assert!(deleted.len() as u64 >= floor);
            assert!(floor >= 5, "min vertex cover of 4-APs in [1..20] is {}", floor);
        }
    }

    #[test]
    fn greedy_never_deletes_more_than_canonical_here() {
        let a = interval_set(30);
        let (_, canonical) = remove_kaps(&a, 3, DeletionStrategy::Canonical).unwrap();
        let (out, greedy) = remove_kaps(&a, 3, DeletionStrategy::Greedy).unwrap();
        assert_eq!(count_3aps(&out).unwrap().unordered_nontrivial, 0);
        assert!(greedy.len() <= canonical.len());
    }

    #[test]
    fn digits6_examples() {
        let r = digits_base6(6).unwrap();
        assert_eq!(r.output.members(), &[1, 2, 6]);
        let r = digits_base6(15).unwrap();
        assert_eq!(r.output.members(), &[1, 2, 6, 7, 8, 12, 13, 14]);
        assert!(r.certificates.four_ap_free.as_ref().unwrap().free);
    }

    #[test]
    fn thm11_pipeline_smoke() {
        let space = FieldSpace::make(5, 9).unwrap();
        let r = pipeline_thm11(&space, 1).unwrap();
        assert!(r.certificates.four_ap_free.as_ref().unwrap().free);
        let sampled = r.stage_sizes[0].1;
        let survived = r.stage_sizes[1].1;
        assert!(survived <= sampled);
        assert!(sampled as u64 >= r.deleted_count + survived);
        // |P| within 3 binomial sigma of 156.25
        assert!((sampled as f64 - 156.25).abs() <= 3.0 * 12.5);
        // too-small spaces are rejected
        let tiny = FieldSpace::make(5, 3).unwrap();
        assert!(matches!(pipeline_thm11(&tiny, 1), Err(Error::TooSmall(_))));
    }

    #[test]
    fn lowenergy_pipeline_smoke() {
        let space = FieldSpace::make(3, 10).unwrap();
        let r = pipeline_lowenergy(&space, 0.5, 3).unwrap();
        assert!(r.extras.contains_key("energy"));
        assert!(r.extras["energy"] >= 0.0);
        assert!(r.extras["size_floor"] > 0.0);
        // optimality remark: at p = q^{-n/2}/2 the expected ordered 3-AP count
        // p³(q^{2n} - q^n) stays below the expected size p q^n
        let (q, n) = (3f64, 12f64);
        let p = q.powf(-n / 2.0) / 2.0;
        let expected_aps = p.powi(3) * (q.powf(2.0 * n) - q.powf(n));
        let expected_size = p * q.powf(n);
        assert!(expected_aps < expected_size);
        assert!((expected_aps - q.powf(n / 2.0) / 8.0).abs() < q.powf(n / 2.0) * 0.01);
    }
}

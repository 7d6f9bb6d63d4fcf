//! The torus-projection construction: map an integer set through
//! Ψ_{θ,α}(m) = θm + α (mod 1) into T^d, keep the preimage of a thin
//! spherical shell inside the box [0, 1/2]^d, delete the few surviving
//! 3-APs, and certify the result 3-AP-free.
//!
//! Torus points are 64-bit fixed-point fractions (value / 2^64) and the
//! map is evaluated with wrapping integer multiply-add, so Ψ is exactly
//! linear in m for every m: progression structure survives projection
//! with no floating-point drift. Floats appear only in the Euclidean
//! shell test, with the shell thickness kept >= 2^-30.

use crate::constructions::{
    remove_kaps, Certificate, Certificates, ConstructionReport, DeletionStrategy,
};
use crate::energy::energy_profile;
use crate::error::{Error, Result};
use crate::ground::{Ambient, GroundSet};
use crate::progressions::{collect_3ap_sets, count_3aps};
use crate::rng::{domain, Stream};
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;

/// Parameters of one projection: dimension, shell geometry, and the exact
/// fixed-point coordinates of θ and α.
#[derive(Clone, Debug, Serialize)]
pub struct AnnulusParams {
    pub d: u32,
    pub delta: f64,
    /// Outer radius of the selected shell.
    pub r: f64,
    pub theta: Vec<u64>,
    pub alpha: Vec<u64>,
}

/// Diagnostics carried in the construction report.
#[derive(Clone, Debug, Serialize)]
pub struct AnnulusDetails {
    pub params: AnnulusParams,
    pub shell_index: u64,
    pub shells_scanned: u64,
    /// T(A) in the ordered-with-trivial convention, and t(A) = N²/T(A).
    pub t_ordered: u64,
    pub t_a: f64,
    /// Behrend-scale size reference N·δ·2^{-d}.
    pub size_scale: f64,
    /// Parallelogram-law diagnostic on the surviving progressions:
    /// ‖Ψ_{θ,0}(difference)‖ <= √(2δr) with coordinates lifted to
    /// [-1/2, 1/2); counted, not asserted.
    pub parallelogram_checked: u64,
    pub parallelogram_violations: u64,
}

/// Ψ_{θ,α}(m): coordinate i is the wrapping fixed-point value m·θ_i + α_i.
pub fn psi_map(m: u64, theta: &[u64], alpha: &[u64]) -> Vec<u64> {
    debug_assert_eq!(theta.len(), alpha.len());
    theta
        .iter()
        .zip(alpha)
        .map(|(&t, &a)| m.wrapping_mul(t).wrapping_add(a))
        .collect()
}

const HALF: u64 = 1u64 << 63;
/// Smallest allowed shell thickness; below this the float norm test could
/// not resolve the shell boundaries.
pub const MIN_DELTA: f64 = 1.0 / (1u64 << 30) as f64;

#[inline]
fn to_unit(v: u64) -> f64 {
    v as f64 / 18_446_744_073_709_551_616.0
}

/// Coordinate folded to [-1/2, 1/2) for the difference diagnostic.
#[inline]
fn to_signed_unit(v: u64) -> f64 {
    (v as i64) as f64 / 18_446_744_073_709_551_616.0
}

fn norm_in_box(point: &[u64]) -> Option<f64> {
    let mut s = 0.0f64;
    for &c in point {
        if c > HALF {
            return None;
        }
        let x = to_unit(c);
        s += x * x;
    }
    Some(s.sqrt())
}

/// Is `x` inside the shell S(r) = {x in [0,1/2]^d : r-δ <= ‖x‖ <= r}?
pub fn shell_contains(point: &[u64], r: f64, delta: f64) -> bool {
    match norm_in_box(point) {
        Some(norm) => norm >= r - delta && norm <= r,
        None => false,
    }
}

/// Project `a` through a seeded Ψ, keep the largest shell preimage, delete
/// residual 3-APs, and certify. `d` and `delta` default to
/// ceil(sqrt(2 log2(N/t(A)))) and c′·√d·(t(A)/N)^{2/d}.
pub fn annulus_construct(
    a: &GroundSet,
    seed: u64,
    d_override: Option<u32>,
    delta_override: Option<f64>,
    c_prime: f64,
) -> Result<ConstructionReport> {
    annulus_construct_with(a, seed, d_override, delta_override, c_prime, DeletionStrategy::Canonical)
}

pub fn annulus_construct_with(
    a: &GroundSet,
    seed: u64,
    d_override: Option<u32>,
    delta_override: Option<f64>,
    c_prime: f64,
    strategy: DeletionStrategy,
) -> Result<ConstructionReport> {
    if !matches!(a.ambient(), Ambient::Interval { .. }) {
        return Err(Error::DomainError(
            "the annulus construction projects integer sets".into(),
        ));
    }
    if a.len() < 10 {
        return Err(Error::TooSmall(format!(
            "|A| = {} < 10 is below the projection scale",
            a.len()
        )));
    }

    let t0 = Instant::now();
    let counts = count_3aps(a)?;
    if counts.unordered_nontrivial == 0 {
        // already 3-AP-free: no projection performed
        return Ok(ConstructionReport {
            kind: "annulus",
            seed: Some(seed),
            stage_sizes: vec![("input".into(), a.len() as u64)],
            deleted_count: 0,
            certificates: Certificates {
                three_ap_free: Some(Certificate {
                    free: true,
                    method: "exhaustive-recount".into(),
                }),
                four_ap_free: None,
            },
            extras: BTreeMap::new(),
            annulus: None,
            output: a.clone(),
            timings_ms: vec![("count".into(), t0.elapsed().as_secs_f64() * 1e3)],
        });
    }

    let n = a.len() as f64;
    let profile = energy_profile(a)?;
    let t_big = profile.t_ordered;
    let t_a = n * n / t_big as f64;
    let t_params = t0.elapsed().as_secs_f64() * 1e3;

    let d = d_override.unwrap_or_else(|| ((2.0 * (n / t_a).log2()).sqrt().ceil() as u32).max(1));
    let delta = delta_override
        .unwrap_or_else(|| c_prime * (d as f64).sqrt() * (t_a / n).powf(2.0 / d as f64))
        .max(MIN_DELTA);
    let r_max = (d as f64).sqrt() / 2.0;
    let shells = (r_max / delta).floor() as u64;
    if shells == 0 {
        return Err(Error::DegenerateShell);
    }

    let theta: Vec<u64> = (0..d as u64).map(|i| Stream::new(seed, domain::THETA).value(i)).collect();
    let alpha: Vec<u64> = (0..d as u64).map(|i| Stream::new(seed, domain::ALPHA).value(i)).collect();

    // project and bin by shell index ceil(norm/δ)
    let t0 = Instant::now();
    let mut in_box: Vec<(u64, f64)> = Vec::new();
    for &m in a.members() {
        if let Some(norm) = norm_in_box(&psi_map(m, &theta, &alpha)) {
            in_box.push((m, norm));
        }
    }
    let mut shell_counts = vec![0u64; shells as usize + 1];
    for &(_, norm) in &in_box {
        let k = ((norm / delta).ceil() as u64).max(1);
        if k <= shells {
            shell_counts[k as usize] += 1;
        }
    }
    let (best_shell, best_count) = shell_counts
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| (k as u64, c))
        .max_by_key(|&(k, c)| (c, std::cmp::Reverse(k)))
        .unwrap_or((0, 0));
    if best_count == 0 {
        return Err(Error::DegenerateShell);
    }
    let r = best_shell as f64 * delta;
    let shell_members: Vec<u64> = in_box
        .iter()
        .filter(|&&(_, norm)| norm >= r - delta && norm <= r)
        .map(|&(m, _)| m)
        .collect();
    let t_project = t0.elapsed().as_secs_f64() * 1e3;

    let restricted = GroundSet::from_members(a.ambient().clone(), shell_members)?;

    // delete the largest element of each surviving progression, then certify
    let t0 = Instant::now();
    let survivors = collect_3ap_sets(&restricted, crate::hypergraph::EDGE_LIMIT)?;
    let mut checked = 0u64;
    let mut violations = 0u64;
    let bound = (2.0 * delta * r).sqrt();
    for t in &survivors {
        // difference of the progression, projected with α = 0 and lifted
        let diff = t[1] - t[0];
        let y: Vec<f64> = theta
            .iter()
            .map(|&th| to_signed_unit(diff.wrapping_mul(th)))
            .collect();
        let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
        checked += 1;
        if norm > bound {
            violations += 1;
        }
    }
    let (output, deleted) = remove_kaps(&restricted, 3, strategy)?;
    let clean = count_3aps(&output)?.unordered_nontrivial == 0;
    let t_delete = t0.elapsed().as_secs_f64() * 1e3;

    let mut extras = BTreeMap::new();
    extras.insert("surviving_3aps_before_deletion".into(), survivors.len() as f64);
    Ok(ConstructionReport {
        kind: "annulus",
        seed: Some(seed),
        stage_sizes: vec![
            ("input".into(), a.len() as u64),
            ("box".into(), in_box.len() as u64),
            ("shell".into(), restricted.len() as u64),
            ("deleted".into(), output.len() as u64),
        ],
        deleted_count: deleted.len() as u64,
        certificates: Certificates {
            three_ap_free: Some(Certificate {
                free: clean,
                method: "exhaustive-recount".into(),
            }),
            four_ap_free: None,
        },
        extras,
        annulus: Some(AnnulusDetails {
            params: AnnulusParams {
                d,
                delta,
                r,
                theta,
                alpha,
            },
            shell_index: best_shell,
            shells_scanned: shells,
            t_ordered: t_big,
            t_a,
            size_scale: n * delta * 2f64.powi(-(d as i32)),
            parallelogram_checked: checked,
            parallelogram_violations: violations,
        }),
        output,
        timings_ms: vec![
            ("params".into(), t_params),
            ("project".into(), t_project),
            ("delete".into(), t_delete),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::interval_set;

    #[test]
    fn psi_examples() {
        // θ = 0: the map is constantly α
        let alpha = vec![123u64, 456];
        assert_eq!(psi_map(7, &[0, 0], &alpha), alpha);
        // m = 0 gives α
        let theta = vec![999u64, 31337];
        assert_eq!(psi_map(0, &theta, &alpha), alpha);
        // θ = 1/2, α = 0, m = 3: coordinate 3/2 mod 1 = 1/2
        assert_eq!(psi_map(3, &[HALF], &[0]), vec![HALF]);
    }

    #[test]
    fn psi_is_exactly_linear() {
        let theta = vec![0x9E37_79B9_7F4A_7C15u64, 12345, u64::MAX];
        let alpha = vec![1u64, 2, 3];
        for m in [0u64, 1, 17, 1_000_000] {
            let a = psi_map(m, &theta, &alpha);
            let b = psi_map(m + 5, &theta, &alpha);
            for i in 0..theta.len() {
                assert_eq!(b[i].wrapping_sub(a[i]), 5u64.wrapping_mul(theta[i]));
            }
        }
    }

    #[test]
    fn shell_membership_midpoint() {
        // a point with ‖x‖ = r - δ/2 and coordinates <= 1/2 is inside S(r)
        let r = 0.4;
        let delta = 0.1;
        let norm = r - delta / 2.0;
        let coord = ((norm / 2f64.sqrt()) * 18_446_744_073_709_551_616.0) as u64;
        let point = vec![coord, coord];
        assert!(shell_contains(&point, r, delta));
        assert!(!shell_contains(&point, r - 2.0 * delta, delta));
        // out of the box
        assert!(!shell_contains(&[HALF + 10, 0], r, delta));
    }

    #[test]
    fn already_free_sets_pass_through() {
        let a = GroundSet::from_members(Ambient::Interval { n: 50 }, vec![
            1, 2, 4, 5, 10, 11, 13, 14, 28, 29,
        ])
        .unwrap();
        let r = annulus_construct(&a, 7, None, None, 1.0).unwrap();
        assert_eq!(r.output.members(), a.members());
        assert_eq!(r.deleted_count, 0);
        assert!(r.certificates.three_ap_free.as_ref().unwrap().free);
        assert!(r.annulus.is_none());
    }

    #[test]
    fn rejects_tiny_and_field_inputs() {
        assert!(matches!(
            annulus_construct(&interval_set(5), 1, None, None, 1.0),
            Err(Error::TooSmall(_))
        ));
        let space = crate::fq::FieldSpace::make(5, 2).unwrap();
        let f = GroundSet::full(Ambient::Field(space));
        assert!(annulus_construct(&f, 1, None, None, 1.0).is_err());
    }

    #[test]
    fn interval_run_is_certified_and_monotone() {
        let a = interval_set(2000);
        let r = annulus_construct(&a, 3, None, None, 1.0).unwrap();
        assert!(r.certificates.three_ap_free.as_ref().unwrap().free);
        let sizes: Vec<u64> = r.stage_sizes.iter().map(|&(_, s)| s).collect();
        assert!(sizes.windows(2).all(|w| w[1] <= w[0]), "{:?}", sizes);
        assert!(!r.output.is_empty());
        // deterministic reruns
        let r2 = annulus_construct(&a, 3, None, None, 1.0).unwrap();
        assert_eq!(r.output.members(), r2.output.members());
        let det = r.annulus.unwrap();
        assert!(det.params.d >= 1);
        assert!(det.params.delta >= MIN_DELTA);
        assert!(det.params.r <= (det.params.d as f64).sqrt() / 2.0 + 1e-12);
    }

    #[test]
    fn overrides_are_respected() {
        let a = interval_set(1500);
        let r = annulus_construct(&a, 5, Some(4), Some(0.05), 1.0).unwrap();
        let det = r.annulus.unwrap();
        assert_eq!(det.params.d, 4);
        assert!((det.params.delta - 0.05).abs() < 1e-12);
    }
}

//! Cross-validation of the pair-iteration counting kernels against an
//! independent oracle that enumerates all ordered element triples (or
//! quadruples) and tests the progression relation directly.

use aplab_core::fq::FieldSpace;
use aplab_core::ground::{Ambient, GroundSet};
use aplab_core::progressions::{count_3aps, count_4aps};
use aplab_core::rng::{domain, SeqRng};

/// Ordered 3-AP count by full triple enumeration.
fn oracle_3ap_ordered(set: &GroundSet) -> u64 {
    let ms = set.members();
    let mut cnt = 0u64;
    match set.ambient() {
        Ambient::Interval { .. } => {
            for &x in ms {
                for &y in ms {
                    if y == x {
                        continue;
                    }
                    for &z in ms {
                        if z == y || z == x {
                            continue;
                        }
                        if y as i64 - x as i64 == z as i64 - y as i64 {
                            cnt += 1;
                        }
                    }
                }
            }
        }
        Ambient::Field(space) => {
            for &x in ms {
                for &y in ms {
                    if y == x {
                        continue;
                    }
                    for &z in ms {
                        if z == y || z == x {
                            continue;
                        }
                        if space.sub(aplab_core::Elem(y), aplab_core::Elem(x))
                            == space.sub(aplab_core::Elem(z), aplab_core::Elem(y))
                        {
                            cnt += 1;
                        }
                    }
                }
            }
        }
    }
    cnt
}

/// Unordered 3-AP count: distinct 3-sets admitting some AP ordering.
fn oracle_3ap_unordered(set: &GroundSet) -> u64 {
    let ms = set.members();
    let m = ms.len();
    let is_ap = |a: u64, b: u64, c: u64| -> bool {
        match set.ambient() {
            Ambient::Interval { .. } => {
                let (a, b, c) = (a as i64, b as i64, c as i64);
                a + c == 2 * b || a + b == 2 * c || b + c == 2 * a
            }
            Ambient::Field(space) => {
                let two = |v: u64| space.add(aplab_core::Elem(v), aplab_core::Elem(v));
                let sum = |x: u64, y: u64| space.add(aplab_core::Elem(x), aplab_core::Elem(y));
                sum(a, c) == two(b) || sum(a, b) == two(c) || sum(b, c) == two(a)
            }
        }
    };
    let mut cnt = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                if is_ap(ms[i], ms[j], ms[k]) {
                    cnt += 1;
                }
            }
        }
    }
    cnt
}

fn oracle_4ap_ordered(set: &GroundSet) -> u64 {
    let ms = set.members();
    let mut cnt = 0u64;
    for &x in ms {
        for &y in ms {
            if x == y {
                continue;
            }
            let (p2, p3) = match set.ambient() {
                Ambient::Interval { n } => {
                    let d = y as i64 - x as i64;
                    let p2 = y as i64 + d;
                    let p3 = p2 + d;
                    if p2 < 1 || p3 < 1 || p2 > *n as i64 || p3 > *n as i64 {
                        continue;
                    }
                    (p2 as u64, p3 as u64)
                }
                Ambient::Field(space) => {
                    let e = aplab_core::Elem;
                    let d = space.sub(e(y), e(x));
                    let p2 = space.add(e(y), d);
                    let p3 = space.add(p2, d);
                    (p2.0, p3.0)
                }
            };
            if set.contains(p2) && set.contains(p3) {
                cnt += 1;
            }
        }
    }
    cnt
}

fn random_subset_of(universe: &GroundSet, keep_mod: u64, rng: &mut SeqRng) -> GroundSet {
    let members: Vec<u64> = universe
        .members()
        .iter()
        .copied()
        .filter(|_| rng.next_u64() % keep_mod != 0)
        .collect();
    GroundSet::from_members(universe.ambient().clone(), members).unwrap()
}

#[test]
fn kernel_matches_triple_oracle_on_500_sets() {
    let interval = GroundSet::full(Ambient::Interval { n: 60 });
    let f27 = GroundSet::full(Ambient::Field(FieldSpace::make(3, 3).unwrap()));
    let f25 = GroundSet::full(Ambient::Field(FieldSpace::make(5, 2).unwrap()));
    let mut rng = SeqRng::new(2024, domain::TRIAL);
    for trial in 0..500 {
        let set = match trial % 3 {
            0 => random_subset_of(&interval, 2, &mut rng),
            1 => random_subset_of(&f27, 2, &mut rng),
            _ => random_subset_of(&f25, 2, &mut rng),
        };
        let counts = count_3aps(&set).unwrap();
        assert_eq!(
            counts.ordered_nontrivial,
            oracle_3ap_ordered(&set),
            "ordered mismatch on {:?}",
            set.members()
        );
        assert_eq!(
            counts.unordered_nontrivial,
            oracle_3ap_unordered(&set),
            "unordered mismatch on {:?}",
            set.members()
        );
    }
}

#[test]
fn four_ap_kernel_matches_quadruple_oracle() {
    let interval = GroundSet::full(Ambient::Interval { n: 40 });
    let f25 = GroundSet::full(Ambient::Field(FieldSpace::make(5, 2).unwrap()));
    let f49 = GroundSet::full(Ambient::Field(FieldSpace::make(7, 2).unwrap()));
    let mut rng = SeqRng::new(77, domain::TRIAL);
    for trial in 0..150 {
        let set = match trial % 3 {
            0 => random_subset_of(&interval, 2, &mut rng),
            1 => random_subset_of(&f25, 2, &mut rng),
            _ => random_subset_of(&f49, 3, &mut rng),
        };
        let counts = count_4aps(&set).unwrap();
        assert_eq!(
            counts.ordered_nontrivial,
            oracle_4ap_ordered(&set),
            "4-AP mismatch on {:?}",
            set.members()
        );
        // the unordered convention divides by the parametrization orbit,
        // which the collector re-derives by explicit dedup
        let sets = aplab_core::progressions::collect_4ap_sets(&set, 1 << 22).unwrap();
        assert_eq!(counts.unordered_nontrivial, sets.len() as u64);
    }
}

#[test]
fn ordered_unordered_ratios() {
    let mut rng = SeqRng::new(5, domain::TRIAL);
    // integers: 2 traversals
    let interval = GroundSet::full(Ambient::Interval { n: 50 });
    for _ in 0..50 {
        let s = random_subset_of(&interval, 2, &mut rng);
        let c = count_3aps(&s).unwrap();
        assert_eq!(c.ordered_nontrivial, 2 * c.unordered_nontrivial);
        let c4 = count_4aps(&s).unwrap();
        assert_eq!(c4.ordered_nontrivial, 2 * c4.unordered_nontrivial);
    }
    // characteristic 3: a line has 6 parametrizations
    let f27 = GroundSet::full(Ambient::Field(FieldSpace::make(3, 3).unwrap()));
    for _ in 0..50 {
        let s = random_subset_of(&f27, 2, &mut rng);
        let c = count_3aps(&s).unwrap();
        assert_eq!(c.ordered_nontrivial, 6 * c.unordered_nontrivial);
    }
    // characteristic >= 5: 2 traversals for 3-APs, 4 orbits for 4-APs at p = 5
    let f25 = GroundSet::full(Ambient::Field(FieldSpace::make(5, 2).unwrap()));
    for _ in 0..50 {
        let s = random_subset_of(&f25, 2, &mut rng);
        let c = count_3aps(&s).unwrap();
        assert_eq!(c.ordered_nontrivial, 2 * c.unordered_nontrivial);
        let c4 = count_4aps(&s).unwrap();
        assert_eq!(c4.ordered_nontrivial, 4 * c4.unordered_nontrivial);
    }
}

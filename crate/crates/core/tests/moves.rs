mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_graph::moves::{evaluation_cost, fuzz_with_limits, invariance_holds, FuzzLimits};
use twisted_graph::*;

fn r(d: &Diagram) -> Poly {
    r_poly(d, &EvalOptions::default()).unwrap()
}

fn all_kinds() -> Vec<MoveKind> {
    MoveKind::SAFE
        .iter()
        .copied()
        .chain([MoveKind::VirtualTwist])
        .collect()
}

/// A deterministic sample of at most `n` sites.
fn sample(sites: Vec<MoveSite>, n: usize, seed: u64) -> Vec<MoveSite> {
    if sites.len() <= n {
        return sites;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| sites[rng.gen_range(0..sites.len())].clone())
        .collect()
}

#[test]
fn moves_keep_diagrams_valid() {
    for name in CORPUS {
        let d = corpus(name);
        for kind in all_kinds() {
            for site in sample(find_sites(&d, kind), 12, 1) {
                let e = apply_move(&d, &site).unwrap();
                assert!(e.is_valid(), "{name}: {site}: {:?}", e.validate());
            }
        }
    }
}

#[test]
fn every_move_has_an_inverse_site() {
    for name in CORPUS {
        let d = corpus(name);
        for kind in all_kinds() {
            for site in sample(find_sites(&d, kind), 6, 2) {
                let e = apply_move(&d, &site).unwrap();
                let undone = find_sites(&e, kind.inverse())
                    .into_iter()
                    .any(|s| apply_move(&e, &s).unwrap().is_isomorphic(&d));
                assert!(undone, "{name}: no inverse for {site}");
            }
        }
    }
}

#[test]
fn single_moves_preserve_r() {
    for name in CORPUS {
        let d = corpus(name);
        if evaluation_cost(&d) > 20_000.0 {
            continue;
        }
        let before = r(&d);
        for kind in MoveKind::SAFE {
            for site in sample(find_sites(&d, kind), 4, 3) {
                let after = r(&apply_move(&d, &site).unwrap());
                if kind.changes_r_by_unit() {
                    assert!(after.equal_up_to_unit(&before, false), "{name}: {site}");
                } else {
                    assert_eq!(after, before, "{name}: {site}");
                }
            }
        }
    }
}

#[test]
fn virtual_twist_is_not_an_invariance() {
    let d = corpus("theta_klein");
    let before = r(&d);
    let changed = find_sites(&d, MoveKind::VirtualTwist)
        .iter()
        .any(|s| !r(&apply_move(&d, s).unwrap()).equal_up_to_unit(&before, true));
    assert!(changed);
}

#[test]
fn random_classical_walks_reach_r3_sites() {
    let d = corpus("loop");
    let limits = FuzzLimits {
        max_cost: 50_000.0,
        max_nodes: 8,
    };
    let kinds = MoveKind::parse_set("R1,R2", false).unwrap();
    let mut checked = 0;
    for seed in 0..40 {
        let (e, _) = fuzz_with_limits(&d, 6, seed, &kinds, limits);
        for site in find_sites(&e, MoveKind::R3).into_iter().take(2) {
            let f = apply_move(&e, &site).unwrap();
            assert!(f.is_valid());
            assert!(r(&f).equal_up_to_unit(&r(&d), false));
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn t_moves_on_handcuff() {
    let d = corpus("hc4");
    assert_eq!(find_sites(&d, MoveKind::T4).len(), 5);
    let d = corpus("theta_klein");
    for site in find_sites(&d, MoveKind::T4) {
        assert_eq!(r(&apply_move(&d, &site).unwrap()), r(&d));
    }
}

#[test]
fn random_walks_preserve_r() {
    for (i, name) in [
        "loop",
        "loopbar",
        "doubleloop",
        "theta_klein",
        "theta_v",
        "trefoil",
        "circle",
    ]
    .iter()
    .enumerate()
    {
        let d = corpus(name);
        let before = r(&d);
        for seed in 0..4u64 {
            let limits = FuzzLimits {
                max_cost: evaluation_cost(&d).max(3000.0),
                max_nodes: d.nodes().len() + 8,
            };
            let (e, log) = fuzz_with_limits(&d, 25, seed * 31 + i as u64, &MoveKind::SAFE, limits);
            assert!(e.is_valid());
            assert!(
                invariance_holds(&before, &r(&e), &log),
                "{name} seed {seed}\n{}",
                log.to_json_lines()
            );
        }
    }
}

#[test]
fn moves_on_walked_diagrams_preserve_r_and_invert() {
    for name in ["loop", "loopbar", "theta_klein", "trefoil", "doubleloop"] {
        let d0 = corpus(name);
        for seed in 0..3u64 {
            let limits = FuzzLimits {
                max_cost: 20_000.0,
                max_nodes: d0.nodes().len() + 6,
            };
            let (d, _) = fuzz_with_limits(&d0, 8, seed, &MoveKind::SAFE, limits);
            let before = r(&d);
            for kind in MoveKind::SAFE {
                for site in sample(find_sites(&d, kind), 3, seed) {
                    let e = apply_move(&d, &site).unwrap();
                    if evaluation_cost(&e) > 100_000.0 {
                        continue;
                    }
                    let after = r(&e);
                    if kind.changes_r_by_unit() {
                        assert!(
                            after.equal_up_to_unit(&before, false),
                            "{name}/{seed}: {site}"
                        );
                    } else {
                        assert_eq!(after, before, "{name}/{seed}: {site}");
                    }
                    let undone = find_sites(&e, kind.inverse())
                        .into_iter()
                        .any(|s| apply_move(&e, &s).unwrap().is_isomorphic(&d));
                    assert!(undone, "{name}/{seed}: no inverse for {site}");
                }
            }
        }
    }
}

mod common;

use common::*;
use twisted_graph::invariant::oracle::yamada_oracle;
use twisted_graph::poly::Mono;
use twisted_graph::states::Spin;
use twisted_graph::*;

fn r(d: &Diagram) -> Poly {
    r_poly(d, &EvalOptions::default()).unwrap()
}

#[test]
fn every_fixture_parses_and_round_trips() {
    for name in CORPUS {
        let d = corpus(name);
        let text = d.serialize();
        let again = Diagram::parse(&text).unwrap();
        assert!(again.is_isomorphic(&d), "{name}");
        assert_eq!(again.serialize(), text, "{name}");
    }
}

#[test]
fn drawn_fixtures_are_planar() {
    for name in [
        "loop",
        "loopbar",
        "doubleloop",
        "twoloop",
        "theta_klein",
        "theta_v",
        "trefoil",
        "hopf",
        "hc2",
        "hc4",
    ] {
        assert_eq!(drawing_genus(&corpus(name)), 0, "{name}");
    }
}

#[test]
fn handcuff_counts() {
    let s = corpus("hc2").stats();
    assert_eq!((s.num_vertices, s.num_classical, s.num_virtual), (2, 2, 2));
    let s = corpus("hc4").stats();
    assert_eq!((s.num_vertices, s.num_classical, s.num_virtual), (5, 4, 4));
}

#[test]
fn small_examples() {
    let sigma = Poly::sigma();
    assert_eq!(r(&corpus("dot")), c(-1));
    assert_eq!(r(&corpus("loop")), sigma);
    assert_eq!(r(&corpus("circle")), sigma);
    let barred = c(-1) + (sigma.clone() + c(1)) * zw();
    assert_eq!(r(&corpus("loopbar")), barred);
    assert_eq!(r(&corpus("circlebar")), barred);
    let dl = c(-1) - c(2) * y() - y().pow(2) * Poly::z().pow(2);
    assert_eq!(r(&corpus("doubleloop")), dl.subst_y());
    let tl = -(c(-1) - y()).pow(2);
    assert_eq!(r(&corpus("twoloop")), tl.subst_y());
}

#[test]
fn thetas() {
    let klein = r(&corpus("theta_klein"));
    let v = r(&corpus("theta_v"));
    let m1y = c(-1) - y();
    assert_eq!(klein, (m1y.clone() - m1y.pow(2)).subst_y());
    assert_eq!(
        v,
        (c(-2) - c(3) * y() - y().pow(2) * Poly::z().pow(2)).subst_y()
    );
    assert_eq!(klein.at_z1_w1(), v.at_z1_w1());
    assert_ne!(klein, v);
}

#[test]
fn hc2_matches_printed_coefficients() {
    let d = corpus("hc2");
    let got = r(&d);
    let want = hc2_expected();
    assert!(got.equal_up_to_unit(&want, true), "got {got}\nwant {want}");
    assert_eq!(vcr_bound_of(&got), 2);
}

#[test]
fn hc4_zero_state() {
    let d = corpus("hc4");
    let zero = enumerate_states(&d)
        .find(|s| s.assignment.values().all(|x| *x == Spin::Zero))
        .unwrap();
    let pure = resolve(&d, &zero).unwrap();
    assert_eq!(pure.stats().num_vertices, 9);
    let (g, _) = to_ribbon(&pure).unwrap();
    let s = g.surface_stats();
    assert_eq!((s.k, s.n, s.b), (1, 8, 1));
    let rr = r(&d);
    assert_eq!(vcr_bound_of(&rr), 4);
    assert_ne!(rr.coeff(Mono::new(0, 0, 8, 0)), 0.into());
}

#[test]
fn classical_fixtures_match_yamada() {
    for name in [
        "dot",
        "circle",
        "loop",
        "twoloop",
        "theta_klein",
        "trefoil",
        "hopf",
    ] {
        let d = corpus(name);
        assert_eq!(
            yamada_specialization(&d, &EvalOptions::default()).unwrap(),
            yamada_oracle(&d).unwrap(),
            "{name}"
        );
        assert_eq!(r(&d).z_degree(), Some(0), "{name}");
    }
}

#[test]
fn hc2_smoothing_convention_reproduces_the_printed_form_exactly() {
    assert_eq!(r(&corpus("hc2")), hc2_expected());
}

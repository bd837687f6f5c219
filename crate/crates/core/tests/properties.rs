use std::collections::BTreeSet;

use ferrers_toric::diagram::{enumerate_box, essential_reduce, parse_diagram, Diagram, Flavor, Point};
use ferrers_toric::engine::{Engine, SuffixState};
use ferrers_toric::minors::{classify_point, leading_pair_graph, suffix_set, two_minors, PointClass};
use ferrers_toric::oracle::facets;
use ferrers_toric::EngineConfig;
use proptest::prelude::*;

fn p(i: u32, j: u32, k: u32) -> Point {
    Point::new(i, j, k)
}

fn box3() -> Vec<Diagram> {
    enumerate_box(3, 3, 3)
}

fn engine() -> Engine<u64> {
    Engine::new(EngineConfig::default())
}

fn diagram_in(side: u32) -> impl Strategy<Value = Diagram> {
    prop::collection::vec((1..=side, 1..=side, 1..=side), 1..=4).prop_map(|gens| {
        let gens: Vec<Point> = gens.into_iter().map(|(i, j, k)| p(i, j, k)).collect();
        Diagram::from_generators(&gens).unwrap()
    })
}

/// The projection property through arbitrary pairs of points of the
/// next layer.
fn projection_by_pairs(d: &Diagram) -> bool {
    (1..d.num_layers()).all(|i| {
        let next = d.layer_points(i + 1);
        next.iter()
            .all(|x| next.iter().all(|y| d.contains(p(i, x.j, y.k))))
    })
}

/// Zones `Z1` and `Z6` of every point of a layer miss the layers above.
fn strong_by_zones(d: &Diagram) -> bool {
    (1..d.num_layers()).all(|i| {
        d.layer_points(i).into_iter().all(|u| {
            let z = d.zones(u).unwrap();
            z.from_layer(1, i + 1).next().is_none() && z.from_layer(6, i + 1).next().is_none()
        })
    })
}

/// The next layer fits under `β(u)` and `γ(u)` for every point of a layer.
fn strong_by_extent(d: &Diagram) -> bool {
    (1..d.num_layers()).all(|i| {
        d.layer_points(i).into_iter().all(|u| {
            let (_, beta, gamma) = d.alpha_beta_gamma(u).unwrap();
            d.row_len(i + 1) <= beta && d.height(i + 1, 1) <= gamma
        })
    })
}

fn check_zones(d: &Diagram) {
    for u in d.points() {
        let z = d.zones(u).unwrap();
        let mut seen = BTreeSet::new();
        for n in 1..=6 {
            for &q in z.zone(n) {
                assert!(seen.insert(q), "{d:?} {u}: {q} in two zones");
            }
        }
        let expected: BTreeSet<Point> = d.points_from_layer(u.i).into_iter().collect();
        assert_eq!(seen, expected, "{d:?} {u}");
    }
}

fn slice_deletions(d: &Diagram) -> Vec<Diagram> {
    let pts = d.points();
    let (a, b, c) = (d.num_layers(), d.row_len(1), d.height(1, 1));
    let mut out = Vec::new();
    for (axis, n) in [(0, a), (1, b), (2, c)] {
        for t in 1..=n {
            let rest: Vec<Point> = pts.iter().copied().filter(|q| q.coord(axis) != t).collect();
            if !rest.is_empty() {
                out.push(essential_reduce(&rest).unwrap().diagram);
            }
        }
    }
    out
}

#[test]
fn zones_partition_the_upper_layers() {
    for d in box3() {
        check_zones(&d);
    }
}

#[test]
fn definitions_agree_on_the_3_box() {
    for d in box3() {
        let pp = d.has_projection_property();
        let strong = d.has_strong_projection_property();
        assert_eq!(pp, projection_by_pairs(&d), "{d:?}");
        assert_eq!(strong, strong_by_zones(&d), "{d:?}");
        assert_eq!(strong, strong_by_extent(&d), "{d:?}");
        assert!(!strong || pp, "{d:?}");
    }
}

#[test]
fn strong_property_survives_slice_deletion() {
    for d in box3().into_iter().filter(Diagram::has_strong_projection_property) {
        for t in slice_deletions(&d) {
            assert!(t.has_strong_projection_property(), "{d:?} -> {t:?}");
        }
    }
}

#[test]
fn orders_are_quasi_lexicographic() {
    for d in box3() {
        assert!(d.induction_order().is_quasi_lexicographic(&d), "{d:?}");
        assert!(d.lex_order().is_quasi_lexicographic(&d), "{d:?}");
    }
}

#[test]
fn first_stage_points_have_z6_in_the_first_layer() {
    for d in box3().into_iter().filter(Diagram::has_projection_property) {
        let ord = d.induction_order();
        for &u in &ord.points[..ord.first_stage] {
            let z = d.zones(u).unwrap();
            assert!(z.zone(6).iter().all(|q| q.i == 1), "{d:?} {u}");
        }
    }
}

#[test]
fn restriction_property_and_phantom_criterion() {
    for d in box3().into_iter().filter(Diagram::has_projection_property) {
        let whole = leading_pair_graph(&d.points());
        for flavor in [Flavor::Induction, Flavor::Lex] {
            let order = d.order(flavor);
            for &u in &order.points {
                let a = suffix_set(&d, &order, u).unwrap();
                let keep: BTreeSet<Point> = a.iter().copied().collect();
                let restricted = whole.induced(&keep);
                assert_eq!(leading_pair_graph(&a).edges(), restricted.edges(), "{d:?} {u} {flavor:?}");
                let isolated = restricted.is_isolated(u);
                let class = classify_point(&d, &order, u).unwrap();
                assert_eq!(class == PointClass::Phantom, isolated, "{d:?} {u} {flavor:?}");
            }
        }
    }
}

#[test]
fn leading_pairs_are_two_subsets() {
    for d in box3() {
        for (a, b) in leading_pair_graph(&d.points()).edges() {
            assert!(a < b, "{d:?}");
        }
    }
}

#[test]
fn phantom_points_are_cone_points() {
    for d in box3().into_iter().filter(|d| d.has_projection_property() && d.len() <= 20) {
        let order = d.induction_order();
        for &u in &order.points {
            if classify_point(&d, &order, u).unwrap() != PointClass::Phantom {
                continue;
            }
            let a = suffix_set(&d, &order, u).unwrap();
            let plus: Vec<Point> = a.iter().copied().filter(|&q| q != u).collect();
            let before = facets(&leading_pair_graph(&a), 32).unwrap().facets;
            let after = facets(&leading_pair_graph(&plus), 32).unwrap().facets;
            let mut stripped: Vec<Vec<Point>> = before
                .iter()
                .map(|f| {
                    assert!(f.contains(&u), "{d:?} {u}: facet without the cone point");
                    f.iter().copied().filter(|&q| q != u).collect()
                })
                .collect();
            stripped.sort();
            let mut after = after;
            after.sort();
            assert_eq!(stripped, after, "{d:?} {u}");
        }
    }
}

#[test]
fn invariants_grow_when_normal_points_are_added_back() {
    let e = engine();
    for d in box3().into_iter().filter(Diagram::has_projection_property) {
        let order = d.induction_order();
        for &u in &order.points {
            if classify_point(&d, &order, u).unwrap() != PointClass::Normal {
                continue;
            }
            let s = SuffixState::new(d.clone(), Flavor::Induction, Some(u)).unwrap();
            let here = e.suffix_invariants(&s).unwrap();
            let next = e.suffix_invariants(&s.successor().0).unwrap();
            assert!(next.reg <= here.reg && next.mult <= here.mult, "{d:?} {u}");
        }
    }
}

#[test]
fn axis_permutations_preserve_invariants() {
    let e = engine();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for d in box3().into_iter().filter(Diagram::has_projection_property) {
        let r = e.invariants(&d).unwrap();
        for perm in perms {
            let img = d.permute_axes(perm);
            if !img.has_projection_property() {
                continue;
            }
            let s = e.invariants(&img).unwrap();
            assert_eq!((r.ring_dim, r.reg, r.mult), (s.ring_dim, s.reg, s.mult), "{d:?} {perm:?}");
        }
    }
}

#[test]
fn nested_strong_pairs_are_monotone() {
    let e = engine();
    let strong: Vec<(Diagram, u32, u64)> = box3()
        .into_iter()
        .filter(Diagram::has_strong_projection_property)
        .map(|d| {
            let r = e.invariants(&d).unwrap();
            (d, r.reg, r.mult)
        })
        .collect();
    let mut pairs = 0;
    for (d1, r1, e1) in &strong {
        for (d2, r2, e2) in &strong {
            if d1 != d2 && d1.is_subset_of(d2) {
                pairs += 1;
                assert!(r1 <= r2 && e1 <= e2, "{d1:?} {d2:?}");
            }
        }
    }
    assert_eq!(pairs, 19352);
}

#[test]
fn state_keys_survive_json() {
    let d = Diagram::from_generators(&[p(1, 3, 2), p(2, 2, 3)]).unwrap();
    for flavor in [Flavor::Induction, Flavor::Lex] {
        for u in d.layer_points(1) {
            let s = SuffixState::new(d.clone(), flavor, Some(u)).unwrap();
            let back: SuffixState = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
            assert_eq!(back.canonical_key(), s.canonical_key());
        }
    }
}

fn unordered_minors(points: &[Point], f: impl Fn(Point) -> Point) -> BTreeSet<[(Point, Point); 2]> {
    two_minors(points)
        .into_iter()
        .map(|m| {
            let pair = |(a, b): (Point, Point)| {
                let (a, b) = (f(a), f(b));
                if a < b { (a, b) } else { (b, a) }
            };
            let mut both = [pair(m.lead), pair(m.trail)];
            both.sort();
            both
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn flip_is_an_involution(d in diagram_in(5)) {
        prop_assert_eq!(d.flip().flip(), d.clone());
        let (a, b, c) = d.essential_dims();
        prop_assert_eq!(d.flip().essential_dims(), (a, c, b));
        let flipped: BTreeSet<Point> = d.points().into_iter().map(Point::flip).collect();
        prop_assert_eq!(flipped, d.flip().points().into_iter().collect::<BTreeSet<_>>());
    }

    #[test]
    fn minors_commute_with_the_flip(d in diagram_in(4)) {
        let there = unordered_minors(&d.flip().points(), |q| q);
        let here = unordered_minors(&d.points(), Point::flip);
        prop_assert_eq!(here, there);
    }

    #[test]
    fn zones_partition_random_diagrams(d in diagram_in(5)) {
        check_zones(&d);
    }

    #[test]
    fn property_definitions_agree(d in diagram_in(5)) {
        prop_assert_eq!(d.has_projection_property(), projection_by_pairs(&d));
        prop_assert_eq!(d.has_strong_projection_property(), strong_by_zones(&d));
        prop_assert_eq!(d.has_strong_projection_property(), strong_by_extent(&d));
        prop_assert!(!d.has_strong_projection_property() || d.has_projection_property());
    }

    #[test]
    fn truncation_keeps_the_strong_property(d in diagram_in(5)) {
        prop_assume!(d.has_strong_projection_property());
        for t in slice_deletions(&d) {
            prop_assert!(t.has_strong_projection_property(), "{:?} -> {:?}", d, t);
        }
    }

    #[test]
    fn induction_order_is_quasi_lexicographic(d in diagram_in(6)) {
        prop_assert!(d.induction_order().is_quasi_lexicographic(&d));
    }

    #[test]
    fn json_round_trip(d in diagram_in(6)) {
        let text = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(parse_diagram(&text).unwrap(), d.clone());
        let gens: Vec<[u32; 3]> = d.points().iter().map(|q| [q.i, q.j, q.k]).collect();
        let alt = serde_json::json!({ "generators": gens }).to_string();
        prop_assert_eq!(parse_diagram(&alt).unwrap(), d);
    }

    #[test]
    fn reduction_of_an_essential_diagram_is_the_identity(d in diagram_in(5)) {
        let r = essential_reduce(&d.points()).unwrap();
        prop_assert_eq!(&r.diagram, &d);
        for q in d.points() {
            prop_assert_eq!(r.map(q), Some(q));
        }
    }
}

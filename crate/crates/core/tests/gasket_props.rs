use proptest::prelude::*;

use sierpile::gasket::{apply_word, distance_from, rotate_coord};
use sierpile::{build_gasket, corner_distance, nearest_vertex, Error, Point, TriCoord};

#[test]
fn counts_and_degrees() {
    for n in 0..=8 {
        let g = build_gasket(n).unwrap();
        assert_eq!(g.vertex_count(), (3usize.pow(n + 1) + 3) / 2);
        assert_eq!(g.edge_count(), 3usize.pow(n + 1));
        for v in 0..g.vertex_count() {
            let expected = if g.is_corner(v) { 2 } else { 4 };
            assert_eq!(g.degree(v), expected, "n={n} v={v}");
        }
    }
}

#[test]
fn max_corner_distance_is_half_the_side() {
    for n in 1..=8 {
        let g = build_gasket(n).unwrap();
        let d = corner_distance(&g);
        assert_eq!(*d.iter().max().unwrap(), 1 << (n - 1));
        for p in g.cutpoints().unwrap() {
            assert_eq!(d[p], 1 << (n - 1));
        }
    }
}

#[test]
fn cap_is_enforced() {
    assert!(matches!(sierpile::gasket::build_gasket_with_cap(5, 4), Err(Error::LevelTooLarge { level: 5, cap: 4 })));
}

#[test]
fn json_dump_round_trips() {
    let g = build_gasket(2).unwrap();
    let dump = g.to_dump();
    let text = serde_json::to_string(&dump).unwrap();
    let back: sierpile::gasket::GraphDump = serde_json::from_str(&text).unwrap();
    assert_eq!(back, dump);
    assert_eq!(back.vertices.len(), 15);
    assert_eq!(back.edges.len(), 27);
    assert_eq!(build_gasket(0).unwrap().to_dump().cutpoints, Vec::<usize>::new());
}

#[test]
fn points_outside_are_rejected() {
    let g = build_gasket(3).unwrap();
    assert!(nearest_vertex(&g, Point::new(-0.2, 0.0)).is_err());
    assert!(nearest_vertex(&g, Point::new(0.5, 0.9)).is_err());
}

fn level_and_index() -> impl Strategy<Value = (u32, usize)> {
    (1u32..=6).prop_flat_map(|n| (Just(n), 0..(3usize.pow(n + 1) + 3) / 2))
}

proptest! {
    #[test]
    fn rotation_is_a_graph_automorphism((n, v) in level_and_index()) {
        let g = build_gasket(n).unwrap();
        let r = g.rotate_vertex(v, 1);
        prop_assert_eq!(g.rotate_vertex(g.rotate_vertex(r, 1), 1), v);
        prop_assert_eq!(g.rotate_vertex(r, -1), v);
        let mut a: Vec<usize> = g.neighbors(v).map(|w| g.rotate_vertex(w, 1)).collect();
        let mut b: Vec<usize> = g.neighbors(r).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        let d = corner_distance(&g);
        prop_assert_eq!(d[v], d[r]);
        prop_assert_eq!(g.coord(r), rotate_coord(g.coord(v), g.side(), 1));
    }

    #[test]
    fn distances_are_lipschitz((n, v) in level_and_index()) {
        let g = build_gasket(n).unwrap();
        let d = distance_from(&g, v);
        prop_assert_eq!(d[v], 0);
        for (x, y) in g.edges() {
            prop_assert!(d[x].abs_diff(d[y]) <= 1);
        }
    }

    #[test]
    fn nearest_vertex_of_a_vertex_is_itself((n, v) in level_and_index()) {
        let g = build_gasket(n).unwrap();
        prop_assert_eq!(nearest_vertex(&g, g.coord(v).to_point(n)).unwrap(), v);
    }

    #[test]
    fn words_land_on_vertices(word in proptest::collection::vec(1u8..=3, 0..5), (n, v) in level_and_index()) {
        let big = build_gasket(n + word.len() as u32).unwrap();
        let g = build_gasket(n).unwrap();
        let c = apply_word(g.coord(v), n, &word);
        prop_assert!(big.index_of(c).is_some());
        prop_assert!(c.a + c.b <= big.side());
        prop_assert_eq!(apply_word(TriCoord::new(0, 0), 0, &[]), TriCoord::new(0, 0));
    }
}

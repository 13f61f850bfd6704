use proptest::prelude::*;

use sierpile::sandpile::{
    conservation_holds, group_add, identity_creutz, identity_recursive, is_recurrent, laplacian_apply,
    random_recurrent, stabilize, stabilize_with, LaplacianKind, Scheduler,
};
use sierpile::{build_gasket, corner_distance, SandpileConfig};

#[test]
fn identity_entries_and_recurrence() {
    for n in 2..=7 {
        let g = build_gasket(n).unwrap();
        let id = identity_recursive(&g).unwrap();
        assert!(id.chips.iter().all(|&c| c == 2 || c == 3), "n={n}");
        assert!(is_recurrent(&g, &id).unwrap());
        assert_eq!(group_add(&g, &id, &id).unwrap(), id);
    }
    assert!(identity_recursive(&build_gasket(1).unwrap()).is_err());
}

#[test]
fn identity_is_rotation_invariant() {
    for n in 2..=6 {
        let g = build_gasket(n).unwrap();
        let id = identity_creutz(&g);
        for v in 0..g.vertex_count() {
            assert_eq!(id.chips[v], id.chips[g.rotate_vertex(v, 1)]);
        }
    }
}

#[test]
fn identity_is_the_laplacian_of_the_decomposition() {
    // Δ(-d/3 + 8h/3) = id reduces to Δd = 8 - 3 id on non-corners
    for n in 2..=7 {
        let g = build_gasket(n).unwrap();
        let id = identity_recursive(&g).unwrap();
        let d: Vec<i64> = corner_distance(&g).into_iter().map(i64::from).collect();
        let lap = laplacian_apply(&g, &d, LaplacianKind::Effective).unwrap();
        for v in (0..g.vertex_count()).filter(|&v| !g.is_corner(v)) {
            assert_eq!(lap[v], 8 - 3 * id.chips[v] as i64, "n={n} v={v}");
        }
    }
}

#[test]
fn json_and_rle_round_trip() {
    let g = build_gasket(3).unwrap();
    let id = identity_recursive(&g).unwrap();
    let json = serde_json::to_string(&id).unwrap();
    assert!(json.starts_with("{\"level\":3,\"chips\":["));
    assert_eq!(serde_json::from_str::<SandpileConfig>(&json).unwrap(), id);
    let rle = id.to_rle();
    assert!(rle.starts_with("L3\n"));
    assert_eq!(SandpileConfig::from_rle(&rle).unwrap(), id);
    assert!(SandpileConfig::from_rle("L3\n2*x").is_err());
}

#[test]
fn zero_is_not_recurrent_and_max_is() {
    for n in 0..=5 {
        let g = build_gasket(n).unwrap();
        assert!(!is_recurrent(&g, &SandpileConfig::zeros(&g)).unwrap());
        assert!(is_recurrent(&g, &SandpileConfig::max_stable(&g)).unwrap());
    }
}

fn small_config() -> impl Strategy<Value = (u32, Vec<u64>)> {
    (0u32..=3).prop_flat_map(|n| (Just(n), proptest::collection::vec(0u64..=15, (3usize.pow(n + 1) + 3) / 2)))
}

proptest! {
    #[test]
    fn schedules_agree((n, chips) in small_config(), seed in any::<u64>()) {
        let g = build_gasket(n).unwrap();
        let c = SandpileConfig::from_chips(&g, chips).unwrap();
        let (a, oa) = stabilize_with(&g, &c, Scheduler::Fifo).unwrap();
        let (b, ob) = stabilize_with(&g, &c, Scheduler::Random { seed }).unwrap();
        prop_assert!(a.is_stable());
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&oa, &ob);
        prop_assert!(conservation_holds(&g, &c, &a, &oa));
    }

    #[test]
    fn addition_is_commutative_and_associative(n in 1u32..=3, s in any::<u64>()) {
        let g = build_gasket(n).unwrap();
        let (a, b, c) = (random_recurrent(&g, s), random_recurrent(&g, s ^ 1), random_recurrent(&g, s ^ 2));
        prop_assert_eq!(group_add(&g, &a, &b).unwrap(), group_add(&g, &b, &a).unwrap());
        let left = group_add(&g, &group_add(&g, &a, &b).unwrap(), &c).unwrap();
        let right = group_add(&g, &a, &group_add(&g, &b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn random_recurrent_is_recurrent(n in 0u32..=4, s in any::<u64>()) {
        let g = build_gasket(n).unwrap();
        let r = random_recurrent(&g, s);
        prop_assert!(is_recurrent(&g, &r).unwrap());
        prop_assert_eq!(stabilize(&g, &r).unwrap().0, r);
    }
}

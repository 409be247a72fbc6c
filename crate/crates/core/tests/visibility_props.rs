mod common;

use common::{
    check_grazing_perturbations, example_field, id, perturbations, visible_oracle, GRAZING_CASES,
};
use gridfloyd::visibility::{segment_touches_cell, visible_by_scan};
use gridfloyd::{build_weight_matrix, visible, CellId, Field};
use proptest::prelude::*;

fn field_strategy(max_side: usize, max_density: f64) -> impl Strategy<Value = Field> {
    (1..=max_side, 1..=max_side, 0.0..=max_density, any::<u64>()).prop_map(
        |(w, h, density, seed)| {
            let k = (density * (w * h) as f64).round() as usize;
            gridfloyd::random_field(w, h, k, &[], seed).unwrap()
        },
    )
}

fn all_pairs(f: &Field) -> impl Iterator<Item = (CellId, CellId)> + '_ {
    f.cells().flat_map(move |a| f.cells().map(move |b| (a, b)))
}

proptest! {
    #![proptest_config(common::proptest_config(128))]

    #[test]
    fn visibility_matches_clipping_oracle(field in field_strategy(8, 0.5)) {
        for (a, b) in all_pairs(&field) {
            let expected = visible_oracle(&field, a, b)
                && !(a != b && (field.is_obstacle(a).unwrap() || field.is_obstacle(b).unwrap()));
            prop_assert_eq!(visible(&field, a, b).unwrap(), expected, "{} {}", a, b);
        }
    }

    #[test]
    fn strip_walk_matches_obstacle_scan(field in field_strategy(16, 0.4)) {
        for (a, b) in all_pairs(&field) {
            prop_assert_eq!(visible(&field, a, b).unwrap(), visible_by_scan(&field, a, b).unwrap());
        }
    }

    #[test]
    fn visibility_is_symmetric(field in field_strategy(10, 0.4)) {
        for (a, b) in all_pairs(&field) {
            prop_assert_eq!(visible(&field, a, b).unwrap(), visible(&field, b, a).unwrap());
        }
    }

    #[test]
    fn adding_an_obstacle_never_reveals_a_pair(
        field in field_strategy(8, 0.3),
        extra in any::<prop::sample::Index>(),
    ) {
        let cell = CellId::from_index(extra.index(field.cell_count()));
        let more = Field::new(field.width(), field.height(), field.obstacles().chain([cell])).unwrap();
        for (a, b) in all_pairs(&field) {
            if visible(&more, a, b).unwrap() {
                prop_assert!(visible(&field, a, b).unwrap());
            }
        }
    }

    #[test]
    fn weight_matrix_is_consistent_with_visibility(field in field_strategy(8, 0.4)) {
        let w = build_weight_matrix(&field).unwrap();
        for (a, b) in all_pairs(&field) {
            let weight = w.weight(a, b);
            prop_assert_eq!(weight, w.weight(b, a));
            if visible(&field, a, b).unwrap() {
                let d = field.cell_center(a).unwrap().distance(field.cell_center(b).unwrap());
                prop_assert!((weight - d).abs() <= 1e-12);
            } else {
                prop_assert!(weight.is_infinite());
            }
        }
    }

    #[test]
    fn touch_predicate_matches_clipping(
        w in 1usize..7, h in 1usize..7,
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        c in any::<prop::sample::Index>(),
    ) {
        let f = Field::empty(w, h).unwrap();
        let n = f.cell_count();
        let (a, b, c) = (
            CellId::from_index(a.index(n)),
            CellId::from_index(b.index(n)),
            CellId::from_index(c.index(n)),
        );
        let touches = segment_touches_cell(
            f.row_col(a).unwrap(),
            f.row_col(b).unwrap(),
            f.row_col(c).unwrap(),
        );
        prop_assert_eq!(touches, common::clip_oracle(&f, a, b, c));
    }
}

#[test]
fn grazing_cases_on_example_field() {
    let field = example_field();
    for (a, b, expected) in GRAZING_CASES {
        assert_eq!(
            visible(&field, id(a), id(b)).unwrap(),
            expected,
            "{a} <-> {b}"
        );
        assert_eq!(
            visible(&field, id(b), id(a)).unwrap(),
            expected,
            "{b} <-> {a}"
        );
        assert_eq!(
            visible_oracle(&field, id(a), id(b)),
            expected,
            "oracle {a} <-> {b}"
        );
    }
}

#[test]
fn one_cell_obstacle_moves_follow_the_oracle() {
    let flips = check_grazing_perturbations().unwrap();
    assert!(flips > 0, "no perturbation changed any grazing pair");
}

#[test]
fn moving_the_blocker_off_the_diagonal_opens_it() {
    // 9 <-> 14 is blocked only by the corner of cell 10
    let field = example_field();
    let moved: Vec<Field> = perturbations(&field, &[id(9), id(14)])
        .into_iter()
        .filter(|f| !f.is_obstacle(id(10)).unwrap())
        .collect();
    assert!(!moved.is_empty());
    assert!(moved.iter().all(|f| visible(f, id(9), id(14)).unwrap()));
}

#[test]
fn corner_contact_blocks_the_diagonal() {
    let f = gridfloyd::parse_field("..\n#.").unwrap();
    assert!(!visible(&f, id(1), id(4)).unwrap());
    assert!(visible(&f, id(1), id(2)).unwrap());
    assert!(!visible(&f, id(3), id(2)).unwrap());
}

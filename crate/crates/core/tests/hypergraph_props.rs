mod common;

use common::{random_assignment, random_hypergraph, random_matching};
use embcoarse::hypergraph::{
    parse_hmetis, parse_matrix_market, write_hmetis, write_matrix_market, MatrixOrientation,
};
use embcoarse::partition::{weighted_connectivity, weighted_cut};
use embcoarse::refinement::project;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bisection_cut_equals_connectivity(seed: u64, n in 2usize..40, m in 0usize..60) {
        let h = random_hypergraph(seed, n, m, 6, 4);
        let p = random_assignment(&h, 2, seed ^ 1);
        prop_assert_eq!(weighted_cut(&h, &p), weighted_connectivity(&h, &p));
    }

    #[test]
    fn contraction_preserves_projected_objectives(
        seed: u64, n in 2usize..40, m in 0usize..60, k in 2usize..6,
    ) {
        let h = random_hypergraph(seed, n, m, 6, 4);
        let (coarse, map) = h.contract(&random_matching(n, seed ^ 2)).unwrap();
        let pc = random_assignment(&coarse, k, seed ^ 3);
        let pf = project(&pc, &map, &h);
        prop_assert_eq!(weighted_cut(&coarse, &pc), weighted_cut(&h, &pf));
        prop_assert_eq!(weighted_connectivity(&coarse, &pc), weighted_connectivity(&h, &pf));
        prop_assert_eq!(coarse.total_node_weight(), h.total_node_weight());
        prop_assert_eq!(pc.part_weights(), pf.part_weights());
    }

    #[test]
    fn star_expansion_counts(seed: u64, n in 1usize..40, m in 0usize..60) {
        let h = random_hypergraph(seed, n.max(2), m, 6, 1);
        let g = h.star_expand();
        prop_assert_eq!(g.left_count(), h.num_nodes());
        prop_assert_eq!(g.right_count(), h.num_edges());
        prop_assert_eq!(g.num_vertices(), h.num_nodes() + h.num_edges());
        prop_assert_eq!(g.num_edges(), h.num_pins());
        for e in 0..h.num_edges() {
            for &v in h.pins(e) {
                prop_assert!(g.adjacent(v, h.num_nodes() + e));
            }
        }
    }

    #[test]
    fn hmetis_round_trip(seed: u64, n in 2usize..40, m in 0usize..60, weighted: bool) {
        let h = random_hypergraph(seed, n, m, 6, if weighted { 5 } else { 1 });
        let text = write_hmetis(&h);
        let back = parse_hmetis(&text, "mem").unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(write_hmetis(&back), text);
    }

    #[test]
    fn matrix_market_round_trip(seed: u64, n in 2usize..40, m in 1usize..60, transpose: bool) {
        let h = random_hypergraph(seed, n, m, 6, 1);
        let o = if transpose { MatrixOrientation::ColumnsAreNodes } else { MatrixOrientation::RowsAreNodes };
        let text = write_matrix_market(&h, o);
        let back = parse_matrix_market(&text, "mem", o).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(write_matrix_market(&back, o), text);
    }
}

//! Randomized invariants over a few catalog groups: group axioms on sampled
//! triples, and translation symmetries of the derangement graph.

use std::sync::Arc;

use proptest::prelude::*;

use ekr_core::action::build_coset_action;
use ekr_core::catalog::{build_named, NamedGroup};
use ekr_core::ekrgraph::build_graph;
use ekr_core::groupcore::{subgroup_generate, Group};

fn sample_groups() -> Vec<Arc<Group>> {
    [
        NamedGroup::Symmetric { n: 4 },
        NamedGroup::Quaternion8 {},
        NamedGroup::Heisenberg { p: 3 },
        NamedGroup::Sl { n: 2, q: 3 },
    ]
    .iter()
    .map(|spec| Arc::new(build_named(spec).unwrap()))
    .collect()
}

proptest! {
    #[test]
    fn group_axioms_on_sampled_triples(which in 0usize..4, a in 0u32..1000, b in 0u32..1000, c in 0u32..1000) {
        let g = &sample_groups()[which];
        let n = g.order() as u32;
        let (a, b, c) = (a % n, b % n, c % n);
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.inv(a)), g.identity());
        prop_assert_eq!(g.mul(g.identity(), a), a);
        prop_assert_eq!(g.inv(g.mul(a, b)), g.mul(g.inv(b), g.inv(a)));
    }

    #[test]
    fn derangement_graph_is_translation_invariant(which in 0usize..4, gen in 0u32..1000, a in 0u32..1000, b in 0u32..1000, t in 0u32..1000) {
        let g = Arc::clone(&sample_groups()[which]);
        let n = g.order() as u32;
        let h = subgroup_generate(&g, &[gen % n]);
        let action = Arc::new(build_coset_action(Arc::clone(&g), h).unwrap());
        let graph = build_graph(action);
        let (a, b, t) = (a % n, b % n, t % n);
        // left translation is a graph automorphism
        prop_assert_eq!(graph.adjacent(a, b), graph.adjacent(g.mul(t, a), g.mul(t, b)));
        prop_assert_eq!(graph.adjacent(a, b), graph.adjacent(b, a));
        prop_assert!(!graph.adjacent(a, a));
    }

    #[test]
    fn action_is_a_homomorphism(which in 0usize..4, gen in 0u32..1000, a in 0u32..1000, b in 0u32..1000) {
        let g = Arc::clone(&sample_groups()[which]);
        let n = g.order() as u32;
        let h = subgroup_generate(&g, &[gen % n]);
        let action = build_coset_action(Arc::clone(&g), h).unwrap();
        let (a, b) = (a % n, b % n);
        for x in 0..action.num_points() as u32 {
            prop_assert_eq!(action.act(g.mul(a, b), x), action.act(a, action.act(b, x)));
        }
    }
}

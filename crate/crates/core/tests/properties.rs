//! Property tests over random graphs, shifts and times.

use proptest::prelude::*;

use qst_core::graph::Graph;
use qst_core::hamiltonian::{apply_noise, build, full_space_oracle, NoiseMode, NoiseSpec, ShiftSpec};
use qst_core::search::{maximize_fidelity, SearchSettings};
use qst_core::spectral::{eigendecompose, fidelity};

/// Random simple graph on 1..=max_n vertices as (n, normalized edge list).
fn arb_graph(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let all_pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let m = all_pairs.len();
        proptest::collection::vec(proptest::bool::ANY, m).prop_map(move |mask| {
            let edges = all_pairs
                .iter()
                .zip(&mask)
                .filter(|(_, keep)| **keep)
                .map(|(&e, _)| e)
                .collect();
            (n, edges)
        })
    })
}

fn shift_spec(entries: &[(usize, f64)]) -> ShiftSpec {
    let mut s = ShiftSpec::none();
    for &(v, x) in entries {
        s.set(v, x);
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_entries_follow_edges((n, edges) in arb_graph(20), shifts in proptest::collection::vec((0usize..20, -15.0..15.0f64), 0..8)) {
        let g = Graph::from_edge_list(n, &edges).unwrap();
        let shifts: Vec<(usize, f64)> = shifts.into_iter().filter(|&(v, _)| v < n).collect();
        let h = build(&g, &shift_spec(&shifts)).unwrap();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let expected = if g.has_edge(i, j) { 2.0 } else { 0.0 };
                prop_assert_eq!(h.entry(i, j), expected);
            }
        }
    }

    #[test]
    fn full_space_projection_matches_direct_build((n, edges) in arb_graph(6), shifts in proptest::collection::vec((0usize..6, -10.0..10.0f64), 0..4)) {
        let g = Graph::from_edge_list(n, &edges).unwrap();
        let shifts: Vec<(usize, f64)> = shifts.into_iter().filter(|&(v, _)| v < n).collect();
        let spec = shift_spec(&shifts);
        let direct = build(&g, &spec).unwrap();
        let projected = full_space_oracle(&g, &spec).unwrap();
        prop_assert!(direct.max_abs_diff(&projected) <= 1e-12);
    }

    #[test]
    fn noise_preserves_symmetry_and_structure((n, edges) in arb_graph(10), variance in 0.0..3.0f64, seed in any::<u64>(), edge_mode in any::<bool>()) {
        let g = Graph::from_edge_list(n, &edges).unwrap();
        let h = build(&g, &ShiftSpec::none()).unwrap();
        let spec = NoiseSpec {
            mode: if edge_mode { NoiseMode::EdgeCouplings } else { NoiseMode::VertexFrequencies },
            variance,
            seed,
        };
        let noisy = apply_noise(&h, &g, &spec).unwrap();
        let again = apply_noise(&h, &g, &spec).unwrap();
        prop_assert_eq!(&noisy, &again);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(noisy.entry(i, j), noisy.entry(j, i));
                if i != j && !g.has_edge(i, j) {
                    prop_assert_eq!(noisy.entry(i, j), 0.0);
                }
                if edge_mode && i == j {
                    prop_assert_eq!(noisy.entry(i, i), h.entry(i, i));
                }
                if !edge_mode && i != j {
                    prop_assert_eq!(noisy.entry(i, j), h.entry(i, j));
                }
            }
        }
    }

    #[test]
    fn evolution_conserves_probability((n, edges) in arb_graph(12), shifts in proptest::collection::vec((0usize..12, -15.0..15.0f64), 0..6), t in 0.0..40.0f64) {
        let g = Graph::from_edge_list(n, &edges).unwrap();
        let shifts: Vec<(usize, f64)> = shifts.into_iter().filter(|&(v, _)| v < n).collect();
        let es = eigendecompose(&build(&g, &shift_spec(&shifts)).unwrap()).unwrap();
        for i in 0..n {
            let total: f64 = (0..n).map(|j| fidelity(&es, i, j, t).unwrap()).sum();
            prop_assert!((total - 1.0).abs() <= 1e-10, "row {} sums to {}", i, total);
        }
        for i in 0..n {
            for j in 0..n {
                let a = fidelity(&es, i, j, t).unwrap();
                let b = fidelity(&es, j, i, t).unwrap();
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn located_maximum_is_reproducible((n, edges) in arb_graph(8), t_hi in 1.0..12.0f64) {
        let g = Graph::from_edge_list(n, &edges).unwrap();
        prop_assume!(n >= 2);
        let es = eigendecompose(&build(&g, &ShiftSpec::none()).unwrap()).unwrap();
        let settings = SearchSettings {
            window: (0.0, t_hi),
            grid_points: 4000,
            pst_threshold: 0.999,
        };
        let r = maximize_fidelity(&es, 0, n - 1, &settings).unwrap();
        let again = fidelity(&es, 0, n - 1, r.t_star).unwrap();
        prop_assert!((again - r.f_max).abs() <= 1e-10);
        prop_assert!(r.t_star >= 0.0 && r.t_star <= t_hi);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&r.f_max));
    }

    #[test]
    fn geodesic_counting_is_symmetric((n, edges) in arb_graph(12)) {
        let g = Graph::from_edge_list(n, &edges).unwrap();
        for i in 0..n {
            for j in 0..n {
                match (g.count_geodesics(i, j), g.count_geodesics(j, i)) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                    (Err(_), Err(_)) => {}
                    _ => prop_assert!(false, "asymmetric connectivity between {} and {}", i, j),
                }
            }
        }
    }
}

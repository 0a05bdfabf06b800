//! Cross-checks the planner against an independent label-correcting search.

use hoiplan_core::planner::astar;
use hoiplan_testkit::{grids, oracle};

#[test]
fn matches_label_correcting_oracle_on_random_grids() {
    for seed in 0..20u64 {
        let g = grids::random_occupancy(seed, 14, 10, 0.25);
        let risk = grids::random_risk(seed ^ 0xabcd, &g);
        let (s, e) = grids::corner_endpoints(&g);
        let ours = astar(&g, s, e, Some(&risk), 4.0).unwrap();
        let expected = oracle::dijkstra(&g, s, e, Some(&risk), 4.0);
        match (&ours, &expected) {
            (None, None) => {}
            (Some((_, c)), Some(o)) => {
                assert_eq!(c.total.to_bits(), o.total.to_bits(), "seed {seed}");
                assert_eq!(c.step_length.to_bits(), o.step_length.to_bits(), "seed {seed}");
                assert_eq!(c.risk_term.to_bits(), o.risk_term.to_bits(), "seed {seed}");
            }
            _ => panic!("seed {seed}: reachability disagrees with the oracle"),
        }
    }
}

#[test]
fn matches_oracle_without_risk() {
    for seed in 100..110u64 {
        let g = grids::random_occupancy(seed, 20, 20, 0.35);
        let (s, e) = grids::corner_endpoints(&g);
        let ours = astar(&g, s, e, None, 0.0).unwrap();
        let expected = oracle::dijkstra(&g, s, e, None, 0.0);
        match (&ours, &expected) {
            (None, None) => {}
            (Some((_, c)), Some(o)) => {
                assert_eq!(c.total.to_bits(), o.total.to_bits(), "seed {seed}")
            }
            _ => panic!("seed {seed}: reachability disagrees with the oracle"),
        }
    }
}

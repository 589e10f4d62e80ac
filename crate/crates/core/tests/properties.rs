use std::time::{Duration, Instant};

use ctmp_core::cspace::{forward_kinematics, CostModel};
use ctmp_core::harness::corpus::{random_arm, random_grid};
use ctmp_core::query::{query, PotentialStateIndex, QueryRequest};
use ctmp_core::{
    anytime_refine, astar, load_library, preprocess, save_library, Config, Goal, Scenario,
};
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = Scenario> {
    (2u32..=16, 0.0f64..=0.3, any::<u64>()).prop_map(|(n, d, seed)| random_grid(n.max(4), d, seed))
}

fn arm_strategy() -> impl Strategy<Value = Scenario> {
    (
        prop::sample::select(vec![16u32, 24]),
        0.0f64..=0.2,
        any::<u64>(),
        1.0f64..3.0,
    )
        .prop_map(|(res, d, seed, w)| {
            let mut s = random_arm(res, d, seed);
            s.cost_model = CostModel::PerDof {
                weights: vec![w, 1.0],
            };
            s
        })
}

fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    prop_oneof![grid_strategy(), arm_strategy()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn edges_are_symmetric(s in scenario_strategy()) {
        for q in s.lattice() {
            for (n, c) in s.neighbors(&q) {
                let back = s.neighbors(&n).into_iter().find(|(m, _)| *m == q);
                prop_assert_eq!(back.map(|b| b.1), Some(c));
                prop_assert_eq!(s.step_cost(&q, &n), Some(c));
            }
        }
    }

    #[test]
    fn heuristic_is_consistent(s in scenario_strategy(), goal_rank in any::<u64>()) {
        let goal = s.unrank(goal_rank % s.num_states());
        prop_assert_eq!(s.heuristic(&goal, &goal), 0.0);
        for q in s.lattice() {
            let hq = s.heuristic(&q, &goal);
            for (n, c) in s.neighbors(&q) {
                prop_assert!(hq <= c + s.heuristic(&n, &goal) + 1e-12, "{} -> {}", q, n);
            }
        }
    }

    #[test]
    fn rank_round_trips(s in scenario_strategy()) {
        for (i, q) in s.lattice().enumerate() {
            prop_assert_eq!(s.rank(&q), i as u64);
            prop_assert_eq!(s.unrank(i as u64), q);
        }
    }

    #[test]
    fn kinematics_preserve_link_lengths(
        links in prop::collection::vec(0.1f64..2.0, 1..5),
        res in 4u32..64,
        raw in prop::collection::vec(any::<u32>(), 5),
    ) {
        let s = Scenario::arm(ctmp_core::ArmModel::new(links.clone(), res), Config::new(vec![0; links.len()]));
        let q = Config::new(raw[..links.len()].iter().map(|r| (r % res) as i32).collect::<Vec<_>>());
        let pts = forward_kinematics(match &s.domain {
            ctmp_core::cspace::Domain::Arm(a) => a,
            _ => unreachable!(),
        }, &q);
        prop_assert_eq!(pts.len(), links.len() + 1);
        for (w, l) in pts.windows(2).zip(&links) {
            let d = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            prop_assert!((d - l).abs() < 1e-9);
        }
    }

    #[test]
    fn library_round_trip(s in scenario_strategy(), seed in any::<u64>()) {
        prop_assume!(s.is_valid(&s.home));
        let lib = preprocess(&s, seed).unwrap();
        let mut bytes = Vec::new();
        save_library(&lib, &s, &mut bytes).unwrap();
        let back = load_library(&mut bytes.as_slice(), &s).unwrap();
        prop_assert_eq!(&back, &lib);
        let mut again = Vec::new();
        save_library(&back, &s, &mut again).unwrap();
        prop_assert_eq!(again, bytes);
    }

    #[test]
    fn queries_are_valid_and_refinement_never_worsens(s in scenario_strategy(), pick in any::<u64>()) {
        prop_assume!(s.is_valid(&s.home));
        let lib = preprocess(&s, 1).unwrap();
        let goals: Vec<Config> = lib.covered_states().into_iter().collect();
        prop_assume!(!goals.is_empty());
        let goal = &goals[(pick % goals.len() as u64) as usize];
        let index = PotentialStateIndex::new(&lib);
        let r = query(&s, &lib, &index, &QueryRequest::new(s.home.clone(), goal.clone(), Duration::from_secs(5))).unwrap();
        r.path.validate(&s).unwrap();
        prop_assert!(r.path.connects(&s.home, goal));
        prop_assert!(r.final_cost <= r.initial_cost);
        // non-integer weights: equal-cost paths may differ in summation rounding
        let opt = astar(&s, &s.home, Goal::Exact(goal), 1.0, None).unwrap();
        prop_assert!((r.final_cost - opt.cost()).abs() <= 1e-9 * opt.cost().max(1.0), "{} vs {}", r.final_cost, opt.cost());
    }

    #[test]
    fn refine_from_weighted_astar_reaches_optimum(s in grid_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let free: Vec<Config> = s.lattice().filter(|q| s.is_valid(q)).collect();
        let start = &free[(a % free.len() as u64) as usize];
        let goal = &free[(b % free.len() as u64) as usize];
        if let Ok(initial) = astar(&s, start, Goal::Exact(goal), 10.0, None) {
            let (p, rep) = anytime_refine(&s, start, goal, &initial, Instant::now(), Duration::from_secs(5)).unwrap();
            let opt = astar(&s, start, Goal::Exact(goal), 1.0, None).unwrap();
            prop_assert_eq!(p.cost(), opt.cost());
            prop_assert!(rep.optimal);
        }
    }
}

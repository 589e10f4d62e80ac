//! Writes the example scenarios, the generated corpus and sample experiment
//! configs under `scenarios/`.
//!
//! `cargo run -p ctmp-core --example export_scenarios -- [outdir]`

use std::path::PathBuf;

use ctmp_core::harness::corpus::{corpus, hard_scenarios, open_sequential};
use ctmp_core::harness::{Budget, ExperimentConfig, Mode, PlannerKind};
use ctmp_core::{ArmModel, Config, Obstacle, Rect, RegionSpec, Scenario};

fn main() -> std::io::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("scenarios"), PathBuf::from);
    std::fs::create_dir_all(out.join("corpus"))?;

    let grid = Scenario::grid(16, 16, Config::new([0, 0]))
        .with_name("example-grid")
        .with_obstacles([
            Obstacle::rect([4.0, 0.0], [5.0, 10.0]),
            Obstacle::rect([9.0, 6.0], [10.0, 16.0]),
            Obstacle::circle([13.0, 4.0], 1.2),
        ])
        .with_region(RegionSpec::cells("pick", (11, 15), (0, 3)))
        .with_region(RegionSpec::cells("place", (11, 15), (12, 15)));
    let arm = Scenario::arm(ArmModel::new(vec![1.0, 0.8], 32), Config::new([0, 0]))
        .with_name("example-arm")
        .with_obstacles([
            Obstacle::circle([0.0, 1.2], 0.2),
            Obstacle::rect([-1.0, -1.4], [-0.6, -1.0]),
        ])
        .with_region(RegionSpec::new("pick", Rect::new([0.2, 0.6], [1.2, 1.6])))
        .with_region(RegionSpec::new(
            "place",
            Rect::new([-1.6, -0.8], [-0.6, 0.4]),
        ));
    std::fs::write(out.join("example_grid.json"), grid.to_json())?;
    std::fs::write(out.join("example_arm.json"), arm.to_json())?;
    std::fs::write(
        out.join("open_sequential.json"),
        open_sequential().to_json(),
    )?;
    for s in corpus().into_iter().chain(hard_scenarios()) {
        std::fs::write(
            out.join("corpus").join(format!("{}.json", s.name)),
            s.to_json(),
        )?;
    }

    let mut single = ExperimentConfig::new(
        Mode::Single,
        50,
        Budget::FixedMs(500),
        PlannerKind::ALL.to_vec(),
        1,
    );
    single.scenario = "example_grid.json".into();
    single.output_dir = "../results/single".into();
    single.deterministic_output = true;
    let mut seq = ExperimentConfig::new(
        Mode::Sequential,
        20,
        Budget::RangeMs([500, 3000]),
        vec![
            PlannerKind::Ctmp,
            PlannerKind::CtmpRefine,
            PlannerKind::CtmpShortcut,
            PlannerKind::Arastar,
        ],
        2,
    );
    seq.scenario = "open_sequential.json".into();
    seq.output_dir = "../results/sequential".into();
    let mut hard = ExperimentConfig::new(
        Mode::Single,
        10,
        Budget::FixedMs(500),
        vec![
            PlannerKind::Ctmp,
            PlannerKind::CtmpRefine,
            PlannerKind::CtmpShortcut,
            PlannerKind::Arastar,
        ],
        3,
    );
    hard.scenario = "corpus/trap600.json".into();
    hard.output_dir = "../results/trap".into();
    for (name, cfg) in [
        ("bench_single.json", single),
        ("bench_sequential.json", seq),
        ("bench_trap.json", hard),
    ] {
        std::fs::write(
            out.join(name),
            serde_json::to_string_pretty(&cfg).expect("config serializes") + "\n",
        )?;
    }
    println!("wrote scenarios to {}", out.display());
    Ok(())
}

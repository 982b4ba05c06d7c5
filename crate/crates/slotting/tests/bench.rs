use std::time::Duration;

use slotting::bench::{run_experiment, run_seed, write_csv, write_target_csv, ExperimentPlan, TargetSpec, Variant};
use slotting_core::annealer::ChainRule;
use slotting_core::model::fixtures::t1;

fn small_plan() -> ExperimentPlan {
    let mut plan = ExperimentPlan::new(5);
    plan.sizes = vec![4];
    plan.insert_pcts = vec![20, 90];
    plan.runs_per_cell = 6;
    plan.time_budget = Some(Duration::from_secs(2));
    plan.jobs = 2;
    plan
}

#[test]
fn rows_cover_every_cell_and_flag_infeasible_ones() {
    let result = run_experiment(&small_plan()).unwrap();
    assert_eq!(result.rows.len(), 5);
    assert_eq!(result.diagnostics.len(), 1);
    let skipped = result.rows.last().unwrap();
    assert_eq!((skipped.insert_pct, skipped.runs, skipped.variant), (Some(90), 0, None));
    for row in &result.rows[..4] {
        assert_eq!(row.runs, 6);
        // rs starts from assignments, bf from the full qubo; both at or above the optimum
        assert!(row.gap_to_opt.unwrap() >= -1e-9);
    }
    let mut buf = Vec::new();
    write_csv(&result.rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.ends_with("4,90,,,0,,,,,\n"));
}

#[test]
fn energies_are_reproducible() {
    let strip = |plan: &ExperimentPlan| {
        run_experiment(plan)
            .unwrap()
            .rows
            .into_iter()
            .map(|r| (r.mean_energy, r.std_energy, r.min_energy, r.gap_to_opt))
            .collect::<Vec<_>>()
    };
    let plan = small_plan();
    assert_eq!(strip(&plan), strip(&plan));
    assert_ne!(run_seed(&plan, 4, Some(20), 0, 0), run_seed(&plan, 4, Some(20), 0, 1));
}

#[test]
fn time_to_target_on_injected_instance() {
    let mut plan = small_plan();
    plan.instance = Some(t1());
    plan.variants = vec![Variant::RealSwap];
    plan.chains = vec![ChainRule::PalletsTimesShelves];
    plan.time_to_target = Some(TargetSpec::default());
    let result = run_experiment(&plan).unwrap();
    assert_eq!(result.rows.len(), 1);
    assert_eq!(result.rows[0].insert_pct, None);
    assert_eq!(result.targets.len(), 6);
    assert!(result.targets.iter().all(|t| t.reached && t.time_s.is_some()));

    plan.time_to_target = Some(TargetSpec {
        target: Some(-1.0),
        margin: 0.0,
    });
    let result = run_experiment(&plan).unwrap();
    assert!(result.targets.iter().all(|t| !t.reached && t.time_s.is_none()));
    let mut buf = Vec::new();
    write_target_csv(&result.targets, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("size,insert_pct,variant,chain,run,seed,reached,time_s,iterations\n2,,rs,nm,0,"));
}

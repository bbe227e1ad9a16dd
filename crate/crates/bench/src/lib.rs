//! Benchmark inputs: the running example and seeded random instances.

use hypercause::fixtures::random::{self, Limits};
use hypercause::fixtures::{running_counterexample, running_example, running_formula};
use hypercause::{Counterexample, HyperFormula, MooreMachine};

pub struct Workload {
    pub name: String,
    pub machine: MooreMachine,
    pub formula: HyperFormula,
    pub cex: Counterexample,
}

pub fn running() -> Workload {
    let machine = running_example();
    let cex = running_counterexample(&machine);
    Workload {
        name: "running-example".into(),
        formula: running_formula(),
        machine,
        cex,
    }
}

/// Random instances for the given seeds, capped at `events` input and output
/// events each.
pub fn random_instances(seeds: impl IntoIterator<Item = u64>, events: usize) -> Vec<Workload> {
    let limits = Limits {
        max_input_events: events,
        max_output_events: events,
        ..Limits::default()
    };
    seeds
        .into_iter()
        .map(|seed| {
            let inst = random::instance(seed, limits);
            Workload {
                name: format!("random-{events}-{seed}"),
                machine: inst.machine,
                formula: inst.formula,
                cex: inst.cex,
            }
        })
        .collect()
}

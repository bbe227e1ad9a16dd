//! Seeded random machines, traces and formulas for property suites and
//! benchmarks.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::logic::{eval_hyper, Formula, HyperFormula, IndexedAtom};
use crate::model::{Alphabet, AtomicProp, Counterexample, Lasso, MooreMachine, PropKind};

/// Size limits for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    pub max_depth: usize,
    /// Bound on `|u|+|v|` of every trace.
    pub max_lasso: usize,
    /// Bound on input events over all traces.
    pub max_input_events: usize,
    /// Bound on output events over all traces.
    pub max_output_events: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 16,
            max_inputs: 3,
            max_outputs: 3,
            max_depth: 3,
            max_lasso: 6,
            max_input_events: 12,
            max_output_events: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub seed: u64,
    pub machine: MooreMachine,
    pub formula: HyperFormula,
    pub cex: Counterexample,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A total deterministic machine with random labels and successors; state 0 is initial.
pub fn machine(rng: &mut impl Rng, states: usize, inputs: usize, outputs: usize) -> MooreMachine {
    let ins: Vec<String> = (0..inputs).map(|i| format!("i{i}")).collect();
    let outs: Vec<String> = (0..outputs).map(|i| format!("o{i}")).collect();
    let st = (0..states)
        .map(|s| {
            let label = outs.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            (format!("s{s}"), label)
        })
        .collect();
    let succ = (0..states)
        .map(|_| (0..1usize << inputs).map(|_| rng.gen_range(0..states)).collect())
        .collect();
    MooreMachine::from_table(ins, outs, st, 0, succ).expect("random tables are well-formed")
}

/// A random input lasso with `|u|+|v| <= max_len`.
pub fn input_lasso(rng: &mut impl Rng, machine: &MooreMachine, max_len: usize) -> Lasso {
    let n = rng.gen_range(1..=max_len);
    let p = rng.gen_range(0..n);
    let mut letter = || rng.gen_range(0..=machine.input_mask());
    let u = (0..p).map(|_| letter()).collect();
    let v = (0..n - p).map(|_| letter()).collect();
    Lasso::new(u, v).expect("non-empty period")
}

/// A trace of the machine with `|u|+|v| <= max_len`, if one turns up within a
/// few draws.
pub fn trace(rng: &mut impl Rng, machine: &MooreMachine, max_len: usize) -> Option<Lasso> {
    (0..32).find_map(|_| {
        let t = machine.run(&input_lasso(rng, machine, max_len)).ok()?;
        (t.len() <= max_len).then_some(t)
    })
}

/// Any lasso over the alphabet, for logic-level properties.
pub fn lasso(rng: &mut impl Rng, ap: &Alphabet, max_len: usize) -> Lasso {
    let n = rng.gen_range(1..=max_len);
    let p = rng.gen_range(0..n);
    let mut letter = || rng.gen_range(0..=ap.full_mask());
    let u = (0..p).map(|_| letter()).collect();
    let v = (0..n - p).map(|_| letter()).collect();
    Lasso::new(u, v).expect("non-empty period")
}

/// A random formula of temporal depth at most `depth` over the given atoms.
pub fn formula<A: Clone>(rng: &mut impl Rng, atoms: &[A], depth: usize) -> Formula<A> {
    gen_formula(rng, atoms, depth, 3)
}

fn gen_formula<A: Clone>(rng: &mut impl Rng, atoms: &[A], depth: usize, fuel: usize) -> Formula<A> {
    if fuel == 0 {
        return leaf(rng, atoms);
    }
    let temporal = depth > 0;
    let pick = rng.gen_range(0..if temporal { 12 } else { 6 });
    let sub = |rng: &mut _, d: usize| Box::new(gen_formula(rng, atoms, d, fuel - 1));
    let d = depth.saturating_sub(1);
    match pick {
        0 | 1 => leaf(rng, atoms),
        2 => Formula::Not(sub(rng, depth)),
        3 => Formula::And(sub(rng, depth), sub(rng, depth)),
        4 => Formula::Or(sub(rng, depth), sub(rng, depth)),
        5 => {
            if rng.gen_bool(0.5) {
                Formula::Implies(sub(rng, depth), sub(rng, depth))
            } else {
                Formula::Iff(sub(rng, depth), sub(rng, depth))
            }
        }
        6 => Formula::Next(sub(rng, d)),
        7 => Formula::Eventually(sub(rng, d)),
        8 | 9 => Formula::Globally(sub(rng, d)),
        10 => Formula::Until(sub(rng, d), sub(rng, d)),
        _ => Formula::Release(sub(rng, d), sub(rng, d)),
    }
}

fn leaf<A: Clone>(rng: &mut impl Rng, atoms: &[A]) -> Formula<A> {
    match rng.gen_range(0..12) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::Atom(atoms.choose(rng).expect("atoms").clone()),
    }
}

/// A `∀t1 ∀t2` formula over every proposition of the machine.
pub fn hyper_formula(rng: &mut impl Rng, machine: &MooreMachine, depth: usize) -> HyperFormula {
    let vars = vec!["t1".to_string(), "t2".to_string()];
    let atoms: Vec<IndexedAtom> = machine
        .alphabet()
        .props()
        .iter()
        .flat_map(|p| {
            vars.iter().map(|v| IndexedAtom {
                prop: p.name.clone(),
                var: v.clone(),
            })
        })
        .collect();
    HyperFormula {
        vars,
        body: formula(rng, &atoms, depth),
    }
}

/// A violated instance within `limits`, drawn deterministically from `seed`.
pub fn instance(seed: u64, limits: Limits) -> Instance {
    let mut rng = rng(seed);
    loop {
        let ni = rng.gen_range(1..=limits.max_inputs);
        let no = rng.gen_range(1..=limits.max_outputs);
        let ns = rng.gen_range(1..=limits.max_states);
        let m = machine(&mut rng, ns, ni, no);
        for _ in 0..8 {
            let (Some(t1), Some(t2)) = (
                trace(&mut rng, &m, limits.max_lasso),
                trace(&mut rng, &m, limits.max_lasso),
            ) else {
                break;
            };
            let len = t1.len() + t2.len();
            if len * ni > limits.max_input_events || len * no > limits.max_output_events {
                continue;
            }
            let cex = Counterexample::new(
                m.alphabet().clone(),
                BTreeMap::from([("t1".to_string(), t1), ("t2".to_string(), t2)]),
            );
            for _ in 0..8 {
                let f = hyper_formula(&mut rng, &m, limits.max_depth);
                if eval_hyper(&cex, &f) == Ok(false) {
                    return Instance {
                        seed,
                        machine: m,
                        formula: f,
                        cex,
                    };
                }
            }
        }
    }
}

/// Names `p0..` as single-trace propositions, for LTL-level properties.
pub fn ltl_alphabet(props: usize) -> Alphabet {
    Alphabet::new(
        (0..props)
            .map(|i| AtomicProp {
                name: format!("p{i}"),
                kind: PropKind::Output,
            })
            .collect(),
    )
    .expect("distinct names")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_violated_and_within_limits() {
        let limits = Limits::default();
        for seed in 0..20 {
            let inst = instance(seed, limits);
            inst.cex.validate(&inst.machine).unwrap();
            assert_eq!(eval_hyper(&inst.cex, &inst.formula), Ok(false));
            assert!(inst.cex.input_events().len() <= limits.max_input_events);
            assert!(inst.formula.body.temporal_depth() <= limits.max_depth);
            assert!(inst.cex.traces().values().all(|t| t.len() <= limits.max_lasso));
        }
        let a = instance(7, limits);
        let b = instance(7, limits);
        assert_eq!(a.cex, b.cex);
        assert_eq!(a.formula, b.formula);
    }
}

//! Exhaustive actual-cause enumeration, independent of alternating automata
//! and unsat cores. Only the model and logic layers are shared with the main
//! pipeline.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::logic::{eval_hyper, HyperFormula};
use crate::model::{Counterexample, Event, Intervener, Lasso, MooreMachine};
use crate::subsets::{combinations, pick};
use crate::Error;

pub const MAX_INPUT_EVENTS: usize = 20;
pub const MAX_OUTPUT_EVENTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleCause {
    pub cause: BTreeSet<Event>,
    /// Least witnessing contingency by size, then event order.
    pub contingency: BTreeSet<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    /// Pairwise incomparable, ordered by size and then event order.
    pub causes: Vec<OracleCause>,
    pub subsets_checked: usize,
}

/// Reachable counterfactual traces of one trace under one cause restriction,
/// each with its least contingency.
type Reach = Arc<Vec<(Lasso, Vec<Event>)>>;

struct Search<'a> {
    formula: &'a HyperFormula,
    gamma: &'a Counterexample,
    intervener: Intervener<'a>,
    vars: Vec<String>,
    outputs: Vec<Vec<Event>>,
    memo: Mutex<HashMap<(usize, Vec<Event>), Reach>>,
}

impl Search<'_> {
    fn reach(&self, v: usize, cause: &[Event]) -> Result<Reach, Error> {
        let key = (v, cause.to_vec());
        if let Some(r) = self.memo.lock().unwrap().get(&key) {
            return Ok(r.clone());
        }
        let var = &self.vars[v];
        let aut = self.intervener.automaton(var).expect("trace of the counterexample");
        let outs = &self.outputs[v];
        let mut seen: HashMap<Lasso, usize> = HashMap::new();
        let mut reach = Vec::new();
        for size in 0..=outs.len() {
            for idx in combinations(outs.len(), size) {
                let w = pick(outs, &idx);
                let t = aut.run(&self.intervener.word(var, cause, &w)?);
                seen.entry(t.clone()).or_insert_with(|| {
                    reach.push((t, w));
                    reach.len() - 1
                });
            }
        }
        let reach = Arc::new(reach);
        self.memo.lock().unwrap().insert(key, reach.clone());
        Ok(reach)
    }

    /// The least contingency under which flipping `cause` satisfies the formula.
    fn witness(&self, cause: &[Event]) -> Result<Option<BTreeSet<Event>>, Error> {
        let options = (0..self.vars.len())
            .map(|v| {
                let mine: Vec<Event> = cause.iter().filter(|e| e.trace == self.vars[v]).cloned().collect();
                self.reach(v, &mine)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut best: Option<(usize, Vec<Event>)> = None;
        let mut choice = vec![0usize; options.len()];
        loop {
            let w: Vec<Event> = choice
                .iter()
                .enumerate()
                .flat_map(|(v, &c)| options[v][c].1.iter().cloned())
                .collect();
            let better = match &best {
                None => true,
                Some((n, b)) => (w.len(), &w) < (*n, b),
            };
            if better {
                let traces = choice
                    .iter()
                    .enumerate()
                    .map(|(v, &c)| (self.vars[v].clone(), options[v][c].0.clone()))
                    .collect();
                let cand = Counterexample::new(self.gamma.alphabet().clone(), traces);
                if eval_hyper(&cand, self.formula)? {
                    best = Some((w.len(), w));
                }
            }
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(best.map(|(_, w)| w.into_iter().collect()));
                }
                choice[i] += 1;
                if choice[i] < options[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

/// Every subset-minimal set of input events of `cex` whose flip, under some
/// contingency over the output events of `cex`, makes the formula hold.
///
/// A satisfied formula has no causes.
pub fn brute_force_causes(
    machine: &MooreMachine,
    formula: &HyperFormula,
    cex: &Counterexample,
) -> Result<OracleOutcome, Error> {
    let inputs = cex.input_events().into_iter().collect();
    let outputs = cex.output_events().into_iter().collect();
    brute_force_in_order(machine, formula, cex, inputs, outputs)
}

/// The enumeration behind `brute_force_causes`, over input and output events
/// in the given order. Cause sets do not depend on the order.
fn brute_force_in_order(
    machine: &MooreMachine,
    formula: &HyperFormula,
    cex: &Counterexample,
    inputs: Vec<Event>,
    outputs: Vec<Event>,
) -> Result<OracleOutcome, Error> {
    let formula = formula.bind_to(cex)?;
    let intervener = Intervener::new(machine, cex)?;
    if inputs.len() > MAX_INPUT_EVENTS || outputs.len() > MAX_OUTPUT_EVENTS {
        return Err(Error::TooLarge(format!(
            "{} input and {} output events; the oracle handles at most {MAX_INPUT_EVENTS} and {MAX_OUTPUT_EVENTS}",
            inputs.len(),
            outputs.len()
        )));
    }
    if eval_hyper(cex, &formula)? {
        return Ok(OracleOutcome {
            causes: Vec::new(),
            subsets_checked: 0,
        });
    }
    let vars: Vec<String> = cex.vars().map(str::to_string).collect();
    let per_trace = vars
        .iter()
        .map(|v| outputs.iter().filter(|e| &e.trace == v).cloned().collect())
        .collect();
    let search = Search {
        formula: &formula,
        gamma: cex,
        intervener,
        vars,
        outputs: per_trace,
        memo: Mutex::new(HashMap::new()),
    };

    let mut causes: Vec<OracleCause> = Vec::new();
    let mut checked = 0;
    for size in 1..=inputs.len() {
        let level: Vec<Vec<Event>> = combinations(inputs.len(), size)
            .map(|idx| pick(&inputs, &idx))
            .filter(|s| !causes.iter().any(|c| c.cause.iter().all(|e| s.contains(e))))
            .collect();
        if level.is_empty() {
            break;
        }
        checked += level.len();
        let found = level
            .par_iter()
            .map(|s| {
                Ok(search.witness(s)?.map(|w| OracleCause {
                    cause: s.iter().cloned().collect(),
                    contingency: w,
                }))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        causes.extend(found.into_iter().flatten());
    }
    causes.sort_by(|a, b| (a.cause.len(), &a.cause).cmp(&(b.cause.len(), &b.cause)));
    Ok(OracleOutcome {
        causes,
        subsets_checked: checked,
    })
}

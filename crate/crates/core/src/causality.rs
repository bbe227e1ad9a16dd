//! Actual causes of a violation: subset search over the candidate set, one
//! counterfactual per subset, contingencies from annotated runs, and an
//! independent check of the SAT, CF and MIN conditions.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::alternating::{ltl_to_alternating, AltAutomaton, AnnotationPolicy};
use crate::logic::{eval_hyper, eval_ltl, negate_to_nnf, zip, HyperFormula};
use crate::model::{lcm, Counterexample, Event, Intervener, Lasso, MooreMachine, PropKind};
use crate::satcore::CandidateSet;
use crate::subsets::{by_size, combinations, pick};
use crate::Error;

/// Largest number of controllable output events `verify_actual_cause` enumerates.
pub const VERIFY_MAX_OUTPUT_EVENTS: usize = 16;
/// Largest cause `verify_actual_cause` checks subset by subset.
pub const VERIFY_MAX_CAUSE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Config {
    /// Largest cause tried; `None` tries every size up to the candidate set.
    pub max_cause_size: Option<usize>,
    /// Largest contingency tried; `None` is complete.
    pub max_contingency_size: Option<usize>,
    pub policy: AnnotationPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Found,
    NoActualCause,
    BoundedOut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cause {
    pub events: BTreeSet<Event>,
    pub contingency: BTreeSet<Event>,
    pub verified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Stats {
    pub subsets_checked: usize,
    pub time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseReport {
    pub candidate: CandidateSet,
    pub causes: Vec<Cause>,
    pub status: Status,
    pub stats: Stats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CfOutcome {
    /// Flipping the cause alone repairs the property.
    Counterfactual,
    /// Flipping the cause repairs the property under this contingency.
    Contingency(BTreeSet<Event>),
    Fail,
}

impl CfOutcome {
    pub fn passes(&self) -> bool {
        !matches!(self, CfOutcome::Fail)
    }

    pub fn contingency(&self) -> BTreeSet<Event> {
        match self {
            CfOutcome::Contingency(w) => w.clone(),
            _ => BTreeSet::new(),
        }
    }
}

/// A counterexample prepared for repeated interventions.
pub struct Explainer<'m> {
    machine: &'m MooreMachine,
    formula: HyperFormula,
    intervener: Intervener<'m>,
    violation: AltAutomaton,
    config: Config,
    checked: AtomicUsize,
}

impl<'m> Explainer<'m> {
    pub fn new(
        machine: &'m MooreMachine,
        formula: &HyperFormula,
        cex: &Counterexample,
        config: Config,
    ) -> Result<Self, Error> {
        let intervener = Intervener::new(machine, cex)?;
        let formula = formula.bind_to(cex)?;
        let (phi, _) = zip(&formula, cex)?;
        let violation = ltl_to_alternating(&negate_to_nnf(&phi))?;
        Ok(Explainer {
            machine,
            formula,
            intervener,
            violation,
            config,
            checked: AtomicUsize::new(0),
        })
    }

    pub fn counterexample(&self) -> &Counterexample {
        self.intervener.counterexample()
    }

    pub fn formula(&self) -> &HyperFormula {
        &self.formula
    }

    pub fn machine(&self) -> &MooreMachine {
        self.machine
    }

    fn holds(&self, gamma: &Counterexample) -> bool {
        eval_hyper(gamma, &self.formula).expect("formula bound to the counterexample")
    }

    fn intervene(&self, cause: &BTreeSet<Event>, w: &BTreeSet<Event>) -> Result<Counterexample, Error> {
        Ok(self.intervener.apply(cause, w)?)
    }

    /// CF for the full flip of `cause`, with a contingency search when the
    /// plain counterfactual still violates.
    pub fn check_cf(&self, cause: &BTreeSet<Event>) -> Result<CfOutcome, Error> {
        self.checked.fetch_add(1, Ordering::Relaxed);
        let flipped = self.intervene(cause, &BTreeSet::new())?;
        if self.holds(&flipped) {
            return Ok(CfOutcome::Counterfactual);
        }
        if cause.is_empty() {
            return Ok(CfOutcome::Fail);
        }
        Ok(match self.contingency_for(cause, &flipped)? {
            Some(w) => CfOutcome::Contingency(w),
            None => CfOutcome::Fail,
        })
    }

    /// A non-empty contingency under which flipping `cause` repairs the property.
    /// Subsets of the annotated differing outputs come first, then the remaining
    /// subsets of all differing outputs; each group by size, then event order.
    pub fn compute_contingency(&self, cause: &BTreeSet<Event>) -> Result<Option<BTreeSet<Event>>, Error> {
        let flipped = self.intervene(cause, &BTreeSet::new())?;
        self.contingency_for(cause, &flipped)
    }

    fn contingency_for(
        &self,
        cause: &BTreeSet<Event>,
        flipped: &Counterexample,
    ) -> Result<Option<BTreeSet<Event>>, Error> {
        let gamma = self.counterexample();
        let differing: Vec<Event> = differing_outputs(gamma, flipped).into_iter().collect();
        if differing.len() > 64 {
            return Err(Error::TooLarge(format!(
                "{} differing output events; contingencies are searched over at most 64",
                differing.len()
            )));
        }
        let annotated = self.annotated_sites(flipped)?;
        let priority: Vec<usize> = (0..differing.len())
            .filter(|&i| {
                let e = &differing[i];
                annotated.contains(&(e.trace.clone(), e.prop.clone(), e.position))
            })
            .collect();
        let cap = self.config.max_contingency_size.unwrap_or(usize::MAX);

        let vars: Vec<&String> = gamma.traces().keys().collect();
        let owner: Vec<usize> = differing
            .iter()
            .map(|e| vars.iter().position(|v| **v == e.trace).expect("trace of the counterexample"))
            .collect();
        // interventions act trace by trace and distinct contingencies often
        // yield the same traces: runs are interned per (trace, part of W) and
        // verdicts per tuple of runs
        let mut runs: Vec<Lasso> = Vec::new();
        let mut run_ids: FxHashMap<(usize, u64), usize> = FxHashMap::default();
        let mut seen: FxHashMap<Vec<usize>, bool> = FxHashMap::default();
        let mut parts = vec![0u64; vars.len()];
        let mut key = Vec::with_capacity(vars.len());
        let mut try_set = |idx: &[usize]| -> Result<bool, Error> {
            parts.fill(0);
            for &i in idx {
                parts[owner[i]] |= 1 << i;
            }
            key.clear();
            for (t, &mask) in parts.iter().enumerate() {
                let id = match run_ids.get(&(t, mask)) {
                    Some(&id) => id,
                    None => {
                        let var = vars[t].as_str();
                        let run = if mask == 0 {
                            flipped.trace(var).expect("same variables").clone()
                        } else {
                            let part = (0..differing.len()).filter(|i| mask & (1 << i) != 0).map(|i| &differing[i]);
                            let aut = self.intervener.automaton(var).expect("trace of the counterexample");
                            aut.run(&self.intervener.word(var, cause, part)?)
                        };
                        runs.push(run);
                        run_ids.insert((t, mask), runs.len() - 1);
                        runs.len() - 1
                    }
                };
                key.push(id);
            }
            if let Some(&h) = seen.get(key.as_slice()) {
                return Ok(h);
            }
            let traces = vars.iter().map(|v| (*v).clone()).zip(key.iter().map(|&id| runs[id].clone())).collect();
            let h = self.holds(&Counterexample::new(gamma.alphabet().clone(), traces));
            seen.insert(key.clone(), h);
            Ok(h)
        };
        let found = |idx: &[usize]| Some(idx.iter().map(|&i| differing[i].clone()).collect());
        for idx in by_size(priority.len(), 1..=priority.len().min(cap)) {
            let idx: Vec<usize> = idx.iter().map(|&i| priority[i]).collect();
            if try_set(&idx)? {
                return Ok(found(&idx));
            }
        }
        let is_priority: BTreeSet<usize> = priority.iter().copied().collect();
        for idx in by_size(differing.len(), 1..=differing.len().min(cap)) {
            if idx.iter().all(|i| is_priority.contains(i)) {
                continue;
            }
            if try_set(&idx)? {
                return Ok(found(&idx));
            }
        }
        Ok(None)
    }

    /// Sites `(trace, prop, position-in-Γ)` of the literals read by the accepting
    /// run of the violation on the zipped counterfactual.
    fn annotated_sites(&self, flipped: &Counterexample) -> Result<HashSet<(String, String, usize)>, Error> {
        let (_, zt) = zip(&self.formula, flipped)?;
        let ev = self.violation.evaluate(zt.alphabet(), zt.lasso());
        let annotations = ev.annotations(self.config.policy);
        let gamma = self.counterexample();
        let horizon = alignment_horizon(
            std::iter::once(zt.lasso()).chain(gamma.traces().values()),
        );
        let mut sites = HashSet::new();
        for a in annotations {
            let Some(bit) = zt.bit(&a.atom) else { continue };
            let (var, prop) = zt.origin(bit);
            let t = gamma.trace(var).expect("same variables");
            for n in 0..horizon {
                if zt.lasso().fold(n) == a.position {
                    sites.insert((var.to_string(), prop.to_string(), t.fold(n)));
                }
            }
        }
        Ok(sites)
    }

    /// The first subset of the candidate, by size and event order, that
    /// passes CF. The whole candidate is returned only if it passes CF itself.
    pub fn actual_cause(&self, candidate: &CandidateSet) -> Result<CauseReport, Error> {
        let start = Instant::now();
        self.checked.store(0, Ordering::Relaxed);
        let events: Vec<Event> = candidate.events.iter().cloned().collect();
        let n = events.len();
        let cap = self.config.max_cause_size.unwrap_or(n);
        let mut found = None;
        for k in 1..n.min(cap + 1) {
            let level: Vec<Vec<usize>> = combinations(n, k).collect();
            let outcomes = level
                .par_iter()
                .map(|idx| {
                    let c: BTreeSet<Event> = pick(&events, idx).into_iter().collect();
                    self.check_cf(&c).map(|o| (c, o))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            if let Some((c, o)) = outcomes.into_iter().find(|(_, o)| o.passes()) {
                found = Some((c, o));
                break;
            }
        }
        let mut status = Status::Found;
        if found.is_none() {
            if n > 0 && n <= cap {
                let all: BTreeSet<Event> = candidate.events.clone();
                let o = self.check_cf(&all)?;
                if o.passes() {
                    found = Some((all, o));
                } else {
                    status = Status::NoActualCause;
                }
            } else if n == 0 {
                status = Status::NoActualCause;
            } else {
                status = Status::BoundedOut;
            }
        }
        let causes = match found {
            Some((c, o)) => vec![self.entry(c, o)?],
            None => vec![],
        };
        Ok(self.report(candidate, causes, status, start))
    }

    /// Every subset of the candidate up to the size bound that passes CF and has
    /// no passing proper subset.
    pub fn all_minimal_causes(&self, candidate: &CandidateSet) -> Result<CauseReport, Error> {
        let start = Instant::now();
        self.checked.store(0, Ordering::Relaxed);
        let events: Vec<Event> = candidate.events.iter().cloned().collect();
        let n = events.len();
        let cap = self.config.max_cause_size.unwrap_or(n);
        let mut found: Vec<(BTreeSet<Event>, CfOutcome)> = Vec::new();
        for k in 1..=n.min(cap) {
            let level: Vec<BTreeSet<Event>> = combinations(n, k)
                .map(|idx| pick(&events, &idx).into_iter().collect::<BTreeSet<_>>())
                .filter(|c| !found.iter().any(|(f, _)| f.is_subset(c)))
                .collect();
            let outcomes = level
                .into_par_iter()
                .map(|c| self.check_cf(&c).map(|o| (c, o)))
                .collect::<Result<Vec<_>, Error>>()?;
            found.extend(outcomes.into_iter().filter(|(_, o)| o.passes()));
        }
        let status = if cap < n {
            Status::BoundedOut
        } else if found.is_empty() {
            Status::NoActualCause
        } else {
            Status::Found
        };
        let causes = found
            .into_iter()
            .map(|(c, o)| self.entry(c, o))
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(self.report(candidate, causes, status, start))
    }

    fn entry(&self, events: BTreeSet<Event>, o: CfOutcome) -> Result<Cause, Error> {
        let verified = match self.verify_actual_cause(&events) {
            Ok(v) => v,
            Err(Error::TooLarge(why)) => {
                log::warn!("cause {} left unverified: {why}", crate::model::render_events(&events));
                false
            }
            Err(e) => return Err(e),
        };
        Ok(Cause {
            events,
            contingency: o.contingency(),
            verified,
        })
    }

    fn report(&self, candidate: &CandidateSet, causes: Vec<Cause>, status: Status, start: Instant) -> CauseReport {
        CauseReport {
            candidate: candidate.clone(),
            causes,
            status,
            stats: Stats {
                subsets_checked: self.checked.load(Ordering::Relaxed),
                time_ms: start.elapsed().as_millis() as u64,
            },
        }
    }

    /// SAT, CF and MIN checked directly: CF tries every non-empty subset of the
    /// cause with every contingency over the controllable output events.
    pub fn verify_actual_cause(&self, cause: &BTreeSet<Event>) -> Result<bool, Error> {
        let gamma = self.counterexample();
        let ap = gamma.alphabet();
        if cause.is_empty()
            || !gamma.satisfies(cause)
            || cause.iter().any(|e| ap.kind(&e.prop) != Some(PropKind::Input))
        {
            return Ok(false);
        }
        if cause.len() > VERIFY_MAX_CAUSE {
            return Err(Error::TooLarge(format!(
                "cause has {} events; verification enumerates at most {VERIFY_MAX_CAUSE}",
                cause.len()
            )));
        }
        let ctrl = self.machine.controllable_outputs();
        let outputs: Vec<Event> = gamma
            .output_events()
            .into_iter()
            .filter(|e| ap.bit(&e.prop).is_some_and(|b| ctrl & (1 << b) != 0))
            .collect();
        if outputs.len() > VERIFY_MAX_OUTPUT_EVENTS {
            return Err(Error::TooLarge(format!(
                "{} controllable output events; verification enumerates at most {VERIFY_MAX_OUTPUT_EVENTS}",
                outputs.len()
            )));
        }
        let events: Vec<Event> = cause.iter().cloned().collect();
        let n = events.len();
        // direct(C') for every non-empty C' ⊆ C; index n·bits
        let mut direct = BTreeMap::new();
        for idx in by_size(n, 1..=n) {
            let sub: BTreeSet<Event> = pick(&events, &idx).into_iter().collect();
            direct.insert(idx, self.repairable(&sub, &outputs)?);
        }
        let full: Vec<usize> = (0..n).collect();
        let cf = direct.values().any(|&d| d);
        // a proper subset S satisfies CF iff some non-empty C' ⊆ S is repairable
        let min = !direct.iter().any(|(idx, &d)| d && *idx != full);
        Ok(cf && min)
    }

    /// Whether some contingency over `outputs` repairs the property after
    /// flipping `cause`. Traces are intervened independently, so each trace's
    /// reachable counterfactuals are collected first and then combined.
    fn repairable(&self, cause: &BTreeSet<Event>, outputs: &[Event]) -> Result<bool, Error> {
        let gamma = self.counterexample();
        let vars: Vec<&str> = gamma.vars().collect();
        let mut options: Vec<Vec<Lasso>> = Vec::with_capacity(vars.len());
        for var in &vars {
            let mine: Vec<Event> = outputs.iter().filter(|e| e.trace == *var).cloned().collect();
            let aut = self.intervener.automaton(var).expect("trace of the counterexample");
            let mut seen = HashSet::new();
            let mut reach = Vec::new();
            for idx in by_size(mine.len(), 0..=mine.len()) {
                let w = pick(&mine, &idx);
                let word = self.intervener.word(var, cause, &w)?;
                let t = aut.run(&word);
                if seen.insert(t.clone()) {
                    reach.push(t);
                }
            }
            options.push(reach);
        }
        let (phi, _) = zip(&self.formula, gamma)?;
        let mut choice = vec![0usize; vars.len()];
        loop {
            let traces = vars
                .iter()
                .zip(&choice)
                .enumerate()
                .map(|(i, (v, &c))| (v.to_string(), options[i][c].clone()))
                .collect();
            let cand = Counterexample::new(gamma.alphabet().clone(), traces);
            let (_, zt) = zip(&self.formula, &cand)?;
            if eval_ltl(zt.alphabet(), zt.lasso(), &phi) {
                return Ok(true);
            }
            // odometer over the per-trace options
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(false);
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

/// A length covering every combination of folded positions of the lassos.
fn alignment_horizon<'a>(lassos: impl Iterator<Item = &'a Lasso>) -> usize {
    let (p, q) = lassos.fold((0, 1), |(p, q), t| (p.max(t.loop_start()), lcm(q, t.period().len())));
    p + q
}

/// Output events of `gamma` whose proposition takes a different value in
/// `other` at some position of the infinite word folding onto the event.
pub fn differing_outputs(gamma: &Counterexample, other: &Counterexample) -> BTreeSet<Event> {
    let ap = gamma.alphabet();
    let mask = ap.mask_of(PropKind::Output);
    let mut sites = HashSet::new();
    for (var, t) in gamma.traces() {
        let Some(u) = other.trace(var) else { continue };
        for n in 0..alignment_horizon([t, u].into_iter()) {
            let diff = (t.at(n) ^ u.at(n)) & mask;
            if diff != 0 {
                for b in 0..ap.len() {
                    if diff & (1 << b) != 0 {
                        sites.insert((var.clone(), ap.get(b).name.clone(), t.fold(n)));
                    }
                }
            }
        }
    }
    gamma
        .output_events()
        .into_iter()
        .filter(|e| sites.contains(&(e.trace.clone(), e.prop.clone(), e.position)))
        .collect()
}

/// `Explainer::compute_contingency` as a free function.
pub fn compute_contingency(
    machine: &MooreMachine,
    formula: &HyperFormula,
    cex: &Counterexample,
    cause: &BTreeSet<Event>,
    config: Config,
) -> Result<Option<BTreeSet<Event>>, Error> {
    Explainer::new(machine, formula, cex, config)?.compute_contingency(cause)
}

pub fn check_cf(
    machine: &MooreMachine,
    formula: &HyperFormula,
    cex: &Counterexample,
    cause: &BTreeSet<Event>,
    config: Config,
) -> Result<CfOutcome, Error> {
    Explainer::new(machine, formula, cex, config)?.check_cf(cause)
}

pub fn actual_cause(
    machine: &MooreMachine,
    formula: &HyperFormula,
    cex: &Counterexample,
    candidate: &CandidateSet,
    config: Config,
) -> Result<CauseReport, Error> {
    Explainer::new(machine, formula, cex, config)?.actual_cause(candidate)
}

pub fn all_minimal_causes(
    machine: &MooreMachine,
    formula: &HyperFormula,
    cex: &Counterexample,
    candidate: &CandidateSet,
    config: Config,
) -> Result<CauseReport, Error> {
    Explainer::new(machine, formula, cex, config)?.all_minimal_causes(candidate)
}

pub fn verify_actual_cause(
    machine: &MooreMachine,
    formula: &HyperFormula,
    cex: &Counterexample,
    cause: &BTreeSet<Event>,
) -> Result<bool, Error> {
    Explainer::new(machine, formula, cex, Config::default())?.verify_actual_cause(cause)
}

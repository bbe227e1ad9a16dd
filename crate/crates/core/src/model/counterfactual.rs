//! Counterfactual automata: a chain of copies of a machine, indexed by the
//! positions of one trace, with auxiliary inputs `o^C` that force output `o` back
//! to its value on that trace.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::alphabet::{Letter, PropKind};
use super::counterexample::Counterexample;
use super::event::{Event, Polarity};
use super::lasso::Lasso;
use super::machine::{MooreMachine, TraceDiagnostic};
use super::ModelError;

/// A configuration `(state, copy)` of a counterfactual automaton.
pub type Config = (usize, usize);

#[derive(Debug, Clone)]
pub struct CounterfactualAutomaton<'m> {
    machine: &'m MooreMachine,
    source: Lasso,
}

/// An input word for a counterfactual automaton, periodic in the copy index:
/// at copy `k` the automaton reads `inputs[k]` and the auxiliary inputs
/// `aux[k]`, where `aux` holds one output bit per raised `o^C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterfactualWord {
    pub inputs: Vec<Letter>,
    pub aux: Vec<Letter>,
}

/// One transition of the reachable fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: Config,
    pub inputs: Letter,
    pub aux: Letter,
    pub to: Config,
}

impl<'m> CounterfactualAutomaton<'m> {
    pub fn new(machine: &'m MooreMachine, source: Lasso) -> Result<Self, ModelError> {
        if let TraceDiagnostic::Rejected { position, reason } = machine.validate_trace(&source) {
            return Err(ModelError::InvalidTrace {
                trace: "<source>".into(),
                position,
                reason,
            });
        }
        Ok(CounterfactualAutomaton { machine, source })
    }

    pub fn machine(&self) -> &MooreMachine {
        self.machine
    }

    pub fn source(&self) -> &Lasso {
        &self.source
    }

    /// Number of copies, `|u|+|v|`.
    pub fn copies(&self) -> usize {
        self.source.len()
    }

    pub fn next_copy(&self, k: usize) -> usize {
        self.source.succ(k)
    }

    pub fn initial(&self) -> Config {
        (self.machine.initial(), 0)
    }

    /// Outputs whose `o^C` input has an effect.
    pub fn controllable(&self) -> Letter {
        self.machine.controllable_outputs()
    }

    /// The transition function: the base successor, with every output whose
    /// auxiliary input is raised reset to its value on the source trace at the
    /// successor copy.
    pub fn step(&self, (s, k): Config, inputs: Letter, aux: Letter) -> Config {
        let k2 = self.next_copy(k);
        let mut s2 = self.machine.step(s, inputs);
        let forced = aux & self.controllable();
        if forced != 0 {
            let base = self.machine.label(s2);
            let want = (base & !forced) | (self.source.at(k2) & forced);
            if want != base {
                // unique by construction of the controllable set
                s2 = self.machine.states_with_label(want)[0];
            }
        }
        (s2, k2)
    }

    /// Letter emitted in a configuration, projected to the machine alphabet.
    pub fn emit(&self, (s, k): Config, word: &CounterfactualWord) -> Letter {
        (word.inputs[k] & self.machine.input_mask()) | self.machine.label(s)
    }

    /// The (projected) trace produced by a copy-periodic input word.
    pub fn run(&self, word: &CounterfactualWord) -> Lasso {
        Lasso::from_recurrence(self.initial(), |&c| {
            let letter = self.emit(c, word);
            (letter, self.step(c, word.inputs[c.1], word.aux[c.1]))
        })
    }

    /// The input word that reproduces the source trace.
    pub fn identity_word(&self) -> CounterfactualWord {
        let mask = self.machine.input_mask();
        CounterfactualWord {
            inputs: self.source.letters().map(|l| l & mask).collect(),
            aux: vec![0; self.copies()],
        }
    }

    /// Every transition reachable from the initial configuration, over all input
    /// and auxiliary valuations.
    pub fn edges(&self) -> BTreeSet<Edge> {
        let ni = self.machine.num_inputs();
        let ctrl = self.controllable();
        let mut edges = BTreeSet::new();
        let mut seen = HashSet::from([self.initial()]);
        let mut queue = VecDeque::from([self.initial()]);
        while let Some(c) = queue.pop_front() {
            for x in 0..(1u64 << ni) {
                let mut a = ctrl;
                loop {
                    let to = self.step(c, x, a);
                    edges.insert(Edge {
                        from: c,
                        inputs: x,
                        aux: a,
                        to,
                    });
                    if seen.insert(to) {
                        queue.push_back(to);
                    }
                    if a == 0 {
                        break;
                    }
                    a = (a - 1) & ctrl;
                }
            }
        }
        edges
    }
}

/// Applies interventions to a fixed counterexample; counterfactual automata are
/// built once per trace.
#[derive(Debug, Clone)]
pub struct Intervener<'m> {
    cex: Counterexample,
    automata: BTreeMap<String, CounterfactualAutomaton<'m>>,
}

impl<'m> Intervener<'m> {
    pub fn new(machine: &'m MooreMachine, cex: &Counterexample) -> Result<Self, ModelError> {
        cex.validate(machine)?;
        let automata = cex
            .traces()
            .iter()
            .map(|(v, t)| Ok((v.clone(), CounterfactualAutomaton::new(machine, t.clone())?)))
            .collect::<Result<_, ModelError>>()?;
        Ok(Intervener {
            cex: cex.clone(),
            automata,
        })
    }

    pub fn counterexample(&self) -> &Counterexample {
        &self.cex
    }

    pub fn automaton(&self, var: &str) -> Option<&CounterfactualAutomaton<'m>> {
        self.automata.get(var)
    }

    fn check_event(&self, e: &Event, kind: PropKind) -> Result<usize, ModelError> {
        let ap = self.cex.alphabet();
        let t = self
            .cex
            .trace(&e.trace)
            .ok_or_else(|| ModelError::UnknownTrace(e.trace.clone()))?;
        if e.position >= t.len() {
            return Err(ModelError::PositionOutOfRange {
                trace: e.trace.clone(),
                position: e.position,
                len: t.len(),
            });
        }
        let bit = ap
            .bit(&e.prop)
            .ok_or_else(|| ModelError::UnknownProp(e.prop.clone()))?;
        if ap.get(bit).kind != kind {
            return Err(ModelError::WrongEventKind {
                event: e.to_string(),
                expected: kind,
            });
        }
        Ok(bit)
    }

    /// The counterfactual input word for one trace: cause literals flipped at their
    /// positions, `o^C` raised on every transition entering a contingency position.
    pub fn word<'a>(
        &self,
        var: &str,
        cause: impl IntoIterator<Item = &'a Event>,
        contingency: impl IntoIterator<Item = &'a Event>,
    ) -> Result<CounterfactualWord, ModelError> {
        let aut = self
            .automata
            .get(var)
            .ok_or_else(|| ModelError::UnknownTrace(var.to_string()))?;
        let mut word = aut.identity_word();
        for e in cause.into_iter().filter(|e| e.trace == var) {
            let bit = self.check_event(e, PropKind::Input)?;
            match e.polarity {
                Polarity::Positive => word.inputs[e.position] &= !(1 << bit),
                Polarity::Negative => word.inputs[e.position] |= 1 << bit,
            }
        }
        let mut entering = vec![0; aut.copies()];
        for e in contingency.into_iter().filter(|e| e.trace == var) {
            let bit = self.check_event(e, PropKind::Output)?;
            entering[e.position] |= 1 << bit;
        }
        for k in 0..aut.copies() {
            word.aux[k] = entering[aut.next_copy(k)];
        }
        Ok(word)
    }

    /// `intervene(Γ, C, W)`; traces not touched by any event are returned as is.
    pub fn apply(
        &self,
        cause: &BTreeSet<Event>,
        contingency: &BTreeSet<Event>,
    ) -> Result<Counterexample, ModelError> {
        for e in cause.iter().chain(contingency) {
            if !self.automata.contains_key(&e.trace) {
                return Err(ModelError::UnknownTrace(e.trace.clone()));
            }
        }
        let mut out = self.cex.clone();
        for (var, aut) in &self.automata {
            let touched = cause.iter().chain(contingency).any(|e| &e.trace == var);
            if !touched {
                continue;
            }
            let word = self.word(var, cause, contingency)?;
            out.traces_mut().insert(var.clone(), aut.run(&word));
        }
        Ok(out)
    }
}

/// `intervene(Γ, C, W)` on a machine and counterexample.
pub fn intervene(
    machine: &MooreMachine,
    cex: &Counterexample,
    cause: &BTreeSet<Event>,
    contingency: &BTreeSet<Event>,
) -> Result<Counterexample, ModelError> {
    Intervener::new(machine, cex)?.apply(cause, contingency)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{running_counterexample, running_example};

    fn set(v: &[Event]) -> BTreeSet<Event> {
        v.iter().cloned().collect()
    }

    #[test]
    fn flipping_the_first_high_input_of_t2() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let out = intervene(&m, &cex, &set(&[Event::pos("hi", 0, "t2")]), &BTreeSet::new()).unwrap();
        assert_eq!(out.trace("t1"), cex.trace("t1"));
        assert_eq!(
            out.trace("t2").unwrap().render(m.alphabet()),
            "{} {hi,lo} {ho} ({ho,lo})^w"
        );
    }

    #[test]
    fn contingency_restores_lo_at_position_two() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let out = intervene(
            &m,
            &cex,
            &set(&[Event::pos("hi", 0, "t2")]),
            &set(&[Event::pos("lo", 2, "t2")]),
        )
        .unwrap();
        // canonical form of {} {hi,lo} {ho,lo} ({ho,lo})^ω
        assert_eq!(
            out.trace("t2").unwrap().render(m.alphabet()),
            "{} {hi,lo} ({ho,lo})^w"
        );
        let expected = Lasso::new(
            vec![0, m.alphabet().letter(["hi", "lo"]).unwrap(), m.alphabet().letter(["ho", "lo"]).unwrap()],
            vec![m.alphabet().letter(["ho", "lo"]).unwrap()],
        )
        .unwrap();
        assert!(out.trace("t2").unwrap().same_word(&expected));
    }

    #[test]
    fn empty_intervention_is_identity() {
        let m = running_example();
        let cex = running_counterexample(&m);
        assert_eq!(intervene(&m, &cex, &BTreeSet::new(), &BTreeSet::new()).unwrap(), cex);
    }

    #[test]
    fn unknown_trace_and_range_errors() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let e = intervene(&m, &cex, &set(&[Event::pos("hi", 0, "t9")]), &BTreeSet::new());
        assert!(matches!(e, Err(ModelError::UnknownTrace(_))));
        let e = intervene(&m, &cex, &set(&[Event::pos("hi", 3, "t2")]), &BTreeSet::new());
        assert!(matches!(e, Err(ModelError::PositionOutOfRange { .. })));
        let e = intervene(&m, &cex, &set(&[Event::pos("lo", 1, "t1")]), &BTreeSet::new());
        assert!(matches!(e, Err(ModelError::WrongEventKind { .. })));
    }

    #[test]
    fn identity_word_reproduces_source() {
        let m = running_example();
        let cex = running_counterexample(&m);
        for t in cex.traces().values() {
            let aut = CounterfactualAutomaton::new(&m, t.clone()).unwrap();
            assert!(aut.run(&aut.identity_word()).same_word(t));
        }
    }


    mod props {
        use proptest::prelude::*;
        use rand::Rng;

        use super::*;
        use crate::fixtures::random::{self, Limits};
        use crate::model::PropKind;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn identity_word_reproduces_the_trace(seed in any::<u64>()) {
                let inst = random::instance(seed, Limits::default());
                let x = Intervener::new(&inst.machine, &inst.cex).unwrap();
                for (var, t) in inst.cex.traces() {
                    let aut = x.automaton(var).unwrap();
                    prop_assert!(aut.run(&aut.identity_word()).same_word(t));
                }
                prop_assert_eq!(&x.apply(&BTreeSet::new(), &BTreeSet::new()).unwrap(), &inst.cex);
            }

            #[test]
            fn flipping_twice_restores_the_inputs(seed in any::<u64>()) {
                let inst = random::instance(seed, Limits::default());
                let mut rng = random::rng(!seed);
                let cause: BTreeSet<Event> =
                    inst.cex.input_events().into_iter().filter(|_| rng.gen_bool(0.3)).collect();
                let once = intervene(&inst.machine, &inst.cex, &cause, &BTreeSet::new()).unwrap();
                let input = |l: u64| l & inst.machine.input_mask();
                for var in inst.cex.vars() {
                    let (a, b) = (inst.cex.trace(var).unwrap(), once.trace(var).unwrap());
                    prop_assume!(a.loop_start() == b.loop_start() && a.len() == b.len());
                }
                let back: BTreeSet<Event> = cause
                    .iter()
                    .map(|e| Event::new(e.polarity.flip(), &e.prop, e.position, &e.trace))
                    .collect();
                prop_assert!(once.satisfies(&back));
                let twice = intervene(&inst.machine, &once, &back, &BTreeSet::new()).unwrap();
                for (var, t) in inst.cex.traces() {
                    prop_assert!(twice.trace(var).unwrap().map(input).same_word(&t.map(input)));
                    prop_assert!(twice.trace(var).unwrap().same_word(t));
                }
                prop_assert_eq!(inst.cex.events(PropKind::Input).len(), twice.events(PropKind::Input).len());
            }
        }
    }
}

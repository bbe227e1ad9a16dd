use std::collections::{HashMap, VecDeque};

use log::warn;

use super::alphabet::{Alphabet, AtomicProp, Letter, PropKind};
use super::guard::Guard;
use super::lasso::Lasso;
use super::ModelError;

/// Largest input count for which the transition table is materialized.
pub const MAX_INPUTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub id: String,
    /// Output bits, positioned as in the machine's alphabet.
    pub label: Letter,
}

/// An explicit deterministic, total Moore machine.
///
/// Inputs occupy the low bits of the alphabet, outputs the bits above them, so
/// an input set is simply `letter & input_mask`.
#[derive(Debug, Clone)]
pub struct MooreMachine {
    ap: Alphabet,
    num_inputs: usize,
    states: Vec<State>,
    initial: usize,
    /// `succ[s][x]` for every input valuation `x` in `0..2^|I|`.
    succ: Vec<Vec<usize>>,
    by_label: HashMap<Letter, Vec<usize>>,
    controllable: Letter,
}

/// Outcome of checking a lasso against a machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceDiagnostic {
    Accepted,
    Rejected { position: usize, reason: String },
}

impl TraceDiagnostic {
    pub fn is_accepted(&self) -> bool {
        matches!(self, TraceDiagnostic::Accepted)
    }
}

impl MooreMachine {
    /// Builds a machine from an explicit successor table indexed by input valuation.
    pub fn from_table(
        inputs: Vec<String>,
        outputs: Vec<String>,
        states: Vec<(String, Vec<String>)>,
        initial: usize,
        succ: Vec<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        let num_inputs = inputs.len();
        if num_inputs > MAX_INPUTS {
            return Err(ModelError::TooManyInputs(num_inputs));
        }
        let props = inputs
            .into_iter()
            .map(|name| AtomicProp {
                name,
                kind: PropKind::Input,
            })
            .chain(outputs.into_iter().map(|name| AtomicProp {
                name,
                kind: PropKind::Output,
            }))
            .collect();
        let ap = Alphabet::new(props).map_err(ModelError::Alphabet)?;
        let mut seen = HashMap::new();
        let mut built = Vec::with_capacity(states.len());
        for (i, (id, label)) in states.into_iter().enumerate() {
            if seen.insert(id.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(id));
            }
            let mut l = 0;
            for name in &label {
                match ap.kind(name) {
                    Some(PropKind::Output) => l |= 1 << ap.bit(name).unwrap(),
                    Some(PropKind::Input) => {
                        return Err(ModelError::LabelNotOutput {
                            state: id,
                            prop: name.clone(),
                        })
                    }
                    None => return Err(ModelError::UnknownProp(name.clone())),
                }
            }
            built.push(State { id, label: l });
        }
        if initial >= built.len() {
            return Err(ModelError::UnknownState(format!("#{initial}")));
        }
        if succ.len() != built.len() {
            return Err(ModelError::Table(format!(
                "{} rows for {} states",
                succ.len(),
                built.len()
            )));
        }
        for (s, row) in succ.iter().enumerate() {
            if row.len() != 1 << num_inputs {
                return Err(ModelError::Table(format!(
                    "state `{}` has {} successors, expected {}",
                    built[s].id,
                    row.len(),
                    1usize << num_inputs
                )));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= built.len()) {
                return Err(ModelError::UnknownState(format!("#{t}")));
            }
        }
        let mut by_label: HashMap<Letter, Vec<usize>> = HashMap::new();
        for (i, s) in built.iter().enumerate() {
            by_label.entry(s.label).or_default().push(i);
        }
        let mut m = MooreMachine {
            ap,
            num_inputs,
            states: built,
            initial,
            succ,
            by_label,
            controllable: 0,
        };
        let (controllable, excluded) = m.compute_controllable();
        if !excluded.is_empty() {
            warn!(
                "labeling is not injective over all output overrides; contingencies exclude {}",
                excluded.join(", ")
            );
        }
        m.controllable = controllable;
        Ok(m)
    }

    /// Builds a machine from guarded transitions, checking that for every state
    /// and input valuation exactly one guard holds.
    pub fn from_guards(
        inputs: Vec<String>,
        outputs: Vec<String>,
        states: Vec<(String, Vec<String>)>,
        initial: &str,
        transitions: Vec<(String, Guard, String)>,
    ) -> Result<Self, ModelError> {
        let ids: HashMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (id.as_str(), i))
            .collect();
        let init = *ids
            .get(initial)
            .ok_or_else(|| ModelError::UnknownState(initial.to_string()))?;
        let input_ap = Alphabet::new(
            inputs
                .iter()
                .map(|n| AtomicProp {
                    name: n.clone(),
                    kind: PropKind::Input,
                })
                .collect(),
        )
        .map_err(ModelError::Alphabet)?;
        if inputs.len() > MAX_INPUTS {
            return Err(ModelError::TooManyInputs(inputs.len()));
        }
        let mut by_state: Vec<Vec<(&Guard, usize)>> = vec![Vec::new(); states.len()];
        for (from, guard, to) in &transitions {
            let f = *ids
                .get(from.as_str())
                .ok_or_else(|| ModelError::UnknownState(from.clone()))?;
            let t = *ids
                .get(to.as_str())
                .ok_or_else(|| ModelError::UnknownState(to.clone()))?;
            let mut vars = Vec::new();
            guard.vars(&mut vars);
            if let Some(v) = vars.into_iter().find(|v| input_ap.bit(v).is_none()) {
                return Err(ModelError::GuardNotOverInputs {
                    state: from.clone(),
                    prop: v,
                });
            }
            by_state[f].push((guard, t));
        }
        let mut succ = Vec::with_capacity(states.len());
        for (s, outgoing) in by_state.iter().enumerate() {
            let mut row = Vec::with_capacity(1 << inputs.len());
            for x in 0..(1u64 << inputs.len()) {
                let mut hits = Vec::new();
                for (g, t) in outgoing {
                    if g.eval(&input_ap, x)? {
                        hits.push(*t);
                    }
                }
                match hits.as_slice() {
                    [t] => row.push(*t),
                    _ => {
                        return Err(ModelError::NotDeterministicTotal {
                            state: states[s].0.clone(),
                            inputs: input_ap.render(x),
                            matches: hits.len(),
                        })
                    }
                }
            }
            succ.push(row);
        }
        Self::from_table(inputs, outputs, states, init, succ)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.ap
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.ap.len() - self.num_inputs
    }

    pub fn input_mask(&self) -> Letter {
        (1u64 << self.num_inputs) - 1
    }

    pub fn output_mask(&self) -> Letter {
        self.ap.full_mask() & !self.input_mask()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s.id == id)
    }

    pub fn label(&self, s: usize) -> Letter {
        self.states[s].label
    }

    /// Successor of `s` on the inputs contained in `letter` (other bits are ignored).
    pub fn step(&self, s: usize, letter: Letter) -> usize {
        self.succ[s][(letter & self.input_mask()) as usize]
    }

    pub fn states_with_label(&self, label: Letter) -> &[usize] {
        self.by_label.get(&label).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Outputs that contingencies may override without making the successor ambiguous.
    pub fn controllable_outputs(&self) -> Letter {
        self.controllable
    }

    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        let mut order = Vec::new();
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for &t in &self.succ[s] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// The trace produced by an input lasso.
    pub fn run(&self, inputs: &Lasso) -> Result<Lasso, ModelError> {
        if let Some(l) = inputs.letters().find(|l| l & !self.input_mask() != 0) {
            return Err(ModelError::NotAnInputWord(self.ap.render(l)));
        }
        Ok(Lasso::from_recurrence((self.initial, 0usize), |&(s, i)| {
            let x = inputs.at(i);
            (x | self.label(s), (self.step(s, x), inputs.succ(i)))
        }))
    }

    /// The states visited by the trace `t`, as (state, position-in-lasso) pairs in
    /// visiting order, until the pair sequence cycles. Assumes `t` is a trace.
    pub fn state_walk(&self, t: &Lasso) -> Vec<(usize, usize)> {
        let mut seen = std::collections::HashSet::new();
        let mut walk = Vec::new();
        let (mut s, mut i) = (self.initial, 0usize);
        while seen.insert((s, i)) {
            walk.push((s, i));
            s = self.step(s, t.at(i));
            i = t.succ(i);
        }
        walk
    }

    /// Checks whether `t` is a trace of the machine; reports the first inconsistent position.
    pub fn validate_trace(&self, t: &Lasso) -> TraceDiagnostic {
        let full = self.ap.full_mask();
        let mut seen = std::collections::HashSet::new();
        let (mut s, mut i, mut n) = (self.initial, 0usize, 0usize);
        while seen.insert((s, i)) {
            let letter = t.at(i);
            if letter & !full != 0 {
                return TraceDiagnostic::Rejected {
                    position: n,
                    reason: "letter contains propositions outside the machine alphabet".into(),
                };
            }
            let expected = self.label(s);
            let got = letter & self.output_mask();
            if got != expected {
                return TraceDiagnostic::Rejected {
                    position: n,
                    reason: format!(
                        "state `{}` emits {} but the trace has {}",
                        self.states[s].id,
                        self.ap.render(expected),
                        self.ap.render(got)
                    ),
                };
            }
            s = self.step(s, letter);
            i = t.succ(i);
            n += 1;
        }
        TraceDiagnostic::Accepted
    }

    /// Largest output subset `Q` such that every state reachable under overrides of
    /// `Q`-values has every changed label matched by exactly one state. Among subsets
    /// of equal size the lexicographically least by sorted output name wins.
    fn compute_controllable(&self) -> (Letter, Vec<String>) {
        let outs: Vec<usize> = (self.num_inputs..self.ap.len()).collect();
        let mut best: Option<(Letter, Vec<&str>)> = None;
        for sub in 0u64..(1 << outs.len()) {
            let mask = outs
                .iter()
                .enumerate()
                .filter(|(i, _)| sub & (1 << i) != 0)
                .fold(0, |m, (_, &b)| m | (1u64 << b));
            if !self.overrides_unambiguous(mask) {
                continue;
            }
            let mut names: Vec<&str> = self.ap.names(mask);
            names.sort_unstable();
            let better = match &best {
                None => true,
                Some((bm, bn)) => {
                    mask.count_ones() > bm.count_ones()
                        || (mask.count_ones() == bm.count_ones() && names < *bn)
                }
            };
            if better {
                best = Some((mask, names));
            }
        }
        let mask = best.map(|b| b.0).unwrap_or(0);
        let excluded = self
            .ap
            .names(self.output_mask() & !mask)
            .into_iter()
            .map(String::from)
            .collect();
        (mask, excluded)
    }

    fn overrides_unambiguous(&self, mask: Letter) -> bool {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            let mut targets: Vec<usize> = self.succ[s].clone();
            targets.sort_unstable();
            targets.dedup();
            for t in targets {
                let mut next = vec![t];
                let base = self.label(t);
                // enumerate sub-masks of `mask`: every label agreeing with `base` outside `mask`
                let mut v = mask;
                loop {
                    let l = (base & !mask) | v;
                    if l != base {
                        match self.states_with_label(l) {
                            [one] => next.push(*one),
                            _ => return false,
                        }
                    }
                    if v == 0 {
                        break;
                    }
                    v = (v - 1) & mask;
                }
                for n in next {
                    if !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running_example;

    #[test]
    fn running_example_traces() {
        let m = running_example();
        let ap = m.alphabet();
        let none = Lasso::new(vec![], vec![0]).unwrap();
        let t1 = m.run(&none).unwrap();
        assert_eq!(t1.render(ap), "{} {lo} ({ho,lo})^w");
        let hi = ap.letter(["hi"]).unwrap();
        let t2 = m.run(&Lasso::new(vec![hi, hi], vec![0]).unwrap()).unwrap();
        assert_eq!(t2.render(ap), "{hi} {hi,ho} ({ho,lo})^w");
    }

    #[test]
    fn constant_machine_echoes_inputs() {
        let m = MooreMachine::from_table(
            vec!["i".into()],
            vec!["o".into()],
            vec![("s".into(), vec!["o".into()])],
            0,
            vec![vec![0, 0]],
        )
        .unwrap();
        let t = m.run(&Lasso::new(vec![1], vec![0, 1]).unwrap()).unwrap();
        assert!(t.letters().all(|l| l & 0b10 != 0));
        assert_eq!(t.at(0) & 1, 1);
        assert_eq!(t.at(1) & 1, 0);
    }

    #[test]
    fn validate_detects_label_mismatch() {
        let m = running_example();
        let ap = m.alphabet();
        let t1 = m.run(&Lasso::new(vec![], vec![0]).unwrap()).unwrap();
        assert!(m.validate_trace(&t1).is_accepted());
        let lo = ap.letter(["lo"]).unwrap();
        let broken = Lasso::new(
            vec![t1.at(0), t1.at(1) & !lo],
            vec![t1.at(2)],
        )
        .unwrap();
        match m.validate_trace(&broken) {
            TraceDiagnostic::Rejected { position, .. } => assert_eq!(position, 1),
            d => panic!("expected rejection, got {d:?}"),
        }
    }

    #[test]
    fn nondeterministic_guards_are_rejected() {
        let err = MooreMachine::from_guards(
            vec!["a".into()],
            vec![],
            vec![("s".into(), vec![]), ("t".into(), vec![])],
            "s",
            vec![
                ("s".into(), Guard::parse("true").unwrap(), "t".into()),
                ("s".into(), Guard::parse("a").unwrap(), "s".into()),
                ("t".into(), Guard::parse("true").unwrap(), "t".into()),
            ],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ModelError::NotDeterministicTotal { ref state, matches: 2, .. } if state == "s"
        ));
    }

    #[test]
    fn partial_guards_are_rejected() {
        let err = MooreMachine::from_guards(
            vec!["a".into()],
            vec![],
            vec![("s".into(), vec![])],
            "s",
            vec![("s".into(), Guard::parse("a").unwrap(), "s".into())],
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::NotDeterministicTotal { matches: 0, .. }));
    }

    #[test]
    fn running_example_controls_every_output() {
        let m = running_example();
        assert_eq!(m.controllable_outputs(), m.output_mask());
    }

    #[test]
    fn shared_labels_shrink_the_controllable_set() {
        // p and s alternate; q and r are unreachable and share label {a}, so
        // overriding `a` is ambiguous while overriding `b` is not.
        let m = MooreMachine::from_table(
            vec!["i".into()],
            vec!["a".into(), "b".into()],
            vec![
                ("p".into(), vec![]),
                ("s".into(), vec!["b".into()]),
                ("q".into(), vec!["a".into()]),
                ("r".into(), vec!["a".into()]),
            ],
            0,
            vec![vec![1, 1], vec![0, 0], vec![0, 0], vec![0, 0]],
        )
        .unwrap();
        let b = m.alphabet().letter(["b"]).unwrap();
        assert_eq!(m.controllable_outputs(), b);
    }


    mod props {
        use proptest::prelude::*;
        use rand::Rng;

        use crate::fixtures::random;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]

            #[test]
            fn runs_are_total_deterministic_and_valid(seed in any::<u64>()) {
                let mut rng = random::rng(seed);
                let (s, i, o) = (rng.gen_range(1..=16), rng.gen_range(1..=3), rng.gen_range(1..=3));
                let m = random::machine(&mut rng, s, i, o);
                let inputs = random::input_lasso(&mut rng, &m, 6);
                let t = m.run(&inputs).unwrap();
                prop_assert_eq!(&m.run(&inputs).unwrap(), &t);
                prop_assert!(m.validate_trace(&t).is_accepted());
                // the trace's input word is the given one, as an ω-word
                prop_assert!(t.map(|l| l & m.input_mask()).same_word(&inputs));
            }
        }
    }
}

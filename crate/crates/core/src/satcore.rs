//! Candidate causes: per-step unsatisfiable cores of the input literals that force
//! each transition of a counterexample trace, joined with the input literals the
//! violation's accepting run reads.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::alternating::{annotated_events, ltl_to_alternating, AnnotationPolicy};
use crate::logic::{negate_to_nnf, zip, HyperFormula};
use crate::model::{Counterexample, Event, Letter, MooreMachine, Polarity, PropKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("state `{to}` is not a successor of state `{from}`")]
    Unreachable { from: String, to: String },
    #[error("the assumptions are consistent with the hard constraint; no core exists")]
    Satisfiable,
}

/// The Boolean variable standing for an input event's proposition at a position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventVar {
    pub trace: String,
    pub position: usize,
    pub prop: String,
}

impl EventVar {
    pub fn literal(&self, value: bool) -> Event {
        Event::new(Polarity::of(value), &self.prop, self.position, &self.trace)
    }
}

impl fmt::Display for EventVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c({},{},{})", self.prop, self.position, self.trace)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropFormula {
    Const(bool),
    Var(EventVar),
    Not(Box<PropFormula>),
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
}

impl PropFormula {
    pub fn eval(&self, value: &impl Fn(&EventVar) -> bool) -> bool {
        match self {
            PropFormula::Const(b) => *b,
            PropFormula::Var(v) => value(v),
            PropFormula::Not(a) => !a.eval(value),
            PropFormula::And(xs) => xs.iter().all(|x| x.eval(value)),
            PropFormula::Or(xs) => xs.iter().any(|x| x.eval(value)),
        }
    }

    pub fn vars(&self) -> BTreeSet<&EventVar> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                PropFormula::Const(_) => {}
                PropFormula::Var(v) => {
                    out.insert(v);
                }
                PropFormula::Not(a) => stack.push(a),
                PropFormula::And(xs) | PropFormula::Or(xs) => stack.extend(xs),
            }
        }
        out
    }

    fn conj(mut xs: Vec<PropFormula>) -> PropFormula {
        match xs.len() {
            0 => PropFormula::Const(true),
            1 => xs.pop().unwrap(),
            _ => PropFormula::And(xs),
        }
    }

    fn disj(mut xs: Vec<PropFormula>) -> PropFormula {
        match xs.len() {
            0 => PropFormula::Const(false),
            1 => xs.pop().unwrap(),
            _ => PropFormula::Or(xs),
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[PropFormula], op: &str| {
            f.write_str("(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(op)?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        };
        match self {
            PropFormula::Const(b) => write!(f, "{b}"),
            PropFormula::Var(v) => write!(f, "{v}"),
            PropFormula::Not(a) => write!(f, "!{a}"),
            PropFormula::And(xs) => join(f, xs, " & "),
            PropFormula::Or(xs) => join(f, xs, " | "),
        }
    }
}

/// An assumption: a variable fixed to a value.
pub type Assumption = (EventVar, bool);

/// `δ_n`: over the input variables of `trace` at `position`, true exactly for the
/// input sets that move `from` to `to`. A sum of prime implicants chosen by a
/// greedy cover, or `true` when every input set qualifies.
pub fn transition_constraint(
    machine: &MooreMachine,
    from: usize,
    to: usize,
    trace: &str,
    position: usize,
) -> Result<PropFormula, SatError> {
    let ni = machine.num_inputs();
    let on: Vec<Letter> = (0..1u64 << ni)
        .filter(|&x| machine.step(from, x) == to)
        .collect();
    if on.is_empty() {
        return Err(SatError::Unreachable {
            from: machine.states()[from].id.clone(),
            to: machine.states()[to].id.clone(),
        });
    }
    if on.len() == 1 << ni {
        return Ok(PropFormula::Const(true));
    }
    let var = |bit: usize| {
        PropFormula::Var(EventVar {
            trace: trace.to_string(),
            position,
            prop: machine.alphabet().get(bit).name.clone(),
        })
    };
    let full = (1u64 << ni) - 1;
    let cubes = greedy_cover(&on, &prime_implicants(&on, full));
    Ok(PropFormula::disj(
        cubes
            .into_iter()
            .map(|(value, care)| {
                PropFormula::conj(
                    (0..ni)
                        .filter(|b| care & (1 << b) != 0)
                        .map(|b| {
                            if value & (1 << b) != 0 {
                                var(b)
                            } else {
                                PropFormula::Not(Box::new(var(b)))
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    ))
}

/// Cubes are `(value, care)` with `value ⊆ care`.
fn prime_implicants(on: &[Letter], full: Letter) -> Vec<(Letter, Letter)> {
    let mut level: BTreeSet<(Letter, Letter)> = on.iter().map(|&m| (m, full)).collect();
    let mut primes = BTreeSet::new();
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        let mut merged = BTreeSet::new();
        for &(v, c) in &level {
            for b in 0..64 {
                let bit = 1u64 << b;
                if c & bit == 0 || v & bit != 0 {
                    continue;
                }
                let partner = (v | bit, c);
                if level.contains(&partner) {
                    next.insert((v, c & !bit));
                    merged.insert((v, c));
                    merged.insert(partner);
                }
            }
        }
        primes.extend(level.difference(&merged).copied());
        level = next;
    }
    primes.into_iter().collect()
}

fn greedy_cover(on: &[Letter], primes: &[(Letter, Letter)]) -> Vec<(Letter, Letter)> {
    let covers = |(v, c): (Letter, Letter), m: Letter| m & c == v;
    let mut left: BTreeSet<Letter> = on.iter().copied().collect();
    let mut chosen = Vec::new();
    while !left.is_empty() {
        let best = *primes
            .iter()
            .max_by_key(|&&p| {
                (
                    left.iter().filter(|&&m| covers(p, m)).count(),
                    std::cmp::Reverse(p),
                )
            })
            .unwrap();
        left.retain(|&m| !covers(best, m));
        chosen.push(best);
    }
    chosen.sort_unstable();
    chosen
}

// ---------------------------------------------------------------- SAT

/// Clauses over variables `1..=n`; literal `-v` is the negation of `v`.
struct Cnf {
    clauses: Vec<Vec<i32>>,
    vars: HashMap<EventVar, i32>,
    next: i32,
}

impl Cnf {
    fn new() -> Self {
        Cnf {
            clauses: Vec::new(),
            vars: HashMap::new(),
            next: 1,
        }
    }

    fn fresh(&mut self) -> i32 {
        self.next += 1;
        self.next - 1
    }

    fn var(&mut self, v: &EventVar) -> i32 {
        if let Some(&x) = self.vars.get(v) {
            return x;
        }
        let x = self.fresh();
        self.vars.insert(v.clone(), x);
        x
    }

    /// Tseitin encoding; returns a literal equivalent to `f`.
    fn encode(&mut self, f: &PropFormula) -> i32 {
        match f {
            PropFormula::Const(b) => {
                let x = self.fresh();
                self.clauses.push(vec![if *b { x } else { -x }]);
                x
            }
            PropFormula::Var(v) => self.var(v),
            PropFormula::Not(a) => -self.encode(a),
            PropFormula::And(xs) => {
                let lits: Vec<i32> = xs.iter().map(|x| self.encode(x)).collect();
                let g = self.fresh();
                for &l in &lits {
                    self.clauses.push(vec![-g, l]);
                }
                let mut c: Vec<i32> = lits.iter().map(|l| -l).collect();
                c.push(g);
                self.clauses.push(c);
                g
            }
            PropFormula::Or(xs) => {
                let lits: Vec<i32> = xs.iter().map(|x| self.encode(x)).collect();
                let g = self.fresh();
                for &l in &lits {
                    self.clauses.push(vec![g, -l]);
                }
                let mut c = lits;
                c.push(-g);
                self.clauses.push(c);
                g
            }
        }
    }

    fn solve(&self, assumptions: &[i32]) -> bool {
        let mut assign = vec![0i8; self.next as usize];
        for &a in assumptions {
            let want = if a > 0 { 1 } else { -1 };
            match assign[a.unsigned_abs() as usize] {
                0 => assign[a.unsigned_abs() as usize] = want,
                x if x != want => return false,
                _ => {}
            }
        }
        dpll(&self.clauses, &mut assign)
    }
}

fn lit_value(assign: &[i8], l: i32) -> i8 {
    let v = assign[l.unsigned_abs() as usize];
    if l > 0 {
        v
    } else {
        -v
    }
}

fn dpll(clauses: &[Vec<i32>], assign: &mut Vec<i8>) -> bool {
    let mut trail = Vec::new();
    let undo = |assign: &mut Vec<i8>, trail: &[usize]| {
        for &v in trail {
            assign[v] = 0;
        }
    };
    loop {
        let mut changed = false;
        for c in clauses {
            let mut open = None;
            let mut n_open = 0;
            let mut sat = false;
            for &l in c {
                match lit_value(assign, l) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => {
                        n_open += 1;
                        open = Some(l);
                    }
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            match n_open {
                0 => {
                    undo(assign, &trail);
                    return false;
                }
                1 => {
                    let l = open.unwrap();
                    let v = l.unsigned_abs() as usize;
                    assign[v] = if l > 0 { 1 } else { -1 };
                    trail.push(v);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let Some(v) = (1..assign.len()).find(|&v| assign[v] == 0) else {
        return true;
    };
    for val in [1, -1] {
        assign[v] = val;
        if dpll(clauses, assign) {
            return true;
        }
        assign[v] = 0;
    }
    undo(assign, &trail);
    false
}

/// Whether `hard` holds together with all assumptions.
pub fn satisfiable(hard: &PropFormula, assumptions: &[Assumption]) -> bool {
    let mut cnf = Cnf::new();
    let root = cnf.encode(hard);
    cnf.clauses.push(vec![root]);
    let lits: Vec<i32> = assumptions
        .iter()
        .map(|(v, b)| {
            let x = cnf.var(v);
            if *b {
                x
            } else {
                -x
            }
        })
        .collect();
    cnf.solve(&lits)
}

/// A subset of `assumptions` inconsistent with `hard` from which no element can
/// be dropped, found by deletion in the given order.
pub fn unsat_core(hard: &PropFormula, assumptions: &[Assumption]) -> Result<Vec<Assumption>, SatError> {
    let mut cnf = Cnf::new();
    let root = cnf.encode(hard);
    cnf.clauses.push(vec![root]);
    let lits: Vec<i32> = assumptions
        .iter()
        .map(|(v, b)| {
            let x = cnf.var(v);
            if *b {
                x
            } else {
                -x
            }
        })
        .collect();
    if cnf.solve(&lits) {
        return Err(SatError::Satisfiable);
    }
    let mut keep = vec![true; lits.len()];
    for i in 0..lits.len() {
        keep[i] = false;
        let trial: Vec<i32> = (0..lits.len()).filter(|&j| keep[j]).map(|j| lits[j]).collect();
        if cnf.solve(&trial) {
            keep[i] = true;
        }
    }
    Ok(assumptions
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(a, _)| a.clone())
        .collect())
}

// ---------------------------------------------------------------- candidates

/// The over-approximation `C̃` and where its events came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateSet {
    /// Input events only: the per-step cores joined with the input part of
    /// `formula_support`.
    pub events: BTreeSet<Event>,
    /// Core events of each `(trace, position)` step whose transition depends on
    /// the inputs.
    pub per_step_cores: BTreeMap<(String, usize), BTreeSet<Event>>,
    /// Every event annotated by the accepting run of the violation on the
    /// zipped trace, inputs and outputs alike.
    pub formula_support: BTreeSet<Event>,
}

/// Cores for every step of one trace. A step visited in several states (the
/// state sequence may be longer than the trace's finite representation)
/// contributes the union of its cores.
fn trace_cores(
    machine: &MooreMachine,
    var: &str,
    cex: &Counterexample,
) -> Result<Vec<((String, usize), BTreeSet<Event>)>, SatError> {
    let t = cex.trace(var).expect("trace of the counterexample");
    let ap = machine.alphabet();
    let walk = machine.state_walk(t);
    let mut steps: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(s, k) in &walk {
        steps.insert((k, s));
    }
    let mut out: BTreeMap<usize, BTreeSet<Event>> = BTreeMap::new();
    for (k, s) in steps {
        let s2 = machine.step(s, t.at(k));
        let delta = transition_constraint(machine, s, s2, var, k)?;
        let hard = PropFormula::Not(Box::new(delta));
        let assumptions: Vec<Assumption> = (0..machine.num_inputs())
            .map(|b| {
                (
                    EventVar {
                        trace: var.to_string(),
                        position: k,
                        prop: ap.get(b).name.clone(),
                    },
                    t.at(k) & (1 << b) != 0,
                )
            })
            .collect();
        let core = unsat_core(&hard, &assumptions)?;
        let entry = out.entry(k).or_default();
        entry.extend(core.into_iter().map(|(v, b)| v.literal(b)));
    }
    Ok(out
        .into_iter()
        .filter(|(_, e)| !e.is_empty())
        .map(|(k, e)| ((var.to_string(), k), e))
        .collect())
}

/// `C̃` for a validated counterexample of `formula` on `machine`.
pub fn candidate_cause(
    machine: &MooreMachine,
    formula: &HyperFormula,
    cex: &Counterexample,
    policy: AnnotationPolicy,
) -> Result<CandidateSet, crate::Error> {
    cex.validate(machine)?;
    let vars: Vec<String> = cex.vars().map(str::to_string).collect();
    let per_trace: Vec<_> = vars
        .par_iter()
        .map(|v| trace_cores(machine, v, cex))
        .collect::<Result<Vec<_>, _>>()?;
    let per_step_cores: BTreeMap<_, _> = per_trace.into_iter().flatten().collect();

    let (phi, zt) = zip(formula, cex)?;
    let aut = ltl_to_alternating(&negate_to_nnf(&phi))?;
    let ev = aut.evaluate(zt.alphabet(), zt.lasso());
    let formula_support = annotated_events(&ev.annotations(policy), &zt);

    let ap = cex.alphabet();
    let mut events: BTreeSet<Event> = per_step_cores.values().flatten().cloned().collect();
    events.extend(
        formula_support
            .iter()
            .filter(|e| ap.kind(&e.prop) == Some(PropKind::Input))
            .cloned(),
    );
    Ok(CandidateSet {
        events,
        per_step_cores,
        formula_support,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{running_counterexample, running_example};

    fn v(p: &str, n: usize) -> EventVar {
        EventVar {
            trace: "t".into(),
            position: n,
            prop: p.into(),
        }
    }

    #[test]
    fn running_example_transition_constraints() {
        let m = running_example();
        let s = |id: &str| m.state_index(id).unwrap();
        let c = |a, b| transition_constraint(&m, s(a), s(b), "t", 0).unwrap();
        assert_eq!(c("s0", "s1"), PropFormula::Var(v("hi", 0)));
        assert_eq!(c("s1", "s3"), PropFormula::Const(true));
        assert_eq!(c("s0", "s2"), PropFormula::Not(Box::new(PropFormula::Var(v("hi", 0)))));
        assert!(matches!(
            transition_constraint(&m, s("s1"), s("s0"), "t", 0),
            Err(SatError::Unreachable { .. })
        ));
    }

    #[test]
    fn unit_clash_and_trivial_cores() {
        let hard = PropFormula::Not(Box::new(PropFormula::Var(v("hi", 0))));
        assert_eq!(unsat_core(&hard, &[(v("hi", 0), true)]).unwrap(), vec![(v("hi", 0), true)]);
        let never = PropFormula::Not(Box::new(PropFormula::Const(true)));
        assert_eq!(unsat_core(&never, &[(v("a", 0), true), (v("b", 0), false)]).unwrap(), vec![]);
        assert_eq!(unsat_core(&hard, &[(v("hi", 0), false)]), Err(SatError::Satisfiable));
    }

    #[test]
    fn core_drops_irrelevant_assumptions() {
        // ¬(a ∨ b): needs only one of a, b
        let hard = PropFormula::Not(Box::new(PropFormula::Or(vec![
            PropFormula::Var(v("a", 0)),
            PropFormula::Var(v("b", 0)),
        ])));
        let core = unsat_core(&hard, &[(v("a", 0), true), (v("b", 0), true), (v("c", 0), false)]).unwrap();
        assert_eq!(core, vec![(v("b", 0), true)]);
    }

    #[test]
    fn running_example_cores_and_support() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let c = candidate_cause(
            &m,
            &crate::fixtures::running_formula(),
            &cex,
            AnnotationPolicy::Canonical,
        )
        .unwrap();
        assert!(!c.per_step_cores.contains_key(&("t2".to_string(), 1)));
        assert_eq!(
            c.per_step_cores[&("t2".to_string(), 0)],
            BTreeSet::from([Event::pos("hi", 0, "t2")])
        );
        assert!(c.formula_support.iter().all(|e| e.position == 1 && e.prop == "lo"));
        assert!(cex.satisfies(&c.events));
    }


    mod props {
        use proptest::prelude::*;
        use rand::Rng;

        use super::*;
        use crate::fixtures::random;

        fn var(i: usize) -> EventVar {
            EventVar {
                trace: "t1".into(),
                position: i,
                prop: "i".into(),
            }
        }

        fn gen(rng: &mut impl Rng, vars: usize, depth: usize) -> PropFormula {
            if depth == 0 || rng.gen_bool(0.3) {
                return match rng.gen_range(0..8) {
                    0 => PropFormula::Const(rng.gen_bool(0.5)),
                    _ => PropFormula::Var(var(rng.gen_range(0..vars))),
                };
            }
            match rng.gen_range(0..3) {
                0 => PropFormula::Not(Box::new(gen(rng, vars, depth - 1))),
                1 => PropFormula::And((0..rng.gen_range(0..4)).map(|_| gen(rng, vars, depth - 1)).collect()),
                _ => PropFormula::Or((0..rng.gen_range(0..4)).map(|_| gen(rng, vars, depth - 1)).collect()),
            }
        }

        fn brute_sat(hard: &PropFormula, vars: usize, assumptions: &[Assumption]) -> bool {
            (0..1u32 << vars).any(|bits| {
                let value = |v: &EventVar| bits & (1 << v.position) != 0;
                hard.eval(&value) && assumptions.iter().all(|(v, b)| value(v) == *b)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]

            #[test]
            fn cores_are_unsat_and_minimal(seed in any::<u64>()) {
                let mut rng = random::rng(seed);
                let n = rng.gen_range(1..=5);
                let hard = gen(&mut rng, n, 4);
                let mut assumptions: Vec<Assumption> = Vec::new();
                for i in 0..n {
                    if rng.gen_bool(0.8) {
                        assumptions.push((var(i), rng.gen_bool(0.5)));
                    }
                }
                let sat = brute_sat(&hard, n, &assumptions);
                prop_assert_eq!(satisfiable(&hard, &assumptions), sat);
                match unsat_core(&hard, &assumptions) {
                    Err(e) => prop_assert!(sat && matches!(e, SatError::Satisfiable)),
                    Ok(core) => {
                        prop_assert!(!sat);
                        prop_assert!(core.iter().all(|a| assumptions.contains(a)));
                        prop_assert!(!brute_sat(&hard, n, &core));
                        for i in 0..core.len() {
                            let mut fewer = core.clone();
                            fewer.remove(i);
                            prop_assert!(brute_sat(&hard, n, &fewer));
                        }
                    }
                }
            }
        }
    }
}

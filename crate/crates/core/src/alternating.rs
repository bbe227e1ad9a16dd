//! Alternating automata for LTL in negation normal form, lasso acceptance, and
//! annotated accepting runs.
//!
//! An automaton is an arena of definitions. Each subformula owns one
//! definition; temporal operators refer back to themselves through the `next`
//! of a node, so every cycle of the definition graph passes through a node and
//! every strongly connected component is uniformly accepting or rejecting.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::logic::{Formula, Ltl, ZippedTrace};
use crate::model::{Alphabet, Event, Lasso};

pub type DefId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AltError {
    #[error("formula is not in negation normal form: {0}")]
    NotNnf(String),
}

/// State formula of a node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    True,
    False,
    Lit { atom: String, positive: bool },
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::True => f.write_str("true"),
            Label::False => f.write_str("false"),
            Label::Lit { atom, positive: true } => f.write_str(atom),
            Label::Lit { atom, positive: false } => write!(f, "!{atom}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Def {
    /// `ε`: no obligation.
    Empty,
    Node {
        label: Label,
        next: DefId,
        accepting: bool,
    },
    And(DefId, DefId),
    Or(DefId, DefId),
}

#[derive(Debug, Clone)]
pub struct AltAutomaton {
    defs: Vec<Def>,
    /// Rendering of the subformula each definition was built for.
    origin: Vec<String>,
    root: DefId,
}

const EMPTY: DefId = 0;

struct Builder {
    defs: Vec<Def>,
    origin: Vec<String>,
    memo: HashMap<Ltl, DefId>,
}

impl Builder {
    fn push(&mut self, d: Def, origin: String) -> DefId {
        self.defs.push(d);
        self.origin.push(origin);
        self.defs.len() - 1
    }

    fn node(&mut self, label: Label, next: DefId, accepting: bool, origin: String) -> DefId {
        self.push(
            Def::Node {
                label,
                next,
                accepting,
            },
            origin,
        )
    }

    fn build(&mut self, f: &Ltl) -> DefId {
        if let Some(&d) = self.memo.get(f) {
            return d;
        }
        use Formula::*;
        let o = f.to_string();
        let d = match f {
            True => self.node(Label::True, EMPTY, true, o),
            False => self.node(Label::False, EMPTY, true, o),
            Atom(a) => self.node(
                Label::Lit {
                    atom: a.clone(),
                    positive: true,
                },
                EMPTY,
                true,
                o,
            ),
            Not(a) => match &**a {
                Atom(a) => self.node(
                    Label::Lit {
                        atom: a.clone(),
                        positive: false,
                    },
                    EMPTY,
                    true,
                    o,
                ),
                _ => unreachable!("checked NNF"),
            },
            And(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.push(Def::And(a, b), o)
            }
            Or(a, b) => {
                let (a, b) = (self.build(a), self.build(b));
                self.push(Def::Or(a, b), o)
            }
            Next(a) => {
                let a = self.build(a);
                self.node(Label::True, a, false, o)
            }
            Globally(a) => {
                // ⟨true, A(G φ), acc⟩ ∧ A(φ)
                let a = self.build(a);
                let me = self.push(Def::Empty, o.clone());
                let n = self.node(Label::True, me, true, format!("X {o}"));
                self.defs[me] = Def::And(n, a);
                me
            }
            Eventually(a) => {
                // A(φ) ∨ ⟨true, A(F φ), rej⟩
                let a = self.build(a);
                let me = self.push(Def::Empty, o.clone());
                let n = self.node(Label::True, me, false, format!("X {o}"));
                self.defs[me] = Def::Or(a, n);
                me
            }
            Until(a, b) => {
                // A(φ') ∨ (⟨true, A(φ U φ'), rej⟩ ∧ A(φ))
                let (a, b) = (self.build(a), self.build(b));
                let me = self.push(Def::Empty, o.clone());
                let n = self.node(Label::True, me, false, format!("X {o}"));
                let step = self.push(Def::And(n, a), format!("X {o} & {}", self.origin[a]));
                self.defs[me] = Def::Or(b, step);
                me
            }
            Release(a, b) => {
                // (A(φ) ∧ A(φ')) ∨ (⟨true, A(φ R φ'), acc⟩ ∧ A(φ'))
                let (a, b) = (self.build(a), self.build(b));
                let me = self.push(Def::Empty, o.clone());
                let stop = self.push(
                    Def::And(a, b),
                    format!("{} & {}", self.origin[a], self.origin[b]),
                );
                let n = self.node(Label::True, me, true, format!("X {o}"));
                let step = self.push(Def::And(n, b), format!("X {o} & {}", self.origin[b]));
                self.defs[me] = Def::Or(stop, step);
                me
            }
            Implies(..) | Iff(..) => unreachable!("checked NNF"),
        };
        self.memo.insert(f.clone(), d);
        d
    }
}

/// Translates an NNF formula; `F φ` uses the disjunctive unfolding so that the
/// automaton accepts exactly the models of the formula.
pub fn ltl_to_alternating(f: &Ltl) -> Result<AltAutomaton, AltError> {
    if !f.is_nnf() {
        return Err(AltError::NotNnf(f.to_string()));
    }
    let mut b = Builder {
        defs: vec![Def::Empty],
        origin: vec!["ε".into()],
        memo: HashMap::new(),
    };
    let root = b.build(f);
    Ok(AltAutomaton {
        defs: b.defs,
        origin: b.origin,
        root,
    })
}

impl AltAutomaton {
    pub fn root(&self) -> DefId {
        self.root
    }

    pub fn defs(&self) -> &[Def] {
        &self.defs
    }

    pub fn def(&self, d: DefId) -> &Def {
        &self.defs[d]
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.defs
            .iter()
            .filter(|d| matches!(d, Def::Node { .. }))
            .count()
    }

    fn successors(&self, d: DefId) -> Vec<DefId> {
        match self.defs[d] {
            Def::Empty => vec![],
            Def::Node { next, .. } => vec![next],
            Def::And(a, b) | Def::Or(a, b) => vec![a, b],
        }
    }

    /// Strongly connected components of the definition graph, in reverse
    /// topological order (successors first).
    fn sccs(&self) -> Vec<Vec<DefId>> {
        struct T<'a> {
            aut: &'a AltAutomaton,
            index: Vec<Option<usize>>,
            low: Vec<usize>,
            on_stack: Vec<bool>,
            stack: Vec<DefId>,
            next: usize,
            out: Vec<Vec<DefId>>,
        }
        impl T<'_> {
            fn visit(&mut self, v: DefId) {
                self.index[v] = Some(self.next);
                self.low[v] = self.next;
                self.next += 1;
                self.stack.push(v);
                self.on_stack[v] = true;
                for w in self.aut.successors(v) {
                    match self.index[w] {
                        None => {
                            self.visit(w);
                            self.low[v] = self.low[v].min(self.low[w]);
                        }
                        Some(iw) if self.on_stack[w] => self.low[v] = self.low[v].min(iw),
                        _ => {}
                    }
                }
                if Some(self.low[v]) == self.index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = self.stack.pop().unwrap();
                        self.on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    self.out.push(comp);
                }
            }
        }
        let n = self.defs.len();
        let mut t = T {
            aut: self,
            index: vec![None; n],
            low: vec![0; n],
            on_stack: vec![false; n],
            stack: vec![],
            next: 0,
            out: vec![],
        };
        for v in 0..n {
            if t.index[v].is_none() {
                t.visit(v);
            }
        }
        t.out
    }

    /// Truth of every definition at every lasso position.
    pub fn evaluate<'a>(&'a self, ap: &Alphabet, t: &'a Lasso) -> Evaluation<'a> {
        let n = t.len();
        let lit = |label: &Label, i: usize| -> bool {
            match label {
                Label::True => true,
                Label::False => false,
                Label::Lit { atom, positive } => {
                    let v = ap.bit(atom).is_some_and(|b| t.at(i) & (1 << b) != 0);
                    v == *positive
                }
            }
        };
        let labels: Vec<Vec<bool>> = self
            .defs
            .iter()
            .map(|d| match d {
                Def::Node { label, .. } => (0..n).map(|i| lit(label, i)).collect(),
                _ => vec![],
            })
            .collect();
        let mut values = vec![vec![false; n]; self.defs.len()];
        for comp in self.sccs() {
            // Every cycle of a component runs through its nodes, all of which
            // share one acceptance flag: greatest fixpoint when accepting.
            let init = comp
                .iter()
                .any(|&d| matches!(self.defs[d], Def::Node { accepting: true, .. }))
                && comp.len() > 1;
            for &d in &comp {
                values[d] = vec![init; n];
            }
            loop {
                let mut changed = false;
                for i in (0..n).rev() {
                    for &d in comp.iter().rev() {
                        let v = match self.defs[d] {
                            Def::Empty => true,
                            Def::Node { next, .. } => labels[d][i] && values[next][t.succ(i)],
                            Def::And(a, b) => values[a][i] && values[b][i],
                            Def::Or(a, b) => values[a][i] || values[b][i],
                        };
                        if v != values[d][i] {
                            values[d][i] = v;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        Evaluation {
            aut: self,
            lasso: t,
            labels,
            values,
        }
    }

    /// Acceptance verdict and, on acceptance, the canonical run tree.
    pub fn accepts_lasso(&self, ap: &Alphabet, t: &Lasso) -> (bool, Option<RunTree>) {
        let ev = self.evaluate(ap, t);
        (ev.accepted(), ev.canonical_run())
    }

    /// Indented listing of every definition reachable from the root.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.root];
        let _ = writeln!(out, "automaton root=d{}", self.root);
        while let Some(d) = stack.pop() {
            if !seen.insert(d) {
                continue;
            }
            let body = match &self.defs[d] {
                Def::Empty => "ε".to_string(),
                Def::Node {
                    label,
                    next,
                    accepting,
                } => {
                    let next = if *next == EMPTY {
                        "ε".to_string()
                    } else {
                        format!("d{next}")
                    };
                    let flag = if *accepting { "acc" } else { "rej" };
                    format!("<{label}, {next}, {flag}>")
                }
                Def::And(a, b) => format!("d{a} & d{b}"),
                Def::Or(a, b) => format!("d{a} | d{b}"),
            };
            let _ = writeln!(out, "  d{d} = {body}    # {}", self.origin[d]);
            let mut succ = self.successors(d);
            succ.retain(|&s| s != EMPTY);
            stack.extend(succ.into_iter().rev());
        }
        out
    }
}

/// Memoized truth values of an automaton on one lasso.
pub struct Evaluation<'a> {
    aut: &'a AltAutomaton,
    lasso: &'a Lasso,
    labels: Vec<Vec<bool>>,
    values: Vec<Vec<bool>>,
}

/// A vertex `(definition, position)` of a run.
pub type Vertex = (DefId, usize);

/// A literal read by a run: zipped atom, lasso position, polarity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Annotation {
    pub atom: String,
    pub position: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnnotationPolicy {
    /// Literals of the canonical run only.
    #[default]
    Canonical,
    /// Literals of every accepting run.
    Union,
}

impl<'a> Evaluation<'a> {
    pub fn accepted(&self) -> bool {
        self.values[self.aut.root][0]
    }

    pub fn value(&self, d: DefId, i: usize) -> bool {
        self.values[d][i]
    }

    /// Children of a vertex in a run: both conjuncts, the chosen disjuncts, or
    /// the next obligation of a node.
    fn children(&self, (d, i): Vertex, all_choices: bool) -> Vec<Vertex> {
        match self.aut.defs[d] {
            Def::Empty => vec![],
            Def::Node { next, .. } if next == EMPTY => vec![],
            Def::Node { next, .. } => vec![(next, self.lasso.succ(i))],
            Def::And(a, b) => vec![(a, i), (b, i)],
            Def::Or(a, b) if all_choices => [a, b]
                .into_iter()
                .filter(|&c| self.values[c][i])
                .map(|c| (c, i))
                .collect(),
            Def::Or(a, b) => {
                let c = if self.values[a][i] { a } else { b };
                vec![(c, i)]
            }
        }
    }

    fn explore(&self, all_choices: bool) -> BTreeMap<Vertex, Vec<Vertex>> {
        let mut edges = BTreeMap::new();
        let mut stack = vec![(self.aut.root, 0)];
        while let Some(v) = stack.pop() {
            if edges.contains_key(&v) {
                continue;
            }
            let ch = self.children(v, all_choices);
            stack.extend(ch.iter().copied());
            edges.insert(v, ch);
        }
        edges
    }

    fn literals(&self, vertices: impl Iterator<Item = Vertex>) -> BTreeSet<Annotation> {
        vertices
            .filter_map(|(d, i)| match &self.aut.defs[d] {
                Def::Node {
                    label: Label::Lit { atom, positive },
                    ..
                } => Some(Annotation {
                    atom: atom.clone(),
                    position: i,
                    positive: *positive,
                }),
                _ => None,
            })
            .collect()
    }

    /// The accepting run that takes the leftmost satisfied disjunct everywhere.
    pub fn canonical_run(&self) -> Option<RunTree> {
        if !self.accepted() {
            return None;
        }
        let edges = self.explore(false);
        let annotations = self.literals(edges.keys().copied());
        Some(RunTree {
            root: (self.aut.root, 0),
            edges,
            annotations,
        })
    }

    /// Literals read by any accepting run.
    pub fn union_annotations(&self) -> BTreeSet<Annotation> {
        if !self.accepted() {
            return BTreeSet::new();
        }
        self.literals(self.explore(true).into_keys())
    }

    pub fn annotations(&self, policy: AnnotationPolicy) -> BTreeSet<Annotation> {
        match policy {
            AnnotationPolicy::Canonical => self
                .canonical_run()
                .map(|r| r.annotations)
                .unwrap_or_default(),
            AnnotationPolicy::Union => self.union_annotations(),
        }
    }

    /// Checks that `tree` is an accepting run on this lasso: labels hold,
    /// conjunctions keep both branches, disjunctions keep one satisfied branch,
    /// and every cycle passes through an accepting node.
    pub fn check_run(&self, tree: &RunTree) -> bool {
        for (&(d, i), ch) in &tree.edges {
            let ok = match self.aut.defs[d] {
                Def::Empty => ch.is_empty(),
                Def::Node { next, .. } => {
                    self.labels[d][i]
                        && if next == EMPTY {
                            ch.is_empty()
                        } else {
                            ch == &vec![(next, self.lasso.succ(i))]
                        }
                }
                Def::And(a, b) => ch == &vec![(a, i), (b, i)],
                Def::Or(a, b) => ch.len() == 1 && (ch[0] == (a, i) || ch[0] == (b, i)),
            };
            if !ok || ch.iter().any(|c| !tree.edges.contains_key(c)) {
                return false;
            }
        }
        // acyclic once edges leaving accepting nodes are dropped
        let cut = |v: &Vertex| matches!(self.aut.defs[v.0], Def::Node { accepting: true, .. });
        let mut state: BTreeMap<Vertex, u8> = BTreeMap::new();
        fn cyclic(
            v: Vertex,
            tree: &RunTree,
            cut: &dyn Fn(&Vertex) -> bool,
            state: &mut BTreeMap<Vertex, u8>,
        ) -> bool {
            match state.get(&v) {
                Some(1) => return true,
                Some(_) => return false,
                None => {}
            }
            state.insert(v, 1);
            if !cut(&v) {
                for &c in &tree.edges[&v] {
                    if cyclic(c, tree, cut, state) {
                        return true;
                    }
                }
            }
            state.insert(v, 2);
            false
        }
        tree.edges.contains_key(&tree.root)
            && tree.root == (self.aut.root, 0)
            && !tree
                .edges
                .keys()
                .any(|&v| cyclic(v, tree, &cut, &mut state))
    }
}

/// An accepting run, stored as its finite run graph over `(definition,
/// position)` vertices; the run tree is its unfolding from `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTree {
    pub root: Vertex,
    pub edges: BTreeMap<Vertex, Vec<Vertex>>,
    pub annotations: BTreeSet<Annotation>,
}

impl RunTree {
    /// Indented unfolding; a vertex already printed is shown as `^(d, i)`.
    pub fn dump(&self, aut: &AltAutomaton) -> String {
        let mut out = String::from("run\n");
        let mut seen = BTreeSet::new();
        let mut stack = vec![(self.root, 1usize)];
        while let Some((v, depth)) = stack.pop() {
            let indent = "  ".repeat(depth);
            if !seen.insert(v) {
                let _ = writeln!(out, "{indent}^(d{}, {})", v.0, v.1);
                continue;
            }
            let what = match &aut.defs[v.0] {
                Def::Node { label, .. } => format!("<{label}>"),
                Def::And(..) => "and".into(),
                Def::Or(..) => "or".into(),
                Def::Empty => "ε".into(),
            };
            let _ = writeln!(out, "{indent}(d{}, {}) {what}", v.0, v.1);
            for &c in self.edges[&v].iter().rev() {
                stack.push((c, depth + 1));
            }
        }
        out
    }
}

/// Maps annotations on a zipped lasso back to events of the original traces.
/// Annotations on atoms outside the zipped alphabet are dropped.
pub fn annotated_events<'a>(
    annotations: impl IntoIterator<Item = &'a Annotation>,
    zipped: &ZippedTrace,
) -> BTreeSet<Event> {
    annotations
        .into_iter()
        .filter_map(|a| {
            zipped
                .bit(&a.atom)
                .map(|b| zipped.event(b, a.position, a.positive))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{running_counterexample, running_example, running_formula};
    use crate::logic::{eval_ltl, negate_to_nnf, zip};
    use crate::model::{AtomicProp, PropKind};

    fn a(s: &str) -> Ltl {
        Formula::Atom(s.into())
    }

    fn ap() -> Alphabet {
        Alphabet::new(
            ["a", "b"]
                .iter()
                .map(|n| AtomicProp {
                    name: n.to_string(),
                    kind: PropKind::Input,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn atom_is_a_single_accepting_node() {
        let aut = ltl_to_alternating(&a("a")).unwrap();
        assert_eq!(
            aut.def(aut.root()),
            &Def::Node {
                label: Label::Lit {
                    atom: "a".into(),
                    positive: true
                },
                next: EMPTY,
                accepting: true
            }
        );
    }

    #[test]
    fn globally_shape() {
        let aut = ltl_to_alternating(&Ltl::globally(a("a"))).unwrap();
        let root = aut.root();
        let Def::And(n, x) = *aut.def(root) else {
            panic!()
        };
        assert_eq!(
            aut.def(n),
            &Def::Node {
                label: Label::True,
                next: root,
                accepting: true
            }
        );
        assert!(matches!(aut.def(x), Def::Node { next: EMPTY, .. }));
    }

    #[test]
    fn rejects_non_nnf() {
        assert!(ltl_to_alternating(&Ltl::not(Ltl::globally(a("a")))).is_err());
        assert!(ltl_to_alternating(&Ltl::implies(a("a"), a("b"))).is_err());
    }

    #[test]
    fn trivial_verdicts() {
        let t = Lasso::new(vec![1], vec![2, 0]).unwrap();
        let g_true = ltl_to_alternating(&Ltl::globally(Formula::True)).unwrap();
        assert!(g_true.accepts_lasso(&ap(), &t).0);
        let f = ltl_to_alternating(&Ltl::and(a("a"), Ltl::not(a("a")))).unwrap();
        assert_eq!(f.accepts_lasso(&ap(), &t), (false, None));
    }

    #[test]
    fn agrees_with_evaluator_on_loops() {
        let cases = [
            Ltl::globally(Ltl::eventually(a("a"))),
            Ltl::eventually(Ltl::globally(a("b"))),
            Ltl::until(a("a"), a("b")),
            Ltl::release(a("a"), a("b")),
            Ltl::next(Ltl::until(Formula::True, Ltl::and(a("a"), a("b")))),
        ];
        for prefix in [vec![], vec![1], vec![3, 0]] {
            for period in [vec![1], vec![2, 1], vec![0, 3, 2]] {
                let t = Lasso::new(prefix.clone(), period.clone()).unwrap();
                for f in &cases {
                    let aut = ltl_to_alternating(f).unwrap();
                    let ev = aut.evaluate(&ap(), &t);
                    assert_eq!(ev.accepted(), eval_ltl(&ap(), &t, f), "{f} on {t:?}");
                    if let Some(run) = ev.canonical_run() {
                        assert!(ev.check_run(&run));
                    }
                }
            }
        }
    }

    #[test]
    fn running_example_annotations() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let (phi, zt) = zip(&running_formula(), &cex).unwrap();
        let aut = ltl_to_alternating(&negate_to_nnf(&phi)).unwrap();
        let (ok, run) = aut.accepts_lasso(zt.alphabet(), zt.lasso());
        assert!(ok);
        let run = run.unwrap();
        assert!(run.annotations.contains(&Annotation {
            atom: "lo@t1".into(),
            position: 1,
            positive: true
        }));
        assert!(run.annotations.contains(&Annotation {
            atom: "lo@t2".into(),
            position: 1,
            positive: false
        }));
        let events = annotated_events(&run.annotations, &zt);
        assert_eq!(
            events,
            BTreeSet::from([Event::pos("lo", 1, "t1"), Event::neg("lo", 1, "t2")])
        );
        assert!(aut.dump().contains("acc"));
        assert!(run.dump(&aut).starts_with("run\n"));
    }

    #[test]
    fn tampered_run_fails_check() {
        let t = Lasso::new(vec![], vec![1]).unwrap();
        let aut = ltl_to_alternating(&Ltl::eventually(Ltl::not(a("b")))).unwrap();
        let ev = aut.evaluate(&ap(), &t);
        let mut run = ev.canonical_run().unwrap();
        assert!(ev.check_run(&run));
        // postpone the witness forever: a rejecting cycle
        let root = aut.root();
        let Def::Or(_, n) = *aut.def(root) else { panic!() };
        run.edges.insert((root, 0), vec![(n, 0)]);
        run.edges.insert((n, 0), vec![(root, 0)]);
        assert!(!ev.check_run(&run));
    }


    mod props {
        use proptest::prelude::*;

        use super::*;
        use crate::fixtures::random;
        use crate::logic::{eval_ltl, to_nnf};

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]

            #[test]
            fn acceptance_matches_evaluation(seed in any::<u64>()) {
                let mut rng = random::rng(seed);
                let ap = random::ltl_alphabet(3);
                let atoms: Vec<String> = ap.props().iter().map(|p| p.name.clone()).collect();
                let f = to_nnf(&random::formula(&mut rng, &atoms, 4));
                let t = random::lasso(&mut rng, &ap, 8);
                let aut = ltl_to_alternating(&f).unwrap();
                let (accepted, run) = aut.accepts_lasso(&ap, &t);
                prop_assert_eq!(accepted, eval_ltl(&ap, &t, &f));
                prop_assert_eq!(run.is_some(), accepted);
            }

            #[test]
            fn annotations_are_literals_of_the_trace(seed in any::<u64>()) {
                let mut rng = random::rng(seed);
                let ap = random::ltl_alphabet(3);
                let atoms: Vec<String> = ap.props().iter().map(|p| p.name.clone()).collect();
                let f = to_nnf(&random::formula(&mut rng, &atoms, 3));
                let t = random::lasso(&mut rng, &ap, 6);
                let aut = ltl_to_alternating(&f).unwrap();
                let ev = aut.evaluate(&ap, &t);
                for policy in [AnnotationPolicy::Canonical, AnnotationPolicy::Union] {
                    for a in ev.annotations(policy) {
                        prop_assert!(ev.accepted());
                        prop_assert!(a.position < t.len());
                        let bit = ap.bit(&a.atom).unwrap();
                        prop_assert_eq!(t.at(a.position) & (1 << bit) != 0, a.positive);
                    }
                }
            }
        }
    }
}

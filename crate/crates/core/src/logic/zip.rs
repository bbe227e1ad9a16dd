use super::formula::{zipped_atom, HyperFormula, Ltl};
use super::LogicError;
use crate::model::{lcm, Alphabet, AtomicProp, Counterexample, Event, Lasso, Letter, Polarity, MAX_PROPS};

/// All traces of an assignment merged into one lasso over atoms `prop@var`.
///
/// Bit `i·|AP| + b` of a zipped letter is bit `b` of trace `vars[i]`. The prefix
/// length is the largest component prefix and the period the lcm of the
/// component periods, so every component position `fold(z)` is well-defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZippedTrace {
    alphabet: Alphabet,
    base: Alphabet,
    lasso: Lasso,
    vars: Vec<String>,
    components: Vec<Lasso>,
}

impl ZippedTrace {
    /// Zips the traces of `cex` named by `vars`, in that order.
    pub fn new(cex: &Counterexample, vars: &[String]) -> Result<Self, LogicError> {
        let base = cex.alphabet().clone();
        let width = base.len();
        if width * vars.len() > MAX_PROPS {
            return Err(LogicError::AlphabetTooLarge(width * vars.len()));
        }
        let components = vars
            .iter()
            .map(|v| cex.trace(v).cloned().ok_or_else(|| LogicError::UnboundVariable(v.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let prefix = components.iter().map(|t| t.loop_start()).max().unwrap_or(0);
        let period = components.iter().fold(1, |p, t| lcm(p, t.period().len()));
        let letter = |z: usize| -> Letter {
            components
                .iter()
                .enumerate()
                .fold(0, |acc, (i, t)| acc | (t.at(z) << (i * width)))
        };
        let lasso = Lasso::new(
            (0..prefix).map(letter).collect(),
            (prefix..prefix + period).map(letter).collect(),
        )
        .expect("period is non-empty");
        let mut props = Vec::with_capacity(width * vars.len());
        for v in vars {
            for p in base.props() {
                props.push(AtomicProp {
                    name: zipped_atom(&p.name, v),
                    kind: p.kind,
                });
            }
        }
        let alphabet = Alphabet::new(props).map_err(LogicError::Zip)?;
        Ok(ZippedTrace {
            alphabet,
            base,
            lasso,
            vars: vars.to_vec(),
            components,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn lasso(&self) -> &Lasso {
        &self.lasso
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Trace variable and base proposition of a zipped bit.
    pub fn origin(&self, bit: usize) -> (&str, &str) {
        let w = self.base.len();
        (&self.vars[bit / w], &self.base.get(bit % w).name)
    }

    /// Position in the finite representation of `vars[var]` read at zipped position `z`.
    pub fn component_position(&self, var: usize, z: usize) -> usize {
        self.components[var].fold(z)
    }

    /// The event asserting the given value of zipped atom `bit` at zipped position `z`.
    pub fn event(&self, bit: usize, z: usize, value: bool) -> Event {
        let w = self.base.len();
        let (var, prop) = self.origin(bit);
        Event::new(
            Polarity::of(value),
            prop,
            self.component_position(bit / w, z),
            var,
        )
    }

    /// Looks up a zipped atom by name.
    pub fn bit(&self, atom: &str) -> Option<usize> {
        self.alphabet.bit(atom)
    }
}

impl HyperFormula {
    /// Renames the quantified variables to trace names of `cex`: by name when
    /// every variable names a trace, otherwise by position in the sorted trace
    /// names when the counts agree.
    pub fn bind_to(&self, cex: &Counterexample) -> Result<HyperFormula, LogicError> {
        if self.vars.iter().all(|v| cex.trace(v).is_some()) {
            return Ok(self.clone());
        }
        let names: Vec<String> = cex.vars().map(str::to_string).collect();
        if names.len() != self.vars.len() {
            let missing = self.vars.iter().find(|v| cex.trace(v).is_none()).unwrap();
            return Err(LogicError::UnboundVariable(missing.clone()));
        }
        let rename = |v: &str| names[self.vars.iter().position(|x| x == v).unwrap()].clone();
        Ok(HyperFormula {
            vars: names.clone(),
            body: self.body.map_atoms(&|a| super::IndexedAtom {
                prop: a.prop.clone(),
                var: rename(&a.var),
            }),
        })
    }
}

/// Eliminates the trace quantifiers: the zipped body and the zipped lasso.
pub fn zip(f: &HyperFormula, cex: &Counterexample) -> Result<(Ltl, ZippedTrace), LogicError> {
    let f = f.bind_to(cex)?;
    for p in f.props() {
        if cex.alphabet().bit(p).is_none() {
            return Err(LogicError::UnknownProp(p.to_string()));
        }
    }
    let t = ZippedTrace::new(cex, &f.vars)?;
    Ok((f.zipped_body(), t))
}

/// `Γ ⊨ body`, decided on the zipped lasso.
pub fn eval_hyper(cex: &Counterexample, f: &HyperFormula) -> Result<bool, LogicError> {
    let (phi, t) = zip(f, cex)?;
    Ok(super::eval_ltl(t.alphabet(), t.lasso(), &phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{running_counterexample, running_example, running_formula};
    use crate::logic::{negate_to_nnf, Formula};
    use std::collections::BTreeMap;

    #[test]
    fn running_example_zip() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let (phi, t) = zip(&running_formula(), &cex).unwrap();
        assert_eq!(phi.to_string(), "G (lo@t1 <-> lo@t2)");
        assert_eq!(t.lasso().prefix().len(), 2);
        assert_eq!(t.lasso().period().len(), 1);
        assert!(!crate::logic::eval_ltl(t.alphabet(), t.lasso(), &phi));
        assert!(crate::logic::eval_ltl(t.alphabet(), t.lasso(), &negate_to_nnf(&phi)));
        let lo_t2 = t.bit("lo@t2").unwrap();
        assert_eq!(t.event(lo_t2, 1, false), Event::neg("lo", 1, "t2"));
    }

    #[test]
    fn periods_two_and_three_give_six() {
        let m = running_example();
        let ap = m.alphabet().clone();
        let cex = Counterexample::new(
            ap,
            BTreeMap::from([
                ("a".to_string(), Lasso::new(vec![0], vec![1, 2]).unwrap()),
                ("b".to_string(), Lasso::new(vec![], vec![1, 2, 4]).unwrap()),
            ]),
        );
        let t = ZippedTrace::new(&cex, &["a".into(), "b".into()]).unwrap();
        assert_eq!(t.lasso().period().len(), 6);
        assert_eq!(t.lasso().prefix().len(), 1);
        assert_eq!(t.component_position(0, 6), 2);
        assert_eq!(t.component_position(1, 6), 0);
    }

    #[test]
    fn positional_binding_and_errors() {
        let m = running_example();
        let cex = running_counterexample(&m);
        let f = crate::logic::parse_hyperltl("forall p q. G (lo[p] <-> lo[q])", crate::logic::Syntax::Infix)
            .unwrap();
        assert!(!eval_hyper(&cex, &f).unwrap());
        let g = crate::logic::parse_hyperltl("forall p. G lo[p]", crate::logic::Syntax::Infix).unwrap();
        assert!(matches!(eval_hyper(&cex, &g), Err(LogicError::UnboundVariable(_))));
        let h = HyperFormula {
            vars: vec!["t1".into()],
            body: Formula::Atom(crate::logic::IndexedAtom {
                prop: "zz".into(),
                var: "t1".into(),
            }),
        };
        assert!(matches!(eval_hyper(&cex, &h), Err(LogicError::UnknownProp(_))));
    }


    mod props {
        use proptest::prelude::*;

        use super::*;
        use crate::fixtures::random;
        use crate::logic::IndexedAtom;
        use crate::model::Lasso;

        /// Direct semantics on the trace tuple. Every suffix from position `n`
        /// repeats within `horizon` steps.
        struct Direct<'a> {
            cex: &'a Counterexample,
            horizon: usize,
        }

        impl Direct<'_> {
            fn holds(&self, f: &Formula<IndexedAtom>, n: usize) -> bool {
                let window = n..=n + self.horizon;
                match f {
                    Formula::True => true,
                    Formula::False => false,
                    Formula::Atom(a) => self.cex.value(&a.var, &a.prop, self.fold(&a.var, n)).unwrap(),
                    Formula::Not(a) => !self.holds(a, n),
                    Formula::And(a, b) => self.holds(a, n) && self.holds(b, n),
                    Formula::Or(a, b) => self.holds(a, n) || self.holds(b, n),
                    Formula::Implies(a, b) => !self.holds(a, n) || self.holds(b, n),
                    Formula::Iff(a, b) => self.holds(a, n) == self.holds(b, n),
                    Formula::Next(a) => self.holds(a, n + 1),
                    Formula::Eventually(a) => window.into_iter().any(|k| self.holds(a, k)),
                    Formula::Globally(a) => window.into_iter().all(|k| self.holds(a, k)),
                    Formula::Until(a, b) => window
                        .into_iter()
                        .any(|k| self.holds(b, k) && (n..k).all(|j| self.holds(a, j))),
                    Formula::Release(a, b) => window
                        .into_iter()
                        .all(|k| self.holds(b, k) || (n..k).any(|j| self.holds(a, j))),
                }
            }

            fn fold(&self, var: &str, n: usize) -> usize {
                let t: &Lasso = self.cex.trace(var).unwrap();
                if n < t.loop_start() {
                    n
                } else {
                    t.loop_start() + (n - t.loop_start()) % t.period().len()
                }
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(500))]

            #[test]
            fn zipped_evaluation_matches_direct_semantics(seed in any::<u64>()) {
                let mut rng = random::rng(seed);
                let ap = random::ltl_alphabet(2);
                let vars = vec!["t1".to_string(), "t2".to_string()];
                let atoms: Vec<IndexedAtom> = ["p0", "p1"]
                    .iter()
                    .flat_map(|p| vars.iter().map(move |v| IndexedAtom { prop: p.to_string(), var: v.clone() }))
                    .collect();
                let body = random::formula(&mut rng, &atoms, 3);
                let traces: BTreeMap<String, Lasso> =
                    vars.iter().map(|v| (v.clone(), random::lasso(&mut rng, &ap, 5))).collect();
                let prefix = traces.values().map(|t| t.loop_start()).max().unwrap();
                let period = traces.values().map(|t| t.period().len()).fold(1, crate::model::lcm);
                let cex = Counterexample::new(ap, traces);
                let direct = Direct { cex: &cex, horizon: prefix + period };
                let f = HyperFormula { vars, body };
                prop_assert_eq!(eval_hyper(&cex, &f).unwrap(), direct.holds(&f.body, 0));
            }
        }
    }
}

//! Bounded counterexample search over the self-composition.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::logic::{eval_hyper, HyperFormula, LogicError};
use crate::model::{Counterexample, Lasso, Letter, MooreMachine, MAX_PROPS};
use crate::Error;

pub const DEFAULT_PREFIX_BOUND: usize = 4;
pub const DEFAULT_PERIOD_BOUND: usize = 3;
pub const DEFAULT_MAX_PRODUCT_STATES: usize = 1 << 20;
/// Upper bound on the number of input lassos a search may enumerate.
pub const DEFAULT_MAX_WORDS: u128 = 1 << 26;

/// The `k`-fold synchronous product of a machine with itself.
///
/// A product state is the mixed-radix index of its component tuple. Product
/// letters pack component `i` at bits `i·|AP|..`, each in the base layout.
#[derive(Debug, Clone)]
pub struct ProductMachine<'m> {
    base: &'m MooreMachine,
    k: usize,
    width: usize,
    state_count: usize,
}

impl<'m> ProductMachine<'m> {
    pub fn base(&self) -> &MooreMachine {
        self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn initial(&self) -> usize {
        self.index(&vec![self.base.initial(); self.k])
    }

    pub fn tuple(&self, state: usize) -> Vec<usize> {
        let n = self.base.states().len();
        let mut s = state;
        (0..self.k)
            .map(|_| {
                let c = s % n;
                s /= n;
                c
            })
            .collect()
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        let n = self.base.states().len();
        tuple.iter().rev().fold(0, |acc, &c| acc * n + c)
    }

    /// Component `i` of a packed product letter.
    pub fn component(&self, letter: Letter, i: usize) -> Letter {
        (letter >> (i * self.width)) & self.base.alphabet().full_mask()
    }

    /// Packs per-component input valuations into a product letter.
    pub fn pack(&self, parts: &[Letter]) -> Letter {
        parts
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | (p << (i * self.width)))
    }

    pub fn label(&self, state: usize) -> Letter {
        let parts: Vec<Letter> = self.tuple(state).iter().map(|&s| self.base.label(s)).collect();
        self.pack(&parts)
    }

    pub fn step(&self, state: usize, letter: Letter) -> usize {
        let next: Vec<usize> = self
            .tuple(state)
            .iter()
            .enumerate()
            .map(|(i, &s)| self.base.step(s, self.component(letter, i)))
            .collect();
        self.index(&next)
    }

    /// Runs the product on a lasso of packed input letters and projects the
    /// result to one trace per component.
    pub fn run(&self, inputs: &Lasso) -> Vec<Lasso> {
        let imask = self.pack(&vec![self.base.input_mask(); self.k]);
        let joint = Lasso::from_recurrence((self.initial(), 0usize), |&(s, i)| {
            let x = inputs.at(i) & imask;
            (x | self.label(s), (self.step(s, x), inputs.succ(i)))
        });
        (0..self.k)
            .map(|i| joint.map(|l| self.component(l, i)).canonical())
            .collect()
    }
}

/// `k`-fold self-composition; fails when `|S|^k` exceeds `max_states` or the
/// packed letters do not fit a machine letter.
pub fn self_compose(
    machine: &MooreMachine,
    k: usize,
    max_states: usize,
) -> Result<ProductMachine<'_>, Error> {
    if k == 0 {
        return Err(Error::TooLarge("self-composition needs k >= 1".into()));
    }
    let width = machine.alphabet().len();
    if k * width > MAX_PROPS {
        return Err(Error::TooLarge(format!(
            "{k} copies of {width} propositions exceed {MAX_PROPS}"
        )));
    }
    let state_count = (0..k)
        .try_fold(1usize, |acc, _| acc.checked_mul(machine.states().len()))
        .filter(|&c| c <= max_states)
        .ok_or_else(|| {
            Error::TooLarge(format!(
                "{}^{k} product states exceed the cap of {max_states}",
                machine.states().len()
            ))
        })?;
    Ok(ProductMachine {
        base: machine,
        k,
        width,
        state_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub prefix: usize,
    pub period: usize,
    pub max_states: usize,
    pub max_words: u128,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            prefix: DEFAULT_PREFIX_BOUND,
            period: DEFAULT_PERIOD_BOUND,
            max_states: DEFAULT_MAX_PRODUCT_STATES,
            max_words: DEFAULT_MAX_WORDS,
        }
    }
}

impl Bounds {
    pub fn new(prefix: usize, period: usize) -> Self {
        Bounds {
            prefix,
            period,
            ..Bounds::default()
        }
    }
}

/// Searches input lassos of the self-composition with prefix length at most
/// `bounds.prefix` and period length in `1..=bounds.period` for one whose
/// traces falsify the formula body.
///
/// Lassos are tried by total length, then prefix length, then letters in
/// lexicographic order, and only in canonical form; the first hit is returned.
/// Trace names are the formula's variables.
pub fn find_counterexample(
    machine: &MooreMachine,
    formula: &HyperFormula,
    bounds: Bounds,
) -> Result<Option<Counterexample>, Error> {
    for p in formula.props() {
        if machine.alphabet().bit(p).is_none() {
            return Err(LogicError::UnknownProp(p.to_string()).into());
        }
    }
    let k = formula.vars.len();
    let product = self_compose(machine, k, bounds.max_states)?;
    let ni = machine.num_inputs();
    let per_letter = 1u128 << (k * ni);
    let mut total: u128 = 0;
    for p in 0..=bounds.prefix {
        for q in 1..=bounds.period {
            total = total.saturating_add(per_letter.saturating_pow((p + q) as u32));
        }
    }
    if total > bounds.max_words {
        return Err(Error::TooLarge(format!(
            "{total} input lassos exceed the search cap of {}",
            bounds.max_words
        )));
    }

    let letters: Vec<Letter> = (0..per_letter as u64)
        .map(|x| {
            let parts: Vec<Letter> = (0..k).map(|i| (x >> (i * ni)) & machine.input_mask()).collect();
            product.pack(&parts)
        })
        .collect();
    let mut shapes: Vec<(usize, usize)> = (0..=bounds.prefix)
        .flat_map(|p| (1..=bounds.period).map(move |q| (p, q)))
        .collect();
    shapes.sort_by_key(|&(p, q)| (p + q, p));

    let try_word = |p: usize, digits: &[usize]| -> Option<Counterexample> {
        let word: Vec<Letter> = digits.iter().map(|&d| letters[d]).collect();
        let (u, v) = word.split_at(p);
        let inputs = Lasso::new(u.to_vec(), v.to_vec()).ok()?;
        if !inputs.is_canonical() {
            return None;
        }
        let traces: BTreeMap<String, Lasso> =
            formula.vars.iter().cloned().zip(product.run(&inputs)).collect();
        let cex = Counterexample::new(machine.alphabet().clone(), traces);
        match eval_hyper(&cex, formula) {
            Ok(false) => Some(cex),
            _ => None,
        }
    };

    let radix = letters.len();
    for (p, q) in shapes {
        let n = p + q;
        let found = (0..radix).into_par_iter().find_map_first(|first| {
            let mut digits = vec![0usize; n];
            digits[0] = first;
            loop {
                if let Some(cex) = try_word(p, &digits) {
                    return Some(cex);
                }
                // odometer over digits[1..], last digit fastest
                let mut i = n;
                loop {
                    if i <= 1 {
                        return None;
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < radix {
                        break;
                    }
                    digits[i] = 0;
                }
            }
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{running_example, running_formula};
    use crate::logic::{parse_hyperltl, Syntax};
    use crate::model::Guard;

    #[test]
    fn running_example_square_has_sixteen_states() {
        let m = running_example();
        let p = self_compose(&m, 2, 1 << 10).unwrap();
        assert_eq!(p.state_count(), 16);
        assert_eq!(p.tuple(p.index(&[3, 1])), vec![3, 1]);
        assert!(self_compose(&m, 2, 15).is_err());
        assert!(self_compose(&m, 0, 16).is_err());
    }

    #[test]
    fn single_copy_mirrors_the_base() {
        let m = running_example();
        let p = self_compose(&m, 1, 16).unwrap();
        assert_eq!(p.state_count(), m.states().len());
        for s in 0..m.states().len() {
            assert_eq!(p.label(s), m.label(s));
            for x in 0..2 {
                assert_eq!(p.step(s, x), m.step(s, x));
            }
        }
    }

    #[test]
    fn projections_are_traces() {
        let m = running_example();
        let p = self_compose(&m, 2, 16).unwrap();
        let hi0 = p.pack(&[0, 1]);
        let inputs = Lasso::new(vec![hi0, p.pack(&[1, 0])], vec![0, hi0]).unwrap();
        for t in p.run(&inputs) {
            assert!(m.validate_trace(&t).is_accepted());
        }
    }

    #[test]
    fn running_example_violation() {
        let m = running_example();
        let f = running_formula();
        let cex = find_counterexample(&m, &f, Bounds::new(3, 2)).unwrap().unwrap();
        cex.validate(&m).unwrap();
        assert!(!eval_hyper(&cex, &f).unwrap());
        assert_ne!(cex.value("t1", "lo", 1).unwrap(), cex.value("t2", "lo", 1).unwrap());
    }

    #[test]
    fn single_state_machine_has_no_violation() {
        let m = MooreMachine::from_guards(
            vec!["hi".into()],
            vec!["lo".into()],
            vec![("s".into(), vec!["lo".into()])],
            "s",
            vec![("s".into(), Guard::parse("true").unwrap(), "s".into())],
        )
        .unwrap();
        let f = parse_hyperltl("forall t1 t2. G (lo[t1] <-> lo[t2])", Syntax::Infix).unwrap();
        assert!(find_counterexample(&m, &f, Bounds::new(2, 2)).unwrap().is_none());
    }

    #[test]
    fn search_cap_and_unknown_props() {
        let m = running_example();
        let f = running_formula();
        let mut b = Bounds::new(3, 2);
        b.max_words = 10;
        assert!(matches!(find_counterexample(&m, &f, b), Err(Error::TooLarge(_))));
        let g = parse_hyperltl("forall t1 t2. G (zz[t1] <-> zz[t2])", Syntax::Infix).unwrap();
        assert!(find_counterexample(&m, &g, Bounds::new(1, 1)).is_err());
    }


    mod props {
        use proptest::prelude::*;
        use rand::Rng;

        use super::*;
        use crate::fixtures::random;
        use crate::logic::eval_hyper;
        use crate::model::Counterexample;
        use std::collections::BTreeMap;

        /// Every trace of `m` driven by an input lasso within the bounds.
        fn traces(m: &MooreMachine, prefix: usize, period: usize) -> Vec<Lasso> {
            let letters = m.input_mask() as usize + 1;
            let mut out = Vec::new();
            for p in 0..=prefix {
                for q in 1..=period {
                    for code in 0..letters.pow((p + q) as u32) {
                        let word: Vec<u64> = (0..p + q).map(|i| ((code / letters.pow(i as u32)) % letters) as u64).collect();
                        let inputs = Lasso::new(word[..p].to_vec(), word[p..].to_vec()).unwrap();
                        out.push(m.run(&inputs).unwrap());
                    }
                }
            }
            out
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn search_is_complete_at_tiny_bounds(seed in any::<u64>()) {
                let mut rng = random::rng(seed);
                let (s, i, o) = (rng.gen_range(1..=4), rng.gen_range(1..=2), rng.gen_range(1..=2));
                let m = random::machine(&mut rng, s, i, o);
                let f = random::hyper_formula(&mut rng, &m, 2);
                let bounds = Bounds::new(2, 2);
                let found = find_counterexample(&m, &f, bounds).unwrap();
                let all = traces(&m, 2, 2);
                let violated = all.iter().any(|a| {
                    all.iter().any(|b| {
                        let cex = Counterexample::new(
                            m.alphabet().clone(),
                            BTreeMap::from([("t1".to_string(), a.clone()), ("t2".to_string(), b.clone())]),
                        );
                        !eval_hyper(&cex, &f).unwrap()
                    })
                });
                prop_assert_eq!(found.is_some(), violated);
                if let Some(cex) = found {
                    prop_assert!(cex.validate(&m).is_ok());
                    prop_assert!(!eval_hyper(&cex, &f).unwrap());
                }
            }
        }
    }
}

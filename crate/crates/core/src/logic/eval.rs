use super::formula::{Formula, Ltl};
use crate::model::{Alphabet, Lasso};

/// Truth of `f` at position 0 of the infinite word denoted by `t`.
/// Atoms absent from `ap` are false everywhere.
pub fn eval_ltl(ap: &Alphabet, t: &Lasso, f: &Ltl) -> bool {
    truth(ap, t, f)[0]
}

/// Truth of `f` at every position of the finite representation of `t`.
pub fn truth(ap: &Alphabet, t: &Lasso, f: &Ltl) -> Vec<bool> {
    use Formula::*;
    let n = t.len();
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(p) => match ap.bit(p) {
            Some(b) => t.letters().map(|l| l & (1 << b) != 0).collect(),
            None => vec![false; n],
        },
        Not(a) => truth(ap, t, a).into_iter().map(|x| !x).collect(),
        And(a, b) => zip_with(truth(ap, t, a), truth(ap, t, b), |x, y| x && y),
        Or(a, b) => zip_with(truth(ap, t, a), truth(ap, t, b), |x, y| x || y),
        Implies(a, b) => zip_with(truth(ap, t, a), truth(ap, t, b), |x, y| !x || y),
        Iff(a, b) => zip_with(truth(ap, t, a), truth(ap, t, b), |x, y| x == y),
        Next(a) => {
            let a = truth(ap, t, a);
            (0..n).map(|i| a[t.succ(i)]).collect()
        }
        Eventually(a) => {
            let a = truth(ap, t, a);
            fixpoint(t, false, |i, next| a[i] || next)
        }
        Globally(a) => {
            let a = truth(ap, t, a);
            fixpoint(t, true, |i, next| a[i] && next)
        }
        Until(a, b) => {
            let (a, b) = (truth(ap, t, a), truth(ap, t, b));
            fixpoint(t, false, |i, next| b[i] || (a[i] && next))
        }
        Release(a, b) => {
            let (a, b) = (truth(ap, t, a), truth(ap, t, b));
            fixpoint(t, true, |i, next| b[i] && (a[i] || next))
        }
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Iterates `v[i] = step(i, v[succ i])` from the constant `init` until stable:
/// `init = false` yields the least fixpoint, `init = true` the greatest.
fn fixpoint(t: &Lasso, init: bool, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = t.len();
    let mut v = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let x = step(i, v[t.succ(i)]);
            if x != v[i] {
                v[i] = x;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomicProp, PropKind};

    fn ap() -> Alphabet {
        Alphabet::new(vec![AtomicProp {
            name: "a".into(),
            kind: PropKind::Input,
        }])
        .unwrap()
    }

    fn a() -> Ltl {
        Formula::Atom("a".into())
    }

    #[test]
    fn loop_semantics() {
        // a only in the prefix
        let t = Lasso::new(vec![1, 1], vec![0, 0]).unwrap();
        assert!(!eval_ltl(&ap(), &t, &Ltl::eventually(Ltl::globally(a()))));
        assert!(eval_ltl(&ap(), &t, &Ltl::eventually(Ltl::globally(Ltl::not(a())))));
        // a at every other step of the loop
        let t = Lasso::new(vec![], vec![1, 0]).unwrap();
        assert!(eval_ltl(&ap(), &t, &Ltl::globally(Ltl::eventually(a()))));
        assert!(!eval_ltl(&ap(), &t, &Ltl::globally(a())));
        assert!(eval_ltl(&ap(), &t, &Ltl::next(Ltl::not(a()))));
        assert!(!eval_ltl(&ap(), &t, &Ltl::until(a(), Formula::False)));
        assert!(eval_ltl(&ap(), &t, &Ltl::release(Formula::False, Formula::True)));
    }

    #[test]
    fn true_holds_everywhere() {
        let t = Lasso::new(vec![0], vec![1]).unwrap();
        assert!(eval_ltl(&ap(), &t, &Formula::True));
    }

    #[test]
    fn unknown_atoms_are_false() {
        let t = Lasso::new(vec![], vec![1]).unwrap();
        assert!(!eval_ltl(&ap(), &t, &Formula::Atom("zz".into())));
    }
}

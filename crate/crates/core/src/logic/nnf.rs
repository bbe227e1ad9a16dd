use super::formula::Formula;

/// Negation normal form of `f`. `->` and `<->` are expanded; `F` and `G` are kept.
pub fn to_nnf<A: Clone>(f: &Formula<A>) -> Formula<A> {
    push(f, false)
}

/// Negation normal form of `¬f`.
pub fn negate_to_nnf<A: Clone>(f: &Formula<A>) -> Formula<A> {
    push(f, true)
}

fn push<A: Clone>(f: &Formula<A>, neg: bool) -> Formula<A> {
    use Formula::*;
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Atom(_), false) => f.clone(),
        (Atom(_), true) => Formula::not(f.clone()),
        (Not(a), _) => push(a, !neg),
        (And(a, b), false) => Formula::and(push(a, false), push(b, false)),
        (And(a, b), true) => Formula::or(push(a, true), push(b, true)),
        (Or(a, b), false) => Formula::or(push(a, false), push(b, false)),
        (Or(a, b), true) => Formula::and(push(a, true), push(b, true)),
        (Implies(a, b), false) => Formula::or(push(a, true), push(b, false)),
        (Implies(a, b), true) => Formula::and(push(a, false), push(b, true)),
        (Iff(a, b), false) => Formula::or(
            Formula::and(push(a, false), push(b, false)),
            Formula::and(push(a, true), push(b, true)),
        ),
        (Iff(a, b), true) => Formula::or(
            Formula::and(push(a, false), push(b, true)),
            Formula::and(push(a, true), push(b, false)),
        ),
        (Next(a), _) => Formula::next(push(a, neg)),
        (Eventually(a), false) => Formula::eventually(push(a, false)),
        (Eventually(a), true) => Formula::globally(push(a, true)),
        (Globally(a), false) => Formula::globally(push(a, false)),
        (Globally(a), true) => Formula::eventually(push(a, true)),
        (Until(a, b), false) => Formula::until(push(a, false), push(b, false)),
        (Until(a, b), true) => Formula::release(push(a, true), push(b, true)),
        (Release(a, b), false) => Formula::release(push(a, false), push(b, false)),
        (Release(a, b), true) => Formula::until(push(a, true), push(b, true)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Ltl;

    fn a(s: &str) -> Ltl {
        Formula::Atom(s.to_string())
    }

    #[test]
    fn negated_observational_determinism() {
        let f = Ltl::globally(Ltl::iff(a("lo@t1"), a("lo@t2")));
        let g = negate_to_nnf(&f);
        assert_eq!(
            g,
            Ltl::eventually(Ltl::or(
                Ltl::and(a("lo@t1"), Ltl::not(a("lo@t2"))),
                Ltl::and(Ltl::not(a("lo@t1")), a("lo@t2")),
            ))
        );
        assert!(g.is_nnf());
    }

    #[test]
    fn atom_negation() {
        assert_eq!(negate_to_nnf(&a("x")), Ltl::not(a("x")));
        assert_eq!(negate_to_nnf(&Ltl::not(a("x"))), a("x"));
    }


    mod props {
        use proptest::prelude::*;

        use super::*;
        use crate::fixtures::random;
        use crate::logic::eval_ltl;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn nnf_preserves_semantics(seed in any::<u64>()) {
                let mut rng = random::rng(seed);
                let ap = random::ltl_alphabet(3);
                let atoms: Vec<String> = ap.props().iter().map(|p| p.name.clone()).collect();
                let f = random::formula(&mut rng, &atoms, 3);
                let t = random::lasso(&mut rng, &ap, 6);
                let pos = to_nnf(&f);
                let neg = negate_to_nnf(&f);
                prop_assert!(pos.is_nnf() && neg.is_nnf());
                prop_assert_eq!(eval_ltl(&ap, &t, &pos), eval_ltl(&ap, &t, &f));
                prop_assert_eq!(eval_ltl(&ap, &t, &neg), !eval_ltl(&ap, &t, &f));
            }
        }
    }
}

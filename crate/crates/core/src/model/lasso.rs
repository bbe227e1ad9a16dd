use std::collections::HashMap;
use std::hash::Hash;

use super::alphabet::{Alphabet, Letter};
use super::ModelError;

/// An ultimately periodic word `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    prefix: Vec<Letter>,
    period: Vec<Letter>,
}

impl Lasso {
    pub fn new(prefix: Vec<Letter>, period: Vec<Letter>) -> Result<Self, ModelError> {
        if period.is_empty() {
            return Err(ModelError::EmptyPeriod);
        }
        Ok(Lasso { prefix, period })
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    /// Length `|u|+|v|` of the finite representation.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position at which the period starts.
    pub fn loop_start(&self) -> usize {
        self.prefix.len()
    }

    /// Maps an arbitrary position of the infinite word into `0..len()`.
    pub fn fold(&self, n: usize) -> usize {
        if n < self.prefix.len() {
            n
        } else {
            self.prefix.len() + (n - self.prefix.len()) % self.period.len()
        }
    }

    /// Successor of a position of the finite representation.
    pub fn succ(&self, i: usize) -> usize {
        if i + 1 == self.len() {
            self.loop_start()
        } else {
            i + 1
        }
    }

    /// Letter at position `n` of the infinite word.
    pub fn at(&self, n: usize) -> Letter {
        let i = self.fold(n);
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[i - self.prefix.len()]
        }
    }

    /// All letters of the finite representation.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.prefix.iter().chain(self.period.iter()).copied()
    }

    pub fn map(&self, f: impl Fn(Letter) -> Letter) -> Lasso {
        Lasso {
            prefix: self.prefix.iter().map(|&l| f(l)).collect(),
            period: self.period.iter().map(|&l| f(l)).collect(),
        }
    }

    /// The least `(prefix, period)` representation of the same infinite word.
    pub fn canonical(&self) -> Lasso {
        let mut period = primitive_root(&self.period);
        let mut prefix = self.prefix.clone();
        while let Some(&last) = prefix.last() {
            if last != *period.last().unwrap() {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Lasso { prefix, period }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Equality of the denoted infinite words.
    pub fn same_word(&self, other: &Lasso) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn render(&self, ap: &Alphabet) -> String {
        let u: Vec<_> = self.prefix.iter().map(|&l| ap.render(l)).collect();
        let v: Vec<_> = self.period.iter().map(|&l| ap.render(l)).collect();
        if u.is_empty() {
            format!("({})^w", v.join(" "))
        } else {
            format!("{} ({})^w", u.join(" "), v.join(" "))
        }
    }

    /// Builds the lasso produced by a deterministic system whose configuration
    /// recurs: `step` maps a configuration to the letter it emits and its successor.
    pub fn from_recurrence<K, F>(start: K, mut step: F) -> Lasso
    where
        K: Eq + Hash + Clone,
        F: FnMut(&K) -> (Letter, K),
    {
        let mut seen: HashMap<K, usize> = HashMap::new();
        let mut letters = Vec::new();
        let mut cur = start;
        loop {
            if let Some(&k) = seen.get(&cur) {
                let period = letters.split_off(k);
                return Lasso {
                    prefix: letters,
                    period,
                }
                .canonical();
            }
            seen.insert(cur.clone(), letters.len());
            let (letter, next) = step(&cur);
            letters.push(letter);
            cur = next;
        }
    }
}

fn primitive_root(w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

/// Least common multiple, used for period alignment.
pub fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rolls_prefix_into_period() {
        let l = Lasso::new(vec![1, 2, 3], vec![2, 3]).unwrap();
        let c = l.canonical();
        assert_eq!(c.prefix(), &[1]);
        assert_eq!(c.period(), &[2, 3]);
    }

    #[test]
    fn canonical_reduces_period_powers() {
        let l = Lasso::new(vec![], vec![4, 4, 4]).unwrap();
        assert_eq!(l.canonical(), Lasso::new(vec![], vec![4]).unwrap());
    }

    #[test]
    fn empty_period_is_rejected() {
        assert!(Lasso::new(vec![1], vec![]).is_err());
    }

    #[test]
    fn positions_wrap_into_the_period() {
        let l = Lasso::new(vec![0, 1], vec![2, 3]).unwrap();
        assert_eq!(l.at(0), 0);
        assert_eq!(l.at(3), 3);
        assert_eq!(l.at(4), 2);
        assert_eq!(l.at(7), 3);
        assert_eq!(l.succ(3), 2);
    }

    #[test]
    fn lcm_small() {
        assert_eq!(lcm(2, 3), 6);
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(lcm(1, 5), 5);
    }
}

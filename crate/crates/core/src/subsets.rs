//! Index subsets in the order every search uses: by size, then lexicographically.

/// The `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let c = cur.as_mut().unwrap();
        // advance to the next combination, if any
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

/// All subsets of `0..n` with sizes in `sizes`, by size and then lexicographically.
pub fn by_size(n: usize, sizes: std::ops::RangeInclusive<usize>) -> impl Iterator<Item = Vec<usize>> {
    sizes.flat_map(move |k| combinations(n, k))
}

pub fn pick<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order() {
        let all: Vec<_> = by_size(3, 0..=3).collect();
        assert_eq!(
            all,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
        assert_eq!(combinations(2, 3).count(), 0);
        assert_eq!(combinations(0, 0).count(), 1);
        assert_eq!(combinations(6, 3).count(), 20);
    }
}

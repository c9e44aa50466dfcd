//! Streaming pairwise summation.
//!
//! Partial sums are merged like a binary counter, so the result depends only
//! on the order in which terms are pushed. Rounding error grows as
//! `O(log n)` instead of `O(n)`.

use std::ops::Add;

use num_traits::Zero;

#[derive(Debug, Clone)]
pub struct TreeSum<V> {
    // (level, partial) with strictly decreasing levels from bottom to top
    stack: Vec<(u32, V)>,
}

impl<V> Default for TreeSum<V> {
    fn default() -> Self {
        Self { stack: Vec::new() }
    }
}

impl<V: Copy + Add<Output = V> + Zero> TreeSum<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: V) {
        let mut level = 0;
        let mut acc = value;
        while let Some(&(top_level, top)) = self.stack.last() {
            if top_level != level {
                break;
            }
            self.stack.pop();
            acc = top + acc;
            level += 1;
        }
        self.stack.push((level, acc));
    }

    pub fn total(&self) -> V {
        self.stack
            .iter()
            .rev()
            .fold(V::zero(), |acc, &(_, partial)| partial + acc)
    }
}

impl<V: Copy + Add<Output = V> + Zero> FromIterator<V> for TreeSum<V> {
    fn from_iter<I: IntoIterator<Item = V>>(iter: I) -> Self {
        let mut sum = Self::new();
        for v in iter {
            sum.push(v);
        }
        sum
    }
}

/// Pairwise sum of an iterator.
pub fn tree_sum<V, I>(iter: I) -> V
where
    V: Copy + Add<Output = V> + Zero,
    I: IntoIterator<Item = V>,
{
    iter.into_iter().collect::<TreeSum<V>>().total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_match_exact_integers() {
        for n in 0..100u32 {
            let s: f64 = tree_sum((1..=n).map(f64::from));
            assert_eq!(s, f64::from(n * (n + 1) / 2));
        }
    }

    #[test]
    fn stays_accurate_on_many_small_terms() {
        let n = 1_000_000;
        let s: f64 = tree_sum(std::iter::repeat_n(0.1, n));
        assert!((s - 100_000.0).abs() < 1e-8, "{s}");
    }
}

//! Prefix-sum tree over per-vertex weights.

#[derive(Debug, Clone, Default)]
pub(crate) struct Fenwick {
    tree: Vec<u128>,
}

impl Fenwick {
    pub fn from_slice(values: &[u128]) -> Self {
        let n = values.len();
        let mut tree = vec![0u128; n + 1];
        for (i, &v) in values.iter().enumerate() {
            tree[i + 1] += v;
            let parent = (i + 1) + lowbit(i + 1);
            if parent <= n {
                let carried = tree[i + 1];
                tree[parent] += carried;
            }
        }
        Self { tree }
    }

    pub fn len(&self) -> usize {
        self.tree.len() - 1
    }

    /// Applies `values[i] += delta` where delta may be negative (two's complement).
    pub fn add(&mut self, i: usize, delta: i128) {
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] = self.tree[k].wrapping_add(delta as u128);
            k += lowbit(k);
        }
    }

    pub fn total(&self) -> u128 {
        self.prefix(self.len())
    }

    /// Sum of the first `count` values.
    pub fn prefix(&self, count: usize) -> u128 {
        let mut k = count;
        let mut acc = 0u128;
        while k > 0 {
            acc = acc.wrapping_add(self.tree[k]);
            k -= lowbit(k);
        }
        acc
    }

    /// Smallest index `i` whose inclusive prefix sum exceeds `target`, together
    /// with `target` minus the weight before `i`. Requires `target < total()`.
    pub fn find(&self, mut target: u128) -> (usize, u128) {
        let n = self.len();
        let mut pos = 0usize;
        let mut step = if n == 0 {
            0
        } else {
            1usize << (usize::BITS - 1 - n.leading_zeros())
        };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        (pos, target)
    }
}

fn lowbit(k: usize) -> usize {
    k & k.wrapping_neg()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_matches_linear_scan() {
        let values: Vec<u128> = vec![0, 3, 0, 0, 1, 5, 0, 2];
        let mut f = Fenwick::from_slice(&values);
        assert_eq!(f.total(), 11);
        for target in 0..11u128 {
            let mut acc = 0;
            let mut expected = None;
            for (i, &v) in values.iter().enumerate() {
                if acc + v > target {
                    expected = Some((i, target - acc));
                    break;
                }
                acc += v;
            }
            assert_eq!(Some(f.find(target)), expected);
        }
        f.add(1, -3);
        f.add(6, 4);
        assert_eq!(f.total(), 12);
        assert_eq!(f.find(0), (4, 0));
        assert_eq!(f.find(6), (6, 0));
        assert_eq!(f.prefix(5), 1);
    }
}

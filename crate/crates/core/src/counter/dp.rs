//! Bounded-component table for multisets and sets.
//!
//! Components are ordered by size, then by rank within their size. A bound
//! `(s, N)` admits every component of size below `s` and the first `N`
//! components of size `s`. With `F(m, t)` the vector, indexed by number of
//! elements, of bags of total size `m` whose components all have size at
//! most `t`:
//!
//! ```text
//! F(m, t) = Σ_k choose(A(t), k) · shift_k F(m - k t, t - 1)
//! count(m, (s, N)) = Σ_k choose(N, k) · shift_k F(m - k s, s - 1)
//! ```
//!
//! where `choose` picks `k` components among `A(t)` kinds with repetition
//! for multisets and without for sets. Peeling one greatest component `c`
//! recovers `M(n, c) = M(n, pred c) + M(n - |c|, c)` for multisets and
//! `M(n, pred c) + M(n - |c|, pred c)` for sets.
//!
//! The element-count axis is capped: at `max_card` when bounded, otherwise
//! at `min_card` with the last slot holding every larger count.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::grammar::Restriction;

use super::NodeId;

#[derive(Debug, Clone)]
pub(crate) struct BagTable {
    pub arg: NodeId,
    pub multi: bool,
    pub restr: Restriction,
    cap: usize,
    saturating: bool,
    /// `rows[m][t]` for `m >= 1` and `t < m`; `rows[0]` is empty.
    rows: Vec<Vec<Vec<BigUint>>>,
    /// `binom[t][k]` = ways to pick `k` components among the `A(t)` of size `t`.
    binom: Vec<Vec<BigUint>>,
}

impl BagTable {
    pub fn new(arg: NodeId, multi: bool, restr: Restriction) -> BagTable {
        BagTable {
            arg,
            multi,
            restr,
            cap: restr.max_card.unwrap_or(restr.min_card),
            saturating: restr.max_card.is_none(),
            rows: Vec::new(),
            binom: Vec::new(),
        }
    }

    fn slot(&self, elements: usize) -> Option<usize> {
        if self.saturating {
            Some(elements.min(self.cap))
        } else if elements <= self.cap {
            Some(elements)
        } else {
            None
        }
    }

    fn zeros(&self) -> Vec<BigUint> {
        vec![BigUint::zero(); self.cap + 1]
    }

    fn unit(&self, elements: usize) -> Vec<BigUint> {
        let mut v = self.zeros();
        if let Some(j) = self.slot(elements) {
            v[j] = BigUint::one();
        }
        v
    }

    fn add_shifted(&self, acc: &mut [BigUint], v: &[BigUint], k: usize, factor: &BigUint) {
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if let Some(t) = self.slot(j + k) {
                acc[t] += x * factor;
            }
        }
    }

    /// Whether slot `j` fits the restriction once `used` elements are placed.
    fn allowed(&self, used: usize, j: usize) -> bool {
        if self.saturating {
            j == self.cap || used + j >= self.restr.min_card
        } else {
            self.restr.contains(used + j)
        }
    }

    /// Ways to pick `k` components among `kinds`.
    pub fn choose(&self, kinds: &BigUint, k: usize) -> BigUint {
        let mut acc = BigUint::one();
        for i in 1..=k {
            let top = if self.multi {
                kinds + BigUint::from(i - 1)
            } else {
                let i = BigUint::from(i - 1);
                if *kinds <= i {
                    return BigUint::zero();
                }
                kinds - i
            };
            acc = acc * top / BigUint::from(i);
        }
        acc
    }

    fn binom(&mut self, a: &[BigUint], t: usize, k: usize) -> BigUint {
        while self.binom.len() <= t {
            self.binom.push(vec![BigUint::one()]);
        }
        while self.binom[t].len() <= k {
            let i = self.binom[t].len();
            let prev = &self.binom[t][i - 1];
            let top = if self.multi {
                &a[t] + BigUint::from(i - 1)
            } else if a[t] < BigUint::from(i) {
                BigUint::zero()
            } else {
                &a[t] - BigUint::from(i - 1)
            };
            let next = prev * top / BigUint::from(i);
            self.binom[t].push(next);
        }
        self.binom[t][k].clone()
    }

    /// `F(x, s)`: bags of size `x` with components of size at most `s`.
    /// Reads `a[x]` when `s >= x`.
    pub fn upto(&self, a: &[BigUint], x: usize, s: usize) -> Vec<BigUint> {
        if x == 0 {
            return self.unit(0);
        }
        if s == 0 {
            return self.zeros();
        }
        if s >= x {
            let mut v = self.rows[x][x - 1].clone();
            if !a[x].is_zero() {
                if let Some(j) = self.slot(1) {
                    v[j] += &a[x];
                }
            }
            return v;
        }
        self.rows[x][s].clone()
    }

    /// Rows are computed through `upto`; row `m` reads `a` below `m` only.
    /// Returns the approximate number of bytes added.
    pub fn extend_rows(&mut self, a: &[BigUint], upto: usize) -> Result<usize> {
        let mut bytes = 0;
        while self.rows.len() <= upto {
            let m = self.rows.len();
            let mut row: Vec<Vec<BigUint>> = Vec::with_capacity(m);
            if m > 0 {
                row.push(self.zeros());
                for t in 1..m {
                    let mut acc = row[t - 1].clone();
                    for k in 1..=m / t {
                        let ways = self.binom(a, t, k);
                        if ways.is_zero() {
                            break;
                        }
                        let rest = self.upto(a, m - k * t, t - 1);
                        self.add_shifted(&mut acc, &rest, k, &ways);
                    }
                    bytes += acc.iter().map(|x| 8 + (x.bits() as usize).div_ceil(8)).sum::<usize>();
                    row.push(acc);
                }
            }
            self.rows.push(row);
        }
        Ok(bytes)
    }

    /// Allowed bags in `rows[m][t]`.
    pub fn row_sum(&self, m: usize, t: usize) -> BigUint {
        self.rows[m][t]
            .iter()
            .enumerate()
            .filter(|(j, _)| self.allowed(0, *j))
            .map(|(_, x)| x)
            .sum()
    }

    /// All allowed bags of size `n`; reads `a[n]`.
    pub fn count(&self, a: &[BigUint], n: usize) -> BigUint {
        self.bounded_count(a, n, n, &a[n], 0)
    }

    /// Bags of size `n` under bound `(s, kinds)` that complete a bag already
    /// holding `used` elements.
    pub fn bounded_count(&self, a: &[BigUint], n: usize, s: usize, kinds: &BigUint, used: usize) -> BigUint {
        if s == 0 {
            return if n == 0 && self.restr.contains(used) {
                BigUint::one()
            } else {
                BigUint::zero()
            };
        }
        let mut total = BigUint::zero();
        for k in 0..=n / s {
            let ways = self.choose(kinds, k);
            if ways.is_zero() {
                break;
            }
            let rest = self.upto(a, n - k * s, s - 1);
            let inner: BigUint = rest
                .iter()
                .enumerate()
                .filter(|(j, _)| self.allowed(used + k, *j))
                .map(|(_, x)| x)
                .sum();
            if !inner.is_zero() {
                total += ways * inner;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn partitions_from_single_part_per_size() {
        // One component per size: integer partitions.
        let a = big(&[0, 1, 1, 1, 1, 1, 1, 1, 1]);
        let mut t = BagTable::new(0, true, Restriction::UNRESTRICTED);
        t.extend_rows(&a, 8).unwrap();
        let p: Vec<BigUint> = (0..=8).map(|n| t.count(&a, n)).collect();
        assert_eq!(p, big(&[1, 1, 2, 3, 5, 7, 11, 15, 22]));
    }

    #[test]
    fn distinct_parts_and_card_caps() {
        let a = big(&[0, 1, 1, 1, 1, 1, 1, 1]);
        let mut t = BagTable::new(0, false, Restriction::UNRESTRICTED);
        t.extend_rows(&a, 7).unwrap();
        let q: Vec<BigUint> = (0..=7).map(|n| t.count(&a, n)).collect();
        assert_eq!(q, big(&[1, 1, 1, 2, 2, 3, 4, 5]));

        // At most two parts: floor(n/2) + 1.
        let mut t = BagTable::new(0, true, Restriction::at_most(2));
        t.extend_rows(&a, 7).unwrap();
        let r: Vec<BigUint> = (0..=7).map(|n| t.count(&a, n)).collect();
        assert_eq!(r, big(&[1, 1, 2, 2, 3, 3, 4, 4]));

        // At least three parts: p(n) minus partitions into at most two parts.
        let mut t = BagTable::new(0, true, Restriction::at_least(3));
        t.extend_rows(&a, 7).unwrap();
        let s: Vec<BigUint> = (0..=7).map(|n| t.count(&a, n)).collect();
        assert_eq!(s, big(&[0, 0, 0, 1, 2, 4, 7, 11]));
    }

    #[test]
    fn choose_with_and_without_repetition() {
        let m = BagTable::new(0, true, Restriction::UNRESTRICTED);
        let s = BagTable::new(0, false, Restriction::UNRESTRICTED);
        let three = BigUint::from(3u32);
        assert_eq!(m.choose(&three, 2), BigUint::from(6u32));
        assert_eq!(s.choose(&three, 2), BigUint::from(3u32));
        assert_eq!(s.choose(&three, 4), BigUint::zero());
        assert_eq!(m.choose(&BigUint::zero(), 0), BigUint::one());
    }
}

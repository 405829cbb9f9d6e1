//! Labeled counting on exponentially normalized values `ĉ_n = c_n / n!`.
//!
//! In normalized form the labeled product is a plain convolution, so the
//! same demand-driven scheme as the unlabeled counter applies:
//!
//! * `Seq`: `ŝ_n = Σ â_k ŝ_{n-k}`, or `Σ_L [x^n] Â^L` over the allowed lengths;
//! * `MSet` (labeled set): `n b̂_n = Σ k â_k b̂_{n-k}`, or `Σ_L [x^n] Â^L / L!`;
//! * `Cycle`: `Σ_L [x^n] Â^L / L`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grammar::{CollectionKind, Mode, Restriction, SpecSystem};

use super::{accept, is_simple, Graph, Node, NodeId};

fn ratio(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Labeled count tables for one class of a labeled-mode system.
#[derive(Debug, Clone)]
pub struct LabeledCounter {
    graph: Graph,
    len: usize,
    values: Vec<Vec<BigRational>>,
    suffix: Vec<Vec<Vec<Option<BigRational>>>>,
    /// `powers[node][m][L - 2]` = `[x^m] Â(x)^L`.
    powers: Vec<Vec<Vec<BigRational>>>,
    visiting: Vec<bool>,
    factorial: Vec<BigUint>,
}

impl LabeledCounter {
    pub fn new(sys: &SpecSystem, class: &str) -> Result<LabeledCounter> {
        if sys.mode() != Mode::Labeled {
            return Err(Error::Mode("labeled counting needs a labeled-mode system".into()));
        }
        let rooted = accept(sys, class)?;
        let graph = Graph::compile(&rooted, class);
        let n = graph.len();
        Ok(LabeledCounter {
            graph,
            len: 0,
            values: vec![Vec::new(); n],
            suffix: vec![Vec::new(); n],
            powers: vec![Vec::new(); n],
            visiting: vec![false; n],
            factorial: vec![BigUint::one()],
        })
    }

    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        for size in self.len..=n {
            for node in 0..self.graph.len() {
                self.ensure(node, size);
            }
            self.len = size + 1;
            if self.factorial.len() <= size {
                let next = &self.factorial[size - 1] * BigUint::from(size);
                self.factorial.push(next);
            }
        }
        Ok(())
    }

    /// Number of labeled structures on `n` labels.
    pub fn count(&mut self, n: usize) -> Result<BigUint> {
        self.extend_to(n)?;
        let scaled = &self.values[self.graph.root][n] * BigRational::from_integer(BigInt::from(self.factorial[n].clone()));
        assert!(
            scaled.is_integer() && !scaled.is_negative(),
            "labeled count at size {n} is not integral: {scaled}"
        );
        Ok(scaled.to_integer().to_biguint().expect("non-negative"))
    }

    pub fn series(&mut self, upto: usize) -> Result<Vec<BigUint>> {
        (0..=upto).map(|n| self.count(n)).collect()
    }

    fn ensure(&mut self, node: NodeId, n: usize) {
        if self.values[node].len() > n {
            return;
        }
        assert!(
            !self.visiting[node],
            "same-size dependency cycle at node {}; the analyzer should have rejected this system",
            self.graph.desc[node]
        );
        self.visiting[node] = true;
        let v = self.compute(node, n);
        self.visiting[node] = false;
        self.values[node].push(v);
    }

    fn compute(&mut self, node: NodeId, n: usize) -> BigRational {
        let indicator = |b: bool| if b { BigRational::one() } else { BigRational::zero() };
        match self.graph.nodes[node].clone() {
            Node::Epsilon => indicator(n == 0),
            Node::Atom(_) => indicator(n == 1),
            Node::Ref(t) => {
                self.ensure(t, n);
                self.values[t][n].clone()
            }
            Node::Union(bs) => {
                let mut total = BigRational::zero();
                for b in bs {
                    self.ensure(b, n);
                    total += &self.values[b][n];
                }
                total
            }
            Node::Prod(fs) => self.product_suffix(node, &fs, 0, n),
            Node::Coll { kind, arg, restr } => {
                if n == 0 {
                    return indicator(restr.contains(0));
                }
                self.ensure(arg, n);
                match kind {
                    CollectionKind::Seq if is_simple(&restr) => {
                        let mut total = self.values[arg][n].clone();
                        for k in 1..n {
                            let a = &self.values[arg][k];
                            if !a.is_zero() {
                                total += a * &self.values[node][n - k];
                            }
                        }
                        total
                    }
                    CollectionKind::MSet if is_simple(&restr) => {
                        // Unrestricted set values, with b̂_0 = 1 regardless of min.
                        let mut total = ratio(n) * &self.values[arg][n];
                        for k in 1..n {
                            let a = &self.values[arg][k];
                            if !a.is_zero() {
                                total += ratio(k) * a * &self.values[node][n - k];
                            }
                        }
                        total / ratio(n)
                    }
                    _ => self.by_length(node, kind, restr, n),
                }
            }
        }
    }

    fn by_length(&mut self, node: NodeId, kind: CollectionKind, restr: Restriction, n: usize) -> BigRational {
        self.ensure_powers(node, n);
        let hi = restr.max_card.unwrap_or(n).min(n);
        let mut total = BigRational::zero();
        let mut fact = BigInt::one();
        for len in 1..=hi {
            fact *= BigInt::from(len);
            if len < restr.min_card {
                continue;
            }
            let p = self.power(node, n, len);
            if p.is_zero() {
                continue;
            }
            total += match kind {
                CollectionKind::Seq => p,
                CollectionKind::MSet => p / BigRational::from_integer(fact.clone()),
                CollectionKind::Cycle => p / ratio(len),
                CollectionKind::PSet => unreachable!("PSet is rejected in labeled mode"),
            };
        }
        total
    }

    fn power(&self, node: NodeId, m: usize, len: usize) -> BigRational {
        let Node::Coll { arg, .. } = self.graph.nodes[node] else { unreachable!() };
        match len {
            1 => self.values[arg][m].clone(),
            _ if len > m => BigRational::zero(),
            _ => self.powers[node][m][len - 2].clone(),
        }
    }

    fn ensure_powers(&mut self, node: NodeId, upto: usize) {
        let Node::Coll { arg, .. } = self.graph.nodes[node] else { unreachable!() };
        while self.powers[node].len() <= upto {
            let m = self.powers[node].len();
            let mut row = Vec::new();
            for len in 2..=m {
                let mut total = BigRational::zero();
                for i in 1..=(m + 1 - len) {
                    let a = &self.values[arg][i];
                    if !a.is_zero() {
                        total += a * self.power(node, m - i, len - 1);
                    }
                }
                row.push(total);
            }
            self.powers[node].push(row);
        }
    }

    fn product_suffix(&mut self, node: NodeId, fs: &[NodeId], i: usize, n: usize) -> BigRational {
        let k = fs.len();
        if i == k {
            return if n == 0 { BigRational::one() } else { BigRational::zero() };
        }
        if i == k - 1 {
            self.ensure(fs[i], n);
            return self.values[fs[i]][n].clone();
        }
        if i > 0 {
            if let Some(Some(v)) = self.suffix[node].get(i - 1).and_then(|s| s.get(n)) {
                return v.clone();
            }
        }
        let f = fs[i];
        let mut total = BigRational::zero();
        let floors = (self.graph.min_size[f], self.graph.suffix_floor(fs, i + 1));
        if let (Some(lo), Some(rest_floor)) = floors {
            if n >= lo + rest_floor {
                for m in lo..=n - rest_floor {
                    if m == n {
                        self.ensure(f, n);
                    }
                    if !self.values[f][m].is_zero() {
                        total += self.values[f][m].clone() * self.product_suffix(node, fs, i + 1, n - m);
                    }
                }
            }
        }
        if i > 0 {
            if self.suffix[node].len() < k - 2 {
                self.suffix[node].resize(k - 2, Vec::new());
            }
            let slot = &mut self.suffix[node][i - 1];
            if slot.len() <= n {
                slot.resize(n + 1, None);
            }
            slot[n] = Some(total.clone());
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::to_u64_series;
    use crate::dsl::parse_system;

    fn labeled(text: &str, upto: usize) -> Vec<u64> {
        let s = parse_system(text, None, Mode::Labeled).unwrap().system;
        let root = s.root().to_string();
        to_u64_series(&LabeledCounter::new(&s, &root).unwrap().series(upto).unwrap()).unwrap()
    }

    #[test]
    fn linear_orders_and_rooted_trees() {
        assert_eq!(labeled("L = Seq(Atom)", 5), vec![1, 1, 2, 6, 24, 120]);
        assert_eq!(labeled("T = Prod(Atom, MSet(T))", 5), vec![0, 1, 2, 9, 64, 625]);
    }

    #[test]
    fn sets_cycles_and_ranges() {
        // Set partitions (Bell numbers).
        assert_eq!(labeled("B = MSet(MSet(Atom, card >= 1))", 6), vec![1, 1, 2, 5, 15, 52, 203]);
        // Permutations as sets of cycles.
        assert_eq!(labeled("P = MSet(Cycle(Atom, card >= 1))", 5), vec![1, 1, 2, 6, 24, 120]);
        // Involutions: cycles of length 1 or 2.
        assert_eq!(labeled("I = MSet(Cycle(Atom, 1 <= card <= 2))", 6), vec![1, 1, 2, 4, 10, 26, 76]);
        // Sets of exactly two nonempty blocks: Stirling S(n, 2).
        assert_eq!(labeled("S = MSet(MSet(Atom, card >= 1), card = 2)", 5), vec![0, 0, 1, 3, 7, 15]);
    }

    #[test]
    fn rigid_classes_scale_by_factorial() {
        assert_eq!(labeled("B = Union(Atom, Prod(Atom, B, B))", 5), vec![0, 1, 0, 6, 0, 240]);
    }

    #[test]
    fn left_recursive_list() {
        assert_eq!(labeled("A = Union(Prod(A, Atom), Epsilon)", 5), vec![1, 1, 2, 6, 24, 120]);
    }

    #[test]
    fn unlabeled_system_is_a_mode_error() {
        let s = parse_system("L = Seq(Atom)", None, Mode::Unlabeled).unwrap().system;
        assert!(matches!(LabeledCounter::new(&s, "L"), Err(Error::Mode(_))));
    }
}

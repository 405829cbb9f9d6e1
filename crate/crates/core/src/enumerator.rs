//! Canonical enumeration, ranking, unranking and uniform random generation.
//!
//! Structures of a class are ordered by size, then by rank within their
//! size:
//!
//! * `Union`: blocks by branch index;
//! * `Prod`: blocks by size composition, lexicographically ascending, then
//!   mixed radix over the factor ranks with the first factor most significant;
//! * `Seq`: blocks by length ascending, then as a product;
//! * `MSet`/`PSet`: children stored greatest first, bags compared
//!   lexicographically on their children;
//! * `Cycle`: the order of the minimal-rotation representatives as sequences.
//!
//! Cycles are enumerated by filtering sequences down to their minimal
//! rotations, so they can be listed and ranked but not unranked or sampled.

use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::counter::{BagTable, CollectionSite, Counter, Graph, Node, NodeId};
use crate::error::{Error, Result};
use crate::grammar::{CollectionKind, Mode, Restriction, SpecSystem, Structure};

/// Version of the seeded random engine; bumped whenever a seed may map to a
/// different structure.
pub const RANDOM_ENGINE_VERSION: u32 = 1;

type Gen<'a, T> = Box<dyn Iterator<Item = T> + 'a>;
type Suffix<'a> = Rc<dyn Fn(usize, usize) -> BigUint + 'a>;

fn empty<'a, T: 'a>() -> Gen<'a, T> {
    Box::new(std::iter::empty())
}

fn once<'a, T: 'a>(x: T) -> Gen<'a, T> {
    Box::new(std::iter::once(x))
}

/// True iff no rotation of `keys` is lexicographically smaller.
fn is_min_rotation<K: Ord>(keys: &[K]) -> bool {
    let n = keys.len();
    (1..n).all(|r| {
        let rotated = keys[r..].iter().chain(&keys[..r]);
        rotated.cmp(keys.iter()) != std::cmp::Ordering::Less
    })
}

/// Enumeration engine for one class of an unlabeled system.
///
/// Call [`Enumerator::prepare`] with the largest size of interest; queries
/// then take `&self`. Sealing makes the tables read-only so an enumerator can
/// be shared between threads, each running its own iterators.
#[derive(Debug, Clone)]
pub struct Enumerator {
    counter: Counter,
    has_cycle: bool,
    ready: usize,
}

impl Enumerator {
    pub fn new(sys: &SpecSystem, class: &str) -> Result<Enumerator> {
        if sys.mode() == Mode::Labeled {
            return Err(Error::Mode(
                "enumeration, ranking and random generation are defined for unlabeled classes only".into(),
            ));
        }
        Ok(Enumerator::from_counter(Counter::new(sys, class)?))
    }

    pub fn from_counter(counter: Counter) -> Enumerator {
        let has_cycle = counter.graph.has_cycle_constructor();
        Enumerator {
            counter,
            has_cycle,
            ready: 0,
        }
    }

    pub fn with_table_limit_mb(mut self, limit_mb: usize) -> Enumerator {
        self.counter = self.counter.with_table_limit_mb(limit_mb);
        self
    }

    pub fn counter(&self) -> &Counter {
        &self.counter
    }

    pub fn class(&self) -> &str {
        self.counter.class()
    }

    /// Builds every table needed for sizes `0..=n`.
    pub fn prepare(&mut self, n: usize) -> Result<()> {
        if n < self.ready {
            return Ok(());
        }
        self.counter.extend_to(n)?;
        self.counter.prepare_rank_tables()?;
        self.ready = self.counter.prepared();
        Ok(())
    }

    pub fn seal(&mut self) {
        self.counter.seal();
    }

    /// Sizes `0..prepared()` can be queried.
    pub fn prepared(&self) -> usize {
        self.ready
    }

    /// Whether unranking and random generation are available.
    pub fn supports_unrank(&self) -> bool {
        !self.has_cycle
    }

    pub fn collection_sites(&self) -> Vec<CollectionSite> {
        self.counter.collection_sites()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n >= self.ready {
            return Err(Error::NotPrepared {
                requested: n,
                prepared: self.ready.saturating_sub(1),
            });
        }
        Ok(())
    }

    fn graph(&self) -> &Graph {
        &self.counter.graph
    }

    fn root(&self) -> NodeId {
        self.counter.graph.root
    }

    fn c(&self, node: NodeId, m: usize) -> &BigUint {
        self.counter.node_count(node, m)
    }

    fn bag(&self, node: NodeId) -> &BagTable {
        self.counter.bags[node].as_ref().expect("bag table")
    }

    fn bags_below(&self, node: NodeId, n: usize, s: usize, kinds: &BigUint, used: usize) -> BigUint {
        let table = self.bag(node);
        table.bounded_count(&self.counter.counts[table.arg], n, s, kinds, used)
    }

    pub fn count(&self, n: usize) -> Result<BigUint> {
        self.check(n)?;
        Ok(self.c(self.root(), n).clone())
    }

    /// Structures of size `n` in canonical order, generated lazily.
    pub fn iter(&self, n: usize) -> Result<impl Iterator<Item = Structure> + '_> {
        self.check(n)?;
        Ok(self.gen(self.root(), n))
    }

    pub fn list(&self, n: usize, limit: Option<usize>) -> Result<Vec<Structure>> {
        let it = self.iter(n)?;
        Ok(match limit {
            Some(k) => it.take(k).collect(),
            None => it.collect(),
        })
    }

    /// Position of `s` among the structures of its size.
    pub fn rank(&self, s: &Structure) -> Result<BigUint> {
        self.check(s.size())?;
        self.rank_at(self.root(), s)
    }

    pub fn unrank(&self, n: usize, r: &BigUint) -> Result<Structure> {
        self.check(n)?;
        if self.has_cycle {
            return Err(Error::Unsupported(format!(
                "unranking class {} which contains a Cycle constructor",
                self.class()
            )));
        }
        let count = self.c(self.root(), n);
        if r >= count {
            return Err(Error::Range {
                rank: r.clone(),
                count: count.clone(),
                size: n,
            });
        }
        Ok(self.unrank_at(self.root(), n, r.clone()))
    }

    /// A uniformly random structure of size `n`, determined by `seed`.
    pub fn random(&self, n: usize, seed: u64) -> Result<Structure> {
        self.check(n)?;
        if self.has_cycle {
            return Err(Error::Unsupported(format!(
                "random generation for class {} which contains a Cycle constructor",
                self.class()
            )));
        }
        let count = self.c(self.root(), n).clone();
        if count.is_zero() {
            return Err(Error::Empty(n));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let r = uniform_below(&mut rng, &count);
        self.unrank(n, &r)
    }

    /// Number of structures of a collection site at size `n` found by the
    /// generate-and-filter path.
    pub fn cycle_filter_count(&self, site: &CollectionSite, n: usize) -> Result<usize> {
        self.check(n)?;
        Ok(self.gen(site.node, n).count())
    }

    fn mismatch(&self, node: NodeId, s: &Structure, why: &str) -> Error {
        Error::Membership {
            class: self.class().to_string(),
            reason: format!("{s} is not a structure of {}: {why}", self.graph().desc[node]),
        }
    }

    // ---- ranking ----

    fn rank_at(&self, v: NodeId, s: &Structure) -> Result<BigUint> {
        let n = s.size();
        match (&self.graph().nodes[v], s) {
            (Node::Epsilon, Structure::Epsilon) => Ok(BigUint::zero()),
            (Node::Atom(l), Structure::Atom(x)) if l == x => Ok(BigUint::zero()),
            (Node::Atom(_), Structure::Atom(_)) => Err(self.mismatch(v, s, "atom label differs")),
            (Node::Ref(t), _) => self.rank_at(*t, s),
            (Node::Union(bs), Structure::Union(i, child)) => {
                if *i >= bs.len() {
                    return Err(self.mismatch(v, s, "branch index out of range"));
                }
                let mut r = self.rank_at(bs[*i], child)?;
                for b in &bs[..*i] {
                    r += self.c(*b, n);
                }
                Ok(r)
            }
            (Node::Prod(fs), Structure::Prod(cs)) => {
                if fs.len() != cs.len() {
                    return Err(self.mismatch(v, s, "wrong number of factors"));
                }
                let ranks = fs.iter().zip(cs).map(|(f, c)| self.rank_at(*f, c)).collect::<Result<Vec<_>>>()?;
                let sizes: Vec<usize> = cs.iter().map(Structure::size).collect();
                Ok(self.tuple_rank(fs, &sizes, &ranks, n, |i, m| self.counter.prod_suffix(v, i, m)))
            }
            (Node::Coll { kind, arg, restr }, _) => self.rank_collection(v, *kind, *arg, *restr, s),
            _ => Err(self.mismatch(v, s, "constructor differs")),
        }
    }

    fn rank_collection(&self, v: NodeId, kind: CollectionKind, arg: NodeId, restr: Restriction, s: &Structure) -> Result<BigUint> {
        let cs = match (kind, s) {
            (CollectionKind::Seq, Structure::Seq(cs))
            | (CollectionKind::MSet, Structure::MSet(cs))
            | (CollectionKind::PSet, Structure::PSet(cs))
            | (CollectionKind::Cycle, Structure::Cycle(cs)) => cs,
            _ => return Err(self.mismatch(v, s, "constructor differs")),
        };
        if !restr.contains(cs.len()) {
            return Err(self.mismatch(v, s, "cardinality outside the restriction"));
        }
        let n = s.size();
        let ranks = cs.iter().map(|c| self.rank_at(arg, c)).collect::<Result<Vec<_>>>()?;
        let sizes: Vec<usize> = cs.iter().map(Structure::size).collect();
        match kind {
            CollectionKind::Seq => {
                let len = cs.len();
                let mut r = BigUint::zero();
                for shorter in restr.min_card..len {
                    r += self.counter.power(v, n, shorter);
                }
                let nodes = vec![arg; len];
                r += self.tuple_rank(&nodes, &sizes, &ranks, n, |i, m| self.counter.power(v, m, len - i));
                Ok(r)
            }
            CollectionKind::MSet | CollectionKind::PSet => {
                let keys: Vec<(usize, &BigUint)> = sizes.iter().copied().zip(&ranks).collect();
                let strict = kind == CollectionKind::PSet;
                for w in keys.windows(2) {
                    if w[1] > w[0] || (strict && w[1] == w[0]) {
                        let why = if strict { "children not strictly decreasing" } else { "children not non-increasing" };
                        return Err(self.mismatch(v, s, why));
                    }
                }
                let mut r = BigUint::zero();
                let mut rem = n;
                for (i, (size, q)) in keys.iter().enumerate() {
                    r += self.bags_below(v, rem, *size, q, i);
                    rem -= size;
                }
                Ok(r)
            }
            CollectionKind::Cycle => {
                let keys: Vec<(usize, &BigUint)> = sizes.iter().copied().zip(&ranks).collect();
                if !is_min_rotation(&keys) {
                    return Err(self.mismatch(v, s, "children are not the minimal rotation"));
                }
                self.gen(v, n)
                    .position(|x| &x == s)
                    .map(BigUint::from)
                    .ok_or_else(|| self.mismatch(v, s, "not generated"))
            }
        }
    }

    /// Rank of a tuple within its size: offset of its composition block plus
    /// the mixed-radix index of the factor ranks.
    fn tuple_rank(&self, nodes: &[NodeId], sizes: &[usize], ranks: &[BigUint], n: usize, suf: impl Fn(usize, usize) -> BigUint) -> BigUint {
        let mut total = BigUint::zero();
        let mut pre = BigUint::one();
        let mut rem = n;
        for (i, (&node, &size)) in nodes.iter().zip(sizes).enumerate() {
            let mut block = BigUint::zero();
            for m in 0..size {
                let c = self.c(node, m);
                if !c.is_zero() {
                    block += c * suf(i + 1, rem - m);
                }
            }
            total += &pre * block;
            pre *= self.c(node, size);
            rem -= size;
        }
        let mut radix = BigUint::zero();
        for ((&node, &size), r) in nodes.iter().zip(sizes).zip(ranks) {
            radix = radix * self.c(node, size) + r;
        }
        total + radix
    }

    // ---- unranking ----

    fn unrank_at(&self, v: NodeId, n: usize, mut r: BigUint) -> Structure {
        match self.graph().nodes[v].clone() {
            Node::Epsilon => Structure::Epsilon,
            Node::Atom(l) => Structure::Atom(l),
            Node::Ref(t) => self.unrank_at(t, n, r),
            Node::Union(bs) => {
                for (i, b) in bs.iter().enumerate() {
                    let c = self.c(*b, n);
                    if r < *c {
                        return Structure::Union(i, Box::new(self.unrank_at(*b, n, r)));
                    }
                    r -= c;
                }
                unreachable!("rank exceeds union count")
            }
            Node::Prod(fs) => Structure::Prod(self.tuple_unrank(&fs, n, r, |i, m| self.counter.prod_suffix(v, i, m))),
            Node::Coll { kind, arg, restr } => match kind {
                CollectionKind::Seq => {
                    let hi = restr.max_card.unwrap_or(n).min(n);
                    for len in restr.min_card..=hi {
                        let block = self.counter.power(v, n, len);
                        if r < block {
                            let nodes = vec![arg; len];
                            return Structure::Seq(self.tuple_unrank(&nodes, n, r, |i, m| self.counter.power(v, m, len - i)));
                        }
                        r -= block;
                    }
                    unreachable!("rank exceeds sequence count")
                }
                CollectionKind::MSet => Structure::MSet(self.bag_unrank(v, arg, true, n, r)),
                CollectionKind::PSet => Structure::PSet(self.bag_unrank(v, arg, false, n, r)),
                CollectionKind::Cycle => unreachable!("cycle unranking is refused up front"),
            },
        }
    }

    fn tuple_unrank(&self, nodes: &[NodeId], n: usize, mut r: BigUint, suf: impl Fn(usize, usize) -> BigUint) -> Vec<Structure> {
        let mut pre = BigUint::one();
        let mut rem = n;
        let mut sizes = Vec::with_capacity(nodes.len());
        for (i, &node) in nodes.iter().enumerate() {
            let mut chosen = None;
            for m in 0..=rem {
                let c = self.c(node, m);
                if c.is_zero() {
                    continue;
                }
                let block = &pre * c * suf(i + 1, rem - m);
                if r < block {
                    chosen = Some(m);
                    break;
                }
                r -= block;
            }
            let m = chosen.expect("rank exceeds product count");
            pre *= self.c(node, m);
            sizes.push(m);
            rem -= m;
        }
        let mut ranks = vec![BigUint::zero(); nodes.len()];
        for i in (0..nodes.len()).rev() {
            let c = self.c(nodes[i], sizes[i]);
            ranks[i] = &r % c;
            r /= c;
        }
        nodes
            .iter()
            .zip(sizes)
            .zip(ranks)
            .map(|((&node, m), q)| self.unrank_at(node, m, q))
            .collect()
    }

    fn bag_unrank(&self, v: NodeId, arg: NodeId, multi: bool, n: usize, mut r: BigUint) -> Vec<Structure> {
        let mut children = Vec::new();
        let mut rem = n;
        let mut used = 0;
        let mut bound: Option<(usize, BigUint)> = None;
        while rem > 0 {
            let upper = |s: usize| match &bound {
                Some((bs, bn)) if *bs == s => bn.clone(),
                _ => self.c(arg, s).clone(),
            };
            let mut s = 1;
            while self.bags_below(v, rem, s, &upper(s), used) <= r {
                s += 1;
                assert!(s <= rem, "rank exceeds bag count");
            }
            // Largest q with fewer than r + 1 bags below (s, q).
            let mut lo = BigUint::zero();
            let mut hi = upper(s);
            while &hi - &lo > BigUint::one() {
                let mid = (&lo + &hi) >> 1;
                if self.bags_below(v, rem, s, &mid, used) <= r {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            r -= self.bags_below(v, rem, s, &lo, used);
            children.push(self.unrank_at(arg, s, lo.clone()));
            bound = Some((s, if multi { lo + 1u32 } else { lo }));
            rem -= s;
            used += 1;
        }
        debug_assert!(r.is_zero());
        children
    }

    // ---- generation ----

    fn gen(&self, v: NodeId, n: usize) -> Gen<'_, Structure> {
        let node = self.graph().nodes[v].clone();
        let is_cycle = matches!(node, Node::Coll { kind: CollectionKind::Cycle, .. });
        if !is_cycle && self.c(v, n).is_zero() {
            return empty();
        }
        match node {
            Node::Epsilon => once(Structure::Epsilon),
            Node::Atom(l) => once(Structure::Atom(l)),
            Node::Ref(t) => self.gen(t, n),
            Node::Union(bs) => Box::new(
                bs.into_iter()
                    .enumerate()
                    .flat_map(move |(i, b)| self.gen(b, n).map(move |s| Structure::Union(i, Box::new(s)))),
            ),
            Node::Prod(fs) => {
                let suf: Suffix<'_> = Rc::new(move |i, m| self.counter.prod_suffix(v, i, m));
                Box::new(self.tuples(Rc::new(fs), suf, n).map(|t| Structure::Prod(t.into_iter().map(|(_, s)| s).collect())))
            }
            Node::Coll { kind, arg, restr } => match kind {
                CollectionKind::Seq | CollectionKind::Cycle => {
                    let hi = restr.max_card.unwrap_or(n).min(n);
                    let cycle = kind == CollectionKind::Cycle;
                    Box::new(
                        (restr.min_card..=hi)
                            .filter(move |&len| !self.counter.power(v, n, len).is_zero())
                            .flat_map(move |len| {
                                let suf: Suffix<'_> = Rc::new(move |i, m| self.counter.power(v, m, len - i));
                                self.tuples(Rc::new(vec![arg; len]), suf, n)
                            })
                            .filter_map(move |t| {
                                if cycle {
                                    let keys: Vec<(usize, usize)> = t.iter().map(|(q, s)| (s.size(), *q)).collect();
                                    if !is_min_rotation(&keys) {
                                        return None;
                                    }
                                }
                                let cs = t.into_iter().map(|(_, s)| s).collect();
                                Some(if cycle { Structure::Cycle(cs) } else { Structure::Seq(cs) })
                            }),
                    )
                }
                CollectionKind::MSet => Box::new(self.bags(v, arg, true, restr, n, None, 0).map(Structure::MSet)),
                CollectionKind::PSet => Box::new(self.bags(v, arg, false, restr, n, None, 0).map(Structure::PSet)),
            },
        }
    }

    /// Tuples over `nodes` of total size `n`, each child paired with its rank.
    fn tuples<'a>(&'a self, nodes: Rc<Vec<NodeId>>, suf: Suffix<'a>, n: usize) -> Gen<'a, Vec<(usize, Structure)>> {
        let inner = nodes.clone();
        Box::new(
            self.compositions(nodes, suf, 0, n)
                .flat_map(move |sizes| self.tuple_at(inner.clone(), Rc::new(sizes), 0)),
        )
    }

    /// Size compositions with a non-zero block, lexicographically ascending.
    fn compositions<'a>(&'a self, nodes: Rc<Vec<NodeId>>, suf: Suffix<'a>, i: usize, rem: usize) -> Gen<'a, Vec<usize>> {
        let k = nodes.len();
        if i == k {
            return if rem == 0 { once(Vec::new()) } else { empty() };
        }
        if i + 1 == k {
            return if self.c(nodes[i], rem).is_zero() { empty() } else { once(vec![rem]) };
        }
        let (nodes2, suf2) = (nodes.clone(), suf.clone());
        Box::new(
            (0..=rem)
                .filter(move |&m| !self.c(nodes[i], m).is_zero() && !suf(i + 1, rem - m).is_zero())
                .flat_map(move |m| {
                    self.compositions(nodes2.clone(), suf2.clone(), i + 1, rem - m).map(move |mut tail| {
                        tail.insert(0, m);
                        tail
                    })
                }),
        )
    }

    /// Cartesian product for fixed sizes, first factor most significant.
    fn tuple_at<'a>(&'a self, nodes: Rc<Vec<NodeId>>, sizes: Rc<Vec<usize>>, i: usize) -> Gen<'a, Vec<(usize, Structure)>> {
        if i == nodes.len() {
            return once(Vec::new());
        }
        Box::new(self.gen(nodes[i], sizes[i]).enumerate().flat_map(move |(q, s)| {
            self.tuple_at(nodes.clone(), sizes.clone(), i + 1).map(move |mut tail| {
                tail.insert(0, (q, s.clone()));
                tail
            })
        }))
    }

    /// Bags of size `rem` whose children are all below `bound`, completing a
    /// bag that already holds `used` children, greatest child first.
    #[allow(clippy::too_many_arguments)]
    fn bags(&self, v: NodeId, arg: NodeId, multi: bool, restr: Restriction, rem: usize, bound: Option<(usize, BigUint)>, used: usize) -> Gen<'_, Vec<Structure>> {
        if rem == 0 {
            return if restr.contains(used) { once(Vec::new()) } else { empty() };
        }
        let max_size = bound.as_ref().map_or(rem, |(s, _)| (*s).min(rem));
        let bound = Rc::new(bound);
        let bound2 = bound.clone();
        let upper = move |s: usize| -> BigUint {
            match &*bound {
                Some((bs, bn)) if *bs == s => bn.clone(),
                _ => self.c(arg, s).clone(),
            }
        };
        let upper = Rc::new(upper);
        let upper2 = upper.clone();
        Box::new(
            (1..=max_size)
                .filter(move |&s| self.bags_below(v, rem, s, &upper(s), used) > self.bags_below(v, rem, s, &BigUint::zero(), used))
                .flat_map(move |s| {
                    let limit = upper2(s).to_usize();
                    let _ = &bound2;
                    self.gen(arg, s)
                        .enumerate()
                        .take_while(move |(q, _)| limit.is_none_or(|l| *q < l))
                        .flat_map(move |(q, child)| {
                            let next = BigUint::from(if multi { q + 1 } else { q });
                            if self.bags_below(v, rem - s, s, &next, used + 1).is_zero() {
                                return empty();
                            }
                            Box::new(self.bags(v, arg, multi, restr, rem - s, Some((s, next)), used + 1).map(move |mut tail| {
                                tail.insert(0, child.clone());
                                tail
                            })) as Gen<'_, Vec<Structure>>
                        })
                }),
        )
    }
}

/// Uniform draw from `0..bound` by rejection on 64-bit blocks.
fn uniform_below(rng: &mut ChaCha20Rng, bound: &BigUint) -> BigUint {
    if *bound <= BigUint::one() {
        return BigUint::zero();
    }
    let bits = (bound - 1u32).bits() as usize;
    let words = bits.div_ceil(64);
    let spare = words * 64 - bits;
    loop {
        let mut bytes = Vec::with_capacity(words * 8);
        for w in 0..words {
            let mut x = rng.next_u64();
            if w + 1 == words && spare > 0 {
                x &= u64::MAX >> spare;
            }
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        let candidate = BigUint::from_bytes_le(&bytes);
        if candidate < *bound {
            return candidate;
        }
    }
}

fn prepared(sys: &SpecSystem, class: &str, n: usize) -> Result<Enumerator> {
    let mut e = Enumerator::new(sys, class)?;
    e.prepare(n)?;
    Ok(e)
}

/// All structures of size `n`, in canonical order.
pub fn list(sys: &SpecSystem, class: &str, n: usize, limit: Option<usize>) -> Result<Vec<Structure>> {
    prepared(sys, class, n)?.list(n, limit)
}

pub fn rank(sys: &SpecSystem, class: &str, s: &Structure) -> Result<BigUint> {
    prepared(sys, class, s.size())?.rank(s)
}

pub fn unrank(sys: &SpecSystem, class: &str, n: usize, r: &BigUint) -> Result<Structure> {
    prepared(sys, class, n)?.unrank(n, r)
}

pub fn random(sys: &SpecSystem, class: &str, n: usize, seed: u64) -> Result<Structure> {
    prepared(sys, class, n)?.random(n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_system;
    use crate::grammar::member_of;

    fn engine(text: &str, n: usize) -> Enumerator {
        let sys = parse_system(text, None, Mode::Unlabeled).unwrap().system;
        let mut e = Enumerator::new(&sys, sys.root()).unwrap();
        e.prepare(n).unwrap();
        e
    }

    const TREES: &str = "T = Prod(Atom, Seq(T))";

    #[test]
    fn trees_of_size_one_and_five() {
        let e = engine(TREES, 5);
        let one = e.list(1, None).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].to_string(), "P(Z[z],S())");
        let five = e.list(5, None).unwrap();
        assert_eq!(five.len(), 14);
        let distinct: std::collections::HashSet<_> = five.iter().collect();
        assert_eq!(distinct.len(), 14);
        assert_eq!(e.list(5, Some(3)).unwrap(), five[..3].to_vec());
        assert!(e.list(0, None).unwrap().is_empty());
    }

    #[test]
    fn rank_follows_iteration_order() {
        let e = engine(TREES, 6);
        for n in 0..=6 {
            for (i, s) in e.iter(n).unwrap().enumerate() {
                assert_eq!(e.rank(&s).unwrap(), BigUint::from(i));
                assert_eq!(e.unrank(n, &BigUint::from(i)).unwrap(), s);
            }
        }
    }

    #[test]
    fn range_and_unsupported_errors() {
        let e = engine(TREES, 5);
        assert!(matches!(e.unrank(5, &BigUint::from(14u32)), Err(Error::Range { .. })));
        let necklaces = engine("N = Cycle(Union(Atom(a), Atom(b)), card >= 1)", 4);
        assert!(matches!(necklaces.unrank(4, &BigUint::zero()), Err(Error::Unsupported(_))));
        assert!(matches!(necklaces.random(4, 1), Err(Error::Unsupported(_))));
        assert!(matches!(e.count(9), Err(Error::NotPrepared { .. })));
    }

    #[test]
    fn necklaces_are_minimal_rotations() {
        let e = engine("N = Cycle(Union(Atom(a), Atom(b)), card >= 1)", 6);
        let four = e.list(4, None).unwrap();
        assert_eq!(four.len(), 6);
        for (i, s) in four.iter().enumerate() {
            assert_eq!(e.rank(s).unwrap(), BigUint::from(i));
        }
        assert_eq!(e.list(6, None).unwrap().len(), 14);
        // Not the minimal rotation: b then a.
        let ba = Structure::Cycle(vec![
            Structure::Union(1, Box::new(Structure::Atom("b".into()))),
            Structure::Union(0, Box::new(Structure::Atom("a".into()))),
        ]);
        assert!(matches!(e.rank(&ba), Err(Error::Membership { .. })));
    }

    #[test]
    fn multisets_and_sets_are_canonical() {
        let p = engine("P = MSet(I, card >= 1)\nI = Seq(Atom, card >= 1)", 8);
        let parts = p.list(5, None).unwrap();
        assert_eq!(parts.len(), 7);
        // Greatest part first: the first partition of 5 is 1+1+1+1+1.
        assert_eq!(parts[0].children().len(), 5);
        assert_eq!(parts[6].children().len(), 1);
        let d = engine("D = PSet(I)\nI = Seq(Atom, card >= 1)", 8);
        assert_eq!(d.list(6, None).unwrap().len(), 4);
        for n in 0..=8 {
            for (i, s) in d.iter(n).unwrap().enumerate() {
                assert_eq!(d.unrank(n, &BigUint::from(i)).unwrap(), s);
                assert_eq!(d.rank(&s).unwrap(), BigUint::from(i));
            }
        }
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        let sys = parse_system(TREES, None, Mode::Unlabeled).unwrap().system;
        let mut e = Enumerator::new(&sys, "T").unwrap();
        e.prepare(50).unwrap();
        let a = e.random(50, 7).unwrap();
        let b = e.random(50, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.size(), 50);
        assert!(member_of(&a, &sys, "T"));
        for seed in 0..5 {
            assert_eq!(e.random(1, seed).unwrap().to_string(), "P(Z[z],S())");
        }
        assert!(matches!(e.random(0, 3), Err(Error::Empty(0))));
    }

    #[test]
    fn labeled_mode_is_refused() {
        let sys = parse_system(TREES, None, Mode::Labeled).unwrap().system;
        assert!(matches!(Enumerator::new(&sys, "T"), Err(Error::Mode(_))));
    }

    #[test]
    fn min_rotation() {
        assert!(is_min_rotation(&[1, 2, 1, 3]));
        assert!(!is_min_rotation(&[2, 1]));
        assert!(is_min_rotation(&[1, 1]));
        assert!(is_min_rotation::<u8>(&[]));
    }
}

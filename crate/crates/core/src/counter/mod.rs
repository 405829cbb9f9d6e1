//! Exact counting by size.
//!
//! Counts are kept per compiled node in growing tables. Sizes are filled in
//! increasing order; within one size a node only asks for same-size values of
//! the nodes it can contain without gaining size, which the analyzer has
//! proven acyclic.
//!
//! Collections are counted as follows, `a` being the argument counts:
//!
//! * `Seq` without upper bound and at most one forced element: `s_n = Σ a_k s_{n-k}`;
//!   otherwise the sum over allowed lengths of the powers `[x^n] A(x)^L`.
//! * `MSet`/`PSet` without upper bound: the Euler transform
//!   `n b_n = Σ c_k b_{n-k}`; any other range uses the bounded-component
//!   table shared with the enumerator.
//! * `Cycle` without upper bound: `Σ_{k|n} φ(k)/k · Λ_{n/k}` with
//!   `Λ = log 1/(1 - A)`; restricted ranges use the per-length orbit count
//!   `(1/L) Σ_{d | gcd(L, n)} φ(d) [x^{n/d}] A(x)^{L/d}`.
//!
//! Restricted `Cycle` counts in the enumerator go through the rotation
//! filter instead, which is exponential; keep those to small sizes.

mod dp;
pub(crate) mod graph;
mod labeled;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::analyzer::check_well_founded;
use crate::error::{Error, Result};
use crate::grammar::{CollectionKind, Mode, Restriction, SpecSystem};

pub(crate) use dp::BagTable;
pub(crate) use graph::{is_simple, Graph, Node, NodeId};
pub use labeled::LabeledCounter;

/// Default memory cap of the tables, in megabytes.
pub const DEFAULT_TABLE_LIMIT_MB: usize = 512;

/// Euler's totient.
pub(crate) fn totient(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Runs the analyzer with `class` as root and fails loudly on rejection.
pub(crate) fn accept(sys: &SpecSystem, class: &str) -> Result<SpecSystem> {
    let rooted = sys.with_root(class)?;
    let report = check_well_founded(&rooted);
    if !report.ok {
        return Err(Error::Analysis(report.errors().cloned().collect()));
    }
    Ok(rooted)
}

fn approx_bytes(x: &BigUint) -> usize {
    32 + (x.bits() as usize).div_ceil(8)
}

/// A collection node of the compiled class, for cross-checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionSite {
    pub(crate) node: NodeId,
    pub kind: CollectionKind,
    pub restriction: Restriction,
    pub description: String,
}

/// Unlabeled count tables for one class of a system.
///
/// Tables grow with [`Counter::extend_to`]; lookups take `&self`. Once
/// [`Counter::seal`]ed the tables are read-only and may be shared freely
/// across threads.
#[derive(Debug, Clone)]
pub struct Counter {
    pub(crate) graph: Graph,
    class: String,
    len: usize,
    pub(crate) counts: Vec<Vec<BigUint>>,
    /// Intermediate product suffixes, filled on demand.
    suffix: Vec<Vec<Vec<Option<BigUint>>>>,
    /// `powers[node][m][L - 2]` = `[x^m] A(x)^L` for `2 <= L <= m`.
    powers: Vec<Vec<Vec<BigUint>>>,
    euler: Vec<Vec<BigInt>>,
    cycle_log: Vec<Vec<BigRational>>,
    pub(crate) bags: Vec<Option<BagTable>>,
    visiting: Vec<bool>,
    sealed: bool,
    limit_mb: usize,
    bytes: usize,
    entries: usize,
}

impl Counter {
    /// Compiles `class` of `sys` after checking well-foundedness from it.
    pub fn new(sys: &SpecSystem, class: &str) -> Result<Counter> {
        let rooted = accept(sys, class)?;
        let graph = Graph::compile(&rooted, class);
        let n = graph.len();
        let bags = graph
            .nodes
            .iter()
            .map(|node| match node {
                Node::Coll { kind, arg, restr } if matches!(kind, CollectionKind::MSet | CollectionKind::PSet) => {
                    Some(BagTable::new(*arg, *kind == CollectionKind::MSet, *restr))
                }
                _ => None,
            })
            .collect();
        Ok(Counter {
            graph,
            class: class.to_string(),
            len: 0,
            counts: vec![Vec::new(); n],
            suffix: vec![Vec::new(); n],
            powers: vec![Vec::new(); n],
            euler: vec![Vec::new(); n],
            cycle_log: vec![Vec::new(); n],
            bags,
            visiting: vec![false; n],
            sealed: false,
            limit_mb: DEFAULT_TABLE_LIMIT_MB,
            bytes: 0,
            entries: 0,
        })
    }

    pub fn with_table_limit_mb(mut self, limit_mb: usize) -> Counter {
        self.limit_mb = limit_mb;
        self
    }

    pub fn class(&self) -> &str {
        &self.class
    }

    /// Sizes `0..prepared()` are available.
    pub fn prepared(&self) -> usize {
        self.len
    }

    pub fn seal(&mut self) {
        self.sealed = true;
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    /// Number of count entries computed so far.
    pub fn entries_computed(&self) -> usize {
        self.entries
    }

    /// Approximate memory held by the tables.
    pub fn table_bytes(&self) -> usize {
        self.bytes
    }

    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        if n < self.len {
            return Ok(());
        }
        if self.sealed {
            return Err(Error::Sealed(self.len.saturating_sub(1)));
        }
        for size in self.len..=n {
            for node in 0..self.graph.len() {
                self.ensure(node, size)?;
            }
            self.len = size + 1;
        }
        Ok(())
    }

    pub fn count(&mut self, n: usize) -> Result<BigUint> {
        self.extend_to(n)?;
        Ok(self.counts[self.graph.root][n].clone())
    }

    pub fn series(&mut self, upto: usize) -> Result<Vec<BigUint>> {
        self.extend_to(upto)?;
        Ok(self.counts[self.graph.root][..=upto].to_vec())
    }

    /// Count of the class at size `n` if already computed.
    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.counts[self.graph.root].get(n)
    }

    pub(crate) fn node_count(&self, node: NodeId, n: usize) -> &BigUint {
        &self.counts[node][n]
    }

    pub fn collection_sites(&self) -> Vec<CollectionSite> {
        self.graph
            .collections()
            .map(|(node, kind, restriction)| CollectionSite {
                node,
                kind,
                restriction,
                description: self.graph.desc[node].clone(),
            })
            .collect()
    }

    fn track(&mut self, bytes: usize) -> Result<()> {
        self.bytes += bytes;
        if self.bytes > self.limit_mb.saturating_mul(1 << 20) {
            return Err(Error::TableLimit {
                limit_mb: self.limit_mb,
            });
        }
        Ok(())
    }

    fn ensure(&mut self, node: NodeId, n: usize) -> Result<()> {
        if self.counts[node].len() > n {
            return Ok(());
        }
        debug_assert_eq!(self.counts[node].len(), n);
        assert!(
            !self.visiting[node],
            "same-size dependency cycle at node {} ({}); the analyzer should have rejected this system",
            node, self.graph.desc[node]
        );
        self.visiting[node] = true;
        let value = self.compute(node, n);
        self.visiting[node] = false;
        let value = value?;
        self.track(approx_bytes(&value))?;
        self.entries += 1;
        self.counts[node].push(value);
        Ok(())
    }

    fn compute(&mut self, node: NodeId, n: usize) -> Result<BigUint> {
        let indicator = |b: bool| if b { BigUint::one() } else { BigUint::zero() };
        match self.graph.nodes[node].clone() {
            Node::Epsilon => Ok(indicator(n == 0)),
            Node::Atom(_) => Ok(indicator(n == 1)),
            Node::Ref(target) => {
                self.ensure(target, n)?;
                Ok(self.counts[target][n].clone())
            }
            Node::Union(branches) => {
                let mut total = BigUint::zero();
                for b in branches {
                    self.ensure(b, n)?;
                    total += &self.counts[b][n];
                }
                Ok(total)
            }
            Node::Prod(factors) => self.product_suffix(node, &factors, 0, n),
            Node::Coll { kind, arg, restr } => match kind {
                CollectionKind::Seq => self.seq_count(node, arg, restr, n),
                CollectionKind::MSet | CollectionKind::PSet if is_simple(&restr) => {
                    self.euler_count(node, arg, kind == CollectionKind::MSet, restr, n)
                }
                CollectionKind::MSet | CollectionKind::PSet => self.bag_count_at_fill(node, arg, restr, n),
                CollectionKind::Cycle if is_simple(&restr) => self.cycle_count(node, arg, restr, n),
                CollectionKind::Cycle => self.restricted_cycle_count(node, arg, restr, n),
            },
        }
    }

    /// Counts of factors `i..` of a product at total size `n`, memoized for
    /// `0 < i`; `i = 0` is the node itself and is stored by `ensure`.
    ///
    /// A factor is asked for the size being filled only when the factors
    /// after it can all be empty.
    fn product_suffix(&mut self, node: NodeId, factors: &[NodeId], i: usize, n: usize) -> Result<BigUint> {
        let k = factors.len();
        if i == k {
            return Ok(if n == 0 { BigUint::one() } else { BigUint::zero() });
        }
        if i == k - 1 {
            self.ensure(factors[i], n)?;
            return Ok(self.counts[factors[i]][n].clone());
        }
        if i > 0 {
            if let Some(Some(v)) = self.suffix[node].get(i - 1).and_then(|s| s.get(n)) {
                return Ok(v.clone());
            }
        }
        let f = factors[i];
        let mut total = BigUint::zero();
        // Sizes outside [floor(f), n - floor(rest)] contribute nothing; skipping
        // them keeps left and right recursion from asking for the size being filled.
        let floors = (self.graph.min_size[f], self.graph.suffix_floor(factors, i + 1));
        if let (Some(lo), Some(rest_floor)) = floors {
            if n >= lo + rest_floor {
                for m in lo..=n - rest_floor {
                    if m == n {
                        self.ensure(f, n)?;
                    }
                    if self.counts[f][m].is_zero() {
                        continue;
                    }
                    let rest = self.product_suffix(node, factors, i + 1, n - m)?;
                    total += &self.counts[f][m] * rest;
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
            self.track(approx_bytes(&total))?;
        }
        Ok(total)
    }

    /// Number of structures of factors `i..` of product `node` with total
    /// size `m`, for `m < prepared()`; `i == factors.len()` is the empty tail.
    pub(crate) fn prod_suffix(&self, node: NodeId, i: usize, m: usize) -> BigUint {
        let Node::Prod(factors) = &self.graph.nodes[node] else {
            unreachable!("prod_suffix on a non-product node")
        };
        match i {
            0 => self.counts[node][m].clone(),
            i if i + 1 == factors.len() => self.counts[factors[i]][m].clone(),
            i if i == factors.len() => {
                if m == 0 {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            }
            i => self.suffix[node][i - 1][m].clone().expect("product suffix prepared"),
        }
    }

    /// `[x^m] A(x)^len` for the argument of collection `node`.
    pub(crate) fn power(&self, node: NodeId, m: usize, len: usize) -> BigUint {
        match len {
            0 => {
                if m == 0 {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            }
            1 => {
                let Node::Coll { arg, .. } = self.graph.nodes[node] else { unreachable!() };
                self.counts[arg][m].clone()
            }
            _ if len > m => BigUint::zero(),
            _ => self.powers[node][m][len - 2].clone(),
        }
    }

    /// Extends the power rows of collection `node` to size `upto`. Row `m`
    /// only reads argument counts below `m`.
    pub(crate) fn ensure_powers(&mut self, node: NodeId, upto: usize) -> Result<()> {
        let Node::Coll { arg, .. } = self.graph.nodes[node] else { unreachable!() };
        while self.powers[node].len() <= upto {
            let m = self.powers[node].len();
            let mut row = Vec::with_capacity(m.saturating_sub(1));
            for len in 2..=m {
                let mut total = BigUint::zero();
                for i in 1..=(m + 1 - len) {
                    let a = &self.counts[arg][i];
                    if a.is_zero() {
                        continue;
                    }
                    let prev = if len - 1 == 1 {
                        self.counts[arg][m - i].clone()
                    } else if len - 1 > m - i {
                        continue;
                    } else {
                        self.powers[node][m - i][len - 3].clone()
                    };
                    total += a * prev;
                }
                row.push(total);
            }
            let bytes = row.iter().map(approx_bytes).sum();
            self.track(bytes)?;
            self.powers[node].push(row);
        }
        Ok(())
    }

    fn seq_count(&mut self, node: NodeId, arg: NodeId, restr: Restriction, n: usize) -> Result<BigUint> {
        if is_simple(&restr) {
            if n == 0 {
                return Ok(if restr.min_card == 0 { BigUint::one() } else { BigUint::zero() });
            }
            // Unrestricted sequence counts; `s_0 = 1` regardless of the range.
            let s = |c: &Counter, m: usize| -> BigUint {
                if m == 0 {
                    BigUint::one()
                } else {
                    c.counts[node][m].clone()
                }
            };
            let mut total = BigUint::zero();
            for k in 1..n {
                let a = &self.counts[arg][k];
                if !a.is_zero() {
                    total += a * s(self, n - k);
                }
            }
            self.ensure(arg, n)?;
            total += &self.counts[arg][n];
            return Ok(total);
        }
        self.ensure_powers(node, n)?;
        let mut total = BigUint::zero();
        let hi = restr.max_card.unwrap_or(n).min(n);
        for len in restr.min_card..=hi {
            if len == 1 {
                self.ensure(arg, n)?;
            }
            total += self.power(node, n, len);
        }
        Ok(total)
    }

    fn euler_count(&mut self, node: NodeId, arg: NodeId, multi: bool, restr: Restriction, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(if restr.min_card == 0 { BigUint::one() } else { BigUint::zero() });
        }
        self.ensure(arg, n)?;
        while self.euler[node].len() <= n {
            let k = self.euler[node].len();
            let mut c = BigInt::zero();
            if k > 0 {
                for d in 1..=k {
                    if !k.is_multiple_of(d) {
                        continue;
                    }
                    let term = BigInt::from(self.counts[arg][d].clone()) * BigInt::from(d);
                    if multi || (k / d) % 2 == 1 {
                        c += term;
                    } else {
                        c -= term;
                    }
                }
            }
            self.euler[node].push(c);
        }
        let b = |c: &Counter, m: usize| -> BigInt {
            if m == 0 {
                BigInt::one()
            } else {
                BigInt::from(c.counts[node][m].clone())
            }
        };
        let mut total = BigInt::zero();
        for k in 1..=n {
            let c = &self.euler[node][k];
            if !c.is_zero() {
                total += c * b(self, n - k);
            }
        }
        let (q, r) = total.div_rem(&BigInt::from(n));
        assert!(r.is_zero() && q.sign() != Sign::Minus, "Euler transform produced a non-integral count");
        Ok(q.to_biguint().expect("non-negative"))
    }

    /// Count of a bounded-card multiset/set at the size being filled.
    fn bag_count_at_fill(&mut self, node: NodeId, arg: NodeId, restr: Restriction, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(if restr.contains(0) { BigUint::one() } else { BigUint::zero() });
        }
        self.ensure_bag_rows(node, n)?;
        let table = self.bags[node].as_ref().expect("bag table");
        let mut total = table.row_sum(n, n - 1);
        if restr.contains(1) {
            self.ensure(arg, n)?;
            total += &self.counts[arg][n];
        }
        Ok(total)
    }

    pub(crate) fn ensure_bag_rows(&mut self, node: NodeId, upto: usize) -> Result<()> {
        let mut table = self.bags[node].take().expect("bag table");
        let res = table.extend_rows(&self.counts[table.arg], upto);
        self.bags[node] = Some(table);
        self.track(res?)
    }

    fn ensure_cycle_log(&mut self, node: NodeId, upto: usize) -> Result<()> {
        self.ensure_powers(node, upto)?;
        while self.cycle_log[node].len() <= upto {
            let m = self.cycle_log[node].len();
            let mut total = BigRational::zero();
            for len in 1..=m {
                let p = self.power(node, m, len);
                if !p.is_zero() {
                    total += BigRational::new(BigInt::from(p), BigInt::from(len));
                }
            }
            self.cycle_log[node].push(total);
        }
        Ok(())
    }

    /// The raw φ-weighted sum for cycles of length at least one at size `n`.
    fn cycle_phi_sum(&self, node: NodeId, n: usize) -> BigRational {
        let mut total = BigRational::zero();
        for k in 1..=n {
            if !n.is_multiple_of(k) {
                continue;
            }
            let lambda = &self.cycle_log[node][n / k];
            if !lambda.is_zero() {
                total += lambda * BigRational::new(BigInt::from(totient(k)), BigInt::from(k));
            }
        }
        total
    }

    fn cycle_count(&mut self, node: NodeId, arg: NodeId, restr: Restriction, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(if restr.min_card == 0 { BigUint::one() } else { BigUint::zero() });
        }
        self.ensure(arg, n)?;
        self.ensure_cycle_log(node, n)?;
        Ok(integral(self.cycle_phi_sum(node, n), "cycle"))
    }

    /// Rotation classes of sequences of exactly `len` components at size `n`.
    fn cycles_of_length(&self, node: NodeId, len: usize, n: usize) -> BigRational {
        let mut total = BigInt::zero();
        for d in 1..=len {
            if len.is_multiple_of(d) && n.is_multiple_of(d) {
                total += BigInt::from(totient(d)) * BigInt::from(self.power(node, n / d, len / d));
            }
        }
        BigRational::new(total, BigInt::from(len))
    }

    fn restricted_cycle_count(&mut self, node: NodeId, arg: NodeId, restr: Restriction, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(if restr.contains(0) { BigUint::one() } else { BigUint::zero() });
        }
        self.ensure_powers(node, n)?;
        if restr.contains(1) {
            self.ensure(arg, n)?;
        }
        let hi = restr.max_card.unwrap_or(n).min(n);
        let mut total = BigRational::zero();
        for len in restr.min_card.max(1)..=hi {
            total += self.cycles_of_length(node, len, n);
        }
        Ok(integral(total, "restricted cycle"))
    }

    /// Prepares the tables the enumerator reads: powers for every sequence
    /// and cycle, bounded-component rows for every multiset and set.
    pub(crate) fn prepare_rank_tables(&mut self) -> Result<()> {
        let Some(upto) = self.len.checked_sub(1) else {
            return Ok(());
        };
        for node in 0..self.graph.len() {
            if let Node::Prod(factors) = self.graph.nodes[node].clone() {
                for i in 1..factors.len().saturating_sub(1) {
                    for m in 0..=upto {
                        self.product_suffix(node, &factors, i, m)?;
                    }
                }
            }
        }
        for (node, kind, _) in self.graph.collections().collect::<Vec<_>>() {
            match kind {
                CollectionKind::Seq | CollectionKind::Cycle => self.ensure_powers(node, upto)?,
                CollectionKind::MSet | CollectionKind::PSet => self.ensure_bag_rows(node, upto)?,
            }
        }
        Ok(())
    }

    /// For an unrestricted `MSet`/`PSet` site: counts from the Euler transform
    /// and from the bounded-component table, sizes `0..=upto`.
    pub fn transform_cross_check(&mut self, site: &CollectionSite, upto: usize) -> Result<(Vec<BigUint>, Vec<BigUint>)> {
        self.extend_to(upto)?;
        let node = site.node;
        self.ensure_bag_rows(node, upto)?;
        let euler = self.counts[node][..=upto].to_vec();
        let table = self.bags[node].as_ref().expect("bag table");
        let dp = (0..=upto)
            .map(|n| table.count(&self.counts[table.arg], n))
            .collect();
        Ok((euler, dp))
    }

    /// Raw rational values of the cycle formula at sizes `0..=upto`, before
    /// the integrality assertion.
    pub fn cycle_formula_terms(&mut self, site: &CollectionSite, upto: usize) -> Result<Vec<BigRational>> {
        self.extend_to(upto)?;
        let node = site.node;
        let restr = site.restriction;
        self.ensure_powers(node, upto)?;
        let mut out = Vec::with_capacity(upto + 1);
        for n in 0..=upto {
            let empty = if n == 0 && restr.contains(0) { BigRational::one() } else { BigRational::zero() };
            if n == 0 {
                out.push(empty);
                continue;
            }
            if is_simple(&restr) {
                self.ensure_cycle_log(node, n)?;
                out.push(self.cycle_phi_sum(node, n));
            } else {
                let hi = restr.max_card.unwrap_or(n).min(n);
                let mut total = BigRational::zero();
                for len in restr.min_card.max(1)..=hi {
                    total += self.cycles_of_length(node, len, n);
                }
                out.push(total);
            }
        }
        Ok(out)
    }
}

fn integral(value: BigRational, what: &str) -> BigUint {
    assert!(
        value.is_integer() && !value.is_negative(),
        "{what} formula produced a non-integral count {value}"
    );
    value.to_integer().to_biguint().expect("non-negative")
}

/// Number of unlabeled structures of `class` with `n` atoms.
pub fn count(sys: &SpecSystem, class: &str, n: usize) -> Result<BigUint> {
    Counter::new(sys, class)?.count(n)
}

/// Number of labeled structures of `class` on the labels `1..=n`.
pub fn count_labeled(sys: &SpecSystem, class: &str, n: usize) -> Result<BigUint> {
    LabeledCounter::new(sys, class)?.count(n)
}

/// Counts at sizes `0..=upto` in the requested mode.
pub fn series(sys: &SpecSystem, class: &str, upto: usize, mode: Mode) -> Result<Vec<BigUint>> {
    match mode {
        Mode::Unlabeled => Counter::new(sys, class)?.series(upto),
        Mode::Labeled => LabeledCounter::new(sys, class)?.series(upto),
    }
}

/// Small helper for tests and callers holding machine-size expectations.
pub fn to_u64_series(series: &[BigUint]) -> Option<Vec<u64>> {
    series.iter().map(|x| x.to_u64()).collect()
}

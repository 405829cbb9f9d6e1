//! Shared corpus and brute-force oracle for the integration tests.
//!
//! The oracle generates every derivation of a class expression naively,
//! canonicalizes collection nodes and sorts with a comparator written from
//! the order definition (size, then the per-constructor block order). It
//! never looks at counts or ranks.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use specc::{parse_system, render_expr, Expr, Mode, SpecSystem, Structure};

pub struct Entry {
    pub name: &'static str,
    pub text: &'static str,
}

pub const CORPUS: &[Entry] = &[
    Entry { name: "trees", text: "T = Prod(Atom, Seq(T))" },
    Entry { name: "binary trees", text: "B = Union(Atom, Prod(Atom, B, B))" },
    Entry { name: "partitions", text: "P = MSet(I, card >= 1)\nI = Seq(Atom, card >= 1)" },
    Entry { name: "distinct partitions", text: "D = PSet(I)\nI = Seq(Atom, card >= 1)" },
    Entry { name: "necklaces", text: "N = Cycle(Union(Atom(a), Atom(b)), card >= 1)" },
    Entry { name: "compositions 1-2", text: "C = Seq(Union(Atom, Prod(Atom, Atom)))" },
    Entry { name: "motzkin", text: "M = Prod(Atom, Union(Epsilon, M, Prod(M, M)))" },
    Entry { name: "mutual pair", text: "F = Prod(Atom, MSet(G))\nG = Prod(Atom(b), Seq(F))" },
    Entry { name: "cyclic trees", text: "Y = Prod(Atom, Cycle(Y))" },
    Entry { name: "restricted cycles", text: "R = Cycle(Union(Atom(a), Prod(Atom(b), Atom(b))), 2 <= card <= 4)" },
    Entry { name: "few parts", text: "Q = MSet(Seq(Atom, card >= 1), card <= 3)" },
    Entry { name: "distinct pairs and triples", text: "W = PSet(Union(Atom(a), Seq(Atom(b), card >= 2)), 2 <= card <= 3)" },
    Entry { name: "short words", text: "S = Seq(Union(Atom(a), Atom(b)), 1 <= card <= 3)\n# comment line\n" },
    Entry { name: "bags of pairs", text: "H = MSet(Seq(Atom, 2 <= card <= 3), card >= 2)" },
];

pub fn system(text: &str) -> SpecSystem {
    parse_system(text, None, Mode::Unlabeled).expect("corpus system parses").system
}

pub fn has_cycle(text: &str) -> bool {
    text.contains("Cycle")
}

pub struct Oracle<'a> {
    sys: &'a SpecSystem,
    memo: HashMap<(String, usize), Rc<Vec<Structure>>>,
    floors: HashMap<String, Option<usize>>,
}

impl<'a> Oracle<'a> {
    pub fn new(sys: &'a SpecSystem) -> Oracle<'a> {
        let mut floors: HashMap<String, Option<usize>> = sys.defs().iter().map(|(n, _)| (n.clone(), None)).collect();
        // Least sizes, iterated down from "empty" until stable.
        loop {
            let mut changed = false;
            for (name, e) in sys.defs() {
                let v = floor(e, &floors);
                if floors[name] != v {
                    floors.insert(name.clone(), v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Oracle { sys, memo: HashMap::new(), floors }
    }

    fn def(&self, name: &str) -> &'a Expr {
        self.sys.get(name).expect("defined class")
    }

    /// Canonically sorted structures of `class` with `n` atoms.
    pub fn list(&mut self, class: &str, n: usize) -> Vec<Structure> {
        let e = self.def(class);
        let mut all = self.gen(e, n).as_ref().clone();
        all.sort_by(|a, b| self.cmp(e, a, b));
        let unique: HashSet<&Structure> = all.iter().collect();
        assert_eq!(unique.len(), all.len(), "oracle produced duplicates");
        all
    }

    pub fn gen(&mut self, e: &'a Expr, n: usize) -> Rc<Vec<Structure>> {
        let key = (render_expr(e), n);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let out = Rc::new(self.gen_raw(e, n));
        self.memo.insert(key, out.clone());
        out
    }

    fn gen_raw(&mut self, e: &'a Expr, n: usize) -> Vec<Structure> {
        match e {
            Expr::Epsilon => if n == 0 { vec![Structure::Epsilon] } else { vec![] },
            Expr::Atom(l) => if n == 1 { vec![Structure::Atom(l.clone())] } else { vec![] },
            Expr::ClassRef(name) => self.gen(self.def(name), n).as_ref().clone(),
            Expr::Union(bs) => {
                let mut out = Vec::new();
                for (i, b) in bs.iter().enumerate() {
                    out.extend(self.gen(b, n).iter().map(|s| Structure::Union(i, Box::new(s.clone()))));
                }
                out
            }
            Expr::Prod(fs) => {
                let fs: Vec<&'a Expr> = fs.iter().collect();
                self.tuples(&fs, n).into_iter().map(Structure::Prod).collect()
            }
            _ => {
                let (kind, arg, restr) = e.as_collection().expect("collection");
                let hi = restr.max_card.unwrap_or(n).min(n);
                let mut seqs = Vec::new();
                for len in restr.min_card..=hi {
                    if len == 0 && n > 0 {
                        continue;
                    }
                    seqs.extend(self.tuples(&vec![arg; len], n));
                }
                use specc::CollectionKind::*;
                match kind {
                    Seq => seqs.into_iter().map(Structure::Seq).collect(),
                    MSet | PSet => {
                        let mut seen = HashSet::new();
                        let mut out = Vec::new();
                        for mut s in seqs {
                            s.sort_by(|a, b| self.cmp(arg, b, a));
                            if kind == PSet && s.windows(2).any(|w| w[0] == w[1]) {
                                continue;
                            }
                            if seen.insert(s.clone()) {
                                out.push(if kind == MSet { Structure::MSet(s) } else { Structure::PSet(s) });
                            }
                        }
                        out
                    }
                    Cycle => {
                        let mut seen = HashSet::new();
                        let mut out = Vec::new();
                        for s in seqs {
                            let best = (0..s.len().max(1))
                                .map(|r| {
                                    let mut t = s.clone();
                                    t.rotate_left(r.min(s.len()));
                                    t
                                })
                                .min_by(|a, b| self.cmp_list(arg, a, b))
                                .unwrap();
                            if seen.insert(best.clone()) {
                                out.push(Structure::Cycle(best));
                            }
                        }
                        out
                    }
                }
            }
        }
    }

    /// All tuples of structures of the given expressions with total size `n`.
    fn tuples(&mut self, es: &[&'a Expr], n: usize) -> Vec<Vec<Structure>> {
        let Some((first, rest)) = es.split_first() else {
            return if n == 0 { vec![vec![]] } else { vec![] };
        };
        let mut out = Vec::new();
        // Only splits both sides can fill; the bounds keep left and right
        // recursion from revisiting the size being generated.
        let (Some(lo), Some(rest_lo)) = (floor(first, &self.floors), floor_all(rest, &self.floors)) else {
            return vec![];
        };
        for m in lo..=n.saturating_sub(rest_lo) {
            if m + rest_lo > n {
                break;
            }
            let heads = self.gen(first, m);
            if heads.is_empty() {
                continue;
            }
            let tails = self.tuples(rest, n - m);
            for h in heads.iter() {
                for t in &tails {
                    let mut v = Vec::with_capacity(es.len());
                    v.push(h.clone());
                    v.extend(t.iter().cloned());
                    out.push(v);
                }
            }
        }
        out
    }

    /// The global order: size, then the block order of the constructor.
    pub fn cmp(&self, e: &Expr, a: &Structure, b: &Structure) -> Ordering {
        a.size().cmp(&b.size()).then_with(|| self.cmp_same_size(e, a, b))
    }

    fn cmp_list(&self, arg: &Expr, a: &[Structure], b: &[Structure]) -> Ordering {
        for (x, y) in a.iter().zip(b) {
            let o = self.cmp(arg, x, y);
            if o != Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len())
    }

    fn cmp_same_size(&self, e: &Expr, a: &Structure, b: &Structure) -> Ordering {
        let sizes = |s: &Structure| s.children().iter().map(Structure::size).collect::<Vec<_>>();
        match (e, a, b) {
            (Expr::ClassRef(name), _, _) => self.cmp_same_size(self.def(name), a, b),
            (Expr::Epsilon | Expr::Atom(_), _, _) => Ordering::Equal,
            (Expr::Union(bs), Structure::Union(i, x), Structure::Union(j, y)) => {
                i.cmp(j).then_with(|| self.cmp(&bs[*i], x, y))
            }
            (Expr::Prod(fs), Structure::Prod(xs), Structure::Prod(ys)) => sizes(a).cmp(&sizes(b)).then_with(|| {
                fs.iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(f, (x, y))| self.cmp(f, x, y))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            }),
            _ => {
                let (kind, arg, _) = e.as_collection().expect("collection expression");
                let (xs, ys) = (a.children(), b.children());
                match kind {
                    specc::CollectionKind::Seq | specc::CollectionKind::Cycle => xs
                        .len()
                        .cmp(&ys.len())
                        .then_with(|| sizes(a).cmp(&sizes(b)))
                        .then_with(|| self.cmp_list(arg, xs, ys)),
                    _ => self.cmp_list(arg, xs, ys),
                }
            }
        }
    }
}

/// Least size of a structure of `e`, a lower bound for PSet floors.
fn floor(e: &Expr, classes: &HashMap<String, Option<usize>>) -> Option<usize> {
    match e {
        Expr::Epsilon => Some(0),
        Expr::Atom(_) => Some(1),
        Expr::ClassRef(name) => classes[name],
        Expr::Union(bs) => bs.iter().filter_map(|b| floor(b, classes)).min(),
        Expr::Prod(fs) => floor_all(&fs.iter().collect::<Vec<_>>(), classes),
        _ => {
            let (_, arg, restr) = e.as_collection().unwrap();
            match restr.min_card {
                0 => Some(0),
                k => floor(arg, classes).map(|v| v * k),
            }
        }
    }
}

fn floor_all(es: &[&Expr], classes: &HashMap<String, Option<usize>>) -> Option<usize> {
    es.iter().try_fold(0, |acc, e| floor(e, classes).map(|v| acc + v))
}

/// `n!`.
pub fn factorial(n: u32) -> num_bigint::BigUint {
    (1..=n).map(num_bigint::BigUint::from).product()
}

/// Permutations of `0..n`, counted by brute force.
pub fn brute_permutations(n: usize) -> u64 {
    fn go(used: &mut Vec<bool>, depth: usize) -> u64 {
        if depth == used.len() {
            return 1;
        }
        let mut total = 0;
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                total += go(used, depth + 1);
                used[i] = false;
            }
        }
        total
    }
    go(&mut vec![false; n], 0)
}

/// Rooted trees on `n` labeled vertices: parent arrays with one root and no
/// cycle, counted by brute force.
pub fn brute_rooted_trees(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut parent = vec![0usize; n];
    let mut total = 0;
    // parent[v] == n marks the root.
    loop {
        if parent.iter().filter(|&&p| p == n).count() == 1
            && (0..n).all(|v| {
                let mut x = v;
                for _ in 0..=n {
                    if parent[x] == n {
                        return true;
                    }
                    x = parent[x];
                }
                false
            })
        {
            total += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return total;
            }
            parent[i] += 1;
            if parent[i] <= n {
                break;
            }
            parent[i] = 0;
            i += 1;
        }
    }
}

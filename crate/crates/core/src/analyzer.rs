//! Static analysis of a system: valuations, well-foundedness and the
//! absence of epsilon-cycles.
//!
//! A system accepted here has finitely many structures of every size for
//! every class reachable from its root, and the counting recursions of
//! [`crate::counter`] terminate on it.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::grammar::{name_index, Expr, SpecSystem};

/// Valuation of a class: smallest possible size, `None` standing for infinity.
pub type Val = Option<usize>;

fn val_add(a: Val, b: Val) -> Val {
    Some(a? + b?)
}

fn val_min(a: Val, b: Val) -> Val {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Least fixpoint of the valuation equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    classes: Vec<(String, Val)>,
    index: HashMap<String, usize>,
}

impl Valuation {
    pub fn get(&self, class: &str) -> Val {
        self.index.get(class).and_then(|&i| self.classes[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Val)> {
        self.classes.iter().map(|(n, v)| (n.as_str(), *v))
    }

    /// Valuation of an arbitrary expression under the class valuations.
    pub fn of_expr(&self, expr: &Expr) -> Val {
        eval(expr, &|name| self.get(name))
    }
}

fn eval(expr: &Expr, class_val: &dyn Fn(&str) -> Val) -> Val {
    match expr {
        Expr::Epsilon => Some(0),
        Expr::Atom(_) => Some(1),
        Expr::ClassRef(name) => class_val(name),
        Expr::Union(items) => items.iter().map(|e| eval(e, class_val)).fold(None, val_min),
        Expr::Prod(items) => items
            .iter()
            .map(|e| eval(e, class_val))
            .fold(Some(0), val_add),
        Expr::Seq(arg, r) | Expr::MSet(arg, r) | Expr::PSet(arg, r) | Expr::Cycle(arg, r) => {
            if r.min_card == 0 {
                Some(0)
            } else {
                eval(arg, class_val).map(|v| v * r.min_card)
            }
        }
    }
}

/// Computes the valuation of every class by Gauss-Seidel sweeps starting
/// from infinity. Minimal derivations never repeat a class along a branch,
/// so the values settle within `|defs|` sweeps; two more confirm it.
pub fn compute_valuation(sys: &SpecSystem) -> Valuation {
    let defs = sys.defs();
    let index = name_index(sys);
    let mut vals: Vec<Val> = vec![None; defs.len()];
    for _ in 0..defs.len() + 2 {
        let mut changed = false;
        for (i, (_, expr)) in defs.iter().enumerate() {
            let v = eval(expr, &|name| index.get(name).and_then(|&j| vals[j]));
            if v != vals[i] {
                debug_assert!(vals[i].is_none_or(|old| v.is_some_and(|new| new <= old)));
                vals[i] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Valuation {
        classes: defs
            .iter()
            .zip(vals)
            .map(|((n, _), v)| (n.clone(), v))
            .collect(),
        index: defs
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Error,
    Warning,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Error => "error",
            Level::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagnosticKind {
    /// The class has no structure of any size.
    InfiniteValuation,
    /// A collection constructor over an argument that admits size 0.
    NullableCollection,
    /// A cycle of size-preserving contexts.
    EpsilonCycle,
    /// Not reachable from the root.
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub level: Level,
    pub kind: DiagnosticKind,
    pub class: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} class {}: {}", self.level, self.class, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub valuation: Valuation,
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl AnalysisReport {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.level == Level::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.level == Level::Warning)
    }
}

/// Walks `expr` and records, for each class reference, whether it sits in a
/// size-preserving context, and every collection whose argument admits size 0.
fn scan<'a>(
    expr: &'a Expr,
    zero_ctx: bool,
    valuation: &Valuation,
    zero_edges: &mut Vec<&'a str>,
    nullable_collections: &mut Vec<&'a Expr>,
) {
    match expr {
        Expr::Epsilon | Expr::Atom(_) => {}
        Expr::ClassRef(name) => {
            if zero_ctx {
                zero_edges.push(name);
            }
        }
        Expr::Union(items) => {
            for item in items {
                scan(item, zero_ctx, valuation, zero_edges, nullable_collections);
            }
        }
        Expr::Prod(items) => {
            let vals: Vec<Val> = items.iter().map(|e| valuation.of_expr(e)).collect();
            for (i, item) in items.iter().enumerate() {
                let others_nullable = vals
                    .iter()
                    .enumerate()
                    .all(|(j, v)| j == i || *v == Some(0));
                scan(
                    item,
                    zero_ctx && others_nullable,
                    valuation,
                    zero_edges,
                    nullable_collections,
                );
            }
        }
        Expr::Seq(arg, r) | Expr::MSet(arg, r) | Expr::PSet(arg, r) | Expr::Cycle(arg, r) => {
            if valuation.of_expr(arg) == Some(0) {
                nullable_collections.push(expr);
            }
            // A lone element keeps the size of its container.
            let singleton = r.contains(1);
            scan(
                arg,
                zero_ctx && singleton,
                valuation,
                zero_edges,
                nullable_collections,
            );
        }
    }
}

/// Classes lying on a cycle of the graph, via Tarjan's algorithm.
fn cyclic_nodes(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'g> {
        succ: &'g [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.succ[v] {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().expect("tarjan stack");
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            let self_loop = comp.len() == 1 && s.succ[v].contains(&v);
            if comp.len() > 1 || self_loop {
                comp.sort_unstable();
                s.out.push(comp);
            }
        }
    }
    let n = succ.len();
    let mut s = State {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out.sort();
    s.out
}

/// Accepts the system iff every class reachable from the root has finite
/// valuation, every collection has an argument of valuation at least 1, and
/// no reachable class lies on a cycle of size-preserving contexts.
pub fn check_well_founded(sys: &SpecSystem) -> AnalysisReport {
    let valuation = compute_valuation(sys);
    let index = name_index(sys);
    let reachable: HashSet<String> = sys.reachable_from(sys.root()).into_iter().collect();
    let mut diagnostics = Vec::new();

    let mut zero_succ: Vec<Vec<usize>> = vec![Vec::new(); sys.len()];
    for (i, (name, expr)) in sys.defs().iter().enumerate() {
        if !reachable.contains(name) {
            diagnostics.push(Diagnostic {
                level: Level::Warning,
                kind: DiagnosticKind::Unreachable,
                class: name.clone(),
                message: format!("unreachable from root {}", sys.root()),
            });
            continue;
        }
        if valuation.get(name).is_none() {
            diagnostics.push(Diagnostic {
                level: Level::Error,
                kind: DiagnosticKind::InfiniteValuation,
                class: name.clone(),
                message: "infinite valuation: the class has no finite structure".to_string(),
            });
        }
        let mut zero_edges = Vec::new();
        let mut nullable = Vec::new();
        scan(expr, true, &valuation, &mut zero_edges, &mut nullable);
        for coll in nullable {
            let (kind, _, _) = coll.as_collection().expect("collection");
            diagnostics.push(Diagnostic {
                level: Level::Error,
                kind: DiagnosticKind::NullableCollection,
                class: name.clone(),
                message: format!(
                    "collection over class admitting size 0 ({} argument has valuation 0)",
                    kind.keyword()
                ),
            });
        }
        let mut succ: Vec<usize> = zero_edges.iter().filter_map(|t| index.get(t).copied()).collect();
        succ.sort_unstable();
        succ.dedup();
        zero_succ[i] = succ;
    }

    for comp in cyclic_nodes(&zero_succ) {
        let names: Vec<&str> = comp.iter().map(|&i| sys.defs()[i].0.as_str()).collect();
        for &i in &comp {
            let name = &sys.defs()[i].0;
            if !reachable.contains(name) {
                continue;
            }
            diagnostics.push(Diagnostic {
                level: Level::Error,
                kind: DiagnosticKind::EpsilonCycle,
                class: name.clone(),
                message: format!(
                    "epsilon-cycle through {{{}}}: infinitely many structures of one size (possibly conservative)",
                    names.join(", ")
                ),
            });
        }
    }

    let ok = !diagnostics.iter().any(|d| d.level == Level::Error);
    AnalysisReport {
        valuation,
        ok,
        diagnostics,
    }
}

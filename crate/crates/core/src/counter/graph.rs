use std::collections::HashMap;

use crate::dsl::render_expr;
use crate::grammar::{CollectionKind, Expr, Restriction, SpecSystem};

pub(crate) type NodeId = usize;

/// One expression node of a compiled system. Class references are resolved
/// to the node holding the class body; a class defined as a bare reference
/// to another class compiles to `Ref`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Epsilon,
    Atom(String),
    Ref(NodeId),
    Union(Vec<NodeId>),
    Prod(Vec<NodeId>),
    Coll {
        kind: CollectionKind,
        arg: NodeId,
        restr: Restriction,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Graph {
    pub nodes: Vec<Node>,
    pub desc: Vec<String>,
    pub root: NodeId,
    /// Least size of a structure of each node, `None` when the node is empty.
    /// PSet floors ignore distinctness, so this is a lower bound there.
    pub min_size: Vec<Option<usize>>,
}

impl Graph {
    /// Compiles the classes reachable from `class`.
    pub fn compile(sys: &SpecSystem, class: &str) -> Graph {
        let classes = sys.reachable_from(class);
        let mut g = Graph {
            nodes: Vec::new(),
            desc: Vec::new(),
            root: 0,
            min_size: Vec::new(),
        };
        let mut slots = HashMap::new();
        for name in &classes {
            slots.insert(name.clone(), g.nodes.len());
            g.nodes.push(Node::Epsilon);
            g.desc.push(name.clone());
        }
        for name in &classes {
            let expr = sys.get(name).expect("reachable class is defined");
            let node = g.compile_node(expr, &slots);
            g.nodes[slots[name]] = node;
        }
        g.root = slots[class];
        g.min_size = g.least_sizes();
        g
    }

    /// Fixpoint from "empty" downwards; values only decrease, so it settles.
    fn least_sizes(&self) -> Vec<Option<usize>> {
        let mut v: Vec<Option<usize>> = vec![None; self.nodes.len()];
        loop {
            let mut changed = false;
            for id in 0..self.nodes.len() {
                let new = match &self.nodes[id] {
                    Node::Epsilon => Some(0),
                    Node::Atom(_) => Some(1),
                    Node::Ref(t) => v[*t],
                    Node::Union(bs) => bs.iter().filter_map(|&b| v[b]).min(),
                    Node::Prod(fs) => fs.iter().try_fold(0, |acc, &f| v[f].map(|x| acc + x)),
                    Node::Coll { arg, restr, .. } => match restr.min_card {
                        0 => Some(0),
                        k => v[*arg].map(|x| x * k),
                    },
                };
                if new != v[id] {
                    v[id] = new;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }

    /// Least total size of factors `i..` of a product, `None` if some factor is empty.
    pub fn suffix_floor(&self, factors: &[NodeId], i: usize) -> Option<usize> {
        factors[i..].iter().try_fold(0, |acc, &f| self.min_size[f].map(|x| acc + x))
    }

    fn compile_expr(&mut self, expr: &Expr, slots: &HashMap<String, NodeId>) -> NodeId {
        if let Expr::ClassRef(name) = expr {
            return slots[name];
        }
        let node = self.compile_node(expr, slots);
        self.nodes.push(node);
        self.desc.push(render_expr(expr));
        self.nodes.len() - 1
    }

    fn compile_node(&mut self, expr: &Expr, slots: &HashMap<String, NodeId>) -> Node {
        match expr {
            Expr::Epsilon => Node::Epsilon,
            Expr::Atom(label) => Node::Atom(label.clone()),
            Expr::ClassRef(name) => Node::Ref(slots[name]),
            Expr::Union(items) => Node::Union(items.iter().map(|e| self.compile_expr(e, slots)).collect()),
            Expr::Prod(items) => Node::Prod(items.iter().map(|e| self.compile_expr(e, slots)).collect()),
            _ => {
                let (kind, arg, restr) = expr.as_collection().expect("collection");
                Node::Coll {
                    kind,
                    arg: self.compile_expr(arg, slots),
                    restr,
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn has_cycle_constructor(&self) -> bool {
        self.nodes.iter().any(|n| {
            matches!(
                n,
                Node::Coll {
                    kind: CollectionKind::Cycle,
                    ..
                }
            )
        })
    }

    pub fn collections(&self) -> impl Iterator<Item = (NodeId, CollectionKind, Restriction)> + '_ {
        self.nodes.iter().enumerate().filter_map(|(id, n)| match n {
            Node::Coll { kind, restr, .. } => Some((id, *kind, *restr)),
            _ => None,
        })
    }
}

/// A collection restriction handled by the closed-form transforms: no upper
/// bound and at most one forced element.
pub(crate) fn is_simple(restr: &Restriction) -> bool {
    restr.max_card.is_none() && restr.min_card <= 1
}

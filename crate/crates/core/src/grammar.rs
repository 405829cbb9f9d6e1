//! Constructor algebra, validated specification systems and the term
//! representation of generated structures.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, ValidationIssue};

/// Label used by `Atom` when none is given.
pub const DEFAULT_ATOM_LABEL: &str = "z";

/// Cardinality constraint on a collection constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Restriction {
    pub min_card: usize,
    /// `None` means unbounded.
    pub max_card: Option<usize>,
}

impl Restriction {
    pub const UNRESTRICTED: Restriction = Restriction {
        min_card: 0,
        max_card: None,
    };

    pub fn new(min_card: usize, max_card: Option<usize>) -> Self {
        Restriction { min_card, max_card }
    }

    pub fn at_least(min_card: usize) -> Self {
        Restriction::new(min_card, None)
    }

    pub fn at_most(max_card: usize) -> Self {
        Restriction::new(0, Some(max_card))
    }

    pub fn exactly(card: usize) -> Self {
        Restriction::new(card, Some(card))
    }

    pub fn between(min_card: usize, max_card: usize) -> Self {
        Restriction::new(min_card, Some(max_card))
    }

    pub fn is_valid(&self) -> bool {
        self.max_card.is_none_or(|max| self.min_card <= max)
    }

    pub fn is_unrestricted(&self) -> bool {
        *self == Self::UNRESTRICTED
    }

    pub fn contains(&self, card: usize) -> bool {
        card >= self.min_card && self.max_card.is_none_or(|max| card <= max)
    }
}

/// The four collection constructors share one shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectionKind {
    Seq,
    MSet,
    PSet,
    Cycle,
}

impl CollectionKind {
    pub fn keyword(self) -> &'static str {
        match self {
            CollectionKind::Seq => "Seq",
            CollectionKind::MSet => "MSet",
            CollectionKind::PSet => "PSet",
            CollectionKind::Cycle => "Cycle",
        }
    }
}

/// A class expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Epsilon,
    Atom(String),
    ClassRef(String),
    Union(Vec<Expr>),
    Prod(Vec<Expr>),
    Seq(Box<Expr>, Restriction),
    MSet(Box<Expr>, Restriction),
    PSet(Box<Expr>, Restriction),
    Cycle(Box<Expr>, Restriction),
}

impl Expr {
    pub fn atom() -> Expr {
        Expr::Atom(DEFAULT_ATOM_LABEL.to_string())
    }

    pub fn labeled_atom(label: &str) -> Expr {
        Expr::Atom(label.to_string())
    }

    pub fn class(name: &str) -> Expr {
        Expr::ClassRef(name.to_string())
    }

    pub fn seq(arg: Expr) -> Expr {
        Expr::Seq(Box::new(arg), Restriction::UNRESTRICTED)
    }

    pub fn mset(arg: Expr) -> Expr {
        Expr::MSet(Box::new(arg), Restriction::UNRESTRICTED)
    }

    pub fn pset(arg: Expr) -> Expr {
        Expr::PSet(Box::new(arg), Restriction::UNRESTRICTED)
    }

    pub fn cycle(arg: Expr) -> Expr {
        Expr::Cycle(Box::new(arg), Restriction::UNRESTRICTED)
    }

    pub fn collection(kind: CollectionKind, arg: Expr, restr: Restriction) -> Expr {
        let arg = Box::new(arg);
        match kind {
            CollectionKind::Seq => Expr::Seq(arg, restr),
            CollectionKind::MSet => Expr::MSet(arg, restr),
            CollectionKind::PSet => Expr::PSet(arg, restr),
            CollectionKind::Cycle => Expr::Cycle(arg, restr),
        }
    }

    /// Views a collection node as `(kind, arg, restriction)`.
    pub fn as_collection(&self) -> Option<(CollectionKind, &Expr, Restriction)> {
        match self {
            Expr::Seq(a, r) => Some((CollectionKind::Seq, a, *r)),
            Expr::MSet(a, r) => Some((CollectionKind::MSet, a, *r)),
            Expr::PSet(a, r) => Some((CollectionKind::PSet, a, *r)),
            Expr::Cycle(a, r) => Some((CollectionKind::Cycle, a, *r)),
            _ => None,
        }
    }

    /// Calls `f` on every class name referenced by this expression.
    pub fn for_each_ref<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Expr::Epsilon | Expr::Atom(_) => {}
            Expr::ClassRef(name) => f(name),
            Expr::Union(items) | Expr::Prod(items) => {
                items.iter().for_each(|e| e.for_each_ref(f));
            }
            Expr::Seq(a, _) | Expr::MSet(a, _) | Expr::PSet(a, _) | Expr::Cycle(a, _) => {
                a.for_each_ref(f)
            }
        }
    }

    pub fn contains(&self, pred: &impl Fn(&Expr) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Expr::Epsilon | Expr::Atom(_) | Expr::ClassRef(_) => false,
            Expr::Union(items) | Expr::Prod(items) => items.iter().any(|e| e.contains(pred)),
            Expr::Seq(a, _) | Expr::MSet(a, _) | Expr::PSet(a, _) | Expr::Cycle(a, _) => {
                a.contains(pred)
            }
        }
    }
}

/// Counting semantics of a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Unlabeled,
    Labeled,
}

/// A validated system of mutually recursive class definitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecSystem {
    defs: Vec<(String, Expr)>,
    root: String,
    mode: Mode,
}

impl SpecSystem {
    pub fn defs(&self) -> &[(String, Expr)] {
        &self.defs
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.defs.iter().position(|(n, _)| n == name)
    }

    /// Same definitions with a different root.
    pub fn with_root(&self, root: &str) -> Result<SpecSystem, Error> {
        if self.get(root).is_none() {
            return Err(Error::UnknownClass(root.to_string()));
        }
        Ok(SpecSystem {
            defs: self.defs.clone(),
            root: root.to_string(),
            mode: self.mode,
        })
    }

    /// Same definitions under another counting mode (re-validated).
    pub fn with_mode(&self, mode: Mode) -> Result<SpecSystem, Error> {
        build_system(self.defs.clone(), &self.root, mode)
    }

    /// Classes reachable from `from`, in definition order.
    pub fn reachable_from(&self, from: &str) -> Vec<String> {
        let mut seen: HashSet<&str> = HashSet::new();
        let mut stack = vec![from];
        while let Some(name) = stack.pop() {
            if !seen.insert(name) {
                continue;
            }
            if let Some(expr) = self.get(name) {
                expr.for_each_ref(&mut |r| stack.push(r));
            }
        }
        self.defs
            .iter()
            .filter(|(n, _)| seen.contains(n.as_str()))
            .map(|(n, _)| n.clone())
            .collect()
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_expr(class: &str, expr: &Expr, names: &HashSet<&str>, mode: Mode, out: &mut Vec<ValidationIssue>) {
    let issue = |message: String| ValidationIssue {
        class: class.to_string(),
        message,
    };
    match expr {
        Expr::Epsilon => {}
        Expr::Atom(label) => {
            if !is_identifier(label) {
                out.push(issue(format!("invalid atom label '{label}'")));
            }
        }
        Expr::ClassRef(name) => {
            if !names.contains(name.as_str()) {
                out.push(issue(format!("unresolved class {name}")));
            }
        }
        Expr::Union(items) | Expr::Prod(items) => {
            if items.len() < 2 {
                let kw = if matches!(expr, Expr::Union(_)) { "Union" } else { "Prod" };
                out.push(issue(format!(
                    "{kw} needs at least 2 arguments, found {}",
                    items.len()
                )));
            }
            for item in items {
                check_expr(class, item, names, mode, out);
            }
        }
        Expr::Seq(arg, r) | Expr::MSet(arg, r) | Expr::PSet(arg, r) | Expr::Cycle(arg, r) => {
            if !r.is_valid() {
                out.push(issue(format!(
                    "restriction has min_card {} > max_card {}",
                    r.min_card,
                    r.max_card.unwrap_or(0)
                )));
            }
            if mode == Mode::Labeled && matches!(expr, Expr::PSet(..)) {
                out.push(issue("PSet not defined for labeled classes".to_string()));
            }
            check_expr(class, arg, names, mode, out);
        }
    }
}

/// Validates a list of definitions into a [`SpecSystem`].
///
/// Every violation is collected; the error carries all of them.
pub fn build_system(defs: Vec<(String, Expr)>, root: &str, mode: Mode) -> Result<SpecSystem, Error> {
    let mut issues = Vec::new();
    let mut names = HashSet::new();
    for (name, _) in &defs {
        if !is_identifier(name) {
            issues.push(ValidationIssue {
                class: name.clone(),
                message: format!("invalid class name '{name}'"),
            });
        }
        if !names.insert(name.as_str()) {
            issues.push(ValidationIssue {
                class: name.clone(),
                message: format!("duplicate definition of {name}"),
            });
        }
    }
    if defs.is_empty() {
        issues.push(ValidationIssue {
            class: root.to_string(),
            message: "system has no definitions".to_string(),
        });
    } else if !names.contains(root) {
        issues.push(ValidationIssue {
            class: root.to_string(),
            message: format!("root class {root} is not defined"),
        });
    }
    for (name, expr) in &defs {
        check_expr(name, expr, &names, mode, &mut issues);
    }
    if !issues.is_empty() {
        return Err(Error::Validation(issues));
    }
    Ok(SpecSystem {
        defs,
        root: root.to_string(),
        mode,
    })
}

/// A concrete combinatorial object.
///
/// `MSet` children are stored non-increasing, `PSet` children strictly
/// decreasing and `Cycle` children as their minimal rotation, all under the
/// global structure order of the enumerator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Structure {
    Epsilon,
    Atom(String),
    Union(usize, Box<Structure>),
    Prod(Vec<Structure>),
    Seq(Vec<Structure>),
    MSet(Vec<Structure>),
    PSet(Vec<Structure>),
    Cycle(Vec<Structure>),
}

impl Structure {
    pub fn atom() -> Structure {
        Structure::Atom(DEFAULT_ATOM_LABEL.to_string())
    }

    pub fn children(&self) -> &[Structure] {
        match self {
            Structure::Epsilon | Structure::Atom(_) => &[],
            Structure::Union(_, child) => std::slice::from_ref(child),
            Structure::Prod(c)
            | Structure::Seq(c)
            | Structure::MSet(c)
            | Structure::PSet(c)
            | Structure::Cycle(c) => c,
        }
    }

    /// Number of atoms.
    pub fn size(&self) -> usize {
        match self {
            Structure::Atom(_) => 1,
            other => other.children().iter().map(Structure::size).sum(),
        }
    }
}

pub fn size_of(s: &Structure) -> usize {
    s.size()
}

/// True iff `s` is derivable from `class` in `sys`, canonical forms included.
///
/// Canonicity of `MSet`/`PSet`/`Cycle` nodes is judged under the global order,
/// which needs the counting tables of the class; the unlabeled order is used
/// whatever the system mode.
pub fn member_of(s: &Structure, sys: &SpecSystem, class: &str) -> bool {
    let Ok(sys) = sys.with_mode(Mode::Unlabeled) else {
        return false;
    };
    match crate::enumerator::Enumerator::new(&sys, class) {
        Ok(mut e) => e.prepare(s.size()).is_ok() && e.rank(s).is_ok(),
        Err(_) => false,
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, tag: &str, items: &[Structure]) -> fmt::Result {
            write!(f, "{tag}(")?;
            for (i, s) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{s}")?;
            }
            f.write_str(")")
        }
        match self {
            Structure::Epsilon => f.write_str("E"),
            Structure::Atom(label) => write!(f, "Z[{label}]"),
            Structure::Union(i, child) => write!(f, "U{i}({child})"),
            Structure::Prod(c) => list(f, "P", c),
            Structure::Seq(c) => list(f, "S", c),
            Structure::MSet(c) => list(f, "M", c),
            Structure::PSet(c) => list(f, "PS", c),
            Structure::Cycle(c) => list(f, "C", c),
        }
    }
}

/// Class names mapped to their definition index.
pub(crate) fn name_index(sys: &SpecSystem) -> HashMap<&str, usize> {
    sys.defs()
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.as_str(), i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trees() -> SpecSystem {
        build_system(
            vec![(
                "T".into(),
                Expr::Prod(vec![Expr::atom(), Expr::seq(Expr::class("T"))]),
            )],
            "T",
            Mode::Unlabeled,
        )
        .unwrap()
    }

    #[test]
    fn minimal_system_is_valid() {
        let sys = trees();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.root(), "T");
    }

    #[test]
    fn unresolved_reference_is_reported() {
        let err = build_system(
            vec![(
                "T".into(),
                Expr::Prod(vec![Expr::atom(), Expr::seq(Expr::class("U"))]),
            )],
            "T",
            Mode::Unlabeled,
        )
        .unwrap_err();
        let Error::Validation(issues) = err else { panic!() };
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].class, "T");
        assert_eq!(issues[0].message, "unresolved class U");
    }

    #[test]
    fn pset_rejected_in_labeled_mode() {
        let err = build_system(
            vec![("S".into(), Expr::pset(Expr::atom()))],
            "S",
            Mode::Labeled,
        )
        .unwrap_err();
        let Error::Validation(issues) = err else { panic!() };
        assert_eq!(issues[0].message, "PSet not defined for labeled classes");
    }

    #[test]
    fn all_violations_are_collected() {
        let err = build_system(
            vec![
                ("A".into(), Expr::Union(vec![Expr::atom()])),
                ("A".into(), Expr::Seq(Box::new(Expr::class("X")), Restriction::between(3, 1))),
            ],
            "A",
            Mode::Unlabeled,
        )
        .unwrap_err();
        let Error::Validation(issues) = err else { panic!() };
        let messages: Vec<_> = issues.iter().map(|i| i.message.as_str()).collect();
        assert!(messages.contains(&"duplicate definition of A"));
        assert!(messages.contains(&"Union needs at least 2 arguments, found 1"));
        assert!(messages.contains(&"unresolved class X"));
        assert!(messages.iter().any(|m| m.starts_with("restriction has min_card 3")));
    }

    #[test]
    fn missing_root_is_reported() {
        assert!(build_system(vec![("A".into(), Expr::atom())], "B", Mode::Unlabeled).is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(size_of(&Structure::Epsilon), 0);
        assert_eq!(size_of(&Structure::atom()), 1);
        let s = Structure::Prod(vec![
            Structure::atom(),
            Structure::Seq(vec![Structure::atom(), Structure::atom()]),
        ]);
        assert_eq!(size_of(&s), 3);
    }

    #[test]
    fn membership() {
        let sys = trees();
        let leaf = Structure::Prod(vec![Structure::atom(), Structure::Seq(vec![])]);
        assert!(member_of(&leaf, &sys, "T"));
        assert!(!member_of(&Structure::atom(), &sys, "T"));

        let u = build_system(
            vec![("U".into(), Expr::Union(vec![Expr::atom(), Expr::Epsilon]))],
            "U",
            Mode::Unlabeled,
        )
        .unwrap();
        assert!(member_of(&Structure::Union(1, Box::new(Structure::Epsilon)), &u, "U"));
        assert!(!member_of(&Structure::Union(2, Box::new(Structure::Epsilon)), &u, "U"));
    }

    #[test]
    fn mset_with_increasing_children_is_not_member() {
        // P = MSet(I), I = Seq(Atom, card >= 1): parts are atom runs.
        let sys = build_system(
            vec![
                ("P".into(), Expr::MSet(Box::new(Expr::class("I")), Restriction::at_least(1))),
                ("I".into(), Expr::Seq(Box::new(Expr::atom()), Restriction::at_least(1))),
            ],
            "P",
            Mode::Unlabeled,
        )
        .unwrap();
        let part = |k: usize| Structure::Seq(vec![Structure::atom(); k]);
        assert!(member_of(&Structure::MSet(vec![part(2), part(1)]), &sys, "P"));
        assert!(!member_of(&Structure::MSet(vec![part(1), part(2)]), &sys, "P"));
        assert!(member_of(&Structure::MSet(vec![part(1), part(1)]), &sys, "P"));
    }

    #[test]
    fn display_matches_textual_form() {
        let s = Structure::Prod(vec![
            Structure::atom(),
            Structure::Seq(vec![Structure::Prod(vec![Structure::atom(), Structure::Seq(vec![])])]),
        ]);
        assert_eq!(s.to_string(), "P(Z[z],S(P(Z[z],S())))");
        let u = Structure::Union(1, Box::new(Structure::PSet(vec![Structure::Epsilon])));
        assert_eq!(u.to_string(), "U1(PS(E))");
    }
}

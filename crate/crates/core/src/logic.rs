//! Function-free first-order logic: terms, atoms, formulas, states and the
//! operations connecting them (substitution, grounding, truth evaluation).
//!
//! States follow closed-world semantics: a ground atom absent from the state
//! is false. Quantifiers expand over a typed object pool; the untyped case is
//! recovered by declaring every object under the root type `object`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sym::Sym;

/// Name of the implicit root type every other type descends from.
pub const OBJECT_TYPE: &str = "object";

/// Predicate name reserved for structural equality atoms `(= a b)`.
/// Equality is decided on the terms themselves, never looked up in a state.
pub const EQ_PREDICATE: &str = "=";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("formula has unbound variable ?{0}")]
    UnboundVariable(Sym),
    #[error("no objects of type {0} to expand a quantifier over")]
    EmptyDomain(Sym),
    #[error("formula is not ground (contains variable ?{0} or a quantifier)")]
    NotGround(Sym),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Variable(Sym),
    Constant(Sym),
}

impl Term {
    pub fn var(name: impl Into<Sym>) -> Term {
        Term::Variable(name.into())
    }

    pub fn constant(name: impl Into<Sym>) -> Term {
        Term::Constant(name.into())
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn name(&self) -> &Sym {
        match self {
            Term::Variable(n) | Term::Constant(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(n) => write!(f, "?{}", n),
            Term::Constant(n) => write!(f, "{}", n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: Sym,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<Sym>, args: Vec<Term>) -> Atom {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_variable())
    }

    pub fn is_equality(&self) -> bool {
        self.predicate.as_str() == EQ_PREDICATE
    }

    /// Converts to a [`GroundAtom`], panicking if a variable remains.
    pub fn to_ground(&self) -> GroundAtom {
        GroundAtom {
            predicate: self.predicate.clone(),
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Constant(c) => c.clone(),
                    Term::Variable(v) => panic!("atom not ground: variable ?{}", v),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {}", a)?;
        }
        write!(f, ")")
    }
}

/// A predicate applied to constants only; the element type of [`State`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: Sym,
    pub args: Vec<Sym>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<Sym>, args: Vec<Sym>) -> GroundAtom {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|c| Term::Constant(c.clone())).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {}", a)?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Imply(Box<Formula>, Box<Formula>),
    /// Universal quantifier: variable, its type, body.
    Forall(Sym, Sym, Box<Formula>),
    Exists(Sym, Sym, Box<Formula>),
}

impl Formula {
    /// The empty conjunction, true in every state.
    pub fn truth() -> Formula {
        Formula::And(Vec::new())
    }

    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, Formula::And(fs) if fs.is_empty())
    }

    /// Canonical form: `Imply(a,b)` rewritten to `Or(¬a, b)` and
    /// `Exists(x, f)` to `¬Forall(x, ¬f)`, recursively.
    pub fn canonical(&self) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::Not(f) => Formula::not(f.canonical()),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.canonical()).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.canonical()).collect()),
            Formula::Imply(a, b) => Formula::Or(vec![Formula::not(a.canonical()), b.canonical()]),
            Formula::Forall(x, ty, f) => Formula::Forall(x.clone(), ty.clone(), Box::new(f.canonical())),
            Formula::Exists(x, ty, f) => Formula::not(Formula::Forall(
                x.clone(),
                ty.clone(),
                Box::new(Formula::not(f.canonical())),
            )),
        }
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<Sym> {
        fn walk(f: &Formula, bound: &mut Vec<Sym>, out: &mut Vec<Sym>) {
            match f {
                Formula::Atom(a) => {
                    for t in &a.args {
                        if let Term::Variable(v) = t {
                            if !bound.contains(v) && !out.contains(v) {
                                out.push(v.clone());
                            }
                        }
                    }
                }
                Formula::Not(g) => walk(g, bound, out),
                Formula::And(gs) | Formula::Or(gs) => {
                    for g in gs {
                        walk(g, bound, out);
                    }
                }
                Formula::Imply(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                Formula::Forall(x, _, g) | Formula::Exists(x, _, g) => {
                    bound.push(x.clone());
                    walk(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Formula::Atom(a) => a.is_ground(),
            Formula::Not(f) => f.is_ground(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| f.is_ground()),
            Formula::Imply(a, b) => a.is_ground() && b.is_ground(),
            // A quantifier binds a variable, so the formula is not ground.
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    /// All non-equality atoms occurring syntactically in the formula,
    /// regardless of polarity.
    pub fn mentioned_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                if !a.is_equality() {
                    out.insert(a.clone());
                }
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_atoms(out);
                }
            }
            Formula::Imply(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Forall(_, _, f) | Formula::Exists(_, _, f) => f.collect_atoms(out),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{}", a),
            Formula::Not(g) => write!(f, "(not {})", g),
            Formula::And(gs) => {
                write!(f, "(and")?;
                for g in gs {
                    write!(f, " {}", g)?;
                }
                write!(f, ")")
            }
            Formula::Or(gs) => {
                write!(f, "(or")?;
                for g in gs {
                    write!(f, " {}", g)?;
                }
                write!(f, ")")
            }
            Formula::Imply(a, b) => write!(f, "(imply {} {})", a, b),
            Formula::Forall(x, ty, g) => write!(f, "(forall (?{} - {}) {})", x, ty, g),
            Formula::Exists(x, ty, g) => write!(f, "(exists (?{} - {}) {})", x, ty, g),
        }
    }
}

/// A state: a set of ground atoms, interpreted closed-world.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State {
    atoms: BTreeSet<GroundAtom>,
}

impl State {
    pub fn new() -> State {
        State::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = GroundAtom>) -> State {
        State {
            atoms: atoms.into_iter().collect(),
        }
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn insert(&mut self, atom: GroundAtom) {
        self.atoms.insert(atom);
    }

    pub fn remove(&mut self, atom: &GroundAtom) {
        self.atoms.remove(atom);
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> {
        self.atoms.iter()
    }

    /// One transition step: remove all of `dels`, then add all of `adds`.
    pub fn apply<'a>(
        &self,
        dels: impl IntoIterator<Item = &'a GroundAtom>,
        adds: impl IntoIterator<Item = &'a GroundAtom>,
    ) -> State {
        let mut next = self.clone();
        for d in dels {
            next.remove(d);
        }
        for a in adds {
            next.insert(a.clone());
        }
        next
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, "}}")
    }
}

/// Typed constants plus the type hierarchy they live in.
///
/// Types form a forest rooted at the implicit `object` type. Declaration
/// order of objects is preserved; every enumeration over the pool is
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectPool {
    /// (type, parent type) pairs in declaration order; `object` is implicit.
    types: Vec<(Sym, Sym)>,
    /// (constant, type) pairs in declaration order.
    objects: Vec<(Sym, Sym)>,
}

impl Default for ObjectPool {
    fn default() -> Self {
        ObjectPool::new()
    }
}

impl ObjectPool {
    pub fn new() -> ObjectPool {
        ObjectPool {
            types: Vec::new(),
            objects: Vec::new(),
        }
    }

    pub fn declare_type(&mut self, name: impl Into<Sym>, parent: impl Into<Sym>) {
        let name = name.into();
        let parent = parent.into();
        if name.as_str() == OBJECT_TYPE {
            return;
        }
        if !self.types.iter().any(|(n, _)| *n == name) {
            self.types.push((name, parent));
        }
    }

    pub fn declare_object(&mut self, name: impl Into<Sym>, ty: impl Into<Sym>) {
        let name = name.into();
        let ty = ty.into();
        if !self.objects.iter().any(|(n, _)| *n == name) {
            self.objects.push((name, ty));
        }
    }

    pub fn types(&self) -> impl Iterator<Item = &(Sym, Sym)> {
        self.types.iter()
    }

    pub fn objects(&self) -> impl Iterator<Item = &(Sym, Sym)> {
        self.objects.iter()
    }

    pub fn has_type(&self, ty: &str) -> bool {
        ty == OBJECT_TYPE || self.types.iter().any(|(n, _)| n.as_str() == ty)
    }

    pub fn contains_object(&self, name: &str) -> bool {
        self.objects.iter().any(|(n, _)| n.as_str() == name)
    }

    pub fn type_of(&self, object: &str) -> Option<&Sym> {
        self.objects.iter().find(|(n, _)| n.as_str() == object).map(|(_, t)| t)
    }

    /// True iff `sub` equals `sup` or is a (transitive) descendant of it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sub == sup || sup == OBJECT_TYPE {
            return true;
        }
        let mut current = sub.to_string();
        // Walk up the parent chain; bounded by the number of declared types.
        for _ in 0..=self.types.len() {
            match self.types.iter().find(|(n, _)| n.as_str() == current) {
                Some((_, parent)) => {
                    if parent.as_str() == sup {
                        return true;
                    }
                    current = parent.as_str().to_string();
                }
                None => return false,
            }
        }
        false
    }

    /// Objects whose declared type is a subtype of `ty`, in declaration order.
    pub fn objects_of(&self, ty: &str) -> Vec<Sym> {
        self.objects
            .iter()
            .filter(|(_, t)| self.is_subtype(t.as_str(), ty))
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Checks the hierarchy is acyclic and every tag resolves.
    pub fn check(&self) -> Result<(), String> {
        for (name, _) in &self.types {
            let mut seen = vec![name.clone()];
            let mut current = name.clone();
            loop {
                let parent = match self.types.iter().find(|(n, _)| *n == current) {
                    Some((_, p)) => p.clone(),
                    None => break,
                };
                if parent.as_str() == OBJECT_TYPE {
                    break;
                }
                if seen.contains(&parent) {
                    return Err(format!("type hierarchy cycle through {}", parent));
                }
                if !self.has_type(parent.as_str()) {
                    return Err(format!("type {} has undeclared parent {}", current, parent));
                }
                seen.push(parent.clone());
                current = parent;
            }
        }
        for (obj, ty) in &self.objects {
            if !self.has_type(ty.as_str()) {
                return Err(format!("object {} has undeclared type {}", obj, ty));
            }
        }
        Ok(())
    }
}

/// Replaces every free occurrence of variable `x` by constant `c`.
/// Occurrences bound by a quantifier re-binding `x` are left untouched.
pub fn substitute(formula: &Formula, x: &Sym, c: &Sym) -> Formula {
    match formula {
        Formula::Atom(a) => Formula::Atom(Atom {
            predicate: a.predicate.clone(),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Variable(v) if v == x => Term::Constant(c.clone()),
                    other => other.clone(),
                })
                .collect(),
        }),
        Formula::Not(f) => Formula::not(substitute(f, x, c)),
        Formula::And(fs) => Formula::And(fs.iter().map(|f| substitute(f, x, c)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|f| substitute(f, x, c)).collect()),
        Formula::Imply(a, b) => Formula::Imply(Box::new(substitute(a, x, c)), Box::new(substitute(b, x, c))),
        Formula::Forall(v, ty, f) if v == x => Formula::Forall(v.clone(), ty.clone(), f.clone()),
        Formula::Exists(v, ty, f) if v == x => Formula::Exists(v.clone(), ty.clone(), f.clone()),
        Formula::Forall(v, ty, f) => Formula::Forall(v.clone(), ty.clone(), Box::new(substitute(f, x, c))),
        Formula::Exists(v, ty, f) => Formula::Exists(v.clone(), ty.clone(), Box::new(substitute(f, x, c))),
    }
}

/// Applies a whole binding at once (free occurrences only).
pub fn substitute_all(formula: &Formula, binding: &[(Sym, Sym)]) -> Formula {
    let mut out = formula.clone();
    for (x, c) in binding {
        out = substitute(&out, x, c);
    }
    out
}

/// Expands quantifiers over the pool: `forall` to a conjunction over the
/// type-compatible constants, `exists` to a disjunction. The input must be
/// closed; free variables are an error here (existential closure is the
/// business of [`holds`]).
pub fn ground(formula: &Formula, pool: &ObjectPool) -> Result<Formula, LogicError> {
    if let Some(v) = formula.free_vars().first() {
        return Err(LogicError::UnboundVariable(v.clone()));
    }
    ground_rec(formula, pool)
}

fn ground_rec(formula: &Formula, pool: &ObjectPool) -> Result<Formula, LogicError> {
    match formula {
        Formula::Atom(a) => Ok(Formula::Atom(a.clone())),
        Formula::Not(f) => Ok(Formula::not(ground_rec(f, pool)?)),
        Formula::And(fs) => Ok(Formula::And(
            fs.iter().map(|f| ground_rec(f, pool)).collect::<Result<_, _>>()?,
        )),
        Formula::Or(fs) => Ok(Formula::Or(
            fs.iter().map(|f| ground_rec(f, pool)).collect::<Result<_, _>>()?,
        )),
        Formula::Imply(a, b) => Ok(Formula::Imply(
            Box::new(ground_rec(a, pool)?),
            Box::new(ground_rec(b, pool)?),
        )),
        Formula::Forall(x, ty, body) => {
            let objs = pool.objects_of(ty.as_str());
            if objs.is_empty() {
                return Err(LogicError::EmptyDomain(ty.clone()));
            }
            let conjuncts = objs
                .iter()
                .map(|c| ground_rec(&substitute(body, x, c), pool))
                .collect::<Result<_, _>>()?;
            Ok(Formula::And(conjuncts))
        }
        Formula::Exists(x, ty, body) => {
            let objs = pool.objects_of(ty.as_str());
            if objs.is_empty() {
                return Err(LogicError::EmptyDomain(ty.clone()));
            }
            let disjuncts = objs
                .iter()
                .map(|c| ground_rec(&substitute(body, x, c), pool))
                .collect::<Result<_, _>>()?;
            Ok(Formula::Or(disjuncts))
        }
    }
}

/// Truth value of a ground formula in a state (Herbrand semantics: an atom
/// is true iff it is in the state; equality atoms are decided structurally).
pub fn evaluate(state: &State, formula: &Formula) -> Result<bool, LogicError> {
    match formula {
        Formula::Atom(a) => {
            if let Some(Term::Variable(v)) = a.args.iter().find(|t| t.is_variable()) {
                return Err(LogicError::NotGround(v.clone()));
            }
            if a.is_equality() {
                Ok(a.args.first() == a.args.get(1))
            } else {
                Ok(state.contains(&a.to_ground()))
            }
        }
        Formula::Not(f) => Ok(!evaluate(state, f)?),
        Formula::And(fs) => {
            for f in fs {
                if !evaluate(state, f)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(fs) => {
            for f in fs {
                if evaluate(state, f)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Imply(a, b) => Ok(!evaluate(state, a)? || evaluate(state, b)?),
        Formula::Forall(x, _, _) | Formula::Exists(x, _, _) => Err(LogicError::NotGround(x.clone())),
    }
}

/// True iff some instantiation of the formula's free variables, with
/// quantifiers expanded over the pool, evaluates true in the state.
/// For a closed formula this coincides with `evaluate(s, ground(f, pool))`.
pub fn holds(state: &State, formula: &Formula, pool: &ObjectPool) -> Result<bool, LogicError> {
    let free = formula.free_vars();
    if free.is_empty() {
        return evaluate(state, &ground(formula, pool)?);
    }
    // Existential closure: enumerate bindings over all objects, in
    // declaration order, accepting the first satisfying one.
    let domain: Vec<Sym> = pool.objects_of(OBJECT_TYPE);
    if domain.is_empty() {
        return Err(LogicError::EmptyDomain(Sym::from(OBJECT_TYPE)));
    }
    let mut indices = vec![0usize; free.len()];
    loop {
        let mut candidate = formula.clone();
        for (var, idx) in free.iter().zip(&indices) {
            candidate = substitute(&candidate, var, &domain[*idx]);
        }
        if evaluate(state, &ground(&candidate, pool)?)? {
            return Ok(true);
        }
        // Advance the mixed-radix counter.
        let mut k = free.len();
        loop {
            if k == 0 {
                return Ok(false);
            }
            k -= 1;
            indices[k] += 1;
            if indices[k] < domain.len() {
                break;
            }
            indices[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool_ab() -> ObjectPool {
        let mut p = ObjectPool::new();
        p.declare_object("a", OBJECT_TYPE);
        p.declare_object("b", OBJECT_TYPE);
        p
    }

    fn p(t: Term) -> Formula {
        Formula::Atom(Atom::new("p", vec![t]))
    }

    fn ga(pred: &str, args: &[&str]) -> GroundAtom {
        GroundAtom::new(pred, args.iter().map(|a| Sym::from(*a)).collect())
    }

    #[test]
    fn substitute_free_occurrence() {
        // p(x, a)[x/b] = p(b, a)
        let f = Formula::Atom(Atom::new("p", vec![Term::var("x"), Term::constant("a")]));
        let got = substitute(&f, &Sym::from("x"), &Sym::from("b"));
        let want = Formula::Atom(Atom::new("p", vec![Term::constant("b"), Term::constant("a")]));
        assert_eq!(got, want);
    }

    #[test]
    fn substitute_skips_bound_occurrence() {
        // (forall x p(x))[x/b] leaves the body alone
        let f = Formula::Forall("x".into(), OBJECT_TYPE.into(), Box::new(p(Term::var("x"))));
        assert_eq!(substitute(&f, &Sym::from("x"), &Sym::from("b")), f);
    }

    #[test]
    fn substitute_shadowing() {
        // (p(x) and exists x q(x))[x/c]: only the free p(x) changes
        let f = Formula::And(vec![
            p(Term::var("x")),
            Formula::Exists(
                "x".into(),
                OBJECT_TYPE.into(),
                Box::new(Formula::Atom(Atom::new("q", vec![Term::var("x")]))),
            ),
        ]);
        let got = substitute(&f, &Sym::from("x"), &Sym::from("c"));
        let want = Formula::And(vec![
            p(Term::constant("c")),
            Formula::Exists(
                "x".into(),
                OBJECT_TYPE.into(),
                Box::new(Formula::Atom(Atom::new("q", vec![Term::var("x")]))),
            ),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn ground_forall_expands_to_conjunction() {
        let f = Formula::Forall("x".into(), OBJECT_TYPE.into(), Box::new(p(Term::var("x"))));
        let got = ground(&f, &pool_ab()).unwrap();
        assert_eq!(got, Formula::And(vec![p(Term::constant("a")), p(Term::constant("b"))]));
    }

    #[test]
    fn ground_exists_expands_to_disjunction() {
        let f = Formula::Exists("x".into(), OBJECT_TYPE.into(), Box::new(p(Term::var("x"))));
        let got = ground(&f, &pool_ab()).unwrap();
        assert_eq!(got, Formula::Or(vec![p(Term::constant("a")), p(Term::constant("b"))]));
    }

    #[test]
    fn ground_nested_quantifiers_match_semantic_oracle() {
        // forall x exists y r(x,y) over {a,b}: check the expansion against a
        // direct semantic evaluation for all 16 interpretations of r.
        let f = Formula::Forall(
            "x".into(),
            OBJECT_TYPE.into(),
            Box::new(Formula::Exists(
                "y".into(),
                OBJECT_TYPE.into(),
                Box::new(Formula::Atom(Atom::new("r", vec![Term::var("x"), Term::var("y")]))),
            )),
        );
        let pool = pool_ab();
        let expanded = ground(&f, &pool).unwrap();
        let universe = [
            ga("r", &["a", "a"]),
            ga("r", &["a", "b"]),
            ga("r", &["b", "a"]),
            ga("r", &["b", "b"]),
        ];
        for mask in 0u32..16 {
            let state = State::from_atoms(
                universe
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, a)| a.clone()),
            );
            // Independent oracle: evaluate the quantifiers semantically.
            let oracle = ["a", "b"].iter().all(|x| {
                ["a", "b"].iter().any(|y| state.contains(&ga("r", &[x, y])))
            });
            assert_eq!(evaluate(&state, &expanded).unwrap(), oracle, "mask {}", mask);
        }
    }

    #[test]
    fn ground_rejects_free_variables() {
        let f = p(Term::var("x"));
        assert_eq!(ground(&f, &pool_ab()), Err(LogicError::UnboundVariable("x".into())));
    }

    #[test]
    fn ground_rejects_empty_type() {
        let mut pool = pool_ab();
        pool.declare_type("ghost", OBJECT_TYPE);
        let f = Formula::Forall("x".into(), "ghost".into(), Box::new(p(Term::var("x"))));
        assert_eq!(ground(&f, &pool), Err(LogicError::EmptyDomain("ghost".into())));
    }

    #[test]
    fn ground_idempotent_on_ground_formulas() {
        let f = Formula::And(vec![p(Term::constant("a")), Formula::not(p(Term::constant("b")))]);
        let once = ground(&f, &pool_ab()).unwrap();
        let twice = ground(&once, &pool_ab()).unwrap();
        assert_eq!(once, f);
        assert_eq!(twice, once);
    }

    #[test]
    fn evaluate_closed_world() {
        let s = State::from_atoms([ga("p", &["a"])]);
        let f = Formula::And(vec![p(Term::constant("a")), Formula::not(p(Term::constant("b")))]);
        assert!(evaluate(&s, &f).unwrap());

        let empty = State::new();
        assert!(evaluate(&empty, &Formula::not(p(Term::constant("a")))).unwrap());

        let s2 = State::from_atoms([ga("p", &["a"]), ga("q", &["b"])]);
        let f2 = Formula::Or(vec![
            p(Term::constant("b")),
            Formula::Atom(Atom::new("q", vec![Term::constant("b")])),
        ]);
        assert!(evaluate(&s2, &f2).unwrap());
    }

    #[test]
    fn evaluate_rejects_non_ground() {
        let s = State::new();
        assert!(matches!(evaluate(&s, &p(Term::var("x"))), Err(LogicError::NotGround(_))));
        let q = Formula::Forall("x".into(), OBJECT_TYPE.into(), Box::new(p(Term::var("x"))));
        assert!(matches!(evaluate(&s, &q), Err(LogicError::NotGround(_))));
    }

    #[test]
    fn equality_is_structural() {
        let s = State::new();
        let eq = Formula::Atom(Atom::new(EQ_PREDICATE, vec![Term::constant("a"), Term::constant("a")]));
        let ne = Formula::Atom(Atom::new(EQ_PREDICATE, vec![Term::constant("a"), Term::constant("b")]));
        assert!(evaluate(&s, &eq).unwrap());
        assert!(!evaluate(&s, &ne).unwrap());
    }

    #[test]
    fn holds_existentially_closes_free_variables() {
        let pool = pool_ab();
        let s = State::from_atoms([ga("p", &["a"])]);
        assert!(holds(&s, &p(Term::var("x")), &pool).unwrap());
        assert!(!holds(&State::new(), &p(Term::var("x")), &pool).unwrap());
    }

    #[test]
    fn holds_closed_formula_equals_ground_evaluate() {
        let pool = pool_ab();
        let s = State::from_atoms([ga("p", &["a"]), ga("p", &["b"])]);
        let f = Formula::Forall("x".into(), OBJECT_TYPE.into(), Box::new(p(Term::var("x"))));
        assert!(holds(&s, &f, &pool).unwrap());
        assert_eq!(
            holds(&s, &f, &pool).unwrap(),
            evaluate(&s, &ground(&f, &pool).unwrap()).unwrap()
        );
    }

    #[test]
    fn forall_conjunct_count_matches_pool_size() {
        let mut pool = ObjectPool::new();
        for name in ["a", "b", "c", "d"] {
            pool.declare_object(name, OBJECT_TYPE);
        }
        let f = Formula::Forall("x".into(), OBJECT_TYPE.into(), Box::new(p(Term::var("x"))));
        match ground(&f, &pool).unwrap() {
            Formula::And(cs) => assert_eq!(cs.len(), 4),
            other => panic!("expected conjunction, got {}", other),
        }
    }

    #[test]
    fn subtype_enumeration_respects_hierarchy() {
        let mut pool = ObjectPool::new();
        pool.declare_type("vehicle", OBJECT_TYPE);
        pool.declare_type("truck", "vehicle");
        pool.declare_object("t1", "truck");
        pool.declare_object("v1", "vehicle");
        pool.declare_object("x1", OBJECT_TYPE);
        assert_eq!(pool.objects_of("vehicle"), vec![Sym::from("t1"), Sym::from("v1")]);
        assert_eq!(pool.objects_of("truck"), vec![Sym::from("t1")]);
        assert_eq!(pool.objects_of(OBJECT_TYPE).len(), 3);
        pool.check().unwrap();
    }
}

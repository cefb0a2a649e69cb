//! The planning object model: tasks, actions, methods, temporal task
//! networks with their four constraint stores, domains and problems, plus
//! model-level validation and decomposition-constraint normalization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Atom, Formula, ObjectPool, State, Term, EQ_PREDICATE, OBJECT_TYPE};
use crate::span::SourceSpan;
use crate::sym::Sym;

/// A typed formal parameter `?name - type`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Parameter {
    pub name: Sym,
    pub ty: Sym,
}

impl Parameter {
    pub fn new(name: impl Into<Sym>, ty: impl Into<Sym>) -> Parameter {
        Parameter {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{} - {}", self.name, self.ty)
    }
}

/// A task occurrence: a name applied to terms. Whether it is primitive or
/// compound is a property of the enclosing domain, see [`Domain::kind_of`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Task {
    pub name: Sym,
    pub args: Vec<Term>,
}

impl Task {
    pub fn new(name: impl Into<Sym>, args: Vec<Term>) -> Task {
        Task {
            name: name.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_variable())
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {}", a)?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Primitive,
    Compound,
}

/// An instantaneous action: precondition plus add and delete sets.
/// The two effect sets must be disjoint once ground.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SnapAction {
    pub name: Sym,
    pub precond: Formula,
    pub effect_pos: BTreeSet<Atom>,
    pub effect_neg: BTreeSet<Atom>,
}

impl SnapAction {
    pub fn new(name: impl Into<Sym>) -> SnapAction {
        SnapAction {
            name: name.into(),
            precond: Formula::truth(),
            effect_pos: BTreeSet::new(),
            effect_neg: BTreeSet::new(),
        }
    }
}

/// Closed integer arithmetic over durations. `Dur(id)` refers to the
/// duration of a task identifier and is only legal in duration constraints,
/// never in an action's own duration expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DurationExpr {
    Lit(i64),
    Dur(Sym),
    Add(Box<DurationExpr>, Box<DurationExpr>),
    Sub(Box<DurationExpr>, Box<DurationExpr>),
    Mul(Box<DurationExpr>, Box<DurationExpr>),
}

impl DurationExpr {
    /// Evaluates with task durations supplied by `lookup`.
    pub fn eval(&self, lookup: &impl Fn(&Sym) -> Option<i64>) -> Result<i64, Sym> {
        match self {
            DurationExpr::Lit(n) => Ok(*n),
            DurationExpr::Dur(id) => lookup(id).ok_or_else(|| id.clone()),
            DurationExpr::Add(a, b) => Ok(a.eval(lookup)? + b.eval(lookup)?),
            DurationExpr::Sub(a, b) => Ok(a.eval(lookup)? - b.eval(lookup)?),
            DurationExpr::Mul(a, b) => Ok(a.eval(lookup)? * b.eval(lookup)?),
        }
    }

    /// Evaluates an expression containing no `Dur` references.
    pub fn eval_closed(&self) -> Result<i64, Sym> {
        self.eval(&|_| None)
    }

    pub fn referenced_ids(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_ids(&mut out);
        out
    }

    fn collect_ids(&self, out: &mut BTreeSet<Sym>) {
        match self {
            DurationExpr::Lit(_) => {}
            DurationExpr::Dur(id) => {
                out.insert(id.clone());
            }
            DurationExpr::Add(a, b) | DurationExpr::Sub(a, b) | DurationExpr::Mul(a, b) => {
                a.collect_ids(out);
                b.collect_ids(out);
            }
        }
    }

    fn rename(&self, renaming: &BTreeMap<Sym, Sym>) -> DurationExpr {
        match self {
            DurationExpr::Lit(n) => DurationExpr::Lit(*n),
            DurationExpr::Dur(id) => DurationExpr::Dur(renaming.get(id).cloned().unwrap_or_else(|| id.clone())),
            DurationExpr::Add(a, b) => DurationExpr::Add(Box::new(a.rename(renaming)), Box::new(b.rename(renaming))),
            DurationExpr::Sub(a, b) => DurationExpr::Sub(Box::new(a.rename(renaming)), Box::new(b.rename(renaming))),
            DurationExpr::Mul(a, b) => DurationExpr::Mul(Box::new(a.rename(renaming)), Box::new(b.rename(renaming))),
        }
    }
}

impl fmt::Display for DurationExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DurationExpr::Lit(n) => write!(f, "{}", n),
            DurationExpr::Dur(id) => write!(f, "(duration {})", id),
            DurationExpr::Add(a, b) => write!(f, "(+ {} {})", a, b),
            DurationExpr::Sub(a, b) => write!(f, "(- {} {})", a, b),
            DurationExpr::Mul(a, b) => write!(f, "(* {} {})", a, b),
        }
    }
}

/// A durative action schema: start and end snap actions, an invariant that
/// must hold strictly between them, and a fixed integer duration expression.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DurativeAction {
    pub name: Sym,
    pub params: Vec<Parameter>,
    pub start: SnapAction,
    pub end: SnapAction,
    pub inv: Formula,
    pub duration: DurationExpr,
}

/// An action schema: either an instantaneous snap action or a durative one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionSchema {
    Snap { params: Vec<Parameter>, action: SnapAction },
    Durative(DurativeAction),
}

impl ActionSchema {
    pub fn name(&self) -> &Sym {
        match self {
            ActionSchema::Snap { action, .. } => &action.name,
            ActionSchema::Durative(d) => &d.name,
        }
    }

    pub fn params(&self) -> &[Parameter] {
        match self {
            ActionSchema::Snap { params, .. } => params,
            ActionSchema::Durative(d) => &d.params,
        }
    }
}

/// One of the two events of a task identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TimePoint {
    Start(Sym),
    End(Sym),
}

impl TimePoint {
    pub fn id(&self) -> &Sym {
        match self {
            TimePoint::Start(i) | TimePoint::End(i) => i,
        }
    }

    pub fn rename(&self, renaming: &BTreeMap<Sym, Sym>) -> TimePoint {
        let map = |i: &Sym| renaming.get(i).cloned().unwrap_or_else(|| i.clone());
        match self {
            TimePoint::Start(i) => TimePoint::Start(map(i)),
            TimePoint::End(i) => TimePoint::End(map(i)),
        }
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimePoint::Start(i) => write!(f, "(start {})", i),
            TimePoint::End(i) => write!(f, "(end {})", i),
        }
    }
}

/// The six point-algebra relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OrderRel {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl OrderRel {
    pub const ALL: [OrderRel; 6] = [
        OrderRel::Lt,
        OrderRel::Le,
        OrderRel::Gt,
        OrderRel::Ge,
        OrderRel::Eq,
        OrderRel::Ne,
    ];

    pub fn eval(self, left: i64, right: i64) -> bool {
        match self {
            OrderRel::Lt => left < right,
            OrderRel::Le => left <= right,
            OrderRel::Gt => left > right,
            OrderRel::Ge => left >= right,
            OrderRel::Eq => left == right,
            OrderRel::Ne => left != right,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            OrderRel::Lt => "<",
            OrderRel::Le => "<=",
            OrderRel::Gt => ">",
            OrderRel::Ge => ">=",
            OrderRel::Eq => "=",
            OrderRel::Ne => "!=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<OrderRel> {
        match s {
            "<" => Some(OrderRel::Lt),
            "<=" => Some(OrderRel::Le),
            ">" => Some(OrderRel::Gt),
            ">=" => Some(OrderRel::Ge),
            "=" => Some(OrderRel::Eq),
            "!=" => Some(OrderRel::Ne),
            _ => None,
        }
    }
}

impl fmt::Display for OrderRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Qualitative ordering between two time points (an element of the C_o store).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrderingConstraint {
    pub left: TimePoint,
    pub rel: OrderRel,
    pub right: TimePoint,
}

impl OrderingConstraint {
    pub fn new(left: TimePoint, rel: OrderRel, right: TimePoint) -> OrderingConstraint {
        OrderingConstraint { left, rel, right }
    }

    pub fn rename(&self, renaming: &BTreeMap<Sym, Sym>) -> OrderingConstraint {
        OrderingConstraint {
            left: self.left.rename(renaming),
            rel: self.rel,
            right: self.right.rename(renaming),
        }
    }
}

impl fmt::Display for OrderingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.rel.symbol(), self.left, self.right)
    }
}

/// Equality or disequality between a variable and a variable or constant
/// (an element of the C_v store; discharged by grounding).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VariableConstraint {
    pub left: Sym,
    pub equal: bool,
    pub right: Term,
}

impl fmt::Display for VariableConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.equal {
            write!(f, "(= ?{} {})", self.left, self.right)
        } else {
            write!(f, "(not (= ?{} {}))", self.left, self.right)
        }
    }
}

/// Arithmetic comparison between duration expressions (an element of C_d).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DurationConstraint {
    pub left: DurationExpr,
    pub rel: OrderRel,
    pub right: DurationExpr,
}

impl DurationConstraint {
    pub fn referenced_ids(&self) -> BTreeSet<Sym> {
        let mut ids = self.left.referenced_ids();
        ids.extend(self.right.referenced_ids());
        ids
    }

    pub fn rename(&self, renaming: &BTreeMap<Sym, Sym>) -> DurationConstraint {
        DurationConstraint {
            left: self.left.rename(renaming),
            rel: self.rel,
            right: self.right.rename(renaming),
        }
    }
}

impl fmt::Display for DurationConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.rel.symbol(), self.left, self.right)
    }
}

/// Timing of a method condition relative to the method's network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MethodCondKind {
    AtStart,
    AtEnd,
    Overall,
}

/// The anchor of a surface `at` constraint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AtAnchor {
    Point(TimePoint),
    Date(i64),
}

/// A bound of a normalized range obligation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RangeBound {
    NetworkStart,
    NetworkEnd,
    /// Earliest start event among the given identifiers.
    FirstStart(Vec<Sym>),
    /// Latest end event among the given identifiers.
    LastEnd(Vec<Sym>),
    Point(TimePoint),
}

/// Normalized anchor of a decomposition-constraint obligation. All surface
/// forms reduce to a formula that must hold in states selected by one of
/// these anchors:
///
/// * `AtPoint`/`AtDate` — the state right after the happening at that date;
/// * `BeforeFirstStart` — the state right before the earliest start among
///   the identifiers (empty set: before the first happening of the network);
/// * `AfterLastEnd` — the state right after the latest end (empty set: after
///   the last happening);
/// * `ClosedRange`/`OpenRange` — the state after every happening falling in
///   the date interval (inclusive or strict).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Anchor {
    AtPoint(TimePoint),
    AtDate(i64),
    BeforeFirstStart(Vec<Sym>),
    AfterLastEnd(Vec<Sym>),
    ClosedRange(RangeBound, RangeBound),
    OpenRange(RangeBound, RangeBound),
}

/// A decomposition constraint (an element of C_t): surface forms as written
/// in the input, plus the `Obligation` form produced when a method condition
/// is re-anchored onto its decomposed parent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DecompositionConstraint {
    At(AtAnchor, Formula),
    Before(Vec<Sym>, Formula),
    After(Vec<Sym>, Formula),
    Between(Vec<Sym>, Vec<Sym>, Formula),
    MethodCond(MethodCondKind, Formula),
    Obligation(Anchor, Formula),
}

impl DecompositionConstraint {
    pub fn formula(&self) -> &Formula {
        match self {
            DecompositionConstraint::At(_, f)
            | DecompositionConstraint::Before(_, f)
            | DecompositionConstraint::After(_, f)
            | DecompositionConstraint::Between(_, _, f)
            | DecompositionConstraint::MethodCond(_, f)
            | DecompositionConstraint::Obligation(_, f) => f,
        }
    }

    pub fn referenced_ids(&self) -> BTreeSet<Sym> {
        match self {
            DecompositionConstraint::At(AtAnchor::Point(p), _) => [p.id().clone()].into(),
            DecompositionConstraint::At(AtAnchor::Date(_), _) => BTreeSet::new(),
            DecompositionConstraint::Before(ids, _) | DecompositionConstraint::After(ids, _) => {
                ids.iter().cloned().collect()
            }
            DecompositionConstraint::Between(a, b, _) => a.iter().chain(b.iter()).cloned().collect(),
            DecompositionConstraint::MethodCond(..) => BTreeSet::new(),
            DecompositionConstraint::Obligation(anchor, _) => anchor_ids(anchor),
        }
    }

    pub fn rename(&self, renaming: &BTreeMap<Sym, Sym>) -> DecompositionConstraint {
        let map_ids = |ids: &Vec<Sym>| -> Vec<Sym> {
            ids.iter()
                .map(|i| renaming.get(i).cloned().unwrap_or_else(|| i.clone()))
                .collect()
        };
        match self {
            DecompositionConstraint::At(AtAnchor::Point(p), f) => {
                DecompositionConstraint::At(AtAnchor::Point(p.rename(renaming)), f.clone())
            }
            DecompositionConstraint::At(a @ AtAnchor::Date(_), f) => DecompositionConstraint::At(a.clone(), f.clone()),
            DecompositionConstraint::Before(ids, f) => DecompositionConstraint::Before(map_ids(ids), f.clone()),
            DecompositionConstraint::After(ids, f) => DecompositionConstraint::After(map_ids(ids), f.clone()),
            DecompositionConstraint::Between(a, b, f) => {
                DecompositionConstraint::Between(map_ids(a), map_ids(b), f.clone())
            }
            DecompositionConstraint::MethodCond(k, f) => DecompositionConstraint::MethodCond(*k, f.clone()),
            DecompositionConstraint::Obligation(anchor, f) => {
                DecompositionConstraint::Obligation(rename_anchor(anchor, renaming), f.clone())
            }
        }
    }
}

fn anchor_ids(anchor: &Anchor) -> BTreeSet<Sym> {
    let bound_ids = |b: &RangeBound| -> BTreeSet<Sym> {
        match b {
            RangeBound::NetworkStart | RangeBound::NetworkEnd => BTreeSet::new(),
            RangeBound::FirstStart(ids) | RangeBound::LastEnd(ids) => ids.iter().cloned().collect(),
            RangeBound::Point(p) => [p.id().clone()].into(),
        }
    };
    match anchor {
        Anchor::AtPoint(p) => [p.id().clone()].into(),
        Anchor::AtDate(_) => BTreeSet::new(),
        Anchor::BeforeFirstStart(ids) | Anchor::AfterLastEnd(ids) => ids.iter().cloned().collect(),
        Anchor::ClosedRange(a, b) | Anchor::OpenRange(a, b) => {
            let mut out = bound_ids(a);
            out.extend(bound_ids(b));
            out
        }
    }
}

fn rename_anchor(anchor: &Anchor, renaming: &BTreeMap<Sym, Sym>) -> Anchor {
    let map_ids = |ids: &Vec<Sym>| -> Vec<Sym> {
        ids.iter()
            .map(|i| renaming.get(i).cloned().unwrap_or_else(|| i.clone()))
            .collect()
    };
    let map_bound = |b: &RangeBound| -> RangeBound {
        match b {
            RangeBound::NetworkStart => RangeBound::NetworkStart,
            RangeBound::NetworkEnd => RangeBound::NetworkEnd,
            RangeBound::FirstStart(ids) => RangeBound::FirstStart(map_ids(ids)),
            RangeBound::LastEnd(ids) => RangeBound::LastEnd(map_ids(ids)),
            RangeBound::Point(p) => RangeBound::Point(p.rename(renaming)),
        }
    };
    match anchor {
        Anchor::AtPoint(p) => Anchor::AtPoint(p.rename(renaming)),
        Anchor::AtDate(d) => Anchor::AtDate(*d),
        Anchor::BeforeFirstStart(ids) => Anchor::BeforeFirstStart(map_ids(ids)),
        Anchor::AfterLastEnd(ids) => Anchor::AfterLastEnd(map_ids(ids)),
        Anchor::ClosedRange(a, b) => Anchor::ClosedRange(map_bound(a), map_bound(b)),
        Anchor::OpenRange(a, b) => Anchor::OpenRange(map_bound(a), map_bound(b)),
    }
}

/// A temporal task network: ordered task identifiers, the identifier-to-task
/// map, and the four constraint stores.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalTaskNetwork {
    /// Identifiers in declaration order. Uniqueness is an invariant.
    pub ids: Vec<Sym>,
    pub alpha: BTreeMap<Sym, Task>,
    pub co: BTreeSet<OrderingConstraint>,
    pub cv: BTreeSet<VariableConstraint>,
    pub cd: BTreeSet<DurationConstraint>,
    pub ct: BTreeSet<DecompositionConstraint>,
}

impl TemporalTaskNetwork {
    pub fn new() -> TemporalTaskNetwork {
        TemporalTaskNetwork::default()
    }

    pub fn contains_id(&self, id: &Sym) -> bool {
        self.ids.contains(id)
    }
}

/// A method: decomposes a compound task into a temporal task network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Method {
    pub name: Sym,
    pub params: Vec<Parameter>,
    pub task: Task,
    pub tn: TemporalTaskNetwork,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateDecl {
    pub name: Sym,
    pub params: Vec<Parameter>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskDecl {
    pub name: Sym,
    pub params: Vec<Parameter>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: Sym,
    pub requirements: Vec<Sym>,
    /// (type, parent) pairs in declaration order.
    pub types: Vec<(Sym, Sym)>,
    /// (constant, type) pairs in declaration order.
    pub constants: Vec<(Sym, Sym)>,
    pub predicates: Vec<PredicateDecl>,
    pub tasks: Vec<TaskDecl>,
    pub actions: Vec<ActionSchema>,
    pub methods: Vec<Method>,
}

impl Domain {
    pub fn kind_of(&self, task_name: &str) -> Option<TaskKind> {
        if self.actions.iter().any(|a| a.name().as_str() == task_name) {
            Some(TaskKind::Primitive)
        } else if self.tasks.iter().any(|t| t.name.as_str() == task_name) {
            Some(TaskKind::Compound)
        } else {
            None
        }
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name().as_str() == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name.as_str() == name)
    }

    pub fn methods_for(&self, task_name: &str) -> impl Iterator<Item = &Method> {
        let name = task_name.to_string();
        self.methods.iter().filter(move |m| m.task.name.as_str() == name)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub name: Sym,
    pub domain_name: Sym,
    /// (object, type) pairs in declaration order.
    pub objects: Vec<(Sym, Sym)>,
    pub init: State,
    /// Typed parameters of the initial network, shared across its tasks.
    pub htn_params: Vec<Parameter>,
    pub initial_network: TemporalTaskNetwork,
    pub goal: Option<Formula>,
}

impl Problem {
    /// The object pool combining domain constants and problem objects.
    pub fn pool(&self, domain: &Domain) -> ObjectPool {
        let mut pool = ObjectPool::new();
        for (ty, parent) in &domain.types {
            pool.declare_type(ty.clone(), parent.clone());
        }
        for (name, ty) in domain.constants.iter().chain(self.objects.iter()) {
            pool.declare_object(name.clone(), ty.clone());
        }
        pool
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

/// A model-validation or parse-level finding, always locatable (possibly
/// only at file granularity) and tagged with a stable rule identifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule: Sym,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn error(rule: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            rule: rule.into(),
            message: message.into(),
            span: SourceSpan::default(),
        }
    }

    pub fn warning(rule: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Warning,
            rule: rule.into(),
            message: message.into(),
            span: SourceSpan::default(),
        }
    }

    pub fn with_span(mut self, span: SourceSpan) -> Diagnostic {
        self.span = span;
        self
    }

    /// The line-oriented rendering used on standard error.
    pub fn render(&self) -> String {
        format!("{}: {}: {} [{}]", self.span, self.severity, self.message, self.rule)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("constraint references unknown identifier {0}")]
    UnknownIdentifier(Sym),
}

/// Rewrites a surface decomposition constraint into `(anchor, formula)`
/// obligations. `scope` is the set of identifiers the constraint may
/// reference (the network's identifiers plus any decomposed ancestors whose
/// points remain addressable).
pub fn normalize_constraint(
    c: &DecompositionConstraint,
    scope: &BTreeSet<Sym>,
) -> Result<Vec<(Anchor, Formula)>, NormalizeError> {
    for id in c.referenced_ids() {
        if !scope.contains(&id) {
            return Err(NormalizeError::UnknownIdentifier(id));
        }
    }
    let obligations = match c {
        DecompositionConstraint::At(AtAnchor::Point(p), f) => vec![(Anchor::AtPoint(p.clone()), f.clone())],
        DecompositionConstraint::At(AtAnchor::Date(d), f) => vec![(Anchor::AtDate(*d), f.clone())],
        DecompositionConstraint::Before(ids, f) => vec![(Anchor::BeforeFirstStart(ids.clone()), f.clone())],
        DecompositionConstraint::After(ids, f) => vec![(Anchor::AfterLastEnd(ids.clone()), f.clone())],
        DecompositionConstraint::Between(s1, s2, f) => {
            let lo = if s1.is_empty() {
                RangeBound::NetworkStart
            } else {
                RangeBound::LastEnd(s1.clone())
            };
            let hi = if s2.is_empty() {
                RangeBound::NetworkEnd
            } else {
                RangeBound::FirstStart(s2.clone())
            };
            vec![(Anchor::ClosedRange(lo, hi), f.clone())]
        }
        DecompositionConstraint::MethodCond(kind, f) => match kind {
            MethodCondKind::AtStart => vec![(Anchor::BeforeFirstStart(Vec::new()), f.clone())],
            MethodCondKind::AtEnd => vec![(Anchor::AfterLastEnd(Vec::new()), f.clone())],
            MethodCondKind::Overall => vec![(
                Anchor::OpenRange(RangeBound::NetworkStart, RangeBound::NetworkEnd),
                f.clone(),
            )],
        },
        DecompositionConstraint::Obligation(anchor, f) => vec![(anchor.clone(), f.clone())],
    };
    Ok(obligations)
}

/// Checks every structural invariant of a domain/problem pair, returning
/// one diagnostic per violation. An empty result means grounding cannot hit
/// declaration-level errors.
pub fn validate_model(domain: &Domain, problem: &Problem) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let pool = problem.pool(domain);
    if let Err(msg) = pool.check() {
        out.push(Diagnostic::error("type-hierarchy", msg));
    }
    if problem.domain_name != domain.name {
        out.push(Diagnostic::warning(
            "domain-mismatch",
            format!(
                "problem {} expects domain {}, got {}",
                problem.name, problem.domain_name, domain.name
            ),
        ));
    }

    // Declared parameter types must exist.
    let check_params = |owner: String, params: &[Parameter], out: &mut Vec<Diagnostic>| {
        for p in params {
            if !pool.has_type(p.ty.as_str()) {
                out.push(Diagnostic::error(
                    "unknown-type",
                    format!("{}: parameter ?{} has undeclared type {}", owner, p.name, p.ty),
                ));
            }
        }
    };
    for pred in &domain.predicates {
        check_params(format!("predicate {}", pred.name), &pred.params, &mut out);
    }
    for task in &domain.tasks {
        check_params(format!("task {}", task.name), &task.params, &mut out);
    }
    for action in &domain.actions {
        check_params(format!("action {}", action.name()), action.params(), &mut out);
    }
    for method in &domain.methods {
        check_params(format!("method {}", method.name), &method.params, &mut out);
    }

    // Task names may not collide with action names.
    for task in &domain.tasks {
        if domain.actions.iter().any(|a| a.name() == &task.name) {
            out.push(Diagnostic::error(
                "task-action-collision",
                format!("{} is declared both as a task and as an action", task.name),
            ));
        }
    }

    // Action bodies.
    for action in &domain.actions {
        let scope: Vec<Sym> = action.params().iter().map(|p| p.name.clone()).collect();
        let owner = format!("action {}", action.name());
        match action {
            ActionSchema::Snap { action: snap, .. } => {
                check_snap(domain, &pool, &owner, snap, &scope, &mut out);
            }
            ActionSchema::Durative(d) => {
                check_snap(domain, &pool, &owner, &d.start, &scope, &mut out);
                check_snap(domain, &pool, &owner, &d.end, &scope, &mut out);
                check_formula(domain, &pool, &owner, &d.inv, &scope, &mut out);
                if !d.duration.referenced_ids().is_empty() {
                    out.push(Diagnostic::error(
                        "duration-not-closed",
                        format!("{}: duration expression references task durations", owner),
                    ));
                } else if let Ok(n) = d.duration.eval_closed() {
                    if n < 0 {
                        out.push(Diagnostic::error(
                            "negative-duration",
                            format!("{}: duration evaluates to {}", owner, n),
                        ));
                    }
                }
            }
        }
    }

    // Methods and their networks.
    for method in &domain.methods {
        let owner = format!("method {}", method.name);
        match domain.kind_of(method.task.name.as_str()) {
            Some(TaskKind::Compound) => {}
            Some(TaskKind::Primitive) => out.push(Diagnostic::error(
                "method-task-not-compound",
                format!("{}: decomposes primitive task {}", owner, method.task.name),
            )),
            None => out.push(Diagnostic::error(
                "unknown-task",
                format!("{}: decomposes undeclared task {}", owner, method.task.name),
            )),
        }
        if let Some(decl) = domain.tasks.iter().find(|t| t.name == method.task.name) {
            if decl.params.len() != method.task.args.len() {
                out.push(Diagnostic::error(
                    "arity-mismatch",
                    format!(
                        "{}: task {} expects {} arguments, got {}",
                        owner,
                        method.task.name,
                        decl.params.len(),
                        method.task.args.len()
                    ),
                ));
            }
        }
        let mut scope: Vec<Sym> = method.params.iter().map(|p| p.name.clone()).collect();
        for arg in &method.task.args {
            if let Term::Variable(v) = arg {
                if !scope.contains(v) {
                    scope.push(v.clone());
                }
            }
        }
        check_network(domain, &pool, &owner, &method.tn, &scope, &mut out);
    }

    // Compound tasks without any method are legal but unsolvable.
    for task in &domain.tasks {
        if domain.methods_for(task.name.as_str()).next().is_none() {
            out.push(Diagnostic::warning(
                "no-method",
                format!("compound task {} has no method", task.name),
            ));
        }
    }

    // Initial state: declared predicates over declared objects.
    for atom in problem.init.iter() {
        match domain.predicate(atom.predicate.as_str()) {
            None => out.push(Diagnostic::error(
                "unknown-predicate",
                format!("init atom {} uses undeclared predicate", atom),
            )),
            Some(decl) => {
                if decl.params.len() != atom.args.len() {
                    out.push(Diagnostic::error(
                        "arity-mismatch",
                        format!(
                            "init atom {}: predicate {} expects {} arguments, got {}",
                            atom,
                            atom.predicate,
                            decl.params.len(),
                            atom.args.len()
                        ),
                    ));
                }
            }
        }
        for arg in &atom.args {
            if !pool.contains_object(arg.as_str()) {
                out.push(Diagnostic::error(
                    "unknown-object",
                    format!("init atom {} references undeclared object {}", atom, arg),
                ));
            }
        }
    }

    // Initial network and goal.
    let scope: Vec<Sym> = problem.htn_params.iter().map(|p| p.name.clone()).collect();
    check_network(domain, &pool, "initial network", &problem.initial_network, &scope, &mut out);
    if let Some(goal) = &problem.goal {
        check_formula(domain, &pool, "goal", goal, &scope, &mut out);
    }

    out
}

fn check_snap(
    domain: &Domain,
    pool: &ObjectPool,
    owner: &str,
    snap: &SnapAction,
    scope: &[Sym],
    out: &mut Vec<Diagnostic>,
) {
    check_formula(domain, pool, owner, &snap.precond, scope, out);
    for atom in snap.effect_pos.iter().chain(snap.effect_neg.iter()) {
        check_atom(domain, pool, owner, atom, scope, out);
    }
    // Statically unifiable add/delete overlap: a warning here, a hard error
    // per instance at grounding time.
    for pos in &snap.effect_pos {
        for neg in &snap.effect_neg {
            if atoms_unifiable(pos, neg) {
                out.push(Diagnostic::warning(
                    "effect-overlap",
                    format!("{}: {} may occur in both add and delete effects", owner, pos),
                ));
            }
        }
    }
}

fn atoms_unifiable(a: &Atom, b: &Atom) -> bool {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return false;
    }
    a.args.iter().zip(&b.args).all(|(x, y)| match (x, y) {
        (Term::Constant(c1), Term::Constant(c2)) => c1 == c2,
        _ => true,
    })
}

fn check_network(
    domain: &Domain,
    pool: &ObjectPool,
    owner: &str,
    tn: &TemporalTaskNetwork,
    scope: &[Sym],
    out: &mut Vec<Diagnostic>,
) {
    let mut seen = BTreeSet::new();
    for id in &tn.ids {
        if !seen.insert(id.clone()) {
            out.push(Diagnostic::error(
                "duplicate-id",
                format!("{}: duplicate task identifier {}", owner, id),
            ));
        }
        let task = match tn.alpha.get(id) {
            Some(t) => t,
            None => {
                out.push(Diagnostic::error(
                    "dangling-identifier",
                    format!("{}: identifier {} has no task", owner, id),
                ));
                continue;
            }
        };
        let expected = match domain.kind_of(task.name.as_str()) {
            Some(TaskKind::Primitive) => domain
                .action(task.name.as_str())
                .map(|a| a.params().len()),
            Some(TaskKind::Compound) => domain
                .tasks
                .iter()
                .find(|t| t.name == task.name)
                .map(|t| t.params.len()),
            None => {
                out.push(Diagnostic::error(
                    "unknown-task",
                    format!("{}: subtask {} references undeclared task {}", owner, id, task.name),
                ));
                continue;
            }
        };
        if let Some(arity) = expected {
            if arity != task.args.len() {
                out.push(Diagnostic::error(
                    "arity-mismatch",
                    format!(
                        "{}: subtask {} applies {} to {} arguments, expected {}",
                        owner,
                        id,
                        task.name,
                        task.args.len(),
                        arity
                    ),
                ));
            }
        }
        for arg in &task.args {
            match arg {
                Term::Variable(v) => {
                    if !scope.contains(v) {
                        out.push(Diagnostic::error(
                            "unbound-variable",
                            format!("{}: subtask {} uses unbound variable ?{}", owner, id, v),
                        ));
                    }
                }
                Term::Constant(c) => {
                    if !pool.contains_object(c.as_str()) {
                        out.push(Diagnostic::error(
                            "unknown-object",
                            format!("{}: subtask {} references undeclared object {}", owner, id, c),
                        ));
                    }
                }
            }
        }
    }

    let in_scope = |id: &Sym| tn.contains_id(id);
    for c in &tn.co {
        for point in [&c.left, &c.right] {
            if !in_scope(point.id()) {
                out.push(Diagnostic::error(
                    "dangling-identifier",
                    format!("{}: ordering constraint {} references unknown identifier {}", owner, c, point.id()),
                ));
            }
        }
    }
    for c in &tn.cd {
        for id in c.referenced_ids() {
            if !in_scope(&id) {
                out.push(Diagnostic::error(
                    "dangling-identifier",
                    format!("{}: duration constraint {} references unknown identifier {}", owner, c, id),
                ));
            }
        }
    }
    for c in &tn.ct {
        for id in c.referenced_ids() {
            if !in_scope(&id) {
                out.push(Diagnostic::error(
                    "dangling-identifier",
                    format!("{}: constraint references unknown identifier {}", owner, id),
                ));
            }
        }
        check_formula(domain, pool, owner, c.formula(), scope, out);
    }
    for c in &tn.cv {
        if !scope.contains(&c.left) {
            out.push(Diagnostic::error(
                "unbound-variable",
                format!("{}: variable constraint {} uses unbound variable ?{}", owner, c, c.left),
            ));
        }
        match &c.right {
            Term::Variable(v) => {
                if !scope.contains(v) {
                    out.push(Diagnostic::error(
                        "unbound-variable",
                        format!("{}: variable constraint {} uses unbound variable ?{}", owner, c, v),
                    ));
                }
            }
            Term::Constant(cst) => {
                if !pool.contains_object(cst.as_str()) {
                    out.push(Diagnostic::error(
                        "unknown-object",
                        format!("{}: variable constraint {} references undeclared object {}", owner, c, cst),
                    ));
                }
            }
        }
    }
}

fn check_formula(
    domain: &Domain,
    pool: &ObjectPool,
    owner: &str,
    formula: &Formula,
    scope: &[Sym],
    out: &mut Vec<Diagnostic>,
) {
    match formula {
        Formula::Atom(atom) => check_atom(domain, pool, owner, atom, scope, out),
        Formula::Not(f) => check_formula(domain, pool, owner, f, scope, out),
        Formula::And(fs) | Formula::Or(fs) => {
            for f in fs {
                check_formula(domain, pool, owner, f, scope, out);
            }
        }
        Formula::Imply(a, b) => {
            check_formula(domain, pool, owner, a, scope, out);
            check_formula(domain, pool, owner, b, scope, out);
        }
        Formula::Forall(x, ty, f) | Formula::Exists(x, ty, f) => {
            if !pool.has_type(ty.as_str()) {
                out.push(Diagnostic::error(
                    "unknown-type",
                    format!("{}: quantifier over undeclared type {}", owner, ty),
                ));
            }
            let mut inner = scope.to_vec();
            inner.push(x.clone());
            check_formula(domain, pool, owner, f, &inner, out);
        }
    }
}

fn check_atom(
    domain: &Domain,
    pool: &ObjectPool,
    owner: &str,
    atom: &Atom,
    scope: &[Sym],
    out: &mut Vec<Diagnostic>,
) {
    if atom.predicate.as_str() == EQ_PREDICATE {
        if atom.args.len() != 2 {
            out.push(Diagnostic::error(
                "arity-mismatch",
                format!("{}: equality takes two arguments, got {}", owner, atom.args.len()),
            ));
        }
    } else {
        match domain.predicate(atom.predicate.as_str()) {
            None => out.push(Diagnostic::error(
                "unknown-predicate",
                format!("{}: atom {} uses undeclared predicate", owner, atom),
            )),
            Some(decl) => {
                if decl.params.len() != atom.args.len() {
                    out.push(Diagnostic::error(
                        "arity-mismatch",
                        format!(
                            "{}: atom {} has {} arguments, predicate {} expects {}",
                            owner,
                            atom,
                            atom.args.len(),
                            atom.predicate,
                            decl.params.len()
                        ),
                    ));
                }
            }
        }
    }
    for arg in &atom.args {
        match arg {
            Term::Variable(v) => {
                if !scope.contains(v) {
                    out.push(Diagnostic::error(
                        "unbound-variable",
                        format!("{}: atom {} uses unbound variable ?{}", owner, atom, v),
                    ));
                }
            }
            Term::Constant(c) => {
                if !pool.contains_object(c.as_str()) {
                    out.push(Diagnostic::error(
                        "unknown-object",
                        format!("{}: atom {} references undeclared object {}", owner, atom, c),
                    ));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::GroundAtom;

    fn toy_domain() -> Domain {
        Domain {
            name: "toy".into(),
            requirements: vec![],
            types: vec![("block".into(), OBJECT_TYPE.into())],
            constants: vec![],
            predicates: vec![
                PredicateDecl {
                    name: "clear".into(),
                    params: vec![Parameter::new("x", "block")],
                },
                PredicateDecl {
                    name: "on-table".into(),
                    params: vec![Parameter::new("x", "block")],
                },
            ],
            tasks: vec![TaskDecl {
                name: "restack".into(),
                params: vec![Parameter::new("x", "block")],
            }],
            actions: vec![ActionSchema::Snap {
                params: vec![Parameter::new("x", "block")],
                action: SnapAction {
                    name: "putdown".into(),
                    precond: Formula::Atom(Atom::new("clear", vec![Term::var("x")])),
                    effect_pos: [Atom::new("on-table", vec![Term::var("x")])].into(),
                    effect_neg: BTreeSet::new(),
                },
            }],
            methods: vec![Method {
                name: "m-restack".into(),
                params: vec![Parameter::new("x", "block")],
                task: Task::new("restack", vec![Term::var("x")]),
                tn: TemporalTaskNetwork {
                    ids: vec!["t1".into()],
                    alpha: [(Sym::from("t1"), Task::new("putdown", vec![Term::var("x")]))].into(),
                    ..TemporalTaskNetwork::default()
                },
            }],
        }
    }

    fn toy_problem() -> Problem {
        Problem {
            name: "toy-1".into(),
            domain_name: "toy".into(),
            objects: vec![("a".into(), "block".into()), ("b".into(), "block".into())],
            init: State::from_atoms([GroundAtom::new("clear", vec!["a".into()])]),
            htn_params: vec![],
            initial_network: TemporalTaskNetwork {
                ids: vec!["t0".into()],
                alpha: [(Sym::from("t0"), Task::new("restack", vec![Term::constant("a")]))].into(),
                ..TemporalTaskNetwork::default()
            },
            goal: None,
        }
    }

    #[test]
    fn well_formed_model_has_no_diagnostics() {
        let diags = validate_model(&toy_domain(), &toy_problem());
        assert!(diags.is_empty(), "unexpected diagnostics: {:?}", diags);
    }

    #[test]
    fn dangling_identifier_reported() {
        let mut domain = toy_domain();
        domain.methods[0].tn.co.insert(OrderingConstraint::new(
            TimePoint::End("t1".into()),
            OrderRel::Le,
            TimePoint::Start("ghost".into()),
        ));
        let diags = validate_model(&domain, &toy_problem());
        assert!(diags.iter().any(|d| d.rule == "dangling-identifier"), "{:?}", diags);
    }

    #[test]
    fn effect_overlap_is_a_warning() {
        let mut domain = toy_domain();
        if let ActionSchema::Snap { action, .. } = &mut domain.actions[0] {
            action.effect_neg.insert(Atom::new("on-table", vec![Term::var("x")]));
        }
        let diags = validate_model(&domain, &toy_problem());
        let overlap: Vec<_> = diags.iter().filter(|d| d.rule == "effect-overlap").collect();
        assert_eq!(overlap.len(), 1);
        assert_eq!(overlap[0].severity, Severity::Warning);
    }

    #[test]
    fn arity_mismatch_reported() {
        let mut problem = toy_problem();
        problem.init.insert(GroundAtom::new("clear", vec!["a".into(), "b".into()]));
        let diags = validate_model(&toy_domain(), &problem);
        assert!(diags.iter().any(|d| d.rule == "arity-mismatch"), "{:?}", diags);
    }

    #[test]
    fn zero_method_compound_task_warns() {
        let mut domain = toy_domain();
        domain.methods.clear();
        let mut problem = toy_problem();
        problem.initial_network = TemporalTaskNetwork::default();
        let diags = validate_model(&domain, &problem);
        assert!(diags
            .iter()
            .any(|d| d.rule == "no-method" && d.severity == Severity::Warning));
        assert!(diags.iter().all(|d| d.severity == Severity::Warning));
    }

    #[test]
    fn normalize_before_yields_single_prestate_obligation() {
        let clear_b = Formula::Atom(Atom::new("clear", vec![Term::constant("b")]));
        let c = DecompositionConstraint::Before(vec!["i1".into()], clear_b.clone());
        let scope: BTreeSet<Sym> = ["i1".into()].into();
        let got = normalize_constraint(&c, &scope).unwrap();
        assert_eq!(got, vec![(Anchor::BeforeFirstStart(vec!["i1".into()]), clear_b)]);
    }

    #[test]
    fn normalize_overall_spans_interior_events() {
        let safe = Formula::Atom(Atom::new("safe", vec![]));
        let c = DecompositionConstraint::MethodCond(MethodCondKind::Overall, safe.clone());
        let scope: BTreeSet<Sym> = ["i1".into()].into();
        let got = normalize_constraint(&c, &scope).unwrap();
        assert_eq!(
            got,
            vec![(Anchor::OpenRange(RangeBound::NetworkStart, RangeBound::NetworkEnd), safe)]
        );
    }

    #[test]
    fn normalize_vacuous_between_is_global() {
        let f = Formula::Atom(Atom::new("safe", vec![]));
        let c = DecompositionConstraint::Between(vec![], vec![], f.clone());
        let got = normalize_constraint(&c, &BTreeSet::new()).unwrap();
        assert_eq!(
            got,
            vec![(Anchor::ClosedRange(RangeBound::NetworkStart, RangeBound::NetworkEnd), f)]
        );
    }

    #[test]
    fn normalize_rejects_out_of_scope_ids() {
        let f = Formula::truth();
        let c = DecompositionConstraint::After(vec!["zz".into()], f);
        let err = normalize_constraint(&c, &BTreeSet::new()).unwrap_err();
        assert_eq!(err, NormalizeError::UnknownIdentifier("zz".into()));
    }
}

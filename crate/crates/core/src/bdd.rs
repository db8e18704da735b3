//! Reduced ordered binary decision diagrams.
//!
//! The [`Manager`] owns a hash-consed node store for one fixed variable order.
//! Nodes are plain (no complement edges), so the node counts reported by
//! [`Manager::dag_size`] and [`Manager::level_widths`] are the textbook ROBDD
//! counts with the two terminals excluded.
//!
//! Variables are identified by [`VarId`] and mapped to levels by a
//! [`VarOrder`]; the same circuit builder therefore works under any ordering.
//!
//! ```
//! use sadd_bdd::bdd::{BinOp, Manager, VarId, VarOrder};
//!
//! let order = VarOrder::new(vec![VarId::a(0), VarId::a(1)]).unwrap();
//! let mut mgr = Manager::new(order);
//! let x0 = mgr.var(VarId::a(0)).unwrap();
//! let x1 = mgr.var(VarId::a(1)).unwrap();
//! let f = mgr.apply(BinOp::Xor, x0, x1).unwrap();
//! assert_eq!(mgr.dag_size(&[f]).unwrap(), 3);
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU32, Ordering};

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

/// Operand register a variable belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    A,
    B,
    D,
}

impl VarKind {
    fn letter(self) -> char {
        match self {
            VarKind::A => 'a',
            VarKind::B => 'b',
            VarKind::D => 'd',
        }
    }
}

/// A single input bit: operand register plus bit position (0 = LSB).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub kind: VarKind,
    pub index: u32,
}

impl VarId {
    pub const fn new(kind: VarKind, index: u32) -> Self {
        Self { kind, index }
    }

    pub const fn a(index: u32) -> Self {
        Self::new(VarKind::A, index)
    }

    pub const fn b(index: u32) -> Self {
        Self::new(VarKind::B, index)
    }

    pub const fn d(index: u32) -> Self {
        Self::new(VarKind::D, index)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.index)
    }
}

impl std::str::FromStr for VarId {
    type Err = BddError;

    /// Parses names such as `a3`, `b0` or `d1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || BddError::BadVarName(s.to_string());
        let mut chars = s.chars();
        let kind = match chars.next().map(|c| c.to_ascii_lowercase()) {
            Some('a') => VarKind::A,
            Some('b') => VarKind::B,
            Some('d') => VarKind::D,
            _ => return Err(bad()),
        };
        let index = chars.as_str().parse::<u32>().map_err(|_| bad())?;
        Ok(VarId::new(kind, index))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BddError {
    #[error("ordering violation: node at level {level} has a child at level {child_level}")]
    OrderingViolation { level: u32, child_level: u32 },
    #[error("operands belong to different managers")]
    DomainMismatch,
    #[error("variable {0} is not part of the variable order")]
    UnknownVariable(VarId),
    #[error("variable {0} appears more than once in the variable order")]
    DuplicateVariable(VarId),
    #[error("assignment does not cover variable {0}")]
    IncompleteAssignment(VarId),
    #[error("node cap of {cap} nodes exceeded")]
    NodeCapExceeded { cap: usize },
    #[error("level {0} is out of range")]
    LevelOutOfRange(u32),
    #[error("invalid variable name `{0}`")]
    BadVarName(String),
}

pub type Result<T, E = BddError> = std::result::Result<T, E>;

/// A variable order: `permutation[level]` is the variable tested at `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarOrder {
    permutation: Vec<VarId>,
    level_of: HashMap<VarId, u32>,
}

impl VarOrder {
    pub fn new(permutation: Vec<VarId>) -> Result<Self> {
        let mut level_of = HashMap::with_capacity(permutation.len());
        for (level, &v) in permutation.iter().enumerate() {
            if level_of.insert(v, level as u32).is_some() {
                return Err(BddError::DuplicateVariable(v));
            }
        }
        Ok(Self {
            permutation,
            level_of,
        })
    }

    pub fn permutation(&self) -> &[VarId] {
        &self.permutation
    }

    pub fn level_of(&self, var: VarId) -> Option<u32> {
        self.level_of.get(&var).copied()
    }

    pub fn var_at(&self, level: u32) -> Option<VarId> {
        self.permutation.get(level as usize).copied()
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }
}

impl fmt::Display for VarOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.permutation.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Total (or partial) map from variables to bits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<VarId, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, var: VarId, value: bool) -> &mut Self {
        self.0.insert(var, value);
        self
    }

    pub fn with(mut self, var: VarId, value: bool) -> Self {
        self.0.insert(var, value);
        self
    }

    pub fn get(&self, var: VarId) -> Option<bool> {
        self.0.get(&var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.0.iter().map(|(&v, &b)| (v, b))
    }
}

impl FromIterator<(VarId, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarId, bool)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Binary Boolean connectives supported by [`Manager::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
    Implies,
}

impl BinOp {
    pub fn eval(self, x: bool, y: bool) -> bool {
        match self {
            BinOp::And => x && y,
            BinOp::Or => x || y,
            BinOp::Xor => x != y,
            BinOp::Nand => !(x && y),
            BinOp::Nor => !(x || y),
            BinOp::Xnor => x == y,
            BinOp::Implies => !x || y,
        }
    }

    fn is_commutative(self) -> bool {
        !matches!(self, BinOp::Implies)
    }
}

/// Handle to a node owned by a particular [`Manager`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    manager: u32,
    index: u32,
}

impl NodeRef {
    pub fn is_terminal(self) -> bool {
        self.index < 2
    }

    /// Terminal value, or `None` for an internal node.
    pub fn terminal_value(self) -> Option<bool> {
        match self.index {
            FALSE => Some(false),
            TRUE => Some(true),
            _ => None,
        }
    }

    /// Position in the owning manager's node store.
    pub fn index(self) -> u32 {
        self.index
    }
}

/// A stored decision node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BddNode {
    pub level: u32,
    pub low: u32,
    pub high: u32,
}

/// Pseudo-level of both terminals; below every variable level.
pub const TERMINAL_LEVEL: u32 = u32::MAX;

const FALSE: u32 = 0;
const TRUE: u32 = 1;

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

/// Hash-consed BDD node store with memoized apply and ITE.
#[derive(Debug)]
pub struct Manager {
    id: u32,
    order: VarOrder,
    nodes: Vec<BddNode>,
    unique: FxHashMap<BddNode, u32>,
    apply_cache: FxHashMap<(BinOp, u32, u32), u32>,
    ite_cache: FxHashMap<(u32, u32, u32), u32>,
    node_cap: Option<usize>,
}

impl Manager {
    pub fn new(order: VarOrder) -> Self {
        let terminal = |_| BddNode {
            level: TERMINAL_LEVEL,
            low: 0,
            high: 0,
        };
        Self {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            order,
            nodes: (0..2).map(terminal).collect(),
            unique: FxHashMap::default(),
            apply_cache: FxHashMap::default(),
            ite_cache: FxHashMap::default(),
            node_cap: None,
        }
    }

    /// Fails any operation that would grow the store past `cap` internal nodes.
    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = Some(cap);
        self
    }

    pub fn order(&self) -> &VarOrder {
        &self.order
    }

    pub fn num_levels(&self) -> u32 {
        self.order.len() as u32
    }

    /// Every stored internal node, in creation order.
    pub fn iter_nodes(&self) -> impl Iterator<Item = BddNode> + '_ {
        self.nodes[2..].iter().copied()
    }

    /// Number of internal nodes ever created in this manager.
    pub fn allocated_nodes(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn constant(&self, value: bool) -> NodeRef {
        self.wrap(if value { TRUE } else { FALSE })
    }

    pub fn zero(&self) -> NodeRef {
        self.constant(false)
    }

    pub fn one(&self) -> NodeRef {
        self.constant(true)
    }

    /// Decision node for `var` with a FALSE low edge and a TRUE high edge.
    pub fn var(&mut self, var: VarId) -> Result<NodeRef> {
        let level = self
            .order
            .level_of(var)
            .ok_or(BddError::UnknownVariable(var))?;
        let raw = self.mk_raw(level, FALSE, TRUE)?;
        Ok(self.wrap(raw))
    }

    /// Level of a node; [`TERMINAL_LEVEL`] for terminals.
    pub fn level(&self, f: NodeRef) -> Result<u32> {
        self.check(f)?;
        Ok(self.nodes[f.index as usize].level)
    }

    /// Stored node behind an internal handle.
    pub fn node(&self, f: NodeRef) -> Result<Option<BddNode>> {
        self.check(f)?;
        Ok((!f.is_terminal()).then(|| self.nodes[f.index as usize]))
    }

    pub fn low(&self, f: NodeRef) -> Result<NodeRef> {
        self.check(f)?;
        Ok(self.wrap(self.nodes[f.index as usize].low))
    }

    pub fn high(&self, f: NodeRef) -> Result<NodeRef> {
        self.check(f)?;
        Ok(self.wrap(self.nodes[f.index as usize].high))
    }

    /// Reduce-and-share constructor.
    pub fn mk(&mut self, level: u32, low: NodeRef, high: NodeRef) -> Result<NodeRef> {
        self.check(low)?;
        self.check(high)?;
        if level >= self.num_levels() {
            return Err(BddError::LevelOutOfRange(level));
        }
        for child in [low, high] {
            let child_level = self.nodes[child.index as usize].level;
            if child_level <= level {
                return Err(BddError::OrderingViolation { level, child_level });
            }
        }
        let raw = self.mk_raw(level, low.index, high.index)?;
        Ok(self.wrap(raw))
    }

    pub fn apply(&mut self, op: BinOp, f: NodeRef, g: NodeRef) -> Result<NodeRef> {
        self.check(f)?;
        self.check(g)?;
        let raw = self.apply_raw(op, f.index, g.index)?;
        Ok(self.wrap(raw))
    }

    pub fn and(&mut self, f: NodeRef, g: NodeRef) -> Result<NodeRef> {
        self.apply(BinOp::And, f, g)
    }

    pub fn or(&mut self, f: NodeRef, g: NodeRef) -> Result<NodeRef> {
        self.apply(BinOp::Or, f, g)
    }

    pub fn xor(&mut self, f: NodeRef, g: NodeRef) -> Result<NodeRef> {
        self.apply(BinOp::Xor, f, g)
    }

    pub fn not(&mut self, f: NodeRef) -> Result<NodeRef> {
        let one = self.one();
        self.apply(BinOp::Xor, f, one)
    }

    /// If-then-else: `(c AND t) OR (NOT c AND e)`.
    pub fn ite(&mut self, c: NodeRef, t: NodeRef, e: NodeRef) -> Result<NodeRef> {
        self.check(c)?;
        self.check(t)?;
        self.check(e)?;
        let raw = self.ite_raw(c.index, t.index, e.index)?;
        Ok(self.wrap(raw))
    }

    /// Follows low/high edges according to `assignment`.
    pub fn eval(&self, f: NodeRef, assignment: &Assignment) -> Result<bool> {
        self.eval_with(f, |v| assignment.get(v))
    }

    /// Like [`Manager::eval`], with the assignment given as a lookup function.
    pub fn eval_with(&self, f: NodeRef, value: impl Fn(VarId) -> Option<bool>) -> Result<bool> {
        self.check(f)?;
        let mut cur = f.index;
        while cur > TRUE {
            let node = self.nodes[cur as usize];
            let var = self.order.permutation[node.level as usize];
            let bit = value(var).ok_or(BddError::IncompleteAssignment(var))?;
            cur = if bit { node.high } else { node.low };
        }
        Ok(cur == TRUE)
    }

    /// Distinct reachable internal nodes per level over the shared DAG of `roots`.
    pub fn level_widths(&self, roots: &[NodeRef]) -> Result<BTreeMap<u32, usize>> {
        let mut widths = BTreeMap::new();
        for idx in self.reachable(roots)? {
            *widths.entry(self.nodes[idx as usize].level).or_insert(0) += 1;
        }
        Ok(widths)
    }

    /// Maximum of [`Manager::level_widths`]; 0 for constant functions.
    pub fn max_width(&self, roots: &[NodeRef]) -> Result<usize> {
        Ok(self
            .level_widths(roots)?
            .values()
            .copied()
            .max()
            .unwrap_or(0))
    }

    /// Distinct reachable internal nodes over all `roots`.
    pub fn dag_size(&self, roots: &[NodeRef]) -> Result<usize> {
        Ok(self.reachable(roots)?.len())
    }

    /// Graphviz rendering: solid high edges, dashed low edges.
    pub fn to_dot(&self, roots: &[NodeRef]) -> Result<String> {
        let mut nodes = self.reachable(roots)?;
        nodes.sort_unstable();
        let mut out = String::from("digraph bdd {\n");
        out.push_str("  t0 [shape=box,label=\"0\"];\n  t1 [shape=box,label=\"1\"];\n");
        let name = |idx: u32| match idx {
            FALSE => "t0".to_string(),
            TRUE => "t1".to_string(),
            _ => format!("n{idx}"),
        };
        for &idx in &nodes {
            let node = self.nodes[idx as usize];
            let var = self.order.permutation[node.level as usize];
            let _ = writeln!(out, "  n{idx} [label=\"{var}\"];");
            let _ = writeln!(out, "  n{idx} -> {};", name(node.high));
            let _ = writeln!(out, "  n{idx} -> {} [style=dashed];", name(node.low));
        }
        for (i, root) in roots.iter().enumerate() {
            let _ = writeln!(out, "  r{i} [shape=plaintext,label=\"f{i}\"];");
            let _ = writeln!(out, "  r{i} -> {};", name(root.index));
        }
        out.push_str("}\n");
        Ok(out)
    }

    fn wrap(&self, index: u32) -> NodeRef {
        NodeRef {
            manager: self.id,
            index,
        }
    }

    fn check(&self, f: NodeRef) -> Result<()> {
        if f.manager != self.id || f.index as usize >= self.nodes.len() {
            return Err(BddError::DomainMismatch);
        }
        Ok(())
    }

    fn reachable(&self, roots: &[NodeRef]) -> Result<Vec<u32>> {
        let mut seen = FxHashSet::default();
        let mut stack = Vec::new();
        for &r in roots {
            self.check(r)?;
            stack.push(r.index);
        }
        let mut out = Vec::new();
        while let Some(idx) = stack.pop() {
            if idx <= TRUE || !seen.insert(idx) {
                continue;
            }
            out.push(idx);
            let node = self.nodes[idx as usize];
            stack.push(node.low);
            stack.push(node.high);
        }
        Ok(out)
    }

    fn mk_raw(&mut self, level: u32, low: u32, high: u32) -> Result<u32> {
        if low == high {
            return Ok(low);
        }
        let node = BddNode { level, low, high };
        if let Some(&idx) = self.unique.get(&node) {
            return Ok(idx);
        }
        if let Some(cap) = self.node_cap {
            if self.allocated_nodes() >= cap {
                return Err(BddError::NodeCapExceeded { cap });
            }
        }
        let idx = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, idx);
        Ok(idx)
    }

    fn level_raw(&self, f: u32) -> u32 {
        self.nodes[f as usize].level
    }

    /// Cofactors of `f` with respect to the variable at `level`.
    fn cofactors(&self, f: u32, level: u32) -> (u32, u32) {
        let node = self.nodes[f as usize];
        if node.level == level {
            (node.low, node.high)
        } else {
            (f, f)
        }
    }

    fn apply_raw(&mut self, op: BinOp, f: u32, g: u32) -> Result<u32> {
        if let Some(r) = terminal_case(op, f, g) {
            return Ok(r);
        }
        let key = if op.is_commutative() && g < f {
            (op, g, f)
        } else {
            (op, f, g)
        };
        if let Some(&r) = self.apply_cache.get(&key) {
            return Ok(r);
        }
        let level = self.level_raw(f).min(self.level_raw(g));
        let (f0, f1) = self.cofactors(f, level);
        let (g0, g1) = self.cofactors(g, level);
        let low = self.apply_raw(op, f0, g0)?;
        let high = self.apply_raw(op, f1, g1)?;
        let r = self.mk_raw(level, low, high)?;
        self.apply_cache.insert(key, r);
        Ok(r)
    }

    fn ite_raw(&mut self, c: u32, t: u32, e: u32) -> Result<u32> {
        match (c, t, e) {
            (TRUE, _, _) => return Ok(t),
            (FALSE, _, _) => return Ok(e),
            _ if t == e => return Ok(t),
            (_, TRUE, FALSE) => return Ok(c),
            (_, TRUE, _) => return self.apply_raw(BinOp::Or, c, e),
            (_, _, FALSE) => return self.apply_raw(BinOp::And, c, t),
            _ => {}
        }
        if let Some(&r) = self.ite_cache.get(&(c, t, e)) {
            return Ok(r);
        }
        let level = self
            .level_raw(c)
            .min(self.level_raw(t))
            .min(self.level_raw(e));
        let (c0, c1) = self.cofactors(c, level);
        let (t0, t1) = self.cofactors(t, level);
        let (e0, e1) = self.cofactors(e, level);
        let low = self.ite_raw(c0, t0, e0)?;
        let high = self.ite_raw(c1, t1, e1)?;
        let r = self.mk_raw(level, low, high)?;
        self.ite_cache.insert((c, t, e), r);
        Ok(r)
    }
}

fn terminal_case(op: BinOp, f: u32, g: u32) -> Option<u32> {
    let bit = |x: bool| if x { TRUE } else { FALSE };
    if f <= TRUE && g <= TRUE {
        return Some(bit(op.eval(f == TRUE, g == TRUE)));
    }
    match op {
        BinOp::And => match (f, g) {
            (FALSE, _) | (_, FALSE) => Some(FALSE),
            (TRUE, _) => Some(g),
            (_, TRUE) => Some(f),
            _ if f == g => Some(f),
            _ => None,
        },
        BinOp::Or => match (f, g) {
            (TRUE, _) | (_, TRUE) => Some(TRUE),
            (FALSE, _) => Some(g),
            (_, FALSE) => Some(f),
            _ if f == g => Some(f),
            _ => None,
        },
        BinOp::Xor => match (f, g) {
            (FALSE, _) => Some(g),
            (_, FALSE) => Some(f),
            _ if f == g => Some(FALSE),
            _ => None,
        },
        BinOp::Xnor => (f == g).then_some(TRUE),
        BinOp::Nand | BinOp::Nor => None,
        BinOp::Implies => match (f, g) {
            (FALSE, _) | (_, TRUE) => Some(TRUE),
            (TRUE, _) => Some(g),
            _ if f == g => Some(TRUE),
            _ => None,
        },
    }
}

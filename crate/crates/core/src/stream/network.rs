//! Per-cell evaluation of coordinate expressions over an event stream.
//!
//! Every distinct subexpression becomes one node; children always precede
//! their parents, so a single left-to-right sweep per cell computes them all.
//! In weak mode each application runs as a coordinate automaton that
//! remembers suspended `down` moves per column. In strong mode applications
//! are broken into row-local steps and column sets, which stay small on
//! guarded schemas.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{FragmentError, StreamError};
use crate::schema::ast::{CoordExpr, NavExpr};
use crate::schema::desugar;
use crate::stream::ca::{compile_coord_to_ca, CoordinateAutomaton, Label};
use crate::stream::colset::{finite_bound, ColumnSet, ColumnSetBuilder};
use crate::tokens::{CellTokens, TokenId, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StreamMode {
    #[default]
    Weak,
    Strong,
}

pub type NodeId = usize;

/// Transition tables of a coordinate automaton, indexed by source state.
#[derive(Debug)]
struct CaTables {
    states: usize,
    initial: usize,
    finals: FixedBitSet,
    // epsilon moves and filters; `None` means unconditional
    local: Vec<Vec<(Option<usize>, usize)>>,
    right: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    newrow: Vec<Vec<usize>>,
}

impl CaTables {
    fn new(ca: &CoordinateAutomaton) -> Self {
        let n = ca.states;
        let mut t = CaTables {
            states: n,
            initial: ca.initial,
            finals: ca.finals.clone(),
            local: vec![Vec::new(); n],
            right: vec![Vec::new(); n],
            down: vec![Vec::new(); n],
            newrow: vec![Vec::new(); n],
        };
        for &(p, l, q) in &ca.transitions {
            match l {
                Label::Eps => t.local[p].push((None, q)),
                Label::Filter(i) => t.local[p].push((Some(i), q)),
                Label::Right => t.right[p].push(q),
                Label::Down => t.down[p].push(q),
                Label::NewRow => t.newrow[p].push(q),
            }
        }
        t
    }
}

/// Simulation of one coordinate automaton: active states at the current
/// cell, states owed to the next cell, and suspended states waiting for a
/// column of the next row.
#[derive(Debug)]
struct CaSim {
    tables: Arc<CaTables>,
    oracles: Vec<NodeId>,
    started: bool,
    act: FixedBitSet,
    via_right: FixedBitSet,
    via_newrow: FixedBitSet,
    scratch: FixedBitSet,
    // (column, state), ascending by column
    susp: Vec<(usize, usize)>,
    cursor: usize,
    susp_next: Vec<(usize, usize)>,
    stack: Vec<usize>,
}

impl CaSim {
    fn new(tables: Arc<CaTables>, oracles: Vec<NodeId>) -> Self {
        let n = tables.states;
        Self {
            tables,
            oracles,
            started: false,
            act: FixedBitSet::with_capacity(n),
            via_right: FixedBitSet::with_capacity(n),
            via_newrow: FixedBitSet::with_capacity(n),
            scratch: FixedBitSet::with_capacity(n),
            susp: Vec::new(),
            cursor: 0,
            susp_next: Vec::new(),
            stack: Vec::new(),
        }
    }

    fn cell(&mut self, col: usize, values: &FixedBitSet) -> bool {
        let t = &*self.tables;
        self.act.clear();
        if !self.started {
            self.started = true;
            self.act.insert(t.initial);
        } else if col == 1 {
            self.act.union_with(&self.via_newrow);
        } else {
            self.act.union_with(&self.via_right);
        }
        while let Some(&(c, q)) = self.susp.get(self.cursor) {
            if c > col {
                break;
            }
            if c == col {
                self.act.insert(q);
            }
            self.cursor += 1;
        }
        self.stack.clear();
        self.stack.extend(self.act.ones());
        while let Some(p) = self.stack.pop() {
            for &(f, q) in &t.local[p] {
                if f.is_none_or(|i| values.contains(self.oracles[i])) && !self.act.put(q) {
                    self.stack.push(q);
                }
            }
        }
        self.via_right.clear();
        self.via_newrow.clear();
        self.scratch.clear();
        for p in self.act.ones() {
            self.via_right.extend(t.right[p].iter().copied());
            self.via_newrow.extend(t.newrow[p].iter().copied());
            self.scratch.extend(t.down[p].iter().copied());
        }
        self.susp_next.extend(self.scratch.ones().map(|q| (col, q)));
        !self.act.is_disjoint(&t.finals)
    }

    fn new_row(&mut self) {
        self.susp = std::mem::take(&mut self.susp_next);
        self.cursor = 0;
        self.via_right.clear();
    }

    fn stored_columns(&self) -> usize {
        self.susp.len() - self.cursor + self.susp_next.len()
    }
}

#[derive(Debug)]
enum Node {
    Token(Option<TokenId>),
    Root,
    True,
    Not(NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    /// Value of `src` one column to the left.
    Right { src: NodeId, last: bool },
    /// Set once `src` held somewhere earlier in the row.
    RightStar { src: NodeId, seen: bool },
    /// Value of `src` one row up, same column.
    Down { src: NodeId, prev: ColumnSet, next: ColumnSetBuilder },
    /// `src` here, or this node one row up.
    DownStar { src: NodeId, prev: ColumnSet, next: ColumnSetBuilder },
    Ca(Box<CaSim>),
}

/// Stored-memory summary at one point of the stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Usage {
    /// Column numbers held (suspended pairs and column-set entries).
    pub columns: usize,
    /// Automaton state bits and one-bit registers.
    pub state_bits: usize,
}

#[derive(Debug)]
pub struct Network {
    mode: StreamMode,
    vocab: Arc<Vocabulary>,
    nodes: Vec<Node>,
    memo: HashMap<CoordExpr, NodeId>,
    values: FixedBitSet,
    row: usize,
    col: usize,
}

impl Network {
    pub fn new(mode: StreamMode, vocab: Arc<Vocabulary>) -> Self {
        Self {
            mode,
            vocab,
            nodes: Vec::new(),
            memo: HashMap::new(),
            values: FixedBitSet::new(),
            row: 1,
            col: 0,
        }
    }

    pub fn mode(&self) -> StreamMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, e: &CoordExpr, n: Node) -> NodeId {
        self.nodes.push(n);
        self.values.grow(self.nodes.len());
        let id = self.nodes.len() - 1;
        self.memo.insert(e.clone(), id);
        id
    }

    /// Adds `e` and its subexpressions, reusing nodes already present.
    pub fn add(&mut self, e: &CoordExpr) -> Result<NodeId, FragmentError> {
        if let Some(&id) = self.memo.get(e) {
            return Ok(id);
        }
        if !e.is_core() {
            let id = self.add(&desugar::core(e))?;
            self.memo.insert(e.clone(), id);
            return Ok(id);
        }
        let node = match e {
            CoordExpr::Token(n) => Node::Token(self.vocab.id(n)),
            CoordExpr::Root => Node::Root,
            CoordExpr::True => Node::True,
            CoordExpr::Not(a) => Node::Not(self.add(a)?),
            CoordExpr::And(a, b) => {
                let (a, b) = (self.add(a)?, self.add(b)?);
                Node::And(a, b)
            }
            CoordExpr::Or(a, b) => {
                let (a, b) = (self.add(a)?, self.add(b)?);
                Node::Or(a, b)
            }
            CoordExpr::Exists(_) => return Err(FragmentError::NotForward(format!("existential test {e}"))),
            CoordExpr::Apply(nav, x) => match self.mode {
                StreamMode::Weak => self.automaton(e)?,
                StreamMode::Strong => {
                    let id = self.strong_apply(nav, x, e)?;
                    self.memo.insert(e.clone(), id);
                    return Ok(id);
                }
            },
            _ => unreachable!("sugar is expanded above"),
        };
        Ok(self.push(e, node))
    }

    fn automaton(&mut self, e: &CoordExpr) -> Result<Node, FragmentError> {
        let ca = compile_coord_to_ca(e)?;
        let oracles = ca.oracles.iter().map(|o| self.add(o)).collect::<Result<Vec<_>, _>>()?;
        Ok(Node::Ca(Box::new(CaSim::new(Arc::new(CaTables::new(&ca)), oracles))))
    }

    fn strong_apply(&mut self, nav: &NavExpr, x: &CoordExpr, whole: &CoordExpr) -> Result<NodeId, FragmentError> {
        let apply = |n: &NavExpr, c: &CoordExpr| CoordExpr::apply(n.clone(), c.clone());
        let builder = || ColumnSetBuilder::new(finite_bound(whole.size()), whole.to_string());
        let node = match nav {
            NavExpr::Epsilon => return self.add(x),
            NavExpr::Concat(a, b) => return self.add(&apply(b, &apply(a, x))),
            NavExpr::Union(a, b) => {
                let (a, b) = (self.add(&apply(a, x))?, self.add(&apply(b, x))?);
                Node::Or(a, b)
            }
            NavExpr::Filter(psi) => {
                let (a, b) = (self.add(x)?, self.add(psi)?);
                Node::And(a, b)
            }
            NavExpr::Right => Node::Right {
                src: self.add(x)?,
                last: false,
            },
            NavExpr::Down => Node::Down {
                src: self.add(x)?,
                prev: ColumnSet::default(),
                next: builder(),
            },
            NavExpr::Star(inner) if **inner == NavExpr::Right => Node::RightStar {
                src: self.add(x)?,
                seen: false,
            },
            NavExpr::Star(inner) if **inner == NavExpr::Down => Node::DownStar {
                src: self.add(x)?,
                prev: ColumnSet::default(),
                next: builder(),
            },
            _ if !nav.moves_down() => self.automaton(whole)?,
            _ => return Err(FragmentError::NotGuarded(format!("no column-set form for `{whole}`"))),
        };
        Ok(self.push(whole, node))
    }

    pub fn value(&self, id: NodeId) -> bool {
        self.values.contains(id)
    }

    /// Current coordinate, (row, 0) before the first cell of a row.
    pub fn position(&self) -> (usize, usize) {
        (self.row, self.col)
    }

    /// Advances to the next cell and computes every node there.
    pub fn cell(&mut self, cell: &CellTokens) -> Result<(), StreamError> {
        self.col += 1;
        let (row, col) = (self.row, self.col);
        for i in 0..self.nodes.len() {
            let values = &self.values;
            let v = match &mut self.nodes[i] {
                Node::Token(id) => id.is_some_and(|id| cell.contains(id)),
                Node::Root => row == 1 && col == 1,
                Node::True => true,
                Node::Not(a) => !values.contains(*a),
                Node::And(a, b) => values.contains(*a) && values.contains(*b),
                Node::Or(a, b) => values.contains(*a) || values.contains(*b),
                Node::Right { src, last } => {
                    let v = col > 1 && *last;
                    *last = values.contains(*src);
                    v
                }
                Node::RightStar { src, seen } => {
                    if col == 1 {
                        *seen = false;
                    }
                    *seen |= values.contains(*src);
                    *seen
                }
                Node::Down { src, prev, next } => {
                    next.push(col, values.contains(*src))?;
                    prev.contains(col)
                }
                Node::DownStar { src, prev, next } => {
                    let v = values.contains(*src) || prev.contains(col);
                    next.push(col, v)?;
                    v
                }
                Node::Ca(sim) => sim.cell(col, values),
            };
            self.values.set(i, v);
        }
        Ok(())
    }

    /// Moves past a cell without evaluating anything.
    pub fn skip_cell(&mut self) {
        self.col += 1;
    }

    pub fn new_row(&mut self) {
        self.row += 1;
        self.col = 0;
        for n in &mut self.nodes {
            match n {
                Node::Down { prev, next, .. } | Node::DownStar { prev, next, .. } => *prev = next.finish(),
                Node::Ca(sim) => sim.new_row(),
                _ => {}
            }
        }
    }

    /// Column numbers that would cross into the next row if it started now.
    pub fn carryover(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| match n {
                Node::Down { prev, next, .. } | Node::DownStar { prev, next, .. } => {
                    if self.col == 0 {
                        prev.size()
                    } else {
                        next.size()
                    }
                }
                Node::Ca(sim) => {
                    if self.col == 0 {
                        sim.susp.len()
                    } else {
                        sim.susp_next.len()
                    }
                }
                _ => 0,
            })
            .sum()
    }

    pub fn usage(&self) -> Usage {
        let mut u = Usage::default();
        for n in &self.nodes {
            match n {
                Node::Right { .. } | Node::RightStar { .. } => u.state_bits += 1,
                Node::Down { prev, next, .. } | Node::DownStar { prev, next, .. } => {
                    u.columns += prev.size() + next.size();
                }
                Node::Ca(sim) => {
                    u.columns += sim.stored_columns();
                    u.state_bits += sim.tables.states + sim.oracles.len();
                }
                _ => {}
            }
        }
        u
    }
}

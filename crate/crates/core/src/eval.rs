//! In-memory evaluation of coordinate and navigational expressions.
//!
//! Navigational expressions compile to a Thompson NFA over moves and filters.
//! Applying one to a set of cells is reachability in the product of the NFA
//! and the grid, so each (state, cell) pair is touched at most once.

use fixedbitset::FixedBitSet;

use crate::region::Region;
use crate::schema::ast::{CoordExpr, NavExpr};
use crate::schema::desugar;
use crate::tokens::{TokenId, TokenizedTable, Vocabulary};

/// Work counters, accumulated across evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// (state, cell) pairs marked during product reachability.
    pub product_visits: u64,
    /// Sum over navigational evaluations of states * cells, the visit bound.
    pub product_bound: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Act {
    Eps,
    Up,
    Down,
    Left,
    Right,
    Filter(usize),
}

#[derive(Debug, Clone, Default)]
struct Nfa {
    start: usize,
    accept: usize,
    out: Vec<Vec<(Act, usize)>>,
    inc: Vec<Vec<(Act, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        self.out.len() - 1
    }

    fn edge(&mut self, from: usize, act: Act, to: usize) {
        self.out[from].push((act, to));
        self.inc[to].push((act, from));
    }

    fn states(&self) -> usize {
        self.out.len()
    }
}

#[derive(Debug, Clone)]
struct NavProgram {
    nfa: Nfa,
    filters: Vec<Plan>,
}

impl NavProgram {
    fn compile(e: &NavExpr, vocab: &Vocabulary) -> Self {
        let mut p = NavProgram {
            nfa: Nfa::default(),
            filters: Vec::new(),
        };
        let (s, t) = p.frag(e, vocab);
        p.nfa.start = s;
        p.nfa.accept = t;
        p
    }

    fn frag(&mut self, e: &NavExpr, vocab: &Vocabulary) -> (usize, usize) {
        let atom = |p: &mut Self, act| {
            let (s, t) = (p.nfa.state(), p.nfa.state());
            p.nfa.edge(s, act, t);
            (s, t)
        };
        match e {
            NavExpr::Epsilon => {
                let s = self.nfa.state();
                (s, s)
            }
            NavExpr::Up => atom(self, Act::Up),
            NavExpr::Down => atom(self, Act::Down),
            NavExpr::Left => atom(self, Act::Left),
            NavExpr::Right => atom(self, Act::Right),
            NavExpr::Filter(c) => {
                self.filters.push(Plan::compile(c, vocab));
                atom(self, Act::Filter(self.filters.len() - 1))
            }
            NavExpr::Concat(a, b) => {
                let (s1, t1) = self.frag(a, vocab);
                let (s2, t2) = self.frag(b, vocab);
                self.nfa.edge(t1, Act::Eps, s2);
                (s1, t2)
            }
            NavExpr::Union(a, b) => {
                let s = self.nfa.state();
                let (s1, t1) = self.frag(a, vocab);
                let (s2, t2) = self.frag(b, vocab);
                let t = self.nfa.state();
                self.nfa.edge(s, Act::Eps, s1);
                self.nfa.edge(s, Act::Eps, s2);
                self.nfa.edge(t1, Act::Eps, t);
                self.nfa.edge(t2, Act::Eps, t);
                (s, t)
            }
            NavExpr::Star(a) => {
                let s = self.nfa.state();
                let (s1, t1) = self.frag(a, vocab);
                self.nfa.edge(s, Act::Eps, s1);
                self.nfa.edge(t1, Act::Eps, s);
                (s, s)
            }
            NavExpr::Plus(a) => {
                let (s1, t1) = self.frag(a, vocab);
                self.nfa.edge(t1, Act::Eps, s1);
                (s1, t1)
            }
            NavExpr::Opt(a) => {
                let s = self.nfa.state();
                let (s1, t1) = self.frag(a, vocab);
                self.nfa.edge(s, Act::Eps, s1);
                self.nfa.edge(s, Act::Eps, t1);
                (s, t1)
            }
        }
    }

    /// Cells reachable from `seeds` (forward) or cells that can reach an
    /// accepting configuration (backward).
    fn reach(&self, t: &TokenizedTable, seeds: Seeds<'_>, backward: bool, stats: &mut EvalStats) -> Region {
        let (n, m) = (t.rows(), t.cols());
        let cells = n * m;
        let mut out = Region::empty(n, m);
        if cells == 0 {
            return out;
        }
        let filters: Vec<Region> = self.filters.iter().map(|f| f.eval(t, stats)).collect();
        let q = self.nfa.states();
        stats.product_bound += (q * cells) as u64;
        let (from, to, edges) = if backward {
            (self.nfa.accept, self.nfa.start, &self.nfa.inc)
        } else {
            (self.nfa.start, self.nfa.accept, &self.nfa.out)
        };
        let mut visited = FixedBitSet::with_capacity(q * cells);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        let mut mark = |s: usize, c: usize, stack: &mut Vec<(usize, usize)>, stats: &mut EvalStats| {
            if !visited.put(s * cells + c) {
                stats.product_visits += 1;
                stack.push((s, c));
            }
        };
        match seeds {
            Seeds::All => (0..cells).for_each(|c| mark(from, c, &mut stack, stats)),
            Seeds::Region(r) => r.indices().for_each(|c| mark(from, c, &mut stack, stats)),
        }
        while let Some((s, c)) = stack.pop() {
            if s == to {
                out.insert_index(c);
            }
            let (row, col) = (c / m, c % m);
            for &(act, s2) in &edges[s] {
                // backward traversal walks each move in the opposite direction
                let act = if backward { flip(act) } else { act };
                let c2 = match act {
                    Act::Eps => c,
                    Act::Filter(i) => {
                        if !filters[i].contains_index(c) {
                            continue;
                        }
                        c
                    }
                    Act::Up if row > 0 => c - m,
                    Act::Down if row + 1 < n => c + m,
                    Act::Left if col > 0 => c - 1,
                    Act::Right if col + 1 < m => c + 1,
                    _ => continue,
                };
                mark(s2, c2, &mut stack, stats);
            }
        }
        out
    }
}

fn flip(a: Act) -> Act {
    match a {
        Act::Up => Act::Down,
        Act::Down => Act::Up,
        Act::Left => Act::Right,
        Act::Right => Act::Left,
        other => other,
    }
}

enum Seeds<'a> {
    All,
    Region(&'a Region),
}

#[derive(Debug, Clone)]
enum Plan {
    Token(Option<TokenId>),
    Root,
    True,
    Or(Box<Plan>, Box<Plan>),
    And(Box<Plan>, Box<Plan>),
    Not(Box<Plan>),
    Exists(NavProgram),
    Apply(NavProgram, Box<Plan>),
}

impl Plan {
    fn compile(e: &CoordExpr, vocab: &Vocabulary) -> Self {
        match e {
            CoordExpr::Token(n) => Plan::Token(vocab.id(n)),
            CoordExpr::Root => Plan::Root,
            CoordExpr::True => Plan::True,
            CoordExpr::Or(a, b) => Plan::Or(Box::new(Plan::compile(a, vocab)), Box::new(Plan::compile(b, vocab))),
            CoordExpr::And(a, b) => Plan::And(Box::new(Plan::compile(a, vocab)), Box::new(Plan::compile(b, vocab))),
            CoordExpr::Not(a) => Plan::Not(Box::new(Plan::compile(a, vocab))),
            CoordExpr::Exists(a) => Plan::Exists(NavProgram::compile(a, vocab)),
            CoordExpr::Apply(a, c) => Plan::Apply(NavProgram::compile(a, vocab), Box::new(Plan::compile(c, vocab))),
            sugar => Plan::compile(&desugar::core(sugar), vocab),
        }
    }

    fn eval(&self, t: &TokenizedTable, stats: &mut EvalStats) -> Region {
        let (n, m) = (t.rows(), t.cols());
        match self {
            Plan::Token(None) => Region::empty(n, m),
            Plan::Token(Some(id)) => {
                let mut r = Region::empty(n, m);
                for (i, c) in t.cells().iter().enumerate() {
                    if c.contains(*id) {
                        r.insert_index(i);
                    }
                }
                r
            }
            Plan::Root => {
                let mut r = Region::empty(n, m);
                if n * m > 0 {
                    r.insert_index(0);
                }
                r
            }
            Plan::True => Region::full(n, m),
            Plan::Or(a, b) => {
                let mut r = a.eval(t, stats);
                r.union_with(&b.eval(t, stats));
                r
            }
            Plan::And(a, b) => {
                let mut r = a.eval(t, stats);
                r.intersect_with(&b.eval(t, stats));
                r
            }
            Plan::Not(a) => {
                let mut r = a.eval(t, stats);
                r.complement();
                r
            }
            Plan::Exists(p) => p.reach(t, Seeds::All, true, stats),
            Plan::Apply(p, c) => {
                let seeds = c.eval(t, stats);
                p.reach(t, Seeds::Region(&seeds), false, stats)
            }
        }
    }
}

/// A coordinate expression compiled against a vocabulary, reusable across
/// every table tokenized with that vocabulary.
#[derive(Debug, Clone)]
pub struct CoordProgram {
    plan: Plan,
}

impl CoordProgram {
    pub fn compile(e: &CoordExpr, vocab: &Vocabulary) -> Self {
        Self {
            plan: Plan::compile(e, vocab),
        }
    }

    pub fn eval(&self, t: &TokenizedTable) -> Region {
        self.plan.eval(t, &mut EvalStats::default())
    }

    pub fn eval_counted(&self, t: &TokenizedTable, stats: &mut EvalStats) -> Region {
        self.plan.eval(t, stats)
    }
}

/// Denotation of a coordinate expression over `t`.
pub fn eval_coord(phi: &CoordExpr, t: &TokenizedTable) -> Region {
    CoordProgram::compile(phi, t.vocabulary()).eval(t)
}

/// Image of the cell set `c` under navigational expression `alpha`.
pub fn eval_nav(alpha: &NavExpr, c: &Region, t: &TokenizedTable) -> Region {
    eval_nav_counted(alpha, c, t, &mut EvalStats::default())
}

pub fn eval_nav_counted(alpha: &NavExpr, c: &Region, t: &TokenizedTable, stats: &mut EvalStats) -> Region {
    NavProgram::compile(alpha, t.vocabulary()).reach(t, Seeds::Region(c), false, stats)
}

/// Cells from which `alpha` reaches at least one cell.
pub fn eval_exists(alpha: &NavExpr, t: &TokenizedTable) -> Region {
    NavProgram::compile(alpha, t.vocabulary()).reach(t, Seeds::All, true, &mut EvalStats::default())
}

/// Number of NFA states `alpha` compiles to.
pub fn nav_states(alpha: &NavExpr) -> usize {
    NavProgram::compile(alpha, &Vocabulary::with_names::<&str>(&[])).nfa.states()
}

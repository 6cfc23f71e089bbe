//! Content expressions as NFAs over cells, matched by state-set simulation.
//!
//! A cell offers every token it carries, so one step follows every
//! transition whose symbol the cell can supply.

use fixedbitset::FixedBitSet;

use crate::error::SchemaError;
use crate::region::Region;
use crate::schema::ast::{ContentExpr, Semantics};
use crate::tokens::{CellTokens, TokenId, TokenizedTable, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Token(TokenId),
    Null,
    Any,
}

impl Symbol {
    fn matches(self, cell: &CellTokens) -> bool {
        match self {
            Symbol::Token(id) => cell.contains(id),
            Symbol::Null => cell.is_null(),
            Symbol::Any => true,
        }
    }
}

/// How padding cells at the end of a matched sequence are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadMode {
    /// Trailing padding is dropped before matching.
    #[default]
    Trim,
    /// Padding must be matched by explicit `Null` symbols.
    Literal,
}

#[derive(Debug, Clone)]
pub struct ContentAutomaton {
    trans: Vec<Vec<(Symbol, usize)>>,
    eps: Vec<Vec<usize>>,
    closure: Vec<FixedBitSet>,
    start: FixedBitSet,
    finals: FixedBitSet,
}

struct Builder<'v> {
    trans: Vec<Vec<(Symbol, usize)>>,
    eps: Vec<Vec<usize>>,
    vocab: &'v Vocabulary,
}

impl Builder<'_> {
    fn state(&mut self) -> usize {
        self.trans.push(Vec::new());
        self.eps.push(Vec::new());
        self.trans.len() - 1
    }

    fn frag(&mut self, e: &ContentExpr) -> Result<(usize, usize), SchemaError> {
        let atom = |b: &mut Self, sym| {
            let (s, t) = (b.state(), b.state());
            b.trans[s].push((sym, t));
            (s, t)
        };
        Ok(match e {
            ContentExpr::Epsilon => {
                let s = self.state();
                (s, s)
            }
            ContentExpr::Token(n) => {
                let id = self
                    .vocab
                    .id(n)
                    .ok_or_else(|| SchemaError::UndefinedToken(n.clone()))?;
                atom(self, Symbol::Token(id))
            }
            ContentExpr::Null => atom(self, Symbol::Null),
            ContentExpr::Any => atom(self, Symbol::Any),
            ContentExpr::Concat(items) => {
                let mut parts = items.iter().map(|x| self.frag(x)).collect::<Result<Vec<_>, _>>()?;
                if parts.is_empty() {
                    let s = self.state();
                    parts.push((s, s));
                }
                for w in parts.windows(2) {
                    self.eps[w[0].1].push(w[1].0);
                }
                (parts[0].0, parts[parts.len() - 1].1)
            }
            ContentExpr::Alt(items) => {
                let s = self.state();
                let t = self.state();
                for x in items {
                    let (s1, t1) = self.frag(x)?;
                    self.eps[s].push(s1);
                    self.eps[t1].push(t);
                }
                (s, t)
            }
            ContentExpr::Star(a) => {
                let s = self.state();
                let (s1, t1) = self.frag(a)?;
                self.eps[s].push(s1);
                self.eps[t1].push(s);
                (s, s)
            }
            ContentExpr::Plus(a) => {
                let (s1, t1) = self.frag(a)?;
                self.eps[t1].push(s1);
                (s1, t1)
            }
            ContentExpr::Opt(a) => {
                let s = self.state();
                let (s1, t1) = self.frag(a)?;
                self.eps[s].push(s1);
                self.eps[s].push(t1);
                (s, t1)
            }
        })
    }
}

/// Thompson construction; fails only on token names missing from `vocab`.
pub fn compile_content(rho: &ContentExpr, vocab: &Vocabulary) -> Result<ContentAutomaton, SchemaError> {
    let mut b = Builder {
        trans: Vec::new(),
        eps: Vec::new(),
        vocab,
    };
    let (s, t) = b.frag(rho)?;
    let n = b.trans.len();
    let closure: Vec<FixedBitSet> = (0..n)
        .map(|q| {
            let mut seen = FixedBitSet::with_capacity(n);
            let mut stack = vec![q];
            seen.insert(q);
            while let Some(x) = stack.pop() {
                for &y in &b.eps[x] {
                    if !seen.put(y) {
                        stack.push(y);
                    }
                }
            }
            seen
        })
        .collect();
    let mut finals = FixedBitSet::with_capacity(n);
    finals.insert(t);
    Ok(ContentAutomaton {
        start: closure[s].clone(),
        trans: b.trans,
        eps: b.eps,
        closure,
        finals,
    })
}

impl ContentAutomaton {
    pub fn states(&self) -> usize {
        self.trans.len()
    }

    /// Epsilon-closed set of start states.
    pub fn start(&self) -> FixedBitSet {
        self.start.clone()
    }

    pub fn step(&self, current: &FixedBitSet, cell: &CellTokens) -> FixedBitSet {
        let mut next = FixedBitSet::with_capacity(self.states());
        for q in current.ones() {
            for &(sym, t) in &self.trans[q] {
                if sym.matches(cell) {
                    next.union_with(&self.closure[t]);
                }
            }
        }
        next
    }

    pub fn accepts(&self, current: &FixedBitSet) -> bool {
        !current.is_disjoint(&self.finals)
    }

    /// Number of epsilon edges, exposed for diagnostics.
    pub fn epsilon_edges(&self) -> usize {
        self.eps.iter().map(Vec::len).sum()
    }
}

/// True if some choice of one symbol per cell spells a word of the automaton.
pub fn match_sequence<'a>(a: &ContentAutomaton, cells: impl IntoIterator<Item = &'a CellTokens>) -> bool {
    let mut cur = a.start();
    for c in cells {
        cur = a.step(&cur, c);
        if cur.is_clear() {
            return false;
        }
    }
    a.accepts(&cur)
}

fn sequence_matches(a: &ContentAutomaton, cells: &[&CellTokens], pad: PadMode) -> bool {
    let end = match pad {
        PadMode::Literal => cells.len(),
        PadMode::Trim => cells.iter().rposition(|c| !c.is_null()).map_or(0, |i| i + 1),
    };
    match_sequence(a, cells[..end].iter().copied())
}

/// Rows (1-based) of `z` whose slice fails the automaton.
pub fn failing_rows(t: &TokenizedTable, z: &Region, a: &ContentAutomaton, pad: PadMode) -> Vec<usize> {
    let mut out = Vec::new();
    for (k, coords) in z.by_row() {
        let cells: Vec<&CellTokens> = coords.iter().map(|c| t.get(*c)).collect();
        if !sequence_matches(a, &cells, pad) {
            out.push(k);
        }
    }
    out
}

pub fn region_matches(t: &TokenizedTable, z: &Region, a: &ContentAutomaton, pad: PadMode) -> bool {
    let cells: Vec<&CellTokens> = z.iter().map(|c| t.get(c)).collect();
    sequence_matches(a, &cells, pad)
}

/// Whether region `z` of `t` satisfies the automaton under the given semantics.
pub fn satisfies(t: &TokenizedTable, z: &Region, a: &ContentAutomaton, mode: Semantics, pad: PadMode) -> bool {
    match mode {
        Semantics::RowBased => failing_rows(t, z, a, pad).is_empty(),
        Semantics::RegionBased => region_matches(t, z, a, pad),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parser::parse_content_expr;
    use crate::tokens::{TokenSet, EMPTY, STRING};

    fn vocab() -> std::sync::Arc<Vocabulary> {
        Vocabulary::with_names(&["Timestamp", "a", "b", "prov-book", "prov-pos", "prov-node"])
    }

    fn compile(src: &str) -> ContentAutomaton {
        compile_content(&parse_content_expr(src).unwrap(), &vocab()).unwrap()
    }

    fn cell(names: &[&str]) -> CellTokens {
        let v = vocab();
        CellTokens::Tokens(names.iter().map(|n| v.id(n).unwrap()).collect())
    }

    #[test]
    fn single_token_two_states() {
        let a = compile("Timestamp");
        assert_eq!(a.states(), 2);
        assert!(match_sequence(&a, &[cell(&["Timestamp"])]));
        assert!(!match_sequence(&a, &[]));
        assert!(!match_sequence(&a, &[cell(&["Timestamp"]), cell(&["Timestamp"])]));
    }

    #[test]
    fn provenance_accepts_empty() {
        let a = compile("(prov-book, prov-pos*, prov-node?)*");
        assert!(match_sequence(&a, &[]));
        assert!(match_sequence(
            &a,
            &[cell(&["prov-book"]), cell(&["prov-pos"]), cell(&["prov-node"]), cell(&["prov-book"])]
        ));
        assert!(!match_sequence(&a, &[cell(&["prov-pos"])]));
    }

    #[test]
    fn alternation_of_two_tokens() {
        let a = compile("Empty | Timestamp");
        let empty_cell = CellTokens::Tokens([EMPTY, STRING].into_iter().collect::<TokenSet>());
        assert!(match_sequence(&a, &[empty_cell]));
        assert!(match_sequence(&a, &[cell(&["Timestamp"])]));
        assert!(!match_sequence(&a, &[cell(&["a"])]));
    }

    #[test]
    fn null_and_any() {
        let a = compile("a, Null");
        assert!(match_sequence(&a, &[cell(&["a"]), CellTokens::Null]));
        assert!(!match_sequence(&a, &[cell(&["a"]), cell(&[])]));
        let any = compile("True*");
        assert!(match_sequence(&any, &[CellTokens::Null, cell(&[])]));
    }

    #[test]
    fn overlapping_tokens_choose_existentially() {
        let a = compile("a, b");
        assert!(match_sequence(&a, &[cell(&["a", "b"]), cell(&["a", "b"])]));
    }

    #[test]
    fn state_count_bound() {
        for src in ["(a, b*)+ | (Null, a?)*", "a, b, Timestamp", "((a))*"] {
            let e = parse_content_expr(src).unwrap();
            assert!(compile(src).states() <= 2 * e.size());
        }
    }
}

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use sculpt::schema::ast::{CoordExpr, NavExpr};
use sculpt::tokens::TokenSet;
use sculpt::{CellTokens, Schema, TokenizedTable, Vocabulary};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn schema_fixture(name: &str) -> Schema {
    Schema::parse(&read_fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// A cell over the two test tokens: bit 0 is `a`, bit 1 is `b`, and
/// `NULL` stands for padding.
pub type Kind = u8;
pub const NULL: Kind = 4;

pub fn vocab_ab() -> Arc<Vocabulary> {
    Vocabulary::with_names(&["a", "b"])
}

pub fn cell(kind: Kind, vocab: &Vocabulary) -> CellTokens {
    if kind == NULL {
        return CellTokens::Null;
    }
    let mut s = TokenSet::new();
    if kind & 1 != 0 {
        s.insert(vocab.id("a").unwrap());
    }
    if kind & 2 != 0 {
        s.insert(vocab.id("b").unwrap());
    }
    CellTokens::Tokens(s)
}

pub fn table(rows: usize, cols: usize, kinds: &[Kind], vocab: &Arc<Vocabulary>) -> TokenizedTable {
    assert_eq!(kinds.len(), rows * cols);
    let cells = kinds.iter().map(|&k| cell(k, vocab)).collect();
    TokenizedTable::from_cells(rows, cols, cells, vocab.clone())
}

/// Every table of the given shape whose cells carry exactly one of `a`, `b`.
pub fn single_token_tables(rows: usize, cols: usize) -> impl Iterator<Item = Vec<Kind>> {
    let n = rows * cols;
    (0u32..1 << n).map(move |bits| (0..n).map(|i| 1 + ((bits >> i) & 1) as Kind).collect())
}

// ---------------------------------------------------------------------------
// enumeration

pub struct Enumeration {
    /// `coord[s]` holds every coordinate expression of size `s`.
    pub coord: Vec<Vec<CoordExpr>>,
    pub nav: Vec<Vec<NavExpr>>,
}

impl Enumeration {
    pub fn all_coord(&self) -> impl Iterator<Item = &CoordExpr> {
        self.coord.iter().flatten()
    }
}

/// All core expressions up to `max` nodes over tokens `a` and `b`.
pub fn enumerate(max: usize) -> Enumeration {
    let mut coord: Vec<Vec<CoordExpr>> = vec![Vec::new(); max + 1];
    let mut nav: Vec<Vec<NavExpr>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        coord[1] = vec![CoordExpr::token("a"), CoordExpr::token("b"), CoordExpr::Root, CoordExpr::True];
        nav[1] = vec![NavExpr::Epsilon, NavExpr::Up, NavExpr::Down, NavExpr::Left, NavExpr::Right];
    }
    for s in 2..=max {
        let mut cs = Vec::new();
        let mut ns = Vec::new();
        for x in &coord[s - 1] {
            cs.push(CoordExpr::not(x.clone()));
            ns.push(NavExpr::filter(x.clone()));
        }
        for a in &nav[s - 1] {
            cs.push(CoordExpr::exists(a.clone()));
            ns.push(NavExpr::star(a.clone()));
        }
        for i in 1..s - 1 {
            let j = s - 1 - i;
            for x in &coord[i] {
                for y in &coord[j] {
                    cs.push(CoordExpr::or(x.clone(), y.clone()));
                    cs.push(CoordExpr::and(x.clone(), y.clone()));
                }
            }
            for a in &nav[i] {
                for y in &coord[j] {
                    cs.push(CoordExpr::apply(a.clone(), y.clone()));
                }
                for b in &nav[j] {
                    ns.push(NavExpr::concat(a.clone(), b.clone()));
                    ns.push(NavExpr::union(a.clone(), b.clone()));
                }
            }
        }
        coord[s] = cs;
        nav[s] = ns;
    }
    Enumeration { coord, nav }
}

// ---------------------------------------------------------------------------
// naive oracle: regions are bitmasks, navigational expressions are relations
// given as one target mask per source cell

pub struct Grid<'a> {
    pub rows: usize,
    pub cols: usize,
    pub kinds: &'a [Kind],
}

impl Grid<'_> {
    fn len(&self) -> usize {
        self.rows * self.cols
    }

    fn all(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    fn has(&self, i: usize, name: &str) -> bool {
        let k = self.kinds[i];
        k != NULL
            && match name {
                "a" => k & 1 != 0,
                "b" => k & 2 != 0,
                _ => false,
            }
    }

    pub fn coord(&self, e: &CoordExpr) -> u64 {
        match e {
            CoordExpr::Token(n) => (0..self.len()).filter(|&i| self.has(i, n)).fold(0, |m, i| m | 1 << i),
            CoordExpr::Root => u64::from(self.len() > 0),
            CoordExpr::True => self.all(),
            CoordExpr::Or(x, y) => self.coord(x) | self.coord(y),
            CoordExpr::And(x, y) => self.coord(x) & self.coord(y),
            CoordExpr::Not(x) => !self.coord(x) & self.all(),
            CoordExpr::Exists(a) => {
                let r = self.nav(a);
                (0..self.len()).filter(|&i| r[i] != 0).fold(0, |m, i| m | 1 << i)
            }
            CoordExpr::Apply(a, x) => {
                let r = self.nav(a);
                let src = self.coord(x);
                (0..self.len()).filter(|&i| src >> i & 1 == 1).fold(0, |m, i| m | r[i])
            }
            other => panic!("oracle handles core expressions only: {other}"),
        }
    }

    fn step(&self, dr: isize, dc: isize) -> Vec<u64> {
        (0..self.len())
            .map(|i| {
                let (r, c) = ((i / self.cols) as isize + dr, (i % self.cols) as isize + dc);
                if r < 0 || c < 0 || r >= self.rows as isize || c >= self.cols as isize {
                    0
                } else {
                    1 << (r as usize * self.cols + c as usize)
                }
            })
            .collect()
    }

    fn compose(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter()
            .map(|&mid| (0..self.len()).filter(|&j| mid >> j & 1 == 1).fold(0, |m, j| m | y[j]))
            .collect()
    }

    pub fn nav(&self, a: &NavExpr) -> Vec<u64> {
        let id: Vec<u64> = (0..self.len()).map(|i| 1 << i).collect();
        match a {
            NavExpr::Epsilon => id,
            NavExpr::Up => self.step(-1, 0),
            NavExpr::Down => self.step(1, 0),
            NavExpr::Left => self.step(0, -1),
            NavExpr::Right => self.step(0, 1),
            NavExpr::Filter(x) => {
                let keep = self.coord(x);
                id.iter().map(|&b| b & keep).collect()
            }
            NavExpr::Concat(x, y) => self.compose(&self.nav(x), &self.nav(y)),
            NavExpr::Union(x, y) => self.nav(x).iter().zip(self.nav(y)).map(|(p, q)| p | q).collect(),
            NavExpr::Star(x) => {
                let step = self.nav(x);
                let mut acc = id;
                loop {
                    let more: Vec<u64> = acc.iter().zip(self.compose(&acc, &step)).map(|(p, q)| p | q).collect();
                    if more == acc {
                        return acc;
                    }
                    acc = more;
                }
            }
            other => panic!("oracle handles core expressions only: {other}"),
        }
    }
}

pub fn mask_of(region: &sculpt::Region) -> u64 {
    region.indices().fold(0, |m, i| m | 1 << i)
}

// ---------------------------------------------------------------------------
// random generation

pub fn random_kinds(rng: &mut StdRng, rows: usize, cols: usize, with_nulls: bool) -> Vec<Kind> {
    let mut out = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        // rows may end early; the rest of the row is padding
        let len = if with_nulls && rng.gen_bool(0.3) {
            rng.gen_range(0..=cols)
        } else {
            cols
        };
        for c in 0..cols {
            out.push(if c < len { rng.gen_range(0..4) } else { NULL });
        }
    }
    out
}

/// A random core coordinate expression of at most `budget` nodes.
pub fn random_coord(rng: &mut StdRng, budget: usize, forward: bool) -> CoordExpr {
    if budget <= 1 {
        return match rng.gen_range(0..6) {
            0 | 1 => CoordExpr::token("a"),
            2 | 3 => CoordExpr::token("b"),
            4 => CoordExpr::Root,
            _ => CoordExpr::True,
        };
    }
    let rest = budget - 1;
    match rng.gen_range(0..if forward { 8 } else { 9 }) {
        0 => CoordExpr::not(random_coord(rng, rest, forward)),
        1 => {
            let l = rng.gen_range(1..rest.max(2));
            CoordExpr::or(random_coord(rng, l, forward), random_coord(rng, rest.saturating_sub(l).max(1), forward))
        }
        2 => {
            let l = rng.gen_range(1..rest.max(2));
            CoordExpr::and(random_coord(rng, l, forward), random_coord(rng, rest.saturating_sub(l).max(1), forward))
        }
        3..=7 => {
            let l = rng.gen_range(1..rest.max(2));
            CoordExpr::apply(random_nav(rng, l, forward), random_coord(rng, rest.saturating_sub(l).max(1), forward))
        }
        _ => CoordExpr::exists(random_nav(rng, rest, forward)),
    }
}

pub fn random_nav(rng: &mut StdRng, budget: usize, forward: bool) -> NavExpr {
    if budget <= 1 {
        let axes: &[NavExpr] = if forward {
            &[NavExpr::Down, NavExpr::Right, NavExpr::Right, NavExpr::Down, NavExpr::Epsilon]
        } else {
            &[NavExpr::Down, NavExpr::Right, NavExpr::Up, NavExpr::Left, NavExpr::Epsilon]
        };
        return axes[rng.gen_range(0..axes.len())].clone();
    }
    let rest = budget - 1;
    match rng.gen_range(0..6) {
        0 => NavExpr::filter(random_coord(rng, rest, forward)),
        1 | 2 => NavExpr::star(random_nav(rng, rest, forward)),
        3 | 4 => {
            let l = rng.gen_range(1..rest.max(2));
            NavExpr::concat(random_nav(rng, l, forward), random_nav(rng, rest.saturating_sub(l).max(1), forward))
        }
        _ => {
            let l = rng.gen_range(1..rest.max(2));
            NavExpr::union(random_nav(rng, l, forward), random_nav(rng, rest.saturating_sub(l).max(1), forward))
        }
    }
}

/// Random content expression text over `a`, `b`, `Null` and `True`.
pub fn random_content(rng: &mut StdRng, depth: usize) -> String {
    let atom = |rng: &mut StdRng| ["a", "b", "Null", "True", "a", "b"][rng.gen_range(0..6)].to_string();
    if depth == 0 {
        return atom(rng);
    }
    match rng.gen_range(0..6) {
        0 => atom(rng),
        1 => format!("({})*", random_content(rng, depth - 1)),
        2 => format!("({})?", random_content(rng, depth - 1)),
        3 => format!("({}) | ({})", random_content(rng, depth - 1), random_content(rng, depth - 1)),
        _ => format!("{}, {}", random_content(rng, depth - 1), random_content(rng, depth - 1)),
    }
}

/// Random forward schema over `a` and `b` with one to three rules.
pub fn random_forward_schema(rng: &mut StdRng) -> String {
    let mut src = String::from("a = a\nb = b\n");
    for _ in 0..rng.gen_range(1..=3) {
        let size = rng.gen_range(1..=7);
        let sel = random_coord(rng, size, true);
        let arrow = if rng.gen_bool(0.7) { "->" } else { "=>" };
        src.push_str(&format!("{sel} {arrow} {}\n", random_content(rng, 2)));
    }
    src
}

// ---------------------------------------------------------------------------
// generated workloads

/// A guarded schema whose column sets stay small however wide the table is.
pub const WIDE_GUARDED: &str = "head = head\nkey = key\nunique(head)\nunique-per-row(key)\n\
    col(head) -> key\nright+(key) -> Number*\ndown+(right*(head)) -> key, Number*\n";

/// `rows` x `cols` table valid for `WIDE_GUARDED`.
pub fn wide_guarded_csv(rows: usize, cols: usize) -> String {
    let mut s = String::with_capacity(rows * cols * 3);
    for r in 1..=rows {
        for c in 1..=cols {
            if c > 1 {
                s.push(',');
            }
            match (r, c) {
                (1, 1) => s.push_str("head"),
                (1, _) => s.push('x'),
                (_, 1) => s.push_str("key"),
                _ => s.push_str(&((r * 7 + c) % 100).to_string()),
            }
        }
        s.push('\n');
    }
    s
}

/// Unguarded: which columns of row 1 hold `a` must be remembered.
pub const WIDE_UNGUARDED: &str = "a = a\nb = b\ncol(a) -> b\n";

/// Row 1 has `a` in every other column; below it every cell is `b`.
pub fn wide_unguarded_csv(rows: usize, cols: usize) -> String {
    let mut s = String::with_capacity(rows * cols * 2);
    for r in 1..=rows {
        for c in 1..=cols {
            if c > 1 {
                s.push(',');
            }
            s.push_str(match (r, c % 2) {
                (1, 1) => "a",
                (1, _) => "x",
                _ => "b",
            });
        }
        s.push('\n');
    }
    s
}

/// The climate table with `rows` generated data rows.
pub fn climate_csv(rows: usize) -> String {
    let mut s = String::from("       ,   ARUA,  BOMBO, ENTEBBE AIR\n");
    for i in 0..rows {
        let year = 1000 + (935 + i / 12) % 9000;
        let month = (i % 12) * 8 + 4;
        let t = 20.0 + (i % 97) as f64 / 10.0;
        let arua = if i % 5 == 0 { "-99.00".to_string() } else { format!("{:.2}", t + 1.5) };
        s.push_str(&format!("{year}.{month:02}, {arua:>6}, -99.00, {t:>11.2}\n"));
    }
    s
}

// ---------------------------------------------------------------------------
// single-cell mutations of the figure pairs

pub struct Mutation {
    pub at: (usize, usize),
    pub text: &'static str,
    /// The one rule that must fail, and the row it must name.
    pub rule: usize,
    pub row: usize,
}

const fn mutate(at: (usize, usize), text: &'static str, rule: usize, row: usize) -> Mutation {
    Mutation { at, text, rule, row }
}

/// (schema fixture, table fixture, mutations), for each valid figure pair.
pub fn mutation_suite() -> Vec<(&'static str, &'static str, Vec<Mutation>)> {
    vec![
        (
            "climate.sculpt",
            "climate.csv",
            vec![
                mutate((1, 1), "1935.04", 1, 1),
                mutate((1, 2), "ARUAX", 1, 1),
                mutate((1, 3), "BOMB0", 1, 1),
                mutate((1, 4), "ENTEBBE", 1, 1),
                mutate((2, 1), "1935.4", 2, 2),
                mutate((5, 1), "abc", 2, 5),
                mutate((3, 2), "-99.0", 3, 3),
                mutate((8, 2), "x", 3, 8),
                mutate((5, 2), "ARUA", 3, 5),
                mutate((4, 3), "-9.00", 4, 4),
                mutate((7, 3), "", 4, 7),
                mutate((2, 4), "27.8", 5, 2),
                mutate((6, 4), "123.45", 5, 6),
            ],
        ),
        (
            "stats_repaired.sculpt",
            "stats.csv",
            vec![
                mutate((1, 1), "QS601", 1, 1),
                mutate((2, 1), "Economic", 2, 2),
                mutate((3, 1), "hello", 3, 3),
                mutate((4, 1), "x", 4, 4),
                mutate((5, 1), "Count", 5, 5),
                mutate((5, 4), "Total", 5, 5),
                mutate((6, 3), "People", 6, 6),
                mutate((7, 2), "x", 7, 7),
                mutate((8, 1), "Geo", 8, 8),
                mutate((9, 1), "X92000001", 9, 9),
                mutate((10, 1), "", 9, 10),
                mutate((9, 3), "many", 11, 9),
                mutate((10, 4), "1476735x", 11, 10),
                mutate((10, 3), "2.2M", 11, 10),
            ],
        ),
        (
            "triples_repaired.sculpt",
            "triples.csv",
            vec![
                mutate((1, 1), "subj", 1, 1),
                mutate((2, 1), "e4", 2, 2),
                mutate((5, 1), "", 2, 5),
                mutate((3, 2), "Mention", 3, 3),
                mutate((6, 2), "per-age", 3, 6),
                mutate((4, 3), "JoJo", 4, 4),
                mutate((2, 3), "PERSON", 4, 2),
                mutate((3, 4), "X00124", 5, 3),
                mutate((4, 5), "145_149", 5, 4),
                mutate((7, 4), "D0012", 5, 7),
                mutate((5, 6), "0.9", 5, 5),
                mutate((6, 8), "182-19", 5, 6),
            ],
        ),
    ]
}

/// Applies `m` and checks the report names exactly the expected rule and row,
/// in memory and in a weak stream.
pub fn check_mutation(schema: &Schema, table_src: &str, m: &Mutation) -> Result<(), String> {
    use sculpt::{Coordinate, Location};
    let mut raw = sculpt::parse_document(table_src.as_bytes(), schema.delimiters()).map_err(|e| e.to_string())?;
    raw.set_cell(Coordinate::new(m.at.0, m.at.1), m.text);
    let t = schema.tokenize(&raw);
    let mem = schema.validate(&t, sculpt::ValidateOptions::default());
    let (weak, _) = sculpt::run_weak(schema, sculpt::event_stream(&t), sculpt::PadMode::Trim).map_err(|e| e.to_string())?;
    for (mode, r) in [("memory", &mem), ("stream", &weak)] {
        let got: Vec<(usize, Location)> = r.violations.iter().map(|v| (v.rule, v.location)).collect();
        if got != [(m.rule, Location::Row(m.row))] || !r.unique_violations.is_empty() {
            return Err(format!(
                "{:?} := {:?}: {mode} reported {got:?}, expected rule {} row {}",
                m.at, m.text, m.rule, m.row
            ));
        }
        let line = format!("RULE {} ROW {}: ", m.rule, m.row);
        if !r.render_machine().starts_with(&line) {
            return Err(format!("{:?}: machine output lacks `{line}`", m.at));
        }
    }
    Ok(())
}

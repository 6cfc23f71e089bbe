//! Token definitions, the regex dialect used by schema files, and tokenized tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use regex::{Regex, RegexSet};
use smallvec::SmallVec;

use crate::error::SchemaError;
use crate::table::{CellValue, Coordinate, RawTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(pub u32);

pub const EMPTY: TokenId = TokenId(0);
pub const STRING: TokenId = TokenId(1);
pub const NUMBER: TokenId = TokenId(2);
pub const DATE: TokenId = TokenId(3);

pub const PREDEFINED: [&str; 4] = ["Empty", "String", "Number", "Date"];

const NUMBER_RE: &str = r"^(?:[+-]?[0-9]+(?:\.[0-9]+)?)$";
const DATE_RE: &str = r"^(?:[0-9]{4}-[0-9]{2}-[0-9]{2}|[0-9]{2}/[0-9]{2}/[0-9]{4})$";

/// Small bitset of token ids. Most schemas have under 128 tokens so this stays inline.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSet {
    words: SmallVec<[u64; 2]>,
}

impl TokenSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: TokenId) {
        let (w, b) = (id.0 as usize / 64, id.0 % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << b;
    }

    pub fn contains(&self, id: TokenId) -> bool {
        let (w, b) = (id.0 as usize / 64, id.0 % 64);
        self.words.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64u32)
                .filter(move |b| w & (1u64 << b) != 0)
                .map(move |b| TokenId(i as u32 * 64 + b))
        })
    }
}

impl FromIterator<TokenId> for TokenSet {
    fn from_iter<I: IntoIterator<Item = TokenId>>(iter: I) -> Self {
        let mut s = TokenSet::new();
        for id in iter {
            s.insert(id);
        }
        s
    }
}

impl fmt::Debug for TokenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|t| t.0)).finish()
    }
}

/// What a tokenized cell carries: either the padding marker or its matching tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CellTokens {
    Null,
    Tokens(TokenSet),
}

impl CellTokens {
    pub fn contains(&self, id: TokenId) -> bool {
        match self {
            CellTokens::Null => false,
            CellTokens::Tokens(s) => s.contains(id),
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, CellTokens::Null)
    }
}

/// Name table shared by token definitions and every table tokenized with them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    names: Vec<String>,
    index: HashMap<String, TokenId>,
}

impl Vocabulary {
    fn new() -> Self {
        let mut v = Vocabulary {
            names: Vec::new(),
            index: HashMap::new(),
        };
        for name in PREDEFINED {
            v.push(name);
        }
        v
    }

    /// Vocabulary with the predefined tokens followed by `names`. Handy for
    /// building tables directly from token sets.
    pub fn with_names<S: AsRef<str>>(names: &[S]) -> Arc<Self> {
        let mut v = Self::new();
        for n in names {
            if v.id(n.as_ref()).is_none() {
                v.push(n.as_ref());
            }
        }
        Arc::new(v)
    }

    fn push(&mut self, name: &str) -> TokenId {
        let id = TokenId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<TokenId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: TokenId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Compiled token definitions: predefined tokens plus user regexes.
#[derive(Debug, Clone)]
pub struct TokenDefs {
    vocab: Arc<Vocabulary>,
    set: RegexSet,
    // token id for each pattern of `set`
    set_ids: Vec<TokenId>,
    sources: Vec<Option<String>>,
}

impl TokenDefs {
    /// `defs` pairs a token name with a regex written in the schema dialect.
    pub fn new<S: AsRef<str>, R: AsRef<str>>(defs: &[(S, R)]) -> Result<Self, SchemaError> {
        let mut vocab = Vocabulary::new();
        let mut patterns = vec![NUMBER_RE.to_string(), DATE_RE.to_string()];
        let mut set_ids = vec![NUMBER, DATE];
        let mut sources = vec![None; PREDEFINED.len()];
        for (name, src) in defs {
            let (name, src) = (name.as_ref(), src.as_ref());
            if vocab.id(name).is_some() {
                return Err(SchemaError::DuplicateName(name.to_string()));
            }
            let translated = translate_regex(src).map_err(|message| SchemaError::InvalidRegex {
                name: name.to_string(),
                message,
            })?;
            Regex::new(&translated).map_err(|e| SchemaError::InvalidRegex {
                name: name.to_string(),
                message: e.to_string(),
            })?;
            let id = vocab.push(name);
            patterns.push(translated);
            set_ids.push(id);
            sources.push(Some(src.to_string()));
        }
        let set = RegexSet::new(&patterns).map_err(|e| SchemaError::InvalidRegex {
            name: "<set>".into(),
            message: e.to_string(),
        })?;
        Ok(Self {
            vocab: Arc::new(vocab),
            set,
            set_ids,
            sources,
        })
    }

    pub fn builtin() -> Self {
        Self::new::<&str, &str>(&[]).expect("predefined patterns compile")
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn id(&self, name: &str) -> Option<TokenId> {
        self.vocab.id(name)
    }

    /// Regex source as written in the schema, `None` for predefined tokens.
    pub fn source(&self, id: TokenId) -> Option<&str> {
        self.sources.get(id.0 as usize).and_then(|s| s.as_deref())
    }

    /// Tokens matching a cell's text. Surrounding whitespace is ignored.
    pub fn classify(&self, text: &str) -> TokenSet {
        let text = text.trim();
        let mut out = TokenSet::new();
        out.insert(STRING);
        if text.is_empty() {
            out.insert(EMPTY);
        }
        for i in self.set.matches(text).into_iter() {
            out.insert(self.set_ids[i]);
        }
        out
    }

    pub fn tokenize_cell(&self, cell: &CellValue) -> CellTokens {
        match cell {
            CellValue::Text(s) => CellTokens::Tokens(self.classify(s)),
            CellValue::Missing => CellTokens::Null,
        }
    }
}

/// Translates the schema regex dialect to an anchored `regex` pattern.
///
/// In the dialect a double-quoted run is a literal string (`[0-9]{4}"."[0-9]{2}`),
/// `\"` outside quotes is a literal quote, and quotes inside a bracket class
/// are ordinary characters. Everything else is passed through.
pub fn translate_regex(src: &str) -> Result<String, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = String::with_capacity(src.len() + 8);
    out.push_str("^(?:");
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '"' => {
                let mut lit = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated quoted literal".into()),
                        Some('"') => break,
                        Some('\\') if i + 1 < chars.len() => {
                            lit.push(chars[i + 1]);
                            i += 2;
                        }
                        Some(c) => {
                            lit.push(*c);
                            i += 1;
                        }
                    }
                }
                out.push_str("(?:");
                out.push_str(&regex::escape(&lit));
                out.push(')');
                i += 1;
            }
            '\\' => {
                match chars.get(i + 1) {
                    None => return Err("trailing backslash".into()),
                    Some('"') => out.push('"'),
                    Some(c) => {
                        out.push('\\');
                        out.push(*c);
                    }
                }
                i += 2;
            }
            '[' => {
                i = copy_class(&chars, i, &mut out)?;
            }
            c => {
                out.push(c);
                i += 1;
            }
        }
    }
    out.push_str(")$");
    Ok(out)
}

// Copies a bracket class starting at `start` verbatim; returns the index after it.
fn copy_class(chars: &[char], start: usize, out: &mut String) -> Result<usize, String> {
    let mut i = start + 1;
    out.push('[');
    if chars.get(i) == Some(&'^') {
        out.push('^');
        i += 1;
    }
    if chars.get(i) == Some(&']') {
        out.push_str("\\]");
        i += 1;
    }
    let mut depth = 1;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\\' if i + 1 < chars.len() => {
                out.push(c);
                out.push(chars[i + 1]);
                i += 2;
                continue;
            }
            '[' if chars.get(i + 1) == Some(&':') => {
                let rest: String = chars[i..].iter().collect();
                let end = rest.find(":]").ok_or("unterminated character class name")?;
                out.push_str(&rest[..end + 2]);
                i += rest[..end + 2].chars().count();
                continue;
            }
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        out.push(c);
        i += 1;
        if depth == 0 {
            return Ok(i);
        }
    }
    Err("unterminated character class".into())
}

/// Grid of token sets. Shares its [`Vocabulary`] with the definitions that built it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedTable {
    rows: usize,
    cols: usize,
    cells: Vec<CellTokens>,
    vocab: Arc<Vocabulary>,
}

impl TokenizedTable {
    /// Assembles a table from cells given in table order.
    pub fn from_cells(rows: usize, cols: usize, cells: Vec<CellTokens>, vocab: Arc<Vocabulary>) -> Self {
        assert_eq!(cells.len(), rows * cols, "cell count must be rows * cols");
        Self {
            rows,
            cols,
            cells,
            vocab,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn get(&self, at: Coordinate) -> &CellTokens {
        &self.cells[self.index(at)]
    }

    pub fn index(&self, at: Coordinate) -> usize {
        debug_assert!(at.row >= 1 && at.row <= self.rows && at.col >= 1 && at.col <= self.cols);
        (at.row - 1) * self.cols + at.col - 1
    }

    pub fn coordinate(&self, index: usize) -> Coordinate {
        Coordinate::new(index / self.cols + 1, index % self.cols + 1)
    }

    /// Cells in table order.
    pub fn cells(&self) -> &[CellTokens] {
        &self.cells
    }

    /// Token names of a cell, `None` for padding.
    pub fn names_at(&self, at: Coordinate) -> Option<Vec<&str>> {
        match self.get(at) {
            CellTokens::Null => None,
            CellTokens::Tokens(s) => Some(s.iter().map(|t| self.vocab.name(t)).collect()),
        }
    }
}

pub fn tokenize(raw: &RawTable, defs: &TokenDefs) -> TokenizedTable {
    TokenizedTable {
        rows: raw.rows(),
        cols: raw.cols(),
        cells: raw.cells().iter().map(|c| defs.tokenize_cell(c)).collect(),
        vocab: defs.vocabulary().clone(),
    }
}

//! Schema files: statement splitting, classification and expression parsing.

use crate::error::SchemaError;
use crate::schema::ast::*;
use crate::table::Delimiters;
use crate::tokens::PREDEFINED;

/// Words that cannot name tokens or token types.
pub const RESERVED: &[&str] = &[
    "root", "true", "and", "or", "not", "up", "down", "left", "right", "eps", "row", "col", "Null",
    "True", "unique", "unique-per-row",
];

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Names used without a definition become literal tokens matching themselves.
    pub auto_literal_tokens: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            auto_literal_tokens: true,
        }
    }
}

pub fn parse_schema(text: &str) -> Result<SchemaDoc, SchemaError> {
    parse_schema_with(text, &ParseOptions::default())
}

pub fn parse_schema_with(text: &str, opts: &ParseOptions) -> Result<SchemaDoc, SchemaError> {
    let mut doc = SchemaDoc::default();
    let (mut col_delim, mut row_delim) = (None, None);
    for stmt in split_statements(text)? {
        match classify(&stmt)? {
            Stmt::Delim { which, value } => match which {
                DelimKind::Col => col_delim = Some(value),
                DelimKind::Row => row_delim = Some(value),
            },
            Stmt::Token { name, regex } => doc.tokens.push(TokenDecl {
                name,
                regex,
                implicit: false,
            }),
            Stmt::TokenType { name, body } => doc.token_types.push(TokenType { name, body }),
            Stmt::Unique { per_row, names } => {
                let list = if per_row {
                    &mut doc.uniques_per_row
                } else {
                    &mut doc.uniques
                };
                for n in names {
                    if !list.contains(&n) {
                        list.push(n);
                    }
                }
            }
            Stmt::Rule(rule) => doc.rules.push(rule),
        }
    }
    let d = Delimiters::default();
    doc.delims = Delimiters::new(row_delim.unwrap_or(d.row()), col_delim.unwrap_or(d.col()))?;
    resolve_names(&mut doc, opts)?;
    Ok(doc)
}

/// Parses a single coordinate expression such as `down+(right*(provenance))`.
pub fn parse_coord_expr(text: &str) -> Result<CoordExpr, SchemaError> {
    let stmt = Statement::single(text);
    let mut p = ExprParser::new(&stmt, 0, stmt.chars.len())?;
    let e = p.coord()?;
    p.expect_end()?;
    Ok(e)
}

pub fn parse_nav_expr(text: &str) -> Result<NavExpr, SchemaError> {
    let stmt = Statement::single(text);
    let mut p = ExprParser::new(&stmt, 0, stmt.chars.len())?;
    let e = p.nav()?;
    p.expect_end()?;
    Ok(e)
}

pub fn parse_content_expr(text: &str) -> Result<ContentExpr, SchemaError> {
    let stmt = Statement::single(text);
    let mut p = ExprParser::new(&stmt, 0, stmt.chars.len())?;
    let e = p.content()?;
    p.expect_end()?;
    Ok(e)
}

fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Literal token regex in the schema dialect.
pub fn literal_regex(name: &str) -> String {
    let mut s = String::from("\"");
    for c in name.chars() {
        if c == '"' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('"');
    s
}

fn resolve_names(doc: &mut SchemaDoc, opts: &ParseOptions) -> Result<(), SchemaError> {
    let mut seen: Vec<&str> = PREDEFINED.to_vec();
    for name in doc
        .tokens
        .iter()
        .map(|t| &t.name)
        .chain(doc.token_types.iter().map(|t| &t.name))
    {
        if is_reserved(name) {
            return Err(SchemaError::ReservedName(name.clone()));
        }
        if seen.contains(&name.as_str()) {
            return Err(SchemaError::DuplicateName(name.clone()));
        }
        seen.push(name);
    }
    let type_names: Vec<String> = doc.token_types.iter().map(|t| t.name.clone()).collect();

    // token references in a fixed traversal order so printing and reparsing agree
    let mut coord_refs = Vec::new();
    let mut content_refs = Vec::new();
    for t in &doc.token_types {
        coord_refs.extend(t.body.token_names());
    }
    for r in &doc.rules {
        coord_refs.extend(r.selector.token_names());
        content_refs.extend(r.content.token_names());
    }
    for n in content_refs.iter().chain(&doc.uniques).chain(&doc.uniques_per_row) {
        if type_names.contains(n) {
            return Err(SchemaError::Unsupported {
                line: 0,
                feature: format!("token type `{n}` used where a token is required"),
            });
        }
    }
    let refs = coord_refs
        .into_iter()
        .filter(|n| !type_names.contains(n))
        .chain(content_refs)
        .chain(doc.uniques.iter().cloned())
        .chain(doc.uniques_per_row.iter().cloned());
    for name in refs {
        if PREDEFINED.contains(&name.as_str()) || doc.tokens.iter().any(|t| t.name == name) {
            continue;
        }
        if !opts.auto_literal_tokens {
            return Err(SchemaError::UndefinedToken(name));
        }
        doc.tokens.push(TokenDecl {
            regex: literal_regex(&name),
            name,
            implicit: true,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// statements

struct Statement {
    chars: Vec<char>,
    pos: Vec<(usize, usize)>,
    end_pos: (usize, usize),
}

impl Statement {
    fn single(text: &str) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let pos = (0..chars.len()).map(|i| (1, i + 1)).collect();
        Statement {
            end_pos: (1, chars.len() + 1),
            chars,
            pos,
        }
    }

    fn text(&self, from: usize, to: usize) -> String {
        self.chars[from..to].iter().collect()
    }

    fn at(&self, i: usize) -> (usize, usize) {
        self.pos.get(i).copied().unwrap_or(self.end_pos)
    }

    fn first_line(&self) -> usize {
        self.at(0).0
    }

    fn error(&self, i: usize, message: impl Into<String>) -> SchemaError {
        let (line, column) = self.at(i);
        SchemaError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Op {
    Row,
    Region,
    TypeDef,
    Define,
}

fn find_op(chars: &[char]) -> Option<(usize, Op)> {
    let mut i = 0;
    while i < chars.len() {
        let next = chars.get(i + 1).copied();
        match (chars[i], next) {
            ('-', Some('>')) => return Some((i, Op::Row)),
            ('=', Some('>')) => return Some((i, Op::Region)),
            ('<', Some('=')) => return Some((i, Op::TypeDef)),
            ('=', _) => return Some((i, Op::Define)),
            _ => {}
        }
        i += 1;
    }
    None
}

fn needs_more(chars: &[char]) -> bool {
    let Some((at, op)) = find_op(chars) else {
        let text: String = chars.iter().collect();
        let is_unique = text.starts_with("unique(") || text.starts_with("unique-per-row(");
        return !(is_unique && text.trim_end().ends_with(')'));
    };
    let rhs: String = chars[at + if op == Op::Define { 1 } else { 2 }..].iter().collect();
    let rhs = rhs.trim();
    if rhs.is_empty() {
        return true;
    }
    if op == Op::Define {
        return false;
    }
    let depth: i64 = chars
        .iter()
        .map(|c| match c {
            '(' | '[' => 1,
            ')' | ']' => -1,
            _ => 0,
        })
        .sum();
    depth > 0 || [",", "|", ".", "(", "->", "=>", "<="].iter().any(|s| rhs.ends_with(s))
}

fn continues(line: &str) -> bool {
    let t = line.trim_start();
    ["->", "=>", "|", ",", ".", ")"].iter().any(|s| t.starts_with(s))
}

fn split_statements(text: &str) -> Result<Vec<Statement>, SchemaError> {
    let mut out: Vec<Statement> = Vec::new();
    let mut current: Option<Statement> = None;
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let joins = match &current {
            Some(s) => {
                let is_def = matches!(find_op(&s.chars), Some((_, Op::Define)));
                needs_more(&s.chars) || (!is_def && continues(line))
            }
            None => false,
        };
        if !joins {
            if let Some(s) = current.take() {
                out.push(s);
            }
        }
        let s = current.get_or_insert_with(|| Statement {
            chars: Vec::new(),
            pos: Vec::new(),
            end_pos: (line_no, 1),
        });
        if !s.chars.is_empty() {
            s.chars.push(' ');
            s.pos.push(s.end_pos);
        }
        let lead = line.len() - line.trim_start().len();
        let mut col = line[..lead].chars().count() + 1;
        for c in trimmed.chars() {
            s.chars.push(c);
            s.pos.push((line_no, col));
            col += 1;
        }
        s.end_pos = (line_no, col);
    }
    if let Some(s) = current {
        if needs_more(&s.chars) {
            return Err(s.error(
                s.chars.len(),
                "incomplete statement: expected a rule `->`/`=>`, a definition `=` or a token type `<=`",
            ));
        }
        out.push(s);
    }
    Ok(out)
}

enum DelimKind {
    Col,
    Row,
}

enum Stmt {
    Delim { which: DelimKind, value: char },
    Token { name: String, regex: String },
    TokenType { name: String, body: CoordExpr },
    Unique { per_row: bool, names: Vec<String> },
    Rule(Rule),
}

fn classify(stmt: &Statement) -> Result<Stmt, SchemaError> {
    let full = stmt.text(0, stmt.chars.len());
    for (kw, per_row) in [("unique-per-row", true), ("unique", false)] {
        if let Some(rest) = full.strip_prefix(kw) {
            if rest.trim_start().starts_with('(') && find_op(&stmt.chars).is_none() {
                let start = kw.chars().count();
                let mut p = ExprParser::new(stmt, start, stmt.chars.len())?;
                p.expect(Lex::LParen, "`(`")?;
                let mut names = vec![p.name("token name")?];
                while p.eat(&Lex::Comma) {
                    names.push(p.name("token name")?);
                }
                p.expect(Lex::RParen, "`)`")?;
                p.expect_end()?;
                return Ok(Stmt::Unique { per_row, names });
            }
        }
    }
    let (at, op) = find_op(&stmt.chars).ok_or_else(|| stmt.error(0, "expected a rule or definition"))?;
    let rhs_start = at + if op == Op::Define { 1 } else { 2 };
    match op {
        Op::Define => {
            let lhs = normalize_words(&stmt.text(0, at));
            let rhs = stmt.text(rhs_start, stmt.chars.len()).trim().to_string();
            let lower = lhs.to_ascii_lowercase();
            match lower.as_str() {
                "col delim" => Ok(Stmt::Delim {
                    which: DelimKind::Col,
                    value: parse_delim(&rhs).ok_or_else(|| stmt.error(rhs_start, "expected a single delimiter character"))?,
                }),
                "row delim" => Ok(Stmt::Delim {
                    which: DelimKind::Row,
                    value: parse_delim(&rhs).ok_or_else(|| stmt.error(rhs_start, "expected a single delimiter character"))?,
                }),
                "list delim" => Err(SchemaError::Unsupported {
                    line: stmt.first_line(),
                    feature: "List Delim".into(),
                }),
                _ => {
                    let mut p = ExprParser::new(stmt, 0, at)?;
                    let name = p.name("token name")?;
                    p.expect_end()?;
                    if rhs.is_empty() {
                        return Err(stmt.error(rhs_start, "empty token definition"));
                    }
                    Ok(Stmt::Token { name, regex: rhs })
                }
            }
        }
        Op::TypeDef => {
            let mut p = ExprParser::new(stmt, 0, at)?;
            let name = p.name("token type name")?;
            p.expect_end()?;
            let mut p = ExprParser::new(stmt, rhs_start, stmt.chars.len())?;
            let body = p.coord()?;
            p.expect_end()?;
            Ok(Stmt::TokenType { name, body })
        }
        Op::Row | Op::Region => {
            let mut p = ExprParser::new(stmt, 0, at)?;
            if p.lex.is_empty() {
                return Err(stmt.error(at, "missing selector before arrow"));
            }
            let selector = p.coord()?;
            p.expect_end()?;
            let mut p = ExprParser::new(stmt, rhs_start, stmt.chars.len())?;
            let content = p.content()?;
            p.expect_end()?;
            Ok(Stmt::Rule(Rule {
                selector,
                content,
                semantics: if op == Op::Row {
                    Semantics::RowBased
                } else {
                    Semantics::RegionBased
                },
            }))
        }
    }
}

fn normalize_words(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn parse_delim(s: &str) -> Option<char> {
    let unquoted = if s.len() >= 3
        && ((s.starts_with('"') && s.ends_with('"')) || (s.starts_with('\'') && s.ends_with('\'')))
    {
        &s[1..s.len() - 1]
    } else {
        s
    };
    match unquoted {
        "\\n" => return Some('\n'),
        "\\t" => return Some('\t'),
        "\\r" => return Some('\r'),
        "\\s" => return Some(' '),
        "\\\\" => return Some('\\'),
        _ => {}
    }
    let mut it = unquoted.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// lexing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Lex {
    Word(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Pipe,
    Dot,
    Star,
    Plus,
    Question,
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !"()[]<>,|.*+?=%".contains(c)
}

fn lex(stmt: &Statement, from: usize, to: usize) -> Result<Vec<(Lex, usize)>, SchemaError> {
    let cs = &stmt.chars;
    let mut out = Vec::new();
    let mut i = from;
    while i < to {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let sym = match c {
            '(' => Some(Lex::LParen),
            ')' => Some(Lex::RParen),
            '[' => Some(Lex::LBracket),
            ']' => Some(Lex::RBracket),
            '<' => Some(Lex::Lt),
            '>' => Some(Lex::Gt),
            ',' => Some(Lex::Comma),
            '|' => Some(Lex::Pipe),
            '.' => Some(Lex::Dot),
            '*' => Some(Lex::Star),
            '+' => Some(Lex::Plus),
            '?' => Some(Lex::Question),
            _ => None,
        };
        if let Some(s) = sym {
            out.push((s, i));
            i += 1;
            continue;
        }
        if !is_word_char(c) {
            return Err(stmt.error(i, format!("unexpected character `{c}`")));
        }
        let start = i;
        while i < to && is_word_char(cs[i]) && !(cs[i] == '-' && i + 1 < to && cs[i + 1] == '>') {
            i += 1;
        }
        if i == start {
            return Err(stmt.error(i, format!("unexpected character `{c}`")));
        }
        out.push((Lex::Word(stmt.text(start, i)), start));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// expressions

const AXES: &[&str] = &["up", "down", "left", "right", "eps"];
const BOOL_KW: &[&str] = &["and", "or", "not"];

struct ExprParser<'s> {
    stmt: &'s Statement,
    lex: Vec<(Lex, usize)>,
    at: usize,
    end: usize,
}

type PResult<T> = Result<T, SchemaError>;

impl<'s> ExprParser<'s> {
    fn new(stmt: &'s Statement, from: usize, to: usize) -> PResult<Self> {
        Ok(Self {
            lex: lex(stmt, from, to)?,
            stmt,
            at: 0,
            end: to,
        })
    }

    fn peek(&self) -> Option<&Lex> {
        self.lex.get(self.at).map(|(l, _)| l)
    }

    fn peek_at(&self, k: usize) -> Option<&Lex> {
        self.lex.get(self.at + k).map(|(l, _)| l)
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Some(Lex::Word(w)) => Some(w),
            _ => None,
        }
    }

    fn eat(&mut self, l: &Lex) -> bool {
        if self.peek() == Some(l) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.peek_word() == Some(w) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, message: impl Into<String>) -> SchemaError {
        let i = self.lex.get(self.at).map(|(_, p)| *p).unwrap_or(self.end);
        self.stmt.error(i, message)
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of statement".into(),
            Some(Lex::Word(w)) => format!("`{w}`"),
            Some(l) => format!("`{}`", lex_text(l)),
        }
    }

    fn expect(&mut self, l: Lex, what: &str) -> PResult<()> {
        if self.eat(&l) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {}", self.describe())))
        }
    }

    fn expect_end(&self) -> PResult<()> {
        if self.at == self.lex.len() {
            Ok(())
        } else {
            Err(self.err(format!("unexpected {}", self.describe())))
        }
    }

    /// One or more words forming a (possibly multi-word) name.
    fn name(&mut self, what: &str) -> PResult<String> {
        let mut words = Vec::new();
        while let Some(w) = self.peek_word() {
            if !words.is_empty() && BOOL_KW.contains(&w) {
                break;
            }
            words.push(w.to_string());
            self.at += 1;
        }
        if words.is_empty() {
            return Err(self.err(format!("expected {what}, found {}", self.describe())));
        }
        Ok(words.join(" "))
    }

    fn int(&self, k: usize) -> Option<usize> {
        match self.peek_at(k) {
            Some(Lex::Word(w)) if w.chars().all(|c| c.is_ascii_digit()) => w.parse().ok(),
            _ => None,
        }
    }

    // coordinate expressions: not > and > or

    fn coord(&mut self) -> PResult<CoordExpr> {
        let mut l = self.coord_and()?;
        while self.eat_word("or") {
            let r = self.coord_and()?;
            l = CoordExpr::or(l, r);
        }
        Ok(l)
    }

    fn coord_and(&mut self) -> PResult<CoordExpr> {
        let mut l = self.coord_not()?;
        while self.eat_word("and") {
            let r = self.coord_not()?;
            l = CoordExpr::and(l, r);
        }
        Ok(l)
    }

    fn coord_not(&mut self) -> PResult<CoordExpr> {
        if self.eat_word("not") {
            return Ok(CoordExpr::not(self.coord_not()?));
        }
        self.coord_primary()
    }

    fn coord_primary(&mut self) -> PResult<CoordExpr> {
        match self.peek().cloned() {
            Some(Lex::Lt) => {
                self.at += 1;
                let nav = self.nav()?;
                self.expect(Lex::Gt, "`>`")?;
                Ok(CoordExpr::exists(nav))
            }
            Some(Lex::LParen) => {
                if let (Some(k), Some(Lex::Comma), Some(l), Some(Lex::RParen)) =
                    (self.int(1), self.peek_at(2), self.int(3), self.peek_at(4))
                {
                    if k == 0 || l == 0 {
                        return Err(self.err("coordinates start at 1"));
                    }
                    self.at += 5;
                    return Ok(CoordExpr::At(k, l));
                }
                let save = self.at;
                if let Ok(nav) = self.nav() {
                    if !matches!(self.peek(), Some(Lex::RParen) | Some(Lex::Comma)) {
                        return self.finish_apply(nav);
                    }
                }
                self.at = save + 1;
                let e = self.coord()?;
                self.expect(Lex::RParen, "`)`")?;
                Ok(e)
            }
            Some(Lex::LBracket) => {
                let nav = self.nav()?;
                self.finish_apply(nav)
            }
            Some(Lex::Word(w)) => match w.as_str() {
                "root" => {
                    self.at += 1;
                    Ok(CoordExpr::Root)
                }
                "true" => {
                    self.at += 1;
                    Ok(CoordExpr::True)
                }
                "row" | "col" if self.peek_at(1) == Some(&Lex::LParen) => {
                    let is_row = w == "row";
                    self.at += 2;
                    if let (Some(k), Some(Lex::RParen)) = (self.int(0), self.peek_at(1)) {
                        if k == 0 {
                            return Err(self.err("row and column numbers start at 1"));
                        }
                        self.at += 2;
                        return Ok(if is_row {
                            CoordExpr::RowIndex(k)
                        } else {
                            CoordExpr::ColIndex(k)
                        });
                    }
                    let arg = self.coord()?;
                    self.expect(Lex::RParen, "`)`")?;
                    Ok(if is_row {
                        CoordExpr::Row(Box::new(arg))
                    } else {
                        CoordExpr::Col(Box::new(arg))
                    })
                }
                _ if AXES.contains(&w.as_str()) => {
                    let nav = self.nav()?;
                    self.finish_apply(nav)
                }
                _ if BOOL_KW.contains(&w.as_str()) => Err(self.err(format!("unexpected `{w}`"))),
                _ => Ok(CoordExpr::Token(self.name("token name")?)),
            },
            _ => Err(self.err(format!("expected a coordinate expression, found {}", self.describe()))),
        }
    }

    fn finish_apply(&mut self, nav: NavExpr) -> PResult<CoordExpr> {
        if self.eat(&Lex::LParen) {
            let arg = self.coord()?;
            self.expect(Lex::RParen, "`)`")?;
            Ok(CoordExpr::apply(nav, arg))
        } else {
            Ok(CoordExpr::apply(nav, CoordExpr::Root))
        }
    }

    // navigational expressions: postfix > concat > union

    fn nav(&mut self) -> PResult<NavExpr> {
        let mut l = self.nav_concat()?;
        while self.eat(&Lex::Pipe) {
            let r = self.nav_concat()?;
            l = NavExpr::union(l, r);
        }
        Ok(l)
    }

    fn nav_concat(&mut self) -> PResult<NavExpr> {
        let mut l = self.nav_postfix()?;
        loop {
            if self.eat(&Lex::Dot) {
                let r = self.nav_postfix()?;
                l = NavExpr::concat(l, r);
                continue;
            }
            let juxtaposed = match self.peek() {
                Some(Lex::LBracket) => true,
                Some(Lex::Word(w)) => AXES.contains(&w.as_str()),
                _ => false,
            };
            if !juxtaposed {
                return Ok(l);
            }
            let r = self.nav_postfix()?;
            l = NavExpr::concat(l, r);
        }
    }

    fn nav_postfix(&mut self) -> PResult<NavExpr> {
        let mut a = self.nav_atom()?;
        loop {
            a = match self.peek() {
                Some(Lex::Star) => NavExpr::star(a),
                Some(Lex::Plus) => NavExpr::plus(a),
                Some(Lex::Question) => NavExpr::opt(a),
                _ => return Ok(a),
            };
            self.at += 1;
        }
    }

    fn nav_atom(&mut self) -> PResult<NavExpr> {
        let a = match self.peek() {
            Some(Lex::Word(w)) => match w.as_str() {
                "up" => NavExpr::Up,
                "down" => NavExpr::Down,
                "left" => NavExpr::Left,
                "right" => NavExpr::Right,
                "eps" => NavExpr::Epsilon,
                _ => return Err(self.err(format!("expected a navigation axis, found `{w}`"))),
            },
            Some(Lex::LBracket) => {
                self.at += 1;
                let c = self.coord()?;
                self.expect(Lex::RBracket, "`]`")?;
                return Ok(NavExpr::filter(c));
            }
            Some(Lex::LParen) => {
                self.at += 1;
                let n = self.nav()?;
                self.expect(Lex::RParen, "`)`")?;
                return Ok(n);
            }
            _ => return Err(self.err(format!("expected a navigational expression, found {}", self.describe()))),
        };
        self.at += 1;
        Ok(a)
    }

    // content expressions: postfix > `,` > `|`

    fn content(&mut self) -> PResult<ContentExpr> {
        let mut alts = vec![self.content_concat()?];
        while self.eat(&Lex::Pipe) {
            alts.push(self.content_concat()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            ContentExpr::Alt(alts)
        })
    }

    fn content_concat(&mut self) -> PResult<ContentExpr> {
        let mut items = vec![self.content_postfix()?];
        while self.eat(&Lex::Comma) {
            items.push(self.content_postfix()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            ContentExpr::Concat(items)
        })
    }

    fn content_postfix(&mut self) -> PResult<ContentExpr> {
        let mut a = self.content_atom()?;
        loop {
            a = match self.peek() {
                Some(Lex::Star) => ContentExpr::Star(Box::new(a)),
                Some(Lex::Plus) => ContentExpr::Plus(Box::new(a)),
                Some(Lex::Question) => ContentExpr::Opt(Box::new(a)),
                _ => return Ok(a),
            };
            self.at += 1;
        }
    }

    fn content_atom(&mut self) -> PResult<ContentExpr> {
        match self.peek() {
            Some(Lex::LParen) => {
                self.at += 1;
                if self.eat(&Lex::RParen) {
                    return Ok(ContentExpr::Epsilon);
                }
                let e = self.content()?;
                self.expect(Lex::RParen, "`)`")?;
                Ok(e)
            }
            Some(Lex::Word(_)) => {
                let name = self.name("token name")?;
                Ok(match name.as_str() {
                    "Null" => ContentExpr::Null,
                    "True" => ContentExpr::Any,
                    _ => ContentExpr::Token(name),
                })
            }
            _ => Err(self.err(format!("expected a content expression, found {}", self.describe()))),
        }
    }
}

fn lex_text(l: &Lex) -> &str {
    match l {
        Lex::Word(w) => w,
        Lex::LParen => "(",
        Lex::RParen => ")",
        Lex::LBracket => "[",
        Lex::RBracket => "]",
        Lex::Lt => "<",
        Lex::Gt => ">",
        Lex::Comma => ",",
        Lex::Pipe => "|",
        Lex::Dot => ".",
        Lex::Star => "*",
        Lex::Plus => "+",
        Lex::Question => "?",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r#"Col Delim = ,
Row Delim = \n


Timestamp = [0-9]{4}"."[0-9]{2}
Temperature = (-)?[0-9]{2}"."[0-9]{2}
ARUA = ARUA
BOMBO = BOMBO
ENTEBBE AIR = ENTEBBE AIR


row(1) -> Empty, ARUA, BOMBO, ENTEBBE AIR
col(1) -> Empty | Timestamp
col(ARUA) -> Temperature
col(BOMBO) -> Temperature
col(ENTEBBE AIR) -> Temperature
"#;

    #[test]
    fn climate_schema() {
        let doc = parse_schema(FIG2).unwrap();
        assert_eq!(doc.rules.len(), 5);
        assert_eq!(doc.tokens.iter().filter(|t| !t.implicit).count(), 5);
        assert_eq!(doc.delims, Delimiters::default());
        assert_eq!(
            doc.rules[0].content,
            ContentExpr::Concat(vec![
                ContentExpr::token("Empty"),
                ContentExpr::token("ARUA"),
                ContentExpr::token("BOMBO"),
                ContentExpr::token("ENTEBBE AIR"),
            ])
        );
        assert_eq!(doc.rules[1].selector, CoordExpr::ColIndex(1));
        assert_eq!(
            doc.rules[4].selector,
            CoordExpr::Col(Box::new(CoordExpr::token("ENTEBBE AIR")))
        );
    }

    #[test]
    fn empty_schema() {
        let doc = parse_schema("").unwrap();
        assert!(doc.rules.is_empty() && doc.tokens.is_empty());
        assert_eq!(doc.delims, Delimiters::default());
    }

    #[test]
    fn continuation_line() {
        let doc = parse_schema("down+(right*(provenance)) \n         -> (prov-book, prov-pos*, prov-node?)*\n").unwrap();
        assert_eq!(
            doc.rules[0].selector,
            CoordExpr::apply(
                NavExpr::plus(NavExpr::Down),
                CoordExpr::apply(NavExpr::star(NavExpr::Right), CoordExpr::token("provenance"))
            )
        );
        let doc = parse_schema("col(1) => HEADER, TITLE*, dots,\n   ATOM*\nrow(1) -> a").unwrap();
        assert_eq!(doc.rules.len(), 2);
        let doc = parse_schema("R <= \n  down*[dots].down[REMARK]\n").unwrap();
        assert_eq!(doc.token_types.len(), 1);
    }

    #[test]
    fn nav_precedence_and_juxtaposition() {
        let e = parse_nav_expr("down*[dots].down[REMARK].down.(down[REMARK])*").unwrap();
        let dotted = parse_nav_expr("down*.[dots].down.[REMARK].down.(down.[REMARK])*").unwrap();
        assert_eq!(e, dotted);
        assert_eq!(
            parse_nav_expr("down|right.up*").unwrap(),
            NavExpr::union(NavExpr::Down, NavExpr::concat(NavExpr::Right, NavExpr::star(NavExpr::Up)))
        );
    }

    #[test]
    fn coord_forms() {
        assert_eq!(parse_coord_expr("(2,3)").unwrap(), CoordExpr::At(2, 3));
        assert_eq!(
            parse_coord_expr("col((2,2))").unwrap(),
            CoordExpr::Col(Box::new(CoordExpr::At(2, 2)))
        );
        assert_eq!(
            parse_coord_expr("right+(root) and not (up*(dummy))").unwrap(),
            CoordExpr::and(
                CoordExpr::apply(NavExpr::plus(NavExpr::Right), CoordExpr::Root),
                CoordExpr::not(CoordExpr::apply(NavExpr::star(NavExpr::Up), CoordExpr::token("dummy")))
            )
        );
        assert_eq!(
            parse_coord_expr("a or b and not c").unwrap(),
            CoordExpr::or(
                CoordExpr::token("a"),
                CoordExpr::and(CoordExpr::token("b"), CoordExpr::not(CoordExpr::token("c")))
            )
        );
        assert_eq!(
            parse_coord_expr("<right.[a]>").unwrap(),
            CoordExpr::exists(NavExpr::concat(NavExpr::Right, NavExpr::filter(CoordExpr::token("a"))))
        );
        assert_eq!(
            parse_coord_expr("(a or b)").unwrap(),
            CoordExpr::or(CoordExpr::token("a"), CoordExpr::token("b"))
        );
        assert_eq!(
            parse_coord_expr("(down)(x)").unwrap(),
            CoordExpr::apply(NavExpr::Down, CoordExpr::token("x"))
        );
        assert_eq!(
            parse_coord_expr("right*").unwrap(),
            CoordExpr::apply(NavExpr::star(NavExpr::Right), CoordExpr::Root)
        );
        assert_eq!(
            parse_coord_expr("ENTEBBE AIR and x").unwrap(),
            CoordExpr::and(CoordExpr::token("ENTEBBE AIR"), CoordExpr::token("x"))
        );
    }

    #[test]
    fn errors_have_positions() {
        match parse_schema("a = x\ncol(a -> b\n") {
            Err(SchemaError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_schema("row(1) -> a,,b") {
            Err(SchemaError::Syntax { line: 1, column, .. }) => assert_eq!(column, 13),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_schema("a = x\na = y"), Err(SchemaError::DuplicateName(_))));
        assert!(matches!(parse_schema("String = x"), Err(SchemaError::DuplicateName(_))));
        assert!(matches!(parse_schema("root = x"), Err(SchemaError::ReservedName(_))));
        assert!(matches!(
            parse_schema("List Delim = ;"),
            Err(SchemaError::Unsupported { .. })
        ));
        assert!(parse_schema("just words").is_err());
    }

    #[test]
    fn implicit_tokens() {
        let doc = parse_schema("row(1) -> GeoID, GeoArea").unwrap();
        let names: Vec<_> = doc.tokens.iter().map(|t| (t.name.as_str(), t.implicit)).collect();
        assert_eq!(names, [("GeoID", true), ("GeoArea", true)]);
        let strict = ParseOptions {
            auto_literal_tokens: false,
        };
        assert!(matches!(
            parse_schema_with("row(1) -> GeoID", &strict),
            Err(SchemaError::UndefinedToken(n)) if n == "GeoID"
        ));
    }

    #[test]
    fn delimiters_and_uniques() {
        let doc = parse_schema("Col Delim = ;\nRow Delim = \"|\"\nunique(a, b)\nunique-per-row(c)\n").unwrap();
        assert_eq!(doc.delims, Delimiters::new('|', ';').unwrap());
        assert_eq!(doc.uniques, ["a", "b"]);
        assert_eq!(doc.uniques_per_row, ["c"]);
        assert!(parse_schema("Col Delim = \\n").is_err());
    }

    #[test]
    fn content_forms() {
        assert_eq!(
            parse_content_expr("name, Null, Null").unwrap(),
            ContentExpr::Concat(vec![ContentExpr::token("name"), ContentExpr::Null, ContentExpr::Null])
        );
        assert_eq!(
            parse_content_expr("word | rdf-id").unwrap(),
            ContentExpr::Alt(vec![ContentExpr::token("word"), ContentExpr::token("rdf-id")])
        );
        assert_eq!(parse_content_expr("()").unwrap(), ContentExpr::Epsilon);
        assert_eq!(
            parse_content_expr("True*").unwrap(),
            ContentExpr::Star(Box::new(ContentExpr::Any))
        );
    }
}

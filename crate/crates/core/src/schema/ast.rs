use crate::table::Delimiters;

/// Coordinate expressions. The last five variants are surface sugar and are
/// removed by [`desugar`](crate::schema::desugar).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoordExpr {
    Token(String),
    Root,
    True,
    Or(Box<CoordExpr>, Box<CoordExpr>),
    And(Box<CoordExpr>, Box<CoordExpr>),
    Not(Box<CoordExpr>),
    Exists(Box<NavExpr>),
    Apply(Box<NavExpr>, Box<CoordExpr>),
    /// Absolute coordinate `(k,l)`.
    At(usize, usize),
    /// `row(k)` with an integer argument.
    RowIndex(usize),
    /// `col(l)` with an integer argument.
    ColIndex(usize),
    /// `row(phi)`: cells strictly right of phi.
    Row(Box<CoordExpr>),
    /// `col(phi)`: cells strictly below phi.
    Col(Box<CoordExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NavExpr {
    Epsilon,
    Up,
    Down,
    Left,
    Right,
    Filter(Box<CoordExpr>),
    Concat(Box<NavExpr>, Box<NavExpr>),
    Union(Box<NavExpr>, Box<NavExpr>),
    Star(Box<NavExpr>),
    Plus(Box<NavExpr>),
    Opt(Box<NavExpr>),
}

/// Regular expression over token names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ContentExpr {
    /// Matches only the empty sequence.
    Epsilon,
    Token(String),
    /// The padding marker.
    Null,
    /// Any single cell, padding included.
    Any,
    Concat(Vec<ContentExpr>),
    Alt(Vec<ContentExpr>),
    Star(Box<ContentExpr>),
    Plus(Box<ContentExpr>),
    Opt(Box<ContentExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// `->`: each row of the region matches separately.
    RowBased,
    /// `=>`: the whole region matches as one sequence.
    RegionBased,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub selector: CoordExpr,
    pub content: ContentExpr,
    pub semantics: Semantics,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenDecl {
    pub name: String,
    pub regex: String,
    /// Auto-defined literal for a name used without a definition.
    pub implicit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenType {
    pub name: String,
    pub body: CoordExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchemaDoc {
    pub delims: Delimiters,
    pub tokens: Vec<TokenDecl>,
    pub token_types: Vec<TokenType>,
    pub uniques: Vec<String>,
    pub uniques_per_row: Vec<String>,
    pub rules: Vec<Rule>,
}

impl SchemaDoc {
    /// Token definitions in declaration order, implicit literals included.
    pub fn token_defs(&self) -> Result<crate::tokens::TokenDefs, crate::error::SchemaError> {
        let defs: Vec<(&str, &str)> = self
            .tokens
            .iter()
            .map(|t| (t.name.as_str(), t.regex.as_str()))
            .collect();
        crate::tokens::TokenDefs::new(&defs)
    }

    pub fn is_unique(&self, name: &str) -> bool {
        self.uniques.iter().any(|u| u == name)
    }

    pub fn is_unique_per_row(&self, name: &str) -> bool {
        self.uniques_per_row.iter().any(|u| u == name)
    }
}

// shorthand constructors, mostly for tests
impl CoordExpr {
    pub fn token(name: &str) -> Self {
        CoordExpr::Token(name.to_string())
    }
    pub fn or(a: CoordExpr, b: CoordExpr) -> Self {
        CoordExpr::Or(Box::new(a), Box::new(b))
    }
    pub fn and(a: CoordExpr, b: CoordExpr) -> Self {
        CoordExpr::And(Box::new(a), Box::new(b))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: CoordExpr) -> Self {
        CoordExpr::Not(Box::new(a))
    }
    pub fn exists(a: NavExpr) -> Self {
        CoordExpr::Exists(Box::new(a))
    }
    pub fn apply(a: NavExpr, b: CoordExpr) -> Self {
        CoordExpr::Apply(Box::new(a), Box::new(b))
    }

    /// Number of AST nodes, counting navigational subterms.
    pub fn size(&self) -> usize {
        match self {
            CoordExpr::Token(_)
            | CoordExpr::Root
            | CoordExpr::True
            | CoordExpr::At(..)
            | CoordExpr::RowIndex(_)
            | CoordExpr::ColIndex(_) => 1,
            CoordExpr::Or(a, b) | CoordExpr::And(a, b) => 1 + a.size() + b.size(),
            CoordExpr::Not(a) | CoordExpr::Row(a) | CoordExpr::Col(a) => 1 + a.size(),
            CoordExpr::Exists(a) => 1 + a.size(),
            CoordExpr::Apply(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn is_core(&self) -> bool {
        match self {
            CoordExpr::Token(_) | CoordExpr::Root | CoordExpr::True => true,
            CoordExpr::Or(a, b) | CoordExpr::And(a, b) => a.is_core() && b.is_core(),
            CoordExpr::Not(a) => a.is_core(),
            CoordExpr::Exists(a) => a.is_core(),
            CoordExpr::Apply(a, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }

    /// Every token name mentioned, in first-occurrence order.
    pub fn token_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens(&self, out: &mut Vec<String>) {
        match self {
            CoordExpr::Token(n) => {
                if !out.contains(n) {
                    out.push(n.clone())
                }
            }
            CoordExpr::Or(a, b) | CoordExpr::And(a, b) => {
                a.collect_tokens(out);
                b.collect_tokens(out);
            }
            CoordExpr::Not(a) | CoordExpr::Row(a) | CoordExpr::Col(a) => a.collect_tokens(out),
            CoordExpr::Exists(a) => a.collect_tokens(out),
            CoordExpr::Apply(a, b) => {
                a.collect_tokens(out);
                b.collect_tokens(out);
            }
            _ => {}
        }
    }
}

impl NavExpr {
    pub fn filter(a: CoordExpr) -> Self {
        NavExpr::Filter(Box::new(a))
    }
    pub fn concat(a: NavExpr, b: NavExpr) -> Self {
        NavExpr::Concat(Box::new(a), Box::new(b))
    }
    pub fn union(a: NavExpr, b: NavExpr) -> Self {
        NavExpr::Union(Box::new(a), Box::new(b))
    }
    pub fn star(a: NavExpr) -> Self {
        NavExpr::Star(Box::new(a))
    }
    pub fn plus(a: NavExpr) -> Self {
        NavExpr::Plus(Box::new(a))
    }
    pub fn opt(a: NavExpr) -> Self {
        NavExpr::Opt(Box::new(a))
    }

    pub fn size(&self) -> usize {
        match self {
            NavExpr::Epsilon | NavExpr::Up | NavExpr::Down | NavExpr::Left | NavExpr::Right => 1,
            NavExpr::Filter(c) => 1 + c.size(),
            NavExpr::Concat(a, b) | NavExpr::Union(a, b) => 1 + a.size() + b.size(),
            NavExpr::Star(a) | NavExpr::Plus(a) | NavExpr::Opt(a) => 1 + a.size(),
        }
    }

    pub fn is_core(&self) -> bool {
        match self {
            NavExpr::Plus(_) | NavExpr::Opt(_) => false,
            NavExpr::Filter(c) => c.is_core(),
            NavExpr::Concat(a, b) | NavExpr::Union(a, b) => a.is_core() && b.is_core(),
            NavExpr::Star(a) => a.is_core(),
            _ => true,
        }
    }

    /// True if the down axis occurs outside of filters.
    pub fn moves_down(&self) -> bool {
        match self {
            NavExpr::Down => true,
            NavExpr::Concat(a, b) | NavExpr::Union(a, b) => a.moves_down() || b.moves_down(),
            NavExpr::Star(a) | NavExpr::Plus(a) | NavExpr::Opt(a) => a.moves_down(),
            _ => false,
        }
    }

    /// True if a starred subexpression moves down.
    pub fn moves_down_repeatedly(&self) -> bool {
        match self {
            NavExpr::Star(a) | NavExpr::Plus(a) => a.moves_down(),
            NavExpr::Concat(a, b) | NavExpr::Union(a, b) => {
                a.moves_down_repeatedly() || b.moves_down_repeatedly()
            }
            NavExpr::Opt(a) => a.moves_down_repeatedly(),
            _ => false,
        }
    }

    fn collect_tokens(&self, out: &mut Vec<String>) {
        match self {
            NavExpr::Filter(c) => c.collect_tokens(out),
            NavExpr::Concat(a, b) | NavExpr::Union(a, b) => {
                a.collect_tokens(out);
                b.collect_tokens(out);
            }
            NavExpr::Star(a) | NavExpr::Plus(a) | NavExpr::Opt(a) => a.collect_tokens(out),
            _ => {}
        }
    }
}

impl ContentExpr {
    pub fn token(name: &str) -> Self {
        ContentExpr::Token(name.to_string())
    }

    pub fn size(&self) -> usize {
        match self {
            ContentExpr::Epsilon | ContentExpr::Token(_) | ContentExpr::Null | ContentExpr::Any => 1,
            ContentExpr::Concat(v) | ContentExpr::Alt(v) => 1 + v.iter().map(Self::size).sum::<usize>(),
            ContentExpr::Star(a) | ContentExpr::Plus(a) | ContentExpr::Opt(a) => 1 + a.size(),
        }
    }

    pub fn token_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens(&self, out: &mut Vec<String>) {
        match self {
            ContentExpr::Token(n) => {
                if !out.contains(n) {
                    out.push(n.clone())
                }
            }
            ContentExpr::Concat(v) | ContentExpr::Alt(v) => v.iter().for_each(|e| e.collect_tokens(out)),
            ContentExpr::Star(a) | ContentExpr::Plus(a) | ContentExpr::Opt(a) => a.collect_tokens(out),
            _ => {}
        }
    }
}

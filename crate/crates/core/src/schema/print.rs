//! Concrete syntax printing. Output reparses to the same tree.

use std::fmt::{self, Display, Formatter, Write};

use crate::schema::ast::*;

fn coord(e: &CoordExpr, prec: u8, f: &mut Formatter<'_>) -> fmt::Result {
    match e {
        CoordExpr::Or(a, b) => {
            let wrap = prec > 0;
            open(wrap, f)?;
            coord(a, 0, f)?;
            f.write_str(" or ")?;
            coord(b, 1, f)?;
            close(wrap, f)
        }
        CoordExpr::And(a, b) => {
            let wrap = prec > 1;
            open(wrap, f)?;
            coord(a, 1, f)?;
            f.write_str(" and ")?;
            coord(b, 2, f)?;
            close(wrap, f)
        }
        CoordExpr::Not(a) => {
            f.write_str("not ")?;
            coord(a, 2, f)
        }
        CoordExpr::Token(n) => f.write_str(n),
        CoordExpr::Root => f.write_str("root"),
        CoordExpr::True => f.write_str("true"),
        CoordExpr::Exists(a) => {
            f.write_char('<')?;
            nav(a, 0, f)?;
            f.write_char('>')
        }
        CoordExpr::Apply(a, c) => {
            nav(a, 0, f)?;
            f.write_char('(')?;
            coord(c, 0, f)?;
            f.write_char(')')
        }
        CoordExpr::At(k, l) => write!(f, "({k},{l})"),
        CoordExpr::RowIndex(k) => write!(f, "row({k})"),
        CoordExpr::ColIndex(l) => write!(f, "col({l})"),
        CoordExpr::Row(c) | CoordExpr::Col(c) => {
            f.write_str(if matches!(e, CoordExpr::Row(_)) { "row(" } else { "col(" })?;
            coord(c, 0, f)?;
            f.write_char(')')
        }
    }
}

fn nav(e: &NavExpr, prec: u8, f: &mut Formatter<'_>) -> fmt::Result {
    match e {
        NavExpr::Union(a, b) => {
            let wrap = prec > 0;
            open(wrap, f)?;
            nav(a, 0, f)?;
            f.write_char('|')?;
            nav(b, 1, f)?;
            close(wrap, f)
        }
        NavExpr::Concat(a, b) => {
            let wrap = prec > 1;
            open(wrap, f)?;
            nav(a, 1, f)?;
            f.write_char('.')?;
            nav(b, 2, f)?;
            close(wrap, f)
        }
        NavExpr::Star(a) | NavExpr::Plus(a) | NavExpr::Opt(a) => {
            nav(a, 2, f)?;
            f.write_char(match e {
                NavExpr::Star(_) => '*',
                NavExpr::Plus(_) => '+',
                _ => '?',
            })
        }
        NavExpr::Filter(c) => {
            f.write_char('[')?;
            coord(c, 0, f)?;
            f.write_char(']')
        }
        NavExpr::Epsilon => f.write_str("eps"),
        NavExpr::Up => f.write_str("up"),
        NavExpr::Down => f.write_str("down"),
        NavExpr::Left => f.write_str("left"),
        NavExpr::Right => f.write_str("right"),
    }
}

fn content(e: &ContentExpr, prec: u8, f: &mut Formatter<'_>) -> fmt::Result {
    match e {
        ContentExpr::Alt(items) => {
            let wrap = prec > 0;
            open(wrap, f)?;
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(" | ")?;
                }
                content(x, 1, f)?;
            }
            close(wrap, f)
        }
        ContentExpr::Concat(items) => {
            let wrap = prec > 1;
            open(wrap, f)?;
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                content(x, 2, f)?;
            }
            close(wrap, f)
        }
        ContentExpr::Star(a) | ContentExpr::Plus(a) | ContentExpr::Opt(a) => {
            content(a, 2, f)?;
            f.write_char(match e {
                ContentExpr::Star(_) => '*',
                ContentExpr::Plus(_) => '+',
                _ => '?',
            })
        }
        ContentExpr::Epsilon => f.write_str("()"),
        ContentExpr::Token(n) => f.write_str(n),
        ContentExpr::Null => f.write_str("Null"),
        ContentExpr::Any => f.write_str("True"),
    }
}

fn open(wrap: bool, f: &mut Formatter<'_>) -> fmt::Result {
    if wrap {
        f.write_char('(')?;
    }
    Ok(())
}

fn close(wrap: bool, f: &mut Formatter<'_>) -> fmt::Result {
    if wrap {
        f.write_char(')')?;
    }
    Ok(())
}

impl Display for CoordExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        coord(self, 0, f)
    }
}

impl Display for NavExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        nav(self, 0, f)
    }
}

impl Display for ContentExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        content(self, 0, f)
    }
}

impl Display for Rule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let arrow = match self.semantics {
            Semantics::RowBased => "->",
            Semantics::RegionBased => "=>",
        };
        write!(f, "{} {} {}", self.selector, arrow, self.content)
    }
}

fn delim(c: char) -> String {
    match c {
        '\n' => "\\n".into(),
        '\t' => "\\t".into(),
        '\r' => "\\r".into(),
        ' ' => "\\s".into(),
        '\\' => "\\\\".into(),
        c => c.to_string(),
    }
}

impl Display for SchemaDoc {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "Col Delim = {}", delim(self.delims.col()))?;
        writeln!(f, "Row Delim = {}", delim(self.delims.row()))?;
        let explicit: Vec<_> = self.tokens.iter().filter(|t| !t.implicit).collect();
        if !explicit.is_empty() {
            writeln!(f)?;
            for t in explicit {
                writeln!(f, "{} = {}", t.name, t.regex)?;
            }
        }
        if !self.token_types.is_empty() {
            writeln!(f)?;
            for t in &self.token_types {
                writeln!(f, "{} <= {}", t.name, t.body)?;
            }
        }
        if !self.uniques.is_empty() || !self.uniques_per_row.is_empty() {
            writeln!(f)?;
            for u in &self.uniques {
                writeln!(f, "unique({u})")?;
            }
            for u in &self.uniques_per_row {
                writeln!(f, "unique-per-row({u})")?;
            }
        }
        if !self.rules.is_empty() {
            writeln!(f)?;
            for r in &self.rules {
                writeln!(f, "{r}")?;
            }
        }
        Ok(())
    }
}

//! Rewrites surface forms into core expressions and inlines token types.

use std::collections::HashMap;

use crate::error::SchemaError;
use crate::schema::ast::*;

/// Core-only copy of `doc`. Token type bodies are desugared and inlined into
/// every rule, so the result never mentions a type name outside its own
/// declaration.
pub fn desugar(doc: &SchemaDoc) -> Result<SchemaDoc, SchemaError> {
    let types = resolve_types(&doc.token_types)?;
    let mut out = doc.clone();
    for t in &mut out.token_types {
        t.body = types[&t.name].clone();
    }
    for r in &mut out.rules {
        r.selector = desugar_coord(&r.selector, &types);
    }
    Ok(out)
}

fn resolve_types(types: &[TokenType]) -> Result<HashMap<String, CoordExpr>, SchemaError> {
    let bodies: HashMap<&str, &CoordExpr> = types.iter().map(|t| (t.name.as_str(), &t.body)).collect();
    let mut done: HashMap<String, CoordExpr> = HashMap::new();
    fn visit(
        name: &str,
        bodies: &HashMap<&str, &CoordExpr>,
        done: &mut HashMap<String, CoordExpr>,
        stack: &mut Vec<String>,
    ) -> Result<(), SchemaError> {
        if done.contains_key(name) {
            return Ok(());
        }
        if stack.iter().any(|s| s == name) {
            return Err(SchemaError::RecursiveTokenType(name.to_string()));
        }
        stack.push(name.to_string());
        for dep in bodies[name].token_names() {
            if bodies.contains_key(dep.as_str()) {
                visit(&dep, bodies, done, stack)?;
            }
        }
        stack.pop();
        let e = desugar_coord(bodies[name], done);
        done.insert(name.to_string(), e);
        Ok(())
    }
    for t in types {
        visit(&t.name, &bodies, &mut done, &mut Vec::new())?;
    }
    Ok(done)
}

fn chain(axis: NavExpr, count: usize, tail: Option<NavExpr>) -> Option<NavExpr> {
    let mut acc = tail;
    // build left to right so (3,1) reads down.down
    for _ in 0..count {
        acc = Some(match acc {
            None => axis.clone(),
            Some(a) => NavExpr::concat(a, axis.clone()),
        });
    }
    acc
}

/// `down^(k-1).right^(l-1)(root)`, or plain `root` for (1,1).
pub fn absolute(k: usize, l: usize) -> CoordExpr {
    let downs = chain(NavExpr::Down, k - 1, None);
    match chain(NavExpr::Right, l - 1, downs) {
        None => CoordExpr::Root,
        Some(nav) => CoordExpr::apply(nav, CoordExpr::Root),
    }
}

pub fn desugar_coord(e: &CoordExpr, types: &HashMap<String, CoordExpr>) -> CoordExpr {
    let d = |x: &CoordExpr| desugar_coord(x, types);
    match e {
        CoordExpr::Token(n) => types.get(n).cloned().unwrap_or_else(|| e.clone()),
        CoordExpr::Root | CoordExpr::True => e.clone(),
        CoordExpr::Or(a, b) => CoordExpr::or(d(a), d(b)),
        CoordExpr::And(a, b) => CoordExpr::and(d(a), d(b)),
        CoordExpr::Not(a) => CoordExpr::not(d(a)),
        CoordExpr::Exists(a) => CoordExpr::exists(desugar_nav(a, types)),
        CoordExpr::Apply(a, c) => CoordExpr::apply(desugar_nav(a, types), d(c)),
        CoordExpr::At(k, l) => absolute(*k, *l),
        CoordExpr::RowIndex(k) => CoordExpr::apply(NavExpr::star(NavExpr::Right), absolute(*k, 1)),
        CoordExpr::ColIndex(l) => CoordExpr::apply(NavExpr::star(NavExpr::Down), absolute(1, *l)),
        CoordExpr::Row(c) => CoordExpr::apply(plus(NavExpr::Right), d(c)),
        CoordExpr::Col(c) => CoordExpr::apply(plus(NavExpr::Down), d(c)),
    }
}

fn plus(a: NavExpr) -> NavExpr {
    NavExpr::concat(a.clone(), NavExpr::star(a))
}

pub fn desugar_nav(e: &NavExpr, types: &HashMap<String, CoordExpr>) -> NavExpr {
    let d = |x: &NavExpr| desugar_nav(x, types);
    match e {
        NavExpr::Epsilon | NavExpr::Up | NavExpr::Down | NavExpr::Left | NavExpr::Right => e.clone(),
        NavExpr::Filter(c) => NavExpr::filter(desugar_coord(c, types)),
        NavExpr::Concat(a, b) => NavExpr::concat(d(a), d(b)),
        NavExpr::Union(a, b) => NavExpr::union(d(a), d(b)),
        NavExpr::Star(a) => NavExpr::star(d(a)),
        NavExpr::Plus(a) => plus(d(a)),
        NavExpr::Opt(a) => NavExpr::union(d(a), NavExpr::Epsilon),
    }
}

/// Desugars a lone expression with no token types in scope.
pub fn core(e: &CoordExpr) -> CoordExpr {
    desugar_coord(e, &HashMap::new())
}

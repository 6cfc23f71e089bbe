//! Fragment analysis: forwardness, levels, and (row-)guardedness.

use std::collections::HashSet;
use std::fmt;

use crate::schema::ast::{CoordExpr, NavExpr, SchemaDoc};
use crate::schema::desugar;

/// Why an expression is not forward, naming the first offending operator.
pub fn non_forward_reason(e: &CoordExpr) -> Option<String> {
    let e = desugar::core(e);
    coord_reason(&e)
}

fn coord_reason(e: &CoordExpr) -> Option<String> {
    match e {
        CoordExpr::Exists(a) => Some(format!("existential test <{a}>")),
        CoordExpr::Or(a, b) | CoordExpr::And(a, b) => coord_reason(a).or_else(|| coord_reason(b)),
        CoordExpr::Not(a) => coord_reason(a),
        CoordExpr::Apply(n, c) => nav_reason(n).or_else(|| coord_reason(c)),
        _ => None,
    }
}

fn nav_reason(e: &NavExpr) -> Option<String> {
    match e {
        NavExpr::Up => Some("axis `up`".into()),
        NavExpr::Left => Some("axis `left`".into()),
        NavExpr::Filter(c) => coord_reason(c),
        NavExpr::Concat(a, b) | NavExpr::Union(a, b) => nav_reason(a).or_else(|| nav_reason(b)),
        NavExpr::Star(a) | NavExpr::Plus(a) | NavExpr::Opt(a) => nav_reason(a),
        _ => None,
    }
}

/// No existential tests and no `up` or `left`, filters included.
pub fn is_forward(e: &CoordExpr) -> bool {
    non_forward_reason(e).is_none()
}

pub fn is_forward_nav(e: &NavExpr) -> bool {
    nav_reason(&desugar::desugar_nav(e, &Default::default())).is_none()
}

/// Nesting depth of filters and applications. `<a>` counts like a filter,
/// though it only matters for diagnostics since it is never forward.
pub fn level(e: &CoordExpr) -> usize {
    coord_level(&desugar::core(e))
}

pub fn level_nav(e: &NavExpr) -> usize {
    nav_level(&desugar::desugar_nav(e, &Default::default()))
}

fn coord_level(e: &CoordExpr) -> usize {
    match e {
        CoordExpr::Or(a, b) | CoordExpr::And(a, b) => coord_level(a).max(coord_level(b)),
        CoordExpr::Not(a) => coord_level(a),
        CoordExpr::Exists(a) => 1 + nav_level(a),
        CoordExpr::Apply(n, c) => 1 + nav_level(n).max(coord_level(c)),
        _ => 0,
    }
}

fn nav_level(e: &NavExpr) -> usize {
    match e {
        NavExpr::Filter(c) => 1 + coord_level(c),
        NavExpr::Concat(a, b) | NavExpr::Union(a, b) => nav_level(a).max(nav_level(b)),
        NavExpr::Star(a) | NavExpr::Plus(a) | NavExpr::Opt(a) => nav_level(a),
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Verdict {
    pub guarded: bool,
    pub row_guarded: bool,
}

impl Verdict {
    const BOTH: Verdict = Verdict {
        guarded: true,
        row_guarded: true,
    };
    const NONE: Verdict = Verdict {
        guarded: false,
        row_guarded: false,
    };

    fn meet(self, o: Verdict) -> Verdict {
        Verdict {
            guarded: self.guarded && o.guarded,
            row_guarded: self.row_guarded && o.row_guarded,
        }
    }

    // every guarded expression is also row-guarded
    fn closed(self) -> Verdict {
        Verdict {
            guarded: self.guarded,
            row_guarded: self.row_guarded || self.guarded,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct GuardOptions {
    /// Read the `right*` closure case as yielding row-guarded only.
    pub strict_guard_text: bool,
}

struct Guards<'a> {
    unique: HashSet<&'a str>,
    per_row: HashSet<&'a str>,
    strict: bool,
}

fn nav_free(e: &CoordExpr) -> bool {
    match e {
        CoordExpr::Token(_) | CoordExpr::Root | CoordExpr::True => true,
        CoordExpr::Or(a, b) | CoordExpr::And(a, b) => nav_free(a) && nav_free(b),
        CoordExpr::Not(a) => nav_free(a),
        _ => false,
    }
}

impl Guards<'_> {
    fn coord(&self, e: &CoordExpr) -> Verdict {
        match e {
            CoordExpr::Token(a) => Verdict {
                guarded: self.unique.contains(a.as_str()),
                row_guarded: self.per_row.contains(a.as_str()),
            }
            .closed(),
            CoordExpr::Root | CoordExpr::True => Verdict::BOTH,
            CoordExpr::Or(a, b) | CoordExpr::And(a, b) => self.coord(a).meet(self.coord(b)),
            CoordExpr::Apply(n, c) => self.apply(n, self.coord(c), nav_free(c)),
            _ => Verdict::NONE,
        }
    }

    /// Verdict of `nav(x)` given the verdict of `x`.
    fn apply(&self, nav: &NavExpr, x: Verdict, x_nav_free: bool) -> Verdict {
        match nav {
            NavExpr::Epsilon | NavExpr::Down | NavExpr::Right => x,
            NavExpr::Concat(a, b) => self.apply(b, self.apply(a, x, x_nav_free), false),
            NavExpr::Union(a, b) => self.apply(a, x, x_nav_free).meet(self.apply(b, x, x_nav_free)),
            // ([psi])(x) is x and psi
            NavExpr::Filter(psi) => x.meet(self.coord(psi)),
            NavExpr::Star(inner) => match **inner {
                NavExpr::Right if x_nav_free => Verdict::BOTH,
                NavExpr::Right if x.row_guarded && self.strict => Verdict {
                    guarded: false,
                    row_guarded: true,
                },
                NavExpr::Right if x.row_guarded => Verdict::BOTH,
                NavExpr::Down if x.guarded => Verdict::BOTH,
                _ => Verdict::NONE,
            },
            _ => Verdict::NONE,
        }
    }
}

/// Verdict for one application subexpression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprVerdict {
    pub expr: String,
    pub verdict: Verdict,
    pub uses_down: bool,
    pub uses_down_star: bool,
}

impl ExprVerdict {
    pub fn ok(&self) -> bool {
        (!self.uses_down || self.verdict.row_guarded) && (!self.uses_down_star || self.verdict.guarded)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleAnalysis {
    pub forward: bool,
    pub guarded: bool,
    pub level: usize,
    pub reasons: Vec<String>,
    pub verdicts: Vec<ExprVerdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fragment {
    Full,
    Forward,
    GuardedForward,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::Full => "full",
            Fragment::Forward => "forward",
            Fragment::GuardedForward => "guarded-forward",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentReport {
    pub rules: Vec<RuleAnalysis>,
    pub fragment: Fragment,
}

impl FragmentReport {
    pub fn forward(&self) -> bool {
        self.fragment != Fragment::Full
    }

    pub fn guarded(&self) -> bool {
        self.fragment == Fragment::GuardedForward
    }

    /// First reason a stream engine would refuse the schema.
    pub fn first_reason(&self) -> Option<(usize, &str)> {
        self.rules
            .iter()
            .enumerate()
            .find_map(|(i, r)| r.reasons.first().map(|s| (i + 1, s.as_str())))
    }

    /// Lines printed by `sculpt analyze`.
    pub fn render(&self) -> String {
        let yn = |b: bool| if b { "y" } else { "n" };
        let mut s = String::new();
        for (i, r) in self.rules.iter().enumerate() {
            s.push_str(&format!(
                "rule {}: forward={} guarded={} level={}\n",
                i + 1,
                yn(r.forward),
                yn(r.guarded),
                r.level
            ));
        }
        s.push_str(&format!("schema: fragment={}\n", self.fragment));
        s
    }
}

fn collect_applies<'e>(e: &'e CoordExpr, out: &mut Vec<&'e CoordExpr>) {
    match e {
        CoordExpr::Or(a, b) | CoordExpr::And(a, b) => {
            collect_applies(a, out);
            collect_applies(b, out);
        }
        CoordExpr::Not(a) => collect_applies(a, out),
        CoordExpr::Apply(n, c) => {
            out.push(e);
            collect_nav_applies(n, out);
            collect_applies(c, out);
        }
        CoordExpr::Exists(n) => collect_nav_applies(n, out),
        _ => {}
    }
}

fn collect_nav_applies<'e>(e: &'e NavExpr, out: &mut Vec<&'e CoordExpr>) {
    match e {
        NavExpr::Filter(c) => collect_applies(c, out),
        NavExpr::Concat(a, b) | NavExpr::Union(a, b) => {
            collect_nav_applies(a, out);
            collect_nav_applies(b, out);
        }
        NavExpr::Star(a) | NavExpr::Plus(a) | NavExpr::Opt(a) => collect_nav_applies(a, out),
        _ => {}
    }
}

/// Classifies every rule of a schema. Token types are inlined first.
pub fn analyze(doc: &SchemaDoc, opts: &GuardOptions) -> FragmentReport {
    let core = desugar::desugar(doc).unwrap_or_else(|_| doc.clone());
    let g = Guards {
        unique: core.uniques.iter().map(String::as_str).collect(),
        per_row: core.uniques_per_row.iter().map(String::as_str).collect(),
        strict: opts.strict_guard_text,
    };
    let mut rules = Vec::new();
    for r in &core.rules {
        let sel = desugar::core(&r.selector);
        let mut reasons = Vec::new();
        let forward = match coord_reason(&sel) {
            Some(why) => {
                reasons.push(format!("not forward: uses {why}"));
                false
            }
            None => true,
        };
        let mut applies = Vec::new();
        collect_applies(&sel, &mut applies);
        let mut verdicts = Vec::new();
        for a in applies {
            let CoordExpr::Apply(n, _) = a else { unreachable!() };
            let v = ExprVerdict {
                expr: a.to_string(),
                verdict: g.coord(a),
                uses_down: n.moves_down(),
                uses_down_star: n.moves_down_repeatedly(),
            };
            if forward && !v.ok() {
                let need = if v.uses_down_star { "guarded" } else { "row-guarded" };
                reasons.push(format!("`{}` moves down but is not {need}", v.expr));
            }
            verdicts.push(v);
        }
        rules.push(RuleAnalysis {
            forward,
            guarded: forward && verdicts.iter().all(ExprVerdict::ok),
            level: coord_level(&sel),
            reasons,
            verdicts,
        });
    }
    let fragment = if rules.iter().any(|r| !r.forward) {
        Fragment::Full
    } else if rules.iter().all(|r| r.guarded) {
        Fragment::GuardedForward
    } else {
        Fragment::Forward
    };
    FragmentReport { rules, fragment }
}

/// Guardedness verdict of a single expression under the given declarations.
pub fn verdict(e: &CoordExpr, unique: &[&str], per_row: &[&str], opts: &GuardOptions) -> Verdict {
    let g = Guards {
        unique: unique.iter().copied().collect(),
        per_row: per_row.iter().copied().collect(),
        strict: opts.strict_guard_text,
    };
    g.coord(&desugar::core(e))
}

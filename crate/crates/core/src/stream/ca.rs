//! Coordinate automata: NFAs that walk the grid forward, one transition per
//! `right`, `down` or new-row step, with filters as oracle tests.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::FragmentError;
use crate::guard::{level, non_forward_reason};
use crate::schema::ast::{CoordExpr, NavExpr};
use crate::schema::desugar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Eps,
    /// Index into the automaton's oracle list.
    Filter(usize),
    Right,
    Down,
    NewRow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateAutomaton {
    pub states: usize,
    pub initial: usize,
    pub finals: FixedBitSet,
    pub transitions: Vec<(usize, Label, usize)>,
    /// Coordinate expressions tested by filter transitions.
    pub oracles: Vec<CoordExpr>,
}

impl CoordinateAutomaton {
    /// Highest level among the oracles.
    pub fn level(&self) -> usize {
        self.oracles.iter().map(level).max().unwrap_or(0)
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(q)
    }
}

impl fmt::Display for CoordinateAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let finals: Vec<String> = self.finals.ones().map(|q| q.to_string()).collect();
        writeln!(f, "states {} initial {} final {}", self.states, self.initial, finals.join(","))?;
        for &(p, l, q) in &self.transitions {
            let label = match l {
                Label::Eps => "eps".to_string(),
                Label::Filter(i) => format!("[{}]", self.oracles[i]),
                Label::Right => "right".into(),
                Label::Down => "down".into(),
                Label::NewRow => "newrow".into(),
            };
            writeln!(f, "  {p} -{label}-> {q}")?;
        }
        Ok(())
    }
}

struct Builder {
    states: usize,
    transitions: Vec<(usize, Label, usize)>,
    oracles: Vec<CoordExpr>,
}

struct Frag {
    start: usize,
    finals: Vec<usize>,
}

impl Builder {
    fn state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    fn oracle(&mut self, e: &CoordExpr) -> usize {
        match self.oracles.iter().position(|o| o == e) {
            Some(i) => i,
            None => {
                self.oracles.push(e.clone());
                self.oracles.len() - 1
            }
        }
    }

    fn edge(&mut self, label: Label) -> Frag {
        let (p, q) = (self.state(), self.state());
        self.transitions.push((p, label, q));
        Frag { start: p, finals: vec![q] }
    }

    fn nav(&mut self, e: &NavExpr) -> Frag {
        match e {
            NavExpr::Epsilon => {
                let s = self.state();
                Frag { start: s, finals: vec![s] }
            }
            NavExpr::Down => self.edge(Label::Down),
            NavExpr::Right => self.edge(Label::Right),
            NavExpr::Filter(c) => {
                let i = self.oracle(c);
                self.edge(Label::Filter(i))
            }
            NavExpr::Concat(a, b) => {
                let a = self.nav(a);
                let b = self.nav(b);
                for &f in &a.finals {
                    self.transitions.push((f, Label::Eps, b.start));
                }
                Frag {
                    start: a.start,
                    finals: b.finals,
                }
            }
            NavExpr::Union(a, b) => {
                let s = self.state();
                let a = self.nav(a);
                let b = self.nav(b);
                self.transitions.push((s, Label::Eps, a.start));
                self.transitions.push((s, Label::Eps, b.start));
                let mut finals = a.finals;
                finals.extend(b.finals);
                Frag { start: s, finals }
            }
            NavExpr::Star(a) => {
                // the new state is initial and final, so zero iterations are accepted
                let s = self.state();
                let a = self.nav(a);
                self.transitions.push((s, Label::Eps, a.start));
                for &f in &a.finals {
                    self.transitions.push((f, Label::Eps, s));
                }
                Frag { start: s, finals: vec![s] }
            }
            NavExpr::Up | NavExpr::Left | NavExpr::Plus(_) | NavExpr::Opt(_) => {
                unreachable!("checked forward and desugared")
            }
        }
    }

    fn finish(self, frag: Frag) -> CoordinateAutomaton {
        let mut finals = FixedBitSet::with_capacity(self.states);
        for f in frag.finals {
            finals.insert(f);
        }
        CoordinateAutomaton {
            states: self.states,
            initial: frag.start,
            finals,
            transitions: self.transitions,
            oracles: self.oracles,
        }
    }
}

fn nav_forward(alpha: &NavExpr) -> Result<NavExpr, FragmentError> {
    let alpha = desugar::desugar_nav(alpha, &Default::default());
    let probe = CoordExpr::apply(alpha.clone(), CoordExpr::True);
    match non_forward_reason(&probe) {
        Some(why) => Err(FragmentError::NotForward(why)),
        None => Ok(alpha),
    }
}

/// Thompson-style automaton for a forward navigation expression.
pub fn compile_nav_to_ca(alpha: &NavExpr) -> Result<CoordinateAutomaton, FragmentError> {
    let alpha = nav_forward(alpha)?;
    let mut b = Builder {
        states: 0,
        transitions: Vec::new(),
        oracles: Vec::new(),
    };
    let frag = b.nav(&alpha);
    Ok(b.finish(frag))
}

/// Automaton selecting the cells of `phi`, started at (1,1).
///
/// It scans the grid with `right` and new-row loops on its initial state,
/// then either tests `phi` directly or, for `alpha(psi)`, tests `psi` and
/// runs `alpha` from there.
pub fn compile_coord_to_ca(phi: &CoordExpr) -> Result<CoordinateAutomaton, FragmentError> {
    let phi = desugar::core(phi);
    if let Some(why) = non_forward_reason(&phi) {
        return Err(FragmentError::NotForward(why));
    }
    let mut b = Builder {
        states: 0,
        transitions: Vec::new(),
        oracles: Vec::new(),
    };
    let scan = b.state();
    let any = b.oracle(&CoordExpr::True);
    b.transitions.push((scan, Label::Right, scan));
    b.transitions.push((scan, Label::NewRow, scan));
    b.transitions.push((scan, Label::Filter(any), scan));
    let finals = match &phi {
        CoordExpr::Apply(alpha, psi) => {
            let test = b.oracle(psi);
            let body = b.nav(alpha);
            b.transitions.push((scan, Label::Filter(test), body.start));
            body.finals
        }
        _ => {
            let test = b.oracle(&phi);
            let f = b.state();
            b.transitions.push((scan, Label::Filter(test), f));
            vec![f]
        }
    };
    Ok(b.finish(Frag { start: scan, finals }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parser::{parse_coord_expr, parse_nav_expr};

    #[test]
    fn epsilon_is_one_state() {
        let a = compile_nav_to_ca(&NavExpr::Epsilon).unwrap();
        assert_eq!(a.states, 1);
        assert!(a.is_final(a.initial));
        assert!(a.transitions.is_empty());
    }

    #[test]
    fn down_is_one_edge() {
        let a = compile_nav_to_ca(&NavExpr::Down).unwrap();
        assert_eq!(a.states, 2);
        assert_eq!(a.transitions, vec![(0, Label::Down, 1)]);
    }

    #[test]
    fn levels_drop_by_one() {
        let e = parse_coord_expr("down*.right+(ARUBA)").unwrap();
        let a = compile_coord_to_ca(&e).unwrap();
        assert_eq!(a.level(), level(&e) - 1);
        let e = parse_coord_expr("a and b").unwrap();
        assert_eq!(compile_coord_to_ca(&e).unwrap().level(), level(&e));
        let n = parse_nav_expr("[right(a)].down").unwrap();
        assert_eq!(compile_nav_to_ca(&n).unwrap().level(), 1);
    }

    #[test]
    fn scan_loops_on_start() {
        let a = compile_coord_to_ca(&parse_coord_expr("down*.right+(ARUBA)").unwrap()).unwrap();
        let s = a.initial;
        assert!(a.transitions.contains(&(s, Label::NewRow, s)));
        assert!(a.transitions.contains(&(s, Label::Right, s)));
        assert_eq!(a.oracles[0], CoordExpr::True);
    }

    #[test]
    fn rejects_backward_axes() {
        assert!(matches!(
            compile_nav_to_ca(&parse_nav_expr("down.left").unwrap()),
            Err(FragmentError::NotForward(_))
        ));
        assert!(compile_coord_to_ca(&parse_coord_expr("<down>").unwrap()).is_err());
    }
}

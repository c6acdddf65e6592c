//! Monadic second-order logic over digraphs: syntax, parsing, quantifier rank, evaluation,
//! the out-degree-one formula χ and an Ehrenfeucht–Fraïssé equivalence checker.

mod ef;
mod eval;
mod gen;
mod parse;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

pub use ef::{ef_equiv, ef_equiv_by_game, EfTyper, EF_ROUND_BOUND, EF_SIZE_BOUND};
pub use eval::{evaluate, evaluate_with, POINT_SIZE_BOUND, SET_SIZE_BOUND};
pub use gen::{random_formula, random_corpus};
pub use parse::parse_formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("free variable {0:?}")]
    FreeVariable(String),
    #[error("variable {0:?} is bound twice on one branch")]
    Rebound(String),
    #[error("variable {0:?} used with the wrong sort")]
    SortMismatch(String),
    #[error("size {size} exceeds the bound {bound}")]
    SizeBoundExceeded { size: usize, bound: usize },
}

/// MSO formula over `{=, →, ∈}`. `x != y` is `Not(Eq(x, y))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Edge(String, String),
    Eq(String, String),
    In(String, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

impl Formula {
    pub fn edge(x: &str, y: &str) -> Self {
        Formula::Edge(x.into(), y.into())
    }

    pub fn eq(x: &str, y: &str) -> Self {
        Formula::Eq(x.into(), y.into())
    }

    pub fn neq(x: &str, y: &str) -> Self {
        Formula::eq(x, y).not()
    }

    pub fn member(x: &str, set: &str) -> Self {
        Formula::In(x.into(), set.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn exists(x: &str, body: Formula) -> Self {
        Formula::Exists(x.into(), Box::new(body))
    }

    pub fn forall(x: &str, body: Formula) -> Self {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn exists_set(x: &str, body: Formula) -> Self {
        Formula::ExistsSet(x.into(), Box::new(body))
    }

    pub fn forall_set(x: &str, body: Formula) -> Self {
        Formula::ForallSet(x.into(), Box::new(body))
    }

    /// True when no set quantifier occurs.
    pub fn is_first_order(&self) -> bool {
        match self {
            Formula::Edge(..) | Formula::Eq(..) | Formula::In(..) => true,
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.is_first_order(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_first_order() && b.is_first_order(),
            Formula::ExistsSet(..) | Formula::ForallSet(..) => false,
        }
    }

    fn depth(&self) -> usize {
        match self {
            Formula::Edge(..) | Formula::Eq(..) | Formula::In(..) => 0,
            Formula::Not(a) => a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.depth().max(b.depth()),
            Formula::Exists(_, a) | Formula::Forall(_, a) | Formula::ExistsSet(_, a) | Formula::ForallSet(_, a) => {
                1 + a.depth()
            }
        }
    }

    /// Checks closedness, sorts and single binding along every branch.
    pub fn check(&self) -> Result<(), LogicError> {
        fn go(f: &Formula, scope: &mut HashMap<String, bool>) -> Result<(), LogicError> {
            let point = |v: &String, scope: &HashMap<String, bool>| match scope.get(v) {
                None => Err(LogicError::FreeVariable(v.clone())),
                Some(true) => Ok(()),
                Some(false) => Err(LogicError::SortMismatch(v.clone())),
            };
            match f {
                Formula::Edge(x, y) | Formula::Eq(x, y) => {
                    point(x, scope)?;
                    point(y, scope)
                }
                Formula::In(x, s) => {
                    point(x, scope)?;
                    match scope.get(s) {
                        None => Err(LogicError::FreeVariable(s.clone())),
                        Some(false) => Ok(()),
                        Some(true) => Err(LogicError::SortMismatch(s.clone())),
                    }
                }
                Formula::Not(a) => go(a, scope),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, scope)?;
                    go(b, scope)
                }
                Formula::Exists(v, a) | Formula::Forall(v, a) | Formula::ExistsSet(v, a) | Formula::ForallSet(v, a) => {
                    if scope.contains_key(v) {
                        return Err(LogicError::Rebound(v.clone()));
                    }
                    scope.insert(v.clone(), matches!(f, Formula::Exists(..) | Formula::Forall(..)));
                    let r = go(a, scope);
                    scope.remove(v);
                    r
                }
            }
        }
        go(self, &mut HashMap::new())
    }
}

/// Quantifier nesting depth of a closed formula, counting point and set quantifiers.
pub fn rank(f: &Formula) -> Result<usize, LogicError> {
    f.check()?;
    Ok(f.depth())
}

/// Every vertex has exactly one successor.
pub fn chi() -> Formula {
    Formula::forall(
        "x",
        Formula::exists(
            "y",
            Formula::edge("x", "y").and(Formula::forall("z", Formula::neq("z", "y").implies(Formula::edge("x", "z").not()))),
        ),
    )
}

/// Some vertex is its own successor.
pub fn fixed_point() -> Formula {
    Formula::exists("x", Formula::edge("x", "x"))
}

/// At least one strongly connected component with two or more vertices.
pub fn nontrivial_scc() -> Formula {
    Formula::exists_set(
        "X",
        Formula::exists("x", Formula::member("x", "X")).and(Formula::forall(
            "x",
            Formula::member("x", "X").implies(Formula::exists(
                "y",
                Formula::member("y", "X").and(Formula::neq("x", "y")).and(Formula::edge("x", "y")),
            )),
        )),
    )
}

/// Every nonempty proper vertex set has an edge leaving it.
pub fn strongly_connected() -> Formula {
    let proper = Formula::exists("x", Formula::member("x", "X")).and(Formula::exists("y", Formula::member("y", "X").not()));
    let leaves = Formula::exists(
        "x",
        Formula::exists(
            "y",
            Formula::member("x", "X").and(Formula::member("y", "X").not()).and(Formula::edge("x", "y")),
        ),
    );
    Formula::forall_set("X", proper.implies(leaves))
}

/// No two vertices share a successor.
pub fn injective() -> Formula {
    let hyp = Formula::edge("x", "y").and(Formula::edge("x'", "y'")).and(Formula::eq("y", "y'"));
    let body = hyp.implies(Formula::eq("x", "x'"));
    Formula::forall("x", Formula::forall("y", Formula::forall("x'", Formula::forall("y'", body))))
}

// Printing precedences; a child is parenthesised when its level is below the context's.
const P_QUANT: u8 = 0;
const P_IMPLIES: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_ATOM: u8 = 4;

impl Formula {
    fn level(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) | Formula::ExistsSet(..) | Formula::ForallSet(..) => P_QUANT,
            Formula::Implies(..) => P_IMPLIES,
            Formula::Or(..) => P_OR,
            Formula::And(..) => P_AND,
            _ => P_ATOM,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.level() < ctx;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Edge(x, y) => write!(f, "{x} -> {y}")?,
            Formula::Eq(x, y) => write!(f, "{x} = {y}")?,
            Formula::In(x, s) => write!(f, "{x} in {s}")?,
            Formula::Not(a) => match a.as_ref() {
                Formula::Eq(x, y) => write!(f, "{x} != {y}")?,
                _ => {
                    f.write_str("!")?;
                    // Operands of `!` other than atoms and negations need parentheses.
                    a.write(f, P_ATOM + 1 - u8::from(matches!(**a, Formula::Not(_))))?;
                }
            },
            Formula::And(a, b) => {
                a.write(f, P_AND)?;
                f.write_str(" & ")?;
                b.write(f, P_AND + 1)?;
            }
            Formula::Or(a, b) => {
                a.write(f, P_OR)?;
                f.write_str(" | ")?;
                b.write(f, P_OR + 1)?;
            }
            Formula::Implies(a, b) => {
                a.write(f, P_IMPLIES + 1)?;
                f.write_str(" => ")?;
                b.write(f, P_IMPLIES)?;
            }
            Formula::Exists(v, a) => {
                write!(f, "exists {v}. ")?;
                a.write(f, P_QUANT)?;
            }
            Formula::Forall(v, a) => {
                write!(f, "forall {v}. ")?;
                a.write(f, P_QUANT)?;
            }
            Formula::ExistsSet(v, a) => {
                write!(f, "existsS {v}. ")?;
                a.write(f, P_QUANT)?;
            }
            Formula::ForallSet(v, a) => {
                write!(f, "forallS {v}. ")?;
                a.write(f, P_QUANT)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, P_QUANT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&fixed_point()), Ok(1));
        assert_eq!(rank(&chi()), Ok(3));
        assert_eq!(rank(&injective()), Ok(4));
        assert_eq!(rank(&nontrivial_scc()), Ok(3));
        assert_eq!(rank(&Formula::edge("x", "x")), Err(LogicError::FreeVariable("x".into())));
    }

    #[test]
    fn check_rejects_sort_errors_and_rebinding() {
        let f = Formula::exists("x", Formula::exists("y", Formula::member("x", "y")));
        assert_eq!(f.check(), Err(LogicError::SortMismatch("y".into())));
        let f = Formula::exists("x", Formula::exists("x", Formula::edge("x", "x")));
        assert_eq!(f.check(), Err(LogicError::Rebound("x".into())));
        // Sibling scopes may reuse a name.
        assert!(fixed_point().and(fixed_point()).check().is_ok());
    }

    #[test]
    fn printing_examples() {
        assert_eq!(fixed_point().to_string(), "exists x. x -> x");
        assert_eq!(chi().to_string(), "forall x. exists y. x -> y & (forall z. z != y => !(x -> z))");
        let f = Formula::exists("x", Formula::edge("x", "x")).and(Formula::exists("y", Formula::edge("y", "y")));
        assert_eq!(f.to_string(), "(exists x. x -> x) & (exists y. y -> y)");
        assert!(!nontrivial_scc().is_first_order());
        assert!(chi().is_first_order());
    }
}

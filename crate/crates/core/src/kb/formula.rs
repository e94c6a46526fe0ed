use std::collections::BTreeSet;
use std::fmt;

use crate::counter::Cell;

/// Index of a predicate in the declared vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub usize);

/// Index of an individual constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstId(pub usize);

/// A boolean combination of unary predicate atoms over one implicit variable.
///
/// The same tree is used for open formulas (asserted of every element) and,
/// paired with a constant in [`GroundFormula`], for ground sentences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(PredId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(p: usize) -> Formula {
        Formula::Atom(PredId(p))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Left-folded conjunction; `True` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-folded disjunction; `False` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Syntactic complement: strips one outer negation, otherwise wraps in one.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    /// Truth value of the formula for an element occupying `cell`.
    pub fn eval(&self, cell: Cell) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(p) => cell.holds(*p),
            Formula::Not(f) => !f.eval(cell),
            Formula::And(a, b) => a.eval(cell) && b.eval(cell),
            Formula::Or(a, b) => a.eval(cell) || b.eval(cell),
            Formula::Implies(a, b) => !a.eval(cell) || b.eval(cell),
            Formula::Iff(a, b) => a.eval(cell) == b.eval(cell),
        }
    }

    pub fn predicates(&self) -> BTreeSet<PredId> {
        let mut out = BTreeSet::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates(&self, out: &mut BTreeSet<PredId>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) => {
                out.insert(*p);
            }
            Formula::Not(f) => f.collect_predicates(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_predicates(out);
                b.collect_predicates(out);
            }
        }
    }

    pub fn at(&self, constant: ConstId) -> GroundFormula {
        GroundFormula {
            formula: self.clone(),
            constant,
        }
    }

    pub(crate) fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_) => 5,
            Formula::True | Formula::False | Formula::Atom(_) => 6,
        }
    }

    /// Renders the formula with the given predicate names.
    pub fn display<'a>(&'a self, predicates: &'a [String]) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            predicates,
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    predicates: &'a [String],
}

impl FormulaDisplay<'_> {
    fn child<'b>(&'b self, f: &'b Formula) -> FormulaDisplay<'b> {
        FormulaDisplay {
            formula: f,
            predicates: self.predicates,
        }
    }

    fn write_operand(
        &self,
        out: &mut fmt::Formatter<'_>,
        operand: &Formula,
        parens: bool,
    ) -> fmt::Result {
        if parens {
            write!(out, "({})", self.child(operand))
        } else {
            write!(out, "{}", self.child(operand))
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = self.formula;
        let (op, a, b, right_assoc) = match f {
            Formula::True => return out.write_str("true"),
            Formula::False => return out.write_str("false"),
            Formula::Atom(p) => match self.predicates.get(p.0) {
                Some(name) => return out.write_str(name),
                None => return write!(out, "?{}", p.0),
            },
            Formula::Not(inner) => {
                out.write_str("!")?;
                return self.write_operand(out, inner, inner.precedence() < f.precedence());
            }
            Formula::And(a, b) => ("&", a, b, false),
            Formula::Or(a, b) => ("or", a, b, false),
            Formula::Implies(a, b) => ("->", a, b, true),
            Formula::Iff(a, b) => ("<->", a, b, false),
        };
        let p = f.precedence();
        let left_parens = a.precedence() < p || (right_assoc && a.precedence() == p);
        let right_parens = b.precedence() < p || (!right_assoc && b.precedence() == p);
        self.write_operand(out, a, left_parens)?;
        write!(out, " {op} ")?;
        self.write_operand(out, b, right_parens)
    }
}

/// A formula instantiated at an individual constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundFormula {
    pub formula: Formula,
    pub constant: ConstId,
}

impl GroundFormula {
    pub fn negated(&self) -> GroundFormula {
        GroundFormula {
            formula: self.formula.negated(),
            constant: self.constant,
        }
    }

    pub fn display<'a>(
        &'a self,
        predicates: &'a [String],
        constants: &'a [String],
    ) -> GroundDisplay<'a> {
        GroundDisplay {
            ground: self,
            predicates,
            constants,
        }
    }
}

pub struct GroundDisplay<'a> {
    ground: &'a GroundFormula,
    predicates: &'a [String],
    constants: &'a [String],
}

impl fmt::Display for GroundDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self
            .constants
            .get(self.ground.constant.0)
            .map(String::as_str)
            .unwrap_or("?");
        let f = &self.ground.formula;
        match f {
            Formula::Atom(_) => write!(out, "{}({name})", f.display(self.predicates)),
            Formula::Not(inner) if matches!(**inner, Formula::Atom(_)) => {
                write!(out, "!{}({name})", inner.display(self.predicates))
            }
            _ => write!(out, "({})({name})", f.display(self.predicates)),
        }
    }
}

/// A signed predicate applied to a constant: the shape of immediate evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundLiteral {
    pub positive: bool,
    pub predicate: PredId,
    pub constant: ConstId,
}

impl GroundLiteral {
    pub fn pos(predicate: usize, constant: usize) -> Self {
        GroundLiteral {
            positive: true,
            predicate: PredId(predicate),
            constant: ConstId(constant),
        }
    }

    pub fn neg(predicate: usize, constant: usize) -> Self {
        GroundLiteral {
            positive: false,
            predicate: PredId(predicate),
            constant: ConstId(constant),
        }
    }

    pub fn to_ground(self) -> GroundFormula {
        let atom = Formula::Atom(self.predicate);
        GroundFormula {
            formula: if self.positive { atom } else { Formula::not(atom) },
            constant: self.constant,
        }
    }
}

impl From<GroundLiteral> for GroundFormula {
    fn from(lit: GroundLiteral) -> Self {
        lit.to_ground()
    }
}

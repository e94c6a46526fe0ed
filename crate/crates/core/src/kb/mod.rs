//! The knowledge-base language: symbol tables, formulas, statistical
//! statements, default rules, and the line-oriented text format.

mod formula;
mod parse;
pub mod rational;
mod serialize;

use std::fmt;

pub use formula::{ConstId, Formula, FormulaDisplay, GroundFormula, GroundLiteral, PredId};
pub use parse::{parse_formula, parse_kb, ParseError, ParseErrorKind};
pub use rational::{decimal6, format_rational, parse_rational, ratio, Rational};
pub use serialize::serialize_kb;

use num_traits::{One, Zero};

/// What a statistical statement means in a model where its reference class is empty.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum VacuousReference {
    #[default]
    Satisfied,
    Violated,
}

/// `%x(target, reference, lower, upper)`: the fraction of `reference`
/// elements that also satisfy `target` lies in `[lower, upper]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StatStatement {
    pub target: Formula,
    pub reference: Formula,
    pub lower: Rational,
    pub upper: Rational,
}

impl StatStatement {
    pub fn new(target: Formula, reference: Formula, lower: Rational, upper: Rational) -> Self {
        StatStatement {
            target,
            reference,
            lower,
            upper,
        }
    }

    /// `%x(¬target, reference, 1 - upper, 1 - lower)`.
    pub fn complement(&self) -> StatStatement {
        let one = Rational::one();
        StatStatement {
            target: self.target.negated(),
            reference: self.reference.clone(),
            lower: &one - &self.upper,
            upper: &one - &self.lower,
        }
    }

    pub fn interval_is_valid(&self) -> bool {
        self.lower >= Rational::zero()
            && self.lower <= self.upper
            && self.upper <= Rational::one()
    }
}

/// Subcase of the candidate-default recipe that produced a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    C1a,
    C1b,
    C1c,
    C2a,
    C2b,
    C2c,
    C3a,
    C3b,
    C3c,
}

impl CaseTag {
    pub fn new(case: u8, sub: char) -> Option<CaseTag> {
        use CaseTag::*;
        Some(match (case, sub) {
            (1, 'a') => C1a,
            (1, 'b') => C1b,
            (1, 'c') => C1c,
            (2, 'a') => C2a,
            (2, 'b') => C2b,
            (2, 'c') => C2c,
            (3, 'a') => C3a,
            (3, 'b') => C3b,
            (3, 'c') => C3c,
            _ => return None,
        })
    }

    pub fn case(self) -> u8 {
        use CaseTag::*;
        match self {
            C1a | C1b | C1c => 1,
            C2a | C2b | C2c => 2,
            C3a | C3b | C3c => 3,
        }
    }

    pub fn subcase(self) -> char {
        use CaseTag::*;
        match self {
            C1a | C2a | C3a => 'a',
            C1b | C2b | C3b => 'b',
            C1c | C2c | C3c => 'c',
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.case(), self.subcase())
    }
}

/// One pairwise derivation that contributed to a generated rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub case: CaseTag,
    pub partner: StatStatement,
}

/// Where a generated rule came from: the statistic whose reference class is
/// the rule's prerequisite, and every pairwise recipe step that shaped it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub basis: StatStatement,
    pub derivations: Vec<Derivation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleOrigin {
    Declared,
    Generated(Provenance),
}

/// A default rule schema `prerequisite : justifications / consequent`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefaultRule {
    pub prerequisite: Formula,
    pub justifications: Vec<Formula>,
    pub consequent: Formula,
    pub origin: RuleOrigin,
}

impl DefaultRule {
    pub fn declared(prerequisite: Formula, justifications: Vec<Formula>, consequent: Formula) -> Self {
        DefaultRule {
            prerequisite,
            justifications,
            consequent,
            origin: RuleOrigin::Declared,
        }
    }

    /// The normal rule `prerequisite : consequent / consequent`.
    pub fn normal(prerequisite: Formula, consequent: Formula) -> Self {
        DefaultRule::declared(prerequisite, vec![consequent.clone()], consequent)
    }

    /// Equality on the rule text, ignoring provenance.
    pub fn same_shape(&self, other: &DefaultRule) -> bool {
        self.prerequisite == other.prerequisite
            && self.justifications == other.justifications
            && self.consequent == other.consequent
    }

    pub fn display<'a>(&'a self, predicates: &'a [String]) -> RuleDisplay<'a> {
        RuleDisplay {
            rule: self,
            predicates,
        }
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a DefaultRule,
    predicates: &'a [String],
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.rule.prerequisite.display(self.predicates))?;
        for (i, j) in self.rule.justifications.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", j.display(self.predicates))?;
        }
        write!(f, " / {}", self.rule.consequent.display(self.predicates))
    }
}

/// Background knowledge: vocabulary, domain size, universal axioms and statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub predicates: Vec<String>,
    pub constants: Vec<String>,
    pub domain_size: usize,
    pub axioms: Vec<Formula>,
    pub stats: Vec<StatStatement>,
    pub vacuous: VacuousReference,
}

impl KnowledgeBase {
    pub fn new(domain_size: usize) -> Self {
        KnowledgeBase {
            predicates: Vec::new(),
            constants: Vec::new(),
            domain_size,
            axioms: Vec::new(),
            stats: Vec::new(),
            vacuous: VacuousReference::Satisfied,
        }
    }

    /// Declares a predicate and returns its atom.
    pub fn add_predicate(&mut self, name: &str) -> Formula {
        self.predicates.push(name.to_string());
        Formula::atom(self.predicates.len() - 1)
    }

    pub fn add_constant(&mut self, name: &str) -> ConstId {
        self.constants.push(name.to_string());
        ConstId(self.constants.len() - 1)
    }

    pub fn predicate(&self, name: &str) -> Option<PredId> {
        self.predicates.iter().position(|p| p == name).map(PredId)
    }

    pub fn constant(&self, name: &str) -> Option<ConstId> {
        self.constants.iter().position(|c| c == name).map(ConstId)
    }

    pub fn show<'a>(&'a self, f: &'a Formula) -> FormulaDisplay<'a> {
        f.display(&self.predicates)
    }

    pub fn show_ground(&self, g: &GroundFormula) -> String {
        g.display(&self.predicates, &self.constants).to_string()
    }

    pub fn show_rule(&self, r: &DefaultRule) -> String {
        r.display(&self.predicates).to_string()
    }

    pub fn show_stat(&self, s: &StatStatement) -> String {
        format!(
            "%x({}, {}, {}, {})",
            self.show(&s.target),
            self.show(&s.reference),
            format_rational(&s.lower),
            format_rational(&s.upper)
        )
    }
}

/// δ and ε* as written in a file. Absent values fall back to the defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThresholdConfig {
    pub delta: Option<Rational>,
    pub epsilon_star: Option<Rational>,
}

impl ThresholdConfig {
    pub fn default_delta() -> Rational {
        ratio(1, 20)
    }

    pub fn default_epsilon_star() -> Rational {
        ratio(1, 10)
    }

    pub fn delta(&self) -> Rational {
        self.delta.clone().unwrap_or_else(Self::default_delta)
    }

    pub fn epsilon_star(&self) -> Rational {
        self.epsilon_star
            .clone()
            .unwrap_or_else(Self::default_epsilon_star)
    }
}

/// Everything a KB file declares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub kb: KnowledgeBase,
    pub evidence: Vec<GroundLiteral>,
    pub rules: Vec<DefaultRule>,
    pub config: ThresholdConfig,
}

impl Document {
    pub fn new(kb: KnowledgeBase) -> Self {
        Document {
            kb,
            evidence: Vec::new(),
            rules: Vec::new(),
            config: ThresholdConfig::default(),
        }
    }
}

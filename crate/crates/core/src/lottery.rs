//! Species-partition knowledge bases: `B ⟺ S_1 ∨ … ∨ S_n` with exclusive
//! species and a small upper bound on each species among the `B`s.

use thiserror::Error;

use crate::kb::{
    DefaultRule, Document, Formula, GroundLiteral, KnowledgeBase, Rational, StatStatement,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LotteryError {
    #[error("need at least one species")]
    NoSpecies,
    #[error("expected {expected} intervals, got {got}")]
    IntervalCount { expected: usize, got: usize },
    #[error("interval {0} is not a sub-interval of [0, 1]")]
    BadInterval(usize),
}

/// Builds the knowledge base with predicates `B, S1..Sn`, constant `a`,
/// evidence `B(a)`, statistics `%x(S_i, B, lo_i, hi_i)` and the declared
/// defaults `B : ¬S_i / ¬S_i`.
pub fn lottery_document(
    domain_size: usize,
    intervals: &[(Rational, Rational)],
) -> Result<Document, LotteryError> {
    let n = intervals.len();
    if n == 0 {
        return Err(LotteryError::NoSpecies);
    }
    let mut kb = KnowledgeBase::new(domain_size);
    let bird = kb.add_predicate("B");
    let species: Vec<Formula> = (1..=n).map(|i| kb.add_predicate(&format!("S{i}"))).collect();
    kb.add_constant("a");
    kb.axioms
        .push(Formula::iff(bird.clone(), Formula::disjunction(species.iter().cloned())));
    if n > 1 {
        for (i, s) in species.iter().enumerate() {
            let others = species
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, o)| Formula::not(o.clone()));
            kb.axioms
                .push(Formula::implies(s.clone(), Formula::conjunction(others)));
        }
    }
    for (i, ((lo, hi), s)) in intervals.iter().zip(&species).enumerate() {
        let stat = StatStatement::new(s.clone(), bird.clone(), lo.clone(), hi.clone());
        if !stat.interval_is_valid() {
            return Err(LotteryError::BadInterval(i + 1));
        }
        kb.stats.push(stat);
    }
    let mut doc = Document::new(kb);
    doc.evidence.push(GroundLiteral::pos(0, 0));
    doc.rules = species
        .iter()
        .map(|s| DefaultRule::normal(bird.clone(), Formula::not(s.clone())))
        .collect();
    Ok(doc)
}

/// Same interval `[lo, hi]` for every one of `n` species.
pub fn uniform_lottery(n: usize, domain_size: usize, lo: Rational, hi: Rational) -> Result<Document, LotteryError> {
    lottery_document(domain_size, &vec![(lo, hi); n])
}

/// `[0, i/100]` for species `i`.
pub fn graded_lottery(n: usize, domain_size: usize) -> Result<Document, LotteryError> {
    let intervals: Vec<_> = (1..=n as i64)
        .map(|i| (crate::kb::ratio(0, 1), crate::kb::ratio(i, 100)))
        .collect();
    lottery_document(domain_size, &intervals)
}

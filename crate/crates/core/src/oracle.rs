//! Brute-force model enumeration for tiny instances.
//!
//! Nothing here shares counting logic with [`crate::counter`]: every model is
//! materialized and every sentence is evaluated element by element. It is the
//! reference the counter is checked against.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::counter::{Cell, WorldState, MAX_PREDICATES};
use crate::kb::{Formula, GroundFormula, KnowledgeBase, Rational, StatStatement, VacuousReference};

/// Default ceiling on the number of models one oracle call may enumerate.
pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{models} models exceed the enumeration cap of {cap}")]
    CapExceeded { models: BigUint, cap: u64 },
    #[error("conditioning set has no models")]
    EmptyCondition,
    #[error("{0} predicates exceed the supported maximum of {MAX_PREDICATES}")]
    TooManyPredicates(usize),
}

/// One concrete model: the cell of every domain element and the element
/// every constant denotes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExplicitModel {
    pub cell_of: Vec<Cell>,
    pub denote: Vec<usize>,
}

/// A sentence the oracle can evaluate in an explicit model.
#[derive(Clone, Copy, Debug)]
pub enum Sentence<'a> {
    /// Asserted of every element.
    Axiom(&'a Formula),
    Stat(&'a StatStatement),
    Ground(&'a GroundFormula),
}

/// Direct evaluation of a sentence in a model.
pub fn oracle_satisfies(m: &ExplicitModel, sentence: Sentence<'_>, vacuous: VacuousReference) -> bool {
    match sentence {
        Sentence::Axiom(f) => m.cell_of.iter().all(|&c| f.eval(c)),
        Sentence::Ground(g) => g.formula.eval(m.cell_of[m.denote[g.constant.0]]),
        Sentence::Stat(s) => {
            let members: Vec<Cell> = m
                .cell_of
                .iter()
                .copied()
                .filter(|&c| s.reference.eval(c))
                .collect();
            if members.is_empty() {
                return vacuous == VacuousReference::Satisfied;
            }
            let hits = members.iter().filter(|&&c| s.target.eval(c)).count();
            let frac = BigRational::new(BigInt::from(hits), BigInt::from(members.len()));
            s.lower <= frac && frac <= s.upper
        }
    }
}

/// Which element types the enumeration draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// Every one of the 2^k cells, as the raw definition of a model has it.
    Raw,
    /// Only cells whose element satisfies every universal axiom. Any model
    /// outside this space violates an axiom at some element, so counts are
    /// unchanged; the space is just smaller.
    AxiomFiltered,
}

/// Enumeration of all models over a fixed cell alphabet.
///
/// Order: lexicographic in `(cell_of[0], .., cell_of[N-1], denote[0], .., denote[c-1])`
/// with cells compared by bitmask and the last position varying fastest.
pub struct ModelIter {
    alphabet: Vec<Cell>,
    cell_digits: Vec<usize>,
    current: ExplicitModel,
    started: bool,
    done: bool,
}

impl Iterator for ModelIter {
    type Item = ExplicitModel;

    fn next(&mut self) -> Option<ExplicitModel> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.alphabet.is_empty() && !self.current.cell_of.is_empty() {
                self.done = true;
                return None;
            }
            if self.current.cell_of.is_empty() && !self.current.denote.is_empty() {
                self.done = true;
                return None;
            }
            return Some(self.current.clone());
        }
        let n = self.current.cell_of.len();
        // advance denote first (fastest), then cells
        for i in (0..self.current.denote.len()).rev() {
            if self.current.denote[i] + 1 < n {
                self.current.denote[i] += 1;
                return Some(self.current.clone());
            }
            self.current.denote[i] = 0;
        }
        for i in (0..n).rev() {
            if self.cell_digits[i] + 1 < self.alphabet.len() {
                self.cell_digits[i] += 1;
                self.current.cell_of[i] = self.alphabet[self.cell_digits[i]];
                return Some(self.current.clone());
            }
            self.cell_digits[i] = 0;
            self.current.cell_of[i] = self.alphabet[0];
        }
        self.done = true;
        None
    }
}

fn model_iter(n: usize, alphabet: Vec<Cell>, constants: usize) -> ModelIter {
    let first = alphabet.first().copied().unwrap_or(Cell(0));
    ModelIter {
        cell_digits: vec![0; n],
        current: ExplicitModel {
            cell_of: vec![first; n],
            denote: vec![0; constants],
        },
        alphabet,
        started: false,
        done: false,
    }
}

fn space_size(n: usize, alphabet: usize, constants: usize) -> BigUint {
    num_traits::pow(BigUint::from(alphabet), n) * num_traits::pow(BigUint::from(n), constants)
}

/// Every model with `n` elements over `k` predicates and `c` constants:
/// (2^k)^n * n^c of them, each exactly once.
pub fn enumerate_models(n: usize, k: usize, c: usize, cap: u64) -> Result<ModelIter, OracleError> {
    if k > MAX_PREDICATES {
        return Err(OracleError::TooManyPredicates(k));
    }
    let alphabet: Vec<Cell> = (0..1u32 << k).map(Cell).collect();
    let models = space_size(n, alphabet.len(), c);
    if models > BigUint::from(cap) {
        return Err(OracleError::CapExceeded { models, cap });
    }
    Ok(model_iter(n, alphabet, c))
}

/// Brute-force model counter.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub cap: u64,
    pub space: Space,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            cap: DEFAULT_CAP,
            space: Space::Raw,
        }
    }
}

impl Oracle {
    pub fn new(cap: u64, space: Space) -> Self {
        Oracle { cap, space }
    }

    fn alphabet(&self, kb: &KnowledgeBase) -> Result<Vec<Cell>, OracleError> {
        let k = kb.predicates.len();
        if k > MAX_PREDICATES {
            return Err(OracleError::TooManyPredicates(k));
        }
        let all = (0..1u32 << k).map(Cell);
        Ok(match self.space {
            Space::Raw => all.collect(),
            Space::AxiomFiltered => all
                .filter(|&c| {
                    let probe = ExplicitModel {
                        cell_of: vec![c],
                        denote: Vec::new(),
                    };
                    kb.axioms
                        .iter()
                        .all(|a| oracle_satisfies(&probe, Sentence::Axiom(a), kb.vacuous))
                })
                .collect(),
        })
    }

    /// Models of `w`, and of `w` plus each query.
    pub fn count(
        &self,
        w: &WorldState<'_>,
        queries: &[GroundFormula],
    ) -> Result<(BigUint, Vec<BigUint>), OracleError> {
        let kb = w.kb();
        let n = kb.domain_size;
        let c = kb.constants.len();
        let alphabet = self.alphabet(kb)?;
        let models = space_size(n, alphabet.len(), c);
        if models > BigUint::from(self.cap) {
            return Err(OracleError::CapExceeded {
                models,
                cap: self.cap,
            });
        }
        let mut total = 0u64;
        let mut hits = vec![0u64; queries.len()];
        let mut last_cells: Option<(Vec<Cell>, bool)> = None;
        for m in model_iter(n, alphabet, c) {
            // axioms and statistics only depend on the cells
            let general_ok = match &last_cells {
                Some((cells, ok)) if *cells == m.cell_of => *ok,
                _ => {
                    let ok = kb
                        .axioms
                        .iter()
                        .all(|a| oracle_satisfies(&m, Sentence::Axiom(a), kb.vacuous))
                        && kb
                            .stats
                            .iter()
                            .all(|s| oracle_satisfies(&m, Sentence::Stat(s), kb.vacuous));
                    last_cells = Some((m.cell_of.clone(), ok));
                    ok
                }
            };
            if !general_ok {
                continue;
            }
            if !w
                .facts()
                .iter()
                .all(|g| oracle_satisfies(&m, Sentence::Ground(g), kb.vacuous))
            {
                continue;
            }
            total += 1;
            for (h, q) in hits.iter_mut().zip(queries) {
                if oracle_satisfies(&m, Sentence::Ground(q), kb.vacuous) {
                    *h += 1;
                }
            }
        }
        Ok((BigUint::from(total), hits.into_iter().map(BigUint::from).collect()))
    }

    pub fn count_models(&self, w: &WorldState<'_>) -> Result<BigUint, OracleError> {
        Ok(self.count(w, &[])?.0)
    }

    pub fn proportion(&self, w: &WorldState<'_>, query: &GroundFormula) -> Result<Rational, OracleError> {
        let (total, hits) = self.count(w, std::slice::from_ref(query))?;
        if total.is_zero() {
            return Err(OracleError::EmptyCondition);
        }
        Ok(BigRational::new(
            BigInt::from(hits[0].clone()),
            BigInt::from(total),
        ))
    }
}

/// Filter-and-count proportion with the default raw enumeration.
pub fn oracle_proportion(w: &WorldState<'_>, query: &GroundFormula) -> Result<Rational, OracleError> {
    Oracle::default().proportion(w, query)
}

/// Number of raw models, `(2^k)^n * n^c`.
pub fn raw_model_count(n: usize, k: usize, c: usize) -> BigUint {
    space_size(n, 1 << k, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{ratio, ConstId, GroundLiteral};
    use std::collections::HashSet;

    #[test]
    fn raw_space_sizes() {
        assert_eq!(enumerate_models(2, 1, 1, DEFAULT_CAP).unwrap().count(), 8);
        assert_eq!(enumerate_models(2, 2, 1, DEFAULT_CAP).unwrap().count(), 32);
        assert_eq!(enumerate_models(3, 3, 2, DEFAULT_CAP).unwrap().count(), 4608);
    }

    #[test]
    fn each_model_once_in_order() {
        let models: Vec<ExplicitModel> = enumerate_models(2, 1, 1, DEFAULT_CAP).unwrap().collect();
        let distinct: HashSet<_> = models.iter().cloned().collect();
        assert_eq!(distinct.len(), models.len());
        let keys: Vec<(Vec<u32>, Vec<usize>)> = models
            .iter()
            .map(|m| (m.cell_of.iter().map(|c| c.0).collect(), m.denote.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            enumerate_models(8, 3, 1, 1000),
            Err(OracleError::CapExceeded { .. })
        ));
    }

    #[test]
    fn tautology_axiom_everywhere() {
        let taut = Formula::or(Formula::atom(0), Formula::not(Formula::atom(0)));
        for m in enumerate_models(3, 2, 1, DEFAULT_CAP).unwrap() {
            assert!(oracle_satisfies(&m, Sentence::Axiom(&taut), VacuousReference::Satisfied));
        }
    }

    #[test]
    fn exact_statistic_fails_with_a_grounded_bird() {
        // cells: bit0 = B, bit1 = F
        let m = ExplicitModel {
            cell_of: vec![Cell(0b11), Cell(0b01)],
            denote: vec![0],
        };
        let s = StatStatement::new(Formula::atom(1), Formula::atom(0), ratio(1, 1), ratio(1, 1));
        assert!(!oracle_satisfies(&m, Sentence::Stat(&s), VacuousReference::Satisfied));
        let g = Formula::atom(1).at(ConstId(0));
        assert!(oracle_satisfies(&m, Sentence::Ground(&g), VacuousReference::Satisfied));
    }

    #[test]
    fn proportion_examples() {
        let mut kb = KnowledgeBase::new(2);
        kb.add_predicate("B");
        kb.add_predicate("F");
        kb.add_constant("a");
        let fa = GroundLiteral::pos(1, 0).to_ground();
        let w = WorldState::with_evidence(&kb, &[GroundLiteral::pos(0, 0)]);
        assert_eq!(oracle_proportion(&w, &fa).unwrap(), ratio(1, 2));

        kb.stats.push(StatStatement::new(Formula::atom(1), Formula::atom(0), ratio(1, 1), ratio(1, 1)));
        let w = WorldState::with_evidence(&kb, &[GroundLiteral::pos(0, 0)]);
        assert_eq!(Oracle::default().count_models(&w).unwrap(), BigUint::from(6u32));
        assert_eq!(oracle_proportion(&w, &fa).unwrap(), ratio(1, 1));
    }
}

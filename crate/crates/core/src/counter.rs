//! Exact model counting over a shared finite domain.
//!
//! A monadic model is fixed by which cell (complete predicate type) each
//! domain element occupies, plus which element each constant denotes. Only
//! the formulas that the statistics, ground facts and queries mention can
//! tell cells apart, so feasible cells are merged into regions with equal
//! truth signatures. Each vector of region counts `(n_1, .., n_R)` stands for
//!
//! ```text
//! N! / (n_1! .. n_R!)  *  prod_r |cells in r|^n_r
//! ```
//!
//! element assignments. Given the vector, statistics are decided by sums of
//! counts and each constant independently picks one of the elements whose
//! region satisfies its facts.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::kb::{
    ConstId, Formula, GroundFormula, GroundLiteral, KnowledgeBase, PredId, Rational,
    VacuousReference,
};

/// Widest vocabulary the cell tables accept.
pub const MAX_PREDICATES: usize = 24;

/// Default cap on the number of region-count vectors one count may visit.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// A complete unary type: bit `i` set iff predicate `i` holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell(pub u32);

impl Cell {
    pub fn holds(self, p: PredId) -> bool {
        (self.0 >> p.0) & 1 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("the universal axioms admit no cell: background knowledge is inconsistent")]
    InconsistentAxioms,
    #[error("conditioning set has no models")]
    EmptyCondition,
    #[error("{vectors} region-count vectors exceed the counting budget of {budget}")]
    BudgetExceeded { vectors: BigUint, budget: u64 },
    #[error("{0} predicates exceed the supported maximum of {MAX_PREDICATES}")]
    TooManyPredicates(usize),
    #[error("constant #{0} is not declared")]
    UnknownConstant(usize),
}

/// Cells whose truth assignment satisfies every universal axiom.
pub fn feasible_cells(kb: &KnowledgeBase) -> Result<Vec<Cell>, CountError> {
    let k = kb.predicates.len();
    if k > MAX_PREDICATES {
        return Err(CountError::TooManyPredicates(k));
    }
    let cells: Vec<Cell> = (0..1u32 << k)
        .map(Cell)
        .filter(|&c| kb.axioms.iter().all(|a| a.eval(c)))
        .collect();
    if cells.is_empty() {
        Err(CountError::InconsistentAxioms)
    } else {
        Ok(cells)
    }
}

/// Background knowledge plus the ground facts accepted so far; denotes the
/// set of models that satisfy all of them.
#[derive(Clone, Debug)]
pub struct WorldState<'kb> {
    kb: &'kb KnowledgeBase,
    facts: Vec<GroundFormula>,
}

impl<'kb> WorldState<'kb> {
    pub fn new(kb: &'kb KnowledgeBase) -> Self {
        WorldState {
            kb,
            facts: Vec::new(),
        }
    }

    pub fn with_evidence(kb: &'kb KnowledgeBase, evidence: &[GroundLiteral]) -> Self {
        WorldState {
            kb,
            facts: evidence.iter().map(|l| l.to_ground()).collect(),
        }
    }

    pub fn kb(&self) -> &'kb KnowledgeBase {
        self.kb
    }

    pub fn facts(&self) -> &[GroundFormula] {
        &self.facts
    }

    pub fn assume(&mut self, fact: GroundFormula) {
        if !self.facts.contains(&fact) {
            self.facts.push(fact);
        }
    }

    /// A copy of this state with one more fact.
    pub fn with(&self, fact: GroundFormula) -> Self {
        let mut next = self.clone();
        next.assume(fact);
        next
    }
}

#[derive(Clone, Debug)]
pub struct ModelCounter {
    pub budget: u64,
}

impl Default for ModelCounter {
    fn default() -> Self {
        ModelCounter {
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Result of one enumeration: models of the state, and of the state
/// conjoined with each query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    pub total: BigUint,
    pub with_query: Vec<BigUint>,
}

struct StatPlan {
    in_reference: Vec<bool>,
    in_both: Vec<bool>,
    lower: (BigInt, BigInt),
    upper: (BigInt, BigInt),
}

struct Plan {
    n: usize,
    sizes: Vec<usize>,
    stats: Vec<StatPlan>,
    // per mentioned constant: regions its facts allow
    placements: Vec<Vec<bool>>,
    // per query: (index into `placements`, regions allowed with the query added)
    queries: Vec<(usize, Vec<bool>)>,
    free_constants: usize,
    vacuous: VacuousReference,
}

impl ModelCounter {
    pub fn with_budget(budget: u64) -> Self {
        ModelCounter { budget }
    }

    pub fn count(&self, w: &WorldState<'_>) -> Result<BigUint, CountError> {
        Ok(self.tally(w, &[])?.total)
    }

    /// Counts the models of `w`, and of `w` plus each query, in one pass.
    pub fn tally(&self, w: &WorldState<'_>, queries: &[GroundFormula]) -> Result<Tally, CountError> {
        let plan = self.plan(w, queries)?;
        let mut walk = Walk::new(&plan, queries.len());
        walk.descend(0, plan.n, BigUint::one());
        Ok(Tally {
            total: walk.total,
            with_query: walk.with_query,
        })
    }

    pub fn proportion(
        &self,
        w: &WorldState<'_>,
        query: &GroundFormula,
    ) -> Result<Rational, CountError> {
        Ok(self.proportions(w, std::slice::from_ref(query))?.remove(0))
    }

    pub fn proportions(
        &self,
        w: &WorldState<'_>,
        queries: &[GroundFormula],
    ) -> Result<Vec<Rational>, CountError> {
        let t = self.tally(w, queries)?;
        if t.total.is_zero() {
            return Err(CountError::EmptyCondition);
        }
        let total = BigInt::from(t.total);
        Ok(t.with_query
            .into_iter()
            .map(|q| BigRational::new(BigInt::from(q), total.clone()))
            .collect())
    }

    /// True iff no model of `w` falsifies `query`.
    pub fn entails(&self, w: &WorldState<'_>, query: &GroundFormula) -> Result<bool, CountError> {
        let t = self.tally(w, &[query.negated()])?;
        if t.total.is_zero() {
            return Err(CountError::EmptyCondition);
        }
        Ok(t.with_query[0].is_zero())
    }

    pub fn consistent(&self, w: &WorldState<'_>) -> Result<bool, CountError> {
        Ok(!self.count(w)?.is_zero())
    }

    /// Number of region-count vectors a count over `w` with these queries visits.
    pub fn vector_count(
        &self,
        w: &WorldState<'_>,
        queries: &[GroundFormula],
    ) -> Result<BigUint, CountError> {
        let regions = self.regions(w, queries)?;
        Ok(compositions(w.kb.domain_size, regions.len()))
    }

    fn regions(
        &self,
        w: &WorldState<'_>,
        queries: &[GroundFormula],
    ) -> Result<Vec<(Vec<bool>, usize)>, CountError> {
        let kb = w.kb;
        for g in w.facts.iter().chain(queries) {
            if g.constant.0 >= kb.constants.len() {
                return Err(CountError::UnknownConstant(g.constant.0));
            }
        }
        let cells = feasible_cells(kb)?;
        let formulas = signature_formulas(kb, &w.facts, queries);
        let mut regions: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        for c in cells {
            let sig: Vec<bool> = formulas.iter().map(|f| f.eval(c)).collect();
            *regions.entry(sig).or_insert(0) += 1;
        }
        Ok(regions.into_iter().collect())
    }

    fn plan(&self, w: &WorldState<'_>, queries: &[GroundFormula]) -> Result<Plan, CountError> {
        let kb = w.kb;
        let regions = self.regions(w, queries)?;
        let vectors = compositions(kb.domain_size, regions.len());
        if vectors > BigUint::from(self.budget) {
            return Err(CountError::BudgetExceeded {
                vectors,
                budget: self.budget,
            });
        }
        let formulas = signature_formulas(kb, &w.facts, queries);
        let position = |f: &Formula| formulas.iter().position(|g| g == f).expect("indexed formula");
        let holds = |f: &Formula| -> Vec<bool> {
            let i = position(f);
            regions.iter().map(|(sig, _)| sig[i]).collect()
        };

        let stats = kb
            .stats
            .iter()
            .map(|s| {
                let in_reference = holds(&s.reference);
                let in_target = holds(&s.target);
                let in_both = in_reference
                    .iter()
                    .zip(&in_target)
                    .map(|(a, b)| *a && *b)
                    .collect();
                StatPlan {
                    in_reference,
                    in_both,
                    lower: (s.lower.numer().clone(), s.lower.denom().clone()),
                    upper: (s.upper.numer().clone(), s.upper.denom().clone()),
                }
            })
            .collect();

        let mut mentioned: Vec<ConstId> = w
            .facts
            .iter()
            .chain(queries)
            .map(|g| g.constant)
            .collect();
        mentioned.sort();
        mentioned.dedup();
        let placements: Vec<Vec<bool>> = mentioned
            .iter()
            .map(|&c| {
                let mut allowed = vec![true; regions.len()];
                for g in w.facts.iter().filter(|g| g.constant == c) {
                    for (a, h) in allowed.iter_mut().zip(holds(&g.formula)) {
                        *a &= h;
                    }
                }
                allowed
            })
            .collect();
        let queries = queries
            .iter()
            .map(|q| {
                let slot = mentioned.iter().position(|&c| c == q.constant).expect("mentioned");
                let allowed = placements[slot]
                    .iter()
                    .zip(holds(&q.formula))
                    .map(|(a, b)| *a && b)
                    .collect();
                (slot, allowed)
            })
            .collect();

        Ok(Plan {
            n: kb.domain_size,
            sizes: regions.iter().map(|(_, s)| *s).collect(),
            stats,
            placements,
            queries,
            free_constants: kb.constants.len() - mentioned.len(),
            vacuous: kb.vacuous,
        })
    }
}

fn signature_formulas(
    kb: &KnowledgeBase,
    facts: &[GroundFormula],
    queries: &[GroundFormula],
) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    let mut push = |f: &Formula| {
        if !out.contains(f) {
            out.push(f.clone());
        }
    };
    for s in &kb.stats {
        push(&s.target);
        push(&s.reference);
    }
    for g in facts.iter().chain(queries) {
        push(&g.formula);
    }
    out
}

/// Weak compositions of `n` into `parts` parts: C(n + parts - 1, parts - 1).
pub fn compositions(n: usize, parts: usize) -> BigUint {
    if parts == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::zero() };
    }
    binomial(n + parts - 1, parts - 1)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

struct Walk<'p> {
    plan: &'p Plan,
    binom: Vec<Vec<BigUint>>,
    powers: Vec<Vec<BigUint>>,
    counts: Vec<usize>,
    total: BigUint,
    with_query: Vec<BigUint>,
    free_factor: BigUint,
}

impl<'p> Walk<'p> {
    fn new(plan: &'p Plan, queries: usize) -> Self {
        let n = plan.n;
        let binom = (0..=n)
            .map(|m| (0..=m).map(|j| binomial(m, j)).collect())
            .collect();
        let powers = plan
            .sizes
            .iter()
            .map(|&s| {
                let base = BigUint::from(s);
                let mut row = vec![BigUint::one()];
                for j in 1..=n {
                    let next = &row[j - 1] * &base;
                    row.push(next);
                }
                row
            })
            .collect();
        Walk {
            plan,
            binom,
            powers,
            counts: Vec::with_capacity(plan.sizes.len()),
            total: BigUint::zero(),
            with_query: vec![BigUint::zero(); queries],
            free_factor: num_traits::pow(BigUint::from(n), plan.free_constants),
        }
    }

    fn descend(&mut self, region: usize, remaining: usize, weight: BigUint) {
        let last = self.plan.sizes.len().saturating_sub(1);
        if self.plan.sizes.is_empty() {
            return;
        }
        if region == last {
            let w = weight * &self.binom[remaining][remaining] * &self.powers[region][remaining];
            self.counts.push(remaining);
            self.leaf(&w);
            self.counts.pop();
            return;
        }
        for take in 0..=remaining {
            let w = &weight * &self.binom[remaining][take] * &self.powers[region][take];
            self.counts.push(take);
            self.descend(region + 1, remaining - take, w);
            self.counts.pop();
        }
    }

    fn sum(&self, mask: &[bool]) -> usize {
        self.counts
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(c, _)| *c)
            .sum()
    }

    fn leaf(&mut self, weight: &BigUint) {
        for s in &self.plan.stats {
            let reference = self.sum(&s.in_reference);
            if reference == 0 {
                if self.plan.vacuous == VacuousReference::Violated {
                    return;
                }
                continue;
            }
            let both = BigInt::from(self.sum(&s.in_both));
            let reference = BigInt::from(reference);
            // lower <= both / reference <= upper, cross-multiplied
            if &s.lower.0 * &reference > &s.lower.1 * &both
                || &both * &s.upper.1 > &s.upper.0 * &reference
            {
                return;
            }
        }
        let places: Vec<usize> = self.plan.placements.iter().map(|m| self.sum(m)).collect();
        let base = weight * &self.free_factor;
        if places.iter().all(|&p| p > 0) {
            let mut t = base.clone();
            for &p in &places {
                t *= p;
            }
            self.total += t;
        }
        for (qi, (slot, allowed)) in self.plan.queries.iter().enumerate() {
            let q = self.sum(allowed);
            if q == 0 || places.iter().enumerate().any(|(i, &p)| i != *slot && p == 0) {
                continue;
            }
            let mut t = base.clone();
            for (i, &p) in places.iter().enumerate() {
                t *= if i == *slot { q } else { p };
            }
            self.with_query[qi] += t;
        }
    }
}

/// [`ModelCounter::count`] with the default budget.
pub fn count_models(w: &WorldState<'_>) -> Result<BigUint, CountError> {
    ModelCounter::default().count(w)
}

pub fn proportion(w: &WorldState<'_>, query: &GroundFormula) -> Result<Rational, CountError> {
    ModelCounter::default().proportion(w, query)
}

pub fn entails(w: &WorldState<'_>, query: &GroundFormula) -> Result<bool, CountError> {
    ModelCounter::default().entails(w, query)
}

pub fn consistent(w: &WorldState<'_>) -> Result<bool, CountError> {
    ModelCounter::default().consistent(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{ratio, StatStatement};

    fn bird_fly(n: usize) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(n);
        kb.add_predicate("B");
        kb.add_predicate("F");
        kb.add_constant("a");
        kb
    }

    #[test]
    fn penguin_axiom_removes_two_cells() {
        let mut kb = KnowledgeBase::new(2);
        let bird = kb.add_predicate("Bird");
        kb.add_predicate("Fly");
        let penguin = kb.add_predicate("Penguin");
        kb.axioms.push(Formula::implies(penguin.clone(), bird.clone()));
        let cells = feasible_cells(&kb).unwrap();
        assert_eq!(cells.len(), 6);
        assert!(cells
            .iter()
            .all(|&c| !(penguin.eval(c) && !bird.eval(c))));
    }

    #[test]
    fn contradictory_axioms() {
        let mut kb = KnowledgeBase::new(2);
        let b = kb.add_predicate("Bird");
        kb.axioms.push(b.clone());
        kb.axioms.push(Formula::not(b));
        assert_eq!(feasible_cells(&kb), Err(CountError::InconsistentAxioms));
    }

    #[test]
    fn lottery_cells_with_three_species() {
        let mut kb = KnowledgeBase::new(2);
        let b = kb.add_predicate("B");
        let s: Vec<Formula> = (1..=3).map(|i| kb.add_predicate(&format!("S{i}"))).collect();
        kb.axioms.push(Formula::iff(b.clone(), Formula::disjunction(s.clone())));
        for i in 0..3 {
            let others = (0..3).filter(|&j| j != i).map(|j| Formula::not(s[j].clone()));
            kb.axioms.push(Formula::implies(s[i].clone(), Formula::conjunction(others)));
        }
        let cells = feasible_cells(&kb).unwrap();
        assert_eq!(cells.len(), 4);
        for c in cells {
            let species = s.iter().filter(|f| f.eval(c)).count();
            assert!(species <= 1);
            assert_eq!(b.eval(c), species == 1);
        }
    }

    #[test]
    fn one_predicate_two_elements_one_constant() {
        let mut kb = KnowledgeBase::new(2);
        kb.add_predicate("B");
        kb.add_constant("a");
        assert_eq!(count_models(&WorldState::new(&kb)).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn exact_statistic_with_evidence() {
        // 4^2 * 2 = 32 raw models; the oracle cross-check lives in the tests/ dir.
        let mut kb = bird_fly(2);
        kb.stats.push(StatStatement::new(Formula::atom(1), Formula::atom(0), ratio(1, 1), ratio(1, 1)));
        let w = WorldState::with_evidence(&kb, &[GroundLiteral::pos(0, 0)]);
        assert_eq!(count_models(&w).unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn symmetric_proportion() {
        let kb = bird_fly(3);
        let w = WorldState::with_evidence(&kb, &[GroundLiteral::pos(0, 0)]);
        let p = proportion(&w, &GroundLiteral::pos(1, 0).to_ground()).unwrap();
        assert_eq!(p, ratio(1, 2));
    }

    #[test]
    fn forced_by_exact_statistic() {
        let mut kb = bird_fly(3);
        kb.stats.push(StatStatement::new(Formula::atom(1), Formula::atom(0), ratio(1, 1), ratio(1, 1)));
        let w = WorldState::with_evidence(&kb, &[GroundLiteral::pos(0, 0)]);
        assert_eq!(proportion(&w, &GroundLiteral::pos(1, 0).to_ground()).unwrap(), ratio(1, 1));
        assert!(entails(&w, &GroundLiteral::pos(1, 0).to_ground()).unwrap());
        let contradiction = w.with(GroundLiteral::neg(1, 0).to_ground());
        assert!(!consistent(&contradiction).unwrap());
    }

    #[test]
    fn taxonomy_entailment() {
        let mut kb = KnowledgeBase::new(3);
        let bird = kb.add_predicate("Bird");
        let penguin = kb.add_predicate("Penguin");
        let a = kb.add_constant("a");
        kb.axioms.push(Formula::implies(penguin, bird.clone()));
        let w = WorldState::with_evidence(&kb, &[GroundLiteral::pos(1, 0)]);
        assert!(entails(&w, &bird.at(a)).unwrap());
    }

    #[test]
    fn no_statistics_means_no_entailment() {
        let kb = bird_fly(3);
        let w = WorldState::with_evidence(&kb, &[GroundLiteral::pos(0, 0)]);
        assert!(!entails(&w, &GroundLiteral::pos(1, 0).to_ground()).unwrap());
    }

    #[test]
    fn contradictory_evidence() {
        let kb = bird_fly(3);
        let w = WorldState::with_evidence(&kb, &[GroundLiteral::pos(0, 0), GroundLiteral::neg(0, 0)]);
        assert!(!consistent(&w).unwrap());
        assert_eq!(
            proportion(&w, &GroundLiteral::pos(1, 0).to_ground()),
            Err(CountError::EmptyCondition)
        );
    }

    #[test]
    fn budget_is_enforced() {
        let mut kb = KnowledgeBase::new(30);
        for i in 0..6 {
            kb.add_predicate(&format!("P{i}"));
        }
        kb.add_constant("a");
        let mut w = WorldState::new(&kb);
        for i in 0..6 {
            w.assume(Formula::atom(i).at(ConstId(0)));
        }
        let counter = ModelCounter::with_budget(1000);
        assert!(matches!(counter.count(&w), Err(CountError::BudgetExceeded { .. })));
    }

    #[test]
    fn vacuous_reference_policy() {
        // N=1: the only models with no bird satisfy the exact statistic vacuously.
        let mut kb = bird_fly(1);
        kb.stats.push(StatStatement::new(Formula::atom(1), Formula::atom(0), ratio(1, 2), ratio(1, 2)));
        assert_eq!(count_models(&WorldState::new(&kb)).unwrap(), BigUint::from(2u32));
        kb.vacuous = VacuousReference::Violated;
        assert_eq!(count_models(&WorldState::new(&kb)).unwrap(), BigUint::zero());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(compositions(10, 6), BigUint::from(3003u32));
    }
}

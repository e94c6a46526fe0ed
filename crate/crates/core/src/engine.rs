//! Extensions of grounded default theories.
//!
//! Membership in a deductive closure is never materialized: every question
//! about what the current facts entail goes to the model counter, which also
//! supplies the proportion of relevant models satisfying a consequent.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::counter::{CountError, ModelCounter, WorldState};
use crate::kb::{ConstId, DefaultRule, GroundFormula, GroundLiteral, KnowledgeBase, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("background knowledge and evidence are inconsistent")]
    Inconsistent,
    #[error("evidence enumeration needs {sets} sets, over the bound of {bound}")]
    EvidenceBoundExceeded { sets: BigUint, bound: u64 },
    #[error("ordering names rule {0}, but only {1} rules exist")]
    UnknownRule(usize, usize),
    #[error(transparent)]
    Count(#[from] CountError),
}

/// A rule schema instantiated at one constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundRule {
    pub rule: DefaultRule,
    pub constant: ConstId,
    /// Position of the schema in the rule list it came from.
    pub index: usize,
}

impl GroundRule {
    pub fn prerequisite(&self) -> GroundFormula {
        self.rule.prerequisite.at(self.constant)
    }

    pub fn justifications(&self) -> Vec<GroundFormula> {
        self.rule
            .justifications
            .iter()
            .map(|j| j.at(self.constant))
            .collect()
    }

    pub fn consequent(&self) -> GroundFormula {
        self.rule.consequent.at(self.constant)
    }

    pub fn show(&self, kb: &KnowledgeBase) -> String {
        format!("{} @ {}", kb.show_rule(&self.rule), kb.constants[self.constant.0])
    }
}

/// Every rule at every declared constant, rule-major.
pub fn ground_rules(kb: &KnowledgeBase, rules: &[DefaultRule]) -> Vec<GroundRule> {
    rules
        .iter()
        .enumerate()
        .flat_map(|(index, rule)| {
            (0..kb.constants.len()).map(move |c| GroundRule {
                rule: rule.clone(),
                constant: ConstId(c),
                index,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Applicability {
    Applies,
    NoPrerequisite,
    Blocked,
}

/// Applicability plus the proportion of current models satisfying the consequent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assessment {
    pub applicability: Applicability,
    pub proportion: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: GroundRule,
    pub proportion: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub conclusions: Vec<GroundFormula>,
    pub trace: Vec<TraceStep>,
    pub final_proportion: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Ordering {
    /// Highest current consequent proportion first, ties by declaration order.
    #[default]
    Greedy,
    Declared,
    /// Rule indices in priority order; rules not listed never fire.
    Explicit(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdOptions {
    pub epsilon_star: Rational,
    pub ordering: Ordering,
    /// Fire at `p = 1 - ε*` too.
    pub inclusive: bool,
}

impl ThresholdOptions {
    pub fn new(epsilon_star: Rational) -> Self {
        ThresholdOptions {
            epsilon_star,
            ordering: Ordering::Greedy,
            inclusive: false,
        }
    }

    pub fn clears(&self, p: &Rational) -> bool {
        let bar = Rational::one() - &self.epsilon_star;
        if self.inclusive {
            *p >= bar
        } else {
            *p > bar
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdOutcome {
    pub extension: Extension,
    /// False when every closed derivation refuted a justification it relied on;
    /// the extension is then the one the ordering reaches first.
    pub successful: bool,
    /// Rules applicable at the end whose proportion missed the threshold.
    pub below_threshold: Vec<TraceStep>,
}

pub struct Engine<'kb> {
    kb: &'kb KnowledgeBase,
    evidence: Vec<GroundLiteral>,
    ground: Vec<GroundRule>,
    counter: ModelCounter,
}

impl<'kb> Engine<'kb> {
    pub fn new(kb: &'kb KnowledgeBase, evidence: &[GroundLiteral], rules: &[DefaultRule]) -> Self {
        Engine {
            kb,
            evidence: evidence.to_vec(),
            ground: ground_rules(kb, rules),
            counter: ModelCounter::default(),
        }
    }

    pub fn with_counter(mut self, counter: ModelCounter) -> Self {
        self.counter = counter;
        self
    }

    pub fn ground(&self) -> &[GroundRule] {
        &self.ground
    }

    fn base(&self) -> WorldState<'kb> {
        WorldState::with_evidence(self.kb, &self.evidence)
    }

    fn world(&self, applied: &[usize]) -> WorldState<'kb> {
        let mut w = self.base();
        for &i in applied {
            w.assume(self.ground[i].consequent());
        }
        w
    }

    fn ensure_consistent(&self) -> Result<(), EngineError> {
        if self.counter.consistent(&self.base())? {
            Ok(())
        } else {
            Err(EngineError::Inconsistent)
        }
    }

    pub fn assess(&self, gr: &GroundRule, w: &WorldState<'_>) -> Result<Assessment, CountError> {
        assess_with(&self.counter, gr, w)
    }

    fn finish(&self, applied: &[usize], trace: Vec<TraceStep>) -> Result<Extension, CountError> {
        let conclusions: Vec<GroundFormula> = applied.iter().map(|&i| self.ground[i].consequent()).collect();
        let final_proportion = self.proportion_of(&conclusions)?;
        Ok(Extension {
            conclusions,
            trace,
            final_proportion,
        })
    }

    /// Proportion of models of the evidence that satisfy all `conclusions`.
    pub fn proportion_of(&self, conclusions: &[GroundFormula]) -> Result<Rational, CountError> {
        let base = self.base();
        let total = self.counter.count(&base)?;
        if total.is_zero() {
            return Err(CountError::EmptyCondition);
        }
        let mut w = base;
        for c in conclusions {
            w.assume(c.clone());
        }
        let part = self.counter.count(&w)?;
        Ok(BigRational::new(part.into(), total.into()))
    }

    /// All Reiter extensions, found by exploring application orders and
    /// keeping the closed, successful ones that pass the fixed-point test.
    pub fn reiter_extensions(&self) -> Result<Vec<Extension>, EngineError> {
        self.ensure_consistent()?;
        let mut search = ReiterSearch {
            engine: self,
            seen: HashSet::new(),
            found: Vec::new(),
        };
        search.explore(&mut Vec::new(), &mut Vec::new())?;
        Ok(search.found.into_iter().map(|(_, e)| e).collect())
    }

    /// Γ(S) fixed-point test: closing the evidence under the rules whose
    /// justifications `final_world` leaves consistent must reproduce `applied`.
    fn is_fixed_point(&self, applied: &BTreeSet<usize>, final_world: &WorldState<'_>) -> Result<bool, CountError> {
        let mut open = Vec::new();
        for (i, gr) in self.ground.iter().enumerate() {
            let t = self.counter.tally(final_world, &gr.justifications())?;
            if t.with_query.iter().all(|c| !c.is_zero()) {
                open.push(i);
            }
        }
        let mut closure = BTreeSet::new();
        let mut w = self.base();
        loop {
            let mut grew = false;
            for &i in &open {
                if closure.contains(&i) {
                    continue;
                }
                if self.counter.entails(&w, &self.ground[i].prerequisite())? {
                    closure.insert(i);
                    w.assume(self.ground[i].consequent());
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        Ok(closure == *applied)
    }

    /// Sequential thresholding: a rule fires only while the proportion of
    /// current models satisfying its consequent clears `1 - ε*`.
    ///
    /// Candidates are tried in the ordering's preference; a branch that closes
    /// with a refuted justification is abandoned for the next candidate.
    pub fn thresholded_extension(&self, opts: &ThresholdOptions) -> Result<ThresholdOutcome, EngineError> {
        self.ensure_consistent()?;
        if let Ordering::Explicit(order) = &opts.ordering {
            let count = self.ground.iter().map(|g| g.index + 1).max().unwrap_or(0);
            if let Some(&bad) = order.iter().find(|&&i| i >= count) {
                return Err(EngineError::UnknownRule(bad, count));
            }
        }
        let mut search = ThresholdSearch {
            engine: self,
            opts,
            failed: HashSet::new(),
            first_closed: None,
        };
        if let Some(outcome) = search.run(&mut Vec::new(), &mut Vec::new())? {
            return Ok(outcome);
        }
        let (applied, trace, below) = search.first_closed.expect("search visits at least one closed state");
        Ok(ThresholdOutcome {
            extension: self.finish(&applied, trace)?,
            successful: false,
            below_threshold: below,
        })
    }
}

fn assess_with(counter: &ModelCounter, gr: &GroundRule, w: &WorldState<'_>) -> Result<Assessment, CountError> {
    let justifications = gr.justifications();
    let mut queries = Vec::with_capacity(justifications.len() + 2);
    queries.push(gr.prerequisite().negated());
    queries.extend(justifications);
    queries.push(gr.consequent());
    let t = counter.tally(w, &queries)?;
    if t.total.is_zero() {
        return Err(CountError::EmptyCondition);
    }
    let last = t.with_query.len() - 1;
    let applicability = if !t.with_query[0].is_zero() {
        Applicability::NoPrerequisite
    } else if t.with_query[1..last].iter().any(|c| c.is_zero()) {
        Applicability::Blocked
    } else {
        Applicability::Applies
    };
    Ok(Assessment {
        applicability,
        proportion: BigRational::new(t.with_query[last].clone().into(), t.total.into()),
    })
}

struct ReiterSearch<'e, 'kb> {
    engine: &'e Engine<'kb>,
    seen: HashSet<BTreeSet<usize>>,
    found: Vec<(BTreeSet<usize>, Extension)>,
}

impl ReiterSearch<'_, '_> {
    fn explore(&mut self, applied: &mut Vec<usize>, trace: &mut Vec<TraceStep>) -> Result<(), EngineError> {
        let key: BTreeSet<usize> = applied.iter().copied().collect();
        if !self.seen.insert(key.clone()) {
            return Ok(());
        }
        let e = self.engine;
        let w = e.world(applied);
        if !e.counter.consistent(&w)? {
            return Ok(());
        }
        let mut next = Vec::new();
        for (i, gr) in e.ground.iter().enumerate() {
            if key.contains(&i) {
                continue;
            }
            let a = e.assess(gr, &w)?;
            if a.applicability == Applicability::Applies {
                next.push((i, a.proportion));
            }
        }
        if next.is_empty() {
            if e.is_fixed_point(&key, &w)? && !self.found.iter().any(|(k, _)| *k == key) {
                let ext = e.finish(applied, trace.clone())?;
                self.found.push((key, ext));
            }
            return Ok(());
        }
        for (i, p) in next {
            applied.push(i);
            trace.push(TraceStep {
                rule: e.ground[i].clone(),
                proportion: p,
            });
            self.explore(applied, trace)?;
            applied.pop();
            trace.pop();
        }
        Ok(())
    }
}

type Closed = (Vec<usize>, Vec<TraceStep>, Vec<TraceStep>);

struct ThresholdSearch<'e, 'kb> {
    engine: &'e Engine<'kb>,
    opts: &'e ThresholdOptions,
    failed: HashSet<BTreeSet<usize>>,
    first_closed: Option<Closed>,
}

impl ThresholdSearch<'_, '_> {
    fn rank(&self, i: usize) -> Option<usize> {
        let gr = &self.engine.ground[i];
        match &self.opts.ordering {
            Ordering::Greedy | Ordering::Declared => Some(i),
            Ordering::Explicit(order) => order
                .iter()
                .position(|&r| r == gr.index)
                .map(|pos| pos * self.engine.kb.constants.len() + gr.constant.0),
        }
    }

    fn run(&mut self, applied: &mut Vec<usize>, trace: &mut Vec<TraceStep>) -> Result<Option<ThresholdOutcome>, EngineError> {
        let key: BTreeSet<usize> = applied.iter().copied().collect();
        if self.failed.contains(&key) {
            return Ok(None);
        }
        let e = self.engine;
        let w = e.world(applied);
        let mut firing = Vec::new();
        let mut below = Vec::new();
        for (i, gr) in e.ground.iter().enumerate() {
            if key.contains(&i) {
                continue;
            }
            let Some(rank) = self.rank(i) else { continue };
            let a = e.assess(gr, &w)?;
            if a.applicability != Applicability::Applies {
                continue;
            }
            if self.opts.clears(&a.proportion) {
                firing.push((rank, i, a.proportion));
            } else {
                below.push(TraceStep {
                    rule: gr.clone(),
                    proportion: a.proportion,
                });
            }
        }
        if firing.is_empty() {
            let mut successful = true;
            for &i in applied.iter() {
                let t = e.counter.tally(&w, &e.ground[i].justifications())?;
                if t.with_query.iter().any(|c| c.is_zero()) {
                    successful = false;
                    break;
                }
            }
            if successful {
                return Ok(Some(ThresholdOutcome {
                    extension: e.finish(applied, trace.clone())?,
                    successful: true,
                    below_threshold: below,
                }));
            }
            if self.first_closed.is_none() {
                self.first_closed = Some((applied.clone(), trace.clone(), below));
            }
            self.failed.insert(key);
            return Ok(None);
        }
        match self.opts.ordering {
            Ordering::Greedy => firing.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0))),
            _ => firing.sort_by_key(|f| f.0),
        }
        for (_, i, p) in firing {
            let next = w.with(e.ground[i].consequent());
            if !e.counter.consistent(&next)? {
                continue;
            }
            applied.push(i);
            trace.push(TraceStep {
                rule: e.ground[i].clone(),
                proportion: p,
            });
            let found = self.run(applied, trace)?;
            applied.pop();
            trace.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        if self.first_closed.is_none() {
            // every firing consequent contradicted the state; close here
            let mut stuck = Vec::new();
            for (i, gr) in e.ground.iter().enumerate() {
                if !key.contains(&i) {
                    let a = e.assess(gr, &w)?;
                    if a.applicability == Applicability::Applies {
                        stuck.push(TraceStep {
                            rule: gr.clone(),
                            proportion: a.proportion,
                        });
                    }
                }
            }
            self.first_closed = Some((applied.clone(), trace.clone(), stuck));
        }
        self.failed.insert(key);
        Ok(None)
    }
}

/// Reiter extensions of `⟨rules, K ∪ E⟩` grounded over the declared constants.
pub fn reiter_extensions(
    kb: &KnowledgeBase,
    evidence: &[GroundLiteral],
    rules: &[DefaultRule],
) -> Result<Vec<Extension>, EngineError> {
    Engine::new(kb, evidence, rules).reiter_extensions()
}

pub fn thresholded_extension(
    kb: &KnowledgeBase,
    evidence: &[GroundLiteral],
    rules: &[DefaultRule],
    opts: &ThresholdOptions,
) -> Result<ThresholdOutcome, EngineError> {
    Engine::new(kb, evidence, rules).thresholded_extension(opts)
}

pub fn applicable(gr: &GroundRule, w: &WorldState<'_>) -> Result<Applicability, CountError> {
    Ok(assess_with(&ModelCounter::default(), gr, w)?.applicability)
}

/// Proportion of models of `K ∪ E` satisfying every conclusion of `ext`.
pub fn extension_proportion(
    ext: &Extension,
    kb: &KnowledgeBase,
    evidence: &[GroundLiteral],
) -> Result<Rational, CountError> {
    Engine::new(kb, evidence, &[]).proportion_of(&ext.conclusions)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessOptions {
    /// How many constants evidence may mention; missing ones are added.
    pub constants: usize,
    /// Largest number of evidence sets to enumerate.
    pub bound: u64,
    /// Accept errors equal to δ.
    pub inclusive: bool,
}

impl Default for SoundnessOptions {
    fn default() -> Self {
        SoundnessOptions {
            constants: 1,
            bound: 1_000_000,
            inclusive: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessReport {
    pub valid: bool,
    /// First evidence set reaching the largest error.
    pub worst_evidence: Option<Vec<GroundLiteral>>,
    pub worst_constant: Option<ConstId>,
    pub worst_error: Option<Rational>,
    pub evidence_sets: u64,
    pub consistent_sets: u64,
    pub applicable_cases: u64,
}

/// Checks δ-validity of `rule` by enumerating every evidence set of ground
/// literals over the first `opts.constants` constants and all predicates.
///
/// For each consistent set and each constant the rule applies to, the error
/// is the proportion of models falsifying the consequent.
pub fn delta_valid_check(
    rule: &DefaultRule,
    kb: &KnowledgeBase,
    delta: &Rational,
    opts: &SoundnessOptions,
) -> Result<SoundnessReport, EngineError> {
    delta_valid_check_with(&ModelCounter::default(), rule, kb, delta, opts)
}

pub fn delta_valid_check_with(
    counter: &ModelCounter,
    rule: &DefaultRule,
    kb: &KnowledgeBase,
    delta: &Rational,
    opts: &SoundnessOptions,
) -> Result<SoundnessReport, EngineError> {
    let mut kb = kb.clone();
    let mut fresh = 0;
    while kb.constants.len() < opts.constants {
        fresh += 1;
        let name = format!("c{fresh}");
        if kb.predicate(&name).is_none() && kb.constant(&name).is_none() {
            kb.add_constant(&name);
        }
    }
    let k = kb.predicates.len();
    let slots = opts.constants * k;
    let sets = BigUint::from(3u32).pow(slots as u32);
    if sets > BigUint::from(opts.bound) {
        return Err(EngineError::EvidenceBoundExceeded {
            sets,
            bound: opts.bound,
        });
    }

    let ground: Vec<GroundRule> = (0..opts.constants)
        .map(|c| GroundRule {
            rule: rule.clone(),
            constant: ConstId(c),
            index: 0,
        })
        .collect();
    let mut report = SoundnessReport {
        valid: true,
        worst_evidence: None,
        worst_constant: None,
        worst_error: None,
        evidence_sets: 0,
        consistent_sets: 0,
        applicable_cases: 0,
    };
    let mut digits = vec![0u8; slots];
    loop {
        let evidence: Vec<GroundLiteral> = digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(s, &d)| {
                let (c, p) = (s / k, s % k);
                if d == 1 {
                    GroundLiteral::pos(p, c)
                } else {
                    GroundLiteral::neg(p, c)
                }
            })
            .collect();
        report.evidence_sets += 1;
        let w = WorldState::with_evidence(&kb, &evidence);
        if counter.consistent(&w)? {
            report.consistent_sets += 1;
            for gr in &ground {
                let a = assess_with(counter, gr, &w)?;
                if a.applicability != Applicability::Applies {
                    continue;
                }
                report.applicable_cases += 1;
                let error = Rational::one() - a.proportion;
                if report.worst_error.as_ref().is_none_or(|w| error > *w) {
                    report.worst_error = Some(error);
                    report.worst_evidence = Some(evidence.clone());
                    report.worst_constant = Some(gr.constant);
                }
            }
        }
        if !advance(&mut digits) {
            break;
        }
    }
    if let Some(worst) = &report.worst_error {
        report.valid = if opts.inclusive { worst <= delta } else { worst < delta };
    }
    Ok(report)
}

fn advance(digits: &mut [u8]) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < 2 {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

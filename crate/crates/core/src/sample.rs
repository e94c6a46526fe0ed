//! Seeded random knowledge bases, world states and default theories.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kb::{
    ratio, ConstId, DefaultRule, Formula, GroundFormula, GroundLiteral, KnowledgeBase,
    StatStatement, VacuousReference,
};

/// Size limits for generated samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_domain: usize,
    pub max_predicates: usize,
    pub max_constants: usize,
    pub max_axioms: usize,
    pub max_stats: usize,
    pub max_facts: usize,
    pub max_queries: usize,
    pub max_rules: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_domain: 4,
            max_predicates: 3,
            max_constants: 2,
            max_axioms: 2,
            max_stats: 2,
            max_facts: 2,
            max_queries: 3,
            max_rules: 3,
        }
    }
}

/// A knowledge base with ground facts and queries about them.
#[derive(Clone, Debug)]
pub struct Sample {
    pub kb: KnowledgeBase,
    pub facts: Vec<GroundFormula>,
    pub queries: Vec<GroundFormula>,
}

/// A knowledge base with literal evidence and default rules.
#[derive(Clone, Debug)]
pub struct Theory {
    pub kb: KnowledgeBase,
    pub evidence: Vec<GroundLiteral>,
    pub rules: Vec<DefaultRule>,
}

const NAMES: [&str; 6] = ["P", "Q", "R", "S", "T", "U"];
const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];

pub fn random_formula<R: Rng>(rng: &mut R, k: usize, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..12) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(rng.gen_range(0..k)),
        };
    }
    let mut sub = || random_formula(rng, k, depth - 1);
    let (a, b) = (sub(), sub());
    match rng.gen_range(0..6) {
        0 => Formula::not(a),
        1 | 2 => Formula::and(a, b),
        3 => Formula::or(a, b),
        4 => Formula::implies(a, b),
        _ => Formula::iff(a, b),
    }
}

fn random_literal_formula<R: Rng>(rng: &mut R, k: usize) -> Formula {
    let atom = Formula::atom(rng.gen_range(0..k));
    if rng.gen_bool(0.5) {
        atom
    } else {
        Formula::not(atom)
    }
}

fn random_interval<R: Rng>(rng: &mut R) -> (crate::kb::Rational, crate::kb::Rational) {
    let d = rng.gen_range(1..=4i64);
    let lo = rng.gen_range(0..=d);
    let hi = rng.gen_range(lo..=d);
    (ratio(lo, d), ratio(hi, d))
}

fn random_kb<R: Rng>(rng: &mut R, limits: &Limits, min_constants: usize) -> KnowledgeBase {
    let n = rng.gen_range(1..=limits.max_domain);
    let k = rng.gen_range(1..=limits.max_predicates.min(NAMES.len()));
    let c = rng.gen_range(min_constants..=limits.max_constants.min(CONSTANTS.len()).max(min_constants));
    let mut kb = KnowledgeBase::new(n);
    for name in &NAMES[..k] {
        kb.add_predicate(name);
    }
    for name in &CONSTANTS[..c] {
        kb.add_constant(name);
    }
    if rng.gen_bool(0.2) {
        kb.vacuous = VacuousReference::Violated;
    }
    for _ in 0..rng.gen_range(0..=limits.max_axioms) {
        kb.axioms.push(random_formula(rng, k, 2));
    }
    for _ in 0..rng.gen_range(0..=limits.max_stats) {
        let (lo, hi) = random_interval(rng);
        kb.stats
            .push(StatStatement::new(random_formula(rng, k, 1), random_formula(rng, k, 1), lo, hi));
    }
    kb
}

fn random_ground<R: Rng>(rng: &mut R, kb: &KnowledgeBase) -> GroundFormula {
    let c = ConstId(rng.gen_range(0..kb.constants.len()));
    random_formula(rng, kb.predicates.len(), 2).at(c)
}

pub fn random_sample<R: Rng>(rng: &mut R, limits: &Limits) -> Sample {
    let kb = random_kb(rng, limits, 0);
    let mut facts = Vec::new();
    let mut queries = Vec::new();
    if !kb.constants.is_empty() {
        for _ in 0..rng.gen_range(0..=limits.max_facts) {
            facts.push(random_ground(rng, &kb));
        }
        for _ in 0..rng.gen_range(1..=limits.max_queries) {
            queries.push(random_ground(rng, &kb));
        }
    }
    Sample { kb, facts, queries }
}

/// A random theory whose rules are normal or semi-normal with literal parts.
pub fn random_theory<R: Rng>(rng: &mut R, limits: &Limits) -> Theory {
    let kb = random_kb(rng, limits, 1);
    let k = kb.predicates.len();
    let mut evidence = Vec::new();
    let mut slots: Vec<(usize, usize)> = (0..kb.constants.len())
        .flat_map(|c| (0..k).map(move |p| (p, c)))
        .collect();
    slots.shuffle(rng);
    for &(p, c) in slots.iter().take(rng.gen_range(0..=limits.max_facts)) {
        evidence.push(if rng.gen_bool(0.5) {
            GroundLiteral::pos(p, c)
        } else {
            GroundLiteral::neg(p, c)
        });
    }
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(1..=limits.max_rules) {
        let prerequisite = if rng.gen_bool(0.2) {
            Formula::True
        } else {
            random_literal_formula(rng, k)
        };
        let consequent = random_literal_formula(rng, k);
        let mut justifications = vec![consequent.clone()];
        if rng.gen_bool(0.3) {
            justifications.push(random_literal_formula(rng, k));
        }
        rules.push(DefaultRule::declared(prerequisite, justifications, consequent));
    }
    Theory { kb, evidence, rules }
}

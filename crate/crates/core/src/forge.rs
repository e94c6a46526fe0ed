//! Candidate default rules from statistical statements, and the δ filter.
//!
//! Two statistics about the same target `φ` with reference classes `ψ` and
//! `ψ'` are compared by subset entailment between `ψ` and `ψ'` (from the
//! universal axioms alone) and by how their intervals `[p, q]`, `[p', q']`
//! relate. The combination decides which reference classes yield a rule
//! `ψ : φ / φ` and which other classes each rule must exclude through extra
//! justifications `¬ψ'`.

use std::collections::BTreeMap;

use num_traits::One;
use thiserror::Error;

use crate::counter::{feasible_cells, CountError};
use crate::kb::{
    format_rational, CaseTag, DefaultRule, Derivation, Formula, KnowledgeBase, Provenance,
    Rational, RuleOrigin, StatStatement,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForgeError {
    #[error("no statistical statement has target `{0}`")]
    NoStatistics(String),
    #[error("knowledge base does not match the species schema: {0}")]
    NotLottery(String),
    #[error(transparent)]
    Count(#[from] CountError),
}

/// How pairwise recipe outputs combine when three or more statistics share
/// a target.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Composition {
    /// One rule per reference class: its exclusions are the union of those
    /// every pair demands, and a class suppressed by any pair gets no rule.
    #[default]
    Merge,
    /// Every pair's rules, deduplicated by shape.
    PairUnion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    pub target: Formula,
    pub candidates: Vec<DefaultRule>,
    pub rejected: Vec<(DefaultRule, String)>,
    pub warnings: Vec<String>,
}

/// True iff every feasible cell satisfying `psi` satisfies `psi2`.
///
/// Only universal axioms count here; statistics with bound 1 do not.
pub fn entails_subset(kb: &KnowledgeBase, psi: &Formula, psi2: &Formula) -> Result<bool, CountError> {
    Ok(feasible_cells(kb)?
        .into_iter()
        .all(|c| !psi.eval(c) || psi2.eval(c)))
}

/// Statistics about `target`, including complements of statistics about its
/// negation, deduplicated, in declaration order.
pub fn statistics_for(kb: &KnowledgeBase, target: &Formula) -> Vec<StatStatement> {
    let negated = target.negated();
    let mut out: Vec<StatStatement> = Vec::new();
    for s in &kb.stats {
        let candidate = if s.target == *target {
            s.clone()
        } else if s.target == negated {
            s.complement()
        } else {
            continue;
        };
        if !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Side {
    Rule { exclude: Option<Formula> },
    Suppressed(String),
}

#[derive(Clone, Debug)]
struct PairOutcome {
    case: CaseTag,
    first: Side,
    second: Side,
    coextensive: bool,
}

fn subcase(p: &Rational, q: &Rational, p2: &Rational, q2: &Rational) -> char {
    if (p <= p2 && q <= q2) || (p2 <= p && q2 <= q) {
        'a'
    } else if p <= p2 && q2 <= q {
        'b'
    } else {
        'c'
    }
}

fn keep() -> Side {
    Side::Rule { exclude: None }
}

fn excluding(f: &Formula) -> Side {
    Side::Rule {
        exclude: Some(f.clone()),
    }
}

/// Applies the recipe to one pair. `first`/`second` describe the rules for
/// `s.reference` and `s2.reference` respectively.
fn classify(kb: &KnowledgeBase, s: &StatStatement, s2: &StatStatement) -> Result<PairOutcome, CountError> {
    let (psi, psi2) = (&s.reference, &s2.reference);
    let forward = entails_subset(kb, psi, psi2)?;
    let backward = entails_subset(kb, psi2, psi)?;
    let outcome = if forward || backward {
        // case 1 reads the pair as (specific, general); case 2 is its mirror
        let (narrow, gen, case) = if forward { (s, s2, 1) } else { (s2, s, 2) };
        let sub = subcase(&narrow.lower, &narrow.upper, &gen.lower, &gen.upper);
        let (narrow_side, gen_side) = match sub {
            'b' => (
                Side::Suppressed(format!(
                    "case {case}b: the general interval is nested in the specific one"
                )),
                keep(),
            ),
            _ => (keep(), excluding(&narrow.reference)),
        };
        let (first, second) = if forward {
            (narrow_side, gen_side)
        } else {
            (gen_side, narrow_side)
        };
        PairOutcome {
            case: CaseTag::new(case, sub).expect("valid tag"),
            first,
            second,
            coextensive: forward && backward,
        }
    } else {
        let sub = subcase(&s.lower, &s.upper, &s2.lower, &s2.upper);
        let (first, second) = match sub {
            'a' => (excluding(psi2), excluding(psi)),
            'b' => (excluding(psi2), keep()),
            _ => (keep(), excluding(psi)),
        };
        PairOutcome {
            case: CaseTag::new(3, sub).expect("valid tag"),
            first,
            second,
            coextensive: false,
        }
    };
    Ok(outcome)
}

fn build_rule(
    target: &Formula,
    basis: StatStatement,
    exclusions: &[Formula],
    derivations: Vec<Derivation>,
) -> DefaultRule {
    let mut justifications = vec![target.clone()];
    for e in exclusions {
        let j = e.negated();
        if !justifications.contains(&j) {
            justifications.push(j);
        }
    }
    DefaultRule {
        prerequisite: basis.reference.clone(),
        justifications,
        consequent: target.clone(),
        origin: RuleOrigin::Generated(Provenance { basis, derivations }),
    }
}

fn intersect(a: &StatStatement, b: &StatStatement) -> StatStatement {
    StatStatement {
        target: a.target.clone(),
        reference: a.reference.clone(),
        lower: a.lower.clone().max(b.lower.clone()),
        upper: a.upper.clone().min(b.upper.clone()),
    }
}

/// Candidate defaults for conclusions `target(a)`, merged per reference class.
pub fn generate_candidates(kb: &KnowledgeBase, target: &Formula) -> Result<CandidateSet, ForgeError> {
    generate_candidates_with(kb, target, Composition::Merge)
}

pub fn generate_candidates_with(
    kb: &KnowledgeBase,
    target: &Formula,
    composition: Composition,
) -> Result<CandidateSet, ForgeError> {
    let stats = statistics_for(kb, target);
    if stats.is_empty() {
        return Err(ForgeError::NoStatistics(kb.show(target).to_string()));
    }
    let mut set = CandidateSet {
        target: target.clone(),
        candidates: Vec::new(),
        rejected: Vec::new(),
        warnings: Vec::new(),
    };

    let mut pairs = Vec::new();
    for i in 0..stats.len() {
        for j in i + 1..stats.len() {
            let outcome = classify(kb, &stats[i], &stats[j])?;
            if outcome.coextensive {
                set.warnings.push(format!(
                    "reference classes `{}` and `{}` are coextensive; keeping a single rule",
                    kb.show(&stats[i].reference),
                    kb.show(&stats[j].reference)
                ));
            }
            pairs.push((i, j, outcome));
        }
    }

    match composition {
        Composition::Merge => merge(kb, target, &stats, &pairs, &mut set),
        Composition::PairUnion => pair_union(target, &stats, &pairs, &mut set),
    }
    Ok(set)
}

fn merge(
    kb: &KnowledgeBase,
    target: &Formula,
    stats: &[StatStatement],
    pairs: &[(usize, usize, PairOutcome)],
    set: &mut CandidateSet,
) {
    struct Acc {
        basis: StatStatement,
        exclusions: Vec<Formula>,
        derivations: Vec<Derivation>,
        suppressed: Vec<String>,
    }
    let mut acc: Vec<Acc> = stats
        .iter()
        .map(|s| Acc {
            basis: s.clone(),
            exclusions: Vec::new(),
            derivations: Vec::new(),
            suppressed: Vec::new(),
        })
        .collect();
    for (i, j, outcome) in pairs {
        let (i, j) = (*i, *j);
        if outcome.coextensive {
            let narrowed = intersect(&acc[i].basis, &stats[j]);
            acc[i].basis = narrowed;
            acc[i].derivations.push(Derivation {
                case: outcome.case,
                partner: stats[j].clone(),
            });
            acc[j].suppressed.push(format!(
                "coextensive with `{}`",
                kb.show(&stats[i].reference)
            ));
            continue;
        }
        for (me, other, side) in [(i, j, &outcome.first), (j, i, &outcome.second)] {
            acc[me].derivations.push(Derivation {
                case: outcome.case,
                partner: stats[other].clone(),
            });
            match side {
                Side::Rule { exclude: Some(f) } => {
                    if !acc[me].exclusions.contains(f) {
                        acc[me].exclusions.push(f.clone());
                    }
                }
                Side::Rule { exclude: None } => {}
                Side::Suppressed(why) => acc[me].suppressed.push(why.clone()),
            }
        }
    }
    for a in acc {
        let rule = build_rule(target, a.basis, &a.exclusions, a.derivations);
        if a.suppressed.is_empty() {
            push_unique(&mut set.candidates, rule);
        } else {
            set.rejected.push((rule, a.suppressed.join("; ")));
        }
    }
}

fn pair_union(
    target: &Formula,
    stats: &[StatStatement],
    pairs: &[(usize, usize, PairOutcome)],
    set: &mut CandidateSet,
) {
    if stats.len() == 1 {
        set.candidates
            .push(build_rule(target, stats[0].clone(), &[], Vec::new()));
        return;
    }
    for (i, j, outcome) in pairs {
        for (me, other, side) in [(*i, *j, &outcome.first), (*j, *i, &outcome.second)] {
            let derivation = vec![Derivation {
                case: outcome.case,
                partner: stats[other].clone(),
            }];
            let basis = if outcome.coextensive {
                intersect(&stats[me], &stats[other])
            } else {
                stats[me].clone()
            };
            match side {
                Side::Rule { exclude } => {
                    if outcome.coextensive && me == *j {
                        continue;
                    }
                    let exclusions: Vec<Formula> = exclude.iter().cloned().collect();
                    push_unique(
                        &mut set.candidates,
                        build_rule(target, basis, &exclusions, derivation),
                    );
                }
                Side::Suppressed(why) => set
                    .rejected
                    .push((build_rule(target, basis, &[], derivation), why.clone())),
            }
        }
    }
}

fn push_unique(rules: &mut Vec<DefaultRule>, rule: DefaultRule) {
    match rules.iter_mut().find(|r| r.same_shape(&rule)) {
        Some(existing) => {
            if let (RuleOrigin::Generated(a), RuleOrigin::Generated(b)) =
                (&mut existing.origin, rule.origin)
            {
                for d in b.derivations {
                    if !a.derivations.contains(&d) {
                        a.derivations.push(d);
                    }
                }
            }
        }
        None => rules.push(rule),
    }
}

/// Output of [`filter_by_delta`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtered {
    pub kept: Vec<DefaultRule>,
    pub rejected: Vec<(DefaultRule, String)>,
}

/// Lower bound of the statistic a rule was derived from; declared rules have none.
pub fn basis_lower(rule: &DefaultRule) -> Option<&Rational> {
    match &rule.origin {
        RuleOrigin::Generated(p) => Some(&p.basis.lower),
        RuleOrigin::Declared => None,
    }
}

/// Keeps candidates whose source statistic has lower bound at least `1 - delta`.
pub fn filter_by_delta(cs: &CandidateSet, delta: &Rational) -> Filtered {
    let threshold = Rational::one() - delta;
    let mut out = Filtered {
        kept: Vec::new(),
        rejected: cs.rejected.clone(),
    };
    for rule in &cs.candidates {
        match basis_lower(rule) {
            Some(lower) if *lower < threshold => out.rejected.push((
                rule.clone(),
                format!(
                    "lower bound {} < 1 - delta = {}",
                    format_rational(lower),
                    format_rational(&threshold)
                ),
            )),
            _ => out.kept.push(rule.clone()),
        }
    }
    out
}

/// Every distinct statistic target together with its negation, in
/// declaration order.
pub fn stat_targets(kb: &KnowledgeBase) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    for s in &kb.stats {
        for t in [s.target.clone(), s.target.negated()] {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// Δ_K: the filtered candidates for every target the statistics speak about.
pub fn delta_k(kb: &KnowledgeBase, delta: &Rational) -> Result<Vec<DefaultRule>, ForgeError> {
    let mut rules = Vec::new();
    for t in stat_targets(kb) {
        let cs = generate_candidates(kb, &t)?;
        for r in filter_by_delta(&cs, delta).kept {
            push_unique(&mut rules, r);
        }
    }
    Ok(rules)
}

/// Defaults for a species-partition knowledge base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LotteryDefaults {
    pub rules: Vec<DefaultRule>,
    pub delta_star: Rational,
}

/// Derives `B : ¬S_i / ¬S_i` for every species from statistics
/// `%x(S_i, B, ε_i, δ_i)` over a knowledge base whose axioms make the `S_i`
/// an exclusive and exhaustive partition of `B`. δ* is the largest `δ_i`.
pub fn generate_lottery_defaults(kb: &KnowledgeBase) -> Result<LotteryDefaults, ForgeError> {
    let not_lottery = |why: &str| ForgeError::NotLottery(why.to_string());
    let first = kb.stats.first().ok_or_else(|| not_lottery("no statistics"))?;
    let bird = match &first.reference {
        Formula::Atom(p) => *p,
        _ => return Err(not_lottery("reference class is not a single predicate")),
    };
    let mut species = BTreeMap::new();
    for (i, s) in kb.stats.iter().enumerate() {
        if s.reference != Formula::Atom(bird) {
            return Err(not_lottery("statistics disagree on the reference class"));
        }
        match &s.target {
            Formula::Atom(p) if *p != bird => {
                if species.insert(*p, i).is_some() {
                    return Err(not_lottery("two statistics for one species"));
                }
            }
            _ => return Err(not_lottery("statistic target is not a species predicate")),
        }
    }
    for c in feasible_cells(kb)? {
        let members = species.keys().filter(|&&p| c.holds(p)).count();
        if members > 1 {
            return Err(not_lottery("species are not mutually exclusive"));
        }
        if c.holds(bird) != (members == 1) {
            return Err(not_lottery("species do not partition the reference class"));
        }
    }

    let delta_star = kb
        .stats
        .iter()
        .map(|s| s.upper.clone())
        .max()
        .expect("nonempty");
    let mut rules = Vec::new();
    for s in &kb.stats {
        let cs = generate_candidates(kb, &s.target.negated())?;
        let kept = filter_by_delta(&cs, &delta_star).kept;
        rules.extend(kept);
    }
    Ok(LotteryDefaults { rules, delta_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::ratio;

    struct Birds {
        kb: KnowledgeBase,
        bird: Formula,
        fly: Formula,
        penguin: Formula,
        red: Formula,
    }

    fn birds() -> Birds {
        let mut kb = KnowledgeBase::new(8);
        let bird = kb.add_predicate("Bird");
        let fly = kb.add_predicate("Fly");
        let penguin = kb.add_predicate("Penguin");
        let red = kb.add_predicate("Red");
        kb.add_constant("a");
        kb.axioms.push(Formula::implies(penguin.clone(), bird.clone()));
        Birds {
            kb,
            bird,
            fly,
            penguin,
            red,
        }
    }

    fn shapes(rules: &[DefaultRule], kb: &KnowledgeBase) -> Vec<String> {
        rules.iter().map(|r| kb.show_rule(r)).collect()
    }

    fn case_tags(rule: &DefaultRule) -> Vec<CaseTag> {
        match &rule.origin {
            RuleOrigin::Generated(p) => p.derivations.iter().map(|d| d.case).collect(),
            RuleOrigin::Declared => Vec::new(),
        }
    }

    #[test]
    fn subset_entailment() {
        let b = birds();
        assert!(entails_subset(&b.kb, &b.penguin, &b.bird).unwrap());
        assert!(entails_subset(&b.kb, &b.bird, &b.bird).unwrap());
        let red_bird = Formula::and(b.red.clone(), b.bird.clone());
        assert!(!entails_subset(&b.kb, &red_bird, &b.penguin).unwrap());
        assert!(entails_subset(&b.kb, &red_bird, &b.bird).unwrap());
    }

    #[test]
    fn red_birds_with_vaguer_interval() {
        let mut b = birds();
        let red_bird = Formula::and(b.red.clone(), b.bird.clone());
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.bird.clone(), ratio(17, 20), ratio(19, 20)));
        b.kb.stats.push(StatStatement::new(b.fly.clone(), red_bird, ratio(1, 2), ratio(1, 1)));
        let cs = generate_candidates(&b.kb, &b.fly).unwrap();
        assert_eq!(shapes(&cs.candidates, &b.kb), ["Bird : Fly / Fly"]);
        assert_eq!(case_tags(&cs.candidates[0]), [CaseTag::C2b]);
        assert_eq!(cs.rejected.len(), 1);
        assert_eq!(b.kb.show_rule(&cs.rejected[0].0), "Red & Bird : Fly / Fly");
    }

    #[test]
    fn red_birds_with_conflicting_interval() {
        let mut b = birds();
        let red_bird = Formula::and(b.red.clone(), b.bird.clone());
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.bird.clone(), ratio(17, 20), ratio(19, 20)));
        b.kb.stats.push(StatStatement::new(b.fly.clone(), red_bird, ratio(1, 2), ratio(3, 4)));
        let cs = generate_candidates(&b.kb, &b.fly).unwrap();
        assert_eq!(
            shapes(&cs.candidates, &b.kb),
            ["Bird : Fly, !(Red & Bird) / Fly", "Red & Bird : Fly / Fly"]
        );
        let kept = filter_by_delta(&cs, &ratio(3, 20));
        assert_eq!(shapes(&kept.kept, &b.kb), ["Bird : Fly, !(Red & Bird) / Fly"]);
        assert_eq!(kept.rejected.len(), 1);
        assert!(kept.rejected[0].1.contains("0.5 < 1 - delta = 0.85"), "{}", kept.rejected[0].1);
    }

    #[test]
    fn specific_first_gives_case_one() {
        let mut b = birds();
        let red_bird = Formula::and(b.red.clone(), b.bird.clone());
        b.kb.stats.push(StatStatement::new(b.fly.clone(), red_bird, ratio(1, 2), ratio(3, 4)));
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.bird.clone(), ratio(17, 20), ratio(19, 20)));
        let cs = generate_candidates(&b.kb, &b.fly).unwrap();
        assert_eq!(case_tags(&cs.candidates[0]), [CaseTag::C1a]);
        assert_eq!(
            shapes(&cs.candidates, &b.kb),
            ["Red & Bird : Fly / Fly", "Bird : Fly, !(Red & Bird) / Fly"]
        );
    }

    #[test]
    fn unrelated_classes_exclude_each_other() {
        let mut kb = KnowledgeBase::new(4);
        let fly = kb.add_predicate("Fly");
        let bird = kb.add_predicate("Bird");
        let kite = kb.add_predicate("Kite");
        kb.stats.push(StatStatement::new(fly.clone(), bird, ratio(9, 10), ratio(1, 1)));
        kb.stats.push(StatStatement::new(fly.clone(), kite, ratio(9, 10), ratio(1, 1)));
        let cs = generate_candidates(&kb, &fly).unwrap();
        assert_eq!(
            shapes(&cs.candidates, &kb),
            ["Bird : Fly, !Kite / Fly", "Kite : Fly, !Bird / Fly"]
        );
        assert!(cs.candidates.iter().all(|r| case_tags(r) == [CaseTag::C3a]));
    }

    #[test]
    fn case_three_nested_intervals() {
        let mut kb = KnowledgeBase::new(4);
        let fly = kb.add_predicate("Fly");
        let bird = kb.add_predicate("Bird");
        let kite = kb.add_predicate("Kite");
        // kite interval nested inside the bird interval: 3b
        kb.stats.push(StatStatement::new(fly.clone(), bird.clone(), ratio(1, 2), ratio(1, 1)));
        kb.stats.push(StatStatement::new(fly.clone(), kite.clone(), ratio(9, 10), ratio(19, 20)));
        let cs = generate_candidates(&kb, &fly).unwrap();
        assert_eq!(
            shapes(&cs.candidates, &kb),
            ["Bird : Fly, !Kite / Fly", "Kite : Fly / Fly"]
        );
        // and mirrored: 3c
        kb.stats.swap(0, 1);
        let cs = generate_candidates(&kb, &fly).unwrap();
        assert_eq!(
            shapes(&cs.candidates, &kb),
            ["Kite : Fly / Fly", "Bird : Fly, !Kite / Fly"]
        );
        assert!(cs.candidates.iter().all(|r| case_tags(r) == [CaseTag::C3c]));
    }

    #[test]
    fn lone_statistic_gives_plain_rule() {
        let mut b = birds();
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.bird.clone(), ratio(17, 20), ratio(19, 20)));
        let cs = generate_candidates(&b.kb, &b.fly).unwrap();
        assert_eq!(shapes(&cs.candidates, &b.kb), ["Bird : Fly / Fly"]);
        assert!(case_tags(&cs.candidates[0]).is_empty());
        let kept = filter_by_delta(&cs, &ratio(3, 20));
        assert_eq!(kept.kept.len(), 1);
    }

    #[test]
    fn missing_statistics() {
        let b = birds();
        assert!(matches!(
            generate_candidates(&b.kb, &b.fly),
            Err(ForgeError::NoStatistics(_))
        ));
    }

    #[test]
    fn coextensive_classes_collapse() {
        let mut kb = KnowledgeBase::new(4);
        let fly = kb.add_predicate("Fly");
        let bird = kb.add_predicate("Bird");
        let avian = kb.add_predicate("Avian");
        kb.axioms.push(Formula::iff(bird.clone(), avian.clone()));
        kb.stats.push(StatStatement::new(fly.clone(), bird, ratio(8, 10), ratio(9, 10)));
        kb.stats.push(StatStatement::new(fly.clone(), avian, ratio(85, 100), ratio(1, 1)));
        let cs = generate_candidates(&kb, &fly).unwrap();
        assert_eq!(shapes(&cs.candidates, &kb), ["Bird : Fly / Fly"]);
        assert_eq!(cs.warnings.len(), 1);
        assert_eq!(basis_lower(&cs.candidates[0]), Some(&ratio(17, 20)));
    }

    #[test]
    fn delta_near_one_keeps_everything() {
        let mut b = birds();
        let red_bird = Formula::and(b.red.clone(), b.bird.clone());
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.bird.clone(), ratio(17, 20), ratio(19, 20)));
        b.kb.stats.push(StatStatement::new(b.fly.clone(), red_bird, ratio(0, 1), ratio(3, 4)));
        let cs = generate_candidates(&b.kb, &b.fly).unwrap();
        let kept = filter_by_delta(&cs, &ratio(999_999, 1_000_000));
        // 0 < 1/10^6: the red-bird rule still goes; everything with a positive lower bound stays
        assert_eq!(kept.kept.len(), 1);
        let kept = filter_by_delta(&cs, &ratio(1, 1));
        assert_eq!(kept.kept, cs.candidates);
    }

    #[test]
    fn three_classes_merge_exclusions() {
        let mut b = birds();
        let red_bird = Formula::and(b.red.clone(), b.bird.clone());
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.bird.clone(), ratio(17, 20), ratio(19, 20)));
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.penguin.clone(), ratio(0, 1), ratio(1, 20)));
        b.kb.stats.push(StatStatement::new(b.fly.clone(), red_bird.clone(), ratio(1, 2), ratio(1, 1)));
        let merged = generate_candidates(&b.kb, &b.fly).unwrap();
        // red birds get no rule of their own, yet penguins still exclude them
        assert_eq!(
            shapes(&merged.candidates, &b.kb),
            ["Bird : Fly, !Penguin / Fly", "Penguin : Fly, !(Red & Bird) / Fly"]
        );
        assert_eq!(merged.rejected.len(), 1);
        let union = generate_candidates_with(&b.kb, &b.fly, Composition::PairUnion).unwrap();
        let union_shapes = shapes(&union.candidates, &b.kb);
        assert!(union_shapes.contains(&"Bird : Fly / Fly".to_string()), "{union_shapes:?}");
        assert!(union_shapes.contains(&"Bird : Fly, !Penguin / Fly".to_string()));
    }

    #[test]
    fn complemented_statistics_feed_negated_targets() {
        let mut b = birds();
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.bird.clone(), ratio(17, 20), ratio(19, 20)));
        b.kb.stats.push(StatStatement::new(b.fly.clone(), b.penguin.clone(), ratio(0, 1), ratio(1, 20)));
        let not_fly = Formula::not(b.fly.clone());
        let cs = generate_candidates(&b.kb, &not_fly).unwrap();
        assert_eq!(
            shapes(&cs.candidates, &b.kb),
            ["Bird : !Fly, !Penguin / !Fly", "Penguin : !Fly / !Fly"]
        );
        let kept = filter_by_delta(&cs, &ratio(3, 20));
        assert_eq!(shapes(&kept.kept, &b.kb), ["Penguin : !Fly / !Fly"]);
        let all = delta_k(&b.kb, &ratio(3, 20)).unwrap();
        assert_eq!(
            shapes(&all, &b.kb),
            ["Bird : Fly, !Penguin / Fly", "Penguin : !Fly / !Fly"]
        );
    }
}

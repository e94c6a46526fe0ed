//! Exact values first computed by brute-force enumeration and frozen here.

use deftally_core::engine::{
    delta_valid_check, reiter_extensions, thresholded_extension, Ordering, SoundnessOptions,
    ThresholdOptions,
};
use deftally_core::kb::{parse_kb, ratio, ConstId, DefaultRule, Formula, GroundLiteral};
use deftally_core::lottery::uniform_lottery;
use deftally_core::{CountError, ModelCounter, WorldState};

fn bird_doc(n: usize) -> deftally_core::Document {
    parse_kb(&format!(
        "domain {n}\npred B F\nconst a\nstat F | B in [17/20, 19/20]\nfact B(a)\n"
    ))
    .unwrap()
}

#[test]
fn bird_proportion_at_eight() {
    let doc = bird_doc(8);
    let w = WorldState::with_evidence(&doc.kb, &doc.evidence);
    let p = ModelCounter::default()
        .proportion(&w, &Formula::atom(1).at(ConstId(0)))
        .unwrap();
    assert_eq!(p, ratio(91, 106));
}

#[test]
fn bird_evidence_is_impossible_on_small_domains() {
    // no fraction k/d with d <= 6 lies in [0.85, 0.95], so every model has no birds
    for n in [4, 6] {
        let doc = bird_doc(n);
        let w = WorldState::with_evidence(&doc.kb, &doc.evidence);
        assert_eq!(
            ModelCounter::default().proportion(&w, &Formula::atom(1).at(ConstId(0))),
            Err(CountError::EmptyCondition)
        );
    }
}

#[test]
fn bird_rule_worst_error() {
    let doc = bird_doc(8);
    let rule = DefaultRule::normal(Formula::atom(0), Formula::atom(1));
    let r = delta_valid_check(&rule, &doc.kb, &ratio(3, 20), &SoundnessOptions::default()).unwrap();
    assert!(r.valid);
    assert_eq!(r.worst_error, Some(ratio(15, 106)));
    assert_eq!(r.worst_evidence, Some(vec![GroundLiteral::pos(0, 0)]));
}

#[test]
fn three_species_extensions_keep_a_third() {
    let doc = uniform_lottery(3, 8, ratio(0, 1), ratio(2, 5)).unwrap();
    let exts = reiter_extensions(&doc.kb, &doc.evidence, &doc.rules).unwrap();
    assert_eq!(exts.len(), 3);
    for e in exts {
        assert_eq!(e.final_proportion, ratio(1, 3));
    }
}

#[test]
fn three_species_threshold_run() {
    let doc = uniform_lottery(3, 8, ratio(0, 1), ratio(2, 5)).unwrap();
    let mut opts = ThresholdOptions::new(ratio(2, 5));
    opts.ordering = Ordering::Declared;
    let t = thresholded_extension(&doc.kb, &doc.evidence, &doc.rules, &opts).unwrap();
    let trace: Vec<_> = t.extension.trace.iter().map(|s| s.proportion.clone()).collect();
    assert_eq!(trace, [ratio(2, 3)]);
    assert_eq!(t.extension.final_proportion, ratio(2, 3));
    let below: Vec<_> = t.below_threshold.iter().map(|s| s.proportion.clone()).collect();
    assert_eq!(below, [ratio(1, 2), ratio(1, 2)]);
}

use std::fmt::Write;

use super::rational::format_rational;
use super::{DefaultRule, Document, GroundLiteral, KnowledgeBase, ThresholdConfig, VacuousReference};

/// Writes a document back to the KB text format.
///
/// Output is canonical: re-parsing it yields a structurally equal document,
/// and serializing that again reproduces the same bytes.
pub fn serialize_kb(
    kb: &KnowledgeBase,
    evidence: &[GroundLiteral],
    rules: &[DefaultRule],
    config: &ThresholdConfig,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {}", kb.domain_size);
    if !kb.predicates.is_empty() {
        let _ = writeln!(out, "pred {}", kb.predicates.join(" "));
    }
    if !kb.constants.is_empty() {
        let _ = writeln!(out, "const {}", kb.constants.join(" "));
    }
    if kb.vacuous == VacuousReference::Violated {
        out.push_str("config vacuous violated\n");
    }
    for axiom in &kb.axioms {
        let _ = writeln!(out, "axiom {}", kb.show(axiom));
    }
    for s in &kb.stats {
        let _ = writeln!(
            out,
            "stat {} | {} in [{}, {}]",
            kb.show(&s.target),
            kb.show(&s.reference),
            format_rational(&s.lower),
            format_rational(&s.upper)
        );
    }
    for lit in evidence {
        let _ = writeln!(
            out,
            "fact {}{}({})",
            if lit.positive { "" } else { "!" },
            kb.predicates[lit.predicate.0],
            kb.constants[lit.constant.0]
        );
    }
    for rule in rules {
        let _ = writeln!(out, "default {}", kb.show_rule(rule));
    }
    if let Some(d) = &config.delta {
        let _ = writeln!(out, "config delta {}", format_rational(d));
    }
    if let Some(e) = &config.epsilon_star {
        let _ = writeln!(out, "config epsilon_star {}", format_rational(e));
    }
    out
}

impl Document {
    pub fn to_text(&self) -> String {
        serialize_kb(&self.kb, &self.evidence, &self.rules, &self.config)
    }
}

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use deftally_core::counter::{CountError, ModelCounter, WorldState};
use deftally_core::engine::{
    delta_valid_check_with, Engine, Extension, Ordering, SoundnessOptions, ThresholdOptions,
    ThresholdOutcome, TraceStep,
};
use deftally_core::forge::{
    basis_lower, delta_k, filter_by_delta, generate_candidates, generate_lottery_defaults,
    stat_targets,
};
use deftally_core::kb::{
    decimal6, format_rational, parse_formula, parse_kb, parse_rational, DefaultRule, Document,
    GroundFormula, GroundLiteral, KnowledgeBase, Rational, RuleOrigin, ThresholdConfig,
};
use deftally_core::lottery::lottery_document;
use deftally_core::oracle::{Oracle, Space};
use deftally_core::sample::{random_sample, Limits};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::*;
use crate::table::Table;
use crate::{Cli, Command, Mode, OracleSpace, RuleSource, Thresholds};

pub struct Outcome {
    pub text: String,
    pub report: RunReport,
}

struct Run {
    argv: Vec<String>,
    digest: String,
    settings: BTreeMap<&'static str, String>,
}

impl Run {
    fn finish(self, text: String, status: Status, result: CommandResult) -> Outcome {
        let mut command = vec!["deftally".to_string()];
        command.extend(self.argv);
        Outcome {
            text,
            report: RunReport {
                tool: "deftally",
                version: env!("CARGO_PKG_VERSION"),
                command,
                kb_digest: self.digest,
                settings: self.settings,
                status,
                result,
            },
        }
    }
}

pub fn run(cli: &Cli, argv: Vec<String>) -> Result<Outcome> {
    let counter = ModelCounter::with_budget(cli.budget);
    let mut run = Run {
        argv,
        digest: String::new(),
        settings: BTreeMap::new(),
    };
    run.settings.insert("budget", cli.budget.to_string());
    match &cli.command {
        Command::Generate { kb, target, thresholds } => {
            let doc = load(kb, cli.domain, &mut run)?;
            generate(&doc, target.as_deref(), thresholds, run)
        }
        Command::Extend {
            kb,
            mode,
            order,
            rules,
            thresholds,
        } => {
            let doc = load(kb, cli.domain, &mut run)?;
            extend(&doc, *mode, order, *rules, thresholds, &counter, run)
        }
        Command::Soundness {
            kb,
            rules,
            constants,
            bound,
            thresholds,
        } => {
            let doc = load(kb, cli.domain, &mut run)?;
            soundness(&doc, *rules, *constants, *bound, thresholds, &counter, run)
        }
        Command::Lottery {
            n,
            intervals,
            order,
            kb_out,
            thresholds,
        } => lottery(
            *n,
            intervals.as_deref(),
            cli.domain.unwrap_or(8),
            order,
            kb_out.as_deref(),
            thresholds,
            &counter,
            run,
        ),
        Command::VerifyOracle {
            kb,
            random,
            seed,
            cap,
            space,
        } => verify_oracle(kb.as_deref(), *random, *seed, *cap, *space, cli.domain, &counter, run),
    }
}

fn load(path: &Path, domain: Option<usize>, run: &mut Run) -> Result<Document> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let mut doc = parse_kb(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    run.digest = digest(&bytes);
    if let Some(n) = domain {
        if n == 0 {
            bail!("--domain must be at least 1");
        }
        doc.kb.domain_size = n;
    }
    run.settings.insert("domain", doc.kb.domain_size.to_string());
    Ok(doc)
}

fn rational_flag(name: &str, value: Option<&str>) -> Result<Option<Rational>> {
    value
        .map(|v| parse_rational(v).ok_or_else(|| anyhow!("--{name}: `{v}` is not a rational number")))
        .transpose()
}

fn resolve_delta(flags: &Thresholds, config: &ThresholdConfig, run: &mut Run) -> Result<Rational> {
    let delta = rational_flag("delta", flags.delta.as_deref())?
        .or_else(|| config.delta.clone())
        .unwrap_or_else(ThresholdConfig::default_delta);
    if delta <= Rational::from_integer(0.into()) || delta >= Rational::from_integer(1.into()) {
        bail!("delta must lie in (0, 1)");
    }
    run.settings.insert("delta", format_rational(&delta));
    Ok(delta)
}

fn resolve_epsilon(flags: &Thresholds, config: &ThresholdConfig, run: &mut Run) -> Result<Rational> {
    let eps = rational_flag("epsilon-star", flags.epsilon_star.as_deref())?
        .or_else(|| config.epsilon_star.clone())
        .unwrap_or_else(ThresholdConfig::default_epsilon_star);
    if eps <= Rational::from_integer(0.into()) || eps > Rational::from_integer(1.into()) {
        bail!("epsilon-star must lie in (0, 1]");
    }
    run.settings.insert("epsilon_star", format_rational(&eps));
    Ok(eps)
}

fn parse_order(text: &str, rules: usize) -> Result<Ordering> {
    match text {
        "greedy" => Ok(Ordering::Greedy),
        "declared" => Ok(Ordering::Declared),
        list => {
            let mut order = Vec::new();
            for part in list.split(',') {
                let k: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| anyhow!("--order: expected greedy, declared or rule numbers, got `{list}`"))?;
                if k == 0 || k > rules {
                    bail!("--order: rule {k} does not exist (rules are numbered 1 to {rules})");
                }
                order.push(k - 1);
            }
            Ok(Ordering::Explicit(order))
        }
    }
}

fn push_unique(rules: &mut Vec<(DefaultRule, &'static str)>, rule: DefaultRule, origin: &'static str) {
    if !rules.iter().any(|(r, _)| r.same_shape(&rule)) {
        rules.push((rule, origin));
    }
}

fn select_rules(doc: &Document, source: RuleSource, delta: &Rational) -> Result<Vec<(DefaultRule, &'static str)>> {
    let mut out = Vec::new();
    let declared = matches!(source, RuleSource::Declared | RuleSource::All)
        || (source == RuleSource::Auto && !doc.rules.is_empty());
    let generated = matches!(source, RuleSource::Generated | RuleSource::All)
        || (source == RuleSource::Auto && doc.rules.is_empty());
    if declared {
        for r in &doc.rules {
            push_unique(&mut out, r.clone(), "declared");
        }
    }
    if generated {
        for r in delta_k(&doc.kb, delta)? {
            push_unique(&mut out, r, "generated");
        }
    }
    Ok(out)
}

fn origin_name(rule: &DefaultRule) -> &'static str {
    match rule.origin {
        RuleOrigin::Declared => "declared",
        RuleOrigin::Generated(_) => "generated",
    }
}

fn cases(rule: &DefaultRule) -> Vec<String> {
    match &rule.origin {
        RuleOrigin::Generated(p) => p.derivations.iter().map(|d| d.case.to_string()).collect(),
        RuleOrigin::Declared => Vec::new(),
    }
}

fn rule_entry(kb: &KnowledgeBase, rule: &DefaultRule, verdict: &'static str, reason: Option<String>) -> RuleEntry {
    RuleEntry {
        rule: kb.show_rule(rule),
        origin: origin_name(rule),
        basis: match &rule.origin {
            RuleOrigin::Generated(p) => Some(kb.show_stat(&p.basis)),
            RuleOrigin::Declared => None,
        },
        cases: cases(rule),
        verdict,
        reason,
    }
}

fn show_literal(kb: &KnowledgeBase, l: &GroundLiteral) -> String {
    kb.show_ground(&l.to_ground())
}

fn step_entry(kb: &KnowledgeBase, step: usize, s: &TraceStep) -> StepEntry {
    StepEntry {
        step,
        rule: kb.show_rule(&s.rule.rule),
        constant: kb.constants[s.rule.constant.0].clone(),
        proportion: Exact::from(&s.proportion),
    }
}

fn extension_entry(kb: &KnowledgeBase, ext: &Extension) -> ExtensionEntry {
    ExtensionEntry {
        conclusions: ext.conclusions.iter().map(|c| kb.show_ground(c)).collect(),
        trace: ext
            .trace
            .iter()
            .enumerate()
            .map(|(i, s)| step_entry(kb, i + 1, s))
            .collect(),
        proportion: Exact::from(&ext.final_proportion),
    }
}

fn threshold_entry(kb: &KnowledgeBase, out: &ThresholdOutcome, opts: &ThresholdOptions, order: &str) -> ThresholdEntry {
    let extension = extension_entry(kb, &out.extension);
    ThresholdEntry {
        epsilon_star: Exact::from(&opts.epsilon_star),
        ordering: order.to_string(),
        successful: out.successful,
        halted_at_step: extension.trace.len() + 1,
        extension,
        below_threshold: out
            .below_threshold
            .iter()
            .map(|s| step_entry(kb, out.extension.trace.len() + 1, s))
            .collect(),
    }
}

fn write_rules(text: &mut String, kb: &KnowledgeBase, rules: &[(DefaultRule, &'static str)]) {
    let mut t = Table::new(["#", "rule", "origin"]);
    for (i, (r, origin)) in rules.iter().enumerate() {
        t.row([(i + 1).to_string(), kb.show_rule(r), origin.to_string()]);
    }
    text.push_str(&t.render());
}

fn write_extension(text: &mut String, e: &ExtensionEntry) {
    let mut t = Table::new(["step", "rule", "at", "p", "exact"]);
    for s in &e.trace {
        t.row([
            s.step.to_string(),
            s.rule.clone(),
            s.constant.clone(),
            s.proportion.decimal.clone(),
            s.proportion.exact.clone(),
        ]);
    }
    text.push_str(&t.render());
    let conclusions = if e.conclusions.is_empty() {
        "(none)".to_string()
    } else {
        e.conclusions.join(", ")
    };
    let _ = writeln!(text, "conclusions: {conclusions}");
    let _ = writeln!(
        text,
        "extension proportion: {} ({})",
        e.proportion.decimal, e.proportion.exact
    );
}

fn write_threshold(text: &mut String, t: &ThresholdEntry) {
    let _ = writeln!(
        text,
        "thresholded extension (epsilon* = {}, order {}){}",
        t.epsilon_star.exact,
        t.ordering,
        if t.successful { "" } else { " [every closed derivation refutes a justification]" }
    );
    write_extension(text, &t.extension);
    if t.below_threshold.is_empty() {
        let _ = writeln!(text, "halted at step {}: no applicable rule left", t.halted_at_step);
    } else {
        let _ = writeln!(text, "halted at step {}: applicable but below threshold", t.halted_at_step);
        for s in &t.below_threshold {
            let _ = writeln!(
                text,
                "  {} @ {}  p = {} ({})",
                s.rule, s.constant, s.proportion.decimal, s.proportion.exact
            );
        }
    }
}

fn generate(doc: &Document, target: Option<&str>, flags: &Thresholds, mut run: Run) -> Result<Outcome> {
    let kb = &doc.kb;
    let delta = resolve_delta(flags, &doc.config, &mut run)?;
    let targets = match target {
        Some(t) => {
            run.settings.insert("target", t.to_string());
            vec![parse_formula(kb, t).map_err(|e| anyhow!("--target: {e}"))?]
        }
        None => {
            let all = stat_targets(kb);
            if all.is_empty() {
                bail!("the knowledge base has no statistical statements");
            }
            all
        }
    };
    let mut text = String::new();
    let mut results = Vec::new();
    let mut kept_all: Vec<DefaultRule> = Vec::new();
    for t in &targets {
        let cs = generate_candidates(kb, t)?;
        let filtered = filter_by_delta(&cs, &delta);
        let mut entries = Vec::new();
        for rule in &cs.candidates {
            if filtered.kept.contains(rule) {
                entries.push(rule_entry(kb, rule, "kept", None));
                if !kept_all.iter().any(|r| r.same_shape(rule)) {
                    kept_all.push(rule.clone());
                }
            } else {
                let reason = filtered
                    .rejected
                    .iter()
                    .find(|(r, _)| r == rule)
                    .map(|(_, why)| why.clone());
                entries.push(rule_entry(kb, rule, "rejected", reason));
            }
        }
        for (rule, why) in &cs.rejected {
            entries.push(rule_entry(kb, rule, "suppressed", Some(why.clone())));
        }

        let _ = writeln!(text, "target {} (delta = {})", kb.show(t), format_rational(&delta));
        let mut table = Table::new(["rule", "cases", "lower", "verdict", "reason"]);
        for (e, rule) in entries.iter().zip(cs.candidates.iter().chain(cs.rejected.iter().map(|(r, _)| r))) {
            table.row([
                e.rule.clone(),
                e.cases.join(" "),
                basis_lower(rule).map(format_rational).unwrap_or_default(),
                e.verdict.to_string(),
                e.reason.clone().unwrap_or_default(),
            ]);
        }
        text.push_str(&table.render());
        for w in &cs.warnings {
            let _ = writeln!(text, "warning: {w}");
        }
        text.push('\n');
        results.push(TargetResult {
            target: kb.show(t).to_string(),
            candidates: entries,
            warnings: cs.warnings.clone(),
        });
    }
    let kept: Vec<String> = kept_all.iter().map(|r| kb.show_rule(r)).collect();
    let _ = writeln!(text, "kept {} rule(s):", kept.len());
    for r in &kept {
        let _ = writeln!(text, "  {r}");
    }
    Ok(run.finish(
        text,
        Status::Ok,
        CommandResult::Generate(GenerateResult {
            delta: Exact::from(&delta),
            targets: results,
            kept,
        }),
    ))
}

fn extend(
    doc: &Document,
    mode: Mode,
    order: &str,
    source: RuleSource,
    flags: &Thresholds,
    counter: &ModelCounter,
    mut run: Run,
) -> Result<Outcome> {
    let kb = &doc.kb;
    let delta = resolve_delta(flags, &doc.config, &mut run)?;
    let rules = select_rules(doc, source, &delta)?;
    let plain: Vec<DefaultRule> = rules.iter().map(|(r, _)| r.clone()).collect();
    let engine = Engine::new(kb, &doc.evidence, &plain).with_counter(counter.clone());
    let mut text = String::new();
    write_rules(&mut text, kb, &rules);
    text.push('\n');
    let rule_texts: Vec<String> = plain.iter().map(|r| kb.show_rule(r)).collect();
    let result = match mode {
        Mode::Reiter => {
            run.settings.insert("mode", "reiter".into());
            let exts = engine.reiter_extensions()?;
            let entries: Vec<ExtensionEntry> = exts.iter().map(|e| extension_entry(kb, e)).collect();
            let _ = writeln!(text, "{} Reiter extension(s)", entries.len());
            for (i, e) in entries.iter().enumerate() {
                let _ = writeln!(text, "\nextension {}", i + 1);
                write_extension(&mut text, e);
            }
            ExtendResult {
                mode: "reiter",
                rules: rule_texts,
                extensions: Some(entries),
                threshold: None,
            }
        }
        Mode::Threshold => {
            run.settings.insert("mode", "threshold".into());
            run.settings.insert("order", order.to_string());
            let eps = resolve_epsilon(flags, &doc.config, &mut run)?;
            let opts = ThresholdOptions {
                epsilon_star: eps,
                ordering: parse_order(order, plain.len())?,
                inclusive: false,
            };
            let out = engine.thresholded_extension(&opts)?;
            let entry = threshold_entry(kb, &out, &opts, order);
            write_threshold(&mut text, &entry);
            ExtendResult {
                mode: "threshold",
                rules: rule_texts,
                extensions: None,
                threshold: Some(entry),
            }
        }
    };
    Ok(run.finish(text, Status::Ok, CommandResult::Extend(result)))
}

fn soundness(
    doc: &Document,
    source: RuleSource,
    constants: usize,
    bound: u64,
    flags: &Thresholds,
    counter: &ModelCounter,
    mut run: Run,
) -> Result<Outcome> {
    if constants == 0 {
        bail!("--constants must be at least 1");
    }
    let delta = resolve_delta(flags, &doc.config, &mut run)?;
    run.settings.insert("constants", constants.to_string());
    run.settings.insert("bound", bound.to_string());
    let rules = select_rules(doc, source, &delta)?;
    let mut kb = doc.kb.clone();
    let mut fresh = 0;
    while kb.constants.len() < constants {
        fresh += 1;
        let name = format!("c{fresh}");
        if kb.predicate(&name).is_none() && kb.constant(&name).is_none() {
            kb.add_constant(&name);
        }
    }
    let opts = SoundnessOptions {
        constants,
        bound,
        inclusive: true,
    };
    let mut entries = Vec::new();
    let mut table = Table::new(["rule", "origin", "valid", "worst error", "exact", "worst evidence", "applicable"]);
    for (rule, origin) in &rules {
        let r = delta_valid_check_with(counter, rule, &kb, &delta, &opts)?;
        let worst_evidence = r.worst_evidence.as_ref().map(|e| {
            let mut lits: Vec<String> = e.iter().map(|l| show_literal(&kb, l)).collect();
            if lits.is_empty() {
                lits.push("{}".into());
            }
            lits
        });
        table.row([
            kb.show_rule(rule),
            origin.to_string(),
            if r.valid { "yes" } else { "NO" }.to_string(),
            r.worst_error.as_ref().map(decimal6).unwrap_or_else(|| "-".into()),
            r.worst_error.as_ref().map(|x| Exact::from(x).exact).unwrap_or_else(|| "-".into()),
            worst_evidence.as_ref().map(|e| e.join(", ")).unwrap_or_else(|| "-".into()),
            r.applicable_cases.to_string(),
        ]);
        entries.push(SoundnessEntry {
            rule: kb.show_rule(rule),
            origin,
            valid: r.valid,
            worst_error: r.worst_error.as_ref().map(Exact::from),
            worst_evidence,
            evidence_sets: r.evidence_sets,
            consistent_sets: r.consistent_sets,
            applicable_cases: r.applicable_cases,
        });
    }
    let violations = entries.iter().filter(|e| !e.valid).count();
    let mut text = format!("delta = {}, evidence over {constants} constant(s)\n", format_rational(&delta));
    text.push_str(&table.render());
    let _ = writeln!(
        text,
        "{} rule(s) checked, {violations} violation(s){}",
        entries.len(),
        if entries.is_empty() { " (vacuously sound)" } else { "" }
    );
    let status = if violations == 0 { Status::Ok } else { Status::Violation };
    Ok(run.finish(
        text,
        status,
        CommandResult::Soundness(SoundnessResult {
            delta: Exact::from(&delta),
            constants,
            rules: entries,
            violations,
        }),
    ))
}

fn parse_interval(text: &str) -> Result<(Rational, Rational)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("--intervals: expected `lo:hi`, got `{text}`"))?;
    let parse = |s: &str| parse_rational(s.trim()).ok_or_else(|| anyhow!("--intervals: `{s}` is not a rational number"));
    Ok((parse(lo)?, parse(hi)?))
}

#[allow(clippy::too_many_arguments)]
fn lottery(
    n: usize,
    intervals: Option<&str>,
    domain: usize,
    order: &str,
    kb_out: Option<&Path>,
    flags: &Thresholds,
    counter: &ModelCounter,
    mut run: Run,
) -> Result<Outcome> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    if domain == 0 {
        bail!("--domain must be at least 1");
    }
    let bounds: Vec<(Rational, Rational)> = match intervals {
        None => {
            let hi = BigRational::new(2.into(), (n as i64).into()).min(Rational::from_integer(1.into()));
            vec![(Rational::from_integer(0.into()), hi); n]
        }
        Some(list) => {
            let parts: Vec<_> = list.split(',').map(parse_interval).collect::<Result<_>>()?;
            match parts.len() {
                1 => vec![parts[0].clone(); n],
                k if k == n => parts,
                k => bail!("--intervals: expected 1 or {n} intervals, got {k}"),
            }
        }
    };
    let mut doc = lottery_document(domain, &bounds)?;
    let eps = resolve_epsilon(flags, &ThresholdConfig::default(), &mut run)?;
    if flags.epsilon_star.is_some() {
        doc.config.epsilon_star = Some(eps.clone());
    }
    let kb_text = doc.to_text();
    run.digest = digest(kb_text.as_bytes());
    run.settings.insert("domain", domain.to_string());
    run.settings.insert("order", order.to_string());
    if let Some(path) = kb_out {
        std::fs::write(path, &kb_text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let kb = &doc.kb;
    let defaults = generate_lottery_defaults(kb)?;
    let engine = Engine::new(kb, &doc.evidence, &defaults.rules).with_counter(counter.clone());

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{n} species, domain {domain}, delta* = {}",
        format_rational(&defaults.delta_star)
    );
    let labelled: Vec<_> = defaults.rules.iter().map(|r| (r.clone(), "generated")).collect();
    write_rules(&mut text, kb, &labelled);

    let exts = engine.reiter_extensions()?;
    let mut reiter = Vec::new();
    let mut table = Table::new(["extension", "spared", "proportion", "exact", "bound", "within"]);
    for (i, e) in exts.iter().enumerate() {
        let spared: Vec<usize> = (1..=n)
            .filter(|&s| !e.conclusions.contains(&GroundLiteral::neg(s, 0).to_ground()))
            .collect();
        let bound = match spared.as_slice() {
            [s] => Some(bounds[s - 1].1.clone()),
            _ => None,
        };
        let within = bound.as_ref().is_none_or(|b| e.final_proportion <= *b);
        let names: Vec<String> = spared.iter().map(|s| kb.predicates[*s].clone()).collect();
        table.row([
            (i + 1).to_string(),
            names.join(" "),
            decimal6(&e.final_proportion),
            Exact::from(&e.final_proportion).exact,
            bound.as_ref().map(format_rational).unwrap_or_else(|| "-".into()),
            if within { "yes" } else { "NO" }.to_string(),
        ]);
        reiter.push(LotteryExtension {
            spared: names,
            bound: bound.as_ref().map(Exact::from),
            within_bound: within,
            extension: extension_entry(kb, e),
        });
    }
    let _ = writeln!(text, "\n{} Reiter extension(s)", exts.len());
    text.push_str(&table.render());

    let opts = ThresholdOptions {
        epsilon_star: eps,
        ordering: parse_order(order, defaults.rules.len())?,
        inclusive: false,
    };
    let out = engine.thresholded_extension(&opts)?;
    let threshold = threshold_entry(kb, &out, &opts, order);
    text.push('\n');
    write_threshold(&mut text, &threshold);
    let exceeds = exts.iter().all(|e| out.extension.final_proportion > e.final_proportion);
    let _ = writeln!(
        text,
        "thresholded proportion {} every Reiter extension",
        if exceeds { "exceeds" } else { "does not exceed" }
    );

    let status = if reiter.iter().all(|r| r.within_bound) {
        Status::Ok
    } else {
        Status::Violation
    };
    Ok(run.finish(
        text,
        status,
        CommandResult::Lottery(LotteryResult {
            species: n,
            domain,
            intervals: bounds.iter().map(|(lo, hi)| [Exact::from(lo), Exact::from(hi)]).collect(),
            delta_star: Exact::from(&defaults.delta_star),
            rules: defaults.rules.iter().map(|r| kb.show_rule(r)).collect(),
            reiter,
            threshold,
            threshold_exceeds_reiter: exceeds,
        }),
    ))
}

struct Check {
    query: String,
    counter: String,
    oracle: String,
}

fn compare_state(
    kb: &KnowledgeBase,
    facts: &[GroundFormula],
    queries: &[GroundFormula],
    counter: &ModelCounter,
    oracle: &Oracle,
) -> Result<Vec<Check>> {
    let mut w = WorldState::new(kb);
    for f in facts {
        w.assume(f.clone());
    }
    let (total, hits) = oracle.count(&w, queries)?;
    let fast = match counter.tally(&w, queries) {
        Ok(t) => Some(t),
        Err(CountError::InconsistentAxioms) => None,
        Err(e) => return Err(e.into()),
    };
    let zero = BigUint::from(0u32);
    let (fast_total, fast_hits) = match &fast {
        Some(t) => (t.total.clone(), t.with_query.clone()),
        None => (zero.clone(), vec![zero; queries.len()]),
    };
    let mut out = vec![Check {
        query: "models".into(),
        counter: fast_total.to_string(),
        oracle: total.to_string(),
    }];
    for ((q, c), o) in queries.iter().zip(fast_hits).zip(hits) {
        out.push(Check {
            query: kb.show_ground(q),
            counter: c.to_string(),
            oracle: o.to_string(),
        });
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn verify_oracle(
    kb_path: Option<&Path>,
    random: Option<usize>,
    seed: u64,
    cap: u64,
    space: OracleSpace,
    domain: Option<usize>,
    counter: &ModelCounter,
    mut run: Run,
) -> Result<Outcome> {
    let oracle = Oracle::new(
        cap,
        match space {
            OracleSpace::Raw => Space::Raw,
            OracleSpace::Filtered => Space::AxiomFiltered,
        },
    );
    run.settings.insert("cap", cap.to_string());
    run.settings.insert(
        "space",
        match space {
            OracleSpace::Raw => "raw",
            OracleSpace::Filtered => "filtered",
        }
        .into(),
    );
    let mut checks = Vec::new();
    let samples;
    match (kb_path, random) {
        (Some(path), None) => {
            let doc = load(path, domain, &mut run)?;
            let kb = &doc.kb;
            let facts: Vec<GroundFormula> = doc.evidence.iter().map(|l| l.to_ground()).collect();
            let queries: Vec<GroundFormula> = (0..kb.constants.len())
                .flat_map(|c| (0..kb.predicates.len()).map(move |p| GroundLiteral::pos(p, c).to_ground()))
                .collect();
            for c in compare_state(kb, &facts, &queries, counter, &oracle)? {
                checks.push((0, c));
            }
            samples = 1;
        }
        (None, Some(count)) => {
            run.digest = digest(format!("random:{count}:{seed}").as_bytes());
            run.settings.insert("seed", seed.to_string());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..count {
                let s = random_sample(&mut rng, &Limits::default());
                for c in compare_state(&s.kb, &s.facts, &s.queries, counter, &oracle)? {
                    checks.push((i, c));
                }
            }
            samples = count;
        }
        (Some(_), Some(_)) => bail!("give either a knowledge base or --random, not both"),
        (None, None) => bail!("give a knowledge base or --random"),
    }
    let entries: Vec<CheckEntry> = checks
        .into_iter()
        .map(|(sample, c)| CheckEntry {
            sample,
            equal: c.counter == c.oracle,
            query: c.query,
            counter: c.counter,
            oracle: c.oracle,
        })
        .collect();
    let mismatches = entries.iter().filter(|e| !e.equal).count();
    let mut text = String::new();
    if samples == 1 {
        let mut t = Table::new(["query", "counter", "oracle", "equal"]);
        for e in &entries {
            t.row([e.query.clone(), e.counter.clone(), e.oracle.clone(), e.equal.to_string()]);
        }
        text.push_str(&t.render());
    }
    let _ = writeln!(text, "{samples} state(s), {} check(s), {mismatches} mismatch(es)", entries.len());
    if let Some(first) = entries.iter().find(|e| !e.equal) {
        let _ = writeln!(
            text,
            "first mismatch: state {} query {}: counter {} vs oracle {}",
            first.sample, first.query, first.counter, first.oracle
        );
    }
    let status = if mismatches == 0 { Status::Ok } else { Status::Violation };
    Ok(run.finish(
        text,
        status,
        CommandResult::VerifyOracle(VerifyResult {
            samples,
            checks: entries,
            mismatches,
        }),
    ))
}

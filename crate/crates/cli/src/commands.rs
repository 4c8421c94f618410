use std::fmt::Write as _;
use std::time::Instant;

use num_rational::Ratio;
use qam_core::lattice::LatticeState;
use qam_core::natstat::{
    exact_decision_distribution, forget_all_probability, monte_carlo_decision_distribution,
    parse_outcomes, predict_with_imperfect_memory, relative_frequency_estimate,
    variance_experiment, MemoryModel, Mode, VarianceReport,
};
use qam_core::rational::{to_big, to_decimal};
use qam_core::revgate::{
    ccn_slice, n_slice, reversibility_check, truth_table, Bit, GateRow,
};
use qam_core::{
    agreement, analyze, cross_check, ensure_valid, trace, validate, BitMask, Distribution, EngineConfig, GivenContext, Outcome, Prediction, Rational,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::input::LoadedDataset;
use crate::json::{self, DECIMAL_DIGITS};
use crate::{Failure, Format};

/// A finished report, rendered only once everything has been computed.
pub struct Output {
    pub text: String,
    pub json: Value,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => json::render(&self.json),
        }
    }
}

fn q(q: &Rational) -> String {
    format!("{q}  {}", to_decimal(q, DECIMAL_DIGITS))
}

fn config_json(cfg: &EngineConfig) -> Value {
    json!({
        "max_vars": cfg.max_vars,
        "retain_include_matrix": cfg.retain_include_matrix,
        "seed": cfg.seed,
    })
}

fn input_json(data: &LoadedDataset, given: &GivenContext, cfg: &EngineConfig) -> Value {
    json!({
        "dataset": {
            "sha256": data.sha256,
            "occurrences": data.dataset.len(),
            "arity": data.dataset.arity(),
        },
        "given": given.vars,
        "config": config_json(cfg),
    })
}

fn input_text(out: &mut String, data: &LoadedDataset, given: &GivenContext) {
    let _ = writeln!(out, "dataset\tsha256:{}\t{} occurrences", data.sha256, data.dataset.len());
    let _ = writeln!(out, "given\t{given}");
}

fn distribution_text(out: &mut String, d: &Distribution) {
    for (o, p) in d.iter() {
        let _ = writeln!(out, "{o}\t{}", q(p));
    }
    if d.has_null() || d.iter().next().is_none() {
        let _ = writeln!(out, "∅\t{}", q(d.null_mass()));
    }
}

fn flag(b: bool) -> char {
    if b {
        '1'
    } else {
        '0'
    }
}

const CELL_HEADER: &str = "supracontext\tsum\toutcome.1st\toutcome.plur\tintersect.1st\tintersect.plur\thetero\tampl";

fn cell_text(state: &LatticeState, supra: BitMask) -> String {
    let c = state.cell(supra);
    format!(
        "{supra}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        c.sum(),
        state.first_outcome(supra).map_or("-", Outcome::as_str),
        flag(c.plur_outcome()),
        state.first_intersect(supra).map_or_else(|| "-".to_owned(), |m| m.to_string()),
        flag(c.plur_intersect()),
        flag(c.hetero()),
        c.amplitude(),
    )
}

fn include_bits(state: &LatticeState, supra: BitMask) -> String {
    (0..state.processed())
        .map(|row| flag(state.include(row, supra) == Some(true)))
        .collect()
}

pub fn predict(
    data: &LoadedDataset,
    given: &GivenContext,
    cfg: &EngineConfig,
    draws: u64,
    timing: bool,
) -> Result<Output, Failure> {
    let started = Instant::now();
    let a = analyze(&data.dataset, given, cfg)?;
    let wave = a.wave();
    let agree = agreement(&a.distribution).ok();

    let mut tally: std::collections::BTreeMap<String, u64> = Default::default();
    if draws > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..draws {
            let key = match qam_core::select_pointer(&a.pointers, &mut rng) {
                Prediction::Outcome(o) => o.as_str().to_owned(),
                Prediction::Null => "∅".to_owned(),
            };
            *tally.entry(key).or_default() += 1;
        }
    }
    let elapsed = started.elapsed();

    let mut text = String::new();
    input_text(&mut text, data, given);
    text.push_str("\nlattice\n");
    text.push_str(CELL_HEADER);
    text.push('\n');
    for m in a.lattice.canonical_masks() {
        text.push_str(&cell_text(&a.lattice, m));
        text.push('\n');
    }
    text.push_str("\nanalogical set\nsupracontext\tamplitude\tpointers\toccurrences\toutcomes\n");
    for (e, row) in a.analogical_set.entries.iter().zip(&a.pointers.rows) {
        let occs: Vec<String> = e.occurrences.iter().map(|i| (i + 1).to_string()).collect();
        let outs: Vec<String> = row.per_outcome.iter().map(|(o, c)| format!("{o}:{c}")).collect();
        let _ = writeln!(
            text,
            "{}\t{}\t{}\t{}\t{}",
            e.supra,
            e.amplitude,
            row.total,
            occs.join(","),
            outs.join(" ")
        );
    }
    let _ = writeln!(text, "\npointers\t{}", a.pointers.total());
    text.push_str("\ndistribution\n");
    distribution_text(&mut text, &a.distribution);
    if let Some(w) = &wave {
        let _ = writeln!(text, "\nwave\t{}", w.render());
    }
    if let Some(g) = &agree {
        let _ = writeln!(text, "agreement\t{}", q(g));
    }
    if draws > 0 {
        let _ = writeln!(text, "\ndraws\t{}\tseed {}", draws, cfg.seed);
        for (k, c) in &tally {
            let _ = writeln!(text, "{k}\t{c}");
        }
    }
    if timing {
        let _ = writeln!(text, "\nelapsed_ms\t{:.3}", elapsed.as_secs_f64() * 1e3);
    }

    let mut report = json!({
        "command": "predict",
        "input": input_json(data, given, cfg),
        "lattice": json::lattice(&a.lattice, false),
        "analogical_set": a.analogical_set.entries.iter().map(|e| json!({
            "supracontext": e.supra.to_string(),
            "amplitude": e.amplitude,
            "occurrences": e.occurrences.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "outcomes": e.outcome_counts.iter().map(|(o, c)| (o.as_str().to_owned(), json!(c))).collect::<serde_json::Map<_, _>>(),
        })).collect::<Vec<_>>(),
        "pointers": {
            "total": a.pointers.total(),
            "rows": a.pointers.rows.iter().map(|r| json!({
                "supracontext": r.supra.to_string(),
                "amplitude": r.amplitude,
                "total": r.total,
                "outcomes": r.per_outcome.iter().map(|(o, c)| (o.as_str().to_owned(), json!(c))).collect::<serde_json::Map<_, _>>(),
            })).collect::<Vec<_>>(),
        },
        "distribution": json::distribution(&a.distribution),
        "wave": wave.as_ref().map(|w| json!({
            "ket": w.render(),
            "norm_squared": w.norm_squared,
            "terms": w.terms.iter().map(|t| json!({
                "supracontext": t.supra.to_string(),
                "amplitude": t.amplitude,
                "probability": json::rational(&t.probability),
            })).collect::<Vec<_>>(),
        })),
        "agreement": agree.as_ref().map(json::rational),
    });
    if draws > 0 {
        report["draws"] = json!({ "count": draws, "seed": cfg.seed, "tally": tally });
    }
    if timing {
        report["timing"] = json!({ "elapsed_ms": elapsed.as_secs_f64() * 1e3 });
    }
    Ok(Output { text, json: report })
}

pub fn trace_cmd(data: &LoadedDataset, given: &GivenContext, cfg: &EngineConfig) -> Result<Output, Failure> {
    let snaps = trace(&data.dataset, given, cfg)?;
    let mut text = String::new();
    input_text(&mut text, data, given);
    let mut steps = Vec::with_capacity(snaps.len());
    for s in &snaps {
        let _ = writeln!(
            text,
            "\nstep {}\t{}\tintersect {}",
            s.step,
            occurrence_text(&s.occurrence),
            s.intersect
        );
        let _ = writeln!(text, "{}", CELL_HEADER.replacen("\tsum", "\tinclude\tsum", 1));
        for m in s.state.canonical_masks() {
            let row = cell_text(&s.state, m);
            let (supra, rest) = row.split_once('\t').expect("cell rows are tab separated");
            let _ = writeln!(text, "{supra}\t{}\t{rest}", include_bits(&s.state, m));
        }
        steps.push(json!({
            "step": s.step,
            "occurrence": occurrence_text(&s.occurrence),
            "intersect": s.intersect.to_string(),
            "cells": json::lattice(&s.state, true),
        }));
    }
    let report = json!({
        "command": "trace",
        "input": input_json(data, given, cfg),
        "steps": steps,
    });
    Ok(Output { text, json: report })
}

fn occurrence_text(o: &qam_core::Occurrence) -> String {
    format!("{} {}", o.vars.join(" "), o.outcome)
}

pub fn validate_cmd(data: &LoadedDataset, given: &GivenContext, cfg: &EngineConfig) -> (Output, bool) {
    let violations = validate(&data.dataset, given, cfg);
    let messages: Vec<String> = violations.iter().map(ToString::to_string).collect();
    let text = if messages.is_empty() {
        "ok\n".to_owned()
    } else {
        messages.iter().map(|m| format!("{m}\n")).collect()
    };
    let report = json!({
        "command": "validate",
        "input": input_json(data, given, cfg),
        "ok": messages.is_empty(),
        "violations": messages,
    });
    (Output { text, json: report }, violations.is_empty())
}

pub fn cross_check_cmd(data: &LoadedDataset, given: &GivenContext, cfg: &EngineConfig) -> Result<(Output, bool), Failure> {
    let r = cross_check(&data.dataset, given, cfg)?;
    let mut text = String::new();
    input_text(&mut text, data, given);
    text.push_str("\nsupracontext\tsum\tdirect\tby_disagreement\tD(whole)\tD(parts)\tlattice_hetero\n");
    for row in &r.rows {
        let _ = writeln!(
            text,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            row.supra,
            row.lattice_sum,
            row.direct,
            row.by_disagreement,
            row.whole_disagreement,
            row.split_disagreement,
            flag(row.lattice_hetero)
        );
    }
    if r.is_clean() {
        text.push_str("\nconsistent\n");
    } else {
        text.push('\n');
        for m in &r.mismatches {
            let _ = writeln!(text, "mismatch\t{}\t{}", m.supra, m.what);
        }
    }
    let report = json!({
        "command": "cross-check",
        "input": input_json(data, given, cfg),
        "rows": r.rows.iter().map(|row| json!({
            "supracontext": row.supra.to_string(),
            "sum": row.lattice_sum,
            "direct": row.direct.label(),
            "by_disagreement": row.by_disagreement.label(),
            "whole_disagreement": row.whole_disagreement,
            "split_disagreement": row.split_disagreement,
            "lattice_hetero": row.lattice_hetero,
        })).collect::<Vec<_>>(),
        "mismatches": r.mismatches.iter().map(|m| json!({
            "supracontext": m.supra.to_string(),
            "what": m.what,
        })).collect::<Vec<_>>(),
    });
    Ok((Output { text, json: report }, r.is_clean()))
}

/// Settings shared by the natstat subcommands.
pub struct NatstatOptions {
    pub r: Ratio<u64>,
    pub mode: Mode,
    pub cap: usize,
    pub seed: u64,
}

impl NatstatOptions {
    fn json(&self) -> Value {
        json!({
            "r": json::rational(&to_big(self.r)),
            "mode": self.mode.label(),
            "trials": match self.mode { Mode::MonteCarlo { trials } => Some(trials), Mode::Exact => None },
            "enumeration_cap": self.cap,
            "seed": self.seed,
        })
    }

    fn text(&self, out: &mut String) {
        let _ = write!(out, "r\t{}\nmode\t{}", self.r, self.mode.label());
        if let Mode::MonteCarlo { trials } = self.mode {
            let _ = write!(out, "\ttrials {trials}\tseed {}", self.seed);
        }
        out.push('\n');
    }
}

pub fn decide(outcomes_text: &str, opts: &NatstatOptions) -> Result<Output, Failure> {
    let outcomes = parse_outcomes(outcomes_text)?;
    let model = MemoryModel::new(opts.r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let d = match opts.mode {
        Mode::Exact => exact_decision_distribution(&outcomes, &model, opts.cap)?,
        Mode::MonteCarlo { trials } => monte_carlo_decision_distribution(&outcomes, &model, trials, &mut rng)?,
    };
    let freq = relative_frequency_estimate(&outcomes);
    let forget = forget_all_probability(outcomes.len(), &model);

    let mut text = format!("outcomes\t{}\n", join_outcomes(&outcomes));
    opts.text(&mut text);
    text.push_str("\ndecision\n");
    distribution_text(&mut text, &d);
    text.push_str("\nrelative frequency\n");
    distribution_text(&mut text, &freq);
    let _ = writeln!(text, "\nforget all\t{}", q(&forget));

    let report = json!({
        "command": "natstat decide",
        "outcomes": outcomes.iter().map(Outcome::as_str).collect::<Vec<_>>(),
        "settings": opts.json(),
        "decision": json::distribution(&d),
        "relative_frequency": json::distribution(&freq),
        "forget_all": json::rational(&forget),
    });
    Ok(Output { text, json: report })
}

fn join_outcomes(o: &[Outcome]) -> String {
    o.iter().map(Outcome::as_str).collect::<Vec<_>>().join(" ")
}

pub fn variance(outcomes_text: &str, target: Option<&str>, opts: &NatstatOptions) -> Result<Output, Failure> {
    let outcomes = parse_outcomes(outcomes_text)?;
    let target = target.map(Outcome::new).transpose()?;
    let model = MemoryModel::new(opts.r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let rep = variance_experiment(&outcomes, target.as_ref(), &model, opts.mode, opts.cap, &mut rng)?;

    let rows = variance_rows(&rep);
    let mut text = format!("outcomes\t{}\n", join_outcomes(&outcomes));
    opts.text(&mut text);
    let _ = writeln!(text, "target\t{}\nn\t{}\n", rep.target, rep.n);
    for (name, value) in &rows {
        let _ = writeln!(text, "{name}\t{}", q(value));
    }

    let mut report = json!({
        "command": "natstat variance",
        "outcomes": outcomes.iter().map(Outcome::as_str).collect::<Vec<_>>(),
        "settings": opts.json(),
        "target": rep.target.as_str(),
        "n": rep.n,
    });
    for (name, value) in &rows {
        report[*name] = json::rational(value);
    }
    Ok(Output { text, json: report })
}

fn variance_rows(rep: &VarianceReport) -> [(&'static str, &Rational); 6] {
    [
        ("frequency", &rep.frequency),
        ("p_nonempty", &rep.p_nonempty),
        ("expected_p", &rep.e_p),
        ("empirical_variance", &rep.empirical_var),
        ("expected_n_over_m", &rep.e_n_over_m),
        ("formula_variance", &rep.formula_var),
    ]
}

pub fn predict_imperfect(
    data: &LoadedDataset,
    given: &GivenContext,
    cfg: &EngineConfig,
    opts: &NatstatOptions,
) -> Result<Output, Failure> {
    ensure_valid(&data.dataset, given, cfg)?;
    let model = MemoryModel::new(opts.r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let d = predict_with_imperfect_memory(&data.dataset, given, &model, opts.mode, opts.cap, cfg, &mut rng)?;

    let mut text = String::new();
    input_text(&mut text, data, given);
    opts.text(&mut text);
    text.push_str("\ndistribution\n");
    distribution_text(&mut text, &d);

    let report = json!({
        "command": "natstat predict-imperfect",
        "input": input_json(data, given, cfg),
        "settings": opts.json(),
        "distribution": json::distribution(&d),
    });
    Ok(Output { text, json: report })
}

struct Gate {
    name: &'static str,
    rows: Vec<GateRow>,
    reversible: bool,
}

fn gates_list() -> Vec<Gate> {
    let and = |b: &[Bit]| vec![b[0] & b[1]];
    let ccn_rows = truth_table(3, ccn_slice);
    vec![
        Gate { name: "n-gate", rows: truth_table(1, n_slice), reversible: reversibility_check(1, n_slice) },
        Gate { name: "and-gate", rows: truth_table(2, and), reversible: reversibility_check(2, and) },
        Gate { name: "ccn-gate", rows: ccn_rows.clone(), reversible: reversibility_check(3, ccn_slice) },
        Gate {
            name: "and-gate from ccn-gate (c = 0)",
            rows: ccn_rows.into_iter().filter(|r| r.inputs[2] == 0).collect(),
            reversible: true,
        },
    ]
}

pub fn gates() -> Output {
    let gates = gates_list();
    let mut text = String::new();
    for (i, g) in gates.iter().enumerate() {
        if i > 0 {
            text.push('\n');
        }
        let _ = writeln!(text, "{}\t{}", g.name, if g.reversible { "reversible" } else { "irreversible" });
        for r in &g.rows {
            let _ = writeln!(text, "{r}");
        }
    }
    let bits = |b: &[Bit]| b.iter().map(|x| char::from(b'0' + x)).collect::<String>();
    let report = json!({
        "command": "gates",
        "gates": gates.iter().map(|g| json!({
            "name": g.name,
            "reversible": g.reversible,
            "rows": g.rows.iter().map(|r| json!({
                "inputs": bits(&r.inputs),
                "outputs": bits(&r.outputs),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    Output { text, json: report }
}

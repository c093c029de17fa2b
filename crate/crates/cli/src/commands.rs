use std::fmt::Write as _;

use fibgrowth_core::growth::GrowthSeries;
use fibgrowth_core::mealy::{check_theta_conjugacy, MealyMachine, ThetaMode};
use fibgrowth_core::quotients::{
    enumerate_wn, hausdorff_sequence, ideal_witnesses, idzn_identities, trace_empirical, trace_exact, wn_order_formula,
    wn_relation_check,
};
use fibgrowth_core::rewrite::{nf_length, normalize, reduce_trace, NormalForm};
use fibgrowth_core::verify::{
    check_contraction, check_identity, check_lemma_suite, check_no_solution, check_relations, IdentityMode,
    VerificationReport, Verdict,
};
use fibgrowth_core::words::{format_indices, GeneratorWord};
use fibgrowth_core::{Error, Result};
use serde_json::json;

use crate::{Cli, Command, Format, Suite, VerifyArgs};

pub struct Outcome {
    pub output: String,
    pub code: u8,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, code: 0 }
    }
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let format = cli.format;
    match &cli.command {
        Command::Act { machine, states, input } => act(format, machine.as_deref(), states, input),
        Command::Normalize { word } => normalize_cmd(format, word),
        Command::Reduce { word, trace } => reduce_cmd(format, word, *trace),
        Command::Growth { max_length, checkpoints } => growth(format, *max_length, checkpoints),
        Command::Wn { level, verify } => wn(format, *level, *verify),
        Command::Trace { word, levels } => trace(format, word, levels),
        Command::IdealWitness { word } => ideal_witness(format, word),
        Command::Hausdorff { max } => hausdorff(format, *max),
        Command::Verify(args) => verify(format, args),
        Command::ThetaCheck { level, sample, seed } => {
            let mode = match sample {
                Some(count) => ThetaMode::Sample { count: *count, seed: *seed },
                None => ThetaMode::Exhaustive,
            };
            report_outcome(format, &check_theta_conjugacy(*level, mode)?)
        }
    }
}

fn act(format: Format, machine: Option<&std::path::Path>, states: &str, input: &str) -> Result<Outcome> {
    let machine = match machine {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::MachineDefinition {
                line: 0,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            MealyMachine::parse(&text)?
        }
        None => MealyMachine::automaton_i(),
    };
    let word = machine.parse_state_word(states)?;
    let letters = input
        .chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .filter(|&d| d < machine.alphabet_size())
                .ok_or_else(|| Error::WordSyntax(format!("`{c}` is not a letter of the alphabet")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let image: String = machine.act(&word, &letters)?.iter().map(|d| d.to_string()).collect();
    Ok(Outcome::ok(match format {
        Format::Json => pretty(&json!({ "states": states, "input": input, "output": image })),
        Format::Csv => format!("states,input,output\n{states},{input},{image}\n"),
        Format::Text => format!("{image}\n"),
    }))
}

fn nf_json(nf: &NormalForm) -> serde_json::Value {
    json!({
        "normal_form": nf.to_string(),
        "epsilon": nf.epsilon(),
        "indices": nf.indices(),
        "length": nf_length(nf).to_string(),
    })
}

fn normalize_cmd(format: Format, word: &str) -> Result<Outcome> {
    let nf = normalize(&GeneratorWord::parse(word)?)?;
    let length = nf_length(&nf);
    Ok(Outcome::ok(match format {
        Format::Json => pretty(&nf_json(&nf)),
        Format::Csv => format!("word,normal_form,length\n{word},{nf},{length}\n"),
        Format::Text => format!("{nf}\nlength: {length}\n"),
    }))
}

fn reduce_cmd(format: Format, word: &str, show_steps: bool) -> Result<Outcome> {
    let indices = GeneratorWord::parse(word)?.to_indexed();
    let steps = reduce_trace(&indices)?;
    let nf = NormalForm::from_reduced(steps.last().map_or(&indices, |s| &s.after))?;
    let mut out = String::new();
    match format {
        Format::Json => {
            let value = json!({ "word": format_indices(&indices), "steps": steps, "normal_form": nf_json(&nf) });
            out = pretty(&value);
        }
        Format::Csv => {
            out.push_str("step,position,rule,after,eta_before,eta_after\n");
            for (i, s) in steps.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},\"{}\",\"{}\"",
                    i + 1,
                    s.position,
                    s.rule,
                    format_indices(&s.after),
                    s.eta_before,
                    s.eta_after
                );
            }
        }
        Format::Text => {
            if show_steps {
                let _ = writeln!(out, "   {}  η = {}", format_indices(&indices), fibgrowth_core::rewrite::termination_measure(&indices));
                for s in &steps {
                    let _ = writeln!(
                        out,
                        "{} at {}: {}  η {} -> {}",
                        s.rule,
                        s.position,
                        format_indices(&s.after),
                        s.eta_before,
                        s.eta_after
                    );
                }
            }
            let _ = writeln!(out, "{nf}");
        }
    }
    Ok(Outcome::ok(out))
}

fn default_checkpoints(max: u64) -> Vec<u64> {
    let mut points: Vec<u64> = std::iter::successors(Some(1u64), |p| p.checked_mul(10)).take_while(|&p| p < max).collect();
    points.push(max);
    points
}

fn growth(format: Format, max_length: u64, checkpoints: &[u64]) -> Result<Outcome> {
    if max_length == 0 {
        return Err(Error::Precondition("--max-length must be at least 1".into()));
    }
    let checkpoints = if checkpoints.is_empty() { default_checkpoints(max_length) } else { checkpoints.to_vec() };
    let mut series = GrowthSeries::new(max_length)?;
    let report = series.report(&checkpoints, (1, max_length))?;
    let mut out = String::new();
    match format {
        Format::Json => out = pretty(&report),
        Format::Csv | Format::Text => {
            if format == Format::Text {
                let _ = writeln!(out, "alpha: {:.9}", report.alpha);
                let _ = writeln!(out, "C: {:.9}", report.c);
                let _ = writeln!(out, "D: {:.9}", report.d);
                match report.onset {
                    Some(l) => {
                        let _ = writeln!(out, "bounds hold from length {l} to {max_length}");
                    }
                    None => {
                        let _ = writeln!(out, "bounds fail at length {max_length}");
                    }
                }
            }
            out.push_str("length,gamma,ratio,lower_ok,upper_ok\n");
            for c in &report.checkpoints {
                let _ = writeln!(out, "{},{},{:.9},{},{}", c.length, c.gamma, c.ratio, c.lower_ok, c.upper_ok);
            }
        }
    }
    Ok(Outcome::ok(out))
}

fn wn(format: Format, level: u32, verify: bool) -> Result<Outcome> {
    let w = enumerate_wn(level)?;
    let formula = wn_order_formula(level);
    let report = if verify { Some(wn_relation_check(level)?) } else { None };
    let order_ok = formula == w.len().into();
    let code = match &report {
        Some(r) if !r.passed() => 1,
        _ if !order_ok => 1,
        _ => 0,
    };
    let output = match format {
        Format::Json => pretty(&json!({
            "level": level,
            "order": w.len(),
            "formula": formula.to_string(),
            "constant_maps": w.constant_count(),
            "relations": report,
        })),
        Format::Csv => {
            let verdict = report.as_ref().map_or(String::new(), |r| r.verdict.to_string());
            format!("level,order,formula,constant_maps,relations\n{level},{},{formula},{},{verdict}\n", w.len(), w.constant_count())
        }
        Format::Text => {
            let mut out = format!("order: {}\nformula: {formula}\nconstant maps: {}\n", w.len(), w.constant_count());
            if let Some(r) = &report {
                for f in &r.failures {
                    let _ = writeln!(out, "failed: {} ({})", f.description, f.witness);
                }
                let _ = writeln!(out, "relations: {} ({} checks)", r.verdict, r.cases);
            }
            out
        }
    };
    Ok(Outcome { output, code })
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<u32>> {
    let bad = || Error::WordSyntax(format!("expected a level range `a..b`, got `{text}`"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn trace(format: Format, word: &str, levels: &str) -> Result<Outcome> {
    let parsed = GeneratorWord::parse(word)?;
    let nf = normalize(&parsed)?;
    let range = parse_range(levels)?;
    let exact = match nf.maximal_index() {
        Some(n) if n >= 3 => Some(trace_exact(&nf)?),
        _ => None,
    };
    let empirical = trace_empirical(&parsed, range.clone())?;
    let mut out = String::new();
    match format {
        Format::Json => {
            let rows: Vec<_> = range.zip(&empirical).map(|(l, t)| json!({ "level": l, "trace": t })).collect();
            out = pretty(&json!({ "normal_form": nf.to_string(), "exact": exact, "empirical": rows }));
        }
        Format::Csv | Format::Text => {
            if format == Format::Text {
                let _ = writeln!(out, "normal form: {nf}");
                match &exact {
                    Some(t) => {
                        let _ = writeln!(out, "trace: {t}");
                    }
                    None => out.push_str("trace: no closed formula below maximal index 3\n"),
                }
            }
            out.push_str("level,trace\n");
            for (l, t) in range.zip(&empirical) {
                let _ = writeln!(out, "{l},{t}");
            }
        }
    }
    Ok(Outcome::ok(out))
}

fn ideal_witness(format: Format, word: &str) -> Result<Outcome> {
    let nf = normalize(&GeneratorWord::parse(word)?)?;
    let w = ideal_witnesses(&nf)?;
    let (left, right) = (format_indices(&w.left), format_indices(&w.right));
    Ok(Outcome::ok(match format {
        Format::Json => pretty(&json!({ "normal_form": nf.to_string(), "left": left, "right": right, "target": w.target_index })),
        Format::Csv => format!("normal_form,left,right,target\n{nf},{left},{right},f{}\n", w.target_index),
        Format::Text => format!("g: {nf}\nleft: {left}\nright: {right}\nproduct: f{}\n", w.target_index),
    }))
}

fn hausdorff(format: Format, max: u32) -> Result<Outcome> {
    let terms = hausdorff_sequence(max)?;
    Ok(Outcome::ok(match format {
        Format::Json => pretty(&terms),
        Format::Csv | Format::Text => {
            let mut out = String::from("n,order,h\n");
            for t in &terms {
                let _ = writeln!(out, "{},{},{:.12}", t.n, t.order, t.value_f64);
            }
            out
        }
    }))
}

fn verify(format: Format, args: &VerifyArgs) -> Result<Outcome> {
    let format = if args.json { Format::Json } else { format };
    let report = match args.suite {
        Suite::Identity => match args.max_len {
            None => check_identity(args.level.unwrap_or(6), IdentityMode::Exhaustive)?,
            Some(max_len) => check_identity(
                args.level.unwrap_or(12),
                IdentityMode::Random { count: args.count, max_len: max_len as usize, seed: args.seed },
            )?,
        },
        Suite::Relations => check_relations(args.max_len.unwrap_or(12) as u32, args.level.unwrap_or(14))?,
        Suite::NoSolution => check_no_solution(args.max_len.unwrap_or(10), args.level.unwrap_or(12))?,
        Suite::Contraction => check_contraction(args.max_len.unwrap_or(14))?,
        Suite::Lemmas => check_lemma_suite(args.level.unwrap_or(12))?,
        Suite::Theta => check_theta_conjugacy(args.level.unwrap_or(12), ThetaMode::Exhaustive)?,
        Suite::WnRelations => wn_relation_check(args.level.unwrap_or(6))?,
        Suite::Idzn => idzn_identities(args.level.unwrap_or(14), args.max_len.unwrap_or(10) as u32)?,
    };
    report_outcome(format, &report)
}

fn report_outcome(format: Format, report: &VerificationReport) -> Result<Outcome> {
    let code = match report.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    };
    let output = match format {
        Format::Json => pretty(report),
        Format::Csv => {
            let mut out = String::from("kind,description,witness,level\n");
            for (kind, list) in [("failure", &report.failures), ("inconclusive", &report.inconclusive)] {
                for f in list {
                    let _ = writeln!(out, "{kind},\"{}\",\"{}\",{}", f.description, f.witness, f.level);
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let params: Vec<String> = report.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "suite: {} ({})", report.suite, params.join(", "));
            for f in &report.failures {
                let _ = writeln!(out, "failed: {} [{}] at level {}", f.description, f.witness, f.level);
            }
            for f in &report.inconclusive {
                let _ = writeln!(out, "inconclusive: {} [{}], verified up to level {}", f.description, f.witness, f.level);
            }
            let _ = writeln!(out, "{}: {} cases", report.verdict, report.cases);
            out
        }
    };
    Ok(Outcome { output, code })
}

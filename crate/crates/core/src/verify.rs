//! Verification suites that compare raw transformation tables.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::normal_forms_up_to;
use crate::mealy::{check_level, decompose, Decomposition, LetterMap, TransformationTable};
use crate::quotients::{enumerate_wn, MAX_WN_LEVEL};
use crate::rewrite::{nf_length, normalize, symbolic_decompose};
use crate::words::{e_word, fib_word, format_indices, relation_words, Evaluator, GeneratorWord, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub description: String,
    pub witness: String,
    pub level: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub parameters: BTreeMap<String, String>,
    pub cases: u64,
    pub failures: Vec<Failure>,
    pub inconclusive: Vec<Failure>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            parameters: BTreeMap::new(),
            cases: 0,
            failures: Vec::new(),
            inconclusive: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    /// Sets the verdict from the collected failures and inconclusive cases.
    pub fn finish(&mut self) {
        self.verdict = if !self.failures.is_empty() {
            Verdict::Fail
        } else if !self.inconclusive.is_empty() {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Counts one case and keeps a failure if `ok` is false.
    pub fn record(&mut self, ok: bool, description: impl Into<String>, witness: impl Into<String>, level: u32) {
        self.cases += 1;
        if !ok {
            self.failures.push(Failure { description: description.into(), witness: witness.into(), level });
        }
    }
}

/// How [`check_identity`] picks the elements it tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityMode {
    /// Every element of W_level.
    Exhaustive,
    /// Random {s,f}-words, also testing g(wg)^5 = g(wg)^3.
    Random { count: usize, max_len: usize, seed: u64 },
}

const STRENGTHENING_WORDS: [&str; 6] = ["e", "s", "f", "fs", "ff", "ffs"];

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(1..=max_len.max(1));
    (0..len).map(|_| if rng.gen_bool(0.5) { Letter::S } else { Letter::F }).collect()
}

fn letters_string(word: &[Letter]) -> String {
    if word.is_empty() {
        "e".into()
    } else {
        word.iter().map(|l| l.name()).collect()
    }
}

/// g^6 = g^4 on level tables.
pub fn check_identity(level: u32, mode: IdentityMode) -> Result<VerificationReport> {
    check_level(level)?;
    let mut report = VerificationReport::new("identity");
    report.parameter("level", level);
    match mode {
        IdentityMode::Exhaustive => {
            if level > MAX_WN_LEVEL {
                return Err(Error::Precondition(format!("exhaustive identity check needs level ≤ {MAX_WN_LEVEL}")));
            }
            report.parameter("mode", "exhaustive");
            let w = enumerate_wn(level)?;
            for id in 0..w.len() as u32 {
                let g = w.table(id);
                let ok = g.power(6) == g.power(4);
                report.record(ok, "g^6 = g^4", letters_string(&w.representative(id)), level);
            }
        }
        IdentityMode::Random { count, max_len, seed } => {
            report.parameter("mode", "random");
            report.parameter("count", count);
            report.parameter("max_len", max_len);
            report.parameter("seed", seed);
            let mut ev = Evaluator::new(level)?;
            let ws: Vec<TransformationTable> = STRENGTHENING_WORDS
                .iter()
                .map(|w| GeneratorWord::parse(w).map(|w| ev.table(&w)))
                .collect::<Result<_>>()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let word = random_word(&mut rng, max_len);
                let name = letters_string(&word);
                let g = ev.letters_table(&word);
                report.record(g.power(6) == g.power(4), "g^6 = g^4", name.clone(), level);
                for (w, wname) in ws.iter().zip(STRENGTHENING_WORDS) {
                    let wg = w.then(&g);
                    let ok = g.then(&wg.power(5)) == g.then(&wg.power(3));
                    report.record(ok, format!("g(wg)^5 = g(wg)^3 with w = {wname}"), name.clone(), level);
                }
            }
        }
    }
    report.finish();
    Ok(report)
}

/// r_k = r'_k for k = 1..=n_max.
pub fn check_relations(n_max: u32, level: u32) -> Result<VerificationReport> {
    let mut ev = Evaluator::new(level)?;
    let mut report = VerificationReport::new("relations");
    report.parameter("n_max", n_max);
    report.parameter("level", level);
    for k in 1..=n_max {
        let (r, rp) = relation_words(k)?;
        report.record(ev.table(&r) == ev.table(&rp), format!("r_{k} = r'_{k}"), format!("{r} = {rp}"), level);
    }
    report.finish();
    Ok(report)
}

/// sfsf²x ≠ fx and sfy ≠ fsy for every x, y in the ball of the given radius.
pub fn check_no_solution(max_ball_length: u64, level: u32) -> Result<VerificationReport> {
    let mut ev = Evaluator::new(level)?;
    let mut report = VerificationReport::new("no-solution");
    report.parameter("max_ball_length", max_ball_length);
    report.parameter("level", level);
    let pairs = [("sfsff", "f"), ("sf", "fs")];
    let prefixes: Vec<[TransformationTable; 2]> = pairs
        .iter()
        .map(|(a, b)| -> Result<_> {
            Ok([ev.table(&GeneratorWord::letters(a)?), ev.table(&GeneratorWord::letters(b)?)])
        })
        .collect::<Result<_>>()?;
    let mut deepest = 0;
    for x in normal_forms_up_to(max_ball_length) {
        let xt = ev.table(&x.to_generator_word());
        for ((a, b), [at, bt]) in pairs.iter().zip(&prefixes) {
            report.cases += 1;
            let (lhs, rhs) = (at.then(&xt), bt.then(&xt));
            match (0..=level).find(|&j| lhs.restrict(j) != rhs.restrict(j)) {
                Some(j) => deepest = deepest.max(j),
                None => report.inconclusive.push(Failure {
                    description: format!("{a}·x and {b}·x agree up to level {level}"),
                    witness: x.to_string(),
                    level,
                }),
            }
        }
    }
    report.parameter("deepest_separating_level", deepest);
    report.finish();
    Ok(report)
}

/// ‖g_i‖ ≤ (2/3)(‖g‖ + 2) for both coordinates of every g with ‖g‖ ≤ max_len.
pub fn check_contraction(max_len: u64) -> Result<VerificationReport> {
    if max_len > 14 {
        return Err(Error::Precondition("contraction check needs max_len ≤ 14".into()));
    }
    let level = 8;
    let mut ev = Evaluator::new(level)?;
    let mut report = VerificationReport::new("contraction");
    report.parameter("max_len", max_len);
    for g in normal_forms_up_to(max_len) {
        let d = if g.is_identity() {
            Decomposition { coords: [GeneratorWord::empty(), GeneratorWord::empty()], letter_map: LetterMap::Identity }
        } else if g.indices().is_empty() {
            decompose(&g.to_generator_word().to_letters())?
        } else {
            symbolic_decompose(&g)?
        };
        let reconstructed = d.reconstruct_table(level)? == ev.table(&g.to_generator_word());
        report.record(reconstructed, "decomposition reproduces g", g.to_string(), level);
        let bound = 2u32 * (nf_length(&g) + 2u32);
        for (i, coord) in d.coords.iter().enumerate() {
            let len = nf_length(&normalize(coord)?);
            report.record(3u32 * len <= bound, format!("‖g_{i}‖ ≤ (2/3)(‖g‖+2)"), g.to_string(), level);
        }
    }
    report.finish();
    Ok(report)
}

/// Auxiliary identities among the f_n with indices up to 10.
pub fn check_lemma_suite(level: u32) -> Result<VerificationReport> {
    const MAX_INDEX: u32 = 10;
    let mut ev = Evaluator::new(level)?;
    let mut report = VerificationReport::new("lemmas");
    report.parameter("level", level);
    report.parameter("max_index", MAX_INDEX);
    let mut same = |report: &mut VerificationReport, description: String, lhs: Vec<u32>, rhs: Vec<u32>| {
        let ok = ev.indexed_table(&lhs) == ev.indexed_table(&rhs);
        report.record(ok, description, format!("{} = {}", format_indices(&lhs), format_indices(&rhs)), level);
    };
    for a in 3..=MAX_INDEX {
        for b in 1..=a - 2 {
            same(&mut report, format!("f_{a} f_{b}^2 = f_{a}"), vec![a, b, b], vec![a]);
        }
    }
    for n in 2..=MAX_INDEX - 1 {
        let mut rhs: Vec<u32> = (1..=n.saturating_sub(2)).flat_map(|i| [i, i]).collect();
        rhs.push(n + 1);
        let (_, rp) = relation_words(n)?;
        same(&mut report, format!("r'_{n} = (f_1^2 ⋯ f_{}^2) f_{}", n - 2, n + 1), rp.to_indexed(), rhs);
    }
    for n in 1..=MAX_INDEX {
        same(&mut report, format!("f_{n}^5 = f_{n}^3"), vec![n; 5], vec![n; 3]);
        if n <= 4 {
            same(&mut report, format!("f_{n}^4 = f_{n}^2"), vec![n; 4], vec![n; 2]);
        }
    }
    for n in 1..=MAX_INDEX - 3 {
        same(&mut report, format!("f_{} f_{n}^2 f_{} = f_{}", n + 1, n + 2, n + 3), vec![n + 1, n, n, n + 2], vec![n + 3]);
    }
    for n in 8..=MAX_INDEX {
        let steps: [Vec<u32>; 4] = [
            vec![n - 2, n - 3, n - 5, n - 7, n - 2, n],
            vec![n - 2, n - 3, n - 5, n - 3, n],
            vec![n - 2, n - 3, n - 4, n],
            vec![n - 2, n - 5, n],
        ];
        for step in steps {
            same(&mut report, format!("reducer chain ends at f_{n}"), step, vec![n]);
        }
    }
    for p in 3..=MAX_INDEX {
        for m in 2..p {
            same(&mut report, format!("f_{p} f_{m} f_{}^2 = f_{p} f_{m}", m - 1), vec![p, m, m - 1, m - 1], vec![p, m]);
        }
    }
    let mut lower = Evaluator::new(level.saturating_sub(1))?;
    for n in 5..=MAX_INDEX {
        let word = fib_word(n)?;
        let direct = decompose(&word.to_letters())?;
        let symbolic = symbolic_decompose(&normalize(&word)?)?;
        let expected = [fib_word(n - 1)?, e_word(n - 1)?];
        let tables_ok = (0..2).all(|i| {
            let want = lower.table(&expected[i]);
            lower.table(&direct.coords[i]) == want && lower.table(&symbolic.coords[i]) == want
        });
        let maps_ok = direct.letter_map == LetterMap::Constant(0) && symbolic.letter_map == LetterMap::Constant(0);
        report.record(tables_ok && maps_ok, format!("φ(f_{n}) = ⟨f_{}, e_{}⟩ζ", n - 1, n - 1), format!("f{n}"), level);
    }
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_exhaustive_small() {
        let r = check_identity(6, IdentityMode::Exhaustive).unwrap();
        assert!(r.passed());
        assert_eq!(r.cases, 1882);
    }

    #[test]
    fn identity_random() {
        let r = check_identity(10, IdentityMode::Random { count: 50, max_len: 15, seed: 7 }).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.cases, 50 * 7);
        assert!(check_identity(11, IdentityMode::Exhaustive).is_err());
    }

    #[test]
    fn relations_pass() {
        let r = check_relations(10, 12).unwrap();
        assert!(r.passed());
        assert_eq!(r.cases, 10);
    }

    #[test]
    fn no_solutions_in_small_ball() {
        let r = check_no_solution(10, 12).unwrap();
        assert!(r.passed(), "{:?}", r.inconclusive);
        assert!(r.parameters["deepest_separating_level"].parse::<u32>().unwrap() <= 12);
    }

    #[test]
    fn no_solution_is_inconclusive_at_level_zero() {
        let r = check_no_solution(2, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn contraction_holds() {
        let r = check_contraction(14).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(check_contraction(15).is_err());
    }

    #[test]
    fn lemma_suite_passes() {
        let r = check_lemma_suite(12).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn fourth_fibonacci_decomposition() {
        let d = decompose(&fib_word(4).unwrap().to_letters()).unwrap();
        assert_eq!(d.coords[1], GeneratorWord::letters("ff").unwrap());
        let mut ev = Evaluator::new(6).unwrap();
        assert_ne!(ev.table(&d.coords[1]), ev.table(&e_word(3).unwrap()));
    }

    #[test]
    fn verdicts() {
        let mut r = VerificationReport::new("x");
        r.record(true, "a", "e", 1);
        r.finish();
        assert_eq!(r.verdict, Verdict::Pass);
        r.record(false, "b", "s", 1);
        r.finish();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.cases, 2);
        assert_eq!(Verdict::Inconclusive.to_string(), "inconclusive");
    }
}

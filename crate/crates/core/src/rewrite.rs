//! The rewriting system over the Fibonacci generators f_i and its normal forms.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mealy::{Decomposition, LetterMap};
use crate::words::{fib, fib_u128, format_indices, GeneratorWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RuleId {
    N1,
    N2,
    N3,
    N4,
    N5,
    N6,
    N7,
    N8,
    N9,
    N10,
    /// f_{a+1} f_a f_{a+q} with q ≥ 5 odd.
    N11,
    /// f_{a+2} f_a f_{a+q} with q ≥ 5 odd.
    N12,
}

impl RuleId {
    pub const ALL: [RuleId; 12] = [
        RuleId::N1,
        RuleId::N2,
        RuleId::N3,
        RuleId::N4,
        RuleId::N5,
        RuleId::N6,
        RuleId::N7,
        RuleId::N8,
        RuleId::N9,
        RuleId::N10,
        RuleId::N11,
        RuleId::N12,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    /// N11 and N12 close the valleys that N1–N10 leave irreducible.
    pub fn is_supplementary(self) -> bool {
        matches!(self, RuleId::N11 | RuleId::N12)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.number())
    }
}

/// Which rules the engine may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSet {
    /// N1–N10 only.
    Base,
    /// N1–N12.
    Complete,
}

impl RuleSet {
    fn allows(self, rule: RuleId) -> bool {
        self == RuleSet::Complete || !rule.is_supplementary()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub a: Option<u32>,
    pub p: Option<u32>,
    pub q: Option<u32>,
}

impl RuleInstance {
    fn plain(rule: RuleId) -> Self {
        RuleInstance { rule, a: None, p: None, q: None }
    }

    fn with_a(rule: RuleId, a: u32) -> Self {
        RuleInstance { rule, a: Some(a), p: None, q: None }
    }

    fn valley(rule: RuleId, a: u32, p: u32, q: u32) -> Self {
        RuleInstance { rule, a: Some(a), p: Some(p), q: Some(q) }
    }

    /// Only N5 is tied to the start of the word.
    pub fn anchored(&self) -> bool {
        self.rule == RuleId::N5
    }

    pub fn lhs(&self) -> Vec<u32> {
        let a = self.a.unwrap_or(0);
        let (p, q) = (self.p.unwrap_or(0), self.q.unwrap_or(0));
        match self.rule {
            RuleId::N1 => vec![1, 1],
            RuleId::N2 => vec![a, a + 1],
            RuleId::N3 => vec![a, a],
            RuleId::N4 => vec![a, 2, 2],
            RuleId::N5 => vec![2],
            RuleId::N6 => vec![a + 1, a, a + 3],
            RuleId::N7 => vec![a + 2, a, a + 3],
            _ => vec![a + p, a, a + q],
        }
    }

    pub fn rhs(&self) -> Vec<u32> {
        let a = self.a.unwrap_or(0);
        let (p, q) = (self.p.unwrap_or(0), self.q.unwrap_or(0));
        let squares = |hi: u32| (2..=hi).flat_map(|j| [j, j]).collect::<Vec<_>>();
        match self.rule {
            RuleId::N1 => vec![],
            RuleId::N2 => vec![a + 2],
            RuleId::N3 => vec![a - 2, a + 1],
            RuleId::N4 => vec![a],
            RuleId::N5 => vec![1, 3],
            RuleId::N6 => vec![a + 3, a + 2],
            RuleId::N7 => vec![a, a + 3, a + 2],
            RuleId::N8 => {
                let mut out: Vec<u32> = (a..=a + p - 2).rev().collect();
                out.extend(squares(a.saturating_sub(2)));
                out.extend([a - 1, a + q]);
                out
            }
            RuleId::N9 => {
                let mut out: Vec<u32> = (a + 2..=a + p - 2).rev().collect();
                out.extend(squares(a));
                out.push(a + q);
                out
            }
            RuleId::N10 => {
                let mut out = vec![1 + p];
                out.extend((2..=q).step_by(2));
                out
            }
            RuleId::N11 | RuleId::N12 => {
                let mut out = if self.rule == RuleId::N12 { vec![a] } else { vec![] };
                out.extend(squares(a));
                out.push(a + 1);
                out.extend((a + 4..a + q).step_by(2));
                out
            }
        }
    }
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rule)?;
        let params: Vec<String> = [("a", self.a), ("p", self.p), ("q", self.q)]
            .iter()
            .filter_map(|(k, v)| v.map(|v| format!("{k}={v}")))
            .collect();
        if !params.is_empty() {
            write!(f, "({})", params.join(","))?;
        }
        Ok(())
    }
}

/// All rule instances matching at `pos`, in rule order.
fn matches_at(word: &[u32], pos: usize, rules: RuleSet) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    let x = word[pos];
    if pos == 0 && x == 2 {
        out.push(RuleInstance::plain(RuleId::N5));
    }
    if let Some(&y) = word.get(pos + 1) {
        if x == 1 && y == 1 {
            out.push(RuleInstance::plain(RuleId::N1));
        }
        if y == x + 1 {
            out.push(RuleInstance::with_a(RuleId::N2, x));
        }
        if x == y && x >= 3 {
            out.push(RuleInstance::with_a(RuleId::N3, x));
        }
        if let Some(&z) = word.get(pos + 2) {
            let a = y;
            if y == 2 && z == 2 && x >= 2 {
                out.push(RuleInstance::with_a(RuleId::N4, x));
            }
            if x > a && z > a {
                let (p, q) = (x - a, z - a);
                if p == 1 && q == 3 {
                    out.push(RuleInstance::with_a(RuleId::N6, a));
                }
                if p == 2 && q == 3 {
                    out.push(RuleInstance::with_a(RuleId::N7, a));
                }
                if a >= 2 && q % 2 == 0 {
                    out.push(RuleInstance::valley(RuleId::N8, a, p, q));
                }
                if p >= 3 && q >= 3 && q % 2 == 1 {
                    out.push(RuleInstance::valley(RuleId::N9, a, p, q));
                }
                if a == 1 && q % 2 == 0 {
                    out.push(RuleInstance::valley(RuleId::N10, a, p, q));
                }
                if q >= 5 && q % 2 == 1 && rules.allows(RuleId::N11) {
                    match p {
                        1 => out.push(RuleInstance::valley(RuleId::N11, a, p, q)),
                        2 => out.push(RuleInstance::valley(RuleId::N12, a, p, q)),
                        _ => {}
                    }
                }
            }
        }
    }
    out.sort_by_key(|r| r.rule);
    out
}

/// Every (position, rule) whose left-hand side matches, ordered by position then rule number.
pub fn applicable_rules(word: &[u32]) -> Vec<(usize, RuleInstance)> {
    applicable_rules_in(word, RuleSet::Complete)
}

pub fn applicable_rules_in(word: &[u32], rules: RuleSet) -> Vec<(usize, RuleInstance)> {
    (0..word.len())
        .flat_map(|pos| matches_at(word, pos, rules).into_iter().map(move |r| (pos, r)))
        .collect()
}

pub fn apply_rule(word: &[u32], position: usize, rule: &RuleInstance) -> Result<Vec<u32>> {
    let not_applicable = || Error::RuleNotApplicable { rule: rule.to_string(), position };
    if position >= word.len() || !matches_at(word, position, RuleSet::Complete).contains(rule) {
        return Err(not_applicable());
    }
    let lhs_len = rule.lhs().len();
    let mut out = word[..position].to_vec();
    out.extend(rule.rhs());
    out.extend(&word[position + lhs_len..]);
    Ok(out)
}

/// The lexicographic pair (η_1, η_2) of the termination argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TerminationMeasure {
    pub eta1: u128,
    pub eta2: u128,
}

impl fmt::Display for TerminationMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.eta1, self.eta2)
    }
}

pub fn termination_measure(word: &[u32]) -> TerminationMeasure {
    let n = word.len() as u128;
    let mut eta1: u128 = word.iter().map(|&i| fib_u128(i)).sum();
    if word.len() >= 2 && word[0] == 1 && word[1] >= 3 && word[1] % 2 == 1 {
        eta1 -= 3;
    }
    let eta2 = word
        .iter()
        .enumerate()
        .map(|(j, &i)| (n - j as u128) * i as u128)
        .sum();
    TerminationMeasure { eta1, eta2 }
}

fn step_guard(word: &[u32]) -> u64 {
    let m = termination_measure(word);
    let base = m.eta1.saturating_add(word.len() as u128).saturating_add(8);
    u64::try_from(base.saturating_mul(base).saturating_mul(4)).unwrap_or(u64::MAX)
}

fn check_indices(word: &[u32]) -> Result<()> {
    match word.iter().find(|&&i| i == 0 || i > 186) {
        Some(i) => Err(Error::Precondition(format!("index {i} outside 1..=186"))),
        None => Ok(()),
    }
}

/// Rewrites to an irreducible word, leftmost position first.
pub fn reduce(word: &[u32], rules: RuleSet) -> Result<Vec<u32>> {
    check_indices(word)?;
    let guard = step_guard(word);
    let mut w = word.to_vec();
    let mut steps = 0u64;
    while let Some((pos, rule)) = (0..w.len()).find_map(|pos| matches_at(&w, pos, rules).into_iter().next().map(|r| (pos, r))) {
        let len = rule.lhs().len();
        w.splice(pos..pos + len, rule.rhs());
        steps += 1;
        if steps > guard {
            return Err(Error::NonTermination(steps));
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    pub position: usize,
    pub rule: RuleInstance,
    pub after: Vec<u32>,
    pub eta_before: TerminationMeasure,
    pub eta_after: TerminationMeasure,
}

/// The leftmost-first reduction sequence, step by step.
pub fn reduce_trace(word: &[u32]) -> Result<Vec<ReductionStep>> {
    check_indices(word)?;
    let guard = step_guard(word);
    let mut w = word.to_vec();
    let mut steps = Vec::new();
    while let Some((position, rule)) = applicable_rules(&w).into_iter().next() {
        let after = apply_rule(&w, position, &rule)?;
        steps.push(ReductionStep {
            position,
            rule,
            eta_before: termination_measure(&w),
            eta_after: termination_measure(&after),
            after: after.clone(),
        });
        if steps.len() as u64 > guard {
            return Err(Error::NonTermination(steps.len() as u64));
        }
        w = after;
    }
    Ok(steps)
}

/// s^ε f_{i_1} ⋯ f_{i_n} with the shape constraints of the normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NormalForm {
    epsilon: u8,
    indices: Vec<u32>,
}

/// True when `indices` ascend from ≥ 3 with gaps ≥ 2 to a peak, then strictly descend to ≥ 1.
pub fn is_normal_shape(indices: &[u32]) -> bool {
    let Some(&first) = indices.first() else {
        return true;
    };
    if first < 3 || indices.contains(&0) {
        return false;
    }
    let peak = peak_position(indices);
    indices[..=peak].windows(2).all(|w| w[0] + 1 < w[1]) && indices[peak..].windows(2).all(|w| w[0] > w[1])
}

fn peak_position(indices: &[u32]) -> usize {
    let max = *indices.iter().max().expect("nonempty");
    indices.iter().position(|&i| i == max).expect("max present")
}

impl NormalForm {
    pub fn new(epsilon: u8, indices: Vec<u32>) -> Result<Self> {
        if epsilon > 1 || !is_normal_shape(&indices) {
            return Err(Error::Precondition(format!(
                "s^{epsilon} {} is not a normal form",
                format_indices(&indices)
            )));
        }
        Ok(NormalForm { epsilon, indices })
    }

    /// Reads ε off a reduced word: a leading f_1 that is not part of the index shape.
    pub fn from_reduced(word: &[u32]) -> Result<Self> {
        match word {
            [1, rest @ ..] => Self::new(1, rest.to_vec()),
            _ => Self::new(0, word.to_vec()),
        }
    }

    pub fn identity() -> Self {
        NormalForm { epsilon: 0, indices: Vec::new() }
    }

    pub fn epsilon(&self) -> u8 {
        self.epsilon
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn maximal_index(&self) -> Option<u32> {
        self.indices.iter().copied().max()
    }

    pub fn is_identity(&self) -> bool {
        self.epsilon == 0 && self.indices.is_empty()
    }

    /// The ascending part before the peak, the peak, and the descending tail.
    pub fn split(&self) -> Option<(&[u32], u32, &[u32])> {
        if self.indices.is_empty() {
            return None;
        }
        let m = peak_position(&self.indices);
        Some((&self.indices[..m], self.indices[m], &self.indices[m + 1..]))
    }

    /// The word f_1^ε f_{i_1} ⋯ f_{i_n}.
    pub fn word(&self) -> Vec<u32> {
        let mut w = vec![1; self.epsilon as usize];
        w.extend(&self.indices);
        w
    }

    pub fn to_generator_word(&self) -> GeneratorWord {
        GeneratorWord::Indexed(self.word())
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_indices(&self.word()))
    }
}

pub fn normalize(word: &GeneratorWord) -> Result<NormalForm> {
    normalize_indices(&word.to_indexed())
}

pub fn normalize_indices(word: &[u32]) -> Result<NormalForm> {
    NormalForm::from_reduced(&reduce(word, RuleSet::Complete)?)
}

/// (−1)^{i_1}·ε + Σ Φ_{i_j}; the identity has length 0 and s has length 1.
pub fn nf_length(nf: &NormalForm) -> BigUint {
    let sum: BigUint = nf.indices.iter().map(|&i| fib(i)).sum();
    match (nf.epsilon, nf.indices.first()) {
        (0, _) => sum,
        (_, None) => BigUint::from(1u32),
        (_, Some(&i1)) => {
            let sign: i32 = if i1 % 2 == 0 { 1 } else { -1 };
            (BigInt::from(sum) + sign).to_biguint().expect("length is nonnegative")
        }
    }
}

/// Machine-integer variant of [`nf_length`].
pub fn nf_length_u128(nf: &NormalForm) -> u128 {
    let sum: u128 = nf.indices.iter().map(|&i| fib_u128(i)).sum();
    match (nf.epsilon, nf.indices.first()) {
        (0, _) => sum,
        (_, None) => 1,
        (_, Some(&i1)) if i1 % 2 == 0 => sum + 1,
        _ => sum - 1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub word: Vec<u32>,
    pub irreducibles: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfluenceReport {
    pub words_checked: u64,
    pub divergences: Vec<Divergence>,
    /// Irreducible words that do not have the normal-form shape.
    pub non_normal: Vec<Vec<u32>>,
}

/// Explores every reduction path from the words in `roots` and collects the irreducible ends.
pub struct ReductionExplorer {
    rules: RuleSet,
    memo: HashMap<Vec<u32>, BTreeSet<Vec<u32>>>,
}

impl ReductionExplorer {
    pub fn new(rules: RuleSet) -> Self {
        ReductionExplorer { rules, memo: HashMap::new() }
    }

    /// All irreducible words reachable from `word` by any sequence of rule applications.
    pub fn irreducibles(&mut self, word: &[u32]) -> BTreeSet<Vec<u32>> {
        if let Some(found) = self.memo.get(word) {
            return found.clone();
        }
        let succ: Vec<Vec<u32>> = applicable_rules_in(word, self.rules)
            .into_iter()
            .map(|(pos, r)| {
                let mut w = word[..pos].to_vec();
                w.extend(r.rhs());
                w.extend(&word[pos + r.lhs().len()..]);
                w
            })
            .collect();
        let result = if succ.is_empty() {
            BTreeSet::from([word.to_vec()])
        } else {
            succ.iter().flat_map(|w| self.irreducibles(w)).collect()
        };
        self.memo.insert(word.to_vec(), result.clone());
        result
    }

    /// Number of distinct words visited so far.
    pub fn visited(&self) -> usize {
        self.memo.len()
    }
}

/// Exhausts every word over f_1..f_{alphabet_bound} of length ≤ `length_bound`.
pub fn confluence_probe_with(alphabet_bound: u32, length_bound: usize, rules: RuleSet) -> ConfluenceReport {
    let mut explorer = ReductionExplorer::new(rules);
    let mut report = ConfluenceReport { words_checked: 0, divergences: Vec::new(), non_normal: Vec::new() };
    let mut seen_non_normal = BTreeSet::new();
    let mut layer: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..length_bound {
        layer = layer
            .iter()
            .flat_map(|w| {
                (1..=alphabet_bound).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
        for w in &layer {
            report.words_checked += 1;
            let ends = explorer.irreducibles(w);
            if ends.len() > 1 {
                report.divergences.push(Divergence { word: w.clone(), irreducibles: ends.iter().cloned().collect() });
            }
            for end in ends {
                if NormalForm::from_reduced(&end).is_err() && seen_non_normal.insert(end.clone()) {
                    report.non_normal.push(end);
                }
            }
        }
    }
    report
}

pub fn confluence_probe(alphabet_bound: u32, length_bound: usize) -> ConfluenceReport {
    confluence_probe_with(alphabet_bound, length_bound, RuleSet::Complete)
}

fn odd_chain(a: u32, b: u32) -> Vec<u32> {
    (a..=b).step_by(2).collect()
}

/// Largest k with i_r = 2r + base for every r < k (1-based; may be n + 1).
fn pattern_length(i: &[u32], base: u32) -> usize {
    let mut k = 1;
    while k <= i.len() && i[k - 1] == 2 * k as u32 + base {
        k += 1;
    }
    k
}

/// ⟨u0, u1⟩ for a normal-form core with first index > 1 and last index > 1.
fn core_decomposition(i: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let n = i.len();
    let rest = |from: usize| -> Vec<u32> { i[from - 1..].iter().map(|&x| x - 1).collect() };
    let i1 = i[0];
    let u0 = if i1 > 3 {
        rest(1)
    } else {
        let k = pattern_length(i, 1);
        let mut v = vec![1, 2 * k as u32 - 1];
        if k <= n {
            v.extend(rest(k));
        }
        v
    };
    let second_is_pred = n >= 2 && i[1] == i1 - 1;
    let tail_from = |from: usize| if from <= n { rest(from) } else { Vec::new() };
    let u1 = if i1 % 2 == 1 {
        if second_is_pred {
            [odd_chain(4, i1 - 1), tail_from(3)].concat()
        } else {
            [odd_chain(1, i1 - 2), tail_from(2)].concat()
        }
    } else if i1 >= 6 {
        if second_is_pred {
            [odd_chain(1, i1 - 1), tail_from(3)].concat()
        } else {
            [odd_chain(4, i1 - 2), tail_from(2)].concat()
        }
    } else {
        let k = pattern_length(i, 2);
        let short = k > n || i[k - 1] <= 2 * k as u32 - 2;
        if short {
            [vec![1, 2 * k as u32 - 1, 2 * k as u32 - 2], tail_from(k)].concat()
        } else {
            tail_from(2)
        }
    };
    (u0, u1)
}

/// The decomposition ⟨u0, u1⟩π of a normal form, computed from its indices alone.
pub fn symbolic_decompose(nf: &NormalForm) -> Result<Decomposition> {
    let mut core: &[u32] = nf.indices();
    let trailing_s = core.last() == Some(&1);
    if trailing_s {
        core = &core[..core.len() - 1];
    }
    if core.is_empty() {
        return Err(Error::Precondition(format!("{nf} has no decomposition of the form ⟨u0, u1⟩ζ")));
    }
    let (u0, u1) = core_decomposition(core);
    let coords = if nf.epsilon() == 1 { [u1, u0] } else { [u0, u1] };
    Ok(Decomposition {
        coords: coords.map(GeneratorWord::Indexed),
        letter_map: LetterMap::Constant(trailing_s as u8),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mealy::decompose;
    use crate::words::Evaluator;

    fn nf(eps: u8, idx: &[u32]) -> NormalForm {
        NormalForm::new(eps, idx.to_vec()).unwrap()
    }

    fn norm(text: &str) -> NormalForm {
        normalize(&GeneratorWord::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn applicable_rule_examples() {
        let found = applicable_rules(&[4, 3, 3, 4]);
        assert!(found.contains(&(1, RuleInstance::with_a(RuleId::N2, 3))) || found.iter().any(|(p, r)| *p == 2 && r.rule == RuleId::N2));
        assert!(found.contains(&(1, RuleInstance::with_a(RuleId::N3, 3))));
        assert!(applicable_rules(&[1, 3, 5]).is_empty());
        assert_eq!(applicable_rules(&[2]), vec![(0, RuleInstance::plain(RuleId::N5))]);
        assert!(applicable_rules(&[3, 2]).iter().all(|(_, r)| r.rule != RuleId::N5));
    }

    #[test]
    fn apply_rule_examples() {
        let n3 = RuleInstance::with_a(RuleId::N3, 3);
        assert_eq!(apply_rule(&[3, 3], 0, &n3).unwrap(), vec![1, 4]);
        assert_eq!(apply_rule(&[1, 1], 0, &RuleInstance::plain(RuleId::N1)).unwrap(), Vec::<u32>::new());
        let n8 = RuleInstance::valley(RuleId::N8, 3, 1, 2);
        assert_eq!(apply_rule(&[4, 3, 5], 0, &n8).unwrap(), vec![2, 5]);
        assert!(matches!(apply_rule(&[3, 4], 0, &n3), Err(Error::RuleNotApplicable { .. })));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(norm("ss"), NormalForm::identity());
        assert_eq!(norm("fff"), nf(1, &[3]));
        assert_eq!(norm("f4 f3 f3 f4"), nf(1, &[3, 5]));
        assert_eq!(norm("sf"), nf(0, &[3]));
        assert_eq!(norm("s"), nf(1, &[]));
        assert_eq!(norm("e"), NormalForm::identity());
        assert_eq!(norm("f"), nf(1, &[3]));
    }

    #[test]
    fn supplementary_rules_close_valleys() {
        assert_eq!(reduce(&[2, 1, 6], RuleSet::Base).unwrap(), vec![1, 3, 1, 6]);
        let nf = normalize_indices(&[2, 1, 6]).unwrap();
        assert!(is_normal_shape(nf.indices()));
    }

    #[test]
    fn nf_length_examples() {
        assert_eq!(nf_length(&nf(1, &[3])), BigUint::from(1u32));
        assert_eq!(nf_length(&nf(0, &[5])), BigUint::from(5u32));
        assert_eq!(nf_length(&NormalForm::identity()), BigUint::from(0u32));
        assert_eq!(nf_length(&nf(1, &[])), BigUint::from(1u32));
        assert_eq!(nf_length(&nf(1, &[4])), BigUint::from(4u32));
        assert_eq!(nf_length_u128(&nf(1, &[3, 5])), 6);
    }

    #[test]
    fn normal_shape_rejections() {
        assert!(NormalForm::new(0, vec![2]).is_err());
        assert!(NormalForm::new(0, vec![3, 4]).is_err());
        assert!(NormalForm::new(0, vec![5, 3, 3]).is_err());
        assert!(NormalForm::new(2, vec![]).is_err());
        assert!(NormalForm::new(0, vec![3, 5, 8, 7, 2, 1]).is_ok());
    }

    #[test]
    fn termination_measure_examples() {
        assert_eq!(termination_measure(&[3, 3]), TerminationMeasure { eta1: 4, eta2: 9 });
        assert_eq!(termination_measure(&[1, 5]), TerminationMeasure { eta1: 3, eta2: 7 });
        assert_eq!(termination_measure(&[]), TerminationMeasure { eta1: 0, eta2: 0 });
    }

    #[test]
    fn diagram_word_has_single_normal_form() {
        let mut ex = ReductionExplorer::new(RuleSet::Base);
        assert_eq!(ex.irreducibles(&[4, 3, 3, 4]), BTreeSet::from([vec![1, 3, 5]]));
    }

    #[test]
    fn diagram_edge_is_an_n9_instance() {
        let found = applicable_rules(&[4, 1, 4, 4]);
        assert!(found.contains(&(0, RuleInstance::valley(RuleId::N9, 1, 3, 3))));
        assert_eq!(RuleInstance::valley(RuleId::N9, 1, 3, 3).rhs(), vec![4]);
    }

    #[test]
    fn single_letters_are_confluent() {
        let report = confluence_probe(12, 1);
        assert!(report.divergences.is_empty() && report.non_normal.is_empty());
        assert_eq!(report.words_checked, 12);
    }

    #[test]
    fn small_confluence_probe() {
        let report = confluence_probe(6, 4);
        assert!(report.divergences.is_empty(), "{:?}", &report.divergences[..3.min(report.divergences.len())]);
        assert!(report.non_normal.is_empty(), "{:?}", &report.non_normal[..3.min(report.non_normal.len())]);
    }

    #[test]
    fn base_rules_leave_gaps() {
        let report = confluence_probe_with(6, 4, RuleSet::Base);
        assert!(!report.divergences.is_empty());
        assert!(report.non_normal.contains(&vec![1, 3, 1, 6]));
    }

    #[test]
    fn rules_are_sound_for_small_parameters() {
        let mut ev = Evaluator::new(12).unwrap();
        let mut checked = 0;
        for a in 1..=8u32 {
            for p in 1..=8u32 {
                for q in 2..=8u32 {
                    let x = [a + p, a, a + q];
                    for rule in matches_at(&x, 0, RuleSet::Complete) {
                        if x.iter().all(|&i| i <= 13) {
                            assert_eq!(ev.indexed_table(&rule.lhs()), ev.indexed_table(&rule.rhs()), "{rule}");
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 150);
    }

    #[test]
    fn symbolic_decompose_examples() {
        let show = |d: Decomposition| (d.coords[0].to_indexed(), d.coords[1].to_indexed(), d.letter_map);
        assert_eq!(show(symbolic_decompose(&nf(1, &[3, 8])).unwrap()), (vec![1, 7], vec![1, 3, 7], LetterMap::Constant(0)));
        assert_eq!(show(symbolic_decompose(&nf(0, &[3, 5, 7])).unwrap()), (vec![1, 7], vec![1, 4, 6], LetterMap::Constant(0)));
        assert_eq!(show(symbolic_decompose(&nf(0, &[3])).unwrap()), (vec![1, 3], vec![1], LetterMap::Constant(0)));
        assert!(symbolic_decompose(&NormalForm::identity()).is_err());
        assert!(symbolic_decompose(&nf(1, &[])).is_err());
    }

    #[test]
    fn symbolic_decompose_matches_direct_decomposition() {
        let mut ev = Evaluator::new(10).unwrap();
        let mut checked = 0;
        for pk in 3..=8u32 {
            for g in crate::growth::normal_forms_with_peak(pk) {
                let sym = symbolic_decompose(&g).unwrap();
                let direct = decompose(&g.to_generator_word().to_letters()).unwrap();
                assert_eq!(sym.letter_map, direct.letter_map, "{g}");
                for x in 0..2 {
                    assert_eq!(ev.table(&sym.coords[x]), ev.table(&direct.coords[x]), "{g} coordinate {x}");
                }
                let (_, peak, _) = g.split().unwrap();
                assert!(sym.coords[1 - g.epsilon() as usize].to_indexed().iter().all(|&i| i < peak), "{g}");
                checked += 1;
            }
        }
        assert!(checked > 1000);
    }
}

//! Generator words over {s, f} and over the Fibonacci letters f_i.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mealy::{check_level, MealyMachine, TransformationTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    S,
    F,
}

impl Letter {
    pub fn name(self) -> &'static str {
        match self {
            Letter::S => "s",
            Letter::F => "f",
        }
    }

    /// Index of the letter as a Fibonacci generator: s = f_1, f = f_2.
    pub fn index(self) -> u32 {
        match self {
            Letter::S => 1,
            Letter::F => 2,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GeneratorWord {
    Letters(Vec<Letter>),
    Indexed(Vec<u32>),
}

impl GeneratorWord {
    pub fn empty() -> Self {
        GeneratorWord::Indexed(Vec::new())
    }

    pub fn indexed(indices: impl Into<Vec<u32>>) -> Self {
        GeneratorWord::Indexed(indices.into())
    }

    pub fn letters(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                's' => Ok(Letter::S),
                'f' => Ok(Letter::F),
                _ => Err(Error::WordSyntax(text.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(GeneratorWord::Letters)
    }

    /// Parses `e`, a letters word such as `sff`, or indexed tokens such as `f1 f3 f5`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::WordSyntax(text.to_string());
        if text == "e" {
            return Ok(GeneratorWord::Letters(Vec::new()));
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let first = tokens.first().ok_or_else(bad)?;
        let is_indexed = |t: &str| t.len() > 1 && t.starts_with('f') && t[1..].bytes().all(|b| b.is_ascii_digit());
        if is_indexed(first) {
            tokens
                .iter()
                .map(|t| {
                    if !is_indexed(t) {
                        return Err(bad());
                    }
                    t[1..].parse::<u32>().ok().filter(|&i| i >= 1).ok_or_else(bad)
                })
                .collect::<Result<Vec<_>>>()
                .map(GeneratorWord::Indexed)
        } else if tokens.len() == 1 {
            Self::letters(first).map_err(|_| bad())
        } else {
            Err(bad())
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            GeneratorWord::Letters(v) => v.is_empty(),
            GeneratorWord::Indexed(v) => v.is_empty(),
        }
    }

    /// Expansion over {s, f}.
    pub fn to_letters(&self) -> Vec<Letter> {
        match self {
            GeneratorWord::Letters(v) => v.clone(),
            GeneratorWord::Indexed(v) => {
                let mut out = Vec::new();
                for &i in v {
                    out.extend(fib_letters(i));
                }
                out
            }
        }
    }

    /// Indexed form; letters become f_1 and f_2.
    pub fn to_indexed(&self) -> Vec<u32> {
        match self {
            GeneratorWord::Letters(v) => v.iter().map(|l| l.index()).collect(),
            GeneratorWord::Indexed(v) => v.clone(),
        }
    }

    /// Length over {s, f}.
    pub fn length(&self) -> BigUint {
        match self {
            GeneratorWord::Letters(v) => BigUint::from(v.len()),
            GeneratorWord::Indexed(v) => v.iter().map(|&i| fib(i)).sum(),
        }
    }

    pub fn concat(&self, other: &GeneratorWord) -> GeneratorWord {
        match (self, other) {
            (GeneratorWord::Letters(a), GeneratorWord::Letters(b)) => {
                GeneratorWord::Letters(a.iter().chain(b).copied().collect())
            }
            _ => GeneratorWord::Indexed(self.to_indexed().into_iter().chain(other.to_indexed()).collect()),
        }
    }

    pub fn letters_string(&self) -> String {
        let letters = self.to_letters();
        if letters.is_empty() {
            "e".to_string()
        } else {
            letters.iter().map(|l| l.name()).collect()
        }
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorWord::Letters(_) => f.write_str(&self.letters_string()),
            GeneratorWord::Indexed(v) => f.write_str(&format_indices(v)),
        }
    }
}

/// `f1 f3 f5`, or `e` for the empty word.
pub fn format_indices(indices: &[u32]) -> String {
    if indices.is_empty() {
        "e".to_string()
    } else {
        indices.iter().map(|i| format!("f{i}")).collect::<Vec<_>>().join(" ")
    }
}

/// Fibonacci number Φ_n with Φ_1 = Φ_2 = 1 (and Φ_0 = 0).
pub fn fib(n: u32) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    a
}

/// Φ_n as a machine integer; panics past n = 186.
pub fn fib_u128(n: u32) -> u128 {
    assert!(n <= 186, "Φ_{n} does not fit in 128 bits");
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..n {
        (a, b) = (b, a.wrapping_add(b));
    }
    a
}

fn fib_letters(n: u32) -> Vec<Letter> {
    assert!(n >= 1, "Fibonacci words start at index 1");
    if n == 1 {
        return vec![Letter::S];
    }
    let (mut prev, mut cur) = (vec![Letter::S], vec![Letter::F]);
    for _ in 2..n {
        let next: Vec<Letter> = prev.iter().chain(&cur).copied().collect();
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn require(cond: bool, message: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(message()))
    }
}

/// f_n over {s, f}.
pub fn fib_word(n: u32) -> Result<GeneratorWord> {
    require(n >= 1, || "fib_word needs n ≥ 1".into())?;
    Ok(GeneratorWord::Letters(fib_letters(n)))
}

/// Indices a, a+2, …, up to and including b when of matching parity; empty when a > b.
pub fn step2(a: u32, b: u32) -> Vec<u32> {
    (a..=b).step_by(2).collect()
}

/// The relator pair (r_n, r'_n).
pub fn relation_words(n: u32) -> Result<(GeneratorWord, GeneratorWord)> {
    require(n >= 1, || "relation_words needs n ≥ 1".into())?;
    if n == 1 {
        return Ok((GeneratorWord::indexed([1, 1]), GeneratorWord::empty()));
    }
    let r = vec![n + 1, n, n];
    let mut rp = vec![n % 2 + 1];
    rp.extend(step2(n % 2 + 5, n + 1));
    rp.push(n);
    Ok((GeneratorWord::Indexed(r), GeneratorWord::Indexed(rp)))
}

/// z_n = f_3 f_5 ⋯ f_{n+2} for odd n, f_4 f_6 ⋯ f_{n+2} for even n.
pub fn z_word(n: u32) -> Result<GeneratorWord> {
    require(n >= 1, || "z_word needs n ≥ 1".into())?;
    Ok(GeneratorWord::Indexed(step2(3 + (n + 1) % 2, n + 2)))
}

/// f_n with its first two letters deleted.
pub fn e_word(n: u32) -> Result<GeneratorWord> {
    require(n >= 3, || "e_word needs n ≥ 3".into())?;
    Ok(GeneratorWord::Letters(fib_letters(n)[2..].to_vec()))
}

/// Checks f_n = f_k f_{k+1} f_{k+3} ⋯ f_{n−1} and f_{k+1}² = f_{k−1} f_{k+2} letter for letter.
pub fn lemma_prefix_identity(k: u32, n: u32) -> Result<bool> {
    require(k >= 1 && k + 2 <= n && k % 2 == n % 2, || {
        format!("lemma_prefix_identity needs k ≤ n−2 with k ≡ n mod 2, got k={k}, n={n}")
    })?;
    let mut rhs = vec![k];
    rhs.extend(step2(k + 1, n - 1));
    let prefix_ok = fib_letters(n) == GeneratorWord::Indexed(rhs).to_letters();
    let square_ok = k < 2 || {
        let lhs = GeneratorWord::indexed([k + 1, k + 1]).to_letters();
        lhs == GeneratorWord::indexed([k - 1, k + 2]).to_letters()
    };
    Ok(prefix_ok && square_ok)
}

/// Level tables of the Fibonacci generators, built on demand by f_n = f_{n−2} f_{n−1}.
#[derive(Debug, Clone)]
pub struct Evaluator {
    level: u32,
    fibs: Vec<TransformationTable>,
}

impl Evaluator {
    pub fn new(level: u32) -> Result<Self> {
        check_level(level)?;
        let machine = MealyMachine::automaton_i();
        let tables = machine.state_tables(level)?;
        let pick = |name| tables[machine.state(name).expect("generator present").0].clone();
        Ok(Evaluator { level, fibs: vec![pick("s"), pick("f")] })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn identity(&self) -> TransformationTable {
        TransformationTable::identity(2, self.level)
    }

    pub fn fib_table(&mut self, i: u32) -> &TransformationTable {
        assert!(i >= 1, "Fibonacci generators start at index 1");
        while self.fibs.len() < i as usize {
            let n = self.fibs.len();
            let next = self.fibs[n - 2].then(&self.fibs[n - 1]);
            self.fibs.push(next);
        }
        &self.fibs[i as usize - 1]
    }

    pub fn letter_table(&mut self, l: Letter) -> &TransformationTable {
        self.fib_table(l.index())
    }

    pub fn indexed_table(&mut self, indices: &[u32]) -> TransformationTable {
        let mut acc = self.identity();
        for &i in indices {
            acc = acc.then(self.fib_table(i));
        }
        acc
    }

    pub fn letters_table(&mut self, letters: &[Letter]) -> TransformationTable {
        let mut acc = self.identity();
        for &l in letters {
            acc = acc.then(self.letter_table(l));
        }
        acc
    }

    pub fn table(&mut self, word: &GeneratorWord) -> TransformationTable {
        match word {
            GeneratorWord::Letters(v) => self.letters_table(v),
            GeneratorWord::Indexed(v) => self.indexed_table(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn letters(w: &GeneratorWord) -> String {
        w.letters_string()
    }

    #[test]
    fn fib_word_examples() {
        assert_eq!(letters(&fib_word(3).unwrap()), "sf");
        assert_eq!(letters(&fib_word(4).unwrap()), "fsf");
        assert_eq!(letters(&fib_word(5).unwrap()), "sffsf");
        assert!(fib_word(0).is_err());
    }

    #[test]
    fn fib_word_lengths_are_fibonacci() {
        let mut prev = (0u64, 1u64);
        for n in 1..=30 {
            assert_eq!(fib_word(n).unwrap().length(), BigUint::from(prev.1));
            prev = (prev.1, prev.0 + prev.1);
        }
    }

    #[test]
    fn fib_matches_machine_integers() {
        for n in 0..=186 {
            assert_eq!(fib(n), BigUint::from(fib_u128(n)));
        }
        assert_eq!(fib(100).to_string(), "354224848179261915075");
    }

    #[test]
    fn fib_word_prefixes() {
        for n in 3..=16 {
            let full = fib_letters(n);
            for k in (1..=n - 2).filter(|k| k % 2 == n % 2) {
                assert!(full.starts_with(&fib_letters(k)), "f_{k} prefix of f_{n}");
            }
        }
    }

    #[test]
    fn relation_word_examples() {
        let (r, rp) = relation_words(2).unwrap();
        assert_eq!(letters(&r), "sfff");
        assert_eq!(letters(&rp), "sf");
        let (r, rp) = relation_words(3).unwrap();
        assert_eq!(r, GeneratorWord::indexed([4, 3, 3]));
        assert_eq!(rp.to_letters(), fib_letters(4));
        let (r, rp) = relation_words(1).unwrap();
        assert_eq!(letters(&r), "ss");
        assert!(rp.is_empty());
    }

    #[test]
    fn relation_word_lengths() {
        for n in 3..=20 {
            let (r, rp) = relation_words(n).unwrap();
            let drop = if n % 2 == 1 { 4u32 } else { 2 };
            assert_eq!(rp.length() + BigUint::from(drop), r.length(), "n = {n}");
        }
    }

    #[test]
    fn graphical_relation_identities() {
        for n in 4..=16 {
            let (r, rp) = relation_words(n).unwrap();
            let r = letters(&r);
            let rp = letters(&rp);
            if n % 2 == 1 {
                assert_eq!(r, format!("fsfs{rp}"), "n = {n}");
            } else {
                assert!(rp.starts_with('s'));
                assert_eq!(r, format!("sff{}", &rp[1..]), "n = {n}");
            }
        }
    }

    #[test]
    fn relations_act_identically() {
        let mut ev = Evaluator::new(12).unwrap();
        for n in 1..=10 {
            let (r, rp) = relation_words(n).unwrap();
            assert_eq!(ev.table(&r), ev.table(&rp), "r_{n}");
        }
    }

    #[test]
    fn z_and_e_words() {
        assert_eq!(z_word(1).unwrap(), GeneratorWord::indexed([3]));
        assert_eq!(z_word(2).unwrap(), GeneratorWord::indexed([4]));
        assert_eq!(z_word(5).unwrap(), GeneratorWord::indexed([3, 5, 7]));
        assert_eq!(z_word(6).unwrap(), GeneratorWord::indexed([4, 6, 8]));
        assert_eq!(letters(&e_word(4).unwrap()), "f");
        assert_eq!(letters(&e_word(5).unwrap()), "fsf");
        assert!(e_word(2).is_err());
        assert!(z_word(0).is_err());
    }

    #[test]
    fn z_words_are_left_zeros() {
        for n in 1..=10 {
            let mut ev = Evaluator::new(n).unwrap();
            let t = ev.table(&z_word(n).unwrap());
            assert!(t.entries().iter().all(|&v| v == 0), "z_{n}");
        }
    }

    #[test]
    fn prefix_identity_examples() {
        assert!(lemma_prefix_identity(3, 5).unwrap());
        assert!(lemma_prefix_identity(2, 6).unwrap());
        assert!(lemma_prefix_identity(1, 3).unwrap());
        assert!(lemma_prefix_identity(3, 6).is_err());
        for n in 3..=18 {
            for k in (1..=n - 2).filter(|k| k % 2 == n % 2) {
                assert!(lemma_prefix_identity(k, n).unwrap(), "k={k}, n={n}");
            }
        }
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!(GeneratorWord::parse("e").unwrap(), GeneratorWord::Letters(vec![]));
        assert_eq!(GeneratorWord::parse("fsf").unwrap().to_string(), "fsf");
        let w = GeneratorWord::parse(" f1 f3  f5 ").unwrap();
        assert_eq!(w, GeneratorWord::indexed([1, 3, 5]));
        assert_eq!(w.to_string(), "f1 f3 f5");
        assert_eq!(GeneratorWord::empty().to_string(), "e");
        for bad in ["", "x", "f0", "f1 s", "sf fs", "f1 f", "fx"] {
            assert!(GeneratorWord::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn evaluator_matches_machine() {
        let m = MealyMachine::automaton_i();
        let mut ev = Evaluator::new(8).unwrap();
        for n in 1..=9 {
            let w = fib_word(n).unwrap();
            let ids = m.parse_state_word(&letters(&w)).unwrap();
            assert_eq!(ev.fib_table(n), &m.transformation_table(&ids, 8).unwrap());
        }
    }

    proptest! {
        #[test]
        fn letters_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..40)) {
            let v: Vec<Letter> = bits.iter().map(|&b| if b { Letter::F } else { Letter::S }).collect();
            let w = GeneratorWord::Letters(v.clone());
            let back = GeneratorWord::Indexed(w.to_indexed());
            prop_assert_eq!(back.to_letters(), v);
        }

        #[test]
        fn indexed_length_is_fibonacci_sum(idx in proptest::collection::vec(1u32..20, 0..8)) {
            let w = GeneratorWord::Indexed(idx.clone());
            prop_assert_eq!(BigUint::from(w.to_letters().len()), w.length());
            let text = w.to_string();
            prop_assert_eq!(GeneratorWord::parse(&text).unwrap().to_indexed(), idx);
        }
    }
}

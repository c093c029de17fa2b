//! Mealy machines, their action on words, and dense level tables.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::verify::{Failure, VerificationReport};
use crate::words::{Evaluator, GeneratorWord, Letter};

pub const DEFAULT_LEVEL_CAP: u32 = 16;
pub const LEVEL_CAP_VAR: &str = "FIBGROWTH_LEVEL_CAP";

const AUTOMATON_I: &str = include_str!("automaton_i.txt");

/// The table-level cap, read once from `FIBGROWTH_LEVEL_CAP`.
pub fn level_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(LEVEL_CAP_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_LEVEL_CAP)
    })
}

pub fn check_level(level: u32) -> Result<()> {
    let cap = level_cap();
    if level > cap {
        Err(Error::LevelAboveCap { level, cap })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: StateId,
    pub input: usize,
    pub to: StateId,
    pub output: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyMachine {
    alphabet_size: usize,
    states: Vec<String>,
    transition: Vec<StateId>,
    output: Vec<usize>,
    identity: Vec<bool>,
}

impl MealyMachine {
    pub fn new(alphabet_size: usize, states: Vec<String>, edges: &[Edge]) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::Precondition("alphabet size must be at least 2".into()));
        }
        let mut seen = HashSet::new();
        for name in &states {
            if !seen.insert(name.as_str()) {
                return Err(Error::Precondition(format!("state `{name}` declared twice")));
            }
        }
        let slots = states.len() * alphabet_size;
        let mut transition = vec![None; slots];
        let mut output = vec![0; slots];
        for edge in edges {
            for letter in [edge.input, edge.output] {
                if letter >= alphabet_size {
                    return Err(Error::LetterOutOfRange { letter, alphabet: alphabet_size });
                }
            }
            for state in [edge.from, edge.to] {
                if state.0 >= states.len() {
                    return Err(Error::UnknownState(format!("#{}", state.0)));
                }
            }
            let slot = edge.from.0 * alphabet_size + edge.input;
            if transition[slot].is_some() {
                return Err(Error::Precondition(format!(
                    "two edges leave `{}` on letter {}",
                    states[edge.from.0], edge.input
                )));
            }
            transition[slot] = Some(edge.to);
            output[slot] = edge.output;
        }
        let transition = transition
            .into_iter()
            .enumerate()
            .map(|(slot, t)| {
                t.ok_or_else(|| {
                    Error::Precondition(format!(
                        "no edge leaves `{}` on letter {}",
                        states[slot / alphabet_size],
                        slot % alphabet_size
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut machine = MealyMachine {
            alphabet_size,
            states,
            transition,
            output,
            identity: Vec::new(),
        };
        machine.identity = machine.compute_identity_states();
        Ok(machine)
    }

    /// The automaton I generating the semigroup F.
    pub fn automaton_i() -> Self {
        Self::parse(AUTOMATON_I).expect("bundled definition is valid")
    }

    pub fn bundled_definition() -> &'static str {
        AUTOMATON_I
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabet = None;
        let mut states: Option<Vec<String>> = None;
        let mut edges = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let err = |message: String| Error::MachineDefinition { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "alphabet" => {
                    if alphabet.is_some() || toks.len() != 2 {
                        return Err(err("expected a single `alphabet <k>` line".into()));
                    }
                    let k: usize = toks[1]
                        .parse()
                        .map_err(|_| err(format!("bad alphabet size `{}`", toks[1])))?;
                    alphabet = Some(k);
                }
                "states" => {
                    if states.is_some() || toks.len() < 2 {
                        return Err(err("expected a single non-empty `states` line".into()));
                    }
                    states = Some(toks[1..].iter().map(|s| s.to_string()).collect());
                }
                "edge" => {
                    let (Some(k), Some(names)) = (alphabet, states.as_ref()) else {
                        return Err(err("`edge` before `alphabet` and `states`".into()));
                    };
                    if toks.len() != 6 || toks[3] != "->" {
                        return Err(err("expected `edge <state> <in> -> <state> <out>`".into()));
                    }
                    let state = |name: &str| {
                        names
                            .iter()
                            .position(|n| n == name)
                            .map(StateId)
                            .ok_or_else(|| err(format!("unknown state `{name}`")))
                    };
                    let letter = |tok: &str| {
                        tok.parse::<usize>()
                            .ok()
                            .filter(|&l| l < k)
                            .ok_or_else(|| err(format!("bad letter `{tok}`")))
                    };
                    edges.push(Edge {
                        from: state(toks[1])?,
                        input: letter(toks[2])?,
                        to: state(toks[4])?,
                        output: letter(toks[5])?,
                    });
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let end = |message: &str| Error::MachineDefinition { line: last_line, message: message.into() };
        let alphabet = alphabet.ok_or_else(|| end("missing `alphabet` line"))?;
        let states = states.ok_or_else(|| end("missing `states` line"))?;
        Self::new(alphabet, states, &edges).map_err(|e| match e {
            Error::Precondition(message) => Error::MachineDefinition { line: last_line, message },
            other => other,
        })
    }

    /// Renders the machine in the same text format accepted by [`MealyMachine::parse`].
    pub fn to_definition(&self) -> String {
        let mut out = format!("alphabet {}\nstates {}\n", self.alphabet_size, self.states.join(" "));
        for e in self.edges() {
            out.push_str(&format!(
                "edge {} {} -> {} {}\n",
                self.states[e.from.0], e.input, self.states[e.to.0], e.output
            ));
        }
        out
    }

    pub fn edges(&self) -> Vec<Edge> {
        let d = self.alphabet_size;
        (0..self.states.len() * d)
            .map(|slot| Edge {
                from: StateId(slot / d),
                input: slot % d,
                to: self.transition[slot],
                output: self.output[slot],
            })
            .collect()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|n| n == name)
            .map(StateId)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.0]
    }

    /// Parses a word of state names: whitespace-separated, or one character per state
    /// when every state name is a single character.
    pub fn parse_state_word(&self, text: &str) -> Result<Vec<StateId>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        let single_chars = self.states.iter().all(|s| s.chars().count() == 1);
        if single_chars && !text.contains(char::is_whitespace) {
            text.chars().map(|c| self.state(&c.to_string())).collect()
        } else {
            text.split_whitespace().map(|t| self.state(t)).collect()
        }
    }

    pub fn step(&self, state: StateId, letter: usize) -> (StateId, usize) {
        let slot = state.0 * self.alphabet_size + letter;
        (self.transition[slot], self.output[slot])
    }

    pub fn is_identity_state(&self, state: StateId) -> bool {
        self.identity[state.0]
    }

    pub fn identity_states(&self) -> Vec<StateId> {
        (0..self.states.len()).map(StateId).filter(|&q| self.identity[q.0]).collect()
    }

    fn compute_identity_states(&self) -> Vec<bool> {
        let mut ident = vec![true; self.states.len()];
        loop {
            let mut changed = false;
            for q in 0..self.states.len() {
                if !ident[q] {
                    continue;
                }
                let trivial = (0..self.alphabet_size).all(|x| {
                    let (next, out) = self.step(StateId(q), x);
                    out == x && ident[next.0]
                });
                if !trivial {
                    ident[q] = false;
                    changed = true;
                }
            }
            if !changed {
                return ident;
            }
        }
    }

    fn check_input(&self, input: &[usize]) -> Result<()> {
        match input.iter().find(|&&x| x >= self.alphabet_size) {
            Some(&letter) => Err(Error::LetterOutOfRange { letter, alphabet: self.alphabet_size }),
            None => Ok(()),
        }
    }

    fn check_word(&self, word: &[StateId]) -> Result<()> {
        match word.iter().find(|q| q.0 >= self.states.len()) {
            Some(q) => Err(Error::UnknownState(format!("#{}", q.0))),
            None => Ok(()),
        }
    }

    /// Acts on `input` by the states of `word`, leftmost state first.
    pub fn act(&self, word: &[StateId], input: &[usize]) -> Result<Vec<usize>> {
        self.check_word(word)?;
        self.check_input(input)?;
        let mut current = input.to_vec();
        for &q in word {
            let mut state = q;
            for letter in current.iter_mut() {
                let (next, out) = self.step(state, *letter);
                *letter = out;
                state = next;
            }
        }
        Ok(current)
    }

    /// Level-`level` tables of every single state, indexed by state id.
    pub fn state_tables(&self, level: u32) -> Result<Vec<TransformationTable>> {
        check_level(level)?;
        let d = self.alphabet_size as u32;
        let n = self.states.len();
        let mut tables: Vec<Vec<u32>> = vec![vec![0]; n];
        let mut block = 1u32;
        for _ in 0..level {
            let next: Vec<Vec<u32>> = (0..n)
                .map(|q| {
                    let mut entries = Vec::with_capacity((block * d) as usize);
                    for x in 0..d as usize {
                        let (to, out) = self.step(StateId(q), x);
                        let base = out as u32 * block;
                        entries.extend(tables[to.0].iter().map(|&v| base + v));
                    }
                    entries
                })
                .collect();
            tables = next;
            block *= d;
        }
        Ok(tables
            .into_iter()
            .map(|entries| TransformationTable { arity: d, level, entries })
            .collect())
    }

    pub fn transformation_table(&self, word: &[StateId], level: u32) -> Result<TransformationTable> {
        self.check_word(word)?;
        let tables = self.state_tables(level)?;
        let mut acc = TransformationTable::identity(self.alphabet_size as u32, level);
        for q in word {
            if !self.identity[q.0] {
                acc = acc.then(&tables[q.0]);
            }
        }
        Ok(acc)
    }

    /// Smallest level at which the two words act differently, if any up to `max_level`.
    pub fn separating_level(
        &self,
        w1: &[StateId],
        w2: &[StateId],
        max_level: u32,
    ) -> Result<Option<u32>> {
        check_level(max_level)?;
        let top1 = self.transformation_table(w1, max_level)?;
        let top2 = self.transformation_table(w2, max_level)?;
        Ok((0..=max_level).find(|&n| top1.restrict(n) != top2.restrict(n)))
    }

    /// Sections of `word` at each first letter, plus the induced map on first letters.
    /// Identity states are dropped from the sections.
    pub fn wreath(&self, word: &[StateId]) -> Result<Wreath> {
        self.check_word(word)?;
        let mut sections = Vec::with_capacity(self.alphabet_size);
        let mut letter_map = Vec::with_capacity(self.alphabet_size);
        for x in 0..self.alphabet_size {
            let mut letter = x;
            let mut section = Vec::new();
            for &q in word {
                let (next, out) = self.step(q, letter);
                if !self.identity[next.0] {
                    section.push(next);
                }
                letter = out;
            }
            sections.push(section);
            letter_map.push(letter);
        }
        Ok(Wreath { sections, letter_map })
    }
}

impl fmt::Display for MealyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_definition())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wreath {
    pub sections: Vec<Vec<StateId>>,
    pub letter_map: Vec<usize>,
}

/// The map induced on first letters by an element of F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LetterMap {
    Identity,
    /// σ, exchanging 0 and 1.
    Swap,
    /// Constant map; `Constant(0)` is ζ.
    Constant(u8),
}

impl LetterMap {
    pub fn apply(self, x: u8) -> u8 {
        match self {
            LetterMap::Identity => x,
            LetterMap::Swap => 1 - x,
            LetterMap::Constant(c) => c,
        }
    }

    pub fn then(self, other: LetterMap) -> LetterMap {
        Self::from_images([other.apply(self.apply(0)), other.apply(self.apply(1))])
    }

    pub fn from_images(images: [u8; 2]) -> LetterMap {
        match images {
            [0, 1] => LetterMap::Identity,
            [1, 0] => LetterMap::Swap,
            [c, _] => LetterMap::Constant(c),
        }
    }
}

impl fmt::Display for LetterMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LetterMap::Identity => f.write_str("id"),
            LetterMap::Swap => f.write_str("σ"),
            LetterMap::Constant(0) => f.write_str("ζ"),
            LetterMap::Constant(c) => write!(f, "const{c}"),
        }
    }
}

/// The wreath decomposition ⟨g_0, g_1⟩π of an element of F.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub coords: [GeneratorWord; 2],
    pub letter_map: LetterMap,
}

impl Decomposition {
    /// Rebuilds the level-`level` table from the coordinates and the letter map.
    pub fn reconstruct_table(&self, level: u32) -> Result<TransformationTable> {
        if level == 0 {
            return Ok(TransformationTable::identity(2, 0));
        }
        let mut lower = Evaluator::new(level - 1)?;
        let half = 1u32 << (level - 1);
        let mut entries = Vec::with_capacity(2 * half as usize);
        for x in 0..2u8 {
            let section = lower.table(&self.coords[x as usize]);
            let base = self.letter_map.apply(x) as u32 * half;
            entries.extend(section.entries().iter().map(|&v| base + v));
        }
        TransformationTable::from_entries(2, level, entries)
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩{}", self.coords[0], self.coords[1], self.letter_map)
    }
}

/// Decomposes a nonempty word over {s, f}: φ(s) = ⟨e, e⟩σ, φ(f) = ⟨s, f⟩ζ.
pub fn decompose(word: &[Letter]) -> Result<Decomposition> {
    if word.is_empty() {
        return Err(Error::Precondition("decompose needs a nonempty word".into()));
    }
    let mut coords: [Vec<Letter>; 2] = [Vec::new(), Vec::new()];
    let mut map = LetterMap::Identity;
    for &l in word {
        let (sections, rho) = match l {
            Letter::S => ([None, None], LetterMap::Swap),
            Letter::F => ([Some(Letter::S), Some(Letter::F)], LetterMap::Constant(0)),
        };
        for (x, coord) in coords.iter_mut().enumerate() {
            if let Some(section) = sections[map.apply(x as u8) as usize] {
                coord.push(section);
            }
        }
        map = map.then(rho);
    }
    let [c0, c1] = coords;
    Ok(Decomposition {
        coords: [GeneratorWord::Letters(c0), GeneratorWord::Letters(c1)],
        letter_map: map,
    })
}

/// The transformation of `X^level` induced by an element, indexed big-endian.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransformationTable {
    arity: u32,
    level: u32,
    entries: Vec<u32>,
}

impl fmt::Debug for TransformationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Table(level {}, {:?})", self.level, self.entries)
    }
}

impl TransformationTable {
    pub fn identity(arity: u32, level: u32) -> Self {
        let size = (arity as usize).pow(level);
        TransformationTable { arity, level, entries: (0..size as u32).collect() }
    }

    pub fn from_entries(arity: u32, level: u32, entries: Vec<u32>) -> Result<Self> {
        let size = (arity as usize).pow(level);
        if entries.len() != size || entries.iter().any(|&v| v as usize >= size) {
            return Err(Error::Precondition(format!(
                "a level-{level} table needs {size} entries below {size}"
            )));
        }
        Ok(TransformationTable { arity, level, entries })
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.entries
    }

    /// Apply `self`, then `other`.
    pub fn compose(&self, other: &TransformationTable) -> Result<TransformationTable> {
        if self.level != other.level || self.arity != other.arity {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        Ok(self.then(other))
    }

    pub(crate) fn then(&self, other: &TransformationTable) -> TransformationTable {
        debug_assert_eq!(self.entries.len(), other.entries.len());
        TransformationTable {
            arity: self.arity,
            level: self.level,
            entries: self.entries.iter().map(|&v| other.entries[v as usize]).collect(),
        }
    }

    pub fn power(&self, k: u32) -> TransformationTable {
        let mut acc = TransformationTable::identity(self.arity, self.level);
        for _ in 0..k {
            acc = acc.then(self);
        }
        acc
    }

    pub fn image_size(&self) -> usize {
        let mut hit = vec![false; self.entries.len()];
        let mut count = 0;
        for &v in &self.entries {
            if !std::mem::replace(&mut hit[v as usize], true) {
                count += 1;
            }
        }
        count
    }

    /// Image size of the induced action on the first `level` letters.
    pub fn image_size_at(&self, level: u32) -> usize {
        self.restrict(level).image_size()
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|&v| v == self.entries[0])
    }

    /// The induced table on `X^level` for `level ≤ self.level`.
    pub fn restrict(&self, level: u32) -> TransformationTable {
        assert!(level <= self.level, "cannot restrict to a higher level");
        let shift = self.arity.pow(self.level - level);
        let size = self.arity.pow(level);
        TransformationTable {
            arity: self.arity,
            level,
            entries: (0..size).map(|v| self.entries[(v * shift) as usize] / shift).collect(),
        }
    }

    /// True when every prefix of the image depends only on the same-length prefix of the input.
    pub fn is_prefix_preserving(&self) -> bool {
        (0..self.level).all(|k| {
            let shift = self.arity.pow(self.level - k);
            self.entries
                .iter()
                .enumerate()
                .all(|(u, &v)| v / shift == self.entries[(u as u32 / shift * shift) as usize] / shift)
        })
    }
}

/// The action of a generator on ℤ conjugate to its action on infinite binary words.
pub fn int_action(letter: Letter, x: &BigInt) -> BigInt {
    match letter {
        Letter::S => {
            if x.bit(0) {
                x - 1
            } else {
                x + 1
            }
        }
        Letter::F => {
            if x.is_zero() {
                return -BigInt::one();
            }
            let n = x.trailing_zeros().expect("nonzero");
            let pow = BigInt::one() << n;
            let odd_part = (x >> n) as BigInt;
            let residue = ((odd_part % 4) + 4) % 4;
            if residue == BigInt::from(3) {
                x - pow - 1
            } else {
                x + 3 * pow - 1
            }
        }
    }
}

/// Θ(x_1…x_n) = Σ (1 − x_i)·2^{i−1}.
pub fn theta(bits: &[usize]) -> Result<u64> {
    if bits.is_empty() || bits.len() > 64 {
        return Err(Error::Precondition("theta needs between 1 and 64 letters".into()));
    }
    if let Some(&letter) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::LetterOutOfRange { letter, alphabet: 2 });
    }
    Ok(bits
        .iter()
        .enumerate()
        .map(|(i, &b)| ((1 - b) as u64) << i)
        .sum())
}

fn bits_of(index: u32, level: u32) -> Vec<usize> {
    (0..level).rev().map(|k| ((index >> k) & 1) as usize).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

/// Compares the action of I on `X^level` with the integer action through Θ.
pub fn check_theta_conjugacy(level: u32, mode: ThetaMode) -> Result<VerificationReport> {
    if level == 0 {
        return Err(Error::Precondition("theta conjugacy needs level ≥ 1".into()));
    }
    let machine = MealyMachine::automaton_i();
    let tables = machine.state_tables(level)?;
    let size = 1u32 << level;
    let modulus = BigInt::one() << level;
    let inputs: Vec<u32> = match mode {
        ThetaMode::Exhaustive => (0..size).collect(),
        ThetaMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<u32> = (0..count).map(|_| rng.gen_range(0..size)).collect();
            v.push(size - 1);
            v
        }
    };
    let mut report = VerificationReport::new("theta");
    report.parameter("level", level);
    report.parameter("mode", match mode {
        ThetaMode::Exhaustive => "exhaustive".to_string(),
        ThetaMode::Sample { count, seed } => format!("sample {count} seed {seed}"),
    });
    for &u in &inputs {
        for letter in [Letter::S, Letter::F] {
            let state = machine.state(letter.name()).expect("automaton I has s and f");
            let image = tables[state.0].entries()[u as usize];
            let via_tree = theta(&bits_of(image, level))?;
            let x = BigInt::from(theta(&bits_of(u, level))?);
            let via_int = ((int_action(letter, &x) % &modulus) + &modulus) % &modulus;
            report.cases += 1;
            if BigInt::from(via_tree) != via_int {
                report.failures.push(Failure {
                    description: format!("Θ(x^{letter}) = {via_tree} but Θ(x)^{letter} ≡ {via_int}"),
                    witness: bits_of(u, level).iter().map(|b| b.to_string()).collect(),
                    level,
                });
            }
        }
    }
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(m: &MealyMachine, w: &str) -> Vec<StateId> {
        m.parse_state_word(w).unwrap()
    }

    fn table(w: &str, level: u32) -> TransformationTable {
        let m = MealyMachine::automaton_i();
        m.transformation_table(&word(&m, w), level).unwrap()
    }

    fn bits(s: &str) -> Vec<usize> {
        s.chars().map(|c| c.to_digit(2).unwrap() as usize).collect()
    }

    #[test]
    fn act_examples() {
        let m = MealyMachine::automaton_i();
        assert_eq!(m.act(&word(&m, "e"), &bits("0110")).unwrap(), bits("0110"));
        assert_eq!(m.act(&word(&m, "s"), &bits("01")).unwrap(), bits("11"));
        assert_eq!(m.act(&word(&m, "f"), &bits("10")).unwrap(), bits("00"));
        assert_eq!(m.act(&[], &bits("101")).unwrap(), bits("101"));
    }

    #[test]
    fn act_errors() {
        let m = MealyMachine::automaton_i();
        assert!(matches!(m.parse_state_word("x"), Err(Error::UnknownState(_))));
        assert!(matches!(
            m.act(&word(&m, "s"), &[2]),
            Err(Error::LetterOutOfRange { letter: 2, alphabet: 2 })
        ));
    }

    #[test]
    fn identity_state_detection() {
        let m = MealyMachine::automaton_i();
        assert_eq!(m.identity_states(), vec![m.state("e").unwrap()]);
    }

    #[test]
    fn table_examples() {
        assert_eq!(table("e", 2), TransformationTable::identity(2, 2));
        assert_eq!(table("s", 1).entries(), &[1, 0]);
        assert_eq!(table("f", 1).entries(), &[0, 0]);
    }

    #[test]
    fn compose_examples() {
        let s = table("s", 1);
        assert_eq!(s.compose(&s).unwrap(), TransformationTable::identity(2, 1));
        let f = table("f", 2);
        let fff = f.compose(&f).unwrap().compose(&f).unwrap();
        assert_eq!(fff, f);
        assert_eq!(TransformationTable::identity(2, 2).compose(&f).unwrap(), f);
        assert!(matches!(s.compose(&f), Err(Error::LevelMismatch(1, 2))));
    }

    #[test]
    fn level_cap_enforced() {
        let m = MealyMachine::automaton_i();
        let cap = level_cap();
        assert!(matches!(
            m.transformation_table(&word(&m, "f"), cap + 1),
            Err(Error::LevelAboveCap { .. })
        ));
    }

    #[test]
    fn separating_level_examples() {
        let m = MealyMachine::automaton_i();
        assert_eq!(m.separating_level(&word(&m, "s"), &word(&m, "s"), 8).unwrap(), None);
        assert_eq!(m.separating_level(&word(&m, "ss"), &[], 8).unwrap(), None);
        let lvl = m.separating_level(&word(&m, "sf"), &word(&m, "fs"), 8).unwrap();
        assert!(matches!(lvl, Some(l) if l <= 2));
    }

    #[test]
    fn image_size_examples() {
        assert_eq!(TransformationTable::identity(2, 3).image_size(), 8);
        assert_eq!(table("f", 1).image_size(), 1);
        assert_eq!(table("sf", 2).image_size(), 2);
    }

    #[test]
    fn int_action_examples() {
        let f = |x: i64| int_action(Letter::F, &BigInt::from(x));
        let s = |x: i64| int_action(Letter::S, &BigInt::from(x));
        assert_eq!(f(0), BigInt::from(-1));
        assert_eq!(s(4), BigInt::from(5));
        assert_eq!(s(3), BigInt::from(2));
        assert_eq!(f(3), BigInt::from(1));
        assert_eq!(f(1), BigInt::from(3));
        assert_eq!(f(-1), BigInt::from(-3));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&bits("1")).unwrap(), 0);
        assert_eq!(theta(&bits("00")).unwrap(), 3);
        assert_eq!(theta(&bits("01")).unwrap(), 1);
    }

    #[test]
    fn theta_all_ones_edge_case() {
        let m = MealyMachine::automaton_i();
        let ones = bits("11111");
        let image = m.act(&word(&m, "f"), &ones).unwrap();
        assert_eq!(image, bits("00000"));
        assert_eq!(theta(&ones).unwrap(), 0);
        assert_eq!(theta(&image).unwrap(), 31);
        assert_eq!(int_action(Letter::F, &BigInt::zero()), BigInt::from(-1));
    }

    #[test]
    fn theta_conjugacy_small_levels() {
        for n in 1..=8 {
            let report = check_theta_conjugacy(n, ThetaMode::Exhaustive).unwrap();
            assert!(report.failures.is_empty(), "level {n}: {:?}", report.failures);
            assert_eq!(report.cases, 2 << n);
        }
    }

    #[test]
    fn wreath_of_generators() {
        let m = MealyMachine::automaton_i();
        let f = m.wreath(&word(&m, "f")).unwrap();
        assert_eq!(f.sections, vec![word(&m, "s"), word(&m, "f")]);
        assert_eq!(f.letter_map, vec![0, 0]);
        let s = m.wreath(&word(&m, "s")).unwrap();
        assert_eq!(s.sections, vec![vec![], vec![]]);
        assert_eq!(s.letter_map, vec![1, 0]);
    }

    #[test]
    fn definition_round_trip() {
        let m = MealyMachine::automaton_i();
        let again = MealyMachine::parse(&m.to_definition()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn definition_errors_carry_line_numbers() {
        let bad = "alphabet 2\nstates a\nedge a 0 -> b 0\n";
        assert!(matches!(MealyMachine::parse(bad), Err(Error::MachineDefinition { line: 3, .. })));
        let partial = "alphabet 2\nstates a\nedge a 0 -> a 0\n";
        assert!(matches!(MealyMachine::parse(partial), Err(Error::MachineDefinition { .. })));
    }

    #[test]
    fn generic_alphabet_tables() {
        let text = "alphabet 3\nstates r\nedge r 0 -> r 1\nedge r 1 -> r 2\nedge r 2 -> r 0\n";
        let m = MealyMachine::parse(text).unwrap();
        let t = m.transformation_table(&word(&m, "r"), 2).unwrap();
        assert_eq!(t.entries().len(), 9);
        assert!(t.is_prefix_preserving());
        assert_eq!(t.power(3), TransformationTable::identity(3, 2));
        assert_eq!(m.act(&word(&m, "r"), &[0, 2]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn letter_map_algebra() {
        assert_eq!(LetterMap::Swap.then(LetterMap::Swap), LetterMap::Identity);
        assert_eq!(LetterMap::Constant(0).then(LetterMap::Swap), LetterMap::Constant(1));
        assert_eq!(LetterMap::Swap.then(LetterMap::Constant(0)), LetterMap::Constant(0));
    }

    #[test]
    fn decompose_examples() {
        let d = |w: &str| decompose(&GeneratorWord::letters(w).unwrap().to_letters()).unwrap();
        let show = |dec: &Decomposition| {
            (dec.coords[0].letters_string(), dec.coords[1].letters_string(), dec.letter_map)
        };
        assert_eq!(show(&d("f")), ("s".into(), "f".into(), LetterMap::Constant(0)));
        assert_eq!(show(&d("sf")), ("f".into(), "s".into(), LetterMap::Constant(0)));
        assert_eq!(show(&d("fsf")), ("sf".into(), "ff".into(), LetterMap::Constant(0)));
        assert_eq!(show(&d("s")), ("e".into(), "e".into(), LetterMap::Swap));
        assert_eq!(d("fs").letter_map, LetterMap::Constant(1));
        assert!(decompose(&[]).is_err());
    }

    #[test]
    fn decompose_reconstructs_action() {
        let m = MealyMachine::automaton_i();
        for len in 1..=6u32 {
            for code in 0..(1u32 << len) {
                let w: String = (0..len).map(|i| if code >> i & 1 == 1 { 'f' } else { 's' }).collect();
                let letters = GeneratorWord::letters(&w).unwrap().to_letters();
                let dec = decompose(&letters).unwrap();
                let direct = m.transformation_table(&word(&m, &w), 7).unwrap();
                assert_eq!(dec.reconstruct_table(7).unwrap(), direct, "{w}");
            }
        }
    }
}

//! The finite quotients W_n, traces, ideals and related counts.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::PRECISION;
use crate::mealy::{check_level, level_cap, TransformationTable};
use crate::rewrite::{normalize_indices, NormalForm};
use crate::verify::{Failure, VerificationReport};
use crate::words::{fib, format_indices, relation_words, step2, z_word, Evaluator, GeneratorWord, Letter};

/// Largest level accepted by [`enumerate_wn`].
pub const MAX_WN_LEVEL: u32 = 10;

const LETTERS: [Letter; 2] = [Letter::S, Letter::F];

/// The quotient W_n: all distinct level-n tables of elements of F, in breadth-first order.
pub struct FiniteSemigroup {
    level: u32,
    width: usize,
    data: Vec<u16>,
    index: HashMap<u64, Vec<u32>>,
    parent: Vec<Option<(u32, Letter)>>,
    right: Vec<[u32; 2]>,
    generators: [Vec<u16>; 2],
}

fn slice_hash(entries: &[u16]) -> u64 {
    let mut h = DefaultHasher::new();
    entries.hash(&mut h);
    h.finish()
}

/// Σ_{k=1}^n 2^{k+2}Φ_k − 2^n − 2^{n+1}Φ_n + 2.
pub fn wn_order_formula(n: u32) -> BigUint {
    let two = |e: u32| BigInt::one() << e;
    let mut total = BigInt::zero();
    for k in 1..=n {
        total += two(k + 2) * BigInt::from(fib(k));
    }
    total -= two(n);
    total -= two(n + 1) * BigInt::from(fib(n));
    total += 2;
    total.to_biguint().expect("order is positive")
}

/// Breadth-first closure of {e, s, f} at level n.
pub fn enumerate_wn(n: u32) -> Result<FiniteSemigroup> {
    check_level(n)?;
    if n > MAX_WN_LEVEL {
        return Err(Error::LevelAboveCap { level: n, cap: MAX_WN_LEVEL });
    }
    let mut ev = Evaluator::new(n)?;
    let to_u16 = |t: &TransformationTable| t.entries().iter().map(|&v| v as u16).collect::<Vec<u16>>();
    let generators = [to_u16(ev.letter_table(Letter::S)), to_u16(ev.letter_table(Letter::F))];
    let width = 1usize << n;
    let expected = wn_order_formula(n).to_usize().unwrap_or(0);
    let mut w = FiniteSemigroup {
        level: n,
        width,
        data: Vec::with_capacity(expected * width),
        index: HashMap::with_capacity(expected),
        parent: Vec::with_capacity(expected),
        right: Vec::with_capacity(expected),
        generators,
    };
    let identity: Vec<u16> = (0..width as u32).map(|v| v as u16).collect();
    w.insert(&identity, None);
    let mut scratch = vec![0u16; width];
    let mut next = 0usize;
    while next < w.parent.len() {
        let mut edges = [0u32; 2];
        for (g, edge) in edges.iter_mut().enumerate() {
            let gen = &w.generators[g];
            for (out, &v) in scratch.iter_mut().zip(w.element(next as u32)) {
                *out = gen[v as usize];
            }
            *edge = match w.find(&scratch) {
                Some(found) => found,
                None => w.insert(&scratch.clone(), Some((next as u32, LETTERS[g]))),
            };
        }
        w.right[next] = edges;
        next += 1;
    }
    Ok(w)
}

impl FiniteSemigroup {
    fn insert(&mut self, entries: &[u16], parent: Option<(u32, Letter)>) -> u32 {
        let id = self.parent.len() as u32;
        self.data.extend_from_slice(entries);
        self.index.entry(slice_hash(entries)).or_default().push(id);
        self.parent.push(parent);
        self.right.push([u32::MAX; 2]);
        id
    }

    pub fn find(&self, entries: &[u16]) -> Option<u32> {
        self.index
            .get(&slice_hash(entries))?
            .iter()
            .copied()
            .find(|&id| self.element(id) == entries)
    }

    pub fn find_table(&self, table: &TransformationTable) -> Option<u32> {
        if table.level() != self.level {
            return None;
        }
        let entries: Vec<u16> = table.entries().iter().map(|&v| v as u16).collect();
        self.find(&entries)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn element(&self, id: u32) -> &[u16] {
        let start = id as usize * self.width;
        &self.data[start..start + self.width]
    }

    pub fn table(&self, id: u32) -> TransformationTable {
        let entries = self.element(id).iter().map(|&v| v as u32).collect();
        TransformationTable::from_entries(2, self.level, entries).expect("stored tables are valid")
    }

    /// A shortest {s,f}-word representing the element.
    pub fn representative(&self, id: u32) -> Vec<Letter> {
        let mut word = Vec::new();
        let mut cur = id;
        while let Some((p, l)) = self.parent[cur as usize] {
            word.push(l);
            cur = p;
        }
        word.reverse();
        word
    }

    pub fn representative_normal_form(&self, id: u32) -> Result<NormalForm> {
        let idx: Vec<u32> = self.representative(id).iter().map(|l| l.index()).collect();
        normalize_indices(&idx)
    }

    /// x·g for a generator g.
    pub fn right_mul(&self, id: u32, g: Letter) -> u32 {
        self.right[id as usize][(g == Letter::F) as usize]
    }

    /// g·x for a generator g.
    pub fn left_mul(&self, g: Letter, id: u32) -> u32 {
        let gen = &self.generators[(g == Letter::F) as usize];
        let x = self.element(id);
        let product: Vec<u16> = gen.iter().map(|&v| x[v as usize]).collect();
        self.find(&product).expect("W_n is closed under multiplication")
    }

    /// Number of rank-one (constant) tables.
    pub fn constant_count(&self) -> usize {
        (0..self.len() as u32).filter(|&id| self.element(id).iter().all(|&v| v == self.element(id)[0])).count()
    }

    fn two_sided_graph(&self) -> DiGraph<(), ()> {
        let mut graph = DiGraph::with_capacity(self.len(), 4 * self.len());
        let nodes: Vec<_> = (0..self.len()).map(|_| graph.add_node(())).collect();
        for id in 0..self.len() as u32 {
            for g in LETTERS {
                graph.add_edge(nodes[id as usize], nodes[self.right_mul(id, g) as usize], ());
                graph.add_edge(nodes[id as usize], nodes[self.left_mul(g, id) as usize], ());
            }
        }
        graph
    }

    /// The two-sided ideal W·x·W (with W containing the identity), as element ids.
    pub fn two_sided_closure(&self, id: u32) -> Vec<u32> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([id]);
        seen[id as usize] = true;
        while let Some(x) = queue.pop_front() {
            for g in LETTERS {
                for y in [self.right_mul(x, g), self.left_mul(g, x)] {
                    if !std::mem::replace(&mut seen[y as usize], true) {
                        queue.push_back(y);
                    }
                }
            }
        }
        (0..self.len() as u32).filter(|&y| seen[y as usize]).collect()
    }

    /// Checks that the principal two-sided ideals are totally ordered by inclusion.
    pub fn ideal_chain(&self) -> IdealChainReport {
        let graph = self.two_sided_graph();
        // Components come back in reverse topological order.
        let mut comps = kosaraju_scc(&graph);
        comps.reverse();
        let mut comp_of = vec![0usize; self.len()];
        for (c, members) in comps.iter().enumerate() {
            for n in members {
                comp_of[n.index()] = c;
            }
        }
        let mut linked = vec![false; comps.len()];
        for e in graph.raw_edges() {
            let (a, b) = (comp_of[e.source().index()], comp_of[e.target().index()]);
            if b == a + 1 {
                linked[a] = true;
            }
        }
        let broken = (0..comps.len().saturating_sub(1)).find(|&c| !linked[c]);
        IdealChainReport {
            level: self.level,
            elements: self.len(),
            classes: comps.len(),
            is_chain: broken.is_none(),
            first_gap: broken.map(|c| (comps[c][0].index() as u32, comps[c + 1][0].index() as u32)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealChainReport {
    pub level: u32,
    pub elements: usize,
    /// Number of classes of elements generating the same two-sided ideal.
    pub classes: usize,
    pub is_chain: bool,
    /// Representatives of two consecutive classes with incomparable ideals.
    pub first_gap: Option<(u32, u32)>,
}

/// Checks the defining relations of W_n on level-n tables.
pub fn wn_relation_check(n: u32) -> Result<VerificationReport> {
    if n == 0 || n > MAX_WN_LEVEL {
        return Err(Error::Precondition(format!("relation check needs 1 ≤ n ≤ {MAX_WN_LEVEL}")));
    }
    let mut ev = Evaluator::new(n)?;
    let mut report = VerificationReport::new("wn-relations");
    report.parameter("level", n);
    let check = |report: &mut VerificationReport, ok: bool, description: String, witness: String| {
        report.cases += 1;
        if !ok {
            report.failures.push(Failure { description, witness, level: n });
        }
    };
    for k in 1..=n + 2 {
        let (r, rp) = relation_words(k)?;
        let ok = ev.table(&r) == ev.table(&rp);
        check(&mut report, ok, format!("r_{k} = r'_{k}"), format!("{r} = {rp}"));
    }
    let z = z_word(n)?;
    let zt = ev.table(&z);
    for l in LETTERS {
        let lz = ev.letter_table(l).then(&zt);
        check(&mut report, lz == zt, format!("{l}·z_{n} = z_{n}"), format!("{l} {z}"));
    }
    let top = ev.indexed_table(&[n + 2, n + 1]);
    check(&mut report, top == zt, format!("f_{} f_{} = z_{n}", n + 2, n + 1), format!("f{} f{}", n + 2, n + 1));
    let zero = zt.entries().iter().all(|&v| v == 0);
    check(&mut report, zero, format!("z_{n} maps X^{n} to 0^{n}"), z.to_string());
    report.finish();
    Ok(report)
}

/// Per maximal index k, the number of W_n elements whose representative normal form peaks at k.
pub fn census(w: &FiniteSemigroup) -> Result<BTreeMap<u32, usize>> {
    let mut counts = BTreeMap::new();
    for id in 0..w.len() as u32 {
        let peak = w.representative_normal_form(id)?.maximal_index().unwrap_or(0);
        *counts.entry(peak).or_insert(0) += 1;
    }
    Ok(counts)
}

/// 2·Φ_{k−2}·2^{k−1}, the number of normal forms with maximal index k.
pub fn peak_class_size(k: u32) -> BigUint {
    (BigUint::from(2u32) * fib(k - 2)) << (k - 1)
}

/// An exact value numerator / 2^exponent in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigUint,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: BigUint, exponent: u32) -> Self {
        let mut d = DyadicRational { numerator, exponent };
        if d.numerator.is_zero() {
            d.exponent = 0;
        }
        while d.exponent > 0 && !d.numerator.bit(0) {
            d.numerator >>= 1;
            d.exponent -= 1;
        }
        d
    }

    /// 2^{-k}.
    pub fn inverse_power(k: u32) -> Self {
        DyadicRational { numerator: BigUint::one(), exponent: k }
    }

    pub fn one() -> Self {
        DyadicRational { numerator: BigUint::one(), exponent: 0 }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(self.exponent as i32)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let e = self.exponent.max(other.exponent);
        (&self.numerator << (e - self.exponent)).cmp(&(&other.numerator << (e - other.exponent)))
    }
}

impl Serialize for DyadicRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, BigUint::one() << self.exponent)
        }
    }
}

/// The ascending part together with the peak equals the z-chain ending at the peak.
pub fn includes_z(nf: &NormalForm) -> bool {
    match nf.split() {
        Some((asc, peak, _)) if peak >= 3 => {
            let mut chain = asc.to_vec();
            chain.push(peak);
            chain == step2(3 + (peak + 1) % 2, peak)
        }
        _ => false,
    }
}

/// The descending tail starts just below the peak.
pub fn includes_top_pair(nf: &NormalForm) -> bool {
    matches!(nf.split(), Some((_, peak, tail)) if tail.first() == Some(&(peak - 1)))
}

/// τ(g) from the shape of the normal form: 2^{2−n} or 2^{3−n} for maximal index n ≥ 3.
pub fn trace_exact(nf: &NormalForm) -> Result<DyadicRational> {
    let n = match nf.maximal_index() {
        Some(n) if n >= 3 => n,
        _ => return Err(Error::Precondition(format!("trace formula needs maximal index ≥ 3, got {nf}"))),
    };
    Ok(if includes_z(nf) || includes_top_pair(nf) {
        DyadicRational::inverse_power(n - 2)
    } else {
        DyadicRational::inverse_power(n - 3)
    })
}

/// #g(X^j)/2^j for each level j in `levels`.
pub fn trace_empirical(word: &GeneratorWord, levels: std::ops::RangeInclusive<u32>) -> Result<Vec<DyadicRational>> {
    let top = *levels.end();
    let mut ev = Evaluator::new(top)?;
    let table = ev.table(word);
    Ok(levels
        .map(|j| DyadicRational::new(BigUint::from(table.image_size_at(j)), j))
        .collect())
}

/// The empirical trace once it has stopped changing over the last three levels up to `max_level`.
pub fn trace_stabilized(word: &GeneratorWord, max_level: u32) -> Result<DyadicRational> {
    let seq = trace_empirical(word, 0..=max_level)?;
    match &seq[..] {
        [.., a, b, c] if a == b && b == c => Ok(c.clone()),
        _ => Err(Error::NotStabilized(max_level)),
    }
}

/// w(k, m) with w·f_k f_m = f_m.
pub fn w_word(k: u32, m: u32) -> Result<GeneratorWord> {
    let out_of_range = || Error::Precondition(format!("w({k},{m}) is not defined"));
    if m < 6 || k < 3 || k + 2 > m {
        return Err(out_of_range());
    }
    let idx = match (k, m) {
        (3, 6) => vec![4, 3, 1],
        (4, 6) => return Err(Error::Precondition("w(4,6) is the excluded case".into())),
        (5, 7) => vec![5, 4, 1],
        (4, 7) => vec![5, 4, 2],
        (3, 7) => vec![5, 4],
        _ => {
            let mut v = vec![m - 2, m - 3, m - 5, m - 7];
            v.extend((k - 1..=m - 4).rev());
            v
        }
    };
    Ok(GeneratorWord::Indexed(idx))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealWitness {
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub target_index: u32,
}

const SFFS: [u32; 4] = [1, 2, 2, 1];
const FSFS: [u32; 4] = [2, 1, 2, 1];

fn build_witness(nf: &NormalForm, depth: u32) -> Result<IdealWitness> {
    let (asc, n, tail) = nf.split().filter(|&(_, n, _)| n >= 3).ok_or_else(|| {
        Error::Precondition(format!("ideal witnesses need maximal index ≥ 3, got {nf}"))
    })?;
    if depth > 2 * n {
        return Err(Error::WitnessRefuted(format!("construction for {nf} does not settle")));
    }
    let beta = |i: u32| tail.contains(&i);
    let g2: Vec<u32> = (1..n.saturating_sub(1)).filter(|&i| beta(i)).collect();
    let s_eps: Vec<u32> = vec![1; nf.epsilon() as usize];
    if includes_z(nf) {
        let mut right = g2;
        if beta(n - 1) {
            right.push(n - 1);
        }
        return Ok(IdealWitness { left: [vec![3 - n % 2], s_eps].concat(), right, target_index: n + 1 });
    }
    let mut chain = asc.to_vec();
    chain.push(n);
    if chain.len() >= 2 && matches!((chain[0], chain[1]), (3, 5) | (4, 6)) {
        let pre = [vec![if chain[0] == 3 { 2 } else { 3 }], s_eps].concat();
        let shifted = normalize_indices(&[pre.clone(), nf.word()].concat())?;
        let inner = build_witness(&shifted, depth + 1)?;
        return Ok(IdealWitness { left: [inner.left, pre].concat(), ..inner });
    }
    let mut left = Vec::new();
    for j in (0..asc.len()).rev() {
        left.extend(w_word(chain[j], chain[j + 1])?.to_indexed());
    }
    left.extend(&s_eps);
    if beta(n - 1) {
        let prefix = if n % 2 == 0 { SFFS } else { FSFS };
        Ok(IdealWitness { left: [prefix.to_vec(), left].concat(), right: g2, target_index: n + 1 })
    } else {
        Ok(IdealWitness { left, right: g2, target_index: n })
    }
}

/// ℓ(g), r(g) with ℓ(g)·g·r(g) = f_k, confirmed on tables.
pub fn ideal_witnesses(nf: &NormalForm) -> Result<IdealWitness> {
    let witness = build_witness(nf, 0)?;
    let n = nf.maximal_index().expect("checked by construction");
    let expected = if includes_z(nf) || includes_top_pair(nf) { n + 1 } else { n };
    let level = level_cap().min(n + 3);
    let mut ev = Evaluator::new(level)?;
    let product = [witness.left.clone(), nf.word(), witness.right.clone()].concat();
    if witness.target_index != expected || ev.indexed_table(&product) != *ev.fib_table(witness.target_index) {
        return Err(Error::WitnessRefuted(format!(
            "{} · {nf} · {} ≠ f{} at level {level}",
            format_indices(&witness.left),
            format_indices(&witness.right),
            witness.target_index
        )));
    }
    Ok(witness)
}

/// Σ 2^{k+2}Φ_k − 2^{n+1} − 2^{n+1}Φ_n + 3, the order of F/I_n.
pub fn quotient_fin_order(n: u32) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::Precondition("F/I_n order needs n ≥ 2".into()));
    }
    let formula = BigInt::from(wn_order_formula(n)) + (BigInt::one() << n) - (BigInt::one() << (n + 1)) + BigInt::one();
    Ok(formula.to_biguint().expect("order is positive"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HausdorffTerm {
    pub n: u32,
    pub order: String,
    /// h_n as a decimal string.
    pub value: String,
    pub value_f64: f64,
    /// Whether |W_n| ≤ (2φ)^{n+1}.
    pub below_bound: bool,
}

/// h_n = log|W_n| / ((2^n − 1)·log 4) for n = 1..=n_max, from the order formula.
pub fn hausdorff_sequence(n_max: u32) -> Result<Vec<HausdorffTerm>> {
    if n_max == 0 || n_max > 40 {
        return Err(Error::Precondition("hausdorff_sequence needs 1 ≤ n ≤ 40".into()));
    }
    let p = PRECISION;
    let rm = RoundingMode::ToEven;
    let mut cc = Consts::new().expect("constant cache");
    let ln4 = BigFloat::from_u8(4, p).ln(p, rm, &mut cc);
    let sqrt5 = BigFloat::from_u8(5, p).sqrt(p, rm);
    let ln_two_phi = BigFloat::from_u8(1, p).add(&sqrt5, p, rm).ln(p, rm, &mut cc);
    (1..=n_max)
        .map(|n| {
            let order = wn_order_formula(n);
            let exact = order.to_u128().expect("orders up to n = 40 fit in u128");
            let ln_order = BigFloat::from_u128(exact, p).ln(p, rm, &mut cc);
            let denom = BigFloat::from_u64((1u64 << n) - 1, p).mul(&ln4, p, rm);
            let h = ln_order.div(&denom, p, rm);
            let ln_bound = BigFloat::from_u32(n + 1, p).mul(&ln_two_phi, p, rm);
            Ok(HausdorffTerm {
                n,
                order: order.to_string(),
                value: crate::growth::format_decimal(&h, 30, &mut cc),
                value_f64: crate::growth::to_f64(&h),
                below_bound: ln_order.cmp(&ln_bound).is_some_and(|o| o <= 0),
            })
        })
        .collect()
}

/// Checks the prefix identities that produce f_{n+1}, z_n and f_n from shorter words.
pub fn idzn_identities(level: u32, n_max: u32) -> Result<VerificationReport> {
    let mut ev = Evaluator::new(level)?;
    let mut report = VerificationReport::new("idzn");
    report.parameter("level", level);
    report.parameter("n_max", n_max);
    let z = |n: u32| step2(3 + (n + 1) % 2, n + 2);
    for n in 2..=n_max {
        let mut cases: Vec<(String, Vec<u32>, Vec<u32>)> = Vec::new();
        let prefix = if n % 2 == 0 { FSFS } else { SFFS };
        if n >= 4 {
            cases.push((format!("f_{n} f_{} = {}·f_{}", n - 1, format_indices(&prefix), n + 1), vec![n, n - 1], [prefix.to_vec(), vec![n + 1]].concat()));
        }
        let zp: Vec<u32> = if n % 2 == 0 { vec![2, 1] } else { vec![1, 2, 1] };
        cases.push((format!("z_{n} = {}·f_{}", format_indices(&zp), n + 3), z(n), [zp, vec![n + 3]].concat()));
        if n >= 5 && (n % 2 == 1 || n >= 6) {
            let fp: Vec<u32> = if n % 2 == 0 { vec![2] } else { vec![1, 2] };
            cases.push((format!("f_{n} = {}·z_{}", format_indices(&fp), n - 3), vec![n], [fp, z(n - 3)].concat()));
            cases.push((format!("f_{n} = {}·f_{} f_{}", format_indices(&prefix), n - 1, n - 2), vec![n], [prefix.to_vec(), vec![n - 1, n - 2]].concat()));
        }
        for (description, lhs, rhs) in cases {
            report.cases += 1;
            if ev.indexed_table(&lhs) != ev.indexed_table(&rhs) {
                report.failures.push(Failure { description, witness: format_indices(&lhs), level });
            }
        }
    }
    report.finish();
    Ok(report)
}

/// Compares {g ∈ W_{n+3} : τ(g) ≤ 2^{−n}} with the two-sided ideal generated by f_{n+3}.
pub fn trace_ideal_agreement(n: u32) -> Result<bool> {
    let w = enumerate_wn(n + 3)?;
    let mut ev = Evaluator::new(n + 3)?;
    let generator = w.find_table(ev.fib_table(n + 3)).expect("f_{n+3} lies in W_{n+3}");
    let mut in_ideal = vec![false; w.len()];
    for id in w.two_sided_closure(generator) {
        in_ideal[id as usize] = true;
    }
    let bound = DyadicRational::inverse_power(n);
    for id in 0..w.len() as u32 {
        let nf = w.representative_normal_form(id)?;
        let trace = match nf.maximal_index() {
            Some(k) if k >= 3 => trace_exact(&nf)?,
            _ => DyadicRational::one(),
        };
        if (trace <= bound) != in_ideal[id as usize] {
            return Ok(false);
        }
    }
    Ok(true)
}

//! Number-partitioning instances and their QUBO form.
//!
//! An instance is a list of positive integers `a_0..a_{n-1}` with total `c`.
//! Assigning bit `z_i = 1` puts `a_i` on one side; the set-sum difference is
//! `d = |c - 2 Σ a_i z_i|` and the QUBO objective is `d²`. Expanding the
//! square with `z_i² = z_i` gives
//!
//! ```text
//! d² = c² + Σ_i (4a_i² - 4c·a_i) z_i + Σ_{i<j} 8 a_i a_j z_i z_j
//! ```
//!
//! which is what [`QuboModel`] stores. All arithmetic here is integer and
//! exact; floating point only enters through [`quality_ratio`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::rng_from_seed;
use crate::{Error, Result};

/// Largest `n` accepted by [`brute_force_best`].
pub const BRUTE_FORCE_MAX_N: usize = 24;
/// Largest total accepted by [`dp_best_diff`].
pub const DP_MAX_TOTAL: u64 = 10_000_000;
/// [`exact_best`] enumerates up to this size and switches to the DP above it.
pub const EXACT_ENUMERATION_MAX_N: usize = 12;

/// A multiset of positive integers to split into two sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile", into = "InstanceFile")]
pub struct NppInstance {
    values: Vec<u64>,
    total: u64,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    values: Vec<u64>,
    seed: Option<u64>,
}

impl TryFrom<InstanceFile> for NppInstance {
    type Error = Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        let mut inst = NppInstance::new(f.values)?;
        inst.seed = f.seed;
        Ok(inst)
    }
}

impl From<NppInstance> for InstanceFile {
    fn from(i: NppInstance) -> Self {
        InstanceFile {
            values: i.values,
            seed: i.seed,
        }
    }
}

impl NppInstance {
    /// Builds a hand-made instance. Every value must be at least 1 and the
    /// total must fit in an `i64`.
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::arg("instance must contain at least one value"));
        }
        if let Some(pos) = values.iter().position(|&v| v == 0) {
            return Err(Error::arg(format!("value at index {pos} is zero")));
        }
        let total = values
            .iter()
            .try_fold(0u64, |acc, &v| acc.checked_add(v))
            .filter(|&t| t <= i64::MAX as u64)
            .ok_or_else(|| Error::Overflow("instance total exceeds i64 range".into()))?;
        Ok(NppInstance {
            values,
            total,
            seed: None,
        })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The sum `c` of all values.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Seed used by [`generate_instance`], `None` for hand-built instances.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    fn check_len(&self, z: &Bitstring) -> Result<()> {
        if z.len() != self.len() {
            return Err(Error::arg(format!(
                "bitstring has {} bits, instance has {} values",
                z.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// Sum of the values selected by `z` (bits set to 1).
    fn subset_sum_unchecked(&self, z: &Bitstring) -> u64 {
        self.values
            .iter()
            .zip(z.bits())
            .filter(|(_, &b)| b)
            .map(|(&a, _)| a)
            .sum()
    }
}

/// Draws `n` integers uniformly from `[lo, hi]` using a ChaCha8 stream seeded
/// with `seed`. The result is a pure function of the four arguments.
pub fn generate_instance(n: usize, seed: u64, lo: u64, hi: u64) -> Result<NppInstance> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    if lo == 0 || lo > hi {
        return Err(Error::arg(format!(
            "value range [{lo}, {hi}] must satisfy 1 <= lo <= hi"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let values = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    let mut inst = NppInstance::new(values)?;
    inst.seed = Some(seed);
    Ok(inst)
}

/// A binary assignment. Index 0 is the leftmost character of the textual
/// form and the most significant bit of [`Bitstring::to_index`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Bitstring(vec![false; n])
    }

    /// Decodes a basis-state index of an `n`-bit register, big-endian.
    pub fn from_index(index: usize, n: usize) -> Self {
        Bitstring((0..n).map(|q| (index >> (n - 1 - q)) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn complement(&self) -> Self {
        Bitstring(self.0.iter().map(|b| !b).collect())
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::arg(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bitstring)
    }
}

/// The expanded QUBO: `constant + Σ linear_i z_i + Σ_{i<j} Q_ij z_i z_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuboModel {
    n: usize,
    constant: i64,
    linear: Vec<i64>,
    quad: BTreeMap<(usize, usize), i64>,
    instance: NppInstance,
}

impl QuboModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn linear(&self) -> &[i64] {
        &self.linear
    }

    /// Strictly upper-triangular couplings keyed by `(i, j)` with `i < j`.
    pub fn quad(&self) -> &BTreeMap<(usize, usize), i64> {
        &self.quad
    }

    pub fn instance(&self) -> &NppInstance {
        &self.instance
    }

    /// Sum of every coupling touching qubit `i`, i.e. `Σ_{j≠i} Q_ij` with Q
    /// read symmetrically.
    pub fn coupling_row_sum(&self, i: usize) -> i64 {
        self.quad
            .iter()
            .filter(|((a, b), _)| *a == i || *b == i)
            .map(|(_, &q)| q)
            .sum()
    }

    /// Dense symmetric coupling matrix with a zero diagonal.
    pub fn dense_couplings(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.n]; self.n];
        for (&(i, j), &q) in &self.quad {
            m[i][j] = q;
            m[j][i] = q;
        }
        m
    }
}

/// Expands `(c - 2 Σ a_i z_i)²` into constant, linear and pairwise terms.
pub fn build_qubo(instance: &NppInstance) -> Result<QuboModel> {
    let overflow = || Error::Overflow("QUBO coefficient exceeds i64 range".into());
    let c = instance.total() as i64;
    let constant = c.checked_mul(c).ok_or_else(overflow)?;
    let a: Vec<i64> = instance.values().iter().map(|&v| v as i64).collect();

    let linear = a
        .iter()
        .map(|&ai| {
            let sq = ai.checked_mul(ai)?.checked_mul(4)?;
            let cross = c.checked_mul(ai)?.checked_mul(4)?;
            sq.checked_sub(cross)
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(overflow)?;

    let mut quad = BTreeMap::new();
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let q = a[i]
                .checked_mul(a[j])
                .and_then(|p| p.checked_mul(8))
                .ok_or_else(overflow)?;
            quad.insert((i, j), q);
        }
    }

    Ok(QuboModel {
        n: a.len(),
        constant,
        linear,
        quad,
        instance: instance.clone(),
    })
}

/// `(c - 2 Σ a_i z_i)²` evaluated directly.
pub fn energy(instance: &NppInstance, z: &Bitstring) -> Result<u128> {
    instance.check_len(z)?;
    let d = set_difference(instance.total(), instance.subset_sum_unchecked(z));
    Ok(d as u128 * d as u128)
}

/// Evaluates the expanded QUBO polynomial.
pub fn qubo_value(model: &QuboModel, z: &Bitstring) -> Result<i128> {
    if z.len() != model.n {
        return Err(Error::arg(format!(
            "bitstring has {} bits, model has {} variables",
            z.len(),
            model.n
        )));
    }
    let bits = z.bits();
    let mut value = model.constant as i128;
    for (i, &c) in model.linear.iter().enumerate() {
        if bits[i] {
            value += c as i128;
        }
    }
    for (&(i, j), &q) in &model.quad {
        if bits[i] && bits[j] {
            value += q as i128;
        }
    }
    Ok(value)
}

/// `R = max(b₁, b₂) / (c/2)` for the split encoded by `z`.
pub fn quality_ratio(instance: &NppInstance, z: &Bitstring) -> Result<f64> {
    instance.check_len(z)?;
    Ok(ratio_from_sum(instance.total(), instance.subset_sum_unchecked(z)))
}

fn ratio_from_sum(total: u64, subset_sum: u64) -> f64 {
    let larger = subset_sum.max(total - subset_sum);
    // 2·larger ≤ 2c fits in u128; a single correctly rounded division.
    (2 * larger as u128) as f64 / total as f64
}

fn set_difference(total: u64, subset_sum: u64) -> u64 {
    (total as i128 - 2 * subset_sum as i128).unsigned_abs() as u64
}

/// A scored assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSolution {
    pub bitstring: Bitstring,
    /// Sum of the values whose bit is 1.
    pub subset_sum: u64,
    /// Absolute set-sum difference `d`.
    pub diff: u64,
    /// `d²`, the QUBO objective.
    pub energy: u128,
    /// Quality metric `R ≥ 1`.
    pub ratio: f64,
}

impl PartitionSolution {
    pub fn evaluate(instance: &NppInstance, bitstring: Bitstring) -> Result<Self> {
        instance.check_len(&bitstring)?;
        let subset_sum = instance.subset_sum_unchecked(&bitstring);
        let diff = set_difference(instance.total(), subset_sum);
        Ok(PartitionSolution {
            bitstring,
            subset_sum,
            diff,
            energy: diff as u128 * diff as u128,
            ratio: ratio_from_sum(instance.total(), subset_sum),
        })
    }
}

/// Enumerates all `2^n` assignments. Ties resolve to the numerically
/// smallest big-endian bitstring.
pub fn brute_force_best(instance: &NppInstance) -> Result<PartitionSolution> {
    let n = instance.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::capability(format!(
            "brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}"
        )));
    }
    let values = instance.values();
    let total = instance.total();
    let mut best: Option<(u64, usize)> = None;
    for k in 0..(1usize << n) {
        let sum: u64 = (0..n)
            .filter(|&q| (k >> (n - 1 - q)) & 1 == 1)
            .map(|q| values[q])
            .sum();
        let d = set_difference(total, sum);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, k));
            if d == 0 {
                break;
            }
        }
    }
    let (_, k) = best.expect("at least one assignment");
    PartitionSolution::evaluate(instance, Bitstring::from_index(k, n))
}

/// Minimal achievable `d` from subset-sum reachability over `0..=c/2`.
pub fn dp_best_diff(instance: &NppInstance) -> Result<u64> {
    let (reach, _) = subset_sum_table(instance)?;
    let total = instance.total();
    let best = (0..reach.len())
        .rev()
        .find(|&s| reach[s])
        .expect("sum 0 is always reachable") as u64;
    Ok(total - 2 * best)
}

/// Reachability table plus, for every reachable nonzero sum, the index of
/// the first item that reached it.
fn subset_sum_table(instance: &NppInstance) -> Result<(Vec<bool>, Vec<u32>)> {
    let total = instance.total();
    if total > DP_MAX_TOTAL {
        return Err(Error::capability(format!(
            "dynamic programming limited to totals <= {DP_MAX_TOTAL}, got {total}"
        )));
    }
    let half = (total / 2) as usize;
    let mut reach = vec![false; half + 1];
    let mut first = vec![u32::MAX; half + 1];
    reach[0] = true;
    for (idx, &a) in instance.values().iter().enumerate() {
        let a = a as usize;
        if a > half {
            continue;
        }
        for s in (a..=half).rev() {
            if !reach[s] && reach[s - a] {
                reach[s] = true;
                first[s] = idx as u32;
            }
        }
    }
    Ok((reach, first))
}

fn dp_best_solution(instance: &NppInstance) -> Result<PartitionSolution> {
    let (reach, first) = subset_sum_table(instance)?;
    let mut s = (0..reach.len()).rev().find(|&s| reach[s]).unwrap_or(0);
    let mut bits = vec![false; instance.len()];
    // Walking back through first-reachers only ever visits items with
    // strictly decreasing indices, so no item is used twice.
    while s > 0 {
        let idx = first[s] as usize;
        bits[idx] = true;
        s -= instance.values()[idx] as usize;
    }
    PartitionSolution::evaluate(instance, Bitstring::new(bits))
}

/// A provably optimal split. Enumerates for `n <= 12`, otherwise uses the
/// subset-sum DP when the total is at most [`DP_MAX_TOTAL`].
pub fn exact_best(instance: &NppInstance) -> Result<PartitionSolution> {
    if instance.len() <= EXACT_ENUMERATION_MAX_N {
        brute_force_best(instance)
    } else if instance.total() <= DP_MAX_TOTAL {
        dp_best_solution(instance)
    } else {
        Err(Error::capability(format!(
            "no exact method for n = {} with total {}",
            instance.len(),
            instance.total()
        )))
    }
}

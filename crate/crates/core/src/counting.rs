//! Exact microstate counting.
//!
//! Standard bosonic counting places `n` indistinguishable particles on the
//! `g` sublevels of a level. Under coherent access a particle may instead
//! occupy any nonempty subset of those sublevels as one effective state, so
//! the number of available states grows from `g` to `G(g) = 2^g - 1`. The
//! weight of a level is then the multiset count `(G + n - 1)! / ((G - 1)! n!)`.
//!
//! All counts are arbitrary precision; nothing here touches floating point
//! except [`BigCount::ln`].

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Maximum number of occupation maps [`enumerate_coherent_sequences`] will
/// materialize before giving up.
pub const ENUMERATION_LIMIT: usize = 1_000_000;

/// Maximum sublevel count accepted by [`enumerate_coherent_sequences`]
/// (`2^20 - 1` subsets already approaches [`ENUMERATION_LIMIT`]).
pub const ENUMERATION_MAX_SUBLEVELS: u32 = 20;

/// Exact nonnegative integer count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    /// Value as `u64`, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Natural logarithm, accurate to double precision even when the count
    /// itself does not fit in an `f64`. Returns `-inf` for zero.
    pub fn ln(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.0.bits();
        if bits <= 1000 {
            return self.0.to_f64().map_or(f64::NAN, f64::ln);
        }
        let shift = bits - 64;
        let head = (&self.0 >> shift).to_f64().unwrap_or(f64::NAN);
        head.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl PartialEq<u64> for BigCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a BigCount> for BigCount {
    type Output = BigCount;
    fn add(self, rhs: &'a BigCount) -> BigCount {
        BigCount(self.0 + &rhs.0)
    }
}

impl Mul for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a BigCount> for BigCount {
    type Output = BigCount;
    fn mul(self, rhs: &'a BigCount) -> BigCount {
        BigCount(self.0 * &rhs.0)
    }
}

impl Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::zero(), Add::add)
    }
}

impl Product for BigCount {
    fn product<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::one(), Mul::mul)
    }
}

/// Serialized as a decimal string so large values never pass through a float.
impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

/// One energy level: `g` sublevels holding `occupancy` particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LevelSpec {
    g: u32,
    occupancy: u64,
}

impl LevelSpec {
    pub fn new(g: u32, occupancy: u64) -> Result<Self> {
        if g == 0 {
            return Err(Error::invalid("a level needs at least one sublevel (g >= 1)"));
        }
        Ok(LevelSpec { g, occupancy })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn occupancy(&self) -> u64 {
        self.occupancy
    }

    /// `G = 2^g - 1`, the number of nonempty sublevel subsets.
    pub fn coherent_degeneracy(&self) -> BigCount {
        coherent_states(self.g)
    }

    /// `L = G - g`: states that exist only through coherent access.
    pub fn excess(&self) -> BigCount {
        BigCount(self.coherent_degeneracy().0 - BigUint::from(self.g))
    }

    /// Weight of this level alone under coherent access.
    pub fn weight(&self) -> BigCount {
        multiset_count(&self.coherent_degeneracy().0, self.occupancy)
    }
}

/// An occupancy assignment across an ordered, nonempty list of levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MacrostateSpec {
    levels: Vec<LevelSpec>,
}

impl MacrostateSpec {
    pub fn new(levels: Vec<LevelSpec>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("a macrostate needs at least one level"));
        }
        Ok(MacrostateSpec { levels })
    }

    pub fn levels(&self) -> &[LevelSpec] {
        &self.levels
    }

    /// Total particle count `N* = sum_j N*_j`.
    pub fn total_particles(&self) -> u64 {
        self.levels.iter().map(LevelSpec::occupancy).sum()
    }
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigCount::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // acc * (n - k + i) / i stays integral at every step: it equals C(n - k + i, i).
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    BigCount(acc)
}

/// Number of coherent states of a level with `g` sublevels: the sum of
/// `C(g, k)` over subset sizes `k = 1..=g`, which is `2^g - 1`.
pub fn coherent_degeneracy(g: u32) -> Result<BigCount> {
    if g == 0 {
        return Err(Error::invalid("coherent degeneracy needs g >= 1"));
    }
    Ok(coherent_states(g))
}

fn coherent_states(g: u32) -> BigCount {
    let g = u64::from(g);
    let mut term = BigUint::one();
    let mut total = BigUint::zero();
    for k in 0..g {
        // term: C(g, k) -> C(g, k + 1)
        term *= g - k;
        term /= k + 1;
        total += &term;
    }
    BigCount(total)
}

/// Ways to place `n` indistinguishable particles on `states` single-particle
/// states: `(states + n - 1)! / ((states - 1)! n!)`.
pub fn microstate_count(states: &BigCount, n: u64) -> Result<BigCount> {
    if states.is_zero() {
        return Err(Error::invalid("microstate count needs at least one state (G >= 1)"));
    }
    Ok(multiset_count(&states.0, n))
}

fn multiset_count(states: &BigUint, n: u64) -> BigCount {
    let base = states - BigUint::one();
    let mut acc = BigUint::one();
    // acc = C(base + i, i) after step i
    for i in 1..=n {
        acc *= &base + BigUint::from(i);
        acc /= i;
    }
    BigCount(acc)
}

/// Ways to place `n` labeled particles on `states` states: `states^n`.
///
/// This is the ordinary Maxwell-Boltzmann extension to distinguishable
/// particles, included for comparison; it is not part of the coherent-access
/// construction itself.
pub fn distinguishable_count(states: &BigCount, n: u64) -> Result<BigCount> {
    if states.is_zero() {
        return Err(Error::invalid("distinguishable count needs at least one state (G >= 1)"));
    }
    Ok(BigCount(Pow::pow(&states.0, n)))
}

/// Coherent-access weight of a macrostate: the product of per-level counts.
pub fn macrostate_weight(m: &MacrostateSpec) -> BigCount {
    m.levels.iter().map(LevelSpec::weight).product()
}

/// Total number of microstates of `n_total` particles spread over levels with
/// the given sublevel counts, summed over every occupancy composition.
pub fn total_omega(sublevels: &[u32], n_total: u64) -> Result<BigCount> {
    if sublevels.is_empty() {
        return Err(Error::invalid("total omega needs at least one level"));
    }
    if let Some(pos) = sublevels.iter().position(|&g| g == 0) {
        return Err(Error::invalid(format!("level {pos} has g = 0; every level needs g >= 1")));
    }
    let states: Vec<BigUint> = sublevels.iter().map(|&g| coherent_states(g).0).collect();
    Ok(BigCount(omega_over_compositions(&states, n_total)))
}

// Sums prod_j C(G_j + N_j - 1, N_j) over all (N_1, .., N_m) with sum = remaining.
fn omega_over_compositions(states: &[BigUint], remaining: u64) -> BigUint {
    match states {
        [] => BigUint::zero(),
        [last] => multiset_count(last, remaining).0,
        [first, rest @ ..] => (0..=remaining)
            .map(|n| multiset_count(first, n).0 * omega_over_compositions(rest, remaining - n))
            .sum(),
    }
}

/// A nonempty subset of the sublevels `1..=g`, stored as a bitmask
/// (bit `i` set means sublevel `i + 1` is included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u32);

impl Subset {
    pub fn from_mask(mask: u32) -> Option<Self> {
        (mask != 0).then_some(Subset(mask))
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based sublevel indices, ascending.
    pub fn members(&self) -> Vec<u32> {
        (0..32).filter(|i| self.0 >> i & 1 == 1).map(|i| i + 1).collect()
    }

    /// Label in sequence notation: digits run together while every index is
    /// a single digit (`12` for sublevels 1 and 2), comma-separated otherwise.
    pub fn label(&self) -> String {
        let members = self.members();
        let sep = if members.iter().all(|&m| m < 10) { "" } else { "," };
        members.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

/// All nonempty subsets of `g` sublevels, ordered by size and then
/// lexicographically by member list.
pub fn canonical_subsets(g: u32) -> Vec<Subset> {
    assert!(g <= 31, "subset masks are limited to 31 sublevels");
    let mut subsets: Vec<Subset> = (1u32..(1u32 << g)).map(Subset).collect();
    subsets.sort_by_cached_key(|s| (s.len(), s.members()));
    subsets
}

/// One microstate: how many particles occupy each coherent subset.
/// Only occupied subsets are stored, in canonical subset order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupationMap {
    g: u32,
    entries: Vec<(Subset, u32)>,
}

impl OccupationMap {
    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn entries(&self) -> &[(Subset, u32)] {
        &self.entries
    }

    /// Particles on `subset` (zero if unoccupied).
    pub fn count(&self, subset: Subset) -> u32 {
        self.entries
            .iter()
            .find(|(s, _)| *s == subset)
            .map_or(0, |&(_, c)| c)
    }

    pub fn particles(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| u64::from(c)).sum()
    }

    /// Sequence notation: every subset of the level in canonical order, each
    /// followed by one `a` per particle on it, e.g. `(1)(2)(12)aa`.
    pub fn notation(&self) -> String {
        let mut out = String::new();
        for subset in canonical_subsets(self.g) {
            out.push_str(&subset.to_string());
            for _ in 0..self.count(subset) {
                out.push('a');
            }
        }
        out
    }
}

/// Explicitly lists every way `n` identical particles can coherently occupy
/// the nonempty subsets of `g` sublevels.
///
/// Fails with [`Error::EnumerationTooLarge`] once more than
/// [`ENUMERATION_LIMIT`] maps would be produced, or when `g` exceeds
/// [`ENUMERATION_MAX_SUBLEVELS`]. Output order is deterministic: maps are
/// generated as nondecreasing sequences of canonical subset indices in
/// lexicographic order.
pub fn enumerate_coherent_sequences(g: u32, n: u32) -> Result<Vec<OccupationMap>> {
    if g == 0 {
        return Err(Error::invalid("enumeration needs g >= 1"));
    }
    if g > ENUMERATION_MAX_SUBLEVELS {
        return Err(Error::EnumerationTooLarge { limit: ENUMERATION_LIMIT });
    }
    let subsets = canonical_subsets(g);
    let top = subsets.len() - 1;
    let n = n as usize;

    let mut maps = Vec::new();
    let mut picks = vec![0usize; n];
    loop {
        if maps.len() == ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge { limit: ENUMERATION_LIMIT });
        }
        maps.push(picks_to_map(g, &subsets, &picks));

        let Some(i) = picks.iter().rposition(|&p| p < top) else {
            break;
        };
        let next = picks[i] + 1;
        picks[i..].fill(next);
    }
    Ok(maps)
}

fn picks_to_map(g: u32, subsets: &[Subset], picks: &[usize]) -> OccupationMap {
    let mut entries: Vec<(Subset, u32)> = Vec::new();
    // picks are nondecreasing, so equal indices are adjacent
    for &p in picks {
        match entries.last_mut() {
            Some((s, c)) if *s == subsets[p] => *c += 1,
            _ => entries.push((subsets[p], 1)),
        }
    }
    OccupationMap { g, entries }
}

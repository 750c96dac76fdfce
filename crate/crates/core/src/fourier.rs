//! Boolean encoding of action profiles and Fourier analysis on the hypercube.
//!
//! A profile `a ∈ [A]^N` is encoded unit by unit: the 0-based action index
//! `a_n - 1` is written in `log2 A` bits, most significant bit first, and each
//! bit `b` becomes `2b - 1`. Encoding positions are 0-based here, so unit `m`
//! owns positions `m·log2 A .. (m+1)·log2 A`.
//!
//! Profiles are also addressed by their *index* in lexicographic order (unit 0
//! most significant). Because each block is written MSB-first, the binary
//! digits of the index are exactly the encoding bits: position `j` holds bit
//! `p - 1 - j` of the index. [`sign_word`] exploits that to encode a profile
//! with one bit reversal.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::{Error, Result, DEFAULT_PROFILE_CAP, DEFAULT_SUBSET_BITS_CAP};

/// `log2 A`, rejecting action counts that are not powers of two.
pub fn bits_per_unit(arms: u32) -> Result<usize> {
    if arms == 0 || !arms.is_power_of_two() {
        return Err(Error::ArmsNotPowerOfTwo(arms));
    }
    Ok(arms.trailing_zeros() as usize)
}

/// Smallest power of two that is at least `arms`.
///
/// Actions beyond the real count are redundant encodings; the environment
/// folds them back onto real actions so they carry duplicated rewards.
pub fn pad_action_count(arms: u32) -> u32 {
    arms.max(1).next_power_of_two()
}

/// `A^N`, or `None` on overflow.
pub fn profile_count(units: usize, arms: u32) -> Option<u64> {
    let mut total: u64 = 1;
    for _ in 0..units {
        total = total.checked_mul(u64::from(arms))?;
    }
    Some(total)
}

pub(crate) fn checked_profile_count(units: usize, arms: u32, cap: u64, what: &'static str) -> Result<u64> {
    match profile_count(units, arms) {
        Some(count) if count <= cap => Ok(count),
        Some(count) => Err(Error::CapExceeded { what, requested: count, cap }),
        None => Err(Error::CapExceeded { what, requested: u64::MAX, cap }),
    }
}

/// A joint treatment: one action per unit.
///
/// Stored 0-based; [`ActionProfile::from_one_based`] and
/// [`ActionProfile::one_based`] translate from and to the 1-based `[A]`
/// convention.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionProfile {
    levels: Vec<u32>,
    arms: u32,
}

impl ActionProfile {
    pub fn from_one_based(actions: &[u32], arms: u32) -> Result<Self> {
        let mut levels = Vec::with_capacity(actions.len());
        for (unit, &action) in actions.iter().enumerate() {
            if action == 0 || action > arms {
                return Err(Error::ActionOutOfRange { unit, action, arms });
            }
            levels.push(action - 1);
        }
        Ok(Self { levels, arms })
    }

    /// Builds a profile from 0-based action levels.
    pub fn from_levels(levels: Vec<u32>, arms: u32) -> Result<Self> {
        if let Some(unit) = levels.iter().position(|&l| l >= arms) {
            return Err(Error::ActionOutOfRange { unit, action: levels[unit] + 1, arms });
        }
        Ok(Self { levels, arms })
    }

    /// The profile at position `index` of the lexicographic order.
    pub fn from_index(index: u64, units: usize, arms: u32) -> Self {
        let mut levels = vec![0u32; units];
        let mut rest = index;
        for slot in levels.iter_mut().rev() {
            *slot = (rest % u64::from(arms)) as u32;
            rest /= u64::from(arms);
        }
        Self { levels, arms }
    }

    /// Lexicographic index; `None` when `A^N` overflows `u64`.
    pub fn index(&self) -> Option<u64> {
        self.levels.iter().try_fold(0u64, |acc, &l| acc.checked_mul(u64::from(self.arms))?.checked_add(u64::from(l)))
    }

    pub fn units(&self) -> usize {
        self.levels.len()
    }

    pub fn arms(&self) -> u32 {
        self.arms
    }

    /// 0-based action levels.
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn one_based(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l + 1).collect()
    }

    /// Restriction to the given units, as a lexicographic index into
    /// `[A]^{|units|}`.
    pub fn local_index(&self, units: &[usize]) -> usize {
        units.iter().fold(0usize, |acc, &m| acc * self.arms as usize + self.levels[m] as usize)
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", l + 1)?;
        }
        f.write_str(")")
    }
}

/// A point of `{-1,+1}^p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanVector {
    bits: Vec<i8>,
}

impl BooleanVector {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(Error::param("boolean vector entries must be -1 or +1"));
        }
        Ok(Self { bits })
    }

    pub fn values(&self) -> &[i8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// `v(a)`: MSB-first binary of each 0-based action, mapped through `2b - 1`.
pub fn boolean_encode(profile: &ActionProfile) -> Result<BooleanVector> {
    let width = bits_per_unit(profile.arms)?;
    let mut bits = Vec::with_capacity(width * profile.units());
    for &level in &profile.levels {
        for k in (0..width).rev() {
            bits.push(if (level >> k) & 1 == 1 { 1 } else { -1 });
        }
    }
    Ok(BooleanVector { bits })
}

/// Encoding of profile `index` as a bit word: bit `j` is set iff `v_j = +1`.
///
/// Only valid for `width <= 64`.
#[inline]
pub fn sign_word(index: u64, width: usize) -> u64 {
    debug_assert!(width <= 64);
    if width == 0 {
        0
    } else {
        index.reverse_bits() >> (64 - width)
    }
}

/// `χ_S` evaluated on a sign word, with `S` given as a bit word.
#[inline]
pub fn character_bits(mask: u64, sign_word: u64) -> f64 {
    if (mask & !sign_word).count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A subset `S` of the encoding positions `0..width`.
///
/// The ordering is the canonical one used for every coefficient vector:
/// by cardinality, then lexicographically by the ascending position list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    width: usize,
    words: Vec<u64>,
}

impl SubsetMask {
    pub fn empty(width: usize) -> Self {
        Self { width, words: vec![0; width.div_ceil(64)] }
    }

    pub fn from_positions(width: usize, positions: &[usize]) -> Result<Self> {
        let mut mask = Self::empty(width);
        for &p in positions {
            if p >= width {
                return Err(Error::param(alloc::format!("position {p} outside mask width {width}")));
            }
            mask.words[p / 64] |= 1 << (p % 64);
        }
        Ok(mask)
    }

    /// Mask from a bit word (bit `j` ↔ position `j`); `width <= 64`.
    pub fn from_bits(width: usize, bits: u64) -> Result<Self> {
        if width > 64 || (width < 64 && bits >> width != 0) {
            return Err(Error::param("bit word does not fit the mask width"));
        }
        let mut mask = Self::empty(width);
        if width > 0 {
            mask.words[0] = bits;
        }
        Ok(mask)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The mask as a bit word, when it fits.
    pub fn as_bits(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn contains(&self, position: usize) -> bool {
        position < self.width && (self.words[position / 64] >> (position % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Ascending set positions.
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub fn is_subset_of_positions(&self, allowed: &[usize]) -> bool {
        self.positions().all(|p| allowed.binary_search(&p).is_ok())
    }

    /// Lower-case hex of the mask, most significant word first, no prefix.
    pub fn to_hex(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut out = alloc::string::String::new();
        let mut started = false;
        for &w in self.words.iter().rev() {
            if started {
                let _ = write!(out, "{w:016x}");
            } else if w != 0 {
                let _ = write!(out, "{w:x}");
                started = true;
            }
        }
        if !started {
            out.push('0');
        }
        out
    }

    pub fn from_hex(width: usize, hex: &str) -> Result<Self> {
        let hex = hex.trim_start_matches("0x");
        if hex.is_empty() {
            return Err(Error::param("empty mask"));
        }
        let mut mask = Self::empty(width);
        for (k, c) in hex.bytes().rev().enumerate() {
            let nibble = (c as char)
                .to_digit(16)
                .ok_or_else(|| Error::param(alloc::format!("invalid hex digit in mask {hex:?}")))?
                as u64;
            for b in 0..4 {
                if (nibble >> b) & 1 == 1 {
                    let p = 4 * k + b;
                    if p >= width {
                        return Err(Error::param(alloc::format!("mask {hex} exceeds width {width}")));
                    }
                    mask.words[p / 64] |= 1 << (p % 64);
                }
            }
        }
        Ok(mask)
    }
}

impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.positions().cmp(other.positions()))
            .then_with(|| self.width.cmp(&other.width))
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.positions().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// `χ_S(v) = Π_{i∈S} v_i`.
pub fn character_value(mask: &SubsetMask, v: &BooleanVector) -> Result<i8> {
    if mask.width != v.len() {
        return Err(Error::WidthMismatch { mask: mask.width, vector: v.len() });
    }
    Ok(mask.positions().fold(1i8, |acc, p| acc * v.bits[p]))
}

/// Evaluates `Σ_S θ_S χ_S(v)` from an explicit coefficient list.
pub fn evaluate_sparse(coeffs: &[(SubsetMask, f64)], v: &BooleanVector) -> Result<f64> {
    let mut total = 0.0;
    for (mask, theta) in coeffs {
        total += theta * f64::from(character_value(mask, v)?);
    }
    Ok(total)
}

/// Positions owned by the given units, ascending.
pub fn block_positions(units: &[usize], bits_per_unit: usize) -> Vec<usize> {
    let mut out: Vec<usize> = units.iter().flat_map(|&m| m * bits_per_unit..(m + 1) * bits_per_unit).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Subsets of `{0..k}` as bit words, canonical order, optionally capped at
/// cardinality `max_degree`.
pub(crate) fn local_subsets(k: usize, max_degree: Option<usize>) -> Vec<u64> {
    debug_assert!(k <= 64);
    let top = max_degree.map_or(k, |d| d.min(k));
    let mut out = Vec::new();
    let mut combo: Vec<usize> = Vec::with_capacity(top);
    for size in 0..=top {
        combo.clear();
        combo.extend(0..size);
        loop {
            out.push(combo.iter().fold(0u64, |m, &i| m | 1 << i));
            // Advance to the next combination in lexicographic order.
            let mut i = size;
            while i > 0 && combo[i - 1] == k - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out
}

/// Scatters a local subset word onto global positions.
pub(crate) fn scatter_bits(local: u64, positions: &[usize]) -> u64 {
    let mut word = 0u64;
    let mut rest = local;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        word |= 1 << positions[i];
        rest &= rest - 1;
    }
    word
}

/// All subsets of `indices` (or those of size at most `max_degree`) in
/// canonical order, as masks of the given width.
pub fn enumerate_subsets(indices: &[usize], width: usize, max_degree: Option<usize>) -> Result<Vec<SubsetMask>> {
    enumerate_subsets_capped(indices, width, max_degree, DEFAULT_SUBSET_BITS_CAP)
}

pub fn enumerate_subsets_capped(
    indices: &[usize],
    width: usize,
    max_degree: Option<usize>,
    cap_bits: usize,
) -> Result<Vec<SubsetMask>> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() > cap_bits.min(64) {
        return Err(Error::CapExceeded {
            what: "subset enumeration",
            requested: sorted.len() as u64,
            cap: cap_bits.min(64) as u64,
        });
    }
    local_subsets(sorted.len(), max_degree)
        .into_iter()
        .map(|local| {
            let positions: Vec<usize> =
                (0..sorted.len()).filter(|i| (local >> i) & 1 == 1).map(|i| sorted[i]).collect();
            SubsetMask::from_positions(width, &positions)
        })
        .collect()
}

/// Full Fourier spectrum of a function on `[A]^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    width: usize,
    coeffs: Vec<f64>,
}

impl FourierSpectrum {
    pub fn width(&self) -> usize {
        self.width
    }

    /// `θ_S` for `S` given as a bit word.
    pub fn coefficient_bits(&self, mask: u64) -> f64 {
        self.coeffs[mask as usize]
    }

    pub fn get(&self, mask: &SubsetMask) -> Option<f64> {
        if mask.width != self.width {
            return None;
        }
        mask.as_bits().map(|bits| self.coeffs[bits as usize])
    }

    /// `(mask bits, θ_S)` in increasing bit-word order.
    pub fn iter_bits(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.coeffs.iter().enumerate().map(|(m, &c)| (m as u64, c))
    }

    /// `Σ_S θ_S χ_S(v(a))` at profile `index`.
    pub fn reconstruct(&self, index: u64) -> f64 {
        let sw = sign_word(index, self.width);
        self.iter_bits().map(|(m, c)| c * character_bits(m, sw)).sum()
    }
}

/// `θ_S = A^{-N} Σ_a f(a) χ_S(v(a))` for every `S`, by direct summation.
///
/// `table[i]` is `f` at the profile with lexicographic index `i`.
pub fn fourier_transform(table: &[f64], units: usize, arms: u32) -> Result<FourierSpectrum> {
    fourier_transform_capped(table, units, arms, DEFAULT_PROFILE_CAP)
}

pub fn fourier_transform_capped(table: &[f64], units: usize, arms: u32, cap: u64) -> Result<FourierSpectrum> {
    let width = bits_per_unit(arms)? * units;
    let count = checked_profile_count(units, arms, cap, "fourier transform")?;
    if table.len() as u64 != count {
        return Err(Error::LengthMismatch { expected: count as usize, actual: table.len() });
    }
    let words: Vec<u64> = (0..count).map(|i| sign_word(i, width)).collect();
    let scale = 1.0 / count as f64;
    let coeffs = (0..count)
        .map(|mask| {
            let sum: f64 = table.iter().zip(&words).map(|(f, &sw)| f * character_bits(mask, sw)).sum();
            sum * scale
        })
        .collect();
    Ok(FourierSpectrum { width, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn bv(bits: &[i8]) -> BooleanVector {
        BooleanVector::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn encode_examples() {
        let enc = |a: &[u32], arms| boolean_encode(&ActionProfile::from_one_based(a, arms).unwrap()).unwrap();
        assert_eq!(enc(&[1], 2).values(), &[-1]);
        assert_eq!(enc(&[2], 2).values(), &[1]);
        assert_eq!(enc(&[2, 4], 4).values(), &[-1, 1, 1, 1]);
    }

    #[test]
    fn encode_rejects_bad_input() {
        let p = ActionProfile::from_one_based(&[1, 2], 3).unwrap();
        assert_eq!(boolean_encode(&p), Err(Error::ArmsNotPowerOfTwo(3)));
        assert!(matches!(
            ActionProfile::from_one_based(&[1, 5], 4),
            Err(Error::ActionOutOfRange { unit: 1, action: 5, arms: 4 })
        ));
        assert!(ActionProfile::from_one_based(&[0], 4).is_err());
    }

    #[test]
    fn padding() {
        assert_eq!(pad_action_count(3), 4);
        assert_eq!(pad_action_count(4), 4);
        assert_eq!(pad_action_count(5), 8);
        assert_eq!(pad_action_count(1), 1);
    }

    #[test]
    fn sign_word_matches_encoding() {
        for (units, arms) in [(3usize, 2u32), (2, 4), (2, 8), (1, 1)] {
            let width = bits_per_unit(arms).unwrap() * units;
            for idx in 0..profile_count(units, arms).unwrap() {
                let p = ActionProfile::from_index(idx, units, arms);
                assert_eq!(p.index(), Some(idx));
                let v = boolean_encode(&p).unwrap();
                let sw = sign_word(idx, width);
                for (j, &b) in v.values().iter().enumerate() {
                    assert_eq!((sw >> j) & 1 == 1, b == 1);
                }
            }
        }
    }

    #[test]
    fn character_examples() {
        assert_eq!(character_value(&SubsetMask::empty(2), &bv(&[-1, 1])).unwrap(), 1);
        let s1 = SubsetMask::from_positions(2, &[0]).unwrap();
        assert_eq!(character_value(&s1, &bv(&[-1, 1])).unwrap(), -1);
        let s12 = SubsetMask::from_positions(2, &[0, 1]).unwrap();
        assert_eq!(character_value(&s12, &bv(&[-1, -1])).unwrap(), 1);
        assert!(matches!(character_value(&s1, &bv(&[1])), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn subset_examples() {
        let pos = |m: &SubsetMask| m.positions().collect::<Vec<_>>();
        let all: Vec<_> = enumerate_subsets(&[0, 1], 2, None).unwrap().iter().map(pos).collect();
        assert_eq!(all, vec![vec![], vec![0], vec![1], vec![0, 1]]);
        let capped: Vec<_> = enumerate_subsets(&[0, 1, 2], 3, Some(1)).unwrap().iter().map(pos).collect();
        assert_eq!(capped, vec![vec![], vec![0], vec![1], vec![2]]);
        let empty = enumerate_subsets(&[], 3, None).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty[0].is_empty());
        let big: Vec<usize> = (0..25).collect();
        assert!(matches!(enumerate_subsets(&big, 25, Some(1)), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn canonical_order_is_sorted() {
        let subsets = enumerate_subsets(&[1, 3, 4, 6], 8, None).unwrap();
        assert!(subsets.windows(2).all(|w| w[0] < w[1]));
        let pos: Vec<Vec<usize>> = subsets.iter().map(|m| m.positions().collect()).collect();
        assert_eq!(pos[5], vec![1, 3]);
        assert_eq!(pos[6], vec![1, 4]);
        assert_eq!(pos[7], vec![1, 6]);
        assert_eq!(pos[8], vec![3, 4]);
    }

    #[test]
    fn transform_examples() {
        let spec = fourier_transform(&[0.7; 8], 3, 2).unwrap();
        assert!((spec.coefficient_bits(0) - 0.7).abs() < 1e-15);
        assert!(spec.iter_bits().skip(1).all(|(_, c)| c.abs() < 1e-15));

        // f(a) = v(a)_1 on one binary unit.
        let spec = fourier_transform(&[-1.0, 1.0], 1, 2).unwrap();
        assert_eq!(spec.coefficient_bits(0), 0.0);
        assert_eq!(spec.coefficient_bits(1), 1.0);

        // Indicator of a = (1,1).
        let spec = fourier_transform(&[1.0, 0.0, 0.0, 0.0], 2, 2).unwrap();
        assert_eq!(spec.coefficient_bits(0b00), 0.25);
        assert_eq!(spec.coefficient_bits(0b01), -0.25);
        assert_eq!(spec.coefficient_bits(0b10), -0.25);
        assert_eq!(spec.coefficient_bits(0b11), 0.25);
    }

    #[test]
    fn transform_errors() {
        assert!(matches!(fourier_transform(&[0.0; 3], 2, 2), Err(Error::LengthMismatch { .. })));
        assert!(matches!(fourier_transform_capped(&[0.0; 16], 4, 2, 8), Err(Error::CapExceeded { .. })));
        assert!(matches!(fourier_transform(&[0.0; 9], 2, 3), Err(Error::ArmsNotPowerOfTwo(3))));
    }

    #[test]
    fn hex_round_trip() {
        let m = SubsetMask::from_positions(130, &[0, 5, 64, 129]).unwrap();
        assert_eq!(SubsetMask::from_hex(130, &m.to_hex()).unwrap(), m);
        assert_eq!(SubsetMask::empty(7).to_hex(), "0");
        assert!(SubsetMask::from_hex(4, "10").is_err());
    }

    #[test]
    fn encoding_is_injective() {
        for (units, arms) in [(16usize, 2u32), (8, 4), (4, 16)] {
            let mut seen = HashSet::new();
            for idx in 0..profile_count(units, arms).unwrap() {
                let v = boolean_encode(&ActionProfile::from_index(idx, units, arms)).unwrap();
                assert!(seen.insert(v.values().to_vec()));
            }
        }
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    proptest! {
        #[test]
        fn subset_counts(k in 0usize..12, d in proptest::option::of(0usize..12)) {
            let indices: Vec<usize> = (0..k).map(|i| 2 * i).collect();
            let subsets = enumerate_subsets(&indices, 2 * k + 1, d).unwrap();
            let expected = match d {
                None => 1 << k,
                Some(d) => (0..=d.min(k)).map(|j| binomial(k, j)).sum(),
            };
            prop_assert_eq!(subsets.len(), expected);
            let distinct: HashSet<_> = subsets.iter().cloned().collect();
            prop_assert_eq!(distinct.len(), expected);
        }

        #[test]
        fn orthonormal_characters(width in 0usize..=10, s in any::<u64>(), t in any::<u64>()) {
            let full = if width == 0 { 0 } else { u64::MAX >> (64 - width) };
            let (s, t) = (s & full, t & full);
            let total: i64 = (0..1u64 << width)
                .map(|x| (character_bits(s, x) * character_bits(t, x)) as i64)
                .sum();
            prop_assert_eq!(total, if s == t { 1i64 << width } else { 0 });
        }

        #[test]
        fn transform_round_trip(units in 1usize..=4, log_arms in 0u32..=2, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let arms = 1u32 << log_arms;
            let count = profile_count(units, arms).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let table: Vec<f64> = (0..count).map(|_| rng.random_range(-5.0..5.0)).collect();
            let spec = fourier_transform(&table, units, arms).unwrap();
            for (i, f) in table.iter().enumerate() {
                prop_assert!((spec.reconstruct(i as u64) - f).abs() <= 1e-9);
            }
        }
    }
}

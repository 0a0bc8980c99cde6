//! Variation operators on plain and fixed-weight bitstrings.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub fn weight(bits: &[bool]) -> usize {
    bits.iter().filter(|&&b| b).count()
}

/// Flips one uniformly chosen position.
pub fn flip_mutation(bits: &mut [bool], rng: &mut impl Rng) {
    if bits.is_empty() {
        return;
    }
    let i = rng.gen_range(0..bits.len());
    bits[i] = !bits[i];
}

/// Uniformly permutes the inclusive segment between two positions drawn
/// with replacement. Preserves the Hamming weight.
pub fn shuffle_mutation(bits: &mut [bool], rng: &mut impl Rng) {
    if bits.is_empty() {
        return;
    }
    let a = rng.gen_range(0..bits.len());
    let b = rng.gen_range(0..bits.len());
    let (lo, hi) = (a.min(b), a.max(b));
    bits[lo..=hi].shuffle(rng);
}

/// Simple bit mutation or shuffle mutation, with equal probability.
pub fn mutate_bitstring(bits: &mut [bool], rng: &mut impl Rng) {
    if rng.gen_bool(0.5) {
        flip_mutation(bits, rng);
    } else {
        shuffle_mutation(bits, rng);
    }
}

/// Prefix `[0, cut)` from `p1`, suffix from `p2`.
pub fn one_point_crossover(p1: &[bool], p2: &[bool], cut: usize) -> Vec<bool> {
    p1[..cut].iter().chain(&p2[cut..]).copied().collect()
}

pub fn uniform_crossover(p1: &[bool], p2: &[bool], rng: &mut impl Rng) -> Vec<bool> {
    p1.iter()
        .zip(p2)
        .map(|(&a, &b)| if rng.gen_bool(0.5) { a } else { b })
        .collect()
}

fn check_lengths(p1: &[bool], p2: &[bool]) -> Result<()> {
    if p1.len() != p2.len() {
        return Err(Error::InvalidInput(format!(
            "parent lengths differ: {} vs {}",
            p1.len(),
            p2.len()
        )));
    }
    Ok(())
}

/// One-point (cut uniform in `[1, len-1]`) or uniform crossover, with equal
/// probability.
pub fn crossover_bitstring(p1: &[bool], p2: &[bool], rng: &mut impl Rng) -> Result<Vec<bool>> {
    check_lengths(p1, p2)?;
    if rng.gen_bool(0.5) {
        if p1.len() < 2 {
            return Ok(p1.to_vec());
        }
        let cut = rng.gen_range(1..p1.len());
        Ok(one_point_crossover(p1, p2, cut))
    } else {
        Ok(uniform_crossover(p1, p2, rng))
    }
}

/// Flips one uniformly chosen 1 and one uniformly chosen 0. Identity when
/// the string is all zeros or all ones.
pub fn two_bit_inversion(bits: &mut [bool], rng: &mut impl Rng) {
    let (ones, zeros): (Vec<usize>, Vec<usize>) = (0..bits.len()).partition(|&i| bits[i]);
    if ones.is_empty() || zeros.is_empty() {
        return;
    }
    let i = ones[rng.gen_range(0..ones.len())];
    let j = zeros[rng.gen_range(0..zeros.len())];
    bits[i] = false;
    bits[j] = true;
}

/// Weight-preserving mutation: two-bit inversion or mixing (segment
/// shuffle), with equal probability.
pub fn mutate_wanf(bits: &mut [bool], rng: &mut impl Rng) {
    if rng.gen_bool(0.5) {
        two_bit_inversion(bits, rng);
    } else {
        shuffle_mutation(bits, rng);
    }
}

/// Balanced crossover for parents of equal weight `k`: each gene comes from
/// a uniformly chosen parent until the child holds `k` ones (rest zeros) or
/// `len - k` zeros (rest ones).
pub fn crossover_wanf(p1: &[bool], p2: &[bool], rng: &mut impl Rng) -> Result<Vec<bool>> {
    check_lengths(p1, p2)?;
    let k = weight(p1);
    if weight(p2) != k {
        return Err(Error::InvalidInput(format!(
            "parent weights differ: {k} vs {}",
            weight(p2)
        )));
    }
    let max_zeros = p1.len() - k;
    let (mut ones, mut zeros) = (0, 0);
    let child = p1
        .iter()
        .zip(p2)
        .map(|(&a, &b)| {
            let gene = if ones == k {
                false
            } else if zeros == max_zeros {
                true
            } else if rng.gen_bool(0.5) {
                a
            } else {
                b
            };
            if gene {
                ones += 1;
            } else {
                zeros += 1;
            }
            gene
        })
        .collect();
    Ok(child)
}

/// Uniform bits.
pub fn random_bits(len: usize, rng: &mut impl Rng) -> Vec<bool> {
    (0..len).map(|_| rng.gen_bool(0.5)).collect()
}

/// Uniformly random string of length `len` with exactly `k` ones.
pub fn random_fixed_weight(len: usize, k: usize, rng: &mut impl Rng) -> Vec<bool> {
    debug_assert!(k <= len);
    let mut bits = vec![false; len];
    for i in rand::seq::index::sample(rng, len, k) {
        bits[i] = true;
    }
    bits
}

//! Exact counts and densities of homogeneous bent functions.
//!
//! `density(n, d)` is `|HB(n,d)| / 2^C(n,d)` and `density(n, d, k)` is
//! `|HB(n,d,k)| / C(C(n,d), k)`, where `HB(n,d,k)` are the degree-`d`
//! homogeneous bent functions with exactly `k` ANF terms. Counts come from
//! exhaustive enumeration where it is feasible, from the closed form for
//! quadratics, and from published reference tables otherwise.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::boolfn::{anf_to_truth_table, is_bent, walsh_hadamard, AnfVector};
use crate::encodings::{binomial, MonomialIndex};
use crate::error::{Error, Result};

/// Largest `C(n,d)` for which all `2^C(n,d)` candidates are enumerated.
pub const ENUMERATION_BOUND: usize = 24;

/// Published counts `|HB(8,3,k)|` by number of terms `k` (not recomputed).
pub const CUBIC_N8_REFERENCE: [(usize, u64); 10] = [
    (24, 6_720),
    (27, 13_440),
    (28, 5_760),
    (32, 6_720),
    (34, 13_440),
    (35, 19_200),
    (36, 80_640),
    (37, 67_200),
    (39, 40_320),
    (41, 40_320),
];

/// Published total `|HB(8,3)|`.
pub const CUBIC_N8_TOTAL: u64 = 293_760;

/// Term counts `k` for which cubic homogeneous bent functions in `n`
/// variables are known to exist.
pub fn known_cubic_k_values(n: usize) -> Result<&'static [usize]> {
    match n {
        6 => Ok(&[16]),
        8 => Ok(&[24, 27, 28, 32, 34, 35, 36, 37, 39, 41]),
        10 => Ok(&[39, 49, 53, 57, 58, 61, 65, 66, 69, 70, 72, 75, 78]),
        12 => Ok(&[60, 90, 100, 110, 130, 140, 150]),
        16 => Ok(&[168]),
        _ => Err(Error::UnknownData(format!(
            "no known cubic term counts for n = {n}"
        ))),
    }
}

/// `|HB(n,2)| = 2^(h^2 - h) * prod_{i<h} (2^(2i+1) - 1)` with `h = n/2`.
pub fn quadratic_bent_count(n: usize) -> Result<BigUint> {
    if n % 2 == 1 || n < 2 {
        return Err(Error::InvalidInput(format!(
            "quadratic bent functions need even n >= 2, got {n}"
        )));
    }
    let h = n / 2;
    let mut count = BigUint::one() << (h * h - h);
    for i in 0..h {
        count *= (BigUint::one() << (2 * i + 1)) - 1u32;
    }
    Ok(count)
}

/// `prod_{i<terms} (1 - (1/2)(1/4)^i)`, the partial q-Pochhammer product
/// `(1/2; 1/4)_terms` that `density(n, 2)` approaches as `n` grows.
pub fn asymptotic_quadratic_density(terms: usize) -> f64 {
    (0..terms).fold(1.0, |acc, i| acc * (1.0 - 0.5 * 0.25f64.powi(i as i32)))
}

/// Classical rank criterion: a quadratic form is bent iff its symplectic
/// matrix over GF(2) is nonsingular.
pub fn quadratic_bent_oracle(anf: &AnfVector) -> Result<bool> {
    let n = anf.n();
    let mut rows = vec![0u32; n];
    for a in anf.ones() {
        if a.count_ones() != 2 {
            return Err(Error::InvalidInput(format!(
                "monomial {} is not quadratic",
                crate::boolfn::monomial_name(n, a)
            )));
        }
        let p = a.trailing_zeros() as usize;
        let q = (usize::BITS - 1 - a.leading_zeros()) as usize;
        rows[p] |= 1 << q;
        rows[q] |= 1 << p;
    }
    Ok(gf2_rank(&mut rows) == n)
}

fn gf2_rank(rows: &mut [u32]) -> usize {
    let mut rank = 0;
    for bit in 0..32 {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && *row >> bit & 1 == 1 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
    }
    rank
}

fn decode_candidate(index: &MonomialIndex, candidate: u64) -> AnfVector {
    AnfVector::from_monomials(
        index.n(),
        (0..index.len())
            .filter(|&i| candidate >> i & 1 == 1)
            .map(|i| index.masks()[i]),
    )
}

/// All bent functions among the degree-`d` homogeneous functions of `n`
/// variables (optionally only those with `k` terms), in ascending order of
/// the reduced-ANF candidate integer (bit `i` selects the `i`-th monomial).
pub fn enumerate_homogeneous_bent(
    n: usize,
    d: usize,
    k_filter: Option<usize>,
) -> Result<Vec<AnfVector>> {
    let index = MonomialIndex::new(n, d)?;
    let terms = index.len();
    if terms > ENUMERATION_BOUND {
        return Err(Error::InfeasibleEnumeration {
            terms,
            bound: ENUMERATION_BOUND,
        });
    }
    if n % 2 == 1 {
        return Ok(Vec::new());
    }
    const CHUNK: u64 = 1 << 12;
    let total = 1u64 << terms;
    let chunks: Vec<Vec<AnfVector>> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            (start..(start + CHUNK).min(total))
                .filter(|&cand| k_filter.is_none_or(|k| cand.count_ones() as usize == k))
                .map(|cand| decode_candidate(&index, cand))
                .filter(|anf| is_bent(&walsh_hadamard(&anf_to_truth_table(anf))))
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Where the counts of a [`DensityReport`] come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountSource {
    Enumerated,
    ClosedForm,
    PublishedReference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TermDensity {
    pub count: BigUint,
    /// `C(C(n,d), k)`.
    pub denominator: BigUint,
}

impl TermDensity {
    pub fn density(&self) -> BigRational {
        ratio(&self.count, &self.denominator)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub n: usize,
    pub d: usize,
    pub source: CountSource,
    pub total_count: BigUint,
    /// `2^C(n,d)`.
    pub denominator: BigUint,
    /// Nonzero counts only; empty when counts per `k` are unavailable.
    pub by_terms: BTreeMap<usize, TermDensity>,
}

fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

fn big_binomial(n: usize, k: usize) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Six decimals for values at least `1e-3`, six significant digits otherwise.
pub fn render_decimal(value: &BigRational) -> String {
    let v = value.to_f64().unwrap_or(f64::NAN);
    if v == 0.0 || v.abs() >= 1e-3 {
        format!("{v:.6}")
    } else {
        format!("{v:.5e}")
    }
}

impl DensityReport {
    pub fn density(&self) -> BigRational {
        ratio(&self.total_count, &self.denominator)
    }

    /// Columns `k, count, density_numerator, density_denominator, density_decimal`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,count,density_numerator,density_denominator,density_decimal\n");
        for (k, t) in &self.by_terms {
            let _ = writeln!(
                out,
                "{k},{},{},{},{}",
                t.count,
                t.count,
                t.denominator,
                render_decimal(&t.density())
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let terms = binomial(self.n, self.d);
        let mut out = String::new();
        let _ = writeln!(out, "homogeneous bent functions: n = {}, d = {}", self.n, self.d);
        let source = match self.source {
            CountSource::Enumerated => format!("exhaustive enumeration of 2^{terms} candidates"),
            CountSource::ClosedForm => "closed-form quadratic count".to_string(),
            CountSource::PublishedReference => "published reference, not recomputed".to_string(),
        };
        let _ = writeln!(out, "source: {source}");
        let _ = writeln!(out, "total: {}", self.total_count);
        let _ = writeln!(
            out,
            "density: {} / 2^{terms} = {}",
            self.total_count,
            render_decimal(&self.density())
        );
        if !self.by_terms.is_empty() {
            let _ = writeln!(out, "{:>4} {:>12} {:>14}", "k", "count", "density");
            for (k, t) in &self.by_terms {
                let _ = writeln!(out, "{k:>4} {:>12} {:>14}", t.count, render_decimal(&t.density()));
            }
        }
        out
    }
}

/// Counts and densities for `(n, d)`: by enumeration when `C(n,d)` is within
/// [`ENUMERATION_BOUND`], otherwise totals only from the quadratic closed form.
pub fn density_report(n: usize, d: usize) -> Result<DensityReport> {
    let terms = MonomialIndex::new(n, d)?.len();
    let denominator = BigUint::one() << terms;
    if terms <= ENUMERATION_BOUND {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for anf in enumerate_homogeneous_bent(n, d, None)? {
            *counts.entry(anf.monomial_count()).or_default() += 1;
        }
        let total: u64 = counts.values().sum();
        let by_terms = counts
            .into_iter()
            .map(|(k, c)| {
                (
                    k,
                    TermDensity {
                        count: BigUint::from(c),
                        denominator: big_binomial(terms, k),
                    },
                )
            })
            .collect();
        return Ok(DensityReport {
            n,
            d,
            source: CountSource::Enumerated,
            total_count: BigUint::from(total),
            denominator,
            by_terms,
        });
    }
    if d == 2 && n.is_multiple_of(2) {
        return Ok(DensityReport {
            n,
            d,
            source: CountSource::ClosedForm,
            total_count: quadratic_bent_count(n)?,
            denominator,
            by_terms: BTreeMap::new(),
        });
    }
    Err(Error::InfeasibleEnumeration {
        terms,
        bound: ENUMERATION_BOUND,
    })
}

/// The published cubic `n = 8` counts as a report.
pub fn cubic_n8_reference() -> DensityReport {
    let terms = binomial(8, 3);
    DensityReport {
        n: 8,
        d: 3,
        source: CountSource::PublishedReference,
        total_count: BigUint::from(CUBIC_N8_TOTAL),
        denominator: BigUint::one() << terms,
        by_terms: CUBIC_N8_REFERENCE
            .iter()
            .map(|&(k, c)| {
                (
                    k,
                    TermDensity {
                        count: BigUint::from(c),
                        denominator: big_binomial(terms, k),
                    },
                )
            })
            .collect(),
    }
}

/// Exact `|HB(n,2)| / 2^C(n,2)`.
pub fn quadratic_density(n: usize) -> Result<BigRational> {
    let count = quadratic_bent_count(n)?;
    Ok(ratio(&count, &(BigUint::one() << binomial(n, 2))))
}

/// Exact `prod_{i < n/2} (1 - 2^-(2i+1))`.
pub fn quadratic_density_product(n: usize) -> BigRational {
    (0..n / 2).fold(BigRational::one(), |acc, i| {
        let half = BigRational::new(BigInt::one(), BigInt::one() << (2 * i + 1));
        acc * (BigRational::one() - half)
    })
}

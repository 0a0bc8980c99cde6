//! Truth tables, algebraic normal forms and Walsh–Hadamard spectra of
//! n-variable Boolean functions.
//!
//! Input vectors `(x1, ..., xn)` map to the integer `sum x_j * 2^(n-j)`, so
//! `x1` is the most significant bit. The same convention indexes ANF
//! monomial masks and spectrum entries. Tables are bit-packed into `u64`
//! words: bit `i` of the table is bit `i % 64` of word `i / 64`. For
//! `n < 6` the single word only uses its low `2^n` bits and the remaining
//! bits are always zero.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported variable count.
pub const MAX_VARS: usize = 16;

/// In-word masks selecting the positions whose index bit `s` is clear.
const LOW_HALF_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Packed bit vector of length `2^n`, shared by truth tables and ANF vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
struct BitTable {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

/// Mask of the valid bits in each word for `n` variables.
pub(crate) fn valid_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

fn check_vars(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::InvalidInput(format!(
            "variable count must be in 1..={MAX_VARS}, got {n}"
        )));
    }
    Ok(())
}

impl BitTable {
    fn zero(n: usize) -> Self {
        assert!(
            (1..=MAX_VARS).contains(&n),
            "variable count must be in 1..={MAX_VARS}, got {n}"
        );
        BitTable {
            n,
            words: vec![0; word_count(n)],
        }
    }

    fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        check_vars(n)?;
        if words.len() != word_count(n) {
            return Err(Error::InvalidInput(format!(
                "expected {} words for n = {n}, got {}",
                word_count(n),
                words.len()
            )));
        }
        if n < 6 && words[0] & !valid_mask(n) != 0 {
            return Err(Error::InvalidInput(format!(
                "bits set beyond index 2^{n} - 1"
            )));
        }
        Ok(BitTable { n, words })
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        debug_assert!(i < 1 << self.n);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < 1 << self.n);
        let bit = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    fn to_hex(&self) -> String {
        let digits = if self.n >= 2 { 1 << (self.n - 2) } else { 1 };
        let mut out = String::with_capacity(digits);
        for j in (0..digits).rev() {
            let bit = 4 * j;
            let nibble = (self.words[bit >> 6] >> (bit & 63)) & 0xf;
            out.push(char::from_digit(nibble as u32, 16).expect("nibble < 16"));
        }
        out
    }

    fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        let digits = s.len();
        if digits == 0 || !digits.is_power_of_two() {
            return Err(Error::Parse {
                position: 0,
                message: format!("hex length {digits} is not a power of two"),
            });
        }
        let n = digits.trailing_zeros() as usize + 2;
        if n > MAX_VARS {
            return Err(Error::Parse {
                position: 0,
                message: format!("hex length {digits} exceeds 2^{MAX_VARS} bits"),
            });
        }
        let mut table = BitTable::zero(n);
        for (pos, ch) in s.chars().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(|| Error::Parse {
                position: pos,
                message: format!("invalid hex digit {ch:?}"),
            })? as u64;
            let bit = 4 * (digits - 1 - pos);
            table.words[bit >> 6] |= nibble << (bit & 63);
        }
        Ok(table)
    }
}

/// In-place binary Möbius transform on a packed table; an involution.
pub(crate) fn mobius_in_place(words: &mut [u64], n: usize) {
    for (s, &mask) in LOW_HALF_MASKS.iter().enumerate().take(n.min(6)) {
        let shift = 1 << s;
        for w in words.iter_mut() {
            *w ^= (*w & mask) << shift;
        }
    }
    let len = words.len();
    let mut step = 1;
    while step < len {
        for block in (0..len).step_by(2 * step) {
            for i in block..block + step {
                words[i + step] ^= words[i];
            }
        }
        step <<= 1;
    }
}

/// Mask table with bit `a` set iff `wt(a) == d`.
pub(crate) fn degree_mask_words(n: usize, d: usize) -> Vec<u64> {
    let mut words = vec![0u64; word_count(n)];
    for a in 0..1usize << n {
        if a.count_ones() as usize == d {
            words[a >> 6] |= 1 << (a & 63);
        }
    }
    words
}

/// The output column of a Boolean function in lexicographic input order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable(BitTable);

/// ANF coefficients `h(a)`, indexed by monomial mask.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AnfVector(BitTable);

macro_rules! table_common {
    ($ty:ident) => {
        impl $ty {
            /// All-zero table over `n` variables. Panics if `n` is outside `1..=16`.
            pub fn zero(n: usize) -> Self {
                $ty(BitTable::zero(n))
            }

            /// Builds a table from packed words (`2^(n-6)` words, or one word for `n <= 6`).
            pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
                BitTable::from_words(n, words).map($ty)
            }

            /// Builds a table from exactly `2^n` bits.
            pub fn from_bits(n: usize, bits: &[bool]) -> Result<Self> {
                check_vars(n)?;
                if bits.len() != 1 << n {
                    return Err(Error::InvalidInput(format!(
                        "expected {} bits for n = {n}, got {}",
                        1usize << n,
                        bits.len()
                    )));
                }
                let mut t = BitTable::zero(n);
                for (i, &b) in bits.iter().enumerate() {
                    if b {
                        t.set(i, true);
                    }
                }
                Ok($ty(t))
            }

            pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Self {
                let mut t = BitTable::zero(n);
                for i in 0..1usize << n {
                    if f(i) {
                        t.set(i, true);
                    }
                }
                $ty(t)
            }

            pub fn n(&self) -> usize {
                self.0.n
            }

            /// Number of entries, `2^n`.
            pub fn len(&self) -> usize {
                1 << self.0.n
            }

            pub fn is_empty(&self) -> bool {
                false
            }

            pub fn get(&self, i: usize) -> bool {
                self.0.get(i)
            }

            pub fn set(&mut self, i: usize, value: bool) {
                self.0.set(i, value)
            }

            pub fn words(&self) -> &[u64] {
                &self.0.words
            }

            pub fn bits(&self) -> Vec<bool> {
                (0..self.len()).map(|i| self.get(i)).collect()
            }

            /// Indices of the set entries, ascending.
            pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
                self.0.ones()
            }

            pub fn is_zero(&self) -> bool {
                self.0.words.iter().all(|&w| w == 0)
            }

            /// Lowercase hex, most significant nibble first; bit `i` of the
            /// table is bit `i` of the hex integer.
            pub fn to_hex(&self) -> String {
                self.0.to_hex()
            }

            /// Parses the format written by [`Self::to_hex`]; `n` is implied
            /// by the string length.
            pub fn from_hex(s: &str) -> Result<Self> {
                BitTable::from_hex(s).map($ty)
            }
        }
    };
}

table_common!(TruthTable);
table_common!(AnfVector);

impl TruthTable {
    /// Hamming weight of the output column.
    pub fn weight(&self) -> usize {
        self.0.weight()
    }

    /// Truth table of the single variable `x_j` (1-based).
    pub fn variable(n: usize, j: usize) -> Self {
        assert!((1..=n).contains(&j), "variable x{j} out of range for n = {n}");
        let pos = n - j;
        TruthTable::from_fn(n, |i| (i >> pos) & 1 == 1)
    }

    fn words_mut(&mut self) -> &mut [u64] {
        &mut self.0.words
    }
}

impl AnfVector {
    /// Builds the ANF with the given monomial masks set (duplicates cancel).
    pub fn from_monomials(n: usize, masks: impl IntoIterator<Item = usize>) -> Self {
        let mut t = BitTable::zero(n);
        for a in masks {
            let cur = t.get(a);
            t.set(a, !cur);
        }
        AnfVector(t)
    }

    /// Number of monomials with a nonzero coefficient.
    pub fn monomial_count(&self) -> usize {
        self.0.weight()
    }

    /// Keeps only the coefficients selected by a precomputed degree mask.
    pub(crate) fn retain_mask(&mut self, mask: &[u64]) {
        for (w, m) in self.0.words.iter_mut().zip(mask) {
            *w &= m;
        }
    }

    /// Human-readable form, e.g. `x1*x2 + x3*x4*x5`, terms sorted by mask
    /// value. The zero function is `0` and the constant monomial is `1`.
    pub fn to_monomial_string(&self) -> String {
        let terms: Vec<String> = self.ones().map(|a| monomial_name(self.n(), a)).collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }

    /// Parses the monomial form written by [`Self::to_monomial_string`].
    /// Repeated terms cancel, as addition is over GF(2).
    pub fn parse_monomials(n: usize, s: &str) -> Result<Self> {
        check_vars(n)?;
        let mut anf = AnfVector::zero(n);
        let mut offset = 0;
        for term in s.split('+') {
            let term_start = offset + (term.len() - term.trim_start().len());
            offset += term.len() + 1;
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Parse {
                    position: term_start,
                    message: "empty term".into(),
                });
            }
            if term == "0" {
                continue;
            }
            let mut mask = 0usize;
            let mut factor_offset = term_start;
            for factor in term.split('*') {
                let pos = factor_offset + (factor.len() - factor.trim_start().len());
                factor_offset += factor.len() + 1;
                let factor = factor.trim();
                if factor == "1" {
                    continue;
                }
                let var = factor
                    .strip_prefix('x')
                    .and_then(|v| v.parse::<usize>().ok())
                    .filter(|v| (1..=n).contains(v))
                    .ok_or_else(|| Error::Parse {
                        position: pos,
                        message: format!("expected a variable x1..x{n}, found {factor:?}"),
                    })?;
                mask |= 1 << (n - var);
            }
            let cur = anf.get(mask);
            anf.set(mask, !cur);
        }
        Ok(anf)
    }
}

/// Name of a single monomial, `1` for the empty mask.
pub fn monomial_name(n: usize, mask: usize) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    (1..=n)
        .filter(|&j| (mask >> (n - j)) & 1 == 1)
        .map(|j| format!("x{j}"))
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, {})", self.n(), self.to_hex())
    }
}

impl fmt::Debug for AnfVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnfVector(n={}, {})", self.n(), self.to_monomial_string())
    }
}

impl fmt::Display for AnfVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_monomial_string())
    }
}

/// Walsh–Hadamard coefficients `W_f(a)` for every `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    n: usize,
    values: Vec<i32>,
}

impl WalshSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn max_abs(&self) -> u32 {
        self.values
            .iter()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

/// ANF coefficients of a truth table.
pub fn mobius_transform(tt: &TruthTable) -> AnfVector {
    let mut t = tt.0.clone();
    mobius_in_place(&mut t.words, t.n);
    AnfVector(t)
}

/// Truth table of an ANF vector (the same butterfly, since it is an involution).
pub fn anf_to_truth_table(anf: &AnfVector) -> TruthTable {
    let mut t = anf.0.clone();
    mobius_in_place(&mut t.words, t.n);
    TruthTable(t)
}

/// Walsh–Hadamard spectrum via the fast butterfly on the `(-1)^f` signs.
pub fn walsh_hadamard(tt: &TruthTable) -> WalshSpectrum {
    let n = tt.n();
    let len = 1usize << n;
    let mut values: Vec<i32> = (0..len).map(|i| 1 - 2 * tt.get(i) as i32).collect();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            let (lo, hi) = values[block..block + 2 * h].split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*u, *v);
                *u = a + b;
                *v = a - b;
            }
        }
        h <<= 1;
    }
    WalshSpectrum { n, values }
}

/// `2^(n-1) - max|W| / 2`.
pub fn nonlinearity(spec: &WalshSpectrum) -> u32 {
    (1u32 << (spec.n - 1)) - spec.max_abs() / 2
}

/// Covering-radius bound `2^(n-1) - 2^(n/2-1)` on nonlinearity, for even `n`.
pub fn bent_nonlinearity(n: usize) -> Option<u32> {
    if n.is_multiple_of(2) && n >= 2 {
        Some((1u32 << (n - 1)) - (1u32 << (n / 2 - 1)))
    } else {
        None
    }
}

/// Every entry has `|W(a)| = 2^(n/2)`. Always false for odd `n`.
pub fn is_bent(spec: &WalshSpectrum) -> bool {
    if spec.n % 2 == 1 {
        return false;
    }
    let target = 1u32 << (spec.n / 2);
    spec.values.iter().all(|v| v.unsigned_abs() == target)
}

/// Largest monomial weight; 0 for the constant functions including zero.
pub fn algebraic_degree(anf: &AnfVector) -> usize {
    anf.ones().map(|a| a.count_ones() as usize).max().unwrap_or(0)
}

/// True iff `anf` has at least one monomial and all of them have weight `d`.
pub fn is_homogeneous(anf: &AnfVector, d: usize) -> bool {
    let mut any = false;
    for a in anf.ones() {
        if a.count_ones() as usize != d {
            return false;
        }
        any = true;
    }
    any
}

/// Clears every coefficient whose monomial does not have weight `d`.
pub fn homogeneity_repair(anf: &AnfVector, d: usize) -> AnfVector {
    let mut out = anf.clone();
    out.retain_mask(&degree_mask_words(anf.n(), d));
    out
}

pub fn monomial_count(anf: &AnfVector) -> usize {
    anf.monomial_count()
}

/// Precomputed weight-`d` mask, for repeated homogeneity repair at fixed `(n, d)`.
#[derive(Clone, Debug)]
pub struct DegreeFilter {
    n: usize,
    d: usize,
    mask: Vec<u64>,
}

impl DegreeFilter {
    pub fn new(n: usize, d: usize) -> Self {
        DegreeFilter {
            n,
            d,
            mask: degree_mask_words(n, d),
        }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Raw truth table to corrected `(truth table, ANF)`.
    pub fn repair_truth_table(&self, mut tt: TruthTable) -> (TruthTable, AnfVector) {
        debug_assert_eq!(tt.n(), self.n);
        let n = tt.n();
        let words = tt.words_mut();
        mobius_in_place(words, n);
        for (w, m) in words.iter_mut().zip(&self.mask) {
            *w &= m;
        }
        let anf = AnfVector(tt.0.clone());
        mobius_in_place(&mut tt.0.words, n);
        (tt, anf)
    }
}

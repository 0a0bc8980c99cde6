//! Genotype encodings: GP trees, truth-table bitstrings, reduced-ANF
//! bitstrings and fixed-weight (weighted) ANF bitstrings.
//!
//! Every encoding decodes to a function whose ANF is homogeneous of the
//! target degree `d` or identically zero.

pub mod bitstring;
pub mod gp;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{anf_to_truth_table, AnfVector, DegreeFilter, TruthTable};
use crate::error::{Error, Result};
pub use gp::{GpConfig, GpNode, GpOp, GpTree};

/// `C(n, k)` for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The weight-`d` monomial masks of `n` variables in increasing mask order;
/// position `i` of a reduced-ANF bitstring refers to `masks()[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIndex {
    n: usize,
    d: usize,
    masks: Vec<usize>,
}

impl MonomialIndex {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || n > crate::boolfn::MAX_VARS || d > n {
            return Err(Error::InvalidInput(format!(
                "need 1 <= n <= 16 and d <= n, got n = {n}, d = {d}"
            )));
        }
        let masks = (0..1usize << n)
            .filter(|a| a.count_ones() as usize == d)
            .collect();
        Ok(MonomialIndex { n, d, masks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[usize] {
        &self.masks
    }

    /// Full ANF vector with the selected monomials set.
    pub fn expand(&self, bits: &[bool]) -> AnfVector {
        debug_assert_eq!(bits.len(), self.masks.len());
        let mut anf = AnfVector::zero(self.n);
        for (&b, &mask) in bits.iter().zip(&self.masks) {
            if b {
                anf.set(mask, true);
            }
        }
        anf
    }

    /// Inverse of [`Self::expand`] on degree-`d` homogeneous vectors.
    pub fn compress(&self, anf: &AnfVector) -> Vec<bool> {
        self.masks.iter().map(|&m| anf.get(m)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Gp,
    Tt,
    Ranf,
    Wanf,
}

impl Encoding {
    /// Column label used in success tables.
    pub fn label(self) -> &'static str {
        match self {
            Encoding::Gp => "GP",
            Encoding::Tt => "TT",
            Encoding::Ranf => "rANF",
            Encoding::Wanf => "wANF",
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Gp => "gp",
            Encoding::Tt => "tt",
            Encoding::Ranf => "ranf",
            Encoding::Wanf => "wanf",
        })
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gp" => Ok(Encoding::Gp),
            "tt" => Ok(Encoding::Tt),
            "ranf" => Ok(Encoding::Ranf),
            "wanf" => Ok(Encoding::Wanf),
            other => Err(Error::InvalidInput(format!("unknown encoding {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtBitstring {
    pub n: usize,
    pub bits: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RanfBitstring {
    pub index: Arc<MonomialIndex>,
    pub bits: Vec<bool>,
}

/// Reduced-ANF bitstring whose weight is pinned to `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WanfBitstring {
    index: Arc<MonomialIndex>,
    k: usize,
    bits: Vec<bool>,
}

impl WanfBitstring {
    pub fn new(index: Arc<MonomialIndex>, k: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != index.len() {
            return Err(Error::InvalidInput(format!(
                "wANF length {} differs from C(n,d) = {}",
                bits.len(),
                index.len()
            )));
        }
        if bitstring::weight(&bits) != k {
            return Err(Error::InvalidInput(format!(
                "wANF weight {} differs from k = {k}",
                bitstring::weight(&bits)
            )));
        }
        Ok(WanfBitstring { index, k, bits })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn index(&self) -> &MonomialIndex {
        &self.index
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Genotype {
    Gp(GpTree),
    Tt(TtBitstring),
    Ranf(RanfBitstring),
    Wanf(WanfBitstring),
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl Genotype {
    pub fn encoding(&self) -> Encoding {
        match self {
            Genotype::Gp(_) => Encoding::Gp,
            Genotype::Tt(_) => Encoding::Tt,
            Genotype::Ranf(_) => Encoding::Ranf,
            Genotype::Wanf(_) => Encoding::Wanf,
        }
    }

    /// Text form: `0`/`1` strings for bitstrings, prefix s-expressions for trees.
    pub fn serialize(&self) -> String {
        match self {
            Genotype::Gp(t) => t.to_string(),
            Genotype::Tt(g) => bits_to_string(&g.bits),
            Genotype::Ranf(g) => bits_to_string(&g.bits),
            Genotype::Wanf(g) => bits_to_string(&g.bits),
        }
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Evaluates the tree and forces homogeneity of degree `d` through the ANF.
pub fn decode_gp(tree: &GpTree, n: usize, d: usize) -> (TruthTable, AnfVector) {
    DegreeFilter::new(n, d).repair_truth_table(tree.truth_table(n))
}

pub fn decode_tt(g: &TtBitstring, d: usize) -> (TruthTable, AnfVector) {
    let tt = TruthTable::from_bits(g.n, &g.bits).expect("TT genotype has 2^n bits");
    DegreeFilter::new(g.n, d).repair_truth_table(tt)
}

pub fn decode_ranf(g: &RanfBitstring) -> (TruthTable, AnfVector) {
    let anf = g.index.expand(&g.bits);
    (anf_to_truth_table(&anf), anf)
}

/// Panics if the weight invariant has been broken, which would mean a
/// variation operator is defective.
pub fn decode_wanf(g: &WanfBitstring) -> (TruthTable, AnfVector) {
    assert_eq!(
        bitstring::weight(&g.bits),
        g.k,
        "wANF weight invariant violated"
    );
    let anf = g.index.expand(&g.bits);
    (anf_to_truth_table(&anf), anf)
}

/// An encoding bound to a concrete problem `(n, d, k)`: produces random
/// genotypes, applies that encoding's operators, and decodes.
#[derive(Clone, Debug)]
pub struct Representation {
    encoding: Encoding,
    n: usize,
    d: usize,
    k: Option<usize>,
    index: Arc<MonomialIndex>,
    filter: DegreeFilter,
    gp: GpConfig,
}

impl Representation {
    pub fn new(
        encoding: Encoding,
        n: usize,
        d: usize,
        k: Option<usize>,
        gp: GpConfig,
    ) -> Result<Self> {
        let index = Arc::new(MonomialIndex::new(n, d)?);
        if encoding == Encoding::Wanf && k.is_none() {
            return Err(Error::InvalidInput("wANF encoding requires k".into()));
        }
        if let Some(k) = k {
            if k > index.len() {
                return Err(Error::InvalidInput(format!(
                    "k = {k} exceeds C({n},{d}) = {}",
                    index.len()
                )));
            }
        }
        if encoding == Encoding::Gp && (gp.init_min_depth > gp.init_max_depth || gp.init_max_depth > gp.max_depth) {
            return Err(Error::InvalidInput(format!(
                "GP depths must satisfy init_min <= init_max <= max, got {gp:?}"
            )));
        }
        Ok(Representation {
            encoding,
            n,
            d,
            k,
            index,
            filter: DegreeFilter::new(n, d),
            gp,
        })
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn index(&self) -> &Arc<MonomialIndex> {
        &self.index
    }

    pub fn random(&self, rng: &mut impl Rng) -> Genotype {
        match self.encoding {
            Encoding::Gp => Genotype::Gp(gp::random_tree(self.n, &self.gp, rng)),
            Encoding::Tt => Genotype::Tt(TtBitstring {
                n: self.n,
                bits: bitstring::random_bits(1 << self.n, rng),
            }),
            Encoding::Ranf => Genotype::Ranf(RanfBitstring {
                index: self.index.clone(),
                bits: bitstring::random_bits(self.index.len(), rng),
            }),
            Encoding::Wanf => {
                let k = self.k.expect("checked at construction");
                Genotype::Wanf(WanfBitstring {
                    index: self.index.clone(),
                    k,
                    bits: bitstring::random_fixed_weight(self.index.len(), k, rng),
                })
            }
        }
    }

    /// The encoding's crossover, producing one child.
    pub fn crossover(&self, p1: &Genotype, p2: &Genotype, rng: &mut impl Rng) -> Result<Genotype> {
        Ok(match (p1, p2) {
            (Genotype::Gp(a), Genotype::Gp(b)) => Genotype::Gp(gp::crossover(a, b, &self.gp, rng)),
            (Genotype::Tt(a), Genotype::Tt(b)) => Genotype::Tt(TtBitstring {
                n: a.n,
                bits: bitstring::crossover_bitstring(&a.bits, &b.bits, rng)?,
            }),
            (Genotype::Ranf(a), Genotype::Ranf(b)) => Genotype::Ranf(RanfBitstring {
                index: a.index.clone(),
                bits: bitstring::crossover_bitstring(&a.bits, &b.bits, rng)?,
            }),
            (Genotype::Wanf(a), Genotype::Wanf(b)) => Genotype::Wanf(WanfBitstring {
                index: a.index.clone(),
                k: a.k,
                bits: bitstring::crossover_wanf(&a.bits, &b.bits, rng)?,
            }),
            _ => {
                return Err(Error::InvalidInput(
                    "crossover between different encodings".into(),
                ))
            }
        })
    }

    /// The encoding's mutation, applied unconditionally.
    pub fn mutate(&self, g: &mut Genotype, rng: &mut impl Rng) {
        match g {
            Genotype::Gp(t) => *t = gp::subtree_mutation(t, self.n, &self.gp, rng),
            Genotype::Tt(b) => bitstring::mutate_bitstring(&mut b.bits, rng),
            Genotype::Ranf(b) => bitstring::mutate_bitstring(&mut b.bits, rng),
            Genotype::Wanf(b) => bitstring::mutate_wanf(&mut b.bits, rng),
        }
    }

    /// Corrected `(truth table, ANF)` of a genotype.
    pub fn decode(&self, g: &Genotype) -> (TruthTable, AnfVector) {
        match g {
            Genotype::Gp(t) => self.filter.repair_truth_table(t.truth_table(self.n)),
            Genotype::Tt(b) => self
                .filter
                .repair_truth_table(TruthTable::from_bits(self.n, &b.bits).expect("2^n bits")),
            Genotype::Ranf(b) => decode_ranf(b),
            Genotype::Wanf(b) => decode_wanf(b),
        }
    }
}

/// One random genotype of the given encoding.
pub fn random_genotype(
    encoding: Encoding,
    n: usize,
    d: usize,
    k: Option<usize>,
    rng: &mut impl Rng,
    config: &GpConfig,
) -> Result<Genotype> {
    Ok(Representation::new(encoding, n, d, k, config.clone())?.random(rng))
}

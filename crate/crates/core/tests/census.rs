use std::collections::BTreeMap;

use hbent::census::{
    density_report, enumerate_homogeneous_bent, quadratic_bent_count, quadratic_bent_oracle,
    quadratic_density, quadratic_density_product, CountSource,
};
use hbent::encodings::{binomial, MonomialIndex};
use hbent::{anf_to_truth_table, is_bent, walsh_hadamard, AnfVector, Error};
use num_bigint::BigUint;

/// Rank of the symplectic matrix of a quadratic form, by plain elimination.
fn symplectic_rank(n: usize, masks: &[usize]) -> usize {
    let mut rows: Vec<u64> = vec![0; n];
    for &m in masks {
        let bits: Vec<usize> = (0..n).filter(|b| m >> b & 1 == 1).collect();
        rows[bits[0]] ^= 1 << bits[1];
        rows[bits[1]] ^= 1 << bits[0];
    }
    let mut rank = 0;
    for col in 0..n {
        if let Some(p) = (rank..n).find(|&r| rows[r] >> col & 1 == 1) {
            rows.swap(rank, p);
            for r in 0..n {
                if r != rank && rows[r] >> col & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

#[test]
fn quadratic_n6_counts_per_term_count() {
    let index = MonomialIndex::new(6, 2).unwrap();
    let mut expected: BTreeMap<usize, u64> = BTreeMap::new();
    for cand in 0u32..1 << 15 {
        let masks: Vec<usize> = (0..15).filter(|i| cand >> i & 1 == 1).map(|i| index.masks()[i]).collect();
        if symplectic_rank(6, &masks) == 6 {
            *expected.entry(masks.len()).or_default() += 1;
        }
    }
    let report = density_report(6, 2).unwrap();
    let got: BTreeMap<usize, u64> = report
        .by_terms
        .iter()
        .map(|(&k, t)| (k, t.count.to_string().parse().unwrap()))
        .collect();
    assert_eq!(got, expected);
    assert_eq!(
        expected,
        BTreeMap::from([
            (3, 15), (4, 180), (5, 900), (6, 2280), (7, 3075), (8, 3000),
            (9, 2400), (10, 1272), (11, 525), (12, 180), (13, 60), (15, 1)
        ])
    );
    for (&k, t) in &report.by_terms {
        assert_eq!(t.denominator, BigUint::from(binomial(15, k)));
    }
}

#[test]
fn closed_form_matches_enumeration() {
    for n in [2usize, 4, 6] {
        let enumerated = enumerate_homogeneous_bent(n, 2, None).unwrap().len();
        assert_eq!(quadratic_bent_count(n).unwrap(), BigUint::from(enumerated), "n={n}");
        let density = quadratic_density(n).unwrap();
        assert_eq!(density, quadratic_density_product(n), "n={n}");
    }
    assert_eq!(quadratic_bent_count(8).unwrap(), BigUint::from(112_881_664u64));
}

#[test]
fn rank_oracle_agrees_with_walsh() {
    let index = MonomialIndex::new(6, 2).unwrap();
    for cand in (0u32..1 << 15).step_by(7) {
        let anf = AnfVector::from_monomials(6, (0..15).filter(|i| cand >> i & 1 == 1).map(|i| index.masks()[i]));
        assert_eq!(
            quadratic_bent_oracle(&anf).unwrap(),
            is_bent(&walsh_hadamard(&anf_to_truth_table(&anf))),
            "{anf}"
        );
    }
    assert!(quadratic_bent_oracle(&AnfVector::from_monomials(6, [0b111])).is_err());
}

#[test]
fn odd_n_has_no_bent_functions() {
    assert!(enumerate_homogeneous_bent(5, 2, None).unwrap().is_empty());
    assert!(enumerate_homogeneous_bent(7, 3, None).is_err());
}

#[test]
fn term_filter_selects_one_row() {
    let k3 = enumerate_homogeneous_bent(6, 2, Some(3)).unwrap();
    assert_eq!(k3.len(), 15);
    assert!(k3.iter().all(|f| f.monomial_count() == 3));
}

#[test]
fn infeasible_enumeration_reports_the_bound() {
    match density_report(8, 3) {
        Err(Error::InfeasibleEnumeration { terms, bound }) => {
            assert_eq!(terms, 56);
            assert_eq!(bound, 24);
        }
        other => panic!("{other:?}"),
    }
    let quad8 = density_report(8, 2).unwrap();
    assert_eq!(quad8.source, CountSource::ClosedForm);
    assert_eq!(quad8.total_count, BigUint::from(112_881_664u64));
    let quad10 = density_report(10, 2).unwrap();
    assert_eq!(quad10.source, CountSource::ClosedForm);
    assert_eq!(quad10.total_count, quadratic_bent_count(10).unwrap());
}

#![allow(dead_code)]

use proptest::collection::vec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigcomp::{BuyerAssignment, GoodSet, Partition, SellerProfile, ValuationMatrix};

pub fn matrix(max_buyers: usize, max_goods: usize) -> impl Strategy<Value = ValuationMatrix> {
    (1..=max_buyers, 1..=max_goods)
        .prop_flat_map(|(b, g)| vec(vec(0u8..=1, g), b))
        .prop_map(|rows| ValuationMatrix::from_rows(&rows).unwrap())
}

/// A matrix with a seller profile and a buyer assignment over it.
pub fn game(
    max_buyers: usize,
    max_goods: usize,
    max_sellers: usize,
) -> impl Strategy<Value = (ValuationMatrix, SellerProfile, BuyerAssignment)> {
    (matrix(max_buyers, max_goods), 1..=max_sellers).prop_flat_map(|(v, s)| {
        let (b, g) = (v.num_buyers(), v.num_goods());
        (
            Just(v),
            vec(vec(0..g, g), s),
            vec(0..s, b),
        )
            .prop_map(move |(v, labels, choice)| {
                let profile = SellerProfile::new(
                    labels.iter().map(|l| Partition::from_labels(l).unwrap()).collect(),
                )
                .unwrap();
                (v, profile, BuyerAssignment::new(choice, s).unwrap())
            })
    })
}

/// Every binary matrix of the given shape, row 0 in the low bits.
pub fn all_matrices(buyers: usize, goods: usize) -> impl Iterator<Item = ValuationMatrix> {
    (0u64..1 << (buyers * goods)).map(move |bits| {
        let rows: Vec<GoodSet> = (0..buyers)
            .map(|b| GoodSet::from_bits(bits >> (b * goods) & ((1 << goods) - 1)))
            .collect();
        ValuationMatrix::from_row_sets(goods, &rows).unwrap()
    })
}

/// Every assignment of `buyers` to `sellers`, lexicographically.
pub fn all_assignments(buyers: usize, sellers: usize) -> Vec<BuyerAssignment> {
    let total = sellers.pow(buyers as u32);
    (0..total)
        .map(|mut code| {
            let mut choice = vec![0; buyers];
            for slot in choice.iter_mut().rev() {
                *slot = code % sellers;
                code /= sellers;
            }
            BuyerAssignment::new(choice, sellers).unwrap()
        })
        .collect()
}

/// Every profile of `sellers` partitions of `goods`.
pub fn all_profiles(goods: usize, sellers: usize) -> Vec<SellerProfile> {
    let universe: Vec<Partition> = sigcomp::enumerate_partitions(goods).unwrap().collect();
    let mut out = Vec::new();
    let mut digits = vec![0usize; sellers];
    loop {
        out.push(SellerProfile::new(digits.iter().map(|&d| universe[d].clone()).collect()).unwrap());
        let mut i = sellers;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < universe.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

pub fn random_matrix(rng: &mut ChaCha8Rng, buyers: usize, goods: usize) -> ValuationMatrix {
    ValuationMatrix::from_fn(buyers, goods, |_, _| rng.gen_bool(0.5)).unwrap()
}

pub fn random_partition(rng: &mut ChaCha8Rng, goods: usize) -> Partition {
    let labels: Vec<usize> = (0..goods).map(|_| rng.gen_range(0..goods)).collect();
    Partition::from_labels(&labels).unwrap()
}

pub fn random_profile(rng: &mut ChaCha8Rng, goods: usize, sellers: usize) -> SellerProfile {
    SellerProfile::new((0..sellers).map(|_| random_partition(rng, goods)).collect()).unwrap()
}

pub fn random_assignment(rng: &mut ChaCha8Rng, buyers: usize, sellers: usize) -> BuyerAssignment {
    BuyerAssignment::new((0..buyers).map(|_| rng.gen_range(0..sellers)).collect(), sellers).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

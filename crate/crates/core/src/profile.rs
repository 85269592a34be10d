//! Strategy profiles: what the sellers reveal and where the buyers go.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::BuyerSet;
use crate::partition::Partition;

/// One partition per seller.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SellerProfile {
    partitions: Vec<Partition>,
}

impl SellerProfile {
    pub fn new(partitions: Vec<Partition>) -> Result<Self> {
        let Some(first) = partitions.first() else {
            return Err(Error::input("a seller profile needs at least one seller"));
        };
        let goods = first.num_goods();
        if partitions.iter().any(|p| p.num_goods() != goods) {
            return Err(Error::input("all sellers must partition the same good set"));
        }
        Ok(SellerProfile { partitions })
    }

    /// Every seller plays `partition`.
    pub fn uniform(sellers: usize, partition: Partition) -> Self {
        assert!(sellers >= 1);
        SellerProfile {
            partitions: vec![partition; sellers],
        }
    }

    /// Parses seller partitions separated by `;`, e.g. `0,1|2;0|1|2`.
    pub fn parse(text: &str, goods: usize) -> Result<Self> {
        let partitions = text
            .split(';')
            .map(|p| Partition::parse(p, goods))
            .collect::<Result<Vec<_>>>()?;
        Self::new(partitions)
    }

    pub fn num_sellers(&self) -> usize {
        self.partitions.len()
    }

    pub fn num_goods(&self) -> usize {
        self.partitions[0].num_goods()
    }

    pub fn partition(&self, seller: usize) -> &Partition {
        &self.partitions[seller]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// The profile after `seller` unilaterally switches to `partition`.
    pub fn with_deviation(&self, seller: usize, partition: Partition) -> SellerProfile {
        assert_eq!(partition.num_goods(), self.num_goods());
        let mut partitions = self.partitions.clone();
        partitions[seller] = partition;
        SellerProfile { partitions }
    }
}

impl fmt::Display for SellerProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.partitions.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl serde::Serialize for SellerProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The seller chosen by each buyer in one subgame.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct BuyerAssignment {
    choice: Vec<usize>,
}

impl BuyerAssignment {
    pub fn new(choice: Vec<usize>, sellers: usize) -> Result<Self> {
        if choice.is_empty() {
            return Err(Error::input("an assignment needs at least one buyer"));
        }
        if let Some(b) = choice.iter().position(|&s| s >= sellers) {
            return Err(Error::input(format!(
                "buyer {b} chooses seller {} but there are only {sellers}",
                choice[b]
            )));
        }
        Ok(BuyerAssignment { choice })
    }

    /// Every buyer at `seller`.
    pub fn all_to(buyers: usize, seller: usize) -> Self {
        BuyerAssignment {
            choice: vec![seller; buyers],
        }
    }

    /// Parses comma-separated seller indices, e.g. `0,0,1`.
    pub fn parse(text: &str, sellers: usize) -> Result<Self> {
        let choice = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::input(format!("bad seller index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(choice, sellers)
    }

    pub(crate) fn from_choice_unchecked(choice: Vec<usize>) -> Self {
        BuyerAssignment { choice }
    }

    pub fn num_buyers(&self) -> usize {
        self.choice.len()
    }

    pub fn seller_of(&self, buyer: usize) -> usize {
        self.choice[buyer]
    }

    pub fn choices(&self) -> &[usize] {
        &self.choice
    }

    /// Buyers that chose `seller`.
    pub fn bidders(&self, seller: usize) -> BuyerSet {
        self.choice
            .iter()
            .enumerate()
            .filter(|&(_, &s)| s == seller)
            .map(|(b, _)| b)
            .collect()
    }

    /// The assignment after `buyer` switches to `seller`.
    pub fn with_move(&self, buyer: usize, seller: usize) -> BuyerAssignment {
        let mut choice = self.choice.clone();
        choice[buyer] = seller;
        BuyerAssignment { choice }
    }
}

impl fmt::Display for BuyerAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.choice.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// The buyers' strategy as a lookup table from seller profiles to assignments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContingentBuyerStrategy {
    table: BTreeMap<SellerProfile, BuyerAssignment>,
}

impl ContingentBuyerStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, profile: SellerProfile, assignment: BuyerAssignment) {
        self.table.insert(profile, assignment);
    }

    pub fn get(&self, profile: &SellerProfile) -> Option<&BuyerAssignment> {
        self.table.get(profile)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SellerProfile, &BuyerAssignment)> {
        self.table.iter()
    }
}

impl FromIterator<(SellerProfile, BuyerAssignment)> for ContingentBuyerStrategy {
    fn from_iter<I: IntoIterator<Item = (SellerProfile, BuyerAssignment)>>(iter: I) -> Self {
        ContingentBuyerStrategy {
            table: iter.into_iter().collect(),
        }
    }
}

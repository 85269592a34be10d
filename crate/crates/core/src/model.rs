//! Valuation matrices and the per-block auction statistics derived from them.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest number of buyers or goods an instance may have.
pub const MAX_DIMENSION: usize = 64;

/// A set of indices below 64, stored as a bit mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u64);

/// A subset of the goods (variants), e.g. one block of a partition.
pub type GoodSet = IndexSet;

/// A subset of the buyers, e.g. the bidders at one seller.
pub type BuyerSet = IndexSet;

impl IndexSet {
    pub const fn empty() -> Self {
        IndexSet(0)
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_DIMENSION, "index sets hold at most 64 elements");
        if n == 64 {
            IndexSet(u64::MAX)
        } else {
            IndexSet((1u64 << n) - 1)
        }
    }

    pub const fn from_bits(bits: u64) -> Self {
        IndexSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(index: usize) -> Self {
        assert!(index < MAX_DIMENSION, "index {index} out of range");
        IndexSet(1 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut bits = 0u64;
        for i in indices {
            if i >= MAX_DIMENSION {
                return Err(Error::input(format!("index {i} exceeds the 64-element limit")));
            }
            bits |= 1 << i;
        }
        Ok(IndexSet(bits))
    }

    pub fn contains(self, index: usize) -> bool {
        index < MAX_DIMENSION && self.0 >> index & 1 == 1
    }

    pub fn insert(&mut self, index: usize) {
        self.0 |= 1 << index;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    /// Smallest element, if any.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = IndexSet::empty();
        for i in iter {
            set.insert(i);
        }
        set
    }
}

/// Highest and second-highest block valuation among a set of buyers.
///
/// `second` is the price of a second-price auction on the block; it is 0 when
/// fewer than two buyers bid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopTwo {
    pub first: u32,
    pub second: u32,
    /// Lowest-index buyer attaining `first`; `None` when nobody bids.
    pub winner: Option<usize>,
}

/// Demand counts over the whole market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DemandProfile {
    /// Goods valued by at least one buyer.
    pub p1: usize,
    /// Goods valued by at least two buyers.
    pub p2: usize,
    /// Goods valued by exactly one buyer, `p1 - p2`.
    pub c1: usize,
}

/// The `B x G` binary valuation matrix; row `b` holds buyer `b`'s values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValuationMatrix {
    goods: usize,
    rows: Vec<u64>,
}

impl ValuationMatrix {
    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let buyers = rows.len();
        let goods = rows.first().map_or(0, |r| r.as_ref().len());
        check_dimensions(buyers, goods)?;
        let mut masks = Vec::with_capacity(buyers);
        for (b, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != goods {
                return Err(Error::input(format!(
                    "row {b} has {} entries, expected {goods}",
                    row.len()
                )));
            }
            let mut mask = 0u64;
            for (g, &value) in row.iter().enumerate() {
                match value {
                    0 => {}
                    1 => mask |= 1 << g,
                    _ => {
                        return Err(Error::NonBinary {
                            buyer: b,
                            good: g,
                            value: value.into(),
                        })
                    }
                }
            }
            masks.push(mask);
        }
        Ok(ValuationMatrix { goods, rows: masks })
    }

    /// Builds a matrix from one good-set per buyer.
    pub fn from_row_sets(goods: usize, rows: &[GoodSet]) -> Result<Self> {
        check_dimensions(rows.len(), goods)?;
        let full = GoodSet::full(goods);
        if let Some(b) = rows.iter().position(|r| !r.is_subset(full)) {
            return Err(Error::input(format!("row {b} names a good beyond {goods}")));
        }
        Ok(ValuationMatrix {
            goods,
            rows: rows.iter().map(|r| r.bits()).collect(),
        })
    }

    pub fn from_fn(buyers: usize, goods: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_dimensions(buyers, goods)?;
        let rows = (0..buyers)
            .map(|b| (0..goods).filter(|&g| f(b, g)).fold(0u64, |m, g| m | 1 << g))
            .collect();
        Ok(ValuationMatrix { goods, rows })
    }

    pub fn zeros(buyers: usize, goods: usize) -> Result<Self> {
        Self::from_fn(buyers, goods, |_, _| false)
    }

    pub fn ones(buyers: usize, goods: usize) -> Result<Self> {
        Self::from_fn(buyers, goods, |_, _| true)
    }

    pub fn identity(goods: usize) -> Result<Self> {
        Self::from_fn(goods, goods, |b, g| b == g)
    }

    /// `copies` identity matrices stacked vertically.
    pub fn stacked_identity(goods: usize, copies: usize) -> Result<Self> {
        Self::from_fn(goods * copies, goods, |b, g| b % goods == g)
    }

    pub fn num_buyers(&self) -> usize {
        self.rows.len()
    }

    pub fn num_goods(&self) -> usize {
        self.goods
    }

    pub fn all_goods(&self) -> GoodSet {
        GoodSet::full(self.goods)
    }

    pub fn all_buyers(&self) -> BuyerSet {
        BuyerSet::full(self.rows.len())
    }

    /// Entry `v_b^g`; panics on out-of-range indices.
    pub fn value(&self, buyer: usize, good: usize) -> u8 {
        assert!(good < self.goods, "good {good} out of range");
        (self.rows[buyer] >> good & 1) as u8
    }

    /// Goods that `buyer` values.
    pub fn row(&self, buyer: usize) -> GoodSet {
        GoodSet::from_bits(self.rows[buyer])
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.num_buyers())
            .map(|b| (0..self.goods).map(|g| self.value(b, g)).collect())
            .collect()
    }

    /// Number of buyers that value `good`.
    pub fn column_demand(&self, good: usize) -> usize {
        self.rows.iter().filter(|&&r| r >> good & 1 == 1).count()
    }

    /// Number of goods in `block` that `buyer` values.
    pub fn block_value(&self, buyer: usize, block: GoodSet) -> Result<u32> {
        self.check_buyer(buyer)?;
        self.check_goods(block)?;
        Ok(self.block_value_unchecked(buyer, block.bits()))
    }

    #[inline]
    pub(crate) fn block_value_unchecked(&self, buyer: usize, block: u64) -> u32 {
        (self.rows[buyer] & block).count_ones()
    }

    /// Highest and second-highest valuation of `block` among `buyers`.
    pub fn top_two(&self, buyers: BuyerSet, block: GoodSet) -> Result<TopTwo> {
        if !buyers.is_subset(self.all_buyers()) {
            return Err(Error::input(format!(
                "buyer set {buyers:?} exceeds {} buyers",
                self.num_buyers()
            )));
        }
        self.check_goods(block)?;
        Ok(self.top_two_unchecked(buyers.bits(), block.bits()))
    }

    pub(crate) fn top_two_unchecked(&self, buyers: u64, block: u64) -> TopTwo {
        let mut top = TopTwo {
            first: 0,
            second: 0,
            winner: None,
        };
        for b in BuyerSet::from_bits(buyers).iter() {
            let value = self.block_value_unchecked(b, block);
            if top.winner.is_none() || value > top.first {
                top.second = top.first;
                top.first = value;
                top.winner = Some(b);
            } else if value > top.second {
                top.second = value;
            }
        }
        top
    }

    pub fn demand_profile(&self) -> DemandProfile {
        let (mut p1, mut p2) = (0, 0);
        for g in 0..self.goods {
            let demand = self.column_demand(g);
            p1 += usize::from(demand >= 1);
            p2 += usize::from(demand >= 2);
        }
        DemandProfile { p1, p2, c1: p1 - p2 }
    }

    /// True when every buyer values at least one good.
    pub fn has_positive_demand(&self) -> bool {
        self.rows.iter().all(|&r| r != 0)
    }

    fn check_buyer(&self, buyer: usize) -> Result<()> {
        if buyer >= self.num_buyers() {
            return Err(Error::input(format!(
                "buyer {buyer} out of range (B = {})",
                self.num_buyers()
            )));
        }
        Ok(())
    }

    fn check_goods(&self, block: GoodSet) -> Result<()> {
        if !block.is_subset(self.all_goods()) {
            return Err(Error::input(format!(
                "good set {block:?} exceeds {} goods",
                self.goods
            )));
        }
        Ok(())
    }
}

fn check_dimensions(buyers: usize, goods: usize) -> Result<()> {
    if buyers == 0 || goods == 0 {
        return Err(Error::input("a valuation matrix needs at least one buyer and one good"));
    }
    if buyers > MAX_DIMENSION || goods > MAX_DIMENSION {
        return Err(Error::input(format!(
            "{buyers}x{goods} exceeds the {MAX_DIMENSION}x{MAX_DIMENSION} limit"
        )));
    }
    Ok(())
}

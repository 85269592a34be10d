//! Integer-scaled auction outcomes for one seller, used by the exhaustive searches.
//!
//! For a fixed partition and a set of bidders (a bit mask over buyers) a seller's
//! market yields three integers: `welfare = sum V1`, `revenue = sum V2` and each
//! bidder's `surplus = sum max(v_b - V2, 0)`, all over the partition's blocks.
//! Dividing by `G` gives revenue and buyer utility; welfare summed over sellers
//! and divided by `S * G` gives social welfare.
//!
//! When `2^B` is small every bidder set is precomputed into a dense table.

use smallvec::SmallVec;

use crate::model::ValuationMatrix;
use crate::partition::Partition;

/// Dense tables are built only up to this many `u16` entries per market.
const TABLE_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone)]
pub struct Market {
    buyers: usize,
    rows: Vec<u64>,
    blocks: SmallVec<[u64; 16]>,
    table: Option<Table>,
}

/// Borrowed dense tables; `surplus` is indexed by `mask * buyers + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct Tables<'a> {
    pub welfare: &'a [u16],
    pub revenue: &'a [u16],
    pub surplus: &'a [u16],
}

#[derive(Debug, Clone)]
struct Table {
    welfare: Vec<u16>,
    revenue: Vec<u16>,
    // surplus[mask * buyers + b]
    surplus: Vec<u16>,
}

impl Market {
    pub fn new(v: &ValuationMatrix, partition: &Partition) -> Self {
        Self::with_table_limit(v, partition, TABLE_LIMIT)
    }

    /// `limit` caps the dense table size; 0 disables the table.
    pub fn with_table_limit(v: &ValuationMatrix, partition: &Partition, limit: usize) -> Self {
        assert_eq!(partition.num_goods(), v.num_goods());
        let buyers = v.num_buyers();
        let mut market = Market {
            buyers,
            rows: (0..buyers).map(|b| v.row(b).bits()).collect(),
            blocks: partition.block_masks(),
            table: None,
        };
        let size = table_size(buyers);
        if size.is_some_and(|n| n <= limit) {
            market.table = Some(market.build_table());
        }
        market
    }

    pub fn has_table(&self) -> bool {
        self.table.is_some()
    }

    /// Welfare, revenue and surplus tables, when built.
    pub(crate) fn tables(&self) -> Option<Tables<'_>> {
        self.table.as_ref().map(|t| Tables {
            welfare: &t.welfare,
            revenue: &t.revenue,
            surplus: &t.surplus,
        })
    }

    fn build_table(&self) -> Table {
        let masks = 1usize << self.buyers;
        let mut table = Table {
            welfare: vec![0; masks],
            revenue: vec![0; masks],
            surplus: vec![0; masks * self.buyers],
        };
        for mask in 0..masks {
            let (welfare, revenue) = self.direct_totals(mask as u64);
            table.welfare[mask] = welfare;
            table.revenue[mask] = revenue;
            for b in 0..self.buyers {
                if mask >> b & 1 == 1 {
                    table.surplus[mask * self.buyers + b] = self.direct_surplus(mask as u64, b);
                }
            }
        }
        table
    }

    #[inline]
    fn top_two(&self, bidders: u64, block: u64) -> (u16, u16) {
        let (mut first, mut second) = (0u16, 0u16);
        let mut rest = bidders;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let value = (self.rows[b] & block).count_ones() as u16;
            if value > first {
                second = first;
                first = value;
            } else if value > second {
                second = value;
            }
        }
        (first, second)
    }

    fn direct_totals(&self, bidders: u64) -> (u16, u16) {
        self.blocks.iter().fold((0, 0), |(w, r), &block| {
            let (first, second) = self.top_two(bidders, block);
            (w + first, r + second)
        })
    }

    fn direct_surplus(&self, bidders: u64, buyer: usize) -> u16 {
        self.blocks
            .iter()
            .map(|&block| {
                let own = (self.rows[buyer] & block).count_ones() as u16;
                let (_, second) = self.top_two(bidders, block);
                own.saturating_sub(second)
            })
            .sum()
    }

    /// `sum V1` over blocks for this bidder set.
    #[inline]
    pub fn welfare(&self, bidders: u64) -> u16 {
        match &self.table {
            Some(t) => t.welfare[bidders as usize],
            None => self.direct_totals(bidders).0,
        }
    }

    /// `sum V2` over blocks for this bidder set.
    #[inline]
    pub fn revenue(&self, bidders: u64) -> u16 {
        match &self.table {
            Some(t) => t.revenue[bidders as usize],
            None => self.direct_totals(bidders).1,
        }
    }

    /// Buyer's `sum max(v_b - V2, 0)`; `bidders` must contain `buyer`.
    #[inline]
    pub fn surplus(&self, bidders: u64, buyer: usize) -> u16 {
        debug_assert!(bidders >> buyer & 1 == 1);
        match &self.table {
            Some(t) => t.surplus[bidders as usize * self.buyers + buyer],
            None => self.direct_surplus(bidders, buyer),
        }
    }
}

/// Entries in a dense table over all bidder sets, if representable.
fn table_size(buyers: usize) -> Option<usize> {
    if buyers >= 40 {
        return None;
    }
    (1usize << buyers).checked_mul(buyers + 2)
}

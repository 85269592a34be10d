//! A single seller facing every buyer.
//!
//! The scan walks all partitions once, tracking the revenue maximizers and the
//! best and worst welfare among them.

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::model::{DemandProfile, GoodSet, ValuationMatrix};
use crate::partition::{bell_number, Partition};
use crate::rational::{self, Rational};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonopolyAnalysis {
    pub goods: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub max_revenue: Rational,
    /// Every revenue-maximizing partition, in enumeration order. Left empty by
    /// [`analyze_monopoly_summary`], which only counts them.
    pub revenue_maximizers: Vec<Partition>,
    pub maximizer_count: usize,
    /// Highest welfare among the maximizers, with the first partition attaining it.
    #[serde(serialize_with = "rational::serialize")]
    pub best_welfare: Rational,
    pub best_witness: Partition,
    #[serde(serialize_with = "rational::serialize")]
    pub worst_welfare: Rational,
    pub worst_witness: Partition,
    /// `p1 / G`: welfare under full disclosure.
    #[serde(serialize_with = "rational::serialize")]
    pub opt: Rational,
}

/// One partition in the monopoly landscape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonopolyRow {
    pub partition: Partition,
    #[serde(serialize_with = "rational::serialize")]
    pub revenue: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub welfare: Rational,
    /// Maximizes revenue.
    pub revenue_optimal: bool,
    /// Maximizes revenue and, among those, welfare.
    pub welfare_best: bool,
}

fn check_budget(v: &ValuationMatrix, budget: &Budget) -> Result<()> {
    let goods = v.num_goods();
    let max_goods = budget.max_goods.min(64);
    if goods > max_goods {
        return Err(Error::Budget {
            what: "partition enumeration",
            required: bell_number(goods),
            budget: bell_number(max_goods),
        });
    }
    budget.check_profiles("monopoly partition scan", bell_number(goods))
}

/// Depth-first walk over restricted-growth sequences in lexicographic order,
/// calling `leaf(labels, block masks)` once per partition.
fn walk_partitions(goods: usize, mut leaf: impl FnMut(&[u8], &[u64])) {
    fn go(
        g: usize,
        goods: usize,
        labels: &mut [u8],
        masks: &mut Vec<u64>,
        leaf: &mut dyn FnMut(&[u8], &[u64]),
    ) {
        if g == goods {
            leaf(labels, masks);
            return;
        }
        let bit = 1u64 << g;
        for k in 0..=masks.len() {
            labels[g] = k as u8;
            if k == masks.len() {
                masks.push(bit);
                go(g + 1, goods, labels, masks, leaf);
                masks.pop();
            } else {
                masks[k] |= bit;
                go(g + 1, goods, labels, masks, leaf);
                masks[k] &= !bit;
            }
        }
    }
    let mut labels = vec![0u8; goods];
    let mut masks = Vec::with_capacity(goods);
    go(0, goods, &mut labels, &mut masks, &mut leaf);
}

/// `(sum V1, sum V2)` over blocks with every buyer bidding.
fn totals(v: &ValuationMatrix, masks: &[u64]) -> (u32, u32) {
    let everyone = v.all_buyers().bits();
    masks.iter().fold((0, 0), |(w, r), &block| {
        let top = v.top_two_unchecked(everyone, block);
        (w + top.first, r + top.second)
    })
}

fn partition_of(labels: &[u8]) -> Partition {
    Partition::from_labels(labels).expect("walk yields valid labels")
}

fn analyze(v: &ValuationMatrix, budget: &Budget, keep_maximizers: bool) -> Result<MonopolyAnalysis> {
    check_budget(v, budget)?;
    let goods = v.num_goods();
    let mut max_revenue = 0u32;
    let mut maximizers = Vec::new();
    let mut count = 0usize;
    let mut best: (u32, Vec<u8>) = (0, Vec::new());
    let mut worst: (u32, Vec<u8>) = (0, Vec::new());
    walk_partitions(goods, |labels, masks| {
        let (welfare, revenue) = totals(v, masks);
        if count > 0 && revenue < max_revenue {
            return;
        }
        if count == 0 || revenue > max_revenue {
            max_revenue = revenue;
            maximizers.clear();
            count = 0;
            best = (welfare, labels.to_vec());
            worst = (welfare, labels.to_vec());
        } else {
            if welfare > best.0 {
                best = (welfare, labels.to_vec());
            }
            if welfare < worst.0 {
                worst = (welfare, labels.to_vec());
            }
        }
        count += 1;
        if keep_maximizers {
            maximizers.push(partition_of(labels));
        }
    });
    let g = goods as i64;
    Ok(MonopolyAnalysis {
        goods,
        max_revenue: Rational::new(max_revenue as i64, g),
        revenue_maximizers: maximizers,
        maximizer_count: count,
        best_welfare: Rational::new(best.0 as i64, g),
        best_witness: partition_of(&best.1),
        worst_welfare: Rational::new(worst.0 as i64, g),
        worst_witness: partition_of(&worst.1),
        opt: Rational::new(v.demand_profile().p1 as i64, g),
    })
}

/// Exhaustive single-seller analysis. The scan covers `Bell(G)` partitions and is
/// charged against the profile budget.
pub fn analyze_monopoly(v: &ValuationMatrix, budget: &Budget) -> Result<MonopolyAnalysis> {
    analyze(v, budget, true)
}

/// As [`analyze_monopoly`] without materializing the list of maximizers.
pub fn analyze_monopoly_summary(v: &ValuationMatrix, budget: &Budget) -> Result<MonopolyAnalysis> {
    analyze(v, budget, false)
}

/// Revenue and welfare of every partition, with optimality flags.
pub fn monopoly_rows(v: &ValuationMatrix, budget: &Budget) -> Result<Vec<MonopolyRow>> {
    check_budget(v, budget)?;
    let g = v.num_goods() as i64;
    let mut raw = Vec::new();
    walk_partitions(v.num_goods(), |labels, masks| {
        let (welfare, revenue) = totals(v, masks);
        raw.push((partition_of(labels), revenue, welfare));
    });
    let max_revenue = raw.iter().map(|r| r.1).max().unwrap_or(0);
    let best = raw
        .iter()
        .filter(|r| r.1 == max_revenue)
        .map(|r| r.2)
        .max()
        .unwrap_or(0);
    Ok(raw
        .into_iter()
        .map(|(partition, revenue, welfare)| MonopolyRow {
            partition,
            revenue: Rational::new(revenue as i64, g),
            welfare: Rational::new(welfare as i64, g),
            revenue_optimal: revenue == max_revenue,
            welfare_best: revenue == max_revenue && welfare == best,
        })
        .collect())
}

/// The single-seller welfare guarantees.
pub fn check_monopoly_bounds(analysis: &MonopolyAnalysis, dp: &DemandProfile) -> Vec<Verdict> {
    let g = analysis.goods as i64;
    let demand = Rational::new((dp.p1 + dp.p2) as i64, 1);
    vec![
        Verdict::at_least(
            "monopoly_third_of_opt",
            analysis.worst_welfare,
            analysis.opt / 3,
        ),
        Verdict::at_least("monopoly_half_of_opt", analysis.best_welfare, analysis.opt / 2),
        Verdict::at_least(
            "monopoly_demand_third",
            analysis.worst_welfare,
            demand / (3 * g),
        ),
        Verdict::at_least(
            "monopoly_demand_half",
            analysis.best_welfare,
            demand / (2 * g),
        ),
        Verdict::at_least(
            "monopoly_second_demand",
            analysis.worst_welfare,
            Rational::new(dp.p2 as i64, g),
        ),
    ]
}

/// Splits `block` by its two top bidders `a` and `b`: goods that `a` or `b`
/// values, and the rest. Splitting this way never lowers the block's revenue.
/// `None` with fewer than two buyers.
pub fn top_pair_split(v: &ValuationMatrix, block: GoodSet) -> Result<Option<(GoodSet, GoodSet)>> {
    if v.num_buyers() < 2 {
        return Ok(None);
    }
    let mut ranked: Vec<(u32, usize)> = (0..v.num_buyers())
        .map(|b| v.block_value(b, block).map(|value| (value, b)))
        .collect::<Result<_>>()?;
    ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let (a, b) = (ranked[0].1, ranked[1].1);
    let valued = v.row(a).union(v.row(b)).intersection(block);
    Ok(Some((valued, block.difference(valued))))
}

//! Bound checks over every small matrix plus seeded random instances.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::Result;
use crate::harness::generate::generate_random;
use crate::harness::instance::Instance;
use crate::harness::report::{run_ratio_experiment_with, BoundReport};
use crate::model::{GoodSet, ValuationMatrix};
use crate::monopoly::analyze_monopoly_summary;
use crate::rational::Rational;
use crate::verdict::{Status, Verdict};

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Every matrix with `B * G <= max_cells` is checked.
    pub max_cells: usize,
    pub sellers: Vec<usize>,
    pub random_instances: usize,
    /// Random instances have `B, G <= random_max_dim`.
    pub random_max_dim: usize,
    pub seed: u64,
    pub density: Rational,
    pub budget: Budget,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_cells: 12,
            sellers: vec![2, 3],
            random_instances: 500,
            random_max_dim: 6,
            seed: 0,
            density: Rational::new(1, 2),
            budget: Budget::default(),
        }
    }
}

/// Verdict counts for one bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct Tally {
    pub pass: u64,
    pub fail: u64,
    pub skip: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct SweepSummary {
    pub instances: u64,
    /// Instances where some computation exceeded its budget.
    pub over_budget: u64,
    pub tallies: BTreeMap<String, Tally>,
    /// `(instance label, failed verdict)`.
    pub failures: Vec<(String, Verdict)>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, report: &BoundReport) {
        self.instances += 1;
        if !report.budget_skips.is_empty() {
            self.over_budget += 1;
        }
        for v in &report.verdicts {
            let tally = self.tallies.entry(v.name.clone()).or_default();
            match v.status {
                Status::Pass => tally.pass += 1,
                Status::Fail => {
                    tally.fail += 1;
                    self.failures.push((report.label.clone(), v.clone()));
                }
                Status::Skip => tally.skip += 1,
            }
        }
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "instances {}  over budget {}  failures {}\n",
            self.instances,
            self.over_budget,
            self.failures.len()
        );
        out.push_str(&format!("{:<28} {:>9} {:>6} {:>9}\n", "verdict", "pass", "fail", "skip"));
        for (name, t) in &self.tallies {
            out.push_str(&format!("{name:<28} {:>9} {:>6} {:>9}\n", t.pass, t.fail, t.skip));
        }
        for (label, v) in self.failures.iter().take(20) {
            out.push_str(&format!("FAIL {label} {} {:?} {:?}\n", v.name, v.lhs, v.rhs));
        }
        out
    }
}

/// Runs the exhaustive part, then the random part, calling `on_report` for each
/// report in order.
pub fn run_sweep(config: &SweepConfig, mut on_report: impl FnMut(&BoundReport)) -> Result<SweepSummary> {
    let mut summary = SweepSummary::default();
    for buyers in 1..=config.max_cells {
        for goods in 1..=config.max_cells / buyers {
            let cells = buyers * goods;
            for bits in 0u64..1 << cells {
                let rows: Vec<GoodSet> = (0..buyers)
                    .map(|b| GoodSet::from_bits(bits >> (b * goods) & ((1 << goods) - 1)))
                    .collect();
                let v = ValuationMatrix::from_row_sets(goods, &rows)?;
                let monopoly = analyze_monopoly_summary(&v, &config.budget);
                for &sellers in &config.sellers {
                    let instance = Instance::new(sellers, v.clone())?
                        .with_label(format!("all(B={buyers},G={goods},S={sellers},#{bits})"));
                    let report = run_ratio_experiment_with(&instance, &monopoly, &config.budget);
                    summary.record(&report);
                    on_report(&report);
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for i in 0..config.random_instances {
        let buyers = rng.gen_range(1..=config.random_max_dim);
        let goods = rng.gen_range(1..=config.random_max_dim);
        let sellers = config.sellers[rng.gen_range(0..config.sellers.len())];
        let seed: u64 = rng.gen();
        let instance =
            generate_random(buyers, goods, sellers, config.density, seed, i % 2 == 0)?;
        let monopoly = analyze_monopoly_summary(&instance.valuation, &config.budget);
        let report = run_ratio_experiment_with(&instance, &monopoly, &config.budget);
        summary.record(&report);
        on_report(&report);
    }
    Ok(summary)
}

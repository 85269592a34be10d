//! Competition against monopoly on one instance, with every applicable bound checked.

use std::fmt::Write as _;

use serde::Serialize;

use crate::budget::Budget;
use crate::equilibrium::{compute_opt, SpeSearch};
use crate::error::Error;
use crate::harness::instance::Instance;
use crate::model::DemandProfile;
use crate::monopoly::{analyze_monopoly, check_monopoly_bounds, MonopolyAnalysis};
use crate::profile::SellerProfile;
use crate::rational::{self, opt_text, Rational};
use crate::verdict::{Relation, Status, Verdict};

pub const CSV_HEADER: &str = "label,S,B,G,p1,p2,c1,opt,monop_rev,monop_sw_worst,monop_sw_best,spe_count,spe_sw_min,spe_sw_max,ratio_max,ratio_min,verdicts";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpeOutcome {
    pub profile: SellerProfile,
    #[serde(serialize_with = "rational::serialize")]
    pub welfare: Rational,
}

/// Equilibria listed in a report.
const WITNESSES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpeSummary {
    pub count: usize,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub welfare_min: Option<Rational>,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub welfare_max: Option<Rational>,
    /// A few equilibria, at most one from each group that differs only in
    /// outcome-equivalent partitions.
    pub witnesses: Vec<SpeOutcome>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub label: String,
    pub instance: String,
    pub sellers: usize,
    pub buyers: usize,
    pub goods: usize,
    pub demand: DemandProfile,
    /// `p2 / c1`, undefined when `c1 = 0`.
    #[serde(serialize_with = "rational::serialize_opt")]
    pub rho: Option<Rational>,
    pub monopoly: Option<MonopolyAnalysis>,
    /// `None` when the search was over budget.
    pub spe: Option<SpeSummary>,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub opt: Option<Rational>,
    /// Best equilibrium welfare over the worst revenue-maximizing monopoly.
    #[serde(serialize_with = "rational::serialize_opt")]
    pub ratio_max: Option<Rational>,
    /// Worst equilibrium welfare over the best revenue-maximizing monopoly.
    #[serde(serialize_with = "rational::serialize_opt")]
    pub ratio_min: Option<Rational>,
    pub verdicts: Vec<Verdict>,
    /// Which computations were skipped for exceeding their budget.
    pub budget_skips: Vec<String>,
}

impl BoundReport {
    pub fn spe_count(&self) -> Option<usize> {
        self.spe.as_ref().map(|s| s.count)
    }

    pub fn spe_welfare_min(&self) -> Option<Rational> {
        self.spe.as_ref()?.welfare_min
    }

    pub fn spe_welfare_max(&self) -> Option<Rational> {
        self.spe.as_ref()?.welfare_max
    }

    pub fn has_failure(&self) -> bool {
        self.verdicts.iter().any(Verdict::failed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn csv_row(&self) -> String {
        let m = self.monopoly.as_ref();
        let verdicts: Vec<String> = self
            .verdicts
            .iter()
            .map(|v| format!("{}={}", v.name, status_text(v.status)))
            .collect();
        let fields = [
            csv_field(&self.label),
            self.sellers.to_string(),
            self.buyers.to_string(),
            self.goods.to_string(),
            self.demand.p1.to_string(),
            self.demand.p2.to_string(),
            self.demand.c1.to_string(),
            opt_text(&self.opt),
            opt_text(&m.map(|m| m.max_revenue)),
            opt_text(&m.map(|m| m.worst_welfare)),
            opt_text(&m.map(|m| m.best_welfare)),
            self.spe_count()
                .map_or_else(|| "undefined".to_string(), |n| n.to_string()),
            opt_text(&self.spe_welfare_min()),
            opt_text(&self.spe_welfare_max()),
            opt_text(&self.ratio_max),
            opt_text(&self.ratio_min),
            verdicts.join(";"),
        ];
        fields.join(",")
    }

    /// Human-readable summary.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, key: &str, value: String| {
            writeln!(out, "{key:<16} {value}").unwrap();
        };
        line(&mut out, "instance", format!("{} ({})", self.label, &self.instance[..12]));
        line(
            &mut out,
            "size",
            format!("S={} B={} G={}", self.sellers, self.buyers, self.goods),
        );
        line(
            &mut out,
            "demand",
            format!(
                "p1={} p2={} c1={} rho={}",
                self.demand.p1,
                self.demand.p2,
                self.demand.c1,
                opt_text(&self.rho)
            ),
        );
        line(&mut out, "opt", opt_text(&self.opt));
        if let Some(m) = &self.monopoly {
            line(
                &mut out,
                "monopoly",
                format!(
                    "revenue={} maximizers={} worst_sw={} [{}] best_sw={} [{}]",
                    rational::to_text(&m.max_revenue),
                    m.maximizer_count,
                    rational::to_text(&m.worst_welfare),
                    m.worst_witness,
                    rational::to_text(&m.best_welfare),
                    m.best_witness
                ),
            );
        }
        match &self.spe {
            Some(summary) => {
                line(
                    &mut out,
                    "pure spe",
                    format!(
                        "{} found, sw in [{}, {}]",
                        summary.count,
                        opt_text(&self.spe_welfare_min()),
                        opt_text(&self.spe_welfare_max())
                    ),
                );
                for spe in &summary.witnesses {
                    writeln!(out, "{:<16}   {} sw={}", "", spe.profile, rational::to_text(&spe.welfare)).unwrap();
                }
                if summary.count > summary.witnesses.len() {
                    writeln!(out, "{:<16}   ... {} more", "", summary.count - summary.witnesses.len()).unwrap();
                }
            }
            None => line(&mut out, "pure spe", "skipped".to_string()),
        }
        line(
            &mut out,
            "ratios",
            format!("max={} min={}", opt_text(&self.ratio_max), opt_text(&self.ratio_min)),
        );
        for skip in &self.budget_skips {
            line(&mut out, "over budget", skip.clone());
        }
        for v in &self.verdicts {
            let detail = match (v.lhs, v.rhs) {
                (Some(l), Some(r)) => format!(
                    "{} {} {}",
                    rational::to_text(&l),
                    v.relation.symbol(),
                    rational::to_text(&r)
                ),
                _ => v.note.clone(),
            };
            writeln!(out, "{:<5} {:<28} {detail}", status_text(v.status), v.name).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn status_text(status: Status) -> &'static str {
    match status {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skip => "skip",
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Runs the single-seller analysis, the equilibrium search and the optimum, then
/// checks every bound whose preconditions hold.
pub fn run_ratio_experiment(instance: &Instance, budget: &Budget) -> BoundReport {
    let monopoly = analyze_monopoly(&instance.valuation, budget);
    run_ratio_experiment_with(instance, &monopoly, budget)
}

/// As [`run_ratio_experiment`] with the single-seller analysis already done.
pub fn run_ratio_experiment_with(
    instance: &Instance,
    monopoly: &Result<MonopolyAnalysis, Error>,
    budget: &Budget,
) -> BoundReport {
    let v = &instance.valuation;
    let (s, b, g) = (instance.sellers, v.num_buyers(), v.num_goods());
    let dp = v.demand_profile();
    let mut budget_skips = Vec::new();

    let monopoly = match monopoly {
        Ok(m) => Some(m.clone()),
        Err(e) => {
            budget_skips.push(format!("monopoly: {}", e));
            None
        }
    };
    let opt = match compute_opt(v, s, budget) {
        Ok(opt) => Some(opt),
        Err(e) => {
            budget_skips.push(format!("opt: {}", e));
            None
        }
    };
    let spe = match SpeSearch::run(v, s, budget) {
        Ok(search) => {
            let range = search.welfare_range();
            Some(SpeSummary {
                count: search.equilibrium_count(),
                welfare_min: range.map(|r| r.0),
                welfare_max: range.map(|r| r.1),
                witnesses: search
                    .representatives()
                    .iter()
                    .take(WITNESSES)
                    .map(|r| SpeOutcome {
                        profile: search.profile(r.profile_index),
                        welfare: r.welfare,
                    })
                    .collect(),
            })
        }
        Err(e) => {
            budget_skips.push(format!("spe: {}", e));
            None
        }
    };

    let mut report = BoundReport {
        label: instance.name(),
        instance: instance.hash(),
        sellers: s,
        buyers: b,
        goods: g,
        demand: dp,
        rho: (dp.c1 > 0).then(|| Rational::new(dp.p2 as i64, dp.c1 as i64)),
        monopoly,
        spe,
        opt,
        ratio_max: None,
        ratio_min: None,
        verdicts: Vec::new(),
        budget_skips,
    };
    let spe_max = report.spe_welfare_max();
    let spe_min = report.spe_welfare_min();
    if let Some(m) = &report.monopoly {
        let zero = Rational::from_integer(0);
        if m.worst_welfare > zero {
            report.ratio_max = spe_max.map(|x| x / m.worst_welfare);
        }
        if m.best_welfare > zero {
            report.ratio_min = spe_min.map(|x| x / m.best_welfare);
        }
    }
    report.verdicts = verdicts(&report, instance, spe_min, spe_max);
    report
}

struct Checks {
    out: Vec<Verdict>,
}

impl Checks {
    fn push(
        &mut self,
        name: &str,
        relation: Relation,
        applies: Result<(), &str>,
        sides: Option<(Rational, Rational)>,
        missing: &str,
    ) {
        let verdict = match (applies, sides) {
            (Err(why), _) => Verdict::skip(name, relation, format!("precondition: {why}")),
            (Ok(()), Some((lhs, rhs))) => Verdict::check(name, lhs, relation, rhs),
            (Ok(()), None) => Verdict::skip(name, relation, missing.to_string()),
        };
        self.out.push(verdict);
    }
}

fn verdicts(
    report: &BoundReport,
    instance: &Instance,
    spe_min: Option<Rational>,
    spe_max: Option<Rational>,
) -> Vec<Verdict> {
    let (s, b, g) = (report.sellers as i64, report.buyers as i64, report.goods as i64);
    let dp = &report.demand;
    let mut checks = Checks { out: Vec::new() };

    match &report.monopoly {
        Some(m) => checks.out.extend(check_monopoly_bounds(m, dp)),
        None => {
            for name in [
                "monopoly_third_of_opt",
                "monopoly_half_of_opt",
                "monopoly_demand_third",
                "monopoly_demand_half",
                "monopoly_second_demand",
            ] {
                checks
                    .out
                    .push(Verdict::skip(name, Relation::AtLeast, "monopoly scan over budget"));
            }
        }
    }
    let m = report.monopoly.as_ref();
    let spe_missing = if report.spe.is_none() {
        "equilibrium search over budget"
    } else if m.is_none() {
        "monopoly scan over budget"
    } else {
        "no pure equilibrium found"
    };
    let always = Ok(());
    let competitive = if s >= 2 && b >= 2 {
        Ok(())
    } else {
        Err("needs S >= 2 and B >= 2")
    };
    let positive = if s >= 2 && b >= s && instance.valuation.has_positive_demand() {
        Ok(())
    } else {
        Err("needs S >= 2, B >= S and positive demand")
    };

    let cap = Rational::new(dp.c1 as i64 + s.min(b) * dp.p2 as i64, s * g);
    checks.push(
        "opt_welfare_cap",
        Relation::AtMost,
        always,
        report.opt.map(|opt| (opt, cap)),
        "optimum over budget",
    );
    checks.push(
        "spe_welfare_cap",
        Relation::AtMost,
        always,
        spe_max.map(|x| (x, cap)),
        if report.spe.is_none() {
            "equilibrium search over budget"
        } else {
            "no pure equilibrium found"
        },
    );
    checks.push(
        "spe_below_opt",
        Relation::AtMost,
        always,
        spe_max.zip(report.opt),
        if report.opt.is_none() {
            "optimum over budget"
        } else {
            spe_missing
        },
    );
    checks.push(
        "competition_gain_cap",
        Relation::AtMost,
        competitive,
        spe_max
            .zip(m)
            .map(|(x, m)| (x, m.worst_welfare * Rational::new(s + 1, s))),
        spe_missing,
    );
    checks.push(
        "efficient_competition_cap",
        Relation::AtMost,
        competitive,
        spe_max
            .zip(m)
            .map(|(x, m)| (x, m.best_welfare * Rational::new(s.min(b), s))),
        spe_missing,
    );
    checks.push(
        "competition_loss_floor",
        Relation::AtLeast,
        positive,
        spe_min.zip(m).map(|(x, m)| (x, m.best_welfare / g)),
        spe_missing,
    );

    // Instances built to make a bound tight.
    let label = instance.label.as_deref().unwrap_or("");
    let family = label.split('(').next().unwrap_or("");
    match family {
        "thm43-identity" if g == 3 => checks.push(
            "monopoly_third_tight",
            Relation::Equal,
            always,
            m.map(|m| (m.worst_welfare, m.opt / 3)),
            "monopoly scan over budget",
        ),
        "thm44-2x2" => checks.push(
            "monopoly_half_tight",
            Relation::Equal,
            always,
            m.map(|m| (m.best_welfare, m.opt / 2)),
            "monopoly scan over budget",
        ),
        "thm63" => checks.push(
            "competition_gain_tight",
            Relation::Equal,
            always,
            report.ratio_max.map(|r| (r, Rational::new(s + 1, s))),
            spe_missing,
        ),
        "thm65" => checks.push(
            "efficient_competition_tight",
            Relation::Equal,
            always,
            spe_max
                .zip(m)
                .filter(|(_, m)| m.best_welfare != Rational::from_integer(0))
                .map(|(x, m)| (x / m.best_welfare, Rational::new(s.min(b), s))),
            spe_missing,
        ),
        "ex51" => checks.push(
            "competition_loss_tight",
            Relation::Equal,
            always,
            report.ratio_min.map(|r| (r, Rational::new(1, g))),
            spe_missing,
        ),
        _ => {}
    }
    checks.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::named::named_instance;
    use crate::rational::ratio;

    fn report(name: &str) -> BoundReport {
        run_ratio_experiment(&named_instance(name).unwrap(), &Budget::default())
    }

    #[test]
    fn thm63_ratio_is_one_plus_one_over_s() {
        let r = report("thm63(2)");
        assert_eq!(r.ratio_max, Some(ratio(3, 2)));
        assert_eq!(r.verdict("competition_gain_tight").unwrap().status, Status::Pass);
        assert!(!r.has_failure(), "{}", r.table());
    }

    #[test]
    fn ex51_ratio_is_one_over_g() {
        let r = report("ex51(3)");
        assert_eq!(r.ratio_min, Some(ratio(1, 3)));
        assert_eq!(r.opt, Some(ratio(1, 1)));
        assert!(!r.has_failure(), "{}", r.table());
    }

    #[test]
    fn thm65_ratio_is_one() {
        let r = report("thm65(2,2)");
        assert_eq!(r.verdict("efficient_competition_tight").unwrap().status, Status::Pass);
        assert!(!r.has_failure(), "{}", r.table());
    }

    #[test]
    fn csv_row_matches_header() {
        let r = report("thm63(2)");
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("thm63(2),2,3,2,2,1,1,3/4,1/2,1/2,1/1,"), "{row}");
    }

    #[test]
    fn over_budget_parts_are_skipped() {
        let x = named_instance("ex51(3)").unwrap();
        let tight = Budget {
            profiles: 10,
            ..Budget::default()
        };
        let r = run_ratio_experiment(&x, &tight);
        assert!(r.spe.is_none());
        assert!(r.monopoly.is_some());
        assert_eq!(r.verdict("competition_gain_cap").unwrap().status, Status::Skip);
        assert!(!r.budget_skips.is_empty());
        assert!(r.csv_row().contains(",undefined,"));
    }

    #[test]
    fn single_seller_skips_competition_bounds() {
        let r = report("ex41");
        assert_eq!(r.verdict("competition_loss_floor").unwrap().status, Status::Skip);
        assert_eq!(r.verdict("monopoly_third_of_opt").unwrap().status, Status::Pass);
        // every good is wanted twice
        assert_eq!(r.rho, None);
    }

    #[test]
    fn output_is_deterministic() {
        assert_eq!(report("thm63(3)").to_json(), report("thm63(3)").to_json());
    }
}

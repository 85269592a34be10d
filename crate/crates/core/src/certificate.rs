//! Checkable evidence that a pure seller profile is subgame perfect.
//!
//! A certificate lists the buyer assignment played on the equilibrium path and
//! after every unilateral seller deviation. Verification recomputes everything
//! from the exact utility formulas, independently of the search that produced it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ValuationMatrix;
use crate::partition::enumerate_partitions;
use crate::profile::{BuyerAssignment, ContingentBuyerStrategy, SellerProfile};
use crate::rational::{self, Rational};
use crate::utility::{buyer_utility, seller_utility};

/// The only universe supported: the on-path profile plus all unilateral seller deviations.
pub const UNILATERAL: &str = "unilateral";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeCertificate {
    pub on_path: SellerProfile,
    pub strategy: ContingentBuyerStrategy,
}

/// A failed equilibrium condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Violation {
    /// `buyer` gains `delta` by leaving `from` for `to` in the subgame after `profile`.
    Buyer {
        profile: SellerProfile,
        buyer: usize,
        from: usize,
        to: usize,
        #[serde(serialize_with = "rational::serialize")]
        delta: Rational,
    },
    /// `seller` gains `delta` by deviating to `deviation`.
    Seller {
        seller: usize,
        deviation: SellerProfile,
        #[serde(serialize_with = "rational::serialize")]
        delta: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpeVerdict {
    pub violations: Vec<Violation>,
}

impl SpeVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct Document {
    instance: String,
    sellers: usize,
    universe: String,
    on_path: Vec<String>,
    table: BTreeMap<String, Vec<usize>>,
}

impl SpeCertificate {
    pub fn sellers(&self) -> usize {
        self.on_path.num_sellers()
    }

    pub fn on_path_assignment(&self) -> Option<&BuyerAssignment> {
        self.strategy.get(&self.on_path)
    }

    /// Pretty JSON with keys in a fixed order, so equal certificates are byte-identical.
    pub fn to_json(&self, instance_hash: &str) -> String {
        let doc = Document {
            instance: instance_hash.to_string(),
            sellers: self.sellers(),
            universe: UNILATERAL.to_string(),
            on_path: self.on_path.partitions().iter().map(|p| p.to_string()).collect(),
            table: self
                .strategy
                .iter()
                .map(|(profile, a)| (profile.to_string(), a.choices().to_vec()))
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("certificate serializes");
        text.push('\n');
        text
    }

    /// Parses a certificate over `goods` goods, returning it with its instance hash.
    pub fn from_json(text: &str, goods: usize) -> Result<(Self, String)> {
        let doc: Document = serde_json::from_str(text)
            .map_err(|e| Error::input(format!("malformed certificate: {e}")))?;
        if doc.universe != UNILATERAL {
            return Err(Error::input(format!(
                "unsupported certificate universe {:?}",
                doc.universe
            )));
        }
        let on_path = SellerProfile::parse(&doc.on_path.join(";"), goods)?;
        if on_path.num_sellers() != doc.sellers {
            return Err(Error::input(format!(
                "certificate declares {} sellers but its on-path profile has {}",
                doc.sellers,
                on_path.num_sellers()
            )));
        }
        let mut strategy = ContingentBuyerStrategy::new();
        for (key, choice) in doc.table {
            let profile = SellerProfile::parse(&key, goods)?;
            if profile.num_sellers() != doc.sellers {
                return Err(Error::input(format!("table profile {key:?} has the wrong number of sellers")));
            }
            strategy.insert(profile, BuyerAssignment::new(choice, doc.sellers)?);
        }
        Ok((SpeCertificate { on_path, strategy }, doc.instance))
    }
}

/// Checks that every table entry is a buyer equilibrium and that no seller gains
/// by a unilateral deviation. All violations are reported, not just the first.
pub fn verify_spe_certificate(v: &ValuationMatrix, cert: &SpeCertificate) -> Result<SpeVerdict> {
    let sellers = cert.sellers();
    let universe: Vec<_> = enumerate_partitions(v.num_goods())?.collect();
    let lookup = |profile: &SellerProfile| {
        cert.strategy
            .get(profile)
            .ok_or_else(|| Error::MissingProfile(profile.to_string()))
    };
    let on_path = lookup(&cert.on_path)?;

    // Totality first, so an incomplete table is an error rather than a partial verdict.
    let mut deviations = Vec::new();
    for s in 0..sellers {
        for p in &universe {
            if p != cert.on_path.partition(s) {
                let profile = cert.on_path.with_deviation(s, p.clone());
                lookup(&profile)?;
                deviations.push((s, profile));
            }
        }
    }

    let mut violations = Vec::new();
    for (profile, assignment) in cert.strategy.iter() {
        for b in 0..v.num_buyers() {
            let from = assignment.seller_of(b);
            let current = buyer_utility(v, profile, assignment, b)?;
            for to in (0..sellers).filter(|&t| t != from) {
                let moved = assignment.with_move(b, to);
                let delta = buyer_utility(v, profile, &moved, b)? - current;
                if delta > Rational::from_integer(0) {
                    violations.push(Violation::Buyer {
                        profile: profile.clone(),
                        buyer: b,
                        from,
                        to,
                        delta,
                    });
                }
            }
        }
    }

    let revenue: Vec<Rational> = (0..sellers)
        .map(|s| seller_utility(v, &cert.on_path, on_path, s))
        .collect::<Result<_>>()?;
    for (s, profile) in deviations {
        let delta = seller_utility(v, &profile, lookup(&profile)?, s)? - revenue[s];
        if delta > Rational::from_integer(0) {
            violations.push(Violation::Seller {
                seller: s,
                deviation: profile,
                delta,
            });
        }
    }
    Ok(SpeVerdict { violations })
}

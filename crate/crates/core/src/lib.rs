//! Exact analysis of signalling competition.
//!
//! Sellers each pick a partition of the good's variants (what they reveal about
//! a uniformly drawn variant), buyers pick a seller, and every seller runs a
//! second-price auction among the buyers it attracted. Valuations are binary.
//!
//! The crate computes utilities and social welfare with exact rationals,
//! solves the buyer subgames (a potential game), searches for subgame-perfect
//! equilibria with pure seller strategies, analyses the single-seller
//! (monopoly) case and checks the welfare bounds that relate monopoly,
//! competition and the optimum.

pub mod budget;
pub mod certificate;
pub mod equilibrium;
pub mod error;
pub mod harness;
pub mod market;
pub mod model;
pub mod monopoly;
pub mod partition;
pub mod profile;
pub mod rational;
pub mod utility;
pub mod verdict;

pub use budget::Budget;
pub use certificate::{verify_spe_certificate, SpeCertificate, SpeVerdict, Violation};
pub use equilibrium::{
    best_response_dynamics, compute_opt, enumerate_subgame_nash, find_pure_spe,
    is_nash_assignment, select_buyer_equilibrium, PureSpe, SelectionRule, SpeRecord, SpeSearch,
    SubgameResult,
};
pub use error::{Error, Result};
pub use model::{BuyerSet, DemandProfile, GoodSet, IndexSet, TopTwo, ValuationMatrix};
pub use monopoly::{
    analyze_monopoly, analyze_monopoly_summary, check_monopoly_bounds, monopoly_rows,
    top_pair_split, MonopolyAnalysis, MonopolyRow,
};
pub use partition::{bell_number, enumerate_partitions, is_refinement, Partition};
pub use profile::{BuyerAssignment, ContingentBuyerStrategy, SellerProfile};
pub use rational::Rational;
pub use utility::{buyer_utility, seller_utility, social_welfare};
pub use verdict::{Relation, Status, Verdict};

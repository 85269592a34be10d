//! Buyer subgames, subgame-perfect equilibria with pure seller strategies, and the welfare optimum.
//!
//! Once the sellers have committed to partitions, the buyers play a game whose
//! exact potential is `S * SW`: when one buyer switches seller, its utility
//! changes by exactly the change in `S * SW`. Best-response dynamics therefore
//! terminate and pure Nash equilibria always exist.
//!
//! Which buyer equilibrium is played in each subgame is a modelling choice. The
//! search here plays the welfare-maximal equilibrium on the equilibrium path and,
//! after a unilateral seller deviation, the equilibrium that is worst for the
//! deviator. Ties are broken lexicographically on the assignment vector.

use std::collections::HashMap;

use smallvec::SmallVec;

use crate::budget::{saturating_pow, Budget};
use crate::certificate::SpeCertificate;
use crate::error::{Error, Result};
use crate::market::{Market, Tables};
use crate::model::{GoodSet, ValuationMatrix};
use crate::partition::{bell_number, enumerate_partitions_up_to, Partition};
use crate::profile::{BuyerAssignment, ContingentBuyerStrategy, SellerProfile};
use crate::rational::Rational;

/// Total dense-table entries the profile search may allocate.
const SEARCH_TABLE_ENTRIES: u128 = 1 << 26;

/// Outcome of best-response dynamics in one subgame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgameResult {
    pub assignment: BuyerAssignment,
    /// Verified by checking every unilateral buyer deviation.
    pub is_nash: bool,
    /// Improving moves made.
    pub steps: usize,
    /// `S * SW` at the final assignment.
    pub potential: Rational,
}

/// How the buyers pick among the Nash equilibria of a subgame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Highest social welfare.
    PotentialMax,
    /// Lowest revenue for the given seller.
    Punish(usize),
}

/// Per-seller auction outcomes in one seller profile.
trait Outcomes {
    fn sellers(&self) -> usize;
    fn welfare(&self, seller: usize, bidders: u64) -> u16;
    fn revenue(&self, seller: usize, bidders: u64) -> u16;
    fn surplus(&self, seller: usize, bidders: u64, buyer: usize) -> u16;
}

/// Evaluates through the markets themselves.
struct Direct<'a>(&'a [&'a Market]);

impl Outcomes for Direct<'_> {
    fn sellers(&self) -> usize {
        self.0.len()
    }
    #[inline]
    fn welfare(&self, seller: usize, bidders: u64) -> u16 {
        self.0[seller].welfare(bidders)
    }
    #[inline]
    fn revenue(&self, seller: usize, bidders: u64) -> u16 {
        self.0[seller].revenue(bidders)
    }
    #[inline]
    fn surplus(&self, seller: usize, bidders: u64, buyer: usize) -> u16 {
        self.0[seller].surplus(bidders, buyer)
    }
}

/// Reads dense tables directly, skipping the per-call table check.
struct Dense<'a> {
    lanes: &'a [Tables<'a>],
    buyers: usize,
}

impl Outcomes for Dense<'_> {
    fn sellers(&self) -> usize {
        self.lanes.len()
    }
    #[inline]
    fn welfare(&self, seller: usize, bidders: u64) -> u16 {
        self.lanes[seller].welfare[bidders as usize]
    }
    #[inline]
    fn revenue(&self, seller: usize, bidders: u64) -> u16 {
        self.lanes[seller].revenue[bidders as usize]
    }
    #[inline]
    fn surplus(&self, seller: usize, bidders: u64, buyer: usize) -> u16 {
        self.lanes[seller].surplus[bidders as usize * self.buyers + buyer]
    }
}

struct Subgame<O> {
    outcomes: O,
    buyers: usize,
}

impl<O: Outcomes> Subgame<O> {
    fn sellers(&self) -> usize {
        self.outcomes.sellers()
    }

    fn masks(&self, choice: &[u8]) -> SmallVec<[u64; 4]> {
        let mut masks: SmallVec<[u64; 4]> = SmallVec::from_elem(0, self.sellers());
        for (b, &s) in choice.iter().enumerate() {
            masks[s as usize] |= 1 << b;
        }
        masks
    }

    /// Best strictly improving switch for `buyer`, lowest seller index on ties.
    fn best_improvement(&self, buyer: usize, choice: &[u8], masks: &[u64]) -> Option<usize> {
        let current = choice[buyer] as usize;
        let bit = 1u64 << buyer;
        let mut best = self.outcomes.surplus(current, masks[current], buyer);
        let mut target = None;
        for (s, &mask) in masks.iter().enumerate() {
            if s != current {
                let value = self.outcomes.surplus(s, mask | bit, buyer);
                if value > best {
                    best = value;
                    target = Some(s);
                }
            }
        }
        target
    }

    #[inline]
    fn is_nash(&self, choice: &[u8], masks: &[u64]) -> bool {
        for (b, &s) in choice.iter().enumerate() {
            let s = s as usize;
            let bit = 1u64 << b;
            let current = self.outcomes.surplus(s, masks[s], b);
            for (t, &mask) in masks.iter().enumerate() {
                if t != s && self.outcomes.surplus(t, mask | bit, b) > current {
                    return false;
                }
            }
        }
        true
    }

    fn welfare_units(&self, masks: &[u64]) -> u32 {
        masks
            .iter()
            .enumerate()
            .map(|(s, &mask)| self.outcomes.welfare(s, mask) as u32)
            .sum()
    }

    /// Visits every Nash assignment in lexicographic order with its index in that order.
    fn for_each_nash(&self, odometer: &mut Odometer, mut visit: impl FnMut(u64, &[u8], &[u64])) {
        odometer.reset(self.sellers(), self.buyers);
        let mut code = 0u64;
        loop {
            if self.is_nash(&odometer.digits, &odometer.masks) {
                visit(code, &odometer.digits, &odometer.masks);
            }
            if !odometer.advance() {
                break;
            }
            code += 1;
        }
    }

    /// Writes each seller's revenue in the welfare-maximal equilibrium to `on_path`
    /// and its lowest equilibrium revenue to `punish`; returns that equilibrium's
    /// code and welfare.
    fn summarize(&self, odometer: &mut Odometer, on_path: &mut [u16], punish: &mut [u16]) -> (u64, u32) {
        let mut found = false;
        let (mut best_code, mut best_welfare) = (0u64, 0u32);
        punish.fill(u16::MAX);
        self.for_each_nash(odometer, |code, _, masks| {
            let welfare = self.welfare_units(masks);
            let better = !found || welfare > best_welfare;
            for (s, &mask) in masks.iter().enumerate() {
                let revenue = self.outcomes.revenue(s, mask);
                if better {
                    on_path[s] = revenue;
                }
                punish[s] = punish[s].min(revenue);
            }
            if better {
                best_welfare = welfare;
                best_code = code;
            }
            found = true;
        });
        assert!(found, "buyer subgame without a pure Nash equilibrium");
        (best_code, best_welfare)
    }

    fn select(&self, rule: SelectionRule) -> Option<Vec<u8>> {
        let mut best: Option<(i64, Vec<u8>)> = None;
        self.for_each_nash(&mut Odometer::default(), |_, choice, masks| {
            let score = match rule {
                SelectionRule::PotentialMax => self.welfare_units(masks) as i64,
                SelectionRule::Punish(s) => -(self.outcomes.revenue(s, masks[s]) as i64),
            };
            if best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, choice.to_vec()));
            }
        });
        best.map(|(_, choice)| choice)
    }
}

/// Walks `S^B` assignments in lexicographic order (buyer 0 most significant),
/// keeping each seller's bidder mask current.
#[derive(Default)]
struct Odometer {
    sellers: usize,
    digits: Vec<u8>,
    masks: Vec<u64>,
}

impl Odometer {
    fn new(sellers: usize, buyers: usize) -> Self {
        let mut odometer = Odometer::default();
        odometer.reset(sellers, buyers);
        odometer
    }

    fn reset(&mut self, sellers: usize, buyers: usize) {
        self.sellers = sellers;
        self.digits.clear();
        self.digits.resize(buyers, 0);
        self.masks.clear();
        self.masks.resize(sellers, 0);
        self.masks[0] = if buyers == 64 { u64::MAX } else { (1u64 << buyers) - 1 };
    }

    #[inline]
    fn advance(&mut self) -> bool {
        for i in (0..self.digits.len()).rev() {
            let bit = 1u64 << i;
            let old = self.digits[i] as usize;
            self.masks[old] &= !bit;
            if old + 1 < self.sellers {
                self.digits[i] = (old + 1) as u8;
                self.masks[old + 1] |= bit;
                return true;
            }
            self.digits[i] = 0;
            self.masks[0] |= bit;
        }
        false
    }
}

fn decode(mut code: u64, sellers: usize, buyers: usize) -> Vec<usize> {
    let mut choice = vec![0; buyers];
    for slot in choice.iter_mut().rev() {
        *slot = (code % sellers as u64) as usize;
        code /= sellers as u64;
    }
    choice
}

fn check_profile(v: &ValuationMatrix, profile: &SellerProfile) -> Result<()> {
    if profile.num_goods() != v.num_goods() {
        return Err(Error::input(format!(
            "profile partitions {} goods, matrix has {}",
            profile.num_goods(),
            v.num_goods()
        )));
    }
    if profile.num_sellers() > u8::MAX as usize {
        return Err(Error::input("at most 255 sellers are supported"));
    }
    Ok(())
}

fn check_assignment(v: &ValuationMatrix, profile: &SellerProfile, a: &BuyerAssignment) -> Result<()> {
    if a.num_buyers() != v.num_buyers() {
        return Err(Error::input(format!(
            "assignment covers {} buyers, matrix has {}",
            a.num_buyers(),
            v.num_buyers()
        )));
    }
    if a.choices().iter().any(|&s| s >= profile.num_sellers()) {
        return Err(Error::input("assignment names a seller outside the profile"));
    }
    Ok(())
}

fn markets_for(v: &ValuationMatrix, profile: &SellerProfile) -> Vec<Market> {
    profile
        .partitions()
        .iter()
        .map(|p| Market::new(v, p))
        .collect()
}

fn potential(welfare_units: u32, goods: usize) -> Rational {
    Rational::new(welfare_units as i64, goods as i64)
}

/// Sequential best-response dynamics from `start`.
///
/// Buyers are scanned in index order; a buyer moves only on a strict gain, to its
/// best seller (lowest index on ties). Every move raises the potential `S * SW`,
/// so the loop ends; a hard cap of `S^B` moves guards against bugs.
pub fn best_response_dynamics(
    v: &ValuationMatrix,
    profile: &SellerProfile,
    start: &BuyerAssignment,
) -> Result<SubgameResult> {
    check_profile(v, profile)?;
    check_assignment(v, profile, start)?;
    let markets = markets_for(v, profile);
    let refs: Vec<&Market> = markets.iter().collect();
    let game = Subgame {
        outcomes: Direct(&refs),
        buyers: v.num_buyers(),
    };
    let mut choice: Vec<u8> = start.choices().iter().map(|&s| s as u8).collect();
    let mut masks = game.masks(&choice);
    let cap = saturating_pow(profile.num_sellers(), v.num_buyers());
    let mut steps = 0usize;
    'passes: loop {
        let mut moved = false;
        for b in 0..v.num_buyers() {
            if let Some(target) = game.best_improvement(b, &choice, &masks) {
                let bit = 1u64 << b;
                masks[choice[b] as usize] &= !bit;
                masks[target] |= bit;
                choice[b] = target as u8;
                steps += 1;
                moved = true;
                if steps as u128 >= cap {
                    break 'passes;
                }
            }
        }
        if !moved {
            break;
        }
    }
    let is_nash = game.is_nash(&choice, &masks);
    Ok(SubgameResult {
        potential: potential(game.welfare_units(&masks), v.num_goods()),
        assignment: BuyerAssignment::from_choice_unchecked(
            choice.into_iter().map(usize::from).collect(),
        ),
        is_nash,
        steps,
    })
}

/// True iff no buyer strictly gains by switching to another seller.
pub fn is_nash_assignment(
    v: &ValuationMatrix,
    profile: &SellerProfile,
    assignment: &BuyerAssignment,
) -> Result<bool> {
    check_profile(v, profile)?;
    check_assignment(v, profile, assignment)?;
    let markets = markets_for(v, profile);
    let refs: Vec<&Market> = markets.iter().collect();
    let game = Subgame {
        outcomes: Direct(&refs),
        buyers: v.num_buyers(),
    };
    let choice: Vec<u8> = assignment.choices().iter().map(|&s| s as u8).collect();
    let masks = game.masks(&choice);
    Ok(game.is_nash(&choice, &masks))
}

fn check_assignment_budget(v: &ValuationMatrix, sellers: usize, budget: &Budget) -> Result<()> {
    budget.check_assignments(
        "buyer assignment enumeration",
        saturating_pow(sellers, v.num_buyers()),
    )
}

/// Every pure Nash equilibrium of the buyer subgame, in lexicographic order.
pub fn enumerate_subgame_nash(
    v: &ValuationMatrix,
    profile: &SellerProfile,
    budget: &Budget,
) -> Result<Vec<BuyerAssignment>> {
    check_profile(v, profile)?;
    check_assignment_budget(v, profile.num_sellers(), budget)?;
    let markets = markets_for(v, profile);
    let refs: Vec<&Market> = markets.iter().collect();
    let game = Subgame {
        outcomes: Direct(&refs),
        buyers: v.num_buyers(),
    };
    let mut found = Vec::new();
    game.for_each_nash(&mut Odometer::default(), |_, choice, _| {
        found.push(BuyerAssignment::from_choice_unchecked(
            choice.iter().map(|&s| s as usize).collect(),
        ));
    });
    Ok(found)
}

/// The buyer equilibrium chosen by `rule` (lexicographically first among the optimal ones).
pub fn select_buyer_equilibrium(
    v: &ValuationMatrix,
    profile: &SellerProfile,
    rule: SelectionRule,
    budget: &Budget,
) -> Result<BuyerAssignment> {
    check_profile(v, profile)?;
    if let SelectionRule::Punish(s) = rule {
        if s >= profile.num_sellers() {
            return Err(Error::input(format!("cannot punish seller {s}: no such seller")));
        }
    }
    check_assignment_budget(v, profile.num_sellers(), budget)?;
    let markets = markets_for(v, profile);
    let refs: Vec<&Market> = markets.iter().collect();
    let game = Subgame {
        outcomes: Direct(&refs),
        buyers: v.num_buyers(),
    };
    let choice = game
        .select(rule)
        .expect("buyer subgame without a pure Nash equilibrium");
    Ok(BuyerAssignment::from_choice_unchecked(
        choice.into_iter().map(usize::from).collect(),
    ))
}

/// Maximum social welfare over all seller and buyer strategies.
///
/// Full disclosure by every seller is optimal for any fixed assignment, so only
/// assignments are searched: seller `s` contributes one unit per good that some
/// buyer at `s` values.
pub fn compute_opt(v: &ValuationMatrix, sellers: usize, budget: &Budget) -> Result<Rational> {
    if sellers == 0 || sellers > u8::MAX as usize {
        return Err(Error::input("the number of sellers must be between 1 and 255"));
    }
    check_assignment_budget(v, sellers, budget)?;
    let buyers = v.num_buyers();
    let rows: Vec<u64> = (0..buyers).map(|b| v.row(b).bits()).collect();
    let cover = |mask: u64| {
        let mut covered = 0u64;
        let mut rest = mask;
        while rest != 0 {
            covered |= rows[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        covered.count_ones()
    };
    // Coverage of every buyer set, when that table is small.
    let table: Option<Vec<u8>> = (buyers <= 20).then(|| {
        let mut covered = vec![0u64; 1 << buyers];
        for mask in 1..covered.len() {
            covered[mask] = covered[mask & (mask - 1)] | rows[mask.trailing_zeros() as usize];
        }
        covered.iter().map(|c| c.count_ones() as u8).collect()
    });
    // No good can be covered by more sellers than buyers who want it.
    let ceiling: u32 = (0..v.num_goods())
        .map(|g| v.column_demand(g).min(sellers) as u32)
        .sum();
    let mut odometer = Odometer::new(sellers, buyers);
    let mut best = 0u32;
    while best < ceiling {
        let total: u32 = match &table {
            Some(t) => odometer.masks.iter().map(|&m| t[m as usize] as u32).sum(),
            None => odometer.masks.iter().map(|&m| cover(m)).sum(),
        };
        best = best.max(total);
        if !odometer.advance() {
            break;
        }
    }
    Ok(Rational::new(best as i64, (sellers * v.num_goods()) as i64))
}

/// A subgame-perfect equilibrium with pure seller strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureSpe {
    pub profile: SellerProfile,
    /// Buyer play on the path and after every unilateral seller deviation.
    pub strategy: ContingentBuyerStrategy,
    pub welfare: Rational,
}

impl PureSpe {
    pub fn certificate(&self) -> SpeCertificate {
        SpeCertificate {
            on_path: self.profile.clone(),
            strategy: self.strategy.clone(),
        }
    }
}

/// One equilibrium found by [`SpeSearch`], identified by its profile index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpeRecord {
    pub profile_index: usize,
    pub welfare: Rational,
}

/// Exhaustive search over pure seller profiles.
///
/// Each of the `Bell(G)^S` profiles is solved for its welfare-maximal buyer
/// equilibrium and, for every seller, the lowest revenue that seller earns in any
/// buyer equilibrium. A profile is an equilibrium when no seller can switch to a
/// partition whose worst-case revenue beats its on-path revenue.
///
/// Partitions that induce the same auction outcome for every bidder set are
/// interchangeable, so profiles are solved once per combination of such classes.
pub struct SpeSearch {
    v: ValuationMatrix,
    /// Buyers with a nonempty row; the markets only see these.
    active: Vec<usize>,
    sellers: usize,
    universe: Vec<Partition>,
    markets: Vec<Market>,
    class_of: Vec<usize>,
    /// Universe indices in each class, ascending.
    members: Vec<Vec<usize>>,
    profile_count: usize,
    // Indexed by class profile, seller 0 most significant.
    best_code: Vec<u64>,
    best_welfare: Vec<u32>,
    stable: Vec<usize>,
}

/// Per-class-profile results of the solve phase.
struct Solved {
    sellers: usize,
    best_code: Vec<u64>,
    best_welfare: Vec<u32>,
    on_path: Vec<u16>,
    punish: Vec<u16>,
}

impl Solved {
    fn new(count: usize, sellers: usize) -> Self {
        Solved {
            sellers,
            best_code: vec![0; count],
            best_welfare: vec![0; count],
            on_path: vec![0; count * sellers],
            punish: vec![0; count * sellers],
        }
    }

    fn record<O: Outcomes>(&mut self, i: usize, game: &Subgame<O>, odometer: &mut Odometer) {
        let range = i * self.sellers..(i + 1) * self.sellers;
        let (code, welfare) = game.summarize(
            odometer,
            &mut self.on_path[range.clone()],
            &mut self.punish[range],
        );
        self.best_code[i] = code;
        self.best_welfare[i] = welfare;
    }
}

/// Groups markets with identical tables; markets without tables stay alone.
fn classify(markets: &[Market]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut seen: HashMap<Tables<'_>, usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(markets.len());
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, market) in markets.iter().enumerate() {
        let class = match market.tables() {
            Some(t) => *seen.entry(t).or_insert(members.len()),
            None => members.len(),
        };
        if class == members.len() {
            members.push(Vec::new());
        }
        members[class].push(i);
        class_of.push(class);
    }
    (class_of, members)
}

impl SpeSearch {
    pub fn run(v: &ValuationMatrix, sellers: usize, budget: &Budget) -> Result<Self> {
        if sellers == 0 || sellers > u8::MAX as usize {
            return Err(Error::input("the number of sellers must be between 1 and 255"));
        }
        let bell = bell_number(v.num_goods());
        let profile_count = saturating_pow(bell.min(usize::MAX as u128) as usize, sellers);
        budget.check_profiles("seller profile enumeration", profile_count)?;
        check_assignment_budget(v, sellers, budget)?;
        let universe: Vec<Partition> =
            enumerate_partitions_up_to(v.num_goods(), budget.max_goods)?.collect();
        let n = universe.len();
        let profile_count = profile_count as usize;

        // Buyers who value nothing never move and never set a price, so they are
        // left out of the solve and placed at seller 0 afterwards.
        let mut active: Vec<usize> = (0..v.num_buyers()).filter(|&b| !v.row(b).is_empty()).collect();
        if active.is_empty() {
            active.push(0);
        }
        let rows: Vec<GoodSet> = active.iter().map(|&b| v.row(b)).collect();
        let reduced = ValuationMatrix::from_row_sets(v.num_goods(), &rows)?;

        // Dense tables for every partition, as long as they fit together in memory.
        let buyers = reduced.num_buyers();
        let table_entries = (n as u128) << buyers.min(64) as u32;
        let table_limit = if buyers < 40 && table_entries * (buyers as u128 + 2) <= SEARCH_TABLE_ENTRIES {
            usize::MAX
        } else {
            0
        };
        let markets: Vec<Market> = universe
            .iter()
            .map(|p| Market::with_table_limit(&reduced, p, table_limit))
            .collect();
        let (class_of, members) = classify(&markets);
        let k = members.len();
        let count = k.pow(sellers as u32);

        let mut solved = Solved::new(count, sellers);
        let mut odometer = Odometer::default();
        let mut digits = vec![0usize; sellers];
        let dense: Option<Vec<Tables<'_>>> = members.iter().map(|m| markets[m[0]].tables()).collect();
        match &dense {
            Some(tables) => {
                let mut lanes = Vec::with_capacity(sellers);
                for i in 0..count {
                    lanes.clear();
                    lanes.extend(digits.iter().map(|&c| tables[c]));
                    let game = Subgame {
                        outcomes: Dense { lanes: &lanes, buyers },
                        buyers,
                    };
                    solved.record(i, &game, &mut odometer);
                    increment(&mut digits, k);
                }
            }
            None => {
                let mut refs = Vec::with_capacity(sellers);
                for i in 0..count {
                    refs.clear();
                    refs.extend(digits.iter().map(|&c| &markets[members[c][0]]));
                    let game = Subgame {
                        outcomes: Direct(&refs),
                        buyers,
                    };
                    solved.record(i, &game, &mut odometer);
                    increment(&mut digits, k);
                }
            }
        }

        // ceiling[i] = max over classes q of the punish revenue of s at class profile i
        // with s's coordinate replaced by q. Including q = current is harmless: punish
        // revenue never exceeds on-path revenue.
        let mut stable = vec![true; count];
        for s in 0..sellers {
            let stride = k.pow((sellers - 1 - s) as u32);
            for i in 0..count {
                if i / stride % k != 0 {
                    continue;
                }
                let top = (0..k)
                    .map(|q| solved.punish[(i + q * stride) * sellers + s])
                    .max()
                    .unwrap_or(0);
                for q in 0..k {
                    let j = i + q * stride;
                    if top > solved.on_path[j * sellers + s] {
                        stable[j] = false;
                    }
                }
            }
        }

        Ok(SpeSearch {
            v: v.clone(),
            active,
            sellers,
            universe,
            markets,
            class_of,
            members,
            profile_count,
            best_code: solved.best_code,
            best_welfare: solved.best_welfare,
            stable: (0..count).filter(|&i| stable[i]).collect(),
        })
    }

    fn welfare(&self, class_profile: usize) -> Rational {
        Rational::new(
            self.best_welfare[class_profile] as i64,
            (self.sellers * self.v.num_goods()) as i64,
        )
    }

    fn class_digits(&self, mut class_profile: usize) -> Vec<usize> {
        let k = self.members.len();
        let mut digits = vec![0; self.sellers];
        for d in digits.iter_mut().rev() {
            *d = class_profile % k;
            class_profile /= k;
        }
        digits
    }

    fn class_profile(&self, index: usize) -> usize {
        let k = self.members.len();
        self.digits(index)
            .into_iter()
            .fold(0, |acc, d| acc * k + self.class_of[d])
    }

    fn profile_index(&self, digits: &[usize]) -> usize {
        let n = self.universe.len();
        digits.iter().fold(0, |acc, &d| acc * n + d)
    }

    /// Every equilibrium profile, ascending by profile index.
    pub fn equilibria(&self) -> Vec<SpeRecord> {
        let mut out = Vec::with_capacity(self.equilibrium_count());
        for &c in &self.stable {
            let classes = self.class_digits(c);
            let welfare = self.welfare(c);
            let mut pick = vec![0usize; self.sellers];
            loop {
                let digits: Vec<usize> = (0..self.sellers)
                    .map(|s| self.members[classes[s]][pick[s]])
                    .collect();
                out.push(SpeRecord {
                    profile_index: self.profile_index(&digits),
                    welfare,
                });
                let mut s = self.sellers;
                loop {
                    if s == 0 {
                        break;
                    }
                    s -= 1;
                    pick[s] += 1;
                    if pick[s] < self.members[classes[s]].len() {
                        break;
                    }
                    pick[s] = 0;
                }
                if pick.iter().all(|&p| p == 0) {
                    break;
                }
            }
        }
        out.sort_unstable_by_key(|r| r.profile_index);
        out
    }

    /// One equilibrium per group of interchangeable ones, ascending by profile index.
    /// Members of a group differ only in partitions with identical auction outcomes.
    pub fn representatives(&self) -> Vec<SpeRecord> {
        self.stable
            .iter()
            .map(|&c| {
                let digits: Vec<usize> = self
                    .class_digits(c)
                    .into_iter()
                    .map(|class| self.members[class][0])
                    .collect();
                SpeRecord {
                    profile_index: self.profile_index(&digits),
                    welfare: self.welfare(c),
                }
            })
            .collect()
    }

    pub fn equilibrium_count(&self) -> usize {
        self.stable
            .iter()
            .map(|&c| {
                self.class_digits(c)
                    .into_iter()
                    .map(|class| self.members[class].len())
                    .product::<usize>()
            })
            .sum()
    }

    /// Lowest and highest equilibrium welfare, if any equilibrium exists.
    pub fn welfare_range(&self) -> Option<(Rational, Rational)> {
        let min = self.stable.iter().map(|&c| self.best_welfare[c]).min()?;
        let max = self.stable.iter().map(|&c| self.best_welfare[c]).max()?;
        let scale = (self.sellers * self.v.num_goods()) as i64;
        Some((Rational::new(min as i64, scale), Rational::new(max as i64, scale)))
    }

    pub fn profile_count(&self) -> usize {
        self.profile_count
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let n = self.universe.len();
        let mut digits = vec![0; self.sellers];
        for d in digits.iter_mut().rev() {
            *d = index % n;
            index /= n;
        }
        digits
    }

    pub fn profile(&self, index: usize) -> SellerProfile {
        let partitions = self
            .digits(index)
            .into_iter()
            .map(|d| self.universe[d].clone())
            .collect();
        SellerProfile::new(partitions).expect("universe partitions share the good set")
    }

    /// The welfare-maximal buyer equilibrium played at profile `index`.
    pub fn on_path_assignment(&self, index: usize) -> BuyerAssignment {
        self.expand(&decode(
            self.best_code[self.class_profile(index)],
            self.sellers,
            self.active.len(),
        ))
    }

    /// `S * SW` at profile `index` under welfare-maximal buyer play.
    pub fn on_path_potential(&self, index: usize) -> Rational {
        potential(self.best_welfare[self.class_profile(index)], self.v.num_goods())
    }

    /// Lifts a choice for the active buyers to all buyers.
    fn expand(&self, choice: &[usize]) -> BuyerAssignment {
        let mut full = vec![0; self.v.num_buyers()];
        for (&b, &s) in self.active.iter().zip(choice) {
            full[b] = s;
        }
        BuyerAssignment::from_choice_unchecked(full)
    }

    fn punish_assignment(&self, digits: &[usize], seller: usize) -> BuyerAssignment {
        let refs: Vec<&Market> = digits.iter().map(|&d| &self.markets[d]).collect();
        let game = Subgame {
            outcomes: Direct(&refs),
            buyers: self.active.len(),
        };
        let choice = game
            .select(SelectionRule::Punish(seller))
            .expect("buyer subgame without a pure Nash equilibrium");
        self.expand(&choice.into_iter().map(usize::from).collect::<Vec<_>>())
    }

    /// The full contingent buyer strategy for an equilibrium profile.
    pub fn strategy(&self, index: usize) -> ContingentBuyerStrategy {
        let digits = self.digits(index);
        let mut strategy = ContingentBuyerStrategy::new();
        strategy.insert(self.profile(index), self.on_path_assignment(index));
        for s in 0..self.sellers {
            for p in 0..self.universe.len() {
                if p == digits[s] {
                    continue;
                }
                let mut deviated = digits.clone();
                deviated[s] = p;
                let profile = SellerProfile::new(
                    deviated.iter().map(|&d| self.universe[d].clone()).collect(),
                )
                .expect("universe partitions share the good set");
                strategy.insert(profile, self.punish_assignment(&deviated, s));
            }
        }
        strategy
    }

    pub fn certificate(&self, index: usize) -> SpeCertificate {
        SpeCertificate {
            on_path: self.profile(index),
            strategy: self.strategy(index),
        }
    }
}

fn increment(digits: &mut [usize], radix: usize) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return;
        }
        *d = 0;
    }
}

/// All pure-seller subgame-perfect equilibria with their contingent buyer strategies.
///
/// The list may be empty: existence is only guaranteed once sellers may mix.
pub fn find_pure_spe(v: &ValuationMatrix, sellers: usize, budget: &Budget) -> Result<Vec<PureSpe>> {
    let search = SpeSearch::run(v, sellers, budget)?;
    Ok(search
        .equilibria()
        .into_iter()
        .map(|record| PureSpe {
            profile: search.profile(record.profile_index),
            strategy: search.strategy(record.profile_index),
            welfare: record.welfare,
        })
        .collect())
}

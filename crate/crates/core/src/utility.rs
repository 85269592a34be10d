//! Exact buyer utility, seller revenue and social welfare.
//!
//! Each seller sells a uniformly drawn variant and announces only the block of
//! its partition that contains it. For a block, the bidders' expected values are
//! proportional to their block valuations, so the winner pays the second-highest
//! block valuation and the allocation is efficient iff the winner values the
//! realised variant. Averaging over blocks gives the closed forms below, all with
//! denominator dividing `S * G`.

use crate::error::{Error, Result};
use crate::model::ValuationMatrix;
use crate::profile::{BuyerAssignment, SellerProfile};
use crate::rational::Rational;

fn check_consistent(
    v: &ValuationMatrix,
    profile: &SellerProfile,
    assignment: &BuyerAssignment,
) -> Result<()> {
    if profile.num_goods() != v.num_goods() {
        return Err(Error::input(format!(
            "profile partitions {} goods, matrix has {}",
            profile.num_goods(),
            v.num_goods()
        )));
    }
    if assignment.num_buyers() != v.num_buyers() {
        return Err(Error::input(format!(
            "assignment covers {} buyers, matrix has {}",
            assignment.num_buyers(),
            v.num_buyers()
        )));
    }
    let sellers = profile.num_sellers();
    if let Some(b) = (0..v.num_buyers()).find(|&b| assignment.seller_of(b) >= sellers) {
        return Err(Error::input(format!(
            "buyer {b} chooses seller {} of {sellers}",
            assignment.seller_of(b)
        )));
    }
    Ok(())
}

/// `u_b = (1/G) * sum over blocks of b's seller of max(v_b(block) - V2(co-bidders, block), 0)`.
///
/// The co-bidders include `b` itself.
pub fn buyer_utility(
    v: &ValuationMatrix,
    profile: &SellerProfile,
    assignment: &BuyerAssignment,
    buyer: usize,
) -> Result<Rational> {
    check_consistent(v, profile, assignment)?;
    if buyer >= v.num_buyers() {
        return Err(Error::input(format!("buyer {buyer} out of range")));
    }
    let seller = assignment.seller_of(buyer);
    let bidders = assignment.bidders(seller);
    let mut total = 0i64;
    for block in profile.partition(seller).blocks() {
        let own = v.block_value(buyer, block)? as i64;
        let price = v.top_two(bidders, block)?.second as i64;
        total += (own - price).max(0);
    }
    Ok(Rational::new(total, v.num_goods() as i64))
}

/// `u_s = (1/G) * sum over blocks of V2(bidders at s, block)`: expected second-price revenue.
pub fn seller_utility(
    v: &ValuationMatrix,
    profile: &SellerProfile,
    assignment: &BuyerAssignment,
    seller: usize,
) -> Result<Rational> {
    check_consistent(v, profile, assignment)?;
    if seller >= profile.num_sellers() {
        return Err(Error::input(format!("seller {seller} out of range")));
    }
    let bidders = assignment.bidders(seller);
    let mut total = 0i64;
    for block in profile.partition(seller).blocks() {
        total += v.top_two(bidders, block)?.second as i64;
    }
    Ok(Rational::new(total, v.num_goods() as i64))
}

/// `SW = (1/(S G)) * sum over sellers and their blocks of V1(bidders, block)`.
pub fn social_welfare(
    v: &ValuationMatrix,
    profile: &SellerProfile,
    assignment: &BuyerAssignment,
) -> Result<Rational> {
    check_consistent(v, profile, assignment)?;
    let sellers = profile.num_sellers();
    let mut total = 0i64;
    for seller in 0..sellers {
        let bidders = assignment.bidders(seller);
        for block in profile.partition(seller).blocks() {
            total += v.top_two(bidders, block)?.first as i64;
        }
    }
    Ok(Rational::new(total, (sellers * v.num_goods()) as i64))
}

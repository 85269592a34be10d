//! Instances with known answers.
//!
//! | name | sellers | matrix |
//! |------|---------|--------|
//! | `ex41` | 1 | `[[1,0,1],[1,1,0],[0,1,1]]` |
//! | `ex51(G[,S])` | `S` (default 2) | `S` stacked `G x G` identities |
//! | `thm43-identity(G)` | 1 | `G x G` identity (default `G = 3`) |
//! | `thm44-2x2` | 1 | `2 x 2` identity |
//! | `thm63(S)` | `S` | `S` rows `(0 1)` then one row `(1 0)` |
//! | `thm65(S[,G])` | `S` | all-ones `S x G` (default `G = 2`) |
//!
//! Parameters may be written `name(a,b)` or `name:a:b`.

use crate::certificate::SpeCertificate;
use crate::error::{Error, Result};
use crate::harness::instance::Instance;
use crate::model::ValuationMatrix;
use crate::partition::{enumerate_partitions, Partition};
use crate::profile::{BuyerAssignment, ContingentBuyerStrategy, SellerProfile};

pub const NAMES: [&str; 6] = ["ex41", "ex51", "thm43-identity", "thm44-2x2", "thm63", "thm65"];

fn split_name(text: &str) -> Result<(&str, Vec<usize>)> {
    let text = text.trim();
    let (name, args): (&str, Vec<&str>) = if let Some(open) = text.find('(') {
        let inner = text[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::input(format!("unbalanced parentheses in {text:?}")))?;
        let args = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').collect()
        };
        (&text[..open], args)
    } else {
        let mut parts = text.split(':');
        let name = parts.next().unwrap_or("");
        (name, parts.collect())
    };
    let args = args
        .into_iter()
        .map(|a| {
            a.trim()
                .parse::<usize>()
                .map_err(|_| Error::input(format!("bad parameter {a:?} in {text:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name.trim(), args))
}

fn arity(name: &str, args: &[usize], min: usize, max: usize) -> Result<()> {
    if args.len() < min || args.len() > max {
        return Err(Error::input(format!(
            "{name} takes {min} to {max} parameters, got {}",
            args.len()
        )));
    }
    Ok(())
}

fn at_least(name: &str, what: &str, value: usize, min: usize) -> Result<()> {
    if value < min {
        return Err(Error::input(format!("{name}: {what} must be at least {min}, got {value}")));
    }
    Ok(())
}

fn label(name: &str, args: &[usize]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
        format!("{name}({})", args.join(","))
    }
}

/// Builds a named instance; the label is the canonical `name(a,b)` form.
pub fn named_instance(text: &str) -> Result<Instance> {
    let (name, args) = split_name(text)?;
    let (sellers, matrix, shown): (usize, ValuationMatrix, Vec<usize>) = match name {
        "ex41" => {
            arity(name, &args, 0, 0)?;
            (1, ValuationMatrix::from_rows(&[[1, 0, 1], [1, 1, 0], [0, 1, 1]])?, vec![])
        }
        "ex51" => {
            arity(name, &args, 1, 2)?;
            let goods = args[0];
            let sellers = args.get(1).copied().unwrap_or(2);
            at_least(name, "G", goods, 1)?;
            at_least(name, "S", sellers, 2)?;
            (sellers, ValuationMatrix::stacked_identity(goods, sellers)?, args.clone())
        }
        "thm43-identity" => {
            arity(name, &args, 0, 1)?;
            let goods = args.first().copied().unwrap_or(3);
            at_least(name, "G", goods, 1)?;
            (1, ValuationMatrix::identity(goods)?, vec![goods])
        }
        "thm44-2x2" => {
            arity(name, &args, 0, 0)?;
            (1, ValuationMatrix::identity(2)?, vec![])
        }
        "thm63" => {
            arity(name, &args, 1, 1)?;
            let sellers = args[0];
            at_least(name, "S", sellers, 2)?;
            let matrix = ValuationMatrix::from_fn(sellers + 1, 2, |b, g| (b < sellers) == (g == 1))?;
            (sellers, matrix, args.clone())
        }
        "thm65" => {
            arity(name, &args, 1, 2)?;
            let sellers = args[0];
            let goods = args.get(1).copied().unwrap_or(2);
            at_least(name, "S", sellers, 2)?;
            at_least(name, "G", goods, 1)?;
            (sellers, ValuationMatrix::ones(sellers, goods)?, vec![sellers, goods])
        }
        _ => {
            return Err(Error::input(format!(
                "unknown instance {name:?}; known: {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(Instance::new(sellers, matrix)?.with_label(label(name, &shown)))
}

/// The hand-built equilibrium of the stacked-identity instance: nobody discloses,
/// copy `k` of the buyers goes to seller `k`.
///
/// When seller `d` deviates to `p`, in each block of `p` the first buyer of copy
/// `d` interested in it stays with `d` and the others in copy `d` move to the next
/// seller; everyone else stays. Every such entry is a buyer equilibrium and earns
/// the deviator nothing.
pub fn ex51_certificate(goods: usize, sellers: usize) -> Result<SpeCertificate> {
    at_least("ex51", "G", goods, 1)?;
    at_least("ex51", "S", sellers, 2)?;
    let buyers = goods * sellers;
    let on_path = SellerProfile::uniform(sellers, Partition::trivial(goods));
    let split: Vec<usize> = (0..buyers).map(|b| b / goods).collect();
    let mut strategy = ContingentBuyerStrategy::new();
    strategy.insert(on_path.clone(), BuyerAssignment::new(split.clone(), sellers)?);
    for deviator in 0..sellers {
        let fallback = (deviator + 1) % sellers;
        for p in enumerate_partitions(goods)? {
            if p.is_trivial() {
                continue;
            }
            let mut choice = split.clone();
            for block in p.blocks() {
                // buyer deviator*G + g is the one in copy `deviator` who values good g
                for (rank, g) in block.iter().enumerate() {
                    if rank > 0 {
                        choice[deviator * goods + g] = fallback;
                    }
                }
            }
            strategy.insert(
                on_path.with_deviation(deviator, p),
                BuyerAssignment::new(choice, sellers)?,
            );
        }
    }
    Ok(SpeCertificate { on_path, strategy })
}

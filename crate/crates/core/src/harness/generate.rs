//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harness::instance::Instance;
use crate::model::{ValuationMatrix, MAX_DIMENSION};
use crate::rational::{self, Rational};

/// Redraws of an empty row before one entry is forced to 1.
const ROW_RETRIES: usize = 64;

/// Each entry is 1 with probability `density`, drawn exactly from ChaCha8 seeded
/// with `seed`. With `positive_demand`, empty rows are redrawn and, failing that,
/// get one uniformly chosen entry set.
pub fn generate_random(
    buyers: usize,
    goods: usize,
    sellers: usize,
    density: Rational,
    seed: u64,
    positive_demand: bool,
) -> Result<Instance> {
    if !(1..=MAX_DIMENSION).contains(&buyers) || !(1..=MAX_DIMENSION).contains(&goods) {
        return Err(Error::input(format!(
            "buyers and goods must be between 1 and {MAX_DIMENSION}"
        )));
    }
    if density < Rational::from_integer(0) || density > Rational::from_integer(1) {
        return Err(Error::input(format!(
            "density {} is outside [0, 1]",
            rational::to_text(&density)
        )));
    }
    let (num, den) = (*density.numer() as u64, *density.denom() as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(buyers);
    for _ in 0..buyers {
        let mut row = 0u64;
        for attempt in 0..=ROW_RETRIES {
            row = 0;
            for g in 0..goods {
                if rng.gen_range(0..den) < num {
                    row |= 1 << g;
                }
            }
            if row != 0 || !positive_demand || attempt == ROW_RETRIES {
                break;
            }
        }
        if row == 0 && positive_demand {
            row = 1 << rng.gen_range(0..goods);
        }
        rows.push(crate::model::GoodSet::from_bits(row));
    }
    let valuation = ValuationMatrix::from_row_sets(goods, &rows)?;
    let label = format!(
        "random(B={buyers},G={goods},S={sellers},d={},seed={seed}{})",
        rational::to_text(&density),
        if positive_demand { ",positive" } else { "" }
    );
    Ok(Instance::new(sellers, valuation)?
        .with_label(label)
        .with_seed(seed))
}

/// Caps on the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Seller profiles examined, `Bell(G)^S`. Also bounds the monopoly scan (`S = 1`).
    pub profiles: u128,
    /// Buyer assignments per subgame, `S^B`.
    pub assignments: u128,
    /// Largest good count for which partitions may be enumerated.
    pub max_goods: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            profiles: 1_000_000,
            assignments: 10_000_000,
            max_goods: 12,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            profiles: u128::MAX,
            assignments: u128::MAX,
            max_goods: 64,
        }
    }

    pub(crate) fn check_profiles(&self, what: &'static str, required: u128) -> crate::Result<()> {
        check(what, required, self.profiles)
    }

    pub(crate) fn check_assignments(
        &self,
        what: &'static str,
        required: u128,
    ) -> crate::Result<()> {
        check(what, required, self.assignments)
    }
}

fn check(what: &'static str, required: u128, budget: u128) -> crate::Result<()> {
    if required > budget {
        Err(crate::Error::Budget {
            what,
            required,
            budget,
        })
    } else {
        Ok(())
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn saturating_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

//! Partitions of the good set: the sellers' strategy space.
//!
//! A partition is stored as its restricted-growth sequence: `labels[g]` is the
//! block of good `g`, blocks are numbered in order of their smallest element,
//! so `labels[0] = 0` and every label is at most one more than the largest
//! label before it. The encoding is unique, which makes equality, ordering and
//! hashing O(G).

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::model::{GoodSet, MAX_DIMENSION};

/// Enumeration is refused above this many goods unless a larger limit is given.
pub const DEFAULT_MAX_GOODS: usize = 12;

type Labels = SmallVec<[u8; 16]>;

/// A partition of `{0, .., G-1}` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Labels,
}

impl Partition {
    /// One block per good (full disclosure).
    pub fn finest(goods: usize) -> Self {
        assert!((1..=MAX_DIMENSION).contains(&goods));
        Partition {
            labels: (0..goods as u8).collect(),
        }
    }

    /// A single block (no disclosure).
    pub fn trivial(goods: usize) -> Self {
        assert!((1..=MAX_DIMENSION).contains(&goods));
        Partition {
            labels: smallvec::smallvec![0; goods],
        }
    }

    /// Canonicalizes an arbitrary block labelling of the goods.
    pub fn from_labels<L: Copy + Eq>(labels: &[L]) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_DIMENSION {
            return Err(Error::input(format!(
                "a partition needs between 1 and {MAX_DIMENSION} goods"
            )));
        }
        let mut seen: Vec<L> = Vec::new();
        let canonical = labels
            .iter()
            .map(|l| match seen.iter().position(|s| s == l) {
                Some(i) => i as u8,
                None => {
                    seen.push(*l);
                    (seen.len() - 1) as u8
                }
            })
            .collect();
        Ok(Partition { labels: canonical })
    }

    /// Builds a partition from explicit blocks, checking they cover `0..goods` exactly once.
    pub fn from_blocks(goods: usize, blocks: &[GoodSet]) -> Result<Self> {
        if goods == 0 || goods > MAX_DIMENSION {
            return Err(Error::input(format!("cannot partition {goods} goods")));
        }
        let mut labels = vec![usize::MAX; goods];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::input("partition blocks must be non-empty"));
            }
            for g in block.iter() {
                if g >= goods {
                    return Err(Error::input(format!("good {g} out of range (G = {goods})")));
                }
                if labels[g] != usize::MAX {
                    return Err(Error::input(format!("good {g} appears in two blocks")));
                }
                labels[g] = i;
            }
        }
        if let Some(g) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::input(format!("good {g} is in no block")));
        }
        Self::from_labels(&labels)
    }

    /// Parses the `0,1|2` text form and checks it partitions `0..goods`.
    pub fn parse(text: &str, goods: usize) -> Result<Self> {
        let blocks = text
            .trim()
            .split('|')
            .map(|block| {
                block
                    .split(',')
                    .map(|g| {
                        g.trim().parse::<usize>().map_err(|_| {
                            Error::input(format!("bad good index {g:?} in partition {text:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
                    .and_then(GoodSet::from_indices)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(goods, &blocks)
    }

    pub fn num_goods(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// The restricted-growth sequence.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Blocks ordered by their smallest element.
    pub fn blocks(&self) -> Vec<GoodSet> {
        self.block_masks()
            .into_iter()
            .map(GoodSet::from_bits)
            .collect()
    }

    pub(crate) fn block_masks(&self) -> SmallVec<[u64; 16]> {
        let mut masks: SmallVec<[u64; 16]> = SmallVec::from_elem(0, self.num_blocks());
        for (g, &l) in self.labels.iter().enumerate() {
            masks[l as usize] |= 1 << g;
        }
        masks
    }

    pub fn is_finest(&self) -> bool {
        self.num_blocks() == self.num_goods()
    }

    pub fn is_trivial(&self) -> bool {
        self.num_blocks() == 1
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks().into_iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, g) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{g}")?;
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// True iff every block of `fine` lies inside some block of `coarse`.
pub fn is_refinement(fine: &Partition, coarse: &Partition) -> Result<bool> {
    if fine.num_goods() != coarse.num_goods() {
        return Err(Error::input(format!(
            "partitions of {} and {} goods cannot be compared",
            fine.num_goods(),
            coarse.num_goods()
        )));
    }
    let mut image = [u8::MAX; MAX_DIMENSION];
    for (&f, &c) in fine.labels.iter().zip(&coarse.labels) {
        let slot = &mut image[f as usize];
        if *slot == u8::MAX {
            *slot = c;
        } else if *slot != c {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bell number `B(n)`, the number of partitions of an `n`-set (saturating).
pub fn bell_number(n: usize) -> u128 {
    // B(m+1) = sum_k C(m, k) B(k)
    let mut bells: Vec<u128> = vec![1];
    for m in 0..n {
        let mut binom: u128 = 1;
        let mut next: u128 = 0;
        for (k, &b) in bells.iter().enumerate() {
            next = next.saturating_add(binom.saturating_mul(b));
            binom = binom.saturating_mul((m - k) as u128) / (k as u128 + 1);
        }
        bells.push(next);
    }
    bells[n]
}

/// Every partition of `0..goods`, in lexicographic restricted-growth order.
///
/// Refuses more than [`DEFAULT_MAX_GOODS`] goods; see [`enumerate_partitions_up_to`].
pub fn enumerate_partitions(goods: usize) -> Result<PartitionEnumerator> {
    enumerate_partitions_up_to(goods, DEFAULT_MAX_GOODS)
}

/// As [`enumerate_partitions`] with an explicit guard on the number of goods.
pub fn enumerate_partitions_up_to(goods: usize, max_goods: usize) -> Result<PartitionEnumerator> {
    if goods == 0 {
        return Err(Error::input("cannot enumerate partitions of an empty good set"));
    }
    if goods > max_goods.min(MAX_DIMENSION) {
        return Err(Error::Budget {
            what: "partition enumeration",
            required: bell_number(goods),
            budget: bell_number(max_goods.min(MAX_DIMENSION)),
        });
    }
    Ok(PartitionEnumerator::new(goods))
}

/// Streaming enumerator over restricted-growth sequences.
#[derive(Debug, Clone)]
pub struct PartitionEnumerator {
    labels: Labels,
    // prefix_max[i] = max(labels[0..=i])
    prefix_max: Labels,
    done: bool,
}

impl PartitionEnumerator {
    fn new(goods: usize) -> Self {
        PartitionEnumerator {
            labels: SmallVec::from_elem(0, goods),
            prefix_max: SmallVec::from_elem(0, goods),
            done: false,
        }
    }

    fn advance(&mut self) {
        let n = self.labels.len();
        for i in (1..n).rev() {
            if self.labels[i] <= self.prefix_max[i - 1] {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for PartitionEnumerator {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let current = Partition {
            labels: self.labels.clone(),
        };
        self.advance();
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, goods: usize) -> Partition {
        Partition::parse(text, goods).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_partitions(1).unwrap().count(), 1);
        assert_eq!(enumerate_partitions(3).unwrap().count(), 5);
        assert_eq!(bell_number(0), 1);
        assert_eq!(bell_number(12), 4_213_597);
    }

    #[test]
    fn single_good_is_the_single_block() {
        let all: Vec<_> = enumerate_partitions(1).unwrap().collect();
        assert_eq!(all, vec![p("0", 1)]);
    }

    #[test]
    fn order_is_lexicographic_in_labels() {
        let all: Vec<String> = enumerate_partitions(3)
            .unwrap()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(all, ["0,1,2", "0,1|2", "0,2|1", "0|1,2", "0|1|2"]);
    }

    #[test]
    fn guard_refuses_large_good_sets() {
        let err = enumerate_partitions(13).unwrap_err();
        assert!(err.is_budget());
        assert!(enumerate_partitions_up_to(13, 13).is_ok());
        assert!(enumerate_partitions(0).is_err());
    }

    #[test]
    fn text_form_round_trips_and_canonicalizes() {
        assert_eq!(p("2|1,0", 3).to_string(), "0,1|2");
        assert_eq!(p(" 0 , 2 | 1 ", 3).to_string(), "0,2|1");
        for part in enumerate_partitions(4).unwrap() {
            assert_eq!(p(&part.to_string(), 4), part);
        }
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(Partition::parse("0,1", 3).is_err());
        assert!(Partition::parse("0,1|1,2", 3).is_err());
        assert!(Partition::parse("0,1|x", 3).is_err());
        assert!(Partition::parse("0|1|3", 3).is_err());
    }

    #[test]
    fn refinement_examples() {
        let finest = Partition::finest(3);
        for coarse in enumerate_partitions(3).unwrap() {
            assert!(is_refinement(&finest, &coarse).unwrap());
            assert!(is_refinement(&coarse, &Partition::trivial(3)).unwrap());
        }
        assert!(!is_refinement(&p("0,1|2", 3), &finest).unwrap());
        assert!(is_refinement(&p("0|1|2", 3), &p("0,1|2", 3)).unwrap());
        assert!(is_refinement(&finest, &Partition::finest(4)).is_err());
    }

    #[test]
    fn from_labels_canonicalizes() {
        let part = Partition::from_labels(&['b', 'a', 'b', 'c']).unwrap();
        assert_eq!(part.labels(), &[0, 1, 0, 2]);
        assert_eq!(part.num_blocks(), 3);
    }
}

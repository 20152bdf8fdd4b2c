use std::collections::HashMap;
use std::ops::Range;

use itertools::Itertools;

use crate::error::{Error, Result};

/// Occupation-number basis truncated at `max_excitations`.
///
/// States are stored as bit patterns (bit `i` set when site `i` holds an
/// excitation). Ordering is by ascending excitation count and then
/// lexicographic order of the excited-site tuples, so the vacuum is index 0
/// and every excitation sector occupies a contiguous index range.
#[derive(Debug, Clone)]
pub struct Basis {
    n_sites: usize,
    max_excitations: usize,
    states: Vec<u64>,
    blocks: Vec<Range<usize>>,
    lookup: HashMap<u64, usize>,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.n_sites == other.n_sites && self.max_excitations == other.max_excitations
    }
}

impl Eq for Basis {}

impl Basis {
    pub fn new(n_sites: usize, max_excitations: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::param("n_sites", "must be at least 1"));
        }
        if n_sites > 64 {
            return Err(Error::param("n_sites", "at most 64 sites are supported"));
        }
        if max_excitations > n_sites {
            return Err(Error::param(
                "max_excitations",
                format!("{max_excitations} exceeds the number of sites {n_sites}"),
            ));
        }
        let mut states = Vec::new();
        let mut blocks = Vec::with_capacity(max_excitations + 1);
        for k in 0..=max_excitations {
            let start = states.len();
            for sites in (0..n_sites).combinations(k) {
                states.push(sites.iter().fold(0u64, |acc, &s| acc | (1 << s)));
            }
            blocks.push(start..states.len());
        }
        let lookup = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(Basis {
            n_sites,
            max_excitations,
            states,
            blocks,
            lookup,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn max_excitations(&self) -> usize {
        self.max_excitations
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u64 {
        self.states[index]
    }

    /// Index of an occupation pattern, `None` if it is not in the truncated basis.
    pub fn index_of(&self, pattern: u64) -> Option<usize> {
        self.lookup.get(&pattern).copied()
    }

    /// Index range of the sector with exactly `k` excitations.
    pub fn block(&self, k: usize) -> Range<usize> {
        self.blocks[k].clone()
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn excitations(&self, index: usize) -> usize {
        self.states[index].count_ones() as usize
    }

    /// Excited sites of a basis state, ascending.
    pub fn excited_sites(&self, index: usize) -> Vec<usize> {
        let s = self.states[index];
        (0..self.n_sites).filter(|&i| s & (1 << i) != 0).collect()
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites {
            Err(Error::SiteOutOfRange {
                index: site,
                n_sites: self.n_sites,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn sizes() {
        assert_eq!(Basis::new(7, 2).unwrap().len(), 29);
        assert_eq!(Basis::new(3, 1).unwrap().len(), 4);
        assert_eq!(Basis::new(11, 2).unwrap().len(), 67);
        for n in 1..10 {
            for m in 0..=n {
                let expected: usize = (0..=m).map(|k| binomial(n, k)).sum();
                assert_eq!(Basis::new(n, m).unwrap().len(), expected);
            }
        }
    }

    #[test]
    fn ordering() {
        let b = Basis::new(4, 2).unwrap();
        let tuples: Vec<Vec<usize>> = (0..b.len()).map(|i| b.excited_sites(i)).collect();
        assert_eq!(tuples[0], Vec::<usize>::new());
        assert_eq!(&tuples[1..5], &[vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(
            &tuples[5..],
            &[
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(b.block(1), 1..5);
        assert_eq!(b.block(2), 5..11);
    }

    #[test]
    fn lookup_round_trips() {
        let b = Basis::new(7, 2).unwrap();
        for i in 0..b.len() {
            assert_eq!(b.index_of(b.state(i)), Some(i));
        }
        assert_eq!(b.index_of(0b111), None);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(Basis::new(3, 4), Err(Error::Parameter { .. })));
        assert!(Basis::new(0, 0).is_err());
    }
}

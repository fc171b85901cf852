//! Agent subsets encoded as bitmasks over agent indices `0..n`.
//!
//! A set is stored as little-endian 64-bit words with trailing zero words
//! trimmed, so equal sets always have equal representations. Sets of up to
//! 64 agents fit in one word; larger sets (the symmetric families run to
//! thousands of agents) spill into more words.

use std::cmp::Ordering;
use std::fmt;

const WORD: usize = 64;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct AgentSet {
    words: Vec<u64>,
}

impl AgentSet {
    pub fn empty() -> Self {
        Self { words: Vec::new() }
    }

    /// All agents `0..n`.
    pub fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n / WORD];
        let rem = n % WORD;
        if rem > 0 {
            words.push((1u64 << rem) - 1);
        }
        Self { words }
    }

    /// Agents `start..end`.
    pub fn range(start: usize, end: usize) -> Self {
        let mut set = Self::empty();
        for i in start..end {
            set.insert(i);
        }
        set
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut set = Self { words: vec![mask] };
        set.trim();
        set
    }

    pub fn from_agents<I: IntoIterator<Item = usize>>(agents: I) -> Self {
        let mut set = Self::empty();
        for i in agents {
            set.insert(i);
        }
        set
    }

    /// The set as a single-word mask, if every member is below 64.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.words
            .get(agent / WORD)
            .is_some_and(|w| w & (1u64 << (agent % WORD)) != 0)
    }

    pub fn insert(&mut self, agent: usize) {
        let idx = agent / WORD;
        if idx >= self.words.len() {
            self.words.resize(idx + 1, 0);
        }
        self.words[idx] |= 1u64 << (agent % WORD);
    }

    pub fn remove(&mut self, agent: usize) {
        if let Some(w) = self.words.get_mut(agent / WORD) {
            *w &= !(1u64 << (agent % WORD));
            self.trim();
        }
    }

    pub fn with(&self, agent: usize) -> Self {
        let mut s = self.clone();
        s.insert(agent);
        s
    }

    pub fn without(&self, agent: usize) -> Self {
        let mut s = self.clone();
        s.remove(agent);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// One past the largest member, or 0 for the empty set.
    pub fn upper_bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(&w) => (self.words.len() - 1) * WORD + (WORD - w.leading_zeros() as usize),
        }
    }

    pub fn is_subset(&self, other: &AgentSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, &w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn union(&self, other: &AgentSet) -> AgentSet {
        let len = self.words.len().max(other.words.len());
        let words = (0..len)
            .map(|i| {
                self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0)
            })
            .collect();
        AgentSet { words }
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Numeric comparison of the two sets read as unsigned integers.
    pub fn cmp_mask(&self, other: &AgentSet) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }

    /// Deterministic preference among equally good sets: fewer agents
    /// first, then the smaller bitmask.
    pub fn tie_break(&self, other: &AgentSet) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.cmp_mask(other))
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for AgentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_agents(iter)
    }
}

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::RootDataError;

/// Standard parabolic of `GL_n`, given by its ordered block sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self, RootDataError> {
        if parts.is_empty() {
            return Err(RootDataError::InvalidComposition("no parts".into()));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(RootDataError::InvalidComposition(format!("zero part in {parts:?}")));
        }
        Ok(Composition { parts })
    }

    /// Parse `"2,1,1"`.
    pub fn parse(text: &str) -> Result<Self, RootDataError> {
        let parts = text
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| RootDataError::InvalidComposition(format!("{text:?}: {e}")))?;
        Composition::new(parts)
    }

    /// Minimal parabolic `(1, ..., 1)`.
    pub fn minimal(n: usize) -> Self {
        Composition { parts: vec![1; n] }
    }

    /// The whole group `(n)`.
    pub fn maximal(n: usize) -> Self {
        Composition { parts: vec![n] }
    }

    /// Every composition of `n`, in lexicographic order of cut sets.
    pub fn all(n: usize) -> Vec<Composition> {
        assert!(n >= 1);
        (0u32..1 << (n - 1))
            .map(|mask| {
                let mut parts = Vec::new();
                let mut len = 1;
                for i in 0..n - 1 {
                    if mask >> i & 1 == 1 {
                        parts.push(len);
                        len = 1;
                    } else {
                        len += 1;
                    }
                }
                parts.push(len);
                Composition { parts }
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn blocks(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.parts
            .iter()
            .map(|&p| {
                let r = start..start + p;
                start += p;
                r
            })
            .collect()
    }

    /// Block label of every index.
    pub fn labels(&self) -> Vec<usize> {
        self.parts.iter().enumerate().flat_map(|(b, &p)| std::iter::repeat(b).take(p)).collect()
    }

    /// Indices `i` with `i` and `i + 1` in the same block.
    pub fn inner_edges(&self) -> Vec<usize> {
        let lab = self.labels();
        (0..self.n().saturating_sub(1)).filter(|&i| lab[i] == lab[i + 1]).collect()
    }

    /// Indices `i` with `i` the last element of a block (excluding the last block).
    pub fn boundary_edges(&self) -> Vec<usize> {
        let lab = self.labels();
        (0..self.n().saturating_sub(1)).filter(|&i| lab[i] != lab[i + 1]).collect()
    }

    /// `self` is finer than (or equal to) `other`: every block lies inside a block of `other`.
    pub fn refines(&self, other: &Composition) -> bool {
        self.n() == other.n() && other.boundary_edges().iter().all(|e| self.boundary_edges().contains(e))
    }

    pub fn coarsens(&self, other: &Composition) -> bool {
        other.refines(self)
    }

    /// Parts sorted, for comparing associate classes.
    pub fn sorted_parts(&self) -> Vec<usize> {
        let mut p = self.parts.clone();
        p.sort_unstable();
        p
    }

    pub(crate) fn from_labels(labels: &[usize]) -> Option<Self> {
        let mut parts = Vec::new();
        let mut seen = Vec::new();
        let mut i = 0;
        while i < labels.len() {
            let l = labels[i];
            if seen.contains(&l) {
                return None;
            }
            seen.push(l);
            let mut j = i;
            while j < labels.len() && labels[j] == l {
                j += 1;
            }
            parts.push(j - i);
            i = j;
        }
        Some(Composition { parts })
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

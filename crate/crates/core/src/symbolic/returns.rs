use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::clopen::ClopenSet;
use super::system::Word;
use super::SymbolicError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Gap {
    Exact(u64),
    /// Not found at or below the search bound.
    UnknownBeyond(u64),
}

impl Gap {
    pub fn exact(self) -> Option<u64> {
        match self {
            Gap::Exact(m) => Some(m),
            Gap::UnknownBeyond(_) => None,
        }
    }

    /// The exact value, or `BoundExceeded`.
    pub fn require(self) -> Result<u64, SymbolicError> {
        match self {
            Gap::Exact(m) => Ok(m),
            Gap::UnknownBeyond(b) => Err(SymbolicError::BoundExceeded(b)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReturnTimeReport {
    pub set: ClopenSet,
    pub min_forward_return: Gap,
    pub max_gap: Gap,
}

/// Smallest and largest cyclic gap between consecutive residues mod `p`.
pub(crate) fn cyclic_gaps(res: &BTreeSet<u128>, p: u128) -> (u128, u128) {
    let v: Vec<u128> = res.iter().copied().collect();
    let mut min = u128::MAX;
    let mut max = 0;
    for i in 0..v.len() {
        let next = if i + 1 < v.len() { v[i + 1] } else { v[0] + p };
        let g = next - v[i];
        min = min.min(g);
        max = max.max(g);
    }
    (min, max)
}

impl ClopenSet {
    /// Least forward return and maximal gap of the orbit visits to the set.
    /// Odometers are handled exactly; subshifts search up to `search_bound`.
    pub fn return_time_report(&self, search_bound: u64) -> Result<ReturnTimeReport, SymbolicError> {
        if self.is_empty() {
            return Err(SymbolicError::EmptySet);
        }
        let sys = self.system().clone();
        if sys.is_odometer() {
            let depth = self.max_depth();
            let p = sys.modulus(depth)?;
            let (min, max) = cyclic_gaps(&self.residues(depth)?, p);
            let cast = |x: u128| u64::try_from(x).map_err(|_| SymbolicError::BoundExceeded(u64::MAX));
            return Ok(ReturnTimeReport {
                set: self.clone(),
                min_forward_return: Gap::Exact(cast(min)?),
                max_gap: Gap::Exact(cast(max)?),
            });
        }
        let depth = self.max_depth();
        let l = 2 * depth;
        let marks: HashSet<Word> = self.refine_to_depth(depth)?.into_iter().collect();
        let mut min_forward_return = Gap::UnknownBeyond(search_bound);
        for n in 1..=search_bound as usize {
            let level = sys.language(l + n)?;
            let hit = level
                .words
                .iter()
                .any(|u| marks.contains(&u[..l]) && marks.contains(&u[n..n + l]));
            if hit {
                min_forward_return = Gap::Exact(n as u64);
                break;
            }
        }
        let mut max_gap = Gap::UnknownBeyond(search_bound);
        for m in 1..=search_bound as usize {
            // every window x[1-l/2 .. m+l/2) contains a marked block
            let level = sys.language(m + l - 1)?;
            let ok = level
                .words
                .iter()
                .all(|u| (0..m).any(|j| marks.contains(&u[j..j + l])));
            if ok {
                max_gap = Gap::Exact(m as u64);
                break;
            }
        }
        Ok(ReturnTimeReport {
            set: self.clone(),
            min_forward_return,
            max_gap,
        })
    }
}

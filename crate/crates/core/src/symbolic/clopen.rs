use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::system::{SymbolicSystem, Word};
use super::SymbolicError;

/// A clopen set stored as its maximal cylinders, sorted.
#[derive(Clone)]
pub struct ClopenSet {
    system: Arc<SymbolicSystem>,
    cylinders: Vec<Word>,
}

impl PartialEq for ClopenSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.system, &other.system) && self.cylinders == other.cylinders
    }
}

impl Eq for ClopenSet {}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_strings()).finish()
    }
}

impl ClopenSet {
    pub fn empty(system: &Arc<SymbolicSystem>) -> Self {
        ClopenSet { system: system.clone(), cylinders: Vec::new() }
    }

    pub fn whole(system: &Arc<SymbolicSystem>) -> Self {
        ClopenSet { system: system.clone(), cylinders: vec![Vec::new()] }
    }

    pub fn cylinder(system: &Arc<SymbolicSystem>, word: Word) -> Result<Self, SymbolicError> {
        Self::from_words(system, vec![word])
    }

    /// Validates every word and canonicalizes.
    pub fn from_words(system: &Arc<SymbolicSystem>, words: Vec<Word>) -> Result<Self, SymbolicError> {
        for w in &words {
            system.validate(w)?;
        }
        Self::from_valid(system, words)
    }

    pub(crate) fn from_valid(system: &Arc<SymbolicSystem>, words: Vec<Word>) -> Result<Self, SymbolicError> {
        Ok(ClopenSet {
            system: system.clone(),
            cylinders: canonicalize(system, words)?,
        })
    }

    /// `{x : x[start .. start+len) = word}` for a subshift.
    pub fn word_at(system: &Arc<SymbolicSystem>, word: &[u8], start: i64) -> Result<Self, SymbolicError> {
        if system.is_odometer() {
            return Err(SymbolicError::InvalidSystem("word_at needs a subshift".into()));
        }
        let end = start + word.len() as i64;
        let depth = start.unsigned_abs().max(end.unsigned_abs()) as usize;
        system.check_depth(depth)?;
        let level = system.language(2 * depth)?;
        let off = (start + depth as i64) as usize;
        let words = level
            .words
            .iter()
            .filter(|u| &u[off..off + word.len()] == word)
            .cloned()
            .collect();
        Self::from_valid(system, words)
    }

    pub fn system(&self) -> &Arc<SymbolicSystem> {
        &self.system
    }

    pub fn cylinders(&self) -> &[Word] {
        &self.cylinders
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.cylinders.len() == 1 && self.cylinders[0].is_empty()
    }

    /// Largest cylinder depth used.
    pub fn max_depth(&self) -> usize {
        self.cylinders
            .iter()
            .map(|w| self.system.word_depth(w))
            .max()
            .unwrap_or(0)
    }

    fn same_system(&self, other: &ClopenSet) -> Result<(), SymbolicError> {
        if Arc::ptr_eq(&self.system, &other.system) {
            Ok(())
        } else {
            Err(SymbolicError::SystemMismatch)
        }
    }

    pub fn union(&self, other: &ClopenSet) -> Result<ClopenSet, SymbolicError> {
        self.same_system(other)?;
        let mut words = self.cylinders.clone();
        words.extend(other.cylinders.iter().cloned());
        Self::from_valid(&self.system, words)
    }

    pub fn intersection(&self, other: &ClopenSet) -> Result<ClopenSet, SymbolicError> {
        self.same_system(other)?;
        let sys = &self.system;
        let mut words = Vec::new();
        for a in &self.cylinders {
            for b in &other.cylinders {
                if sys.is_ancestor_or_eq(a, b) {
                    words.push(b.clone());
                } else if sys.is_ancestor_or_eq(b, a) {
                    words.push(a.clone());
                }
            }
        }
        Self::from_valid(sys, words)
    }

    pub fn complement(&self) -> Result<ClopenSet, SymbolicError> {
        let mut out = Vec::new();
        let all: Vec<&Word> = self.cylinders.iter().collect();
        complement_rec(&self.system, Vec::new(), all, &mut out)?;
        Self::from_valid(&self.system, out)
    }

    pub fn difference(&self, other: &ClopenSet) -> Result<ClopenSet, SymbolicError> {
        self.intersection(&other.complement()?)
    }

    pub fn is_subset(&self, other: &ClopenSet) -> Result<bool, SymbolicError> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> Result<bool, SymbolicError> {
        Ok(self.intersection(other)?.is_empty())
    }

    /// Whether the cylinder of `w` lies inside the set.
    pub fn contains_cylinder(&self, w: &[u8]) -> bool {
        self.cylinders.iter().any(|c| self.system.is_ancestor_or_eq(c, w))
    }

    /// The exact image `n * self`.
    pub fn translate(&self, n: i64) -> Result<ClopenSet, SymbolicError> {
        if n == 0 {
            return Ok(self.clone());
        }
        let mut words = Vec::new();
        for w in &self.cylinders {
            words.extend(self.system.translate_cylinder(w, n)?);
        }
        Self::from_valid(&self.system, words)
    }

    /// True iff `n * self` misses `self` for all `0 < |n| <= radius`.
    pub fn disjoint_translates_radius(&self, radius: u64) -> Result<bool, SymbolicError> {
        if self.is_empty() {
            return Ok(true);
        }
        if self.system.is_odometer() {
            let depth = self.max_depth();
            let p = self.system.modulus(depth)?;
            let res = self.residues(depth)?;
            let min = super::returns::cyclic_gaps(&res, p).0;
            return Ok(min as u128 > radius as u128);
        }
        // n.s misses s iff (-n).s misses s, so positive n suffice
        for n in 1..=radius as i64 {
            if !self.translate(n)?.is_disjoint(self)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All cylinders of exactly `depth` inside the set, sorted.
    pub fn refine_to_depth(&self, depth: usize) -> Result<Vec<Word>, SymbolicError> {
        let mut out = Vec::new();
        for w in &self.cylinders {
            out.extend(self.system.descendants_at_depth(w, depth)?);
        }
        out.sort();
        Ok(out)
    }

    /// Odometer residues mod `modulus(depth)` covered by the set.
    pub fn residues(&self, depth: usize) -> Result<BTreeSet<u128>, SymbolicError> {
        if !self.system.is_odometer() {
            return Err(SymbolicError::InvalidSystem("residues need an odometer".into()));
        }
        if depth < self.max_depth() {
            return Err(SymbolicError::InvalidWord(format!(
                "depth {depth} is below the set depth {}",
                self.max_depth()
            )));
        }
        let p = self.system.modulus(depth)?;
        let mut out = BTreeSet::new();
        for w in &self.cylinders {
            let step = self.system.modulus(w.len())?;
            let mut r = self.system.odometer_value(w);
            while r < p {
                out.insert(r);
                r += step;
            }
        }
        Ok(out)
    }

    /// Odometer set from residues mod `modulus(depth)`.
    pub fn from_residues(
        system: &Arc<SymbolicSystem>,
        depth: usize,
        residues: impl IntoIterator<Item = u128>,
    ) -> Result<Self, SymbolicError> {
        let p = system.modulus(depth)?;
        let words = residues
            .into_iter()
            .map(|r| system.odometer_word(r % p, depth))
            .collect();
        Self::from_valid(system, words)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.cylinders.iter().map(|w| self.system.format_word(w)).collect()
    }

    pub fn from_strings(system: &Arc<SymbolicSystem>, items: &[String]) -> Result<Self, SymbolicError> {
        let words = items
            .iter()
            .map(|s| system.parse_word(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_valid(system, words)
    }
}

fn complement_rec(
    sys: &SymbolicSystem,
    node: Word,
    inside: Vec<&Word>,
    out: &mut Vec<Word>,
) -> Result<(), SymbolicError> {
    if inside.is_empty() {
        out.push(node);
        return Ok(());
    }
    if inside.iter().any(|w| w.len() == node.len()) {
        // node itself is in the set
        return Ok(());
    }
    for child in sys.children(&node)? {
        let sub: Vec<&Word> = inside
            .iter()
            .copied()
            .filter(|w| sys.is_ancestor_or_eq(&child, w))
            .collect();
        complement_rec(sys, child, sub, out)?;
    }
    Ok(())
}

/// Maximal-cylinder normal form: drop refinements of present cylinders, then
/// merge complete sibling families bottom-up until stable.
fn canonicalize(sys: &SymbolicSystem, mut words: Vec<Word>) -> Result<Vec<Word>, SymbolicError> {
    words.sort();
    words.dedup();
    let set: HashSet<Word> = words.iter().cloned().collect();
    words.retain(|w| {
        let mut p = sys.parent(w);
        while let Some(q) = p {
            if set.contains(&q) {
                return false;
            }
            p = sys.parent(&q);
        }
        true
    });
    let mut current: HashSet<Word> = words.into_iter().collect();
    loop {
        let mut groups: HashMap<Word, usize> = HashMap::new();
        for w in &current {
            if let Some(p) = sys.parent(w) {
                *groups.entry(p).or_default() += 1;
            }
        }
        let mut merged = false;
        let mut parents: Vec<Word> = groups.into_keys().collect();
        parents.sort();
        for p in parents {
            let kids = sys.children(&p)?;
            if kids.iter().all(|k| current.contains(k)) {
                for k in &kids {
                    current.remove(k);
                }
                current.insert(p);
                merged = true;
            }
        }
        if !merged {
            break;
        }
    }
    let mut out: Vec<Word> = current.into_iter().collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic() -> Arc<SymbolicSystem> {
        SymbolicSystem::odometer(vec![2]).unwrap()
    }

    #[test]
    fn siblings_merge() {
        let s = dyadic();
        let a = ClopenSet::from_words(&s, vec![vec![0, 0], vec![0, 1]]).unwrap();
        assert_eq!(a.cylinders(), &[vec![0]]);
        let b = ClopenSet::from_words(&s, vec![vec![0], vec![1, 0], vec![1, 1]]).unwrap();
        assert!(b.is_whole());
        let c = ClopenSet::from_words(&s, vec![vec![0], vec![0, 1, 1]]).unwrap();
        assert_eq!(c.cylinders(), &[vec![0]]);
    }

    #[test]
    fn complement_round_trip() {
        let s = dyadic();
        let a = ClopenSet::from_words(&s, vec![vec![0, 0, 0], vec![1, 1]]).unwrap();
        let c = a.complement().unwrap();
        assert_eq!(c.complement().unwrap(), a);
        assert!(a.is_disjoint(&c).unwrap());
        assert!(a.union(&c).unwrap().is_whole());
        assert!(ClopenSet::empty(&s).complement().unwrap().is_whole());
    }

    #[test]
    fn translate_examples() {
        let s = dyadic();
        let a = ClopenSet::cylinder(&s, vec![0, 0, 0]).unwrap();
        assert_eq!(a.translate(1).unwrap().cylinders(), &[vec![1, 0, 0]]);
        assert_eq!(a.translate(0).unwrap(), a);
        assert_eq!(a.translate(8).unwrap(), a);
        assert!(a.disjoint_translates_radius(5).unwrap());
        assert!(!a.disjoint_translates_radius(8).unwrap());
        assert!(!ClopenSet::whole(&s).disjoint_translates_radius(1).unwrap());
    }

    #[test]
    fn residues_round_trip() {
        let s = dyadic();
        let a = ClopenSet::from_words(&s, vec![vec![1], vec![0, 0, 0]]).unwrap();
        let r = a.residues(3).unwrap();
        assert_eq!(r.iter().copied().collect::<Vec<_>>(), vec![0, 1, 3, 5, 7]);
        assert_eq!(ClopenSet::from_residues(&s, 3, r).unwrap(), a);
    }

    #[test]
    fn subshift_word_at_and_translate() {
        let s = SymbolicSystem::substitution(vec!["a".into(), "b".into()], vec![vec![0, 1], vec![0]], 64).unwrap();
        let b0 = ClopenSet::word_at(&s, &[1], 0).unwrap();
        let b1 = ClopenSet::word_at(&s, &[1], 1).unwrap();
        // (n.x)[j] = x[j+n]
        assert_eq!(b1.translate(1).unwrap(), b0);
        assert_eq!(b0.translate(-1).unwrap(), b1);
        // bb is illegal, so [b at 0] and [b at 1] are disjoint
        assert!(b0.is_disjoint(&b1).unwrap());
        let a0 = ClopenSet::word_at(&s, &[0], 0).unwrap();
        assert!(a0.union(&b0).unwrap().is_whole());
        assert_eq!(b0.complement().unwrap(), a0);
    }

    #[test]
    fn mismatched_systems() {
        let a = ClopenSet::whole(&dyadic());
        let b = ClopenSet::whole(&dyadic());
        assert_eq!(a.union(&b), Err(SymbolicError::SystemMismatch));
    }
}

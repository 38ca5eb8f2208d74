//! Finite groups and their actions on finite sets.

use std::collections::{BTreeMap, VecDeque};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ActionError {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("not an action: {0}")]
    NotAnAction(String),
    #[error("generated group exceeds {0} elements")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum GroupRule {
    Cyclic(usize),
    Table { mul: Vec<Vec<usize>>, identity: usize, inv: Vec<usize> },
}

/// A finite group on the elements `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    rule: GroupRule,
    /// Permutation realizations, when the group was generated from permutations.
    perms: Option<Vec<Vec<usize>>>,
}

impl FiniteGroup {
    /// ℤ/n with element `k` standing for the residue `k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group of order zero");
        FiniteGroup { rule: GroupRule::Cyclic(n), perms: None }
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Checks closure, associativity, identity and inverses.
    pub fn from_table(mul: Vec<Vec<usize>>) -> Result<Self, ActionError> {
        let n = mul.len();
        if n == 0 || mul.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(ActionError::NotAGroup("table must be square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e][x] == x && mul[x][e] == x))
            .ok_or_else(|| ActionError::NotAGroup("no identity".into()))?;
        let mut inv = vec![0; n];
        for (x, slot) in inv.iter_mut().enumerate() {
            *slot = (0..n)
                .find(|&y| mul[x][y] == identity && mul[y][x] == identity)
                .ok_or_else(|| ActionError::NotAGroup(format!("element {x} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(ActionError::NotAGroup(format!("({a}{b}){c} != {a}({b}{c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup { rule: GroupRule::Table { mul, identity, inv }, perms: None })
    }

    /// The permutation group generated by `gens`, all acting on `0..degree`.
    /// Element 0 is the identity; generators come next in order (duplicates merged).
    pub fn from_permutations(gens: &[Vec<usize>], max_order: usize) -> Result<Self, ActionError> {
        let degree = gens.first().map(Vec::len).unwrap_or(0);
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
                return Err(ActionError::NotAGroup("generators must be permutations of one set".into()));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        for g in gens {
            if !index.contains_key(g) {
                index.insert(g.clone(), elems.len());
                queue.push_back(elems.len());
                elems.push(g.clone());
            }
        }
        while let Some(i) = queue.pop_front() {
            for g in gens {
                // g after elems[i]
                let p: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if !index.contains_key(&p) {
                    if elems.len() >= max_order {
                        return Err(ActionError::TooLarge(max_order));
                    }
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let n = elems.len();
        let mut mul = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                // (a*b)(x) = a(b(x))
                let p: Vec<usize> = (0..degree).map(|x| elems[a][elems[b][x]]).collect();
                mul[a][b] = index[&p];
            }
        }
        let inv = (0..n).map(|a| (0..n).find(|&b| mul[a][b] == 0).expect("inverse")).collect();
        Ok(FiniteGroup {
            rule: GroupRule::Table { mul, identity: 0, inv },
            perms: Some(elems),
        })
    }

    pub fn order(&self) -> usize {
        match &self.rule {
            GroupRule::Cyclic(n) => *n,
            GroupRule::Table { mul, .. } => mul.len(),
        }
    }

    pub fn identity(&self) -> usize {
        match &self.rule {
            GroupRule::Cyclic(_) => 0,
            GroupRule::Table { identity, .. } => *identity,
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.rule {
            GroupRule::Cyclic(n) => (a + b) % n,
            GroupRule::Table { mul, .. } => mul[a][b],
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        match &self.rule {
            GroupRule::Cyclic(n) => (n - a % n) % n,
            GroupRule::Table { inv, .. } => inv[a],
        }
    }

    pub fn is_cyclic_model(&self) -> Option<usize> {
        match &self.rule {
            GroupRule::Cyclic(n) => Some(*n),
            GroupRule::Table { .. } => None,
        }
    }

    /// Permutation of element `a`, for groups built from permutations.
    pub fn permutation(&self, a: usize) -> Option<&[usize]> {
        self.perms.as_ref().map(|p| p[a].as_slice())
    }

    /// Residue of an integer in a cyclic group.
    pub fn from_integer(&self, k: i64) -> usize {
        let n = self.order() as i64;
        k.rem_euclid(n) as usize
    }
}

/// A left action of a finite group on the points `0..points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAction {
    group: FiniteGroup,
    points: usize,
    table: Vec<Vec<usize>>,
}

impl FiniteAction {
    /// `table[g][x] = g·x`; verified to be an action.
    pub fn new(group: FiniteGroup, points: usize, table: Vec<Vec<usize>>) -> Result<Self, ActionError> {
        let n = group.order();
        if table.len() != n || table.iter().any(|row| row.len() != points || row.iter().any(|&y| y >= points)) {
            return Err(ActionError::NotAnAction("table shape does not match group and space".into()));
        }
        let e = group.identity();
        if (0..points).any(|x| table[e][x] != x) {
            return Err(ActionError::NotAnAction("identity does not act trivially".into()));
        }
        for g in 0..n {
            for h in 0..n {
                let gh = group.mul(g, h);
                for x in 0..points {
                    if table[g][table[h][x]] != table[gh][x] {
                        return Err(ActionError::NotAnAction(format!("g={g} h={h} x={x}")));
                    }
                }
            }
        }
        Ok(FiniteAction { group, points, table })
    }

    /// ℤ/n acting on itself by rotation.
    pub fn rotation(n: usize) -> Self {
        let table = (0..n).map(|g| (0..n).map(|x| (g + x) % n).collect()).collect();
        FiniteAction { group: FiniteGroup::cyclic(n), points: n, table }
    }

    /// The group acting on itself by left multiplication.
    pub fn left_regular(group: FiniteGroup) -> Self {
        let n = group.order();
        let table = (0..n).map(|g| (0..n).map(|x| group.mul(g, x)).collect()).collect();
        FiniteAction { group, points: n, table }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.table[g][x]
    }

    pub fn is_free(&self) -> bool {
        let e = self.group.identity();
        (0..self.group.order()).all(|g| g == e || (0..self.points).all(|x| self.table[g][x] != x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_arithmetic() {
        let g = FiniteGroup::cyclic(12);
        assert_eq!(g.mul(7, 8), 3);
        assert_eq!(g.inv(5), 7);
        assert_eq!(g.inv(0), 0);
        assert_eq!(g.from_integer(-1), 11);
    }

    #[test]
    fn table_checks() {
        let z2 = vec![vec![0, 1], vec![1, 0]];
        assert!(FiniteGroup::from_table(z2).is_ok());
        let bad = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_table(bad).is_err());
    }

    #[test]
    fn symmetric_group_from_transpositions() {
        let s3 = FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![0, 2, 1]], 100).unwrap();
        assert_eq!(s3.order(), 6);
        for a in 0..6 {
            assert_eq!(s3.mul(a, s3.inv(a)), 0);
        }
        assert!(FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![0, 2, 1]], 4).is_err());
    }

    #[test]
    fn action_checks() {
        let swap = FiniteAction::new(FiniteGroup::cyclic(2), 2, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert!(swap.is_free());
        let not = FiniteAction::new(FiniteGroup::cyclic(2), 2, vec![vec![0, 1], vec![0, 0]]);
        assert!(matches!(not, Err(ActionError::NotAnAction(_))));
        let trivial = FiniteAction::new(FiniteGroup::cyclic(2), 1, vec![vec![0], vec![0]]).unwrap();
        assert!(!trivial.is_free());
        assert!(FiniteAction::rotation(12).is_free());
    }
}

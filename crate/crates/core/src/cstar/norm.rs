use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::element::{ConvElement, Scalar, C64};

/// `π_x(f)` as a dense matrix on the basis `s⁻¹(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularRep<S: Scalar> {
    pub unit: usize,
    /// Arrows with source `unit`, sorted; row and column labels.
    pub basis: Vec<usize>,
    pub matrix: Vec<Vec<S>>,
}

impl<S: Scalar> RegularRep<S> {
    /// `(π_x(f)ξ)(g) = Σ_{g₁g₂=g} f(g₁) ξ(g₂)`, so the entry at `(g, h)` is `f(gh⁻¹)`.
    pub fn new(f: &ConvElement<S>, x: usize) -> Self {
        let basis = f.groupoid().arrows_from(x);
        let n = basis.len();
        let mut matrix = vec![vec![S::zero(); n]; n];
        for (i, j, c) in sparse_entries(f, &basis) {
            matrix[i][j] = c;
        }
        RegularRep { unit: x, basis, matrix }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dimension();
        let mut matrix = vec![vec![S::zero(); n]; n];
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                for k in 0..n {
                    *out = out.clone() + self.matrix[i][k].clone() * other.matrix[k][j].clone();
                }
            }
        }
        RegularRep { unit: self.unit, basis: self.basis.clone(), matrix }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dimension();
        let matrix = (0..n).map(|i| (0..n).map(|j| self.matrix[j][i].conjugate()).collect()).collect();
        RegularRep { unit: self.unit, basis: self.basis.clone(), matrix }
    }

    pub fn spectral_norm(&self) -> f64 {
        let n = self.dimension();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.matrix[i][j].is_zero())
            .map(|(i, j)| (i, j, self.matrix[i][j].to_c64()));
        sparse_spectral_norm(entries.collect())
    }
}

fn sparse_entries<S: Scalar>(f: &ConvElement<S>, basis: &[usize]) -> Vec<(usize, usize, S)> {
    let g = f.groupoid();
    let index: HashMap<usize, usize> = basis.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut by_source: HashMap<usize, Vec<(usize, &S)>> = HashMap::new();
    for (a, c) in f.iter() {
        by_source.entry(g.source(a)).or_default().push((a, c));
    }
    let mut out = Vec::new();
    for (j, &h) in basis.iter().enumerate() {
        for &(a, c) in by_source.get(&g.range(h)).map(Vec::as_slice).unwrap_or(&[]) {
            let i = index[&g.compose(a, h).expect("composable")];
            out.push((i, j, c.clone()));
        }
    }
    out
}

/// Largest singular value of a sparse matrix given by its nonzero entries.
/// The matrix splits into blocks along the connected components of the
/// bipartite row/column graph and each block goes through a dense SVD.
pub fn sparse_spectral_norm(entries: Vec<(usize, usize, C64)>) -> f64 {
    if entries.is_empty() {
        return 0.0;
    }
    let rows: BTreeSet<usize> = entries.iter().map(|e| e.0).collect();
    let cols: BTreeSet<usize> = entries.iter().map(|e| e.1).collect();
    let row_ix: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let col_ix: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, rows.len() + i)).collect();
    let mut uf = UnionFind::<usize>::new(rows.len() + cols.len());
    for (r, c, _) in &entries {
        uf.union(row_ix[r], col_ix[c]);
    }
    let mut blocks: HashMap<usize, Vec<(usize, usize, C64)>> = HashMap::new();
    for (r, c, v) in entries {
        blocks.entry(uf.find(row_ix[&r])).or_default().push((r, c, v));
    }
    blocks.into_values().map(dense_block_norm).fold(0.0, f64::max)
}

fn dense_block_norm(entries: Vec<(usize, usize, C64)>) -> f64 {
    if entries.len() == 1 {
        return entries[0].2.norm();
    }
    let rows: BTreeSet<usize> = entries.iter().map(|e| e.0).collect();
    let cols: BTreeSet<usize> = entries.iter().map(|e| e.1).collect();
    let ri: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let ci: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut m = DMatrix::<C64>::zeros(rows.len(), cols.len());
    for (r, c, v) in entries {
        m[(ri[&r], ci[&c])] += v;
    }
    m.singular_values().max()
}

/// Spectral norm of `π_x(f)` for every orbit met by the support.
#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    pub norm: f64,
    /// `(representative unit, dim ℓ²(s⁻¹(x)), ‖π_x(f)‖)`.
    pub per_orbit: Vec<(usize, usize, f64)>,
}

/// One unit per orbit met by `r` or `s` of the support, the least unit of
/// its orbit.
pub fn orbit_representatives<S: Scalar>(f: &ConvElement<S>) -> Vec<usize> {
    let g = f.groupoid();
    let mut reps = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for x in f.touched_units() {
        if seen.contains(&x) {
            continue;
        }
        let orbit: BTreeSet<usize> = g.arrows_from(x).into_iter().map(|a| g.range(a)).collect();
        reps.insert(*orbit.iter().next().expect("orbit contains x"));
        seen.extend(orbit);
    }
    reps.into_iter().collect()
}

/// `‖f‖ = sup_x ‖π_x(f)‖`, one representative per orbit, orbits in parallel.
pub fn norm_report<S: Scalar + Sync>(f: &ConvElement<S>) -> NormReport {
    let reps = orbit_representatives(f);
    let one = |x: usize| {
        let basis = f.groupoid().arrows_from(x);
        let entries = sparse_entries(f, &basis).into_iter().map(|(i, j, c)| (i, j, c.to_c64())).collect();
        (x, basis.len(), sparse_spectral_norm(entries))
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(reps.len());
    let per_orbit: Vec<(usize, usize, f64)> = if threads <= 1 {
        reps.iter().map(|&x| one(x)).collect()
    } else {
        let chunk = reps.len().div_ceil(threads);
        std::thread::scope(|s| {
            let handles: Vec<_> = reps
                .chunks(chunk)
                .map(|part| s.spawn(move || part.iter().map(|&x| one(x)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("norm worker")).collect()
        })
    };
    let norm = per_orbit.iter().map(|p| p.2).fold(0.0, f64::max);
    NormReport { norm, per_orbit }
}

pub fn reduced_norm<S: Scalar + Sync>(f: &ConvElement<S>) -> f64 {
    norm_report(f).norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar::element::{convolve, CQ};
    use crate::groupoid::FiniteGroupoid;
    use crate::rational::qi;
    use num_traits::One;

    #[test]
    fn unit_delta_and_matrix_unit() {
        let g = FiniteGroupoid::pair(3);
        assert!((reduced_norm(&ConvElement::<C64>::delta(&g, g.unit(2))) - 1.0).abs() < 1e-12);
        assert!((reduced_norm(&ConvElement::<C64>::delta(&g, g.pair_arrow(0, 1).unwrap())) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_ones_has_norm_n() {
        for n in 1..8 {
            let g = FiniteGroupoid::pair(n);
            let f = ConvElement::from_pairs(&g, (0..n * n).map(|a| (a, C64::one()))).unwrap();
            assert!((reduced_norm(&f) - n as f64).abs() < 1e-9 * n as f64);
        }
    }

    #[test]
    fn regular_rep_is_multiplicative() {
        let g = FiniteGroupoid::pair(3);
        let f1 = ConvElement::from_pairs(&g, [(1, CQ::new(qi(2), qi(1))), (5, CQ::new(qi(-1), qi(0)))]).unwrap();
        let f2 = ConvElement::from_pairs(&g, [(3, CQ::new(qi(1), qi(1))), (7, CQ::new(qi(0), qi(3)))]).unwrap();
        let prod = convolve(&f1, &f2).unwrap();
        for x in 0..3 {
            assert_eq!(RegularRep::new(&prod, x), RegularRep::new(&f1, x).mul(&RegularRep::new(&f2, x)));
        }
    }

    #[test]
    fn empty_and_diagonal_blocks() {
        assert_eq!(sparse_spectral_norm(Vec::new()), 0.0);
        let e = vec![(0, 0, C64::new(3.0, 4.0)), (5, 7, C64::new(-2.0, 0.0))];
        assert!((sparse_spectral_norm(e) - 5.0).abs() < 1e-12);
    }
}

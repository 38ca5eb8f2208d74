use std::collections::BTreeMap;

use serde::Serialize;

use super::element::{ConvElement, Scalar, C64};
use super::norm::sparse_spectral_norm;
use super::CstarError;
use crate::groupoid::{generate_subgroupoid, FiniteGroupoid};

/// Above this many arrows only the arrows out of each base point and their
/// inverses are checked; they generate the class algebra.
const FULL_CHECK_ARROWS: usize = 250_000;

/// One orbit class `[x]` of a free finite groupoid and its identification
/// with `M_m(ℂ)`: the arrow from `points[j]` to `points[i]` goes to `e_{ij}`.
#[derive(Debug, Clone, Serialize)]
pub struct Block {
    pub base: usize,
    /// Units of the class, sorted; row and column labels of the block.
    pub points: Vec<usize>,
    /// `basis[j]` is the unique arrow from `base` to `points[j]`.
    pub basis: Vec<usize>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.points.len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    /// `m ↦ #{classes with |[x]| = m}`.
    pub multiplicities: BTreeMap<usize, usize>,
    pub max_size: usize,
    /// Arrows on which the block map was checked against the regular
    /// representation at the base point.
    pub arrows_checked: usize,
}

impl BlockDecomposition {
    /// `M_{m₁} ⊕ M_{m₂} ⊕ …`, sizes ascending.
    pub fn structure(&self) -> Vec<usize> {
        self.multiplicities.iter().flat_map(|(&m, &c)| std::iter::repeat(m).take(c)).collect()
    }

    /// The block matrices of `f`, as sparse entries per block.
    pub fn block_entries<S: Scalar>(&self, f: &ConvElement<S>) -> Vec<Vec<(usize, usize, C64)>> {
        let g = f.groupoid();
        let mut out = vec![Vec::new(); self.blocks.len()];
        let mut locate = BTreeMap::new();
        for (b, block) in self.blocks.iter().enumerate() {
            for (i, &p) in block.points.iter().enumerate() {
                locate.insert(p, (b, i));
            }
        }
        for (a, c) in f.iter() {
            let (b, i) = locate[&g.range(a)];
            let (_, j) = locate[&g.source(a)];
            out[b].push((i, j, c.to_c64()));
        }
        out
    }

    /// `max_b ‖f_b‖` over the blocks.
    pub fn block_norm<S: Scalar>(&self, f: &ConvElement<S>) -> f64 {
        self.block_entries(f).into_iter().map(sparse_spectral_norm).fold(0.0, f64::max)
    }
}

/// Orbit classes of a free finite groupoid with a `*`-isomorphism of each
/// class algebra onto a full matrix algebra.
pub fn block_decompose(g: &FiniteGroupoid) -> Result<BlockDecomposition, CstarError> {
    if !g.is_free() {
        let arrow = g.isotropy_witness().expect("non-free groupoid has isotropy");
        return Err(CstarError::NotFree { arrow });
    }
    let all: Vec<usize> = (0..g.num_arrows()).collect();
    let classes = generate_subgroupoid(g, &all).orbit_classes(g);
    let full = g.num_arrows() <= FULL_CHECK_ARROWS;
    let mut blocks = Vec::new();
    let mut arrows_checked = 0;
    for points in classes {
        let base = points[0];
        let index: BTreeMap<usize, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let out = g.arrows_from(base);
        if out.len() != points.len() {
            return Err(CstarError::BlockMismatch(format!(
                "class of {base} has {} points but {} arrows leave it",
                points.len(),
                out.len()
            )));
        }
        let mut basis = vec![usize::MAX; points.len()];
        for &h in &out {
            basis[index[&g.range(h)]] = h;
        }
        let block = Block { base, points, basis };
        let check: Vec<usize> = if full {
            block.points.iter().flat_map(|&p| g.arrows_from(p)).collect()
        } else {
            block.basis.iter().flat_map(|&h| [h, g.inverse(h)]).collect()
        };
        for a in check {
            check_matrix_unit(g, &block, &index, a)?;
            arrows_checked += 1;
        }
        blocks.push(block);
    }
    let mut multiplicities = BTreeMap::new();
    for b in &blocks {
        *multiplicities.entry(b.size()).or_insert(0) += 1;
    }
    let max_size = blocks.iter().map(Block::size).max().unwrap_or(0);
    Ok(BlockDecomposition { blocks, multiplicities, max_size, arrows_checked })
}

/// `π_base(δ_a)` must be the matrix unit `e_{r(a), s(a)}` in the block basis,
/// and `δ_a* = δ_{a⁻¹}` must go to its transpose.
fn check_matrix_unit(
    g: &FiniteGroupoid,
    block: &Block,
    index: &BTreeMap<usize, usize>,
    a: usize,
) -> Result<(), CstarError> {
    let (i, j) = (index[&g.range(a)], index[&g.source(a)]);
    // δ_a sends basis[k] to a·basis[k] when s(a) = r(basis[k]), i.e. k = j
    let image = g.compose(a, block.basis[j]);
    if image != Some(block.basis[i]) {
        return Err(CstarError::BlockMismatch(format!("arrow {a} does not act as e_({i},{j})")));
    }
    let inv = g.inverse(a);
    if (index[&g.range(inv)], index[&g.source(inv)]) != (j, i) {
        return Err(CstarError::BlockMismatch(format!("inverse of arrow {a} is not the transposed unit")));
    }
    Ok(())
}

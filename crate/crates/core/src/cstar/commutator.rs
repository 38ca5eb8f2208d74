use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::element::{check_len, convolve, ConvElement, Scalar, C64};
use super::norm::reduced_norm;
use super::CstarError;
use crate::groupoid::verify::seed;
use crate::groupoid::{generate_subgroupoid, FiniteGroupoid, Subgroupoid};
use crate::pou::PouPipeline;

/// `φ f φ`, that is `(φ∘r)·f·(φ∘s)` pointwise.
pub fn cutdown<'g, S: Scalar>(f: &ConvElement<'g, S>, phi: &[S]) -> Result<ConvElement<'g, S>, CstarError> {
    let g = f.groupoid();
    check_len(g, phi)?;
    Ok(f.pointwise(|a| phi[g.range(a)].clone() * phi[g.source(a)].clone()))
}

/// `[f, φ](g) = f(g)φ(s(g)) − φ(r(g))f(g)`.
pub fn commutator<'g, S: Scalar>(f: &ConvElement<'g, S>, phi: &[S]) -> Result<ConvElement<'g, S>, CstarError> {
    let g = f.groupoid();
    check_len(g, phi)?;
    Ok(f.pointwise(|a| phi[g.source(a)].clone() - phi[g.range(a)].clone()))
}

/// Splits `arrows` into the least number of bisections (sets on which both
/// `r` and `s` are injective). The arrows are the edges of a bipartite
/// multigraph from sources to ranges, so the least number is the maximum
/// degree and an edge coloring with that many colors is built by swapping
/// alternating paths.
pub fn min_bisection_cover(g: &FiniteGroupoid, arrows: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    let mut out_deg: HashMap<usize, usize> = HashMap::new();
    let mut in_deg: HashMap<usize, usize> = HashMap::new();
    for &a in arrows {
        *out_deg.entry(g.source(a)).or_default() += 1;
        *in_deg.entry(g.range(a)).or_default() += 1;
    }
    let delta = out_deg.values().chain(in_deg.values()).copied().max().unwrap_or(0);
    // at_src[x][c] / at_rng[y][c]: arrow of color c at that endpoint
    let mut at_src: HashMap<usize, Vec<Option<usize>>> = HashMap::new();
    let mut at_rng: HashMap<usize, Vec<Option<usize>>> = HashMap::new();
    let mut color: HashMap<usize, usize> = HashMap::new();
    for &a in arrows {
        let (x, y) = (g.source(a), g.range(a));
        let free = |v: &Vec<Option<usize>>| v.iter().position(Option::is_none).expect("degree below delta");
        let ca = free(at_src.entry(x).or_insert_with(|| vec![None; delta]));
        let cb = free(at_rng.entry(y).or_insert_with(|| vec![None; delta]));
        if at_rng[&y][ca].is_some() {
            // walk the ca/cb path from y and swap its colors
            let mut path = Vec::new();
            let mut on_range_side = true;
            let mut v = y;
            let mut want = ca;
            loop {
                let side = if on_range_side { &at_rng } else { &at_src };
                let Some(e) = side[&v][want] else { break };
                path.push(e);
                v = if on_range_side { g.source(e) } else { g.range(e) };
                on_range_side = !on_range_side;
                want = if want == ca { cb } else { ca };
            }
            for &e in &path {
                at_src.get_mut(&g.source(e)).unwrap()[color[&e]] = None;
                at_rng.get_mut(&g.range(e)).unwrap()[color[&e]] = None;
            }
            for &e in &path {
                let c = if color[&e] == ca { cb } else { ca };
                color.insert(e, c);
                at_src.get_mut(&g.source(e)).unwrap()[c] = Some(e);
                at_rng.get_mut(&g.range(e)).unwrap()[c] = Some(e);
            }
        }
        color.insert(a, ca);
        at_src.get_mut(&x).unwrap()[ca] = Some(a);
        at_rng.get_mut(&y).unwrap()[ca] = Some(a);
    }
    let mut cover = vec![Vec::new(); delta];
    for (&a, &c) in &color {
        cover[c].push(a);
    }
    for part in &mut cover {
        part.sort_unstable();
    }
    cover
}

/// Whether `r` and `s` are injective on `arrows`.
pub fn is_bisection(g: &FiniteGroupoid, arrows: &[usize]) -> bool {
    let s: BTreeSet<usize> = arrows.iter().map(|&a| g.source(a)).collect();
    let r: BTreeSet<usize> = arrows.iter().map(|&a| g.range(a)).collect();
    s.len() == arrows.len() && r.len() == arrows.len()
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    pub f_norm: f64,
    pub commutator_norm: f64,
    /// `sup_{g ∈ supp f} |φ(s(g)) − φ(r(g))|`.
    pub oscillation: f64,
    /// Least number of bisections covering `supp f`.
    pub bisections: usize,
    pub bisection_cover: Vec<Vec<usize>>,
    /// `M · oscillation · ‖f‖`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Relative slack allowed on floating-point norm inequalities.
pub const NORM_TOLERANCE: f64 = 1e-9;

pub(crate) fn le_tol(a: f64, b: f64) -> bool {
    a <= b + NORM_TOLERANCE * b.abs().max(1.0)
}

pub fn commutator_report(f: &ConvElement<C64>, phi: &[f64]) -> Result<CommutatorReport, CstarError> {
    let g = f.groupoid();
    check_len(g, phi)?;
    let phic: Vec<C64> = phi.iter().map(|&v| C64::new(v, 0.0)).collect();
    let c = commutator(f, &phic)?;
    let oscillation = f
        .iter()
        .map(|(a, _)| (phi[g.source(a)] - phi[g.range(a)]).abs())
        .fold(0.0, f64::max);
    let cover = min_bisection_cover(g, &f.support());
    let f_norm = reduced_norm(f);
    let commutator_norm = reduced_norm(&c);
    let bound = cover.len() as f64 * oscillation * f_norm;
    Ok(CommutatorReport {
        f_norm,
        commutator_norm,
        oscillation,
        bisections: cover.len(),
        bisection_cover: cover,
        bound,
        within_bound: le_tol(commutator_norm, bound),
    })
}

/// Unit functions `φ_i` with the subgroupoid each cut-down is declared to
/// live in.
#[derive(Debug, Clone)]
pub struct DeclaredPou {
    pub phi: Vec<Vec<f64>>,
    pub subgroupoids: Vec<Subgroupoid>,
}

impl DeclaredPou {
    /// `φ_i` from the pipeline; `H_i` generated by the arrows of `K` with
    /// both ends in the top of tower `i`.
    pub fn from_pipeline(g: &FiniteGroupoid, pipeline: &PouPipeline) -> Self {
        let pou = &pipeline.pou;
        let phi = (0..pou.colors()).map(|i| (0..pou.units).map(|x| pou.phi_f64(i, x)).collect()).collect();
        let k = &pipeline.enlarged.k;
        let subgroupoids =
            pipeline.towers.iter().map(|t| generate_subgroupoid(g, &seed(g, k, t.top()))).collect();
        DeclaredPou { phi, subgroupoids }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ColorTerm {
    pub color: usize,
    /// `‖φ_i‖ = sup |φ_i|`.
    pub phi_norm: f64,
    pub cutdown_norm: f64,
    pub commutator: CommutatorReport,
    /// Arrows in the declared subgroupoid.
    pub block_arrows: u128,
    /// Sizes of the orbit classes of the declared subgroupoid: the matrix
    /// blocks the cut-down lands in.
    pub block_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub f_norm: f64,
    pub terms: Vec<ColorTerm>,
    /// `‖Σ φ_i f φ_i − f‖`.
    pub defect: f64,
    /// `Σ ‖φ_i‖ ‖[f, φ_i]‖`.
    pub commutator_bound: f64,
    /// `Σ ‖φ_i‖ M osc_i ‖f‖`.
    pub bisection_bound: f64,
    /// Number of summands: one order-zero map per color.
    pub summands: usize,
    pub defect_within: bool,
    pub commutators_within: bool,
}

impl DecompositionReport {
    pub fn accepted(&self) -> bool {
        self.defect_within && self.commutators_within
    }
}

pub fn decompose_via_pou(f: &ConvElement<C64>, pou: &DeclaredPou) -> Result<DecompositionReport, CstarError> {
    let g = f.groupoid();
    if pou.phi.len() != pou.subgroupoids.len() {
        return Err(CstarError::UnitFunctionLength { expected: pou.phi.len(), found: pou.subgroupoids.len() });
    }
    let mut total = ConvElement::zero(g);
    let mut terms = Vec::new();
    for (i, (phi, h)) in pou.phi.iter().zip(&pou.subgroupoids).enumerate() {
        let phic: Vec<C64> = phi.iter().map(|&v| C64::new(v, 0.0)).collect();
        let cut = cutdown(f, &phic)?;
        if let Some(a) = cut.support().into_iter().find(|&a| !h.contains(g, a)) {
            return Err(CstarError::SupportLeak { color: i, arrow: a });
        }
        let commutator = commutator_report(f, phi)?;
        terms.push(ColorTerm {
            color: i,
            phi_norm: phi.iter().map(|v| v.abs()).fold(0.0, f64::max),
            cutdown_norm: reduced_norm(&cut),
            commutator,
            block_arrows: h.arrow_count(),
            block_sizes: h.orbit_classes(g).iter().map(Vec::len).collect(),
        });
        total = total.add(&cut)?;
    }
    let defect = reduced_norm(&total.sub(f)?);
    let commutator_bound: f64 = terms.iter().map(|t| t.phi_norm * t.commutator.commutator_norm).sum();
    let bisection_bound: f64 = terms.iter().map(|t| t.phi_norm * t.commutator.bound).sum();
    Ok(DecompositionReport {
        f_norm: reduced_norm(f),
        summands: terms.len(),
        defect_within: le_tol(defect, commutator_bound),
        commutators_within: terms.iter().all(|t| t.commutator.within_bound),
        terms,
        defect,
        commutator_bound,
        bisection_bound,
    })
}

/// `Σ φ_i f φ_i − f` computed through convolution with the diagonal
/// elements, as a cross-check of the pointwise formulas.
pub fn defect_by_convolution<'g>(f: &ConvElement<'g, C64>, phi: &[Vec<f64>]) -> Result<ConvElement<'g, C64>, CstarError> {
    let g = f.groupoid();
    let mut total = f.scale(&C64::new(-1.0, 0.0));
    for p in phi {
        let d = ConvElement::diagonal(g, &p.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>())?;
        total = total.add(&convolve(&convolve(&d, f)?, &d)?)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn constant_phi_commutes() {
        let g = FiniteGroupoid::pair(3);
        let f = ConvElement::from_pairs(&g, (0..9).map(|a| (a, C64::new(a as f64, 1.0)))).unwrap();
        let ones = vec![C64::one(); 3];
        assert!(commutator(&f, &ones).unwrap().is_zero());
        assert_eq!(cutdown(&f, &ones).unwrap(), f);
    }

    #[test]
    fn matrix_unit_against_a_unit_indicator() {
        let g = FiniteGroupoid::pair(3);
        let f = ConvElement::<C64>::delta(&g, g.pair_arrow(0, 1).unwrap());
        let r = commutator_report(&f, &[1.0, 0.0, 0.0]).unwrap();
        assert!((r.commutator_norm - 1.0).abs() < 1e-12);
        assert_eq!(r.oscillation, 1.0);
        assert_eq!(r.bisections, 1);
        assert!(r.within_bound);
    }

    #[test]
    fn bisections_of_the_full_pair_groupoid() {
        for n in 1..7 {
            let g = FiniteGroupoid::pair(n);
            let all: BTreeSet<usize> = (0..n * n).collect();
            let cover = min_bisection_cover(&g, &all);
            assert_eq!(cover.len(), n);
            assert!(cover.iter().all(|c| is_bisection(&g, c)));
            assert_eq!(cover.iter().map(Vec::len).sum::<usize>(), n * n);
        }
        assert!(min_bisection_cover(&FiniteGroupoid::pair(2), &BTreeSet::new()).is_empty());
        assert!(C64::zero().is_zero());
    }
}

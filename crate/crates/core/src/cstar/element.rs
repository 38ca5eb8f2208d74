use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::CstarError;
use crate::groupoid::FiniteGroupoid;
use crate::rational::{to_f64, Q};

pub type C64 = Complex<f64>;
/// Gaussian rationals.
pub type CQ = Complex<Q>;

/// Coefficient field of a convolution element.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn conjugate(&self) -> Self;
    fn to_c64(&self) -> C64;
}

impl Scalar for C64 {
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn to_c64(&self) -> C64 {
        *self
    }
}

impl Scalar for CQ {
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn to_c64(&self) -> C64 {
        C64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

/// Finitely supported function on the arrows of a groupoid. Zero
/// coefficients are never stored.
#[derive(Debug, Clone)]
pub struct ConvElement<'g, S: Scalar> {
    g: &'g FiniteGroupoid,
    coeffs: BTreeMap<usize, S>,
}

impl<S: Scalar> PartialEq for ConvElement<'_, S> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.g, other.g) && self.coeffs == other.coeffs
    }
}

impl<'g, S: Scalar> ConvElement<'g, S> {
    pub fn zero(g: &'g FiniteGroupoid) -> Self {
        ConvElement { g, coeffs: BTreeMap::new() }
    }

    pub fn from_pairs(
        g: &'g FiniteGroupoid,
        pairs: impl IntoIterator<Item = (usize, S)>,
    ) -> Result<Self, CstarError> {
        let mut f = Self::zero(g);
        for (a, c) in pairs {
            if a >= g.num_arrows() {
                return Err(CstarError::UnknownArrow(a));
            }
            f.add_at(a, c);
        }
        Ok(f)
    }

    /// Indicator of one arrow.
    pub fn delta(g: &'g FiniteGroupoid, arrow: usize) -> Self {
        let mut f = Self::zero(g);
        f.coeffs.insert(arrow, S::one());
        f
    }

    /// A function on units viewed as an element supported on the unit arrows.
    pub fn diagonal(g: &'g FiniteGroupoid, phi: &[S]) -> Result<Self, CstarError> {
        check_len(g, phi)?;
        Self::from_pairs(g, phi.iter().enumerate().map(|(x, c)| (g.unit(x), c.clone())))
    }

    pub fn groupoid(&self) -> &'g FiniteGroupoid {
        self.g
    }

    pub fn get(&self, arrow: usize) -> S {
        self.coeffs.get(&arrow).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_at(&mut self, arrow: usize, c: S) {
        let v = self.get(arrow) + c;
        if v.is_zero() {
            self.coeffs.remove(&arrow);
        } else {
            self.coeffs.insert(arrow, v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs.iter().map(|(&a, c)| (a, c))
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Units met by `r` or `s` of the support.
    pub fn touched_units(&self) -> BTreeSet<usize> {
        self.coeffs.keys().flat_map(|&a| [self.g.source(a), self.g.range(a)]).collect()
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.g);
        for (&a, v) in &self.coeffs {
            out.add_at(a, c.clone() * v.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, CstarError> {
        same_groupoid(self, other)?;
        let mut out = self.clone();
        for (&a, v) in &other.coeffs {
            out.add_at(a, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CstarError> {
        self.add(&other.scale(&-S::one()))
    }

    /// Pointwise product with a function on arrows.
    pub fn pointwise(&self, h: impl Fn(usize) -> S) -> Self {
        let mut out = Self::zero(self.g);
        for (&a, v) in &self.coeffs {
            out.add_at(a, h(a) * v.clone());
        }
        out
    }

    pub fn to_c64(&self) -> ConvElement<'g, C64> {
        let mut out = ConvElement::zero(self.g);
        for (&a, v) in &self.coeffs {
            out.add_at(a, v.to_c64());
        }
        out
    }

    /// `sup_g |f(g)|`.
    pub fn sup_abs(&self) -> f64 {
        self.coeffs.values().map(|v| v.to_c64().norm()).fold(0.0, f64::max)
    }
}

fn same_groupoid<S: Scalar>(a: &ConvElement<S>, b: &ConvElement<S>) -> Result<(), CstarError> {
    if std::ptr::eq(a.g, b.g) {
        Ok(())
    } else {
        Err(CstarError::GroupoidMismatch)
    }
}

pub(crate) fn check_len<T>(g: &FiniteGroupoid, phi: &[T]) -> Result<(), CstarError> {
    if phi.len() != g.num_points() {
        return Err(CstarError::UnitFunctionLength { expected: g.num_points(), found: phi.len() });
    }
    Ok(())
}

/// `(f₁f₂)(g) = Σ_{g₁g₂=g} f₁(g₁) f₂(g₂)`.
pub fn convolve<'g, S: Scalar>(
    f1: &ConvElement<'g, S>,
    f2: &ConvElement<'g, S>,
) -> Result<ConvElement<'g, S>, CstarError> {
    same_groupoid(f1, f2)?;
    let g = f1.g;
    let mut by_range: HashMap<usize, Vec<(usize, &S)>> = HashMap::new();
    for (&b, v) in &f2.coeffs {
        by_range.entry(g.range(b)).or_default().push((b, v));
    }
    let mut out = ConvElement::zero(g);
    for (&a, u) in &f1.coeffs {
        for &(b, v) in by_range.get(&g.source(a)).map(Vec::as_slice).unwrap_or(&[]) {
            let ab = g.compose(a, b).expect("composable");
            out.add_at(ab, u.clone() * v.clone());
        }
    }
    Ok(out)
}

/// `f*(g) = conj f(g⁻¹)`.
pub fn adjoint<'g, S: Scalar>(f: &ConvElement<'g, S>) -> ConvElement<'g, S> {
    let mut out = ConvElement::zero(f.g);
    for (&a, v) in &f.coeffs {
        out.add_at(f.g.inverse(a), v.conjugate());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn cq(re: i64, im: i64) -> CQ {
        CQ::new(qi(re), qi(im))
    }

    #[test]
    fn matrix_units_compose() {
        let g = FiniteGroupoid::pair(3);
        let e = |r, s| ConvElement::<CQ>::delta(&g, g.pair_arrow(r, s).unwrap());
        assert_eq!(convolve(&e(0, 1), &e(1, 2)).unwrap(), e(0, 2));
        assert!(convolve(&e(0, 1), &e(0, 2)).unwrap().is_zero());
        assert_eq!(adjoint(&e(0, 1).scale(&cq(2, 3))), e(1, 0).scale(&cq(2, -3)));
    }

    #[test]
    fn right_unit_cuts_support() {
        let g = FiniteGroupoid::pair(3);
        let f = ConvElement::from_pairs(&g, (0..9).map(|a| (a, cq(a as i64 + 1, 0)))).unwrap();
        let cut = convolve(&f, &ConvElement::delta(&g, g.unit(1))).unwrap();
        let expect: BTreeSet<usize> = (0..3).map(|r| g.pair_arrow(r, 1).unwrap()).collect();
        assert_eq!(cut.support(), expect);
        for a in expect {
            assert_eq!(cut.get(a), f.get(a));
        }
    }

    #[test]
    fn mismatched_groupoids() {
        let g = FiniteGroupoid::pair(2);
        let h = FiniteGroupoid::pair(2);
        let a = ConvElement::<C64>::delta(&g, 0);
        let b = ConvElement::<C64>::delta(&h, 0);
        assert_eq!(convolve(&a, &b), Err(CstarError::GroupoidMismatch));
        assert!(matches!(ConvElement::<C64>::from_pairs(&g, [(4, C64::one())]), Err(CstarError::UnknownArrow(4))));
    }
}

use super::{AsdimWitness, CoarseError, FiniteMetricSpace};

pub const DEFAULT_ORACLE_POINTS: usize = 16;

/// Least number of families of any witness at scale `(R, S)`, by exhaustive search.
pub fn exhaustive_min_colors(x: &FiniteMetricSpace, r: u64, s: u64, max_points: usize) -> Result<usize, CoarseError> {
    Ok(exhaustive_min_witness(x, r, s, max_points)?.families.len())
}

/// A witness with the least number of families.
///
/// Within one family, points at distance `≤ R` must share a class, so the
/// finest admissible classes of a coloring are the components of the
/// `R`-graph on each color; a coloring works iff those have diameter `≤ S`.
/// Colorings are enumerated as restricted growth strings for `k = 1, 2, …`.
pub fn exhaustive_min_witness(
    x: &FiniteMetricSpace,
    r: u64,
    s: u64,
    max_points: usize,
) -> Result<AsdimWitness, CoarseError> {
    let n = x.len();
    if n > max_points {
        return Err(CoarseError::TooLarge { points: n, limit: max_points });
    }
    if n == 0 {
        return Ok(AsdimWitness { scale_r: r, bound_s: s, families: Vec::new() });
    }
    for k in 1..=n {
        let mut color = vec![usize::MAX; n];
        if search(x, r, s, k, 0, 0, &mut color) {
            let families = (0..k).map(|c| components(x, r, &color, c, n)).collect();
            return Ok(AsdimWitness { scale_r: r, bound_s: s, families });
        }
    }
    unreachable!("singleton classes in distinct families always work")
}

fn search(x: &FiniteMetricSpace, r: u64, s: u64, k: usize, p: usize, used: usize, color: &mut [usize]) -> bool {
    if p == color.len() {
        return used == k;
    }
    // not enough points left to open the remaining colors
    if k - used > color.len() - p {
        return false;
    }
    for c in 0..(used + 1).min(k) {
        color[p] = c;
        if component_ok(x, r, s, color, p) && search(x, r, s, k, p + 1, used.max(c + 1), color) {
            return true;
        }
    }
    color[p] = usize::MAX;
    false
}

/// Component of `p` among assigned points of its color has diameter `≤ S`.
fn component_ok(x: &FiniteMetricSpace, r: u64, s: u64, color: &[usize], p: usize) -> bool {
    let comp = component_of(x, r, color, color[p], p + 1, p);
    x.diameter_of(&comp) <= s
}

fn component_of(x: &FiniteMetricSpace, r: u64, color: &[usize], c: usize, upto: usize, start: usize) -> Vec<usize> {
    let mut comp = vec![start];
    let mut seen = vec![false; upto];
    seen[start] = true;
    let mut i = 0;
    while i < comp.len() {
        let a = comp[i];
        for b in 0..upto {
            if !seen[b] && color[b] == c && x.dist(a, b) <= r {
                seen[b] = true;
                comp.push(b);
            }
        }
        i += 1;
    }
    comp.sort_unstable();
    comp
}

fn components(x: &FiniteMetricSpace, r: u64, color: &[usize], c: usize, n: usize) -> Vec<Vec<usize>> {
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for p in 0..n {
        if color[p] == c && !done[p] {
            let comp = component_of(x, r, color, c, n, p);
            for &q in &comp {
                done[q] = true;
            }
            out.push(comp);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::verify_asdim_witness;

    #[test]
    fn path_twelve() {
        let x = FiniteMetricSpace::path(12);
        let w = exhaustive_min_witness(&x, 2, 4, DEFAULT_ORACLE_POINTS).unwrap();
        assert_eq!(w.families.len(), 2);
        assert!(verify_asdim_witness(&x, &w).unwrap().accepted());
    }

    #[test]
    fn small_cases() {
        let x = FiniteMetricSpace::path(6);
        assert_eq!(exhaustive_min_colors(&x, 3, 5, 16).unwrap(), 1);
        let two = FiniteMetricSpace::path(2);
        assert_eq!(exhaustive_min_colors(&two, 3, 0, 16).unwrap(), 2);
        let big = FiniteMetricSpace::path(17);
        assert!(matches!(exhaustive_min_colors(&big, 1, 1, 16), Err(CoarseError::TooLarge { .. })));
    }
}

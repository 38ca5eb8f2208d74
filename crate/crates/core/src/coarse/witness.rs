use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CoarseError, FiniteMetricSpace};

/// Families are checked on separate threads from this many points on.
const PARALLEL_POINTS: usize = 4096;

/// `d+1` families of point classes at separation scale `R` and bound `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsdimWitness {
    pub scale_r: u64,
    pub bound_s: u64,
    pub families: Vec<Vec<Vec<usize>>>,
}

impl AsdimWitness {
    pub fn num_classes(&self) -> usize {
        self.families.iter().map(Vec::len).sum()
    }

    /// Number of families with at least one class.
    pub fn nonempty_families(&self) -> usize {
        self.families.iter().filter(|f| !f.is_empty()).count()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AsdimReport {
    pub points: usize,
    pub families: usize,
    pub classes: usize,
    pub uncovered: Vec<usize>,
    /// First pair of distinct same-family classes closer than `R`: (family, x, y, d).
    pub separation: Option<(usize, usize, usize, u64)>,
    /// First class with diameter above `S`: (family, class, diameter).
    pub oversized: Option<(usize, usize, u64)>,
    pub max_diameter: u64,
    pub scale_r: u64,
    pub bound_s: u64,
}

impl AsdimReport {
    pub fn accepted(&self) -> bool {
        self.status().is_ok()
    }

    pub fn status(&self) -> Result<(), CoarseError> {
        if !self.uncovered.is_empty() {
            return Err(CoarseError::CoverGap(self.uncovered.clone()));
        }
        if let Some((family, x, y, distance)) = self.separation {
            return Err(CoarseError::SeparationViolation { family, x, y, distance });
        }
        if let Some((family, class, diameter)) = self.oversized {
            return Err(CoarseError::DiameterViolation { family, class, diameter, bound: self.bound_s });
        }
        Ok(())
    }
}

struct FamilyCheck {
    separation: Option<(usize, usize, usize, u64)>,
    oversized: Option<(usize, usize, u64)>,
    max_diameter: u64,
}

fn check_family(x: &FiniteMetricSpace, w: &AsdimWitness, f: usize) -> FamilyCheck {
    const NONE: u32 = u32::MAX;
    let classes = &w.families[f];
    let mut label = vec![NONE; x.len()];
    let mut separation = None;
    for (c, class) in classes.iter().enumerate() {
        for &p in class {
            if label[p] != NONE && separation.is_none() {
                separation = Some((f, p, p, 0));
            }
            label[p] = c as u32;
        }
    }
    'outer: for (c, class) in classes.iter().enumerate() {
        if separation.is_some() {
            break;
        }
        for &p in class {
            for q in x.neighbors_within(p, w.scale_r) {
                if label[q] != NONE && label[q] != c as u32 {
                    separation = Some((f, p, q, x.dist(p, q)));
                    break 'outer;
                }
            }
        }
    }
    let mut oversized = None;
    let mut max_diameter = 0;
    for (c, class) in classes.iter().enumerate() {
        let d = x.diameter_of(class);
        max_diameter = max_diameter.max(d);
        if d > w.bound_s && oversized.is_none() {
            oversized = Some((f, c, d));
        }
    }
    FamilyCheck { separation, oversized, max_diameter }
}

/// Cover, `R`-separation within each family and class diameters `≤ S`, all exact.
pub fn verify_asdim_witness(x: &FiniteMetricSpace, w: &AsdimWitness) -> Result<AsdimReport, CoarseError> {
    if let Some(&bad) = w.families.iter().flatten().flatten().find(|&&p| p >= x.len()) {
        return Err(CoarseError::UnknownPoint(bad));
    }
    let mut covered = vec![false; x.len()];
    for &p in w.families.iter().flatten().flatten() {
        covered[p] = true;
    }
    let uncovered: Vec<usize> = (0..x.len()).filter(|&p| !covered[p]).collect();
    let checks: Vec<FamilyCheck> = if x.len() < PARALLEL_POINTS {
        (0..w.families.len()).map(|f| check_family(x, w, f)).collect()
    } else {
        std::thread::scope(|s| {
            let hs: Vec<_> = (0..w.families.len()).map(|f| s.spawn(move || check_family(x, w, f))).collect();
            hs.into_iter().map(|h| h.join().expect("family check panicked")).collect()
        })
    };
    Ok(AsdimReport {
        points: x.len(),
        families: w.families.len(),
        classes: w.num_classes(),
        uncovered,
        separation: checks.iter().find_map(|c| c.separation),
        oversized: checks.iter().find_map(|c| c.oversized),
        max_diameter: checks.iter().map(|c| c.max_diameter).max().unwrap_or(0),
        scale_r: w.scale_r,
        bound_s: w.bound_s,
    })
}

/// Interval pattern on ℤ (two families, length `5R`) or brick wall on ℤ²
/// (three families, `10R × 10R` bricks, odd rows shifted by half a brick).
pub fn construct_grid_witness(x: &FiniteMetricSpace, r: u64) -> Result<AsdimWitness, CoarseError> {
    let (lo, _) = x
        .grid_box()
        .ok_or_else(|| CoarseError::InvalidSpace("grid witnesses need a box".into()))?;
    if r == 0 {
        return Err(CoarseError::InvalidSpace("scale must be positive".into()));
    }
    match lo.len() {
        1 => {
            let l = 5 * r as i64;
            let mut classes: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
            for p in 0..x.len() {
                let c = x.coords(p).expect("grid")[0];
                classes.entry((c - lo[0]).div_euclid(l)).or_default().push(p);
            }
            let mut families = vec![Vec::new(), Vec::new()];
            for (k, class) in classes {
                families[k.rem_euclid(2) as usize].push(class);
            }
            Ok(AsdimWitness { scale_r: r, bound_s: (l - 1) as u64, families })
        }
        2 => {
            let l = 10 * r as i64;
            let half = l / 2;
            let mut classes: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
            for p in 0..x.len() {
                let c = x.coords(p).expect("grid");
                let row = (c[1] - lo[1]).div_euclid(l);
                let k = (c[0] - lo[0] + row.rem_euclid(2) * half).div_euclid(l);
                classes.entry((row, k)).or_default().push(p);
            }
            let mut families = vec![Vec::new(), Vec::new(), Vec::new()];
            for ((row, k), class) in classes {
                // left edge at (2k - row parity)·L/2; three colors along this half-index
                let h = 2 * k - row.rem_euclid(2);
                families[h.rem_euclid(3) as usize].push(class);
            }
            Ok(AsdimWitness { scale_r: r, bound_s: 2 * (l - 1) as u64, families })
        }
        n => Err(CoarseError::InvalidSpace(format!("no grid constructor in dimension {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_families(x: &FiniteMetricSpace, len: i64, families: usize) -> Vec<Vec<Vec<usize>>> {
        let mut out = vec![Vec::new(); families];
        let mut k = 0;
        let mut start = 0;
        while start < x.len() as i64 {
            let end = (start + len).min(x.len() as i64);
            out[k % families].push((start as usize..end as usize).collect());
            start = end;
            k += 1;
        }
        out
    }

    #[test]
    fn alternating_intervals_accepted() {
        let x = FiniteMetricSpace::interval(0, 199).unwrap();
        let w = AsdimWitness { scale_r: 10, bound_s: 49, families: interval_families(&x, 50, 2) };
        let r = verify_asdim_witness(&x, &w).unwrap();
        assert!(r.accepted(), "{:?}", r.status());
        assert_eq!(r.max_diameter, 49);
    }

    #[test]
    fn single_family_tiling_rejected() {
        let x = FiniteMetricSpace::interval(0, 199).unwrap();
        let w = AsdimWitness { scale_r: 10, bound_s: 49, families: interval_families(&x, 50, 1) };
        let r = verify_asdim_witness(&x, &w).unwrap();
        assert!(matches!(r.status(), Err(CoarseError::SeparationViolation { family: 0, .. })));
    }

    #[test]
    fn bounded_space_one_class() {
        let x = FiniteMetricSpace::path(7);
        let w = AsdimWitness { scale_r: 3, bound_s: 6, families: vec![vec![(0..7).collect()]] };
        assert!(verify_asdim_witness(&x, &w).unwrap().accepted());
        let tight = AsdimWitness { bound_s: 5, ..w };
        assert!(matches!(
            verify_asdim_witness(&x, &tight).unwrap().status(),
            Err(CoarseError::DiameterViolation { diameter: 6, .. })
        ));
    }

    #[test]
    fn gaps_and_bad_points() {
        let x = FiniteMetricSpace::path(4);
        let w = AsdimWitness { scale_r: 1, bound_s: 3, families: vec![vec![vec![0, 1]]] };
        assert_eq!(verify_asdim_witness(&x, &w).unwrap().status(), Err(CoarseError::CoverGap(vec![2, 3])));
        let w = AsdimWitness { scale_r: 1, bound_s: 3, families: vec![vec![vec![0, 9]]] };
        assert_eq!(verify_asdim_witness(&x, &w).unwrap_err(), CoarseError::UnknownPoint(9));
    }

    #[test]
    fn constructors() {
        let x = FiniteMetricSpace::interval(0, 999).unwrap();
        let w = construct_grid_witness(&x, 10).unwrap();
        assert_eq!((w.families.len(), w.bound_s), (2, 49));
        assert!(verify_asdim_witness(&x, &w).unwrap().accepted());

        let x = FiniteMetricSpace::interval(3, 3).unwrap();
        let w = construct_grid_witness(&x, 5).unwrap();
        assert_eq!(w.families.len(), 2);
        assert_eq!(w.num_classes(), 1);
        assert!(verify_asdim_witness(&x, &w).unwrap().accepted());

        let x = FiniteMetricSpace::grid(vec![0, 0], vec![199, 199]).unwrap();
        let w = construct_grid_witness(&x, 5).unwrap();
        assert_eq!(w.families.len(), 3);
        let r = verify_asdim_witness(&x, &w).unwrap();
        assert!(r.accepted(), "{:?}", r.status());
        assert_eq!(r.max_diameter, 98);
    }
}

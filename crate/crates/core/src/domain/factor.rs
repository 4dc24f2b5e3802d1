//! Planar factor domains in the plane `(x_1, x_v)`.
//!
//! Each recipe places hyperbola branches so that their pairwise intersections
//! (the corners) sit exactly over prescribed `x_1` values. Corner heights are
//! recorded from the recipe and cross-checked against
//! [`intersect_branches`] when the factor is built.

use crate::algebra::{intersect_branches, Bound, Branch, HypersurfaceSpec, Side, Sigma};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// Two branches crossing twice; bounded, nonempty only over `[t_1, t_l]`.
    Lens,
    /// Four branches with an upper and a lower corner over one `t_j`.
    Pinch,
    /// Four branches whose upper pair never meets, so slices are unbounded
    /// above over `[t_j, t_{j+1}]`; or the two-branch first-interval variant.
    Open,
}

impl FactorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FactorKind::Lens => "lens",
            FactorKind::Pinch => "pinch",
            FactorKind::Open => "open",
        }
    }
}

/// Intersection of two hypersurfaces of the same factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corner<T> {
    pub x1: T,
    pub height: T,
    /// Indices into [`FactorDomain::hypersurfaces`].
    pub pair: (usize, usize),
}

/// Closed interval `[lo, hi]` of admissible `x_v`; `hi` may be `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_open(&self, v: T, tol: T) -> bool {
        self.lo + tol < v && v < self.hi - tol
    }

    pub fn contains_closed(&self, v: T, tol: T) -> bool {
        self.lo - tol <= v && v <= self.hi + tol
    }

    /// A strictly interior point; for unbounded intervals, `lo + reach`.
    pub fn interior_point(&self, reach: T) -> T {
        if self.hi.is_finite() {
            (self.lo + self.hi) / T::lit(2.0)
        } else {
            self.lo + reach
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorDomain<T> {
    pub kind: FactorKind,
    /// 0-based coordinate paired with `x_1`.
    pub axis: usize,
    /// Two-branch open factor covering the first interval.
    pub first_interval: bool,
    pub hypersurfaces: Vec<HypersurfaceSpec<T>>,
    pub corners: Vec<Corner<T>>,
    /// The lens is empty outside this closed `x_1` range.
    pub x1_range: Option<(T, T)>,
}

fn hs<T: Scalar>(a: T, b: T, c: T, side: Side, sigma: Sigma) -> Result<HypersurfaceSpec<T>> {
    HypersurfaceSpec::new(1, Branch::new(a, b, c, side)?, sigma)
}

fn check_finite<T: Scalar>(vals: &[T]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter("parameters must be finite".into()))
    }
}

impl<T: Scalar> FactorDomain<T> {
    /// Lens over `[t1, tl]`: with `mu = (t1 + tl)/2`, `r = (tl - t1)/2`, the
    /// lower branch `(x1 - mu + 2r)(xv + 2r) = 3r^2` (plus side) and the upper
    /// branch `(x1 - mu - 2r)(xv - 2r) = 3r^2` (minus side) cross at
    /// `(t1, r)` and `(tl, -r)`.
    pub fn lens(t1: T, tl: T) -> Result<Self> {
        check_finite(&[t1, tl])?;
        if t1 >= tl {
            return Err(Error::InvalidParameter(format!("lens needs t1 < tl, got {t1} >= {tl}")));
        }
        let two = T::lit(2.0);
        let mu = (t1 + tl) / two;
        let r = (tl - t1) / two;
        let c = T::lit(3.0) * r * r;
        let lower = hs(mu - two * r, -two * r, c, Side::Plus, Sigma::Pos)?;
        let upper = hs(mu + two * r, two * r, c, Side::Minus, Sigma::Pos)?;
        let f = Self {
            kind: FactorKind::Lens,
            axis: 1,
            first_interval: false,
            hypersurfaces: vec![lower, upper],
            corners: vec![
                Corner { x1: t1, height: r, pair: (0, 1) },
                Corner { x1: tl, height: -r, pair: (0, 1) },
            ],
            x1_range: Some((t1, tl)),
        };
        f.verify_corners()?;
        Ok(f)
    }

    /// Pinch at `tj`: four branches with `b = 0` and `|c| = rho^2`, upper
    /// corner `(tj, rho)` and lower corner `(tj, -rho)`. Every slice is a
    /// bounded interval containing 0.
    pub fn pinch(tj: T, rho: T) -> Result<Self> {
        check_finite(&[tj, rho])?;
        if rho <= T::zero() {
            return Err(Error::InvalidParameter(format!("pinch radius must be positive, got {rho}")));
        }
        let z = T::zero();
        let c = rho * rho;
        let hypersurfaces = vec![
            hs(tj - rho, z, c, Side::Plus, Sigma::Neg)?,
            hs(tj + rho, z, -c, Side::Plus, Sigma::Pos)?,
            hs(tj + rho, z, c, Side::Minus, Sigma::Neg)?,
            hs(tj - rho, z, -c, Side::Minus, Sigma::Pos)?,
        ];
        let f = Self {
            kind: FactorKind::Pinch,
            axis: 1,
            first_interval: false,
            hypersurfaces,
            corners: vec![
                Corner { x1: tj, height: rho, pair: (0, 1) },
                Corner { x1: tj, height: -rho, pair: (2, 3) },
            ],
            x1_range: None,
        };
        f.verify_corners()?;
        Ok(f)
    }

    /// Open factor over `[tj, tj1]`.
    ///
    /// Four-branch form (`rho = 2 (tj1 - tj)`): upper branches supported on
    /// `x1 > tj1` and `x1 < tj`, lower pair crossing at `(tj, -rho)`.
    /// First-interval form (`is_first`, `rho' = tl - tj`): one upper branch
    /// supported on `x1 > tj1` and a single corner-free lower branch.
    pub fn open(tj: T, tj1: T, is_first: bool, tl: T) -> Result<Self> {
        check_finite(&[tj, tj1, tl])?;
        if tj >= tj1 {
            return Err(Error::InvalidParameter(format!("open factor needs tj < tj1, got {tj} >= {tj1}")));
        }
        if tj1 > tl {
            return Err(Error::InvalidParameter(format!("open factor needs tj1 <= tl, got {tj1} > {tl}")));
        }
        let z = T::zero();
        let f = if is_first {
            let rho = tl - tj;
            let c = rho * rho;
            Self {
                kind: FactorKind::Open,
                axis: 1,
                first_interval: true,
                hypersurfaces: vec![
                    hs(tj1, z, c, Side::Plus, Sigma::Neg)?,
                    hs(tl + rho, z, c, Side::Minus, Sigma::Neg)?,
                ],
                corners: Vec::new(),
                x1_range: None,
            }
        } else {
            let rho = T::lit(2.0) * (tj1 - tj);
            let c = rho * rho;
            Self {
                kind: FactorKind::Open,
                axis: 1,
                first_interval: false,
                hypersurfaces: vec![
                    hs(tj1, z, c, Side::Plus, Sigma::Neg)?,
                    hs(tj, z, -c, Side::Plus, Sigma::Pos)?,
                    hs(tj + rho, z, c, Side::Minus, Sigma::Neg)?,
                    hs(tj - rho, z, -c, Side::Minus, Sigma::Pos)?,
                ],
                corners: vec![Corner { x1: tj, height: -rho, pair: (2, 3) }],
                x1_range: None,
            }
        };
        f.verify_corners()?;
        Ok(f)
    }

    /// Moves the factor into the plane `(x_1, x_axis)`.
    pub fn on_axis(mut self, axis: usize) -> Result<Self> {
        if axis == 0 {
            return Err(Error::InvalidParameter("factor axis must differ from x1".into()));
        }
        self.axis = axis;
        for h in &mut self.hypersurfaces {
            h.axis = axis;
        }
        Ok(self)
    }

    /// Every recorded corner must be a transversal intersection point of its
    /// pair, and every intersection point of a pair must be recorded.
    pub fn verify_corners(&self) -> Result<()> {
        let scale = self.scale();
        let tol = T::geom_tol() * scale;
        for c in &self.corners {
            let (i, k) = c.pair;
            if i >= self.hypersurfaces.len() || k >= self.hypersurfaces.len() || i == k {
                return Err(Error::Construction(format!("corner pair ({i}, {k}) is invalid")));
            }
            let pts = intersect_branches(&self.hypersurfaces[i].branch, &self.hypersurfaces[k].branch)?;
            let hit = pts
                .iter()
                .find(|p| (p.point[0] - c.x1).abs() <= tol && (p.point[1] - c.height).abs() <= tol);
            match hit {
                None => {
                    return Err(Error::Construction(format!(
                        "{} corner ({}, {}) is not an intersection of its branches",
                        self.kind.as_str(),
                        c.x1,
                        c.height
                    )))
                }
                Some(p) if p.tangent => {
                    return Err(Error::Construction(format!(
                        "{} corner ({}, {}) is a tangency",
                        self.kind.as_str(),
                        c.x1,
                        c.height
                    )))
                }
                Some(_) => {}
            }
        }
        for i in 0..self.hypersurfaces.len() {
            for k in i + 1..self.hypersurfaces.len() {
                let pts = intersect_branches(&self.hypersurfaces[i].branch, &self.hypersurfaces[k].branch)?;
                for p in pts {
                    let recorded = self.corners.iter().any(|c| {
                        (c.pair == (i, k) || c.pair == (k, i))
                            && (p.point[0] - c.x1).abs() <= tol
                            && (p.point[1] - c.height).abs() <= tol
                    });
                    if !recorded {
                        return Err(Error::Construction(format!(
                            "{} branches {i} and {k} meet at unrecorded point ({}, {})",
                            self.kind.as_str(),
                            p.point[0],
                            p.point[1]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn scale(&self) -> T {
        self.hypersurfaces.iter().fold(T::one(), |acc, h| {
            acc.max(T::one() + h.branch.a.abs() + h.branch.b.abs() + h.branch.c.abs())
        })
    }

    /// Admissible `x_v` over `x1`: the lower envelope of applicable lower
    /// branches up to the upper envelope of applicable upper branches.
    /// `None` when empty. Crossings within rounding noise (at corners) are
    /// collapsed to a single point.
    pub fn interval_at(&self, x1: T) -> Option<Interval<T>> {
        if let Some((t1, tl)) = self.x1_range {
            let pad = T::noise(t1.abs() + tl.abs());
            if x1 < t1 - pad || x1 > tl + pad {
                return None;
            }
        }
        let mut lo = T::neg_infinity();
        let mut hi = T::infinity();
        for h in &self.hypersurfaces {
            if let Some(v) = h.branch.height(x1) {
                match h.bound() {
                    Bound::Lower => lo = lo.max(v),
                    Bound::Upper => hi = hi.min(v),
                }
            }
        }
        if lo <= hi {
            return Some(Interval { lo, hi });
        }
        if lo - hi <= T::noise(lo.abs() + hi.abs() + x1.abs()) {
            let mid = (lo + hi) / T::lit(2.0);
            return Some(Interval { lo: mid, hi: mid });
        }
        None
    }

    /// `x_1` values over which the slice is unbounded above.
    pub fn unbounded_range(&self) -> Option<(T, T)> {
        if self.kind != FactorKind::Open {
            return None;
        }
        let upper: Vec<_> = self
            .hypersurfaces
            .iter()
            .filter(|h| h.bound() == Bound::Upper)
            .map(|h| h.branch.support())
            .collect();
        // complement of the union of the upper supports
        let lo = upper
            .iter()
            .filter(|s| s.lo == T::neg_infinity())
            .map(|s| s.hi)
            .fold(T::neg_infinity(), T::max);
        let hi = upper
            .iter()
            .filter(|s| s.hi == T::infinity())
            .map(|s| s.lo)
            .fold(T::infinity(), T::min);
        (lo <= hi).then_some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn branch_tuple(h: &HypersurfaceSpec<f64>) -> (f64, f64, f64, Side, Sigma) {
        (h.branch.a, h.branch.b, h.branch.c, h.branch.side, h.sigma)
    }

    #[test]
    fn lens_unit_recipe() {
        let f = FactorDomain::lens(-1.0, 1.0).unwrap();
        assert_eq!(branch_tuple(&f.hypersurfaces[0]), (-2.0, -2.0, 3.0, Side::Plus, Sigma::Pos));
        assert_eq!(branch_tuple(&f.hypersurfaces[1]), (2.0, 2.0, 3.0, Side::Minus, Sigma::Pos));
        let c: Vec<_> = f.corners.iter().map(|c| (c.x1, c.height)).collect();
        assert_eq!(c, vec![(-1.0, 1.0), (1.0, -1.0)]);
    }

    #[test]
    fn lens_scaled_recipe() {
        let f = FactorDomain::lens(-2.0, 2.0).unwrap();
        assert_eq!(branch_tuple(&f.hypersurfaces[0]), (-4.0, -4.0, 12.0, Side::Plus, Sigma::Pos));
        assert_eq!(branch_tuple(&f.hypersurfaces[1]), (4.0, 4.0, 12.0, Side::Minus, Sigma::Pos));
        let xs: Vec<_> = f.corners.iter().map(|c| c.x1).collect();
        assert_eq!(xs, vec![-2.0, 2.0]);
    }

    #[test]
    fn lens_slices() {
        let f = FactorDomain::lens(-1.0, 1.0).unwrap();
        assert_eq!(f.interval_at(0.0), Some(Interval { lo: -0.5, hi: 0.5 }));
        assert_eq!(f.interval_at(2.0), None);
        assert_eq!(f.interval_at(-1.5), None);
        let at_corner = f.interval_at(-1.0).unwrap();
        assert!(at_corner.is_degenerate());
        assert_eq!(at_corner.lo, 1.0);
    }

    #[test]
    fn lens_rejects_bad_order() {
        assert!(FactorDomain::lens(1.0, 1.0).is_err());
        assert!(FactorDomain::lens(2.0, 1.0).is_err());
    }

    #[test]
    fn pinch_unit_recipe() {
        let f = FactorDomain::pinch(0.0, 1.0).unwrap();
        let got: Vec<_> = f.hypersurfaces.iter().map(branch_tuple).collect();
        assert_eq!(
            got,
            vec![
                (-1.0, 0.0, 1.0, Side::Plus, Sigma::Neg),
                (1.0, 0.0, -1.0, Side::Plus, Sigma::Pos),
                (1.0, 0.0, 1.0, Side::Minus, Sigma::Neg),
                (-1.0, 0.0, -1.0, Side::Minus, Sigma::Pos),
            ]
        );
        let c: Vec<_> = f.corners.iter().map(|c| (c.x1, c.height)).collect();
        assert_eq!(c, vec![(0.0, 1.0), (0.0, -1.0)]);
        assert_eq!(f.interval_at(0.0), Some(Interval { lo: -1.0, hi: 1.0 }));
        for h in &f.hypersurfaces {
            assert_eq!(h.eval_planar(0.0, 0.0), 1.0);
        }
        assert!(FactorDomain::pinch(0.0, 0.0).is_err());
        assert!(FactorDomain::pinch(0.0, -1.0).is_err());
    }

    #[test]
    fn pinch_slices_bounded_around_zero() {
        let f = FactorDomain::pinch(0.3, 0.7).unwrap();
        for k in -40..=40 {
            let x1 = f64::from(k) * 0.25;
            let iv = f.interval_at(x1).unwrap();
            assert!(iv.is_bounded() && iv.lo < 0.0 && 0.0 < iv.hi, "x1={x1}: {iv:?}");
        }
    }

    #[test]
    fn open_unit_recipe() {
        let f = FactorDomain::open(0.0, 1.0, false, 5.0).unwrap();
        let got: Vec<_> = f.hypersurfaces.iter().map(branch_tuple).collect();
        assert_eq!(
            got,
            vec![
                (1.0, 0.0, 4.0, Side::Plus, Sigma::Neg),
                (0.0, 0.0, -4.0, Side::Plus, Sigma::Pos),
                (2.0, 0.0, 4.0, Side::Minus, Sigma::Neg),
                (-2.0, 0.0, -4.0, Side::Minus, Sigma::Pos),
            ]
        );
        let c: Vec<_> = f.corners.iter().map(|c| (c.x1, c.height)).collect();
        assert_eq!(c, vec![(0.0, -2.0)]);
        let iv = f.interval_at(0.5).unwrap();
        assert_eq!(iv.lo, -1.6);
        assert_eq!(iv.hi, f64::INFINITY);
        assert!(intersect_branches(&f.hypersurfaces[0].branch, &f.hypersurfaces[1].branch)
            .unwrap()
            .is_empty());
        assert_eq!(f.unbounded_range(), Some((0.0, 1.0)));
        assert!(f.interval_at(1.5).unwrap().is_bounded());
        assert!(f.interval_at(-0.5).unwrap().is_bounded());
    }

    #[test]
    fn open_first_interval_variant() {
        let f = FactorDomain::open(0.0, 1.0, true, 2.0).unwrap();
        assert_eq!(f.hypersurfaces.len(), 2);
        assert!(f.corners.is_empty());
        assert_eq!(branch_tuple(&f.hypersurfaces[0]), (1.0, 0.0, 4.0, Side::Plus, Sigma::Neg));
        assert_eq!(branch_tuple(&f.hypersurfaces[1]), (4.0, 0.0, 4.0, Side::Minus, Sigma::Neg));
        let (lo, hi) = f.unbounded_range().unwrap();
        assert_eq!(lo, f64::NEG_INFINITY);
        assert_eq!(hi, 1.0);
        assert!(!f.interval_at(0.5).unwrap().is_bounded());
        assert!(f.interval_at(1.5).unwrap().is_bounded());
    }

    #[test]
    fn open_rejects_bad_interval() {
        assert!(FactorDomain::open(1.0, 1.0, false, 2.0).is_err());
        assert!(FactorDomain::open(0.0, 3.0, false, 2.0).is_err());
    }

    #[test]
    fn on_axis_moves_all_hypersurfaces() {
        let f = FactorDomain::pinch(0.0, 1.0).unwrap().on_axis(4).unwrap();
        assert!(f.hypersurfaces.iter().all(|h| h.axis == 4));
        assert!(FactorDomain::pinch(0.0, 1.0).unwrap().on_axis(0).is_err());
    }

    #[test]
    fn single_precision_recipes() {
        let f = FactorDomain::<f32>::lens(-1.0, 1.0).unwrap();
        assert_eq!(f.interval_at(0.0), Some(Interval { lo: -0.5, hi: 0.5 }));
        assert!(FactorDomain::<f32>::pinch(0.0, 0.5).is_ok());
        assert!(FactorDomain::<f32>::open(0.0, 1.0, false, 2.0).is_ok());
    }
}

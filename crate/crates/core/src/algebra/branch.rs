//! Hyperbola branches `(x_u - a)(x_v - b) = c` and the hypersurfaces they
//! sweep out in `R^n`.

use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which connected component of the hyperbola is selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `x_v > b`
    Plus,
    /// `x_v < b`
    Minus,
}

impl Side {
    fn sign<T: Scalar>(self) -> T {
        match self {
            Side::Plus => T::one(),
            Side::Minus => -T::one(),
        }
    }
}

/// An open interval `(lo, hi)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OpenInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> OpenInterval<T> {
    pub fn contains(&self, u: T) -> bool {
        self.lo < u && u < self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Self { lo, hi })
    }
}

/// One connected component of `(x_u - a)(x_v - b) = c`, `c != 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branch<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub side: Side,
}

impl<T: Scalar> Branch<T> {
    pub fn new(a: T, b: T, c: T, side: Side) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidBranch("parameters must be finite".into()));
        }
        if c == T::zero() {
            return Err(Error::InvalidBranch("c must be nonzero".into()));
        }
        Ok(Self { a, b, c, side })
    }

    /// The open `x_u`-interval over which the branch is a graph.
    pub fn support(&self) -> OpenInterval<T> {
        // c / (u - a) must have the sign of the side
        let right = (self.c > T::zero()) == (self.side == Side::Plus);
        if right {
            OpenInterval {
                lo: self.a,
                hi: T::infinity(),
            }
        } else {
            OpenInterval {
                lo: T::neg_infinity(),
                hi: self.a,
            }
        }
    }

    /// `x_v` on the branch over `u`, or `None` outside the support.
    pub fn height(&self, u: T) -> Option<T> {
        self.support()
            .contains(u)
            .then(|| self.b + self.c / (u - self.a))
    }

    /// Planar defining function `(u - a)(v - b) - c`.
    pub fn residual(&self, u: T, v: T) -> T {
        (u - self.a) * (v - self.b) - self.c
    }

    /// Gradient of [`Branch::residual`].
    pub fn residual_grad(&self, u: T, v: T) -> [T; 2] {
        [v - self.b, u - self.a]
    }

    /// On the full hyperbola within `tol` and strictly on the selected side.
    pub fn contains(&self, p: [T; 2], tol: T) -> bool {
        let on_side = match self.side {
            Side::Plus => p[1] > self.b,
            Side::Minus => p[1] < self.b,
        };
        on_side && self.residual(p[0], p[1]).abs() <= tol
    }

    /// The other connected component of the same hyperbola.
    pub fn opposite(&self) -> Self {
        Self {
            side: match self.side {
                Side::Plus => Side::Minus,
                Side::Minus => Side::Plus,
            },
            ..*self
        }
    }

    fn scale(&self) -> T {
        T::one() + self.a.abs() + self.b.abs() + self.c.abs()
    }
}

/// A point common to two branches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchPoint<T> {
    pub point: [T; 2],
    /// The two curves are tangent here (gradient determinant vanishes).
    pub tangent: bool,
}

/// All common points of two branches lying in the same coordinate plane.
///
/// Equating heights and clearing denominators gives
/// `db (u-a1)(u-a2) + c1 (u-a2) - c2 (u-a1) = 0` with `db = b1 - b2`; its real
/// roots are filtered by both supports. The coefficients are assembled so that
/// swapping the arguments negates them exactly, which makes the result
/// independent of argument order.
pub fn intersect_branches<T: Scalar>(b1: &Branch<T>, b2: &Branch<T>) -> Result<Vec<BranchPoint<T>>> {
    if b1 == b2 {
        return Err(Error::DegenerateOverlap);
    }
    let db = b1.b - b2.b;
    let prod = b1.a * b2.a;
    let sum = b1.a + b2.a;
    let qa = db;
    let qb = -(db * sum) + (b1.c - b2.c);
    let qc = db * prod + (b2.c * b1.a - b1.c * b2.a);

    let scale = b1.scale().max(b2.scale());
    let mut candidates: Vec<(T, bool)> = Vec::with_capacity(2);
    if qa == T::zero() {
        if qb != T::zero() {
            candidates.push((-qc / qb, false));
        }
        // qb == 0 with qa == 0: same asymptotes, distinct curves never meet
    } else {
        let disc = qb * qb - T::lit(4.0) * qa * qc;
        let disc_scale = qb * qb + (T::lit(4.0) * qa * qc).abs();
        if disc.abs() <= T::lit(1e-12) * disc_scale {
            candidates.push((-qb / (T::lit(2.0) * qa), true));
        } else if disc > T::zero() {
            let sq = disc.sqrt();
            let q = if qb >= T::zero() {
                -(qb + sq) / T::lit(2.0)
            } else {
                -(qb - sq) / T::lit(2.0)
            };
            candidates.push((q / qa, false));
            if q != T::zero() {
                candidates.push((qc / q, false));
            }
        }
    }

    let tol = T::geom_tol() * scale;
    let mut out: Vec<BranchPoint<T>> = Vec::new();
    for (u, near_double) in candidates {
        let (Some(h1), Some(h2)) = (b1.height(u), b2.height(u)) else {
            continue;
        };
        let v = (h1 + h2) / T::lit(2.0);
        let p = [u, v];
        if !(b1.contains(p, tol) && b2.contains(p, tol)) {
            continue;
        }
        let g1 = b1.residual_grad(u, v);
        let g2 = b2.residual_grad(u, v);
        let det = g1[0] * g2[1] - g1[1] * g2[0];
        let det_scale = (g1[0].abs() + g1[1].abs()) * (g2[0].abs() + g2[1].abs());
        let tangent = near_double || det.abs() <= T::geom_tol() * det_scale;
        if out.iter().any(|q| (q.point[0] - u).abs() <= tol) {
            continue;
        }
        out.push(BranchPoint { point: p, tangent });
    }
    out.sort_by(|a, b| a.point[0].partial_cmp(&b.point[0]).expect("finite"));
    Ok(out)
}

/// Orientation of a defining polynomial relative to the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sigma {
    Pos,
    Neg,
}

impl Sigma {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sigma::Pos => T::one(),
            Sigma::Neg => -T::one(),
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sigma::Pos => 1,
            Sigma::Neg => -1,
        }
    }

    pub fn from_i8(s: i8) -> Option<Self> {
        match s {
            1 => Some(Sigma::Pos),
            -1 => Some(Sigma::Neg),
            _ => None,
        }
    }
}

/// Whether a hypersurface bounds its plane slice from below or from above.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// A branch placed in the coordinate plane `(x_1, x_v)` of `R^n`, times the
/// complementary affine space. The defining inequality is
/// `sigma * ((x_1 - a)(x_v - b) - c) > 0`.
///
/// Axes are 0-based: `axis == 1` is the coordinate `x_2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypersurfaceSpec<T> {
    pub axis: usize,
    pub branch: Branch<T>,
    pub sigma: Sigma,
}

impl<T: Scalar> HypersurfaceSpec<T> {
    pub fn new(axis: usize, branch: Branch<T>, sigma: Sigma) -> Result<Self> {
        if axis == 0 {
            return Err(Error::InvalidParameter(
                "hypersurface plane must pair x1 with a different coordinate".into(),
            ));
        }
        Ok(Self { axis, branch, sigma })
    }

    /// Lower bounds have the inside above the curve: `df/dx_v > 0` on the
    /// branch.
    pub fn bound(&self) -> Bound {
        let s = self.sigma.value::<T>()
            * self.branch.side.sign::<T>()
            * self.branch.c.signum();
        if s > T::zero() {
            Bound::Lower
        } else {
            Bound::Upper
        }
    }

    /// `sigma * ((u - a)(v - b) - c)` at a planar point.
    pub fn eval_planar(&self, u: T, v: T) -> T {
        self.sigma.value::<T>() * self.branch.residual(u, v)
    }

    pub fn grad_planar(&self, u: T, v: T) -> [T; 2] {
        let g = self.branch.residual_grad(u, v);
        let s = self.sigma.value::<T>();
        [s * g[0], s * g[1]]
    }

    /// The defining polynomial in `n` variables.
    pub fn poly(&self, n: usize) -> Result<Polynomial<T>> {
        if self.axis >= n {
            return Err(Error::IndexOutOfRange {
                index: self.axis,
                num_vars: n,
            });
        }
        let Branch { a, b, c, .. } = self.branch;
        let s = self.sigma.value::<T>();
        let mut uv = vec![0; n];
        uv[0] = 1;
        uv[self.axis] = 1;
        let mut u = vec![0; n];
        u[0] = 1;
        let mut v = vec![0; n];
        v[self.axis] = 1;
        Polynomial::from_terms(
            n,
            [
                (uv, s),
                (u, -s * b),
                (v, -s * a),
                (vec![0; n], s * (a * b - c)),
            ],
        )
    }

    /// Embeds a planar point `(u, v)` into `R^n` with the remaining
    /// coordinates taken from `fill`.
    pub fn lift(&self, u: T, v: T, fill: &[T]) -> Vec<T> {
        let mut x = fill.to_vec();
        x[0] = u;
        x[self.axis] = v;
        x
    }
}

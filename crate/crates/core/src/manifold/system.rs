use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::Polynomial;
use crate::domain::{DomainSpec, Interval};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, RankInfo};
use crate::scalar::Scalar;

/// The equations `F_j(x, y) = f_j(x) - |y_j|^2 = 0`, one per hypersurface,
/// with `y_j` a block of `d_j` fresh coordinates. Coordinates are ordered
/// `x_1, ..., x_n` followed by the blocks in hypersurface order.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSystem<T> {
    domain: DomainSpec<T>,
    blocks: Vec<usize>,
    offsets: Vec<usize>,
    polys: Vec<Polynomial<T>>,
}

/// A point of the solution set, split into base and block coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PointOnM<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Scalar> PointOnM<T> {
    pub fn coords(&self) -> Vec<T> {
        let mut c = self.x.clone();
        c.extend_from_slice(&self.y);
        c
    }
}

pub const DEFAULT_BLOCK: usize = 2;

/// Builds the system with the given block sizes, or `d_j = 2` throughout.
pub fn build_system<T: Scalar>(domain: DomainSpec<T>, blocks: Option<&[usize]>) -> Result<ManifoldSystem<T>> {
    let l = domain.num_hypersurfaces();
    let blocks = match blocks {
        Some(b) => b.to_vec(),
        None => vec![DEFAULT_BLOCK; l],
    };
    if blocks.len() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            got: blocks.len(),
        });
    }
    if let Some(j) = blocks.iter().position(|&d| d == 0) {
        return Err(Error::InvalidParameter(format!("block size of f{} must be at least 1", j + 1)));
    }
    let n = domain.n();
    let mut offsets = Vec::with_capacity(l);
    let mut next = n;
    for &d in &blocks {
        offsets.push(next);
        next += d;
    }
    let total = next;
    let map: Vec<usize> = (0..n).collect();
    let mut polys = Vec::with_capacity(l);
    for (j, f) in domain.polys().iter().enumerate() {
        let mut p = f.embed(total, &map)?;
        for i in 0..blocks[j] {
            let mut e = vec![0; total];
            e[offsets[j] + i] = 2;
            p.add_term(e, -T::one());
        }
        polys.push(p);
    }
    Ok(ManifoldSystem {
        domain,
        blocks,
        offsets,
        polys,
    })
}

fn sphere_point<T: Scalar, R: Rng>(rng: &mut R, dim: usize, radius: T) -> Vec<T> {
    if radius == T::zero() {
        return vec![T::zero(); dim];
    }
    if dim == 1 {
        return vec![if rng.random::<bool>() { radius } else { -radius }];
    }
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return g.iter().map(|v| radius * T::lit(v / norm)).collect();
        }
    }
}

impl<T: Scalar> ManifoldSystem<T> {
    pub fn domain(&self) -> &DomainSpec<T> {
        &self.domain
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Index of the first coordinate of block `j`.
    pub fn block_offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    pub fn polys(&self) -> &[Polynomial<T>] {
        &self.polys
    }

    pub fn num_equations(&self) -> usize {
        self.polys.len()
    }

    /// `N = n + sum d_j`.
    pub fn ambient_dim(&self) -> usize {
        self.domain.n() + self.blocks.iter().sum::<usize>()
    }

    pub fn manifold_dim(&self) -> usize {
        self.ambient_dim() - self.num_equations()
    }

    /// Dimension of a regular fibre of the first coordinate.
    pub fn fiber_dim(&self) -> usize {
        self.manifold_dim() - 1
    }

    fn check_point(&self, p: &PointOnM<T>) -> Result<Vec<T>> {
        if p.x.len() != self.domain.n() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.n(),
                got: p.x.len(),
            });
        }
        let ny = self.ambient_dim() - self.domain.n();
        if p.y.len() != ny {
            return Err(Error::DimensionMismatch {
                expected: ny,
                got: p.y.len(),
            });
        }
        Ok(p.coords())
    }

    /// `(F_1, ..., F_L)` at `p`.
    pub fn eval(&self, p: &PointOnM<T>) -> Result<Vec<T>> {
        let z = self.check_point(p)?;
        self.polys.iter().map(|f| f.eval(&z)).collect()
    }

    /// Largest `|F_j(p)| / (1 + s_j)` where `s_j` is the sum of the absolute
    /// values of the terms of `F_j` at `p`.
    pub fn scaled_residual(&self, p: &PointOnM<T>) -> Result<T> {
        let z = self.check_point(p)?;
        let mut worst = T::zero();
        for f in &self.polys {
            let r = f.eval(&z)?.abs() / (T::one() + f.eval_abs(&z)?);
            worst = worst.max(r);
        }
        Ok(worst)
    }

    fn require_on_system(&self, p: &PointOnM<T>, tol: T) -> Result<Vec<T>> {
        let residual = self.scaled_residual(p)?;
        if !(residual <= tol) {
            return Err(Error::ResidualTooLarge {
                residual: residual.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(p.coords())
    }

    /// Rows are the gradients of `F_1, ..., F_L`.
    pub fn jacobian(&self, p: &PointOnM<T>) -> Result<Vec<Vec<T>>> {
        let z = self.check_point(p)?;
        self.polys.iter().map(|f| f.grad(&z)).collect()
    }

    /// Numerical rank of the Jacobian at a point of the solution set.
    pub fn jacobian_rank(&self, p: &PointOnM<T>, tol: T) -> Result<RankInfo<T>> {
        let z = self.require_on_system(p, tol)?;
        let rows: Vec<Vec<T>> = self.polys.iter().map(|f| f.grad(&z)).collect::<Result<_>>()?;
        Ok(numerical_rank(&rows, T::rank_rtol()))
    }

    /// Whether the first coordinate is critical on the solution set at `p`:
    /// its gradient `e_1` lies in the row span of the Jacobian.
    pub fn is_singular_point_of_f(&self, p: &PointOnM<T>, tol: T) -> Result<bool> {
        let z = self.require_on_system(p, tol)?;
        let mut rows: Vec<Vec<T>> = self.polys.iter().map(|f| f.grad(&z)).collect::<Result<_>>()?;
        let base = numerical_rank(&rows, T::rank_rtol()).rank;
        let mut e1 = vec![T::zero(); z.len()];
        e1[0] = T::one();
        rows.push(e1);
        Ok(numerical_rank(&rows, T::rank_rtol()).rank == base)
    }

    /// Lifts a point of the closed domain, drawing each `y_j` uniformly on the
    /// sphere of radius `sqrt(f_j(x))`. Values of `f_j` at rounding-noise
    /// level give the zero block.
    pub fn sample_fiber_point_with<R: Rng>(&self, x: &[T], rng: &mut R) -> Result<PointOnM<T>> {
        if !self.domain.contains(x, true, T::geom_tol())? {
            return Err(Error::OutsideDomain);
        }
        let mut y = Vec::with_capacity(self.ambient_dim() - x.len());
        for (j, f) in self.domain.polys().iter().enumerate() {
            let v = f.eval(x)?;
            let radius = if v <= T::noise(f.eval_abs(x)?) {
                T::zero()
            } else {
                v.sqrt()
            };
            y.extend(sphere_point(rng, self.blocks[j], radius));
        }
        Ok(PointOnM { x: x.to_vec(), y })
    }

    pub fn sample_fiber_point(&self, x: &[T], seed: u64) -> Result<PointOnM<T>> {
        self.sample_fiber_point_with(x, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Random points of the solution set: `x_1` uniform on `[t_1, t_l]`, each
    /// slice coordinate uniform on its interval (unbounded ends cut at
    /// `truncation`), then a random lift.
    pub fn sample_manifold(&self, count: usize, truncation: T, seed: u64) -> Result<Vec<PointOnM<T>>> {
        if count == 0 {
            return Err(Error::InvalidParameter("count must be at least 1".into()));
        }
        if !(truncation > T::zero()) {
            return Err(Error::InvalidParameter("truncation must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t1, tl) = (self.domain.t_first(), self.domain.t_last());
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x1 = uniform(&mut rng, t1, tl);
            let mut x = vec![T::zero(); self.domain.n()];
            x[0] = x1;
            let mut ok = true;
            for f in self.domain.factors() {
                match f.interval_at(x1) {
                    Some(iv) => {
                        let (lo, hi) = truncate(iv, truncation);
                        x[f.axis] = uniform(&mut rng, lo, hi);
                    }
                    None => ok = false,
                }
            }
            if ok {
                out.push(self.sample_fiber_point_with(&x, &mut rng)?);
            }
        }
        Ok(out)
    }
}

pub(crate) fn uniform<T: Scalar, R: Rng>(rng: &mut R, lo: T, hi: T) -> T {
    let (l, h) = (lo.as_f64(), hi.as_f64());
    if !(l < h) {
        return lo;
    }
    T::lit(rng.random_range(l..=h)).max(lo).min(hi)
}

/// The interval with an infinite upper end replaced by `r`, or by `lo + r`
/// when `lo` already exceeds `r`.
pub(crate) fn truncate<T: Scalar>(iv: Interval<T>, r: T) -> (T, T) {
    let hi = if iv.hi.is_finite() {
        iv.hi
    } else if r > iv.lo {
        r
    } else {
        iv.lo + r
    };
    (iv.lo, hi)
}

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::components::epsilon_components;
use super::system::{truncate, uniform, ManifoldSystem, PointOnM};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberConfig<T> {
    /// Number of fibre points to sample.
    pub k: usize,
    /// Neighbourhood radius; defaults to three times the median
    /// nearest-neighbour distance.
    pub epsilon: Option<T>,
    /// Cut for unbounded slice coordinates; defaults to `10 * span`.
    pub truncation: Option<T>,
    pub seed: u64,
}

impl<T> Default for FiberConfig<T> {
    fn default() -> Self {
        Self {
            k: 200,
            epsilon: None,
            truncation: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberReport<T> {
    pub t: T,
    pub nonempty: bool,
    /// From the slice intervals, not from samples.
    pub bounded: bool,
    /// The fibre is a single point.
    pub point_fiber: bool,
    /// `t` is not a corner value.
    pub regular: bool,
    pub sampled_components: usize,
    pub sample_count: usize,
    pub epsilon: T,
    /// Samples were drawn from a truncated piece of an unbounded fibre.
    pub truncated: bool,
    pub truncation: T,
    pub model: String,
    pub fiber_dim: usize,
}

/// Corner lift used to confirm a singular value.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerCheck<T> {
    pub x1: T,
    pub factor: usize,
    pub pair: (usize, usize),
    pub verified: bool,
    pub witness: PointOnM<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularReport<T> {
    /// Distinct corner `x_1` values, sorted.
    pub predicted_values: Vec<T>,
    pub corners: Vec<CornerCheck<T>>,
    pub off_corner_samples: usize,
    /// Fraction of random samples at which the first coordinate is regular.
    pub off_corner_clean: T,
}

impl<T: Scalar> SingularReport<T> {
    pub fn all_verified(&self) -> bool {
        self.corners.iter().all(|c| c.verified)
    }
}

/// Arcsine-type map from `[0, 1]` onto `[lo, hi]`, denser near the ends
/// where the sphere factors shrink.
fn boundary_biased<T: Scalar>(lo: T, hi: T, u: T) -> T {
    let w = (T::one() - (T::lit(std::f64::consts::PI) * u).cos()) / T::lit(2.0);
    (lo + (hi - lo) * w).max(lo).min(hi)
}

fn sphere_label(d: usize) -> String {
    format!("S^{}", d - 1)
}

impl<T: Scalar> ManifoldSystem<T> {
    fn default_truncation(&self) -> T {
        T::lit(10.0) * self.domain().span()
    }

    pub fn fiber_report(&self, t: T, cfg: &FiberConfig<T>) -> Result<FiberReport<T>> {
        let d = self.domain();
        let truncation = cfg.truncation.unwrap_or_else(|| self.default_truncation());
        if !(truncation > T::zero()) {
            return Err(Error::InvalidParameter("truncation must be positive".into()));
        }
        let regular = !d.corner_values().contains(&t);
        let slices: Option<Vec<_>> = d.slice(t).into_iter().map(|e| e.interval).collect();
        let mut report = FiberReport {
            t,
            nonempty: false,
            bounded: true,
            point_fiber: false,
            regular,
            sampled_components: 0,
            sample_count: 0,
            epsilon: T::zero(),
            truncated: false,
            truncation,
            model: "empty".into(),
            fiber_dim: self.fiber_dim(),
        };
        let Some(slices) = slices else {
            return Ok(report);
        };
        report.nonempty = true;
        report.bounded = slices.iter().all(|iv| iv.is_bounded());
        report.truncated = !report.bounded;

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut centre = vec![T::zero(); d.n()];
        centre[0] = t;
        for (f, iv) in d.factors().iter().zip(&slices) {
            centre[f.axis] = iv.lo;
        }
        if slices.iter().all(|iv| iv.is_degenerate()) {
            let p = self.sample_fiber_point_with(&centre, &mut rng)?;
            if p.y.iter().all(|v| *v == T::zero()) {
                report.point_fiber = true;
                report.sampled_components = 1;
                report.sample_count = 1;
                report.model = "single point".into();
                return Ok(report);
            }
        }

        let k = cfg.k.max(1);
        let mut cloud = Vec::with_capacity(k);
        for _ in 0..k {
            let mut x = centre.clone();
            for (f, iv) in d.factors().iter().zip(&slices) {
                let (lo, hi) = truncate(*iv, truncation);
                let u = uniform(&mut rng, T::zero(), T::one());
                x[f.axis] = boundary_biased(lo, hi, u);
            }
            let p = self.sample_fiber_point_with(&x, &mut rng)?;
            cloud.push(p.coords().iter().map(|v| v.as_f64()).collect::<Vec<f64>>());
        }
        let c = epsilon_components(&cloud, cfg.epsilon.map(Scalar::as_f64));
        report.sampled_components = c.components;
        report.sample_count = k;
        report.epsilon = T::lit(c.epsilon);

        let mut spheres: Vec<String> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for &b in self.blocks() {
            let s = sphere_label(b);
            match spheres.iter().position(|x| *x == s) {
                Some(i) => counts[i] += 1,
                None => {
                    spheres.push(s);
                    counts.push(1);
                }
            }
        }
        let factors: Vec<String> = spheres
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c == 1 { s.clone() } else { format!("({s})^{c}") })
            .collect();
        let mut model = format!(
            "product of spheres {} with radii sqrt(f_j(x)) over the slice cell ",
            factors.join(" x ")
        );
        for (i, iv) in slices.iter().enumerate() {
            if i > 0 {
                model.push_str(" x ");
            }
            if iv.hi.is_finite() {
                let _ = write!(model, "[{}, {}]", iv.lo, iv.hi);
            } else {
                let _ = write!(model, "[{}, inf)", iv.lo);
            }
        }
        report.model = model;
        Ok(report)
    }

    /// Lifts each corner with zero blocks on its two hypersurfaces and checks
    /// that the first coordinate is critical there; estimates how often it is
    /// regular at random samples.
    pub fn singular_values_with(&self, samples: usize, seed: u64) -> Result<SingularReport<T>> {
        let d = self.domain();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut corners = Vec::new();
        for c in d.corners() {
            let mut x = d
                .interior_fill(c.x1, d.span())
                .ok_or_else(|| Error::Construction(format!("empty slice over corner x1 = {}", c.x1)))?;
            x[d.factors()[c.factor].axis] = c.point[1];
            let mut p = self.sample_fiber_point_with(&x, &mut rng)?;
            for j in [c.pair.0, c.pair.1] {
                let off = self.block_offset(j) - d.n();
                for v in &mut p.y[off..off + self.blocks()[j]] {
                    *v = T::zero();
                }
            }
            let verified = self.is_singular_point_of_f(&p, T::geom_tol())?;
            corners.push(CornerCheck {
                x1: c.x1,
                factor: c.factor,
                pair: c.pair,
                verified,
                witness: p,
            });
        }
        let mut clean = 0usize;
        if samples > 0 {
            for p in self.sample_manifold(samples, self.default_truncation(), rng_seed(&mut rng))? {
                if !self.is_singular_point_of_f(&p, T::geom_tol())? {
                    clean += 1;
                }
            }
        }
        Ok(SingularReport {
            predicted_values: d.corner_values(),
            corners,
            off_corner_samples: samples,
            off_corner_clean: if samples > 0 {
                T::lit(clean as f64 / samples as f64)
            } else {
                T::one()
            },
        })
    }

    pub fn singular_values(&self) -> Result<SingularReport<T>> {
        self.singular_values_with(256, 0)
    }

    /// Hull of the grid points of `[mu - span, mu + span]` with nonempty
    /// slices.
    pub fn image_estimate(&self, grid_size: usize) -> Result<(T, T)> {
        if grid_size < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
        }
        let d = self.domain();
        let mu = (d.t_first() + d.t_last()) / T::lit(2.0);
        let (lo, hi) = (mu - d.span(), mu + d.span());
        let steps = T::lit((grid_size - 1) as f64);
        let mut hull: Option<(T, T)> = None;
        for i in 0..grid_size {
            let x1 = lo + (hi - lo) * T::lit(i as f64) / steps;
            if d.slice(x1).iter().all(|e| e.interval.is_some()) {
                hull = Some(match hull {
                    None => (x1, x1),
                    Some((a, b)) => (a.min(x1), b.max(x1)),
                });
            }
        }
        hull.ok_or_else(|| Error::Construction("no grid point has a nonempty slice".into()))
    }
}

fn rng_seed(rng: &mut ChaCha8Rng) -> u64 {
    use rand::Rng;
    rng.random()
}

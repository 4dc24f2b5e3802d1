//! Numerical verification of the five structural conditions on a domain:
//! well-formedness, the literal intersection reading, closure consistency,
//! non-singular and disjoint boundary pieces, and transversality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::factor::FactorKind;
use super::spec::DomainSpec;
use crate::linalg::numerical_rank;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NcConfig<T> {
    /// Samples per hypersurface for the non-singularity, disjointness and
    /// closure checks.
    pub samples: usize,
    pub tol: T,
    /// Half-width of the probe box around the base point; defaults to
    /// `5 * span`.
    pub box_radius: Option<T>,
    /// Number of random probes for spurious components; defaults to
    /// `16 * samples`.
    pub probes: Option<usize>,
    pub seed: u64,
}

impl<T: Scalar> Default for NcConfig<T> {
    fn default() -> Self {
        Self {
            samples: 64,
            tol: T::geom_tol(),
            box_radius: None,
            probes: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Fail => "fail",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport<T> {
    /// 1 through 5.
    pub condition: u8,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub witnesses: Vec<Vec<T>>,
    pub measurements: Vec<(&'static str, T)>,
}

impl<T: Scalar> ConditionReport<T> {
    fn new(condition: u8, name: &'static str) -> Self {
        Self {
            condition,
            name,
            status: Status::Pass,
            detail: String::new(),
            witnesses: Vec::new(),
            measurements: Vec::new(),
        }
    }

    fn raise(&mut self, status: Status, witness: Vec<T>) {
        self.status = self.status.max(status);
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn measurement(&self, key: &str) -> Option<T> {
        self.measurements.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }
}

const MAX_WITNESSES: usize = 8;

/// Gradient rank of one intersection set.
#[derive(Clone, Debug, PartialEq)]
pub struct RankEntry<T> {
    /// Global hypersurface indices.
    pub lambda: Vec<usize>,
    pub point: Vec<T>,
    pub rank: usize,
    pub smallest_retained: T,
}

impl<T> RankEntry<T> {
    pub fn is_full(&self) -> bool {
        self.rank == self.lambda.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NcReport<T> {
    pub conditions: Vec<ConditionReport<T>>,
    /// Intersection sets through corners, plus every rank-deficient set.
    pub rank_table: Vec<RankEntry<T>>,
    /// Number of intersection sets whose rank was computed.
    pub sets_checked: usize,
}

impl<T: Scalar> NcReport<T> {
    /// Condition `k`, 1-based.
    pub fn condition(&self, k: u8) -> &ConditionReport<T> {
        &self.conditions[usize::from(k) - 1]
    }

    pub fn status(&self) -> Status {
        self.conditions.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn has_failure(&self) -> bool {
        self.status() == Status::Fail
    }

    pub fn rank_failures(&self) -> impl Iterator<Item = &RankEntry<T>> {
        self.rank_table.iter().filter(|e| !e.is_full())
    }
}

fn uniform<T: Scalar>(rng: &mut ChaCha8Rng, lo: T, hi: T) -> T {
    let (l, h) = (lo.as_f64(), hi.as_f64());
    if l >= h {
        return lo;
    }
    T::lit(rng.random_range(l..h))
}

/// Runs every check. Sampling is deterministic given `cfg.seed`.
pub fn check_nc<T: Scalar>(d: &DomainSpec<T>, cfg: &NcConfig<T>) -> NcReport<T> {
    let samples = cfg.samples.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (rank_table, sets_checked, c5) = transversality(d);
    let conditions = vec![
        well_formed(d),
        literal_intersection(d, cfg, samples, &mut rng),
        closure(d, cfg, samples, &mut rng),
        nonsingular_disjoint(d, cfg, samples, &mut rng),
        c5,
    ];
    NcReport {
        conditions,
        rank_table,
        sets_checked,
    }
}

fn well_formed<T: Scalar>(d: &DomainSpec<T>) -> ConditionReport<T> {
    let mut r = ConditionReport::new(1, "well-formed family");
    let n = d.n();
    for (j, p) in d.polys().iter().enumerate() {
        if p.num_vars() != n || p.degree() != 2 {
            r.raise(Status::Fail, d.base_point().to_vec());
            r.detail = format!("f{} is not a quadratic in {n} variables", j + 1);
        }
    }
    let vals = d.eval_all(d.base_point()).unwrap_or_default();
    let margin = vals.iter().copied().fold(T::infinity(), T::min);
    if !(margin > T::zero()) {
        r.raise(Status::Fail, d.base_point().to_vec());
        r.detail = "base point violates a defining inequality".into();
    }
    r.measurements.push(("hypersurfaces", T::lit(d.num_hypersurfaces() as f64)));
    r.measurements.push(("base_margin", margin));
    r
}

/// The lens admits a second region where both of its inequalities hold,
/// far below and to the left of the corners.
fn lens_spurious_candidate<T: Scalar>(d: &DomainSpec<T>) -> Vec<T> {
    let two = T::lit(2.0);
    let mu = (d.t_first() + d.t_last()) / two;
    let r = d.span() / two;
    let five = T::lit(5.0);
    let mut x = vec![T::zero(); d.n()];
    x[0] = mu - five * r;
    x[1] = -five * r;
    x
}

fn literal_intersection<T: Scalar>(
    d: &DomainSpec<T>,
    cfg: &NcConfig<T>,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> ConditionReport<T> {
    let mut r = ConditionReport::new(2, "literal intersection");
    let radius = cfg.box_radius.unwrap_or(T::lit(5.0) * d.span());
    let probes = cfg.probes.unwrap_or(16 * samples);
    let is_spurious = |x: &[T]| {
        d.all_positive(x, cfg.tol) && !d.slice_membership(x, false, T::zero()).unwrap_or(false)
    };
    let mut found = 0usize;
    let candidate = lens_spurious_candidate(d);
    if is_spurious(&candidate) {
        found += 1;
        r.raise(Status::Warn, candidate);
    }
    let base = d.base_point().to_vec();
    let mut x = vec![T::zero(); d.n()];
    for _ in 0..probes {
        for (xi, bi) in x.iter_mut().zip(&base) {
            *xi = uniform(rng, *bi - radius, *bi + radius);
        }
        if is_spurious(&x) {
            found += 1;
            r.raise(Status::Warn, x.clone());
        }
    }
    if found > 0 {
        r.detail = format!(
            "{found} point(s) satisfy every inequality outside the base component"
        );
    }
    r.measurements.push(("probes", T::lit(probes as f64)));
    r.measurements.push(("spurious_points", T::lit(found as f64)));
    r
}

fn closure<T: Scalar>(
    d: &DomainSpec<T>,
    cfg: &NcConfig<T>,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> ConditionReport<T> {
    let mut r = ConditionReport::new(3, "closure consistency");
    let (t1, tl) = (d.t_first(), d.t_last());
    let reach = d.span();
    let mut worst = T::zero();
    let mut checked = 0usize;
    let total = samples * d.factors().len().max(1);
    for k in 0..total {
        let x1 = match k {
            0 => t1,
            1 => tl,
            _ => uniform(rng, t1, tl),
        };
        let Some(fill) = d.interior_fill(x1, reach) else {
            r.raise(Status::Fail, vec![x1]);
            r.detail = format!("empty slice over x1 = {x1}");
            continue;
        };
        let fi = k % d.factors().len();
        let f = &d.factors()[fi];
        let iv = f.interval_at(x1).expect("slice is nonempty");
        let ends = [iv.lo, iv.hi];
        for v in ends.into_iter().filter(|v| v.is_finite()) {
            let mut x = fill.clone();
            x[f.axis] = v;
            let (mut min_f, mut scale) = (T::infinity(), T::zero());
            for p in d.polys() {
                let val = p.eval(&x).expect("dimension");
                scale = scale.max(p.eval_abs(&x).expect("dimension"));
                min_f = min_f.min(val);
            }
            checked += 1;
            let dev = min_f.abs() / (T::one() + scale);
            worst = worst.max(dev);
            if dev > cfg.tol {
                r.raise(Status::Fail, x);
                r.detail = "a boundary point of the slice is not on a hypersurface".into();
            }
        }
    }
    r.measurements.push(("boundary_points", T::lit(checked as f64)));
    r.measurements.push(("max_scaled_deviation", worst));
    r
}

fn nonsingular_disjoint<T: Scalar>(
    d: &DomainSpec<T>,
    cfg: &NcConfig<T>,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> ConditionReport<T> {
    let mut r = ConditionReport::new(4, "non-singular and disjoint");
    let (t1, tl) = (d.t_first(), d.t_last());
    let span = d.span();
    let n = d.n();
    let mut min_grad = T::infinity();
    let mut min_margin = T::infinity();
    let mut opposite_samples = 0usize;
    for j in 0..d.num_hypersurfaces() {
        let h = d.hypersurface(j);
        let poly = &d.polys()[j];

        // gradient on the selected branch, other coordinates anywhere
        let window = crate::algebra::OpenInterval {
            lo: t1 - span,
            hi: tl + span,
        };
        if let Some(w) = h.branch.support().intersect(&window) {
            for _ in 0..samples {
                let u = uniform(rng, w.lo, w.hi);
                let Some(v) = h.branch.height(u) else { continue };
                let mut x: Vec<T> = (0..n).map(|_| uniform(rng, -span, span)).collect();
                x[0] = u;
                x[h.axis] = v;
                let g = poly.grad(&x).expect("dimension");
                let norm = g.iter().fold(T::zero(), |a, gi| a + *gi * *gi).sqrt();
                min_grad = min_grad.min(norm);
                if !(norm > cfg.tol) {
                    r.raise(Status::Fail, x);
                    r.detail = format!("gradient of f{} vanishes on its hypersurface", j + 1);
                }
            }
        }

        // the unused component of the same hyperbola must stay off the closure
        let opp = h.branch.opposite();
        let band = crate::algebra::OpenInterval { lo: t1, hi: tl };
        let Some(w) = opp.support().intersect(&band) else {
            continue;
        };
        for k in 0..samples {
            let u = match k {
                0 => w.lo,
                1 => w.hi,
                _ => uniform(rng, w.lo, w.hi),
            };
            let Some(v) = opp.height(u) else { continue };
            let Some(mut x) = d.interior_fill(u, span) else { continue };
            x[h.axis] = v;
            let margin = d
                .polys()
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, p)| p.eval(&x).expect("dimension"))
                .fold(T::infinity(), T::min);
            opposite_samples += 1;
            min_margin = min_margin.min(-margin);
            if !(margin < -cfg.tol) {
                r.raise(Status::Fail, x);
                r.detail = format!("the unused component of f{} = 0 meets the closure", j + 1);
            }
        }
    }
    r.measurements.push(("min_gradient_norm", min_grad));
    r.measurements.push(("opposite_samples", T::lit(opposite_samples as f64)));
    r.measurements.push(("min_violation_margin", min_margin));
    r
}

/// One way a factor can contribute hypersurfaces to an intersection set.
#[derive(Clone, Debug)]
enum Choice<T> {
    Single { global: usize },
    Corner { globals: Vec<usize>, x1: T, height: T },
}

fn subsets(items: &[usize], min: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << items.len()) {
        if mask.count_ones() as usize >= min {
            out.push(
                items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &g)| g)
                    .collect(),
            );
        }
    }
    out
}

fn factor_choices<T: Scalar>(d: &DomainSpec<T>, fi: usize) -> Vec<Choice<T>> {
    let f = &d.factors()[fi];
    let mut out: Vec<Choice<T>> = (0..f.hypersurfaces.len())
        .map(|li| Choice::Single {
            global: d.global_index(fi, li),
        })
        .collect();
    let mut seen: Vec<[T; 2]> = Vec::new();
    for c in &f.corners {
        let p = [c.x1, c.height];
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        let tol = T::geom_tol() * (T::one() + p[0].abs() + p[1].abs());
        let active: Vec<usize> = f
            .hypersurfaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.branch.contains(p, tol * (T::one() + h.branch.c.abs())))
            .map(|(li, _)| d.global_index(fi, li))
            .collect();
        for s in subsets(&active, 2) {
            out.push(Choice::Corner {
                globals: s,
                x1: c.x1,
                height: c.height,
            });
        }
    }
    out
}

/// Enumerates every set of hypersurfaces that can meet (at most one choice
/// per plane, compatible `x_1`), and computes the gradient rank at a common
/// point.
fn transversality<T: Scalar>(d: &DomainSpec<T>) -> (Vec<RankEntry<T>>, usize, ConditionReport<T>) {
    let mut r = ConditionReport::new(5, "transversality");
    let choices: Vec<Vec<Choice<T>>> = (0..d.factors().len()).map(|fi| factor_choices(d, fi)).collect();
    let mut table = Vec::new();
    let mut checked = 0usize;
    let mut min_retained = T::infinity();
    let mut picked: Vec<Option<usize>> = vec![None; choices.len()];
    enumerate(d, &choices, 0, &mut picked, &mut |entry, has_corner| {
        checked += 1;
        if entry.rank > 0 {
            min_retained = min_retained.min(entry.smallest_retained);
        }
        if !entry.is_full() {
            r.raise(Status::Fail, entry.point.clone());
            if r.detail.is_empty() {
                r.detail = format!(
                    "{} hypersurfaces meet with gradient rank {} at x1 = {}",
                    entry.lambda.len(),
                    entry.rank,
                    entry.point[0]
                );
            }
            table.push(entry);
        } else if has_corner {
            table.push(entry);
        }
    });
    r.measurements.push(("sets_checked", T::lit(checked as f64)));
    r.measurements.push(("min_retained", min_retained));
    (table, checked, r)
}

fn enumerate<T: Scalar>(
    d: &DomainSpec<T>,
    choices: &[Vec<Choice<T>>],
    depth: usize,
    picked: &mut Vec<Option<usize>>,
    visit: &mut dyn FnMut(RankEntry<T>, bool),
) {
    if depth == choices.len() {
        if let Some((entry, has_corner)) = evaluate(d, choices, picked) {
            visit(entry, has_corner);
        }
        return;
    }
    picked[depth] = None;
    enumerate(d, choices, depth + 1, picked, visit);
    for k in 0..choices[depth].len() {
        picked[depth] = Some(k);
        if compatible(d, choices, picked, depth) {
            enumerate(d, choices, depth + 1, picked, visit);
        }
    }
    picked[depth] = None;
}

/// Admissible `x_1` values for the choices so far: a pinned value or an open
/// interval.
fn x1_constraint<T: Scalar>(
    d: &DomainSpec<T>,
    choices: &[Vec<Choice<T>>],
    picked: &[Option<usize>],
) -> Option<(Option<T>, T, T)> {
    let mut pinned: Option<T> = None;
    let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
    for (fi, p) in picked.iter().enumerate() {
        let Some(k) = p else { continue };
        match &choices[fi][*k] {
            Choice::Single { global } => {
                let s = d.hypersurface(*global).branch.support();
                lo = lo.max(s.lo);
                hi = hi.min(s.hi);
            }
            Choice::Corner { x1, .. } => match pinned {
                Some(p) if (p - *x1).abs() > T::noise(p.abs() + x1.abs()) => return None,
                _ => pinned = Some(*x1),
            },
        }
    }
    if lo >= hi {
        return None;
    }
    if let Some(p) = pinned {
        if !(lo < p && p < hi) {
            return None;
        }
    }
    Some((pinned, lo, hi))
}

fn compatible<T: Scalar>(d: &DomainSpec<T>, choices: &[Vec<Choice<T>>], picked: &[Option<usize>], depth: usize) -> bool {
    x1_constraint(d, choices, &picked[..=depth]).is_some()
}

fn evaluate<T: Scalar>(
    d: &DomainSpec<T>,
    choices: &[Vec<Choice<T>>],
    picked: &[Option<usize>],
) -> Option<(RankEntry<T>, bool)> {
    if picked.iter().all(Option::is_none) {
        return None;
    }
    let (pinned, lo, hi) = x1_constraint(d, choices, picked)?;
    let x1 = pinned.unwrap_or_else(|| {
        let step = T::one() + d.span();
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo + hi) / T::lit(2.0),
            (true, false) => lo + step,
            (false, true) => hi - step,
            (false, false) => d.base_point()[0],
        }
    });
    let mut x = vec![T::zero(); d.n()];
    x[0] = x1;
    let mut lambda = Vec::new();
    let mut has_corner = false;
    for (fi, p) in picked.iter().enumerate() {
        let Some(k) = p else { continue };
        let axis = d.factors()[fi].axis;
        match &choices[fi][*k] {
            Choice::Single { global } => {
                x[axis] = d.hypersurface(*global).branch.height(x1)?;
                lambda.push(*global);
            }
            Choice::Corner { globals, height, .. } => {
                x[axis] = *height;
                lambda.extend(globals);
                has_corner = true;
            }
        }
    }
    let rows: Vec<Vec<T>> = lambda
        .iter()
        .map(|&j| d.polys()[j].grad(&x).expect("dimension"))
        .collect();
    let info = numerical_rank(&rows, T::rank_rtol());
    Some((
        RankEntry {
            lambda,
            point: x,
            rank: info.rank,
            smallest_retained: info.smallest_retained,
        },
        has_corner,
    ))
}

/// Kinds of the factors whose planes carry a rank-deficient intersection.
pub fn deficient_kinds<T: Scalar>(d: &DomainSpec<T>, report: &NcReport<T>) -> Vec<FactorKind> {
    let mut kinds = Vec::new();
    for e in report.rank_failures() {
        for &j in &e.lambda {
            let k = d.factors()[d.owner(j).0].kind;
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        }
    }
    kinds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_domain, BuildOptions, Label, Mode};

    fn domain(t: &[f64], bits: &[u8], mode: Mode) -> DomainSpec<f64> {
        let labels: Vec<Label> = bits.iter().map(|&b| Label::from_bit(b).unwrap()).collect();
        build_domain(t, &labels, BuildOptions::with_mode(mode)).unwrap()
    }

    #[test]
    fn lens_passes_structural_conditions() {
        let d = domain(&[-1.0, 1.0], &[0], Mode::Minimal);
        let rep = check_nc(&d, &NcConfig::default());
        for k in [1, 3, 4, 5] {
            assert_eq!(rep.condition(k).status, Status::Pass, "{:?}", rep.condition(k));
        }
        let c2 = rep.condition(2);
        assert_eq!(c2.status, Status::Warn);
        assert_eq!(c2.witnesses[0], vec![-5.0, -5.0]);
        assert_eq!(d.eval_all(&c2.witnesses[0]).unwrap(), vec![6.0, 46.0]);
    }

    #[test]
    fn literal_general_case_collides_corners() {
        let d = domain(&[0.0, 1.0, 2.0], &[0, 1], Mode::Literal);
        let rep = check_nc(&d, &NcConfig::default());
        assert_eq!(rep.condition(5).status, Status::Fail);
        let e = rep
            .rank_failures()
            .find(|e| e.lambda.len() == 4)
            .expect("a rank-deficient quadruple");
        assert_eq!(e.rank, 3);
        assert_eq!(e.point[0], 1.0);
        assert!(!rep.condition(5).witnesses.is_empty());
        let kinds = deficient_kinds(&d, &rep);
        assert!(kinds.contains(&FactorKind::Pinch) && kinds.contains(&FactorKind::Open));
    }

    #[test]
    fn minimal_same_input_is_transversal() {
        let d = domain(&[0.0, 1.0, 2.0], &[0, 1], Mode::Minimal);
        let rep = check_nc(&d, &NcConfig::default());
        assert_eq!(rep.condition(5).status, Status::Pass);
        assert!(rep.rank_failures().next().is_none());
        assert!(rep.rank_table.iter().all(|e| e.lambda.len() <= 3 || e.rank == e.lambda.len()));
    }

    #[test]
    fn structural_conditions_on_mixed_labels() {
        for bits in [[0u8, 0, 0], [1, 0, 1], [1, 1, 1], [0, 1, 0]] {
            let d = domain(&[-3.0, -1.0, 0.5, 4.0], &bits, Mode::Minimal);
            let rep = check_nc(&d, &NcConfig { seed: 7, ..NcConfig::default() });
            for k in [1, 3, 4, 5] {
                assert_eq!(rep.condition(k).status, Status::Pass, "{bits:?}: {:?}", rep.condition(k));
            }
        }
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let d = domain(&[0.0, 1.0, 2.0], &[1, 0], Mode::Minimal);
        let cfg = NcConfig { seed: 42, ..NcConfig::default() };
        assert_eq!(check_nc(&d, &cfg), check_nc(&d, &cfg));
    }

    #[test]
    fn subsets_of_size_two_or_more() {
        assert_eq!(subsets(&[4, 5], 2), vec![vec![4, 5]]);
        assert_eq!(subsets(&[1, 2, 3], 2).len(), 4);
    }
}

use crate::algebra::{HypersurfaceSpec, Polynomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::factor::{FactorDomain, FactorKind, Interval};

/// Topological type of the fibres over an open interval `(t_j, t_{j+1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    /// Label 0: compact fibres.
    Compact,
    /// Label 1: non-compact fibres.
    NonCompact,
}

impl Label {
    pub fn from_bit(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Label::Compact),
            1 => Ok(Label::NonCompact),
            other => Err(Error::InvalidLabels(format!("label must be 0 or 1, got {other}"))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Label::Compact => 0,
            Label::NonCompact => 1,
        }
    }
}

/// Which factor list to assemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// One corner-producing factor per interior `t_j`; transversal.
    #[default]
    Minimal,
    /// The two-case factor lists taken verbatim, including the always-present
    /// factor in the third coordinate when some label is 1.
    Literal,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Minimal => "minimal",
            Mode::Literal => "literal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "minimal" => Ok(Mode::Minimal),
            "literal" => Ok(Mode::Literal),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BuildOptions<T> {
    pub mode: Mode,
    /// Radius of every pinch factor; defaults to `(t_l - t_1) / 4`.
    pub pinch_rho: Option<T>,
}

impl<T> BuildOptions<T> {
    pub fn with_mode(mode: Mode) -> Self {
        Self { mode, pinch_rho: None }
    }
}

/// A corner with global hypersurface indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerRecord<T> {
    pub x1: T,
    pub factor: usize,
    /// `(x_1, x_axis)` of the corner.
    pub point: [T; 2],
    /// Global hypersurface indices.
    pub pair: (usize, usize),
}

/// Slice of one factor over a fixed `x_1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceEntry<T> {
    pub factor: usize,
    pub axis: usize,
    pub interval: Option<Interval<T>>,
}

/// A domain bounded by hyperbola-branch hypersurfaces, assembled from a lens
/// in `(x_1, x_2)` and one further factor per coordinate `x_3, x_4, ...`.
///
/// The domain is the connected component of `{f_j > 0 for all j}` that
/// contains [`DomainSpec::base_point`]; it is exactly the set of points whose
/// coordinates lie in the open per-factor slices over their `x_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec<T> {
    t: Vec<T>,
    labels: Vec<Label>,
    mode: Mode,
    factors: Vec<FactorDomain<T>>,
    base_point: Vec<T>,
    polys: Vec<Polynomial<T>>,
    owners: Vec<(usize, usize)>,
    extended: bool,
}

fn validate_sequence<T: Scalar>(t: &[T]) -> Result<()> {
    if t.len() < 2 {
        return Err(Error::InvalidSequence(format!("need at least 2 values, got {}", t.len())));
    }
    if t.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSequence("values must be finite".into()));
    }
    for w in t.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidSequence(format!(
                "sequence must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
    }
    let span = t[t.len() - 1] - t[0];
    let min_gap = t
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(T::infinity(), T::min);
    if min_gap < T::lit(1e-9) * span {
        return Err(Error::InvalidSequence(format!(
            "gap {min_gap} is below 1e-9 of the span {span}"
        )));
    }
    Ok(())
}

/// Assembles the domain for the sequence `t` and interval labels.
pub fn build_domain<T: Scalar>(t: &[T], labels: &[Label], opts: BuildOptions<T>) -> Result<DomainSpec<T>> {
    validate_sequence(t)?;
    let l = t.len();
    if labels.len() != l - 1 {
        return Err(Error::InvalidLabels(format!(
            "expected {} labels for {} values, got {}",
            l - 1,
            l,
            labels.len()
        )));
    }
    let (t1, tl) = (t[0], t[l - 1]);
    let rho = opts.pinch_rho.unwrap_or((tl - t1) / T::lit(4.0));
    let all_compact = labels.iter().all(|&x| x == Label::Compact);

    let mut factors = vec![FactorDomain::lens(t1, tl)?];
    match opts.mode {
        Mode::Minimal => {
            if labels[0] == Label::NonCompact {
                factors.push(FactorDomain::open(t1, t[1], true, tl)?);
            }
            for j in 1..l - 1 {
                factors.push(match labels[j] {
                    Label::Compact => FactorDomain::pinch(t[j], rho)?,
                    Label::NonCompact => FactorDomain::open(t[j], t[j + 1], false, tl)?,
                });
            }
        }
        Mode::Literal => {
            if l == 2 && !all_compact {
                return Err(Error::Unsupported(
                    "literal mode has no construction for two values with label 1".into(),
                ));
            }
            if !all_compact {
                factors.push(match labels[0] {
                    Label::Compact => FactorDomain::pinch(t[1], rho)?,
                    Label::NonCompact => FactorDomain::open(t1, t[1], false, tl)?,
                });
            }
            for j in 1..l - 1 {
                factors.push(match (all_compact, labels[j]) {
                    (true, _) | (false, Label::Compact) => FactorDomain::pinch(t[j], rho)?,
                    (false, Label::NonCompact) => FactorDomain::open(t[j], t[j + 1], false, tl)?,
                });
            }
        }
    }
    let factors = factors
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.on_axis(i + 1))
        .collect::<Result<Vec<_>>>()?;

    let n = factors.len() + 1;
    let mut base_point = vec![T::zero(); n];
    base_point[0] = (t1 + tl) / T::lit(2.0);
    DomainSpec::from_parts(t.to_vec(), labels.to_vec(), opts.mode, factors, base_point)
}

impl<T: Scalar> DomainSpec<T> {
    /// Assembles a domain from explicit factors, checking the structural
    /// invariants: distinct planes `x_2, x_3, ...` in factor order, a lens
    /// first, and a base point strictly inside.
    pub fn from_parts(
        t: Vec<T>,
        labels: Vec<Label>,
        mode: Mode,
        factors: Vec<FactorDomain<T>>,
        base_point: Vec<T>,
    ) -> Result<Self> {
        validate_sequence(&t)?;
        if labels.len() + 1 != t.len() {
            return Err(Error::InvalidLabels(format!(
                "expected {} labels, got {}",
                t.len() - 1,
                labels.len()
            )));
        }
        match factors.first() {
            Some(f) if f.kind == FactorKind::Lens => {}
            _ => return Err(Error::Construction("first factor must be the lens".into())),
        }
        if factors.iter().skip(1).any(|f| f.kind == FactorKind::Lens) {
            return Err(Error::Construction("only the first factor may be a lens".into()));
        }
        let n = factors.len() + 1;
        for (i, f) in factors.iter().enumerate() {
            if f.axis != i + 1 || f.hypersurfaces.iter().any(|h| h.axis != i + 1) {
                return Err(Error::Construction(format!("factor {i} must live in plane (x1, x{})", i + 2)));
            }
            f.verify_corners()?;
        }
        if base_point.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: base_point.len(),
            });
        }
        let mut polys = Vec::new();
        let mut owners = Vec::new();
        for (fi, f) in factors.iter().enumerate() {
            for (li, h) in f.hypersurfaces.iter().enumerate() {
                polys.push(h.poly(n)?);
                owners.push((fi, li));
            }
        }
        let extended = t.len() == 2 && labels[0] == Label::NonCompact;
        let d = Self {
            t,
            labels,
            mode,
            factors,
            base_point,
            polys,
            owners,
            extended,
        };
        if !d.contains(&d.base_point, false, T::zero())? {
            return Err(Error::Construction("base point is not inside the domain".into()));
        }
        Ok(d)
    }

    pub fn t(&self) -> &[T] {
        &self.t
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn factors(&self) -> &[FactorDomain<T>] {
        &self.factors
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.factors.len() + 1
    }

    pub fn base_point(&self) -> &[T] {
        &self.base_point
    }

    /// Total number of hypersurfaces `L`.
    pub fn num_hypersurfaces(&self) -> usize {
        self.polys.len()
    }

    /// Defining polynomials `f_1, ..., f_L` in global order.
    pub fn polys(&self) -> &[Polynomial<T>] {
        &self.polys
    }

    /// `(factor, local index)` of global hypersurface `j`.
    pub fn owner(&self, j: usize) -> (usize, usize) {
        self.owners[j]
    }

    pub fn hypersurface(&self, j: usize) -> &HypersurfaceSpec<T> {
        let (f, i) = self.owners[j];
        &self.factors[f].hypersurfaces[i]
    }

    pub fn global_index(&self, factor: usize, local: usize) -> usize {
        self.owners
            .iter()
            .position(|&o| o == (factor, local))
            .expect("valid hypersurface")
    }

    /// Two values with a label-1 interval: outside the cases the literal
    /// lists cover.
    pub fn is_extension(&self) -> bool {
        self.extended
    }

    pub fn t_first(&self) -> T {
        self.t[0]
    }

    pub fn t_last(&self) -> T {
        self.t[self.t.len() - 1]
    }

    pub fn span(&self) -> T {
        self.t_last() - self.t_first()
    }

    /// Interval `j` (0-based) is `(t[j], t[j+1])`.
    pub fn label_at(&self, x1: T) -> Option<Label> {
        self.t
            .windows(2)
            .position(|w| w[0] < x1 && x1 < w[1])
            .map(|j| self.labels[j])
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval_all(&self, x: &[T]) -> Result<Vec<T>> {
        self.polys.iter().map(|p| p.eval(x)).collect()
    }

    /// Per-factor admissible intervals over `x1`.
    pub fn slice(&self, x1: T) -> Vec<SliceEntry<T>> {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| SliceEntry {
                factor: i,
                axis: f.axis,
                interval: f.interval_at(x1),
            })
            .collect()
    }

    /// Membership by slice intervals alone.
    pub fn slice_membership(&self, x: &[T], closed: bool, tol: T) -> Result<bool> {
        self.check_dim(x)?;
        let (t1, tl) = (self.t_first(), self.t_last());
        let x1 = x[0];
        let band = if closed {
            t1 - tol <= x1 && x1 <= tl + tol
        } else {
            t1 + tol < x1 && x1 < tl - tol
        };
        if !band {
            return Ok(false);
        }
        let x1_eval = x1.max(t1).min(tl);
        for f in &self.factors {
            let Some(iv) = f.interval_at(x1_eval) else {
                return Ok(false);
            };
            let v = x[f.axis];
            let inside = if closed {
                iv.contains_closed(v, tol)
            } else {
                iv.contains_open(v, tol)
            };
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every defining polynomial exceeds `tol` at `x`.
    pub fn all_positive(&self, x: &[T], tol: T) -> bool {
        x.len() == self.n() && self.polys.iter().all(|p| p.eval(x).is_ok_and(|v| v > tol))
    }

    /// Membership by the signs of the defining polynomials, restricted to the
    /// band `t_1 < x_1 < t_l` that contains the base component.
    pub fn sign_membership(&self, x: &[T], tol: T) -> Result<bool> {
        self.check_dim(x)?;
        if !(self.t_first() < x[0] && x[0] < self.t_last()) {
            return Ok(false);
        }
        Ok(self.all_positive(x, tol))
    }

    /// Membership in the domain (`closed == false`) or in its closure.
    /// Requires every `f_j > tol` (resp. `>= -tol`) and slice membership,
    /// which selects the base-point component.
    pub fn contains(&self, x: &[T], closed: bool, tol: T) -> Result<bool> {
        self.check_dim(x)?;
        for p in &self.polys {
            let v = p.eval(x)?;
            let ok = if closed {
                v >= -(tol + T::noise(p.eval_abs(x)?))
            } else {
                v > tol
            };
            if !ok {
                return Ok(false);
            }
        }
        self.slice_membership(x, closed, tol)
    }

    /// All corners with global hypersurface indices, in factor order.
    pub fn corners(&self) -> Vec<CornerRecord<T>> {
        let mut out = Vec::new();
        for (fi, f) in self.factors.iter().enumerate() {
            for c in &f.corners {
                out.push(CornerRecord {
                    x1: c.x1,
                    factor: fi,
                    point: [c.x1, c.height],
                    pair: (self.global_index(fi, c.pair.0), self.global_index(fi, c.pair.1)),
                });
            }
        }
        out
    }

    /// Distinct corner `x_1` values, sorted.
    pub fn corner_values(&self) -> Vec<T> {
        let mut xs: Vec<T> = self.corners().iter().map(|c| c.x1).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        xs.dedup();
        xs
    }

    /// A point of the closed domain over `x1` with every coordinate at the
    /// centre of its slice (unbounded slices: `lo + reach`). `None` if the
    /// slice is empty.
    pub fn interior_fill(&self, x1: T, reach: T) -> Option<Vec<T>> {
        let mut x = vec![T::zero(); self.n()];
        x[0] = x1;
        for f in &self.factors {
            x[f.axis] = f.interval_at(x1)?.interior_point(reach);
        }
        Some(x)
    }

    /// Whether every slice over `x1` is bounded; `None` if some slice is empty.
    pub fn slice_bounded(&self, x1: T) -> Option<bool> {
        let s = self.slice(x1);
        let mut bounded = true;
        for e in s {
            bounded &= e.interval?.is_bounded();
        }
        Some(bounded)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FactorKind;

    fn labels(bits: &[u8]) -> Vec<Label> {
        bits.iter().map(|&b| Label::from_bit(b).unwrap()).collect()
    }

    fn kinds(d: &DomainSpec<f64>) -> Vec<(FactorKind, bool)> {
        d.factors().iter().map(|f| (f.kind, f.first_interval)).collect()
    }

    #[test]
    fn lens_only_domain() {
        let d = build_domain(&[-1.0, 1.0], &labels(&[0]), BuildOptions::default()).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.num_hypersurfaces(), 2);
        assert_eq!(kinds(&d), vec![(FactorKind::Lens, false)]);
        assert_eq!(d.base_point(), &[0.0, 0.0]);
    }

    #[test]
    fn compact_three_values() {
        for mode in [Mode::Minimal, Mode::Literal] {
            let d = build_domain(&[0.0, 1.0, 2.0], &labels(&[0, 0]), BuildOptions::with_mode(mode)).unwrap();
            assert_eq!(d.n(), 3);
            assert_eq!(d.num_hypersurfaces(), 6);
            assert_eq!(kinds(&d), vec![(FactorKind::Lens, false), (FactorKind::Pinch, false)]);
        }
    }

    #[test]
    fn first_interval_open() {
        let d = build_domain(&[0.0, 1.0, 2.0], &labels(&[1, 0]), BuildOptions::default()).unwrap();
        assert_eq!(d.n(), 4);
        assert_eq!(d.num_hypersurfaces(), 8);
        assert_eq!(
            kinds(&d),
            vec![(FactorKind::Lens, false), (FactorKind::Open, true), (FactorKind::Pinch, false)]
        );
        let axes: Vec<_> = d.factors().iter().map(|f| f.axis).collect();
        assert_eq!(axes, vec![1, 2, 3]);
    }

    #[test]
    fn literal_general_case_lists() {
        let d = build_domain(&[0.0, 1.0, 2.0], &labels(&[0, 1]), BuildOptions::with_mode(Mode::Literal)).unwrap();
        assert_eq!(d.n(), 4);
        assert_eq!(
            kinds(&d),
            vec![(FactorKind::Lens, false), (FactorKind::Pinch, false), (FactorKind::Open, false)]
        );
        let m = build_domain(&[0.0, 1.0, 2.0], &labels(&[0, 1]), BuildOptions::default()).unwrap();
        assert_eq!(kinds(&m), vec![(FactorKind::Lens, false), (FactorKind::Open, false)]);
        let d = build_domain(&[0.0, 1.0, 2.0], &labels(&[1, 1]), BuildOptions::with_mode(Mode::Literal)).unwrap();
        assert_eq!(
            kinds(&d),
            vec![(FactorKind::Lens, false), (FactorKind::Open, false), (FactorKind::Open, false)]
        );
    }

    #[test]
    fn two_value_label_one() {
        let err = build_domain(&[0.0, 1.0], &labels(&[1]), BuildOptions::with_mode(Mode::Literal));
        assert!(matches!(err, Err(Error::Unsupported(_))));
        let d = build_domain(&[0.0, 1.0], &labels(&[1]), BuildOptions::default()).unwrap();
        assert!(d.is_extension());
        assert_eq!(d.n(), 3);
    }

    #[test]
    fn rejects_bad_sequences() {
        let opts = BuildOptions::default;
        assert!(matches!(
            build_domain(&[1.0, 1.0, 2.0], &labels(&[0, 0]), opts()),
            Err(Error::InvalidSequence(_))
        ));
        assert!(build_domain(&[2.0, 1.0], &labels(&[0]), opts()).is_err());
        assert!(build_domain(&[1.0], &[], opts()).is_err());
        assert!(build_domain(&[0.0, 1e-12, 1.0], &labels(&[0, 0]), opts()).is_err());
        assert!(matches!(
            build_domain(&[0.0, 1.0, 2.0], &labels(&[0]), opts()),
            Err(Error::InvalidLabels(_))
        ));
        assert!(Label::from_bit(2).is_err());
    }

    #[test]
    fn slice_examples() {
        let d = build_domain(&[-1.0, 1.0], &labels(&[0]), BuildOptions::default()).unwrap();
        let s = d.slice(0.0);
        assert_eq!(s[0].axis, 1);
        assert_eq!(s[0].interval, Some(Interval { lo: -0.5, hi: 0.5 }));
        assert_eq!(d.slice(2.0)[0].interval, None);
    }

    #[test]
    fn contains_examples() {
        let d = build_domain(&[-1.0, 1.0], &labels(&[0]), BuildOptions::default()).unwrap();
        assert!(d.contains(d.base_point(), false, 0.0).unwrap());
        let spurious = [-5.0, -5.0];
        assert_eq!(d.eval_all(&spurious).unwrap(), vec![6.0, 46.0]);
        assert!(!d.contains(&spurious, false, 0.0).unwrap());
        assert!(d.contains(&[-1.0, 1.0], true, 1e-12).unwrap());
        assert!(!d.contains(&[-1.0, 1.0], false, 1e-12).unwrap());
        assert!(d.contains(&[0.0], false, 0.0).is_err());
    }

    #[test]
    fn corner_values_match_sequence() {
        let cases: [(&[f64], &[u8]); 3] = [
            (&[-1.0, 1.0], &[0]),
            (&[0.0, 1.0, 2.0], &[0, 0]),
            (&[0.0, 1.0, 2.0], &[1, 1]),
        ];
        for (t, bits) in cases {
            let d = build_domain(t, &labels(bits), BuildOptions::default()).unwrap();
            assert_eq!(d.corner_values(), t.to_vec());
        }
    }

    #[test]
    fn corner_records_point_into_global_indices() {
        let d = build_domain(&[0.0, 1.0, 2.0], &labels(&[0, 0]), BuildOptions::default()).unwrap();
        let c = d.corners();
        assert_eq!(c.len(), 4);
        assert_eq!(c[2].pair, (2, 3));
        assert_eq!(c[3].pair, (4, 5));
        assert_eq!(c[2].point, [1.0, 0.5]);
    }

    #[test]
    fn boundedness_follows_labels() {
        let d = build_domain(&[0.0, 1.0, 2.0, 3.0], &labels(&[1, 0, 1]), BuildOptions::default()).unwrap();
        assert_eq!(d.slice_bounded(0.5), Some(false));
        assert_eq!(d.slice_bounded(1.5), Some(true));
        assert_eq!(d.slice_bounded(2.5), Some(false));
        assert_eq!(d.slice_bounded(3.5), None);
    }

    #[test]
    fn from_parts_checks_structure() {
        let d = build_domain(&[0.0, 1.0, 2.0], &labels(&[0, 0]), BuildOptions::default()).unwrap();
        let mut factors = d.factors().to_vec();
        factors.swap(0, 1);
        assert!(DomainSpec::from_parts(d.t().to_vec(), d.labels().to_vec(), d.mode(), factors, d.base_point().to_vec()).is_err());
        let outside = vec![5.0, 0.0, 0.0];
        assert!(DomainSpec::from_parts(d.t().to_vec(), d.labels().to_vec(), d.mode(), d.factors().to_vec(), outside).is_err());
    }
}

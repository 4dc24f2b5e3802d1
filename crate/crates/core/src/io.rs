//! JSON documents for domains, systems and reports.
//!
//! Reals are written with the shortest decimal that parses back to the same
//! binary64 value, so a domain survives a write/read cycle bit for bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{Branch, HypersurfaceSpec, Polynomial, Side, Sigma};
use crate::domain::{Corner, DomainSpec, FactorDomain, FactorKind, Label, Mode, NcReport};
use crate::error::{Error, Result};
use crate::manifold::{FiberReport, ManifoldSystem, SingularReport};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub side: Side,
    pub sigma: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerRecordFile {
    pub x1: f64,
    pub height: f64,
    /// Indices into the factor's branch list.
    pub pair: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorRecord {
    pub kind: String,
    /// 1-based coordinate indices `[1, v]`.
    pub plane: [usize; 2],
    #[serde(default)]
    pub first_interval: bool,
    pub branches: Vec<BranchRecord>,
    pub corners: Vec<CornerRecordFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1_range: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub version: u32,
    pub t: Vec<f64>,
    pub labels: Vec<u8>,
    pub mode: String,
    pub n: usize,
    pub factors: Vec<FactorRecord>,
    pub base_point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: f64,
    /// Variable name (`x1`, `x2`, ...) to power; absent variables have
    /// power 0.
    pub exponents: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialRecord {
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub point: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub domain: DomainFile,
    pub blocks: Vec<usize>,
    pub ambient_dim: usize,
    pub manifold_dim: usize,
    /// Variables `x1..xn` are the base coordinates; the blocks follow in
    /// hypersurface order.
    pub polynomials: Vec<PolynomialRecord>,
    pub probe: ProbeRecord,
}

fn kind_from_str(s: &str) -> Result<FactorKind> {
    match s {
        "lens" => Ok(FactorKind::Lens),
        "pinch" => Ok(FactorKind::Pinch),
        "open" => Ok(FactorKind::Open),
        other => Err(Error::InvalidFile(format!("unknown factor kind {other:?}"))),
    }
}

impl DomainFile {
    pub fn from_domain(d: &DomainSpec<f64>) -> Self {
        let factors = d
            .factors()
            .iter()
            .map(|f| FactorRecord {
                kind: f.kind.as_str().into(),
                plane: [1, f.axis + 1],
                first_interval: f.first_interval,
                branches: f
                    .hypersurfaces
                    .iter()
                    .map(|h| BranchRecord {
                        a: h.branch.a,
                        b: h.branch.b,
                        c: h.branch.c,
                        side: h.branch.side,
                        sigma: h.sigma.as_i8(),
                    })
                    .collect(),
                corners: f
                    .corners
                    .iter()
                    .map(|c| CornerRecordFile {
                        x1: c.x1,
                        height: c.height,
                        pair: [c.pair.0, c.pair.1],
                    })
                    .collect(),
                x1_range: f.x1_range.map(|(a, b)| [a, b]),
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            t: d.t().to_vec(),
            labels: d.labels().iter().map(|l| l.bit()).collect(),
            mode: d.mode().as_str().into(),
            n: d.n(),
            factors,
            base_point: d.base_point().to_vec(),
        }
    }

    /// Rebuilds the domain, re-running every structural check.
    pub fn to_domain(&self) -> Result<DomainSpec<f64>> {
        if self.version != FORMAT_VERSION {
            return Err(Error::InvalidFile(format!("unsupported version {}", self.version)));
        }
        let labels = self
            .labels
            .iter()
            .map(|&b| Label::from_bit(b))
            .collect::<Result<Vec<_>>>()?;
        let mode = Mode::parse(&self.mode)?;
        let mut factors = Vec::with_capacity(self.factors.len());
        for (i, fr) in self.factors.iter().enumerate() {
            if fr.plane[0] != 1 || fr.plane[1] < 2 {
                return Err(Error::InvalidFile(format!("factor {i}: plane must be [1, v] with v >= 2")));
            }
            let axis = fr.plane[1] - 1;
            let hypersurfaces = fr
                .branches
                .iter()
                .map(|b| {
                    let sigma = Sigma::from_i8(b.sigma)
                        .ok_or_else(|| Error::InvalidFile(format!("factor {i}: sigma must be 1 or -1")))?;
                    HypersurfaceSpec::new(axis, Branch::new(b.a, b.b, b.c, b.side)?, sigma)
                })
                .collect::<Result<Vec<_>>>()?;
            factors.push(FactorDomain {
                kind: kind_from_str(&fr.kind)?,
                axis,
                first_interval: fr.first_interval,
                hypersurfaces,
                corners: fr
                    .corners
                    .iter()
                    .map(|c| Corner {
                        x1: c.x1,
                        height: c.height,
                        pair: (c.pair[0], c.pair[1]),
                    })
                    .collect(),
                x1_range: fr.x1_range.map(|[a, b]| (a, b)),
            });
        }
        let d = DomainSpec::from_parts(self.t.clone(), labels, mode, factors, self.base_point.clone())?;
        if d.n() != self.n {
            return Err(Error::InvalidFile(format!("n = {} does not match {} factors", self.n, self.factors.len())));
        }
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidFile(e.to_string()))
    }
}

fn var_name(i: usize) -> String {
    format!("x{}", i + 1)
}

fn polynomial_record(p: &Polynomial<f64>) -> PolynomialRecord {
    PolynomialRecord {
        terms: p
            .terms()
            .map(|(e, c)| TermRecord {
                coeff: *c,
                exponents: e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (var_name(i), k))
                    .collect(),
            })
            .collect(),
    }
}

impl PolynomialRecord {
    pub fn to_polynomial(&self, num_vars: usize) -> Result<Polynomial<f64>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut e = vec![0u32; num_vars];
            for (name, &k) in &t.exponents {
                let idx = name
                    .strip_prefix('x')
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&i| (1..=num_vars).contains(&i))
                    .ok_or_else(|| Error::InvalidFile(format!("unknown variable {name:?}")))?;
                e[idx - 1] += k;
            }
            terms.push((e, t.coeff));
        }
        Polynomial::from_terms(num_vars, terms)
    }
}

impl SystemFile {
    /// Exports the system with a probe point: the base point lifted with the
    /// given seed, and the values of every equation there.
    pub fn from_system(s: &ManifoldSystem<f64>, probe_seed: u64) -> Result<Self> {
        let p = s.sample_fiber_point(s.domain().base_point(), probe_seed)?;
        let point = p.coords();
        let values = s.polys().iter().map(|f| f.eval(&point)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain: DomainFile::from_domain(s.domain()),
            blocks: s.blocks().to_vec(),
            ambient_dim: s.ambient_dim(),
            manifold_dim: s.manifold_dim(),
            polynomials: s.polys().iter().map(polynomial_record).collect(),
            probe: ProbeRecord { point, values },
        })
    }

    /// Re-evaluates the stored polynomials at the stored probe point; every
    /// value must match bit for bit.
    pub fn verify_probe(&self) -> Result<()> {
        if self.probe.point.len() != self.ambient_dim || self.probe.values.len() != self.polynomials.len() {
            return Err(Error::InvalidFile("probe does not match the system shape".into()));
        }
        for (j, pr) in self.polynomials.iter().enumerate() {
            let v = pr.to_polynomial(self.ambient_dim)?.eval(&self.probe.point)?;
            if v.to_bits() != self.probe.values[j].to_bits() {
                return Err(Error::InvalidFile(format!(
                    "equation {} evaluates to {v} at the probe, stored {}",
                    j + 1,
                    self.probe.values[j]
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidFile(e.to_string()))
    }
}

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().copied().map(num).collect())
}

pub fn nc_report_json(r: &NcReport<f64>) -> Value {
    let conditions: Vec<Value> = r
        .conditions
        .iter()
        .map(|c| {
            let mut m = serde_json::Map::new();
            for (k, v) in &c.measurements {
                m.insert((*k).to_string(), num(*v));
            }
            json!({
                "condition": c.condition,
                "name": c.name,
                "status": c.status.as_str(),
                "detail": c.detail,
                "witnesses": c.witnesses.iter().map(|w| nums(w)).collect::<Vec<_>>(),
                "measurements": m,
            })
        })
        .collect();
    let table: Vec<Value> = r
        .rank_table
        .iter()
        .map(|e| {
            json!({
                "lambda": e.lambda.iter().map(|j| j + 1).collect::<Vec<_>>(),
                "point": nums(&e.point),
                "rank": e.rank,
                "smallest_retained": num(e.smallest_retained),
            })
        })
        .collect();
    json!({
        "status": r.status().as_str(),
        "conditions": conditions,
        "sets_checked": r.sets_checked,
        "rank_table": table,
    })
}

pub fn fiber_report_json(r: &FiberReport<f64>) -> Value {
    json!({
        "t": num(r.t),
        "nonempty": r.nonempty,
        "bounded": r.bounded,
        "point_fiber": r.point_fiber,
        "regular": r.regular,
        "sampled_components": r.sampled_components,
        "sample_count": r.sample_count,
        "epsilon": num(r.epsilon),
        "truncated": r.truncated,
        "truncation": num(r.truncation),
        "model": r.model,
        "fiber_dim": r.fiber_dim,
    })
}

pub fn singular_report_json(r: &SingularReport<f64>) -> Value {
    let corners: Vec<Value> = r
        .corners
        .iter()
        .map(|c| {
            json!({
                "x1": num(c.x1),
                "factor": c.factor,
                "pair": [c.pair.0 + 1, c.pair.1 + 1],
                "verified": c.verified,
                "witness": { "x": nums(&c.witness.x), "y": nums(&c.witness.y) },
            })
        })
        .collect();
    json!({
        "predicted_values": nums(&r.predicted_values),
        "all_verified": r.all_verified(),
        "corners": corners,
        "off_corner_samples": r.off_corner_samples,
        "off_corner_clean": num(r.off_corner_clean),
    })
}

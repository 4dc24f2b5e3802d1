//! Sparse multivariate polynomials with real coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector, so iteration order
//! (and therefore printing and serialization) is deterministic. Only the
//! operations the construction needs are provided: assembly, evaluation and
//! first derivatives.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    num_vars: usize,
    // invariant: no zero coefficient, every key has length `num_vars`
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: T) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// The coordinate function `x_index` (0-based).
    pub fn var(num_vars: usize, index: usize) -> Result<Self> {
        if index >= num_vars {
            return Err(Error::IndexOutOfRange { index, num_vars });
        }
        let mut exps = vec![0; num_vars];
        exps[index] = 1;
        let mut p = Self::zero(num_vars);
        p.add_term(exps, T::one());
        Ok(p)
    }

    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, T)>,
    {
        let mut p = Self::zero(num_vars);
        for (exps, c) in terms {
            if exps.len() != num_vars {
                return Err(Error::DimensionMismatch {
                    expected: num_vars,
                    got: exps.len(),
                });
            }
            p.add_term(exps, c);
        }
        Ok(p)
    }

    /// Adds `c * x^exps`, merging with an existing term and dropping it if the
    /// sum cancels to exactly zero.
    ///
    /// Panics if `exps.len() != self.num_vars()`.
    pub fn add_term(&mut self, exps: Monomial, c: T) {
        assert_eq!(exps.len(), self.num_vars, "exponent vector length");
        if c == T::zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == T::zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> T {
        self.terms.get(exps).copied().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Indices of the variables that appear in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_vars)
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    /// Largest coefficient magnitude.
    pub fn coeff_scale(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, c| acc.max(c.abs()))
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        Ok(self
            .terms
            .iter()
            .fold(T::zero(), |acc, (e, c)| acc + *c * monomial_value(e, x)))
    }

    /// Sum of the absolute values of the terms at `x`. This is the natural
    /// scale for the rounding error of [`Polynomial::eval`].
    pub fn eval_abs(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        Ok(self
            .terms
            .iter()
            .fold(T::zero(), |acc, (e, c)| acc + (*c * monomial_value(e, x)).abs()))
    }

    pub fn grad(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x)?;
        let mut g = vec![T::zero(); self.num_vars];
        for (e, c) in &self.terms {
            for (i, gi) in g.iter_mut().enumerate() {
                if e[i] == 0 {
                    continue;
                }
                let mut v = *c * T::lit(f64::from(e[i]));
                for (k, (&ek, &xk)) in e.iter().zip(x).enumerate() {
                    let p = if k == i { ek - 1 } else { ek };
                    if p > 0 {
                        v *= xk.powi(p as i32);
                    }
                }
                *gi += v;
            }
        }
        Ok(g)
    }

    /// Re-expresses the polynomial in `num_vars` variables, sending variable
    /// `i` to `map[i]`.
    pub fn embed(&self, num_vars: usize, map: &[usize]) -> Result<Self> {
        if map.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&m| m >= num_vars) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                num_vars,
            });
        }
        let mut out = Self::zero(num_vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; num_vars];
            for (i, &p) in e.iter().enumerate() {
                ne[map[i]] += p;
            }
            out.add_term(ne, *c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), *c * s);
        }
        out
    }
}

fn monomial_value<T: Scalar>(e: &[u32], x: &[T]) -> T {
    e.iter()
        .zip(x)
        .filter(|(p, _)| **p > 0)
        .fold(T::one(), |acc, (&p, &xi)| acc * xi.powi(p as i32))
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count");
        let mut out = Polynomial::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, *ca * *cb);
            }
        }
        out
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    /// Prints with 1-based variable names `x1, x2, ...`, highest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = *c < T::zero();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0)
                .map(|(i, p)| {
                    if *p == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, p)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == T::one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // (x1 + 2)(x2 + 2) - 3
    fn lens_lower() -> Polynomial<f64> {
        Polynomial::from_terms(
            2,
            [
                (vec![1, 1], 1.0),
                (vec![1, 0], 2.0),
                (vec![0, 1], 2.0),
                (vec![0, 0], 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let f1 = lens_lower();
        assert_eq!(f1.eval(&[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(f1.eval(&[-1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn eval_at_origin_is_constant_term() {
        let p = Polynomial::from_terms(3, [(vec![2, 0, 1], 4.5), (vec![0, 0, 0], -7.25)]).unwrap();
        assert_eq!(p.eval(&[0.0; 3]).unwrap(), -7.25);
    }

    #[test]
    fn grad_examples() {
        assert_eq!(lens_lower().grad(&[-1.0, 1.0]).unwrap(), vec![3.0, 1.0]);
        // (x1 - 2)(x2 - 2) - 3
        let f2 = Polynomial::from_terms(
            2,
            [
                (vec![1, 1], 1.0),
                (vec![1, 0], -2.0),
                (vec![0, 1], -2.0),
                (vec![0, 0], 1.0),
            ],
        )
        .unwrap();
        assert_eq!(f2.grad(&[-1.0, 1.0]).unwrap(), vec![-1.0, -3.0]);
        assert_eq!(
            Polynomial::constant(3, 5.0).grad(&[1.0, 2.0, 3.0]).unwrap(),
            vec![0.0; 3]
        );
    }

    #[test]
    fn dimension_mismatch() {
        let f1 = lens_lower();
        assert!(matches!(
            f1.eval(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(f1.grad(&[1.0, 2.0, 3.0]).is_err());
        assert!(Polynomial::<f64>::from_terms(2, [(vec![1], 1.0)]).is_err());
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = Polynomial::<f64>::var(2, 0).unwrap();
        let z = &x - &x;
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
        let mut p = Polynomial::<f64>::zero(1);
        p.add_term(vec![1], 0.0);
        assert!(p.is_zero());
    }

    #[test]
    fn product_expands() {
        let x1 = Polynomial::<f64>::var(2, 0).unwrap();
        let x2 = Polynomial::<f64>::var(2, 1).unwrap();
        let two = Polynomial::constant(2, 2.0);
        let three = Polynomial::constant(2, 3.0);
        let p = &(&(&x1 + &two) * &(&x2 + &two)) - &three;
        assert_eq!(p, lens_lower());
        assert_eq!(p.degree(), 2);
        assert_eq!(p.to_string(), "x1*x2 + 2*x1 + 2*x2 + 1");
    }

    #[test]
    fn embed_moves_variables() {
        let p = lens_lower().embed(4, &[0, 3]).unwrap();
        assert_eq!(p.support(), vec![0, 3]);
        assert_eq!(p.eval(&[-1.0, 9.0, 9.0, 1.0]).unwrap(), 0.0);
        assert!(lens_lower().embed(3, &[0, 3]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let p = Polynomial::<f32>::from_terms(2, [(vec![1, 1], 1.0), (vec![0, 0], -1.0)]).unwrap();
        assert_eq!(p.eval(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(p.grad(&[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
    }
}

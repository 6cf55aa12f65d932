//! Sparse real polynomials over phase-space variables, with the Gaussian
//! moment machinery (Isserlis pairing recursion) that makes every integral
//! in the Wigner layer exact.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Hard cap on total degree; photon-ladder pipelines stay well below this.
pub const MAX_DEGREE: u32 = 64;

/// Exponent vector over the `2N` phase variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u8>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Monomial(m)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    fn checked_mul(&self, other: &Self) -> Result<Self> {
        let exps: Vec<u8> = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.saturating_add(b))
            .collect();
        let m = Monomial(exps);
        if m.degree() > MAX_DEGREE {
            return Err(Error::DegreeLimit {
                degree: m.degree(),
                limit: MAX_DEGREE,
            });
        }
        Ok(m)
    }
}

/// Sparse polynomial: monomial → coefficient, canonically ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::unit(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1.0)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), 1.0);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &f64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            let key = self
                .terms
                .iter()
                .find(|(_, &v)| v == 0.0)
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in other.terms.iter() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.nvars);
        for (m1, &c1) in self.terms.iter() {
            for (m2, &c2) in other.terms.iter() {
                out.add_term(m1.checked_mul(m2)?, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiply by the variable `i`.
    pub fn mul_var(&self, i: usize) -> Result<Self> {
        self.mul(&Self::var(self.nvars, i))
    }

    /// Partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, &c) in self.terms.iter() {
            if m.0[i] > 0 {
                let mut e = m.0.clone();
                let k = e[i] as f64;
                e[i] -= 1;
                out.add_term(Monomial(e), c * k);
            }
        }
        out
    }

    /// Recentre: returns `Q` with `Q(ζ) = P(ζ + δ)`.
    pub fn translate(&self, delta: &[f64]) -> Result<Self> {
        assert_eq!(delta.len(), self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, &c) in self.terms.iter() {
            // expand Π_i (ζ_i + δ_i)^{e_i}
            let mut expanded = Self::constant(self.nvars, c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut factor = Self::var(self.nvars, i);
                factor.add_term(Monomial::unit(self.nvars), delta[i]);
                for _ in 0..e {
                    expanded = expanded.mul(&factor)?;
                }
            }
            out = out.add(&expanded);
        }
        Ok(out)
    }

    /// Substitute each variable by an affine form: `ζ_i -> Σ_j L[i,j] η_j + c_i`,
    /// where the output lives on `L.ncols()` variables.
    pub fn substitute_affine(&self, l: &DMatrix<f64>, c: &DVector<f64>) -> Result<Self> {
        assert_eq!(l.nrows(), self.nvars);
        let nout = l.ncols();
        let forms: Vec<Polynomial> = (0..self.nvars)
            .map(|i| {
                let mut f = Polynomial::zero(nout);
                for j in 0..nout {
                    f.add_term(Monomial::var(nout, j), l[(i, j)]);
                }
                f.add_term(Monomial::unit(nout), c[i]);
                f
            })
            .collect();
        let mut out = Polynomial::zero(nout);
        for (m, &coef) in self.terms.iter() {
            let mut term = Polynomial::constant(nout, coef);
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&forms[i])?;
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Embed into a larger variable set with the given index offset.
    pub fn embed(&self, nvars: usize, offset: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (m, &c) in self.terms.iter() {
            let mut e = vec![0u8; nvars];
            e[offset..offset + self.nvars].copy_from_slice(&m.0);
            out.add_term(Monomial(e), c);
        }
        out
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(m, &c)| {
                c * m
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| point[i].powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

/// `E[Π ζ_i^{k_i}]` for `ζ ~ N(0, cov)` by the pairing recursion; odd total
/// degree vanishes identically.
pub fn gaussian_moment(cov: &DMatrix<f64>, mono: &Monomial) -> Result<f64> {
    if mono.degree() > MAX_DEGREE {
        return Err(Error::DegreeLimit {
            degree: mono.degree(),
            limit: MAX_DEGREE,
        });
    }
    let mut memo = HashMap::new();
    Ok(central_moment(cov, mono, &mut memo))
}

fn central_moment(cov: &DMatrix<f64>, mono: &Monomial, memo: &mut HashMap<Monomial, f64>) -> f64 {
    let deg = mono.degree();
    if deg == 0 {
        return 1.0;
    }
    if deg % 2 == 1 {
        return 0.0;
    }
    if let Some(&v) = memo.get(mono) {
        return v;
    }
    let i = mono.0.iter().position(|&e| e > 0).unwrap();
    let mut base = mono.0.clone();
    base[i] -= 1;
    let mut total = 0.0;
    for j in 0..base.len() {
        if base[j] > 0 {
            let cnt = base[j] as f64;
            let mut rest = base.clone();
            rest[j] -= 1;
            total += cov[(i, j)] * cnt * central_moment(cov, &Monomial(rest), memo);
        }
    }
    memo.insert(mono.clone(), total);
    total
}

/// `E[P(ζ)]` under `N(0, cov)`.
pub fn expectation(poly: &Polynomial, cov: &DMatrix<f64>) -> f64 {
    let mut memo = HashMap::new();
    poly.terms
        .iter()
        .map(|(m, &c)| c * central_moment(cov, m, &mut memo))
        .sum()
}

/// `E[P(ζ)]` for `ζ ~ N(mu, cov)` with scalar mean.
pub fn expectation_noncentral(poly: &Polynomial, mu: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
    let mut memo = HashMap::new();
    poly.terms
        .iter()
        .map(|(m, &c)| c * noncentral_moment(mu, cov, m, &mut memo))
        .sum()
}

fn noncentral_moment(
    mu: &DVector<f64>,
    cov: &DMatrix<f64>,
    mono: &Monomial,
    memo: &mut HashMap<Monomial, f64>,
) -> f64 {
    if mono.degree() == 0 {
        return 1.0;
    }
    if let Some(&v) = memo.get(mono) {
        return v;
    }
    let i = mono.0.iter().position(|&e| e > 0).unwrap();
    let mut base = mono.0.clone();
    base[i] -= 1;
    let rest = Monomial(base.clone());
    let mut total = mu[i] * noncentral_moment(mu, cov, &rest, memo);
    for j in 0..base.len() {
        if base[j] > 0 {
            let cnt = base[j] as f64;
            let mut next = base.clone();
            next[j] -= 1;
            total += cov[(i, j)] * cnt * noncentral_moment(mu, cov, &Monomial(next), memo);
        }
    }
    memo.insert(mono.clone(), total);
    total
}

/// `E[P(ζ) | conditioning]` where `ζ ~ N(Mη + c, S)` and the mean is linear
/// in the output variables `η`; the result is a polynomial in `η`.
pub fn conditional_expectation(
    poly: &Polynomial,
    mean_map: &DMatrix<f64>,
    mean_shift: &DVector<f64>,
    cond_cov: &DMatrix<f64>,
) -> Result<Polynomial> {
    let nout = mean_map.ncols();
    let mean_polys: Vec<Polynomial> = (0..poly.nvars)
        .map(|i| {
            let mut f = Polynomial::zero(nout);
            for j in 0..nout {
                f.add_term(Monomial::var(nout, j), mean_map[(i, j)]);
            }
            f.add_term(Monomial::unit(nout), mean_shift[i]);
            f
        })
        .collect();
    let mut memo: HashMap<Monomial, Polynomial> = HashMap::new();
    let mut out = Polynomial::zero(nout);
    for (m, &c) in poly.terms.iter() {
        let e = conditional_moment(m, &mean_polys, cond_cov, nout, &mut memo)?;
        out = out.add(&e.scale(c));
    }
    Ok(out)
}

fn conditional_moment(
    mono: &Monomial,
    mean_polys: &[Polynomial],
    cov: &DMatrix<f64>,
    nout: usize,
    memo: &mut HashMap<Monomial, Polynomial>,
) -> Result<Polynomial> {
    if mono.degree() == 0 {
        return Ok(Polynomial::one(nout));
    }
    if let Some(p) = memo.get(mono) {
        return Ok(p.clone());
    }
    let i = mono.0.iter().position(|&e| e > 0).unwrap();
    let mut base = mono.0.clone();
    base[i] -= 1;
    let rest = Monomial(base.clone());
    let rest_val = conditional_moment(&rest, mean_polys, cov, nout, memo)?;
    let mut total = mean_polys[i].mul(&rest_val)?;
    for j in 0..base.len() {
        if base[j] > 0 {
            let cnt = base[j] as f64;
            let mut next = base.clone();
            next[j] -= 1;
            let sub = conditional_moment(&Monomial(next), mean_polys, cov, nout, memo)?;
            total = total.add(&sub.scale(cov[(i, j)] * cnt));
        }
    }
    memo.insert(mono.clone(), total.clone());
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_moment_basics() {
        let id = DMatrix::identity(2, 2);
        let x2 = Monomial(vec![2, 0]);
        let x4 = Monomial(vec![4, 0]);
        let x2p2 = Monomial(vec![2, 2]);
        assert_relative_eq!(gaussian_moment(&id, &x2).unwrap(), 1.0);
        assert_relative_eq!(gaussian_moment(&id, &x4).unwrap(), 3.0);
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 5.0]));
        assert_relative_eq!(gaussian_moment(&diag, &x2p2).unwrap(), 10.0);
        assert_relative_eq!(gaussian_moment(&id, &Monomial(vec![1, 2])).unwrap(), 0.0);
    }

    #[test]
    fn translate_matches_evaluation() {
        let mut p = Polynomial::zero(2);
        p.add_term(Monomial(vec![2, 1]), 1.5);
        p.add_term(Monomial(vec![0, 1]), -2.0);
        let q = p.translate(&[0.3, -1.1]).unwrap();
        for pt in [[0.0, 0.0], [1.0, 2.0], [-0.4, 0.7]] {
            assert_relative_eq!(
                q.evaluate(&pt),
                p.evaluate(&[pt[0] + 0.3, pt[1] - 1.1]),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn substitute_affine_matches_evaluation() {
        let mut p = Polynomial::zero(2);
        p.add_term(Monomial(vec![2, 0]), 1.0);
        p.add_term(Monomial(vec![1, 1]), -0.5);
        let l = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, -1.0, 1.5]);
        let c = DVector::from_vec(vec![0.1, -0.2]);
        let q = p.substitute_affine(&l, &c).unwrap();
        let eta = [0.4, -0.3, 0.9];
        let z0 = eta[0] + 2.0 * eta[1] + 0.1;
        let z1 = -eta[1] + 1.5 * eta[2] - 0.2;
        assert_relative_eq!(q.evaluate(&eta), p.evaluate(&[z0, z1]), epsilon = 1e-12);
    }

    #[test]
    fn degree_cap_enforced() {
        let mut p = Polynomial::zero(1);
        p.add_term(Monomial(vec![40]), 1.0);
        assert!(p.mul(&p).is_err());
    }

    #[test]
    fn noncentral_expectation() {
        // E[(z + 1)^2] with z ~ N(mu, s2): mu^2 + 2 mu + 1 + s2
        let mut p = Polynomial::zero(1);
        p.add_term(Monomial(vec![2]), 1.0);
        p.add_term(Monomial(vec![1]), 2.0);
        p.add_term(Monomial(vec![0]), 1.0);
        let mu = DVector::from_vec(vec![0.7]);
        let cov = DMatrix::from_element(1, 1, 1.9);
        assert_relative_eq!(
            expectation_noncentral(&p, &mu, &cov),
            0.49 + 1.4 + 1.0 + 1.9,
            epsilon = 1e-12
        );
    }
}

//! Exact calculus for quasi-probability distributions of the form
//! `scale × polynomial × Gaussian`, the carrier for photon-added and
//! photon-subtracted states.
//!
//! `W(ξ) = scale · poly(ξ - mu) · G_γ(ξ - mu)` with `G_γ` the normalized
//! normal density. A Gaussian state lifts with `poly = 1`, `γ = cov`; the
//! vacuum kernel is `(1/2π) e^{-(x²+p²)/2}` per mode. State overlaps carry
//! the purity-fixed prefactor `Tr[ρ₁ρ₂] = (4π)^N ∫ W₁ W₂`.

use nalgebra::{DMatrix, DVector};

use crate::phase_space::GaussianState;
use crate::poly::{self, Monomial, Polynomial};
use crate::{Error, Result};

/// Kernel inversion / conditioning tolerance for rank checks.
const RANK_TOL: f64 = 1e-10;

/// Which ladder superoperator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    /// `ρ -> â ρ â†`
    Subtract,
    /// `ρ -> â† ρ â`
    Add,
}

/// Quasi-probability distribution `scale · poly(ξ-mu) · N(ξ; mu, gamma)`.
#[derive(Debug, Clone)]
pub struct PolyGaussian {
    modes: usize,
    mu: DVector<f64>,
    gamma: DMatrix<f64>,
    poly: Polynomial,
    scale: f64,
}

impl PolyGaussian {
    pub fn new(mu: DVector<f64>, gamma: DMatrix<f64>, poly: Polynomial, scale: f64) -> Result<Self> {
        let dim = mu.len();
        if dim == 0 || dim % 2 != 0 || gamma.nrows() != dim || gamma.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: gamma.nrows(),
            });
        }
        if poly.nvars() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: poly.nvars(),
            });
        }
        Ok(Self {
            modes: dim / 2,
            mu,
            gamma,
            poly,
            scale,
        })
    }

    /// Lift a Gaussian state: `poly = 1`, kernel = state covariance.
    pub fn lift_gaussian(state: &GaussianState) -> Self {
        let dim = 2 * state.num_modes();
        Self {
            modes: state.num_modes(),
            mu: state.mean().clone(),
            gamma: state.cov().clone(),
            poly: Polynomial::one(dim),
            scale: 1.0,
        }
    }

    pub fn num_modes(&self) -> usize {
        self.modes
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Full phase-space integral `∫ W`.
    pub fn trace(&self) -> f64 {
        self.scale * poly::expectation(&self.poly, &self.gamma)
    }

    /// Divides by the trace; returns the normalized state and the weight.
    pub fn normalize(&self) -> Result<(Self, f64)> {
        let t = self.trace();
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::NonPhysical(format!(
                "cannot normalize distribution with trace {t}"
            )));
        }
        let mut out = self.clone();
        out.scale /= t;
        Ok((out, t))
    }

    /// Point evaluation `W(ξ)`.
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), 2 * self.modes);
        let centered: Vec<f64> = point
            .iter()
            .zip(self.mu.iter())
            .map(|(p, m)| p - m)
            .collect();
        let chol = nalgebra::Cholesky::new(self.gamma.clone())
            .expect("kernel covariance must be positive definite");
        let z = DVector::from_vec(centered.clone());
        let quad = z.dot(&chol.solve(&z));
        let dim = 2 * self.modes;
        let norm = (2.0 * std::f64::consts::PI).powi(dim as i32 / 2) * chol.determinant().sqrt();
        self.scale * self.poly.evaluate(&centered) * (-0.5 * quad).exp() / norm
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let da = 2 * self.modes;
        let db = 2 * other.modes;
        let dim = da + db;
        let mut mu = DVector::zeros(dim);
        mu.rows_mut(0, da).copy_from(&self.mu);
        mu.rows_mut(da, db).copy_from(&other.mu);
        let mut gamma = DMatrix::zeros(dim, dim);
        gamma.view_mut((0, 0), (da, da)).copy_from(&self.gamma);
        gamma.view_mut((da, da), (db, db)).copy_from(&other.gamma);
        let poly = self
            .poly
            .embed(dim, 0)
            .mul(&other.poly.embed(dim, da))
            .expect("tensor degree within cap");
        Self {
            modes: self.modes + other.modes,
            mu,
            gamma,
            poly,
            scale: self.scale * other.scale,
        }
    }

    /// Mean and covariance of the (normalized) quasi-distribution.
    pub fn second_moments(&self) -> (DVector<f64>, DMatrix<f64>) {
        let dim = 2 * self.modes;
        let t = self.trace();
        let mut centered_mean = DVector::zeros(dim);
        for i in 0..dim {
            let pi = self.poly.mul_var(i).expect("moment degree within cap");
            centered_mean[i] = self.scale * poly::expectation(&pi, &self.gamma) / t;
        }
        let mut cov = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let pij = self
                    .poly
                    .mul_var(i)
                    .and_then(|p| p.mul_var(j))
                    .expect("moment degree within cap");
                let e = self.scale * poly::expectation(&pij, &self.gamma) / t;
                let c = e - centered_mean[i] * centered_mean[j];
                cov[(i, j)] = c;
                cov[(j, i)] = c;
            }
        }
        (&self.mu + centered_mean, cov)
    }

    /// Wigner image of `â ρ â†` (subtract) or `â† ρ â` (add) on one mode.
    ///
    /// Composing the Bopp-shift rules for `â·` and `·â†` in our units gives a
    /// real second-order superoperator acting on the polynomial part only
    /// (the kernel is untouched):
    ///
    /// subtract: `W -> [q²/4 + 1/2 + (x D_x + p D_p)/2 + (D_x² + D_p²)/4] W`
    /// add:      `W -> [q²/4 - 1/2 - (x D_x + p D_p)/2 + (D_x² + D_p²)/4] W`
    ///
    /// with `q² = x² + p²` and `D` the derivative through the kernel.
    /// Returns the unnormalized image and its trace (the heralding weight;
    /// for subtraction from a normalized state this is `⟨â†â⟩`).
    pub fn ladder_superop(&self, mode: usize, kind: LadderKind) -> Result<(Self, f64)> {
        if mode >= self.modes {
            return Err(Error::InvalidMode(mode));
        }
        let dim = 2 * self.modes;
        let ix = 2 * mode;
        let ip = 2 * mode + 1;
        let lambda = self
            .gamma
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NonPhysical("singular kernel covariance".into()))?;

        // multiply by the uncentered variable ξ_i = ζ_i + mu_i
        let mul_x = |p: &Polynomial, i: usize| -> Result<Polynomial> {
            Ok(p.mul_var(i)?.add(&p.scale(self.mu[i])))
        };
        // derivative through the kernel: D_i(P) = ∂_i P - (Λζ)_i P
        let dthru = |p: &Polynomial, i: usize| -> Result<Polynomial> {
            let mut lam_row = Polynomial::zero(dim);
            for j in 0..dim {
                if lambda[(i, j)] != 0.0 {
                    lam_row.add_term(Monomial::var(dim, j), lambda[(i, j)]);
                }
            }
            Ok(p.diff(i).add(&lam_row.mul(p)?.scale(-1.0)))
        };

        let p = &self.poly;
        let q2p = mul_x(&mul_x(p, ix)?, ix)?.add(&mul_x(&mul_x(p, ip)?, ip)?);
        let dx = dthru(p, ix)?;
        let dp = dthru(p, ip)?;
        let x_dx = mul_x(&dx, ix)?;
        let p_dp = mul_x(&dp, ip)?;
        let ddx = dthru(&dx, ix)?;
        let ddp = dthru(&dp, ip)?;

        let sign = match kind {
            LadderKind::Subtract => 1.0,
            LadderKind::Add => -1.0,
        };
        let new_poly = q2p
            .scale(0.25)
            .add(&p.scale(0.5 * sign))
            .add(&x_dx.add(&p_dp).scale(0.5 * sign))
            .add(&ddx.add(&ddp).scale(0.25));

        let out = Self {
            modes: self.modes,
            mu: self.mu.clone(),
            gamma: self.gamma.clone(),
            poly: new_poly,
            scale: self.scale,
        };
        let weight = out.trace();
        if weight <= 0.0 || !weight.is_finite() {
            return Err(Error::NonPhysical(format!(
                "ladder operation produced non-positive weight {weight}"
            )));
        }
        Ok((out, weight))
    }

    /// Distribution of `η = A ξ + b` for full-row-rank `A` (2M × 2N).
    ///
    /// Computed by conditioning: the output kernel is `A γ Aᵀ` and the
    /// polynomial part is `E[P(ζ) | A ζ = u]`, which is completion-independent
    /// by construction. Marginalization is the special case of selector rows.
    pub fn linear_pushforward(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Self> {
        let dim = 2 * self.modes;
        if a.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.ncols(),
            });
        }
        let rows = a.nrows();
        if rows == 0 || rows % 2 != 0 || rows > dim {
            return Err(Error::InvalidArgument(format!(
                "pushforward needs a positive even number of rows ≤ {dim}, got {rows}"
            )));
        }
        if b.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: b.len(),
            });
        }
        let out_gamma = a * &self.gamma * a.transpose();
        let chol = nalgebra::Cholesky::new(out_gamma.clone())
            .ok_or_else(|| Error::InvalidArgument("pushforward map is rank-deficient".into()))?;
        if chol.determinant().abs() < RANK_TOL.powi(rows as i32) {
            return Err(Error::InvalidArgument("pushforward map is rank-deficient".into()));
        }
        let out_mu = a * &self.mu + b;
        // conditional law of ζ given Aζ = u: mean K u, covariance γ - K (AγAᵀ) Kᵀ
        let gat = &self.gamma * a.transpose();
        let k = chol.solve(&gat.transpose()).transpose();
        let cond_cov = &self.gamma - &k * gat.transpose();
        let out_poly =
            poly::conditional_expectation(&self.poly, &k, &DVector::zeros(dim), &cond_cov)?;
        Ok(Self {
            modes: rows / 2,
            mu: out_mu,
            gamma: out_gamma,
            poly: out_poly,
            scale: self.scale,
        })
    }

    /// Pushforward through an invertible map `η = T ξ + b` by kernel algebra
    /// and polynomial substitution.
    pub fn invertible_transform(&self, t: &DMatrix<f64>, b: &DVector<f64>) -> Result<Self> {
        let dim = 2 * self.modes;
        if t.nrows() != dim || t.ncols() != dim || b.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: t.nrows(),
            });
        }
        let t_inv = t
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidArgument("transform not invertible".into()))?;
        // centered: ζ = T⁻¹ η_c
        let poly = self.poly.substitute_affine(&t_inv, &DVector::zeros(dim))?;
        Ok(Self {
            modes: self.modes,
            mu: t * &self.mu + b,
            gamma: t * &self.gamma * t.transpose(),
            poly,
            scale: self.scale,
        })
    }

    /// Reduced distribution on `keep` (mode indices, order preserved).
    pub fn marginalize(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("keep set is empty".into()));
        }
        let dim = 2 * self.modes;
        let mut a = DMatrix::zeros(2 * keep.len(), dim);
        for (row, &m) in keep.iter().enumerate() {
            if m >= self.modes {
                return Err(Error::InvalidMode(m));
            }
            a[(2 * row, 2 * m)] = 1.0;
            a[(2 * row + 1, 2 * m + 1)] = 1.0;
        }
        self.linear_pushforward(&a, &DVector::zeros(2 * keep.len()))
    }

    /// Same contract as [`linear_pushforward`], realized by completing `A`
    /// with the supplied rows, transforming invertibly, and marginalizing.
    /// The result is independent of the completion; kept as an explicit
    /// cross-check of the conditioning path.
    ///
    /// [`linear_pushforward`]: Self::linear_pushforward
    pub fn pushforward_via_completion(
        &self,
        a: &DMatrix<f64>,
        b: &DVector<f64>,
        completion: &DMatrix<f64>,
    ) -> Result<Self> {
        let dim = 2 * self.modes;
        let rows = a.nrows();
        if completion.nrows() != dim - rows || completion.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim - rows,
                got: completion.nrows(),
            });
        }
        let mut t = DMatrix::zeros(dim, dim);
        t.view_mut((0, 0), (rows, dim)).copy_from(a);
        t.view_mut((rows, 0), (dim - rows, dim)).copy_from(completion);
        let mut shift = DVector::zeros(dim);
        shift.rows_mut(0, rows).copy_from(b);
        let full = self.invertible_transform(&t, &shift)?;
        let keep: Vec<usize> = (0..rows / 2).collect();
        full.marginalize(&keep)
    }

    /// `Tr[ρ₁ρ₂] = (4π)^N ∫ W₁ W₂`, evaluated exactly as a Gaussian-product
    /// moment sum.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                got: other.modes,
            });
        }
        let dim = 2 * self.modes;
        let lam1 = self
            .gamma
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NonPhysical("singular kernel".into()))?;
        let lam2 = other
            .gamma
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NonPhysical("singular kernel".into()))?;
        let prod_gamma = (lam1.clone() + lam2.clone())
            .try_inverse()
            .ok_or_else(|| Error::NonPhysical("singular kernel sum".into()))?;
        let m3 = &prod_gamma * (&lam1 * &self.mu + &lam2 * &other.mu);
        // N(m1; m2, γ1+γ2)
        let sum = &self.gamma + &other.gamma;
        let chol = nalgebra::Cholesky::new(sum)
            .ok_or_else(|| Error::NonPhysical("singular kernel sum".into()))?;
        let d = &self.mu - &other.mu;
        let quad = d.dot(&chol.solve(&d));
        let two_pi = 2.0 * std::f64::consts::PI;
        let z = (-0.5 * quad).exp() / (two_pi.powi(dim as i32 / 2) * chol.determinant().sqrt());
        // polynomials recentred at the product-Gaussian mean
        let d1: Vec<f64> = (0..dim).map(|i| m3[i] - self.mu[i]).collect();
        let d2: Vec<f64> = (0..dim).map(|i| m3[i] - other.mu[i]).collect();
        let p1 = self.poly.translate(&d1)?;
        let p2 = other.poly.translate(&d2)?;
        let expect = poly::expectation(&p1.mul(&p2)?, &prod_gamma);
        let prefactor = (4.0 * std::f64::consts::PI).powi(self.modes as i32);
        Ok(prefactor * self.scale * other.scale * z * expect)
    }

    /// `Tr[ρ²]` of the normalized distribution.
    pub fn purity(&self) -> Result<f64> {
        self.overlap(self)
    }
}

/// `E[Π ξᵢ^{kᵢ}]` under the zero-mean Gaussian kernel `N(0, gamma)`.
pub fn gaussian_moment(gamma: &DMatrix<f64>, mono: &Monomial) -> Result<f64> {
    poly::gaussian_moment(gamma, mono)
}

//! Gaussian covariance engine: state construction, symplectic evolution,
//! reductions, and the Gaussian-only measures (Duan sum, log-negativity,
//! state overlap).
//!
//! A state is `(mean, cov)` over interleaved quadratures; the vacuum has
//! `cov = I`. Physicality is `cov + iΩ ⪰ 0` with the symplectic form
//! `Ω = ⊕ [[0,1],[-1,0]]`, equivalently all symplectic eigenvalues ≥ 1.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// `Ω = ⊕_j [[0,1],[-1,0]]` over `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    omega
}

/// Smallest symplectic eigenvalue of a symmetric matrix (vacuum gives 1).
pub fn min_symplectic_eigenvalue(cov: &DMatrix<f64>) -> f64 {
    let n = cov.nrows() / 2;
    let eig = (symplectic_form(n) * cov).complex_eigenvalues();
    eig.iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min)
}

/// An `N`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state, checking symmetry and physicality of `cov`.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 || cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: cov.nrows(),
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (cov[(i, j)] - cov[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::NonPhysical(format!(
                        "covariance asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        let nu_min = min_symplectic_eigenvalue(&cov);
        if nu_min < 1.0 - PHYSICALITY_TOL {
            return Err(Error::NonPhysical(format!(
                "covariance violates cov + iΩ ⪰ 0 (min symplectic eigenvalue {nu_min})"
            )));
        }
        Ok(Self {
            modes: dim / 2,
            mean,
            cov,
        })
    }

    /// `n`-mode vacuum: zero mean, identity covariance.
    pub fn vacuum(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("mode count must be positive".into()));
        }
        Ok(Self {
            modes: n,
            mean: DVector::zeros(2 * n),
            cov: DMatrix::identity(2 * n, 2 * n),
        })
    }

    /// Single-mode squeezed vacuum, x-variance `e^{-2r}`.
    pub fn squeezed_vacuum(r: f64) -> Self {
        Self {
            modes: 1,
            mean: DVector::zeros(2),
            cov: DMatrix::from_diagonal(&DVector::from_vec(vec![(-2.0 * r).exp(), (2.0 * r).exp()])),
        }
    }

    pub fn num_modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// `Tr[ρ²] = 1/√det(cov)`.
    pub fn purity(&self) -> f64 {
        1.0 / self.cov.determinant().sqrt()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let da = 2 * self.modes;
        let db = 2 * other.modes;
        let mut mean = DVector::zeros(da + db);
        mean.rows_mut(0, da).copy_from(&self.mean);
        mean.rows_mut(da, db).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        Self {
            modes: self.modes + other.modes,
            mean,
            cov,
        }
    }

    /// Reduced state on `keep` (order preserved as given).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("keep set is empty".into()));
        }
        for &m in keep {
            if m >= self.modes {
                return Err(Error::InvalidMode(m));
            }
        }
        let idx: Vec<usize> = keep.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.cov[(idx[r], idx[c])]);
        Ok(Self {
            modes: keep.len(),
            mean,
            cov,
        })
    }

    /// Phase-space displacement of one mode; covariance unchanged.
    pub fn displace(&self, mode: usize, dx: f64, dp: f64) -> Result<Self> {
        if mode >= self.modes {
            return Err(Error::InvalidMode(mode));
        }
        let mut out = self.clone();
        out.mean[2 * mode] += dx;
        out.mean[2 * mode + 1] += dp;
        Ok(out)
    }

    /// `mean' = M mean + shift`, `cov' = M cov Mᵀ`.
    pub fn apply(&self, map: &SymplecticMap) -> Result<Self> {
        if map.matrix.ncols() != 2 * self.modes {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.modes,
                got: map.matrix.ncols(),
            });
        }
        let mean = &map.matrix * &self.mean + &map.shift;
        let cov = &map.matrix * &self.cov * map.matrix.transpose();
        Ok(Self {
            modes: mean.len() / 2,
            mean,
            cov,
        })
    }
}

/// A linear phase-space transformation plus displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    pub matrix: DMatrix<f64>,
    pub shift: DVector<f64>,
}

impl SymplecticMap {
    pub fn new(matrix: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        if matrix.nrows() != shift.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: shift.len(),
            });
        }
        Ok(Self { matrix, shift })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n, 2 * n),
            shift: DVector::zeros(2 * n),
        }
    }

    /// Squeezer on one mode: x-variance multiplier `e^{-2r}`, p `e^{+2r}`.
    pub fn squeezer(n: usize, mode: usize, r: f64) -> Result<Self> {
        if mode >= n {
            return Err(Error::InvalidMode(mode));
        }
        let mut map = Self::identity(n);
        map.matrix[(2 * mode, 2 * mode)] = (-r).exp();
        map.matrix[(2 * mode + 1, 2 * mode + 1)] = r.exp();
        Ok(map)
    }

    /// Beam splitter acting identically on x and p:
    /// `x_i' = √τ x_i + √(1-τ) x_j`, `x_j' = √(1-τ) x_i - √τ x_j`.
    pub fn beam_splitter(n: usize, i: usize, j: usize, tau: f64) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::InvalidMode(i.max(j)));
        }
        if i == j {
            return Err(Error::InvalidArgument("beam splitter needs two distinct modes".into()));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidArgument(format!(
                "transmissivity {tau} outside [0, 1]"
            )));
        }
        let (t, u) = (tau.sqrt(), (1.0 - tau).sqrt());
        let mut map = Self::identity(n);
        for q in 0..2 {
            let (a, b) = (2 * i + q, 2 * j + q);
            map.matrix[(a, a)] = t;
            map.matrix[(a, b)] = u;
            map.matrix[(b, a)] = u;
            map.matrix[(b, b)] = -t;
        }
        Ok(map)
    }

    /// π rotation of one mode: `(x, p) -> (-x, -p)`.
    pub fn phase_flip(n: usize, mode: usize) -> Result<Self> {
        if mode >= n {
            return Err(Error::InvalidMode(mode));
        }
        let mut map = Self::identity(n);
        map.matrix[(2 * mode, 2 * mode)] = -1.0;
        map.matrix[(2 * mode + 1, 2 * mode + 1)] = -1.0;
        Ok(map)
    }

    /// Mode permutation: output mode `k` is input mode `perm[k]`.
    pub fn permute(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        let mut matrix = DMatrix::zeros(2 * n, 2 * n);
        for (k, &p) in perm.iter().enumerate() {
            matrix[(2 * k, 2 * p)] = 1.0;
            matrix[(2 * k + 1, 2 * p + 1)] = 1.0;
        }
        Ok(Self {
            matrix,
            shift: DVector::zeros(2 * n),
        })
    }

    /// `self` after `first` (matrix product, shifts composed).
    pub fn after(&self, first: &Self) -> Result<Self> {
        if self.matrix.ncols() != first.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.ncols(),
                got: first.matrix.nrows(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &first.matrix,
            shift: &self.matrix * &first.shift + &self.shift,
        })
    }

    /// `MᵀΩM = Ω` within `tol` (square maps only).
    pub fn is_symplectic(&self, tol: f64) -> bool {
        if self.matrix.nrows() != self.matrix.ncols() {
            return false;
        }
        let n = self.matrix.nrows() / 2;
        let omega = symplectic_form(n);
        let residual = self.matrix.transpose() * &omega * &self.matrix - &omega;
        residual.iter().all(|v| v.abs() <= tol)
    }
}

/// Mean and variance of `Σ cᵢ x̂ᵢ` and `Σ dᵢ p̂ᵢ`.
pub fn linear_form_stats(
    state: &GaussianState,
    xcoeffs: &[f64],
    pcoeffs: &[f64],
) -> Result<(f64, f64, f64, f64)> {
    let n = state.num_modes();
    if xcoeffs.len() != n || pcoeffs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: xcoeffs.len().max(pcoeffs.len()),
        });
    }
    let mut cx = DVector::zeros(2 * n);
    let mut cp = DVector::zeros(2 * n);
    for m in 0..n {
        cx[2 * m] = xcoeffs[m];
        cp[2 * m + 1] = pcoeffs[m];
    }
    let mean_x = cx.dot(state.mean());
    let mean_p = cp.dot(state.mean());
    let var_x = (state.cov() * &cx).dot(&cx);
    let var_p = (state.cov() * &cp).dot(&cp);
    Ok((mean_x, var_x, mean_p, var_p))
}

/// Duan sum `ζ = Var(x̂ᵢ - x̂ⱼ) + Var(p̂ᵢ + p̂ⱼ)`; two-mode vacuum gives 4.
pub fn duan_zeta(state: &GaussianState, i: usize, j: usize) -> Result<f64> {
    let n = state.num_modes();
    if i >= n || j >= n {
        return Err(Error::InvalidMode(i.max(j)));
    }
    if i == j {
        return Err(Error::InvalidArgument("duan_zeta needs two distinct modes".into()));
    }
    let mut xc = vec![0.0; n];
    let mut pc = vec![0.0; n];
    xc[i] = 1.0;
    xc[j] = -1.0;
    pc[i] = 1.0;
    pc[j] = 1.0;
    let (_, var_x, _, var_p) = linear_form_stats(state, &xc, &pc)?;
    Ok(var_x + var_p)
}

/// Logarithmic negativity of a two-mode state:
/// `E = max(0, -log₂ ν̃₋)` with `ν̃₋` the smaller symplectic eigenvalue of
/// the partially transposed covariance (vacuum-normalized to 1).
pub fn log_negativity(state: &GaussianState) -> Result<f64> {
    if state.num_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: state.num_modes(),
        });
    }
    let cov = state.cov();
    let det_a = cov.view((0, 0), (2, 2)).determinant();
    let det_b = cov.view((2, 2), (2, 2)).determinant();
    let det_c = cov.view((0, 2), (2, 2)).determinant();
    let det_full = cov.determinant();
    // partial transpose flips the sign of det C
    let delta = det_a + det_b - 2.0 * det_c;
    let disc = (delta * delta - 4.0 * det_full).max(0.0);
    let nu_sq = 0.5 * (delta - disc.sqrt());
    if nu_sq <= 0.0 {
        return Err(Error::NonPhysical(format!(
            "partial-transpose symplectic eigenvalue squared {nu_sq} not positive"
        )));
    }
    Ok((-nu_sq.sqrt().log2()).max(0.0))
}

/// `Tr[ρσ] = 2^N exp(-½ δᵀ(Σ_a+Σ_b)⁻¹δ) / √det(Σ_a+Σ_b)`.
pub fn gaussian_overlap(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if a.num_modes() != b.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: a.num_modes(),
            got: b.num_modes(),
        });
    }
    let n = a.num_modes();
    let sum = a.cov() + b.cov();
    let delta = a.mean() - b.mean();
    let chol = nalgebra::Cholesky::new(sum)
        .ok_or_else(|| Error::NonPhysical("singular covariance sum in overlap".into()))?;
    let quad = delta.dot(&chol.solve(&delta));
    Ok(2f64.powi(n as i32) * (-0.5 * quad).exp() / chol.determinant().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_is_identity() {
        let v = GaussianState::vacuum(3).unwrap();
        assert_eq!(v.cov(), &DMatrix::identity(6, 6));
        assert_eq!(v.mean(), &DVector::zeros(6));
        assert!(GaussianState::vacuum(0).is_err());
    }

    #[test]
    fn vacuum_duan_is_four() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_relative_eq!(duan_zeta(&v, 0, 1).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn squeezer_scales_variances() {
        let v = GaussianState::vacuum(1).unwrap();
        let s = v.apply(&SymplecticMap::squeezer(1, 0, 0.5).unwrap()).unwrap();
        assert_relative_eq!(s.cov()[(0, 0)], (-1.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(s.cov()[(1, 1)], 1.0f64.exp(), epsilon = 1e-12);

        let id = SymplecticMap::squeezer(1, 0, 0.0).unwrap();
        assert_eq!(id.matrix, DMatrix::identity(2, 2));

        let fwd = SymplecticMap::squeezer(1, 0, 0.7).unwrap();
        let back = SymplecticMap::squeezer(1, 0, -0.7).unwrap();
        let round = back.after(&fwd).unwrap();
        assert!((round.matrix - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn squeezer_twice_is_double_strength() {
        let v = GaussianState::vacuum(1).unwrap();
        let s = SymplecticMap::squeezer(1, 0, 0.3).unwrap();
        let twice = v.apply(&s).unwrap().apply(&s).unwrap();
        let direct = v
            .apply(&SymplecticMap::squeezer(1, 0, 0.6).unwrap())
            .unwrap();
        assert!((twice.cov() - direct.cov()).norm() < 1e-12);
    }

    #[test]
    fn beam_splitter_is_symplectic() {
        let bs = SymplecticMap::beam_splitter(2, 0, 1, 0.3).unwrap();
        assert!(bs.is_symplectic(1e-12));
        assert!(SymplecticMap::beam_splitter(2, 0, 1, 1.2).is_err());
        assert!(SymplecticMap::beam_splitter(2, 0, 0, 0.5).is_err());
    }

    #[test]
    fn full_transmissivity_keeps_variances() {
        let v = GaussianState::vacuum(2).unwrap();
        let sq = v.apply(&SymplecticMap::squeezer(2, 0, 0.4).unwrap()).unwrap();
        let out = sq
            .apply(&SymplecticMap::beam_splitter(2, 0, 1, 1.0).unwrap())
            .unwrap();
        // τ = 1 is the identity up to a sign on the second mode
        assert!((out.cov() - sq.cov()).norm() < 1e-12);
    }

    #[test]
    fn tmsv_from_squeezed_vacua_and_balanced_splitter() {
        // momentum-squeezed first mode, position-squeezed second, τ = 1/2
        let r = 0.5;
        let v = GaussianState::vacuum(2).unwrap();
        let prep = SymplecticMap::squeezer(2, 0, -r)
            .unwrap()
            .after(&SymplecticMap::identity(2))
            .unwrap();
        let prep = SymplecticMap::squeezer(2, 1, r).unwrap().after(&prep).unwrap();
        let net = SymplecticMap::beam_splitter(2, 0, 1, 0.5)
            .unwrap()
            .after(&prep)
            .unwrap();
        let out = v.apply(&net).unwrap();
        let target = states::tmsv(r);
        assert!((out.cov() - target.cov()).norm() < 1e-12);
    }

    #[test]
    fn tensor_and_partial_trace() {
        let v1 = GaussianState::vacuum(1).unwrap();
        assert_eq!(v1.tensor(&v1), GaussianState::vacuum(2).unwrap());

        let t = states::tmsv(0.4);
        let reduced = t.partial_trace(&[0]).unwrap();
        let c = (0.8f64).cosh();
        assert_relative_eq!(reduced.cov()[(0, 0)], c, epsilon = 1e-12);
        assert_relative_eq!(reduced.cov()[(1, 1)], c, epsilon = 1e-12);
        assert!(t.partial_trace(&[]).is_err());
        assert!(t.partial_trace(&[5]).is_err());
    }

    #[test]
    fn displaced_vacuum_overlap() {
        let v = GaussianState::vacuum(1).unwrap();
        let d = v.displace(0, 2.0, 0.0).unwrap();
        assert_relative_eq!(
            gaussian_overlap(&d, &v).unwrap(),
            (-1.0f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn overlap_normalization() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_relative_eq!(gaussian_overlap(&v, &v).unwrap(), 1.0, epsilon = 1e-12);
        let sq = GaussianState::squeezed_vacuum(0.5);
        let v1 = GaussianState::vacuum(1).unwrap();
        assert_relative_eq!(
            gaussian_overlap(&sq, &v1).unwrap(),
            1.0 / 0.5f64.cosh(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn linear_form_stats_examples() {
        let v = GaussianState::vacuum(2).unwrap();
        let (_, vx, _, vp) = linear_form_stats(&v, &[1.0, -1.0], &[1.0, -1.0]).unwrap();
        assert_relative_eq!(vx, 2.0, epsilon = 1e-12);
        assert_relative_eq!(vp, 2.0, epsilon = 1e-12);

        let t = states::tmsv(0.3);
        let (_, vx, _, _) = linear_form_stats(&t, &[1.0, -1.0], &[0.0, 0.0]).unwrap();
        assert_relative_eq!(vx, 2.0 * (-0.6f64).exp(), epsilon = 1e-12);

        let (_, z, _, zp) = linear_form_stats(&t, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!((z, zp), (0.0, 0.0));
        assert!(linear_form_stats(&t, &[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn duan_zeta_tmsv() {
        let t = states::tmsv(0.5);
        assert_relative_eq!(duan_zeta(&t, 0, 1).unwrap(), 4.0 * (-1.0f64).exp(), epsilon = 1e-12);
        let t0 = states::tmsv(0.0);
        assert_relative_eq!(duan_zeta(&t0, 0, 1).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn duan_zeta_displacement_invariant() {
        let t = states::tmsv(0.4);
        let d = t
            .displace(0, 1.3, -0.7)
            .unwrap()
            .displace(1, 1.3, -0.7)
            .unwrap();
        assert_relative_eq!(
            duan_zeta(&t, 0, 1).unwrap(),
            duan_zeta(&d, 0, 1).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn log_negativity_examples() {
        let v = GaussianState::vacuum(2).unwrap();
        assert_relative_eq!(log_negativity(&v).unwrap(), 0.0, epsilon = 1e-12);
        let t = states::tmsv(0.5);
        assert_relative_eq!(
            log_negativity(&t).unwrap(),
            1.0 / std::f64::consts::LN_2,
            epsilon = 1e-9
        );
        assert!(log_negativity(&GaussianState::vacuum(3).unwrap()).is_err());
    }

    #[test]
    fn physicality_rejected() {
        // variance below the vacuum bound in one quadrature without squeezing trade-off
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5]));
        assert!(GaussianState::new(DVector::zeros(2), bad).is_err());
    }

    #[test]
    fn permute_swaps_modes() {
        let t = states::tmsv(0.3).tensor(&GaussianState::vacuum(1).unwrap());
        let p = SymplecticMap::permute(&[2, 0, 1]).unwrap();
        assert!(p.is_symplectic(1e-12));
        let out = t.apply(&p).unwrap();
        assert_relative_eq!(out.cov()[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(out.cov()[(2, 2)], (0.6f64).cosh(), epsilon = 1e-12);
    }
}

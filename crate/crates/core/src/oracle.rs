//! Independent verification backends: truncated Fock-space linear algebra
//! and seeded Monte-Carlo phase-space integration.
//!
//! The Fock side works with real amplitude tensors (every state exercised
//! here — the TMSV and its photon-ladder images — has real coefficients in
//! the number basis). Quadrature moments are Weyl-ordered to match Wigner
//! moments: `∫ W x^a p^b = ⟨sym(x̂^a p̂^b)⟩` with the symmetrization
//! `sym(x̂^a p̂^b) = 2^{-a} Σ_k C(a,k) x̂^k p̂^b x̂^{a-k}`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::wigner::PolyGaussian;
use crate::{Error, Result};

/// Name of the random source, recorded in reproducibility metadata.
pub const RNG_ALGORITHM: &str = "ChaCha12";

/// Shard count for Monte-Carlo runs; fixed so results do not depend on the
/// worker count.
const MC_SHARDS: u64 = 64;

/// Per-mode photon-number cutoff guard.
const NORM_DEFICIT_TOL: f64 = 1e-6;

/// Pure state on one or two modes, truncated at `cutoff` photons per mode.
#[derive(Debug, Clone)]
pub struct FockState {
    cutoff: usize,
    modes: usize,
    /// row-major amplitudes; length cutoff^modes
    amps: Vec<f64>,
}

impl FockState {
    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 || modes > 2 {
            return Err(Error::InvalidArgument("FockState supports 1 or 2 modes".into()));
        }
        if cutoff < 2 {
            return Err(Error::InvalidArgument("cutoff too small".into()));
        }
        let mut amps = vec![0.0; cutoff.pow(modes as u32)];
        amps[0] = 1.0;
        Ok(Self {
            cutoff,
            modes,
            amps,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn num_modes(&self) -> usize {
        self.modes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    pub fn amplitude(&self, ns: &[usize]) -> f64 {
        match self.modes {
            1 => self.amps[ns[0]],
            _ => self.amps[self.idx(ns[0], ns[1])],
        }
    }

    fn idx(&self, n1: usize, n2: usize) -> usize {
        n1 * self.cutoff + n2
    }

    /// Weight sitting in the top photon-number level of either mode.
    fn top_level_weight(&self) -> f64 {
        let c = self.cutoff;
        match self.modes {
            1 => self.amps[c - 1] * self.amps[c - 1],
            _ => {
                let mut w = 0.0;
                for n in 0..c {
                    w += self.amps[self.idx(c - 1, n)].powi(2);
                    w += self.amps[self.idx(n, c - 1)].powi(2);
                }
                w
            }
        }
    }
}

/// `Σ_n sech r · tanh^n r |n,n⟩`, truncated.
pub fn fock_tmsv(r: f64, cutoff: usize) -> Result<FockState> {
    if cutoff < 10 {
        return Err(Error::InvalidArgument("cutoff must be at least 10".into()));
    }
    let mut state = FockState::vacuum(2, cutoff)?;
    state.amps.fill(0.0);
    let sech = 1.0 / r.cosh();
    let t = r.tanh();
    for n in 0..cutoff {
        let i = state.idx(n, n);
        state.amps[i] = sech * t.powi(n as i32);
    }
    let deficit = 1.0 - state.norm_squared();
    if deficit > NORM_DEFICIT_TOL {
        return Err(Error::NonPhysical(format!(
            "TMSV truncation deficit {deficit:.2e} at cutoff {cutoff} (r = {r})"
        )));
    }
    Ok(state)
}

/// Applies `â` (subtract) or `â†` (add) to one mode; returns the normalized
/// state and the weight `‖op|ψ⟩‖²`.
pub fn fock_ladder(
    state: &FockState,
    mode: usize,
    kind: crate::wigner::LadderKind,
) -> Result<(FockState, f64)> {
    if mode >= state.modes {
        return Err(Error::InvalidMode(mode));
    }
    let c = state.cutoff;
    let mut out = state.clone();
    out.amps.fill(0.0);
    let lower = matches!(kind, crate::wigner::LadderKind::Subtract);
    let span = if state.modes == 2 { c } else { 1 };
    for n1 in 0..c {
        for n2 in 0..span {
            let amp = if state.modes == 2 {
                state.amps[state.idx(n1, n2)]
            } else {
                state.amps[n1]
            };
            if amp == 0.0 {
                continue;
            }
            let n = if mode == 0 { n1 } else { n2 };
            let (target, factor) = if lower {
                if n == 0 {
                    continue;
                }
                (n - 1, (n as f64).sqrt())
            } else {
                if n + 1 >= c {
                    // raising into the truncated level loses weight; guarded below
                    continue;
                }
                (n + 1, ((n + 1) as f64).sqrt())
            };
            let (m1, m2) = if mode == 0 { (target, n2) } else { (n1, target) };
            if state.modes == 2 {
                out.amps[m1 * c + m2] += factor * amp;
            } else {
                out.amps[m1] += factor * amp;
            }
        }
    }
    let weight = out.norm_squared();
    if weight <= 0.0 {
        return Err(Error::NonPhysical("ladder action annihilated the state".into()));
    }
    if out.top_level_weight() / weight > NORM_DEFICIT_TOL {
        return Err(Error::NonPhysical(
            "truncation guard tripped: significant weight at the cutoff level".into(),
        ));
    }
    let inv = weight.sqrt().recip();
    for a in &mut out.amps {
        *a *= inv;
    }
    Ok((out, weight))
}

/// Matrix of `a + a†` (real symmetric) in the truncated basis.
fn x_matrix(cutoff: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        let v = (n as f64).sqrt();
        m[(n - 1, n)] = v;
        m[(n, n - 1)] = v;
    }
    m
}

/// Matrix of `a - a†` (real antisymmetric); `p̂ = -i (a - a†)`.
fn k_matrix(cutoff: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        let v = (n as f64).sqrt();
        m[(n - 1, n)] = v;
        m[(n, n - 1)] = -v;
    }
    m
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut out = 1.0;
    for i in 0..k {
        out *= (n - i) as f64 / (i + 1) as f64;
    }
    out
}

/// Real matrix `M` with `sym(x̂^a p̂^b) = (-i)^b · M`; valid for states with
/// real amplitudes, where only even total p-powers survive.
fn weyl_matrix(a: u32, b: u32, cutoff: usize) -> DMatrix<f64> {
    let x = x_matrix(cutoff);
    let k = k_matrix(cutoff);
    let mut kb = DMatrix::identity(cutoff, cutoff);
    for _ in 0..b {
        kb = &kb * &k;
    }
    let mut total = DMatrix::zeros(cutoff, cutoff);
    let mut xk = DMatrix::identity(cutoff, cutoff);
    // 2^{-a} Σ_k C(a,k) x^k K^b x^{a-k}
    for kk in 0..=a {
        let mut xak = DMatrix::identity(cutoff, cutoff);
        for _ in 0..(a - kk) {
            xak = &xak * &x;
        }
        total += binomial(a, kk) * (&xk * &kb * &xak);
        xk = &xk * &x;
    }
    total / 2f64.powi(a as i32)
}

/// Wigner moment `⟨Π_m x_m^{a_m} p_m^{b_m}⟩` of the state, one `(a, b)` pair
/// per mode. Odd total p-power vanishes for real-amplitude states.
pub fn fock_moment(state: &FockState, powers: &[(u32, u32)]) -> Result<f64> {
    if powers.len() != state.modes {
        return Err(Error::DimensionMismatch {
            expected: state.modes,
            got: powers.len(),
        });
    }
    let total_b: u32 = powers.iter().map(|&(_, b)| b).sum();
    if total_b % 2 == 1 {
        return Ok(0.0);
    }
    let sign = if (total_b / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let c = state.cutoff;
    match state.modes {
        1 => {
            let m = weyl_matrix(powers[0].0, powers[0].1, c);
            let v = DVector::from_column_slice(&state.amps);
            Ok(sign * v.dot(&(&m * &v)) / state.norm_squared())
        }
        _ => {
            let m1 = weyl_matrix(powers[0].0, powers[0].1, c);
            let m2 = weyl_matrix(powers[1].0, powers[1].1, c);
            let psi = DMatrix::from_row_slice(c, c, &state.amps);
            // ⟨ψ| M1 ⊗ M2 |ψ⟩ with |ψ⟩ as a matrix: Σ ψ ∘ (M1 ψ M2ᵀ)
            let transformed = &m1 * &psi * m2.transpose();
            Ok(sign * psi.component_mul(&transformed).sum() / state.norm_squared())
        }
    }
}

/// `Tr[ρσ] = |⟨a|b⟩|²` for pure states.
pub fn fock_overlap(a: &FockState, b: &FockState) -> Result<f64> {
    if a.modes != b.modes || a.cutoff != b.cutoff {
        return Err(Error::DimensionMismatch {
            expected: a.amps.len(),
            got: b.amps.len(),
        });
    }
    let dot: f64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x * y).sum();
    Ok(dot * dot / (a.norm_squared() * b.norm_squared()))
}

/// Mean photon number of one mode: `(⟨x²⟩ + ⟨p²⟩ - 2) / 4`.
pub fn mean_photon(state: &FockState, mode: usize) -> Result<f64> {
    if mode >= state.modes {
        return Err(Error::InvalidMode(mode));
    }
    let mut powers = vec![(0u32, 0u32); state.modes];
    powers[mode] = (2, 0);
    let x2 = fock_moment(state, &powers)?;
    powers[mode] = (0, 2);
    let p2 = fock_moment(state, &powers)?;
    Ok((x2 + p2 - 2.0) / 4.0)
}

struct GaussianSampler {
    mean: DVector<f64>,
    chol: DMatrix<f64>,
}

impl GaussianSampler {
    fn new(mean: &DVector<f64>, cov: &DMatrix<f64>) -> Result<Self> {
        let chol = nalgebra::Cholesky::new(cov.clone())
            .ok_or_else(|| Error::NonPhysical("sampler covariance not positive definite".into()))?;
        Ok(Self {
            mean: mean.clone(),
            chol: chol.l(),
        })
    }

    fn sample(&self, rng: &mut ChaCha12Rng, out: &mut [f64]) {
        let dim = self.mean.len();
        let mut z = DVector::zeros(dim);
        for i in 0..dim {
            // Box-Muller
            let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.random();
            z[i] = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
        let v = &self.chol * z + &self.mean;
        out.copy_from_slice(v.as_slice());
    }
}

fn mc_run<F>(dim: usize, sampler: &GaussianSampler, samples: u64, seed: u64, f: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let per_shard = samples / MC_SHARDS;
    let remainder = samples % MC_SHARDS;
    let partials: Vec<(f64, f64, u64)> = (0..MC_SHARDS)
        .into_par_iter()
        .map(|shard| {
            // sub-seed = (seed, stream index); independent of worker count
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(shard + 1);
            let count = per_shard + if shard == MC_SHARDS - 1 { remainder } else { 0 };
            let mut point = vec![0.0; dim];
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                sampler.sample(&mut rng, &mut point);
                let v = f(&point);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq, count)
        })
        .collect();
    // fixed-order reduction
    let (sum, sum_sq, n) = partials
        .iter()
        .fold((0.0, 0.0, 0u64), |(s, q, c), &(ps, pq, pc)| {
            (s + ps, q + pq, c + pc)
        });
    let n_f = n as f64;
    let mean = sum / n_f;
    let var = (sum_sq / n_f - mean * mean).max(0.0);
    (mean, (var / n_f).sqrt())
}

/// Monte-Carlo estimate of `∫ W` by importance sampling from the Gaussian
/// kernel. Deterministic given the seed, independent of thread count.
pub fn mc_trace(w: &PolyGaussian, samples: u64, seed: u64) -> Result<(f64, f64)> {
    if samples < 1_000 {
        return Err(Error::InvalidArgument("need at least 1000 samples".into()));
    }
    let dim = 2 * w.num_modes();
    let sampler = GaussianSampler::new(w.mu(), w.gamma())?;
    let mu = w.mu().clone();
    let poly = w.poly().clone();
    let scale = w.scale();
    let (mean, se) = mc_run(dim, &sampler, samples, seed, move |point| {
        let centered: Vec<f64> = point.iter().zip(mu.iter()).map(|(p, m)| p - m).collect();
        scale * poly.evaluate(&centered)
    });
    Ok((mean, se))
}

/// Monte-Carlo estimate of `Tr[ρ₁ρ₂] = (4π)^N ∫ W₁ W₂`, sampling from the
/// first distribution's kernel.
pub fn mc_overlap(
    w1: &PolyGaussian,
    w2: &PolyGaussian,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if w1.num_modes() != w2.num_modes() {
        return Err(Error::DimensionMismatch {
            expected: w1.num_modes(),
            got: w2.num_modes(),
        });
    }
    if samples < 1_000 {
        return Err(Error::InvalidArgument("need at least 1000 samples".into()));
    }
    let dim = 2 * w1.num_modes();
    let sampler = GaussianSampler::new(w1.mu(), w1.gamma())?;
    let prefactor = (4.0 * std::f64::consts::PI).powi(w1.num_modes() as i32);
    let mu1 = w1.mu().clone();
    let poly1 = w1.poly().clone();
    let scale1 = w1.scale();
    let w2c = w2.clone();
    let (mean, se) = mc_run(dim, &sampler, samples, seed, move |point| {
        let centered: Vec<f64> = point.iter().zip(mu1.iter()).map(|(p, m)| p - m).collect();
        prefactor * scale1 * poly1.evaluate(&centered) * w2c.evaluate(point)
    });
    Ok((mean, se))
}

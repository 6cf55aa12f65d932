//! Asymmetric telecloning over the chained-splitter multimode resource:
//! closed-form clone moments, the covariance-simulation oracle for them, and
//! per-clone fidelity/nonclassicality entries.
//!
//! Closed forms follow the chain recursion (see
//! [`states::asymmetric_resource`] for the wiring): with `s2 = sinh 2r`,
//! `t_i` the transmissivities, and receiver `m`,
//!
//! ```text
//! Σ_even(m) = Σ_{i odd ≤ m-1} t_i Π_{j=i+1}^{m-1} (1-t_j)
//! Σ_odd(m)  = Σ_{i odd ≤ m-2} t_i Π_{j=i+1}^{m-1} (1-t_j)
//! ⟨x_m²⟩    = e^{2r} - 2 s2 Σ_even(m) t_m            (m even)
//!           = e^{-2r} + 2 s2 (1 - Σ_odd(m)) t_m      (m odd)
//! ⟨x_s²⟩    = e^{2r} - 2 s2 Σ_sender
//! ⟨x_s x_m⟩ = s(m) · 2 s2 √(t_m(1-t_m)) Π_{l>m} √(1-t_l) · B(m)
//! ```
//!
//! with `B(m) = Σ_even(m)` or `1 - Σ_odd(m)` by parity and `s(m)` the
//! canonical correlation sign; momentum entries follow from `r -> -r`.

use crate::measures::{self, QReport};
use crate::protocols::{CloneReport, Variant};
use crate::states::{self, canonical_corr_sign, InputSpec};
use crate::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Second moments tying receiver `m` to the sender mode, both quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneMoments {
    pub xx_clone: f64,
    pub xx_sender: f64,
    pub xx_corr: f64,
    pub pp_clone: f64,
    pub pp_sender: f64,
    pub pp_corr: f64,
}

fn check_args(taus: &[f64], m: usize) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("need at least one transmissivity".into()));
    }
    if m == 0 || m > taus.len() {
        return Err(Error::InvalidMode(m));
    }
    for &t in taus {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "transmissivity {t} outside [0, 1]"
            )));
        }
    }
    Ok(())
}

fn sigma_even(taus: &[f64], m: usize) -> f64 {
    // Σ_{i odd ≤ m-1} t_i Π_{j=i+1}^{m-1} (1-t_j), 1-indexed
    let mut sum = 0.0;
    let mut i = 1usize;
    while i < m {
        let mut prod = taus[i - 1];
        for j in (i + 1)..=(m - 1) {
            prod *= 1.0 - taus[j - 1];
        }
        sum += prod;
        i += 2;
    }
    sum
}

fn sigma_odd(taus: &[f64], m: usize) -> f64 {
    if m < 3 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut i = 1usize;
    while i <= m - 2 {
        let mut prod = taus[i - 1];
        for j in (i + 1)..=(m - 1) {
            prod *= 1.0 - taus[j - 1];
        }
        sum += prod;
        i += 2;
    }
    sum
}

fn sigma_sender(taus: &[f64]) -> f64 {
    let n = taus.len();
    let top = if n % 2 == 0 { n - 1 } else { n };
    let mut sum = 0.0;
    let mut i = 1usize;
    while i <= top {
        let mut prod = taus[i - 1];
        for j in (i + 1)..=n {
            prod *= 1.0 - taus[j - 1];
        }
        sum += prod;
        i += 2;
    }
    sum
}

fn x_variance_clone(r: f64, taus: &[f64], m: usize) -> f64 {
    let s2 = (2.0 * r).sinh();
    let t_m = taus[m - 1];
    if m % 2 == 0 {
        (2.0 * r).exp() - 2.0 * s2 * sigma_even(taus, m) * t_m
    } else {
        (-2.0 * r).exp() + 2.0 * s2 * (1.0 - sigma_odd(taus, m)) * t_m
    }
}

fn x_variance_sender(r: f64, taus: &[f64]) -> f64 {
    (2.0 * r).exp() - 2.0 * (2.0 * r).sinh() * sigma_sender(taus)
}

fn x_correlator(r: f64, taus: &[f64], m: usize) -> f64 {
    let n = taus.len();
    let s2 = (2.0 * r).sinh();
    let t_m = taus[m - 1];
    let mut tail = 1.0;
    for l in (m + 1)..=n {
        tail *= (1.0 - taus[l - 1]).sqrt();
    }
    let b = if m % 2 == 0 {
        sigma_even(taus, m)
    } else {
        1.0 - sigma_odd(taus, m)
    };
    canonical_corr_sign(m) * 2.0 * s2 * (t_m * (1.0 - t_m)).sqrt() * tail * b
}

/// Closed-form clone moments; momentum entries by `r -> -r`.
pub fn closed_moments(r: f64, taus: &[f64], m: usize) -> Result<CloneMoments> {
    check_args(taus, m)?;
    Ok(CloneMoments {
        xx_clone: x_variance_clone(r, taus, m),
        xx_sender: x_variance_sender(r, taus),
        xx_corr: x_correlator(r, taus, m),
        pp_clone: x_variance_clone(-r, taus, m),
        pp_sender: x_variance_sender(-r, taus),
        pp_corr: x_correlator(-r, taus, m),
    })
}

/// The same moments read from the explicit `N+1`-mode covariance produced by
/// [`states::asymmetric_resource`]; the independent oracle for
/// [`closed_moments`].
pub fn sim_moments(r: f64, taus: &[f64], m: usize) -> Result<CloneMoments> {
    check_args(taus, m)?;
    let n = taus.len();
    let state = states::asymmetric_resource(r, taus)?;
    let cov = state.cov();
    let (cm, s) = (m - 1, n); // mode indices: receivers 0..N-1, sender N
    Ok(CloneMoments {
        xx_clone: cov[(2 * cm, 2 * cm)],
        xx_sender: cov[(2 * s, 2 * s)],
        xx_corr: cov[(2 * s, 2 * cm)],
        pp_clone: cov[(2 * cm + 1, 2 * cm + 1)],
        pp_sender: cov[(2 * s + 1, 2 * s + 1)],
        pp_corr: cov[(2 * s + 1, 2 * cm + 1)],
    })
}

/// Per-clone asymmetric telecloning result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricEntry {
    pub fidelity: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub q: QReport,
}

/// Clone variances, fidelity, and Q from a set of moments. The clone output
/// forms are `x_m + x_in - x_h`, `p_m + p_in + p_h` with `h` the sender mode
/// (irreversible) or its balanced combination with the sender-side vacuum
/// (reversible).
pub fn clone_entry_from(
    moments: &CloneMoments,
    variant: Variant,
    input: &InputSpec,
) -> Result<AsymmetricEntry> {
    let in_state = input.to_gaussian();
    let (hx_var, hp_var, corr_scale) = match variant {
        Variant::Irreversible => (moments.xx_sender, moments.pp_sender, 1.0),
        Variant::Reversible => (
            (moments.xx_sender + 1.0) / 2.0,
            (moments.pp_sender + 1.0) / 2.0,
            1.0 / SQRT2,
        ),
    };
    let excess_x = moments.xx_clone + hx_var - 2.0 * corr_scale * moments.xx_corr;
    let excess_p = moments.pp_clone + hp_var + 2.0 * corr_scale * moments.pp_corr;
    let var_x = in_state.cov()[(0, 0)] + excess_x;
    let var_p = in_state.cov()[(1, 1)] + excess_p;
    let denom = (in_state.cov()[(0, 0)] + var_x) * (in_state.cov()[(1, 1)] + var_p);
    let fidelity = 2.0 / denom.sqrt();
    let zeta = excess_x + excess_p;
    Ok(AsymmetricEntry {
        fidelity,
        var_x,
        var_p,
        q: QReport {
            zeta,
            q: 1.0 - zeta / 4.0,
            classical_threshold: measures::classical_threshold(input),
        },
    })
}

/// Entry for clone `m`, from the closed forms or the simulation oracle.
pub fn asymmetric_fidelity(
    r: f64,
    taus: &[f64],
    variant: Variant,
    m: usize,
    input: &InputSpec,
    use_closed: bool,
) -> Result<AsymmetricEntry> {
    let moments = if use_closed {
        closed_moments(r, taus, m)?
    } else {
        sim_moments(r, taus, m)?
    };
    clone_entry_from(&moments, variant, input)
}

/// Full per-clone report for the asymmetric network; the anticlone of the
/// reversible scheme is resource-independent as in the symmetric protocols.
pub fn report(
    r: f64,
    taus: &[f64],
    variant: Variant,
    input: &InputSpec,
    use_closed: bool,
) -> Result<CloneReport> {
    let n = taus.len();
    let mut fidelities = Vec::with_capacity(n);
    let mut variances = Vec::with_capacity(n);
    let mut qs = Vec::with_capacity(n);
    for m in 1..=n {
        let e = asymmetric_fidelity(r, taus, variant, m, input, use_closed)?;
        fidelities.push(e.fidelity);
        variances.push((e.var_x, e.var_p));
        qs.push(e.q);
    }
    let anticlone = match variant {
        Variant::Reversible => {
            let p = crate::protocols::ProtocolSpec::new(Variant::Reversible, 2, 0.0)?;
            Some(crate::protocols::anticlone_fidelity(input, &p)?)
        }
        Variant::Irreversible => None,
    };
    Ok(CloneReport {
        fidelities,
        variances,
        q: qs,
        anticlone_fidelity: anticlone,
        herald_weight: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EXEMPLARY: [f64; 4] = [0.5, 0.05, 0.125, 0.1];

    #[test]
    fn zero_squeezing_is_trivial() {
        let m = closed_moments(0.0, &EXEMPLARY, 2).unwrap();
        assert_relative_eq!(m.xx_clone, 1.0, epsilon = 1e-12);
        assert_relative_eq!(m.xx_sender, 1.0, epsilon = 1e-12);
        assert_relative_eq!(m.xx_corr, 0.0, epsilon = 1e-12);
        let e = clone_entry_from(&m, Variant::Irreversible, &InputSpec::coherent(0.0, 0.0))
            .unwrap();
        assert_relative_eq!(e.fidelity, 0.5, epsilon = 1e-12);
        assert_relative_eq!(e.q.q, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_matches_simulation() {
        // deterministic pseudo-random draws
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let n = 2 + (next() * 3.0) as usize; // 2..4
            let r = 0.05 + 0.95 * next();
            let taus: Vec<f64> = (0..n).map(|_| 0.02 + 0.96 * next()).collect();
            for m in 1..=n {
                let c = closed_moments(r, &taus, m).unwrap();
                let s = sim_moments(r, &taus, m).unwrap();
                assert_relative_eq!(c.xx_clone, s.xx_clone, epsilon = 1e-9);
                assert_relative_eq!(c.xx_sender, s.xx_sender, epsilon = 1e-9);
                assert_relative_eq!(c.xx_corr, s.xx_corr, epsilon = 1e-9);
                assert_relative_eq!(c.pp_clone, s.pp_clone, epsilon = 1e-9);
                assert_relative_eq!(c.pp_sender, s.pp_sender, epsilon = 1e-9);
                assert_relative_eq!(c.pp_corr, s.pp_corr, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn single_splitter_reduces_to_tmsv_entries() {
        let r = 0.7;
        let m = closed_moments(r, &[0.5], 1).unwrap();
        assert_relative_eq!(m.xx_clone, (2.0 * r).cosh(), epsilon = 1e-12);
        assert_relative_eq!(m.xx_sender, (2.0 * r).cosh(), epsilon = 1e-12);
        assert_relative_eq!(m.xx_corr, (2.0 * r).sinh(), epsilon = 1e-12);
        assert_relative_eq!(m.pp_corr, -(2.0 * r).sinh(), epsilon = 1e-12);
    }

    #[test]
    fn exemplary_network_clone_quality() {
        let input = InputSpec::coherent(0.0, 0.0);
        let mut best = [0.0f64; 4];
        let mut r = 0.0025;
        while r <= 2.0 {
            for m in 1..=4 {
                let e =
                    asymmetric_fidelity(r, &EXEMPLARY, Variant::Irreversible, m, &input, true)
                        .unwrap();
                best[m - 1] = best[m - 1].max(e.fidelity);
            }
            r += 0.0025;
        }
        assert!((best[0] - 2.0 / 3.0).abs() < 1.5e-3, "C1 max {}", best[0]);
        assert!(best[1] > 0.5 && best[1] < 0.52, "C2 max {}", best[1]);
        assert!(best[2] <= 0.5 + 1e-9, "C3 max {}", best[2]);
        assert!(best[3] <= 0.5 + 1e-9, "C4 max {}", best[3]);
    }

    #[test]
    fn bad_mode_rejected() {
        assert!(closed_moments(0.5, &EXEMPLARY, 0).is_err());
        assert!(closed_moments(0.5, &EXEMPLARY, 5).is_err());
    }
}

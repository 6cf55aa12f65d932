//! Fidelity thresholds, the quadrature nonclassicality measure Q, its
//! fidelity bound, and the closed-form entanglement references for the
//! irreversible TMSV network.

use nalgebra::{DMatrix, DVector};

use crate::states::InputSpec;
use crate::{Error, Result};

/// Nonclassicality report for a homodyne-mode/clone-mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QReport {
    /// Duan sum `ζ = Var(x_h - x_C) + Var(p_h + p_C)` in vacuum-1 units
    /// (two-mode vacuum value 4).
    pub zeta: f64,
    /// Calibrated measure `q = 1 - ζ/4`; zero exactly at the vacuum level.
    pub q: f64,
    /// Input-dependent classical benchmark fidelity.
    pub classical_threshold: f64,
}

/// Evaluates the Q measure for linear mode combinations `h` and `c` over a
/// network state given by its full covariance (interleaved quadratures).
/// The combinations list one coefficient per mode, applied identically to
/// both quadratures as `x_h - x_C` and `p_h + p_C`.
pub fn q_measure(
    network_cov: &DMatrix<f64>,
    h: &[f64],
    c: &[f64],
    input: &InputSpec,
) -> Result<QReport> {
    let modes = network_cov.nrows() / 2;
    if h.len() != modes || c.len() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            got: h.len().max(c.len()),
        });
    }
    let mut vx = DVector::zeros(2 * modes);
    let mut vp = DVector::zeros(2 * modes);
    for m in 0..modes {
        vx[2 * m] = h[m] - c[m];
        vp[2 * m + 1] = h[m] + c[m];
    }
    let zeta = (network_cov * &vx).dot(&vx) + (network_cov * &vp).dot(&vp);
    Ok(QReport {
        zeta,
        q: 1.0 - zeta / 4.0,
        classical_threshold: classical_threshold(input),
    })
}

/// Lower fidelity bound `1/(2 - q)`; exact for symmetric clone noise with
/// coherent input.
pub fn prop1_bound(q: f64) -> f64 {
    1.0 / (2.0 - q)
}

/// Unit-sensitive literal bracket `2/√(7-2Q) ≤ F ≤ 2/√(6-2Q)`, kept as a
/// diagnostic only; [`prop1_bound`] is the calibrated form.
pub fn prop1_literal_bracket(q: f64) -> (f64, f64) {
    (2.0 / (7.0 - 2.0 * q).sqrt(), 2.0 / (6.0 - 2.0 * q).sqrt())
}

/// Best measure-and-prepare fidelity: 1/2 for coherent inputs, `1/(2 cosh s)`
/// for squeezed inputs (the zero-squeezing limit of the pipeline).
pub fn classical_threshold(input: &InputSpec) -> f64 {
    match input {
        InputSpec::Coherent { .. } => 0.5,
        InputSpec::Squeezed { s, .. } => 0.5 / s.cosh(),
    }
}

/// The closed-form ν the paper quotes for the sender/clone reduction of the
/// irreversible TMSV network. Algebraically this equals the *square* of the
/// smaller partial-transpose symplectic eigenvalue of that reduction.
pub fn eln_nu(r: f64) -> f64 {
    let bracket = 3.0 + 4.0 * (2.0 * r).cosh() + 9.0 * (4.0 * r).cosh();
    let radical =
        2.0 * (r.sinh() - 3.0 * (3.0 * r).sinh()).powi(2) * (9.0 * (2.0 * r).cosh() + 7.0);
    (bracket - radical.sqrt()) / 16.0
}

/// Closed-form entanglement reference `E = -log₂ ν` with [`eln_nu`].
pub fn eln_closed_form(r: f64) -> f64 {
    -eln_nu(r).log2()
}

/// Closed-form genuine-multimode-entanglement reference
/// `G = 1 - 2/(1 + cosh² r)` for the three-mode irreversible network.
pub fn ggm_closed_form(r: f64) -> f64 {
    1.0 - 2.0 / (1.0 + r.cosh().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn thresholds() {
        assert_eq!(classical_threshold(&InputSpec::coherent(1.0, -2.0)), 0.5);
        assert_relative_eq!(
            classical_threshold(&InputSpec::squeezed(0.5, 0.0, 0.0)),
            0.443409441985037,
            epsilon = 1e-12
        );
        assert_eq!(classical_threshold(&InputSpec::squeezed(0.0, 0.3, 0.1)), 0.5);
    }

    #[test]
    fn q_measure_vacuum_network() {
        // h = first mode, C = second mode, over a two-mode vacuum: ζ = 4
        let cov = DMatrix::<f64>::identity(4, 4);
        let rep = q_measure(&cov, &[1.0, 0.0], &[0.0, 1.0], &InputSpec::coherent(0.0, 0.0))
            .unwrap();
        assert_relative_eq!(rep.zeta, 4.0, epsilon = 1e-12);
        assert_relative_eq!(rep.q, 0.0, epsilon = 1e-12);
        assert_eq!(rep.classical_threshold, 0.5);
        assert!(q_measure(&cov, &[1.0], &[0.0, 1.0], &InputSpec::coherent(0.0, 0.0)).is_err());
    }

    #[test]
    fn prop1_values() {
        assert_relative_eq!(prop1_bound(0.0), 0.5);
        assert_relative_eq!(prop1_bound(0.5), 2.0 / 3.0, epsilon = 1e-12);
        let (lo, hi) = prop1_literal_bracket(0.5);
        assert!(lo < hi);
    }

    #[test]
    fn eln_closed_form_values() {
        assert_relative_eq!(eln_nu(0.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(eln_closed_form(0.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(eln_nu(0.5), 0.319563541569563, epsilon = 1e-12);
        assert_relative_eq!(eln_closed_form(0.5), 1.645825271718795, epsilon = 1e-10);
        // monotone increasing on [0, 1]
        let mut prev = eln_closed_form(0.0);
        for i in 1..=50 {
            let e = eln_closed_form(i as f64 / 50.0);
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn ggm_values() {
        assert_relative_eq!(ggm_closed_form(0.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(ggm_closed_form(0.5), 0.11954017075, epsilon = 1e-9);
        assert!(ggm_closed_form(3.0) > 0.96);
    }
}

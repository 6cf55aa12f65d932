//! Constructors for the input and resource states, and the CLI spec parsing.

use nalgebra::{DMatrix, DVector};

use crate::phase_space::{GaussianState, SymplecticMap};
use crate::wigner::{LadderKind, PolyGaussian};
use crate::{Error, Result};

/// Squeezing orientation of an input state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SqueezeAxis {
    #[default]
    X,
    P,
}

/// The state handed to the sender for cloning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSpec {
    /// Coherent state with complex displacement `α = re + i·im`.
    Coherent { re: f64, im: f64 },
    /// Squeezed-displaced state; `s ≥ 0`, squeezed along `axis`.
    Squeezed { s: f64, re: f64, im: f64, axis: SqueezeAxis },
}

impl InputSpec {
    pub fn coherent(re: f64, im: f64) -> Self {
        InputSpec::Coherent { re, im }
    }

    pub fn squeezed(s: f64, re: f64, im: f64) -> Self {
        InputSpec::Squeezed {
            s,
            re,
            im,
            axis: SqueezeAxis::X,
        }
    }

    /// Parses `coherent[:re,im]` or `squeezed:s[,re,im]`; an optional
    /// trailing `,p` on `squeezed` flips the squeezing axis.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = match text.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (text, None),
        };
        let nums = |r: &str| -> Result<Vec<f64>> {
            r.split(',')
                .filter(|s| !s.trim().is_empty() && s.trim() != "p" && s.trim() != "x")
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad number `{s}` in input spec")))
                })
                .collect()
        };
        match kind {
            "coherent" => {
                let vals = rest.map(nums).transpose()?.unwrap_or_default();
                match vals.as_slice() {
                    [] => Ok(InputSpec::coherent(0.0, 0.0)),
                    [re] => Ok(InputSpec::coherent(*re, 0.0)),
                    [re, im] => Ok(InputSpec::coherent(*re, *im)),
                    _ => Err(Error::Parse("coherent takes at most re,im".into())),
                }
            }
            "squeezed" => {
                let rest = rest.ok_or_else(|| Error::Parse("squeezed needs s".into()))?;
                let axis = if rest.split(',').any(|t| t.trim() == "p") {
                    SqueezeAxis::P
                } else {
                    SqueezeAxis::X
                };
                let vals = nums(rest)?;
                let spec = match vals.as_slice() {
                    [s] => InputSpec::squeezed(*s, 0.0, 0.0),
                    [s, re] => InputSpec::squeezed(*s, *re, 0.0),
                    [s, re, im] => InputSpec::squeezed(*s, *re, *im),
                    _ => return Err(Error::Parse("squeezed takes s[,re,im]".into())),
                };
                if let InputSpec::Squeezed { s, re, im, .. } = spec {
                    if s < 0.0 {
                        return Err(Error::Parse("squeezing must be ≥ 0".into()));
                    }
                    Ok(InputSpec::Squeezed { s, re, im, axis })
                } else {
                    unreachable!()
                }
            }
            other => Err(Error::Parse(format!("unknown input kind `{other}`"))),
        }
    }

    pub fn to_gaussian(&self) -> GaussianState {
        match *self {
            InputSpec::Coherent { re, im } => coherent(re, im),
            InputSpec::Squeezed { s, re, im, axis } => squeezed_input(s, re, im, axis),
        }
    }

    /// Phase conjugate (momentum mean flipped); what the anticlone targets.
    pub fn conjugate(&self) -> Self {
        match *self {
            InputSpec::Coherent { re, im } => InputSpec::Coherent { re, im: -im },
            InputSpec::Squeezed { s, re, im, axis } => InputSpec::Squeezed {
                s,
                re,
                im: -im,
                axis,
            },
        }
    }

    pub fn label(&self) -> String {
        match *self {
            InputSpec::Coherent { re, im } => format!("coherent:{re},{im}"),
            InputSpec::Squeezed { s, re, im, axis } => {
                let ax = if axis == SqueezeAxis::P { ",p" } else { "" };
                format!("squeezed:{s},{re},{im}{ax}")
            }
        }
    }
}

/// Which entangled resource feeds the network.
#[derive(Debug, Clone, PartialEq)]
pub enum ResourceFamily {
    Tmsv,
    /// `ps(n1, n2)`: n1 photons subtracted on the receiver arm, n2 on the
    /// sender arm.
    PhotonSubtracted(u32, u32),
    /// `pa(n1, n2)`: n1 photons added on the sender arm, n2 on the receiver
    /// arm.
    PhotonAdded(u32, u32),
    /// Chained-splitter multimode resource with the given transmissivities.
    Asymmetric(Vec<f64>),
}

impl ResourceFamily {
    /// Parses `tmsv`, `ps:n1,n2`, `pa:n1,n2`, or `asym:t1,t2,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = match text.split_once(':') {
            Some((k, r)) => (k, Some(r)),
            None => (text, None),
        };
        match kind {
            "tmsv" => Ok(ResourceFamily::Tmsv),
            "ps" | "pa" => {
                let rest = rest.ok_or_else(|| Error::Parse(format!("{kind} needs n1,n2")))?;
                let counts: Vec<u32> = rest
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::Parse(format!("bad photon count `{s}`")))
                    })
                    .collect::<Result<_>>()?;
                let [n1, n2] = counts.as_slice() else {
                    return Err(Error::Parse(format!("{kind} takes exactly n1,n2")));
                };
                if *n1 == 0 && *n2 == 0 {
                    return Err(Error::Parse("photon counts cannot both be zero".into()));
                }
                Ok(if kind == "ps" {
                    ResourceFamily::PhotonSubtracted(*n1, *n2)
                } else {
                    ResourceFamily::PhotonAdded(*n1, *n2)
                })
            }
            "asym" => {
                let rest = rest.ok_or_else(|| Error::Parse("asym needs transmissivities".into()))?;
                let taus: Vec<f64> = rest
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad transmissivity `{s}`")))
                    })
                    .collect::<Result<_>>()?;
                if taus.is_empty() {
                    return Err(Error::Parse("asym needs at least one transmissivity".into()));
                }
                for &t in &taus {
                    if !(0.0..=1.0).contains(&t) {
                        return Err(Error::Parse(format!("transmissivity {t} outside [0, 1]")));
                    }
                }
                Ok(ResourceFamily::Asymmetric(taus))
            }
            other => Err(Error::Parse(format!("unknown resource family `{other}`"))),
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, ResourceFamily::Tmsv | ResourceFamily::Asymmetric(_))
    }

    pub fn label(&self) -> String {
        match self {
            ResourceFamily::Tmsv => "tmsv".into(),
            ResourceFamily::PhotonSubtracted(a, b) => format!("ps:{a},{b}"),
            ResourceFamily::PhotonAdded(a, b) => format!("pa:{a},{b}"),
            ResourceFamily::Asymmetric(taus) => {
                let list: Vec<String> = taus.iter().map(|t| t.to_string()).collect();
                format!("asym:{}", list.join(","))
            }
        }
    }
}

/// Resource family plus squeezing amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceSpec {
    pub family: ResourceFamily,
    pub r: f64,
}

impl ResourceSpec {
    pub fn new(family: ResourceFamily, r: f64) -> Result<Self> {
        if r < 0.0 || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("squeezing r = {r} must be ≥ 0")));
        }
        Ok(Self { family, r })
    }
}

/// Two-mode squeezed vacuum with covariance entries `cosh 2r`, `± sinh 2r`.
pub fn tmsv(r: f64) -> GaussianState {
    let c = (2.0 * r).cosh();
    let s = (2.0 * r).sinh();
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, -s, //
            s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        ],
    );
    GaussianState::new(DVector::zeros(4), cov).expect("TMSV covariance is physical")
}

/// Coherent state: identity covariance, mean `(2 Re α, 2 Im α)`.
pub fn coherent(re: f64, im: f64) -> GaussianState {
    GaussianState::vacuum(1)
        .unwrap()
        .displace(0, 2.0 * re, 2.0 * im)
        .unwrap()
}

/// Squeezed-displaced input state.
pub fn squeezed_input(s: f64, re: f64, im: f64, axis: SqueezeAxis) -> GaussianState {
    let (vx, vp) = match axis {
        SqueezeAxis::X => ((-2.0 * s).exp(), (2.0 * s).exp()),
        SqueezeAxis::P => ((2.0 * s).exp(), (-2.0 * s).exp()),
    };
    let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![vx, vp]));
    GaussianState::new(DVector::from_vec(vec![2.0 * re, 2.0 * im]), cov)
        .expect("squeezed input covariance is physical")
}

/// De-Gaussified two-mode resource: lifts `tmsv(r)`, applies the ladder
/// superoperator per arm the prescribed number of times, and normalizes.
/// Returns the normalized distribution and the total heralding weight.
///
/// Mode order is `(sender arm, receiver arm)`. Subtraction counts act
/// receiver-arm first, addition counts sender-arm first, so `ps:1,0` and
/// `pa:1,0` realize the same single-photon family (equal states up to the
/// heralding weight), which is the pair the protocol literature compares.
pub fn degaussify(spec: &ResourceSpec) -> Result<(PolyGaussian, f64)> {
    let (kind, on_sender, on_receiver) = match spec.family {
        ResourceFamily::PhotonSubtracted(n1, n2) => (LadderKind::Subtract, n2, n1),
        ResourceFamily::PhotonAdded(n1, n2) => (LadderKind::Add, n1, n2),
        _ => {
            return Err(Error::InvalidArgument(
                "degaussify applies to ps/pa resources only".into(),
            ))
        }
    };
    let mut w = PolyGaussian::lift_gaussian(&tmsv(spec.r));
    let mut weight = 1.0;
    for (mode, count) in [(0usize, on_sender), (1usize, on_receiver)] {
        for _ in 0..count {
            let (raw, wi) = w.ladder_superop(mode, kind).map_err(|_| {
                Error::NonPhysical(format!(
                    "zero heralding weight applying {kind:?} on mode {mode} at r = {}",
                    spec.r
                ))
            })?;
            let (normalized, _) = raw.normalize()?;
            w = normalized;
            weight *= wi;
        }
    }
    Ok((w, weight))
}

/// Sender-receiver correlation sign the chain produces for receiver `m`
/// before the final per-receiver phase normalization.
fn chain_natural_sign(n: usize, m: usize) -> f64 {
    let odd_after = ((m + 1)..=n).filter(|k| k % 2 == 1).count();
    if odd_after % 2 == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Canonical sender-receiver correlation sign: `+` for receivers 1, 2 mod 4,
/// `-` for 3, 0 mod 4. Receivers are free to apply local π rotations, so the
/// construction normalizes to this pattern; it makes `N = 1, τ = 1/2` reduce
/// to the TMSV exactly and leaves the first receiver pair the well-correlated
/// one for every `N`.
pub(crate) fn canonical_corr_sign(m: usize) -> f64 {
    if m % 4 == 1 || m % 4 == 2 {
        1.0
    } else {
        -1.0
    }
}

/// Genuinely entangled `N+1`-mode Gaussian resource from `N` chained beam
/// splitters over alternately squeezed vacua.
///
/// Wiring (fixed): input mode `k` is p-squeezed for odd `k`, x-squeezed for
/// even `k`, all with magnitude `r`. Splitter `k` mixes the running carrier
/// with mode `k+1`; the port `√τ_k·carrier + √(1-τ_k)·new` terminates as
/// receiver `k`, and the through port `√(1-τ_k)·carrier - √τ_k·new` continues,
/// picking up a π phase flip after odd-indexed splitters. Receiver modes are
/// phase-normalized to the canonical correlation-sign pattern at the end.
/// Output mode order is `(C_1, ..., C_N, sender)`. For `N = 1`, `τ = 1/2`
/// this is exactly the TMSV.
pub fn asymmetric_resource(r: f64, taus: &[f64]) -> Result<GaussianState> {
    let n = taus.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one transmissivity".into()));
    }
    for &t in taus {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "transmissivity {t} outside [0, 1]"
            )));
        }
    }
    let modes = n + 1;
    let mut net = SymplecticMap::identity(modes);
    for k in 1..=modes {
        // odd modes p-squeezed (x-variance e^{+2r}), even modes x-squeezed
        let sign = if k % 2 == 1 { -r } else { r };
        net = SymplecticMap::squeezer(modes, k - 1, sign)?.after(&net)?;
    }
    // slots: receiver k lands in slot k-1, the carrier moves to slot k
    for k in 1..=n {
        // splitter ports: slot k-1 (carrier) keeps √τ·c + √(1-τ)·new,
        // slot k (new) carries the through combination onward
        net = SymplecticMap::beam_splitter(modes, k - 1, k, taus[k - 1])?.after(&net)?;
        if k % 2 == 1 {
            net = SymplecticMap::phase_flip(modes, k)?.after(&net)?;
        }
    }
    for m in 1..=n {
        if chain_natural_sign(n, m) != canonical_corr_sign(m) {
            net = SymplecticMap::phase_flip(modes, m - 1)?.after(&net)?;
        }
    }
    GaussianState::vacuum(modes)?.apply(&net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::gaussian_overlap;
    use approx::assert_relative_eq;

    #[test]
    fn tmsv_closed_form() {
        let t0 = tmsv(0.0);
        assert_eq!(t0.cov(), &DMatrix::identity(4, 4));
        let t = tmsv(0.5);
        assert_relative_eq!(t.cov()[(0, 0)], 1.5430806348152437, epsilon = 1e-12);
        assert_relative_eq!(t.cov()[(0, 2)], 1.1752011936438014, epsilon = 1e-12);
        assert_relative_eq!(t.cov()[(1, 3)], -1.1752011936438014, epsilon = 1e-12);
        assert_relative_eq!(t.purity(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn coherent_and_squeezed_inputs() {
        assert_eq!(coherent(0.0, 0.0), GaussianState::vacuum(1).unwrap());
        assert_eq!(
            squeezed_input(0.0, 0.7, -0.2, SqueezeAxis::X),
            coherent(0.7, -0.2)
        );
        let sq = squeezed_input(0.5, 0.0, 0.0, SqueezeAxis::X);
        assert_relative_eq!(
            gaussian_overlap(&sq, &GaussianState::vacuum(1).unwrap()).unwrap(),
            1.0 / 0.5f64.cosh(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn degaussify_rejects_vacuum_subtraction() {
        let spec = ResourceSpec::new(ResourceFamily::PhotonSubtracted(1, 1), 0.0).unwrap();
        assert!(degaussify(&spec).is_err());
    }

    #[test]
    fn photon_added_vacuum_is_fock_one() {
        let spec = ResourceSpec::new(ResourceFamily::PhotonAdded(1, 0), 0.0).unwrap();
        let (w, weight) = degaussify(&spec).unwrap();
        assert_relative_eq!(weight, 1.0, epsilon = 1e-12);
        // sender arm holds |1>, receiver arm vacuum
        let (mean, cov) = w.second_moments();
        assert!(mean.norm() < 1e-12);
        assert_relative_eq!(cov[(0, 0)], 3.0, epsilon = 1e-10);
        assert_relative_eq!(cov[(2, 2)], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn ps_and_pa_single_photon_states_match() {
        // ps:1,0 (receiver-arm subtraction) equals pa:1,0 (sender-arm addition)
        // up to the heralding weight
        let r = 0.45;
        let (ws, _) =
            degaussify(&ResourceSpec::new(ResourceFamily::PhotonSubtracted(1, 0), r).unwrap())
                .unwrap();
        let (wa, _) =
            degaussify(&ResourceSpec::new(ResourceFamily::PhotonAdded(1, 0), r).unwrap()).unwrap();
        let (ms, cs) = ws.second_moments();
        let (ma, ca) = wa.second_moments();
        assert!((ms - ma).norm() < 1e-9);
        assert!((cs - ca).norm() < 1e-9);
        assert_relative_eq!(ws.overlap(&wa).unwrap(), 1.0, epsilon = 1e-9);
        // .. and the mirrored pair matches too
        let (ws2, _) =
            degaussify(&ResourceSpec::new(ResourceFamily::PhotonSubtracted(0, 1), r).unwrap())
                .unwrap();
        let (wa2, _) =
            degaussify(&ResourceSpec::new(ResourceFamily::PhotonAdded(0, 1), r).unwrap()).unwrap();
        assert_relative_eq!(ws2.overlap(&wa2).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn degaussified_states_are_normalized_with_positive_weight() {
        for fam in [
            ResourceFamily::PhotonSubtracted(1, 1),
            ResourceFamily::PhotonAdded(1, 1),
            ResourceFamily::PhotonSubtracted(2, 2),
        ] {
            let (w, weight) = degaussify(&ResourceSpec::new(fam, 0.4).unwrap()).unwrap();
            assert!(weight > 0.0);
            assert_relative_eq!(w.trace(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn asymmetric_single_splitter_is_tmsv() {
        let r = 0.63;
        let res = asymmetric_resource(r, &[0.5]).unwrap();
        assert!((res.cov() - tmsv(r).cov()).norm() < 1e-12);
    }

    #[test]
    fn asymmetric_resource_is_pure_and_vacuum_at_zero() {
        let res = asymmetric_resource(0.0, &[0.3, 0.6, 0.9]).unwrap();
        assert!((res.cov() - DMatrix::identity(8, 8)).norm() < 1e-12);
        let res = asymmetric_resource(0.8, &[0.5, 0.05, 0.125, 0.1]).unwrap();
        assert_relative_eq!(res.purity(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn bassett_hound_structure() {
        // N = 2, τ = (1/3, 1/2): pure, and symmetric under exchanging the
        // second receiver with the sender mode (up to the local phase
        // normalization of the receiver ports)
        let res = asymmetric_resource(0.5, &[1.0 / 3.0, 0.5]).unwrap();
        assert_relative_eq!(res.purity(), 1.0, epsilon = 1e-9);
        let c = res.cov();
        assert_relative_eq!(c[(2, 2)], c[(4, 4)], epsilon = 1e-12);
        assert_relative_eq!(c[(0, 2)].abs(), c[(0, 4)].abs(), epsilon = 1e-12);
        assert_relative_eq!(c[(3, 3)], c[(5, 5)], epsilon = 1e-12);
    }

    #[test]
    fn parse_round_trips() {
        for text in ["tmsv", "ps:1,1", "pa:1,0", "asym:0.5,0.05,0.125,0.1"] {
            let fam = ResourceFamily::parse(text).unwrap();
            assert_eq!(fam.label(), text);
        }
        assert!(ResourceFamily::parse("ps:0,0").is_err());
        assert!(ResourceFamily::parse("asym:1.2").is_err());
        assert!(ResourceFamily::parse("bogus").is_err());

        assert_eq!(
            InputSpec::parse("coherent:1.5,-0.5").unwrap(),
            InputSpec::coherent(1.5, -0.5)
        );
        assert_eq!(
            InputSpec::parse("squeezed:0.5").unwrap(),
            InputSpec::squeezed(0.5, 0.0, 0.0)
        );
        let p_axis = InputSpec::parse("squeezed:0.5,p").unwrap();
        assert!(matches!(
            p_axis,
            InputSpec::Squeezed {
                axis: SqueezeAxis::P,
                ..
            }
        ));
        assert!(InputSpec::parse("squeezed:-0.1").is_err());
    }
}

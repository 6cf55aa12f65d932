//! The telecloning pipelines: network mode algebra, the Gaussian covariance
//! path, and the exact Wigner path for non-Gaussian resources.
//!
//! Both protocols run at unit gain, where the homodyne-plus-displacement
//! step is a deterministic affine map on phase space: the output clone
//! quadratures are fixed linear forms over (input, sender arm, receiver arm,
//! ancillae), and the unconditional clone state is the input convolved with
//! the network's excess-noise distribution.

use nalgebra::{DMatrix, DVector};

use crate::measures::{self, QReport};
use crate::phase_space::{gaussian_overlap, GaussianState};
use crate::states::{self, InputSpec, ResourceFamily, ResourceSpec};
use crate::wigner::PolyGaussian;
use crate::{asymmetric, Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Whether the sender keeps an anticlone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Irreversible,
    Reversible,
}

impl Variant {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "irreversible" | "irr" => Ok(Variant::Irreversible),
            "reversible" | "rev" => Ok(Variant::Reversible),
            other => Err(Error::Parse(format!("unknown protocol variant `{other}`"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Variant::Irreversible => "irreversible",
            Variant::Reversible => "reversible",
        }
    }
}

/// Which telecloning run to perform: variant, clone count, ancilla squeezing.
/// Gain is fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSpec {
    pub variant: Variant,
    pub clones: usize,
    pub epsilon: f64,
}

impl ProtocolSpec {
    pub fn new(variant: Variant, clones: usize, epsilon: f64) -> Result<Self> {
        if clones < 2 {
            return Err(Error::InvalidArgument("need at least two clones".into()));
        }
        if epsilon < 0.0 || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ancilla squeezing {epsilon} must be ≥ 0"
            )));
        }
        Ok(Self {
            variant,
            clones,
            epsilon,
        })
    }

    fn reversible(&self) -> bool {
        self.variant == Variant::Reversible
    }
}

/// Per-clone results of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneReport {
    pub fidelities: Vec<f64>,
    /// `(Δ²x_C, Δ²p_C)` per clone.
    pub variances: Vec<(f64, f64)>,
    pub q: Vec<QReport>,
    /// Reversible runs only.
    pub anticlone_fidelity: Option<f64>,
    /// Non-Gaussian resources only.
    pub herald_weight: Option<f64>,
}

/// Linear mode definitions of the network. Coefficient vectors run over the
/// network modes `(S, R, v_1..v_{M-1}[, vS])`; output forms over the extended
/// basis `(in, S, R, v_1..v_{M-1}[, vS])`.
#[derive(Debug, Clone)]
pub struct NetworkModes {
    /// Network modes excluding the input.
    pub network_modes: usize,
    /// Homodyne mode combination.
    pub h: Vec<f64>,
    /// Pre-displacement clone combinations.
    pub clones: Vec<Vec<f64>>,
    /// Pre-displacement anticlone branch (reversible only).
    pub anticlone_branch: Option<Vec<f64>>,
    /// Unit-gain output forms, x quadrature, one per clone.
    pub out_x: Vec<Vec<f64>>,
    /// Unit-gain output forms, p quadrature.
    pub out_p: Vec<Vec<f64>>,
    /// Anticlone output forms (x, p).
    pub anticlone_out: Option<(Vec<f64>, Vec<f64>)>,
}

/// Builds the mode algebra for a protocol run. The receiver arm is split by
/// a fixed left-deep balanced tree: at step `k` the carrier meets vacuum
/// `v_k` on a splitter of transmissivity `(M-k)/(M-k+1)`, so every clone
/// carries `R/√M`; clone 1 is the final through port, later indices the
/// peeled ports in reverse order (for `M = 2`: `C_{1,2} = (R ± vR)/√2`).
pub fn network_modes(p: &ProtocolSpec) -> NetworkModes {
    let m = p.clones;
    let rev = p.reversible();
    // network modes: S, R, v_1..v_{M-1}, then vS for the reversible variant
    let n_modes = 1 + m + if rev { 1 } else { 0 };
    let idx_s = 0usize;
    let idx_r = 1usize;
    let idx_v = |k: usize| 1 + k; // v_k, k = 1..M-1
    let idx_vs = n_modes - 1;

    let mut carrier = vec![0.0; n_modes];
    carrier[idx_r] = 1.0;
    let mut peels: Vec<Vec<f64>> = Vec::new();
    for k in 1..m {
        let tau = (m - k) as f64 / (m - k + 1) as f64;
        let (t, u) = (tau.sqrt(), (1.0 - tau).sqrt());
        let mut peel = vec![0.0; n_modes];
        let mut next = vec![0.0; n_modes];
        for i in 0..n_modes {
            peel[i] = u * carrier[i];
            next[i] = t * carrier[i];
        }
        peel[idx_v(k)] -= t;
        next[idx_v(k)] += u;
        peels.push(peel);
        carrier = next;
    }
    let mut clones = vec![carrier];
    clones.extend(peels.into_iter().rev());

    let mut h = vec![0.0; n_modes];
    if rev {
        h[idx_s] = 1.0 / SQRT2;
        h[idx_vs] = 1.0 / SQRT2;
    } else {
        h[idx_s] = 1.0;
    }
    let anticlone_branch = rev.then(|| {
        let mut b = vec![0.0; n_modes];
        b[idx_s] = 1.0 / SQRT2;
        b[idx_vs] = -1.0 / SQRT2;
        b
    });

    // output forms: clone combination plus the displaced homodyne record
    let ext = n_modes + 1; // input prepended
    let mut out_x = Vec::with_capacity(m);
    let mut out_p = Vec::with_capacity(m);
    for clone in &clones {
        let mut x = vec![0.0; ext];
        let mut pq = vec![0.0; ext];
        x[0] = 1.0;
        pq[0] = 1.0;
        for (i, &c) in clone.iter().enumerate() {
            x[1 + i] += c;
            pq[1 + i] += c;
        }
        if rev {
            x[1 + idx_s] -= 1.0 / SQRT2;
            x[1 + idx_vs] -= 1.0 / SQRT2;
            pq[1 + idx_s] += 1.0 / SQRT2;
            pq[1 + idx_vs] += 1.0 / SQRT2;
        } else {
            x[1 + idx_s] -= 1.0;
            pq[1 + idx_s] += 1.0;
        }
        out_x.push(x);
        out_p.push(pq);
    }
    let anticlone_out = rev.then(|| {
        let mut x = vec![0.0; ext];
        let mut pq = vec![0.0; ext];
        x[0] = 1.0;
        x[1 + idx_vs] = -SQRT2;
        pq[0] = -1.0;
        pq[1 + idx_vs] = -SQRT2;
        (x, pq)
    });

    NetworkModes {
        network_modes: n_modes,
        h,
        clones,
        anticlone_branch,
        out_x,
        out_p,
        anticlone_out,
    }
}

/// Covariance of the protocol ancillae appended after the two resource
/// modes: the tree vacua and, for the reversible variant, the sender-side
/// vacuum — all squeezed by ε along x.
fn ancilla_states(p: &ProtocolSpec) -> Vec<GaussianState> {
    let mut out = Vec::new();
    for _ in 1..p.clones {
        out.push(GaussianState::squeezed_vacuum(p.epsilon));
    }
    if p.reversible() {
        out.push(GaussianState::squeezed_vacuum(p.epsilon));
    }
    out
}

/// Full network covariance (resource block followed by ancilla blocks).
fn network_cov(resource_cov: &DMatrix<f64>, p: &ProtocolSpec) -> DMatrix<f64> {
    let net = network_modes(p);
    let dim = 2 * net.network_modes;
    let mut cov = DMatrix::zeros(dim, dim);
    cov.view_mut((0, 0), (4, 4)).copy_from(resource_cov);
    for (k, anc) in ancilla_states(p).iter().enumerate() {
        cov.view_mut((4 + 2 * k, 4 + 2 * k), (2, 2)).copy_from(anc.cov());
    }
    cov
}

fn variance_of_form(cov: &DMatrix<f64>, coeffs: &[f64], quadrature: usize) -> f64 {
    let modes = cov.nrows() / 2;
    let mut v = DVector::zeros(2 * modes);
    for m in 0..modes {
        v[2 * m + quadrature] = coeffs[m];
    }
    (cov * &v).dot(&v)
}

/// Clone quadrature variances for a two-mode Gaussian resource.
pub fn clone_moments_gaussian(
    resource: &GaussianState,
    input: &InputSpec,
    p: &ProtocolSpec,
) -> Result<(f64, f64)> {
    if resource.num_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: resource.num_modes(),
        });
    }
    let net = network_modes(p);
    let in_cov = input.to_gaussian();
    let full = network_cov(resource.cov(), p);
    // all clones have identical variances; use the first output form
    let x_net = &net.out_x[0][1..];
    let p_net = &net.out_p[0][1..];
    let var_x = in_cov.cov()[(0, 0)] + variance_of_form(&full, x_net, 0);
    let var_p = in_cov.cov()[(1, 1)] + variance_of_form(&full, p_net, 1);
    Ok((var_x, var_p))
}

fn report_from_forms(
    resource_cov: &DMatrix<f64>,
    input: &InputSpec,
    p: &ProtocolSpec,
) -> Result<CloneReport> {
    let net = network_modes(p);
    let in_state = input.to_gaussian();
    let full = network_cov(resource_cov, p);
    let mut fidelities = Vec::with_capacity(p.clones);
    let mut variances = Vec::with_capacity(p.clones);
    let mut qs = Vec::with_capacity(p.clones);
    for j in 0..p.clones {
        let var_x = in_state.cov()[(0, 0)] + variance_of_form(&full, &net.out_x[j][1..], 0);
        let var_p = in_state.cov()[(1, 1)] + variance_of_form(&full, &net.out_p[j][1..], 1);
        let clone_state = GaussianState::new(
            in_state.mean().clone(),
            DMatrix::from_diagonal(&DVector::from_vec(vec![var_x, var_p])),
        )?;
        fidelities.push(gaussian_overlap(&in_state, &clone_state)?);
        variances.push((var_x, var_p));
        qs.push(measures::q_measure(&full, &net.h, &net.clones[j], input)?);
    }
    let anticlone = p
        .reversible()
        .then(|| anticlone_fidelity(input, p))
        .transpose()?;
    Ok(CloneReport {
        fidelities,
        variances,
        q: qs,
        anticlone_fidelity: anticlone,
        herald_weight: None,
    })
}

/// Gaussian-path clone report: fidelities via the overlap of the input with
/// the Gaussian clone state of matching mean and the protocol's variances.
pub fn fidelity_gaussian(
    resource: &GaussianState,
    input: &InputSpec,
    p: &ProtocolSpec,
) -> Result<CloneReport> {
    if resource.num_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: resource.num_modes(),
        });
    }
    report_from_forms(resource.cov(), input, p)
}

/// Anticlone fidelity against the phase-conjugated input; contains no
/// resource quadratures, hence resource-independent (1/2 for coherent inputs
/// at ε = 0).
pub fn anticlone_fidelity(input: &InputSpec, p: &ProtocolSpec) -> Result<f64> {
    if !p.reversible() {
        return Err(Error::InvalidArgument(
            "anticlone exists only in the reversible variant".into(),
        ));
    }
    let conj = input.conjugate().to_gaussian();
    let vs = GaussianState::squeezed_vacuum(p.epsilon);
    let var_x = conj.cov()[(0, 0)] + 2.0 * vs.cov()[(0, 0)];
    let var_p = conj.cov()[(1, 1)] + 2.0 * vs.cov()[(1, 1)];
    let anticlone = GaussianState::new(
        conj.mean().clone(),
        DMatrix::from_diagonal(&DVector::from_vec(vec![var_x, var_p])),
    )?;
    gaussian_overlap(&conj, &anticlone)
}

/// Exact Wigner-path clone report for an arbitrary two-mode resource
/// distribution: tensors input ⊗ resource ⊗ ancillae, pushes the total
/// forward through each clone's affine output form, and overlaps with the
/// input. Reduces to [`fidelity_gaussian`] when the resource polynomial is 1.
pub fn teleclone_wigner(
    resource: &PolyGaussian,
    input: &InputSpec,
    p: &ProtocolSpec,
) -> Result<CloneReport> {
    if resource.num_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: resource.num_modes(),
        });
    }
    let net = network_modes(p);
    let in_state = input.to_gaussian();
    let in_lifted = PolyGaussian::lift_gaussian(&in_state);
    let mut total = in_lifted.tensor(resource);
    for anc in ancilla_states(p) {
        total = total.tensor(&PolyGaussian::lift_gaussian(&anc));
    }
    let dim = 2 * (net.network_modes + 1);

    let rows_for = |xc: &[f64], pc: &[f64]| {
        let mut a = DMatrix::zeros(2, dim);
        for (m, (&cx, &cp)) in xc.iter().zip(pc).enumerate() {
            a[(0, 2 * m)] = cx;
            a[(1, 2 * m + 1)] = cp;
        }
        a
    };

    let mut fidelities = Vec::with_capacity(p.clones);
    let mut variances = Vec::with_capacity(p.clones);
    for j in 0..p.clones {
        let a = rows_for(&net.out_x[j], &net.out_p[j]);
        let clone_w = total.linear_pushforward(&a, &DVector::zeros(2))?;
        fidelities.push(clone_w.overlap(&in_lifted)?);
        let (_, cov) = clone_w.second_moments();
        variances.push((cov[(0, 0)], cov[(1, 1)]));
    }

    let anticlone = if let Some((ax, ap)) = &net.anticlone_out {
        let a = rows_for(ax, ap);
        let ac_w = total.linear_pushforward(&a, &DVector::zeros(2))?;
        let conj = PolyGaussian::lift_gaussian(&input.conjugate().to_gaussian());
        Some(ac_w.overlap(&conj)?)
    } else {
        None
    };

    let (_, resource_moments) = resource.second_moments();
    let full = network_cov(&resource_moments, p);
    let qs: Result<Vec<QReport>> = (0..p.clones)
        .map(|j| measures::q_measure(&full, &net.h, &net.clones[j], input))
        .collect();

    Ok(CloneReport {
        fidelities,
        variances,
        q: qs?,
        anticlone_fidelity: anticlone,
        herald_weight: None,
    })
}

/// Runs the appropriate pipeline for the resource family.
pub fn run_protocol(
    resource: &ResourceSpec,
    input: &InputSpec,
    p: &ProtocolSpec,
) -> Result<CloneReport> {
    match &resource.family {
        ResourceFamily::Tmsv => fidelity_gaussian(&states::tmsv(resource.r), input, p),
        ResourceFamily::PhotonSubtracted(..) | ResourceFamily::PhotonAdded(..) => {
            let (w, herald) = states::degaussify(resource)?;
            let mut report = teleclone_wigner(&w, input, p)?;
            report.herald_weight = Some(herald);
            Ok(report)
        }
        ResourceFamily::Asymmetric(taus) => {
            asymmetric::report(resource.r, taus, p.variant, input, false)
        }
    }
}

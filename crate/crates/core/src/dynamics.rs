//! Learning dynamics for the common-interest game.
//!
//! Continuous time: the `lin-QREP_q` family is the gradient flow of the
//! utility under the quantum q-Shahshahani metric
//! `<A, B>_rho = Tr(rho^{-q/2} A rho^{-q/2} B)`; `q = 0` is the Euclidean
//! projected gradient, `q = 1` the quantum replicator flow, `q = 2` the
//! intrinsic Riemannian metric.
//!
//! Discrete time: `lin-MMWU` alternates
//! `rho' = rho^{1/2} Phi(sigma) rho^{1/2} / <rho, Phi(sigma)>` and
//! `sigma' = sigma^{1/2} Phi^dagger(rho') sigma^{1/2} / <rho', Phi(sigma)>`
//! (note the already-updated `rho'` in the second denominator). The utility
//! is non-decreasing along both, and the two dynamics share their fixed
//! points. `exp-MMWU` (matrix-exponential weights) is carried as a
//! comparison baseline only.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::bloch::bloch_vector;
use crate::eigh::{clipped_powers, eigh, hermitian_function, psd_power};
use crate::error::{CoreError, Result};
use crate::game::GameOperator;
use crate::hermitian::{
    DensityMatrix, HermitianMatrix, hs_inner, profile_distance, project_to_density, sandwich,
};
use crate::rand_util;

/// Which update rule a run iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DynamicKind {
    #[cfg_attr(feature = "serde", serde(rename = "lin-qrep-q"))]
    LinQrepQ,
    #[cfg_attr(feature = "serde", serde(rename = "lin-mmwu"))]
    LinMmwu,
    #[cfg_attr(feature = "serde", serde(rename = "exp-mmwu"))]
    ExpMmwu,
}

impl DynamicKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DynamicKind::LinQrepQ => "lin-qrep-q",
            DynamicKind::LinMmwu => "lin-mmwu",
            DynamicKind::ExpMmwu => "exp-mmwu",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lin-qrep-q" => Some(DynamicKind::LinQrepQ),
            "lin-mmwu" => Some(DynamicKind::LinMmwu),
            "exp-mmwu" => Some(DynamicKind::ExpMmwu),
            _ => None,
        }
    }
}

/// Run parameters. Convergence is declared when the window-sized moving
/// average of the utility changes by less than `conv_tol` for `stall_iters`
/// consecutive iterations, or when the fixed-point residual drops below
/// `conv_tol`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct DynamicsConfig {
    pub kind: DynamicKind,
    /// Metric parameter of the `lin-QREP_q` flow.
    pub q: f64,
    /// Integrator step for the continuous flow.
    pub step_size: f64,
    /// Learning rate of the `exp-MMWU` baseline.
    pub eta: f64,
    pub max_iters: usize,
    /// Moving-average window.
    pub window: usize,
    pub conv_tol: f64,
    /// Consecutive stable moving averages required before stopping.
    pub stall_iters: usize,
    pub seed: u64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            kind: DynamicKind::LinMmwu,
            q: 1.0,
            step_size: 0.01,
            eta: 0.1,
            max_iters: 10_000,
            window: 5,
            conv_tol: 1e-7,
            stall_iters: 10,
            seed: 0,
        }
    }
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(CoreError::InvalidInput {
                reason: "window must be >= 2",
            });
        }
        if self.max_iters < self.window {
            return Err(CoreError::InvalidInput {
                reason: "max_iters must be >= window",
            });
        }
        if !(self.step_size > 0.0) {
            return Err(CoreError::InvalidInput {
                reason: "step_size must be > 0",
            });
        }
        if !(self.eta > 0.0) {
            return Err(CoreError::InvalidInput {
                reason: "eta must be > 0",
            });
        }
        if !(self.conv_tol > 0.0) {
            return Err(CoreError::InvalidInput {
                reason: "conv_tol must be > 0",
            });
        }
        if self.stall_iters < 1 {
            return Err(CoreError::InvalidInput {
                reason: "stall_iters must be >= 1",
            });
        }
        Ok(())
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub step: usize,
    /// ODE time for the continuous flow, iteration index for discrete kinds.
    pub time: f64,
    pub utility: f64,
    pub exploitability: f64,
    pub fixed_point_residual: f64,
    pub min_eig_rho: f64,
    pub min_eig_sigma: f64,
    /// Present when the corresponding player has dimension 2.
    pub bloch_rho: Option<[f64; 3]>,
    pub bloch_sigma: Option<[f64; 3]>,
    /// Frobenius distance of this step's profile to the run's last iterate;
    /// filled in a post-pass once the final iterate is known.
    pub frobenius_to_final: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    MovingAverageStall,
    ResidualBelowTol,
    MaxIters,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::MovingAverageStall => "moving-average-stall",
            TerminationReason::ResidualBelowTol => "residual-below-tol",
            TerminationReason::MaxIters => "max-iters",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_utility: f64,
    pub final_exploitability: f64,
    pub final_residual: f64,
    pub termination_reason: TerminationReason,
}

/// A completed run: per-step diagnostics, the convergence report, and the
/// final strategy profile.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Vec<TrajectoryRecord>,
    pub report: ConvergenceReport,
    pub final_state: (DensityMatrix, DensityMatrix),
}

/// A step error aborts the run; the trajectory up to the failing step is
/// returned alongside the error.
#[derive(Debug)]
pub struct RunFailure {
    pub error: CoreError,
    pub partial_trajectory: Vec<TrajectoryRecord>,
}

/// Tolerance below which a strictly-positive-state requirement fails.
const SINGULAR_TOL: f64 = 1e-8;

/// One side of the `lin-QREP_q` vector field:
/// `state^{q/2} [payoff - (Tr(state^q payoff) / Tr(state^q)) I] state^{q/2}`.
fn qrep_side(payoff: &HermitianMatrix, state: &HermitianMatrix, q: f64) -> Result<HermitianMatrix> {
    let decomp = eigh(state)?;
    if q < 0.0 && decomp.eigenvalues[0] <= SINGULAR_TOL {
        return Err(CoreError::SingularState {
            min_eigenvalue: decomp.eigenvalues[0],
        });
    }
    let half_powers = clipped_powers(&decomp.eigenvalues, q / 2.0)?;
    let full_powers = clipped_powers(&decomp.eigenvalues, q)?;
    let tr_q: f64 = full_powers.iter().sum();
    let state_q = decomp.recompose(&full_powers);
    let centring = hs_inner(&state_q, payoff)? / tr_q;
    let half = decomp.recompose(&half_powers);
    sandwich(&half, &payoff.sub_scaled_identity(centring))
}

fn qrep_field_raw(
    g: &GameOperator,
    rho: &HermitianMatrix,
    sigma: &HermitianMatrix,
    q: f64,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let drho = qrep_side(&g.phi(sigma)?, rho, q)?;
    let dsigma = qrep_side(&g.phi_adjoint(rho)?, sigma, q)?;
    Ok((drho, dsigma))
}

/// The `lin-QREP_q` vector field at a strategy profile. Both components are
/// traceless; both vanish at interior Nash equilibria.
pub fn qrep_field(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    q: f64,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    qrep_field_raw(g, rho.as_matrix(), sigma.as_matrix(), q)
}

/// Quantum q-Shahshahani inner product
/// `Tr(rho^{-q/2} a rho^{-q/2} b)`; the Riemannian metric the gradient flow
/// is defined against. Requires a strictly positive base point unless
/// `q = 0` (the Euclidean case).
pub fn shah_inner(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    rho: &DensityMatrix,
    q: f64,
) -> Result<f64> {
    if a.dim() != rho.dim() || b.dim() != rho.dim() {
        return Err(CoreError::InvalidDimensions {
            expected: rho.dim(),
            got: if a.dim() != rho.dim() { a.dim() } else { b.dim() },
        });
    }
    if q == 0.0 {
        return hs_inner(a, b);
    }
    let decomp = eigh(rho.as_matrix())?;
    if decomp.eigenvalues[0] <= 1e-10 {
        return Err(CoreError::SingularState {
            min_eigenvalue: decomp.eigenvalues[0],
        });
    }
    let weights: Vec<f64> = decomp
        .eigenvalues
        .iter()
        .map(|&l| l.powf(-q / 2.0))
        .collect();
    let w = decomp.recompose(&weights);
    hs_inner(&sandwich(&w, a)?, b)
}

/// One classical fixed-step RK4 step of the coupled flow, projected back to
/// the density manifold afterwards.
pub fn rk4_step(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    q: f64,
    h: f64,
) -> Result<(DensityMatrix, DensityMatrix)> {
    if !(h > 0.0) {
        return Err(CoreError::InvalidInput {
            reason: "step size must be > 0",
        });
    }
    let (r0, s0) = (rho.as_matrix(), sigma.as_matrix());
    let k1 = qrep_field_raw(g, r0, s0, q)?;
    let k2 = qrep_field_raw(
        g,
        &r0.add_scaled(0.5 * h, &k1.0)?,
        &s0.add_scaled(0.5 * h, &k1.1)?,
        q,
    )?;
    let k3 = qrep_field_raw(
        g,
        &r0.add_scaled(0.5 * h, &k2.0)?,
        &s0.add_scaled(0.5 * h, &k2.1)?,
        q,
    )?;
    let k4 = qrep_field_raw(g, &r0.add_scaled(h, &k3.0)?, &s0.add_scaled(h, &k3.1)?, q)?;

    let sixth = h / 6.0;
    let combine = |x0: &HermitianMatrix,
                   a: &HermitianMatrix,
                   b: &HermitianMatrix,
                   c: &HermitianMatrix,
                   d: &HermitianMatrix|
     -> Result<HermitianMatrix> {
        x0.add_scaled(sixth, a)?
            .add_scaled(2.0 * sixth, b)?
            .add_scaled(2.0 * sixth, c)?
            .add_scaled(sixth, d)
    };
    let rho_new = combine(r0, &k1.0, &k2.0, &k3.0, &k4.0)?;
    let sigma_new = combine(s0, &k1.1, &k2.1, &k3.1, &k4.1)?;
    Ok((
        project_to_density(&rho_new)?,
        project_to_density(&sigma_new)?,
    ))
}

const DEGENERATE_UTILITY_TOL: f64 = 1e-14;

/// The rho half-step of `lin-MMWU`:
/// `rho^{1/2} Phi(sigma) rho^{1/2} / <rho, Phi(sigma)>`.
pub fn mmwu_update_rho(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<DensityMatrix> {
    require_pd(g)?;
    let payoff = g.phi(sigma.as_matrix())?;
    let denom = hs_inner(rho.as_matrix(), &payoff)?;
    if denom <= DEGENERATE_UTILITY_TOL {
        return Err(CoreError::DegenerateUtility { value: denom });
    }
    let half = psd_power(rho.as_matrix(), 0.5)?;
    DensityMatrix::new(sandwich(&half, &payoff)?.scaled(1.0 / denom))
}

/// The sigma half-step of `lin-MMWU` against a (possibly just updated) rho:
/// `sigma^{1/2} Phi^dagger(rho) sigma^{1/2} / <rho, Phi(sigma)>`.
pub fn mmwu_update_sigma(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<DensityMatrix> {
    require_pd(g)?;
    let payoff = g.phi_adjoint(rho.as_matrix())?;
    // <rho, Phi(sigma)> = <Phi^dagger(rho), sigma>, evaluated on the B side.
    let denom = hs_inner(&payoff, sigma.as_matrix())?;
    if denom <= DEGENERATE_UTILITY_TOL {
        return Err(CoreError::DegenerateUtility { value: denom });
    }
    let half = psd_power(sigma.as_matrix(), 0.5)?;
    DensityMatrix::new(sandwich(&half, &payoff)?.scaled(1.0 / denom))
}

/// One full alternating `lin-MMWU` iteration: rho first, then sigma against
/// the already-updated rho.
pub fn mmwu_step(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let rho_new = mmwu_update_rho(g, rho, sigma)?;
    let sigma_new = mmwu_update_sigma(g, &rho_new, sigma)?;
    Ok((rho_new, sigma_new))
}

// The multiplicative update needs Phi positive (so R at least PSD) and a
// positive denominator. Genuinely indefinite operators are rejected here;
// PSD-but-singular ones (e.g. diagonal embeddings of payoff matrices with a
// zero entry) are allowed and rely on the degenerate-utility guard instead.
fn require_pd(g: &GameOperator) -> Result<()> {
    if g.lambda_min() < -crate::game::PD_TOL {
        return Err(CoreError::RequiresPdGame {
            min_eigenvalue: g.lambda_min(),
        });
    }
    Ok(())
}

/// Eigenvalues of a state are floored here before taking logs; exp-MMWU
/// preserves the kernel, and the floor keeps the arithmetic finite without
/// moving the state off its face.
const LOG_FLOOR: f64 = 1e-300;

fn exp_mmwu_side(
    payoff: &HermitianMatrix,
    state: &HermitianMatrix,
    eta: f64,
) -> Result<DensityMatrix> {
    let log_state = hermitian_function(state, |l| l.max(LOG_FLOOR).ln())?;
    let exponent = log_state.add_scaled(eta, payoff)?;
    let decomp = eigh(&exponent)?;
    let top = decomp.eigenvalues[exponent.dim() - 1];
    let weights: Vec<f64> = decomp.eigenvalues.iter().map(|&l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let normalized: Vec<f64> = weights.iter().map(|w| w / total).collect();
    Ok(DensityMatrix::new_unchecked(decomp.recompose(&normalized)))
}

/// One alternating exp-MMWU (matrix multiplicative weights) iteration:
/// `rho' = exp(log rho + eta Phi(sigma))`, normalized to unit trace, then the
/// symmetric sigma update against `rho'`.
pub fn exp_mmwu_step(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    eta: f64,
) -> Result<(DensityMatrix, DensityMatrix)> {
    if !(eta > 0.0) {
        return Err(CoreError::InvalidInput {
            reason: "eta must be > 0",
        });
    }
    let rho_new = exp_mmwu_side(&g.phi(sigma.as_matrix())?, rho.as_matrix(), eta)?;
    let sigma_new = exp_mmwu_side(&g.phi_adjoint(rho_new.as_matrix())?, sigma.as_matrix(), eta)?;
    Ok((rho_new, sigma_new))
}

/// `||rho^{1/2} (Phi(sigma) - u I) rho^{1/2}||_F +
///  ||sigma^{1/2} (Phi^dagger(rho) - u I) sigma^{1/2}||_F` with `u` the
/// utility; simultaneously the `lin-QREP` (q = 1) field norm and the
/// `lin-MMWU` displacement scale, so it vanishes exactly on the shared fixed
/// points of both dynamics.
pub fn fixed_point_residual(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<f64> {
    let payoff_a = g.phi(sigma.as_matrix())?;
    let payoff_b = g.phi_adjoint(rho.as_matrix())?;
    let u = hs_inner(rho.as_matrix(), &payoff_a)?;
    let half_rho = psd_power(rho.as_matrix(), 0.5)?;
    let half_sigma = psd_power(sigma.as_matrix(), 0.5)?;
    let term_a = sandwich(&half_rho, &payoff_a.sub_scaled_identity(u))?.frobenius_norm();
    let term_b = sandwich(&half_sigma, &payoff_b.sub_scaled_identity(u))?.frobenius_norm();
    Ok(term_a + term_b)
}

fn make_record(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    step: usize,
    kind: DynamicKind,
    h: f64,
) -> Result<TrajectoryRecord> {
    let time = match kind {
        DynamicKind::LinQrepQ => step as f64 * h,
        _ => step as f64,
    };
    Ok(TrajectoryRecord {
        step,
        time,
        utility: g.utility(rho, sigma)?,
        exploitability: g.exploitability(rho, sigma)?,
        fixed_point_residual: fixed_point_residual(g, rho, sigma)?,
        min_eig_rho: rho.min_eigenvalue(),
        min_eig_sigma: sigma.min_eigenvalue(),
        bloch_rho: (rho.dim() == 2).then(|| bloch_vector(rho.as_matrix()).expect("dim checked")),
        bloch_sigma: (sigma.dim() == 2)
            .then(|| bloch_vector(sigma.as_matrix()).expect("dim checked")),
        frobenius_to_final: None,
    })
}

/// Iterates the configured dynamic from an initial profile, recording
/// diagnostics per step. Stops on (a) a stalled moving average of the
/// utility, (b) a fixed-point residual below `conv_tol`, or (c) `max_iters`.
/// The `frobenius_to_final` column is filled in a post-pass against the last
/// iterate.
pub fn run(
    g: &GameOperator,
    rho0: &DensityMatrix,
    sigma0: &DensityMatrix,
    config: &DynamicsConfig,
) -> core::result::Result<RunOutput, RunFailure> {
    let fail_empty = |error: CoreError| RunFailure {
        error,
        partial_trajectory: Vec::new(),
    };
    config.validate().map_err(fail_empty)?;
    if config.kind == DynamicKind::LinQrepQ && config.step_size * g.lambda_max() > 0.5 {
        return Err(fail_empty(CoreError::InvalidInput {
            reason: "stability guard: step_size * lambda_max(R) must be <= 0.5",
        }));
    }

    let mut rho = rho0.clone();
    let mut sigma = sigma0.clone();
    let mut records = Vec::new();
    let mut states = vec![(rho.clone(), sigma.clone())];
    let mut utilities = Vec::new();

    let first = make_record(g, &rho, &sigma, 0, config.kind, config.step_size)
        .map_err(fail_empty)?;
    utilities.push(first.utility);
    let mut residual = first.fixed_point_residual;
    records.push(first);

    let mut reason = TerminationReason::MaxIters;
    let mut iterations = config.max_iters;
    if residual < config.conv_tol {
        reason = TerminationReason::ResidualBelowTol;
        iterations = 0;
    } else {
        let mut prev_ma: Option<f64> = None;
        let mut stall = 0usize;
        for k in 1..=config.max_iters {
            let stepped = match config.kind {
                DynamicKind::LinQrepQ => rk4_step(g, &rho, &sigma, config.q, config.step_size),
                DynamicKind::LinMmwu => mmwu_step(g, &rho, &sigma),
                DynamicKind::ExpMmwu => exp_mmwu_step(g, &rho, &sigma, config.eta),
            };
            let (r, s) = stepped.map_err(|error| RunFailure {
                error: error.clone(),
                partial_trajectory: records.clone(),
            })?;
            rho = r;
            sigma = s;
            states.push((rho.clone(), sigma.clone()));
            let rec = make_record(g, &rho, &sigma, k, config.kind, config.step_size).map_err(
                |error| RunFailure {
                    error: error.clone(),
                    partial_trajectory: records.clone(),
                },
            )?;
            utilities.push(rec.utility);
            residual = rec.fixed_point_residual;
            records.push(rec);

            if residual < config.conv_tol {
                reason = TerminationReason::ResidualBelowTol;
                iterations = k;
                break;
            }
            if utilities.len() >= config.window {
                let ma: f64 = utilities[utilities.len() - config.window..]
                    .iter()
                    .sum::<f64>()
                    / config.window as f64;
                if let Some(prev) = prev_ma {
                    if (ma - prev).abs() < config.conv_tol {
                        stall += 1;
                    } else {
                        stall = 0;
                    }
                }
                prev_ma = Some(ma);
                if stall >= config.stall_iters {
                    reason = TerminationReason::MovingAverageStall;
                    iterations = k;
                    break;
                }
            }
        }
    }

    let last = states.last().expect("at least the initial state").clone();
    for (rec, state) in records.iter_mut().zip(&states) {
        rec.frobenius_to_final = Some(
            profile_distance(state, &last).expect("dimensions fixed within a run"),
        );
    }

    let final_rec = records.last().expect("at least one record");
    let report = ConvergenceReport {
        converged: reason != TerminationReason::MaxIters,
        iterations,
        final_utility: final_rec.utility,
        final_exploitability: final_rec.exploitability,
        final_residual: final_rec.fixed_point_residual,
        termination_reason: reason,
    };
    Ok(RunOutput {
        trajectory: records,
        report,
        final_state: last,
    })
}

/// Verifies the defining Riesz identity of the gradient flow: the central
/// finite difference of the utility along random traceless tangents must
/// match `<field, tangent>` in the q-Shahshahani metric. Returns the worst
/// relative error over `n_directions` product tangents.
pub fn metric_gradient_check(
    g: &GameOperator,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    q: f64,
    n_directions: usize,
    seed: u64,
) -> Result<f64> {
    const FD_STEP: f64 = 1e-5;
    let min_rho = rho.min_eigenvalue();
    let min_sigma = sigma.min_eigenvalue();
    if min_rho <= 1e-6 || min_sigma <= 1e-6 {
        return Err(CoreError::SingularState {
            min_eigenvalue: min_rho.min(min_sigma),
        });
    }
    let field = qrep_field(g, rho, sigma, q)?;
    let mut rng = rand_util::seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..n_directions {
        let xi_a = rand_util::traceless_tangent(g.n(), &mut rng);
        let xi_b = rand_util::traceless_tangent(g.m(), &mut rng);
        let eval = |t: f64| -> Result<f64> {
            let r = rho.as_matrix().add_scaled(t, &xi_a)?;
            let s = sigma.as_matrix().add_scaled(t, &xi_b)?;
            hs_inner(&r, &g.phi(&s)?)
        };
        let fd = (eval(FD_STEP)? - eval(-FD_STEP)?) / (2.0 * FD_STEP);
        let metric =
            shah_inner(&field.0, &xi_a, rho, q)? + shah_inner(&field.1, &xi_b, sigma, q)?;
        worst = worst.max((fd - metric).abs() / (1.0 + fd.abs()));
    }
    Ok(worst)
}

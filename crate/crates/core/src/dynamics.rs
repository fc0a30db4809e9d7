//! Time propagation of the quantum state and checks of the operator
//! equations of motion.
//!
//! The propagator is a classical fourth-order Runge-Kutta scheme on
//! d psi / dt = -i H(t) psi with the Hamiltonian assembled at sub-step
//! times. The state is never silently renormalized: the raw norm is
//! recorded at every sample, observables are evaluated on a normalized
//! copy, and a norm drift beyond the configured tolerance aborts the run
//! as a time-step diagnostic.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    assemble, coefficients_at, hamiltonian_at, HamiltonianKind, ModelParams, Schedule,
};
use crate::operators::{build_operators, OperatorSet, QuantumState};

/// Fixed-step propagation window and sampling policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct PropagationConfig {
    pub t_start: f64,
    pub t_end: f64,
    /// Requested step; the actual step divides the window evenly and is
    /// reported in the record.
    pub dt: f64,
    /// Record every n-th step (the first and last samples are always kept).
    #[serde(default = "default_record_stride")]
    pub record_stride: usize,
    #[serde(default = "default_norm_tolerance")]
    pub norm_tolerance: f64,
    /// Subtract the instantaneous energy expectation from the Hamiltonian
    /// during stepping. This changes the state only by a global phase and
    /// leaves every recorded observable untouched, but removes the fast
    /// common phase that otherwise limits the step size for strongly biased
    /// wells. Off by default so that stepped states are phase-comparable
    /// with exact evolution.
    #[serde(default)]
    pub energy_shift: bool,
}

fn default_record_stride() -> usize {
    1
}

fn default_norm_tolerance() -> f64 {
    1e-9
}

impl PropagationConfig {
    pub fn new(t_start: f64, t_end: f64, dt: f64) -> Self {
        Self {
            t_start,
            t_end,
            dt,
            record_stride: 1,
            norm_tolerance: 1e-9,
            energy_shift: false,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_energy_shift(mut self, on: bool) -> Self {
        self.energy_shift = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > self.t_start) {
            return Err(Error::InvalidPropagationConfig(format!(
                "need t_end > t_start, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidPropagationConfig(format!(
                "need dt > 0, got {}",
                self.dt
            )));
        }
        if self.dt > self.t_end - self.t_start {
            return Err(Error::InvalidPropagationConfig(format!(
                "dt = {} exceeds the window length {}",
                self.dt,
                self.t_end - self.t_start
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidPropagationConfig(
                "record_stride must be at least 1".into(),
            ));
        }
        if !(self.norm_tolerance > 0.0) {
            return Err(Error::InvalidPropagationConfig(
                "norm_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps and the adjusted step that divides the window.
    pub(crate) fn steps(&self) -> (usize, f64) {
        let span = self.t_end - self.t_start;
        let n = ((span / self.dt).round() as usize).max(1);
        (n, span / n as f64)
    }
}

/// Observable trajectories sampled along a propagation.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub jx_mean: Vec<f64>,
    pub jy_mean: Vec<f64>,
    pub jz_mean: Vec<f64>,
    pub jz_variance: Vec<f64>,
    /// Raw state norm (drift diagnostic; 1 up to integrator error).
    pub norm: Vec<f64>,
    /// Energy expectation <H(t)>.
    pub energy: Vec<f64>,
    /// Step actually used after fitting an integer number of steps into
    /// the window.
    pub dt_actual: f64,
    /// Normalized final state, for fidelity-type metrics.
    #[serde(skip)]
    pub final_state: Option<QuantumState>,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Write as CSV with the fixed column set
    /// `t,jx,jy,jz,var_jz,norm,energy`.
    pub fn write_csv<W: std::io::Write + ?Sized>(
        &self,
        w: &mut W,
        precision: usize,
        hex_floats: bool,
    ) -> std::io::Result<()> {
        writeln!(w, "t,jx,jy,jz,var_jz,norm,energy")?;
        for k in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                format_float(self.times[k], precision, hex_floats),
                format_float(self.jx_mean[k], precision, hex_floats),
                format_float(self.jy_mean[k], precision, hex_floats),
                format_float(self.jz_mean[k], precision, hex_floats),
                format_float(self.jz_variance[k], precision, hex_floats),
                format_float(self.norm[k], precision, hex_floats),
                format_float(self.energy[k], precision, hex_floats),
            )?;
        }
        Ok(())
    }
}

/// Render a float with a fixed number of significant digits, or as raw IEEE
/// bits for byte-stable output across platforms.
pub fn format_float(v: f64, precision: usize, hex: bool) -> String {
    if hex {
        format!("0x{:016x}", v.to_bits())
    } else {
        format!("{:.*e}", precision.saturating_sub(1), v)
    }
}

struct Stepper<'a> {
    ops: &'a OperatorSet,
    params: &'a ModelParams,
    kind: HamiltonianKind,
    energy_shift: bool,
}

impl<'a> Stepper<'a> {
    fn hamiltonian(&self, t: f64) -> Result<DMatrix<Complex64>> {
        Ok(assemble(
            self.ops,
            &coefficients_at(self.params, t, self.kind)?,
        ))
    }

    /// One RK4 step of d psi/dt = -i (H(t) - c) psi using H at the three
    /// sub-step times (start, midpoint, end). The shift c is the energy
    /// expectation at the step start when enabled.
    fn rk4_step(
        &self,
        psi: &DVector<Complex64>,
        h_start: &DMatrix<Complex64>,
        h_mid: &DMatrix<Complex64>,
        h_end: &DMatrix<Complex64>,
        dt: f64,
    ) -> DVector<Complex64> {
        let minus_i = Complex64::new(0.0, -1.0);
        let hv = h_start * psi;
        let shift = if self.energy_shift {
            let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            psi.dotc(&hv).re / norm_sq
        } else {
            0.0
        };
        let finish = |mut hv: DVector<Complex64>, v: &DVector<Complex64>| {
            if shift != 0.0 {
                hv.axpy(Complex64::new(-shift, 0.0), v, Complex64::new(1.0, 0.0));
            }
            hv *= minus_i;
            hv
        };

        let half = Complex64::new(dt / 2.0, 0.0);
        let full = Complex64::new(dt, 0.0);
        let k1 = finish(hv, psi);
        let y2 = psi + &k1 * half;
        let k2 = finish(h_mid * &y2, &y2);
        let y3 = psi + &k2 * half;
        let k3 = finish(h_mid * &y3, &y3);
        let y4 = psi + &k3 * full;
        let k4 = finish(h_end * &y4, &y4);

        let sixth = Complex64::new(dt / 6.0, 0.0);
        let third = Complex64::new(dt / 3.0, 0.0);
        psi + k1 * sixth + k2 * third + k3 * third + k4 * sixth
    }
}

/// Propagate `state0` under the time-dependent Hamiltonian over the window
/// in `cfg`, recording observables every `record_stride` steps.
pub fn propagate(
    state0: &QuantumState,
    params: &ModelParams,
    kind: HamiltonianKind,
    cfg: &PropagationConfig,
) -> Result<TrajectoryRecord> {
    params.validate()?;
    cfg.validate()?;
    if !params.epsilon.covers(cfg.t_start, cfg.t_end)
        || !params.omega.covers(cfg.t_start, cfg.t_end)
    {
        let (lo, hi) = params.epsilon.domain();
        return Err(Error::ScheduleDomain {
            t: cfg.t_start,
            lo,
            hi,
        });
    }
    let ops = build_operators(params.n_particles)?;
    if state0.dim() != ops.basis.dim() {
        return Err(Error::DimensionMismatch {
            context: "initial state dimension",
            expected: ops.basis.dim(),
            actual: state0.dim(),
        });
    }

    let (n_steps, dt) = cfg.steps();
    let stepper = Stepper {
        ops: &ops,
        params,
        kind,
        energy_shift: cfg.energy_shift,
    };

    let mut record = TrajectoryRecord {
        times: Vec::new(),
        jx_mean: Vec::new(),
        jy_mean: Vec::new(),
        jz_mean: Vec::new(),
        jz_variance: Vec::new(),
        norm: Vec::new(),
        energy: Vec::new(),
        dt_actual: dt,
        final_state: None,
    };

    // Constant schedules mean a constant matrix; skip the per-step
    // assemblies, which otherwise dominate the step cost.
    let constant_h = matches!(params.epsilon, Schedule::Constant { .. })
        && matches!(params.omega, Schedule::Constant { .. });

    let mut psi = state0.amplitudes().clone();
    let mut h_start = stepper.hamiltonian(cfg.t_start)?;
    record_sample(&mut record, cfg.t_start, &psi, &ops, &h_start);

    for step in 0..n_steps {
        let t = cfg.t_start + step as f64 * dt;
        if constant_h {
            psi = stepper.rk4_step(&psi, &h_start, &h_start, &h_start, dt);
        } else {
            let h_mid = stepper.hamiltonian(t + dt / 2.0)?;
            let h_end = stepper.hamiltonian(t + dt)?;
            psi = stepper.rk4_step(&psi, &h_start, &h_mid, &h_end, dt);
            h_start = h_end;
        }

        let norm = psi.norm();
        if (norm - 1.0).abs() > cfg.norm_tolerance {
            return Err(Error::NormDrift {
                t: t + dt,
                drift: (norm - 1.0).abs(),
                tolerance: cfg.norm_tolerance,
            });
        }

        let last = step + 1 == n_steps;
        if (step + 1) % cfg.record_stride == 0 || last {
            record_sample(&mut record, t + dt, &psi, &ops, &h_start);
        }
    }

    record.final_state = Some(QuantumState::normalized(psi)?);
    Ok(record)
}

fn record_sample(
    record: &mut TrajectoryRecord,
    t: f64,
    psi: &DVector<Complex64>,
    ops: &OperatorSet,
    h: &DMatrix<Complex64>,
) {
    let norm = psi.norm();
    let unit = psi / Complex64::new(norm, 0.0);
    let mean = |op: &DMatrix<Complex64>| unit.dotc(&(op * &unit)).re;
    let jz = mean(&ops.jz);
    record.times.push(t);
    record.jx_mean.push(mean(&ops.jx));
    record.jy_mean.push(mean(&ops.jy));
    record.jz_mean.push(jz);
    record.jz_variance.push(mean(&ops.jz2) - jz * jz);
    record.norm.push(norm);
    record.energy.push(mean(h));
}

/// Exact evolution of a state under a time-independent Hamiltonian via
/// dense eigendecomposition. Oracle route for [`propagate`].
pub fn exact_constant_evolution(
    state0: &QuantumState,
    h: &DMatrix<Complex64>,
    t: f64,
) -> Result<QuantumState> {
    if h.nrows() != state0.dim() {
        return Err(Error::DimensionMismatch {
            context: "exact evolution",
            expected: state0.dim(),
            actual: h.nrows(),
        });
    }
    QuantumState::normalized(linalg::exact_evolution(h, state0.amplitudes(), t))
}

/// Per-component defect |d<J_a>/dt (finite difference) - i <[H, J_a]>|
/// evaluated at time t, for a = x, y, z.
///
/// The Ehrenfest side i<[H, J_a]> is the authoritative equation of motion;
/// the finite-difference side probes the propagated trajectory with a
/// central difference of half-width `fd_dt`. The defect vanishes at
/// O(fd_dt^2). A Richardson check (halving the step) guards against probing
/// outside the convergent regime.
pub fn eom_residual(
    state: &QuantumState,
    params: &ModelParams,
    kind: HamiltonianKind,
    t: f64,
    fd_dt: f64,
) -> Result<[f64; 3]> {
    params.validate()?;
    if !(fd_dt > 0.0) {
        return Err(Error::InvalidPropagationConfig(format!(
            "finite-difference step must be positive, got {fd_dt}"
        )));
    }
    let ops = build_operators(params.n_particles)?;
    let h = hamiltonian_at(params, &ops, t, kind)?;

    // Ehrenfest oracle: d<J_a>/dt = i<[H, J_a]> = -2 Im <H J_a>
    let psi = state.amplitudes();
    let h_psi = &h * psi;
    let ehrenfest = |op: &DMatrix<Complex64>| -2.0 * h_psi.dotc(&(op * psi)).im;
    let oracle = [ehrenfest(&ops.jx), ehrenfest(&ops.jy), ehrenfest(&ops.jz)];

    let fd_full = central_difference(state, params, kind, &ops, t, fd_dt)?;
    let fd_half = central_difference(state, params, kind, &ops, t, fd_dt / 2.0)?;

    // A halving that moves the estimate by more than half its size means
    // fd_dt is not in the quadratic regime.
    let scale = fd_half
        .iter()
        .map(|v| v.abs())
        .fold(0.0_f64, f64::max)
        .max(1e-9);
    let change = fd_full
        .iter()
        .zip(fd_half.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    if change > 0.5 * scale {
        return Err(Error::FiniteDifferenceStep {
            t,
            dt: fd_dt,
            change,
        });
    }

    Ok([
        (fd_full[0] - oracle[0]).abs(),
        (fd_full[1] - oracle[1]).abs(),
        (fd_full[2] - oracle[2]).abs(),
    ])
}

fn central_difference(
    state: &QuantumState,
    params: &ModelParams,
    kind: HamiltonianKind,
    ops: &OperatorSet,
    t: f64,
    fd_dt: f64,
) -> Result<[f64; 3]> {
    let stepper = Stepper {
        ops,
        params,
        kind,
        energy_shift: false,
    };
    let step_to = |dt: f64| -> Result<DVector<Complex64>> {
        let h_start = stepper.hamiltonian(t)?;
        let h_mid = stepper.hamiltonian(t + dt / 2.0)?;
        let h_end = stepper.hamiltonian(t + dt)?;
        Ok(stepper.rk4_step(state.amplitudes(), &h_start, &h_mid, &h_end, dt))
    };
    let fwd = step_to(fd_dt)?;
    let bwd = step_to(-fd_dt)?;

    let mean = |psi: &DVector<Complex64>, op: &DMatrix<Complex64>| {
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        psi.dotc(&(op * psi)).re / norm_sq
    };
    Ok([
        (mean(&fwd, &ops.jx) - mean(&bwd, &ops.jx)) / (2.0 * fd_dt),
        (mean(&fwd, &ops.jy) - mean(&bwd, &ops.jy)) / (2.0 * fd_dt),
        (mean(&fwd, &ops.jz) - mean(&bwd, &ops.jz)) / (2.0 * fd_dt),
    ])
}

/// Right-hand sides of the operator equation of motion in its printed
/// matrix form, d J_a/dt = sum_b M_ab(J) J_b with the coefficient operators
/// multiplying from the left. Returns the three RHS matrices (x, y, z).
///
/// With Ut = Utt = 0 this is the on-site form. Used by the verification
/// report to compare the printed matrix against the commutator i[H, J_a].
pub fn eom_matrix_rhs(
    params: &ModelParams,
    ops: &OperatorSet,
    t: f64,
    kind: HamiltonianKind,
) -> Result<[DMatrix<Complex64>; 3]> {
    params.validate()?;
    let eps = params.epsilon.value_at(t)?;
    let n = params.n_particles as f64;
    let (ut, utt) = match kind {
        HamiltonianKind::OnSiteOnly => (0.0, 0.0),
        HamiltonianKind::FullCorrections => (params.ut, params.utt),
    };
    let u0 = params.u0;
    let omega_eff = params.omega.value_at(t)? + ut * (n - 1.0);
    let dim = ops.basis.dim();
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let i = Complex64::new(0.0, 1.0);

    let a = u0 - utt;
    let b = u0 - 3.0 * utt;

    // dJx/dt = -i a Jx - (eps + 2 a Jz) Jy
    let rhs_x = ops.jx.map(|z| z * (-i * a))
        - (id.map(|z| z * eps) + ops.jz.map(|z| z * (2.0 * a))) * &ops.jy;

    // dJy/dt = (eps + 2 b Jz) Jx - i b Jy - 2 omega_eff Jz
    let rhs_y = (id.map(|z| z * eps) + ops.jz.map(|z| z * (2.0 * b))) * &ops.jx
        - ops.jy.map(|z| z * (i * b))
        - ops.jz.map(|z| z * (2.0 * omega_eff));

    // dJz/dt = 2 (omega_eff + 2 Utt Jx) Jy - 2 i Utt Jz
    let rhs_z = (id.map(|z| z * (2.0 * omega_eff)) + ops.jx.map(|z| z * (4.0 * utt))) * &ops.jy
        - ops.jz.map(|z| z * (2.0 * i * utt));

    Ok([rhs_x, rhs_y, rhs_z])
}

/// Commutator form i [H, J_a] of the equation of motion, the ground truth
/// the printed matrix is compared against.
pub fn eom_commutator_rhs(
    params: &ModelParams,
    ops: &OperatorSet,
    t: f64,
    kind: HamiltonianKind,
) -> Result<[DMatrix<Complex64>; 3]> {
    let h = hamiltonian_at(params, ops, t, kind)?;
    let i = Complex64::new(0.0, 1.0);
    let comm = |op: &DMatrix<Complex64>| (&h * op - op * &h).map(|z| z * i);
    Ok([comm(&ops.jx), comm(&ops.jy), comm(&ops.jz)])
}

/// Summary of a transport run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportMetrics {
    /// |<N/2, +N/2 | psi(t_end)>|^2.
    pub final_fidelity: f64,
    /// min_t <Jz>/(N/2).
    pub jz_min_scaled: f64,
    /// max_t <Jz>/(N/2).
    pub jz_max_scaled: f64,
    /// True when <Jz>/(N/2) never crosses (or touches) zero.
    pub self_trapped: bool,
}

/// Transfer fidelity, population-imbalance excursion, and the
/// self-trapping flag for a recorded trajectory.
pub fn transport_metrics(
    record: &TrajectoryRecord,
    n_particles: usize,
) -> Result<TransportMetrics> {
    if record.is_empty() {
        return Err(Error::EmptyRecord);
    }
    let half_n = n_particles as f64 / 2.0;
    let scaled: Vec<f64> = record.jz_mean.iter().map(|jz| jz / half_n).collect();
    let jz_min_scaled = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let jz_max_scaled = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let s0 = scaled[0].signum();
    let self_trapped = scaled[0] != 0.0 && scaled.iter().all(|w| w * s0 > 0.0);

    let final_fidelity = match &record.final_state {
        Some(state) => {
            let target = QuantumState::basis_state(n_particles, n_particles)?;
            state.overlap_sqr(&target)
        }
        None => {
            return Err(Error::DimensionMismatch {
                context: "record has no final state",
                expected: n_particles + 1,
                actual: 0,
            })
        }
    };

    Ok(TransportMetrics {
        final_fidelity,
        jz_min_scaled,
        jz_max_scaled,
        self_trapped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::model::Schedule;
    use crate::operators::left_well_state;
    use approx::assert_abs_diff_eq;

    fn rabi_params(n: usize, omega: f64) -> ModelParams {
        ModelParams {
            n_particles: n,
            u0: 0.0,
            ut: 0.0,
            utt: 0.0,
            epsilon: Schedule::constant(0.0),
            omega: Schedule::constant(omega),
        }
    }

    #[test]
    fn config_validation() {
        assert!(PropagationConfig::new(0.0, 1.0, 1e-2).validate().is_ok());
        assert!(PropagationConfig::new(1.0, 0.0, 1e-2).validate().is_err());
        assert!(PropagationConfig::new(0.0, 1.0, 0.0).validate().is_err());
        assert!(PropagationConfig::new(0.0, 1.0, 2.0).validate().is_err());
        let mut bad = PropagationConfig::new(0.0, 1.0, 1e-2);
        bad.record_stride = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rabi_oscillation_matches_closed_form() {
        // U = eps = 0: <Jz>(t) = -(N/2) cos(2 Omega t)
        let n = 6;
        let omega = 0.8;
        let params = rabi_params(n, omega);
        let cfg = PropagationConfig::new(0.0, 4.0, 5e-4).with_stride(100);
        let state0 = left_well_state(n).unwrap();
        let record = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg).unwrap();
        for (t, jz) in record.times.iter().zip(record.jz_mean.iter()) {
            let expected = -(n as f64 / 2.0) * (2.0 * omega * t).cos();
            assert_abs_diff_eq!(*jz, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn eigenstate_stays_put_when_tunneling_off() {
        // Omega = 0: the left state is an H eigenstate, <Jz> constant.
        let params = ModelParams {
            n_particles: 5,
            u0: 0.9,
            ut: 0.0,
            utt: 0.0,
            epsilon: Schedule::constant(0.4),
            omega: Schedule::constant(0.0),
        };
        let cfg = PropagationConfig::new(0.0, 3.0, 1e-3).with_stride(50);
        let state0 = left_well_state(5).unwrap();
        let record = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg).unwrap();
        for jz in &record.jz_mean {
            assert_abs_diff_eq!(*jz, -2.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn energy_conserved_for_constant_hamiltonian() {
        let params = ModelParams {
            n_particles: 4,
            u0: 0.35,
            ut: 0.1,
            utt: 0.04,
            epsilon: Schedule::constant(-0.3),
            omega: Schedule::constant(0.7),
        };
        let cfg = PropagationConfig::new(0.0, 5.0, 5e-4).with_stride(200);
        let state0 = left_well_state(4).unwrap();
        let record = propagate(&state0, &params, HamiltonianKind::FullCorrections, &cfg).unwrap();
        let e0 = record.energy[0];
        let scale = e0.abs().max(1.0);
        for e in &record.energy {
            assert!(((e - e0) / scale).abs() < 1e-8, "energy drift {}", e - e0);
        }
    }

    #[test]
    fn stepped_propagation_matches_exact_evolution() {
        let params = ModelParams {
            n_particles: 8,
            u0: 0.25,
            ut: 0.05,
            utt: 0.02,
            epsilon: Schedule::constant(0.15),
            omega: Schedule::constant(-0.6),
        };
        let ops = build_operators(8).unwrap();
        let h = hamiltonian_at(&params, &ops, 0.0, HamiltonianKind::FullCorrections).unwrap();
        let state0 = left_well_state(8).unwrap();
        let t_end = 6.0;
        let cfg = PropagationConfig::new(0.0, t_end, 2e-4).with_stride(1_000_000);
        let record = propagate(&state0, &params, HamiltonianKind::FullCorrections, &cfg).unwrap();
        let psi_exact = exact_constant_evolution(&state0, &h, t_end).unwrap();
        let diff = record.final_state.as_ref().unwrap().amplitudes() - psi_exact.amplitudes();
        assert!(diff.norm() < 1e-8, "state error {}", diff.norm());
    }

    #[test]
    fn norm_gate_aborts_oversized_steps() {
        let params = rabi_params(20, 40.0);
        let cfg = PropagationConfig::new(0.0, 10.0, 0.05);
        let state0 = left_well_state(20).unwrap();
        let err = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg).unwrap_err();
        assert!(matches!(err, Error::NormDrift { .. }));
    }

    #[test]
    fn jz_trajectory_invariant_under_omega_sign_flip() {
        let n = 7;
        let cfg = PropagationConfig::new(0.0, 3.0, 5e-4).with_stride(40);
        let state0 = left_well_state(n).unwrap();
        let mut params = ModelParams {
            n_particles: n,
            u0: 0.4,
            ut: 0.0,
            utt: 0.0,
            epsilon: Schedule::constant(0.0),
            omega: Schedule::constant(0.9),
        };
        let plus = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg).unwrap();
        params.omega = Schedule::constant(-0.9);
        let minus = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg).unwrap();
        for (a, b) in plus.jz_mean.iter().zip(minus.jz_mean.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }
    }

    #[test]
    fn energy_shift_changes_only_the_global_phase() {
        let params = ModelParams {
            n_particles: 6,
            u0: 0.3,
            ut: 0.0,
            utt: 0.0,
            epsilon: Schedule::constant(5.0),
            omega: Schedule::constant(0.4),
        };
        let state0 = left_well_state(6).unwrap();
        let cfg = PropagationConfig::new(0.0, 2.0, 1e-4).with_stride(500);
        let plain = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg).unwrap();
        let shifted = propagate(
            &state0,
            &params,
            HamiltonianKind::OnSiteOnly,
            &cfg.with_energy_shift(true),
        )
        .unwrap();
        for (a, b) in plain.jz_mean.iter().zip(shifted.jz_mean.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }
        let f_plain = plain.final_state.unwrap();
        let f_shift = shifted.final_state.unwrap();
        assert_abs_diff_eq!(f_plain.overlap_sqr(&f_shift), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn eom_residual_small_on_eigenstate() {
        let params = ModelParams {
            n_particles: 4,
            u0: 0.6,
            ut: 0.0,
            utt: 0.0,
            epsilon: Schedule::constant(0.2),
            omega: Schedule::constant(0.0),
        };
        let state = left_well_state(4).unwrap();
        let res = eom_residual(&state, &params, HamiltonianKind::OnSiteOnly, 0.0, 1e-2).unwrap();
        for r in res {
            assert!(r < 1e-8, "residual {r}");
        }
    }

    #[test]
    fn eom_residual_rejects_wild_steps() {
        let params = rabi_params(2, 30.0);
        let state = left_well_state(2).unwrap();
        let err = eom_residual(&state, &params, HamiltonianKind::OnSiteOnly, 0.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::FiniteDifferenceStep { .. }));
    }

    #[test]
    fn linear_eom_matches_hand_commutators() {
        // U0 = 0: d<Jx>/dt = -eps <Jy>, d<Jy>/dt = eps <Jx> - 2 Omega <Jz>,
        // d<Jz>/dt = 2 Omega <Jy>
        let (eps, omega) = (0.9, -0.5);
        let params = ModelParams {
            n_particles: 3,
            u0: 0.0,
            ut: 0.0,
            utt: 0.0,
            epsilon: Schedule::constant(eps),
            omega: Schedule::constant(omega),
        };
        let ops = build_operators(3).unwrap();
        let rhs = eom_commutator_rhs(&params, &ops, 0.0, HamiltonianKind::OnSiteOnly).unwrap();
        let expect_x = ops.jy.map(|z| z * (-eps));
        let expect_y = ops.jx.map(|z| z * eps) - ops.jz.map(|z| z * (2.0 * omega));
        let expect_z = ops.jy.map(|z| z * (2.0 * omega));
        assert!(max_abs(&(rhs[0].clone() - expect_x)) < 1e-13);
        assert!(max_abs(&(rhs[1].clone() - expect_y)) < 1e-13);
        assert!(max_abs(&(rhs[2].clone() - expect_z)) < 1e-13);
    }

    #[test]
    fn printed_eom_matrix_agrees_with_commutator() {
        let params = ModelParams {
            n_particles: 5,
            u0: 0.7,
            ut: 0.11,
            utt: 0.05,
            epsilon: Schedule::constant(-0.4),
            omega: Schedule::constant(0.8),
        };
        let ops = build_operators(5).unwrap();
        for kind in [
            HamiltonianKind::OnSiteOnly,
            HamiltonianKind::FullCorrections,
        ] {
            let printed = eom_matrix_rhs(&params, &ops, 0.0, kind).unwrap();
            let truth = eom_commutator_rhs(&params, &ops, 0.0, kind).unwrap();
            for (p, t) in printed.iter().zip(truth.iter()) {
                assert!(max_abs(&(p - t)) < 1e-12);
            }
        }
    }

    #[test]
    fn transport_metrics_trivia() {
        let n = 4;
        let mut record = TrajectoryRecord {
            times: vec![0.0, 1.0],
            jx_mean: vec![0.0, 0.0],
            jy_mean: vec![0.0, 0.0],
            jz_mean: vec![-2.0, -2.0],
            jz_variance: vec![0.0, 0.0],
            norm: vec![1.0, 1.0],
            energy: vec![0.0, 0.0],
            dt_actual: 1.0,
            final_state: Some(left_well_state(n).unwrap()),
        };
        let m = transport_metrics(&record, n).unwrap();
        assert_eq!(m.final_fidelity, 0.0);
        assert!(m.self_trapped);
        assert_eq!(m.jz_min_scaled, -1.0);

        record.final_state = Some(QuantumState::basis_state(n, n).unwrap());
        record.jz_mean = vec![-2.0, 2.0];
        let m = transport_metrics(&record, n).unwrap();
        assert_eq!(m.final_fidelity, 1.0);
        assert!(!m.self_trapped);
        assert_eq!(m.jz_max_scaled, 1.0);
    }

    #[test]
    fn rabi_zero_crossing_flags_untrapped() {
        // <Jz> = -(N/2) cos(2 Omega t) crosses zero at t = pi/(4 Omega)
        let n = 4;
        let omega = 1.0;
        let params = rabi_params(n, omega);
        let t_cross = std::f64::consts::PI / (4.0 * omega);
        let cfg = PropagationConfig::new(0.0, 2.0 * t_cross, 1e-3).with_stride(10);
        let state0 = left_well_state(n).unwrap();
        let record = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg).unwrap();
        let m = transport_metrics(&record, n).unwrap();
        assert!(!m.self_trapped);

        let cfg_short = PropagationConfig::new(0.0, 0.5 * t_cross, 1e-3).with_stride(10);
        let record = propagate(&state0, &params, HamiltonianKind::OnSiteOnly, &cfg_short).unwrap();
        let m = transport_metrics(&record, n).unwrap();
        assert!(m.self_trapped, "no crossing before pi/(4 Omega)");
    }
}

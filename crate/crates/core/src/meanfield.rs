//! Classical mean-field descriptions: the Bloch-vector flow and the
//! two-mode amplitude (Gross-Pitaevskii) equations, plus quantum-classical
//! comparison.
//!
//! The Bloch vector (u, v, w) is the classical limit of the scaled
//! angular-momentum expectations 2<J_{x,y,z}>/N. The on-site nonlinearity
//! enters through U = N U0; the tunnelier-on-site correction shifts the
//! tunneling rate to Omega + Ut (N - 1) and the tunnelier-tunnelier term
//! adds quadratic (u, v) terms, both obtained by replacing operators with
//! scaled expectations in the corrected Hamiltonian.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{format_float, PropagationConfig, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::model::{HamiltonianKind, ModelParams, Schedule};

/// Classical spin on (nominally) the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl BlochVector {
    pub fn new(u: f64, v: f64, w: f64) -> Self {
        Self { u, v, w }
    }

    /// All population in the left well.
    pub fn left() -> Self {
        Self::new(0.0, 0.0, -1.0)
    }

    pub fn norm(&self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }
}

/// Two-mode condensate amplitudes (c_L, c_R), |c_L|^2 + |c_R|^2 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpAmplitudes {
    pub c_left: Complex64,
    pub c_right: Complex64,
}

impl GpAmplitudes {
    pub fn new(c_left: Complex64, c_right: Complex64) -> Self {
        Self { c_left, c_right }
    }

    pub fn left() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_left.norm_sqr() + self.c_right.norm_sqr()
    }

    /// Map to the Bloch vector: u = 2 Re(c_L* c_R), v = -2 Im(c_L* c_R),
    /// w = |c_R|^2 - |c_L|^2. The v sign follows the Schwinger Jy
    /// definition.
    pub fn to_bloch(&self) -> BlochVector {
        let z = self.c_left.conj() * self.c_right;
        BlochVector::new(
            2.0 * z.re,
            -2.0 * z.im,
            self.c_right.norm_sqr() - self.c_left.norm_sqr(),
        )
    }

    /// Inverse of [`to_bloch`](Self::to_bloch) up to the irrelevant global
    /// phase. The larger amplitude is taken real so the division stays
    /// well conditioned at the poles.
    pub fn from_bloch(b: &BlochVector) -> Self {
        if b.w <= 0.0 {
            let c_left = ((1.0 - b.w) / 2.0).max(0.0).sqrt();
            let c_right = Complex64::new(b.u, -b.v) / (2.0 * c_left);
            Self::new(Complex64::new(c_left, 0.0), c_right)
        } else {
            let c_right = ((1.0 + b.w) / 2.0).max(0.0).sqrt();
            let c_left = Complex64::new(b.u, b.v) / (2.0 * c_right);
            Self::new(c_left, Complex64::new(c_right, 0.0))
        }
    }
}

/// Bloch flow with on-site nonlinearity only:
/// du/dt = -(eps + U w) v, dv/dt = (eps + U w) u - 2 Omega w, dw/dt = 2 Omega v.
pub fn bloch_rhs(b: &BlochVector, eps: f64, omega_rabi: f64, u_nl: f64) -> [f64; 3] {
    bloch_rhs_full(b, eps, omega_rabi, u_nl, 0.0)
}

/// Bloch flow including the quadratic tunnelier-tunnelier terms
/// (utt_nl = N Utt). The generator stays antisymmetric, so the norm is an
/// exact invariant of the continuous flow.
pub fn bloch_rhs_full(
    b: &BlochVector,
    eps: f64,
    omega_eff: f64,
    u_nl: f64,
    utt_nl: f64,
) -> [f64; 3] {
    let phase = eps + u_nl * b.w;
    [
        -phase * b.v - utt_nl * b.v * b.w,
        phase * b.u - 2.0 * omega_eff * b.w - utt_nl * b.u * b.w,
        2.0 * omega_eff * b.v + 2.0 * utt_nl * b.u * b.v,
    ]
}

/// Two-mode amplitude equations:
/// i dc_L/dt = (eps_L + U_L |c_L|^2) c_L + Omega c_R, and L <-> R.
pub fn gp_rhs(
    c: &GpAmplitudes,
    eps_l: f64,
    eps_r: f64,
    u_l: f64,
    u_r: f64,
    omega_rabi: f64,
) -> (Complex64, Complex64) {
    let minus_i = Complex64::new(0.0, -1.0);
    let d_left =
        minus_i * ((eps_l + u_l * c.c_left.norm_sqr()) * c.c_left + omega_rabi * c.c_right);
    let d_right =
        minus_i * ((eps_r + u_r * c.c_right.norm_sqr()) * c.c_right + omega_rabi * c.c_left);
    (d_left, d_right)
}

/// Couplings for the amplitude equations, possibly asymmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpCouplings {
    pub eps_left: Schedule,
    pub eps_right: Schedule,
    pub u_left: f64,
    pub u_right: f64,
    pub omega: Schedule,
}

impl GpCouplings {
    /// Symmetric couplings from the model: eps_{L,R} = -/+ eps/2,
    /// U_L = U_R = N U0, and the Ut-shifted tunneling rate for the
    /// full-correction variant. Utt has no counterpart at this level.
    pub fn from_model(params: &ModelParams, kind: HamiltonianKind) -> Self {
        let n = params.n_particles as f64;
        let omega = match kind {
            HamiltonianKind::OnSiteOnly => params.omega.clone(),
            HamiltonianKind::FullCorrections => params.omega.offset(params.ut * (n - 1.0)),
        };
        Self {
            eps_left: params.epsilon.scaled(-0.5),
            eps_right: params.epsilon.scaled(0.5),
            u_left: n * params.u0,
            u_right: n * params.u0,
            omega,
        }
    }
}

/// Classical trajectory in Bloch coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalTrajectory {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// sqrt(u^2 + v^2 + w^2), an exact invariant of the flow.
    pub norm: Vec<f64>,
    pub dt_actual: f64,
}

impl ClassicalTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with columns `t,u,v,w,norm`.
    pub fn write_csv<W: std::io::Write + ?Sized>(
        &self,
        w: &mut W,
        precision: usize,
        hex_floats: bool,
    ) -> std::io::Result<()> {
        writeln!(w, "t,u,v,w,norm")?;
        for k in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                format_float(self.times[k], precision, hex_floats),
                format_float(self.u[k], precision, hex_floats),
                format_float(self.v[k], precision, hex_floats),
                format_float(self.w[k], precision, hex_floats),
                format_float(self.norm[k], precision, hex_floats),
            )?;
        }
        Ok(())
    }

    /// True when w never crosses (or touches) zero.
    pub fn self_trapped(&self) -> bool {
        if self.w.is_empty() || self.w[0] == 0.0 {
            return false;
        }
        let s0 = self.w[0].signum();
        self.w.iter().all(|w| w * s0 > 0.0)
    }
}

/// Two-mode amplitude trajectory: populations and relative phase
/// arg(c_L^* c_R).
#[derive(Debug, Clone, Serialize)]
pub struct GpTrajectory {
    pub times: Vec<f64>,
    pub pop_left: Vec<f64>,
    pub pop_right: Vec<f64>,
    pub rel_phase: Vec<f64>,
    pub norm: Vec<f64>,
    pub dt_actual: f64,
}

impl GpTrajectory {
    /// Convert to Bloch coordinates.
    pub fn to_bloch_trajectory(&self) -> ClassicalTrajectory {
        let mut u = Vec::with_capacity(self.times.len());
        let mut v = Vec::with_capacity(self.times.len());
        let mut w = Vec::with_capacity(self.times.len());
        let mut norm = Vec::with_capacity(self.times.len());
        for k in 0..self.times.len() {
            let r = (self.pop_left[k] * self.pop_right[k]).max(0.0).sqrt();
            let uk = 2.0 * r * self.rel_phase[k].cos();
            let vk = -2.0 * r * self.rel_phase[k].sin();
            let wk = self.pop_right[k] - self.pop_left[k];
            u.push(uk);
            v.push(vk);
            w.push(wk);
            norm.push((uk * uk + vk * vk + wk * wk).sqrt());
        }
        ClassicalTrajectory {
            times: self.times.clone(),
            u,
            v,
            w,
            norm,
            dt_actual: self.dt_actual,
        }
    }
}

/// Integrate the Bloch flow with the same fixed-step fourth-order scheme
/// and norm gate as the quantum propagator.
pub fn integrate_bloch(
    initial: BlochVector,
    params: &ModelParams,
    kind: HamiltonianKind,
    cfg: &PropagationConfig,
) -> Result<ClassicalTrajectory> {
    params.validate()?;
    cfg.validate()?;
    check_initial_norm(initial.norm() * initial.norm())?;
    let n = params.n_particles as f64;
    let (u_nl, utt_nl, ut_shift) = match kind {
        HamiltonianKind::OnSiteOnly => (n * params.u0, 0.0, 0.0),
        HamiltonianKind::FullCorrections => (
            n * (params.u0 - 2.0 * params.utt),
            n * params.utt,
            params.ut * (n - 1.0),
        ),
    };

    let (n_steps, dt) = cfg.steps();
    let mut traj = ClassicalTrajectory {
        times: Vec::new(),
        u: Vec::new(),
        v: Vec::new(),
        w: Vec::new(),
        norm: Vec::new(),
        dt_actual: dt,
    };

    let mut b = initial;
    push_bloch(&mut traj, cfg.t_start, &b);
    for step in 0..n_steps {
        let t = cfg.t_start + step as f64 * dt;
        let rhs = |b: &BlochVector, t: f64| -> Result<[f64; 3]> {
            let eps = params.epsilon.value_at(t)?;
            let omega_eff = params.omega.value_at(t)? + ut_shift;
            Ok(bloch_rhs_full(b, eps, omega_eff, u_nl, utt_nl))
        };
        b = rk4_bloch(&b, t, dt, rhs)?;

        let drift = (b.norm() - 1.0).abs();
        if drift > cfg.norm_tolerance {
            return Err(Error::NormDrift {
                t: t + dt,
                drift,
                tolerance: cfg.norm_tolerance,
            });
        }
        let last = step + 1 == n_steps;
        if (step + 1) % cfg.record_stride == 0 || last {
            push_bloch(&mut traj, t + dt, &b);
        }
    }
    Ok(traj)
}

fn push_bloch(traj: &mut ClassicalTrajectory, t: f64, b: &BlochVector) {
    traj.times.push(t);
    traj.u.push(b.u);
    traj.v.push(b.v);
    traj.w.push(b.w);
    traj.norm.push(b.norm());
}

fn rk4_bloch<F>(b: &BlochVector, t: f64, dt: f64, rhs: F) -> Result<BlochVector>
where
    F: Fn(&BlochVector, f64) -> Result<[f64; 3]>,
{
    let add = |b: &BlochVector, k: &[f64; 3], s: f64| {
        BlochVector::new(b.u + s * k[0], b.v + s * k[1], b.w + s * k[2])
    };
    let k1 = rhs(b, t)?;
    let k2 = rhs(&add(b, &k1, dt / 2.0), t + dt / 2.0)?;
    let k3 = rhs(&add(b, &k2, dt / 2.0), t + dt / 2.0)?;
    let k4 = rhs(&add(b, &k3, dt), t + dt)?;
    Ok(BlochVector::new(
        b.u + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        b.v + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        b.w + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ))
}

/// Integrate the two-mode amplitude equations.
pub fn integrate_gp(
    initial: GpAmplitudes,
    couplings: &GpCouplings,
    cfg: &PropagationConfig,
) -> Result<GpTrajectory> {
    cfg.validate()?;
    couplings.eps_left.validate()?;
    couplings.eps_right.validate()?;
    couplings.omega.validate()?;
    check_initial_norm(initial.norm_sqr())?;

    let (n_steps, dt) = cfg.steps();
    let mut traj = GpTrajectory {
        times: Vec::new(),
        pop_left: Vec::new(),
        pop_right: Vec::new(),
        rel_phase: Vec::new(),
        norm: Vec::new(),
        dt_actual: dt,
    };

    let mut c = initial;
    push_gp(&mut traj, cfg.t_start, &c);
    for step in 0..n_steps {
        let t = cfg.t_start + step as f64 * dt;
        let rhs = |c: &GpAmplitudes, t: f64| -> Result<(Complex64, Complex64)> {
            Ok(gp_rhs(
                c,
                couplings.eps_left.value_at(t)?,
                couplings.eps_right.value_at(t)?,
                couplings.u_left,
                couplings.u_right,
                couplings.omega.value_at(t)?,
            ))
        };
        c = rk4_gp(&c, t, dt, rhs)?;

        let drift = (c.norm_sqr().sqrt() - 1.0).abs();
        if drift > cfg.norm_tolerance {
            return Err(Error::NormDrift {
                t: t + dt,
                drift,
                tolerance: cfg.norm_tolerance,
            });
        }
        let last = step + 1 == n_steps;
        if (step + 1) % cfg.record_stride == 0 || last {
            push_gp(&mut traj, t + dt, &c);
        }
    }
    Ok(traj)
}

fn push_gp(traj: &mut GpTrajectory, t: f64, c: &GpAmplitudes) {
    traj.times.push(t);
    traj.pop_left.push(c.c_left.norm_sqr());
    traj.pop_right.push(c.c_right.norm_sqr());
    traj.rel_phase.push((c.c_left.conj() * c.c_right).arg());
    traj.norm.push(c.norm_sqr().sqrt());
}

fn rk4_gp<F>(c: &GpAmplitudes, t: f64, dt: f64, rhs: F) -> Result<GpAmplitudes>
where
    F: Fn(&GpAmplitudes, f64) -> Result<(Complex64, Complex64)>,
{
    let add = |c: &GpAmplitudes, k: &(Complex64, Complex64), s: f64| {
        GpAmplitudes::new(c.c_left + s * k.0, c.c_right + s * k.1)
    };
    let k1 = rhs(c, t)?;
    let k2 = rhs(&add(c, &k1, dt / 2.0), t + dt / 2.0)?;
    let k3 = rhs(&add(c, &k2, dt / 2.0), t + dt / 2.0)?;
    let k4 = rhs(&add(c, &k3, dt), t + dt)?;
    let sixth = dt / 6.0;
    Ok(GpAmplitudes::new(
        c.c_left + sixth * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        c.c_right + sixth * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    ))
}

fn check_initial_norm(norm_sq: f64) -> Result<()> {
    let defect = (norm_sq - 1.0).abs();
    if defect > 1e-10 {
        return Err(Error::NotNormalized {
            defect,
            tolerance: 1e-10,
        });
    }
    Ok(())
}

/// Per-time deviation |2 <J_a>/N - a_classical| between a quantum record
/// and a classical trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct DeviationSeries {
    pub times: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub dw: Vec<f64>,
}

impl DeviationSeries {
    pub fn max_deviation(&self) -> f64 {
        self.du
            .iter()
            .chain(self.dv.iter())
            .chain(self.dw.iter())
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn mean_deviation(&self) -> f64 {
        let n = self.times.len();
        if n == 0 {
            return 0.0;
        }
        let total: f64 = (0..n)
            .map(|k| (self.du[k] + self.dv[k] + self.dw[k]) / 3.0)
            .sum();
        total / n as f64
    }
}

/// Compare scaled quantum expectations against a classical trajectory,
/// resampling the classical data onto the quantum time grid by linear
/// interpolation.
pub fn compare_quantum_classical(
    quantum: &TrajectoryRecord,
    classical: &ClassicalTrajectory,
    n_particles: usize,
) -> Result<DeviationSeries> {
    if quantum.is_empty() || classical.is_empty() {
        return Err(Error::EmptyRecord);
    }
    let (c_lo, c_hi) = (classical.times[0], classical.times[classical.len() - 1]);
    let pad = 1e-12 * (c_hi - c_lo).abs().max(1.0);
    let half_n = n_particles as f64 / 2.0;

    let mut series = DeviationSeries {
        times: Vec::new(),
        du: Vec::new(),
        dv: Vec::new(),
        dw: Vec::new(),
    };
    for (k, &t) in quantum.times.iter().enumerate() {
        if t < c_lo - pad || t > c_hi + pad {
            continue;
        }
        let cu = sample(&classical.times, &classical.u, t);
        let cv = sample(&classical.times, &classical.v, t);
        let cw = sample(&classical.times, &classical.w, t);
        series.times.push(t);
        series.du.push((quantum.jx_mean[k] / half_n - cu).abs());
        series.dv.push((quantum.jy_mean[k] / half_n - cv).abs());
        series.dw.push((quantum.jz_mean[k] / half_n - cw).abs());
    }
    if series.times.is_empty() {
        return Err(Error::DisjointTimeRanges {
            q_lo: quantum.times[0],
            q_hi: quantum.times[quantum.len() - 1],
            c_lo,
            c_hi,
        });
    }
    Ok(series)
}

fn sample(times: &[f64], values: &[f64], t: f64) -> f64 {
    let idx = times.partition_point(|&tp| tp <= t);
    if idx == 0 {
        return values[0];
    }
    if idx == times.len() {
        return values[values.len() - 1];
    }
    let (t0, t1) = (times[idx - 1], times[idx]);
    let s = (t - t0) / (t1 - t0);
    values[idx - 1] + s * (values[idx] - values[idx - 1])
}

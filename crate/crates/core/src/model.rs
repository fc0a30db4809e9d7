//! Physical parameters, time-dependent schedules, and Hamiltonian assembly.
//!
//! Two Hamiltonian variants act on the Dicke basis:
//!
//! * on-site only: H = U0 Jz^2 + eps(t) Jz + 2 Omega(t) Jx
//! * full corrections: H = (U0 - 2 Utt) Jz^2 + eps(t) Jz
//!   + 2 (Omega(t) + Ut (N-1)) Jx + Utt (Jx^2 - Jy^2)
//!
//! Terms proportional to the identity (total particle number, chemical
//! potential sum) only shift the global phase and are dropped. An
//! independent builder constructs the same Hamiltonian directly from
//! two-mode boson ladder operators on the number basis; the two routes must
//! agree on their traceless parts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::OperatorSet;

/// Time-dependent control value in energy units (hbar = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Schedule {
    Constant {
        value: f64,
    },
    /// Linear ramp from `from` at `t_start` to `to` at `t_end`; held
    /// constant outside the ramp window.
    LinearRamp {
        t_start: f64,
        t_end: f64,
        from: f64,
        to: f64,
    },
    GaussianPulse {
        amplitude: f64,
        center: f64,
        width: f64,
        #[serde(default)]
        baseline: f64,
    },
    /// Linear interpolation between breakpoints; defined only on
    /// [first t, last t].
    PiecewiseLinear {
        points: Vec<(f64, f64)>,
    },
    /// Same evaluation as piecewise-linear; the variant exists for tables
    /// imported from external data.
    Tabulated {
        points: Vec<(f64, f64)>,
    },
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Schedule::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidSchedule("constant value not finite".into()));
                }
            }
            Schedule::LinearRamp {
                t_start,
                t_end,
                from,
                to,
            } => {
                if !(t_end > t_start) {
                    return Err(Error::InvalidSchedule(format!(
                        "ramp needs t_end > t_start, got [{t_start}, {t_end}]"
                    )));
                }
                if !from.is_finite() || !to.is_finite() {
                    return Err(Error::InvalidSchedule("ramp endpoints not finite".into()));
                }
            }
            Schedule::GaussianPulse { width, .. } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidSchedule(format!(
                        "gaussian pulse needs width > 0, got {width}"
                    )));
                }
            }
            Schedule::PiecewiseLinear { points } | Schedule::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidSchedule(
                        "need at least two breakpoints".into(),
                    ));
                }
                if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::InvalidSchedule(
                        "breakpoint times must be strictly increasing".into(),
                    ));
                }
                if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return Err(Error::InvalidSchedule("breakpoints must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Domain on which evaluation succeeds.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Schedule::Constant { .. }
            | Schedule::LinearRamp { .. }
            | Schedule::GaussianPulse { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Schedule::PiecewiseLinear { points } | Schedule::Tabulated { points } => {
                (points[0].0, points[points.len() - 1].0)
            }
        }
    }

    pub fn covers(&self, t_start: f64, t_end: f64) -> bool {
        let (lo, hi) = self.domain();
        lo <= t_start && t_end <= hi
    }

    /// Evaluate at time t. Total and continuous on the domain.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        match self {
            Schedule::Constant { value } => Ok(*value),
            Schedule::LinearRamp {
                t_start,
                t_end,
                from,
                to,
            } => {
                if t <= *t_start {
                    Ok(*from)
                } else if t >= *t_end {
                    Ok(*to)
                } else {
                    let s = (t - t_start) / (t_end - t_start);
                    Ok(from + s * (to - from))
                }
            }
            Schedule::GaussianPulse {
                amplitude,
                center,
                width,
                baseline,
            } => {
                let arg = (t - center) / width;
                Ok(baseline + amplitude * (-0.5 * arg * arg).exp())
            }
            Schedule::PiecewiseLinear { points } | Schedule::Tabulated { points } => {
                interpolate_linear(points, t)
            }
        }
    }

    /// Schedule scaled by a constant factor.
    pub fn scaled(&self, factor: f64) -> Schedule {
        match self {
            Schedule::Constant { value } => Schedule::Constant {
                value: value * factor,
            },
            Schedule::LinearRamp {
                t_start,
                t_end,
                from,
                to,
            } => Schedule::LinearRamp {
                t_start: *t_start,
                t_end: *t_end,
                from: from * factor,
                to: to * factor,
            },
            Schedule::GaussianPulse {
                amplitude,
                center,
                width,
                baseline,
            } => Schedule::GaussianPulse {
                amplitude: amplitude * factor,
                center: *center,
                width: *width,
                baseline: baseline * factor,
            },
            Schedule::PiecewiseLinear { points } => Schedule::PiecewiseLinear {
                points: points.iter().map(|(t, v)| (*t, v * factor)).collect(),
            },
            Schedule::Tabulated { points } => Schedule::Tabulated {
                points: points.iter().map(|(t, v)| (*t, v * factor)).collect(),
            },
        }
    }

    /// Schedule shifted by a constant offset.
    pub fn offset(&self, delta: f64) -> Schedule {
        match self {
            Schedule::Constant { value } => Schedule::Constant {
                value: value + delta,
            },
            Schedule::LinearRamp {
                t_start,
                t_end,
                from,
                to,
            } => Schedule::LinearRamp {
                t_start: *t_start,
                t_end: *t_end,
                from: from + delta,
                to: to + delta,
            },
            Schedule::GaussianPulse {
                amplitude,
                center,
                width,
                baseline,
            } => Schedule::GaussianPulse {
                amplitude: *amplitude,
                center: *center,
                width: *width,
                baseline: baseline + delta,
            },
            Schedule::PiecewiseLinear { points } => Schedule::PiecewiseLinear {
                points: points.iter().map(|(t, v)| (*t, v + delta)).collect(),
            },
            Schedule::Tabulated { points } => Schedule::Tabulated {
                points: points.iter().map(|(t, v)| (*t, v + delta)).collect(),
            },
        }
    }
}

fn interpolate_linear(points: &[(f64, f64)], t: f64) -> Result<f64> {
    let (lo, hi) = (points[0].0, points[points.len() - 1].0);
    if t < lo || t > hi {
        return Err(Error::ScheduleDomain { t, lo, hi });
    }
    // partition_point: first breakpoint with time > t
    let idx = points.partition_point(|(tp, _)| *tp <= t);
    if idx == points.len() {
        return Ok(points[points.len() - 1].1);
    }
    let (t0, v0) = points[idx - 1];
    let (t1, v1) = points[idx];
    let s = (t - t0) / (t1 - t0);
    Ok(v0 + s * (v1 - v0))
}

/// Which interaction terms the Hamiltonian carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HamiltonianKind {
    /// On-site interaction only.
    #[serde(rename = "on-site")]
    OnSiteOnly,
    /// On-site plus tunnelier-on-site (Ut) and tunnelier-tunnelier (Utt)
    /// corrections.
    #[serde(rename = "full")]
    FullCorrections,
}

/// Static couplings plus the time-dependent controls.
///
/// `u0` is the on-site interaction, `ut` couples a tunneling particle to an
/// on-site particle, `utt` couples two tunneling particles. `epsilon` is
/// the chemical-potential difference eps_R - eps_L and `omega` the
/// tunneling rate (signed; it is typically negative for ground-band wells).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_particles: usize,
    pub u0: f64,
    pub ut: f64,
    pub utt: f64,
    pub epsilon: Schedule,
    pub omega: Schedule,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::InvalidParticleNumber(0));
        }
        self.epsilon.validate()?;
        self.omega.validate()?;
        Ok(())
    }

    /// Effective tunneling rate Omega(t) + Ut (N - 1) entering the full
    /// Hamiltonian.
    pub fn omega_effective(&self, t: f64) -> Result<f64> {
        Ok(self.omega.value_at(t)? + self.ut * (self.n_particles as f64 - 1.0))
    }
}

/// Coefficients of the four operator terms at a given time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct HamiltonianCoefficients {
    /// Jz^2 coefficient.
    pub jz2: f64,
    /// Jz coefficient (eps).
    pub jz: f64,
    /// Jx coefficient (2 Omega_eff).
    pub jx: f64,
    /// (Jx^2 - Jy^2) coefficient (Utt).
    pub jx2_minus_jy2: f64,
}

pub(crate) fn coefficients_at(
    params: &ModelParams,
    t: f64,
    kind: HamiltonianKind,
) -> Result<HamiltonianCoefficients> {
    let eps = params.epsilon.value_at(t)?;
    let n = params.n_particles as f64;
    Ok(match kind {
        HamiltonianKind::OnSiteOnly => HamiltonianCoefficients {
            jz2: params.u0,
            jz: eps,
            jx: 2.0 * params.omega.value_at(t)?,
            jx2_minus_jy2: 0.0,
        },
        HamiltonianKind::FullCorrections => HamiltonianCoefficients {
            jz2: params.u0 - 2.0 * params.utt,
            jz: eps,
            jx: 2.0 * (params.omega.value_at(t)? + params.ut * (n - 1.0)),
            jx2_minus_jy2: params.utt,
        },
    })
}

pub(crate) fn assemble(ops: &OperatorSet, c: &HamiltonianCoefficients) -> DMatrix<Complex64> {
    let dim = ops.basis.dim();
    DMatrix::from_fn(dim, dim, |r, s| {
        ops.jz2[(r, s)] * c.jz2
            + ops.jz[(r, s)] * c.jz
            + ops.jx[(r, s)] * c.jx
            + (ops.jx2[(r, s)] - ops.jy2[(r, s)]) * c.jx2_minus_jy2
    })
}

/// Hamiltonian matrix at time t in the Schwinger (angular-momentum) form,
/// with identity-proportional terms dropped.
pub fn hamiltonian_at(
    params: &ModelParams,
    ops: &OperatorSet,
    t: f64,
    kind: HamiltonianKind,
) -> Result<DMatrix<Complex64>> {
    params.validate()?;
    if ops.basis.n_particles() != params.n_particles {
        return Err(Error::DimensionMismatch {
            context: "operator set particle number",
            expected: params.n_particles,
            actual: ops.basis.n_particles(),
        });
    }
    Ok(assemble(ops, &coefficients_at(params, t, kind)?))
}

/// Evaluate a schedule at time t.
pub fn evaluate_schedule(s: &Schedule, t: f64) -> Result<f64> {
    s.value_at(t)
}

// ---------------------------------------------------------------------------
// Independent boson-operator construction (oracle route)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
enum Mode {
    Left,
    Right,
}

#[derive(Clone, Copy)]
enum Ladder {
    Create(Mode),
    Annihilate(Mode),
}

use Ladder::{Annihilate, Create};
use Mode::{Left, Right};

/// Add `coeff` times a normal-unordered ladder string (applied right to
/// left) to `h`, on the N-particle sector with basis index k <-> n_L = N - k
/// (so indices match the ascending-m Dicke ordering).
fn add_string(h: &mut DMatrix<Complex64>, n: usize, coeff: f64, string: &[Ladder]) {
    if coeff == 0.0 {
        return;
    }
    let dim = n + 1;
    for k in 0..dim {
        let mut n_l = (n - k) as i64;
        let mut n_r = k as i64;
        let mut amp = 1.0;
        let mut dead = false;
        for op in string.iter().rev() {
            match op {
                Annihilate(mode) => {
                    let occ = match mode {
                        Left => &mut n_l,
                        Right => &mut n_r,
                    };
                    if *occ == 0 {
                        dead = true;
                        break;
                    }
                    amp *= (*occ as f64).sqrt();
                    *occ -= 1;
                }
                Create(mode) => {
                    let occ = match mode {
                        Left => &mut n_l,
                        Right => &mut n_r,
                    };
                    *occ += 1;
                    amp *= (*occ as f64).sqrt();
                }
            }
        }
        if dead {
            continue;
        }
        debug_assert_eq!(n_l + n_r, n as i64, "string must conserve N");
        let k_out = n_r as usize;
        h[(k_out, k)] += Complex64::new(coeff * amp, 0.0);
    }
}

/// Hamiltonian built directly from two-mode boson ladder operators on the
/// number basis {|n_L, n_R>, n_L + n_R = N}, mapped to the ascending-m Dicke
/// index. Serves as an independent oracle for [`hamiltonian_at`]; the two
/// agree up to a multiple of the identity.
///
/// The chemical potentials are split symmetrically, eps_{L,R} = -/+ eps/2,
/// which again only shifts the result by a constant. The full-correction
/// form is the manifestly Hermitian one (each interaction string appears
/// with its adjoint).
pub fn boson_hamiltonian_at(
    params: &ModelParams,
    t: f64,
    kind: HamiltonianKind,
) -> Result<DMatrix<Complex64>> {
    params.validate()?;
    let n = params.n_particles;
    let dim = n + 1;
    let eps = params.epsilon.value_at(t)?;
    let omega = params.omega.value_at(t)?;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);

    // single-particle part
    add_string(&mut h, n, -eps / 2.0, &[Create(Left), Annihilate(Left)]);
    add_string(&mut h, n, eps / 2.0, &[Create(Right), Annihilate(Right)]);
    add_string(&mut h, n, omega, &[Create(Left), Annihilate(Right)]);
    add_string(&mut h, n, omega, &[Create(Right), Annihilate(Left)]);

    // on-site interaction
    let u0_half = params.u0 / 2.0;
    add_string(
        &mut h,
        n,
        u0_half,
        &[
            Create(Left),
            Create(Left),
            Annihilate(Left),
            Annihilate(Left),
        ],
    );
    add_string(
        &mut h,
        n,
        u0_half,
        &[
            Create(Right),
            Create(Right),
            Annihilate(Right),
            Annihilate(Right),
        ],
    );

    if kind == HamiltonianKind::FullCorrections {
        // tunnelier / on-site
        let ut_strings: [[Ladder; 4]; 4] = [
            [
                Create(Left),
                Create(Left),
                Annihilate(Left),
                Annihilate(Right),
            ],
            [
                Create(Left),
                Create(Right),
                Annihilate(Left),
                Annihilate(Left),
            ],
            [
                Create(Right),
                Create(Right),
                Annihilate(Right),
                Annihilate(Left),
            ],
            [
                Create(Right),
                Create(Left),
                Annihilate(Right),
                Annihilate(Right),
            ],
        ];
        for s in &ut_strings {
            add_string(&mut h, n, params.ut, s);
        }

        // tunnelier / tunnelier
        let utt_half = params.utt / 2.0;
        add_string(
            &mut h,
            n,
            utt_half,
            &[
                Create(Left),
                Create(Left),
                Annihilate(Right),
                Annihilate(Right),
            ],
        );
        add_string(
            &mut h,
            n,
            utt_half,
            &[
                Create(Right),
                Create(Right),
                Annihilate(Left),
                Annihilate(Left),
            ],
        );
        add_string(
            &mut h,
            n,
            params.utt,
            &[
                Create(Left),
                Create(Right),
                Annihilate(Right),
                Annihilate(Left),
            ],
        );
        add_string(
            &mut h,
            n,
            params.utt,
            &[
                Create(Right),
                Create(Left),
                Annihilate(Left),
                Annihilate(Right),
            ],
        );
    }

    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, max_abs, max_abs_diff, traceless_part};
    use crate::operators::build_operators;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn constant_params(n: usize, u0: f64, ut: f64, utt: f64, eps: f64, omega: f64) -> ModelParams {
        ModelParams {
            n_particles: n,
            u0,
            ut,
            utt,
            epsilon: Schedule::constant(eps),
            omega: Schedule::constant(omega),
        }
    }

    #[test]
    fn schedule_trivia() {
        assert_eq!(Schedule::constant(3.5).value_at(-7.0).unwrap(), 3.5);

        let ramp = Schedule::LinearRamp {
            t_start: 0.0,
            t_end: 2.0,
            from: 1.0,
            to: 5.0,
        };
        assert_eq!(ramp.value_at(1.0).unwrap(), 3.0);
        assert_eq!(ramp.value_at(-1.0).unwrap(), 1.0);
        assert_eq!(ramp.value_at(9.0).unwrap(), 5.0);

        let tab = Schedule::Tabulated {
            points: vec![(0.0, 0.0), (1.0, 2.0)],
        };
        assert_eq!(tab.value_at(0.25).unwrap(), 0.5);
        assert!(tab.value_at(1.5).is_err());
        assert!(tab.value_at(-0.1).is_err());
    }

    #[test]
    fn schedule_validation_catches_bad_breakpoints() {
        let bad = Schedule::PiecewiseLinear {
            points: vec![(0.0, 1.0), (0.0, 2.0)],
        };
        assert!(bad.validate().is_err());
        let single = Schedule::Tabulated {
            points: vec![(0.0, 1.0)],
        };
        assert!(single.validate().is_err());
        let gauss = Schedule::GaussianPulse {
            amplitude: 1.0,
            center: 0.0,
            width: 0.0,
            baseline: 0.0,
        };
        assert!(gauss.validate().is_err());
    }

    #[test]
    fn gaussian_pulse_evaluates() {
        let g = Schedule::GaussianPulse {
            amplitude: 2.0,
            center: 1.0,
            width: 0.5,
            baseline: 0.25,
        };
        assert_abs_diff_eq!(g.value_at(1.0).unwrap(), 2.25, epsilon = 1e-15);
        assert_abs_diff_eq!(
            g.value_at(1.5).unwrap(),
            0.25 + 2.0 * (-0.5_f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let ops = build_operators(6).unwrap();
        let params = constant_params(6, 0.3, 0.07, 0.02, -0.4, -1.1);
        for kind in [
            HamiltonianKind::OnSiteOnly,
            HamiltonianKind::FullCorrections,
        ] {
            let h = hamiltonian_at(&params, &ops, 0.0, kind).unwrap();
            assert!(hermiticity_defect(&h) < 1e-12);
        }
    }

    #[test]
    fn full_reduces_to_on_site_when_corrections_vanish() {
        let ops = build_operators(5).unwrap();
        let params = constant_params(5, 0.8, 0.0, 0.0, 0.3, -0.9);
        let on_site = hamiltonian_at(&params, &ops, 0.0, HamiltonianKind::OnSiteOnly).unwrap();
        let full = hamiltonian_at(&params, &ops, 0.0, HamiltonianKind::FullCorrections).unwrap();
        assert_eq!(max_abs_diff(&on_site, &full), 0.0);
    }

    #[test]
    fn n1_full_hamiltonian_splitting() {
        // At N = 1 the interaction terms are multiples of the identity, so
        // the splitting is sqrt(eps^2 + 4 Omega^2) from the 2x2 diagonalization.
        let ops = build_operators(1).unwrap();
        let (eps, omega) = (0.7, -0.4);
        let params = constant_params(1, 1.3, 0.5, 0.2, eps, omega);
        let h = hamiltonian_at(&params, &ops, 0.0, HamiltonianKind::FullCorrections).unwrap();
        let eig = h.symmetric_eigen();
        let split = (eig.eigenvalues[0] - eig.eigenvalues[1]).abs();
        assert_abs_diff_eq!(
            split,
            (eps * eps + 4.0 * omega * omega).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn n2_diagonal_interaction() {
        let ops = build_operators(2).unwrap();
        let params = constant_params(2, 1.0, 0.0, 0.0, 0.0, 0.0);
        let h = hamiltonian_at(&params, &ops, 0.0, HamiltonianKind::OnSiteOnly).unwrap();
        for (k, expected) in [1.0, 0.0, 1.0].iter().enumerate() {
            assert_eq!(h[(k, k)].re, *expected);
        }
        assert_eq!(max_abs(&traceless_part(&h)), 2.0 / 3.0);
    }

    #[test]
    fn tunneling_shift_is_exact() {
        // Full(omega, ut) equals Full(omega + ut (N-1), ut = 0) as matrices.
        let ops = build_operators(7).unwrap();
        let (omega, ut) = (-0.6, 0.13);
        let shifted = omega + ut * 6.0;
        let a = constant_params(7, 0.4, ut, 0.05, 0.2, omega);
        let b = constant_params(7, 0.4, 0.0, 0.05, 0.2, shifted);
        let ha = hamiltonian_at(&a, &ops, 0.0, HamiltonianKind::FullCorrections).unwrap();
        let hb = hamiltonian_at(&b, &ops, 0.0, HamiltonianKind::FullCorrections).unwrap();
        assert_eq!(max_abs_diff(&ha, &hb), 0.0);
    }

    #[test]
    fn boson_oracle_matches_schwinger_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0b5e55);
        for n in 1..=6usize {
            let ops = build_operators(n).unwrap();
            for _ in 0..20 {
                let params = constant_params(
                    n,
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-0.5..0.5),
                    rng.gen_range(-0.5..0.5),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                );
                for kind in [
                    HamiltonianKind::OnSiteOnly,
                    HamiltonianKind::FullCorrections,
                ] {
                    let schwinger = hamiltonian_at(&params, &ops, 0.0, kind).unwrap();
                    let boson = boson_hamiltonian_at(&params, 0.0, kind).unwrap();
                    assert!(hermiticity_defect(&boson) < 1e-12);
                    let diff = max_abs_diff(&traceless_part(&schwinger), &traceless_part(&boson));
                    assert!(diff < 1e-10, "traceless mismatch {diff} at N={n}");
                }
            }
        }
    }

    #[test]
    fn boson_oracle_n1_matches_exactly_after_trace_removal() {
        let params = constant_params(1, 0.9, 0.1, 0.3, 0.5, -0.7);
        let ops = build_operators(1).unwrap();
        let a = traceless_part(
            &hamiltonian_at(&params, &ops, 0.0, HamiltonianKind::FullCorrections).unwrap(),
        );
        let b = traceless_part(
            &boson_hamiltonian_at(&params, 0.0, HamiltonianKind::FullCorrections).unwrap(),
        );
        assert!(max_abs_diff(&a, &b) < 1e-14);
    }

    #[test]
    fn schedule_domain_error_propagates() {
        let params = ModelParams {
            n_particles: 2,
            u0: 0.0,
            ut: 0.0,
            utt: 0.0,
            epsilon: Schedule::Tabulated {
                points: vec![(0.0, 0.0), (1.0, 1.0)],
            },
            omega: Schedule::constant(1.0),
        };
        let ops = build_operators(2).unwrap();
        assert!(hamiltonian_at(&params, &ops, 2.0, HamiltonianKind::OnSiteOnly).is_err());
    }

    #[test]
    fn scaled_and_offset_schedules() {
        let s = Schedule::PiecewiseLinear {
            points: vec![(0.0, 1.0), (2.0, 3.0)],
        };
        assert_eq!(s.scaled(-0.5).value_at(2.0).unwrap(), -1.5);
        assert_eq!(s.offset(1.0).value_at(0.0).unwrap(), 2.0);
    }
}

//! Extraction of the two-mode model parameters from a 1-D double-well
//! potential.
//!
//! The single-particle Hamiltonian H0 = -(1/2m) d^2/dx^2 + V(x) is
//! discretized with the 3-point stencil on a uniform grid (Dirichlet
//! boundaries). The two lowest eigenmodes give the symmetric/antisymmetric
//! pair; the localized modes are phi_{L,R} = (phi_sym -/+ phi_asym)/sqrt(2)
//! with phi_L concentrated at x < 0. All couplings are overlap integrals of
//! these modes evaluated with the same stencil and composite quadrature on
//! the grid.
//!
//! Only the three lowest eigenpairs are needed, so the symmetric
//! tridiagonal problem is solved by Sturm-sequence bisection plus shifted
//! inverse iteration instead of a dense decomposition; a dense route cross-
//! checks it in the tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Schedule};

/// 1-D potential shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    /// V(x) = beta (x^2 - a^2)^2, minima at +/- a, barrier beta a^4.
    Quartic { beta: f64, a: f64 },
    /// Two attractive Gaussian wells of equal depth centered at
    /// +/- separation/2.
    DoubleGaussian {
        depth: f64,
        separation: f64,
        sigma: f64,
    },
    /// Linear interpolation of (x, V) samples; must cover the grid.
    Tabulated { points: Vec<(f64, f64)> },
}

impl Potential {
    pub fn value_at(&self, x: f64) -> Result<f64> {
        match self {
            Potential::Quartic { beta, a } => {
                let q = x * x - a * a;
                Ok(beta * q * q)
            }
            Potential::DoubleGaussian {
                depth,
                separation,
                sigma,
            } => {
                let g = |c: f64| {
                    let arg = (x - c) / sigma;
                    (-0.5 * arg * arg).exp()
                };
                Ok(-depth * (g(-separation / 2.0) + g(separation / 2.0)))
            }
            Potential::Tabulated { points } => {
                let (lo, hi) = (points[0].0, points[points.len() - 1].0);
                if x < lo || x > hi {
                    return Err(Error::InvalidWellSpec(format!(
                        "tabulated potential covers [{lo}, {hi}] but the grid needs x = {x}"
                    )));
                }
                let idx = points.partition_point(|(xp, _)| *xp <= x);
                if idx == points.len() {
                    return Ok(points[points.len() - 1].1);
                }
                let (x0, v0) = points[idx - 1];
                let (x1, v1) = points[idx];
                Ok(v0 + (x - x0) / (x1 - x0) * (v1 - v0))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Potential::Quartic { beta, a } => {
                if !beta.is_finite() || !a.is_finite() {
                    return Err(Error::InvalidWellSpec(
                        "quartic parameters not finite".into(),
                    ));
                }
            }
            Potential::DoubleGaussian {
                depth,
                separation,
                sigma,
            } => {
                if !(*sigma > 0.0) {
                    return Err(Error::InvalidWellSpec(format!(
                        "gaussian wells need sigma > 0, got {sigma}"
                    )));
                }
                if !depth.is_finite() || !separation.is_finite() {
                    return Err(Error::InvalidWellSpec(
                        "gaussian parameters not finite".into(),
                    ));
                }
            }
            Potential::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidWellSpec(
                        "tabulated potential needs at least two samples".into(),
                    ));
                }
                if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::InvalidWellSpec(
                        "tabulated potential abscissae must be strictly increasing".into(),
                    ));
                }
                if points.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
                    return Err(Error::InvalidWellSpec(
                        "tabulated potential samples must be finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Uniform spatial grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1d {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid1d {
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points)
            .map(|i| self.x_min + i as f64 * dx)
            .collect()
    }

    /// Same endpoints, halved spacing.
    pub fn refined(&self) -> Grid1d {
        Grid1d {
            x_min: self.x_min,
            x_max: self.x_max,
            n_points: 2 * (self.n_points - 1) + 1,
        }
    }
}

/// Double-well problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellSpec {
    pub potential: Potential,
    pub grid: Grid1d,
    pub mass: f64,
    /// Effective 1-D interaction strength multiplying the overlap integrals.
    pub g_1d: f64,
}

impl WellSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.n_points < 128 {
            return Err(Error::InvalidWellSpec(format!(
                "need at least 128 grid points, got {}",
                self.grid.n_points
            )));
        }
        if !(self.grid.x_max > self.grid.x_min) {
            return Err(Error::InvalidWellSpec(format!(
                "need x_max > x_min, got [{}, {}]",
                self.grid.x_min, self.grid.x_max
            )));
        }
        if !(self.mass > 0.0) {
            return Err(Error::InvalidWellSpec(format!(
                "mass must be positive, got {}",
                self.mass
            )));
        }
        if !self.g_1d.is_finite() {
            return Err(Error::InvalidWellSpec("g_1d must be finite".into()));
        }
        self.potential.validate()?;
        for x in self.grid.xs() {
            if !self.potential.value_at(x)?.is_finite() {
                return Err(Error::InvalidWellSpec(format!(
                    "potential not finite at x = {x}"
                )));
            }
        }
        Ok(())
    }
}

/// Localized modes and the eigenvalues they were built from.
#[derive(Debug, Clone)]
pub struct ModeFunctions {
    pub xs: Vec<f64>,
    pub dx: f64,
    pub potential: Vec<f64>,
    pub mass: f64,
    /// Left-localized mode, continuum-normalized (integral of phi^2 dx = 1).
    pub phi_left: Vec<f64>,
    pub phi_right: Vec<f64>,
    pub energy_sym: f64,
    pub energy_asym: f64,
    /// Third level, for the two-mode validity gap.
    pub energy_third: f64,
    /// integral |phi_L phi_R| dx, the localization diagnostic.
    pub density_overlap: f64,
}

/// Solve for the two lowest eigenmodes and build the localized pair.
pub fn solve_modes(spec: &WellSpec) -> Result<ModeFunctions> {
    spec.validate()?;
    let xs = spec.grid.xs();
    let dx = spec.grid.dx();
    let potential: Vec<f64> = xs
        .iter()
        .map(|&x| spec.potential.value_at(x))
        .collect::<Result<_>>()?;

    check_double_well(&xs, &potential)?;

    // 3-point stencil: diag 1/(m dx^2) + V, offdiag -1/(2 m dx^2)
    let kinetic = 1.0 / (spec.mass * dx * dx);
    let diag: Vec<f64> = potential.iter().map(|v| kinetic + v).collect();
    let off = vec![-0.5 * kinetic; diag.len() - 1];

    // Mirror-symmetric problems are split into even/odd parity sectors.
    // Each doublet member is then the ground state of its own sector with
    // an O(level spacing) gap, which keeps the exponentially small
    // tunneling splitting free of degenerate-pair mixing noise.
    let eigen = if is_mirror_symmetric(&xs, &potential) {
        parity_eigenpairs(&diag, &off)?
    } else {
        lowest_eigenpairs(&diag, &off, 3)?
    };
    let (e0, e1, e2) = (eigen[0].0, eigen[1].0, eigen[2].0);

    let barrier = barrier_top(&xs, &potential)?;
    if e0 >= barrier || e1 >= barrier {
        return Err(Error::BarrierTooLow { e0, e1, barrier });
    }

    // Continuum normalization and deterministic signs: the node-free ground
    // state integrates positive, the antisymmetric mode is positive on the
    // right.
    let scale = 1.0 / dx.sqrt();
    let mut sym: Vec<f64> = eigen[0].1.iter().map(|v| v * scale).collect();
    let mut asym: Vec<f64> = eigen[1].1.iter().map(|v| v * scale).collect();
    if sym.iter().sum::<f64>() < 0.0 {
        sym.iter_mut().for_each(|v| *v = -*v);
    }
    let right_mass: f64 = xs
        .iter()
        .zip(asym.iter())
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, v)| v)
        .sum();
    if right_mass < 0.0 {
        asym.iter_mut().for_each(|v| *v = -*v);
    }

    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let phi_left: Vec<f64> = sym
        .iter()
        .zip(asym.iter())
        .map(|(s, a)| (s - a) * inv_sqrt2)
        .collect();
    let phi_right: Vec<f64> = sym
        .iter()
        .zip(asym.iter())
        .map(|(s, a)| (s + a) * inv_sqrt2)
        .collect();

    let density_overlap: f64 = phi_left
        .iter()
        .zip(phi_right.iter())
        .map(|(l, r)| (l * r).abs())
        .sum::<f64>()
        * dx;

    Ok(ModeFunctions {
        xs,
        dx,
        potential,
        mass: spec.mass,
        phi_left,
        phi_right,
        energy_sym: e0,
        energy_asym: e1,
        energy_third: e2,
        density_overlap,
    })
}

fn check_double_well(xs: &[f64], v: &[f64]) -> Result<()> {
    let n = v.len();
    let mut minima = Vec::new();
    for i in 1..n - 1 {
        if v[i] < v[i - 1] && v[i] <= v[i + 1] {
            minima.push(i);
        }
    }
    if minima.len() < 2 {
        return Err(Error::NotDoubleWell(format!(
            "found {} local minimum/minima on [{}, {}]",
            minima.len(),
            xs[0],
            xs[n - 1]
        )));
    }
    Ok(())
}

fn barrier_top(xs: &[f64], v: &[f64]) -> Result<f64> {
    let n = v.len();
    let mut minima = Vec::new();
    for i in 1..n - 1 {
        if v[i] < v[i - 1] && v[i] <= v[i + 1] {
            minima.push(i);
        }
    }
    let first = *minima.first().ok_or_else(|| {
        Error::NotDoubleWell(format!("no local minima on [{}, {}]", xs[0], xs[n - 1]))
    })?;
    let last = *minima.last().unwrap();
    Ok(v[first..=last]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Static model parameters extracted from the overlap integrals, plus the
/// two-mode validity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellParameters {
    pub eps_left: f64,
    pub eps_right: f64,
    pub omega: f64,
    pub u0: f64,
    pub ut: f64,
    pub utt: f64,
    pub validity: TwoModeValidity,
}

/// Ratios the two-mode truncation relies on being small.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeValidity {
    /// |Omega| over the gap to the third level.
    pub omega_over_gap: f64,
    pub ut_over_u0: f64,
    pub utt_over_u0: f64,
    /// integral |phi_L phi_R| dx.
    pub density_overlap: f64,
    /// |U0(left) - U0(right)|, zero for symmetric wells.
    pub u0_parity_gap: f64,
    /// |Ut(left) - Ut(right)|.
    pub ut_parity_gap: f64,
}

impl WellParameters {
    /// Chemical-potential difference eps_R - eps_L.
    pub fn epsilon(&self) -> f64 {
        self.eps_right - self.eps_left
    }

    /// Package as model parameters with constant schedules.
    pub fn into_model(self, n_particles: usize) -> ModelParams {
        ModelParams {
            n_particles,
            u0: self.u0,
            ut: self.ut,
            utt: self.utt,
            epsilon: Schedule::constant(self.epsilon()),
            omega: Schedule::constant(self.omega),
        }
    }
}

/// Overlap-integral couplings on the computed modes:
/// eps_{L,R} = <phi_{L,R}|H0|phi_{L,R}>, Omega = <phi_L|H0|phi_R>,
/// U0 = g int phi_L^4, Ut = g int phi_L^3 phi_R, Utt = g int phi_L^2 phi_R^2.
pub fn compute_parameters(modes: &ModeFunctions, spec: &WellSpec) -> WellParameters {
    let dx = modes.dx;
    let g = spec.g_1d;
    let h0_left = apply_h0(modes, &modes.phi_left);
    let h0_right = apply_h0(modes, &modes.phi_right);

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>() * dx;

    let eps_left = dot(&modes.phi_left, &h0_left);
    let eps_right = dot(&modes.phi_right, &h0_right);
    let omega = dot(&modes.phi_left, &h0_right);

    let quart = |a: &[f64]| a.iter().map(|x| x.powi(4)).sum::<f64>() * dx;
    let u0_left = g * quart(&modes.phi_left);
    let u0_right = g * quart(&modes.phi_right);

    let ut_left = g
        * modes
            .phi_left
            .iter()
            .zip(modes.phi_right.iter())
            .map(|(l, r)| l * l * l * r)
            .sum::<f64>()
        * dx;
    let ut_right = g
        * modes
            .phi_left
            .iter()
            .zip(modes.phi_right.iter())
            .map(|(l, r)| r * r * r * l)
            .sum::<f64>()
        * dx;

    let utt = g
        * modes
            .phi_left
            .iter()
            .zip(modes.phi_right.iter())
            .map(|(l, r)| (l * r) * (l * r))
            .sum::<f64>()
        * dx;

    let gap = modes.energy_third - modes.energy_asym;
    let rel = |num: f64, den: f64| {
        if den.abs() > 0.0 {
            (num / den).abs()
        } else {
            0.0
        }
    };

    WellParameters {
        eps_left,
        eps_right,
        omega,
        u0: u0_left,
        ut: ut_left,
        utt,
        validity: TwoModeValidity {
            omega_over_gap: rel(omega, gap),
            ut_over_u0: rel(ut_left, u0_left),
            utt_over_u0: rel(utt, u0_left),
            density_overlap: modes.density_overlap,
            u0_parity_gap: (u0_left - u0_right).abs(),
            ut_parity_gap: (ut_left - ut_right).abs(),
        },
    }
}

/// H0 phi with the same stencil used in the eigensolve.
fn apply_h0(modes: &ModeFunctions, phi: &[f64]) -> Vec<f64> {
    let n = phi.len();
    let k = 0.5 / (modes.mass * modes.dx * modes.dx);
    (0..n)
        .map(|i| {
            let left = if i > 0 { phi[i - 1] } else { 0.0 };
            let right = if i + 1 < n { phi[i + 1] } else { 0.0 };
            -k * (left - 2.0 * phi[i] + right) + modes.potential[i] * phi[i]
        })
        .collect()
}

/// Parameter extraction with a grid-convergence gate: the spec grid and its
/// halved-spacing refinement must agree to `rel_tol` relative on every
/// parameter; the refined values are reported.
#[derive(Debug, Clone, Serialize)]
pub struct ExtractionReport {
    pub parameters: WellParameters,
    pub coarse: WellParameters,
    pub grid_points: (usize, usize),
    pub max_relative_change: f64,
    pub energy_sym: f64,
    pub energy_asym: f64,
}

pub fn extract_parameters(spec: &WellSpec, rel_tol: f64) -> Result<ExtractionReport> {
    let modes = solve_modes(spec)?;
    let coarse = compute_parameters(&modes, spec);

    let mut fine_spec = spec.clone();
    fine_spec.grid = spec.grid.refined();
    let fine_modes = solve_modes(&fine_spec)?;
    let fine = compute_parameters(&fine_modes, &fine_spec);

    let pairs = [
        (coarse.eps_left, fine.eps_left),
        (coarse.eps_right, fine.eps_right),
        (coarse.omega, fine.omega),
        (coarse.u0, fine.u0),
        (coarse.ut, fine.ut),
        (coarse.utt, fine.utt),
    ];
    let max_relative_change = pairs
        .iter()
        .map(|(a, b)| {
            let scale = a.abs().max(b.abs());
            if scale < 1e-14 {
                0.0
            } else {
                (a - b).abs() / scale
            }
        })
        .fold(0.0, f64::max);

    if max_relative_change > rel_tol {
        return Err(Error::GridTooCoarse {
            change: max_relative_change,
            tolerance: rel_tol,
        });
    }

    Ok(ExtractionReport {
        parameters: fine,
        coarse,
        grid_points: (spec.grid.n_points, fine_spec.grid.n_points),
        max_relative_change,
        energy_sym: fine_modes.energy_sym,
        energy_asym: fine_modes.energy_asym,
    })
}

// ---------------------------------------------------------------------------
// Parity decomposition for mirror-symmetric potentials
// ---------------------------------------------------------------------------

fn is_mirror_symmetric(xs: &[f64], v: &[f64]) -> bool {
    let n = xs.len();
    let span = xs[n - 1] - xs[0];
    if (xs[0] + xs[n - 1]).abs() > 1e-12 * span {
        return false;
    }
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
    (0..n / 2).all(|i| (v[i] - v[n - 1 - i]).abs() <= 1e-12 * scale)
}

/// Lowest three levels of a mirror-symmetric problem: the even and odd
/// sectors are solved on the half grid (with a sqrt(2)-weighted center for
/// odd point counts, so the reduced matrices stay symmetric and sector
/// vectors keep unit full-grid norm), and the doublet is reassembled with
/// exact parity.
fn parity_eigenpairs(diag: &[f64], off: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = diag.len();
    let e = off[0];
    let sqrt2 = std::f64::consts::SQRT_2;

    let (even_diag, even_off, odd_diag, odd_off, center) = if n % 2 == 1 {
        let c = (n - 1) / 2;
        let m = c; // points strictly right of center
        let mut even_d = Vec::with_capacity(m + 1);
        let mut even_o = Vec::with_capacity(m);
        even_d.push(diag[c]);
        even_o.push(sqrt2 * e);
        for j in 1..=m {
            even_d.push(diag[c + j]);
            if j < m {
                even_o.push(e);
            }
        }
        let odd_d: Vec<f64> = (1..=m).map(|j| diag[c + j]).collect();
        let odd_o = vec![e; m - 1];
        (even_d, even_o, odd_d, odd_o, Some(c))
    } else {
        let c2 = n / 2;
        let m = n / 2;
        let mut even_d: Vec<f64> = (0..m).map(|j| diag[c2 + j]).collect();
        even_d[0] += e; // phi(c2 - 1) = phi(c2)
        let mut odd_d: Vec<f64> = (0..m).map(|j| diag[c2 + j]).collect();
        odd_d[0] -= e; // phi(c2 - 1) = -phi(c2)
        let even_o = vec![e; m - 1];
        let odd_o = vec![e; m - 1];
        (even_d, even_o, odd_d, odd_o, None)
    };

    let even = lowest_eigenpairs(&even_diag, &even_off, 2)?;
    let odd = lowest_eigenpairs(&odd_diag, &odd_off, 2)?;

    let expand_even = |y: &[f64]| -> Vec<f64> {
        let mut phi = vec![0.0; n];
        match center {
            Some(c) => {
                phi[c] = y[0];
                for j in 1..y.len() {
                    phi[c + j] = y[j] / sqrt2;
                    phi[c - j] = phi[c + j];
                }
            }
            None => {
                let c2 = n / 2;
                for (j, val) in y.iter().enumerate() {
                    phi[c2 + j] = val / sqrt2;
                    phi[c2 - 1 - j] = phi[c2 + j];
                }
            }
        }
        phi
    };
    let expand_odd = |y: &[f64]| -> Vec<f64> {
        let mut phi = vec![0.0; n];
        match center {
            Some(c) => {
                for (j, val) in y.iter().enumerate() {
                    phi[c + 1 + j] = val / sqrt2;
                    phi[c - 1 - j] = -phi[c + 1 + j];
                }
            }
            None => {
                let c2 = n / 2;
                for (j, val) in y.iter().enumerate() {
                    phi[c2 + j] = val / sqrt2;
                    phi[c2 - 1 - j] = -phi[c2 + j];
                }
            }
        }
        phi
    };

    let e2 = even[1].0.min(odd[1].0);
    Ok(vec![
        (even[0].0, expand_even(&even[0].1)),
        (odd[0].0, expand_odd(&odd[0].1)),
        (e2, Vec::new()),
    ])
}

// ---------------------------------------------------------------------------
// Symmetric tridiagonal eigensolver: Sturm bisection + inverse iteration
// ---------------------------------------------------------------------------

/// Number of eigenvalues of the tridiagonal matrix strictly below x,
/// from the Sturm sequence of leading-principal-minor pivots.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE;
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q.abs() < tiny {
            tiny.copysign(q + tiny)
        } else {
            q
        };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` lowest eigenpairs, eigenvectors l2-normalized and mutually
/// orthogonal.
fn lowest_eigenpairs(diag: &[f64], off: &[f64], count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = diag.len();
    assert!(count <= n);

    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i == 0 { 0.0 } else { off[i - 1].abs() }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = hi.abs().max(lo.abs()).max(1.0);

    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    for k in 0..count {
        let mut a = lo;
        let mut b = hi;
        // bisection on the count function
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if sturm_count(diag, off, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 4.0 * f64::EPSILON * scale {
                break;
            }
        }
        let lambda = 0.5 * (a + b);
        let prior: Vec<&Vec<f64>> = out.iter().map(|(_, v)| v).collect();
        let (refined, vector) = inverse_iteration(diag, off, lambda, k, &prior, scale)?;
        out.push((refined, vector));
    }
    Ok(out)
}

/// Shifted inverse iteration with Gram-Schmidt against already-found
/// vectors (needed for nearly degenerate tunneling doublets). Returns the
/// Rayleigh-quotient eigenvalue and the vector.
fn inverse_iteration(
    diag: &[f64],
    off: &[f64],
    shift: f64,
    index: usize,
    prior: &[&Vec<f64>],
    scale: f64,
) -> Result<(f64, Vec<f64>)> {
    let n = diag.len();

    // Start vectors biased toward the expected parity of the mode: even for
    // the ground state, odd for the first excited state.
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64 - 0.5;
            match index % 2 {
                0 => 1.0 + 0.5 * (std::f64::consts::PI * s).cos(),
                _ => s,
            }
        })
        .collect();
    orthogonalize(&mut v, prior);
    normalize(&mut v);

    // Iterate to the rounding floor; near-degenerate tunneling doublets
    // need the residual at machine level or the pair mixes.
    let mut lambda = shift;
    let mut best_res = f64::INFINITY;
    for _ in 0..50 {
        let mut next = solve_shifted(diag, off, shift, &v, scale);
        orthogonalize(&mut next, prior);
        let grew = normalize(&mut next);
        if grew == 0.0 {
            return Err(Error::EigenFailure(
                "inverse iteration produced a zero vector".into(),
            ));
        }
        v = next;
        lambda = rayleigh(diag, off, &v);
        let res = residual(diag, off, lambda, &v);
        if res <= 4.0 * f64::EPSILON * scale || res >= 0.5 * best_res {
            break;
        }
        best_res = res;
    }

    let res = residual(diag, off, lambda, &v);
    if res > 1e-8 * scale {
        return Err(Error::EigenFailure(format!(
            "inverse iteration residual {res:.3e} did not converge (level {index})"
        )));
    }
    // Deterministic overall sign
    if v.iter().sum::<f64>() < 0.0 || (v.iter().sum::<f64>() == 0.0 && v[0] < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok((lambda, v))
}

/// Solve (T - shift I) y = b for tridiagonal T with partial pivoting.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, b: &[f64], scale: f64) -> Vec<f64> {
    let n = diag.len();
    let tiny = 1e-300_f64.max(f64::EPSILON * scale * 1e-3);

    // band storage: main, upper1, upper2
    let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
    let mut u1: Vec<f64> = off.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut rhs = b.to_vec();

    // forward elimination with row swaps
    for i in 0..n - 1 {
        let sub = off[i];
        if sub.abs() > d[i].abs() {
            // swap row i and i+1
            let (di, u1i, u2i, ri) = (d[i], u1[i], u2[i], rhs[i]);
            d[i] = sub;
            u1[i] = d[i + 1];
            u2[i] = u1[i + 1];
            rhs[i] = rhs[i + 1];
            d[i + 1] = u1i;
            u1[i + 1] = u2i;
            rhs[i + 1] = ri;
            let pivot = if d[i].abs() < tiny {
                tiny.copysign(d[i])
            } else {
                d[i]
            };
            let m = di / pivot;
            d[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            rhs[i + 1] -= m * rhs[i];
        } else {
            let pivot = if d[i].abs() < tiny {
                tiny.copysign(d[i])
            } else {
                d[i]
            };
            let m = sub / pivot;
            d[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            rhs[i + 1] -= m * rhs[i];
        }
    }

    // back substitution
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        if i + 1 < n {
            acc -= u1[i] * y[i + 1];
        }
        if i + 2 < n {
            acc -= u2[i] * y[i + 2];
        }
        let pivot = if d[i].abs() < tiny {
            tiny.copysign(d[i])
        } else {
            d[i]
        };
        y[i] = acc / pivot;
    }
    y
}

fn orthogonalize(v: &mut [f64], prior: &[&Vec<f64>]) {
    for p in prior {
        let proj: f64 = v.iter().zip(p.iter()).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(p.iter()).for_each(|(a, b)| *a -= proj * b);
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn rayleigh(diag: &[f64], off: &[f64], v: &[f64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut tv = diag[i] * v[i];
        if i > 0 {
            tv += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            tv += off[i] * v[i + 1];
        }
        acc += v[i] * tv;
    }
    acc
}

fn residual(diag: &[f64], off: &[f64], lambda: f64, v: &[f64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut tv = (diag[i] - lambda) * v[i];
        if i > 0 {
            tv += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            tv += off[i] * v[i + 1];
        }
        acc += tv * tv;
    }
    acc.sqrt()
}

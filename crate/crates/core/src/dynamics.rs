//! Time-domain integration of the linear mode equations.
//!
//! Frequencies are `ω/2π` in MHz and times are in µs, so every generator is
//! multiplied by [`TWO_PI`] before it acts on the state: `V̇ = −2πi·H·V`. The
//! drive term of the lossy equations is scaled the same way, which makes its
//! steady state coincide with the frequency-domain amplitude evaluated in MHz.
//!
//! Integration always runs in a rotating frame (the cavity frequency for free
//! evolution, the drive frequency for driven evolution); the stored states are
//! rotated back to the lab frame.

use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{EffectiveHamiltonian, SystemParams};
use crate::scattering::DriveSpec;
use crate::spectral::{self, Tolerance};

/// Converts an MHz-valued generator into a per-µs angular rate.
pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Largest accepted `dt · 2π · spectral radius`.
pub const STEP_BOUND: f64 = 0.05;

/// Eigenvector-matrix condition number above which the exact propagator is refused.
pub const MAX_CONDITION: f64 = 1e8;

const DIVERGENCE_FACTOR: f64 = 1e12;

pub type State = [Complex64; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    /// Sample times in µs, strictly increasing.
    pub times: Vec<f64>,
    /// `(a, b₁, b₂)` at each sample time.
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, State)> {
        Some((*self.times.last()?, *self.states.last()?))
    }

    /// Slowly varying envelope relative to a carrier at `omega` (MHz).
    pub fn envelope(&self, omega: f64) -> Vec<State> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| {
                let ph = Complex64::from_polar(1.0, TWO_PI * omega * t);
                s.map(|z| z * ph)
            })
            .collect()
    }

    /// CSV with columns `time` and the real/imaginary parts of the three amplitudes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,re_a,im_a,re_b1,im_b1,re_b2,im_b2\n");
        for (t, s) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{}", crate::sweep::fmt_num(*t));
            for z in s {
                let _ = write!(out, ",{},{}", crate::sweep::fmt_num(z.re), crate::sweep::fmt_num(z.im));
            }
            out.push('\n');
        }
        out
    }
}

/// Free-evolution strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagation {
    /// Exact propagator when diagonalizable, stepper otherwise.
    #[default]
    Auto,
    /// Fixed-step fourth-order Runge–Kutta.
    Stepper,
    /// Eigendecomposition of the generator.
    Exact,
}

type Mat = [[Complex64; 3]; 3];

fn mat_vec(m: &Mat, v: &State) -> State {
    let mut out = [ZERO; 3];
    for i in 0..3 {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    out
}

fn norm(v: &State) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn spectral_radius(m: &Mat) -> f64 {
    let e = spectral::eigenvalues(&EffectiveHamiltonian::from_entries(*m), &Tolerance::default());
    e.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest stable step (µs) for a generator with entries in MHz.
pub fn max_step(m: &Mat) -> f64 {
    let rho = spectral_radius(m);
    if rho == 0.0 {
        f64::INFINITY
    } else {
        STEP_BOUND / (TWO_PI * rho)
    }
}

fn check_step(m: &Mat, dt: f64, t_final: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_final must be >= 0, got {t_final}")));
    }
    let bound = max_step(m);
    if dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    Ok(())
}

/// Uniform grid with step at most `dt` that ends exactly at `t_final`.
fn time_grid(t_final: f64, dt: f64) -> (usize, f64) {
    if t_final == 0.0 {
        return (0, dt);
    }
    let n = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    (n, t_final / n as f64)
}

/// RK4 for `v̇ = 2π(−i·m·v + f)`.
fn rk4(m: &Mat, forcing: &State, v0: &State, steps: usize, dt: f64) -> Result<Vec<State>> {
    let mi = m.map(|row| row.map(|z| z * Complex64::new(0.0, -TWO_PI)));
    let f = forcing.map(|z| z * TWO_PI);
    let rhs = |v: &State| -> State {
        let mv = mat_vec(&mi, v);
        [mv[0] + f[0], mv[1] + f[1], mv[2] + f[2]]
    };
    let axpy = |v: &State, k: &State, a: f64| -> State { [v[0] + k[0] * a, v[1] + k[1] * a, v[2] + k[2] * a] };
    let limit = DIVERGENCE_FACTOR * norm(v0).max(norm(forcing)).max(f64::MIN_POSITIVE);

    let mut out = Vec::with_capacity(steps + 1);
    let mut v = *v0;
    out.push(v);
    for n in 0..steps {
        let k1 = rhs(&v);
        let k2 = rhs(&axpy(&v, &k1, 0.5 * dt));
        let k3 = rhs(&axpy(&v, &k2, 0.5 * dt));
        let k4 = rhs(&axpy(&v, &k3, dt));
        for i in 0..3 {
            v[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        if !(norm(&v) <= limit) {
            return Err(Error::DivergenceDetected { time: (n + 1) as f64 * dt });
        }
        out.push(v);
    }
    Ok(out)
}

fn cross(a: &State, b: &State) -> State {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Right eigenvectors as the columns of a matrix, plus its inverse and condition number.
pub struct Eigendecomposition {
    pub values: [Complex64; 3],
    pub vectors: Matrix3<Complex64>,
    pub inverse: Matrix3<Complex64>,
    pub condition: f64,
}

/// Eigendecomposition of `m`; fails when the eigenvector matrix is ill-conditioned.
pub fn eigendecompose(m: &Mat) -> Result<Eigendecomposition> {
    let is_diagonal = (0..3).all(|i| (0..3).all(|j| i == j || m[i][j] == ZERO));
    if is_diagonal {
        return Ok(Eigendecomposition {
            values: [m[0][0], m[1][1], m[2][2]],
            vectors: Matrix3::identity(),
            inverse: Matrix3::identity(),
            condition: 3.0,
        });
    }
    let e = spectral::eigenvalues(&EffectiveHamiltonian::from_entries(*m), &Tolerance::default());
    let mut cols = Vec::with_capacity(3);
    for &lambda in &e.values {
        let mut a = *m;
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= lambda;
        }
        let candidates = [cross(&a[0], &a[1]), cross(&a[0], &a[2]), cross(&a[1], &a[2])];
        let best = candidates
            .iter()
            .max_by(|x, y| norm(x).total_cmp(&norm(y)))
            .copied()
            .unwrap();
        let n = norm(&best);
        if n == 0.0 {
            return Err(Error::NotDiagonalizable { condition: f64::INFINITY });
        }
        cols.push(Vector3::from_iterator(best.iter().map(|z| z / n)));
    }
    let vectors = Matrix3::from_columns(&cols);
    let inverse = vectors
        .try_inverse()
        .ok_or(Error::NotDiagonalizable { condition: f64::INFINITY })?;
    let condition = vectors.norm() * inverse.norm();
    if !(condition < MAX_CONDITION) {
        return Err(Error::NotDiagonalizable { condition });
    }
    Ok(Eigendecomposition { values: e.values, vectors, inverse, condition })
}

fn exact_states(m: &Mat, v0: &State, steps: usize, dt: f64) -> Result<Vec<State>> {
    let eig = eigendecompose(m)?;
    let coeffs = eig.inverse * Vector3::new(v0[0], v0[1], v0[2]);
    let limit = DIVERGENCE_FACTOR * norm(v0).max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(steps + 1);
    for n in 0..=steps {
        let t = n as f64 * dt;
        let w = Vector3::from_fn(|i, _| {
            coeffs[i] * (Complex64::new(0.0, -TWO_PI * t) * eig.values[i]).exp()
        });
        let v = eig.vectors * w;
        let s = [v[0], v[1], v[2]];
        if !(norm(&s) <= limit) {
            return Err(Error::DivergenceDetected { time: t });
        }
        out.push(s);
    }
    Ok(out)
}

fn rotate_out(states: Vec<State>, omega: f64, dt: f64) -> Trajectory {
    let times: Vec<f64> = (0..states.len()).map(|n| n as f64 * dt).collect();
    let states = times
        .iter()
        .zip(states)
        .map(|(&t, s)| {
            let ph = Complex64::from_polar(1.0, -TWO_PI * omega * t);
            s.map(|z| z * ph)
        })
        .collect();
    Trajectory { times, states }
}

/// Solves `V̇ = −2πi·H·V` from `v0` up to `t_final`.
pub fn evolve_free(h: &EffectiveHamiltonian, v0: State, t_final: f64, dt: f64) -> Result<Trajectory> {
    evolve_free_with(h, v0, t_final, dt, Propagation::Auto)
}

pub fn evolve_free_with(
    h: &EffectiveHamiltonian,
    v0: State,
    t_final: f64,
    dt: f64,
    method: Propagation,
) -> Result<Trajectory> {
    let offset = h.frame_offset();
    let m = h.shifted(offset).entries;
    check_step(&m, dt, t_final)?;
    let (steps, dt) = time_grid(t_final, dt);
    let states = match method {
        Propagation::Stepper => rk4(&m, &[ZERO; 3], &v0, steps, dt)?,
        Propagation::Exact => exact_states(&m, &v0, steps, dt)?,
        Propagation::Auto => match exact_states(&m, &v0, steps, dt) {
            Err(Error::NotDiagonalizable { .. }) => rk4(&m, &[ZERO; 3], &v0, steps, dt)?,
            other => other?,
        },
    };
    Ok(rotate_out(states, offset, dt))
}

/// Generator of the physical lossy equations (all port and intrinsic losses on the cavity).
pub fn lossy_generator(params: &SystemParams) -> EffectiveHamiltonian {
    let c = &params.cavity;
    let mut h = EffectiveHamiltonian::build(params);
    h.entries[0][0] = Complex64::new(c.omega_c, -c.total_decay());
    h
}

/// Integrates the driven lossy equations from the vacuum with inputs `aᵢⁱⁿ e^{−2πiωt}`.
pub fn evolve_driven(params: &SystemParams, drive: &DriveSpec, t_final: f64, dt: f64) -> Result<Trajectory> {
    evolve_driven_from(params, drive, [ZERO; 3], t_final, dt)
}

pub fn evolve_driven_from(
    params: &SystemParams,
    drive: &DriveSpec,
    v0: State,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !drive.omega.is_finite() {
        return Err(Error::InvalidParameter("drive frequency must be finite".into()));
    }
    let m = lossy_generator(params).shifted(drive.omega).entries;
    check_step(&m, dt, t_final)?;
    let (steps, dt) = time_grid(t_final, dt);
    let c = &params.cavity;
    let feed = drive.a1_in * (2.0 * c.kappa_1).sqrt() + drive.a2_in * (2.0 * c.kappa_2).sqrt();
    let states = rk4(&m, &[feed, ZERO, ZERO], &v0, steps, dt)?;
    Ok(rotate_out(states, drive.omega, dt))
}

/// Recovers the three complex eigenfrequencies of `h` from a stepped trajectory.
///
/// The state is propagated with the Runge–Kutta stepper. A one-step propagator
/// over a lag `Δ` is fitted by least squares to normalized snapshot pairs and
/// the frequencies follow from the logarithms of its eigenvalues,
/// `Ω = ω_ref + i·ln μ / (2πΔ)`.
pub fn modal_rates(h: &EffectiveHamiltonian, v0: State, t_final: f64, dt: f64) -> Result<[Complex64; 3]> {
    let offset = h.frame_offset();
    let m = h.shifted(offset).entries;
    check_step(&m, dt, t_final)?;
    let (steps, dt) = time_grid(t_final, dt);
    let states = rk4(&m, &[ZERO; 3], &v0, steps, dt)?;

    let rho = spectral_radius(&m);
    let longest = (steps / 4).max(1);
    let lag = if rho > 0.0 {
        ((1.0 / (TWO_PI * rho * dt)).floor() as usize).clamp(1, longest)
    } else {
        longest
    };
    if steps < 8 {
        return Err(Error::InvalidParameter("trajectory too short for a modal fit".into()));
    }
    let rows = steps + 1 - lag;
    let mut x = DMatrix::<Complex64>::zeros(rows, 3);
    let mut y = DMatrix::<Complex64>::zeros(rows, 3);
    for n in 0..rows {
        let w = norm(&states[n]);
        if w == 0.0 {
            continue;
        }
        for j in 0..3 {
            x[(n, j)] = states[n][j] / w;
            y[(n, j)] = states[n + lag][j] / w;
        }
    }
    // rows solve x · Pᵀ = y
    let svd = x.svd(true, true);
    let sv = &svd.singular_values;
    if !(sv.min() > 1e-10 * sv.max()) {
        return Err(Error::InvalidParameter("initial state does not excite all three modes".into()));
    }
    let pt = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::InvalidParameter(format!("modal fit failed: {e}")))?;
    let p = Matrix3::from_fn(|i, j| pt[(j, i)]);
    let mu = p
        .schur()
        .eigenvalues()
        .expect("complex Schur form is always triangular");

    let tau = TWO_PI * lag as f64 * dt;
    let mut rates = [ZERO; 3];
    for i in 0..3 {
        if mu[i].norm() == 0.0 {
            return Err(Error::DegenerateSpectrum { separation: 0.0, limit: 0.0 });
        }
        rates[i] = Complex64::new(0.0, 1.0) * mu[i].ln() / tau + offset;
    }
    rates.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let resolution = 1.0 / (TWO_PI * t_final);
    let limit = 10.0 * resolution;
    let mut separation = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            separation = separation.min((rates[i] - rates[j]).norm());
        }
    }
    if separation < limit {
        return Err(Error::DegenerateSpectrum { separation, limit });
    }
    Ok(rates)
}

//! Secular-equation solving, spectral classification and exceptional-point location.
//!
//! The generic route builds the monic characteristic polynomial of the
//! effective Hamiltonian in the detuning frame and takes the eigenvalues of
//! its companion matrix. A closed-form cubic solver is kept alongside: the two
//! are cross-checked because roots near a triple point move like `ε^{1/3}`.

use std::cmp::Ordering;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{cubic_coefficients, EffectiveHamiltonian, PseudoHermitianFamily};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralClass {
    AllReal,
    OneRealPlusConjugatePair,
    Unconstrained,
}

impl SpectralClass {
    pub fn code(self) -> u8 {
        match self {
            SpectralClass::AllReal => 0,
            SpectralClass::OneRealPlusConjugatePair => 1,
            SpectralClass::Unconstrained => 2,
        }
    }
}

/// Relative tolerances used when classifying a spectrum.
///
/// Both are multiplied by the spectral scale `max(rate scale, spread)`.
/// `real` decides whether an eigenvalue counts as real. `coalesce` is the
/// radius used for counting coalesced eigenvalues and for conjugation closure;
/// it is much looser because a triple root only resolves to about `ε^{1/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub real: f64,
    pub coalesce: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { real: 1e-7, coalesce: 1e-4 }
    }
}

impl Tolerance {
    pub fn with_real(real: f64) -> Self {
        Self { real, ..Self::default() }
    }
}

/// Three eigenfrequencies in canonical order plus their classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenTriple {
    /// Absolute frequencies, sorted by real part then imaginary part.
    pub values: [Complex64; 3],
    /// Reference frequency of the detuning frame (`ω_c`).
    pub omega_ref: f64,
    pub classification: SpectralClass,
    pub coalescence_order: u8,
    /// Which entries were judged real.
    pub real_mask: [bool; 3],
    pub scale: f64,
}

fn canonical_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn spread(values: &[Complex64; 3]) -> f64 {
    let mut s = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            s = s.max((values[i] - values[j]).norm());
        }
    }
    s
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Smallest `max_i |λ_i − conj(λ_σ(i))|` over permutations `σ`.
pub fn conjugation_closure_error(values: &[Complex64; 3]) -> f64 {
    PERMUTATIONS
        .iter()
        .map(|p| {
            (0..3)
                .map(|i| (values[i] - values[p[i]].conj()).norm())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Smallest `max_i |a_i − b_σ(i)|`: multiset distance of two triples.
pub fn multiset_distance(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    PERMUTATIONS
        .iter()
        .map(|p| (0..3).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

impl EigenTriple {
    /// Sorts and classifies `values`. `rate_scale` is the loss/gain scale of
    /// the generating matrix and keeps the tolerance meaningful when all
    /// three eigenvalues coalesce.
    pub fn new(mut values: [Complex64; 3], omega_ref: f64, rate_scale: f64, tol: &Tolerance) -> Self {
        values.sort_by(canonical_cmp);
        let detunings = values.map(|v| v - omega_ref);
        let mut scale = rate_scale.max(spread(&detunings));
        if !(scale > 0.0) {
            scale = 1.0;
        }
        let real_cut = tol.real * scale;
        let loose_cut = tol.coalesce * scale;

        let mut real_mask = values.map(|v| v.im.abs() < real_cut);
        let classification = if real_mask.iter().all(|&r| r) {
            SpectralClass::AllReal
        } else {
            let closure = conjugation_closure_error(&values);
            let most_real = (0..3)
                .min_by(|&i, &j| values[i].im.abs().total_cmp(&values[j].im.abs()))
                .unwrap();
            if closure < loose_cut && values[most_real].im.abs() < loose_cut {
                real_mask = [false; 3];
                real_mask[most_real] = true;
                SpectralClass::OneRealPlusConjugatePair
            } else {
                SpectralClass::Unconstrained
            }
        };

        let mut order = 1u8;
        for i in 0..3 {
            let n = (0..3).filter(|&j| (values[i] - values[j]).norm() < loose_cut).count() as u8;
            order = order.max(n);
        }

        Self { values, omega_ref, classification, coalescence_order: order, real_mask, scale }
    }

    pub fn detunings(&self) -> [Complex64; 3] {
        self.values.map(|v| v - self.omega_ref)
    }

    /// Real parts of the eigenvalues judged real, in the detuning frame, ascending.
    pub fn real_detunings(&self) -> Vec<f64> {
        (0..3)
            .filter(|&i| self.real_mask[i])
            .map(|i| self.values[i].re - self.omega_ref)
            .collect()
    }
}

fn eval_monic(c: &[Complex64; 3], x: Complex64) -> (Complex64, Complex64) {
    let p = ((x + c[0]) * x + c[1]) * x + c[2];
    let dp = (x * 3.0 + c[0] * 2.0) * x + c[1];
    (p, dp)
}

fn polish(c: &[Complex64; 3], mut x: Complex64) -> Complex64 {
    for _ in 0..4 {
        let (p, dp) = eval_monic(c, x);
        if p == ZERO || dp == ZERO {
            break;
        }
        let next = x - p / dp;
        if !next.is_finite() || eval_monic(c, next).0.norm() >= p.norm() {
            break;
        }
        x = next;
    }
    x
}

/// Roots of `x³ + c₂x² + c₁x + c₀` by the closed-form (Cardano) route.
///
/// The cube-root argument takes the sign that avoids cancellation, and each
/// root gets a guarded Newton polish.
pub fn solve_cubic(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let shift = c2 / 3.0;
    let p = c1 - c2 * shift;
    let q = c2 * c2 * c2 * (2.0 / 27.0) - c2 * c1 / 3.0 + c0;

    let half_q = q * 0.5;
    let disc = half_q * half_q + (p / 3.0).powi(3);
    let s = disc.sqrt();
    let cand_a = -half_q + s;
    let cand_b = -half_q - s;
    let u3 = if cand_a.norm() >= cand_b.norm() { cand_a } else { cand_b };

    let ys = if u3.norm() == 0.0 {
        [ZERO; 3]
    } else {
        let u = u3.powf(1.0 / 3.0);
        let v = -p / (u * 3.0);
        let w = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
        let w2 = w.conj();
        [u + v, u * w + v * w2, u * w2 + v * w]
    };
    let c = [c2, c1, c0];
    ys.map(|y| polish(&c, y - shift))
}

/// Roots of `x³ + c₂x² + c₁x + c₀` as eigenvalues of the companion matrix.
///
/// The variable is rescaled so the coefficients are O(1) before the Schur
/// iteration; roots are Newton-polished afterwards.
pub fn companion_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let s = c2.norm().max(c1.norm().sqrt()).max(c0.norm().cbrt());
    if s == 0.0 {
        return [ZERO; 3];
    }
    let (a2, a1, a0) = (c2 / s, c1 / (s * s), c0 / (s * s * s));
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let m = Matrix3::new(
        ZERO, ZERO, -a0,
        one,  ZERO, -a1,
        ZERO, one,  -a2,
    );
    let ev = m
        .schur()
        .eigenvalues()
        .expect("complex Schur form is always triangular");
    let c = [c2, c1, c0];
    [ev[0], ev[1], ev[2]].map(|y| polish(&c, y * s))
}

/// Monic characteristic coefficients `(c₂, c₁, c₀)` of `det(x − H)`.
pub fn characteristic_coefficients(h: &EffectiveHamiltonian) -> [Complex64; 3] {
    let a = &h.entries;
    let trace = a[0][0] + a[1][1] + a[2][2];
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    [-trace, minors, -det]
}

/// Eigenvalues of `h`, computed in its detuning frame.
pub fn eigenvalues(h: &EffectiveHamiltonian, tol: &Tolerance) -> EigenTriple {
    let offset = h.frame_offset();
    let c = characteristic_coefficients(&h.shifted(offset));
    let roots = companion_roots(c[0], c[1], c[2]);
    EigenTriple::new(roots.map(|r| r + offset), offset, h.rate_scale(), tol)
}

/// Closed-form spectrum of the `η = k = 1` family: `ω_c` and `ω_c ± √(3g₁² − 4γ₂²)`.
pub fn symmetric_spectrum(g_1: f64, gamma_2: f64, omega_c: f64) -> Result<EigenTriple> {
    if !(gamma_2 > 0.0) {
        return Err(Error::InvalidParameter("gamma_2 must be positive".into()));
    }
    if g_1 < gamma_2 {
        return Err(Error::CouplingBelowMinimum { g_1, g_min: gamma_2 });
    }
    let root = Complex64::new(3.0 * g_1 * g_1 - 4.0 * gamma_2 * gamma_2, 0.0).sqrt();
    let w = Complex64::new(omega_c, 0.0);
    Ok(EigenTriple::new(
        [w, w + root, w - root],
        omega_c,
        2.0 * gamma_2,
        &Tolerance::default(),
    ))
}

/// Eigenvalues `ω_c ± √(g₁² − γ₁²)` of the PT-symmetric two-mode reduction.
pub fn two_mode_spectrum(g_1: f64, gamma_1: f64, omega_c: f64) -> [Complex64; 2] {
    let root = Complex64::new(g_1 * g_1 - gamma_1 * gamma_1, 0.0).sqrt();
    [omega_c + root, omega_c - root]
}

/// Left minus right side of the EP3 condition on `k(η)`, in its original form.
pub fn k_condition_residual(eta: f64, k: f64) -> f64 {
    let q = k * k;
    let a = (1.0 + eta) * eta;
    let b = 1.0 + eta + eta * eta;
    let e = eta - 1.0;
    let lhs = 0.25 * ((1.0 + eta * q) / a + 3.0 * (1.0 + q) / b);
    let amplification = 1.0 + 27.0 * (1.0 + eta).powi(2) / (e * e);
    let rhs = ((1.0 + eta * q) / a - 27.0 * (q - eta) / e.powi(3)) / amplification;
    lhs - rhs
}

/// Coupling ratio `k = g₂/g₁` that makes an EP3 reachable for damping ratio `η`.
///
/// The condition is linear in `k²`. It is multiplied through by
/// `(η − 1)³(1 + 27(1+η)²/(η−1)²)` before solving, which keeps it regular as
/// `η → 1⁺` where the limit is `k = 1`.
pub fn k_from_eta(eta: f64) -> Result<f64> {
    if !(eta.is_finite() && eta >= 1.0) {
        return Err(Error::InvalidParameter(format!("eta must be >= 1, got {eta}")));
    }
    if eta == 1.0 {
        return Ok(1.0);
    }
    let a = (1.0 + eta) * eta;
    let b = 1.0 + eta + eta * eta;
    let e = eta - 1.0;
    let pre = e * (e * e + 27.0 * (1.0 + eta).powi(2)) / 4.0;
    let lhs0 = pre * (1.0 / a + 3.0 / b);
    let lhs1 = pre * (eta / a + 3.0 / b);
    let rhs0 = e.powi(3) / a + 27.0 * eta;
    let rhs1 = e.powi(3) * eta / a - 27.0;
    let denom = lhs1 - rhs1;
    if denom.abs() < 1e-300 {
        return Err(Error::NoPhysicalSolution(format!(
            "k condition degenerate at eta = {eta}"
        )));
    }
    let k2 = (rhs0 - lhs0) / denom;
    if !(k2.is_finite() && k2 > 0.0) {
        return Err(Error::NoPhysicalSolution(format!(
            "k^2 = {k2} at eta = {eta}"
        )));
    }
    Ok(k2.sqrt())
}

/// Critical parameters of the third-order exceptional point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ep3Report {
    pub eta: f64,
    pub k: f64,
    pub g_ep3: f64,
    pub delta_ep3: f64,
    pub omega_ep3: f64,
    pub g_min: f64,
    /// Relative mismatch between the realized cubic and `(x − x_EP3)³`.
    pub triple_root_residual: f64,
}

impl Ep3Report {
    pub fn family(&self, gamma_2: f64, omega_c: f64) -> Result<PseudoHermitianFamily> {
        Ok(PseudoHermitianFamily::new(self.eta, self.k, gamma_2)?.with_omega_c(omega_c))
    }
}

/// EP3 location for damping ratio `η` (positive `Δ₁` branch).
pub fn ep3_critical(eta: f64, gamma_2: f64, omega_c: f64) -> Result<Ep3Report> {
    if !(eta.is_finite() && eta >= 1.0) {
        return Err(Error::InvalidParameter(format!("eta must be >= 1, got {eta}")));
    }
    let (k, g_ep3, delta_ep3) = if eta == 1.0 {
        let s3 = 3f64.sqrt();
        (1.0, 2.0 * gamma_2 / s3, gamma_2 / s3)
    } else {
        let k = k_from_eta(eta)?;
        let k2 = k * k;
        let weight = (1.0 + eta * k2) / ((1.0 + eta) * eta);
        let g = 2.0 * gamma_2 / (weight + 3.0 * (1.0 + k2) / (1.0 + eta + eta * eta)).sqrt();
        let d2 = weight * g * g - gamma_2 * gamma_2;
        if d2 < 0.0 {
            return Err(Error::NoPhysicalSolution(format!(
                "negative EP3 detuning squared {d2} at eta = {eta}"
            )));
        }
        (k, g, d2.sqrt())
    };
    let family = PseudoHermitianFamily::new(eta, k, gamma_2)?.with_omega_c(omega_c);
    let x0 = (1.0 - eta) * delta_ep3 / 3.0;

    // the realized cubic must equal (x − x0)³
    let h = EffectiveHamiltonian::build(&family.realize(g_ep3)?);
    let c = characteristic_coefficients(&h.shifted(omega_c));
    let target = [-3.0 * x0, 3.0 * x0 * x0, -x0 * x0 * x0];
    let scale = h.rate_scale();
    let residual = (0..3)
        .map(|i| (c[i] - target[i]).norm() / scale.powi(i as i32 + 1))
        .fold(0.0, f64::max);
    if !(residual < 1e-9) {
        return Err(Error::Ep3VerificationFailed { residual });
    }

    Ok(Ep3Report {
        eta,
        k,
        g_ep3,
        delta_ep3,
        omega_ep3: omega_c + x0,
        g_min: family.g_min(),
        triple_root_residual: residual,
    })
}

/// `g_EP3 / g_min` predicted in closed form once `k` is eliminated.
pub fn ep3_to_gmin_ratio(eta: f64) -> f64 {
    (1.0 + 27.0 * eta * eta / ((2.0 + eta).powi(2) * (1.0 + 2.0 * eta).powi(2))).sqrt()
}

const EP2_SCAN_POINTS: usize = 2000;

/// Second-order exceptional point above the EP3, where the complex pair turns real.
///
/// Scans the discriminant of the real secular cubic on `(g_EP3, g_upper]` for
/// the first negative-to-positive change, then bisects. For `η = 1` the EP2
/// coincides with the EP3 and `g_EP3` is returned directly.
pub fn ep2_locate(eta: f64, gamma_2: f64, omega_c: f64, g_upper: f64) -> Result<f64> {
    let ep3 = ep3_critical(eta, gamma_2, omega_c)?;
    if eta == 1.0 {
        return Ok(ep3.g_ep3);
    }
    let lo0 = ep3.g_ep3;
    if !(g_upper > lo0) {
        return Err(Error::BracketFailure { lo: lo0, hi: g_upper });
    }
    let family = ep3.family(gamma_2, omega_c)?;
    let disc = |g: f64| -> Result<f64> { Ok(cubic_coefficients(&family.realize(g)?).discriminant()) };

    let step = (g_upper - lo0) / EP2_SCAN_POINTS as f64;
    let mut last_negative = None;
    let mut bracket = None;
    for i in 1..=EP2_SCAN_POINTS {
        let g = if i == EP2_SCAN_POINTS { g_upper } else { lo0 + step * i as f64 };
        let d = disc(g)?;
        if d < 0.0 {
            last_negative = Some(g);
        } else if d > 0.0 {
            if let Some(lo) = last_negative {
                bracket = Some((lo, g));
                break;
            }
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::BracketFailure { lo: lo0, hi: g_upper })?;
    for _ in 0..200 {
        if hi - lo < 1e-13 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if disc(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Reorders `next` so that each slot continues the branch held in the same
/// slot of `prev`, minimizing the total complex distance.
pub fn track_branches(prev: &[Complex64; 3], next: &[Complex64; 3]) -> [Complex64; 3] {
    let mut best = PERMUTATIONS[0];
    let mut best_cost = f64::INFINITY;
    for p in PERMUTATIONS.iter() {
        let cost: f64 = (0..3).map(|i| (prev[i] - next[p[i]]).norm()).sum();
        if cost < best_cost {
            best_cost = cost;
            best = *p;
        }
    }
    [next[best[0]], next[best[1]], next[best[2]]]
}

/// Initial branch labels `(Ω₀, Ω₊, Ω₋)`: `Ω₀` is the most nearly real value,
/// `Ω₊` the remaining one with the larger imaginary part (larger real part on ties).
pub fn label_branches(values: &[Complex64; 3]) -> [Complex64; 3] {
    let zero_idx = (0..3)
        .min_by(|&i, &j| values[i].im.abs().total_cmp(&values[j].im.abs()))
        .unwrap();
    let rest: Vec<Complex64> = (0..3).filter(|&i| i != zero_idx).map(|i| values[i]).collect();
    let (a, b) = (rest[0], rest[1]);
    let a_first = if (a.im - b.im).abs() <= 1e-12 * (a - b).norm() {
        a.re >= b.re
    } else {
        a.im > b.im
    };
    if a_first {
        [values[zero_idx], a, b]
    } else {
        [values[zero_idx], b, a]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_multiset(got: &[Complex64; 3], want: &[Complex64; 3], tol: f64) {
        let d = multiset_distance(got, want);
        assert!(d <= tol, "got {got:?}, want {want:?}, distance {d:e}");
    }

    #[test]
    fn cubic_examples() {
        let r = solve_cubic(ZERO, ZERO, ZERO);
        assert_multiset(&r, &[ZERO; 3], 0.0);
        let r = solve_cubic(c(-6.0, 0.0), c(11.0, 0.0), c(-6.0, 0.0));
        assert_multiset(&r, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-13);
        let s3 = 3f64.sqrt();
        let r = solve_cubic(ZERO, c(-3.0, 0.0), ZERO);
        assert_multiset(&r, &[ZERO, c(s3, 0.0), c(-s3, 0.0)], 1e-14);

        let r = companion_roots(c(-6.0, 0.0), c(11.0, 0.0), c(-6.0, 0.0));
        assert_multiset(&r, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-12);
        assert_multiset(&companion_roots(ZERO, ZERO, ZERO), &[ZERO; 3], 0.0);
    }

    #[test]
    fn cubic_solvers_agree_on_complex_roots() {
        let roots = [c(0.3, -1.2), c(-2.0, 0.5), c(4.0, 4.0)];
        let c2 = -(roots[0] + roots[1] + roots[2]);
        let c1 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2];
        let c0 = -(roots[0] * roots[1] * roots[2]);
        assert_multiset(&solve_cubic(c2, c1, c0), &roots, 1e-12);
        assert_multiset(&companion_roots(c2, c1, c0), &roots, 1e-12);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let d = [c(1.0, -0.5), c(-2.0, 0.0), c(3.0, 0.25)];
        let e = eigenvalues(&EffectiveHamiltonian::diagonal(d), &Tolerance::default());
        assert_multiset(&e.values, &d, 1e-13);
        assert_eq!(e.classification, SpectralClass::Unconstrained);
    }

    #[test]
    fn symmetric_family_eigenvalues() {
        let fam = PseudoHermitianFamily::symmetric(1.5).unwrap().with_omega_c(2.0);
        let s3 = 3f64.sqrt();
        let h = EffectiveHamiltonian::build(&fam.realize(2.0).unwrap());
        let e = eigenvalues(&h, &Tolerance::default());
        assert_multiset(&e.values, &[c(2.0, 0.0), c(2.0 + s3, 0.0), c(2.0 - s3, 0.0)], 1e-12);
        assert_eq!(e.classification, SpectralClass::AllReal);
        assert_eq!(e.coalescence_order, 1);

        let h = EffectiveHamiltonian::build(&fam.realize(1.5).unwrap());
        let e = eigenvalues(&h, &Tolerance::default());
        assert_multiset(&e.values, &[c(2.0, 0.0), c(2.0, 1.5), c(2.0, -1.5)], 1e-12);
        assert_eq!(e.classification, SpectralClass::OneRealPlusConjugatePair);
        assert_eq!(e.real_detunings().len(), 1);
    }

    #[test]
    fn symmetric_closed_form() {
        let g = 2.0 * 1.5 / 3f64.sqrt();
        let e = symmetric_spectrum(g, 1.5, 0.0).unwrap();
        assert!(e.values.iter().all(|v| v.norm() < 1e-7));
        assert_eq!(e.coalescence_order, 3);

        let e = symmetric_spectrum(2.0, 1.5, 0.0).unwrap();
        assert_multiset(&e.values, &[ZERO, c(3f64.sqrt(), 0.0), c(-(3f64.sqrt()), 0.0)], 1e-15);
        let e = symmetric_spectrum(1.5, 1.5, 0.0).unwrap();
        assert_multiset(&e.values, &[ZERO, c(0.0, 1.5), c(0.0, -1.5)], 1e-15);
        assert_eq!(symmetric_spectrum(1.0, 1.5, 0.0).unwrap_err().name(), "CouplingBelowMinimum");
    }

    #[test]
    fn two_mode_examples() {
        let [p, m] = two_mode_spectrum(1.3, 1.3, 0.7);
        assert_eq!(p, c(0.7, 0.0));
        assert_eq!(m, c(0.7, 0.0));
        let [p, m] = two_mode_spectrum(0.0, 2.0, 0.0);
        assert!((p - c(0.0, 2.0)).norm() < 1e-15 && (m - c(0.0, -2.0)).norm() < 1e-15);
        let [p, m] = two_mode_spectrum(4.0, 2.0, 1.0);
        assert!((p - c(1.0 + 2.0 * 3f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!((m - c(1.0 - 2.0 * 3f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn k_from_eta_values() {
        assert!((k_from_eta(2.0).unwrap() - 0.494).abs() < 1e-3);
        assert_eq!(k_from_eta(1.0).unwrap(), 1.0);
        assert!((k_from_eta(1.0 + 1e-6).unwrap() - 1.0).abs() < 1e-5);
        assert!((k_from_eta(3.0).unwrap() - 0.3).abs() < 0.02);
        for eta in [1.01, 1.5, 2.0, 2.5, 3.0] {
            let k = k_from_eta(eta).unwrap();
            assert!(k_condition_residual(eta, k).abs() < 1e-12);
        }
        assert!(k_from_eta(0.5).is_err());
    }

    #[test]
    fn ep3_symmetric() {
        let r = ep3_critical(1.0, 1.5, 0.0).unwrap();
        assert!((r.g_ep3 - 1.732).abs() < 1e-3);
        assert!((r.g_ep3 - 3f64.sqrt()).abs() < 1e-15);
        assert!((r.delta_ep3 - 0.866).abs() < 1e-3);
        assert_eq!(r.omega_ep3, 0.0);
        assert_eq!(r.k, 1.0);
        assert!(r.g_ep3 > r.g_min);
    }

    #[test]
    fn ep3_asymmetric() {
        let r = ep3_critical(2.0, 1.5, 5.0).unwrap();
        assert!((r.g_ep3 - 3.394).abs() < 1e-3);
        assert!((r.omega_ep3 - (5.0 - r.delta_ep3 / 3.0)).abs() < 1e-14);
        assert!((r.g_ep3 / r.g_min - ep3_to_gmin_ratio(2.0)).abs() < 1e-12);

        let fam = r.family(1.5, 5.0).unwrap();
        let e = eigenvalues(&EffectiveHamiltonian::build(&fam.realize(r.g_ep3).unwrap()), &Tolerance::default());
        for v in e.values {
            assert!((v - r.omega_ep3).norm() < 1e-4 * 1.5, "{v} vs {}", r.omega_ep3);
        }
        assert_eq!(e.coalescence_order, 3);
    }

    #[test]
    fn ep2_examples() {
        let g = ep2_locate(2.0, 1.5, 0.0, 5.0).unwrap();
        assert!((g - 3.600).abs() < 2e-3, "{g}");
        let g1 = ep2_locate(1.0, 1.5, 0.0, 5.0).unwrap();
        assert!((g1 - 3f64.sqrt()).abs() < 1e-15);
        let err = ep2_locate(2.0, 1.5, 0.0, 3.5).unwrap_err();
        assert_eq!(err.name(), "BracketFailure");
        let err = ep2_locate(2.0, 1.5, 0.0, 3.0).unwrap_err();
        assert_eq!(err.name(), "BracketFailure");
    }

    #[test]
    fn branch_tracking_follows_nearest() {
        let prev = [c(0.0, 0.0), c(1.0, 0.1), c(-1.0, -0.1)];
        let next = [c(-1.01, -0.1), c(0.0, 0.0), c(1.01, 0.1)];
        let t = track_branches(&prev, &next);
        assert_eq!(t, [next[1], next[2], next[0]]);
    }

    #[test]
    fn branch_labels() {
        let l = label_branches(&[c(0.0, -1.0), c(0.1, 0.0), c(0.0, 1.0)]);
        assert_eq!(l, [c(0.1, 0.0), c(0.0, 1.0), c(0.0, -1.0)]);
        let l = label_branches(&[c(-2.0, 0.0), c(0.0, 1e-18), c(2.0, 0.0)]);
        assert_eq!(l, [c(-2.0, 0.0), c(2.0, 0.0), c(0.0, 1e-18)]);
    }
}

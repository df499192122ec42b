//! Physical parameters of the three-mode system, the effective Hamiltonian,
//! and the pseudo-Hermiticity constraint machinery.
//!
//! Every frequency and rate is stored as `ω/2π` in MHz. The effective
//! Hamiltonian uses the mode ordering (cavity, magnon 1, magnon 2).

use std::fmt;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Effective cavity gain `κ₁ + κ₂ − κ_int` produced by the CPA locking of
/// both input ports. Negative values mean the cavity stays lossy.
pub fn effective_gain(kappa_1: f64, kappa_2: f64, kappa_int: f64) -> f64 {
    kappa_1 + kappa_2 - kappa_int
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub omega_c: f64,
    /// Port-1 decay rate.
    pub kappa_1: f64,
    /// Port-2 decay rate.
    pub kappa_2: f64,
    /// Intrinsic decay rate.
    pub kappa_int: f64,
}

impl CavityParams {
    pub fn effective_gain(&self) -> f64 {
        effective_gain(self.kappa_1, self.kappa_2, self.kappa_int)
    }

    /// Total loaded decay `κ₁ + κ₂ + κ_int`.
    pub fn total_decay(&self) -> f64 {
        self.kappa_1 + self.kappa_2 + self.kappa_int
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega_c, self.kappa_1, self.kappa_2, self.kappa_int]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("cavity parameters must be finite".into()));
        }
        if self.kappa_1 < 0.0 || self.kappa_2 < 0.0 || self.kappa_int < 0.0 {
            return Err(Error::InvalidParameter("cavity decay rates must be non-negative".into()));
        }
        Ok(())
    }
}

/// One Kittel mode: its frequency, damping and coupling to the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnonParams {
    #[serde(rename = "omega_j")]
    pub omega: f64,
    #[serde(rename = "gamma_j")]
    pub gamma: f64,
    #[serde(rename = "g_j")]
    pub g: f64,
}

impl MagnonParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.gamma.is_finite() && self.g.is_finite()) {
            return Err(Error::InvalidParameter("magnon parameters must be finite".into()));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter("magnon damping must be positive".into()));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter("magnon coupling must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub cavity: CavityParams,
    pub magnon_1: MagnonParams,
    pub magnon_2: MagnonParams,
}

impl SystemParams {
    /// `Δ₁ = ω₁ − ω_c`.
    pub fn detuning_1(&self) -> f64 {
        self.magnon_1.omega - self.cavity.omega_c
    }

    /// `Δ₂ = ω₂ − ω_c`.
    pub fn detuning_2(&self) -> f64 {
        self.magnon_2.omega - self.cavity.omega_c
    }

    pub fn validate(&self) -> Result<()> {
        self.cavity.validate()?;
        self.magnon_1.validate()?;
        self.magnon_2.validate()
    }

    pub fn magnons(&self) -> [MagnonParams; 2] {
        [self.magnon_1, self.magnon_2]
    }
}

/// Branch selector for `Δ₁ = ±√(Δ₁²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum BranchSign {
    #[default]
    Positive,
    Negative,
}

impl BranchSign {
    pub fn value(self) -> f64 {
        match self {
            BranchSign::Positive => 1.0,
            BranchSign::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            BranchSign::Positive => BranchSign::Negative,
            BranchSign::Negative => BranchSign::Positive,
        }
    }
}

impl From<BranchSign> for i8 {
    fn from(s: BranchSign) -> i8 {
        match s {
            BranchSign::Positive => 1,
            BranchSign::Negative => -1,
        }
    }
}

impl TryFrom<i8> for BranchSign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(BranchSign::Positive),
            -1 => Ok(BranchSign::Negative),
            other => Err(format!("delta_1_sign must be +1 or -1, got {other}")),
        }
    }
}

/// The `(η, k, γ₂, ω_c)` parameterization of pseudo-Hermitian systems.
///
/// `η = γ₁/γ₂ ≥ 1` and `k = g₂/g₁ > 0`. For each coupling `g₁ ≥ g_min` the
/// family fixes the gain, both detunings and the second coupling so that the
/// three pseudo-Hermiticity constraints hold identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoHermitianFamily {
    pub eta: f64,
    pub k: f64,
    pub gamma_2: f64,
    #[serde(default)]
    pub omega_c: f64,
    #[serde(default)]
    pub delta_1_sign: BranchSign,
    /// Intrinsic cavity loss used when splitting `κ_g` into port rates.
    /// Defaults to `γ₂`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_int: Option<f64>,
}

impl PseudoHermitianFamily {
    pub fn new(eta: f64, k: f64, gamma_2: f64) -> Result<Self> {
        let family = Self {
            eta,
            k,
            gamma_2,
            omega_c: 0.0,
            delta_1_sign: BranchSign::Positive,
            kappa_int: None,
        };
        family.validate()?;
        Ok(family)
    }

    /// `η = k = 1`: identical dampings and couplings.
    pub fn symmetric(gamma_2: f64) -> Result<Self> {
        Self::new(1.0, 1.0, gamma_2)
    }

    pub fn with_omega_c(mut self, omega_c: f64) -> Self {
        self.omega_c = omega_c;
        self
    }

    pub fn with_kappa_int(mut self, kappa_int: f64) -> Self {
        self.kappa_int = Some(kappa_int);
        self
    }

    pub fn with_sign(mut self, sign: BranchSign) -> Self {
        self.delta_1_sign = sign;
        self
    }

    /// Same family on the opposite `Δ₁` branch.
    pub fn mirrored(self) -> Self {
        self.with_sign(self.delta_1_sign.flipped())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta >= 1.0) {
            return Err(Error::InvalidParameter(format!("eta must be >= 1, got {}", self.eta)));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::InvalidParameter(format!("k must be > 0, got {}", self.k)));
        }
        if !(self.gamma_2.is_finite() && self.gamma_2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma_2 must be > 0, got {}",
                self.gamma_2
            )));
        }
        if !self.omega_c.is_finite() {
            return Err(Error::InvalidParameter("omega_c must be finite".into()));
        }
        if let Some(ki) = self.kappa_int {
            if !(ki.is_finite() && ki >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "kappa_int must be >= 0, got {ki}"
                )));
            }
        }
        Ok(())
    }

    pub fn gamma_1(&self) -> f64 {
        self.eta * self.gamma_2
    }

    /// Required cavity gain `(1 + η)γ₂`.
    pub fn effective_gain(&self) -> f64 {
        (1.0 + self.eta) * self.gamma_2
    }

    pub fn kappa_int(&self) -> f64 {
        self.kappa_int.unwrap_or(self.gamma_2)
    }

    /// `(1 + ηk²) / ((1 + η)η)`, the slope of `Δ₁²` in `g₁²`.
    pub(crate) fn coupling_weight(&self) -> f64 {
        (1.0 + self.eta * self.k * self.k) / ((1.0 + self.eta) * self.eta)
    }

    /// Smallest `g₁` giving `Δ₁² ≥ 0`.
    pub fn g_min(&self) -> f64 {
        self.gamma_2 / self.coupling_weight().sqrt()
    }

    /// `Δ₁²` required by the constraints at coupling `g₁` (negative below `g_min`).
    pub fn delta_1_squared(&self, g_1: f64) -> f64 {
        self.coupling_weight() * g_1 * g_1 - self.gamma_2 * self.gamma_2
    }

    /// Signed `Δ₁` at coupling `g₁`.
    pub fn delta_1(&self, g_1: f64) -> Result<f64> {
        let d2 = self.delta_1_squared(g_1);
        if d2 < 0.0 {
            // g_1 == g_min can land a few ulps below zero
            if g_1 >= self.g_min() || d2 > -1e-13 * self.gamma_2 * self.gamma_2 {
                return Ok(0.0);
            }
            return Err(Error::CouplingBelowMinimum { g_1, g_min: self.g_min() });
        }
        Ok(self.delta_1_sign.value() * d2.sqrt())
    }

    /// Concrete system parameters for coupling `g₁`, with `κ₁ = κ₂`.
    pub fn realize(&self, g_1: f64) -> Result<SystemParams> {
        self.validate()?;
        if !(g_1.is_finite() && g_1 >= 0.0) {
            return Err(Error::InvalidParameter(format!("g_1 must be >= 0, got {g_1}")));
        }
        let delta_1 = self.delta_1(g_1)?;
        let delta_2 = -self.eta * delta_1;
        let kappa_int = self.kappa_int();
        let port = 0.5 * (self.effective_gain() + kappa_int);
        Ok(SystemParams {
            cavity: CavityParams {
                omega_c: self.omega_c,
                kappa_1: port,
                kappa_2: port,
                kappa_int,
            },
            magnon_1: MagnonParams {
                omega: self.omega_c + delta_1,
                gamma: self.gamma_1(),
                g: g_1,
            },
            magnon_2: MagnonParams {
                omega: self.omega_c + delta_2,
                gamma: self.gamma_2,
                g: self.k * g_1,
            },
        })
    }
}

pub fn g_min(family: &PseudoHermitianFamily) -> f64 {
    family.g_min()
}

pub fn realize_family(family: &PseudoHermitianFamily, g_1: f64) -> Result<SystemParams> {
    family.realize(g_1)
}

/// 3×3 non-Hermitian matrix generating `V̇ = −iH V` for `V = (a, b₁, b₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    pub entries: [[Complex64; 3]; 3],
}

impl EffectiveHamiltonian {
    pub fn from_entries(entries: [[Complex64; 3]; 3]) -> Self {
        Self { entries }
    }

    pub fn diagonal(d: [Complex64; 3]) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::from_entries([[d[0], z, z], [z, d[1], z], [z, z, d[2]]])
    }

    pub fn build(params: &SystemParams) -> Self {
        let c = &params.cavity;
        let (m1, m2) = (&params.magnon_1, &params.magnon_2);
        let re = |x: f64| Complex64::new(x, 0.0);
        Self::from_entries([
            [Complex64::new(c.omega_c, c.effective_gain()), re(m1.g), re(m2.g)],
            [re(m1.g), Complex64::new(m1.omega, -m1.gamma), re(0.0)],
            [re(m2.g), re(0.0), Complex64::new(m2.omega, -m2.gamma)],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        (0..3).map(|i| self.entries[i][i]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.entries;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.entries[j][i].conj();
            }
        }
        Self::from_entries(out)
    }

    /// Reference frequency of the detuning frame: the real part of the cavity entry.
    pub fn frame_offset(&self) -> f64 {
        self.entries[0][0].re
    }

    /// Copy with `offset` subtracted from the diagonal.
    pub fn shifted(&self, offset: f64) -> Self {
        let mut out = self.entries;
        for (i, row) in out.iter_mut().enumerate() {
            row[i] -= offset;
        }
        Self::from_entries(out)
    }

    pub fn to_matrix(&self) -> Matrix3<Complex64> {
        Matrix3::from_fn(|i, j| self.entries[i][j])
    }

    /// Largest absolute value among the entries.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|Im|` on the diagonal: the rate scale of the matrix.
    pub fn rate_scale(&self) -> f64 {
        (0..3).map(|i| self.entries[i][i].im.abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for EffectiveHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn build_effective_hamiltonian(params: &SystemParams) -> EffectiveHamiltonian {
    EffectiveHamiltonian::build(params)
}

/// Residuals of the three pseudo-Hermiticity constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PseudoHermiticityCheck {
    pub satisfied: bool,
    /// `κ_g − γ₁ − γ₂`, `Δ₁γ₁ + Δ₂γ₂`, `(Δ₁Δ₂ − γ₁γ₂)κ_g + g₁²γ₂ + g₂²γ₁`.
    pub residuals: [f64; 3],
    /// Largest constituent term of each residual.
    pub scales: [f64; 3],
}

impl PseudoHermiticityCheck {
    /// Residuals divided by their scales (zero where the scale is zero).
    pub fn relative(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            if self.scales[i] > 0.0 {
                out[i] = self.residuals[i].abs() / self.scales[i];
            }
        }
        out
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

pub fn check_pseudo_hermitian(params: &SystemParams, tol: f64) -> PseudoHermiticityCheck {
    let kg = params.cavity.effective_gain();
    let (g1, g2) = (params.magnon_1.g, params.magnon_2.g);
    let (y1, y2) = (params.magnon_1.gamma, params.magnon_2.gamma);
    let (d1, d2) = (params.detuning_1(), params.detuning_2());

    let r1 = kg - y1 - y2;
    let r2 = d1 * y1 + d2 * y2;
    let r3 = (d1 * d2 - y1 * y2) * kg + g1 * g1 * y2 + g2 * g2 * y1;

    let scales = [
        max_abs(&[kg, y1, y2]),
        max_abs(&[d1 * y1, d2 * y2]),
        max_abs(&[d1 * d2 * kg, y1 * y2 * kg, g1 * g1 * y2, g2 * g2 * y1]),
    ];
    let residuals = [r1, r2, r3];
    let satisfied = residuals
        .iter()
        .zip(scales.iter())
        .all(|(r, s)| r.abs() <= tol * s);
    PseudoHermiticityCheck { satisfied, residuals, scales }
}

/// Real coefficients of `x³ + c₂x² + c₁x + c₀` with `x = Ω − ω_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl CubicCoefficients {
    pub fn eval(&self, x: Complex64) -> Complex64 {
        ((x + self.c2) * x + self.c1) * x + self.c0
    }

    /// Discriminant of the monic cubic; positive for three distinct real roots,
    /// negative for one real root and a conjugate pair.
    pub fn discriminant(&self) -> f64 {
        let (b, c, d) = (self.c2, self.c1, self.c0);
        18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d
    }

    pub fn as_complex(&self) -> [Complex64; 3] {
        [self.c2.into(), self.c1.into(), self.c0.into()]
    }

    /// Sign-flipped odd coefficients: the polynomial of `−x`, up to overall sign.
    pub fn mirrored(&self) -> Self {
        Self { c2: -self.c2, c1: self.c1, c0: -self.c0 }
    }
}

/// Secular-equation coefficients written in the physical parameters. They equal
/// the true characteristic polynomial when the pseudo-Hermiticity constraints hold.
pub fn cubic_coefficients(params: &SystemParams) -> CubicCoefficients {
    let kg = params.cavity.effective_gain();
    let (g1, g2) = (params.magnon_1.g, params.magnon_2.g);
    let (y1, y2) = (params.magnon_1.gamma, params.magnon_2.gamma);
    let (d1, d2) = (params.detuning_1(), params.detuning_2());
    CubicCoefficients {
        c2: -(d1 + d2),
        c1: kg * kg + d1 * d2 - y1 * y2 - g1 * g1 - g2 * g2,
        c0: g1 * g1 * d2 + g2 * g2 * d1 - kg * (y1 * d2 + y2 * d1),
    }
}

/// The same coefficients expressed through `(η, k, γ₂, Δ₁, g₁)`.
pub fn family_cubic_coefficients(family: &PseudoHermitianFamily, g_1: f64) -> Result<CubicCoefficients> {
    let (eta, k, y2) = (family.eta, family.k, family.gamma_2);
    let d1 = family.delta_1(g_1)?;
    let g1s = g_1 * g_1;
    let k2 = k * k;
    Ok(CubicCoefficients {
        c2: (eta - 1.0) * d1,
        c1: (1.0 + eta).powi(2) * y2 * y2 - eta * (d1 * d1 + y2 * y2) - (1.0 + k2) * g1s,
        c0: (k2 - eta) * g1s * d1 + (eta * eta - 1.0) * (1.0 + eta) * y2 * y2 * d1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn effective_gain_values() {
        assert!(close(effective_gain(2.25, 2.25, 1.5), 3.0, 1e-15));
        assert!(close(effective_gain(3.0, 3.0, 1.5), 4.5, 1e-15));
        assert_eq!(effective_gain(1.0, 1.0, 2.0), 0.0);
    }

    #[test]
    fn hamiltonian_trivial_cases() {
        let m = MagnonParams { omega: 5.0, gamma: 0.0, g: 0.0 };
        let p = SystemParams {
            cavity: CavityParams { omega_c: 5.0, kappa_1: 0.0, kappa_2: 0.0, kappa_int: 0.0 },
            magnon_1: m,
            magnon_2: m,
        };
        let h = build_effective_hamiltonian(&p);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 5.0 } else { 0.0 };
                assert_eq!(h.entries[i][j], Complex64::new(want, 0.0));
            }
        }

        let m = MagnonParams { omega: 1.0, gamma: 0.0, g: 1.0 };
        let p = SystemParams {
            cavity: CavityParams { omega_c: 0.3, kappa_1: 0.5, kappa_2: 0.5, kappa_int: 1.0 },
            magnon_1: m,
            magnon_2: MagnonParams { omega: -0.7, ..m },
        };
        let h = build_effective_hamiltonian(&p);
        assert_eq!(h, h.adjoint());
    }

    #[test]
    fn hamiltonian_symmetric_family_entries() {
        let fam = PseudoHermitianFamily::symmetric(1.5).unwrap().with_omega_c(10.0);
        let h = build_effective_hamiltonian(&fam.realize(2.0).unwrap());
        let d = 1.75f64.sqrt();
        assert!((h.entries[0][0] - Complex64::new(10.0, 3.0)).norm() < 1e-14);
        assert!((h.entries[1][1] - Complex64::new(10.0 + d, -1.5)).norm() < 1e-14);
        assert!((h.entries[2][2] - Complex64::new(10.0 - d, -1.5)).norm() < 1e-14);
        assert!((d - 1.3229).abs() < 1e-4);
        for (i, j, g) in [(0, 1, 2.0), (0, 2, 2.0), (1, 2, 0.0)] {
            assert_eq!(h.entries[i][j], Complex64::new(g, 0.0));
            assert_eq!(h.entries[j][i], Complex64::new(g, 0.0));
        }
    }

    #[test]
    fn realize_examples() {
        let fam = PseudoHermitianFamily::symmetric(1.5).unwrap();
        let p = fam.realize(2.0).unwrap();
        assert!(close(p.cavity.effective_gain(), 3.0, 1e-15));
        assert!(close(p.magnon_1.gamma, 1.5, 1e-15));
        assert!(close(p.magnon_2.g, 2.0, 1e-15));
        assert!(close(p.detuning_1(), 1.75f64.sqrt(), 1e-14));
        assert!(close(p.detuning_2(), -(1.75f64.sqrt()), 1e-14));
        // κ₁ = κ₂ = (κ_g + κ_int)/2 with κ_int = γ₂
        assert!(close(p.cavity.kappa_1, 2.25, 1e-15));
        assert!(close(p.cavity.kappa_2, 2.25, 1e-15));

        let p = fam.realize(1.5).unwrap();
        assert_eq!(p.detuning_1(), 0.0);
        assert_eq!(p.detuning_2(), 0.0);

        let fam = PseudoHermitianFamily::new(2.0, 0.494, 1.5).unwrap();
        let p = fam.realize(3.394).unwrap();
        assert!((p.detuning_1() - 0.7795).abs() < 1e-3);
        assert!(close(p.detuning_2(), -2.0 * p.detuning_1(), 1e-15));
        assert!(close(p.cavity.kappa_1, 3.0, 1e-15));
    }

    #[test]
    fn realize_below_minimum_fails() {
        let fam = PseudoHermitianFamily::symmetric(1.5).unwrap();
        let err = fam.realize(1.2).unwrap_err();
        assert_eq!(err.name(), "CouplingBelowMinimum");
    }

    #[test]
    fn family_validation() {
        assert!(PseudoHermitianFamily::new(0.5, 1.0, 1.5).is_err());
        assert!(PseudoHermitianFamily::new(1.0, 0.0, 1.5).is_err());
        assert!(PseudoHermitianFamily::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn g_min_values() {
        assert!(close(PseudoHermitianFamily::symmetric(1.5).unwrap().g_min(), 1.5, 1e-15));
        let fam = PseudoHermitianFamily::new(2.0, 0.494, 1.5).unwrap();
        assert!((fam.g_min() - 3.0120).abs() < 1e-4);
        let mut last = f64::INFINITY;
        for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let g = PseudoHermitianFamily::new(1.0, k, 1.5).unwrap().g_min();
            assert!(g < last);
            last = g;
        }
    }

    #[test]
    fn pseudo_hermitian_check() {
        let fam = PseudoHermitianFamily::symmetric(1.5).unwrap();
        let p = fam.realize(2.0).unwrap();
        let c = check_pseudo_hermitian(&p, 1e-12);
        assert!(c.satisfied);
        assert!(c.residuals.iter().all(|r| r.abs() < 1e-12));

        let mut q = p;
        q.cavity.kappa_int = 3.0;
        let c = check_pseudo_hermitian(&q, 1e-12);
        assert!(!c.satisfied);
        assert!(close(c.residuals[0], -1.5, 1e-15));

        let q = SystemParams {
            cavity: CavityParams { omega_c: 0.0, kappa_1: 1.0, kappa_2: 1.0, kappa_int: 0.0 },
            magnon_1: MagnonParams { omega: 1.0, gamma: 1.0, g: 1.0 },
            magnon_2: MagnonParams { omega: 1.0, gamma: 1.0, g: 1.0 },
        };
        let c = check_pseudo_hermitian(&q, 1e-12);
        assert!(!c.satisfied);
        assert_eq!(c.residuals[0], 0.0);
        assert_eq!(c.residuals[1], 2.0);
    }

    #[test]
    fn cubic_coefficients_examples() {
        let fam = PseudoHermitianFamily::symmetric(1.5).unwrap();
        let c = cubic_coefficients(&fam.realize(2.0).unwrap());
        assert!(c.c2.abs() < 1e-14);
        assert!(c.c0.abs() < 1e-13);
        assert!(close(c.c1, -3.0, 1e-14));

        let zero = MagnonParams { omega: 0.0, gamma: 0.0, g: 0.0 };
        let p = SystemParams {
            cavity: CavityParams { omega_c: 0.0, kappa_1: 0.0, kappa_2: 0.0, kappa_int: 0.0 },
            magnon_1: zero,
            magnon_2: zero,
        };
        assert_eq!(cubic_coefficients(&p), CubicCoefficients { c2: 0.0, c1: 0.0, c0: 0.0 });
    }

    #[test]
    fn family_serializes_with_spec_keys() {
        let fam = PseudoHermitianFamily::new(2.0, 0.5, 1.5).unwrap().mirrored();
        let json = serde_json::to_string(&fam).unwrap();
        assert!(json.contains("\"delta_1_sign\":-1"));
        let back: PseudoHermitianFamily = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fam);

        let p = fam.realize(4.0).unwrap();
        let json = serde_json::to_value(p).unwrap();
        assert!(json["magnon_1"]["gamma_j"].is_number());
        assert!(json["cavity"]["kappa_int"].is_number());
    }
}

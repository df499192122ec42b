//! Frequency-domain input-output response of the two-port cavity.
//!
//! The intracavity field, port outputs and CPA-matched output coefficients all
//! share the response denominator `(κ₁+κ₂+κ_int) + i(ω_c−ω) + Σ(ω)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MagnonParams, SystemParams};

/// Two coherent inputs at a common frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub omega: f64,
    pub a1_in: Complex64,
    pub a2_in: Complex64,
}

impl DriveSpec {
    /// Inputs with the CPA amplitude ratio `a₂ = √(κ₂/κ₁) a₁` and `a₁ = 1`.
    pub fn cpa_matched(params: &SystemParams, omega: f64) -> Self {
        Self::cpa_matched_with(params, omega, Complex64::new(1.0, 0.0))
    }

    pub fn cpa_matched_with(params: &SystemParams, omega: f64, a1_in: Complex64) -> Self {
        let ratio = (params.cavity.kappa_2 / params.cavity.kappa_1).sqrt();
        Self { omega, a1_in, a2_in: a1_in * ratio }
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self { omega: self.omega, a1_in: self.a1_in * z, a2_in: self.a2_in * z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringResult {
    pub s1: Complex64,
    pub s2: Complex64,
    /// `|S₁|² + |S₂|²`.
    pub s_tot_sq: f64,
    /// Intracavity amplitude for the CPA-matched drive with `a₁ = 1`.
    pub intracavity: Complex64,
}

/// `Σ(ω) = Σⱼ gⱼ² / (γⱼ + i(ωⱼ − ω))`.
pub fn self_energy(omega: f64, magnon_1: &MagnonParams, magnon_2: &MagnonParams) -> Result<Complex64> {
    let mut sigma = Complex64::new(0.0, 0.0);
    for m in [magnon_1, magnon_2] {
        if m.g == 0.0 {
            continue;
        }
        let d = Complex64::new(m.gamma, m.omega - omega);
        if d.norm() == 0.0 {
            return Err(Error::PoleAtRealFrequency { omega });
        }
        sigma += m.g * m.g / d;
    }
    Ok(sigma)
}

/// Response denominator at `omega`; rejects near-threshold values.
pub fn response_denominator(omega: f64, params: &SystemParams) -> Result<Complex64> {
    let c = &params.cavity;
    let sigma = self_energy(omega, &params.magnon_1, &params.magnon_2)?;
    let detune = Complex64::new(0.0, c.omega_c - omega);
    let den = c.total_decay() + detune + sigma;
    let scale = c.total_decay().max(detune.im.abs()).max(sigma.norm());
    if den.norm() < 1e-12 * scale || den.norm() == 0.0 {
        return Err(Error::SingularDenominator { omega, magnitude: den.norm() });
    }
    Ok(den)
}

fn port_factors(params: &SystemParams) -> (f64, f64) {
    ((2.0 * params.cavity.kappa_1).sqrt(), (2.0 * params.cavity.kappa_2).sqrt())
}

pub fn intracavity_amplitude(drive: &DriveSpec, params: &SystemParams) -> Result<Complex64> {
    let den = response_denominator(drive.omega, params)?;
    let (r1, r2) = port_factors(params);
    Ok((drive.a1_in * r1 + drive.a2_in * r2) / den)
}

/// Port outputs `aᵢᵒᵘᵗ = √(2κᵢ) a − aᵢⁱⁿ`.
pub fn scattering_outputs(drive: &DriveSpec, params: &SystemParams) -> Result<(Complex64, Complex64)> {
    let a = intracavity_amplitude(drive, params)?;
    let (r1, r2) = port_factors(params);
    Ok((a * r1 - drive.a1_in, a * r2 - drive.a2_in))
}

/// Output coefficients under the CPA input ratio.
pub fn s_coefficients(omega: f64, params: &SystemParams) -> Result<ScatteringResult> {
    let c = &params.cavity;
    let den = response_denominator(omega, params)?;
    let s1 = 2.0 * (c.kappa_1 + c.kappa_2) / den - 1.0;
    let s2 = s1;
    let (r1, r2) = port_factors(params);
    let ratio = if c.kappa_1 > 0.0 { (c.kappa_2 / c.kappa_1).sqrt() } else { 0.0 };
    let intracavity = (r1 + r2 * ratio) / den;
    Ok(ScatteringResult { s1, s2, s_tot_sq: s1.norm_sqr() + s2.norm_sqr(), intracavity })
}

/// Real and imaginary CPA conditions at `omega`; both vanish exactly at a CPA frequency.
///
/// Returns `κ_g − Σⱼ gⱼ²γⱼ/((ωⱼ−ω)² + γⱼ²)` and
/// `(ω_c − ω) − Σⱼ gⱼ²(ωⱼ−ω)/((ωⱼ−ω)² + γⱼ²)`.
pub fn cpa_residuals(omega: f64, params: &SystemParams) -> (f64, f64) {
    let mut gain = params.cavity.effective_gain();
    let mut detuning = params.cavity.omega_c - omega;
    for m in params.magnons() {
        let dw = m.omega - omega;
        let den = dw * dw + m.gamma * m.gamma;
        if m.g == 0.0 || den == 0.0 {
            continue;
        }
        let w = m.g * m.g / den;
        gain -= w * m.gamma;
        detuning -= w * dw;
    }
    (gain, detuning)
}

/// Settings for the real-axis CPA search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpaSearch {
    /// Scan step in MHz; `None` uses `min(γ₁, γ₂)/200`.
    pub step: Option<f64>,
    /// Largest `|S₁|` accepted at a polished minimum.
    pub threshold: f64,
}

impl Default for CpaSearch {
    fn default() -> Self {
        Self { step: None, threshold: 1e-8 }
    }
}

fn s1_abs(omega: f64, params: &SystemParams) -> f64 {
    s_coefficients(omega, params).map(|r| r.s1.norm()).unwrap_or(f64::INFINITY)
}

/// Golden-section minimization of `|S₁|` on `[lo, hi]`.
fn golden_minimize(mut lo: f64, mut hi: f64, params: &SystemParams) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = s1_abs(x1, params);
    let mut f2 = s1_abs(x2, params);
    for _ in 0..200 {
        if hi - lo <= 1e-14 * lo.abs().max(hi.abs()).max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = s1_abs(x1, params);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = s1_abs(x2, params);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Real CPA frequencies in `[lo, hi]`: a uniform scan of `|S₁|` followed by a
/// golden-section polish of each interior minimum.
pub fn find_cpa_frequencies(params: &SystemParams, scan_range: (f64, f64)) -> Vec<f64> {
    find_cpa_frequencies_with(params, scan_range, &CpaSearch::default())
}

pub fn find_cpa_frequencies_with(params: &SystemParams, scan_range: (f64, f64), search: &CpaSearch) -> Vec<f64> {
    let (lo, hi) = scan_range;
    if !(hi > lo) {
        return Vec::new();
    }
    let gamma_min = params.magnon_1.gamma.min(params.magnon_2.gamma);
    let step = search
        .step
        .unwrap_or(if gamma_min > 0.0 { gamma_min / 200.0 } else { (hi - lo) / 2000.0 });
    let n = ((hi - lo) / step).ceil().max(2.0) as usize;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&w| s1_abs(w, params)).collect();

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..=n {
        let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
        let right = if i < n { vals[i + 1] } else { f64::INFINITY };
        if !(vals[i] <= left && vals[i] <= right && vals[i].is_finite()) {
            continue;
        }
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(n)];
        let w = golden_minimize(a, b, params);
        if s1_abs(w, params) < search.threshold
            && roots.last().is_none_or(|&r| (w - r).abs() > 1e-9 * w.abs().max(1.0))
        {
            roots.push(w);
        }
    }
    roots
}

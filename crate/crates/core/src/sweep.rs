//! Parameter sweeps and the canned figure datasets.
//!
//! Every sweep returns a [`SweepGrid`]: named axes plus a row-major table.
//! Grid points are evaluated in parallel and collected by index, so the output
//! does not depend on scheduling. Numbers are written in scientific notation
//! with 12 significant digits.

use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EffectiveHamiltonian, PseudoHermitianFamily};
use crate::scattering::s_coefficients;
use crate::spectral::{self, Tolerance};

/// Fixed numeric format used for all tabular output.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Inclusive uniform grid `start, …, stop` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        let r = Self { start, stop, steps };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 steps, got {}", self.steps)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::InvalidParameter(format!(
                "grid needs start < stop, got {}:{}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n
                }
            })
            .collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start && x <= self.stop
    }
}

impl FromStr for GridRange {
    type Err = Error;

    /// Parses `start:stop:steps`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidParameter(format!("expected start:stop:steps, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse().map_err(|_| bad())?;
        let stop = parts[1].trim().parse().map_err(|_| bad())?;
        let steps = parts[2].trim().parse().map_err(|_| bad())?;
        Self::new(start, stop, steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: PseudoHermitianFamily,
    pub g1_range: GridRange,
    /// Detuning `ω − ω_c` grid; only used by spectrum sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_range: Option<GridRange>,
    #[serde(default)]
    pub outputs: Vec<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub tol: Tolerance,
}

impl SweepConfig {
    pub fn new(family: PseudoHermitianFamily, g1_range: GridRange) -> Self {
        Self {
            family,
            g1_range,
            omega_range: None,
            outputs: Vec::new(),
            format: OutputFormat::Csv,
            tol: Tolerance::default(),
        }
    }

    pub fn with_omega_range(mut self, omega_range: GridRange) -> Self {
        self.omega_range = Some(omega_range);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        self.g1_range.validate()?;
        if let Some(r) = &self.omega_range {
            r.validate()?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Tabulated sweep output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepGrid {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// All values of one column.
    pub fn values(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// One JSON object per row; NaN cells become `null`.
    pub fn to_json(&self) -> String {
        let records: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, &x)| {
                        let v = serde_json::Number::from_f64(x)
                            .map(serde_json::Value::Number)
                            .unwrap_or(serde_json::Value::Null);
                        (c.clone(), v)
                    })
                    .collect()
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&records).expect("records serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// `k(η)` over `eta_range`; `η = 1` gives the limit value `k = 1`.
pub fn sweep_k_vs_eta(eta_range: &GridRange) -> Result<SweepGrid> {
    eta_range.validate()?;
    if eta_range.start < 1.0 {
        return Err(Error::InvalidParameter(format!("eta must be >= 1, got {}", eta_range.start)));
    }
    let etas = eta_range.values();
    let ks: Vec<f64> = etas.par_iter().map(|&e| spectral::k_from_eta(e)).collect::<Result<_>>()?;
    Ok(SweepGrid {
        axes: vec![Axis { name: "eta".into(), values: etas.clone() }],
        columns: vec!["eta".into(), "k".into()],
        rows: etas.iter().zip(&ks).map(|(&e, &k)| vec![e, k]).collect(),
    })
}

pub const EIGENVALUE_COLUMNS: [&str; 11] = [
    "g1",
    "pseudo_hermitian",
    "re_omega0",
    "im_omega0",
    "re_omega_plus",
    "im_omega_plus",
    "re_omega_minus",
    "im_omega_minus",
    "classification",
    "coalescence_order",
    "ep_marker",
];

/// Exceptional points of a family lying inside `range`, as `(g₁, order)`.
fn exceptional_points(family: &PseudoHermitianFamily, range: &GridRange) -> Vec<(f64, u8)> {
    let mut eps = Vec::new();
    let Ok(ep3) = spectral::ep3_critical(family.eta, family.gamma_2, family.omega_c) else {
        return eps;
    };
    // the EP3 sits on this family only when k matches the EP3 ratio
    if (ep3.k - family.k).abs() > 1e-9 * family.k {
        return eps;
    }
    if range.contains(ep3.g_ep3) {
        eps.push((ep3.g_ep3, 3));
    }
    if family.eta > 1.0 && range.stop > ep3.g_ep3 {
        if let Ok(g) = spectral::ep2_locate(family.eta, family.gamma_2, family.omega_c, range.stop) {
            if range.contains(g) {
                eps.push((g, 2));
            }
        }
    }
    eps
}

/// Branch-tracked eigenvalues `(Ω₀, Ω₊, Ω₋)` in the detuning frame versus `g₁`.
///
/// Rows below `g_min` carry `pseudo_hermitian = 0` and NaN values. When the
/// family's `k` is the EP3 ratio, rows at the exact EP3 and EP2 couplings are
/// inserted and tagged in `ep_marker` with the order of the point.
pub fn sweep_eigenvalues(config: &SweepConfig) -> Result<SweepGrid> {
    config.validate()?;
    let family = &config.family;
    let mut points: Vec<(f64, u8)> = config.g1_range.values().into_iter().map(|g| (g, 0)).collect();
    for ep in exceptional_points(family, &config.g1_range) {
        let at = points.partition_point(|p| p.0 < ep.0);
        if points.get(at).is_some_and(|p| p.0 == ep.0) {
            points[at].1 = ep.1;
        } else {
            points.insert(at, ep);
        }
    }

    let spectra: Vec<Option<spectral::EigenTriple>> = points
        .par_iter()
        .map(|&(g, _)| {
            family
                .realize(g)
                .ok()
                .map(|p| spectral::eigenvalues(&EffectiveHamiltonian::build(&p), &config.tol))
        })
        .collect();

    let mut prev: Option<[Complex64; 3]> = None;
    let mut rows = Vec::with_capacity(points.len());
    for (&(g, marker), spec) in points.iter().zip(&spectra) {
        let mut row = vec![g];
        match spec {
            None => {
                row.push(0.0);
                row.extend([f64::NAN; 8]);
            }
            Some(e) => {
                let d = e.detunings();
                let branches = match &prev {
                    None => spectral::label_branches(&d),
                    Some(p) => spectral::track_branches(p, &d),
                };
                prev = Some(branches);
                row.push(1.0);
                for z in branches {
                    row.push(z.re);
                    row.push(z.im);
                }
                row.push(e.classification.code() as f64);
                row.push(e.coalescence_order as f64);
            }
        }
        row.push(marker as f64);
        rows.push(row);
    }

    Ok(SweepGrid {
        axes: vec![Axis { name: "g1".into(), values: points.iter().map(|p| p.0).collect() }],
        columns: EIGENVALUE_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

pub const SPECTRUM_COLUMNS: [&str; 4] = ["g1", "detuning", "pseudo_hermitian", "s_tot_sq"];

/// `|S_tot(ω)|²` on the `(g₁, ω − ω_c)` grid, `g₁` outermost.
pub fn sweep_spectrum(config: &SweepConfig) -> Result<SweepGrid> {
    config.validate()?;
    let omega_range = config
        .omega_range
        .ok_or_else(|| Error::InvalidParameter("spectrum sweep needs an omega range".into()))?;
    let family = &config.family;
    let gs = config.g1_range.values();
    let ws = omega_range.values();

    let blocks: Vec<Vec<Vec<f64>>> = gs
        .par_iter()
        .map(|&g| -> Result<Vec<Vec<f64>>> {
            match family.realize(g) {
                Err(Error::CouplingBelowMinimum { .. }) => {
                    Ok(ws.iter().map(|&w| vec![g, w, 0.0, f64::NAN]).collect())
                }
                Err(e) => Err(e),
                Ok(p) => ws
                    .iter()
                    .map(|&w| {
                        let s = s_coefficients(family.omega_c + w, &p)?;
                        Ok(vec![g, w, 1.0, s.s_tot_sq])
                    })
                    .collect(),
            }
        })
        .collect::<Result<_>>()?;

    Ok(SweepGrid {
        axes: vec![
            Axis { name: "g1".into(), values: gs },
            Axis { name: "detuning".into(), values: ws },
        ],
        columns: SPECTRUM_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: blocks.into_iter().flatten().collect(),
    })
}

/// The two parameter sets used for the eigenvalue and spectrum figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureCase {
    /// `η = k = 1`, `γ₂ = κ_int = 1.5` MHz.
    Symmetric,
    /// `η = 2`, `k = k(2)`, `γ₂ = κ_int = 1.5` MHz.
    Asymmetric,
}

impl FromStr for FigureCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(FigureCase::Symmetric),
            "asymmetric" => Ok(FigureCase::Asymmetric),
            other => Err(Error::InvalidParameter(format!("unknown case '{other}'"))),
        }
    }
}

pub const FIGURE_GAMMA_2: f64 = 1.5;

pub fn figure_family(case: FigureCase) -> Result<PseudoHermitianFamily> {
    let f = match case {
        FigureCase::Symmetric => PseudoHermitianFamily::symmetric(FIGURE_GAMMA_2)?,
        FigureCase::Asymmetric => {
            PseudoHermitianFamily::new(2.0, spectral::k_from_eta(2.0)?, FIGURE_GAMMA_2)?
        }
    };
    Ok(f.with_kappa_int(FIGURE_GAMMA_2))
}

pub fn fig2_range() -> GridRange {
    GridRange { start: 1.0, stop: 3.0, steps: 201 }
}

pub fn fig3_config(case: FigureCase) -> Result<SweepConfig> {
    let family = figure_family(case)?;
    let gm = family.g_min();
    Ok(SweepConfig::new(family, GridRange::new(0.8 * gm, 2.5 * gm, 501)?))
}

pub fn fig4_config(case: FigureCase) -> Result<SweepConfig> {
    let g = FIGURE_GAMMA_2;
    Ok(fig3_config(case)?.with_omega_range(GridRange::new(-6.0 * g, 6.0 * g, 601)?))
}

pub fn fig2() -> Result<SweepGrid> {
    sweep_k_vs_eta(&fig2_range())
}

pub fn fig3(case: FigureCase) -> Result<SweepGrid> {
    sweep_eigenvalues(&fig3_config(case)?)
}

pub fn fig4(case: FigureCase) -> Result<SweepGrid> {
    sweep_spectrum(&fig4_config(case)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(1.0), "1.00000000000e0");
        assert_eq!(fmt_num(-0.0), "0.00000000000e0");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(3f64.sqrt()), "1.73205080757e0");
    }

    #[test]
    fn grid_parse() {
        let r: GridRange = "1:3:5".parse().unwrap();
        assert_eq!(r.values(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!("1:3".parse::<GridRange>().is_err());
        assert!("3:1:5".parse::<GridRange>().is_err());
        assert!("1:3:1".parse::<GridRange>().is_err());
    }

    #[test]
    fn k_curve() {
        let g = sweep_k_vs_eta(&GridRange::new(1.0, 3.0, 21).unwrap()).unwrap();
        let k = g.values("k").unwrap();
        assert_eq!(k[0], 1.0);
        assert!(k.windows(2).all(|w| w[1] <= w[0]));
        assert!((k[10] - 0.494).abs() < 1e-3);
        assert!((k[20] - 0.30).abs() < 0.02);

        let fine = sweep_k_vs_eta(&GridRange::new(1.0, 3.0, 41).unwrap()).unwrap();
        let kf = fine.values("k").unwrap();
        for i in 0..21 {
            assert_eq!(kf[2 * i], k[i]);
        }
    }

    #[test]
    fn symmetric_eigen_sweep() {
        let fam = PseudoHermitianFamily::symmetric(1.5).unwrap();
        let cfg = SweepConfig::new(fam, GridRange::new(1.2, 3.0, 61).unwrap());
        let g = sweep_eigenvalues(&cfg).unwrap();
        let ph = g.values("pseudo_hermitian").unwrap();
        let gs = g.values("g1").unwrap();
        for (x, f) in gs.iter().zip(&ph) {
            assert_eq!(*f == 1.0, *x >= 1.5);
        }
        let marker = g.values("ep_marker").unwrap();
        let i = marker.iter().position(|&m| m == 3.0).unwrap();
        assert!((gs[i] - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(g.values("coalescence_order").unwrap()[i], 3.0);
        let j = g.column("im_omega_plus").unwrap();
        assert!(g.rows[i][j].abs() < 1e-4);
        let last = g.rows.last().unwrap();
        assert!(last[j].abs() < 1e-9);
        assert!(g.rows.iter().all(|r| r.len() == EIGENVALUE_COLUMNS.len()));
    }

    #[test]
    fn symmetric_spectrum_sweep() {
        let fam = PseudoHermitianFamily::symmetric(1.5).unwrap();
        let cfg = SweepConfig::new(fam, GridRange::new(1.5, 2.0, 3).unwrap())
            .with_omega_range(GridRange::new(-9.0, 9.0, 181).unwrap());
        let g = sweep_spectrum(&cfg).unwrap();
        assert_eq!(g.rows.len(), 3 * 181);
        for r in &g.rows {
            if r[1] == 0.0 {
                assert!(r[3] < 1e-8);
            }
        }

        let far = cfg.with_omega_range(GridRange::new(-2000.0, 2000.0, 2).unwrap());
        let g = sweep_spectrum(&far).unwrap();
        assert!(g.rows.iter().all(|r| (r[3] - 2.0).abs() < 0.02));
    }

    #[test]
    fn config_json_roundtrip() {
        let cfg = fig4_config(FigureCase::Asymmetric).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(SweepConfig::from_json(&text).unwrap(), cfg);
        let minimal = r#"{"family":{"eta":1,"k":1,"gamma_2":1.5},"g1_range":{"start":1,"stop":2,"steps":3}}"#;
        let cfg = SweepConfig::from_json(minimal).unwrap();
        assert_eq!(cfg.format, OutputFormat::Csv);
    }

    #[test]
    fn json_rows() {
        let g = SweepGrid {
            axes: vec![],
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![1.0, f64::NAN]],
        };
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(v[0]["a"], 1.0);
        assert!(v[0]["b"].is_null());
    }
}

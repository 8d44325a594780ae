//! Run configuration: one TOML document pinning exponents, grid, tolerances,
//! descent knobs, and the seed, so every emitted number is reproducible from
//! the config alone. Missing keys fall back to the defaults printed by
//! `--print-config`; unknown keys are rejected.

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::extremal::DescentOpts;
use crate::grid::GridSpec;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentsConfig {
    pub q: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub dim: u32,
}

impl Default for ExponentsConfig {
    fn default() -> Self {
        Self { q: 1.5, alpha: 1.75, gamma: 3.0, dim: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Interval,
    Rectangle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub kind: GridKind,
    /// Domain lengths, one per axis.
    pub lengths: Vec<f64>,
    /// Interior nodes per axis.
    pub n: Vec<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { kind: GridKind::Interval, lengths: vec![1.0], n: vec![256] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Scalar root residual bound.
    pub tol_root: f64,
    /// Descent gradient max-norm stopping threshold.
    pub tol_opt: f64,
    /// Strong-form equation defect bound for accepted solutions.
    pub tol_residual: f64,
    /// Energy-level comparisons (the zero-energy trichotomy case).
    pub tol_energy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tol_root: 1e-12, tol_opt: 1e-8, tol_residual: 1e-5, tol_energy: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescentConfig {
    pub initial_step: f64,
    pub max_iter: usize,
    pub max_backtracks: u32,
}

impl Default for DescentConfig {
    fn default() -> Self {
        let d = DescentOpts::default();
        Self { initial_step: d.initial_step, max_iter: d.max_iter, max_backtracks: d.max_backtracks }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub exponents: ExponentsConfig,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub descent: DescentConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            exponents: ExponentsConfig::default(),
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            descent: DescentConfig::default(),
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Invalid(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn build_exponents(&self) -> Result<Exponents> {
        let e = self.exponents;
        Exponents::new(e.q, e.alpha, e.gamma, e.dim)
    }

    pub fn build_grid(&self) -> Result<GridSpec> {
        let g = &self.grid;
        match g.kind {
            GridKind::Interval => {
                if g.lengths.len() != 1 || g.n.len() != 1 {
                    return Err(Error::Invalid(
                        "interval grid takes exactly one length and one node count".into(),
                    ));
                }
                GridSpec::interval(g.lengths[0], g.n[0])
            }
            GridKind::Rectangle => {
                if g.lengths.len() != 2 || g.n.len() != 2 {
                    return Err(Error::Invalid(
                        "rectangle grid takes two lengths and two node counts".into(),
                    ));
                }
                GridSpec::rectangle([g.lengths[0], g.lengths[1]], [g.n[0], g.n[1]])
            }
        }
    }

    pub fn descent_opts(&self) -> DescentOpts {
        DescentOpts {
            initial_step: self.descent.initial_step,
            max_iter: self.descent.max_iter,
            tol_opt: self.tolerances.tol_opt,
            max_backtracks: self.descent.max_backtracks,
            init: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.tolerances;
        for (name, v) in [
            ("tol_root", t.tol_root),
            ("tol_opt", t.tol_opt),
            ("tol_residual", t.tol_residual),
            ("tol_energy", t.tol_energy),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.descent.initial_step.is_finite() && self.descent.initial_step > 0.0) {
            return Err(Error::Invalid(format!(
                "initial_step must be > 0, got {}",
                self.descent.initial_step
            )));
        }
        if self.descent.max_iter == 0 || self.descent.max_backtracks == 0 {
            return Err(Error::Invalid("max_iter and max_backtracks must be positive".into()));
        }
        self.build_exponents()?;
        self.build_grid()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_roundtrip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml_string();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(back.seed, 42);
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = RunConfig::from_toml_str("[exponents]\ngamma = 4.0\n").unwrap();
        assert_eq!(cfg.exponents.gamma, 4.0);
        assert_eq!(cfg.exponents.q, 1.5);
        assert_eq!(cfg.grid, GridConfig::default());
    }

    #[test]
    fn invalid_exponent_order_names_the_inequality() {
        let err = RunConfig::from_toml_str("[exponents]\nq = 1.8\nalpha = 1.6\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("q") && msg.contains("alpha"), "message was: {msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml_str("typo = 3\n").is_err());
        assert!(RunConfig::from_toml_str("[grid]\nspacing = 0.1\n").is_err());
    }

    #[test]
    fn grid_shape_mismatch_is_reported() {
        let text = "[grid]\nkind = \"rectangle\"\nlengths = [1.0]\nn = [8, 8]\n";
        assert!(RunConfig::from_toml_str(text).is_err());
        let ok = "[grid]\nkind = \"rectangle\"\nlengths = [1.0, 2.0]\nn = [8, 8]\n";
        let cfg = RunConfig::from_toml_str(ok).unwrap();
        assert_eq!(cfg.build_grid().unwrap().node_count(), 64);
    }

    #[test]
    fn nonpositive_tolerances_are_rejected() {
        let err = RunConfig::from_toml_str("[tolerances]\ntol_opt = 0.0\n").unwrap_err();
        assert!(err.to_string().contains("tol_opt"));
    }
}

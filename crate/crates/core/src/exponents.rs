//! Exponent triples and the closed-form constants attached to them.

use crate::error::{Error, Result};

/// Validated exponent triple for the three powers in
/// `-Δu = |u|^{γ-2}u + μ|u|^{α-2}u - λ|u|^{q-2}u`, plus the space dimension.
///
/// Admissibility: `1 < q < α < 2 < γ`, and `γ` below the critical Sobolev
/// power `2N/(N-2)` when `N >= 3` (no upper bound for `N ∈ {1,2}`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponents {
    q: f64,
    alpha: f64,
    gamma: f64,
    dim: u32,
}

impl Exponents {
    pub fn new(q: f64, alpha: f64, gamma: f64, dim: u32) -> Result<Self> {
        for (name, v) in [("q", q), ("alpha", alpha), ("gamma", gamma)] {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("exponent {name} must be finite, got {v}")));
            }
        }
        if dim == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if !(1.0 < q) {
            return Err(Error::Invalid(format!("need 1 < q, got q = {q}")));
        }
        if !(q < alpha) {
            return Err(Error::Invalid(format!("need q < alpha, got q = {q}, alpha = {alpha}")));
        }
        if !(alpha < 2.0) {
            return Err(Error::Invalid(format!("need alpha < 2, got alpha = {alpha}")));
        }
        if !(2.0 < gamma) {
            return Err(Error::Invalid(format!("need 2 < gamma, got gamma = {gamma}")));
        }
        if dim >= 3 {
            let crit = 2.0 * dim as f64 / (dim as f64 - 2.0);
            if !(gamma < crit) {
                return Err(Error::Invalid(format!(
                    "need gamma < 2N/(N-2) = {crit} for N = {dim}, got gamma = {gamma}"
                )));
            }
        }
        Ok(Self { q, alpha, gamma, dim })
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Critical Sobolev power: `2N/(N-2)` for `N >= 3`, infinite below.
    pub fn sobolev_critical(&self) -> f64 {
        if self.dim >= 3 {
            2.0 * self.dim as f64 / (self.dim as f64 - 2.0)
        } else {
            f64::INFINITY
        }
    }

    /// The regime `γ > 1 + α` in which the stationarity quotient has a single
    /// inflection along every fiber and the second branch exists.
    #[inline]
    pub fn strict_convexity_regime(&self) -> bool {
        self.gamma > 1.0 + self.alpha
    }

    pub fn constants(&self) -> FiberConstants {
        FiberConstants::new(self)
    }
}

/// Closed-form constants of an exponent triple.
///
/// The fiber peak sits at `t_star = (peak_coeff * a / d)^{1/(γ-2)}` and the
/// per-ray lambda cap equals `cap_coeff * a^{(γ-q)/(γ-2)} / (b d^{(2-q)/(γ-2)})`,
/// one pair of constants per quotient family. `cap_ratio = cap_coeff_n /
/// cap_coeff_e` is always `> 1`: the stationarity family survives a strictly
/// wider lambda range than the energy family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberConstants {
    pub peak_coeff_e: f64,
    pub peak_coeff_n: f64,
    pub cap_coeff_e: f64,
    pub cap_coeff_n: f64,
    pub cap_ratio: f64,
}

impl FiberConstants {
    pub fn new(ex: &Exponents) -> Self {
        let (q, al, ga) = (ex.q(), ex.alpha(), ex.gamma());
        let peak_coeff_e = ga * (2.0 - al) * (2.0 - q) / (2.0 * (ga - al) * (ga - q));
        let peak_coeff_n = (2.0 - al) * (2.0 - q) / ((ga - al) * (ga - q));
        // Exponent carried by the d-factor (and by peak_coeff inside the cap).
        let e2 = (2.0 - q) / (ga - 2.0);
        let shared = (2.0 - al) * (ga - 2.0) / ((al - q) * (ga - q));
        let cap_coeff_e = 0.5 * q * peak_coeff_e.powf(e2) * shared;
        let cap_coeff_n = peak_coeff_n.powf(e2) * shared;
        let cap_ratio = (2.0 / q) * (2.0 / ga).powf(e2);
        Self { peak_coeff_e, peak_coeff_n, cap_coeff_e, cap_coeff_n, cap_ratio }
    }
}

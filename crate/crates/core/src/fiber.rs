//! Scalar analysis along rays t ↦ t·u.
//!
//! Everything in this module is a function of the norm tuple
//! `(a, b, c, d) = (‖u‖², ‖u‖_q^q, ‖u‖_α^α, ‖u‖_γ^γ)` (gradient norm squared
//! first) and the exponent triple; no discrete fields appear. The fiber energy
//! along a ray is
//!
//! ```text
//! phi(t) = t²/2·a + t^q/q·λb − t^α/α·μc − t^γ/γ·d
//! ```
//!
//! Two quotient families resolve μ per point of the ray:
//!
//! ```text
//! rayleigh_e(t) = α(t^{2−α}a/2 + λt^{q−α}b/q − t^{γ−α}d/γ)/c   (phi(t) = 0 at μ = this level)
//! rayleigh_n(t) = (t^{2−α}a + λt^{q−α}b − t^{γ−α}d)/c          (phi'(t) = 0 at μ = this level)
//! ```
//!
//! Solving instead for the λ that makes t a critical point of each quotient
//! gives the level maps `lambda_fiber_e/n`, each with a single interior peak at
//! `t_star`; the peak value `lambda_star_of_u` caps the λ range for which the
//! quotient still has a critical pair on the ray. Both quotients fall from +∞
//! (t → 0) to −∞ (t → ∞); below the cap they carry a local minimum/maximum
//! pair `(t_plus, t_minus)` whose quotient values bound the band of μ in which
//! the stationarity fiber has three roots.

use crate::error::{Error, Result};
use crate::exponents::{Exponents, FiberConstants};
use crate::rootfind;

/// Interval-width tolerance on t used by every fiber root solve.
pub const TOL_ROOT: f64 = 1e-12;
/// Relative λ distance to the cap below which a critical pair is reported as
/// collapsed onto the peak.
pub const DEGENERATE_REL: f64 = 1e-10;
/// Relative μ distance to a band edge below which a fiber root is reported as
/// a double root.
pub const BAND_EDGE_REL: f64 = 1e-10;

/// `(‖u‖², ‖u‖_q^q, ‖u‖_α^α, ‖u‖_γ^γ)` of some field, all strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormTuple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl NormTuple {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid(format!(
                    "norm tuple entry {name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// Tuple of k·u: `(k²a, k^q b, k^α c, k^γ d)`.
    pub fn scaled(&self, k: f64, ex: &Exponents) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Domain(format!("scaling factor must be > 0, got {k}")));
        }
        NormTuple::new(
            k * k * self.a,
            k.powf(ex.q()) * self.b,
            k.powf(ex.alpha()) * self.c,
            k.powf(ex.gamma()) * self.d,
        )
    }
}

/// The two quotient families: `E` resolves μ from `phi(t) = 0`, `N` from
/// `phi'(t) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientFamily {
    E,
    N,
}

/// Critical pair of a lambda level map at a given λ below the cap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPair {
    pub t_plus: f64,
    pub t_minus: f64,
    /// λ within `DEGENERATE_REL` of the cap: both entries equal `t_star`.
    pub degenerate: bool,
}

/// Outcome of `critical_pair`: either the pair, or λ lies above the per-ray cap
/// and the level line misses the peak entirely.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CriticalOutcome {
    Pair(CriticalPair),
    AboveCap,
}

impl CriticalOutcome {
    pub fn pair(&self) -> Option<CriticalPair> {
        match self {
            CriticalOutcome::Pair(p) => Some(*p),
            CriticalOutcome::AboveCap => None,
        }
    }
}

/// Roots of `rayleigh_n(t) = μ` on a ray, labelled by position relative to the
/// critical pair `(t_plus, t_minus)` of the stationarity quotient.
///
/// Inside the band `(μ_plus, μ_minus)` there are three simple roots
/// `s0 < s1 < s2`. Crossing a band edge merges two of them: at `μ = μ_plus`
/// the pair `s0 = s1` collapses onto `t_plus` (the tail root survives), at
/// `μ = μ_minus` the pair `s1 = s2` collapses onto `t_minus` (the inner root
/// survives). Below the band only the tail root remains, above it only the
/// inner root. With λ at or above the cap the quotient is monotone and every
/// level is crossed exactly once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NehariRoots {
    Three { s0: f64, s1: f64, s2: f64 },
    TwoLower { tangent: f64, s2: f64 },
    TwoUpper { s0: f64, tangent: f64 },
    OneBelow { s2: f64 },
    OneAbove { s0: f64 },
    OneMonotone { s: f64 },
}

impl NehariRoots {
    /// Number of distinct roots (double roots count once).
    pub fn count(&self) -> usize {
        match self {
            NehariRoots::Three { .. } => 3,
            NehariRoots::TwoLower { .. } | NehariRoots::TwoUpper { .. } => 2,
            _ => 1,
        }
    }

    /// All distinct roots ascending, paired with multiplicity.
    pub fn all(&self) -> Vec<(f64, u8)> {
        match *self {
            NehariRoots::Three { s0, s1, s2 } => vec![(s0, 1), (s1, 1), (s2, 1)],
            NehariRoots::TwoLower { tangent, s2 } => vec![(tangent, 2), (s2, 1)],
            NehariRoots::TwoUpper { s0, tangent } => vec![(s0, 1), (tangent, 2)],
            NehariRoots::OneBelow { s2 } => vec![(s2, 1)],
            NehariRoots::OneAbove { s0 } => vec![(s0, 1)],
            NehariRoots::OneMonotone { s } => vec![(s, 1)],
        }
    }

    /// Middle root, present only strictly inside the band.
    pub fn s1(&self) -> Option<f64> {
        match self {
            NehariRoots::Three { s1, .. } => Some(*s1),
            _ => None,
        }
    }

    /// Largest root, provided it has not collapsed onto `t_minus`.
    pub fn tail_root(&self) -> Option<f64> {
        match self {
            NehariRoots::Three { s2, .. }
            | NehariRoots::TwoLower { s2, .. }
            | NehariRoots::OneBelow { s2 } => Some(*s2),
            _ => None,
        }
    }
}

/// The four extremal quotient values of a ray at a given λ. `E`-entries are
/// absent once λ reaches the e-cap, `N`-entries once it reaches the n-cap.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MuQuotients {
    pub n_plus: Option<f64>,
    pub e_plus: Option<f64>,
    pub e_minus: Option<f64>,
    pub n_minus: Option<f64>,
}

impl MuQuotients {
    /// `n_plus <= e_plus < e_minus < n_minus` over the populated entries.
    pub fn ordered(&self) -> bool {
        let vals = [self.n_plus, self.e_plus, self.e_minus, self.n_minus];
        let present: Vec<f64> = vals.iter().flatten().copied().collect();
        present.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn get(&self, kind: MuKind) -> Option<f64> {
        match kind {
            MuKind::NPlus => self.n_plus,
            MuKind::EPlus => self.e_plus,
            MuKind::EMinus => self.e_minus,
            MuKind::NMinus => self.n_minus,
        }
    }
}

/// Names one of the four extremal μ quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MuKind {
    NPlus,
    EPlus,
    EMinus,
    NMinus,
}

impl MuKind {
    pub const ALL: [MuKind; 4] = [MuKind::NPlus, MuKind::EPlus, MuKind::EMinus, MuKind::NMinus];

    pub fn family(&self) -> QuotientFamily {
        match self {
            MuKind::NPlus | MuKind::NMinus => QuotientFamily::N,
            MuKind::EPlus | MuKind::EMinus => QuotientFamily::E,
        }
    }

    /// True for the kinds evaluated at the large critical point `t_minus`.
    pub fn is_minus(&self) -> bool {
        matches!(self, MuKind::EMinus | MuKind::NMinus)
    }

    pub fn label(&self) -> &'static str {
        match self {
            MuKind::NPlus => "mu_n_plus",
            MuKind::EPlus => "mu_e_plus",
            MuKind::EMinus => "mu_e_minus",
            MuKind::NMinus => "mu_n_minus",
        }
    }
}

/// One ray's scalar data: norm tuple, exponents, and their closed-form
/// constants. All fiber operations hang off this.
#[derive(Clone, Copy, Debug)]
pub struct Fiber {
    nt: NormTuple,
    ex: Exponents,
    k: FiberConstants,
}

fn require_t_pos(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("fiber parameter t must be finite and > 0, got {t}")))
    }
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

fn require_lambda_pos(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda must be finite and > 0, got {lambda}")))
    }
}

impl Fiber {
    pub fn new(nt: NormTuple, ex: Exponents) -> Self {
        let k = ex.constants();
        Self { nt, ex, k }
    }

    pub fn tuple(&self) -> NormTuple {
        self.nt
    }

    pub fn exponents(&self) -> Exponents {
        self.ex
    }

    pub fn constants(&self) -> FiberConstants {
        self.k
    }

    /// Fiber energy `phi(t)`; defined for t = 0 as 0.
    pub fn phi_fiber(&self, t: f64, lambda: f64, mu: f64) -> Result<f64> {
        require_finite("lambda", lambda)?;
        require_finite("mu", mu)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        require_t_pos(t)?;
        Ok(self.phi_raw(t, lambda, mu))
    }

    fn phi_raw(&self, t: f64, lambda: f64, mu: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        0.5 * t * t * a + t.powf(q) / q * lambda * b
            - t.powf(al) / al * mu * c
            - t.powf(ga) / ga * d
    }

    /// d/dt of the fiber energy.
    pub fn phi_d1(&self, t: f64, lambda: f64, mu: f64) -> Result<f64> {
        require_t_pos(t)?;
        require_finite("lambda", lambda)?;
        require_finite("mu", mu)?;
        Ok(self.phi_d1_raw(t, lambda, mu))
    }

    fn phi_d1_raw(&self, t: f64, lambda: f64, mu: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        t * a + t.powf(q - 1.0) * lambda * b - t.powf(al - 1.0) * mu * c - t.powf(ga - 1.0) * d
    }

    /// d²/dt² of the fiber energy.
    pub fn phi_d2(&self, t: f64, lambda: f64, mu: f64) -> Result<f64> {
        require_t_pos(t)?;
        require_finite("lambda", lambda)?;
        require_finite("mu", mu)?;
        Ok(self.phi_d2_raw(t, lambda, mu))
    }

    fn phi_d2_raw(&self, t: f64, lambda: f64, mu: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        a + (q - 1.0) * t.powf(q - 2.0) * lambda * b
            - (al - 1.0) * t.powf(al - 2.0) * mu * c
            - (ga - 1.0) * t.powf(ga - 2.0) * d
    }

    /// Stationarity quotient: `rayleigh_n(t) = μ` exactly when `phi'(t) = 0`.
    pub fn rayleigh_n(&self, t: f64, lambda: f64) -> Result<f64> {
        require_t_pos(t)?;
        require_finite("lambda", lambda)?;
        Ok(self.rayleigh_n_raw(t, lambda))
    }

    fn rayleigh_n_raw(&self, t: f64, lambda: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        (t.powf(2.0 - al) * a + lambda * t.powf(q - al) * b - t.powf(ga - al) * d) / c
    }

    /// Energy quotient: `rayleigh_e(t) = μ` exactly when `phi(t) = 0`.
    pub fn rayleigh_e(&self, t: f64, lambda: f64) -> Result<f64> {
        require_t_pos(t)?;
        require_finite("lambda", lambda)?;
        Ok(self.rayleigh_e_raw(t, lambda))
    }

    fn rayleigh_e_raw(&self, t: f64, lambda: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        al * (0.5 * t.powf(2.0 - al) * a + lambda * t.powf(q - al) / q * b
            - t.powf(ga - al) / ga * d)
            / c
    }

    pub fn rayleigh_n_d1(&self, t: f64, lambda: f64) -> Result<f64> {
        require_t_pos(t)?;
        require_finite("lambda", lambda)?;
        Ok(self.rayleigh_n_d1_raw(t, lambda))
    }

    fn rayleigh_n_d1_raw(&self, t: f64, lambda: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        ((2.0 - al) * t.powf(1.0 - al) * a + (q - al) * lambda * t.powf(q - al - 1.0) * b
            - (ga - al) * t.powf(ga - al - 1.0) * d)
            / c
    }

    pub fn rayleigh_n_d2(&self, t: f64, lambda: f64) -> Result<f64> {
        require_t_pos(t)?;
        require_finite("lambda", lambda)?;
        Ok(self.rayleigh_n_d2_raw(t, lambda))
    }

    fn rayleigh_n_d2_raw(&self, t: f64, lambda: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        ((2.0 - al) * (1.0 - al) * t.powf(-al) * a
            + (q - al) * (q - al - 1.0) * lambda * t.powf(q - al - 2.0) * b
            - (ga - al) * (ga - al - 1.0) * t.powf(ga - al - 2.0) * d)
            / c
    }

    pub fn rayleigh_e_d1(&self, t: f64, lambda: f64) -> Result<f64> {
        require_t_pos(t)?;
        require_finite("lambda", lambda)?;
        Ok(self.rayleigh_e_d1_raw(t, lambda))
    }

    fn rayleigh_e_d1_raw(&self, t: f64, lambda: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        al * (0.5 * (2.0 - al) * t.powf(1.0 - al) * a
            + (q - al) / q * lambda * t.powf(q - al - 1.0) * b
            - (ga - al) / ga * t.powf(ga - al - 1.0) * d)
            / c
    }

    pub fn rayleigh_e_d2(&self, t: f64, lambda: f64) -> Result<f64> {
        require_t_pos(t)?;
        require_finite("lambda", lambda)?;
        Ok(self.rayleigh_e_d2_raw(t, lambda))
    }

    fn rayleigh_e_d2_raw(&self, t: f64, lambda: f64) -> f64 {
        let NormTuple { a, b, c, d } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        al * (0.5 * (2.0 - al) * (1.0 - al) * t.powf(-al) * a
            + (q - al) * (q - al - 1.0) / q * lambda * t.powf(q - al - 2.0) * b
            - (ga - al) * (ga - al - 1.0) / ga * t.powf(ga - al - 2.0) * d)
            / c
    }

    /// λ level map of the N family: the λ for which t is a critical point of
    /// the stationarity quotient, `rayleigh_n_d1(t, λ) = 0 ⟺ λ = this`.
    pub fn lambda_fiber_n(&self, t: f64) -> Result<f64> {
        require_t_pos(t)?;
        Ok(self.lambda_fiber_n_raw(t))
    }

    fn lambda_fiber_n_raw(&self, t: f64) -> f64 {
        let NormTuple { a, b, d, .. } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        ((2.0 - al) * t.powf(2.0 - q) * a - (ga - al) * t.powf(ga - q) * d) / ((al - q) * b)
    }

    /// λ level map of the E family, `rayleigh_e_d1(t, λ) = 0 ⟺ λ = this`.
    pub fn lambda_fiber_e(&self, t: f64) -> Result<f64> {
        require_t_pos(t)?;
        Ok(self.lambda_fiber_e_raw(t))
    }

    fn lambda_fiber_e_raw(&self, t: f64) -> f64 {
        let NormTuple { a, b, d, .. } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        self.ex.q() * (0.5 * (2.0 - al) * t.powf(2.0 - q) * a - (ga - al) / ga * t.powf(ga - q) * d)
            / ((al - q) * b)
    }

    /// d/dt of `lambda_fiber_n`.
    pub fn lambda_fiber_n_d1(&self, t: f64) -> Result<f64> {
        require_t_pos(t)?;
        Ok(self.lambda_fiber_n_d1_raw(t))
    }

    fn lambda_fiber_n_d1_raw(&self, t: f64) -> f64 {
        let NormTuple { a, b, d, .. } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        ((2.0 - al) * (2.0 - q) * t.powf(1.0 - q) * a
            - (ga - al) * (ga - q) * t.powf(ga - q - 1.0) * d)
            / ((al - q) * b)
    }

    /// d/dt of `lambda_fiber_e`.
    pub fn lambda_fiber_e_d1(&self, t: f64) -> Result<f64> {
        require_t_pos(t)?;
        Ok(self.lambda_fiber_e_d1_raw(t))
    }

    fn lambda_fiber_e_d1_raw(&self, t: f64) -> f64 {
        let NormTuple { a, b, d, .. } = self.nt;
        let (q, al, ga) = (self.ex.q(), self.ex.alpha(), self.ex.gamma());
        q * (0.5 * (2.0 - al) * (2.0 - q) * t.powf(1.0 - q) * a
            - (ga - al) * (ga - q) / ga * t.powf(ga - q - 1.0) * d)
            / ((al - q) * b)
    }

    /// Peak location of the requested λ level map,
    /// `t_star = (peak_coeff · a/d)^{1/(γ-2)}`.
    pub fn t_star(&self, family: QuotientFamily) -> f64 {
        let coeff = match family {
            QuotientFamily::E => self.k.peak_coeff_e,
            QuotientFamily::N => self.k.peak_coeff_n,
        };
        (coeff * self.nt.a / self.nt.d).powf(1.0 / (self.ex.gamma() - 2.0))
    }

    /// Per-ray λ cap: the λ level map evaluated at its own peak. Computed by
    /// composition; the closed form `cap_coeff · a^{(γ-q)/(γ-2)} / (b·d^{(2-q)/(γ-2)})`
    /// agrees and is exercised in tests.
    pub fn lambda_star_of_u(&self, family: QuotientFamily) -> f64 {
        let t = self.t_star(family);
        match family {
            QuotientFamily::E => self.lambda_fiber_e_raw(t),
            QuotientFamily::N => self.lambda_fiber_n_raw(t),
        }
    }

    /// Closed-form value of the same cap, from the stored constants.
    pub fn lambda_star_closed_form(&self, family: QuotientFamily) -> f64 {
        let NormTuple { a, b, d, .. } = self.nt;
        let (q, ga) = (self.ex.q(), self.ex.gamma());
        let coeff = match family {
            QuotientFamily::E => self.k.cap_coeff_e,
            QuotientFamily::N => self.k.cap_coeff_n,
        };
        coeff * a.powf((ga - q) / (ga - 2.0)) / (b * d.powf((2.0 - q) / (ga - 2.0)))
    }

    fn lambda_fiber_value(&self, family: QuotientFamily, t: f64) -> f64 {
        match family {
            QuotientFamily::E => self.lambda_fiber_e_raw(t),
            QuotientFamily::N => self.lambda_fiber_n_raw(t),
        }
    }

    /// Both solutions of `lambda_fiber(t) = λ`, bracketing the peak. λ within
    /// `DEGENERATE_REL` of the cap collapses the pair onto `t_star`; λ above
    /// the cap has none.
    pub fn critical_pair(&self, family: QuotientFamily, lambda: f64) -> Result<CriticalOutcome> {
        require_lambda_pos(lambda)?;
        let cap = self.lambda_star_of_u(family);
        let t_peak = self.t_star(family);
        if (lambda - cap).abs() <= DEGENERATE_REL * cap {
            return Ok(CriticalOutcome::Pair(CriticalPair {
                t_plus: t_peak,
                t_minus: t_peak,
                degenerate: true,
            }));
        }
        if lambda > cap {
            return Ok(CriticalOutcome::AboveCap);
        }
        let f = |t: f64| self.lambda_fiber_value(family, t) - lambda;
        let df = |t: f64| match family {
            QuotientFamily::E => self.lambda_fiber_e_d1_raw(t),
            QuotientFamily::N => self.lambda_fiber_n_d1_raw(t),
        };
        // Left root: shrink from the peak until the level map falls below λ/2.
        let lo = rootfind::shrink_until(
            0.5 * t_peak,
            0.5,
            f64::MIN_POSITIVE,
            |t| self.lambda_fiber_value(family, t) < 0.5 * lambda,
            "lambda fiber left bracket",
        )?;
        let t_plus = rootfind::bisect(&f, lo, t_peak, TOL_ROOT)?;
        let t_plus = rootfind::polish(&f, &df, t_plus, lo, t_peak, 3);
        // Right root: grow past the peak until the level map drops below λ.
        let hi = rootfind::grow_until(
            2.0 * t_peak,
            2.0,
            1100,
            |t| self.lambda_fiber_value(family, t) < lambda,
            "lambda fiber right bracket",
        )?;
        let t_minus = rootfind::bisect(&f, t_peak, hi, TOL_ROOT)?;
        let t_minus = rootfind::polish(&f, &df, t_minus, t_peak, hi, 3);
        Ok(CriticalOutcome::Pair(CriticalPair { t_plus, t_minus, degenerate: false }))
    }

    /// The four extremal quotient values at λ. Families whose cap lies at or
    /// below λ contribute absent entries.
    pub fn mu_quotients(&self, lambda: f64) -> Result<MuQuotients> {
        require_lambda_pos(lambda)?;
        let mut out = MuQuotients::default();
        if let Some(p) = self.critical_pair(QuotientFamily::N, lambda)?.pair() {
            out.n_plus = Some(self.rayleigh_n_raw(p.t_plus, lambda));
            out.n_minus = Some(self.rayleigh_n_raw(p.t_minus, lambda));
        }
        if let Some(p) = self.critical_pair(QuotientFamily::E, lambda)?.pair() {
            out.e_plus = Some(self.rayleigh_e_raw(p.t_plus, lambda));
            out.e_minus = Some(self.rayleigh_e_raw(p.t_minus, lambda));
        }
        Ok(out)
    }

    /// All roots of `rayleigh_n(t) = μ` with their position in the band
    /// structure. λ must be positive; μ may be any finite real.
    pub fn nehari_roots(&self, lambda: f64, mu: f64) -> Result<NehariRoots> {
        require_lambda_pos(lambda)?;
        require_finite("mu", mu)?;
        let f = |t: f64| self.rayleigh_n_raw(t, lambda) - mu;
        let df = |t: f64| self.rayleigh_n_d1_raw(t, lambda);
        let t_peak = self.t_star(QuotientFamily::N);
        let pair = match self.critical_pair(QuotientFamily::N, lambda)? {
            CriticalOutcome::Pair(p) if !p.degenerate => p,
            // Monotone decreasing fiber (λ at or above the cap, or collapsed
            // pair): every μ level is crossed exactly once.
            _ => {
                let lo = self.shrink_above(&f, t_peak)?;
                let hi = self.grow_below_tail(&f, 4.0 * t_peak)?;
                let s = rootfind::bisect(&f, lo, hi, TOL_ROOT)?;
                return Ok(NehariRoots::OneMonotone { s: rootfind::polish(&f, &df, s, lo, hi, 3) });
            }
        };
        let mu_plus = self.rayleigh_n_raw(pair.t_plus, lambda);
        let mu_minus = self.rayleigh_n_raw(pair.t_minus, lambda);
        let scale = 1.0 + mu_plus.abs().max(mu_minus.abs());
        if (mu - mu_plus).abs() <= BAND_EDGE_REL * scale {
            // Tangency at the local minimum: s0 = s1 double root, tail simple.
            let s2 = self.tail_root(&f, &df, pair.t_minus, mu)?;
            return Ok(NehariRoots::TwoLower { tangent: pair.t_plus, s2 });
        }
        if (mu - mu_minus).abs() <= BAND_EDGE_REL * scale {
            // Tangency at the local maximum: s1 = s2 double root, inner simple.
            let s0 = self.inner_root(&f, &df, pair.t_plus)?;
            return Ok(NehariRoots::TwoUpper { s0, tangent: pair.t_minus });
        }
        if mu < mu_plus {
            // Level below the local minimum: only the decreasing tail crosses.
            let s2 = self.tail_root(&f, &df, pair.t_minus, mu)?;
            return Ok(NehariRoots::OneBelow { s2 });
        }
        if mu > mu_minus {
            // Level above the local maximum: only the inner branch crosses.
            let s0 = self.inner_root(&f, &df, pair.t_plus)?;
            return Ok(NehariRoots::OneAbove { s0 });
        }
        let s0 = self.inner_root(&f, &df, pair.t_plus)?;
        let s1 = rootfind::bisect(&f, pair.t_plus, pair.t_minus, TOL_ROOT)?;
        let s1 = rootfind::polish(&f, &df, s1, pair.t_plus, pair.t_minus, 3);
        let s2 = self.tail_root(&f, &df, pair.t_minus, mu)?;
        Ok(NehariRoots::Three { s0, s1, s2 })
    }

    fn shrink_above<F: Fn(f64) -> f64>(&self, f: &F, from: f64) -> Result<f64> {
        rootfind::shrink_until(0.5 * from, 0.5, f64::MIN_POSITIVE, |t| f(t) > 0.0, "inner bracket")
    }

    fn inner_root<F, D>(&self, f: &F, df: &D, t_plus: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let lo = self.shrink_above(f, t_plus)?;
        let s = rootfind::bisect(f, lo, t_plus, TOL_ROOT)?;
        Ok(rootfind::polish(f, df, s, lo, t_plus, 3))
    }

    fn grow_below_tail<F: Fn(f64) -> f64>(&self, f: &F, start: f64) -> Result<f64> {
        // 64 doublings with the 1-margin; enough for every admissible triple
        // with gamma meaningfully above alpha.
        rootfind::grow_until(start, 2.0, 64, |t| f(t) < -1.0 || f(t) < 0.0, "tail bracket")
    }

    fn tail_root<F, D>(&self, f: &F, df: &D, t_minus: f64, _mu: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let start = (4.0 * self.t_star(QuotientFamily::N)).max(2.0 * t_minus);
        let hi = self.grow_below_tail(f, start)?;
        let s = rootfind::bisect(f, t_minus, hi, TOL_ROOT)?;
        Ok(rootfind::polish(f, df, s, t_minus, hi, 3))
    }

    /// Unique zero of `rayleigh_n_d2` between the critical pair. Requires the
    /// strict convexity regime and λ strictly below the n-cap.
    pub fn inflection_root(&self, lambda: f64) -> Result<f64> {
        if !self.ex.strict_convexity_regime() {
            return Err(Error::UnsupportedRegime(format!(
                "inflection root needs gamma > 1 + alpha, got gamma = {}, alpha = {}",
                self.ex.gamma(),
                self.ex.alpha()
            )));
        }
        require_lambda_pos(lambda)?;
        let pair = match self.critical_pair(QuotientFamily::N, lambda)? {
            CriticalOutcome::Pair(p) if !p.degenerate => p,
            _ => {
                return Err(Error::Precondition(format!(
                    "inflection root needs lambda below the n-cap {:e}, got {lambda:e}",
                    self.lambda_star_of_u(QuotientFamily::N)
                )))
            }
        };
        let f = |t: f64| self.rayleigh_n_d2_raw(t, lambda);
        if !(f(pair.t_plus) > 0.0 && f(pair.t_minus) < 0.0) {
            return Err(Error::Numerical(format!(
                "curvature signs at the critical pair are not (+,-): ({}, {})",
                f(pair.t_plus),
                f(pair.t_minus)
            )));
        }
        rootfind::bisect(&f, pair.t_plus, pair.t_minus, TOL_ROOT)
    }

    /// Full scalar snapshot of the ray at λ (and optionally a μ level).
    pub fn analyze(&self, lambda: f64, mu_level: Option<f64>) -> Result<FiberAnalysis> {
        require_lambda_pos(lambda)?;
        let crit_e = self.critical_pair(QuotientFamily::E, lambda)?;
        let crit_n = self.critical_pair(QuotientFamily::N, lambda)?;
        let mu = self.mu_quotients(lambda)?;
        let inflection = match (self.ex.strict_convexity_regime(), crit_n.pair()) {
            (true, Some(p)) if !p.degenerate => Some(self.inflection_root(lambda)?),
            _ => None,
        };
        let roots = match mu_level {
            Some(m) => Some(self.nehari_roots(lambda, m)?),
            None => None,
        };
        Ok(FiberAnalysis {
            exponents: self.ex,
            tuple: self.nt,
            constants: self.k,
            strict_regime: self.ex.strict_convexity_regime(),
            t_star_e: self.t_star(QuotientFamily::E),
            t_star_n: self.t_star(QuotientFamily::N),
            lambda_star_e: self.lambda_star_of_u(QuotientFamily::E),
            lambda_star_n: self.lambda_star_of_u(QuotientFamily::N),
            lambda,
            crit_e,
            crit_n,
            mu,
            inflection,
            mu_level,
            roots,
        })
    }
}

/// Scalar snapshot of one ray at one λ, as produced by [`Fiber::analyze`].
#[derive(Clone, Debug)]
pub struct FiberAnalysis {
    pub exponents: Exponents,
    pub tuple: NormTuple,
    pub constants: FiberConstants,
    pub strict_regime: bool,
    pub t_star_e: f64,
    pub t_star_n: f64,
    pub lambda_star_e: f64,
    pub lambda_star_n: f64,
    pub lambda: f64,
    pub crit_e: CriticalOutcome,
    pub crit_n: CriticalOutcome,
    pub mu: MuQuotients,
    pub inflection: Option<f64>,
    pub mu_level: Option<f64>,
    pub roots: Option<NehariRoots>,
}

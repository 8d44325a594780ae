//! Brute-force verifiers that re-derive the scalar layer without trusting it:
//! dense sign-change scans, Richardson finite-difference order estimates, and
//! a randomized suite checking every ordering, identity, and sign dictionary
//! the fiber layer promises.
//!
//! The suite samples exponents with margins chosen so the checked asymptotic
//! statements are numerically decidable at the stated tolerances: in
//! particular γ ≥ 2.6, because the small-t ratio probe at t = 1e-6·t^e has a
//! correction term of order t^{γ-2} that would swamp the 1e-3 tolerance for γ
//! near 2.

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::fiber::{Fiber, NormTuple, QuotientFamily};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Sampler and size knobs for [`verify_lemma_suite`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyOpts {
    pub n_cases: usize,
    pub seed: u64,
    /// Restrict the exponent sampler to γ > 1 + α.
    pub strict_only: bool,
    /// λ is drawn uniformly from (1e-3, lambda_frac_max)·λ^{e,*}(u).
    pub lambda_frac_max: f64,
    /// Log-uniform range for each norm tuple entry.
    pub scale_lo: f64,
    pub scale_hi: f64,
}

impl Default for VerifyOpts {
    fn default() -> Self {
        Self {
            n_cases: 1000,
            seed: 42,
            strict_only: false,
            lambda_frac_max: 0.95,
            scale_lo: 1e-2,
            scale_hi: 1e2,
        }
    }
}

/// One violated relation: which case, what was expected, what was seen.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyFailure {
    pub case: String,
    pub relation: String,
    pub observed: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub case_count: usize,
    pub failures: Vec<VerifyFailure>,
    pub seed: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Linear sweep of `f` over `[t_lo, t_hi]` returning the sign-change brackets.
/// Non-finite samples are skipped; an exact zero closes the current bracket.
pub fn grid_scan_roots(
    f: impl Fn(f64) -> f64,
    t_lo: f64,
    t_hi: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(t_lo > 0.0 && t_hi > t_lo && t_lo.is_finite() && t_hi.is_finite()) {
        return Err(Error::Invalid(format!("bad scan range ({t_lo}, {t_hi})")));
    }
    if n_samples < 1000 {
        return Err(Error::Invalid(format!("need at least 1000 samples, got {n_samples}")));
    }
    let step = (t_hi - t_lo) / n_samples as f64;
    let mut out = Vec::new();
    let mut pt = t_lo;
    let mut pv = f(t_lo);
    for i in 1..=n_samples {
        let t = if i == n_samples { t_hi } else { t_lo + i as f64 * step };
        let v = f(t);
        if pv == 0.0 || !pv.is_finite() || !v.is_finite() {
            pt = t;
            pv = v;
            continue;
        }
        if (pv < 0.0) != (v < 0.0) || v == 0.0 {
            out.push((pt, t));
        }
        pt = t;
        pv = v;
    }
    Ok(out)
}

/// Log-spaced sweep of the stationarity level function
/// `g(t) = t^{2-α}a + λ t^{q-α}b - t^{γ-α}d - μc`
/// whose roots are the fiber stationarity roots. The powers advance by one
/// multiplication per sample, so a million-sample scan costs a handful of
/// flops each and shares no code with the analytic root solvers.
pub fn scan_stationarity_level(
    nt: NormTuple,
    ex: &Exponents,
    lambda: f64,
    mu: f64,
    t_lo: f64,
    t_hi: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(t_lo > 0.0 && t_hi > t_lo && t_lo.is_finite() && t_hi.is_finite()) {
        return Err(Error::Invalid(format!("bad scan range ({t_lo}, {t_hi})")));
    }
    if n_samples < 1000 {
        return Err(Error::Invalid(format!("need at least 1000 samples, got {n_samples}")));
    }
    let rho = (t_hi / t_lo).powf(1.0 / n_samples as f64);
    let (q, al, ga) = (ex.q(), ex.alpha(), ex.gamma());
    let r2 = rho.powf(2.0 - al);
    let rq = rho.powf(q - al);
    let rg = rho.powf(ga - al);
    let mut p2 = t_lo.powf(2.0 - al);
    let mut pq = t_lo.powf(q - al);
    let mut pg = t_lo.powf(ga - al);
    let mut t = t_lo;
    let mut pv = p2 * nt.a + lambda * pq * nt.b - pg * nt.d - mu * nt.c;
    let mut pt = t;
    let mut out = Vec::new();
    for _ in 0..n_samples {
        t *= rho;
        p2 *= r2;
        pq *= rq;
        pg *= rg;
        let v = p2 * nt.a + lambda * pq * nt.b - pg * nt.d - mu * nt.c;
        if pv == 0.0 {
            pt = t;
            pv = v;
            continue;
        }
        if (pv < 0.0) != (v < 0.0) || v == 0.0 {
            out.push((pt, t));
        }
        pt = t;
        pv = v;
    }
    Ok(out)
}

/// Richardson order estimate for a claimed derivative value: central
/// differences of `f` at `t` over halving steps, error against `derivative`,
/// median of the pairwise observed orders. Returns +∞ when the differences
/// match the claim to rounding at every step (e.g. exactly linear `f`).
pub fn fd_order(f: impl Fn(f64) -> f64, t: f64, derivative: f64, h0: f64) -> f64 {
    let steps = 7;
    let mut errs = Vec::with_capacity(steps);
    let mut floors = Vec::with_capacity(steps);
    let mut h = h0;
    for _ in 0..steps {
        let (fp, fm) = (f(t + h), f(t - h));
        let d = (fp - fm) / (2.0 * h);
        errs.push((d - derivative).abs());
        // Cancellation noise of the difference quotient itself; errors at or
        // below it carry no order information.
        floors.push(30.0 * f64::EPSILON * (fp.abs() + fm.abs()) / (2.0 * h));
        h *= 0.5;
    }
    let mut orders: Vec<f64> = (1..steps)
        .filter(|&i| errs[i - 1] > floors[i - 1] && errs[i] > floors[i])
        .map(|i| (errs[i - 1] / errs[i]).log2())
        .collect();
    if orders.is_empty() {
        return f64::INFINITY;
    }
    orders.sort_by(|a, b| a.partial_cmp(b).unwrap());
    orders[orders.len() / 2]
}

struct Case {
    fb: Fiber,
    lambda: f64,
    label: String,
}

fn sample_case(idx: usize, opts: &VerifyOpts) -> Case {
    let case_seed = opts.seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
    let q: f64 = rng.gen_range(1.05..1.9);
    let alpha: f64 = rng.gen_range(q + 0.05..1.95);
    let gamma_lo = if opts.strict_only { (1.0 + alpha + 0.05).max(2.6) } else { 2.6 };
    let gamma = rng.gen_range(gamma_lo..5.5);
    let ex = Exponents::new(q, alpha, gamma, 1).expect("sampler respects the exponent order");
    let (lo, hi) = (opts.scale_lo.ln(), opts.scale_hi.ln());
    let draw = |rng: &mut ChaCha8Rng| (lo + rng.gen_range(0.0..1.0) * (hi - lo)).exp();
    let nt = NormTuple::new(draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng))
        .expect("positive draws");
    let fb = Fiber::new(nt, ex);
    let frac = rng.gen_range(1e-3..opts.lambda_frac_max);
    let lambda = frac * fb.lambda_star_of_u(QuotientFamily::E);
    let label = format!(
        "case {idx}: q={q:.6} alpha={alpha:.6} gamma={gamma:.6} nt=({:.6e},{:.6e},{:.6e},{:.6e}) lambda={lambda:.6e}",
        nt.a, nt.b, nt.c, nt.d
    );
    Case { fb, lambda, label }
}

pub(crate) fn ratio_identity_violation(
    cap_e: f64,
    cap_n: f64,
    expected_ratio: f64,
) -> Option<String> {
    let rel = (cap_n / (cap_e * expected_ratio) - 1.0).abs();
    if !(cap_e < cap_n) {
        return Some(format!("cap_e {cap_e:e} not below cap_n {cap_n:e}"));
    }
    if rel > 1e-12 {
        return Some(format!("ratio off by rel {rel:e}"));
    }
    None
}

fn check_case(case: &Case, out: &mut Vec<VerifyFailure>) {
    let fb = &case.fb;
    let ex = fb.exponents();
    let lambda = case.lambda;
    let mut fail = |relation: &str, observed: String| {
        out.push(VerifyFailure {
            case: case.label.clone(),
            relation: relation.to_string(),
            observed,
        });
    };

    // Cap ordering and the closed-form ratio between the two cap families.
    let cap_e = fb.lambda_star_of_u(QuotientFamily::E);
    let cap_n = fb.lambda_star_of_u(QuotientFamily::N);
    if let Some(msg) = ratio_identity_violation(cap_e, cap_n, fb.constants().cap_ratio) {
        fail("cap_n = cap_ratio * cap_e and cap_e < cap_n", msg);
    }

    // Five-point ordering of the critical scales.
    let pe = fb.critical_pair(QuotientFamily::E, lambda).ok().and_then(|o| o.pair());
    let pn = fb.critical_pair(QuotientFamily::N, lambda).ok().and_then(|o| o.pair());
    let (pe, pn) = match (pe, pn) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            fail("critical pairs exist below the cap", format!("lambda {lambda:e}"));
            return;
        }
    };
    let te_star = fb.t_star(QuotientFamily::E);
    let chain = [pn.t_plus, pe.t_plus, te_star, pn.t_minus, pe.t_minus];
    if !chain.windows(2).all(|w| w[0] < w[1]) {
        fail("t_n_plus < t_e_plus < t_e < t_n_minus < t_e_minus", format!("{chain:?}"));
    }

    // The two quotients agree at the E-critical scales.
    for t in [pe.t_plus, pe.t_minus] {
        let re = fb.rayleigh_e(t, lambda).unwrap_or(f64::NAN);
        let rn = fb.rayleigh_n(t, lambda).unwrap_or(f64::NAN);
        let scale = 1.0 + re.abs() + rn.abs();
        if !((re - rn).abs() <= 1e-10 * scale) {
            fail("R_e = R_n at t_e_pm", format!("t={t:e} re={re:e} rn={rn:e}"));
        }
    }

    // Band ordering of the four extremal quotient values.
    match fb.mu_quotients(lambda) {
        Ok(mq) => match (mq.n_plus, mq.e_plus, mq.e_minus, mq.n_minus) {
            (Some(np), Some(ep), Some(em), Some(nm)) => {
                let scale = 1.0 + np.abs() + nm.abs();
                if !(np <= ep + 1e-12 * scale && ep < em && em < nm) {
                    fail(
                        "mu_n_plus <= mu_e_plus < mu_e_minus < mu_n_minus",
                        format!("({np:e}, {ep:e}, {em:e}, {nm:e})"),
                    );
                }
            }
            other => fail("all four mu quotients defined", format!("{other:?}")),
        },
        Err(e) => fail("mu quotients computable", e.to_string()),
    }

    // Small-t limit of the cap-map ratio.
    let ts = 1e-6 * te_star;
    let le = fb.lambda_fiber_e(ts).unwrap_or(f64::NAN);
    let ln = fb.lambda_fiber_n(ts).unwrap_or(f64::NAN);
    let ratio = le / ln;
    if !((ratio / (ex.q() / 2.0) - 1.0).abs() <= 1e-3) {
        fail("lambda_e/lambda_n -> q/2 at small t", format!("ratio {ratio:e} at t {ts:e}"));
    }

    // Fiber identity linking the stationarity quotient's slope to the energy
    // curvature, plus the two sign dictionaries, at three interior scales.
    let t_lo = 0.3 * pn.t_plus;
    let t_hi = 3.0 * pn.t_minus;
    for k in 0..3 {
        let t = t_lo * (t_hi / t_lo).powf((k as f64 + 0.5) / 3.0);
        let rn = fb.rayleigh_n(t, lambda).unwrap_or(f64::NAN);
        let rn_d1 = fb.rayleigh_n_d1(t, lambda).unwrap_or(f64::NAN);
        let lhs = fb.tuple().c * t.powf(ex.alpha() - 1.0) * rn_d1;
        let rhs = fb.phi_d2(t, lambda, rn).unwrap_or(f64::NAN);
        let scale = lhs.abs() + rhs.abs() + 1e-300;
        if !((lhs - rhs).abs() <= 1e-8 * scale) {
            fail("c t^(alpha-1) Rn' = phi'' at mu = Rn", format!("t={t:e} lhs={lhs:e} rhs={rhs:e}"));
        }
        if lhs.abs() > 1e-10 * scale && rhs.abs() > 1e-10 * scale && (lhs > 0.0) != (rhs > 0.0) {
            fail("sign(Rn') = sign(phi'') at mu = Rn", format!("t={t:e} lhs={lhs:e} rhs={rhs:e}"));
        }
        let re = fb.rayleigh_e(t, lambda).unwrap_or(f64::NAN);
        let re_d1 = fb.rayleigh_e_d1(t, lambda).unwrap_or(f64::NAN);
        let pd1 = fb.phi_d1(t, lambda, re).unwrap_or(f64::NAN);
        let scale_e = re_d1.abs() * t + pd1.abs() + 1e-300;
        if re_d1.abs() * t > 1e-10 * scale_e
            && pd1.abs() > 1e-10 * scale_e
            && (re_d1 > 0.0) != (pd1 > 0.0)
        {
            fail("sign(Re') = sign(phi') at mu = Re", format!("t={t:e} re'={re_d1:e} phi'={pd1:e}"));
        }
    }

    // Inflection behavior of the stationarity quotient.
    if ex.strict_convexity_regime() {
        match fb.inflection_root(lambda) {
            Ok(r) => {
                if !(pn.t_plus < r && r < pn.t_minus) {
                    fail("inflection inside (t_n_plus, t_n_minus)", format!("r={r:e}"));
                }
                let mut changes = 0;
                let mut prev = f64::NAN;
                for k in 0..=400 {
                    let t = pn.t_plus * (pn.t_minus / pn.t_plus).powf(k as f64 / 400.0);
                    let v = fb.rayleigh_n_d2(t, lambda).unwrap_or(f64::NAN);
                    if prev.is_finite() && v.is_finite() && (prev < 0.0) != (v < 0.0) {
                        changes += 1;
                    }
                    prev = v;
                }
                if changes != 1 {
                    fail("unique curvature change between the band scales", format!("{changes}"));
                }
            }
            Err(e) => fail("inflection root exists in strict regime", e.to_string()),
        }
    } else if !matches!(fb.inflection_root(lambda), Err(Error::UnsupportedRegime(_))) {
        fail("inflection root refused outside strict regime", "no error".to_string());
    }
}

/// Run the randomized identity suite. Cases are independent and derive their
/// own seeds, so the report is identical for identical opts.
pub fn verify_lemma_suite(opts: &VerifyOpts) -> VerifyReport {
    let failures: Vec<VerifyFailure> = (0..opts.n_cases)
        .into_par_iter()
        .map(|idx| {
            let case = sample_case(idx, opts);
            let mut out = Vec::new();
            check_case(&case, &mut out);
            out
        })
        .flatten()
        .collect();
    VerifyReport { case_count: opts.n_cases, failures, seed: opts.seed }
}

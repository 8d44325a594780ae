//! The two positive solution branches and the sign classification of
//! candidate fields.
//!
//! Both branches minimize a reduced functional `u ↦ Φ(s(u)·u)` on the unit
//! sphere, where `s(u)` is a root of the fiber stationarity equation: the
//! middle root for branch 1, the tail root for branch 2. The root map is
//! differentiable wherever the roots are simple, and the envelope identity
//! `⟨Φ'(s u), u⟩ = 0` makes the reduced gradient `s · energy_gradient(s u)`;
//! iterates whose fiber loses the needed root are rejected by the line search.

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::extremal::{sphere_descent, DescentOpts};
use crate::fiber::{Fiber, NehariRoots};
use crate::grid::{DiscreteField, GridSpec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sign of a scalar against a scale-aware tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
}

impl Sign {
    pub fn of(x: f64, tol: f64) -> Sign {
        if x > tol {
            Sign::Plus
        } else if x < -tol {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Zero => "0",
        }
    }
}

/// Pointwise diagnostic of a candidate field at fixed (λ, μ), all quantities
/// evaluated at the field as given (fiber position t = 1).
#[derive(Clone, Debug)]
pub struct Classification {
    /// Φ at the field.
    pub phi_value: f64,
    /// Fiber derivative ⟨Φ'(u), u⟩ at t = 1.
    pub phi_d1_value: f64,
    pub phi_d2_sign: Sign,
    /// Sign of the stationarity quotient's fiber second derivative; absent if
    /// the evaluation failed.
    pub rn_d2_sign: Option<Sign>,
    /// Strong-form equation defect in the max norm.
    pub residual: f64,
    /// All interior nodal values strictly positive.
    pub positive: bool,
    /// |⟨Φ'(u), u⟩|: distance from the Nehari set in the fiber direction.
    pub nehari_gap: f64,
    /// Stationarity roots of the field's own fiber at this (λ, μ).
    pub s_roots: NehariRoots,
    /// 1 for the local-minimum geometry (Φ'' > 0), 2 for Φ'' < 0.
    pub inferred_branch: Option<u8>,
}

/// Outcome of a branch solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: DiscreteField,
    pub branch: u8,
    pub classification: Classification,
    pub iterations: usize,
    pub converged: bool,
    /// Max-norm of the reduced-functional gradient at the last iterate.
    pub gradient_norm: f64,
}

/// One sampled Nehari point: its gradient-norm radius, the norms entering the
/// coercivity display, and its energy.
#[derive(Clone, Copy, Debug)]
pub struct NehariSample {
    pub radius: f64,
    pub a: f64,
    pub q_mass: f64,
    pub alpha_mass: f64,
    pub phi: f64,
}

/// Minimum sampled energies per radius bucket, plus the raw samples.
#[derive(Clone, Debug)]
pub struct CoercivityReport {
    pub radii: Vec<f64>,
    /// Minimum Φ over the samples nearest (log scale) to each radius;
    /// infinite when no sample landed in the bucket.
    pub min_phi: Vec<f64>,
    pub samples: Vec<NehariSample>,
    pub seed: u64,
}

fn band_message(fb: &Fiber, lambda: f64, mu: f64) -> String {
    match fb.mu_quotients(lambda) {
        Ok(mq) => format!(
            "mu {mu:e} is outside the per-ray root band (n_plus {:?}, n_minus {:?})",
            mq.n_plus, mq.n_minus
        ),
        Err(e) => format!("fiber band undefined at lambda {lambda:e}: {e}"),
    }
}

fn check_parameters(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Invalid(format!("lambda must be > 0, got {lambda}")));
    }
    if !mu.is_finite() {
        return Err(Error::Invalid(format!("mu must be finite, got {mu}")));
    }
    Ok(())
}

/// A few Newton corrections in the fiber direction so that t = 1 sits on the
/// Nehari set of the returned field to machine accuracy.
fn settle_on_nehari(
    mut w: DiscreteField,
    lambda: f64,
    mu: f64,
    ex: &Exponents,
) -> Result<DiscreteField> {
    for _ in 0..8 {
        let nt = w.norm_tuple(ex)?;
        let fb = Fiber::new(nt, *ex);
        let f = fb.phi_d1(1.0, lambda, mu)?;
        let df = fb.phi_d2(1.0, lambda, mu)?;
        if df == 0.0 {
            break;
        }
        let t = 1.0 - f / df;
        // The scaled field is already near its root; a correction outside
        // (1/2, 2) means the Newton model is not trustworthy here.
        if !(t.is_finite() && t > 0.5 && t < 2.0) {
            break;
        }
        if (t - 1.0).abs() < 1e-16 {
            break;
        }
        w = w.scaled(t);
    }
    Ok(w)
}

fn run_branch(
    branch: u8,
    lambda: f64,
    mu: f64,
    grid: GridSpec,
    ex: &Exponents,
    opts: &DescentOpts,
) -> Result<SolveReport> {
    check_parameters(lambda, mu)?;
    let pick_root = move |roots: &NehariRoots| -> Option<f64> {
        if branch == 1 {
            roots.s1()
        } else {
            roots.tail_root()
        }
    };
    let objective = |u: &DiscreteField| -> Result<f64> {
        let nt = u.norm_tuple(ex)?;
        let fb = Fiber::new(nt, *ex);
        let roots = fb.nehari_roots(lambda, mu)?;
        let s = pick_root(&roots)
            .ok_or_else(|| Error::Precondition(band_message(&fb, lambda, mu)))?;
        fb.phi_fiber(s, lambda, mu)
    };
    let gradient = |u: &DiscreteField| -> Result<Vec<f64>> {
        let nt = u.norm_tuple(ex)?;
        let fb = Fiber::new(nt, *ex);
        let roots = fb.nehari_roots(lambda, mu)?;
        let s = pick_root(&roots)
            .ok_or_else(|| Error::Precondition(band_message(&fb, lambda, mu)))?;
        let w = u.scaled(s);
        let mut g = w.energy_gradient(lambda, mu, ex);
        g.iter_mut().for_each(|x| *x *= s);
        Ok(g)
    };
    let init = match &opts.init {
        Some(f) => {
            if f.grid() != grid {
                return Err(Error::Invalid("initial field lives on a different grid".into()));
            }
            f.clone()
        }
        None => DiscreteField::first_mode(grid),
    };
    let out = sphere_descent(&init, &objective, &gradient, opts)?;

    let nt = out.field.norm_tuple(ex)?;
    let fb = Fiber::new(nt, *ex);
    let roots = fb.nehari_roots(lambda, mu)?;
    let s = pick_root(&roots)
        .ok_or_else(|| Error::Precondition(band_message(&fb, lambda, mu)))?;
    let solution = settle_on_nehari(out.field.scaled(s), lambda, mu, ex)?;
    let classification = classify_solution(&solution, lambda, mu, ex)?;
    Ok(SolveReport {
        solution,
        branch,
        classification,
        iterations: out.iterations,
        converged: out.converged,
        gradient_norm: out.gradient_norm,
    })
}

/// Branch 1: minimize Φ over the middle stationarity roots (the local
/// fiber minima of Φ with three-root geometry). Needs μ strictly inside the
/// per-ray band of every iterate; the output has Φ'' > 0 along its fiber.
pub fn solve_branch1(
    lambda: f64,
    mu: f64,
    grid: GridSpec,
    ex: &Exponents,
    opts: &DescentOpts,
) -> Result<SolveReport> {
    run_branch(1, lambda, mu, grid, ex, opts)
}

/// Branch 2: minimize Φ over the tail stationarity roots. Requires the strict
/// convexity regime γ > 1 + α and μ below the per-ray upper band edge of
/// every iterate (any μ down to −∞ works); the output has Φ'' < 0.
pub fn solve_branch2(
    lambda: f64,
    mu: f64,
    grid: GridSpec,
    ex: &Exponents,
    opts: &DescentOpts,
) -> Result<SolveReport> {
    if !ex.strict_convexity_regime() {
        return Err(Error::UnsupportedRegime(format!(
            "branch 2 needs gamma > 1 + alpha, got gamma = {} and 1 + alpha = {}",
            ex.gamma(),
            1.0 + ex.alpha()
        )));
    }
    run_branch(2, lambda, mu, grid, ex, opts)
}

/// Evaluate every report field for an arbitrary nonzero candidate, with no
/// optimization involved.
pub fn classify_solution(
    u: &DiscreteField,
    lambda: f64,
    mu: f64,
    ex: &Exponents,
) -> Result<Classification> {
    check_parameters(lambda, mu)?;
    let nt = u.norm_tuple(ex)?;
    let fb = Fiber::new(nt, *ex);
    let phi_value = fb.phi_fiber(1.0, lambda, mu)?;
    let phi_d1_value = fb.phi_d1(1.0, lambda, mu)?;
    let phi_d2 = fb.phi_d2(1.0, lambda, mu)?;
    let scale = nt.a + lambda.abs() * nt.b + mu.abs() * nt.c + nt.d;
    let phi_d2_sign = Sign::of(phi_d2, 1e-9 * scale);
    let rn_d2_sign = fb
        .rayleigh_n_d2(1.0, lambda)
        .ok()
        .map(|v| Sign::of(v, 1e-9 * (nt.a + lambda.abs() * nt.b + nt.d) / nt.c));
    let s_roots = fb.nehari_roots(lambda, mu)?;
    let inferred_branch = match phi_d2_sign {
        Sign::Plus => Some(1),
        Sign::Minus => Some(2),
        Sign::Zero => None,
    };
    Ok(Classification {
        phi_value,
        phi_d1_value,
        phi_d2_sign,
        rn_d2_sign,
        residual: u.pde_residual(lambda, mu, ex),
        positive: u.values().iter().all(|&v| v > 0.0),
        nehari_gap: phi_d1_value.abs(),
        s_roots,
        inferred_branch,
    })
}

/// Sample Nehari points from random sine-mode mixtures and record the minimum
/// energy near each requested gradient-norm radius (nearest bucket in log
/// scale). Deterministic for a fixed seed.
pub fn coercivity_probe(
    lambda: f64,
    mu: f64,
    grid: GridSpec,
    ex: &Exponents,
    radii: &[f64],
    n_dirs: usize,
    seed: u64,
) -> Result<CoercivityReport> {
    check_parameters(lambda, mu)?;
    if radii.is_empty() || n_dirs == 0 {
        return Err(Error::Invalid("need at least one radius and one direction".into()));
    }
    for w in radii.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Invalid("radii must be strictly ascending".into()));
        }
    }
    if !(radii[0] > 0.0) {
        return Err(Error::Invalid("radii must be positive".into()));
    }
    // Decaying spectrum: without the 1/k² weights typical draws are dominated
    // by high modes and their Nehari points all land at large norms, starving
    // the small-radius buckets.
    let modes: Vec<DiscreteField> = match grid {
        GridSpec::Interval { .. } => (1..=6)
            .map(|k| DiscreteField::sine_mode_1d(grid, k).unwrap().scaled(1.0 / (k * k) as f64))
            .collect(),
        GridSpec::Rectangle { .. } => {
            let mut m = Vec::new();
            for kx in 1..=3u32 {
                for ky in 1..=3u32 {
                    let w = 1.0 / (kx * kx + ky * ky) as f64;
                    m.push(DiscreteField::sine_mode_2d(grid, kx, ky).unwrap().scaled(w));
                }
            }
            m
        }
    };
    let log_radii: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut min_phi = vec![f64::INFINITY; radii.len()];
    for _ in 0..n_dirs {
        let coeffs: Vec<f64> = (0..modes.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut vals = vec![0.0; grid.node_count()];
        for (c, m) in coeffs.iter().zip(&modes) {
            for (v, mv) in vals.iter_mut().zip(m.values()) {
                *v += c * mv;
            }
        }
        let dir = match DiscreteField::new(grid, vals)
            .and_then(|f| f.abs().normalized())
        {
            Ok(f) => f,
            Err(_) => continue, // zero draw, measure zero
        };
        let nt = dir.norm_tuple(ex)?;
        let fb = Fiber::new(nt, *ex);
        let roots = match fb.nehari_roots(lambda, mu) {
            Ok(r) => r,
            Err(_) => continue,
        };
        for (s, _mult) in roots.all() {
            let phi = fb.phi_fiber(s, lambda, mu)?;
            let sample = NehariSample {
                radius: s,
                a: s * s * nt.a,
                q_mass: s.powf(ex.q()) * nt.b,
                alpha_mass: s.powf(ex.alpha()) * nt.c,
                phi,
            };
            samples.push(sample);
            let ls = s.ln();
            let bucket = log_radii
                .iter()
                .enumerate()
                .min_by(|(_, x), (_, y)| {
                    (ls - **x).abs().partial_cmp(&(ls - **y).abs()).unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            if phi < min_phi[bucket] {
                min_phi[bucket] = phi;
            }
        }
    }
    Ok(CoercivityReport { radii: radii.to_vec(), min_phi, samples, seed })
}

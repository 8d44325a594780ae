//! Minimization of the 0-homogeneous extremal quotients over the grid.
//!
//! All six objectives (the two λ caps and the four μ quotients) are invariant
//! under `u ↦ ku`, so the search runs on the unit sphere of the gradient norm:
//! preconditioned steepest descent where the descent direction is the strong
//! gradient pushed through the inverse stencil Laplacian, with backtracking on
//! simple decrease. Iterates are replaced by their absolute values each step;
//! this never increases any of the objectives and targets the nonnegative
//! minimizers that exist for the "−" kinds. For the "+" kinds the infimum is
//! not known to be attained, so those results carry `upper_bound = true`.

pub use crate::fiber::MuKind;

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::fiber::{CriticalOutcome, Fiber, QuotientFamily};
use crate::grid::{max_abs, solve_poisson, DiscreteField, GridSpec, QuotientGradientKind};
use rayon::prelude::*;

/// Knobs for the sphere descent. `init` overrides the default first-mode
/// starting field (it is rescaled and made nonnegative before use).
#[derive(Clone, Debug)]
pub struct DescentOpts {
    pub initial_step: f64,
    pub max_iter: usize,
    pub tol_opt: f64,
    pub max_backtracks: u32,
    pub init: Option<DiscreteField>,
}

impl Default for DescentOpts {
    fn default() -> Self {
        Self { initial_step: 1.0, max_iter: 10_000, tol_opt: 1e-8, max_backtracks: 45, init: None }
    }
}

/// Result of one extremal minimization.
#[derive(Clone, Debug)]
pub struct ExtremalResult {
    pub value: f64,
    pub minimizer: DiscreteField,
    pub iterations: usize,
    pub converged: bool,
    /// Max-norm of the nodal quotient gradient at the minimizer.
    pub gradient_norm: f64,
    /// True for the "+" kinds: attainment of their infima is not established,
    /// so the value is only an upper bound for the extremal value.
    pub upper_bound: bool,
}

/// μ-extremal values tabulated over an ascending λ grid. Entries are absent
/// where λ reaches the per-ray cap of the warm-started search ray, i.e. at or
/// beyond the relevant λ*.
#[derive(Clone, Debug, Default)]
pub struct ExtremalCurve {
    pub lambda_values: Vec<f64>,
    pub mu_n_plus: Vec<Option<f64>>,
    pub mu_e_plus: Vec<Option<f64>>,
    pub mu_e_minus: Vec<Option<f64>>,
    pub mu_n_minus: Vec<Option<f64>>,
    /// Per row, convergence of `[n_plus, e_plus, e_minus, n_minus]`.
    pub converged: Vec<[Option<bool>; 4]>,
}

impl ExtremalCurve {
    pub fn len(&self) -> usize {
        self.lambda_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_values.is_empty()
    }

    /// Row entries in header order `[n_plus, e_plus, e_minus, n_minus]`.
    pub fn row(&self, i: usize) -> [Option<f64>; 4] {
        [self.mu_n_plus[i], self.mu_e_plus[i], self.mu_e_minus[i], self.mu_n_minus[i]]
    }

    /// `n_plus <= e_plus < e_minus < n_minus` where all four are present.
    pub fn complete_rows_ordered(&self) -> bool {
        (0..self.len()).all(|i| {
            match self.row(i) {
                [Some(np), Some(ep), Some(em), Some(nm)] => np <= ep && ep < em && em < nm,
                _ => true,
            }
        })
    }
}

pub(crate) struct DescentOutcome {
    pub field: DiscreteField,
    pub value: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub converged: bool,
}

/// Shared engine: minimize a 0-homogeneous objective over the unit sphere of
/// the gradient norm. Objective or gradient errors at the starting field
/// propagate; errors at trial points reject the step (the step is halved).
pub(crate) fn sphere_descent(
    init: &DiscreteField,
    objective: &dyn Fn(&DiscreteField) -> Result<f64>,
    gradient: &dyn Fn(&DiscreteField) -> Result<Vec<f64>>,
    opts: &DescentOpts,
) -> Result<DescentOutcome> {
    let grid = init.grid();
    let meas = grid.cell_measure();
    let mut u = init.abs().normalized()?;
    let mut value = objective(&u)?;
    // Two candidate directions with separate step memories: the inverse
    // stencil Laplacian applied to the strong gradient clears the smooth error
    // fast, the raw strong gradient clears the high frequency tail the
    // preconditioner scales down to sub-ulp objective changes.
    let mut steps = [opts.initial_step; 2];
    let mut preferred = 0usize;
    let mut gradient_norm = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let g = gradient(&u)?;
        gradient_norm = max_abs(&g);
        if gradient_norm <= opts.tol_opt {
            converged = true;
            break;
        }
        iterations += 1;
        let strong: Vec<f64> = g.iter().map(|x| x / meas).collect();
        let smooth = solve_poisson(grid, &strong)?;
        let dirs: [&Vec<f64>; 2] = [&smooth, &strong];
        let mut accepted = false;
        'directions: for k in [preferred, 1 - preferred] {
            let dir = dirs[k];
            let mut s = steps[k];
            for _ in 0..opts.max_backtracks {
                let vals: Vec<f64> =
                    u.values().iter().zip(dir).map(|(ui, di)| ui - s * di).collect();
                let cand = DiscreteField::new(grid, vals)
                    .and_then(|c| c.abs().normalized())
                    .and_then(|c| objective(&c).map(|v| (c, v)));
                // Accept on a decrement above the evaluation noise of the
                // value, or within the noise band when the gradient norm
                // shrinks. Near the minimum every visible decrement is
                // rounding noise; a plain ratchet then freezes the stiff
                // error modes (their energy excess is below one ulp) or walks
                // on noise without reducing the residual. The gradient-norm
                // condition makes those moves monotone, so there is no
                // cycling, and the noise band bounds the total value drift.
                let noise = f64::EPSILON * (1.0 + value.abs()) * (4.0 + (u.len() as f64).sqrt());
                let take = match &cand {
                    Ok((_, v)) if *v <= value - noise => true,
                    Ok((c, v)) if *v <= value + noise => {
                        gradient(c).map(|gc| max_abs(&gc) <= 0.999 * gradient_norm).unwrap_or(false)
                    }
                    _ => false,
                };
                if take {
                    let (c, v) = cand.expect("checked above");
                    u = c;
                    value = v;
                    steps[k] = (s * 2.0).min(1e12);
                    preferred = k;
                    accepted = true;
                    break 'directions;
                }
                s *= 0.5;
            }
        }
        if !accepted {
            // Both line searches exhausted: every visible decrement is gone.
            break;
        }
    }
    Ok(DescentOutcome { field: u, value, iterations, gradient_norm, converged })
}

fn starting_field(grid: GridSpec, opts: &DescentOpts) -> Result<DiscreteField> {
    match &opts.init {
        Some(f) => {
            if f.grid() != grid {
                return Err(Error::Invalid("initial field lives on a different grid".into()));
            }
            Ok(f.clone())
        }
        None => Ok(DiscreteField::first_mode(grid)),
    }
}

/// Minimize `u ↦ λ*(u)` for the chosen family; the infimum over all rays is
/// the extremal value λ^{e,*} or λ^{n,*}.
pub fn minimize_lambda_star(
    family: QuotientFamily,
    grid: GridSpec,
    ex: &Exponents,
    opts: &DescentOpts,
) -> Result<ExtremalResult> {
    let init = starting_field(grid, opts)?;
    let objective = |u: &DiscreteField| -> Result<f64> {
        let nt = u.norm_tuple(ex)?;
        Ok(Fiber::new(nt, *ex).lambda_star_of_u(family))
    };
    let gradient = |u: &DiscreteField| -> Result<Vec<f64>> {
        u.quotient_gradient(QuotientGradientKind::LambdaStar(family), 0.0, ex)
    };
    let out = sphere_descent(&init, &objective, &gradient, opts)?;
    Ok(ExtremalResult {
        value: out.value,
        minimizer: out.field,
        iterations: out.iterations,
        converged: out.converged,
        gradient_norm: out.gradient_norm,
        upper_bound: false,
    })
}

/// Per-ray value of the selected μ quotient at level λ; errors when λ is at or
/// above the ray's cap (the critical pair degenerates or disappears).
pub(crate) fn mu_value(fb: &Fiber, kind: MuKind, lambda: f64) -> Result<f64> {
    let fam = kind.family();
    let pair = match fb.critical_pair(fam, lambda)? {
        CriticalOutcome::Pair(p) if !p.degenerate => p,
        _ => {
            return Err(Error::Precondition(format!(
                "lambda {lambda:e} is not strictly below the per-ray cap {:e}",
                fb.lambda_star_of_u(fam)
            )))
        }
    };
    let t = if kind.is_minus() { pair.t_minus } else { pair.t_plus };
    match fam {
        QuotientFamily::E => fb.rayleigh_e(t, lambda),
        QuotientFamily::N => fb.rayleigh_n(t, lambda),
    }
}

/// Minimize `u ↦ μ_kind(u, λ)` over the sphere. Requires `0 < λ` strictly
/// below the starting ray's cap for the kind's family.
pub fn minimize_mu(
    kind: MuKind,
    lambda: f64,
    grid: GridSpec,
    ex: &Exponents,
    opts: &DescentOpts,
) -> Result<ExtremalResult> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Invalid(format!("lambda must be > 0, got {lambda}")));
    }
    let init = starting_field(grid, opts)?;
    let objective = |u: &DiscreteField| -> Result<f64> {
        let nt = u.norm_tuple(ex)?;
        mu_value(&Fiber::new(nt, *ex), kind, lambda)
    };
    let gradient = |u: &DiscreteField| -> Result<Vec<f64>> {
        u.quotient_gradient(QuotientGradientKind::Mu(kind), lambda, ex)
    };
    let out = sphere_descent(&init, &objective, &gradient, opts)?;
    Ok(ExtremalResult {
        value: out.value,
        minimizer: out.field,
        iterations: out.iterations,
        converged: out.converged,
        gradient_norm: out.gradient_norm,
        upper_bound: !kind.is_minus(),
    })
}

/// Tabulate the four μ-extremal values over an ascending positive λ grid.
/// Each kind runs as an independent chain warm-started from the previous λ's
/// minimizer; a λ at or beyond the chain's per-ray cap yields absent entries.
pub fn extremal_curve(
    lambda_grid: &[f64],
    grid: GridSpec,
    ex: &Exponents,
    opts: &DescentOpts,
) -> Result<ExtremalCurve> {
    if lambda_grid.is_empty() {
        return Err(Error::Invalid("empty lambda grid".into()));
    }
    for w in lambda_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::Invalid("lambda grid must be strictly ascending".into()));
        }
    }
    if !(lambda_grid[0] > 0.0) {
        return Err(Error::Invalid("lambda grid must be positive".into()));
    }

    let column = |kind: MuKind| -> Result<Vec<(Option<f64>, Option<bool>)>> {
        let mut warm: Option<DiscreteField> = None;
        let mut rows = Vec::with_capacity(lambda_grid.len());
        for &lam in lambda_grid {
            let mut o = opts.clone();
            o.init = warm.clone().or_else(|| opts.init.clone());
            match minimize_mu(kind, lam, grid, ex, &o) {
                Ok(res) => {
                    warm = Some(res.minimizer.clone());
                    rows.push((Some(res.value), Some(res.converged)));
                }
                Err(Error::Precondition(_)) => rows.push((None, None)),
                Err(e) => return Err(e),
            }
        }
        Ok(rows)
    };

    let cols: Vec<Vec<(Option<f64>, Option<bool>)>> =
        MuKind::ALL.into_par_iter().map(column).collect::<Result<Vec<_>>>()?;

    let pick = |j: usize| -> Vec<Option<f64>> { cols[j].iter().map(|r| r.0).collect() };
    let converged = (0..lambda_grid.len())
        .map(|i| [cols[0][i].1, cols[1][i].1, cols[2][i].1, cols[3][i].1])
        .collect();
    Ok(ExtremalCurve {
        lambda_values: lambda_grid.to_vec(),
        mu_n_plus: pick(0),
        mu_e_plus: pick(1),
        mu_e_minus: pick(2),
        mu_n_minus: pick(3),
        converged,
    })
}

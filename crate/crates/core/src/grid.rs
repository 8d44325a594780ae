//! Uniform Dirichlet grids on an interval or rectangle and the discrete
//! fields, energies, and gradients living on them.
//!
//! Nodes are interior only; the zero boundary is implicit in every stencil and
//! edge sum. 2D nodes are ordered lexicographically, `m = ix + iy * nx` with x
//! fastest. The discrete energies use the rectangle rule with cell measure
//! `h` (1D) or `hx*hy` (2D); `gradient_energy` sums squared forward
//! differences over all edges including the boundary-adjacent ones, which
//! makes it exactly the quadratic form of the stencil Laplacian.

use crate::error::{Error, Result};
use crate::exponents::Exponents;
use crate::fiber::{Fiber, MuKind, NormTuple, QuotientFamily};

/// Uniform grid over `(0, length)` or `(0, lx) × (0, ly)` with `n` interior
/// nodes per axis and spacing `length / (n + 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridSpec {
    Interval { length: f64, n: usize },
    Rectangle { lengths: [f64; 2], n: [usize; 2] },
}

impl GridSpec {
    pub fn interval(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Invalid(format!("grid length must be > 0, got {length}")));
        }
        if n < 3 {
            return Err(Error::Invalid(format!("need at least 3 interior nodes, got {n}")));
        }
        Ok(GridSpec::Interval { length, n })
    }

    pub fn rectangle(lengths: [f64; 2], n: [usize; 2]) -> Result<Self> {
        for len in lengths {
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::Invalid(format!("grid length must be > 0, got {len}")));
            }
        }
        for nn in n {
            if nn < 3 {
                return Err(Error::Invalid(format!("need at least 3 interior nodes, got {nn}")));
            }
        }
        Ok(GridSpec::Rectangle { lengths, n })
    }

    pub fn dim(&self) -> u32 {
        match self {
            GridSpec::Interval { .. } => 1,
            GridSpec::Rectangle { .. } => 2,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            GridSpec::Interval { n, .. } => *n,
            GridSpec::Rectangle { n, .. } => n[0] * n[1],
        }
    }

    /// Spacing along `axis` (0 or 1).
    pub fn spacing(&self, axis: usize) -> f64 {
        match self {
            GridSpec::Interval { length, n } => {
                debug_assert_eq!(axis, 0);
                length / (*n as f64 + 1.0)
            }
            GridSpec::Rectangle { lengths, n } => lengths[axis] / (n[axis] as f64 + 1.0),
        }
    }

    pub fn cell_measure(&self) -> f64 {
        match self.dim() {
            1 => self.spacing(0),
            _ => self.spacing(0) * self.spacing(1),
        }
    }
}

/// Nodal values over a [`GridSpec`], boundary zeros implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteField {
    grid: GridSpec,
    values: Vec<f64>,
}

/// Selector for the six quotient gradients: the two λ caps and the four
/// extremal μ quotients, each as a 0-homogeneous functional of the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientGradientKind {
    LambdaStar(QuotientFamily),
    Mu(MuKind),
}

#[inline]
fn pw(v: f64, p: f64) -> f64 {
    // |v|^{p-2} v, continued by 0 at v = 0 (p > 1 throughout this crate).
    if v == 0.0 {
        0.0
    } else {
        v.signum() * v.abs().powf(p - 1.0)
    }
}

impl DiscreteField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::Invalid(format!(
                "field has {} values but the grid has {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("field contains non-finite value {bad}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.node_count()] }
    }

    pub fn from_fn_1d(grid: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        match grid {
            GridSpec::Interval { n, .. } => {
                let h = grid.spacing(0);
                let values = (1..=n).map(|i| f(i as f64 * h)).collect();
                Self::new(grid, values)
            }
            _ => Err(Error::Invalid("from_fn_1d needs a 1D grid".into())),
        }
    }

    pub fn from_fn_2d(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        match grid {
            GridSpec::Rectangle { n, .. } => {
                let (hx, hy) = (grid.spacing(0), grid.spacing(1));
                let mut values = Vec::with_capacity(n[0] * n[1]);
                for iy in 1..=n[1] {
                    for ix in 1..=n[0] {
                        values.push(f(ix as f64 * hx, iy as f64 * hy));
                    }
                }
                Self::new(grid, values)
            }
            _ => Err(Error::Invalid("from_fn_2d needs a 2D grid".into())),
        }
    }

    /// Product of first sine modes: positive, vanishing at the boundary.
    pub fn first_mode(grid: GridSpec) -> Self {
        match grid {
            GridSpec::Interval { length, .. } => {
                Self::from_fn_1d(grid, |x| (std::f64::consts::PI * x / length).sin()).unwrap()
            }
            GridSpec::Rectangle { lengths, .. } => Self::from_fn_2d(grid, |x, y| {
                (std::f64::consts::PI * x / lengths[0]).sin()
                    * (std::f64::consts::PI * y / lengths[1]).sin()
            })
            .unwrap(),
        }
    }

    /// Pure sine mode `sin(kπx/L)` (1D grids).
    pub fn sine_mode_1d(grid: GridSpec, k: u32) -> Result<Self> {
        match grid {
            GridSpec::Interval { length, .. } => {
                Self::from_fn_1d(grid, |x| (k as f64 * std::f64::consts::PI * x / length).sin())
            }
            _ => Err(Error::Invalid("sine_mode_1d needs a 1D grid".into())),
        }
    }

    /// Product mode `sin(kx πx/Lx) sin(ky πy/Ly)` (2D grids).
    pub fn sine_mode_2d(grid: GridSpec, kx: u32, ky: u32) -> Result<Self> {
        match grid {
            GridSpec::Rectangle { lengths, .. } => Self::from_fn_2d(grid, |x, y| {
                (kx as f64 * std::f64::consts::PI * x / lengths[0]).sin()
                    * (ky as f64 * std::f64::consts::PI * y / lengths[1]).sin()
            }),
            _ => Err(Error::Invalid("sine_mode_2d needs a 2D grid".into())),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| k * v).collect() }
    }

    pub fn abs(&self) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v.abs()).collect() }
    }

    /// Relative L² distance `‖u - v‖₂ / max(‖u‖₂, ‖v‖₂)`.
    pub fn rel_l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let (mut dd, mut nu, mut nv) = (0.0, 0.0, 0.0);
        for (x, y) in self.values.iter().zip(&other.values) {
            dd += (x - y) * (x - y);
            nu += x * x;
            nv += y * y;
        }
        Ok((dd / nu.max(nv).max(f64::MIN_POSITIVE)).sqrt())
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::Invalid("fields live on different grids".into()))
        }
    }

    /// Stencil application of `-Δ_h` (strong form, no cell measure).
    pub fn neg_laplacian(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.values.len()];
        apply_neg_laplacian(self.grid, &self.values, &mut out);
        out
    }

    /// Edge-sum bilinear form `Σ_edges (Δu)(Δv)/h² · measure`; exactly
    /// symmetric in its two arguments and equal to `⟨-Δ_h u, v⟩ · measure`.
    pub fn dirichlet_form(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let u = &self.values;
        let v = &other.values;
        let meas = self.grid.cell_measure();
        match self.grid {
            GridSpec::Interval { n, .. } => {
                let w = meas / (self.grid.spacing(0) * self.grid.spacing(0));
                let mut acc = 0.0;
                let (mut pu, mut pv) = (0.0, 0.0);
                for i in 0..n {
                    acc += (u[i] - pu) * (v[i] - pv);
                    pu = u[i];
                    pv = v[i];
                }
                acc += pu * pv; // closing edge to the zero boundary
                Ok(acc * w)
            }
            GridSpec::Rectangle { n: [nx, ny], .. } => {
                let wx = meas / (self.grid.spacing(0) * self.grid.spacing(0));
                let wy = meas / (self.grid.spacing(1) * self.grid.spacing(1));
                let mut acc_x = 0.0;
                for iy in 0..ny {
                    let row = iy * nx;
                    let (mut pu, mut pv) = (0.0, 0.0);
                    for ix in 0..nx {
                        let m = row + ix;
                        acc_x += (u[m] - pu) * (v[m] - pv);
                        pu = u[m];
                        pv = v[m];
                    }
                    acc_x += pu * pv;
                }
                let mut acc_y = 0.0;
                for ix in 0..nx {
                    let (mut pu, mut pv) = (0.0, 0.0);
                    for iy in 0..ny {
                        let m = iy * nx + ix;
                        acc_y += (u[m] - pu) * (v[m] - pv);
                        pu = u[m];
                        pv = v[m];
                    }
                    acc_y += pu * pv;
                }
                Ok(acc_x * wx + acc_y * wy)
            }
        }
    }

    /// `‖u‖² = Σ_edges (Δu/h)² · measure`, the discrete gradient norm squared.
    pub fn gradient_energy(&self) -> f64 {
        self.dirichlet_form(self).expect("same grid")
    }

    /// Rectangle-rule `‖u‖_p^p = measure · Σ |u_i|^p`.
    pub fn lp_mass(&self, p: f64) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        self.grid.cell_measure() * s
    }

    /// `(‖u‖², ‖u‖_q^q, ‖u‖_α^α, ‖u‖_γ^γ)`; errors on the zero field.
    pub fn norm_tuple(&self, ex: &Exponents) -> Result<NormTuple> {
        let a = self.gradient_energy();
        if a <= 0.0 {
            return Err(Error::Precondition("norm tuple of the zero field".into()));
        }
        NormTuple::new(a, self.lp_mass(ex.q()), self.lp_mass(ex.alpha()), self.lp_mass(ex.gamma()))
    }

    /// Rescale to the unit sphere of the gradient norm.
    pub fn normalized(&self) -> Result<Self> {
        let a = self.gradient_energy();
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::Precondition("cannot normalize the zero field".into()));
        }
        Ok(self.scaled(1.0 / a.sqrt()))
    }

    /// Nodal gradient of the discrete energy
    /// `Φ(u) = ‖u‖²/2 + λ‖u‖_q^q/q - μ‖u‖_α^α/α - ‖u‖_γ^γ/γ`,
    /// i.e. `measure · (-Δ_h u + λ|u|^{q-2}u - μ|u|^{α-2}u - |u|^{γ-2}u)` per node.
    pub fn energy_gradient(&self, lambda: f64, mu: f64, ex: &Exponents) -> Vec<f64> {
        let meas = self.grid.cell_measure();
        let mut out = self.neg_laplacian();
        for (g, &v) in out.iter_mut().zip(&self.values) {
            *g = meas * (*g + lambda * pw(v, ex.q()) - mu * pw(v, ex.alpha()) - pw(v, ex.gamma()));
        }
        out
    }

    /// Nodal gradient of the stationarity numerator
    /// `‖u‖² + λ‖u‖_q^q - ‖u‖_γ^γ - μ‖u‖_α^α`, used by the N-family quotient
    /// gradients: `measure · (2(-Δ_h u) + qλ|u|^{q-2}u - αμ|u|^{α-2}u - γ|u|^{γ-2}u)`.
    pub fn stationarity_gradient(&self, lambda: f64, mu: f64, ex: &Exponents) -> Vec<f64> {
        let meas = self.grid.cell_measure();
        let (q, al, ga) = (ex.q(), ex.alpha(), ex.gamma());
        let mut out = self.neg_laplacian();
        for (g, &v) in out.iter_mut().zip(&self.values) {
            *g = meas * (2.0 * *g + q * lambda * pw(v, q) - al * mu * pw(v, al) - ga * pw(v, ga));
        }
        out
    }

    /// Max-norm of the strong-form equation defect
    /// `max_i |(-Δ_h u)_i - (|u|^{γ-2}u + μ|u|^{α-2}u - λ|u|^{q-2}u)_i|`.
    pub fn pde_residual(&self, lambda: f64, mu: f64, ex: &Exponents) -> f64 {
        let lap = self.neg_laplacian();
        let mut worst = 0.0f64;
        for (l, &v) in lap.iter().zip(&self.values) {
            let rhs = pw(v, ex.gamma()) + mu * pw(v, ex.alpha()) - lambda * pw(v, ex.q());
            worst = worst.max((l - rhs).abs());
        }
        worst
    }

    /// Nodal gradient of the selected 0-homogeneous quotient functional at
    /// this field. Every kind is evaluated through its fiber-optimal scaling;
    /// the stated λ must keep that scaling well defined on this ray.
    pub fn quotient_gradient(
        &self,
        kind: QuotientGradientKind,
        lambda: f64,
        ex: &Exponents,
    ) -> Result<Vec<f64>> {
        let nt = self.norm_tuple(ex)?;
        let fb = Fiber::new(nt, *ex);
        match kind {
            QuotientGradientKind::LambdaStar(fam) => {
                let t = fb.t_star(fam);
                let cap = fb.lambda_star_of_u(fam);
                let w = self.scaled(t);
                let (q, al, ga) = (ex.q(), ex.alpha(), ex.gamma());
                let meas = self.grid.cell_measure();
                let lap = w.neg_laplacian();
                // d cap[v] = (t/((α-q)/s_fam · t^q b)) Σ field_i v_i with the
                // family-dependent weights below; s_e = q, s_n = 1.
                let (w2, wg, wq, denom) = match fam {
                    QuotientFamily::E => (
                        2.0 - al,
                        ga - al,
                        (al - q) * cap,
                        (al - q) / q * t.powf(q) * nt.b,
                    ),
                    QuotientFamily::N => (
                        2.0 * (2.0 - al),
                        ga * (ga - al),
                        q * (al - q) * cap,
                        (al - q) * t.powf(q) * nt.b,
                    ),
                };
                let mut out = vec![0.0; self.len()];
                for (i, o) in out.iter_mut().enumerate() {
                    let v = w.values[i];
                    *o = t / denom * meas * (w2 * lap[i] - wg * pw(v, ga) - wq * pw(v, q));
                }
                Ok(out)
            }
            QuotientGradientKind::Mu(mk) => {
                let fam = mk.family();
                let pair = match fb.critical_pair(fam, lambda)? {
                    crate::fiber::CriticalOutcome::Pair(p) if !p.degenerate => p,
                    _ => {
                        return Err(Error::Precondition(format!(
                            "quotient gradient needs lambda strictly below the per-ray cap {:e}, got {lambda:e}",
                            fb.lambda_star_of_u(fam)
                        )))
                    }
                };
                let t = if mk.is_minus() { pair.t_minus } else { pair.t_plus };
                let w = self.scaled(t);
                let g_w = t.powf(ex.alpha()) * nt.c;
                match fam {
                    QuotientFamily::E => {
                        let mu_val = fb.rayleigh_e(t, lambda)?;
                        let mut out = w.energy_gradient(lambda, mu_val, ex);
                        let pref = ex.alpha() * t / g_w;
                        out.iter_mut().for_each(|g| *g *= pref);
                        Ok(out)
                    }
                    QuotientFamily::N => {
                        let mu_val = fb.rayleigh_n(t, lambda)?;
                        let mut out = w.stationarity_gradient(lambda, mu_val, ex);
                        let pref = t / g_w;
                        out.iter_mut().for_each(|g| *g *= pref);
                        Ok(out)
                    }
                }
            }
        }
    }
}

pub(crate) fn apply_neg_laplacian(grid: GridSpec, v: &[f64], out: &mut [f64]) {
    match grid {
        GridSpec::Interval { n, .. } => {
            let inv_h2 = {
                let h = grid.spacing(0);
                1.0 / (h * h)
            };
            for i in 0..n {
                let left = if i > 0 { v[i - 1] } else { 0.0 };
                let right = if i + 1 < n { v[i + 1] } else { 0.0 };
                out[i] = (2.0 * v[i] - left - right) * inv_h2;
            }
        }
        GridSpec::Rectangle { n: [nx, ny], .. } => {
            let inv_hx2 = {
                let h = grid.spacing(0);
                1.0 / (h * h)
            };
            let inv_hy2 = {
                let h = grid.spacing(1);
                1.0 / (h * h)
            };
            for iy in 0..ny {
                for ix in 0..nx {
                    let m = iy * nx + ix;
                    let l = if ix > 0 { v[m - 1] } else { 0.0 };
                    let r = if ix + 1 < nx { v[m + 1] } else { 0.0 };
                    let b = if iy > 0 { v[m - nx] } else { 0.0 };
                    let t = if iy + 1 < ny { v[m + nx] } else { 0.0 };
                    out[m] = (2.0 * v[m] - l - r) * inv_hx2 + (2.0 * v[m] - b - t) * inv_hy2;
                }
            }
        }
    }
}

/// Solve `-Δ_h x = rhs` (strong form) on the grid: Thomas elimination in 1D,
/// conjugate gradients in 2D. Deterministic in both cases.
pub fn solve_poisson(grid: GridSpec, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != grid.node_count() {
        return Err(Error::Invalid(format!(
            "rhs has {} entries but the grid has {} nodes",
            rhs.len(),
            grid.node_count()
        )));
    }
    match grid {
        GridSpec::Interval { n, .. } => {
            let h2 = grid.spacing(0) * grid.spacing(0);
            // Tridiagonal system diag 2, off-diagonal -1, rhs scaled by h².
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            c[0] = -0.5;
            d[0] = rhs[0] * h2 / 2.0;
            for i in 1..n {
                let m = 2.0 + c[i - 1];
                c[i] = -1.0 / m;
                d[i] = (rhs[i] * h2 + d[i - 1]) / m;
            }
            let mut x = vec![0.0; n];
            x[n - 1] = d[n - 1];
            for i in (0..n - 1).rev() {
                x[i] = d[i] - c[i] * x[i + 1];
            }
            Ok(x)
        }
        GridSpec::Rectangle { n: [nx, ny], .. } => {
            let len = nx * ny;
            let mut x = vec![0.0; len];
            let mut r = rhs.to_vec();
            let mut p = r.clone();
            let mut ap = vec![0.0; len];
            let rhs_norm = dot(rhs, rhs).sqrt();
            if rhs_norm == 0.0 {
                return Ok(x);
            }
            let mut rs = dot(&r, &r);
            let max_iter = 40 * (nx + ny).max(64);
            for _ in 0..max_iter {
                apply_neg_laplacian(grid, &p, &mut ap);
                let alpha = rs / dot(&p, &ap);
                for i in 0..len {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * ap[i];
                }
                let rs_new = dot(&r, &r);
                if rs_new.sqrt() <= 1e-13 * rhs_norm {
                    return Ok(x);
                }
                let beta = rs_new / rs;
                rs = rs_new;
                for i in 0..len {
                    p[i] = r[i] + beta * p[i];
                }
            }
            Err(Error::Numerical("conjugate gradients exhausted the iteration budget".into()))
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

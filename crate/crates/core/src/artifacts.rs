//! Deterministic renderers for everything the tools write to disk. All floats
//! go through [`float17`] (17 significant digits, enough to round-trip f64
//! exactly), so identical inputs produce byte-identical artifacts.

use crate::branch::{CoercivityReport, SolveReport};
use crate::extremal::ExtremalCurve;
use crate::fiber::{CriticalOutcome, Fiber, FiberAnalysis, NehariRoots};
use crate::grid::DiscreteField;
use crate::oracle::VerifyReport;

pub const CURVE_SCHEMA: &str = "curve-v1";
pub const FIELD_SCHEMA: &str = "field-v1";
pub const SCAN_SCHEMA: &str = "scan-v1";
pub const FAILURES_SCHEMA: &str = "verify-failures-v1";

/// Shortest-exact rendering: 17 significant digits in scientific notation.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float17(x: Option<f64>) -> String {
    x.map(float17).unwrap_or_default()
}

/// RFC-4180 style quoting for free-text CSV cells.
fn quote_csv(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `lambda,mu_n_plus,mu_e_plus,mu_e_minus,mu_n_minus,converged_flags` with
/// absent extremal values as empty cells. The flags cell holds one character
/// per kind in header order: `1` converged, `0` not, `-` absent.
pub fn curve_csv(curve: &ExtremalCurve) -> String {
    let mut out = String::from("lambda,mu_n_plus,mu_e_plus,mu_e_minus,mu_n_minus,converged_flags\n");
    for i in 0..curve.len() {
        let flags: String = curve.converged[i]
            .iter()
            .map(|f| match f {
                Some(true) => '1',
                Some(false) => '0',
                None => '-',
            })
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            float17(curve.lambda_values[i]),
            opt_float17(curve.mu_n_plus[i]),
            opt_float17(curve.mu_e_plus[i]),
            opt_float17(curve.mu_e_minus[i]),
            opt_float17(curve.mu_n_minus[i]),
            flags
        ));
    }
    out
}

/// `node_index,value` over interior nodes in storage order.
pub fn field_csv(field: &DiscreteField) -> String {
    let mut out = String::from("node_index,value\n");
    for (i, v) in field.values().iter().enumerate() {
        out.push_str(&format!("{i},{}\n", float17(*v)));
    }
    out
}

/// `case,relation,observed`, quoted free text.
pub fn failures_csv(report: &VerifyReport) -> String {
    let mut out = String::from("case,relation,observed\n");
    for f in &report.failures {
        out.push_str(&format!(
            "{},{},{}\n",
            quote_csv(&f.case),
            quote_csv(&f.relation),
            quote_csv(&f.observed)
        ));
    }
    out
}

pub fn verify_text(report: &VerifyReport) -> String {
    let mut out = String::new();
    out.push_str("# identity suite report\n");
    out.push_str(&format!("cases = {}\n", report.case_count));
    out.push_str(&format!("seed = {}\n", report.seed));
    out.push_str(&format!("failures = {}\n", report.failures.len()));
    out.push_str(&format!("status = {}\n", if report.passed() { "pass" } else { "fail" }));
    for f in &report.failures {
        out.push_str(&format!("violated: {} | {} | {}\n", f.relation, f.case, f.observed));
    }
    out
}

fn roots_lines(roots: &NehariRoots, fb: &Fiber, lambda: f64, out: &mut String) {
    out.push_str(&format!("root_count = {}\n", roots.count()));
    for (i, (s, mult)) in roots.all().into_iter().enumerate() {
        let slope = fb
            .rayleigh_n_d1(s, lambda)
            .map(|v| float17(v))
            .unwrap_or_else(|_| "nan".to_string());
        out.push_str(&format!("root_{i} = {}  multiplicity = {mult}  quotient_slope = {slope}\n", float17(s)));
    }
}

/// Key-value document for one ray's fiber analysis.
pub fn fiber_text(analysis: &FiberAnalysis) -> String {
    let ex = analysis.exponents;
    let nt = analysis.tuple;
    let fb = Fiber::new(nt, ex);
    let mut out = String::new();
    out.push_str("# fiber analysis v1\n");
    out.push_str(&format!("q = {}\nalpha = {}\ngamma = {}\ndim = {}\n", ex.q(), ex.alpha(), ex.gamma(), ex.dim()));
    out.push_str(&format!(
        "a = {}\nb = {}\nc = {}\nd = {}\n",
        float17(nt.a),
        float17(nt.b),
        float17(nt.c),
        float17(nt.d)
    ));
    out.push_str(&format!("strict_convexity_regime = {}\n", analysis.strict_regime));
    out.push_str(&format!("t_peak_e = {}\n", float17(analysis.t_star_e)));
    out.push_str(&format!("t_peak_n = {}\n", float17(analysis.t_star_n)));
    out.push_str(&format!("lambda_cap_e = {}\n", float17(analysis.lambda_star_e)));
    out.push_str(&format!("lambda_cap_n = {}\n", float17(analysis.lambda_star_n)));
    out.push_str(&format!("lambda = {}\n", float17(analysis.lambda)));
    for (name, crit) in [("e", &analysis.crit_e), ("n", &analysis.crit_n)] {
        match crit {
            CriticalOutcome::Pair(p) => {
                out.push_str(&format!(
                    "t_{name}_plus = {}\nt_{name}_minus = {}\n",
                    float17(p.t_plus),
                    float17(p.t_minus)
                ));
                if p.degenerate {
                    out.push_str(&format!("note = {name}-critical points degenerate (lambda at the cap)\n"));
                }
            }
            CriticalOutcome::AboveCap => {
                out.push_str(&format!("note = no {name}-critical points (lambda above the cap)\n"));
            }
        }
    }
    for (name, v) in [
        ("mu_n_plus", analysis.mu.n_plus),
        ("mu_e_plus", analysis.mu.e_plus),
        ("mu_e_minus", analysis.mu.e_minus),
        ("mu_n_minus", analysis.mu.n_minus),
    ] {
        match v {
            Some(x) => out.push_str(&format!("{name} = {}\n", float17(x))),
            None => out.push_str(&format!("{name} = absent\n")),
        }
    }
    if let Some(r) = analysis.inflection {
        out.push_str(&format!("quotient_inflection = {}\n", float17(r)));
    }
    if let (Some(mu), Some(roots)) = (analysis.mu_level, &analysis.roots) {
        out.push_str(&format!("mu = {}\n", float17(mu)));
        roots_lines(roots, &fb, analysis.lambda, &mut out);
    }
    out
}

/// Key-value document for a branch solve.
pub fn solve_text(report: &SolveReport, lambda: f64, mu: f64) -> String {
    let c = &report.classification;
    let mut out = String::new();
    out.push_str("# branch solve report v1\n");
    out.push_str(&format!("branch = {}\n", report.branch));
    out.push_str(&format!("lambda = {}\n", float17(lambda)));
    out.push_str(&format!("mu = {}\n", float17(mu)));
    out.push_str(&format!("converged = {}\n", report.converged));
    out.push_str(&format!("iterations = {}\n", report.iterations));
    out.push_str(&format!("gradient_norm = {}\n", float17(report.gradient_norm)));
    out.push_str(&format!("phi_value = {}\n", float17(c.phi_value)));
    out.push_str(&format!("phi_d2_sign = {}\n", c.phi_d2_sign.symbol()));
    out.push_str(&format!(
        "rn_d2_sign = {}\n",
        c.rn_d2_sign.map(|s| s.symbol()).unwrap_or("n/a")
    ));
    out.push_str(&format!("residual = {}\n", float17(c.residual)));
    out.push_str(&format!("positive = {}\n", c.positive));
    out.push_str(&format!("nehari_gap = {}\n", float17(c.nehari_gap)));
    out
}

/// Sidecar for curve runs: the two cap estimates bounding the tabulated λ.
pub fn cap_estimates_text(
    cap_e_value: f64,
    cap_e_converged: bool,
    cap_n_value: f64,
    cap_n_converged: bool,
) -> String {
    format!(
        "# extremal cap estimates v1\nlambda_cap_e = {}\nlambda_cap_e_converged = {}\nlambda_cap_n = {}\nlambda_cap_n_converged = {}\n",
        float17(cap_e_value),
        cap_e_converged,
        float17(cap_n_value),
        cap_n_converged
    )
}

pub fn coercivity_text(report: &CoercivityReport) -> String {
    let mut out = String::new();
    out.push_str("# coercivity probe v1\n");
    out.push_str(&format!("seed = {}\n", report.seed));
    out.push_str(&format!("samples = {}\n", report.samples.len()));
    for (r, m) in report.radii.iter().zip(&report.min_phi) {
        out.push_str(&format!("min_phi_at_radius_{} = {}\n", r, float17(*m)));
    }
    out
}

//! Nine seeded end-to-end gates with fixed tolerances and runtime budgets,
//! one test per gate. Reference constants marked "oracle" were produced by an
//! independent 50-digit bisection/quadrature script and frozen to 17 digits;
//! hand-derived 4-digit values are kept as coarse cross-checks only.

use std::time::{Duration, Instant};

use nehari_core::artifacts;
use nehari_core::{
    classify_solution, coercivity_probe, extremal_curve, minimize_mu, scan_stationarity_level,
    solve_branch1, solve_branch2, solve_poisson, verify_lemma_suite, DescentOpts, DiscreteField,
    Exponents, Fiber, GridSpec, MuKind, NehariRoots, NormTuple, QuotientFamily,
    QuotientGradientKind, Sign, VerifyOpts,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const PI: f64 = std::f64::consts::PI;

fn worked_exponents() -> Exponents {
    Exponents::new(1.5, 1.75, 3.0, 1).unwrap()
}

fn unit_tuple() -> NormTuple {
    NormTuple::new(1.0, 1.0, 1.0, 1.0).unwrap()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn acceptance_01_scalar_identity_suite() {
    let t0 = Instant::now();
    let opts = VerifyOpts::default();
    assert_eq!(opts.n_cases, 1000);
    assert_eq!(opts.seed, SEED);
    let report = verify_lemma_suite(&opts);
    let dt = t0.elapsed();
    for f in &report.failures {
        eprintln!("violated: {} | {} | {}", f.relation, f.case, f.observed);
    }
    assert_eq!(report.case_count, 1000);
    assert!(report.passed(), "{} relations violated", report.failures.len());
    assert!(dt < Duration::from_secs(10), "suite took {dt:?}, budget 10s");
    println!("PASS scalar-identity suite: 1000 cases, 0 violations, {dt:?}");
}

#[test]
fn acceptance_02_root_structure_vs_dense_scan() {
    let t0 = Instant::now();
    let scan_samples = 1_000_000;
    for case in 0..200usize {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED.wrapping_add((case as u64) << 20));
        let q: f64 = rng.gen_range(1.05..1.9);
        let alpha: f64 = rng.gen_range(q + 0.05..1.95);
        let gamma: f64 = rng.gen_range(2.6..5.5);
        let ex = Exponents::new(q, alpha, gamma, 1).unwrap();
        let nt = NormTuple::new(
            10f64.powf(rng.gen_range(-2.0..2.0)),
            10f64.powf(rng.gen_range(-2.0..2.0)),
            10f64.powf(rng.gen_range(-2.0..2.0)),
            10f64.powf(rng.gen_range(-2.0..2.0)),
        )
        .unwrap();
        let fb = Fiber::new(nt, ex);
        let lambda = rng.gen_range(1e-3..0.9) * fb.lambda_star_of_u(QuotientFamily::N);
        let mq = fb.mu_quotients(lambda).unwrap();
        let (lo, hi) = (mq.n_plus.unwrap(), mq.n_minus.unwrap());
        let ctx = format!("case {case}: q={q} alpha={alpha} gamma={gamma} lambda={lambda:e}");

        // Independent evaluation of the level function the dense scan sweeps.
        let level = |t: f64, mu: f64| {
            t.powf(2.0 - alpha) * nt.a + lambda * t.powf(q - alpha) * nt.b
                - t.powf(gamma - alpha) * nt.d
                - mu * nt.c
        };
        let level_scale = |t: f64, mu: f64| {
            t.powf(2.0 - alpha) * nt.a
                + lambda * t.powf(q - alpha) * nt.b
                + t.powf(gamma - alpha) * nt.d
                + mu.abs() * nt.c
        };

        let inside = lo + rng.gen_range(0.15..0.85) * (hi - lo);
        let below = lo * rng.gen_range(0.5..0.95);
        let above = hi * (1.0 + rng.gen_range(0.1..1.0));
        for (mu, want) in [(inside, 3usize), (below, 1), (above, 1)] {
            let roots = fb.nehari_roots(lambda, mu).unwrap();
            assert_eq!(roots.count(), want, "{ctx} mu={mu:e} band=({lo:e},{hi:e})");
            let all = roots.all();
            let (t_lo, t_hi) = (all[0].0 / 50.0, all[all.len() - 1].0 * 50.0);
            let brackets =
                scan_stationarity_level(nt, &ex, lambda, mu, t_lo, t_hi, scan_samples).unwrap();
            assert_eq!(brackets.len(), want, "{ctx} mu={mu:e}: scan disagrees");
            assert!(level(t_lo, mu) > 0.0 && level(t_hi, mu) < 0.0, "{ctx}: window too tight");
            // A root landing within rounding of a sample point can be
            // detected one sample late; allow one spacing of slack.
            let rho = (t_hi / t_lo).powf(1.0 / scan_samples as f64);
            for (k, ((b_lo, b_hi), &(s, mult))) in brackets.iter().zip(all.iter()).enumerate() {
                assert_eq!(mult, 1, "{ctx}: unexpected multiple root");
                assert!(
                    *b_lo <= s * rho && s <= b_hi * rho,
                    "{ctx}: root {k} at {s:e} not in scan bracket ({b_lo:e}, {b_hi:e})"
                );
                // Crossing direction doubles as the slope sign: the middle
                // root rises, the outer ones fall. Probe two spacings outside
                // the bracket so the detection offset cannot flip the signs.
                let (left, right) = (level(b_lo / rho / rho, mu), level(b_hi * rho * rho, mu));
                let rising = right > left;
                let want_rising = want == 3 && k == 1;
                assert_eq!(rising, want_rising, "{ctx}: root {k} slope direction");
                assert!(left.signum() != right.signum(), "{ctx}: no crossing around root {k}");
                let d1 = fb.rayleigh_n_d1(s, lambda).unwrap();
                assert_eq!(d1 > 0.0, want_rising, "{ctx}: analytic slope sign at root {k}");
            }
        }

        // Band-edge μ: one tangent root plus one crossing. A tangent root
        // produces no sign change, so the scan certifies it by a level touch
        // with no flip instead of a bracket.
        let edge = if case % 2 == 0 { lo } else { hi };
        let roots = fb.nehari_roots(lambda, edge).unwrap();
        assert_eq!(roots.count(), 2, "{ctx} edge mu={edge:e}");
        assert!(matches!(roots, NehariRoots::TwoLower { .. } | NehariRoots::TwoUpper { .. }));
        let all = roots.all();
        let (t_lo, t_hi) = (all[0].0 / 50.0, all[all.len() - 1].0 * 50.0);
        let brackets =
            scan_stationarity_level(nt, &ex, lambda, edge, t_lo, t_hi, scan_samples).unwrap();
        let simple: Vec<f64> = all.iter().filter(|(_, m)| *m == 1).map(|(s, _)| *s).collect();
        let tangent: Vec<f64> = all.iter().filter(|(_, m)| *m == 2).map(|(s, _)| *s).collect();
        assert_eq!((simple.len(), tangent.len()), (1, 1), "{ctx}");
        let sd = tangent[0];
        // The edge is a measure-zero level, so f64 rounds it a hair to either
        // side of the true extremum; when it lands below, the level pokes
        // through zero in a sliver around the tangent root that the scan may
        // resolve as two extra brackets. Anything within 0.1% of the tangent
        // root is that sliver (genuine roots sit tens of percent apart);
        // outside it the scan must see exactly the one crossing root.
        let hug = 1e-3 * sd;
        let rho = (t_hi / t_lo).powf(1.0 / scan_samples as f64);
        let mut sliver = 0usize;
        let mut crossing = Vec::new();
        for &(b_lo, b_hi) in &brackets {
            if b_lo >= sd - hug && b_hi <= sd + hug {
                sliver += 1;
            } else {
                crossing.push((b_lo, b_hi));
            }
        }
        assert!(sliver == 0 || sliver == 2, "{ctx}: {sliver} sliver brackets at tangent root");
        assert_eq!(crossing.len(), 1, "{ctx}: edge scan crossing count");
        assert!(
            crossing[0].0 <= simple[0] * rho && simple[0] <= crossing[0].1 * rho,
            "{ctx}: crossing root not in scan bracket"
        );
        let mut min_abs = f64::INFINITY;
        let mut flips = 0usize;
        let mut last_sign = 0i8;
        for k in 0..=2000 {
            let t = sd * (0.9 + 2e-4 * k as f64);
            let v = level(t, edge);
            min_abs = min_abs.min(v.abs());
            if (t - sd).abs() <= hug {
                continue;
            }
            let s = if v > 0.0 { 1i8 } else { -1 };
            if last_sign != 0 && s != last_sign {
                flips += 1;
            }
            last_sign = s;
        }
        assert_eq!(flips, 0, "{ctx}: sign change away from the tangent root");
        assert!(min_abs <= 1e-5 * level_scale(sd, edge), "{ctx}: no level touch at {sd:e}");
        let d1 = fb.rayleigh_n_d1(sd, lambda).unwrap();
        assert!(d1.abs() * sd <= 1e-6 * level_scale(sd, edge) / nt.c, "{ctx}: tangent slope {d1:e}");
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(30), "suite took {dt:?}, budget 30s");
    println!("PASS root structure: 200 cases x 4 levels vs 1e6-sample scans, {dt:?}");
}

#[test]
fn acceptance_03_worked_tuple_regression() {
    let ex = worked_exponents();
    let fb = Fiber::new(unit_tuple(), ex);
    let lambda = 0.1;

    let close = |got: f64, oracle: f64, coarse: f64, tol_coarse: f64, what: &str| {
        assert!(
            (got - oracle).abs() <= 1e-11 * oracle.abs().max(1.0),
            "{what}: {got:.17e} vs oracle {oracle:.17e}"
        );
        assert!((got - coarse).abs() <= tol_coarse, "{what}: {got} vs hand value {coarse}");
    };

    close(fb.t_star(QuotientFamily::E), 0.1, 0.1, 1e-5, "t_peak_e");
    close(fb.t_star(QuotientFamily::N), 1.0 / 15.0, 1.0 / 15.0, 1e-5, "t_peak_n");
    close(
        fb.lambda_star_of_u(QuotientFamily::E),
        0.15811388300841897,
        0.158114,
        1e-5,
        "lambda_cap_e",
    );
    close(
        fb.lambda_star_of_u(QuotientFamily::N),
        0.17213259316477408,
        0.172133,
        1e-5,
        "lambda_cap_n",
    );

    let pe = fb.critical_pair(QuotientFamily::E, lambda).unwrap().pair().unwrap();
    let pn = fb.critical_pair(QuotientFamily::N, lambda).unwrap().pair().unwrap();
    close(pe.t_plus, 0.020478025075487624, 0.0205, 1e-4, "t_e_plus");
    close(pe.t_minus, 0.21341378457045365, 0.2134, 1e-4, "t_e_minus");
    close(pn.t_plus, 0.011224550705750870, 0.0112, 1e-4, "t_n_plus");
    close(pn.t_minus, 0.14801513320303235, 0.1480, 1e-4, "t_n_minus");

    let mq = fb.mu_quotients(lambda).unwrap();
    close(mq.n_plus.unwrap(), 0.62906577619132471, 0.6291, 2e-3, "mu_n_plus");
    close(mq.e_plus.unwrap(), 0.63489013093272478, 0.6349, 2e-3, "mu_e_plus");
    close(mq.e_minus.unwrap(), 0.68175598395578155, 0.6818, 2e-3, "mu_e_minus");
    close(mq.n_minus.unwrap(), 0.68967717634097379, 0.6897, 2e-3, "mu_n_minus");

    match fb.nehari_roots(lambda, 0.66).unwrap() {
        NehariRoots::Three { s0, s1, s2 } => {
            close(s0, 0.0030382278463640060, 0.0030, 2e-3, "s0");
            close(s1, 0.049028012340224474, 0.0490, 2e-3, "s1");
            close(s2, 0.28315893005138606, 0.2829, 2e-3, "s2");
        }
        other => panic!("expected three roots at mu=0.66, got {other:?}"),
    }
    println!("PASS worked tuple: peaks, caps, critical pairs, quotients, roots at oracle digits");
}

#[test]
fn acceptance_04_derivative_richardson_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let check = |what: &str, probe: usize, ord: f64| {
        assert!(ord >= 1.9 || ord.is_infinite(), "{what} probe {probe}: observed order {ord}");
    };

    // Scalar fiber layer: first and second t-derivatives of every map that
    // exposes them, 20 probes each.
    for probe in 0..20usize {
        let q: f64 = rng.gen_range(1.05..1.85);
        let alpha: f64 = rng.gen_range(q + 0.05..1.93);
        let gamma: f64 = rng.gen_range(2.6..5.0);
        let ex = Exponents::new(q, alpha, gamma, 1).unwrap();
        let nt = NormTuple::new(
            10f64.powf(rng.gen_range(-1.3..1.3)),
            10f64.powf(rng.gen_range(-1.3..1.3)),
            10f64.powf(rng.gen_range(-1.3..1.3)),
            10f64.powf(rng.gen_range(-1.3..1.3)),
        )
        .unwrap();
        let fb = Fiber::new(nt, ex);
        let lambda = rng.gen_range(0.05..0.85) * fb.lambda_star_of_u(QuotientFamily::E);
        let mu: f64 = rng.gen_range(-1.0..2.0);
        let t = fb.t_star(QuotientFamily::E) * rng.gen_range(-1.5f64..1.5).exp();
        let h0 = 0.1 * t;

        let ord = nehari_core::fd_order(
            |s| fb.phi_fiber(s, lambda, mu).unwrap(),
            t,
            fb.phi_d1(t, lambda, mu).unwrap(),
            h0,
        );
        check("phi_d1", probe, ord);
        let ord = nehari_core::fd_order(
            |s| fb.phi_d1(s, lambda, mu).unwrap(),
            t,
            fb.phi_d2(t, lambda, mu).unwrap(),
            h0,
        );
        check("phi_d2", probe, ord);
        let ord = nehari_core::fd_order(
            |s| fb.rayleigh_n(s, lambda).unwrap(),
            t,
            fb.rayleigh_n_d1(t, lambda).unwrap(),
            h0,
        );
        check("rayleigh_n_d1", probe, ord);
        let ord = nehari_core::fd_order(
            |s| fb.rayleigh_n_d1(s, lambda).unwrap(),
            t,
            fb.rayleigh_n_d2(t, lambda).unwrap(),
            h0,
        );
        check("rayleigh_n_d2", probe, ord);
        let ord = nehari_core::fd_order(
            |s| fb.rayleigh_e(s, lambda).unwrap(),
            t,
            fb.rayleigh_e_d1(t, lambda).unwrap(),
            h0,
        );
        check("rayleigh_e_d1", probe, ord);
        let ord = nehari_core::fd_order(
            |s| fb.rayleigh_e_d1(s, lambda).unwrap(),
            t,
            fb.rayleigh_e_d2(t, lambda).unwrap(),
            h0,
        );
        check("rayleigh_e_d2", probe, ord);
        let ord = nehari_core::fd_order(
            |s| fb.lambda_fiber_n(s).unwrap(),
            t,
            fb.lambda_fiber_n_d1(t).unwrap(),
            h0,
        );
        check("lambda_fiber_n_d1", probe, ord);
        let ord = nehari_core::fd_order(
            |s| fb.lambda_fiber_e(s).unwrap(),
            t,
            fb.lambda_fiber_e_d1(t).unwrap(),
            h0,
        );
        check("lambda_fiber_e_d1", probe, ord);
    }

    // Nodal layer: directional derivatives on a strictly positive base field
    // so no node crosses the |·|^p kink inside the probe interval.
    let grid = GridSpec::interval(1.0, 32).unwrap();
    let n = grid.node_count();
    for probe in 0..20usize {
        let ex = worked_exponents();
        let u_vals: Vec<f64> = (0..n).map(|_| 0.5 + rng.gen_range(0.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = DiscreteField::new(grid, u_vals.clone()).unwrap();
        let shifted = |s: f64| {
            let vals: Vec<f64> = u_vals.iter().zip(&v).map(|(a, b)| a + s * b).collect();
            DiscreteField::new(grid, vals).unwrap()
        };
        let lambda: f64 = rng.gen_range(0.01..1.0);
        let mu: f64 = rng.gen_range(-1.0..2.0);

        let claimed = dot(&u.energy_gradient(lambda, mu, &ex), &v);
        let ord = nehari_core::fd_order(
            |s| {
                let nt = shifted(s).norm_tuple(&ex).unwrap();
                Fiber::new(nt, ex).phi_fiber(1.0, lambda, mu).unwrap()
            },
            0.0,
            claimed,
            0.02,
        );
        check("energy_gradient", probe, ord);

        let fb_u = Fiber::new(u.norm_tuple(&ex).unwrap(), ex);
        let lam_e = 0.3 * fb_u.lambda_star_of_u(QuotientFamily::E);
        let kinds = [
            QuotientGradientKind::LambdaStar(QuotientFamily::E),
            QuotientGradientKind::LambdaStar(QuotientFamily::N),
            QuotientGradientKind::Mu(MuKind::NPlus),
            QuotientGradientKind::Mu(MuKind::EPlus),
            QuotientGradientKind::Mu(MuKind::EMinus),
            QuotientGradientKind::Mu(MuKind::NMinus),
        ];
        for kind in kinds {
            let claimed = dot(&u.quotient_gradient(kind, lam_e, &ex).unwrap(), &v);
            let ord = nehari_core::fd_order(
                |s| {
                    let nt = shifted(s).norm_tuple(&ex).unwrap();
                    let fb = Fiber::new(nt, ex);
                    match kind {
                        QuotientGradientKind::LambdaStar(fam) => fb.lambda_star_of_u(fam),
                        QuotientGradientKind::Mu(k) => {
                            let pair =
                                fb.critical_pair(k.family(), lam_e).unwrap().pair().unwrap();
                            let t = if k.is_minus() { pair.t_minus } else { pair.t_plus };
                            match k.family() {
                                QuotientFamily::E => fb.rayleigh_e(t, lam_e).unwrap(),
                                QuotientFamily::N => fb.rayleigh_n(t, lam_e).unwrap(),
                            }
                        }
                    }
                },
                0.0,
                claimed,
                0.02,
            );
            check(&format!("quotient_gradient {kind:?}"), probe, ord);
        }
    }
    println!("PASS derivative orders: 8 fiber maps + 7 directional families, 20 probes each, all >= 1.9");
}

#[test]
fn acceptance_05_discretization_convergence() {
    let sizes = [64usize, 128, 256, 512];
    let targets = [
        (1.5, 0.55641789444938212),
        (1.75, 0.52600343898758407),
        (3.0, 0.42441318157838756),
    ];
    let mut energy_errs = Vec::new();
    let mut mass_errs = vec![Vec::new(); targets.len()];
    let mut sq_errs = Vec::new();
    for &n in &sizes {
        let grid = GridSpec::interval(1.0, n).unwrap();
        let u = DiscreteField::from_fn_1d(grid, |x| (PI * x).sin()).unwrap();
        energy_errs.push((u.gradient_energy() - PI * PI / 2.0).abs());
        for (k, (p, exact)) in targets.iter().enumerate() {
            mass_errs[k].push((u.lp_mass(*p) - exact).abs());
        }
        sq_errs.push((u.lp_mass(2.0) - 0.5).abs());
    }
    let orders = |errs: &[f64], what: &str| {
        for (i, w) in errs.windows(2).enumerate() {
            let ord = (w[0] / w[1]).log2();
            assert!(
                ord >= 1.9,
                "{what}: order {ord:.3} between n={} and n={} (errors {:?})",
                sizes[i],
                sizes[i + 1],
                errs
            );
        }
    };
    orders(&energy_errs, "gradient_energy -> pi^2/2");
    for (k, (p, _)) in targets.iter().enumerate() {
        orders(&mass_errs[k], &format!("lp_mass p={p}"));
    }
    // The rectangle rule is exact for sin^2 on this grid (the sample sum
    // telescopes to (n+1)/2), so no order can be observed there; pin the
    // error at rounding level instead.
    for (i, e) in sq_errs.iter().enumerate() {
        assert!(*e <= 1e-13, "lp_mass p=2 at n={}: error {e:e}", sizes[i]);
    }
    println!(
        "PASS discretization: energy errors {energy_errs:?}, mass orders >= 1.9, sin^2 exact"
    );
}

#[test]
fn acceptance_06_extremal_minimizer_solves_the_equation() {
    let t0 = Instant::now();
    let ex = worked_exponents();
    let grid = GridSpec::interval(1.0, 256).unwrap();
    let opts = DescentOpts { max_iter: 40_000, ..DescentOpts::default() };
    let res = minimize_mu(MuKind::EMinus, 0.1, grid, &ex, &opts).unwrap();
    assert!(
        res.converged,
        "descent stopped at gradient_norm {:e} after {} iterations",
        res.gradient_norm, res.iterations
    );
    let u = res.minimizer.normalized().unwrap();
    let fb = Fiber::new(u.norm_tuple(&ex).unwrap(), ex);
    let pair = fb.critical_pair(QuotientFamily::E, 0.1).unwrap().pair().unwrap();
    let w = u.scaled(pair.t_minus);
    let cls = classify_solution(&w, 0.1, res.value, &ex).unwrap();
    let bound = 1e-5 * (1.0 + w.linf().powf(ex.gamma() - 1.0));
    assert!(cls.residual < bound, "residual {:e} vs bound {bound:e}", cls.residual);
    assert!(cls.phi_value.abs() < 1e-6, "phi {:e}", cls.phi_value);
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(60), "took {dt:?}, budget 60s");
    println!(
        "PASS zero-energy solution: mu_e_minus*={:.6}, residual {:.3e} < {:.3e}, |phi| {:.3e}, {dt:?}",
        res.value, cls.residual, bound, cls.phi_value.abs()
    );
}

#[test]
fn acceptance_07_branch_suite_and_trichotomy() {
    let t0 = Instant::now();
    let ex = worked_exponents();
    let grid = GridSpec::interval(1.0, 256).unwrap();
    let lambda = 0.1;
    let opts = DescentOpts { max_iter: 40_000, ..DescentOpts::default() };

    let ep = minimize_mu(MuKind::EPlus, lambda, grid, &ex, &opts).unwrap();
    let em = minimize_mu(MuKind::EMinus, lambda, grid, &ex, &opts).unwrap();
    let nm = minimize_mu(MuKind::NMinus, lambda, grid, &ex, &opts).unwrap();
    for (r, what) in [(&ep, "e_plus"), (&em, "e_minus"), (&nm, "n_minus")] {
        assert!(r.converged, "{what} stalled at gradient_norm {:e}", r.gradient_norm);
    }
    assert!(ep.value < em.value && em.value < nm.value, "band collapsed");

    let mu_mid = 0.5 * (ep.value + nm.value);
    let warm = DescentOpts { init: Some(em.minimizer.clone()), ..opts.clone() };

    let r1 = solve_branch1(lambda, mu_mid, grid, &ex, &warm).unwrap();
    assert!(r1.converged, "branch 1 gradient_norm {:e}", r1.gradient_norm);
    let c1 = &r1.classification;
    assert!(c1.phi_value < 0.0, "branch 1 energy {:e}", c1.phi_value);
    assert_eq!(c1.phi_d2_sign, Sign::Plus);
    assert!(c1.positive, "branch 1 not positive");
    assert!(c1.nehari_gap < 1e-12, "branch 1 gap {:e}", c1.nehari_gap);

    let r2 = solve_branch2(lambda, mu_mid, grid, &ex, &warm).unwrap();
    assert!(r2.converged, "branch 2 gradient_norm {:e}", r2.gradient_norm);
    let c2 = &r2.classification;
    assert_eq!(c2.phi_d2_sign, Sign::Minus);
    assert_eq!(c2.rn_d2_sign, Some(Sign::Minus));
    assert!(c2.nehari_gap < 1e-12, "branch 2 gap {:e}", c2.nehari_gap);
    let dist = r2.solution.rel_l2_distance(&r1.solution).unwrap();
    assert!(dist > 1e-3, "branches coincide, distance {dist:e}");

    // Energy sign of the second branch across the zero-energy level. The
    // signs are read against tol_energy = 1e-6, which a 1e-7 stationarity
    // already pins to ~1e-13; below the zero level the n=256 descent grinds
    // out its last half-decade of gradient norm against f64 value noise, so
    // demanding 1e-8 here buys nothing but iterations.
    let trick = DescentOpts { tol_opt: 1e-7, ..warm.clone() };
    let levels =
        [(em.value - 0.05, Sign::Plus), (em.value, Sign::Zero), (0.5 * (em.value + nm.value), Sign::Minus)];
    for (mu, want) in levels {
        let r = solve_branch2(lambda, mu, grid, &ex, &trick).unwrap();
        assert!(r.converged, "trichotomy at mu={mu}: gradient_norm {:e}", r.gradient_norm);
        let phi = r.classification.phi_value;
        let got = Sign::of(phi, 1e-6);
        assert_eq!(got, want, "trichotomy at mu={mu}: phi={phi:e}");
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(300), "took {dt:?}, budget 5min");
    println!(
        "PASS branch suite: band=({:.4},{:.4}), both branches classified, distance {dist:.3e}, trichotomy (+,0,-), {dt:?}",
        ep.value, nm.value
    );
}

#[test]
fn acceptance_08_coercivity_probe() {
    // The unit interval's Nehari shell at these parameters sits entirely
    // above gradient norm 20, so the probe runs on a length-3 interval where
    // the shell brackets both radii.
    let ex = worked_exponents();
    let grid = GridSpec::interval(3.0, 128).unwrap();
    let report = coercivity_probe(0.1, 0.5, grid, &ex, &[1.0, 10.0], 60, SEED).unwrap();
    assert!(report.min_phi[0].is_finite(), "no samples near radius 1");
    assert!(report.min_phi[1].is_finite(), "no samples near radius 10");
    assert!(
        report.min_phi[1] > report.min_phi[0],
        "minimum energy did not grow with radius: {:?}",
        report.min_phi
    );
    // On the Nehari set Φ collapses to ((γ-2)/2γ)a + λ((γ-q)/qγ)b - μ((γ-α)/αγ)c;
    // dropping the positive middle term gives the coercivity lower bound.
    let (q, al, ga) = (ex.q(), ex.alpha(), ex.gamma());
    for s in &report.samples {
        let tol = 1e-9 * (1.0 + s.a + s.alpha_mass);
        let display = (ga - 2.0) / (2.0 * ga) * s.a + 0.1 * (ga - q) / (q * ga) * s.q_mass
            - 0.5 * (ga - al) / (al * ga) * s.alpha_mass;
        assert!((s.phi - display).abs() <= tol, "display off: {} vs {display}", s.phi);
        let bound = (ga - 2.0) / (2.0 * ga) * s.a - 0.5 * (ga - al) / (al * ga) * s.alpha_mass;
        assert!(s.phi + tol >= bound, "lower bound violated: {} < {bound}", s.phi);
    }
    println!(
        "PASS coercivity: min phi {:?} increasing over radii [1, 10], bound holds on {} samples",
        report.min_phi,
        report.samples.len()
    );
}

#[test]
fn acceptance_09_artifact_determinism() {
    fn bundle() -> String {
        let ex = worked_exponents();
        let mut out = String::new();

        let report = verify_lemma_suite(&VerifyOpts { n_cases: 200, ..VerifyOpts::default() });
        out.push_str(&artifacts::failures_csv(&report));
        out.push_str(&artifacts::verify_text(&report));

        let grid = GridSpec::interval(1.0, 24).unwrap();
        let opts = DescentOpts { max_iter: 3000, ..DescentOpts::default() };
        let curve = extremal_curve(&[0.05, 0.075, 0.1], grid, &ex, &opts).unwrap();
        out.push_str(&artifacts::curve_csv(&curve));

        let last = curve.len() - 1;
        let mu_mid = 0.5
            * (curve.mu_e_plus[last].expect("cap not reached")
                + curve.mu_n_minus[last].expect("cap not reached"));
        let solve = solve_branch1(0.1, mu_mid, grid, &ex, &opts).unwrap();
        out.push_str(&artifacts::field_csv(&solve.solution));
        out.push_str(&artifacts::solve_text(&solve, 0.1, mu_mid));

        let cgrid = GridSpec::interval(3.0, 48).unwrap();
        let probe = coercivity_probe(0.1, 0.5, cgrid, &ex, &[1.0, 10.0], 40, SEED).unwrap();
        out.push_str(&artifacts::coercivity_text(&probe));
        out
    }
    let first = bundle();
    let second = bundle();
    assert_eq!(first.len(), second.len(), "artifact byte lengths differ");
    assert!(first == second, "artifact bytes differ between identically seeded runs");
    assert!(first.contains("lambda,mu_n_plus"), "curve header missing");
    println!("PASS determinism: {} artifact bytes identical across repeated seeded runs", first.len());
}

// The Poisson solve backs the descent preconditioner on both grid kinds; a
// residual check on the 2D path keeps the rectangle branch covered by the
// acceptance binary as well.
#[test]
fn acceptance_poisson_2d_consistency() {
    let grid = GridSpec::rectangle([1.0, 1.5], [12, 9]).unwrap();
    let rhs: Vec<f64> = (0..grid.node_count()).map(|i| ((i * 31 % 17) as f64 - 8.0) / 8.0).collect();
    let sol = solve_poisson(grid, &rhs).unwrap();
    let back = DiscreteField::new(grid, sol).unwrap().neg_laplacian();
    for (a, b) in back.iter().zip(&rhs) {
        assert!((a - b).abs() <= 1e-8, "2d stencil inverse defect {:e}", (a - b).abs());
    }
}

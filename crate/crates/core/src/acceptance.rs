//! Acceptance checks, one per criterion, shared by the `acceptance` test
//! target and the `selftest` command.

use std::fmt;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    decay_report, decomposition_stability_experiment, estimate_k_sub,
    reconstruction_stability_experiment, DecompositionSetup, FunctionKind,
};
use crate::error::Result;
use crate::inverse::{
    cubic_ratio, cubic_series_constants, decay_certificate, even_inverse_spectral,
    min_evensymbol_dual, min_evensymbol_primal, modulus_certificate, one_norm_bound_c,
    pseudo_spline_gamma_norm2, pseudo_spline_gamma_norm2_exact, DecayCertificate, Kernel,
    KernelSource, DEFAULT_GUARD_THRESHOLD,
};
use crate::laurent::{Mask, NormKind, PeriodicSignal};
use crate::masks::{bspline_mask, catalog, dd_mask, pseudo_spline_mask, PseudoSplineParams};
use crate::transform::{decompose, reconstruct, DecimationMode};

pub const SAMPLES: usize = 1 << 14;
pub const INVERSE_TOL: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 0x6d74_6572;

/// Criteria that fail for a documented mathematical reason. Criterion 11
/// asks for `|γ_ℓ| ≤ K λ^{|ℓ|}` with `λ = 3 - 2√2` for the quadratic
/// spline, whose inverse decays like `3^{-ℓ}`; the bound requires a
/// positive even symbol, which `(3 + z)/4` is not.
pub const KNOWN_UNATTAINABLE: &[u32] = &[11];

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    /// Failed sub-checks, or a short summary when everything passed.
    pub notes: Vec<String>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {:>2} {}", self.id, self.title)?;
        if !self.notes.is_empty() {
            write!(f, ": {}", self.notes.join("; "))?;
        }
        Ok(())
    }
}

/// Collects sub-check outcomes for one criterion.
struct Checks {
    failures: Vec<String>,
    summary: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            failures: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, label: &str, measured: f64, expected: f64, tol: f64) {
        self.check((measured - expected).abs() <= tol, || {
            format!("{label} = {measured:.17e}, expected {expected:.17e} ± {tol:e}")
        });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    fn finish(self, id: u32, title: &'static str) -> CriterionResult {
        let passed = self.failures.is_empty();
        CriterionResult {
            id,
            title,
            passed,
            notes: if passed { self.summary } else { self.failures },
        }
    }

    fn from_error(id: u32, title: &'static str, e: impl fmt::Display) -> CriterionResult {
        CriterionResult {
            id,
            title,
            passed: false,
            notes: vec![format!("error: {e}")],
        }
    }
}

fn run(
    id: u32,
    title: &'static str,
    body: impl FnOnce(&mut Checks) -> Result<()>,
) -> CriterionResult {
    let mut checks = Checks::new();
    match body(&mut checks) {
        Ok(()) => checks.finish(id, title),
        Err(e) => Checks::from_error(id, title, e),
    }
}

fn spline(order: u32) -> Result<Mask<f64>> {
    Ok(bspline_mask(order)?.to_f64())
}

fn pseudo(n: u32, nu: u32) -> Result<Mask<f64>> {
    Ok(pseudo_spline_mask(PseudoSplineParams::new(n, nu)?).to_f64())
}

fn spectral(alpha: &Mask<f64>) -> Result<Kernel> {
    even_inverse_spectral(alpha, INVERSE_TOL, DEFAULT_GUARD_THRESHOLD)
}

fn kernel_sup_on_circle(g: &Kernel) -> Result<f64> {
    let m = g.as_mask();
    m.sup_norm_on_circle(SAMPLES.max(4 * m.len()).next_power_of_two())
}

pub fn criterion_1() -> CriterionResult {
    run(1, "quadratic even-inverse", |c| {
        let g = spectral(&spline(3)?)?;
        for k in 0..=30 {
            let expected = 4.0 / 3.0 * (-1.0f64 / 3.0).powi(k);
            c.close(&format!("gamma_{k}"), g.coeff(k as i64), expected, 1e-12);
        }
        c.close("|gamma|_1", g.norm_l1(), 2.0, 1e-9);
        c.close("|gamma|_inf", g.norm_linf(), 4.0 / 3.0, 1e-12);
        c.note(format!(
            "|gamma|_1 = {:.15}, {} coefficients",
            g.norm_l1(),
            g.len()
        ));
        Ok(())
    })
}

pub fn criterion_2() -> CriterionResult {
    run(2, "cubic even-inverse", |c| {
        let g = spectral(&spline(4)?)?;
        let r = cubic_ratio();
        for k in -30i64..=30 {
            let expected = std::f64::consts::SQRT_2 * (-r).powi(k.unsigned_abs() as i32);
            c.close(&format!("gamma_{k}"), g.coeff(k), expected, 1e-12);
        }
        c.close("|gamma|_1", g.norm_l1(), 2.0, 1e-9);
        c.close(
            "|gamma|_inf",
            g.norm_linf(),
            std::f64::consts::SQRT_2,
            1e-12,
        );
        let a2 = kernel_sup_on_circle(&g)?;
        c.close("|A_gamma|_2", a2, 2.0, 1e-9);
        c.note(format!("|A_gamma|_2 = {a2:.15}"));
        Ok(())
    })
}

pub fn criterion_3() -> CriterionResult {
    run(3, "series constants a_k, b_k", |c| {
        let (a, b) = cubic_series_constants(11, 80);
        let base = 3.0 * std::f64::consts::SQRT_2 / 4.0;
        let r = cubic_ratio();
        c.close("a_0", a[0], base, 1e-12);
        c.close("b_0", b[0], base * r, 1e-12);
        for k in 0..=10 {
            c.close(
                &format!("a_{} - (6b_{k} - a_{k})", k + 1),
                a[k + 1],
                6.0 * b[k] - a[k],
                1e-12,
            );
            if k >= 1 {
                c.close(
                    &format!("b_{k} - (6a_{k} - b_{})", k - 1),
                    b[k],
                    6.0 * a[k] - b[k - 1],
                    1e-12,
                );
            }
            c.close(
                &format!("a_{k} closed form"),
                a[k],
                base * r.powi(2 * k as i32),
                1e-12,
            );
            c.close(
                &format!("b_{k} closed form"),
                b[k],
                base * r.powi(2 * k as i32 + 1),
                1e-12,
            );
        }
        // the inverse assembled from the series equals the cubic kernel
        let g = spectral(&spline(4)?)?;
        for k in 0..=10i64 {
            c.close(
                &format!("gamma_{}", 2 * k),
                g.coeff(2 * k),
                4.0 / 3.0 * a[k as usize],
                1e-12,
            );
            c.close(
                &format!("gamma_{}", 2 * k + 1),
                g.coeff(2 * k + 1),
                -4.0 / 3.0 * b[k as usize],
                1e-12,
            );
        }
        c.note(format!("a_0 = {:.15}, b_0 = {:.15}", a[0], b[0]));
        Ok(())
    })
}

pub fn criterion_4() -> CriterionResult {
    run(4, "pseudo-spline even symbols and inverse norms", |c| {
        for (n, nu) in [
            (3, 0),
            (4, 0),
            (4, 1),
            (5, 1),
            (6, 1),
            (6, 2),
            (7, 2),
            (8, 3),
        ] {
            let p = PseudoSplineParams::new(n, nu)?;
            let ev = pseudo_spline_mask(p).even_part().to_f64();
            let sup = ev.sup_norm_on_circle(SAMPLES)?;
            c.close(&format!("({n},{nu}) max|a_ev|"), sup, 1.0, 1e-9);
            let sampled = 1.0 / ev.min_modulus_on_circle(SAMPLES)?;
            let closed = pseudo_spline_gamma_norm2(p);
            c.check((sampled - closed).abs() <= 1e-9 * closed, || {
                format!("({n},{nu}) 1/min|a_ev| = {sampled:.15} vs closed form {closed:.15}")
            });
            if p.is_interpolatory() {
                let g = spectral(&ev.upsample())?;
                let delta_err = g
                    .iter()
                    .map(|(l, v)| (v - if l == 0 { 1.0 } else { 0.0 }).abs())
                    .fold(0.0, f64::max)
                    .max((g.coeff(0) - 1.0).abs());
                c.check(delta_err <= 1e-12, || {
                    format!("({n},{nu}) gamma differs from delta by {delta_err:e}")
                });
                c.check(pseudo_spline_gamma_norm2_exact(p).is_one(), || {
                    format!("({n},{nu}) norm is not exactly 1")
                });
            }
        }
        c.note("8 parameter pairs");
        Ok(())
    })
}

pub fn criterion_5() -> CriterionResult {
    run(5, "minimum of the even symbol", |c| {
        for k in 2..=5 {
            for nu in 0..k {
                let ev = pseudo(2 * k, nu)?.even_part();
                let sampled = ev.min_modulus_on_circle(SAMPLES)?;
                c.close(
                    &format!("primal ({k},{nu})"),
                    sampled,
                    min_evensymbol_primal(k, nu)?,
                    1e-9,
                );
            }
        }
        for (k, nu) in [(1, 0), (2, 0), (2, 1), (3, 1)] {
            let ev = pseudo(2 * k + 1, nu)?.even_part();
            let sampled = ev.min_modulus_on_circle(SAMPLES)?;
            c.close(
                &format!("dual ({k},{nu})"),
                sampled,
                min_evensymbol_dual(k, nu)?,
                1e-9,
            );
        }
        c.note("14 primal and 4 dual cases");
        Ok(())
    })
}

fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> PeriodicSignal {
    PeriodicSignal::from_fn(n, |_| rng.gen_range(-1.0..=1.0))
}

/// Shared sweep behind criteria 6 and 7.
struct SweepOutcome {
    max_error_exact: f64,
    max_error_kernel: f64,
    max_error_wrong: f64,
    min_even_wrong: f64,
    max_even_exact: f64,
    runs: usize,
}

fn reconstruction_sweep(seed: u64) -> Result<SweepOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SweepOutcome {
        max_error_exact: 0.0,
        max_error_kernel: 0.0,
        max_error_wrong: 0.0,
        min_even_wrong: f64::INFINITY,
        max_even_exact: 0.0,
        runs: 0,
    };
    for family in catalog() {
        let alpha = family.mask()?.to_f64();
        let id = family.to_string();
        let kernel = DecimationMode::Kernel(spectral(&alpha)?);
        for n in [64usize, 256, 1024] {
            let c = random_signal(&mut rng, n);
            let max_levels = n.trailing_zeros() as usize - 1;
            for j in 1..=max_levels {
                let p = decompose(&c, &alpha, j, &DecimationMode::exact(), id.as_str())?;
                out.max_error_exact = out
                    .max_error_exact
                    .max(reconstruct(&p, &alpha)?.max_abs_diff(&c));
                out.max_even_exact = out.max_even_exact.max(p.max_even_detail());
                let p = decompose(&c, &alpha, j, &kernel, id.as_str())?;
                out.max_error_kernel = out
                    .max_error_kernel
                    .max(reconstruct(&p, &alpha)?.max_abs_diff(&c));
                out.runs += 2;
            }
            let wrong = Kernel::from_coeffs(
                -2,
                (0..5).map(|_| rng.gen_range(-0.5..=0.5)).collect(),
                0.0,
                KernelSource::Spectral,
            );
            let p = decompose(
                &c,
                &alpha,
                max_levels,
                &DecimationMode::Kernel(wrong),
                id.as_str(),
            )?;
            out.max_error_wrong = out
                .max_error_wrong
                .max(reconstruct(&p, &alpha)?.max_abs_diff(&c));
            out.min_even_wrong = out.min_even_wrong.min(p.max_even_detail());
        }
    }
    Ok(out)
}

pub fn criterion_6(seed: u64) -> CriterionResult {
    run(6, "perfect reconstruction", |c| {
        let s = reconstruction_sweep(seed)?;
        c.check(s.max_error_exact < 1e-10, || {
            format!("exact mode error {:e}", s.max_error_exact)
        });
        c.check(s.max_error_kernel < 1e-10, || {
            format!("kernel mode error {:e}", s.max_error_kernel)
        });
        c.check(s.max_error_wrong < 1e-10, || {
            format!("wrong kernel error {:e}", s.max_error_wrong)
        });
        c.check(s.min_even_wrong > 1e-4, || {
            format!("wrong kernel even details only {:e}", s.min_even_wrong)
        });
        c.note(format!(
            "{} decompositions, max error {:.1e}/{:.1e}, wrong kernel error {:.1e} with even details >= {:.1e}",
            s.runs,
            s.max_error_exact,
            s.max_error_kernel,
            s.max_error_wrong,
            s.min_even_wrong
        ));
        Ok(())
    })
}

pub fn criterion_7(seed: u64) -> CriterionResult {
    run(7, "even details vanish", |c| {
        let s = reconstruction_sweep(seed)?;
        c.check(s.max_even_exact < 1e-11, || {
            format!("max even detail {:e}", s.max_even_exact)
        });
        c.note(format!("max even detail {:.1e}", s.max_even_exact));
        Ok(())
    })
}

pub fn criterion_8() -> CriterionResult {
    run(8, "decay of differences and details", |c| {
        let sine = FunctionKind::Sine { freq: 1, amp: 1.0 };
        let masks = [
            ("quadratic", spline(3)?),
            ("cubic", spline(4)?),
            ("dd(4,1)", dd_mask(2)?.to_f64()),
            ("pseudo(6,1)", pseudo(6, 1)?),
        ];
        for (name, alpha) in &masks {
            let gamma = spectral(alpha)?;
            let report = decay_report(sine, 10, 2, alpha, &DecimationMode::exact(), &gamma)?;
            for v in report.violations() {
                c.check(false, || format!("{name}: {v}"));
            }
        }
        // interpolatory: d·2^ℓ bounded, and bounds do not depend on j
        let dd = &masks[2].1;
        let gamma = spectral(dd)?;
        let long = decay_report(sine, 10, 2, dd, &DecimationMode::exact(), &gamma)?;
        let short = decay_report(sine, 5, 2, dd, &DecimationMode::exact(), &gamma)?;
        let uniform = long.k * long.constants.k_alpha_gamma;
        let scaled = long
            .rows
            .iter()
            .filter_map(|r| r.detail.map(|d| d * (r.level as f64).exp2()))
            .fold(0.0, f64::max);
        c.check(scaled <= uniform, || {
            format!("dd: max |d|·2^l = {scaled:e} exceeds {uniform:e}")
        });
        for (a, b) in long.rows.iter().zip(&short.rows).skip(1) {
            c.check(a.bound_detail == b.bound_detail, || {
                format!("dd: detail bound at level {} changes with j", a.level)
            });
        }
        c.note(format!(
            "4 masks, j = 10; dd max |d|*2^l = {scaled:.4} <= {uniform:.4}"
        ));
        Ok(())
    })
}

pub fn criterion_9() -> CriterionResult {
    run(9, "one-norm bound C(k,nu)", |c| {
        for k in 2..=5 {
            for nu in 0..k {
                let g = spectral(&pseudo(2 * k, nu)?)?;
                let bound = one_norm_bound_c(k, nu)?.c;
                let l1 = g.norm_l1();
                c.check(l1 <= bound, || {
                    format!("({k},{nu}): |gamma|_1 = {l1} > C = {bound}")
                });
            }
        }
        c.check(one_norm_bound_c(2, 1)?.c == 1.0, || {
            "C(2,1) is not exactly 1".into()
        });
        let c20 = one_norm_bound_c(2, 0)?.c;
        c.close(
            "C(2,0)",
            c20,
            (3.0 * std::f64::consts::SQRT_2 + 4.0) / 2.0,
            1e-9,
        );
        let l1 = spectral(&pseudo(4, 0)?)?.norm_l1();
        c.check(l1 < c20 && (l1 - 2.0).abs() < 1e-9, || {
            format!("|gamma|_1 = {l1} for (2,0)")
        });
        c.note(format!("C(2,0) = {c20:.12}, |gamma|_1 = {l1:.12}"));
        Ok(())
    })
}

pub fn criterion_10(seed: u64) -> CriterionResult {
    run(10, "stability experiments", |c| {
        let masks = [
            ("quadratic", spline(3)?),
            ("cubic", spline(4)?),
            ("dd(4,1)", dd_mask(2)?.to_f64()),
            ("pseudo(6,1)", pseudo(6, 1)?),
        ];
        let (len, levels, trials) = (256usize, 5usize, 100usize);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (name, alpha) in &masks {
            let gamma = spectral(alpha)?;
            let mode = DecimationMode::exact();
            for norm in [NormKind::Two, NormKind::Inf] {
                let setup = DecompositionSetup {
                    len,
                    levels,
                    perturbation: 1e-3,
                    trials,
                    seed,
                    circle_samples: SAMPLES,
                };
                let r = decomposition_stability_experiment(alpha, &mode, &gamma, norm, setup)?;
                let bad = r.trials.iter().filter(|t| !t.holds).count();
                c.check(bad == 0, || {
                    format!("{name} p={norm}: {bad} decomposition violations")
                });
                c.check(r.zero_perturbation_change == 0.0, || {
                    format!("{name}: repeat decomposition differs")
                });
                let zero = DecompositionSetup {
                    perturbation: 0.0,
                    trials: 3,
                    ..setup
                };
                let z = decomposition_stability_experiment(alpha, &mode, &gamma, norm, zero)?;
                c.check(
                    z.trials.iter().all(|t| {
                        t.input_change == 0.0
                            && t.coarse_change == 0.0
                            && t.detail_changes.iter().all(|d| *d == 0.0)
                    }),
                    || format!("{name}: zero perturbation changed the pyramid"),
                );
            }
            let k_sub = estimate_k_sub(alpha, 12.max(levels)).k_sub;
            let p = decompose(&random_signal(&mut rng, len), alpha, levels, &mode, *name)?;
            let r = reconstruction_stability_experiment(alpha, &p, 1e-3, trials, seed, k_sub)?;
            let bad = r.trials.iter().filter(|t| !t.holds).count();
            c.check(bad == 0, || {
                format!("{name}: {bad} reconstruction violations")
            });
            let z = reconstruction_stability_experiment(alpha, &p, 0.0, 3, seed, k_sub)?;
            c.check(z.trials.iter().all(|t| t.output_change == 0.0), || {
                format!("{name}: zero perturbation changed the reconstruction")
            });
        }
        c.note(format!(
            "4 masks x (p=2, p=inf, reconstruction) x {trials} trials"
        ));
        Ok(())
    })
}

fn certificate_violations(cert: &DecayCertificate, g: &Kernel) -> Vec<i64> {
    g.iter()
        .filter(|(l, v)| v.abs() > cert.bound(*l) * (1.0 + 1e-12))
        .map(|(l, _)| l)
        .collect()
}

pub fn criterion_11() -> CriterionResult {
    run(11, "decay certificate", |c| {
        let r = cubic_ratio();
        let expected_k = f64::max(1.0, (1.0 + 2f64.sqrt()).powi(2) / 4.0) / 0.5;

        let cubic = spline(4)?;
        let cert = decay_certificate(&cubic, SAMPLES)?;
        let g = spectral(&cubic)?;
        c.close("cubic kappa", cert.kappa, 2.0, 1e-9);
        c.close("cubic lambda", cert.lambda, r, 1e-12);
        c.close("cubic K", cert.k, expected_k, 1e-9);
        let bad = certificate_violations(&cert, &g);
        c.check(bad.is_empty(), || {
            format!("cubic: |gamma_l| > K lambda^|l| at l = {bad:?}")
        });
        for k in 0..30i64 {
            if g.coeff(k + 1).abs() < 1e-3 {
                break;
            }
            let ratio = (g.coeff(k + 1) / g.coeff(k)).abs();
            c.close(
                &format!("cubic |gamma_{}/gamma_{k}|", k + 1),
                ratio,
                cert.lambda,
                1e-12,
            );
        }

        // The even symbol (3+z)/4 is complex on the circle, so the
        // positive-symbol certificate is refused; the constants are
        // evaluated from |α_ev| and tested as stated.
        let quadratic = spline(3)?;
        c.check(decay_certificate(&quadratic, SAMPLES).is_err(), || {
            "quadratic: positive-symbol certificate unexpectedly available".into()
        });
        let cert = modulus_certificate(&quadratic, SAMPLES)?;
        let g = spectral(&quadratic)?;
        c.close("quadratic kappa", cert.kappa, 2.0, 1e-9);
        c.close("quadratic lambda", cert.lambda, r, 1e-12);
        c.close("quadratic K", cert.k, expected_k, 1e-9);
        let bad = certificate_violations(&cert, &g);
        c.check(bad.is_empty(), || {
            let l = bad[0];
            format!(
                "quadratic: |gamma_l| > K lambda^|l| at {} indices starting l = {l} ({:.6} > {:.6}); true decay ratio is 1/3",
                bad.len(),
                g.coeff(l).abs(),
                cert.bound(l)
            )
        });
        c.note("cubic ratio equals lambda; quadratic bound holds");
        Ok(())
    })
}

/// All criteria in order.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(seed),
        criterion_7(seed),
        criterion_8(),
        criterion_9(),
        criterion_10(seed),
        criterion_11(),
    ]
}

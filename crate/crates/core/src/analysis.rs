//! Decay and stability measurements on MTER pyramids, with the bounds they
//! are compared against.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{MterError, Result};
use crate::inverse::Kernel;
use crate::laurent::{Mask, NormKind, PeriodicSignal};
use crate::transform::{
    decompose, decompose_level, reconstruct, threshold_details, DecimationMode, Pyramid,
};

/// Relative and absolute slack allowed when comparing a measurement with
/// its bound.
pub const BOUND_SLACK: f64 = 1e-12;

fn within(measured: f64, bound: f64) -> bool {
    measured <= bound * (1.0 + BOUND_SLACK) + BOUND_SLACK
}

/// 1-periodic C¹ test functions with a known `‖f′‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKind {
    /// `amp · sin(2π freq t)`.
    Sine {
        freq: u32,
        amp: f64,
    },
    /// `exp(κ (cos 2πt - 1))`, a smooth periodic bump.
    GaussianBump {
        kappa: f64,
    },
    /// `t²(1-t)²` on `[0, 1)`, repeated.
    Poly,
    Constant {
        value: f64,
    },
}

impl FunctionKind {
    pub fn eval(&self, t: f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        match *self {
            FunctionKind::Sine { freq, amp } => amp * (tau * freq as f64 * t).sin(),
            FunctionKind::GaussianBump { kappa } => (kappa * ((tau * t).cos() - 1.0)).exp(),
            FunctionKind::Poly => {
                let x = t - t.floor();
                (x * (1.0 - x)).powi(2)
            }
            FunctionKind::Constant { value } => value,
        }
    }

    /// `‖f′‖_∞` in closed form.
    pub fn derivative_sup(&self) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        match *self {
            FunctionKind::Sine { freq, amp } => tau * freq as f64 * amp.abs(),
            FunctionKind::GaussianBump { kappa } => {
                if kappa == 0.0 {
                    return 0.0;
                }
                // maximize sin θ · e^{κ cos θ}: κ cos²θ + cos θ - κ = 0
                let k = kappa.abs();
                let c = (-1.0 + (1.0 + 4.0 * k * k).sqrt()) / (2.0 * k);
                let c = if kappa > 0.0 { c } else { -c };
                tau * k * (1.0 - c * c).sqrt() * (kappa * (c - 1.0)).exp()
            }
            FunctionKind::Poly => 1.0 / (3.0 * 3f64.sqrt()),
            FunctionKind::Constant { .. } => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FunctionKind::Sine { .. } => "sine",
            FunctionKind::GaussianBump { .. } => "gaussian_bump",
            FunctionKind::Poly => "poly",
            FunctionKind::Constant { .. } => "constant",
        }
    }
}

impl FromStr for FunctionKind {
    type Err = MterError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" | "sin" => Ok(FunctionKind::Sine { freq: 1, amp: 1.0 }),
            "gaussian_bump" | "gaussian" | "bump" => Ok(FunctionKind::GaussianBump { kappa: 4.0 }),
            "poly" => Ok(FunctionKind::Poly),
            "constant" => Ok(FunctionKind::Constant { value: 1.0 }),
            other => Err(MterError::Parameter(format!(
                "{other:?} is not a 1-periodic test function (expected sine, gaussian_bump, poly or constant)"
            ))),
        }
    }
}

/// `f(k / 2^j)` for `k = 0 .. base·2^j - 1`.
pub fn sample_function(kind: FunctionKind, j: u32, base: usize) -> Result<PeriodicSignal> {
    if base < 2 {
        return Err(MterError::Parameter(format!(
            "base must be at least 2, got {base}"
        )));
    }
    if j > 24 {
        return Err(MterError::Parameter(format!("level {j} is too fine")));
    }
    let h = (-(j as f64)).exp2();
    PeriodicSignal::new((0..base << j).map(|k| kind.eval(k as f64 * h)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterConstants {
    /// `Σ |α_k| |k|`.
    pub k_alpha: f64,
    /// `2 Σ |γ_k| |k|`.
    pub k_gamma: f64,
    /// `K_γ ‖α‖₁ + K_α ‖γ‖₁`.
    pub k_alpha_gamma: f64,
    pub alpha_l1: f64,
    /// `‖γ‖₁` of the retained kernel plus its dropped mass.
    pub gamma_l1: f64,
}

pub fn filter_moment_constants(alpha: &Mask<f64>, gamma: &Kernel) -> FilterConstants {
    let k_alpha: f64 = alpha
        .iter()
        .map(|(k, a)| a.abs() * k.unsigned_abs() as f64)
        .sum();
    let k_gamma: f64 = 2.0
        * gamma
            .iter()
            .map(|(k, g)| g.abs() * k.unsigned_abs() as f64)
            .sum::<f64>();
    let alpha_l1 = alpha.norm_l1();
    let gamma_l1 = gamma.norm_l1() + gamma.dropped_mass();
    FilterConstants {
        k_alpha,
        k_gamma,
        k_alpha_gamma: k_gamma * alpha_l1 + k_alpha * gamma_l1,
        alpha_l1,
        gamma_l1,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub level: usize,
    /// `‖Δc^{(ℓ)}‖_∞`.
    pub delta_c: f64,
    /// `‖d^{(ℓ)}‖_∞`; absent at level 0.
    pub detail: Option<f64>,
    /// `K ‖γ‖₁^{j-ℓ} 2^{-ℓ}`.
    pub bound_delta: f64,
    /// `K_{α,γ} ‖Δc^{(ℓ)}‖_∞`.
    pub bound_detail_rowwise: Option<f64>,
    /// `K K_{α,γ} ‖γ‖₁^{j} (2‖γ‖₁)^{-ℓ}`.
    pub bound_detail: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub function: FunctionKind,
    pub levels: usize,
    pub base: usize,
    pub mode: String,
    /// `‖f′‖_∞`.
    #[serde(rename = "K")]
    pub k: f64,
    pub constants: FilterConstants,
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    /// Every inequality that fails, as readable lines.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !within(r.delta_c, r.bound_delta) {
                out.push(format!(
                    "level {}: |dc| {:e} > {:e}",
                    r.level, r.delta_c, r.bound_delta
                ));
            }
            if let (Some(d), Some(b)) = (r.detail, r.bound_detail_rowwise) {
                if !within(d, b) {
                    out.push(format!("level {}: |d| {d:e} > row bound {b:e}", r.level));
                }
            }
            if let (Some(d), Some(b)) = (r.detail, r.bound_detail) {
                if !within(d, b) {
                    out.push(format!(
                        "level {}: |d| {d:e} > a-priori bound {b:e}",
                        r.level
                    ));
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        let mut s =
            String::from("level,delta_c,detail,bound_delta,bound_detail_rowwise,bound_detail\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.16e},{},{:.16e},{},{}",
                r.level,
                r.delta_c,
                opt(r.detail),
                r.bound_delta,
                opt(r.bound_detail_rowwise),
                opt(r.bound_detail)
            );
        }
        s
    }
}

/// Samples `f` at level `j`, decomposes all the way down to `base` coarse
/// values and tabulates the measured norms against their bounds.
/// `gamma` supplies the constants; `mode` performs the decimation.
pub fn decay_report(
    function: FunctionKind,
    levels: usize,
    base: usize,
    alpha: &Mask<f64>,
    mode: &DecimationMode,
    gamma: &Kernel,
) -> Result<DecayReport> {
    if levels == 0 {
        return Err(MterError::Level { len: base, levels });
    }
    let fine = sample_function(function, levels as u32, base)?;
    let k = function.derivative_sup();
    let constants = filter_moment_constants(alpha, gamma);
    let g = constants.gamma_l1;

    // c[ℓ] and d[ℓ] indexed by level
    let mut coarse = vec![fine];
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (c, d) = decompose_level(coarse.last().unwrap(), alpha, mode)?;
        coarse.push(c);
        details.push(d);
    }
    coarse.reverse();
    details.reverse();

    let rows = (0..=levels)
        .map(|l| {
            let delta_c = coarse[l].difference().norm_inf();
            let bound_delta = k * g.powi((levels - l) as i32) * (-(l as f64)).exp2();
            let detail = l.checked_sub(1).map(|i| details[i].norm_inf());
            DecayRow {
                level: l,
                delta_c,
                detail,
                bound_delta,
                bound_detail_rowwise: detail.map(|_| constants.k_alpha_gamma * delta_c),
                bound_detail: detail.map(|_| constants.k_alpha_gamma * bound_delta),
            }
        })
        .collect();
    Ok(DecayReport {
        function,
        levels,
        base,
        mode: mode.name().to_string(),
        k,
        constants,
        rows,
    })
}

/// `‖S_α^J‖_∞` for `J = 0 .. max_power` and their maximum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdivisionNorms {
    pub per_power: Vec<f64>,
    pub k_sub: f64,
}

/// Iterates `α^{[J+1]}(z) = α(z) α^{[J]}(z²)`; `‖S^J‖_∞` is the largest
/// `ℓ₁` sum over a residue class of `α^{[J]}` modulo `2^J`.
pub fn estimate_k_sub(alpha: &Mask<f64>, max_power: usize) -> SubdivisionNorms {
    let mut per_power = vec![1.0];
    let mut iterated = Mask::delta();
    for power in 1..=max_power {
        iterated = alpha.convolve(&iterated.upsample());
        let modulus = 1i64 << power;
        let mut sums = vec![0.0; modulus as usize];
        for (k, c) in iterated.iter() {
            sums[k.rem_euclid(modulus) as usize] += c.abs();
        }
        per_power.push(sums.into_iter().fold(0.0, f64::max));
    }
    let k_sub = per_power.iter().copied().fold(0.0, f64::max);
    SubdivisionNorms { per_power, k_sub }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

fn noise(rng: &mut ChaCha8Rng, len: usize, size: f64) -> PeriodicSignal {
    PeriodicSignal::from_fn(len, |_| {
        if size > 0.0 {
            rng.gen_range(-size..=size)
        } else {
            0.0
        }
    })
}

/// Uniform values in `[-1, 1]` from a seeded generator.
pub fn random_signal(len: usize, seed: u64) -> PeriodicSignal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    noise(&mut rng, len, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionTrial {
    pub trial: usize,
    /// `‖c⁰ - c̃⁰‖_∞ + Σ ‖d - d̃‖_∞`.
    pub input_change: f64,
    pub output_change: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionStabilityReport {
    pub k_sub: f64,
    pub perturbation: f64,
    pub seed: u64,
    pub trials: Vec<ReconstructionTrial>,
    /// Output change when nothing is perturbed.
    pub zero_perturbation_change: f64,
}

impl ReconstructionStabilityReport {
    pub fn all_hold(&self) -> bool {
        self.trials.iter().all(|t| t.holds)
    }

    pub fn max_ratio(&self) -> f64 {
        self.trials
            .iter()
            .filter(|t| t.input_change > 0.0)
            .map(|t| t.output_change / t.input_change)
            .fold(0.0, f64::max)
    }
}

/// Perturbs every coarse and detail entry uniformly in `[-δ, δ]` and checks
/// `‖c - c̃‖_∞ ≤ K_sub (‖c⁰ - c̃⁰‖_∞ + Σ ‖d - d̃‖_∞)`.
pub fn reconstruction_stability_experiment(
    alpha: &Mask<f64>,
    p: &Pyramid,
    perturbation: f64,
    trials: usize,
    seed: u64,
    k_sub: f64,
) -> Result<ReconstructionStabilityReport> {
    if perturbation.is_nan() || perturbation < 0.0 {
        return Err(MterError::Parameter(format!(
            "perturbation must be nonnegative, got {perturbation}"
        )));
    }
    let base = reconstruct(p, alpha)?;
    let zero_perturbation_change = reconstruct(&p.clone(), alpha)?.max_abs_diff(&base);
    let trials = (0..trials)
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let coarse = p.coarse() + &noise(&mut rng, p.coarse().len(), perturbation);
            let details = p
                .details()
                .iter()
                .map(|d| d + &noise(&mut rng, d.len(), perturbation))
                .collect();
            let q = Pyramid::new(coarse, details, p.mask_id())?;
            let input_change = p.perturbation_size(&q)?;
            let output_change = reconstruct(&q, alpha)?.max_abs_diff(&base);
            let bound = k_sub * input_change;
            Ok(ReconstructionTrial {
                trial,
                input_change,
                output_change,
                bound,
                holds: within(output_change, bound),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReconstructionStabilityReport {
        k_sub,
        perturbation,
        seed,
        trials,
        zero_perturbation_change,
    })
}

/// Upper bounds for the operator norms in the decomposition estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNorms {
    pub norm: NormKind,
    /// `‖D_γ‖_p`: `‖γ‖₁` for `p = ∞`, `sup |γ(z)|` for `p = 2`.
    pub decimation: f64,
    pub subdivision: f64,
    /// `1 + ‖S_α‖_p ‖D_γ‖_p`.
    pub detail_map: f64,
}

/// For `p = 2`, `‖D_γ‖₂ ≤ 1/min|α_ev| + dropped mass` and
/// `‖S_α‖₂ = sup_z ((|α(z)|² + |α(-z)|²)/2)^{1/2}`; for `p = ∞`,
/// `‖D_γ‖_∞ ≤ ‖γ‖₁` and `‖S_α‖_∞ = max(Σ|α_{2k}|, Σ|α_{2k+1}|)`.
pub fn operator_norms(
    alpha: &Mask<f64>,
    gamma: &Kernel,
    norm: NormKind,
    samples: usize,
) -> Result<OperatorNorms> {
    let (decimation, subdivision) = match norm {
        NormKind::Inf => {
            let s = alpha.even_part().norm_l1().max(alpha.odd_part().norm_l1());
            (gamma.norm_l1() + gamma.dropped_mass(), s)
        }
        NormKind::Two => {
            let samples = samples.max(4 * alpha.len()).next_power_of_two();
            let inf = alpha.even_part().min_modulus_on_circle(samples)?;
            if inf == 0.0 {
                return Err(MterError::ZeroEvenPart);
            }
            let values = alpha.symbol_on_circle(samples)?;
            let half = samples / 2;
            let s2 = (0..samples)
                .map(|m| (values[m].norm_sqr() + values[(m + half) % samples].norm_sqr()) / 2.0)
                .fold(0.0, f64::max)
                .sqrt();
            (1.0 / inf + gamma.dropped_mass(), s2)
        }
    };
    Ok(OperatorNorms {
        norm,
        decimation,
        subdivision,
        detail_map: 1.0 + subdivision * decimation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionTrial {
    pub trial: usize,
    /// `‖c^{(j)} - c̃^{(j)}‖_p`.
    pub input_change: f64,
    pub coarse_change: f64,
    /// `‖D‖^j ‖c^{(j)} - c̃^{(j)}‖_p`.
    pub coarse_bound: f64,
    /// `‖d^{(ℓ)} - d̃^{(ℓ)}‖_p` for `ℓ = 1 .. j`.
    pub detail_changes: Vec<f64>,
    /// `‖I - SD‖ ‖D‖^{j-ℓ} ‖c^{(j)} - c̃^{(j)}‖_p`.
    pub detail_bounds: Vec<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionStabilityReport {
    pub norms: OperatorNorms,
    pub mode: String,
    pub len: usize,
    pub levels: usize,
    pub perturbation: f64,
    pub seed: u64,
    pub trials: Vec<DecompositionTrial>,
    /// Largest pyramid change for identical inputs.
    pub zero_perturbation_change: f64,
}

impl DecompositionStabilityReport {
    pub fn all_hold(&self) -> bool {
        self.trials.iter().all(|t| t.holds)
    }

    /// Largest measured `‖c⁰ - c̃⁰‖ / ‖c^{(j)} - c̃^{(j)}‖`.
    pub fn max_coarse_ratio(&self) -> f64 {
        self.trials
            .iter()
            .filter(|t| t.input_change > 0.0)
            .map(|t| t.coarse_change / t.input_change)
            .fold(0.0, f64::max)
    }
}

/// Shared settings of a decomposition stability run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionSetup {
    pub len: usize,
    pub levels: usize,
    pub perturbation: f64,
    pub trials: usize,
    pub seed: u64,
    pub circle_samples: usize,
}

/// Random `c` in `[-1, 1]^N` and `c̃ = c + noise`; both are decomposed and
/// the changes compared with the bounds of the decomposition estimates.
pub fn decomposition_stability_experiment(
    alpha: &Mask<f64>,
    mode: &DecimationMode,
    gamma: &Kernel,
    norm: NormKind,
    setup: DecompositionSetup,
) -> Result<DecompositionStabilityReport> {
    let norms = operator_norms(alpha, gamma, norm, setup.circle_samples)?;
    let j = setup.levels;
    let mut zero_perturbation_change: f64 = 0.0;
    let trials = (0..setup.trials)
        .map(|trial| {
            let mut rng = trial_rng(setup.seed, trial);
            let c = noise(&mut rng, setup.len, 1.0);
            let tilde = &c + &noise(&mut rng, setup.len, setup.perturbation);
            let p = decompose(&c, alpha, j, mode, "")?;
            let q = decompose(&tilde, alpha, j, mode, "")?;
            let again = decompose(&c, alpha, j, mode, "")?;
            zero_perturbation_change = zero_perturbation_change.max(p.perturbation_size(&again)?);

            let input_change = (&c - &tilde).norm(norm);
            let coarse_change = (p.coarse() - q.coarse()).norm(norm);
            let coarse_bound = norms.decimation.powi(j as i32) * input_change;
            let detail_changes: Vec<f64> = p
                .details()
                .iter()
                .zip(q.details())
                .map(|(a, b)| (a - b).norm(norm))
                .collect();
            let detail_bounds: Vec<f64> = (1..=j)
                .map(|l| norms.detail_map * norms.decimation.powi((j - l) as i32) * input_change)
                .collect();
            let holds = within(coarse_change, coarse_bound)
                && detail_changes
                    .iter()
                    .zip(&detail_bounds)
                    .all(|(m, b)| within(*m, *b));
            Ok(DecompositionTrial {
                trial,
                input_change,
                coarse_change,
                coarse_bound,
                detail_changes,
                detail_bounds,
                holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionStabilityReport {
        norms,
        mode: mode.name().to_string(),
        len: setup.len,
        levels: j,
        perturbation: setup.perturbation,
        seed: setup.seed,
        trials,
        zero_perturbation_change,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionRow {
    pub eps: f64,
    pub kept: usize,
    pub total: usize,
    pub kept_fraction: f64,
    /// Change of the reconstruction caused by thresholding.
    pub reconstruction_error: f64,
    /// Distance of the thresholded reconstruction from the input signal.
    pub signal_error: f64,
    /// `K_sub Σ_ℓ ‖d^{(ℓ)} - d_ε^{(ℓ)}‖_∞`.
    pub stability_bound: f64,
    pub holds: bool,
}

pub fn compression_table_csv(rows: &[CompressionRow]) -> String {
    let mut s = String::from(
        "eps,kept,total,kept_fraction,reconstruction_error,signal_error,stability_bound\n",
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:e},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.eps,
            r.kept,
            r.total,
            r.kept_fraction,
            r.reconstruction_error,
            r.signal_error,
            r.stability_bound
        );
    }
    s
}

/// Thresholds the pyramid of `signal` at each `ε` and measures the damage.
pub fn compression_experiment(
    signal: &PeriodicSignal,
    alpha: &Mask<f64>,
    levels: usize,
    mode: &DecimationMode,
    eps_grid: &[f64],
    k_sub: f64,
) -> Result<Vec<CompressionRow>> {
    let p = decompose(signal, alpha, levels, mode, "")?;
    let full = reconstruct(&p, alpha)?;
    eps_grid
        .iter()
        .map(|&eps| {
            let t = threshold_details(&p, eps)?;
            let approx = reconstruct(&t.pyramid, alpha)?;
            let reconstruction_error = approx.max_abs_diff(&full);
            let stability_bound = k_sub * p.perturbation_size(&t.pyramid)?;
            Ok(CompressionRow {
                eps,
                kept: t.kept,
                total: t.total,
                kept_fraction: t.kept_fraction(),
                reconstruction_error,
                signal_error: approx.max_abs_diff(signal),
                stability_bound,
                holds: within(reconstruction_error, stability_bound),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse::{
        even_inverse_closed_cubic, even_inverse_spectral, KernelSource, DEFAULT_GUARD_THRESHOLD,
    };
    use crate::masks::{bspline_mask, dd_mask};
    use crate::transform::subdivide_times;

    fn cubic() -> Mask<f64> {
        bspline_mask(4).unwrap().to_f64()
    }

    fn cubic_gamma() -> Kernel {
        even_inverse_spectral(&cubic(), 1e-12, DEFAULT_GUARD_THRESHOLD).unwrap()
    }

    #[test]
    fn sampling() {
        let s = sample_function(FunctionKind::Sine { freq: 1, amp: 1.0 }, 3, 2).unwrap();
        assert_eq!(s.len(), 16);
        assert!((s.values()[2] - 1.0).abs() < 1e-15);
        assert!((s.values()[10] - 1.0).abs() < 1e-15);
        assert!(sample_function(FunctionKind::Poly, 3, 1).is_err());
        assert!("ramp".parse::<FunctionKind>().is_err());
        let c = sample_function(FunctionKind::Constant { value: 3.0 }, 5, 2).unwrap();
        assert_eq!(c.difference().norm_inf(), 0.0);
    }

    #[test]
    fn derivative_bounds_are_sharp() {
        for kind in ["sine", "gaussian_bump", "poly"] {
            let f: FunctionKind = kind.parse().unwrap();
            let s = sample_function(f, 14, 2).unwrap();
            let measured = s.difference().norm_inf() * (1 << 14) as f64;
            let sup = f.derivative_sup();
            assert!(measured <= sup, "{kind}");
            assert!(measured > sup * 0.999, "{kind}: {measured} vs {sup}");
        }
        let j = 6;
        let s = sample_function("sine".parse().unwrap(), j, 2).unwrap();
        assert!(s.difference().norm_inf() <= 2.0 * std::f64::consts::PI * (-(j as f64)).exp2());
    }

    #[test]
    fn moment_constants() {
        let quad = bspline_mask(3).unwrap().to_f64();
        let g = Kernel::identity(KernelSource::Spectral);
        let c = filter_moment_constants(&quad, &g);
        assert!((c.k_alpha - 1.5).abs() < 1e-15);
        assert_eq!(c.k_gamma, 0.0);

        let dd = dd_mask(2).unwrap().to_f64();
        let c = filter_moment_constants(&dd, &g);
        assert_eq!(c.k_alpha_gamma, c.k_alpha);

        let r = crate::inverse::cubic_ratio();
        let expected = 4.0 * std::f64::consts::SQRT_2 * r / (1.0 - r).powi(2);
        let c = filter_moment_constants(&cubic(), &even_inverse_closed_cubic(60));
        assert!((c.k_gamma - expected).abs() < 1e-12);
    }

    #[test]
    fn decay_report_bounds_hold() {
        let f = FunctionKind::Sine { freq: 1, amp: 1.0 };
        let r = decay_report(f, 8, 2, &cubic(), &DecimationMode::exact(), &cubic_gamma()).unwrap();
        assert_eq!(r.rows.len(), 9);
        assert!(r.violations().is_empty(), "{:?}", r.violations());
        assert!(r.rows[0].detail.is_none());
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 10);
    }

    #[test]
    fn constant_signal_report() {
        let f = FunctionKind::Constant { value: 1.0 };
        let r = decay_report(f, 5, 2, &cubic(), &DecimationMode::exact(), &cubic_gamma()).unwrap();
        for row in &r.rows {
            assert!(row.delta_c < 1e-13);
            assert!(row.bound_delta >= 0.0);
        }
    }

    #[test]
    fn subdivision_norms() {
        let n = estimate_k_sub(&cubic(), 6);
        // positive masks: every power has norm 1
        assert!(n.per_power.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let n = estimate_k_sub(&dd_mask(2).unwrap().to_f64(), 8);
        assert!(n.per_power[1] == 1.25);
        assert!(n.k_sub >= 1.25 && n.k_sub < 3.0);
    }

    #[test]
    fn reconstruction_stability() {
        let alpha = cubic();
        let c = PeriodicSignal::from_fn(64, |k| (k as f64 * 0.3).sin());
        let p = decompose(&c, &alpha, 4, &DecimationMode::exact(), "c").unwrap();
        let k = estimate_k_sub(&alpha, 12).k_sub;
        let r = reconstruction_stability_experiment(&alpha, &p, 1e-3, 20, 5, k).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.zero_perturbation_change, 0.0);
        let z = reconstruction_stability_experiment(&alpha, &p, 0.0, 3, 5, k).unwrap();
        assert!(z.trials.iter().all(|t| t.output_change == 0.0));
        let again = reconstruction_stability_experiment(&alpha, &p, 1e-3, 20, 5, k).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn top_detail_perturbation_passes_through() {
        let alpha = cubic();
        let c = PeriodicSignal::from_fn(32, |k| (k as f64).cos());
        let p = decompose(&c, &alpha, 3, &DecimationMode::exact(), "c").unwrap();
        let mut details = p.details().to_vec();
        let mut top = details[2].values().to_vec();
        top[5] += 1e-3;
        details[2] = PeriodicSignal::new(top).unwrap();
        let q = p.with_details(details).unwrap();
        let diff = reconstruct(&q, &alpha)
            .unwrap()
            .max_abs_diff(&reconstruct(&p, &alpha).unwrap());
        assert!((diff - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn operator_norm_values() {
        let n = operator_norms(
            &cubic(),
            &even_inverse_closed_cubic(60),
            NormKind::Two,
            1 << 12,
        )
        .unwrap();
        assert!((n.decimation - 2.0).abs() < 1e-12);
        assert!((n.subdivision - 2f64.sqrt()).abs() < 1e-12);
        let n = operator_norms(
            &cubic(),
            &even_inverse_closed_cubic(60),
            NormKind::Inf,
            1 << 12,
        )
        .unwrap();
        assert!((n.decimation - 2.0).abs() < 1e-12);
        assert_eq!(n.subdivision, 1.0);
    }

    #[test]
    fn decomposition_stability() {
        let setup = DecompositionSetup {
            len: 128,
            levels: 4,
            perturbation: 1e-3,
            trials: 10,
            seed: 11,
            circle_samples: 1 << 12,
        };
        for norm in [NormKind::Two, NormKind::Inf] {
            let r = decomposition_stability_experiment(
                &cubic(),
                &DecimationMode::exact(),
                &cubic_gamma(),
                norm,
                setup,
            )
            .unwrap();
            assert!(r.all_hold());
            assert_eq!(r.zero_perturbation_change, 0.0);
        }
        let dd = dd_mask(2).unwrap().to_f64();
        let id = Kernel::identity(KernelSource::Spectral);
        let r = decomposition_stability_experiment(
            &dd,
            &DecimationMode::exact(),
            &id,
            NormKind::Inf,
            setup,
        )
        .unwrap();
        assert!(r.max_coarse_ratio() <= 1.0);
    }

    #[test]
    fn compression() {
        let alpha = cubic();
        let s = sample_function(FunctionKind::Sine { freq: 1, amp: 1.0 }, 8, 2).unwrap();
        let k = estimate_k_sub(&alpha, 12).k_sub;
        let rows = compression_experiment(
            &s,
            &alpha,
            6,
            &DecimationMode::exact(),
            &[0.0, 1e-6, 1e-3, f64::INFINITY],
            k,
        )
        .unwrap();
        assert_eq!(rows[0].reconstruction_error, 0.0);
        assert!(rows.iter().all(|r| r.holds));
        assert!(rows[1].reconstruction_error <= k * 6.0 * 1e-6);
        assert_eq!(rows[3].kept, 0);
        let p = decompose(&s, &alpha, 6, &DecimationMode::exact(), "").unwrap();
        let pure = subdivide_times(&alpha, p.coarse(), 6);
        assert!(rows[3].signal_error == pure.max_abs_diff(&s));
        assert_eq!(compression_table_csv(&rows).lines().count(), 5);
    }
}

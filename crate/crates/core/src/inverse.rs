//! Even-inverse masks `γ = 1/α_ev` and the constants that describe them.
//!
//! Three routes produce a [`Kernel`]: closed forms for the quadratic and
//! cubic B-splines, and a general spectral inversion that samples `1/α_ev`
//! at roots of unity and returns the stabilized, truncated coefficients.
//! The module also carries the norm and decay formulas for pseudo-spline
//! inverses, which the tests check against circle sampling.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{MterError, Result};
use crate::laurent::{root_of_unity, symbol_at_roots, Coefficient, Mask};
use crate::masks::{bspline_mask, generalized_binomial, ratio, PseudoSplineParams};

/// Modulus below which a sampled even symbol counts as vanishing.
pub const DEFAULT_GUARD_THRESHOLD: f64 = 1e-9;

/// Largest transform size tried by [`even_inverse_spectral`].
pub const MAX_SPECTRAL_SIZE: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSource {
    ClosedQuadratic,
    ClosedCubic,
    Spectral,
}

/// A truncated even-inverse.
///
/// `dropped_mass` bounds `Σ |γ_ℓ|` over the omitted coefficients and never
/// exceeds `tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    offset: i64,
    coeffs: Vec<f64>,
    tol: f64,
    dropped_mass: f64,
    source: KernelSource,
}

impl Kernel {
    /// Wraps raw coefficients, e.g. a deliberately wrong decimation mask.
    pub fn from_coeffs(offset: i64, coeffs: Vec<f64>, tol: f64, source: KernelSource) -> Self {
        Kernel {
            offset,
            coeffs,
            tol,
            dropped_mass: 0.0,
            source,
        }
    }

    /// γ = δ₀, the inverse of an interpolatory even part.
    pub fn identity(source: KernelSource) -> Self {
        Kernel::from_coeffs(0, vec![1.0], 0.0, source)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    pub fn source(&self) -> KernelSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `γ_ℓ`, zero outside the retained window.
    pub fn coeff(&self, l: i64) -> f64 {
        let i = l - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[i as usize]
        }
    }

    /// `(ℓ, γ_ℓ)` over the retained window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.offset + i as i64, *c))
    }

    pub fn as_mask(&self) -> Mask<f64> {
        Mask::new(self.offset, self.coeffs.clone())
    }

    pub fn norm_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn norm_linf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Copy with `delta` added to `γ_ℓ` (window extended if needed).
    pub fn perturbed(&self, l: i64, delta: f64) -> Self {
        let mut mask = self.as_mask().add(&Mask::monomial(l, delta));
        if mask.is_zero() {
            mask = Mask::monomial(0, 0.0);
        }
        Kernel {
            offset: mask.offset(),
            coeffs: mask.coeffs().to_vec(),
            ..self.clone()
        }
    }
}

/// Outcome of sampling `|α_ev|` on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenReversibility {
    pub reversible: bool,
    pub min_modulus: f64,
    /// Sample point where the minimum is attained.
    pub witness: Complex64,
}

/// Samples `α_ev` on the circle and compares its smallest modulus with the
/// guard threshold.
pub fn check_even_reversible<T: Coefficient>(
    alpha: &Mask<T>,
    samples: usize,
    guard: f64,
) -> Result<EvenReversibility> {
    if alpha.is_zero() {
        return Err(MterError::ZeroMask);
    }
    let ev = alpha.even_part();
    if ev.is_zero() {
        return Err(MterError::ZeroEvenPart);
    }
    let (min_modulus, witness) =
        ev.min_modulus_with_witness(samples.max(4 * ev.len()).next_power_of_two())?;
    Ok(EvenReversibility {
        reversible: min_modulus > guard,
        min_modulus,
        witness,
    })
}

/// `γ_k = (4/3)(-1/3)^k`, `k = 0 .. count-1`: the inverse of `(3+z)/4`.
pub fn even_inverse_closed_quadratic(count: usize) -> Kernel {
    assert!(count >= 1, "need at least one coefficient");
    let coeffs: Vec<f64> = (0..count)
        .map(|k| 4.0 / 3.0 * (-1.0f64 / 3.0).powi(k as i32))
        .collect();
    // Σ_{k≥count} (4/3)(1/3)^k
    let tail = 4.0 / 3.0 * (1.0f64 / 3.0).powi(count as i32) * 1.5;
    Kernel {
        offset: 0,
        coeffs,
        tol: tail,
        dropped_mass: tail,
        source: KernelSource::ClosedQuadratic,
    }
}

/// `3 - 2√2`, the decay ratio of the cubic even-inverse.
pub fn cubic_ratio() -> f64 {
    3.0 - 2.0 * std::f64::consts::SQRT_2
}

/// `γ_k = √2 (-(3-2√2))^{|k|}` for `|k| ≤ halfwidth`: the inverse of
/// `(z⁻¹ + 6 + z)/8`.
pub fn even_inverse_closed_cubic(halfwidth: usize) -> Kernel {
    let r = cubic_ratio();
    let h = halfwidth as i64;
    let coeffs: Vec<f64> = (-h..=h)
        .map(|k| std::f64::consts::SQRT_2 * (-r).powi(k.unsigned_abs() as i32))
        .collect();
    let tail = 2.0 * std::f64::consts::SQRT_2 * r.powi(halfwidth as i32 + 1) / (1.0 - r);
    Kernel {
        offset: -h,
        coeffs,
        tol: tail,
        dropped_mass: tail,
        source: KernelSource::ClosedCubic,
    }
}

/// Series sums
///
/// ```text
/// a_k = Σ_n C(2(n+k), n) 6^{-2(n+k)},   b_k = Σ_n C(2(n+k)+1, n) 6^{-2(n+k)-1}
/// ```
///
/// for `k = 0 ..= kmax`, each truncated after `nterms` summands. The cubic
/// even-inverse is `(4/3)[a_0 + Σ a_k (z^{2k}+z^{-2k}) - Σ b_k (z^{2k+1}+z^{-2k-1})]`.
pub fn cubic_series_constants(kmax: usize, nterms: usize) -> (Vec<f64>, Vec<f64>) {
    let a = (0..=kmax).map(|k| binomial_series(2 * k, nterms)).collect();
    let b = (0..=kmax)
        .map(|k| binomial_series(2 * k + 1, nterms))
        .collect();
    (a, b)
}

/// `Σ_{n<nterms} C(m+2n, n) 6^{-(m+2n)}` with `m = 2k + parity`. Terms are
/// built by their ratio so no factorial ever overflows.
fn binomial_series(m: usize, nterms: usize) -> f64 {
    let mut term = 6f64.powi(-(m as i32));
    let mut sum = 0.0;
    for n in 0..nterms {
        sum += term;
        // C(m+2n+2, n+1) / C(m+2n, n) = (m+2n+2)(m+2n+1) / ((n+1)(m+n+1))
        let top = (m + 2 * n + 2) as f64 * (m + 2 * n + 1) as f64;
        let bottom = (n + 1) as f64 * (m + n + 1) as f64;
        term *= top / bottom / 36.0;
    }
    sum
}

/// Recognizes the centered quadratic and cubic B-spline masks and returns
/// their closed-form inverse, truncated so that the dropped tail is at most
/// `tol`.
pub fn even_inverse_closed<T: Coefficient>(alpha: &Mask<T>, tol: f64) -> Result<Kernel> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(MterError::Parameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let alpha = alpha.to_f64();
    if alpha == bspline_mask(3)?.to_f64() {
        let mut count = 1;
        while 2.0 * (1.0f64 / 3.0).powi(count as i32) > tol {
            count += 1;
        }
        Ok(even_inverse_closed_quadratic(count))
    } else if alpha == bspline_mask(4)?.to_f64() {
        let r = cubic_ratio();
        let mut h = 0;
        while 2.0 * std::f64::consts::SQRT_2 * r.powi(h as i32 + 1) / (1.0 - r) > tol {
            h += 1;
        }
        Ok(even_inverse_closed_cubic(h))
    } else {
        Err(MterError::Parameter(
            "closed-form inverse exists only for the centered quadratic and cubic B-spline masks"
                .into(),
        ))
    }
}

/// General even-inverse by sampling `1/α_ev` at `N`-th roots of unity.
///
/// The inverse DFT of the samples is the periodization of `γ`. `N` doubles
/// until the periodized coefficients stop moving (change `< tol/4`) and the
/// coefficients half a period away from the peak are below `tol/4`. The
/// result is then trimmed from both ends, keeping the residual
/// `‖γ ∗ α_ev - δ₀‖₁` within `tol`.
pub fn even_inverse_spectral<T: Coefficient>(
    alpha: &Mask<T>,
    tol: f64,
    guard: f64,
) -> Result<Kernel> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(MterError::Parameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if alpha.is_zero() {
        return Err(MterError::ZeroMask);
    }
    let ev = alpha.even_part().to_f64();
    if ev.is_zero() {
        return Err(MterError::ZeroEvenPart);
    }
    if ev.offset() == 0 && ev.coeffs() == [1.0] {
        return Ok(Kernel::identity(KernelSource::Spectral));
    }
    let budget = tol / (2.0 * ev.norm_l1());
    let mut planner = FftPlanner::<f64>::new();
    let mut size = (8 * ev.len()).next_power_of_two().max(64);
    let mut previous: Option<Window> = None;

    while size <= MAX_SPECTRAL_SIZE {
        // symbol_at_roots gives α_ev(ω^m); the reciprocal, transformed back
        // with the forward DFT, yields Σ_m γ(ω^m) ω^{-mℓ} = N · periodized γ_ℓ.
        let values = symbol_at_roots(&ev, size);
        let (min_idx, min_mod) =
            values
                .iter()
                .map(|v| v.norm())
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |b, (i, m)| if m < b.1 { (i, m) } else { b },
                );
        if min_mod <= guard {
            return Err(MterError::NotEvenReversible {
                at: root_of_unity(min_idx, size),
                modulus: min_mod,
            });
        }
        let mut buf: Vec<Complex64> = values.iter().map(|v| v.inv()).collect();
        planner.plan_fft_forward(size).process(&mut buf);
        let periodized: Vec<f64> = buf.iter().map(|v| v.re / size as f64).collect();

        let window = Window::centered(&periodized);
        let change = previous
            .as_ref()
            .map(|prev| prev.max_change(&window))
            .unwrap_or(f64::INFINITY);
        let edge = window.edge_magnitude();
        if change < tol / 4.0 && edge < tol / 4.0 {
            let (offset, coeffs, dropped) = if ev.is_symmetric() && window.center == 0 {
                window.trimmed_symmetric(budget)
            } else {
                window.trimmed(budget)
            };
            let kernel = Kernel {
                offset,
                coeffs,
                tol,
                dropped_mass: dropped + change,
                source: KernelSource::Spectral,
            };
            if inverse_residual_l1(&ev, &kernel) <= tol {
                return Ok(kernel);
            }
        }
        previous = Some(window);
        size *= 2;
    }
    Err(MterError::DecayTooSlow {
        tol,
        max_size: MAX_SPECTRAL_SIZE,
    })
}

/// Periodized coefficients laid out over one period centered on the
/// largest one: indices `center - N/2 + 1 ..= center + N/2`.
struct Window {
    start: i64,
    center: i64,
    values: Vec<f64>,
}

impl Window {
    fn centered(periodized: &[f64]) -> Self {
        let n = periodized.len() as i64;
        let peak = periodized
            .iter()
            .enumerate()
            .fold((0usize, -1.0f64), |b, (i, v)| {
                if v.abs() > b.1 {
                    (i, v.abs())
                } else {
                    b
                }
            })
            .0 as i64;
        let center = if peak > n / 2 { peak - n } else { peak };
        let start = center - n / 2 + 1;
        let values = (start..start + n)
            .map(|l| periodized[l.rem_euclid(n) as usize])
            .collect();
        Window {
            start,
            center,
            values,
        }
    }

    fn get(&self, l: i64) -> Option<f64> {
        let i = l - self.start;
        (i >= 0 && (i as usize) < self.values.len()).then(|| self.values[i as usize])
    }

    fn max_change(&self, newer: &Window) -> f64 {
        (self.start..self.start + self.values.len() as i64)
            .map(|l| match newer.get(l) {
                Some(v) => (v - self.get(l).unwrap()).abs(),
                None => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    fn edge_magnitude(&self) -> f64 {
        let quarter = self.values.len() as i64 / 4;
        (self.start..self.start + self.values.len() as i64)
            .filter(|l| (l - self.center).abs() >= quarter)
            .map(|l| self.get(l).unwrap().abs())
            .fold(0.0, f64::max)
    }

    /// Drops the smaller end coefficient while the running dropped mass
    /// stays within `budget`.
    fn trimmed(&self, budget: f64) -> (i64, Vec<f64>, f64) {
        let mut lo = 0usize;
        let mut hi = self.values.len() - 1;
        let mut dropped = 0.0;
        while lo < hi {
            let (candidate, take_lo) = if self.values[lo].abs() <= self.values[hi].abs() {
                (self.values[lo].abs(), true)
            } else {
                (self.values[hi].abs(), false)
            };
            if dropped + candidate > budget {
                break;
            }
            dropped += candidate;
            if take_lo {
                lo += 1;
            } else {
                hi -= 1;
            }
        }
        (
            self.start + lo as i64,
            self.values[lo..=hi].to_vec(),
            dropped,
        )
    }

    /// Symmetric variant for a symmetric even part: pairs `±ℓ` are averaged
    /// and dropped together, so the kernel stays centered at 0.
    fn trimmed_symmetric(&self, budget: f64) -> (i64, Vec<f64>, f64) {
        let half = self.values.len() as i64 / 2 - 1;
        let pair = |l: i64| 0.5 * (self.get(l).unwrap() + self.get(-l).unwrap());
        let mut dropped = self.get(half + 1).map_or(0.0, f64::abs);
        let mut h = half;
        while h > 0 && dropped + 2.0 * pair(h).abs() <= budget {
            dropped += 2.0 * pair(h).abs();
            h -= 1;
        }
        let coeffs = (-h..=h).map(|l| pair(l.abs())).collect();
        (-h, coeffs, dropped)
    }
}

/// `‖γ ∗ α_ev - δ₀‖₁` for an already extracted even part.
fn inverse_residual_l1(ev: &Mask<f64>, kernel: &Kernel) -> f64 {
    let product = kernel.as_mask().convolve(ev);
    product.add(&Mask::monomial(0, -1.0)).norm_l1()
}

/// `max_z |α_ev(z) γ(z) - 1|` over sampled roots of unity.
pub fn verify_inverse<T: Coefficient>(alpha: &Mask<T>, gamma: &Kernel, samples: usize) -> f64 {
    let ev = alpha.even_part().to_f64();
    let gm = gamma.as_mask();
    let size = samples.max(4 * ev.len().max(gm.len())).next_power_of_two();
    let a = symbol_at_roots(&ev, size);
    let g = symbol_at_roots(&gm, size);
    a.iter()
        .zip(&g)
        .map(|(x, y)| (x * y - 1.0).norm())
        .fold(0.0, f64::max)
}

/// Exponential decay bound `|γ_ℓ| ≤ K λ^{|ℓ|}` for the inverse of a banded,
/// positive symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub kappa: f64,
    /// Bandwidth `s` of the even part.
    pub bandwidth: usize,
    pub q: f64,
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub sup_modulus: f64,
    pub inf_modulus: f64,
}

impl DecayCertificate {
    /// `κ = sup/inf`, `q = (√κ-1)/(√κ+1)`, `λ = q^{1/s}`,
    /// `K = max{1, (1+√κ)²/(2κ)} / inf`.
    pub fn from_extremes(sup_modulus: f64, inf_modulus: f64, bandwidth: usize) -> Self {
        let kappa = sup_modulus / inf_modulus;
        let root = kappa.sqrt();
        let q = ((root - 1.0) / (root + 1.0)).max(0.0);
        let lambda = if bandwidth == 0 || q == 0.0 {
            0.0
        } else {
            q.powf(1.0 / bandwidth as f64)
        };
        // κ = 1 means a constant symbol and γ = δ₀ / inf; the general
        // factor would double that.
        let k = if kappa == 1.0 {
            1.0 / inf_modulus
        } else {
            f64::max(1.0, (1.0 + root).powi(2) / (2.0 * kappa)) / inf_modulus
        };
        DecayCertificate {
            kappa,
            bandwidth,
            q,
            lambda,
            k,
            sup_modulus,
            inf_modulus,
        }
    }

    /// `K λ^{|ℓ|}` (with `0^0 = 1`).
    pub fn bound(&self, l: i64) -> f64 {
        if l == 0 {
            self.k
        } else {
            self.k * self.lambda.powi(l.unsigned_abs() as i32)
        }
    }

    /// Every retained coefficient satisfies `|γ_ℓ| ≤ K λ^{|ℓ|}` (with a
    /// relative rounding slack of `slack`).
    pub fn holds_for(&self, kernel: &Kernel, slack: f64) -> bool {
        kernel
            .iter()
            .all(|(l, c)| c.abs() <= self.bound(l) * (1.0 + slack) + slack)
    }
}

/// Decay certificate for `γ = 1/α_ev`. Requires `α_ev` to be symmetric
/// (real on the circle) and strictly positive at every sample.
pub fn decay_certificate<T: Coefficient>(
    alpha: &Mask<T>,
    samples: usize,
) -> Result<DecayCertificate> {
    let ev = alpha.even_part().to_f64();
    if ev.is_zero() {
        return Err(MterError::ZeroEvenPart);
    }
    if !ev.is_symmetric() {
        return Err(MterError::CertificateUnavailable(
            "even symbol is not real-valued on the unit circle".into(),
        ));
    }
    let values = ev.symbol_on_circle(samples)?;
    let min_re = values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    if min_re <= 0.0 {
        return Err(MterError::CertificateUnavailable(format!(
            "even symbol is not positive on the unit circle (minimum {min_re:e})"
        )));
    }
    let max_re = values.iter().map(|v| v.re).fold(0.0, f64::max);
    Ok(DecayCertificate::from_extremes(
        max_re,
        min_re,
        ev.bandwidth(),
    ))
}

/// The same constants computed from the extremes of `|α_ev|` with no
/// positivity check. For non-positive symbols these numbers carry no
/// guarantee; they exist so the bound can be tested where its hypothesis
/// fails.
pub fn modulus_certificate<T: Coefficient>(
    alpha: &Mask<T>,
    samples: usize,
) -> Result<DecayCertificate> {
    let ev = alpha.even_part().to_f64();
    if ev.is_zero() {
        return Err(MterError::ZeroEvenPart);
    }
    let sup = ev.sup_norm_on_circle(samples)?;
    let inf = ev.min_modulus_on_circle(samples)?;
    Ok(DecayCertificate::from_extremes(sup, inf, ev.bandwidth()))
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as u32)
    } else {
        BigRational::from_integer(BigInt::one() << (-e) as u32).recip()
    }
}

/// `Σ_{j=0}^{ν} C(x, j)`.
fn binomial_prefix(x: &BigRational, nu: u32) -> BigRational {
    (0..=nu).fold(BigRational::zero(), |acc, j| {
        acc + generalized_binomial(x, j)
    })
}

/// Closed form `‖A_γ‖₂ = 2^{⌊(n-1)/2⌋+ν} / Σ_{j≤ν} C(n/2+ν, j)` as an exact
/// rational.
pub fn pseudo_spline_gamma_norm2_exact(p: PseudoSplineParams) -> BigRational {
    let e = ((p.n() - 1) / 2 + p.nu()) as i64;
    let x = ratio(p.n() as i64, 2) + BigRational::from_integer(BigInt::from(p.nu()));
    pow2(e) / binomial_prefix(&x, p.nu())
}

pub fn pseudo_spline_gamma_norm2(p: PseudoSplineParams) -> f64 {
    pseudo_spline_gamma_norm2_exact(p).to_f64()
}

/// `min |α_ev^{2k,ν}| = 2^{1-k-ν} Σ_{j≤ν} C(k+ν, j)`.
pub fn min_evensymbol_primal(k: u32, nu: u32) -> Result<f64> {
    if k == 0 || nu >= k {
        return Err(MterError::Parameter(format!(
            "need 0 <= nu <= k-1, got k={k}, nu={nu}"
        )));
    }
    let x = BigRational::from_integer(BigInt::from(k + nu));
    Ok((pow2(1 - k as i64 - nu as i64) * binomial_prefix(&x, nu)).to_f64())
}

/// `min |α_ev^{2k+1,ν}| = 2^{-k-ν} Σ_{j≤ν} C(k+1/2+ν, j)`.
pub fn min_evensymbol_dual(k: u32, nu: u32) -> Result<f64> {
    if k == 0 || nu >= k {
        return Err(MterError::Parameter(format!(
            "need 0 <= nu <= k-1, got k={k}, nu={nu}"
        )));
    }
    let x = ratio(2 * (k + nu) as i64 + 1, 2);
    Ok((pow2(-(k as i64) - nu as i64) * binomial_prefix(&x, nu)).to_f64())
}

/// Constants of the `‖γ‖₁` bound for primal pseudo-splines `α^{2k,ν}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneNormBound {
    pub kappa: f64,
    pub s: u32,
    pub q: f64,
    pub lambda: f64,
    pub c: f64,
}

/// `C(k,ν) = κ · max{1, (1+√κ)²/(2κ)} · (1+λ)/(1-λ)` with
/// `κ = 2^{k+ν-1} / Σ_{j≤ν} C(k+ν, j)`, `s = ⌊(k+ν)/2⌋`, `λ = q^{1/s}`.
///
/// At `ν = k-1` the mask is interpolatory, `κ = 1` and `γ = δ₀`; the bound
/// is reported as the exact value 1 there.
pub fn one_norm_bound_c(k: u32, nu: u32) -> Result<OneNormBound> {
    if k < 2 || nu >= k {
        return Err(MterError::Parameter(format!(
            "need k >= 2 and 0 <= nu <= k-1, got k={k}, nu={nu}"
        )));
    }
    let x = BigRational::from_integer(BigInt::from(k + nu));
    let kappa_exact = pow2((k + nu) as i64 - 1) / binomial_prefix(&x, nu);
    let s = (k + nu) / 2;
    if kappa_exact.is_one() {
        return Ok(OneNormBound {
            kappa: 1.0,
            s,
            q: 0.0,
            lambda: 0.0,
            c: 1.0,
        });
    }
    let kappa = kappa_exact.to_f64();
    let root = kappa.sqrt();
    let q = (root - 1.0) / (root + 1.0);
    let lambda = q.powf(1.0 / s as f64);
    let c = kappa * f64::max(1.0, (1.0 + root).powi(2) / (2.0 * kappa)) * (1.0 + lambda)
        / (1.0 - lambda);
    Ok(OneNormBound {
        kappa,
        s,
        q,
        lambda,
        c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks::{dd_mask, pseudo_spline_mask};

    const SAMPLES: usize = 1 << 14;

    fn quadratic() -> Mask<f64> {
        bspline_mask(3).unwrap().to_f64()
    }

    fn cubic() -> Mask<f64> {
        bspline_mask(4).unwrap().to_f64()
    }

    #[test]
    fn reversibility_checks() {
        let r = check_even_reversible(&cubic(), SAMPLES, DEFAULT_GUARD_THRESHOLD).unwrap();
        assert!(r.reversible);
        assert!((r.min_modulus - 0.5).abs() < 1e-15);
        assert!((r.witness + 1.0).norm() < 1e-12);

        // even part 1 + z
        let bad = Mask::new(0, vec![1.0, 1.0]).upsample();
        let r = check_even_reversible(&bad, SAMPLES, DEFAULT_GUARD_THRESHOLD).unwrap();
        assert!(!r.reversible);
        assert!((r.witness + 1.0).norm() < 1e-12);

        let dd = dd_mask(3).unwrap();
        let r = check_even_reversible(&dd, SAMPLES, DEFAULT_GUARD_THRESHOLD).unwrap();
        assert!(r.reversible);
        assert_eq!(r.min_modulus, 1.0);

        let odd_only = Mask::new(1, vec![1.0]);
        assert_eq!(
            check_even_reversible(&odd_only, SAMPLES, DEFAULT_GUARD_THRESHOLD),
            Err(MterError::ZeroEvenPart)
        );
    }

    #[test]
    fn closed_quadratic_kernel() {
        let g = even_inverse_closed_quadratic(60);
        assert_eq!(g.coeff(0), 4.0 / 3.0);
        assert!((g.coeff(1) + 4.0 / 9.0).abs() < 1e-16);
        assert!((g.coeff(2) - 4.0 / 27.0).abs() < 1e-16);
        assert!((g.norm_l1() - 2.0).abs() < 1e-12);
        let ev = quadratic().even_part();
        let residual = g
            .as_mask()
            .convolve(&ev)
            .add(&Mask::monomial(0, -1.0))
            .norm_l1();
        assert!(residual <= g.dropped_mass() + 1e-15);
    }

    #[test]
    fn closed_cubic_kernel() {
        let g = even_inverse_closed_cubic(40);
        assert!((g.coeff(0) - std::f64::consts::SQRT_2).abs() < 1e-8);
        assert!((g.coeff(1) + 0.242_640_69).abs() < 1e-8);
        assert_eq!(g.coeff(1), g.coeff(-1));
        assert!((g.norm_l1() - 2.0).abs() < 1e-12);
        assert_eq!(g.norm_linf(), std::f64::consts::SQRT_2);
        let ev = cubic().even_part();
        let residual = g.as_mask().convolve(&ev).add(&Mask::monomial(0, -1.0));
        assert!(residual.norm_l1() <= g.dropped_mass() + 1e-15);
    }

    #[test]
    fn series_constants() {
        let (a, b) = cubic_series_constants(10, 60);
        let c = 3.0 * std::f64::consts::SQRT_2 / 4.0;
        assert!((a[0] - 1.060_660_17).abs() < 1e-8);
        assert!((a[0] - c).abs() < 1e-14);
        assert!((b[0] - 0.181_980_52).abs() < 1e-8);
        for k in 0..10 {
            assert!((a[k + 1] + a[k] - 6.0 * b[k]).abs() < 1e-14);
        }
        for k in 1..=10 {
            assert!((b[k] - 6.0 * a[k] + b[k - 1]).abs() < 1e-14);
        }
    }

    #[test]
    fn series_closed_form() {
        let (a, b) = cubic_series_constants(10, 60);
        let c = 3.0 * std::f64::consts::SQRT_2 / 4.0;
        let r = cubic_ratio();
        for k in 0..=10 {
            assert!((a[k] - c * r.powi(2 * k as i32)).abs() < 1e-12);
            assert!((b[k] - c * r.powi(2 * k as i32 + 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn series_reassembles_cubic_kernel() {
        let (a, b) = cubic_series_constants(10, 60);
        let g = even_inverse_closed_cubic(25);
        for k in 0..=10i64 {
            let even = 4.0 / 3.0 * a[k as usize];
            assert!((g.coeff(2 * k) - even).abs() < 1e-14);
            let odd = -4.0 / 3.0 * b[k as usize];
            assert!((g.coeff(2 * k + 1) - odd).abs() < 1e-14);
            assert!((g.coeff(-2 * k - 1) - odd).abs() < 1e-14);
        }
    }

    #[test]
    fn spectral_matches_closed_forms() {
        let spec = even_inverse_spectral(&quadratic(), 1e-12, DEFAULT_GUARD_THRESHOLD).unwrap();
        let closed = even_inverse_closed_quadratic(60);
        for k in -5..60 {
            assert!((spec.coeff(k) - closed.coeff(k)).abs() < 1e-12, "k = {k}");
        }
        assert!(spec.dropped_mass() <= 1e-12);
        assert!((spec.sum() - 1.0).abs() <= 1e-12);

        let spec = even_inverse_spectral(&cubic(), 1e-12, DEFAULT_GUARD_THRESHOLD).unwrap();
        let closed = even_inverse_closed_cubic(40);
        for k in -40..=40 {
            assert!((spec.coeff(k) - closed.coeff(k)).abs() < 1e-12, "k = {k}");
        }
        assert!(spec.offset() < 0 && spec.offset() + spec.len() as i64 - 1 == -spec.offset());
    }

    #[test]
    fn spectral_interpolatory_is_identity() {
        let g =
            even_inverse_spectral(&dd_mask(2).unwrap(), 1e-12, DEFAULT_GUARD_THRESHOLD).unwrap();
        assert_eq!(g.offset(), 0);
        assert_eq!(g.coeffs(), &[1.0]);
    }

    #[test]
    fn spectral_rejects_vanishing_symbol() {
        let bad = Mask::new(0, vec![1.0, 1.0]).upsample();
        assert!(matches!(
            even_inverse_spectral(&bad, 1e-12, DEFAULT_GUARD_THRESHOLD),
            Err(MterError::NotEvenReversible { .. })
        ));
    }

    #[test]
    fn spectral_residual_within_tol() {
        for n in 3..=8 {
            for nu in 0..n / 2 {
                let alpha = pseudo_spline_mask(PseudoSplineParams::new(n, nu).unwrap());
                let g = even_inverse_spectral(&alpha, 1e-12, DEFAULT_GUARD_THRESHOLD).unwrap();
                let ev = alpha.even_part().to_f64();
                assert!(inverse_residual_l1(&ev, &g) <= 1e-12, "({n},{nu})");
                assert!(g.dropped_mass() <= 1e-12);
                assert!((g.sum() - 1.0).abs() <= 1e-12, "({n},{nu})");
            }
        }
    }

    #[test]
    fn certificate_constants() {
        let cert = decay_certificate(&cubic(), SAMPLES).unwrap();
        assert!((cert.kappa - 2.0).abs() < 1e-14);
        assert_eq!(cert.bandwidth, 1);
        assert!((cert.lambda - cubic_ratio()).abs() < 1e-14);
        assert!((cert.k - 2.914_213_56).abs() < 1e-8);

        // quadratic even part is complex on the circle
        assert!(matches!(
            decay_certificate(&quadratic(), SAMPLES),
            Err(MterError::CertificateUnavailable(_))
        ));
        let m = modulus_certificate(&quadratic(), SAMPLES).unwrap();
        assert!((m.kappa - 2.0).abs() < 1e-14);
        assert!((m.lambda - 0.171_572_875).abs() < 1e-9);
        assert!((m.k - 2.914_213_56).abs() < 1e-8);

        let interp = decay_certificate(&dd_mask(2).unwrap(), SAMPLES).unwrap();
        assert_eq!(interp.kappa, 1.0);
        assert_eq!(interp.lambda, 0.0);
        assert_eq!(interp.k, 1.0);
    }

    #[test]
    fn certificate_is_sound_for_primal_pseudo_splines() {
        for k in 2..=5 {
            for nu in 0..k {
                let alpha = pseudo_spline_mask(PseudoSplineParams::new(2 * k, nu).unwrap());
                let cert = decay_certificate(&alpha, SAMPLES).unwrap();
                let g = even_inverse_spectral(&alpha, 1e-12, DEFAULT_GUARD_THRESHOLD).unwrap();
                assert!(cert.holds_for(&g, 1e-12), "(2*{k},{nu})");
            }
        }
    }

    #[test]
    fn dual_certificate_unavailable() {
        let alpha = pseudo_spline_mask(PseudoSplineParams::new(5, 1).unwrap());
        assert!(matches!(
            decay_certificate(&alpha, SAMPLES),
            Err(MterError::CertificateUnavailable(_))
        ));
    }

    #[test]
    fn gamma_norm2_examples() {
        let p = |n, nu| PseudoSplineParams::new(n, nu).unwrap();
        assert_eq!(pseudo_spline_gamma_norm2_exact(p(4, 0)), ratio(2, 1));
        assert_eq!(pseudo_spline_gamma_norm2_exact(p(6, 1)), ratio(8, 5));
        for k in 1..=5 {
            assert_eq!(
                pseudo_spline_gamma_norm2_exact(p(2 * k, k - 1)),
                ratio(1, 1)
            );
        }
    }

    #[test]
    fn gamma_norm2_matches_sampling() {
        for n in 2..=9 {
            for nu in 0..n / 2 {
                let p = PseudoSplineParams::new(n, nu).unwrap();
                let ev = pseudo_spline_mask(p).even_part();
                let sampled = 1.0 / ev.min_modulus_on_circle(SAMPLES).unwrap();
                let closed = pseudo_spline_gamma_norm2(p);
                assert!(
                    (sampled - closed).abs() <= 1e-9 * closed,
                    "({n},{nu}): {sampled} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn primal_minimum_examples() {
        assert_eq!(min_evensymbol_primal(2, 0).unwrap(), 0.5);
        assert_eq!(min_evensymbol_primal(2, 1).unwrap(), 1.0);
        assert_eq!(min_evensymbol_primal(3, 1).unwrap(), 0.625);
        let ev = pseudo_spline_mask(PseudoSplineParams::new(6, 1).unwrap()).even_part();
        assert!((ev.min_modulus_on_circle(SAMPLES).unwrap() - 0.625).abs() < 1e-12);
        assert!(min_evensymbol_primal(2, 2).is_err());
    }

    #[test]
    fn one_norm_bound_examples() {
        let b = one_norm_bound_c(2, 1).unwrap();
        assert_eq!(b.c, 1.0);
        assert_eq!(b.kappa, 1.0);

        let b = one_norm_bound_c(2, 0).unwrap();
        assert_eq!(b.kappa, 2.0);
        assert_eq!(b.s, 1);
        assert!((b.lambda - cubic_ratio()).abs() < 1e-15);
        assert!((b.c - (3.0 * std::f64::consts::SQRT_2 + 4.0) / 2.0).abs() < 1e-12);

        let b = one_norm_bound_c(3, 0).unwrap();
        assert_eq!(b.kappa, 4.0);
        assert!((b.q - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.c - 9.0).abs() < 1e-12);

        assert!(one_norm_bound_c(1, 0).is_err());
        assert!(one_norm_bound_c(3, 3).is_err());
    }

    #[test]
    fn verify_inverse_examples() {
        assert!(verify_inverse(&cubic(), &even_inverse_closed_cubic(40), SAMPLES) < 1e-12);
        let dd = dd_mask(2).unwrap();
        assert_eq!(
            verify_inverse(&dd, &Kernel::identity(KernelSource::Spectral), SAMPLES),
            0.0
        );
        let off = even_inverse_closed_cubic(40).perturbed(0, 0.01);
        let r = verify_inverse(&cubic(), &off, SAMPLES);
        assert!(r >= 0.005 * 0.5, "{r}");
    }

    #[test]
    fn closed_dispatch() {
        let g = even_inverse_closed(&bspline_mask(3).unwrap(), 1e-12).unwrap();
        assert_eq!(g.source(), KernelSource::ClosedQuadratic);
        assert!(g.dropped_mass() <= 1e-12);
        let g = even_inverse_closed(&bspline_mask(4).unwrap(), 1e-12).unwrap();
        assert_eq!(g.source(), KernelSource::ClosedCubic);
        assert!(g.dropped_mass() <= 1e-12);
        assert!(even_inverse_closed(&bspline_mask(5).unwrap(), 1e-12).is_err());
    }
}

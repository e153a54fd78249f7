//! The multiscale transform on periodic signals: decimation by the
//! even-inverse, prediction by subdivision, and the detail pyramid.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{MterError, Result};
use crate::inverse::{Kernel, DEFAULT_GUARD_THRESHOLD};
use crate::laurent::{circular_convolve, subdivide, symbol_at_roots, Mask, PeriodicSignal};

/// Largest even detail entry tolerated by the packed format.
pub const PACK_TOLERANCE: f64 = 1e-11;

/// How `c ↦ γ ∗ (c↓2)` is realized on a period.
#[derive(Debug, Clone, PartialEq)]
pub enum DecimationMode {
    /// Division by `α_ev` at the `(N/2)`-th roots of unity: the exact
    /// periodized even-inverse.
    ExactPeriodic { guard: f64 },
    /// Circular convolution with a truncated (or arbitrary) kernel.
    Kernel(Kernel),
}

impl DecimationMode {
    pub fn exact() -> Self {
        DecimationMode::ExactPeriodic {
            guard: DEFAULT_GUARD_THRESHOLD,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DecimationMode::ExactPeriodic { .. } => "exact",
            DecimationMode::Kernel(_) => "kernel",
        }
    }
}

/// `D_γ c = γ ∗ (c↓2)`.
pub fn decimate(
    c: &PeriodicSignal,
    alpha: &Mask<f64>,
    mode: &DecimationMode,
) -> Result<PeriodicSignal> {
    let even = c.downsample()?;
    match mode {
        DecimationMode::Kernel(gamma) => Ok(circular_convolve(&gamma.as_mask(), &even)),
        DecimationMode::ExactPeriodic { guard } => divide_by_even_symbol(&even, alpha, *guard),
    }
}

fn divide_by_even_symbol(
    even: &PeriodicSignal,
    alpha: &Mask<f64>,
    guard: f64,
) -> Result<PeriodicSignal> {
    let ev = alpha.even_part();
    if ev.is_zero() {
        return Err(MterError::ZeroEvenPart);
    }
    if ev.offset() == 0 && ev.coeffs() == [1.0] {
        return Ok(even.clone());
    }
    let size = even.len();
    // symbols[m] = α_ev(ω^m); convolution multiplies the forward DFT
    // (kernel e^{-2πi mk/M}) by α_ev(ω^{-m}).
    let symbols = symbol_at_roots(&ev, size);
    if let Some((index, modulus)) = symbols
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .find(|(_, m)| *m <= guard)
    {
        return Err(MterError::DecimationSingular {
            index,
            size,
            modulus,
        });
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = even
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    planner.plan_fft_forward(size).process(&mut buf);
    for (m, v) in buf.iter_mut().enumerate() {
        *v /= symbols[(size - m) % size];
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    PeriodicSignal::new(buf.iter().map(|v| v.re / size as f64).collect())
}

/// One analysis step: `c_prev = D_γ c`, `d = c - S_α c_prev`.
pub fn decompose_level(
    c: &PeriodicSignal,
    alpha: &Mask<f64>,
    mode: &DecimationMode,
) -> Result<(PeriodicSignal, PeriodicSignal)> {
    let coarse = decimate(c, alpha, mode)?;
    let detail = c - &subdivide(alpha, &coarse);
    Ok((coarse, detail))
}

/// Coarse data `c^{(0)}` and details `d^{(1)} .. d^{(j)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    coarse: PeriodicSignal,
    details: Vec<PeriodicSignal>,
    mask_id: String,
}

impl Pyramid {
    /// Checks `len(d^{(ℓ)}) = len(coarse) · 2^ℓ`.
    pub fn new(
        coarse: PeriodicSignal,
        details: Vec<PeriodicSignal>,
        mask_id: impl Into<String>,
    ) -> Result<Self> {
        if details.is_empty() {
            return Err(MterError::Shape(
                "pyramid needs at least one detail level".into(),
            ));
        }
        for (i, d) in details.iter().enumerate() {
            let expected = coarse.len() << (i + 1);
            if d.len() != expected {
                return Err(MterError::Shape(format!(
                    "detail level {} has length {}, expected {expected}",
                    i + 1,
                    d.len()
                )));
            }
        }
        Ok(Pyramid {
            coarse,
            details,
            mask_id: mask_id.into(),
        })
    }

    /// Rebuilds full-length details from their odd entries; even entries
    /// are set to zero.
    pub fn from_packed(
        coarse: PeriodicSignal,
        packed: Vec<PeriodicSignal>,
        mask_id: impl Into<String>,
    ) -> Result<Self> {
        let details = packed
            .into_iter()
            .map(|odd| {
                let mut full = vec![0.0; 2 * odd.len()];
                for (k, v) in odd.values().iter().enumerate() {
                    full[2 * k + 1] = *v;
                }
                PeriodicSignal::new(full)
            })
            .collect::<Result<Vec<_>>>()?;
        Pyramid::new(coarse, details, mask_id)
    }

    pub fn coarse(&self) -> &PeriodicSignal {
        &self.coarse
    }

    /// `details()[ℓ-1]` is `d^{(ℓ)}`.
    pub fn details(&self) -> &[PeriodicSignal] {
        &self.details
    }

    pub fn detail(&self, level: usize) -> Option<&PeriodicSignal> {
        level.checked_sub(1).and_then(|i| self.details.get(i))
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn mask_id(&self) -> &str {
        &self.mask_id
    }

    /// Length of the finest level.
    pub fn fine_len(&self) -> usize {
        self.coarse.len() << self.levels()
    }

    /// `max_{ℓ,k} |d^{(ℓ)}_{2k}|`.
    pub fn max_even_detail(&self) -> f64 {
        self.details
            .iter()
            .flat_map(|d| d.values().iter().step_by(2))
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_detail(&self) -> f64 {
        self.details
            .iter()
            .map(|d| d.norm_inf())
            .fold(0.0, f64::max)
    }

    /// Odd entries of every detail level. Fails when an even entry exceeds
    /// [`PACK_TOLERANCE`], since it would be lost.
    pub fn packed_details(&self) -> Result<Vec<PeriodicSignal>> {
        let even = self.max_even_detail();
        if even > PACK_TOLERANCE {
            return Err(MterError::Format(format!(
                "cannot pack details: even entry of size {even:e} exceeds {PACK_TOLERANCE:e}"
            )));
        }
        self.details.iter().map(|d| d.odd_entries()).collect()
    }

    pub fn with_details(&self, details: Vec<PeriodicSignal>) -> Result<Self> {
        Pyramid::new(self.coarse.clone(), details, self.mask_id.clone())
    }

    pub fn with_coarse(&self, coarse: PeriodicSignal) -> Result<Self> {
        Pyramid::new(coarse, self.details.clone(), self.mask_id.clone())
    }

    fn check_compatible(&self, other: &Pyramid) -> Result<()> {
        if self.coarse.len() != other.coarse.len() || self.levels() != other.levels() {
            return Err(MterError::Shape("pyramids have different shapes".into()));
        }
        Ok(())
    }

    /// `‖c^{(0)} - c̃^{(0)}‖_∞ + Σ_ℓ ‖d^{(ℓ)} - d̃^{(ℓ)}‖_∞`.
    pub fn perturbation_size(&self, other: &Pyramid) -> Result<f64> {
        self.check_compatible(other)?;
        let coarse = self.coarse.max_abs_diff(&other.coarse);
        let details: f64 = self
            .details
            .iter()
            .zip(&other.details)
            .map(|(a, b)| a.max_abs_diff(b))
            .sum();
        Ok(coarse + details)
    }
}

/// `j` analysis steps. Requires `2^j | N` and `N / 2^j ≥ 2`.
pub fn decompose(
    c: &PeriodicSignal,
    alpha: &Mask<f64>,
    levels: usize,
    mode: &DecimationMode,
    mask_id: impl Into<String>,
) -> Result<Pyramid> {
    let n = c.len();
    let level_error = MterError::Level { len: n, levels };
    if levels == 0 || levels >= usize::BITS as usize {
        return Err(level_error);
    }
    let block = 1usize << levels;
    if !n.is_multiple_of(block) || n / block < 2 {
        return Err(level_error);
    }
    let mut current = c.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (coarse, detail) = decompose_level(&current, alpha, mode)?;
        details.push(detail);
        current = coarse;
    }
    details.reverse();
    Pyramid::new(current, details, mask_id)
}

/// `c^{(ℓ)} = S_α c^{(ℓ-1)} + d^{(ℓ)}`, `ℓ = 1 .. j`.
pub fn reconstruct(p: &Pyramid, alpha: &Mask<f64>) -> Result<PeriodicSignal> {
    let mut current = p.coarse.clone();
    for d in &p.details {
        let predicted = subdivide(alpha, &current);
        if predicted.len() != d.len() {
            return Err(MterError::Shape(format!(
                "detail of length {} does not match prediction of length {}",
                d.len(),
                predicted.len()
            )));
        }
        current = &predicted + d;
    }
    Ok(current)
}

/// `S_α^times c`.
pub fn subdivide_times(alpha: &Mask<f64>, c: &PeriodicSignal, times: usize) -> PeriodicSignal {
    (0..times).fold(c.clone(), |acc, _| subdivide(alpha, &acc))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thresholded {
    pub pyramid: Pyramid,
    /// Nonzero detail entries after thresholding.
    pub kept: usize,
    /// All detail entries.
    pub total: usize,
}

impl Thresholded {
    pub fn kept_fraction(&self) -> f64 {
        self.kept as f64 / self.total as f64
    }
}

/// Hard thresholding: detail entries with `|d_k| < eps` become zero.
pub fn threshold_details(p: &Pyramid, eps: f64) -> Result<Thresholded> {
    if eps.is_nan() || eps < 0.0 {
        return Err(MterError::Parameter(format!(
            "threshold must be nonnegative, got {eps}"
        )));
    }
    let details: Vec<PeriodicSignal> = p
        .details
        .iter()
        .map(|d| d.map(|v| if v.abs() < eps { 0.0 } else { v }))
        .collect();
    let kept = details
        .iter()
        .flat_map(|d| d.values().iter())
        .filter(|v| **v != 0.0)
        .count();
    let total = details.iter().map(|d| d.len()).sum();
    Ok(Thresholded {
        pyramid: p.with_details(details)?,
        kept,
        total,
    })
}

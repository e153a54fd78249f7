//! Finitely supported Laurent sequences (masks) and periodic signals.
//!
//! A [`Mask`] stores the coefficients of a Laurent polynomial
//! `m(z) = Σ_k m_k z^k` as a contiguous run starting at `offset`. Masks are
//! generic over the scalar so that catalog masks can be generated in exact
//! rational arithmetic and later converted to `f64` for the transforms.
//!
//! Bi-infinite data is modelled by [`PeriodicSignal`], one period of a
//! periodic sequence. Every convolution on a periodic signal is therefore
//! circular, and a mask longer than the period simply wraps around.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rustfft::FftPlanner;

use crate::error::{MterError, Result};

/// Absolute tolerance used when comparing floating-point coefficients for
/// structural properties (interpolatory, normalized, symmetric).
pub const FLOAT_COEFF_TOL: f64 = 1e-12;

/// Scalar type a [`Mask`] can be built over.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn to_f64(&self) -> f64;

    /// Exact equality for exact scalars, [`FLOAT_COEFF_TOL`] for floats.
    fn approx_eq(&self, other: &Self) -> bool;
}

impl Coefficient for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_COEFF_TOL
    }
}

impl Coefficient for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
}

/// Rational mask, used by the catalog.
pub type RationalMask = Mask<BigRational>;

/// A finitely supported coefficient sequence `m_k`, `k = offset .. offset + len`.
///
/// The coefficient run is kept trimmed: either it is empty (the zero mask) or
/// its first and last entries are nonzero.
#[derive(Clone, PartialEq)]
pub struct Mask<T> {
    offset: i64,
    coeffs: Vec<T>,
}

impl<T: Coefficient> Mask<T> {
    /// Builds a mask and trims leading and trailing zeros.
    pub fn new(offset: i64, coeffs: Vec<T>) -> Self {
        let first = coeffs.iter().position(|c| !c.is_zero());
        match first {
            None => Self::zero(),
            Some(first) => {
                let last = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
                let mut coeffs = coeffs;
                coeffs.truncate(last + 1);
                coeffs.drain(..first);
                Mask {
                    offset: offset + first as i64,
                    coeffs,
                }
            }
        }
    }

    pub fn zero() -> Self {
        Mask {
            offset: 0,
            coeffs: Vec::new(),
        }
    }

    /// The unit impulse δ₀, symbol `1`.
    pub fn delta() -> Self {
        Self::monomial(0, T::one())
    }

    /// `c · z^k`.
    pub fn monomial(k: i64, c: T) -> Self {
        Self::new(k, vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the first stored coefficient (0 for the zero mask).
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Inclusive support `[lo, hi]`, `None` for the zero mask.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.is_zero() {
            None
        } else {
            Some((self.offset, self.offset + self.coeffs.len() as i64 - 1))
        }
    }

    /// Smallest `s` with `m_k = 0` for all `|k| > s`.
    pub fn bandwidth(&self) -> usize {
        match self.support() {
            None => 0,
            Some((lo, hi)) => lo.unsigned_abs().max(hi.unsigned_abs()) as usize,
        }
    }

    /// Coefficient at index `k`, zero outside the support.
    pub fn coeff(&self, k: i64) -> T {
        let i = k - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            T::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    /// `(index, coefficient)` pairs over the stored run.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        let offset = self.offset;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (offset + i as i64, c))
    }

    /// Product of symbols: `(a ∗ b)_k = Σ_l a_l b_{k-l}`.
    pub fn convolve(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(self.offset + other.offset, out)
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self.support(), other.support()) {
            (None, _) => other.clone(),
            (_, None) => self.clone(),
            (Some((a0, a1)), Some((b0, b1))) => {
                let lo = a0.min(b0);
                let hi = a1.max(b1);
                let coeffs = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect();
                Self::new(lo, coeffs)
            }
        }
    }

    pub fn scale(&self, factor: &T) -> Self {
        Self::new(
            self.offset,
            self.coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        )
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Mask {
            offset: self.offset + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Symbol `m(z²)`: zeros interleaved between coefficients.
    pub fn upsample(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![T::zero(); 2 * self.len() - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c.clone();
        }
        Self::new(2 * self.offset, coeffs)
    }

    /// `(m_ev)_k = m_{2k}`.
    pub fn even_part(&self) -> Self {
        self.parity_part(0)
    }

    /// `(m_od)_k = m_{2k+1}`.
    pub fn odd_part(&self) -> Self {
        self.parity_part(1)
    }

    fn parity_part(&self, parity: i64) -> Self {
        let Some((lo, hi)) = self.support() else {
            return Self::zero();
        };
        let first = (lo - parity).div_euclid(2)
            + if (lo - parity).rem_euclid(2) == 0 {
                0
            } else {
                1
            };
        let last = (hi - parity).div_euclid(2);
        if first > last {
            return Self::zero();
        }
        let coeffs = (first..=last).map(|k| self.coeff(2 * k + parity)).collect();
        Self::new(first, coeffs)
    }

    /// Sums of the even-indexed and odd-indexed coefficients.
    pub fn parity_sums(&self) -> (T, T) {
        (self.even_part().sum(), self.odd_part().sum())
    }

    /// `m(1)`.
    pub fn sum(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.clone())
    }

    /// Symbol at an arbitrary complex point. `z` must be nonzero when the
    /// support reaches negative indices.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        if self.is_zero() {
            return Complex64::zero();
        }
        // Horner on the polynomial part, then the z^offset factor.
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64();
        }
        acc * z.powi(self.offset as i32)
    }

    pub fn to_f64(&self) -> Mask<f64> {
        Mask::new(
            self.offset,
            self.coeffs.iter().map(|c| c.to_f64()).collect(),
        )
    }

    pub fn norm_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).sum()
    }

    pub fn norm_linf(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// True when the mask is δ₀ (exactly for rationals, to
    /// [`FLOAT_COEFF_TOL`] for floats).
    pub fn is_delta(&self) -> bool {
        match self.support() {
            None => false,
            Some((lo, hi)) => {
                (lo..=hi).all(|k| {
                    let expected = if k == 0 { T::one() } else { T::zero() };
                    self.coeff(k).approx_eq(&expected)
                }) && lo <= 0
                    && hi >= 0
            }
        }
    }

    /// `m_k = m_{-k}` for all `k`.
    pub fn is_symmetric(&self) -> bool {
        match self.support() {
            None => true,
            Some((lo, hi)) => {
                let s = lo.abs().max(hi.abs());
                (0..=s).all(|k| self.coeff(k).approx_eq(&self.coeff(-k)))
            }
        }
    }

    /// Symbol values at the `samples`-th roots of unity: entry `m` is
    /// `m(e^{2πi m / samples})`.
    ///
    /// `samples` must be a power of two and at least four times the stored
    /// length.
    pub fn symbol_on_circle(&self, samples: usize) -> Result<Vec<Complex64>> {
        check_samples(samples, self.len())?;
        Ok(symbol_at_roots(self, samples))
    }

    /// `max |m(z)|` over the sampled unit circle.
    pub fn sup_norm_on_circle(&self, samples: usize) -> Result<f64> {
        Ok(self
            .symbol_on_circle(samples)?
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    }

    /// `min |m(z)|` over the sampled unit circle.
    pub fn min_modulus_on_circle(&self, samples: usize) -> Result<f64> {
        Ok(self.min_modulus_with_witness(samples)?.0)
    }

    /// Minimum modulus together with the sample point attaining it.
    pub fn min_modulus_with_witness(&self, samples: usize) -> Result<(f64, Complex64)> {
        let values = self.symbol_on_circle(samples)?;
        let (idx, min) =
            values
                .iter()
                .map(|v| v.norm())
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |best, (i, m)| if m < best.1 { (i, m) } else { best },
                );
        Ok((min, root_of_unity(idx, samples)))
    }
}

impl Mask<f64> {
    /// Circular convolution with one period of a periodic signal.
    pub fn apply(&self, signal: &PeriodicSignal) -> PeriodicSignal {
        circular_convolve(self, signal)
    }
}

impl<T: fmt::Debug> fmt::Debug for Mask<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Mask{{offset: {}, coeffs: {:?}}}",
            self.offset, self.coeffs
        )
    }
}

/// `e^{2πi index / size}`.
pub fn root_of_unity(index: usize, size: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * index as f64 / size as f64)
}

pub(crate) fn check_samples(samples: usize, support_len: usize) -> Result<()> {
    let min = (4 * support_len).max(4);
    if !samples.is_power_of_two() || samples < min {
        return Err(MterError::Samples { samples, min });
    }
    Ok(())
}

/// Symbol values at `size`-th roots of unity via one inverse FFT of the
/// coefficients folded modulo `size`. With a support longer than `size`
/// the result is the symbol of the periodized mask, which agrees with the
/// true symbol at those roots.
pub(crate) fn symbol_at_roots<T: Coefficient>(mask: &Mask<T>, size: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::zero(); size];
    for (k, c) in mask.iter() {
        buf[k.rem_euclid(size as i64) as usize] += c.to_f64();
    }
    FftPlanner::new().plan_fft_inverse(size).process(&mut buf);
    buf
}

/// One period of a bi-infinite periodic real sequence; index `k` is read
/// modulo the period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSignal {
    values: Vec<f64>,
}

impl PeriodicSignal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(MterError::Length(
                "periodic signal must have at least one sample".into(),
            ));
        }
        Ok(PeriodicSignal { values })
    }

    pub fn constant(len: usize, value: f64) -> Self {
        assert!(len > 0, "empty signal");
        PeriodicSignal {
            values: vec![value; len],
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::constant(len, 0.0)
    }

    /// Unit impulse at index `at`.
    pub fn impulse(len: usize, at: usize) -> Self {
        let mut s = Self::zeros(len);
        s.values[at % len] = 1.0;
        s
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> f64) -> Self {
        assert!(len > 0, "empty signal");
        PeriodicSignal {
            values: (0..len).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Periodic read.
    pub fn at(&self, k: i64) -> f64 {
        self.values[k.rem_euclid(self.len() as i64) as usize]
    }

    /// `(c↑2)`: period doubles, odd entries are zero.
    pub fn upsample(&self) -> Self {
        let mut out = vec![0.0; 2 * self.len()];
        for (i, v) in self.values.iter().enumerate() {
            out[2 * i] = *v;
        }
        PeriodicSignal { values: out }
    }

    /// `(c↓2)_k = c_{2k}`; the period must be even.
    pub fn downsample(&self) -> Result<Self> {
        self.parity_entries(0)
    }

    /// `c_{2k+1}`; the period must be even.
    pub fn odd_entries(&self) -> Result<Self> {
        self.parity_entries(1)
    }

    fn parity_entries(&self, parity: usize) -> Result<Self> {
        if !self.len().is_multiple_of(2) {
            return Err(MterError::Length(format!(
                "cannot decimate a signal of odd length {}",
                self.len()
            )));
        }
        Ok(PeriodicSignal {
            values: self
                .values
                .iter()
                .skip(parity)
                .step_by(2)
                .copied()
                .collect(),
        })
    }

    /// Periodic forward difference `(Δc)_k = c_{k+1} - c_k`.
    pub fn difference(&self) -> Self {
        let n = self.len();
        PeriodicSignal {
            values: (0..n)
                .map(|k| self.values[(k + 1) % n] - self.values[k])
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn norm_2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `‖·‖_p` for `p ∈ {2, ∞}`.
    pub fn norm(&self, p: NormKind) -> f64 {
        match p {
            NormKind::Two => self.norm_2(),
            NormKind::Inf => self.norm_inf(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        PeriodicSignal {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        PeriodicSignal {
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.len(), other.len(), "signal length mismatch");
        PeriodicSignal {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// `max_k |a_k - b_k|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).norm_inf()
    }
}

impl Add for &PeriodicSignal {
    type Output = PeriodicSignal;

    fn add(self, rhs: Self) -> PeriodicSignal {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &PeriodicSignal {
    type Output = PeriodicSignal;

    fn sub(self, rhs: Self) -> PeriodicSignal {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Which sequence norm a stability estimate is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum NormKind {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl std::str::FromStr for NormKind {
    type Err = MterError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(NormKind::Two),
            "inf" | "infinity" => Ok(NormKind::Inf),
            other => Err(MterError::Parameter(format!(
                "unknown norm {other:?}, expected 2 or inf"
            ))),
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Two => f.write_str("2"),
            NormKind::Inf => f.write_str("inf"),
        }
    }
}

/// `(m ∗ c)_k = Σ_l m_l c_{(k-l) mod N}`.
pub fn circular_convolve(mask: &Mask<f64>, signal: &PeriodicSignal) -> PeriodicSignal {
    let n = signal.len() as i64;
    let mut out = vec![0.0; signal.len()];
    for (l, m) in mask.iter() {
        let shift = l.rem_euclid(n) as usize;
        for (k, o) in out.iter_mut().enumerate() {
            let src = (k + signal.len() - shift) % signal.len();
            *o += m * signal.values[src];
        }
    }
    PeriodicSignal { values: out }
}

/// Refinement `(S_α c)_k = Σ_l α_{k-2l} c_l` on a periodic signal; the
/// output period is `2N`.
///
/// Implemented as a scatter over coarse samples rather than as
/// `α ∗ (c↑2)`, so that the two formulations can be checked against each
/// other.
pub fn subdivide(alpha: &Mask<f64>, coarse: &PeriodicSignal) -> PeriodicSignal {
    let fine = 2 * coarse.len();
    let fine_i = fine as i64;
    let mut out = vec![0.0; fine];
    for (l, c) in coarse.values.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        for (i, a) in alpha.iter() {
            let k = (i + 2 * l as i64).rem_euclid(fine_i) as usize;
            out[k] += a * c;
        }
    }
    PeriodicSignal { values: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rmask(offset: i64, num: &[i64], den: i64) -> RationalMask {
        Mask::new(offset, num.iter().map(|n| q(*n, den)).collect())
    }

    #[test]
    fn trimming() {
        let m = Mask::new(-2, vec![0.0, 1.0, 0.0]);
        assert_eq!(m.offset(), -1);
        assert_eq!(m.coeffs(), &[1.0]);
        let z = Mask::new(3, vec![0.0, 0.0]);
        assert!(z.is_zero());
        assert_eq!(z.support(), None);
    }

    #[test]
    fn quadratic_symbol_is_shifted_binomial_cube() {
        let alpha = rmask(-1, &[1, 3, 3, 1], 4);
        let binom = Mask::new(0, vec![1.0, 1.0]);
        let cube = binom
            .convolve(&binom)
            .convolve(&binom)
            .scale(&0.25)
            .shift(-1);
        assert_eq!(alpha.to_f64(), cube);
        assert_eq!(alpha.sum(), q(2, 1));
    }

    #[test]
    fn convolution_examples() {
        let b = Mask::new(0, vec![1.0, 1.0]);
        assert_eq!(b.convolve(&b).coeffs(), &[1.0, 2.0, 1.0]);

        let ev = rmask(0, &[3, 1], 4);
        assert_eq!(ev.convolve(&ev), rmask(0, &[9, 6, 1], 16));

        let m = rmask(-3, &[-1, 0, 9, 16, 9, 0, -1], 16);
        assert_eq!(RationalMask::delta().convolve(&m), m);
    }

    #[test]
    fn even_and_odd_parts() {
        let quad = rmask(-1, &[1, 3, 3, 1], 4);
        assert_eq!(quad.even_part(), rmask(0, &[3, 1], 4));
        assert_eq!(quad.odd_part(), rmask(-1, &[1, 3], 4));

        let cubic = rmask(-2, &[1, 4, 6, 4, 1], 8);
        assert_eq!(cubic.even_part(), rmask(-1, &[1, 6, 1], 8));

        let d = RationalMask::delta();
        assert_eq!(d.even_part(), d);
        assert!(d.odd_part().is_zero());
    }

    #[test]
    fn signal_sampling() {
        let c = PeriodicSignal::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(c.upsample().values(), &[1.0, 0.0, 2.0, 0.0]);
        let d = PeriodicSignal::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(d.downsample().unwrap().values(), &[1.0, 3.0]);
        let e = PeriodicSignal::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.upsample().downsample().unwrap(), e);
        assert!(matches!(e.downsample(), Err(MterError::Length(_))));
    }

    #[test]
    fn circular_convolution_examples() {
        let c = PeriodicSignal::new(vec![0.3, -1.0, 2.5, 4.0]).unwrap();
        assert_eq!(circular_convolve(&Mask::delta(), &c), c);

        let two = Mask::new(-1, vec![0.5, 1.0, 0.5]);
        let ones = PeriodicSignal::constant(6, 1.0);
        assert_eq!(
            circular_convolve(&two, &ones),
            PeriodicSignal::constant(6, 2.0)
        );

        let ev = Mask::new(0, vec![0.75, 0.25]);
        let out = circular_convolve(&ev, &PeriodicSignal::impulse(4, 0));
        assert_eq!(out.values(), &[0.75, 0.25, 0.0, 0.0]);
    }

    #[test]
    fn circular_convolution_matches_cyclic_sum() {
        let m = Mask::new(-1, vec![0.5, -2.0, 0.75, 0.25]);
        let c = PeriodicSignal::new(vec![1.0, -3.0, 0.5, 2.0, 7.0]).unwrap();
        let out = circular_convolve(&m, &c);
        for k in 0..5i64 {
            let brute: f64 = (-1..3).map(|l| m.coeff(l) * c.at(k - l)).sum();
            assert!((out.at(k) - brute).abs() < 1e-15);
        }
    }

    #[test]
    fn subdivision_examples() {
        let quad = rmask(-1, &[1, 3, 3, 1], 4).to_f64();
        let ones = PeriodicSignal::constant(5, 1.0);
        assert_eq!(subdivide(&quad, &ones), PeriodicSignal::constant(10, 1.0));

        // (S c)_k = α_k for an impulse at 0, folded modulo 8.
        let out = subdivide(&quad, &PeriodicSignal::impulse(4, 0));
        assert_eq!(out.values(), &[0.75, 0.75, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25]);

        let dd = rmask(-3, &[-1, 0, 9, 16, 9, 0, -1], 16).to_f64();
        let c = PeriodicSignal::new(vec![0.1, -2.0, 3.5, 0.7, 1.1]).unwrap();
        let fine = subdivide(&dd, &c);
        assert_eq!(fine.downsample().unwrap(), c);
    }

    #[test]
    fn difference_examples() {
        assert_eq!(
            PeriodicSignal::constant(7, 3.2).difference(),
            PeriodicSignal::zeros(7)
        );
        let c = PeriodicSignal::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.difference().values(), &[1.0, 1.0, 1.0, -3.0]);
    }

    #[test]
    fn circle_norms() {
        let quad_ev = Mask::new(0, vec![0.75, 0.25]);
        assert!((quad_ev.sup_norm_on_circle(1 << 14).unwrap() - 1.0).abs() < 1e-15);
        assert!((quad_ev.min_modulus_on_circle(1 << 14).unwrap() - 0.5).abs() < 1e-15);

        let cubic_ev = Mask::new(-1, vec![0.125, 0.75, 0.125]);
        assert!((cubic_ev.sup_norm_on_circle(1 << 14).unwrap() - 1.0).abs() < 1e-15);
        let (min, at) = cubic_ev.min_modulus_with_witness(1 << 14).unwrap();
        assert!((min - 0.5).abs() < 1e-15);
        assert!((at - Complex64::new(-1.0, 0.0)).norm() < 1e-12);

        let d = Mask::<f64>::delta();
        assert_eq!(d.sup_norm_on_circle(16).unwrap(), 1.0);
        assert_eq!(d.min_modulus_on_circle(16).unwrap(), 1.0);
    }

    #[test]
    fn circle_sampling_rejects_bad_sizes() {
        let m = Mask::new(0, vec![1.0, 2.0, 3.0]);
        assert!(m.sup_norm_on_circle(12).is_err());
        assert!(m.sup_norm_on_circle(8).is_err());
        assert!(m.sup_norm_on_circle(16).is_ok());
    }

    #[test]
    fn circle_max_is_monotone_in_samples() {
        let m = Mask::new(-2, vec![0.3, -1.1, 0.7, 2.0, -0.4]);
        let mut prev_max = 0.0;
        let mut prev_min = f64::INFINITY;
        for p in 5..14 {
            let max = m.sup_norm_on_circle(1 << p).unwrap();
            let min = m.min_modulus_on_circle(1 << p).unwrap();
            assert!(max >= prev_max - 1e-14);
            assert!(min <= prev_min + 1e-14);
            prev_max = max;
            prev_min = min;
        }
    }

    #[test]
    fn sequence_norms() {
        let d = Mask::<f64>::delta();
        assert_eq!(d.norm_l1(), 1.0);
        assert_eq!(d.norm_linf(), 1.0);
        let m = Mask::new(-1, vec![-0.5, 2.0, 0.25]);
        assert_eq!(m.norm_l1(), 2.75);
        assert_eq!(m.norm_linf(), 2.0);
    }

    #[test]
    fn evaluation_matches_sampling() {
        let m = Mask::new(-2, vec![0.3, -1.1, 0.7, 2.0, -0.4]);
        let samples = m.symbol_on_circle(32).unwrap();
        for (i, v) in samples.iter().enumerate() {
            let z = root_of_unity(i, 32);
            assert!((m.evaluate(z) - v).norm() < 1e-13);
        }
    }
}

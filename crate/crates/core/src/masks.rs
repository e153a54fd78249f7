//! Catalog of subdivision masks: B-splines, primal and dual pseudo-splines
//! and the Deslauriers–Dubuc interpolatory family.
//!
//! Everything here is generated in exact rational arithmetic. The
//! pseudo-spline symbol is
//!
//! ```text
//! α^{n,ν}(z) = z^{-⌊n/2⌋} (1+z)^n / 2^{n-1} · Σ_{j=0}^{ν} C(n/2+j-1, j) (1/2 - (z+z⁻¹)/4)^j
//! ```
//!
//! where `n/2` is a half-integer for odd `n`, so the binomials are the
//! generalized ones.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{MterError, Result};
use crate::laurent::{Coefficient, Mask, RationalMask};

/// Order and type parameter of a pseudo-spline, `0 ≤ ν ≤ ⌊n/2⌋ - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PseudoSplineParams {
    n: u32,
    nu: u32,
}

impl PseudoSplineParams {
    pub fn new(n: u32, nu: u32) -> Result<Self> {
        if n < 2 {
            return Err(MterError::Parameter(format!(
                "pseudo-spline order must be at least 2, got {n}"
            )));
        }
        if nu + 1 > n / 2 {
            return Err(MterError::Parameter(format!(
                "pseudo-spline type nu={nu} out of range 0..={} for n={n}",
                n / 2 - 1
            )));
        }
        Ok(PseudoSplineParams { n, nu })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// Primal pseudo-splines have even order.
    pub fn is_primal(&self) -> bool {
        self.n.is_multiple_of(2)
    }

    /// `n = 2k`, `ν = k - 1`.
    pub fn is_interpolatory(&self) -> bool {
        self.is_primal() && self.nu + 1 == self.n / 2
    }
}

/// Exact rational `p/q`.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Generalized binomial `C(x, j) = x (x-1) ⋯ (x-j+1) / j!` for rational `x`.
pub fn generalized_binomial(x: &BigRational, j: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..j {
        acc = acc * (x - BigRational::from_integer(BigInt::from(i)))
            / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

/// `(1+z)^m`.
fn binomial_power(m: u32) -> RationalMask {
    let one_plus_z = Mask::new(0, vec![BigRational::one(), BigRational::one()]);
    (0..m).fold(RationalMask::delta(), |acc, _| acc.convolve(&one_plus_z))
}

fn power_of_two(e: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << e)
}

/// Centered B-spline mask `z^{-⌊m/2⌋} (1+z)^m / 2^{m-1}`.
pub fn bspline_mask(order: u32) -> Result<RationalMask> {
    if order == 0 {
        return Err(MterError::Parameter(
            "B-spline order must be at least 1".into(),
        ));
    }
    let scale = power_of_two(order - 1).recip();
    Ok(binomial_power(order)
        .scale(&scale)
        .shift(-((order / 2) as i64)))
}

/// Pseudo-spline mask `α^{n,ν}`.
pub fn pseudo_spline_mask(p: PseudoSplineParams) -> RationalMask {
    let n = p.n;
    // 1/2 - (z + z⁻¹)/4
    let t = Mask::new(-1, vec![ratio(-1, 4), ratio(1, 2), ratio(-1, 4)]);
    let half_n = ratio(n as i64, 2);
    let mut sum = RationalMask::zero();
    let mut t_pow = RationalMask::delta();
    for j in 0..=p.nu {
        let c = generalized_binomial(
            &(&half_n + BigRational::from_integer(BigInt::from(j)) - BigRational::one()),
            j,
        );
        sum = sum.add(&t_pow.scale(&c));
        t_pow = t_pow.convolve(&t);
    }
    let base = binomial_power(n)
        .scale(&power_of_two(n - 1).recip())
        .shift(-((n / 2) as i64));
    base.convolve(&sum)
}

/// Deslauriers–Dubuc interpolatory mask of order `2k`, i.e. `α^{2k,k-1}`.
pub fn dd_mask(k: u32) -> Result<RationalMask> {
    if k == 0 {
        return Err(MterError::Parameter(
            "Deslauriers-Dubuc parameter k must be at least 1".into(),
        ));
    }
    Ok(pseudo_spline_mask(PseudoSplineParams::new(2 * k, k - 1)?))
}

/// Even part is δ₀: refinement keeps coarse samples at even positions.
pub fn is_interpolatory<T: Coefficient>(m: &Mask<T>) -> bool {
    m.even_part().is_delta()
}

/// `Σ_k α_{2k} = Σ_k α_{2k+1} = 1`.
pub fn normalization_check<T: Coefficient>(m: &Mask<T>) -> bool {
    let (even, odd) = m.parity_sums();
    even.approx_eq(&T::one()) && odd.approx_eq(&T::one())
}

/// A named catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaskFamily {
    BSpline {
        order: u32,
    },
    Pseudo(PseudoSplineParams),
    /// Deslauriers–Dubuc mask of (even) order `n = 2k`.
    DeslauriersDubuc {
        order: u32,
    },
}

impl MaskFamily {
    /// Builds from the CLI triple `family`, `order`, `nu`.
    pub fn from_parts(family: &str, order: u32, nu: Option<u32>) -> Result<Self> {
        if nu.is_some() && family != "pseudo" {
            return Err(MterError::Parameter(format!(
                "nu applies to pseudo-splines only, not {family}"
            )));
        }
        let fam = match family {
            "bspline" => MaskFamily::BSpline { order },
            "pseudo" => MaskFamily::Pseudo(PseudoSplineParams::new(order, nu.unwrap_or(0))?),
            "dd" => MaskFamily::DeslauriersDubuc { order },
            other => {
                return Err(MterError::Parameter(format!(
                    "unknown mask family {other:?}, expected bspline, pseudo or dd"
                )))
            }
        };
        fam.validate()?;
        Ok(fam)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            MaskFamily::BSpline { order: 0 } => Err(MterError::Parameter(
                "B-spline order must be at least 1".into(),
            )),
            MaskFamily::DeslauriersDubuc { order } if order < 2 || order % 2 != 0 => {
                Err(MterError::Parameter(format!(
                    "Deslauriers-Dubuc order must be even and at least 2, got {order}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn mask(&self) -> Result<RationalMask> {
        self.validate()?;
        match *self {
            MaskFamily::BSpline { order } => bspline_mask(order),
            MaskFamily::Pseudo(p) => Ok(pseudo_spline_mask(p)),
            MaskFamily::DeslauriersDubuc { order } => dd_mask(order / 2),
        }
    }
}

impl fmt::Display for MaskFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaskFamily::BSpline { order } => write!(f, "bspline-{order}"),
            MaskFamily::Pseudo(p) => write!(f, "pseudo-{}-{}", p.n, p.nu),
            MaskFamily::DeslauriersDubuc { order } => write!(f, "dd-{order}"),
        }
    }
}

impl FromStr for MaskFamily {
    type Err = MterError;

    /// Parses the [`Display`](fmt::Display) form, e.g. `pseudo-6-1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || MterError::Parameter(format!("cannot parse mask family {s:?}"));
        let mut parts = s.split('-');
        let family = parts.next().ok_or_else(bad)?;
        let order: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let nu = parts
            .next()
            .map(|v| v.parse::<u32>().map_err(|_| bad()))
            .transpose()?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Self::from_parts(family, order, nu)
    }
}

/// Masks exercised by the transform round-trip checks: linear through
/// sextic B-splines plus a spread of primal, dual and interpolatory
/// pseudo-splines.
pub fn catalog() -> Vec<MaskFamily> {
    let mut out: Vec<MaskFamily> = (1..=6).map(|order| MaskFamily::BSpline { order }).collect();
    for (n, nu) in [(4, 1), (5, 1), (6, 1), (6, 2), (7, 2), (8, 3)] {
        out.push(MaskFamily::Pseudo(
            PseudoSplineParams::new(n, nu).expect("valid catalog entry"),
        ));
    }
    out
}

/// `m(-1)` for a rational mask, exact.
pub fn symbol_at_minus_one(m: &RationalMask) -> BigRational {
    m.iter().fold(BigRational::zero(), |acc, (k, c)| {
        if k.rem_euclid(2) == 0 {
            acc + c
        } else {
            acc - c
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rmask(offset: i64, num: &[i64], den: i64) -> RationalMask {
        Mask::new(offset, num.iter().map(|n| ratio(*n, den)).collect())
    }

    /// Plain polynomial product, used as an independent expansion route.
    fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn bspline_examples() {
        assert_eq!(bspline_mask(3).unwrap(), rmask(-1, &[1, 3, 3, 1], 4));
        assert_eq!(bspline_mask(4).unwrap(), rmask(-2, &[1, 4, 6, 4, 1], 8));
        let linear_step = bspline_mask(1).unwrap();
        assert_eq!(linear_step, rmask(0, &[1, 1], 1));
        assert!(is_interpolatory(&linear_step));
        assert!(matches!(bspline_mask(0), Err(MterError::Parameter(_))));
    }

    #[test]
    fn four_point_dd_mask() {
        let dd = pseudo_spline_mask(PseudoSplineParams::new(4, 1).unwrap());
        assert_eq!(dd, rmask(-3, &[-1, 0, 9, 16, 9, 0, -1], 16));
        assert_eq!(dd_mask(2).unwrap(), dd);
        assert!(is_interpolatory(&dd));
    }

    #[test]
    fn dual_pseudo_spline_5_1() {
        assert_eq!(generalized_binomial(&ratio(5, 2), 1), ratio(5, 2));
        let m = pseudo_spline_mask(PseudoSplineParams::new(5, 1).unwrap());
        // z^{-2}(1+z)^5/16 · [1 + (5/2)(1/2 - (z+z⁻¹)/4)], expanded with plain
        // polynomial products on the shifted exponent range.
        let binom5 = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0].map(|c| c / 16.0);
        // z·[...] = -5/8 + (1 + 5/4) z - 5/8 z²
        let factor = [-0.625, 2.25, -0.625];
        let expected = poly_mul(&binom5, &factor);
        let got = m.to_f64();
        assert_eq!(got.offset(), -3);
        assert_eq!(got.len(), expected.len());
        for (g, e) in got.coeffs().iter().zip(&expected) {
            assert!((g - e).abs() < 1e-15);
        }
    }

    #[test]
    fn nu_zero_is_bspline() {
        for n in 2..=12 {
            let p = PseudoSplineParams::new(n, 0).unwrap();
            assert_eq!(pseudo_spline_mask(p), bspline_mask(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn primal_top_type_is_interpolatory() {
        for k in 1..=6 {
            let m = dd_mask(k).unwrap();
            assert_eq!(m.even_part(), RationalMask::delta(), "k = {k}");
        }
    }

    #[test]
    fn symbol_at_plus_and_minus_one() {
        for n in 2..=10 {
            for nu in 0..n / 2 {
                let m = pseudo_spline_mask(PseudoSplineParams::new(n, nu).unwrap());
                assert_eq!(m.sum(), ratio(2, 1), "({n},{nu})");
                assert!(symbol_at_minus_one(&m).is_zero(), "({n},{nu})");
                assert!(normalization_check(&m));
            }
        }
        for order in 1..=10 {
            assert!(normalization_check(&bspline_mask(order).unwrap()));
        }
        assert!(!normalization_check(&rmask(0, &[2], 1)));
    }

    #[test]
    fn pseudo_spline_support() {
        for n in 2..=11i64 {
            for nu in 0..(n / 2) {
                let m = pseudo_spline_mask(PseudoSplineParams::new(n as u32, nu as u32).unwrap());
                let lo = -(n / 2) - nu;
                let hi = (n + 1) / 2 + nu;
                assert_eq!(m.support(), Some((lo, hi)), "({n},{nu})");
            }
        }
    }

    #[test]
    fn parameter_range() {
        assert!(PseudoSplineParams::new(1, 0).is_err());
        assert!(PseudoSplineParams::new(4, 2).is_err());
        assert!(PseudoSplineParams::new(5, 1).is_ok());
        assert!(PseudoSplineParams::new(5, 2).is_err());
        assert!(PseudoSplineParams::new(8, 3).unwrap().is_interpolatory());
        assert!(!PseudoSplineParams::new(7, 2).unwrap().is_interpolatory());
    }

    #[test]
    fn interpolatory_predicate() {
        assert!(!is_interpolatory(&bspline_mask(3).unwrap()));
        assert!(is_interpolatory(&RationalMask::delta()));
        let float_dd = dd_mask(3).unwrap().to_f64();
        assert!(is_interpolatory(&float_dd));
    }

    #[test]
    fn half_integer_pascal_rule() {
        for num in [-3i64, 1, 3, 5, 7, 9] {
            let x = ratio(num, 2);
            for m in 1..8 {
                let lhs = generalized_binomial(&(&x + BigRational::one()), m);
                let rhs = generalized_binomial(&x, m) + generalized_binomial(&x, m - 1);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn binomial_series_identity() {
        // (1 - x)^{-t} = Σ_n C(t-1+n, n) x^n
        let t = ratio(5, 2);
        let x = 0.3f64;
        let series: f64 = (0..80u32)
            .map(|n| {
                let c = generalized_binomial(
                    &(&t - BigRational::one() + BigRational::from_integer(BigInt::from(n))),
                    n,
                );
                c.to_f64() * x.powi(n as i32)
            })
            .sum();
        assert!((series - (1.0 - x).powf(-2.5)).abs() < 1e-13);
    }

    #[test]
    fn family_parsing() {
        let fam: MaskFamily = "pseudo-6-1".parse().unwrap();
        assert_eq!(
            fam,
            MaskFamily::Pseudo(PseudoSplineParams::new(6, 1).unwrap())
        );
        assert_eq!(fam.to_string(), "pseudo-6-1");
        assert_eq!(
            MaskFamily::from_parts("dd", 4, None)
                .unwrap()
                .mask()
                .unwrap(),
            dd_mask(2).unwrap()
        );
        assert!(MaskFamily::from_parts("dd", 5, None).is_err());
        assert!(MaskFamily::from_parts("haar", 2, None).is_err());
        assert!(MaskFamily::from_parts("bspline", 3, Some(1)).is_err());
        for fam in catalog() {
            let m = fam.mask().unwrap();
            assert!(normalization_check(&m), "{fam}");
            assert_eq!(fam.to_string().parse::<MaskFamily>().unwrap(), fam);
        }
    }
}

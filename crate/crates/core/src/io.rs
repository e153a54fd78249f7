//! Text formats: masks, kernels and pyramids as JSON, signals as CSV.
//!
//! Functions here convert between values and strings only; the caller owns
//! the files.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{MterError, Result};
use crate::inverse::{DecayCertificate, Kernel, KernelSource};
use crate::laurent::{Mask, PeriodicSignal, RationalMask};
use crate::transform::Pyramid;

fn format_err(what: &str, e: impl std::fmt::Display) -> MterError {
    MterError::Format(format!("{what}: {e}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum MaskJson {
    Rational {
        offset: i64,
        num: Vec<i64>,
        den: Vec<i64>,
    },
    Float {
        offset: i64,
        coeffs: Vec<f64>,
    },
}

/// A mask read from JSON, exact when the file held numerators and
/// denominators.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedMask {
    Rational(RationalMask),
    Float(Mask<f64>),
}

impl LoadedMask {
    pub fn to_f64(&self) -> Mask<f64> {
        match self {
            LoadedMask::Rational(m) => m.to_f64(),
            LoadedMask::Float(m) => m.clone(),
        }
    }
}

pub fn rational_mask_to_json(mask: &RationalMask) -> Result<String> {
    let mut num = Vec::with_capacity(mask.len());
    let mut den = Vec::with_capacity(mask.len());
    for c in mask.coeffs() {
        let n = c.numer().to_i64();
        let d = c.denom().to_i64();
        match (n, d) {
            (Some(n), Some(d)) => {
                num.push(n);
                den.push(d);
            }
            _ => {
                return Err(MterError::Format(format!(
                    "coefficient {c} does not fit 64-bit integers"
                )))
            }
        }
    }
    let json = MaskJson::Rational {
        offset: mask.offset(),
        num,
        den,
    };
    serde_json::to_string_pretty(&json).map_err(|e| format_err("mask", e))
}

pub fn float_mask_to_json(mask: &Mask<f64>) -> Result<String> {
    let json = MaskJson::Float {
        offset: mask.offset(),
        coeffs: mask.coeffs().to_vec(),
    };
    serde_json::to_string_pretty(&json).map_err(|e| format_err("mask", e))
}

pub fn parse_mask(text: &str) -> Result<LoadedMask> {
    let json: MaskJson = serde_json::from_str(text).map_err(|e| format_err("mask", e))?;
    match json {
        MaskJson::Rational { offset, num, den } => {
            if num.len() != den.len() {
                return Err(MterError::Format(format!(
                    "mask has {} numerators but {} denominators",
                    num.len(),
                    den.len()
                )));
            }
            let coeffs = num
                .iter()
                .zip(&den)
                .map(|(&n, &d)| {
                    if d == 0 {
                        Err(MterError::Format("zero denominator in mask".into()))
                    } else {
                        Ok(BigRational::new(BigInt::from(n), BigInt::from(d)))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LoadedMask::Rational(Mask::new(offset, coeffs)))
        }
        MaskJson::Float { offset, coeffs } => {
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(MterError::Format("mask coefficients must be finite".into()));
            }
            Ok(LoadedMask::Float(Mask::new(offset, coeffs)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct KernelJson {
    offset: i64,
    coeffs: Vec<f64>,
    tol: f64,
    source: KernelSource,
    certificate: Option<DecayCertificate>,
}

pub fn kernel_to_json(kernel: &Kernel, certificate: Option<&DecayCertificate>) -> Result<String> {
    let json = KernelJson {
        offset: kernel.offset(),
        coeffs: kernel.coeffs().to_vec(),
        tol: kernel.tol(),
        source: kernel.source(),
        certificate: certificate.copied(),
    };
    serde_json::to_string_pretty(&json).map_err(|e| format_err("kernel", e))
}

pub fn parse_kernel(text: &str) -> Result<(Kernel, Option<DecayCertificate>)> {
    let json: KernelJson = serde_json::from_str(text).map_err(|e| format_err("kernel", e))?;
    if json.coeffs.is_empty() {
        return Err(MterError::Format("kernel has no coefficients".into()));
    }
    Ok((
        Kernel::from_coeffs(json.offset, json.coeffs, json.tol, json.source),
        json.certificate,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PyramidJson {
    mask_id: String,
    levels: usize,
    coarse: Vec<f64>,
    details: Vec<Vec<f64>>,
    packed: bool,
}

/// With `packed`, only odd detail entries are written.
pub fn pyramid_to_json(p: &Pyramid, packed: bool) -> Result<String> {
    let details = if packed {
        p.packed_details()?
    } else {
        p.details().to_vec()
    };
    let json = PyramidJson {
        mask_id: p.mask_id().to_string(),
        levels: p.levels(),
        coarse: p.coarse().values().to_vec(),
        details: details
            .into_iter()
            .map(PeriodicSignal::into_values)
            .collect(),
        packed,
    };
    serde_json::to_string(&json).map_err(|e| format_err("pyramid", e))
}

pub fn parse_pyramid(text: &str) -> Result<Pyramid> {
    let json: PyramidJson = serde_json::from_str(text).map_err(|e| format_err("pyramid", e))?;
    if json.levels != json.details.len() {
        return Err(MterError::Shape(format!(
            "pyramid declares {} levels but stores {}",
            json.levels,
            json.details.len()
        )));
    }
    let coarse = PeriodicSignal::new(json.coarse)?;
    let details = json
        .details
        .into_iter()
        .map(PeriodicSignal::new)
        .collect::<Result<Vec<_>>>()?;
    if json.packed {
        Pyramid::from_packed(coarse, details, json.mask_id)
    } else {
        Pyramid::new(coarse, details, json.mask_id)
    }
}

/// One value per line; blank lines and lines starting with `#` are skipped.
pub fn parse_signal_csv(text: &str) -> Result<PeriodicSignal> {
    let values = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            let v: f64 = l
                .parse()
                .map_err(|e| MterError::Format(format!("line {}: {e}: {l:?}", i + 1)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(MterError::Format(format!(
                    "line {}: non-finite value",
                    i + 1
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PeriodicSignal::new(values)
}

/// Seventeen significant digits per value.
pub fn signal_to_csv(signal: &PeriodicSignal) -> String {
    signal
        .values()
        .iter()
        .map(|v| format!("{v:.16e}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::masks::{bspline_mask, dd_mask};
    use crate::transform::{decompose, DecimationMode};

    #[test]
    fn rational_mask_round_trip() {
        let m = dd_mask(2).unwrap();
        let text = rational_mask_to_json(&m).unwrap();
        assert!(text.contains("\"num\""));
        assert_eq!(parse_mask(&text).unwrap(), LoadedMask::Rational(m));
    }

    #[test]
    fn float_mask_round_trip() {
        let m = bspline_mask(4).unwrap().to_f64().scale(&(1.0 / 3.0));
        let text = float_mask_to_json(&m).unwrap();
        assert_eq!(parse_mask(&text).unwrap(), LoadedMask::Float(m));
    }

    #[test]
    fn mask_format_errors() {
        assert!(parse_mask(r#"{"offset": 0, "num": [1, 2], "den": [1]}"#).is_err());
        assert!(parse_mask(r#"{"offset": 0, "num": [1], "den": [0]}"#).is_err());
        assert!(parse_mask(r#"{"coeffs": [1.0]}"#).is_err());
        assert!(parse_mask("[]").is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = PeriodicSignal::from_fn(50, |k| (k as f64 * 0.731).sin() / 3.0 + 1e-300 * k as f64);
        assert_eq!(parse_signal_csv(&signal_to_csv(&s)).unwrap(), s);
        let parsed = parse_signal_csv("# header\n1.5\n\n-2\n").unwrap();
        assert_eq!(parsed.values(), &[1.5, -2.0]);
        assert!(parse_signal_csv("1\nx\n").is_err());
        assert!(parse_signal_csv("").is_err());
        assert!(parse_signal_csv("nan\n").is_err());
    }

    #[test]
    fn pyramid_round_trip() {
        let alpha = bspline_mask(4).unwrap().to_f64();
        let c = PeriodicSignal::from_fn(32, |k| (k as f64).cos());
        let p = decompose(&c, &alpha, 2, &DecimationMode::exact(), "bspline-4").unwrap();
        let full = parse_pyramid(&pyramid_to_json(&p, false).unwrap()).unwrap();
        assert_eq!(full, p);
        let packed = parse_pyramid(&pyramid_to_json(&p, true).unwrap()).unwrap();
        assert_eq!(packed.coarse(), p.coarse());
        assert!(packed.details()[1].max_abs_diff(&p.details()[1]) < 1e-11);
        assert!(parse_pyramid(
            r#"{"mask_id":"x","levels":2,"coarse":[1,2],"details":[[0,0,0,0]],"packed":false}"#
        )
        .is_err());
    }

    #[test]
    fn kernel_round_trip() {
        let k = crate::inverse::even_inverse_closed_cubic(5);
        let cert = crate::inverse::DecayCertificate::from_extremes(1.0, 0.5, 1);
        let text = kernel_to_json(&k, Some(&cert)).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["certificate"]["K"], serde_json::json!(cert.k));
        let (back, c) = parse_kernel(&text).unwrap();
        assert_eq!(back.coeffs(), k.coeffs());
        assert_eq!(back.offset(), -5);
        assert_eq!(c, Some(cert));
        let text = kernel_to_json(&k, None).unwrap();
        assert!(text.contains("\"certificate\": null"));
    }
}

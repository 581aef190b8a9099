//! Fixed-point quantization of trigonometric polynomials and its byte format.
//!
//! Each real component is truncated toward zero to `M` fractional bits and
//! stored as the integer numerator `trunc(c · 2^M)`.
//!
//! Byte layout (little-endian):
//! - header: `N: u32`, `k: u32`, `M: u16`, `w: u8` (bytes per numerator, 1..=8)
//! - `k` terms: frequency in `⌈⌈log₂N⌉/8⌉` bytes, then the real and imaginary
//!   numerators as `w`-byte two's-complement integers.

use num_complex::Complex;
use serde::Serialize;

use super::poly::TrigPoly;
use crate::error::{invalid, Error, Result};
use crate::norms::lp_norm;
use crate::scalar::Real;

const HEADER_BYTES: usize = 4 + 4 + 2 + 1;
const MAX_FRACTION_BITS: u32 = 62;

/// Polynomial with fixed-point coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuantizedPoly {
    domain_size: usize,
    m_bits: u32,
    /// `(frequency, re numerator, im numerator)`, sorted by frequency.
    terms: Vec<(usize, i64, i64)>,
}

/// `⌈log₂ N⌉`, the bits needed to name a frequency.
pub fn frequency_bits(domain_size: usize) -> u32 {
    if domain_size <= 1 {
        0
    } else {
        usize::BITS - (domain_size - 1).leading_zeros()
    }
}

fn twos_complement_bits(v: i64) -> u32 {
    let magnitude = if v < 0 { !v } else { v };
    64 - magnitude.leading_zeros() + 1
}

/// `⌈log₂(√(2k) √N / (ε ‖f‖₂))⌉`, clamped at zero. Truncating both components
/// to this many bits keeps `‖P - P'‖₂ ≤ ε ‖f‖₂` for `k` distinct frequencies.
pub fn fraction_bits(k: usize, domain_size: usize, eps: f64, f_l2: f64) -> Result<u32> {
    if !(eps > 0.0) || eps.is_infinite() {
        return Err(invalid("eps", eps, "must be positive and finite"));
    }
    if !(f_l2 > 0.0) || f_l2.is_infinite() {
        return Err(invalid(
            "f_l2",
            f_l2,
            "reference norm must be positive and finite",
        ));
    }
    if k == 0 {
        return Ok(0);
    }
    let arg = (2.0 * k as f64).sqrt() * (domain_size as f64).sqrt() / (eps * f_l2);
    let m = arg.log2().ceil().max(0.0);
    if m > MAX_FRACTION_BITS as f64 {
        return Err(Error::QuantizationOverflow { m_bits: m as u32 });
    }
    Ok(m as u32)
}

impl QuantizedPoly {
    /// Truncates the coefficients of `poly` (canonicalized first) to `m_bits`
    /// fractional bits.
    pub fn quantize<T: Real>(poly: &TrigPoly<T>, m_bits: u32) -> Result<Self> {
        if m_bits > MAX_FRACTION_BITS {
            return Err(Error::QuantizationOverflow { m_bits });
        }
        if poly.domain_size() > u32::MAX as usize {
            return Err(invalid(
                "N",
                poly.domain_size() as f64,
                "must fit in 32 bits",
            ));
        }
        let scale = (m_bits as f64).exp2();
        let limit = 2f64.powi(63);
        let numerator = |x: T| -> Result<i64> {
            let v = (x.as_f64() * scale).trunc();
            if v.abs() >= limit {
                return Err(Error::QuantizationOverflow { m_bits });
            }
            Ok(v as i64)
        };
        let canonical = poly.canonicalize();
        if canonical.terms().len() > u32::MAX as usize {
            return Err(invalid(
                "k",
                canonical.terms().len() as f64,
                "must fit in 32 bits",
            ));
        }
        let terms = canonical
            .terms()
            .iter()
            .map(|&(m, c)| Ok((m, numerator(c.re)?, numerator(c.im)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            domain_size: poly.domain_size(),
            m_bits,
            terms,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn m_bits(&self) -> u32 {
        self.m_bits
    }

    pub fn terms(&self) -> &[(usize, i64, i64)] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.len()
    }

    /// Bits per stored numerator: sign, integer part and `M` fractional bits.
    pub fn value_bits(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|&(_, re, im)| [re, im])
            .map(twos_complement_bits)
            .max()
            .unwrap_or(1)
    }

    fn value_bytes(&self) -> usize {
        self.value_bits().div_ceil(8) as usize
    }

    /// Description length: header plus `⌈log₂N⌉` bits per frequency and two
    /// numerators per coefficient.
    pub fn bit_length(&self) -> u64 {
        let per_term = frequency_bits(self.domain_size) as u64 + 2 * self.value_bits() as u64;
        (HEADER_BYTES * 8) as u64 + self.terms.len() as u64 * per_term
    }

    pub fn decode<T: Real>(&self) -> TrigPoly<T> {
        let scale = (-(self.m_bits as f64)).exp2();
        let terms = self
            .terms
            .iter()
            .map(|&(m, re, im)| {
                (
                    m,
                    Complex::new(T::of(re as f64 * scale), T::of(im as f64 * scale)),
                )
            })
            .collect();
        TrigPoly::from_terms_unchecked(self.domain_size, terms)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let fb = frequency_bits(self.domain_size).div_ceil(8) as usize;
        let vb = self.value_bytes();
        let mut out = Vec::with_capacity(HEADER_BYTES + self.terms.len() * (fb + 2 * vb));
        out.extend_from_slice(&(self.domain_size as u32).to_le_bytes());
        out.extend_from_slice(&(self.terms.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.m_bits as u16).to_le_bytes());
        out.push(vb as u8);
        for &(m, re, im) in &self.terms {
            out.extend_from_slice(&(m as u64).to_le_bytes()[..fb]);
            out.extend_from_slice(&re.to_le_bytes()[..vb]);
            out.extend_from_slice(&im.to_le_bytes()[..vb]);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_BYTES {
            return Err(Error::Decode("truncated header"));
        }
        let domain_size = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let k = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let m_bits = u16::from_le_bytes(bytes[8..10].try_into().unwrap()) as u32;
        let vb = bytes[10] as usize;
        if domain_size == 0 {
            return Err(Error::Decode("domain size is zero"));
        }
        if m_bits > MAX_FRACTION_BITS {
            return Err(Error::Decode("fraction bits out of range"));
        }
        if !(1..=8).contains(&vb) {
            return Err(Error::Decode("numerator width out of range"));
        }
        let fb = frequency_bits(domain_size).div_ceil(8) as usize;
        let stride = fb + 2 * vb;
        let body = &bytes[HEADER_BYTES..];
        if Some(body.len()) != k.checked_mul(stride) {
            return Err(Error::Decode("body length does not match term count"));
        }
        let read_unsigned = |chunk: &[u8]| {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            u64::from_le_bytes(buf)
        };
        let read_signed = |chunk: &[u8]| {
            let negative = chunk.last().is_some_and(|&b| b & 0x80 != 0);
            let mut buf = [if negative { 0xFF } else { 0 }; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            i64::from_le_bytes(buf)
        };
        let mut terms = Vec::with_capacity(k);
        for chunk in body.chunks_exact(stride) {
            let m = read_unsigned(&chunk[..fb]) as usize;
            if m >= domain_size {
                return Err(Error::Decode("frequency outside the domain"));
            }
            if terms.last().is_some_and(|&(prev, _, _)| prev >= m) {
                return Err(Error::Decode("frequencies not strictly increasing"));
            }
            terms.push((
                m,
                read_signed(&chunk[fb..fb + vb]),
                read_signed(&chunk[fb + vb..]),
            ));
        }
        Ok(Self {
            domain_size,
            m_bits,
            terms,
        })
    }
}

/// `k log₂((1 + ε) N √k / ε)`, the growth rate of the optimal description
/// length up to machine-dependent constants.
pub fn rate_shape(k: usize, domain_size: usize, eps: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    k * ((1.0 + eps) * domain_size as f64 * k.sqrt() / eps).log2()
}

/// An encoded approximant together with its measured distortion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateDistortion {
    pub quantized: QuantizedPoly,
    pub m_bits: u32,
    pub bit_length: u64,
    pub byte_length: usize,
    pub rate_shape: f64,
    /// `‖P - P'‖₂`.
    pub distortion: f64,
    /// `ε ‖f‖₂`.
    pub budget: f64,
}

/// Quantizes `poly` so that the decoded polynomial is within `eps · f_l2`
/// of it in ℓ².
pub fn rate_distortion_encode<T: Real>(
    poly: &TrigPoly<T>,
    f_l2: T,
    eps: T,
) -> Result<RateDistortion> {
    let canonical = poly.canonicalize();
    let k = canonical.terms().len();
    let m_bits = fraction_bits(k, poly.domain_size(), eps.as_f64(), f_l2.as_f64())?;
    let quantized = QuantizedPoly::quantize(&canonical, m_bits)?;
    let decoded: TrigPoly<f64> = quantized.decode();
    // Distinct characters are orthogonal with ℓ² norm √N each.
    let coeff_err: f64 = canonical
        .terms()
        .iter()
        .zip(decoded.terms())
        .map(|(&(_, c), &(_, d))| (Complex::new(c.re.as_f64(), c.im.as_f64()) - d).norm_sqr())
        .sum();
    let distortion = (poly.domain_size() as f64 * coeff_err).sqrt();
    Ok(RateDistortion {
        m_bits,
        bit_length: quantized.bit_length(),
        byte_length: HEADER_BYTES
            + k * (frequency_bits(poly.domain_size()).div_ceil(8) as usize
                + 2 * quantized.value_bytes()),
        rate_shape: rate_shape(k, poly.domain_size(), eps.as_f64()),
        distortion,
        budget: eps.as_f64() * f_l2.as_f64(),
        quantized,
    })
}

/// `‖P - Q‖₂` computed by evaluating both polynomials.
pub fn l2_distance<T: Real>(p: &TrigPoly<T>, q: &TrigPoly<T>) -> Result<T> {
    lp_norm(&p.eval()?.sub(&q.eval()?)?, T::of(2.0))
}

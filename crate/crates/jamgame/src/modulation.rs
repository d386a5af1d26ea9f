//! Bit-error-rate cost for uncoded Gray-coded M-QAM.
//!
//! The cost of a link with SINR `s` is `g(s) = zeta / log2(M) * Q(sqrt(beta * s))`
//! with `zeta = 4 (1 - 1/sqrt(M))` and `beta = 3 / (M - 1)`, where `Q` is the
//! standard Gaussian tail. `g` is strictly decreasing and strictly convex on
//! `(0, inf)`, which is what the allocation solver's convexity certificates
//! rest on. The value is used as a smooth cost surrogate and is deliberately
//! not clamped to [0, 1/2] at low SINR.

use crate::error::{Error, Result};

/// Constellation sizes the BER approximation is specified for.
pub const VALID_MODULATION_SIZES: [u32; 5] = [2, 4, 16, 64, 256];

/// An uncoded M-QAM modulation scheme.
///
/// Only the constellation size is stored; `zeta`, `beta`, and the bits per
/// symbol are always derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MqamScheme {
    m: u32,
}

impl MqamScheme {
    pub fn new(m: u32) -> Result<Self> {
        if !VALID_MODULATION_SIZES.contains(&m) {
            return Err(Error::Domain(format!(
                "M must be in {{2,4,16,64,256}}, got {m}"
            )));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `zeta = 4 (1 - 1/sqrt(M))`
    pub fn zeta(&self) -> f64 {
        4.0 * (1.0 - 1.0 / (self.m as f64).sqrt())
    }

    /// `beta = 3 / (M - 1)`
    pub fn beta(&self) -> f64 {
        3.0 / (self.m as f64 - 1.0)
    }

    /// Bits per symbol, `log2(M)`.
    pub fn bits(&self) -> f64 {
        (self.m as f64).log2()
    }
}

/// Gaussian tail probability `Q(x) = 1/2 erfc(x / sqrt(2))`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Scheme-agnostic view of the link cost used by the solvers.
///
/// Unlike the checked [`ber`] family these are total on `s >= 0`: the
/// derivatives return signed infinities at the `s = 0` singularity, which the
/// root finders rely on for sign tests.
pub trait LinkCost {
    fn g(&self, s: f64) -> f64;
    fn g1(&self, s: f64) -> f64;
    fn g2(&self, s: f64) -> f64;
}

impl LinkCost for MqamScheme {
    fn g(&self, s: f64) -> f64 {
        self.zeta() / self.bits() * q_function((self.beta() * s).sqrt())
    }

    fn g1(&self, s: f64) -> f64 {
        if s == 0.0 {
            return f64::NEG_INFINITY;
        }
        let beta = self.beta();
        -self.zeta() * beta.sqrt()
            / (2.0 * self.bits() * (2.0 * std::f64::consts::PI * s).sqrt())
            * (-beta * s / 2.0).exp()
    }

    fn g2(&self, s: f64) -> f64 {
        if s == 0.0 {
            return f64::INFINITY;
        }
        let beta = self.beta();
        self.zeta() * beta.sqrt() * (1.0 + beta * s)
            / (4.0 * self.bits() * (2.0 * std::f64::consts::PI * s.powi(3)).sqrt())
            * (-beta * s / 2.0).exp()
    }
}

/// BER cost `g(s)` of receiving at SINR `s >= 0`.
pub fn ber(scheme: MqamScheme, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("SINR must be nonnegative, got {s}")));
    }
    Ok(scheme.zeta() / scheme.bits() * q_function((scheme.beta() * s).sqrt()))
}

/// First derivative `g'(s)`, strictly negative on `(0, inf)`.
///
/// `g'(s) = -zeta sqrt(beta) / (2 log2(M) sqrt(2 pi s)) exp(-beta s / 2)`;
/// unbounded as `s -> 0+`, so `s = 0` is rejected.
pub fn ber_prime(scheme: MqamScheme, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        if s == 0.0 {
            return Err(Error::Singularity(
                "BER derivative is unbounded at SINR 0".into(),
            ));
        }
        return Err(Error::Domain(format!("SINR must be positive, got {s}")));
    }
    let beta = scheme.beta();
    Ok(-scheme.zeta() * beta.sqrt() / (2.0 * scheme.bits() * (2.0 * std::f64::consts::PI * s).sqrt())
        * (-beta * s / 2.0).exp())
}

/// Second derivative `g''(s)`, strictly positive on `(0, inf)`.
///
/// `g''(s) = zeta sqrt(beta) (1 + beta s) / (4 log2(M) sqrt(2 pi s^3)) exp(-beta s / 2)`.
pub fn ber_second(scheme: MqamScheme, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        if s == 0.0 {
            return Err(Error::Singularity(
                "BER second derivative is unbounded at SINR 0".into(),
            ));
        }
        return Err(Error::Domain(format!("SINR must be positive, got {s}")));
    }
    let beta = scheme.beta();
    Ok(
        scheme.zeta() * beta.sqrt() * (1.0 + beta * s)
            / (4.0 * scheme.bits() * (2.0 * std::f64::consts::PI * s.powi(3)).sqrt())
            * (-beta * s / 2.0).exp(),
    )
}

//! Analytic runtime models. Logarithms are base 2.

use serde::Serialize;

use crate::error::{HlfError, Result};

/// Device coefficients and problem parameters for the classical/quantum
/// runtime ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimingParams {
    /// Seconds per `log² n` unit of the linear-algebra stage.
    pub c1: f64,
    /// Seconds per enumerated solution.
    pub c2: f64,
    /// Seconds per `r · 2^r` unit of repeated quantum sampling.
    pub c3: f64,
    pub n: u64,
    pub r: u32,
    /// Circuit depth; 1 for the constant-depth case.
    pub d: u32,
}

impl TimingParams {
    pub fn new(c1: f64, c2: f64, c3: f64, n: u64, r: u32) -> Self {
        Self {
            c1,
            c2,
            c3,
            n,
            r,
            d: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, c) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3)] {
            if !(c > 0.0 && c.is_finite()) {
                return Err(HlfError::Domain(format!(
                    "{name} must be positive, got {c}"
                )));
            }
        }
        if self.n < 2 {
            return Err(HlfError::Domain(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.r < 1 {
            return Err(HlfError::Domain("r must be at least 1".into()));
        }
        if self.d < 1 {
            return Err(HlfError::Domain("d must be at least 1".into()));
        }
        Ok(())
    }
}

/// `T_C / T_Q = c1 log²n / (c3 r 2^r d) + c2 / (c3 r)`.
pub fn runtime_ratio(p: &TimingParams) -> Result<f64> {
    p.validate()?;
    let log_n = (p.n as f64).log2();
    let r = p.r as f64;
    let first = p.c1 * log_n * log_n / (p.c3 * r * 2f64.powi(p.r as i32) * p.d as f64);
    let second = p.c2 / (p.c3 * r);
    Ok(first + second)
}

/// Smallest rank for which the ratio is at most one when `c1 = c2 = c3`:
/// `⌈2 log₂(log₂ n)⌉`.
pub fn r0_bound(n: u64) -> Result<u32> {
    if n < 4 {
        return Err(HlfError::Domain(format!("r0 bound needs n >= 4, got {n}")));
    }
    let v = 2.0 * (n as f64).log2().log2();
    Ok(v.ceil() as u32)
}

/// Pipelined enumeration time `dt · (tau + 2^r)`.
pub fn fpga_time_model(dt: f64, tau: u64, r: u32) -> Result<f64> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(HlfError::Domain(format!("dt must be positive, got {dt}")));
    }
    if r > 62 {
        return Err(HlfError::Domain(format!(
            "2^{r} overflows the cycle counter"
        )));
    }
    let cycles = tau
        .checked_add(1u64 << r)
        .ok_or_else(|| HlfError::Domain("pipeline cycle count overflows".into()))?;
    Ok(dt * cycles as f64)
}

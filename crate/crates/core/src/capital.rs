//! Dual-track capital: an exact rational plus a base-|Σ| logarithm.
//!
//! The exact track is the ground truth. Long runs may drop it once the
//! rational grows past a bit budget; after that only the log track moves.

use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::arith::{log_sigma, radix_pow};
use crate::error::Result;

/// How a run keeps its capital.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Exact rational throughout.
    Exact,
    /// Only the log track.
    LogOnly,
    /// Exact until numerator plus denominator exceed this many bits.
    ExactUpToBits(u64),
}

impl Default for Precision {
    fn default() -> Self {
        Precision::ExactUpToBits(1 << 16)
    }
}

#[derive(Debug, Clone)]
pub struct Capital {
    exact: Option<BigRational>,
    log: f64,
    radix: u32,
}

impl Capital {
    pub fn one(radix: u32) -> Self {
        Capital {
            exact: Some(BigRational::one()),
            log: 0.0,
            radix,
        }
    }

    pub fn from_rational(x: BigRational, radix: u32) -> Self {
        assert!(!x.is_negative(), "capital must be nonnegative");
        let log = if x.is_zero() {
            f64::NEG_INFINITY
        } else {
            log_sigma(&x, radix).expect("positive")
        };
        Capital {
            exact: Some(x),
            log,
            radix,
        }
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    /// Base-|Σ| logarithm; `-inf` for zero capital.
    pub fn log(&self) -> f64 {
        self.log
    }

    pub fn log2(&self) -> f64 {
        if self.radix == 2 {
            self.log
        } else {
            self.log * (self.radix as f64).log2()
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(x) => x.is_zero(),
            None => self.log == f64::NEG_INFINITY,
        }
    }

    pub fn drop_exact(&mut self) {
        self.exact = None;
    }

    /// Multiplies both tracks by a nonnegative rational factor.
    pub fn mul(&mut self, factor: &BigRational) -> Result<()> {
        assert!(!factor.is_negative(), "capital factor must be nonnegative");
        if factor.is_zero() {
            self.log = f64::NEG_INFINITY;
            if let Some(x) = self.exact.as_mut() {
                x.set_zero();
            }
            return Ok(());
        }
        if self.log != f64::NEG_INFINITY {
            self.log += log_sigma(factor, self.radix)?;
        }
        if let Some(x) = self.exact.as_mut() {
            *x *= factor;
        }
        Ok(())
    }

    /// Sum of two capitals; the exact track survives only if both have it.
    pub fn add(&self, other: &Capital) -> Capital {
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let (hi, lo) = if self.log >= other.log {
            (self.log, other.log)
        } else {
            (other.log, self.log)
        };
        let log = if hi == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            let r = self.radix as f64;
            hi + (1.0 + r.powf(lo - hi)).ln() / r.ln()
        };
        Capital {
            exact,
            log,
            radix: self.radix,
        }
    }

    pub(crate) fn apply_precision(&mut self, p: Precision) {
        match p {
            Precision::Exact => {}
            Precision::LogOnly => self.exact = None,
            Precision::ExactUpToBits(bits) => {
                if let Some(x) = &self.exact {
                    if x.numer().bits() + x.denom().bits() > bits {
                        self.exact = None;
                    }
                }
            }
        }
    }
}

/// `capital · |Σ|^shift`, the value of an s-gale built from a martingale.
#[derive(Debug, Clone)]
pub struct GaleValue {
    pub capital: Capital,
    pub shift: Rational64,
}

impl GaleValue {
    pub fn new(capital: Capital, shift: Rational64) -> Self {
        GaleValue { capital, shift }
    }

    pub fn log(&self) -> f64 {
        self.capital.log() + *self.shift.numer() as f64 / *self.shift.denom() as f64
    }

    /// The value as a rational, available when the shift is an integer.
    pub fn to_rational(&self) -> Option<BigRational> {
        let x = self.capital.exact()?;
        if !self.shift.is_integer() {
            return None;
        }
        Some(x * radix_pow(self.capital.radix(), self.shift.to_integer()))
    }

    /// Exact equality; `None` when either side lacks its exact track.
    pub fn exact_eq(&self, other: &GaleValue) -> Option<bool> {
        let a = self.capital.exact()?;
        let c = other.capital.exact()?;
        if a.is_zero() || c.is_zero() {
            return Some(a.is_zero() && c.is_zero());
        }
        // a·B^e = c·B^f  <=>  a^q · B^p = c^q  with p/q = e - f
        let diff = self.shift - other.shift;
        let p = *diff.numer();
        let q = *diff.denom() as usize;
        let radix = self.capital.radix();
        let lhs = num_traits::pow(a.clone(), q) * radix_pow(radix, p);
        let rhs = num_traits::pow(c.clone(), q);
        Some(lhs == rhs)
    }
}

//! Integer winding numbers of sampled closed loops in `C \ {0}`.
//!
//! The loop is accumulated one step at a time from the principal argument of
//! consecutive ratios. A step of a quarter turn or more is rejected: at that
//! point the sampling can no longer tell which way round the loop went.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum WindingError {
    #[error("loop has fewer than 3 samples")]
    TooFewSamples,
    #[error("sample {index} is zero or not finite")]
    Vanishes { index: usize },
    #[error("angle step of {gap:.4} rad at sample {index} reaches the quarter-turn cap")]
    Resolution { index: usize, gap: f64 },
}

/// Winding number around 0 of the closed loop through `values`.
///
/// The last sample connects back to the first.
pub fn winding_number<T: Scalar>(values: &[Complex<T>]) -> Result<i64, WindingError> {
    let n = values.len();
    if n < 3 {
        return Err(WindingError::TooFewSamples);
    }
    for (index, v) in values.iter().enumerate() {
        let m = v.norm();
        if !(m > T::zero()) || !m.is_finite() {
            return Err(WindingError::Vanishes { index });
        }
    }
    let cap = T::FRAC_PI_2();
    let mut total = T::zero();
    for i in 0..n {
        let prev = values[i];
        let next = values[(i + 1) % n];
        let step = (next * prev.conj()).arg();
        if step.abs() >= cap {
            return Err(WindingError::Resolution {
                index: (i + 1) % n,
                gap: step.abs().to_f64().unwrap_or(f64::NAN),
            });
        }
        total += step;
    }
    let turns = total / (lit::<T>(2.0) * T::PI());
    Ok(turns.round().to_i64().expect("finite winding"))
}

use crate::error::{MtemError, Result};

pub const MAX_BISECTIONS: usize = 200;
pub const ARGUMENT_TOLERANCE: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Root of a continuous, strictly increasing `f` with `f(lo) < 0`.
///
/// The right endpoint starts at `hi` and doubles (as a distance from `lo`)
/// until `f > 0`; bisection then runs until the bracket is narrower than
/// `ARGUMENT_TOLERANCE` or `MAX_BISECTIONS` halvings have been made.
pub fn bisect_increasing<F>(f: F, lo: f64, hi: f64) -> Result<Root>
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    if !(f_lo < 0.0) {
        return Err(MtemError::NoPositiveRoot { f0: f_lo });
    }
    let mut lo = lo;
    let mut width = (hi - lo).max(f64::MIN_POSITIVE);
    let mut hi = lo + width;
    let mut doublings = 0;
    loop {
        let v = f(hi);
        if v == 0.0 {
            return Ok(Root {
                x: hi,
                residual: 0.0,
                iterations: 0,
            });
        }
        if v > 0.0 {
            break;
        }
        if !v.is_finite() || doublings == MAX_DOUBLINGS {
            return Err(MtemError::RootNotConverged {
                iterations: doublings,
            });
        }
        lo = hi;
        width *= 2.0;
        hi = lo + width;
        doublings += 1;
    }

    let mut iterations = 0;
    while hi - lo > ARGUMENT_TOLERANCE && iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let x = 0.5 * (lo + hi);
    Ok(Root {
        x,
        residual: f(x),
        iterations,
    })
}

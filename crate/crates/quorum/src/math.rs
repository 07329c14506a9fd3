//! Float helpers routed through `libm` so the crate builds without `std`.
//!
//! `libm` is also used when `std` is available: the soft-float routines give
//! bit-identical results on every platform, which keeps seeded runs
//! reproducible across targets.

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// Round half-way cases up: 2.5 -> 3, -2.5 -> -2.
pub(crate) fn round_half_up(x: f64) -> f64 {
    floor(x + 0.5)
}

/// 1 / (1 + e^-z), the logistic function.
pub(crate) fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + exp(-z))
}

/// Squared Euclidean distance. Order-equivalent to the Euclidean distance
/// and free of the rounding that `sqrt` would add to tie comparisons.
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Replace logits by softmax probabilities, shifting by the maximum first
/// so large logits cannot overflow `exp`.
pub(crate) fn softmax_inplace(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for z in logits.iter_mut() {
        *z = exp(*z - max);
        sum += *z;
    }
    for z in logits.iter_mut() {
        *z /= sum;
    }
}

/// Index of the maximum, first occurrence winning ties. Panics on empty
/// input; callers guarantee at least one class.
pub(crate) fn argmax(xs: &[f64]) -> usize {
    assert!(!xs.is_empty());
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

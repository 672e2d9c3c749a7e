//! Floating point helpers shared by the schemes.
//!
//! Thresholds such as `k^(1-γ)` are computed in floating point. A value
//! within a relative `1e-12` of an integer is snapped to that integer so
//! that exact ties (`4^0.5 = 2`) compare as satisfied.

const SNAP: f64 = 1e-12;

pub fn pow(base: f64, exp: f64) -> f64 {
    libm::pow(base, exp)
}

pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// Rounds `x` to the nearest integer when it is within the tie tolerance.
pub fn snap(x: f64) -> f64 {
    let r = libm::round(x);
    if (x - r).abs() <= SNAP * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// `⌈x⌉` after snapping near-integers.
pub fn ceil_snapped(x: f64) -> u64 {
    ceil(snap(x)) as u64
}

/// `⌈base^exp⌉` with the tie policy applied.
pub fn ceil_pow(base: f64, exp: f64) -> u64 {
    ceil_snapped(pow(base, exp))
}

/// `⌊log₂ t⌋` for `t ≥ 1`, exact.
pub fn floor_log2(t: u64) -> u32 {
    debug_assert!(t >= 1);
    63 - t.leading_zeros()
}

/// Whether the integer `i` satisfies `i < log₂ t` (strict, real comparison),
/// evaluated exactly as `2^i < t`.
pub fn lt_log2(i: u64, t: u64) -> bool {
    i < 64 && (1u128 << i) < t as u128
}

/// Linear-interpolation quantile (type 7) of an already sorted slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = floor(h) as usize;
    let hi = ceil(h) as usize;
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_count_as_integral() {
        assert_eq!(ceil_pow(4.0, 0.5), 2);
        assert_eq!(ceil_pow(9.0, 0.5), 3);
        assert_eq!(ceil_pow(2.0, 0.5), 2);
        assert_eq!(ceil_pow(16.0, 0.5 * 4.0 / 4.0), 4);
    }

    #[test]
    fn log2_comparisons_are_exact() {
        assert_eq!(floor_log2(1), 0);
        assert_eq!(floor_log2(18), 4);
        assert_eq!(floor_log2(16), 4);
        assert!(lt_log2(3, 18));
        assert!(lt_log2(4, 18));
        assert!(!lt_log2(4, 16));
        assert!(!lt_log2(1, 2));
        assert!(lt_log2(0, 2));
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.5), Some(2.5));
        assert_eq!(quantile_sorted(&v, 1.0), Some(4.0));
        assert_eq!(quantile_sorted(&[], 0.5), None);
    }
}

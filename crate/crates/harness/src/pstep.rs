use pta_core::channels::{markovian_tphi, DecoherenceParams};
use pta_core::twirl::pstep_of;
use pta_core::{Error, Result};

/// Supremum of `p_step` over `T1 > 0` (fully decayed: `p_X = p_Y = p_Z = 1/4`).
pub const PSTEP_MAX: f64 = 0.75;

/// Decoherence parameters for a given `T1` with `T2 = ratio * T1`.
pub fn decoherence_for(
    t1: f64,
    t2_ratio: f64,
    alpha: f64,
    t_step: f64,
) -> Result<DecoherenceParams<f64>> {
    let t_phi = markovian_tphi(t1, t2_ratio * t1)?;
    DecoherenceParams::new(t1, t_phi, alpha, t_step)
}

/// Per-step error probability `p_X + p_Y + p_Z` at `T1`.
pub fn pstep_at(t1: f64, t2_ratio: f64, alpha: f64, t_step: f64) -> Result<f64> {
    Ok(pstep_of(&decoherence_for(t1, t2_ratio, alpha, t_step)?))
}

/// Finds `T1` such that the exact per-step error probability equals
/// `target`, holding `T2 / T1` fixed. Bisection in `log T1`, seeded by the
/// small-rate estimate `T1 = 3 t_step / (4 target)`.
pub fn invert_pstep(target: f64, t2_ratio: f64, alpha: f64, t_step: f64) -> Result<f64> {
    if !(target > 0.0 && target < PSTEP_MAX) {
        return Err(Error::InvalidParameters(format!(
            "p_step target {target} is unreachable (must lie in (0, {PSTEP_MAX}))"
        )));
    }
    if !(t2_ratio > 0.0 && t2_ratio <= 2.0) {
        return Err(Error::InvalidParameters(format!(
            "T2/T1 ratio {t2_ratio} must lie in (0, 2]"
        )));
    }
    let f = |t1: f64| pstep_at(t1, t2_ratio, alpha, t_step);
    let guess = 3.0 * t_step / (4.0 * target);
    let (mut lo, mut hi) = (guess, guess);
    // p_step decreases with T1: lo gives p >= target, hi gives p <= target
    while f(lo)? < target {
        lo /= 2.0;
        if lo < f64::MIN_POSITIVE * 1e10 {
            return Err(Error::InvalidParameters(format!(
                "p_step target {target} is unreachable"
            )));
        }
    }
    while f(hi)? > target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::InvalidParameters(format!(
                "p_step target {target} is unreachable"
            )));
        }
    }
    let mut best = (f64::INFINITY, guess);
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        let p = f(mid)?;
        let gap = (p - target).abs();
        if gap < best.0 {
            best = (gap, mid);
        }
        if gap <= 1e-12 * target.min(1.0) || mid == lo || mid == hi {
            break;
        }
        if p > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.0 > 1e-12 {
        return Err(Error::InvalidParameters(format!(
            "bisection for p_step {target} stalled at |error| = {:e}",
            best.0
        )));
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for &target in &[1e-4, 7.5e-4, 1e-2, 0.3] {
            for &ratio in &[0.5, 1.0, 2.0] {
                let t1 = invert_pstep(target, ratio, 0.0, 25e-9).unwrap();
                assert!((pstep_at(t1, ratio, 0.0, 25e-9).unwrap() - target).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn isotropic_estimate() {
        let t1 = invert_pstep(7.5e-4, 1.0, 0.0, 25e-9).unwrap();
        assert!((t1 / 25e-6 - 1.0).abs() < 1e-3, "T1 = {t1}");
    }

    #[test]
    fn small_target_gives_long_t1() {
        let t1 = invert_pstep(1e-12, 1.0, 0.0, 25e-9).unwrap();
        assert!(t1 > 1e3);
    }

    #[test]
    fn unreachable_targets() {
        assert!(invert_pstep(0.0, 1.0, 0.0, 25e-9).is_err());
        assert!(invert_pstep(0.75, 1.0, 0.0, 25e-9).is_err());
        assert!(invert_pstep(1e-3, 2.5, 0.0, 25e-9).is_err());
    }
}

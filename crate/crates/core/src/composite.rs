//! The spatial-frequency composite domain.
//!
//! Every (frequency, angle) pair collapses to one per-element phase increment
//! `Ω = 2π f d cosθ / c`. Covering the angle range over the whole band is the
//! same as covering the interval of `Ω` values, which is then sampled uniformly.

use crate::error::{Error, Result};
use crate::geometry::ArrayConfig;
use crate::num::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularRange<T> {
    pub theta_min: T,
    pub theta_max: T,
}

impl<T: Real> AngularRange<T> {
    /// Angles in radians within `(-π, π]`. `theta_min == theta_max` denotes a
    /// single direction.
    pub fn new(theta_min: T, theta_max: T) -> Result<Self> {
        if !(theta_min.is_finite() && theta_max.is_finite()) {
            return Err(Error::InvalidRange("angles must be finite".into()));
        }
        if theta_min > theta_max {
            return Err(Error::InvalidRange("theta_min must be < theta_max".into()));
        }
        let pi = T::PI();
        if theta_min <= -pi || theta_max > pi {
            return Err(Error::InvalidRange("angles must lie in (-pi, pi]".into()));
        }
        Ok(Self { theta_min, theta_max })
    }

    pub fn from_degrees(min_deg: T, max_deg: T) -> Result<Self> {
        Self::new(min_deg.to_radians(), max_deg.to_radians())
    }

    pub fn center(&self) -> T {
        (self.theta_min + self.theta_max) * T::half()
    }

    pub fn contains(&self, theta: T) -> bool {
        theta >= self.theta_min && theta <= self.theta_max
    }

    /// Minimum and maximum of `cos θ` over the range.
    pub fn cosine_extremes(&self) -> (T, T) {
        let a = self.theta_min.cos();
        let b = self.theta_max.cos();
        let mut lo = a.min(b);
        let mut hi = a.max(b);
        if self.contains(T::zero()) {
            hi = T::one();
        }
        if self.contains(T::PI()) {
            lo = -T::one();
        }
        (lo, hi)
    }
}

/// Closed interval `[lo, hi]` of the composite variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositeBounds<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompositeGrid<T> {
    pub lo: T,
    pub hi: T,
    samples: Vec<T>,
}

impl<T: Real> CompositeGrid<T> {
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn spacing(&self) -> T {
        if self.samples.len() < 2 {
            T::zero()
        } else {
            (self.hi - self.lo) / T::from_usize_lossy(self.samples.len() - 1)
        }
    }
}

/// Exact extent of `(2πd/c) f cosθ` over the band and the angle range.
///
/// The function is bilinear in `(f, cosθ)`, so the extremes sit at corners
/// of `[f_lo, f_hi] × [cos_min, cos_max]`.
pub fn composite_bounds<T: Real>(config: &ArrayConfig<T>, range: &AngularRange<T>) -> Result<CompositeBounds<T>> {
    config.validate()?;
    if range.theta_min > range.theta_max {
        return Err(Error::InvalidRange("empty angular range".into()));
    }
    let scale = T::two() * T::PI() * config.spacing / ArrayConfig::<T>::speed_of_light();
    let (f_lo, f_hi) = config.band_edges();
    let (c_lo, c_hi) = range.cosine_extremes();
    let corners = [f_lo * c_lo, f_lo * c_hi, f_hi * c_lo, f_hi * c_hi];
    let lo = corners.iter().copied().fold(T::infinity(), T::min);
    let hi = corners.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(CompositeBounds {
        lo: scale * lo,
        hi: scale * hi,
    })
}

/// `L` uniformly spaced samples including both endpoints.
pub fn sample_grid<T: Real>(bounds: CompositeBounds<T>, samples: usize) -> Result<CompositeGrid<T>> {
    if !(bounds.lo.is_finite() && bounds.hi.is_finite()) || bounds.lo > bounds.hi {
        return Err(Error::InvalidGrid("bounds must be finite with lo <= hi".into()));
    }
    match samples {
        0 => return Err(Error::InvalidGrid("at least one sample is required".into())),
        1 if bounds.lo != bounds.hi => {
            return Err(Error::InvalidGrid(
                "a single sample requires a degenerate interval".into(),
            ))
        }
        _ => {}
    }
    let pts = if samples == 1 {
        vec![bounds.lo]
    } else {
        let denom = T::from_usize_lossy(samples - 1);
        let width = bounds.hi - bounds.lo;
        (0..samples)
            .map(|l| {
                if l == samples - 1 {
                    bounds.hi
                } else {
                    bounds.lo + width * T::from_usize_lossy(l) / denom
                }
            })
            .collect()
    };
    Ok(CompositeGrid {
        lo: bounds.lo,
        hi: bounds.hi,
        samples: pts,
    })
}

/// Bounds and grid in one step.
pub fn composite_grid<T: Real>(
    config: &ArrayConfig<T>,
    range: &AngularRange<T>,
    samples: usize,
) -> Result<CompositeGrid<T>> {
    sample_grid(composite_bounds(config, range)?, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn default_config() -> ArrayConfig<f64> {
        ArrayConfig::new(32, 1e12, 1e11).unwrap()
    }

    /// Brute-force extent of `π f cosθ / f_c` on a dense grid.
    fn grid_extent(cfg: &ArrayConfig<f64>, range: &AngularRange<f64>, n: usize) -> (f64, f64) {
        let (f_lo, f_hi) = cfg.band_edges();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let f = f_lo + (f_hi - f_lo) * i as f64 / (n - 1) as f64;
            for j in 0..n {
                let th = range.theta_min + (range.theta_max - range.theta_min) * j as f64 / (n - 1) as f64;
                let v = PI * f * th.cos() / cfg.carrier_freq;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    #[test]
    fn bounds_for_zero_to_sixty() {
        let cfg = default_config();
        let range = AngularRange::from_degrees(0.0, 60.0).unwrap();
        let b = composite_bounds(&cfg, &range).unwrap();
        let (glo, ghi) = grid_extent(&cfg, &range, 1000);
        assert!((b.lo - glo).abs() < 1e-9, "{} vs {}", b.lo, glo);
        assert!((b.hi - ghi).abs() < 1e-9);
        assert!((b.lo - 1.4923).abs() < 1e-4);
        assert!((b.hi - 3.2987).abs() < 1e-4);
        assert!((b.lo - 0.475 * PI).abs() < 1e-12);
        assert!((b.hi - 1.05 * PI).abs() < 1e-12);
    }

    #[test]
    fn bounds_when_range_straddles_zero() {
        let cfg = default_config();
        let range = AngularRange::from_degrees(-60.0, 30.0).unwrap();
        let b = composite_bounds(&cfg, &range).unwrap();
        let (glo, ghi) = grid_extent(&cfg, &range, 1001);
        // Dense grid includes θ = 0 exactly (odd count over a symmetric-ish range is not
        // guaranteed), so allow the grid resolution.
        assert!((b.lo - glo).abs() < 1e-9);
        assert!(b.hi >= ghi - 1e-12 && b.hi - ghi < 1e-5);
        let scale = 2.0 * PI * cfg.spacing / crate::geometry::SPEED_OF_LIGHT;
        assert!((b.hi - scale * 1.05e12).abs() < 1e-12);
    }

    #[test]
    fn degenerate_bounds() {
        let cfg = ArrayConfig::<f64>::new(8, 1e12, 0.0).unwrap();
        let th = 0.7;
        let range = AngularRange::new(th, th).unwrap();
        let b = composite_bounds(&cfg, &range).unwrap();
        assert_eq!(b.lo, b.hi);
        assert!((b.lo - cfg.composite_variable(1e12, th)).abs() < 1e-12);
        let g = sample_grid(b, 1).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn grids() {
        let g = sample_grid(CompositeBounds { lo: 1.0, hi: 3.0 }, 3).unwrap();
        assert_eq!(g.samples(), &[1.0, 2.0, 3.0]);
        let g = sample_grid(CompositeBounds { lo: 0.0, hi: 1.0 }, 2).unwrap();
        assert_eq!(g.samples(), &[0.0, 1.0]);
        let g = sample_grid(CompositeBounds { lo: 1.4923f64, hi: 3.2987 }, 64).unwrap();
        assert!((g.spacing() - 0.028673).abs() < 1e-6);
        assert!(sample_grid(CompositeBounds { lo: 0.0, hi: 1.0 }, 0).is_err());
        assert!(sample_grid(CompositeBounds { lo: 0.0, hi: 1.0 }, 1).is_err());
    }

    #[test]
    fn range_validation() {
        let err = AngularRange::from_degrees(60.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("theta_min must be < theta_max"));
        assert!(AngularRange::new(-PI, 0.0).is_err());
        assert!(AngularRange::new(0.0, PI).is_ok());
    }

    #[test]
    fn range_through_pi_reaches_minus_one() {
        let r = AngularRange::new(2.0, PI).unwrap();
        assert_eq!(r.cosine_extremes().0, -1.0);
    }
}

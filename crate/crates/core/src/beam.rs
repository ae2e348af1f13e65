//! Beam-gain evaluation.

use rayon::prelude::*;

use crate::composite::{AngularRange, CompositeGrid};
use crate::error::{Error, Result};
use crate::geometry::{steering_vector, ArrayConfig, RotationAngles, SteeringVector};
use crate::num::{cis, to_db, Real, C};

/// Floor applied when converting a zero gain to decibels.
pub const DB_FLOOR: f64 = -120.0;

/// Analog beamformer: one phase per element, each weight `e^{jϑ}/√N`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamformerWeights<T> {
    pub phases: Vec<T>,
}

impl<T: Real> BeamformerWeights<T> {
    pub fn new(phases: Vec<T>) -> Self {
        Self { phases }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            phases: vec![T::zero(); n],
        }
    }

    /// Phases matched to a steering vector, giving gain `N` in that direction.
    pub fn matched(steering: &SteeringVector<T>) -> Self {
        Self::from_complex(steering.entries())
    }

    /// Unit-modulus projection of arbitrary complex weights; zero entries
    /// get phase 0.
    pub fn from_complex(v: &[C<T>]) -> Self {
        Self {
            phases: v
                .iter()
                .map(|z| {
                    if z.re == T::zero() && z.im == T::zero() {
                        T::zero()
                    } else {
                        z.arg()
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Complex weights `e^{jϑ_n}/√N`.
    pub fn to_complex(&self) -> Vec<C<T>> {
        let scale = T::one() / T::from_usize_lossy(self.len().max(1)).sqrt();
        self.phases.iter().map(|&p| cis(p) * scale).collect()
    }
}

/// `|ω^H a|²`.
pub fn beam_gain<T: Real>(weights: &BeamformerWeights<T>, steering: &SteeringVector<T>) -> Result<T> {
    if weights.len() != steering.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: steering.len(),
        });
    }
    let sum = weights
        .phases
        .iter()
        .zip(steering.entries())
        .fold(C::new(T::zero(), T::zero()), |acc, (&p, a)| acc + cis(-p) * a);
    Ok(sum.norm_sqr() / T::from_usize_lossy(weights.len().max(1)))
}

/// Gain at one composite-domain point, without materializing the steering vector.
pub fn composite_gain<T: Real>(phases: &[T], omega_bar: T, mu: T) -> T {
    let step = omega_bar * mu;
    let sum = phases
        .iter()
        .enumerate()
        .fold(C::new(T::zero(), T::zero()), |acc, (n, &p)| {
            acc + cis(step * T::from_usize_lossy(n) - p)
        });
    sum.norm_sqr() / T::from_usize_lossy(phases.len().max(1))
}

/// Gain at every grid point.
pub fn composite_gain_curve<T: Real>(weights: &BeamformerWeights<T>, mu: T, grid: &CompositeGrid<T>) -> Vec<T> {
    grid.samples()
        .iter()
        .map(|&w| composite_gain(&weights.phases, w, mu))
        .collect()
}

/// Worst-case gain over the grid and the first index attaining it.
pub fn min_composite_gain<T: Real>(weights: &BeamformerWeights<T>, mu: T, grid: &CompositeGrid<T>) -> Result<(T, usize)> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty composite grid".into()));
    }
    let mut best = (T::infinity(), 0);
    for (l, &w) in grid.samples().iter().enumerate() {
        let g = composite_gain(&weights.phases, w, mu);
        if g < best.0 {
            best = (g, l);
        }
    }
    Ok(best)
}

/// Gain over a frequency × angle grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GainMap<T> {
    /// Hz.
    pub freq_axis: Vec<T>,
    /// Radians.
    pub angle_axis: Vec<T>,
    /// Row per frequency, column per angle; `10 log10 G` floored at [`DB_FLOOR`].
    pub gains_db: Vec<Vec<T>>,
}

impl<T: Real> GainMap<T> {
    pub fn min_db(&self) -> T {
        self.gains_db
            .iter()
            .flatten()
            .copied()
            .fold(T::infinity(), T::min)
    }

    pub fn max_db(&self) -> T {
        self.gains_db
            .iter()
            .flatten()
            .copied()
            .fold(T::neg_infinity(), T::max)
    }
}

fn axis<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![(lo + hi) * T::half()];
    }
    let denom = T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * T::from_usize_lossy(i) / denom
            }
        })
        .collect()
}

/// Dense frequency–angle gain map for given weights and rotation.
///
/// Axes are uniform and inclusive of the band edges and the range limits.
/// A one-point axis samples the center of its interval.
pub fn gain_heatmap<T: Real>(
    weights: &BeamformerWeights<T>,
    angles: &RotationAngles<T>,
    config: &ArrayConfig<T>,
    range: &AngularRange<T>,
    nf: usize,
    na: usize,
) -> Result<GainMap<T>> {
    if nf == 0 || na == 0 {
        return Err(Error::InvalidGrid("heatmap needs at least one row and column".into()));
    }
    if weights.len() != config.num_antennas {
        return Err(Error::DimensionMismatch {
            expected: config.num_antennas,
            got: weights.len(),
        });
    }
    let (f_lo, f_hi) = config.band_edges();
    let freq_axis = axis(f_lo, f_hi, nf);
    let angle_axis = axis(range.theta_min, range.theta_max, na);
    let floor = T::lit(DB_FLOOR);
    let gains_db = freq_axis
        .par_iter()
        .map(|&f| {
            angle_axis
                .iter()
                .map(|&th| {
                    let a = steering_vector(config, f, th, angles)?;
                    Ok(to_db(beam_gain(weights, &a)?, floor))
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainMap {
        freq_axis,
        angle_axis,
        gains_db,
    })
}

//! Array geometry: rotations, element positions and steering vectors of a
//! rotatable uniform linear array.
//!
//! The array lies along the local x-axis. A rotation `R = Rx(α) Ry(β) Rz(γ)`
//! maps it into the global frame, and only the product `cos α cos γ` enters
//! the far-field phase progression seen at an angle of departure `θ`.

use crate::error::{Error, Result};
use crate::num::{cis, Real, C};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

pub type Mat3<T> = [[T; 3]; 3];
pub type Vec3<T> = [T; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrayConfig<T> {
    pub num_antennas: usize,
    /// Element spacing in meters.
    pub spacing: T,
    /// Carrier frequency in Hz.
    pub carrier_freq: T,
    /// Total bandwidth in Hz.
    pub bandwidth: T,
}

impl<T: Real> ArrayConfig<T> {
    /// Half-wavelength spacing at the carrier.
    pub fn new(num_antennas: usize, carrier_freq: T, bandwidth: T) -> Result<Self> {
        let spacing = T::lit(SPEED_OF_LIGHT) / (T::two() * carrier_freq);
        Self::with_spacing(num_antennas, spacing, carrier_freq, bandwidth)
    }

    pub fn with_spacing(num_antennas: usize, spacing: T, carrier_freq: T, bandwidth: T) -> Result<Self> {
        let cfg = Self {
            num_antennas,
            spacing,
            carrier_freq,
            bandwidth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_antennas < 1 {
            return Err(Error::InvalidConfig("number of antennas must be at least 1".into()));
        }
        if !(self.spacing.is_finite() && self.spacing > T::zero()) {
            return Err(Error::InvalidConfig("element spacing must be positive".into()));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth >= T::zero()) {
            return Err(Error::InvalidConfig("bandwidth must be non-negative".into()));
        }
        if !(self.carrier_freq.is_finite() && self.carrier_freq > self.bandwidth * T::half()) {
            return Err(Error::InvalidConfig(
                "carrier frequency must exceed half the bandwidth".into(),
            ));
        }
        Ok(())
    }

    pub fn speed_of_light() -> T {
        T::lit(SPEED_OF_LIGHT)
    }

    pub fn band_edges(&self) -> (T, T) {
        let half = self.bandwidth * T::half();
        (self.carrier_freq - half, self.carrier_freq + half)
    }

    /// Local x-coordinate of element `n` (0-based): `n * d`.
    pub fn element_offset(&self, n: usize) -> T {
        T::from_usize_lossy(n) * self.spacing
    }

    /// Per-element phase increment `2π f d cosθ / c` (radians).
    pub fn composite_variable(&self, freq: T, theta: T) -> T {
        T::two() * T::PI() * freq * self.spacing * theta.cos() / Self::speed_of_light()
    }
}

/// Rotations about the x, y and z axes, each normalized into `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationAngles<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

fn wrap_angle<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let r = x % tau;
    let r = if r < T::zero() { r + tau } else { r };
    // `r + tau` can round up to exactly tau for tiny negative inputs.
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

impl<T: Real> RotationAngles<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::Domain("rotation angles must be finite".into()));
        }
        Ok(Self {
            alpha: wrap_angle(alpha),
            beta: wrap_angle(beta),
            gamma: wrap_angle(gamma),
        })
    }

    pub fn zero() -> Self {
        Self {
            alpha: T::zero(),
            beta: T::zero(),
            gamma: T::zero(),
        }
    }

    /// The scalar `cos α cos γ` through which rotation enters the gain.
    pub fn rotation_coefficient(&self) -> T {
        self.alpha.cos() * self.gamma.cos()
    }
}

/// Per-element phase factors of the array response.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringVector<T>(pub Vec<C<T>>);

impl<T: Real> SteeringVector<T> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.0
    }
}

fn mat3_mul<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `R = Rx(α) · Ry(β) · Rz(γ)`.
pub fn rotation_matrix<T: Real>(angles: &RotationAngles<T>) -> Mat3<T> {
    let (z, o) = (T::zero(), T::one());
    let (sa, ca) = angles.alpha.sin_cos();
    let (sb, cb) = angles.beta.sin_cos();
    let (sg, cg) = angles.gamma.sin_cos();
    let rx = [[o, z, z], [z, ca, -sa], [z, sa, ca]];
    let ry = [[cb, z, sb], [z, o, z], [-sb, z, cb]];
    let rz = [[cg, -sg, z], [sg, cg, z], [z, z, o]];
    mat3_mul(&mat3_mul(&rx, &ry), &rz)
}

/// Global coordinates of every element: `R · [x_n, 0, 0]^T`, i.e. `x_n`
/// times the first column of `R`.
pub fn antenna_positions_global<T: Real>(config: &ArrayConfig<T>, angles: &RotationAngles<T>) -> Vec<Vec3<T>> {
    let r = rotation_matrix(angles);
    let axis = [r[0][0], r[1][0], r[2][0]];
    (0..config.num_antennas)
        .map(|n| {
            let x = config.element_offset(n);
            [axis[0] * x, axis[1] * x, axis[2] * x]
        })
        .collect()
}

/// Array response at frequency `freq` and angle of departure `theta`.
///
/// Entry `n` is `exp(j 2π f cosθ cosα cosγ x_n / c)`; `β` does not enter.
pub fn steering_vector<T: Real>(
    config: &ArrayConfig<T>,
    freq: T,
    theta: T,
    angles: &RotationAngles<T>,
) -> Result<SteeringVector<T>> {
    let (lo, hi) = config.band_edges();
    let slack = T::lit(1e-12) * config.carrier_freq;
    if !(freq >= lo - slack && freq <= hi + slack) {
        return Err(Error::OutOfBand {
            freq_hz: freq.to_f64_lossy(),
            lo_hz: lo.to_f64_lossy(),
            hi_hz: hi.to_f64_lossy(),
        });
    }
    let omega_bar = config.composite_variable(freq, theta);
    Ok(steering_vector_composite(
        config.num_antennas,
        omega_bar,
        angles.rotation_coefficient(),
    ))
}

/// Composite-domain response `[1, e^{jΩμ}, …, e^{j(N-1)Ωμ}]`.
pub fn steering_vector_composite<T: Real>(n: usize, omega_bar: T, mu: T) -> SteeringVector<T> {
    let step = omega_bar * mu;
    SteeringVector((0..n).map(|k| cis(step * T::from_usize_lossy(k))).collect())
}

use crate::error::{Error, Result};
use crate::num::Real;

/// `a μ² + b μ + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> Quadratic<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        Self { a, b, c }
    }

    #[inline]
    pub fn eval(&self, mu: T) -> T {
        (self.a * mu + self.b) * mu + self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarMaxMin<T> {
    pub mu: T,
    pub sigma: T,
}

fn lower_envelope<T: Real>(coeffs: &[Quadratic<T>], mu: T) -> T {
    coeffs.iter().map(|q| q.eval(mu)).fold(T::infinity(), T::min)
}

/// Real roots of `a x² + b x + c` (any of the coefficients may vanish).
fn real_roots<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == T::zero() {
        return Vec::new();
    }
    let tiny = T::epsilon() * T::lit(16.0) * scale;
    if a.abs() <= tiny {
        if b.abs() <= tiny {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        // Tangency can show up as a slightly negative discriminant.
        if disc > -T::lit(64.0) * T::epsilon() * b * b {
            return vec![-b / (T::two() * a)];
        }
        return Vec::new();
    }
    let sq = disc.sqrt();
    let qq = if b >= T::zero() {
        -(b + sq) * T::half()
    } else {
        -(b - sq) * T::half()
    };
    let mut roots = vec![qq / a];
    if qq != T::zero() {
        roots.push(c / qq);
    }
    roots
        .into_iter()
        .map(|mut x| {
            // Two Newton polish steps on the quadratic itself.
            for _ in 0..2 {
                let f = (a * x + b) * x + c;
                let df = T::two() * a * x + b;
                if df != T::zero() {
                    x = x - f / df;
                }
            }
            x
        })
        .collect()
}

/// Global maximizer of `min_l q_l(μ)` over `[lo, hi]` for concave `q_l`.
///
/// The envelope of concave quadratics is concave and piecewise quadratic, so
/// its maximum sits at an interval end, at the vertex of an active piece, or
/// where two pieces cross. All such candidates are enumerated. Among equal
/// maxima the smallest `μ` wins.
pub fn solve_scalar_maxmin_quadratic<T: Real>(coeffs: &[Quadratic<T>], lo: T, hi: T) -> Result<ScalarMaxMin<T>> {
    if coeffs.is_empty() {
        return Err(Error::Contract("at least one quadratic is required".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::Contract("interval must be finite with lo <= hi".into()));
    }
    if let Some(q) = coeffs.iter().find(|q| !(q.a <= T::zero())) {
        return Err(Error::Contract(format!(
            "quadratic coefficient {} is positive (non-concave)",
            q.a
        )));
    }
    if coeffs.iter().any(|q| !(q.b.is_finite() && q.c.is_finite())) {
        return Err(Error::Contract("coefficients must be finite".into()));
    }

    let inside = |x: T| x >= lo && x <= hi;
    let mut candidates = vec![lo, hi];
    for q in coeffs {
        if q.a < T::zero() {
            let v = -q.b / (T::two() * q.a);
            candidates.push(v.max(lo).min(hi));
        }
    }
    for (i, p) in coeffs.iter().enumerate() {
        for q in &coeffs[i + 1..] {
            for r in real_roots(p.a - q.a, p.b - q.b, p.c - q.c) {
                if inside(r) {
                    candidates.push(r);
                }
            }
        }
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).expect("finite candidates"));

    let mut best = ScalarMaxMin {
        mu: candidates[0],
        sigma: lower_envelope(coeffs, candidates[0]),
    };
    for &mu in &candidates[1..] {
        let sigma = lower_envelope(coeffs, mu);
        if sigma > best.sigma {
            best = ScalarMaxMin { mu, sigma };
        }
    }
    Ok(best)
}

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Analytic parameter paths `(u(t), g(t))` over `t ∈ [0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PathShape {
    /// `u = α·cos(πt/T − π)`, `g = α·sin(πt/T − π)`: half circle around the
    /// critical point.
    Arc,
    /// `u = α·(2t/T − 1)`, `g = tan θ·u`: straight line through the
    /// critical point (`θ = 0` is the `g ≡ 0` line).
    Line { theta: f64 },
    /// Fixed point `(u, g)`; `alpha` is ignored.
    Constant { u: f64, g: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LZPath {
    pub shape: PathShape,
    pub alpha: f64,
    pub period: f64,
}

/// One point of a sampled path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub u: f64,
    pub g: f64,
}

impl LZPath {
    pub fn arc(alpha: f64, period: f64) -> Self {
        Self { shape: PathShape::Arc, alpha, period }
    }

    pub fn line(alpha: f64, theta: f64, period: f64) -> Self {
        Self { shape: PathShape::Line { theta }, alpha, period }
    }

    pub fn constant(u: f64, g: f64, period: f64) -> Self {
        Self { shape: PathShape::Constant { u, g }, alpha: 0.0, period }
    }

    /// `(u, g)` at time `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let s = t / self.period;
        match self.shape {
            PathShape::Arc => {
                let phi = PI * s - PI;
                (self.alpha * phi.cos(), self.alpha * phi.sin())
            }
            PathShape::Line { theta } => {
                let u = self.alpha * (2.0 * s - 1.0);
                (u, theta.tan() * u)
            }
            PathShape::Constant { u, g } => (u, g),
        }
    }

    /// `n` evenly spaced samples over `[0, T]`.
    pub fn sample(&self, n: usize) -> Vec<PathSample> {
        (0..n)
            .map(|i| {
                let t = self.period * i as f64 / (n.max(2) - 1) as f64;
                let (u, g) = self.at(t);
                PathSample { t, u, g }
            })
            .collect()
    }
}

/// How a path sits relative to the critical point `u = g = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathClass {
    /// `u` changes sign while `(u, g)` stays away from the origin: the
    /// edge states are swapped.
    AroundCritical,
    /// `u` changes sign at the origin: the state is kept.
    ThroughCritical,
    /// `u` never changes sign.
    NoCrossing,
}

/// `1e-6` times the largest radius `√(u²+g²)` on the path.
pub fn default_tolerance(samples: &[PathSample]) -> f64 {
    1e-6 * samples.iter().map(|s| s.u.hypot(s.g)).fold(0.0, f64::max)
}

/// Classifies a sampled path. Each sign change of `u` between consecutive
/// samples is located by linear interpolation; the radius there is `|g|`
/// interpolated to the same point.
pub fn classify_path(samples: &[PathSample], tol: f64) -> Result<PathClass> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    if samples.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 samples, got {}", samples.len())));
    }
    if samples.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::InvalidParameter("sample times must be strictly increasing".into()));
    }
    let mut crossing_radii = Vec::new();
    for w in samples.windows(2) {
        let (p, q) = (w[0], w[1]);
        if p.u == 0.0 {
            continue;
        }
        if q.u == 0.0 || p.u.signum() != q.u.signum() {
            // Zero of u on [p, q], skipping over exact zeros at sample points.
            let next_nonzero = samples.iter().skip_while(|s| s.t <= p.t).find(|s| s.u != 0.0);
            if q.u == 0.0 && next_nonzero.map_or(true, |s| s.u.signum() == p.u.signum()) {
                continue;
            }
            let frac = p.u / (p.u - q.u);
            crossing_radii.push((p.g + frac * (q.g - p.g)).abs());
        }
    }
    if crossing_radii.is_empty() {
        return Ok(PathClass::NoCrossing);
    }
    if crossing_radii.iter().any(|&r| r < tol) {
        Ok(PathClass::ThroughCritical)
    } else {
        Ok(PathClass::AroundCritical)
    }
}

/// Rotation to the eigenbasis of the path-C Hamiltonian
/// `(u/cos θ)·[[cos θ, sin θ], [sin θ, −cos θ]]`.
///
/// Rows are `|↑⟩ = (cos θ/2, sin θ/2)` and `|↓⟩ = (−sin θ/2, cos θ/2)` in the
/// basis `{|L⟩, |R⟩}`; conjugation gives `diag(u/cos θ, −u/cos θ)`.
pub fn path_c_frame(theta: f64) -> Result<[[f64; 2]; 2]> {
    if !theta.is_finite() || theta.abs() >= PI / 2.0 {
        return Err(Error::InvalidParameter(format!("path-C angle needs |θ| < π/2, got {theta}")));
    }
    let (s, c) = (0.5 * theta).sin_cos();
    Ok([[c, s], [-s, c]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_share_endpoints() {
        let a = LZPath::arc(1.0, 200.0);
        let b = LZPath::line(1.0, 0.0, 200.0);
        for t in [0.0, 200.0] {
            let (ua, ga) = a.at(t);
            let (ub, gb) = b.at(t);
            assert!((ua - ub).abs() < 1e-15 && (ga - gb).abs() < 1e-15);
        }
    }

    #[test]
    fn classification_examples() {
        for n in [3, 10, 101] {
            let a = LZPath::arc(1.0, 200.0).sample(n);
            assert_eq!(classify_path(&a, default_tolerance(&a)).unwrap(), PathClass::AroundCritical);
            let b = LZPath::line(1.0, 0.0, 200.0).sample(n);
            assert_eq!(classify_path(&b, default_tolerance(&b)).unwrap(), PathClass::ThroughCritical);
            let c = LZPath::line(1.0, 0.7, 200.0).sample(n);
            assert_eq!(classify_path(&c, default_tolerance(&c)).unwrap(), PathClass::ThroughCritical);
        }
        let k = LZPath::constant(1.0, 0.1, 5.0).sample(4);
        assert_eq!(classify_path(&k, 1e-6).unwrap(), PathClass::NoCrossing);
    }

    #[test]
    fn touching_zero_without_sign_change_is_not_a_crossing() {
        let s: Vec<PathSample> = [(0.0, 1.0), (1.0, 0.0), (2.0, 1.0)]
            .iter()
            .map(|&(t, u)| PathSample { t, u, g: 0.0 })
            .collect();
        assert_eq!(classify_path(&s, 1e-6).unwrap(), PathClass::NoCrossing);
    }

    #[test]
    fn classification_errors() {
        let a = LZPath::arc(1.0, 1.0).sample(5);
        assert!(classify_path(&a, 0.0).is_err());
        assert!(classify_path(&a[..2], 1e-6).is_err());
        let mut bad = a.clone();
        bad[2].t = bad[1].t;
        assert!(classify_path(&bad, 1e-6).is_err());
    }

    #[test]
    fn frame_limits() {
        assert_eq!(path_c_frame(0.0).unwrap(), [[1.0, 0.0], [-0.0, 1.0]]);
        let f = path_c_frame(PI / 2.0 - 1e-9).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f[0][0] - h).abs() < 1e-9 && (f[0][1] - h).abs() < 1e-9);
        assert!(path_c_frame(PI / 2.0).is_err());
    }
}

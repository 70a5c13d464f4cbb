//! Ring-mode ("sonon") fields.
//!
//! The source ring has radius `R_o`, lies in the `z = 0` plane and is centred
//! on the origin. For ring azimuth `φ` the source point is
//! `q(φ) = (R_o cos φ, R_o sin φ, 0)` and `σ = |p − q(φ)|`. The poloidal angle
//! of the evaluation point is `θ' = atan2(p_z, ρ_p − R_o)` with `ρ_p` the
//! cylindrical radius of `p`.
//!
//! ```text
//! ξ_mn(p, t) = A e^{−iω₀t} ∫₀^{2π} e^{−i(mθ' − nφ)} j_m(k_r σ) k_r R_o dφ
//! ```
//!
//! The integrand is periodic in `φ`, so the uniform trapezoid rule converges
//! geometrically with a rate set by the distance from `p` to the ring.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{cylindrical_bessel, spherical_bessel_unchecked, MAX_ORDER};
use super::FieldError;

pub const DEFAULT_QUAD_NODES: usize = 512;
pub const MIN_QUAD_NODES: usize = 8;

/// Quantum numbers and physical scales of a ring mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SononMode {
    /// Poloidal index.
    pub m: u32,
    /// Toroidal index.
    pub n: u32,
    pub k_r: f64,
    pub ring_radius: f64,
    pub omega0: f64,
    pub amplitude: f64,
}

impl SononMode {
    pub fn new(m: u32, n: u32, k_r: f64, ring_radius: f64, omega0: f64) -> Result<Self, FieldError> {
        let mode = Self { m, n, k_r, ring_radius, omega0, amplitude: 1.0 };
        mode.validate()?;
        Ok(mode)
    }

    /// The achiral smoke-ring mode `R₁₀` in natural units (`k_r = R_o = ω₀ = 1`).
    pub fn r10() -> Self {
        Self { m: 1, n: 0, k_r: 1.0, ring_radius: 1.0, omega0: 1.0, amplitude: 1.0 }
    }

    /// The chiral mode `R₁₁` in natural units.
    pub fn r11() -> Self {
        Self { n: 1, ..Self::r10() }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn is_chiral(&self) -> bool {
        self.n > 0
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if self.m > MAX_ORDER {
            return Err(FieldError::UnsupportedOrder(self.m));
        }
        if self.m == 0 && self.n == 0 {
            return Err(FieldError::InvalidMode("(m, n) = (0, 0) carries no circulation".into()));
        }
        for (name, v) in [("k_r", self.k_r), ("ring_radius", self.ring_radius), ("omega0", self.omega0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FieldError::InvalidMode(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.amplitude.is_finite() {
            return Err(FieldError::InvalidMode("amplitude must be finite".into()));
        }
        Ok(())
    }
}

/// Evaluation point in space and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub position: [f64; 3],
    pub time: f64,
}

impl FieldPoint {
    pub fn new(position: [f64; 3], time: f64) -> Self {
        Self { position, time }
    }

    pub fn at_rest(position: [f64; 3]) -> Self {
        Self { position, time: 0.0 }
    }

    /// Point at distance `r` along the direction with polar angle `polar`
    /// (from the ring axis) and azimuth `azimuth`.
    pub fn spherical(r: f64, polar: f64, azimuth: f64, time: f64) -> Self {
        let (sp, cp) = polar.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Self { position: [r * sp * ca, r * sp * sa, r * cp], time }
    }

    fn is_finite(&self) -> bool {
        self.position.iter().all(|c| c.is_finite()) && self.time.is_finite()
    }
}

/// Complex field sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFieldValue(pub Complex64);

impl ComplexFieldValue {
    pub fn re(&self) -> f64 {
        self.0.re
    }
    pub fn im(&self) -> f64 {
        self.0.im
    }
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Ring integral `R_mn(p)` without the time factor.
pub fn ring_integral(mode: &SononMode, position: [f64; 3], quad_nodes: usize) -> Result<Complex64, FieldError> {
    mode.validate()?;
    if quad_nodes < MIN_QUAD_NODES {
        return Err(FieldError::Domain(format!(
            "quadrature needs at least {MIN_QUAD_NODES} nodes, got {quad_nodes}"
        )));
    }
    let [x, y, z] = position;
    let rho = x.hypot(y);
    let rho_az = y.atan2(x);
    let r0 = mode.ring_radius;
    // σ² = ρ² + R² − 2ρR cos(φ − φ_p) + z²
    let base = rho * rho + r0 * r0 + z * z;
    let cross = 2.0 * rho * r0;
    // Closest approach of p to the ring.
    let sigma_min = ((rho - r0).powi(2) + z * z).sqrt();
    if sigma_min <= 1e-12 * r0 {
        return Err(FieldError::SingularGeometry { distance: sigma_min });
    }

    let step = TAU / quad_nodes as f64;
    let n = f64::from(mode.n);
    let m = mode.m;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..quad_nodes {
        let phi = k as f64 * step;
        let sigma = (base - cross * (phi - rho_az).cos()).max(0.0).sqrt();
        let radial = spherical_bessel_unchecked(m, mode.k_r * sigma);
        acc += Complex64::from_polar(radial, n * phi);
    }
    let theta_p = z.atan2(rho - r0);
    let poloidal = Complex64::from_polar(1.0, -f64::from(m) * theta_p);
    Ok(poloidal * acc * (mode.k_r * r0 * step))
}

/// Full mode field `ξ_mn(p, t) = A e^{−iω₀t} R_mn(p)`.
pub fn sonon_field(mode: &SononMode, p: &FieldPoint, quad_nodes: usize) -> Result<ComplexFieldValue, FieldError> {
    if !p.is_finite() {
        return Err(FieldError::Domain("field point has non-finite coordinates".into()));
    }
    let r = ring_integral(mode, p.position, quad_nodes)?;
    Ok(ComplexFieldValue(carrier(mode, p.time) * r))
}

/// `ψ_o = A e^{−iω₀t}`.
pub fn carrier(mode: &SononMode, t: f64) -> Complex64 {
    Complex64::from_polar(mode.amplitude, -mode.omega0 * t)
}

/// Far-field carrier `χ(r) = sin(k_r r) / r`.
pub fn chi_far_field(r: f64, k_r: f64) -> Result<f64, FieldError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(FieldError::Domain(format!("radius must be positive, got {r}")));
    }
    if !(k_r > 0.0) || !k_r.is_finite() {
        return Err(FieldError::Domain(format!("wavenumber must be positive, got {k_r}")));
    }
    Ok((k_r * r).sin() / r)
}

/// Asymptotic amplitude `C` in `|ξ| ≈ C |sin(k_r r + δ)| / r` along the
/// direction with polar angle `polar`.
///
/// With `σ ≈ r − R_o sinθ cos(φ − φ_p)` and `j_m(x) ≈ sin(x − mπ/2)/x`, the
/// ring integral reduces to a Bessel integral and
/// `C = 2π |A| R_o |J_n(k_r R_o sin θ)|`.
pub fn far_field_amplitude(mode: &SononMode, polar: f64) -> f64 {
    let arg = mode.k_r * mode.ring_radius * polar.sin();
    TAU * mode.amplitude.abs() * mode.ring_radius * cylindrical_bessel(mode.n as i32, arg).abs()
}

/// Envelope comparison between the quadrature field and `χ` at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarFieldSample {
    pub r: f64,
    /// `max r'|ξ(r')|` over one half-wavelength starting at `r`.
    pub scaled_envelope: f64,
    /// `C`, the value `r·|ξ|` envelopes approach as `r → ∞`.
    pub asymptote: f64,
    pub rel_dev: f64,
}

/// Compares the envelope of `r·|ξ|` (over the half wavelength `[r, r + π/k_r]`)
/// against the asymptote of the far-field form `sin(k_r r)/r`, whose own
/// scaled envelope is flat.
pub fn far_field_deviation(
    mode: &SononMode,
    r: f64,
    polar: f64,
    azimuth: f64,
    quad_nodes: usize,
) -> Result<FarFieldSample, FieldError> {
    if !(r > 0.0) {
        return Err(FieldError::Domain(format!("radius must be positive, got {r}")));
    }
    let asymptote = far_field_amplitude(mode, polar);
    if asymptote <= 1e-12 * mode.ring_radius * mode.amplitude.abs() {
        return Err(FieldError::Domain(format!(
            "far-field amplitude vanishes along polar angle {polar} for n = {}",
            mode.n
        )));
    }
    let scaled = |rr: f64| -> Result<f64, FieldError> {
        let p = FieldPoint::spherical(rr, polar, azimuth, 0.0);
        Ok(rr * ring_integral(mode, p.position, quad_nodes)?.norm() * mode.amplitude.abs())
    };
    let half_wave = std::f64::consts::PI / mode.k_r;

    // Coarse scan, then golden-section refinement around the best sample.
    const COARSE: usize = 24;
    let h = half_wave / COARSE as f64;
    let mut best = (r, scaled(r)?);
    for i in 1..=COARSE {
        let rr = r + i as f64 * h;
        let v = scaled(rr)?;
        if v > best.1 {
            best = (rr, v);
        }
    }
    let (mut lo, mut hi) = ((best.0 - h).max(r), (best.0 + h).min(r + half_wave));
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - golden * (hi - lo);
    let mut b = lo + golden * (hi - lo);
    let (mut fa, mut fb) = (scaled(a)?, scaled(b)?);
    for _ in 0..40 {
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - golden * (hi - lo);
            fa = scaled(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + golden * (hi - lo);
            fb = scaled(b)?;
        }
    }
    let envelope = best.1.max(fa).max(fb);
    Ok(FarFieldSample {
        r,
        scaled_envelope: envelope,
        asymptote,
        rel_dev: (envelope - asymptote).abs() / asymptote,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotate_z(p: [f64; 3], angle: f64) -> [f64; 3] {
        let (s, c) = angle.sin_cos();
        [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
    }

    #[test]
    fn axisymmetry_preserves_magnitude() {
        let p = [1.7, -0.4, 0.9];
        for mode in [SononMode::r10(), SononMode::r11(), SononMode { m: 2, n: 3, ..SononMode::r11() }] {
            let a = sonon_field(&mode, &FieldPoint::at_rest(p), 512).unwrap();
            for angle in [0.3, 1.234, 2.9, -4.0] {
                let b = sonon_field(&mode, &FieldPoint::at_rest(rotate_z(p, angle)), 512).unwrap();
                assert!((a.norm() - b.norm()).abs() < 1e-10, "{mode:?} {angle}");
                // Rotation multiplies R_mn by e^{inΔφ}.
                let expected = a.0 * Complex64::from_polar(1.0, f64::from(mode.n) * angle);
                assert!((b.0 - expected).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn mirror_points_are_conjugate_for_achiral_mode() {
        let mode = SononMode::r10();
        for p in [[1.5, 0.2, 0.7], [0.3, 0.3, 2.0], [3.0, -1.0, 0.1]] {
            let up = ring_integral(&mode, p, 512).unwrap();
            let down = ring_integral(&mode, [p[0], p[1], -p[2]], 512).unwrap();
            assert!((up - down.conj()).norm() < 1e-13, "{up} vs {down}");
        }
    }

    #[test]
    fn quadrature_self_convergence() {
        // k_r σ_min ≥ 0.1 for every point here.
        let points = [[1.1, 0.0, 0.0], [0.95, 0.2, 0.05], [0.0, 0.0, 0.5], [4.0, 3.0, -2.0], [1.0, 0.0, 0.1]];
        for mode in [SononMode::r10(), SononMode::r11(), SononMode { m: 3, n: 2, ..SononMode::r10() }] {
            for p in points {
                let coarse = ring_integral(&mode, p, 256).unwrap();
                let fine = ring_integral(&mode, p, 512).unwrap();
                if mode.is_chiral() && p[0] == 0.0 && p[1] == 0.0 {
                    // e^{inφ} integrates to zero on the axis.
                    assert!(fine.norm() < 1e-13 && coarse.norm() < 1e-13);
                    continue;
                }
                let rel = (fine - coarse).norm() / fine.norm();
                assert!(rel < 1e-8, "{mode:?} {p:?}: rel {rel:e}");
            }
        }
    }

    #[test]
    fn time_factor_is_exact() {
        let mode = SononMode { omega0: 2.3, ..SononMode::r11() };
        let p = [1.4, 0.5, -0.3];
        let at0 = sonon_field(&mode, &FieldPoint::new(p, 0.0), 512).unwrap().0;
        for t in [0.1, 1.0, 17.5] {
            let at_t = sonon_field(&mode, &FieldPoint::new(p, t), 512).unwrap().0;
            let expected = at0 * Complex64::from_polar(1.0, -mode.omega0 * t);
            assert!((at_t - expected).norm() <= 1e-14 * at0.norm().max(1.0));
        }
    }

    #[test]
    fn singular_on_ring() {
        let mode = SononMode::r10();
        let p = FieldPoint::at_rest([0.0, 1.0, 0.0]);
        assert!(matches!(sonon_field(&mode, &p, 512), Err(FieldError::SingularGeometry { .. })));
        assert!(sonon_field(&mode, &FieldPoint::at_rest([1.0, 0.0, 1e-3]), 512).is_ok());
    }

    #[test]
    fn rejects_bad_modes_and_node_counts() {
        assert!(SononMode::new(0, 0, 1.0, 1.0, 1.0).is_err());
        assert!(SononMode::new(1, 0, -1.0, 1.0, 1.0).is_err());
        assert!(SononMode::new(4, 0, 1.0, 1.0, 1.0).is_err());
        assert!(SononMode::new(0, 1, 1.0, 1.0, 1.0).is_ok());
        let p = FieldPoint::at_rest([2.0, 0.0, 0.0]);
        assert!(sonon_field(&SononMode::r10(), &p, 4).is_err());
    }

    #[test]
    fn chi_values() {
        let k = 1.7;
        assert!(chi_far_field(std::f64::consts::PI / k, k).unwrap().abs() < 1e-15);
        let half = std::f64::consts::FRAC_PI_2 / k;
        assert!((chi_far_field(half, k).unwrap() - 2.0 * k / std::f64::consts::PI).abs() < 1e-14);
        assert!(chi_far_field(0.0, k).is_err());
        assert!(chi_far_field(-1.0, k).is_err());
    }

    #[test]
    fn far_field_deviation_shrinks_with_distance() {
        for (mode, polar) in [(SononMode::r10(), std::f64::consts::FRAC_PI_2), (SononMode::r11(), 1.0)] {
            let devs: Vec<f64> = [10.0, 20.0, 40.0]
                .iter()
                .map(|&r| far_field_deviation(&mode, r * mode.ring_radius, polar, 0.3, 512).unwrap().rel_dev)
                .collect();
            assert!(devs[0] > devs[1] && devs[1] > devs[2], "{mode:?}: {devs:?}");
            assert!(devs[2] < 0.05, "{devs:?}");
        }
    }

    #[test]
    fn far_field_amplitude_vanishes_on_axis_for_chiral_mode() {
        assert!(far_field_deviation(&SononMode::r11(), 20.0, 0.0, 0.0, 512).is_err());
    }
}

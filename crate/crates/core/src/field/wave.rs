//! Finite-difference residuals of the linear wave equation and the
//! Klein–Gordon dispersion relation.

use num_complex::Complex64;

use super::sonon::FieldPoint;
use super::FieldError;

/// `|∂²f/∂t² − c²∇²f|` at `p` by second-order central differences.
///
/// The spatial step is `h` and the time step is `h / c`, so both second
/// differences resolve the same number of wavelengths per step.
pub fn wave_residual<F>(sampler: F, p: &FieldPoint, h: f64, c: f64) -> Result<f64, FieldError>
where
    F: Fn(&FieldPoint) -> Result<Complex64, FieldError>,
{
    if !(h > 0.0) || !(c > 0.0) {
        return Err(FieldError::Domain(format!("step and wave speed must be positive (h = {h}, c = {c})")));
    }
    let centre = sampler(p)?;
    let dt = h / c;

    let shifted_t = |dt: f64| FieldPoint { position: p.position, time: p.time + dt };
    let d2t = (sampler(&shifted_t(dt))? + sampler(&shifted_t(-dt))? - 2.0 * centre) / (dt * dt);

    let mut lap = Complex64::new(0.0, 0.0);
    for axis in 0..3 {
        let mut plus = *p;
        let mut minus = *p;
        plus.position[axis] += h;
        minus.position[axis] -= h;
        lap += sampler(&plus)? + sampler(&minus)? - 2.0 * centre;
    }
    lap /= h * h;

    Ok((d2t - c * c * lap).norm())
}

/// `ω² − c²k² − ω₀²`: zero exactly when `e^{i(kx − ωt)}` solves the
/// Klein–Gordon equation with rest frequency `ω₀`.
pub fn kg_dispersion_residual(omega: f64, k: f64, c: f64, omega0: f64) -> f64 {
    omega * omega - c * c * k * k - omega0 * omega0
}

/// Positive-frequency mass-shell solution `ω = sqrt(c²k² + ω₀²)`.
pub fn kg_frequency(k: f64, c: f64, omega0: f64) -> f64 {
    (c * c * k * k + omega0 * omega0).sqrt()
}

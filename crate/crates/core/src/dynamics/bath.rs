use crate::error::{invalid, Result};

use super::dephasing::{DephasingSpec, SpectralParams};

/// Unnormalized dephasing rate ∫₀^∞ dω ωⁿ e^{−ω/ω_c} (1 + 2N(ω,T)),
/// with N the Bose-Einstein occupation. The coupling prefactor is not
/// included, so only ratios and trends of the result are meaningful.
pub fn gamma_from_spectrum(spec: &DephasingSpec) -> Result<f64> {
    let p = spec.spectral.ok_or_else(|| invalid("spectral", "spectral parameters missing"))?;
    spectral_integral(&p)
}

pub fn spectral_integral(p: &SpectralParams) -> Result<f64> {
    if !(p.cutoff > 0.0 && p.cutoff.is_finite()) {
        return Err(invalid("cutoff", "must be positive"));
    }
    if !(p.temperature >= 0.0 && p.temperature.is_finite()) {
        return Err(invalid("temperature", "must be non-negative"));
    }
    if p.exponent_n == 0 && p.temperature > 0.0 {
        return Err(invalid("exponent_n", "n = 0 diverges at the origin for T > 0"));
    }
    let n = p.exponent_n as i32;
    let (wc, temp) = (p.cutoff, p.temperature);
    let integrand = |w: f64| {
        let thermal = if temp > 0.0 {
            if w == 0.0 {
                // ωⁿ·2T/ω at the origin
                return if n == 1 { 2.0 * temp } else { 0.0 };
            }
            1.0 + 2.0 / (w / temp).exp_m1()
        } else {
            1.0
        };
        w.powi(n) * (-w / wc).exp() * thermal
    };
    // The weight decays as e^{−ω/ω_c}; beyond (60 + 2n) ω_c it is negligible.
    let upper = wc * (60.0 + 2.0 * f64::from(n));
    let pieces = 64;
    let h = upper / pieces as f64;
    let total = (0..pieces)
        .map(|k| {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            adaptive_simpson(&integrand, a, b, 1e-14 * wc.powi(n + 1).max(1e-300), 40)
        })
        .sum();
    Ok(total)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, lm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, rm, fb, right, tol / 2.0, depth - 1)
}

//! Occupancy density by a single Bromwich integral along a vertical line in
//! the `theta1` plane, and the closed form of the two-dimensional transform `f`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::boundary::{g_eval, POLE_THRESHOLD};
use crate::error::{Error, Result};
use crate::model::{apply, NormalizedModel, Vec2};
use crate::quad::{integrate_line, Tolerance};

/// Minimum normalized height above the boundary served by [`density`].
pub const Z2_MIN: f64 = 1e-3;
/// Minimum normalized distance from the starting level when `x2 > 0`.
pub const START_LEVEL_GAP: f64 = 1e-3;
pub const DEFAULT_MAX_NODES: usize = 200_000;

/// `(e^u - 1) / u`, accurate near zero.
fn phi(u: Complex64) -> Complex64 {
    if u.norm() < 1e-3 {
        Complex64::new(1.0, 0.0) + u * (0.5 + u * (1.0 / 6.0 + u / 24.0))
    } else {
        (u.exp() - 1.0) / u
    }
}

/// Laplace transform `f(theta)` of the occupancy measure, for `theta` where it converges
/// (and its analytic continuation elsewhere).
pub fn f_transform(model: &NormalizedModel, theta: [Complex64; 2]) -> Result<Complex64> {
    let [t1, t2] = theta;
    let (upper, lower) = model.theta2_branches(t1)?;
    let gap = t2 - upper;
    if gap.norm() < POLE_THRESHOLD {
        return Err(Error::AtPole {
            modulus: gap.norm(),
        });
    }
    let g = g_eval(model, t1)?;
    let x2 = model.x[1];
    let e_lower = (t1 * model.x[0] + lower * x2).exp();
    // -exp(theta.x) - (R.theta) g = -(theta2 - Theta2-)(e_lower x2 phi + g); divide by Q
    let free = e_lower * x2 * phi((t2 - lower) * x2);
    Ok(-2.0 * (free + g) / gap)
}

/// Real part of the line `Re theta1 = epsilon` used for the density integral.
///
/// Without a hint this is the middle of the analytic strip; with a direction
/// `alpha` it is the saddle abscissa clamped a little inside the strip.
pub fn contour_abscissa(model: &NormalizedModel, alpha: Option<f64>) -> f64 {
    let (lo, hi) = model.geometry().strip;
    match alpha {
        None => 0.5 * (lo + hi),
        Some(a) => {
            let margin = 1e-3 * (hi - lo);
            let saddle = -model.mu[0] + model.norm_mu() * a.cos();
            saddle.clamp(lo + margin, hi - margin)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub nodes_used: usize,
    pub contour_abscissa: f64,
    pub truncation_height: f64,
    /// Imaginary part of the computed integral; already included in `abs_error_estimate`.
    pub imaginary_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Abscissa {
    Midpoint,
    /// Saddle abscissa for the direction of the (normalized) target point.
    Saddle,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrandForm {
    /// Use the origin form when the start is the origin, the general form otherwise.
    Auto,
    /// `exp(-z1 theta1 - z2 Theta2+) g(theta1)`; only valid for a start at the origin.
    Origin,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_nodes: usize,
    pub abscissa: Abscissa,
    pub form: IntegrandForm,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_nodes: DEFAULT_MAX_NODES,
            abscissa: Abscissa::Saddle,
            form: IntegrandForm::Auto,
        }
    }
}

/// The two pieces of the general integrand before division by `2 s`: the free
/// Green-function part and the reflected part.
pub(crate) fn integrand_parts(
    model: &NormalizedModel,
    z: Vec2,
    theta1: Complex64,
) -> (Complex64, Complex64, Complex64) {
    let s = model.branch_sqrt_unchecked(theta1);
    let upper = -model.mu[1] + s;
    let lower = -model.mu[1] - s;
    let [x1, x2] = model.x;
    let [z1, z2] = z;
    let chosen = if z2 >= x2 { upper } else { lower };
    let free = (theta1 * (x1 - z1) + chosen * (x2 - z2)).exp();
    let ratio = (model.r * theta1 + upper) / (model.r * theta1 + lower);
    let reflected = -ratio * (theta1 * (x1 - z1) + lower * x2 - upper * z2).exp();
    (free, reflected, 2.0 * s)
}

fn integrand(
    model: &NormalizedModel,
    z: Vec2,
    form: IntegrandForm,
    theta1: Complex64,
) -> Complex64 {
    match form {
        IntegrandForm::Origin => {
            let s = model.branch_sqrt_unchecked(theta1);
            let upper = -model.mu[1] + s;
            let lower = -model.mu[1] - s;
            let g = -1.0 / (model.r * theta1 + lower);
            (-z[0] * theta1 - z[1] * upper).exp() * g
        }
        _ => {
            let (free, reflected, two_s) = integrand_parts(model, z, theta1);
            (free + reflected) / two_s
        }
    }
}

/// Occupancy density at `z` (raw coordinates) with absolute tolerance `tol`.
pub fn density(model: &NormalizedModel, z: Vec2, tol: f64) -> Result<QuadratureResult> {
    density_with(
        model,
        z,
        &DensityOptions {
            abs_tol: tol,
            ..DensityOptions::default()
        },
    )
}

pub fn density_with(
    model: &NormalizedModel,
    z_raw: Vec2,
    opts: &DensityOptions,
) -> Result<QuadratureResult> {
    let z = apply(&model.t, z_raw);
    let [z1, z2] = z;
    if !(z1.is_finite() && z2.is_finite()) {
        return Err(Error::NonFinite("z"));
    }
    if z2 < Z2_MIN {
        return Err(Error::BoundaryTooClose { z2, min: Z2_MIN });
    }
    let x2 = model.x[1];
    if x2 > 0.0 && (z2 - x2).abs() < START_LEVEL_GAP {
        return Err(Error::NearStartLevel {
            z2,
            x2,
            min: START_LEVEL_GAP,
        });
    }
    let at_origin = model.x == [0.0, 0.0];
    let form = match opts.form {
        IntegrandForm::Auto if at_origin => IntegrandForm::Origin,
        IntegrandForm::Auto => IntegrandForm::General,
        f => f,
    };

    let eps = match opts.abscissa {
        Abscissa::Midpoint => contour_abscissa(model, None),
        Abscissa::Saddle => contour_abscissa(model, Some(z2.atan2(z1))),
        Abscissa::Fixed(e) => e,
    };
    let decay = (z2 + x2).min((z2 - x2).abs());

    let f = |t: f64| integrand(model, z, form, Complex64::new(eps, t));
    // |F| ~ C e^{-decay |t|}, so the mass beyond T on both sides is about 2|F(T)|/decay
    let tail = |big_t: f64| 2.0 * f(big_t).norm() / decay;
    let tol = Tolerance {
        abs: opts.abs_tol * PI,
        rel: opts.rel_tol,
        max_nodes: opts.max_nodes,
    };
    let line = integrate_line(&f, &tail, 8.0 / decay, tol);

    let value = line.value / PI;
    let roundoff = f64::EPSILON * line.max_abs * 2.0 * line.half_width / PI;
    let abs_error_estimate = line.error / PI + value.im.abs() + roundoff;
    if !line.converged {
        return Err(Error::NoConvergence {
            nodes: line.nodes,
            error: abs_error_estimate,
        });
    }
    Ok(QuadratureResult {
        value: value.re * model.det_t.abs(),
        abs_error_estimate: abs_error_estimate * model.det_t.abs(),
        nodes_used: line.nodes,
        contour_abscissa: eps,
        truncation_height: line.half_width,
        imaginary_residual: value.im * model.det_t.abs(),
    })
}

//! Martin-kernel limits along rays and the closed-form positive harmonic
//! functions of the reflected generator.
//!
//! Harmonic functions are expressed in normalized coordinates, where the
//! generator is `h -> 0.5 * lap(h) + mu . grad(h)` and the boundary condition
//! is `r d1 h + d2 h = 0` on `x2 = 0`. [`martin_limit`] accepts raw coordinates.

use crate::asympt::{classify, pole_point_tilde, saddle, RegimeTag, DEFAULT_TOL_COINCIDE};
use crate::error::{Error, Result};
use crate::model::{apply, DriftSign, NormalizedModel, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Saddle(f64),
    Pole,
    Constant,
}

/// `h(x) = sum_k c_k exp(theta_k . x)`, normalized so that `h(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicFunction {
    pub family: Family,
    pub mu: Vec2,
    pub r: f64,
    terms: Vec<(f64, Vec2)>,
}

impl HarmonicFunction {
    pub fn eval(&self, x: Vec2) -> f64 {
        self.terms
            .iter()
            .map(|(c, th)| c * (th[0] * x[0] + th[1] * x[1]).exp())
            .sum()
    }
}

fn require_negative_drift(model: &NormalizedModel) -> Result<()> {
    if model.drift_sign != DriftSign::Mu2Negative {
        return Err(Error::NotImplementedForPositiveDrift);
    }
    Ok(())
}

fn saddle_terms(model: &NormalizedModel, alpha: f64) -> Result<Vec<(f64, Vec2)>> {
    let sd = saddle(model, alpha)?;
    let gap = sd.theta_alpha[1] - sd.theta_alpha_tilde[1];
    Ok(vec![
        (model.r_dot(sd.theta_alpha) / gap, sd.theta_alpha_tilde),
        (-model.r_dot(sd.theta_alpha_tilde) / gap, sd.theta_alpha),
    ])
}

pub fn harmonic(model: &NormalizedModel, family: Family) -> Result<HarmonicFunction> {
    require_negative_drift(model)?;
    let geo = model.geometry();
    let terms = match family {
        Family::Constant => vec![(1.0, [0.0, 0.0])],
        Family::Pole => {
            let p = geo
                .pole_p
                .ok_or(Error::FamilyUnavailable("no pole family when alpha1 <= 0"))?;
            vec![(1.0, pole_point_tilde(model, p))]
        }
        Family::Saddle(alpha) => {
            if !(alpha > geo.alpha1 && alpha < geo.alpha0) {
                return Err(Error::FamilyUnavailable(
                    "saddle family needs alpha1 < alpha < alpha0",
                ));
            }
            saddle_terms(model, alpha)?
        }
    };
    Ok(HarmonicFunction {
        family,
        mu: model.mu,
        r: model.r,
        terms,
    })
}

/// Limit of the Martin kernel `k(x, y)` as `y -> inf` along direction `alpha`,
/// with reference state at the origin. `x` is in raw coordinates.
pub fn martin_limit(model: &NormalizedModel, alpha: f64, x: Vec2) -> Result<f64> {
    require_negative_drift(model)?;
    let regime = classify(model, alpha, DEFAULT_TOL_COINCIDE)?;
    let family = match regime.tag {
        RegimeTag::PoleP | RegimeTag::CoincidenceP => Family::Pole,
        RegimeTag::PoleZero | RegimeTag::CoincidenceZero => Family::Constant,
        _ => Family::Saddle(alpha),
    };
    let terms = match family {
        Family::Saddle(a) => saddle_terms(model, a)?,
        _ => harmonic(model, family)?.terms,
    };
    let h = HarmonicFunction {
        family,
        mu: model.mu,
        r: model.r,
        terms,
    };
    Ok(h.eval(apply(&model.t, x)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicityReport {
    /// `max |0.5 lap h + mu . grad h|` over the interior points.
    pub interior_residual: f64,
    /// `max |r d1 h + d2 h|` over the boundary points.
    pub boundary_residual: f64,
    /// `max |h|` over all points, the natural scale for both residuals.
    pub max_abs: f64,
}

/// Finite-difference check of the generator and the oblique boundary condition.
///
/// Uses fourth-order five-point stencils along each axis, and a fourth-order
/// forward difference for `d2` at the boundary.
pub fn check_harmonicity(
    h: &HarmonicFunction,
    interior: &[Vec2],
    boundary: &[Vec2],
    step: f64,
) -> HarmonicityReport {
    let at = |x: Vec2, d1: f64, d2: f64| h.eval([x[0] + d1 * step, x[1] + d2 * step]);
    let mut max_abs: f64 = 0.0;
    let mut interior_residual: f64 = 0.0;
    for &x in interior {
        let f0 = at(x, 0.0, 0.0);
        max_abs = max_abs.max(f0.abs());
        let mut lap = 0.0;
        let mut grad = [0.0; 2];
        for (k, g) in grad.iter_mut().enumerate() {
            let e = |j: f64| if k == 0 { at(x, j, 0.0) } else { at(x, 0.0, j) };
            let (p1, p2, m1, m2) = (e(1.0), e(2.0), e(-1.0), e(-2.0));
            lap += (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * step * step);
            *g = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * step);
        }
        let res = 0.5 * lap + h.mu[0] * grad[0] + h.mu[1] * grad[1];
        interior_residual = interior_residual.max(res.abs());
    }
    let mut boundary_residual: f64 = 0.0;
    for &x in boundary {
        let f = |j: f64| at(x, 0.0, j);
        max_abs = max_abs.max(f(0.0).abs());
        let d1 = (-at(x, 2.0, 0.0) + 8.0 * at(x, 1.0, 0.0) - 8.0 * at(x, -1.0, 0.0)
            + at(x, -2.0, 0.0))
            / (12.0 * step);
        let d2 = (-25.0 * f(0.0) + 48.0 * f(1.0) - 36.0 * f(2.0) + 16.0 * f(3.0) - 3.0 * f(4.0))
            / (12.0 * step);
        boundary_residual = boundary_residual.max((h.r * d1 + d2).abs());
    }
    HarmonicityReport {
        interior_residual,
        boundary_residual,
        max_abs,
    }
}

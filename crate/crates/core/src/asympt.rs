//! Saddle-point data and the far-field law `pi(rho e_alpha) ~ a rho^b exp(-c rho)`.

use std::f64::consts::PI;

use crate::boundary::{residue_at_pole_p, residue_at_zero};
use crate::error::{Error, Result};
use crate::model::{DriftSign, NormalizedModel, Vec2};

/// Directions closer than this to 0 or pi are rejected.
pub const ALPHA_MARGIN: f64 = 1e-6;
/// Default coincidence tolerance, relative to `theta1+`.
pub const DEFAULT_TOL_COINCIDE: f64 = 1e-9;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(ALPHA_MARGIN..=PI - ALPHA_MARGIN).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub alpha: f64,
    pub theta_alpha: Vec2,
    pub theta_alpha_tilde: Vec2,
    pub s_second: f64,
    pub exponent: f64,
}

/// Saddle point of `S(theta1) = theta1 cos(alpha) + Theta2+(theta1) sin(alpha)`.
pub fn saddle(model: &NormalizedModel, alpha: f64) -> Result<SaddleData> {
    check_alpha(alpha)?;
    let norm = model.norm_mu();
    let (c, s) = (alpha.cos(), alpha.sin());
    let t1 = -model.mu[0] + norm * c;
    // at the saddle the branch square root equals |mu| sin(alpha)
    let root = norm * s;
    let theta_alpha = [t1, -model.mu[1] + root];
    let theta_alpha_tilde = [t1, -model.mu[1] - root];
    Ok(SaddleData {
        alpha,
        theta_alpha,
        theta_alpha_tilde,
        s_second: -1.0 / (norm * s * s),
        exponent: norm - (model.mu[0] * c + model.mu[1] * s),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    Saddle,
    PoleP,
    PoleZero,
    CoincidenceP,
    CoincidenceZero,
    A3Saddle,
    A3Pole,
}

impl RegimeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::Saddle => "Saddle",
            RegimeTag::PoleP => "PoleP",
            RegimeTag::PoleZero => "PoleZero",
            RegimeTag::CoincidenceP => "CoincidenceP",
            RegimeTag::CoincidenceZero => "CoincidenceZero",
            RegimeTag::A3Saddle => "A3Saddle",
            RegimeTag::A3Pole => "A3Pole",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub tag: RegimeTag,
    pub theta1_alpha: f64,
    pub theta1_p: Option<f64>,
    pub r_dot_theta_plus: f64,
    /// Reported only for `mu2 >= 0`.
    pub r_dot_theta_minus: Option<f64>,
    /// For `A3Pole`: the saddle sits on the pole, so the constant is halved.
    pub coincident: bool,
}

pub fn classify(model: &NormalizedModel, alpha: f64, tol_coincide: f64) -> Result<Regime> {
    let sd = saddle(model, alpha)?;
    let geo = model.geometry();
    let t1a = sd.theta_alpha[0];
    let tol = tol_coincide * geo.theta1_plus;
    let mut regime = Regime {
        tag: RegimeTag::Saddle,
        theta1_alpha: t1a,
        theta1_p: geo.pole_p,
        r_dot_theta_plus: geo.r_dot_theta_plus,
        r_dot_theta_minus: None,
        coincident: false,
    };

    if model.drift_sign == DriftSign::Mu2Negative {
        regime.tag = if t1a.abs() <= tol {
            RegimeTag::CoincidenceZero
        } else if t1a < 0.0 {
            RegimeTag::PoleZero
        } else {
            match geo.pole_p {
                Some(p) if (t1a - p).abs() <= tol => RegimeTag::CoincidenceP,
                Some(p) if p < t1a => RegimeTag::PoleP,
                _ => RegimeTag::Saddle,
            }
        };
        return Ok(regime);
    }

    regime.r_dot_theta_minus = Some(geo.r_dot_theta_minus);
    regime.tag = RegimeTag::A3Saddle;
    if let Some(p) = geo.pole_p {
        let beyond = (p > 0.0 && p <= t1a) || (p < 0.0 && t1a <= p);
        if beyond || (t1a - p).abs() <= tol {
            regime.tag = RegimeTag::A3Pole;
            regime.coincident = (t1a - p).abs() <= tol;
        }
    }
    Ok(regime)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticLaw {
    pub prefactor: f64,
    pub power: f64,
    pub rate: f64,
    pub regime: Regime,
}

impl AsymptoticLaw {
    pub fn eval(&self, rho: f64) -> f64 {
        self.prefactor * rho.powf(self.power) * (-self.rate * rho).exp()
    }
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Saddle constant for the current starting point.
pub fn saddle_constant(model: &NormalizedModel, sd: &SaddleData) -> f64 {
    let x = model.x;
    let r_a = model.r_dot(sd.theta_alpha);
    let r_t = model.r_dot(sd.theta_alpha_tilde);
    let gap = sd.theta_alpha[1] - sd.theta_alpha_tilde[1];
    let shape =
        (dot(sd.theta_alpha, x).exp() - r_a / r_t * dot(sd.theta_alpha_tilde, x).exp()) / gap;
    (-2.0 / (PI * sd.s_second)).sqrt() * shape
}

/// `(theta1p, Theta2-(theta1p))`, the point on the killed line.
pub fn pole_point_tilde(model: &NormalizedModel, p: f64) -> Vec2 {
    [p, -model.r * p]
}

/// `(theta1p, Theta2+(theta1p))`, which sets the pole-regime rate.
pub fn pole_point(model: &NormalizedModel, p: f64) -> Vec2 {
    let (upper, _) = model
        .theta2_branches_real(p)
        .expect("pole lies inside the branch interval");
    [p, upper]
}

fn pole_constant(model: &NormalizedModel, p: f64) -> f64 {
    let res = residue_at_pole_p(model) * dot(pole_point_tilde(model, p), model.x).exp();
    if p > 0.0 {
        -2.0 * res
    } else {
        2.0 * res
    }
}

pub fn law(model: &NormalizedModel, alpha: f64, tol_coincide: f64) -> Result<AsymptoticLaw> {
    let sd = saddle(model, alpha)?;
    let regime = classify(model, alpha, tol_coincide)?;
    let (c, s) = (alpha.cos(), alpha.sin());
    let saddle_law = || AsymptoticLaw {
        prefactor: saddle_constant(model, &sd),
        power: -0.5,
        rate: sd.exponent,
        regime,
    };
    let pole_law = |half: bool| {
        let p = regime.theta1_p.expect("pole regime has a pole");
        let theta = pole_point(model, p);
        let a = pole_constant(model, p);
        AsymptoticLaw {
            prefactor: if half { 0.5 * a } else { a },
            power: 0.0,
            rate: theta[0] * c + theta[1] * s,
            regime,
        }
    };
    // Theta2-(0) = 0 for mu2 < 0, so the start point does not enter
    let zero_law = |half: bool| {
        let a = 2.0 * residue_at_zero(model);
        AsymptoticLaw {
            prefactor: if half { 0.5 * a } else { a },
            power: 0.0,
            rate: -2.0 * model.mu[1] * s,
            regime,
        }
    };
    Ok(match regime.tag {
        RegimeTag::Saddle | RegimeTag::A3Saddle => saddle_law(),
        RegimeTag::PoleP => pole_law(false),
        RegimeTag::CoincidenceP => pole_law(true),
        RegimeTag::A3Pole => pole_law(regime.coincident),
        RegimeTag::PoleZero => zero_law(false),
        RegimeTag::CoincidenceZero => zero_law(true),
    })
}

/// `(alpha1, alpha0)`: pole-to-saddle and saddle-to-zero-pole switching angles (`mu2 < 0`).
pub fn angle_thresholds(model: &NormalizedModel) -> (f64, f64) {
    let geo = model.geometry();
    (geo.alpha1, geo.alpha0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::{density_with, DensityOptions};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, SQRT_2};

    fn p0() -> NormalizedModel {
        NormalizedModel::new([-1.0, -1.0], 0.0).unwrap()
    }

    #[test]
    fn p0_saddle_at_vertical() {
        let sd = saddle(&p0(), FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(sd.theta_alpha[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sd.theta_alpha[1], 1.0 + SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(sd.theta_alpha_tilde[1], 1.0 - SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(sd.s_second, -1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(sd.exponent, 1.0 + SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn saddle_invariants_and_limits() {
        let m = NormalizedModel::new([-0.4, -1.7], 0.2).unwrap();
        for k in 1..50 {
            let alpha = PI * k as f64 / 50.0;
            let sd = saddle(&m, alpha).unwrap();
            assert!(sd.s_second < 0.0);
            assert!(m.kernel_q_real(sd.theta_alpha).abs() < 1e-12);
            assert!(m.kernel_q_real(sd.theta_alpha_tilde).abs() < 1e-12);
            let (upper, _) = m.theta2_branches_real(sd.theta_alpha[0]).unwrap();
            assert_abs_diff_eq!(upper, sd.theta_alpha[1], epsilon = 1e-12);
        }
        let sd = saddle(&m, 1e-5).unwrap();
        assert!((sd.theta_alpha[0] - m.theta1_plus()).abs() < 1e-9);
        assert!(sd.s_second < -1e9);
        assert!(matches!(
            saddle(&m, 0.0),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(saddle(&m, PI), Err(Error::AlphaOutOfRange { .. })));
    }

    #[test]
    fn classification_examples() {
        let m = p0();
        let tag = |a| classify(&m, a, DEFAULT_TOL_COINCIDE).unwrap().tag;
        assert_eq!(tag(FRAC_PI_2), RegimeTag::Saddle);
        assert_eq!(tag(FRAC_PI_6), RegimeTag::PoleP);
        assert_eq!(tag(5.0 * FRAC_PI_6), RegimeTag::PoleZero);
        assert_eq!(tag(FRAC_PI_4), RegimeTag::CoincidenceP);
        assert_eq!(tag(3.0 * FRAC_PI_4), RegimeTag::CoincidenceZero);
    }

    #[test]
    fn law_examples() {
        let m = p0();
        let l = |a| law(&m, a, DEFAULT_TOL_COINCIDE).unwrap();
        let s = l(FRAC_PI_2);
        assert_abs_diff_eq!(
            s.prefactor,
            (2.0 * SQRT_2 / PI).sqrt() * (1.0 + SQRT_2),
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(s.prefactor, 2.29074, epsilon = 2e-5);
        assert_eq!(s.power, -0.5);
        assert_abs_diff_eq!(s.rate, 1.0 + SQRT_2, epsilon = 1e-15);

        let p = l(FRAC_PI_6);
        assert_abs_diff_eq!(p.prefactor, 2.0, epsilon = 1e-13);
        assert_eq!(p.power, 0.0);
        assert_abs_diff_eq!(p.rate, 3f64.sqrt() + 1.0, epsilon = 1e-13);

        let z = l(5.0 * FRAC_PI_6);
        assert_abs_diff_eq!(z.prefactor, 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(z.rate, 1.0, epsilon = 1e-13);

        let c = l(FRAC_PI_4);
        assert_abs_diff_eq!(c.prefactor, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c.rate, 2.0 * SQRT_2, epsilon = 1e-13);
    }

    #[test]
    fn threshold_examples() {
        let (a1, a0) = angle_thresholds(&p0());
        assert_abs_diff_eq!(a1, FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(a0, 3.0 * FRAC_PI_4, epsilon = 1e-15);
        let m = NormalizedModel::new([-1.0, -1.0], -1.0).unwrap();
        assert_abs_diff_eq!(angle_thresholds(&m).0, -FRAC_PI_4, epsilon = 1e-15);
    }

    fn far_field_ratio(m: &NormalizedModel, alpha: f64, rho: f64) -> f64 {
        let z = [rho * alpha.cos(), rho * alpha.sin()];
        let opts = DensityOptions {
            abs_tol: 0.0,
            rel_tol: 1e-9,
            ..DensityOptions::default()
        };
        let d = density_with(m, z, &opts).unwrap();
        d.value / law(m, alpha, DEFAULT_TOL_COINCIDE).unwrap().eval(rho)
    }

    #[test]
    fn pole_constant_with_tilted_reflection_matches_quadrature() {
        let m = NormalizedModel::new([-1.0, -1.0], 0.5).unwrap();
        let l = law(&m, FRAC_PI_6, DEFAULT_TOL_COINCIDE).unwrap();
        assert_eq!(l.regime.tag, RegimeTag::PoleP);
        assert_abs_diff_eq!(l.prefactor, 5.6, epsilon = 1e-12);
        let ratio = far_field_ratio(&m, FRAC_PI_6, 15.0);
        assert!((ratio - 1.0).abs() < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn pole_constant_with_start_matches_quadrature() {
        let m = NormalizedModel::new([-1.0, -1.0], 0.5)
            .unwrap()
            .started_at([0.4, 0.3])
            .unwrap();
        let ratio = far_field_ratio(&m, FRAC_PI_6, 15.0);
        assert!((ratio - 1.0).abs() < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn negative_pole_constant_sign_matches_quadrature() {
        let m = NormalizedModel::new([-0.2, 1.0], -2.0).unwrap();
        let l = law(&m, 2.9, DEFAULT_TOL_COINCIDE).unwrap();
        assert_eq!(l.regime.tag, RegimeTag::A3Pole);
        assert!(l.prefactor > 0.0);
        let ratio = far_field_ratio(&m, 2.9, 300.0);
        assert!((ratio - 1.0).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn zero_drift_saddle_stays_right_of_origin() {
        let m = NormalizedModel::new([-1.0, 0.0], 0.5).unwrap();
        for k in 1..100 {
            let alpha = PI * k as f64 / 100.0;
            let r = classify(&m, alpha, DEFAULT_TOL_COINCIDE).unwrap();
            assert!(r.theta1_alpha > 0.0);
            assert!(matches!(r.tag, RegimeTag::A3Saddle | RegimeTag::A3Pole));
        }
    }
}

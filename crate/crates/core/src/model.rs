//! Problem instance, covariance normalization and the geometry of the kernel.
//!
//! Everything downstream works with a [`NormalizedModel`]: drift `mu`, reflection
//! `R = (r, 1)` and identity covariance. A general covariance is mapped to the
//! identity by an upper-triangular matrix `t` acting on column vectors
//! (`z = t * z_raw`), which keeps the half-plane `z2 >= 0` invariant.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// Raw problem parameters, possibly with a general covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub mu: Vec2,
    pub r: f64,
    pub sigma: Mat2,
    pub x: Vec2,
}

impl ModelParams {
    /// Identity covariance, start at the origin.
    pub fn new(mu: Vec2, r: f64) -> Self {
        Self {
            mu,
            r,
            sigma: IDENTITY,
            x: [0.0, 0.0],
        }
    }

    pub fn with_sigma(mut self, sigma: Mat2) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_start(mut self, x: Vec2) -> Self {
        self.x = x;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriftSign {
    Mu2Negative,
    Mu2Zero,
    Mu2Positive,
}

impl DriftSign {
    pub fn as_str(self) -> &'static str {
        match self {
            DriftSign::Mu2Negative => "mu2_negative",
            DriftSign::Mu2Zero => "mu2_zero",
            DriftSign::Mu2Positive => "mu2_positive",
        }
    }
}

/// Sign of `R . theta` at a branch point, with exact zero decided up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoleCondition {
    Positive,
    Zero,
    Negative,
}

/// Identity-covariance model with its normalizing map retained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedModel {
    pub mu: Vec2,
    pub r: f64,
    pub drift_sign: DriftSign,
    /// Starting point in normalized coordinates.
    pub x: Vec2,
    /// Column-vector map from raw to normalized coordinates, `t * sigma * t^T = I`.
    pub t: Mat2,
    pub det_t: f64,
    pub raw: ModelParams,
    theta1_minus: f64,
    theta1_plus: f64,
}

/// Branch points, pole candidates and direction thresholds of the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGeometry {
    pub theta1_minus: f64,
    pub theta1_plus: f64,
    pub theta_plus: Vec2,
    pub theta_minus: Vec2,
    pub r_dot_theta_plus: f64,
    pub r_dot_theta_minus: f64,
    pub pole_condition: PoleCondition,
    pub pole_p: Option<f64>,
    pub pole_zero: Option<f64>,
    pub m: f64,
    pub alpha_mu: f64,
    pub alpha_r: f64,
    pub alpha0: f64,
    pub alpha1: f64,
    /// Open interval of real abscissas on which the inversion contour may sit.
    pub strip: (f64, f64),
}

fn check_finite(v: f64, name: &'static str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}

/// Validates the parameters and maps them to identity covariance.
pub fn validate_and_normalize(params: &ModelParams) -> Result<NormalizedModel> {
    check_finite(params.mu[0], "mu1")?;
    check_finite(params.mu[1], "mu2")?;
    check_finite(params.r, "r")?;
    check_finite(params.x[0], "x1")?;
    check_finite(params.x[1], "x2")?;
    for row in &params.sigma {
        for &s in row {
            check_finite(s, "sigma")?;
        }
    }

    let [[s11, s12], [s21, s22]] = params.sigma;
    let scale = s11.abs().max(s22.abs()).max(s12.abs());
    if (s12 - s21).abs() > 1e-12 * scale {
        return Err(Error::BadCovariance(format!(
            "off-diagonal entries differ ({s12} vs {s21})"
        )));
    }
    if s11 <= 0.0 || s22 <= 0.0 {
        return Err(Error::BadCovariance(
            "diagonal entries must be positive".into(),
        ));
    }
    let det = s11 * s22 - s12 * s12;
    if det <= 0.0 {
        return Err(Error::BadCovariance(format!(
            "determinant {det} is not positive"
        )));
    }
    if params.x[1] < 0.0 {
        return Err(Error::BadStart { x2: params.x[1] });
    }

    let t = normalizing_map(s11, s12, s22);
    let det_t = t[0][0] * t[1][1];
    let mu = apply(&t, params.mu);
    let x = apply(&t, params.x);
    // R = sqrt(s22) * t * (r~, 1); its second component is exactly one.
    let r = s22.sqrt() * (t[0][0] * params.r + t[0][1]);

    let transience = mu[0] + r * (-mu[1]).max(0.0);
    if transience >= 0.0 {
        return Err(Error::NotTransient { value: transience });
    }

    let drift_sign = if mu[1] < 0.0 {
        DriftSign::Mu2Negative
    } else if mu[1] == 0.0 {
        DriftSign::Mu2Zero
    } else {
        DriftSign::Mu2Positive
    };

    let (theta1_minus, theta1_plus) = branch_points(mu);
    Ok(NormalizedModel {
        mu,
        r,
        drift_sign,
        x,
        t,
        det_t,
        raw: *params,
        theta1_minus,
        theta1_plus,
    })
}

/// Upper-triangular `t` with `t * sigma * t^T = I` and `(t z)_2 = z_2 / sqrt(s22)`.
fn normalizing_map(s11: f64, s12: f64, s22: f64) -> Mat2 {
    let det = s11 * s22 - s12 * s12;
    if s12 == 0.0 && s11 == 1.0 && s22 == 1.0 {
        return IDENTITY;
    }
    [
        [(s22 / det).sqrt(), -s12 / (s22 * det).sqrt()],
        [0.0, 1.0 / s22.sqrt()],
    ]
}

pub fn apply(t: &Mat2, v: Vec2) -> Vec2 {
    [
        t[0][0] * v[0] + t[0][1] * v[1],
        t[1][0] * v[0] + t[1][1] * v[1],
    ]
}

/// Roots of `mu1^2 + mu2^2 - (theta1 + mu1)^2`, computed without cancellation.
fn branch_points(mu: Vec2) -> (f64, f64) {
    let m = mu[0].hypot(mu[1]);
    let mu2sq = mu[1] * mu[1];
    if mu[0] > 0.0 {
        (-mu[0] - m, mu2sq / (mu[0] + m))
    } else if mu[0] < 0.0 {
        (-mu2sq / (m - mu[0]), -mu[0] + m)
    } else {
        (-m, m)
    }
}

impl NormalizedModel {
    /// Identity covariance, start at the origin.
    pub fn new(mu: Vec2, r: f64) -> Result<Self> {
        validate_and_normalize(&ModelParams::new(mu, r))
    }

    /// Same process started from `x`, given in normalized coordinates.
    pub fn started_at(&self, x: Vec2) -> Result<Self> {
        if x[1] < 0.0 {
            return Err(Error::BadStart { x2: x[1] });
        }
        let mut out = *self;
        out.x = x;
        Ok(out)
    }

    pub fn norm_mu(&self) -> f64 {
        self.mu[0].hypot(self.mu[1])
    }

    pub fn theta1_minus(&self) -> f64 {
        self.theta1_minus
    }

    pub fn theta1_plus(&self) -> f64 {
        self.theta1_plus
    }

    pub fn to_normalized(&self, z_raw: Vec2) -> Vec2 {
        apply(&self.t, z_raw)
    }

    /// `Q(theta) = (theta1^2 + theta2^2)/2 + mu . theta`.
    pub fn kernel_q(&self, theta: [Complex64; 2]) -> Complex64 {
        let [a, b] = theta;
        0.5 * (a * a + b * b) + self.mu[0] * a + self.mu[1] * b
    }

    pub fn kernel_q_real(&self, theta: Vec2) -> f64 {
        0.5 * (theta[0] * theta[0] + theta[1] * theta[1])
            + self.mu[0] * theta[0]
            + self.mu[1] * theta[1]
    }

    /// Principal root of `(theta1+ - theta1)(theta1 - theta1-)`; both kernel roots
    /// are `-mu2 +/- ` this value.
    pub fn branch_sqrt(&self, theta1: Complex64) -> Result<Complex64> {
        if theta1.im == 0.0 && (theta1.re < self.theta1_minus || theta1.re > self.theta1_plus) {
            return Err(Error::OnBranchCut {
                re: theta1.re,
                im: theta1.im,
            });
        }
        Ok(self.branch_sqrt_unchecked(theta1))
    }

    #[inline]
    pub(crate) fn branch_sqrt_unchecked(&self, theta1: Complex64) -> Complex64 {
        ((self.theta1_plus - theta1) * (theta1 - self.theta1_minus)).sqrt()
    }

    /// `(Theta2+(theta1), Theta2-(theta1))`.
    pub fn theta2_branches(&self, theta1: Complex64) -> Result<(Complex64, Complex64)> {
        let s = self.branch_sqrt(theta1)?;
        Ok((s - self.mu[1], -s - self.mu[1]))
    }

    /// Real-axis version of [`Self::theta2_branches`] for `theta1` in `[theta1-, theta1+]`.
    pub fn theta2_branches_real(&self, theta1: f64) -> Result<(f64, f64)> {
        let (p, m) = self.theta2_branches(Complex64::new(theta1, 0.0))?;
        Ok((p.re, m.re))
    }

    /// `R . theta = r theta1 + theta2`.
    pub fn r_dot(&self, theta: Vec2) -> f64 {
        self.r * theta[0] + theta[1]
    }

    /// Upper end of the real interval `0 < theta1 < .` on which the
    /// time-integral transform is known to converge with `Re theta2 <= 0`.
    pub fn f_domain_upper(&self) -> f64 {
        -2.0 * (self.mu[0] + self.r * (-self.mu[1]).max(0.0)) / (1.0 + self.r * self.r)
    }

    pub fn geometry(&self) -> KernelGeometry {
        let [mu1, mu2] = self.mu;
        let r = self.r;
        let m = self.norm_mu();
        let tp = self.theta1_plus;
        let tm = self.theta1_minus;
        let theta_plus = [tp, -mu2];
        let theta_minus = [tm, -mu2];
        let r_dot_theta_plus = r * tp - mu2;
        let r_dot_theta_minus = r * tm - mu2;

        let tol = 1e-12 * (r.abs() * tp.abs() + mu2.abs()).max(f64::MIN_POSITIVE);
        let sign_of = |v: f64| {
            if v > tol {
                PoleCondition::Positive
            } else if v < -tol {
                PoleCondition::Negative
            } else {
                PoleCondition::Zero
            }
        };
        let pole_condition = sign_of(r_dot_theta_plus);
        let theta1p = 2.0 * (r * mu2 - mu1) / (1.0 + r * r);

        let pole_p = match self.drift_sign {
            DriftSign::Mu2Negative => {
                (pole_condition == PoleCondition::Positive).then_some(theta1p)
            }
            DriftSign::Mu2Zero | DriftSign::Mu2Positive => {
                let minus_tol = 1e-12 * (r.abs() * tm.abs() + mu2.abs()).max(f64::MIN_POSITIVE);
                let positive =
                    pole_condition == PoleCondition::Positive || r_dot_theta_minus > minus_tol;
                (positive && theta1p != 0.0).then_some(theta1p)
            }
        };
        let pole_zero = (self.drift_sign == DriftSign::Mu2Negative).then_some(0.0);

        let strip = match self.drift_sign {
            DriftSign::Mu2Negative => (0.0, pole_p.unwrap_or(tp)),
            DriftSign::Mu2Zero | DriftSign::Mu2Positive => {
                let mut lo = tm;
                let mut hi = tp;
                if let Some(p) = pole_p {
                    if p > 0.0 {
                        hi = hi.min(p);
                    } else {
                        lo = lo.max(p);
                    }
                }
                (lo, hi)
            }
        };

        let alpha_mu = (-mu2).atan2(-mu1);
        let alpha_r = 1.0f64.atan2(r);
        KernelGeometry {
            theta1_minus: tm,
            theta1_plus: tp,
            theta_plus,
            theta_minus,
            r_dot_theta_plus,
            r_dot_theta_minus,
            pole_condition,
            pole_p,
            pole_zero,
            m,
            alpha_mu,
            alpha_r,
            alpha0: PI - alpha_mu,
            alpha1: PI + alpha_mu - 2.0 * alpha_r,
            strip,
        }
    }
}

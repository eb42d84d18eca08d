//! Moment generating function `g` of the boundary occupancy measure, its
//! singular expansions, and the tail laws of the measure they imply.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DriftSign, NormalizedModel, PoleCondition};

/// Denominators below this modulus are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-14;

/// `g(theta1)`, including the starting-point factor `exp((theta1, Theta2-(theta1)) . x)`.
pub fn g_eval(model: &NormalizedModel, theta1: Complex64) -> Result<Complex64> {
    let (_, lower) = model.theta2_branches(theta1)?;
    let denom = model.r * theta1 + lower;
    if denom.norm() < POLE_THRESHOLD {
        return Err(Error::AtPole {
            modulus: denom.norm(),
        });
    }
    let exponent = theta1 * model.x[0] + lower * model.x[1];
    Ok(-exponent.exp() / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularityKind {
    SimplePole,
    SquareRootBranch,
}

/// Which side of the convergence strip a singularity bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Local form of `g` at one singularity.
///
/// For a pole, `g ~ leading_coefficient / (theta1 - location)` and
/// `constant_term` is unused (zero). For a branch point, with `d` the distance
/// `|theta1 - location|` measured into the cut plane,
/// `g ~ constant_term + leading_coefficient * d^(-order)`; `order` is `-1/2`
/// generically and `+1/2` when the constant term's denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityExpansion {
    pub location: f64,
    pub kind: SingularityKind,
    pub side: Side,
    pub order: f64,
    pub constant_term: f64,
    pub leading_coefficient: f64,
}

/// Closed-form residue of the origin-started `g` at `theta1 = 0` (only a pole when `mu2 < 0`).
pub fn residue_at_zero(model: &NormalizedModel) -> f64 {
    let [mu1, mu2] = model.mu;
    mu2 / (mu1 - model.r * mu2)
}

/// Closed-form residue of the origin-started `g` at `theta1p`, valid whenever it is a pole.
pub fn residue_at_pole_p(model: &NormalizedModel) -> f64 {
    let [mu1, mu2] = model.mu;
    let r = model.r;
    ((r * r - 1.0) * mu2 - 2.0 * r * mu1) / ((1.0 + r * r) * (mu1 - r * mu2))
}

fn branch_expansion(
    model: &NormalizedModel,
    location: f64,
    side: Side,
    condition: PoleCondition,
) -> SingularityExpansion {
    let geo_width = model.theta1_plus() - model.theta1_minus();
    let [x1, x2] = model.x;
    // at either branch point Theta2 = -mu2
    let start_factor = (location * x1 - model.mu[1] * x2).exp();
    let h0 = -model.r * location + model.mu[1];
    match condition {
        PoleCondition::Zero => SingularityExpansion {
            location,
            kind: SingularityKind::SquareRootBranch,
            side,
            order: 0.5,
            constant_term: 0.0,
            leading_coefficient: start_factor / geo_width.sqrt(),
        },
        _ => SingularityExpansion {
            location,
            kind: SingularityKind::SquareRootBranch,
            side,
            order: -0.5,
            constant_term: start_factor / h0,
            leading_coefficient: -start_factor * geo_width.sqrt() * (1.0 / (h0 * h0) + x2 / h0),
        },
    }
}

/// Poles and branch-point expansions of `g`, ordered by location.
pub fn residues(model: &NormalizedModel) -> Vec<SingularityExpansion> {
    let geo = model.geometry();
    let mut out = Vec::new();

    if geo.pole_zero.is_some() {
        // Theta2-(0) = 0 when mu2 < 0, so the start factor is one
        out.push(SingularityExpansion {
            location: 0.0,
            kind: SingularityKind::SimplePole,
            side: Side::Left,
            order: 1.0,
            constant_term: 0.0,
            leading_coefficient: residue_at_zero(model),
        });
    }
    if let Some(p) = geo.pole_p {
        let factor = (p * model.x[0] - model.r * p * model.x[1]).exp();
        out.push(SingularityExpansion {
            location: p,
            kind: SingularityKind::SimplePole,
            side: if p > 0.0 { Side::Right } else { Side::Left },
            order: 1.0,
            constant_term: 0.0,
            leading_coefficient: residue_at_pole_p(model) * factor,
        });
    }
    out.push(branch_expansion(
        model,
        geo.theta1_plus,
        Side::Right,
        geo.pole_condition,
    ));
    if model.drift_sign != DriftSign::Mu2Negative {
        let tol = 1e-12
            * (model.r.abs() * geo.theta1_minus.abs() + model.mu[1].abs()).max(f64::MIN_POSITIVE);
        let cond = if geo.r_dot_theta_minus > tol {
            PoleCondition::Positive
        } else if geo.r_dot_theta_minus < -tol {
            PoleCondition::Negative
        } else {
            PoleCondition::Zero
        };
        out.push(branch_expansion(model, geo.theta1_minus, Side::Left, cond));
    }
    out.sort_by(|a, b| a.location.total_cmp(&b.location));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    PlusInfinity,
    MinusInfinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailObject {
    /// The density `nu1(z1)`.
    Density,
    /// The mass `nu((z1, inf))` at `+inf`, `nu((-inf, z1))` at `-inf`.
    Tail,
}

/// `prefactor * |z1|^power * exp(-rate * |z1|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailLaw {
    pub direction: Direction,
    pub object: TailObject,
    pub prefactor: f64,
    pub power: f64,
    pub rate: f64,
    /// Set for left tails with `mu2 > 0`, whose constants come from the
    /// mirror-image expansion at `theta1-` rather than a printed formula.
    pub derived_by_symmetry: bool,
}

impl TailLaw {
    pub fn eval(&self, z1: f64) -> f64 {
        let d = z1.abs();
        self.prefactor * d.powf(self.power) * (-self.rate * d).exp()
    }
}

fn gamma_of_order(k: f64) -> f64 {
    if k == 1.0 {
        1.0
    } else if k == 0.5 {
        PI.sqrt()
    } else if k == -0.5 {
        -2.0 * PI.sqrt()
    } else {
        unreachable!("unexpected singularity order {k}")
    }
}

/// Exact tail asymptotics of the boundary occupancy measure in one direction.
pub fn nu_tail(
    model: &NormalizedModel,
    direction: Direction,
    object: TailObject,
) -> Result<TailLaw> {
    if direction == Direction::MinusInfinity && model.drift_sign == DriftSign::Mu2Zero {
        return Err(Error::ZeroDriftUnsupportedDirection);
    }
    let geo = model.geometry();
    let expansions = residues(model);
    let edge = match direction {
        Direction::PlusInfinity => geo.strip.1,
        Direction::MinusInfinity => geo.strip.0,
    };
    let exp = expansions
        .iter()
        .find(|e| e.location == edge)
        .copied()
        .expect("strip edges are singularities of g");

    // g - c ~ c0 / (b - theta1)^k on the right, c0 / (theta1 - a)^k on the left
    let c0 = match (exp.kind, direction) {
        (SingularityKind::SimplePole, Direction::PlusInfinity) => -exp.leading_coefficient,
        _ => exp.leading_coefficient,
    };
    let k = exp.order;
    let prefactor = c0 / gamma_of_order(k);
    let rate = edge.abs();
    let mut law = TailLaw {
        direction,
        object: TailObject::Density,
        prefactor,
        power: k - 1.0,
        rate,
        derived_by_symmetry: direction == Direction::MinusInfinity
            && model.drift_sign == DriftSign::Mu2Positive,
    };
    if object == TailObject::Tail {
        if rate == 0.0 {
            return Err(Error::InfiniteTailMass);
        }
        law.object = TailObject::Tail;
        law.prefactor /= rate;
    }
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    fn p0() -> NormalizedModel {
        NormalizedModel::new([-1.0, -1.0], 0.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn g_spot_value() {
        let g = g_eval(&p0(), c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(g.re, 1.0 + SQRT_2, epsilon = 1e-13);
        assert_eq!(g.im, 0.0);
    }

    #[test]
    fn g_at_poles_is_rejected() {
        assert!(matches!(
            g_eval(&p0(), c(0.0, 0.0)),
            Err(Error::AtPole { .. })
        ));
        assert!(matches!(
            g_eval(&p0(), c(2.0, 0.0)),
            Err(Error::AtPole { .. })
        ));
        assert!(matches!(
            g_eval(&p0(), c(3.0, 0.0)),
            Err(Error::OnBranchCut { .. })
        ));
    }

    #[test]
    fn numerical_residues_match_closed_forms() {
        let m = p0();
        let d = 1e-6;
        let near0 = d * g_eval(&m, c(d, 0.0)).unwrap().re;
        assert!((near0 - 1.0).abs() < 1e-5);
        let nearp = d * g_eval(&m, c(2.0 + d, 0.0)).unwrap().re;
        assert!((nearp - -1.0).abs() < 1e-5);

        let m = NormalizedModel::new([-0.7, -1.3], 0.4).unwrap();
        let p = m.geometry().pole_p.unwrap();
        let num = d * g_eval(&m, c(p + d, 0.0)).unwrap().re;
        let exact = residue_at_pole_p(&m);
        assert!(((num - exact) / exact).abs() < 1e-5, "{num} vs {exact}");
    }

    #[test]
    fn p0_expansions() {
        let ex = residues(&p0());
        assert_eq!(ex.len(), 3);
        assert_eq!(ex[0].location, 0.0);
        assert_abs_diff_eq!(ex[0].leading_coefficient, 1.0, epsilon = 1e-15);
        assert_eq!(ex[1].location, 2.0);
        assert_abs_diff_eq!(ex[1].leading_coefficient, -1.0, epsilon = 1e-15);
        let b = ex[2];
        assert_eq!(b.kind, SingularityKind::SquareRootBranch);
        assert_eq!(b.order, -0.5);
        assert_abs_diff_eq!(b.constant_term, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            b.leading_coefficient,
            -(2.0 * SQRT_2).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(b.leading_coefficient, -1.68179, epsilon = 1e-5);
    }

    #[test]
    fn degenerate_branch_expansion() {
        let m = NormalizedModel::new([-1.0, -1.0], -(SQRT_2 - 1.0)).unwrap();
        let ex = residues(&m);
        let b = ex.last().unwrap();
        assert_eq!(b.order, 0.5);
        assert_abs_diff_eq!(
            b.leading_coefficient,
            1.0 / (2.0 * SQRT_2).sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(b.leading_coefficient, 0.594604, epsilon = 1e-6);
    }

    #[test]
    fn branch_expansion_matches_g_near_theta_plus() {
        let m = NormalizedModel::new([-0.6, -1.1], -0.9)
            .unwrap()
            .started_at([0.3, 0.4])
            .unwrap();
        let b = *residues(&m).last().unwrap();
        assert_eq!(b.order, -0.5);
        let tp = m.theta1_plus();
        let d = 1e-8;
        let g = g_eval(&m, c(tp - d, 0.0)).unwrap().re;
        let approx = b.constant_term + b.leading_coefficient * d.sqrt();
        assert!((g - approx).abs() < 1e-6, "{g} vs {approx}");
    }

    #[test]
    fn p0_tail_laws() {
        let m = p0();
        let a = nu_tail(&m, Direction::PlusInfinity, TailObject::Density).unwrap();
        assert_abs_diff_eq!(a.prefactor, 1.0, epsilon = 1e-15);
        assert_eq!((a.power, a.rate), (0.0, 2.0));
        let d = nu_tail(&m, Direction::MinusInfinity, TailObject::Density).unwrap();
        assert_abs_diff_eq!(d.prefactor, 1.0, epsilon = 1e-15);
        assert_eq!((d.power, d.rate), (0.0, 0.0));
        let t = nu_tail(&m, Direction::PlusInfinity, TailObject::Tail).unwrap();
        assert_abs_diff_eq!(t.prefactor, 0.5, epsilon = 1e-15);
        assert_eq!(
            nu_tail(&m, Direction::MinusInfinity, TailObject::Tail).unwrap_err(),
            Error::InfiniteTailMass
        );
    }

    #[test]
    fn tail_constants_match_printed_forms() {
        // R.theta+ < 0
        let m = NormalizedModel::new([-1.0, -1.0], -1.0).unwrap();
        let geo = m.geometry();
        let tp = geo.theta1_plus;
        let width = tp - geo.theta1_minus;
        let law = nu_tail(&m, Direction::PlusInfinity, TailObject::Density).unwrap();
        let h0 = -m.r * tp + m.mu[1];
        let c_const = width.sqrt() / (2.0 * PI.sqrt() * h0 * h0);
        assert_abs_diff_eq!(law.prefactor, c_const, epsilon = 1e-13);
        assert_eq!(law.power, -1.5);
        assert_eq!(law.rate, tp);
        let tail = nu_tail(&m, Direction::PlusInfinity, TailObject::Tail).unwrap();
        assert_abs_diff_eq!(tail.prefactor, c_const / tp, epsilon = 1e-13);

        // R.theta+ = 0
        let m = NormalizedModel::new([-1.0, -1.0], -(SQRT_2 - 1.0)).unwrap();
        let law = nu_tail(&m, Direction::PlusInfinity, TailObject::Density).unwrap();
        let b_const = 1.0 / (PI * 2.0 * SQRT_2).sqrt();
        assert_abs_diff_eq!(law.prefactor, b_const, epsilon = 1e-12);
        assert_eq!(law.power, -0.5);

        // R.theta+ > 0, r != 0: A = ((r^2-1) mu2 - 2 r mu1) / ((r^2+1)(r mu2 - mu1))
        let (mu1, mu2, r) = (-0.7, -1.3, 0.4);
        let m = NormalizedModel::new([mu1, mu2], r).unwrap();
        let law = nu_tail(&m, Direction::PlusInfinity, TailObject::Density).unwrap();
        let a = ((r * r - 1.0) * mu2 - 2.0 * r * mu1) / ((r * r + 1.0) * (r * mu2 - mu1));
        assert_abs_diff_eq!(law.prefactor, a, epsilon = 1e-14);
        let d = nu_tail(&m, Direction::MinusInfinity, TailObject::Density).unwrap();
        assert_abs_diff_eq!(d.prefactor, mu2 / (mu1 - r * mu2), epsilon = 1e-14);
    }

    #[test]
    fn positive_drift_left_tail_is_flagged() {
        let m = NormalizedModel::new([-0.2, 1.0], -2.0).unwrap();
        let geo = m.geometry();
        let law = nu_tail(&m, Direction::MinusInfinity, TailObject::Density).unwrap();
        assert!(law.derived_by_symmetry);
        assert_eq!(law.rate, -geo.pole_p.unwrap());
        assert!(law.prefactor > 0.0);
        let right = nu_tail(&m, Direction::PlusInfinity, TailObject::Density).unwrap();
        assert!(!right.derived_by_symmetry);
        assert_eq!(right.rate, geo.theta1_plus);
        assert!(right.prefactor > 0.0);

        let zero = NormalizedModel::new([-1.0, 0.0], 0.5).unwrap();
        assert_eq!(
            nu_tail(&zero, Direction::MinusInfinity, TailObject::Density).unwrap_err(),
            Error::ZeroDriftUnsupportedDirection
        );
        assert!(nu_tail(&zero, Direction::PlusInfinity, TailObject::Density).is_ok());
    }
}

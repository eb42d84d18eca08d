//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex-valued
//! integrands of one real variable, with an expanding symmetric window for
//! integrals over the whole line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const NODES_PER_PANEL: usize = 15;

/// One Kronrod panel.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
    /// Largest integrand modulus seen at the panel's nodes.
    pub max_abs: f64,
}

/// Kronrod estimate on `[a, b]` with the QUADPACK error heuristic applied to
/// the modulus of the complex Gauss/Kronrod difference.
pub fn gk15<F>(f: &F, a: f64, b: f64) -> Panel
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut max_abs = fc.norm();
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let sum = f1 + f2;
        kronrod += sum * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        max_abs = max_abs.max(f1.norm()).max(f2.norm());
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((kronrod - gauss) * half).norm();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        a,
        b,
        value,
        error,
        max_abs,
    }
}

struct ByError(Panel);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.total_cmp(&self.0.a))
    }
}

/// Stopping rule: `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_nodes: usize,
}

impl Tolerance {
    fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LineIntegral {
    pub value: Complex64,
    /// Sum of panel error estimates plus the truncated-tail bound.
    pub error: f64,
    pub tail: f64,
    pub nodes: usize,
    pub half_width: f64,
    pub max_abs: f64,
    pub converged: bool,
}

/// Integrates `f` over the whole real line.
///
/// The window `[-T, T]` starts at `initial_half_width` and doubles until the
/// tail bound `tail_bound(T)` (an estimate of the integral of `|f|` outside the
/// window) falls below a tenth of the target. Inside the window the panel with
/// the largest error is bisected until the summed error meets the target.
/// Panels are summed in order of their left endpoint, so the result does not
/// depend on the refinement history.
pub fn integrate_line<F, B>(
    f: &F,
    tail_bound: &B,
    initial_half_width: f64,
    tol: Tolerance,
) -> LineIntegral
where
    F: Fn(f64) -> Complex64,
    B: Fn(f64) -> f64,
{
    let mut heap = BinaryHeap::new();
    let mut nodes = 0usize;
    let mut half_width = initial_half_width;
    let initial_panels = 8;
    let step = 2.0 * half_width / initial_panels as f64;
    for k in 0..initial_panels {
        let a = -half_width + k as f64 * step;
        let b = if k + 1 == initial_panels {
            half_width
        } else {
            a + step
        };
        heap.push(ByError(gk15(f, a, b)));
        nodes += NODES_PER_PANEL;
    }

    let summarize = |heap: &BinaryHeap<ByError>| {
        let mut panels: Vec<&Panel> = heap.iter().map(|p| &p.0).collect();
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        let mut max_abs: f64 = 0.0;
        for p in panels {
            value += p.value;
            error += p.error;
            max_abs = max_abs.max(p.max_abs);
        }
        (value, error, max_abs)
    };

    loop {
        let (value, error, _) = summarize(&heap);
        let target = tol.target(value);
        let tail = tail_bound(half_width);
        if tail > 0.1 * target || !tail.is_finite() {
            if nodes + 2 * NODES_PER_PANEL > tol.max_nodes {
                break;
            }
            heap.push(ByError(gk15(f, -2.0 * half_width, -half_width)));
            heap.push(ByError(gk15(f, half_width, 2.0 * half_width)));
            nodes += 2 * NODES_PER_PANEL;
            half_width *= 2.0;
            continue;
        }
        if error + tail <= target {
            break;
        }
        if nodes + 2 * NODES_PER_PANEL > tol.max_nodes {
            break;
        }
        let worst = heap.pop().expect("non-empty panel set").0;
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further; keep it and stop refining
            heap.push(ByError(worst));
            break;
        }
        heap.push(ByError(gk15(f, worst.a, mid)));
        heap.push(ByError(gk15(f, mid, worst.b)));
        nodes += 2 * NODES_PER_PANEL;
    }

    let (value, error, max_abs) = summarize(&heap);
    let tail = tail_bound(half_width);
    let target = tol.target(value);
    LineIntegral {
        value,
        error: error + tail,
        tail,
        nodes,
        half_width,
        max_abs,
        converged: error + tail <= target,
    }
}

/// Integrates `f` over `[a, b]` to the given tolerance.
pub fn integrate_interval<F>(f: &F, a: f64, b: f64, tol: Tolerance) -> LineIntegral
where
    F: Fn(f64) -> Complex64,
{
    let mut heap = BinaryHeap::new();
    heap.push(ByError(gk15(f, a, b)));
    let mut nodes = NODES_PER_PANEL;
    let mut value;
    let mut error;
    loop {
        value = heap.iter().map(|p| p.0.value).sum::<Complex64>();
        error = heap.iter().map(|p| p.0.error).sum::<f64>();
        if error <= tol.target(value) || nodes + 2 * NODES_PER_PANEL > tol.max_nodes {
            break;
        }
        let worst = heap.pop().expect("non-empty panel set").0;
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(ByError(gk15(f, worst.a, mid)));
        heap.push(ByError(gk15(f, mid, worst.b)));
        nodes += 2 * NODES_PER_PANEL;
    }
    let mut panels: Vec<Panel> = heap.into_iter().map(|p| p.0).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: Complex64 = panels.iter().map(|p| p.value).sum();
    let max_abs = panels.iter().map(|p| p.max_abs).fold(0.0, f64::max);
    LineIntegral {
        value,
        error,
        tail: 0.0,
        nodes,
        half_width: 0.5 * (b - a),
        max_abs,
        converged: error <= tol.target(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex64 {
        move |t| Complex64::new(f(t), 0.0)
    }

    #[test]
    fn kronrod_is_exact_for_low_degree_polynomials() {
        let p = gk15(&real(|t| 3.0 * t.powi(10) - t.powi(3) + 2.0), -1.0, 2.0);
        let exact = 3.0 * (2f64.powi(11) + 1.0) / 11.0 - (16.0 - 1.0) / 4.0 + 6.0;
        assert_relative_eq!(p.value.re, exact, max_relative = 1e-14);
    }

    #[test]
    fn gaussian_over_the_line() {
        let tol = Tolerance {
            abs: 1e-13,
            rel: 0.0,
            max_nodes: 100_000,
        };
        let out = integrate_line(
            &real(|t| (-t * t).exp()),
            &|t: f64| (-t * t).exp() / t,
            1.0,
            tol,
        );
        assert!(out.converged);
        assert_relative_eq!(
            out.value.re,
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-12
        );
        assert!(out.error < 1e-12);
    }

    #[test]
    fn oscillatory_lorentzian() {
        // int cos(3t)/(1+t^2) dt = pi e^{-3}
        let tol = Tolerance {
            abs: 1e-9,
            rel: 0.0,
            max_nodes: 400_000,
        };
        let out = integrate_line(
            &|t: f64| Complex64::new(0.0, 3.0 * t).exp() / (1.0 + t * t),
            &|t: f64| 2.0 / (3.0 * t * t),
            4.0,
            tol,
        );
        let exact = std::f64::consts::PI * (-3.0f64).exp();
        assert!(
            (out.value.re - exact).abs() < 1e-8,
            "{} vs {exact}",
            out.value.re
        );
        assert!(out.value.im.abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tol = Tolerance {
            abs: 1e-15,
            rel: 0.0,
            max_nodes: 60,
        };
        let out = integrate_interval(&real(|t: f64| t.abs().sqrt().recip()), -1.0, 1.3, tol);
        assert!(!out.converged);
    }

    #[test]
    fn finite_interval_with_endpoint_singularity() {
        let tol = Tolerance {
            abs: 1e-10,
            rel: 0.0,
            max_nodes: 100_000,
        };
        let out = integrate_interval(&real(|t: f64| t.ln()), 0.0, 1.0, tol);
        assert_relative_eq!(out.value.re, -1.0, max_relative = 1e-9);
    }
}

//! Local errors: the squared `H¹`-seminorm distance of a target function
//! from the affine functions on a triangle.
//!
//! The best affine approximation in the `H¹` seminorm matches the mean
//! gradient, so
//!
//! ```text
//! err(T) = ∫_T |∇u - ḡ|²,   ḡ = (1/|T|) ∫_T ∇u.
//! ```
//!
//! It is evaluated from the same quadrature nodes in two passes (mean first,
//! then the centred integral), which keeps it nonnegative and avoids the
//! cancellation of the expanded form on nearly affine cells.

mod quadrature;
mod rule;
mod targets;

use std::sync::atomic::{AtomicUsize, Ordering};

pub use quadrature::{diameter, distance_to_triangle, plain_nodes, polar_layout, Node, PolarScheme, Radial};
pub use rule::{gauss_legendre, reference_monomial_integral, validate_rule, QuadratureRule, RuleValidation};
pub use targets::{target_by_name, Affine, SingularLocus, Target, XSquared, TARGET_NAMES, U1, U2};

use crate::indicators::ErrorFunctional;
use crate::nvb::triangle_area;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadratureMode {
    /// The degree-17 rule on every cell.
    Plain,
    /// Polar refinement near the singular locus until two successive
    /// levels agree to `tol` (relative), doubling the angular panels at most
    /// `max_depth` times.
    Adaptive { tol: f64, max_depth: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSettings {
    pub mode: QuadratureMode,
    /// Cells closer than this many diameters to a point singularity are
    /// integrated in polar coordinates.
    pub near_factor: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            mode: QuadratureMode::Adaptive { tol: 1e-9, max_depth: 8 },
            near_factor: 2.0,
        }
    }
}

impl QuadratureSettings {
    pub fn plain() -> Self {
        Self { mode: QuadratureMode::Plain, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalErrorResult {
    pub value: f64,
    /// Difference between the last two refinement levels; zero when no
    /// refinement was needed.
    pub estimated_quadrature_error: f64,
    /// False if the depth cap was hit before the tolerance was met.
    pub converged: bool,
}

/// `Σ w |g - ḡ|²` with `ḡ = Σ w g / Σ w`. Gradients are shifted by the
/// first sample before averaging, so a constant gradient gives exactly zero.
pub fn centered_error<T: Target + ?Sized>(u: &T, nodes: &[Node]) -> f64 {
    let Some(&(_, p0)) = nodes.first() else {
        return 0.0;
    };
    let g0 = u.gradient(p0);
    let mut shifted = Vec::with_capacity(nodes.len());
    let (mut m, mut gx, mut gy) = (0.0, 0.0, 0.0);
    for &(w, p) in nodes {
        let g = u.gradient(p);
        let d = [g[0] - g0[0], g[1] - g0[1]];
        m += w;
        gx += w * d[0];
        gy += w * d[1];
        shifted.push(d);
    }
    if m == 0.0 {
        return 0.0;
    }
    let (mx, my) = (gx / m, gy / m);
    nodes
        .iter()
        .zip(&shifted)
        .map(|(&(w, _), d)| w * ((d[0] - mx).powi(2) + (d[1] - my).powi(2)))
        .sum()
}

pub fn local_error_h1<T: Target + ?Sized>(u: &T, tri: &[[f64; 2]; 3], settings: &QuadratureSettings) -> LocalErrorResult {
    let area = triangle_area(tri);
    let mut nodes = Vec::new();
    let layout = match settings.mode {
        QuadratureMode::Plain => None,
        QuadratureMode::Adaptive { .. } => polar_layout(tri, u.singular_locus(), settings.near_factor),
    };
    let (Some(scheme), QuadratureMode::Adaptive { tol, max_depth }) = (layout, settings.mode) else {
        plain_nodes(tri, area, &mut nodes);
        return LocalErrorResult { value: centered_error(u, &nodes), estimated_quadrature_error: 0.0, converged: true };
    };
    scheme.nodes(1, &mut nodes);
    let mut prev = centered_error(u, &nodes);
    let mut estimate = f64::INFINITY;
    for level in 1..=max_depth {
        nodes.clear();
        scheme.nodes(1 << level, &mut nodes);
        let cur = centered_error(u, &nodes);
        estimate = (cur - prev).abs();
        prev = cur;
        if estimate <= tol * cur {
            return LocalErrorResult { value: cur, estimated_quadrature_error: estimate, converged: true };
        }
    }
    LocalErrorResult { value: prev, estimated_quadrature_error: estimate, converged: estimate == 0.0 }
}

/// The local error functional of a target, for use with the greedy
/// algorithms.
pub struct H1Error<T> {
    target: T,
    settings: QuadratureSettings,
    evaluations: AtomicUsize,
    unconverged: AtomicUsize,
}

impl<T: Target> H1Error<T> {
    pub fn new(target: T, settings: QuadratureSettings) -> Self {
        Self { target, settings, evaluations: AtomicUsize::new(0), unconverged: AtomicUsize::new(0) }
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn settings(&self) -> &QuadratureSettings {
        &self.settings
    }

    pub fn evaluate(&self, tri: &[[f64; 2]; 3]) -> LocalErrorResult {
        let r = local_error_h1(&self.target, tri, &self.settings);
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        if !r.converged {
            self.unconverged.fetch_add(1, Ordering::Relaxed);
        }
        r
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// Cells for which the adaptive layer hit its depth cap.
    pub fn unconverged(&self) -> usize {
        self.unconverged.load(Ordering::Relaxed)
    }
}

impl<T: Target> ErrorFunctional<[[f64; 2]; 3]> for H1Error<T> {
    fn local_error(&self, shape: &[[f64; 2]; 3]) -> f64 {
        self.evaluate(shape).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REF: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

    #[test]
    fn x_squared_on_reference_triangle() {
        let r = local_error_h1(&XSquared, &REF, &QuadratureSettings::default());
        assert!((r.value - 1.0 / 9.0).abs() <= 1e-12 / 9.0);
        // children of the bisection through (1/2, 1/2)
        let c1 = [[1.0, 0.0], [0.5, 0.5], [0.0, 0.0]];
        let c2 = [[0.0, 1.0], [0.5, 0.5], [0.0, 0.0]];
        let s = local_error_h1(&XSquared, &c1, &QuadratureSettings::default()).value
            + local_error_h1(&XSquared, &c2, &QuadratureSettings::default()).value;
        // exact values 1/24 and 1/72 from symbolic integration
        assert!((s - (1.0 / 24.0 + 1.0 / 72.0)).abs() < 1e-15);
        assert!(s <= 1.0 / 9.0);
    }

    #[test]
    fn affine_has_zero_error() {
        let r = local_error_h1(&Affine::default(), &[[0.1, 0.2], [0.4, -0.3], [0.7, 0.9]], &QuadratureSettings::default());
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn u2_energy_of_the_square() {
        // ∫ |∇u2|² over the plane = 2π/81; the mean gradient vanishes by symmetry
        let s = QuadratureSettings::default();
        let quarters = [
            [[-1.0, -1.0], [0.0, 0.0], [1.0, -1.0]],
            [[1.0, -1.0], [0.0, 0.0], [1.0, 1.0]],
            [[1.0, 1.0], [0.0, 0.0], [-1.0, 1.0]],
            [[-1.0, 1.0], [0.0, 0.0], [-1.0, -1.0]],
        ];
        let mut nodes = Vec::new();
        for q in &quarters {
            polar_layout(q, U2.singular_locus(), s.near_factor).unwrap().nodes(4, &mut nodes);
        }
        let energy: f64 = nodes.iter().map(|(w, p)| {
            let g = U2.gradient(*p);
            w * (g[0] * g[0] + g[1] * g[1])
        }).sum();
        let exact = 2.0 * std::f64::consts::PI / 81.0;
        assert!((energy - exact).abs() < 1e-13, "{energy} vs {exact}");
        assert!((exact - 0.07757).abs() < 1e-5);
    }

    #[test]
    fn u1_corner_cell_converges() {
        let tri = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.5]];
        let r = local_error_h1(&U1, &tri, &QuadratureSettings::default());
        assert!(r.converged, "{r:?}");
        assert!(r.value > 0.0);
    }
}

//! Composite quadrature on a triangle.
//!
//! Away from a target's singular locus the degree-17 rule is used as is.
//! Near it, the triangle is swept by rays from the locus centre. The fan of
//! rays is cut at the vertex directions (and, for a circle, at the
//! circle/edge crossings) so that both ends of every ray stay on fixed
//! edges; rays are parametrised by their exit point on the far edge. The
//! radial range is cut at the circle or graded geometrically towards a
//! point singularity. Inside each piece the integrand is smooth, so
//! Gauss–Legendre converges fast.

use super::rule::{gl10, QuadratureRule};
use super::targets::SingularLocus;

/// A weighted sample point; the weight includes the Jacobian.
pub type Node = (f64, [f64; 2]);

/// Radial panels used towards a point singularity: `r_hi · 2^-k`.
const POINT_GRADING_LEVELS: i32 = 40;

pub fn plain_nodes(tri: &[[f64; 2]; 3], area: f64, out: &mut Vec<Node>) {
    let rule = QuadratureRule::degree17();
    let [a, b, c] = tri;
    for (l, &w) in rule.nodes.iter().zip(&rule.weights) {
        out.push((
            w * area,
            [
                l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
                l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
            ],
        ));
    }
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Euclidean distance from `p` to the closed triangle.
pub fn distance_to_triangle(p: [f64; 2], tri: &[[f64; 2]; 3]) -> f64 {
    let o = cross(sub(tri[1], tri[0]), sub(tri[2], tri[0])).signum();
    let inside = (0..3).all(|i| o * cross(sub(tri[(i + 1) % 3], tri[i]), sub(p, tri[i])) >= 0.0);
    if inside {
        return 0.0;
    }
    (0..3)
        .map(|i| {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let ab = sub(b, a);
            let t = (dot(sub(p, a), ab) / dot(ab, ab)).clamp(0.0, 1.0);
            let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
            sub(p, q)[0].hypot(sub(p, q)[1])
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn diameter(tri: &[[f64; 2]; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let d = sub(tri[i], tri[(i + 1) % 3]);
            d[0].hypot(d[1])
        })
        .fold(0.0, f64::max)
}

/// How the radial direction is cut.
#[derive(Clone, Copy, Debug)]
pub enum Radial {
    /// Geometric panels towards the centre.
    Graded,
    /// Split where the ray crosses the circle of this radius.
    SplitAt(f64),
}

/// Part of the triangle swept by rays from the centre that enter through
/// one segment (`near`, absent when the centre is in the triangle) and
/// leave through another (`far`). Both are oriented counter-clockwise as
/// seen from the centre, so their start points lie on the same ray.
#[derive(Clone, Copy, Debug)]
struct Sector {
    far: ([f64; 2], [f64; 2]),
    near: Option<([f64; 2], [f64; 2])>,
    /// Breakpoints in the far-edge parameter.
    cuts: [f64; 2],
    ncuts: usize,
}

/// Rays from a centre, parametrised by where they leave the triangle:
/// `x = q(t) - σ (q(t) - c)` with `q(t)` on a far edge. The Jacobian is
/// `(1 - σ) |(q(0) - c) × (q(1) - q(0))|`, so polynomials stay polynomials
/// and nothing is singular unless the integrand is.
pub struct PolarScheme {
    center: [f64; 2],
    radial: Radial,
    sectors: Vec<Sector>,
}

fn ray_hits_line(c: [f64; 2], through: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    // c + λ d on the line a + t (b - a)
    let d = sub(through, c);
    let t = cross(sub(c, a), d) / cross(sub(b, a), d);
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

impl PolarScheme {
    pub fn new(tri: &[[f64; 2]; 3], center: [f64; 2], radial: Radial) -> Self {
        let c = center;
        let ccw = cross(sub(tri[1], tri[0]), sub(tri[2], tri[0])) > 0.0;
        let v = if ccw { *tri } else { [tri[0], tri[2], tri[1]] };
        let side: Vec<f64> = (0..3).map(|i| cross(sub(v[(i + 1) % 3], v[i]), sub(c, v[i]))).collect();

        // orient a segment counter-clockwise about the centre
        let orient = |a: [f64; 2], b: [f64; 2]| if cross(sub(a, c), sub(b, c)) >= 0.0 { (a, b) } else { (b, a) };
        let mut sectors = Vec::new();
        let mut push = |far: ([f64; 2], [f64; 2]), near: Option<([f64; 2], [f64; 2])>| {
            if cross(sub(far.0, c), sub(far.1, c)) > 0.0 {
                sectors.push(Sector { far, near, cuts: [0.0; 2], ncuts: 0 });
            }
        };
        if side.iter().all(|&s| s >= 0.0) {
            for i in 0..3 {
                if side[i] > 0.0 {
                    push((v[i], v[(i + 1) % 3]), None);
                }
            }
        } else {
            let near: Vec<usize> = (0..3).filter(|&i| side[i] < 0.0).collect();
            let far: Vec<usize> = (0..3).filter(|&i| side[i] > 0.0).collect();
            let seg = |i: usize| orient(v[i], v[(i + 1) % 3]);
            match (near.len(), far.len()) {
                (1, 1) => {
                    let (n, f) = (seg(near[0]), seg(far[0]));
                    push(f, Some(n));
                }
                (1, 2) => {
                    // split the near edge by the ray through the far apex
                    let (n0, n1) = seg(near[0]);
                    let (f0, f1) = (seg(far[0]), seg(far[1]));
                    let (first, second) = if f0.0 == n0 { (f0, f1) } else { (f1, f0) };
                    let p = ray_hits_line(c, first.1, n0, n1);
                    push(first, Some((n0, p)));
                    push(second, Some((p, n1)));
                }
                (2, 1) => {
                    let (f0, f1) = seg(far[0]);
                    let (a, b) = (seg(near[0]), seg(near[1]));
                    let (first, second) = if a.0 == f0 { (a, b) } else { (b, a) };
                    let p = ray_hits_line(c, first.1, f0, f1);
                    push((f0, p), Some(first));
                    push((p, f1), Some(second));
                }
                _ => {}
            }
        }

        if let Radial::SplitAt(r) = radial {
            let crossings: Vec<[f64; 2]> = (0..3).flat_map(|i| circle_crossings(v[i], v[(i + 1) % 3], c, r)).collect();
            for s in &mut sectors {
                let (a, b) = s.far;
                for &p in &crossings {
                    let d = sub(p, c);
                    let t = cross(sub(c, a), d) / cross(sub(b, a), d);
                    if t > 0.0 && t < 1.0 && s.ncuts < 2 {
                        s.cuts[s.ncuts] = t;
                        s.ncuts += 1;
                    }
                }
                s.cuts[..s.ncuts].sort_by(f64::total_cmp);
            }
        }
        Self { center, radial, sectors }
    }

    /// Nodes with every sector cut into `panels` pieces along the far edge.
    pub fn nodes(&self, panels: usize, out: &mut Vec<Node>) {
        let (xs, ws) = gl10();
        let c = self.center;
        let mut radial: Vec<f64> = Vec::with_capacity(POINT_GRADING_LEVELS as usize + 3);
        for s in &self.sectors {
            let (a, b) = s.far;
            let ab = sub(b, a);
            let jac = cross(sub(a, c), ab).abs();
            let mut knots = vec![0.0];
            knots.extend_from_slice(&s.cuts[..s.ncuts]);
            knots.push(1.0);
            for piece in knots.windows(2) {
                let h = (piece[1] - piece[0]) / panels as f64;
                if h <= 0.0 {
                    continue;
                }
                for p in 0..panels {
                    let t0 = piece[0] + p as f64 * h;
                    for (&x, &wt) in xs.iter().zip(ws) {
                        let t = t0 + x * h;
                        let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
                        let w = sub(q, c);
                        // σ ranges over [0, δ]; δ < 1 when the ray enters
                        // through a near edge
                        let delta = match s.near {
                            None => 1.0,
                            Some((n0, n1)) => {
                                let e = sub(n1, n0);
                                (cross(sub(q, n0), e) / cross(w, e)).abs().min(1.0)
                            }
                        };
                        radial.clear();
                        radial.push(0.0);
                        match self.radial {
                            Radial::Graded => {
                                // s = 1 - σ halves towards the centre
                                let mut k = 1;
                                while k <= POINT_GRADING_LEVELS {
                                    let sigma = 1.0 - 0.5f64.powi(k);
                                    if sigma >= delta {
                                        break;
                                    }
                                    radial.push(sigma);
                                    k += 1;
                                }
                            }
                            Radial::SplitAt(r) => {
                                let len = w[0].hypot(w[1]);
                                let sigma = (len - r) / len;
                                if sigma > 0.0 && sigma < delta {
                                    radial.push(sigma);
                                }
                            }
                        }
                        radial.push(delta);
                        for seg in radial.windows(2) {
                            let (s0, s1) = (seg[0], seg[1]);
                            let len = s1 - s0;
                            for (&y, &v) in xs.iter().zip(ws) {
                                let sigma = s0 + y * len;
                                out.push((
                                    wt * h * v * len * jac * (1.0 - sigma),
                                    [q[0] - sigma * w[0], q[1] - sigma * w[1]],
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Points where the segment `[a, b]` crosses the circle, excluding the
/// endpoints.
fn circle_crossings(a: [f64; 2], b: [f64; 2], c: [f64; 2], r: f64) -> Vec<[f64; 2]> {
    let ab = sub(b, a);
    let ac = sub(a, c);
    let qa = dot(ab, ab);
    let qb = 2.0 * dot(ac, ab);
    let qc = dot(ac, ac) - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // numerically stable roots
    let q = -0.5 * (qb + qb.signum() * sq);
    let mut roots = vec![];
    if q != 0.0 {
        roots.push(q / qa);
        roots.push(qc / q);
    } else {
        roots.push(sq / (2.0 * qa));
        roots.push(-sq / (2.0 * qa));
    }
    roots
        .into_iter()
        .filter(|&t| t > 0.0 && t < 1.0)
        .map(|t| [a[0] + t * ab[0], a[1] + t * ab[1]])
        .collect()
}

/// Which scheme a triangle needs for a given locus.
pub fn polar_layout(tri: &[[f64; 2]; 3], locus: Option<SingularLocus>, near_factor: f64) -> Option<PolarScheme> {
    match locus? {
        SingularLocus::Point(p) => {
            let d = distance_to_triangle(p, tri);
            (d <= near_factor * diameter(tri)).then(|| PolarScheme::new(tri, p, Radial::Graded))
        }
        SingularLocus::Circle { center, radius } => {
            let dmin = distance_to_triangle(center, tri);
            let dmax = tri
                .iter()
                .map(|&v| sub(v, center)[0].hypot(sub(v, center)[1]))
                .fold(0.0, f64::max);
            (dmin < radius && radius < dmax).then(|| PolarScheme::new(tri, center, Radial::SplitAt(radius)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nvb::triangle_area;

    fn total(nodes: &[Node]) -> f64 {
        nodes.iter().map(|n| n.0).sum()
    }

    #[test]
    fn polar_weights_reproduce_area() {
        let tri = [[0.0, 0.0], [0.5, 0.0], [0.5, 0.5]];
        let area = triangle_area(&tri);
        for center in [[0.0, 0.0], [0.5, 0.25], [0.3, 0.1], [-0.2, 0.3], [0.7, -0.1]] {
            for radial in [Radial::Graded, Radial::SplitAt(0.2)] {
                let mut nodes = Vec::new();
                PolarScheme::new(&tri, center, radial).nodes(2, &mut nodes);
                assert!((total(&nodes) - area).abs() < 1e-14, "{center:?} {:?}", total(&nodes));
            }
        }
    }

    #[test]
    fn polar_integrates_polynomials() {
        let tri = [[0.1, 0.05], [0.4, 0.1], [0.2, 0.35]];
        let f = |p: [f64; 2]| p[0].powi(3) * p[1] + 2.0 * p[1] * p[1];
        let mut plain = Vec::new();
        plain_nodes(&tri, triangle_area(&tri), &mut plain);
        let exact: f64 = plain.iter().map(|(w, p)| w * f(*p)).sum();
        let check = |center: [f64; 2], radial: Radial, panels: usize| {
            let mut nodes = Vec::new();
            PolarScheme::new(&tri, center, radial).nodes(panels, &mut nodes);
            let q: f64 = nodes.iter().map(|(w, p)| w * f(*p)).sum();
            assert!((q - exact).abs() < 1e-13 * exact.abs(), "{center:?} {radial:?}: {q} vs {exact}");
        };
        // centre in the closed triangle, straight cuts: polynomial in the
        // edge parameter, so one panel is exact
        for center in [[0.1, 0.05], [0.2, 0.2], [0.25, 0.075]] {
            check(center, Radial::Graded, 1);
        }
        // a near edge or a circular cut is smooth but rational in the edge
        // parameter
        for center in [[0.1, 0.05], [0.0, 0.0], [0.2, 0.2], [0.3, 0.0]] {
            check(center, Radial::Graded, 8);
            check(center, Radial::SplitAt(0.25), 8);
        }
    }

    #[test]
    fn distances() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert_eq!(distance_to_triangle([0.2, 0.2], &tri), 0.0);
        assert_eq!(distance_to_triangle([0.0, 0.0], &tri), 0.0);
        assert!((distance_to_triangle([1.0, 1.0], &tri) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(distance_to_triangle([-2.0, 0.5], &tri), 2.0);
    }
}

//! The degree-17 triangle rule, and what the adaptive scheme buys on cells
//! touching the singular point.

use conftree::local_error::{local_error_h1, validate_rule, QuadratureRule, QuadratureSettings, XSquared, U1};

fn main() {
    let v = validate_rule(QuadratureRule::degree17(), 17);
    println!(
        "{} points, max relative monomial error {:e}, min weight {:e}",
        QuadratureRule::degree17().len(),
        v.max_relative_error,
        v.min_weight
    );
    let reference = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    println!("x^2 on the reference triangle: {} (exact 1/9)", local_error_h1(&XSquared, &reference, &QuadratureSettings::default()).value);

    // a cell with the re-entrant corner as a vertex
    let mut tri = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]];
    for _ in 0..4 {
        let plain = local_error_h1(&U1, &tri, &QuadratureSettings::plain()).value;
        let adaptive = local_error_h1(&U1, &tri, &QuadratureSettings::default());
        println!("h = {:<8} plain {plain:.12e}  adaptive {:.12e} (estimated error {:.1e})", tri[1][0], adaptive.value, adaptive.estimated_quadrature_error);
        tri = [[0.0, 0.0], [tri[1][0] / 2.0, 0.0], [0.0, tri[2][1] / 2.0]];
    }
}

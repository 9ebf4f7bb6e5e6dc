use std::fmt;
use std::str::FromStr;

use super::dyadic::DyadicPoint;
use super::labeling::{compatible_initial_labeling, InitialMesh};
use crate::{Error, Result};

/// The two benchmark domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `(-1/2, 1/2)^2` without the closed lower-right quarter `[0,1/2]x[-1/2,0]`.
    LShape,
    /// `(-1, 1)^2`.
    Square,
}

impl Domain {
    pub fn area(self) -> f64 {
        match self {
            Domain::LShape => 0.75,
            Domain::Square => 4.0,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::LShape => "lshape",
            Domain::Square => "square",
        })
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lshape" | "l-shape" => Ok(Domain::LShape),
            "square" => Ok(Domain::Square),
            _ => Err(Error::Config(format!("unknown domain `{s}` (expected lshape or square)"))),
        }
    }
}

fn points(raw: &[(f64, f64)]) -> Vec<DyadicPoint> {
    raw.iter()
        .map(|&(x, y)| DyadicPoint::from_f64(x, y).expect("dyadic literal"))
        .collect()
}

/// Fixed initial triangulations.
///
/// * L-shape: each of the three squares of side 1/2 is cut by its diagonal
///   through the re-entrant corner, giving six right triangles whose
///   refinement edges are those diagonals.
/// * Square: the two diagonals cut it into four triangles whose newest
///   vertex is the centre, so every refinement edge lies on the boundary.
pub fn build_domain_mesh(domain: Domain) -> InitialMesh {
    let (pts, tris): (Vec<DyadicPoint>, Vec<[usize; 3]>) = match domain {
        Domain::LShape => (
            points(&[
                (0.0, 0.0),
                (0.5, 0.0),
                (0.5, 0.5),
                (0.0, 0.5),
                (-0.5, 0.5),
                (-0.5, 0.0),
                (-0.5, -0.5),
                (0.0, -0.5),
            ]),
            vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 6], [0, 6, 7]],
        ),
        Domain::Square => (
            points(&[(0.0, 0.0), (-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]),
            vec![[1, 0, 2], [2, 0, 3], [3, 0, 4], [4, 0, 1]],
        ),
    };
    compatible_initial_labeling(&pts, &tris).expect("built-in meshes admit a compatible labeling")
}

/// A one-triangle mesh labeled as given (newest vertex `b`).
pub fn single_triangle(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Result<InitialMesh> {
    let pts = vec![
        DyadicPoint::from_f64(a.0, a.1)?,
        DyadicPoint::from_f64(b.0, b.1)?,
        DyadicPoint::from_f64(c.0, c.1)?,
    ];
    let mesh = InitialMesh { points: pts, triangles: vec![[0, 1, 2]] };
    super::labeling::check_compatibility(&mesh)?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nvb::labeling::check_compatibility;

    fn total_area(mesh: &InitialMesh) -> f64 {
        mesh.triangles
            .iter()
            .map(|t| super::super::mesh::triangle_area(&t.map(|i| mesh.points[i].to_f64())))
            .sum()
    }

    #[test]
    fn lshape_mesh() {
        let mesh = build_domain_mesh(Domain::LShape);
        assert_eq!(mesh.triangles.len(), 6);
        assert_eq!(total_area(&mesh), 0.75);
        check_compatibility(&mesh).unwrap();
        // the newest vertex is the right-angle corner, never the origin
        for t in &mesh.triangles {
            assert_ne!(t[1], 0);
            assert!(t[0] == 0 || t[2] == 0);
        }
    }

    #[test]
    fn square_mesh() {
        let mesh = build_domain_mesh(Domain::Square);
        assert_eq!(mesh.triangles.len(), 4);
        assert_eq!(total_area(&mesh), 4.0);
        check_compatibility(&mesh).unwrap();
        assert!(mesh.triangles.iter().all(|t| t[1] == 0));
    }

    #[test]
    fn names() {
        assert_eq!("lshape".parse::<Domain>().unwrap(), Domain::LShape);
        assert_eq!(Domain::Square.to_string(), "square");
        assert!("disk".parse::<Domain>().is_err());
    }
}

//! Convex hulls of three-dimensional point clouds, as used to test that
//! generated boundary families span the sampled sector region.
//!
//! Large clouds are first reduced to their support points over a dense set
//! of directions. The hull of that subset lies inside the hull of the whole
//! cloud, so containment in it is a conservative test.

use serde::Serialize;

pub type Point3 = [f64; 3];

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

/// Roughly uniform unit vectors on the sphere (Fibonacci lattice).
pub fn fibonacci_directions(count: usize) -> Vec<Point3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let r = (1.0 - y * y).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), y, r * t.sin()]
        })
        .collect()
}

/// Maximizers of `d · x` over `points` for every direction, deduplicated.
pub fn support_points(points: &[Point3], directions: &[Point3]) -> Vec<Point3> {
    let mut out: Vec<Point3> = Vec::new();
    for &d in directions {
        let Some(best) = points.iter().copied().max_by(|a, b| dot(*a, d).total_cmp(&dot(*b, d))) else {
            continue;
        };
        if !out.iter().any(|p| norm(sub(*p, best)) < 1e-12) {
            out.push(best);
        }
    }
    out
}

/// Outward half-space `normal · x ≤ offset` with unit normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Plane {
    pub normal: Point3,
    pub offset: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hull3 {
    pub planes: Vec<Plane>,
    pub vertices: Vec<Point3>,
}

impl Hull3 {
    /// Supporting planes through every affinely independent triple whose
    /// plane leaves all points on one side (up to `eps`). Cubic in the number
    /// of points times a linear scan, so meant for support sets of at most a
    /// few hundred points.
    pub fn from_points(points: &[Point3], eps: f64) -> Hull3 {
        let m = points.len();
        let mut planes: Vec<Plane> = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let nrm = cross(sub(points[j], points[i]), sub(points[k], points[i]));
                    let len = norm(nrm);
                    if len < 1e-12 {
                        continue;
                    }
                    let normal = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
                    let offset = dot(normal, points[i]);
                    let (mut above, mut below) = (false, false);
                    for p in points {
                        let s = dot(normal, *p) - offset;
                        above |= s > eps;
                        below |= s < -eps;
                        if above && below {
                            break;
                        }
                    }
                    let plane = match (above, below) {
                        (false, _) => Plane { normal, offset },
                        (true, false) => Plane { normal: normal.map(|x| -x), offset: -offset },
                        (true, true) => continue,
                    };
                    let dup = planes.iter().any(|q| norm(sub(q.normal, plane.normal)) < 1e-9 && (q.offset - plane.offset).abs() < 1e-9);
                    if !dup {
                        planes.push(plane);
                    }
                }
            }
        }
        Hull3 { planes, vertices: points.to_vec() }
    }

    /// Largest signed distance of `x` outside any supporting plane; `≤ 0`
    /// inside. A degenerate (flat) hull has two opposite planes per face so
    /// the test still rejects off-plane points.
    pub fn excess(&self, x: Point3) -> f64 {
        self.planes.iter().map(|p| dot(p.normal, x) - p.offset).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: Point3, tol: f64) -> bool {
        self.excess(x) <= tol
    }
}

/// Hull of the support points of `points` over `directions` unit vectors.
pub fn support_hull(points: &[Point3], directions: usize) -> Hull3 {
    let support = support_points(points, &fibonacci_directions(directions));
    Hull3::from_points(&support, 1e-10)
}

use super::{GeometryError, Vec2};

/// Convex hull in counter-clockwise order without collinear vertices
/// (Andrew's monotone chain). The first vertex is the lowest-x, then lowest-y point.
pub fn convex_hull(points: &[Vec2]) -> Result<Vec<Vec2>, GeometryError> {
    if points.len() < 3 {
        return Err(GeometryError::TooFewPoints { need: 3, got: points.len() });
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();

    let turn = |o: Vec2, a: Vec2, b: Vec2| (a - o).cross(b - o);
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(GeometryError::Collinear);
    }
    Ok(hull)
}

/// Minkowski sum of two convex CCW polygons, merged edge-by-edge in O(n + m).
pub fn minkowski_sum(a: &[Vec2], b: &[Vec2]) -> Result<Vec<Vec2>, GeometryError> {
    let start = |p: &[Vec2]| {
        (0..p.len()).min_by(|&i, &j| p[i].y.total_cmp(&p[j].y).then(p[i].x.total_cmp(&p[j].x))).unwrap_or(0)
    };
    if a.len() < 3 || b.len() < 3 {
        return Err(GeometryError::TooFewPoints { need: 3, got: a.len().min(b.len()) });
    }
    let rot = |p: &[Vec2]| {
        let s = start(p);
        let mut r: Vec<Vec2> = p[s..].iter().chain(&p[..s]).copied().collect();
        r.push(r[0]);
        r.push(r[1]);
        r
    };
    let (p, q) = (rot(a), rot(b));
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(n + m);
    while i < n || j < m {
        out.push(p[i] + q[j]);
        let c = (p[i + 1] - p[i]).cross(q[j + 1] - q[j]);
        if c >= 0.0 && i < n {
            i += 1;
        }
        if c <= 0.0 && j < m {
            j += 1;
        }
    }
    // drop collinear merge points
    convex_hull(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n^3) oracle: an ordered pair (p, q) is a hull edge when every other
    /// point lies strictly left of p->q (or on the segment).
    fn brute_force_hull(points: &[Vec2]) -> Vec<Vec2> {
        let mut verts = Vec::new();
        for (i, &p) in points.iter().enumerate() {
            for (j, &q) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let ok = points.iter().all(|&r| {
                    let c = (q - p).cross(r - p);
                    c > 0.0 || (c == 0.0 && (r - p).dot(q - p) >= 0.0 && (r - q).dot(p - q) >= 0.0)
                });
                if ok {
                    verts.push(p);
                    verts.push(q);
                }
            }
        }
        verts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        verts.dedup();
        verts
    }

    fn sorted(mut v: Vec<Vec2>) -> Vec<Vec2> {
        v.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        v
    }

    fn is_ccw_convex(h: &[Vec2]) -> bool {
        (0..h.len()).all(|i| {
            let (a, b, c) = (h[i], h[(i + 1) % h.len()], h[(i + 2) % h.len()]);
            (b - a).cross(c - b) > 0.0
        })
    }

    #[test]
    fn triangle_is_returned_ccw() {
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.len(), 3);
        assert!(is_ccw_convex(&h));
        assert_eq!(sorted(h), sorted(pts.to_vec()));
    }

    #[test]
    fn square_with_center() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 0.5),
            Vec2::new(0.5, 0.0),
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(sorted(h), sorted(pts[..4].to_vec()));
    }

    #[test]
    fn collinear_and_too_few() {
        let line: Vec<Vec2> = (0..5).map(|i| Vec2::new(i as f64, 2.0 * i as f64)).collect();
        assert_eq!(convex_hull(&line), Err(GeometryError::Collinear));
        assert!(matches!(convex_hull(&line[..2]), Err(GeometryError::TooFewPoints { .. })));
    }

    #[test]
    fn matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let pts: Vec<Vec2> =
                (0..50).map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let h = convex_hull(&pts).unwrap();
            assert!(is_ccw_convex(&h));
            assert_eq!(sorted(h), brute_force_hull(&pts));
        }
    }

    #[test]
    fn minkowski_matches_pairwise_hull() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mk = |rng: &mut ChaCha8Rng, n: usize| {
                let pts: Vec<Vec2> =
                    (0..n).map(|_| Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0))).collect();
                convex_hull(&pts).unwrap()
            };
            let a = mk(&mut rng, 12);
            let b = mk(&mut rng, 9);
            let sum = minkowski_sum(&a, &b).unwrap();
            let pairs: Vec<Vec2> = a.iter().flat_map(|&p| b.iter().map(move |&q| p + q)).collect();
            let oracle = convex_hull(&pairs).unwrap();
            assert_eq!(sum.len(), oracle.len());
            for (s, o) in sorted(sum).iter().zip(sorted(oracle)) {
                assert!((*s - o).norm() < 1e-12);
            }
        }
    }
}

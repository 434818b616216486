use super::Vec2;

/// Number of boundary samples per smooth shape.
pub const BSPLINE_SAMPLES: usize = 256;

/// Evaluates a closed uniform cubic B-spline with the given control polygon at
/// `samples` evenly spaced parameters, using de Boor's recursion on integer knots.
pub fn closed_cubic_bspline(control: &[Vec2], samples: usize) -> Vec<Vec2> {
    let m = control.len();
    let span = m as f64;
    (0..samples).map(|s| de_boor(control, s as f64 * span / samples as f64)).collect()
}

/// Point at parameter `u` in `[0, m)`. Knots are the integers; the span
/// `[k, k+1)` is governed by control points `k-3 ..= k` taken cyclically.
fn de_boor(control: &[Vec2], u: f64) -> Vec2 {
    const DEGREE: usize = 3;
    let m = control.len() as isize;
    let k = u.floor() as isize;
    let mut d: [Vec2; DEGREE + 1] =
        std::array::from_fn(|j| control[(k - DEGREE as isize + j as isize).rem_euclid(m) as usize]);
    for r in 1..=DEGREE {
        for j in (r..=DEGREE).rev() {
            // knot t_i = i with i = j + k - DEGREE
            let ti = (j as isize + k - DEGREE as isize) as f64;
            let alpha = (u - ti) / (DEGREE + 1 - r) as f64;
            d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
        }
    }
    d[DEGREE]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form uniform cubic basis, independent of the recursion.
    fn basis_point(c: &[Vec2], u: f64) -> Vec2 {
        let m = c.len() as isize;
        let k = u.floor() as isize;
        let t = u - k as f64;
        let p = |o: isize| c[(k - 3 + o).rem_euclid(m) as usize];
        let b0 = (1.0 - t).powi(3) / 6.0;
        let b1 = (3.0 * t.powi(3) - 6.0 * t * t + 4.0) / 6.0;
        let b2 = (-3.0 * t.powi(3) + 3.0 * t * t + 3.0 * t + 1.0) / 6.0;
        let b3 = t.powi(3) / 6.0;
        p(0) * b0 + p(1) * b1 + p(2) * b2 + p(3) * b3
    }

    #[test]
    fn recursion_matches_closed_form_basis() {
        let c: Vec<Vec2> = (0..7).map(|i| Vec2::polar(1.0 + 0.3 * (i as f64 * 1.7).sin(), i as f64 * 0.9)).collect();
        let pts = closed_cubic_bspline(&c, 100);
        for (s, p) in pts.iter().enumerate() {
            let q = basis_point(&c, s as f64 * 7.0 / 100.0);
            assert!((*p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn curve_is_closed_and_continuous() {
        let c = [Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0), Vec2::new(2.0, 1.0), Vec2::new(0.0, 1.0)];
        let a = de_boor(&c, 4.0 - 1e-9);
        let b = de_boor(&c, 0.0);
        assert!((a - b).norm() < 1e-8);
    }
}

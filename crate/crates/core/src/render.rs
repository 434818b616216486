//! Heatmaps and zero-level contours of 2D value slices.
//!
//! Images put `x1` on the horizontal axis (left to right) and `x2` on the
//! vertical axis (bottom to top). Each grid node becomes a `scale × scale`
//! block of pixels.

use crate::geometry::Vec2;
use crate::grid::{axis_coordinates, ValueGrid};

/// Line segments of the `level` set in world coordinates.
///
/// Saddle cells are disambiguated by the mean of their four corners.
pub fn marching_squares(grid: &ValueGrid, level: f64) -> Vec<(Vec2, Vec2)> {
    assert_eq!(grid.ndim(), 2, "marching squares needs a 2D grid");
    let (n1, n2) = (grid.shape[0], grid.shape[1]);
    let coords = axis_coordinates(&grid.domain, &grid.shape);
    let at = |i: usize, j: usize| grid.values[i * n2 + j] - level;
    let p = |i: usize, j: usize| Vec2::new(coords[0][i], coords[1][j]);
    let cross = |a: Vec2, fa: f64, b: Vec2, fb: f64| {
        let t = if fa == fb { 0.5 } else { fa / (fa - fb) };
        a + (b - a) * t
    };
    let mut segs = Vec::new();
    for i in 0..n1.saturating_sub(1) {
        for j in 0..n2.saturating_sub(1) {
            // corners counter-clockwise from (i, j)
            let c = [p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)];
            let f = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let inside: Vec<bool> = f.iter().map(|&v| v < 0.0).collect();
            let edge = |e: usize| cross(c[e], f[e], c[(e + 1) % 4], f[(e + 1) % 4]);
            let crossing: Vec<usize> = (0..4).filter(|&e| inside[e] != inside[(e + 1) % 4]).collect();
            match crossing.len() {
                2 => segs.push((edge(crossing[0]), edge(crossing[1]))),
                4 => {
                    let centre_inside = f.iter().sum::<f64>() / 4.0 < 0.0;
                    // pair each edge with the neighbour that keeps the centre's side connected
                    if centre_inside == inside[0] {
                        segs.push((edge(0), edge(1)));
                        segs.push((edge(2), edge(3)));
                    } else {
                        segs.push((edge(3), edge(0)));
                        segs.push((edge(1), edge(2)));
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

/// 8-bit image, one or three channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl Image {
    /// Binary PGM (`P5`) or PPM (`P6`).
    pub fn encode(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let k = (y * self.width + x) * self.channels;
        &self.data[k..k + self.channels]
    }

    fn to_rgb(&self) -> Image {
        if self.channels == 3 {
            return self.clone();
        }
        Image {
            width: self.width,
            height: self.height,
            channels: 3,
            data: self.data.iter().flat_map(|&g| [g, g, g]).collect(),
        }
    }
}

/// Grayscale heatmap scaled linearly from the field's min (black) to max
/// (white). A constant field is mid-gray.
pub fn heatmap(grid: &ValueGrid, scale: usize) -> Image {
    assert_eq!(grid.ndim(), 2, "heatmap needs a 2D grid");
    let scale = scale.max(1);
    let (n1, n2) = (grid.shape[0], grid.shape[1]);
    let (lo, hi) = (grid.min_value(), grid.max_value());
    let shade = |v: f64| if hi > lo { ((v - lo) / (hi - lo) * 255.0).round() as u8 } else { 128 };
    let (width, height) = (n1 * scale, n2 * scale);
    let mut data = vec![0u8; width * height];
    for y in 0..height {
        let j = n2 - 1 - y / scale;
        for x in 0..width {
            data[y * width + x] = shade(grid.values[(x / scale) * n2 + j]);
        }
    }
    Image { width, height, channels: 1, data }
}

/// Heatmap with the zero-level contour drawn in red.
pub fn contour_overlay(grid: &ValueGrid, scale: usize) -> Image {
    let mut img = heatmap(grid, scale).to_rgb();
    let scale = scale.max(1) as f64;
    let (dx, dy) = (grid.spacing(0), grid.spacing(1));
    let n2 = grid.shape[1] as f64;
    let to_px = |p: Vec2| {
        let u = (p.x - grid.domain.lo[0]) / dx;
        let v = (p.y - grid.domain.lo[1]) / dy;
        ((u + 0.5) * scale, (n2 - 0.5 - v) * scale)
    };
    for (a, b) in marching_squares(grid, 0.0) {
        let (x0, y0) = to_px(a);
        let (x1, y1) = to_px(b);
        let steps = (x1 - x0).abs().max((y1 - y0).abs()).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let (x, y) = (x0 + (x1 - x0) * t, y0 + (y1 - y0) * t);
            if x >= 0.0 && y >= 0.0 && (x as usize) < img.width && (y as usize) < img.height {
                let k = (y as usize * img.width + x as usize) * 3;
                img.data[k..k + 3].copy_from_slice(&[255, 0, 0]);
            }
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;

    fn field(n: usize, f: impl Fn(f64, f64) -> f64) -> ValueGrid {
        ValueGrid::from_fn(Domain::boxed(&[-2.0, -2.0], &[2.0, 2.0]).unwrap(), vec![n, n], |x| f(x[0], x[1])).unwrap()
    }

    #[test]
    fn constant_field_is_uniform() {
        let g = field(9, |_, _| 3.0);
        let img = heatmap(&g, 3);
        assert_eq!((img.width, img.height), (27, 27));
        assert!(img.data.iter().all(|&p| p == img.data[0]));
        assert!(marching_squares(&g, 0.0).is_empty());
        assert_eq!(contour_overlay(&g, 3).data, img.to_rgb().data);
    }

    #[test]
    fn disc_contour_within_one_cell() {
        let r = 1.1;
        for n in [9, 17, 40] {
            let g = field(n, |x, y| x.hypot(y) - r);
            let dx = g.spacing(0);
            let segs = marching_squares(&g, 0.0);
            assert!(segs.len() >= 4);
            for (a, b) in &segs {
                for p in [a, b] {
                    assert!((p.norm() - r).abs() <= dx, "n {n}: |p| = {}", p.norm());
                }
            }
            // closed curve: every endpoint is shared by exactly two segments
            let mut ends: Vec<(i64, i64)> = segs
                .iter()
                .flat_map(|(a, b)| [*a, *b])
                .map(|p| ((p.x * 1e9).round() as i64, (p.y * 1e9).round() as i64))
                .collect();
            ends.sort();
            for c in ends.chunks(2) {
                assert_eq!(c[0], c[1]);
            }
        }
    }

    #[test]
    fn linear_field_contour_is_exact() {
        let g = field(11, |x, _| x - 0.3);
        let segs = marching_squares(&g, 0.0);
        assert_eq!(segs.len(), 10);
        for (a, b) in segs {
            assert!((a.x - 0.3).abs() < 1e-12 && (b.x - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn orientation_and_encoding() {
        // x2 increases upwards: the top row shows the largest x2
        let g = field(4, |_, y| y);
        let img = heatmap(&g, 1);
        assert_eq!(img.pixel(0, 0), &[255]);
        assert_eq!(img.pixel(3, 3), &[0]);
        let bytes = img.encode();
        assert!(bytes.starts_with(b"P5\n4 4\n255\n"));
        assert_eq!(bytes.len(), 11 + 16);
        let overlay = contour_overlay(&field(8, |x, y| x.hypot(y) - 1.0), 4);
        assert!(overlay.encode().starts_with(b"P6\n32 32\n255\n"));
        assert!(overlay.data.chunks(3).any(|p| p == [255, 0, 0]));
    }
}

//! Procedural photo-like test images.
//!
//! Each image is a lit gradient backdrop, a handful of soft-edged colored
//! shapes, multi-octave value noise for texture (roughly 1/f spectrum) and
//! a little sensor grain. Deterministic per seed.

use rand::Rng;

use crate::backend::RgbImage;
use crate::channel::{mix_seed, rng};
use crate::error::Result;

struct ValueNoise {
    cells: usize,
    grid: Vec<f64>,
}

impl ValueNoise {
    fn new(cells: usize, r: &mut impl Rng) -> Self {
        let grid = (0..(cells + 1) * (cells + 1))
            .map(|_| r.random_range(-1.0..1.0))
            .collect();
        Self { cells, grid }
    }

    /// Smooth-step interpolated lattice noise at `(u, v)` in `[0, 1]^2`.
    fn at(&self, u: f64, v: f64) -> f64 {
        let n = self.cells as f64;
        let (x, y) = (u * n, v * n);
        let (x0, y0) = ((x.floor() as usize).min(self.cells - 1), (y.floor() as usize).min(self.cells - 1));
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let s = |t: f64| t * t * (3.0 - 2.0 * t);
        let (sx, sy) = (s(fx), s(fy));
        let g = |i: usize, j: usize| self.grid[j * (self.cells + 1) + i];
        let top = g(x0, y0) * (1.0 - sx) + g(x0 + 1, y0) * sx;
        let bottom = g(x0, y0 + 1) * (1.0 - sx) + g(x0 + 1, y0 + 1) * sx;
        top * (1.0 - sy) + bottom * sy
    }
}

struct Blob {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    angle: f64,
    color: [f64; 3],
    softness: f64,
}

pub fn natural_image(width: u32, height: u32, seed: u64) -> Result<RgbImage> {
    let mut r = rng(mix_seed(seed, &[0x636f_7270_7573]));

    let top: [f64; 3] = std::array::from_fn(|_| r.random_range(60.0..220.0));
    let bottom: [f64; 3] = std::array::from_fn(|_| r.random_range(20.0..160.0));
    let light_angle = r.random_range(0.0..std::f64::consts::TAU);

    let blobs: Vec<Blob> = (0..r.random_range(3..9))
        .map(|_| Blob {
            cx: r.random_range(0.0..1.0),
            cy: r.random_range(0.0..1.0),
            rx: r.random_range(0.05..0.35),
            ry: r.random_range(0.05..0.35),
            angle: r.random_range(0.0..std::f64::consts::PI),
            color: std::array::from_fn(|_| r.random_range(15.0..240.0)),
            softness: r.random_range(0.02..0.2),
        })
        .collect();

    let octaves: Vec<(ValueNoise, f64)> = (0..6)
        .map(|o| (ValueNoise::new(2 << o, &mut r), 0.5f64.powi(o)))
        .collect();
    let texture_gain = r.random_range(10.0..35.0);
    let chroma_noise = ValueNoise::new(4, &mut r);

    let mut data = Vec::with_capacity(width as usize * height as usize * 3);
    for y in 0..height {
        for x in 0..width {
            let u = (f64::from(x) + 0.5) / f64::from(width);
            let v = (f64::from(y) + 0.5) / f64::from(height);

            let shade = 1.0 + 0.15 * ((u - 0.5) * light_angle.cos() + (v - 0.5) * light_angle.sin());
            let mut px: [f64; 3] = std::array::from_fn(|c| (top[c] * (1.0 - v) + bottom[c] * v) * shade);

            for b in &blobs {
                let (dx, dy) = (u - b.cx, v - b.cy);
                let (cs, sn) = (b.angle.cos(), b.angle.sin());
                let (ex, ey) = ((dx * cs + dy * sn) / b.rx, (-dx * sn + dy * cs) / b.ry);
                let d = (ex * ex + ey * ey).sqrt();
                let alpha = (((1.0 - d) / b.softness).clamp(0.0, 1.0)).powi(2);
                if alpha > 0.0 {
                    for c in 0..3 {
                        px[c] = px[c] * (1.0 - alpha) + b.color[c] * shade * alpha;
                    }
                }
            }

            let tex: f64 = octaves.iter().map(|(n, amp)| amp * n.at(u, v)).sum();
            let tint = chroma_noise.at(v, u) * 8.0;
            let grain = r.random_range(-2.5..2.5);
            let lum = tex * texture_gain + grain;
            data.push((px[0] + lum + tint).clamp(0.0, 255.0).round() as u8);
            data.push((px[1] + lum).clamp(0.0, 255.0).round() as u8);
            data.push((px[2] + lum - tint).clamp(0.0, 255.0).round() as u8);
        }
    }
    RgbImage::from_raw(width, height, data)
}

/// `count` images of `size x size`, image `i` seeded from `(seed, i)`.
pub fn natural_corpus(count: usize, size: u32, seed: u64) -> Result<Vec<RgbImage>> {
    (0..count)
        .map(|i| natural_image(size, size, mix_seed(seed, &[i as u64])))
        .collect()
}

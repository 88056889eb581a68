//! Orthonormal single-level 2-D Haar DWT and 4x4 DCT-II.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Real-valued 2-D array, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::invalid(format!(
                "plane {width}x{height} needs {} values, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn block4(&self, bx: usize, by: usize) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.get(bx * 4 + c, by * 4 + r);
            }
        }
        out
    }

    pub fn set_block4(&mut self, bx: usize, by: usize, block: &[[f64; 4]; 4]) {
        for (r, row) in block.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                self.set(bx * 4 + c, by * 4 + r, v);
            }
        }
    }
}

/// Level-1 sub-bands. `lh` is high-pass horizontally, `hl` vertically.
#[derive(Debug, Clone, PartialEq)]
pub struct Subbands {
    pub ll: Plane,
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

pub fn haar_dwt_1level(plane: &Plane) -> Result<Subbands> {
    if !plane.width.is_multiple_of(2) || !plane.height.is_multiple_of(2) || plane.width == 0 || plane.height == 0 {
        return Err(Error::invalid(format!(
            "Haar DWT needs even non-zero dimensions, got {}x{}",
            plane.width, plane.height
        )));
    }
    let (w, h) = (plane.width / 2, plane.height / 2);
    let mut bands = Subbands {
        ll: Plane::zeros(w, h),
        lh: Plane::zeros(w, h),
        hl: Plane::zeros(w, h),
        hh: Plane::zeros(w, h),
    };
    for y in 0..h {
        for x in 0..w {
            let a = plane.get(2 * x, 2 * y);
            let b = plane.get(2 * x + 1, 2 * y);
            let c = plane.get(2 * x, 2 * y + 1);
            let d = plane.get(2 * x + 1, 2 * y + 1);
            bands.ll.set(x, y, (a + b + c + d) / 2.0);
            bands.lh.set(x, y, (a - b + c - d) / 2.0);
            bands.hl.set(x, y, (a + b - c - d) / 2.0);
            bands.hh.set(x, y, (a - b - c + d) / 2.0);
        }
    }
    Ok(bands)
}

pub fn haar_idwt_1level(bands: &Subbands) -> Result<Plane> {
    let (w, h) = (bands.ll.width, bands.ll.height);
    for band in [&bands.lh, &bands.hl, &bands.hh] {
        if band.width != w || band.height != h {
            return Err(Error::invalid("sub-band sizes differ"));
        }
    }
    let mut out = Plane::zeros(2 * w, 2 * h);
    for y in 0..h {
        for x in 0..w {
            let ll = bands.ll.get(x, y);
            let lh = bands.lh.get(x, y);
            let hl = bands.hl.get(x, y);
            let hh = bands.hh.get(x, y);
            out.set(2 * x, 2 * y, (ll + lh + hl + hh) / 2.0);
            out.set(2 * x + 1, 2 * y, (ll - lh + hl - hh) / 2.0);
            out.set(2 * x, 2 * y + 1, (ll + lh - hl - hh) / 2.0);
            out.set(2 * x + 1, 2 * y + 1, (ll - lh - hl + hh) / 2.0);
        }
    }
    Ok(out)
}

fn dct4_matrix() -> &'static [[f64; 4]; 4] {
    static MATRIX: OnceLock<[[f64; 4]; 4]> = OnceLock::new();
    MATRIX.get_or_init(|| {
        let mut m = [[0.0; 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            let alpha = if k == 0 { 0.5 } else { 0.5f64.sqrt() };
            for (n, v) in row.iter_mut().enumerate() {
                *v = alpha * (PI * (2 * n + 1) as f64 * k as f64 / 8.0).cos();
            }
        }
        m
    })
}

/// `T * X * T^T`, or `T^T * X * T` when `inverse`.
fn dct4_apply(block: &[[f64; 4]; 4], inverse: bool) -> [[f64; 4]; 4] {
    let t = dct4_matrix();
    let at = |i: usize, j: usize| if inverse { t[j][i] } else { t[i][j] };
    let mut tmp = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            tmp[i][j] = (0..4).map(|k| at(i, k) * block[k][j]).sum();
        }
    }
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| tmp[i][k] * at(j, k)).sum();
        }
    }
    out
}

/// Orthonormal 2-D DCT-II. `out[row][col]`: row is the vertical frequency.
pub fn block_dct4(block: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    dct4_apply(block, false)
}

pub fn block_idct4(coeffs: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    dct4_apply(coeffs, true)
}

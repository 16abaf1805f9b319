//! Bilateral symmetry axis estimation.
//!
//! The axis is a low-degree polynomial `x(y)` fitted by least squares to the
//! per-row midpoints of the brain mask. The normal equations are at most
//! 3x3 and are solved with Cramer's rule.

use serde::Serialize;

use crate::detect::connected_components;
use crate::edges::EdgeMap;
use crate::error::{Error, Result};
use crate::imaging::GrayImage;

/// Otsu threshold of an 8-bit histogram: the smallest level `k` maximizing
/// the between-class variance of `{v <= k}` against `{v > k}`. `None` when
/// the image has a single level.
pub fn otsu_level(img: &GrayImage) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &v in img.as_raw() {
        hist[v as usize] += 1;
    }
    let total = img.as_raw().len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut best: Option<(u8, f64)> = None;
    for (k, &c) in hist.iter().enumerate().take(255) {
        w0 += c as f64;
        sum0 += k as f64 * c as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let diff = sum0 / w0 - (sum_all - sum0) / w1;
        let between = w0 * w1 * diff * diff;
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((k as u8, between));
        }
    }
    best.filter(|&(_, b)| b > 0.0).map(|(k, _)| k)
}

/// Foreground mask: pixels above the Otsu level, reduced to the largest
/// 8-connected component.
pub fn brain_mask(img: &GrayImage) -> Result<EdgeMap> {
    let level = otsu_level(img).ok_or(Error::NoForeground)?;
    let fg = EdgeMap::from_fn(img.width(), img.height(), |x, y| img.get(x, y) > level)?;
    let regions = connected_components(&fg, 1)?;
    let largest = regions.first().ok_or(Error::NoForeground)?;
    let mut mask = vec![false; img.width() * img.height()];
    for &(x, y) in &largest.pixels {
        mask[y * img.width() + x] = true;
    }
    EdgeMap::new(img.width(), img.height(), mask)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointSample {
    pub y: usize,
    pub x_mid: f64,
    pub span: usize,
}

/// One sample per row whose foreground extent spans at least `min_span`
/// pixels. Rows whose midpoint pixel lies outside the mask are dropped.
pub fn row_midpoints(mask: &EdgeMap, min_span: f64) -> Vec<MidpointSample> {
    (0..mask.height())
        .filter_map(|y| {
            let mut xs = (0..mask.width()).filter(|&x| mask.get(x, y));
            let left = xs.next()?;
            let right = xs.next_back().unwrap_or(left);
            let span = right - left;
            if (span as f64) < min_span {
                return None;
            }
            let x_mid = (left + right) as f64 / 2.0;
            mask.get(x_mid.round() as usize, y)
                .then_some(MidpointSample { y, x_mid, span })
        })
        .collect()
}

/// Square system of order 1 to 3.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    n: usize,
    matrix: [[f64; 3]; 3],
    rhs: [f64; 3],
}

impl LinearSystem {
    pub fn new(matrix: &[Vec<f64>], rhs: &[f64]) -> Result<Self> {
        let n = matrix.len();
        if !(1..=3).contains(&n) || rhs.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::param(format!(
                "linear system must be square of order 1..=3, got {n}"
            )));
        }
        let mut sys = Self {
            n,
            matrix: [[0.0; 3]; 3],
            rhs: [0.0; 3],
        };
        for (i, row) in matrix.iter().enumerate() {
            sys.matrix[i][..n].copy_from_slice(row);
        }
        sys.rhs[..n].copy_from_slice(rhs);
        Ok(sys)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.n && col < self.n);
        self.matrix[row][col]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs[..self.n]
    }

    fn with_column(&self, col: usize) -> [[f64; 3]; 3] {
        let mut m = self.matrix;
        for (row, b) in m.iter_mut().zip(self.rhs) {
            row[col] = b;
        }
        m
    }
}

fn det(m: &[[f64; 3]; 3], n: usize) -> f64 {
    match n {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

/// Normal equations of the polynomial least-squares fit `x(y)`:
/// `M[j][k] = sum y^(j+k)`, `rhs[j] = sum x_mid * y^j`.
pub fn build_normal_equations(samples: &[MidpointSample], degree: usize) -> Result<LinearSystem> {
    if !(1..=2).contains(&degree) {
        return Err(Error::param(format!("axis degree must be 1 or 2, got {degree}")));
    }
    let n = degree + 1;
    if samples.len() < n {
        return Err(Error::TooFewSamples {
            needed: n,
            got: samples.len(),
        });
    }
    let mut power_sums = [0.0f64; 5];
    let mut rhs = vec![0.0; n];
    for s in samples {
        let y = s.y as f64;
        let mut p = 1.0;
        for (i, acc) in power_sums.iter_mut().enumerate().take(2 * degree + 1) {
            *acc += p;
            if i < n {
                rhs[i] += s.x_mid * p;
            }
            p *= y;
        }
    }
    let matrix: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| power_sums[j + k]).collect()).collect();
    LinearSystem::new(&matrix, &rhs)
}

/// Determinant of `m` after scaling every column, then every row, to unit
/// max-norm. Invariant to row and column scaling; zero for a zero column.
fn equilibrated_det(m: &[[f64; 3]; 3], n: usize, d: f64) -> f64 {
    let mut scaled = *m;
    let mut factor = 1.0;
    for k in 0..n {
        let c = scaled[..n].iter().fold(0.0f64, |acc, row| acc.max(row[k].abs()));
        if c == 0.0 {
            return 0.0;
        }
        scaled.iter_mut().take(n).for_each(|row| row[k] /= c);
        factor /= c;
    }
    for row in scaled.iter().take(n) {
        let r = row[..n].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if r == 0.0 {
            return 0.0;
        }
        factor /= r;
    }
    d * factor
}

/// Cramer's rule with determinants by direct expansion.
///
/// The system is rejected as singular when the determinant of the row- and
/// column-equilibrated matrix is at most `1e-12` in magnitude.
pub fn solve_cramer(sys: &LinearSystem) -> Result<Vec<f64>> {
    let n = sys.n;
    let d = det(&sys.matrix, n);
    if !d.is_finite() || equilibrated_det(&sys.matrix, n, d).abs() <= 1e-12 {
        return Err(Error::Singular);
    }
    Ok((0..n).map(|i| det(&sys.with_column(i), n) / d).collect())
}

/// Polynomial axis `x(y) = sum c_i y^i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryAxis {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl SymmetryAxis {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&coeffs.len()) || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("axis needs 2 or 3 finite coefficients"));
        }
        Ok(Self {
            degree: coeffs.len() - 1,
            coeffs,
        })
    }

    /// Vertical line `x = c`.
    pub fn vertical(c: f64) -> Self {
        Self::new(vec![c, 0.0]).expect("finite column")
    }

    pub fn column_at(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }

    pub fn residual_rms(&self, samples: &[MidpointSample]) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        let ss: f64 = samples
            .iter()
            .map(|s| (s.x_mid - self.column_at(s.y as f64)).powi(2))
            .sum();
        (ss / samples.len() as f64).sqrt()
    }
}

pub fn fit_axis_lsm(samples: &[MidpointSample], degree: usize) -> Result<SymmetryAxis> {
    let sys = build_normal_equations(samples, degree)?;
    SymmetryAxis::new(solve_cramer(&sys)?).map_err(|_| Error::Singular)
}

/// Mirror of column `x` across the axis on row `y`.
pub fn reflect_x(axis: &SymmetryAxis, x: f64, y: f64) -> f64 {
    2.0 * axis.column_at(y) - x
}

//! Gradient operators and the Canny detector.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imaging::{gaussian_smooth_float, FloatRaster, GrayImage};

/// Binary raster with a cached population count. Also used as a general
/// foreground mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeMap {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    count: usize,
}

impl EdgeMap {
    pub fn new(width: usize, height: usize, mask: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(mask.len()) {
            return Err(Error::param(format!(
                "mask of {} entries does not fit {width}x{height}",
                mask.len()
            )));
        }
        let count = mask.iter().filter(|&&b| b).count();
        Ok(Self {
            width,
            height,
            mask,
            count,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![false; width * height]).expect("positive dimensions")
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut mask = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                mask.push(f(x, y));
            }
        }
        Self::new(width, height, mask)
    }

    /// Nonzero pixels become `true`.
    pub fn from_gray(img: &GrayImage) -> Self {
        Self::from_fn(img.width(), img.height(), |x, y| img.get(x, y) != 0).expect("valid image")
    }

    /// `255` for set pixels, `0` elsewhere.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| if self.get(x, y) { 255 } else { 0 }).expect("valid map")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.mask
    }

    pub fn mirrored(&self) -> Self {
        Self::from_fn(self.width, self.height, |x, y| self.get(self.width - 1 - x, y)).expect("valid map")
    }

    /// Set pixels as `(x, y)` in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }
}

/// Number of edge pixels in the map.
pub fn count_edges(map: &EdgeMap) -> usize {
    map.count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Sobel,
    Prewitt,
    Roberts,
}

impl Operator {
    pub const ALL: [Operator; 3] = [Operator::Sobel, Operator::Prewitt, Operator::Roberts];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Sobel => "sobel",
            Operator::Prewitt => "prewitt",
            Operator::Roberts => "roberts",
        }
    }

    fn min_size(self) -> usize {
        match self {
            Operator::Roberts => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Operator::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::param(format!("unknown operator {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub gx: FloatRaster,
    pub gy: FloatRaster,
    pub magnitude: FloatRaster,
    /// `atan2(gy, gx)` in `(-pi, pi]`.
    pub orientation: FloatRaster,
}

impl GradientField {
    fn from_components(gx: FloatRaster, gy: FloatRaster) -> Self {
        let (w, h) = (gx.width(), gx.height());
        let mut magnitude = FloatRaster::zeros(w, h);
        let mut orientation = FloatRaster::zeros(w, h);
        for y in 0..h {
            for x in 0..w {
                let (a, b) = (gx.get(x, y), gy.get(x, y));
                magnitude.set(x, y, (a * a + b * b).sqrt());
                let t = b.atan2(a);
                orientation.set(x, y, if t <= -PI { PI } else { t });
            }
        }
        Self {
            gx,
            gy,
            magnitude,
            orientation,
        }
    }

    pub fn width(&self) -> usize {
        self.gx.width()
    }

    pub fn height(&self) -> usize {
        self.gx.height()
    }
}

/// Gradient of an 8-bit image under one of the classic operators.
pub fn gradient(img: &GrayImage, operator: Operator) -> Result<GradientField> {
    let min = operator.min_size();
    if img.width() < min || img.height() < min {
        return Err(Error::Dimension {
            width: img.width(),
            height: img.height(),
            min,
            what: operator.name(),
        });
    }
    Ok(gradient_float(&img.to_float(), operator))
}

pub(crate) fn gradient_float(img: &FloatRaster, operator: Operator) -> GradientField {
    let (w, h) = (img.width(), img.height());
    let mut gx = FloatRaster::zeros(w, h);
    let mut gy = FloatRaster::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let (xi, yi) = (x as isize, y as isize);
            let (dx, dy) = match operator {
                Operator::Sobel | Operator::Prewitt => {
                    let centre = if operator == Operator::Sobel { 2.0 } else { 1.0 };
                    // differences across x and weighted sums along x, per row
                    let diff = |yy: isize| img.at(xi + 1, yy) - img.at(xi - 1, yy);
                    let sum = |yy: isize| (img.at(xi - 1, yy) + img.at(xi + 1, yy)) + centre * img.at(xi, yy);
                    (
                        (diff(yi - 1) + diff(yi + 1)) + centre * diff(yi),
                        sum(yi + 1) - sum(yi - 1),
                    )
                }
                Operator::Roberts => (
                    img.at(xi, yi) - img.at(xi + 1, yi + 1),
                    img.at(xi + 1, yi) - img.at(xi, yi + 1),
                ),
            };
            gx.set(x, y, dx);
            gy.set(x, y, dy);
        }
    }
    GradientField::from_components(gx, gy)
}

/// Marks pixels whose magnitude reaches `frac` of the field maximum.
pub fn threshold_edges(field: &GradientField, frac: f64) -> Result<EdgeMap> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::param(format!(
            "threshold fraction must lie in (0, 1], got {frac}"
        )));
    }
    let mag = &field.magnitude;
    let max = mag.max();
    if max <= 0.0 {
        return Ok(EdgeMap::empty(mag.width(), mag.height()));
    }
    let t = frac * max;
    EdgeMap::new(
        mag.width(),
        mag.height(),
        mag.values().iter().map(|&m| m >= t).collect(),
    )
}

const TAN_22_5: f64 = std::f64::consts::SQRT_2 - 1.0;
const TAN_67_5: f64 = std::f64::consts::SQRT_2 + 1.0;

/// Neighbor offsets along the quantized gradient direction. The first entry
/// precedes the pixel in row-major order.
fn direction_neighbors(gx: f64, gy: f64) -> [(isize, isize); 2] {
    let (ax, ay) = (gx.abs(), gy.abs());
    if ay <= TAN_22_5 * ax {
        [(-1, 0), (1, 0)]
    } else if ay > TAN_67_5 * ax {
        [(0, -1), (0, 1)]
    } else if (gx > 0.0) == (gy > 0.0) {
        [(-1, -1), (1, 1)]
    } else {
        [(1, -1), (-1, 1)]
    }
}

/// Non-maximum suppression on a gradient field.
///
/// A pixel survives when its magnitude is positive and at least that of both
/// neighbors along the quantized gradient direction. Of two tied adjacent
/// survivors along that direction only the first in row-major order is kept.
pub fn non_max_suppression(field: &GradientField) -> EdgeMap {
    let (w, h) = (field.width(), field.height());
    let mag = &field.magnitude;
    let mut candidate = vec![false; w * h];
    let mut dirs = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let nb = direction_neighbors(field.gx.get(x, y), field.gy.get(x, y));
            let m = mag.get(x, y);
            let keep = m > 0.0 && nb.iter().all(|&(dx, dy)| m >= mag.at(x as isize + dx, y as isize + dy));
            candidate[y * w + x] = keep;
            dirs.push(nb[0]);
        }
    }
    let mut out = candidate.clone();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !candidate[i] {
                continue;
            }
            let (dx, dy) = dirs[i];
            let (px, py) = (x as isize + dx, y as isize + dy);
            if px < 0 || py < 0 || px >= w as isize || py >= h as isize {
                continue;
            }
            let j = py as usize * w + px as usize;
            if candidate[j] && mag.values()[j] == mag.values()[i] {
                out[i] = false;
            }
        }
    }
    EdgeMap::new(w, h, out).expect("dimensions from field")
}

/// Intermediate products of a Canny run, for inspection and testing.
#[derive(Debug, Clone)]
pub struct CannyDetail {
    pub field: GradientField,
    pub survivors: EdgeMap,
    pub low: f64,
    pub high: f64,
    pub edges: EdgeMap,
}

fn check_fractions(low_frac: f64, high_frac: f64) -> Result<()> {
    if !(low_frac > 0.0 && low_frac < high_frac && high_frac < 1.0) {
        return Err(Error::param(format!(
            "canny thresholds must satisfy 0 < low < high < 1, got low={low_frac} high={high_frac}"
        )));
    }
    Ok(())
}

/// Canny detector: float Gaussian smoothing, Sobel gradients, non-maximum
/// suppression and hysteresis. Thresholds are fractions of the maximum
/// gradient magnitude.
pub fn canny(img: &GrayImage, sigma: f64, low_frac: f64, high_frac: f64) -> Result<EdgeMap> {
    Ok(canny_detailed(img, sigma, low_frac, high_frac)?.edges)
}

pub fn canny_detailed(img: &GrayImage, sigma: f64, low_frac: f64, high_frac: f64) -> Result<CannyDetail> {
    check_fractions(low_frac, high_frac)?;
    if img.width() < 3 || img.height() < 3 {
        return Err(Error::Dimension {
            width: img.width(),
            height: img.height(),
            min: 3,
            what: "canny",
        });
    }
    let smoothed = gaussian_smooth_float(&img.to_float(), sigma)?;
    let field = gradient_float(&smoothed, Operator::Sobel);
    let survivors = non_max_suppression(&field);
    let max = field.magnitude.max();
    let (low, high) = (low_frac * max, high_frac * max);
    let edges = if max > 0.0 {
        hysteresis(&field.magnitude, &survivors, low, high)
    } else {
        EdgeMap::empty(img.width(), img.height())
    };
    Ok(CannyDetail {
        field,
        survivors,
        low,
        high,
        edges,
    })
}

fn hysteresis(mag: &FloatRaster, survivors: &EdgeMap, low: f64, high: f64) -> EdgeMap {
    let (w, h) = (mag.width(), mag.height());
    let weak = |i: usize| survivors.as_slice()[i] && mag.values()[i] >= low;
    let mut keep = vec![false; w * h];
    let mut queue = VecDeque::new();
    for (i, k) in keep.iter_mut().enumerate() {
        if survivors.as_slice()[i] && mag.values()[i] >= high {
            *k = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !keep[j] && weak(j) {
                    keep[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    EdgeMap::new(w, h, keep).expect("dimensions from field")
}

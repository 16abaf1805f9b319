//! Asymmetry scoring and tumor-candidate extraction.
//!
//! Edge pixels that have a counterpart near their mirror position across the
//! symmetry axis are suppressed; the rest are kept as asymmetric evidence,
//! closed into blobs and split into 8-connected regions.

use serde::Serialize;

use crate::edges::{canny, EdgeMap};
use crate::error::{Error, Result, Stage};
use crate::imaging::{contrast_stretch, gaussian_smooth, median_filter, GrayImage, RgbImage};
use crate::symmetry::{brain_mask, fit_axis_lsm, reflect_x, row_midpoints, SymmetryAxis};

/// Report text for an analysis that finds no candidate region.
pub const NOT_FOUND_MESSAGE: &str = "Possible tumor area are not found";
pub const FOUND_MESSAGE: &str = "Possible tumor area found";

/// Per-pixel mirror-asymmetry flags; `1` marks an edge pixel with no mirror
/// counterpart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymmetryMap {
    width: usize,
    height: usize,
    score: Vec<u8>,
}

impl AsymmetryMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn score(&self, x: usize, y: usize) -> u8 {
        self.score[y * self.width + x]
    }

    pub fn scores(&self) -> &[u8] {
        &self.score
    }

    pub fn to_mask(&self) -> EdgeMap {
        EdgeMap::new(self.width, self.height, self.score.iter().map(|&s| s != 0).collect()).expect("same dimensions")
    }
}

// Summed-area table over the edge mask, padded by one row and column.
struct EdgeTable {
    width: usize,
    sums: Vec<u32>,
}

impl EdgeTable {
    fn new(edges: &EdgeMap) -> Self {
        let (w, h) = (edges.width(), edges.height());
        let stride = w + 1;
        let mut sums = vec![0u32; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0;
            for x in 0..w {
                row += u32::from(edges.get(x, y));
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Self { width: w, sums }
    }

    /// Number of set pixels in the inclusive box.
    fn count(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> u32 {
        let s = self.width + 1;
        let at = |x: usize, y: usize| self.sums[y * s + x];
        at(x1 + 1, y1 + 1) + at(x0, y0) - at(x0, y1 + 1) - at(x1 + 1, y0)
    }
}

/// Scores each edge pixel by whether any edge pixel lies within Chebyshev
/// distance `tol` of its rounded mirror position.
pub fn asymmetry_map(edges: &EdgeMap, axis: &SymmetryAxis, tol: usize) -> AsymmetryMap {
    let (w, h) = (edges.width(), edges.height());
    let table = EdgeTable::new(edges);
    let mut score = vec![0u8; w * h];
    for (x, y) in edges.pixels() {
        let mirror = reflect_x(axis, x as f64, y as f64).round();
        let matched = mirror >= 0.0 && mirror <= (w - 1) as f64 && {
            let mx = mirror as usize;
            table.count(
                mx.saturating_sub(tol),
                y.saturating_sub(tol),
                (mx + tol).min(w - 1),
                (y + tol).min(h - 1),
            ) > 0
        };
        if !matched {
            score[y * w + x] = 1;
        }
    }
    AsymmetryMap {
        width: w,
        height: h,
        score,
    }
}

// Square min/max filter, separable, window clipped to the raster.
fn square_filter(mask: &[bool], w: usize, h: usize, radius: usize, dilate: bool) -> Vec<bool> {
    let pass = |src: &[bool], horizontal: bool| -> Vec<bool> {
        let mut out = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                let (c, len) = if horizontal { (x, w) } else { (y, h) };
                let lo = c.saturating_sub(radius);
                let hi = (c + radius).min(len - 1);
                let mut it = (lo..=hi).map(|k| if horizontal { src[y * w + k] } else { src[k * w + x] });
                out[y * w + x] = if dilate { it.any(|b| b) } else { it.all(|b| b) };
            }
        }
        out
    };
    let rows = pass(mask, true);
    pass(&rows, false)
}

/// Morphological closing of a binary raster with a `(2r+1)^2` square.
/// Positions outside the raster are ignored by both dilation and erosion.
pub fn close_binary(mask: &EdgeMap, radius: usize) -> EdgeMap {
    if radius == 0 {
        return mask.clone();
    }
    let (w, h) = (mask.width(), mask.height());
    let dilated = square_filter(mask.as_slice(), w, h, radius, true);
    let closed = square_filter(&dilated, w, h, radius, false);
    EdgeMap::new(w, h, closed).expect("same dimensions")
}

pub fn close_mask(map: &AsymmetryMap, radius: usize) -> EdgeMap {
    close_binary(&map.to_mask(), radius)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundingBox {
    pub xmin: usize,
    pub ymin: usize,
    pub xmax: usize,
    pub ymax: usize,
}

/// One 8-connected foreground component.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Member pixels `(x, y)` in row-major order.
    pub pixels: Vec<(usize, usize)>,
    pub area_px: usize,
    pub bbox: BoundingBox,
    pub centroid: (f64, f64),
}

impl Region {
    fn from_pixels(mut pixels: Vec<(usize, usize)>) -> Self {
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        let mut bbox = BoundingBox {
            xmin: usize::MAX,
            ymin: usize::MAX,
            xmax: 0,
            ymax: 0,
        };
        let (mut sx, mut sy) = (0usize, 0usize);
        for &(x, y) in &pixels {
            bbox.xmin = bbox.xmin.min(x);
            bbox.ymin = bbox.ymin.min(y);
            bbox.xmax = bbox.xmax.max(x);
            bbox.ymax = bbox.ymax.max(y);
            sx += x;
            sy += y;
        }
        let n = pixels.len();
        Self {
            area_px: n,
            centroid: (sx as f64 / n as f64, sy as f64 / n as f64),
            bbox,
            pixels,
        }
    }
}

/// 8-connected components with at least `min_area` pixels, largest first;
/// equal areas are ordered by `(ymin, xmin)`.
pub fn connected_components(mask: &EdgeMap, min_area: usize) -> Result<Vec<Region>> {
    if min_area == 0 {
        return Err(Error::param("min_area must be at least 1"));
    }
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if seen[start] || !mask.as_slice()[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            pixels.push((x, y));
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                    let j = ny * w + nx;
                    if !seen[j] && mask.as_slice()[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        if pixels.len() >= min_area {
            regions.push(Region::from_pixels(pixels));
        }
    }
    regions.sort_by(|a, b| {
        b.area_px
            .cmp(&a.area_px)
            .then((a.bbox.ymin, a.bbox.xmin).cmp(&(b.bbox.ymin, b.bbox.xmin)))
    });
    Ok(regions)
}

/// Total area in pixels and in square millimetres.
pub fn measure(regions: &[Region], pixel_spacing: f64) -> Result<(usize, f64)> {
    if !(pixel_spacing > 0.0 && pixel_spacing.is_finite()) {
        return Err(Error::param(format!(
            "pixel spacing must be positive, got {pixel_spacing}"
        )));
    }
    let px: usize = regions.iter().map(|r| r.area_px).sum();
    Ok((px, px as f64 * pixel_spacing * pixel_spacing))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Found,
    NotFound,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Found => "found",
            Verdict::NotFound => "not-found",
        }
    }

    pub fn message(self) -> &'static str {
        match self {
            Verdict::Found => FOUND_MESSAGE,
            Verdict::NotFound => NOT_FOUND_MESSAGE,
        }
    }
}

/// Tunables of the detection pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub sigma: f64,
    /// Median window; `0` skips the median stage.
    pub median_window: usize,
    pub contrast: bool,
    pub canny_low: f64,
    pub canny_high: f64,
    pub degree: usize,
    /// Minimum row span as a fraction of image width.
    pub min_span: f64,
    pub mirror_tol: usize,
    pub closing_radius: usize,
    /// `None` scales 25 px per 256x256 of image area.
    pub min_area: Option<usize>,
    pub pixel_spacing: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            median_window: 3,
            contrast: true,
            canny_low: 0.10,
            canny_high: 0.20,
            degree: 1,
            min_span: 0.10,
            mirror_tol: 2,
            closing_radius: 2,
            min_area: None,
            pixel_spacing: 1.0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.median_window != 0 && (self.median_window < 3 || self.median_window.is_multiple_of(2)) {
            return bad(format!(
                "median window must be 0 or odd >= 3, got {}",
                self.median_window
            ));
        }
        if !(self.canny_low > 0.0 && self.canny_low < self.canny_high && self.canny_high < 1.0) {
            return bad(format!(
                "canny thresholds must satisfy 0 < low < high < 1, got {} and {}",
                self.canny_low, self.canny_high
            ));
        }
        if !(1..=2).contains(&self.degree) {
            return bad(format!("degree must be 1 or 2, got {}", self.degree));
        }
        if !(0.0..=1.0).contains(&self.min_span) {
            return bad(format!("min span fraction must lie in [0, 1], got {}", self.min_span));
        }
        if self.min_area == Some(0) {
            return bad("min area must be at least 1".into());
        }
        if !(self.pixel_spacing > 0.0 && self.pixel_spacing.is_finite()) {
            return bad(format!("pixel spacing must be positive, got {}", self.pixel_spacing));
        }
        Ok(())
    }

    /// Minimum region area for a `width x height` input.
    pub fn min_area_for(&self, width: usize, height: usize) -> usize {
        self.min_area
            .unwrap_or_else(|| ((width * height * 25).div_ceil(65536)).max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub width: usize,
    pub height: usize,
    pub axis: SymmetryAxis,
    pub regions: Vec<Region>,
    pub total_area_px: usize,
    pub total_area_mm2: f64,
    pub pixel_spacing: f64,
    pub verdict: Verdict,
    pub edge_count: usize,
}

/// Denoising and contrast stages shared by the pipeline and the axis command.
pub fn preprocess(img: &GrayImage, config: &Config) -> Result<GrayImage> {
    let mut out = gaussian_smooth(img, config.sigma)?;
    if config.median_window != 0 {
        out = median_filter(&out, config.median_window)?;
    }
    if config.contrast {
        out = contrast_stretch(&out);
    }
    Ok(out)
}

/// Fits the symmetry axis of a preprocessed image.
pub fn estimate_axis(pre: &GrayImage, config: &Config) -> Result<SymmetryAxis> {
    let mask = brain_mask(pre).map_err(Error::at(Stage::BrainMask))?;
    let samples = row_midpoints(&mask, config.min_span * pre.width() as f64);
    fit_axis_lsm(&samples, config.degree).map_err(Error::at(Stage::AxisFit))
}

/// Full chain from raw slice to verdict.
pub fn detect_pipeline(img: &GrayImage, config: &Config) -> Result<DetectionResult> {
    config.validate()?;
    let pre = preprocess(img, config).map_err(Error::at(Stage::Preprocess))?;
    let edges = canny(&pre, config.sigma, config.canny_low, config.canny_high).map_err(Error::at(Stage::Canny))?;
    let axis = estimate_axis(&pre, config)?;
    let asym = asymmetry_map(&edges, &axis, config.mirror_tol);
    let closed = close_mask(&asym, config.closing_radius);
    let min_area = config.min_area_for(img.width(), img.height());
    let regions = connected_components(&closed, min_area).map_err(Error::at(Stage::Regions))?;
    let (total_area_px, total_area_mm2) = measure(&regions, config.pixel_spacing).map_err(Error::at(Stage::Measure))?;
    let verdict = if regions.is_empty() {
        Verdict::NotFound
    } else {
        Verdict::Found
    };
    Ok(DetectionResult {
        width: img.width(),
        height: img.height(),
        axis,
        regions,
        total_area_px,
        total_area_mm2,
        pixel_spacing: config.pixel_spacing,
        verdict,
        edge_count: edges.count(),
    })
}

pub const AXIS_COLOR: [u8; 3] = [0, 255, 0];
pub const REGION_COLOR: [u8; 3] = [255, 0, 0];
pub const BBOX_COLOR: [u8; 3] = [0, 0, 255];

/// Paints the axis in green, one pixel per row.
pub fn draw_axis(canvas: &mut RgbImage, axis: &SymmetryAxis) {
    for y in 0..canvas.height() {
        let x = axis.column_at(y as f64).round();
        if x >= 0.0 && x < canvas.width() as f64 {
            canvas.set(x as usize, y, AXIS_COLOR);
        }
    }
}

/// Gray background with region pixels red, their boxes blue, and the axis
/// green on top.
pub fn render_overlay(img: &GrayImage, result: &DetectionResult) -> RgbImage {
    let mut canvas = RgbImage::from_gray(img);
    for r in &result.regions {
        for &(x, y) in &r.pixels {
            canvas.set(x, y, REGION_COLOR);
        }
    }
    for r in &result.regions {
        let b = &r.bbox;
        for x in b.xmin..=b.xmax {
            canvas.set(x, b.ymin, BBOX_COLOR);
            canvas.set(x, b.ymax, BBOX_COLOR);
        }
        for y in b.ymin..=b.ymax {
            canvas.set(b.xmin, y, BBOX_COLOR);
            canvas.set(b.xmax, y, BBOX_COLOR);
        }
    }
    draw_axis(&mut canvas, &result.axis);
    canvas
}

//! Seeded synthetic brain-like phantoms with exact ground truth.
//!
//! A bright ellipse on a dark background carries a noise texture that is
//! drawn for the left half (center column included) and copied onto the
//! right half, so the lesion-free image is an exact left-right mirror of
//! itself about `axis_column = (width - 1) / 2`. A lesion, when present, is
//! a disk of constant intensity that breaks the symmetry.

use crate::edges::EdgeMap;
use crate::error::{Error, Result};
use crate::imaging::GrayImage;

pub const BACKGROUND: u8 = 20;
pub const TISSUE_BASE: i32 = 160;

/// 64-bit linear congruential generator with Knuth's MMIX constants
/// (`a = 6364136223846793005`, `c = 1442695040888963407`). Each draw
/// advances the state and returns its top 31 bits.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
    pub const INCREMENT: u64 = 1_442_695_040_888_963_407;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u31(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        (self.state >> 33) as u32
    }

    /// Uniform integer in `[-amplitude, amplitude]` (by reduction modulo
    /// `2 * amplitude + 1`).
    pub fn symmetric(&mut self, amplitude: u32) -> i32 {
        if amplitude == 0 {
            return 0;
        }
        let span = 2 * amplitude + 1;
        (self.next_u31() % span) as i32 - amplitude as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LesionSpec {
    /// Horizontal offset of the center from the symmetry axis.
    pub center_dx: i32,
    pub center_y: usize,
    pub radius: usize,
    /// Signed intensity offset from the tissue base level.
    pub delta: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub semi_axis_x: f64,
    pub semi_axis_y: f64,
    pub noise_amplitude: u32,
    pub lesion: Option<LesionSpec>,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self {
            width: 257,
            height: 257,
            seed: 0,
            semi_axis_x: 100.0,
            semi_axis_y: 120.0,
            noise_amplitude: 10,
            lesion: Some(LesionSpec {
                center_dx: 40,
                center_y: 128,
                radius: 10,
                delta: 60,
            }),
        }
    }
}

impl PhantomSpec {
    /// Default geometry without a lesion.
    pub fn symmetric(seed: u64) -> Self {
        Self {
            seed,
            lesion: None,
            ..Self::default()
        }
    }

    pub fn axis_column(&self) -> f64 {
        (self.width as f64 - 1.0) / 2.0
    }

    fn center_row(&self) -> f64 {
        (self.height as f64 - 1.0) / 2.0
    }

    pub fn inside_skull(&self, x: f64, y: f64) -> bool {
        let dx = (x - self.axis_column()) / self.semi_axis_x;
        let dy = (y - self.center_row()) / self.semi_axis_y;
        dx * dx + dy * dy <= 1.0
    }

    /// Lesion center `(x, y)`, if any.
    pub fn lesion_center(&self) -> Option<(f64, f64)> {
        self.lesion
            .as_ref()
            .map(|l| (self.axis_column() + f64::from(l.center_dx), l.center_y as f64))
    }

    fn in_lesion(&self, x: usize, y: usize) -> bool {
        match (&self.lesion, self.lesion_center()) {
            (Some(l), Some((cx, cy))) => {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                dx * dx + dy * dy <= (l.radius * l.radius) as f64
            }
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        const MARGIN: f64 = 4.0;
        if self.width == 0 || self.height == 0 {
            return Err(Error::param("phantom dimensions must be positive"));
        }
        if !(self.semi_axis_x > 0.0 && self.semi_axis_y > 0.0) {
            return Err(Error::param("ellipse semi-axes must be positive"));
        }
        if self.axis_column() - self.semi_axis_x < MARGIN || self.center_row() - self.semi_axis_y < MARGIN {
            return Err(Error::param(format!(
                "ellipse {}x{} leaves less than {MARGIN} px margin in a {}x{} raster",
                self.semi_axis_x, self.semi_axis_y, self.width, self.height
            )));
        }
        if let (Some(l), Some((cx, cy))) = (&self.lesion, self.lesion_center()) {
            if l.radius == 0 {
                return Err(Error::param("lesion radius must be at least 1"));
            }
            if l.delta == 0 {
                return Err(Error::param("lesion delta must be nonzero"));
            }
            let r = l.radius as f64;
            // every lattice point of the disk must lie inside the ellipse
            let (x0, x1) = ((cx - r).floor() as i64, (cx + r).ceil() as i64);
            let (y0, y1) = ((cy - r).floor() as i64, (cy + r).ceil() as i64);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                    if dx * dx + dy * dy <= r * r && !self.inside_skull(x as f64, y as f64) {
                        return Err(Error::param(format!(
                            "lesion at ({cx}, {cy}) radius {r} extends outside the ellipse"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub axis_column: f64,
    pub lesion_mask: EdgeMap,
    pub lesion_center: Option<(f64, f64)>,
    pub lesion_radius: Option<usize>,
}

pub fn generate(spec: &PhantomSpec) -> Result<(GrayImage, GroundTruth)> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let mut rng = Lcg64::new(spec.seed);
    let half = (w - 1) / 2;
    let mut img = GrayImage::filled(w, h, BACKGROUND)?;
    for y in 0..h {
        for x in 0..=half {
            let noise = rng.symmetric(spec.noise_amplitude);
            if !spec.inside_skull(x as f64, y as f64) {
                continue;
            }
            let v = (TISSUE_BASE + noise).clamp(0, 255) as u8;
            img.set(x, y, v);
            img.set(w - 1 - x, y, v);
        }
    }
    let lesion_mask = EdgeMap::from_fn(w, h, |x, y| spec.in_lesion(x, y))?;
    if let Some(l) = &spec.lesion {
        let v = (TISSUE_BASE + l.delta).clamp(0, 255) as u8;
        for (x, y) in lesion_mask.pixels() {
            img.set(x, y, v);
        }
    }
    Ok((
        img,
        GroundTruth {
            axis_column: spec.axis_column(),
            lesion_mask,
            lesion_center: spec.lesion_center(),
            lesion_radius: spec.lesion.as_ref().map(|l| l.radius),
        },
    ))
}

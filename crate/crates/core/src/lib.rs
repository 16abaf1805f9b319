//! Brain-slice tumor candidate detection from bilateral symmetry.
//!
//! The pipeline stages are:
//!
//! 1. **Imaging** – netpbm I/O, luma conversion, Gaussian/median denoising
//!    and contrast stretching.
//! 2. **Edges** – Sobel/Prewitt/Roberts gradients and the Canny detector.
//! 3. **Symmetry** – Otsu brain mask, per-row midpoints, and a polynomial
//!    axis fitted by least squares solved with Cramer's rule.
//! 4. **Detect** – mirror matching of edges across the axis, closing,
//!    connected regions, area and verdict.
//!
//! [`phantom`] generates seeded mirror-symmetric test slices with optional
//! lesions and exact ground truth.

pub mod cli;
pub mod detect;
pub mod edges;
pub mod error;
pub mod imaging;
pub mod phantom;
pub mod symmetry;

pub use detect::{detect_pipeline, Config, DetectionResult, Region, Verdict, NOT_FOUND_MESSAGE};
pub use edges::{canny, EdgeMap, GradientField, Operator};
pub use error::{Error, NetpbmError, Result, Stage};
pub use imaging::{FloatRaster, GrayImage, Image, RgbImage};
pub use symmetry::SymmetryAxis;

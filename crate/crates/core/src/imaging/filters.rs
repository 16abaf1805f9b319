use super::{reflect, round_to_u8, FloatRaster, GrayImage};
use crate::error::{Error, Result};

/// Sampled 1-D Gaussian of radius `ceil(3 sigma)`, renormalized to sum to 1.
pub fn gaussian_kernel_1d(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(format!("sigma must be positive, got {sigma}")));
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    Ok(k)
}

/// The full 2-D kernel, as the outer product of the 1-D kernel with itself.
/// Row-major, side `2 * radius + 1`.
pub fn gaussian_kernel_2d(sigma: f64) -> Result<Vec<f64>> {
    let k = gaussian_kernel_1d(sigma)?;
    Ok(k.iter().flat_map(|a| k.iter().map(move |b| a * b)).collect())
}

// Symmetric taps are summed pairwise, so a left-right mirrored input gives a
// bit-exact mirrored output.
fn smooth_line(src: impl Fn(isize) -> f64, k: &[f64]) -> f64 {
    let r = k.len() / 2;
    let mut acc = k[r] * src(0);
    for i in 1..=r {
        acc += k[r + i] * (src(-(i as isize)) + src(i as isize));
    }
    acc
}

/// Separable Gaussian convolution in floating point, mirror-reflected borders.
pub fn gaussian_smooth_float(img: &FloatRaster, sigma: f64) -> Result<FloatRaster> {
    let k = gaussian_kernel_1d(sigma)?;
    let (w, h) = (img.width(), img.height());
    let mut horiz = FloatRaster::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let v = smooth_line(|d| img.get(reflect(x as isize + d, w), y), &k);
            horiz.set(x, y, v);
        }
    }
    let mut out = FloatRaster::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let v = smooth_line(|d| horiz.get(x, reflect(y as isize + d, h)), &k);
            out.set(x, y, v);
        }
    }
    Ok(out)
}

pub fn gaussian_smooth(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    Ok(gaussian_smooth_float(&img.to_float(), sigma)?.to_gray())
}

/// Exact median over a `window x window` neighborhood.
pub fn median_filter(img: &GrayImage, window: usize) -> Result<GrayImage> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::param(format!(
            "median window must be odd and >= 3, got {window}"
        )));
    }
    let r = (window / 2) as isize;
    let (w, h) = (img.width(), img.height());
    let mut buf = Vec::with_capacity(window * window);
    GrayImage::from_fn(w, h, |x, y| {
        buf.clear();
        for dy in -r..=r {
            let yy = reflect(y as isize + dy, h);
            for dx in -r..=r {
                buf.push(img.get(reflect(x as isize + dx, w), yy));
            }
        }
        let mid = buf.len() / 2;
        *buf.select_nth_unstable(mid).1
    })
}

/// Linear min-max stretch onto `0..=255`. Flat images come back unchanged.
pub fn contrast_stretch(img: &GrayImage) -> GrayImage {
    let lo = img.as_raw().iter().copied().min().unwrap_or(0);
    let hi = img.as_raw().iter().copied().max().unwrap_or(0);
    if lo == hi {
        return img.clone();
    }
    let span = f64::from(hi - lo);
    let lut: Vec<u8> = (0..=255u8)
        .map(|v| round_to_u8(f64::from(v.saturating_sub(lo)) * 255.0 / span))
        .collect();
    GrayImage::from_fn(img.width(), img.height(), |x, y| lut[img.get(x, y) as usize]).expect("dimensions unchanged")
}

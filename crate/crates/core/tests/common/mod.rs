#![allow(clippy::needless_range_loop)]

//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use brainsym::edges::EdgeMap;
use brainsym::phantom::PhantomSpec;
use brainsym::symmetry::SymmetryAxis;

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &v)| r.iter().copied().chain([v]).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

/// Inverse by elimination, column by column.
pub fn inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let cols: Option<Vec<Vec<f64>>> = (0..n)
        .map(|j| gauss_solve(a, &(0..n).map(|i| f64::from(u8::from(i == j))).collect::<Vec<_>>()))
        .collect();
    let cols = cols?;
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

fn norm_inf(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Infinity-norm condition number.
pub fn condition(a: &[Vec<f64>]) -> f64 {
    inverse(a).map_or(f64::INFINITY, |inv| norm_inf(a) * norm_inf(&inv))
}

/// Least squares through the normal equations, solved by elimination.
pub fn lsq_poly_oracle(points: &[(f64, f64)], degree: usize) -> Vec<f64> {
    let n = degree + 1;
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for &(y, x) in points {
        for j in 0..n {
            b[j] += x * y.powi(j as i32);
            for k in 0..n {
                a[j][k] += y.powi((j + k) as i32);
            }
        }
    }
    gauss_solve(&a, &b).expect("nonsingular oracle system")
}

/// Brute-force mirror matcher: compares every edge pixel against every
/// other one.
pub fn asymmetry_oracle(edges: &EdgeMap, axis: &SymmetryAxis, tol: usize) -> Vec<u8> {
    let w = edges.width();
    let pts: Vec<(usize, usize)> = edges.pixels().collect();
    let mut out = vec![0u8; w * edges.height()];
    for &(x, y) in &pts {
        let m = (2.0 * axis.column_at(y as f64) - x as f64).round();
        let matched = m >= 0.0
            && m <= (w - 1) as f64
            && pts
                .iter()
                .any(|&(qx, qy)| (qx as f64 - m).abs() <= tol as f64 && qy.abs_diff(y) <= tol);
        if !matched {
            out[y * w + x] = 1;
        }
    }
    out
}

/// Union-find labeling; components as row-major sorted pixel lists, sorted
/// by their first pixel.
pub fn components_oracle(mask: &EdgeMap) -> Vec<Vec<(usize, usize)>> {
    let (w, h) = (mask.width(), mask.height());
    let mut parent: Vec<usize> = (0..w * h).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            for (dx, dy) in [(-1i64, -1i64), (0, -1), (1, -1), (-1, 0)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx >= 0 && ny >= 0 && nx < w as i64 && mask.get(nx as usize, ny as usize) {
                    let a = find(&mut parent, y * w + x);
                    let b = find(&mut parent, ny as usize * w + nx as usize);
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                let r = find(&mut parent, y * w + x);
                groups.entry(r).or_default().push((x, y));
            }
        }
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort();
    out
}

/// Pixels where the ellipse membership changes between 4-neighbors.
pub fn skull_contour(spec: &PhantomSpec) -> EdgeMap {
    let (w, h) = (spec.width, spec.height);
    EdgeMap::from_fn(w, h, |x, y| {
        let inside = spec.inside_skull(x as f64, y as f64);
        [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)].iter().any(|&(dx, dy)| {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 && spec.inside_skull(nx as f64, ny as f64) != inside
        })
    })
    .unwrap()
}

/// Share of edge pixels farther than `band` (Euclidean) from the contour.
pub fn spurious_fraction(edges: &EdgeMap, contour: &EdgeMap, band: usize) -> f64 {
    if edges.count() == 0 {
        return 0.0;
    }
    let (w, h) = (edges.width(), edges.height());
    let b = band as i64;
    let spurious = edges
        .pixels()
        .filter(|&(x, y)| {
            !(-b..=b).any(|dy| {
                (-b..=b).any(|dx| {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    dx * dx + dy * dy <= b * b
                        && nx >= 0
                        && ny >= 0
                        && nx < w as i64
                        && ny < h as i64
                        && contour.get(nx as usize, ny as usize)
                })
            })
        })
        .count();
    spurious as f64 / edges.count() as f64
}

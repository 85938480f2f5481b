//! 2-D grid kernels: same-size convolution and sliding per-row statistics.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Same-size 2-D convolution with zero-padded borders. Kernel dimensions
/// must be odd; for symmetric kernels this equals correlation.
pub fn conv2d_same(grid: &[Vec<f64>], kernel: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if grid.is_empty() || grid[0].is_empty() {
        return Err(Error::EmptyInput);
    }
    let kh = kernel.len();
    let kw = kernel.first().map_or(0, |r| r.len());
    if kh % 2 == 0 || kw == 0 || kw % 2 == 0 {
        return Err(Error::InvalidParams("kernel dimensions must be odd"));
    }
    let rows = grid.len();
    let cols = grid[0].len();
    let rh = (kh / 2) as isize;
    let rw = (kw / 2) as isize;
    let mut out = vec![vec![0.0; cols]; rows];
    for i in 0..rows as isize {
        let r0 = (i - rh).max(0);
        let r1 = (i + rh).min(rows as isize - 1);
        for j in 0..cols as isize {
            let c0 = (j - rw).max(0);
            let c1 = (j + rw).min(cols as isize - 1);
            let mut acc = 0.0;
            for r in r0..=r1 {
                let krow = &kernel[(i - r + rh) as usize];
                let grow = &grid[r as usize];
                for c in c0..=c1 {
                    acc += krow[(j - c + rw) as usize] * grow[c as usize];
                }
            }
            out[i as usize][j as usize] = acc;
        }
    }
    Ok(out)
}

/// Centered sliding mean and population standard deviation along one row.
/// Edge positions use the truncated (in-range) part of the window.
pub fn sliding_stats_row(values: &[f64], window_frames: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if window_frames < 1 || window_frames % 2 == 0 {
        return Err(Error::InvalidParams("window_frames must be odd and >= 1"));
    }
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let half = window_frames / 2;
    // Direct two-pass recomputation per position; matches the naive
    // oracle bit-for-bit.
    let mut means = Vec::with_capacity(n);
    let mut stds = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        let win = &values[lo..=hi];
        let count = win.len() as f64;
        let mean = win.iter().sum::<f64>() / count;
        let var = win.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
        means.push(mean);
        stds.push(var.sqrt());
    }
    Ok((means, stds))
}

/// [`sliding_stats_row`] applied to every row of a grid.
pub fn sliding_stats(
    grid: &[Vec<f64>],
    window_frames: usize,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mut means = Vec::with_capacity(grid.len());
    let mut stds = Vec::with_capacity(grid.len());
    for row in grid {
        let (m, s) = sliding_stats_row(row, window_frames)?;
        means.push(m);
        stds.push(s);
    }
    Ok((means, stds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn naive_conv2d(grid: &[Vec<f64>], kernel: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let rows = grid.len();
        let cols = grid[0].len();
        let rh = kernel.len() as isize / 2;
        let rw = kernel[0].len() as isize / 2;
        let mut out = vec![vec![0.0; cols]; rows];
        for i in 0..rows as isize {
            for j in 0..cols as isize {
                let mut acc = 0.0;
                for (ki, krow) in kernel.iter().enumerate() {
                    for (kj, &kv) in krow.iter().enumerate() {
                        let r = i - (ki as isize - rh);
                        let c = j - (kj as isize - rw);
                        if r >= 0 && r < rows as isize && c >= 0 && c < cols as isize {
                            acc += kv * grid[r as usize][c as usize];
                        }
                    }
                }
                out[i as usize][j as usize] = acc;
            }
        }
        out
    }

    #[test]
    fn identity_kernel() {
        let grid = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let out = conv2d_same(&grid, &[vec![1.0]]).unwrap();
        assert_eq!(out, grid);
    }

    #[test]
    fn impulse_stamps_kernel() {
        let mut grid = vec![vec![0.0; 7]; 7];
        grid[3][3] = 1.0;
        let kernel = vec![
            vec![0.1, 0.2, 0.3],
            vec![0.4, 0.5, 0.6],
            vec![0.7, 0.8, 0.9],
        ];
        let out = conv2d_same(&grid, &kernel).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((out[2 + i][2 + j] - kernel[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn matches_naive_oracle() {
        let mut rng = Rng::new(21);
        let grid: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..8).map(|_| rng.normal()).collect())
            .collect();
        let kernel: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..5).map(|_| rng.normal()).collect())
            .collect();
        let got = conv2d_same(&grid, &kernel).unwrap();
        let want = naive_conv2d(&grid, &kernel);
        for (gr, wr) in got.iter().zip(&want) {
            for (g, w) in gr.iter().zip(wr) {
                assert!((g - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn even_kernel_rejected() {
        let grid = vec![vec![0.0; 4]; 4];
        assert!(conv2d_same(&grid, &[vec![1.0, 1.0]]).is_err());
        assert!(conv2d_same(&grid, &[vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn normalized_kernel_preserves_interior_sum() {
        let mut grid = vec![vec![0.0; 12]; 12];
        let mut total = 0.0;
        let mut rng = Rng::new(3);
        for i in 4..8 {
            for j in 4..8 {
                let v = rng.uniform();
                grid[i][j] = v;
                total += v;
            }
        }
        let kernel = vec![vec![1.0 / 9.0; 3]; 3];
        let out = conv2d_same(&grid, &kernel).unwrap();
        let out_total: f64 = out.iter().flatten().sum();
        assert!((out_total - total).abs() < 1e-9 * total);
    }

    #[test]
    fn sliding_stats_constant_row() {
        let (m, s) = sliding_stats_row(&[3.0; 10], 5).unwrap();
        assert!(m.iter().all(|&v| (v - 3.0).abs() < 1e-12));
        assert!(s.iter().all(|&v| v.abs() < 1e-7));
    }

    #[test]
    fn sliding_stats_spec_example() {
        let (m, _) = sliding_stats_row(&[0.0, 0.0, 10.0, 0.0, 0.0], 3).unwrap();
        let want = [0.0, 10.0 / 3.0, 10.0 / 3.0, 10.0 / 3.0, 0.0];
        for (a, b) in m.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sliding_stats_matches_naive() {
        let mut rng = Rng::new(4);
        let row: Vec<f64> = (0..50).map(|_| rng.normal() * 10.0).collect();
        let w = 5usize;
        let (means, stds) = sliding_stats_row(&row, w).unwrap();
        let half = w / 2;
        for i in 0..row.len() {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(row.len() - 1);
            let win = &row[lo..=hi];
            let mean = win.iter().sum::<f64>() / win.len() as f64;
            let var = win.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / win.len() as f64;
            assert_eq!(means[i], mean, "mean at {i}");
            assert_eq!(stds[i], var.sqrt(), "std at {i}");
        }
    }

    #[test]
    fn even_window_rejected() {
        assert!(sliding_stats_row(&[1.0, 2.0], 2).is_err());
        assert!(sliding_stats_row(&[1.0, 2.0], 0).is_err());
    }
}

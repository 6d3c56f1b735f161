//! DTLZ scalable problems (Deb, Thiele, Laumanns and Zitzler), canonical
//! forms. With `M` objectives and `n` variables the last `k = n - M + 1`
//! variables are distance variables, the first `M - 1` position variables.

use std::f64::consts::{FRAC_PI_2, PI};

/// Exponent applied to position variables in DTLZ4.
pub const DTLZ4_ALPHA: f64 = 100.0;

pub fn evaluate(index: usize, x: &[f64], m: usize) -> Vec<f64> {
    let (pos, dist) = x.split_at(m - 1);
    match index {
        1 => {
            let g = multimodal_g(dist);
            let mut f = vec![0.5 * (1.0 + g); m];
            for (i, fi) in f.iter_mut().enumerate() {
                // f_i uses the first M-1-i position variables, then (1 - x) of the next
                let keep = m - 1 - i;
                *fi *= pos[..keep].iter().product::<f64>();
                if i > 0 {
                    *fi *= 1.0 - pos[keep];
                }
            }
            f
        }
        2..=4 => {
            let g = if index == 3 {
                multimodal_g(dist)
            } else {
                sphere_g(dist)
            };
            let angles: Vec<f64> = pos
                .iter()
                .map(|&v| if index == 4 { v.powf(DTLZ4_ALPHA) } else { v } * FRAC_PI_2)
                .collect();
            spherical(&angles, 1.0 + g)
        }
        5 | 6 => {
            let g = if index == 5 {
                sphere_g(dist)
            } else {
                dist.iter().map(|v| v.powf(0.1)).sum()
            };
            let angles = degenerate_angles(pos, g);
            spherical(&angles, 1.0 + g)
        }
        7 => {
            let g = 1.0 + 9.0 * dist.iter().sum::<f64>() / dist.len() as f64;
            let mut f: Vec<f64> = pos.to_vec();
            let h = m as f64
                - pos
                    .iter()
                    .map(|&fi| fi / (1.0 + g) * (1.0 + (3.0 * PI * fi).sin()))
                    .sum::<f64>();
            f.push((1.0 + g) * h);
            f
        }
        _ => unreachable!("validated by BenchmarkSpec"),
    }
}

fn multimodal_g(dist: &[f64]) -> f64 {
    100.0
        * (dist.len() as f64
            + dist
                .iter()
                .map(|&v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos())
                .sum::<f64>())
}

fn sphere_g(dist: &[f64]) -> f64 {
    dist.iter().map(|&v| (v - 0.5).powi(2)).sum()
}

fn degenerate_angles(pos: &[f64], g: f64) -> Vec<f64> {
    pos.iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == 0 {
                v * FRAC_PI_2
            } else {
                PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * v)
            }
        })
        .collect()
}

/// `f_1 = r cos t_1 ... cos t_{M-1}`, `f_i = r cos t_1 ... cos t_{M-i} sin t_{M-i+1}`.
pub(crate) fn spherical(angles: &[f64], radius: f64) -> Vec<f64> {
    let m = angles.len() + 1;
    (0..m)
        .map(|i| {
            let keep = m - 1 - i;
            let mut v = radius * angles[..keep].iter().map(|t| t.cos()).product::<f64>();
            if i > 0 {
                v *= angles[keep].sin();
            }
            v
        })
        .collect()
}

/// Objective vector on the DTLZ5/DTLZ6 optimal curve for `t` in `[0, 1]`.
pub(crate) fn degenerate_front_point(t: f64, m: usize) -> Vec<f64> {
    let mut pos = vec![0.0; m - 1];
    pos[0] = t;
    spherical(&degenerate_angles(&pos, 0.0), 1.0)
}

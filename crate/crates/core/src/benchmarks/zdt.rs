//! ZDT two-objective problems (Zitzler, Deb and Thiele), canonical forms.

use std::f64::consts::PI;

/// Evaluates ZDT `index` (1, 2, 3, 4 or 6) at `x`.
pub fn evaluate(index: usize, x: &[f64]) -> [f64; 2] {
    let n = x.len();
    let tail = &x[1..];
    match index {
        1..=3 => {
            let f1 = x[0];
            let g = 1.0 + 9.0 * tail.iter().sum::<f64>() / (n - 1) as f64;
            let ratio = f1 / g;
            let h = match index {
                1 => 1.0 - ratio.sqrt(),
                2 => 1.0 - ratio * ratio,
                _ => 1.0 - ratio.sqrt() - ratio * (10.0 * PI * f1).sin(),
            };
            [f1, g * h]
        }
        4 => {
            let f1 = x[0];
            let g = 1.0
                + 10.0 * (n - 1) as f64
                + tail
                    .iter()
                    .map(|&v| v * v - 10.0 * (4.0 * PI * v).cos())
                    .sum::<f64>();
            [f1, g * (1.0 - (f1 / g).sqrt())]
        }
        6 => {
            let f1 = 1.0 - (-4.0 * x[0]).exp() * (6.0 * PI * x[0]).sin().powi(6);
            let g = 1.0 + 9.0 * (tail.iter().sum::<f64>() / (n - 1) as f64).powf(0.25);
            let ratio = f1 / g;
            [f1, g * (1.0 - ratio * ratio)]
        }
        _ => unreachable!("validated by BenchmarkSpec"),
    }
}

/// Variable bounds: `[0, 1]` everywhere except ZDT4's tail in `[-5, 5]`.
pub fn bounds(index: usize, k: usize) -> (f64, f64) {
    if index == 4 && k > 0 {
        (-5.0, 5.0)
    } else {
        (0.0, 1.0)
    }
}

/// Optimal-front `f2` as a function of `f1` (g = 1).
pub(crate) fn front_curve(index: usize, f1: f64) -> f64 {
    match index {
        1 | 4 => 1.0 - f1.sqrt(),
        2 | 6 => 1.0 - f1 * f1,
        3 => 1.0 - f1.sqrt() - f1 * (10.0 * PI * f1).sin(),
        _ => unreachable!(),
    }
}

/// Smallest attainable `f1` for ZDT6: `1 - exp(-4x) sin^6(6 pi x)` is
/// minimized at the first peak of the sine term.
pub(crate) fn zdt6_min_f1() -> f64 {
    let f = |x: f64| 1.0 - (-4.0 * x).exp() * (6.0 * PI * x).sin().powi(6);
    // golden-section on [0, 1/6] where the only interior minimum lives
    let (mut a, mut b) = (0.0_f64, 1.0 / 6.0);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - gr * (b - a);
        let d = a + gr * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

//! Derivative-free Nelder-Mead simplex minimiser.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Stop when the spread of function values across the simplex falls below
    /// `f_tol * (|f_best| + f_tol) + f_abs`.
    pub f_tol: f64,
    pub f_abs: f64,
    /// ... and the simplex diameter falls below `x_tol`.
    pub x_tol: f64,
    /// Initial step per coordinate, relative to `max(|x0_i|, 1)`.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 4000,
            f_tol: 1e-15,
            f_abs: 0.0,
            x_tol: 1e-10,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
}

/// Standard coefficients (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). Non-finite objective values are treated as `+inf`.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        let h = opts.initial_step * x0[i].abs().max(1.0);
        p[i] += h;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let mut iterations = 0;
    let mut centroid = vec![0.0; n];
    while iterations < opts.max_iter {
        iterations += 1;
        // sort ascending by value; stable so ties keep insertion order
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[0])
                    .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0_f64, f64::max);
        if spread.is_finite()
            && spread <= opts.f_tol * (values[0].abs() + opts.f_tol) + opts.f_abs
            && diameter <= opts.x_tol
        {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for p in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(2.0);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = simplex[0].clone();
        for k in 1..=n {
            for (x, b) in simplex[k].iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            values[k] = eval(&simplex[k]);
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        f: values[best],
        iterations,
    }
}

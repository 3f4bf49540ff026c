//! Independent F-test p-values for one numerator degree of freedom.
//!
//! `F(1, nu)` is the square of Student's t with `nu` degrees of freedom, and
//! for integer `nu` the two-sided t tail has a finite trigonometric series.
//! Nothing here shares code with the library's incomplete-beta route.

use std::f64::consts::PI;

/// `P(|T| >= t)` for Student's t with integer `nu >= 1`.
pub fn student_t_two_sided(t: f64, nu: u32) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let theta = (t.abs() / f64::from(nu).sqrt()).atan();
    let (s, c) = theta.sin_cos();
    let c2 = c * c;
    let a = if nu.is_multiple_of(2) {
        // sin(theta) * (1 + c^2/2 + 1*3 c^4/(2*4) + ...), nu/2 terms
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = 1;
        while j <= nu.saturating_sub(2) {
            term *= c2 * f64::from(j) / f64::from(j + 1);
            sum += term;
            j += 2;
        }
        s * sum
    } else if nu == 1 {
        2.0 * theta / PI
    } else {
        // 2/pi * (theta + s c (1 + 2 c^2/3 + 2*4 c^4/(3*5) + ...))
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = 2;
        while j <= nu - 3 {
            term *= c2 * f64::from(j) / f64::from(j + 1);
            sum += term;
            j += 2;
        }
        2.0 / PI * (theta + s * c * sum)
    };
    (1.0 - a).clamp(0.0, 1.0)
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// p-value of the F-test of `column` against `ranks`.
pub fn f_test_p(column: &[f64], ranks: &[f64]) -> f64 {
    let r = pearson(column, ranks).clamp(-1.0, 1.0);
    let nu = column.len() as u32 - 2;
    let f = if r * r >= 1.0 { f64::INFINITY } else { r * r / (1.0 - r * r) * f64::from(nu) };
    student_t_two_sided(f.sqrt(), nu)
}

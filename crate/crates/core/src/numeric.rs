//! Floating-point estimate of an arc exponent from a log-log fit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::BivarPoly;
use crate::rat::rat_to_f64;
use crate::series::PuiseuxSeries;

fn eval_arc(phi: &PuiseuxSeries, t: f64) -> Complex64 {
    phi.terms()
        .iter()
        .map(|(e, c)| c.to_c64() * t.powf(rat_to_f64(e)))
        .sum()
}

/// Least-squares slope of `log |grad f|` against `log |f|` along
/// `t -> (phi(t), t)` at `samples` log-spaced points of `[t_min, t_max]`.
pub fn numeric_exponent_estimate(
    f: &BivarPoly,
    phi: &PuiseuxSeries,
    t_min: f64,
    t_max: f64,
    samples: usize,
) -> Result<f64> {
    if !(t_min > 0.0 && t_min < t_max) || samples < 2 {
        return Err(Error::InvalidInput(
            "need 0 < t_min < t_max and at least 2 samples".into(),
        ));
    }
    let fx = f.deriv_x();
    let fy = f.deriv_y();
    let (a, b) = (t_min.ln(), t_max.ln());
    let mut pts = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = (a + (b - a) * k as f64 / (samples - 1) as f64).exp();
        let x = eval_arc(phi, t);
        let y = Complex64::new(t, 0.0);
        let v = f.eval_c64(x, y).norm();
        let g = (fx.eval_c64(x, y).norm_sqr() + fy.eval_c64(x, y).norm_sqr()).sqrt();
        if v > 0.0 && g > 0.0 && v.is_finite() && g.is_finite() {
            pts.push((v.ln(), g.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::DegenerateSamples);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateSamples);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_arc, parse_poly};

    #[test]
    fn sextic_along_imaginary_branch() {
        let f = parse_poly("1/6*x^6 + 1/4*x^4*y^4 - 1/5*x^5*y - 1/3*x^3*y^5").unwrap();
        let phi = parse_arc("x = i*y^2").unwrap();
        let est = numeric_exponent_estimate(&f, &phi, 1e-6, 1e-3, 64).unwrap();
        assert!((est - 10.0 / 11.0).abs() <= 0.02, "{est}");
    }

    #[test]
    fn cusp_along_axis() {
        let f = parse_poly("x^2 - y^3").unwrap();
        let est = numeric_exponent_estimate(&f, &PuiseuxSeries::zero(), 1e-6, 1e-3, 64).unwrap();
        assert!((est - 2.0 / 3.0).abs() <= 0.02, "{est}");
    }

    #[test]
    fn arc_inside_zero_set() {
        let f = parse_poly("x").unwrap();
        assert_eq!(
            numeric_exponent_estimate(&f, &PuiseuxSeries::zero(), 1e-6, 1e-3, 64),
            Err(Error::DegenerateSamples)
        );
    }
}

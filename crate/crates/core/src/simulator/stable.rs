use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Standard symmetric alpha-stable variate, characteristic function
/// `exp(-|u|^alpha)`, via the Chambers-Mallows-Stuck transform.
///
/// With this scale, `x^alpha P(|X| > x) -> tail_constant(alpha)`.
pub fn sample_standard_sas<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 2.0);
    let v = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break PI * (u - 0.5);
        }
    };
    if alpha == 1.0 {
        return v.tan();
    }
    let w: f64 = Exp1.sample(rng);
    let a = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
    a * b
}

/// `C_alpha = (∫_0^∞ x^{-alpha} sin x dx)^{-1}`.
pub fn tail_constant(alpha: f64) -> f64 {
    if alpha == 1.0 {
        return 2.0 / PI;
    }
    (1.0 - alpha) / (libm::tgamma(2.0 - alpha) * (FRAC_PI_2 * alpha).cos())
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn tail_constant_at_one() {
        assert!((tail_constant(1.0) - 2.0 / PI).abs() < 1e-12);
        assert!((tail_constant(1.0 + 1e-6) - 2.0 / PI).abs() < 1e-4);
        assert!((tail_constant(1.0 - 1e-6) - 2.0 / PI).abs() < 1e-4);
    }

    #[test]
    fn gaussian_limit_value() {
        // alpha -> 2: C_alpha -> 0
        assert!(tail_constant(1.999) < 1e-2);
    }

    #[test]
    fn cauchy_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sample_standard_sas(1.0, &mut rng)).collect();
        let exceed = xs.iter().filter(|x| x.abs() > 10.0).count() as f64 / n as f64;
        let exact = 1.0 - 2.0 / PI * 10f64.atan();
        assert!((exceed - exact).abs() < 0.01, "{exceed} vs {exact}");
        xs.sort_by(f64::total_cmp);
        assert!(xs[n / 2].abs() < 0.05);
    }
}

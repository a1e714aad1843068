use num_complex::Complex64;

use crate::error::{Error, Result};

/// ABG pathloss in dB: `10·α·log10(d) + β + 10·γ·log10(f)`, with `d` in
/// meters and `f` in GHz.
pub fn pathloss_db(d: f64, f_ghz: f64, alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    if !(d > 0.0) || !(f_ghz > 0.0) {
        return Err(Error::Domain(format!(
            "pathloss needs d > 0 and f > 0 (got d = {d}, f = {f_ghz})"
        )));
    }
    Ok(10.0 * alpha * d.log10() + beta + 10.0 * gamma * f_ghz.log10())
}

/// Complex link gain `h = ζ · 10^(-(PL + S)/10)`.
///
/// The combined loss is applied through the exponent exactly as written,
/// so the returned coefficient is on the same scale as the fading draw.
pub fn channel_gain(pl_db: f64, shadow_db: f64, fading: Complex64) -> Complex64 {
    fading * 10f64.powf(-(pl_db + shadow_db) / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::complex_normal;
    use crate::rng::{stream, Stream};

    #[test]
    fn unit_distance_and_frequency_leave_beta() {
        for (a, b, g) in [(2.2, 32.4, 2.0), (3.5, 10.0, 0.0), (0.0, -4.0, 7.0)] {
            assert!((pathloss_db(1.0, 1.0, a, b, g).unwrap() - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ten_meters_at_one_ghz() {
        // 32.4 + 22·log10(10)
        let pl = pathloss_db(10.0, 1.0, 2.2, 32.4, 2.0).unwrap();
        assert!((pl - 54.4).abs() < 1e-12);
    }

    #[test]
    fn decade_spacing_adds_ten_alpha() {
        let a = pathloss_db(10.0, 6.0, 2.2, 32.4, 2.0).unwrap();
        let b = pathloss_db(100.0, 6.0, 2.2, 32.4, 2.0).unwrap();
        assert!((b - a - 22.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(pathloss_db(0.0, 6.0, 2.2, 32.4, 2.0).is_err());
        assert!(pathloss_db(1.0, -1.0, 2.2, 32.4, 2.0).is_err());
    }

    #[test]
    fn gain_direct_substitution() {
        let one = Complex64::new(1.0, 0.0);
        assert!((channel_gain(0.0, 0.0, one) - one).norm() < 1e-15);
        assert!((channel_gain(6.0, 4.0, one) - Complex64::new(0.1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mean_power_over_fading_draws() {
        let mut rng = stream(3, Stream::Fading);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| channel_gain(15.0, 5.0, complex_normal(&mut rng)).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean / 1e-4 - 1.0).abs() < 0.05, "mean |h|^2 = {mean}");
    }
}

//! Special functions used by the schemes: the sine integral behind the
//! Toeplitz integration matrix, the Gamma function and complex principal
//! powers behind the Laplace-type transform of the singular factor.

use num_complex::Complex64;

use crate::error::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// Sine integral `Si(x) = ∫_0^x sin(τ)/τ dτ` for `x ≥ 0`.
///
/// Power series below x = 4, auxiliary-function evaluation through the
/// continued fraction of `E1(ix)` above (`Si(x) = π/2 + Im E1(ix)`). Both
/// branches are accurate to well under 1e−13 absolute at the switch point;
/// the series alone would lose ~5 digits to cancellation by x = 16.
pub fn sine_integral(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("sine_integral requires x >= 0, got {x}")));
    }
    Ok(si_nonneg(x))
}

/// `Si` on the validated domain; shared by `sigma_e`.
pub(crate) fn si_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 4.0 {
        si_series(x)
    } else {
        PI / 2.0 + exp_integral_e1_imag_axis(x).im
    }
}

/// Alternating series Σ (−1)^n x^{2n+1} / ((2n+1)(2n+1)!).
fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut sum = x;
    let mut power = x; // x^{2n+1}/(2n+1)! without the extra (2n+1) factor
    let mut n = 0u32;
    loop {
        n += 1;
        let k = 2.0 * n as f64;
        power *= -x2 / (k * (k + 1.0));
        let term = power / (k + 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-30) || n > 60 {
            return sum;
        }
    }
}

/// `E1(i·x)` for real `x > 0` by the modified Lentz continued fraction
/// `E1(z) = e^{−z} / (z + 1 − 1²/(z + 3 − 2²/(z + 5 − …)))`.
///
/// The identity `E1(ix) = −Ci(x) + i(Si(x) − π/2)` turns its imaginary part
/// into the auxiliary `(f, g)` combination `−f(x)cos(x) − g(x)sin(x)`.
fn exp_integral_e1_imag_axis(x: f64) -> Complex64 {
    debug_assert!(x > 0.0);
    let z = Complex64::new(0.0, x);
    let tiny = Complex64::new(1e-300, 0.0);

    let mut b = z + 1.0;
    let mut f = if b.norm_sqr() == 0.0 { tiny } else { b };
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..=400u32 {
        let a = -((k as f64) * (k as f64));
        b += 2.0;
        d = b + a * d;
        if d.norm_sqr() == 0.0 {
            d = tiny;
        }
        d = d.inv();
        c = b + a / c;
        if c.norm_sqr() == 0.0 {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    // e^{-ix} = cos x − i sin x
    Complex64::new(x.cos(), -x.sin()) / f
}

/// `σ_k = ∫_0^k sinc(t) dt = Si(π k)/π` (odd in k) and `e_k = 1/2 + σ_k`.
pub fn sigma_e(k: i64) -> (f64, f64) {
    if k == 0 {
        return (0.0, 0.5);
    }
    let s = si_nonneg(PI * k.unsigned_abs() as f64) / PI;
    let sigma = if k > 0 { s } else { -s };
    (sigma, 0.5 + sigma)
}

// Lanczos coefficients from Pugh's analysis of the approximation
// (G. R. Pugh, "An analysis of the Lanczos gamma approximation", 2004),
// the same table statrs ships; ~16 correct digits over the positive axis.
const LANCZOS_R: f64 = 10.900511;
const LANCZOS_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];
const TWO_SQRT_E_OVER_PI: f64 = 1.86038273420526571682;

/// Gamma function for `x > 0`, relative accuracy better than 1e−13.
pub fn gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("gamma_real requires x > 0, got {x}")));
    }
    Ok(lanczos_gamma(x))
}

fn lanczos_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s: f64 = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |acc, (i, dk)| acc + dk / (i as f64 - x));
        PI / ((PI * x).sin()
            * s
            * TWO_SQRT_E_OVER_PI
            * ((0.5 - x + LANCZOS_R) / core::f64::consts::E).powf(0.5 - x))
    } else {
        let s: f64 = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |acc, (i, dk)| acc + dk / (x + i as f64 - 1.0));
        s * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_R) / core::f64::consts::E).powf(x - 0.5)
    }
}

/// Principal power `s^p = exp(p·Log s)` for `s` in the open right half-plane.
pub fn complex_principal_power(s: Complex64, p: f64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!(
            "complex_principal_power requires Re(s) > 0, got {s}"
        )));
    }
    Ok(Complex64::from_polar(s.norm().powf(p), p * s.arg()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Frozen reference values computed with 30-digit arithmetic.
    const SI_REFERENCE: &[(f64, f64)] = &[
        (0.25, 0.249133570319757164),
        (0.5, 0.493107418043066689),
        (1.0, 0.946083070367183015),
        (2.0, 1.605412976802694849),
        (3.0, 1.848652527999468256),
        (3.9, 1.776501360447805439),
        (4.0, 1.758203138949053058),
        (4.1, 1.738743626491768926),
        (6.0, 1.424687551280506536),
        (10.0, 1.658347594218874049),
        (16.0, 1.631302268270032886),
        (50.0, 1.551617072485935895),
        (core::f64::consts::PI, 1.851937051982466170),
        (2.0 * core::f64::consts::PI, 1.418151576132628450),
    ];

    #[test]
    fn sine_integral_reference_values() {
        for &(x, want) in SI_REFERENCE {
            let got = sine_integral(x).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-13);
        }
        assert_eq!(sine_integral(0.0).unwrap(), 0.0);
        assert!(sine_integral(-1.0).is_err());
    }

    #[test]
    fn sine_integral_dirichlet_limit() {
        // Si(x) -> pi/2; at x = 1e4 within 2e-4
        let v = sine_integral(1e4).unwrap();
        assert_abs_diff_eq!(v, 1.570891545385961916, epsilon = 1e-12);
        assert!((v - PI / 2.0).abs() < 2e-4);
    }

    #[test]
    fn sine_integral_quadrature_oracle() {
        // composite Simpson oracle for Si(pi), independent of both branches
        let n = 200_000usize;
        let a = 0.0;
        let b = PI;
        let hstep = (b - a) / n as f64;
        let f = |t: f64| crate::sinc::sinc(t / PI);
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * hstep);
        }
        let oracle = acc * hstep / 3.0;
        assert_abs_diff_eq!(sine_integral(PI).unwrap(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn sigma_e_values() {
        let (s0, e0) = sigma_e(0);
        assert_eq!(s0, 0.0);
        assert_eq!(e0, 0.5);
        let (s1, e1) = sigma_e(1);
        assert_abs_diff_eq!(s1, 0.589489872236083635, epsilon = 1e-13);
        assert_abs_diff_eq!(e1, 1.089489872236083635, epsilon = 1e-13);
        let (sm1, em1) = sigma_e(-1);
        assert_abs_diff_eq!(sm1, -0.589489872236083635, epsilon = 1e-13);
        assert_abs_diff_eq!(em1, -0.089489872236083635, epsilon = 1e-13);
    }

    #[test]
    fn sigma_oddness_and_limit() {
        for k in 1..=200i64 {
            let (s, e) = sigma_e(k);
            let (sm, em) = sigma_e(-k);
            assert_eq!(s, -sm);
            assert_abs_diff_eq!(e + em, 1.0, epsilon = 1e-15);
            // |sigma_k - 1/2| <= 1/(pi^2 k), from |f(x)| <= 1/x
            assert!(
                (s - 0.5).abs() <= 1.0 / (PI * PI * k as f64) + 1e-13,
                "bound violated at k={k}: sigma={s}"
            );
        }
        // even/odd subsequences increase toward 1/2
        for k in (1..180i64).step_by(2) {
            assert!(sigma_e(k + 2).0 < sigma_e(k).0); // odd k: decreasing toward 1/2 from above
            assert!(sigma_e(k + 1).0 < sigma_e(k + 3).0); // even k: increasing toward 1/2 from below
        }
    }

    #[test]
    fn gamma_reference_values() {
        assert_relative_eq!(gamma_real(1.0).unwrap(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.5).unwrap(), 1.772453850905516027, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.75).unwrap(), 1.225416702465177645, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.25).unwrap(), 3.625609908221908312, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.1).unwrap(), 9.513507698668731836, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.9).unwrap(), 1.068628702119319355, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.3).unwrap(), 2.991568987687590628, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.6).unwrap(), 1.489192248812817102, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(4.0).unwrap(), 6.0, max_relative = 1e-13);
        assert!(gamma_real(0.0).is_err());
        assert!(gamma_real(-0.5).is_err());
    }

    #[test]
    fn gamma_integral_oracle() {
        // Gamma(x) = int_0^inf t^{x-1} e^{-t} dt via composite Simpson in the
        // substitution t = u^4, which makes the integrand smooth at the
        // origin for x = 0.75: 4 u^{4x-1} e^{-u^4} = 4 u^2 e^{-u^4}.
        let x = 0.75;
        let n = 200_000usize;
        let upper = 4.2; // e^{-311} is negligible
        let hstep = upper / n as f64;
        let f = |u: f64| 4.0 * u.powf(4.0 * x - 1.0) * (-u.powi(4)).exp();
        let mut acc = 0.0 + f(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * hstep);
        }
        let oracle = acc * hstep / 3.0;
        assert_relative_eq!(gamma_real(x).unwrap(), oracle, max_relative = 1e-11);
    }

    #[test]
    fn principal_power_values() {
        let one = complex_principal_power(Complex64::new(1.0, 0.0), 0.5).unwrap();
        assert_abs_diff_eq!(one.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(one.im, 0.0, epsilon = 1e-15);
        let two = complex_principal_power(Complex64::new(4.0, 0.0), 0.5).unwrap();
        assert_abs_diff_eq!(two.re, 2.0, epsilon = 1e-14);
        let c = complex_principal_power(Complex64::new(2.0, 2.0), 0.5).unwrap();
        assert_abs_diff_eq!(c.re, 1.553773974030037307, epsilon = 1e-13);
        assert_abs_diff_eq!(c.im, 0.643594252905582625, epsilon = 1e-13);
        assert!(complex_principal_power(Complex64::new(0.0, 1.0), 0.5).is_err());
        assert!(complex_principal_power(Complex64::new(-1.0, 1.0), 0.5).is_err());
    }

    #[test]
    fn principal_power_preserves_right_half_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let s = Complex64::new(rng.gen_range(1e-6..50.0), rng.gen_range(-50.0..50.0));
            let p: f64 = rng.gen_range(0.01..0.99);
            let w = complex_principal_power(s, p).unwrap();
            assert!(w.re > 0.0, "left half-plane image: s={s}, p={p}, w={w}");
        }
    }
}

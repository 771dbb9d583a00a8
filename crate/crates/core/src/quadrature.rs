//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gk15(f: &mut impl FnMut(f64) -> f64, lo: f64, hi: f64) -> Panel {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = h * XGK[k];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Panel { lo, hi, value: kronrod * h, error: ((kronrod - gauss) * h).abs() }
}

/// Integrates `f` over the finite interval `[lo, hi]`, bisecting the panel
/// with the largest error estimate until the total error is below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    const MAX_PANELS: usize = 4000;
    if lo == hi {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut panels = vec![gk15(&mut f, lo, hi)];
    let mut evaluations = 15;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::QuadratureFailure { estimate: value, error });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature { value, error, evaluations });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|p, q| p.1.error.total_cmp(&q.1.error))
            .expect("non-empty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if panels.len() >= MAX_PANELS || mid == p.lo || mid == p.hi {
            return Err(Error::QuadratureFailure { estimate: value, error });
        }
        panels.push(gk15(&mut f, p.lo, mid));
        panels.push(gk15(&mut f, mid, p.hi));
        evaluations += 30;
    }
}

/// Integrates over consecutive breakpoints and sums the pieces.
pub fn integrate_pieces(
    mut f: impl FnMut(f64) -> f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    let n = breaks.len().saturating_sub(1).max(1) as f64;
    let mut total = Quadrature { value: 0.0, error: 0.0, evaluations: 0 };
    for w in breaks.windows(2) {
        let q = integrate(&mut f, w[0], w[1], abs_tol / n, rel_tol)?;
        total.value += q.value;
        total.error += q.error;
        total.evaluations += q.evaluations;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x.powi(9) - 3.0 * x * x, -1.0, 2.0, 1e-12, 0.0).unwrap();
        assert!((q.value - (102.3 - 9.0)).abs() < 1e-12, "{}", q.value);
    }

    #[test]
    fn endpoint_singularity() {
        let q = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn oscillatory() {
        let q = integrate(|x: f64| (50.0 * x).cos(), 0.0, 3.0, 1e-12, 0.0).unwrap();
        assert!((q.value - (150.0f64).sin() / 50.0).abs() < 1e-11);
    }

    #[test]
    fn reversed_interval_negates() {
        let f = |x: f64| x.exp();
        let a = integrate(f, 0.0, 1.0, 1e-13, 0.0).unwrap().value;
        let b = integrate(f, 1.0, 0.0, 1e-13, 0.0).unwrap().value;
        assert!((a + b).abs() < 1e-13);
    }

    #[test]
    fn non_integrable_fails() {
        assert!(integrate(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10, 0.0).is_err());
    }

    #[test]
    fn pieces_sum() {
        let q = integrate_pieces(|x: f64| x.sin(), &[0.0, 1.0, 2.0, std::f64::consts::PI], 1e-12, 0.0)
            .unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
    }
}

//! Adaptive Gauss–Kronrod (7/15) quadrature for small vector-valued integrands.

use crate::{Error, Result};

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

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Maximum number of interval bisections before giving up.
pub const MAX_SUBDIVISIONS: usize = 20_000;

fn kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64) -> ([f64; N], f64)
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut gk = [0.0; N];
    let mut g = [0.0; N];

    let fc = f(center);
    for i in 0..N {
        gk[i] = WGK[7] * fc[i];
        g[i] = WG[3] * fc[i];
    }
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let f1 = f(center - half * x);
        let f2 = f(center + half * x);
        for i in 0..N {
            let pair = f1[i] + f2[i];
            gk[i] += w * pair;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * pair;
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..N {
        gk[i] *= half;
        g[i] *= half;
        let e = (gk[i] - g[i]).abs();
        err = if e.is_finite() { err.max(e) } else { f64::INFINITY };
    }
    (gk, err)
}

/// Integrates `f` over `[a, b]` to absolute accuracy `tol` (max-norm over components).
///
/// The interval is first cut into `initial_pieces` equal parts (useful for
/// oscillatory integrands), then the piece with the largest error estimate is
/// bisected until the summed estimate falls below `tol`.
pub fn integrate<const N: usize, F>(mut f: F, a: f64, b: f64, tol: f64, initial_pieces: usize) -> Result<[f64; N]>
where
    F: FnMut(f64) -> [f64; N],
{
    if a == b {
        return Ok([0.0; N]);
    }
    let pieces = initial_pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut intervals: Vec<(f64, f64, [f64; N], f64)> = (0..pieces)
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == pieces { b } else { lo + width };
            let (v, e) = kronrod(&mut f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();

    for _ in 0..MAX_SUBDIVISIONS {
        let total_err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !total_err.is_finite() {
            break;
        }
        if total_err <= tol {
            return Ok(sum_values(&intervals));
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v1, e1) = kronrod(&mut f, lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let estimate = intervals.iter().map(|iv| iv.3).sum();
    Err(Error::QuadratureDiverged { a, b, estimate })
}

fn sum_values<const N: usize>(intervals: &[(f64, f64, [f64; N], f64)]) -> [f64; N] {
    let mut out = [0.0; N];
    for iv in intervals {
        for i in 0..N {
            out[i] += iv.2[i];
        }
    }
    out
}

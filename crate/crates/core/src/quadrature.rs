//! Adaptive Gauss–Kronrod (7/15) quadrature for matrix-valued integrands.

#![allow(clippy::excessive_precision)]

use crate::error::Result;
use crate::linalg::{Op4, C64};

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

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 24;

fn panel<F>(f: &mut F, a: f64, b: f64) -> Result<(Op4, f64)>
where
    F: FnMut(f64) -> Result<Op4>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = Op4::zeros();
    let mut gauss = Op4::zeros();
    for (k, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-x, x] };
        for &s in nodes {
            let v = f(center + half * s)?;
            kronrod += v * C64::new(w, 0.0);
            if k % 2 == 1 {
                gauss += v * C64::new(WG[k / 2], 0.0);
            }
        }
    }
    kronrod *= C64::new(half, 0.0);
    gauss *= C64::new(half, 0.0);
    let err = (kronrod - gauss).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((kronrod, err))
}

/// `∫_a^b f(x) dx` to absolute tolerance `abs_tol` in the largest entry.
///
/// Panels are bisected until the Kronrod–Gauss difference drops below the
/// tolerance share of that panel. Returns the integral and the summed error
/// estimate.
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<(Op4, f64)>
where
    F: FnMut(f64) -> Result<Op4>,
{
    let mut total = Op4::zeros();
    let mut total_err = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = panel(&mut f, lo, hi)?;
        let share = abs_tol * (hi - lo) / (b - a);
        if err <= share || depth >= MAX_DEPTH {
            total += value;
            total_err += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok((total, total_err))
}

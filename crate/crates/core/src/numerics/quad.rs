use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    /// Non-negative estimate of the absolute error.
    pub error: T,
    pub subdivisions: usize,
}

/// Endpoints where the integrand may behave like an inverse square root.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SingularEnds {
    pub lower: bool,
    pub upper: bool,
}

impl SingularEnds {
    pub const NONE: Self = Self { lower: false, upper: false };
    pub const LOWER: Self = Self { lower: true, upper: false };
    pub const UPPER: Self = Self { lower: false, upper: true };
    pub const BOTH: Self = Self { lower: true, upper: true };
}

const MAX_SUBDIVISIONS: usize = 4000;

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
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

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * lit::<T>(WGK[7]);
    let mut gauss = fc * lit::<T>(WG[3]);
    for j in 0..7 {
        let dx = radius * lit::<T>(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + lit::<T>(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + lit::<T>(WG[j / 2]) * pair;
        }
    }
    let value = kronrod * radius;
    let error = ((kronrod - gauss) * radius).abs();
    (value, error)
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive Gauss–Kronrod quadrature: bisects the segment with the largest error
/// estimate until the summed estimate is at most `tol`, or at the roundoff floor
/// `50·ε·∫|f|` when that is larger.
pub fn quad_adaptive<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<QuadratureResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(QuadratureResult { value: T::zero(), error: T::zero(), subdivisions: 0 });
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total_value = value;
    let mut total_error = error;
    let mut subdivisions = 0usize;
    let half = lit::<T>(0.5);
    let floor_factor = lit::<T>(50.0) * T::eps();
    let mut total_abs = value.abs();
    while total_error > tol.max(floor_factor * total_abs) {
        if subdivisions >= MAX_SUBDIVISIONS {
            return Err(Error::QuadratureDiverged { subdivisions, error: to_f64(total_error) });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = half * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Segment below floating point resolution.
            return Err(Error::QuadratureDiverged { subdivisions, error: to_f64(total_error) });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total_value = total_value - worst.value + v1 + v2;
        total_error = total_error - worst.error + e1 + e2;
        total_abs = total_abs - worst.value.abs() + v1.abs() + v2.abs();
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
        // Re-sum to stop cancellation drift in the running totals.
        if subdivisions % 64 == 0 {
            total_value = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
            total_abs = heap.iter().map(|s| s.value.abs()).sum();
        }
    }
    let value: T = heap.iter().map(|s| s.value).sum();
    let error: T = heap.iter().map(|s| s.error).sum();
    if !value.is_finite() {
        return Err(Error::QuadratureDiverged { subdivisions, error: f64::INFINITY });
    }
    Ok(QuadratureResult { value, error, subdivisions })
}

/// Integrates `f` over `[a, b]` where `f` may blow up like an inverse square root at the
/// flagged ends.
///
/// Both ends flagged: `x = a + (b - a)·sin²(s)`, `s ∈ [0, π/2]`. One end flagged: the one-sided
/// square-root map `x = a + (b - a)·s²` (or its mirror at `b`). The transformed integrand is
/// bounded and is handed to [`quad_adaptive`].
pub fn quad_singular<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    ends: SingularEnds,
    tol: T,
) -> Result<QuadratureResult<T>> {
    let len = b - a;
    let two = lit::<T>(2.0);
    match (ends.lower, ends.upper) {
        (false, false) => quad_adaptive(f, a, b, tol),
        (true, true) => {
            let quarter = T::FRAC_PI_4();
            let g = |s: T| {
                let (sn, cs) = s.sin_cos();
                // Measure from whichever end is closer to keep x accurate near it.
                let x = if s < quarter { a + len * sn * sn } else { b - len * cs * cs };
                let jac = len * two * sn * cs;
                if jac == T::zero() {
                    T::zero()
                } else {
                    f(x) * jac
                }
            };
            quad_adaptive(g, T::zero(), T::FRAC_PI_2(), tol)
        }
        (true, false) => {
            let g = |s: T| {
                let jac = two * len * s;
                if jac == T::zero() {
                    T::zero()
                } else {
                    f(a + len * s * s) * jac
                }
            };
            quad_adaptive(g, T::zero(), T::one(), tol)
        }
        (false, true) => {
            let g = |s: T| {
                let jac = two * len * s;
                if jac == T::zero() {
                    T::zero()
                } else {
                    f(b - len * s * s) * jac
                }
            };
            quad_adaptive(g, T::zero(), T::one(), tol)
        }
    }
}

/// `∫_a^∞ f(s) ds` for `a > 0`, mapped to a finite interval by `s = 1/w`.
///
/// `lower_singular` flags an inverse-square-root singularity at `s = a`; `tail_singular` flags one
/// at `w = 0` in the transformed integrand.
pub fn quad_to_infinity<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    lower_singular: bool,
    tail_singular: bool,
    tol: T,
) -> Result<QuadratureResult<T>> {
    if !(a > T::zero()) {
        return Err(Error::InvalidArgument(format!("semi-infinite lower limit must be positive, got {a}")));
    }
    let g = |w: T| {
        if w == T::zero() {
            return T::zero();
        }
        f(T::one() / w) / (w * w)
    };
    quad_singular(
        g,
        T::zero(),
        T::one() / a,
        SingularEnds { lower: tail_singular, upper: lower_singular },
        tol,
    )
}

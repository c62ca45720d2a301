use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

use super::SeparatedState;

/// The `r`-independent factor `e^{2g} − 1/4 + η/2 − ξ²/4` of the depth; `h ≥ 0` iff it is
/// non-negative.
pub fn depth_bracket<T: Real>(s: &SeparatedState<T>) -> T {
    let quarter = lit::<T>(0.25);
    (lit::<T>(2.0) * s.g).exp() - quarter + lit::<T>(0.5) * s.eta - quarter * s.xi * s.xi
}

/// Fields of the separated solution at radii `r`:
/// `h = (r²/2)(e^{2g} − 1/4 + η/2 − ξ²/4)`, `U = −(r/2)ξ`, `V = r(e^g − 1/2)`.
///
/// A negative depth bracket is reported as [`Error::UnphysicalReconstruction`], never clamped.
pub fn reconstruct_fields<T: Real>(s: &SeparatedState<T>, r: &[T]) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    if let Some(bad) = r.iter().find(|&&ri| !(ri > T::zero())) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {bad}")));
    }
    let bracket = depth_bracket(s);
    if bracket < T::zero() {
        return Err(Error::UnphysicalReconstruction { bracket: to_f64(bracket) });
    }
    let half = lit::<T>(0.5);
    let rot = s.g.exp() - half;
    let h = r.iter().map(|&ri| half * ri * ri * bracket).collect();
    let u = r.iter().map(|&ri| -half * ri * s.xi).collect();
    let v = r.iter().map(|&ri| ri * rot).collect();
    Ok((h, u, v))
}

/// Relative vorticity `(∂V/∂r + V/r + 1)/h`, which for `V = r(e^g − 1/2)` is `(2e^g)/h`.
pub fn relative_vorticity<T: Real>(s: &SeparatedState<T>, r: T) -> Result<T> {
    let (h, _, _) = reconstruct_fields(s, &[r])?;
    let v_rate = s.g.exp() - lit(0.5);
    Ok((lit::<T>(2.0) * v_rate + T::one()) / h[0])
}

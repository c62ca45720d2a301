use crate::scalar::{lit, Real};

/// One second-order strong-stability-preserving Runge–Kutta step (two-stage Heun form).
///
/// `rate(t, u, out)` writes the semi-discrete time derivative of `u` at stage time `t`.
/// The update is a convex combination of forward-Euler stages, so any affine functional
/// conserved by `rate` is conserved by the step.
pub fn ssp_step<T, E, L>(mut rate: L, t: T, u: &[T], dt: T) -> Result<Vec<T>, E>
where
    T: Real,
    L: FnMut(T, &[T], &mut [T]) -> Result<(), E>,
{
    let n = u.len();
    let mut k = vec![T::zero(); n];
    rate(t, u, &mut k)?;
    let stage: Vec<T> = u.iter().zip(&k).map(|(&ui, &ki)| ui + dt * ki).collect();
    rate(t + dt, &stage, &mut k)?;
    let half = lit::<T>(0.5);
    Ok(u.iter()
        .zip(stage.iter().zip(&k))
        .map(|(&ui, (&si, &ki))| half * ui + half * (si + dt * ki))
        .collect())
}

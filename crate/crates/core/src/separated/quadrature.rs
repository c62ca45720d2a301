use crate::error::{Error, Result};
use crate::numerics::{quad_singular, quad_to_infinity, SingularEnds};
use crate::scalar::{lit, to_f64, Real};

use super::{classify, kappa_from_theta, theta, trace, Regime, TraceOptions};

/// Roots of `2ϑ − κ₀ϑ² − 1`, in cancellation-free form: `(1/(1 + √(1−κ₀)), (1 + √(1−κ₀))/κ₀)`.
///
/// For `κ₀ ∈ (0, 1]` these are the oscillation bounds `[ϑ̄, ϑ̂]`; for `κ₀ < 0` the first is the
/// positive turning point and the second the negative one; for `κ₀ = 0` the second is infinite.
pub fn turning_points<T: Real>(kappa0: T) -> (T, T) {
    let sq = (T::one() - kappa0).sqrt();
    let first = T::one() / (T::one() + sq);
    let second = if kappa0 == T::zero() { T::infinity() } else { (T::one() + sq) / kappa0 };
    (first, second)
}

/// `[ϑ̄, ϑ̂]` for the periodic regime.
pub fn theta_bounds<T: Real>(kappa0: T) -> Result<(T, T)> {
    if !(kappa0 > T::zero() && kappa0 <= T::one()) {
        return Err(Error::InvalidArgument(format!("kappa0 = {kappa0} outside (0, 1]")));
    }
    Ok(turning_points(kappa0))
}

/// `2s − κ₀s² − 1` in factored form around its roots.
fn turning_polynomial<T: Real>(kappa0: T, roots: (T, T), s: T) -> T {
    if kappa0 == T::zero() {
        lit::<T>(2.0) * (s - roots.0)
    } else {
        -kappa0 * (s - roots.0) * (s - roots.1)
    }
}

/// Half-cycle integral `∫_{ϑ̄}^{ϑ̂} dϑ / (ϑ √(2ϑ − κ₀ϑ² − 1))`, which equals `π` for every
/// `κ₀ ∈ (0, 1)`. Returns the quadrature value; errors if it misses `π` by more than `tol`.
pub fn period_integral<T: Real>(kappa0: T, tol: T) -> Result<T> {
    if !(kappa0 > T::zero() && kappa0 < T::one()) {
        return Err(Error::InvalidArgument(format!("period integral needs kappa0 in (0, 1), got {kappa0}")));
    }
    let roots = turning_points(kappa0);
    let (lo, hi) = roots;
    let f = |th: T| T::one() / (th * (kappa0 * (th - lo) * (hi - th)).sqrt());
    let r = quad_singular(f, lo, hi, SingularEnds::BOTH, tol * lit(0.1))?;
    if (r.value - T::PI()).abs() > tol {
        return Err(Error::PostCondition(format!(
            "period integral {} differs from pi by more than {}",
            r.value, tol
        )));
    }
    Ok(r.value)
}

/// Which way `ϑ` leaves its initial value on a blowup trajectory.
struct Branch<T> {
    /// `+1` when `ϑ → +∞`, `−1` when `ϑ → −∞`.
    sign: T,
    /// `|ϑ₀|`.
    start: T,
    /// `|ϑ|` at the turning point visited first, if any.
    turn: Option<T>,
}

fn branch<T: Real>(xi0: T, th0: T, roots: (T, T)) -> Branch<T> {
    if th0 > T::zero() {
        // ϑ' = ξϑ: ξ₀ < 0 sends ϑ down to the positive root before it turns.
        Branch { sign: T::one(), start: th0, turn: (xi0 < T::zero()).then_some(roots.0) }
    } else {
        // ξ₀ < 0 sends ϑ up to the negative root before it turns back to −∞.
        Branch { sign: -T::one(), start: -th0, turn: (xi0 < T::zero()).then_some(-roots.1) }
    }
}

/// Time integrand in `σ = |ϑ|` on the given branch: `1/(σ √P(±σ))`.
fn time_density<T: Real>(kappa0: T, roots: (T, T), sign: T) -> impl Fn(T) -> T {
    move |sigma: T| {
        let p = turning_polynomial(kappa0, roots, sign * sigma);
        T::one() / (sigma * p.sqrt())
    }
}

fn blowup_kappa<T: Real>(xi0: T, eta0: T) -> Result<(T, T)> {
    let th0 = theta(xi0, eta0);
    let mut k0 = kappa_from_theta(xi0, th0);
    if k0.abs() <= lit::<T>(64.0) * T::eps() {
        k0 = T::zero();
    }
    if !(k0 <= T::zero()) || th0 == T::zero() {
        return Err(Error::InvalidArgument(format!(
            "(xi0, eta0) = ({xi0}, {eta0}) is not on a kappa0 <= 0 blowup branch"
        )));
    }
    Ok((th0, k0))
}

/// Time for `|ϑ|` to run from its initial value to `threshold` (or to infinity when
/// `threshold` is infinite), by quadrature on the branch fixed by the signs of `ξ₀` and `ϑ₀`.
///
/// Infinite upper limits are mapped by `s ↦ 1/w`; turning points are inverse-square-root
/// endpoint singularities.
pub fn time_to_threshold<T: Real>(xi0: T, eta0: T, threshold: T, tol: T) -> Result<T> {
    let (th0, k0) = blowup_kappa(xi0, eta0)?;
    let roots = turning_points(k0);
    let br = branch(xi0, th0, roots);
    let f = time_density(k0, roots, br.sign);
    // Flagging the tail is harmless for κ₀ < 0 and absorbs the σ^{-3/2} range when |κ₀| is tiny.
    let tail_singular = true;
    let mut total = T::zero();
    let from = match br.turn {
        Some(turn) => {
            if br.start > turn {
                total = total + quad_singular(&f, turn, br.start, SingularEnds::LOWER, tol)?.value;
            }
            turn
        }
        None => br.start,
    };
    let full = quad_to_infinity(&f, from, true, tail_singular, tol)?.value;
    if threshold.is_infinite() {
        return Ok(total + full);
    }
    if threshold <= from {
        return Err(Error::InvalidArgument(format!("threshold {threshold} below branch start {from}")));
    }
    let beyond = quad_to_infinity(&f, threshold, false, tail_singular, tol)?.value;
    Ok(total + full - beyond)
}

/// Blowup time from the defining integral alone.
///
/// `ϑ₀ = 0` gives `π/2 − arctan ξ₀` and `κ₀ = 0` gives `π − 2 arctan ξ₀` from the explicit
/// solutions; `κ₀ < 0` integrates `dϑ/(ϑ√(2ϑ − κ₀ϑ² − 1))` along the appropriate branch.
pub fn blowup_time_quadrature<T: Real>(xi0: T, eta0: T, tol: T) -> Result<T> {
    let th0 = theta(xi0, eta0);
    let scale = xi0 * xi0 + T::one() + eta0.abs();
    if th0.abs() <= lit::<T>(64.0) * T::eps() * scale {
        return Ok(T::FRAC_PI_2() - xi0.atan());
    }
    let (_, k0) = blowup_kappa(xi0, eta0)?;
    if k0 == T::zero() {
        return Ok(T::PI() - lit::<T>(2.0) * xi0.atan());
    }
    time_to_threshold(xi0, eta0, T::infinity(), tol)
}

/// Blowup time, cross-checked against the ODE escape time at `|ϑ| = 10⁶` (`|ξ| = 10⁶` on the
/// tangent branch). Disagreement beyond `10⁻⁴` relative signals a branch-selection error.
pub fn blowup_time<T: Real>(xi0: T, eta0: T, tol: T) -> Result<T> {
    let regime = classify(xi0, eta0)?;
    let t0 = match regime {
        Regime::ExplicitTan { t_blowup } | Regime::Blowup { t_blowup, .. } => t_blowup,
        other => {
            return Err(Error::InvalidArgument(format!(
                "{} regime has no blowup time",
                other.name()
            )))
        }
    };
    let opts = TraceOptions { tol, ..TraceOptions::default() };
    let threshold = opts.escape_threshold;
    let expected = match regime {
        Regime::ExplicitTan { .. } => threshold.atan() - xi0.atan(),
        _ => time_to_threshold(xi0, eta0, threshold, lit(1e-12))?,
    };
    let horizon = t0 * lit(1.5) + T::one();
    let traj = trace(T::zero(), xi0, eta0, horizon, &opts)?;
    let escape = traj.escape_time.ok_or(Error::BlowupTimeMismatch {
        quadrature: to_f64(t0),
        escape: f64::INFINITY,
    })?;
    if (escape - expected).abs() > lit::<T>(1e-4) * t0 {
        return Err(Error::BlowupTimeMismatch { quadrature: to_f64(t0), escape: to_f64(escape) });
    }
    Ok(t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separated::initial_from_kappa;
    use std::f64::consts::PI;

    /// `1/ϑ` solves `u'' + u = 1` with `(u')² = (1 − κ₀) − (u − 1)²`; blowup is the first zero of `u`.
    fn oscillator_blowup(xi0: f64, eta0: f64) -> f64 {
        let th0 = theta(xi0, eta0);
        let a = 1.0 / th0 - 1.0;
        let b = -xi0 / th0;
        // 1 + a cos t + b sin t = 0: scan then bisect.
        let u = |t: f64| 1.0 + a * t.cos() + b * t.sin();
        let mut t = 0.0;
        let dt = 1e-4;
        while u(t + dt).signum() == u(0.0).signum() {
            t += dt;
        }
        let (mut lo, mut hi) = (t, t + dt);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if u(mid).signum() == u(0.0).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn turning_points_solve_the_polynomial() {
        for &k in &[0.9, 0.5, 0.1, -0.5, -3.0] {
            let (a, b) = turning_points(k);
            let p = |s: f64| 2.0 * s - k * s * s - 1.0;
            assert!(p(a).abs() < 1e-14, "k={k}");
            assert!(p(b).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn explicit_period_values() {
        assert!((period_integral(0.75, 1e-10).unwrap() - PI).abs() < 1e-8);
        assert!((period_integral(0.5, 1e-10).unwrap() - PI).abs() < 1e-8);
        assert!((period_integral(1.0 - 1e-6, 1e-9).unwrap() - PI).abs() < 1e-6);
        assert!(period_integral(1.0, 1e-10).is_err());
        assert!(period_integral(-0.5, 1e-10).is_err());
    }

    #[test]
    fn closed_form_blowup_times() {
        assert!((blowup_time_quadrature(0.0, 1.0, 1e-12).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((blowup_time_quadrature(0.0, 0.5, 1e-12).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_oscillator_on_all_branches() {
        for &k in &[-0.5, -1.0, -3.0] {
            for &xi in &[0.8, -0.8, 0.0] {
                for &pos in &[true, false] {
                    let (x, e) = initial_from_kappa(k, xi, pos).unwrap();
                    let tq = blowup_time_quadrature(x, e, 1e-12).unwrap();
                    let to = oscillator_blowup(x, e);
                    assert!((tq - to).abs() < 1e-9, "k={k} xi={xi} pos={pos}: {tq} vs {to}");
                }
            }
        }
        // κ₀ = 0 through the generic quadrature path as well.
        let (x, e) = initial_from_kappa(0.0, 0.6, true).unwrap();
        let tq = time_to_threshold(x, e, f64::INFINITY, 1e-12).unwrap();
        assert!((tq - (PI - 2.0 * 0.6f64.atan())).abs() < 1e-9);
    }

    #[test]
    fn blowup_time_cross_check_passes() {
        let t = blowup_time(2.0, 4.0, 1e-10).unwrap();
        assert!((t - oscillator_blowup(2.0, 4.0)).abs() < 1e-9);
        assert!((blowup_time(0.0, 1.0, 1e-10).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((blowup_time(0.0, 0.5, 1e-10).unwrap() - PI).abs() < 1e-15);
        assert!(blowup_time(0.5, 0.25, 1e-10).is_err());
    }
}

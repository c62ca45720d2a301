//! Separated-variable solutions of the radial system.
//!
//! With `V = r(e^g − 1/2)` the radial system collapses to the third-order ODE for `g(t)`,
//! written as the planar system `ξ' = η`, `η' = ξ(3η − ξ² − 1)` for `ξ = g'`, `η = g''`.
//! The quantities `ϑ = ξ² + 1 − η` and `κ = (ξ² + 1 − 2η)/ϑ²` organize everything:
//! `κ` is a first integral, `1/ϑ` obeys the harmonic oscillator `u'' + u = 1`, and the sign
//! of `κ` separates periodic motion from finite-time blowup.

mod fields;
mod quadrature;
mod rates;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::{lit, Real};

pub use fields::{depth_bracket, reconstruct_fields, relative_vorticity};
pub use quadrature::{
    blowup_time, blowup_time_quadrature, period_integral, theta_bounds, time_to_threshold,
    turning_points,
};
pub use rates::{blowup_rates, power_fit, BlowupReport, PowerFit};
pub use trajectory::{
    g_theta_link, particle_path, trace, theta_extrema, SeparatedTrajectory, TraceOptions,
};

/// Reduced state `(g, ξ, η)` at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedState<T> {
    pub t: T,
    pub g: T,
    pub xi: T,
    pub eta: T,
}

impl<T: Real> SeparatedState<T> {
    pub fn new(t: T, g: T, xi: T, eta: T) -> Self {
        Self { t, g, xi, eta }
    }

    pub fn theta(&self) -> T {
        theta(self.xi, self.eta)
    }

    pub fn kappa(&self) -> Option<T> {
        kappa(self.xi, self.eta)
    }
}

/// `ϑ = ξ² + 1 − η`.
pub fn theta<T: Real>(xi: T, eta: T) -> T {
    xi * xi + T::one() - eta
}

/// `κ = (ξ² + 1 − 2η)/ϑ²`, or `None` on the `ϑ = 0` branch (explicit tangent solution).
pub fn kappa<T: Real>(xi: T, eta: T) -> Option<T> {
    let th = theta(xi, eta);
    if th == T::zero() {
        return None;
    }
    let k = kappa_from_theta(xi, th);
    debug_assert!(k <= T::one() + lit(1e-9), "kappa {k} exceeds 1");
    Some(k)
}

/// `κ` written through `(ξ, ϑ)`: `(2ϑ − ξ² − 1)/ϑ²`.
pub fn kappa_from_theta<T: Real>(xi: T, th: T) -> T {
    let two = lit::<T>(2.0);
    (two * th - xi * xi - T::one()) / (th * th)
}

/// `1 − κ = ((ϑ − 1)² + ξ²)/ϑ²`, evaluated without cancellation.
pub fn one_minus_kappa<T: Real>(xi: T, eta: T) -> Option<T> {
    let th = theta(xi, eta);
    if th == T::zero() {
        return None;
    }
    let d = xi * xi - eta; // ϑ − 1
    Some((d * d + xi * xi) / (th * th))
}

/// Qualitative behaviour of a separated solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum Regime<T> {
    /// `ξ = η = 0`: the steady state, `κ₀ = 1`.
    Equilibrium { kappa0: T },
    /// `κ₀ ∈ (0, 1)`: time-periodic with period `2π`.
    Periodic { kappa0: T, period: T },
    /// `ϑ ≡ 0`: `ξ = tan(t + C)`, blowing up at `π/2 − C`.
    ExplicitTan { t_blowup: T },
    /// `κ₀ ≤ 0`: finite-time blowup.
    Blowup { kappa0: T, t_blowup: T },
}

impl<T: Real> Regime<T> {
    pub fn kappa0(&self) -> Option<T> {
        match *self {
            Regime::Equilibrium { kappa0 } | Regime::Periodic { kappa0, .. } | Regime::Blowup { kappa0, .. } => {
                Some(kappa0)
            }
            Regime::ExplicitTan { .. } => None,
        }
    }

    pub fn t_blowup(&self) -> Option<T> {
        match *self {
            Regime::ExplicitTan { t_blowup } | Regime::Blowup { t_blowup, .. } => Some(t_blowup),
            _ => None,
        }
    }

    pub fn is_blowup(&self) -> bool {
        self.t_blowup().is_some()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Equilibrium { .. } => "Equilibrium",
            Regime::Periodic { .. } => "Periodic",
            Regime::ExplicitTan { .. } => "ExplicitTan",
            Regime::Blowup { .. } => "Blowup",
        }
    }
}

/// Relative size below which `1 − κ` or `ϑ` is treated as exactly zero.
fn degenerate_tol<T: Real>() -> T {
    lit::<T>(64.0) * T::eps()
}

/// Classifies initial data `(ξ₀, η₀)`; blowup times come from [`blowup_time_quadrature`].
pub fn classify<T: Real>(xi0: T, eta0: T) -> Result<Regime<T>> {
    let th = theta(xi0, eta0);
    let scale = xi0 * xi0 + T::one() + eta0.abs();
    if th.abs() <= degenerate_tol::<T>() * scale {
        return Ok(Regime::ExplicitTan { t_blowup: T::FRAC_PI_2() - xi0.atan() });
    }
    let gap = one_minus_kappa(xi0, eta0).expect("theta nonzero");
    if gap <= degenerate_tol::<T>() {
        return Ok(Regime::Equilibrium { kappa0: T::one() });
    }
    let k0 = kappa_from_theta(xi0, th);
    if k0 > T::zero() {
        Ok(Regime::Periodic { kappa0: k0, period: lit::<T>(2.0) * T::PI() })
    } else {
        Ok(Regime::Blowup { kappa0: k0, t_blowup: blowup_time_quadrature(xi0, eta0, lit(1e-12))? })
    }
}

/// Initial data with prescribed `κ₀ ≤ 1` and `ξ₀`, on the `ϑ₀ > 0` branch (`positive = true`)
/// or the `ϑ₀ < 0` branch (only available for `κ₀ < 0`).
///
/// Solves `ξ₀² + 1 = 2ϑ₀ − κ₀ϑ₀²` for `ϑ₀` and sets `η₀ = ϑ₀ − κ₀ϑ₀²`. Returns `None` when no real
/// root exists on the requested branch.
pub fn initial_from_kappa<T: Real>(kappa0: T, xi0: T, positive: bool) -> Option<(T, T)> {
    let one = T::one();
    let two = lit::<T>(2.0);
    let c = one + xi0 * xi0;
    let th = if kappa0 == T::zero() {
        if !positive {
            return None;
        }
        c / two
    } else {
        // κϑ² − 2ϑ + c = 0
        let disc = one - kappa0 * c;
        if disc < T::zero() {
            return None;
        }
        let sq = disc.sqrt();
        if kappa0 > T::zero() {
            if !positive {
                return None;
            }
            // smaller root c/(1 + √disc), cancellation-free
            c / (one + sq)
        } else if positive {
            c / (one + sq)
        } else {
            (one + sq) / kappa0
        }
    };
    Some((xi0, th - kappa0 * th * th))
}

/// Right-hand side of the reduced system in `(g, ξ, η)`.
pub fn rhs_g_xi_eta<T: Real>(y: &[T], out: &mut [T]) {
    let (xi, eta) = (y[1], y[2]);
    out[0] = xi;
    out[1] = eta;
    out[2] = xi * (lit::<T>(3.0) * eta - xi * xi - T::one());
}

/// Right-hand side in `(g, ξ, ϑ)`: `g' = ξ`, `ξ' = ξ² + 1 − ϑ`, `ϑ' = ξϑ`.
///
/// Equivalent to [`rhs_g_xi_eta`] through `η = ξ² + 1 − ϑ`, but `κ` stays well conditioned as
/// `ϑ` grows, which the `(g, ξ, η)` form loses to cancellation near blowup.
pub fn rhs_g_xi_theta<T: Real>(y: &[T], out: &mut [T]) {
    let (xi, th) = (y[1], y[2]);
    out[0] = xi;
    out[1] = xi * xi + T::one() - th;
    out[2] = xi * th;
}

#[cfg(test)]
mod tests {
    use super::{rhs_g_xi_eta, rhs_g_xi_theta, Regime};
    use std::f64::consts::PI;

    fn theta(xi: f64, eta: f64) -> f64 {
        super::theta(xi, eta)
    }
    fn kappa(xi: f64, eta: f64) -> Option<f64> {
        super::kappa(xi, eta)
    }
    fn classify(xi: f64, eta: f64) -> crate::Result<Regime<f64>> {
        super::classify(xi, eta)
    }
    fn initial_from_kappa(k: f64, xi: f64, positive: bool) -> Option<(f64, f64)> {
        super::initial_from_kappa(k, xi, positive)
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(0.0, 0.0), 1.0);
        assert_eq!(theta(0.0, 1.0), 0.0);
        assert_eq!(theta(2.0, 4.0), 1.0);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(0.0, 0.0), Some(1.0));
        assert_eq!(kappa(1.0, 1.0), Some(0.0));
        assert!((kappa(0.5, 0.25).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(kappa(0.0, 1.0), None);
        assert_eq!(kappa(0.0, 2.0), Some(-3.0));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.0, 0.0).unwrap(), Regime::Equilibrium { kappa0: 1.0 });
        match classify(0.0, 1.0).unwrap() {
            Regime::ExplicitTan { t_blowup } => assert!((t_blowup - PI / 2.0).abs() < 1e-15),
            r => panic!("unexpected {r:?}"),
        }
        match classify(0.0, 2.0).unwrap() {
            Regime::Blowup { kappa0, t_blowup } => {
                assert_eq!(kappa0, -3.0);
                assert!(t_blowup.is_finite() && t_blowup > 0.0);
            }
            r => panic!("unexpected {r:?}"),
        }
        match classify(0.5, 0.25).unwrap() {
            Regime::Periodic { kappa0, period } => {
                assert!((kappa0 - 0.75).abs() < 1e-15);
                assert!((period - 2.0 * PI).abs() < 1e-15);
            }
            r => panic!("unexpected {r:?}"),
        }
    }

    #[test]
    fn rhs_forms_agree_and_equilibrium_is_fixed() {
        let mut a = [0.0; 3];
        rhs_g_xi_eta(&[0.3, 0.0, 0.0], &mut a);
        assert_eq!(a, [0.0; 3]);
        let (xi, eta) = (0.7, -0.4);
        let mut b = [0.0; 3];
        rhs_g_xi_eta(&[0.0, xi, eta], &mut a);
        rhs_g_xi_theta(&[0.0, xi, theta(xi, eta)], &mut b);
        // η' from the ϑ form: η = ξ² + 1 − ϑ ⇒ η' = 2ξξ' − ϑ'
        let eta_dot = 2.0 * xi * b[1] - b[2];
        assert!((a[1] - b[1]).abs() < 1e-15);
        assert!((a[2] - eta_dot).abs() < 1e-14);
    }

    #[test]
    fn initial_from_kappa_round_trips() {
        for &k in &[0.25, 0.5, 0.75, 0.0, -0.5, -1.0, -3.0] {
            for &xi in &[0.0, 0.4, -1.3] {
                if let Some((x, e)) = initial_from_kappa(k, xi, true) {
                    assert!(theta(x, e) > 0.0);
                    assert!((kappa(x, e).unwrap() - k).abs() < 1e-12, "k={k} xi={xi}");
                }
                if k < 0.0 {
                    let (x, e) = initial_from_kappa(k, xi, false).unwrap();
                    assert!(theta(x, e) < 0.0);
                    assert!((kappa(x, e).unwrap() - k).abs() < 1e-12);
                }
            }
        }
        assert!(initial_from_kappa(0.5, 0.0, false).is_none());
    }
}

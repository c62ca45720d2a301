use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{bump, RadialState};
use crate::numerics::quad_adaptive;
use crate::scalar::{to_f64, Real};

const MU_INNER: f64 = 1.0 / 3.0;
const MU_OUTER: f64 = 4.0 / 3.0;
const MU_COLLAR: f64 = 1.0 / 6.0;

/// Description of the shipped cutoff, echoed into reports.
pub const CUTOFF_DESCRIPTION: &str = "mu = 1 on [1/3, 4/3], (1 - s^2)^4 ramps over collars of width 1/6";

/// Smooth cutoff `μ`: 1 on `[1/3, 4/3]`, `(1 − s²)⁴` ramps to 0 over collars of width 1/6.
pub fn cutoff_mu(r: f64) -> f64 {
    if r < MU_INNER {
        bump((MU_INNER - r) / MU_COLLAR)
    } else if r > MU_OUTER {
        bump((r - MU_OUTER) / MU_COLLAR)
    } else {
        1.0
    }
}

/// `dμ/dr`.
pub fn cutoff_mu_prime(r: f64) -> f64 {
    let ramp = |s: f64| {
        if s.abs() < 1.0 {
            let w = 1.0 - s * s;
            -8.0 * s * w * w * w
        } else {
            0.0
        }
    };
    if r < MU_INNER {
        -ramp((MU_INNER - r) / MU_COLLAR) / MU_COLLAR
    } else if r > MU_OUTER {
        ramp((r - MU_OUTER) / MU_COLLAR) / MU_COLLAR
    } else {
        0.0
    }
}

/// Weight `w(r, t; T) = e^{−r}(T − t)²μ(r)` for `t ≤ T`, zero afterwards.
pub fn weight(r: f64, t: f64, big_t: f64) -> f64 {
    if t > big_t {
        0.0
    } else {
        (-r).exp() * (big_t - t) * (big_t - t) * cutoff_mu(r)
    }
}

/// `a = σ(1 + e^{−(β̄−β̲)})/(1 − e^{−(β̄−β̲)})`, the bound on `φ′/φ` for support `[β̲, β̄]`.
pub fn weight_growth_constant(h_bar: f64, support: (f64, f64)) -> f64 {
    let e = (-(support.1 - support.0)).exp();
    h_bar.sqrt() * (1.0 + e) / (1.0 - e)
}

/// The monitored functionals of the weighted radial momentum at each requested `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Report {
    /// False when `U₀` is positive somewhere; the series are still filled in.
    pub applicable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inapplicable_reason: Option<String>,
    pub support: [f64; 2],
    pub sigma: f64,
    pub epsilon: f64,
    pub cutoff: String,
    pub u0_sup: f64,
    pub alpha: f64,
    pub nu: f64,
    /// `2/ν`; absent when `U₀ ≡ 0`.
    pub t_bar: Option<f64>,
    pub a: f64,
    /// Whether `A(T̄)` lies inside the plateau `[1/3, 4/3]` of the cutoff.
    pub window_inside_cutoff: bool,
    pub times: Vec<f64>,
    pub f_series: Vec<f64>,
    /// `F′(T)` by finite differences over `times`.
    pub f_prime: Vec<f64>,
    pub phi_series: Vec<f64>,
    pub varphi_series: Vec<f64>,
    /// `F/ϕ`.
    pub ratio_series: Vec<f64>,
    pub i1: Vec<f64>,
    pub i2: Vec<f64>,
    pub i3: Vec<f64>,
    /// `I ≤ 4αT²/5` per sample.
    pub claim_holds: Vec<bool>,
    /// `αT²/5 + (3/2)ϕ(F/ϕ)^{4/3}` per sample.
    pub riccati_rhs: Vec<f64>,
    /// `F′ ≥ riccati_rhs` per sample.
    pub riccati_holds: Vec<bool>,
}

impl Theorem2Report {
    pub fn all_riccati_hold(&self) -> bool {
        self.riccati_holds.iter().all(|&b| b)
    }
}

/// Length of `[a, b] ∩ [lo, hi]`.
fn overlap(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    (b.min(hi) - a.max(lo)).max(0.0)
}

/// Spatial integrands of one snapshot: `(∫_A hUe^{−r}μ, ∫_A hV²e^{−r}μ/r, ∫_A hVe^{−r}μ,
/// ∫_{ℝ⁺∖A}(h²/2 + hU²)e^{−r}μ′)`, cells weighted by their overlap with `A`.
fn slice_integrals<T: Real>(s: &RadialState<T>, window: (f64, f64)) -> [f64; 4] {
    let dr = to_f64(s.dr());
    let mut acc = [0.0; 4];
    for i in 0..s.len() {
        let r = to_f64(s.r_centers[i]);
        let (h, u, v) = (to_f64(s.h[i]), to_f64(s.u[i]), to_f64(s.v[i]));
        let inside = overlap(r - 0.5 * dr, r + 0.5 * dr, window.0, window.1);
        let outside = dr - inside;
        let e = (-r).exp();
        let mu = cutoff_mu(r);
        if inside > 0.0 {
            acc[0] += inside * h * u * e * mu;
            acc[1] += inside * h * v * v * e * mu / r;
            acc[2] += inside * h * v * e * mu;
        }
        if outside > 0.0 {
            acc[3] += outside * (0.5 * h * h + h * u * u) * e * cutoff_mu_prime(r);
        }
    }
    acc
}

/// `∫₀ᵀ (T − t)² g(t) dt` for `g` piecewise linear through `(times, values)`; Simpson per
/// segment, exact for the interpolant.
fn weighted_time_integral(times: &[f64], values: &[f64], big_t: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..times.len() - 1 {
        let (a, ga) = (times[k], values[k]);
        if a >= big_t {
            break;
        }
        let b_full = times[k + 1];
        let b = b_full.min(big_t);
        let lerp = |t: f64| ga + (values[k + 1] - ga) * (t - a) / (b_full - a);
        let m = 0.5 * (a + b);
        let f = |t: f64| (big_t - t) * (big_t - t) * lerp(t);
        sum += (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    }
    sum
}

/// Derivative at `at` of the parabola through three samples.
fn parabola_slope(x: [f64; 3], y: [f64; 3], at: f64) -> f64 {
    let l0 = ((at - x[1]) + (at - x[2])) / ((x[0] - x[1]) * (x[0] - x[2]));
    let l1 = ((at - x[0]) + (at - x[2])) / ((x[1] - x[0]) * (x[1] - x[2]));
    let l2 = ((at - x[0]) + (at - x[1])) / ((x[2] - x[0]) * (x[2] - x[1]));
    y[0] * l0 + y[1] * l1 + y[2] * l2
}

fn finite_difference(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 2 {
        let d = (y[1] - y[0]) / (x[1] - x[0]);
        return vec![d, d];
    }
    (0..n)
        .map(|k| {
            let c = k.clamp(1, n - 2);
            parabola_slope([x[c - 1], x[c], x[c + 1]], [y[c - 1], y[c], y[c + 1]], x[k])
        })
        .collect()
}

/// Evaluates the weighted-momentum functionals over stored snapshots (the first at `t = 0`) at
/// each `T` in `t_values`, for an initial perturbation supported in `support = [β̲, β̄]`.
pub fn theorem2_report<T: Real>(
    snapshots: &[RadialState<T>],
    t_values: &[f64],
    support: (f64, f64),
    epsilon: f64,
) -> Result<Theorem2Report> {
    let first = snapshots.first().ok_or_else(|| Error::InvalidArgument("no snapshots".into()))?;
    if to_f64(first.t) != 0.0 {
        return Err(Error::InvalidArgument("first snapshot must be the initial state".into()));
    }
    if !(support.0 > 0.0 && support.1 > support.0) {
        return Err(Error::InvalidArgument(format!("support [{}, {}] must satisfy 0 < lo < hi", support.0, support.1)));
    }
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1/3), got {epsilon}")));
    }
    let times: Vec<f64> = snapshots.iter().map(|s| to_f64(s.t)).collect();
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("snapshot times must be strictly increasing".into()));
    }
    let t_last = *times.last().expect("non-empty");
    if t_values.len() < 2
        || t_values.windows(2).any(|w| !(w[1] > w[0]))
        || !(t_values[0] > 0.0)
        || t_values[t_values.len() - 1] > t_last
    {
        return Err(Error::InvalidArgument(format!(
            "need at least two increasing T values in (0, {t_last}]"
        )));
    }

    let h_bar = to_f64(first.h_bar);
    let sigma = h_bar.sqrt();
    let window = |t: f64| ((support.0 - sigma * t).max(0.0), support.1 + sigma * t);

    let u0_sup = first.u.iter().fold(0.0f64, |m, &u| m.max(to_f64(u).abs()));
    let positive = first.u.iter().any(|&u| u > T::zero());
    let inapplicable_reason = positive.then(|| "U0 is positive somewhere on its support".to_string());

    let dr0 = to_f64(first.dr());
    let alpha = -(0..first.len())
        .map(|i| {
            let r = to_f64(first.r_centers[i]);
            dr0 * to_f64(first.h[i]) * to_f64(first.u[i]) * (-r).exp() * cutoff_mu(r)
        })
        .sum::<f64>();
    let nu = u0_sup.powf(1.0 / 3.0 - epsilon);
    let t_bar = (nu > 0.0).then(|| 2.0 / nu);
    let window_inside_cutoff = t_bar.is_some_and(|tb| {
        let (lo, hi) = window(tb);
        lo >= MU_INNER && hi <= MU_OUTER
    });

    let slices: Vec<[f64; 4]> = snapshots.iter().map(|s| slice_integrals(s, window(to_f64(s.t)))).collect();
    let column = |c: usize| -> Vec<f64> { slices.iter().map(|s| s[c]).collect() };
    let (g_f, g_i1, g_i2, g_i3) = (column(0), column(1), column(2), column(3));

    let phi = |t: f64| {
        let (lo, hi) = window(t);
        (-lo).exp() - (-hi).exp()
    };
    let mut f_series = Vec::new();
    let mut phi_series = Vec::new();
    let mut varphi_series = Vec::new();
    let (mut i1, mut i2, mut i3) = (Vec::new(), Vec::new(), Vec::new());
    for &big_t in t_values {
        f_series.push(-weighted_time_integral(&times, &g_f, big_t));
        i1.push(weighted_time_integral(&times, &g_i1, big_t));
        i2.push(weighted_time_integral(&times, &g_i2, big_t));
        i3.push(weighted_time_integral(&times, &g_i3, big_t));
        phi_series.push(phi(big_t));
        let q = quad_adaptive(|t: f64| (big_t - t) * (big_t - t) * phi(t), 0.0, big_t, 1e-13)?;
        varphi_series.push(q.value);
    }
    let f_prime = finite_difference(t_values, &f_series);
    let ratio_series: Vec<f64> = f_series.iter().zip(&varphi_series).map(|(f, v)| f / v).collect();
    let claim_holds = t_values
        .iter()
        .enumerate()
        .map(|(k, &big_t)| i1[k] + i2[k] + i3[k] <= 0.8 * alpha * big_t * big_t)
        .collect();
    let riccati_rhs: Vec<f64> = t_values
        .iter()
        .enumerate()
        .map(|(k, &big_t)| 0.2 * alpha * big_t * big_t + 1.5 * varphi_series[k] * ratio_series[k].abs().powf(4.0 / 3.0))
        .collect();
    let riccati_holds = f_prime.iter().zip(&riccati_rhs).map(|(d, r)| d >= r).collect();

    Ok(Theorem2Report {
        applicable: !positive,
        inapplicable_reason,
        support: [support.0, support.1],
        sigma,
        epsilon,
        cutoff: CUTOFF_DESCRIPTION.into(),
        u0_sup,
        alpha,
        nu,
        t_bar,
        a: weight_growth_constant(h_bar, support),
        window_inside_cutoff,
        times: t_values.to_vec(),
        f_series,
        f_prime,
        phi_series,
        varphi_series,
        ratio_series,
        i1,
        i2,
        i3,
        claim_holds,
        riccati_rhs,
        riccati_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RadialGrid;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff_mu(0.5), 1.0);
        assert_eq!(cutoff_mu(1.0 / 3.0), 1.0);
        assert_eq!(cutoff_mu(0.1), 0.0);
        assert_eq!(cutoff_mu(1.6), 0.0);
        assert!((0..200).all(|k| (0.0..=1.0).contains(&cutoff_mu(k as f64 * 0.01))));
        for r in [0.2, 0.25, 1.4, 1.45] {
            let d = (cutoff_mu(r + 1e-6) - cutoff_mu(r - 1e-6)) / 2e-6;
            assert!((d - cutoff_mu_prime(r)).abs() < 1e-5, "{r}");
        }
    }

    #[test]
    fn weight_vanishes_at_and_after_t() {
        for r in [0.3, 0.7, 1.2] {
            assert_eq!(weight(r, 0.4, 0.4), 0.0);
            assert_eq!(weight(r, 0.5, 0.4), 0.0);
        }
        assert!(weight(0.7, 0.1, 0.4) > 0.0);
    }

    #[test]
    fn growth_constant_for_unit_depth() {
        let e = (-0.5f64).exp();
        let a = weight_growth_constant(1.0, (0.5, 1.0));
        assert!((a - (1.0 + e) / (1.0 - e)).abs() < 1e-15);
        assert!((a - 4.083).abs() < 1e-3);
    }

    #[test]
    fn rest_data_is_degenerate() {
        let g = RadialGrid::new(0.0, 3.0, 300).unwrap();
        let snaps: Vec<RadialState<f64>> = (0..5)
            .map(|k| {
                let mut s = RadialState::rest(&g, 1.0);
                s.t = 0.1 * k as f64;
                s
            })
            .collect();
        let rep = theorem2_report(&snaps, &[0.1, 0.2, 0.3, 0.4], (0.5, 1.0), 0.05).unwrap();
        assert_eq!(rep.alpha, 0.0);
        assert!(rep.f_series.iter().all(|&f| f == 0.0));
        assert!(rep.i1.iter().chain(&rep.i2).all(|&x| x == 0.0));
        assert!(rep.t_bar.is_none());
        assert!(rep.applicable);
    }

    #[test]
    fn time_integral_matches_closed_form() {
        // g(t) = 1 + 2t is its own interpolant; ∫₀ᵀ (T − t)²(1 + 2t) dt = T³/3 + T⁴/6.
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
        let vals: Vec<f64> = times.iter().map(|t| 1.0 + 2.0 * t).collect();
        for big_t in [0.35f64, 0.8, 1.0] {
            let exact = big_t.powi(3) / 3.0 + big_t.powi(4) / 6.0;
            assert!((weighted_time_integral(&times, &vals, big_t) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn positive_velocity_marks_report_inapplicable() {
        let g = RadialGrid::new(0.0, 3.0, 300).unwrap();
        let mut a = RadialState::rest(&g, 1.0);
        a.u[80] = 0.1;
        let mut b = a.clone();
        b.t = 0.2;
        let rep = theorem2_report(&[a, b], &[0.1, 0.2], (0.5, 1.0), 0.05).unwrap();
        assert!(!rep.applicable && rep.inapplicable_reason.is_some());
    }
}

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::separated::{reconstruct_fields, SeparatedState};

use super::config::{perturbation_support, InitialData};
use super::state::{PlanarState, RadialGrid, RadialState};

/// Compactly supported polynomial bump `(1 − s²)⁴` on `|s| < 1`, zero outside.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let w = 1.0 - s * s;
        let w2 = w * w;
        w2 * w2
    } else {
        0.0
    }
}

/// Perturbation `(h − h̄, U, V)` of a radial profile at radius `r`.
fn radial_perturbation(initial: &InitialData, r: f64) -> Result<(f64, f64, f64)> {
    let p = |k: &str, d: f64| initial.param(k, d);
    Ok(match initial.profile.as_str() {
        "rest" => (0.0, 0.0, 0.0),
        "h_bump" => (p("amplitude", 0.0) * bump((r - p("center", 1.0)) / p("width", 0.5)), 0.0, 0.0),
        "bump" => {
            let b = bump((r - p("center", 1.0)) / p("width", 0.5));
            (p("h_amp", 0.0) * b, p("u_amp", 0.0) * b, p("v_amp", 0.0) * b)
        }
        "inward_bump" => {
            let (lo, hi) = (p("inner", 0.5), p("outer", 1.0));
            let b = bump((r - 0.5 * (lo + hi)) / (0.5 * (hi - lo)));
            (p("h_amp", 0.0) * b, -p("u_max", 0.0) * b, p("v_amp", 0.0) * b)
        }
        other => return Err(Error::InvalidArgument(format!("'{other}' is not a radial perturbation profile"))),
    })
}

/// Builds the initial radial state for a named profile on `grid`.
///
/// Profiles: `rest`; `h_bump` (depth bump); `bump` (bumps in all three fields); `inward_bump`
/// (`U₀ = −u_max·bump ≤ 0` on `[inner, outer]`); `separated_trace` (separated solution at
/// `t = 0`).
pub fn build_initial_radial<T: Real>(initial: &InitialData, grid: &RadialGrid<T>, h_bar: T) -> Result<RadialState<T>> {
    if !(h_bar > T::zero()) {
        return Err(Error::InvalidArgument(format!("h_bar must be positive, got {h_bar}")));
    }
    let mut state = RadialState::rest(grid, h_bar);
    if initial.profile == "separated_trace" {
        let s = SeparatedState::new(
            T::zero(),
            lit(initial.param("g0", 0.0)),
            lit(initial.param("xi0", 0.0)),
            lit(initial.param("eta0", 0.0)),
        );
        let (h, u, v) = reconstruct_fields(&s, &state.r_centers)?;
        state.h = h;
        state.u = u;
        state.v = v;
        state.audit()?;
        return Ok(state);
    }
    if let Some((lo, hi)) = perturbation_support(initial) {
        let dr = to_f64(grid.dr());
        if lo < to_f64(grid.r_min) + 2.0 * dr || hi > to_f64(grid.r_max) - 2.0 * dr {
            return Err(Error::InvalidArgument(format!(
                "perturbation support [{lo}, {hi}] touches the domain boundary"
            )));
        }
    }
    for i in 0..state.len() {
        let (dh, u, v) = radial_perturbation(initial, to_f64(state.r_centers[i]))?;
        state.h[i] = h_bar + lit(dh);
        state.u[i] = lit(u);
        state.v[i] = lit(v);
    }
    if let Some(i) = state.h.iter().position(|&h| h < T::zero()) {
        return Err(Error::InvalidArgument(format!("profile requests negative depth at cell {i}")));
    }
    state.audit()?;
    Ok(state)
}

/// Builds the initial planar state on `[−half_width, half_width]²`.
///
/// Radial profiles are embedded by rotational symmetry, `u = (Ux − Vy)/r`, `v = (Vx + Uy)/r`.
/// `offset_bump` is a non-radial bump centered at `(center_x, center_y)` carrying a uniform
/// velocity `(u_amp, v_amp)`, a solid-body swirl and a radial stretch, all multiplied by the bump.
pub fn build_initial_planar<T: Real>(
    initial: &InitialData,
    half_width: T,
    nx: usize,
    ny: usize,
    h_bar: T,
) -> Result<PlanarState<T>> {
    if !(h_bar > T::zero()) {
        return Err(Error::InvalidArgument(format!("h_bar must be positive, got {h_bar}")));
    }
    let mut state = PlanarState::rest(half_width, nx, ny, h_bar);
    let hb = to_f64(h_bar);
    let p = |k: &str, d: f64| initial.param(k, d);
    for j in 0..ny {
        let y = to_f64(state.y(j));
        for i in 0..nx {
            let x = to_f64(state.x(i));
            let (h, u, v) = if initial.profile == "offset_bump" {
                let (dx, dy) = (x - p("center_x", 0.0), y - p("center_y", 0.0));
                let b = bump(dx.hypot(dy) / p("width", 0.5));
                let (swirl, radial) = (p("swirl", 0.0), p("radial", 0.0));
                (
                    hb + p("h_amp", 0.0) * b,
                    b * (p("u_amp", 0.0) - swirl * dy + radial * dx),
                    b * (p("v_amp", 0.0) + swirl * dx + radial * dy),
                )
            } else {
                let r = x.hypot(y);
                let (dh, ur, vr) = radial_perturbation(initial, r)?;
                (hb + dh, (ur * x - vr * y) / r, (vr * x + ur * y) / r)
            };
            if h < 0.0 {
                return Err(Error::InvalidArgument(format!("profile requests negative depth at ({x}, {y})")));
            }
            let k = state.index(i, j);
            state.h[k] = lit(h);
            state.hu[k] = lit(h * u);
            state.hv[k] = lit(h * v);
        }
    }
    // The two outermost rings act as the far field.
    let ring = |i: usize, n: usize| i < 2 || i + 2 >= n;
    for j in 0..ny {
        for i in 0..nx {
            let k = state.index(i, j);
            if (ring(i, nx) || ring(j, ny)) && (state.h[k] != h_bar || state.hu[k] != T::zero() || state.hv[k] != T::zero()) {
                return Err(Error::InvalidArgument("perturbation support touches the far-field ring".into()));
            }
        }
    }
    state.audit()?;
    Ok(state)
}

use crate::error::{Error, Result};
use crate::flux::{face_flux, minmod, Prim};
use crate::model::{DetectionReason, FluxKind, RadialGrid, RadialState, SolverOptions};
use crate::numerics::ssp_step;
use crate::scalar::{lit, to_f64, Real};
use crate::separated::{reconstruct_fields, SeparatedTrajectory};

/// Discretization options of the radial solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialScheme<T> {
    pub flux: FluxKind,
    /// 1: piecewise constant; 2: minmod-limited linear reconstruction of `(h, U, V)`.
    pub order: u8,
    pub cfl: T,
    /// Detection thresholds on `max |∂h/∂r|`, `max |∂U/∂r|`, `max |∂V/∂r|`.
    pub gradient_threshold: [T; 3],
    pub dt_floor: T,
}

impl<T: Real> Default for RadialScheme<T> {
    fn default() -> Self {
        Self {
            flux: FluxKind::Hll,
            order: 2,
            cfl: lit(0.4),
            gradient_threshold: [T::infinity(); 3],
            dt_floor: lit(1e-9),
        }
    }
}

impl<T: Real> RadialScheme<T> {
    /// Scheme from solver options; gradient thresholds are set later from the initial state.
    pub fn from_options(opts: &SolverOptions) -> Self {
        Self {
            flux: opts.flux,
            order: opts.order,
            cfl: lit(opts.cfl),
            gradient_threshold: [opts.gradient_threshold.map_or(T::infinity(), lit); 3],
            dt_floor: lit(opts.dt_floor),
        }
    }
}

/// Exact boundary data `(h, U, V)` at time `t` and radii `r`.
pub trait TraceSource<T>: Sync {
    fn fields(&self, t: T, r: &[T]) -> Result<(Vec<T>, Vec<T>, Vec<T>)>;
}

/// Dirichlet data sampled from a separated trajectory.
pub struct SeparatedTrace<T> {
    pub trajectory: SeparatedTrajectory<T>,
}

impl<T: Real> TraceSource<T> for SeparatedTrace<T> {
    fn fields(&self, t: T, r: &[T]) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
        reconstruct_fields(&self.trajectory.state_at(t)?, r)
    }
}

/// Boundary treatment: reflection at the origin with a far-field rest state `(h̄, 0, 0)`
/// outside, or exact traces on both sides of an annulus.
#[derive(Clone, Copy)]
pub enum RadialBoundary<'a, T> {
    FarField,
    Dirichlet(&'a dyn TraceSource<T>),
}

/// Singularity detection raised by a step.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection<T> {
    pub reason: DetectionReason,
    pub quantity: &'static str,
    pub location: T,
    pub value: T,
}

/// Result of one step: the advanced state, or the detection that stopped it.
#[derive(Clone, Debug)]
pub enum StepOutcome<T> {
    Advanced {
        state: RadialState<T>,
        dt: T,
        /// Halvings forced by negative depth.
        retries: usize,
        max_gradient: [T; 3],
    },
    Detected(Detection<T>),
}

/// Precomputed geometry and boundary handling for one grid.
pub(crate) struct Stepper<'a, T> {
    pub scheme: RadialScheme<T>,
    boundary: RadialBoundary<'a, T>,
    pub n: usize,
    pub dr: T,
    r_min: T,
    pub centers: Vec<T>,
    faces: Vec<T>,
    area: Vec<T>,
    h_bar: T,
    tiny: T,
}

/// Primitive fields with two ghost cells on each side.
pub(crate) struct Extended<T> {
    pub h: Vec<T>,
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(grid: &RadialGrid<T>, h_bar: T, scheme: RadialScheme<T>, boundary: RadialBoundary<'a, T>) -> Result<Self> {
        if matches!(boundary, RadialBoundary::FarField) && grid.r_min != T::zero() {
            return Err(Error::InvalidArgument("far-field boundary needs a grid starting at r = 0".into()));
        }
        if scheme.order != 1 && scheme.order != 2 {
            return Err(Error::InvalidArgument(format!("order must be 1 or 2, got {}", scheme.order)));
        }
        if !(scheme.cfl > T::zero() && scheme.cfl <= T::one()) {
            return Err(Error::InvalidArgument(format!("cfl must lie in (0, 1], got {}", scheme.cfl)));
        }
        let n = grid.cells;
        let dr = grid.dr();
        let centers = grid.centers();
        let faces: Vec<T> = (0..=n).map(|i| grid.face(i)).collect();
        let area = centers.iter().map(|&r| r * dr).collect();
        Ok(Self {
            scheme,
            boundary,
            n,
            dr,
            r_min: grid.r_min,
            centers,
            faces,
            area,
            h_bar,
            tiny: h_bar * lit(1e-12),
        })
    }

    /// Primitives with ghosts from conservative `(h, hU, hV)` at time `t`.
    pub fn extend(&self, t: T, h: &[T], m: &[T], w: &[T]) -> Result<Extended<T>> {
        let n = self.n;
        let mut e = Extended { h: vec![T::zero(); n + 4], u: vec![T::zero(); n + 4], v: vec![T::zero(); n + 4] };
        for i in 0..n {
            e.h[i + 2] = h[i];
            if h[i] > self.tiny {
                e.u[i + 2] = m[i] / h[i];
                e.v[i + 2] = w[i] / h[i];
            }
        }
        match self.boundary {
            RadialBoundary::FarField => {
                for k in 0..2 {
                    e.h[1 - k] = e.h[2 + k];
                    e.u[1 - k] = -e.u[2 + k];
                    e.v[1 - k] = -e.v[2 + k];
                    e.h[n + 2 + k] = self.h_bar;
                    e.u[n + 2 + k] = T::zero();
                    e.v[n + 2 + k] = T::zero();
                }
            }
            RadialBoundary::Dirichlet(src) => {
                let half = lit::<T>(0.5);
                let dr = self.dr;
                let r_max = self.faces[n];
                let radii = [
                    self.r_min - half * dr,
                    self.r_min - lit::<T>(1.5) * dr,
                    r_max + half * dr,
                    r_max + lit::<T>(1.5) * dr,
                ];
                let (gh, gu, gv) = src.fields(t, &radii)?;
                for (slot, k) in [(1, 0), (0, 1), (n + 2, 2), (n + 3, 3)] {
                    e.h[slot] = gh[k];
                    e.u[slot] = gu[k];
                    e.v[slot] = gv[k];
                }
            }
        }
        Ok(e)
    }

    /// Semi-discrete rate of `y = [h, hU, hV, X₁…X_p]` at time `t`.
    pub fn rate(&self, t: T, y: &[T], out: &mut [T]) -> Result<()> {
        let n = self.n;
        let (h, rest) = y.split_at(n);
        let (m, rest) = rest.split_at(n);
        let (w, paths) = rest.split_at(n);
        let e = self.extend(t, h, m, w)?;

        let half = lit::<T>(0.5);
        let mut sh = vec![T::zero(); n + 4];
        let mut su = vec![T::zero(); n + 4];
        let mut sv = vec![T::zero(); n + 4];
        if self.scheme.order == 2 {
            for k in 1..n + 3 {
                sh[k] = minmod(e.h[k] - e.h[k - 1], e.h[k + 1] - e.h[k]);
                su[k] = minmod(e.u[k] - e.u[k - 1], e.u[k + 1] - e.u[k]);
                sv[k] = minmod(e.v[k] - e.v[k - 1], e.v[k + 1] - e.v[k]);
            }
        }
        let flux: Vec<[T; 3]> = (0..=n)
            .map(|f| {
                let (a, b) = (f + 1, f + 2);
                let left = Prim { h: e.h[a] + half * sh[a], un: e.u[a] + half * su[a], ut: e.v[a] + half * sv[a] };
                let right = Prim { h: e.h[b] - half * sh[b], un: e.u[b] - half * su[b], ut: e.v[b] - half * sv[b] };
                face_flux(self.scheme.flux, left, right)
            })
            .collect();

        let (oh, rest) = out.split_at_mut(n);
        let (om, rest) = rest.split_at_mut(n);
        let (ow, ox) = rest.split_at_mut(n);
        let two = lit::<T>(2.0);
        for i in 0..n {
            let r = self.centers[i];
            let (u, v) = (e.u[i + 2], e.v[i + 2]);
            oh[i] = -(self.faces[i + 1] * flux[i + 1][0] - self.faces[i] * flux[i][0]) / self.area[i];
            let src_m = -m[i] * u / r + h[i] * v + w[i] * v / r;
            let src_w = -two * m[i] * v / r - m[i];
            om[i] = -(flux[i + 1][1] - flux[i][1]) / self.dr + src_m;
            ow[i] = -(flux[i + 1][2] - flux[i][2]) / self.dr + src_w;
        }
        for (k, &x) in paths.iter().enumerate() {
            ox[k] = self.interpolate(&e.u, x).ok_or(Error::PathExitedDomain { label: k as f64, position: to_f64(x) })?;
        }
        Ok(())
    }

    /// Linear interpolation of an extended field at radius `x`; `None` outside the ghost span or
    /// at or below the origin.
    pub fn interpolate(&self, field: &[T], x: T) -> Option<T> {
        if !(x > T::zero()) || !x.is_finite() {
            return None;
        }
        let s = (x - self.r_min) / self.dr - lit(0.5) + lit(2.0);
        if s < T::zero() || s > lit((self.n + 3) as f64) {
            return None;
        }
        let i = s.floor().to_usize()?.min(self.n + 2);
        let frac = s - lit(i as f64);
        Some(field[i] + frac * (field[i + 1] - field[i]))
    }

    pub fn max_speed(&self, y: &[T]) -> T {
        let n = self.n;
        let mut a = self.h_bar.sqrt();
        for i in 0..n {
            let h = y[i];
            let u = if h > self.tiny { (y[n + i] / h).abs() } else { T::zero() };
            a = a.max(u + h.max(T::zero()).sqrt());
        }
        a
    }

    /// Largest one-sided difference quotients of `(h, U, V)` between neighboring cells, with the
    /// radius where each occurs.
    pub fn gradients(&self, y: &[T]) -> ([T; 3], [T; 3]) {
        let n = self.n;
        let prim = |i: usize| {
            let h = y[i];
            if h > self.tiny {
                [h, y[n + i] / h, y[2 * n + i] / h]
            } else {
                [h, T::zero(), T::zero()]
            }
        };
        let mut best = [T::zero(); 3];
        let mut at = [self.centers[0]; 3];
        let mut prev = prim(0);
        for i in 1..n {
            let cur = prim(i);
            for k in 0..3 {
                let g = (cur[k] - prev[k]).abs() / self.dr;
                if g > best[k] || !g.is_finite() {
                    best[k] = g;
                    at[k] = lit::<T>(0.5) * (self.centers[i] + self.centers[i - 1]);
                }
            }
            prev = cur;
        }
        (best, at)
    }

    /// One SSP step of `y` from `t` with `dt ≤ dt_max`, halving on negative depth.
    pub fn advance(&self, t: T, y: &[T], dt_max: T) -> Result<AdvanceOutcome<T>> {
        let n = self.n;
        let cfl_dt = self.scheme.cfl * self.dr / self.max_speed(y);
        if !cfl_dt.is_finite() {
            return Ok(AdvanceOutcome::Detected(self.non_finite(y)));
        }
        if cfl_dt < self.scheme.dt_floor {
            return Ok(AdvanceOutcome::Detected(Detection {
                reason: DetectionReason::DtFloor,
                quantity: "dt",
                location: self.fastest(y),
                value: cfl_dt,
            }));
        }
        let mut dt = cfl_dt.min(dt_max);
        let mut retries = 0;
        loop {
            let next = ssp_step(|s, u: &[T], k: &mut [T]| self.rate(s, u, k), t, y, dt)?;
            if next.iter().any(|x| !x.is_finite()) {
                return Ok(AdvanceOutcome::Detected(self.non_finite(&next)));
            }
            if next[..n].iter().all(|&h| h >= T::zero()) {
                let (g, at) = self.gradients(&next);
                for k in 0..3 {
                    if g[k] > self.scheme.gradient_threshold[k] {
                        return Ok(AdvanceOutcome::Detected(Detection {
                            reason: DetectionReason::Gradient,
                            quantity: ["h", "u", "v"][k],
                            location: at[k],
                            value: g[k],
                        }));
                    }
                }
                return Ok(AdvanceOutcome::Advanced { y: next, dt, retries, max_gradient: g });
            }
            dt = dt * lit(0.5);
            retries += 1;
            if dt < self.scheme.dt_floor {
                return Ok(AdvanceOutcome::Detected(Detection {
                    reason: DetectionReason::DtFloor,
                    quantity: "dt",
                    location: self.fastest(y),
                    value: dt,
                }));
            }
        }
    }

    fn fastest(&self, y: &[T]) -> T {
        let n = self.n;
        let mut best = (T::zero(), self.centers[0]);
        for i in 0..n {
            let h = y[i].max(T::zero());
            let u = if h > self.tiny { (y[n + i] / h).abs() } else { T::zero() };
            if u + h.sqrt() > best.0 {
                best = (u + h.sqrt(), self.centers[i]);
            }
        }
        best.1
    }

    fn non_finite(&self, y: &[T]) -> Detection<T> {
        let n = self.n;
        let k = y[..3 * n].iter().position(|x| !x.is_finite()).unwrap_or(0);
        Detection {
            reason: DetectionReason::NonFinite,
            quantity: ["h", "u", "v"][k / n],
            location: self.centers[k % n],
            value: y[k],
        }
    }
}

pub(crate) enum AdvanceOutcome<T> {
    Advanced { y: Vec<T>, dt: T, retries: usize, max_gradient: [T; 3] },
    Detected(Detection<T>),
}

pub(crate) fn pack<T: Real>(s: &RadialState<T>) -> Vec<T> {
    let mut y = s.h.clone();
    y.extend(s.h.iter().zip(&s.u).map(|(&h, &u)| h * u));
    y.extend(s.h.iter().zip(&s.v).map(|(&h, &v)| h * v));
    y
}

pub(crate) fn unpack<T: Real>(template: &RadialState<T>, y: &[T], t: T, tiny: T) -> RadialState<T> {
    let n = template.len();
    let mut s = template.clone();
    s.t = t;
    for i in 0..n {
        let h = y[i];
        s.h[i] = h;
        if h > tiny {
            s.u[i] = y[n + i] / h;
            s.v[i] = y[2 * n + i] / h;
        } else {
            s.u[i] = T::zero();
            s.v[i] = T::zero();
        }
    }
    s
}

/// Advances `state` by one SSP step of size at most `dt_max` (CFL-limited).
///
/// Non-finite values, a step below the floor and gradients above the scheme thresholds are
/// returned as [`StepOutcome::Detected`].
pub fn step<T: Real>(
    state: &RadialState<T>,
    scheme: &RadialScheme<T>,
    boundary: RadialBoundary<'_, T>,
    dt_max: T,
) -> Result<StepOutcome<T>> {
    state.audit()?;
    let stepper = Stepper::new(&state.grid(), state.h_bar, *scheme, boundary)?;
    let y = pack(state);
    Ok(match stepper.advance(state.t, &y, dt_max)? {
        AdvanceOutcome::Advanced { y, dt, retries, max_gradient } => StepOutcome::Advanced {
            state: unpack(state, &y, state.t + dt, stepper.tiny),
            dt,
            retries,
            max_gradient,
        },
        AdvanceOutcome::Detected(d) => StepOutcome::Detected(d),
    })
}

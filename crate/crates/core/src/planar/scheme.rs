use crate::error::{Error, Result};
use crate::flux::{face_flux, minmod, Prim};
use crate::model::{DetectionReason, PlanarState};
use crate::numerics::ssp_step;
use crate::radial::{Detection, RadialScheme};
use crate::scalar::{lit, Real};

/// Treatment of the cells outside the square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanarBoundary {
    /// Ghost cells held at `(h̄, 0, 0)`.
    FarField,
    /// Opposite edges identified.
    Periodic,
}

/// Result of one planar step.
#[derive(Clone, Debug)]
pub enum PlanarOutcome<T> {
    Advanced { state: PlanarState<T>, dt: T, retries: usize, max_gradient: [T; 3] },
    Detected(Detection<T>),
}

const G: usize = 2;

pub(crate) struct PlanarStepper<T> {
    pub scheme: RadialScheme<T>,
    boundary: PlanarBoundary,
    pub nx: usize,
    pub ny: usize,
    dx: T,
    dy: T,
    x0: T,
    y0: T,
    h_bar: T,
    pub tiny: T,
}

/// Primitive fields on the grid padded by two ghost layers, row-major.
struct Padded<T> {
    w: usize,
    h: Vec<T>,
    u: Vec<T>,
    v: Vec<T>,
}

impl<T: Real> PlanarStepper<T> {
    pub fn new(state: &PlanarState<T>, scheme: RadialScheme<T>, boundary: PlanarBoundary) -> Result<Self> {
        if scheme.order != 1 && scheme.order != 2 {
            return Err(Error::InvalidArgument(format!("order must be 1 or 2, got {}", scheme.order)));
        }
        if !(scheme.cfl > T::zero() && scheme.cfl <= T::one()) {
            return Err(Error::InvalidArgument(format!("cfl must lie in (0, 1], got {}", scheme.cfl)));
        }
        Ok(Self {
            scheme,
            boundary,
            nx: state.nx,
            ny: state.ny,
            dx: state.dx,
            dy: state.dy,
            x0: state.x0,
            y0: state.y0,
            h_bar: state.h_bar,
            tiny: state.h_bar * lit(1e-12),
        })
    }

    fn radius(&self, i: usize, j: usize) -> T {
        let half = lit::<T>(0.5);
        let x = self.x0 + (lit::<T>(i as f64) + half) * self.dx;
        let y = self.y0 + (lit::<T>(j as f64) + half) * self.dy;
        x.hypot(y)
    }

    fn pad(&self, y: &[T]) -> Padded<T> {
        let (nx, ny) = (self.nx, self.ny);
        let n = nx * ny;
        let w = nx + 2 * G;
        let hgt = ny + 2 * G;
        let mut p = Padded { w, h: vec![self.h_bar; w * hgt], u: vec![T::zero(); w * hgt], v: vec![T::zero(); w * hgt] };
        for pj in 0..hgt {
            for pi in 0..w {
                let src = match self.boundary {
                    PlanarBoundary::Periodic => {
                        Some(((pj + ny - G) % ny) * nx + (pi + nx - G) % nx)
                    }
                    PlanarBoundary::FarField => {
                        let inside = pi >= G && pi < nx + G && pj >= G && pj < ny + G;
                        inside.then(|| (pj - G) * nx + (pi - G))
                    }
                };
                if let Some(k) = src {
                    let h = y[k];
                    let q = pj * w + pi;
                    p.h[q] = h;
                    if h > self.tiny {
                        p.u[q] = y[n + k] / h;
                        p.v[q] = y[2 * n + k] / h;
                    }
                }
            }
        }
        p
    }

    /// Face fluxes along one direction. `stride` steps to the next cell along the normal;
    /// `normal_is_u` selects which velocity is normal to the face.
    fn sweep(&self, p: &Padded<T>, stride: usize, normal_is_u: bool) -> Vec<[T; 3]> {
        let (nx, ny, w) = (self.nx, self.ny, p.w);
        let half = lit::<T>(0.5);
        let second = self.scheme.order == 2;
        let prim = |q: usize| -> Prim<T> {
            let (un, ut) = if normal_is_u { (p.u[q], p.v[q]) } else { (p.v[q], p.u[q]) };
            Prim { h: p.h[q], un, ut }
        };
        let slope = |q: usize| -> Prim<T> {
            if !second {
                return Prim { h: T::zero(), un: T::zero(), ut: T::zero() };
            }
            let (a, b, c) = (prim(q - stride), prim(q), prim(q + stride));
            Prim { h: minmod(b.h - a.h, c.h - b.h), un: minmod(b.un - a.un, c.un - b.un), ut: minmod(b.ut - a.ut, c.ut - b.ut) }
        };
        let face = |ql: usize| -> [T; 3] {
            let qr = ql + stride;
            let (l, sl, r, sr) = (prim(ql), slope(ql), prim(qr), slope(qr));
            let left = Prim { h: l.h + half * sl.h, un: l.un + half * sl.un, ut: l.ut + half * sl.ut };
            let right = Prim { h: r.h - half * sr.h, un: r.un - half * sr.un, ut: r.ut - half * sr.ut };
            face_flux(self.scheme.flux, left, right)
        };
        // Faces are indexed by the cell to their low side, from one ghost before the first
        // interior cell to the last interior cell.
        let mut out = Vec::with_capacity((nx + 1) * ny);
        if normal_is_u {
            for j in 0..ny {
                for i in 0..=nx {
                    out.push(face((j + G) * w + (i + G - 1)));
                }
            }
        } else {
            for j in 0..=ny {
                for i in 0..nx {
                    out.push(face((j + G - 1) * w + (i + G)));
                }
            }
        }
        out
    }

    /// Semi-discrete rate of `y = [h, hu, hv]`.
    pub fn rate(&self, y: &[T], out: &mut [T]) {
        let (nx, ny) = (self.nx, self.ny);
        let n = nx * ny;
        let p = self.pad(y);
        let fx = self.sweep(&p, 1, true);
        let fy = self.sweep(&p, p.w, false);
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let (xl, xr) = (fx[j * (nx + 1) + i], fx[j * (nx + 1) + i + 1]);
                let (yl, yr) = (fy[j * nx + i], fy[(j + 1) * nx + i]);
                let dh_x = (xr[0] - xl[0]) / self.dx;
                let dh_y = (yr[0] - yl[0]) / self.dy;
                // x-faces carry (h·u, h·u² + h²/2, h·u·v); y-faces carry (h·v, h·v² + h²/2, h·u·v).
                let du_x = (xr[1] - xl[1]) / self.dx;
                let du_y = (yr[2] - yl[2]) / self.dy;
                let dv_x = (xr[2] - xl[2]) / self.dx;
                let dv_y = (yr[1] - yl[1]) / self.dy;
                out[k] = -(dh_x + dh_y);
                out[n + k] = -(du_x + du_y) + y[2 * n + k];
                out[2 * n + k] = -(dv_x + dv_y) - y[n + k];
            }
        }
    }

    fn cfl_dt(&self, y: &[T]) -> T {
        let n = self.nx * self.ny;
        let c0 = self.h_bar.sqrt();
        let mut worst = c0 / self.dx + c0 / self.dy;
        for k in 0..n {
            let h = y[k].max(T::zero());
            let c = h.sqrt();
            let (u, v) = if h > self.tiny { (y[n + k] / h, y[2 * n + k] / h) } else { (T::zero(), T::zero()) };
            let s = (u.abs() + c) / self.dx + (v.abs() + c) / self.dy;
            if !s.is_finite() {
                return T::nan();
            }
            worst = worst.max(s);
        }
        self.scheme.cfl / worst
    }

    /// Largest one-sided difference quotients of `(h, u, v)` along either axis, with the
    /// distance from the origin where each occurs.
    pub fn gradients(&self, y: &[T]) -> ([T; 3], [T; 3]) {
        let (nx, ny) = (self.nx, self.ny);
        let n = nx * ny;
        let prim = |k: usize| {
            let h = y[k];
            if h > self.tiny {
                [h, y[n + k] / h, y[2 * n + k] / h]
            } else {
                [h, T::zero(), T::zero()]
            }
        };
        let mut best = [T::zero(); 3];
        let mut at = [T::zero(); 3];
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let here = prim(k);
                for (nb, d) in [(i + 1 < nx).then(|| k + 1).map(|q| (q, self.dx)), (j + 1 < ny).then(|| k + nx).map(|q| (q, self.dy))]
                    .into_iter()
                    .flatten()
                {
                    let there = prim(nb);
                    for c in 0..3 {
                        let g = (there[c] - here[c]).abs() / d;
                        if g > best[c] || !g.is_finite() {
                            best[c] = g;
                            at[c] = self.radius(i, j);
                        }
                    }
                }
            }
        }
        (best, at)
    }

    fn non_finite(&self, y: &[T]) -> Detection<T> {
        let n = self.nx * self.ny;
        let k = y.iter().position(|x| !x.is_finite()).unwrap_or(0);
        let cell = k % n;
        Detection {
            reason: DetectionReason::NonFinite,
            quantity: ["h", "u", "v"][k / n],
            location: self.radius(cell % self.nx, cell / self.nx),
            value: y[k],
        }
    }

    pub fn advance(&self, y: &[T], dt_max: T) -> Result<PlanarAdvance<T>> {
        let n = self.nx * self.ny;
        let cfl_dt = self.cfl_dt(y);
        if !cfl_dt.is_finite() {
            return Ok(PlanarAdvance::Detected(self.non_finite(y)));
        }
        let floor = |dt: T| Detection { reason: DetectionReason::DtFloor, quantity: "dt", location: T::zero(), value: dt };
        if cfl_dt < self.scheme.dt_floor {
            return Ok(PlanarAdvance::Detected(floor(cfl_dt)));
        }
        let mut dt = cfl_dt.min(dt_max);
        let mut retries = 0;
        loop {
            let next = ssp_step(
                |_, u: &[T], k: &mut [T]| -> Result<()> {
                    self.rate(u, k);
                    Ok(())
                },
                T::zero(),
                y,
                dt,
            )?;
            if next.iter().any(|x| !x.is_finite()) {
                return Ok(PlanarAdvance::Detected(self.non_finite(&next)));
            }
            if next[..n].iter().all(|&h| h >= T::zero()) {
                let (g, at) = self.gradients(&next);
                for c in 0..3 {
                    if g[c] > self.scheme.gradient_threshold[c] {
                        return Ok(PlanarAdvance::Detected(Detection {
                            reason: DetectionReason::Gradient,
                            quantity: ["h", "u", "v"][c],
                            location: at[c],
                            value: g[c],
                        }));
                    }
                }
                return Ok(PlanarAdvance::Advanced { y: next, dt, retries, max_gradient: g });
            }
            dt = dt * lit(0.5);
            retries += 1;
            if dt < self.scheme.dt_floor {
                return Ok(PlanarAdvance::Detected(floor(dt)));
            }
        }
    }
}

pub(crate) enum PlanarAdvance<T> {
    Advanced { y: Vec<T>, dt: T, retries: usize, max_gradient: [T; 3] },
    Detected(Detection<T>),
}

pub(crate) fn pack<T: Real>(s: &PlanarState<T>) -> Vec<T> {
    let mut y = s.h.clone();
    y.extend_from_slice(&s.hu);
    y.extend_from_slice(&s.hv);
    y
}

pub(crate) fn unpack<T: Real>(template: &PlanarState<T>, y: &[T], t: T) -> PlanarState<T> {
    let n = template.nx * template.ny;
    let mut s = template.clone();
    s.h.copy_from_slice(&y[..n]);
    s.hu.copy_from_slice(&y[n..2 * n]);
    s.hv.copy_from_slice(&y[2 * n..3 * n]);
    s.t = t;
    s
}

/// Advances `state` by one SSP step of size at most `dt_max`, with time step
/// `cfl / max((|u| + √h)/dx + (|v| + √h)/dy)`.
pub fn step2d<T: Real>(
    state: &PlanarState<T>,
    scheme: &RadialScheme<T>,
    boundary: PlanarBoundary,
    dt_max: T,
) -> Result<PlanarOutcome<T>> {
    state.audit()?;
    let stepper = PlanarStepper::new(state, *scheme, boundary)?;
    Ok(match stepper.advance(&pack(state), dt_max)? {
        PlanarAdvance::Advanced { y, dt, retries, max_gradient } => {
            PlanarOutcome::Advanced { state: unpack(state, &y, state.t + dt), dt, retries, max_gradient }
        }
        PlanarAdvance::Detected(d) => PlanarOutcome::Detected(d),
    })
}

/// Rotates a state on a centered square grid by 90° counterclockwise: the field at `x` becomes
/// the old field at `R⁻¹x`, with momentum `(hu, hv)` rotated to `(−hv, hu)`.
pub fn rotate_quarter<T: Real>(s: &PlanarState<T>) -> Result<PlanarState<T>> {
    if s.nx != s.ny || s.dx != s.dy || s.x0 != s.y0 || s.x0 + lit::<T>(s.nx as f64) * s.dx != -s.x0 {
        return Err(Error::InvalidArgument("quarter rotation needs a centered square grid".into()));
    }
    let n = s.nx;
    let mut out = s.clone();
    for j in 0..n {
        for i in 0..n {
            let new = s.index(i, j);
            let old = s.index(j, n - 1 - i);
            out.h[new] = s.h[old];
            out.hu[new] = -s.hv[old];
            out.hv[new] = s.hu[old];
        }
    }
    Ok(out)
}

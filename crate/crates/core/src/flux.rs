//! One-dimensional shallow-water face fluxes with a passively advected transverse velocity,
//! shared by the radial and planar solvers.

use crate::model::FluxKind;
use crate::scalar::{lit, Real};

/// Primitive face state: depth, normal velocity, transverse velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prim<T> {
    pub h: T,
    pub un: T,
    pub ut: T,
}

impl<T: Real> Prim<T> {
    #[inline]
    fn conserved(&self) -> [T; 3] {
        [self.h, self.h * self.un, self.h * self.ut]
    }

    #[inline]
    fn physical_flux(&self) -> [T; 3] {
        let q = self.h * self.un;
        [q, q * self.un + lit::<T>(0.5) * self.h * self.h, q * self.ut]
    }

    #[inline]
    pub fn sound(&self) -> T {
        self.h.max(T::zero()).sqrt()
    }
}

/// `(U − √h, U, U + √h)`, or `None` for negative depth.
pub fn characteristic_speeds<T: Real>(h: T, u: T) -> Option<(T, T, T)> {
    if h < T::zero() {
        return None;
    }
    let c = h.sqrt();
    Some((u - c, u, u + c))
}

/// Numerical flux of `(h, h·un, h·un·ut)` between `left` and `right`.
#[inline]
pub fn face_flux<T: Real>(kind: FluxKind, left: Prim<T>, right: Prim<T>) -> [T; 3] {
    let (cl, cr) = (left.sound(), right.sound());
    let fl = left.physical_flux();
    let fr = right.physical_flux();
    let ql = left.conserved();
    let qr = right.conserved();
    let half = lit::<T>(0.5);
    match kind {
        FluxKind::Rusanov => {
            let a = (left.un.abs() + cl).max(right.un.abs() + cr);
            [0, 1, 2].map(|k| half * (fl[k] + fr[k]) - half * a * (qr[k] - ql[k]))
        }
        FluxKind::Hll => {
            let sl = (left.un - cl).min(right.un - cr);
            let sr = (left.un + cl).max(right.un + cr);
            if sl >= T::zero() {
                fl
            } else if sr <= T::zero() {
                fr
            } else {
                let inv = T::one() / (sr - sl);
                [0, 1, 2].map(|k| (sr * fl[k] - sl * fr[k] + sl * sr * (qr[k] - ql[k])) * inv)
            }
        }
    }
}

/// Minmod limiter of two one-sided differences.
#[inline]
pub fn minmod<T: Real>(a: T, b: T) -> T {
    if a * b <= T::zero() {
        T::zero()
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

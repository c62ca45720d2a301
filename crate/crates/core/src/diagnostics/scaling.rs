use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PlanarState, RadialState};
use crate::scalar::Real;

/// The two one-parameter families of rescaled data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKind {
    /// `(h/λ, λu, λv)`, with the far-field depth scaled to `h̄/λ`.
    Amplitude,
    /// `(λ²h(·/λ), λu(·/λ), λv(·/λ))`, an exact symmetry of the equations.
    Similarity,
}

/// States that can be mapped along a scaling family.
pub trait ScaleFamily: Sized {
    fn scaled(&self, lambda: f64, kind: ScaleKind) -> Self;
}

impl<T: Real> ScaleFamily for RadialState<T> {
    fn scaled(&self, lambda: f64, kind: ScaleKind) -> Self {
        let l = T::from(lambda).expect("finite lambda");
        let mut out = self.clone();
        match kind {
            ScaleKind::Amplitude => {
                out.h.iter_mut().for_each(|h| *h = *h / l);
                out.h_bar = self.h_bar / l;
                out.u.iter_mut().for_each(|u| *u = *u * l);
                out.v.iter_mut().for_each(|v| *v = *v * l);
            }
            ScaleKind::Similarity => {
                out.r_centers.iter_mut().for_each(|r| *r = *r * l);
                out.h.iter_mut().for_each(|h| *h = *h * l * l);
                out.h_bar = self.h_bar * l * l;
                out.u.iter_mut().for_each(|u| *u = *u * l);
                out.v.iter_mut().for_each(|v| *v = *v * l);
            }
        }
        out
    }
}

impl<T: Real> ScaleFamily for PlanarState<T> {
    fn scaled(&self, lambda: f64, kind: ScaleKind) -> Self {
        let l = T::from(lambda).expect("finite lambda");
        let mut out = self.clone();
        match kind {
            // hu = (h/λ)(λu) is unchanged.
            ScaleKind::Amplitude => {
                out.h.iter_mut().for_each(|h| *h = *h / l);
                out.h_bar = self.h_bar / l;
            }
            ScaleKind::Similarity => {
                out.dx = self.dx * l;
                out.dy = self.dy * l;
                out.x0 = self.x0 * l;
                out.y0 = self.y0 * l;
                let l3 = l * l * l;
                out.h.iter_mut().for_each(|h| *h = *h * l * l);
                out.h_bar = self.h_bar * l * l;
                out.hu.iter_mut().for_each(|m| *m = *m * l3);
                out.hv.iter_mut().for_each(|m| *m = *m * l3);
            }
        }
        out
    }
}

/// Maps `state` to its member of the scaling family with parameter `lambda`.
pub fn scale_family<S: ScaleFamily>(state: &S, lambda: f64, kind: ScaleKind) -> Result<S> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("scaling parameter must be positive, got {lambda}")));
    }
    Ok(state.scaled(lambda, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_initial_planar, build_initial_radial, InitialData, RadialGrid};

    fn bump() -> InitialData {
        InitialData::new("bump").with("h_amp", 0.3).with("u_amp", 0.4).with("v_amp", -0.2)
    }

    #[test]
    fn unit_lambda_is_identity() {
        let s = build_initial_radial::<f64>(&bump(), &RadialGrid::new(0.0, 2.0, 64).unwrap(), 1.0).unwrap();
        let p = build_initial_planar::<f64>(&bump(), 2.0, 32, 32, 1.0).unwrap();
        for kind in [ScaleKind::Amplitude, ScaleKind::Similarity] {
            assert_eq!(scale_family(&s, 1.0, kind).unwrap(), s);
            assert_eq!(scale_family(&p, 1.0, kind).unwrap(), p);
        }
        assert!(scale_family(&s, 0.0, ScaleKind::Amplitude).is_err());
    }

    #[test]
    fn similarity_maps_profile_to_stretched_profile() {
        let s = build_initial_radial::<f64>(&bump(), &RadialGrid::new(0.0, 2.0, 64).unwrap(), 1.0).unwrap();
        let init2 = InitialData::new("bump")
            .with("h_amp", 1.2)
            .with("u_amp", 0.8)
            .with("v_amp", -0.4)
            .with("center", 2.0)
            .with("width", 1.0);
        let direct = build_initial_radial::<f64>(&init2, &RadialGrid::new(0.0, 4.0, 64).unwrap(), 4.0).unwrap();
        let scaled = scale_family(&s, 2.0, ScaleKind::Similarity).unwrap();
        for i in 0..64 {
            assert!((scaled.r_centers[i] - direct.r_centers[i]).abs() < 1e-12);
            assert!((scaled.h[i] - direct.h[i]).abs() < 1e-12);
            assert!((scaled.u[i] - direct.u[i]).abs() < 1e-12);
            assert!((scaled.v[i] - direct.v[i]).abs() < 1e-12);
        }
        assert_eq!(scaled.h_bar, 4.0);
    }
}

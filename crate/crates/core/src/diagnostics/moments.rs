use crate::model::{MomentSet, PlanarState, RadialState};
use crate::scalar::{lit, Real};

/// Radial reductions of the moments, midpoint rule on cell centers:
/// `P₁ = 2π∫hU r² dr`, `P₂ = 2π∫hV r² dr`, `E = 2π∫[h(U² + V²) + h² − h̄²] r dr`,
/// `m = 2π∫(h − h̄) r dr`.
pub fn moments_radial<T: Real>(s: &RadialState<T>) -> MomentSet<T> {
    let dr = s.dr();
    let hb2 = s.h_bar * s.h_bar;
    let (mut p1, mut p2, mut e, mut m) = (T::zero(), T::zero(), T::zero(), T::zero());
    for i in 0..s.len() {
        let (r, h, u, v) = (s.r_centers[i], s.h[i], s.u[i], s.v[i]);
        p1 = p1 + h * u * r * r;
        p2 = p2 + h * v * r * r;
        e = e + (h * (u * u + v * v) + (h * h - hb2)) * r;
        m = m + (h - s.h_bar) * r;
    }
    let w = lit::<T>(2.0) * T::PI() * dr;
    MomentSet::new(w * p1, w * p2, w * e, w * m)
}

/// Planar moments, midpoint rule: `P₁ = ∫hu x + hv y`, `P₂ = ∫hv x − hu y`,
/// `E = ∫h|u|² + h² − h̄²`, `m = ∫(h − h̄)`.
pub fn moments_planar<T: Real>(s: &PlanarState<T>) -> MomentSet<T> {
    let hb2 = s.h_bar * s.h_bar;
    let tiny = s.h_bar * lit(1e-12);
    let (mut p1, mut p2, mut e, mut m) = (T::zero(), T::zero(), T::zero(), T::zero());
    for j in 0..s.ny {
        let y = s.y(j);
        for i in 0..s.nx {
            let x = s.x(i);
            let k = s.index(i, j);
            let (h, hu, hv) = (s.h[k], s.hu[k], s.hv[k]);
            p1 = p1 + hu * x + hv * y;
            p2 = p2 + hv * x - hu * y;
            let kinetic = if h > tiny { (hu * hu + hv * hv) / h } else { T::zero() };
            e = e + kinetic + (h * h - hb2);
            m = m + (h - s.h_bar);
        }
    }
    let w = s.dx * s.dy;
    MomentSet::new(w * p1, w * p2, w * e, w * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_initial_planar, build_initial_radial, InitialData, RadialGrid};

    #[test]
    fn rest_moments_vanish() {
        let g = RadialGrid::new(0.0, 2.0, 50).unwrap();
        assert_eq!(moments_radial(&RadialState::rest(&g, 1.0)), MomentSet::default());
        assert_eq!(moments_planar(&PlanarState::rest(2.0, 16, 16, 1.0)), MomentSet::default());
    }

    #[test]
    fn depth_bump_has_no_momentum_and_positive_mass() {
        let g = RadialGrid::new(0.0, 2.0, 200).unwrap();
        let s = build_initial_radial(&InitialData::new("h_bump").with("amplitude", 0.2), &g, 1.0).unwrap();
        let ms = moments_radial(&s);
        assert_eq!((ms.p1, ms.p2), (0.0, 0.0));
        assert!(ms.m > 0.0);
    }

    #[test]
    fn refinement_oracle() {
        // Midpoint sums against the same functional on a 10x finer grid.
        let init = InitialData::new("bump").with("h_amp", 0.3).with("u_amp", -0.8).with("v_amp", 0.5);
        let coarse = moments_radial(&build_initial_radial::<f64>(&init, &RadialGrid::new(0.0, 2.0, 2000).unwrap(), 1.0).unwrap());
        let fine = moments_radial(&build_initial_radial::<f64>(&init, &RadialGrid::new(0.0, 2.0, 20000).unwrap(), 1.0).unwrap());
        for (a, b) in [(coarse.p1, fine.p1), (coarse.p2, fine.p2), (coarse.e, fine.e), (coarse.m, fine.m)] {
            assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn planar_matches_radial_reduction() {
        let init = InitialData::new("bump").with("h_amp", 0.3).with("u_amp", -0.8).with("v_amp", 0.5);
        let r = moments_radial(&build_initial_radial::<f64>(&init, &RadialGrid::new(0.0, 2.0, 4000).unwrap(), 1.0).unwrap());
        let p = moments_planar(&build_initial_planar::<f64>(&init, 2.0, 400, 400, 1.0).unwrap());
        for (a, b) in [(p.p1, r.p1), (p.p2, r.p2), (p.e, r.e), (p.m, r.m)] {
            assert!((a - b).abs() < 2e-3 * b.abs().max(1e-3), "{a} vs {b}");
        }
    }

    #[test]
    fn mirror_parity_of_radial_moment() {
        // x ↦ −x with u ↦ −u leaves hu·x + hv·y unchanged.
        let init = InitialData::new("offset_bump").with("h_amp", 0.3).with("center_x", 0.3).with("u_amp", 0.6).with("v_amp", -0.4);
        let s = build_initial_planar::<f64>(&init, 2.0, 40, 40, 1.0).unwrap();
        let mut mirrored = s.clone();
        for j in 0..s.ny {
            for i in 0..s.nx {
                let (k, km) = (s.index(i, j), s.index(s.nx - 1 - i, j));
                mirrored.h[km] = s.h[k];
                mirrored.hu[km] = -s.hu[k];
                mirrored.hv[km] = s.hv[k];
            }
        }
        let (a, b) = (moments_planar(&s), moments_planar(&mirrored));
        assert!((a.p1 - b.p1).abs() < 1e-13);
        assert!((a.p2 + b.p2).abs() < 1e-13);
    }
}

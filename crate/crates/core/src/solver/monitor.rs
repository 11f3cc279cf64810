//! Max-norm residuals of the divergence and front constraints.

use super::ops::{component, divergence, plane_derivative};
use super::{CoupledSolver, CoupledState};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstraintResiduals<T> {
    pub div_h: T,
    pub div_frak_h: T,
    pub div_frak_e: T,
    /// `h₁ − Ĥ₂∂₂φ − Ĥ₃∂₃φ + φ∂₁Ĥ_N` on the front.
    pub plasma_front: T,
    /// `𝔥₁ − ∂₂(𝓗̂₂φ) − ∂₃(𝓗̂₃φ)` on the front.
    pub vacuum_front: T,
    /// Largest divergence on the one-sided closure rows. Their stencil is only first-order
    /// consistent and the interface penalty acts there, so this is reported, not bounded.
    pub closure_div: T,
}

impl<T: Real> ConstraintResiduals<T> {
    /// Largest of the bounded residuals (everything except `closure_div`).
    pub fn max(&self) -> T {
        self.div_h
            .max(self.div_frak_h)
            .max(self.div_frak_e)
            .max(self.plasma_front)
            .max(self.vacuum_front)
    }

    pub fn merge(&self, o: &Self) -> Self {
        ConstraintResiduals {
            div_h: self.div_h.max(o.div_h),
            div_frak_h: self.div_frak_h.max(o.div_frak_h),
            div_frak_e: self.div_frak_e.max(o.div_frak_e),
            plasma_front: self.plasma_front.max(o.plasma_front),
            vacuum_front: self.vacuum_front.max(o.vacuum_front),
            closure_div: self.closure_div.max(o.closure_div),
        }
    }
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// `(interior rows, closure rows)` maxima of a divergence field.
fn split_rows<T: Real>(div: &[T], plane: usize) -> (T, T) {
    let n = div.len();
    let closure = max_abs(&div[..plane]).max(max_abs(&div[n - plane..]));
    (max_abs(&div[plane..n - plane]), closure)
}

/// Residuals of the constraints for a planar run, using the solver's own stencils. Divergences
/// are taken over the rows where the `x₁` stencil is the second-order central one.
pub fn monitor_constraints<T: Real>(solver: &CoupledSolver<T>, state: &CoupledState<T>) -> ConstraintResiduals<T> {
    let d = solver.dims();
    let g = &solver.grid;
    let plane = g.plane();
    let h = g.h();
    let n = d.len();
    let p = &solver.point;

    let dphi2 = plane_derivative(&state.phi, g.n2, g.n3, h[1], 1);
    let dphi3 = plane_derivative(&state.phi, g.n2, g.n3, h[2], 2);
    let hh = p.uhat.h;
    let hc = p.hcal;
    let h1 = component(&state.u[..8 * plane], 8, 4);
    let frak_h1 = component(&state.w[6 * (n - plane)..], 6, 0);
    let mut plasma_front = T::zero();
    let mut vacuum_front = T::zero();
    for k in 0..plane {
        let r86 = h1[k] - hh[1] * dphi2[k] - hh[2] * dphi3[k] + state.phi[k] * p.d1_hn;
        let r87 = frak_h1[k] - hc[1] * dphi2[k] - hc[2] * dphi3[k];
        plasma_front = plasma_front.max(r86.abs());
        vacuum_front = vacuum_front.max(r87.abs());
    }
    let (div_h, c1) = split_rows(&divergence::<T, 8>(&state.u, d, 4), plane);
    let (div_frak_h, c2) = split_rows(&divergence::<T, 6>(&state.w, d, 0), plane);
    let (div_frak_e, c3) = split_rows(&divergence::<T, 6>(&state.w, d, 3), plane);
    ConstraintResiduals {
        div_h,
        div_frak_h,
        div_frak_e,
        plasma_front,
        vacuum_front,
        closure_div: c1.max(c2).max(c3),
    }
}

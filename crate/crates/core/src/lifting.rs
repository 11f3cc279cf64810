//! Fourier-multiplier lifting `Ψ(x₁, ·) = χ(x₁⟨D′⟩)φ` of a periodic front into the
//! half-space, and the induced change of variables `Φ₁ = x₁ + Ψ`.

use num_complex::Complex;

use crate::error::{MhdError, Result};
use crate::plasma::InterfaceGeometry;
use crate::scalar::{lit, Real};
use crate::spectral::{fft_nd, real_normalized, spectral_derivative_2d, to_complex, wavenumbers};

const TABLE_INTERVALS: usize = 4096;
/// The mollifier kernel is flat on `|y| ≤ 1 − β` and ramps smoothly to zero beyond.
const BETA: f64 = 0.5;

/// Even cutoff with `χ = 1` on `[0, 1]`, `χ = 0` beyond `1 + w ≤ M`, tabulated with cubic
/// Hermite interpolation.
///
/// `χ` is the indicator of `[−c, c]`, `c = 1 + w/2`, mollified at scale `δ = w/2` with a `C^∞`
/// plateau kernel, where `w = min(M − 1, √M)` is the transition width. Then
/// `max|χ′| = 1/((2 − β)δ)` scales like `M^{-1/2}`, which is the decay rate of the `sup|∂₁Ψ|`
/// bound, rather than the `2/M` slope cap (that cap makes `sup|∂₁Ψ|` decay like `1/M` for any
/// fixed front).
#[derive(Clone, Debug)]
pub struct CutoffSpec<T> {
    pub m: T,
    center: T,
    delta: T,
    beta: T,
    ds: T,
    values: Vec<T>,
}

/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`, the standard `C^∞` step from 0 to 1 on `[0, 1]`.
pub fn smoothstep<T: Real>(t: T) -> T {
    if t <= T::zero() {
        return T::zero();
    }
    if t >= T::one() {
        return T::one();
    }
    let a = (-t.recip()).exp();
    let b = (-(T::one() - t).recip()).exp();
    a / (a + b)
}

impl<T: Real> CutoffSpec<T> {
    /// Normalized plateau kernel on `[−1, 1]`.
    fn kernel(&self, y: T) -> T {
        let ay = y.abs();
        if ay >= T::one() {
            return T::zero();
        }
        let norm = (lit::<T>(2.0) - self.beta).recip();
        if ay <= T::one() - self.beta {
            norm
        } else {
            norm * smoothstep((T::one() - ay) / self.beta)
        }
    }

    /// Exact derivative `χ′(s)`.
    pub fn deriv(&self, s: T) -> T {
        let a = s.abs();
        let d = -self.kernel((a - self.center) / self.delta) / self.delta;
        if s < T::zero() {
            -d
        } else {
            d
        }
    }

    /// Tabulated `χ(s)`.
    pub fn eval(&self, s: T) -> T {
        let a = s.abs();
        if a <= T::one() {
            return T::one();
        }
        if a >= self.support_end() {
            return T::zero();
        }
        let pos = a / self.ds;
        let i = pos.floor().to_usize().unwrap_or(0).min(TABLE_INTERVALS - 1);
        let t = pos - T::from_usize_lossy(i);
        let s0 = T::from_usize_lossy(i) * self.ds;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.deriv(s0) * self.ds, self.deriv(s0 + self.ds) * self.ds);
        let t2 = t * t;
        let t3 = t2 * t;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        // Cubic Hermite can overshoot by rounding next to the flat ends.
        let v = (two * t3 - three * t2 + T::one()) * y0
            + (t3 - two * t2 + t) * d0
            + (three * t2 - two * t3) * y1
            + (t3 - t2) * d1;
        v.max(T::zero()).min(T::one())
    }

    /// Closed-form `max|χ′|`.
    pub fn max_slope(&self) -> T {
        ((lit::<T>(2.0) - self.beta) * self.delta).recip()
    }

    pub fn is_smooth(&self) -> bool {
        self.beta > T::zero()
    }

    /// End of the transition, `1 + w`; `χ` vanishes beyond it.
    pub fn support_end(&self) -> T {
        self.center + self.delta
    }
}

/// `w = min(M − 1, √M)`.
pub fn transition_width<T: Real>(m: T) -> T {
    (m - T::one()).min(m.sqrt())
}

/// Builds the cutoff for support bound `M > 1`.
pub fn make_cutoff<T: Real>(m: T) -> Result<CutoffSpec<T>> {
    if !(m > T::one()) || !m.is_finite() {
        return Err(MhdError::InvalidSupport { m: m.as_f64() });
    }
    let two = lit::<T>(2.0);
    let w = transition_width(m);
    let mut spec = CutoffSpec {
        m,
        center: T::one() + w / two,
        delta: w / two,
        beta: lit(BETA),
        ds: m / T::from_usize_lossy(TABLE_INTERVALS),
        values: Vec::new(),
    };
    // χ(s) = 1 + ∫₀ˢ χ′, accumulated with composite Simpson on each table interval.
    let sub = 8usize;
    let mut values = Vec::with_capacity(TABLE_INTERVALS + 1);
    let mut acc = T::one();
    values.push(acc);
    for i in 0..TABLE_INTERVALS {
        let a = T::from_usize_lossy(i) * spec.ds;
        let h = spec.ds / T::from_usize_lossy(sub);
        let mut sum = spec.deriv(a) + spec.deriv(a + spec.ds);
        for k in 1..sub {
            let w = if k % 2 == 1 { lit(4.0) } else { two };
            sum += w * spec.deriv(a + h * T::from_usize_lossy(k));
        }
        acc += sum * h / lit(3.0);
        values.push(acc);
    }
    // Spread the quadrature drift over the transition so that χ = 1 before it and χ = 0 after it
    // exactly (the table is constant outside the transition).
    let drift = values[TABLE_INTERVALS];
    let (start, end) = (spec.center - spec.delta, spec.support_end());
    for (i, v) in values.iter_mut().enumerate() {
        let s = T::from_usize_lossy(i) * spec.ds;
        let frac = ((s - start) / (end - start)).max(T::zero()).min(T::one());
        *v -= drift * frac;
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    spec.values = values;
    Ok(spec)
}

/// Periodic front `φ(x₂, x₃)`, row-major with `x₃` fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct FrontField<T> {
    pub phi: Vec<T>,
    pub n2: usize,
    pub n3: usize,
    pub l2: T,
    pub l3: T,
}

impl<T: Real> FrontField<T> {
    pub fn new(phi: Vec<T>, n2: usize, n3: usize, l2: T, l3: T) -> Result<Self> {
        if n2 == 0 || n3 == 0 || phi.len() != n2 * n3 {
            return Err(MhdError::InvalidGrid(format!(
                "front of length {} does not match {n2}x{n3}",
                phi.len()
            )));
        }
        if !(l2 > T::zero() && l3 > T::zero()) {
            return Err(MhdError::InvalidGrid("periods must be positive".into()));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(MhdError::InvalidGrid("front contains non-finite values".into()));
        }
        Ok(FrontField { phi, n2, n3, l2, l3 })
    }

    pub fn from_fn(n2: usize, n3: usize, l2: T, l3: T, f: impl Fn(T, T) -> T) -> Result<Self> {
        let (h2, h3) = (l2 / T::from_usize_lossy(n2), l3 / T::from_usize_lossy(n3));
        let phi = (0..n2 * n3)
            .map(|i| f(T::from_usize_lossy(i / n3) * h2, T::from_usize_lossy(i % n3) * h3))
            .collect();
        Self::new(phi, n2, n3, l2, l3)
    }

    /// `⟨ξ′⟩ = (1 + |ξ′|²)^{1/2}` for every Fourier mode, in FFT order.
    fn japanese_bracket(&self) -> Vec<T> {
        let k2 = wavenumbers(self.n2, self.l2);
        let k3 = wavenumbers(self.n3, self.l3);
        let mut out = Vec::with_capacity(self.n2 * self.n3);
        for a in &k2 {
            for b in &k3 {
                out.push((T::one() + *a * *a + *b * *b).sqrt());
            }
        }
        out
    }

    fn spectrum(&self) -> Vec<Complex<T>> {
        let mut c = to_complex(&self.phi);
        fft_nd(&mut c, &[self.n2, self.n3], false);
        c
    }
}

/// Names of the fronts returned by [`reference_fronts`].
pub const REFERENCE_FRONTS: [&str; 3] = ["single_mode", "multi_mode", "bump"];

/// Small smooth `2π`-periodic fronts used by the lifting experiments: one Fourier mode, a few
/// oblique modes, and a localized Gaussian bump with a broad spectrum.
pub fn reference_fronts<T: Real>(n2: usize, n3: usize) -> Result<Vec<(&'static str, FrontField<T>)>> {
    let tau = T::TAU();
    let c = |x: f64| lit::<T>(x);
    let pi = T::PI();
    Ok(vec![
        (REFERENCE_FRONTS[0], FrontField::from_fn(n2, n3, tau, tau, |a, b| c(0.2) * a.cos() * b.cos())?),
        (
            REFERENCE_FRONTS[1],
            FrontField::from_fn(n2, n3, tau, tau, |a, b| {
                c(0.1) * (a + c(2.0) * b).sin() + c(0.05) * (c(3.0) * a).cos() + c(0.02) * (c(5.0) * a - c(4.0) * b).cos()
            })?,
        ),
        (
            REFERENCE_FRONTS[2],
            FrontField::from_fn(n2, n3, tau, tau, |a, b| {
                let r2 = (a - pi) * (a - pi) + (b - pi) * (b - pi);
                c(0.3) * (-c(4.0) * r2).exp()
            })?,
        ),
    ])
}

/// `Ψ` sampled on `x₁`-slices; `psi[i1 * n2 * n3 + i2 * n3 + i3]`.
#[derive(Clone, Debug)]
pub struct LiftedFunction<T> {
    pub psi: Vec<T>,
    pub x1: Vec<T>,
    pub n2: usize,
    pub n3: usize,
    pub l2: T,
    pub l3: T,
}

impl<T: Real> LiftedFunction<T> {
    pub fn slice(&self, i1: usize) -> &[T] {
        let n = self.n2 * self.n3;
        &self.psi[i1 * n..(i1 + 1) * n]
    }

    pub fn h1(&self) -> T {
        self.x1[1] - self.x1[0]
    }

    /// One-sided second-order `∂₁Ψ` at the first slice: `(−3Ψ₀ + 4Ψ₁ − Ψ₂)/(2h₁)`.
    pub fn wall_normal_derivative(&self) -> Vec<T> {
        let h = self.h1();
        let (a, b, c) = (self.slice(0), self.slice(1), self.slice(2));
        (0..a.len())
            .map(|i| (-lit::<T>(3.0) * a[i] + lit::<T>(4.0) * b[i] - c[i]) / (h + h))
            .collect()
    }
}

fn check_x1_grid<T: Real>(x1: &[T]) -> Result<()> {
    if x1.len() < 3 {
        return Err(MhdError::InvalidGrid("x1 grid needs at least 3 samples".into()));
    }
    if x1.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(MhdError::InvalidGrid("x1 grid must be strictly increasing".into()));
    }
    Ok(())
}

fn apply_multiplier<T: Real>(
    phi: &FrontField<T>,
    x1: &[T],
    mult: impl Fn(T, T) -> T,
) -> Result<LiftedFunction<T>> {
    check_x1_grid(x1)?;
    let spec = phi.spectrum();
    let br = phi.japanese_bracket();
    let n = phi.n2 * phi.n3;
    let mut psi = Vec::with_capacity(n * x1.len());
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    for &x in x1 {
        let mut any = false;
        for k in 0..n {
            let w = mult(x, br[k]);
            any |= w != T::zero();
            buf[k] = spec[k] * w;
        }
        if any {
            fft_nd(&mut buf, &[phi.n2, phi.n3], true);
            psi.extend(real_normalized(&buf));
        } else {
            psi.extend(std::iter::repeat_n(T::zero(), n));
        }
    }
    Ok(LiftedFunction {
        psi,
        x1: x1.to_vec(),
        n2: phi.n2,
        n3: phi.n3,
        l2: phi.l2,
        l3: phi.l3,
    })
}

/// `Ψ(x₁, ·) = F⁻¹[χ(x₁⟨ξ′⟩) F[φ]]` on every requested slice.
pub fn lift<T: Real>(phi: &FrontField<T>, cutoff: &CutoffSpec<T>, x1: &[T]) -> Result<LiftedFunction<T>> {
    apply_multiplier(phi, x1, |x, b| cutoff.eval(x * b))
}

/// Exact `∂₁Ψ = F⁻¹[χ′(x₁⟨ξ′⟩)⟨ξ′⟩ F[φ]]`.
pub fn lift_normal_derivative<T: Real>(
    phi: &FrontField<T>,
    cutoff: &CutoffSpec<T>,
    x1: &[T],
) -> Result<LiftedFunction<T>> {
    apply_multiplier(phi, x1, |x, b| cutoff.deriv(x * b) * b)
}

/// `sup|∂₁Ψ|` over the given slices, from the exact multiplier.
pub fn sup_normal_derivative<T: Real>(phi: &FrontField<T>, cutoff: &CutoffSpec<T>, x1: &[T]) -> Result<T> {
    let d = lift_normal_derivative(phi, cutoff, x1)?;
    Ok(d.psi.iter().fold(T::zero(), |m, v| m.max(v.abs())))
}

/// Samples `x₁ = 0, h, …` up to the depth where every mode has been cut off.
pub fn default_x1_grid<T: Real>(cutoff: &CutoffSpec<T>, n1: usize) -> Vec<T> {
    // χ(x₁⟨ξ′⟩) = 0 once x₁ ≥ 1 + w since ⟨ξ′⟩ ≥ 1, so the truncation is lossless.
    let h = cutoff.support_end() / T::from_usize_lossy(n1);
    (0..=n1).map(|i| T::from_usize_lossy(i) * h).collect()
}

/// Geometry of `Φ = (x₁ + Ψ, x′)` on the lifted grid.
#[derive(Clone, Debug)]
pub struct Diffeomorphism<T> {
    pub phi1: Vec<T>,
    pub d1phi1: Vec<T>,
    pub dpsi_2: Vec<T>,
    pub dpsi_3: Vec<T>,
    pub dpsi_t: Vec<T>,
    pub min_d1phi1: T,
}

impl<T: Real> Diffeomorphism<T> {
    pub fn geometry(&self, idx: usize) -> InterfaceGeometry<T> {
        InterfaceGeometry {
            dpsi_t: self.dpsi_t[idx],
            dpsi_2: self.dpsi_2[idx],
            dpsi_3: self.dpsi_3[idx],
            d1phi1: self.d1phi1[idx],
        }
    }
}

/// Builds `Φ₁ = x₁ + Ψ` and its derivatives; `dpsi_t` optionally carries `∂_tΨ` on the same grid.
///
/// `∂₁Ψ` uses second-order differences (one-sided at the ends), `∂₂Ψ, ∂₃Ψ` are spectral.
pub fn build_diffeomorphism<T: Real>(
    psi: &LiftedFunction<T>,
    dpsi_t: Option<&LiftedFunction<T>>,
) -> Result<Diffeomorphism<T>> {
    let n = psi.n2 * psi.n3;
    let n1 = psi.x1.len();
    check_x1_grid(&psi.x1)?;
    let h = psi.h1();
    let mut phi1 = Vec::with_capacity(n * n1);
    let mut d1 = Vec::with_capacity(n * n1);
    let mut d2 = Vec::with_capacity(n * n1);
    let mut d3 = Vec::with_capacity(n * n1);
    let two = lit::<T>(2.0);
    for i1 in 0..n1 {
        let s = psi.slice(i1);
        for k in 0..n {
            phi1.push(psi.x1[i1] + s[k]);
            let deriv = if i1 == 0 {
                (-lit::<T>(3.0) * s[k] + lit::<T>(4.0) * psi.slice(1)[k] - psi.slice(2)[k]) / (two * h)
            } else if i1 == n1 - 1 {
                (lit::<T>(3.0) * s[k] - lit::<T>(4.0) * psi.slice(n1 - 2)[k] + psi.slice(n1 - 3)[k]) / (two * h)
            } else {
                (psi.slice(i1 + 1)[k] - psi.slice(i1 - 1)[k]) / (two * h)
            };
            d1.push(T::one() + deriv);
        }
        d2.extend(spectral_derivative_2d(s, psi.n2, psi.n3, psi.l2, psi.l3, 0));
        d3.extend(spectral_derivative_2d(s, psi.n2, psi.n3, psi.l2, psi.l3, 1));
    }
    let min_d1phi1 = d1.iter().fold(T::infinity(), |m, v| m.min(*v));
    if min_d1phi1 < lit(0.5) {
        return Err(MhdError::NotADiffeomorphism {
            min_d1phi1: min_d1phi1.as_f64(),
        });
    }
    let dpsi_t = match dpsi_t {
        Some(d) => {
            if d.psi.len() != psi.psi.len() {
                return Err(MhdError::InvalidGrid("time derivative grid mismatch".into()));
            }
            d.psi.clone()
        }
        None => vec![T::zero(); n * n1],
    };
    Ok(Diffeomorphism {
        phi1,
        d1phi1: d1,
        dpsi_2: d2,
        dpsi_3: d3,
        dpsi_t,
        min_d1phi1,
    })
}

/// Lifts every time sample of `φ(t, ·)`.
pub fn lift_time_series<T: Real>(
    phis: &[FrontField<T>],
    cutoff: &CutoffSpec<T>,
    x1: &[T],
) -> Result<Vec<LiftedFunction<T>>> {
    phis.iter().map(|p| lift(p, cutoff, x1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let c = make_cutoff(2.0_f64).unwrap();
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.eval(3.0), 0.0);
        assert_eq!(c.eval(-0.5), 1.0);
        assert!(c.is_smooth());
        assert!(make_cutoff(1.01_f64).unwrap().is_smooth());
        let c = make_cutoff(16.0_f64).unwrap();
        assert_eq!(c.support_end(), 5.0);
        assert_eq!(c.eval(5.0), 0.0);
    }

    #[test]
    fn rejects_small_support() {
        assert!(matches!(make_cutoff(1.0_f64), Err(MhdError::InvalidSupport { .. })));
        assert!(matches!(make_cutoff(0.3_f64), Err(MhdError::InvalidSupport { .. })));
    }

    #[test]
    fn slope_halves_per_quadrupling() {
        for m in [4.0_f64, 16.0, 64.0] {
            let (a, b) = (make_cutoff(m).unwrap(), make_cutoff(4.0 * m).unwrap());
            assert!((b.max_slope() / a.max_slope() - 0.5).abs() < 1e-14);
        }
        // w = 2, δ = 1: max|χ′| = 1/(2 − β).
        assert!((make_cutoff(4.0_f64).unwrap().max_slope() - 1.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn table_is_consistent_with_derivative() {
        let c = make_cutoff(5.0_f64).unwrap();
        for i in 1..200 {
            let s = 0.03 * i as f64;
            let fd = (c.eval(s + 1e-5) - c.eval(s - 1e-5)) / 2e-5;
            assert!((fd - c.deriv(s)).abs() < 1e-6, "s = {s}");
        }
        let mid = 1.0 + 0.5 * 5.0_f64.sqrt();
        assert!((c.eval(mid - 1e-3) - c.eval(mid + 1e-3) - 0.002 * c.max_slope()).abs() < 1e-6);
    }

    #[test]
    fn single_mode_trace() {
        let tau = std::f64::consts::TAU;
        let f = FrontField::from_fn(16, 8, tau, tau, |x2, _| x2.cos()).unwrap();
        let c = make_cutoff(4.0).unwrap();
        let l = lift(&f, &c, &[0.0, 0.1, 0.2]).unwrap();
        for (a, b) in l.slice(0).iter().zip(&f.phi) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}

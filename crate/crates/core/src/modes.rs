//! Hermite-Gaussian transverse mode functions, overlap integrals, far-field
//! transforms and uncertainty products.
//!
//! All modes are evaluated in the beam waist plane; benches are assumed to be
//! aligned to image planes or far-field planes, so Gouy phase and wavefront
//! curvature never enter. Lengths are micrometers, angles are radians.
//!
//! Convention: the fundamental amplitude is `u(x) ∝ exp(-x²/(2 w₀²))`, i.e.
//! `waist_radius` is the 1/e intensity radius (equal to the RMS width of the
//! field amplitude). With this convention two fundamentals displaced by `d`
//! overlap with magnitude `exp(-d²/(4 w₀²))`.

use num_complex::Complex64;
use thiserror::Error;

/// Errors from mode construction and mode-space numerics.
#[derive(Debug, Error)]
pub enum ModeError {
    #[error("waist_radius must be positive, got {0}")]
    NonPositiveWaist(f64),
    #[error("wavelength must be positive, got {0}")]
    NonPositiveWavelength(f64),
    #[error("overlap of modes with different wavelengths ({0} vs {1}) is ill-posed")]
    WavelengthMismatch(f64, f64),
    #[error("grid extent {extent} is below 6x the intensity RMS width {rms_width}; far field would alias")]
    UnderResolvedGrid { extent: f64, rms_width: f64 },
    #[error("profile carries no power")]
    EmptyProfile,
}

/// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
pub fn hermite(n: u32, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0 * x,
        _ => {
            let mut h_prev = 1.0;
            let mut h = 2.0 * x;
            for k in 1..n {
                let h_next = 2.0 * x * h - 2.0 * f64::from(k) * h_prev;
                h_prev = h;
                h = h_next;
            }
            h
        }
    }
}

/// A transverse Hermite-Gaussian mode TEM_{nx,ny} at its waist plane.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteGaussMode {
    pub order_x: u32,
    pub order_y: u32,
    /// 1/e intensity radius (RMS width of the field amplitude), micrometers.
    pub waist_radius: f64,
    /// Vacuum wavelength, micrometers.
    pub wavelength: f64,
    /// Transverse center of the mode, micrometers.
    pub center: [f64; 2],
    /// Global phase, radians.
    pub phase_offset: f64,
}

impl HermiteGaussMode {
    pub fn new(
        order_x: u32,
        order_y: u32,
        waist_radius: f64,
        wavelength: f64,
    ) -> Result<Self, ModeError> {
        if !waist_radius.is_finite() || waist_radius <= 0.0 {
            return Err(ModeError::NonPositiveWaist(waist_radius));
        }
        if !wavelength.is_finite() || wavelength <= 0.0 {
            return Err(ModeError::NonPositiveWavelength(wavelength));
        }
        Ok(Self {
            order_x,
            order_y,
            waist_radius,
            wavelength,
            center: [0.0, 0.0],
            phase_offset: 0.0,
        })
    }

    pub fn with_center(mut self, center: [f64; 2]) -> Self {
        self.center = center;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase_offset = phase;
        self
    }

    /// Normalized 1-D factor u_n(x) with ∫ u_n² dx = 1.
    fn factor(order: u32, waist: f64, x: f64) -> f64 {
        let xi = x / waist;
        // 1 / sqrt(2^n n! sqrt(pi) w0)
        let mut log_norm = -0.5 * (std::f64::consts::PI.sqrt() * waist).ln();
        for k in 1..=order {
            log_norm -= 0.5 * (2.0 * f64::from(k)).ln();
        }
        log_norm.exp() * hermite(order, xi) * (-0.5 * xi * xi).exp()
    }

    /// Complex mode amplitude u_{nm}(x, y); square-normalized over the plane.
    pub fn amplitude(&self, point: [f64; 2]) -> Complex64 {
        let ux = Self::factor(self.order_x, self.waist_radius, point[0] - self.center[0]);
        let uy = Self::factor(self.order_y, self.waist_radius, point[1] - self.center[1]);
        Complex64::from_polar(1.0, self.phase_offset) * ux * uy
    }

    /// Real 1-D section along x (order_x factor only), normalized on the line.
    /// The spatial slit scenarios are one-dimensional and use this directly.
    pub fn amplitude_1d(&self, x: f64) -> f64 {
        Self::factor(self.order_x, self.waist_radius, x - self.center[0])
    }
}

/// One uniform sample axis: `coord(i) = start + i * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl GridAxis {
    /// Symmetric axis of `len` points with spacing `step`, containing 0 when
    /// `len` is even (`coord(len/2) = 0`); this makes double Fourier
    /// transforms land back on the same lattice.
    pub fn centered(step: f64, len: usize) -> Self {
        Self {
            start: -(len as f64 / 2.0).floor() * step,
            step,
            len,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.coord(i))
    }

    pub fn extent(&self) -> f64 {
        self.step * (self.len.saturating_sub(1)) as f64
    }
}

/// Sampled complex amplitude on a uniform 1-D or 2-D lattice.
///
/// `values` is row-major with x fastest: `values[iy * x.len + ix]`.
/// The wavelength rides along so the far-field transform can rescale
/// spatial frequency to propagation angle.
#[derive(Debug, Clone)]
pub struct TransverseProfile {
    pub x: GridAxis,
    pub y: Option<GridAxis>,
    pub values: Vec<Complex64>,
    pub wavelength: f64,
}

impl TransverseProfile {
    /// Sample a mode on a centered 2-D grid spanning `±half_extent`.
    /// The grid must resolve the mode: at least 8 samples per waist radius.
    pub fn sample_mode(mode: &HermiteGaussMode, half_extent: f64, n: usize) -> Self {
        let step = 2.0 * half_extent / n as f64;
        assert!(
            step <= mode.waist_radius / 8.0,
            "grid step {step} under-resolves waist {}",
            mode.waist_radius
        );
        let axis = GridAxis::centered(step, n);
        let mut values = Vec::with_capacity(n * n);
        for iy in 0..n {
            let y = axis.coord(iy);
            for ix in 0..n {
                values.push(mode.amplitude([axis.coord(ix), y]));
            }
        }
        Self {
            x: axis.clone(),
            y: Some(axis),
            values,
            wavelength: mode.wavelength,
        }
    }

    /// Sample a 1-D amplitude function on a centered grid.
    pub fn from_fn_1d(
        half_extent: f64,
        n: usize,
        wavelength: f64,
        f: impl Fn(f64) -> Complex64,
    ) -> Self {
        let step = 2.0 * half_extent / n as f64;
        let axis = GridAxis::centered(step, n);
        let values = axis.coords().map(f).collect();
        Self {
            x: axis,
            y: None,
            values,
            wavelength,
        }
    }

    fn cell(&self) -> f64 {
        match &self.y {
            Some(y) => self.x.step * y.step,
            None => self.x.step,
        }
    }

    /// Total power: discrete sum of |value|² times the cell measure.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell()
    }

    /// Intensity-weighted RMS width along x.
    pub fn rms_width_x(&self) -> Result<f64, ModeError> {
        let mut w0 = 0.0;
        let mut w1 = 0.0;
        let mut w2 = 0.0;
        let nx = self.x.len;
        for (i, v) in self.values.iter().enumerate() {
            let x = self.x.coord(i % nx);
            let p = v.norm_sqr();
            w0 += p;
            w1 += p * x;
            w2 += p * x * x;
        }
        if w0 <= 0.0 {
            return Err(ModeError::EmptyProfile);
        }
        let mean = w1 / w0;
        Ok((w2 / w0 - mean * mean).max(0.0).sqrt())
    }

    pub fn value_at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.x.len + ix]
    }
}

/// Trapezoid weight helper: endpoint samples count half.
fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Overlap integral ∫∫ u_a* u_b dx dy by trapezoid quadrature on a grid
/// covering both mode centers out to ±5 waists, at least 8 samples per waist.
pub fn overlap(a: &HermiteGaussMode, b: &HermiteGaussMode) -> Result<Complex64, ModeError> {
    if a.wavelength != b.wavelength {
        return Err(ModeError::WavelengthMismatch(a.wavelength, b.wavelength));
    }
    let w_max = a.waist_radius.max(b.waist_radius);
    let w_min = a.waist_radius.min(b.waist_radius);
    let pad = 5.0 * w_max;
    let mut sum = Complex64::new(0.0, 0.0);
    let axis = |k: usize| {
        let lo = a.center[k].min(b.center[k]) - pad;
        let hi = a.center[k].max(b.center[k]) + pad;
        let n = (256usize).max(((hi - lo) / (w_min / 8.0)).ceil() as usize) + 1;
        let step = (hi - lo) / (n - 1) as f64;
        (lo, step, n)
    };
    let (x0, dx, nx) = axis(0);
    let (y0, dy, ny) = axis(1);
    for iy in 0..ny {
        let y = y0 + iy as f64 * dy;
        let wy = trapezoid_weight(iy, ny);
        for ix in 0..nx {
            let x = x0 + ix as f64 * dx;
            let w = wy * trapezoid_weight(ix, nx);
            sum += a.amplitude([x, y]).conj() * b.amplitude([x, y]) * w;
        }
    }
    Ok(sum * dx * dy)
}

/// Discrete approximation of the continuous Fourier transform along one axis,
/// including the grid-offset phase, rescaled so the transform is unitary in
/// the (value², axis measure) sense:
///
///   g(θ_k) = (Δx/√λ) Σ_j f(x_j) exp(-2πi ν_k x_j),  θ_k = λ ν_k,
///   ν_k = (k - n/2) / (n Δx).
///
/// Applying the transform twice reproduces the parity-flipped input.
fn dft_axis(values: &mut [Complex64], stride: usize, axis: &GridAxis, wavelength: f64) -> GridAxis {
    let n = axis.len;
    let half = n / 2;
    let mut planner = rustfft::FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let scale = axis.step / wavelength.sqrt();
    let lanes = values.len() / n;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for lane in 0..lanes {
        // Lane layout: for stride 1 lanes are contiguous rows; otherwise the
        // lane start advances through each row block.
        let base = if stride == 1 {
            lane * n
        } else {
            (lane / stride) * n * stride + lane % stride
        };
        for (j, b) in buf.iter_mut().enumerate() {
            // Pre-modulation shifts the frequency origin to the center bin.
            let phase = std::f64::consts::TAU * (half as f64) * j as f64 / n as f64;
            *b = values[base + j * stride] * Complex64::from_polar(1.0, phase);
        }
        fft.process(&mut buf);
        let freq_step = 1.0 / (n as f64 * axis.step);
        for (k, b) in buf.iter().enumerate() {
            let nu = (k as f64 - half as f64) * freq_step;
            // Carry the phase from the grid's start offset.
            let phase = -std::f64::consts::TAU * nu * axis.start;
            values[base + k * stride] = *b * Complex64::from_polar(scale, phase);
        }
    }
    GridAxis::centered(wavelength / (n as f64 * axis.step), n)
}

/// Far-field (Fraunhofer) transform of a sampled profile. The output axes are
/// propagation angles in radians; total power is conserved.
pub fn far_field(profile: &TransverseProfile) -> Result<TransverseProfile, ModeError> {
    let rms = profile.rms_width_x()?;
    if profile.x.extent() < 6.0 * rms {
        return Err(ModeError::UnderResolvedGrid {
            extent: profile.x.extent(),
            rms_width: rms,
        });
    }
    let mut out = profile.clone();
    let nx = out.x.len;
    out.x = dft_axis(&mut out.values, 1, &profile.x, profile.wavelength);
    if let Some(y_axis) = &profile.y {
        out.y = Some(dft_axis(&mut out.values, nx, y_axis, profile.wavelength));
    }
    Ok(out)
}

/// Result of [`uncertainty_product`].
#[derive(Debug, Clone, Copy)]
pub struct UncertaintyProduct {
    /// RMS intensity width along x in the waist plane, micrometers.
    pub position_spread: f64,
    /// RMS intensity width of the far-field angle distribution, radians.
    pub divergence_spread: f64,
    /// (Δx·Δθ) / (λ/4π); 1 is the Heisenberg minimum, reached by TEM₀₀.
    pub product_ratio: f64,
}

/// Waist-plane and far-field RMS widths along the x axis and their product
/// normalized to the Heisenberg minimum λ/4π. Order n along x gives 2n+1.
pub fn uncertainty_product(mode: &HermiteGaussMode) -> UncertaintyProduct {
    let n = 512;
    let half_extent = 6.0 * mode.waist_radius;
    let centered = mode.clone().with_center([0.0, 0.0]);
    let near = TransverseProfile::from_fn_1d(half_extent, n, mode.wavelength, |x| {
        Complex64::new(centered.amplitude_1d(x), 0.0)
    });
    let dx = near.rms_width_x().expect("mode has power");
    let far = far_field(&near).expect("mode grid is resolved");
    let dtheta = far.rms_width_x().expect("far field has power");
    UncertaintyProduct {
        position_spread: dx,
        divergence_spread: dtheta,
        product_ratio: dx * dtheta / (mode.wavelength / (4.0 * std::f64::consts::PI)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tem(nx: u32, ny: u32) -> HermiteGaussMode {
        HermiteGaussMode::new(nx, ny, 100.0, 0.702).unwrap()
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 0.7), 1.0);
        assert_eq!(hermite(1, 0.7), 1.4);
        assert_relative_eq!(hermite(2, 0.7), 4.0 * 0.49 - 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            hermite(3, 0.7),
            8.0 * 0.343 - 12.0 * 0.7,
            max_relative = 1e-12
        );
    }

    #[test]
    fn tem00_peaks_at_center() {
        let m = tem(0, 0).with_center([12.0, -3.0]);
        let peak = m.amplitude([12.0, -3.0]);
        assert!(peak.re > 0.0 && peak.im.abs() < 1e-15);
        assert!(m.amplitude([40.0, -3.0]).norm() < peak.norm());
    }

    #[test]
    fn tem01_null_and_odd_symmetry() {
        // Order 1 along x: zero amplitude between the humps, odd in x.
        let m = tem(1, 0);
        assert_eq!(m.amplitude([0.0, 5.0]).norm(), 0.0);
        let plus = m.amplitude([35.0, 5.0]);
        let minus = m.amplitude([-35.0, 5.0]);
        assert_relative_eq!(plus.re, -minus.re, max_relative = 1e-14);
        assert!(plus.norm() > 0.0);
    }

    #[test]
    fn amplitude_is_normalized() {
        for (nx, ny) in [(0, 0), (1, 0), (2, 3)] {
            let m = tem(nx, ny);
            let norm = overlap(&m, &m).unwrap();
            assert_relative_eq!(norm.re, 1.0, epsilon = 1e-6);
            assert!(norm.im.abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_orthogonal_modes() {
        let o = overlap(&tem(0, 0), &tem(1, 0)).unwrap();
        assert!(o.norm() < 1e-6);
    }

    #[test]
    fn overlap_rejects_wavelength_mismatch() {
        let a = tem(0, 0);
        let b = HermiteGaussMode::new(0, 0, 100.0, 0.650).unwrap();
        assert!(matches!(
            overlap(&a, &b),
            Err(ModeError::WavelengthMismatch(_, _))
        ));
    }

    #[test]
    fn displaced_gaussian_overlap_closed_form() {
        // |<u_0 | u_d>| = exp(-d²/(4 w₀²)); quadrature against closed form.
        let w0 = 100.0;
        for d in [0.0, w0, 2.0 * w0, 4.0 * w0] {
            let a = tem(0, 0);
            let b = tem(0, 0).with_center([d, 0.0]);
            let o = overlap(&a, &b).unwrap();
            assert_relative_eq!(
                o.norm(),
                (-d * d / (4.0 * w0 * w0)).exp(),
                epsilon = 1e-5
            );
        }
    }

    #[test]
    fn overlap_carries_relative_phase() {
        let a = tem(0, 0);
        let b = tem(0, 0).with_phase(0.75);
        let o = overlap(&a, &b).unwrap();
        assert_relative_eq!(o.arg(), 0.75, epsilon = 1e-9);
    }

    #[test]
    fn far_field_gaussian_width() {
        // Fourier of a Gaussian: angular intensity RMS = λ/(4π σ_x... here
        // Δθ = λ/(2π) / (2 Δx) with Δx = w0/√2 under this waist convention.
        let m = tem(0, 0);
        let profile = TransverseProfile::sample_mode(&m, 5.0 * m.waist_radius, 256);
        let ff = far_field(&profile).unwrap();
        let dtheta = ff.rms_width_x().unwrap();
        let dx = profile.rms_width_x().unwrap();
        assert_relative_eq!(
            dtheta,
            m.wavelength / (4.0 * std::f64::consts::PI * dx),
            epsilon = 1e-6
        );
    }

    #[test]
    fn far_field_conserves_power() {
        let m = tem(2, 1);
        let profile = TransverseProfile::sample_mode(&m, 6.0 * m.waist_radius, 256);
        let ff = far_field(&profile).unwrap();
        assert_relative_eq!(ff.power(), profile.power(), max_relative = 1e-6);
    }

    #[test]
    fn far_field_twice_is_parity_flip() {
        let m = tem(1, 0);
        let profile = TransverseProfile::sample_mode(&m, 6.0 * m.waist_radius, 128);
        let ff2 = far_field(&far_field(&profile).unwrap()).unwrap();
        let n = profile.x.len;
        let mut max_err = 0.0f64;
        for iy in 0..n {
            for ix in 0..n {
                let flipped = profile.value_at((n - ix) % n, (n - iy) % n);
                max_err = max_err.max((ff2.value_at(ix, iy) - flipped).norm());
            }
        }
        let peak = profile.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max_err < 1e-5 * peak, "parity error {max_err}");
    }

    #[test]
    fn far_field_tem01_has_central_dip() {
        let m = tem(1, 0);
        let profile = TransverseProfile::sample_mode(&m, 6.0 * m.waist_radius, 256);
        let ff = far_field(&profile).unwrap();
        let c = ff.x.len / 2;
        let center = ff.value_at(c, c).norm_sqr();
        let peak = ff.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        assert!(center < 1e-9 * peak, "center {center} vs peak {peak}");
        // Double-lobed: a maximum on either side of the axis.
        let lobe_hi: f64 = (c + 1..ff.x.len).map(|i| ff.value_at(i, c).norm_sqr()).fold(0.0, f64::max);
        let lobe_lo: f64 = (0..c).map(|i| ff.value_at(i, c).norm_sqr()).fold(0.0, f64::max);
        assert!(lobe_hi > 100.0 * center.max(1e-300));
        assert_relative_eq!(lobe_hi, lobe_lo, max_relative = 1e-9);
    }

    #[test]
    fn far_field_two_slits_fringe_period() {
        // Two in-phase slits, spacing a: maximum at the center, period λ/a.
        let lambda = 0.702;
        let spacing = 200.0;
        let width = 25.0;
        let profile = TransverseProfile::from_fn_1d(400.0, 2048, lambda, |x| {
            let in_slit = ((x - spacing / 2.0).abs() < width / 2.0)
                || ((x + spacing / 2.0).abs() < width / 2.0);
            Complex64::new(if in_slit { 1.0 } else { 0.0 }, 0.0)
        });
        let ff = far_field(&profile).unwrap();
        let intensity: Vec<f64> = ff.values.iter().map(|v| v.norm_sqr()).collect();
        let center = ff.x.len / 2;
        let peak = intensity.iter().copied().fold(0.0, f64::max);
        assert_relative_eq!(intensity[center], peak, max_relative = 1e-9);
        // Brute-force oracle: two finite slits give the single-slit sinc²
        // envelope times the two-source fringe cos²(π a θ / λ).
        let sinc = |u: f64| if u.abs() < 1e-12 { 1.0 } else { u.sin() / u };
        let period = lambda / spacing;
        for k in 1..=3 {
            let theta = k as f64 * period;
            let idx = ((theta - ff.x.start) / ff.x.step).round() as usize;
            let th = ff.x.coord(idx);
            let envelope = sinc(std::f64::consts::PI * width * th / lambda).powi(2);
            let fringe = (std::f64::consts::PI * spacing * th / lambda).cos().powi(2);
            assert_relative_eq!(intensity[idx] / peak, envelope * fringe, epsilon = 5e-2);
        }
    }

    #[test]
    fn far_field_rejects_underresolved_grid() {
        let m = tem(0, 0);
        // Extent of only ±1 waist: below 6× the RMS width.
        let profile = TransverseProfile::sample_mode(&m, m.waist_radius, 64);
        assert!(matches!(
            far_field(&profile),
            Err(ModeError::UnderResolvedGrid { .. })
        ));
    }

    #[test]
    fn uncertainty_tem00_saturates_heisenberg() {
        let up = uncertainty_product(&tem(0, 0));
        assert_relative_eq!(up.product_ratio, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn uncertainty_tem01_is_three() {
        let up = uncertainty_product(&tem(1, 0));
        assert_relative_eq!(up.product_ratio, 3.0, epsilon = 1e-3);
    }

    #[test]
    fn uncertainty_ratio_scale_invariant() {
        let wide = HermiteGaussMode::new(0, 0, 200.0, 0.702).unwrap();
        let up = uncertainty_product(&wide);
        assert_relative_eq!(up.product_ratio, 1.0, epsilon = 1e-4);
        assert_relative_eq!(up.position_spread, 200.0 / 2f64.sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn invalid_modes_rejected() {
        assert!(HermiteGaussMode::new(0, 0, 0.0, 0.7).is_err());
        assert!(HermiteGaussMode::new(0, 0, 10.0, -1.0).is_err());
    }
}

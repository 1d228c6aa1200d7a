//! Reduced spatial biphoton model: near-field signal/idler position
//! correlation under a structured pump, double-slit diffraction of the
//! conditional signal amplitude, and position-resolved visibility /
//! distinguishability.
//!
//! The full angular-spectrum theory is replaced by the factorized
//! double-Gaussian ansatz
//!
//!   ψ(x_s | x_i) ∝ u_pump((x_s + x_i)/2) · exp(-(x_s - x_i)²/(4 σ_c²))
//!
//! normalized over the signal coordinate: the pair is born where the pump
//! field is, within a correlation length σ_c of each other. A TEM₀₁ pump
//! hands its two-hump structure (with the 180° phase flip) to the photons.

use crate::modes::{overlap, HermiteGaussMode, ModeError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpatialError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("conditional amplitude vanishes at both slits for idler position {0}")]
    UndefinedPoint(f64),
    #[error(transparent)]
    Mode(#[from] ModeError),
}

/// Near-field biphoton correlation under a structured pump.
#[derive(Debug, Clone)]
pub struct BiphotonAmplitude {
    pub pump_mode: HermiteGaussMode,
    /// Near-field signal-idler position correlation length, micrometers.
    pub correlation_width: f64,
    /// Down-converted wavelength, micrometers.
    pub wavelength: f64,
}

impl BiphotonAmplitude {
    pub fn new(
        pump_mode: HermiteGaussMode,
        correlation_width: f64,
        wavelength: f64,
    ) -> Result<Self, SpatialError> {
        if !correlation_width.is_finite() || correlation_width <= 0.0 {
            return Err(SpatialError::InvalidParameter(format!(
                "correlation width must be positive, got {correlation_width}"
            )));
        }
        if correlation_width >= pump_mode.waist_radius {
            return Err(SpatialError::InvalidParameter(format!(
                "correlation width {correlation_width} must stay below the pump waist {}",
                pump_mode.waist_radius
            )));
        }
        Ok(Self {
            pump_mode,
            correlation_width,
            wavelength,
        })
    }

    /// Hump centers of the pump intensity (±w₀ for TEM₀₁).
    pub fn hump_centers(&self) -> [f64; 2] {
        let w = self.pump_mode.waist_radius;
        [-w, w]
    }

    fn unnormalized(&self, idler_pos: f64, signal_pos: f64) -> f64 {
        let mid = 0.5 * (signal_pos + idler_pos);
        let diff = signal_pos - idler_pos;
        self.pump_mode.amplitude_1d(mid)
            * (-diff * diff / (4.0 * self.correlation_width * self.correlation_width)).exp()
    }

    fn integration_range(&self, idler_pos: f64) -> (f64, f64) {
        let w = self.pump_mode.waist_radius;
        let sc = self.correlation_width;
        let lo = (-10.0 * w).min(idler_pos - 10.0 * sc);
        let hi = (10.0 * w).max(idler_pos + 10.0 * sc);
        (lo, hi)
    }

    fn norm(&self, idler_pos: f64) -> f64 {
        let (lo, hi) = self.integration_range(idler_pos);
        let n = 4096;
        let step = (hi - lo) / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = lo + i as f64 * step;
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            acc += w * self.unnormalized(idler_pos, x).powi(2);
        }
        (acc * step).sqrt()
    }

    /// Probability that the signal lands on the same side of the mode axis
    /// as the idler (the paper's same-hump correlation).
    pub fn hump_correlation(&self, idler_pos: f64) -> f64 {
        let (lo, hi) = self.integration_range(idler_pos);
        let half = |a: f64, b: f64| {
            let n = 2048;
            let step = (b - a) / (n - 1) as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
                acc += w * self.unnormalized(idler_pos, a + i as f64 * step).powi(2);
            }
            acc * step
        };
        let neg = half(lo, 0.0);
        let pos = half(0.0, hi);
        let same = if idler_pos >= 0.0 { pos } else { neg };
        same / (pos + neg)
    }
}

/// ψ(x_s | x_i), normalized so ∫ |ψ|² dx_s = 1.
pub fn conditional_signal_amplitude(
    bp: &BiphotonAmplitude,
    idler_pos: f64,
    signal_pos: f64,
) -> Complex64 {
    Complex64::new(bp.unnormalized(idler_pos, signal_pos) / bp.norm(idler_pos), 0.0)
}

/// Choose σ_c so the same-hump correlation for an idler at a hump center
/// equals `target` (bisection; correlation decreases with σ_c).
pub fn calibrate_correlation_width(
    pump_mode: &HermiteGaussMode,
    target: f64,
) -> Result<f64, SpatialError> {
    if !(0.5..1.0).contains(&target) {
        return Err(SpatialError::InvalidParameter(format!(
            "hump correlation target must lie in [0.5, 1), got {target}"
        )));
    }
    let w = pump_mode.waist_radius;
    let corr_at = |sc: f64| -> Result<f64, SpatialError> {
        let bp = BiphotonAmplitude::new(pump_mode.clone(), sc, pump_mode.wavelength)?;
        Ok(bp.hump_correlation(bp.hump_centers()[1]))
    };
    let mut lo = 1e-3 * w;
    let mut hi = 0.999 * w;
    if corr_at(hi)? > target {
        return Ok(hi);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if corr_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Double-slit layout imaged from the pump humps, and the far-field screen.
#[derive(Debug, Clone)]
pub struct SlitGeometry {
    /// Slit centers, micrometers.
    pub centers: [f64; 2],
    /// Slit width, micrometers.
    pub width: f64,
    /// Far-field screen angles, radians.
    pub screen: crate::modes::GridAxis,
    /// Wavelength of the diffracted light, micrometers.
    pub wavelength: f64,
}

impl SlitGeometry {
    pub fn new(
        centers: [f64; 2],
        width: f64,
        screen: crate::modes::GridAxis,
        wavelength: f64,
    ) -> Result<Self, SpatialError> {
        if !width.is_finite() || width <= 0.0 {
            return Err(SpatialError::InvalidParameter(format!(
                "slit width must be positive, got {width}"
            )));
        }
        if (centers[1] - centers[0]).abs() <= width {
            return Err(SpatialError::InvalidParameter(
                "slits must be disjoint".to_string(),
            ));
        }
        Ok(Self {
            centers,
            width,
            screen,
            wavelength,
        })
    }

    /// Slits on the hump centers of a pump mode: width w₀/4, screen covering
    /// `periods` fringe periods either side with `samples` points.
    pub fn for_pump(
        bp: &BiphotonAmplitude,
        samples: usize,
        periods: f64,
    ) -> Result<Self, SpatialError> {
        let centers = bp.hump_centers();
        let spacing = centers[1] - centers[0];
        let period = bp.wavelength / spacing;
        let step = 2.0 * periods * period / samples as f64;
        Self::new(
            centers,
            bp.pump_mode.waist_radius / 4.0,
            crate::modes::GridAxis::centered(step, samples),
            bp.wavelength,
        )
    }
}

/// Fraunhofer pattern of two slits fed with amplitudes a₁ and a₂:
/// single-slit sinc² envelope times the two-source interference term.
/// Returns the intensity over the screen angles.
pub fn slit_far_field(
    amp_at_slit1: Complex64,
    amp_at_slit2: Complex64,
    geom: &SlitGeometry,
) -> crate::modes::TransverseProfile {
    let sinc = |u: f64| if u.abs() < 1e-12 { 1.0 } else { u.sin() / u };
    let k = std::f64::consts::TAU / geom.wavelength;
    let values = geom
        .screen
        .coords()
        .map(|theta| {
            let envelope = sinc(0.5 * k * geom.width * theta);
            let field = amp_at_slit1 * Complex64::from_polar(1.0, -k * theta * geom.centers[0])
                + amp_at_slit2 * Complex64::from_polar(1.0, -k * theta * geom.centers[1]);
            Complex64::new((envelope * envelope) * field.norm_sqr(), 0.0)
        })
        .collect();
    crate::modes::TransverseProfile {
        x: geom.screen.clone(),
        y: None,
        values,
        wavelength: geom.wavelength,
    }
}

/// Visibility and distinguishability of the double-slit signal conditioned
/// on an idler detector at `idler_pos`:
/// D = |p₁ - p₂|/(p₁ + p₂), V = 2|a₁||a₂|/(p₁ + p₂). D² + V² = 1 exactly.
pub fn vd_at_idler_position(
    bp: &BiphotonAmplitude,
    geom: &SlitGeometry,
    idler_pos: f64,
) -> Result<(f64, f64), SpatialError> {
    let a1 = conditional_signal_amplitude(bp, idler_pos, geom.centers[0]);
    let a2 = conditional_signal_amplitude(bp, idler_pos, geom.centers[1]);
    let p1 = a1.norm_sqr();
    let p2 = a2.norm_sqr();
    let total = p1 + p2;
    if total == 0.0 || !total.is_finite() {
        return Err(SpatialError::UndefinedPoint(idler_pos));
    }
    let d = (p1 - p2).abs() / total;
    let v = 2.0 * a1.norm() * a2.norm() / total;
    Ok((v, d))
}

const CONE_WAVELENGTH: f64 = 0.702;

/// Lateral coherence of the down-conversion cone: a continuum of independent
/// emitters projected onto two displaced TEM₀₀ detection modes. The fringe
/// visibility is the mode overlap μ = exp(-d²/(4 w₀²)) reduced by any
/// uncorrected background; the coincidence-marked distinguishability is
/// √(1 - μ²).
pub fn cone_mode_coherence(
    detection_waist: f64,
    separation: f64,
    background_fraction: f64,
) -> Result<(f64, f64), SpatialError> {
    if !detection_waist.is_finite() || detection_waist <= 0.0 {
        return Err(SpatialError::InvalidParameter(format!(
            "detection waist must be positive, got {detection_waist}"
        )));
    }
    if !(0.0..1.0).contains(&background_fraction) {
        return Err(SpatialError::InvalidParameter(format!(
            "background fraction must lie in [0, 1), got {background_fraction}"
        )));
    }
    let mode1 = HermiteGaussMode::new(0, 0, detection_waist, CONE_WAVELENGTH)?;
    let mode2 = mode1.clone().with_center([separation, 0.0]);
    let mu = overlap(&mode1, &mode2)?.norm().min(1.0);
    let v = (1.0 - background_fraction) * mu;
    let d = (1.0 - mu * mu).max(0.0).sqrt();
    Ok((v, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{far_field, GridAxis, TransverseProfile};
    use approx::assert_relative_eq;

    const W0: f64 = 100.0;
    const LAMBDA: f64 = 0.702;

    fn tem01_pump() -> HermiteGaussMode {
        HermiteGaussMode::new(1, 0, W0, 0.351).unwrap()
    }

    fn default_bp() -> BiphotonAmplitude {
        let pump = tem01_pump();
        let sc = calibrate_correlation_width(&pump, 0.96).unwrap();
        BiphotonAmplitude::new(pump, sc, LAMBDA).unwrap()
    }

    #[test]
    fn centered_idler_gives_odd_amplitudes() {
        let bp = default_bp();
        let [h1, h2] = bp.hump_centers();
        let a1 = conditional_signal_amplitude(&bp, 0.0, h1);
        let a2 = conditional_signal_amplitude(&bp, 0.0, h2);
        assert_eq!(a1.re, -a2.re);
        assert!(a1.norm() > 0.0);
    }

    #[test]
    fn tem00_pump_gives_same_sign_amplitudes() {
        let pump = HermiteGaussMode::new(0, 0, W0, 0.351).unwrap();
        let bp = BiphotonAmplitude::new(pump, 30.0, LAMBDA).unwrap();
        for idler in [-50.0, 0.0, 80.0] {
            let a1 = conditional_signal_amplitude(&bp, idler, -W0);
            let a2 = conditional_signal_amplitude(&bp, idler, W0);
            assert!(a1.re > 0.0 && a2.re > 0.0);
        }
    }

    #[test]
    fn conditional_normalization_on_fine_grid() {
        let bp = default_bp();
        for idler in [-150.0, -30.0, 0.0, 55.0, 200.0] {
            // Independent quadrature, different resolution from the
            // normalizer.
            let lo = -1500.0;
            let n = 30_001;
            let step = (1500.0 - lo) / (n - 1) as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let x = lo + i as f64 * step;
                acc += conditional_signal_amplitude(&bp, idler, x).norm_sqr();
            }
            assert_relative_eq!(acc * step, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn calibrated_hump_correlation_hits_target() {
        let bp = default_bp();
        let corr = bp.hump_correlation(bp.hump_centers()[1]);
        assert_relative_eq!(corr, 0.96, epsilon = 1e-6);
        assert!(corr > 0.95);
    }

    #[test]
    fn correlation_width_validation() {
        let pump = tem01_pump();
        assert!(BiphotonAmplitude::new(pump.clone(), 0.0, LAMBDA).is_err());
        assert!(BiphotonAmplitude::new(pump, 2.0 * W0, LAMBDA).is_err());
    }

    #[test]
    fn slit_far_field_in_phase_peaks_at_center() {
        let bp = default_bp();
        let geom = SlitGeometry::for_pump(&bp, 1024, 10.0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let profile = slit_far_field(one, one, &geom);
        let center = profile.values[geom.screen.len / 2].re;
        let peak = profile.values.iter().map(|v| v.re).fold(f64::MIN, f64::max);
        assert_relative_eq!(center, peak, max_relative = 1e-12);
    }

    #[test]
    fn slit_far_field_opposite_phase_has_central_zero() {
        let bp = default_bp();
        let geom = SlitGeometry::for_pump(&bp, 1024, 10.0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let profile = slit_far_field(one, -one, &geom);
        assert_eq!(profile.values[geom.screen.len / 2].re, 0.0);
    }

    #[test]
    fn slit_far_field_single_slit_no_fringes() {
        let bp = default_bp();
        let geom = SlitGeometry::for_pump(&bp, 1024, 10.0).unwrap();
        let profile = slit_far_field(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), &geom);
        // Pure envelope: dividing out sinc² leaves a constant.
        let sinc = |u: f64| if u.abs() < 1e-12 { 1.0 } else { u.sin() / u };
        let k = std::f64::consts::TAU / geom.wavelength;
        let mut reference = None;
        for (i, theta) in geom.screen.coords().enumerate() {
            let env = sinc(0.5 * k * geom.width * theta).powi(2);
            if env < 1e-3 {
                continue;
            }
            let flat = profile.values[i].re / env;
            let r = *reference.get_or_insert(flat);
            assert_relative_eq!(flat, r, max_relative = 1e-9);
        }
    }

    #[test]
    fn vd_centered_idler_full_visibility() {
        let bp = default_bp();
        let geom = SlitGeometry::for_pump(&bp, 1024, 10.0).unwrap();
        let (v, d) = vd_at_idler_position(&bp, &geom, 0.0).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-9);
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn vd_offset_idler_marks_path() {
        let bp = default_bp();
        let geom = SlitGeometry::for_pump(&bp, 1024, 10.0).unwrap();
        let (v, d) = vd_at_idler_position(&bp, &geom, 3.0 * bp.correlation_width).unwrap();
        assert!(d >= 0.95, "D = {d}");
        assert!(v < 0.35);
        // Far into one hump: which-path knowledge saturates.
        let (v_far, d_far) = vd_at_idler_position(&bp, &geom, 2.0 * W0).unwrap();
        assert!(d_far > 0.99, "D = {d_far}");
        assert!(v_far < 0.1, "V = {v_far}");
    }

    #[test]
    fn vd_duality_saturated_along_scan() {
        let bp = default_bp();
        let geom = SlitGeometry::for_pump(&bp, 1024, 10.0).unwrap();
        let mut x = -3.0 * W0;
        while x <= 3.0 * W0 {
            let (v, d) = vd_at_idler_position(&bp, &geom, x).unwrap();
            assert!((d * d + v * v - 1.0).abs() < 1e-12, "at {x}");
            x += 7.3;
        }
    }

    #[test]
    fn vd_antisymmetric_in_idler_position() {
        let bp = default_bp();
        let geom = SlitGeometry::for_pump(&bp, 1024, 10.0).unwrap();
        for x in [5.0, 22.0, 61.0, 140.0] {
            let (v_p, d_p) = vd_at_idler_position(&bp, &geom, x).unwrap();
            let (v_m, d_m) = vd_at_idler_position(&bp, &geom, -x).unwrap();
            assert_relative_eq!(v_p, v_m, epsilon = 1e-12);
            assert_relative_eq!(d_p, d_m, epsilon = 1e-12);
            // Hump probabilities swap.
            let a1 = conditional_signal_amplitude(&bp, x, geom.centers[0]).norm_sqr();
            let a2 = conditional_signal_amplitude(&bp, -x, geom.centers[1]).norm_sqr();
            assert_relative_eq!(a1, a2, max_relative = 1e-9);
        }
    }

    #[test]
    fn cone_coherence_closed_forms() {
        let (v, d) = cone_mode_coherence(W0, 0.0, 0.0).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-6);
        assert!(d < 2e-3);

        let (v, d) = cone_mode_coherence(W0, 2.0 * W0, 0.0).unwrap();
        assert_relative_eq!(v, (-1.0f64).exp(), epsilon = 1e-5);
        assert_relative_eq!(d, (1.0 - (-2.0f64).exp()).sqrt(), epsilon = 1e-5);
        assert_relative_eq!(d * d + v * v, 1.0, epsilon = 1e-9);

        let (v, d) = cone_mode_coherence(W0, 0.0, 0.10).unwrap();
        assert_relative_eq!(v, 0.90, epsilon = 1e-6);
        assert!(d < 2e-3);
        let sum = v * v + d * d;
        assert!(sum > 0.8 && sum < 0.9, "duality sum {sum}");
    }

    #[test]
    fn cone_coherence_validation() {
        assert!(cone_mode_coherence(0.0, 1.0, 0.0).is_err());
        assert!(cone_mode_coherence(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn slit_pattern_matches_dft_oracle() {
        // Cross-module check: the analytic two-slit pattern against the
        // discrete far-field transform of an explicit aperture profile,
        // evaluated on the transform's own angle grid (zero-padded for
        // resolution).
        let bp = default_bp();
        let base = SlitGeometry::for_pump(&bp, 1024, 10.0).unwrap();
        let a1 = Complex64::new(0.8, 0.0);
        let a2 = Complex64::new(-0.6, 0.0);

        let half_extent = 3200.0;
        let n = 65536;
        let aperture = TransverseProfile::from_fn_1d(half_extent, n, LAMBDA, |x| {
            if (x - base.centers[0]).abs() < base.width / 2.0 {
                a1
            } else if (x - base.centers[1]).abs() < base.width / 2.0 {
                a2
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let dft = far_field(&aperture).unwrap();
        let geom = SlitGeometry::new(base.centers, base.width, dft.x.clone(), LAMBDA).unwrap();
        let analytic = slit_far_field(a1, a2, &geom);

        let dft_intensity: Vec<f64> = dft.values.iter().map(|v| v.norm_sqr()).collect();
        let dft_peak = dft_intensity.iter().cloned().fold(0.0, f64::max);
        let analytic_peak = analytic.values.iter().map(|v| v.re).fold(0.0, f64::max);

        // Central five fringes.
        let spacing = base.centers[1] - base.centers[0];
        let window = 2.5 * LAMBDA / spacing;
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for (i, theta) in dft.x.coords().enumerate() {
            if theta.abs() > window {
                continue;
            }
            let a = analytic.values[i].re / analytic_peak;
            let b = dft_intensity[i] / dft_peak;
            sum_sq += (a - b) * (a - b);
            count += 1;
        }
        let rms = (sum_sq / count as f64).sqrt();
        assert!(rms < 0.01, "RMS mismatch {rms} over {count} samples");
    }

    #[test]
    fn geometry_validation() {
        let screen = GridAxis::centered(1e-5, 64);
        assert!(SlitGeometry::new([0.0, 10.0], 25.0, screen.clone(), LAMBDA).is_err());
        assert!(SlitGeometry::new([-50.0, 50.0], 0.0, screen, LAMBDA).is_err());
    }
}

//! Adaptive 1D quadrature on finite and semi-infinite intervals, Fourier-type
//! integrals with damped envelopes, and a tensor-product 3D rule used by the
//! test suites as a brute-force oracle.
//!
//! The 1D engine is a global adaptive Gauss–Kronrod (7/15) scheme in the
//! QUADPACK style: the interval list starts from caller-supplied breakpoints
//! and the segment with the largest error estimate is bisected until the
//! summed error meets `max(abs_tol, rel_tol·|I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::Vec3;

/// Semi-infinite domains are cut at this many decay lengths.
pub const TRUNCATION_DECAY_LENGTHS: f64 = 40.0;

/// Upper bound on initial panels for the oscillatory routines.
const MAX_OSCILLATION_PANELS: usize = 500_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error("invalid quadrature argument: {0}")]
    InvalidArgument(String),
    #[error("integrand returned {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },
    /// An integrand that itself integrates failed at `x`.
    #[error("nested evaluation failed at x = {x}: {message}")]
    Nested { x: f64, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Bisections allowed beyond the initial panels.
    pub max_subdivisions: usize,
    /// Characteristic decay length of the integrand; semi-infinite domains are
    /// truncated at [`TRUNCATION_DECAY_LENGTHS`] times this.
    pub decay_scale: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 10_000,
            decay_scale: 1.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_decay_scale(mut self, decay_scale: f64) -> Self {
        self.decay_scale = decay_scale;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(QuadratureError::InvalidSpec(format!(
                "abs_tol must be >= 0, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadratureError::InvalidSpec(
                "max_subdivisions must be >= 1".into(),
            ));
        }
        if !(self.decay_scale > 0.0 && self.decay_scale.is_finite()) {
            return Err(QuadratureError::InvalidSpec(format!(
                "decay_scale must be positive, got {}",
                self.decay_scale
            )));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    fn truncation_point(&self) -> f64 {
        TRUNCATION_DECAY_LENGTHS * self.decay_scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T = f64> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult<f64> {
    fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}

// Kronrod 15-point abscissae and weights with the embedded 7-point Gauss rule
// (QUADPACK qk15). Odd indices of XGK are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn checked<F>(f: &mut F, x: f64) -> Result<f64, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    let v = f(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadratureError::NonFinite { x, value: v })
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Segment, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = checked(f, center)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

fn adaptive<F>(
    f: &mut F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    spec.validate()?;
    if points.len() < 2 {
        return Err(QuadratureError::InvalidArgument(
            "need at least two breakpoints".into(),
        ));
    }
    if points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(QuadratureError::InvalidArgument(
            "breakpoints must be strictly increasing".into(),
        ));
    }

    let mut heap = BinaryHeap::with_capacity(points.len() * 2);
    let mut frozen: Vec<Segment> = Vec::new();
    let mut evaluations = 0;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        let seg = gauss_kronrod(f, w[0], w[1])?;
        evaluations += 15;
        total += seg.value;
        total_err += seg.error;
        heap.push(seg);
    }

    let mut subdivisions = 0;
    let converged = loop {
        if total_err <= spec.tolerance(total) {
            break true;
        }
        if subdivisions >= spec.max_subdivisions {
            break false;
        }
        let Some(worst) = heap.pop() else {
            break false;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || worst.b - worst.a < 1e3 * f64::EPSILON * mid.abs()
        {
            // Roundoff floor: this segment cannot be refined further.
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        evaluations += 30;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    };

    // Re-sum to shed the drift of the incremental updates.
    let segments = heap.iter().chain(frozen.iter());
    let (value, error_estimate) =
        segments.fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
        converged: converged || error_estimate <= spec.tolerance(value),
    })
}

fn lift<F: Fn(f64) -> f64>(f: F) -> impl FnMut(f64) -> Result<f64, QuadratureError> {
    move |x| Ok(f(x))
}

/// Adaptive quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError> {
    integrate_with_breakpoints(f, &[a, b], spec)
}

/// Adaptive quadrature over `[points[0], points[last]]`, seeded with the
/// given interior breakpoints.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError> {
    adaptive(&mut lift(f), points, spec)
}

/// Fallible-integrand form of [`integrate_with_breakpoints`].
pub fn try_integrate_with_breakpoints<F>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    adaptive(&mut f, points, spec)
}

/// `∫₀^∞ f(s) ds` for integrands decaying on `spec.decay_scale`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError> {
    try_integrate_semi_infinite(lift(f), &[], spec)
}

/// `∫₀^∞ f(s) ds` with optional interior breakpoints.
///
/// The domain is split at `L = 40·decay_scale`. `[0, L]` is integrated
/// adaptively; the remainder is mapped onto `(0, 1]` by `s = L/t` so that
/// slowly decaying tails are still accounted for.
pub fn try_integrate_semi_infinite<F>(
    mut f: F,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    spec.validate()?;
    let cut = spec.truncation_point();
    let mut points = vec![0.0];
    let mut interior: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > 0.0 && p < cut)
        .collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();
    points.extend(interior);
    points.push(cut);
    let head = adaptive(&mut f, &points, spec)?;

    let tail_spec = QuadratureSpec {
        abs_tol: 0.5 * spec.tolerance(head.value),
        ..*spec
    };
    let mut mapped = |t: f64| -> Result<f64, QuadratureError> {
        let s = cut / t;
        if !s.is_finite() {
            return Ok(0.0);
        }
        let v = f(s)?;
        if v == 0.0 {
            Ok(0.0)
        } else {
            Ok(v * cut / (t * t))
        }
    };
    let tail = adaptive(&mut mapped, &[0.0, 1.0], &tail_spec)?;
    Ok(head.combine(tail))
}

fn oscillation_points(
    offset: f64,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>, QuadratureError> {
    let cut = spec.truncation_point();
    let period = std::f64::consts::PI / omega;
    let panels = ((cut - offset * period) / period).ceil().max(0.0);
    if panels > MAX_OSCILLATION_PANELS as f64 {
        return Err(QuadratureError::InvalidArgument(format!(
            "omega = {omega} needs {panels} panels over the truncated domain"
        )));
    }
    let mut points = vec![0.0];
    let mut k = 0usize;
    loop {
        let p = (k as f64 + offset) * period;
        if p >= cut {
            break;
        }
        if p > 0.0 {
            points.push(p);
        }
        k += 1;
    }
    points.push(cut);
    Ok(points)
}

/// `∫₀^∞ f(s) sin(ωs) ds` for a smooth, damped envelope `f`.
///
/// The truncated domain is seeded with a panel between each pair of zeros of
/// the sine; each panel is then refined adaptively. Returns exactly zero for
/// `ω = 0`.
pub fn integrate_fourier_sine<F: Fn(f64) -> f64>(
    f: F,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError> {
    try_integrate_fourier_sine(lift(f), omega, spec)
}

pub fn try_integrate_fourier_sine<F>(
    mut f: F,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    spec.validate()?;
    if !omega.is_finite() {
        return Err(QuadratureError::InvalidArgument(format!(
            "omega must be finite, got {omega}"
        )));
    }
    if omega == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let w = omega.abs();
    let points = oscillation_points(0.0, w, spec)?;
    let mut g = |s: f64| Ok(f(s)? * (w * s).sin());
    let r = adaptive(&mut g, &points, spec)?;
    Ok(r.scaled(omega.signum()))
}

/// `∫₀^∞ f(s) cos(ωs) ds`, panels aligned with the zeros of the cosine.
pub fn try_integrate_fourier_cosine<F>(
    mut f: F,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    spec.validate()?;
    if !omega.is_finite() {
        return Err(QuadratureError::InvalidArgument(format!(
            "omega must be finite, got {omega}"
        )));
    }
    let w = omega.abs();
    let points = if w == 0.0 {
        vec![0.0, spec.truncation_point()]
    } else {
        oscillation_points(0.5, w, spec)?
    };
    let mut g = |s: f64| Ok(f(s)? * (w * s).cos());
    adaptive(&mut g, &points, spec)
}

/// `∫_{−∞}^{∞} f(|τ|) e^{−iωτ} dτ` for an even envelope given on `(0, ∞)`.
///
/// The full-line transform is `2·Re` of the half-line one; the imaginary part
/// vanishes identically for even damping.
pub fn integrate_fourier_complex<F: Fn(f64) -> f64>(
    f: F,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<Complex64>, QuadratureError> {
    try_integrate_fourier_complex(lift(f), omega, spec)
}

pub fn try_integrate_fourier_complex<F>(
    f: F,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult<Complex64>, QuadratureError>
where
    F: FnMut(f64) -> Result<f64, QuadratureError>,
{
    let half = try_integrate_fourier_cosine(f, omega, spec)?;
    Ok(QuadratureResult {
        value: Complex64::new(2.0 * half.value, 0.0),
        error_estimate: 2.0 * half.error_estimate,
        evaluations: half.evaluations,
        converged: half.converged,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Brute-force tensor-product quadrature of `f` over `[-h, h]³`.
///
/// Each axis is cut into an even number of equal panels carrying an 8-point
/// Gauss–Legendre rule, `n` points per axis in total (rounded up). Slow by
/// construction; intended as a test oracle.
pub fn integrate_3d_oracle<F>(f: F, half_width: f64, n: usize) -> Result<f64, QuadratureError>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    if n < 16 {
        return Err(QuadratureError::InvalidArgument(format!(
            "need at least 16 points per axis, got {n}"
        )));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(QuadratureError::InvalidArgument(format!(
            "half width must be positive, got {half_width}"
        )));
    }
    const ORDER: usize = 8;
    let mut panels = n.div_ceil(ORDER);
    panels += panels % 2;
    let (gx, gw) = gauss_legendre(ORDER);
    let width = 2.0 * half_width / panels as f64;
    let mut nodes = Vec::with_capacity(panels * ORDER);
    for p in 0..panels {
        let c = -half_width + (p as f64 + 0.5) * width;
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push((c + 0.5 * width * x, 0.5 * width * w));
        }
    }
    let sum = nodes
        .par_iter()
        .map(|&(x, wx)| {
            let mut sx = 0.0;
            for &(y, wy) in &nodes {
                let mut sy = 0.0;
                for &(z, wz) in &nodes {
                    sy += wz * f([x, y, z]);
                }
                sx += wy * sy;
            }
            wx * sx
        })
        .sum::<f64>();
    Ok(sum)
}

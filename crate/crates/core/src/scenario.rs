//! Scattered-source simulation on a uniform linear array: covariance
//! synthesis from angular power densities, snapshot generation, sample
//! covariance, and output SINR evaluation.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{psd_sqrt, CMat, HermitianMatrix};

/// Uniform linear array along a line, spacing in wavelengths.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub n_sensors: usize,
    pub spacing_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn new(n_sensors: usize, spacing_wavelengths: f64) -> Result<Self> {
        if n_sensors < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 sensors, got {n_sensors}"
            )));
        }
        if !(spacing_wavelengths > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sensor spacing must be positive, got {spacing_wavelengths}"
            )));
        }
        Ok(ArrayGeometry {
            n_sensors,
            spacing_wavelengths,
        })
    }

    /// Half-wavelength ULA.
    pub fn half_wavelength(n_sensors: usize) -> Result<Self> {
        ArrayGeometry::new(n_sensors, 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Gaussian,
    Uniform,
}

/// Angular power density of one scattered source.
///
/// Spread convention: for `Gaussian` the spread is one standard deviation
/// (the density is truncated at four standard deviations and renormalized);
/// for `Uniform` it is the full support width, i.e. the density lives on
/// `[center - spread/2, center + spread/2]`. `power` is the per-sensor
/// power on a linear scale.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AngularDensity {
    pub kind: DensityKind,
    pub center_deg: f64,
    pub spread_deg: f64,
    pub power: f64,
}

impl AngularDensity {
    pub fn gaussian(center_deg: f64, spread_deg: f64, power: f64) -> Result<Self> {
        AngularDensity::build(DensityKind::Gaussian, center_deg, spread_deg, power)
    }

    pub fn uniform(center_deg: f64, spread_deg: f64, power: f64) -> Result<Self> {
        AngularDensity::build(DensityKind::Uniform, center_deg, spread_deg, power)
    }

    fn build(kind: DensityKind, center_deg: f64, spread_deg: f64, power: f64) -> Result<Self> {
        if !(spread_deg > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "angular spread must be positive, got {spread_deg}"
            )));
        }
        if !(power >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "source power must be nonnegative, got {power}"
            )));
        }
        Ok(AngularDensity {
            kind,
            center_deg,
            spread_deg,
            power,
        })
    }

    pub fn with_power(&self, power: f64) -> AngularDensity {
        AngularDensity { power, ..*self }
    }

    /// Angular support used for quadrature, clipped to the visible region.
    fn support(&self) -> (f64, f64) {
        let half = match self.kind {
            DensityKind::Gaussian => 4.0 * self.spread_deg,
            DensityKind::Uniform => 0.5 * self.spread_deg,
        };
        let lo = (self.center_deg - half).max(-90.0);
        let hi = (self.center_deg + half).min(90.0);
        (lo, hi)
    }

    /// Unnormalized density value at an angle inside the support.
    fn weight(&self, theta_deg: f64) -> f64 {
        match self.kind {
            DensityKind::Gaussian => {
                let z = (theta_deg - self.center_deg) / self.spread_deg;
                (-0.5 * z * z).exp()
            }
            DensityKind::Uniform => 1.0,
        }
    }
}

/// Full simulation setup: geometry, sources, noise, and sampling plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub geometry: ArrayGeometry,
    pub signal: AngularDensity,
    pub interferers: Vec<AngularDensity>,
    pub presumed_signal: AngularDensity,
    pub noise_power: f64,
    pub snr_db: f64,
    pub inr_db: f64,
    pub snapshots: usize,
    pub runs: usize,
    pub seed: u64,
    pub grid_points: usize,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snapshots < 1 {
            return Err(Error::InvalidArgument("need at least one snapshot".into()));
        }
        if self.runs < 1 {
            return Err(Error::InvalidArgument("need at least one run".into()));
        }
        if self.grid_points < 90 {
            return Err(Error::InvalidArgument(format!(
                "grid_points must be at least 90, got {}",
                self.grid_points
            )));
        }
        if !(self.noise_power > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise power must be positive, got {}",
                self.noise_power
            )));
        }
        Ok(())
    }

    /// Default study setup: ten-sensor half-wavelength ULA, 0 dB noise,
    /// Gaussian signal at 30 degrees with 4 degree spread, presumed signal
    /// Gaussian at 34 degrees with 6 degree spread, one uniform interferer
    /// at 10 degrees with 10 degree spread at INR 20 dB, 50 snapshots.
    pub fn baseline(snr_db: f64, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            geometry: ArrayGeometry::half_wavelength(10).expect("valid geometry"),
            signal: AngularDensity::gaussian(30.0, 4.0, 1.0).expect("valid density"),
            interferers: vec![AngularDensity::uniform(10.0, 10.0, 1.0).expect("valid density")],
            presumed_signal: AngularDensity::gaussian(34.0, 6.0, 1.0).expect("valid density"),
            noise_power: 1.0,
            snr_db,
            inr_db: 20.0,
            snapshots: 50,
            runs: 100,
            seed,
            grid_points: 720,
        }
    }

    pub fn signal_power(&self) -> f64 {
        self.noise_power * 10f64.powf(self.snr_db / 10.0)
    }

    pub fn interferer_power(&self) -> f64 {
        self.noise_power * 10f64.powf(self.inr_db / 10.0)
    }
}

/// ULA steering vector: entry n is exp(j 2 pi spacing n sin(theta)).
pub fn steering_vector(theta_deg: f64, g: &ArrayGeometry) -> Result<Vec<Complex64>> {
    if !(theta_deg.abs() <= 90.0) {
        return Err(Error::InvalidArgument(format!(
            "angle {theta_deg} outside [-90, 90] degrees"
        )));
    }
    let phase_step =
        2.0 * std::f64::consts::PI * g.spacing_wavelengths * theta_deg.to_radians().sin();
    Ok((0..g.n_sensors)
        .map(|n| Complex64::from_polar(1.0, phase_step * n as f64))
        .collect())
}

/// Covariance of a locally incoherently scattered source by midpoint
/// quadrature over the angular density. Normalized so that
/// trace(R) = n_sensors * power (per-sensor power convention).
pub fn scattered_covariance(
    d: &AngularDensity,
    g: &ArrayGeometry,
    grid_points: usize,
) -> Result<HermitianMatrix> {
    if grid_points < 1 {
        return Err(Error::InvalidArgument("grid_points must be >= 1".into()));
    }
    let (lo, hi) = d.support();
    if !(hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "density support [{lo}, {hi}] is empty after clipping to the visible region"
        )));
    }
    let n = g.n_sensors;
    let step = (hi - lo) / grid_points as f64;
    let mut weights = Vec::with_capacity(grid_points);
    let mut steerings = Vec::with_capacity(grid_points);
    let mut mass = 0.0;
    for k in 0..grid_points {
        let theta = lo + (k as f64 + 0.5) * step;
        let w = d.weight(theta);
        mass += w;
        weights.push(w);
        steerings.push(steering_vector(theta, g)?);
    }
    let mut acc = CMat::zeros(n, n);
    for (w, a) in weights.iter().zip(&steerings) {
        let scale = d.power * w / mass;
        for i in 0..n {
            for j in 0..n {
                acc[(i, j)] += scale * a[i] * a[j].conj();
            }
        }
    }
    HermitianMatrix::new(acc)
}

/// True covariances: the scattered desired-signal covariance and the
/// interference-plus-noise covariance (noise folded in as noise_power * I).
pub fn synthesize_truth(cfg: &ScenarioConfig) -> Result<(HermitianMatrix, HermitianMatrix)> {
    cfg.validate()?;
    let signal = cfg.signal.with_power(cfg.signal_power());
    let r_s = scattered_covariance(&signal, &cfg.geometry, cfg.grid_points)?;
    let n = cfg.geometry.n_sensors;
    let mut r_ipn = HermitianMatrix::zeros(n);
    for interferer in &cfg.interferers {
        let d = interferer.with_power(cfg.interferer_power());
        r_ipn = r_ipn.add(&scattered_covariance(&d, &cfg.geometry, cfg.grid_points)?);
    }
    r_ipn = r_ipn.add_scaled_identity(cfg.noise_power);
    Ok((r_s, r_ipn))
}

/// Presumed (mismatched) signal covariance at the configured signal power.
pub fn presumed_signal_covariance(cfg: &ScenarioConfig) -> Result<HermitianMatrix> {
    cfg.validate()?;
    let d = cfg.presumed_signal.with_power(cfg.signal_power());
    scattered_covariance(&d, &cfg.geometry, cfg.grid_points)
}

/// T array snapshots y(t) = R_s^{1/2} z_s(t) + R_ipn^{1/2} z_i(t) with
/// independent circular complex standard normal driving vectors from a
/// ChaCha stream keyed by `seed`. Deterministic for a fixed seed.
pub fn generate_snapshots(
    r_s: &HermitianMatrix,
    r_ipn: &HermitianMatrix,
    t: usize,
    seed: u64,
) -> Result<Vec<Vec<Complex64>>> {
    if r_s.dim() != r_ipn.dim() {
        return Err(Error::DimensionMismatch(format!(
            "covariance dims {} vs {}",
            r_s.dim(),
            r_ipn.dim()
        )));
    }
    let n = r_s.dim();
    let s_root = psd_sqrt(r_s)?;
    let i_root = psd_sqrt(r_ipn)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut snapshots = Vec::with_capacity(t);
    for _ in 0..t {
        let z_s = circular_normal(n, &mut rng);
        let z_i = circular_normal(n, &mut rng);
        let sig = s_root.matvec(&z_s);
        let ipn = i_root.matvec(&z_i);
        snapshots.push((0..n).map(|i| sig[i] + ipn[i]).collect());
    }
    Ok(snapshots)
}

/// Circular complex standard normal vector: E[z z^H] = I.
fn circular_normal(n: usize, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * half, im * half)
        })
        .collect()
}

/// Sample covariance (1/T) sum y(t) y(t)^H.
pub fn sample_covariance(snapshots: &[Vec<Complex64>]) -> Result<HermitianMatrix> {
    let t = snapshots.len();
    if t == 0 {
        return Err(Error::InvalidArgument(
            "sample covariance of an empty snapshot list".into(),
        ));
    }
    let n = snapshots[0].len();
    for (idx, y) in snapshots.iter().enumerate() {
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "snapshot {idx} has length {}, expected {n}",
                y.len()
            )));
        }
    }
    let mut acc = CMat::zeros(n, n);
    let scale = 1.0 / t as f64;
    for y in snapshots {
        for i in 0..n {
            for j in 0..n {
                acc[(i, j)] += scale * y[i] * y[j].conj();
            }
        }
    }
    HermitianMatrix::new(acc)
}

/// Output SINR (w^H R_s w) / (w^H R_ipn w); scale-invariant in w.
pub fn evaluate_output_sinr(
    w: &[Complex64],
    r_s: &HermitianMatrix,
    r_ipn: &HermitianMatrix,
) -> Result<f64> {
    let norm_sq: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return Err(Error::InvalidArgument(
            "output SINR undefined for w = 0".into(),
        ));
    }
    let num = r_s.quadratic_form(w);
    let den = r_ipn.quadratic_form(w);
    if den <= 0.0 {
        return Err(Error::InvalidArgument(
            "interference-plus-noise power vanishes along w".into(),
        ));
    }
    Ok(num / den)
}

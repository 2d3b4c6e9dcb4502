//! Shared instance builders for the criterion benchmarks.

use rabf_core::beamformer::{derive_params, factorize_presumed, initial_point, FactorQ};
use rabf_core::scenario::{
    generate_snapshots, presumed_signal_covariance, sample_covariance, synthesize_truth,
    ScenarioConfig,
};
use rabf_core::{BeamWeights, HermitianMatrix};

pub struct Instance {
    pub rhat: HermitianMatrix,
    pub q: FactorQ,
    pub params: rabf_core::RobustParams,
    pub w0: BeamWeights,
}

/// Baseline-scenario instance at the given SNR and seed.
pub fn scenario_instance(snr_db: f64, seed: u64) -> Instance {
    let cfg = ScenarioConfig::baseline(snr_db, seed);
    let (r_s, r_ipn) = synthesize_truth(&cfg).unwrap();
    let snaps = generate_snapshots(&r_s, &r_ipn, cfg.snapshots, seed).unwrap();
    let rhat = sample_covariance(&snaps).unwrap();
    let rs = presumed_signal_covariance(&cfg).unwrap();
    let params = derive_params(&rhat, &rs);
    let q = factorize_presumed(&rs, None).unwrap();
    let w0 = initial_point(&q, params.eta).unwrap();
    Instance {
        rhat,
        q,
        params,
        w0,
    }
}

//! The 24-dimensional hand-crafted feature vector: the 22 canonical
//! time-series characteristics followed by the raw mean and standard
//! deviation.

pub mod features;
mod spline;
mod util;

use serde::{Deserialize, Serialize};

use crate::audio::Waveform;
use crate::error::{Error, Result};

/// Shortest series accepted by [`compute_catch24`].
pub const MIN_SERIES_LEN: usize = 32;

pub const N_FEATURES: usize = 24;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "DN_HistogramMode_5",
    "DN_HistogramMode_10",
    "CO_f1ecac",
    "CO_FirstMin_ac",
    "CO_HistogramAMI_even_2_5",
    "CO_trev_1_num",
    "MD_hrv_classic_pnn40",
    "SB_BinaryStats_mean_longstretch1",
    "SB_TransitionMatrix_3ac_sumdiagcov",
    "PD_PeriodicityWang_th0_01",
    "CO_Embed2_Dist_tau_d_expfit_meandiff",
    "IN_AutoMutualInfoStats_40_gaussian_fmmi",
    "FC_LocalSimple_mean1_tauresrat",
    "DN_OutlierInclude_p_001_mdrmd",
    "DN_OutlierInclude_n_001_mdrmd",
    "SP_Summaries_welch_rect_area_5_1",
    "SB_BinaryStats_diff_longstretch0",
    "SB_MotifThree_quantile_hh",
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
    "SP_Summaries_welch_rect_centroid",
    "FC_LocalSimple_mean3_stderr",
    "DN_Mean",
    "DN_Spread_Std",
];

type FeatureFn = fn(&[f64]) -> f64;

const CANONICAL: [FeatureFn; 22] = [
    features::dn_histogram_mode_5,
    features::dn_histogram_mode_10,
    features::co_f1ecac,
    features::co_first_min_ac,
    features::co_histogram_ami_even_2_5,
    features::co_trev_1_num,
    features::md_hrv_classic_pnn40,
    features::sb_binary_stats_mean_longstretch1,
    features::sb_transition_matrix_3ac_sumdiagcov,
    features::pd_periodicity_wang_th0_01,
    features::co_embed2_dist_tau_d_expfit_meandiff,
    features::in_auto_mutual_info_stats_40_gaussian_fmmi,
    features::fc_local_simple_mean1_tauresrat,
    features::dn_outlier_include_p_001_mdrmd,
    features::dn_outlier_include_n_001_mdrmd,
    features::sp_summaries_welch_rect_area_5_1,
    features::sb_binary_stats_diff_longstretch0,
    features::sb_motif_three_quantile_hh,
    features::sc_fluct_anal_2_rsrangefit_50_1_logi_prop_r1,
    features::sc_fluct_anal_2_dfa_50_1_2_logi_prop_r1,
    features::sp_summaries_welch_rect_centroid,
    features::fc_local_simple_mean3_stderr,
];

/// Fixed-length utterance representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub feature_names: Vec<String>,
    /// `true` where the feature was undefined and replaced by 0.
    pub nan_mask: Vec<bool>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, feature_names: Vec<String>) -> Self {
        let nan_mask = vec![false; values.len()];
        Self {
            values,
            feature_names,
            nan_mask,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Mask rendered as a string of `0`/`1`, one character per feature.
    pub fn mask_bits(&self) -> String {
        self.nan_mask
            .iter()
            .map(|&m| if m { '1' } else { '0' })
            .collect()
    }
}

/// Raw-series summary appended to the canonical features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub n: usize,
}

impl SeriesStats {
    pub fn of(x: &[f64]) -> Self {
        let n = x.len();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        Self {
            mean,
            std: var.sqrt(),
            n,
        }
    }
}

/// Result of [`zscore_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZScored {
    pub values: Vec<f64>,
    /// Set when the input was constant and the output is all zeros.
    pub degenerate: bool,
}

/// Standardises to zero mean and unit population standard deviation.
pub fn zscore_series(x: &[f64]) -> Result<ZScored> {
    if x.len() < 2 {
        return Err(Error::SeriesTooShort { len: x.len(), min: 2 });
    }
    let stats = SeriesStats::of(x);
    if is_constant(x) || stats.std == 0.0 {
        return Ok(ZScored {
            values: vec![0.0; x.len()],
            degenerate: true,
        });
    }
    Ok(ZScored {
        values: x.iter().map(|v| (v - stats.mean) / stats.std).collect(),
        degenerate: false,
    })
}

fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

/// Computes the 24 features of a waveform segment.
pub fn compute_catch24(w: &Waveform) -> Result<FeatureVector> {
    catch24_series(&w.samples)
}

/// Computes the 24 features of an arbitrary series.
pub fn catch24_series(x: &[f64]) -> Result<FeatureVector> {
    if x.len() < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort {
            len: x.len(),
            min: MIN_SERIES_LEN,
        });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }
    let stats = SeriesStats::of(x);
    let mut values = vec![0.0; N_FEATURES];
    let mut nan_mask = vec![false; N_FEATURES];

    if is_constant(x) {
        nan_mask[..22].iter_mut().for_each(|m| *m = true);
    } else {
        // canonical preprocessing standardises with the sample deviation
        let sd = util::stddev(x);
        let z: Vec<f64> = x.iter().map(|v| (v - stats.mean) / sd).collect();
        for (i, f) in CANONICAL.iter().enumerate() {
            let v = f(&z);
            if v.is_finite() {
                values[i] = v;
            } else {
                nan_mask[i] = true;
            }
        }
    }
    values[22] = stats.mean;
    values[23] = stats.std;

    Ok(FeatureVector {
        values,
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        nan_mask,
    })
}

//! End-to-end orchestration: scattering, thresholding and reduction for one
//! channel under a [`PipelineConfig`].

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::filterbank::{build_scale_set, ScaleSet};
use crate::representation::{transient_representation, Reducer, TransientRep};
use crate::scattering::{ScatteringCoeffs, ScatteringPlan};

/// Everything computed for one signal.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub coeffs: ScatteringCoeffs,
    pub rep: TransientRep,
}

#[derive(Clone, Debug)]
pub struct Pipeline {
    config: PipelineConfig,
    scales1: ScaleSet,
    scales2: ScaleSet,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let scales1 = build_scale_set(config.j1, config.q1)?;
        let scales2 = build_scale_set(config.j2, config.q2)?;
        Ok(Self {
            config,
            scales1,
            scales2,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn scales1(&self) -> &ScaleSet {
        &self.scales1
    }

    pub fn scales2(&self) -> &ScaleSet {
        &self.scales2
    }

    /// Filter banks and FFT plan for signals of `n` samples.
    pub fn plan(&self, n: usize) -> Result<ScatteringPlan> {
        ScatteringPlan::new(n, &self.scales1, &self.scales2)
    }

    pub fn analyze(&self, x: &[f64]) -> Result<Analysis> {
        self.analyze_with(&self.plan(x.len())?, x, self.config.reducer)
    }

    /// Like [`analyze`](Self::analyze) with an explicit plan and reducer, so
    /// repeated calls on equal-length windows share one set of filters.
    pub fn analyze_with(&self, plan: &ScatteringPlan, x: &[f64], reducer: Reducer) -> Result<Analysis> {
        let coeffs = plan.transform(x)?;
        let rep = transient_representation(coeffs.s2.view(), self.config.p, reducer)?;
        Ok(Analysis { coeffs, rep })
    }

    /// `θ` for one window; skips `U₂` bookkeeping that the trajectory never
    /// reads.
    pub fn theta_with(&self, plan: &ScatteringPlan, x: &[f64]) -> Result<Vec<f64>> {
        let u1 = plan.first_layer_padded(x)?;
        let (_, s2) = plan.second_layer(u1.view())?;
        let rep = transient_representation(s2.view(), self.config.p, Reducer::Pca)?;
        Ok(rep.theta.unwrap_or_default())
    }
}

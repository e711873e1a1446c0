use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipeline::Pipeline;
use crate::signal::Signal;

/// Overlapping analysis windows `[starts[i], starts[i] + window_len)` with
/// `starts[i] = i · hop`, as many as fit in the signal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowPlan {
    pub window_len: usize,
    pub hop: usize,
    pub starts: Vec<usize>,
}

impl WindowPlan {
    pub fn count(&self) -> usize {
        self.starts.len()
    }

    /// One past the last sample read by window `w`.
    pub fn end(&self, w: usize) -> usize {
        self.starts[w] + self.window_len
    }
}

pub fn plan_windows(n: usize, window_len: usize, hop: usize) -> Result<WindowPlan> {
    if window_len < 2 || hop == 0 || hop > window_len {
        return Err(Error::InvalidWindowPlan { window_len, hop });
    }
    if n < window_len {
        return Err(Error::SignalShorterThanWindow { n, window_len });
    }
    let count = (n - window_len) / hop + 1;
    Ok(WindowPlan {
        window_len,
        hop,
        starts: (0..count).map(|i| i * hop).collect(),
    })
}

/// `θ` for every window, shape `(windows, |Λ₂|)`.
///
/// Always uses the PCA reduction, whatever the configured reducer, since `θ`
/// only exists for PCA. Row `w` reads samples of window `w` only.
pub fn theta_trajectory(x: &Signal, plan: &WindowPlan, pipeline: &Pipeline) -> Result<Array2<f64>> {
    if let Some(&last) = plan.starts.last() {
        if last + plan.window_len > x.len() {
            return Err(Error::SignalShorterThanWindow {
                n: x.len(),
                window_len: last + plan.window_len,
            });
        }
    }
    let scattering = pipeline.plan(plan.window_len)?;
    let bands = pipeline.scales2().len();
    let mut out = Array2::zeros((plan.count(), bands));
    for (w, &start) in plan.starts.iter().enumerate() {
        let window = &x.samples()[start..start + plan.window_len];
        let theta = pipeline.theta_with(&scattering, window)?;
        out.row_mut(w).iter_mut().zip(&theta).for_each(|(d, v)| *d = *v);
    }
    Ok(out)
}

use ndarray::{s, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::representation::{Reducer, TransientRep};
use crate::scattering::ScatteringCoeffs;

/// Per-frame feature vector
/// `[S₀x(t) | S₁x(t,·) | S₂x(t,·,·) | m(·,·) | θ | Lx(t,·)]`, blocks indexed
/// `λ₁`-major. The `θ` block is absent for max-pooling.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `1 + J₁Q₁ + 2·J₁Q₁J₂Q₂ + 2·J₂Q₂`, minus one `J₂Q₂` block for max-pooling.
pub fn feature_dimension(j1: usize, q1: usize, j2: usize, q2: usize, reducer: Reducer) -> usize {
    let l1 = j1 * q1;
    let l2 = j2 * q2;
    let theta = match reducer {
        Reducer::Pca => l2,
        Reducer::MaxPool => 0,
    };
    1 + l1 + 2 * l1 * l2 + theta + l2
}

pub fn assemble_features(coeffs: &ScatteringCoeffs, rep: &TransientRep, t: usize) -> Result<FeatureVector> {
    let n = coeffs.n();
    if t >= n {
        return Err(Error::FrameOutOfRange { index: t, n });
    }
    check_consistent(coeffs, rep)?;
    let mut values = Vec::with_capacity(dimension_of(coeffs, rep));
    values.push(coeffs.s0[t]);
    values.extend(coeffs.s1.column(t).iter());
    values.extend(coeffs.s2.slice(s![.., .., t]).iter());
    values.extend(rep.m.iter());
    if let Some(theta) = &rep.theta {
        values.extend(theta.iter());
    }
    values.extend(rep.lx.column(t).iter());
    Ok(FeatureVector { values })
}

fn dimension_of(coeffs: &ScatteringCoeffs, rep: &TransientRep) -> usize {
    let (l1, l2) = (coeffs.scales1.len(), coeffs.scales2.len());
    let theta = rep.theta.as_ref().map_or(0, Vec::len);
    1 + l1 + 2 * l1 * l2 + theta + l2
}

fn check_consistent(coeffs: &ScatteringCoeffs, rep: &TransientRep) -> Result<()> {
    let (l1, l2, n) = coeffs.s2.dim();
    if rep.m.dim() != (l1, l2) || rep.lx.dim() != (l2, n) {
        return Err(Error::ShapeMismatch(format!(
            "representation shapes m={:?}, lx={:?} do not match S2 {:?}",
            rep.m.dim(),
            rep.lx.dim(),
            (l1, l2, n)
        )));
    }
    Ok(())
}

/// Averages the columns of a band-major `(bands, n)` map over consecutive
/// non-overlapping frames of `frame_len` samples (the last frame may be
/// shorter). Output shape `(frames, bands)`.
pub fn frame_average(map: ArrayView2<f64>, frame_len: usize) -> Array2<f64> {
    let (bands, n) = map.dim();
    let frame_len = frame_len.max(1);
    let frames = n.div_ceil(frame_len);
    let mut out = Array2::zeros((frames, bands));
    for f in 0..frames {
        let start = f * frame_len;
        let end = (start + frame_len).min(n);
        let width = (end - start) as f64;
        for b in 0..bands {
            out[[f, b]] = map.slice(s![b, start..end]).sum() / width;
        }
    }
    out
}

/// Frame-averaged full feature vectors, shape `(frames, dim)`.
pub fn frame_features(coeffs: &ScatteringCoeffs, rep: &TransientRep, frame_len: usize) -> Result<Array2<f64>> {
    check_consistent(coeffs, rep)?;
    let (l1, l2, n) = coeffs.s2.dim();
    let s0 = ArrayView2::from_shape((1, n), &coeffs.s0).expect("1 x n view");
    let s2 = coeffs
        .s2
        .view()
        .into_shape_with_order((l1 * l2, n))
        .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
    let blocks = [
        frame_average(s0, frame_len),
        frame_average(coeffs.s1.view(), frame_len),
        frame_average(s2, frame_len),
    ];
    let lx = frame_average(rep.lx.view(), frame_len);
    let frames = lx.nrows();
    let constant: Vec<f64> = rep
        .m
        .iter()
        .cloned()
        .chain(rep.theta.iter().flatten().cloned())
        .collect();

    let dim = dimension_of(coeffs, rep);
    let mut out = Array2::zeros((frames, dim));
    for f in 0..frames {
        let row: Vec<f64> = blocks
            .iter()
            .flat_map(|b| b.row(f).to_vec())
            .chain(constant.iter().cloned())
            .chain(lx.row(f).iter().cloned())
            .collect();
        out.row_mut(f).iter_mut().zip(row).for_each(|(d, v)| *d = v);
    }
    Ok(out)
}

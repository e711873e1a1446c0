//! Order statistics by selection.

use crate::error::{Error, Result};

/// Lower median: the `⌈n/2⌉`-th smallest element (1-based).
///
/// Runs in expected linear time. Values are compared with `f64::total_cmp`,
/// so the result does not depend on input order.
pub fn quickselect_median(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut buf = x.to_vec();
    Ok(select_nth_in_place(&mut buf, lower_median_index(x.len())))
}

/// Zero-based rank of the lower median in a sequence of length `n`.
pub fn lower_median_index(n: usize) -> usize {
    (n.max(1) - 1) / 2
}

/// Returns the `k`-th smallest (zero-based) value, partially reordering `buf`.
///
/// # Panics
///
/// If `k >= buf.len()`.
pub fn select_nth_in_place(buf: &mut [f64], k: usize) -> f64 {
    let (_, nth, _) = buf.select_nth_unstable_by(k, f64::total_cmp);
    *nth
}

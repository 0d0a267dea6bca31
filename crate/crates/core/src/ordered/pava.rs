//! Weighted pool-adjacent-violators for the nonincreasing constraint.

/// Weighted least-squares fit of a nonincreasing sequence to `values`.
///
/// Minimises `Σ w_i (f_i - y_i)²` over nonincreasing `f`.
pub fn nonincreasing_fit(values: &[f64], weights: &[f64]) -> Vec<f64> {
    debug_assert_eq!(values.len(), weights.len());
    // (weighted mean, total weight, run length)
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&y, &w) in values.iter().zip(weights) {
        let mut current = (y, w, 1usize);
        while let Some(&(prev_mean, prev_w, prev_len)) = blocks.last() {
            if prev_mean >= current.0 {
                break;
            }
            blocks.pop();
            let total = prev_w + current.1;
            let mean = (prev_mean * prev_w + current.0 * current.1) / total;
            current = (mean, total, prev_len + current.2);
        }
        blocks.push(current);
    }
    let mut out = Vec::with_capacity(values.len());
    for (mean, _, len) in blocks {
        out.extend(std::iter::repeat_n(mean, len));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn already_monotone_is_fixed() {
        let y = [3.0, 2.0, 2.0, -1.0];
        assert_eq!(nonincreasing_fit(&y, &[1.0; 4]), y.to_vec());
    }

    #[test]
    fn pools_violators_with_weights() {
        // (1, 3) with weights (1, 3) pools to the weighted mean 2.5.
        let f = nonincreasing_fit(&[1.0, 3.0], &[1.0, 3.0]);
        assert_eq!(f, vec![2.5, 2.5]);
        let f = nonincreasing_fit(&[1.0, 3.0, -2.0], &[1.0, 1.0, 1.0]);
        assert_eq!(f, vec![2.0, 2.0, -2.0]);
    }

    #[test]
    fn cascading_merge() {
        let f = nonincreasing_fit(&[0.0, 1.0, 2.0, 3.0], &[1.0; 4]);
        assert_eq!(f, vec![1.5; 4]);
    }
}

//! Small shared numeric helpers.

/// Pairwise summation: deterministic regardless of thread count and more
/// accurate than a running sum for long vectors.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_on_small_inputs() {
        let v: Vec<f64> = (0..17).map(|i| i as f64 * 0.25).collect();
        assert_eq!(pairwise_sum(&v), v.iter().sum::<f64>());
    }

    #[test]
    fn agrees_with_compensated_sum_on_long_input() {
        let mut state = 0x2545f4914f6cdd1du64;
        let v: Vec<f64> = (0..100_000)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 52) as f64 - 1.0
            })
            .collect();
        // Kahan compensated reference
        let mut sum = 0.0;
        let mut carry = 0.0;
        for &x in &v {
            let y = x - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        assert!((pairwise_sum(&v) - sum).abs() < 1e-11);
    }
}

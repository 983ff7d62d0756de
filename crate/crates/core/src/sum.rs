//! Compensated summation.

/// Neumaier's variant of Kahan summation.
pub fn neumaier<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::neumaier;

    #[test]
    fn recovers_cancelled_terms() {
        assert_eq!(neumaier([1.0, 1e100, 1.0, -1e100]), 2.0);
        assert_eq!(neumaier(std::iter::empty()), 0.0);
    }
}

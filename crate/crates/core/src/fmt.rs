//! Numeric formatting and summation helpers shared by the library and the
//! command-line front end.

/// Formats a float with 17 significant digits in scientific notation, enough
/// for bit-exact round-tripping through text. Locale independent.
pub fn g17(value: f64) -> String {
    format!("{value:.16e}")
}

/// Neumaier-compensated sum; keeps long probability and work sums accurate
/// to a few ulps independent of term count.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for value in values {
        let t = sum + value;
        if sum.abs() >= value.abs() {
            compensation += (sum - t) + value;
        } else {
            compensation += (value - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// Pairwise (cascade) summation; the result depends only on the input order.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

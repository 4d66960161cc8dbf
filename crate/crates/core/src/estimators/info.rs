use std::f64::consts::LN_2;

use rayon::prelude::*;
use statrs::function::gamma::digamma;

use super::kdtree::KdTree;
use super::{EnsembleMatrix, EstimatorMethod, InfoEstimate};
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

pub const DEFAULT_K_NEIGHBORS: usize = 4;

/// Conditional entropies need at least this many rows.
pub const MIN_CONDITIONAL_ROWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnOptions {
    pub k_neighbors: usize,
    /// Largest tolerated fraction of points whose k-th neighbour sits at
    /// distance zero. Such points are dropped from the average; above this
    /// fraction the sample is reported as degenerate.
    pub max_duplicate_fraction: f64,
}

impl Default for KnnOptions {
    fn default() -> Self {
        KnnOptions { k_neighbors: DEFAULT_K_NEIGHBORS, max_duplicate_fraction: 0.01 }
    }
}

fn check_neighbors(rows: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k_neighbors must be >= 1"));
    }
    if rows <= k {
        return Err(Error::InsufficientSamples { needed: k + 1, got: rows });
    }
    Ok(())
}

/// Kozachenko-Leonenko estimate of the joint differential entropy of the
/// matrix columns, in bits.
pub fn knn_entropy(e: &EnsembleMatrix, k_neighbors: usize) -> Result<InfoEstimate> {
    knn_entropy_with(e, KnnOptions { k_neighbors, ..KnnOptions::default() })
}

pub fn knn_entropy_with(e: &EnsembleMatrix, opts: KnnOptions) -> Result<InfoEstimate> {
    let (n, d, k) = (e.rows(), e.cols(), opts.k_neighbors);
    check_neighbors(n, k)?;
    let tree = KdTree::new(e.data(), d);
    let radii: Vec<f64> = (0..n).into_par_iter().map(|i| tree.kth_neighbor_distance(i, k)).collect();

    let logs: Vec<f64> = radii.iter().filter(|&&r| r > 0.0).map(|r| (2.0 * r).ln()).collect();
    let zeros = n - logs.len();
    if zeros as f64 > opts.max_duplicate_fraction * n as f64 || logs.is_empty() {
        return Err(Error::Degenerate(format!(
            "{zeros} of {n} points have a zero-distance {k}-th neighbour"
        )));
    }
    // Max-norm balls of radius r have volume (2r)^d.
    let nats = digamma(n as f64) - digamma(k as f64) + d as f64 * pairwise_sum(&logs) / logs.len() as f64;
    Ok(InfoEstimate {
        value: nats / LN_2,
        n_used: logs.len(),
        k_neighbors: k,
        method: EstimatorMethod::KozachenkoLeonenko,
    })
}

/// `h(target | cond) = h(target, cond) - h(cond)`, both by kNN on the same rows.
/// With no conditioning columns this is exactly the entropy of the target column.
pub fn conditional_entropy(
    e: &EnsembleMatrix,
    target_col: usize,
    cond_cols: &[usize],
    k_neighbors: usize,
) -> Result<InfoEstimate> {
    if target_col >= e.cols() {
        return Err(Error::invalid(format!("target column {target_col} out of range")));
    }
    if cond_cols.is_empty() {
        return knn_entropy(&e.select(&[target_col])?, k_neighbors);
    }
    if cond_cols.contains(&target_col) {
        return Err(Error::invalid("target column also appears among conditioning columns"));
    }
    if e.rows() < MIN_CONDITIONAL_ROWS {
        return Err(Error::InsufficientSamples { needed: MIN_CONDITIONAL_ROWS, got: e.rows() });
    }
    let mut joint_cols = vec![target_col];
    joint_cols.extend_from_slice(cond_cols);
    let joint = knn_entropy(&e.select(&joint_cols)?, k_neighbors)?;
    let cond = knn_entropy(&e.select(cond_cols)?, k_neighbors)?;
    Ok(InfoEstimate {
        value: joint.value - cond.value,
        n_used: joint.n_used.min(cond.n_used),
        k_neighbors,
        method: EstimatorMethod::KlDifference,
    })
}

fn check_not_constant(m: &EnsembleMatrix, label: &str) -> Result<()> {
    for j in 0..m.cols() {
        let first = m.get(0, j);
        if (1..m.rows()).all(|i| m.get(i, j) == first) {
            return Err(Error::Degenerate(format!("{label} column {j} is constant")));
        }
    }
    Ok(())
}

/// KSG (algorithm 1) estimate of `I(x; y)` in bits, clamped at zero.
/// Symmetric in its arguments bit for bit.
pub fn mutual_information(
    x: &EnsembleMatrix,
    y: &EnsembleMatrix,
    k_neighbors: usize,
) -> Result<InfoEstimate> {
    if x.rows() != y.rows() {
        return Err(Error::invalid(format!(
            "blocks have different sample counts: {} vs {}",
            x.rows(),
            y.rows()
        )));
    }
    let (n, k) = (x.rows(), k_neighbors);
    check_neighbors(n, k)?;
    check_not_constant(x, "x")?;
    check_not_constant(y, "y")?;

    let joint = x.hstack(y)?;
    let tree_joint = KdTree::new(joint.data(), joint.cols());
    let tree_x = KdTree::new(x.data(), x.cols());
    let tree_y = KdTree::new(y.data(), y.cols());
    let terms: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let eps = tree_joint.kth_neighbor_distance(i, k);
            let nx = tree_x.count_within(i, eps);
            let ny = tree_y.count_within(i, eps);
            digamma(nx as f64 + 1.0) + digamma(ny as f64 + 1.0)
        })
        .collect();
    let nats = digamma(k as f64) + digamma(n as f64) - pairwise_sum(&terms) / n as f64;
    Ok(InfoEstimate {
        value: (nats / LN_2).max(0.0),
        n_used: n,
        k_neighbors: k,
        method: EstimatorMethod::Ksg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxent::MaxEntDensity;
    use std::f64::consts::{E, PI};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        MaxEntDensity::gaussian(1.0).unwrap().sample(n, seed).unwrap().into_values()
    }

    fn column(v: &[f64]) -> EnsembleMatrix {
        EnsembleMatrix::from_columns(&[v]).unwrap()
    }

    /// (x, y) with unit variances and correlation rho.
    fn correlated(n: usize, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let a = normals(n, seed);
        let b = normals(n, seed + 1000);
        let s = (1.0 - rho * rho).sqrt();
        let y = a.iter().zip(&b).map(|(x, z)| rho * x + s * z).collect();
        (a, y)
    }

    #[test]
    fn entropy_of_standard_normal() {
        let h = knn_entropy(&column(&normals(10_000, 1)), 4).unwrap();
        let analytic = 0.5 * (2.0 * PI * E).log2();
        assert!((h.value - analytic).abs() < 0.05, "{} vs {analytic}", h.value);
        assert!((h.value - 2.047).abs() < 0.05);
        assert_eq!(h.n_used, 10_000);
    }

    #[test]
    fn entropy_of_unit_uniform() {
        let u: Vec<f64> = MaxEntDensity::uniform(0.5)
            .unwrap()
            .sample(10_000, 2)
            .unwrap()
            .values()
            .iter()
            .map(|x| x + 0.5)
            .collect();
        let h = knn_entropy(&column(&u), 4).unwrap();
        assert!(h.value.abs() < 0.05, "{}", h.value);
    }

    #[test]
    fn scaling_and_translation() {
        let m = column(&normals(10_000, 3));
        let h = knn_entropy(&m, 4).unwrap().value;
        let h4 = knn_entropy(&m.scaled(4.0), 4).unwrap().value;
        assert!((h4 - h - 2.0).abs() < 0.05);
        let shifted = knn_entropy(&m.shifted(7.5), 4).unwrap().value;
        assert!((shifted - h).abs() < 0.01);
    }

    #[test]
    fn conditional_entropy_cases() {
        let n = 10_000;
        let (x, y) = correlated(n, 0.0, 10);
        let m = EnsembleMatrix::from_columns(&[&x, &y]).unwrap();
        let hx = knn_entropy(&m.select(&[0]).unwrap(), 4).unwrap().value;
        let hxy = conditional_entropy(&m, 0, &[1], 4).unwrap().value;
        assert!((hxy - hx).abs() < 0.07, "{hxy} vs {hx}");
        assert_eq!(conditional_entropy(&m, 0, &[], 4).unwrap().value, hx);
        assert!(conditional_entropy(&m, 0, &[0], 4).is_err());
        assert!(conditional_entropy(&m, 2, &[1], 4).is_err());
    }

    #[test]
    fn mutual_information_gaussian_pairs() {
        for &(rho, tol) in &[(0.0, 0.03), (0.5, 0.04), (0.9, 0.06)] {
            let (x, y) = correlated(10_000, rho, 20);
            let analytic = -0.5 * (1.0 - rho * rho).log2();
            let mi = mutual_information(&column(&x), &column(&y), 4).unwrap().value;
            assert!((mi - analytic).abs() < tol, "rho={rho}: {mi} vs {analytic}");
        }
    }

    #[test]
    fn mutual_information_symmetric_exactly() {
        let (x, y) = correlated(3000, 0.7, 30);
        let (a, b) = (column(&x), column(&y));
        let xy = mutual_information(&a, &b, 4).unwrap().value;
        let yx = mutual_information(&b, &a, 4).unwrap().value;
        assert!((xy - yx).abs() < 1e-9);
    }

    #[test]
    fn chain_rule_consistency() {
        let (x, y) = correlated(10_000, 0.6, 40);
        let m = EnsembleMatrix::from_columns(&[&x, &y]).unwrap();
        let hx = knn_entropy(&m.select(&[0]).unwrap(), 4).unwrap().value;
        let hx_y = conditional_entropy(&m, 0, &[1], 4).unwrap().value;
        let mi = mutual_information(&m.select(&[0]).unwrap(), &m.select(&[1]).unwrap(), 4)
            .unwrap()
            .value;
        assert!((hx - hx_y - mi).abs() < 0.08, "{} vs {mi}", hx - hx_y);
        assert!(hx_y <= hx + 0.07);
    }

    #[test]
    fn degenerate_inputs() {
        let dup = column(&[1.0; 50]);
        assert!(matches!(knn_entropy(&dup, 4), Err(Error::Degenerate(_))));
        let x = column(&normals(50, 5));
        assert!(matches!(mutual_information(&x, &dup, 4), Err(Error::Degenerate(_))));
        assert!(mutual_information(&column(&normals(60, 5)), &dup, 4).is_err());
        assert!(matches!(knn_entropy(&column(&[1.0, 2.0, 3.0]), 4), Err(Error::InsufficientSamples { .. })));
        assert!(knn_entropy(&x, 0).is_err());
    }
}

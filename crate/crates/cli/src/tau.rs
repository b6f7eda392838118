//! Choosing τ when the user does not: the largest τ whose predicted
//! cluster count stays within a budget.

use cldiam::clustering::GAMMA;
use cldiam::graph::ceil_log2;

/// Cluster count the clustering is expected to produce on `n` nodes: each
/// stage adds about `γ·τ·⌈log₂ n⌉` centers and covers half of what is left,
/// and stages run while at least `8·τ·⌈log₂ n⌉` nodes are uncovered; the
/// rest become singletons.
pub fn predicted_clusters(n: usize, tau: usize) -> f64 {
    let log_n = f64::from(ceil_log2(n));
    let threshold = 8.0 * tau as f64 * log_n;
    let mut uncovered = n as f64;
    let mut clusters = 0.0;
    while n > 1 && uncovered >= threshold {
        clusters += GAMMA * tau as f64 * log_n;
        uncovered /= 2.0;
    }
    clusters + uncovered.ceil()
}

/// Largest τ in `1..=n` with at most `max_clusters` predicted clusters, or
/// 1 if even τ = 1 exceeds it.
pub fn default_tau(n: usize, max_clusters: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let fits = |tau| predicted_clusters(n, tau) <= max_clusters as f64;
    if fits(n) {
        return n;
    }
    let (mut lo, mut hi) = (1, n);
    if !fits(lo) {
        return 1;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graphs_get_singletons() {
        assert_eq!(default_tau(4096, 100_000), 4096);
        assert_eq!(predicted_clusters(4096, 4096), 4096.0);
        assert_eq!(default_tau(1, 10), 1);
    }

    #[test]
    fn respects_the_budget() {
        let n = 1 << 22;
        let tau = default_tau(n, 100_000);
        assert!(tau >= 1 && tau < n);
        assert!(predicted_clusters(n, tau) <= 100_000.0);
        assert!(predicted_clusters(n, tau + 1) > 100_000.0);
    }

    #[test]
    fn prediction_tracks_stages() {
        // n = 1024, τ = 1: threshold 80, so four stages run (1024, 512, 256
        // and 128 uncovered) and 64 nodes are left as singletons.
        let per_stage = GAMMA * 10.0;
        assert!((predicted_clusters(1024, 1) - (4.0 * per_stage + 64.0)).abs() < 1e-9);
    }
}

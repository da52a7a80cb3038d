//! Exact Euclidean minimum spanning tree length for a handful of points.

use crate::error::SimError;

pub const MST_MAX_POINTS: usize = 8;

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Sum of a tree's edge lengths, added smallest first so that equal edge
/// sets always give bit-identical totals.
pub fn tree_length(mut edges: Vec<f64>) -> f64 {
    edges.sort_by(f64::total_cmp);
    edges.iter().sum()
}

/// Total edge length of the Euclidean MST over `points` (Prim's algorithm on
/// the complete graph).
pub fn mst_length(points: &[(f64, f64)]) -> Result<f64, SimError> {
    let n = points.len();
    if !(2..=MST_MAX_POINTS).contains(&n) {
        return Err(SimError::MstSize {
            got: n,
            max: MST_MAX_POINTS,
        });
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut edges = Vec::with_capacity(n - 1);
    in_tree[0] = true;
    for j in 1..n {
        best[j] = distance(points[0], points[j]);
    }
    for _ in 1..n {
        let (next, len) = (0..n)
            .filter(|&j| !in_tree[j])
            .map(|j| (j, best[j]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("a vertex remains outside the tree");
        in_tree[next] = true;
        edges.push(len);
        for j in 0..n {
            if !in_tree[j] {
                best[j] = best[j].min(distance(points[next], points[j]));
            }
        }
    }
    Ok(tree_length(edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        assert_eq!(mst_length(&[(0.0, 0.0), (3.0, 4.0)]).unwrap(), 5.0);
    }

    #[test]
    fn square_corners() {
        let s = 10.0;
        let pts = [(0.0, 0.0), (s, 0.0), (s, s), (0.0, s)];
        assert_eq!(mst_length(&pts).unwrap(), 3.0 * s);
    }

    #[test]
    fn size_limits() {
        assert!(mst_length(&[(0.0, 0.0)]).is_err());
        assert!(mst_length(&[(0.0, 0.0); 9]).is_err());
    }
}

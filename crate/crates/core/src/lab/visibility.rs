use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Classification, ConvexBody, Point};
use crate::lab::midpoint_on_boundary;

/// Largest subset of boundary samples whose pairwise segments all cross
/// the interior.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VisibilitySet {
    #[serde(with = "crate::geometry::serde_point::vec")]
    pub samples: Vec<Point>,
    /// Indices into `samples`, ascending; the lexicographically first
    /// maximum set.
    pub chosen: Vec<usize>,
    /// Sample pairs whose segment lies in the boundary.
    pub conflicts: Vec<(usize, usize)>,
    /// Set when the exhaustive search was run and agreed.
    pub cross_checked: bool,
}

impl VisibilitySet {
    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.chosen.iter().map(|&i| self.samples[i].clone()).collect()
    }
}

/// Samples beyond which the exhaustive cross-check is skipped.
const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Bits {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Bits {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn has(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn and_count(&self, other: &Bits) -> usize {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn minus(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            })
        })
    }
}

struct Graph {
    adj: Vec<Bits>,
}

impl Graph {
    fn neighbors_in(&self, v: usize, set: &Bits) -> Vec<usize> {
        let mut both = self.adj[v].clone();
        for (a, b) in both.0.iter_mut().zip(&set.0) {
            *a &= b;
        }
        both.iter().collect()
    }

    fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&b| self.adj[a].has(b)))
    }

    /// Greedy clique cover size of `set`, an upper bound on its independence number.
    fn clique_cover(&self, set: &Bits) -> usize {
        let mut left = set.clone();
        let mut cliques = 0;
        loop {
            let Some(v) = left.iter().next() else { break };
            left.clear(v);
            let mut clique = vec![v];
            let cands: Vec<usize> = left.iter().filter(|&u| self.adj[v].has(u)).collect();
            for u in cands {
                if clique.iter().all(|&c| self.adj[c].has(u)) {
                    clique.push(u);
                    left.clear(u);
                }
            }
            cliques += 1;
        }
        cliques
    }

    /// Independence number of the subgraph induced by `set`.
    fn alpha(&self, set: Bits) -> usize {
        let mut best = 0;
        self.branch(set, 0, &mut best);
        best
    }

    fn branch(&self, mut set: Bits, mut taken: usize, best: &mut usize) {
        // isolated and simplicial vertices belong to some maximum set
        loop {
            let mut reduced = false;
            let members: Vec<usize> = set.iter().collect();
            for v in members {
                if !set.has(v) {
                    continue;
                }
                let nb = self.neighbors_in(v, &set);
                if self.is_clique(&nb) {
                    set.clear(v);
                    for u in nb {
                        set.clear(u);
                    }
                    taken += 1;
                    reduced = true;
                }
            }
            if !reduced {
                break;
            }
        }
        if set.count() == 0 {
            *best = (*best).max(taken);
            return;
        }
        if taken + self.clique_cover(&set) <= *best {
            return;
        }
        let v = set
            .iter()
            .max_by_key(|&v| (self.adj[v].and_count(&set), std::cmp::Reverse(v)))
            .expect("nonempty set");
        let mut with = set.clone();
        with.clear(v);
        with.minus(&self.adj[v]);
        self.branch(with, taken + 1, best);
        let mut without = set;
        without.clear(v);
        self.branch(without, taken, best);
    }
}

fn check_samples(body: &ConvexBody, samples: &[Point]) -> Result<()> {
    if body.dim() != 2 {
        return Err(Error::InvalidInput("visibility sets are computed for 2-D bodies".into()));
    }
    for (i, s) in samples.iter().enumerate() {
        if body.contains(s)? != Classification::Boundary {
            return Err(Error::NotOnBoundary);
        }
        if samples[..i].iter().any(|t| t == s) {
            return Err(Error::InvalidInput("samples must be pairwise distinct".into()));
        }
    }
    Ok(())
}

fn conflict_pairs(body: &ConvexBody, samples: &[Point]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if midpoint_on_boundary(body, &samples[i], &samples[j]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Exact maximum visibility subset of the samples.
///
/// Exact branch and bound on the conflict graph with clique-cover bounds;
/// the smallest index is preferred whenever several maximum sets exist.
pub fn max_visibility_set(body: &ConvexBody, samples: &[Point]) -> Result<VisibilitySet> {
    check_samples(body, samples)?;
    let n = samples.len();
    let conflicts = conflict_pairs(body, samples);
    let mut adj = vec![Bits::empty(n); n];
    for &(i, j) in &conflicts {
        adj[i].set(j);
        adj[j].set(i);
    }
    let graph = Graph { adj };
    let alpha = if conflicts.is_empty() { n } else { graph.alpha(Bits::full(n)) };

    let mut chosen = Vec::with_capacity(alpha);
    let mut open = Bits::full(n);
    for v in 0..n {
        if alpha == n {
            chosen = (0..n).collect();
            break;
        }
        if chosen.len() == alpha {
            break;
        }
        if !open.has(v) {
            continue;
        }
        let mut rest = open.clone();
        rest.clear(v);
        rest.minus(&graph.adj[v]);
        if chosen.len() + 1 + graph.alpha(rest.clone()) == alpha {
            chosen.push(v);
            open = rest;
        } else {
            open.clear(v);
        }
    }

    let mut cross_checked = false;
    if n <= EXHAUSTIVE_LIMIT {
        let brute = exhaustive_from_conflicts(n, &conflicts);
        if brute != chosen {
            return Err(Error::NonConvergence("visibility search disagrees with the exhaustive check".into()));
        }
        cross_checked = true;
    }
    Ok(VisibilitySet { samples: samples.to_vec(), chosen, conflicts, cross_checked })
}

/// Exhaustive subset search, for at most 20 samples.
pub fn exhaustive_visibility(body: &ConvexBody, samples: &[Point]) -> Result<Vec<usize>> {
    check_samples(body, samples)?;
    if samples.len() > EXHAUSTIVE_LIMIT {
        return Err(Error::InvalidInput(format!("exhaustive search is limited to {EXHAUSTIVE_LIMIT} samples")));
    }
    Ok(exhaustive_from_conflicts(samples.len(), &conflict_pairs(body, samples)))
}

/// Largest conflict-free mask, lexicographically first among the largest.
fn exhaustive_from_conflicts(n: usize, conflicts: &[(usize, usize)]) -> Vec<usize> {
    let mut masks = vec![0u32; n];
    for &(i, j) in conflicts {
        masks[i] |= 1 << j;
        masks[j] |= 1 << i;
    }
    let mut best: Option<Vec<usize>> = None;
    for subset in 0u32..(1u32 << n) {
        let ok = (0..n).all(|i| subset >> i & 1 == 0 || subset & masks[i] == 0);
        if !ok {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&i| subset >> i & 1 == 1).collect();
        best = match best {
            None => Some(set),
            Some(b) if set.len() > b.len() || (set.len() == b.len() && set < b) => Some(set),
            keep => keep,
        };
    }
    best.unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::*;
    use crate::lab::boundary_param;

    fn pt(c: &[f64]) -> Point {
        Point::from_column_slice(c)
    }

    fn square_samples() -> Vec<Point> {
        [[1., 0.], [1., 1.], [0., 1.], [-1., 1.], [-1., 0.], [-1., -1.], [0., -1.], [1., -1.]]
            .iter()
            .map(|c| pt(c))
            .collect()
    }

    #[test]
    fn square_canonical_samples() {
        let v = max_visibility_set(&square(), &square_samples()).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.cross_checked);
        assert_eq!(v.chosen, vec![0, 2, 4, 6]);
    }

    #[test]
    fn square_vertices_alone() {
        let corners: Vec<Point> = square_samples().into_iter().skip(1).step_by(2).collect();
        let v = max_visibility_set(&square(), &corners).unwrap();
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn ellipse_has_no_conflicts() {
        let e = ellipse(1.5, 0.8, 0.2).unwrap();
        let samples: Vec<Point> = (0..30).map(|i| boundary_param(&e, 0.2 * i as f64).unwrap()).collect();
        let v = max_visibility_set(&e, &samples).unwrap();
        assert_eq!(v.len(), 30);
        assert!(v.conflicts.is_empty());
    }

    #[test]
    fn errors_and_single_sample() {
        let sq = square();
        assert_eq!(max_visibility_set(&sq, &[pt(&[1., 0.3])]).unwrap().len(), 1);
        assert!(matches!(max_visibility_set(&sq, &[pt(&[0.5, 0.])]), Err(Error::NotOnBoundary)));
        assert!(max_visibility_set(&sq, &[pt(&[1., 0.3]), pt(&[1., 0.3])]).is_err());
    }

    #[test]
    fn dense_polygon_samples() {
        let hex = regular_polygon(6, 1.0).unwrap();
        let samples: Vec<Point> = (0..240).map(|i| boundary_param(&hex, 0.013 + i as f64 * 0.02618).unwrap()).collect();
        let v = max_visibility_set(&hex, &samples).unwrap();
        assert_eq!(v.len(), 6);
    }
}

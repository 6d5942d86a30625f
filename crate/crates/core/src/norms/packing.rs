use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{Norm, NormDescriptor};

/// Search settings for [`packing_bounds`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackingBudget {
    /// Farthest-point restarts, each on its own candidate cloud.
    pub restarts: usize,
    /// Candidate points per restart.
    pub candidates: usize,
    pub seed: u64,
    /// Largest grid (in points) the planar refinement will search; 0 disables it.
    pub grid_max_points: usize,
    /// Perturbation rounds of the grid search.
    pub grid_iterations: usize,
    /// Annealing runs tried for each larger grid packing.
    pub anneal_attempts: usize,
    /// Moves per annealing run.
    pub anneal_steps: usize,
}

impl Default for PackingBudget {
    fn default() -> Self {
        PackingBudget {
            restarts: 32,
            candidates: 1500,
            seed: 0x5eed,
            grid_max_points: 20_000,
            grid_iterations: 30_000,
            anneal_attempts: 4,
            anneal_steps: 20_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackingSource {
    Antipodal,
    Greedy,
    Grid,
}

/// Bracket `lower <= N(A, ||.||) <= upper` for the packing number: the most
/// points of the closed ball `||v|| <= 2A` with pairwise distances `>= 1/(2A)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackingBounds {
    #[serde(rename = "A")]
    pub a: f64,
    pub norm: NormDescriptor,
    pub lower: usize,
    pub upper: u64,
    /// Representatives of the lower-bound packing.
    pub witnesses: Vec<Vec<f64>>,
    pub lower_source: PackingSource,
    /// One seed per farthest-point restart.
    pub seeds: Vec<u64>,
    pub grid_seed: Option<u64>,
    pub grid_pitch: Option<f64>,
}

/// `floor((8A^2 + 1)^m)`, saturating.
pub fn volumetric_upper(a: f64, m: usize) -> u64 {
    let base = 8.0 * a * a + 1.0;
    if base.fract() == 0.0 && base < u64::MAX as f64 {
        let exp = u32::try_from(m).unwrap_or(u32::MAX);
        return (base as u64).checked_pow(exp).unwrap_or(u64::MAX);
    }
    let v = base.powi(m as i32).floor();
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v as u64
    }
}

/// Checks membership in the closed `2A`-ball and `1/(2A)`-separation.
pub fn verify_packing(norm: &Norm, a: f64, witnesses: &[DVector<f64>]) -> bool {
    let radius = 2.0 * a;
    let sep = 1.0 / (2.0 * a);
    for (i, w) in witnesses.iter().enumerate() {
        if w.len() != norm.dim() || norm.eval_slice(w.as_slice()) > radius {
            return false;
        }
        for v in &witnesses[..i] {
            if norm.eval_slice((w - v).as_slice()) < sep {
                return false;
            }
        }
    }
    true
}

pub fn packing_bounds(norm: &Norm, a: f64, budget: &PackingBudget) -> Result<PackingBounds> {
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Error::InvalidInput(format!("packing needs A >= 1, got {a}")));
    }
    let m = norm.space_dim();
    let radius = 2.0 * a;
    let sep = 1.0 / (2.0 * a);
    let upper = volumetric_upper(a, m);

    let mut master = ChaCha8Rng::seed_from_u64(budget.seed);
    let seeds: Vec<u64> = (0..budget.restarts).map(|_| master.random()).collect();
    let grid_seed: u64 = master.random();

    let mut best = antipodal(norm, radius);
    let mut source = PackingSource::Antipodal;

    let greedy: Vec<Vec<Vec<f64>>> = seeds
        .par_iter()
        .map(|&s| farthest_point(norm, radius, sep, budget.candidates, s))
        .collect();
    for g in greedy {
        let g = repair(norm, radius, sep, g);
        if g.len() > best.len() {
            best = g;
            source = PackingSource::Greedy;
        }
    }

    let mut grid_pitch = None;
    if m == 2 && budget.grid_max_points > 0 {
        let pitch = sep / 16.0;
        if let Some(g) = grid_search(norm, radius, sep, pitch, budget, grid_seed) {
            grid_pitch = Some(pitch);
            let g = repair(norm, radius, sep, g);
            if g.len() > best.len() {
                best = g;
                source = PackingSource::Grid;
            }
        }
    }

    let witnesses: Vec<DVector<f64>> = best.iter().map(|x| norm.embed_space(x)).collect();
    debug_assert!(verify_packing(norm, a, &witnesses));
    Ok(PackingBounds {
        a,
        norm: norm.descriptor(),
        lower: witnesses.len(),
        upper,
        witnesses: witnesses.iter().map(|w| w.iter().copied().collect()).collect(),
        lower_source: source,
        seeds,
        grid_seed: grid_pitch.map(|_| grid_seed),
        grid_pitch,
    })
}

fn diff_norm(norm: &Norm, x: &[f64], y: &[f64], buf: &mut [f64]) -> f64 {
    for ((b, a), c) in buf.iter_mut().zip(x).zip(y) {
        *b = a - c;
    }
    norm.eval_space(buf)
}

/// `{v, -v}` with `||v|| = 2A`.
fn antipodal(norm: &Norm, radius: f64) -> Vec<Vec<f64>> {
    let m = norm.space_dim();
    let mut e = vec![0.0; m];
    e[0] = 1.0;
    let v = onto_sphere(norm, &e, radius);
    let w: Vec<f64> = v.iter().map(|x| -x).collect();
    vec![v, w]
}

/// `x` scaled to norm `radius`, nudged inward if rounding overshoots.
fn onto_sphere(norm: &Norm, x: &[f64], radius: f64) -> Vec<f64> {
    let n = norm.eval_space(x);
    let mut v: Vec<f64> = x.iter().map(|c| c * (radius / n)).collect();
    while norm.eval_space(&v) > radius {
        v.iter_mut().for_each(|c| *c *= 1.0 - f64::EPSILON);
    }
    v
}

fn candidate_cloud(norm: &Norm, radius: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = norm.space_dim();
    let half = radius * norm.sup_per_norm();
    let mut out = Vec::with_capacity(count);
    let on_sphere = count * 2 / 5;
    while out.len() < on_sphere {
        let x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        if norm.eval_space(&x) > 1e-3 {
            out.push(onto_sphere(norm, &x, radius));
        }
    }
    while out.len() < count {
        let x: Vec<f64> = (0..m).map(|_| rng.random_range(-half..=half)).collect();
        if norm.eval_space(&x) <= radius {
            out.push(x);
        }
    }
    out
}

/// Greedy farthest-point insertion until the next point would be closer than `sep`.
fn farthest_point(norm: &Norm, radius: f64, sep: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cloud = candidate_cloud(norm, radius, count.max(2), &mut rng);
    let mut buf = vec![0.0; norm.space_dim()];
    let first = rng.random_range(0..cloud.len());
    let mut chosen = vec![first];
    let mut gap: Vec<f64> = cloud.iter().map(|x| diff_norm(norm, x, &cloud[first], &mut buf)).collect();
    loop {
        let (idx, d) = gap
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        if d < sep {
            break;
        }
        chosen.push(idx);
        for (g, x) in gap.iter_mut().zip(&cloud) {
            *g = g.min(diff_norm(norm, x, &cloud[idx], &mut buf));
        }
    }
    chosen.into_iter().map(|i| cloud[i].clone()).collect()
}

/// Drops points until the set verifies in floating point.
fn repair(norm: &Norm, radius: f64, sep: f64, pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut buf = vec![0.0; norm.space_dim()];
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        if norm.eval_space(&p) <= radius && kept.iter().all(|q| diff_norm(norm, &p, q, &mut buf) >= sep) {
            kept.push(p);
        }
    }
    kept
}

/// Planar grid of pitch `pitch` inside the ball, with conflicts decided by
/// grid offset.
struct Grid {
    cells: Vec<[i32; 2]>,
    index: Vec<u32>,
    span: i32,
    offsets: Vec<[i32; 2]>,
    reach: i32,
    conflict: Vec<bool>,
    /// `1 - ||offset|| / sep` on conflicting offsets, 0 elsewhere.
    overlap: Vec<f64>,
}

const EMPTY: u32 = u32::MAX;


impl Grid {
    fn build(norm: &Norm, radius: f64, sep: f64, pitch: f64, max_points: usize) -> Option<Grid> {
        let half = radius * norm.sup_per_norm();
        let span = (half / pitch).ceil() as i32;
        let side = (2 * span + 1) as usize;
        if side * side > 8 * max_points.max(1) {
            return None;
        }
        let mut cells = Vec::new();
        let mut index = vec![EMPTY; side * side];
        for i in -span..=span {
            for j in -span..=span {
                let x = [i as f64 * pitch, j as f64 * pitch];
                if norm.eval_space(&x) <= radius {
                    index[((i + span) as usize) * side + (j + span) as usize] = cells.len() as u32;
                    cells.push([i, j]);
                    if cells.len() > max_points {
                        return None;
                    }
                }
            }
        }
        let reach = (sep * norm.sup_per_norm() / pitch).ceil() as i32;
        let w = (2 * reach + 1) as usize;
        let mut conflict = vec![false; w * w];
        let mut overlap = vec![0.0; w * w];
        overlap[(reach as usize) * w + reach as usize] = 1.0;
        let mut offsets = Vec::new();
        for di in -reach..=reach {
            for dj in -reach..=reach {
                if (di, dj) == (0, 0) {
                    continue;
                }
                let d = norm.eval_space(&[di as f64 * pitch, dj as f64 * pitch]);
                if d < sep {
                    conflict[((di + reach) as usize) * w + (dj + reach) as usize] = true;
                    overlap[((di + reach) as usize) * w + (dj + reach) as usize] = 1.0 - d / sep;
                    offsets.push([di, dj]);
                }
            }
        }
        Some(Grid { cells, index, span, offsets, reach, conflict, overlap })
    }

    fn len(&self) -> usize {
        self.cells.len()
    }

    fn lookup(&self, i: i32, j: i32) -> Option<usize> {
        if i.abs() > self.span || j.abs() > self.span {
            return None;
        }
        let side = (2 * self.span + 1) as usize;
        let k = self.index[((i + self.span) as usize) * side + (j + self.span) as usize];
        (k != EMPTY).then_some(k as usize)
    }

    fn for_neighbors(&self, v: usize, mut f: impl FnMut(usize)) {
        let [i, j] = self.cells[v];
        for [di, dj] in &self.offsets {
            if let Some(u) = self.lookup(i + di, j + dj) {
                f(u);
            }
        }
    }

    fn overlap(&self, a: [i32; 2], b: [i32; 2]) -> f64 {
        let (di, dj) = (a[0] - b[0], a[1] - b[1]);
        if di.abs() > self.reach || dj.abs() > self.reach {
            return 0.0;
        }
        let w = (2 * self.reach + 1) as usize;
        self.overlap[((di + self.reach) as usize) * w + (dj + self.reach) as usize]
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        let di = self.cells[u][0] - self.cells[v][0];
        let dj = self.cells[u][1] - self.cells[v][1];
        if di.abs() > self.reach || dj.abs() > self.reach {
            return false;
        }
        let w = (2 * self.reach + 1) as usize;
        self.conflict[((di + self.reach) as usize) * w + (dj + self.reach) as usize]
    }
}

/// Independent-set state with per-vertex counts of chosen neighbours.
struct IndependentSet<'g> {
    grid: &'g Grid,
    chosen: Vec<bool>,
    tight: Vec<u32>,
    size: usize,
    log: Vec<(usize, bool)>,
}

impl<'g> IndependentSet<'g> {
    fn new(grid: &'g Grid) -> Self {
        let n = grid.len();
        IndependentSet { grid, chosen: vec![false; n], tight: vec![0; n], size: 0, log: Vec::new() }
    }

    fn insert(&mut self, v: usize) {
        debug_assert!(!self.chosen[v]);
        self.chosen[v] = true;
        self.size += 1;
        self.log.push((v, true));
        let tight = &mut self.tight;
        self.grid.for_neighbors(v, |u| tight[u] += 1);
    }

    fn remove(&mut self, v: usize) {
        debug_assert!(self.chosen[v]);
        self.chosen[v] = false;
        self.size -= 1;
        self.log.push((v, false));
        let tight = &mut self.tight;
        self.grid.for_neighbors(v, |u| tight[u] -= 1);
    }

    fn is_free(&self, v: usize) -> bool {
        !self.chosen[v] && self.tight[v] == 0
    }

    fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (v, inserted) = self.log.pop().expect("nonempty log");
            if inserted {
                self.chosen[v] = false;
                self.size -= 1;
                let tight = &mut self.tight;
                self.grid.for_neighbors(v, |u| tight[u] -= 1);
            } else {
                self.chosen[v] = true;
                self.size += 1;
                let tight = &mut self.tight;
                self.grid.for_neighbors(v, |u| tight[u] += 1);
            }
        }
    }

    fn fill(&mut self, order: &[usize]) {
        for &v in order {
            if self.is_free(v) {
                self.insert(v);
            }
        }
    }

    /// Applies (1,2)-swaps until none is left among the queued vertices.
    fn swaps(&mut self, mut queue: Vec<usize>) {
        let mut ones = Vec::new();
        while let Some(x) = queue.pop() {
            if !self.chosen[x] {
                continue;
            }
            ones.clear();
            let (chosen, tight) = (&self.chosen, &self.tight);
            self.grid.for_neighbors(x, |u| {
                if !chosen[u] && tight[u] == 1 {
                    ones.push(u);
                }
            });
            let mut pair = None;
            'outer: for a in 0..ones.len() {
                for b in a + 1..ones.len() {
                    if !self.grid.adjacent(ones[a], ones[b]) {
                        pair = Some((ones[a], ones[b]));
                        break 'outer;
                    }
                }
            }
            if let Some((u, v)) = pair {
                self.remove(x);
                self.insert(u);
                self.insert(v);
                for &w in &ones {
                    if self.is_free(w) {
                        self.insert(w);
                        queue.push(w);
                    }
                }
                queue.push(u);
                queue.push(v);
            }
        }
    }

    fn members(&self) -> Vec<usize> {
        (0..self.chosen.len()).filter(|&v| self.chosen[v]).collect()
    }

    fn local_search(&mut self) {
        loop {
            let before = self.size;
            let all = self.members();
            self.swaps(all);
            if self.size == before {
                break;
            }
        }
    }
}

/// Iterated local search for a maximum independent set of the grid's
/// conflict graph.
fn grid_search(
    norm: &Norm,
    radius: f64,
    sep: f64,
    pitch: f64,
    budget: &PackingBudget,
    seed: u64,
) -> Option<Vec<Vec<f64>>> {
    let grid = Grid::build(norm, radius, sep, pitch, budget.grid_max_points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.shuffle(&mut rng);
    let mut set = IndependentSet::new(&grid);
    set.fill(&order);
    set.local_search();
    let mut best = set.members();

    for _ in 0..budget.grid_iterations {
        set.log.clear();
        let before = set.size;
        // mostly plateau moves: a vertex blocked by a single chosen neighbour
        let mut force = rng.random_range(0..grid.len());
        if rng.random_bool(0.9) {
            for _ in 0..64 {
                if !set.chosen[force] && set.tight[force] == 1 {
                    break;
                }
                force = rng.random_range(0..grid.len());
            }
        }
        if set.chosen[force] {
            continue;
        }
        let mut dropped = Vec::new();
        {
            let chosen = &set.chosen;
            grid.for_neighbors(force, |u| {
                if chosen[u] {
                    dropped.push(u);
                }
            });
        }
        for &u in &dropped {
            set.remove(u);
        }
        set.insert(force);
        let mut freed = Vec::new();
        for &u in &dropped {
            grid.for_neighbors(u, |w| freed.push(w));
        }
        freed.shuffle(&mut rng);
        let mut queue = vec![force];
        for w in freed {
            if set.is_free(w) {
                set.insert(w);
                queue.push(w);
            }
        }
        for &u in &dropped {
            grid.for_neighbors(u, |w| {
                if set.chosen[w] {
                    queue.push(w);
                }
            });
        }
        queue.sort_unstable();
        queue.dedup();
        set.swaps(queue);
        if set.size > best.len() {
            best = set.members();
        } else if set.size < before {
            let keep_worse = set.size + 1 == before && rng.random_bool(0.05);
            if !keep_worse {
                set.undo_to(0);
            }
        }
    }
    let mut best: Vec<[i32; 2]> = best.into_iter().map(|v| grid.cells[v]).collect();
    let seeds: Vec<u64> = (0..budget.anneal_attempts).map(|_| rng.random()).collect();
    while (best.len() as u64) < volumetric_upper(radius / 2.0, 2) {
        let target = best.len() + 1;
        let found = seeds.par_iter().find_map_first(|&s| anneal(&grid, &best, target, budget.anneal_steps, s));
        match found {
            Some(layout) => best = layout,
            None => break,
        }
    }
    Some(best.into_iter().map(|c| c.iter().map(|&i| i as f64 * pitch).collect()).collect())
}

/// Points of a layout bucketed by `reach`-sized squares.
struct Buckets {
    size: i32,
    side: usize,
    span: i32,
    slots: Vec<Vec<u32>>,
}

impl Buckets {
    fn new(grid: &Grid, layout: &[[i32; 2]]) -> Buckets {
        let size = grid.reach.max(1);
        let side = ((2 * grid.span) / size + 1) as usize;
        let mut b = Buckets { size, side, span: grid.span, slots: vec![Vec::new(); side * side] };
        for (k, &c) in layout.iter().enumerate() {
            let slot = b.slot(c);
            b.slots[slot].push(k as u32);
        }
        b
    }

    fn coords(&self, c: [i32; 2]) -> (usize, usize) {
        (((c[0] + self.span) / self.size) as usize, ((c[1] + self.span) / self.size) as usize)
    }

    fn slot(&self, c: [i32; 2]) -> usize {
        let (x, y) = self.coords(c);
        x * self.side + y
    }

    fn relocate(&mut self, k: usize, from: [i32; 2], to: [i32; 2]) {
        let (a, b) = (self.slot(from), self.slot(to));
        if a != b {
            let pos = self.slots[a].iter().position(|&x| x as usize == k).expect("point in its bucket");
            self.slots[a].swap_remove(pos);
            self.slots[b].push(k as u32);
        }
    }

    /// Overlap of `cell` with every point of `layout` except `skip`.
    fn overlap_at(&self, grid: &Grid, layout: &[[i32; 2]], skip: usize, cell: [i32; 2]) -> (f64, usize) {
        let (x, y) = self.coords(cell);
        let mut energy = 0.0;
        let mut count = 0;
        for bx in x.saturating_sub(1)..=(x + 1).min(self.side - 1) {
            for by in y.saturating_sub(1)..=(y + 1).min(self.side - 1) {
                for &j in &self.slots[bx * self.side + by] {
                    let j = j as usize;
                    if j != skip {
                        let o = grid.overlap(cell, layout[j]);
                        if o > 0.0 {
                            energy += o;
                            count += 1;
                        }
                    }
                }
            }
        }
        (energy, count)
    }
}

/// Simulated annealing on grid positions for a conflict-free layout of
/// `target` points, started from `start` plus random extra cells.
fn anneal(grid: &Grid, start: &[[i32; 2]], target: usize, steps: usize, seed: u64) -> Option<Vec<[i32; 2]>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layout = start.to_vec();
    while layout.len() < target {
        layout.push(grid.cells[rng.random_range(0..grid.len())]);
    }
    let n = layout.len();
    let mut buckets = Buckets::new(grid, &layout);
    let mut conflicts: usize =
        (0..n).map(|k| buckets.overlap_at(grid, &layout, k, layout[k]).1).sum::<usize>() / 2;
    let near = (grid.reach * 3 / 8).max(1);
    let far = grid.reach * 5 / 2;
    for s in 0..steps {
        if conflicts == 0 {
            return Some(layout);
        }
        let cool = 1.0 - s as f64 / steps as f64;
        let temp = 0.12 * cool * cool + 0.002;
        let k = rng.random_range(0..n);
        let r = if rng.random_bool(0.9) { near } else { far };
        let [i, j] = layout[k];
        let cand = [i + rng.random_range(-r..=r), j + rng.random_range(-r..=r)];
        if grid.lookup(cand[0], cand[1]).is_none() {
            continue;
        }
        let (old, old_count) = buckets.overlap_at(grid, &layout, k, layout[k]);
        let (new, new_count) = buckets.overlap_at(grid, &layout, k, cand);
        let delta = new - old;
        if delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp() {
            buckets.relocate(k, layout[k], cand);
            layout[k] = cand;
            conflicts = conflicts + new_count - old_count;
        }
    }
    (conflicts == 0).then_some(layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> PackingBudget {
        PackingBudget { restarts: 4, candidates: 400, grid_max_points: 0, ..PackingBudget::default() }
    }

    #[test]
    fn upper_bounds() {
        assert_eq!(volumetric_upper(1.0, 2), 81);
        assert_eq!(volumetric_upper(2.0, 2), 33 * 33);
        assert_eq!(volumetric_upper(1.5, 1), 19);
        assert_eq!(volumetric_upper(1000.0, 10), u64::MAX);
    }

    #[test]
    fn lower_bound_is_valid_and_at_least_two() {
        for norm in [Norm::euclidean(2), Norm::lp(1.0, 3).unwrap(), Norm::variation(2).unwrap()] {
            for a in [1.0, 2.0] {
                let b = packing_bounds(&norm, a, &quick()).unwrap();
                assert!(b.lower >= 2 && (b.lower as u64) <= b.upper);
                let w: Vec<DVector<f64>> = b.witnesses.iter().map(|w| DVector::from_column_slice(w)).collect();
                assert!(verify_packing(&norm, a, &w));
                assert_eq!(b.seeds.len(), 4);
            }
        }
    }

    #[test]
    fn rejects_small_radius() {
        assert!(packing_bounds(&Norm::euclidean(2), 0.5, &quick()).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let n = Norm::euclidean(2);
        let a = packing_bounds(&n, 1.0, &quick()).unwrap();
        let b = packing_bounds(&n, 1.0, &quick()).unwrap();
        assert_eq!(a.witnesses, b.witnesses);
    }
}

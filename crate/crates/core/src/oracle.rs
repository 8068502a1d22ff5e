//! Exact discrete optimal transport between two small atomic measures on the
//! circle, solved as a transportation problem with the network simplex
//! method. Serves as ground truth for the closed-form 1-D solvers.

use std::collections::VecDeque;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cdf::Cdf;
use crate::error::{check_exponent, Error, Result};
use crate::measures::{circle_distance, Atom, AtomicMeasure, TorusDensity};
use crate::ot::MASS_TOL;

/// Largest number of atoms accepted on either side.
pub const ORACLE_MAX_ATOMS: usize = 256;

/// Marginal tolerance of a [`DiscretePlan`].
pub const PLAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

/// A coupling between two atomic measures, listed by nonzero cells.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscretePlan {
    pub entries: Vec<PlanEntry>,
}

impl DiscretePlan {
    /// Row and column sums.
    pub fn marginals(&self, n: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rows = vec![0.0; n];
        let mut cols = vec![0.0; m];
        for e in &self.entries {
            rows[e.source] += e.mass;
            cols[e.target] += e.mass;
        }
        (rows, cols)
    }

    /// Checks that the marginals reproduce `a` and `b` within [`PLAN_TOL`].
    pub fn verify(&self, a: &AtomicMeasure, b: &AtomicMeasure) -> Result<()> {
        let (rows, cols) = self.marginals(a.len(), b.len());
        for (i, (r, w)) in rows.iter().zip(a.weights()).enumerate() {
            if (r - w).abs() > PLAN_TOL {
                return Err(Error::Invariant(format!(
                    "row {i} sums to {r}, expected {w}"
                )));
            }
        }
        for (j, (c, w)) in cols.iter().zip(b.weights()).enumerate() {
            if (c - w).abs() > PLAN_TOL {
                return Err(Error::Invariant(format!(
                    "column {j} sums to {c}, expected {w}"
                )));
            }
        }
        if self.entries.iter().any(|e| e.mass < 0.0) {
            return Err(Error::Invariant("negative plan entry".into()));
        }
        Ok(())
    }

    /// `Σ mass · d(x_source, y_target)^p`.
    pub fn cost(&self, a: &AtomicMeasure, b: &AtomicMeasure, p: f64) -> f64 {
        self.entries
            .iter()
            .map(|e| {
                e.mass
                    * circle_distance(a.atoms()[e.source].location, b.atoms()[e.target].location)
                        .powf(p)
            })
            .sum()
    }

    /// Writes `source,target,mass` rows with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for e in &self.entries {
            wtr.serialize(e)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Exact optimal `Σ γ_ij d(x_i, y_j)^p` over couplings of `a` and `b`, with
/// an optimal plan. The returned value is the cost to the power `p`.
pub fn discrete_ot_oracle(
    a: &AtomicMeasure,
    b: &AtomicMeasure,
    p: f64,
) -> Result<(f64, DiscretePlan)> {
    check_exponent(p)?;
    for (what, len) in [("source atoms", a.len()), ("target atoms", b.len())] {
        if len > ORACLE_MAX_ATOMS {
            return Err(Error::SizeCap {
                what,
                size: len,
                cap: ORACLE_MAX_ATOMS,
            });
        }
    }
    if (a.total_mass() - b.total_mass()).abs() > MASS_TOL {
        return Err(Error::MassMismatch(a.total_mass(), b.total_mass()));
    }
    let supply: Vec<f64> = a.weights().collect();
    let demand: Vec<f64> = b.weights().collect();
    let cost: Vec<Vec<f64>> = a
        .atoms()
        .iter()
        .map(|x| {
            b.atoms()
                .iter()
                .map(|y| circle_distance(x.location, y.location).powf(p))
                .collect()
        })
        .collect();
    let plan = TransportSimplex::new(&supply, &demand, &cost).solve()?;
    plan.verify(a, b)?;
    Ok((plan.cost(a, b, p), plan))
}

/// Transportation-problem network simplex over a spanning-tree basis.
struct TransportSimplex<'a> {
    n: usize,
    m: usize,
    supply: &'a [f64],
    demand: &'a [f64],
    cost: &'a [Vec<f64>],
    basis: Vec<(usize, usize)>,
}

/// Parent structure of the basis tree rooted at row 0. Nodes `0..n` are rows
/// and `n..n+m` are columns.
struct Tree {
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    depth: Vec<usize>,
}

impl<'a> TransportSimplex<'a> {
    fn new(supply: &'a [f64], demand: &'a [f64], cost: &'a [Vec<f64>]) -> Self {
        TransportSimplex {
            n: supply.len(),
            m: demand.len(),
            supply,
            demand,
            cost,
            basis: Vec::new(),
        }
    }

    /// Supplies and demands with the classic perturbation that keeps every
    /// basic flow strictly positive.
    fn perturbed(&self) -> (Vec<f64>, Vec<f64>) {
        let total: f64 = self.supply.iter().sum();
        let eps = total * 1e-10 / (self.n + self.m) as f64;
        let s = self.supply.iter().map(|v| v + eps).collect();
        let mut d: Vec<f64> = self.demand.to_vec();
        d[self.m - 1] += eps * self.n as f64;
        (s, d)
    }

    fn northwest_corner(&mut self, s: &[f64], d: &[f64]) {
        let (mut rs, mut rd) = (s.to_vec(), d.to_vec());
        let (mut i, mut j) = (0, 0);
        loop {
            self.basis.push((i, j));
            if i == self.n - 1 && j == self.m - 1 {
                break;
            }
            let f = rs[i].min(rd[j]);
            rs[i] -= f;
            rd[j] -= f;
            if j == self.m - 1 || (i < self.n - 1 && rs[i] <= rd[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n + self.m];
        for (e, &(i, j)) in self.basis.iter().enumerate() {
            adj[i].push((self.n + j, e));
            adj[self.n + j].push((i, e));
        }
        adj
    }

    /// Potentials `u_i + v_j = c_ij` on basic cells, plus the rooted tree.
    fn potentials(&self, adj: &[Vec<(usize, usize)>]) -> Result<(Vec<f64>, Tree)> {
        let nodes = self.n + self.m;
        let mut pot = vec![f64::NAN; nodes];
        let mut tree = Tree {
            parent: vec![usize::MAX; nodes],
            parent_edge: vec![usize::MAX; nodes],
            depth: vec![0; nodes],
        };
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        let mut seen = 1;
        while let Some(u) = queue.pop_front() {
            for &(v, e) in &adj[u] {
                if !pot[v].is_nan() {
                    continue;
                }
                let (i, j) = self.basis[e];
                pot[v] = self.cost[i][j] - pot[u];
                tree.parent[v] = u;
                tree.parent_edge[v] = e;
                tree.depth[v] = tree.depth[u] + 1;
                seen += 1;
                queue.push_back(v);
            }
        }
        if seen != nodes {
            return Err(Error::Invariant(
                "simplex basis is not a spanning tree".into(),
            ));
        }
        Ok((pot, tree))
    }

    /// Basic flows for the given supplies, by peeling leaves off the tree.
    fn flows(&self, adj: &[Vec<(usize, usize)>], s: &[f64], d: &[f64]) -> Vec<f64> {
        let nodes = self.n + self.m;
        let mut rem: Vec<f64> = s.iter().chain(d.iter()).copied().collect();
        let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        let mut used = vec![false; self.basis.len()];
        let mut flow = vec![0.0; self.basis.len()];
        let mut leaves: Vec<usize> = (0..nodes).filter(|&v| degree[v] == 1).collect();
        while let Some(v) = leaves.pop() {
            let Some(&(w, e)) = adj[v].iter().find(|&&(_, e)| !used[e]) else {
                continue;
            };
            used[e] = true;
            flow[e] = rem[v];
            rem[w] -= rem[v];
            rem[v] = 0.0;
            degree[v] -= 1;
            degree[w] -= 1;
            if degree[w] == 1 {
                leaves.push(w);
            }
        }
        flow
    }

    /// Cells of the basis path from column node `col` to row node `row`.
    fn tree_path(tree: &Tree, mut col: usize, mut row: usize) -> Vec<usize> {
        let mut from_col = Vec::new();
        let mut from_row = Vec::new();
        while tree.depth[col] > tree.depth[row] {
            from_col.push(tree.parent_edge[col]);
            col = tree.parent[col];
        }
        while tree.depth[row] > tree.depth[col] {
            from_row.push(tree.parent_edge[row]);
            row = tree.parent[row];
        }
        while col != row {
            from_col.push(tree.parent_edge[col]);
            col = tree.parent[col];
            from_row.push(tree.parent_edge[row]);
            row = tree.parent[row];
        }
        from_col.extend(from_row.into_iter().rev());
        from_col
    }

    fn solve(mut self) -> Result<DiscretePlan> {
        let (s, d) = self.perturbed();
        self.northwest_corner(&s, &d);
        let scale = self
            .cost
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |a, &c| a.max(c))
            .max(f64::MIN_POSITIVE);
        let tol = 1e-12 * scale;
        let max_iter = 50 * (self.n + self.m) * (self.n + self.m) + 1000;
        for _ in 0..max_iter {
            let adj = self.adjacency();
            let (pot, tree) = self.potentials(&adj)?;
            let mut entering = None;
            let mut best = -tol;
            for i in 0..self.n {
                for j in 0..self.m {
                    let r = self.cost[i][j] - pot[i] - pot[self.n + j];
                    if r < best {
                        best = r;
                        entering = Some((i, j));
                    }
                }
            }
            let Some((ei, ej)) = entering else {
                let flow = self.flows(&adj, self.supply, self.demand);
                return Ok(self.plan(&flow));
            };
            let flow = self.flows(&adj, &s, &d);
            let path = Self::tree_path(&tree, self.n + ej, ei);
            // cells alternate −, +, −, … starting next to the entering column
            let leaving = path
                .iter()
                .step_by(2)
                .copied()
                .min_by(|&x, &y| flow[x].total_cmp(&flow[y]))
                .expect("cycle has a decreasing cell");
            self.basis[leaving] = (ei, ej);
        }
        Err(Error::NoConvergence(format!(
            "transport simplex exceeded {max_iter} pivots"
        )))
    }

    fn plan(&self, flow: &[f64]) -> DiscretePlan {
        let mut entries: Vec<PlanEntry> = self
            .basis
            .iter()
            .zip(flow)
            .filter(|(_, &f)| f > 0.0)
            .map(|(&(i, j), &f)| PlanEntry {
                source: i,
                target: j,
                mass: f,
            })
            .collect();
        entries.sort_by_key(|e| (e.source, e.target));
        DiscretePlan { entries }
    }
}

/// Atoms at the midpoints of `n` equal cells, each carrying the exact mass
/// of its cell; empty cells are dropped.
pub fn quantize(d: &TorusDensity, n: usize) -> Result<AtomicMeasure> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "quantization needs at least one cell".into(),
        ));
    }
    let f = Cdf::from_density(d)?;
    let atoms: Vec<Atom> = (0..n)
        .filter_map(|k| {
            let w = f.eval((k + 1) as f64 / n as f64) - f.eval(k as f64 / n as f64);
            (w > 0.0).then(|| Atom::new((k as f64 + 0.5) / n as f64, w))
        })
        .collect();
    AtomicMeasure::new(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Minimum over all bijections for equal-weight atoms.
    fn brute_force(xs: &[f64], ys: &[f64], p: f64) -> f64 {
        fn go(k: usize, xs: &[f64], ys: &[f64], used: &mut [bool], p: f64) -> f64 {
            if k == xs.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..ys.len() {
                if !used[j] {
                    used[j] = true;
                    let c = circle_distance(xs[k], ys[j]).powf(p) + go(k + 1, xs, ys, used, p);
                    best = best.min(c);
                    used[j] = false;
                }
            }
            best
        }
        go(0, xs, ys, &mut vec![false; ys.len()], p) / xs.len() as f64
    }

    #[test]
    fn single_atoms() {
        let a = AtomicMeasure::new(vec![Atom::new(0.1, 2.0)]).unwrap();
        let b = AtomicMeasure::new(vec![Atom::new(0.8, 2.0)]).unwrap();
        let (c, plan) = discrete_ot_oracle(&a, &b, 1.0).unwrap();
        assert!((c - 0.3 * 2.0).abs() < 1e-12);
        assert_eq!(plan.entries.len(), 1);
    }

    #[test]
    fn symmetric_square_tie() {
        let a = AtomicMeasure::from_points(&[0.0, 0.5]).unwrap();
        let b = AtomicMeasure::from_points(&[0.25, 0.75]).unwrap();
        let (c, plan) = discrete_ot_oracle(&a, &b, 2.0).unwrap();
        assert!((c - 0.0625).abs() < 1e-12);
        plan.verify(&a, &b).unwrap();
    }

    #[test]
    fn matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..60 {
            let n = 1 + trial % 7;
            let xs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let p = [1.0, 1.5, 2.0, 3.0][trial % 4];
            let a = AtomicMeasure::from_points(&xs).unwrap();
            let b = AtomicMeasure::from_points(&ys).unwrap();
            let (c, _) = discrete_ot_oracle(&a, &b, p).unwrap();
            let bf = brute_force(&xs, &ys, p);
            assert!(
                (c - bf).abs() <= 1e-12 * (1.0 + bf),
                "trial {trial}: {c} vs {bf}"
            );
        }
    }

    #[test]
    fn unequal_weights_plan_is_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = AtomicMeasure::new(
            (0..40)
                .map(|_| Atom::new(rng.gen(), rng.gen_range(0.1..1.0)))
                .collect(),
        )
        .unwrap();
        let raw: Vec<Atom> = (0..25)
            .map(|_| Atom::new(rng.gen(), rng.gen_range(0.1..1.0)))
            .collect();
        let b = AtomicMeasure::new(raw).unwrap();
        let b = b.scaled(a.total_mass() / b.total_mass());
        let (_, plan) = discrete_ot_oracle(&a, &b, 2.0).unwrap();
        plan.verify(&a, &b).unwrap();
        assert!(plan.entries.len() < a.len() + b.len());
    }

    #[test]
    fn size_cap_and_csv() {
        let big = AtomicMeasure::lattice(300, 0.5).unwrap();
        assert!(matches!(
            discrete_ot_oracle(&big, &big, 1.0),
            Err(Error::SizeCap { .. })
        ));
        let a = AtomicMeasure::from_points(&[0.1, 0.6]).unwrap();
        let (_, plan) = discrete_ot_oracle(&a, &a, 1.0).unwrap();
        let mut buf = Vec::new();
        plan.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("source,target,mass\n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn quantize_keeps_cell_masses() {
        let d = TorusDensity::from_fn(1024, |x| 2.0 * x).unwrap();
        let q = quantize(&d, 16).unwrap();
        assert_eq!(q.len(), 16);
        assert!((q.total_mass() - d.mean()).abs() < 1e-12);
    }
}

//! Maximal probabilistic 1→2 cloning efficiencies for a linearly
//! independent state set, and the success-flag sampler.
//!
//! Efficiencies γ are achievable when the residual X1 − √Γ X2 √Γ is
//! positive semidefinite, where Xk has entries ⟨ψ_i|ψ_j⟩^k and
//! Γ = diag(γ). Overlaps carry a per-state ±1 phase freedom; X2 is
//! blind to it but X1 is not, so construction first gauges all overlaps
//! nonnegative. The feasible set is star-shaped about the origin (scaling
//! every γ by one factor t ∈ [0,1] gives (1−t)·X1 + t·residual, a sum of
//! PSD terms) but it is not downward closed: lowering one coordinate can
//! break the certificate, because the cross terms of √Γ X2 √Γ shrink
//! along with the diagonal it has to dominate.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::statevec::StateVector;

/// Minimum-eigenvalue tolerance: γ is feasible when the residual's
/// smallest eigenvalue is at least −PSD_TOL.
pub const PSD_TOL: f64 = 1e-10;

/// Overlaps must be real to this tolerance.
const IM_TOL: f64 = 1e-10;

/// Overlaps below this magnitude are treated as zero when gauging.
const EDGE_TOL: f64 = 1e-9;

/// Entry tolerance for the symmetry detector.
const SYMMETRY_TOL: f64 = 1e-12;

/// When the last coordinate's feasible interval is narrower than this,
/// the optimum is a tangency and gets pinned by derivative bisection.
const TANGENT_WIDTH: f64 = 1e-3;

/// The returned optimum backs off the boundary by this much so it stays
/// strictly feasible.
const BACKOFF: f64 = 1e-9;

/// Grid resolution for bracketing one-dimensional maxima.
const GRID: usize = 64;

/// A cloning machine specification: gauged Gram matrices of the clonee
/// states plus the per-state efficiencies.
#[derive(Clone, Debug)]
pub struct CloneSpec {
    x1: DMatrix<f64>,
    x2: DMatrix<f64>,
    gammas: Vec<f64>,
}

impl CloneSpec {
    /// Builds the spec from the clonee states: computes overlaps (which
    /// must be real), gauges them nonnegative, and rejects linearly
    /// dependent sets. Efficiencies start at zero.
    pub fn new(states: &[StateVector]) -> Result<Self> {
        Self::from_overlaps(gram_matrix(states)?)
    }

    /// Builds the spec from a raw overlap matrix (symmetric, unit
    /// diagonal); the same gauge and independence checks apply.
    pub fn from_overlaps(overlaps: DMatrix<f64>) -> Result<Self> {
        let m = overlaps.nrows();
        if m == 0 || overlaps.ncols() != m {
            return Err(Error::BadConfig("overlap matrix must be square and nonempty".into()));
        }
        for i in 0..m {
            if (overlaps[(i, i)] - 1.0).abs() > SYMMETRY_TOL {
                return Err(Error::BadConfig(format!("overlap ({i},{i}) is not 1")));
            }
            for j in 0..i {
                if (overlaps[(i, j)] - overlaps[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::BadConfig(format!("overlaps ({i},{j}) asymmetric")));
                }
            }
        }
        let signs = gauge_signs(&overlaps)?;
        let x1 = DMatrix::from_fn(m, m, |i, j| signs[i] * signs[j] * overlaps[(i, j)]);
        let min_eig = x1.clone().symmetric_eigenvalues().min();
        if min_eig <= PSD_TOL {
            return Err(Error::LinearlyDependent { min_eig });
        }
        let x2 = x1.map(|v| v * v);
        Ok(Self { x1, x2, gammas: vec![0.0; m] })
    }

    /// Number of clonee states.
    pub fn len(&self) -> usize {
        self.x1.nrows()
    }

    /// Always false: construction rejects empty state sets.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The gauged overlap ⟨ψ_i|ψ_j⟩.
    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        self.x1[(i, j)]
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Stores an efficiency vector after validating range and feasibility.
    pub fn with_gammas(mut self, gammas: Vec<f64>) -> Result<Self> {
        if gammas.len() != self.len() {
            return Err(Error::BadGammas(format!(
                "expected {} efficiencies, got {}",
                self.len(),
                gammas.len()
            )));
        }
        if !self.feasible(&gammas) {
            return Err(Error::BadGammas("vector is not achievable".into()));
        }
        self.gammas = gammas;
        Ok(self)
    }

    /// The residual X1 − √Γ X2 √Γ.
    pub fn residual(&self, gammas: &[f64]) -> DMatrix<f64> {
        assert_eq!(gammas.len(), self.len(), "efficiency vector length");
        let m = self.len();
        DMatrix::from_fn(m, m, |i, j| {
            self.x1[(i, j)] - (gammas[i] * gammas[j]).sqrt() * self.x2[(i, j)]
        })
    }

    /// Smallest eigenvalue of the residual at `gammas`.
    pub fn min_residual_eig(&self, gammas: &[f64]) -> f64 {
        self.residual(gammas).symmetric_eigenvalues().min()
    }

    /// Whether `gammas` is an achievable efficiency vector.
    pub fn feasible(&self, gammas: &[f64]) -> bool {
        assert_eq!(gammas.len(), self.len(), "efficiency vector length");
        if gammas.iter().any(|&g| !(0.0..=1.0).contains(&g)) {
            return false;
        }
        self.min_residual_eig(gammas) >= -PSD_TOL
    }

    /// Groups states whose exchange leaves the overlap matrix invariant;
    /// returns one group label per state (the smallest member index).
    /// Equal-overlap states are interchangeable, so their optimal
    /// efficiencies coincide and the search space shrinks.
    pub fn detect_symmetry(&self) -> Vec<usize> {
        let m = self.len();
        let mut ids = vec![0usize; m];
        for i in 0..m {
            ids[i] = (0..i)
                .find(|&j| ids[j] == j && self.swap_invariant(i, j))
                .unwrap_or(i);
        }
        ids
    }

    fn swap_invariant(&self, a: usize, b: usize) -> bool {
        let m = self.len();
        let p = |k: usize| {
            if k == a {
                b
            } else if k == b {
                a
            } else {
                k
            }
        };
        for r in 0..m {
            for c in 0..m {
                if (self.x1[(p(r), p(c))] - self.x1[(r, c)]).abs() > SYMMETRY_TOL {
                    return false;
                }
            }
        }
        true
    }

    /// Maximal achievable efficiencies.
    ///
    /// `symmetry` assigns one label per state; states sharing a label are
    /// forced to a common efficiency (None = detect from the overlaps).
    /// Groups are then maximized lexicographically: largest group first
    /// (ties broken by smallest member index), each group pushed as high
    /// as the remaining free groups allow. When fixing the earlier groups
    /// pinches the last coordinate's feasible interval to (near) a point,
    /// the joint optimum is a boundary tangency; it is re-solved by
    /// bisecting the sign of the derivative of the attainable prior-group
    /// value, which locates the argument to ~1e−9 where plain interval
    /// arithmetic would stop at the square root of the working precision.
    pub fn max_efficiencies(&self, symmetry: Option<&[usize]>) -> Result<Vec<f64>> {
        let m = self.len();
        let ids = match symmetry {
            Some(ids) => {
                if ids.len() != m {
                    return Err(Error::BadConfig(format!(
                        "symmetry pattern has {} labels for {} states",
                        ids.len(),
                        m
                    )));
                }
                ids.to_vec()
            }
            None => self.detect_symmetry(),
        };
        let mut groups = group_indices(&ids);
        groups.sort_by_key(|g| (std::cmp::Reverse(g.len()), g[0]));
        let vals = self.lex_maximize(&groups);
        let mut out = vec![0.0; m];
        for (group, v) in groups.iter().zip(&vals) {
            for &i in group {
                out[i] = *v;
            }
        }
        Ok(out)
    }

    /// Bernoulli flag draw: true (cloning succeeded) with probability
    /// gammas[which].
    pub fn sample_clone<R: Rng + ?Sized>(&self, which: usize, rng: &mut R) -> bool {
        rng.random_bool(self.gammas[which])
    }

    /// Mean efficiency: the fraction of attempts whose flag reads success
    /// under a uniform prior over the states.
    pub fn success_probability(&self) -> f64 {
        self.gammas.iter().sum::<f64>() / self.len() as f64
    }

    /// Posterior over the input state given the flag read failure, under
    /// a uniform prior: (1−γ_i)/Σ_j(1−γ_j). Degenerates to uniform when
    /// every γ is 1 (failure never happens).
    pub fn failure_posterior(&self) -> Vec<f64> {
        let total: f64 = self.gammas.iter().map(|g| 1.0 - g).sum();
        if total <= f64::EPSILON {
            return vec![1.0 / self.len() as f64; self.len()];
        }
        self.gammas.iter().map(|g| (1.0 - g) / total).collect()
    }

    /// Residual min eigenvalue with per-group values scattered to states.
    fn group_min_eig(&self, groups: &[Vec<usize>], vals: &[f64]) -> f64 {
        let mut gammas = vec![0.0; self.len()];
        for (group, v) in groups.iter().zip(vals) {
            for &i in group {
                gammas[i] = *v;
            }
        }
        self.min_residual_eig(&gammas)
    }

    /// Best (largest) residual min eigenvalue over all unassigned groups.
    fn best_min_eig(&self, groups: &[Vec<usize>], vals: &mut Vec<Option<f64>>) -> f64 {
        match vals.iter().position(Option::is_none) {
            None => {
                let fixed: Vec<f64> = vals.iter().map(|v| v.unwrap()).collect();
                self.group_min_eig(groups, &fixed)
            }
            Some(i) => {
                let f = |t: f64, spec: &Self, vals: &mut Vec<Option<f64>>| {
                    vals[i] = Some(t);
                    let eig = spec.best_min_eig(groups, vals);
                    vals[i] = None;
                    eig
                };
                grid_golden_max(|t| f(t, self, vals), 0.0, 1.0).1
            }
        }
    }

    /// Largest value of the group after the fixed prefix for which some
    /// assignment of the remaining free groups stays feasible.
    fn sup_group_value(&self, groups: &[Vec<usize>], fixed: &[f64]) -> f64 {
        let total = groups.len();
        let pred = |t: f64| {
            let mut vals: Vec<Option<f64>> = Vec::with_capacity(total);
            vals.extend(fixed.iter().map(|&v| Some(v)));
            vals.push(Some(t));
            vals.resize(total, None);
            self.best_min_eig(groups, &mut vals) >= -PSD_TOL
        };
        if pred(1.0) {
            return 1.0;
        }
        debug_assert!(pred(0.0), "zero efficiencies are always feasible");
        bisect_true_edge(pred, 0.0, 1.0)
    }

    /// Feasible interval of the final group's value given the fixed
    /// prefix; degenerates to a point when the prefix sits on the
    /// boundary.
    fn last_interval(&self, groups: &[Vec<usize>], fixed: &[f64]) -> (f64, f64) {
        let assemble = |t: f64| {
            let mut vals: Vec<f64> = fixed.to_vec();
            vals.push(t);
            vals
        };
        let eig = |t: f64| self.group_min_eig(groups, &assemble(t));
        let (t_best, best) = grid_golden_max(eig, 0.0, 1.0);
        if best < -PSD_TOL {
            return (t_best, t_best);
        }
        let lo = if eig(0.0) >= -PSD_TOL {
            0.0
        } else {
            bisect_true_edge(|t| eig(t) >= -PSD_TOL, t_best, 0.0)
        };
        let hi = if eig(1.0) >= -PSD_TOL {
            1.0
        } else {
            bisect_true_edge(|t| eig(t) >= -PSD_TOL, t_best, 1.0)
        };
        (lo, hi)
    }

    /// Joint tangency solve for the last two groups: maximize the
    /// prior group's attainable value β(t) over the last group's value t,
    /// pinning the argmax by bisecting the sign of dβ/dt.
    fn polish_tangent(&self, groups: &[Vec<usize>], earlier: &[f64]) -> (f64, f64) {
        let beta = |t: f64| -> Option<f64> {
            let eig = |s: f64| {
                let mut vals: Vec<f64> = earlier.to_vec();
                vals.push(s);
                vals.push(t);
                self.group_min_eig(groups, &vals)
            };
            if eig(0.0) < -PSD_TOL {
                return None;
            }
            if eig(1.0) >= -PSD_TOL {
                return Some(1.0);
            }
            Some(bisect_true_edge(|s| eig(s) >= -PSD_TOL, 0.0, 1.0))
        };
        let lifted = |t: f64| beta(t).unwrap_or(f64::NEG_INFINITY);
        let (t0, _) = grid_golden_max(lifted, 0.0, 1.0);

        // Central difference of β; β itself is resolved to machine
        // precision by the edge bisection, so the quotient's noise floor
        // sits near 1e−10 in t.
        let h = 1e-6;
        let fd = |t: f64| lifted(t + h) - lifted(t - h);
        let mut lo = (t0 - 1e-4).max(h);
        let mut hi = (t0 + 1e-4).min(1.0 - h);
        let mut widen = 0;
        while fd(lo) <= 0.0 && widen < 8 && lo > h {
            lo = (lo - 4.0 * (t0 - lo).abs().max(1e-4)).max(h);
            widen += 1;
        }
        while fd(hi) >= 0.0 && widen < 16 && hi < 1.0 - h {
            hi = (hi + 4.0 * (hi - t0).abs().max(1e-4)).min(1.0 - h);
            widen += 1;
        }
        let t_star = if fd(lo) > 0.0 && fd(hi) < 0.0 {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if fd(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        } else {
            // No derivative sign change bracketed; keep the golden point.
            t0
        };

        let mut s_star = (lifted(t_star) - BACKOFF).clamp(0.0, 1.0);
        let assemble = |s: f64, t: f64| {
            let mut vals: Vec<f64> = earlier.to_vec();
            vals.push(s);
            vals.push(t);
            vals
        };
        while self.group_min_eig(groups, &assemble(s_star, t_star)) < -PSD_TOL && s_star > 0.0 {
            s_star = (s_star - BACKOFF).max(0.0);
        }
        (s_star, t_star)
    }

    fn lex_maximize(&self, groups: &[Vec<usize>]) -> Vec<f64> {
        let total = groups.len();
        let mut vals = vec![0.0; total];
        for k in 0..total {
            if k + 1 < total {
                vals[k] = self.sup_group_value(groups, &vals[..k]);
            } else {
                let (lo, hi) = self.last_interval(groups, &vals[..k]);
                if k > 0 && hi - lo < TANGENT_WIDTH {
                    let (prev, last) = self.polish_tangent(groups, &vals[..k - 1]);
                    vals[k - 1] = prev;
                    vals[k] = last;
                } else {
                    vals[k] = hi;
                }
            }
        }
        vals
    }
}

/// Multiplies each state by ±1 so every overlap on a spanning forest of
/// the nonzero-overlap graph is nonnegative, then verifies the gauge
/// clears every edge. Efficiencies only depend on overlaps through X2 and
/// the gauged X1, so they are invariant under any ±1 re-phasing.
pub fn gauge_normalize(states: &[StateVector]) -> Result<Vec<StateVector>> {
    let overlaps = gram_matrix(states)?;
    let signs = gauge_signs(&overlaps)?;
    Ok(states
        .iter()
        .zip(&signs)
        .map(|(s, &sign)| if sign < 0.0 { s.scaled((-1.0).into()) } else { s.clone() })
        .collect())
}

/// Real overlap matrix of the states; complex overlaps are an error.
fn gram_matrix(states: &[StateVector]) -> Result<DMatrix<f64>> {
    if states.is_empty() {
        return Err(Error::BadConfig("no clonee states".into()));
    }
    let m = states.len();
    let mut x1 = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let ip = states[i].inner(&states[j])?;
            if ip.im.abs() > IM_TOL {
                return Err(Error::ComplexOverlap { i, j, imag: ip.im });
            }
            x1[(i, j)] = ip.re;
        }
    }
    Ok(x1)
}

/// Per-state ±1 factors making spanning-forest overlaps nonnegative,
/// verified on all edges.
fn gauge_signs(overlaps: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = overlaps.nrows();
    let mut signs: Vec<f64> = vec![0.0; m];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..m {
        if signs[root] != 0.0 {
            continue;
        }
        signs[root] = 1.0;
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            for j in 0..m {
                if i == j || overlaps[(i, j)].abs() <= EDGE_TOL {
                    continue;
                }
                let want = signs[i] * overlaps[(i, j)].signum();
                if signs[j] == 0.0 {
                    signs[j] = want;
                    queue.push_back(j);
                }
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            if signs[i] * signs[j] * overlaps[(i, j)] < -EDGE_TOL {
                return Err(Error::GaugeConflict { i, j });
            }
        }
    }
    Ok(signs)
}

fn group_indices(ids: &[usize]) -> Vec<Vec<usize>> {
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, &label) in ids.iter().enumerate() {
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, g)) => g.push(i),
            None => groups.push((label, vec![i])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Locates the maximum of a quasi-concave function on [lo, hi]: coarse
/// grid to bracket, then golden-section refinement.
fn grid_golden_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let step = (hi - lo) / GRID as f64;
    let mut best = (lo, f(lo));
    for i in 1..=GRID {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    let mut a = (best.0 - step).max(lo);
    let mut b = (best.0 + step).min(hi);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..70 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm >= best.1 {
        (mid, fm)
    } else {
        best
    }
}

/// Last `true` point of a predicate that is true at `from` and false at
/// `to`, by bisection to machine precision.
fn bisect_true_edge(mut pred: impl FnMut(f64) -> bool, from: f64, to: f64) -> f64 {
    let (mut t, mut f) = (from, to);
    for _ in 0..64 {
        let mid = 0.5 * (t + f);
        if pred(mid) {
            t = mid;
        } else {
            f = mid;
        }
    }
    t
}

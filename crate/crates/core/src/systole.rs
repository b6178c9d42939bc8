//! Class systoles: the least lengths `l_sigma`, `l_v`, `l_h` of closed
//! curves freely homotopic to the glide reflection, the vertical
//! translation, and the horizontal translation, plus `L_sigma =
//! min(l_sigma, l_h)`.
//!
//! Closed forms cover the profile families; the general path is a shortest-
//! path search on a lifted window of the conformal grid with a 16-neighbor
//! stencil (king + knight moves).
//!
//! # Why basepoints are paired
//!
//! A loop in the class of a deck transformation `D` lifts to a path from a
//! point `p` to `D(p)` — the same `p` at both ends. The class length is the
//! minimum of `d(p, D(p))` over basepoints `p`, which a crossing argument
//! reduces to basepoints on one line: every glide loop crosses the seam
//! circle `u = ±pi/2`, every vertical loop crosses each horizontal line,
//! and every horizontal loop crosses each vertical circle. A multi-source
//! sweep over that whole line at once would instead compute
//! `min over i, j of d(p_i, D(p_j))`, mixing basepoints; paths with `i != j`
//! do not close up in the quotient, so that quantity can undercut the true
//! class length. The engine therefore runs one bounded search per basepoint
//! pair `(p_i, D(p_i))` and prunes with Lipschitz bounds instead.

use crate::error::{Error, Result};
use crate::geometry::{GridMetric, ProfileKind, ProfileMetric};
use crate::io::{f64_str, Metric};
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// The three free homotopy classes whose least lengths enter the
/// inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomotopyClass {
    /// Glide reflection `(u, v) -> (u + pi, -v)`.
    Sigma,
    /// Vertical translation `(u, v) -> (u, v + 2V)`.
    Vertical,
    /// Horizontal translation `(u, v) -> (u + 2 pi, v)`, the glide squared.
    Horizontal,
}

impl HomotopyClass {
    pub const ALL: [HomotopyClass; 3] =
        [HomotopyClass::Sigma, HomotopyClass::Vertical, HomotopyClass::Horizontal];

    pub fn slug(self) -> &'static str {
        match self {
            HomotopyClass::Sigma => "sigma",
            HomotopyClass::Vertical => "v",
            HomotopyClass::Horizontal => "h",
        }
    }

    pub fn from_slug(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.slug() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown homotopy class {s:?}")))
    }
}

/// A great circle of a spherical cap region (`f = cos v`), closed up by the
/// glide reflection: maximum latitude `a`, reached at longitude `theta`.
#[derive(Clone, Copy, Debug)]
pub struct GreatCircle {
    pub theta: f64,
    pub a: f64,
}

impl GreatCircle {
    /// Latitude profile: `tan v = tan a * cos(u - theta)`.
    pub fn latitude(&self, u: f64) -> f64 {
        (self.a.tan() * (u - self.theta).cos()).atan()
    }

    /// Arc-length element `ds/du = sqrt(cos^2 v + (dv/du)^2)` at longitude `u`.
    pub fn speed(&self, u: f64) -> f64 {
        let v = self.latitude(u);
        let dv_du = -self.a.tan() * (u - self.theta).sin() * v.cos() * v.cos();
        (v.cos() * v.cos() + dv_du * dv_du).sqrt()
    }

    /// Total length over the half-turn `u in [theta - pi/2, theta + pi/2]`;
    /// equals `pi` for every `(theta, a)`.
    pub fn length(&self) -> f64 {
        PI
    }
}

/// Least length of the class on a profile metric, in closed form.
///
/// * `Vertical`: `2V` for every profile (a meridian is optimal, and any
///   vertical loop has total `|dv|` at least `2V`).
/// * `Horizontal`: `2 pi * min f` for every profile (a parallel at the
///   minimum is optimal; any horizontal loop has `integral of f |du| >=
///   2 pi min f`).
/// * `Sigma`: `pi * c` for the constant profile (plane distance from
///   `(u, v)` to `(u + pi, -v)` is minimized at `v = 0`), and `pi` for the
///   spherical-cap families (realized by cap great circles). No closed form
///   for tabulated profiles — fall back to the graph.
pub fn length_closed_form(class: HomotopyClass, m: &ProfileMetric) -> Result<f64> {
    match class {
        HomotopyClass::Vertical => Ok(2.0 * m.v_half_height()),
        HomotopyClass::Horizontal => {
            let min = match m.kind() {
                ProfileKind::Constant { c } => *c,
                ProfileKind::SphericalCap { b } => b.cos(),
                ProfileKind::FlatSpherical { omega, .. } => omega.cos(),
                ProfileKind::FlatSphericalPi3 { .. } => 0.5,
                // Piecewise-linear profile: the minimum sits at a sample.
                ProfileKind::Tabulated { samples } => {
                    samples.iter().copied().fold(f64::INFINITY, f64::min)
                }
            };
            Ok(2.0 * PI * min)
        }
        HomotopyClass::Sigma => match m.kind() {
            ProfileKind::Constant { c } => Ok(PI * c),
            ProfileKind::SphericalCap { .. }
            | ProfileKind::FlatSpherical { .. }
            | ProfileKind::FlatSphericalPi3 { .. } => Ok(PI),
            ProfileKind::Tabulated { .. } => Err(Error::NoClosedForm(
                "glide-class length of a tabulated profile requires the graph search".into(),
            )),
        },
    }
}

/// Tuning knobs of the graph search.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    /// Cap on bounded searches per basepoint family.
    pub max_evals_per_family: usize,
    /// Basepoints whose lower bound is within this relative slack of the
    /// current best are pruned (their evaluation cannot improve the result
    /// by more than the slack).
    pub prune_slack: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_evals_per_family: 96, prune_slack: 1e-3 }
    }
}

/// 16-neighbor stencil: king moves and knight moves.
const STENCIL: [(i64, i64); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (1, 2),
    (1, -2),
    (-1, 2),
    (-1, -2),
    (2, 1),
    (2, -1),
    (-2, 1),
    (-2, -1),
];

/// A rectangular window of the lifted plane with cached conformal factors.
struct Window {
    n_cols: i64,
    n_rows: i64,
    c_lo: i64,
    r_lo: i64,
    hu: f64,
    hw: f64,
    phi: Vec<f64>,
    phi_min: f64,
    /// `row_pref[k] - row_pref[j]` lower-bounds the cost of any path from
    /// row `j` to row `k > j`: every inter-row gap must be crossed, and a
    /// stencil step crossing the gap between rows `r` and `r + 1` costs at
    /// least `hw * min(rowmin[r], rowmin[r+1])` (king steps have segment
    /// `>= hw`; knight steps cross two gaps with segment `>= 2 hw`).
    row_pref: Vec<f64>,
    /// Column analogue of `row_pref` (segments `>= hu` per gap).
    col_pref: Vec<f64>,
}

impl Window {
    fn build(g: &GridMetric, c_lo: i64, c_hi: i64, r_lo: i64, r_hi: i64) -> Window {
        let n_cols = c_hi - c_lo + 1;
        let n_rows = r_hi - r_lo + 1;
        let (hu, hw) = g.spacing();
        let mut phi = Vec::with_capacity((n_cols * n_rows) as usize);
        let mut phi_min = f64::INFINITY;
        let mut rowmin = vec![f64::INFINITY; n_rows as usize];
        let mut colmin = vec![f64::INFINITY; n_cols as usize];
        for r in r_lo..=r_hi {
            let ri = (r - r_lo) as usize;
            for c in c_lo..=c_hi {
                let p = g.lift(c, r);
                phi_min = phi_min.min(p);
                let ci = (c - c_lo) as usize;
                rowmin[ri] = rowmin[ri].min(p);
                colmin[ci] = colmin[ci].min(p);
                phi.push(p);
            }
        }
        let mut row_pref = vec![0.0; n_rows as usize];
        for j in 1..n_rows as usize {
            row_pref[j] = row_pref[j - 1] + hw * rowmin[j - 1].min(rowmin[j]);
        }
        let mut col_pref = vec![0.0; n_cols as usize];
        for i in 1..n_cols as usize {
            col_pref[i] = col_pref[i - 1] + hu * colmin[i - 1].min(colmin[i]);
        }
        Window { n_cols, n_rows, c_lo, r_lo, hu, hw, phi, phi_min, row_pref, col_pref }
    }

    /// Admissible, consistent distance lower bound to `(tc, tr)`:
    /// the best of the scaled Euclidean bound and the row/column band
    /// bounds (the maximum of consistent lower bounds stays consistent).
    #[inline]
    fn heuristic(&self, c: i64, r: i64, tc: i64, tr: i64) -> f64 {
        let du = (c - tc) as f64 * self.hu;
        let dw = (r - tr) as f64 * self.hw;
        let euclid = self.phi_min * (du * du + dw * dw).sqrt();
        let row_band =
            (self.row_pref[(r - self.r_lo) as usize] - self.row_pref[(tr - self.r_lo) as usize]).abs();
        let col_band =
            (self.col_pref[(c - self.c_lo) as usize] - self.col_pref[(tc - self.c_lo) as usize]).abs();
        euclid.max(row_band).max(col_band)
    }

    #[inline]
    fn id(&self, c: i64, r: i64) -> u32 {
        debug_assert!(c >= self.c_lo && c < self.c_lo + self.n_cols);
        debug_assert!(r >= self.r_lo && r < self.r_lo + self.n_rows);
        ((r - self.r_lo) * self.n_cols + (c - self.c_lo)) as u32
    }

    #[inline]
    fn coords(&self, id: u32) -> (i64, i64) {
        let id = id as i64;
        (self.c_lo + id % self.n_cols, self.r_lo + id / self.n_cols)
    }

    /// Edge weight: endpoint-averaged conformal factor times Euclidean
    /// segment length (trapezoid rule along the segment; second order).
    #[inline]
    fn edge(&self, a: usize, b: usize, seg: f64) -> f64 {
        0.5 * (self.phi[a] + self.phi[b]) * seg
    }

    /// Cost of the single-step walk along a straight row or column between
    /// two window nodes (used for chain Lipschitz bounds and upper bounds).
    fn walk_cost(&self, from: (i64, i64), to: (i64, i64)) -> f64 {
        let (mut c, mut r) = from;
        let (dc, dr) = ((to.0 - c).signum(), (to.1 - r).signum());
        let step = if dr == 0 { self.hu } else { self.hw };
        let mut acc = 0.0;
        while (c, r) != to {
            let a = self.id(c, r) as usize;
            c += dc;
            r += dr;
            let b = self.id(c, r) as usize;
            acc += self.edge(a, b, step);
        }
        acc
    }
}

enum Outcome {
    /// Exact distance, strictly below the cutoff passed in.
    Reached(f64),
    /// Certified: the distance is at least this value.
    AtLeast(f64),
}

/// Reusable search buffers (distance table with generation stamps).
struct Workspace {
    dist: Vec<f64>,
    stamp: Vec<u32>,
    generation: u32,
    heap: BinaryHeap<HeapEntry>,
}

#[derive(PartialEq)]
struct HeapEntry {
    f: f64,
    g: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Min-heap on f via reversed comparison.
        other.f.total_cmp(&self.f)
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![f64::INFINITY; n],
            stamp: vec![0; n],
            generation: 0,
            heap: BinaryHeap::new(),
        }
    }

    #[inline]
    fn get(&self, node: u32) -> f64 {
        if self.stamp[node as usize] == self.generation {
            self.dist[node as usize]
        } else {
            f64::INFINITY
        }
    }

    #[inline]
    fn set(&mut self, node: u32, d: f64) {
        self.stamp[node as usize] = self.generation;
        self.dist[node as usize] = d;
    }
}

/// Bounded point-to-point search: A* with the admissible, consistent
/// heuristic `phi_min * euclidean distance`. Stops as soon as the best
/// possible total meets `cutoff`.
fn astar(win: &Window, ws: &mut Workspace, source: u32, target: u32, cutoff: f64) -> Outcome {
    if cutoff <= 0.0 {
        return Outcome::AtLeast(cutoff);
    }
    ws.generation = ws.generation.wrapping_add(1);
    if ws.generation == 0 {
        // Stamp wrap: invalidate everything once per 2^32 searches.
        ws.stamp.fill(0);
        ws.generation = 1;
    }
    ws.heap.clear();
    let (tc, tr) = win.coords(target);
    let (sc, sr) = win.coords(source);
    ws.set(source, 0.0);
    ws.heap.push(HeapEntry { f: win.heuristic(sc, sr, tc, tr), g: 0.0, node: source });
    while let Some(HeapEntry { f, g, node }) = ws.heap.pop() {
        if f >= cutoff {
            return Outcome::AtLeast(cutoff);
        }
        if node == target {
            return Outcome::Reached(g);
        }
        if g > ws.get(node) {
            continue; // stale entry
        }
        let (c, r) = win.coords(node);
        for (dc, dr) in STENCIL {
            let (nc, nr) = (c + dc, r + dr);
            if nc < win.c_lo
                || nc >= win.c_lo + win.n_cols
                || nr < win.r_lo
                || nr >= win.r_lo + win.n_rows
            {
                continue;
            }
            let du = dc as f64 * win.hu;
            let dw = dr as f64 * win.hw;
            let seg = (du * du + dw * dw).sqrt();
            let nb = win.id(nc, nr);
            let ng = g + win.edge(node as usize, nb as usize, seg);
            if ng < ws.get(nb) {
                ws.set(nb, ng);
                let hn = win.heuristic(nc, nr, tc, tr);
                ws.heap.push(HeapEntry { f: ng + hn, g: ng, node: nb });
            }
        }
    }
    // Heap exhausted: every path to the target costs at least the cutoff.
    Outcome::AtLeast(cutoff)
}

/// One family of paired basepoints sharing a Lipschitz chain: `chain[i]` is
/// the accumulated chain cost from pair 0 to pair i (`d(s_0..s_i) +
/// d(t_0..t_i)` bounded by single-step walks along the basepoint lines).
struct PairFamily {
    pairs: Vec<(u32, u32)>,
    chain: Vec<f64>,
    /// Straight-walk upper bound per pair.
    straight: Vec<f64>,
}

/// Exact-within-slack minimization of `d(s_i, t_i)` over all pairs of all
/// families. Returns `(value, gap)` where `value` is an upper bound of the
/// true discrete minimum and `gap` bounds how far below `value` the true
/// minimum could still lie (`0` when every basepoint was evaluated or
/// pruned rigorously).
fn min_paired(
    win: &Window,
    ws: &mut Workspace,
    families: &[PairFamily],
    budget: SearchBudget,
) -> (f64, f64) {
    #[derive(Clone, Copy)]
    struct Slot {
        family: usize,
        index: usize,
        lb: f64,
        evaluated: bool,
    }
    let mut slots: Vec<Slot> = Vec::new();
    let mut best = f64::INFINITY;
    for (fi, fam) in families.iter().enumerate() {
        for (i, &(s, t)) in fam.pairs.iter().enumerate() {
            best = best.min(fam.straight[i]);
            let (sc, sr) = win.coords(s);
            let (tc, tr) = win.coords(t);
            slots.push(Slot {
                family: fi,
                index: i,
                lb: win.heuristic(sc, sr, tc, tr),
                evaluated: false,
            });
        }
    }
    let mut evals = 0usize;
    loop {
        // Cheapest unevaluated candidate by lower bound.
        let mut pick: Option<usize> = None;
        for (k, slot) in slots.iter().enumerate() {
            if !slot.evaluated && pick.is_none_or(|p| slot.lb < slots[p].lb) {
                pick = Some(k);
            }
        }
        let Some(k) = pick else { break };
        if slots[k].lb >= best * (1.0 - budget.prune_slack) {
            break; // nothing left can improve beyond the slack
        }
        if evals >= budget.max_evals_per_family * families.len() {
            break; // budget exhausted; the remaining uncertainty goes to the gap
        }
        let (fi, i) = (slots[k].family, slots[k].index);
        let (s, t) = families[fi].pairs[i];
        let floor = match astar(win, ws, s, t, best) {
            Outcome::Reached(d) => {
                best = d;
                d
            }
            Outcome::AtLeast(c) => c,
        };
        evals += 1;
        slots[k].evaluated = true;
        slots[k].lb = floor;
        // Lipschitz propagation within the family:
        // |F(i) - F(j)| <= chain distance between the pairs.
        let chain = &families[fi].chain;
        for slot in slots.iter_mut() {
            if slot.family == fi && !slot.evaluated {
                let d = (chain[slot.index] - chain[i]).abs();
                slot.lb = slot.lb.max(floor - d);
            }
        }
    }
    let mut gap = 0.0f64;
    for slot in &slots {
        if !slot.evaluated {
            gap = gap.max(best - slot.lb);
        }
    }
    (best, gap.max(0.0).min(best))
}

/// Whether every grid row is constant (the conformal factor depends on `w`
/// only), which holds exactly for resampled profile metrics.
fn is_u_invariant(g: &GridMetric) -> bool {
    for j in 0..g.n_v() {
        let row = &g.factors()[j * g.n_u()..(j + 1) * g.n_u()];
        let first = row[0];
        if row.iter().any(|p| (p - first).abs() > 1e-13 * first.abs()) {
            return false;
        }
    }
    true
}

fn sigma_families(g: &GridMetric, win: &Window, u_invariant: bool) -> Vec<PairFamily> {
    let pu = (g.n_u() - 1) as i64;
    let pv = (g.n_v() - 1) as i64;
    // Family A: basepoints on the seam circle read at u = -pi/2;
    // family B: the same circle read at u = +pi/2, giving the search room
    // to wander on the other side. B is redundant by symmetry when the
    // factor is u-invariant.
    let starts: &[i64] = if u_invariant { &[0] } else { &[0, pu] };
    starts
        .iter()
        .map(|&c_s| {
            let c_t = c_s + pu;
            let mut pairs = Vec::with_capacity(pv as usize + 1);
            let mut chain = Vec::with_capacity(pv as usize + 1);
            let mut straight = Vec::with_capacity(pv as usize + 1);
            let mut acc = 0.0;
            for j in 0..=pv {
                let s = win.id(c_s, j);
                let t = win.id(c_t, pv - j);
                if j > 0 {
                    acc += win.walk_cost((c_s, j - 1), (c_s, j))
                        + win.walk_cost((c_t, pv - j + 1), (c_t, pv - j));
                }
                pairs.push((s, t));
                chain.push(acc);
                // L-shaped upper bound: along the row, then down the column.
                straight.push(
                    win.walk_cost((c_s, j), (c_t, j)) + win.walk_cost((c_t, j), (c_t, pv - j)),
                );
            }
            PairFamily { pairs, chain, straight }
        })
        .collect()
}

fn vertical_family(g: &GridMetric, win: &Window, r0: i64, u_invariant: bool) -> Vec<PairFamily> {
    let pu = (g.n_u() - 1) as i64;
    let pv = (g.n_v() - 1) as i64;
    let cols: Vec<i64> = if u_invariant {
        // Every column gives the same paired distance; one representative.
        vec![pu / 2]
    } else {
        (0..=pu).collect()
    };
    let mut pairs = Vec::with_capacity(cols.len());
    let mut chain = Vec::with_capacity(cols.len());
    let mut straight = Vec::with_capacity(cols.len());
    let mut acc = 0.0;
    for (k, &c) in cols.iter().enumerate() {
        if k > 0 {
            acc += win.walk_cost((cols[k - 1], r0), (c, r0))
                + win.walk_cost((cols[k - 1], r0 + pv), (c, r0 + pv));
        }
        pairs.push((win.id(c, r0), win.id(c, r0 + pv)));
        chain.push(acc);
        straight.push(win.walk_cost((c, r0), (c, r0 + pv)));
    }
    vec![PairFamily { pairs, chain, straight }]
}

fn horizontal_family(g: &GridMetric, win: &Window) -> Vec<PairFamily> {
    let pu = (g.n_u() - 1) as i64;
    let pv = (g.n_v() - 1) as i64;
    let (c_s, c_t) = (pu, 3 * pu);
    let mut pairs = Vec::with_capacity(pv as usize + 1);
    let mut chain = Vec::with_capacity(pv as usize + 1);
    let mut straight = Vec::with_capacity(pv as usize + 1);
    let mut acc = 0.0;
    for j in 0..=pv {
        if j > 0 {
            acc += win.walk_cost((c_s, j - 1), (c_s, j)) + win.walk_cost((c_t, j - 1), (c_t, j));
        }
        pairs.push((win.id(c_s, j), win.id(c_t, j)));
        chain.push(acc);
        straight.push(win.walk_cost((c_s, j), (c_t, j)));
    }
    vec![PairFamily { pairs, chain, straight }]
}

/// Least class length on a grid metric by bounded graph search. Returns
/// `(length, gap)`: the length is an upper bound for the discrete minimum,
/// and the gap bounds how much lower the unexplored basepoints could be.
fn length_graph_raw(class: HomotopyClass, g: &GridMetric, budget: SearchBudget) -> (f64, f64) {
    let pu = (g.n_u() - 1) as i64;
    let pv = (g.n_v() - 1) as i64;
    let u_invariant = is_u_invariant(g);
    let (win, families) = match class {
        HomotopyClass::Sigma => {
            // Lift [-pi/2, 3pi/2] x [-beta, beta].
            let win = Window::build(g, 0, 2 * pu, 0, pv);
            let fams = sigma_families(g, &win, u_invariant);
            (win, fams)
        }
        HomotopyClass::Vertical => {
            // Lift [-beta, 3beta] vertically, with half a copy of slack on
            // each side of the seam so near-seam loops may cross it.
            let margin = pu / 2;
            let win = Window::build(g, -margin, pu + margin, 0, 2 * pv);
            let r0 = pv / 2;
            let fams = vertical_family(g, &win, r0, u_invariant);
            (win, fams)
        }
        HomotopyClass::Horizontal => {
            // Lift [-pi/2, 7pi/2] x [-beta, beta]: a full turn from
            // u = pi/2 to u = pi/2 + 2 pi with a pi of slack on each side.
            let win = Window::build(g, 0, 4 * pu, 0, pv);
            let fams = horizontal_family(g, &win);
            (win, fams)
        }
    };
    let mut ws = Workspace::new((win.n_cols * win.n_rows) as usize);
    min_paired(&win, &mut ws, &families, budget)
}

/// Least class length on a grid metric, with an error estimate combining
/// the basepoint gap and a half-resolution Richardson comparison. Requires
/// at least 64 x 64 nodes.
pub fn length_graph(class: HomotopyClass, g: &GridMetric) -> Result<(f64, f64)> {
    length_graph_budgeted(class, g, SearchBudget::default())
}

/// `length_graph` under an explicit search budget. Tightening the budget
/// only ever skips basepoint evaluations, so the value stays a genuine
/// upper bound on the class length; the skipped-pair risk is reported
/// through the error estimate.
pub fn length_graph_budgeted(
    class: HomotopyClass,
    g: &GridMetric,
    budget: SearchBudget,
) -> Result<(f64, f64)> {
    if g.n_u() < 64 || g.n_v() < 64 {
        return Err(Error::Resolution(format!(
            "graph systoles need at least 64x64 nodes, got {}x{}",
            g.n_u(),
            g.n_v()
        )));
    }
    let (value, gap) = length_graph_raw(class, g, budget);
    let half = g.subsample_half()?;
    let (value_half, _) = length_graph_raw(class, &half, budget);
    // The coarse value is an upper bound too; its excess over the fine
    // value estimates the discretization-driven part of the error.
    let richardson = (value_half - value).abs();
    let estimate = gap + richardson + 1e-3 * value;
    Ok((value, estimate))
}

/// Error estimates attached to graph-searched lengths (`None` when the
/// value came from a closed form).
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ErrorEstimate {
    #[serde(with = "f64_str::optional")]
    pub l_sigma: Option<f64>,
    #[serde(with = "f64_str::optional")]
    pub l_v: Option<f64>,
    #[serde(with = "f64_str::optional")]
    pub l_h: Option<f64>,
}

/// All class lengths of one metric, plus the volume and the resolution the
/// graph searches ran at.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SystoleReport {
    #[serde(with = "f64_str::optional")]
    pub l_sigma: Option<f64>,
    #[serde(with = "f64_str::optional")]
    pub l_v: Option<f64>,
    #[serde(with = "f64_str::optional")]
    pub l_h: Option<f64>,
    /// `min(l_sigma, l_h)` when both were computed.
    #[serde(rename = "L_sigma", with = "f64_str::optional")]
    pub big_l_sigma: Option<f64>,
    #[serde(with = "f64_str")]
    pub volume: f64,
    pub n_u: usize,
    pub n_v: usize,
    pub error_estimate: ErrorEstimate,
}

/// Assemble class lengths for a metric: closed forms where the profile
/// admits them, graph searches otherwise (always for grid inputs). `n_u`,
/// `n_v` set the graph resolution used when a profile has to be resampled.
pub fn systole_report(
    metric: &Metric,
    n_u: usize,
    n_v: usize,
    classes: &[HomotopyClass],
) -> Result<SystoleReport> {
    let mut report = SystoleReport {
        l_sigma: None,
        l_v: None,
        l_h: None,
        big_l_sigma: None,
        volume: 0.0,
        n_u,
        n_v,
        error_estimate: ErrorEstimate::default(),
    };
    let mut resampled: Option<GridMetric> = None;
    for &class in classes {
        let (value, estimate) = match metric {
            Metric::Profile(p) => match length_closed_form(class, p) {
                Ok(v) => (v, None),
                Err(Error::NoClosedForm(_)) => {
                    if resampled.is_none() {
                        resampled = Some(p.to_conformal_grid(n_u, n_v)?);
                    }
                    let (v, e) = length_graph(class, resampled.as_ref().unwrap())?;
                    (v, Some(e))
                }
                Err(e) => return Err(e),
            },
            Metric::Grid(g) => {
                let (v, e) = length_graph(class, g)?;
                (v, Some(e))
            }
        };
        match class {
            HomotopyClass::Sigma => {
                report.l_sigma = Some(value);
                report.error_estimate.l_sigma = estimate;
            }
            HomotopyClass::Vertical => {
                report.l_v = Some(value);
                report.error_estimate.l_v = estimate;
            }
            HomotopyClass::Horizontal => {
                report.l_h = Some(value);
                report.error_estimate.l_h = estimate;
            }
        }
    }
    if let (Some(s), Some(h)) = (report.l_sigma, report.l_h) {
        report.big_l_sigma = Some(s.min(h));
    }
    report.volume = match metric {
        Metric::Profile(p) => p.volume(),
        Metric::Grid(g) => g.volume(),
    };
    match metric {
        Metric::Grid(g) => {
            report.n_u = g.n_u();
            report.n_v = g.n_v();
        }
        Metric::Profile(_) => {}
    }
    Ok(report)
}

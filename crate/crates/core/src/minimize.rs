//! Budget-constrained minimization through cutting-plane LP relaxations.
//!
//! The relaxation is `min_x max_k (b_k + ⟨a_k, x⟩)` over `x ∈ [0,1]^p` with
//! `Σ x_i <= C`, where the `(b_k, a_k)` are planes of convex extensions. The
//! master LP is kept in its Lagrangian dual form
//!
//! ```text
//! min  -Σ_k λ_k b_k + Σ_i u_i + μC
//! s.t. Σ_k λ_k = 1
//!      Σ_k a_ki λ_k + u_i + μ >= 0      for every i
//!      λ, u, μ >= 0
//! ```
//!
//! so a new plane is a new column and the basis never grows past `p + 1`.
//! The relaxed point `x` is read off the duals of the `p` inequality rows
//! and the bound is minus the objective.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize, Serializer};

use crate::coverage::CoverageInstance;
use crate::error::{capability, Error, Result};
use crate::extensions::{
    all_planes, closure_lp, ClosureTarget, CubePoint, CuttingPlane, ExtensionKind, GammaScale, PlaneBuilder, Tables,
    CLOSURE_MAX_P,
};
use crate::flowsep::{margin_separation_bruteforce, margin_separation_coverage_with, SeparationResult};
use crate::lpsolve::{solve_lp, LinearProgram, LpStatus, Relation, Simplex};
use crate::setfn::{
    increasing_shift, nonnegative_lift, random_supermodular, singleton_modular, SetFunctionOracle, Subset,
    SupermodularFamily, ENUM_MAX_P,
};

/// A plane counts as violated when it beats the current epigraph value by more than this.
pub const STOP_TOL: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 500;

/// Accumulated cutting planes, at most one per `(kind, generator)`.
#[derive(Clone, Debug, Default)]
pub struct PlaneSet {
    planes: Vec<CuttingPlane>,
    registry: HashMap<(ExtensionKind, Subset), usize>,
}

impl PlaneSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.planes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planes.is_empty()
    }

    pub fn planes(&self) -> &[CuttingPlane] {
        &self.planes
    }

    pub fn contains(&self, kind: ExtensionKind, generator: &Subset) -> bool {
        self.registry.contains_key(&(kind, generator.clone()))
    }

    /// Position of the plane with this kind and generator.
    pub fn index_of(&self, kind: ExtensionKind, generator: &Subset) -> Option<usize> {
        self.registry.get(&(kind, generator.clone())).copied()
    }

    /// Returns `false` (and drops the plane) for a duplicate.
    pub fn insert(&mut self, plane: CuttingPlane) -> bool {
        let key = (plane.kind, plane.generator.clone());
        if self.registry.contains_key(&key) {
            return false;
        }
        self.registry.insert(key, self.planes.len());
        self.planes.push(plane);
        true
    }

    pub fn generators(&self, kind: ExtensionKind) -> impl Iterator<Item = &Subset> + '_ {
        self.planes.iter().filter(move |p| p.kind == kind).map(|p| &p.generator)
    }

    /// `max_k (b_k + ⟨a_k, x⟩)`; `-∞` when empty.
    pub fn max_value(&self, x: &[f64]) -> f64 {
        self.planes.iter().map(|p| p.value(x)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// When joint-kind planes are generated during the loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JPlacement {
    /// At every set found by margin separation.
    EveryStep,
    /// Only once margin separation has converged, at all sets found so far.
    AtConvergence,
}

#[derive(Clone, Debug)]
pub struct CuttingPlaneOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub j_placement: JPlacement,
}

impl Default for CuttingPlaneOptions {
    fn default() -> Self {
        CuttingPlaneOptions {
            tol: STOP_TOL,
            max_iterations: MAX_ITERATIONS,
            j_placement: JPlacement::EveryStep,
        }
    }
}

fn serialize_subset<S: Serializer>(s: &Subset, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(s.iter())
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub budget: usize,
    pub lp_bound: f64,
    #[serde(serialize_with = "serialize_subset")]
    pub rounded_set: Subset,
    pub rounded_value: f64,
    pub greedy_value: Option<f64>,
    pub offline_bound: Option<f64>,
    pub iterations: usize,
    pub separation_calls: usize,
    pub converged: bool,
    pub planes: usize,
    pub solution: Vec<f64>,
    pub seconds: f64,
}

impl BoundReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Source of violated planes at a relaxed point.
pub trait Separator {
    /// Most violated margin plane: maximizer of `γh(A) - |A| + Σ_{i∈A} x_i`.
    fn separate(&mut self, x: &CubePoint, gamma: GammaScale) -> Result<SeparationResult>;

    /// A generator maximizing a `J1`/`J2` plane at `x`, if this separator
    /// can find one. The default cannot.
    fn joint_generator(&mut self, _kind: ExtensionKind, _x: &CubePoint) -> Result<Option<Subset>> {
        Ok(None)
    }
}

/// Enumerates all subsets of the shifted function (p <= 20).
pub struct BruteForceSeparator {
    h: SetFunctionOracle,
}

impl BruteForceSeparator {
    pub fn new(g: &SetFunctionOracle) -> Result<Self> {
        capability("brute-force separation", g.p(), ENUM_MAX_P)?;
        Ok(BruteForceSeparator {
            h: increasing_shift(g).0,
        })
    }
}

impl Separator for BruteForceSeparator {
    fn separate(&mut self, x: &CubePoint, gamma: GammaScale) -> Result<SeparationResult> {
        margin_separation_bruteforce(&self.h, x, gamma)
    }
}

/// Min-cut separation for negative-coverage objectives.
pub struct CoverageSeparator {
    inst: Arc<CoverageInstance>,
    prune: bool,
}

impl CoverageSeparator {
    pub fn new(inst: Arc<CoverageInstance>) -> Self {
        CoverageSeparator { inst, prune: true }
    }

    pub fn without_pruning(inst: Arc<CoverageInstance>) -> Self {
        CoverageSeparator { inst, prune: false }
    }
}

impl Separator for CoverageSeparator {
    fn separate(&mut self, x: &CubePoint, gamma: GammaScale) -> Result<SeparationResult> {
        Ok(margin_separation_coverage_with(&self.inst, x, gamma, self.prune))
    }
}

/// Exact separation for every plane kind by enumeration (p <= 20); lets
/// the loop reach the full pointwise-max extension.
pub struct ExhaustiveSeparator {
    tables: Tables,
    gamma: GammaScale,
}

impl ExhaustiveSeparator {
    pub fn new(g: &SetFunctionOracle) -> Result<Self> {
        let tables = Tables::new(g)?;
        let gamma = tables.optimal_gamma()?;
        Ok(ExhaustiveSeparator { tables, gamma })
    }
}

impl Separator for ExhaustiveSeparator {
    fn separate(&mut self, x: &CubePoint, gamma: GammaScale) -> Result<SeparationResult> {
        let (a, _) = self.tables.argmax(ExtensionKind::MGamma, x.coords(), gamma.value());
        let gm = gamma.value();
        let xs = x.coords();
        let plane_value = gm * self.tables.h[a]
            + (0..self.tables.p).filter(|i| a >> i & 1 == 1).map(|i| xs[i] - 1.0).sum::<f64>();
        Ok(SeparationResult {
            best_set: Subset::from_mask(crate::setfn::GroundSet::new(self.tables.p)?, a as u64),
            plane_value,
            violated: false,
        })
    }

    fn joint_generator(&mut self, kind: ExtensionKind, x: &CubePoint) -> Result<Option<Subset>> {
        let (a, _) = self.tables.argmax(kind, x.coords(), self.gamma.value());
        Ok(Some(Subset::from_mask(crate::setfn::GroundSet::new(self.tables.p)?, a as u64)))
    }
}

/// The master LP in column form. Row `i` has `shift_i` times the
/// convexity row subtracted, which leaves the feasible set and the row
/// duals `x` unchanged but makes margin-plane columns sparse.
/// Planes whose multiplier stayed at zero this many rounds in a row are
/// parked: kept in the LP but left out of pricing until found again.
/// Only masters with more than `PARK_ABOVE · (p + 1)` columns park.
const PARK_AFTER: usize = 10;
const PARK_ABOVE: usize = 4;

struct Master {
    simplex: Simplex,
    p: usize,
    mu: usize,
    shift: Vec<f64>,
    idle: Vec<usize>,
    parked: Vec<bool>,
}

impl Master {
    fn new(p: usize, planes: &[CuttingPlane], budget: Option<f64>, shift: Vec<f64>) -> Result<Self> {
        if planes.is_empty() {
            return Err(Error::Usage("the master LP needs at least one plane".into()));
        }
        let mu = budget.is_some() as usize;
        let mut objective = vec![1.0; p];
        if let Some(c) = budget {
            objective.push(c);
        }
        objective.extend(planes.iter().map(|pl| -pl.offset));
        let ncols = objective.len();
        let mut lp = LinearProgram::new(objective);
        let mut simplex_row = vec![0.0; ncols];
        simplex_row[p + mu..].iter_mut().for_each(|v| *v = 1.0);
        lp.add_row(simplex_row, Relation::Eq, 1.0);
        for i in 0..p {
            let mut row = vec![0.0; ncols];
            row[i] = 1.0;
            if mu == 1 {
                row[p] = 1.0;
            }
            for (k, pl) in planes.iter().enumerate() {
                row[p + mu + k] = pl.coeffs[i] - shift[i];
            }
            lp.add_row(row, Relation::Ge, -shift[i]);
        }
        let mut simplex = Simplex::new(&lp)?;
        expect_optimal(simplex.solve()?)?;
        let k = planes.len();
        let mut master = Master { simplex, p, mu, shift, idle: vec![0; k], parked: vec![false; k] };
        if master.parking() {
            master.idle.fill(PARK_AFTER - 1);
            master.park_idle();
        }
        Ok(master)
    }

    fn add(&mut self, plane: &CuttingPlane) -> Result<()> {
        let mut col = Vec::with_capacity(self.p + 1);
        col.push(1.0);
        col.extend(plane.coeffs.iter().zip(&self.shift).map(|(a, s)| a - s));
        self.idle.push(0);
        self.parked.push(false);
        expect_optimal(self.simplex.add_column(-plane.offset, &col, 0.0, f64::INFINITY)?)
    }

    /// Brings back plane `k` if it was parked; `false` if it was active.
    fn unpark(&mut self, k: usize) -> Result<bool> {
        if !self.parked[k] {
            return Ok(false);
        }
        self.parked[k] = false;
        self.idle[k] = 0;
        expect_optimal(self.simplex.unpark_column(self.p + self.mu + k, f64::INFINITY)?)?;
        Ok(true)
    }

    fn parking(&self) -> bool {
        self.idle.len() > PARK_ABOVE * (self.p + 1)
    }

    fn park_idle(&mut self) {
        if !self.parking() {
            return;
        }
        for k in 0..self.idle.len() {
            if self.parked[k] {
                continue;
            }
            let j = self.p + self.mu + k;
            if self.simplex.is_basic(j) {
                self.idle[k] = 0;
                continue;
            }
            self.idle[k] += 1;
            if self.idle[k] >= PARK_AFTER && self.simplex.park_column(j) {
                self.parked[k] = true;
            }
        }
    }

    /// Largest value at `x` among the planes still in play.
    fn active_max(&self, planes: &PlaneSet, x: &[f64]) -> f64 {
        planes
            .planes()
            .iter()
            .zip(&self.parked)
            .filter(|(_, &parked)| !parked)
            .map(|(pl, _)| pl.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Relaxed minimizer and the LP bound.
    fn point(&self) -> (Vec<f64>, f64) {
        let y = self.simplex.row_duals();
        let x = y[1..=self.p].iter().map(|v| v.clamp(0.0, 1.0)).collect();
        (x, -self.simplex.objective())
    }
}

fn expect_optimal(status: LpStatus) -> Result<()> {
    match status {
        LpStatus::Optimal => Ok(()),
        st => Err(Error::Solver(format!("master LP returned {st:?}"))),
    }
}

fn check_kinds(kinds: &[ExtensionKind]) -> Result<Vec<ExtensionKind>> {
    let mut joint = Vec::new();
    for &k in kinds {
        match k {
            ExtensionKind::MGamma => {}
            ExtensionKind::J1 | ExtensionKind::J2 => {
                if !joint.contains(&k) {
                    joint.push(k);
                }
            }
            other => {
                return Err(Error::Usage(format!(
                    "cutting planes are generated for M_GAMMA, J1 and J2 only, got {other}"
                )))
            }
        }
    }
    joint.sort();
    Ok(joint)
}

/// Runs the cutting-plane loop at budget `budget` (`None`: no budget row).
pub fn cutting_plane_minimize(
    g: &SetFunctionOracle,
    budget: Option<usize>,
    kinds: &[ExtensionKind],
    sep: &mut dyn Separator,
    init: PlaneSet,
    opts: &CuttingPlaneOptions,
) -> Result<(BoundReport, PlaneSet)> {
    let start = Instant::now();
    let joint = check_kinds(kinds)?;
    let p = g.p();
    let mut builder = PlaneBuilder::new(g, None)?;
    let gamma = builder.gamma();
    let m = builder.modular().clone();
    let mut planes = init;
    if planes.is_empty() {
        planes.insert(builder.plane(ExtensionKind::MGamma, &g.ground().empty())?);
    }
    let mut master = Master::new(p, planes.planes(), budget.map(|c| c as f64), m.weights.clone())?;
    let mut iterations = 0;
    let mut separation_calls = 0;
    let mut converged = false;
    let mut pending_joint: Vec<Subset> = Vec::new();
    loop {
        iterations += 1;
        master.park_idle();
        let (x, _) = master.point();
        let t = master.active_max(&planes, &x);
        let xp = CubePoint::new(x.clone())?;
        let mut fresh: Vec<CuttingPlane> = Vec::new();

        separation_calls += 1;
        let found = sep.separate(&xp, gamma)?;
        if found.extension_value(m.dot(&x), gamma) > t + opts.tol {
            fresh.push(builder.plane(ExtensionKind::MGamma, &found.best_set)?);
            match opts.j_placement {
                JPlacement::EveryStep => {
                    for &k in &joint {
                        fresh.push(builder.plane(k, &found.best_set)?);
                    }
                }
                JPlacement::AtConvergence => pending_joint.push(found.best_set.clone()),
            }
        }
        for &k in &joint {
            if let Some(a) = sep.joint_generator(k, &xp)? {
                separation_calls += 1;
                let pl = builder.plane(k, &a)?;
                if pl.value(&x) > t + opts.tol {
                    fresh.push(pl);
                }
            }
        }
        if fresh.is_empty() && !pending_joint.is_empty() {
            for a in pending_joint.drain(..) {
                for &k in &joint {
                    fresh.push(builder.plane(k, &a)?);
                }
            }
        }

        let mut added = 0;
        for pl in fresh {
            match planes.index_of(pl.kind, &pl.generator) {
                Some(k) => added += master.unpark(k)? as usize,
                None => {
                    master.add(&pl)?;
                    planes.insert(pl);
                    added += 1;
                }
            }
        }
        if added == 0 {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
    }
    if !converged {
        log::warn!("cutting-plane loop stopped at the iteration cap ({iterations}) without converging");
    }
    let (x, lp_bound) = master.point();
    let c = budget.unwrap_or(p).min(p);
    let rounded_set = round_top_c(&CubePoint::new(x.clone())?, c);
    let rounded_value = g.evaluate(&rounded_set)?;
    let report = BoundReport {
        budget: c,
        lp_bound,
        rounded_set,
        rounded_value,
        greedy_value: None,
        offline_bound: None,
        iterations,
        separation_calls,
        converged,
        planes: planes.len(),
        solution: x,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((report, planes))
}

/// Minimum over the cube (optionally with `Σx <= C`) of the pointwise
/// maximum of every generator plane of the given kinds; the closure LP when
/// `CLOSURE` is among them.
pub fn exact_extension_min(kinds: &[ExtensionKind], g: &SetFunctionOracle, budget: Option<usize>) -> Result<f64> {
    capability("exact extension minimization", g.p(), CLOSURE_MAX_P)?;
    if kinds.is_empty() {
        return Err(Error::Usage("no extension kinds given".into()));
    }
    if kinds.contains(&ExtensionKind::Closure) {
        let lp = closure_lp(&g.table()?, g.p(), ClosureTarget::Minimize(budget.map(|c| c as f64)));
        let sol = solve_lp(&lp)?;
        expect_optimal(sol.status)?;
        return Ok(sol.objective_value);
    }
    let mut planes = Vec::new();
    for &k in kinds {
        planes.extend(all_planes(k, g, None)?);
    }
    let master = Master::new(g.p(), &planes, budget.map(|c| c as f64), singleton_modular(g).weights)?;
    Ok(master.point().1)
}

/// The `c` indices with the largest coordinates, ties to the lower index.
pub fn round_top_c(x: &CubePoint, c: usize) -> Subset {
    let xs = x.coords();
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[b].total_cmp(&xs[a]).then(a.cmp(&b)));
    let ground = crate::setfn::GroundSet::new(xs.len()).expect("non-empty point");
    let mut s = Subset::empty(ground);
    for &i in idx.iter().take(c) {
        s.insert(i);
    }
    s
}

/// Runs the loop over ascending budgets. With `warm`, each budget starts
/// from the planes of the previous one.
pub fn budget_sweep(
    g: &SetFunctionOracle,
    budgets: &[usize],
    kinds: &[ExtensionKind],
    sep: &mut dyn Separator,
    warm: bool,
    opts: &CuttingPlaneOptions,
) -> Result<Vec<BoundReport>> {
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage("budgets must be strictly increasing".into()));
    }
    let mut planes = PlaneSet::new();
    let mut out = Vec::with_capacity(budgets.len());
    for &c in budgets {
        let init = if warm { std::mem::take(&mut planes) } else { PlaneSet::new() };
        let (report, next) = cutting_plane_minimize(g, Some(c), kinds, sep, init, opts)?;
        log::info!(
            "budget {c}: bound {:.6} after {} iterations ({} planes, {:.2}s)",
            report.lp_bound,
            report.iterations,
            report.planes,
            report.seconds
        );
        planes = next;
        out.push(report);
    }
    Ok(out)
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct HeapItem(usize, Reverse<usize>);

/// Greedy selection order for up to `c` items (lazy marginal gains).
/// Every prefix is the greedy solution for the smaller budget.
pub fn greedy_order(inst: &CoverageInstance, c: usize) -> Vec<usize> {
    let n = inst.n();
    let c = c.min(n);
    let mut heap: BinaryHeap<HeapItem> = (0..n).map(|i| HeapItem(inst.singleton_coverage(i), Reverse(i))).collect();
    let mut covered = vec![0u64; n.div_ceil(64)];
    let mut order = Vec::with_capacity(c);
    while order.len() < c {
        let HeapItem(_, Reverse(i)) = heap.pop().expect("fewer picks than items");
        let gain = inst.gain(&covered, i);
        let current = HeapItem(gain, Reverse(i));
        if heap.peek().is_none_or(|top| current.cmp(top) != Ordering::Less) {
            inst.absorb(&mut covered, i);
            order.push(i);
        } else {
            heap.push(current);
        }
    }
    order
}

/// Greedy coverage maximization; returns the set and `g = -coverage`.
pub fn greedy_max_coverage(inst: &CoverageInstance, c: usize) -> (Subset, f64) {
    let mut s = inst.ground().empty();
    for i in greedy_order(inst, c) {
        s.insert(i);
    }
    let v = -(inst.coverage(&s) as f64);
    (s, v)
}

/// Greedy with every marginal gain recomputed at every step.
pub fn greedy_max_coverage_eager(inst: &CoverageInstance, c: usize) -> (Subset, f64) {
    let n = inst.n();
    let mut s = inst.ground().empty();
    let mut covered = vec![0u64; n.div_ceil(64)];
    for _ in 0..c.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in (0..n).filter(|&i| !s.contains(i)) {
            let gain = inst.gain(&covered, i);
            if best.is_none_or(|(_, bg)| gain > bg) {
                best = Some((i, gain));
            }
        }
        let (i, _) = best.expect("an unselected item remains");
        inst.absorb(&mut covered, i);
        s.insert(i);
    }
    let v = -(inst.coverage(&s) as f64);
    (s, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OfflineMode {
    Greedy,
    Lp,
}

pub const GREEDY_FACTOR: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// Upper bound on the optimal coverage: `greedy / (1 - 1/e)` from a greedy
/// coverage, or `-lp_bound` from an LP bound.
pub fn offline_bound(value: f64, mode: OfflineMode) -> f64 {
    match mode {
        OfflineMode::Greedy => value / GREEDY_FACTOR,
        OfflineMode::Lp => -value,
    }
}

/// Exact minimizer over `|A| <= c` by enumeration (lowest bitmask on ties).
pub fn brute_min(g: &SetFunctionOracle, c: usize) -> Result<(Subset, f64)> {
    capability("brute-force minimization", g.p(), ENUM_MAX_P)?;
    let t = g.table()?;
    let mut best = (0usize, 0.0);
    for (a, &v) in t.iter().enumerate().skip(1) {
        if (a as u64).count_ones() as usize <= c && v < best.1 {
            best = (a, v);
        }
    }
    Ok((Subset::from_mask(g.ground(), best.0 as u64), best.1))
}

/// Fraction of seeds on which each kind's relaxation attains the discrete
/// minimum. When either kind is `S_PLUS`, both are evaluated on the
/// non-negative lift of each sampled function.
pub fn integrality_frequency(
    kind_a: ExtensionKind,
    kind_b: ExtensionKind,
    family: SupermodularFamily,
    p: usize,
    seeds: &[u64],
) -> Result<(f64, f64)> {
    capability("integrality frequency", p, 8)?;
    if seeds.is_empty() {
        return Err(Error::Usage("no seeds given".into()));
    }
    let lift = kind_a == ExtensionKind::SPlus || kind_b == ExtensionKind::SPlus;
    let (mut hits_a, mut hits_b) = (0usize, 0usize);
    for &seed in seeds {
        let mut g = random_supermodular(p, seed, family)?;
        if lift {
            g = nonnegative_lift(&g).to_table_oracle()?;
        }
        let (_, min) = brute_min(&g, p)?;
        if exact_extension_min(&[kind_a], &g, None)? >= min - 1e-7 {
            hits_a += 1;
        }
        if exact_extension_min(&[kind_b], &g, None)? >= min - 1e-7 {
            hits_b += 1;
        }
    }
    let n = seeds.len() as f64;
    Ok((hits_a as f64 / n, hits_b as f64 / n))
}

/// Which relaxations an experiment runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindsMode {
    Margin,
    Joint,
    Both,
}

impl KindsMode {
    fn margin(self) -> bool {
        matches!(self, KindsMode::Margin | KindsMode::Both)
    }

    fn joint(self) -> bool {
        matches!(self, KindsMode::Joint | KindsMode::Both)
    }
}

pub const JOINT_KINDS: [ExtensionKind; 3] = [ExtensionKind::MGamma, ExtensionKind::J1, ExtensionKind::J2];

/// One line of the budget sweep table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub budget: usize,
    pub lp_bound_margin: Option<f64>,
    pub lp_bound_joint: Option<f64>,
    pub greedy_value: f64,
    pub rounded_value_margin: Option<f64>,
    pub rounded_value_joint: Option<f64>,
    /// Greedy-based lower bound on the minimum, `-greedy coverage / (1 - 1/e)`.
    pub offline_bound: f64,
    pub iters_margin: Option<usize>,
    pub iters_joint: Option<usize>,
    pub sep_calls_margin: Option<usize>,
    pub sep_calls_joint: Option<usize>,
}

pub const RESULTS_HEADER: [&str; 11] = [
    "budget",
    "lp_bound_margin",
    "lp_bound_joint",
    "greedy_value",
    "rounded_value_margin",
    "rounded_value_joint",
    "offline_bound",
    "iters_margin",
    "iters_joint",
    "sep_calls_margin",
    "sep_calls_joint",
];

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentResult {
    pub epsilon: f64,
    pub gamma: f64,
    pub rows: Vec<SweepRow>,
    pub margin: Vec<BoundReport>,
    pub joint: Vec<BoundReport>,
}

/// Warm-started sweeps (margin-only and/or margin+J1+J2) plus greedy for a
/// coverage instance.
pub fn coverage_experiment(
    inst: &Arc<CoverageInstance>,
    g: &SetFunctionOracle,
    budgets: &[usize],
    mode: KindsMode,
    opts: &CuttingPlaneOptions,
) -> Result<ExperimentResult> {
    if budgets.iter().any(|&c| c > inst.n()) {
        return Err(Error::Usage(format!("budgets must not exceed n = {}", inst.n())));
    }
    let gamma = PlaneBuilder::new(g, None)?.gamma().value();
    let mut margin = Vec::new();
    let mut joint = Vec::new();
    if mode.margin() {
        let mut sep = CoverageSeparator::new(inst.clone());
        margin = budget_sweep(g, budgets, &[ExtensionKind::MGamma], &mut sep, true, opts)?;
    }
    if mode.joint() {
        let mut sep = CoverageSeparator::new(inst.clone());
        joint = budget_sweep(g, budgets, &JOINT_KINDS, &mut sep, true, opts)?;
    }
    let order = greedy_order(inst, budgets.iter().copied().max().unwrap_or(0));
    let mut rows = Vec::with_capacity(budgets.len());
    for (b, &c) in budgets.iter().enumerate() {
        let mut s = inst.ground().empty();
        order.iter().take(c).for_each(|&i| s.insert(i));
        let cov = inst.coverage(&s) as f64;
        let greedy_value = -cov;
        let offline = -offline_bound(cov, OfflineMode::Greedy);
        for r in margin.iter_mut().chain(joint.iter_mut()).filter(|r| r.budget == c) {
            r.greedy_value = Some(greedy_value);
            r.offline_bound = Some(offline);
        }
        let mr = margin.get(b);
        let jr = joint.get(b);
        rows.push(SweepRow {
            budget: c,
            lp_bound_margin: mr.map(|r| r.lp_bound),
            lp_bound_joint: jr.map(|r| r.lp_bound),
            greedy_value,
            rounded_value_margin: mr.map(|r| r.rounded_value),
            rounded_value_joint: jr.map(|r| r.rounded_value),
            offline_bound: offline,
            iters_margin: mr.map(|r| r.iterations),
            iters_joint: jr.map(|r| r.iterations),
            sep_calls_margin: mr.map(|r| r.separation_calls),
            sep_calls_joint: jr.map(|r| r.separation_calls),
        });
    }
    Ok(ExperimentResult {
        epsilon: inst.epsilon(),
        gamma,
        rows,
        margin,
        joint,
    })
}

/// Writes the sweep table as CSV with the fixed header; absent runs are empty fields.
pub fn write_results_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    fn opt<T: ToString>(v: Option<T>) -> String {
        v.map(|v| v.to_string()).unwrap_or_default()
    }
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(RESULTS_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.budget.to_string(),
            opt(r.lp_bound_margin),
            opt(r.lp_bound_joint),
            r.greedy_value.to_string(),
            opt(r.rounded_value_margin),
            opt(r.rounded_value_joint),
            r.offline_bound.to_string(),
            opt(r.iters_margin),
            opt(r.iters_joint),
            opt(r.sep_calls_margin),
            opt(r.sep_calls_joint),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{build_coverage_objective, DataPoints};
    use crate::setfn::GroundSet;

    fn line() -> (Arc<CoverageInstance>, SetFunctionOracle) {
        build_coverage_objective(DataPoints::new(3, 1, vec![0.0, 1.0, 10.0]).unwrap(), 1.5).unwrap()
    }

    /// `min t` over `x ∈ [0,1]^p`, `t` free, one row `t - ⟨a,x⟩ >= b` per plane.
    fn row_form_min(planes: &[CuttingPlane], p: usize, budget: Option<usize>) -> f64 {
        let mut obj = vec![0.0; p];
        obj.push(1.0);
        let mut lp = LinearProgram::new(obj);
        for i in 0..p {
            lp.set_bounds(i, 0.0, 1.0);
        }
        lp.set_bounds(p, f64::NEG_INFINITY, f64::INFINITY);
        for pl in planes {
            let mut row: Vec<f64> = pl.coeffs.iter().map(|a| -a).collect();
            row.push(1.0);
            lp.add_row(row, Relation::Ge, pl.offset);
        }
        if let Some(c) = budget {
            let mut row = vec![1.0; p];
            row.push(0.0);
            lp.add_row(row, Relation::Le, c as f64);
        }
        solve_lp(&lp).unwrap().objective_value
    }

    #[test]
    fn column_form_matches_row_form() {
        for seed in 0..15 {
            let g = random_supermodular(4, seed, SupermodularFamily::RandomTable).unwrap();
            for kind in [ExtensionKind::S, ExtensionKind::MGamma, ExtensionKind::J1, ExtensionKind::J2] {
                let planes = all_planes(kind, &g, None).unwrap();
                for budget in [None, Some(1), Some(2)] {
                    let a = exact_extension_min(&[kind], &g, budget).unwrap();
                    let b = row_form_min(&planes, 4, budget);
                    assert!((a - b).abs() < 1e-7, "seed {seed} {kind} {budget:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn line_instance_budget_one() {
        let (inst, g) = line();
        let mut sep = CoverageSeparator::new(inst);
        let (r, _) = cutting_plane_minimize(&g, Some(1), &[ExtensionKind::MGamma], &mut sep, PlaneSet::new(), &Default::default()).unwrap();
        assert!(r.lp_bound <= -2.0 + 1e-9);
        assert_eq!(r.rounded_value, -2.0);
        assert!(r.converged);
    }

    #[test]
    fn line_sweep_rounded_values() {
        let (inst, g) = line();
        let mut sep = CoverageSeparator::new(inst);
        let reports = budget_sweep(&g, &[1, 2, 3], &JOINT_KINDS, &mut sep, true, &Default::default()).unwrap();
        let vals: Vec<f64> = reports.iter().map(|r| r.rounded_value).collect();
        assert_eq!(vals, vec![-2.0, -3.0, -3.0]);
        assert!(budget_sweep(&g, &[2, 2], &JOINT_KINDS, &mut sep, true, &Default::default()).is_err());
    }

    #[test]
    fn unbudgeted_loop_reaches_all_plane_minimum() {
        for seed in 0..10 {
            let g = random_supermodular(5, seed, SupermodularFamily::RandomTable).unwrap();
            let mut sep = ExhaustiveSeparator::new(&g).unwrap();
            let (r, _) = cutting_plane_minimize(&g, None, &JOINT_KINDS, &mut sep, PlaneSet::new(), &Default::default()).unwrap();
            let exact = exact_extension_min(&JOINT_KINDS, &g, None).unwrap();
            assert!(r.converged);
            assert!((r.lp_bound - exact).abs() < 1e-6, "seed {seed}: {} vs {exact}", r.lp_bound);
        }
    }

    #[test]
    fn parked_planes_do_not_change_the_converged_bound() {
        for seed in 0..10 {
            let g = random_supermodular(4, seed, SupermodularFamily::RandomTable).unwrap();
            for budget in [None, Some(2)] {
                let exact = exact_extension_min(&JOINT_KINDS, &g, budget).unwrap();
                let mut sep = ExhaustiveSeparator::new(&g).unwrap();
                let opts = CuttingPlaneOptions::default();
                let (r, _) = cutting_plane_minimize(&g, budget, &JOINT_KINDS, &mut sep, PlaneSet::new(), &opts).unwrap();
                assert!(r.converged);
                assert!((r.lp_bound - exact).abs() < 1e-6, "seed {seed}: {} vs {exact}", r.lp_bound);

                // every plane up front: far above the parking threshold
                let mut all = PlaneSet::new();
                for k in JOINT_KINDS {
                    for pl in all_planes(k, &g, None).unwrap() {
                        all.insert(pl);
                    }
                }
                let (w, _) = cutting_plane_minimize(&g, budget, &JOINT_KINDS, &mut sep, all, &opts).unwrap();
                assert!(w.converged);
                assert!((w.lp_bound - exact).abs() < 1e-6, "seed {seed}: {} vs {exact}", w.lp_bound);
            }
        }
    }

    #[test]
    fn joint_bound_dominates_margin_bound() {
        for seed in 0..10 {
            let g = random_supermodular(6, seed, SupermodularFamily::CoverageLike).unwrap();
            let opts = CuttingPlaneOptions::default();
            let mut sep = BruteForceSeparator::new(&g).unwrap();
            let (m, _) = cutting_plane_minimize(&g, Some(3), &[ExtensionKind::MGamma], &mut sep, PlaneSet::new(), &opts).unwrap();
            let (j, _) = cutting_plane_minimize(&g, Some(3), &JOINT_KINDS, &mut sep, PlaneSet::new(), &opts).unwrap();
            assert!(j.lp_bound >= m.lp_bound - 1e-9);
        }
    }

    #[test]
    fn j_placement_at_convergence_gives_same_bound() {
        for seed in 0..5 {
            let g = random_supermodular(5, seed, SupermodularFamily::RandomTable).unwrap();
            let mut sep = BruteForceSeparator::new(&g).unwrap();
            let every = CuttingPlaneOptions::default();
            let late = CuttingPlaneOptions {
                j_placement: JPlacement::AtConvergence,
                ..Default::default()
            };
            let (a, _) = cutting_plane_minimize(&g, Some(2), &JOINT_KINDS, &mut sep, PlaneSet::new(), &every).unwrap();
            let (b, _) = cutting_plane_minimize(&g, Some(2), &JOINT_KINDS, &mut sep, PlaneSet::new(), &late).unwrap();
            let (m, _) = cutting_plane_minimize(&g, Some(2), &[ExtensionKind::MGamma], &mut sep, PlaneSet::new(), &every).unwrap();
            assert!(a.lp_bound >= m.lp_bound - 1e-9 && b.lp_bound >= m.lp_bound - 1e-9);
        }
    }

    #[test]
    fn rejects_unsupported_kinds() {
        let (inst, g) = line();
        let mut sep = CoverageSeparator::new(inst);
        let err = cutting_plane_minimize(&g, Some(1), &[ExtensionKind::S], &mut sep, PlaneSet::new(), &Default::default());
        assert!(matches!(err, Err(Error::Usage(_))));
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let g = random_supermodular(6, 1, SupermodularFamily::RandomTable).unwrap();
        let mut sep = BruteForceSeparator::new(&g).unwrap();
        let opts = CuttingPlaneOptions {
            max_iterations: 1,
            ..Default::default()
        };
        let (r, _) = cutting_plane_minimize(&g, Some(3), &JOINT_KINDS, &mut sep, PlaneSet::new(), &opts).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(!r.converged);
    }

    #[test]
    fn closure_examples() {
        let fig2 = SetFunctionOracle::from_table(GroundSet::new(2).unwrap(), vec![0.0, 0.5, 1.5, 4.0]).unwrap();
        assert!(exact_extension_min(&[ExtensionKind::MGamma], &fig2, None).unwrap() <= 1e-12);
        for seed in 0..10 {
            let g = random_supermodular(4, seed, SupermodularFamily::RandomTable).unwrap();
            let c = exact_extension_min(&[ExtensionKind::Closure], &g, None).unwrap();
            assert!((c - brute_min(&g, 4).unwrap().1).abs() < 1e-7);
            let j1 = exact_extension_min(&[ExtensionKind::J1], &g, None).unwrap();
            let mg = exact_extension_min(&[ExtensionKind::MGamma], &g, None).unwrap();
            assert!(j1 >= mg - 1e-9);
        }
        let big = random_supermodular(13, 0, SupermodularFamily::ConvexOfCardinality).unwrap();
        assert!(matches!(exact_extension_min(&[ExtensionKind::J1], &big, None), Err(Error::Capability { .. })));
    }

    #[test]
    fn rounding_examples() {
        let x = CubePoint::new(vec![0.2, 0.9, 0.5]).unwrap();
        assert_eq!(round_top_c(&x, 2).indices(), vec![1, 2]);
        assert!(round_top_c(&x, 0).is_empty());
        let flat = CubePoint::new(vec![0.5; 4]).unwrap();
        assert_eq!(round_top_c(&flat, 2).indices(), vec![0, 1]);
    }

    #[test]
    fn greedy_examples() {
        let (inst, _) = line();
        let (s, v) = greedy_max_coverage(&inst, 1);
        assert_eq!((s.indices(), v), (vec![0], -2.0));
        assert_eq!(greedy_max_coverage(&inst, 3).1, -3.0);
        assert_eq!(greedy_max_coverage_eager(&inst, 2), greedy_max_coverage(&inst, 2));
    }

    #[test]
    fn offline_bound_examples() {
        assert!((offline_bound(252.0, OfflineMode::Greedy) - 398.66).abs() < 0.01);
        assert_eq!(offline_bound(-400.0, OfflineMode::Lp), 400.0);
        assert_eq!(offline_bound(0.0, OfflineMode::Greedy), 0.0);
    }

    #[test]
    fn brute_min_examples() {
        let (_, g) = line();
        assert_eq!(brute_min(&g, 1).unwrap().1, -2.0);
        let (s, v) = brute_min(&g, 0).unwrap();
        assert!(s.is_empty() && v == 0.0);
        let fig3b = SetFunctionOracle::from_table(GroundSet::new(2).unwrap(), vec![0.0, -1.5, -0.5, 4.0]).unwrap();
        let (s, v) = brute_min(&fig3b, 2).unwrap();
        assert_eq!((s.indices(), v), (vec![0], -1.5));
    }

    #[test]
    fn frequency_reflexive_and_closure() {
        let seeds: Vec<u64> = (0..20).collect();
        let (a, b) = integrality_frequency(ExtensionKind::Closure, ExtensionKind::Closure, SupermodularFamily::RandomTable, 3, &seeds).unwrap();
        assert_eq!((a, b), (1.0, 1.0));
        let (a, b) = integrality_frequency(ExtensionKind::MGamma, ExtensionKind::MGamma, SupermodularFamily::RandomTable, 3, &seeds).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn results_csv_header() {
        let (inst, g) = line();
        let res = coverage_experiment(&inst, &g, &[1, 2, 3], KindsMode::Margin, &Default::default()).unwrap();
        let mut buf = Vec::new();
        write_results_csv(&res.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RESULTS_HEADER.join(","));
        assert_eq!(lines.count(), 3);
        assert!(text.lines().nth(1).unwrap().contains(",,"));
    }
}

//! Separation for margin rescaling.
//!
//! Finding the most violated `M_γ` plane at `x` means maximizing
//! `γh(A) - |A| + Σ_{i∈A} x_i`. For small ground sets this is enumerated;
//! for coverage objectives it is a project-selection problem solved by a
//! minimum cut.

use crate::coverage::CoverageInstance;
use crate::error::{capability, Result};
use crate::extensions::{CubePoint, GammaScale};
use crate::setfn::{SetFunctionOracle, Subset, ENUM_MAX_P};

/// Residual capacities at or below this count as saturated.
const FLOW_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: f64,
}

/// A directed network; `f64::INFINITY` capacities are replaced by a finite
/// sentinel (sum of finite capacities plus one) when solved.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<(usize, usize, f64)>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        assert!(source < nodes && sink < nodes && source != sink, "bad terminals");
        FlowNetwork {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[(usize, usize, f64)] {
        &self.arcs
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: f64) {
        assert!(from < self.nodes && to < self.nodes, "arc endpoint out of range");
        assert!(from != to, "self-loop");
        assert!(cap >= 0.0 && !cap.is_nan(), "capacity must be non-negative");
        self.arcs.push((from, to, cap));
    }
}

/// Maximum flow value and the source side of a minimum cut (the nodes
/// reachable from the source in the final residual graph).
pub fn max_flow(net: &FlowNetwork) -> (f64, Vec<bool>) {
    let finite: f64 = net.arcs.iter().filter(|a| a.2.is_finite()).map(|a| a.2).sum();
    let inf = finite + 1.0;
    let mut arcs: Vec<Edge> = Vec::with_capacity(2 * net.arcs.len());
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); net.nodes];
    for &(u, v, c) in &net.arcs {
        out[u].push(arcs.len());
        arcs.push(Edge {
            to: v,
            cap: if c.is_finite() { c } else { inf },
        });
        out[v].push(arcs.len());
        arcs.push(Edge { to: u, cap: 0.0 });
    }
    let mut dinic = Dinic {
        arcs,
        out,
        level: vec![usize::MAX; net.nodes],
        next: vec![0; net.nodes],
        sink: net.sink,
    };
    let mut total = 0.0;
    while dinic.bfs(net.source) {
        dinic.next.iter_mut().for_each(|n| *n = 0);
        loop {
            let pushed = dinic.dfs(net.source, f64::INFINITY);
            if pushed <= FLOW_EPS {
                break;
            }
            total += pushed;
        }
    }
    dinic.bfs(net.source);
    let side = dinic.level.iter().map(|&l| l != usize::MAX).collect();
    (total, side)
}

struct Dinic {
    arcs: Vec<Edge>,
    out: Vec<Vec<usize>>,
    level: Vec<usize>,
    next: Vec<usize>,
    sink: usize,
}

impl Dinic {
    fn bfs(&mut self, s: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = usize::MAX);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.out[u] {
                let v = self.arcs[e].to;
                if self.arcs[e].cap > FLOW_EPS && self.level[v] == usize::MAX {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[self.sink] != usize::MAX
    }

    fn dfs(&mut self, u: usize, limit: f64) -> f64 {
        if u == self.sink {
            return limit;
        }
        while self.next[u] < self.out[u].len() {
            let e = self.out[u][self.next[u]];
            let v = self.arcs[e].to;
            if self.arcs[e].cap > FLOW_EPS && self.level[v] == self.level[u] + 1 {
                let pushed = self.dfs(v, limit.min(self.arcs[e].cap));
                if pushed > FLOW_EPS {
                    self.arcs[e].cap -= pushed;
                    self.arcs[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
            self.next[u] += 1;
        }
        0.0
    }
}

/// Outcome of one margin-separation call.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationResult {
    pub best_set: Subset,
    /// `max_A γh(A) - |A| + Σ_{i∈A} x_i`.
    pub plane_value: f64,
    /// Set by [`SeparationResult::mark_violation`]; `false` until then.
    pub violated: bool,
}

impl SeparationResult {
    /// `M_γ(x) = ⟨m,x⟩ + plane_value / γ`.
    pub fn extension_value(&self, m_dot_x: f64, gamma: GammaScale) -> f64 {
        m_dot_x + self.plane_value / gamma.value()
    }

    /// Flags the plane as violated when it exceeds the current epigraph
    /// value `t` by more than `tol`.
    pub fn mark_violation(&mut self, m_dot_x: f64, gamma: GammaScale, t: f64, tol: f64) -> bool {
        self.violated = self.extension_value(m_dot_x, gamma) > t + tol;
        self.violated
    }
}

/// Enumerates all subsets of the (shifted) function `h`.
pub fn margin_separation_bruteforce(h: &SetFunctionOracle, x: &CubePoint, gamma: GammaScale) -> Result<SeparationResult> {
    capability("brute-force separation", h.p(), ENUM_MAX_P)?;
    if x.dim() != h.p() {
        return Err(crate::Error::GroundMismatch {
            expected: h.p(),
            found: x.dim(),
        });
    }
    let t = h.table()?;
    let x = x.coords();
    let gm = gamma.value();
    let mut slack = vec![0.0; t.len()];
    let mut best = (0usize, 0.0);
    for a in 1..t.len() {
        let low = a.trailing_zeros() as usize;
        slack[a] = slack[a & (a - 1)] + x[low] - 1.0;
        let v = gm * t[a] + slack[a];
        if v > best.1 {
            best = (a, v);
        }
    }
    Ok(SeparationResult {
        best_set: Subset::from_mask(h.ground(), best.0 as u64),
        plane_value: best.1,
        violated: false,
    })
}

/// Plane value `γh(A) - |A| + Σ_{i∈A} x_i` for a coverage objective, where
/// `h(A) = Σ_{i∈A} cov({i}) - cov(A)`.
pub fn coverage_plane_value(inst: &CoverageInstance, a: &Subset, x: &[f64], gamma: GammaScale) -> f64 {
    let gm = gamma.value();
    let items: f64 = a
        .iter()
        .map(|i| gm * inst.singleton_coverage(i) as f64 + x[i] - 1.0)
        .sum();
    items - gm * inst.coverage(a) as f64
}

/// Min-cut separation for `g = -cov`, with items of non-positive profit pruned.
pub fn margin_separation_coverage(inst: &CoverageInstance, x: &CubePoint, gamma: GammaScale) -> SeparationResult {
    margin_separation_coverage_with(inst, x, gamma, true)
}

/// Project selection: item `i` earns `w_i = γ cov({i}) + x_i - 1`, each
/// covered element costs `γ`. With `prune = false` negative-profit items stay
/// in the network behind an item→sink arc.
pub fn margin_separation_coverage_with(
    inst: &CoverageInstance,
    x: &CubePoint,
    gamma: GammaScale,
    prune: bool,
) -> SeparationResult {
    let n = inst.n();
    let x = x.coords();
    assert_eq!(x.len(), n, "point dimension must match the instance");
    let gm = gamma.value();
    let profit: Vec<f64> = (0..n)
        .map(|i| gm * inst.singleton_coverage(i) as f64 + x[i] - 1.0)
        .collect();
    let items: Vec<usize> = (0..n).filter(|&i| !prune || profit[i] > 0.0).collect();

    // nodes: 0 source, 1 sink, then items, then the elements they touch
    let mut elem_node = vec![usize::MAX; n];
    let mut next = 2 + items.len();
    let mut net_arcs = Vec::new();
    for (k, &i) in items.iter().enumerate() {
        let node = 2 + k;
        if profit[i] > 0.0 {
            net_arcs.push((0, node, profit[i]));
        } else if profit[i] < 0.0 {
            net_arcs.push((node, 1, -profit[i]));
        }
        for u in inst.covered_by(i) {
            if elem_node[u] == usize::MAX {
                elem_node[u] = next;
                next += 1;
            }
            net_arcs.push((node, elem_node[u], f64::INFINITY));
        }
    }
    let mut net = FlowNetwork::new(next, 0, 1);
    for (u, v, c) in net_arcs {
        net.add_arc(u, v, c);
    }
    for &node in elem_node.iter().filter(|&&e| e != usize::MAX) {
        net.add_arc(node, 1, gm);
    }
    let (_, side) = max_flow(&net);
    let mut best = inst.ground().empty();
    for (k, &i) in items.iter().enumerate() {
        if side[2 + k] {
            best.insert(i);
        }
    }
    let plane_value = coverage_plane_value(inst, &best, x, gamma);
    SeparationResult {
        best_set: best,
        plane_value,
        violated: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{build_coverage_objective, eps_percentile, gen_gaussian_mixture, DataPoints};
    use crate::extensions::optimal_gamma;
    use crate::setfn::{increasing_shift, GroundSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_min_cut(net: &FlowNetwork) -> f64 {
        let free: Vec<usize> = (0..net.nodes()).filter(|&v| v != net.source() && v != net.sink()).collect();
        let mut best = f64::INFINITY;
        for mask in 0..1u32 << free.len() {
            let mut side = vec![false; net.nodes()];
            side[net.source()] = true;
            for (k, &v) in free.iter().enumerate() {
                side[v] = mask >> k & 1 == 1;
            }
            let cut: f64 = net.arcs().iter().filter(|a| side[a.0] && !side[a.1]).map(|a| a.2).sum();
            best = best.min(cut);
        }
        best
    }

    #[test]
    fn single_arc_and_disconnected() {
        let mut net = FlowNetwork::new(2, 0, 1);
        net.add_arc(0, 1, 3.0);
        assert_eq!(max_flow(&net).0, 3.0);
        let net = FlowNetwork::new(3, 0, 1);
        let (v, side) = max_flow(&net);
        assert_eq!(v, 0.0);
        assert_eq!(side, vec![true, false, false]);
    }

    #[test]
    fn diamond_matches_enumerated_cut() {
        let mut net = FlowNetwork::new(4, 0, 3);
        net.add_arc(0, 1, 2.0);
        net.add_arc(0, 2, 2.0);
        net.add_arc(1, 2, 1.0);
        net.add_arc(1, 3, 1.0);
        net.add_arc(2, 3, 2.0);
        let (v, side) = max_flow(&net);
        assert_eq!(v, brute_min_cut(&net));
        assert_eq!(v, 3.0);
        let cut: f64 = net.arcs().iter().filter(|a| side[a.0] && !side[a.1]).map(|a| a.2).sum();
        assert_eq!(cut, v);
    }

    #[test]
    fn random_networks_match_enumerated_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let nodes = rng.random_range(2..=10);
            let mut net = FlowNetwork::new(nodes, 0, nodes - 1);
            for _ in 0..rng.random_range(0..25) {
                let u = rng.random_range(0..nodes);
                let v = rng.random_range(0..nodes);
                if u != v {
                    net.add_arc(u, v, rng.random_range(0..10) as f64 * 0.5);
                }
            }
            let (v, side) = max_flow(&net);
            assert!((v - brute_min_cut(&net)).abs() < 1e-9);
            let cut: f64 = net.arcs().iter().filter(|a| side[a.0] && !side[a.1]).map(|a| a.2).sum();
            assert!((cut - v).abs() < 1e-9);
        }
    }

    #[test]
    fn bruteforce_examples() {
        let g = SetFunctionOracle::from_table(GroundSet::new(2).unwrap(), vec![0.0, 0.5, 1.5, 4.0]).unwrap();
        let (h, _) = increasing_shift(&g);
        let x = CubePoint::new(vec![1.0, 1.0]).unwrap();
        // values over ∅, {a}, {b}, {a,b}: 0, 0, 0, 1
        let r = margin_separation_bruteforce(&h, &x, GammaScale::new(0.5).unwrap()).unwrap();
        assert_eq!(r.best_set.mask(), 3);
        assert_eq!(r.plane_value, 1.0);

        let zero = SetFunctionOracle::from_table(GroundSet::new(3).unwrap(), vec![0.0; 8]).unwrap();
        let r = margin_separation_bruteforce(&zero, &CubePoint::new(vec![0.3; 3]).unwrap(), GammaScale::new(1.0).unwrap()).unwrap();
        assert!(r.best_set.is_empty());
        assert_eq!(r.plane_value, 0.0);

        let p17 = SetFunctionOracle::from_cardinality(GroundSet::new(4).unwrap(), vec![0.0, -0.5, -2.0 / 3.0, -0.5, 0.0]).unwrap();
        let (h, _) = increasing_shift(&p17);
        let r = margin_separation_bruteforce(&h, &CubePoint::new(vec![0.9; 4]).unwrap(), GammaScale::new(1.0).unwrap()).unwrap();
        assert_eq!(r.best_set.mask(), 15);
        assert!((r.plane_value - 1.6).abs() < 1e-12);
    }

    #[test]
    fn line_instance_separates_to_empty() {
        let pts = DataPoints::new(3, 1, vec![0.0, 1.0, 10.0]).unwrap();
        let (inst, g) = build_coverage_objective(pts, 1.5).unwrap();
        let (h, _) = increasing_shift(&g);
        let gamma = optimal_gamma(&h).unwrap();
        let r = margin_separation_coverage(&inst, &CubePoint::new(vec![0.0; 3]).unwrap(), gamma);
        assert!(r.best_set.is_empty());
        assert_eq!(r.plane_value, 0.0);
    }

    #[test]
    fn flow_matches_bruteforce_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..50 {
            let n = rng.random_range(2..=12);
            let pts = gen_gaussian_mixture(n, 2, 3, seed).unwrap();
            let eps = eps_percentile(&pts, rng.random_range(0.1..0.9)).unwrap();
            let (inst, g) = build_coverage_objective(pts, eps).unwrap();
            let (h, _) = increasing_shift(&g);
            let gamma = optimal_gamma(&h).unwrap();
            let x = CubePoint::new((0..n).map(|_| rng.random_range(0.0..1.0)).collect()).unwrap();
            let brute = margin_separation_bruteforce(&h, &x, gamma).unwrap();
            for prune in [true, false] {
                let flow = margin_separation_coverage_with(&inst, &x, gamma, prune);
                assert!((flow.plane_value - brute.plane_value).abs() < 1e-9, "seed {seed} prune {prune}");
                let direct = gamma.value() * h.evaluate(&flow.best_set).unwrap() - flow.best_set.len() as f64
                    + flow.best_set.iter().map(|i| x.coords()[i]).sum::<f64>();
                assert!((direct - flow.plane_value).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn violation_flag() {
        let mut r = SeparationResult {
            best_set: GroundSet::new(1).unwrap().empty(),
            plane_value: 1.0,
            violated: false,
        };
        let gm = GammaScale::new(0.5).unwrap();
        assert_eq!(r.extension_value(1.0, gm), 3.0);
        assert!(r.mark_violation(1.0, gm, 2.0, 1e-6));
        assert!(!r.mark_violation(1.0, gm, 3.0, 1e-6));
    }
}

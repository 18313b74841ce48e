//! The six convex extensions of a set function and their affine planes.
//!
//! Every kind except the closure is a pointwise maximum of affine functions
//! indexed by subsets (the "generators"). Evaluators below enumerate all
//! generators on a dense value table; [`make_plane`] builds a single plane
//! from O(p) oracle calls and is what the cutting-plane loop uses.
//!
//! With `g = h + m` the increasing shift of `g` (`m` agrees with `g` on
//! singletons), the planes for a generator `A` are
//!
//! | kind      | plane at `x`                                                        |
//! |-----------|---------------------------------------------------------------------|
//! | `S_PLUS`  | `ℓ(A)(1 - Σ_{i∈A}(1 - x_i))`                                          |
//! | `S`       | `⟨m,x⟩ + h(A)(1 - Σ_{i∈A}(1 - x_i))`                                  |
//! | `M_GAMMA` | `⟨m,x⟩ + h(A) - Σ_{i∈A}(1 - x_i)/γ`                                   |
//! | `J1`      | `g(A) + Σ_{i∉A} x_i(g(A+i) - g(A)) - Σ_{i∈A}(1 - x_i)(g(V) - g(V-i))` |
//! | `J2`      | `g(A) + Σ_{i∉A} x_i g({i}) - Σ_{i∈A}(1 - x_i)(g(A) - g(A-i))`         |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{capability, Error, Result};
use crate::lpsolve::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::setfn::{
    increasing_shift, is_increasing, singleton_modular, GroundSet, ModularFunction, SetFunctionOracle, Subset,
    ENUM_MAX_P, SET_TOL, TABLE_MAX_P,
};

/// Largest ground set for the closure LP (2^p mixture weights).
pub const CLOSURE_MAX_P: usize = 12;

const CUBE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExtensionKind {
    Closure,
    SPlus,
    S,
    MGamma,
    J1,
    J2,
}

impl ExtensionKind {
    pub const ALL: [ExtensionKind; 6] = [
        ExtensionKind::Closure,
        ExtensionKind::SPlus,
        ExtensionKind::S,
        ExtensionKind::MGamma,
        ExtensionKind::J1,
        ExtensionKind::J2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExtensionKind::Closure => "CLOSURE",
            ExtensionKind::SPlus => "S_PLUS",
            ExtensionKind::S => "S",
            ExtensionKind::MGamma => "M_GAMMA",
            ExtensionKind::J1 => "J1",
            ExtensionKind::J2 => "J2",
        }
    }
}

impl fmt::Display for ExtensionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExtensionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', '+'], "_");
        Ok(match norm.as_str() {
            "CLOSURE" | "C" => ExtensionKind::Closure,
            "S_PLUS" | "S_" | "SPLUS" => ExtensionKind::SPlus,
            "S" => ExtensionKind::S,
            "M_GAMMA" | "M" | "MGAMMA" => ExtensionKind::MGamma,
            "J1" => ExtensionKind::J1,
            "J2" => ExtensionKind::J2,
            _ => return Err(Error::Usage(format!("unknown extension kind {s:?}"))),
        })
    }
}

/// A point of the unit cube `[0,1]^p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubePoint {
    coords: Vec<f64>,
}

impl CubePoint {
    /// Clamps into the cube; violations beyond 1e-9 are logged.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let mut coords = coords;
        for (i, c) in coords.iter_mut().enumerate() {
            if !c.is_finite() {
                return Err(Error::Usage(format!("coordinate {i} is not finite")));
            }
            if *c < -CUBE_SLACK || *c > 1.0 + CUBE_SLACK {
                log::warn!("coordinate {i} = {c} outside the unit cube; clamping");
            }
            *c = c.clamp(0.0, 1.0);
        }
        Ok(CubePoint { coords })
    }

    pub fn vertex(a: &Subset) -> Self {
        CubePoint { coords: a.indicator() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// `set(x)` for a vertex; `None` when any coordinate is fractional.
    pub fn as_vertex(&self) -> Option<Subset> {
        let ground = GroundSet::new(self.coords.len()).ok()?;
        let mut s = Subset::empty(ground);
        for (i, &c) in self.coords.iter().enumerate() {
            if c == 1.0 {
                s.insert(i);
            } else if c != 0.0 {
                return None;
            }
        }
        Some(s)
    }
}

/// Margin-rescaling scale factor `γ > 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GammaScale(f64);

impl GammaScale {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(GammaScale(value))
        } else {
            Err(Error::Usage(format!("gamma must be positive and finite, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `b + ⟨a, x⟩`, generated by a subset under one extension kind.
#[derive(Clone, Debug, PartialEq)]
pub struct CuttingPlane {
    pub generator: Subset,
    pub kind: ExtensionKind,
    pub offset: f64,
    pub coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PlaneJson {
    kind: ExtensionKind,
    generator_bitmask: String,
    offset: f64,
    coeffs: Vec<f64>,
}

impl CuttingPlane {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.offset + self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn to_json(&self) -> Result<String> {
        let mask = self
            .generator
            .try_mask()
            .ok_or_else(|| Error::Unsupported("plane JSON needs p <= 64".into()))?;
        Ok(serde_json::to_string(&PlaneJson {
            kind: self.kind,
            generator_bitmask: mask.to_string(),
            offset: self.offset,
            coeffs: self.coeffs.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let pj: PlaneJson = serde_json::from_str(text)?;
        let ground = GroundSet::new(pj.coeffs.len())?;
        let mask: u64 = pj
            .generator_bitmask
            .parse()
            .map_err(|_| Error::Usage(format!("bad generator bitmask {:?}", pj.generator_bitmask)))?;
        if ground.size() < 64 && mask >> ground.size() != 0 {
            return Err(Error::Usage("generator outside the ground set".into()));
        }
        Ok(CuttingPlane {
            generator: Subset::from_mask(ground, mask),
            kind: pj.kind,
            offset: pj.offset,
            coeffs: pj.coeffs,
        })
    }
}

/// `h×(x, A) = (1 - |A| + Σ_{i∈A} x_i)₊`, the closure of `[A ⊆ ·]`.
pub fn subset_indicator_closure(a: &Subset, x: &CubePoint) -> f64 {
    let s: f64 = a.iter().map(|i| 1.0 - x.coords[i]).sum();
    (1.0 - s).max(0.0)
}

fn check_point(g: &SetFunctionOracle, x: &CubePoint) -> Result<()> {
    if x.dim() != g.p() {
        return Err(Error::GroundMismatch {
            expected: g.p(),
            found: x.dim(),
        });
    }
    Ok(())
}

/// Convex closure by its mixture LP over all `2^p` subsets.
pub fn closure_eval(g: &SetFunctionOracle, x: &CubePoint) -> Result<f64> {
    check_point(g, x)?;
    capability("convex closure LP", g.p(), CLOSURE_MAX_P)?;
    let lp = closure_lp(&g.table()?, g.p(), ClosureTarget::Point(x.coords()));
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective_value),
        st => Err(Error::Solver(format!("closure LP returned {st:?} at a cube point"))),
    }
}

pub(crate) enum ClosureTarget<'a> {
    Point(&'a [f64]),
    /// `x` becomes free in the cube, optionally with `Σ x_i <= C`.
    Minimize(Option<f64>),
}

/// Mixture LP `min Σ α_A g(A)` with `Σ α_A 1_A = x`, `Σ α_A = 1`, `α >= 0`.
/// In minimize mode the last `p` variables are `x`.
pub(crate) fn closure_lp(table: &[f64], p: usize, target: ClosureTarget<'_>) -> LinearProgram {
    let n = table.len();
    let free_x = matches!(target, ClosureTarget::Minimize(_));
    let nvars = if free_x { n + p } else { n };
    let mut obj = table.to_vec();
    obj.resize(nvars, 0.0);
    let mut lp = LinearProgram::new(obj);
    for i in 0..p {
        let mut row: Vec<f64> = (0..n).map(|a| ((a >> i) & 1) as f64).collect();
        row.resize(nvars, 0.0);
        let rhs = match target {
            ClosureTarget::Point(x) => x[i],
            ClosureTarget::Minimize(_) => {
                row[n + i] = -1.0;
                0.0
            }
        };
        lp.add_row(row, Relation::Eq, rhs);
    }
    let mut ones = vec![1.0; n];
    ones.resize(nvars, 0.0);
    lp.add_row(ones, Relation::Eq, 1.0);
    if let ClosureTarget::Minimize(budget) = target {
        for i in 0..p {
            lp.set_bounds(n + i, 0.0, 1.0);
        }
        if let Some(c) = budget {
            let mut row = vec![0.0; n];
            row.resize(nvars, 1.0);
            lp.add_row(row, Relation::Le, c);
        }
    }
    lp
}

/// Dense view of a function and its increasing shift, enough to evaluate
/// every generator-indexed extension by enumeration.
#[derive(Clone, Debug)]
pub(crate) struct Tables {
    pub p: usize,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub m: Vec<f64>,
}

impl Tables {
    pub fn new(g: &SetFunctionOracle) -> Result<Self> {
        capability("exhaustive extension evaluation", g.p(), ENUM_MAX_P)?;
        let p = g.p();
        let t = g.table()?;
        let m: Vec<f64> = (0..p).map(|i| t[1 << i]).collect();
        let mm = ModularFunction::new(m.clone());
        let h = t.iter().enumerate().map(|(a, v)| v - mm.value_mask(a as u64)).collect();
        Ok(Tables { p, g: t, h, m })
    }

    fn full(&self) -> usize {
        (1 << self.p) - 1
    }

    /// `Σ_{i∈A}(1 - x_i)` for every mask.
    fn deficits(&self, x: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; 1 << self.p];
        for a in 1..s.len() {
            let low = a.trailing_zeros() as usize;
            s[a] = s[a & (a - 1)] + (1.0 - x[low]);
        }
        s
    }

    fn mdot(&self, x: &[f64]) -> f64 {
        self.m.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Value of the `kind` plane generated by `a` at `x`.
    fn plane_value(&self, kind: ExtensionKind, a: usize, x: &[f64], deficit: f64, gamma: f64) -> f64 {
        let t = &self.g;
        match kind {
            ExtensionKind::SPlus => t[a] * (1.0 - deficit),
            ExtensionKind::S => self.mdot(x) + self.h[a] * (1.0 - deficit),
            ExtensionKind::MGamma => self.mdot(x) + self.h[a] - deficit / gamma,
            ExtensionKind::J1 => {
                let full = self.full();
                let mut v = t[a];
                for (i, &xi) in x.iter().enumerate() {
                    if a >> i & 1 == 1 {
                        v -= (1.0 - xi) * (t[full] - t[full & !(1 << i)]);
                    } else {
                        v += xi * (t[a | 1 << i] - t[a]);
                    }
                }
                v
            }
            ExtensionKind::J2 => {
                let mut v = t[a];
                for (i, &xi) in x.iter().enumerate() {
                    if a >> i & 1 == 1 {
                        v -= (1.0 - xi) * (t[a] - t[a & !(1 << i)]);
                    } else {
                        v += xi * t[1 << i];
                    }
                }
                v
            }
            ExtensionKind::Closure => unreachable!("closure has no generator planes"),
        }
    }

    /// Maximizing generator (lowest mask on ties) and the maximum.
    pub fn argmax(&self, kind: ExtensionKind, x: &[f64], gamma: f64) -> (usize, f64) {
        let deficits = self.deficits(x);
        let mut best = (0usize, f64::NEG_INFINITY);
        for (a, &d) in deficits.iter().enumerate() {
            let v = self.plane_value(kind, a, x, d, gamma);
            if v > best.1 {
                best = (a, v);
            }
        }
        best
    }

    pub fn plane(&self, kind: ExtensionKind, a: usize, gamma: f64) -> CuttingPlane {
        let p = self.p;
        let t = &self.g;
        let full = self.full();
        let card = (a as u64).count_ones() as f64;
        let inside = |i: usize| a >> i & 1 == 1;
        let (offset, coeffs): (f64, Vec<f64>) = match kind {
            ExtensionKind::SPlus => (
                t[a] * (1.0 - card),
                (0..p).map(|i| if inside(i) { t[a] } else { 0.0 }).collect(),
            ),
            ExtensionKind::S => (
                self.h[a] * (1.0 - card),
                (0..p).map(|i| self.m[i] + if inside(i) { self.h[a] } else { 0.0 }).collect(),
            ),
            ExtensionKind::MGamma => (
                self.h[a] - card / gamma,
                (0..p).map(|i| self.m[i] + if inside(i) { 1.0 / gamma } else { 0.0 }).collect(),
            ),
            ExtensionKind::J1 => {
                let d = |i: usize| t[full] - t[full & !(1 << i)];
                (
                    t[a] - (0..p).filter(|&i| inside(i)).map(d).sum::<f64>(),
                    (0..p).map(|i| if inside(i) { d(i) } else { t[a | 1 << i] - t[a] }).collect(),
                )
            }
            ExtensionKind::J2 => {
                let d = |i: usize| t[a] - t[a & !(1 << i)];
                (
                    t[a] - (0..p).filter(|&i| inside(i)).map(d).sum::<f64>(),
                    (0..p).map(|i| if inside(i) { d(i) } else { t[1 << i] }).collect(),
                )
            }
            ExtensionKind::Closure => unreachable!("closure has no generator planes"),
        };
        CuttingPlane {
            generator: Subset::from_mask(GroundSet::new(p).expect("p >= 1"), a as u64),
            kind,
            offset,
            coeffs,
        }
    }

    pub fn optimal_gamma(&self) -> Result<GammaScale> {
        let full = self.full();
        let min_drop = (0..self.p).map(|i| self.h[full & !(1 << i)]).fold(f64::INFINITY, f64::min);
        gamma_from_denominator(self.h[full] - min_drop)
    }
}

fn gamma_from_denominator(denom: f64) -> Result<GammaScale> {
    if denom < -SET_TOL {
        return Err(Error::Contract(format!(
            "h(V) - min_i h(V - i) = {denom} < 0; h is not increasing supermodular"
        )));
    }
    if denom < SET_TOL {
        return Ok(GammaScale(1.0));
    }
    GammaScale::new(1.0 / denom)
}

/// `γ* = 1 / (h(V) - min_i h(V - i))` from `p + 1` oracle calls; `γ = 1`
/// when the denominator vanishes.
pub fn optimal_gamma(h: &SetFunctionOracle) -> Result<GammaScale> {
    let full = h.ground().full();
    let top = h.value(&full);
    let min_drop = (0..h.p()).map(|i| h.value(&full.without(i))).fold(f64::INFINITY, f64::min);
    gamma_from_denominator(top - min_drop)
}

/// Smallest `(|B| - |A∩B|) / (h(B) - h(A))` over pairs with `h(A) < h(B)`,
/// by scanning all pairs. Reports `γ = 1` when no pair qualifies.
pub fn gamma_bound_bruteforce(h: &SetFunctionOracle) -> Result<GammaScale> {
    capability("gamma pair scan", h.p(), CLOSURE_MAX_P)?;
    let t = h.table()?;
    let mut best = f64::INFINITY;
    for (b, &hb) in t.iter().enumerate() {
        for (a, &ha) in t.iter().enumerate() {
            if hb - ha > SET_TOL {
                let num = ((b & !a) as u64).count_ones() as f64;
                best = best.min(num / (hb - ha));
            }
        }
    }
    if best.is_finite() {
        GammaScale::new(best)
    } else {
        Ok(GammaScale(1.0))
    }
}

/// Fails when `gamma` exceeds the pairwise bound, i.e. when `M_γ` would not
/// be an extension of `h`.
pub fn check_gamma_valid(h: &SetFunctionOracle, gamma: GammaScale) -> Result<()> {
    let bound = gamma_bound_bruteforce(h)?;
    if gamma.value() > bound.value() * (1.0 + 1e-12) {
        return Err(Error::Contract(format!(
            "gamma {} exceeds the extension bound {}",
            gamma.value(),
            bound.value()
        )));
    }
    Ok(())
}

fn require_increasing(l: &SetFunctionOracle) -> Result<()> {
    if l.p() <= TABLE_MAX_P && !is_increasing(l)? {
        return Err(Error::Contract("S_PLUS needs an increasing set function; use S".into()));
    }
    Ok(())
}

fn eval_by_enumeration(kind: ExtensionKind, g: &SetFunctionOracle, x: &CubePoint, gamma: Option<GammaScale>) -> Result<f64> {
    check_point(g, x)?;
    let tables = Tables::new(g)?;
    let gamma = match (kind, gamma) {
        (ExtensionKind::MGamma, None) => tables.optimal_gamma()?.value(),
        (_, Some(gm)) => gm.value(),
        _ => 1.0,
    };
    Ok(tables.argmax(kind, x.coords(), gamma).1)
}

/// Slack rescaling for increasing `ℓ`: `max_A ℓ(A)(1 - |A| + Σ_{i∈A} x_i)`.
pub fn s_plus_eval(l: &SetFunctionOracle, x: &CubePoint) -> Result<f64> {
    require_increasing(l)?;
    eval_by_enumeration(ExtensionKind::SPlus, l, x, None)
}

/// Slack rescaling of supermodular `g` after its increasing shift.
pub fn s_eval(g: &SetFunctionOracle, x: &CubePoint) -> Result<f64> {
    eval_by_enumeration(ExtensionKind::S, g, x, None)
}

/// Margin rescaling `M_γ`; `gamma = None` selects the optimal scale.
pub fn m_gamma_eval(g: &SetFunctionOracle, x: &CubePoint, gamma: Option<GammaScale>) -> Result<f64> {
    eval_by_enumeration(ExtensionKind::MGamma, g, x, gamma)
}

/// Maximum of the first modular-bound family of planes.
pub fn j1_eval(g: &SetFunctionOracle, x: &CubePoint) -> Result<f64> {
    eval_by_enumeration(ExtensionKind::J1, g, x, None)
}

/// Maximum of the second modular-bound family of planes.
pub fn j2_eval(g: &SetFunctionOracle, x: &CubePoint) -> Result<f64> {
    eval_by_enumeration(ExtensionKind::J2, g, x, None)
}

/// Evaluates any of the six kinds at `x` (optimal γ for `M_GAMMA`).
pub fn eval(kind: ExtensionKind, g: &SetFunctionOracle, x: &CubePoint) -> Result<f64> {
    match kind {
        ExtensionKind::Closure => closure_eval(g, x),
        ExtensionKind::SPlus => s_plus_eval(g, x),
        _ => eval_by_enumeration(kind, g, x, None),
    }
}

/// The generator attaining the extension value at `x` (lowest bitmask on ties).
pub fn maximizing_generator(
    kind: ExtensionKind,
    g: &SetFunctionOracle,
    x: &CubePoint,
    gamma: Option<GammaScale>,
) -> Result<(Subset, f64)> {
    if kind == ExtensionKind::Closure {
        return Err(Error::Unsupported("the closure is not a maximum of generator planes".into()));
    }
    check_point(g, x)?;
    let tables = Tables::new(g)?;
    let gamma = match gamma {
        Some(gm) => gm.value(),
        None if kind == ExtensionKind::MGamma => tables.optimal_gamma()?.value(),
        None => 1.0,
    };
    let (a, v) = tables.argmax(kind, x.coords(), gamma);
    Ok((Subset::from_mask(g.ground(), a as u64), v))
}

/// Everything needed to build planes for one function from oracle calls:
/// the singleton weights and, lazily, `g(V)` and the drops `g(V) - g(V - i)`.
pub struct PlaneBuilder {
    g: SetFunctionOracle,
    m: ModularFunction,
    gamma: GammaScale,
    full_drops: Option<Vec<f64>>,
}

impl PlaneBuilder {
    /// Uses `gamma` for `M_GAMMA` planes, or the optimal scale when `None`.
    pub fn new(g: &SetFunctionOracle, gamma: Option<GammaScale>) -> Result<Self> {
        let m = singleton_modular(g);
        let gamma = match gamma {
            Some(gm) => gm,
            None => {
                let (h, _) = increasing_shift(g);
                optimal_gamma(&h)?
            }
        };
        Ok(PlaneBuilder {
            g: g.clone(),
            m,
            gamma,
            full_drops: None,
        })
    }

    pub fn gamma(&self) -> GammaScale {
        self.gamma
    }

    pub fn modular(&self) -> &ModularFunction {
        &self.m
    }

    fn drops(&mut self) -> &[f64] {
        if self.full_drops.is_none() {
            let full = self.g.ground().full();
            let top = self.g.value(&full);
            self.full_drops = Some((0..self.g.p()).map(|i| top - self.g.value(&full.without(i))).collect());
        }
        self.full_drops.as_deref().expect("just filled")
    }

    pub fn plane(&mut self, kind: ExtensionKind, a: &Subset) -> Result<CuttingPlane> {
        if a.ground() != self.g.ground() {
            return Err(Error::GroundMismatch {
                expected: self.g.p(),
                found: a.ground().size(),
            });
        }
        let p = self.g.p();
        let ga = self.g.value(a);
        let card = a.len() as f64;
        let (offset, coeffs) = match kind {
            ExtensionKind::Closure => {
                return Err(Error::Unsupported(
                    "the closure is not a finite maximum of oracle-indexed planes".into(),
                ))
            }
            ExtensionKind::SPlus => (
                ga * (1.0 - card),
                (0..p).map(|i| if a.contains(i) { ga } else { 0.0 }).collect(),
            ),
            ExtensionKind::S => {
                let ha = ga - self.m.value(a);
                (
                    ha * (1.0 - card),
                    (0..p).map(|i| self.m.weights[i] + if a.contains(i) { ha } else { 0.0 }).collect(),
                )
            }
            ExtensionKind::MGamma => {
                let ha = ga - self.m.value(a);
                let inv = 1.0 / self.gamma.value();
                (
                    ha - card * inv,
                    (0..p).map(|i| self.m.weights[i] + if a.contains(i) { inv } else { 0.0 }).collect(),
                )
            }
            ExtensionKind::J1 => {
                let drops = self.drops().to_vec();
                let mut offset = ga;
                let mut coeffs = vec![0.0; p];
                for i in 0..p {
                    if a.contains(i) {
                        offset -= drops[i];
                        coeffs[i] = drops[i];
                    } else {
                        coeffs[i] = self.g.value(&a.with(i)) - ga;
                    }
                }
                (offset, coeffs)
            }
            ExtensionKind::J2 => {
                let mut offset = ga;
                let mut coeffs = vec![0.0; p];
                for i in 0..p {
                    if a.contains(i) {
                        let d = ga - self.g.value(&a.without(i));
                        offset -= d;
                        coeffs[i] = d;
                    } else {
                        coeffs[i] = self.m.weights[i];
                    }
                }
                (offset, coeffs)
            }
        };
        Ok(CuttingPlane {
            generator: a.clone(),
            kind,
            offset,
            coeffs,
        })
    }
}

/// One plane of `kind` generated by `a`, built from O(p) oracle calls.
pub fn make_plane(kind: ExtensionKind, g: &SetFunctionOracle, a: &Subset, gamma: GammaScale) -> Result<CuttingPlane> {
    PlaneBuilder::new(g, Some(gamma))?.plane(kind, a)
}

/// All `2^p` generator planes of `kind` (p <= 12). `M_GAMMA` uses `gamma`
/// or the optimal scale.
pub fn all_planes(kind: ExtensionKind, g: &SetFunctionOracle, gamma: Option<GammaScale>) -> Result<Vec<CuttingPlane>> {
    if kind == ExtensionKind::Closure {
        return Err(Error::Unsupported("the closure is not a maximum of generator planes".into()));
    }
    capability("plane enumeration", g.p(), CLOSURE_MAX_P)?;
    if kind == ExtensionKind::SPlus {
        require_increasing(g)?;
    }
    let tables = Tables::new(g)?;
    let gamma = match gamma {
        Some(gm) => gm.value(),
        None => tables.optimal_gamma()?.value(),
    };
    Ok((0..1usize << g.p()).map(|a| tables.plane(kind, a, gamma)).collect())
}

/// A precomputed extension for repeated evaluation at many points.
pub struct Extension {
    kind: ExtensionKind,
    g: SetFunctionOracle,
    p: usize,
    offsets: Vec<f64>,
    coeffs: Vec<f64>,
}

impl Extension {
    pub fn new(kind: ExtensionKind, g: &SetFunctionOracle) -> Result<Self> {
        Self::with_gamma(kind, g, None)
    }

    pub fn with_gamma(kind: ExtensionKind, g: &SetFunctionOracle, gamma: Option<GammaScale>) -> Result<Self> {
        Self::from_planes(kind, g, if kind == ExtensionKind::Closure { Vec::new() } else { all_planes(kind, g, gamma)? })
    }

    /// Wraps an explicit plane family (used to test mutated families).
    pub fn from_planes(kind: ExtensionKind, g: &SetFunctionOracle, planes: Vec<CuttingPlane>) -> Result<Self> {
        if kind == ExtensionKind::Closure {
            capability("convex closure LP", g.p(), CLOSURE_MAX_P)?;
        }
        let p = g.p();
        let offsets = planes.iter().map(|pl| pl.offset).collect();
        let coeffs = planes.iter().flat_map(|pl| pl.coeffs.iter().copied()).collect();
        Ok(Extension {
            kind,
            g: g.clone(),
            p,
            offsets,
            coeffs,
        })
    }

    pub fn kind(&self) -> ExtensionKind {
        self.kind
    }

    pub fn eval(&self, x: &CubePoint) -> Result<f64> {
        if self.kind == ExtensionKind::Closure {
            return closure_eval(&self.g, x);
        }
        check_point(&self.g, x)?;
        Ok(self.eval_coords(x.coords()))
    }

    fn eval_coords(&self, x: &[f64]) -> f64 {
        self.offsets
            .iter()
            .zip(self.coeffs.chunks_exact(self.p))
            .map(|(b, a)| b + a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

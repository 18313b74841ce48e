//! Verification harness: fixtures, dominance scans between extensions,
//! convexity probes and the check suites behind the `check` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coverage::{build_coverage_objective, eps_percentile, gen_gaussian_mixture};
use crate::error::{capability, Error, Result};
use crate::extensions::{
    all_planes, gamma_bound_bruteforce, optimal_gamma, CubePoint, CuttingPlane, Extension, ExtensionKind,
};
use crate::flowsep::{margin_separation_bruteforce, margin_separation_coverage};
use crate::minimize::integrality_frequency;
use crate::setfn::{
    increasing_shift, is_increasing, is_supermodular, nonnegative_lift, random_supermodular, GroundSet,
    ModularFunction, SetFunctionOracle, Subset, SupermodularFamily,
};

pub const VIOLATION_TOL: f64 = 1e-9;
pub const DEFAULT_GRID_STEP: f64 = 0.25;
pub const DEFAULT_RANDOM_POINTS: usize = 100;
/// Largest ground set the scans accept (a 0.25 grid has 5^p points).
pub const SCAN_MAX_P: usize = 6;

pub struct Fixture {
    pub name: &'static str,
    pub oracle: SetFunctionOracle,
    pub note: &'static str,
}

fn table(p: usize, values: Vec<f64>) -> SetFunctionOracle {
    SetFunctionOracle::from_table(GroundSet::new(p).expect("p >= 1"), values).expect("valid fixture table")
}

/// `ℓ(∅) = ℓ({a}) = ℓ({b}) = 0`, `ℓ({a,b}) = ε`.
pub fn p3_fixture(eps: f64) -> SetFunctionOracle {
    table(2, vec![0.0, 0.0, 0.0, eps])
}

pub fn builtin_fixtures() -> Vec<Fixture> {
    let p9b = {
        let mut t = vec![0.0; 8];
        t[0b011] = 0.5;
        t[0b111] = 1.0;
        t
    };
    vec![
        Fixture {
            name: "FIG2",
            oracle: table(2, vec![0.0, 0.5, 1.5, 4.0]),
            note: "increasing supermodular on two elements",
        },
        Fixture {
            name: "FIG3a",
            oracle: table(2, vec![0.0, 0.5, 1.5, 4.0]),
            note: "positive supermodular on two elements",
        },
        Fixture {
            name: "FIG3b",
            oracle: table(2, vec![0.0, -1.5, -0.5, 4.0]),
            note: "supermodular with negative singletons",
        },
        Fixture {
            name: "P3",
            oracle: p3_fixture(1.0),
            note: "strictly supermodular; the slack-rescaling objective at x = 0 is not supermodular",
        },
        Fixture {
            name: "P9",
            oracle: table(3, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            note: "zero except g(V) = 1",
        },
        Fixture {
            name: "P9b",
            oracle: table(3, p9b),
            note: "g(V) = 1, g({0,1}) = 0.5, zero elsewhere; J1 and S are incomparable on it",
        },
        Fixture {
            name: "P17",
            oracle: SetFunctionOracle::from_cardinality(GroundSet::new(4).expect("p = 4"), vec![0.0, -0.5, -2.0 / 3.0, -0.5, 0.0])
                .expect("valid fixture"),
            note: "symmetric, convex in cardinality; margin and slack rescaling are incomparable on it",
        },
    ]
}

pub fn fixture(name: &str) -> Result<Fixture> {
    builtin_fixtures()
        .into_iter()
        .find(|f| f.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Usage(format!("unknown fixture {name:?}")))
}

/// `A ↦ ℓ(A)(1 - |A| + Σ_{i∈A} x_i)`, the set function maximized when
/// evaluating slack rescaling at `x`.
pub fn slack_objective(l: &SetFunctionOracle, x: &CubePoint) -> Result<SetFunctionOracle> {
    let t = l.table()?;
    let x = x.coords().to_vec();
    let vals = t
        .iter()
        .enumerate()
        .map(|(a, v)| v * (1.0 + (0..x.len()).filter(|i| a >> i & 1 == 1).map(|i| x[i] - 1.0).sum::<f64>()))
        .collect();
    SetFunctionOracle::from_table(l.ground(), vals)
}

/// Deliberately broken plane families, used to confirm the checks catch them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// `S_PLUS` planes `ℓ(A)(1 + Σ_{i∈A} x_i)`, i.e. without the `-|A|` term.
    SPlusMissingCardinality,
}

/// Precomputed extension, with `mutation` applied where it matches `kind`.
pub fn evaluator(kind: ExtensionKind, g: &SetFunctionOracle, mutation: Option<Mutation>) -> Result<Extension> {
    match (kind, mutation) {
        (ExtensionKind::SPlus, Some(Mutation::SPlusMissingCardinality)) => {
            let planes: Vec<CuttingPlane> = all_planes(kind, g, None)?
                .into_iter()
                .map(|mut pl| {
                    pl.offset += pl.generator.len() as f64 * g.evaluate(&pl.generator).unwrap_or(0.0);
                    pl
                })
                .collect();
            Extension::from_planes(kind, g, planes)
        }
        _ => Extension::new(kind, g),
    }
}

/// Largest `|ext(1_B) - g(B)|` over all vertices.
pub fn vertex_conformance(kind: ExtensionKind, g: &SetFunctionOracle, mutation: Option<Mutation>) -> Result<f64> {
    let ext = evaluator(kind, g, mutation)?;
    let mut worst: f64 = 0.0;
    for mask in 0..g.ground().num_subsets() as u64 {
        let b = Subset::from_mask(g.ground(), mask);
        let v = ext.eval(&CubePoint::vertex(&b))?;
        worst = worst.max((v - g.evaluate(&b)?).abs());
    }
    Ok(worst)
}

/// Evaluation points: a regular grid with the given step plus seeded
/// uniform points.
pub fn scan_points(p: usize, grid_step: f64, n_random: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    capability("grid scan", p, SCAN_MAX_P)?;
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::Usage(format!("grid step must lie in (0, 1], got {grid_step}")));
    }
    let mut levels: Vec<f64> = Vec::new();
    let mut k = 0;
    while (k as f64) * grid_step < 1.0 - 1e-12 {
        levels.push(k as f64 * grid_step);
        k += 1;
    }
    levels.push(1.0);
    let mut pts = Vec::new();
    let total = levels.len().pow(p as u32);
    for mut idx in 0..total {
        let mut x = Vec::with_capacity(p);
        for _ in 0..p {
            x.push(levels[idx % levels.len()]);
            idx /= levels.len();
        }
        pts.push(x);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        pts.push((0..p).map(|_| rng.random_range(0.0..=1.0)).collect());
    }
    Ok(pts)
}

/// Outcome of testing `child <= parent` pointwise.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    pub parent: ExtensionKind,
    pub child: ExtensionKind,
    pub class: String,
    pub points: usize,
    /// `max (child - parent)` over the scanned points.
    pub max_violation: f64,
    pub witness: Vec<f64>,
    pub passed: bool,
}

fn scan(
    parent: ExtensionKind,
    child: ExtensionKind,
    g: &SetFunctionOracle,
    class: &str,
    points: &[Vec<f64>],
) -> Result<DominanceReport> {
    let ep = Extension::new(parent, g)?;
    let ec = Extension::new(child, g)?;
    let mut worst = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    for x in points {
        let xp = CubePoint::new(x.clone())?;
        let v = ec.eval(&xp)? - ep.eval(&xp)?;
        if v > worst {
            worst = v;
            witness = x.clone();
        }
    }
    Ok(DominanceReport {
        parent,
        child,
        class: class.to_string(),
        points: points.len(),
        max_violation: worst,
        witness,
        passed: worst <= VIOLATION_TOL,
    })
}

/// Scans `child <= parent + 1e-9` over a grid and random points.
pub fn dominance_scan(
    parent: ExtensionKind,
    child: ExtensionKind,
    g: &SetFunctionOracle,
    grid_step: f64,
    n_random: usize,
    seed: u64,
) -> Result<DominanceReport> {
    let points = scan_points(g.p(), grid_step, n_random, seed)?;
    let class = if is_increasing(g)? { "increasing supermodular" } else { "supermodular" };
    scan(parent, child, g, class, &points)
}

/// The directed edges of the extension partial order, parent first.
pub const EDGES: [(ExtensionKind, ExtensionKind); 6] = [
    (ExtensionKind::Closure, ExtensionKind::J1),
    (ExtensionKind::Closure, ExtensionKind::J2),
    (ExtensionKind::J1, ExtensionKind::MGamma),
    (ExtensionKind::J2, ExtensionKind::MGamma),
    (ExtensionKind::J2, ExtensionKind::S),
    (ExtensionKind::S, ExtensionKind::SPlus),
];

/// Scans every edge; the `S >= S_PLUS` edge runs on the non-negative lift
/// `h + |m|` of `g`.
pub fn figure1_check(g: &SetFunctionOracle, grid_step: f64, seed: u64) -> Result<Vec<DominanceReport>> {
    capability("partial-order check", g.p(), 5)?;
    let points = scan_points(g.p(), grid_step, DEFAULT_RANDOM_POINTS, seed)?;
    let lift = nonnegative_lift(g).to_table_oracle()?;
    EDGES
        .iter()
        .map(|&(parent, child)| {
            if child == ExtensionKind::SPlus {
                scan(parent, child, &lift, "non-negative supermodular", &points)
            } else {
                scan(parent, child, g, "supermodular", &points)
            }
        })
        .collect()
}

/// `max eval((x+y)/2) - (eval(x) + eval(y))/2` over random pairs.
pub fn convexity_probe(kind: ExtensionKind, g: &SetFunctionOracle, trials: usize, seed: u64) -> Result<f64> {
    convexity_probe_with(kind, g, trials, seed, None)
}

pub fn convexity_probe_with(
    kind: ExtensionKind,
    g: &SetFunctionOracle,
    trials: usize,
    seed: u64,
    mutation: Option<Mutation>,
) -> Result<f64> {
    capability("convexity probe", g.p(), 5)?;
    let ext = evaluator(kind, g, mutation)?;
    let p = g.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let x: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..=1.0)).collect();
        let y: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..=1.0)).collect();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let v = ext.eval(&CubePoint::new(mid)?)?
            - 0.5 * (ext.eval(&CubePoint::new(x)?)? + ext.eval(&CubePoint::new(y)?)?);
        worst = worst.max(v);
    }
    Ok(worst)
}

/// One named check inside a suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

fn outcome(name: impl Into<String>, passed: bool, detail: serde_json::Value) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail,
    }
}

const FAMILIES: [SupermodularFamily; 3] = [
    SupermodularFamily::CoverageLike,
    SupermodularFamily::ConvexOfCardinality,
    SupermodularFamily::RandomTable,
];

/// Sign-pattern checks on the fixtures where two extensions are incomparable.
pub fn counterexample_checks() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let pairs = [
        ("P17", ExtensionKind::MGamma, ExtensionKind::S, vec![0.9, 0.9, 0.1, 0.1], vec![0.9; 4]),
        ("P9b", ExtensionKind::J1, ExtensionKind::S, vec![0.9, 0.9, 0.0], vec![1.0, 1.0, 0.5]),
    ];
    for (name, a, b, first, second) in pairs {
        let g = fixture(name)?.oracle;
        let ea = Extension::new(a, &g)?;
        let eb = Extension::new(b, &g)?;
        let d1 = eb.eval(&CubePoint::new(first.clone())?)? - ea.eval(&CubePoint::new(first.clone())?)?;
        let d2 = eb.eval(&CubePoint::new(second.clone())?)? - ea.eval(&CubePoint::new(second.clone())?)?;
        out.push(outcome(
            format!("incomparable {a}/{b} on {name}"),
            d1 > VIOLATION_TOL && d2 < -VIOLATION_TOL,
            serde_json::json!({ "at": first, "b_minus_a": d1, "then_at": second, "b_minus_a_then": d2 }),
        ));
        for (parent, child) in [(a, b), (b, a)] {
            let r = dominance_scan(parent, child, &g, DEFAULT_GRID_STEP, 1000, 7)?;
            out.push(outcome(
                format!("scan finds {child} above {parent} on {name}"),
                !r.passed,
                serde_json::to_value(&r)?,
            ));
        }
    }
    let p3 = fixture("P3")?.oracle;
    let tilde = slack_objective(&p3, &CubePoint::new(vec![0.0, 0.0])?)?;
    out.push(outcome(
        "slack objective of P3 at x = 0 is not supermodular",
        is_supermodular(&p3)? && !is_supermodular(&tilde)?,
        serde_json::json!({ "values": tilde.table()? }),
    ));
    Ok(out)
}

/// Conformance and convexity checks for every kind on the fixtures, with an
/// optional injected mutation.
pub fn conformance_checks(mutation: Option<Mutation>, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for fx in builtin_fixtures() {
        for kind in ExtensionKind::ALL {
            let g = if kind == ExtensionKind::SPlus && !is_increasing(&fx.oracle)? {
                nonnegative_lift(&fx.oracle).to_table_oracle()?
            } else {
                fx.oracle.clone()
            };
            let dev = vertex_conformance(kind, &g, mutation)?;
            let conv = convexity_probe_with(kind, &g, 200, seed, mutation)?;
            out.push(outcome(
                format!("{kind} on {}", fx.name),
                dev <= VIOLATION_TOL && conv <= VIOLATION_TOL,
                serde_json::json!({ "vertex_deviation": dev, "midpoint_violation": conv }),
            ));
        }
    }
    Ok(out)
}

/// Runs a named suite: `default`, `counterexamples` or `mutation-splus`.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    match name {
        "default" => {
            checks.extend(conformance_checks(None, seed)?);
            let mut edge_worst = vec![f64::NEG_INFINITY; EDGES.len()];
            let mut edge_ok = true;
            for s in 0..30u64 {
                let fam = FAMILIES[(s % 3) as usize];
                let g = random_supermodular(4, seed.wrapping_add(s), fam)?;
                for (k, r) in figure1_check(&g, DEFAULT_GRID_STEP, seed.wrapping_add(s))?.iter().enumerate() {
                    edge_worst[k] = edge_worst[k].max(r.max_violation);
                    edge_ok &= r.passed;
                }
            }
            checks.push(outcome(
                "partial order edges on 30 random functions",
                edge_ok,
                serde_json::json!(EDGES
                    .iter()
                    .zip(&edge_worst)
                    .map(|((a, b), w)| serde_json::json!({ "parent": a, "child": b, "max_violation": w }))
                    .collect::<Vec<_>>()),
            ));
            let mut gamma_gap: f64 = 0.0;
            for s in 0..30u64 {
                let g = random_supermodular(4, seed.wrapping_add(100 + s), FAMILIES[(s % 3) as usize])?;
                let (h, _) = increasing_shift(&g);
                gamma_gap = gamma_gap.max((optimal_gamma(&h)?.value() - gamma_bound_bruteforce(&h)?.value()).abs());
            }
            checks.push(outcome("gamma formula vs pair scan", gamma_gap <= 1e-9, serde_json::json!({ "max_gap": gamma_gap })));
            let mut sep_gap: f64 = 0.0;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in 0..10u64 {
                let n = rng.random_range(3..=10);
                let pts = gen_gaussian_mixture(n, 2, 3, seed.wrapping_add(s))?;
                let eps = eps_percentile(&pts, rng.random_range(0.2..0.9))?;
                let (inst, g) = build_coverage_objective(pts, eps)?;
                let (h, _) = increasing_shift(&g);
                let gamma = optimal_gamma(&h)?;
                let x = CubePoint::new((0..n).map(|_| rng.random_range(0.0..1.0)).collect())?;
                let a = margin_separation_coverage(&inst, &x, gamma).plane_value;
                let b = margin_separation_bruteforce(&h, &x, gamma)?.plane_value;
                sep_gap = sep_gap.max((a - b).abs());
            }
            checks.push(outcome("min-cut vs brute-force separation", sep_gap <= 1e-9, serde_json::json!({ "max_gap": sep_gap })));
            let seeds: Vec<u64> = (0..50).map(|s| seed.wrapping_add(s)).collect();
            let (fm, fj) = integrality_frequency(ExtensionKind::MGamma, ExtensionKind::J1, SupermodularFamily::RandomTable, 4, &seeds)?;
            checks.push(outcome(
                "integral-minimizer frequency M_GAMMA <= J1",
                fm <= fj,
                serde_json::json!({ "m_gamma": fm, "j1": fj }),
            ));
        }
        "counterexamples" => checks.extend(counterexample_checks()?),
        "mutation-splus" => checks.extend(conformance_checks(Some(Mutation::SPlusMissingCardinality), seed)?),
        other => return Err(Error::Usage(format!("unknown suite {other:?}"))),
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// A modular function as an oracle, for tests of the all-coincide case.
pub fn modular_oracle(weights: Vec<f64>) -> Result<SetFunctionOracle> {
    ModularFunction::new(weights).to_oracle()
}

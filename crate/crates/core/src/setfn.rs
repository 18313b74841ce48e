//! Ground sets, subsets and memoizing set-function oracles.
//!
//! Every oracle is normalized so that the empty set scores zero. Values are
//! cached on first use and the call counter only moves on cache misses, so
//! counts reflect genuine evaluations of the underlying function.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{capability, Error, Result};

/// Absolute tolerance for comparisons between set-function values.
pub const SET_TOL: f64 = 1e-12;

/// Largest ground set for which exhaustive table checks are run.
pub const TABLE_MAX_P: usize = 16;

/// Largest ground set for which exhaustive subset enumeration is allowed.
pub const ENUM_MAX_P: usize = 20;

/// The base set `V = {0, .., p-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    p: usize,
}

impl GroundSet {
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Usage("ground set must have at least one element".into()));
        }
        Ok(GroundSet { p })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.p
    }

    /// Number of subsets, `2^p`. Only meaningful for p < 64.
    pub fn num_subsets(&self) -> usize {
        1usize << self.p
    }

    pub fn empty(&self) -> Subset {
        Subset::empty(*self)
    }

    pub fn full(&self) -> Subset {
        Subset::full(*self)
    }
}

/// A subset of a ground set stored as a word bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    p: usize,
    words: Vec<u64>,
}

fn word_count(p: usize) -> usize {
    p.div_ceil(64).max(1)
}

impl Subset {
    pub fn empty(ground: GroundSet) -> Self {
        Subset {
            p: ground.p,
            words: vec![0; word_count(ground.p)],
        }
    }

    pub fn full(ground: GroundSet) -> Self {
        let mut s = Self::empty(ground);
        for i in 0..ground.p {
            s.insert(i);
        }
        s
    }

    /// Builds a subset from a bitmask. Panics if `p > 64` or the mask has
    /// bits at or above `p`.
    pub fn from_mask(ground: GroundSet, mask: u64) -> Self {
        assert!(ground.p <= 64, "bitmask subsets need p <= 64");
        assert!(
            ground.p == 64 || mask >> ground.p == 0,
            "mask {mask:#x} has bits outside a ground set of size {}",
            ground.p
        );
        Subset {
            p: ground.p,
            words: vec![mask],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(ground: GroundSet, items: I) -> Result<Self> {
        let mut s = Self::empty(ground);
        for i in items {
            if i >= ground.p {
                return Err(Error::Usage(format!(
                    "element {i} outside ground set of size {}",
                    ground.p
                )));
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet { p: self.p }
    }

    /// The bitmask of this subset, available when `p <= 64`.
    pub fn try_mask(&self) -> Option<u64> {
        (self.p <= 64).then(|| self.words[0])
    }

    pub fn mask(&self) -> u64 {
        self.try_mask().expect("bitmask requires p <= 64")
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.p && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.p, "element {i} outside ground set of size {}", self.p);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.p {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn with(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.remove(i);
        s
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&i| self.contains(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.p, other.p);
        Subset {
            p: self.p,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.p, other.p);
        Subset {
            p: self.p,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// The binary vector `1_A`.
    pub fn indicator(&self) -> Vec<f64> {
        (0..self.p).map(|i| if self.contains(i) { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Anything that scores subsets of a fixed ground set.
pub trait SetFunction: Send + Sync {
    fn ground(&self) -> GroundSet;
    fn value(&self, a: &Subset) -> f64;
}

struct TableFunction {
    ground: GroundSet,
    values: Vec<f64>,
}

impl SetFunction for TableFunction {
    fn ground(&self) -> GroundSet {
        self.ground
    }
    fn value(&self, a: &Subset) -> f64 {
        self.values[a.mask() as usize]
    }
}

struct FnFunction<F> {
    ground: GroundSet,
    f: F,
}

impl<F: Fn(&Subset) -> f64 + Send + Sync> SetFunction for FnFunction<F> {
    fn ground(&self) -> GroundSet {
        self.ground
    }
    fn value(&self, a: &Subset) -> f64 {
        (self.f)(a)
    }
}

struct OracleInner {
    f: Box<dyn SetFunction>,
    cache: RwLock<HashMap<Subset, f64>>,
    calls: AtomicU64,
}

/// A shareable, memoizing black-box set function with `f(∅) = 0`.
///
/// Clones share the cache and the call counter.
#[derive(Clone)]
pub struct SetFunctionOracle {
    inner: Arc<OracleInner>,
}

impl fmt::Debug for SetFunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetFunctionOracle")
            .field("p", &self.p())
            .field("calls", &self.call_count())
            .finish()
    }
}

impl SetFunctionOracle {
    /// Wraps a set function. Fails if it does not vanish on the empty set.
    pub fn new<F: SetFunction + 'static>(f: F) -> Result<Self> {
        let empty = f.value(&Subset::empty(f.ground()));
        if empty.abs() > SET_TOL {
            return Err(Error::Contract(format!(
                "set functions must satisfy f(empty) = 0, got {empty}"
            )));
        }
        Ok(SetFunctionOracle {
            inner: Arc::new(OracleInner {
                f: Box::new(f),
                cache: RwLock::new(HashMap::new()),
                calls: AtomicU64::new(0),
            }),
        })
    }

    pub fn from_fn<F>(ground: GroundSet, f: F) -> Result<Self>
    where
        F: Fn(&Subset) -> f64 + Send + Sync + 'static,
    {
        Self::new(FnFunction { ground, f })
    }

    /// Table oracle indexed by subset bitmask; `values.len()` must be `2^p`.
    pub fn from_table(ground: GroundSet, values: Vec<f64>) -> Result<Self> {
        capability("table oracle", ground.size(), TABLE_MAX_P)?;
        if values.len() != ground.num_subsets() {
            return Err(Error::Usage(format!(
                "table for p = {} needs {} values, got {}",
                ground.size(),
                ground.num_subsets(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Usage(format!("non-finite table value {v}")));
        }
        Self::new(TableFunction { ground, values })
    }

    /// Symmetric function given by its values on each cardinality `0..=p`.
    pub fn from_cardinality(ground: GroundSet, by_card: Vec<f64>) -> Result<Self> {
        if by_card.len() != ground.size() + 1 {
            return Err(Error::Usage(format!(
                "need {} cardinality values, got {}",
                ground.size() + 1,
                by_card.len()
            )));
        }
        Self::from_fn(ground, move |a| by_card[a.len()])
    }

    pub fn ground(&self) -> GroundSet {
        self.inner.f.ground()
    }

    pub fn p(&self) -> usize {
        self.ground().size()
    }

    /// Evaluates `f(A)`, counting a call on cache miss.
    pub fn evaluate(&self, a: &Subset) -> Result<f64> {
        let ground = self.ground();
        if a.ground() != ground {
            return Err(Error::GroundMismatch {
                expected: ground.size(),
                found: a.ground().size(),
            });
        }
        Ok(self.value(a))
    }

    /// Unchecked evaluation; the caller guarantees a matching ground set.
    pub(crate) fn value(&self, a: &Subset) -> f64 {
        if let Some(&v) = self.inner.cache.read().expect("oracle cache poisoned").get(a) {
            return v;
        }
        let v = if a.is_empty() { 0.0 } else { self.inner.f.value(a) };
        let mut cache = self.inner.cache.write().expect("oracle cache poisoned");
        if let Some(&v) = cache.get(a) {
            return v;
        }
        cache.insert(a.clone(), v);
        self.inner.calls.fetch_add(1, Ordering::Relaxed);
        v
    }

    pub fn value_mask(&self, mask: u64) -> f64 {
        self.value(&Subset::from_mask(self.ground(), mask))
    }

    /// Number of evaluations of the underlying function so far.
    pub fn call_count(&self) -> u64 {
        self.inner.calls.load(Ordering::Relaxed)
    }

    /// Dense table of all `2^p` values, indexed by bitmask.
    pub fn table(&self) -> Result<Vec<f64>> {
        capability("exhaustive enumeration", self.p(), ENUM_MAX_P)?;
        Ok((0..self.ground().num_subsets() as u64)
            .map(|m| self.value_mask(m))
            .collect())
    }

    /// The oracle `A ↦ c·f(A)`.
    pub fn scaled(&self, c: f64) -> SetFunctionOracle {
        let base = self.clone();
        Self::from_fn(self.ground(), move |a| c * base.value(a)).expect("scaling preserves f(∅)=0")
    }

    /// The oracle `A ↦ f(A) + m(A)`.
    pub fn plus_modular(&self, m: &ModularFunction) -> Result<SetFunctionOracle> {
        if m.len() != self.p() {
            return Err(Error::GroundMismatch {
                expected: self.p(),
                found: m.len(),
            });
        }
        let base = self.clone();
        let m = m.clone();
        Self::from_fn(self.ground(), move |a| base.value(a) + m.value(a))
    }

    /// Materializes the function as a table oracle with a fresh counter.
    pub fn to_table_oracle(&self) -> Result<SetFunctionOracle> {
        Self::from_table(self.ground(), self.table()?)
    }

    pub fn to_json(&self) -> Result<String> {
        capability("JSON table export", self.p(), TABLE_MAX_P)?;
        let values = self
            .table()?
            .into_iter()
            .enumerate()
            .map(|(m, v)| (m.to_string(), v))
            .collect();
        Ok(serde_json::to_string_pretty(&TableJson { p: self.p(), values })?)
    }

    /// Parses `{"p": int, "values": {"<bitmask>": float}}`. A missing empty
    /// set entry defaults to 0; every other subset must be present.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: TableJson = serde_json::from_str(text)?;
        let ground = GroundSet::new(parsed.p)?;
        capability("table oracle", parsed.p, TABLE_MAX_P)?;
        let mut values = vec![f64::NAN; ground.num_subsets()];
        values[0] = 0.0;
        for (key, v) in &parsed.values {
            let m: usize = key
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad subset bitmask key {key:?}")))?;
            if m >= values.len() {
                return Err(Error::Usage(format!("bitmask {m} outside ground set of size {}", parsed.p)));
            }
            values[m] = *v;
        }
        if let Some(m) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Usage(format!("missing value for subset bitmask {m}")));
        }
        Self::from_table(ground, values)
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    p: usize,
    values: BTreeMap<String, f64>,
}

/// A modular function, stored as its weight vector `vec(m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularFunction {
    pub weights: Vec<f64>,
}

impl ModularFunction {
    pub fn new(weights: Vec<f64>) -> Self {
        ModularFunction { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn value(&self, a: &Subset) -> f64 {
        a.iter().map(|i| self.weights[i]).sum()
    }

    pub fn value_mask(&self, mask: u64) -> f64 {
        let mut s = 0.0;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            s += self.weights[i];
            m &= m - 1;
        }
        s
    }

    /// `⟨vec(m), x⟩`.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, xi)| w * xi).sum()
    }

    pub fn to_oracle(&self) -> Result<SetFunctionOracle> {
        let ground = GroundSet::new(self.weights.len())?;
        let m = self.clone();
        SetFunctionOracle::from_fn(ground, move |a| m.value(a))
    }
}

/// `mg`: the modular function agreeing with `g` on singletons.
pub fn singleton_modular(g: &SetFunctionOracle) -> ModularFunction {
    let ground = g.ground();
    ModularFunction::new(
        (0..ground.size())
            .map(|i| {
                let mut s = Subset::empty(ground);
                s.insert(i);
                g.value(&s)
            })
            .collect(),
    )
}

/// Splits `g = h + m` with `m = mg`, so `h` vanishes on singletons. For
/// supermodular `g`, `h` is increasing and non-negative.
pub fn increasing_shift(g: &SetFunctionOracle) -> (SetFunctionOracle, ModularFunction) {
    let m = singleton_modular(g);
    let base = g.clone();
    let mm = m.clone();
    let h = SetFunctionOracle::from_fn(g.ground(), move |a| base.value(a) - mm.value(a))
        .expect("g - mg vanishes on the empty set");
    (h, m)
}

/// `h + |m|` for the increasing shift `g = h + m`: non-negative, increasing
/// and supermodular whenever `g` is supermodular.
pub fn nonnegative_lift(g: &SetFunctionOracle) -> SetFunctionOracle {
    let (h, m) = increasing_shift(g);
    let abs = ModularFunction::new(m.weights.iter().map(|w| w.abs()).collect());
    h.plus_modular(&abs).expect("same ground set")
}

fn bit_table(f: &SetFunctionOracle, what: &'static str) -> Result<Vec<f64>> {
    capability(what, f.p(), TABLE_MAX_P)?;
    f.table()
}

/// Exhaustive supermodularity test (p <= 16) via second differences:
/// `f(S+i) + f(S+j) <= f(S+i+j) + f(S)` for all `S` and `i, j ∉ S`.
pub fn is_supermodular(f: &SetFunctionOracle) -> Result<bool> {
    let t = bit_table(f, "supermodularity check")?;
    Ok(table_is_supermodular(&t, f.p()))
}

pub(crate) fn table_is_supermodular(t: &[f64], p: usize) -> bool {
    for s in 0..t.len() {
        for i in 0..p {
            if s >> i & 1 == 1 {
                continue;
            }
            for j in (i + 1)..p {
                if s >> j & 1 == 1 {
                    continue;
                }
                let (si, sj, sij) = (s | 1 << i, s | 1 << j, s | 1 << i | 1 << j);
                if t[si] + t[sj] > t[sij] + t[s] + SET_TOL {
                    return false;
                }
            }
        }
    }
    true
}

/// Exhaustive monotonicity test (p <= 16): `f(A+x) >= f(A)` for all `A`, `x ∉ A`.
pub fn is_increasing(f: &SetFunctionOracle) -> Result<bool> {
    let t = bit_table(f, "monotonicity check")?;
    Ok(table_is_increasing(&t, f.p()))
}

pub(crate) fn table_is_increasing(t: &[f64], p: usize) -> bool {
    (0..t.len()).all(|a| (0..p).all(|x| a >> x & 1 == 1 || t[a | 1 << x] >= t[a] - SET_TOL))
}

/// Families of random supermodular test functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SupermodularFamily {
    /// Negative weighted coverage of a random bipartite incidence.
    CoverageLike,
    /// A convex function of `|A|` plus a random modular term.
    ConvexOfCardinality,
    /// A random table repaired onto the supermodular cone (p <= 16).
    RandomTable,
}

const REPAIR_CAP: usize = 1_000_000;

/// Deterministic random supermodular oracle.
pub fn random_supermodular(p: usize, seed: u64, family: SupermodularFamily) -> Result<SetFunctionOracle> {
    let ground = GroundSet::new(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        SupermodularFamily::CoverageLike => {
            let universe = 2 * p + 2;
            let weights: Vec<f64> = (0..universe).map(|_| rng.random_range(0.1..1.0)).collect();
            let covers: Vec<Vec<usize>> = (0..p)
                .map(|_| (0..universe).filter(|_| rng.random_bool(0.3)).collect())
                .collect();
            SetFunctionOracle::from_fn(ground, move |a| {
                let mut covered = vec![false; universe];
                for i in a.iter() {
                    for &u in &covers[i] {
                        covered[u] = true;
                    }
                }
                -covered
                    .iter()
                    .zip(&weights)
                    .filter(|(c, _)| **c)
                    .map(|(_, w)| w)
                    .sum::<f64>()
            })
        }
        SupermodularFamily::ConvexOfCardinality => {
            let mut phi = vec![0.0; p + 1];
            let mut step = rng.random_range(-1.0..0.0);
            for k in 1..=p {
                phi[k] = phi[k - 1] + step;
                step += rng.random_range(0.0..1.0);
            }
            let modular = ModularFunction::new((0..p).map(|_| rng.random_range(-1.0..1.0)).collect());
            SetFunctionOracle::from_fn(ground, move |a| phi[a.len()] + modular.value(a))
        }
        SupermodularFamily::RandomTable => {
            capability("random supermodular table", p, TABLE_MAX_P)?;
            let n = ground.num_subsets();
            let mut t: Vec<f64> = (0..n)
                .map(|m| if m == 0 { 0.0 } else { rng.random_range(-1.0..1.0) })
                .collect();
            let mut repairs = 0usize;
            for s in 1..n {
                let mut need = f64::NEG_INFINITY;
                for i in 0..p {
                    if s >> i & 1 == 0 {
                        continue;
                    }
                    for j in (i + 1)..p {
                        if s >> j & 1 == 0 {
                            continue;
                        }
                        let (a, b, c) = (s & !(1 << i), s & !(1 << j), s & !(1 << i) & !(1 << j));
                        need = need.max(t[a] + t[b] - t[c]);
                    }
                }
                if t[s] < need {
                    t[s] = need;
                    repairs += 1;
                    if repairs > REPAIR_CAP {
                        return Err(Error::Generation(format!(
                            "supermodular repair did not converge within {REPAIR_CAP} repairs"
                        )));
                    }
                }
            }
            SetFunctionOracle::from_table(ground, t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> SetFunctionOracle {
        SetFunctionOracle::from_table(GroundSet::new(2).unwrap(), vec![0.0, 0.5, 1.5, 4.0]).unwrap()
    }

    fn p17() -> SetFunctionOracle {
        SetFunctionOracle::from_cardinality(
            GroundSet::new(4).unwrap(),
            vec![0.0, -0.5, -2.0 / 3.0, -0.5, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_fixture_values() {
        let g = fig2();
        let v = GroundSet::new(2).unwrap();
        assert_eq!(g.evaluate(&Subset::full(v)).unwrap(), 4.0);
        assert_eq!(g.evaluate(&Subset::empty(v)).unwrap(), 0.0);
        let p = p17();
        let ab = Subset::from_indices(p.ground(), [0, 1]).unwrap();
        assert_eq!(p.evaluate(&ab).unwrap(), -2.0 / 3.0);
    }

    #[test]
    fn evaluate_rejects_foreign_subset() {
        let g = fig2();
        let other = Subset::empty(GroundSet::new(3).unwrap());
        assert!(matches!(
            g.evaluate(&other),
            Err(Error::GroundMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn nonzero_empty_value_is_rejected() {
        let v = GroundSet::new(1).unwrap();
        assert!(SetFunctionOracle::from_table(v, vec![1.0, 2.0]).is_err());
        assert!(GroundSet::new(0).is_err());
    }

    #[test]
    fn memoization_counts_cache_misses_only() {
        let g = fig2();
        let full = g.ground().full();
        g.evaluate(&full).unwrap();
        g.evaluate(&full).unwrap();
        assert_eq!(g.call_count(), 1);
        g.evaluate(&g.ground().empty()).unwrap();
        assert_eq!(g.call_count(), 2);
    }

    #[test]
    fn singleton_modular_examples() {
        let g = fig2();
        let m = singleton_modular(&g);
        assert_eq!(m.weights, vec![0.5, 1.5]);
        assert_eq!(g.call_count(), 2);

        let w = ModularFunction::new(vec![0.3, -1.0, 2.5]);
        assert_eq!(singleton_modular(&w.to_oracle().unwrap()).weights, w.weights);
        assert_eq!(singleton_modular(&p17()).weights, vec![-0.5; 4]);
    }

    #[test]
    fn increasing_shift_examples() {
        let (h, m) = increasing_shift(&fig2());
        assert_eq!(m.weights, vec![0.5, 1.5]);
        assert_eq!(h.table().unwrap(), vec![0.0, 0.0, 0.0, 2.0]);

        let (h, _) = increasing_shift(&p17());
        let expect = [0.0, 0.0, 1.0 / 3.0, 1.0, 2.0];
        for (mask, v) in h.table().unwrap().into_iter().enumerate() {
            let card = (mask as u64).count_ones() as usize;
            assert!((v - expect[card]).abs() < 1e-12, "mask {mask}: {v}");
        }

        let w = ModularFunction::new(vec![1.0, -2.0, 0.5]);
        let (h, _) = increasing_shift(&w.to_oracle().unwrap());
        assert!(h.table().unwrap().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn supermodularity_examples() {
        let v = GroundSet::new(2).unwrap();
        let p3 = SetFunctionOracle::from_table(v, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(is_supermodular(&p3).unwrap());
        let tilde = SetFunctionOracle::from_table(v, vec![0.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(!is_supermodular(&tilde).unwrap());
        let w = ModularFunction::new(vec![0.3, -1.0, 2.5, 7.0]);
        assert!(is_supermodular(&w.to_oracle().unwrap()).unwrap());
    }

    #[test]
    fn monotonicity_examples() {
        assert!(is_increasing(&fig2()).unwrap());
        let v = GroundSet::new(2).unwrap();
        let fig3b = SetFunctionOracle::from_table(v, vec![0.0, -1.5, -0.5, 4.0]).unwrap();
        assert!(!is_increasing(&fig3b).unwrap());
        let (h, _) = increasing_shift(&fig3b);
        assert!(is_increasing(&h).unwrap());
    }

    #[test]
    fn exhaustive_checks_refuse_large_p() {
        let g = random_supermodular(17, 0, SupermodularFamily::ConvexOfCardinality).unwrap();
        assert!(matches!(is_supermodular(&g), Err(Error::Capability { .. })));
        assert!(matches!(is_increasing(&g), Err(Error::Capability { .. })));
        assert!(random_supermodular(17, 0, SupermodularFamily::RandomTable).is_err());
    }

    #[test]
    fn random_families_are_supermodular_and_deterministic() {
        let g = random_supermodular(2, 7, SupermodularFamily::ConvexOfCardinality).unwrap();
        assert!(is_supermodular(&g).unwrap());
        let g = random_supermodular(4, 1, SupermodularFamily::RandomTable).unwrap();
        assert!(is_supermodular(&g).unwrap());
        for family in [
            SupermodularFamily::CoverageLike,
            SupermodularFamily::ConvexOfCardinality,
            SupermodularFamily::RandomTable,
        ] {
            for seed in 0..10 {
                let a = random_supermodular(6, seed, family).unwrap();
                let b = random_supermodular(6, seed, family).unwrap();
                assert_eq!(a.table().unwrap(), b.table().unwrap());
                assert!(is_supermodular(&a).unwrap(), "{family:?} seed {seed}");
            }
        }
    }

    #[test]
    fn json_round_trip_and_missing_empty_entry() {
        let g = fig2();
        let back = SetFunctionOracle::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(back.table().unwrap(), g.table().unwrap());

        let parsed =
            SetFunctionOracle::from_json(r#"{"p": 2, "values": {"1": 0.5, "2": 1.5, "3": 4}}"#).unwrap();
        assert_eq!(parsed.table().unwrap(), vec![0.0, 0.5, 1.5, 4.0]);
        assert!(SetFunctionOracle::from_json(r#"{"p": 2, "values": {"1": 0.5, "3": 4}}"#).is_err());
        assert!(SetFunctionOracle::from_json(r#"{"p": 2, "values": {"0": 1, "1": 0.5, "2": 1, "3": 4}}"#).is_err());
    }

    #[test]
    fn subset_basics() {
        let v = GroundSet::new(70).unwrap();
        let mut s = Subset::from_indices(v, [0, 65, 3]).unwrap();
        assert_eq!(s.indices(), vec![0, 3, 65]);
        assert_eq!(s.len(), 3);
        assert!(s.try_mask().is_none());
        s.remove(65);
        assert!(!s.contains(65));
        assert!(Subset::from_indices(v, [70]).is_err());
        let a = Subset::from_mask(GroundSet::new(3).unwrap(), 0b011);
        let b = Subset::from_mask(GroundSet::new(3).unwrap(), 0b110);
        assert_eq!(a.union(&b).mask(), 0b111);
        assert_eq!(a.intersection(&b).mask(), 0b010);
        assert!(a.intersection(&b).is_subset_of(&a));
        assert_eq!(a.indicator(), vec![1.0, 1.0, 0.0]);
    }
}

//! Point clouds and the negative-coverage exemplar objective.
//!
//! An exemplar `i` covers every point within distance `ε` of it (itself
//! included). `g(A) = -|⋃_{i∈A} cover(i)|` is supermodular and
//! non-increasing.

use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setfn::{GroundSet, SetFunction, SetFunctionOracle, Subset};

#[derive(Clone, Debug, PartialEq)]
pub struct DataPoints {
    n: usize,
    dim: usize,
    rows: Vec<f64>,
}

impl DataPoints {
    /// Row-major `n × dim` matrix; every entry must be finite.
    pub fn new(n: usize, dim: usize, rows: Vec<f64>) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::Usage("a point set needs n >= 1 and dim >= 1".into()));
        }
        if rows.len() != n * dim {
            return Err(Error::Usage(format!("expected {} values, got {}", n * dim, rows.len())));
        }
        if let Some(k) = rows.iter().position(|v| !v.is_finite()) {
            return Err(Error::Usage(format!("non-finite coordinate in row {}", k / dim)));
        }
        Ok(DataPoints { n, dim, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.dim..(i + 1) * self.dim]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Writes the matrix as header-less CSV.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for i in 0..self.n {
            w.write_record(self.row(i).iter().map(|v| v.to_string()))
                .map_err(|e| Error::Io(e.into()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads one point per line of comma-separated floats, without a header.
pub fn load_points(path: impl AsRef<Path>) -> Result<DataPoints> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_points(&text)
}

pub fn parse_points(text: &str) -> Result<DataPoints> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut dim = 0;
    let mut n = 0;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(n + 1, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if n == 0 {
            dim = rec.len();
        } else if rec.len() != dim {
            return Err(Error::Parse {
                line,
                msg: format!("expected {dim} columns, found {}", rec.len()),
            });
        }
        for field in rec.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-finite value {field:?}"),
                });
            }
            rows.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::Parse {
            line: 1,
            msg: "no data rows".into(),
        });
    }
    DataPoints::new(n, dim, rows)
}

/// `k` clusters with centers at random vertices of `{0,1}^dim` and
/// unit-variance Gaussian spread.
pub fn gen_gaussian_mixture(n: usize, dim: usize, k_clusters: usize, seed: u64) -> Result<DataPoints> {
    if n == 0 || dim == 0 || k_clusters == 0 {
        return Err(Error::Usage("n, dim and k must all be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..k_clusters)
        .map(|_| (0..dim).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut rows = Vec::with_capacity(n * dim);
    for _ in 0..n {
        let c = &centers[rng.random_range(0..k_clusters)];
        for &ci in c {
            let z: f64 = rng.sample(StandardNormal);
            rows.push(ci + z);
        }
    }
    DataPoints::new(n, dim, rows)
}

/// Nearest-rank `q`-percentile of the distinct-pair distances.
pub fn eps_percentile(points: &DataPoints, q: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Usage(format!("percentile must lie in (0, 1], got {q}")));
    }
    let n = points.n();
    if n < 2 {
        return Err(Error::Usage("need at least two points for pairwise distances".into()));
    }
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            d.push(points.distance(i, j));
        }
    }
    d.sort_by(f64::total_cmp);
    // guard against q·m landing a hair above an integer
    let rank = ((q * d.len() as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(d[rank.min(d.len()) - 1])
}

/// Covering relation of an exemplar-selection problem.
#[derive(Clone, Debug)]
pub struct CoverageInstance {
    points: Option<DataPoints>,
    epsilon: f64,
    n: usize,
    words: usize,
    adjacency: Vec<u64>,
    singleton: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    epsilon: f64,
    n: usize,
    adjacency: Vec<String>,
}

impl CoverageInstance {
    pub fn new(points: DataPoints, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::Usage(format!("epsilon must be finite and non-negative, got {epsilon}")));
        }
        let n = points.n();
        let words = n.div_ceil(64);
        let mut adjacency = vec![0u64; n * words];
        for i in 0..n {
            adjacency[i * words + i / 64] |= 1 << (i % 64);
            for j in i + 1..n {
                if points.distance(i, j) <= epsilon {
                    adjacency[i * words + j / 64] |= 1 << (j % 64);
                    adjacency[j * words + i / 64] |= 1 << (i % 64);
                }
            }
        }
        Ok(Self::from_parts(Some(points), epsilon, n, adjacency))
    }

    fn from_parts(points: Option<DataPoints>, epsilon: f64, n: usize, adjacency: Vec<u64>) -> Self {
        let words = n.div_ceil(64);
        let singleton = (0..n)
            .map(|i| adjacency[i * words..(i + 1) * words].iter().map(|w| w.count_ones() as usize).sum())
            .collect();
        CoverageInstance {
            points,
            epsilon,
            n,
            words,
            adjacency,
            singleton,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn points(&self) -> Option<&DataPoints> {
        self.points.as_ref()
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet::new(self.n).expect("n >= 1")
    }

    /// Bitset of the points covered by exemplar `i`.
    pub fn adjacency(&self, i: usize) -> &[u64] {
        &self.adjacency[i * self.words..(i + 1) * self.words]
    }

    pub fn covered_by(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency(i).iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }

    pub fn singleton_coverage(&self, i: usize) -> usize {
        self.singleton[i]
    }

    /// `|⋃_{i∈A} cover(i)|`.
    pub fn coverage(&self, a: &Subset) -> usize {
        let mut acc = vec![0u64; self.words];
        for i in a.iter() {
            for (x, y) in acc.iter_mut().zip(self.adjacency(i)) {
                *x |= y;
            }
        }
        acc.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Union bitset of a selection, for incremental gains.
    pub fn union_bits(&self, a: &Subset) -> Vec<u64> {
        let mut acc = vec![0u64; self.words];
        for i in a.iter() {
            self.absorb(&mut acc, i);
        }
        acc
    }

    pub fn absorb(&self, acc: &mut [u64], i: usize) {
        for (x, y) in acc.iter_mut().zip(self.adjacency(i)) {
            *x |= y;
        }
    }

    /// Points `i` would newly cover given the covered bitset `acc`.
    pub fn gain(&self, acc: &[u64], i: usize) -> usize {
        acc.iter()
            .zip(self.adjacency(i))
            .map(|(x, y)| (y & !x).count_ones() as usize)
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let adjacency = (0..self.n)
            .map(|i| (0..self.n).map(|j| if self.adjacency(i)[j / 64] >> (j % 64) & 1 == 1 { '1' } else { '0' }).collect())
            .collect();
        Ok(serde_json::to_string(&InstanceJson {
            epsilon: self.epsilon,
            n: self.n,
            adjacency,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ij: InstanceJson = serde_json::from_str(text)?;
        if ij.n == 0 || ij.adjacency.len() != ij.n {
            return Err(Error::Usage("adjacency must list one row per point".into()));
        }
        let words = ij.n.div_ceil(64);
        let mut adjacency = vec![0u64; ij.n * words];
        for (i, row) in ij.adjacency.iter().enumerate() {
            if row.len() != ij.n {
                return Err(Error::Usage(format!("adjacency row {i} has length {}", row.len())));
            }
            for (j, c) in row.chars().enumerate() {
                match c {
                    '1' => adjacency[i * words + j / 64] |= 1 << (j % 64),
                    '0' => {}
                    _ => return Err(Error::Usage(format!("adjacency row {i} has character {c:?}"))),
                }
            }
            if adjacency[i * words + i / 64] >> (i % 64) & 1 == 0 {
                return Err(Error::Usage(format!("point {i} does not cover itself")));
            }
        }
        Ok(Self::from_parts(None, ij.epsilon, ij.n, adjacency))
    }
}

struct NegCoverage(Arc<CoverageInstance>);

impl SetFunction for NegCoverage {
    fn ground(&self) -> GroundSet {
        self.0.ground()
    }
    fn value(&self, a: &Subset) -> f64 {
        -(self.0.coverage(a) as f64)
    }
}

/// The oracle `g(A) = -cov(A)` for an existing instance.
pub fn coverage_oracle(inst: Arc<CoverageInstance>) -> SetFunctionOracle {
    SetFunctionOracle::new(NegCoverage(inst)).expect("coverage of the empty set is zero")
}

pub fn build_coverage_objective(points: DataPoints, epsilon: f64) -> Result<(Arc<CoverageInstance>, SetFunctionOracle)> {
    let inst = Arc::new(CoverageInstance::new(points, epsilon)?);
    let g = coverage_oracle(inst.clone());
    Ok((inst, g))
}

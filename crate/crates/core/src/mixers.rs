//! Feasibility-preserving mixers, the minimum-CNOT candidate search and
//! end-to-end CNOT budgets.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoding::{build_encoding, feasible_projector, EncodingMap, EncodingScheme};
use crate::error::{Error, Result};
use crate::linalg::{self, r, ComplexMatrix};
use crate::pauli::{pauli_decompose, trotter_cost, CircuitCost, PauliSum};
use crate::thermal::{is_uncorrelated, mixer_ground_state};

/// Tolerance for the feasibility and commutation checks.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Coupling `weight · (|d⟩⟨d'| + h.c.)` between two qudit levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelPair {
    pub d: usize,
    pub d_prime: usize,
    pub weight: f64,
}

/// A mixer together with its Pauli form. On the feasible subspace the
/// matrix acts as `Σ weight (|d⟩⟨d'| + h.c.)` over `pairs`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixerSpec {
    pub scheme: EncodingScheme,
    pub dim_d: usize,
    pub pairs: Vec<LevelPair>,
    pub matrix: ComplexMatrix,
    pub pauli: PauliSum,
}

impl MixerSpec {
    /// Build `Σ w M(|d⟩⟨d'| + h.c.)M†`.
    pub fn from_pairs(map: &EncodingMap, pairs: Vec<LevelPair>) -> Result<Self> {
        let mut qudit = ComplexMatrix::zeros(map.dim_d, map.dim_d);
        for p in &pairs {
            if p.d >= p.d_prime || p.d_prime >= map.dim_d {
                return Err(Error::IndexOutOfRange {
                    index: p.d_prime.max(p.d),
                    limit: map.dim_d,
                });
            }
            qudit[(p.d, p.d_prime)] += r(p.weight);
            qudit[(p.d_prime, p.d)] += r(p.weight);
        }
        let matrix = &map.isometry * qudit * map.isometry.adjoint();
        Self::from_matrix(map, pairs, matrix)
    }

    fn from_matrix(
        map: &EncodingMap,
        pairs: Vec<LevelPair>,
        matrix: ComplexMatrix,
    ) -> Result<Self> {
        let pauli = pauli_decompose(&matrix)?;
        Ok(Self {
            scheme: map.scheme,
            dim_d: map.dim_d,
            pairs,
            matrix,
            pauli,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.pauli.num_qubits
    }

    pub fn cost(&self) -> CircuitCost {
        trotter_cost(&self.pauli)
    }

    /// `max |(I - P) H P|` with `P` the feasible projector.
    pub fn leakage(&self) -> Result<f64> {
        let map = build_encoding(self.scheme, self.dim_d)?;
        let p = feasible_projector(&map);
        let q = linalg::identity(p.nrows()) - &p;
        Ok(linalg::max_abs(&(q * &self.matrix * p)))
    }

    /// Header for the text serialization; the Pauli lines follow it.
    pub fn header_json(&self) -> String {
        #[derive(Serialize)]
        struct Header<'a> {
            scheme: EncodingScheme,
            dim_d: usize,
            pairs: &'a [LevelPair],
        }
        serde_json::to_string(&Header {
            scheme: self.scheme,
            dim_d: self.dim_d,
            pairs: &self.pairs,
        })
        .expect("header serializes")
    }
}

pub fn partial_mixer(map: &EncodingMap, d: usize, d_prime: usize) -> Result<MixerSpec> {
    if d >= d_prime || d_prime >= map.dim_d {
        return Err(Error::IndexOutOfRange {
            index: d.max(d_prime),
            limit: map.dim_d,
        });
    }
    MixerSpec::from_pairs(
        map,
        vec![LevelPair {
            d,
            d_prime,
            weight: 1.0,
        }],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MixerName {
    BinaryH1,
    BinaryH2,
    BinaryH3,
    SymH1,
    SymH2,
    SymH3,
    SymOpt,
    UnaryH1,
    UnaryH2,
    UnaryH3,
    /// `Σ_k X_k` on all qubits of the register.
    Standard(EncodingScheme),
}

impl MixerName {
    pub fn scheme(self) -> EncodingScheme {
        match self {
            Self::BinaryH1 | Self::BinaryH2 | Self::BinaryH3 => EncodingScheme::Binary,
            Self::SymH1 | Self::SymH2 | Self::SymH3 | Self::SymOpt => EncodingScheme::Symmetric,
            Self::UnaryH1 | Self::UnaryH2 | Self::UnaryH3 => EncodingScheme::Unary,
            Self::Standard(s) => s,
        }
    }

    /// Level pair of the numbered D=3 mixers: 1 → (0,1), 2 → (0,2), 3 → (1,2).
    fn d3_pair(self) -> Option<(usize, usize)> {
        match self {
            Self::BinaryH1 | Self::SymH1 | Self::UnaryH1 => Some((0, 1)),
            Self::BinaryH2 | Self::SymH2 | Self::UnaryH2 => Some((0, 2)),
            Self::BinaryH3 | Self::SymH3 | Self::UnaryH3 => Some((1, 2)),
            _ => None,
        }
    }

    /// All mixers of the D=3 comparison table, in table order.
    pub fn table_rows() -> [MixerName; 10] {
        [
            Self::BinaryH1,
            Self::BinaryH2,
            Self::BinaryH3,
            Self::SymH1,
            Self::SymH2,
            Self::SymH3,
            Self::SymOpt,
            Self::UnaryH1,
            Self::UnaryH2,
            Self::UnaryH3,
        ]
    }
}

impl fmt::Display for MixerName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Standard(s) => write!(f, "standard-{s}"),
            other => {
                let (prefix, suffix) = match other {
                    Self::BinaryH1 => ("binary", "h1"),
                    Self::BinaryH2 => ("binary", "h2"),
                    Self::BinaryH3 => ("binary", "h3"),
                    Self::SymH1 => ("symmetric", "h1"),
                    Self::SymH2 => ("symmetric", "h2"),
                    Self::SymH3 => ("symmetric", "h3"),
                    Self::SymOpt => ("symmetric", "opt"),
                    Self::UnaryH1 => ("unary", "h1"),
                    Self::UnaryH2 => ("unary", "h2"),
                    _ => ("unary", "h3"),
                };
                write!(f, "{prefix}-{suffix}")
            }
        }
    }
}

impl From<MixerName> for String {
    fn from(m: MixerName) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for MixerName {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for MixerName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (scheme, suffix) = lower
            .split_once('-')
            .ok_or_else(|| Error::InvalidConfig(format!("bad mixer name '{s}'")))?;
        let scheme: EncodingScheme = scheme.parse()?;
        let name = match (scheme, suffix) {
            (EncodingScheme::Binary, "h1") => Self::BinaryH1,
            (EncodingScheme::Binary, "h2") => Self::BinaryH2,
            (EncodingScheme::Binary, "h3") => Self::BinaryH3,
            (EncodingScheme::Symmetric, "h1") => Self::SymH1,
            (EncodingScheme::Symmetric, "h2") => Self::SymH2,
            (EncodingScheme::Symmetric, "h3") => Self::SymH3,
            (EncodingScheme::Symmetric, "opt") => Self::SymOpt,
            (EncodingScheme::Unary, "h1") => Self::UnaryH1,
            (EncodingScheme::Unary, "h2") => Self::UnaryH2,
            (EncodingScheme::Unary, "h3") => Self::UnaryH3,
            (_, "standard") => Self::Standard(scheme),
            _ => return Err(Error::InvalidConfig(format!("bad mixer name '{s}'"))),
        };
        Ok(name)
    }
}

/// Whether `Σ_k X_k` preserves the feasible subspace of this encoding.
pub fn standard_is_feasible(scheme: EncodingScheme, dim_d: usize) -> bool {
    match scheme {
        EncodingScheme::Symmetric => true,
        EncodingScheme::Binary => dim_d.is_power_of_two(),
        EncodingScheme::Unary => false,
    }
}

fn standard_mixer(scheme: EncodingScheme, dim_d: usize) -> Result<MixerSpec> {
    if !standard_is_feasible(scheme, dim_d) {
        return Err(Error::NameNotApplicable {
            name: MixerName::Standard(scheme).to_string(),
            detail: format!("{scheme} encoding with D={dim_d}"),
        });
    }
    let map = build_encoding(scheme, dim_d)?;
    let k = map.num_qubits;
    let mut matrix = ComplexMatrix::zeros(1 << k, 1 << k);
    for q in 0..k {
        matrix += linalg::embed(&linalg::pauli_x(), 1 << q, 1 << (k - 1 - q));
    }
    let restricted = map.isometry.adjoint() * &matrix * &map.isometry;
    let mut pairs = Vec::new();
    for d in 0..dim_d {
        for dp in d + 1..dim_d {
            let w = restricted[(d, dp)].re;
            if w.abs() > FEASIBILITY_TOL {
                pairs.push(LevelPair {
                    d,
                    d_prime: dp,
                    weight: w,
                });
            }
        }
    }
    MixerSpec::from_matrix(&map, pairs, matrix)
}

pub fn named_mixer(name: MixerName, dim_d: usize) -> Result<MixerSpec> {
    if let MixerName::Standard(scheme) = name {
        return standard_mixer(scheme, dim_d);
    }
    if dim_d != 3 {
        return Err(Error::NameNotApplicable {
            name: name.to_string(),
            detail: format!("D={dim_d}"),
        });
    }
    let map = build_encoding(name.scheme(), 3)?;
    if name == MixerName::SymOpt {
        let pairs = vec![
            LevelPair {
                d: 0,
                d_prime: 1,
                weight: 1.0,
            },
            LevelPair {
                d: 1,
                d_prime: 2,
                weight: 1.0,
            },
        ];
        return MixerSpec::from_pairs(&map, pairs);
    }
    let (d, dp) = name.d3_pair().expect("numbered mixer");
    partial_mixer(&map, d, dp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Cheapest single feasibility-preserving term.
    SingleTerm,
    /// Cheapest set of terms whose level pairs connect all D levels.
    ConnectedSet,
}

/// One candidate term: a level pair with some of its controls removed.
#[derive(Debug, Clone)]
struct Candidate {
    pairs: Vec<(usize, usize)>,
    spec: MixerSpec,
    cost: CircuitCost,
}

/// Binary partial mixers with every admissible subset of Z-controls removed.
/// Removing the control on qubit `q` also couples `(d^2^q, d'^2^q)`, which is
/// allowed only when both of those levels exist.
fn binary_candidates(map: &EncodingMap) -> Result<Vec<Candidate>> {
    let k = map.num_qubits;
    let dim = map.dim_d;
    let mut out = Vec::new();
    for d in 0..dim {
        for dp in d + 1..dim {
            let same: Vec<usize> = (0..k).filter(|q| ((d ^ dp) >> q) & 1 == 0).collect();
            for subset in 0..(1usize << same.len()) {
                let dropped: usize = same
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (subset >> i) & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | (1 << q));
                let mut covered = Vec::new();
                let mut ok = true;
                for shift in 0..(1usize << k) {
                    if shift & !dropped != 0 {
                        continue;
                    }
                    let (a, b) = (d ^ shift, dp ^ shift);
                    if a >= dim || b >= dim {
                        ok = false;
                        break;
                    }
                    covered.push((a.min(b), a.max(b)));
                }
                if !ok {
                    continue;
                }
                covered.sort_unstable();
                covered.dedup();
                let pairs = covered
                    .iter()
                    .map(|&(a, b)| LevelPair {
                        d: a,
                        d_prime: b,
                        weight: 1.0,
                    })
                    .collect();
                let spec = MixerSpec::from_pairs(map, pairs)?;
                let cost = spec.cost();
                out.push(Candidate {
                    pairs: covered,
                    spec,
                    cost,
                });
            }
        }
    }
    Ok(out)
}

fn plain_candidates(map: &EncodingMap) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for d in 0..map.dim_d {
        for dp in d + 1..map.dim_d {
            let spec = partial_mixer(map, d, dp)?;
            let cost = spec.cost();
            out.push(Candidate {
                pairs: vec![(d, dp)],
                spec,
                cost,
            });
        }
    }
    Ok(out)
}

fn cost_key(c: &CircuitCost) -> (usize, usize) {
    (c.total_cnots(), c.cnot_long_range)
}

/// Minimum-CNOT mixer for a scheme and dimension.
pub fn best_candidate_mixer(
    scheme: EncodingScheme,
    dim_d: usize,
    mode: SearchMode,
) -> Result<(MixerSpec, CircuitCost)> {
    if dim_d < 2 {
        return Err(Error::DimensionTooSmall(dim_d));
    }
    if standard_is_feasible(scheme, dim_d) {
        let spec = standard_mixer(scheme, dim_d)?;
        let cost = spec.cost();
        return Ok((spec, cost));
    }
    let map = build_encoding(scheme, dim_d)?;
    let candidates = match scheme {
        EncodingScheme::Binary => binary_candidates(&map)?,
        _ => plain_candidates(&map)?,
    };
    match mode {
        SearchMode::SingleTerm => {
            let best = candidates
                .iter()
                .min_by(|a, b| {
                    cost_key(&a.cost)
                        .cmp(&cost_key(&b.cost))
                        .then(b.pairs.len().cmp(&a.pairs.len()))
                })
                .expect("at least one level pair");
            Ok((best.spec.clone(), best.cost))
        }
        SearchMode::ConnectedSet => connected_set(&map, &candidates),
    }
}

/// Partition of the levels into connected components, as a restricted
/// growth string (component labels in order of first appearance).
type Partition = Vec<u8>;

fn canonical(labels: &[u8]) -> Partition {
    let mut remap: HashMap<u8, u8> = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = remap.len() as u8;
            *remap.entry(*l).or_insert(next)
        })
        .collect()
}

fn merge(part: &Partition, pairs: &[(usize, usize)]) -> Partition {
    let mut labels = part.clone();
    for &(a, b) in pairs {
        let (la, lb) = (labels[a], labels[b]);
        if la != lb {
            for l in labels.iter_mut() {
                if *l == lb {
                    *l = la;
                }
            }
        }
    }
    canonical(&labels)
}

#[derive(PartialEq, Eq)]
struct QueueItem {
    cost: (usize, usize),
    part: Partition,
}

impl Ord for QueueItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .cmp(&self.cost)
            .then_with(|| other.part.cmp(&self.part))
    }
}

impl PartialOrd for QueueItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over level partitions with per-term additive cost.
fn connected_set(map: &EncodingMap, candidates: &[Candidate]) -> Result<(MixerSpec, CircuitCost)> {
    let start: Partition = (0..map.dim_d as u8).collect();
    let mut best: HashMap<Partition, ((usize, usize), Vec<usize>)> = HashMap::new();
    best.insert(start.clone(), ((0, 0), Vec::new()));
    let mut heap = BinaryHeap::new();
    heap.push(QueueItem {
        cost: (0, 0),
        part: start,
    });
    let mut chosen = None;
    while let Some(QueueItem { cost, part }) = heap.pop() {
        if best.get(&part).map(|b| b.0) != Some(cost) {
            continue;
        }
        if part.iter().all(|&l| l == 0) {
            chosen = Some(best[&part].1.clone());
            break;
        }
        let used = best[&part].1.clone();
        for (i, cand) in candidates.iter().enumerate() {
            let next = merge(&part, &cand.pairs);
            if next == part {
                continue;
            }
            let c = cost_key(&cand.cost);
            let next_cost = (cost.0 + c.0, cost.1 + c.1);
            if best.get(&next).is_none_or(|b| next_cost < b.0) {
                let mut path = used.clone();
                path.push(i);
                best.insert(next.clone(), (next_cost, path));
                heap.push(QueueItem {
                    cost: next_cost,
                    part: next,
                });
            }
        }
    }
    let chosen = chosen.expect("the full pair set is connected");
    let mut weights: HashMap<(usize, usize), f64> = HashMap::new();
    for &i in &chosen {
        for &(a, b) in &candidates[i].pairs {
            *weights.entry((a, b)).or_insert(0.0) += 1.0;
        }
    }
    let mut pairs: Vec<LevelPair> = weights
        .into_iter()
        .map(|((d, d_prime), weight)| LevelPair { d, d_prime, weight })
        .collect();
    pairs.sort_by_key(|p| (p.d, p.d_prime));
    let spec = MixerSpec::from_pairs(map, pairs)?;
    let cost = spec.cost();
    Ok((spec, cost))
}

/// CNOT budget split into its three contributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetBreakdown {
    pub preparation: usize,
    pub mixer_per_layer: CircuitCost,
    pub measurement: usize,
    pub layers: usize,
}

impl BudgetBreakdown {
    pub fn total(&self) -> CircuitCost {
        let mut c = self.mixer_per_layer.times(self.layers);
        // preparation and measurement are nearest-neighbour ladders
        c.cnot_nearest += self.preparation + self.measurement;
        c
    }
}

/// Preparation, `p` mixer layers and read-out, using the single-term best
/// candidate mixer. Preparation is free for an uncorrelated mixer ground
/// state and estimated at `K` CNOTs otherwise; read-out needs `K - 1` CNOTs
/// for the symmetric encoding and none for the others.
pub fn budget_breakdown(scheme: EncodingScheme, dim_d: usize, p: usize) -> Result<BudgetBreakdown> {
    let (spec, cost) = best_candidate_mixer(scheme, dim_d, SearchMode::SingleTerm)?;
    let k = spec.num_qubits();
    let ground = mixer_ground_state(&spec.matrix)?;
    let preparation = if is_uncorrelated(&ground.state)? {
        0
    } else {
        k
    };
    let measurement = match scheme {
        EncodingScheme::Symmetric => dim_d - 2,
        _ => 0,
    };
    Ok(BudgetBreakdown {
        preparation,
        mixer_per_layer: cost,
        measurement,
        layers: p,
    })
}

pub fn cnot_budget(scheme: EncodingScheme, dim_d: usize, p: usize) -> Result<CircuitCost> {
    Ok(budget_breakdown(scheme, dim_d, p)?.total())
}

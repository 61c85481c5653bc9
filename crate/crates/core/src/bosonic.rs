//! Truncated bosonic modes, the coupled-oscillator and Bose-Hubbard
//! Hamiltonians, and the closed-form spectrum of two equal oscillators.
//!
//! Mode 0 always occupies the least significant block, both in the qudit
//! space (index `Σ n_s D^s`) and on the qubit register.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::encoding::{map_operator, qudit_site_operator, site_operator, EncodingMap, Subspace};
use crate::error::{Error, Result};
use crate::linalg::{self, herm_eig, r, ComplexMatrix, ComplexVector};
use crate::state::QuantumState;

/// Largest register `build_bh` will allocate.
pub const MAX_QUBITS: usize = 12;

/// Ladder and number operators of one mode truncated at `cutoff_nc` quanta.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMode {
    pub cutoff_nc: usize,
    pub lowering: ComplexMatrix,
    pub raising: ComplexMatrix,
    pub number: ComplexMatrix,
}

impl TruncatedMode {
    pub fn new(cutoff_nc: usize) -> Result<Self> {
        if cutoff_nc < 1 {
            return Err(Error::DimensionTooSmall(cutoff_nc + 1));
        }
        let dim = cutoff_nc + 1;
        let mut lowering = ComplexMatrix::zeros(dim, dim);
        for d in 1..dim {
            lowering[(d - 1, d)] = r((d as f64).sqrt());
        }
        let raising = lowering.adjoint();
        let number = &raising * &lowering;
        Ok(Self {
            cutoff_nc,
            lowering,
            raising,
            number,
        })
    }

    pub fn dim(&self) -> usize {
        self.cutoff_nc + 1
    }
}

/// Encoded `a`, `a†` and `n = a†a` for one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOps {
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub n: ComplexMatrix,
}

pub fn mapped_field_ops(map: &EncodingMap) -> Result<FieldOps> {
    let mode = TruncatedMode::new(map.dim_d - 1)?;
    let a = map_operator(&mode.lowering, map)?;
    let a_dag = a.adjoint();
    let n = &a_dag * &a;
    Ok(FieldOps { a, a_dag, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoParams {
    pub omega1: f64,
    pub omega2: f64,
    pub lambda: f64,
    pub cutoff_nc: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BhParams {
    pub sites_l: usize,
    pub hop_j: f64,
    pub onsite_u: f64,
    pub chem_mu: f64,
    pub cutoff_nc: usize,
}

impl BhParams {
    /// Warning text when the chemical potential is high enough that the
    /// truncation at `cutoff_nc` bosons per site is no longer justified.
    pub fn truncation_warning(&self) -> Option<String> {
        let bound = self.cutoff_nc as f64 * self.onsite_u;
        (self.onsite_u > 0.0 && self.chem_mu >= bound).then(|| {
            format!(
                "chemical potential {} is at or above N_c*U = {bound}; the truncated model is unreliable",
                self.chem_mu
            )
        })
    }
}

/// Per-mode operators placed on a multi-mode register.
struct ModeOps {
    a: Vec<ComplexMatrix>,
    n: Vec<ComplexMatrix>,
}

fn qudit_mode_ops(modes: usize, cutoff_nc: usize) -> Result<ModeOps> {
    let m = TruncatedMode::new(cutoff_nc)?;
    let dims = vec![m.dim(); modes];
    let mut a = Vec::with_capacity(modes);
    let mut n = Vec::with_capacity(modes);
    for s in 0..modes {
        a.push(qudit_site_operator(&m.lowering, s, &dims)?);
        n.push(qudit_site_operator(&m.number, s, &dims)?);
    }
    Ok(ModeOps { a, n })
}

fn encoded_mode_ops(modes: usize, map: &EncodingMap) -> Result<ModeOps> {
    let f = mapped_field_ops(map)?;
    let blocks = vec![map.num_qubits; modes];
    let mut a = Vec::with_capacity(modes);
    let mut n = Vec::with_capacity(modes);
    for s in 0..modes {
        a.push(site_operator(&f.a, s, &blocks)?);
        n.push(site_operator(&f.n, s, &blocks)?);
    }
    Ok(ModeOps { a, n })
}

fn cho_from_ops(p: &ChoParams, ops: &ModeOps) -> ComplexMatrix {
    let (a1, a2) = (&ops.a[0], &ops.a[1]);
    let hop = a1.adjoint() * a2 + a1 * a2.adjoint();
    ops.n[0].scale(p.omega1) + ops.n[1].scale(p.omega2) + hop.scale(p.lambda)
}

/// Open chain built from single-site operators; each term is assembled on
/// its own site (or site pair) and embedded, so no full-register products
/// are formed.
fn bh_from_site(p: &BhParams, a: &ComplexMatrix, n: &ComplexMatrix) -> ComplexMatrix {
    let d = a.nrows();
    let sites = p.sites_l;
    let ad = a.adjoint();
    // normal ordered a†a†aa
    let local = n.scale(-p.chem_mu) + (&ad * &ad * a * a).scale(0.5 * p.onsite_u);
    // kron(a, a†) = a_{l+1} a†_l with site l the lower block
    let pair = linalg::kron(a, &ad);
    let hop = (&pair + pair.adjoint()).scale(-p.hop_j);
    let dim = d.pow(sites as u32);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for l in 0..sites {
        h += linalg::embed(&local, d.pow(l as u32), d.pow((sites - 1 - l) as u32));
    }
    for l in 0..sites.saturating_sub(1) {
        h += linalg::embed(&hop, d.pow(l as u32), d.pow((sites - 2 - l) as u32));
    }
    h
}

/// Two-mode oscillator Hamiltonian on the `(N_c+1)^2` qudit space.
pub fn build_cho_qudit(params: &ChoParams) -> Result<ComplexMatrix> {
    Ok(cho_from_ops(params, &qudit_mode_ops(2, params.cutoff_nc)?))
}

/// Two-mode oscillator Hamiltonian on `2K` qubits; mode 1 of the model is
/// register block 0 (low qubits).
pub fn build_cho(params: &ChoParams, map: &EncodingMap) -> Result<ComplexMatrix> {
    check_cutoff(params.cutoff_nc, map)?;
    Ok(cho_from_ops(params, &encoded_mode_ops(2, map)?))
}

pub fn build_bh_qudit(params: &BhParams) -> Result<ComplexMatrix> {
    if params.sites_l < 1 {
        return Err(Error::InvalidConfig("at least one site is required".into()));
    }
    let dim = (params.cutoff_nc + 1).pow(params.sites_l as u32);
    if dim > 1 << MAX_QUBITS {
        return Err(Error::MemoryLimit {
            qubits: (dim as f64).log2().ceil() as usize,
            limit: MAX_QUBITS,
        });
    }
    let m = TruncatedMode::new(params.cutoff_nc)?;
    Ok(bh_from_site(params, &m.lowering, &m.number))
}

/// Open-chain Bose-Hubbard Hamiltonian on `L·K` qubits.
pub fn build_bh(params: &BhParams, map: &EncodingMap) -> Result<ComplexMatrix> {
    check_cutoff(params.cutoff_nc, map)?;
    if params.sites_l < 1 {
        return Err(Error::InvalidConfig("at least one site is required".into()));
    }
    let qubits = params.sites_l * map.num_qubits;
    if qubits > MAX_QUBITS {
        return Err(Error::MemoryLimit {
            qubits,
            limit: MAX_QUBITS,
        });
    }
    let f = mapped_field_ops(map)?;
    Ok(bh_from_site(params, &f.a, &f.n))
}

fn check_cutoff(cutoff_nc: usize, map: &EncodingMap) -> Result<()> {
    if cutoff_nc + 1 != map.dim_d {
        return Err(Error::DimensionMismatch {
            expected: map.dim_d,
            found: cutoff_nc + 1,
        });
    }
    Ok(())
}

/// Encoded number operator of every mode of a register.
pub fn site_number_operators(maps: &[EncodingMap]) -> Result<Vec<ComplexMatrix>> {
    let blocks: Vec<usize> = maps.iter().map(|m| m.num_qubits).collect();
    maps.iter()
        .enumerate()
        .map(|(s, m)| site_operator(&mapped_field_ops(m)?.n, s, &blocks))
        .collect()
}

/// Encoded Fock product state `|n_0⟩|n_1⟩…` (mode 0 least significant).
pub fn encoded_fock_state(maps: &[EncodingMap], levels: &[usize]) -> Result<QuantumState> {
    if maps.len() != levels.len() {
        return Err(Error::DimensionMismatch {
            expected: maps.len(),
            found: levels.len(),
        });
    }
    let mut v = ComplexVector::from_element(1, linalg::ONE);
    for (m, &d) in maps.iter().zip(levels).rev() {
        v = v.kronecker(&m.column(d)?);
    }
    QuantumState::pure(v)
}

/// Lowest eigenpair. With a subspace the search is confined to it, so
/// null vectors of an encoded operator outside the feasible space are
/// ignored.
pub fn exact_ground_state(
    h: &ComplexMatrix,
    subspace: Option<&Subspace>,
) -> Result<(f64, QuantumState)> {
    match subspace {
        None => {
            let eig = herm_eig(h)?;
            let v = eig.vectors.column(0).into_owned();
            Ok((eig.values[0], QuantumState::pure_normalized(v)?))
        }
        Some(sub) => {
            linalg::check_hermitian(h)?;
            let eig = herm_eig(&sub.restrict(h)?)?;
            let v = sub.lift_vector(&eig.vectors.column(0).into_owned())?;
            Ok((eig.values[0], QuantumState::pure_normalized(v)?))
        }
    }
}

/// The nine closed-form levels of two equal oscillators at `N_c = 2`, in the
/// order `0, 2(ω-λ), 2ω, 4ω, 2(ω+λ), ω-λ, ω+λ, 3ω-2λ, 3ω+2λ`.
pub fn cho_exact_levels(omega: f64, lambda: f64) -> [f64; 9] {
    [
        0.0,
        -2.0 * (lambda - omega),
        2.0 * omega,
        4.0 * omega,
        2.0 * (lambda + omega),
        -lambda + omega,
        lambda + omega,
        -2.0 * lambda + 3.0 * omega,
        2.0 * lambda + 3.0 * omega,
    ]
}

/// Real roots of `x^3 + a x^2 + b x + c`, ascending, when all three are
/// real and distinct (trigonometric form).
pub fn cubic_roots(a: f64, b: f64, c: f64) -> Result<[f64; 3]> {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let scale = 1.0 + a.abs() + b.abs().sqrt() + c.abs().cbrt();
    if p >= -1e-12 * scale * scale {
        return Err(Error::DegenerateCubic { gap: 0.0 });
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut roots = [0.0; 3];
    for (k, root) in roots.iter_mut().enumerate() {
        *root = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - a / 3.0;
    }
    roots.sort_by(f64::total_cmp);
    let gap = (roots[1] - roots[0]).min(roots[2] - roots[1]);
    if gap < 1e-9 {
        return Err(Error::DegenerateCubic { gap });
    }
    Ok(roots)
}

/// Roots of `q(x) = x^3 - 6ωx^2 + (12ω^2 - 4λ^2)x + 8ω(λ^2 - ω^2)`.
pub fn cho_cubic_roots(omega: f64, lambda: f64) -> Result<[f64; 3]> {
    cubic_roots(
        -6.0 * omega,
        12.0 * omega * omega - 4.0 * lambda * lambda,
        8.0 * omega * (lambda * lambda - omega * omega),
    )
}

/// Closed-form eigenpairs of two equal oscillators at `N_c = 2`, in the
/// qudit basis `3 n_2 + n_1`.
#[derive(Debug, Clone)]
pub struct ChoSpectrum {
    pub values: [f64; 9],
    /// Normalized eigenvectors; `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<DVector<f64>>,
}

impl ChoSpectrum {
    pub fn sorted_values(&self) -> [f64; 9] {
        let mut v = self.values;
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Eigenpairs from the closed forms. The three vectors of the two-quantum
/// sector take components `(f, g, 1)` on `|0,2⟩, |1,1⟩, |2,0⟩` with
/// `f = -1 + 2(ω - x/2)^2/λ^2` and `g = (x/√2 - √2ω)/λ` at the ascending
/// roots `x` of the cubic; their eigenvalues are those roots. The other six
/// vectors carry the remaining closed-form levels.
pub fn cho_exact_spectrum(omega: f64, lambda: f64) -> Result<ChoSpectrum> {
    let roots = cho_cubic_roots(omega, lambda)?;
    let s2 = std::f64::consts::SQRT_2;
    let unit = |entries: &[(usize, f64)]| {
        let mut v = DVector::<f64>::zeros(9);
        for &(i, x) in entries {
            v[i] = x;
        }
        let n = v.norm();
        v / n
    };
    let mut values = [0.0; 9];
    let mut vectors = Vec::with_capacity(9);
    let fixed: [(f64, Vec<(usize, f64)>); 6] = [
        (0.0, vec![(0, 1.0)]),
        (3.0 * omega - 2.0 * lambda, vec![(5, -1.0), (7, 1.0)]),
        (omega - lambda, vec![(1, -1.0), (3, 1.0)]),
        (4.0 * omega, vec![(8, 1.0)]),
        (omega + lambda, vec![(1, 1.0), (3, 1.0)]),
        (3.0 * omega + 2.0 * lambda, vec![(5, 1.0), (7, 1.0)]),
    ];
    for (k, (value, entries)) in fixed.iter().enumerate() {
        values[k] = *value;
        vectors.push(unit(entries));
    }
    for (l, &x) in roots.iter().enumerate() {
        let f = -1.0 + 2.0 / (lambda * lambda) * (omega - 0.5 * x).powi(2);
        let g = (-s2 * omega + x / s2) / lambda;
        values[6 + l] = x;
        vectors.push(unit(&[(2, f), (4, g), (6, 1.0)]));
    }
    Ok(ChoSpectrum { values, vectors })
}

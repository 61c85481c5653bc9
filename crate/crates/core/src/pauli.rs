//! Pauli-string decomposition and the CNOT-staircase cost model.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, r, ComplexMatrix};

/// Coefficients below this magnitude are dropped.
pub const COEFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => linalg::identity(2),
            Pauli::X => linalg::pauli_x(),
            Pauli::Y => linalg::pauli_y(),
            Pauli::Z => linalg::pauli_z(),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_letter(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn phases(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }
}

/// Real-weighted Pauli string; `letters[q]` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub coeff: f64,
    pub letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(coeff: f64, letters: Vec<Pauli>) -> Self {
        Self { coeff, letters }
    }

    /// Parse letters written most-significant qubit first, e.g. `"ZX"` is
    /// `X` on qubit 0 and `Z` on qubit 1.
    pub fn from_label(coeff: f64, label: &str) -> Result<Self> {
        let mut letters = Vec::with_capacity(label.len());
        for ch in label.chars().rev() {
            letters.push(
                Pauli::from_letter(ch)
                    .ok_or_else(|| Error::InvalidConfig(format!("bad Pauli letter '{ch}'")))?,
            );
        }
        Ok(Self { coeff, letters })
    }

    pub fn label(&self) -> String {
        self.letters.iter().rev().map(|p| p.letter()).collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Qubits with a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    fn masks(&self) -> (usize, usize, u32) {
        let mut x = 0;
        let mut z = 0;
        let mut ny = 0;
        for (q, &p) in self.letters.iter().enumerate() {
            if p.flips() {
                x |= 1 << q;
            }
            if p.phases() {
                z |= 1 << q;
            }
            if p == Pauli::Y {
                ny += 1;
            }
        }
        (x, z, ny)
    }

    /// Matrix of the bare string (coefficient not applied).
    pub fn operator(&self) -> ComplexMatrix {
        let dim = 1usize << self.letters.len();
        let (x, z, ny) = self.masks();
        let base = i_pow(ny);
        let mut m = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let sign = if (col & z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            m[(col ^ x, col)] = base * sign;
        }
        m
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.operator().scale(self.coeff)
    }
}

fn letters_from_masks(k: usize, x: usize, z: usize) -> Vec<Pauli> {
    (0..k)
        .map(|q| match ((x >> q) & 1, (z >> q) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        })
        .collect()
}

fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => r(1.0),
        1 => c(0.0, 1.0),
        2 => r(-1.0),
        _ => c(0.0, -1.0),
    }
}

/// Sum of Pauli strings with distinct letter patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    pub num_qubits: usize,
    pub terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn new(num_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        for t in &terms {
            if t.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch {
                    expected: num_qubits,
                    found: t.num_qubits(),
                });
            }
        }
        Ok(Self { num_qubits, terms })
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.num_qubits;
        let mut m = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            m += t.matrix();
        }
        m
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the string with the given label, zero if absent.
    pub fn coeff_of(&self, label: &str) -> f64 {
        self.terms
            .iter()
            .find(|t| t.label() == label)
            .map_or(0.0, |t| t.coeff)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{} * {}", t.coeff, t.label())?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (coeff, label) = line
                .split_once('*')
                .ok_or_else(|| Error::InvalidConfig(format!("bad Pauli term '{line}'")))?;
            let coeff: f64 = coeff
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad coefficient in '{line}'")))?;
            terms.push(PauliString::from_label(coeff, label.trim())?);
        }
        let k = terms.first().map_or(0, |t| t.num_qubits());
        PauliSum::new(k, terms)
    }
}

/// Decompose a Hermitian `2^K × 2^K` matrix into Pauli strings.
pub fn pauli_decompose(h: &ComplexMatrix) -> Result<PauliSum> {
    linalg::check_hermitian(h)?;
    let dim = h.nrows();
    let k = linalg::qubits_for_dim(dim).ok_or(Error::DimensionMismatch {
        expected: dim.next_power_of_two(),
        found: dim,
    })?;
    let mut terms = Vec::new();
    for x in 0..dim {
        // every string with flip mask x lives on the entries h[c, c^x]
        if (0..dim).all(|col| h[(col, col ^ x)].norm() < COEFF_TOL) {
            continue;
        }
        for z in 0..dim {
            let ny = (x & z).count_ones();
            // Tr(P h) = sum_c <c^x| P |c> h[c, c^x]
            let mut acc = Complex64::new(0.0, 0.0);
            for col in 0..dim {
                if (col & z).count_ones() % 2 == 0 {
                    acc += h[(col, col ^ x)];
                } else {
                    acc -= h[(col, col ^ x)];
                }
            }
            let coeff = (acc * i_pow(ny)).re / dim as f64;
            if coeff.abs() >= COEFF_TOL {
                terms.push(PauliString::new(coeff, letters_from_masks(k, x, z)));
            }
        }
    }
    terms.sort_by_key(|t| t.label());
    Ok(PauliSum {
        num_qubits: k,
        terms,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitCost {
    pub cnot_nearest: usize,
    pub cnot_long_range: usize,
    pub single_qubit_rotations: usize,
}

impl CircuitCost {
    pub fn total_cnots(&self) -> usize {
        self.cnot_nearest + self.cnot_long_range
    }

    pub fn times(&self, p: usize) -> Self {
        Self {
            cnot_nearest: self.cnot_nearest * p,
            cnot_long_range: self.cnot_long_range * p,
            single_qubit_rotations: self.single_qubit_rotations * p,
        }
    }
}

impl Add for CircuitCost {
    type Output = CircuitCost;

    fn add(self, o: Self) -> Self {
        Self {
            cnot_nearest: self.cnot_nearest + o.cnot_nearest,
            cnot_long_range: self.cnot_long_range + o.cnot_long_range,
            single_qubit_rotations: self.single_qubit_rotations + o.single_qubit_rotations,
        }
    }
}

impl AddAssign for CircuitCost {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Cost of one first-order Trotter step. A weight-`w` string compiles to a
/// CNOT ladder over its sorted support, its mirror, and one `Rz`.
pub fn string_cost(s: &PauliString) -> CircuitCost {
    let support = s.support();
    let mut cost = CircuitCost::default();
    if support.is_empty() {
        return cost;
    }
    cost.single_qubit_rotations = 1;
    for pair in support.windows(2) {
        if pair[1] - pair[0] > 1 {
            cost.cnot_long_range += 2;
        } else {
            cost.cnot_nearest += 2;
        }
    }
    cost
}

pub fn trotter_cost(h: &PauliSum) -> CircuitCost {
    h.terms
        .iter()
        .fold(CircuitCost::default(), |acc, t| acc + string_cost(t))
}

pub fn layered_cost(h: &PauliSum, p: usize) -> CircuitCost {
    trotter_cost(h).times(p)
}

/// Elementary gate of a compiled Trotter step.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Single { qubit: usize, matrix: ComplexMatrix },
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// Gate matrix with its qubit list, least significant gate qubit first.
    pub fn local(&self) -> (Vec<usize>, ComplexMatrix) {
        match self {
            Gate::Single { qubit, matrix } => (vec![*qubit], matrix.clone()),
            Gate::Cnot { control, target } => (vec![*control, *target], cnot_matrix()),
        }
    }
}

/// CNOT with the control on gate-local bit 0.
pub fn cnot_matrix() -> ComplexMatrix {
    linalg::real_matrix(
        4,
        4,
        &[
            1., 0., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 1., 0., 0.,
        ],
    )
}

fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    linalg::real_matrix(2, 2, &[h, h, h, -h])
}

/// `B` with `B Z B† = P` for the given letter.
fn basis_change(p: Pauli) -> Option<ComplexMatrix> {
    match p {
        Pauli::X => Some(hadamard()),
        Pauli::Y => {
            let s = ComplexMatrix::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), c(0.0, 1.0)]);
            Some(s * hadamard())
        }
        _ => None,
    }
}

/// Gate sequence for `prod_t exp(-i angle c_t P_t)` in term order.
pub fn compile_trotter_step(h: &PauliSum, angle: f64) -> Vec<Gate> {
    let mut gates = Vec::new();
    for t in &h.terms {
        let support = t.support();
        if support.is_empty() {
            continue;
        }
        let theta = angle * t.coeff;
        for &q in &support {
            if let Some(b) = basis_change(t.letters[q]) {
                gates.push(Gate::Single {
                    qubit: q,
                    matrix: b.adjoint(),
                });
            }
        }
        for pair in support.windows(2) {
            gates.push(Gate::Cnot {
                control: pair[0],
                target: pair[1],
            });
        }
        let last = *support.last().unwrap();
        let rz = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, -theta).exp(), r(0.0), r(0.0), c(0.0, theta).exp()],
        );
        gates.push(Gate::Single {
            qubit: last,
            matrix: rz,
        });
        for pair in support.windows(2).rev() {
            gates.push(Gate::Cnot {
                control: pair[0],
                target: pair[1],
            });
        }
        for &q in &support {
            if let Some(b) = basis_change(t.letters[q]) {
                gates.push(Gate::Single {
                    qubit: q,
                    matrix: b,
                });
            }
        }
    }
    gates
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_herm, max_abs};

    fn sum(k: usize, terms: &[(f64, &str)]) -> PauliSum {
        PauliSum::new(
            k,
            terms
                .iter()
                .map(|&(c, l)| PauliString::from_label(c, l).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn label_order_is_msb_first() {
        let s = PauliString::from_label(1.0, "ZX").unwrap();
        assert_eq!(s.letters, vec![Pauli::X, Pauli::Z]);
        let m = s.operator();
        let expected = linalg::kron(&linalg::pauli_z(), &linalg::pauli_x());
        assert!(max_abs(&(m - expected)) < 1e-15);
    }

    #[test]
    fn y_string_matrix() {
        let s = PauliString::from_label(1.0, "YX").unwrap();
        let expected = linalg::kron(&linalg::pauli_y(), &linalg::pauli_x());
        assert!(max_abs(&(s.operator() - expected)) < 1e-15);
    }

    #[test]
    fn decompose_single_qubit_x() {
        let d = pauli_decompose(&linalg::pauli_x()).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.terms[0].label(), "X");
        assert!((d.terms[0].coeff - 1.0).abs() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let s = sum(2, &[(0.5, "IX"), (0.5, "ZX")]);
        let text = s.to_string();
        assert_eq!(text, "0.5 * IX\n0.5 * ZX\n");
        let back: PauliSum = text.parse().unwrap();
        assert_eq!(back, s);
        assert!("0.5 * QX".parse::<PauliSum>().is_err());
    }

    #[test]
    fn staircase_costs() {
        assert_eq!(
            trotter_cost(&sum(2, &[(0.5, "IX"), (0.5, "ZX")])).total_cnots(),
            2
        );
        let u2 = sum(
            3,
            &[(0.25, "XIX"), (0.25, "YIY"), (0.25, "XZX"), (0.25, "YZY")],
        );
        let c = trotter_cost(&u2);
        assert_eq!(c.cnot_nearest, 8);
        assert_eq!(c.cnot_long_range, 4);
        let opt = sum(2, &[(0.7, "IX"), (0.7, "XI")]);
        let c = trotter_cost(&opt);
        assert_eq!(c.total_cnots(), 0);
        assert_eq!(c.single_qubit_rotations, 2);
        assert_eq!(
            layered_cost(&sum(2, &[(0.5, "IX"), (0.5, "ZX")]), 5).total_cnots(),
            10
        );
        assert_eq!(layered_cost(&opt, 50).total_cnots(), 0);
        assert_eq!(
            trotter_cost(&sum(2, &[(1.0, "II")])),
            CircuitCost::default()
        );
    }

    #[test]
    fn compiled_step_matches_exponential() {
        // Mutually commuting terms, so one Trotter step is exact.
        for (k, terms) in [
            (2, vec![(0.5, "IX"), (0.5, "ZX")]),
            (2, vec![(0.5, "XX"), (0.5, "YY")]),
            (
                3,
                vec![(0.25, "XIX"), (0.25, "YIY"), (0.25, "XZX"), (0.25, "YZY")],
            ),
            (3, vec![(0.3, "YZX")]),
        ] {
            let h = sum(k, &terms);
            let angle = 0.731;
            let exact = expm_herm(&h.to_matrix(), c(0.0, -angle)).unwrap();
            let mut u = linalg::identity(1 << k);
            for g in compile_trotter_step(&h, angle) {
                let (qs, m) = g.local();
                linalg::apply_gate_rows(&mut u, k, &qs, &m);
            }
            assert!(max_abs(&(u - exact)) < 1e-12, "{terms:?}");
        }
    }

    #[test]
    fn compiled_cnot_count_matches_cost() {
        let u2 = sum(
            3,
            &[(0.25, "XIX"), (0.25, "YIY"), (0.25, "XZX"), (0.25, "YZY")],
        );
        let n = compile_trotter_step(&u2, 0.3)
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count();
        assert_eq!(n, trotter_cost(&u2).total_cnots());
    }
}

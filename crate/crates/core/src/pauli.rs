//! Pauli strings and their action on dense operators.
//!
//! Qubit 1 is the leftmost tensor factor, i.e. the most significant bit of a
//! computational basis index. A Pauli string `P` maps `|j>` to a phase times
//! `|j ^ x_mask>`, which lets expectation values and conjugations run in
//! `O(4^n)` instead of forming `2^n x 2^n` matrices.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid_arg, Error, Result};
use crate::linalg::{CMatrix, C64, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        CMatrix::from_row_slice(2, 2, &m)
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' | '1' | '𝟙' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn digit(self) -> usize {
        self as usize
    }
}

/// A word over `{I, X, Y, Z}` labelling one Bloch coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return invalid_arg("a Pauli string needs at least one letter");
        }
        Ok(Self { letters })
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n] }
    }

    /// `n`-letter string with `letter` on the 1-based positions in `sites`.
    pub fn with_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n];
        for &(q, p) in sites {
            if q == 0 || q > n {
                return invalid_arg(format!("qubit index {q} outside 1..={n}"));
            }
            letters[q - 1] = p;
        }
        Self::new(letters)
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Position in the base-4 enumeration, qubit 1 most significant.
    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, p| acc * 4 + p.digit())
    }

    pub fn from_index(n: usize, mut idx: usize) -> Self {
        let mut letters = vec![Pauli::I; n];
        for slot in letters.iter_mut().rev() {
            *slot = Pauli::ALL[idx % 4];
            idx /= 4;
        }
        Self { letters }
    }

    /// Every string on `n` qubits in index order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n)).map(move |i| PauliString::from_index(n, i))
    }

    /// Bit masks `(x, z)`; a `Y` sets both.
    pub fn masks(&self) -> (usize, usize) {
        let n = self.letters.len();
        let mut x = 0;
        let mut z = 0;
        for (i, p) in self.letters.iter().enumerate() {
            let bit = 1 << (n - 1 - i);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit
                }
                Pauli::Z => z |= bit,
            }
        }
        (x, z)
    }

    /// Qubits (as a bitmask) carrying a non-identity letter.
    pub fn support_mask(&self) -> usize {
        let (x, z) = self.masks();
        x | z
    }

    /// Dense matrix: Kronecker product of the letters in order.
    pub fn matrix(&self) -> CMatrix {
        self.sparse().to_dense()
    }

    pub(crate) fn sparse(&self) -> SparsePauli {
        SparsePauli::new(self)
    }

    /// True iff the strings anticommute: the number of positions where both
    /// letters are non-identity and differ is odd.
    pub fn anticommutes(&self, other: &PauliString) -> Result<bool> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} letters",
                self.num_qubits(),
                other.num_qubits()
            )));
        }
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        Ok(clashes % 2 == 1)
    }

    /// Concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        PauliString { letters }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Parse(format!("bad Pauli letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(letters)
    }
}

/// Row-phase form of a Pauli string: `P[j, j ^ x] = (-i)^{#Y} (-1)^{|j & z|}`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SparsePauli {
    pub n: usize,
    pub x: usize,
    pub z: usize,
    base: C64,
}

impl SparsePauli {
    pub fn new(p: &PauliString) -> Self {
        let (x, z) = p.masks();
        let ny = (x & z).count_ones();
        let base = match ny % 4 {
            0 => ONE,
            1 => -I,
            2 => -ONE,
            _ => I,
        };
        Self { n: p.num_qubits(), x, z, base }
    }

    #[inline]
    pub fn entry(&self, row: usize) -> C64 {
        if (row & self.z).count_ones() % 2 == 1 {
            -self.base
        } else {
            self.base
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = 1 << self.n;
        let mut m = CMatrix::zeros(d, d);
        for r in 0..d {
            m[(r, r ^ self.x)] = self.entry(r);
        }
        m
    }

    /// `Tr(P m)`.
    pub fn trace_with(&self, m: &CMatrix) -> C64 {
        let d = 1 << self.n;
        let mut acc = ZERO;
        for j in 0..d {
            acc += self.entry(j) * m[(j ^ self.x, j)];
        }
        acc
    }

    /// `P m P†`.
    pub fn conjugate(&self, m: &CMatrix) -> CMatrix {
        let d = 1 << self.n;
        let phases: Vec<C64> = (0..d).map(|r| self.entry(r)).collect();
        CMatrix::from_fn(d, d, |a, b| phases[a] * m[(a ^ self.x, b ^ self.x)] * phases[b].conj())
    }
}

/// Dense matrix of a Pauli string (Kronecker product of its letters).
pub fn matrix_of(p: &PauliString) -> CMatrix {
    p.matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, max_abs_diff};
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn kron_reference(p: &PauliString) -> CMatrix {
        p.letters().iter().skip(1).fold(p.letters()[0].matrix(), |acc, l| kron(&acc, &l.matrix()))
    }

    #[test]
    fn z_is_diagonal() {
        let m = matrix_of(&ps("Z"));
        assert_eq!(m[(0, 0)], ONE);
        assert_eq!(m[(1, 1)], -ONE);
        assert_eq!(m[(0, 1)], ZERO);
    }

    #[test]
    fn identity_string() {
        assert!(max_abs_diff(&matrix_of(&ps("II")), &CMatrix::identity(4, 4)) == 0.0);
    }

    #[test]
    fn xz_entries() {
        let m = matrix_of(&ps("XZ"));
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 2)] = ONE;
        expected[(1, 3)] = -ONE;
        expected[(2, 0)] = ONE;
        expected[(3, 1)] = -ONE;
        assert_eq!(m, expected);
    }

    #[test]
    fn parse_and_display() {
        let p = ps("x1Yz");
        assert_eq!(p.to_string(), "XIYZ");
        assert_eq!(p.weight(), 3);
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn anticommutation_examples() {
        assert!(ps("X").anticommutes(&ps("Z")).unwrap());
        assert!(ps("XXII").anticommutes(&ps("XYII")).unwrap());
        assert!(!ps("XX").anticommutes(&ps("YY")).unwrap());
        assert!(ps("XX").anticommutes(&ps("X")).is_err());
    }

    #[test]
    fn anticommutes_matches_matrices_exhaustively() {
        for n in 1..=2 {
            for p in PauliString::all(n) {
                for q in PauliString::all(n) {
                    let (a, b) = (p.matrix(), q.matrix());
                    let anti = (&a * &b + &b * &a).iter().all(|z| z.norm() < 1e-14);
                    assert_eq!(anti, p.anticommutes(&q).unwrap(), "{p} {q}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn sparse_form_matches_kronecker(idx in 0usize..4096, n in 1usize..=6) {
            let p = PauliString::from_index(n, idx % (1 << (2 * n)));
            let dense = p.matrix();
            prop_assert!(max_abs_diff(&dense, &kron_reference(&p)) < 1e-15);
            prop_assert!(max_abs_diff(&(&dense * &dense), &CMatrix::identity(1 << n, 1 << n)) < 1e-14);
            prop_assert!(max_abs_diff(&dense, &dense.adjoint()) < 1e-15);
            prop_assert_eq!(PauliString::from_index(n, p.index()), p);
        }
    }
}

//! Pauli strings in symplectic (x, z) bitmask form with exact phase tracking.
//!
//! A string with masks `(x, z)` represents the operator `i^{|x & z|} X^x Z^z`,
//! so a qubit with both bits set is exactly `Y` and the implicit coefficient of
//! every [`PauliString`] is `+1`. Products carry their phase separately as a
//! power of `i` in [`PhasedPauli`].
//!
//! Qubit `q` is bit `q` of each mask. Textual form lists qubit 0 first.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register a [`PauliString`] can describe.
pub const MAX_PAULI_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis with coefficient `+1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    num_qubits: usize,
    x: u64,
    z: u64,
}

fn full_mask(num_qubits: usize) -> u64 {
    if num_qubits == 64 {
        u64::MAX
    } else {
        (1u64 << num_qubits) - 1
    }
}

impl PauliString {
    /// The identity on `num_qubits` qubits.
    pub fn identity(num_qubits: usize) -> Self {
        assert!(num_qubits <= MAX_PAULI_QUBITS, "Pauli strings support at most 64 qubits");
        Self { num_qubits, x: 0, z: 0 }
    }

    /// Build from raw masks. Bits at or above `num_qubits` must be clear.
    pub fn from_masks(num_qubits: usize, x: u64, z: u64) -> Self {
        assert!(num_qubits <= MAX_PAULI_QUBITS, "Pauli strings support at most 64 qubits");
        let mask = full_mask(num_qubits);
        assert!(x & !mask == 0 && z & !mask == 0, "mask bits outside register");
        Self { num_qubits, x, z }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set(q, l);
        }
        p
    }

    /// A single non-identity letter on `qubit`.
    pub fn single(num_qubits: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(num_qubits);
        p.set(qubit, letter);
        p
    }

    /// `first` on qubit `a` and `second` on qubit `b` (`a != b`).
    pub fn pair(num_qubits: usize, a: usize, first: Letter, b: usize, second: Letter) -> Self {
        assert_ne!(a, b);
        let mut p = Self::identity(num_qubits);
        p.set(a, first);
        p.set(b, second);
        p
    }

    /// Product of `Z` on every qubit in `qubits`.
    pub fn z_string(num_qubits: usize, qubits: &[usize]) -> Self {
        let mut p = Self::identity(num_qubits);
        for &q in qubits {
            p.set(q, Letter::Z);
        }
        p
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < self.num_qubits, "qubit {qubit} out of range");
        let bit = 1u64 << qubit;
        let (x, z) = letter.bits();
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn y_mask(&self) -> u64 {
        self.x & self.z
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        let bit = 1u64 << qubit;
        Letter::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.num_qubits).map(|q| self.letter(q))
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> {
        let mut m = self.x | self.z;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let q = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(q)
            }
        })
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn y_count(&self) -> usize {
        self.y_mask().count_ones() as usize
    }

    /// Odd-Y strings are purely imaginary matrices: they generate real
    /// rotations and have zero expectation on every real state.
    pub fn has_odd_y(&self) -> bool {
        self.y_count() % 2 == 1
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Diagonal in the computational basis (only `I`/`Z` letters).
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// Qubit-wise commutation: on every qubit the letters agree or one is `I`.
    pub fn qubit_wise_commutes(&self, other: &PauliString) -> bool {
        let both = (self.x | self.z) & (other.x | other.z);
        (self.x ^ other.x) & both == 0 && (self.z ^ other.z) & both == 0
    }

    /// Exact product `self * other` including its phase.
    pub fn mul(&self, other: &PauliString) -> PhasedPauli {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y = (x & z).count_ones() as i64;
        // X^{x1} Z^{z1} X^{x2} Z^{z2} = (-1)^{|z1 & x2|} X^{x1^x2} Z^{z1^z2}
        let swaps = (self.z & other.x).count_ones() as i64;
        let phase = (self.y_count() as i64 + other.y_count() as i64 + 2 * swaps - y).rem_euclid(4);
        PhasedPauli {
            phase: phase as u8,
            pauli: PauliString { num_qubits: self.num_qubits, x, z },
        }
    }

    /// Member of the odd-Y restricted set of weight at most `locality`.
    pub fn in_odd_y_local_set(&self, locality: usize) -> bool {
        self.has_odd_y() && self.weight() <= locality
    }

    /// Deterministic ordering key: weight, then letters from qubit 0 upward.
    pub fn sort_key(&self) -> (usize, Vec<Letter>) {
        (self.weight(), self.letters().collect())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                other => Err(Error::Config(format!("invalid Pauli letter '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.len() > MAX_PAULI_QUBITS {
            return Err(Error::CapExceeded { what: "Pauli string", n: letters.len(), cap: MAX_PAULI_QUBITS });
        }
        Ok(Self::from_letters(&letters))
    }
}

/// `i^phase * pauli`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    pub phase: u8,
    pub pauli: PauliString,
}

impl PhasedPauli {
    /// `(re, im)` of `i^phase`.
    pub fn unit(&self) -> (f64, f64) {
        match self.phase % 4 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString, MAX_PAULI_QUBITS};

/// Largest register for the complete two-local ansatz (its size grows as `2N^2 - N`).
pub const P2A_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzVariant {
    /// `{Y_i}`
    P1A,
    /// Every odd-Y string up to the locality `D` (default 2).
    P2AFull,
    /// `{Y_i} + {Z_k Y_i, i != k}`
    ReducedZY,
    /// `{Y_i} + {X_k Y_i, i != k}`
    ReducedXY,
    /// `{Y_i} + {Z_k Y_{(k+1) mod N}}`
    UniversalReduced,
}

impl AnsatzVariant {
    pub fn needs_pivot(self) -> bool {
        matches!(self, Self::ReducedZY | Self::ReducedXY)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::P1A => "p1a",
            Self::P2AFull => "p2a",
            Self::ReducedZY => "reduced-zy",
            Self::ReducedXY => "reduced-xy",
            Self::UniversalReduced => "universal",
        }
    }

    pub const ALL: [AnsatzVariant; 5] =
        [Self::P1A, Self::P2AFull, Self::ReducedZY, Self::ReducedXY, Self::UniversalReduced];
}

impl fmt::Display for AnsatzVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match key.as_str() {
            "p1a" | "linear" => Ok(Self::P1A),
            "p2a" | "p2afull" | "complete" => Ok(Self::P2AFull),
            "reducedzy" | "zy" => Ok(Self::ReducedZY),
            "reducedxy" | "xy" => Ok(Self::ReducedXY),
            "universal" | "universalreduced" => Ok(Self::UniversalReduced),
            _ => Err(Error::Config(format!("unknown ansatz variant '{s}'"))),
        }
    }
}

/// Ansatz choice for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub variant: AnsatzVariant,
    pub pivot: Option<usize>,
    /// Merge all layers into a single layer with summed coefficients.
    pub compressed: bool,
    /// Maximum generator weight for [`AnsatzVariant::P2AFull`].
    pub locality: Option<usize>,
}

impl AnsatzSpec {
    pub fn new(variant: AnsatzVariant) -> Self {
        Self { variant, pivot: None, compressed: false, locality: None }
    }

    pub fn reduced_zy(pivot: usize, compressed: bool) -> Self {
        Self { variant: AnsatzVariant::ReducedZY, pivot: Some(pivot), compressed, locality: None }
    }

    pub fn with_pivot(mut self, pivot: usize) -> Self {
        self.pivot = Some(pivot);
        self
    }

    pub fn with_compressed(mut self, compressed: bool) -> Self {
        self.compressed = compressed;
        self
    }

    pub fn locality(&self) -> usize {
        match self.variant {
            AnsatzVariant::P1A => 1,
            AnsatzVariant::P2AFull => self.locality.unwrap_or(2),
            _ => 2,
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if num_qubits == 0 || num_qubits > MAX_PAULI_QUBITS {
            return Err(Error::InvalidAnsatz(format!("unsupported register size {num_qubits}")));
        }
        if self.variant.needs_pivot() {
            match self.pivot {
                None => return Err(Error::InvalidAnsatz(format!("{} requires a pivot qubit", self.variant))),
                Some(k) if k >= num_qubits => {
                    return Err(Error::QubitOutOfRange { index: k, num_qubits })
                }
                _ => {}
            }
        }
        if self.variant == AnsatzVariant::P2AFull {
            if num_qubits > P2A_CAP {
                return Err(Error::CapExceeded { what: "complete two-local ansatz", n: num_qubits, cap: P2A_CAP });
            }
            if self.locality() == 0 {
                return Err(Error::InvalidAnsatz("locality must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// Ordered generator list; every entry has an odd number of `Y` letters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorBasis {
    num_qubits: usize,
    generators: Vec<PauliString>,
}

impl OperatorBasis {
    pub fn from_generators(num_qubits: usize, generators: Vec<PauliString>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for g in &generators {
            if g.num_qubits() != num_qubits {
                return Err(Error::DimensionMismatch { expected: num_qubits, actual: g.num_qubits() });
            }
            if !g.has_odd_y() {
                return Err(Error::InvalidAnsatz(format!("generator {g} has an even number of Y letters")));
            }
            if !seen.insert(*g) {
                return Err(Error::InvalidAnsatz(format!("duplicate generator {g}")));
            }
        }
        Ok(Self { num_qubits, generators })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn iter(&self) -> impl Iterator<Item = &PauliString> {
        self.generators.iter()
    }

    pub fn position(&self, p: &PauliString) -> Option<usize> {
        self.generators.iter().position(|g| g == p)
    }
}

pub fn all_odd_y_of_weight(n: usize, w: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    if w == 0 || w > n {
        return out;
    }
    let letters = [Letter::X, Letter::Y, Letter::Z];
    let mut support: Vec<usize> = (0..w).collect();
    loop {
        for code in 0..3usize.pow(w as u32) {
            let mut p = PauliString::identity(n);
            let mut c = code;
            for &q in &support {
                p.set(q, letters[c % 3]);
                c /= 3;
            }
            if p.has_odd_y() {
                out.push(p);
            }
        }
        // Next combination in lexicographic order.
        let Some(i) = (0..w).rev().find(|&i| support[i] < n - w + i) else {
            return out;
        };
        support[i] += 1;
        for j in i + 1..w {
            support[j] = support[j - 1] + 1;
        }
    }
}

/// Generators for `spec` on `num_qubits` qubits: all `Y_i` ascending, then the
/// multi-qubit terms.
pub fn build_operator_basis(spec: &AnsatzSpec, num_qubits: usize) -> Result<OperatorBasis> {
    spec.validate(num_qubits)?;
    let n = num_qubits;
    let mut gens: Vec<PauliString> = (0..n).map(|i| PauliString::single(n, i, Letter::Y)).collect();
    match spec.variant {
        AnsatzVariant::P1A => {}
        AnsatzVariant::ReducedZY | AnsatzVariant::ReducedXY => {
            let k = spec.pivot.expect("validated");
            let l = if spec.variant == AnsatzVariant::ReducedZY { Letter::Z } else { Letter::X };
            gens.extend((0..n).filter(|&i| i != k).map(|i| PauliString::pair(n, k, l, i, Letter::Y)));
        }
        AnsatzVariant::UniversalReduced => {
            if n >= 2 {
                let mut chain: Vec<PauliString> =
                    (0..n).map(|k| PauliString::pair(n, k, Letter::Z, (k + 1) % n, Letter::Y)).collect();
                chain.sort_by_key(|p| (p.y_mask().trailing_zeros(), p.z_mask()));
                chain.dedup();
                gens.extend(chain);
            }
        }
        AnsatzVariant::P2AFull => {
            let d = spec.locality();
            if d >= 2 {
                for l in [Letter::Z, Letter::X] {
                    for i in 0..n {
                        for j in 0..n {
                            if i != j {
                                gens.push(PauliString::pair(n, i, l, j, Letter::Y));
                            }
                        }
                    }
                }
                // Pairs of Y letters with odd count are impossible at weight 2;
                // higher weights follow in canonical order.
                for w in 3..=d.min(n) {
                    let mut extra = all_odd_y_of_weight(n, w);
                    extra.sort_by_key(|p| p.sort_key());
                    gens.extend(extra);
                }
            }
        }
    }
    OperatorBasis::from_generators(n, gens)
}

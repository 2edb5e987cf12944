//! Infection states and their complex one-hot encoding.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-node labels: 0 for innocent, `k` for infected by worm `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfectionState {
    labels: Vec<usize>,
}

impl InfectionState {
    /// Validates every label against `worm_count`.
    pub fn new(labels: Vec<usize>, worm_count: usize) -> Result<Self> {
        if let Some((node, &label)) = labels.iter().enumerate().find(|(_, &l)| l > worm_count) {
            return Err(Error::InvalidLabel {
                node,
                label,
                worms: worm_count,
            });
        }
        Ok(InfectionState { labels })
    }

    /// All nodes innocent.
    pub fn innocent(node_count: usize) -> Self {
        InfectionState {
            labels: vec![0; node_count],
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn infected_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != 0).count()
    }

    pub fn check(&self, node_count: usize, worm_count: usize) -> Result<()> {
        if self.labels.len() != node_count {
            return Err(Error::Dimension {
                expected: node_count,
                got: self.labels.len(),
            });
        }
        if let Some((node, &label)) = self
            .labels
            .iter()
            .enumerate()
            .find(|(_, &l)| l > worm_count)
        {
            return Err(Error::InvalidLabel {
                node,
                label,
                worms: worm_count,
            });
        }
        Ok(())
    }

    pub(crate) fn set(&mut self, v: usize, label: usize) {
        self.labels[v] = label;
    }
}

/// K×N complex matrix, column `v` one-hot at the infecting worm or all zero.
///
/// Stored flat with the worm fastest, so entry `(k, v)` lives at
/// `v * K + (k - 1)`. That slice is directly a network input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AllInfectionMatrix {
    worm_count: usize,
    data: Vec<Complex64>,
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl AllInfectionMatrix {
    /// Wraps raw data after checking the one-hot-or-zero invariant.
    pub fn from_vec(worm_count: usize, data: Vec<Complex64>) -> Result<Self> {
        if worm_count == 0 || data.len() % worm_count != 0 {
            return Err(Error::Size(format!(
                "{} entries do not form columns of height {worm_count}",
                data.len()
            )));
        }
        let m = AllInfectionMatrix { worm_count, data };
        for v in 0..m.node_count() {
            m.column_label(v)?;
        }
        Ok(m)
    }

    pub fn worm_count(&self) -> usize {
        self.worm_count
    }

    pub fn node_count(&self) -> usize {
        self.data.len() / self.worm_count
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// Entry for worm `k` (1-based) at node `v`.
    pub fn get(&self, k: usize, v: usize) -> Complex64 {
        self.data[v * self.worm_count + k - 1]
    }

    fn column_label(&self, v: usize) -> Result<usize> {
        column_label(&self.data[v * self.worm_count..(v + 1) * self.worm_count], v)
    }
}

fn column_label(column: &[Complex64], node: usize) -> Result<usize> {
    let mut label = 0;
    for (i, z) in column.iter().enumerate() {
        if *z == ONE {
            if label != 0 {
                return Err(Error::MalformedStatus {
                    node,
                    reason: "more than one active worm".into(),
                });
            }
            label = i + 1;
        } else if *z != ZERO {
            return Err(Error::MalformedStatus {
                node,
                reason: format!("entry {z} is neither 0 nor 1"),
            });
        }
    }
    Ok(label)
}

/// One-hot encodes `state` for `worm_count` worms.
pub fn encode_status(state: &InfectionState, worm_count: usize) -> Result<AllInfectionMatrix> {
    if worm_count == 0 {
        return Err(Error::Precondition("worm count must be positive".into()));
    }
    let mut data = vec![ZERO; state.len() * worm_count];
    for (v, &label) in state.labels().iter().enumerate() {
        if label > worm_count {
            return Err(Error::InvalidLabel {
                node: v,
                label,
                worms: worm_count,
            });
        }
        if label != 0 {
            data[v * worm_count + label - 1] = ONE;
        }
    }
    let m = AllInfectionMatrix { worm_count, data };
    debug_assert!((0..m.node_count()).all(|v| m.column_label(v).is_ok()));
    Ok(m)
}

/// Inverse of [`encode_status`].
pub fn decode_status(matrix: &AllInfectionMatrix) -> Result<InfectionState> {
    decode_slice(matrix.as_slice(), matrix.worm_count())
}

/// Decodes a raw network output vector of length `N * K`.
pub fn decode_slice(data: &[Complex64], worm_count: usize) -> Result<InfectionState> {
    if worm_count == 0 || data.len() % worm_count != 0 {
        return Err(Error::Size(format!(
            "{} entries do not form columns of height {worm_count}",
            data.len()
        )));
    }
    let labels = data
        .chunks(worm_count)
        .enumerate()
        .map(|(v, col)| column_label(col, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(InfectionState { labels })
}

/// Like [`decode_slice`] but maps malformed columns to `None`.
pub fn decode_lenient(data: &[Complex64], worm_count: usize) -> Vec<Option<usize>> {
    if worm_count == 0 {
        return Vec::new();
    }
    data.chunks(worm_count)
        .enumerate()
        .map(|(v, col)| column_label(col, v).ok())
        .collect()
}

/// Fraction of nodes whose labels differ.
pub fn node_loss(predicted: &InfectionState, truth: &InfectionState) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::Dimension {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let wrong = predicted
        .labels()
        .iter()
        .zip(truth.labels())
        .filter(|(a, b)| a != b)
        .count();
    Ok(wrong as f64 / truth.len() as f64)
}

use num_complex::Complex64;

use super::{ActivationKind, Mode};
use crate::error::{Error, Result};

/// One layer: sparse complex weights, a bias, and per-neuron activations.
///
/// Weights are kept in compressed rows with strictly increasing columns, and
/// every row is accumulated in that column order starting from zero. Hard
/// mode results therefore do not depend on anything but the stored values.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    in_dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    bias: Vec<Complex64>,
    acts: Vec<ActivationKind>,
}

impl LayerSpec {
    /// Builds a layer from per-row `(column, weight)` lists in any order.
    pub fn new(
        in_dim: usize,
        rows: Vec<Vec<(usize, Complex64)>>,
        bias: Vec<Complex64>,
        acts: Vec<ActivationKind>,
    ) -> Result<Self> {
        let out = rows.len();
        if bias.len() != out {
            return Err(Error::Dimension {
                expected: out,
                got: bias.len(),
            });
        }
        if acts.len() != out {
            return Err(Error::Dimension {
                expected: out,
                got: acts.len(),
            });
        }
        let mut row_ptr = Vec::with_capacity(out + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            for (i, &(c, w)) in row.iter().enumerate() {
                if c >= in_dim {
                    return Err(Error::Dimension {
                        expected: in_dim,
                        got: c + 1,
                    });
                }
                if i > 0 && row[i - 1].0 == c {
                    return Err(Error::Config(format!("row {r} repeats column {c}")));
                }
                cols.push(c);
                vals.push(w);
            }
            row_ptr.push(cols.len());
        }
        Self::from_csr(in_dim, row_ptr, cols, vals, bias, acts)
    }

    /// Builds a layer from raw compressed rows, validating every invariant.
    pub fn from_csr(
        in_dim: usize,
        row_ptr: Vec<usize>,
        cols: Vec<usize>,
        vals: Vec<Complex64>,
        bias: Vec<Complex64>,
        acts: Vec<ActivationKind>,
    ) -> Result<Self> {
        let out = bias.len();
        if acts.len() != out || row_ptr.len() != out + 1 {
            return Err(Error::Dimension {
                expected: out,
                got: acts.len().min(row_ptr.len().saturating_sub(1)),
            });
        }
        if cols.len() != vals.len() || row_ptr[0] != 0 || row_ptr[out] != cols.len() {
            return Err(Error::Config("inconsistent compressed row layout".into()));
        }
        for r in 0..out {
            let (a, b) = (row_ptr[r], row_ptr[r + 1]);
            if a > b {
                return Err(Error::Config(format!("row {r} has negative length")));
            }
            for e in a..b {
                if cols[e] >= in_dim {
                    return Err(Error::Dimension {
                        expected: in_dim,
                        got: cols[e] + 1,
                    });
                }
                if e > a && cols[e] <= cols[e - 1] {
                    return Err(Error::Config(format!("row {r} columns not increasing")));
                }
            }
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !vals.iter().all(finite) || !bias.iter().all(finite) {
            return Err(Error::Config("non-finite weight or bias".into()));
        }
        if !acts.iter().all(|a| a.is_finite()) {
            return Err(Error::Config("non-finite activation parameter".into()));
        }
        Ok(LayerSpec {
            in_dim,
            row_ptr,
            cols,
            vals,
            bias,
            acts,
        })
    }

    /// Dense row-major constructor; zero entries are dropped.
    pub fn from_dense(
        weights: &[Vec<Complex64>],
        bias: Vec<Complex64>,
        acts: Vec<ActivationKind>,
    ) -> Result<Self> {
        let in_dim = weights.first().map_or(0, |r| r.len());
        let rows = weights
            .iter()
            .map(|r| {
                if r.len() != in_dim {
                    return Err(Error::Dimension {
                        expected: in_dim,
                        got: r.len(),
                    });
                }
                Ok(r.iter()
                    .enumerate()
                    .filter(|(_, w)| **w != Complex64::new(0.0, 0.0))
                    .map(|(c, w)| (c, *w))
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        LayerSpec::new(in_dim, rows, bias, acts)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.bias.len()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_range(&self, row: usize) -> std::ops::Range<usize> {
        self.row_ptr[row]..self.row_ptr[row + 1]
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn vals(&self) -> &[Complex64] {
        &self.vals
    }

    pub fn bias(&self) -> &[Complex64] {
        &self.bias
    }

    pub fn activations(&self) -> &[ActivationKind] {
        &self.acts
    }

    /// Weight at `(row, col)`, zero when absent.
    pub fn weight(&self, row: usize, col: usize) -> Complex64 {
        self.entry_index(row, col)
            .map_or(Complex64::new(0.0, 0.0), |e| self.vals[e])
    }

    /// Position of `(row, col)` in the entry arrays.
    pub fn entry_index(&self, row: usize, col: usize) -> Option<usize> {
        let r = self.row_range(row);
        self.cols[r.clone()]
            .binary_search(&col)
            .ok()
            .map(|i| r.start + i)
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![Complex64::new(0.0, 0.0); self.in_dim]; self.out_dim()];
        for (r, row) in out.iter_mut().enumerate() {
            for e in self.row_range(r) {
                row[self.cols[e]] = self.vals[e];
            }
        }
        out
    }

    pub(crate) fn set_entry_re(&mut self, entry: usize, value: f64) {
        self.vals[entry].re = value;
    }

    pub(crate) fn set_entry(&mut self, entry: usize, value: Complex64) {
        self.vals[entry] = value;
    }

    pub(crate) fn set_threshold(&mut self, neuron: usize, value: f64) {
        self.acts[neuron] = ActivationKind::ThresholdGate(value);
    }

    /// Pre-activation of every neuron.
    pub fn pre_activation(&self, input: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.reserve(self.out_dim());
        for r in 0..self.out_dim() {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in self.row_range(r) {
                acc += self.vals[e] * input[self.cols[e]];
            }
            out.push(acc + self.bias[r]);
        }
    }

    /// Evaluates the layer, returning `(pre, post)`.
    pub fn eval(
        &self,
        input: &[Complex64],
        mode: Mode,
        layer: usize,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        if input.len() != self.in_dim {
            return Err(Error::Dimension {
                expected: self.in_dim,
                got: input.len(),
            });
        }
        let mut pre = Vec::new();
        self.pre_activation(input, &mut pre);
        let mut post = Vec::with_capacity(pre.len());
        for (n, (z, a)) in pre.iter().zip(&self.acts).enumerate() {
            let y = a.apply(*z, mode);
            if !(z.re.is_finite() && z.im.is_finite() && y.re.is_finite() && y.im.is_finite()) {
                return Err(Error::Numeric {
                    layer,
                    reason: format!("neuron {n} produced {z} -> {y}"),
                });
            }
            post.push(y);
        }
        Ok((pre, post))
    }
}

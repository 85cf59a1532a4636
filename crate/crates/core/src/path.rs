//! Simulated càdlàg paths on a time grid with an explicit jump ledger, and
//! ensembles of i.i.d. samples with seed provenance.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{LevyError, Result};
use crate::math;

/// A right-continuous path on a strictly increasing grid in `[0, T]`.
///
/// `values` holds the right limits at the grid times, flattened row-major
/// (`times.len() × dim`). The ledger records every retained jump `(time, Δ)`
/// at its exact (generally off-grid) time, sorted by time, no zero jumps.
#[derive(Clone, Debug)]
pub struct CadlagPath {
    pub dim: usize,
    pub horizon: f64,
    pub times: Vec<f64>,
    values: Vec<f64>,
    pub jumps: Vec<(f64, Vec<f64>)>,
}

impl CadlagPath {
    pub fn new(
        dim: usize,
        horizon: f64,
        times: Vec<f64>,
        values: Vec<f64>,
        jumps: Vec<(f64, Vec<f64>)>,
    ) -> Result<Self> {
        if values.len() != times.len() * dim {
            return Err(LevyError::DimensionMismatch {
                expected: times.len() * dim,
                got: values.len(),
            });
        }
        if times.is_empty() || times[0] != 0.0 {
            return Err(LevyError::Unsupported("grid must start at time 0"));
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(LevyError::Unsupported("grid times must strictly increase"));
            }
        }
        for w in jumps.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(LevyError::Unsupported("jump ledger must be sorted by time"));
            }
        }
        for (t, d) in &jumps {
            if *t <= 0.0 || *t > horizon {
                return Err(LevyError::Unsupported("jump time outside (0, T]"));
            }
            if math::norm(d) == 0.0 {
                return Err(LevyError::Unsupported("zero jump in ledger"));
            }
        }
        Ok(CadlagPath {
            dim,
            horizon,
            times,
            values,
            jumps,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Value (right limit) at grid index `i`.
    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn start(&self) -> &[f64] {
        self.value(0)
    }

    pub fn end(&self) -> &[f64] {
        self.value(self.len() - 1)
    }

    /// Value at the last grid time `≤ t` (grid-resolution evaluation).
    pub fn value_at(&self, t: f64) -> &[f64] {
        let idx = match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        self.value(idx.min(self.len() - 1))
    }

    /// Exact grid index of time `t`, if present.
    pub fn grid_index(&self, t: f64) -> Option<usize> {
        self.times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
            .ok()
    }

    /// Jumps with time in `(a, b]`.
    pub fn jumps_in(&self, a: f64, b: f64) -> impl Iterator<Item = &(f64, Vec<f64>)> {
        self.jumps.iter().filter(move |(t, _)| *t > a && *t <= b)
    }

    /// Sum of `f(Δ)` over ledger jumps up to time `t`.
    pub fn fold_jumps<T, F: FnMut(T, f64, &[f64]) -> T>(&self, t: f64, init: T, mut f: F) -> T {
        let mut acc = init;
        for (s, d) in &self.jumps {
            if *s > t {
                break;
            }
            acc = f(acc, *s, d);
        }
        acc
    }
}

/// How the samples of an ensemble are stored.
#[derive(Clone, Debug)]
pub enum EnsembleData {
    Paths(Vec<CadlagPath>),
    /// Endpoint values `X_t` only, flattened `n × dim`.
    Endpoints { dim: usize, t: f64, data: Vec<f64> },
}

/// I.i.d. samples with their seed provenance: sample `k` was produced by
/// `RandomSource::new(seed, stream_lo + k)`, so any sub-range can be
/// regenerated independently.
#[derive(Clone, Debug)]
pub struct Ensemble {
    pub seed: u64,
    pub stream_lo: u64,
    pub data: EnsembleData,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        match &self.data {
            EnsembleData::Paths(p) => p.len(),
            EnsembleData::Endpoints { dim, data, .. } => {
                if *dim == 0 {
                    0
                } else {
                    data.len() / dim
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match &self.data {
            EnsembleData::Paths(p) => p.first().map(|x| x.dim).unwrap_or(0),
            EnsembleData::Endpoints { dim, .. } => *dim,
        }
    }

    pub fn paths(&self) -> Result<&[CadlagPath]> {
        match &self.data {
            EnsembleData::Paths(p) if !p.is_empty() => Ok(p),
            EnsembleData::Paths(_) => Err(LevyError::EmptyEnsemble),
            _ => Err(LevyError::Unsupported("ensemble holds endpoints, not paths")),
        }
    }

    /// Endpoint of sample `k` (for path ensembles, the grid endpoint).
    pub fn endpoint(&self, k: usize) -> &[f64] {
        match &self.data {
            EnsembleData::Paths(p) => p[k].end(),
            EnsembleData::Endpoints { dim, data, .. } => &data[k * dim..(k + 1) * dim],
        }
    }

    /// Generate by mapping one stream id per sample; deterministic in
    /// `(seed, stream_lo, n)` and independent of evaluation order.
    pub fn generate_paths<F>(seed: u64, stream_lo: u64, n: usize, mut f: F) -> Result<Ensemble>
    where
        F: FnMut(&mut crate::rng::RandomSource) -> Result<CadlagPath>,
    {
        if n == 0 {
            return Err(LevyError::EmptyEnsemble);
        }
        let mut paths = Vec::with_capacity(n);
        for k in 0..n {
            let mut rng = crate::rng::RandomSource::new(seed, stream_lo + k as u64);
            paths.push(f(&mut rng)?);
        }
        Ok(Ensemble {
            seed,
            stream_lo,
            data: EnsembleData::Paths(paths),
        })
    }

    pub fn generate_endpoints<F>(
        seed: u64,
        stream_lo: u64,
        n: usize,
        dim: usize,
        t: f64,
        mut f: F,
    ) -> Result<Ensemble>
    where
        F: FnMut(&mut crate::rng::RandomSource, &mut Vec<f64>) -> Result<()>,
    {
        if n == 0 {
            return Err(LevyError::EmptyEnsemble);
        }
        let mut data = vec![0.0; 0];
        data.reserve(n * dim);
        for k in 0..n {
            let mut rng = crate::rng::RandomSource::new(seed, stream_lo + k as u64);
            f(&mut rng, &mut data)?;
        }
        if data.len() != n * dim {
            return Err(LevyError::DimensionMismatch {
                expected: n * dim,
                got: data.len(),
            });
        }
        Ok(Ensemble {
            seed,
            stream_lo,
            data: EnsembleData::Endpoints { dim, t, data },
        })
    }

    /// Assemble from chunks produced by workers over disjoint stream ranges;
    /// chunks must be passed in stream order.
    pub fn from_path_chunks(seed: u64, stream_lo: u64, chunks: Vec<Vec<CadlagPath>>) -> Ensemble {
        let mut paths = Vec::new();
        for c in chunks {
            paths.extend(c);
        }
        Ensemble {
            seed,
            stream_lo,
            data: EnsembleData::Paths(paths),
        }
    }
}

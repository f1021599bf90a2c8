//! Both samplers on a finite set `X = {x_1, …, x_M}` with the empirical
//! measure. Rejection sampling is replaced by exact categorical draws over
//! the `M` candidates, which turns the samplers into frame subsampling tools.
//!
//! A frame is a list of rows `v_1, …, v_M ∈ R^n` with `Σ v_i v_iᵀ = I`. The
//! feature vector of candidate `i` is `φ(x_i) = sqrt(M) v_i`, so that `φ` is
//! orthonormal for the empirical measure.

use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use crate::alg1::{run_algorithm1_with, Alg1Params};
use crate::alg2::{run_algorithm2_with, Alg2Params};
use crate::error::{Error, Result};
use crate::index_basis::BasisSpec;
use crate::sampling::{Draw, PointSource, TargetDensity, WeightedSample};

/// Smallest admissible eigenvalue of the frame operator before whitening.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Row count above which candidate densities are evaluated in parallel.
const PARALLEL_ROWS: usize = 2048;

/// Rows `v_i` of a decomposition of the identity, with optional labels.
#[derive(Debug, Clone)]
pub struct DiscreteFrame {
    vectors: DMatrix<f64>,
    labels: Option<Vec<String>>,
}

impl DiscreteFrame {
    /// Builds a frame from `M × n` rows. With `whiten`, rows are mapped by
    /// `S^{-1/2}` where `S = Σ v_i v_iᵀ`; without it they are taken as given.
    pub fn from_rows(rows: DMatrix<f64>, whiten: bool) -> Result<Self> {
        let (m, n) = rows.shape();
        if n == 0 {
            return Err(Error::InvalidParameter("frame vectors must be nonempty".into()));
        }
        if m < n {
            return Err(Error::RankDeficient { lambda_min: 0.0 });
        }
        let vectors = if whiten {
            let s = rows.transpose() * &rows;
            let eig = SymmetricEigen::new(s);
            let lambda_min = eig.eigenvalues.min();
            if !(lambda_min > RANK_TOLERANCE) {
                return Err(Error::RankDeficient { lambda_min });
            }
            let inv_sqrt = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
            let u = &eig.eigenvectors;
            let w = u * DMatrix::from_diagonal(&inv_sqrt) * u.transpose();
            rows * w
        } else {
            rows
        };
        Ok(Self {
            vectors,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Number of candidates `M`.
    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.nrows() == 0
    }

    /// Dimension `n` of the vectors.
    pub fn n(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `‖Σ v_i v_iᵀ - I‖_F`.
    pub fn identity_defect(&self) -> f64 {
        let n = self.n();
        (self.vectors.transpose() * &self.vectors - DMatrix::identity(n, n)).norm()
    }

    /// Feature vector `sqrt(M) v_i`.
    pub fn feature(&self, i: usize) -> DVector<f64> {
        let scale = (self.len() as f64).sqrt();
        DVector::from_iterator(self.n(), self.vectors.row(i).iter().map(|v| v * scale))
    }
}

/// Frame of the basis evaluated at `points`, whitened against the empirical Gram.
pub fn frame_from_points(basis: &BasisSpec, points: &[Vec<f64>]) -> Result<DiscreteFrame> {
    let m = points.len();
    let n = basis.len();
    if m < n {
        return Err(Error::RankDeficient { lambda_min: 0.0 });
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mut rows = DMatrix::zeros(m, n);
    for (i, x) in points.iter().enumerate() {
        let phi = basis.phi_eval(x)?;
        for j in 0..n {
            rows[(i, j)] = phi[j] * scale;
        }
    }
    DiscreteFrame::from_rows(rows, true)
}

/// Reads a frame from delimited text: one vector per line, entries separated
/// by commas and/or whitespace. Blank lines and lines starting with `#` are
/// skipped. A non-numeric first field is taken as the row label.
pub fn read_frame_file(path: &Path, whiten: bool) -> Result<DiscreteFrame> {
    let text = std::fs::read_to_string(path)?;
    parse_frame(&text, whiten)
}

pub fn parse_frame(text: &str, whiten: bool) -> Result<DiscreteFrame> {
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .peekable();
        let label = match fields.peek() {
            Some(f) if f.parse::<f64>().is_err() => fields.next().map(str::to_owned),
            _ => None,
        };
        let row: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Config {
                    line: lineno + 1,
                    message: format!("not a number: {f:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if row.is_empty() {
            return Err(Error::Config {
                line: lineno + 1,
                message: "row has no numeric entries".into(),
            });
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Config {
                    line: lineno + 1,
                    message: format!("expected {w} entries, found {}", row.len()),
                })
            }
            _ => {}
        }
        labels.push(label.unwrap_or_else(|| (labels.len() + 1).to_string()));
        data.extend(row);
    }
    let Some(n) = width else {
        return Err(Error::Config {
            line: 0,
            message: "frame file has no rows".into(),
        });
    };
    let rows = DMatrix::from_row_slice(data.len() / n, n, &data);
    DiscreteFrame::from_rows(rows, whiten)?.with_labels(labels)
}

/// Exact categorical sampling over the rows of a frame.
#[derive(Debug, Clone)]
pub struct DiscreteSource<'a> {
    frame: &'a DiscreteFrame,
    features: Vec<DVector<f64>>,
}

impl<'a> DiscreteSource<'a> {
    pub fn new(frame: &'a DiscreteFrame) -> Self {
        let features = (0..frame.len()).map(|i| frame.feature(i)).collect();
        Self { frame, features }
    }

    pub fn frame(&self) -> &'a DiscreteFrame {
        self.frame
    }

    /// Unnormalized target values at every candidate.
    pub fn densities(&self, target: &TargetDensity<'_>) -> Vec<f64> {
        if self.features.len() >= PARALLEL_ROWS {
            self.features.par_iter().map(|phi| target.eval(phi)).collect()
        } else {
            self.features.iter().map(|phi| target.eval(phi)).collect()
        }
    }

    /// Selection probabilities at every candidate.
    pub fn probabilities(&self, target: &TargetDensity<'_>) -> Result<Vec<f64>> {
        let values = self.densities(target);
        let total: f64 = values.iter().sum();
        if !(total > 0.0) {
            return Err(Error::EmptySupport { iteration: 0 });
        }
        Ok(values.into_iter().map(|v| v / total).collect())
    }
}

impl PointSource for DiscreteSource<'_> {
    type Point = usize;

    fn n(&self) -> usize {
        self.frame.n()
    }

    fn draw<R: Rng + ?Sized>(
        &self,
        target: &TargetDensity<'_>,
        rng: &mut R,
        _cap: u64,
        iteration: usize,
    ) -> Result<Draw<usize>> {
        let values = self.densities(target);
        let mut cumulative = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        for &v in &values {
            acc += v.max(0.0);
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::EmptySupport { iteration });
        }
        let u = rng.gen::<f64>() * acc;
        let idx = cumulative
            .partition_point(|&c| c <= u)
            .min(values.len() - 1);
        Ok(Draw {
            point: idx,
            phi: self.features[idx].clone(),
            density: values[idx],
            rejections: 0,
        })
    }
}

/// Sampler choice for [`subsample`].
#[derive(Debug, Clone, PartialEq)]
pub enum Algo {
    Alg1(Alg1Params),
    Alg2(Alg2Params),
}

/// Selects rows of the frame with replacement; points are row indices.
pub fn subsample(frame: &DiscreteFrame, algo: &Algo, seed: u64) -> Result<WeightedSample<usize>> {
    let source = DiscreteSource::new(frame);
    match algo {
        Algo::Alg1(p) => run_algorithm1_with(&source, p, seed),
        Algo::Alg2(p) => run_algorithm2_with(&source, p, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_basis::{LowerSet, MultiIndex};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_rows_form_a_frame() {
        let frame = DiscreteFrame::from_rows(DMatrix::identity(3, 3), false).unwrap();
        assert!(frame.identity_defect() < 1e-15);
        let whitened = DiscreteFrame::from_rows(DMatrix::identity(3, 3) * 2.0, true).unwrap();
        assert!(whitened.identity_defect() < 1e-12);
    }

    #[test]
    fn too_few_points_is_rank_deficient() {
        let set = LowerSet::new(1, (0..4).map(|k| MultiIndex::from(vec![k])).collect()).unwrap();
        let basis = BasisSpec::new(set).unwrap();
        let pts = vec![vec![0.1], vec![0.2], vec![0.3]];
        assert!(matches!(
            frame_from_points(&basis, &pts),
            Err(Error::RankDeficient { .. })
        ));
        let pts = vec![vec![0.1]; 6];
        assert!(matches!(
            frame_from_points(&basis, &pts),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn whitening_random_cloud() {
        let set = LowerSet::total_degree(2, 4).unwrap();
        let basis = BasisSpec::new(set).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<Vec<f64>> = (0..300)
            .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let frame = frame_from_points(&basis, &pts).unwrap();
        assert!(frame.identity_defect() < 1e-10);
    }

    #[test]
    fn identity_frame_interpolation() {
        let frame = DiscreteFrame::from_rows(DMatrix::identity(2, 2), false).unwrap();
        let p = Alg2Params::interpolation(2, 0.0).unwrap();
        for seed in 0..20 {
            let out = subsample(&frame, &Algo::Alg2(p.clone()), seed).unwrap();
            let a = out.final_state.gram();
            assert!(a[(0, 1)].abs() < 1e-14);
            assert!(out.lambda_min() >= p.spectral_floor(2) - 1e-9);
        }
    }

    #[test]
    fn parse_frame_with_labels_and_comments() {
        let text = "# header\nA, 1, 0\n\nB 0 1\nC,0.5,0.5\n";
        let frame = parse_frame(text, true).unwrap();
        assert_eq!(frame.len(), 3);
        assert_eq!(frame.labels().unwrap(), &["A", "B", "C"]);
        assert!(frame.identity_defect() < 1e-12);

        let err = parse_frame("1,2\n3\n", false).unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows = DMatrix::from_fn(50, 4, |_, _| rng.gen_range(-1.0..1.0));
        let frame = DiscreteFrame::from_rows(rows, true).unwrap();
        let source = DiscreteSource::new(&frame);
        let state = crate::barrier::BarrierState::new(4, -4.0);
        let density = state.effective_resistance_density(-3.5, 0.7).unwrap();
        let probs = source
            .probabilities(&TargetDensity::EffectiveResistance {
                density: &density,
                gamma_inf: 0.0,
            })
            .unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::model::FeatureVector;

/// Principal axes of a training set.
///
/// Eigenvalues are variances under the population (1/N) covariance, so the
/// mean squared reconstruction error over the training set equals the sum
/// of the discarded eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    components: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    total_variance: f64,
}

impl PcaModel {
    /// Reassembles a model, e.g. after loading it from disk.
    pub fn from_parts(
        mean: Vec<f64>,
        components: Vec<Vec<f64>>,
        eigenvalues: Vec<f64>,
        total_variance: f64,
    ) -> Result<Self> {
        if components.len() != eigenvalues.len() || components.len() > mean.len() {
            return invalid("component and eigenvalue counts disagree");
        }
        if let Some(c) = components.iter().find(|c| c.len() != mean.len()) {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                found: c.len(),
            });
        }
        Ok(Self {
            mean,
            components,
            eigenvalues,
            total_variance,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    /// Kept eigenvalues, non-increasing.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Sum of all eigenvalues of the training covariance.
    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    pub fn discarded_variance(&self) -> f64 {
        (self.total_variance - self.eigenvalues.iter().sum::<f64>()).max(0.0)
    }
}

/// Fits a PCA model keeping the `out_dim` leading components.
pub fn pca_fit(vectors: &[FeatureVector], out_dim: usize) -> Result<PcaModel> {
    if vectors.len() < 2 {
        return invalid("PCA needs at least two vectors");
    }
    let dim = vectors[0].dim();
    if let Some(v) = vectors.iter().find(|v| v.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.dim(),
        });
    }
    if out_dim == 0 || out_dim > dim {
        return invalid(format!("output dimension {out_dim} must be in 1..={dim}"));
    }

    let n = vectors.len() as f64;
    let mut mean = vec![0.0; dim];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v.as_slice()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    let mut centered = vec![0.0; dim];
    for v in vectors {
        for (c, (x, m)) in centered.iter_mut().zip(v.as_slice().iter().zip(&mean)) {
            *c = x - m;
        }
        for i in 0..dim {
            let ci = centered[i];
            if ci == 0.0 {
                continue;
            }
            for j in i..dim {
                cov[(i, j)] += ci * centered[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov[(i, j)] / n;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    let total_variance = cov.trace();

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = Vec::with_capacity(out_dim);
    let mut eigenvalues = Vec::with_capacity(out_dim);
    for &k in order.iter().take(out_dim) {
        let mut axis: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        // Sign convention: the largest-magnitude coordinate is positive.
        let pivot = axis
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .map_or(0.0, |(_, v)| v);
        if pivot < 0.0 {
            axis.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(axis);
        eigenvalues.push(eig.eigenvalues[k].max(0.0));
    }

    Ok(PcaModel {
        mean,
        components,
        eigenvalues,
        total_variance,
    })
}

/// Coordinates of `v - mean` in the component basis.
pub fn pca_project(model: &PcaModel, v: &FeatureVector) -> Result<FeatureVector> {
    if v.dim() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            found: v.dim(),
        });
    }
    let coords = model
        .components
        .iter()
        .map(|axis| {
            axis.iter()
                .zip(v.as_slice().iter().zip(&model.mean))
                .map(|(a, (x, m))| a * (x - m))
                .sum()
        })
        .collect();
    FeatureVector::new(coords)
}

/// Maps reduced coordinates back into the input space.
pub fn pca_reconstruct(model: &PcaModel, coords: &FeatureVector) -> Result<FeatureVector> {
    if coords.dim() != model.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.output_dim(),
            found: coords.dim(),
        });
    }
    let mut out = model.mean.clone();
    for (axis, &w) in model.components.iter().zip(coords.as_slice()) {
        for (o, a) in out.iter_mut().zip(axis) {
            *o += w * a;
        }
    }
    FeatureVector::new(out)
}

/// Fraction of the training variance captured by the kept components.
pub fn energy_retained(model: &PcaModel) -> f64 {
    if model.total_variance <= 0.0 {
        return 1.0;
    }
    (model.eigenvalues.iter().sum::<f64>() / model.total_variance).clamp(0.0, 1.0)
}

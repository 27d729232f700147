use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Low-dimensional spectral coordinates of the detectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    /// `k x m`; column `c` is the eigenvector of the `(c+2)`-th smallest
    /// Laplacian eigenvalue.
    pub coordinates: DMatrix<f64>,
    /// The `m + 1` smallest Laplacian eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
}

impl SpectralEmbedding {
    pub fn dim(&self) -> usize {
        self.coordinates.ncols()
    }
}

fn check_symmetric(w: &DMatrix<f64>) -> Result<()> {
    if w.nrows() != w.ncols() {
        return Err(Error::InvalidInput(format!(
            "similarity matrix is {} x {}",
            w.nrows(),
            w.ncols()
        )));
    }
    let k = w.nrows();
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (w[(i, j)], w[(j, i)]);
            if !a.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite entry at ({i}, {j})"
                )));
            }
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::NotSymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// Nonnegative affinities: when an off-diagonal entry is negative, every
/// off-diagonal entry is shifted up by the most negative one.
pub fn affinity(w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(w)?;
    let k = w.nrows();
    let mut min_off = f64::INFINITY;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                min_off = min_off.min(w[(i, j)]);
            }
        }
    }
    let mut a = w.clone();
    if min_off < 0.0 {
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    a[(i, j)] -= min_off;
                }
            }
        }
    }
    Ok(a)
}

/// Unnormalized graph Laplacian `L = D - A` of the shifted affinities.
pub fn laplacian(w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let a = affinity(w)?;
    let k = a.nrows();
    let mut l = -a.clone();
    for i in 0..k {
        let off: f64 = (0..k).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
        l[(i, i)] = off;
    }
    Ok(l)
}

/// Spectral embedding of a raw symmetric similarity matrix.
///
/// The constant vector spans the null direction of `L`; the returned
/// coordinates are the next `dim` eigenvectors, made orthogonal to it (which
/// matters only when the graph is disconnected and the zero eigenvalue
/// repeats), unit-normed, with the first nonzero entry positive.
pub fn spectral_embed_matrix(w: &DMatrix<f64>, dim: usize) -> Result<SpectralEmbedding> {
    let l = laplacian(w)?;
    let k = l.nrows();
    if dim == 0 || k < dim + 1 {
        return Err(Error::InvalidParameter(format!(
            "embedding dimension {dim} needs at least {} detectors, have {k}",
            dim + 1
        )));
    }
    let eig = SymmetricEigen::new(l);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut basis: Vec<DVector<f64>> = vec![DVector::from_element(k, 1.0 / (k as f64).sqrt())];
    for &idx in &order {
        if basis.len() == dim + 1 {
            break;
        }
        let mut v = eig.eigenvectors.column(idx).into_owned();
        for b in &basis {
            let p = b.dot(&v);
            v -= b * p;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    if basis.len() < dim + 1 {
        return Err(Error::Numerical("eigenvector basis collapsed".into()));
    }

    let mut coordinates = DMatrix::zeros(k, dim);
    for (c, v) in basis.iter().skip(1).enumerate() {
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-10)
            .map_or(1.0, |x| x.signum());
        coordinates.set_column(c, &(v * sign));
    }
    let eigenvalues = order[..dim + 1]
        .iter()
        .map(|&i| eig.eigenvalues[i])
        .collect();
    Ok(SpectralEmbedding {
        coordinates,
        eigenvalues,
    })
}

/// Spectral embedding of a similarity matrix.
pub fn spectral_embed(w: &SimilarityMatrix, dim: usize) -> Result<SpectralEmbedding> {
    spectral_embed_matrix(&w.values, dim)
}

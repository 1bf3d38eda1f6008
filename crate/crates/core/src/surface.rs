//! Planar surface geometry, Jakes spatial correlation and port selection.
//!
//! Elements are indexed row-major: element `i` sits in column `i mod m_x`
//! and row `i / m_x`, with index 0 at the origin corner.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::bessel_j0;

/// Relative eigenvalue floor below which a matrix is treated as genuinely
/// indefinite rather than numerically noisy.
pub const PSD_CLAMP_TOLERANCE: f64 = 1e-8;

/// Uniform `m_x × m_z` grid of ports spread over a `w_x λ × w_z λ` aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGeometry {
    m_x: usize,
    m_z: usize,
    w_x: f64,
    w_z: f64,
    wavelength: f64,
}

impl SurfaceGeometry {
    pub fn new(m_x: usize, m_z: usize, w_x: f64, w_z: f64, wavelength: f64) -> Result<Self> {
        if m_x == 0 || m_z == 0 {
            return Err(Error::domain(format!(
                "surface grid must have at least one element per axis, got {m_x}x{m_z}"
            )));
        }
        for (name, v) in [("w_x", w_x), ("w_z", w_z), ("wavelength", wavelength)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(SurfaceGeometry {
            m_x,
            m_z,
            w_x,
            w_z,
            wavelength,
        })
    }

    pub fn m_x(&self) -> usize {
        self.m_x
    }

    pub fn m_z(&self) -> usize {
        self.m_z
    }

    pub fn w_x(&self) -> f64 {
        self.w_x
    }

    pub fn w_z(&self) -> f64 {
        self.w_z
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Total number of ports `M = m_x · m_z`.
    pub fn len(&self) -> usize {
        self.m_x * self.m_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Horizontal spacing `d_x = w_x λ / m_x` in meters.
    pub fn spacing_x(&self) -> f64 {
        self.w_x * self.wavelength / self.m_x as f64
    }

    /// Vertical spacing `d_z = w_z λ / m_z` in meters.
    pub fn spacing_z(&self) -> f64 {
        self.w_z * self.wavelength / self.m_z as f64
    }

    /// A fully populated surface of `elements` ports over the same aperture.
    ///
    /// The grid factorization is the one whose aspect ratio is closest to
    /// the aperture's, so square apertures get square grids whenever
    /// `elements` is a perfect square.
    pub fn same_aperture(&self, elements: usize) -> Result<SurfaceGeometry> {
        if elements == 0 {
            return Err(Error::domain("surface needs at least one element"));
        }
        let target = (self.w_x / self.w_z).ln();
        let (kx, kz) = (1..=elements)
            .filter(|kx| elements % kx == 0)
            .map(|kx| (kx, elements / kx))
            .min_by(|a, b| {
                let da = ((a.0 as f64 / a.1 as f64).ln() - target).abs();
                let db = ((b.0 as f64 / b.1 as f64).ln() - target).abs();
                da.total_cmp(&db)
            })
            .expect("elements >= 1 has at least one factorization");
        SurfaceGeometry::new(kx, kz, self.w_x, self.w_z, self.wavelength)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::domain(format!(
                "element index {i} out of range for {} elements",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Euclidean distance in meters between elements `i` and `j`.
pub fn inter_element_distance(geom: &SurfaceGeometry, i: usize, j: usize) -> Result<f64> {
    geom.check_index(i)?;
    geom.check_index(j)?;
    Ok(distance_unchecked(geom, i, j))
}

fn distance_unchecked(geom: &SurfaceGeometry, i: usize, j: usize) -> f64 {
    let dcol = (i % geom.m_x) as f64 - (j % geom.m_x) as f64;
    let drow = (i / geom.m_x) as f64 - (j / geom.m_x) as f64;
    let dx = geom.spacing_x() * dcol;
    let dz = geom.spacing_z() * drow;
    (dx * dx + dz * dz).sqrt()
}

/// Symmetric correlation matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(DMatrix<f64>);

impl CorrelationMatrix {
    /// Wraps an arbitrary matrix after checking it is square, symmetric, has
    /// a unit diagonal and entries in `[-1, 1]`.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::domain(format!(
                "correlation matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        for i in 0..n {
            if m[(i, i)] != 1.0 {
                return Err(Error::domain(format!("diagonal entry {i} is {}, expected 1", m[(i, i)])));
            }
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::domain(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
                if !(m[(i, j)].abs() <= 1.0) {
                    return Err(Error::domain(format!("entry ({i},{j}) = {} outside [-1, 1]", m[(i, j)])));
                }
            }
        }
        Ok(CorrelationMatrix(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Smallest eigenvalue, before any clamping.
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.0.clone()).eigenvalues.min()
    }
}

/// Jakes correlation `J0(2π d_ij / λ)` between every pair of ports.
pub fn correlation_matrix(geom: &SurfaceGeometry) -> Result<CorrelationMatrix> {
    let n = geom.len();
    let k = 2.0 * PI / geom.wavelength;
    let mut m = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mu = bessel_j0(k * distance_unchecked(geom, i, j))?;
            m[(i, j)] = mu;
            m[(j, i)] = mu;
        }
    }
    Ok(CorrelationMatrix(m))
}

/// Symmetric square root `Q diag(sqrt(max(λ, 0))) Qᵀ` of a symmetric
/// positive semidefinite matrix.
///
/// Eigenvalues below `-PSD_CLAMP_TOLERANCE · λ_max` are rejected; smaller
/// negative ones are clamped to zero.
pub fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::NotPsd(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let scale = m.amax();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::NotPsd(format!("asymmetric at ({i},{j})")));
            }
        }
    }
    if n == 0 {
        return Ok(m.clone());
    }
    let eig = SymmetricEigen::new(m.clone());
    let lambda_max = eig.eigenvalues.max();
    let lambda_min = eig.eigenvalues.min();
    if lambda_min < -PSD_CLAMP_TOLERANCE * lambda_max.max(0.0) {
        return Err(Error::NotPsd(format!(
            "eigenvalue {lambda_min:e} below tolerance (largest {lambda_max:e})"
        )));
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let q = &eig.eigenvectors;
    let scaled = q * DMatrix::from_diagonal(&roots);
    let mut root = scaled * q.transpose();
    // symmetrize away rounding
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (root[(i, j)] + root[(j, i)]);
            root[(i, j)] = avg;
            root[(j, i)] = avg;
        }
    }
    Ok(root)
}

/// Active ports, stored as strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PortSelection(Vec<usize>);

impl PortSelection {
    /// Builds a selection from indices in any order; duplicates are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("duplicate port index {}", w[0])));
        }
        Ok(PortSelection(indices))
    }

    /// Every port of an `m`-element surface.
    pub fn all(m: usize) -> Self {
        PortSelection((0..m).collect())
    }

    /// Deterministic preset of `m_o` ports spread over the grid.
    ///
    /// When `m_o = k_x · k_z` with `k_x | m_x` and `k_z | m_z`, the preset is
    /// the strided sub-grid starting at port 0, which places the ports on
    /// exactly the positions of a fully populated `k_x × k_z` surface over
    /// the same aperture. Otherwise the indices are spaced evenly in
    /// row-major order.
    pub fn fixed_preset(geom: &SurfaceGeometry, m_o: usize) -> Result<Self> {
        let m = geom.len();
        if m_o == 0 || m_o > m {
            return Err(Error::domain(format!("cannot select {m_o} of {m} ports")));
        }
        let target = (geom.w_x / geom.w_z).ln();
        let grid = (1..=m_o)
            .filter(|kx| m_o % kx == 0)
            .map(|kx| (kx, m_o / kx))
            .filter(|&(kx, kz)| geom.m_x % kx == 0 && geom.m_z % kz == 0)
            .min_by(|a, b| {
                let da = ((a.0 as f64 / a.1 as f64).ln() - target).abs();
                let db = ((b.0 as f64 / b.1 as f64).ln() - target).abs();
                da.total_cmp(&db)
            });
        let indices = match grid {
            Some((kx, kz)) => {
                let (sx, sz) = (geom.m_x / kx, geom.m_z / kz);
                (0..kz)
                    .flat_map(|r| (0..kx).map(move |c| r * sz * geom.m_x + c * sx))
                    .collect()
            }
            None => (0..m_o).map(|i| i * m / m_o).collect(),
        };
        PortSelection::new(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Principal submatrix of `j` at the selected ports.
pub fn reduce(j: &CorrelationMatrix, sel: &PortSelection) -> Result<CorrelationMatrix> {
    let n = j.dim();
    if let Some(&bad) = sel.0.iter().find(|&&i| i >= n) {
        return Err(Error::domain(format!("port {bad} out of range for dimension {n}")));
    }
    let idx = &sel.0;
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| j.0[(idx[r], idx[c])]);
    Ok(CorrelationMatrix(sub))
}

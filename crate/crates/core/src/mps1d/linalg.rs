//! Dense kernels for the MPS code. Tensors are stored as nalgebra matrices;
//! products and SVDs go through faer, whose complex kernels are an order of
//! magnitude faster at the bond dimensions used here.

use faer::MatRef;
use nalgebra::DMatrix;
use num_complex::Complex64 as C;

pub(crate) type Mat = DMatrix<C>;

fn view(a: &Mat) -> MatRef<'_, C> {
    MatRef::from_column_major_slice(a.as_slice(), a.nrows(), a.ncols())
}

fn back(m: MatRef<'_, C>) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub(crate) fn mul(a: &Mat, b: &Mat) -> Mat {
    if a.nrows() * a.ncols() * b.ncols() < 512 {
        return a * b;
    }
    back((view(a) * view(b)).as_ref())
}

/// a† b
pub(crate) fn mul_ad(a: &Mat, b: &Mat) -> Mat {
    if a.nrows() * a.ncols() * b.ncols() < 512 {
        return a.adjoint() * b;
    }
    back((view(a).adjoint() * view(b)).as_ref())
}

pub(crate) fn zeros(r: usize, c: usize) -> Mat {
    Mat::zeros(r, c)
}

pub(crate) fn axpy_mat(y: &mut Mat, a: C, x: &Mat) {
    y.zip_apply(x, |u, v| *u += a * v);
}

/// Thin SVD a = u·diag(s)·vt with s descending.
pub(crate) struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub vt: Mat,
}

pub(crate) fn svd(a: &Mat) -> Svd {
    let f = view(a).thin_svd().expect("SVD of a finite matrix");
    let s: Vec<f64> = (0..f.S().dim()).map(|k| f.S().column_vector()[k].re).collect();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&x, &y| s[y].total_cmp(&s[x]));
    let (u, v) = (f.U(), f.V());
    Svd {
        u: Mat::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]),
        s: order.iter().map(|&k| s[k]).collect(),
        vt: Mat::from_fn(order.len(), v.nrows(), |i, j| v[(j, order[i])].conj()),
    }
}

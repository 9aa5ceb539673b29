//! Finite-dimensional subspace arithmetic.
//!
//! A [`Subspace`] of R^N is stored as an N x d matrix with orthonormal
//! columns; d = 0 encodes the zero subspace. All operations are pure and
//! deterministic given input order.

use nalgebra::DMatrix;

use crate::error::input;
use crate::linalg;
use crate::{Error, Result};

/// Column vector in R^N.
pub type Vector = nalgebra::DVector<f64>;

/// Relative rank tolerance used by orthogonalization and intersection.
///
/// Double precision leaves ample headroom for ambient dimensions up to a few
/// thousand. For angle-based decisions the tolerance applies to cosines:
/// a principal direction counts as shared when 1 - cos(theta) <= tol.
pub const RANK_TOL: f64 = 1e-10;

/// Allowed deviation of basis^T basis from the identity.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Principal angle data for a pair of subspaces.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct AngleProfile {
    /// Nondecreasing angles in [0, pi/2], one per min(d1, d2).
    pub principal_angles: Vec<f64>,
    /// Cosine of the smallest principal angle strictly exceeding the rank
    /// tolerance, or 0 when every angle is either shared or absent.
    pub friedrichs_cos: f64,
    /// Number of principal directions counted as shared.
    pub dim_intersection: usize,
}

/// Closed subspace of R^N represented by an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    /// N x d, orthonormal columns; d = 0 for the zero subspace.
    basis: DMatrix<f64>,
}

impl Subspace {
    /// The zero subspace {0}.
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// All of R^N.
    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Wrap an already-orthonormal basis, validating the invariants.
    pub fn from_basis(basis: DMatrix<f64>) -> Result<Self> {
        let s = Subspace {
            ambient_dim: basis.nrows(),
            basis,
        };
        s.check_invariants()?;
        Ok(s)
    }

    pub(crate) fn from_basis_unchecked(basis: DMatrix<f64>) -> Self {
        let s = Subspace {
            ambient_dim: basis.nrows(),
            basis,
        };
        debug_assert!(s.check_invariants().is_ok());
        s
    }

    /// Orthonormal span of the given vectors (modified Gram-Schmidt with one
    /// reorthogonalization pass). Directions whose residual is at most
    /// `tol * max input norm` are dropped; the result is deterministic in
    /// input order.
    pub fn span(vectors: &[Vector], tol: f64) -> Result<Self> {
        if tol <= 0.0 {
            return Err(input("span: tolerance must be positive"));
        }
        let ambient_dim = match vectors.first() {
            Some(v) => v.len(),
            None => return Err(input("span: no vectors given; ambient dim unknown")),
        };
        if ambient_dim == 0 {
            return Err(input("span: ambient dimension must be positive"));
        }
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(input(format!(
                    "span: mixed ambient dims {} and {}",
                    ambient_dim,
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(input("span: non-finite entry"));
            }
        }
        let max_norm = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max_norm == 0.0 {
            return Ok(Subspace::zero(ambient_dim));
        }
        let threshold = tol * max_norm;
        let mut columns: Vec<Vector> = Vec::new();
        for v in vectors {
            let mut r = v.clone();
            for _ in 0..2 {
                for b in &columns {
                    let c = b.dot(&r);
                    r.axpy(-c, b, 1.0);
                }
            }
            let n = r.norm();
            if n > threshold {
                columns.push(r / n);
            }
        }
        Ok(Subspace::from_basis_unchecked(columns_to_matrix(
            ambient_dim,
            &columns,
        )))
    }

    /// Line spanned by a single nonzero vector.
    pub fn line(direction: &Vector) -> Result<Self> {
        let n = direction.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(input("line: direction must be nonzero and finite"));
        }
        Ok(Subspace::from_basis_unchecked(columns_to_matrix(
            direction.len(),
            &[direction / n],
        )))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Verify basis^T basis = I within [`ORTHONORMALITY_TOL`] and d <= N.
    pub fn check_invariants(&self) -> Result<()> {
        if self.basis.nrows() != self.ambient_dim {
            return Err(input("subspace: basis rows != ambient dim"));
        }
        if self.dim() > self.ambient_dim {
            return Err(input("subspace: dimension exceeds ambient dimension"));
        }
        if self.basis.iter().any(|x| !x.is_finite()) {
            return Err(input("subspace: non-finite basis entry"));
        }
        let gram = self.basis.transpose() * &self.basis;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expect).abs() > ORTHONORMALITY_TOL {
                    return Err(input(format!(
                        "subspace: basis not orthonormal at ({i},{j}): {}",
                        gram[(i, j)]
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_vector(&self, x: &Vector) -> Result<()> {
        if x.len() != self.ambient_dim {
            return Err(input(format!(
                "ambient dim mismatch: subspace {}, vector {}",
                self.ambient_dim,
                x.len()
            )));
        }
        Ok(())
    }

    /// Orthogonal projection of `x` onto this subspace.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.check_vector(x)?;
        Ok(self.project_unchecked(x))
    }

    #[inline]
    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        if self.is_zero() {
            return Vector::zeros(self.ambient_dim);
        }
        &self.basis * (self.basis.tr_mul(x))
    }

    /// Distance from `x` to its nearest point in the subspace.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        self.check_vector(x)?;
        Ok((x - self.project_unchecked(x)).norm())
    }

    /// Whether `x` lies in the subspace within `tol * |x|`.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        match self.distance(x) {
            Ok(d) => d <= tol * x.norm().max(1.0),
            Err(_) => false,
        }
    }

    /// Closed linear span of the union of the two subspaces.
    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient_dim != other.ambient_dim {
            return Err(input("join: ambient dims differ"));
        }
        let mut vectors: Vec<Vector> = Vec::with_capacity(self.dim() + other.dim());
        for c in self.basis.column_iter() {
            vectors.push(c.into());
        }
        for c in other.basis.column_iter() {
            vectors.push(c.into());
        }
        if vectors.is_empty() {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        Subspace::span(&vectors, RANK_TOL)
    }

    /// Orthogonal complement.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient_dim;
        if self.is_zero() {
            return Subspace::full(n);
        }
        if self.dim() == n {
            return Subspace::zero(n);
        }
        let mut columns: Vec<Vector> = Vec::with_capacity(n - self.dim());
        for j in 0..n {
            let mut r = Vector::zeros(n);
            r[j] = 1.0;
            for _ in 0..2 {
                for b in self.basis.column_iter() {
                    let c = b.dot(&r);
                    r.axpy(-c, &b.into_owned(), 1.0);
                }
                for b in &columns {
                    let c = b.dot(&r);
                    r.axpy(-c, b, 1.0);
                }
            }
            let norm = r.norm();
            if norm > RANK_TOL {
                columns.push(r / norm);
            }
        }
        Subspace::from_basis_unchecked(columns_to_matrix(n, &columns))
    }

    /// Intersection via principal-vector thresholding: directions whose
    /// principal cosine is within `tol` of 1 are kept.
    pub fn intersect(&self, other: &Subspace, tol: f64) -> Result<Subspace> {
        if self.ambient_dim != other.ambient_dim {
            return Err(input("intersect: ambient dims differ"));
        }
        if tol <= 0.0 {
            return Err(input("intersect: tolerance must be positive"));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        let m = self.basis.tr_mul(&other.basis);
        let svd = m.svd(true, false);
        let u = svd.u.as_ref().expect("svd with u");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .partial_cmp(&svd.singular_values[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut vectors: Vec<Vector> = Vec::new();
        for &i in &order {
            if 1.0 - svd.singular_values[i] <= tol {
                vectors.push(&self.basis * Vector::from(u.column(i)));
            }
        }
        if vectors.is_empty() {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        Subspace::span(&vectors, RANK_TOL)
    }

    /// Principal angles between two nonzero subspaces, nondecreasing.
    pub fn principal_angles(&self, other: &Subspace, tol: f64) -> Result<AngleProfile> {
        if self.ambient_dim != other.ambient_dim {
            return Err(input("principal_angles: ambient dims differ"));
        }
        if self.is_zero() || other.is_zero() {
            return Err(Error::EmptySubspace(
                "principal_angles: zero subspace".into(),
            ));
        }
        let m = self.basis.tr_mul(&other.basis);
        let mut cosines = linalg::singular_values_desc(&m);
        for c in cosines.iter_mut() {
            *c = c.clamp(0.0, 1.0);
        }
        let dim_intersection = cosines.iter().filter(|&&c| 1.0 - c <= tol).count();
        let friedrichs_cos = cosines
            .iter()
            .cloned()
            .find(|&c| 1.0 - c > tol)
            .unwrap_or(0.0);
        let principal_angles: Vec<f64> = cosines.iter().map(|c| c.acos()).collect();
        Ok(AngleProfile {
            principal_angles,
            friedrichs_cos,
            dim_intersection,
        })
    }

    /// Dense N x N projection matrix.
    pub fn projector(&self) -> DMatrix<f64> {
        if self.is_zero() {
            return DMatrix::zeros(self.ambient_dim, self.ambient_dim);
        }
        &self.basis * self.basis.transpose()
    }

    /// Intersection of a family, folded left to right.
    pub fn intersect_all(subspaces: &[Subspace], tol: f64) -> Result<Subspace> {
        let first = subspaces
            .first()
            .ok_or_else(|| input("intersect_all: empty family"))?;
        let mut acc = first.clone();
        for s in &subspaces[1..] {
            acc = acc.intersect(s, tol)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }
}

fn columns_to_matrix(ambient_dim: usize, columns: &[Vector]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(ambient_dim, columns.len());
    for (j, c) in columns.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Standard basis vector e_i (0-based) in R^n.
pub fn basis_vector(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

/// Plain-text serialization: header "N d", then N rows of d decimals with
/// 17 significant digits.
pub fn write_text(s: &Subspace, w: &mut impl std::io::Write) -> Result<()> {
    writeln!(w, "{} {}", s.ambient_dim(), s.dim())?;
    for i in 0..s.ambient_dim() {
        let row: Vec<String> = (0..s.dim())
            .map(|j| format!("{:.16e}", s.basis()[(i, j)]))
            .collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Parse the plain-text format written by [`write_text`].
pub fn read_text(r: &mut impl std::io::BufRead) -> Result<Subspace> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| input("subspace text: bad header"))?;
    let d: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| input("subspace text: bad header"))?;
    let mut basis = DMatrix::zeros(n, d);
    for i in 0..n {
        let mut line = String::new();
        r.read_line(&mut line)?;
        let entries: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| input(format!("subspace text: row {i}: {e}")))?;
        if entries.len() != d {
            return Err(input(format!(
                "subspace text: row {i} has {} entries, expected {d}",
                entries.len()
            )));
        }
        for (j, x) in entries.iter().enumerate() {
            basis[(i, j)] = *x;
        }
    }
    Subspace::from_basis(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vector {
        basis_vector(n, i)
    }

    #[test]
    fn span_drops_duplicate_directions() {
        let s = Subspace::span(&[e(3, 0), e(3, 0)], 1e-10).unwrap();
        assert_eq!(s.dim(), 1);
        assert!((s.basis()[(0, 0)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn span_normalizes() {
        let s = Subspace::span(&[e(2, 0) + e(2, 1)], 1e-10).unwrap();
        assert_eq!(s.dim(), 1);
        let c = 1.0 / 2.0_f64.sqrt();
        assert!((s.basis()[(0, 0)] - c).abs() < 1e-12);
        assert!((s.basis()[(1, 0)] - c).abs() < 1e-12);
    }

    #[test]
    fn span_detects_linear_dependence() {
        let s = Subspace::span(&[e(3, 0), e(3, 1), e(3, 0) + e(3, 1)], 1e-10).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn span_rejects_mixed_dims() {
        let err = Subspace::span(&[e(3, 0), e(2, 0)], 1e-10).unwrap_err();
        assert_eq!(err.code(), "INPUT_ERROR");
    }

    #[test]
    fn project_onto_axis() {
        let s = Subspace::span(&[e(2, 0)], 1e-10).unwrap();
        let p = s.project(&Vector::from_vec(vec![3.0, 4.0])).unwrap();
        assert!((p - Vector::from_vec(vec![3.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn project_onto_diagonal() {
        let s = Subspace::span(&[e(2, 0) + e(2, 1)], 1e-10).unwrap();
        let p = s.project(&e(2, 0)).unwrap();
        assert!((p - Vector::from_vec(vec![0.5, 0.5])).norm() < 1e-12);
    }

    #[test]
    fn project_full_space_is_identity() {
        let s = Subspace::full(4);
        let x = Vector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        assert!((s.project(&x).unwrap() - &x).norm() < 1e-12);
    }

    #[test]
    fn project_dim_mismatch() {
        let s = Subspace::full(3);
        assert_eq!(
            s.project(&Vector::zeros(2)).unwrap_err().code(),
            "INPUT_ERROR"
        );
    }

    #[test]
    fn intersect_coordinate_planes() {
        let s1 = Subspace::span(&[e(3, 0), e(3, 1)], 1e-10).unwrap();
        let s2 = Subspace::span(&[e(3, 1), e(3, 2)], 1e-10).unwrap();
        let i = s1.intersect(&s2, RANK_TOL).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&e(3, 1), 1e-9));
    }

    #[test]
    fn complement_of_axis() {
        let s = Subspace::span(&[e(3, 0)], 1e-10).unwrap();
        let c = s.complement();
        assert_eq!(c.dim(), 2);
        assert!(c.contains(&e(3, 1), 1e-9));
        assert!(c.contains(&e(3, 2), 1e-9));
    }

    #[test]
    fn join_axes() {
        let s1 = Subspace::span(&[e(3, 0)], 1e-10).unwrap();
        let s2 = Subspace::span(&[e(3, 1)], 1e-10).unwrap();
        let j = s1.join(&s2).unwrap();
        assert_eq!(j.dim(), 2);
    }

    #[test]
    fn join_complement_fills_space_and_intersect_is_zero() {
        let mut rng = crate::rng::SplitMix64::new(5);
        for n in [2usize, 5, 9] {
            let vs: Vec<Vector> = (0..n / 2 + 1).map(|_| rng.gaussian_vector(n)).collect();
            let s = Subspace::span(&vs, RANK_TOL).unwrap();
            let c = s.complement();
            assert_eq!(s.join(&c).unwrap().dim(), n);
            assert_eq!(s.intersect(&c, RANK_TOL).unwrap().dim(), 0);
        }
    }

    #[test]
    fn principal_angles_two_lines_at_45_degrees() {
        let s1 = Subspace::span(&[e(2, 0)], 1e-10).unwrap();
        let s2 = Subspace::span(&[e(2, 0) + e(2, 1)], 1e-10).unwrap();
        let prof = s1.principal_angles(&s2, RANK_TOL).unwrap();
        assert_eq!(prof.principal_angles.len(), 1);
        assert!((prof.principal_angles[0] - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((prof.friedrichs_cos - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(prof.dim_intersection, 0);
    }

    #[test]
    fn principal_angles_identical_subspaces() {
        let s = Subspace::span(&[e(3, 0), e(3, 1)], 1e-10).unwrap();
        let prof = s.principal_angles(&s, RANK_TOL).unwrap();
        assert_eq!(prof.dim_intersection, 2);
        assert!(prof.principal_angles.iter().all(|&a| a < 1e-7));
        assert_eq!(prof.friedrichs_cos, 0.0);
    }

    #[test]
    fn principal_angles_orthogonal_lines() {
        let s1 = Subspace::span(&[e(2, 0)], 1e-10).unwrap();
        let s2 = Subspace::span(&[e(2, 1)], 1e-10).unwrap();
        let prof = s1.principal_angles(&s2, RANK_TOL).unwrap();
        assert!((prof.principal_angles[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(prof.friedrichs_cos, 0.0);
        assert_eq!(prof.dim_intersection, 0);
    }

    #[test]
    fn principal_angles_rejects_zero_subspace() {
        let s = Subspace::full(2);
        let z = Subspace::zero(2);
        assert_eq!(
            s.principal_angles(&z, RANK_TOL).unwrap_err().code(),
            "EMPTY_SUBSPACE"
        );
    }

    #[test]
    fn dist_to_axis() {
        let s = Subspace::span(&[e(2, 0)], 1e-10).unwrap();
        assert!((s.distance(&e(2, 1)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dist_to_tilted_line() {
        // Oracle: explicit projection onto the normalized spanning vector of
        // span{e3 + e4/2} in R^5; the distance is the sine of the angle to e3.
        let n = 5;
        let spanning = e(n, 2) + 0.5 * e(n, 3);
        let unit = &spanning / spanning.norm();
        let x = e(n, 2);
        let oracle = (&x - unit.dot(&x) * &unit).norm();
        let expected = 0.5 / 1.25_f64.sqrt();
        assert!((oracle - expected).abs() < 1e-12);

        let s = Subspace::span(&[spanning], 1e-10).unwrap();
        assert!((s.distance(&x).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn dist_zero_for_members() {
        let s = Subspace::span(&[e(3, 0) + e(3, 1)], 1e-10).unwrap();
        let x = 2.5 * (e(3, 0) + e(3, 1));
        assert!(s.distance(&x).unwrap() < 1e-12);
    }

    #[test]
    fn zero_subspace_projects_to_zero() {
        let z = Subspace::zero(3);
        let p = z.project(&Vector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(p.norm(), 0.0);
    }

    #[test]
    fn text_round_trip() {
        let mut rng = crate::rng::SplitMix64::new(11);
        let vs: Vec<Vector> = (0..3).map(|_| rng.gaussian_vector(6)).collect();
        let s = Subspace::span(&vs, RANK_TOL).unwrap();
        let mut buf = Vec::new();
        write_text(&s, &mut buf).unwrap();
        let back = read_text(&mut std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(back.ambient_dim(), s.ambient_dim());
        assert_eq!(back.dim(), s.dim());
        assert!((back.basis() - s.basis()).norm() < 1e-12);
    }
}

//! Solvers for the rotation equation `R_A R_X = R_Y R_B` in its three
//! forms: direct null vector, SVD of the summed product matrix, and
//! orthogonal Procrustes.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, Vector4};

use super::formulation::{
    aligned_quaternions, axis_angle_rotation_system, kronecker_rotation_system,
    quaternion_rotation_system, unit_from,
};
use super::types::{Diagnostics, MotionPair, Problem, RotationEstimate};
use super::SolveOptions;
use crate::error::{Error, Result};
use crate::linalg::{svd, symmetric_eigen, RightSingular};
use crate::recovery::reorthonormalize;
use crate::se3::algebra::{unvec3, vec3};
use crate::se3::quaternion::{left_matrix, right_matrix};
use crate::se3::{Representation, Rotation3};

pub(crate) fn require_pairs(pairs: &[MotionPair], needed: usize) -> Result<()> {
    if pairs.len() < needed {
        return Err(Error::InsufficientMeasurements { required: needed, found: pairs.len() });
    }
    Ok(())
}

/// `sqrt(sum |R_A R_X - R_Y R_B|_F^2)`.
pub(crate) fn rotation_residual(pairs: &[MotionPair], x: &Rotation3, y: &Rotation3) -> f64 {
    pairs
        .iter()
        .map(|p| (p.a.rotation.matrix() * x.matrix() - y.matrix() * p.b.rotation.matrix()).norm_squared())
        .sum::<f64>()
        .sqrt()
}

fn quaternion_rotation(v: &[f64]) -> Result<Rotation3> {
    unit_from(v)
        .map(|q| Rotation3::from_quaternion(&q))
        .ok_or_else(|| Error::DegenerateMotion("rotation block of the solution vanished".into()))
}

/// Rotations from the two `vec R` blocks of a Kronecker solution; the
/// common sign is fixed by `det R_X > 0`.
fn kronecker_rotations(vx: &[f64], vy: Option<&[f64]>) -> Result<(Rotation3, Option<Rotation3>)> {
    let mut mx = unvec3(vx);
    let mut my = vy.map(unvec3);
    if mx.determinant() < 0.0 {
        mx = -mx;
        my = my.map(|m| -m);
    }
    let rx = reorthonormalize(&mx)?;
    let ry = my.map(|m| reorthonormalize(&m)).transpose()?;
    Ok((rx, ry))
}

fn finish(pairs: &[MotionPair], problem: Problem, x: Rotation3, y: Option<Rotation3>, singular_values: Vec<f64>) -> RotationEstimate {
    let yr = match problem {
        Problem::Axxb => x,
        Problem::Axyb => y.unwrap_or(x),
    };
    let residual = rotation_residual(pairs, &x, &yr);
    RotationEstimate {
        x,
        y: match problem {
            Problem::Axxb => None,
            Problem::Axyb => y,
        },
        diagnostics: Diagnostics { singular_values, residual, nullspace_dim: 1, incidental_t_x: None },
    }
}

/// Null vector of the stacked rotation equation. For AX=XB the `r_Y`
/// columns are folded onto `r_X`.
pub fn solve_rotation_direct(
    pairs: &[MotionPair],
    problem: Problem,
    repr: Representation,
    opts: &SolveOptions,
) -> Result<RotationEstimate> {
    require_pairs(pairs, 1)?;
    let system = match repr {
        Representation::Quaternion => quaternion_rotation_system(&aligned_quaternions(pairs, problem), problem),
        Representation::AxisAngle => axis_angle_rotation_system(&aligned_quaternions(pairs, problem), problem),
        Representation::Kronecker => kronecker_rotation_system(pairs, problem),
    };
    let rs = RightSingular::new(&system)?;
    let nullity = rs.nullity(opts.rank_tol);
    if nullity > 1 {
        return Err(Error::DegenerateMotion(format!(
            "rotation system has a {nullity}-dimensional null space"
        )));
    }
    let v = rs.smallest(0);
    let (x, y) = match repr {
        Representation::Quaternion | Representation::AxisAngle => {
            let x = quaternion_rotation(&v.as_slice()[..4])?;
            let y = match problem {
                Problem::Axxb => None,
                Problem::Axyb => Some(quaternion_rotation(&v.as_slice()[4..8])?),
            };
            (x, y)
        }
        Representation::Kronecker => match problem {
            Problem::Axxb => kronecker_rotations(&v.as_slice()[..9], None)?,
            Problem::Axyb => kronecker_rotations(&v.as_slice()[..9], Some(&v.as_slice()[9..18]))?,
        },
    };
    Ok(finish(pairs, problem, x, y, rs.singular_values))
}

/// `K = sum M-(R_B)^T M+(R_A)`.
pub fn product_sum(pairs: &[MotionPair], problem: Problem, repr: Representation) -> Result<DMatrix<f64>> {
    match repr {
        Representation::Quaternion => {
            let mut k = Matrix4::zeros();
            for (a, b) in aligned_quaternions(pairs, problem) {
                k += right_matrix(&b).transpose() * left_matrix(&a);
            }
            Ok(DMatrix::from_column_slice(4, 4, k.as_slice()))
        }
        Representation::Kronecker => {
            let mut k = DMatrix::zeros(9, 9);
            for p in pairs {
                k += p.b.rotation.matrix().kronecker(p.a.rotation.matrix());
            }
            Ok(DMatrix::from_column_slice(9, 9, k.as_slice()))
        }
        Representation::AxisAngle => Err(Error::UnsupportedRepresentation(
            "the summed product form needs a quaternion or kronecker mapping".into(),
        )),
    }
}

/// Dominant singular pair of the summed product matrix: `r_X` is the right
/// and `r_Y` the left singular vector. For AX=XB the dominant eigenvector of
/// the symmetric part is used.
pub fn solve_rotation_svd_sum(
    pairs: &[MotionPair],
    problem: Problem,
    repr: Representation,
    opts: &SolveOptions,
) -> Result<RotationEstimate> {
    require_pairs(pairs, 1)?;
    let k = product_sum(pairs, problem, repr)?;
    let d = svd(&k)?;
    let sv = d.s.clone();

    let (rx, ry) = match problem {
        Problem::Axyb => {
            if sv[0] <= 0.0 || (sv[0] - sv[1]) / sv[0] < opts.rank_tol {
                return Err(Error::DegenerateMotion("dominant singular value is not simple".into()));
            }
            (d.v.column(0).into_owned(), Some(d.u.column(0).into_owned()))
        }
        Problem::Axxb => {
            let sym = (&k + k.transpose()) * 0.5;
            let (vals, vecs) = symmetric_eigen(&sym)?;
            if vals[0] <= 0.0 || (vals[0] - vals[1]) / vals[0] < opts.rank_tol {
                return Err(Error::DegenerateMotion("dominant eigenvalue is not simple".into()));
            }
            (vecs.column(0).into_owned(), None)
        }
    };
    let (x, y) = match repr {
        Representation::Quaternion => (
            quaternion_rotation(rx.as_slice())?,
            ry.map(|u| quaternion_rotation(u.as_slice())).transpose()?,
        ),
        _ => kronecker_rotations(rx.as_slice(), ry.as_ref().map(|u| u.as_slice()))?,
    };
    Ok(finish(pairs, problem, x, y, sv))
}

/// `W = U diag(1, .., det(U V^T)) V^T` for the cross-covariance `sum a b^T`,
/// the orthogonal map with minimal `sum |W b - a|^2`.
fn procrustes(pairs: &[(DVector<f64>, DVector<f64>)], min_rank: usize, tol: f64) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let d = pairs[0].0.len();
    let mut h = DMatrix::zeros(d, d);
    for (b, a) in pairs {
        h += a * b.transpose();
    }
    let svd = svd(&h)?;
    let sv = svd.s.clone();
    let rank = sv.iter().filter(|s| sv[0] > 0.0 && **s / sv[0] >= tol).count();
    if rank < min_rank {
        return Err(Error::DegenerateMotion(format!(
            "cross-covariance has rank {rank}, at least {min_rank} needed"
        )));
    }
    let (u, v_t) = (svd.u, svd.v.transpose());
    let det = (&u * &v_t).determinant().signum();
    let mut diag = DVector::from_element(d, 1.0);
    diag[d - 1] = det;
    Ok((&u * DMatrix::from_diagonal(&diag) * v_t, sv))
}

/// Factors `W` in SO(4) as `Q+(p) Q-(q)`.
///
/// The 16 products `Q+(e_i) Q-(e_j)` are orthogonal with squared norm 4, so
/// `C_ij = <W, Q+(e_i) Q-(e_j)> / 4 = p_i q_j` is rank one.
pub(crate) fn split_so4(w: &DMatrix<f64>) -> Result<(Vector4<f64>, Vector4<f64>)> {
    let mut c = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let basis = left_matrix(&Vector4::ith(i, 1.0)) * right_matrix(&Vector4::ith(j, 1.0));
            let mut dot = 0.0;
            for r in 0..4 {
                for s in 0..4 {
                    dot += w[(r, s)] * basis[(r, s)];
                }
            }
            c[(i, j)] = dot / 4.0;
        }
    }
    let d = svd(&DMatrix::from_column_slice(4, 4, c.as_slice()))?;
    let p = Vector4::from_iterator(d.u.column(0).iter().copied());
    let q = Vector4::from_iterator(d.v.column(0).iter().copied());
    Ok((p, q))
}

/// Nearest Kronecker factors: `W ~ P (x) Q` for 3x3 `P`, `Q`.
pub(crate) fn split_kronecker(w: &DMatrix<f64>) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    // Entry (3i + k, 3j + l) of P (x) Q is P_ij Q_kl.
    let mut r = DMatrix::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    r[(i + 3 * j, k + 3 * l)] = w[(3 * i + k, 3 * j + l)];
                }
            }
        }
    }
    let d = svd(&r)?;
    let s = d.s[0].sqrt();
    let u = d.u.column(0) * s;
    let v = d.v.column(0) * s;
    Ok((unvec3(u.as_slice()), unvec3(v.as_slice())))
}

/// Orthogonal Procrustes on vectorized rotations for AX=XB, where the
/// unknown `M-(R_X)^T M+(R_X)` maps `vec R_B` onto `vec R_A`.
///
/// * axis-angle: rotation vectors, `R_X log(R_B) = log(R_A)`;
/// * quaternion: `x b x* = a` in SO(4), then split into `Q+(x) Q-(x*)`;
/// * kronecker: `(R_X (x) R_X) vec R_B = vec R_A` in SO(9), augmented with
///   the transposed rotations and the identity, then split into factors.
pub fn solve_rotation_procrustes(
    pairs: &[MotionPair],
    problem: Problem,
    repr: Representation,
    opts: &SolveOptions,
) -> Result<RotationEstimate> {
    if problem != Problem::Axyb {
        require_pairs(pairs, 1)?;
    } else {
        return Err(Error::InfeasibleSpec(
            "the Procrustes form is only defined for AX=XB".into(),
        ));
    }
    let tol = opts.rank_tol;
    let (x, sv) = match repr {
        Representation::AxisAngle => {
            let data: Vec<_> = pairs
                .iter()
                .map(|p| {
                    let b = p.b.rotation.log();
                    let a = p.a.rotation.log();
                    (DVector::from_column_slice(b.as_slice()), DVector::from_column_slice(a.as_slice()))
                })
                .collect();
            let (w, sv) = procrustes(&data, 2, tol)?;
            (Rotation3::from_matrix_unchecked(Matrix3::from_column_slice(w.as_slice())), sv)
        }
        Representation::Quaternion => {
            let mut data = Vec::with_capacity(2 * pairs.len());
            for (a, b) in aligned_quaternions(pairs, problem) {
                let conj = Vector4::new(1.0, -1.0, -1.0, -1.0);
                data.push((DVector::from_column_slice(b.as_slice()), DVector::from_column_slice(a.as_slice())));
                data.push((
                    DVector::from_column_slice(b.component_mul(&conj).as_slice()),
                    DVector::from_column_slice(a.component_mul(&conj).as_slice()),
                ));
            }
            let (w, sv) = procrustes(&data, 3, tol)?;
            let (p, q) = split_so4(&w)?;
            let q_conj = Vector4::new(q[0], -q[1], -q[2], -q[3]);
            let s = if p.dot(&q_conj) < 0.0 { -1.0 } else { 1.0 };
            (quaternion_rotation((p + q_conj * s).as_slice())?, sv)
        }
        Representation::Kronecker => {
            let id = vec3(&Matrix3::identity());
            let mut data = vec![(id.clone(), id)];
            for p in pairs {
                let (ra, rb) = (p.a.rotation.matrix(), p.b.rotation.matrix());
                data.push((vec3(rb), vec3(ra)));
                data.push((vec3(&rb.transpose()), vec3(&ra.transpose())));
            }
            let (w, sv) = procrustes(&data, 8, tol)?;
            let (mut pm, mut qm) = split_kronecker(&w)?;
            if pm.determinant() < 0.0 {
                pm = -pm;
                qm = -qm;
            }
            (reorthonormalize(&(pm + qm))?, sv)
        }
    };
    let x = reorthonormalize(x.matrix())?;
    Ok(finish(pairs, problem, x, None, sv))
}


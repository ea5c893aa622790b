use std::collections::BTreeMap;

use super::{
    macdonald_expansion, macdonald_expansion_in, macdonald_poly_in, partitions_in_box, MExpansion, SignedPartition,
    SymmetricError,
};
use crate::elliptic_core::{qpochhammer_inf, tol_for_prec};
use crate::quadrature_verify::{torus_integrate, QuadConfig, QuadratureError, TorusDomain};
use crate::scalar_ring::{Field, HPComplex, QtField, RationalFn};

/// b_λ as an exact element of ℚ(q,t), N_λ at the numeric (q, t) it was
/// requested for.
#[derive(Clone, Debug)]
pub struct MacdonaldConstants {
    pub n_lambda: HPComplex,
    pub b_lambda: RationalFn,
}

/// a_k = (t;q)_k/(q;q)_k, the coefficient of z^k in (tz;q)_∞/(z;q)_∞.
fn cauchy_coeffs<F: Field>(d: usize, qt: &QtField<F>) -> Vec<F> {
    let mut a = vec![qt.one()];
    for k in 1..=d {
        let num = qt.one().minus(&qt.mono(k as i64 - 1, 1));
        let den = qt.one().minus(&qt.mono(k as i64, 0));
        let next = a[k - 1].times(&num).divide(&den).expect("1 − q^k is invertible");
        a.push(next);
    }
    a
}

/// Σ over n×n matrices of nonnegative integers with row sums `rows` and
/// column sums `cols` of ∏ a_{A_ij}.
fn table_sum<F: Field>(rows: &[i32], cols: &[i32], a: &[F]) -> F {
    fn rec<F: Field>(rows: &[i32], cols: &mut Vec<i32>, row: usize, col: usize, left: i32, acc: F, a: &[F], out: &mut F) {
        let n = cols.len();
        if row == rows.len() {
            if cols.iter().all(|&c| c == 0) {
                *out = out.plus(&acc);
            }
            return;
        }
        if col == n - 1 {
            // the last cell of a row is forced
            if left > cols[col] {
                return;
            }
            cols[col] -= left;
            let next_left = rows.get(row + 1).copied().unwrap_or(0);
            rec(rows, cols, row + 1, 0, next_left, acc.times(&a[left as usize]), a, out);
            cols[col] += left;
            return;
        }
        for v in 0..=left.min(cols[col]) {
            cols[col] -= v;
            rec(rows, cols, row, col + 1, left - v, acc.times(&a[v as usize]), a, out);
            cols[col] += v;
        }
    }
    let mut out = a[0].zero_like();
    let mut c = cols.to_vec();
    rec(rows, &mut c, 0, 0, rows[0], a[0].one_like(), a, &mut out);
    out
}

fn cauchy_solve<F: Field>(
    n: usize,
    d: usize,
    qt: &QtField<F>,
    expansion: &dyn Fn(&SignedPartition) -> Result<MExpansion<F>, SymmetricError>,
) -> Result<BTreeMap<SignedPartition, F>, SymmetricError> {
    if n == 0 {
        return Err(SymmetricError::Partition("n must be positive".into()));
    }
    let basis = partitions_in_box(n, d as i64, 0, d as i32);
    let m = basis.len();
    let a = cauchy_coeffs(d, qt);
    // G_{νρ}: coefficient of m_ν(x) m_ρ(y) in the Cauchy product
    let g: Vec<Vec<F>> = basis
        .iter()
        .map(|nu| basis.iter().map(|rho| table_sum(nu.parts(), rho.parts(), &a)).collect())
        .collect();
    // U_{λν} = [m_ν] P_λ, unitriangular in lexicographically decreasing order
    let mut u = vec![vec![qt.zero(); m]; m];
    for (i, lam) in basis.iter().enumerate() {
        let e = expansion(lam)?;
        for (j, nu) in basis.iter().enumerate() {
            if let Some(c) = e.get(nu) {
                u[i][j] = c.clone();
            }
        }
    }
    // V = U^{-1} by back substitution, column by column
    let mut v = vec![vec![qt.zero(); m]; m];
    for col in 0..m {
        for row in (0..=col).rev() {
            let mut s = if row == col { qt.one() } else { qt.zero() };
            for k in row + 1..=col {
                s = s.minus(&u[row][k].times(&v[k][col]));
            }
            v[row][col] = s;
        }
    }
    // B = Vᵀ G V
    let gv: Vec<Vec<F>> = (0..m)
        .map(|i| (0..m).map(|j| (0..m).fold(qt.zero(), |s, k| s.plus(&g[i][k].times(&v[k][j])))).collect())
        .collect();
    let mut out = BTreeMap::new();
    for i in 0..m {
        for j in 0..m {
            let b = (0..m).fold(qt.zero(), |s, k| s.plus(&v[k][i].times(&gv[k][j])));
            if i == j {
                out.insert(basis[i].clone(), b);
            } else {
                let scale = out.get(&basis[i.min(j)]).cloned().unwrap_or_else(|| qt.one());
                if !b.negligible(&scale) && !b.negligible(&qt.one()) {
                    return Err(SymmetricError::NotDiagonal(basis[i].clone(), basis[j].clone()));
                }
            }
        }
    }
    Ok(out)
}

/// b_λ for every λ ∈ Λ with n parts and |λ| = d, exact in ℚ(q,t).
pub fn cauchy_b_constants(n: usize, d: usize) -> Result<BTreeMap<SignedPartition, RationalFn>, SymmetricError> {
    cauchy_solve(n, d, &QtField::symbolic(), &|lam| Ok((*macdonald_expansion(lam)?).clone()))
}

pub fn cauchy_b_constants_in<F: Field>(
    n: usize,
    d: usize,
    qt: &QtField<F>,
) -> Result<BTreeMap<SignedPartition, F>, SymmetricError> {
    cauchy_solve(n, d, qt, &|lam| macdonald_expansion_in(lam, qt))
}

fn weight(x: &[HPComplex], q: &HPComplex, t: &HPComplex, tol: f64) -> Result<HPComplex, QuadratureError> {
    let mut w = HPComplex::one(q.prec());
    for (i, xi) in x.iter().enumerate() {
        for (j, xj) in x.iter().enumerate() {
            if i != j {
                let z = xi / xj;
                let num = qpochhammer_inf(&z, q, tol)?;
                let den = qpochhammer_inf(&(t * &z), q, tol)?;
                w = &w * &(&num / &den);
            }
        }
    }
    Ok(w)
}

/// ∫_{T^n} P_λ(x) P_μ(x^{-1}) ∏_{i≠j} (x_i/x_j;q)_∞/(t x_i/x_j;q)_∞ |dx| at
/// numeric q, t. The integrand is homogeneous of degree zero, so the torus
/// is cut down to x_1⋯x_n = 1.
pub fn orthogonality_norm(
    lambda: &SignedPartition,
    mu: &SignedPartition,
    q: &HPComplex,
    t: &HPComplex,
    cfg: &QuadConfig,
) -> Result<HPComplex, QuadratureError> {
    if lambda.n() != mu.n() {
        return Err(SymmetricError::LengthMismatch(lambda.n(), mu.n()).into());
    }
    if q.abs_f64() >= 1.0 || t.abs_f64() >= 1.0 {
        return Err(QuadratureError::Precondition("orthogonality needs |q|, |t| < 1".into()));
    }
    let n = lambda.n();
    let prec = q.prec();
    let qt = QtField::numeric(q.clone(), t.clone());
    let pl = macdonald_poly_in(lambda, &qt)?;
    let pm = macdonald_poly_in(mu, &qt)?;
    let tol = tol_for_prec(prec);
    let f = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> {
        let inv: Vec<HPComplex> = x.iter().map(|v| v.recip()).collect();
        Ok(&(&pl.eval(x) * &pm.eval(&inv)) * &weight(x, q, t, tol)?)
    };
    let dom = TorusDomain::new(n, HPComplex::one(prec), cfg.start)?;
    Ok(torus_integrate(&f, &dom, cfg)?.value)
}

/// (N_λ, b_λ) for λ ∈ Λ: b_λ exactly from the Cauchy product expanded to
/// degree |λ|, N_λ by quadrature at the given numeric (q, t).
pub fn macdonald_constants(
    lambda: &SignedPartition,
    degree_cap: usize,
    q: &HPComplex,
    t: &HPComplex,
    cfg: &QuadConfig,
) -> Result<MacdonaldConstants, QuadratureError> {
    if lambda.last() < 0 {
        return Err(SymmetricError::Partition(format!("{lambda} has negative parts")).into());
    }
    if lambda.size() > degree_cap as i64 {
        return Err(SymmetricError::DegreeCap { cap: degree_cap, size: lambda.size() }.into());
    }
    let bs = cauchy_b_constants(lambda.n(), lambda.size() as usize)?;
    let b_lambda = bs.get(lambda).cloned().expect("λ lies in its own degree");
    let n_lambda = orthogonality_norm(lambda, lambda, q, t, cfg)?;
    Ok(MacdonaldConstants { n_lambda, b_lambda })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[i32]) -> SignedPartition {
        SignedPartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_b() {
        let b = cauchy_b_constants(2, 0).unwrap();
        assert!(b[&sp(&[0, 0])].is_one());
        let b1 = cauchy_b_constants(1, 1).unwrap();
        assert_eq!(b1[&sp(&[1])], RationalFn::parse("(1-t)/(1-q)").unwrap());
        // n = 1: b_(d) = (t;q)_d/(q;q)_d
        let b3 = cauchy_b_constants(1, 3).unwrap();
        let expect = RationalFn::parse("(1-t)(1-q*t)(1-q^2*t)/((1-q)(1-q^2)(1-q^3))").unwrap();
        assert_eq!(b3[&sp(&[3])], expect);
    }

    #[test]
    fn b_at_q_equals_t_is_one() {
        // Schur Cauchy identity: every b_λ is 1 at q = t
        let qt = QtField::numeric(HPComplex::from_parts(0.3, 0.1, 128), HPComplex::from_parts(0.3, 0.1, 128));
        let b = cauchy_b_constants_in(3, 3, &qt).unwrap();
        for v in b.values() {
            assert!(v.rel_diff(&HPComplex::one(128), 1e-30) < 1e-25);
        }
    }

    #[test]
    fn numeric_b_matches_symbolic() {
        let (q, t) = (HPComplex::from_parts(0.31, 0.07, 128), HPComplex::from_parts(0.42, -0.11, 128));
        let qt = QtField::numeric(q.clone(), t.clone());
        let exact = cauchy_b_constants(2, 4).unwrap();
        let num = cauchy_b_constants_in(2, 4, &qt).unwrap();
        for (lam, b) in &exact {
            let v = qt.eval(b).unwrap();
            assert!(v.rel_diff(&num[lam], 1e-30) < 1e-25, "{lam}");
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let q = HPComplex::from_f64(0.3, 128);
        let err = macdonald_constants(&sp(&[2, 1]), 2, &q, &q, &QuadConfig::default()).unwrap_err();
        assert!(matches!(err, QuadratureError::Symmetric(SymmetricError::DegreeCap { .. })));
    }

    #[test]
    fn schur_norm_is_n_factorial() {
        // at q = t the weight is ∏(1 − x_i/x_j) and P_λ are Schur functions
        let q = HPComplex::from_parts(0.4, 0.2, 128);
        let cfg = QuadConfig { start: 8, cap: 256, tol: 1e-25 };
        for lam in [sp(&[0, 0]), sp(&[2, 0]), sp(&[1, -1])] {
            let nl = orthogonality_norm(&lam, &lam, &q, &q, &cfg).unwrap();
            assert!(nl.rel_diff(&HPComplex::from_i64(2, 128), 1e-30) < 1e-20, "{lam}");
        }
    }
}

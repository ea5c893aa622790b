use super::kernels::{product_root, q_apply_numeric, KernelVariant, QKernel};
use super::report::{ReportBuilder, VerificationReport, VerifyConfig};
use super::sampling::require_between;
use super::torus::{torus_integrate, TorusDomain};
use super::QuadratureError;
use crate::elliptic_core::{qpochhammer_inf, tol_for_prec, EllipticContext, EllipticParams};
use crate::elliptic_spectral::{phi_lambda_series_in, EllipticBasis, PhiSeries, SpectralError};
use crate::scalar_ring::{HPComplex, LaurentPoly, QtField};
use crate::symmetric_core::{from_m_expansion, macdonald_poly_in, orthogonality_norm, SignedPartition};

/// Largest c-order used for φ_λ; the Cauchy constants are needed up to this degree.
pub const PHI_MAX_ORDER: usize = 20;

/// The p = 0 eigenvalue identity of Q_c on P_λ at fixed numeric (q, t):
/// ∫ P_λ(x) ∏ (c t y_j/x_i;q)/(c y_j/x_i;q) ∏_{i≠j} (x_i/x_j;q)/(t x_i/x_j;q) |dx| = φ_λ(c) P_λ(y).
pub struct PhiLemma {
    pub lambda: SignedPartition,
    pub q: HPComplex,
    pub t: HPComplex,
    pub series: PhiSeries<HPComplex>,
    pub n_lambda: HPComplex,
    poly: LaurentPoly<HPComplex>,
}

impl PhiLemma {
    pub fn new(
        lambda: &SignedPartition,
        q: &HPComplex,
        t: &HPComplex,
        c_order: usize,
        cfg: &VerifyConfig,
    ) -> Result<Self, QuadratureError> {
        if c_order > PHI_MAX_ORDER {
            return Err(QuadratureError::Precondition(format!("c-order {c_order} exceeds {PHI_MAX_ORDER}")));
        }
        let qt = QtField::numeric(q.clone(), t.clone());
        let series = phi_lambda_series_in(lambda, c_order, &qt)?;
        let n_lambda = orthogonality_norm(lambda, lambda, q, t, &cfg.quad)?;
        let poly = macdonald_poly_in(lambda, &qt)?;
        Ok(PhiLemma { lambda: lambda.clone(), q: q.clone(), t: t.clone(), series, n_lambda, poly })
    }

    /// Truncation estimate |c|^{c_order+1}, relative to the leading term.
    pub fn truncation(&self, c: &HPComplex) -> f64 {
        c.abs_f64().powi(self.series.c_order as i32 + 1)
    }

    pub fn lhs(&self, c: &HPComplex, y: &[HPComplex], cfg: &VerifyConfig) -> Result<(HPComplex, usize), QuadratureError> {
        let n = y.len();
        let r = product_root(y);
        for (j, yj) in y.iter().enumerate() {
            require_between(&format!("c y_{}/r", j + 1), 0.0, &(&(c * yj) / &r), 1.0)?;
        }
        let tol = tol_for_prec(cfg.prec);
        let (q, t) = (&self.q, &self.t);
        let ct = c * t;
        let g = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> {
            let mut acc = self.poly.eval(x);
            for xi in x {
                for yj in y {
                    let u = yj / xi;
                    let num = qpochhammer_inf(&(&ct * &u), q, tol)?;
                    let den = qpochhammer_inf(&(c * &u), q, tol)?;
                    acc = &acc * &(&num / &den);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let u = &x[i] / &x[j];
                        let num = qpochhammer_inf(&u, q, tol)?;
                        let den = qpochhammer_inf(&(t * &u), q, tol)?;
                        acc = &acc * &(&num / &den);
                    }
                }
            }
            Ok(acc)
        };
        let dom = TorusDomain::new(n, r, cfg.quad.start)?;
        let res = torus_integrate(&g, &dom, &cfg.quad)?;
        Ok((res.value, res.points_per_dim))
    }

    pub fn check(&self, c: &HPComplex, y: &[HPComplex], cfg: &VerifyConfig) -> Result<VerificationReport, QuadratureError> {
        let mut rb = ReportBuilder::new("phi-lemma", y.len(), None, None, cfg.prec);
        rb.param("q", &self.q);
        rb.param("t", &self.t);
        rb.param("c", c);
        rb.params("y", y);
        rb.params("lambda", &self.lambda.parts().iter().map(|&v| HPComplex::from_i64(v as i64, 64)).collect::<Vec<_>>());
        let (lhs, pts) = self.lhs(c, y, cfg)?;
        rb.quad(&super::torus::QuadResult { value: lhs.clone(), points_per_dim: pts, change: 0.0 });
        let rhs = &self.series.value(c, &self.n_lambda) * &self.poly.eval(y);
        Ok(rb.finish(lhs, rhs, cfg.threshold_or(1e-8)))
    }
}

/// 𝐏_λ(x;p) truncated at p^K, evaluated at numeric p.
pub fn elliptic_macdonald_value(
    basis: &EllipticBasis<HPComplex>,
    lambda: &SignedPartition,
    order: usize,
    p: &HPComplex,
    x: &[HPComplex],
) -> Result<HPComplex, SpectralError> {
    let e = basis.get(lambda, order)?;
    let zero = HPComplex::zero(p.prec());
    let mut acc = zero.clone();
    let mut pk = HPComplex::one(p.prec());
    for layer in &e.layers {
        acc = &acc + &(&pk * &from_m_expansion(layer, lambda.n(), &zero).eval(x));
        pk = &pk * p;
    }
    Ok(acc)
}

/// Q_c applied to the p-truncated 𝐏_λ at several points y: the ratios
/// (Q_c 𝐏_λ)(y)/𝐏_λ(y) should agree up to the truncation error.
/// Returns the ratio at the first point and the largest relative spread.
#[allow(clippy::too_many_arguments)]
pub fn q_eigen_spread(
    lambda: &SignedPartition,
    order: usize,
    p: &HPComplex,
    q: &HPComplex,
    t: &HPComplex,
    c: &HPComplex,
    ys: &[Vec<HPComplex>],
    cfg: &VerifyConfig,
) -> Result<(HPComplex, f64), QuadratureError> {
    let ctx = EllipticContext::new(&EllipticParams::with_precision(p.clone(), q.clone())?)?;
    let basis = EllipticBasis::numeric(q.clone(), t.clone());
    let kernel = QKernel::new(KernelVariant::Q, lambda.n(), c.clone(), t.clone());
    let f = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> {
        Ok(elliptic_macdonald_value(&basis, lambda, order, p, x)?)
    };
    let mut ratios = Vec::new();
    for y in ys {
        let v = q_apply_numeric(&kernel, &f, y, &ctx, &cfg.quad)?.value;
        ratios.push(&v / &f(y)?);
    }
    let first = ratios[0].clone();
    let spread = ratios.iter().map(|r| r.rel_diff(&first, 1e-30)).fold(0.0, f64::max);
    Ok((first, spread))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> HPComplex {
        HPComplex::from_parts(re, im, 128)
    }

    fn sp(v: &[i32]) -> SignedPartition {
        SignedPartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn one_variable_phi() {
        // n = 1: φ(c) = (ct;q)_∞/(c;q)_∞ and P = x^λ
        let cfg = VerifyConfig::default();
        let (q, t) = (c(0.3, 0.1), c(0.4, -0.2));
        let lem = PhiLemma::new(&sp(&[2]), &q, &t, 20, &cfg).unwrap();
        let r = lem.check(&c(0.2, 0.1), &[c(0.8, 0.5)], &cfg).unwrap();
        assert!(r.pass, "{}", r.rel_residual);
    }

    #[test]
    fn two_variable_phi_at_small_c() {
        let cfg = VerifyConfig::default();
        let (q, t) = (c(0.3, 0.1), c(0.4, -0.2));
        let lem = PhiLemma::new(&sp(&[1, 0]), &q, &t, 12, &cfg).unwrap();
        let y = [c(0.9, 0.3), c(0.5, -0.7)];
        let r = lem.check(&c(0.1, 0.0), &y, &cfg).unwrap();
        assert!(r.pass, "{}", r.rel_residual);
    }
}

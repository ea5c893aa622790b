use serde::{Deserialize, Serialize};

use super::sampling::require_between;
use super::torus::{torus_integrate, QuadConfig, QuadResult, TorusDomain};
use super::QuadratureError;
use crate::elliptic_core::EllipticContext;
use crate::scalar_ring::HPComplex;

/// Integrand type accepted by the kernel evaluators.
pub type Integrand<'a> = dyn Fn(&[HPComplex]) -> Result<HPComplex, QuadratureError> + Sync + 'a;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelVariant {
    /// ∏ Γ(c y_j/x_i)/Γ(c t y_j/x_i) · ∏_{i≠j} Γ(t x_i/x_j)/Γ(x_i/x_j)
    Q,
    /// ∏ Γ(c y_j/x_i, t x_i/c y_j) / ∏_{i≠j} Γ(t y_i/y_j, x_i/x_j)
    QTilde,
    /// ∏ Γ(c x_i y_j)/Γ(c t x_i y_j)
    K,
    /// ∏ Γ(c x_i y_j, t/c x_i y_j) / ∏_{i≠j} Γ(t x_i/x_j, t y_i/y_j)
    KTilde,
    /// same integrand as Q, but no region check (contours are chosen by the caller)
    M,
}

/// Pointwise kernel of one of the Q-type operators.
#[derive(Clone, Debug)]
pub struct QKernel {
    pub variant: KernelVariant,
    pub n: usize,
    pub c: HPComplex,
    pub t: HPComplex,
}

/// ∏_{i<j} 1/(Γ(x_i/x_j)Γ(x_j/x_i)).
pub(crate) fn vandermonde(x: &[HPComplex], ctx: &EllipticContext) -> Result<HPComplex, QuadratureError> {
    let mut acc = HPComplex::one(ctx.prec());
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            acc = &acc * &ctx.inv_gamma_pair(&(&x[i] / &x[j]))?;
        }
    }
    Ok(acc)
}

/// ∏_{i≠j} Γ(s x_i/x_j).
fn cross(s: &HPComplex, x: &[HPComplex], ctx: &EllipticContext) -> Result<HPComplex, QuadratureError> {
    let mut acc = HPComplex::one(ctx.prec());
    for i in 0..x.len() {
        for j in 0..x.len() {
            if i != j {
                acc = &acc * &ctx.gamma(&(s * &(&x[i] / &x[j])))?;
            }
        }
    }
    Ok(acc)
}

pub(crate) fn product_root(y: &[HPComplex]) -> HPComplex {
    let mut p = HPComplex::one(y[0].prec());
    for v in y {
        p = &p * v;
    }
    p.root(y.len() as u32)
}

impl QKernel {
    pub fn new(variant: KernelVariant, n: usize, c: HPComplex, t: HPComplex) -> Self {
        QKernel { variant, n, c, t }
    }

    /// Region predicate for integration over T^{n−1}_{y_1⋯y_n}; point
    /// evaluations (K, K̃) and M have nothing to check.
    pub fn check_region(&self, y: &[HPComplex], ctx: &EllipticContext) -> Result<(), QuadratureError> {
        if y.len() != self.n {
            return Err(QuadratureError::Precondition(format!("expected {} variables, got {}", self.n, y.len())));
        }
        let at = self.t.abs_f64();
        if at >= 1.0 {
            return Err(QuadratureError::Region(format!("|t| = {at:.6e} < 1 fails")));
        }
        let r = product_root(y);
        let lo = match self.variant {
            KernelVariant::Q => (&(&ctx.p * &ctx.q) / &self.t).abs_f64(),
            KernelVariant::QTilde => at,
            _ => return Ok(()),
        };
        for (j, yj) in y.iter().enumerate() {
            require_between(&format!("c y_{}/r", j + 1), lo, &(&(&self.c * yj) / &r), 1.0)?;
        }
        Ok(())
    }

    pub fn eval(&self, x: &[HPComplex], y: &[HPComplex], ctx: &EllipticContext) -> Result<HPComplex, QuadratureError> {
        let pq = &ctx.p * &ctx.q;
        let c = &self.c;
        let t = &self.t;
        let ct = c * t;
        let mut acc = HPComplex::one(ctx.prec());
        match self.variant {
            KernelVariant::Q | KernelVariant::M => {
                for xi in x {
                    for yj in y {
                        let u = &(c * yj) / xi;
                        let v = &(&pq * xi) / &(&ct * yj);
                        acc = &acc * &(&ctx.gamma(&u)? * &ctx.gamma(&v)?);
                    }
                }
                acc = &(&acc * &cross(t, x, ctx)?) * &vandermonde(x, ctx)?;
            }
            KernelVariant::QTilde => {
                for xi in x {
                    for yj in y {
                        let u = &(c * yj) / xi;
                        let v = &(t * xi) / &(c * yj);
                        acc = &acc * &(&ctx.gamma(&u)? * &ctx.gamma(&v)?);
                    }
                }
                acc = &(&acc * &cross(&(&pq / t), y, ctx)?) * &vandermonde(x, ctx)?;
            }
            KernelVariant::K => {
                for xi in x {
                    for yj in y {
                        let u = &(c * xi) * yj;
                        acc = &acc * &(&ctx.gamma(&u)? * &ctx.gamma(&(&pq / &(t * &u)))?);
                    }
                }
            }
            KernelVariant::KTilde => {
                for xi in x {
                    for yj in y {
                        let u = &(c * xi) * yj;
                        acc = &acc * &(&ctx.gamma(&u)? * &ctx.gamma(&(t / &u))?);
                    }
                }
                let s = &pq / t;
                acc = &(&acc * &cross(&s, x, ctx)?) * &cross(&s, y, ctx)?;
            }
        }
        Ok(acc)
    }
}

/// (Q_c f)(y) or (Q̃_c f)(y) by quadrature over T^{n−1}_{y_1⋯y_n}.
pub fn q_apply_numeric(
    kernel: &QKernel,
    f: &Integrand,
    y: &[HPComplex],
    ctx: &EllipticContext,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadratureError> {
    match kernel.variant {
        KernelVariant::Q | KernelVariant::QTilde => {}
        v => return Err(QuadratureError::Precondition(format!("{v:?} is not an integral operator kernel"))),
    }
    kernel.check_region(y, ctx)?;
    let dom = TorusDomain::new(kernel.n, product_root(y), cfg.start)?;
    let g = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(&f(x)? * &kernel.eval(x, y, ctx)?) };
    torus_integrate(&g, &dom, cfg)
}

fn same_product(x: &[HPComplex], y: &[HPComplex], tol: f64) -> Result<HPComplex, QuadratureError> {
    if x.len() != y.len() || x.is_empty() {
        return Err(QuadratureError::Precondition("x and y need the same positive length".into()));
    }
    let px = x.iter().fold(HPComplex::one(x[0].prec()), |a, v| &a * v);
    let py = y.iter().fold(HPComplex::one(y[0].prec()), |a, v| &a * v);
    if px.rel_diff(&py, 1e-300) > tol {
        return Err(QuadratureError::Precondition("x_1⋯x_n ≠ y_1⋯y_n".into()));
    }
    Ok(product_root(y))
}

/// Checks lo < |v| < 1 for v ∈ {c r/x_j, c y_j/r} (and the same with d).
pub(crate) fn check_pair_region(
    name: &str,
    c: &HPComplex,
    x: &[HPComplex],
    y: &[HPComplex],
    r: &HPComplex,
    lo: f64,
) -> Result<(), QuadratureError> {
    for j in 0..x.len() {
        require_between(&format!("{name} r/x_{}", j + 1), lo, &(&(c * r) / &x[j]), 1.0)?;
        require_between(&format!("{name} y_{}/r", j + 1), lo, &(&(c * &y[j]) / r), 1.0)?;
    }
    Ok(())
}

/// K_{cd}(x;y) = ∫ ∏_{i≠j} Γ(t z_i/z_j)/Γ(z_i/z_j) ∏_{i,j} Γ(c y_j/z_i, d z_i/x_j)/Γ(c t y_j/z_i, d t z_i/x_j) |dz|
/// over z ∈ T^{n−1}_{y_1⋯y_n}.
pub fn kernel_kcd(
    x: &[HPComplex],
    y: &[HPComplex],
    c: &HPComplex,
    d: &HPComplex,
    t: &HPComplex,
    ctx: &EllipticContext,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadratureError> {
    let r = same_product(x, y, ctx.tol.sqrt())?;
    let pq = &ctx.p * &ctx.q;
    let lo = (&pq / t).abs_f64();
    if t.abs_f64() >= 1.0 {
        return Err(QuadratureError::Region("|t| < 1 fails".into()));
    }
    check_pair_region("c", c, x, y, &r, lo)?;
    check_pair_region("d", d, x, y, &r, lo)?;
    let n = x.len();
    let ct = c * t;
    let dt = d * t;
    let g = |z: &[HPComplex]| -> Result<HPComplex, QuadratureError> {
        let mut acc = &cross(t, z, ctx)? * &vandermonde(z, ctx)?;
        for zi in z {
            for j in 0..n {
                let a = &(c * &y[j]) / zi;
                let b = &(&pq * zi) / &(&ct * &y[j]);
                let e = &(d * zi) / &x[j];
                let f = &(&pq * &x[j]) / &(&dt * zi);
                acc = &acc * &ctx.gamma_prod(&[a, b, e, f])?;
            }
        }
        Ok(acc)
    };
    let dom = TorusDomain::new(n, r, cfg.start)?;
    torus_integrate(&g, &dom, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic_core::EllipticParams;

    fn c(re: f64, im: f64) -> HPComplex {
        HPComplex::from_parts(re, im, 128)
    }

    fn ctx() -> EllipticContext {
        EllipticContext::new(&EllipticParams::with_precision(c(0.05, 0.02), c(0.3, -0.1)).unwrap()).unwrap()
    }

    #[test]
    fn one_variable_q_is_a_gamma_ratio() {
        let ctx = ctx();
        let (cc, t) = (c(0.5, 0.2), c(0.4, 0.1));
        let y = [c(0.9, 0.3)];
        let k = QKernel::new(KernelVariant::Q, 1, cc.clone(), t.clone());
        let f = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(&x[0] * &x[0]) };
        let v = q_apply_numeric(&k, &f, &y, &ctx, &QuadConfig::default()).unwrap().value;
        let expect = &(&y[0] * &y[0]) * &ctx.gamma_ratio(&cc, &(&cc * &t)).unwrap();
        assert!(v.rel_diff(&expect, 1e-30) < 1e-30);
    }

    #[test]
    fn one_variable_kcd_is_symmetric() {
        let ctx = ctx();
        let t = c(0.4, 0.1);
        let (cc, d) = (c(0.5, 0.2), c(-0.3, 0.6));
        let x = [c(1.0, 0.1)];
        let cfg = QuadConfig::default();
        let a = kernel_kcd(&x, &x, &cc, &d, &t, &ctx, &cfg).unwrap().value;
        let b = kernel_kcd(&x, &x, &d, &cc, &t, &ctx, &cfg).unwrap().value;
        let expect = &ctx.gamma_ratio(&cc, &(&cc * &t)).unwrap() * &ctx.gamma_ratio(&d, &(&d * &t)).unwrap();
        assert!(a.rel_diff(&expect, 1e-30) < 1e-30);
        assert!(a.rel_diff(&b, 1e-30) < 1e-30);
    }

    #[test]
    fn region_violation_is_named() {
        let ctx = ctx();
        let k = QKernel::new(KernelVariant::Q, 2, c(1.5, 0.0), c(0.4, 0.0));
        let f = |_: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(HPComplex::one(128)) };
        let e = q_apply_numeric(&k, &f, &[c(1.0, 0.0), c(1.0, 0.0)], &ctx, &QuadConfig::default()).unwrap_err();
        assert!(matches!(e, QuadratureError::Region(ref m) if m.contains("c y_1/r")));
    }

    #[test]
    fn tilde_kernel_is_the_gauge_transform() {
        // K̃_c = K_c|_{t→pq/t} / (W(x) W(y))
        let ctx = ctx();
        let t = c(0.4, 0.1);
        let pq = &ctx.p * &ctx.q;
        let (x, y) = ([c(0.8, 0.3), c(1.1, -0.2)], [c(0.7, -0.5), c(0.2, 0.9)]);
        let cc = c(0.6, 0.1);
        let kt = QKernel::new(KernelVariant::KTilde, 2, cc.clone(), t.clone()).eval(&x, &y, &ctx).unwrap();
        let k = QKernel::new(KernelVariant::K, 2, cc, &pq / &t).eval(&x, &y, &ctx).unwrap();
        let w = |v: &[HPComplex]| cross(&t, v, &ctx).unwrap();
        let expect = &k / &(&w(&x) * &w(&y));
        assert!(kt.rel_diff(&expect, 1e-30) < 1e-28);
    }
}

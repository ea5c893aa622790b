use serde::{Deserialize, Serialize};

use super::kernels::vandermonde;
use super::torus::{torus_integrate, QuadConfig, QuadResult, TorusDomain};
use super::QuadratureError;
use crate::elliptic_core::EllipticContext;
use crate::scalar_ring::HPComplex;

/// Parameters of the two elliptic Selberg-type integrals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DixonSpec {
    /// I_n^m(a; b) = κ_n ∫_{T^{n−1}} ∏_i ∏_{j ≤ n+m} Γ(a_j x_i, b_j/x_i) / ∏_{i≠j} Γ(x_i/x_j) |dx|
    I { n: usize, m: usize, a: Vec<HPComplex>, b: Vec<HPComplex> },
    /// J_n(y; a, b) = ∫_{T^{n−1}} ∏_i ∏_{j ≤ 2n} Γ(a x_i y_j, b/x_i y_j) / ∏_{i≠j} Γ(x_i/x_j, ab x_i/x_j) |dx|
    J { n: usize, y: Vec<HPComplex>, a: HPComplex, b: HPComplex },
}

/// κ_n = (p;p)_∞^{n−1} (q;q)_∞^{n−1} / n!.
pub fn kappa(n: usize, ctx: &EllipticContext) -> HPComplex {
    let pp = (ctx.poch_p() * ctx.poch_q()).powi(n as i64 - 1);
    let fact: i64 = (1..=n as i64).product();
    pp.div_i64(fact)
}

fn product(v: &[HPComplex], prec: u32) -> HPComplex {
    v.iter().fold(HPComplex::one(prec), |a, x| &a * x)
}

impl DixonSpec {
    pub fn n(&self) -> usize {
        match self {
            DixonSpec::I { n, .. } | DixonSpec::J { n, .. } => *n,
        }
    }

    pub fn validate(&self, ctx: &EllipticContext) -> Result<(), QuadratureError> {
        let prec = ctx.prec();
        let bal_tol = ctx.tol.sqrt();
        match self {
            DixonSpec::I { n, m, a, b } => {
                if *n == 0 || a.len() != n + m || b.len() != n + m {
                    return Err(QuadratureError::Precondition(format!("I_{n}^{m} needs {} a's and b's", n + m)));
                }
                for (name, v) in [("a", a), ("b", b)] {
                    if let Some(j) = v.iter().position(|z| z.abs_f64() >= 1.0) {
                        return Err(QuadratureError::Region(format!("|{name}_{}| < 1 fails", j + 1)));
                    }
                }
                let lhs = &product(a, prec) * &product(b, prec);
                let rhs = (&ctx.p * &ctx.q).powi(*m as i64);
                if lhs.rel_diff(&rhs, 1e-300) > bal_tol {
                    return Err(QuadratureError::Precondition("balancing a_1⋯b_{n+m} = (pq)^m fails".into()));
                }
            }
            DixonSpec::J { n, y, a, b } => {
                if *n == 0 || y.len() != 2 * n {
                    return Err(QuadratureError::Precondition(format!("J_{n} needs {} y's", 2 * n)));
                }
                if product(y, prec).rel_diff(&HPComplex::one(prec), 1e-300) > bal_tol {
                    return Err(QuadratureError::Precondition("y_1⋯y_{2n} = 1 fails".into()));
                }
                let ab = (a * b).abs_f64();
                let pq = (&ctx.p * &ctx.q).abs_f64();
                if !(pq < ab) {
                    return Err(QuadratureError::Region(format!("|pq| < |ab| fails ({pq:.6e} vs {ab:.6e})")));
                }
                let (lo, hi) = (b.abs_f64(), 1.0 / a.abs_f64());
                for (j, v) in y.iter().enumerate() {
                    let m = v.abs_f64();
                    if !(lo < m && m < hi) {
                        return Err(QuadratureError::Region(format!("|b| < |y_{}| < |1/a| fails", j + 1)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// I_n^m or J_n by quadrature over T^{n−1}; n = 1 is the product at x_1 = 1.
pub fn dixon_integral(spec: &DixonSpec, ctx: &EllipticContext, cfg: &QuadConfig) -> Result<QuadResult, QuadratureError> {
    spec.validate(ctx)?;
    let prec = ctx.prec();
    let n = spec.n();
    let dom = TorusDomain::new(n, HPComplex::one(prec), cfg.start)?;
    match spec {
        DixonSpec::I { a, b, .. } => {
            let g = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> {
                let mut acc = vandermonde(x, ctx)?;
                for xi in x {
                    for (aj, bj) in a.iter().zip(b) {
                        acc = &acc * &(&ctx.gamma(&(aj * xi))? * &ctx.gamma(&(bj / xi))?);
                    }
                }
                Ok(acc)
            };
            let mut res = torus_integrate(&g, &dom, cfg)?;
            res.value = &res.value * &kappa(n, ctx);
            Ok(res)
        }
        DixonSpec::J { y, a, b, .. } => {
            let pq = &ctx.p * &ctx.q;
            let s = &pq / &(a * b);
            let g = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> {
                let mut acc = vandermonde(x, ctx)?;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            // 1/Γ(ab x_i/x_j) = Γ(pq x_j/(ab x_i))
                            acc = &acc * &ctx.gamma(&(&s * &(&x[j] / &x[i])))?;
                        }
                    }
                    for yj in y {
                        let u = &x[i] * yj;
                        acc = &acc * &(&ctx.gamma(&(a * &u))? * &ctx.gamma(&(b / &u))?);
                    }
                }
                Ok(acc)
            };
            torus_integrate(&g, &dom, cfg)
        }
    }
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
    fn one_variable_cases_are_products() {
        let ctx = ctx();
        let pq = &ctx.p * &ctx.q;
        let a = vec![c(0.5, 0.1), c(-0.2, 0.6)];
        let b0 = c(0.4, -0.3);
        let b1 = &pq / &(&(&a[0] * &a[1]) * &b0);
        let b = vec![b0, b1];
        let spec = DixonSpec::I { n: 1, m: 1, a: a.clone(), b: b.clone() };
        let v = dixon_integral(&spec, &ctx, &QuadConfig::default()).unwrap().value;
        let expect = ctx.gamma_prod(&[a[0].clone(), a[1].clone(), b[0].clone(), b[1].clone()]).unwrap();
        assert!(v.rel_diff(&expect, 1e-30) < 1e-30);

        let y1 = c(0.9, 0.2);
        let y = vec![y1.clone(), y1.recip()];
        let (aa, bb) = (c(0.4, 0.1), c(0.3, -0.2));
        let spec = DixonSpec::J { n: 1, y: y.clone(), a: aa.clone(), b: bb.clone() };
        let v = dixon_integral(&spec, &ctx, &QuadConfig::default()).unwrap().value;
        let expect = ctx.gamma_prod(&[&aa * &y[0], &aa * &y[1], &bb / &y[0], &bb / &y[1]]).unwrap();
        assert!(v.rel_diff(&expect, 1e-30) < 1e-30);
    }

    #[test]
    fn broken_balancing_is_rejected() {
        let ctx = ctx();
        let spec = DixonSpec::I { n: 1, m: 1, a: vec![c(0.5, 0.0), c(0.5, 0.0)], b: vec![c(0.5, 0.0), c(0.5, 0.0)] };
        assert!(matches!(dixon_integral(&spec, &ctx, &QuadConfig::default()), Err(QuadratureError::Precondition(_))));
    }

    #[test]
    fn kappa_small_cases() {
        let ctx = ctx();
        assert_eq!(kappa(1, &ctx), HPComplex::one(128));
        let k2 = kappa(2, &ctx);
        let expect = (ctx.poch_p() * ctx.poch_q()).div_i64(2);
        assert!(k2.rel_diff(&expect, 1e-30) < 1e-35);
    }
}

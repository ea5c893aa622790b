use super::terms::{shift_terms, ShiftTerm};
use super::{DifferenceOperator, OperatorError, OperatorKind};
use crate::elliptic_core::{EllipticContext, EllipticParams};
use crate::scalar_ring::{HPComplex, LaurentPoly};

/// A numeric point (x, p, q, t).
#[derive(Clone, Debug)]
pub struct GaugeSample {
    pub x: Vec<HPComplex>,
    pub p: HPComplex,
    pub q: HPComplex,
    pub t: HPComplex,
}

/// W(x) = ∏_{i≠j} Γ_{p,q}(t x_i/x_j).
#[derive(Clone, Debug)]
pub struct GaugeWeight {
    pub n: usize,
    pub t: HPComplex,
}

impl GaugeWeight {
    pub fn eval(&self, x: &[HPComplex], ctx: &EllipticContext) -> Result<HPComplex, OperatorError> {
        let mut acc = HPComplex::one(ctx.prec());
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    acc = &acc * &ctx.gamma(&(&self.t * &(&x[i] / &x[j])))?;
                }
            }
        }
        Ok(acc)
    }
}

fn term_coefficient(
    term: &ShiftTerm,
    x: &[HPComplex],
    t: &HPComplex,
    ctx: &EllipticContext,
) -> Result<HPComplex, OperatorError> {
    let q = &ctx.q;
    let mut c = &q.powi(term.qexp) * &t.powi(term.texp);
    if term.sign < 0 {
        c = -c;
    }
    for (arg, &power) in &term.thetas {
        let mut z = &q.powi(arg.qa as i64) * &t.powi(arg.tb as i64);
        if arg.i != arg.j {
            z = &z * &(&x[arg.i] / &x[arg.j]);
        }
        let th = ctx.theta_p(&z)?;
        if power < 0 && th.abs_f64() < 10.0 * ctx.tol {
            return Err(OperatorError::Singular(format!("θ_p vanishes at a coefficient of the shift {:?}", term.shift)));
        }
        c = &c * &th.powi(power as i64);
    }
    Ok(c)
}

fn shifted(x: &[HPComplex], mu: &[u32], q: &HPComplex) -> Vec<HPComplex> {
    x.iter().zip(mu).map(|(xi, &m)| if m == 0 { xi.clone() } else { xi * &q.powi(m as i64) }).collect()
}

impl DifferenceOperator {
    /// (Op f)(x) at numeric (p, q) from the context and the given t; the
    /// series order is irrelevant here since θ_p is evaluated in full.
    pub fn apply_numeric(
        &self,
        f: &dyn Fn(&[HPComplex]) -> Result<HPComplex, OperatorError>,
        x: &[HPComplex],
        t: &HPComplex,
        ctx: &EllipticContext,
    ) -> Result<HPComplex, OperatorError> {
        if x.len() != self.n {
            return Err(OperatorError::Arity { expected: self.n, got: x.len() });
        }
        let mut acc = HPComplex::zero(ctx.prec());
        for term in shift_terms(self.kind, self.k, self.n) {
            let c = term_coefficient(&term, x, t, ctx)?;
            let y = shifted(x, &term.shift, &ctx.q);
            acc = &acc + &(&c * &f(&y)?);
        }
        Ok(acc)
    }

    /// Like `apply_numeric`, but with the coefficients evaluated at t ↦ pq/t
    /// and conjugated by W: W(x)^{-1} Σ c(x; pq/t) W(q^μ x) f(q^μ x).
    pub fn apply_numeric_gauged(
        &self,
        f: &dyn Fn(&[HPComplex]) -> Result<HPComplex, OperatorError>,
        x: &[HPComplex],
        t: &HPComplex,
        ctx: &EllipticContext,
    ) -> Result<HPComplex, OperatorError> {
        let w = GaugeWeight { n: self.n, t: t.clone() };
        let t_dual = &(&ctx.p * &ctx.q) / t;
        let wf = |y: &[HPComplex]| -> Result<HPComplex, OperatorError> { Ok(&w.eval(y, ctx)? * &f(y)?) };
        let inner = self.apply_numeric(&wf, x, &t_dual, ctx)?;
        Ok(&inner / &w.eval(x, ctx)?)
    }
}

/// lhs, rhs and relative residual of a two-path numeric comparison.
#[derive(Clone, Debug)]
pub struct GaugeCheck {
    pub lhs: HPComplex,
    pub rhs: HPComplex,
    pub residual: f64,
}

fn context(sample: &GaugeSample) -> Result<EllipticContext, OperatorError> {
    let params = EllipticParams::with_precision(sample.p.clone(), sample.q.clone())?;
    Ok(EllipticContext::new(&params)?)
}

fn poly_fn(f: &LaurentPoly<HPComplex>) -> impl Fn(&[HPComplex]) -> Result<HPComplex, OperatorError> + '_ {
    move |y: &[HPComplex]| Ok(f.eval(y))
}

/// D^(k) f against W^{-1} D^(k)|_{t→pq/t} W f at one point.
pub fn gauge_conjugate_ruijsenaars_check(
    k: usize,
    sample: &GaugeSample,
    f: &LaurentPoly<HPComplex>,
) -> Result<GaugeCheck, OperatorError> {
    let n = sample.x.len();
    let op = DifferenceOperator::ruijsenaars(k, n, 0)?;
    let ctx = context(sample)?;
    let g = poly_fn(f);
    let lhs = op.apply_numeric(&g, &sample.x, &sample.t, &ctx)?;
    let rhs = op.apply_numeric_gauged(&g, &sample.x, &sample.t, &ctx)?;
    let residual = lhs.rel_diff(&rhs, 1e-30);
    Ok(GaugeCheck { lhs, rhs, residual })
}

/// H^(k) f against (−1)^k q^{k(k+1)/2} t^{−kn} W^{-1} H̃^(k)|_{t→pq/t} W f.
pub fn noumi_sano_gauge_check(
    k: usize,
    sample: &GaugeSample,
    f: &LaurentPoly<HPComplex>,
) -> Result<GaugeCheck, OperatorError> {
    let n = sample.x.len();
    let ctx = context(sample)?;
    let g = poly_fn(f);
    let h = DifferenceOperator::new(OperatorKind::NoumiSanoGauged, k, n, 0)?;
    let ht = DifferenceOperator::new(OperatorKind::NoumiSano, k, n, 0)?;
    let lhs = h.apply_numeric(&g, &sample.x, &sample.t, &ctx)?;
    let k = k as i64;
    let mut pref = &sample.q.powi(k * (k + 1) / 2) * &sample.t.powi(-k * n as i64);
    if k % 2 == 1 {
        pref = -pref;
    }
    let rhs = &pref * &ht.apply_numeric_gauged(&g, &sample.x, &sample.t, &ctx)?;
    let residual = lhs.rel_diff(&rhs, 1e-30);
    Ok(GaugeCheck { lhs, rhs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::QtField;
    use crate::symmetric_core::{monomial_sym, SignedPartition};

    fn c(re: f64, im: f64) -> HPComplex {
        HPComplex::from_parts(re, im, 256)
    }

    fn sample(n: usize) -> GaugeSample {
        let xs = [c(0.9, 0.3), c(-0.4, 1.1), c(0.7, -0.8), c(1.2, 0.2)];
        GaugeSample { x: xs[..n].to_vec(), p: c(0.05, 0.02), q: c(0.3, 0.2), t: c(0.35, -0.15) }
    }

    fn f(n: usize) -> LaurentPoly<HPComplex> {
        let lam = SignedPartition::new([vec![1], vec![0; n - 1]].concat()).unwrap();
        monomial_sym(&lam, &HPComplex::one(256)).add(&LaurentPoly::constant(n, c(0.5, 0.25)))
    }

    #[test]
    fn ruijsenaars_gauge_invariance() {
        for n in 2..=3 {
            for k in 0..=n {
                let r = gauge_conjugate_ruijsenaars_check(k, &sample(n), &f(n)).unwrap();
                assert!(r.residual < 2f64.powi(-(256 - 20)), "n={n} k={k}: {}", r.residual);
            }
        }
    }

    #[test]
    fn noumi_sano_gauge_relation() {
        for k in 0..=2 {
            let r = noumi_sano_gauge_check(k, &sample(2), &f(2)).unwrap();
            assert!(r.residual < 1e-60, "k={k}: {}", r.residual);
        }
    }

    #[test]
    fn numeric_matches_exact_series() {
        // exact D^(1) over numeric (q,t) to high p-order vs the pointwise θ evaluation
        let s = sample(2);
        let p = c(1e-4, 0.0);
        let ctx = EllipticContext::new(&EllipticParams::with_precision(p.clone(), s.q.clone()).unwrap()).unwrap();
        let qt = QtField::numeric(s.q.clone(), s.t.clone());
        let poly = f(2);
        let op = DifferenceOperator::ruijsenaars(1, 2, 4).unwrap();
        let series = op.compile(&qt).unwrap().apply(&crate::scalar_ring::PSeries::constant(poly.clone(), 4)).unwrap();
        let mut approx = HPComplex::zero(256);
        for j in 0..=4 {
            approx = &approx + &(&series.coeff(j).eval(&s.x) * &p.powi(j as i64));
        }
        let exact = op.apply_numeric(&poly_fn(&poly), &s.x, &s.t, &ctx).unwrap();
        assert!(approx.rel_diff(&exact, 1e-30) < 1e-18);
    }
}

use super::{qpochhammer_inf, EllipticError, EllipticParams};
use crate::scalar_ring::HPComplex;

/// Precomputed state for repeated Γ_{p,q} evaluation inside quadrature.
///
/// Γ is evaluated through
/// log Γ(x) = Σ_{m≥1} (x^m − (pq/x)^m) / (m(1−p^m)(1−q^m)),
/// valid for |pq| < |x| < 1, after moving x into the annulus centred at
/// √|pq| with Γ(sx) = θ(x)Γ(x), s ∈ {p, q}. The reference double product
/// `gamma_pq` stays the certified path; tests pin the two together.
#[derive(Clone, Debug)]
pub struct EllipticContext {
    pub p: HPComplex,
    pub q: HPComplex,
    pub tol: f64,
    prec: u32,
    pq: HPComplex,
    weights: Vec<HPComplex>,
    shift_by_p: bool,
    poch_p: HPComplex,
    poch_q: HPComplex,
}

impl EllipticContext {
    pub fn new(params: &EllipticParams) -> Result<Self, EllipticError> {
        let prec = params.prec();
        let p = params.p.with_prec(prec);
        let q = params.q.with_prec(prec);
        if q.is_zero_exact() {
            return Err(EllipticError::ParameterDomain("q must be nonzero".into()));
        }
        let pq = &p * &q;
        let ap = p.abs_f64();
        let aq = q.abs_f64();
        let shift_by_p = ap > aq;
        let mut weights = Vec::new();
        if !p.is_zero_exact() {
            // worst-case convergence ratio after reduction is sqrt(min(|p|,|q|))
            let rho = ap.min(aq).sqrt();
            let m_max = ((params.tol * (1.0 - rho)).log2() / rho.log2()).ceil() as usize + 2;
            let one = HPComplex::one(prec);
            let mut pm = p.clone();
            let mut qm = q.clone();
            for m in 1..=m_max {
                let d = &(&one - &pm) * &(&one - &qm);
                weights.push(d.scale_i64(m as i64).recip());
                pm = &pm * &p;
                qm = &qm * &q;
            }
        }
        let poch_p = qpochhammer_inf(&p, &p, params.tol)?;
        let poch_q = qpochhammer_inf(&q, &q, params.tol)?;
        Ok(EllipticContext { p, q, tol: params.tol, prec, pq, weights, shift_by_p, poch_p, poch_q })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn params(&self) -> EllipticParams {
        EllipticParams { p: self.p.clone(), q: self.q.clone(), tol: self.tol }
    }

    /// (p; p)_∞.
    pub fn poch_p(&self) -> &HPComplex {
        &self.poch_p
    }

    /// (q; q)_∞.
    pub fn poch_q(&self) -> &HPComplex {
        &self.poch_q
    }

    pub fn theta_p(&self, x: &HPComplex) -> Result<HPComplex, EllipticError> {
        super::theta(x, &self.p, self.tol)
    }

    pub fn theta_q(&self, x: &HPComplex) -> Result<HPComplex, EllipticError> {
        super::theta(x, &self.q, self.tol)
    }

    pub fn gamma(&self, x: &HPComplex) -> Result<HPComplex, EllipticError> {
        if x.is_zero_exact() {
            return Err(EllipticError::Domain("gamma at x = 0".into()));
        }
        let x = x.with_prec(self.prec);
        if self.p.is_zero_exact() {
            let d = qpochhammer_inf(&x, &self.q, self.tol)?;
            if d.abs_f64() < 10.0 * self.tol {
                return Err(EllipticError::PoleProximity { j: 0, k: 0 });
            }
            return Ok(d.recip());
        }
        let (s, other) = if self.shift_by_p { (&self.p, &self.q) } else { (&self.q, &self.p) };
        let h = s.log2_abs();
        let center = 0.5 * (self.p.log2_abs() + self.q.log2_abs());
        let b = ((center - x.log2_abs()) / h).round() as i64;
        let mut factor = HPComplex::one(self.prec);
        let mut y = x;
        if b > 0 {
            for _ in 0..b {
                // Γ(y) = Γ(s y) / θ_other(y)
                let th = super::theta(&y, other, self.tol)?;
                if th.abs_f64() < 10.0 * self.tol {
                    return Err(EllipticError::PoleProximity { j: 0, k: 0 });
                }
                factor = &factor / &th;
                y = &y * s;
            }
        } else {
            let si = s.recip();
            for _ in 0..(-b) {
                // Γ(y) = θ_other(y/s) Γ(y/s)
                y = &y * &si;
                let th = super::theta(&y, other, self.tol)?;
                factor = &factor * &th;
            }
        }
        Ok(&factor * &self.log_series(&y)?.exp())
    }

    fn log_series(&self, x: &HPComplex) -> Result<HPComplex, EllipticError> {
        let y = &self.pq / x;
        let r = x.abs_f64().max(y.abs_f64());
        if r >= 1.0 {
            return Err(EllipticError::PoleProximity { j: 0, k: 0 });
        }
        let m = (((self.tol * (1.0 - r)).log2() / r.log2()).ceil() as usize + 1).max(1);
        let m = m.min(self.weights.len());
        let mut xm = x.clone();
        let mut ym = y.clone();
        let mut acc = HPComplex::zero(self.prec);
        for w in &self.weights[..m] {
            acc = &acc + &(w * &(&xm - &ym));
            xm = &xm * x;
            ym = &ym * &y;
        }
        Ok(acc)
    }

    /// 1/(Γ(u)Γ(1/u)) = θ_p(1/u) θ_q(u), an entire expression in u ≠ 0.
    pub fn inv_gamma_pair(&self, u: &HPComplex) -> Result<HPComplex, EllipticError> {
        let a = self.theta_p(&u.recip())?;
        let b = self.theta_q(u)?;
        Ok(&a * &b)
    }

    /// Γ(a)/Γ(b).
    pub fn gamma_ratio(&self, a: &HPComplex, b: &HPComplex) -> Result<HPComplex, EllipticError> {
        Ok(&self.gamma(a)? / &self.gamma(b)?)
    }

    /// Product of Γ over a list of arguments.
    pub fn gamma_prod(&self, args: &[HPComplex]) -> Result<HPComplex, EllipticError> {
        let mut acc = HPComplex::one(self.prec);
        for a in args {
            acc = &acc * &self.gamma(a)?;
        }
        Ok(acc)
    }

    /// (x; q, p)_n via θ_p products.
    pub fn elliptic_factorial(&self, x: &HPComplex, n: i64) -> Result<HPComplex, EllipticError> {
        super::elliptic_factorial(x, n, &self.params())
    }
}

#[cfg(test)]
mod tests {
    use super::super::gamma_pq;
    use super::*;

    #[test]
    fn fast_gamma_matches_product() {
        for (p, q) in [((0.05, 0.1), (0.4, -0.2)), ((0.5, 0.2), (0.1, 0.05)), ((0.0, 0.0), (0.3, 0.3))] {
            let pr = EllipticParams::with_precision(
                HPComplex::from_parts(p.0, p.1, 256),
                HPComplex::from_parts(q.0, q.1, 256),
            )
            .unwrap();
            let ctx = EllipticContext::new(&pr).unwrap();
            for x in [(0.3, 0.2), (1.7, -0.9), (0.01, 0.02), (-3.0, 0.5), (0.9, 0.45)] {
                let x = HPComplex::from_parts(x.0, x.1, 256);
                let a = ctx.gamma(&x).unwrap();
                let b = gamma_pq(&x, &pr).unwrap();
                assert!(a.rel_diff(&b, 1e-30) < 1e-70, "{x:?}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn inv_gamma_pair_identity() {
        let pr = EllipticParams::with_precision(
            HPComplex::from_parts(0.1, 0.05, 256),
            HPComplex::from_parts(0.3, -0.1, 256),
        )
        .unwrap();
        let ctx = EllipticContext::new(&pr).unwrap();
        let u = HPComplex::from_parts(0.6, 0.8, 256);
        let lhs = ctx.inv_gamma_pair(&u).unwrap();
        let rhs = (&ctx.gamma(&u).unwrap() * &ctx.gamma(&u.recip()).unwrap()).recip();
        assert!(lhs.rel_diff(&rhs, 1e-30) < 1e-70);
    }
}

//! θ_p, the elliptic gamma function Γ_{p,q}, q-Pochhammer symbols and
//! elliptic shifted factorials.

mod expansion;
mod fast;

use thiserror::Error;

use crate::scalar_ring::HPComplex;

pub use expansion::{gamma_p_expansion, theta_ratio_series, MAX_P_ORDER};
pub use fast::EllipticContext;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("parameter domain: {0}")]
    ParameterDomain(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument within tolerance of a pole of the elliptic gamma function at (j, k) = ({j}, {k})")]
    PoleProximity { j: u32, k: u32 },
    #[error("order {0} exceeds the supported series envelope")]
    Envelope(usize),
}

/// Nomes p, q with a truncation target.
#[derive(Clone, Debug)]
pub struct EllipticParams {
    pub p: HPComplex,
    pub q: HPComplex,
    pub tol: f64,
}

impl EllipticParams {
    pub fn new(p: HPComplex, q: HPComplex, tol: f64) -> Result<Self, EllipticError> {
        if !(tol > 0.0) {
            return Err(EllipticError::ParameterDomain("tol must be positive".into()));
        }
        check_nome(&p, "p")?;
        check_nome(&q, "q")?;
        Ok(EllipticParams { p, q, tol })
    }

    /// Truncation target tied to the working precision, 8 bits above the
    /// rounding floor so that pole detection is not defeated by rounding.
    pub fn with_precision(p: HPComplex, q: HPComplex) -> Result<Self, EllipticError> {
        let prec = p.prec().max(q.prec());
        Self::new(p, q, tol_for_prec(prec))
    }

    pub fn prec(&self) -> u32 {
        self.p.prec().max(self.q.prec())
    }
}

pub fn tol_for_prec(prec: u32) -> f64 {
    2f64.powi(-(prec as i32) + 8).max(f64::MIN_POSITIVE)
}

fn check_nome(x: &HPComplex, name: &str) -> Result<(), EllipticError> {
    if x.abs_f64() >= 1.0 {
        return Err(EllipticError::ParameterDomain(format!("|{name}| must be < 1")));
    }
    Ok(())
}

/// (x; q)_∞ truncated once the certified tail bound drops below `tol`.
pub fn qpochhammer_inf(x: &HPComplex, q: &HPComplex, tol: f64) -> Result<HPComplex, EllipticError> {
    check_nome(q, "q")?;
    let prec = x.prec().max(q.prec());
    let one = HPComplex::one(prec);
    if x.is_zero_exact() {
        return Ok(one);
    }
    let lq = q.log2_abs();
    let mut term = x.with_prec(prec);
    let mut acc = one.clone();
    let mut log_mag = x.log2_abs();
    let denom = if q.is_zero_exact() { 1.0 } else { 1.0 - q.abs_f64() };
    loop {
        acc = &acc * &(&one - &term);
        // tail factors start at x q^{j+1}
        if q.is_zero_exact() {
            return Ok(acc);
        }
        log_mag += lq;
        let mag = 2f64.powf(log_mag);
        if log_mag < -1.0 && 2.0 * mag / denom <= tol {
            return Ok(acc);
        }
        term = &term * q;
    }
}

/// θ_p(x) = (x; p)_∞ (p/x; p)_∞.
pub fn theta(x: &HPComplex, p: &HPComplex, tol: f64) -> Result<HPComplex, EllipticError> {
    if x.is_zero_exact() {
        return Err(EllipticError::Domain("theta at x = 0".into()));
    }
    let a = qpochhammer_inf(x, p, tol)?;
    let b = qpochhammer_inf(&(p / x), p, tol)?;
    Ok(&a * &b)
}

/// Γ_{p,q}(x) from the defining double product, row by row in p.
///
/// Row j contributes (p^{j+1}q/x; q)_∞ / (p^j x; q)_∞. Rows are dropped once
/// the geometric tail of the row bounds falls below `tol`.
pub fn gamma_pq(x: &HPComplex, params: &EllipticParams) -> Result<HPComplex, EllipticError> {
    if x.is_zero_exact() {
        return Err(EllipticError::Domain("gamma at x = 0".into()));
    }
    let (p, q, tol) = (&params.p, &params.q, params.tol);
    let prec = x.prec().max(params.prec());
    let one = HPComplex::one(prec);
    let pq_over_x = &(p * q) / x;
    let ap = p.abs_f64();
    let aq = q.abs_f64();
    let mut num_base = pq_over_x.clone();
    let mut den_base = x.with_prec(prec);
    let mut acc = one.clone();
    let mut j: u32 = 0;
    loop {
        // denominator row: (p^j x; q)_∞ with pole checks per factor
        let mut f = den_base.clone();
        let mut k: u32 = 0;
        let mut row_den = one.clone();
        loop {
            let fac = &one - &f;
            if fac.abs_f64() < 10.0 * tol {
                return Err(EllipticError::PoleProximity { j, k });
            }
            row_den = &row_den * &fac;
            let mag = f.abs_f64() * aq;
            if mag < 0.5 && 2.0 * mag / (1.0 - aq) <= tol * 0.5 {
                break;
            }
            if aq == 0.0 {
                break;
            }
            f = &f * q;
            k += 1;
        }
        let row_num = qpochhammer_inf(&num_base, q, tol * 0.5)?;
        acc = &acc * &(&row_num / &row_den);
        if ap == 0.0 {
            return Ok(acc);
        }
        num_base = &num_base * p;
        den_base = &den_base * p;
        j += 1;
        let m = num_base.abs_f64() + den_base.abs_f64();
        let tail = 2.0 * m / ((1.0 - aq) * (1.0 - ap));
        if m < 0.5 && tail <= tol {
            return Ok(acc);
        }
    }
}

/// (x; q, p)_n from θ products; the Γ quotient is never formed.
pub fn elliptic_factorial(x: &HPComplex, n: i64, params: &EllipticParams) -> Result<HPComplex, EllipticError> {
    let prec = x.prec().max(params.prec());
    let mut acc = HPComplex::one(prec);
    let q = &params.q;
    if n >= 0 {
        let mut y = x.with_prec(prec);
        for _ in 0..n {
            let th = theta(&y, &params.p, params.tol)?;
            if th.abs_f64() < 10.0 * params.tol {
                return Err(EllipticError::Domain("vanishing theta factor in elliptic factorial".into()));
            }
            acc = &acc * &th;
            y = &y * q;
        }
        Ok(acc)
    } else {
        let qi = q.recip();
        let mut y = &x.with_prec(prec) * &qi;
        for _ in 0..(-n) {
            let th = theta(&y, &params.p, params.tol)?;
            if th.abs_f64() < 10.0 * params.tol {
                return Err(EllipticError::Domain("vanishing theta factor in elliptic factorial".into()));
            }
            acc = &acc * &th;
            y = &y * &qi;
        }
        Ok(acc.recip())
    }
}

/// Certified tail bound of `qpochhammer_inf` after J factors, in log2.
pub fn pochhammer_tail_log2(x: &HPComplex, q: &HPComplex, factors: u32) -> f64 {
    let l = x.log2_abs() + q.log2_abs() * factors as f64;
    1.0 + l - (1.0 - q.abs_f64()).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> HPComplex {
        HPComplex::from_parts(re, im, 256)
    }

    fn params() -> EllipticParams {
        EllipticParams::with_precision(c(0.12, 0.05), c(-0.2, 0.31)).unwrap()
    }

    #[test]
    fn pochhammer_basics() {
        let q = c(0.5, 0.0);
        let z = qpochhammer_inf(&HPComplex::zero(256), &q, 1e-70).unwrap();
        assert_eq!(z, HPComplex::one(256));
        let x = c(0.3, -0.7);
        let lhs = qpochhammer_inf(&x, &q, 1e-75).unwrap();
        let rhs = &(&HPComplex::one(256) - &x) * &qpochhammer_inf(&(&x * &q), &q, 1e-75).unwrap();
        assert!(lhs.rel_diff(&rhs, 1e-30) < 1e-70);
        assert!(qpochhammer_inf(&x, &c(1.0, 0.0), 1e-10).is_err());
    }

    #[test]
    fn theta_identities() {
        let p = c(0.2, 0.1);
        let x = c(0.7, 0.4);
        let tol = 1e-75;
        let th = theta(&x, &p, tol).unwrap();
        let sym = theta(&(&p / &x), &p, tol).unwrap();
        assert!(th.rel_diff(&sym, 1e-30) < 1e-70);
        let shifted = theta(&(&p * &x), &p, tol).unwrap();
        let expect = -(&th / &x);
        assert!(shifted.rel_diff(&expect, 1e-30) < 1e-70);
        let zero_p = theta(&x, &HPComplex::zero(256), tol).unwrap();
        assert!(zero_p.rel_diff(&(&HPComplex::one(256) - &x), 1e-30) < 1e-70);
        assert!(theta(&HPComplex::zero(256), &p, tol).is_err());
    }

    #[test]
    fn gamma_shift_and_reflection() {
        let pr = params();
        let x = c(0.4, 0.9);
        let g = gamma_pq(&x, &pr).unwrap();
        let gq = gamma_pq(&(&pr.q * &x), &pr).unwrap();
        let th = theta(&x, &pr.p, pr.tol).unwrap();
        assert!(gq.rel_diff(&(&th * &g), 1e-30) < 1e-70);
        let refl = gamma_pq(&(&(&pr.p * &pr.q) / &x), &pr).unwrap();
        assert!((&refl * &g).rel_diff(&HPComplex::one(256), 1e-30) < 1e-70);
    }

    #[test]
    fn gamma_at_p_zero() {
        let pr = EllipticParams::with_precision(HPComplex::zero(256), c(0.3, 0.2)).unwrap();
        let x = c(0.5, -0.5);
        let g = gamma_pq(&x, &pr).unwrap();
        let expect = qpochhammer_inf(&x, &pr.q, pr.tol).unwrap().recip();
        assert!(g.rel_diff(&expect, 1e-30) < 1e-70);
    }

    #[test]
    fn gamma_pole_reported() {
        let pr = params();
        let x = &HPComplex::one(256) / &(&pr.p * &pr.q);
        match gamma_pq(&x, &pr) {
            Err(EllipticError::PoleProximity { j: 1, k: 1 }) => {}
            other => panic!("expected pole at (1,1), got {other:?}"),
        }
    }

    #[test]
    fn elliptic_factorial_cases() {
        let pr = params();
        let x = c(0.3, 0.8);
        assert_eq!(elliptic_factorial(&x, 0, &pr).unwrap(), HPComplex::one(256));
        let one = elliptic_factorial(&x, 1, &pr).unwrap();
        assert!(one.rel_diff(&theta(&x, &pr.p, pr.tol).unwrap(), 1e-30) < 1e-70);
        // (x)_{-n} (x q^{-n})_n = 1
        for n in 1..4 {
            let a = elliptic_factorial(&x, -n, &pr).unwrap();
            let b = elliptic_factorial(&(&x * &pr.q.powi(-n)), n, &pr).unwrap();
            assert!((&a * &b).rel_diff(&HPComplex::one(256), 1e-30) < 1e-70);
        }
    }
}

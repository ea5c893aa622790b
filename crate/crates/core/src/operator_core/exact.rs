//! Exact application over a field F (ℚ(q,t) or numeric (q,t)) to order p^K.
//!
//! Each θ_p(κ x_i/x_j) splits as (1 − κ x_i/x_j)·R(κ x_i/x_j) with R a p-series
//! of Laurent polynomials. The linear parts in denominators are collected per
//! term, the terms are brought over their least common multiple, and the sum is
//! divided back out exactly.

use std::collections::BTreeMap;

use super::terms::{shift_terms, ShiftTerm};
use super::{DifferenceOperator, OperatorError};
use crate::elliptic_core::theta_ratio_series;
use crate::scalar_ring::{Field, LaurentPoly, PSeries, QtField, Ring};

/// x_hi − q^qa t^tb x_lo, with hi > lo.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearFactor {
    pub hi: usize,
    pub lo: usize,
    pub qa: i32,
    pub tb: i32,
}

impl LinearFactor {
    fn poly<F: Field>(&self, n: usize, qt: &QtField<F>) -> LaurentPoly<F> {
        let kappa = qt.mono(self.qa as i64, self.tb as i64);
        let mut a = vec![0; n];
        a[self.hi] = 1;
        let mut b = vec![0; n];
        b[self.lo] = 1;
        LaurentPoly::monomial(n, &a, qt.one()).sub(&LaurentPoly::monomial(n, &b, kappa))
    }
}

#[derive(Clone, Debug)]
struct CompiledTerm<F: Field> {
    shift: Vec<u32>,
    coeff: PSeries<LaurentPoly<F>>,
    den: BTreeMap<LinearFactor, u32>,
}

/// An operator with every coefficient expanded to order p^K over F.
#[derive(Clone, Debug)]
pub struct CompiledOperator<F: Field> {
    pub op: DifferenceOperator,
    qt: QtField<F>,
    terms: Vec<CompiledTerm<F>>,
    lcm: BTreeMap<LinearFactor, u32>,
}

fn mono_vec(n: usize, i: usize, e: i32) -> Vec<i32> {
    let mut v = vec![0; n];
    v[i] = e;
    v
}

fn compile_term<F: Field>(
    term: &ShiftTerm,
    n: usize,
    order: usize,
    qt: &QtField<F>,
) -> Result<CompiledTerm<F>, OperatorError> {
    let mut scalar = qt.mono(term.qexp, term.texp);
    if term.sign < 0 {
        scalar = scalar.negate();
    }
    let mut coeff = PSeries::constant(LaurentPoly::constant(n, scalar), order);
    let mut den = BTreeMap::new();
    for (arg, &power) in &term.thetas {
        let kappa = qt.mono(arg.qa as i64, arg.tb as i64);
        if arg.i == arg.j {
            let c = LaurentPoly::constant(n, kappa.clone());
            let lin = qt.one().minus(&kappa);
            let th = theta_ratio_series(&c, order).scale(&LaurentPoly::constant(n, lin));
            let th = if power > 0 {
                th
            } else {
                th.inv().map_err(|_| OperatorError::Singular(format!("θ_p(q^{} t^{}) vanishes", arg.qa, arg.tb)))?
            };
            for _ in 0..power.unsigned_abs() {
                coeff = coeff.mul(&th);
            }
            continue;
        }
        let mut z_exps = vec![0; n];
        z_exps[arg.i] = 1;
        z_exps[arg.j] = -1;
        let z = LaurentPoly::monomial(n, &z_exps, kappa.clone());
        let r = theta_ratio_series(&z, order);
        // 1 − κ x_i/x_j = s · x_j^{-1} · (x_hi − κ' x_lo)
        let (factor, s) = if arg.j > arg.i {
            (LinearFactor { hi: arg.j, lo: arg.i, qa: arg.qa, tb: arg.tb }, qt.one())
        } else {
            (LinearFactor { hi: arg.i, lo: arg.j, qa: -arg.qa, tb: -arg.tb }, kappa.negate())
        };
        if power > 0 {
            let lin = LaurentPoly::monomial(n, &mono_vec(n, arg.j, -1), s).mul(&factor.poly(n, qt));
            let lin = PSeries::constant(lin, order);
            for _ in 0..power {
                coeff = coeff.mul(&r).mul(&lin);
            }
        } else {
            let ri = r.inv().map_err(|e| OperatorError::Singular(e.to_string()))?;
            let si = s.inverse().ok_or_else(|| OperatorError::Singular("zero theta prefactor".into()))?;
            let m = PSeries::constant(LaurentPoly::monomial(n, &mono_vec(n, arg.j, 1), si), order);
            for _ in 0..(-power) {
                coeff = coeff.mul(&ri).mul(&m);
            }
            *den.entry(factor).or_insert(0) += (-power) as u32;
        }
    }
    Ok(CompiledTerm { shift: term.shift.clone(), coeff, den })
}

impl<F: Field> CompiledOperator<F> {
    pub fn new(op: DifferenceOperator, qt: &QtField<F>) -> Result<Self, OperatorError> {
        let raw = shift_terms(op.kind, op.k, op.n);
        let mut terms = Vec::with_capacity(raw.len());
        let mut lcm: BTreeMap<LinearFactor, u32> = BTreeMap::new();
        for t in &raw {
            let c = compile_term(t, op.n, op.p_order, qt)?;
            for (f, &m) in &c.den {
                let e = lcm.entry(*f).or_insert(0);
                *e = (*e).max(m);
            }
            terms.push(c);
        }
        Ok(CompiledOperator { op, qt: qt.clone(), terms, lcm })
    }

    pub fn qt(&self) -> &QtField<F> {
        &self.qt
    }

    /// (T^μ g)(x) = g(q^μ x).
    fn shift_poly(&self, g: &LaurentPoly<F>, mu: &[u32]) -> LaurentPoly<F> {
        if mu.iter().all(|&m| m == 0) {
            return g.clone();
        }
        g.scale_by_mono(|m| {
            let e: i64 = mu.iter().enumerate().map(|(i, &s)| s as i64 * m[i] as i64).sum();
            self.qt.mono(e, 0)
        })
    }

    /// Applies the operator to f ∈ V, truncating at the operator's order.
    pub fn apply(&self, f: &PSeries<LaurentPoly<F>>) -> Result<PSeries<LaurentPoly<F>>, OperatorError> {
        let n = self.op.n;
        let order = self.op.p_order;
        if f.order() < order {
            return Err(OperatorError::Envelope(format!(
                "input series has order {} below the operator order {order}",
                f.order()
            )));
        }
        let f = f.truncate(order);
        let proto = LaurentPoly::zero(n, &self.qt.zero());
        if let Some(c) = f.coeffs().iter().find(|c| !c.is_zero()) {
            if c.nvars() != n {
                return Err(OperatorError::Arity { expected: n, got: c.nvars() });
            }
        }
        let mut acc = PSeries::zero(order, &proto);
        for term in &self.terms {
            let shifted = PSeries::new(
                f.coeffs().iter().map(|c| self.shift_poly(c, &term.shift)).collect(),
                order,
                &proto,
            );
            let mut other = LaurentPoly::one(n, &self.qt.zero());
            for (fac, &m) in &self.lcm {
                let have = term.den.get(fac).copied().unwrap_or(0);
                let p = fac.poly(n, &self.qt);
                for _ in have..m {
                    other = other.mul(&p);
                }
            }
            let prod = term.coeff.mul(&shifted).map(|c| c.mul(&other));
            acc = acc.add(&prod);
        }
        let mut out = Vec::with_capacity(order + 1);
        for c in acc.coeffs() {
            let mut c = c.clone();
            for (fac, &m) in &self.lcm {
                let kappa = self.qt.mono(fac.qa as i64, fac.tb as i64);
                for _ in 0..m {
                    c = c.div_linear(fac.hi, fac.lo, &kappa).ok_or(OperatorError::DenominatorNotCleared(*fac))?;
                }
            }
            let c = c.prune();
            if !c.is_symmetric() {
                return Err(OperatorError::NotSymmetric);
            }
            out.push(c);
        }
        Ok(PSeries::new(out, order, &proto))
    }
}

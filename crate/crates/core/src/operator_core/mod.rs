//! Ruijsenaars operators D^(k), Noumi–Sano operators H̃^(k), their gauged
//! form H^(k), and the gauge weight W, applied exactly over ℚ(q,t)[[p]] or
//! pointwise at numeric parameters.

mod exact;
mod numeric;
pub mod terms;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elliptic_core::{EllipticError, MAX_P_ORDER};
use crate::scalar_ring::{Field, LaurentPoly, PSeries, QtField, RationalFn, MAX_VARS};
use crate::symmetric_core::SignedPartition;

pub use exact::{CompiledOperator, LinearFactor};
pub use numeric::{gauge_conjugate_ruijsenaars_check, noumi_sano_gauge_check, GaugeSample, GaugeWeight};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("outside the supported envelope: {0}")]
    Envelope(String),
    #[error("expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("denominator factor {0:?} did not clear")]
    DenominatorNotCleared(LinearFactor),
    #[error("operator output is not symmetric")]
    NotSymmetric,
    #[error("singular coefficient: {0}")]
    Singular(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    /// D^(k)
    Ruijsenaars,
    /// H̃^(k)
    NoumiSano,
    /// H^(k)
    NoumiSanoGauged,
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::Ruijsenaars => "D",
            OperatorKind::NoumiSano => "Htilde",
            OperatorKind::NoumiSanoGauged => "H",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "D" | "ruijsenaars" => Some(OperatorKind::Ruijsenaars),
            "Htilde" | "noumi-sano" => Some(OperatorKind::NoumiSano),
            "H" | "noumi-sano-gauged" => Some(OperatorKind::NoumiSanoGauged),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DifferenceOperator {
    pub kind: OperatorKind,
    pub k: usize,
    pub n: usize,
    pub p_order: usize,
}

/// Compiled symbolic operators, shared across calls.
fn symbolic_cache() -> &'static Mutex<HashMap<DifferenceOperator, Arc<CompiledOperator<RationalFn>>>> {
    static CACHE: OnceLock<Mutex<HashMap<DifferenceOperator, Arc<CompiledOperator<RationalFn>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl DifferenceOperator {
    pub fn new(kind: OperatorKind, k: usize, n: usize, p_order: usize) -> Result<Self, OperatorError> {
        if n == 0 || n > MAX_VARS {
            return Err(OperatorError::Envelope(format!("n = {n} outside 1..={MAX_VARS}")));
        }
        if kind == OperatorKind::Ruijsenaars && k > n {
            return Err(OperatorError::Envelope(format!("D^({k}) needs k ≤ n = {n}")));
        }
        if p_order > MAX_P_ORDER {
            return Err(OperatorError::Envelope(format!("p-order {p_order} > {MAX_P_ORDER}")));
        }
        Ok(DifferenceOperator { kind, k, n, p_order })
    }

    pub fn ruijsenaars(k: usize, n: usize, p_order: usize) -> Result<Self, OperatorError> {
        Self::new(OperatorKind::Ruijsenaars, k, n, p_order)
    }

    pub fn compile<F: Field>(&self, qt: &QtField<F>) -> Result<CompiledOperator<F>, OperatorError> {
        CompiledOperator::new(*self, qt)
    }

    /// Compiled form over ℚ(q,t), built once per operator.
    pub fn symbolic(&self) -> Result<Arc<CompiledOperator<RationalFn>>, OperatorError> {
        if let Some(c) = symbolic_cache().lock().unwrap().get(self) {
            return Ok(c.clone());
        }
        // built outside the lock; a concurrent duplicate build is harmless
        let c = Arc::new(self.compile(&QtField::symbolic())?);
        symbolic_cache().lock().unwrap().entry(*self).or_insert_with(|| c.clone());
        Ok(c)
    }

    /// Exact application over ℚ(q,t).
    pub fn apply(&self, f: &PSeries<LaurentPoly<RationalFn>>) -> Result<PSeries<LaurentPoly<RationalFn>>, OperatorError> {
        self.symbolic()?.apply(f)
    }
}

fn nvars_of<F: Field>(f: &PSeries<LaurentPoly<F>>) -> usize {
    f.coeff(0).nvars()
}

/// D^(k) f to order p^K.
pub fn apply_ruijsenaars(
    k: usize,
    f: &PSeries<LaurentPoly<RationalFn>>,
    order: usize,
) -> Result<PSeries<LaurentPoly<RationalFn>>, OperatorError> {
    DifferenceOperator::ruijsenaars(k, nvars_of(f), order)?.apply(f)
}

/// H̃^(k) f or H^(k) f to order p^K.
pub fn apply_noumi_sano(
    kind: OperatorKind,
    k: usize,
    f: &PSeries<LaurentPoly<RationalFn>>,
    order: usize,
) -> Result<PSeries<LaurentPoly<RationalFn>>, OperatorError> {
    if kind == OperatorKind::Ruijsenaars {
        return Err(OperatorError::Envelope("expected a Noumi–Sano variant".into()));
    }
    DifferenceOperator::new(kind, k, nvars_of(f), order)?.apply(f)
}

/// e_k(t^{n−1}q^{λ_1}, t^{n−2}q^{λ_2}, …, q^{λ_n}).
pub fn macdonald_eigenvalue(lambda: &SignedPartition, k: usize) -> RationalFn {
    macdonald_eigenvalue_in(lambda, k, &QtField::symbolic())
}

pub fn macdonald_eigenvalue_in<F: Field>(lambda: &SignedPartition, k: usize, qt: &QtField<F>) -> F {
    let n = lambda.n();
    let z: Vec<F> = lambda
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &l)| qt.mono(l as i64, (n - 1 - i) as i64))
        .collect();
    // e_0..e_k by the usual recurrence
    let mut e = vec![qt.zero(); k + 1];
    e[0] = qt.one();
    for zi in &z {
        for j in (1..=k).rev() {
            e[j] = e[j].plus(&e[j - 1].times(zi));
        }
    }
    e[k].clone()
}

/// Eigenvalue of D^(k) at p = 0 on P_λ: t^{−k(k−1)/2} e_k(t^{n−1}q^{λ_1}, …, q^{λ_n}).
///
/// D^(k) carries no t^{k(k−1)/2} prefactor, so for k ≥ 2 this differs from
/// `macdonald_eigenvalue` by that power of t.
pub fn ruijsenaars_eigenvalue(lambda: &SignedPartition, k: usize) -> RationalFn {
    ruijsenaars_eigenvalue_in(lambda, k, &QtField::symbolic())
}

pub fn ruijsenaars_eigenvalue_in<F: Field>(lambda: &SignedPartition, k: usize, qt: &QtField<F>) -> F {
    let k2 = (k * k.saturating_sub(1) / 2) as i64;
    macdonald_eigenvalue_in(lambda, k, qt).times(&qt.mono(0, -k2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric_core::monomial_sym;

    fn sp(v: &[i32]) -> SignedPartition {
        SignedPartition::new(v.to_vec()).unwrap()
    }

    fn series(f: LaurentPoly<RationalFn>, k: usize) -> PSeries<LaurentPoly<RationalFn>> {
        PSeries::constant(f, k)
    }

    #[test]
    fn eigenvalue_specializations() {
        assert!(macdonald_eigenvalue(&sp(&[2, 1, 0]), 0).is_one());
        assert_eq!(macdonald_eigenvalue(&sp(&[0, 0, 0]), 1), RationalFn::parse("1+t+t^2").unwrap());
        assert_eq!(macdonald_eigenvalue(&sp(&[1, 0]), 1), RationalFn::parse("t*q+1").unwrap());
    }

    #[test]
    fn trivial_orders() {
        let f = series(monomial_sym(&sp(&[2, 0]), &RationalFn::one()), 1);
        assert_eq!(apply_ruijsenaars(0, &f, 1).unwrap(), f);
        let full = apply_ruijsenaars(2, &f, 1).unwrap();
        let q2 = RationalFn::q().powi(2).unwrap();
        assert_eq!(full, f.map(|c| c.scale(&q2)));
        assert_eq!(apply_noumi_sano(OperatorKind::NoumiSano, 0, &f, 1).unwrap(), f);
        assert_eq!(apply_noumi_sano(OperatorKind::NoumiSanoGauged, 0, &f, 1).unwrap(), f);
    }

    #[test]
    fn first_order_expansion_n2() {
        // D^(1) = Σ_i (t x_i − x_j)/(x_i − x_j)·(1 + (1−t)(t x_i² − x_j²)p/(t x_i x_j))·T_{q,x_i} + O(p²)
        let one = RationalFn::one();
        let t = RationalFn::t();
        let q = RationalFn::q();
        let x = |e: &[i32], r: RationalFn| LaurentPoly::monomial(2, e, r);
        let f = monomial_sym(&sp(&[1, 0]), &one);
        let out = apply_ruijsenaars(1, &series(f.clone(), 1), 1).unwrap();
        let c1 = one.sub(&t).div(&t).unwrap();
        let mut order0 = LaurentPoly::zero(2, &one);
        let mut order1 = LaurentPoly::zero(2, &one);
        for (i, j) in [(0usize, 1usize), (1, 0)] {
            let mut ei = [0; 2];
            ei[i] = 1;
            let mut ej = [0; 2];
            ej[j] = 1;
            let sign = if i == 0 { one.clone() } else { one.neg() };
            let lead = x(&ei, t.clone()).sub(&x(&ej, one.clone())).scale(&sign);
            let shifted = f.scale_by_mono(|m| q.powi(m[i] as i64).unwrap());
            let mut a = [0; 2];
            a[i] = 1;
            a[j] = -1;
            let corr = x(&a, c1.mul(&t)).sub(&x(&[-a[0], -a[1]], c1.clone()));
            order0 = order0.add(&lead.mul(&shifted));
            order1 = order1.add(&lead.mul(&corr).mul(&shifted));
        }
        // divide by x_1 − x_2 = −(x_2 − x_1)
        let neg = |p: LaurentPoly<RationalFn>| p.div_linear(1, 0, &one).unwrap().neg();
        assert_eq!(out.coeff(0), &neg(order0));
        assert_eq!(out.coeff(1), &neg(order1));
        // on the constant function the order-p term is −(1−t)²(1+t)/t·(x_1/x_2 + 1 + x_2/x_1)
        let c = apply_ruijsenaars(1, &series(LaurentPoly::one(2, &one), 1), 1).unwrap();
        let k = one.sub(&t).powi(2).unwrap().mul(&one.add(&t)).div(&t).unwrap().neg();
        let expect = x(&[1, -1], k.clone()).add(&x(&[0, 0], k.clone())).add(&x(&[-1, 1], k));
        assert_eq!(c.coeff(1), &expect);
    }

    #[test]
    fn ruijsenaars_commute_n2() {
        let f = series(monomial_sym(&sp(&[1, 0]), &RationalFn::one()), 2);
        let d1 = DifferenceOperator::ruijsenaars(1, 2, 2).unwrap();
        let d2 = DifferenceOperator::ruijsenaars(2, 2, 2).unwrap();
        let a = d1.apply(&d2.apply(&f).unwrap()).unwrap();
        let b = d2.apply(&d1.apply(&f).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn numeric_field_matches_symbolic() {
        use crate::scalar_ring::HPComplex;
        let q = HPComplex::from_parts(0.3, 0.1, 256);
        let t = HPComplex::from_parts(0.2, -0.4, 256);
        let qt = QtField::numeric(q, t);
        let f = series(monomial_sym(&sp(&[1, -1]), &RationalFn::one()), 1);
        let op = DifferenceOperator::new(OperatorKind::NoumiSano, 2, 2, 1).unwrap();
        let sym = op.apply(&f).unwrap();
        let fnum = f.map(|c| c.convert(&qt.zero(), |r| qt.eval(r).unwrap()));
        let num = op.compile(&qt).unwrap().apply(&fnum).unwrap();
        for k in 0..=1 {
            let s = sym.coeff(k).convert(&qt.zero(), |r| qt.eval(r).unwrap());
            let d = s.sub(num.coeff(k)).prune();
            assert!(d.is_empty(), "order {k}: {d:?}");
        }
    }
}

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::SpectralError;
use crate::scalar_ring::{Field, HPComplex, QtField, RationalFn};
use crate::symmetric_core::{cauchy_b_constants, cauchy_b_constants_in, SignedPartition, SymmetricError};

/// φ_λ(c)/N_λ = Σ_{k ≥ −λ_n} b_{λ+(k)^n} c^{|λ|+kn}, truncated at c^{c_order}.
///
/// N_λ is not rational in (q, t), so it is kept out of the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSeries<F: Field> {
    pub lambda: SignedPartition,
    pub c_order: usize,
    /// exponent of c → b_{λ+(k)^n}
    pub coeffs: BTreeMap<i64, F>,
}

impl PhiSeries<HPComplex> {
    /// N_λ Σ_e b_e c^e at a numeric c.
    pub fn value(&self, c: &HPComplex, n_lambda: &HPComplex) -> HPComplex {
        let mut s = HPComplex::zero(c.prec());
        for (&e, b) in &self.coeffs {
            s = &s + &(b * &c.powi(e));
        }
        &s * n_lambda
    }
}

impl PhiSeries<RationalFn> {
    pub fn eval(&self, qt: &QtField<HPComplex>) -> Result<PhiSeries<HPComplex>, SpectralError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&e, b)| {
                qt.eval(b)
                    .map(|v| (e, v))
                    .ok_or_else(|| SpectralError::Consistency(format!("b coefficient {b} is singular at (q, t)")))
            })
            .collect::<Result<_, _>>()?;
        Ok(PhiSeries { lambda: self.lambda.clone(), c_order: self.c_order, coeffs })
    }
}

fn build<F: Field>(
    lambda: &SignedPartition,
    c_order: usize,
    b_of: &dyn Fn(usize, usize) -> Result<Arc<BTreeMap<SignedPartition, F>>, SymmetricError>,
) -> Result<PhiSeries<F>, SpectralError> {
    let n = lambda.n();
    if n == 0 {
        return Err(SpectralError::Envelope("n must be positive".into()));
    }
    let size = lambda.size();
    let mut coeffs = BTreeMap::new();
    let mut k = -(lambda.last() as i64);
    loop {
        let e = size + k * n as i64;
        if e > c_order as i64 {
            break;
        }
        let mu = lambda.shift(k as i32);
        let table = b_of(n, e as usize)?;
        let b = table.get(&mu).ok_or_else(|| SpectralError::Consistency(format!("no Cauchy constant for {mu}")))?;
        if !b.is_zero() {
            coeffs.insert(e, b.clone());
        }
        k += 1;
    }
    Ok(PhiSeries { lambda: lambda.clone(), c_order, coeffs })
}

type BCache = Mutex<HashMap<(usize, usize), Arc<BTreeMap<SignedPartition, RationalFn>>>>;

fn b_cache() -> &'static BCache {
    static C: OnceLock<BCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// φ_λ(c)/N_λ with exact coefficients in ℚ(q,t).
pub fn phi_lambda_series(lambda: &SignedPartition, c_order: usize) -> Result<PhiSeries<RationalFn>, SpectralError> {
    build(lambda, c_order, &|n, d| {
        if let Some(b) = b_cache().lock().unwrap().get(&(n, d)) {
            return Ok(b.clone());
        }
        let b = Arc::new(cauchy_b_constants(n, d)?);
        b_cache().lock().unwrap().insert((n, d), b.clone());
        Ok(b)
    })
}

/// φ_λ(c)/N_λ with coefficients computed directly in the field of `qt`;
/// used for orders where the exact constants are too costly.
pub fn phi_lambda_series_in<F: Field>(
    lambda: &SignedPartition,
    c_order: usize,
    qt: &QtField<F>,
) -> Result<PhiSeries<F>, SpectralError> {
    build(lambda, c_order, &|n, d| Ok(Arc::new(cauchy_b_constants_in(n, d, qt)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[i32]) -> SignedPartition {
        SignedPartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn one_variable_series() {
        // (ct;q)_∞/(c;q)_∞ = Σ_k (t;q)_k/(q;q)_k c^k
        let s = phi_lambda_series(&sp(&[0]), 5).unwrap();
        let mut a = RationalFn::one();
        for k in 0..=5i64 {
            if k > 0 {
                let num = RationalFn::one().sub(&RationalFn::qt_monomial(k as i32 - 1, 1));
                let den = RationalFn::one().sub(&RationalFn::qt_monomial(k as i32, 0));
                a = a.mul(&num).div(&den).unwrap();
            }
            assert_eq!(s.coeffs.get(&k), Some(&a));
        }
    }

    #[test]
    fn support_is_a_residue_class() {
        for lam in [sp(&[1, 0]), sp(&[1, -1]), sp(&[2, 0, -1])] {
            let n = lam.n() as i64;
            let s = phi_lambda_series(&lam, 6).unwrap();
            assert!(!s.coeffs.is_empty());
            assert!(s.coeffs.keys().all(|e| (e - lam.size()).rem_euclid(n) == 0 && *e >= 0));
        }
        // λ = (1,−1) starts at k = 1: c^2 b_{(2,0)}
        let s = phi_lambda_series(&sp(&[1, -1]), 4).unwrap();
        assert_eq!(s.coeffs.keys().copied().collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn numeric_matches_exact() {
        let q = HPComplex::from_parts(0.3, 0.1, 128);
        let t = HPComplex::from_parts(0.4, -0.2, 128);
        let qt = QtField::numeric(q, t);
        let lam = sp(&[1, 0]);
        let exact = phi_lambda_series(&lam, 5).unwrap().eval(&qt).unwrap();
        let num = phi_lambda_series_in(&lam, 5, &qt).unwrap();
        for (e, b) in &exact.coeffs {
            assert!(b.rel_diff(&num.coeffs[e], 1e-30) < 1e-25);
        }
    }
}

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::emacdonald::elliptic_macdonald;
use super::{EllipticMacdonald, SpectralError};
use crate::scalar_ring::{Field, HPComplex, LaurentPoly, PSeries, QtField, RationalFn, Ring};
use crate::symmetric_core::{from_m_expansion, m_expand, MExpansion, SignedPartition};

/// Coefficient series A_λ(p) of an element of V in either basis.
pub type EllipticCoefficients<F> = BTreeMap<SignedPartition, PSeries<F>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvertDirection {
    /// m → 𝐏
    MonomialToElliptic,
    /// 𝐏 → m
    EllipticToMonomial,
}

type Lift<F> = fn(&EllipticMacdonald<RationalFn>, &QtField<F>) -> Result<EllipticMacdonald<F>, SpectralError>;

/// The elliptic Macdonald basis at fixed (q, t). Polynomials are solved
/// exactly over ℚ(q,t) and specialized on demand.
pub struct EllipticBasis<F: Field> {
    qt: QtField<F>,
    lift: Lift<F>,
    cache: Mutex<HashMap<(SignedPartition, usize), Arc<EllipticMacdonald<F>>>>,
}

impl EllipticBasis<RationalFn> {
    pub fn symbolic() -> Self {
        EllipticBasis { qt: QtField::symbolic(), lift: |e, _| Ok(e.clone()), cache: Mutex::new(HashMap::new()) }
    }
}

impl EllipticBasis<HPComplex> {
    pub fn numeric(q: HPComplex, t: HPComplex) -> Self {
        EllipticBasis { qt: QtField::numeric(q, t), lift: |e, qt| e.eval(qt), cache: Mutex::new(HashMap::new()) }
    }
}

impl<F: Field> EllipticBasis<F> {
    pub fn qt(&self) -> &QtField<F> {
        &self.qt
    }

    pub fn get(&self, lambda: &SignedPartition, order: usize) -> Result<Arc<EllipticMacdonald<F>>, SpectralError> {
        let key = (lambda.clone(), order);
        if let Some(e) = self.cache.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let exact = elliptic_macdonald(lambda, order)?;
        let e = Arc::new((self.lift)(&exact, &self.qt)?);
        self.cache.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }
}

fn max_scale<F: Ring>(e: &MExpansion<F>, proto: &F) -> F {
    e.values()
        .max_by(|a, b| a.magnitude_log2().total_cmp(&b.magnitude_log2()))
        .cloned()
        .unwrap_or_else(|| proto.one_like())
}

fn axpy<F: Ring>(acc: &mut MExpansion<F>, c: &F, e: &MExpansion<F>) {
    for (mu, v) in e {
        let w = match acc.get(mu) {
            Some(a) => a.plus(&c.times(v)),
            None => c.times(v),
        };
        acc.insert(mu.clone(), w);
    }
}

/// Coefficients A_λ(p) with f = Σ_λ A_λ(p) 𝐏_λ(x;p) to the order of f.
pub fn m_to_elliptic<F: Field>(
    f: &PSeries<LaurentPoly<F>>,
    basis: &EllipticBasis<F>,
) -> Result<EllipticCoefficients<F>, SpectralError> {
    let order = f.order();
    let zero = basis.qt.zero();
    let mut resid: Vec<MExpansion<F>> = f.coeffs().iter().map(m_expand).collect::<Result<_, _>>()?;
    let mut out: EllipticCoefficients<F> = BTreeMap::new();
    for k in 0..=order {
        let scale = max_scale(&resid[k], &zero);
        loop {
            resid[k].retain(|_, v| !v.negligible(&scale));
            let Some((mu, c)) = resid[k].iter().next_back().map(|(a, b)| (a.clone(), b.clone())) else { break };
            let e = basis.get(&mu, order - k)?;
            let neg = c.negate();
            for j in 0..=order - k {
                axpy(&mut resid[k + j], &neg, &e.layers[j]);
            }
            // the leading coefficient cancels exactly
            resid[k].remove(&mu);
            let a = out.entry(mu).or_insert_with(|| PSeries::zero(order, &zero));
            *a.coeff_mut(k) = a.coeff(k).plus(&c);
        }
    }
    Ok(out)
}

/// Σ_λ A_λ(p) 𝐏_λ(x;p) to order p^K.
pub fn elliptic_to_m<F: Field>(
    a: &EllipticCoefficients<F>,
    n: usize,
    order: usize,
    basis: &EllipticBasis<F>,
) -> Result<PSeries<LaurentPoly<F>>, SpectralError> {
    let zero = basis.qt.zero();
    let mut layers: Vec<MExpansion<F>> = vec![MExpansion::new(); order + 1];
    for (lambda, s) in a {
        for i in 0..=order.min(s.order()) {
            let c = s.coeff(i);
            if c.is_zero() {
                continue;
            }
            let e = basis.get(lambda, order - i)?;
            for j in 0..=order - i {
                axpy(&mut layers[i + j], c, &e.layers[j]);
            }
        }
    }
    let coeffs = layers.iter().map(|e| from_m_expansion(e, n, &zero)).collect();
    Ok(PSeries::new(coeffs, order, &LaurentPoly::zero(n, &zero)))
}

/// Converts coefficient series between the m-basis and the 𝐏-basis.
pub fn basis_convert<F: Field>(
    coeffs: &EllipticCoefficients<F>,
    direction: ConvertDirection,
    n: usize,
    order: usize,
    basis: &EllipticBasis<F>,
) -> Result<EllipticCoefficients<F>, SpectralError> {
    let zero = basis.qt.zero();
    match direction {
        ConvertDirection::MonomialToElliptic => {
            let mut layers: Vec<MExpansion<F>> = vec![MExpansion::new(); order + 1];
            for (mu, s) in coeffs {
                if mu.n() != n {
                    return Err(SpectralError::Envelope(format!("{mu} does not have {n} parts")));
                }
                for k in 0..=order.min(s.order()) {
                    if !s.coeff(k).is_zero() {
                        layers[k].insert(mu.clone(), s.coeff(k).clone());
                    }
                }
            }
            let coeffs = layers.iter().map(|e| from_m_expansion(e, n, &zero)).collect();
            m_to_elliptic(&PSeries::new(coeffs, order, &LaurentPoly::zero(n, &zero)), basis)
        }
        ConvertDirection::EllipticToMonomial => {
            let f = elliptic_to_m(coeffs, n, order, basis)?;
            let mut out: EllipticCoefficients<F> = BTreeMap::new();
            for k in 0..=order {
                let scale = f.coeff(k).max_coeff_scale();
                for (mu, c) in m_expand(f.coeff(k))? {
                    if c.negligible(&scale) {
                        continue;
                    }
                    let s = out.entry(mu).or_insert_with(|| PSeries::zero(order, &zero));
                    *s.coeff_mut(k) = c;
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[i32]) -> SignedPartition {
        SignedPartition::new(v.to_vec()).unwrap()
    }

    fn r(s: &str) -> RationalFn {
        RationalFn::parse(s).unwrap()
    }

    #[test]
    fn inverse_relations_of_the_example() {
        let basis = EllipticBasis::symbolic();
        let one = RationalFn::one();
        let f = PSeries::constant(LaurentPoly::one(2, &one), 1);
        let a = m_to_elliptic(&f, &basis).unwrap();
        let alpha = r("(1-t)^2(1+t)q/(t(1-q)(1-t*q))");
        let beta = r("(1-t)(1+q)/(1-t*q)");
        let expect: EllipticCoefficients<RationalFn> = [
            (sp(&[0, 0]), PSeries::new(vec![one.clone(), alpha.mul(&beta)], 1, &RationalFn::zero())),
            (sp(&[1, -1]), PSeries::new(vec![RationalFn::zero(), alpha.neg()], 1, &RationalFn::zero())),
        ]
        .into_iter()
        .collect();
        assert_eq!(a, expect);
        let back = elliptic_to_m(&a, 2, 1, &basis).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn single_basis_element() {
        let basis = EllipticBasis::symbolic();
        let lam = sp(&[1, 0]);
        let e = basis.get(&lam, 2).unwrap();
        let a = m_to_elliptic(&e.series(&RationalFn::zero()), &basis).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[&lam], PSeries::one(2, &RationalFn::zero()));
    }
}

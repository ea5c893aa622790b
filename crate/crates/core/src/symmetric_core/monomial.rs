use super::{MExpansion, SignedPartition, SymmetricError};
use crate::scalar_ring::{LaurentPoly, Ring};

/// Next permutation in lexicographic order; false once the last one is reached.
fn next_permutation(v: &mut [i32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// m_μ: each distinct permutation of x^μ once, coefficient one.
pub fn monomial_sym<F: Ring>(mu: &SignedPartition, proto: &F) -> LaurentPoly<F> {
    let n = mu.n();
    let mut out = LaurentPoly::zero(n, proto);
    let mut v: Vec<i32> = mu.parts().iter().rev().copied().collect();
    loop {
        out = out.add(&LaurentPoly::monomial(n, &v, proto.one_like()));
        if !next_permutation(&mut v) {
            break;
        }
    }
    out
}

/// Coefficients of a symmetric Laurent polynomial in the m-basis.
pub fn m_expand<F: Ring>(f: &LaurentPoly<F>) -> Result<MExpansion<F>, SymmetricError> {
    if !f.is_symmetric() {
        return Err(SymmetricError::NotSymmetric);
    }
    Ok(f
        .dominant_terms()
        .into_iter()
        .map(|(mu, c)| (SignedPartition::new(mu).expect("dominant exponents are decreasing"), c))
        .collect())
}

pub fn from_m_expansion<F: Ring>(e: &MExpansion<F>, n: usize, proto: &F) -> LaurentPoly<F> {
    let mut out = LaurentPoly::zero(n, proto);
    for (mu, c) in e {
        out = out.add(&monomial_sym(mu, proto).scale(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::RationalFn;

    #[test]
    fn orbit_sizes() {
        let one = RationalFn::one();
        let m = monomial_sym(&SignedPartition::new(vec![1, -1]).unwrap(), &one);
        let expect = LaurentPoly::monomial(2, &[1, -1], one.clone()).add(&LaurentPoly::monomial(2, &[-1, 1], one.clone()));
        assert_eq!(m, expect);
        assert!(monomial_sym(&SignedPartition::zero(3), &one).is_one());
        assert_eq!(monomial_sym(&SignedPartition::new(vec![2, 1, 1, 0]).unwrap(), &one).len(), 12);
    }

    #[test]
    fn expansion_roundtrip() {
        let one = RationalFn::one();
        let mu = SignedPartition::new(vec![2, 0, -1]).unwrap();
        let f = monomial_sym(&mu, &one).scale(&RationalFn::q());
        let e = m_expand(&f).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(from_m_expansion(&e, 3, &one), f);
        assert!(m_expand(&LaurentPoly::monomial(2, &[1, 0], one)).is_err());
    }
}

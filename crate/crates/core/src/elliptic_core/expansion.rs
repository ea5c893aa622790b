use super::EllipticError;
use crate::scalar_ring::{Field, LaurentPoly, PSeries, QtField, RationalFn, Ring};

/// Largest supported p-order for symbolic series.
pub const MAX_P_ORDER: usize = 8;

/// Γ_{p,q}(x)·(x; q)_∞ as a p-series of Laurent polynomials in x over ℚ(q).
///
/// log of the p-dependent part is Σ_{J,m≥1} p^{Jm}(x^m − q^m x^{−m})/(m(1−q^m)),
/// which is exponentiated in the series ring.
pub fn gamma_p_expansion(k: usize) -> Result<PSeries<LaurentPoly<RationalFn>>, EllipticError> {
    gamma_p_expansion_in(k, &QtField::symbolic())
}

pub fn gamma_p_expansion_in<F: Field>(
    k: usize,
    qt: &QtField<F>,
) -> Result<PSeries<LaurentPoly<F>>, EllipticError> {
    if k > MAX_P_ORDER {
        return Err(EllipticError::Envelope(k));
    }
    let zero = LaurentPoly::zero(1, &qt.zero());
    let mut log = vec![zero.clone(); k + 1];
    for (n, slot) in log.iter_mut().enumerate().skip(1) {
        for m in 1..=n {
            if n % m != 0 {
                continue;
            }
            let qm = qt.mono(m as i64, 0);
            let w = qt
                .one()
                .minus(&qm)
                .times(&qt.int(m as i64))
                .inverse()
                .ok_or_else(|| EllipticError::Domain("1 - q^m vanishes".into()))?;
            let pos = LaurentPoly::monomial(1, &[m as i32], w.clone());
            let neg = LaurentPoly::monomial(1, &[-(m as i32)], w.times(&qm).negate());
            *slot = slot.add(&pos).add(&neg);
        }
    }
    PSeries::new(log, k, &zero)
        .exp()
        .map_err(|e| EllipticError::Domain(e.to_string()))
}

/// θ_p(z)/(1 − z) = ∏_{m≥1}(1 − p^m z)(1 − p^m/z) to order p^K, for a
/// monomial z (so that z·z^{-1} = 1 in the coefficient ring).
pub fn theta_ratio_series<C: Ring>(z: &C, k: usize) -> PSeries<C> {
    let zi = z.inverse().expect("theta series needs an invertible monomial");
    let s = z.plus(&zi);
    let one = z.one_like();
    let mut acc = PSeries::one(k, z);
    for m in 1..=k {
        // 1 − p^m (z + 1/z) + p^{2m}
        let mut c = vec![z.zero_like(); k + 1];
        c[0] = one.clone();
        c[m] = s.negate();
        if 2 * m <= k {
            c[2 * m] = one.clone();
        }
        acc = acc.mul(&PSeries::new(c, k, z));
    }
    acc
}

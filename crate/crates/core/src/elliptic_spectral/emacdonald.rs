use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::SpectralError;
use crate::operator_core::{macdonald_eigenvalue, ruijsenaars_eigenvalue, DifferenceOperator};
use crate::scalar_ring::{Field, LaurentPoly, PSeries, QtField, RationalFn};
use crate::symmetric_core::{from_m_expansion, m_expand, macdonald_expansion, MExpansion, SignedPartition};

pub const ELLIPTIC_MAX_N: usize = 3;
pub const ELLIPTIC_MAX_ORDER: usize = 3;

/// Largest spread(λ) + 2K accepted for n variables.
pub fn elliptic_span(n: usize) -> i32 {
    if n <= 2 {
        16
    } else {
        10
    }
}

/// 𝐏_λ(x;p) = Σ_k p^k Σ_μ C^(k)_{λμ} m_μ to order p^K, with the eigenvalue
/// series of D^(1) and (for n ≥ 2) D^(2).
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticMacdonald<F: Field> {
    pub lambda: SignedPartition,
    pub order: usize,
    /// layers[k][μ] = C^(k)_{λμ}
    pub layers: Vec<MExpansion<F>>,
    /// ε^(1)_λ(p)
    pub eigenvalue: Vec<F>,
    /// ε^(2)_λ(p); empty for n = 1
    pub eigenvalue2: Vec<F>,
}

impl<F: Field> EllipticMacdonald<F> {
    pub fn n(&self) -> usize {
        self.lambda.n()
    }

    pub fn coefficient(&self, k: usize, mu: &SignedPartition) -> Option<&F> {
        self.layers.get(k)?.get(mu)
    }

    /// 𝐏_λ as a p-series of Laurent polynomials.
    pub fn series(&self, proto: &F) -> PSeries<LaurentPoly<F>> {
        let n = self.n();
        let coeffs = self.layers.iter().map(|e| from_m_expansion(e, n, proto)).collect();
        PSeries::new(coeffs, self.order, &LaurentPoly::zero(n, proto))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let k = order.min(self.order);
        EllipticMacdonald {
            lambda: self.lambda.clone(),
            order: k,
            layers: self.layers[..=k].to_vec(),
            eigenvalue: self.eigenvalue[..=k].to_vec(),
            eigenvalue2: self.eigenvalue2.iter().take(k + 1).cloned().collect(),
        }
    }

    fn shift(&self, m: i32, qt: &QtField<F>) -> Self {
        let s1 = qt.mono(m as i64, 0);
        let s2 = qt.mono(2 * m as i64, 0);
        EllipticMacdonald {
            lambda: self.lambda.shift(m),
            order: self.order,
            layers: self.layers.iter().map(|e| e.iter().map(|(k, v)| (k.shift(m), v.clone())).collect()).collect(),
            eigenvalue: self.eigenvalue.iter().map(|e| e.times(&s1)).collect(),
            eigenvalue2: self.eigenvalue2.iter().map(|e| e.times(&s2)).collect(),
        }
    }
}

impl EllipticMacdonald<RationalFn> {
    /// Specializes every coefficient at the (q, t) of `qt`.
    pub fn eval<F: Field>(&self, qt: &QtField<F>) -> Result<EllipticMacdonald<F>, SpectralError> {
        let ev = |r: &RationalFn| {
            qt.eval(r).ok_or_else(|| SpectralError::Consistency(format!("coefficient {r} is singular at (q, t)")))
        };
        let layer = |e: &MExpansion<RationalFn>| -> Result<MExpansion<F>, SpectralError> {
            e.iter().map(|(k, v)| Ok((k.clone(), ev(v)?))).collect()
        };
        Ok(EllipticMacdonald {
            lambda: self.lambda.clone(),
            order: self.order,
            layers: self.layers.iter().map(layer).collect::<Result<_, _>>()?,
            eigenvalue: self.eigenvalue.iter().map(ev).collect::<Result<_, _>>()?,
            eigenvalue2: self.eigenvalue2.iter().map(ev).collect::<Result<_, _>>()?,
        })
    }
}

pub(super) fn check_envelope(lambda: &SignedPartition, order: usize) -> Result<(), SpectralError> {
    let n = lambda.n();
    if n == 0 || n > ELLIPTIC_MAX_N {
        return Err(SpectralError::Envelope(format!("n = {n} outside 1..={ELLIPTIC_MAX_N}")));
    }
    if order > ELLIPTIC_MAX_ORDER {
        return Err(SpectralError::Envelope(format!("order {order} > {ELLIPTIC_MAX_ORDER}")));
    }
    let span = lambda.spread() + 2 * order as i32;
    if span > elliptic_span(n) {
        return Err(SpectralError::Envelope(format!(
            "spread {} + 2·{order} exceeds {} for n = {n}",
            lambda.spread(),
            elliptic_span(n)
        )));
    }
    Ok(())
}

/// Coefficients of a symmetric polynomial in the Macdonald basis at p = 0,
/// peeling off the lexicographically largest monomial each step.
pub(super) fn to_macdonald_basis(
    mut e: MExpansion<RationalFn>,
) -> Result<MExpansion<RationalFn>, SpectralError> {
    let mut out = MExpansion::new();
    while let Some((mu, c)) = e.iter().next_back().map(|(k, v)| (k.clone(), v.clone())) {
        let p = macdonald_expansion(&mu)?;
        for (nu, d) in p.iter() {
            let v = e.get(nu).cloned().unwrap_or_else(RationalFn::zero).sub(&c.mul(d));
            if v.is_zero() {
                e.remove(nu);
            } else {
                e.insert(nu.clone(), v);
            }
        }
        out.insert(mu, c);
    }
    Ok(out)
}

fn within_support(lambda: &SignedPartition, mu: &SignedPartition, k: usize) -> bool {
    let k = k as i32;
    let lo = lambda.last() - k;
    let hi = lambda.first() + k;
    mu.parts().iter().all(|&x| lo <= x && x <= hi) && mu.dominance_leq(&lambda.add_phi(k)).unwrap_or(false)
}

fn solve(lambda: &SignedPartition, order: usize) -> Result<EllipticMacdonald<RationalFn>, SpectralError> {
    let n = lambda.n();
    let zero = RationalFn::zero();
    let poly_zero = LaurentPoly::zero(n, &zero);
    let d1 = DifferenceOperator::ruijsenaars(1, n, order)?.symbolic()?;
    let eps = |mu: &SignedPartition| macdonald_eigenvalue(mu, 1);
    let e_lambda = eps(lambda);

    let p0 = (*macdonald_expansion(lambda)?).clone();
    let mut layers = vec![p0];
    let mut eigenvalue = vec![e_lambda.clone()];
    // acc[k] collects Σ_{j<k} [p^k] D^(1)(p^j P^(j))
    let mut acc = PSeries::zero(order, &poly_zero);
    let push_layer = |acc: &mut PSeries<LaurentPoly<RationalFn>>, k: usize, layer: &MExpansion<RationalFn>| {
        let mut c = vec![poly_zero.clone(); k];
        c.push(from_m_expansion(layer, n, &zero));
        let s = PSeries::new(c, order, &poly_zero);
        d1.apply(&s).map(|out| *acc = acc.add(&out))
    };
    push_layer(&mut acc, 0, &layers[0])?;

    for k in 1..=order {
        let mut r = m_expand(&acc.coeff(k).neg())?;
        for j in 1..k {
            for (mu, c) in &layers[k - j] {
                let v = r.get(mu).cloned().unwrap_or_else(RationalFn::zero).add(&eigenvalue[j].mul(c));
                r.insert(mu.clone(), v);
            }
        }
        r.retain(|_, v| !v.is_zero());
        let rp = to_macdonald_basis(r)?;
        let e_k = rp.get(lambda).cloned().unwrap_or_else(RationalFn::zero).neg();

        let mut layer = MExpansion::new();
        let mut norm = RationalFn::zero();
        for (nu, r_nu) in rp.iter().filter(|(nu, _)| *nu != lambda) {
            let gap = eps(nu).sub(&e_lambda);
            let x = r_nu.div(&gap).ok_or_else(|| SpectralError::Degenerate(lambda.clone(), nu.clone()))?;
            let pn = macdonald_expansion(nu)?;
            if let Some(c) = pn.get(lambda) {
                norm = norm.sub(&x.mul(c));
            }
            for (mu, c) in pn.iter() {
                let v = layer.get(mu).cloned().unwrap_or_else(RationalFn::zero).add(&x.mul(c));
                layer.insert(mu.clone(), v);
            }
        }
        // C^(k)_{λλ} = 0 fixes the multiple of P_λ
        if !norm.is_zero() {
            for (mu, c) in layers[0].iter() {
                let v = layer.get(mu).cloned().unwrap_or_else(RationalFn::zero).add(&norm.mul(c));
                layer.insert(mu.clone(), v);
            }
        }
        layer.retain(|_, v| !v.is_zero());
        if let Some(mu) = layer.keys().find(|mu| !within_support(lambda, mu, k)) {
            return Err(SpectralError::Support { lambda: lambda.clone(), mu: mu.clone(), order: k });
        }
        if k < order {
            push_layer(&mut acc, k, &layer)?;
        }
        layers.push(layer);
        eigenvalue.push(e_k);
    }

    let mut out = EllipticMacdonald { lambda: lambda.clone(), order, layers, eigenvalue, eigenvalue2: Vec::new() };
    if n >= 2 {
        out.eigenvalue2 = second_eigenvalue(&out)?;
    }
    Ok(out)
}

/// Eigenvalue series of D^(2) on 𝐏_λ, checking the full eigen-equation.
fn second_eigenvalue(e: &EllipticMacdonald<RationalFn>) -> Result<Vec<RationalFn>, SpectralError> {
    let n = e.n();
    let zero = RationalFn::zero();
    let d2 = DifferenceOperator::ruijsenaars(2, n, e.order)?.symbolic()?;
    let out = d2.apply(&e.series(&zero))?;
    let mut eps2: Vec<RationalFn> = Vec::with_capacity(e.order + 1);
    for j in 0..=e.order {
        let lj = m_expand(out.coeff(j))?;
        eps2.push(lj.get(&e.lambda).cloned().unwrap_or_else(RationalFn::zero));
        let mut resid = lj;
        for i in 0..=j {
            for (mu, c) in &e.layers[i] {
                let v = resid.get(mu).cloned().unwrap_or_else(RationalFn::zero).sub(&eps2[j - i].mul(c));
                resid.insert(mu.clone(), v);
            }
        }
        if resid.values().any(|v| !v.is_zero()) {
            return Err(SpectralError::Consistency(format!("D^(2) eigen-equation for {} at order {j}", e.lambda)));
        }
    }
    if eps2[0] != ruijsenaars_eigenvalue(&e.lambda, 2) {
        return Err(SpectralError::Consistency(format!("D^(2) eigenvalue of {} at p = 0", e.lambda)));
    }
    Ok(eps2)
}

type Cache = Mutex<HashMap<(SignedPartition, usize), Arc<EllipticMacdonald<RationalFn>>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// 𝐏_λ(x;p) over ℚ(q,t) to order p^K.
pub fn elliptic_macdonald(lambda: &SignedPartition, order: usize) -> Result<Arc<EllipticMacdonald<RationalFn>>, SpectralError> {
    check_envelope(lambda, order)?;
    let m = lambda.last();
    let base = lambda.shift(-m);
    let hit = {
        let c = cache().lock().unwrap();
        (order..=ELLIPTIC_MAX_ORDER).find_map(|k| c.get(&(base.clone(), k)).cloned())
    };
    let e = match hit {
        Some(e) if e.order == order => e,
        Some(e) => Arc::new(e.truncate(order)),
        None => {
            let e = Arc::new(solve(&base, order)?);
            cache().lock().unwrap().entry((base, order)).or_insert_with(|| e.clone());
            e
        }
    };
    if m == 0 {
        Ok(e)
    } else {
        Ok(Arc::new(e.shift(m, &QtField::symbolic())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[i32]) -> SignedPartition {
        SignedPartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn example_alpha() {
        let e = elliptic_macdonald(&sp(&[0, 0]), 1).unwrap();
        let alpha = RationalFn::parse("(1-t)^2(1+t)q/(t(1-q)(1-t*q))").unwrap();
        assert_eq!(e.coefficient(1, &sp(&[1, -1])), Some(&alpha));
        assert_eq!(e.coefficient(1, &sp(&[0, 0])), None);
        assert_eq!(e.layers[1].len(), 1);
    }

    #[test]
    fn order_zero_is_macdonald() {
        for lam in [sp(&[1, -1]), sp(&[2, 0, -1]), sp(&[0])] {
            let e = elliptic_macdonald(&lam, 0).unwrap();
            assert_eq!(e.layers[0], *macdonald_expansion(&lam).unwrap());
        }
        let beta = RationalFn::parse("(1-t)(1+q)/(1-t*q)").unwrap();
        let e = elliptic_macdonald(&sp(&[1, -1]), 0).unwrap();
        assert_eq!(e.coefficient(0, &sp(&[0, 0])), Some(&beta));
    }

    #[test]
    fn shift_and_truncation() {
        let a = elliptic_macdonald(&sp(&[1, 0]), 2).unwrap();
        let b = elliptic_macdonald(&sp(&[2, 1]), 2).unwrap();
        assert_eq!(*b, a.shift(1, &QtField::symbolic()));
        let c = elliptic_macdonald(&sp(&[1, 0]), 1).unwrap();
        assert_eq!(*c, a.truncate(1));
    }

    #[test]
    fn envelope() {
        assert!(elliptic_macdonald(&sp(&[0, 0]), ELLIPTIC_MAX_ORDER + 1).is_err());
        assert!(elliptic_macdonald(&sp(&[0, 0, 0, 0]), 1).is_err());
        assert!(elliptic_macdonald(&sp(&[5, 0, -1]), 3).is_err());
    }
}

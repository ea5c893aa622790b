use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{dominated_by, from_m_expansion, m_expand, monomial_sym, MExpansion, SignedPartition, SymmetricError};
use crate::operator_core::{macdonald_eigenvalue_in, CompiledOperator, DifferenceOperator};
use crate::scalar_ring::{Field, LaurentPoly, PSeries, QtField, RationalFn, Ring};

pub const MAX_N: usize = 4;

/// Largest λ_1 − λ_n accepted for n variables. Wider than the nominal 6
/// because the elliptic layers need P_μ for μ up to λ + Kφ and the Cauchy
/// constants need every partition of |λ|.
pub fn max_spread(n: usize) -> i32 {
    match n {
        0 | 1 => 64,
        2 => 24,
        3 => 12,
        _ => 10,
    }
}

fn check_envelope(lambda: &SignedPartition) -> Result<(), SymmetricError> {
    if lambda.n() > MAX_N {
        return Err(SymmetricError::Envelope(format!("n = {} > {MAX_N}", lambda.n())));
    }
    let cap = max_spread(lambda.n());
    if lambda.spread() > cap {
        return Err(SymmetricError::Envelope(format!("spread {} > {cap}", lambda.spread())));
    }
    Ok(())
}

/// D^(1)|_{p=0} m_μ in the m-basis.
fn column<F: Field>(op: &CompiledOperator<F>, mu: &SignedPartition) -> Result<MExpansion<F>, SymmetricError> {
    let proto = op.qt().zero();
    let f = PSeries::constant(monomial_sym(mu, &proto), 0);
    let out = op.apply(&f)?;
    m_expand(out.coeff(0))
}

/// Triangular eigen-solve: P_λ = m_λ + Σ_{μ<λ} c_μ m_μ with D^(1) P_λ = ε_λ P_λ,
/// for λ with λ_n = 0. Rows are visited in lexicographically decreasing order,
/// which refines dominance.
fn solve<F: Field>(
    lambda: &SignedPartition,
    qt: &QtField<F>,
    col: &dyn Fn(&SignedPartition) -> Result<MExpansion<F>, SymmetricError>,
) -> Result<MExpansion<F>, SymmetricError> {
    let support = dominated_by(lambda);
    let eps = |mu: &SignedPartition| macdonald_eigenvalue_in(mu, 1, qt);
    let e_lambda = eps(lambda);
    let mut cols: Vec<MExpansion<F>> = Vec::with_capacity(support.len());
    let mut coeffs: Vec<F> = Vec::with_capacity(support.len());
    for (idx, nu) in support.iter().enumerate() {
        let c = col(nu)?;
        // the diagonal entry is the Macdonald eigenvalue of ν
        let diag = c.get(nu).cloned().unwrap_or_else(|| qt.zero());
        let e_nu = eps(nu);
        if !diag.minus(&e_nu).negligible(&e_nu) {
            return Err(SymmetricError::Numeric(format!("diagonal of D^(1) at {nu} is not its eigenvalue")));
        }
        if idx == 0 {
            coeffs.push(qt.one());
        } else {
            let mut s = qt.zero();
            for (c_mu, col_mu) in coeffs.iter().zip(&cols) {
                if let Some(d) = col_mu.get(nu) {
                    s = s.plus(&c_mu.times(d));
                }
            }
            let gap = e_lambda.minus(&e_nu);
            let c_nu = s.divide(&gap).ok_or_else(|| SymmetricError::Degenerate(lambda.clone(), nu.clone()))?;
            coeffs.push(c_nu);
        }
        cols.push(c);
    }
    Ok(support.into_iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).collect())
}

fn shift_expansion<F: Ring>(e: &MExpansion<F>, m: i32) -> MExpansion<F> {
    e.iter().map(|(k, v)| (k.shift(m), v.clone())).collect()
}

type ColumnCache = Mutex<HashMap<SignedPartition, Arc<MExpansion<RationalFn>>>>;

fn column_cache() -> &'static ColumnCache {
    static C: OnceLock<ColumnCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn expansion_cache() -> &'static ColumnCache {
    static C: OnceLock<ColumnCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn symbolic_column(mu: &SignedPartition) -> Result<MExpansion<RationalFn>, SymmetricError> {
    if let Some(c) = column_cache().lock().unwrap().get(mu) {
        return Ok((**c).clone());
    }
    let op = DifferenceOperator::ruijsenaars(1, mu.n(), 0)?.symbolic()?;
    let c = column(&op, mu)?;
    column_cache().lock().unwrap().insert(mu.clone(), Arc::new(c.clone()));
    Ok(c)
}

/// m-expansion of P_λ over ℚ(q,t), λ ∈ Λ_∞, shared through a cache.
pub fn macdonald_expansion(lambda: &SignedPartition) -> Result<Arc<MExpansion<RationalFn>>, SymmetricError> {
    check_envelope(lambda)?;
    let m = lambda.last();
    let base = lambda.shift(-m);
    let cached = expansion_cache().lock().unwrap().get(&base).cloned();
    let e = match cached {
        Some(e) => e,
        None => {
            let e = Arc::new(solve(&base, &QtField::symbolic(), &symbolic_column)?);
            expansion_cache().lock().unwrap().entry(base).or_insert_with(|| e.clone());
            e
        }
    };
    if m == 0 {
        Ok(e)
    } else {
        Ok(Arc::new(shift_expansion(&e, m)))
    }
}

/// m-expansion of P_λ over any field of (q, t) values.
pub fn macdonald_expansion_in<F: Field>(
    lambda: &SignedPartition,
    qt: &QtField<F>,
) -> Result<MExpansion<F>, SymmetricError> {
    check_envelope(lambda)?;
    let m = lambda.last();
    let base = lambda.shift(-m);
    let op = DifferenceOperator::ruijsenaars(1, lambda.n(), 0)?.compile(qt)?;
    let e = solve(&base, qt, &|mu| column(&op, mu))?;
    Ok(shift_expansion(&e, m))
}

pub fn macdonald_poly(lambda: &SignedPartition) -> Result<LaurentPoly<RationalFn>, SymmetricError> {
    let e = macdonald_expansion(lambda)?;
    Ok(from_m_expansion(&e, lambda.n(), &RationalFn::zero()))
}

pub fn macdonald_poly_in<F: Field>(lambda: &SignedPartition, qt: &QtField<F>) -> Result<LaurentPoly<F>, SymmetricError> {
    let e = macdonald_expansion_in(lambda, qt)?;
    Ok(from_m_expansion(&e, lambda.n(), &qt.zero()))
}

/// "m[2,0] + ((1-t)(1+q)/(1-t*q))*m[1,1]", terms in decreasing order.
pub fn format_m_expansion(e: &MExpansion<RationalFn>) -> String {
    let mut out = String::new();
    for (mu, c) in e.iter().rev() {
        if !out.is_empty() {
            out.push_str(" + ");
        }
        if c.is_one() {
            out.push_str(&mu.m_label());
        } else {
            out.push_str(&format!("({})*{}", c.to_factored_string(), mu.m_label()));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(v: &[i32]) -> SignedPartition {
        SignedPartition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn two_variable_example() {
        let e = macdonald_expansion(&sp(&[2, 0])).unwrap();
        let beta = RationalFn::parse("(1-t)(1+q)/(1-t*q)").unwrap();
        assert_eq!(e.get(&sp(&[1, 1])), Some(&beta));
        assert_eq!(format_m_expansion(&e), "m[2,0] + ((1-t)(1+q)/(1-t*q))*m[1,1]");
        let shifted = macdonald_expansion(&sp(&[1, -1])).unwrap();
        assert_eq!(shifted.get(&sp(&[0, 0])), Some(&beta));
    }

    #[test]
    fn minimal_partitions() {
        assert_eq!(format_m_expansion(&macdonald_expansion(&sp(&[1, 1])).unwrap()), "m[1,1]");
        assert_eq!(format_m_expansion(&macdonald_expansion(&sp(&[1, 0, 0])).unwrap()), "m[1,0,0]");
    }

    #[test]
    fn envelope() {
        assert!(macdonald_expansion(&sp(&[25, 0])).is_err());
        assert!(macdonald_expansion(&sp(&[7, 0, -6])).is_err());
        assert!(macdonald_expansion(&sp(&[1, 0, 0, 0, 0])).is_err());
    }
}

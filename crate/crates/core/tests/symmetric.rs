use std::collections::BTreeMap;

use proptest::prelude::*;
use ruijsenaars_core::operator_core::{apply_ruijsenaars, macdonald_eigenvalue, ruijsenaars_eigenvalue};
use ruijsenaars_core::scalar_ring::poly::Var;
use ruijsenaars_core::scalar_ring::{LaurentPoly, PSeries, RationalFn};
use ruijsenaars_core::symmetric_core::{
    dominated_by, m_expand, macdonald_expansion, macdonald_poly, monomial_sym, partitions_in_box, MExpansion,
    SignedPartition,
};

fn sp(v: &[i32]) -> SignedPartition {
    SignedPartition::new(v.to_vec()).unwrap()
}

fn int(v: i64) -> RationalFn {
    RationalFn::from_int(v)
}

/// Ordinary partitions of d, padded with zeros to length n.
fn padded(d: usize, n: usize) -> Vec<SignedPartition> {
    partitions_in_box(n, d as i64, 0, d as i32)
}

/// P_λ over ℚ(q,t) by Gram–Schmidt on monomials with the power-sum scalar
/// product ⟨p_λ, p_μ⟩ = δ z_λ ∏ (1 − q^{λ_i})/(1 − t^{λ_i}), in `nv` ≥ d
/// variables so that the monomials of degree d are independent.
fn gram_schmidt(d: usize, nv: usize) -> BTreeMap<SignedPartition, MExpansion<RationalFn>> {
    let one = RationalFn::one();
    let basis = padded(d, nv); // lex-decreasing
    let m = basis.len();
    // power sums as m-expansions: L[λ][μ] = [m_μ] p_λ
    let psum = |lam: &SignedPartition| -> MExpansion<RationalFn> {
        let mut f = LaurentPoly::one(nv, &one);
        for &part in lam.parts().iter().filter(|&&x| x > 0) {
            let mut pk = LaurentPoly::zero(nv, &one);
            for i in 0..nv {
                let mut e = vec![0; nv];
                e[i] = part;
                pk = pk.add(&LaurentPoly::monomial(nv, &e, one.clone()));
            }
            f = f.mul(&pk);
        }
        m_expand(&f).unwrap()
    };
    let l: Vec<Vec<RationalFn>> = basis
        .iter()
        .map(|lam| {
            let e = psum(lam);
            basis.iter().map(|mu| e.get(mu).cloned().unwrap_or_else(RationalFn::zero)).collect()
        })
        .collect();
    // Gauss–Jordan inverse: m_μ = Σ_λ (L^{-1})[μ][λ] p_λ
    let mut a = l.clone();
    let mut inv: Vec<Vec<RationalFn>> =
        (0..m).map(|i| (0..m).map(|j| if i == j { int(1) } else { int(0) }).collect()).collect();
    for c in 0..m {
        let piv = (c..m).find(|&r| !a[r][c].is_zero()).unwrap();
        a.swap(c, piv);
        inv.swap(c, piv);
        let s = a[c][c].inv().unwrap();
        for j in 0..m {
            a[c][j] = a[c][j].mul(&s);
            inv[c][j] = inv[c][j].mul(&s);
        }
        for r in 0..m {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..m {
                    a[r][j] = a[r][j].sub(&f.mul(&a[c][j]));
                    inv[r][j] = inv[r][j].sub(&f.mul(&inv[c][j]));
                }
            }
        }
    }
    let zq = |lam: &SignedPartition| -> RationalFn {
        let mut z = int(1);
        let mut counts = BTreeMap::new();
        for &p in lam.parts().iter().filter(|&&x| x > 0) {
            *counts.entry(p).or_insert(0i64) += 1;
            let qp = RationalFn::q().powi(p as i64).unwrap();
            let tp = RationalFn::t().powi(p as i64).unwrap();
            z = z.mul(&int(1).sub(&qp)).div(&int(1).sub(&tp)).unwrap();
        }
        for (p, c) in counts {
            for k in 1..=c {
                z = z.mul(&int(p as i64)).mul(&int(k));
            }
        }
        z
    };
    let w: Vec<RationalFn> = basis.iter().map(zq).collect();
    let ip = |x: &[RationalFn], y: &[RationalFn]| -> RationalFn {
        (0..m).fold(int(0), |s, k| s.add(&x[k].mul(&y[k]).mul(&w[k])))
    };
    // m-vectors in the p-basis
    let mvec: Vec<Vec<RationalFn>> = (0..m).map(|mu| (0..m).map(|lam| inv[mu][lam].clone()).collect()).collect();
    // Gram–Schmidt from the bottom of the order upwards
    // (p-basis vector, m-basis coefficients) of each finished P
    let mut done: Vec<(Vec<RationalFn>, Vec<RationalFn>)> = Vec::new();
    let mut out = BTreeMap::new();
    for i in (0..m).rev() {
        let mut pv = mvec[i].clone();
        let mut mc = vec![int(0); m];
        mc[i] = int(1);
        for (qv, qm) in &done {
            let c = ip(&mvec[i], qv).div(&ip(qv, qv)).unwrap();
            for k in 0..m {
                pv[k] = pv[k].sub(&c.mul(&qv[k]));
                mc[k] = mc[k].sub(&c.mul(&qm[k]));
            }
        }
        let e: MExpansion<RationalFn> =
            (0..m).filter(|&k| !mc[k].is_zero()).map(|k| (basis[k].clone(), mc[k].clone())).collect();
        out.insert(basis[i].clone(), e);
        done.push((pv, mc));
    }
    out
}

fn truncate_to(e: &MExpansion<RationalFn>, n: usize) -> MExpansion<RationalFn> {
    e.iter()
        .filter(|(mu, _)| mu.parts()[n..].iter().all(|&x| x == 0))
        .map(|(mu, c)| (SignedPartition::new(mu.parts()[..n].to_vec()).unwrap(), c.clone()))
        .collect()
}

#[test]
fn eigen_solve_matches_power_sum_gram_schmidt() {
    for d in 1..=4usize {
        let nv = d.max(3);
        let gs = gram_schmidt(d, nv);
        for n in 2..=3usize {
            for lam in padded(d, n) {
                let mut full = lam.parts().to_vec();
                full.resize(nv, 0);
                let oracle = truncate_to(&gs[&SignedPartition::new(full).unwrap()], n);
                let ours = macdonald_expansion(&lam).unwrap();
                assert_eq!(*ours, oracle, "λ = {lam}");
            }
        }
    }
}

/// s_λ = a_{λ+δ}/a_δ, dividing by each x_i − x_j exactly.
fn schur(lam: &SignedPartition) -> LaurentPoly<RationalFn> {
    let n = lam.n();
    let one = RationalFn::one();
    let shifted: Vec<i32> = lam.parts().iter().enumerate().map(|(i, &l)| l + (n - 1 - i) as i32).collect();
    let mut a = LaurentPoly::zero(n, &one);
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let mut e = vec![0; n];
        for i in 0..n {
            e[perm[i]] = shifted[i];
        }
        let c = if inversions % 2 == 0 { one.clone() } else { one.neg() };
        a = a.add(&LaurentPoly::monomial(n, &e, c));
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    for i in 0..n {
        for j in i + 1..n {
            a = a.div_linear(i, j, &one).unwrap();
        }
    }
    a
}

#[test]
fn schur_limit_at_q_equals_t() {
    for n in 2..=3usize {
        for d in 0..=4usize {
            for lam in padded(d, n) {
                let p = macdonald_poly(&lam).unwrap().map_coeffs(|c| c.subst_monomial(Var::Q, &[0, 1, 0, 0]));
                assert_eq!(m_expand(&p).unwrap(), m_expand(&schur(&lam)).unwrap(), "λ = {lam}");
            }
        }
    }
}

#[test]
fn eigen_equations_for_all_k() {
    for n in 1..=3usize {
        for d in 0..=4usize {
            for lam in padded(d, n) {
                let p = macdonald_poly(&lam).unwrap();
                for k in 0..=n {
                    let out = apply_ruijsenaars(k, &PSeries::constant(p.clone(), 0), 0).unwrap();
                    let expect = p.scale(&ruijsenaars_eigenvalue(&lam, k));
                    assert_eq!(out.coeff(0), &expect, "λ = {lam}, k = {k}");
                }
            }
        }
    }
}

#[test]
fn shift_property() {
    // P_{λ+(m)^n} = (x_1⋯x_n)^m P_λ
    for lam in [sp(&[2, 1, 0]), sp(&[3, 0, -1]), sp(&[1, 1])] {
        let base = macdonald_poly(&lam).unwrap();
        for m in [-2, 1, 3] {
            let shifted = macdonald_poly(&lam.shift(m)).unwrap();
            let e = vec![m; lam.n()];
            assert_eq!(shifted, base.mul(&LaurentPoly::monomial(lam.n(), &e, RationalFn::one())));
        }
    }
}

#[test]
fn expansion_support_is_dominated() {
    for lam in [sp(&[3, 1, 0]), sp(&[4, 0, 0]), sp(&[2, 0, -2])] {
        let e = macdonald_expansion(&lam).unwrap();
        let support = dominated_by(&lam);
        assert_eq!(e.keys().next_back(), Some(&lam));
        for mu in e.keys() {
            assert!(support.contains(mu) && mu.dominance_leq(&lam).unwrap());
        }
    }
    let m = monomial_sym(&sp(&[1, 0]), &RationalFn::one());
    assert_eq!(m_expand(&m).unwrap().len(), 1);
}

fn partition_strategy() -> impl Strategy<Value = SignedPartition> {
    (2usize..=3, proptest::collection::vec(-3i32..=3, 3)).prop_map(|(n, mut v)| {
        v.truncate(n);
        SignedPartition::from_unsorted(v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, .. ProptestConfig::default() })]

    #[test]
    fn dominance_is_a_partial_order(a in partition_strategy(), b in partition_strategy(), c in partition_strategy()) {
        prop_assume!(a.n() == b.n() && b.n() == c.n());
        prop_assert!(a.dominance_leq(&a).unwrap());
        if a.dominance_leq(&b).unwrap() && b.dominance_leq(&a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        if a.dominance_leq(&b).unwrap() && b.dominance_leq(&c).unwrap() {
            prop_assert!(a.dominance_leq(&c).unwrap());
        }
        // dominance implies equal size and lexicographic order
        if a.dominance_leq(&b).unwrap() {
            prop_assert_eq!(a.size(), b.size());
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn shift_commutes_with_expansion(lam in partition_strategy(), m in -2i32..=2) {
        let e = macdonald_expansion(&lam).unwrap();
        let shifted = macdonald_expansion(&lam.shift(m)).unwrap();
        let moved: MExpansion<RationalFn> = e.iter().map(|(k, v)| (k.shift(m), v.clone())).collect();
        prop_assert_eq!(&*shifted, &moved);
    }

    #[test]
    fn top_eigenvalue(lam in partition_strategy()) {
        // ε^(n)_λ = q^{|λ|} t^{n(n−1)/2}
        let n = lam.n();
        let top = macdonald_eigenvalue(&lam, n);
        let expect = RationalFn::qt_monomial(lam.size() as i32, (n * (n - 1) / 2) as i32);
        prop_assert_eq!(top, expect);
    }
}

use proptest::prelude::*;

use ruijsenaars_core::elliptic_spectral::{elliptic_macdonald, elliptic_to_m, m_to_elliptic, EllipticBasis};
use ruijsenaars_core::operator_core::DifferenceOperator;
use ruijsenaars_core::scalar_ring::{HPComplex, LaurentPoly, PSeries, QtField, RationalFn};
use ruijsenaars_core::symmetric_core::{monomial_sym, SignedPartition};

fn sp(v: &[i32]) -> SignedPartition {
    SignedPartition::new(v.to_vec()).unwrap()
}

/// n = 2 partitions with spread ≤ 2 and parts in −1..=2.
fn envelope() -> Vec<SignedPartition> {
    let mut out = Vec::new();
    for a in -1..=2 {
        for b in -1..=a {
            if a - b <= 2 {
                out.push(sp(&[a, b]));
            }
        }
    }
    out
}

fn eigen_check(lam: &SignedPartition, k: usize, order: usize) {
    let e = elliptic_macdonald(lam, order).unwrap();
    let zero = RationalFn::zero();
    let n = lam.n();
    let s = e.series(&zero);
    let ev = if k == 1 { &e.eigenvalue } else { &e.eigenvalue2 };
    let eps = PSeries::new(ev.iter().map(|c| LaurentPoly::constant(n, c.clone())).collect(), order, &LaurentPoly::zero(n, &zero));
    let lhs = DifferenceOperator::ruijsenaars(k, n, order).unwrap().apply(&s).unwrap();
    assert_eq!(lhs, eps.mul(&s), "D^({k}) on 𝐏{lam}");
}

#[test]
fn elliptic_macdonald_is_a_joint_eigenfunction() {
    for lam in [sp(&[0, 0]), sp(&[1, 0]), sp(&[1, -1]), sp(&[2, 0])] {
        eigen_check(&lam, 1, 2);
        eigen_check(&lam, 2, 2);
    }
    eigen_check(&sp(&[1, 0, 0]), 1, 1);
    eigen_check(&sp(&[1, 0, -1]), 2, 1);
}

#[test]
fn numeric_basis_matches_symbolic() {
    let prec = 192;
    let (q, t) = (HPComplex::from_parts(0.31, 0.12, prec), HPComplex::from_parts(-0.2, 0.45, prec));
    let qt = QtField::numeric(q.clone(), t.clone());
    let num = EllipticBasis::numeric(q, t);
    for lam in envelope() {
        let a = elliptic_macdonald(&lam, 1).unwrap();
        let b = num.get(&lam, 1).unwrap();
        for (la, lb) in a.layers.iter().zip(&b.layers) {
            for (mu, c) in la {
                let want = qt.eval(c).unwrap();
                let got = lb.get(mu).cloned().unwrap_or_else(|| HPComplex::zero(prec));
                assert!(got.rel_diff(&want, 1e-40) < 1e-45, "{lam} at {mu}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    #[test]
    fn schauder_roundtrip(coeffs in proptest::collection::vec((-3i64..=3, 0usize..=2), 1..5), picks in proptest::collection::vec(0usize..100, 1..5)) {
        let basis = EllipticBasis::symbolic();
        let env = envelope();
        let order = 2;
        let zero = RationalFn::zero();
        let pz = LaurentPoly::zero(2, &zero);
        let mut layers = vec![pz.clone(); order + 1];
        for ((c, k), i) in coeffs.iter().zip(&picks) {
            let lam = &env[i % env.len()];
            layers[*k] = layers[*k].add(&monomial_sym(lam, &RationalFn::one()).scale(&RationalFn::from_int(*c)));
        }
        let f = PSeries::new(layers, order, &pz);
        let a = m_to_elliptic(&f, &basis).unwrap();
        let back = elliptic_to_m(&a, 2, order, &basis).unwrap();
        prop_assert_eq!(back, f);
    }
}

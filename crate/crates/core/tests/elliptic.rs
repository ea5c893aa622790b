use proptest::prelude::*;

use ruijsenaars_core::elliptic_core::{gamma_pq, theta, tol_for_prec, EllipticContext, EllipticParams};
use ruijsenaars_core::scalar_ring::HPComplex;

const PREC: u32 = 192;

fn z(r: f64, a: f64) -> HPComplex {
    HPComplex::from_parts(r * a.cos(), r * a.sin(), PREC)
}

fn nomes() -> impl Strategy<Value = (HPComplex, HPComplex)> {
    (0.02f64..0.6, 0.0f64..6.28, 0.02f64..0.6, 0.0f64..6.28).prop_map(|(rp, ap, rq, aq)| (z(rp, ap), z(rq, aq)))
}

fn point() -> impl Strategy<Value = HPComplex> {
    (0.25f64..4.0, 0.0f64..6.28).prop_map(|(r, a)| z(r, a))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, .. ProptestConfig::default() })]

    #[test]
    fn gamma_difference_equations((p, q) in nomes(), x in point()) {
        let ctx = EllipticContext::new(&EllipticParams::with_precision(p.clone(), q.clone()).unwrap()).unwrap();
        let tol = 2f64.powi(-(PREC as i32 - 24));
        let g = ctx.gamma(&x).unwrap();
        // symmetric in p and q
        let qshift = ctx.gamma(&(&q * &x)).unwrap();
        prop_assert!(qshift.rel_diff(&(&ctx.theta_p(&x).unwrap() * &g), 1e-300) < tol);
        let pshift = ctx.gamma(&(&p * &x)).unwrap();
        prop_assert!(pshift.rel_diff(&(&ctx.theta_q(&x).unwrap() * &g), 1e-300) < tol);
        let refl = &g * &ctx.gamma(&(&(&p * &q) / &x)).unwrap();
        prop_assert!(refl.rel_diff(&HPComplex::one(PREC), 1e-300) < tol);
    }

    #[test]
    fn fast_gamma_matches_double_product((p, q) in nomes(), x in point()) {
        let params = EllipticParams::with_precision(p, q).unwrap();
        let ctx = EllipticContext::new(&params).unwrap();
        let a = ctx.gamma(&x).unwrap();
        let b = gamma_pq(&x, &params).unwrap();
        prop_assert!(a.rel_diff(&b, 1e-300) < 2f64.powi(-(PREC as i32 - 24)));
    }

    #[test]
    fn theta_quasi_periodicity((p, _q) in nomes(), x in point()) {
        let tol = tol_for_prec(PREC);
        let t = theta(&x, &p, tol).unwrap();
        // θ(px) = θ(1/x) = −θ(x)/x
        let tp = theta(&(&p * &x), &p, tol).unwrap();
        let ti = theta(&x.recip(), &p, tol).unwrap();
        let expect = (&t / &x).scale_i64(-1);
        prop_assert!(tp.rel_diff(&expect, 1e-300) < 1e-50);
        prop_assert!(ti.rel_diff(&expect, 1e-300) < 1e-50);
    }
}

use super::dixon::{dixon_integral, DixonSpec};
use super::kernels::{check_pair_region, kernel_kcd, q_apply_numeric, KernelVariant, QKernel};
use super::report::{ReportBuilder, VerificationReport, VerifyConfig};
use super::sampling::{retries_exhausted, shrink, Sampler, MAX_RETRIES};
use super::QuadratureError;
use crate::elliptic_core::{EllipticContext, EllipticParams};
use crate::operator_core::{DifferenceOperator, OperatorError};
use crate::scalar_ring::{HPComplex, LaurentPoly};
use crate::symmetric_core::{monomial_sym, SignedPartition};

fn context(p: &HPComplex, q: &HPComplex) -> Result<EllipticContext, QuadratureError> {
    Ok(EllipticContext::new(&EllipticParams::with_precision(p.clone(), q.clone())?)?)
}

fn moduli_bounds(v: &[HPComplex], r: &HPComplex) -> (f64, f64) {
    let m: Vec<f64> = v.iter().map(|z| (z / r).abs_f64()).collect();
    (m.iter().cloned().fold(f64::INFINITY, f64::min), m.iter().cloned().fold(0.0, f64::max))
}

/// |c| range with lo < |c r/x_j|, |c y_j/r| < 1.
fn pair_bounds(x: &[HPComplex], y: &[HPComplex], r: &HPComplex, lo: f64) -> (f64, f64) {
    let (xmin, xmax) = moduli_bounds(x, r);
    let (ymin, ymax) = moduli_bounds(y, r);
    (lo * xmax.max(1.0 / ymin), xmin.min(1.0 / ymax))
}

/// I_n^m(a;b) against ∏Γ(a_i b_j)·I_m^n(pq/s b; s/a), with s^m = a_1⋯a_{n+m}.
pub fn verify_rains(n: usize, m: usize, seed: u64, cfg: &VerifyConfig) -> Result<VerificationReport, QuadratureError> {
    if n == 0 || m == 0 {
        return Err(QuadratureError::Precondition("Rains transform needs n, m ≥ 1".into()));
    }
    let prec = cfg.prec;
    let mut rb = ReportBuilder::new("rains", n, Some(m as i64), Some(seed), prec);
    let mut smp = Sampler::new(seed, prec);
    let p = smp.point(0.02, 0.15);
    let q = smp.point(0.1, 0.4);
    let pq = &p * &q;
    let apq = pq.abs_f64();
    let len = n + m;
    // moduli of all but the last entry are drawn, the last one enforces the product
    let draw = |smp: &mut Sampler, target: &HPComplex, floor: f64| -> Option<Vec<HPComplex>> {
        let (lo, hi) = shrink(floor, 1.0, 1.3)?;
        let mut v = Vec::with_capacity(len);
        let mut prod = HPComplex::one(prec);
        for _ in 1..len {
            let z = smp.point(lo, hi);
            prod = &prod * &z;
            v.push(z);
        }
        let last = target / &prod;
        let a = last.abs_f64();
        (lo < a && a < hi).then(|| {
            v.push(last);
            v
        })
    };
    let mut found = None;
    for _ in 0..MAX_RETRIES {
        let s = smp.point(apq.powf(0.75), apq.powf(0.25));
        let sm = s.powi(m as i64);
        let sigma = &pq / &s;
        let Some(a) = draw(&mut smp, &sm, s.abs_f64()) else { continue };
        let Some(b) = draw(&mut smp, &sigma.powi(m as i64), sigma.abs_f64()) else { continue };
        found = Some((s, a, b));
        break;
    }
    let (s, a, b) = found.ok_or_else(|| retries_exhausted("Rains"))?;
    rb.param("p", &p);
    rb.param("q", &q);
    rb.param("s", &s);
    rb.params("a", &a);
    rb.params("b", &b);
    let ctx = context(&p, &q)?;
    let lhs = rb.quad(&dixon_integral(&DixonSpec::I { n, m, a: a.clone(), b: b.clone() }, &ctx, &cfg.quad)?);
    let a2: Vec<HPComplex> = b.iter().map(|bj| &pq / &(&s * bj)).collect();
    let b2: Vec<HPComplex> = a.iter().map(|aj| &s / aj).collect();
    let inner = rb.quad(&dixon_integral(&DixonSpec::I { n: m, m: n, a: a2, b: b2 }, &ctx, &cfg.quad)?);
    let mut pre = HPComplex::one(prec);
    for ai in &a {
        for bj in &b {
            pre = &pre * &ctx.gamma(&(ai * bj))?;
        }
    }
    Ok(rb.finish(lhs, &pre * &inner, cfg.threshold_or(1e-10)))
}

/// K_{cd} = K_{dc} plus the equivalent J_n symmetries on the same sample.
pub fn verify_grry(n: usize, seed: u64, cfg: &VerifyConfig) -> Result<VerificationReport, QuadratureError> {
    let prec = cfg.prec;
    let threshold = cfg.threshold_or(1e-10);
    let mut rb = ReportBuilder::new("grry", n, None, Some(seed), prec);
    let mut smp = Sampler::new(seed, prec);
    let mut found = None;
    for _ in 0..MAX_RETRIES {
        let p = smp.point(0.02, 0.12);
        let q = smp.point(0.1, 0.35);
        let t = smp.point(0.3, 0.6);
        let theta = smp.angle();
        let r = smp.polar(1.0, theta);
        let x = smp.constrained(n, &r, 1.1);
        let y = smp.constrained(n, &r, 1.1);
        let lo = (&(&p * &q) / &t).abs_f64();
        let (a, b) = pair_bounds(&x, &y, &r, lo);
        let Some((a, b)) = shrink(a, b, 1.4) else { continue };
        let c = smp.point(a, b);
        let d = smp.point(a, b);
        found = Some((p, q, t, r, x, y, c, d));
        break;
    }
    let (p, q, t, r, x, y, c, d) = found.ok_or_else(|| retries_exhausted("K_cd = K_dc"))?;
    for (k, v) in [("p", &p), ("q", &q), ("t", &t), ("c", &c), ("d", &d)] {
        rb.param(k, v);
    }
    rb.params("x", &x);
    rb.params("y", &y);
    let ctx = context(&p, &q)?;
    let kcd = rb.quad(&kernel_kcd(&x, &y, &c, &d, &t, &ctx, &cfg.quad)?);
    let kdc = rb.quad(&kernel_kcd(&x, &y, &d, &c, &t, &ctx, &cfg.quad)?);
    // K_cd(x;y) = J_n(r/sx, sr/y; sd, sc), s = √(pq/cdt)
    let s = (&(&p * &q) / &(&(&c * &d) * &t)).sqrt();
    let mut yy: Vec<HPComplex> = x.iter().map(|xj| &r / &(&s * xj)).collect();
    yy.extend(y.iter().map(|yj| &(&s * &r) / yj));
    let (ja, jb) = (&s * &d, &s * &c);
    let j_ab = rb.quad(&dixon_integral(&DixonSpec::J { n, y: yy.clone(), a: ja.clone(), b: jb.clone() }, &ctx, &cfg.quad)?);
    let j_ba = rb.quad(&dixon_integral(&DixonSpec::J { n, y: yy.clone(), a: jb.clone(), b: ja.clone() }, &ctx, &cfg.quad)?);
    let inv: Vec<HPComplex> = yy.iter().map(|v| v.recip()).collect();
    let j_inv = rb.quad(&dixon_integral(&DixonSpec::J { n, y: inv, a: jb, b: ja }, &ctx, &cfg.quad)?);
    rb.check("K_cd = J_n(y; sd, sc)", kcd.clone(), j_ab.clone(), threshold);
    rb.check("J_n(y; a, b) = J_n(y; b, a)", j_ab.clone(), j_ba, threshold);
    rb.check("J_n(y; a, b) = J_n(1/y; b, a)", j_ab, j_inv, threshold);
    Ok(rb.finish(kcd, kdc, threshold))
}

/// Σ_{|I|=k} ∏_{i∈I, j∉I} θ(t x_i/x_j)/θ(x_i/x_j) ∏_{i∈I, j} θ(c x_i y_j)/θ(c t x_i y_j).
fn theta_side(
    x: &[HPComplex],
    y: &[HPComplex],
    k: usize,
    c: &HPComplex,
    t: &HPComplex,
    ctx: &EllipticContext,
) -> Result<HPComplex, QuadratureError> {
    let n = x.len();
    let guard = 10.0 * ctx.tol;
    let ratio = |num: HPComplex, den: HPComplex| -> Result<HPComplex, QuadratureError> {
        let d = ctx.theta_p(&den)?;
        if d.abs_f64() < guard {
            return Err(QuadratureError::Region("θ denominator vanishes".into()));
        }
        Ok(&ctx.theta_p(&num)? / &d)
    };
    let mut acc = HPComplex::zero(ctx.prec());
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut term = HPComplex::one(ctx.prec());
        for i in (0..n).filter(|i| mask & (1 << i) != 0) {
            for j in (0..n).filter(|j| mask & (1 << j) == 0) {
                let u = &x[i] / &x[j];
                term = &term * &ratio(t * &u, u)?;
            }
            for yj in y {
                let u = &(c * &x[i]) * yj;
                term = &term * &ratio(u.clone(), t * &u)?;
            }
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

/// The |I| = k theta function sum is symmetric under x ↔ y.
pub fn verify_theta_identity(
    n: usize,
    k: usize,
    seed: u64,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, QuadratureError> {
    if n == 0 || k > n || n > 16 {
        return Err(QuadratureError::Precondition(format!("need 0 ≤ k ≤ n ≤ 16, got n = {n}, k = {k}")));
    }
    let prec = cfg.prec;
    let mut rb = ReportBuilder::new("theta-identity", n, Some(k as i64), Some(seed), prec);
    let mut smp = Sampler::new(seed, prec);
    for _ in 0..MAX_RETRIES {
        let p = smp.point(0.01, 0.3);
        let t = smp.point(0.2, 0.9);
        let c = smp.point(0.3, 1.5);
        let x: Vec<HPComplex> = (0..n).map(|_| smp.point(0.7, 1.4)).collect();
        let y: Vec<HPComplex> = (0..n).map(|_| smp.point(0.7, 1.4)).collect();
        // q does not enter; any admissible value serves for the context
        let ctx = context(&p, &HPComplex::from_f64(0.5, prec))?;
        let (lhs, rhs) = match (theta_side(&x, &y, k, &c, &t, &ctx), theta_side(&y, &x, k, &c, &t, &ctx)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(QuadratureError::Region(_)), _) | (_, Err(QuadratureError::Region(_))) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        for (name, v) in [("p", &p), ("t", &t), ("c", &c)] {
            rb.param(name, v);
        }
        rb.params("x", &x);
        rb.params("y", &y);
        let threshold = cfg.threshold_or(2f64.powi(-(prec as i32 - 24)));
        return Ok(rb.finish(lhs, rhs, threshold));
    }
    Err(retries_exhausted("theta identity"))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// Default test polynomial m_{(1,0,…,0)}.
pub fn default_test_function(n: usize, prec: u32) -> LaurentPoly<HPComplex> {
    let mut parts = vec![0; n];
    parts[0] = 1;
    let mu = SignedPartition::new(parts).expect("dominant");
    monomial_sym(&mu, &HPComplex::zero(prec))
}

/// D^(k)(Q_c f)(y) against Q_c(D^(k) f)(y) for f = m_{(1,0,…)} (or `f`).
pub fn verify_qd_commutation(
    n: usize,
    k: usize,
    seed: u64,
    f: Option<&LaurentPoly<HPComplex>>,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, QuadratureError> {
    if n == 0 || k > n {
        return Err(QuadratureError::Precondition(format!("need 0 ≤ k ≤ n, got n = {n}, k = {k}")));
    }
    let prec = cfg.prec;
    let owned;
    let f = match f {
        Some(f) => f,
        None => {
            owned = default_test_function(n, prec);
            &owned
        }
    };
    let mut rb = ReportBuilder::new("qd-commutation", n, Some(k as i64), Some(seed), prec);
    let mut smp = Sampler::new(seed, prec);
    let mut found = None;
    for _ in 0..MAX_RETRIES {
        let p = smp.point(0.005, 0.05);
        let q = smp.point(0.15, 0.4);
        let t = smp.point(0.3, 0.8);
        let theta = smp.angle();
        let r = smp.polar(1.0, theta);
        let y = smp.constrained(n, &r, 1.05);
        let lo = (&(&p * &q) / &t).abs_f64();
        // |c| must work for y and for every shifted q^I y used by D^(k)
        let (mut cmin, mut cmax) = (0.0f64, f64::INFINITY);
        for set in subsets(n, k).into_iter().chain(std::iter::once(vec![])) {
            let ys: Vec<HPComplex> = (0..n).map(|i| if set.contains(&i) { &y[i] * &q } else { y[i].clone() }).collect();
            let rs = super::kernels::product_root(&ys);
            let (a, b) = moduli_bounds(&ys, &rs);
            cmin = cmin.max(lo / a);
            cmax = cmax.min(1.0 / b);
        }
        let Some((a, b)) = shrink(cmin, cmax, 1.4) else { continue };
        let c = smp.point(a, b);
        found = Some((p, q, t, y, c));
        break;
    }
    let (p, q, t, y, c) = found.ok_or_else(|| {
        QuadratureError::Region(format!("no admissible c for the shifted tori of D^({k}); use a smaller |q|"))
    })?;
    for (name, v) in [("p", &p), ("q", &q), ("t", &t), ("c", &c)] {
        rb.param(name, v);
    }
    rb.params("y", &y);
    let ctx = context(&p, &q)?;
    let op = DifferenceOperator::ruijsenaars(k, n, 0)?;
    let kernel = QKernel::new(KernelVariant::Q, n, c, t.clone());
    let fq = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(f.eval(x)) };
    let qf = |ys: &[HPComplex]| -> Result<HPComplex, OperatorError> {
        q_apply_numeric(&kernel, &fq, ys, &ctx, &cfg.quad)
            .map(|r| r.value)
            .map_err(|e| OperatorError::Singular(format!("inner quadrature: {e}")))
    };
    let lhs = op.apply_numeric(&qf, &y, &t, &ctx)?;
    let df = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> {
        let g = |z: &[HPComplex]| -> Result<HPComplex, OperatorError> { Ok(f.eval(z)) };
        Ok(op.apply_numeric(&g, x, &t, &ctx)?)
    };
    let rhs = q_apply_numeric(&kernel, &df, &y, &ctx, &cfg.quad)?;
    let rhs = rb.quad(&rhs);
    Ok(rb.finish(lhs, rhs, cfg.threshold_or(1e-10)))
}

/// K₁ = (1/κ_n) I_n^n(dr/x, pqr/cty; tx/dr, cy/r) against
/// K₂ = (1/κ_n) ∏_{i≠j} Γ(t x_i/x_j)/Γ(t y_i/y_j) · I_n^n(cr/x, tr/dy; pqx/ctr, dy/r).
pub fn verify_qhqp(n: usize, seed: u64, cfg: &VerifyConfig) -> Result<VerificationReport, QuadratureError> {
    let prec = cfg.prec;
    let rb = ReportBuilder::new("qhqp", n, None, Some(seed), prec);
    let mut smp = Sampler::new(seed, prec);
    let mut found = None;
    for _ in 0..MAX_RETRIES {
        let p = smp.point(0.02, 0.12);
        let q = smp.point(0.1, 0.35);
        let t = smp.point(0.1, 0.45);
        let theta = smp.angle();
        let r = smp.polar(1.0, theta);
        let x = smp.constrained(n, &r, 1.08);
        let y = smp.constrained(n, &r, 1.08);
        let lo_c = (&(&p * &q) / &t).abs_f64();
        let (a, b) = pair_bounds(&x, &y, &r, lo_c);
        let Some((ca, cb)) = shrink(a, b, 1.3) else { continue };
        let (a, b) = pair_bounds(&x, &y, &r, t.abs_f64());
        let Some((da, db)) = shrink(a, b, 1.3) else { continue };
        let c = smp.point(ca, cb);
        let d = smp.point(da, db);
        found = Some((p, q, t, r, x, y, c, d));
        break;
    }
    let (p, q, t, r, x, y, c, d) = found.ok_or_else(|| retries_exhausted("K1 = K2"))?;
    qhqp_report(rb, &p, &q, &t, &r, &x, &y, &c, &d, cfg)
}

#[allow(clippy::too_many_arguments)]
fn qhqp_report(
    mut rb: ReportBuilder,
    p: &HPComplex,
    q: &HPComplex,
    t: &HPComplex,
    r: &HPComplex,
    x: &[HPComplex],
    y: &[HPComplex],
    c: &HPComplex,
    d: &HPComplex,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, QuadratureError> {
    for (name, v) in [("p", p), ("q", q), ("t", t), ("c", c), ("d", d)] {
        rb.param(name, v);
    }
    rb.params("x", x);
    rb.params("y", y);
    let n = x.len();
    let ctx = context(p, q)?;
    let pq = p * q;
    check_pair_region("c", c, x, y, r, (&pq / t).abs_f64())?;
    check_pair_region("d", d, x, y, r, t.abs_f64())?;
    let kap = super::dixon::kappa(n, &ctx);
    let mut a1: Vec<HPComplex> = x.iter().map(|xj| &(d * r) / xj).collect();
    a1.extend(y.iter().map(|yj| &(&pq * r) / &(&(c * t) * yj)));
    let mut b1: Vec<HPComplex> = x.iter().map(|xj| &(t * xj) / &(d * r)).collect();
    b1.extend(y.iter().map(|yj| &(c * yj) / r));
    let k1 = &rb.quad(&dixon_integral(&DixonSpec::I { n, m: n, a: a1, b: b1 }, &ctx, &cfg.quad)?) / &kap;
    let mut a2: Vec<HPComplex> = x.iter().map(|xj| &(c * r) / xj).collect();
    a2.extend(y.iter().map(|yj| &(t * r) / &(d * yj)));
    let mut b2: Vec<HPComplex> = x.iter().map(|xj| &(&pq * xj) / &(&(c * t) * r)).collect();
    b2.extend(y.iter().map(|yj| &(d * yj) / r));
    let i2 = rb.quad(&dixon_integral(&DixonSpec::I { n, m: n, a: a2, b: b2 }, &ctx, &cfg.quad)?);
    let mut pre = HPComplex::one(ctx.prec());
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pre = &pre * &ctx.gamma_ratio(&(t * &(&x[i] / &x[j])), &(t * &(&y[i] / &y[j])))?;
            }
        }
    }
    let k2 = &(&pre * &i2) / &kap;
    Ok(rb.finish(k1, k2, cfg.threshold_or(1e-10)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig::default()
    }

    #[test]
    fn rains_one_one_is_exact() {
        let r = verify_rains(1, 1, 3, &quick()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.rel_residual < 1e-30);
    }

    #[test]
    fn grry_one_variable() {
        let r = verify_grry(1, 5, &quick()).unwrap();
        assert!(r.pass);
        assert!(r.rel_residual < 1e-30);
    }

    #[test]
    fn theta_trivial_orders() {
        for k in [0, 3] {
            let r = verify_theta_identity(3, k, 11, &quick()).unwrap();
            assert!(r.pass, "k = {k}: {}", r.rel_residual);
        }
        let r = verify_theta_identity(3, 0, 11, &quick()).unwrap();
        assert_eq!(r.lhs, HPComplex::one(128));
    }

    #[test]
    fn theta_identity_n3() {
        for k in [1, 2] {
            let r = verify_theta_identity(3, k, 4, &quick()).unwrap();
            assert!(r.pass, "k = {k}: {}", r.rel_residual);
        }
    }

    #[test]
    fn qhqp_one_variable() {
        let r = verify_qhqp(1, 2, &quick()).unwrap();
        assert!(r.pass, "{}", r.rel_residual);
    }

    #[test]
    fn qd_commutation_order_zero() {
        let r = verify_qd_commutation(2, 0, 1, None, &quick()).unwrap();
        assert!(r.rel_residual < 1e-25, "{}", r.rel_residual);
    }

    #[test]
    fn qd_commutation_n2_k1() {
        let r = verify_qd_commutation(2, 1, 1, None, &quick()).unwrap();
        assert!(r.pass, "{}", r.rel_residual);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = verify_theta_identity(2, 1, 9, &quick()).unwrap();
        let b = verify_theta_identity(2, 1, 9, &quick()).unwrap();
        assert_eq!(a.parameters, b.parameters);
        assert_eq!(a.lhs, b.lhs);
    }
}

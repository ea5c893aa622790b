use rayon::prelude::*;
use rug::Float;

use super::kernels::{q_apply_numeric, KernelVariant, QKernel};
use super::report::{ReportBuilder, VerificationReport, VerifyConfig};
use super::torus::{torus_integrate, TorusDomain};
use super::QuadratureError;
use crate::elliptic_core::{EllipticContext, EllipticParams};
use crate::operator_core::{DifferenceOperator, OperatorError, OperatorKind};
use crate::scalar_ring::{HPComplex, LaurentPoly};

/// Lattice exponents scanned per direction; points with |p^a q^b| below the
/// working tolerance are ignored as well.
pub const LATTICE_SPAN: u32 = 12;

/// (1/2πi)∮_{|z−z0|=δ} g(z) dz by the trapezoidal rule, doubling until stable.
pub fn circle_residue(
    g: &(dyn Fn(&HPComplex) -> Result<HPComplex, QuadratureError> + Sync),
    z0: &HPComplex,
    delta: f64,
    tol: f64,
    cap: usize,
) -> Result<(HPComplex, usize), QuadratureError> {
    let prec = z0.prec();
    let eval = |m: usize, skip_even: bool| -> Result<HPComplex, QuadratureError> {
        let parts: Vec<Result<HPComplex, QuadratureError>> = (0..m)
            .into_par_iter()
            .filter(|j| !(skip_even && j % 2 == 0))
            .map(|j| {
                let frac = Float::with_val(prec, j as u64) / m as u64 + 0.1180339887498949 / 64.0;
                let w = HPComplex::unit(&frac).scale(&Float::with_val(prec, delta));
                Ok(&g(&(z0 + &w))? * &w)
            })
            .collect();
        let mut acc = HPComplex::zero(prec);
        for p in parts {
            acc = &acc + &p?;
        }
        Ok(acc)
    };
    let mut m = 16;
    let mut sum = eval(m, false)?;
    let mut prev = sum.div_i64(m as i64);
    loop {
        if 2 * m > cap {
            return Err(QuadratureError::Convergence {
                points_per_dim: m,
                value: prev.to_string_digits(20),
                change: f64::NAN,
            });
        }
        sum = &sum + &eval(2 * m, true)?;
        m *= 2;
        let cur = sum.div_i64(m as i64);
        if (&cur - &prev).abs_f64() <= tol * cur.abs_f64().max(1e-300) {
            return Ok((cur, m));
        }
        prev = cur;
    }
}

fn context(p: &HPComplex, q: &HPComplex) -> Result<EllipticContext, QuadratureError> {
    Ok(EllipticContext::new(&EllipticParams::with_precision(p.clone(), q.clone())?)?)
}

/// −(n−1)! q^{−k/n} t^{kn} / ((p;p)^n (q;q)^n Γ(t)^n) · (H^(k) f)(q^{−k/n} y).
pub fn noumi_sano_side(
    k: usize,
    f: &LaurentPoly<HPComplex>,
    y: &[HPComplex],
    t: &HPComplex,
    c0: &HPComplex,
    ctx: &EllipticContext,
) -> Result<HPComplex, QuadratureError> {
    let n = y.len();
    let h = DifferenceOperator::new(OperatorKind::NoumiSanoGauged, k, n, 0)?;
    let g = |x: &[HPComplex]| -> Result<HPComplex, OperatorError> { Ok(f.eval(x)) };
    let ys: Vec<HPComplex> = y.iter().map(|v| v * c0).collect();
    let hf = h.apply_numeric(&g, &ys, t, ctx)?;
    let fact: i64 = (1..n as i64).product();
    let den = &(ctx.poch_p() * ctx.poch_q()).powi(n as i64) * &ctx.gamma(t)?.powi(n as i64);
    let pre = &(c0 * &t.powi((k * n) as i64)).scale_i64(-fact) / &den;
    Ok(&pre * &hf)
}

/// c_0 = q^{−k/n}, principal branch.
pub fn pole_location(q: &HPComplex, k: usize, n: usize) -> HPComplex {
    q.powi(-(k as i64)).root(n as u32)
}

fn lattice(p: &HPComplex, q: &HPComplex, tol: f64) -> Vec<HPComplex> {
    let prec = p.prec();
    let mut out = Vec::new();
    let mut pa = HPComplex::one(prec);
    for _ in 0..=LATTICE_SPAN {
        let mut v = pa.clone();
        for _ in 0..=LATTICE_SPAN {
            if v.abs_f64() < tol {
                break;
            }
            out.push(v.clone());
            v = &v * q;
        }
        pa = &pa * p;
        if pa.abs_f64() < tol {
            break;
        }
    }
    out
}

fn min_distance(z: &HPComplex, set: &[HPComplex], exclude: f64) -> f64 {
    set.iter().map(|w| (z - w).abs_f64()).filter(|&d| d > exclude).fold(f64::INFINITY, f64::min)
}

/// Hypotheses of the residue formula: |p| < |q^{k−1}| and some r with
/// max(1, |y_i/y_j|) < r < min(|p^{-1} q^{k−1}|^{1/n}, |pq|^{-1}|t|, (|q^k|/|t|)^{1/(n−1)}).
pub fn check_hypotheses(k: usize, y: &[HPComplex], t: &HPComplex, ctx: &EllipticContext) -> Result<f64, QuadratureError> {
    let n = y.len();
    let (ap, aq, at) = (ctx.p.abs_f64(), ctx.q.abs_f64(), t.abs_f64());
    let qk1 = aq.powi(k as i32 - 1);
    if !(ap < qk1) {
        return Err(QuadratureError::Region("|p| < |q^{k−1}| fails".into()));
    }
    let mut lo = 1.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                lo = lo.max((&y[i] / &y[j]).abs_f64());
            }
        }
    }
    let mut hi = (qk1 / ap).powf(1.0 / n as f64).min(at / (ap * aq));
    if n > 1 {
        hi = hi.min((aq.powi(k as i32) / at).powf(1.0 / (n as f64 - 1.0)));
    }
    if !(lo < hi) {
        return Err(QuadratureError::Region(format!("no r with {lo:.4} < r < {hi:.4} for the residue hypotheses")));
    }
    Ok((lo * hi).sqrt())
}

/// Singular c-values of the continued (Q_c f)(y) for n = 2: pinchings
/// between the inside and outside pole families of the x_1 integrand.
fn singular_c_values(y: &[HPComplex], t: &HPComplex, ctx: &EllipticContext, lat: &[HPComplex]) -> Vec<HPComplex> {
    let big = &y[0] * &y[1];
    let pq = &ctx.p * &ctx.q;
    let mut bases = Vec::new();
    for j in 0..2 {
        for l in 0..2 {
            bases.push((&big / &(&y[j] * &y[l]), -1));
            bases.push((&(&big * &pq.powi(2)) / &(&t.powi(2) * &(&y[j] * &y[l])), 1));
        }
        bases.push((&big / &(t * &y[j].powi(2)), -1));
        bases.push((&(&big * &pq.powi(2)) / &(t * &y[j].powi(2)), 1));
    }
    let mut out = Vec::new();
    for (b, sign) in bases {
        for m in lat {
            let c2 = if sign < 0 { &b / m } else { &b * m };
            let c = c2.sqrt();
            out.push(-c.clone());
            out.push(c);
        }
    }
    out
}

struct Family {
    points: Vec<HPComplex>,
    inside: bool,
    corrected: bool,
}

/// Pole families of x_1 ↦ M((x_1, R/x_1); y) for n = 2 and their required side.
fn families(c: &HPComplex, y: &[HPComplex], t: &HPComplex, ctx: &EllipticContext, lat: &[HPComplex]) -> Vec<Family> {
    let big = &y[0] * &y[1];
    let pq = &ctx.p * &ctx.q;
    let ct = c * t;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut cc = Vec::new();
    let mut d = Vec::new();
    let mut e = Vec::new();
    let mut f = Vec::new();
    for m in lat {
        for yj in y {
            a.push(&(c * yj) * m);
            b.push(&big / &(&(c * yj) * m));
            cc.push(&(&ct * yj) / &(&pq * m));
            d.push(&(&(&big * &pq) * m) / &(&ct * yj));
        }
        let e2 = (&big / &(t * m)).sqrt();
        let f2 = (&(&big * t) * m).sqrt();
        e.push(-e2.clone());
        e.push(e2);
        f.push(-f2.clone());
        f.push(f2);
    }
    vec![
        Family { points: a, inside: true, corrected: true },
        Family { points: b, inside: false, corrected: true },
        Family { points: cc, inside: false, corrected: false },
        Family { points: d, inside: true, corrected: false },
        Family { points: e, inside: false, corrected: false },
        Family { points: f, inside: true, corrected: false },
    ]
}

/// Analytic continuation of (Q_c f)(y) in c for n = 2: the integral over
/// |x_1| = ρ corrected by the residues of the Γ(c y_j/x_i) poles that sit
/// on the wrong side of the circle.
pub fn q_continued_n2(
    c: &HPComplex,
    f: &LaurentPoly<HPComplex>,
    y: &[HPComplex],
    t: &HPComplex,
    ctx: &EllipticContext,
    cfg: &VerifyConfig,
) -> Result<HPComplex, QuadratureError> {
    if y.len() != 2 {
        return Err(QuadratureError::Precondition("contour continuation is implemented for n = 2".into()));
    }
    let prec = ctx.prec();
    let big = &y[0] * &y[1];
    let lat = lattice(&ctx.p, &ctx.q, ctx.tol);
    let fams = families(c, y, t, ctx, &lat);
    let all: Vec<HPComplex> = fams.iter().flat_map(|f| f.points.iter().cloned()).collect();
    let r0 = big.abs_f64().sqrt();
    // circle radius with the widest gap to all pole moduli
    let mut best = (f64::NEG_INFINITY, r0);
    for s in [1.0, 0.9, 1.1, 0.8, 1.25, 0.7, 1.4] {
        let rho = r0 * s;
        let gap = all.iter().map(|z| (z.abs_f64() / rho).ln().abs()).fold(f64::INFINITY, f64::min);
        if gap > best.0 {
            best = (gap, rho);
        }
    }
    let (gap, rho) = best;
    if gap < 0.05 {
        return Err(QuadratureError::Region("pole moduli crowd every candidate circle; shrink the c-circle".into()));
    }
    for fam in fams.iter().filter(|f| !f.corrected) {
        for z in &fam.points {
            if (z.abs_f64() < rho) != fam.inside {
                return Err(QuadratureError::Region(format!(
                    "pole at |x_1| = {:.4e} lies on the wrong side of |x_1| = {rho:.4e}",
                    z.abs_f64()
                )));
            }
        }
    }
    let kernel = QKernel::new(KernelVariant::M, 2, c.clone(), t.clone());
    let h = |x1: &HPComplex| -> Result<HPComplex, QuadratureError> {
        let x = [x1.clone(), &big / x1];
        Ok(&f.eval(&x) * &kernel.eval(&x, y, ctx)?)
    };
    let integrand = |x: &[HPComplex]| h(&x[0]);
    let dom = TorusDomain::new(2, big.root(2), cfg.quad.start)?.with_multipliers(vec![rho / r0])?;
    let mut total = torus_integrate(&integrand, &dom, &cfg.quad)?.value;
    let g = |x: &HPComplex| -> Result<HPComplex, QuadratureError> { Ok(&h(x)? / x) };
    let mut singular = all.clone();
    singular.push(HPComplex::zero(prec));
    for fam in fams.iter().filter(|f| f.corrected) {
        for z in &fam.points {
            let outside = z.abs_f64() > rho;
            if outside != fam.inside {
                continue;
            }
            let delta = 0.25 * min_distance(z, &singular, 1e-300);
            let (res, _) = circle_residue(&g, z, delta, cfg.quad.tol, 4 * cfg.quad.cap)?;
            total = if fam.inside { &total + &res } else { &total - &res };
        }
    }
    Ok(total)
}

/// Residue of c ↦ (Q_c f)(y) at c = q^{−k/n} against the Noumi–Sano side.
/// n = 1 uses the closed form f(y)Γ(c)/Γ(ct); n = 2 the continued integral.
#[allow(clippy::too_many_arguments)]
pub fn residue_noumi_sano(
    k: usize,
    f: &LaurentPoly<HPComplex>,
    y: &[HPComplex],
    p: &HPComplex,
    q: &HPComplex,
    t: &HPComplex,
    seed: Option<u64>,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, QuadratureError> {
    let n = y.len();
    if n == 0 || n > 2 {
        return Err(QuadratureError::Precondition(format!("residue check supports n ∈ {{1, 2}}, got {n}")));
    }
    let prec = cfg.prec;
    let mut rb = ReportBuilder::new("residue", n, Some(k as i64), seed, prec);
    for (name, v) in [("p", p), ("q", q), ("t", t)] {
        rb.param(name, v);
    }
    rb.params("y", y);
    let ctx = context(p, q)?;
    if n == 2 {
        check_hypotheses(k, y, t, &ctx)?;
    }
    let c0 = pole_location(q, k, n);
    let lat = lattice(p, q, ctx.tol);
    let sing = if n == 1 {
        let pq = p * q;
        let mut s: Vec<HPComplex> = lat.iter().map(|m| m.recip()).collect();
        s.extend(lat.iter().map(|m| &(&pq * m) / t));
        s
    } else {
        singular_c_values(y, t, &ctx, &lat)
    };
    let dist = min_distance(&c0, &sing, 1e-9 * c0.abs_f64());
    if !dist.is_finite() {
        return Err(QuadratureError::Region("no isolating radius around the pole".into()));
    }
    let delta = dist / 8.0;
    rb.param("c0", &c0);
    rb.param("delta", &HPComplex::from_f64(delta, prec));
    let lhs = if n == 1 {
        let fy = f.eval(y);
        let g = |c: &HPComplex| -> Result<HPComplex, QuadratureError> {
            Ok(&fy * &ctx.gamma_ratio(c, &(c * t))?)
        };
        circle_residue(&g, &c0, delta, cfg.quad.tol, cfg.quad.cap)?.0
    } else {
        // the regular region Q_c is a consistency anchor for the continuation
        let g = |c: &HPComplex| q_continued_n2(c, f, y, t, &ctx, cfg);
        circle_residue(&g, &c0, delta, 1e-10, cfg.quad.cap)?.0
    };
    let rhs = noumi_sano_side(k, f, y, t, &c0, &ctx)?;
    Ok(rb.finish(lhs, rhs, cfg.threshold_or(if n == 1 { 1e-10 } else { 1e-6 })))
}

/// Continued (Q_c f)(y) against plain quadrature where the torus is admissible.
pub fn continuation_matches_torus(
    c: &HPComplex,
    f: &LaurentPoly<HPComplex>,
    y: &[HPComplex],
    t: &HPComplex,
    ctx: &EllipticContext,
    cfg: &VerifyConfig,
) -> Result<f64, QuadratureError> {
    let a = q_continued_n2(c, f, y, t, ctx, cfg)?;
    let kernel = QKernel::new(KernelVariant::Q, 2, c.clone(), t.clone());
    let fq = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(f.eval(x)) };
    let b = q_apply_numeric(&kernel, &fq, y, ctx, &cfg.quad)?.value;
    Ok(a.rel_diff(&b, 1e-30))
}

use std::collections::{BTreeMap, HashMap};

use super::basis::{m_to_elliptic, EllipticBasis, EllipticCoefficients};
use super::SpectralError;
use crate::scalar_ring::{LaurentPoly, Mono, PSeries, RationalFn};
use crate::symmetric_core::{monomial_sym, SignedPartition};

pub const KERNEL_MAX_N: usize = 2;
pub const KERNEL_MAX_ORDER: usize = 2;
pub const KERNEL_MAX_DEGREE: i32 = 2;

/// K^(m)(x;y), the c^m coefficient of K_c, to order p^K, together with its
/// diagonal form Σ_λ B_λ(p) 𝐏_λ(x;p) 𝐏_λ(y;p).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelExpansion {
    pub m: i32,
    pub n: usize,
    pub order: usize,
    /// Laurent polynomials in x_1..x_n, y_1..y_n (2n variables)
    pub coefficient: PSeries<LaurentPoly<RationalFn>>,
    pub b: BTreeMap<SignedPartition, PSeries<RationalFn>>,
}

impl KernelExpansion {
    /// Σ_λ B_λ(p) 𝐏_λ(x;p) 𝐏_λ(y;p) in the 2n variables of `coefficient`.
    pub fn reconstruct(&self) -> Result<PSeries<LaurentPoly<RationalFn>>, SpectralError> {
        let basis = EllipticBasis::symbolic();
        let zero = RationalFn::zero();
        let nv = 2 * self.n;
        let pz = LaurentPoly::zero(nv, &zero);
        let mut acc = PSeries::zero(self.order, &pz);
        for (lam, b) in &self.b {
            let e = basis.get(lam, self.order)?;
            let s = e.series(&zero);
            let px = s.map(|c| embed(c, 0, nv));
            let py = s.map(|c| embed(c, self.n, nv));
            let bs = b.map(|c| LaurentPoly::constant(nv, c.clone()));
            acc = acc.add(&bs.mul(&px).mul(&py));
        }
        Ok(acc)
    }
}

fn embed(f: &LaurentPoly<RationalFn>, offset: usize, nv: usize) -> LaurentPoly<RationalFn> {
    let n = f.nvars();
    let mut out = LaurentPoly::zero(nv, f.proto());
    for (m, c) in f.terms() {
        let mut e = vec![0; nv];
        e[offset..offset + n].copy_from_slice(&m[..n]);
        out.add_term(mono(&e), c.clone());
    }
    out
}

fn mono(e: &[i32]) -> Mono {
    let mut m = [0; crate::scalar_ring::MAX_VARS];
    m[..e.len()].copy_from_slice(e);
    m
}

/// a_k = (t;q)_k/(q;q)_k.
fn cauchy_coeffs(d: usize) -> Vec<RationalFn> {
    let mut a = vec![RationalFn::one()];
    for k in 1..=d {
        let num = RationalFn::one().sub(&RationalFn::qt_monomial(k as i32 - 1, 1));
        let den = RationalFn::one().sub(&RationalFn::qt_monomial(k as i32, 0));
        a.push(a[k - 1].mul(&num).div(&den).expect("1 − q^k is invertible"));
    }
    a
}

/// Raw expansion: K_c = ∏_{i,j} ∏_{r ≥ 0} F(c^{r+1} d^r x_i y_j) F(c^r d^{r+1} q/(t x_i y_j))
/// with F(w) = (tw;q)_∞/(w;q)_∞ and d = p/c, keeping c^k d^l with k − l = m, l ≤ K.
fn raw_expansion(m: i32, n: usize, order: usize) -> PSeries<LaurentPoly<RationalFn>> {
    let zero = RationalFn::zero();
    let nv = 2 * n;
    let pz = LaurentPoly::zero(nv, &zero);
    let cmax = order as i32 + m;
    if cmax < 0 {
        return PSeries::zero(order, &pz);
    }
    let dmax = order as i32;
    let (ci, di) = (nv, nv + 1);
    let a = cauchy_coeffs(cmax.max(dmax) as usize);
    let q_over_t = RationalFn::qt_monomial(1, -1);
    let keep = |e: &Mono| e[ci] <= cmax && e[di] <= dmax;
    let mut prod = LaurentPoly::one(nv + 2, &zero);
    // F(coef · c^α d^β x_i^s y_j^s) truncated by the degree bounds
    let factor = |i: usize, j: usize, alpha: i32, beta: i32, s: i32, coef: &RationalFn| {
        let mut f = LaurentPoly::zero(nv + 2, &zero);
        let mut k = 0i32;
        while k * alpha <= cmax && k * beta <= dmax && (k as usize) < a.len() {
            let mut e = vec![0; nv + 2];
            e[i] = k * s;
            e[n + j] = k * s;
            e[ci] = k * alpha;
            e[di] = k * beta;
            f.add_term(mono(&e), a[k as usize].mul(&coef.powi(k as i64).unwrap()));
            k += 1;
        }
        f
    };
    let one = RationalFn::one();
    for i in 0..n {
        for j in 0..n {
            let mut r = 0;
            while r <= cmax.max(dmax) {
                if r < cmax && r <= dmax {
                    prod = prod.mul_filtered(&factor(i, j, r + 1, r, 1, &one), keep);
                }
                if r <= cmax && r < dmax {
                    prod = prod.mul_filtered(&factor(i, j, r, r + 1, -1, &q_over_t), keep);
                }
                r += 1;
            }
        }
    }
    let mut layers = vec![pz.clone(); order + 1];
    for (e, c) in prod.terms() {
        if e[ci] - e[di] == m {
            layers[e[di] as usize].add_term(mono(&e[..nv]), c.clone());
        }
    }
    PSeries::new(layers, order, &pz)
}

fn is_dominant(e: &[i32]) -> bool {
    e.windows(2).all(|w| w[0] >= w[1])
}

/// K^(m) for n variables to order p^K, diagonalized in the 𝐏-basis.
pub fn kernel_coefficient(m: i32, n: usize, order: usize) -> Result<KernelExpansion, SpectralError> {
    if n == 0 || n > KERNEL_MAX_N {
        return Err(SpectralError::Envelope(format!("n = {n} outside 1..={KERNEL_MAX_N}")));
    }
    if m.abs() > KERNEL_MAX_DEGREE || order > KERNEL_MAX_ORDER {
        return Err(SpectralError::Envelope(format!(
            "need |m| ≤ {KERNEL_MAX_DEGREE} and K ≤ {KERNEL_MAX_ORDER}, got m = {m}, K = {order}"
        )));
    }
    let coefficient = raw_expansion(m, n, order);
    kernel_coefficient_in(m, n, coefficient)
}

/// Diagonalizes a given coefficient series of V ⊗ V (2n variables).
pub fn kernel_coefficient_in(
    m: i32,
    n: usize,
    coefficient: PSeries<LaurentPoly<RationalFn>>,
) -> Result<KernelExpansion, SpectralError> {
    let order = coefficient.order();
    let zero = RationalFn::zero();
    let basis = EllipticBasis::symbolic();
    let mut conv: HashMap<(SignedPartition, usize), EllipticCoefficients<RationalFn>> = HashMap::new();
    let mut to_p = |nu: &SignedPartition, k: usize| -> Result<EllipticCoefficients<RationalFn>, SpectralError> {
        if let Some(c) = conv.get(&(nu.clone(), k)) {
            return Ok(c.clone());
        }
        let f = PSeries::constant(monomial_sym(nu, &zero), k);
        let c = m_to_elliptic(&f, &basis)?;
        conv.insert((nu.clone(), k), c.clone());
        Ok(c)
    };
    // B_{λμ}(p) = Σ_l p^l Σ_{ν,ρ} G^(l)_{νρ} M_ν[λ](p) M_ρ[μ](p)
    let mut bfull: BTreeMap<(SignedPartition, SignedPartition), Vec<RationalFn>> = BTreeMap::new();
    for l in 0..=order {
        let rest = order - l;
        for (e, g) in coefficient.coeff(l).terms() {
            let (ex, ey) = (&e[..n], &e[n..2 * n]);
            if !is_dominant(ex) || !is_dominant(ey) {
                continue;
            }
            let nu = SignedPartition::new(ex.to_vec())?;
            let rho = SignedPartition::new(ey.to_vec())?;
            let mx = to_p(&nu, rest)?;
            let my = to_p(&rho, rest)?;
            for (lam, sx) in &mx {
                for (mu, sy) in &my {
                    let acc = bfull.entry((lam.clone(), mu.clone())).or_insert_with(|| vec![zero.clone(); order + 1]);
                    for i in 0..=rest {
                        for j in 0..=rest - i {
                            let v = g.mul(sx.coeff(i)).mul(sy.coeff(j));
                            acc[l + i + j] = acc[l + i + j].add(&v);
                        }
                    }
                }
            }
        }
    }
    let mut b = BTreeMap::new();
    for ((lam, mu), s) in bfull {
        if s.iter().all(|c| c.is_zero()) {
            continue;
        }
        if lam != mu {
            return Err(SpectralError::NotDiagonal(lam, mu));
        }
        b.insert(lam, PSeries::new(s, order, &zero));
    }
    Ok(KernelExpansion { m, n, order, coefficient, b })
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
    fn order_p_raw_expansion() {
        let k = kernel_coefficient(0, 2, 1).unwrap();
        let one = RationalFn::one();
        assert_eq!(k.coefficient.coeff(0), &LaurentPoly::one(4, &one));
        let s = |off: usize| {
            let mut p = LaurentPoly::constant(4, RationalFn::from_int(2));
            let mut e = [0; 4];
            e[off] = 1;
            e[off + 1] = -1;
            p = p.add(&LaurentPoly::monomial(4, &e, one.clone()));
            e[off] = -1;
            e[off + 1] = 1;
            p.add(&LaurentPoly::monomial(4, &e, one.clone()))
        };
        let pref = r("(1-t)^2*q/(t*(1-q)^2)");
        assert_eq!(k.coefficient.coeff(1), &s(0).mul(&s(2)).scale(&pref));
    }

    #[test]
    fn diagonal_coefficients_of_the_example() {
        let k = kernel_coefficient(0, 2, 1).unwrap();
        let z = RationalFn::zero();
        let b00 = PSeries::new(vec![RationalFn::one(), r("(t+1)(t-1)^2*q(3*t*q+t-q-3)/(t(q-1)(t*q-1)^2)")], 1, &z);
        let b11 = PSeries::new(vec![z.clone(), r("(1-t)^2*q/(t(1-q)^2)")], 1, &z);
        assert_eq!(k.b.get(&sp(&[0, 0])), Some(&b00));
        assert_eq!(k.b.get(&sp(&[1, -1])), Some(&b11));
        assert_eq!(k.b.len(), 2);
        assert_eq!(k.reconstruct().unwrap(), k.coefficient);
    }

    #[test]
    fn homogeneity() {
        for m in [-1, 1] {
            let k = kernel_coefficient(m, 2, 1).unwrap();
            for l in 0..=1 {
                for (e, _) in k.coefficient.coeff(l).terms() {
                    assert_eq!(e[0] + e[1], m);
                    assert_eq!(e[2] + e[3], m);
                }
            }
            assert_eq!(k.reconstruct().unwrap(), k.coefficient);
        }
    }
}

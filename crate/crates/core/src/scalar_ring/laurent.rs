use std::collections::BTreeMap;
use std::fmt;

use rug::Integer;

use super::{Field, Ring};

pub const MAX_VARS: usize = 8;

/// Exponent vector; entries past `nvars` stay zero.
pub type Mono = [i32; MAX_VARS];

/// Sparse Laurent polynomial in x_1..x_n with coefficients in `C`.
///
/// A zero coefficient is never stored. `zero` keeps the coefficient
/// context (precision, for instance) so an empty polynomial still knows its ring.
#[derive(Clone, PartialEq)]
pub struct LaurentPoly<C: Ring> {
    nvars: usize,
    terms: BTreeMap<Mono, C>,
    zero: C,
}

pub fn mono_from(exps: &[i32]) -> Mono {
    assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
    let mut m = [0; MAX_VARS];
    m[..exps.len()].copy_from_slice(exps);
    m
}

impl<C: Ring> LaurentPoly<C> {
    pub fn zero(nvars: usize, proto: &C) -> Self {
        assert!(nvars <= MAX_VARS);
        LaurentPoly { nvars, terms: BTreeMap::new(), zero: proto.zero_like() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(nvars, &[], c)
    }

    pub fn one(nvars: usize, proto: &C) -> Self {
        Self::constant(nvars, proto.one_like())
    }

    pub fn monomial(nvars: usize, exps: &[i32], c: C) -> Self {
        let mut p = Self::zero(nvars, &c);
        p.add_term(mono_from(exps), c);
        p
    }

    /// x_i as a polynomial (0-based index).
    pub fn var(nvars: usize, i: usize, proto: &C) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        let mut p = Self::zero(nvars, proto);
        p.add_term(e, proto.one_like());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn proto(&self) -> &C {
        &self.zero
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Mono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&[0; MAX_VARS])
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                let s = x.plus(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.negate());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negate())
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars, &self.zero);
        }
        self.map_coeffs(|c| c.times(s))
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero(self.nvars, &self.zero);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Converts coefficients into another ring.
    pub fn convert<D: Ring>(&self, proto: &D, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        let mut out = LaurentPoly::zero(self.nvars, proto);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    pub fn try_convert<D: Ring, E>(&self, proto: &D, f: impl Fn(&C) -> Result<D, E>) -> Result<LaurentPoly<D>, E> {
        let mut out = LaurentPoly::zero(self.nvars, proto);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c)?);
        }
        Ok(out)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_filtered(o, |_| true)
    }

    /// Product keeping only exponent vectors accepted by `keep`.
    pub fn mul_filtered(&self, o: &Self, keep: impl Fn(&Mono) -> bool) -> Self {
        let mut out = Self::zero(self.nvars.max(o.nvars), &self.zero);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let mut m = [0; MAX_VARS];
                for i in 0..MAX_VARS {
                    m[i] = ma[i] + mb[i];
                }
                if keep(&m) {
                    out.add_term(m, ca.times(cb));
                }
            }
        }
        out
    }

    /// Retains terms whose exponent vector satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Self {
        let mut out = Self::zero(self.nvars, &self.zero);
        for (m, c) in &self.terms {
            if keep(m) {
                out.terms.insert(*m, c.clone());
            }
        }
        out
    }

    /// Multiplies every term by `f(exponents)`, e.g. q^{e_i} for a q-shift.
    pub fn scale_by_mono(&self, f: impl Fn(&Mono) -> C) -> Self {
        let mut out = Self::zero(self.nvars, &self.zero);
        for (m, c) in &self.terms {
            out.add_term(*m, c.times(&f(m)));
        }
        out
    }

    /// Applies a change of exponent vectors (permutation, inversion, shift).
    pub fn map_monos(&self, f: impl Fn(&Mono) -> Mono) -> Self {
        let mut out = Self::zero(self.nvars, &self.zero);
        for (m, c) in &self.terms {
            out.add_term(f(m), c.clone());
        }
        out
    }

    /// Multiplication by the monomial x^e.
    pub fn shift_mono(&self, e: &Mono) -> Self {
        self.map_monos(|m| {
            let mut r = *m;
            for i in 0..MAX_VARS {
                r[i] += e[i];
            }
            r
        })
    }

    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        self.map_monos(|m| {
            let mut r = *m;
            r.swap(i, j);
            r
        })
    }

    /// f(1/x).
    pub fn invert_vars(&self) -> Self {
        self.map_monos(|m| m.map(|e| -e))
    }

    /// Invariance under all transpositions of the listed variables.
    pub fn is_symmetric_in(&self, vars: &[usize]) -> bool {
        vars.windows(2).all(|w| {
            let s = self.swap_vars(w[0], w[1]);
            s.sub(self).terms.values().all(|c| c.negligible(&self.max_coeff_scale()))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        let vars: Vec<usize> = (0..self.nvars).collect();
        self.is_symmetric_in(&vars)
    }

    pub fn max_coeff_scale(&self) -> C {
        self.terms
            .values()
            .max_by(|a, b| a.magnitude_log2().total_cmp(&b.magnitude_log2()))
            .cloned()
            .unwrap_or_else(|| self.zero.clone())
    }

    pub fn degree_range(&self, i: usize) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|m| m[i]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Splits by the exponent of x_i; returned polynomials have x_i^0.
    pub fn split_by_var(&self, i: usize) -> BTreeMap<i32, Self> {
        let mut out: BTreeMap<i32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut r = *m;
            let e = r[i];
            r[i] = 0;
            out.entry(e).or_insert_with(|| Self::zero(self.nvars, &self.zero)).terms.insert(r, c.clone());
        }
        out
    }

    /// Exact division by (x_hi − κ·x_lo), or `None` if a remainder is left.
    pub fn div_linear(&self, hi: usize, lo: usize, kappa: &C) -> Option<Self> {
        if self.is_empty() {
            return Some(self.clone());
        }
        let levels = self.split_by_var(hi);
        let emin = *levels.keys().next().unwrap();
        let emax = *levels.keys().next_back().unwrap();
        let mut lo_shift = [0; MAX_VARS];
        lo_shift[lo] = 1;
        let zero = Self::zero(self.nvars, &self.zero);
        let mut quotient = Self::zero(self.nvars, &self.zero);
        // Q_{e-1} = F_e + κ x_lo Q_e, descending from the top level
        let mut q_prev = zero.clone();
        let mut e = emax;
        while e > emin {
            let f_e = levels.get(&e).unwrap_or(&zero);
            let q_next = f_e.add(&q_prev.shift_mono(&lo_shift).scale(kappa));
            let mut hi_shift = [0; MAX_VARS];
            hi_shift[hi] = e - 1;
            quotient = quotient.add(&q_next.shift_mono(&hi_shift));
            q_prev = q_next;
            e -= 1;
        }
        let rem = levels[&emin].add(&q_prev.shift_mono(&lo_shift).scale(kappa));
        let (s1, s2) = (self.max_coeff_scale(), quotient.max_coeff_scale());
        let scale = if s2.magnitude_log2() > s1.magnitude_log2() { s2 } else { s1 };
        if rem.terms.values().all(|c| c.negligible(&scale)) {
            Some(quotient)
        } else {
            None
        }
    }

    /// Drops coefficients negligible relative to the largest one.
    pub fn prune(&self) -> Self {
        let scale = self.max_coeff_scale();
        self.filter_coeffs(|c| !c.negligible(&scale))
    }

    fn filter_coeffs(&self, keep: impl Fn(&C) -> bool) -> Self {
        let mut out = Self::zero(self.nvars, &self.zero);
        for (m, c) in &self.terms {
            if keep(c) {
                out.terms.insert(*m, c.clone());
            }
        }
        out
    }

    /// Coefficients of x^μ for weakly decreasing μ: the m-basis view of a
    /// symmetric polynomial.
    pub fn dominant_terms(&self) -> BTreeMap<Vec<i32>, C> {
        let n = self.nvars;
        self.terms
            .iter()
            .filter(|(m, _)| m[..n].windows(2).all(|w| w[0] >= w[1]))
            .map(|(m, c)| (m[..n].to_vec(), c.clone()))
            .collect()
    }
}

impl<C: Field> LaurentPoly<C> {
    /// Evaluation at a point with nonzero coordinates.
    pub fn eval(&self, x: &[C]) -> C {
        let mut acc = self.zero.clone();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..self.nvars {
                if m[i] != 0 {
                    t = t.times(&x[i].pow_i(m[i] as i64).expect("nonzero coordinate"));
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }
}

impl<C: Ring> Ring for LaurentPoly<C> {
    fn zero_like(&self) -> Self {
        Self::zero(self.nvars, &self.zero)
    }
    fn one_like(&self) -> Self {
        Self::one(self.nvars, &self.zero)
    }
    fn from_int_like(&self, v: &Integer) -> Self {
        Self::constant(self.nvars, self.zero.from_int_like(v))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let ci = c.inverse()?;
        Some(Self::monomial(self.nvars, &m.map(|e| -e)[..self.nvars], ci))
    }
}

impl<C: Ring> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{c:?}]x{:?}", &m[..self.nvars])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::RationalFn;

    fn x(i: usize) -> LaurentPoly<RationalFn> {
        LaurentPoly::var(2, i, &RationalFn::zero())
    }

    #[test]
    fn linear_division_roundtrip() {
        let kappa = RationalFn::parse("q/t").unwrap();
        let lin = x(1).sub(&x(0).scale(&kappa));
        let f = x(0).mul(&x(0)).add(&x(1).inverse().unwrap()).add(&x(0).mul(&x(1)).scale(&RationalFn::t()));
        let g = f.mul(&lin);
        assert_eq!(g.div_linear(1, 0, &kappa), Some(f.clone()));
        assert_eq!(f.div_linear(1, 0, &kappa), None);
    }

    #[test]
    fn symmetric_detection() {
        let f = x(0).add(&x(1));
        assert!(f.is_symmetric());
        assert!(!x(0).is_symmetric());
    }
}

use std::fmt;

use rug::Integer;

use super::{Ring, ScalarError};

/// Power series in p truncated after p^K; dense coefficient list of length K+1.
#[derive(Clone, PartialEq)]
pub struct PSeries<C: Ring> {
    coeffs: Vec<C>,
}

impl<C: Ring> PSeries<C> {
    /// Pads or truncates `coeffs` to exactly K+1 entries; `zero` supplies padding.
    pub fn new(mut coeffs: Vec<C>, order: usize, zero: &C) -> Self {
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(zero.zero_like());
        }
        PSeries { coeffs }
    }

    pub fn constant(c: C, order: usize) -> Self {
        let z = c.zero_like();
        Self::new(vec![c], order, &z)
    }

    pub fn zero(order: usize, proto: &C) -> Self {
        Self::new(Vec::new(), order, proto)
    }

    pub fn one(order: usize, proto: &C) -> Self {
        Self::constant(proto.one_like(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut C {
        &mut self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let z = self.coeffs[0].zero_like();
        Self::new(self.coeffs[..=order.min(self.order())].to_vec(), order.min(self.order()), &z)
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> PSeries<D> {
        PSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_map<D: Ring, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<PSeries<D>, E> {
        Ok(PSeries { coeffs: self.coeffs.iter().map(f).collect::<Result<_, _>>()? })
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        PSeries { coeffs: (0..=k).map(|i| self.coeffs[i].plus(&o.coeffs[i])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        PSeries { coeffs: (0..=k).map(|i| self.coeffs[i].minus(&o.coeffs[i])).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.negate())
    }

    pub fn scale(&self, s: &C) -> Self {
        self.map(|c| c.times(s))
    }

    /// Cauchy product truncated at min(order(a), order(b)).
    pub fn mul(&self, o: &Self) -> Self {
        let k = self.order().min(o.order());
        let mut out = Vec::with_capacity(k + 1);
        for n in 0..=k {
            let mut acc = self.coeffs[0].zero_like();
            for i in 0..=n {
                if self.coeffs[i].is_zero() || o.coeffs[n - i].is_zero() {
                    continue;
                }
                acc = acc.plus(&self.coeffs[i].times(&o.coeffs[n - i]));
            }
            out.push(acc);
        }
        PSeries { coeffs: out }
    }

    /// Multiplies by p^j, dropping terms beyond the order.
    pub fn shift(&self, j: usize) -> Self {
        let z = self.coeffs[0].zero_like();
        let mut c = vec![z.clone(); j];
        c.extend(self.coeffs.iter().cloned());
        Self::new(c, self.order(), &z)
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        let a0inv = self.coeffs[0].inverse().ok_or(ScalarError::NotInvertible)?;
        let k = self.order();
        let mut b: Vec<C> = Vec::with_capacity(k + 1);
        b.push(a0inv.clone());
        for n in 1..=k {
            let mut acc = self.coeffs[0].zero_like();
            for j in 1..=n {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc = acc.plus(&self.coeffs[j].times(&b[n - j]));
            }
            b.push(acc.times(&a0inv).negate());
        }
        Ok(PSeries { coeffs: b })
    }

    /// exp(a) for a series with vanishing constant term.
    pub fn exp(&self) -> Result<Self, ScalarError> {
        if !self.coeffs[0].is_zero() {
            return Err(ScalarError::NotInvertible);
        }
        // e' = a' e  ⇒  n e_n = Σ_{j=1}^n j a_j e_{n-j}
        let k = self.order();
        let mut e: Vec<C> = Vec::with_capacity(k + 1);
        e.push(self.coeffs[0].one_like());
        for n in 1..=k {
            let mut acc = self.coeffs[0].zero_like();
            for j in 1..=n {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                let term = self.coeffs[j].times(&e[n - j]);
                acc = acc.plus(&term.times(&term.from_int_like(&Integer::from(j))));
            }
            e.push(acc.div_int(n as i64).ok_or(ScalarError::NotInvertible)?);
        }
        Ok(PSeries { coeffs: e })
    }
}

impl<C: Ring> fmt::Debug for PSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{c:?}]p^{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(p^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_ring::RationalFn;

    fn s(v: &[i64], k: usize) -> PSeries<RationalFn> {
        PSeries::new(v.iter().map(|&x| RationalFn::from_int(x)).collect(), k, &RationalFn::zero())
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(s(&[1, 1], 2).mul(&s(&[1, -1], 2)), s(&[1, 0, -1], 2));
    }

    #[test]
    fn geometric_inverse() {
        assert_eq!(s(&[1, -1], 3).inv().unwrap(), s(&[1, 1, 1, 1], 3));
        assert_eq!(s(&[0, 1], 3).inv(), Err(ScalarError::NotInvertible));
    }

    #[test]
    fn exp_of_p() {
        let e = s(&[0, 1], 3).exp().unwrap();
        let expected = PSeries::new(
            vec![RationalFn::one(), RationalFn::one(), RationalFn::ratio(1, 2), RationalFn::ratio(1, 6)],
            3,
            &RationalFn::zero(),
        );
        assert_eq!(e, expected);
    }
}

//! Sparse polynomials over ℤ in the parameters (q, t, c, d).
//!
//! Exponent vectors are packed into a `u64`, 16 bits per variable with `q` in
//! the most significant slot, so descending integer order is lexicographic
//! order q > t > c > d.

use std::collections::HashMap;
use std::fmt;

use rug::Integer;

use super::Ring;

pub const NVARS: usize = 4;
const BITS: u32 = 16;
const MASK: u64 = 0xFFFF;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q = 0,
    T = 1,
    C = 2,
    D = 3,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::Q, Var::T, Var::C, Var::D];

    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::T => "t",
            Var::C => "c",
            Var::D => "d",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        match s {
            "q" => Some(Var::Q),
            "t" => Some(Var::T),
            "c" => Some(Var::C),
            "d" => Some(Var::D),
            _ => None,
        }
    }

    fn shift(self) -> u32 {
        BITS * (NVARS as u32 - 1 - self as u32)
    }
}

pub type Exps = [u32; NVARS];

pub fn pack(e: &Exps) -> u64 {
    let mut k = 0u64;
    for v in Var::ALL {
        let x = e[v as usize];
        assert!(x <= MASK as u32, "exponent {x} of {} overflows", v.name());
        k |= (x as u64) << v.shift();
    }
    k
}

pub fn unpack(k: u64) -> Exps {
    let mut e = [0u32; NVARS];
    for v in Var::ALL {
        e[v as usize] = ((k >> v.shift()) & MASK) as u32;
    }
    e
}

fn key_exp(k: u64, v: Var) -> u32 {
    ((k >> v.shift()) & MASK) as u32
}

fn key_divides(a: u64, b: u64) -> bool {
    Var::ALL.iter().all(|&v| key_exp(a, v) <= key_exp(b, v))
}

/// Polynomial with integer coefficients, terms sorted by descending key.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    terms: Vec<(u64, Integer)>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Integer::from(1))
    }

    pub fn constant(c: Integer) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            IntPoly { terms: vec![(0, c)] }
        }
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v as usize] = 1;
        Self::monomial(&e, Integer::from(1))
    }

    pub fn monomial(e: &Exps, c: Integer) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            IntPoly { terms: vec![(pack(e), c)] }
        }
    }

    fn from_unsorted(mut terms: Vec<(u64, Integer)>) -> Self {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(u64, Integer)> = Vec::with_capacity(terms.len());
        for (k, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 += c,
                _ => out.push((k, c)),
            }
        }
        out.retain(|t| t.1 != 0);
        IntPoly { terms: out }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exps, Integer)>) -> Self {
        Self::from_unsorted(terms.into_iter().map(|(e, c)| (pack(&e), c)).collect())
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exps, &Integer)> + '_ {
        self.terms.iter().map(|(k, c)| (unpack(*k), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == 0)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1 == 1
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn constant_value(&self) -> Option<Integer> {
        if self.is_zero() {
            Some(Integer::new())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading_coeff(&self) -> Option<&Integer> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn leading_exps(&self) -> Option<Exps> {
        self.terms.first().map(|t| unpack(t.0))
    }

    pub fn degree(&self, v: Var) -> u32 {
        self.terms.iter().map(|t| key_exp(t.0, v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn min_exps(&self) -> Exps {
        let mut m = [u32::MAX; NVARS];
        for (e, _) in self.terms() {
            for i in 0..NVARS {
                m[i] = m[i].min(e[i]);
            }
        }
        if self.is_zero() {
            [0; NVARS]
        } else {
            m
        }
    }

    /// Divides by the monomial with exponents `e`; caller guarantees divisibility.
    pub fn shift_down(&self, e: &Exps) -> Self {
        let k = pack(e);
        IntPoly { terms: self.terms.iter().map(|(t, c)| (t - k, c.clone())).collect() }
    }

    pub fn shift_up(&self, e: &Exps) -> Self {
        let mut out = self.clone();
        for (k, _) in out.terms.iter_mut() {
            let mut x = unpack(*k);
            for i in 0..NVARS {
                x[i] += e[i];
            }
            *k = pack(&x);
        }
        out
    }

    pub fn neg(&self) -> Self {
        IntPoly { terms: self.terms.iter().map(|(k, c)| (*k, Integer::from(-c))).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 > b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 > a[i].0 {
                let c = if negate { Integer::from(-&b[j].1) } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            } else {
                let c = if negate {
                    Integer::from(&a[i].1 - &b[j].1)
                } else {
                    Integer::from(&a[i].1 + &b[j].1)
                };
                if c != 0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        IntPoly { terms: out }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        for v in Var::ALL {
            assert!(
                self.degree(v) + other.degree(v) <= MASK as u32,
                "degree overflow in {}",
                v.name()
            );
        }
        if self.terms.len() == 1 || other.terms.len() == 1 {
            let (m, p) = if self.terms.len() == 1 { (self, other) } else { (other, self) };
            let (mk, mc) = &m.terms[0];
            return IntPoly {
                terms: p.terms.iter().map(|(k, c)| (k + mk, Integer::from(c * mc))).collect(),
            };
        }
        let mut acc: HashMap<u64, Integer> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let e = acc.entry(ka + kb).or_default();
                *e += ca * cb;
            }
        }
        Self::from_unsorted(acc.into_iter().collect())
    }

    pub fn mul_int(&self, c: &Integer) -> Self {
        if *c == 0 {
            return Self::zero();
        }
        IntPoly { terms: self.terms.iter().map(|(k, x)| (*k, Integer::from(x * c))).collect() }
    }

    pub fn div_int_exact(&self, c: &Integer) -> Self {
        IntPoly { terms: self.terms.iter().map(|(k, x)| (*k, Integer::from(x.div_exact_ref(c)))).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Non-negative gcd of the integer coefficients.
    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for (_, c) in &self.terms {
            g.gcd_mut(c);
            if g == 1 {
                break;
            }
        }
        g
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.is_one() {
            return Some(self.clone());
        }
        if d.terms.len() == 1 {
            let (dk, dc) = &d.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (k, c) in &self.terms {
                if !key_divides(*dk, *k) || !c.is_divisible(dc) {
                    return None;
                }
                out.push((k - dk, Integer::from(c.div_exact_ref(dc))));
            }
            return Some(IntPoly { terms: out });
        }
        let (lk, lc) = d.terms[0].clone();
        let mut r = self.clone();
        let mut quot: Vec<(u64, Integer)> = Vec::new();
        while let Some((rk, rc)) = r.terms.first().cloned() {
            if !key_divides(lk, rk) || !rc.is_divisible(&lc) {
                return None;
            }
            let qk = rk - lk;
            let qc = Integer::from(rc.div_exact_ref(&lc));
            let t = IntPoly { terms: d.terms.iter().map(|(k, c)| (k + qk, Integer::from(c * &qc))).collect() };
            r = r.sub(&t);
            quot.push((qk, qc));
        }
        Some(Self::from_unsorted(quot))
    }

    /// Coefficients as a polynomial in `v`, index = degree.
    fn coeffs_in(&self, v: Var) -> Vec<IntPoly> {
        let deg = self.degree(v) as usize;
        let mut out = vec![IntPoly::zero(); deg + 1];
        let clear = !(MASK << v.shift());
        for (k, c) in &self.terms {
            out[key_exp(*k, v) as usize].terms.push((k & clear, c.clone()));
        }
        out
    }

    fn from_coeffs_in(v: Var, coeffs: &[IntPoly]) -> Self {
        let mut terms = Vec::new();
        for (d, p) in coeffs.iter().enumerate() {
            let add = (d as u64) << v.shift();
            for (k, c) in &p.terms {
                terms.push((k + add, c.clone()));
            }
        }
        Self::from_unsorted(terms)
    }

    /// Replaces `v` by the monomial `target`, i.e. x_v^e ↦ target^e.
    pub fn subst_monomial(&self, v: Var, target: &Exps) -> Self {
        let mut out = Vec::with_capacity(self.terms.len());
        for (e, c) in self.terms() {
            let k = e[v as usize];
            let mut x = e;
            x[v as usize] = 0;
            for i in 0..NVARS {
                x[i] += k * target[i];
            }
            out.push((pack(&x), c.clone()));
        }
        Self::from_unsorted(out)
    }

    /// Evaluates at `vals` in any ring; `one` fixes the ring context.
    pub fn eval<R: Ring>(&self, vals: &[R; NVARS], one: &R) -> R {
        let mut powers: Vec<Vec<R>> = Vec::with_capacity(NVARS);
        for v in Var::ALL {
            let deg = self.degree(v) as usize;
            let mut row = Vec::with_capacity(deg + 1);
            row.push(one.clone());
            for i in 1..=deg {
                row.push(row[i - 1].times(&vals[v as usize]));
            }
            powers.push(row);
        }
        let mut acc = one.zero_like();
        for (e, c) in self.terms() {
            let mut t = one.from_int_like(c);
            for v in 0..NVARS {
                if e[v] > 0 {
                    t = t.times(&powers[v][e[v] as usize]);
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }

    /// Sign-normalized so the leading coefficient is positive.
    pub fn normalize_sign(self) -> Self {
        match self.terms.first() {
            Some((_, c)) if *c < 0 => self.neg(),
            _ => self,
        }
    }

    /// Greatest common divisor with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone().normalize_sign();
        }
        if other.is_zero() {
            return self.clone().normalize_sign();
        }
        let ma = self.min_exps();
        let mb = other.min_exps();
        let mut m = [0; NVARS];
        for i in 0..NVARS {
            m[i] = ma[i].min(mb[i]);
        }
        let a = self.shift_down(&ma);
        let b = other.shift_down(&mb);
        gcd_core(&a, &b).shift_up(&m).normalize_sign()
    }
}

fn gcd_many(polys: &[IntPoly]) -> IntPoly {
    let mut g = IntPoly::zero();
    for p in polys {
        if p.is_zero() {
            continue;
        }
        g = if g.is_zero() { p.clone().normalize_sign() } else { g.gcd(p) };
        if g.is_one() {
            break;
        }
    }
    g
}

fn gcd_core(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_constant() || b.is_constant() {
        let mut g = a.content();
        g.gcd_mut(&b.content());
        return IntPoly::constant(g);
    }
    if a == b {
        return a.clone();
    }
    if let Some(g) = heu_gcd(a, b, 0) {
        return g;
    }
    prs_gcd(a, b)
}

impl IntPoly {
    fn max_abs_coeff(&self) -> Integer {
        self.terms.iter().map(|(_, c)| Integer::from(c.abs_ref())).max().unwrap_or_default()
    }

    /// Substitutes the integer `xi` for `v`.
    fn eval_int(&self, v: Var, xi: &Integer) -> IntPoly {
        let clear = !(MASK << v.shift());
        let mut pows: Vec<Integer> = vec![Integer::from(1)];
        let mut out = Vec::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            let e = key_exp(*k, v) as usize;
            while pows.len() <= e {
                let next = Integer::from(pows.last().unwrap() * xi);
                pows.push(next);
            }
            out.push((k & clear, Integer::from(c * &pows[e])));
        }
        Self::from_unsorted(out)
    }

    /// Inverse of `eval_int` for coefficients below ξ/2 in size: symmetric ξ-adic digits.
    fn xi_adic(&self, v: Var, xi: &Integer) -> IntPoly {
        let half = Integer::from(xi >> 1);
        let mut out = Vec::new();
        for (k, c) in &self.terms {
            let mut rest = c.clone();
            let mut e = 0u64;
            while rest != 0 {
                let mut d = Integer::from(&rest % xi);
                if d > half {
                    d -= xi;
                } else if d < Integer::from(-&half) {
                    d += xi;
                }
                rest -= &d;
                rest = rest.div_exact(xi);
                if d != 0 {
                    out.push((k + (e << v.shift()), d));
                }
                e += 1;
            }
        }
        Self::from_unsorted(out)
    }
}

/// Heuristic gcd by evaluation at a large integer and ξ-adic reconstruction;
/// the candidate is accepted only if it divides both inputs.
fn heu_gcd(a: &IntPoly, b: &IntPoly, depth: u32) -> Option<IntPoly> {
    if a.is_zero() {
        return Some(b.clone().normalize_sign());
    }
    if b.is_zero() {
        return Some(a.clone().normalize_sign());
    }
    if a.is_constant() || b.is_constant() {
        let mut g = a.content();
        g.gcd_mut(&b.content());
        return Some(IntPoly::constant(g));
    }
    let mut c = a.content();
    c.gcd_mut(&b.content());
    let pa = a.div_int_exact(&a.content());
    let pb = b.div_int_exact(&b.content());
    let v = Var::ALL.into_iter().find(|&v| pa.degree(v) > 0 || pb.degree(v) > 0)?;
    let bound = pa.max_abs_coeff().min(pb.max_abs_coeff());
    let mut xi = Integer::from(&bound * 2u32) + 29u32;
    for _ in 0..6 {
        if xi.significant_bits() > 4096 || depth > 8 {
            return None;
        }
        let ea = pa.eval_int(v, &xi);
        let eb = pb.eval_int(v, &xi);
        if !ea.is_zero() && !eb.is_zero() {
            if let Some(gamma) = heu_gcd(&ea, &eb, depth + 1) {
                let g = gamma.xi_adic(v, &xi);
                if !g.is_zero() {
                    let g = g.div_int_exact(&g.content()).normalize_sign();
                    if pa.div_exact(&g).is_some() && pb.div_exact(&g).is_some() {
                        return Some(g.mul_int(&c));
                    }
                }
            }
        }
        xi = Integer::from(&xi * 73794u32) / 27011u32;
    }
    None
}

fn prs_gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let v = Var::ALL
        .into_iter()
        .filter(|&v| a.degree(v) > 0 && b.degree(v) > 0)
        .min_by_key(|&v| a.degree(v).max(b.degree(v)));
    let v = match v {
        Some(v) => v,
        None => {
            // no shared variable: the gcd lives in the contents
            let w = Var::ALL.into_iter().find(|&w| a.degree(w) > 0).unwrap();
            let ca = gcd_many(&a.coeffs_in(w));
            return gcd_core(&ca, b);
        }
    };
    let ua = a.coeffs_in(v);
    let ub = b.coeffs_in(v);
    let ca = gcd_many(&ua);
    let cb = gcd_many(&ub);
    let c = ca.gcd(&cb);
    let mut pa = primitive(&ua, &ca);
    let mut pb = primitive(&ub, &cb);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    loop {
        let r = prem(&pa, &pb);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            pb = vec![IntPoly::one()];
            break;
        }
        pa = pb;
        let cr = gcd_many(&r);
        pb = primitive(&r, &cr);
    }
    let cg = gcd_many(&pb);
    let g = primitive(&pb, &cg);
    IntPoly::from_coeffs_in(v, &g).mul(&c)
}

fn primitive(u: &[IntPoly], c: &IntPoly) -> Vec<IntPoly> {
    if c.is_one() {
        return u.to_vec();
    }
    u.iter().map(|x| x.div_exact(c).expect("content divides coefficient")).collect()
}

fn trim(v: &mut Vec<IntPoly>) {
    while v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients.
fn prem(a: &[IntPoly], b: &[IntPoly]) -> Vec<IntPoly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    trim(&mut r);
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let off = dr - db;
        for (i, ri) in r.iter_mut().enumerate() {
            let mut x = ri.mul(lb);
            if i >= off {
                x = x.sub(&lr.mul(&b[i - off]));
            }
            *ri = x;
        }
        debug_assert!(r[dr].is_zero());
        trim(&mut r);
    }
    r
}

fn fmt_monomial(e: &Exps, out: &mut String) -> bool {
    // display order t, q, c, d
    let order = [Var::T, Var::Q, Var::C, Var::D];
    let mut first = true;
    for v in order {
        let k = e[v as usize];
        if k == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(v.name());
        if k > 1 {
            out.push_str(&format!("^{k}"));
        }
    }
    !first
}

impl IntPoly {
    /// Plain expanded rendering, lowest total degree first.
    pub fn to_expanded_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(Exps, &Integer)> = self.terms().collect();
        let order = [Var::T, Var::Q, Var::C, Var::D];
        terms.sort_by_key(|(e, _)| {
            let tot: u32 = e.iter().sum();
            (tot, order.map(|v| e[v as usize]))
        });
        let mut s = String::new();
        for (idx, (e, c)) in terms.iter().enumerate() {
            let neg = **c < 0;
            let abs = Integer::from(c.abs_ref());
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push(if neg { '-' } else { '+' });
            }
            let is_const = e.iter().all(|&x| x == 0);
            if abs != 1 || is_const {
                s.push_str(&abs.to_string());
                if !is_const {
                    s.push('*');
                }
            }
            fmt_monomial(e, &mut s);
        }
        s
    }
}

pub(crate) fn monomial_string(e: &Exps) -> String {
    let mut s = String::new();
    fmt_monomial(e, &mut s);
    s
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expanded_string())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expanded_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> IntPoly {
        IntPoly::var(Var::Q)
    }
    fn t() -> IntPoly {
        IntPoly::var(Var::T)
    }
    fn one() -> IntPoly {
        IntPoly::one()
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let f = one().sub(&t().mul(&q()));
        let a = f.mul(&one().add(&q())).mul(&q());
        let b = f.mul(&one().sub(&t())).mul(&q().mul(&q()));
        let g = a.gcd(&b);
        assert_eq!(g, q().mul(&f).normalize_sign());
    }

    #[test]
    fn exact_division() {
        let a = one().sub(&q()).mul(&one().add(&t()));
        assert_eq!(a.div_exact(&one().sub(&q())), Some(one().add(&t())));
        assert_eq!(a.div_exact(&one().sub(&t())), None);
    }

    #[test]
    fn coprime_gives_one() {
        let a = one().sub(&q());
        let b = one().sub(&t());
        assert!(a.gcd(&b).is_one());
    }
}

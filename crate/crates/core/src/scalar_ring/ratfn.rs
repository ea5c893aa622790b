use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::Integer;

use super::poly::{monomial_string, Exps, IntPoly, Var, NVARS};
use super::{Field, Ring, ScalarError};

/// Reduced fraction of integer polynomials in (q, t, c, d).
///
/// Canonical form: gcd(num, den) = 1 and the leading coefficient of `den` is
/// positive, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: IntPoly,
    den: IntPoly,
}

impl RationalFn {
    pub fn zero() -> Self {
        RationalFn { num: IntPoly::zero(), den: IntPoly::one() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        RationalFn { num: IntPoly::constant(Integer::from(v)), den: IntPoly::one() }
    }

    pub fn from_integer(v: &Integer) -> Self {
        RationalFn { num: IntPoly::constant(v.clone()), den: IntPoly::one() }
    }

    pub fn ratio(a: i64, b: i64) -> Self {
        Self::new(IntPoly::constant(Integer::from(a)), IntPoly::constant(Integer::from(b)))
            .expect("nonzero denominator")
    }

    pub fn var(v: Var) -> Self {
        RationalFn { num: IntPoly::var(v), den: IntPoly::one() }
    }

    pub fn q() -> Self {
        Self::var(Var::Q)
    }

    pub fn t() -> Self {
        Self::var(Var::T)
    }

    /// q^a t^b c^g d^h with possibly negative exponents.
    pub fn monomial(e: [i32; NVARS]) -> Self {
        let mut n = [0u32; NVARS];
        let mut d = [0u32; NVARS];
        for i in 0..NVARS {
            if e[i] >= 0 {
                n[i] = e[i] as u32;
            } else {
                d[i] = (-e[i]) as u32;
            }
        }
        RationalFn {
            num: IntPoly::monomial(&n, Integer::from(1)),
            den: IntPoly::monomial(&d, Integer::from(1)),
        }
    }

    pub fn qt_monomial(a: i32, b: i32) -> Self {
        Self::monomial([a, b, 0, 0])
    }

    pub fn from_poly(p: IntPoly) -> Self {
        RationalFn { num: p, den: IntPoly::one() }
    }

    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn numer(&self) -> &IntPoly {
        &self.num
    }

    pub fn denom(&self) -> &IntPoly {
        &self.den
    }

    fn canonical(num: IntPoly, den: IntPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.leading_coeff().is_some_and(|c| *c < 0) {
            RationalFn { num: num.neg(), den: den.neg() }
        } else {
            RationalFn { num, den }
        }
    }

    fn reduce(num: IntPoly, den: IntPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = fast_gcd(&num, &den);
        if g.is_one() {
            return Self::canonical(num, den);
        }
        let n = num.div_exact(&g).expect("gcd divides numerator");
        let d = den.div_exact(&g).expect("gcd divides denominator");
        Self::canonical(n, d)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        if self.den.is_one() {
            return Self::canonical(self.num.mul(&o.den).add(&o.num), o.den.clone());
        }
        if o.den.is_one() {
            return Self::canonical(self.num.add(&o.num.mul(&self.den)), self.den.clone());
        }
        let g = fast_gcd(&self.den, &o.den);
        let b1 = self.den.div_exact(&g).unwrap();
        let d1 = o.den.div_exact(&g).unwrap();
        let num = self.num.mul(&d1).add(&o.num.mul(&b1));
        let den = self.den.mul(&d1);
        if g.is_one() {
            return Self::canonical(num, den);
        }
        if num.is_zero() {
            return Self::zero();
        }
        let h = fast_gcd(&num, &g);
        if h.is_one() {
            Self::canonical(num, den)
        } else {
            Self::canonical(num.div_exact(&h).unwrap(), den.div_exact(&h).unwrap())
        }
    }

    pub fn neg(&self) -> Self {
        RationalFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        let g1 = fast_gcd(&self.num, &o.den);
        let g2 = fast_gcd(&o.num, &self.den);
        let a = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).unwrap() };
        let d = if g1.is_one() { o.den.clone() } else { o.den.div_exact(&g1).unwrap() };
        let c = if g2.is_one() { o.num.clone() } else { o.num.div_exact(&g2).unwrap() };
        let b = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).unwrap() };
        Self::canonical(a.mul(&c), b.mul(&d))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::canonical(self.den.clone(), self.num.clone()))
        }
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn powi(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Some(acc)
    }

    /// Replaces `v` by a monomial in the other parameters (e.g. t ↦ q^k).
    pub fn subst_monomial(&self, v: Var, target: &Exps) -> Self {
        Self::reduce(self.num.subst_monomial(v, target), self.den.subst_monomial(v, target))
    }

    /// Evaluates in any field; `None` when the denominator vanishes there.
    pub fn eval<F: Field>(&self, vals: &[F; NVARS], one: &F) -> Option<F> {
        let n = self.num.eval(vals, one);
        let d = self.den.eval(vals, one);
        d.inverse().map(|di| n.times(&di))
    }

    /// Parses expressions such as `(1-t)(1+q)/(1-t*q)` or `-2*q^2 + t/3`.
    pub fn parse(s: &str) -> Result<Self, ScalarError> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0 };
        let v = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(ScalarError::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }

    /// Factored rendering: binomial factors (1 ± monomial) are pulled out of
    /// numerator and denominator, the rest is printed expanded.
    pub fn to_factored_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let (sn, n) = factor_display(&self.num);
        let (sd, d) = factor_display(&self.den);
        let neg = sn != sd;
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        let n_str = if n.is_empty() { "1".to_string() } else { n.join("*") };
        s.push_str(&n_str.replace(")*(", ")("));
        if !d.is_empty() {
            let d_str = d.join("*").replace(")*(", ")(");
            s.push('/');
            // a lone factor needs no parentheses unless it is itself a product
            let bare = d[0].starts_with('(') || !d[0].contains('*');
            if d.len() == 1 && bare {
                s.push_str(&d_str);
            } else {
                s.push('(');
                s.push_str(&d_str);
                s.push(')');
            }
        }
        s
    }
}

/// gcd with cheap paths for constant and monomial operands.
fn fast_gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_one() || b.is_one() {
        return IntPoly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        let (m, p) = if a.is_monomial() { (a, b) } else { (b, a) };
        let me = m.min_exps();
        let pe = p.min_exps();
        let mut e = [0u32; NVARS];
        for i in 0..NVARS {
            e[i] = me[i].min(pe[i]);
        }
        let mut g = m.content();
        g.gcd_mut(&p.content());
        return IntPoly::monomial(&e, g);
    }
    a.gcd(b)
}

/// Returns (is_negative, factor strings) for a nonzero polynomial.
fn factor_display(p: &IntPoly) -> (bool, Vec<String>) {
    let mut rest = p.clone();
    let mut negative = false;
    let mut out: Vec<String> = Vec::new();
    let c = rest.content();
    if rest.leading_coeff().is_some_and(|x| *x < 0) {
        negative = true;
        rest = rest.neg();
    }
    if c != 1 {
        rest = rest.div_int_exact(&c);
        out.push(c.to_string());
    }
    let me = rest.min_exps();
    if me.iter().any(|&x| x > 0) {
        rest = rest.shift_down(&me);
    }
    let mono = if me.iter().any(|&x| x > 0) { Some(monomial_string(&me)) } else { None };

    let mut factors: Vec<String> = Vec::new();
    for e in candidate_exponents(&rest) {
        for sign in [-1i64, 1] {
            let mut f = IntPoly::one();
            f = f.add(&IntPoly::monomial(&e, Integer::from(sign)));
            let mut mult = 0;
            while rest.total_degree() > 0 {
                match rest.div_exact(&f) {
                    Some(q) => {
                        rest = q;
                        mult += 1;
                    }
                    None => break,
                }
            }
            if mult > 0 {
                let body = format!("(1{}{})", if sign < 0 { '-' } else { '+' }, monomial_string(&e));
                factors.push(if mult > 1 { format!("{body}^{mult}") } else { body });
            }
        }
    }
    // after pulling binomials the leftover may have flipped sign
    if rest.leading_coeff().is_some_and(|x| *x < 0) {
        negative = !negative;
        rest = rest.neg();
    }
    if let Some(rc) = rest.constant_value() {
        if rc != 1 {
            if let Some(first) = out.first_mut() {
                let v = Integer::from(first.parse::<Integer>().unwrap() * rc);
                *first = v.to_string();
            } else {
                out.push(rc.to_string());
            }
        }
    } else {
        factors.push(format!("({})", rest.to_expanded_string()));
    }
    if let Some(m) = mono {
        out.push(m);
    }
    out.extend(factors);
    (negative, out)
}

/// Monomials m of small degree, ordered by degree then t before q.
fn candidate_exponents(p: &IntPoly) -> Vec<Exps> {
    let degs = Var::ALL.map(|v| p.degree(v).min(4));
    let mut out = Vec::new();
    for a in 0..=degs[0] {
        for b in 0..=degs[1] {
            for c in 0..=degs[2] {
                for d in 0..=degs[3] {
                    if a + b + c + d > 0 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out.sort_by_key(|e| (e.iter().sum::<u32>(), [e[2], e[3], e[0], e[1]]));
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Integer),
    Var(Var),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ScalarError> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().map_err(|_| ScalarError::Parse(text.clone()))?));
        } else if "+-*/^()".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else if let Some(v) = Var::from_name(&ch.to_string()) {
            out.push(Tok::Var(v));
            i += 1;
        } else {
            return Err(ScalarError::Parse(format!("unexpected character {ch:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFn, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFn, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.div(&d).ok_or(ScalarError::ZeroDenominator)?;
            } else if matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::Op('('))) {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFn, ScalarError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFn, ScalarError> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = match self.toks.get(self.pos) {
                Some(Tok::Num(n)) => n.to_i64().ok_or_else(|| ScalarError::Parse("exponent too large".into()))?,
                _ => return Err(ScalarError::Parse("expected integer exponent".into())),
            };
            self.pos += 1;
            let e = if neg { -e } else { e };
            return base.powi(e).ok_or(ScalarError::ZeroDenominator);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFn, ScalarError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RationalFn::from_integer(&n))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(RationalFn::var(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(ScalarError::Parse("missing ')'".into()));
                }
                Ok(v)
            }
            other => Err(ScalarError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_factored_string())
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_factored_string())
    }
}

impl<'a> Add<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &'a RationalFn) -> RationalFn {
        RationalFn::add(self, rhs)
    }
}

impl<'a> Sub<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &'a RationalFn) -> RationalFn {
        RationalFn::sub(self, rhs)
    }
}

impl<'a> Mul<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &'a RationalFn) -> RationalFn {
        RationalFn::mul(self, rhs)
    }
}

impl<'a> Div<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn div(self, rhs: &'a RationalFn) -> RationalFn {
        RationalFn::div(self, rhs).expect("division by zero rational function")
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn::neg(self)
    }
}

impl Ring for RationalFn {
    fn zero_like(&self) -> Self {
        RationalFn::zero()
    }
    fn one_like(&self) -> Self {
        RationalFn::one()
    }
    fn from_int_like(&self, v: &Integer) -> Self {
        RationalFn::from_integer(v)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        RationalFn::from_int(v)
    }
    fn is_zero(&self) -> bool {
        RationalFn::is_zero(self)
    }
    fn is_one(&self) -> bool {
        RationalFn::is_one(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        RationalFn::add(self, rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        RationalFn::sub(self, rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        RationalFn::mul(self, rhs)
    }
    fn negate(&self) -> Self {
        RationalFn::neg(self)
    }
    fn inverse(&self) -> Option<Self> {
        self.inv()
    }
}

impl Field for RationalFn {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_matches_expected_shape() {
        let b = RationalFn::parse("(1-t)(1+q)/(1-t*q)").unwrap();
        assert_eq!(b.to_factored_string(), "(1-t)(1+q)/(1-t*q)");
        let a = RationalFn::parse("(1-t)^2(1+t)q/(t(1-q)(1-t*q))").unwrap();
        let back = RationalFn::parse(&a.to_factored_string()).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn reduction_cancels() {
        let x = RationalFn::parse("(1-q^2)/(1-q)").unwrap();
        assert_eq!(x, RationalFn::parse("1+q").unwrap());
        let y = RationalFn::parse("q/(q*t)").unwrap();
        assert_eq!(y, RationalFn::parse("1/t").unwrap());
    }

    #[test]
    fn arithmetic_is_canonical() {
        let a = RationalFn::parse("1/(1-q)").unwrap();
        let b = RationalFn::parse("q/(1-q)").unwrap();
        assert_eq!(a.sub(&b), RationalFn::one());
        let c = RationalFn::parse("t/(1-q*t) - t^2/(1-q)").unwrap();
        let d = c.add(&RationalFn::parse("t^2/(1-q)").unwrap());
        assert_eq!(d, RationalFn::parse("t/(1-t*q)").unwrap());
    }
}

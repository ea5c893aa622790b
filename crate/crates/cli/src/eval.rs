use ruijsenaars_core::elliptic_core::{theta, tol_for_prec, EllipticContext, EllipticParams};
use ruijsenaars_core::elliptic_spectral::{elliptic_macdonald, kernel_coefficient};
use ruijsenaars_core::operator_core::{DifferenceOperator, OperatorKind};
use ruijsenaars_core::scalar_ring::{HPComplex, LaurentPoly, PSeries, RationalFn};
use ruijsenaars_core::symmetric_core::{format_m_expansion, m_expand, macdonald_expansion, macdonald_poly, monomial_sym, SignedPartition};

use crate::CliError;

/// Extra bits of the reference evaluation used to certify digits.
const GUARD_BITS: u32 = 64;

/// A numeric value with the number of decimal digits that agree with a
/// higher-precision recomputation (capped by the tolerance of the working precision).
pub struct Certified {
    pub value: HPComplex,
    pub digits: usize,
}

impl Certified {
    pub fn render(&self) -> String {
        format!("{}\ncertified digits: {}", self.value.to_string_digits(self.digits.max(1)), self.digits)
    }
}

fn certify(prec: u32, f: impl Fn(u32) -> Result<HPComplex, CliError>) -> Result<Certified, CliError> {
    let value = f(prec)?;
    let reference = f(prec + GUARD_BITS)?;
    let cap = (-tol_for_prec(prec).log10()).floor() as usize;
    let diff = value.rel_diff(&reference, 1e-300);
    let digits = if diff == 0.0 { cap } else { ((-diff.log10()).floor().max(0.0) as usize).min(cap) };
    Ok(Certified { value, digits })
}

fn parse_c(s: &str, prec: u32) -> Result<HPComplex, CliError> {
    HPComplex::parse(s, prec).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_partition(s: &str, n: Option<usize>) -> Result<SignedPartition, CliError> {
    let lam: SignedPartition = s.parse().map_err(|e: ruijsenaars_core::symmetric_core::SymmetricError| CliError::Usage(e.to_string()))?;
    match n {
        None => Ok(lam),
        Some(n) if n == lam.n() => Ok(lam),
        Some(n) if n > lam.n() => {
            let mut parts = lam.parts().to_vec();
            parts.resize(n, 0);
            SignedPartition::new(parts).map_err(|e| CliError::Usage(e.to_string()))
        }
        Some(n) => Err(CliError::Usage(format!("λ = {lam} has more than n = {n} parts"))),
    }
}

pub fn eval_theta(p: &str, x: &str, prec: u32) -> Result<String, CliError> {
    let c = certify(prec, |b| {
        let (p, x) = (parse_c(p, b)?, parse_c(x, b)?);
        Ok(theta(&x, &p, tol_for_prec(b))?)
    })?;
    Ok(c.render())
}

pub fn eval_gamma(p: &str, q: &str, x: &str, prec: u32) -> Result<String, CliError> {
    let c = certify(prec, |b| {
        let (p, q, x) = (parse_c(p, b)?, parse_c(q, b)?, parse_c(x, b)?);
        let ctx = EllipticContext::new(&EllipticParams::with_precision(p, q)?)?;
        Ok(ctx.gamma(&x)?)
    })?;
    Ok(c.render())
}

pub fn eval_macdonald(lambda: &SignedPartition) -> Result<String, CliError> {
    Ok(format_m_expansion(&*macdonald_expansion(lambda)?))
}

pub fn eval_emacdonald(lambda: &SignedPartition, order: usize) -> Result<String, CliError> {
    let e = elliptic_macdonald(lambda, order)?;
    let lines: Vec<String> = e.layers.iter().enumerate().map(|(k, l)| format!("p^{k}: {}", format_m_expansion(l))).collect();
    Ok(lines.join("\n"))
}

fn format_poly(f: &LaurentPoly<RationalFn>, names: &[String]) -> String {
    let mut terms = Vec::new();
    for (m, c) in f.terms() {
        let mono: Vec<String> = names
            .iter()
            .enumerate()
            .filter(|(i, _)| m[*i] != 0)
            .map(|(i, v)| if m[i] == 1 { v.clone() } else { format!("{v}^{}", m[i]) })
            .collect();
        let mono = mono.join("*");
        terms.push(match (c.is_one(), mono.is_empty()) {
            (true, true) => "1".into(),
            (true, false) => mono,
            (false, true) => format!("({c})"),
            (false, false) => format!("({c})*{mono}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn format_series(s: &PSeries<RationalFn>) -> String {
    let terms: Vec<String> = s
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| match k {
            0 => format!("({c})"),
            1 => format!("({c})*p"),
            _ => format!("({c})*p^{k}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn eval_kernel(m: i32, n: usize, order: usize) -> Result<String, CliError> {
    let k = kernel_coefficient(m, n, order)?;
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("y{i}"))).collect();
    let mut out = Vec::new();
    for (j, c) in k.coefficient.coeffs().iter().enumerate() {
        out.push(format!("K^({m}) p^{j}: {}", format_poly(c, &names)));
    }
    for (lam, b) in &k.b {
        out.push(format!("B{lam} = {}", format_series(b)));
    }
    Ok(out.join("\n"))
}

pub fn eval_apply(
    kind: OperatorKind,
    k: usize,
    lambda: &SignedPartition,
    order: usize,
    macdonald: bool,
) -> Result<String, CliError> {
    let n = lambda.n();
    let f = if macdonald { macdonald_poly(lambda)? } else { monomial_sym(lambda, &RationalFn::one()) };
    let op = DifferenceOperator::new(kind, k, n, order)?;
    let out = op.apply(&PSeries::constant(f, order))?;
    let mut lines = Vec::new();
    for (j, c) in out.coeffs().iter().enumerate() {
        lines.push(format!("p^{j}: {}", format_m_expansion(&m_expand(c)?)));
    }
    Ok(lines.join("\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn macdonald_example() {
        let lam = parse_partition("2,0", Some(2)).unwrap();
        assert_eq!(eval_macdonald(&lam).unwrap(), "m[2,0] + ((1-t)(1+q)/(1-t*q))*m[1,1]");
    }

    #[test]
    fn padding() {
        assert_eq!(parse_partition("2", Some(3)).unwrap().parts(), &[2, 0, 0]);
        assert!(parse_partition("2,1,0", Some(2)).is_err());
        assert!(parse_partition("0,1", None).is_err());
    }

    #[test]
    fn gamma_is_certified() {
        let s = eval_gamma("0.1", "0.2", "0.5", 128).unwrap();
        let digits: usize = s.lines().nth(1).unwrap().trim_start_matches("certified digits: ").parse().unwrap();
        assert!(digits >= 30, "{s}");
    }
}

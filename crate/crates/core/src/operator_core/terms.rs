//! Operators written as sums of shift terms with θ-product coefficients.
//!
//! A coefficient is a signed monomial q^a t^b times a product of factors
//! θ_p(q^α t^β x_i/x_j)^e (with i = j meaning the constant θ_p(q^α t^β)).
//! Both the exact and the numeric application read this one description.

use std::collections::BTreeMap;

use super::OperatorKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaArg {
    pub qa: i32,
    pub tb: i32,
    pub i: usize,
    pub j: usize,
}

/// One shift term: sign·q^qexp·t^texp·∏θ(arg)^power · T^shift.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftTerm {
    pub shift: Vec<u32>,
    pub sign: i64,
    pub qexp: i64,
    pub texp: i64,
    pub thetas: BTreeMap<ThetaArg, i32>,
}

impl ShiftTerm {
    fn new(shift: Vec<u32>) -> Self {
        ShiftTerm { shift, sign: 1, qexp: 0, texp: 0, thetas: BTreeMap::new() }
    }

    fn theta(&mut self, qa: i32, tb: i32, i: usize, j: usize, power: i32) {
        let e = self.thetas.entry(ThetaArg { qa, tb, i, j }).or_insert(0);
        *e += power;
        if *e == 0 {
            self.thetas.remove(&ThetaArg { qa, tb, i, j });
        }
    }

    /// (q^qa t^tb x_i/x_j; q, p)_m raised to `power`.
    fn elliptic_factorial(&mut self, qa: i32, tb: i32, i: usize, j: usize, m: i32, power: i32) {
        if m >= 0 {
            for l in 0..m {
                self.theta(qa + l, tb, i, j, power);
            }
        } else {
            for l in 1..=(-m) {
                self.theta(qa - l, tb, i, j, -power);
            }
        }
    }
}

/// Weak compositions of k into n parts, in lexicographically decreasing order.
pub fn compositions(k: u32, n: usize) -> Vec<Vec<u32>> {
    fn rec(k: u32, n: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(k - first, n - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if k == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(k, n, &mut Vec::new(), &mut out);
    out
}

/// k-subsets of {0..n-1} as indicator vectors.
pub fn subsets(k: usize, n: usize) -> Vec<Vec<u32>> {
    compositions(k as u32, n).into_iter().filter(|c| c.iter().all(|&x| x <= 1)).collect()
}

pub fn shift_terms(kind: OperatorKind, k: usize, n: usize) -> Vec<ShiftTerm> {
    match kind {
        OperatorKind::Ruijsenaars => ruijsenaars_terms(k, n),
        OperatorKind::NoumiSano => noumi_sano_terms(k, n),
        OperatorKind::NoumiSanoGauged => noumi_sano_gauged_terms(k, n),
    }
}

fn ruijsenaars_terms(k: usize, n: usize) -> Vec<ShiftTerm> {
    subsets(k, n)
        .into_iter()
        .map(|ind| {
            let mut term = ShiftTerm::new(ind.clone());
            for i in 0..n {
                for j in 0..n {
                    if ind[i] == 1 && ind[j] == 0 {
                        term.theta(0, 1, i, j, 1);
                        term.theta(0, 0, i, j, -1);
                    }
                }
            }
            term
        })
        .collect()
}

fn noumi_sano_terms(k: usize, n: usize) -> Vec<ShiftTerm> {
    compositions(k as u32, n)
        .into_iter()
        .map(|mu| {
            let mut term = ShiftTerm::new(mu.clone());
            let m: Vec<i32> = mu.iter().map(|&x| x as i32).collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    term.qexp += m[j] as i64;
                    term.theta(m[i] - m[j], 0, i, j, 1);
                    term.theta(0, 0, i, j, -1);
                }
            }
            for i in 0..n {
                for j in 0..n {
                    term.elliptic_factorial(0, 1, i, j, m[i], 1);
                    term.elliptic_factorial(1, 0, i, j, m[i], -1);
                }
            }
            term
        })
        .collect()
}

fn noumi_sano_gauged_terms(k: usize, n: usize) -> Vec<ShiftTerm> {
    compositions(k as u32, n)
        .into_iter()
        .map(|mu| {
            let mut term = ShiftTerm::new(mu.clone());
            let m: Vec<i32> = mu.iter().map(|&x| x as i32).collect();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        term.elliptic_factorial(0, 1, i, j, m[i] - m[j], 1);
                        term.elliptic_factorial(0, 0, i, j, m[i] - m[j], -1);
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    term.elliptic_factorial(1, -1, i, j, m[i], 1);
                    term.elliptic_factorial(1, 0, i, j, m[i], -1);
                }
            }
            term
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerations() {
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(subsets(1, 3).len(), 3);
        assert_eq!(subsets(0, 3), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn noumi_sano_order_zero_is_identity() {
        let t = noumi_sano_terms(0, 3);
        assert_eq!(t.len(), 1);
        assert!(t[0].thetas.is_empty());
    }
}

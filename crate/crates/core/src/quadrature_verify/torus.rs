use rayon::prelude::*;
use rug::Float;

use super::QuadratureError;
use crate::scalar_ring::HPComplex;

/// Default per-dimension point cap.
pub const DEFAULT_CAP: usize = 1024;

/// {x : x_j = r·m_j·e^{iθ_j} (j < n), x_n = r^n/(x_1⋯x_{n−1})}.
///
/// `multipliers` (default all 1) deform the radii of the free variables.
#[derive(Clone, Debug)]
pub struct TorusDomain {
    pub n: usize,
    pub r: HPComplex,
    pub points_per_dim: usize,
    pub multipliers: Option<Vec<f64>>,
}

impl TorusDomain {
    pub fn new(n: usize, r: HPComplex, points_per_dim: usize) -> Result<Self, QuadratureError> {
        if n == 0 {
            return Err(QuadratureError::Precondition("n must be positive".into()));
        }
        if r.is_zero_exact() {
            return Err(QuadratureError::Precondition("torus radius must be nonzero".into()));
        }
        Ok(TorusDomain { n, r, points_per_dim: points_per_dim.max(1), multipliers: None })
    }

    pub fn with_multipliers(mut self, m: Vec<f64>) -> Result<Self, QuadratureError> {
        if m.len() + 1 != self.n || m.iter().any(|&v| !(v > 0.0)) {
            return Err(QuadratureError::Precondition("need n−1 positive radius multipliers".into()));
        }
        self.multipliers = Some(m);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n - 1
    }
}

/// Settings for adaptive doubling.
#[derive(Clone, Copy, Debug)]
pub struct QuadConfig {
    pub start: usize,
    pub cap: usize,
    pub tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { start: 16, cap: DEFAULT_CAP, tol: 1e-14 }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: HPComplex,
    pub points_per_dim: usize,
    /// |I_N − I_{N/2}| / max(|I_N|, mean |f|)
    pub change: f64,
}

// Fixed irrational angle shifts (absolute, so the N-point grid stays a subset
// of the 2N-point grid) keep grid points away from symmetric loci.
const OFFSETS: [f64; 8] = [0.2360679774997897, 0.4142135623730951, 0.7320508075688772, 0.6457513110645906,
    0.3166247903554, 0.1622776601683795, 0.6055512754639893, 0.8740320488976421];

fn angle_point(dom: &TorusDomain, idx: &[usize], n_pts: usize, prec: u32) -> Vec<HPComplex> {
    let r = dom.r.with_prec(prec);
    let mut x = Vec::with_capacity(dom.n);
    let mut prod = HPComplex::one(prec);
    for (j, &k) in idx.iter().enumerate() {
        let frac = Float::with_val(prec, k as u64) / n_pts as u64 + OFFSETS[j % OFFSETS.len()] / 64.0;
        let mut xj = &r * &HPComplex::unit(&frac);
        if let Some(m) = &dom.multipliers {
            xj = xj.scale(&Float::with_val(prec, m[j]));
        }
        prod = &prod * &xj;
        x.push(xj);
    }
    x.push(&r.powi(dom.n as i64) / &prod);
    x
}

fn grid_sum<E: Send>(
    f: &(dyn Fn(&[HPComplex]) -> Result<HPComplex, E> + Sync),
    dom: &TorusDomain,
    n_pts: usize,
    skip_even: bool,
    prec: u32,
) -> Result<(HPComplex, f64), E> {
    let d = dom.dim();
    let total = n_pts.pow(d as u32);
    let parts: Vec<Result<HPComplex, E>> = (0..total)
        .into_par_iter()
        .filter_map(|flat| {
            let mut idx = vec![0usize; d];
            let mut rest = flat;
            for slot in idx.iter_mut() {
                *slot = rest % n_pts;
                rest /= n_pts;
            }
            // points of the N/2 grid have all-even indices and are already summed
            if skip_even && idx.iter().all(|k| k % 2 == 0) {
                return None;
            }
            Some(f(&angle_point(dom, &idx, n_pts, prec)))
        })
        .collect();
    let mut acc = HPComplex::zero(prec);
    let mut abs = 0.0;
    for p in parts {
        let v = p?;
        abs += v.abs_f64();
        acc = &acc + &v;
    }
    Ok((acc, abs))
}

/// Product trapezoidal rule over the n−1 free angles, doubling the points
/// per dimension until two successive values agree to `cfg.tol`.
pub fn torus_integrate<E: Send + Into<QuadratureError>>(
    f: &(dyn Fn(&[HPComplex]) -> Result<HPComplex, E> + Sync),
    dom: &TorusDomain,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadratureError> {
    let prec = dom.r.prec();
    if dom.dim() == 0 {
        let x = vec![dom.r.clone()];
        return Ok(QuadResult { value: f(&x).map_err(Into::into)?, points_per_dim: 1, change: 0.0 });
    }
    let d = dom.dim() as i32;
    let mut n_pts = cfg.start.max(dom.points_per_dim).max(2);
    let (mut sum, mut abs_sum) = grid_sum(f, dom, n_pts, false, prec).map_err(Into::into)?;
    let mut prev = sum.div_i64((n_pts as i64).pow(d as u32));
    let mut last_change = f64::INFINITY;
    loop {
        let next_n = n_pts * 2;
        if next_n > cfg.cap {
            return Err(QuadratureError::Convergence {
                points_per_dim: n_pts,
                value: prev.to_string_digits(20),
                change: last_change,
            });
        }
        let (extra, extra_abs) = grid_sum(f, dom, next_n, true, prec).map_err(Into::into)?;
        sum = &sum + &extra;
        abs_sum += extra_abs;
        let count = (next_n as i64).pow(d as u32);
        let cur = sum.div_i64(count);
        // mean |f| keeps the test meaningful when the integral itself vanishes
        let floor = (abs_sum / count as f64).max(1e-300);
        let change = (&cur - &prev).abs_f64() / cur.abs_f64().max(floor);
        if change < cfg.tol {
            return Ok(QuadResult { value: cur, points_per_dim: next_n, change });
        }
        prev = cur;
        last_change = change;
        n_pts = next_n;
    }
}

/// Fixed-N rule without adaptivity.
pub fn torus_integrate_fixed<E: Send + Into<QuadratureError>>(
    f: &(dyn Fn(&[HPComplex]) -> Result<HPComplex, E> + Sync),
    dom: &TorusDomain,
) -> Result<HPComplex, QuadratureError> {
    let prec = dom.r.prec();
    if dom.dim() == 0 {
        return f(&[dom.r.clone()]).map_err(Into::into);
    }
    let n_pts = dom.points_per_dim;
    let (s, _) = grid_sum(f, dom, n_pts, false, prec).map_err(Into::into)?;
    Ok(s.div_i64((n_pts as i64).pow(dom.dim() as u32)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> HPComplex {
        HPComplex::from_parts(re, im, 128)
    }

    #[test]
    fn simple_integrals() {
        let cfg = QuadConfig { start: 8, cap: 256, tol: 1e-30 };
        let dom = TorusDomain::new(3, c(1.3, 0.2), 8).unwrap();
        let one = |_: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(HPComplex::one(128)) };
        let v = torus_integrate(&one, &dom, &cfg).unwrap().value;
        assert!(v.rel_diff(&HPComplex::one(128), 1e-30) < 1e-35);
        let dom2 = TorusDomain::new(2, c(0.8, 0.0), 8).unwrap();
        let ratio = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(&x[0] / &x[1]) };
        let v = torus_integrate(&ratio, &dom2, &cfg).unwrap().value;
        assert!(v.abs_f64() < 1e-35);
    }

    #[test]
    fn constant_term_of_laurent_monomial() {
        // x1 x2^-1 x3^0 ... zero winding gives its value at the constraint: (x1 x2 x3)/r^3 = 1
        let cfg = QuadConfig { start: 8, cap: 256, tol: 1e-30 };
        let r = c(0.9, 0.4);
        let dom = TorusDomain::new(3, r.clone(), 8).unwrap();
        let f = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(&(&x[0] * &x[1]) * &x[2]) };
        let v = torus_integrate(&f, &dom, &cfg).unwrap().value;
        assert!(v.rel_diff(&r.powi(3), 1e-30) < 1e-35);
        let g = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> { Ok(&(&x[0] * &x[0]) / &x[2]) };
        assert!(torus_integrate(&g, &dom, &cfg).unwrap().value.abs_f64() < 1e-35);
    }

    #[test]
    fn geometric_convergence() {
        // 1/(1 − a x1) on |x1| = 1 averages to 1, with error of order a^N
        let a = c(0.2, 0.05);
        let f = |x: &[HPComplex]| -> Result<HPComplex, QuadratureError> {
            Ok((&HPComplex::one(128) - &(&a * &x[0])).recip())
        };
        let mut errs = Vec::new();
        for n_pts in [8, 16, 32] {
            let dom = TorusDomain::new(2, c(1.0, 0.0), n_pts).unwrap();
            let v = torus_integrate_fixed(&f, &dom).unwrap();
            errs.push(v.rel_diff(&HPComplex::one(128), 1e-30));
        }
        assert!(errs[1] < errs[0] * 1e-3 && errs[2] < errs[1] * 1e-3);
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use super::QuadratureError;
use crate::scalar_ring::HPComplex;

/// Bounded number of redraws before a sampler gives up.
pub const MAX_RETRIES: usize = 1000;

/// Seeded sampler: moduli log-uniform inside declared bounds, angles uniform.
pub struct Sampler {
    rng: ChaCha8Rng,
    prec: u32,
}

impl Sampler {
    pub fn new(seed: u64, prec: u32) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn modulus(&mut self, lo: f64, hi: f64) -> f64 {
        debug_assert!(0.0 < lo && lo <= hi);
        let u: f64 = self.rng.gen();
        (lo.ln() + u * (hi.ln() - lo.ln())).exp()
    }

    pub fn angle(&mut self) -> f64 {
        self.rng.gen::<f64>() * std::f64::consts::TAU
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.gen()
    }

    pub fn polar(&self, r: f64, theta: f64) -> HPComplex {
        HPComplex::from_polar(&Float::with_val(self.prec, r), &Float::with_val(self.prec, theta))
    }

    /// |z| log-uniform in [lo, hi], arg z uniform.
    pub fn point(&mut self, lo: f64, hi: f64) -> HPComplex {
        let r = self.modulus(lo, hi);
        let a = self.angle();
        self.polar(r, a)
    }

    /// n points with x_1⋯x_n = r^n and |x_j/r| in [1/spread, spread] for j < n.
    pub fn constrained(&mut self, n: usize, r: &HPComplex, spread: f64) -> Vec<HPComplex> {
        let mut x = Vec::with_capacity(n);
        let mut prod = HPComplex::one(self.prec);
        for _ in 1..n {
            let v = r * &self.point(1.0 / spread, spread);
            prod = &prod * &v;
            x.push(v);
        }
        x.push(&r.powi(n as i64) / &prod);
        x
    }
}

/// Interval for log-uniform draws shrunk by `margin` on both ends, if nonempty.
pub fn shrink(lo: f64, hi: f64, margin: f64) -> Option<(f64, f64)> {
    let (a, b) = (lo * margin, hi / margin);
    (a < b).then_some((a, b))
}

pub fn retries_exhausted(what: &str) -> QuadratureError {
    QuadratureError::Precondition(format!("no admissible {what} sample after {MAX_RETRIES} draws"))
}

/// Checks lo < |v| < hi, naming the inequality on failure.
pub fn require_between(name: &str, lo: f64, v: &HPComplex, hi: f64) -> Result<(), QuadratureError> {
    let a = v.abs_f64();
    if !(lo < a && a < hi) {
        return Err(QuadratureError::Region(format!("{lo:.6e} < |{name}| = {a:.6e} < {hi:.6e} fails")));
    }
    Ok(())
}

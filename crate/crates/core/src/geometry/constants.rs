use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Dimensional constants. `eta_n` and `p_n` are free parameters; the defaults
/// are `2n` and the sharp isoperimetric constant `1 / (n alpha_n^{1/n})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub n: usize,
    pub eta_n: f64,
    pub p_n: f64,
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let mut a = [1.0, 2.0];
    for k in 2..=n {
        a[k % 2] *= 2.0 * std::f64::consts::PI / k as f64;
    }
    a[n % 2]
}

impl Constants {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        let alpha = unit_ball_volume(n);
        Ok(Self { n, eta_n: 2.0 * n as f64, p_n: 1.0 / (n as f64 * alpha.powf(1.0 / n as f64)) })
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Input(format!("eta_n must be positive, got {eta}")));
        }
        self.eta_n = eta;
        Ok(self)
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Input(format!("p_n must be positive, got {p}")));
        }
        self.p_n = p;
        Ok(self)
    }

    pub fn alpha_n(&self) -> f64 {
        unit_ball_volume(self.n)
    }

    pub fn gamma(&self, eps: f64) -> f64 {
        self.eta_n / eps.powi(self.n as i32 - 1)
    }

    pub fn beta(&self, eps: f64) -> f64 {
        1.0 / (1.0 + self.gamma(eps))
    }

    pub fn rho(&self) -> f64 {
        let n = self.n as f64;
        1.0 / (n.powf((n + 1.0) / 2.0) * 2f64.powi(3 * self.n as i32 - 2))
    }

    /// `rho^2 = 1 / (n^{n+1} 2^{6n-4})`, exact.
    pub fn rho_sq(&self) -> Rational {
        let n = self.n as i64;
        let mut d = rational::pow2(6 * n - 4);
        for _ in 0..=n {
            d *= rational::int(n);
        }
        Rational::new(1.into(), 1.into()) / d
    }

    /// Squared lower bound for `r(Q, x)` over intervals `Q ⊂ B(x, 2r)` with
    /// sides at least `r / (2 sqrt n)`: `rho^2` for `n >= 2`, `(1/16)^2` for
    /// `n = 1`, where `rho(1) = 1/2` is the supremum of all 1D regularities.
    pub fn interval_floor_sq(&self) -> Rational {
        if self.n == 1 {
            rational::ratio(1, 256)
        } else {
            self.rho_sq()
        }
    }

    pub fn c1(&self) -> f64 {
        let n = self.n as f64;
        2f64.powi(self.n as i32) * n.powf((3.0 - n) / 2.0)
    }

    /// `c1^2 = 4^n n^{3-n}`, exact.
    pub fn c1_sq(&self) -> Rational {
        let n = self.n as i64;
        let mut v = rational::pow2(2 * n);
        let nn = rational::int(n);
        if n <= 3 {
            for _ in 0..(3 - n) {
                v *= &nn;
            }
        } else {
            for _ in 0..(n - 3) {
                v /= &nn;
            }
        }
        v
    }

    pub fn c_c(&self) -> f64 {
        let n = self.n as f64;
        self.alpha_n() * 4f64.powi(self.n as i32) * n.powf(n / 2.0)
    }

    pub fn c2(&self) -> f64 {
        self.alpha_n() * self.c_c() * 2f64.powi(self.n as i32)
    }

    pub fn c_krit(&self) -> f64 {
        self.p_n.powi(self.n as i32)
    }

    /// `eps (1 - c alpha_n eps) / (1 + c)` with `c = c_krit`; needs `eps < 1/(c alpha_n)`.
    pub fn eps_prime(&self, eps: f64) -> Result<f64> {
        let c = self.c_krit();
        let bound = 1.0 / (c * self.alpha_n());
        if !(eps > 0.0 && eps < bound) {
            return Err(Error::Precondition(format!("eps = {eps} must lie in (0, {bound})")));
        }
        Ok(eps * (1.0 - c * self.alpha_n() * eps) / (1.0 + c))
    }

    /// Rows of (name, value) for reports.
    pub fn table(&self, eps: &[f64]) -> Vec<(String, f64)> {
        let mut rows = vec![
            ("n".to_string(), self.n as f64),
            ("alpha_n".into(), self.alpha_n()),
            ("eta_n".into(), self.eta_n),
            ("p_n".into(), self.p_n),
            ("rho".into(), self.rho()),
            ("c1".into(), self.c1()),
            ("c_c".into(), self.c_c()),
            ("c2".into(), self.c2()),
            ("c_krit".into(), self.c_krit()),
        ];
        for &e in eps {
            rows.push((format!("gamma({e})"), self.gamma(e)));
            rows.push((format!("beta({e})"), self.beta(e)));
            if let Ok(p) = self.eps_prime(e) {
                rows.push((format!("eps_prime({e})"), p));
            }
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rho_in_two_dimensions() {
        let c = Constants::new(2).unwrap();
        assert!((c.rho() - 1.0 / (2f64.powf(1.5) * 16.0)).abs() < 1e-15);
        assert!((c.rho() - 0.02210).abs() < 1e-5);
        assert!((rational::to_f64(&c.rho_sq()) - c.rho() * c.rho()).abs() < 1e-18);
    }

    #[test]
    fn exact_squares_agree() {
        for n in 1..=5 {
            let c = Constants::new(n).unwrap();
            let r = rational::to_f64(&c.c1_sq()).sqrt();
            assert!((r - c.c1()).abs() < 1e-12 * c.c1());
            assert!(c.rho() <= 1.0 / (2.0 * n as f64));
        }
    }

    #[test]
    fn beta_increases() {
        let c = Constants::new(3).unwrap();
        let mut prev = 0.0;
        for k in 1..100 {
            let b = c.beta(k as f64 / 100.0);
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn eps_prime_range() {
        let c = Constants::new(2).unwrap();
        let e = c.eps_prime(0.1).unwrap();
        assert!(e > 0.0 && e < 0.1);
        assert!(c.eps_prime(10.0).is_err());
    }
}

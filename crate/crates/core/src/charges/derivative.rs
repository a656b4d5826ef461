use serde::{Deserialize, Serialize};

use crate::charges::Charge;
use crate::error::{Error, Result};
use crate::geometry::{DyadicCube, Figure};
use crate::rational::{self, Rational};

/// Per-radius extremes of `F(E) / |E|` and their running envelopes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub radii: Vec<f64>,
    pub family_sizes: Vec<usize>,
    pub inf: Vec<f64>,
    pub sup: Vec<f64>,
    pub lower_envelope: Vec<f64>,
    pub upper_envelope: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// Estimates the lower and upper `eta`-derivatives of `c` at `x`.
///
/// For each radius `δ` the test family is: dyadic cubes of the two finest
/// levels `l`, `l+1` where `l` is the first level whose cubes have diameter
/// below `δ`, within one cube of `x`, plus unions of two cubes adjacent along
/// an axis; kept when `d(E ∪ {x}) < δ` and `r(E, x) > eta`. Estimates only.
pub fn charge_derivative_estimate(c: &Charge, x: &[f64], eta: f64, radii: &[f64]) -> Result<DerivativeEstimate> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::Input("radii must be a nonempty list of positive numbers".into()));
    }
    let n = x.len();
    let xr = rational::point_from_f64(x)?;
    let eta_sq = rational::sq(&rational::from_f64(eta)?);
    let mut out = DerivativeEstimate {
        radii: radii.to_vec(),
        family_sizes: Vec::new(),
        inf: Vec::new(),
        sup: Vec::new(),
        lower_envelope: Vec::new(),
        upper_envelope: Vec::new(),
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };
    for &delta in radii {
        let d2 = rational::sq(&rational::from_f64(delta)?);
        let mut level = ((n as f64).sqrt() / delta).log2().floor() as i32 + 1;
        while rational::int(n as i64) * rational::pow2(-2 * level as i64) >= d2 {
            level += 1;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut count = 0;
        for l in [level, level + 1] {
            for e in family(&xr, l) {
                if e.diameter_sq_with(Some(&xr))? >= d2 {
                    continue;
                }
                let reg = e.regularity(Some(&xr))?;
                if !reg.exceeds_sq(&eta_sq) {
                    continue;
                }
                let q = c.eval_figure(&e)? / rational::to_f64(&reg.volume);
                lo = lo.min(q);
                hi = hi.max(q);
                count += 1;
            }
        }
        out.family_sizes.push(count);
        out.inf.push(lo);
        out.sup.push(hi);
        if count > 0 {
            out.lower = out.lower.max(lo);
            out.upper = out.upper.min(hi);
        }
        out.lower_envelope.push(out.lower);
        out.upper_envelope.push(out.upper);
    }
    if out.family_sizes.last() == Some(&0) {
        return Err(Error::EmptyFamily { radius: *radii.last().unwrap() });
    }
    Ok(out)
}

fn family(x: &[Rational], level: i32) -> Vec<Figure> {
    let n = x.len();
    let scale = rational::pow2(level as i64);
    let base: Vec<i64> = x.iter().map(|v| rational::floor_i64(&(v * &scale))).collect();
    let mut cubes = Vec::new();
    let mut off = vec![-1i64; n];
    loop {
        cubes.push(DyadicCube { level, index: base.iter().zip(&off).map(|(b, o)| b + o).collect() });
        let mut j = 0;
        loop {
            if j == n {
                let mut out: Vec<Figure> = cubes.iter().cloned().map(Figure::from_cube).collect();
                for c in &cubes {
                    for axis in 0..n {
                        let d = c.shifted(axis, 1);
                        if cubes.contains(&d) {
                            out.push(Figure::new(n, vec![c.clone(), d]).expect("same dimension"));
                        }
                    }
                }
                return out;
            }
            off[j] += 1;
            if off[j] <= 1 {
                break;
            }
            off[j] = -1;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charges::{ScalarField, VectorField};

    #[test]
    fn continuous_density_recovers_value() {
        let c = Charge::density(ScalarField::custom("smooth", |x| 1.0 + 0.1 * (x[0] + 2.0 * x[1]).cos()));
        let x = [0.3, 0.2];
        let est = charge_derivative_estimate(&c, &x, 0.05, &[0.1, 2f64.powi(-4), 2f64.powi(-8)]).unwrap();
        let want = 1.0 + 0.1 * 0.7f64.cos();
        assert!((est.lower - want).abs() < 1e-2 && (est.upper - want).abs() < 1e-2);
        assert!((est.inf[2] - want).abs() < 1e-3 && (est.sup[2] - want).abs() < 1e-3);
    }

    #[test]
    fn linear_flux_gives_trace() {
        let c = Charge::flux(VectorField::catalog("linear", 2).unwrap());
        let est = charge_derivative_estimate(&c, &[0.1, 0.4], 0.05, &[0.25, 0.05]).unwrap();
        assert!((est.lower - 2.0).abs() < 1e-10 && (est.upper - 2.0).abs() < 1e-10);
    }

    #[test]
    fn half_space_splits() {
        let c = Charge::density(ScalarField::HalfSpace { axis: 0, offset: 0.5 });
        let est = charge_derivative_estimate(&c, &[0.5, 0.5], 0.05, &[0.2, 0.02]).unwrap();
        assert!(est.lower.abs() < 1e-12);
        assert!((est.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn impossible_regularity_is_empty() {
        let c = Charge::lebesgue();
        assert!(matches!(
            charge_derivative_estimate(&c, &[0.0, 0.0], 0.5, &[0.1]),
            Err(Error::EmptyFamily { .. })
        ));
    }
}

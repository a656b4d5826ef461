use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Face, Figure};
use crate::rational::{self, Rational};

/// One piece of a gauge's declared zero set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroPart {
    Point(#[serde(with = "rational::serde_rational_vec")] Vec<Rational>),
    Hyperplane {
        axis: usize,
        #[serde(with = "rational::serde_rational")]
        offset: Rational,
    },
    FigureBoundary(Figure),
}

impl ZeroPart {
    fn contains(&self, x: &[Rational]) -> bool {
        match self {
            ZeroPart::Point(p) => p.as_slice() == x,
            ZeroPart::Hyperplane { axis, offset } => x.get(*axis) == Some(offset),
            ZeroPart::FigureBoundary(f) => f.boundary_faces().iter().any(|face| face_contains(face, x)),
        }
    }

    fn distance(&self, x: &[f64]) -> f64 {
        match self {
            ZeroPart::Point(p) => p.iter().zip(x).map(|(a, b)| (rational::to_f64(a) - b).powi(2)).sum::<f64>().sqrt(),
            ZeroPart::Hyperplane { axis, offset } => (x[*axis] - rational::to_f64(offset)).abs(),
            ZeroPart::FigureBoundary(f) => {
                f.boundary_faces().iter().map(|face| face_distance(face, x)).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn face_contains(face: &Face, x: &[Rational]) -> bool {
    x.iter().enumerate().all(|(i, v)| {
        if i == face.axis {
            *v == face.plane_coordinate()
        } else {
            face.cube.lower(i) <= *v && *v <= face.cube.upper(i)
        }
    })
}

fn face_distance(face: &Face, x: &[f64]) -> f64 {
    let s = face.cube.side_f64();
    let mut d2 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let (lo, hi) = if i == face.axis {
            let p = rational::to_f64(&face.plane_coordinate());
            (p, p)
        } else {
            let lo = face.cube.lower_f64(i);
            (lo, lo + s)
        };
        let d = if v < lo {
            lo - v
        } else if v > hi {
            v - hi
        } else {
            0.0
        };
        d2 += d * d;
    }
    d2.sqrt()
}

fn one() -> f64 {
    1.0
}

/// Serializable gauge descriptors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GaugeSpec {
    Constant {
        value: f64,
        #[serde(default)]
        zero_set: Vec<ZeroPart>,
    },
    /// `min(scale * dist(x, Z)^power, cap)`.
    DistanceToSet {
        zero_set: Vec<ZeroPart>,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default = "one")]
        power: f64,
        #[serde(default)]
        cap: Option<f64>,
    },
    /// Named formulas; see [`Gauge::catalog_value`].
    CustomCatalog {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
        #[serde(default)]
        zero_set: Vec<ZeroPart>,
    },
}

pub type RadiusFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A nonnegative radius function, forced to zero on its declared zero set.
#[derive(Clone)]
pub enum Gauge {
    Spec(GaugeSpec),
    Custom { name: String, radius: RadiusFn, zero_set: Vec<ZeroPart> },
    /// Pointwise minimum; the zero sets are united.
    Min(Box<Gauge>, Box<Gauge>),
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gauge::Spec(s) => f.debug_tuple("Spec").field(s).finish(),
            Gauge::Custom { name, zero_set, .. } => {
                f.debug_struct("Custom").field("name", name).field("zero_set", zero_set).finish_non_exhaustive()
            }
            Gauge::Min(a, b) => f.debug_tuple("Min").field(a).field(b).finish(),
        }
    }
}

impl Gauge {
    pub fn constant(value: f64) -> Self {
        Gauge::Spec(GaugeSpec::Constant { value, zero_set: Vec::new() })
    }

    pub fn custom(name: &str, zero_set: Vec<ZeroPart>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Gauge::Custom { name: name.into(), radius: Arc::new(f), zero_set }
    }

    pub fn distance_to(zero_set: Vec<ZeroPart>, scale: f64, power: f64, cap: Option<f64>) -> Self {
        Gauge::Spec(GaugeSpec::DistanceToSet { zero_set, scale, power, cap })
    }

    pub fn catalog(name: &str, params: &[(&str, f64)]) -> Result<Self> {
        let spec = GaugeSpec::CustomCatalog {
            name: name.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            zero_set: Vec::new(),
        };
        Gauge::from_spec(spec)
    }

    pub fn from_spec(spec: GaugeSpec) -> Result<Self> {
        match &spec {
            GaugeSpec::Constant { value, .. } if !(*value >= 0.0) => {
                return Err(Error::Input(format!("constant gauge must be nonnegative, got {value}")))
            }
            GaugeSpec::DistanceToSet { zero_set, .. } if zero_set.is_empty() => {
                return Err(Error::Input("distance-to-set gauge needs a nonempty zero_set".into()))
            }
            GaugeSpec::CustomCatalog { name, params, .. } => {
                Self::catalog_value(name, params, &[0.0])?;
            }
            _ => {}
        }
        Ok(Gauge::Spec(spec))
    }

    pub fn min(self, other: Gauge) -> Gauge {
        Gauge::Min(Box::new(self), Box::new(other))
    }

    /// Catalog formulas, all in terms of `t = |x - s|` (`s` from `center`,
    /// default 0, first coordinate in 1D, Euclidean otherwise):
    /// `hk-singular`: `c0` at `s`, else `min(kappa t^4, t/2)`;
    /// `max-floor`: `max(c t^p, c0)`; `power`: `c t^p`.
    pub fn catalog_value(name: &str, params: &BTreeMap<String, f64>, x: &[f64]) -> Result<f64> {
        let get = |k: &str, d: Option<f64>| {
            params.get(k).copied().or(d).ok_or_else(|| Error::Input(format!("gauge `{name}` needs parameter `{k}`")))
        };
        let s = get("center", Some(0.0))?;
        let t = if x.len() == 1 { (x[0] - s).abs() } else { x.iter().map(|v| (v - s).powi(2)).sum::<f64>().sqrt() };
        Ok(match name {
            "hk-singular" => {
                let (c0, kappa) = (get("c0", None)?, get("kappa", None)?);
                if t == 0.0 {
                    c0
                } else {
                    (kappa * t.powi(4)).min(t / 2.0)
                }
            }
            "max-floor" => (get("c", None)? * t.powf(get("p", Some(2.0))?)).max(get("c0", None)?),
            "power" => get("c", None)? * t.powf(get("p", Some(1.0))?),
            other => return Err(Error::Input(format!("unknown gauge catalog entry `{other}`"))),
        })
    }

    pub fn zero_set(&self) -> Vec<ZeroPart> {
        match self {
            Gauge::Spec(GaugeSpec::Constant { zero_set, .. })
            | Gauge::Spec(GaugeSpec::DistanceToSet { zero_set, .. })
            | Gauge::Spec(GaugeSpec::CustomCatalog { zero_set, .. })
            | Gauge::Custom { zero_set, .. } => zero_set.clone(),
            Gauge::Min(a, b) => {
                let mut z = a.zero_set();
                z.extend(b.zero_set());
                z
            }
        }
    }

    /// Exact membership in the declared zero set.
    pub fn on_zero_set(&self, x: &[f64]) -> bool {
        let zs = self.zero_set();
        if zs.is_empty() {
            return false;
        }
        match rational::point_from_f64(x) {
            Ok(xr) => zs.iter().any(|z| z.contains(&xr)),
            Err(_) => false,
        }
    }

    pub fn radius(&self, x: &[f64]) -> f64 {
        if self.on_zero_set(x) {
            return 0.0;
        }
        self.raw(x).max(0.0)
    }

    fn raw(&self, x: &[f64]) -> f64 {
        match self {
            Gauge::Spec(GaugeSpec::Constant { value, .. }) => *value,
            Gauge::Spec(GaugeSpec::DistanceToSet { zero_set, scale, power, cap }) => {
                let d = zero_set.iter().map(|z| z.distance(x)).fold(f64::INFINITY, f64::min);
                let v = scale * d.powf(*power);
                cap.map_or(v, |c| v.min(c))
            }
            Gauge::Spec(GaugeSpec::CustomCatalog { name, params, .. }) => {
                Self::catalog_value(name, params, x).unwrap_or(0.0)
            }
            Gauge::Custom { radius, .. } => radius(x),
            Gauge::Min(a, b) => a.raw(x).min(b.raw(x)),
        }
    }

    /// `x ↦ δ(x)` on the line with catalog parameters resolved once; used by
    /// long streaming walks.
    pub fn line_radius(&self) -> Box<dyn Fn(f64) -> f64 + Send + Sync + '_> {
        if let Gauge::Spec(GaugeSpec::CustomCatalog { name, params, zero_set }) = self {
            if zero_set.is_empty() && name == "hk-singular" {
                if let (Some(&c0), Some(&kappa)) = (params.get("c0"), params.get("kappa")) {
                    let s = params.get("center").copied().unwrap_or(0.0);
                    return Box::new(move |x| {
                        let t = (x - s).abs();
                        let v = if t == 0.0 { c0 } else { (kappa * t.powi(4)).min(t / 2.0) };
                        v.max(0.0)
                    });
                }
            }
        }
        Box::new(move |x| self.radius(&[x]))
    }

    /// `δ(x)` as an exact rational (the float value, exactly).
    pub fn radius_exact(&self, x: &[f64]) -> Rational {
        rational::from_f64(self.radius(x)).unwrap_or_else(|_| rational::int(0))
    }

    pub fn describe(&self) -> serde_json::Value {
        match self {
            Gauge::Spec(s) => serde_json::to_value(s).unwrap_or(serde_json::Value::Null),
            Gauge::Custom { name, .. } => serde_json::json!({ "kind": "custom", "name": name }),
            Gauge::Min(a, b) => serde_json::json!({ "kind": "min", "of": [a.describe(), b.describe()] }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn zero_set_forces_zero() {
        let g = Gauge::Spec(GaugeSpec::Constant { value: 0.3, zero_set: vec![ZeroPart::Point(vec![int(0), int(0)])] });
        assert_eq!(g.radius(&[0.0, 0.0]), 0.0);
        assert_eq!(g.radius(&[0.0, 1e-300]), 0.3);
    }

    #[test]
    fn distance_to_square_boundary() {
        let g = Gauge::distance_to(vec![ZeroPart::FigureBoundary(Figure::unit(2))], 1.0, 1.0, None);
        assert!((g.radius(&[0.5, 0.5]) - 0.5).abs() < 1e-15);
        assert!((g.radius(&[0.5, 1.25]) - 0.25).abs() < 1e-15);
        assert!((g.radius(&[2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.radius(&[1.0, 0.3]), 0.0);
        assert!(g.on_zero_set(&[0.0, 0.0]));
    }

    #[test]
    fn catalog_entries() {
        let g = Gauge::catalog("hk-singular", &[("c0", 0.1), ("kappa", 0.01)]).unwrap();
        assert_eq!(g.radius(&[0.0]), 0.1);
        assert_eq!(g.radius(&[0.5]), 0.01 * 0.0625);
        assert_eq!(g.radius(&[1e-3]), 1e-14);
        let m = Gauge::catalog("max-floor", &[("c", 0.5), ("c0", 0.01)]).unwrap();
        assert_eq!(m.radius(&[0.0]), 0.01);
        assert_eq!(m.radius(&[1.0]), 0.5);
        assert!(Gauge::catalog("hk-singular", &[("c0", 0.1)]).is_err());
        assert!(Gauge::catalog("nope", &[]).is_err());
    }

    #[test]
    fn line_radius_agrees() {
        let g = Gauge::catalog("hk-singular", &[("c0", 0.1), ("kappa", 0.01), ("center", 0.25)]).unwrap();
        let f = g.line_radius();
        for x in [0.25, 0.0, 1.0, -3.5, 0.2500001] {
            assert_eq!(f(x), g.radius(&[x]));
        }
    }

    #[test]
    fn spec_json() {
        let g: GaugeSpec = serde_json::from_str(r#"{"kind":"constant","value":0.25}"#).unwrap();
        assert_eq!(Gauge::from_spec(g).unwrap().radius(&[3.0]), 0.25);
        let d: GaugeSpec = serde_json::from_str(
            r#"{"kind":"distance-to-set","zero_set":[{"hyperplane":{"axis":0,"offset":"1/2"}}],"cap":0.1}"#,
        )
        .unwrap();
        let d = Gauge::from_spec(d).unwrap();
        assert_eq!(d.radius(&[0.5, 7.0]), 0.0);
        assert_eq!(d.radius(&[0.75, 0.0]), 0.1);
        assert_eq!(d.radius(&[0.5625, 0.0]), 0.0625);
    }

    #[test]
    fn min_unites_zero_sets() {
        let a = Gauge::constant(1.0);
        let b = Gauge::distance_to(vec![ZeroPart::Hyperplane { axis: 0, offset: int(0) }], 1.0, 1.0, None);
        let m = a.min(b);
        assert_eq!(m.radius(&[0.0, 3.0]), 0.0);
        assert_eq!(m.radius(&[0.5, 0.0]), 0.5);
        assert_eq!(m.radius(&[5.0, 0.0]), 1.0);
    }
}

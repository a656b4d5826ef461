use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::{Gauge, TaggedItem, TaggedPartition};
use crate::geometry::{BVSet1D, Region};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CousinItem {
    #[serde(with = "rational::serde_rational")]
    pub lo: Rational,
    #[serde(with = "rational::serde_rational")]
    pub hi: Rational,
    #[serde(with = "rational::serde_rational")]
    pub tag: Rational,
}

/// A complete tagged partition of `[a, b]`, items in left-to-right order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CousinPartition {
    pub items: Vec<CousinItem>,
    pub max_depth: u32,
}

impl CousinPartition {
    pub fn total_length(&self) -> Rational {
        self.items.iter().map(|i| &i.hi - &i.lo).fold(rational::int(0), |a, b| a + b)
    }

    pub fn to_tagged(&self) -> Result<TaggedPartition> {
        self.items
            .iter()
            .map(|i| {
                Ok(TaggedItem {
                    set: Region::Line(BVSet1D::interval(i.lo.clone(), i.hi.clone())?),
                    tag: vec![rational::to_f64(&i.tag)],
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(TaggedPartition::new)
    }
}

/// Bisection until each piece is fine at its left endpoint, right endpoint
/// or midpoint (tried in that order): `b_i - a_i < δ(ξ_i)`, exactly.
pub fn cousin_partition_1d(a: &Rational, b: &Rational, delta: &Gauge, depth_budget: u32) -> Result<CousinPartition> {
    if a >= b {
        return Err(Error::Input(format!("empty interval [{a}, {b}]")));
    }
    let two = rational::int(2);
    let mut items = Vec::new();
    let mut max_depth = 0;
    let mut stack = vec![(a.clone(), b.clone(), 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let mid = (&lo + &hi) / &two;
        let len = &hi - &lo;
        let mut accepted = None;
        for t in [&lo, &hi, &mid] {
            let d = delta.radius(&[rational::to_f64(t)]);
            if !(d > 0.0) {
                return Err(Error::Precondition(format!("gauge vanishes at {t}; not a positive gauge")));
            }
            if len < rational::from_f64(d)? {
                accepted = Some(t.clone());
                break;
            }
        }
        match accepted {
            Some(tag) => {
                max_depth = max_depth.max(depth);
                items.push(CousinItem { lo, hi, tag });
            }
            None if depth >= depth_budget => {
                return Err(Error::DepthExhausted { budget: depth_budget, lo: rational::format(&lo), hi: rational::format(&hi) })
            }
            None => {
                stack.push((mid.clone(), hi, depth + 1));
                stack.push((lo, mid, depth + 1));
            }
        }
    }
    Ok(CousinPartition { items, max_depth })
}

/// Floating-point twin of [`cousin_partition_1d`] that streams items instead
/// of storing them. Exact when `a` and `b` are dyadic and depths stay below
/// the mantissa width. Returns the number of items.
pub fn cousin_walk(
    a: f64,
    b: f64,
    delta: &dyn Fn(f64) -> f64,
    depth_budget: u32,
    visit: &mut dyn FnMut(f64, f64, f64),
) -> Result<usize> {
    if !(a < b) {
        return Err(Error::Input(format!("empty interval [{a}, {b}]")));
    }
    let mut count = 0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let len = hi - lo;
        let mut accepted = None;
        for t in [lo, hi, mid] {
            let d = delta(t);
            if !(d > 0.0) {
                return Err(Error::Precondition(format!("gauge vanishes at {t}; not a positive gauge")));
            }
            if len < d {
                accepted = Some(t);
                break;
            }
        }
        match accepted {
            Some(t) => {
                visit(lo, hi, t);
                count += 1;
            }
            None if depth >= depth_budget => {
                return Err(Error::DepthExhausted { budget: depth_budget, lo: lo.to_string(), hi: hi.to_string() })
            }
            None => {
                stack.push((mid, hi, depth + 1));
                stack.push((lo, mid, depth + 1));
            }
        }
    }
    Ok(count)
}

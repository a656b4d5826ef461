use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Regularity;
use crate::rational::{self, Rational};

/// Finite union of closed, pairwise separated intervals on the line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BVSet1D {
    #[serde(with = "rational::serde_rational_pairs")]
    intervals: Vec<(Rational, Rational)>,
}

#[derive(Deserialize)]
struct RawLine {
    #[serde(with = "rational::serde_rational_pairs")]
    intervals: Vec<(Rational, Rational)>,
}

impl<'de> Deserialize<'de> for BVSet1D {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawLine::deserialize(d)?;
        BVSet1D::new(raw.intervals).map_err(serde::de::Error::custom)
    }
}

impl BVSet1D {
    /// Sorts, merges overlapping or touching pieces, and rejects degenerate ones.
    pub fn new(mut intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        if let Some((a, b)) = intervals.iter().find(|(a, b)| a >= b) {
            return Err(Error::Input(format!("degenerate interval [{a}, {b}]")));
        }
        intervals.sort();
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match out.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        Ok(Self { intervals: out })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn volume(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).fold(Rational::zero(), |s, t| s + t)
    }

    /// `‖E‖ = 2k`.
    pub fn perimeter(&self) -> Rational {
        rational::int(2 * self.intervals.len() as i64)
    }

    pub fn diameter_sq_with(&self, tag: Option<&Rational>) -> Result<Rational> {
        let (lo, hi) = match (self.intervals.first(), self.intervals.last(), tag) {
            (Some(f), Some(l), Some(x)) => {
                (if *x < f.0 { x.clone() } else { f.0.clone() }, if *x > l.1 { x.clone() } else { l.1.clone() })
            }
            (Some(f), Some(l), None) => (f.0.clone(), l.1.clone()),
            (None, _, Some(_)) => return Ok(Rational::zero()),
            _ => return Err(Error::EmptySet("diameter")),
        };
        Ok(rational::sq(&(hi - lo)))
    }

    pub fn regularity(&self, tag: Option<&Rational>) -> Result<Regularity> {
        if self.is_empty() {
            return Ok(Regularity::zero());
        }
        Ok(Regularity { volume: self.volume(), perimeter: self.perimeter(), diameter_sq: self.diameter_sq_with(tag)? })
    }

    pub fn intersection(&self, other: &BVSet1D) -> BVSet1D {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a, b) = &self.intervals[i];
            let (c, d) = &other.intervals[j];
            let lo = if a > c { a } else { c };
            let hi = if b < d { b } else { d };
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        BVSet1D::new(out).expect("intersection pieces are nondegenerate")
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|(a, b)| a <= x && x <= b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn touching_intervals_merge() {
        let e = BVSet1D::new(vec![(int(1), int(2)), (int(0), int(1)), (int(3), int(4))]).unwrap();
        assert_eq!(e.intervals().len(), 2);
        assert_eq!(e.perimeter(), int(4));
        assert_eq!(e.volume(), int(3));
    }

    #[test]
    fn two_components_perimeter() {
        let e = BVSet1D::new(vec![(int(0), int(1)), (int(2), int(3))]).unwrap();
        assert_eq!(e.perimeter(), int(4));
    }

    #[test]
    fn tag_extends_diameter() {
        let e = BVSet1D::interval(int(0), int(1)).unwrap();
        assert_eq!(e.diameter_sq_with(Some(&int(2))).unwrap(), int(4));
        assert_eq!(e.diameter_sq_with(Some(&ratio(1, 2))).unwrap(), int(1));
    }

    #[test]
    fn intersection_of_unions() {
        let a = BVSet1D::new(vec![(int(0), int(2)), (int(3), int(5))]).unwrap();
        let b = BVSet1D::new(vec![(int(1), int(4))]).unwrap();
        let c = a.intersection(&b);
        assert_eq!(c.intervals(), &[(int(1), int(2)), (int(3), int(4))]);
    }

    #[test]
    fn json_round_trip() {
        let e: BVSet1D = serde_json::from_str(r#"{"intervals": [["0", "1/2"], ["2", "3"]]}"#).unwrap();
        assert_eq!(e.volume(), ratio(3, 2));
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"intervals":[["0/1","1/2"],["2/1","3/1"]]}"#);
    }
}

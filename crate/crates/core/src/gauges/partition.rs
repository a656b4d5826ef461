use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::{FinenessReport, Gauge};
use crate::geometry::{is_eps_isoperimetric_sampled, IsoSearch, Region};
use crate::rational::{self, Rational};

/// A set paired with a tag; the tag need not lie in the set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaggedItem {
    pub set: Region,
    pub tag: Vec<f64>,
}

impl TaggedItem {
    pub fn tag_exact(&self) -> Result<Vec<Rational>> {
        rational::point_from_f64(&self.tag)
    }

    pub fn diameter_sq_with_tag(&self) -> Result<Rational> {
        let x = self.tag_exact()?;
        match &self.set {
            Region::Figure(f) => f.diameter_sq_with(Some(&x)),
            Region::Line(l) => l.diameter_sq_with(Some(&x[0])),
            Region::Box(b) => Ok(b.diameter_sq_with(&x)),
        }
    }

    pub fn regularity(&self) -> Result<f64> {
        Ok(self.set.regularity(Some(&self.tag_exact()?))?.value())
    }

    /// Tag in the closure of the set (for figures and boxes this is the
    /// essential closure).
    pub fn tag_in_closure(&self) -> Result<bool> {
        let x = self.tag_exact()?;
        Ok(match &self.set {
            Region::Figure(f) => f.contains_point(&x),
            Region::Line(l) => l.contains_point(&x[0]),
            Region::Box(b) => b.contains_point(&x),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TaggedPartition {
    pub items: Vec<TaggedItem>,
}

impl TaggedPartition {
    pub fn new(items: Vec<TaggedItem>) -> Self {
        Self { items }
    }

    /// `d(A_i ∪ {x_i}) < δ(x_i)` for every item, exactly.
    pub fn is_delta_fine(&self, delta: &Gauge) -> Result<FinenessReport> {
        for (i, it) in self.items.iter().enumerate() {
            let d = delta.radius_exact(&it.tag);
            if it.diameter_sq_with_tag()? >= rational::sq(&d) {
                return Ok(FinenessReport::violation(i, format!("diameter not below δ = {}", rational::to_f64(&d))));
            }
        }
        Ok(FinenessReport::ok())
    }

    pub fn regularities(&self) -> Result<Vec<f64>> {
        self.items.iter().map(TaggedItem::regularity).collect()
    }

    /// Strong `eps`-regularity per item: `r(A_i, x_i) > eps`, tag in the
    /// closure, and sampled `eps`-isoperimetry (figures only; other sets fail).
    pub fn strongly_regular(&self, eps: f64, iso: &IsoSearch) -> Result<Vec<bool>> {
        self.items
            .iter()
            .map(|it| {
                let x = it.tag_exact()?;
                if !it.set.regularity(Some(&x))?.exceeds(eps)? || !it.tag_in_closure()? {
                    return Ok(false);
                }
                match &it.set {
                    Region::Figure(f) => Ok(is_eps_isoperimetric_sampled(f, eps, iso)?.passed()),
                    _ => Ok(false),
                }
            })
            .collect()
    }

    /// First pair of items whose sets overlap in positive measure.
    pub fn overlapping_pair(&self) -> Result<Option<(usize, usize)>> {
        for i in 0..self.items.len() {
            for j in i + 1..self.items.len() {
                let overlap = match (&self.items[i].set, &self.items[j].set) {
                    (Region::Figure(a), Region::Figure(b)) => !a.intersection(b)?.is_empty(),
                    (Region::Line(a), Region::Line(b)) => !a.intersection(b).is_empty(),
                    (Region::Box(a), Region::Box(b)) => a.intersect(b).is_some(),
                    _ => return Err(Error::Input("mixed set kinds in one partition".into())),
                };
                if overlap {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }
}

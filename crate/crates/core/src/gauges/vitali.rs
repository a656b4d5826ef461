use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::Ball;
use crate::rational;

/// Selected indices (in selection order) and, for every input ball `B`, the
/// index of a selected ball `S` with `B ⊂ 5S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VitaliSelection {
    pub selected: Vec<usize>,
    pub certificate: Vec<usize>,
}

/// Greedy largest-first selection of pairwise disjoint closed balls; equal
/// radii are taken in input order.
pub fn vitali_disjoint_subfamily(balls: &[Ball]) -> Result<VitaliSelection> {
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&i, &j| balls[j].radius.total_cmp(&balls[i].radius).then(i.cmp(&j)));
    let mut selected: Vec<usize> = Vec::new();
    for &i in &order {
        if selected.iter().all(|&s| balls[s].separated_from(&balls[i])) {
            selected.push(i);
        }
    }
    let mut certificate = Vec::with_capacity(balls.len());
    for (i, b) in balls.iter().enumerate() {
        let s = std::iter::once(i)
            .filter(|i| selected.contains(i))
            .chain(selected.iter().copied())
            .find(|&s| inside_dilation(b, &balls[s], 5))
            .ok_or_else(|| Error::Precondition(format!("ball {i} is not covered by any dilated selected ball")))?;
        certificate.push(s);
    }
    Ok(VitaliSelection { selected, certificate })
}

/// `B ⊂ k S` for closed balls, exactly.
pub fn inside_dilation(b: &Ball, s: &Ball, k: i64) -> bool {
    let slack = s.radius_exact() * rational::int(k) - b.radius_exact();
    if slack < rational::int(0) {
        return false;
    }
    rational::dist_sq(&b.center_exact(), &s.center_exact()) <= rational::sq(&slack)
}

/// Checks disjointness of the selection and every certificate entry.
pub fn verify_vitali(balls: &[Ball], sel: &VitaliSelection) -> bool {
    let disjoint = sel
        .selected
        .iter()
        .enumerate()
        .all(|(k, &i)| sel.selected[k + 1..].iter().all(|&j| balls[i].separated_from(&balls[j])));
    disjoint
        && sel.certificate.len() == balls.len()
        && sel.certificate.iter().enumerate().all(|(i, &s)| sel.selected.contains(&s) && inside_dilation(&balls[i], &balls[s], 5))
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{is_eps_isoperimetric_sampled_interval, Constants, Interval, IsoSearch, Regularity};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedInterval {
    pub interval: Interval,
    pub sign: i8,
    pub regularity: Regularity,
}

/// Signed intervals whose indicators sum to the indicator of `q`; every piece
/// contains `x` and lies in `B(x, 2r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kvadry {
    pub q: Interval,
    #[serde(with = "rational::serde_rational_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "rational::serde_rational")]
    pub r: Rational,
    /// Number of axes with `x_l` outside `[a_l, b_l]`.
    pub m: usize,
    pub pieces: Vec<SignedInterval>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KvadryCheck {
    pub telescopes: bool,
    pub volumes_balance: bool,
    pub contain_tag: bool,
    pub inside_ball: bool,
    pub rho_regular: bool,
    /// `None` when the isoperimetry search was skipped.
    pub isoperimetric: Option<bool>,
    pub violations: Vec<String>,
}

impl KvadryCheck {
    pub fn all_ok(&self) -> bool {
        self.telescopes
            && self.volumes_balance
            && self.contain_tag
            && self.inside_ball
            && self.rho_regular
            && self.isoperimetric != Some(false)
    }
}

pub fn kvadry_decomposition(q: &Interval, x: &[Rational], r: &Rational) -> Result<Kvadry> {
    let n = q.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if *r <= rational::int(0) {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    if !q.inside_open_ball(x, &(r * rational::int(2))) {
        return Err(Error::Precondition("Q is not inside B(x, 2r)".into()));
    }
    // min side >= r / (2 sqrt n)  <=>  4 n s^2 >= r^2
    if rational::int(4 * n as i64) * rational::sq(&q.min_side()) < rational::sq(r) {
        return Err(Error::Precondition("min side of Q is below r / (2 sqrt n)".into()));
    }
    let m = (0..n).filter(|&l| outside(q, x, l)).count();
    let mut pieces = Vec::new();
    expand(q.clone(), 1, x, &mut pieces);
    let pieces = pieces
        .into_iter()
        .map(|(interval, sign)| SignedInterval { regularity: interval.regularity(Some(x)), interval, sign })
        .collect();
    Ok(Kvadry { q: q.clone(), x: x.to_vec(), r: r.clone(), m, pieces })
}

fn outside(q: &Interval, x: &[Rational], l: usize) -> bool {
    let (a, b) = &q.bounds()[l];
    x[l] < *a || x[l] > *b
}

fn expand(q: Interval, sign: i8, x: &[Rational], out: &mut Vec<(Interval, i8)>) {
    let Some(l) = (0..q.dim()).find(|&l| outside(&q, x, l)) else {
        out.push((q, sign));
        return;
    };
    let (a, b) = q.bounds()[l].clone();
    let xl = &x[l];
    let (full, cut) = if *xl < a {
        let lo = xl - (&b - xl);
        ((lo.clone(), b), (lo, a))
    } else {
        let hi = xl + (xl - &a);
        ((a, hi.clone()), (b, hi))
    };
    expand(q.with_axis(l, full.0, full.1), sign, x, out);
    expand(q.with_axis(l, cut.0, cut.1), -sign, x, out);
}

impl Kvadry {
    pub fn signed_volume(&self) -> Rational {
        self.pieces
            .iter()
            .map(|p| p.interval.volume() * rational::int(p.sign as i64))
            .fold(rational::int(0), |a, b| a + b)
    }

    /// Checks the indicator identity cell by cell on the common arrangement,
    /// tag containment, ball containment and `r(P, x)` above the interval
    /// floor of [`Constants::interval_floor_sq`]; optionally
    /// runs the sampled `beta(rho)`-isoperimetry search on each piece.
    pub fn verify(&self, consts: &Constants, iso: Option<&IsoSearch>) -> Result<KvadryCheck> {
        let n = self.q.dim();
        let mut chk = KvadryCheck { telescopes: true, contain_tag: true, inside_ball: true, rho_regular: true, ..Default::default() };

        chk.volumes_balance = self.signed_volume() == self.q.volume();
        if !chk.volumes_balance {
            chk.violations.push("signed volumes do not sum to |Q|".into());
        }

        let cuts: Vec<Vec<Rational>> = (0..n)
            .map(|l| {
                let mut v: Vec<Rational> = std::iter::once(&self.q)
                    .chain(self.pieces.iter().map(|p| &p.interval))
                    .flat_map(|i| [i.bounds()[l].0.clone(), i.bounds()[l].1.clone()])
                    .collect();
                v.sort();
                v.dedup();
                v
            })
            .collect();
        let mut idx = vec![0usize; n];
        'cells: loop {
            let cell: Vec<(Rational, Rational)> =
                (0..n).map(|l| (cuts[l][idx[l]].clone(), cuts[l][idx[l] + 1].clone())).collect();
            let covers = |i: &Interval| i.bounds().iter().zip(&cell).all(|((a, b), (lo, hi))| a <= lo && hi <= b);
            let want = covers(&self.q) as i64;
            let got: i64 = self.pieces.iter().filter(|p| covers(&p.interval)).map(|p| p.sign as i64).sum();
            if got != want {
                chk.telescopes = false;
                let at: Vec<String> = cell.iter().map(|(a, b)| format!("[{a}, {b}]")).collect();
                chk.violations.push(format!("cell {} has multiplicity {got}, expected {want}", at.join("x")));
                break;
            }
            for l in 0..n {
                idx[l] += 1;
                if idx[l] + 1 < cuts[l].len() {
                    continue 'cells;
                }
                idx[l] = 0;
            }
            break;
        }

        let floor_sq = consts.interval_floor_sq();
        let two_r = &self.r * rational::int(2);
        for (j, p) in self.pieces.iter().enumerate() {
            if !p.interval.contains_point(&self.x) {
                chk.contain_tag = false;
                chk.violations.push(format!("piece {j} misses the tag"));
            }
            if !p.interval.inside_open_ball(&self.x, &two_r) {
                chk.inside_ball = false;
                chk.violations.push(format!("piece {j} leaves B(x, 2r)"));
            }
            if !p.regularity.exceeds_sq(&floor_sq) {
                chk.rho_regular = false;
                chk.violations.push(format!("piece {j} has r(P, x) = {} at or below the floor", p.regularity.value()));
            }
        }

        if let Some(cfg) = iso {
            let beta = consts.beta(consts.rho());
            let mut ok = true;
            for (j, p) in self.pieces.iter().enumerate() {
                if !is_eps_isoperimetric_sampled_interval(&p.interval, beta, cfg)?.passed() {
                    ok = false;
                    chk.violations.push(format!("piece {j} fails sampled isoperimetry at beta(rho) = {beta}"));
                }
            }
            chk.isoperimetric = Some(ok);
        }
        Ok(chk)
    }
}

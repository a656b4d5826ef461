use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauges::Ball;
use crate::geometry::{Constants, DyadicCube, Figure, DEFAULT_CUBE_BUDGET};
use crate::rational::{self, Rational};

/// A cube of the partition together with the ball it is charged to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignedCube {
    pub cube: DyadicCube,
    pub ball: usize,
    pub side: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubordinatePartition {
    pub root: DyadicCube,
    pub balls: Vec<Ball>,
    pub cubes: Vec<AssignedCube>,
}

/// Outcome of re-checking every postcondition of a partition.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub tiling: bool,
    pub membership: bool,
    pub least_index: bool,
    pub side_bound: bool,
    pub count_bound: bool,
    pub perimeter_bound: bool,
    pub max_count: usize,
    pub violations: Vec<String>,
}

impl PartitionCheck {
    pub fn all_ok(&self) -> bool {
        self.tiling && self.membership && self.least_index && self.side_bound && self.count_bound && self.perimeter_bound
    }
}

struct ExactBall {
    center: Vec<Rational>,
    r2: Rational,
}

impl ExactBall {
    fn new(b: &Ball) -> Self {
        Self { center: b.center_exact(), r2: rational::sq(&b.radius_exact()) }
    }

    /// `Q ∩ B(x, R) ≠ ∅` for the open ball.
    fn meets(&self, q: &DyadicCube) -> bool {
        q.nearest_dist_sq(&self.center) < self.r2
    }

    /// `Q ⊂ B(x, 2R)` for the open ball.
    fn inside_double(&self, q: &DyadicCube) -> bool {
        q.farthest_dist_sq(&self.center) < &self.r2 * rational::int(4)
    }

    fn eligible(&self, q: &DyadicCube) -> bool {
        self.meets(q) && self.inside_double(q) && !self.inside_double(&q.mother())
    }
}

/// Partition of `root` into maximal dyadic subcubes `Q` such that some ball
/// has `Q ∩ B(x_i, R_i) ≠ ∅`, `Q ⊂ B(x_i, 2R_i)` and `Q' ⊄ B(x_i, 2R_i)` for
/// the mother `Q'`; each cube goes to the least such `i`.
pub fn subordinate_partition(root: &DyadicCube, balls: &[Ball]) -> Result<SubordinatePartition> {
    if balls.is_empty() {
        return Err(Error::Input("at least one ball is required".into()));
    }
    let n = root.dim();
    if let Some(b) = balls.iter().find(|b| b.center.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: b.center.len() });
    }
    let exact: Vec<ExactBall> = balls.iter().map(ExactBall::new).collect();
    if let Some(i) = exact.iter().position(|b| b.inside_double(root)) {
        return Err(Error::CubeInsideDoubledBall { ball: i });
    }
    // No cube with n a^2 <= min R^2 / 4 can ever qualify.
    let min_r2 = exact.iter().map(|b| b.r2.clone()).min().expect("nonempty");
    let quarter = rational::ratio(1, 4);
    let mut out = Vec::new();
    let mut visited = 0usize;
    let mut stack = vec![root.clone()];
    while let Some(q) = stack.pop() {
        visited += 1;
        if visited > DEFAULT_CUBE_BUDGET {
            return Err(Error::Budget {
                what: "subordinate partition".into(),
                needed: visited as u128,
                budget: DEFAULT_CUBE_BUDGET as u128,
            });
        }
        if q != *root {
            if let Some(i) = exact.iter().position(|b| b.eligible(&q)) {
                out.push(AssignedCube { side: q.side_f64(), cube: q, ball: i });
                continue;
            }
        }
        let a2 = rational::sq(&q.side());
        if rational::int(n as i64) * a2 <= &min_r2 * &quarter {
            return Err(Error::Uncovered { point: q.center().iter().map(rational::format).collect() });
        }
        let mut kids = q.children();
        kids.reverse();
        stack.extend(kids);
    }
    out.sort_by(|a, b| a.cube.cmp(&b.cube));
    Ok(SubordinatePartition { root: root.clone(), balls: balls.to_vec(), cubes: out })
}

impl SubordinatePartition {
    /// Cubes assigned to each ball.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.balls.len()];
        for q in &self.cubes {
            c[q.ball] += 1;
        }
        c
    }

    /// Re-derives every postcondition with exact arithmetic (the count bound
    /// compares against the floating value of `c_c`).
    pub fn verify(&self, consts: &Constants) -> Result<PartitionCheck> {
        let n = self.root.dim();
        let exact: Vec<ExactBall> = self.balls.iter().map(ExactBall::new).collect();
        let mut chk = PartitionCheck {
            tiling: true,
            membership: true,
            least_index: true,
            side_bound: true,
            perimeter_bound: true,
            ..Default::default()
        };

        let cubes: Vec<DyadicCube> = self.cubes.iter().map(|c| c.cube.clone()).collect();
        let fig = Figure::new(n, cubes.clone())?;
        let total = cubes.iter().map(DyadicCube::volume).fold(rational::int(0), |a, b| a + b);
        if fig.len() != cubes.len() || total != self.root.volume() || !cubes.iter().all(|c| self.root.contains(c)) {
            chk.tiling = false;
            chk.violations.push("cubes do not tile the root exactly".into());
        }

        let c1_sq = consts.c1_sq();
        let four_pow = rational::pow2(2 * (n as i64 - 1));
        for (j, q) in self.cubes.iter().enumerate() {
            let b = &exact[q.ball];
            if !b.eligible(&q.cube) {
                chk.membership = false;
                chk.violations.push(format!("cube {j} fails a membership condition for ball {}", q.ball));
            }
            if exact[..q.ball].iter().any(|e| e.eligible(&q.cube)) {
                chk.least_index = false;
                chk.violations.push(format!("cube {j} has an eligible ball below {}", q.ball));
            }
            let a2 = rational::sq(&q.cube.side());
            if b.r2 >= rational::int(4 * n as i64) * &a2 {
                chk.side_bound = false;
                chk.violations.push(format!("cube {j}: R/2 < sqrt(n) a fails"));
            }
            // (2n a^{n-1})^2 <= c1^2 4^{n-1} R^{2(n-1)}
            let mut lhs = rational::int(4 * (n * n) as i64);
            let mut rhs = &c1_sq * &four_pow;
            for _ in 0..n - 1 {
                lhs *= &a2;
                rhs *= &b.r2;
            }
            if lhs > rhs {
                chk.perimeter_bound = false;
                chk.violations.push(format!("cube {j}: perimeter bound fails"));
            }
        }
        let counts = self.counts();
        chk.max_count = counts.iter().copied().max().unwrap_or(0);
        chk.count_bound = counts.iter().all(|&k| (k as f64) <= consts.c_c());
        if !chk.count_bound {
            chk.violations.push(format!("a ball holds {} cubes, above c_c = {}", chk.max_count, consts.c_c()));
        }
        Ok(chk)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(c: &[f64], r: f64) -> Ball {
        Ball::new(c.to_vec(), r).unwrap()
    }

    #[test]
    fn four_quarter_balls() {
        let balls = [
            ball(&[0.25, 0.25], 0.36),
            ball(&[0.75, 0.25], 0.36),
            ball(&[0.25, 0.75], 0.36),
            ball(&[0.75, 0.75], 0.36),
        ];
        let p = subordinate_partition(&DyadicCube::unit(2), &balls).unwrap();
        let got: Vec<(Vec<i64>, usize)> = p.cubes.iter().map(|c| (c.cube.index.clone(), c.ball)).collect();
        assert_eq!(got, vec![(vec![0, 0], 0), (vec![0, 1], 2), (vec![1, 0], 1), (vec![1, 1], 3)]);
        assert!(p.cubes.iter().all(|c| c.cube.level == 1));
        let chk = p.verify(&Constants::new(2).unwrap()).unwrap();
        assert!(chk.all_ok(), "{:?}", chk);
    }

    #[test]
    fn halves_in_one_dimension() {
        let balls = [ball(&[0.25], 0.3), ball(&[0.75], 0.3)];
        let p = subordinate_partition(&DyadicCube::unit(1), &balls).unwrap();
        assert_eq!(p.cubes.len(), 2);
        assert_eq!(p.cubes[0].cube, DyadicCube { level: 1, index: vec![0] });
        assert_eq!(p.cubes[1].ball, 1);
    }

    #[test]
    fn doubled_ball_swallowing_root() {
        let balls = [ball(&[0.5, 0.5], 0.8)];
        assert!(matches!(
            subordinate_partition(&DyadicCube::unit(2), &balls),
            Err(Error::CubeInsideDoubledBall { ball: 0 })
        ));
    }

    #[test]
    fn gap_in_cover() {
        let balls = [ball(&[0.1, 0.1], 0.2)];
        assert!(matches!(subordinate_partition(&DyadicCube::unit(2), &balls), Err(Error::Uncovered { .. })));
    }
}

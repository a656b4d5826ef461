use crate::error::{Error, Result};
use crate::geometry::{DyadicCube, Figure, DEFAULT_CUBE_BUDGET};
use crate::rational::{self, Rational};

/// All level-`level` dyadic cubes inside the closed ball `B(center, radius)`,
/// with complete sibling groups merged.
pub fn dyadic_approximation(center: &[Rational], radius: &Rational, level: i32) -> Result<Figure> {
    let n = center.len();
    if n == 0 {
        return Err(Error::Input("ball center needs at least one coordinate".into()));
    }
    if *radius <= Rational::from_integer(0.into()) {
        return Err(Error::Input(format!("radius must be positive, got {radius}")));
    }
    if level < super::cube::MIN_LEVEL {
        return Err(Error::Input(format!("level {level} below {}", super::cube::MIN_LEVEL)));
    }
    let scale = rational::pow2(level as i64);
    let ranges: Vec<(i64, i64)> = center
        .iter()
        .map(|c| (rational::floor_i64(&((c - radius) * &scale)), rational::ceil_i64(&((c + radius) * &scale))))
        .collect();
    let needed: u128 = ranges.iter().map(|(a, b)| (b - a).max(0) as u128).product();
    if needed > DEFAULT_CUBE_BUDGET as u128 {
        return Err(Error::Budget { what: "ball approximation".into(), needed, budget: DEFAULT_CUBE_BUDGET as u128 });
    }
    // Farthest squared distance along one axis depends only on that axis' index.
    let side = rational::pow2(-(level as i64));
    let far: Vec<Vec<Rational>> = ranges
        .iter()
        .zip(center)
        .map(|(&(a, b), c)| {
            (a..b)
                .map(|k| {
                    let lo = rational::int(k) * &side - c;
                    let hi = &lo + &side;
                    let (lo, hi) = (rational::sq(&lo), rational::sq(&hi));
                    if lo > hi {
                        lo
                    } else {
                        hi
                    }
                })
                .collect()
        })
        .collect();
    let r2 = rational::sq(radius);
    let mut cubes = Vec::new();
    let mut idx = vec![0usize; n];
    let lens: Vec<usize> = far.iter().map(Vec::len).collect();
    if lens.contains(&0) {
        return Ok(Figure::empty(n));
    }
    'outer: loop {
        let mut s = Rational::from_integer(0.into());
        let mut inside = true;
        for a in 0..n {
            s += &far[a][idx[a]];
            if s > r2 {
                inside = false;
                break;
            }
        }
        if inside {
            cubes.push(DyadicCube { level, index: (0..n).map(|a| ranges[a].0 + idx[a] as i64).collect() });
        }
        for a in 0..n {
            idx[a] += 1;
            if idx[a] < lens[a] {
                continue 'outer;
            }
            idx[a] = 0;
        }
        break;
    }
    Ok(Figure::new(n, cubes)?.coarsened())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn unit_disk_level_zero_is_empty() {
        let f = dyadic_approximation(&[int(0), int(0)], &int(1), 0).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn level_one_gives_four_squares() {
        let f = dyadic_approximation(&[int(0), int(0)], &int(1), 1).unwrap();
        assert_eq!(f.volume(), int(1));
    }

    fn disk_cells(level: u32) -> i64 {
        let s = 1i64 << level;
        let far = |k: i64| (k * k).max((k + 1) * (k + 1));
        (-s..s).map(|i| (-s..s).filter(|&j| far(i) + far(j) <= s * s).count() as i64).sum()
    }

    #[test]
    fn unit_disk_area() {
        let six = dyadic_approximation(&[int(0), int(0)], &int(1), 6).unwrap();
        assert_eq!(six.volume(), ratio(disk_cells(6), 1 << 12));
        assert_eq!(six.volume(), ratio(12596, 4096));
        let seven = dyadic_approximation(&[int(0), int(0)], &int(1), 7).unwrap();
        assert_eq!(seven.volume(), ratio(disk_cells(7), 1 << 14));
        assert!((rational::to_f64(&seven.volume()) - std::f64::consts::PI).abs() < 0.05);
    }

    #[test]
    fn one_dimensional_ball() {
        let f = dyadic_approximation(&[ratio(1, 3)], &ratio(1, 2), 3).unwrap();
        // [-1/6, 5/6] contains the level-3 cells from -1/8 to 6/8.
        assert_eq!(f.volume(), ratio(7, 8));
    }
}

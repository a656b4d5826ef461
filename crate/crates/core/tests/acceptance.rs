//! Acceptance run. Prints one line per criterion and exits nonzero when a
//! criterion fails outright. A criterion whose statement cannot be met as
//! written is reported as `FAIL (unattainable)` with the measured numbers;
//! the run then asserts that every other part of it holds.

mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use gaugekit::charges::{
    charge_axiom_falsifier, Charge, Flat, FalsifierVerdict, Function1D, Monomial, PolyField, Polynomial, ScalarField,
    VectorField,
};
use gaugekit::gauges::Ball;
use gaugekit::geometry::{Constants, DyadicCube, Figure, Interval, IsoSearch};
use gaugekit::harness::{
    check_packing_integral, gauss_green_verify, hk_check, hk_integrate_adaptive, mc_alpha_check,
    mc_monotone_comparison, restriction_consistency, revalidate_witness, seminorm_lower_bound, singular_gauge,
    BallTerm, ControlFunction, DivSource, Domain, HkClaim, IntegralClaim, McClaim, McConfig, Notion,
    PackingCheckConfig, PackingWitness, Seminorm, SeminormQuery, Verdict,
};
use gaugekit::partition::{kvadry_decomposition, subordinate_partition};
use gaugekit::rational::{self, int, ratio, Rational};
use gaugekit::gauges::Gauge;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

const GG_FIGURES: usize = 50;
const GG_FIELDS: usize = 5;
const GG_MAX_CUBES: usize = 64;
const GG_ORDER: usize = 7;
const GG_TOL: f64 = 1e-8;
const GG_SECONDS: f64 = 30.0;

const SIN1_TOL: f64 = 1e-6;
const HK_EPS: [f64; 3] = [0.1, 0.01, 0.001];

const LEMMA_INSTANCES: usize = 1000;

const COVERS: usize = 200;

const DENSITY_SEQUENCES: usize = 10_000;
const TUBE_FRACTION: f64 = 0.9;

const REFUTE_EPS: f64 = 0.01;

const SUBFIGURES: usize = 20;

enum Status {
    Pass,
    Fail,
    Unattainable,
}

struct Line {
    status: Status,
    detail: String,
}

type Criterion = (&'static str, fn() -> Line);

fn pass_if(ok: bool, detail: String) -> Line {
    Line { status: if ok { Status::Pass } else { Status::Fail }, detail }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("gauss-green identity", gauss_green_identity),
        ("hk fundamental theorem", hk_fundamental_theorem),
        ("lemma suite", lemma_suite),
        ("subordinate partition", subordinate_partitions),
        ("charge falsifier separation", charge_separation),
        ("harness inclusions", harness_inclusions),
        ("restriction round trip", restriction_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let line = run();
        let tag = match line.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::Unattainable => "FAIL (unattainable as stated)",
        };
        println!("criterion {} [{}] {}: {} ({:.1}s)", i + 1, tag, name, line.detail, t.elapsed().as_secs_f64());
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

// ---------------------------------------------------------------- 1

fn random_poly_field(rng: &mut ChaCha8Rng, n: usize) -> Vec<Poly> {
    (0..n)
        .map(|_| {
            (0..rng.random_range(1..=4))
                .map(|_| {
                    let mut powers = vec![0u32; n];
                    for _ in 0..rng.random_range(0..=3) {
                        powers[rng.random_range(0..n)] += 1;
                    }
                    (ratio(rng.random_range(-6..=6), rng.random_range(1..=4)), powers)
                })
                .collect()
        })
        .collect()
}

fn to_field(n: usize, comps: &[Poly]) -> VectorField {
    let polys = comps
        .iter()
        .map(|p| {
            let terms = p.iter().map(|(c, e)| Monomial { coef: c.clone(), powers: e.clone() }).collect();
            Polynomial::new(n, terms).unwrap()
        })
        .collect();
    VectorField::Polynomial(PolyField::new(polys).unwrap())
}

fn gauss_green_identity() -> Line {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let fields: Vec<Vec<Vec<Poly>>> =
        [2, 3].iter().map(|&n| (0..GG_FIELDS).map(|_| random_poly_field(&mut rng, n)).collect()).collect();
    let (mut checks, mut bad, mut worst) = (0, 0, 0.0f64);
    for i in 0..GG_FIGURES {
        let n = 2 + i % 2;
        let fig = random_figure(&mut rng, n, if n == 2 { 3 } else { 2 }, GG_MAX_CUBES);
        for comps in &fields[n - 2] {
            let oracle: Rational = (0..n).map(|k| integrate_over_figure(&derivative(&comps[k], k), &fig)).sum();
            let exact = to_f64(&oracle);
            checks += 1;
            match gauss_green_verify(&to_field(n, comps), &fig, DivSource::Symbolic, GG_ORDER) {
                Ok(r) => {
                    let err = r.abs_error.max((r.flux - exact).abs()).max((r.volume - exact).abs());
                    worst = worst.max(err);
                    let sides = r.exact.as_ref().is_some_and(|e| e.equal && e.volume == rational::format(&oracle));
                    if err.is_nan() || err > GG_TOL || !sides {
                        bad += 1;
                    }
                }
                Err(_) => bad += 1,
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    pass_if(
        bad == 0 && secs < GG_SECONDS,
        format!("{checks} figure/field pairs, {bad} over {GG_TOL:e}, worst {worst:.2e}, {secs:.1}s of {GG_SECONDS}s"),
    )
}

// ---------------------------------------------------------------- 2

fn big_f(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x * (1.0 / (x * x)).sin()
    }
}

fn small_f(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        let u = 1.0 / (x * x);
        2.0 * x * u.sin() - 2.0 / x * u.cos()
    }
}

fn hk_fundamental_theorem() -> Line {
    let definite = big_f(1.0) - big_f(0.0);
    let est = hk_integrate_adaptive(&small_f, 0.0, 1.0, &[0.0], SIN1_TOL, 400_000_000);
    let (value_ok, value) = match &est {
        Ok(e) => ((e.value - definite).abs() <= SIN1_TOL, format!("{:.12}", e.value)),
        Err(e) => (false, e.to_string()),
    };
    let claim = HkClaim::new(
        ScalarField::custom("f", |x| small_f(x[0])),
        Function1D::new("F", big_f),
        Function1D::new("x", |x| x),
        0.0,
        1.0,
    );
    let mut sums = Vec::new();
    let mut sums_ok = true;
    for eps in HK_EPS {
        let r = singular_gauge(eps, 0.0).and_then(|g| hk_check(&claim.clone().with_eps(&[eps]), &g, 2, 7));
        match r {
            Ok(r) => {
                let s = r.max_sum();
                sums_ok &= s < eps && !r.verdict.refuted() && (r.definite - definite).abs() < 1e-15;
                sums.push(s);
            }
            Err(_) => sums_ok = false,
        }
    }
    let decreasing = sums.len() == HK_EPS.len() && sums.windows(2).all(|w| w[1] < w[0]);
    pass_if(
        value_ok && sums_ok && decreasing,
        format!(
            "adaptive value {value} vs sin 1 = {definite:.12} (tol {SIN1_TOL:e}); sums {} under eps {:?}",
            sums.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>().join(", "),
            HK_EPS
        ),
    )
}

// ---------------------------------------------------------------- 3

#[derive(Default)]
struct Tally {
    figures: [usize; 2],
    pomery: usize,
    predkvadry: usize,
    kvadry: usize,
    library: usize,
}

/// Random `(Q, x, r)` with `Q ⊂ B(x, 2r)` and min side `>= r / (2 sqrt n)`.
fn predkvadry_instance(rng: &mut ChaCha8Rng, n: usize) -> (Boxed, Vec<Rational>, Rational) {
    loop {
        let r = random_rational(rng, 0, 2, 16);
        if r.is_zero() {
            continue;
        }
        let x: Vec<Rational> = (0..n).map(|_| random_rational(rng, -1, 1, 16)).collect();
        let q: Boxed = x
            .iter()
            .map(|xl| {
                let s = &r * random_rational(rng, 0, 2, 64);
                let a = xl - &s * random_rational(rng, -1, 2, 64) / int(2);
                let b = &a + s;
                (a, b)
            })
            .collect();
        let min_side = q.iter().map(|(a, b)| b - a).min().unwrap();
        if min_side.is_zero() || int(4 * n as i64) * sq(&min_side) < sq(&r) {
            continue;
        }
        let far: Rational = q.iter().zip(&x).map(|((a, b), xl)| sq(&(xl - a).abs().max((xl - b).abs()))).sum();
        if far < int(4) * sq(&r) {
            return (q, x, r);
        }
    }
}

/// Signed indicators of `pieces` sum to that of `q` on every cell of the
/// arrangement of all their bounds.
fn telescopes(q: &Boxed, pieces: &[(Boxed, i8)]) -> bool {
    let n = q.len();
    let cuts: Vec<Vec<Rational>> = (0..n)
        .map(|l| {
            let mut v: Vec<Rational> = std::iter::once(q).chain(pieces.iter().map(|(p, _)| p)).flat_map(|b| [b[l].0.clone(), b[l].1.clone()]).collect();
            v.sort();
            v.dedup();
            v
        })
        .collect();
    let span = |b: &Boxed, l: usize| {
        let lo = cuts[l].binary_search(&b[l].0).unwrap();
        let hi = cuts[l].binary_search(&b[l].1).unwrap();
        (lo, hi)
    };
    let q_span: Vec<_> = (0..n).map(|l| span(q, l)).collect();
    let p_span: Vec<(Vec<(usize, usize)>, i8)> = pieces.iter().map(|(p, s)| ((0..n).map(|l| span(p, l)).collect(), *s)).collect();
    let dims: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
    let mut cell = vec![0usize; n];
    loop {
        let inside = |sp: &[(usize, usize)]| sp.iter().zip(&cell).all(|(&(lo, hi), &c)| lo <= c && c < hi);
        let lhs: i32 = p_span.iter().filter(|(sp, _)| inside(sp)).map(|(_, s)| *s as i32).sum();
        if lhs != inside(&q_span) as i32 {
            return false;
        }
        let mut i = 0;
        while i < n {
            cell[i] += 1;
            if cell[i] < dims[i] {
                break;
            }
            cell[i] = 0;
            i += 1;
        }
        if i == n {
            return true;
        }
    }
}

fn lemma_suite() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut per_n = Vec::new();
    for n in 1..=3usize {
        let consts = Constants::new(n).unwrap();
        let mut t = Tally::default();

        // r(E) <= 1/(2n) and the diameter bound, on random figures.
        for _ in 0..LEMMA_INSTANCES {
            let fig = random_figure(&mut rng, n, [5, 3, 2][n - 1], 64);
            let cells = Cells::of(&fig);
            let (v, p, d) = (cells.volume(), cells.perimeter(), cells.diameter_sq(&fig));
            if 4 * (n * n) as i128 * v * v > d * p * p {
                t.figures[0] += 1;
            }
            let r = v as f64 / ((d as f64).sqrt() * p as f64);
            let eps = r * rng.random_range(0.01..1.0);
            let scale = 2f64.powi(-cells.level);
            let (vol, diam) = (v as f64 * scale.powi(n as i32), (d as f64).sqrt() * scale);
            if diam.powi(n as i32) * eps.powi(n as i32) > consts.c_krit() * vol * (1.0 + 1e-12) {
                t.figures[1] += 1;
            }
            let lib = fig.regularity(None).unwrap();
            let l = cells.level as i64;
            if lib.volume != ratio(1, 1) * int(v as i64) / rational::pow2(l * n as i64)
                || lib.perimeter != int(p as i64) / rational::pow2(l * (n as i64 - 1))
                || lib.diameter_sq != int(d as i64) / rational::pow2(2 * l)
            {
                t.library += 1;
            }
        }

        // Side ratio of regular intervals.
        let half_n = ratio(1, 2 * n as i64);
        let mut accepted = 0;
        while accepted < LEMMA_INSTANCES {
            let q: Boxed = (0..n)
                .map(|_| {
                    let a = random_rational(&mut rng, -2, 2, 16);
                    let s = random_rational(&mut rng, 0, 4, 16) + ratio(1, 16);
                    (a.clone(), a + s)
                })
                .collect();
            let eps = &half_n * ratio(rng.random_range(1..=1024), 1024);
            if !box_regular(&q, None, &sq(&eps)) {
                continue;
            }
            accepted += 1;
            let sides: Vec<Rational> = q.iter().map(|(a, b)| b - a).collect();
            let (lo, hi) = (sides.iter().min().unwrap(), sides.iter().max().unwrap());
            if hi * &eps >= *lo {
                t.pomery += 1;
            }
        }

        // Interval regularity and the signed decomposition.
        let paper = rho_sq(n);
        let floor = consts.interval_floor_sq();
        let mut floor_bad = 0;
        for _ in 0..LEMMA_INSTANCES {
            let (q, x, r) = predkvadry_instance(&mut rng, n);
            if !box_regular(&q, Some(&x), &paper) {
                t.predkvadry += 1;
            }
            if !box_regular(&q, Some(&x), &floor) {
                floor_bad += 1;
            }
            let iv = Interval::new(q.clone()).unwrap();
            let Ok(k) = kvadry_decomposition(&iv, &x, &r) else {
                t.kvadry += 1;
                continue;
            };
            let pieces: Vec<(Boxed, i8)> = k.pieces.iter().map(|p| (p.interval.bounds().to_vec(), p.sign)).collect();
            let mut ok = pieces.len() <= 1 << k.m && telescopes(&q, &pieces);
            for (p, _) in &pieces {
                let contains = p.iter().zip(&x).all(|((a, b), xl)| a <= xl && xl <= b);
                let far: Rational = p.iter().zip(&x).map(|((a, b), xl)| sq(&(xl - a).abs().max((xl - b).abs()))).sum();
                ok &= contains && far < int(4) * sq(&r) && box_regular(p, Some(&x), &floor);
                if !box_regular(p, Some(&x), &paper) && n > 1 {
                    ok = false;
                }
            }
            if !ok {
                t.kvadry += 1;
            }
            if !k.verify(&consts, None).map(|c| c.all_ok()).unwrap_or(false) {
                t.library += 1;
            }
        }
        per_n.push((n, t, floor_bad));
    }
    let mut detail = Vec::new();
    let mut attainable_ok = true;
    for (n, t, floor_bad) in &per_n {
        detail.push(format!(
            "n={n}: r(E) {} krit {} pomery {} predkvadry {} kvadry {} library {}",
            t.figures[0], t.figures[1], t.pomery, t.predkvadry, t.kvadry, t.library
        ));
        attainable_ok &= t.figures == [0, 0] && t.pomery == 0 && t.kvadry == 0 && t.library == 0 && *floor_bad == 0;
        if *n > 1 {
            attainable_ok &= t.predkvadry == 0;
        }
    }
    let one = &per_n[0].1;
    let summary = format!("violations of {LEMMA_INSTANCES} each; {}", detail.join("; "));
    if !attainable_ok {
        return Line { status: Status::Fail, detail: summary };
    }
    if one.predkvadry > 0 {
        return Line {
            status: Status::Unattainable,
            detail: format!(
                "{summary}. For n=1, rho(1) = 1/2 is the largest possible 1D regularity, so no interval is rho(1)-regular; \
                 the 1D floor 1/16 holds with zero violations, as do all n=2,3 checks"
            ),
        };
    }
    Line { status: Status::Pass, detail: summary }
}

// ---------------------------------------------------------------- 4

fn cube_box(c: &DyadicCube) -> Boxed {
    let s = rational::pow2(-(c.level as i64));
    c.index.iter().map(|&k| (int(k) * &s, int(k + 1) * &s)).collect()
}

fn nearest_sq(b: &Boxed, x: &[Rational]) -> Rational {
    b.iter()
        .zip(x)
        .map(|((lo, hi), v)| {
            if v < lo {
                sq(&(lo - v))
            } else if v > hi {
                sq(&(v - hi))
            } else {
                Rational::zero()
            }
        })
        .sum()
}

fn farthest_sq(b: &Boxed, x: &[Rational]) -> Rational {
    b.iter().zip(x).map(|((lo, hi), v)| sq(&(v - lo).abs().max((v - hi).abs()))).sum()
}

fn mother(c: &DyadicCube) -> DyadicCube {
    DyadicCube::new(c.level - 1, c.index.iter().map(|k| k.div_euclid(2)).collect()).unwrap()
}

fn eligible(c: &DyadicCube, x: &[Rational], r: &Rational) -> bool {
    let four_r2 = int(4) * sq(r);
    nearest_sq(&cube_box(c), x) < sq(r)
        && farthest_sq(&cube_box(c), x) < four_r2
        && farthest_sq(&cube_box(&mother(c)), x) >= four_r2
}

/// Violations of the partition postconditions, recomputed from scratch.
fn partition_violations(root: &DyadicCube, balls: &[Ball]) -> Vec<String> {
    let n = root.dim();
    let p = match subordinate_partition(root, balls) {
        Ok(p) => p,
        Err(e) => return vec![e.to_string()],
    };
    let exact: Vec<(Vec<Rational>, Rational)> =
        balls.iter().map(|b| (rational::point_from_f64(&b.center).unwrap(), rational::from_f64(b.radius).unwrap())).collect();
    let mut v = Vec::new();
    let total: Rational = p.cubes.iter().map(|a| box_volume(&cube_box(&a.cube))).sum();
    if total != box_volume(&cube_box(root)) {
        v.push("volumes".to_string());
    }
    for (i, a) in p.cubes.iter().enumerate() {
        let c = &a.cube;
        let d = c.level - root.level;
        if d <= 0 || c.index.iter().zip(&root.index).any(|(k, r)| k.div_euclid(1 << d) != *r) {
            v.push(format!("cube {i} outside root"));
        }
        for b in &p.cubes[i + 1..] {
            let (lo, hi) = if c.level <= b.cube.level { (c, &b.cube) } else { (&b.cube, c) };
            let s = 1i64 << (hi.level - lo.level);
            if hi.index.iter().zip(&lo.index).all(|(h, l)| h.div_euclid(s) == *l) {
                v.push(format!("cube {i} overlaps"));
            }
        }
        let (x, r) = &exact[a.ball];
        if !eligible(c, x, r) {
            v.push(format!("cube {i} membership"));
        }
        if exact[..a.ball].iter().any(|(x, r)| eligible(c, x, r)) {
            v.push(format!("cube {i} not least index"));
        }
        let side = rational::pow2(-(c.level as i64));
        if !(sq(r) < int(4 * n as i64) * sq(&side)) {
            v.push(format!("cube {i} side"));
        }
        // (2n a^{n-1})^2 <= c1^2 4^{n-1} R^{2(n-1)}, c1^2 = 4^n n^{3-n}
        let lhs = sq(&(int(2 * n as i64) * num_traits::pow(side.clone(), n - 1)));
        let c1_sq = int(4i64.pow(n as u32)) * num_traits::pow(ratio(n as i64, 1), 3usize.saturating_sub(n)) / num_traits::pow(int(n as i64), n.saturating_sub(3));
        let rhs = c1_sq * int(4i64.pow(n as u32 - 1)) * num_traits::pow(sq(r), n - 1);
        if lhs > rhs {
            v.push(format!("cube {i} perimeter"));
        }
    }
    let consts = Constants::new(n).unwrap();
    for (i, count) in p.counts().iter().enumerate() {
        if *count as f64 > consts.c_c() {
            v.push(format!("ball {i} count {count}"));
        }
    }
    if !p.verify(&consts).map(|c| c.all_ok()).unwrap_or(false) {
        v.push("library check".into());
    }
    v
}

fn random_cover(rng: &mut ChaCha8Rng) -> (DyadicCube, Vec<Ball>) {
    loop {
        let level = rng.random_range(-1..=2);
        let root = DyadicCube::new(level, vec![rng.random_range(-2..2), rng.random_range(-2..2)]).unwrap();
        let side = 2f64.powi(-level);
        let lo: Vec<f64> = (0..2).map(|i| root.index[i] as f64 * side).collect();
        let m = rng.random_range(2..=4);
        let cell = side / m as f64;
        let mut balls = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let c = vec![
                    lo[0] + (i as f64 + 0.5 + rng.random_range(-0.1..0.1)) * cell,
                    lo[1] + (j as f64 + 0.5 + rng.random_range(-0.1..0.1)) * cell,
                ];
                balls.push(Ball::new(c, cell * rng.random_range(0.9..1.3)).unwrap());
            }
        }
        for _ in 0..rng.random_range(0..=3) {
            let c = vec![lo[0] + rng.random_range(0.0..side), lo[1] + rng.random_range(0.0..side)];
            let at = rng.random_range(0..=balls.len());
            balls.insert(at, Ball::new(c, cell * rng.random_range(0.6..1.5)).unwrap());
        }
        let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        let valid = balls.iter().all(|b| {
            corners.iter().any(|(u, w)| {
                let (dx, dy) = (lo[0] + u * side - b.center[0], lo[1] + w * side - b.center[1]);
                (dx * dx + dy * dy).sqrt() > 2.0 * b.radius * (1.0 + 1e-9)
            })
        });
        if valid {
            return (root, balls);
        }
    }
}

fn subordinate_partitions() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    let mut cubes = 0;
    for _ in 0..COVERS {
        let (root, balls) = random_cover(&mut rng);
        let v = partition_violations(&root, &balls);
        if !v.is_empty() {
            bad += 1;
        }
        cubes += subordinate_partition(&root, &balls).map(|p| p.cubes.len()).unwrap_or(0);
    }

    let quarter: Vec<Ball> = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)]
        .iter()
        .map(|&(x, y)| Ball::new(vec![x, y], 0.36).unwrap())
        .collect();
    let unit = DyadicCube::new(0, vec![0, 0]).unwrap();
    let expected: HashSet<(Vec<i64>, usize)> =
        [(vec![0, 0], 0), (vec![1, 0], 1), (vec![0, 1], 2), (vec![1, 1], 3)].into_iter().collect();
    let got: Option<HashSet<(Vec<i64>, usize)>> = subordinate_partition(&unit, &quarter)
        .ok()
        .filter(|p| p.cubes.iter().all(|a| a.cube.level == 1))
        .map(|p| p.cubes.into_iter().map(|a| (a.cube.index, a.ball)).collect());
    let example = got.as_ref() == Some(&expected) && partition_violations(&unit, &quarter).is_empty();

    let halves = [Ball::new(vec![0.25], 0.3).unwrap(), Ball::new(vec![0.75], 0.3).unwrap()];
    let line = subordinate_partition(&DyadicCube::new(0, vec![0]).unwrap(), &halves)
        .map(|p| p.cubes.iter().map(|a| (a.cube.level, a.cube.index[0], a.ball)).collect::<Vec<_>>());
    let one_d = matches!(line.as_deref(), Ok([(1, 0, 0), (1, 1, 1)]));

    pass_if(
        bad == 0 && example && one_d,
        format!(
            "{COVERS} random covers ({cubes} cubes), {bad} with violations; four-ball quarter cubes {}; 1D halves {}",
            if example { "exact" } else { "MISMATCH" },
            if one_d { "exact" } else { "MISMATCH" }
        ),
    )
}

// ---------------------------------------------------------------- 5

fn charge_separation() -> Line {
    let densities = [
        ("constant", ScalarField::Constant(1.0)),
        ("half-space", ScalarField::HalfSpace { axis: 0, offset: 0.25 }),
        (
            "polynomial",
            ScalarField::Polynomial(
                Polynomial::new(
                    2,
                    vec![
                        Monomial { coef: int(3), powers: vec![2, 0] },
                        Monomial { coef: ratio(-1, 2), powers: vec![0, 1] },
                        Monomial { coef: int(1), powers: vec![0, 0] },
                    ],
                )
                .unwrap(),
            ),
        ),
    ];
    let eps = 0.05;
    let mut passed = Vec::new();
    let mut all_pass = true;
    for (name, f) in densities {
        let v = charge_axiom_falsifier(&Charge::Density { field: f, order: 3 }, eps, DENSITY_SEQUENCES, 5);
        let tested = match v {
            Ok(FalsifierVerdict::PassedSampled { tested }) => tested,
            _ => 0,
        };
        all_pass &= tested == DENSITY_SEQUENCES;
        passed.push(format!("{name} {tested}"));
    }

    let len = 1.0;
    let segment = Flat { axis: 1, offset: ratio(1, 2), bounds: vec![(int(0), int(1))] };
    let h1 = Charge::Hausdorff(segment);
    let (tube_ok, tube) = match charge_axiom_falsifier(&h1, eps, 64, 5) {
        Ok(FalsifierVerdict::Falsified { witness, .. }) => {
            let shrinking = witness.levels.iter().zip(&witness.sets).all(|(&k, s)| s.volume() <= rational::pow2(-(k as i64)));
            let large = witness.values.iter().all(|v| *v >= TUBE_FRACTION * len);
            // value recomputed: length of the segment inside the closed set
            let recomputed = witness.sets.iter().zip(&witness.values).all(|(s, v)| {
                let covered: Rational = s
                    .cubes()
                    .iter()
                    .filter(|c| {
                        let b = cube_box(c);
                        b[1].0 <= ratio(1, 2) && ratio(1, 2) <= b[1].1
                    })
                    .map(|c| {
                        let b = cube_box(c);
                        (b[0].1.clone().min(int(1)) - b[0].0.clone().max(int(0))).max(Rational::zero())
                    })
                    .sum();
                // cubes on both sides of the line share it; count each x-range once
                let merged = merged_length(s);
                (to_f64(&merged) - v).abs() < 1e-12 && covered >= merged
            });
            (
                shrinking && large && recomputed,
                format!(
                    "{:?} sequence over levels {:?}, values {:?}, volumes {:?}",
                    witness.construction,
                    witness.levels,
                    witness.values.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>(),
                    witness.volumes.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>()
                ),
            )
        }
        Ok(other) => (false, format!("not refuted: {other:?}")),
        Err(e) => (false, e.to_string()),
    };
    pass_if(all_pass && tube_ok, format!("densities passed {}; H1 segment refuted by {tube}", passed.join(", ")))
}

/// Length of `{(t, 1/2) : 0 <= t <= 1}` inside the closed figure.
fn merged_length(s: &Figure) -> Rational {
    let mut spans: Vec<(Rational, Rational)> = s
        .cubes()
        .iter()
        .map(cube_box)
        .filter(|b| b[1].0 <= ratio(1, 2) && ratio(1, 2) <= b[1].1)
        .map(|b| (b[0].0.clone().max(int(0)), b[0].1.clone().min(int(1))))
        .filter(|(a, b)| a < b)
        .collect();
    spans.sort();
    let mut total = Rational::zero();
    let mut reach: Option<Rational> = None;
    for (a, b) in spans {
        let start = match &reach {
            Some(r) if *r > a => r.clone(),
            _ => a,
        };
        if b > start {
            total += &b - &start;
            reach = Some(b);
        }
    }
    total
}

// ---------------------------------------------------------------- 6

fn lebesgue_claim(scale: f64, notion: Notion, eps: f64) -> IntegralClaim {
    IntegralClaim::new(
        ScalarField::Constant(1.0),
        Charge::lebesgue().scaled(scale),
        Charge::lebesgue(),
        notion,
        Domain::Figure(Figure::unit(2)),
    )
    .with_eps(&[eps])
}

/// `E ⊂⊂ B(x, r)` and `r(E, x) > eps`, recomputed exactly.
fn admissible(e: &Figure, x: &[Rational], r: &Rational, eps: f64) -> bool {
    let boxes: Vec<Boxed> = e.cubes().iter().map(cube_box).collect();
    if boxes.iter().any(|b| farthest_sq(b, x) >= sq(r)) {
        return false;
    }
    let cells = Cells::of(e);
    let scale = rational::pow2(-(cells.level as i64));
    let vol = int(cells.volume() as i64) * num_traits::pow(scale.clone(), e.dim());
    let per = int(cells.perimeter() as i64) * num_traits::pow(scale.clone(), e.dim() - 1);
    let mut d2 = int(cells.diameter_sq(e) as i64) * sq(&scale);
    for b in &boxes {
        d2 = d2.max(farthest_sq(b, x));
    }
    let eps = rational::from_f64(eps).unwrap();
    sq(&vol) > sq(&eps) * d2 * sq(&per)
}

fn harness_inclusions() -> Line {
    let iso = IsoSearch::default();
    // Starred refutations re-validate for the unstarred seminorm.
    let (mut starred, mut revalidated) = (0, 0);
    for (k, &(scale, g, eps)) in [(2.0, 0.6, 0.01), (3.0, 0.4, 0.05), (2.5, 0.5, 0.02), (4.0, 0.3, 0.05)].iter().enumerate() {
        let claim = lebesgue_claim(scale, Notion::PackingRStar, eps);
        let Ok(r) = check_packing_integral(&claim, &Gauge::constant(g), 6, 10 + k as u64) else { continue };
        let Some(w) = r.verdict.witness() else { continue };
        starred += 1;
        let exact_sum: f64 = w
            .terms
            .iter()
            .map(|t| t.witness.as_ref().map(|e| (scale - 1.0) * e.volume_f64()).unwrap_or(0.0))
            .sum();
        let terms_ok = w.terms.iter().all(|t| {
            t.witness.as_ref().is_some_and(|e| {
                admissible(e, &rational::point_from_f64(&t.ball.center).unwrap(), &rational::from_f64(t.radius).unwrap(), eps)
            })
        });
        if terms_ok && exact_sum >= eps && revalidate_witness(&claim, w, Notion::PackingR, &iso).unwrap_or(false) {
            revalidated += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut q_le_p = 0;
    let pairs = 12;
    let field = Charge::Flux { field: VectorField::catalog("quadratic", 2).unwrap(), order: 4 };
    for i in 0..pairs {
        let x = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
        let r = rng.random_range(0.1..0.5);
        let mut q = SeminormQuery::new(field.clone(), x, r, 0.05, Seminorm::Q);
        q.depth = 3;
        q.seed = i;
        let vq = seminorm_lower_bound(&q).map(|b| b.value);
        q.variant = Seminorm::P;
        let vp = seminorm_lower_bound(&q).map(|b| b.value);
        if let (Ok(a), Ok(b)) = (vq, vp) {
            if a <= b {
                q_le_p += 1;
            }
        }
    }

    // MC_alpha to MC_beta on identical grids.
    let cfg = McConfig::new();
    let points = [0.0, 0.2, 0.5, 0.7, 1.0];
    let (mut comparisons, mut violations, mut oracle_violations, mut exact) = (0, 0, 0, 0);
    for phi in ["identity", "cubic", "arctan"] {
        let phi = ControlFunction::catalog(phi).unwrap();
        for (a, b) in [(1.0, 1.5), (1.0, 2.0), (1.5, 3.0)] {
            let m = mc_monotone_comparison(&phi, a, b, &points, &cfg.grid).unwrap();
            comparisons += m.checked;
            exact += m.exact;
            violations += m.violations.len();
            for &x in &points {
                for &h in &cfg.grid {
                    for s in [h, -h] {
                        let inc = |c: f64| {
                            let (x, t) = (rational::from_f64(x).unwrap(), rational::from_f64(c * s).unwrap());
                            phi.eval_exact(&(&x + &t)).zip(phi.eval_exact(&x)).map(|(u, v)| (u - v).abs())
                        };
                        if let (Some(ia), Some(ib)) = (inc(a), inc(b)) {
                            if ia > ib {
                                oracle_violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut carried = true;
    let claims = [
        ("singular", ScalarField::custom("f", |x| small_f(x[0])), Function1D::new("F", big_f)),
        ("wrong-at-0", ScalarField::custom("g", |x| if x[0] == 0.0 { 1.0 } else { small_f(x[0]) }), Function1D::new("F", big_f)),
        ("linear", ScalarField::Constant(2.0), Function1D::new("2x", |x| 2.0 * x)),
    ];
    for (_, f, big) in &claims {
        for (a, b) in [(1.0, 2.0), (1.0, 1.5)] {
            let mk = |alpha: f64| McClaim {
                f: f.clone(),
                big_f: big.clone(),
                g: Function1D::new("x", |x| x),
                phi: ControlFunction::Identity,
                alpha,
            };
            let (ra, rb) = (mc_alpha_check(&mk(a), &points, &cfg).unwrap(), mc_alpha_check(&mk(b), &points, &cfg).unwrap());
            if !ra.verdict.refuted() && rb.verdict.refuted() {
                carried = false;
            }
            for (pa, pb) in ra.points.iter().zip(&rb.points) {
                if pb.tail_max > pa.tail_max * (1.0 + 1e-12) {
                    carried = false;
                }
            }
        }
    }

    // f = 1, F = 2 lambda at eps = 0.01.
    let claim = lebesgue_claim(2.0, Notion::PackingRStar, REFUTE_EPS);
    let one_cube = match check_packing_integral(&claim, &Gauge::constant(0.6), 8, 3).map(|r| r.verdict) {
        Ok(Verdict::Refuted { eps, witness, .. }) if eps == REFUTE_EPS => witness.terms.iter().any(|t: &BallTerm| {
            let Some(e) = &t.witness else { return false };
            let single = e.cubes().len() == 1 && e.volume_f64() > REFUTE_EPS;
            let solo = PackingWitness { eps, terms: vec![t.clone()], sum: t.value, full_sum: t.value };
            single
                && (t.value - e.volume_f64()).abs() < 1e-12
                && revalidate_witness(&claim, &solo, Notion::PackingRStar, &iso).unwrap_or(false)
        }),
        _ => false,
    };

    pass_if(
        starred > 0 && revalidated == starred && q_le_p == pairs && violations == 0 && oracle_violations == 0 && carried && one_cube,
        format!(
            "{revalidated}/{starred} starred witnesses re-validate unstarred; q <= p on {q_le_p}/{pairs} queries; \
             monotone comparison {violations} violations in {comparisons} ({exact} exact, oracle {oracle_violations}); \
             MC_alpha verdicts carry to MC_beta: {carried}; one-cube witness at eps {REFUTE_EPS}: {one_cube}"
        ),
    )
}

// ---------------------------------------------------------------- 7

fn restriction_round_trip() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = ScalarField::Polynomial(
        Polynomial::new(2, vec![Monomial { coef: int(1), powers: vec![0, 0] }, Monomial { coef: ratio(1, 2), powers: vec![1, 0] }])
            .unwrap(),
    );
    let p_plus = ScalarField::custom("p+2", |x| 3.0 + 0.5 * x[0]);
    let mut cfg = PackingCheckConfig::new(3, 8);
    cfg.depth = 2;
    let (mut runs, mut agree, mut refuted, mut oracle_ok) = (0, 0, 0, 0);
    for _ in 0..SUBFIGURES {
        let level = rng.random_range(1..=3);
        let s = 1i64 << level;
        let count = rng.random_range(1..=(s * s).min(12) as usize);
        let cubes = (0..count).map(|_| DyadicCube::new(level, vec![rng.random_range(0..s), rng.random_range(0..s)]).unwrap()).collect();
        let a = Figure::new(2, cubes).unwrap();
        for big in [p.clone(), p_plus.clone()] {
            let claim = IntegralClaim::new(
                p.clone(),
                Charge::Density { field: big, order: 3 },
                Charge::lebesgue(),
                Notion::PackingR,
                Domain::Figure(Figure::unit(2)),
            )
            .with_eps(&[0.02]);
            runs += 1;
            let Ok(r) = restriction_consistency(&claim, &a, &Gauge::constant(0.4), &cfg) else { continue };
            if r.verdicts_agree && r.witnesses_agree {
                agree += 1;
            }
            match (r.inside.verdict.witness(), r.extended.verdict.witness()) {
                (Some(w1), Some(w2)) => {
                    refuted += 1;
                    let cut = |w: &PackingWitness| -> Vec<Option<HashSet<Vec<i64>>>> {
                        w.terms.iter().map(|t| t.witness.as_ref().map(|e| cells_in(e, &a))).collect()
                    };
                    let balls = |w: &PackingWitness| w.terms.iter().map(|t| t.ball.clone()).collect::<Vec<_>>();
                    if cut(w1) == cut(w2) && balls(w1) == balls(w2) {
                        oracle_ok += 1;
                    }
                }
                (None, None) => oracle_ok += 1,
                _ => {}
            }
        }
    }
    pass_if(
        agree == runs && oracle_ok == runs,
        format!("{runs} runs on {SUBFIGURES} sub-figures: {agree} agree, {refuted} refuted in both forms, {oracle_ok} witness pairs equal on A"),
    )
}

/// Cells of `e ∩ a` at the finer of their two levels.
fn cells_in(e: &Figure, a: &Figure) -> HashSet<Vec<i64>> {
    let level = e.cubes().iter().chain(a.cubes()).map(|c| c.level).max().unwrap_or(0);
    let at = |f: &Figure| -> HashSet<Vec<i64>> {
        f.cubes().iter().flat_map(|c| c.descendants(level)).map(|c| c.index).collect()
    };
    at(e).intersection(&at(a)).cloned().collect()
}

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fixedpoints::poly_roots;
use crate::maps::{Polynomial, RationalMap, SpherePoint};

pub const INVERSE_CAP_DEFAULT: usize = 100_000;
/// Chordal residual `d(f(w), target)` every accepted preimage must meet.
pub const PREIMAGE_RESIDUAL: f64 = 1e-8;
/// Pullback levels inspected by the exceptional-point probe.
pub const EXCEPTIONAL_LEVELS: usize = 3;

const DISTINCT_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub point: SpherePoint,
    /// Depth in the preimage tree; the seed is level 0.
    pub level: usize,
    /// Index of the point this one is a preimage of.
    pub parent: Option<usize>,
}

/// Points of a backward orbit, level by level.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub points: Vec<CloudPoint>,
    pub map: RationalMap,
    pub seed_point: SpherePoint,
    pub rng_seed: u64,
    pub method: &'static str,
    pub depth: usize,
    pub cap: usize,
    /// Tree nodes dropped because the root finder failed or a preimage
    /// missed the residual check.
    pub skipped: usize,
}

impl PointCloud {
    /// `re,im,level` rows with a header line; infinity is written as `inf,inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,level\n");
        for p in &self.points {
            match p.point {
                SpherePoint::Finite(z) => out.push_str(&format!("{},{},{}\n", z.re, z.im, p.level)),
                SpherePoint::Infinity => out.push_str(&format!("inf,inf,{}\n", p.level)),
            }
        }
        out
    }

    pub fn level(&self, k: usize) -> impl Iterator<Item = &CloudPoint> {
        self.points.iter().filter(move |p| p.level == k)
    }
}

/// All solutions of `f(w) = target` on the sphere, with multiplicity.
pub fn preimages(f: &RationalMap, target: SpherePoint) -> Result<Vec<SpherePoint>> {
    let d = f.degree();
    let poly: Polynomial = match target {
        SpherePoint::Infinity => f.den().clone(),
        SpherePoint::Finite(t) if t.norm() <= 1.0 => f.num() - &f.den().scaled(t),
        SpherePoint::Finite(t) => &f.num().scaled(t.inv()) - f.den(),
    };
    let poly = poly.trimmed(1e-15);
    let mut out: Vec<SpherePoint> = if poly.degree() >= 1 {
        poly_roots(&poly)?.into_iter().map(SpherePoint::Finite).collect()
    } else {
        Vec::new()
    };
    out.extend(std::iter::repeat(SpherePoint::Infinity).take(d - poly.degree().min(d)));
    Ok(out)
}

fn distinct(points: &[SpherePoint]) -> Vec<SpherePoint> {
    let mut out: Vec<SpherePoint> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.chordal(p) < DISTINCT_DISTANCE) {
            out.push(*p);
        }
    }
    out
}

/// A point is exceptional when its preimages over the first
/// [`EXCEPTIONAL_LEVELS`] pullbacks contain at most two distinct points.
pub fn is_exceptional(f: &RationalMap, a: SpherePoint) -> Result<bool> {
    let mut seen: Vec<SpherePoint> = Vec::new();
    let mut level = vec![a];
    for _ in 0..EXCEPTIONAL_LEVELS {
        let mut next = Vec::new();
        for t in &level {
            next.extend(preimages(f, *t)?);
        }
        level = distinct(&next);
        seen.extend(level.iter().copied());
        seen = distinct(&seen);
        if seen.len() > 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Breadth-first preimage tree of `seed` down to `depth` levels. A level
/// larger than `cap / depth` is cut down by uniform sampling without
/// replacement, driven by a ChaCha stream seeded with `rng_seed`.
pub fn inverse_iteration(
    f: &RationalMap,
    seed: SpherePoint,
    depth: usize,
    cap: usize,
    rng_seed: u64,
) -> Result<PointCloud> {
    if f.degree() < 2 {
        return Err(Error::InvalidInput("inverse iteration needs degree >= 2".into()));
    }
    if is_exceptional(f, seed)? {
        return Err(Error::ExceptionalSeed);
    }
    let per_level = (cap / depth.max(1)).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut points = vec![CloudPoint {
        point: seed,
        level: 0,
        parent: None,
    }];
    let mut frontier: Vec<usize> = vec![0];
    let mut skipped = 0;
    for level in 1..=depth {
        let results: Vec<(usize, Result<Vec<SpherePoint>>)> = frontier
            .par_iter()
            .map(|&i| (i, preimages(f, points[i].point)))
            .collect();
        let mut next: Vec<CloudPoint> = Vec::new();
        for (parent, found) in results {
            let target = points[parent].point;
            match found {
                Ok(ws) => {
                    for w in ws {
                        if f.eval(w).map(|v| v.chordal(&target)).unwrap_or(f64::INFINITY) < PREIMAGE_RESIDUAL {
                            next.push(CloudPoint {
                                point: w,
                                level,
                                parent: Some(parent),
                            });
                        } else {
                            skipped += 1;
                        }
                    }
                }
                Err(_) => skipped += 1,
            }
        }
        if next.len() > per_level {
            let mut keep = index::sample(&mut rng, next.len(), per_level).into_vec();
            keep.sort_unstable();
            next = keep.into_iter().map(|k| next[k]).collect();
        }
        frontier = (points.len()..points.len() + next.len()).collect();
        points.extend(next);
    }
    Ok(PointCloud {
        points,
        map: f.clone(),
        seed_point: seed,
        rng_seed,
        method: "inverse-iteration",
        depth,
        cap,
        skipped,
    })
}

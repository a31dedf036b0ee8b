//! Grid-plus-bisection scan of a boolean admissibility predicate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ScanError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredicateTag {
    Ellipse,
    TildeEllipse,
    Other,
}

/// Where an interval endpoint came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointSource {
    /// Endpoint of the scan domain, evaluated directly.
    DomainEdge,
    /// Refined by bisection between a grid point and its neighbour.
    SignChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_source: EndpointSource,
    pub hi_source: EndpointSource,
}

impl Interval {
    pub fn contains(&self, f: f64) -> bool {
        self.lo <= f && f <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub grid_n: usize,
    pub refine_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid_n: 2001,
            refine_tol: 1e-10,
        }
    }
}

/// Union of closed intervals on which a predicate holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSet {
    pub intervals: Vec<Interval>,
    pub predicate_tag: PredicateTag,
    pub grid_n: usize,
    pub refine_tol: f64,
}

impl AdmissibleSet {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, f: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(f))
    }

    /// Set of a collapsed domain `{f}`, or empty.
    pub fn point(f: f64, admissible: bool, tag: PredicateTag, opts: ScanOptions) -> Self {
        let intervals = if admissible {
            vec![Interval {
                lo: f,
                hi: f,
                lo_source: EndpointSource::DomainEdge,
                hi_source: EndpointSource::DomainEdge,
            }]
        } else {
            vec![]
        };
        Self {
            intervals,
            predicate_tag: tag,
            grid_n: 1,
            refine_tol: opts.refine_tol,
        }
    }
}

/// Infimum and supremum of an admissible set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetBounds {
    pub inf: f64,
    pub sup: f64,
    pub disconnected: bool,
}

pub fn bounds_of(set: &AdmissibleSet) -> Result<SetBounds, ScanError> {
    match (set.intervals.first(), set.intervals.last()) {
        (Some(first), Some(last)) => Ok(SetBounds {
            inf: first.lo,
            sup: last.hi,
            disconnected: set.intervals.len() > 1,
        }),
        _ => Err(ScanError::EmptySet),
    }
}

/// Bisects between an admissible point `good` and an inadmissible `bad`,
/// returning the last admissible point found.
fn refine<E, F>(mut good: f64, mut bad: f64, tol: f64, pred: &F) -> Result<f64, E>
where
    F: Fn(f64) -> Result<bool, E>,
{
    while (bad - good).abs() > tol {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if pred(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// Evaluates `predicate` on `grid_n` uniform points of `[lo, hi]` (endpoints
/// included) and refines every transition by bisection.
pub fn scan<E, F>(
    lo: f64,
    hi: f64,
    predicate: F,
    opts: ScanOptions,
    tag: PredicateTag,
) -> Result<AdmissibleSet, E>
where
    F: Fn(f64) -> Result<bool, E> + Sync,
    E: From<ScanError> + Send,
{
    if !(lo < hi) {
        return Err(ScanError::EmptyDomain { lo, hi }.into());
    }
    if opts.grid_n < 3 {
        return Err(ScanError::GridTooCoarse(opts.grid_n).into());
    }
    let n = opts.grid_n;
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
        .collect();
    let flags = grid
        .par_iter()
        .map(|&f| predicate(f))
        .collect::<Result<Vec<bool>, E>>()?;

    let mut intervals = Vec::new();
    let mut i = 0;
    while i < n {
        if !flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && flags[i + 1] {
            i += 1;
        }
        let end = i;
        let (lo_pt, lo_source) = if start == 0 {
            (lo, EndpointSource::DomainEdge)
        } else {
            (
                refine(grid[start], grid[start - 1], opts.refine_tol, &predicate)?,
                EndpointSource::SignChange,
            )
        };
        let (hi_pt, hi_source) = if end == n - 1 {
            (hi, EndpointSource::DomainEdge)
        } else {
            (
                refine(grid[end], grid[end + 1], opts.refine_tol, &predicate)?,
                EndpointSource::SignChange,
            )
        };
        intervals.push(Interval {
            lo: lo_pt,
            hi: hi_pt,
            lo_source,
            hi_source,
        });
        i += 1;
    }
    Ok(AdmissibleSet {
        intervals,
        predicate_tag: tag,
        grid_n: n,
        refine_tol: opts.refine_tol,
    })
}

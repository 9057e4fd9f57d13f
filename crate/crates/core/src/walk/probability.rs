use std::collections::BTreeMap;

use super::{LatticeState, Site};
use crate::scalar::Real;

/// Per-site probabilities `(P^r, P^l, P^u, P^d)` and their sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteProbability<T> {
    pub site: Site,
    pub components: [T; 4],
    pub total: T,
}

/// Position distribution of the walker, one record per occupied site in `(x, y)` order.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ProbabilityField<T> {
    records: Vec<SiteProbability<T>>,
}

impl<T: Real> ProbabilityField<T> {
    pub fn from_records(mut records: Vec<SiteProbability<T>>) -> Self {
        records.sort_by_key(|r| r.site);
        Self { records }
    }

    pub fn records(&self) -> &[SiteProbability<T>] {
        &self.records
    }

    pub fn get(&self, site: Site) -> Option<&SiteProbability<T>> {
        self.records.binary_search_by_key(&site, |r| r.site).ok().map(|i| &self.records[i])
    }

    /// `P(x, y)`, zero off the support.
    pub fn at(&self, site: Site) -> T {
        self.get(site).map_or(T::zero(), |r| r.total)
    }

    pub fn total(&self) -> T {
        self.records.iter().fold(T::zero(), |acc, r| acc + r.total)
    }
}

/// `P^c(x,y) = |c(x,y)|²` for each coin component, and `P` their sum.
pub fn probability<T: Real>(state: &LatticeState<T>) -> ProbabilityField<T> {
    let records = state
        .iter()
        .map(|(site, v)| {
            let components = v.map(|a| a.norm_sqr());
            let total = components.iter().fold(T::zero(), |a, &b| a + b);
            SiteProbability { site, components, total }
        })
        .collect();
    ProbabilityField { records }
}

/// A distribution over one integer coordinate, ascending.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AxisDistribution<T> {
    pub points: Vec<(i64, T)>,
}

impl<T: Real> AxisDistribution<T> {
    fn from_map(map: BTreeMap<i64, T>) -> Self {
        Self { points: map.into_iter().collect() }
    }

    pub fn get(&self, coord: i64) -> T {
        self.points
            .binary_search_by_key(&coord, |p| p.0)
            .map_or(T::zero(), |i| self.points[i].1)
    }

    pub fn total(&self) -> T {
        self.points.iter().fold(T::zero(), |acc, p| acc + p.1)
    }

    /// Coordinate of the largest weight (smallest coordinate on ties).
    pub fn peak(&self) -> Option<i64> {
        let mut best: Option<(i64, T)> = None;
        for &(x, p) in &self.points {
            if best.is_none_or(|(_, b)| p > b) {
                best = Some((x, p));
            }
        }
        best.map(|b| b.0)
    }
}

/// `(Σ_y P(x, y), Σ_x P(x, y))`.
pub fn marginals<T: Real>(field: &ProbabilityField<T>) -> (AxisDistribution<T>, AxisDistribution<T>) {
    let mut xs = BTreeMap::new();
    let mut ys = BTreeMap::new();
    for r in field.records() {
        *xs.entry(r.site.x).or_insert(T::zero()) += r.total;
        *ys.entry(r.site.y).or_insert(T::zero()) += r.total;
    }
    (AxisDistribution::from_map(xs), AxisDistribution::from_map(ys))
}

/// Axis rows `(P(x, 0), P(0, y))`. These generally sum to less than one.
pub fn slices<T: Real>(field: &ProbabilityField<T>) -> (AxisDistribution<T>, AxisDistribution<T>) {
    let xs = field.records().iter().filter(|r| r.site.y == 0).map(|r| (r.site.x, r.total)).collect();
    let ys = field.records().iter().filter(|r| r.site.x == 0).map(|r| (r.site.y, r.total)).collect();
    (AxisDistribution::from_map(xs), AxisDistribution::from_map(ys))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments<T> {
    pub mean_x: T,
    pub mean_y: T,
    pub sigma_x: T,
    pub sigma_y: T,
    /// `sqrt(σx² + σy²)`
    pub sigma: T,
}

/// First and second moments of `P`, normalized by its total mass.
pub fn moments<T: Real>(field: &ProbabilityField<T>) -> Moments<T> {
    let mass = field.total();
    if !(mass > T::zero()) {
        let z = T::zero();
        return Moments { mean_x: z, mean_y: z, sigma_x: z, sigma_y: z, sigma: z };
    }
    let coord = |v: i64| T::from_i64(v).expect("coordinate representable");
    let (mut mx, mut my) = (T::zero(), T::zero());
    for r in field.records() {
        mx += r.total * coord(r.site.x);
        my += r.total * coord(r.site.y);
    }
    mx /= mass;
    my /= mass;
    let (mut vx, mut vy) = (T::zero(), T::zero());
    for r in field.records() {
        let dx = coord(r.site.x) - mx;
        let dy = coord(r.site.y) - my;
        vx += r.total * dx * dx;
        vy += r.total * dy * dy;
    }
    vx /= mass;
    vy /= mass;
    Moments { mean_x: mx, mean_y: my, sigma_x: vx.sqrt(), sigma_y: vy.sqrt(), sigma: (vx + vy).sqrt() }
}

//! Disjoint disk packings of the unit square and their phase-space scaling.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest deficiency accepted by [`pack_disks`].
pub const MIN_EPS: f64 = 0.02;

/// Samples used by the Monte Carlo coverage measurement.
pub const MC_SAMPLES: usize = 1_000_000;

const MC_SEED: u64 = 0x6c69_6562;
const MAX_DISKS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// `|c₁ - c₂| - r₁ - r₂`; negative when the disks overlap.
    pub fn gap(&self, other: &Disk) -> f64 {
        (self.center - other.center).norm() - self.radius - other.radius
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.center.re, y - self.center.im);
        dx * dx + dy * dy < self.radius * self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloCoverage {
    pub samples: usize,
    pub fraction: f64,
    pub std_error: f64,
}

/// Pairwise disjoint disks in `(-1/2, 1/2)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskPacking {
    /// Sorted by non-increasing radius.
    pub disks: Vec<Disk>,
    /// Exact area sum `Σ π r²`.
    pub coverage: f64,
    pub min_radius: f64,
    pub eps: f64,
    pub monte_carlo: MonteCarloCoverage,
}

/// A dyadic cell with the already placed disks that reach into it.
struct Cell {
    x0: f64,
    y0: f64,
    side: f64,
    touching: Vec<usize>,
}

fn cell_hits_disk(x0: f64, y0: f64, side: f64, d: &Disk) -> bool {
    let cx = d.center.re.clamp(x0, x0 + side);
    let cy = d.center.im.clamp(y0, y0 + side);
    let (dx, dy) = (cx - d.center.re, cy - d.center.im);
    dx * dx + dy * dy < d.radius * d.radius * (1.0 - 1e-12)
}

fn cell_inside_disk(x0: f64, y0: f64, side: f64, d: &Disk) -> bool {
    let fx = (x0 - d.center.re).abs().max((x0 + side - d.center.re).abs());
    let fy = (y0 - d.center.im).abs().max((y0 + side - d.center.im).abs());
    fx * fx + fy * fy <= d.radius * d.radius
}

/// Packs disks into the unit square until their area reaches `1 - eps`.
///
/// Dyadic cells are visited level by level. A cell that meets no placed
/// disk receives its inscribed disk; a cell lying inside a disk is dropped;
/// every other cell is split into four for the next level. Disks therefore
/// come in non-increasing radius, sit in pairwise disjoint cells or outside
/// each other's disks, and the residue of each square is tiled by the free
/// dyadic cells it contains.
pub fn pack_disks(eps: f64) -> Result<DiskPacking> {
    if !(MIN_EPS..1.0).contains(&eps) {
        return Err(Error::pre("pack_disks", format!("eps must lie in [{MIN_EPS}, 1), got {eps}")));
    }
    let target = 1.0 - eps;
    let floor = eps.powi(22);
    let mut disks: Vec<Disk> = Vec::new();
    let mut area = 0.0;
    let mut level = vec![Cell { x0: -0.5, y0: -0.5, side: 1.0, touching: Vec::new() }];
    'levels: while !level.is_empty() {
        let mut next = Vec::with_capacity(4 * level.len());
        for cell in level {
            let mut cell = cell;
            if cell.touching.is_empty() {
                let r = 0.5 * cell.side;
                if r < floor {
                    return Err(Error::Geometry(format!(
                        "radius {r:e} fell below eps^22 = {floor:e} at coverage {area:.6}"
                    )));
                }
                let d = Disk { center: Complex64::new(cell.x0 + r, cell.y0 + r), radius: r };
                area += d.area();
                disks.push(d);
                if area >= target {
                    break 'levels;
                }
                if disks.len() >= MAX_DISKS {
                    return Err(Error::NoConvergence { op: "pack_disks", iterations: MAX_DISKS });
                }
                cell.touching.push(disks.len() - 1);
            }
            let h = 0.5 * cell.side;
            for (qx, qy) in [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)] {
                let (x0, y0) = (cell.x0 + qx, cell.y0 + qy);
                if cell.touching.iter().any(|&i| cell_inside_disk(x0, y0, h, &disks[i])) {
                    continue;
                }
                let touching = cell.touching.iter().copied().filter(|&i| cell_hits_disk(x0, y0, h, &disks[i])).collect();
                next.push(Cell { x0, y0, side: h, touching });
            }
        }
        level = next;
    }
    if area < target {
        return Err(Error::Geometry(format!("packing stalled at coverage {area:.6}")));
    }
    let min_radius = disks.last().map_or(0.0, |d| d.radius);
    let monte_carlo = monte_carlo_coverage(&disks, MC_SAMPLES);
    Ok(DiskPacking { disks, coverage: area, min_radius, eps, monte_carlo })
}

/// Uniform-grid index of disks by bounding box.
struct Buckets {
    res: usize,
    lo: f64,
    width: f64,
    cells: Vec<Vec<u32>>,
}

impl Buckets {
    fn new(disks: &[Disk], lo: f64, width: f64, res: usize) -> Self {
        let mut cells = vec![Vec::new(); res * res];
        let idx = |v: f64| (((v - lo) / width * res as f64).floor().max(0.0) as usize).min(res - 1);
        for (i, d) in disks.iter().enumerate() {
            let (x0, x1) = (idx(d.center.re - d.radius), idx(d.center.re + d.radius));
            let (y0, y1) = (idx(d.center.im - d.radius), idx(d.center.im + d.radius));
            for gy in y0..=y1 {
                for gx in x0..=x1 {
                    cells[gy * res + gx].push(i as u32);
                }
            }
        }
        Buckets { res, lo, width, cells }
    }

    fn at(&self, x: f64, y: f64) -> &[u32] {
        let idx = |v: f64| (((v - self.lo) / self.width * self.res as f64).floor().max(0.0) as usize).min(self.res - 1);
        &self.cells[idx(y) * self.res + idx(x)]
    }
}

/// Fraction of `samples` uniform points of the unit square inside some disk.
pub fn monte_carlo_coverage(disks: &[Disk], samples: usize) -> MonteCarloCoverage {
    let buckets = Buckets::new(disks, -0.5, 1.0, 256);
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
    let mut hits = 0usize;
    for _ in 0..samples {
        let x: f64 = rng.gen::<f64>() - 0.5;
        let y: f64 = rng.gen::<f64>() - 0.5;
        if buckets.at(x, y).iter().any(|&i| disks[i as usize].contains(x, y)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples.max(1) as f64;
    MonteCarloCoverage { samples, fraction: p, std_error: (p * (1.0 - p) / samples.max(1) as f64).sqrt() }
}

/// Smallest pairwise gap, found by a sweep over disks sorted by left edge.
pub fn min_pairwise_gap(disks: &[Disk]) -> f64 {
    let mut order: Vec<usize> = (0..disks.len()).collect();
    order.sort_by(|&a, &b| (disks[a].center.re - disks[a].radius).total_cmp(&(disks[b].center.re - disks[b].radius)));
    let mut best = f64::INFINITY;
    for (pos, &i) in order.iter().enumerate() {
        let di = &disks[i];
        let right = di.center.re + di.radius;
        for &j in &order[pos + 1..] {
            let dj = &disks[j];
            if dj.center.re - dj.radius > right + best.max(0.0) {
                break;
            }
            best = best.min(di.gap(dj));
        }
    }
    best
}

impl DiskPacking {
    /// Largest amount by which a disk crosses the boundary of `(-1/2, 1/2)²`.
    pub fn boundary_excess(&self) -> f64 {
        self.disks
            .iter()
            .map(|d| d.center.re.abs().max(d.center.im.abs()) + d.radius - 0.5)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_gap(&self) -> f64 {
        min_pairwise_gap(&self.disks)
    }
}

/// The disks `B_m` with centres `√c θ z_m` and radii `√c θ² r_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledDisks {
    pub c: f64,
    pub n: usize,
    /// `(n/c)^{1/5}`.
    pub theta: f64,
    pub disks: Vec<Disk>,
    pub total_area: f64,
    /// Measured smallest gap between two disks.
    pub min_gap: f64,
    /// `2√c θ r_min (1 - θ)`.
    pub gap_bound: f64,
}

/// Scales a unit-square packing into the square of side `√c`.
pub fn scale_packing(p: &DiskPacking, c: f64, n: usize) -> Result<ScaledDisks> {
    if n == 0 || !(c > n as f64) {
        return Err(Error::pre("scale_packing", format!("need 1 <= n < c, got n = {n}, c = {c}")));
    }
    let theta = (n as f64 / c).powf(0.2);
    let s = c.sqrt();
    let disks: Vec<Disk> = p
        .disks
        .iter()
        .map(|d| Disk { center: d.center * (s * theta), radius: d.radius * s * theta * theta })
        .collect();
    let total_area: f64 = disks.iter().map(Disk::area).sum();
    if total_area < n as f64 * (1.0 - 1e-12) {
        return Err(Error::Geometry(format!(
            "scaled area {total_area:.6} is below n = {n}; the packing covers {:.6} < θ = {theta:.6}",
            p.coverage
        )));
    }
    let min_gap = if disks.len() > 1 { min_pairwise_gap(&disks) } else { f64::INFINITY };
    let gap_bound = 2.0 * s * theta * p.min_radius * (1.0 - theta);
    Ok(ScaledDisks { c, n, theta, disks, total_area, min_gap, gap_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_disk_level() {
        let p = pack_disks(0.25).unwrap();
        assert_eq!(p.disks.len(), 1);
        assert_eq!(p.disks[0].radius, 0.5);
        assert!((p.coverage - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn eps_range_enforced() {
        assert!(pack_disks(0.019).is_err());
        assert!(pack_disks(1.0).is_err());
    }

    #[test]
    fn packing_at_one_tenth() {
        let p = pack_disks(0.1).unwrap();
        assert!(p.coverage >= 0.9);
        assert!(p.min_radius >= 1e-3);
        assert!(p.min_gap() >= -1e-12);
        assert!(p.boundary_excess() <= 1e-15);
        let mc = &p.monte_carlo;
        assert!((mc.fraction - p.coverage).abs() <= 3.0 * mc.std_error, "{mc:?} vs {}", p.coverage);
    }

    #[test]
    fn theta_and_area() {
        let p = pack_disks(1.0 - 0.5f64.powf(0.2)).unwrap();
        let sd = scale_packing(&p, 100.0, 50).unwrap();
        assert!((sd.theta - 0.870_550_563_296_124).abs() < 1e-12);
        assert!(sd.total_area >= 50.0);
        assert!(sd.min_gap >= sd.gap_bound - 1e-12);
        let h = 0.5 * 10.0 * sd.theta;
        for d in &sd.disks {
            assert!(d.center.re.abs() + d.radius <= h + 1e-12);
            assert!(d.center.im.abs() + d.radius <= h + 1e-12);
        }
        assert!(scale_packing(&p, 50.0, 50).is_err());
    }
}

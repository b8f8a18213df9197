//! Dyadic Whitney grids of the frequency interval `[-c/2, c/2]`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridVariant {
    /// Trimmed bands, spacing just above 1; `|A| ≥ n` is the contract.
    Lower,
    /// Untrimmed bands; `|A| < n` is the contract.
    Upper,
}

impl GridVariant {
    pub fn name(self) -> &'static str {
        match self {
            GridVariant::Lower => "lower",
            GridVariant::Upper => "upper",
        }
    }
}

impl std::str::FromStr for GridVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lower" => Ok(GridVariant::Lower),
            "upper" => Ok(GridVariant::Upper),
            other => Err(format!("unknown grid variant `{other}`")),
        }
    }
}

/// How much is cut from each end of a band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trim {
    /// `c^e`.
    Power(f64),
    Fixed(f64),
}

impl Trim {
    pub fn length(self, c: f64) -> f64 {
        match self {
            Trim::Power(e) => c.powf(e),
            Trim::Fixed(t) => t,
        }
    }
}

/// Constants of the grid: `r = r_coeff (c-n)/log(2c/(c-n))`,
/// `γ_k = (1 - r 2^{k-gamma_shift}/c)^{-1}` and the band trim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhitneyParams {
    pub variant: GridVariant,
    pub r_coeff: f64,
    pub gamma_shift: i32,
    pub trim: Trim,
}

impl WhitneyParams {
    /// Constants usable for `c` in the hundreds.
    ///
    /// Lower: `r = (c-n)/(2 log(2c/(c-n)))`, `γ_k = (1 - r 2^{k-3}/c)^{-1}`,
    /// trim 1/2. Upper: `r = 2(c-n)/log(2c/(c-n))`, `γ_k` with shift 10,
    /// untrimmed.
    pub fn desk(variant: GridVariant) -> Self {
        match variant {
            GridVariant::Lower => WhitneyParams { variant, r_coeff: 0.5, gamma_shift: 3, trim: Trim::Fixed(0.5) },
            GridVariant::Upper => WhitneyParams { variant, r_coeff: 2.0, gamma_shift: 10, trim: Trim::Fixed(0.0) },
        }
    }

    /// The constants `0.01`, `2^{k-10}`, `c^{6/8}` and `10^{100}` of the
    /// asymptotic argument.
    pub fn asymptotic(variant: GridVariant) -> Self {
        match variant {
            GridVariant::Lower => WhitneyParams { variant, r_coeff: 0.01, gamma_shift: 10, trim: Trim::Power(0.75) },
            GridVariant::Upper => WhitneyParams { variant, r_coeff: 1e100, gamma_shift: 10, trim: Trim::Fixed(0.0) },
        }
    }

    /// Desk constants for the upper variant with `r_coeff = C`.
    pub fn upper_with(c_const: f64) -> Self {
        WhitneyParams { r_coeff: c_const, ..Self::desk(GridVariant::Upper) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    /// Signed index `±k`.
    pub k: i32,
    pub lo: f64,
    pub hi: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    /// Signed band index.
    pub band: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyGrid {
    pub c: f64,
    pub n: usize,
    pub params: WhitneyParams,
    pub r: f64,
    /// Depth: `2^l r ≤ c < 2^{l+1} r`.
    pub l: u32,
    pub trim: f64,
    /// `γ_1..γ_l`.
    pub gammas: Vec<f64>,
    /// `J_{-l}..J_{-1}, J_1..J_l` in increasing position.
    pub bands: Vec<Band>,
    /// Sorted by position; a point shared by two bands is kept once.
    pub points: Vec<GridPoint>,
    pub counting_holds: bool,
}

impl WhitneyGrid {
    /// Builds the grid without asserting the counting inequality.
    pub fn build(c: f64, n: usize, params: WhitneyParams) -> Result<Self> {
        if n == 0 || !(c > n as f64) {
            return Err(Error::pre("whitney_grid", format!("need 1 <= n < c, got n = {n}, c = {c}")));
        }
        let gap = c - n as f64;
        let r = params.r_coeff * gap / (2.0 * c / gap).ln();
        if !(r > 0.0 && r.is_finite()) || 2.0 * r > c {
            return Err(Error::pre(
                "whitney_grid",
                format!("r = {r:e} leaves no band (need 2r <= c = {c}); the constant is too large for this c"),
            ));
        }
        let l = (c / r).log2().floor() as u32;
        let trim = params.trim.length(c);
        let mut gammas = Vec::with_capacity(l as usize);
        for k in 1..=l as i32 {
            let q = 1.0 - r * 2f64.powi(k - params.gamma_shift) / c;
            if !(q > 0.0) {
                return Err(Error::pre("whitney_grid", format!("γ_{k} is undefined: 1 - r 2^(k-shift)/c = {q:e}")));
            }
            gammas.push(1.0 / q);
        }
        let mut bands = Vec::with_capacity(2 * l as usize);
        let mut pos = Vec::new();
        for k in 1..=l as i32 {
            let lo = 0.5 * c - c / 2f64.powi(k);
            let hi = 0.5 * c - c / 2f64.powi(k + 1);
            let g = gammas[k as usize - 1];
            bands.push(Band { k, lo, hi, gamma: g });
            let (a, b) = (lo + trim, hi - trim);
            if a > b {
                continue;
            }
            let first = (a / g - 1e-12).ceil() as i64;
            let last = (b / g + 1e-12).floor() as i64;
            for m in first..=last {
                pos.push(GridPoint { x: m as f64 * g, band: k });
            }
        }
        let mut points: Vec<GridPoint> = pos.iter().map(|p| GridPoint { x: -p.x, band: -p.band }).collect();
        points.extend(pos);
        points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.band.abs().cmp(&b.band.abs())));
        points.dedup_by(|b, a| (a.x - b.x).abs() < 1e-9);
        let mut all_bands: Vec<Band> = bands.iter().rev().map(|b| Band { k: -b.k, lo: -b.hi, hi: -b.lo, gamma: b.gamma }).collect();
        all_bands.extend(bands);
        let counting_holds = match params.variant {
            GridVariant::Lower => points.len() >= n,
            GridVariant::Upper => points.len() < n,
        };
        Ok(WhitneyGrid { c, n, params, r, l, trim, gammas, bands: all_bands, points, counting_holds })
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// `Σ_{k≤l} |A_k|` over the positive bands, each band counted separately.
    pub fn half_count(&self) -> usize {
        self.points.iter().filter(|p| p.band > 0).count()
    }

    /// Uncovered length `c/2^{l+1}` next to each endpoint of `[-c/2, c/2]`.
    pub fn edge_gap(&self) -> f64 {
        self.c / 2f64.powi(self.l as i32 + 1)
    }
}

/// [`WhitneyGrid::build`] with the desk constants, failing when the
/// counting inequality of the variant does not hold.
pub fn whitney_grid(c: f64, n: usize, variant: GridVariant) -> Result<WhitneyGrid> {
    whitney_grid_with(c, n, WhitneyParams::desk(variant))
}

pub fn whitney_grid_with(c: f64, n: usize, params: WhitneyParams) -> Result<WhitneyGrid> {
    let g = WhitneyGrid::build(c, n, params)?;
    if g.l == 0 {
        return Err(Error::pre("whitney_grid", "depth l = 0: no dyadic band fits"));
    }
    if !g.counting_holds {
        let rel = match params.variant {
            GridVariant::Lower => "<",
            GridVariant::Upper => ">=",
        };
        return Err(Error::pre(
            "whitney_grid",
            format!("{} counting fails: |A| = {} {rel} n = {n} at c = {c}", params.variant.name(), g.count()),
        ));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_and_first_gamma() {
        // r = 16 at c = 1024 from r_coeff chosen to hit it exactly
        let (c, n) = (1024.0, 896usize);
        let gap = c - n as f64;
        let coeff = 16.0 * (2.0 * c / gap).ln() / gap;
        let p = WhitneyParams { variant: GridVariant::Upper, r_coeff: coeff, gamma_shift: 10, trim: Trim::Fixed(0.0) };
        let g = WhitneyGrid::build(c, n, p).unwrap();
        assert!((g.r - 16.0).abs() < 1e-12);
        assert_eq!(g.l, 6);
        let want = 1.0 / (1.0 - 2f64.powi(-15));
        assert!((g.gammas[0] - want).abs() < 1e-15);
    }

    #[test]
    fn bands_tile() {
        let g = WhitneyGrid::build(512.0, 448, WhitneyParams::desk(GridVariant::Lower)).unwrap();
        let pos: Vec<&Band> = g.bands.iter().filter(|b| b.k > 0).collect();
        assert_eq!(pos[0].lo, 0.0);
        for w in pos.windows(2) {
            assert_eq!(w[0].hi, w[1].lo);
        }
        assert!((pos.last().unwrap().hi - (256.0 - g.edge_gap())).abs() < 1e-12);
        assert!(g.gammas.iter().all(|&x| x > 1.0));
        assert!(g.points.iter().all(|p| {
            let b = g.bands.iter().find(|b| b.k == p.band).unwrap();
            p.x >= b.lo + g.trim - 1e-9 && p.x <= b.hi - g.trim + 1e-9
        }));
    }

    #[test]
    fn rejects_oversized_constant() {
        assert!(whitney_grid_with(100.0, 90, WhitneyParams::asymptotic(GridVariant::Upper)).is_err());
        assert!(whitney_grid(100.0, 100, GridVariant::Lower).is_err());
    }
}

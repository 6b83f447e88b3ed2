//! Synthetic finite populations with a fixed attribute layout and a
//! seeded study variable.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::population::{FinitePopulation, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseShape {
    Normal,
    /// Uniform on `[-sqrt(3) sigma, sqrt(3) sigma]`, so the variance is `sigma^2`.
    Uniform,
}

/// `y = intercept + b1 phi1 + b2 phi2 + noise`, with attribute cells in
/// the order `(phi1, phi2) = 00, 01, 10, 11`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub population_size: usize,
    pub cells: [f64; 4],
    pub intercept: f64,
    pub b1: f64,
    pub b2: f64,
    pub sigma: f64,
    pub noise: NoiseShape,
    pub seed: u64,
}

const CELL_ATTRS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGeneratorSpec(m));
        if self.population_size < 2 {
            return bad(format!("N = {} must be at least 2", self.population_size));
        }
        if self.cells.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return bad(format!("cell probabilities {:?} must be nonnegative", self.cells));
        }
        let total: f64 = self.cells.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("cell probabilities sum to {total}, not 1"));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return bad(format!("sigma = {} must be nonnegative", self.sigma));
        }
        if ![self.intercept, self.b1, self.b2].iter().all(|v| v.is_finite()) {
            return bad("model coefficients must be finite".into());
        }
        Ok(())
    }

    /// Unit counts per cell by largest-remainder apportionment; ties go to
    /// the earlier cell.
    pub fn cell_counts(&self) -> [usize; 4] {
        let n = self.population_size;
        let quotas: Vec<f64> = self.cells.iter().map(|p| p * n as f64).collect();
        let mut counts = [0usize; 4];
        for (c, q) in counts.iter_mut().zip(&quotas) {
            *c = q.floor() as usize;
        }
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| (quotas[b] - quotas[b].floor()).total_cmp(&(quotas[a] - quotas[a].floor())).then(a.cmp(&b)));
        for &k in order.iter().take(n.saturating_sub(assigned)) {
            counts[k] += 1;
        }
        counts
    }
}

impl fmt::Display for NoiseShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseShape::Normal => "normal",
            NoiseShape::Uniform => "uniform",
        })
    }
}

/// Comma-separated `key=value` list. Keys: `N`, `p00`, `p01`, `p10`,
/// `p11`, `a`, `b1`, `b2`, `sigma`, `noise` (`normal`|`uniform`), `seed`.
/// `N` and the four cells are required; the rest default to
/// `a=0, b1=0, b2=0, sigma=1, noise=normal, seed=0`.
impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidGeneratorSpec(m);
        let mut n = None;
        let mut cells = [None; 4];
        let mut g = GeneratorSpec {
            population_size: 0,
            cells: [0.0; 4],
            intercept: 0.0,
            b1: 0.0,
            b2: 0.0,
            sigma: 1.0,
            noise: NoiseShape::Normal,
            seed: 0,
        };
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("`{item}` is not key=value")))?;
            let (k, v) = (k.trim(), v.trim());
            let num = || v.parse::<f64>().map_err(|_| bad(format!("`{k}` value `{v}` is not a number")));
            match k {
                "N" => n = Some(v.parse::<usize>().map_err(|_| bad(format!("`N` value `{v}` is not a count")))?),
                "p00" => cells[0] = Some(num()?),
                "p01" => cells[1] = Some(num()?),
                "p10" => cells[2] = Some(num()?),
                "p11" => cells[3] = Some(num()?),
                "a" => g.intercept = num()?,
                "b1" => g.b1 = num()?,
                "b2" => g.b2 = num()?,
                "sigma" => g.sigma = num()?,
                "noise" => {
                    g.noise = match v {
                        "normal" => NoiseShape::Normal,
                        "uniform" => NoiseShape::Uniform,
                        _ => return Err(bad(format!("unknown noise shape `{v}`"))),
                    }
                }
                "seed" => g.seed = v.parse().map_err(|_| bad(format!("`seed` value `{v}` is not a u64")))?,
                _ => return Err(bad(format!("unknown key `{k}`"))),
            }
        }
        g.population_size = n.ok_or_else(|| bad("missing `N`".into()))?;
        for (i, c) in cells.iter().enumerate() {
            g.cells[i] = c.ok_or_else(|| bad(format!("missing `p{}{}`", CELL_ATTRS[i].0, CELL_ATTRS[i].1)))?;
        }
        g.validate()?;
        Ok(g)
    }
}

/// Builds `N` units, cell by cell in the order 00, 01, 10, 11, and draws
/// the noise in unit order from a ChaCha8 stream seeded with `g.seed`.
pub fn generate_population(g: &GeneratorSpec) -> Result<FinitePopulation> {
    g.validate()?;
    let counts = g.cell_counts();
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut noise: Box<dyn FnMut(&mut ChaCha8Rng) -> f64> = if g.sigma == 0.0 {
        Box::new(|_| 0.0)
    } else {
        match g.noise {
            NoiseShape::Normal => {
                let d = Normal::new(0.0, g.sigma).map_err(|e| Error::InvalidGeneratorSpec(e.to_string()))?;
                Box::new(move |r| d.sample(r))
            }
            NoiseShape::Uniform => {
                let h = 3f64.sqrt() * g.sigma;
                let d = Uniform::new_inclusive(-h, h).map_err(|e| Error::InvalidGeneratorSpec(e.to_string()))?;
                Box::new(move |r| d.sample(r))
            }
        }
    };
    let mut units = Vec::with_capacity(g.population_size);
    for (&(a1, a2), &count) in CELL_ATTRS.iter().zip(&counts) {
        let mean = g.intercept + g.b1 * f64::from(a1) + g.b2 * f64::from(a2);
        for _ in 0..count {
            units.push(Unit::new(mean + noise(&mut rng), a1, a2));
        }
    }
    FinitePopulation::new(units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::summarize_population;

    fn spec(n: usize, cells: [f64; 4]) -> GeneratorSpec {
        GeneratorSpec { population_size: n, cells, intercept: 0.0, b1: 1.0, b2: 2.0, sigma: 0.0, noise: NoiseShape::Normal, seed: 7 }
    }

    #[test]
    fn noiseless_layout() {
        let pop = generate_population(&spec(4, [0.25; 4])).unwrap();
        let y: Vec<f64> = pop.units().iter().map(|u| u.y).collect();
        assert_eq!(y, [0.0, 2.0, 1.0, 3.0]);
        let s = summarize_population(&pop).unwrap();
        assert_eq!((s.p1, s.p2), (0.5, 0.5));
    }

    #[test]
    fn largest_remainder() {
        assert_eq!(spec(10, [0.25; 4]).cell_counts(), [3, 3, 2, 2]);
        assert_eq!(spec(7, [0.1, 0.2, 0.3, 0.4]).cell_counts(), [1, 1, 2, 3]);
        assert_eq!(spec(3, [0.0, 0.0, 0.0, 1.0]).cell_counts(), [0, 0, 0, 3]);
        for n in 2..40 {
            assert_eq!(spec(n, [0.13, 0.29, 0.31, 0.27]).cell_counts().iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn all_ones_cell_is_degenerate_downstream() {
        let mut g = spec(6, [0.0, 0.0, 0.0, 1.0]);
        g.sigma = 1.0;
        let pop = generate_population(&g).unwrap();
        assert!(pop.units().iter().all(|u| u.phi1 == 1 && u.phi2 == 1));
        assert!(matches!(summarize_population(&pop), Err(Error::DegeneratePopulation(_))));
    }

    #[test]
    fn seeded_and_reproducible() {
        let mut g = spec(50, [0.4, 0.1, 0.2, 0.3]);
        g.sigma = 2.0;
        let a = generate_population(&g).unwrap();
        assert_eq!(a, generate_population(&g).unwrap());
        g.seed += 1;
        assert_ne!(a, generate_population(&g).unwrap());
        g.noise = NoiseShape::Uniform;
        let h = 3f64.sqrt() * 2.0;
        let u = generate_population(&g).unwrap();
        assert!(u.units().iter().all(|u| {
            let mean = f64::from(u.phi1) + 2.0 * f64::from(u.phi2);
            (u.y - mean).abs() <= h
        }));
    }

    #[test]
    fn invalid_specs() {
        for cells in [[0.5, 0.5, 0.5, -0.5], [0.3, 0.3, 0.3, 0.3]] {
            assert!(matches!(generate_population(&spec(10, cells)), Err(Error::InvalidGeneratorSpec(_))));
        }
        let mut g = spec(10, [0.25; 4]);
        g.sigma = -1.0;
        assert!(matches!(g.validate(), Err(Error::InvalidGeneratorSpec(_))));
    }

    #[test]
    fn parse_key_values() {
        let g: GeneratorSpec = "N=100, p00=0.4,p01=0.1,p10=0.1,p11=0.4,a=5,b1=2,sigma=0.5,noise=uniform,seed=9".parse().unwrap();
        assert_eq!(g.population_size, 100);
        assert_eq!(g.cells, [0.4, 0.1, 0.1, 0.4]);
        assert_eq!((g.intercept, g.b1, g.b2, g.sigma, g.noise, g.seed), (5.0, 2.0, 0.0, 0.5, NoiseShape::Uniform, 9));
        for bad in ["p00=1", "N=10,p00=1,p01=0,p10=0", "N=10,p00=1,p01=0,p10=0,p11=0,color=red", "N=x"] {
            assert!(matches!(bad.parse::<GeneratorSpec>(), Err(Error::InvalidGeneratorSpec(_))), "{bad}");
        }
    }
}

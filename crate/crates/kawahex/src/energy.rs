//! Physical parameters, the Hamiltonian and the critical constants.
//!
//! Energies are integers counted in units of a grid step (by default U/100),
//! so level-set comparisons are exact. The inverse temperature β only enters
//! through floating-point Boltzmann weights.

use serde::{Deserialize, Serialize};

use crate::config::{interior_bond_count, occupied_interior_neighbors, Configuration};
use crate::dynamics::Move;
use crate::error::{Error, Result};
use crate::hexlattice::HexLattice;

/// Energy in grid units.
pub type Energy = i64;

/// Number of grid steps per unit of U used when no grid is given.
pub const DEFAULT_GRID_STEPS: f64 = 100.0;

/// Largest lattice (in sites) for which the partition function is enumerated.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Binding energy U in grid units.
    pub u: Energy,
    /// Activation energy Δ in grid units.
    pub delta: Energy,
    /// Size of one grid unit in physical energy units.
    pub grid: f64,
    /// Inverse temperature.
    pub beta: f64,
}

fn on_grid(name: &'static str, value: f64, grid: f64) -> Result<Energy> {
    let steps = value / grid;
    let rounded = steps.round();
    if !steps.is_finite() || (steps - rounded).abs() > 1e-6 * rounded.abs().max(1.0) {
        return Err(Error::GridTooCoarse { name, value, grid });
    }
    Ok(rounded as Energy)
}

impl Params {
    /// Parameters on the default grid U/100.
    pub fn new(u: f64, delta: f64, beta: f64) -> Result<Params> {
        Self::with_grid(u, delta, beta, u / DEFAULT_GRID_STEPS)
    }

    pub fn with_grid(u: f64, delta: f64, beta: f64, grid: f64) -> Result<Params> {
        if !grid.is_finite() || grid <= 0.0 {
            return Err(Error::GridTooCoarse {
                name: "grid",
                value: grid,
                grid,
            });
        }
        if u.is_nan() || u <= 0.0 {
            return Err(Error::Regime(format!("U must be positive, got {u}")));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::Regime(format!("beta must be finite and non-negative, got {beta}")));
        }
        Ok(Params {
            u: on_grid("U", u, grid)?,
            delta: on_grid("Delta", delta, grid)?,
            grid,
            beta,
        })
    }

    /// U = 1, Δ = 1.36: the low-δ branch.
    pub fn p1(beta: f64) -> Params {
        Params::new(1.0, 1.36, beta).expect("valid parameters")
    }

    /// U = 1, Δ = 1.39: the high-δ branch.
    pub fn p2(beta: f64) -> Params {
        Params::new(1.0, 1.39, beta).expect("valid parameters")
    }

    /// Reads `key = value` lines with keys `U`, `Delta`, `beta` and `grid`.
    /// `#` starts a comment. Missing keys default to U = 1, Δ = 1.36, β = 1
    /// and a grid of U/100.
    pub fn parse_text(text: &str) -> Result<Params> {
        let (mut u, mut delta, mut beta, mut grid) = (1.0, 1.36, 1.0, None);
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse {
                what: "params line",
                input: line.to_string(),
            };
            let (k, v) = line.split_once('=').ok_or_else(bad)?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            match k.trim() {
                "U" => u = v,
                "Delta" => delta = v,
                "beta" => beta = v,
                "grid" => grid = Some(v),
                _ => return Err(bad()),
            }
        }
        match grid {
            Some(g) => Params::with_grid(u, delta, beta, g),
            None => Params::new(u, delta, beta),
        }
    }

    pub fn with_beta(&self, beta: f64) -> Params {
        Params { beta, ..*self }
    }

    /// Converts grid units to physical energy.
    pub fn value(&self, e: Energy) -> f64 {
        e as f64 * self.grid
    }

    /// Converts a physical energy to grid units, failing if it is off-grid.
    pub fn units(&self, x: f64) -> Result<Energy> {
        on_grid("energy", x, self.grid)
    }

    pub fn u_value(&self) -> f64 {
        self.value(self.u)
    }

    pub fn delta_value(&self) -> f64 {
        self.value(self.delta)
    }

    /// Reservoir density ρ = e^{−βΔ}.
    pub fn rho(&self) -> f64 {
        (-self.beta * self.delta_value()).exp()
    }

    /// Boltzmann factor e^{−β e} for an energy in grid units.
    pub fn boltzmann(&self, e: Energy) -> f64 {
        (-self.beta * self.value(e)).exp()
    }

    /// H for a configuration with `particles` particles and `bonds` occupied interior bonds.
    pub fn energy_of(&self, particles: i64, bonds: i64) -> Energy {
        self.delta * particles - self.u * bonds
    }
}

/// H(η) = −U·(occupied interior bonds) + Δ·(particles in Λ).
pub fn hamiltonian(lat: &HexLattice, cfg: &Configuration, p: &Params) -> Energy {
    p.energy_of(cfg.count() as i64, interior_bond_count(lat, cfg) as i64)
}

/// H(T η) − H(η) for a single move, without applying it.
pub fn delta_energy(lat: &HexLattice, cfg: &Configuration, mv: &Move, p: &Params) -> Result<Energy> {
    let bad = |msg: &str| Error::InapplicableMove(format!("{mv:?}: {msg}"));
    let check = |x: usize| if x < lat.num_sites() { Ok(()) } else { Err(Error::UnknownSite(x)) };
    match *mv {
        Move::Create(y) => {
            check(y)?;
            if lat.is_interior(y) {
                return Err(bad("creation only happens on the inner boundary"));
            }
            if cfg.get(y) {
                return Err(bad("target occupied"));
            }
            Ok(p.delta)
        }
        Move::Annihilate(x) => {
            check(x)?;
            if lat.is_interior(x) {
                return Err(bad("annihilation only happens on the inner boundary"));
            }
            if !cfg.get(x) {
                return Err(bad("source empty"));
            }
            Ok(-p.delta)
        }
        Move::Hop { from, to } => {
            check(from)?;
            check(to)?;
            if !lat.site_neighbors(from).any(|y| y == to) {
                return Err(bad("sites are not nearest neighbours"));
            }
            if !cfg.get(from) || cfg.get(to) {
                return Err(bad("hop needs an occupied source and an empty target"));
            }
            let lost = if lat.is_interior(from) {
                occupied_interior_neighbors(lat, cfg, from)
            } else {
                0
            };
            let gained = if lat.is_interior(to) {
                occupied_interior_neighbors(lat, cfg, to) - usize::from(lat.is_interior(from))
            } else {
                0
            };
            Ok(p.u * (lost as i64 - gained as i64))
        }
    }
}

/// Unnormalised Gibbs weight e^{−βH(η)}.
pub fn gibbs(lat: &HexLattice, cfg: &Configuration, p: &Params) -> f64 {
    p.boltzmann(hamiltonian(lat, cfg, p))
}

/// Z_β = Σ_η e^{−βH(η)}, by exhaustive enumeration.
pub fn partition_function(lat: &HexLattice, p: &Params) -> Result<f64> {
    let n = lat.num_sites();
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            sites: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(enumerate_all(lat).map(|c| gibbs(lat, &c, p)).sum())
}

/// Every configuration of a small lattice, in increasing bitmap order.
pub fn enumerate_all(lat: &HexLattice) -> impl Iterator<Item = Configuration> + '_ {
    let n = lat.num_sites();
    assert!(n <= 63, "exhaustive enumeration needs at most 63 sites");
    (0u64..(1u64 << n)).map(move |w| Configuration::from_words(n, &[w]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// δ ∈ (0, ½)
    Low,
    /// δ ∈ (½, 1)
    High,
}

/// Critical radius, branch, energy barrier and critical area.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalQuantities {
    pub r_star: i64,
    /// δ as the exact fraction `delta_num / delta_den`.
    pub delta_num: i64,
    pub delta_den: i64,
    pub delta: f64,
    pub branch: Branch,
    /// Γ in grid units.
    pub gamma: Energy,
    pub a_star: usize,
    /// A*₃ = 6(r*+2)² + 3, whose standard droplet carries the supercritical maximum.
    pub a3_star: usize,
    /// V* = Δ + U in grid units.
    pub v_star: Energy,
    /// Saddle radius r̄ = U/(2(3U − 2Δ)) of the static heuristic.
    pub r_bar: f64,
}

/// Report of a regime check; errors are returned separately.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub warnings: Vec<String>,
}

/// Hard-fails outside U < Δ < 3U/2 and on degenerate δ; warns when
/// 3U − 2Δ exceeds U/100.
pub fn validate_regime(p: &Params) -> Result<RegimeReport> {
    if p.delta <= p.u {
        return Err(Error::Regime(format!("need Delta > U, got U={} Delta={}", p.u_value(), p.delta_value())));
    }
    if 2 * p.delta >= 3 * p.u {
        return Err(Error::Regime(format!(
            "need Delta < 3U/2, got U={} Delta={}",
            p.u_value(),
            p.delta_value()
        )));
    }
    let num = p.delta - p.u;
    let den = 3 * p.u - 2 * p.delta;
    let rem = num.rem_euclid(den);
    if rem == 0 {
        return Err(Error::Degenerate(format!("U/(2(3U-2Delta)) - 1/2 = {} is an integer", num / den)));
    }
    if 2 * rem == den {
        return Err(Error::Degenerate("fractional part delta equals 1/2".into()));
    }
    let mut report = RegimeReport::default();
    if num < den {
        report.warnings.push("r* = 0: the closed-form droplet energies assume r >= 1".into());
    }
    if 100 * den > p.u {
        report.warnings.push(format!(
            "3U - 2Delta = {} exceeds U/100; asymptotic statements are only approximate at this scale",
            p.value(den)
        ));
    }
    Ok(report)
}

/// H(E(r)) = −3(3r² − r)U + 6r²Δ.
pub fn regular_hexagon_energy(r: i64, p: &Params) -> Energy {
    -3 * (3 * r * r - r) * p.u + 6 * r * r * p.delta
}

/// Γ*₁ = H(E(r)) + 5(2r+1)Δ − (15r+4)U + Δ.
pub fn gamma_low(r: i64, p: &Params) -> Energy {
    regular_hexagon_energy(r, p) + 5 * (2 * r + 1) * p.delta - (15 * r + 4) * p.u + p.delta
}

/// Γ*₂ = H(E(r+1)) + (2r+3)Δ − 3(r+1)U + Δ.
pub fn gamma_high(r: i64, p: &Params) -> Energy {
    regular_hexagon_energy(r + 1, p) + (2 * r + 3) * p.delta - 3 * (r + 1) * p.u + p.delta
}

pub fn critical_quantities(p: &Params) -> Result<CriticalQuantities> {
    validate_regime(p)?;
    let num = p.delta - p.u;
    let den = 3 * p.u - 2 * p.delta;
    let r = num.div_euclid(den);
    let rem = num.rem_euclid(den);
    let branch = if 2 * rem < den { Branch::Low } else { Branch::High };
    let (gamma, a_star) = match branch {
        Branch::Low => (gamma_low(r, p), (6 * r * r + 10 * r + 6) as usize),
        Branch::High => {
            let s = r + 1;
            (gamma_high(r, p), (6 * s * s + 2 * s + 2) as usize)
        }
    };
    Ok(CriticalQuantities {
        r_star: r,
        delta_num: rem,
        delta_den: den,
        delta: rem as f64 / den as f64,
        branch,
        gamma,
        a_star,
        a3_star: (6 * (r + 2) * (r + 2) + 3) as usize,
        v_star: p.delta + p.u,
        r_bar: p.u as f64 / (2.0 * den as f64),
    })
}

/// Exponent −β[6r²Δ + 3(r − 3r²)U] of the restricted-ensemble heuristic at
/// radius `r`, and its saddle radius r̄.
pub fn static_heuristic(r: f64, p: &Params) -> (f64, f64) {
    let (u, d) = (p.u_value(), p.delta_value());
    let exponent = -p.beta * (6.0 * r * r * d + 3.0 * (r - 3.0 * r * r) * u);
    let r_bar = u / (2.0 * (3.0 * u - 2.0 * d));
    (exponent, r_bar)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_unrepresentable_values() {
        assert!(Params::with_grid(1.0, 1.365, 1.0, 0.01).is_err());
        assert!(Params::with_grid(1.0, 1.365, 1.0, 0.005).is_ok());
    }

    #[test]
    fn regime_errors() {
        assert!(matches!(validate_regime(&Params::new(1.0, 0.9, 1.0).unwrap()), Err(Error::Regime(_))));
        assert!(matches!(validate_regime(&Params::new(1.0, 1.6, 1.0).unwrap()), Err(Error::Regime(_))));
        assert!(matches!(
            critical_quantities(&Params::new(1.0, 1.40, 1.0).unwrap()),
            Err(Error::Degenerate(_))
        ));
        let report = validate_regime(&Params::p1(1.0)).unwrap();
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn half_fraction_is_degenerate() {
        // (Delta - U)/(3U - 2Delta) = 0.375/0.25 = 1.5
        let p = Params::with_grid(1.0, 1.375, 1.0, 0.005).unwrap();
        assert!(matches!(critical_quantities(&p), Err(Error::Degenerate(_))));
    }
}

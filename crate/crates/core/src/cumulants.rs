//! Moment-cumulant transforms for the free, boolean, monotone and
//! conditionally free families, conversions between cumulant families, and
//! the additive convolutions they linearize.
//!
//! With `Φ` the character of a state, `Φ = exp*(ρ) = E≺(κ) = E≻(β)`, where
//! `ρ`, `κ`, `β` are its monotone, free and boolean cumulants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::functionals::{CumulantTable, MomentTable};
use crate::series::{self, GroupElement, LieElement};
use crate::words::Domain;
use crate::{Error, Functional, Result};

/// The three single-state cumulant families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CumulantKind {
    Free,
    Boolean,
    Monotone,
}

impl CumulantKind {
    pub const ALL: [CumulantKind; 3] = [CumulantKind::Free, CumulantKind::Boolean, CumulantKind::Monotone];

    pub fn name(self) -> &'static str {
        match self {
            CumulantKind::Free => "free",
            CumulantKind::Boolean => "boolean",
            CumulantKind::Monotone => "monotone",
        }
    }
}

impl fmt::Display for CumulantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CumulantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CumulantKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Mismatch(format!("unknown cumulant family {s:?}")))
    }
}

/// A cumulant table tagged with its family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CumulantFamily {
    pub kind: CumulantKind,
    pub table: CumulantTable,
}

impl CumulantFamily {
    pub fn of(phi: &MomentTable, kind: CumulantKind) -> Result<Self> {
        Ok(CumulantFamily { kind, table: cumulants(phi, kind)? })
    }

    pub fn moments(&self) -> Result<MomentTable> {
        moments(&self.table, self.kind)
    }

    pub fn convert(&self, to: CumulantKind) -> Result<Self> {
        Ok(CumulantFamily { kind: to, table: convert(&self.table, self.kind, to)? })
    }
}

/// A pair of states `(φ, ψ)` on the same words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatePair {
    phi: MomentTable,
    psi: MomentTable,
}

#[derive(Deserialize)]
struct StatePairRepr {
    phi: MomentTable,
    psi: MomentTable,
}

impl<'de> Deserialize<'de> for StatePair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = StatePairRepr::deserialize(deserializer)?;
        StatePair::new(repr.phi, repr.psi).map_err(serde::de::Error::custom)
    }
}

impl StatePair {
    pub fn new(phi: MomentTable, psi: MomentTable) -> Result<Self> {
        same_domain(phi.domain(), psi.domain())?;
        Ok(StatePair { phi, psi })
    }

    pub fn phi(&self) -> &MomentTable {
        &self.phi
    }

    pub fn psi(&self) -> &MomentTable {
        &self.psi
    }

    pub fn domain(&self) -> &Domain {
        self.phi.domain()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state pairs serialize")
    }
}

fn same_domain(a: &Domain, b: &Domain) -> Result<()> {
    if a != b {
        return Err(Error::Mismatch(format!(
            "domains differ: {:?} up to {} and {:?} up to {}",
            a.alphabet(),
            a.max_len(),
            b.alphabet(),
            b.max_len()
        )));
    }
    Ok(())
}

fn state(phi: &MomentTable) -> GroupElement {
    GroupElement::from_table(phi)
}

fn lie(t: &CumulantTable) -> LieElement {
    LieElement::from_table(t)
}

/// `κ = L≺(Φ)`.
pub fn free_cumulants(phi: &MomentTable) -> Result<CumulantTable> {
    series::log_left(&state(phi)).materialize(phi.domain())
}

/// `β = L≻(Φ)`.
pub fn boolean_cumulants(phi: &MomentTable) -> Result<CumulantTable> {
    series::log_right(&state(phi)).materialize(phi.domain())
}

/// `ρ = log*(Φ)`.
pub fn monotone_cumulants(phi: &MomentTable) -> Result<CumulantTable> {
    series::log_conv(&state(phi)).materialize(phi.domain())
}

/// `Φ = E≺(κ)`.
pub fn moments_from_free(kappa: &CumulantTable) -> Result<MomentTable> {
    series::exp_left(&lie(kappa)).materialize(kappa.domain())
}

/// `Φ = E≻(β)`.
pub fn moments_from_boolean(beta: &CumulantTable) -> Result<MomentTable> {
    series::exp_right(&lie(beta)).materialize(beta.domain())
}

/// `Φ = exp*(ρ)`.
pub fn moments_from_monotone(rho: &CumulantTable) -> Result<MomentTable> {
    series::exp_conv(&lie(rho)).materialize(rho.domain())
}

pub fn cumulants(phi: &MomentTable, kind: CumulantKind) -> Result<CumulantTable> {
    match kind {
        CumulantKind::Free => free_cumulants(phi),
        CumulantKind::Boolean => boolean_cumulants(phi),
        CumulantKind::Monotone => monotone_cumulants(phi),
    }
}

pub fn moments(table: &CumulantTable, kind: CumulantKind) -> Result<MomentTable> {
    match kind {
        CumulantKind::Free => moments_from_free(table),
        CumulantKind::Boolean => moments_from_boolean(table),
        CumulantKind::Monotone => moments_from_monotone(table),
    }
}

/// The Lie-side conversion between families, without passing through
/// moments: `κ = W′(ρ)`, `β = −W′(−ρ)`, `β = Φ^{*−1} ≻ κ ≺ Φ` with
/// `Φ = E≺(κ)`, `κ = Φ ≻ β ≺ Φ^{*−1}` with `Φ = E≻(β)`, and the inverses
/// `ρ = Ω′(κ) = −Ω′(−β)`.
pub fn convert_lie(x: &LieElement, from: CumulantKind, to: CumulantKind) -> LieElement {
    use CumulantKind::*;
    match (from, to) {
        (a, b) if a == b => x.clone(),
        (Monotone, Free) => series::magnus_inverse(x),
        (Monotone, Boolean) => series::magnus_inverse(&x.neg()).neg(),
        (Free, Monotone) => series::magnus(x),
        (Boolean, Monotone) => series::magnus(&x.neg()).neg(),
        (Free, Boolean) => {
            let phi = series::exp_left(x).functional().clone();
            LieElement::wrap(phi.inverse().half_right(&x.functional().half_left(&phi)))
        }
        (Boolean, Free) => {
            let phi = series::exp_right(x).functional().clone();
            LieElement::wrap(phi.half_right(&x.functional().half_left(&phi.inverse())))
        }
        _ => unreachable!("all ordered pairs are covered"),
    }
}

pub fn convert(table: &CumulantTable, from: CumulantKind, to: CumulantKind) -> Result<CumulantTable> {
    convert_lie(&lie(table), from, to).materialize(table.domain())
}

/// `R = Ψ ≻ L≻(Φ) ≺ Ψ^{*−1}` as a functional.
pub fn cfree_functional(pair: &StatePair) -> LieElement {
    let phi = Functional::character(&pair.phi);
    let psi = Functional::character(&pair.psi);
    let beta = phi.inverse().half_right(&phi.sub(&Functional::unit()));
    LieElement::wrap(psi.half_right(&beta.half_left(&psi.inverse())))
}

/// The conditionally free cumulants `R` of `(φ, ψ)`.
pub fn cfree_cumulants(pair: &StatePair) -> Result<CumulantTable> {
    cfree_functional(pair).materialize(pair.domain())
}

/// `Φ = E≻(Ψ^{*−1} ≻ R ≺ Ψ)`, inverse to [`cfree_cumulants`] for fixed `Ψ`.
pub fn moments_from_cfree(r: &CumulantTable, psi: &MomentTable) -> Result<MomentTable> {
    same_domain(r.domain(), psi.domain())?;
    let psi_f = Functional::character(psi);
    let conjugated = psi_f.inverse().half_right(&Functional::infinitesimal(r).half_left(&psi_f));
    series::exp_right(&LieElement::wrap(conjugated)).materialize(r.domain())
}

/// `Φ` as the solution of the `≺`-side equation
/// `Φ = e + ((Φ * Ψ^{*−1}) ≻ R ≺ (Φ * Ψ^{*−1})^{*−1}) ≺ Φ`.
pub fn moments_from_cfree_left(r: &CumulantTable, psi: &MomentTable) -> Result<MomentTable> {
    same_domain(r.domain(), psi.domain())?;
    let psi_inv = Functional::character(psi).inverse();
    let r = Functional::infinitesimal(r);
    let phi = Functional::fixed_point(|phi| {
        let twist = phi.conv(&psi_inv);
        let inner = twist.half_right(&r.half_left(&twist.inverse()));
        Functional::unit().add(&inner.half_left(phi))
    });
    phi.materialize(psi.domain()).map(MomentTable::new)
}

pub fn convolve_free(phi1: &MomentTable, phi2: &MomentTable) -> Result<MomentTable> {
    same_domain(phi1.domain(), phi2.domain())?;
    moments_from_free(&free_cumulants(phi1)?.add(&free_cumulants(phi2)?)?)
}

pub fn convolve_boolean(phi1: &MomentTable, phi2: &MomentTable) -> Result<MomentTable> {
    same_domain(phi1.domain(), phi2.domain())?;
    moments_from_boolean(&boolean_cumulants(phi1)?.add(&boolean_cumulants(phi2)?)?)
}

/// `Φ1 * Φ2`.
pub fn convolve_monotone(phi1: &MomentTable, phi2: &MomentTable) -> Result<MomentTable> {
    same_domain(phi1.domain(), phi2.domain())?;
    state(phi1).conv(&state(phi2)).materialize(phi1.domain())
}

/// The pair with `κ′ = κ′₁ + κ′₂` and `R = R₁ + R₂`.
pub fn convolve_cfree(p1: &StatePair, p2: &StatePair) -> Result<StatePair> {
    same_domain(p1.domain(), p2.domain())?;
    let psi = convolve_free(&p1.psi, &p2.psi)?;
    let r = cfree_cumulants(p1)?.add(&cfree_cumulants(p2)?)?;
    let phi = moments_from_cfree(&r, &psi)?;
    StatePair::new(phi, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::words::{Alphabet, Word};
    use crate::Scalar;

    fn univariate(moments: &[(i64, i64)]) -> MomentTable {
        let d = Domain::univariate("a", moments.len()).unwrap();
        MomentTable::from_fn(&d, |w| ratio(moments[w.len() - 1].0, moments[w.len() - 1].1))
    }

    fn word(n: usize) -> Word {
        Word::parse(&vec!["a"; n].join(".")).unwrap()
    }

    #[test]
    fn low_degree_cumulants() {
        let phi = univariate(&[(2, 3), (5, 4)]);
        let (m1, m2) = (ratio(2, 3), ratio(5, 4));
        for kind in CumulantKind::ALL {
            let t = cumulants(&phi, kind).unwrap();
            assert_eq!(t.get(&word(1)).unwrap(), &m1);
            assert_eq!(t.get(&word(2)).unwrap(), &(&m2 - &m1 * &m1));
        }
    }

    #[test]
    fn semicircle_and_unit_state() {
        let phi = univariate(&[(0, 1), (1, 1), (0, 1), (2, 1), (0, 1), (5, 1)]);
        let kappa = free_cumulants(&phi).unwrap();
        for n in 1..=6 {
            let expected = if n == 2 { ratio(1, 1) } else { ratio(0, 1) };
            assert_eq!(kappa.get(&word(n)).unwrap(), &expected);
        }
        let d = phi.domain().clone();
        for kind in CumulantKind::ALL {
            assert_eq!(moments(&CumulantTable::zero(&d), kind).unwrap(), MomentTable::unit_state(&d));
        }
    }

    #[test]
    fn round_trips_and_conversions() {
        let d = Domain::new(Alphabet::new(&["a", "b"]).unwrap(), 4).unwrap();
        let phi = MomentTable::from_fn(&d, |w| {
            let s: i64 = w.letters().iter().map(|l| l.name().len() as i64 + w.len() as i64).sum();
            ratio(s % 5 - 2, (w.len() as i64) + 1)
        });
        let tables: Vec<_> = CumulantKind::ALL.iter().map(|&k| cumulants(&phi, k).unwrap()).collect();
        for (i, &from) in CumulantKind::ALL.iter().enumerate() {
            assert_eq!(moments(&tables[i], from).unwrap(), phi);
            for (j, &to) in CumulantKind::ALL.iter().enumerate() {
                assert_eq!(convert(&tables[i], from, to).unwrap(), tables[j], "{from} -> {to}");
            }
        }
    }

    #[test]
    fn cfree_degenerations() {
        let phi = univariate(&[(1, 2), (2, 3), (-1, 4), (3, 5)]);
        let d = phi.domain().clone();
        let unit = StatePair::new(phi.clone(), MomentTable::unit_state(&d)).unwrap();
        assert_eq!(cfree_cumulants(&unit).unwrap(), boolean_cumulants(&phi).unwrap());
        let same = StatePair::new(phi.clone(), phi.clone()).unwrap();
        assert_eq!(cfree_cumulants(&same).unwrap(), free_cumulants(&phi).unwrap());
    }

    #[test]
    fn cfree_round_trip_both_routes() {
        let phi = univariate(&[(1, 2), (2, 3), (-1, 4), (3, 5)]);
        let psi = univariate(&[(-1, 3), (1, 1), (2, 7), (0, 1)]);
        let pair = StatePair::new(phi.clone(), psi.clone()).unwrap();
        let r = cfree_cumulants(&pair).unwrap();
        assert_eq!(moments_from_cfree(&r, &psi).unwrap(), phi);
        assert_eq!(moments_from_cfree_left(&r, &psi).unwrap(), phi);
        let zero = CumulantTable::zero(phi.domain());
        assert_eq!(moments_from_cfree(&zero, &psi).unwrap(), MomentTable::unit_state(phi.domain()));
    }

    #[test]
    fn state_pair_json_and_mismatch() {
        let phi = univariate(&[(1, 2), (2, 3)]);
        let pair = StatePair::new(phi.clone(), phi.clone()).unwrap();
        let text = pair.to_json();
        assert_eq!(StatePair::from_json(&text).unwrap(), pair);
        let short = univariate(&[(1, 2)]);
        assert!(matches!(StatePair::new(phi.clone(), short.clone()), Err(Error::Mismatch(_))));
        assert!(matches!(convolve_free(&phi, &short), Err(Error::Mismatch(_))));
    }

    #[test]
    fn convolutions_with_unit_state() {
        let phi = univariate(&[(1, 2), (2, 3), (-1, 4)]);
        let unit = MomentTable::unit_state(phi.domain());
        assert_eq!(convolve_free(&phi, &unit).unwrap(), phi);
        assert_eq!(convolve_boolean(&phi, &unit).unwrap(), phi);
        assert_eq!(convolve_monotone(&phi, &unit).unwrap(), phi);
        // free convolution of two semicircles is a semicircle of variance 2
        let semi = univariate(&[(0, 1), (1, 1), (0, 1), (2, 1)]);
        let sum = convolve_free(&semi, &semi).unwrap();
        let m4: &Scalar = sum.get(&word(4)).unwrap();
        assert_eq!(m4, &ratio(8, 1));
    }
}

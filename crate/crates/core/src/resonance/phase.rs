use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dispersion::{DispersionRelation, DispersionSystem};
use crate::error::{invalid, Error, Result};
use crate::vec2::Vec2;

/// Conjugation sign of an input slot: `+` keeps `f`, `−` uses `f̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `(ε₁, ε₂)`, written `"++"`, `"+-"`, `"-+"` or `"--"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignPair(pub Sign, pub Sign);

impl SignPair {
    pub const PP: SignPair = SignPair(Sign::Plus, Sign::Plus);
    pub const PM: SignPair = SignPair(Sign::Plus, Sign::Minus);
    pub const MP: SignPair = SignPair(Sign::Minus, Sign::Plus);
    pub const MM: SignPair = SignPair(Sign::Minus, Sign::Minus);
}

impl fmt::Display for SignPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0.symbol(), self.1.symbol())
    }
}

impl FromStr for SignPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sign = |c| match c {
            '+' => Ok(Sign::Plus),
            '-' | '−' => Ok(Sign::Minus),
            other => Err(invalid(format!("bad sign character {other:?}"))),
        };
        let chars: Vec<char> = s.trim().chars().collect();
        match chars.as_slice() {
            [a, b] => Ok(SignPair(sign(*a)?, sign(*b)?)),
            _ => Err(invalid(format!("sign pair must have two characters, got {s:?}"))),
        }
    }
}

impl Serialize for SignPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignPair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `φ(ξ,η) = P_i(ξ) − ε₁P_j(η) − ε₂P_k(ξ−η)` for one quadratic interaction.
#[derive(Debug, Clone)]
pub struct Phase {
    system: DispersionSystem,
    out: usize,
    in1: usize,
    in2: usize,
    signs: SignPair,
}

/// Phase value with its η- and ξ-gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseJet {
    pub phi: f64,
    pub grad_eta: Vec2,
    pub grad_xi: Vec2,
}

/// Indices are 1-based, as in `P_i`, `P_j`, `P_k`.
pub fn make_phase(
    system: &DispersionSystem,
    i: usize,
    j: usize,
    k: usize,
    eps1: Sign,
    eps2: Sign,
) -> Result<Phase> {
    Phase::new(system.clone(), i, j, k, SignPair(eps1, eps2))
}

pub fn phase_jet(phase: &Phase, xi: Vec2, eta: Vec2) -> Result<PhaseJet> {
    phase.jet(xi, eta)
}

impl Phase {
    pub fn new(system: DispersionSystem, i: usize, j: usize, k: usize, signs: SignPair) -> Result<Self> {
        let n = system.len();
        for (name, idx) in [("i", i), ("j", j), ("k", k)] {
            if idx == 0 || idx > n {
                return Err(invalid(format!("component index {name} = {idx} outside 1..={n}")));
            }
        }
        Ok(Phase {
            system,
            out: i - 1,
            in1: j - 1,
            in2: k - 1,
            signs,
        })
    }

    /// Scalar equation: all three slots use the same relation.
    pub fn scalar(rel: DispersionRelation, signs: SignPair) -> Self {
        Phase {
            system: DispersionSystem::scalar(rel),
            out: 0,
            in1: 0,
            in2: 0,
            signs,
        }
    }

    pub fn system(&self) -> &DispersionSystem {
        &self.system
    }

    pub fn signs(&self) -> SignPair {
        self.signs
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    /// 1-based `(i, j, k)`.
    pub fn indices(&self) -> (usize, usize, usize) {
        (self.out + 1, self.in1 + 1, self.in2 + 1)
    }

    pub fn out_relation(&self) -> &DispersionRelation {
        &self.system.components()[self.out]
    }

    pub fn first_relation(&self) -> &DispersionRelation {
        &self.system.components()[self.in1]
    }

    pub fn second_relation(&self) -> &DispersionRelation {
        &self.system.components()[self.in2]
    }

    /// The same interaction with the two input slots exchanged; its value at
    /// `(ξ, ξ−η)` equals this phase at `(ξ, η)`.
    pub fn swapped(&self) -> Phase {
        Phase {
            system: self.system.clone(),
            out: self.out,
            in1: self.in2,
            in2: self.in1,
            signs: SignPair(self.signs.1, self.signs.0),
        }
    }

    pub fn value(&self, xi: Vec2, eta: Vec2) -> f64 {
        let (e1, e2) = (self.signs.0.value(), self.signs.1.value());
        // the input terms are summed first so that swapping them is exact
        self.out_relation().value(xi)
            - (e1 * self.first_relation().value(eta) + e2 * self.second_relation().value(xi - eta))
    }

    /// `∂_η φ = −ε₁∇P_j(η) + ε₂∇P_k(ξ−η)`.
    pub fn grad_eta(&self, xi: Vec2, eta: Vec2) -> Result<Vec2> {
        let (e1, e2) = (self.signs.0.value(), self.signs.1.value());
        let gj = self.first_relation().gradient(eta)?;
        let gk = self.second_relation().gradient(xi - eta)?;
        Ok(gk * e2 - gj * e1)
    }

    /// `∂_ξ φ = ∇P_i(ξ) − ε₂∇P_k(ξ−η)`.
    pub fn grad_xi(&self, xi: Vec2, eta: Vec2) -> Result<Vec2> {
        let e2 = self.signs.1.value();
        let gi = self.out_relation().gradient(xi)?;
        let gk = self.second_relation().gradient(xi - eta)?;
        Ok(gi - gk * e2)
    }

    pub fn jet(&self, xi: Vec2, eta: Vec2) -> Result<PhaseJet> {
        Ok(PhaseJet {
            phi: self.value(xi, eta),
            grad_eta: self.grad_eta(xi, eta)?,
            grad_xi: self.grad_xi(xi, eta)?,
        })
    }

    /// `∂_η φ`, or `None` when either input frequency lies within `mask` of
    /// the origin of a symbol that is singular there.
    pub(crate) fn grad_eta_masked(&self, xi: Vec2, eta: Vec2, mask: f64) -> Option<Vec2> {
        if near_singular(self.first_relation(), eta, mask)
            || near_singular(self.second_relation(), xi - eta, mask)
        {
            return None;
        }
        self.grad_eta(xi, eta).ok()
    }

    pub(crate) fn grad_xi_masked(&self, xi: Vec2, eta: Vec2, mask: f64) -> Option<Vec2> {
        if near_singular(self.out_relation(), xi, mask)
            || near_singular(self.second_relation(), xi - eta, mask)
        {
            return None;
        }
        self.grad_xi(xi, eta).ok()
    }
}

fn near_singular(rel: &DispersionRelation, v: Vec2, mask: f64) -> bool {
    rel.singular_at_origin() && v.norm() < mask.max(rel.origin_exclusion_radius())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::make_system;
    use proptest::prelude::*;

    fn schrodinger(signs: SignPair) -> Phase {
        Phase::scalar(DispersionRelation::schrodinger(1).unwrap(), signs)
    }

    #[test]
    fn formula_values() {
        let p = schrodinger(SignPair::PP);
        assert_eq!(p.value(Vec2::scalar(2.0), Vec2::scalar(1.0)), 2.0);
        for x in [-3.0, 0.5, 7.0] {
            assert_eq!(p.value(Vec2::scalar(x), Vec2::ZERO), 0.0);
        }
        let mm = Phase::scalar(DispersionRelation::homogeneous(0.7, 1).unwrap(), SignPair::MM);
        for (x, e) in [(1.0, -2.0), (-0.3, 0.4), (0.0, 0.0)] {
            assert!(mm.value(Vec2::scalar(x), Vec2::scalar(e)) >= 0.0);
        }
    }

    #[test]
    fn schrodinger_jet() {
        let p = schrodinger(SignPair::PP);
        let jet = p.jet(Vec2::scalar(2.0), Vec2::scalar(1.0)).unwrap();
        assert_eq!(jet.grad_eta.x, 0.0);
        assert_eq!(jet.grad_xi.x, 2.0);
    }

    #[test]
    fn bad_indices_and_signs() {
        let s = make_system(vec![DispersionRelation::schrodinger(1).unwrap()]).unwrap();
        assert!(make_phase(&s, 1, 2, 1, Sign::Plus, Sign::Plus).is_err());
        assert!(make_phase(&s, 0, 1, 1, Sign::Plus, Sign::Plus).is_err());
        assert!("+x".parse::<SignPair>().is_err());
        assert_eq!("+-".parse::<SignPair>().unwrap(), SignPair::PM);
        assert_eq!(SignPair::MM.to_string(), "--");
    }

    #[test]
    fn singular_gradients_propagate() {
        let p = Phase::scalar(DispersionRelation::wave(1).unwrap(), SignPair::PP);
        assert!(matches!(
            p.grad_eta(Vec2::scalar(1.0), Vec2::ZERO),
            Err(Error::OriginSingular { .. })
        ));
    }

    fn arb_phase() -> impl Strategy<Value = Phase> {
        let rel = prop_oneof![
            Just(DispersionRelation::schrodinger(1).unwrap()),
            Just(DispersionRelation::wave(1).unwrap()),
            Just(DispersionRelation::klein_gordon(1.0, 1).unwrap()),
            (0.3f64..3.0).prop_map(|a| DispersionRelation::homogeneous(a, 1).unwrap()),
        ];
        let sign = prop_oneof![Just(Sign::Plus), Just(Sign::Minus)];
        (rel.clone(), rel.clone(), rel, 1usize..=3, 1usize..=3, 1usize..=3, sign.clone(), sign)
            .prop_map(|(a, b, c, i, j, k, e1, e2)| {
                let sys = make_system(vec![a, b, c]).unwrap();
                make_phase(&sys, i, j, k, e1, e2).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn swap_symmetry(p in arb_phase(), x in -5.0f64..5.0, e in -5.0f64..5.0) {
            let (xi, eta) = (Vec2::scalar(x), Vec2::scalar(e));
            let q = p.swapped();
            // exact only where ξ − (ξ − η) rounds back to η
            prop_assume!(xi - (xi - eta) == eta);
            prop_assert_eq!(p.value(xi, eta), q.value(xi, xi - eta));
        }

        #[test]
        fn gradient_sum_identity(p in arb_phase(), x in -5.0f64..5.0, e in -5.0f64..5.0) {
            let (xi, eta) = (Vec2::scalar(x), Vec2::scalar(e));
            prop_assume!(eta.norm() > 1e-3 && (xi - eta).norm() > 1e-3 && xi.norm() > 1e-3);
            let jet = p.jet(xi, eta).unwrap();
            let (i, j, _) = p.indices();
            let gi = p.system().component(i).unwrap().gradient(xi).unwrap();
            let gj = p.system().component(j).unwrap().gradient(eta).unwrap();
            let lhs = jet.grad_xi + jet.grad_eta;
            let rhs = gi - gj * p.signs().0.value();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn jet_matches_finite_differences(p in arb_phase(), x in -5.0f64..5.0, e in -5.0f64..5.0) {
            let (xi, eta) = (Vec2::scalar(x), Vec2::scalar(e));
            prop_assume!(eta.norm() > 0.1 && (xi - eta).norm() > 0.1 && xi.norm() > 0.1);
            let jet = p.jet(xi, eta).unwrap();
            let h = 1e-5 * (1.0 + xi.norm() + eta.norm());
            let step = Vec2::scalar(h);
            let fd_eta = (p.value(xi, eta + step) - p.value(xi, eta - step)) / (2.0 * h);
            let fd_xi = (p.value(xi + step, eta) - p.value(xi - step, eta)) / (2.0 * h);
            let scale = 1.0 + jet.grad_eta.norm().max(jet.grad_xi.norm());
            prop_assert!((jet.grad_eta.x - fd_eta).abs() <= 1e-6 * scale);
            prop_assert!((jet.grad_xi.x - fd_xi).abs() <= 1e-6 * scale);
        }
    }
}

//! Single-system model.
//!
//! States of a system of dimension `D` are stored in barycentric
//! coordinates over its `D` non-null vertices `|1>..|D>`; the null state is
//! the zero vector. Effects are stored in the dual basis `b_1..b_D`
//! (`b_i` evaluates to `delta_ij` on vertex `|j>`), so pairing is a dot
//! product and the deterministic effect is the all-ones vector.

use num_traits::{One, Signed};

use crate::arith::{RMatrix, RVector, Rational};
use crate::error::{Error, Result};
use crate::lp::{lp_feasible, FarkasCertificate, Feasibility, LPProblem};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EffectModel {
    /// Every functional with values in `[0, 1]` on the vertices.
    FullDual,
    /// Conic hull of the generators intersected with the `[0, 1]` box.
    RestrictedCone { generators: Vec<RVector> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSpace {
    name: String,
    dim: usize,
    effect_model: EffectModel,
}

impl SystemSpace {
    /// Checks `dim >= 1`, that every cone generator is itself a box effect,
    /// and that the generators span the dual space. Existence of a deterministic effect is checked separately by
    /// [`deterministic_effect`].
    pub fn new(name: impl Into<String>, dim: usize, effect_model: EffectModel) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidSystem { name: name.clone(), reason };
        if dim == 0 {
            return Err(invalid("dimension must be at least 1".into()));
        }
        if let EffectModel::RestrictedCone { generators } = &effect_model {
            if generators.is_empty() {
                return Err(invalid("restricted cone needs at least one generator".into()));
            }
            for (g, gen) in generators.iter().enumerate() {
                if gen.dim() != dim {
                    return Err(invalid(format!(
                        "generator {} has length {}, expected {dim}",
                        g + 1,
                        gen.dim()
                    )));
                }
                if !in_unit_box(gen) {
                    return Err(invalid(format!("generator {} leaves the [0,1] box", g + 1)));
                }
            }
            // Effects must separate states, so the generators span the dual.
            let rank = RMatrix::new(generators.clone(), dim).map(|m| m.rank()).unwrap_or(0);
            if rank < dim {
                return Err(invalid(format!("generators span only {rank} of {dim} dimensions")));
            }
        }
        Ok(SystemSpace { name, dim, effect_model })
    }

    pub fn full_dual(name: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new(name, dim, EffectModel::FullDual)
    }

    pub fn restricted(name: impl Into<String>, generators: Vec<RVector>) -> Result<Self> {
        let dim = generators.first().map_or(0, RVector::dim);
        Self::new(name, dim, EffectModel::RestrictedCone { generators })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effect_model(&self) -> &EffectModel {
        &self.effect_model
    }

    pub fn is_full_dual(&self) -> bool {
        matches!(self.effect_model, EffectModel::FullDual)
    }

    pub fn renamed(&self, name: impl Into<String>) -> SystemSpace {
        SystemSpace { name: name.into(), ..self.clone() }
    }

    /// Pure state `|j>` (1-based).
    pub fn vertex(&self, j: usize) -> Result<StateVector> {
        self.check_index(j)?;
        Ok(StateVector { system: self.name.clone(), coords: RVector::unit(self.dim, j - 1) })
    }

    pub fn vertices(&self) -> impl Iterator<Item = StateVector> + '_ {
        (1..=self.dim).map(|j| StateVector {
            system: self.name.clone(),
            coords: RVector::unit(self.dim, j - 1),
        })
    }

    pub fn null_state(&self) -> StateVector {
        StateVector { system: self.name.clone(), coords: RVector::zeros(self.dim) }
    }

    pub fn state(&self, coords: RVector) -> Result<StateVector> {
        coords.check_dim(self.dim)?;
        let invalid = |reason: &str| Error::InvalidState {
            system: self.name.clone(),
            reason: reason.to_string(),
        };
        if !coords.is_nonnegative() {
            return Err(invalid("negative barycentric coordinate"));
        }
        if coords.sum() > Rational::one() {
            return Err(invalid("coordinates sum to more than 1"));
        }
        Ok(StateVector { system: self.name.clone(), coords })
    }

    /// Validated effect: must lie in this system's effect model.
    pub fn effect(&self, coords: RVector) -> Result<EffectVector> {
        let membership = is_effect(self, &coords)?;
        if !membership.is_member() {
            return Err(Error::InvalidEffect {
                system: self.name.clone(),
                reason: format!("{coords} is outside the effect model"),
            });
        }
        Ok(EffectVector { system: self.name.clone(), coords })
    }

    /// Dual functional `b_j`, the effect reading off vertex `j`.
    pub fn dual_basis_effect(&self, j: usize) -> Result<EffectVector> {
        self.check_index(j)?;
        self.effect(RVector::unit(self.dim, j - 1))
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.dim {
            Err(Error::VertexOutOfRange { index: j, dim: self.dim })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_state(&self, state: &StateVector) -> Result<()> {
        if state.system != self.name || state.coords.dim() != self.dim {
            return Err(Error::SystemMismatch {
                expected: self.name.clone(),
                found: state.system.clone(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_effect(&self, effect: &EffectVector) -> Result<()> {
        if effect.system != self.name || effect.coords.dim() != self.dim {
            return Err(Error::SystemMismatch {
                expected: self.name.clone(),
                found: effect.system.clone(),
            });
        }
        Ok(())
    }
}

/// Subnormalized state in vertex coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateVector {
    system: String,
    coords: RVector,
}

impl StateVector {
    /// Trusted constructor for states produced by exact operations.
    pub(crate) fn from_parts(system: impl Into<String>, coords: RVector) -> Self {
        StateVector { system: system.into(), coords }
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    pub fn coords(&self) -> &RVector {
        &self.coords
    }

    /// Total probability, `<e|rho>`.
    pub fn norm(&self) -> Rational {
        self.coords.sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.norm().is_one()
    }
}

/// Effect in dual-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EffectVector {
    system: String,
    coords: RVector,
}

impl EffectVector {
    pub(crate) fn from_parts(system: impl Into<String>, coords: RVector) -> Self {
        EffectVector { system: system.into(), coords }
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    pub fn coords(&self) -> &RVector {
        &self.coords
    }
}

/// Outcome probability `<a|rho>`.
pub fn pair(a: &EffectVector, rho: &StateVector) -> Result<Rational> {
    if a.system != rho.system || a.coords.dim() != rho.coords.dim() {
        return Err(Error::SystemMismatch { expected: a.system.clone(), found: rho.system.clone() });
    }
    Ok(a.coords.dot(&rho.coords))
}

/// The unique effect that is 1 on every vertex.
pub fn deterministic_effect(s: &SystemSpace) -> Result<EffectVector> {
    let ones = RVector::ones(s.dim);
    if is_effect(s, &ones)?.is_member() {
        Ok(EffectVector { system: s.name.clone(), coords: ones })
    } else {
        Err(Error::NoDeterministicEffect(s.name.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateClass {
    Null,
    /// 1-based vertex index.
    PureVertex(usize),
    DeterministicMixed,
    SubnormalizedAtomic,
    SubnormalizedMixed,
}

pub fn classify_state(rho: &StateVector) -> StateClass {
    let support = rho.coords.support();
    let norm = rho.norm();
    match support.len() {
        0 => StateClass::Null,
        1 if norm.is_one() => StateClass::PureVertex(support[0] + 1),
        _ if norm.is_one() => StateClass::DeterministicMixed,
        1 => StateClass::SubnormalizedAtomic,
        _ => StateClass::SubnormalizedMixed,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EffectMembership {
    /// Full-dual member.
    InBox,
    /// Restricted-cone member with nonnegative generator coefficients.
    InCone(RVector),
    /// Value on the given 1-based vertex lies outside `[0, 1]`.
    OutsideBox { vertex: usize },
    /// No nonnegative combination of generators reproduces the vector.
    OutsideCone(FarkasCertificate),
}

impl EffectMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, EffectMembership::InBox | EffectMembership::InCone(_))
    }
}

pub fn is_effect(s: &SystemSpace, v: &RVector) -> Result<EffectMembership> {
    v.check_dim(s.dim)?;
    if let Some(j) = v.iter().position(|x| x.is_negative() || *x > Rational::one()) {
        return Ok(EffectMembership::OutsideBox { vertex: j + 1 });
    }
    match &s.effect_model {
        EffectModel::FullDual => Ok(EffectMembership::InBox),
        EffectModel::RestrictedCone { generators } => {
            Ok(match lp_feasible(&cone_membership_problem(generators, v))? {
                Feasibility::Feasible(c) => EffectMembership::InCone(c),
                Feasibility::Infeasible(cert) => EffectMembership::OutsideCone(cert),
            })
        }
    }
}

/// `sum_g c_g generator_g = target`, `c >= 0`.
pub fn cone_membership_problem(generators: &[RVector], target: &RVector) -> LPProblem {
    let mut p = LPProblem::nonnegative(generators.len());
    for j in 0..target.dim() {
        let row: RVector = generators.iter().map(|g| g[j].clone()).collect();
        p.add_eq(row, target[j].clone());
    }
    p
}

fn in_unit_box(v: &RVector) -> bool {
    v.iter().all(|x| !x.is_negative() && *x <= Rational::one())
}

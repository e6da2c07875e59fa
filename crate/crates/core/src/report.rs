//! Theory reports.
//!
//! A [`ReportDocument`] is computed once; [`ReportDocument::to_json`] and
//! [`ReportDocument::to_text`] both render the same values. Rationals are
//! strings in the JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{check_causality, check_classicality, is_separable, AnalysisReport, SeparabilityCertificate};
use crate::arith::{format_rational, rat, RVector, Rational};
use crate::composition::Keep;
use crate::error::{Error, Result};
use crate::principles::{
    check_purification, check_superposition, maximal_discriminable_set, DiscriminatingObservation,
    PurificationResult, SuperpositionMode, SuperpositionOutcome, SuperpositionVerdict,
};
use crate::system::{EffectModel, StateVector, SystemSpace};
use crate::theory::Theory;

fn strings(v: &RVector) -> Vec<String> {
    v.to_strings()
}

fn braces(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn tuple(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemSummary {
    pub name: String,
    pub dim: usize,
    /// `full_dual` or `cone`.
    pub effect_model: String,
    pub causal: bool,
    pub deterministic_effect: Option<Vec<String>>,
    pub classical: bool,
    pub maximal_discriminable_set: Vec<usize>,
}

impl SystemSummary {
    pub fn compute(s: &SystemSpace) -> Result<Self> {
        let deterministic_effect = match check_causality(s) {
            Ok(c) => Some(strings(c.deterministic_effect.coords())),
            Err(Error::NoDeterministicEffect(_) | Error::NonUniqueDeterministicEffect(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(SystemSummary {
            name: s.name().to_string(),
            dim: s.dim(),
            effect_model: match s.effect_model() {
                EffectModel::FullDual => "full_dual".into(),
                EffectModel::RestrictedCone { .. } => "cone".into(),
            },
            causal: deterministic_effect.is_some(),
            deterministic_effect,
            classical: check_classicality(s)?.is_discriminable(),
            maximal_discriminable_set: maximal_discriminable_set(s)?,
        })
    }
}

/// Why the witness vertex is entangled, and what it looks like locally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntanglementWitness {
    pub vertex: usize,
    pub block: [usize; 2],
    /// Two vertices of the block whose ratios `omega_k / p_k` differ.
    pub vertices: [usize; 2],
    pub ratios: [String; 2],
    pub marginal_left: Vec<String>,
    pub marginal_right: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositeSummary {
    pub composite: String,
    pub left: String,
    pub right: String,
    pub dim: usize,
    pub excess_dimension: usize,
    pub causal: bool,
    pub deterministic_effect: Vec<String>,
    pub classical: bool,
    pub atomic_composition: bool,
    pub atomicity_violation: Option<[usize; 2]>,
    pub local_discriminability: bool,
    pub entanglement_present: bool,
    pub entanglement_witness: Option<EntanglementWitness>,
    pub discriminability_degree: usize,
}

impl CompositeSummary {
    pub fn compute(theory: &Theory, name: &str) -> Result<Self> {
        let report = AnalysisReport::for_composite(theory, name)?;
        let rule = theory.composite(name)?.rule();
        let entanglement_witness = match report.entanglement.witness {
            None => None,
            Some(vertex) => {
                let omega = StateVector::from_parts(name, RVector::unit(rule.composite_dim(), vertex - 1));
                let SeparabilityCertificate::Entangled { block, indices, ratios } = is_separable(rule, &omega)? else {
                    return Err(Error::InconsistentReport(format!("witness vertex {vertex} is separable")));
                };
                Some(EntanglementWitness {
                    vertex,
                    block: [block.0, block.1],
                    vertices: [indices.0, indices.1],
                    ratios: [format_rational(&ratios.0), format_rational(&ratios.1)],
                    marginal_left: strings(rule.marginalize(&omega, Keep::Left)?.coords()),
                    marginal_right: strings(rule.marginalize(&omega, Keep::Right)?.coords()),
                })
            }
        };
        Ok(CompositeSummary {
            composite: report.composite,
            left: report.left,
            right: report.right,
            dim: rule.composite_dim(),
            excess_dimension: report.excess_dimension,
            causal: true,
            deterministic_effect: strings(report.causal.deterministic_effect.coords()),
            classical: report.classical.is_discriminable(),
            atomic_composition: report.atomic_composition.atomic,
            atomicity_violation: report.atomic_composition.violating.map(|(i, j)| [i, j]),
            local_discriminability: report.local_discriminability,
            entanglement_present: report.entanglement.present,
            entanglement_witness,
            discriminability_degree: report.discriminability_degree,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObservationSummary {
    pub base_set: Vec<usize>,
    pub free_weights: BTreeMap<usize, Vec<String>>,
}

impl From<&DiscriminatingObservation> for ObservationSummary {
    fn from(o: &DiscriminatingObservation) -> Self {
        ObservationSummary {
            base_set: o.base_set.clone(),
            free_weights: o.free_weights.iter().map(|(&k, q)| (k, q.iter().map(format_rational).collect())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuperpositionQuery {
    pub system: String,
    pub set: Vec<usize>,
    pub distribution: Vec<String>,
    pub mode: String,
    /// `holds`, `fails` or `vacuous`.
    pub outcome: String,
    pub vertex: Option<usize>,
    /// The witness observation when the principle holds, the counterexample
    /// when it fails.
    pub observation: Option<ObservationSummary>,
}

impl SuperpositionQuery {
    pub fn from_verdict(system: &str, set: &[usize], p: &[Rational], verdict: &SuperpositionVerdict) -> Self {
        let (outcome, vertex, observation) = match &verdict.outcome {
            SuperpositionOutcome::Vacuous => ("vacuous", None, None),
            SuperpositionOutcome::Holds { observation, vertex } => ("holds", Some(*vertex), Some(observation.into())),
            SuperpositionOutcome::Fails { counterexample } => ("fails", None, counterexample.as_ref().map(Into::into)),
        };
        SuperpositionQuery {
            system: system.to_string(),
            set: set.to_vec(),
            distribution: p.iter().map(format_rational).collect(),
            mode: verdict.mode.to_string(),
            outcome: outcome.to_string(),
            vertex,
            observation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PurificationQuery {
    pub system: String,
    pub state: Vec<String>,
    pub ancilla: String,
    pub purifiable: bool,
    pub composite: Option<String>,
    pub vertex: Option<usize>,
    pub ancilla_effect: Option<Vec<String>>,
    pub scanned: Option<usize>,
}

impl PurificationQuery {
    pub fn from_result(rho: &StateVector, ancilla: &str, result: &PurificationResult) -> Self {
        let mut q = PurificationQuery {
            system: rho.system().to_string(),
            state: strings(rho.coords()),
            ancilla: ancilla.to_string(),
            purifiable: result.is_purifiable(),
            composite: None,
            vertex: None,
            ancilla_effect: None,
            scanned: None,
        };
        match result {
            PurificationResult::Purifiable { composite, vertex, ancilla_effect } => {
                q.composite = Some(composite.clone());
                q.vertex = Some(*vertex);
                q.ancilla_effect = Some(strings(ancilla_effect.coords()));
            }
            PurificationResult::NotPurifiable { scanned } => q.scanned = Some(*scanned),
        }
        q
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportDocument {
    pub systems: Vec<SystemSummary>,
    pub composites: Vec<CompositeSummary>,
    pub superposition: Vec<SuperpositionQuery>,
    pub purification: Vec<PurificationQuery>,
}

impl ReportDocument {
    /// Summaries of every system and composite, plus two standard queries
    /// per base system: weak superposition of the uniform distribution over
    /// its maximal discriminable set, and purification of its uniform
    /// mixture against every declared ancilla.
    pub fn build(theory: &Theory) -> Result<Self> {
        let mut doc = ReportDocument {
            systems: theory.all_spaces().map(SystemSummary::compute).collect::<Result<_>>()?,
            composites: theory
                .composites()
                .iter()
                .map(|c| CompositeSummary::compute(theory, c.name()))
                .collect::<Result<_>>()?,
            superposition: Vec::new(),
            purification: Vec::new(),
        };
        for s in theory.systems() {
            let set = maximal_discriminable_set(s)?;
            let p = vec![rat(1, set.len() as i64); set.len()];
            let verdict = check_superposition(s, &set, &p, SuperpositionMode::Weak)?;
            doc.superposition.push(SuperpositionQuery::from_verdict(s.name(), &set, &p, &verdict));

            let uniform = s.state(RVector::new(vec![rat(1, s.dim() as i64); s.dim()]))?;
            for comp in theory.ancillas_for(s.name()) {
                let rule = comp.rule();
                let ancilla = if rule.left().name() == s.name() { rule.right().name() } else { rule.left().name() };
                let result = check_purification(theory, &uniform, ancilla)?;
                doc.purification.push(PurificationQuery::from_result(&uniform, ancilla, &result));
            }
        }
        Ok(doc)
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("reports always serialize");
        let mut out = serde_json::to_string_pretty(&value).expect("values always serialize");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut out = String::new();
        for s in &self.systems {
            let _ = writeln!(out, "system {} (dim {}, {})", s.name, s.dim, s.effect_model.replace('_', " "));
            match &s.deterministic_effect {
                Some(e) => {
                    let _ = writeln!(out, "  causal: yes, e = {}", tuple(e));
                }
                None => {
                    let _ = writeln!(out, "  causal: no");
                }
            }
            let _ = writeln!(out, "  classical: {}", yes(s.classical));
            let _ = writeln!(out, "  maximal discriminable set: {}", braces(&s.maximal_discriminable_set));
        }
        for c in &self.composites {
            let _ = writeln!(out, "composite {} = {} x {} (dim {}, excess {})", c.composite, c.left, c.right, c.dim, c.excess_dimension);
            let _ = writeln!(out, "  deterministic effect: {}", tuple(&c.deterministic_effect));
            let _ = writeln!(out, "  classical: {}", yes(c.classical));
            let _ = writeln!(out, "  local discriminability: {}", yes(c.local_discriminability));
            let _ = writeln!(out, "  discriminability degree: {}", c.discriminability_degree);
            match c.atomicity_violation {
                None => {
                    let _ = writeln!(out, "  atomic composition: yes");
                }
                Some([i, j]) => {
                    let _ = writeln!(out, "  atomic composition: no, |{i}> x |{j}> is refined");
                }
            }
            match &c.entanglement_witness {
                None => {
                    let _ = writeln!(out, "  entanglement: absent");
                }
                Some(w) => {
                    let _ = writeln!(
                        out,
                        "  entanglement: present, witness vertex {} (block ({}, {}): ratio {} at vertex {} vs {} at vertex {})",
                        w.vertex, w.block[0], w.block[1], w.ratios[0], w.vertices[0], w.ratios[1], w.vertices[1]
                    );
                    let _ = writeln!(
                        out,
                        "  witness marginals: {} on {}, {} on {}",
                        tuple(&w.marginal_left),
                        c.left,
                        tuple(&w.marginal_right),
                        c.right
                    );
                }
            }
        }
        for q in &self.superposition {
            let _ = write!(
                out,
                "superposition ({}) on {} over {} with p = {}: {}",
                q.mode,
                q.system,
                braces(&q.set),
                tuple(&q.distribution),
                q.outcome.to_uppercase()
            );
            if let Some(v) = q.vertex {
                let _ = write!(out, ", vertex {v}");
            }
            out.push('\n');
        }
        for q in &self.purification {
            let _ = write!(out, "purification of {} {} with {}: ", q.system, tuple(&q.state), q.ancilla);
            match (&q.composite, q.vertex, q.scanned) {
                (Some(c), Some(v), _) => {
                    let _ = writeln!(out, "vertex {v} of {c}");
                }
                (_, _, n) => {
                    let _ = writeln!(out, "none ({} pure states scanned)", n.unwrap_or(0));
                }
            }
        }
        out
    }
}

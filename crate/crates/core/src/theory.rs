//! Registry of systems and declared composition rules.

use crate::composition::{Block, CompositeSystem, CompositionRule};
use crate::error::{Error, Result};
use crate::system::{deterministic_effect, EffectModel, SystemSpace};

/// A finite simplicial theory: base systems plus composites, each composite
/// referring to previously declared systems (base or composite) by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    systems: Vec<SystemSpace>,
    composites: Vec<CompositeSystem>,
}

impl Theory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a base system; it must admit a deterministic effect.
    pub fn add_system(&mut self, system: SystemSpace) -> Result<()> {
        self.ensure_fresh(system.name())?;
        deterministic_effect(&system)?;
        self.systems.push(system);
        Ok(())
    }

    pub fn add_composite(
        &mut self,
        name: &str,
        left: &str,
        right: &str,
        dim: usize,
        blocks: Vec<Block>,
        effect_model: Option<EffectModel>,
    ) -> Result<&CompositeSystem> {
        self.ensure_fresh(name)?;
        let rule =
            CompositionRule::new(name, self.system(left)?.clone(), self.system(right)?.clone(), dim, blocks)?;
        self.insert_rule(rule, effect_model)
    }

    pub fn insert_rule(
        &mut self,
        rule: CompositionRule,
        effect_model: Option<EffectModel>,
    ) -> Result<&CompositeSystem> {
        let name = rule.composite_name().to_string();
        self.ensure_fresh(&name)?;
        for factor in [rule.left(), rule.right()] {
            if self.system(factor.name())? != factor {
                return Err(Error::SystemMismatch {
                    expected: factor.name().to_string(),
                    found: format!("a different system also named {}", factor.name()),
                });
            }
        }
        if let Some(existing) = self.rule_for(rule.left().name(), rule.right().name()) {
            return Err(Error::Validation {
                path: format!("composites.{name}"),
                message: format!(
                    "({}, {}) already composed as {}",
                    rule.left().name(),
                    rule.right().name(),
                    existing.name()
                ),
            });
        }
        let comp = CompositeSystem::new(rule, effect_model)?;
        deterministic_effect(comp.space())?;
        self.composites.push(comp);
        Ok(self.composites.last().expect("just pushed"))
    }

    fn ensure_fresh(&self, name: &str) -> Result<()> {
        if self.system(name).is_ok() {
            Err(Error::DuplicateSystem(name.to_string()))
        } else {
            Ok(())
        }
    }

    /// Base or composite system by name.
    pub fn system(&self, name: &str) -> Result<&SystemSpace> {
        self.systems
            .iter()
            .find(|s| s.name() == name)
            .or_else(|| self.composites.iter().map(CompositeSystem::space).find(|s| s.name() == name))
            .ok_or_else(|| Error::UnknownSystem(name.to_string()))
    }

    pub fn composite(&self, name: &str) -> Result<&CompositeSystem> {
        self.composites
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownSystem(name.to_string()))
    }

    pub fn rule_for(&self, left: &str, right: &str) -> Option<&CompositeSystem> {
        self.composites
            .iter()
            .find(|c| c.rule().left().name() == left && c.rule().right().name() == right)
    }

    pub fn require_rule(&self, left: &str, right: &str) -> Result<&CompositeSystem> {
        self.rule_for(left, right).ok_or_else(|| Error::MissingRule {
            left: left.to_string(),
            right: right.to_string(),
        })
    }

    /// Base systems in declaration order.
    pub fn systems(&self) -> &[SystemSpace] {
        &self.systems
    }

    pub fn composites(&self) -> &[CompositeSystem] {
        &self.composites
    }

    /// Every system, base systems first.
    pub fn all_spaces(&self) -> impl Iterator<Item = &SystemSpace> {
        self.systems.iter().chain(self.composites.iter().map(CompositeSystem::space))
    }

    /// Composites in which `system` is one of the two factors.
    pub fn ancillas_for<'a>(&'a self, system: &'a str) -> impl Iterator<Item = &'a CompositeSystem> {
        self.composites
            .iter()
            .filter(move |c| c.rule().left().name() == system || c.rule().right().name() == system)
    }
}

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::{BodyElement, Variable};

/// Hands out predicate names that clash neither with the input program
/// nor with each other.
///
/// Temporary predicates are `temp_<rule>_<k>` with `k` counting per rule,
/// domain predicates `dom_<rule>_<Var>`. A name that is taken gets
/// `_<n>` appended.
#[derive(Clone, Debug)]
pub struct FreshNamer {
    temp_prefix: String,
    dom_prefix: String,
    forbidden: BTreeSet<String>,
    generated: BTreeSet<String>,
    rule: usize,
    per_rule: usize,
    counter: usize,
    /// Domain rules already emitted, keyed by variable and body.
    domains: BTreeMap<(Variable, Vec<BodyElement>), String>,
}

impl FreshNamer {
    pub fn new(forbidden: BTreeSet<String>) -> Self {
        Self::with_prefixes("temp_", "dom_", forbidden)
    }

    pub fn with_prefixes(temp_prefix: &str, dom_prefix: &str, forbidden: BTreeSet<String>) -> Self {
        FreshNamer {
            temp_prefix: temp_prefix.to_string(),
            dom_prefix: dom_prefix.to_string(),
            forbidden,
            generated: BTreeSet::new(),
            rule: 0,
            per_rule: 0,
            counter: 0,
            domains: BTreeMap::new(),
        }
    }

    /// Starts naming for the rule at `index` of the input program.
    pub fn begin_rule(&mut self, index: usize) {
        self.rule = index;
        self.per_rule = 0;
    }

    pub fn temp(&mut self) -> String {
        let base = format!("{}{}_{}", self.temp_prefix, self.rule, self.per_rule);
        self.per_rule += 1;
        self.claim(base)
    }

    pub fn dom(&mut self, var: &Variable) -> String {
        let base = format!("{}{}_{}", self.dom_prefix, self.rule, var);
        self.claim(base)
    }

    pub fn is_generated(&self, name: &str) -> bool {
        self.generated.contains(name)
    }

    pub fn generated(&self) -> &BTreeSet<String> {
        &self.generated
    }

    fn claim(&mut self, base: String) -> String {
        let mut name = base.clone();
        while self.forbidden.contains(&name) || self.generated.contains(&name) {
            self.counter += 1;
            name = format!("{base}_{}", self.counter);
        }
        self.generated.insert(name.clone());
        name
    }

    pub(crate) fn known_domain(&self, var: &Variable, body: &[BodyElement]) -> Option<&String> {
        self.domains.get(&(var.clone(), body.to_vec()))
    }

    pub(crate) fn remember_domain(&mut self, var: &Variable, body: &[BodyElement], name: String) {
        self.domains.insert((var.clone(), body.to_vec()), name);
    }
}

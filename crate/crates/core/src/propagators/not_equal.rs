use crate::csp::{DomainStore, Propagation, Propagator, VarId};

/// `x != y`.
#[derive(Debug, Clone)]
pub struct NotEqual {
    scope: [VarId; 2],
}

impl NotEqual {
    pub fn new(x: VarId, y: VarId) -> Self {
        NotEqual { scope: [x, y] }
    }
}

impl Propagator for NotEqual {
    fn scope(&self) -> &[VarId] {
        &self.scope
    }

    fn name(&self) -> &str {
        "not_equal"
    }

    fn idempotent(&self) -> bool {
        true
    }

    fn propagate(&mut self, store: &mut DomainStore) -> Propagation {
        let [x, y] = self.scope;
        if let Some(v) = store.value(x) {
            store.remove(y, v)?;
        }
        if let Some(v) = store.value(y) {
            store.remove(x, v)?;
        }
        Ok(())
    }
}

use std::fmt;
use std::sync::Arc;

use crate::error::{AlgebraError, Result};

/// Ordered list of variable names shared by every polynomial of a computation.
///
/// Registries are cheap to clone. Two polynomials over different registries are
/// re-indexed onto the union registry before any binary operation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Registry(Arc<[String]>);

impl Registry {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        let mut seen: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref().to_string();
            if !seen.contains(&n) {
                seen.push(n);
            }
        }
        Registry(seen.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    pub fn same(&self, other: &Registry) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    /// Variables of `self` followed by the new variables of `other`, in order.
    pub fn union(&self, other: &Registry) -> Registry {
        if self.same(other) {
            return self.clone();
        }
        let mut names: Vec<String> = self.0.to_vec();
        let mut grew = false;
        for n in other.0.iter() {
            if !names.contains(n) {
                names.push(n.clone());
                grew = true;
            }
        }
        if grew {
            Registry(names.into())
        } else {
            self.clone()
        }
    }

    pub fn contains_all(&self, other: &Registry) -> bool {
        other.0.iter().all(|n| self.0.contains(n))
    }

    /// Position in `self` of each variable of `from`.
    pub(crate) fn embedding(&self, from: &Registry) -> Result<Vec<usize>> {
        from.0.iter().map(|n| self.require(n)).collect()
    }
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_keeps_order_and_appends() {
        let a = Registry::new(&["q", "x1"]);
        let b = Registry::new(&["x2", "q"]);
        let u = a.union(&b);
        assert_eq!(u.names(), &["q", "x1", "x2"]);
        assert_eq!(u.embedding(&b).unwrap(), vec![2, 0]);
    }

    #[test]
    fn duplicate_names_collapse() {
        let a = Registry::new(&["q", "q", "h"]);
        assert_eq!(a.len(), 2);
    }
}

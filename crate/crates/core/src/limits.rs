/// Resource bounds shared by every enumerating operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of elements any single enumerated group may have.
    pub elements: usize,
    /// Largest order for which isomorphism is decided by exact search.
    pub iso_bound: usize,
    /// Largest order of a non-nilpotent group whose Frattini subgroup is
    /// computed by intersecting maximal subgroups.
    pub frattini_fallback: usize,
}

impl Limits {
    pub const DEFAULT_ELEMENTS: usize = 1 << 20;
    pub const DEFAULT_ISO_BOUND: usize = 512;
    pub const DEFAULT_FRATTINI_FALLBACK: usize = 2000;

    pub fn with_elements(mut self, elements: usize) -> Self {
        self.elements = elements;
        self
    }

    pub fn with_iso_bound(mut self, bound: usize) -> Self {
        self.iso_bound = bound;
        self
    }

    pub(crate) fn check(&self, needed: u128) -> crate::Result<()> {
        if needed > self.elements as u128 {
            Err(crate::Error::BudgetExceeded {
                needed,
                budget: self.elements,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            elements: Self::DEFAULT_ELEMENTS,
            iso_bound: Self::DEFAULT_ISO_BOUND,
            frattini_fallback: Self::DEFAULT_FRATTINI_FALLBACK,
        }
    }
}

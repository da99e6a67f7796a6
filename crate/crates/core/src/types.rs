//! Identifier newtypes and the per-run id allocator.

use std::fmt;

/// Index into a scenario's region table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RegionId(pub u32);

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "region#{}", self.0)
    }
}

/// Identifier of an innovative idea, unique within a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdeaId(pub u64);

/// Identifier of a technology, unique within a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TechId(pub u64);

impl fmt::Display for TechId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tech#{}", self.0)
    }
}

/// Monotone allocator; ids are unique within one run.
#[derive(Clone, Debug, Default)]
pub struct IdSource {
    next_idea: u64,
    next_tech: u64,
}

impl IdSource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn idea(&mut self) -> IdeaId {
        let id = IdeaId(self.next_idea);
        self.next_idea += 1;
        id
    }

    pub fn tech(&mut self) -> TechId {
        let id = TechId(self.next_tech);
        self.next_tech += 1;
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_sequential_and_independent() {
        let mut ids = IdSource::new();
        assert_eq!(ids.idea(), IdeaId(0));
        assert_eq!(ids.idea(), IdeaId(1));
        assert_eq!(ids.tech(), TechId(0));
        assert_eq!(ids.idea(), IdeaId(2));
        assert_eq!(ids.tech(), TechId(1));
    }
}

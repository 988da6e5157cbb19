//! Finite partitions, the event algebra they generate, and base probabilities.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Hard limit imposed by the `u64` event representation.
pub const MAX_ATOMS: usize = 62;

/// Default cap on atoms for operations that enumerate all `2^n` events.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// Enumeration cap, overridable through `NLUM_MAX_ATOMS`.
pub fn enumeration_cap() -> usize {
    std::env::var("NLUM_MAX_ATOMS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|v| v.min(MAX_ATOMS))
        .unwrap_or(DEFAULT_ENUMERATION_CAP)
}

/// A finite set of labelled, pairwise disjoint atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<String>,
}

impl Partition {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyPartition);
        }
        if labels.len() > MAX_ATOMS {
            return Err(Error::TooManyAtoms(labels.len()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Partition { labels })
    }

    /// Atoms labelled `w1..wn`.
    pub fn with_atoms(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("w{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, atom: usize) -> &str {
        &self.labels[atom]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn empty(&self) -> Event {
        Event::empty(self.len())
    }

    pub fn omega(&self) -> Event {
        Event::full(self.len())
    }

    pub fn atom(&self, i: usize) -> Event {
        Event::atom(self.len(), i).expect("atom index checked by caller")
    }

    pub fn atoms(&self) -> impl Iterator<Item = Event> + '_ {
        (0..self.len()).map(|i| self.atom(i))
    }

    /// Parses an event from atom labels.
    pub fn event<S: AsRef<str>>(&self, labels: &[S]) -> Result<Event> {
        let mut mask = 0u64;
        for l in labels {
            mask |= 1 << self.index_of(l.as_ref())?;
        }
        Ok(Event::from_mask(self.len(), mask))
    }

    /// Every event of the algebra in mask order. Fails above the enumeration cap.
    pub fn events(&self) -> Result<impl Iterator<Item = Event>> {
        self.check_enumerable()?;
        Ok(all_events(self.len()))
    }

    pub fn check_enumerable(&self) -> Result<()> {
        let cap = enumeration_cap();
        if self.len() > cap {
            return Err(Error::EnumerationCap { atoms: self.len(), cap });
        }
        Ok(())
    }

    /// Sorted label list, e.g. `{w1,w3}`.
    pub fn format_event(&self, event: Event) -> String {
        let names: Vec<&str> = event.atom_indices().map(|i| self.label(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn event_labels(&self, event: Event) -> Vec<String> {
        event.atom_indices().map(|i| self.label(i).to_string()).collect()
    }

    pub(crate) fn check_event(&self, event: Event) -> Result<()> {
        if event.atom_count() != self.len() {
            return Err(Error::PartitionMismatch { expected: self.len(), found: event.atom_count() });
        }
        Ok(())
    }
}

/// All `2^n` events over `n` atoms, in mask order.
pub fn all_events(n: usize) -> impl Iterator<Item = Event> {
    (0..(1u64 << n)).map(move |m| Event::from_mask(n, m))
}

/// A subset of the atoms of an `n`-atom partition.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    mask: u64,
    atoms: u8,
}

impl Event {
    pub(crate) fn from_mask(atoms: usize, mask: u64) -> Event {
        debug_assert!(atoms <= MAX_ATOMS && mask >> atoms == 0);
        Event { mask, atoms: atoms as u8 }
    }

    pub fn try_from_mask(atoms: usize, mask: u64) -> Result<Event> {
        if atoms == 0 || atoms > MAX_ATOMS {
            return Err(Error::TooManyAtoms(atoms));
        }
        if mask >> atoms != 0 {
            return Err(Error::AtomOutOfRange { index: 63 - mask.leading_zeros() as usize, atoms });
        }
        Ok(Event::from_mask(atoms, mask))
    }

    pub fn empty(atoms: usize) -> Event {
        Event::from_mask(atoms, 0)
    }

    pub fn full(atoms: usize) -> Event {
        Event::from_mask(atoms, full_mask(atoms))
    }

    pub fn atom(atoms: usize, index: usize) -> Result<Event> {
        if index >= atoms {
            return Err(Error::AtomOutOfRange { index, atoms });
        }
        Ok(Event::from_mask(atoms, 1 << index))
    }

    pub fn from_indices(atoms: usize, indices: &[usize]) -> Result<Event> {
        let mut mask = 0;
        for &i in indices {
            mask |= Event::atom(atoms, i)?.mask;
        }
        Ok(Event::from_mask(atoms, mask))
    }

    pub fn mask(self) -> u64 {
        self.mask
    }

    /// Number of atoms in the underlying partition.
    pub fn atom_count(self) -> usize {
        self.atoms as usize
    }

    /// Number of atoms this event contains.
    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn is_full(self) -> bool {
        self.mask == full_mask(self.atom_count())
    }

    pub fn is_atom(self) -> bool {
        self.mask.count_ones() == 1
    }

    pub fn contains_atom(self, index: usize) -> bool {
        index < 64 && (self.mask >> index) & 1 == 1
    }

    pub fn atom_indices(self) -> impl Iterator<Item = usize> {
        let mask = self.mask;
        (0..self.atoms as usize).filter(move |i| (mask >> i) & 1 == 1)
    }

    pub fn complement(self) -> Event {
        Event::from_mask(self.atom_count(), !self.mask & full_mask(self.atom_count()))
    }

    fn check(self, other: Event) -> Result<()> {
        if self.atoms != other.atoms {
            return Err(Error::PartitionMismatch { expected: self.atom_count(), found: other.atom_count() });
        }
        Ok(())
    }

    pub fn union(self, other: Event) -> Result<Event> {
        self.check(other)?;
        Ok(Event::from_mask(self.atom_count(), self.mask | other.mask))
    }

    pub fn intersection(self, other: Event) -> Result<Event> {
        self.check(other)?;
        Ok(Event::from_mask(self.atom_count(), self.mask & other.mask))
    }

    /// `self ⇒ other`, i.e. set inclusion.
    pub fn implies(self, other: Event) -> Result<bool> {
        self.check(other)?;
        Ok(self.mask & !other.mask == 0)
    }

    pub fn is_disjoint(self, other: Event) -> Result<bool> {
        self.check(other)?;
        Ok(self.mask & other.mask == 0)
    }

    // Unchecked variants for hot loops over a single partition.
    pub(crate) fn or(self, other: Event) -> Event {
        debug_assert_eq!(self.atoms, other.atoms);
        Event::from_mask(self.atom_count(), self.mask | other.mask)
    }

    pub(crate) fn and(self, other: Event) -> Event {
        debug_assert_eq!(self.atoms, other.atoms);
        Event::from_mask(self.atom_count(), self.mask & other.mask)
    }

    pub(crate) fn subset_of(self, other: Event) -> bool {
        self.mask & !other.mask == 0
    }

    pub(crate) fn index(self) -> usize {
        self.mask as usize
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.atom_indices().map(|i| format!("w{}", i + 1)).collect();
        write!(f, "{{{}}}", idx.join(","))
    }
}

impl Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let idx: Vec<usize> = self.atom_indices().collect();
        idx.serialize(s)
    }
}

fn full_mask(atoms: usize) -> u64 {
    if atoms >= 64 {
        u64::MAX
    } else {
        (1u64 << atoms) - 1
    }
}

/// A probability on the atoms, extended additively to events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseProbability {
    partition: Partition,
    weights: Vec<Rational>,
}

impl BaseProbability {
    pub fn new(partition: Partition, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != partition.len() {
            return Err(Error::InvalidProbability(format!("{} weights for {} atoms", weights.len(), partition.len())));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| w.is_negative()) {
            return Err(Error::InvalidProbability(format!("weight of {} is negative ({w})", partition.label(i))));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidProbability(format!("weights sum to {total}, not 1")));
        }
        Ok(BaseProbability { partition, weights })
    }

    pub fn uniform(partition: Partition) -> Self {
        let n = partition.len();
        let w = Rational::new(1, n as i64);
        BaseProbability { partition, weights: vec![w; n] }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> &Rational {
        &self.weights[atom]
    }

    pub fn value(&self, event: Event) -> Result<Rational> {
        self.partition.check_event(event)?;
        Ok(self.value_unchecked(event))
    }

    pub(crate) fn value_unchecked(&self, event: Event) -> Rational {
        event.atom_indices().map(|i| &self.weights[i]).sum()
    }

    /// True when some atom carries all the mass.
    pub fn is_degenerate(&self) -> bool {
        self.weights.iter().any(Rational::is_one)
    }
}

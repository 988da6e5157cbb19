use std::ops::Index;

use serde::Serialize;

use crate::algebra::{all_events, Event, Partition};
use crate::error::{Error, Result};
use crate::nlmodel::Orientation;
use crate::rational::Rational;

/// An explicit value for every event of the algebra generated by a partition.
///
/// Values are arbitrary rationals; nothing forces them into `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assessment {
    partition: Partition,
    values: Vec<Rational>,
    orientation: Orientation,
}

impl Assessment {
    /// `values[k]` is the value of the event with mask `k`.
    pub fn new(partition: Partition, values: Vec<Rational>, orientation: Orientation) -> Result<Self> {
        partition.check_enumerable()?;
        let expected = 1usize << partition.len();
        if values.len() != expected {
            return Err(Error::Document {
                field: "values".into(),
                message: format!("expected {expected} values, found {}", values.len()),
            });
        }
        Ok(Assessment { partition, values, orientation })
    }

    pub fn from_fn(partition: Partition, orientation: Orientation, f: impl Fn(Event) -> Rational) -> Result<Self> {
        partition.check_enumerable()?;
        let values = all_events(partition.len()).map(f).collect();
        Self::new(partition, values, orientation)
    }

    /// Builds an assessment from `(event, value)` pairs that must cover every event exactly once.
    pub fn from_entries(partition: Partition, orientation: Orientation, entries: &[(Event, Rational)]) -> Result<Self> {
        partition.check_enumerable()?;
        let mut slots: Vec<Option<Rational>> = vec![None; 1 << partition.len()];
        for (e, v) in entries {
            partition.check_event(*e)?;
            if slots[e.index()].replace(v.clone()).is_some() {
                return Err(Error::Document {
                    field: "values".into(),
                    message: format!("event {} assessed twice", partition.format_event(*e)),
                });
            }
        }
        let values = slots
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| Error::Document {
                    field: "values".into(),
                    message: format!(
                        "event {} has no value",
                        partition.format_event(Event::from_mask(partition.len(), k as u64))
                    ),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(partition, values, orientation)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn atoms(&self) -> usize {
        self.partition.len()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, event: Event) -> Result<&Rational> {
        self.partition.check_event(event)?;
        Ok(&self.values[event.index()])
    }

    pub fn events(&self) -> impl Iterator<Item = Event> {
        all_events(self.atoms())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Event, &Rational)> {
        self.events().zip(self.values.iter())
    }

    /// The same values read with the other orientation.
    pub fn with_orientation(&self, orientation: Orientation) -> Assessment {
        Assessment { orientation, ..self.clone() }
    }

    /// `A ↦ 1 - v(¬A)`, with the orientation flipped.
    pub fn conjugate(&self) -> Assessment {
        let one = Rational::one();
        let values = self.events().map(|e| &one - &self[e.complement()]).collect();
        Assessment { partition: self.partition.clone(), values, orientation: self.orientation.flip() }
    }

    /// The lower-probability reading: itself if lower, the conjugate if upper.
    pub fn as_lower(&self) -> Assessment {
        match self.orientation {
            Orientation::Lower => self.clone(),
            Orientation::Upper => self.conjugate(),
        }
    }

    pub fn as_upper(&self) -> Assessment {
        match self.orientation {
            Orientation::Upper => self.clone(),
            Orientation::Lower => self.conjugate(),
        }
    }

    pub fn to_partial(&self) -> PartialAssessment {
        PartialAssessment { atoms: self.atoms(), entries: self.iter().map(|(e, v)| (e, v.clone())).collect() }
    }

    /// Restriction to the events accepted by `keep`, in mask order.
    pub fn restrict(&self, keep: impl Fn(Event) -> bool) -> PartialAssessment {
        PartialAssessment {
            atoms: self.atoms(),
            entries: self.iter().filter(|(e, _)| keep(*e)).map(|(e, v)| (e, v.clone())).collect(),
        }
    }

    /// Events with value at most 0.
    pub fn null_events(&self) -> Vec<Event> {
        self.iter().filter(|(_, v)| !v.is_positive()).map(|(e, _)| e).collect()
    }

    /// Events with value at least 1.
    pub fn universal_events(&self) -> Vec<Event> {
        let one = Rational::one();
        self.iter().filter(|(_, v)| **v >= one).map(|(e, _)| e).collect()
    }

    /// Events with value strictly between 0 and 1.
    pub fn essential_events(&self) -> Vec<Event> {
        let one = Rational::one();
        self.iter().filter(|(_, v)| v.is_positive() && **v < one).map(|(e, _)| e).collect()
    }

    pub fn distinct_values(&self) -> usize {
        let mut vals: Vec<&Rational> = self.values.iter().collect();
        vals.sort();
        vals.dedup();
        vals.len()
    }
}

impl Index<Event> for Assessment {
    type Output = Rational;

    fn index(&self, event: Event) -> &Rational {
        debug_assert_eq!(event.atom_count(), self.atoms());
        &self.values[event.index()]
    }
}

/// Lower-probability values on an arbitrary list of events.
///
/// Entries may repeat an event, possibly with different values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialAssessment {
    atoms: usize,
    entries: Vec<(Event, Rational)>,
}

impl PartialAssessment {
    pub fn new(atoms: usize, entries: Vec<(Event, Rational)>) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::EmptyPartition);
        }
        if atoms > crate::algebra::MAX_ATOMS {
            return Err(Error::TooManyAtoms(atoms));
        }
        for (e, _) in &entries {
            if e.atom_count() != atoms {
                return Err(Error::PartitionMismatch { expected: atoms, found: e.atom_count() });
            }
        }
        Ok(PartialAssessment { atoms, entries })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn entries(&self) -> &[(Event, Rational)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `(∅, 0)` unless the empty event is already assessed.
    pub fn with_empty_event(&self) -> PartialAssessment {
        let mut out = self.clone();
        if !out.entries.iter().any(|(e, _)| e.is_empty()) {
            out.entries.insert(0, (Event::empty(self.atoms), Rational::zero()));
        }
        out
    }
}

//! Nearly-linear imprecise probabilities on finite partitions.
//!
//! All arithmetic is exact. Models are built in [`nlmodel`], turned into
//! explicit [`consistency::Assessment`]s, and checked by closed-form predicates
//! that are cross-validated against linear-programming oracles ([`lp`]).

pub mod algebra;
pub mod consistency;
pub mod document;
pub mod error;
pub mod fuzz;
pub mod intervals;
pub mod lp;
pub mod nlmodel;
pub mod rational;

pub use algebra::{BaseProbability, Event, Partition};
pub use consistency::{Assessment, PartialAssessment, Verdict, Witness};
pub use error::{Error, Result};
pub use nlmodel::{ModelClass, ModelTag, NLModel, NLParams, Orientation};
pub use rational::{q, Rational};

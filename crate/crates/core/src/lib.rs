//! Weighted translations `T f = w · (f ∗ δ_a)` on Orlicz spaces over discrete
//! groups (ℤ, ℤᵈ, the integer Heisenberg group, ℤ/m).
//!
//! - [`group`]: group arithmetic, torsion and the separation constant of a finite set.
//! - [`young`] and [`orlicz`]: Young functions, their conjugates, the modular and the Luxemburg norm.
//! - [`weight`]: weights, the operators `T`/`S` and the orbit products `φ_n`, `φ̃_n`.
//! - [`criteria`]: witness searches for recurrence, transitivity, mixing and chaos.
//! - [`lab`]: the vectors that realise those witnesses, measured in the Luxemburg norm.
//! - [`config`] and [`report`]: the JSON layer behind the `orlicz-lab` binary.
//!
//! ```
//! use orlicz_dynamics::criteria::{multiply_recurrent_check, CriterionRequest, Outcome};
//! use orlicz_dynamics::group::{CompactSet, Group, GroupElement};
//! use orlicz_dynamics::weight::{Weight, WeightedSystem};
//! use orlicz_dynamics::young::YoungFunction;
//!
//! let sys = WeightedSystem::new(
//!     Group::Integers,
//!     GroupElement::new(&[1]),
//!     Weight::TwoSidedStep { c_neg: 2.0, c_pos: 0.5 },
//!     YoungFunction::power(2.0).unwrap(),
//! )
//! .unwrap();
//! let k = CompactSet::integer_box(&Group::Integers, &[-2], &[2]).unwrap();
//! let req = CriterionRequest::new(sys, k).with_depth(3).with_epsilons(vec![1e-3]);
//! let verdict = multiply_recurrent_check(&req).unwrap();
//! assert_eq!(verdict.outcome, Outcome::WitnessFound);
//! assert_eq!(verdict.witness[0].n, 14);
//! ```

pub mod config;
pub mod criteria;
pub mod group;
pub mod lab;
pub mod orlicz;
pub mod report;
pub mod solve;
pub mod weight;
pub mod young;

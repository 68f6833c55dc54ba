//! Kernel adaptive filters with high-order error-power updates.
//!
//! The crate provides the linear least-mean-absolute-third filter (LMAT), the
//! kernel least-mean-square filter (KLMS), its absolute-third counterpart
//! (KLMAT), a Lorentzian variable-step-size KLMAT and a novelty-gated KLMAT,
//! together with the Mackey-Glass and sunspot prediction benchmarks used to
//! compare them under several measurement-noise models.
//!
//! ```
//! use klmat::filters::{FilterSpec, OnlineFilter, Sample};
//!
//! let mut f = FilterSpec::Klmat { mu: 0.5, h: 1.0 }.build(1).unwrap();
//! let out = f.step(&Sample::new(vec![0.0], 1.0)).unwrap();
//! assert_eq!(out.error, 1.0);
//! assert_eq!(f.predict(&[0.0]).unwrap(), 0.5);
//! ```

pub mod analysis;
pub mod bench;
pub mod error;
pub mod filters;
pub mod kernel;
pub mod noise;
pub mod signals;

pub use error::{Error, Result};

//! Corpus-driven suffix stripping.
//!
//! A word's stem is chosen from the sequence of prefix relative
//! frequencies `C[e] = f(first e+1 chars) / f(first e chars)` read off a
//! corpus, by solving a small 0/1 program that keeps the longest trailing
//! block of non-decreasing scores and then picking the longest run of equal
//! decisions.
//!
//! ```
//! use ipstem::corpus::{load_prefix_table, IngestOptions};
//! use ipstem::Stemmer;
//!
//! let model = load_prefix_table(
//!     [("P", 1863235u64), ("Pa", 536621), ("Par", 250520), ("Pars", 2284),
//!      ("Parso", 606), ("Parson", 606), ("Parsons", 542)],
//!     &IngestOptions::default(),
//! ).unwrap();
//! let result = Stemmer::new(&model).stem("Parsons").unwrap();
//! assert_eq!(result.stem, "Parson");
//! ```

pub mod corpus;
pub mod eval;
pub mod ip;
pub mod profile;
pub mod stemmer;

pub use corpus::FrequencyModel;
pub use ip::{IpInstance, IpSolution, Solver};
pub use profile::{probability_profile, ProbabilityProfile};
pub use stemmer::{StemError, StemResult, Stemmer};

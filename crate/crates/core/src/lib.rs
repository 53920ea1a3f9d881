//! Probabilistic model checking of Markov chains and MDPs against
//! nondeterministic generalised Büchi automata and LTL, using lazy
//! determinisation.

pub mod automata;
pub mod bits;
pub mod breakpoint;
pub mod engine;
pub mod gen;
pub mod ght;
pub mod graph;
pub mod ltl;
pub mod model;
pub mod semidet;
pub mod subset;

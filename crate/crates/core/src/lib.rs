pub mod chordal;
pub mod covers;
pub mod generators;
pub mod graph;
pub mod nested;
pub mod pipeline;
pub mod separations;
pub mod symmetry;
pub mod treedec;

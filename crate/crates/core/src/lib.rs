pub mod bondgraph;
pub mod ensemble;
pub mod export;
pub mod extgraph;
pub mod grid;
pub mod io;
pub mod morse;
pub mod pipeline;
pub mod synth;
pub mod triangulation;

//! Benchmark model generators, the cross-engine equivalence checker and the
//! timing harness behind the `bipsym` command.

pub mod equiv;
pub mod gen;
pub mod timing;
pub mod trace;

pub use equiv::{check_encoding, check_equivalence, Divergence, EquivalenceReport};
pub use gen::{gen_bus, gen_bus_with, gen_random, gen_tasks, random_term, BusCycle, GenError, RandomBounds};
pub use timing::{
    bench, bench_with, write_csv, BenchError, BenchOptions, BenchRecord, EngineKind, Example, Repetition, CSV_HEADER,
};
pub use trace::{state_names, write_trace, TRACE_HEADER};

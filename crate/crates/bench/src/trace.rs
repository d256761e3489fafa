//! Trace output as CSV: one row per executed step.

use std::io;

use bipsym_core::{GlobalState, SystemModel, Trace};

pub const TRACE_HEADER: [&str; 3] = ["step", "interaction", "state"];

/// Space-separated state names, one per atom.
pub fn state_names(system: &SystemModel, state: &GlobalState) -> String {
    let names: Vec<&str> = system
        .atoms()
        .iter()
        .zip(&state.0)
        .map(|(a, &q)| a.states()[q].as_str())
        .collect();
    names.join(" ")
}

pub fn write_trace<W: io::Write>(out: W, system: &SystemModel, trace: &Trace) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for (k, s) in trace.steps.iter().enumerate() {
        w.write_record([
            (k + 1).to_string(),
            s.interaction.to_string(),
            state_names(system, &s.state),
        ])?;
    }
    w.flush()?;
    Ok(())
}

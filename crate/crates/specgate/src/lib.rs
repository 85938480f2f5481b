//! File formats, reporting, and benchmarking around `specgate-core`:
//! WAV read/write, JSON/CSV metric reports, and a wall-clock timing
//! harness with thread-scaling sweeps. The CLI binary lives in this
//! crate as well.

pub mod bench;
pub mod report;
pub mod wav;

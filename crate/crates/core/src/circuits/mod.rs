//! Circuit representations and analyses: fan-in-2 straight-line programs,
//! bounded-depth layered circuits, value vectors, exact verification,
//! cancellation-freeness, gate elimination and composition.

mod layered;
mod slp;
mod text;
mod transform;

pub use layered::{LayerRef, LayeredCircuit};
pub use slp::{Circuit, Connective, Gate, Signal};
pub use transform::{compose, restrict_zero, EliminationResult};


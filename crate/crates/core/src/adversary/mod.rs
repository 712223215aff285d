//! Channel noise, the intercept-resend eavesdropper and the steganalysis
//! detector built on her discrimination outcomes.

mod channel;
mod detect;
mod eve;

pub use channel::ChannelModel;
pub use detect::{
    chi_squared_uniform, estimate_embedding_rate, mdep_curve, steganalyze, DetectionReport, MdepPoint,
};
pub use eve::{intercept_resend, Eavesdropper, EveMeasurement, EveObservation, EveStrategy};

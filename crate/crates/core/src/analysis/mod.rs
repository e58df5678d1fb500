//! Schedules, Ising correlations, thermal counting, perturbative locality and power-law fits.

mod correlations;
pub mod elliptic;
mod fit;
mod perturb;
pub mod quad;
mod schedule;

pub use correlations::{
    error_amplitude, error_amplitude_series, thermal_fraction, thermal_fraction_limit,
    xx_correlation, CorrelationMethod, CorrelationResult,
};
pub use fit::{fit_power_law, FitResult};
pub use perturb::first_order_support;
pub use schedule::{
    closed_form_rate, closed_form_time, closed_form_total_time, schedule_closed_form,
    schedule_numeric, window_time, Schedule, WindowTime,
};

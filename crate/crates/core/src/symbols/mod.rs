//! Interaction-coefficient algebra, synthetic measurements and recovery.

pub mod coeffs;
pub mod convolution;
pub mod recovery;

pub use coeffs::{
    coeff_c, coeff_c_of, coeff_c_split, coeff_d, coeff_d_of, coeff_d_split, coeff_part_sums, coeff_parts, coeff_q3, interaction_coeffs,
    InteractionCoeffs,
};
pub use convolution::{convolve_pair, convolve_profiles, convolve_profiles_with, ConvolutionError, ConvolutionOptions, SymbolProfile};
pub use recovery::{
    higher_measurement, higher_order_factor, measurement_oracle, recover_higher, recover_lower, recover_lower_with, three_wave_oracle,
    Beta3Source, LowerRecovery, Measurement, RecoveryError, RecoveryOptions, ThreeWave,
};

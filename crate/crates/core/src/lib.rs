pub mod arith;
pub mod certificate;
pub mod cycles;
pub mod divisors;
pub mod error;
pub mod forms;
pub mod function_field;
pub mod local_series;
pub mod quotients;

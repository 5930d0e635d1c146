mod record;
mod suite;

pub use record::{Certificate, OrdEntry, Verdict};
pub use suite::{
    run_cross_checked, run_suite, run_suite_on, verdict_mismatches, Backend, CertificateBundle, Section, Suite, SuiteConfig, Summary,
};

//! Statistics for validating and calibrating channel ensembles: summary
//! moments, normality testing, two-sample comparison, outlier fences,
//! robust line fitting, and the scenario parameter registry.

mod dist;
pub mod ks;
pub mod normality;
pub mod profiles;
pub mod regress;
pub mod summary;

pub use ks::{ks_statistic, ks_two_sample};
pub use normality::{lognormality_battery, normality_battery, TestReport};
pub use profiles::{builtin_profile, builtin_profiles, ScenarioProfile};
pub use regress::{pearson, robust_regress, LineForm, RegressionLine};
pub use summary::{boxplot_outliers, summary_statistics, SummaryStats};

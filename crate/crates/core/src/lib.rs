//! Core algorithms for randomized-reference classifier correction.
//!
//! The crate provides seeded RNG streams, dataset handling, the numerics
//! stack (special functions, bounded distributions, adaptive quadrature),
//! randomized reference classifiers, soft confusion matrix correction,
//! simple base classifiers, evaluation utilities, and rank statistics.

pub mod baseclf;
pub mod dataset;
pub mod dist;
pub mod eval;
pub mod quad;
pub mod rng;
pub mod rrc;
pub mod scm;
pub mod special;
pub mod stats;
pub mod support;

pub use baseclf::{BaseSpec, ClassifierError, TrainedClassifier};
pub use dataset::{normalize_features, Dataset, DatasetError, DatasetSummary, FeatureScaler};
pub use eval::{
    compute_losses, stratified_kfold, tune_knn_k, tune_scm, ConfusionCounts, GridChoice,
    LossReport, LOSS_NAMES,
};
pub use scm::{build_scm, ScmClassifier, ScmError, ValidationBank};
pub use dist::{match_mean, BetaDist, TruncNormal, UnitDist};
pub use quad::{QuadError, QuadResult};
pub use rng::SeededRng;
pub use rrc::{score_sd, LocationRule, ScoreFamily, DEFAULT_TOL};
pub use stats::{
    all_subsets_exhaustive_sets, average_ranks, bergmann_hommel, fmt_p, friedman_exact_p,
    friedman_test, holm, pairwise_exhaustive_sets, pairwise_indices, render_rank_table,
    wilcoxon_signed_rank, wilcoxon_signed_rank_approx, CriterionReport, FriedmanOutcome,
    MetricTable, RankSummary, StatsError, WilcoxonOutcome,
};
pub use support::{decide, decide_slice, SupportError, SupportVector};

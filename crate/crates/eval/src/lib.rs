//! Measures for generated proofs, hints and explanations: accuracy tables,
//! hint validity, distinct hints per problem, rater agreement and the
//! parent-length test, plus the batch pipeline that produces them.

mod grade;
mod pipeline;
mod ratings;
mod records;
pub mod stats;

pub use grade::{grade_items, GradeItem, GradeItems, GradeOutcome};
pub use logichint_prompt::{Role, SplitConfig};
pub use pipeline::{
    run_pipeline, write_agreement, EvalReport, Failure, Input, Overall, ParentLength, PipelineConfig,
    ProofOutcome, Stage, Summary,
};
pub use ratings::{
    agreement, read_ratings, sample_for_rating, write_ratings, Agreement, AgreementStats, RatingsError, RubricScore,
    ALPHA, RATING_FRACTION, SCALE_MAX, SCALE_MIN,
};
pub use records::{
    accuracy_by, breakdown_by_rule, percent, proof_parents, unique_hints_per_problem, BreakdownRow, EmptyRecords,
    EvalRecord, GroupKey, GroupRow, Origin, ProblemCount, UniqueHints,
};

"""Minimal interval-rule summaries of labeled outlier detection results.

Learns a small set of short per-attribute interval rules that classify a
labeled dataset, trading training accuracy against total rule length through
a single ratio objective with a self-tuning stabilizer. A localized variant
jointly partitions the data and learns one rule set per partition. Greedy
information-gain trees (depth-swept and score-pruned) serve as baselines.
"""

from .baselines import cart_fit, id3_fit_depth, id3_sweep
from .bench import BenchReport, BenchRow, run_f1_vs_length, run_length_comparison, run_sweeps
from .dataset import (
    Dataset,
    DatasetError,
    StandardizationParams,
    gen_band2d,
    gen_blobs,
    gen_pima_like,
    load_csv,
    make_dataset,
    save_csv,
    standardize,
)
from .lstair import (
    LStairModel,
    LStairTrace,
    Partitioning,
    lstair_fit,
    lstair_predict,
    lstair_predict_many,
    model_from_doc,
    model_to_doc,
    partition_objective,
    reassign,
)
from .metrics import (
    ObjectiveState,
    accuracy,
    entropy,
    f1,
    info_gain,
    purity,
    stair_objective,
)
from .rules import (
    Interval,
    Rule,
    RuleError,
    RuleSet,
    covers,
    make_rule,
    make_ruleset,
    predict,
    predict_many,
    refine,
    render,
    rule_length,
    ruleset_from_doc,
    ruleset_to_doc,
)
from .splitter import CandidateSplit, SplitHeap, best_candidate
from .stair import (
    StairConfig,
    TrainingTrace,
    boundary_M,
    best_valid_split,
    stair_fit,
    verify_monotonicity,
)

__version__ = "0.1.0"

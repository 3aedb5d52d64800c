"""Desk-scale multi-label topic classification toolkit.

Pipeline: weak keyword labeling -> feature assembly over text, links,
media, entities, and author profile -> dual-encoder linear classifier with
logit fusion -> factor-graph constraint calibration -> ranking evaluation.
"""

from .classifier import (
    LinearDualModel,
    TrainConfig,
    class_weights,
    combine_logits,
    load_model,
    predict_logits,
    predict_many,
    predict_proba,
    save_model,
    sigmoid,
    train,
    weighted_bce_loss,
)
from .constraints import (
    ConstraintSet,
    exclusion_potential,
    inclusion_potential,
    load_constraint_file,
    parse_constraints,
)
from .corpus import (
    Author,
    Corpus,
    Document,
    Hyperlink,
    load_corpus,
    save_corpus,
    split_user_disjoint,
)
from .datasets import make_synthetic_corpus
from .errors import DataError, NumericError
from .estimators import ConstraintCalibrator, TopicClassifier
from .evaluate import (
    EvalReport,
    average_precision,
    chatter_count,
    evaluate_predictions,
    median_aps,
    violation_count,
)
from .factorgraph import (
    BPConfig,
    BPResult,
    FactorGraph,
    NonConvergenceWarning,
    brute_force_marginals,
    build_factor_graph,
    calibrate,
    run_belief_propagation,
)
from .features import AssemblyConfig, assemble_author_input, assemble_content_input
from .hashing import SparseFeatureVector, featurize, hash_gram
from .topics import (
    TopicSpace,
    decode_labels,
    default_topic_space,
    encode_labels,
    load_topic_file,
    register_topics,
)
from .weaklabel import RuleSet, compile_rules, load_rule_file, partition_chatter, weak_label

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "DataError",
    "NumericError",
    # topics
    "TopicSpace",
    "register_topics",
    "load_topic_file",
    "default_topic_space",
    "encode_labels",
    "decode_labels",
    # corpus
    "Hyperlink",
    "Author",
    "Document",
    "Corpus",
    "load_corpus",
    "save_corpus",
    "split_user_disjoint",
    # weak labeling
    "RuleSet",
    "compile_rules",
    "load_rule_file",
    "weak_label",
    "partition_chatter",
    # features
    "AssemblyConfig",
    "assemble_content_input",
    "assemble_author_input",
    "SparseFeatureVector",
    "featurize",
    "hash_gram",
    # classifier
    "TrainConfig",
    "LinearDualModel",
    "train",
    "sigmoid",
    "combine_logits",
    "weighted_bce_loss",
    "class_weights",
    "predict_logits",
    "predict_proba",
    "predict_many",
    "save_model",
    "load_model",
    # constraints + calibration
    "ConstraintSet",
    "inclusion_potential",
    "exclusion_potential",
    "parse_constraints",
    "load_constraint_file",
    "BPConfig",
    "BPResult",
    "FactorGraph",
    "NonConvergenceWarning",
    "build_factor_graph",
    "run_belief_propagation",
    "brute_force_marginals",
    "calibrate",
    # evaluation
    "EvalReport",
    "average_precision",
    "median_aps",
    "chatter_count",
    "violation_count",
    "evaluate_predictions",
    # estimators
    "TopicClassifier",
    "ConstraintCalibrator",
    # synthetic data
    "make_synthetic_corpus",
]

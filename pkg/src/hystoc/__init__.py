"""Word-level confidences from scored n-best lists via iterative alignment
into confusion networks, plus system fusion and confidence evaluation."""

from hystoc.core import (
    EPS,
    HystocError,
    Hypothesis,
    NBestList,
    log_add_exp,
    log_sum_exp,
    softmax,
    tokenize,
)
from hystoc.align import EditOp, EditScript, OpKind, levenshtein_align, word_error_count
from hystoc.confnet import (
    Bin,
    ConfidentTranscript,
    ConfidentWord,
    ConfusionNetwork,
    RescoreWeights,
    best_path,
    build_confusion_network,
    build_from_ordered,
    extract_best,
    normalize,
    rescore,
    transcript_from_network,
)
from hystoc.fusion import FusionScheme, RoverParams, hystoc_fuse, rover_fuse
from hystoc.evaluation import (
    CalibrationCohort,
    WerReport,
    calibration_cohorts,
    corpus_wer,
    mark_correctness,
)

__all__ = [
    "EPS",
    "HystocError",
    "Hypothesis",
    "NBestList",
    "log_add_exp",
    "log_sum_exp",
    "softmax",
    "tokenize",
    "EditOp",
    "EditScript",
    "OpKind",
    "levenshtein_align",
    "word_error_count",
    "Bin",
    "ConfidentTranscript",
    "ConfidentWord",
    "ConfusionNetwork",
    "RescoreWeights",
    "best_path",
    "build_confusion_network",
    "build_from_ordered",
    "extract_best",
    "normalize",
    "rescore",
    "transcript_from_network",
    "FusionScheme",
    "RoverParams",
    "hystoc_fuse",
    "rover_fuse",
    "CalibrationCohort",
    "WerReport",
    "calibration_cohorts",
    "corpus_wer",
    "mark_correctness",
]

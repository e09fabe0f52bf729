"""Cross-lingual label alignment for polyglot sequence taggers.

Matches argument labels across two languages by the geometry of their
softmax head rows, then ties the matched rows through a learned affine
map while training a shared-encoder tagger.
"""

__version__ = "0.1.0"

from .errors import (ClarError, ConfigError, ConvergenceError, DegenerateInputError, FormatError,
                     InfeasibleError, NumericError, ParseError)
from .labels import (Corpus, FrequencyTable, LabeledMatrix, LabelId, Sentence,
                     count_label_frequencies, filter_frequent_labels, load_weight_matrix,
                     parse_conll, save_weight_matrix, write_conll)
from .matcher import (ALL, HALF, MatchConfig, Pair, Pairing, brute_force_matching,
                      build_cost_matrix, match_labels, solve_matching)
from .regularizer import (AffineTransform, clar_gradients, clar_penalty,
                          fit_affine_least_squares)
from .synth import GroundTruth, SynthConfig, generate_heldout, generate_task
from .tagger import Metrics, TaggerModel, TrainConfig, evaluate, forward, init_model, train
from .analysis import ManifoldReport, ProjectionResult, manifold_report, pairwise_distances, svd_project

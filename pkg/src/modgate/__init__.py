"""modgate: a comment-moderation engine.

GRU text classifiers with a deep attention mechanism (plus ablations, a CNN,
and a word-precision-list baseline), trained from scratch with hand-derived
gradients; threshold tuning under coverage constraints; and a moderation
service with a persistent human review queue.
"""

from .gradcore import AdamConfig, Param, cross_entropy, finite_diff_check, glorot_init
from .metrics import EvalReport, ScoredSet, auc, evaluate, f_beta, macro_f_beta, precisions, spearman
from .models import (
    ListScorer,
    ModelConfig,
    ModelParams,
    NeuralScorer,
    Prediction,
    WordList,
    attention_weights,
    compute_gradients,
    gru_forward,
    gru_step,
    list_build,
    list_score,
    predict,
)
from .service import ModerationService, QueueItem, make_http_server
from .textpipe import (
    Comment,
    EmbeddingTable,
    FormatError,
    Vocabulary,
    build_vocab,
    gen_synthetic,
    load_embeddings,
    read_dataset,
    tokenize,
    write_dataset,
)
from .trainer import TrainConfig, TrainedModel, TrainReport, load_trained, save_trained, split_heldout, train
from .tuner import Thresholds, decide, tune

__version__ = "0.1.0"

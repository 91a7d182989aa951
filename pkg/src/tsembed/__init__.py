"""Fixed-dimensional time series embeddings from GRU sequence autoencoders,
with DTW and SVM baselines for downstream classification."""

__version__ = "0.1.0"

from .baselines import DtwConfig, dtw_1nn_classify, dtw_distance
from .dataio import (
    Corpus,
    Dataset,
    TimeSeries,
    load_dataset,
    load_manifest,
    make_synthetic,
    synthetic_control,
    znormalize,
)
from .rnn import GruLayerParams, gru_step, stack_forward
from .sae import (
    SaeModel,
    TrainConfig,
    decode,
    embed,
    embed_many,
    init_sae,
    load_checkpoint,
    reconstruction_loss,
    save_checkpoint,
    train,
)
from .svm import (
    GridSearchResult,
    SvmModel,
    evaluate,
    grid_search_cv,
    ovo_predict,
    ovo_train,
    rbf_kernel,
    smo_train,
)
from .tsne import TsneConfig, emit_scatter, tsne_embed

__all__ = [
    "__version__",
    "Corpus", "Dataset", "TimeSeries",
    "load_dataset", "load_manifest", "make_synthetic", "synthetic_control",
    "znormalize",
    "GruLayerParams", "gru_step", "stack_forward",
    "SaeModel", "TrainConfig", "decode", "embed", "embed_many", "init_sae",
    "load_checkpoint", "reconstruction_loss", "save_checkpoint", "train",
    "DtwConfig", "dtw_distance", "dtw_1nn_classify",
    "SvmModel", "GridSearchResult", "rbf_kernel", "smo_train", "ovo_train",
    "ovo_predict", "grid_search_cv", "evaluate",
    "TsneConfig", "tsne_embed", "emit_scatter",
]

"""urlsentinel: hybrid malicious-URL detection.

Statistical + hashed character n-gram features, SMOTE balancing, Isolation
Forest outlier filtering and a feedforward neural classifier, with training
and evaluation CLI, binary model persistence and an HTTP prediction service.
"""

from .anomaly import (
    AnomalyConfig,
    IsolationForestModel,
    anomaly_score,
    avg_path_c,
    filter_outliers,
    fit_forest,
    path_length,
    score_batch,
)
from .balance import SmoteConfig, knn_minority, smote_resample
from .errors import (
    BundleChecksumError,
    BundleFormatError,
    BundleMagicError,
    BundleTruncationError,
    BundleVersionError,
    DegenerateInputError,
    FeedError,
    FeedFormatError,
    FeedNetworkError,
    FeedStatusError,
    FeedTimeoutError,
    PipelineStageError,
    UrlSentinelError,
)
from .features import (
    FeatureScaler,
    HashedVector,
    StatFeatures,
    VectorizerConfig,
    char_ngrams,
    featurize,
    featurize_raw,
    fit_scaler,
    fnv1a_32,
    hash_vectorize,
    normalize_url,
    shannon_entropy,
    stat_features,
)
from .ingest import (
    BenignGenConfig,
    Dataset,
    LabeledUrl,
    SplitConfig,
    dedup,
    fetch_feed,
    generate_benign,
    generate_malicious,
    load_dataset,
    parse_phishtank_csv,
    parse_urlhaus_text,
    save_dataset,
    stratified_split,
    synthetic_corpus,
)
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    classification_metrics,
    confusion_at_threshold,
    evaluate,
    roc_auc,
    roc_curve,
)
from .model_store import ModelBundle, load_bundle, save_bundle
from .neuralnet import (
    AdamState,
    MlpModel,
    TrainConfig,
    adam_step,
    backward,
    bce_loss,
    forward,
    init_weights,
    predict_proba,
    train,
)
from .pipeline import (
    BenchReport,
    PipelineConfig,
    PredictionResult,
    classify_batch,
    classify_url,
    derive_seed,
    run_bench,
    train_pipeline,
)
from .service import PredictionServer, serve_http

__version__ = "0.1.0"

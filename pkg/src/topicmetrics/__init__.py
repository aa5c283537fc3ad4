"""Topic, sentiment, and combined feature sets for stance classification."""

__version__ = "0.1.0"

from .classify import (
    ClassifierSpec,
    EvalResult,
    KNearestNeighbors,
    LinearSVM,
    LogisticRegressionGD,
    cross_validate,
    f1_score,
    fit_classifier,
    predict,
    train_test_split,
)
from .coherence import (
    CoherenceConfig,
    SweepResult,
    SweepRow,
    best_scores,
    coherence_score,
    enhancement,
    sweep,
    sweep_to_csv,
)
from .corpus import (
    Corpus,
    CorpusStats,
    DocTermMatrix,
    Document,
    Vocabulary,
    build_doc_term_matrix,
    corpus_stats,
    default_stopwords,
    load_corpus,
    load_stopwords,
    preprocess_corpus,
    preprocess_text,
)
from .embedding import (
    EmbeddingMatrix,
    emb1_bytes,
    load_embeddings,
    lsa_embed,
    reduce_dim,
    write_embeddings,
)
from .features import (
    FeatureMatrix,
    combine_features,
    load_lexicon,
    one_hot_topics,
    sentiment_features,
)
from .report import ComparisonRow, improvement, point_biserial, render_report
from .seeding import derive_seed
from .stemming import porter_stem
from .topics import (
    ClusterTopicModel,
    GibbsLDA,
    MultiplicativeNMF,
    TopicKeywords,
    TopicModelResult,
    assign_topics,
    c_tf_idf,
    fit_cluster_topics,
    fit_lda,
    fit_nmf,
    load_model,
    save_model,
    top_keywords,
)

__all__ = [name for name in dir() if not name.startswith("_")]

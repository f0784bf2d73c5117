"""Classification-tree analysis of citation counts from bibliometric predictors."""

from .domain import ClassLabel, PredictorVector, SubjectClass, class_of_level, level_of_citations
from .errors import CitetreeError, DataError, NumericError
from .ingest import Dataset, STANDARD_SCHEMA, parse_dataset_csv, stratified_sample, generate_synthetic
from .tree import GrowthControl, Tree, grow_tree, node_deviance, predict_class, summarize_tree

__version__ = "0.1.0"

__all__ = [
    "ClassLabel", "PredictorVector", "SubjectClass", "class_of_level", "level_of_citations",
    "CitetreeError", "DataError", "NumericError",
    "Dataset", "STANDARD_SCHEMA", "parse_dataset_csv", "stratified_sample", "generate_synthetic",
    "GrowthControl", "Tree", "grow_tree", "node_deviance", "predict_class", "summarize_tree",
]

from .commands import prepare_dataset, dictionary_learning, train_model
from .commands import evaluate_checkpoint, predict_labels, gradient_check
from .commands import pca_projection, comparison_study
from .utils import configure_logging, ConvnetError

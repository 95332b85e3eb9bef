from .prepare import prepare_dataset
from .dict_learn import dictionary_learning
from .train import train_model
from .evaluate import evaluate_checkpoint, predict_labels
from .gradcheck import gradient_check
from .pca import pca_projection
from .compare import comparison_study

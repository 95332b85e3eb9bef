from .cifar import CLASS_NAMES, LabeledDataset, load_cifar10, write_cifar10
from .cifar import split, save_prepared, load_prepared, class_counts
from .batches import BatchIterator, sequential_batches
from .predictions import write_predictions, write_scatter
from .pca import pca2

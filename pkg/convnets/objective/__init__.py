from .cross_entropy import LossReport, cross_entropy, softmax_xent_backward
from .cross_entropy import sample_losses, misclassified, report_from_samples

from .transforms import rescale_center, fit_center, grayscale, gcn
from .zca import PreprocStats, fit_zca, apply_zca
from .pipelines import PIPELINES, PipelineSpec, fit_pipeline, apply_pipeline
from .pipelines import pipeline_hash
from .kmeans import Dictionary, extract_patches, learn_dictionary, encode

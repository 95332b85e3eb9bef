from .schedule import TrainSchedule, lr_at, momentum_at
from .schedule import baseline_schedule, initial_cnn_schedule, SCHEDULE_PRESETS
from .schedule import MAX_NORM_DEFAULT, FIRST_LAYER_MAX_NORM_DEFAULT
from .momentum import nag_step, classical_step, zero_velocity
from .maxnorm import NormConstraint, project_maxnorm

from .curve import CurveRow, LearningCurve, CURVE_COLUMNS
from .early_stop import EarlyStopState, should_stop, EARLY_STOP_WINDOW
from .checkpoint import Checkpoint
from .loop import train, evaluate, TrainResult, batch_gradients, derive_seeds
from .loop import BEST_FILE, LAST_FILE, CURVE_FILE
from .gradcheck import gradcheck, gradcheck_network, GradcheckReport
from .gradcheck import TensorCheck, relative_error
